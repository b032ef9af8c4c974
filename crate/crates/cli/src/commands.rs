use crate::svg::line_plot;
use crate::SceneArgs;
use clap::Args;
use num_complex::Complex64 as C64;
use polydamp::control::{survey, Condition, ControlError, Outcome, SurveyOptions};
use polydamp::flow::{angle_trajectory, flow_closed_form, rotate_to_canonical, AngleState, SpherePoint};
use polydamp::json::{fmt_f64, num, nums};
use polydamp::rational::{parse_q, to_f64, Q};
use polydamp::reduction::{reduce_geodesic, verify_periodicity, ReductionError};
use polydamp::scene::{parse_scene_json, preset_scene, FlatTorus, Scene, SceneError};
use polydamp::spectral::io::write_field;
use polydamp::spectral::{
    check_nonconcentration, check_slab_estimate, constant_damping_rate, fit_decay_rate, gaussian_beam, plane_wave,
    profile_quasimode, rasterize_damping, run_simulation, Grid, InitialData, Quasimode, QuasimodeReport,
    Regime, SimulationConfig, SpectralError, TransverseProfile, WaveState,
};
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use thiserror::Error;

pub const EXIT_INVALID_SCENE: u8 = 3;
pub const EXIT_NAN: u8 = 4;
pub const EXIT_DEGENERATE: u8 = 5;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_SOFTWARE: u8 = 70;
pub const EXIT_IO: u8 = 74;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Control(#[from] ControlError),
    #[error(transparent)]
    Spectral(SpectralError),
    #[error(transparent)]
    Reduction(#[from] ReductionError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        match e {
            SpectralError::BadResolution(_) | SpectralError::BadParameter(_) => CliError::Usage(e.to_string()),
            e => CliError::Spectral(e),
        }
    }
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Scene(SceneError::Invalid(_) | SceneError::Format(_)) => EXIT_INVALID_SCENE,
            CliError::Scene(_) => EXIT_USAGE,
            CliError::Control(ControlError::BadBound) => EXIT_USAGE,
            CliError::Control(_) => EXIT_SOFTWARE,
            CliError::Spectral(SpectralError::Io(_)) => EXIT_IO,
            CliError::Spectral(_) => EXIT_SOFTWARE,
            CliError::Reduction(ReductionError::DegenerateAlpha { .. } | ReductionError::Exhausted) => EXIT_DEGENERATE,
            CliError::Reduction(_) => EXIT_USAGE,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

type Res = Result<u8, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn load_scene(a: &SceneArgs) -> Result<Scene, CliError> {
    match (&a.scene, &a.preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            Ok(parse_scene_json(&text)?)
        }
        (None, Some(p)) => Ok(preset_scene(p)?),
        (None, None) => Err(usage("one of --scene FILE or --preset NAME is required")),
    }
}

fn out_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.to_path_buf(), source })
}

fn write(path: PathBuf, text: &str) -> Result<(), CliError> {
    fs::write(&path, text).map_err(|source| CliError::Io { path, source })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

/// Accepts `p/q` rationals and decimal floats.
fn parse_real(s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    if let Ok(x) = parse_q(s) {
        return Ok(to_f64(&x));
    }
    s.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| usage(format!("not a number: `{s}`")))
}

fn parse_reals(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',').map(parse_real).collect()
}

fn parse_ints(s: &str) -> Result<Vec<i64>, CliError> {
    s.split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| usage(format!("not an integer: `{t}`"))))
        .collect()
}

fn parse_res(s: &str, d: usize) -> Result<Vec<usize>, CliError> {
    let v: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| usage(format!("bad resolution `{t}`"))))
        .collect::<Result<_, _>>()?;
    match v.len() {
        1 => Ok(vec![v[0]; d]),
        n if n == d => Ok(v),
        n => Err(usage(format!("--res has {n} entries, scene has dimension {d}"))),
    }
}

fn point_arg(s: &Option<String>, d: usize, default: f64, name: &str) -> Result<Vec<f64>, CliError> {
    match s {
        None => Ok(vec![default; d]),
        Some(s) => {
            let v = parse_reals(s)?;
            match v.len() {
                1 => Ok(vec![v[0]; d]),
                n if n == d => Ok(v),
                n => Err(usage(format!("--{name} has {n} entries, expected {d}"))),
            }
        }
    }
}

// ---------------------------------------------------------------- verify

#[derive(Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    scene: SceneArgs,
    /// Comma list of wgcc, sgcc, cond13, finexc (default all).
    #[arg(long)]
    conditions: Option<String>,
    /// Largest |n_i| of the closed directions searched.
    #[arg(long, default_value_t = 3)]
    bound: u32,
    /// Arclength horizon for strong control.
    #[arg(long, default_value_t = 100.0)]
    horizon: f64,
    /// Print the verdict document on stdout instead of one line per condition.
    #[arg(long)]
    json: bool,
    /// Directory for verdicts.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn verify(a: &VerifyArgs) -> Res {
    let conditions: Vec<Condition> = match &a.conditions {
        None => Condition::ALL.to_vec(),
        Some(s) => s.split(',').map(|t| t.parse().map_err(usage)).collect::<Result<_, _>>()?,
    };
    let scene = match load_scene(&a.scene) {
        Err(CliError::Scene(SceneError::Invalid(report))) => {
            eprintln!("invalid scene:\n{report}");
            return Ok(EXIT_INVALID_SCENE);
        }
        r => r?,
    };
    let sv = survey(&scene, &SurveyOptions::new(a.bound, a.horizon))?;
    let verdicts: Vec<_> = conditions.iter().map(|&c| sv.verdict(c)).collect();
    let doc = json!({
        "schema": "1",
        "bound": a.bound,
        "horizon": num(a.horizon),
        "verdicts": verdicts.iter().map(|v| v.to_json()).collect::<Vec<_>>(),
    });
    if a.json {
        print!("{}", pretty(&doc));
    } else {
        println!("directions searched: {} (bound {})", sv.directions, a.bound);
        for v in &verdicts {
            println!("{}: {}", v.condition, v.label());
            for w in &v.witnesses {
                println!("  witness: {}", w.to_json());
            }
        }
    }
    if let Some(dir) = &a.out {
        out_dir(dir)?;
        write(dir.join("verdicts.json"), &pretty(&doc))?;
    }
    let code = if verdicts.iter().any(|v| v.result == Outcome::Fails) {
        1
    } else if verdicts.iter().any(|v| v.result == Outcome::Unknown) {
        2
    } else {
        0
    };
    Ok(code)
}

// -------------------------------------------------------------- simulate

#[derive(Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    scene: SceneArgs,
    /// random | modes:k1,k2;k1,k2 | beam | profile
    #[arg(long, default_value = "random")]
    init: String,
    /// Frequency band of random data.
    #[arg(long, default_value_t = 4)]
    band: i64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Mass term m in (∂t² - Δ + m + a∂t)u = 0.
    #[arg(long, default_value_t = 0.0)]
    m: f64,
    /// Final time.
    #[arg(long = "T", default_value_t = 10.0)]
    t_final: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Grid points per axis, one value or a comma list.
    #[arg(long, default_value = "64")]
    res: String,
    /// Record every `stride` steps.
    #[arg(long, default_value_t = 10)]
    stride: usize,
    /// Damping value on the damped set.
    #[arg(long, default_value_t = 1.0)]
    strength: f64,
    /// Semiclassical parameter for beam and profile data.
    #[arg(long, default_value = "1/16")]
    h: String,
    /// Propagation axis for beam and profile data.
    #[arg(long, default_value_t = 0)]
    axis: usize,
    /// Beam or profile center (comma list, default origin).
    #[arg(long)]
    center: Option<String>,
    /// Profile radii (comma list, default 1/4).
    #[arg(long)]
    radius: Option<String>,
    /// Fit window `t0,t1` (default the second half of the run).
    #[arg(long)]
    fit_window: Option<String>,
    /// Also write energy.svg.
    #[arg(long)]
    svg: bool,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

fn parse_modes(s: &str, d: usize) -> Result<Vec<(Vec<i64>, C64)>, CliError> {
    s.split(';')
        .map(|k| {
            let k = parse_ints(k)?;
            if k.len() != d {
                return Err(usage(format!("mode {k:?} has {} entries, expected {d}", k.len())));
            }
            Ok((k, C64::new(1.0, 0.0)))
        })
        .collect()
}

fn trial_quasimode(
    grid: &Grid,
    family: &str,
    axis: usize,
    center: &[f64],
    radius: &[f64],
    h: f64,
) -> Result<Quasimode, SpectralError> {
    match family {
        "beam" => gaussian_beam(grid, axis, center, h),
        "profile" => {
            let phi = TransverseProfile { center: center.to_vec(), radius: radius.to_vec() };
            profile_quasimode(grid, axis, &phi, h)
        }
        "plane" => {
            let p = grid.periods[axis];
            let k = (p / (std::f64::consts::TAU * h)).round().max(1.0) as i64;
            let mut kv = vec![0; grid.dim()];
            kv[axis] = k;
            plane_wave(grid, &kv)
        }
        other => Err(SpectralError::BadParameter(format!("unknown family `{other}` (profile, beam, plane)"))),
    }
}

pub fn simulate(a: &SimulateArgs) -> Res {
    let scene = load_scene(&a.scene)?;
    let d = scene.dim();
    if a.axis >= d {
        return Err(usage(format!("--axis {} out of range for dimension {d}", a.axis)));
    }
    if !(a.dt > 0.0 && a.t_final > 0.0 && a.stride > 0) {
        return Err(usage("--dt, --T and --stride must be positive"));
    }
    let grid = Grid::new(scene.torus.periods_f64(), parse_res(&a.res, d)?)?;
    let mut damping = rasterize_damping(&scene, &grid.res)?;
    damping.scale(a.strength);
    let init = match a.init.split_once(':') {
        None if a.init == "random" => InitialData::Random { band: a.band, seed: a.seed },
        Some(("modes", list)) => InitialData::Modes(parse_modes(list, d)?),
        None if a.init == "beam" || a.init == "profile" => {
            let center = point_arg(&a.center, d, 0.0, "center")?;
            let radius = point_arg(&a.radius, d, 0.25, "radius")?;
            let q = trial_quasimode(&grid, &a.init, a.axis, &center, &radius, parse_real(&a.h)?)?;
            // time-harmonic start: u(t) ≈ e^{-it/h} u
            let v = q.u.apply_symbol(|_| C64::new(0.0, -1.0 / q.h));
            InitialData::Fields(q.u, v)
        }
        _ => return Err(usage(format!("unknown --init `{}`", a.init))),
    };
    let (u, v) = init.build(&grid)?;
    let excited: Vec<f64> = {
        let xi2 = grid.xi2();
        let (cu, cv) = (u.coefficients(), v.coefficients());
        (0..grid.len()).filter(|&i| cu[i].norm() > 0.0 || cv[i].norm() > 0.0).map(|i| xi2[i]).collect()
    };
    let state = WaveState::new(&u, &v, &damping, a.m)?;
    let cfg = SimulationConfig { t_final: a.t_final, dt: a.dt, stride: a.stride, snapshot_every: None };
    out_dir(&a.out)?;
    let sim = match run_simulation(state, &cfg) {
        Err(SpectralError::NonFinite { step, t, last_good }) => {
            eprintln!("non-finite energy at step {step} (t = {t}); dumping the last good state");
            write_field(&a.out.join("last_good_u"), &last_good.displacement())?;
            write_field(&a.out.join("last_good_v"), &last_good.velocity())?;
            return Ok(EXIT_NAN);
        }
        r => r?,
    };
    let trace = &sim.trace;
    write(a.out.join("energy.csv"), &trace.to_csv())?;
    let window = match &a.fit_window {
        Some(s) => {
            let w = parse_reals(s)?;
            if w.len() != 2 {
                return Err(usage("--fit-window expects t0,t1"));
            }
            (w[0], w[1])
        }
        None => (a.t_final / 2.0, a.t_final),
    };
    let fit = fit_decay_rate(trace, window)?;
    let s = damping.samples();
    let uniform = s.iter().all(|x| *x == s[0]);
    let oracle = (uniform && s[0].re > 0.0 && !excited.is_empty()).then(|| constant_damping_rate(s[0].re, a.m, &excited));
    let doc = json!({
        "schema": "1",
        "rate": num(fit.rate),
        "prefactor": num(fit.prefactor),
        "r2": num(fit.r2),
        "window": nums(&[window.0, window.1]),
        "e0": num(trace.e0()),
        "e_final": num(*trace.energy.last().unwrap_or(&f64::NAN)),
        "max_relative_residual": num(trace.max_relative_residual()),
        "constant_damping_rate": oracle.map(num),
        "dt": num(a.dt),
        "t_final": num(a.t_final),
        "res": grid.res,
        "seed": a.seed,
    });
    write(a.out.join("fit.json"), &pretty(&doc))?;
    if a.svg {
        let pts: Vec<(f64, f64)> = trace.t.iter().zip(&trace.energy).map(|(&t, &e)| (t, e.max(1e-300).ln())).collect();
        write(a.out.join("energy.svg"), &line_plot("log energy", "t", "log E(t)", &[("log E", pts)]))?;
    }
    println!("rate {} (r2 {}), residual {}", fmt_f64(fit.rate), fmt_f64(fit.r2), fmt_f64(trace.max_relative_residual()));
    Ok(0)
}

// ----------------------------------------------------------------- probe

#[derive(Args)]
pub struct ProbeArgs {
    #[command(flatten)]
    scene: SceneArgs,
    /// profile | beam | plane
    #[arg(long, default_value = "profile")]
    family: String,
    /// Propagation axis.
    #[arg(long, default_value_t = 0)]
    axis: usize,
    /// Concentration center (comma list, default origin).
    #[arg(long)]
    center: Option<String>,
    /// Profile radii (comma list, default 1/4).
    #[arg(long)]
    radius: Option<String>,
    /// Semiclassical parameters, comma list of `p/q` or decimals.
    #[arg(long, default_value = "1/32,1/64,1/128")]
    h: String,
    #[arg(long, default_value = "256")]
    res: String,
    /// Slab width factor, in [1, h^(-1/2)].
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    /// Pass threshold for the non-concentration constant.
    #[arg(long, default_value_t = 10.0)]
    cmax: f64,
    /// Axis of the slices (default the first axis other than --axis).
    #[arg(long)]
    slice_axis: Option<usize>,
    /// Directory for probe.csv and probe.json (default: CSV on stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn report_json(r: &QuasimodeReport) -> Value {
    json!({
        "h": num(r.h),
        "norm_u": num(r.norm_u),
        "norm_au": num(r.norm_au),
        "norm_f": num(r.norm_f),
        "epsilon": num(r.epsilon),
        "observability_ratio": num(r.observability_ratio),
        "nonconcentration": r.nonconcentration.as_ref().map(|n| json!({
            "epsilon": num(n.epsilon),
            "width": num(n.width),
            "mass": num(n.mass),
            "constant": num(n.constant),
            "regime": regime_token(&n.regime),
            "pass": n.pass,
        })),
        "slab_ratio": r.slab_ratio.map(num),
    })
}

fn regime_token(r: &Regime) -> &'static str {
    match r {
        Regime::Active => "active",
        Regime::Vacuous => "vacuous",
    }
}

pub fn probe(a: &ProbeArgs) -> Res {
    let scene = load_scene(&a.scene)?;
    let d = scene.dim();
    let slice_axis = a.slice_axis.unwrap_or(if a.axis == 0 { 1 } else { 0 });
    if a.axis >= d || slice_axis >= d {
        return Err(usage(format!("axis out of range for dimension {d}")));
    }
    let hs = parse_reals(&a.h)?;
    if hs.iter().any(|&h| !(h > 0.0 && h < 1.0)) {
        return Err(usage("h values must lie in (0, 1)"));
    }
    let center = point_arg(&a.center, d, 0.0, "center")?;
    let radius = point_arg(&a.radius, d, 0.25, "radius")?;
    let grid = Grid::new(scene.torus.periods_f64(), parse_res(&a.res, d)?)?;
    let damping = rasterize_damping(&scene, &grid.res)?;
    let mut reports = Vec::new();
    for &h in &hs {
        let q = match trial_quasimode(&grid, &a.family, a.axis, &center, &radius, h) {
            Ok(q) => q,
            Err(e @ (SpectralError::Unresolvable(_) | SpectralError::ProfileTooWide { .. })) => {
                eprintln!("warning: skipping h = {h}: {e}");
                continue;
            }
            Err(e) => return Err(e.into()),
        };
        let mut r = QuasimodeReport::new(&q, &damping)?;
        let f = q.u.helmholtz(q.h);
        let c = center[slice_axis];
        r.nonconcentration = Some(check_nonconcentration(&q.u, &f, q.h, slice_axis, c, a.cmax)?);
        r.slab_ratio = match check_slab_estimate(&q.u, &f, q.h, a.beta, slice_axis, c) {
            Ok(x) => Some(x),
            Err(SpectralError::Unresolvable(why)) => {
                eprintln!("warning: no slab estimate at h = {h}: {why}");
                None
            }
            Err(e) => return Err(e.into()),
        };
        reports.push(r);
    }
    let mut csv = String::from("h,norm_u,norm_au,norm_f,epsilon,observability_ratio,nc_regime,nc_constant,nc_pass,slab_ratio\n");
    let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
    for r in &reports {
        let nc = r.nonconcentration.as_ref();
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(r.h),
            fmt_f64(r.norm_u),
            fmt_f64(r.norm_au),
            fmt_f64(r.norm_f),
            fmt_f64(r.epsilon),
            fmt_f64(r.observability_ratio),
            nc.map(|n| regime_token(&n.regime)).unwrap_or(""),
            opt(nc.map(|n| n.constant)),
            nc.map(|n| n.pass.to_string()).unwrap_or_default(),
            opt(r.slab_ratio),
        );
    }
    match &a.out {
        Some(dir) => {
            out_dir(dir)?;
            write(dir.join("probe.csv"), &csv)?;
            let doc = json!({
                "schema": "1",
                "family": a.family,
                "axis": a.axis,
                "slice_axis": slice_axis,
                "res": grid.res,
                "reports": reports.iter().map(report_json).collect::<Vec<_>>(),
            });
            write(dir.join("probe.json"), &pretty(&doc))?;
        }
        None => print!("{csv}"),
    }
    Ok(0)
}

// ------------------------------------------------------------------ flow

#[derive(Args)]
pub struct FlowArgs {
    /// Initial z (comma list).
    #[arg(long, allow_hyphen_values = true)]
    z: String,
    /// Initial zeta (comma list).
    #[arg(long, allow_hyphen_values = true)]
    zeta: String,
    #[arg(long, default_value_t = 10.0)]
    s_max: f64,
    /// Number of output rows, s evenly spaced over [0, s_max].
    #[arg(long, default_value_t = 101)]
    samples: usize,
    /// Integrator step.
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Also write flow.svg with theta1(s).
    #[arg(long)]
    svg: bool,
    /// Directory for flow.csv (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn flow(a: &FlowArgs) -> Res {
    let (z, zeta) = (parse_reals(&a.z)?, parse_reals(&a.zeta)?);
    if z.len() != zeta.len() || z.is_empty() {
        return Err(usage("--z and --zeta need the same nonzero length"));
    }
    if z.iter().chain(&zeta).all(|&x| x == 0.0) {
        return Err(usage("initial point is zero"));
    }
    if !(a.s_max >= 0.0 && a.dt > 0.0 && a.samples >= 1) {
        return Err(usage("--s-max must be nonnegative, --dt positive, --samples at least 1"));
    }
    let p = SpherePoint::new(z, zeta);
    let d = p.dim();
    let frame = rotate_to_canonical(&p);
    let theta1 = |x: &SpherePoint| AngleState::from_canonical(&frame.apply(x)).theta1;
    let times: Vec<f64> = (0..a.samples)
        .map(|i| if a.samples == 1 { 0.0 } else { a.s_max * i as f64 / (a.samples - 1) as f64 })
        .collect();
    let ode = angle_trajectory(&p, &times, a.dt);
    let mut csv = String::from("s");
    for pre in ["", "ode_"] {
        for name in ["z", "zeta"] {
            for i in 0..d {
                let _ = write!(csv, ",{pre}{name}_{}", i + 1);
            }
        }
        let _ = write!(csv, ",{pre}theta1");
    }
    csv.push_str(",divergence\n");
    let mut th = Vec::new();
    for (&s, o) in times.iter().zip(&ode) {
        let c = flow_closed_form(&p, s);
        let row: Vec<String> = std::iter::once(s)
            .chain(c.z.iter().chain(&c.zeta).copied())
            .chain([theta1(&c)])
            .chain(o.z.iter().chain(&o.zeta).copied())
            .chain([theta1(o), c.distance(o)])
            .map(fmt_f64)
            .collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
        th.push((s, theta1(&c), theta1(o)));
    }
    match &a.out {
        Some(dir) => {
            out_dir(dir)?;
            write(dir.join("flow.csv"), &csv)?;
        }
        None => print!("{csv}"),
    }
    if a.svg {
        let dir = a.out.clone().unwrap_or_else(|| PathBuf::from("."));
        out_dir(&dir)?;
        let closed = th.iter().map(|&(s, t, _)| (s, t)).collect();
        let ode = th.iter().map(|&(s, _, t)| (s, t)).collect();
        write(dir.join("flow.svg"), &line_plot("theta1(s)", "s", "theta1", &[("closed form", closed), ("ode", ode)]))?;
    }
    Ok(0)
}

// ---------------------------------------------------------------- reduce

#[derive(Args)]
pub struct ReduceArgs {
    /// Torus periods, comma list of rationals.
    #[arg(long)]
    periods: String,
    /// Primitive integer direction.
    #[arg(long, allow_hyphen_values = true)]
    n: String,
    /// Fix (p, q) instead of searching the default order.
    #[arg(long, allow_hyphen_values = true)]
    pq: Option<String>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for reduce.json (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn reduce(a: &ReduceArgs) -> Res {
    let periods: Vec<Q> = a
        .periods
        .split(',')
        .map(|t| parse_q(t.trim()).map_err(|e| usage(e.to_string())))
        .collect::<Result<_, _>>()?;
    let torus = FlatTorus::new(periods)?;
    let n = parse_ints(&a.n)?;
    let pq = match &a.pq {
        None => None,
        Some(s) => match parse_ints(s)?.as_slice() {
            &[p, q] => Some((p, q)),
            _ => return Err(usage("--pq expects p,q")),
        },
    };
    let r = reduce_geodesic(&torus, &n, pq)?;
    let report = verify_periodicity(&r, a.trials, a.seed);
    let mut doc = r.to_json();
    doc["schema"] = json!("1");
    doc["seed"] = json!(a.seed);
    doc["periodicity"] = report.to_json();
    let text = pretty(&doc);
    match &a.out {
        Some(dir) => {
            out_dir(dir)?;
            write(dir.join("reduce.json"), &text)?;
        }
        None => print!("{text}"),
    }
    Ok(0)
}
