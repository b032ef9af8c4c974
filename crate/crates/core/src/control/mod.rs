//! Geodesics on the torus against a polyhedral damping.
//!
//! A closed geodesic with primitive direction `n` is parametrized as
//! `X(t) = X0 + t (n_1 A_1, …, n_d A_d)`, `t ∈ [0, 1)`, which keeps every
//! computation rational. Arclength is only reported in floating point.

mod arrangement;
mod closure;
mod normal;
mod trace;
mod transverse;
mod verdict;

pub use closure::{orbit_closure_meets_interior, ClosureWitness};
pub use normal::{damped_normal_set, Complement, DampedSet, NormalDampingReport, OpenArc};
pub use trace::{contact_segments, trace_to_interior, ContactSegment, Entry, LineStructure, ParamInterval};
pub use verdict::{
    check_condition, primitive_directions, survey, Condition, ConditionVerdict, Evidence, Outcome, Razing, Survey,
    SurveyOptions, Witness,
};

use crate::rational::{dot, fmt_q, primitive_integer, rref, to_f64, Q};
use crate::scene::{fold_point, FlatTorus, SceneError};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ControlError {
    #[error("velocity is zero")]
    ZeroVelocity,
    #[error("vector has {got} entries, torus has dimension {want}")]
    Dimension { got: usize, want: usize },
    #[error("direction {0:?} is not primitive")]
    NotPrimitive(Vec<i64>),
    #[error("expected a closed geodesic")]
    NotClosed,
    #[error("dense subspace needs at least two independent rational basis vectors")]
    DenseBasis,
    #[error("search bound and horizon must be positive")]
    BadBound,
    #[error("internal consistency: {0}")]
    Consistency(String),
    #[error(transparent)]
    Scene(#[from] SceneError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    /// Primitive integer direction: the velocity is `(n_j A_j)`.
    Closed(Vec<i64>),
    /// Orbit closure `X0 + F`; `basis` spans `F`, `generic` is a fixed combination of it.
    Dense { basis: Vec<Vec<Q>>, generic: Vec<Q> },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Geodesic {
    pub base: Vec<Q>,
    pub direction: Direction,
}

impl Geodesic {
    /// Closed geodesic through the folded `base` with primitive direction `n`.
    pub fn closed(torus: &FlatTorus, base: &[Q], n: &[i64]) -> Result<Self, ControlError> {
        check_len(torus, base.len())?;
        check_len(torus, n.len())?;
        if n.iter().all(|&x| x == 0) {
            return Err(ControlError::ZeroVelocity);
        }
        if n.iter().fold(0i64, |g, &x| g.gcd(&x)) != 1 {
            return Err(ControlError::NotPrimitive(n.to_vec()));
        }
        Ok(Geodesic { base: fold_point(torus, base), direction: Direction::Closed(n.to_vec()) })
    }

    /// Non-closed geodesic whose orbit closure is `base + span(basis)`.
    pub fn dense(torus: &FlatTorus, base: &[Q], basis: Vec<Vec<Q>>) -> Result<Self, ControlError> {
        check_len(torus, base.len())?;
        for b in &basis {
            check_len(torus, b.len())?;
        }
        let (r, _) = rref(&basis);
        if r.len() < 2 || r.len() != basis.len() {
            return Err(ControlError::DenseBasis);
        }
        let mut generic = vec![Q::zero(); torus.dim()];
        for b in &basis {
            generic = crate::rational::add(&generic, b);
        }
        Ok(Geodesic { base: fold_point(torus, base), direction: Direction::Dense { basis, generic } })
    }

    pub fn closed_n(&self) -> Option<&[i64]> {
        match &self.direction {
            Direction::Closed(n) => Some(n),
            Direction::Dense { .. } => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let base: Vec<String> = self.base.iter().map(fmt_q).collect();
        match &self.direction {
            Direction::Closed(n) => serde_json::json!({"base": base, "n": n}),
            Direction::Dense { basis, .. } => {
                let f: Vec<Vec<String>> = basis.iter().map(|b| b.iter().map(fmt_q).collect()).collect();
                serde_json::json!({"base": base, "span": f})
            }
        }
    }
}

fn check_len(torus: &FlatTorus, got: usize) -> Result<(), ControlError> {
    if got != torus.dim() {
        return Err(ControlError::Dimension { got, want: torus.dim() });
    }
    Ok(())
}

/// Unnormalized velocity `(n_1 A_1, …, n_d A_d)`.
pub fn closed_velocity(torus: &FlatTorus, n: &[i64]) -> Vec<Q> {
    torus.lattice_vector(n)
}

/// Arclength of one full period of the closed geodesic, for display.
pub fn period_length(torus: &FlatTorus, n: &[i64]) -> f64 {
    let v = closed_velocity(torus, n);
    to_f64(&dot(&v, &v)).sqrt()
}

/// Relation-lattice classification of a rational velocity.
///
/// With `v_j = velocity_j / A_j` rational, the relations `m·v = 0` always
/// form a rank `d - 1` lattice, so rational input is always closed with `n`
/// the primitive integer vector along `v`.
pub fn classify_direction(torus: &FlatTorus, velocity: &[Q]) -> Result<Direction, ControlError> {
    check_len(torus, velocity.len())?;
    if velocity.iter().all(Zero::is_zero) {
        return Err(ControlError::ZeroVelocity);
    }
    let v: Vec<Q> = velocity.iter().zip(torus.periods()).map(|(x, a)| x / a).collect();
    let n = primitive_integer(&v);
    Ok(Direction::Closed(n.iter().map(|x| x.to_i64().expect("direction fits in i64")).collect()))
}

/// Serializable direction vector on the normal sphere: exact when rational.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalDirection {
    pub exact: Vec<String>,
    pub unit: Vec<f64>,
}

impl NormalDirection {
    pub fn from_q(v: &[Q]) -> Self {
        let f: Vec<f64> = v.iter().map(to_f64).collect();
        let norm = f.iter().map(|x| x * x).sum::<f64>().sqrt();
        NormalDirection { exact: v.iter().map(fmt_q).collect(), unit: f.iter().map(|x| x / norm).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn classify_examples() {
        let t = FlatTorus::from_ints(&[2, 2, 2]).unwrap();
        assert_eq!(classify_direction(&t, &[q(0), q(0), q(1)]).unwrap(), Direction::Closed(vec![0, 0, 1]));
        assert_eq!(classify_direction(&t, &[q(2), q(4), q(0)]).unwrap(), Direction::Closed(vec![1, 2, 0]));
        let a = FlatTorus::from_ints(&[1, 1]).unwrap();
        let b = FlatTorus::from_ints(&[1, 2]).unwrap();
        assert_eq!(classify_direction(&a, &[q(1), q(1)]).unwrap(), Direction::Closed(vec![1, 1]));
        assert_eq!(classify_direction(&b, &[q(1), q(1)]).unwrap(), Direction::Closed(vec![2, 1]));
        assert!(matches!(classify_direction(&a, &[q(0), q(0)]), Err(ControlError::ZeroVelocity)));
        assert_eq!(classify_direction(&a, &[q(-3), q(6)]).unwrap(), Direction::Closed(vec![-1, 2]));
    }

    #[test]
    fn geodesic_constructors() {
        let t = FlatTorus::from_ints(&[2, 2, 2]).unwrap();
        assert!(Geodesic::closed(&t, &[q(0), q(0), q(0)], &[0, 0, 2]).is_err());
        let g = Geodesic::closed(&t, &[q(-1), q(3), q(0)], &[0, 0, 1]).unwrap();
        assert_eq!(g.base, vec![q(1), q(1), q(0)]);
        assert!(Geodesic::dense(&t, &[q(0), q(0), q(0)], vec![vec![q(1), q(0), q(0)]]).is_err());
        assert!(Geodesic::dense(
            &t,
            &[q(0), q(0), q(0)],
            vec![vec![q(1), q(0), q(0)], vec![q(2), q(0), q(0)]]
        )
        .is_err());
    }
}
