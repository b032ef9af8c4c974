//! Exact rational scalars and the little vector algebra the geometry needs.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

pub type Q = BigRational;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseRationalError(pub String);

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "not an exact rational: {:?}", self.0)
    }
}

impl std::error::Error for ParseRationalError {}

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"p"` or `"p/q"`. Decimal points and exponents are refused so that
/// nothing inexact sneaks into the geometry.
pub fn parse_q(s: &str) -> Result<Q, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let ok = |x: &str| {
        let digits = x.strip_prefix(['-', '+']).unwrap_or(x);
        !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
    };
    if !ok(num) || !ok(den) {
        return Err(err());
    }
    let n: BigInt = num.parse().map_err(|_| err())?;
    let d: BigInt = den.parse().map_err(|_| err())?;
    if d.is_zero() {
        return Err(err());
    }
    Ok(Q::new(n, d))
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Ratio::to_f64 gives up on huge operands; fall back to a scaled quotient.
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn vec_f64(v: &[Q]) -> Vec<f64> {
    v.iter().map(to_f64).collect()
}

pub fn dot(a: &[Q], b: &[Q]) -> Q {
    debug_assert_eq!(a.len(), b.len());
    let mut s = Q::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s += x * y;
        }
    }
    s
}

pub fn add(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[Q], b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale(a: &[Q], s: &Q) -> Vec<Q> {
    a.iter().map(|x| x * s).collect()
}

/// a + s b
pub fn axpy(a: &[Q], s: &Q, b: &[Q]) -> Vec<Q> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

pub fn is_zero_vec(a: &[Q]) -> bool {
    a.iter().all(Zero::is_zero)
}

pub fn floor_q(x: &Q) -> BigInt {
    x.floor().to_integer()
}

pub fn ceil_q(x: &Q) -> BigInt {
    x.ceil().to_integer()
}

/// Representative of `x` modulo `p` in `[0, p)`.
pub fn mod_q(x: &Q, p: &Q) -> Q {
    let k = (x / p).floor();
    x - k * p
}

/// Scales a rational vector to the primitive integer vector with the same direction.
pub fn primitive_integer(v: &[Q]) -> Vec<BigInt> {
    let mut l = BigInt::one();
    for x in v {
        l = l.lcm(x.denom());
    }
    let ints: Vec<BigInt> = v.iter().map(|x| (x * Q::from_integer(l.clone())).to_integer()).collect();
    let mut g = BigInt::zero();
    for x in &ints {
        g = g.gcd(x);
    }
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

/// Rescales a vector so its first nonzero entry is `±1`, keeping the sign
/// when `keep_sign` is set. Used to dedupe hyperplanes and rays.
pub fn normalize_lead(v: &[Q], keep_sign: bool) -> Vec<Q> {
    match v.iter().find(|x| !x.is_zero()) {
        None => v.to_vec(),
        Some(lead) => {
            let s = if keep_sign { lead.abs() } else { lead.clone() };
            v.iter().map(|x| x / &s).collect()
        }
    }
}

/// Solves the square system `m x = b` exactly. Returns `None` when singular.
pub fn solve(m: &[Vec<Q>], b: &[Q]) -> Option<Vec<Q>> {
    let n = m.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .zip(b)
        .map(|(row, r)| {
            let mut row = row.clone();
            row.push(r.clone());
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, piv);
        let p = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x /= &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..=n {
                    let delta = &f * &a[col][c];
                    a[r][c] -= delta;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n].clone()).collect())
}

/// Reduced row echelon form; returns the nonzero rows and their pivot columns.
pub fn rref(rows: &[Vec<Q>]) -> (Vec<Vec<Q>>, Vec<usize>) {
    let mut a: Vec<Vec<Q>> = rows.to_vec();
    let ncols = a.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == a.len() {
            break;
        }
        let Some(p) = (r..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(r, p);
        let pv = a[r][c].clone();
        for x in a[r].iter_mut() {
            *x /= &pv;
        }
        for i in 0..a.len() {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..ncols {
                    let delta = &f * &a[r][j];
                    a[i][j] -= delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

/// Basis of the null space `{x : rows x = 0}`.
pub fn null_space(rows: &[Vec<Q>], ncols: usize) -> Vec<Vec<Q>> {
    let (r, piv) = if rows.is_empty() { (vec![], vec![]) } else { rref(rows) };
    let free: Vec<usize> = (0..ncols).filter(|c| !piv.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Q::zero(); ncols];
            x[f] = Q::one();
            for (row, &p) in r.iter().zip(&piv) {
                x[p] = -row[f].clone();
            }
            x
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        assert_eq!(parse_q("1/2").unwrap(), qf(1, 2));
        assert_eq!(parse_q("-6/4").unwrap(), qf(-3, 2));
        assert_eq!(parse_q(" 7 ").unwrap(), q(7));
        assert_eq!(fmt_q(&qf(-6, 4)), "-3/2");
        assert_eq!(fmt_q(&q(3)), "3");
        for bad in ["0.5", "1e3", "1/0", "", "/2", "a/b", "nan"] {
            assert!(parse_q(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn mod_and_primitive() {
        assert_eq!(mod_q(&qf(-1, 2), &q(2)), qf(3, 2));
        assert_eq!(mod_q(&q(4), &q(2)), q(0));
        let p = primitive_integer(&[qf(2, 3), qf(-4, 3), q(0)]);
        assert_eq!(p, vec![BigInt::from(1), BigInt::from(-2), BigInt::from(0)]);
    }

    #[test]
    fn solve_and_null_space() {
        let m = vec![vec![q(2), q(1)], vec![q(1), q(3)]];
        let x = solve(&m, &[q(3), q(4)]).unwrap();
        assert_eq!(x, vec![q(1), q(1)]);
        assert!(solve(&[vec![q(1), q(2)], vec![q(2), q(4)]], &[q(0), q(0)]).is_none());
        let ns = null_space(&[vec![q(1), q(1), q(1)]], 3);
        assert_eq!(ns.len(), 2);
        for v in ns {
            assert_eq!(dot(&v, &[q(1), q(1), q(1)]), q(0));
        }
    }
}
