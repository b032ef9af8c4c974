//! Smooth one-variable cutoffs for windows and profiles.

/// `exp(1 - 1/(1 - t²))` on `|t| < 1`, zero outside; equals 1 at 0.
pub fn bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - t * t)).exp()
    }
}

/// Smooth step: 0 for `t ≤ a`, 1 for `t ≥ b`.
pub fn smooth_step(t: f64, a: f64, b: f64) -> f64 {
    let psi = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    let s = (t - a) / (b - a);
    let (p, q) = (psi(s), psi(1.0 - s));
    if p + q == 0.0 {
        return if s >= 1.0 { 1.0 } else { 0.0 };
    }
    p / (p + q)
}

/// 1 on `|t| ≤ inner`, 0 on `|t| ≥ outer`.
pub fn plateau(t: f64, inner: f64, outer: f64) -> f64 {
    1.0 - smooth_step(t.abs(), inner, outer)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes() {
        assert_eq!(bump(0.0), 1.0);
        assert_eq!(bump(1.0), 0.0);
        assert!(bump(0.5) > 0.0 && bump(0.5) < 1.0);
        assert_eq!(smooth_step(0.0, 1.0, 2.0), 0.0);
        assert_eq!(smooth_step(2.0, 1.0, 2.0), 1.0);
        assert!((smooth_step(1.5, 1.0, 2.0) - 0.5).abs() < 1e-15);
        assert_eq!(plateau(-0.9, 1.0, 2.0), 1.0);
        assert_eq!(plateau(3.0, 1.0, 2.0), 0.0);
    }
}
