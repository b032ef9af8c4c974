//! Exact two-phase simplex over the rationals, Bland's rule throughout.
//!
//! Problems are posed as `maximize c·x subject to a_i·x <= b_i` with free `x`.
//! Sizes here are tiny (a handful of variables and rows), so a dense tableau
//! recomputing reduced costs each pivot is plenty.

use crate::rational::Q;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal { value: Q, point: Vec<Q> },
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Default)]
pub struct Lp {
    pub num_vars: usize,
    pub rows: Vec<(Vec<Q>, Q)>,
}

impl Lp {
    pub fn new(num_vars: usize) -> Self {
        Lp { num_vars, rows: Vec::new() }
    }

    /// Adds `a·x <= b`.
    pub fn le(&mut self, a: Vec<Q>, b: Q) -> &mut Self {
        debug_assert_eq!(a.len(), self.num_vars);
        self.rows.push((a, b));
        self
    }

    /// Adds `a·x >= b`.
    pub fn ge(&mut self, a: Vec<Q>, b: Q) -> &mut Self {
        self.le(a.into_iter().map(|x| -x).collect(), -b)
    }

    pub fn eq(&mut self, a: Vec<Q>, b: Q) -> &mut Self {
        self.le(a.clone(), b.clone());
        self.ge(a, b)
    }

    pub fn maximize(&self, c: &[Q]) -> LpOutcome {
        solve(self.num_vars, &self.rows, c)
    }

    pub fn minimize(&self, c: &[Q]) -> LpOutcome {
        let neg: Vec<Q> = c.iter().map(|x| -x.clone()).collect();
        match solve(self.num_vars, &self.rows, &neg) {
            LpOutcome::Optimal { value, point } => LpOutcome::Optimal { value: -value, point },
            other => other,
        }
    }

    pub fn feasible_point(&self) -> Option<Vec<Q>> {
        match self.maximize(&vec![Q::zero(); self.num_vars]) {
            LpOutcome::Optimal { point, .. } => Some(point),
            _ => None,
        }
    }
}

/// Finds `x` with `a·x < b` on every strict row and `a·x <= b` on every
/// weak row, or reports that none exists.
pub fn strictly_feasible(n: usize, strict: &[(Vec<Q>, Q)], weak: &[(Vec<Q>, Q)]) -> Option<Vec<Q>> {
    let mut lp = Lp::new(n + 1);
    for (a, b) in strict {
        let mut row = a.clone();
        row.push(Q::one());
        lp.le(row, b.clone());
    }
    for (a, b) in weak {
        let mut row = a.clone();
        row.push(Q::zero());
        lp.le(row, b.clone());
    }
    let mut cap = vec![Q::zero(); n];
    cap.push(Q::one());
    lp.le(cap.clone(), Q::one());
    match lp.maximize(&cap) {
        LpOutcome::Optimal { value, mut point } if value.is_positive() => {
            point.truncate(n);
            Some(point)
        }
        _ => None,
    }
}

/// Is there `w` with `g·w > 0` for every `g` in the list?
pub fn open_cone_nonempty(gs: &[Vec<Q>], n: usize) -> Option<Vec<Q>> {
    let rows: Vec<(Vec<Q>, Q)> = gs.iter().map(|g| (g.iter().map(|x| -x.clone()).collect(), Q::zero())).collect();
    strictly_feasible(n, &rows, &[])
}

struct Tableau {
    t: Vec<Vec<Q>>,
    rhs: Vec<Q>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c].clone();
        for x in self.t[r].iter_mut() {
            *x /= &p;
        }
        self.rhs[r] /= &p;
        for i in 0..self.t.len() {
            if i == r || self.t[i][c].is_zero() {
                continue;
            }
            let f = self.t[i][c].clone();
            for j in 0..self.t[i].len() {
                if !self.t[r][j].is_zero() {
                    let d = &f * &self.t[r][j];
                    self.t[i][j] -= d;
                }
            }
            let d = &f * &self.rhs[r];
            self.rhs[i] -= d;
        }
        self.basis[r] = c;
    }

    /// Runs simplex for `maximize cost·y`, restricted to columns `< ncols`.
    /// Returns false when unbounded.
    fn run(&mut self, cost: &[Q], ncols: usize) -> bool {
        loop {
            let mut entering = None;
            for j in 0..ncols {
                if self.basis.contains(&j) {
                    continue;
                }
                let mut rc = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.t[i][j].is_zero() {
                        rc -= &cost[b] * &self.t[i][j];
                    }
                }
                if rc.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(c) = entering else { return true };
            let mut leave: Option<(usize, Q)> = None;
            for i in 0..self.t.len() {
                if self.t[i][c].is_positive() {
                    let ratio = &self.rhs[i] / &self.t[i][c];
                    let better = match &leave {
                        None => true,
                        Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((r, _)) = leave else { return false };
            self.pivot(r, c);
        }
    }
}

fn solve(n: usize, rows: &[(Vec<Q>, Q)], c: &[Q]) -> LpOutcome {
    let m = rows.len();
    // Columns: x+ (n), x- (n), slacks (m), artificials (one per negative rhs).
    let neg: Vec<usize> = (0..m).filter(|&i| rows[i].1.is_negative()).collect();
    let nreal = 2 * n + m;
    let ncols = nreal + neg.len();
    let mut t = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    for (i, (a, b)) in rows.iter().enumerate() {
        let mut row = vec![Q::zero(); ncols];
        for j in 0..n {
            row[j] = a[j].clone();
            row[n + j] = -a[j].clone();
        }
        row[2 * n + i] = Q::one();
        if b.is_negative() {
            for x in row.iter_mut() {
                *x = -x.clone();
            }
            let k = neg.iter().position(|&r| r == i).unwrap();
            row[nreal + k] = Q::one();
            basis.push(nreal + k);
            rhs.push(-b.clone());
        } else {
            basis.push(2 * n + i);
            rhs.push(b.clone());
        }
        t.push(row);
    }
    let mut tab = Tableau { t, rhs, basis };

    if !neg.is_empty() {
        let mut cost1 = vec![Q::zero(); ncols];
        for k in 0..neg.len() {
            cost1[nreal + k] = -Q::one();
        }
        tab.run(&cost1, ncols);
        let infeas: Q = tab
            .basis
            .iter()
            .zip(&tab.rhs)
            .filter(|(&b, _)| b >= nreal)
            .map(|(_, r)| r.clone())
            .sum();
        if infeas.is_positive() {
            return LpOutcome::Infeasible;
        }
        // Drive zero-level artificials out of the basis, dropping redundant rows.
        let mut i = 0;
        while i < tab.t.len() {
            if tab.basis[i] >= nreal {
                if let Some(j) = (0..nreal).find(|&j| !tab.t[i][j].is_zero()) {
                    tab.pivot(i, j);
                    i += 1;
                } else {
                    tab.t.remove(i);
                    tab.rhs.remove(i);
                    tab.basis.remove(i);
                }
            } else {
                i += 1;
            }
        }
    }

    let mut cost = vec![Q::zero(); ncols];
    for j in 0..n {
        cost[j] = c[j].clone();
        cost[n + j] = -c[j].clone();
    }
    if !tab.run(&cost, nreal) {
        return LpOutcome::Unbounded;
    }
    let mut y = vec![Q::zero(); nreal];
    for (i, &b) in tab.basis.iter().enumerate() {
        if b < nreal {
            y[b] = tab.rhs[i].clone();
        }
    }
    let point: Vec<Q> = (0..n).map(|j| &y[j] - &y[n + j]).collect();
    let value = crate::rational::dot(c, &point);
    LpOutcome::Optimal { value, point }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qf};

    #[test]
    fn small_lp() {
        // max x + y st x + 2y <= 4, 3x + y <= 6, x,y >= 0 -> (8/5, 6/5), value 14/5
        let mut lp = Lp::new(2);
        lp.le(vec![q(1), q(2)], q(4)).le(vec![q(3), q(1)], q(6));
        lp.ge(vec![q(1), q(0)], q(0)).ge(vec![q(0), q(1)], q(0));
        match lp.maximize(&[q(1), q(1)]) {
            LpOutcome::Optimal { value, point } => {
                assert_eq!(value, qf(14, 5));
                assert_eq!(point, vec![qf(8, 5), qf(6, 5)]);
            }
            o => panic!("{o:?}"),
        }
    }

    #[test]
    fn negative_rhs_and_infeasible() {
        let mut lp = Lp::new(1);
        lp.ge(vec![q(1)], q(2)).le(vec![q(1)], q(5));
        assert_eq!(
            lp.minimize(&[q(1)]),
            LpOutcome::Optimal { value: q(2), point: vec![q(2)] }
        );
        lp.le(vec![q(1)], q(1));
        assert_eq!(lp.minimize(&[q(1)]), LpOutcome::Infeasible);
    }

    #[test]
    fn unbounded_detected() {
        let mut lp = Lp::new(2);
        lp.ge(vec![q(1), q(-1)], q(0));
        assert_eq!(lp.maximize(&[q(1), q(0)]), LpOutcome::Unbounded);
    }

    #[test]
    fn strict_feasibility() {
        // 0 < x < 1 is fine, x < 0 and x > 0 together is not.
        let s = vec![(vec![q(-1)], q(0)), (vec![q(1)], q(1))];
        let p = strictly_feasible(1, &s, &[]).unwrap();
        assert!(p[0] > q(0) && p[0] < q(1));
        let s = vec![(vec![q(-1)], q(0)), (vec![q(1)], q(0))];
        assert!(strictly_feasible(1, &s, &[]).is_none());
        // x <= 0 weak with x > 0 strict: closed contact only
        assert!(strictly_feasible(1, &[(vec![q(-1)], q(0))], &[(vec![q(1)], q(0))]).is_none());
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's classic cycling instance; Bland's rule must terminate.
        let mut lp = Lp::new(4);
        lp.le(vec![qf(1, 4), q(-60), qf(-1, 25), q(9)], q(0));
        lp.le(vec![qf(1, 2), q(-90), qf(-1, 50), q(3)], q(0));
        lp.le(vec![q(0), q(0), q(1), q(0)], q(1));
        for j in 0..4 {
            let mut e = vec![q(0); 4];
            e[j] = q(1);
            lp.ge(e, q(0));
        }
        match lp.maximize(&[qf(3, 4), q(-150), qf(1, 50), q(-6)]) {
            LpOutcome::Optimal { value, .. } => assert_eq!(value, qf(1, 20)),
            o => panic!("{o:?}"),
        }
    }
}
