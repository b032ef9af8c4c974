//! Representative points, at least one per cell, of a hyperplane arrangement inside a box.
//!
//! Cells are found recursively: the cells of every hyperplane (a flat of one
//! dimension less) are computed first, and each top-dimensional cell of the
//! current flat is reached by stepping off a facet representative to both
//! sides by half the distance to the next hyperplane. The `keep` predicate
//! prunes as we go; it must describe a closed set that is a union of cells,
//! so that a cell inside it always has a facet representative inside it too.

use crate::rational::{axpy, dot, qf, rref, Q};
use num_traits::{Signed, Zero};
use std::collections::{BTreeSet, HashMap};

#[derive(Clone)]
struct Flat {
    origin: Vec<Q>,
    dirs: Vec<Vec<Q>>,
}

type Key = (Vec<Vec<Q>>, Vec<Q>);

impl Flat {
    fn key(&self) -> Key {
        let (r, piv) = rref(&self.dirs);
        let mut o = self.origin.clone();
        for (row, &p) in r.iter().zip(&piv) {
            let c = o[p].clone();
            if !c.is_zero() {
                o = axpy(&o, &(-c), row);
            }
        }
        (r, o)
    }
}

pub(crate) struct Arrangement<'a> {
    hyps: Vec<(Vec<Q>, Q)>,
    lo: &'a [Q],
    hi: &'a [Q],
    keep: &'a (dyn Fn(&[Q]) -> bool + Sync),
    memo: HashMap<Key, Vec<(Vec<Q>, usize)>>,
}

impl<'a> Arrangement<'a> {
    /// `hyps` are `g·y = c`; the box faces are added automatically.
    pub(crate) fn new(
        hyps: Vec<(Vec<Q>, Q)>,
        lo: &'a [Q],
        hi: &'a [Q],
        keep: &'a (dyn Fn(&[Q]) -> bool + Sync),
    ) -> Self {
        let m = lo.len();
        let mut set: BTreeSet<(Vec<Q>, Q)> = BTreeSet::new();
        let mut add = |g: Vec<Q>, c: Q| {
            if let Some(lead) = g.iter().find(|x| !x.is_zero()).cloned() {
                set.insert((g.iter().map(|x| x / &lead).collect(), c / lead));
            }
        };
        for (g, c) in hyps {
            add(g, c);
        }
        for j in 0..m {
            let mut e = vec![Q::zero(); m];
            e[j] = Q::from_integer(1.into());
            add(e.clone(), lo[j].clone());
            add(e, hi[j].clone());
        }
        Arrangement { hyps: set.into_iter().collect(), lo, hi, keep, memo: HashMap::new() }
    }

    fn admissible(&self, y: &[Q]) -> bool {
        y.iter().zip(self.lo).all(|(a, b)| a >= b) && y.iter().zip(self.hi).all(|(a, b)| a <= b) && (self.keep)(y)
    }

    /// Representatives with the dimension of the cell they stand for.
    pub(crate) fn representatives(&mut self) -> Vec<(Vec<Q>, usize)> {
        let m = self.lo.len();
        let dirs = (0..m)
            .map(|j| {
                let mut e = vec![Q::zero(); m];
                e[j] = Q::from_integer(1.into());
                e
            })
            .collect();
        let flat = Flat { origin: vec![Q::zero(); m], dirs };
        self.reps(&flat)
    }

    /// Restricted hyperplanes on the flat as `(a, b)` with `a·s = b`, deduped.
    fn restricted(&self, flat: &Flat) -> Vec<(Vec<Q>, Q)> {
        let mut set = BTreeSet::new();
        for (g, c) in &self.hyps {
            let a: Vec<Q> = flat.dirs.iter().map(|d| dot(g, d)).collect();
            if a.iter().all(Zero::is_zero) {
                continue;
            }
            let b = c - dot(g, &flat.origin);
            let mut full = a.clone();
            full.push(b);
            let lead = a.iter().find(|x| !x.is_zero()).unwrap().clone();
            let n: Vec<Q> = full.iter().map(|x| x / &lead).collect();
            set.insert(n);
        }
        set.into_iter()
            .map(|mut v| {
                let b = v.pop().unwrap();
                (v, b)
            })
            .collect()
    }

    fn reps(&mut self, flat: &Flat) -> Vec<(Vec<Q>, usize)> {
        let key = flat.key();
        if let Some(r) = self.memo.get(&key) {
            return r.clone();
        }
        let j = flat.dirs.len();
        let mut out: BTreeSet<(Vec<Q>, usize)> = BTreeSet::new();
        if j == 0 {
            if self.admissible(&flat.origin) {
                out.insert((flat.origin.clone(), 0));
            }
        } else if j == 1 {
            let mut ts: Vec<Q> = self.restricted(flat).into_iter().map(|(a, b)| b / &a[0]).collect();
            ts.sort();
            ts.dedup();
            let d = &flat.dirs[0];
            for (i, t) in ts.iter().enumerate() {
                let p = axpy(&flat.origin, t, d);
                if self.admissible(&p) {
                    out.insert((p, 0));
                }
                if let Some(u) = ts.get(i + 1) {
                    let mid = (t + u) * qf(1, 2);
                    let p = axpy(&flat.origin, &mid, d);
                    if self.admissible(&p) {
                        out.insert((p, 1));
                    }
                }
            }
        } else {
            let res = self.restricted(flat);
            for (a, b) in &res {
                let p = a.iter().position(|x| !x.is_zero()).unwrap();
                let origin = axpy(&flat.origin, &(b / &a[p]), &flat.dirs[p]);
                let dirs: Vec<Vec<Q>> = (0..j)
                    .filter(|&i| i != p)
                    .map(|i| axpy(&flat.dirs[i], &(-(&a[i] / &a[p])), &flat.dirs[p]))
                    .collect();
                let sub_reps = self.reps(&Flat { origin, dirs });
                // step direction inside the flat, crossing this hyperplane
                let mut w = vec![Q::zero(); flat.origin.len()];
                for (ai, di) in a.iter().zip(&flat.dirs) {
                    if !ai.is_zero() {
                        w = axpy(&w, ai, di);
                    }
                }
                for (qpt, dim) in sub_reps {
                    if dim + 1 == j {
                        let mut tau: Option<Q> = None;
                        for (g, c) in &self.hyps {
                            let gw = dot(g, &w);
                            if gw.is_zero() {
                                continue;
                            }
                            let r = c - dot(g, &qpt);
                            if r.is_zero() {
                                continue;
                            }
                            let t = (r / gw).abs();
                            if tau.as_ref().map_or(true, |x| &t < x) {
                                tau = Some(t);
                            }
                        }
                        let tau = tau.unwrap_or_else(|| Q::from_integer(1.into())) * qf(1, 2);
                        for s in [tau.clone(), -tau] {
                            let y = axpy(&qpt, &s, &w);
                            if self.admissible(&y) {
                                out.insert((y, j));
                            }
                        }
                    }
                    out.insert((qpt, dim));
                }
            }
        }
        let v: Vec<_> = out.into_iter().collect();
        self.memo.insert(key, v.clone());
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn square_cut_by_diagonal() {
        // box [0,2]^2 cut by x = y: two open triangles and four corners
        let keep = |_: &[Q]| true;
        let lo = vec![q(0), q(0)];
        let hi = vec![q(2), q(2)];
        let mut arr = Arrangement::new(vec![(vec![q(1), q(-1)], q(0))], &lo, &hi, &keep);
        let reps = arr.representatives();
        let sides: BTreeSet<bool> = reps.iter().filter(|r| r.1 == 2).map(|r| r.0[0] > r.0[1]).collect();
        assert_eq!(sides.len(), 2);
        assert!(reps.iter().filter(|r| r.1 == 2).all(|r| r.0[0] != r.0[1] && r.0.iter().all(|x| *x > q(0) && *x < q(2))));
        let faces0 = reps.iter().filter(|r| r.1 == 0).count();
        assert_eq!(faces0, 4);
        assert!(reps.iter().any(|r| r.1 == 1 && r.0[0] == r.0[1]));
    }

    #[test]
    fn pruning_keeps_only_the_closed_set() {
        // keep x <= 1/2 inside [0,1]^2 with a line at x = 1/2
        let keep = |y: &[Q]| y[0] <= qf(1, 2);
        let lo = vec![q(0), q(0)];
        let hi = vec![q(1), q(1)];
        let mut arr = Arrangement::new(vec![(vec![q(1), q(0)], qf(1, 2))], &lo, &hi, &keep);
        let reps = arr.representatives();
        assert!(reps.iter().all(|r| r.0[0] <= qf(1, 2)));
        assert!(reps.iter().any(|r| r.1 == 2));
    }
}
