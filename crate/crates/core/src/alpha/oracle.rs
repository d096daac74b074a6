//! Brute-force cross-check for `alpha_k`.
//!
//! Every integer solution of `A·a = k·ℓ` is `p + K·t` for a particular
//! solution `p` and an integer kernel basis `K`. The oracle enumerates all
//! `t` whose point lies in the box `0 ≤ a ≤ u` (with `u` the per-coordinate
//! LP bounds), pruning with interval bound propagation, and picks the best
//! point directly. It shares no code with the branch-and-bound path beyond
//! the box.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::{alpha_result, build_constraints, lp_box, AlphaError, AlphaResult};
use crate::builder::SurfaceModel;
use crate::lattice::{solve_integer_system, DivisorClass, LatticeError, Rational};

/// Largest `k` the oracle accepts.
pub const ORACLE_MAX_K: u64 = 3;

/// Same contract as [`alpha_k`](super::alpha_k), by exhaustive enumeration.
pub fn oracle_alpha_k(
    model: &SurfaceModel,
    curve_labels: &[String],
    l: &DivisorClass,
    k: u64,
) -> Result<AlphaResult, AlphaError> {
    if k == 0 {
        return Err(AlphaError::ZeroK);
    }
    if k > ORACLE_MAX_K {
        return Err(AlphaError::OracleRange { k, max: ORACLE_MAX_K });
    }
    let problems = build_constraints(model, curve_labels, l, k)?;
    let problem = &problems[0];
    let upper = lp_box(problem)?;
    let solution = match solve_integer_system(&problem.matrix, &problem.rhs) {
        Ok(s) => s,
        Err(LatticeError::Infeasible(_)) => return Err(AlphaError::Infeasible { k }),
        Err(e) => return Err(e.into()),
    };

    let lattice = Parametrization {
        particular: solution.particular,
        kernel: solution.kernel_basis,
        upper,
    };
    let mut best = Best::default();
    lattice.for_each_point(|a| best.offer(a));
    let (index, point) = best.into_winner().ok_or(AlphaError::Infeasible { k })?;
    alpha_result(k, curve_labels, index, &point)
}

/// Tracks (max coefficient, first index attaining it, lexicographically
/// smallest point among those).
#[derive(Default)]
struct Best {
    current: Option<(BigInt, usize, Vec<BigInt>)>,
}

impl Best {
    fn offer(&mut self, a: Vec<BigInt>) {
        let m = a.iter().max().cloned().unwrap_or_default();
        let j = a.iter().position(|x| *x == m).unwrap_or(0);
        let replace = match &self.current {
            None => true,
            Some((bm, bj, bp)) => m > *bm || (m == *bm && (j < *bj || (j == *bj && a < *bp))),
        };
        if replace {
            self.current = Some((m, j, a));
        }
    }

    fn into_winner(self) -> Option<(usize, Vec<BigInt>)> {
        self.current.map(|(_, j, p)| (j, p))
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Interval {
    lo: BigInt,
    hi: BigInt,
}

struct Parametrization {
    particular: Vec<BigInt>,
    kernel: Vec<Vec<BigInt>>,
    upper: Vec<BigInt>,
}

impl Parametrization {
    fn point(&self, t: &[BigInt]) -> Vec<BigInt> {
        let mut a = self.particular.clone();
        for (tj, kj) in t.iter().zip(&self.kernel) {
            for (ai, kji) in a.iter_mut().zip(kj) {
                *ai += tj * kji;
            }
        }
        a
    }

    fn in_box(&self, a: &[BigInt]) -> bool {
        a.iter().zip(&self.upper).all(|(x, u)| !x.is_negative() && x <= u)
    }

    fn for_each_point(&self, mut visit: impl FnMut(Vec<BigInt>)) {
        if self.kernel.is_empty() {
            let a = self.particular.clone();
            if self.in_box(&a) {
                visit(a);
            }
            return;
        }
        let Some(bounds) = self.initial_bounds() else {
            return;
        };
        self.search(bounds, &mut visit);
    }

    fn search(&self, bounds: Vec<Interval>, visit: &mut impl FnMut(Vec<BigInt>)) {
        let Some(bounds) = self.propagate(bounds) else {
            return;
        };
        let Some(j) = bounds.iter().position(|b| b.lo != b.hi) else {
            let t: Vec<BigInt> = bounds.into_iter().map(|b| b.lo).collect();
            let a = self.point(&t);
            if self.in_box(&a) {
                visit(a);
            }
            return;
        };
        let mut v = bounds[j].lo.clone();
        while v <= bounds[j].hi {
            let mut next = bounds.clone();
            next[j] = Interval {
                lo: v.clone(),
                hi: v.clone(),
            };
            self.search(next, visit);
            v += 1;
        }
    }

    /// Box on `t` implied by a set of kernel rows forming an invertible block.
    fn initial_bounds(&self) -> Option<Vec<Interval>> {
        let r = self.kernel.len();
        let n = self.particular.len();
        // rows of K as a rational n×r matrix; pick r independent rows greedily
        let row = |i: usize| -> Vec<Rational> {
            self.kernel.iter().map(|k| Rational::from_integer(k[i].clone())).collect()
        };
        let mut chosen: Vec<usize> = Vec::new();
        let mut echelon: Vec<Vec<Rational>> = Vec::new();
        for i in 0..n {
            let mut v = row(i);
            for e in &echelon {
                let p = e.iter().position(|x| !x.is_zero()).expect("nonzero echelon row");
                if !v[p].is_zero() {
                    let f = &v[p] / &e[p];
                    for (x, y) in v.iter_mut().zip(e) {
                        *x -= &f * y;
                    }
                }
            }
            if v.iter().any(|x| !x.is_zero()) {
                echelon.push(v);
                chosen.push(i);
                if chosen.len() == r {
                    break;
                }
            }
        }
        assert_eq!(chosen.len(), r, "kernel basis must have full column rank");
        let inverse = invert(&chosen.iter().map(|&i| row(i)).collect::<Vec<_>>());

        // t = M⁻¹ (a_S − p_S), a_s ∈ [0, u_s]
        let mut bounds = Vec::with_capacity(r);
        for inv_row in &inverse {
            let mut lo = Rational::zero();
            let mut hi = Rational::zero();
            for (c, &s) in inv_row.iter().zip(&chosen) {
                let a_lo = Rational::from_integer(-&self.particular[s]);
                let a_hi = Rational::from_integer(&self.upper[s] - &self.particular[s]);
                let (x, y) = (c * &a_lo, c * &a_hi);
                if x <= y {
                    lo += x;
                    hi += y;
                } else {
                    lo += y;
                    hi += x;
                }
            }
            let interval = Interval {
                lo: lo.ceil().to_integer(),
                hi: hi.floor().to_integer(),
            };
            if interval.lo > interval.hi {
                return None;
            }
            bounds.push(interval);
        }
        Some(bounds)
    }

    /// Tightens `bounds` against `0 ≤ pᵢ + Σ K[j][i]·tⱼ ≤ uᵢ` to a fixpoint.
    fn propagate(&self, mut bounds: Vec<Interval>) -> Option<Vec<Interval>> {
        let n = self.particular.len();
        loop {
            let mut changed = false;
            for i in 0..n {
                let coeff = |j: usize| &self.kernel[j][i];
                let term = |j: usize, b: &Interval| {
                    let c = coeff(j);
                    let (x, y) = (c * &b.lo, c * &b.hi);
                    if x <= y { (x, y) } else { (y, x) }
                };
                let (mut sum_lo, mut sum_hi) = (BigInt::zero(), BigInt::zero());
                for (j, b) in bounds.iter().enumerate() {
                    let (x, y) = term(j, b);
                    sum_lo += x;
                    sum_hi += y;
                }
                let target_lo = -&self.particular[i];
                let target_hi = &self.upper[i] - &self.particular[i];
                if sum_hi < target_lo || sum_lo > target_hi {
                    return None;
                }
                for (j, b) in bounds.iter_mut().enumerate() {
                    let c = coeff(j).clone();
                    if c.is_zero() {
                        continue;
                    }
                    let (x, y) = term(j, b);
                    // c·t_j ∈ [target_lo − rest_hi, target_hi − rest_lo]
                    let lo = &target_lo - (&sum_hi - y);
                    let hi = &target_hi - (&sum_lo - x);
                    let (new_lo, new_hi) = if c.is_positive() {
                        (lo.div_ceil(&c), hi.div_floor(&c))
                    } else {
                        (hi.div_ceil(&c), lo.div_floor(&c))
                    };
                    let mut tightened = false;
                    if new_lo > b.lo {
                        b.lo = new_lo;
                        tightened = true;
                    }
                    if new_hi < b.hi {
                        b.hi = new_hi;
                        tightened = true;
                    }
                    if b.lo > b.hi {
                        return None;
                    }
                    if tightened {
                        // row sums are stale now; the next sweep revisits this row
                        changed = true;
                        break;
                    }
                }
            }
            if !changed {
                return Some(bounds);
            }
        }
    }
}

/// Gauss-Jordan inverse of an invertible rational matrix.
fn invert(m: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let n = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| {
                if i == j {
                    Rational::from_integer(1.into())
                } else {
                    Rational::zero()
                }
            }));
            r
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&i| !a[i][col].is_zero()).expect("invertible block");
        a.swap(col, p);
        let pivot = a[col][col].clone();
        for x in a[col].iter_mut() {
            *x /= &pivot;
        }
        let pivot_row = a[col].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != col && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    a.into_iter().map(|row| row[n..].to_vec()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn enumerates_simplex_slice() {
        // x + y + z = 3 in the box [0,3]^3 has 10 points
        let p = Parametrization {
            particular: ints(&[3, 0, 0]),
            kernel: vec![ints(&[-1, 1, 0]), ints(&[-1, 0, 1])],
            upper: ints(&[3, 3, 3]),
        };
        let mut count = 0;
        p.for_each_point(|a| {
            assert_eq!(a.iter().sum::<BigInt>(), BigInt::from(3));
            count += 1;
        });
        assert_eq!(count, 10);
    }

    #[test]
    fn respects_tight_box() {
        let p = Parametrization {
            particular: ints(&[3, 0, 0]),
            kernel: vec![ints(&[-1, 1, 0]), ints(&[-1, 0, 1])],
            upper: ints(&[3, 1, 1]),
        };
        let mut points = Vec::new();
        p.for_each_point(|a| points.push(a));
        points.sort();
        assert_eq!(points, vec![ints(&[1, 1, 1]), ints(&[2, 0, 1]), ints(&[2, 1, 0]), ints(&[3, 0, 0])]);
    }

    #[test]
    fn best_point_selection() {
        let mut best = Best::default();
        best.offer(ints(&[1, 5, 5]));
        best.offer(ints(&[5, 0, 2]));
        best.offer(ints(&[5, 1, 0]));
        best.offer(ints(&[4, 0, 4]));
        assert_eq!(best.into_winner(), Some((0, ints(&[5, 0, 2]))));
    }

    #[test]
    fn inverse() {
        let q = |n: i64| Rational::from_integer(n.into());
        let inv = invert(&[vec![q(2), q(1)], vec![q(1), q(1)]]);
        assert_eq!(inv, vec![vec![q(1), q(-1)], vec![q(-1), q(2)]]);
    }
}
