//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Solves `max c·x` subject to `A·x = b` and `lower ≤ x ≤ upper`, where the
//! lower bounds are finite and each upper bound is optional.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::lattice::{IntMatrix, Rational};

/// Result of an LP relaxation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpSolution {
    Optimal { optimum: Rational, vertex: Vec<Rational> },
    Unbounded,
    Infeasible,
}

impl LpSolution {
    pub fn optimum(&self) -> Option<&Rational> {
        match self {
            LpSolution::Optimal { optimum, .. } => Some(optimum),
            _ => None,
        }
    }
}

pub(crate) struct BoundedLp<'a> {
    pub matrix: &'a IntMatrix,
    pub rhs: &'a [BigInt],
    pub objective: &'a [BigInt],
    pub lower: &'a [BigInt],
    pub upper: &'a [Option<BigInt>],
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    /// reduced costs; last entry is minus the objective value
    costs: Vec<Rational>,
    width: usize,
}

impl Tableau {
    fn rhs_col(&self) -> usize {
        self.width
    }

    fn load_costs(&mut self, c: &[Rational]) {
        let mut costs = c.to_vec();
        costs.push(Rational::zero());
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &c[b];
            if cb.is_zero() {
                continue;
            }
            for (d, t) in costs.iter_mut().zip(&self.rows[r]) {
                *d -= cb * t;
            }
        }
        self.costs = costs;
    }

    fn value(&self) -> Rational {
        -self.costs[self.width].clone()
    }

    fn pivot(&mut self, r: usize, j: usize) {
        let p = self.rows[r][j].clone();
        if !p.is_one() {
            for x in self.rows[r].iter_mut() {
                *x /= &p;
            }
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[j].is_zero() {
                continue;
            }
            let f = row[j].clone();
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        if !self.costs[j].is_zero() {
            let f = self.costs[j].clone();
            for (x, y) in self.costs.iter_mut().zip(&pivot_row) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        self.basis[r] = j;
    }

    /// Runs Bland's rule to optimality. Columns `>= allowed` never enter.
    /// Returns false when unbounded.
    fn optimize(&mut self, allowed: usize) -> bool {
        loop {
            let Some(j) = (0..allowed).find(|&j| self.costs[j].is_positive()) else {
                return true;
            };
            let rhs = self.rhs_col();
            let mut leave: Option<(usize, Rational)> = None;
            for (r, row) in self.rows.iter().enumerate() {
                if !row[j].is_positive() {
                    continue;
                }
                let ratio = &row[rhs] / &row[j];
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => {
                        ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            match leave {
                Some((r, _)) => self.pivot(r, j),
                None => return false,
            }
        }
    }
}

pub(crate) fn maximize(lp: &BoundedLp<'_>) -> LpSolution {
    let n = lp.matrix.cols();
    let m = lp.matrix.rows();
    debug_assert_eq!(lp.rhs.len(), m);
    debug_assert_eq!(lp.objective.len(), n);
    debug_assert_eq!(lp.lower.len(), n);
    debug_assert_eq!(lp.upper.len(), n);

    // shift x = lower + y, y >= 0
    let shifted: Vec<BigInt> = lp
        .matrix
        .mul_vec(lp.lower)
        .iter()
        .zip(lp.rhs)
        .map(|(al, b)| b - al)
        .collect();
    let mut capped = Vec::new();
    for (j, u) in lp.upper.iter().enumerate() {
        if let Some(u) = u {
            let room = u - &lp.lower[j];
            if room.is_negative() {
                return LpSolution::Infeasible;
            }
            capped.push((j, room));
        }
    }

    // columns: y (n) | slacks for upper bounds | artificials for equality rows
    let n_slack = capped.len();
    let art0 = n + n_slack;
    let width = art0 + m;
    let mut rows = Vec::with_capacity(m + n_slack);
    let mut basis = Vec::with_capacity(m + n_slack);
    for i in 0..m {
        let neg = shifted[i].is_negative();
        let sign = |x: &BigInt| Rational::from_integer(if neg { -x } else { x.clone() });
        let mut row = vec![Rational::zero(); width + 1];
        for (x, a) in row.iter_mut().zip(lp.matrix.row(i)) {
            *x = sign(a);
        }
        row[art0 + i] = Rational::one();
        row[width] = sign(&shifted[i]);
        rows.push(row);
        basis.push(art0 + i);
    }
    for (s, (j, room)) in capped.iter().enumerate() {
        let mut row = vec![Rational::zero(); width + 1];
        row[*j] = Rational::one();
        row[n + s] = Rational::one();
        row[width] = Rational::from_integer(room.clone());
        rows.push(row);
        basis.push(n + s);
    }
    let mut t = Tableau {
        rows,
        basis,
        costs: Vec::new(),
        width,
    };

    // phase 1: drive the artificials to zero
    let mut phase1 = vec![Rational::zero(); width];
    for c in &mut phase1[art0..] {
        *c = -Rational::one();
    }
    t.load_costs(&phase1);
    t.optimize(width);
    if !t.value().is_zero() {
        return LpSolution::Infeasible;
    }
    let mut r = 0;
    while r < t.rows.len() {
        if t.basis[r] >= art0 {
            match (0..art0).find(|&j| !t.rows[r][j].is_zero()) {
                Some(j) => t.pivot(r, j),
                None => {
                    // redundant equality
                    t.rows.remove(r);
                    t.basis.remove(r);
                    continue;
                }
            }
        }
        r += 1;
    }

    let mut phase2 = vec![Rational::zero(); width];
    for (c, o) in phase2.iter_mut().zip(lp.objective) {
        *c = Rational::from_integer(o.clone());
    }
    t.load_costs(&phase2);
    if !t.optimize(art0) {
        return LpSolution::Unbounded;
    }

    let mut vertex: Vec<Rational> = lp.lower.iter().map(|l| Rational::from_integer(l.clone())).collect();
    for (r, &b) in t.basis.iter().enumerate() {
        if b < n {
            vertex[b] += &t.rows[r][width];
        }
    }
    let optimum = vertex
        .iter()
        .zip(lp.objective)
        .map(|(x, c)| x * Rational::from_integer(c.clone()))
        .sum();
    LpSolution::Optimal { optimum, vertex }
}
