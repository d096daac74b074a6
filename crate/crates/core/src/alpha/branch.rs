//! Best-bound-first branch and bound over exact LP relaxations.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::simplex::{maximize, BoundedLp, LpSolution};
use crate::lattice::{IntMatrix, Rational};

/// Integer program over a finite box: `A·x = b`, `lower ≤ x ≤ upper`.
#[derive(Debug, Clone)]
pub(crate) struct BoxedSystem<'a> {
    pub matrix: &'a IntMatrix,
    pub rhs: &'a [BigInt],
    pub lower: Vec<BigInt>,
    pub upper: Vec<BigInt>,
}

struct Node {
    bound: Rational,
    seq: usize,
    lower: Vec<BigInt>,
    upper: Vec<BigInt>,
    vertex: Vec<Rational>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // max-heap on bound, older nodes first among equal bounds
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .cmp(&other.bound)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

impl BoxedSystem<'_> {
    fn relax(&self, objective: &[BigInt], lower: &[BigInt], upper: &[BigInt]) -> LpSolution {
        let upper: Vec<Option<BigInt>> = upper.iter().cloned().map(Some).collect();
        maximize(&BoundedLp {
            matrix: self.matrix,
            rhs: self.rhs,
            objective,
            lower,
            upper: &upper,
        })
    }

    /// Integer maximum of `objective·x` (integer objective), with one maximizer.
    pub fn maximize(&self, objective: &[BigInt]) -> Option<(BigInt, Vec<BigInt>)> {
        let mut heap = BinaryHeap::new();
        let mut seq = 0usize;
        let mut push = |heap: &mut BinaryHeap<Node>, lower: Vec<BigInt>, upper: Vec<BigInt>| {
            if let LpSolution::Optimal { optimum, vertex } = self.relax(objective, &lower, &upper) {
                heap.push(Node {
                    bound: optimum,
                    seq,
                    lower,
                    upper,
                    vertex,
                });
                seq += 1;
            }
        };
        push(&mut heap, self.lower.clone(), self.upper.clone());

        while let Some(node) = heap.pop() {
            let Some(j) = most_fractional(&node.vertex) else {
                // integral vertex with the best remaining bound
                let x: Vec<BigInt> = node.vertex.iter().map(|v| v.to_integer()).collect();
                return Some((node.bound.to_integer(), x));
            };
            let v = &node.vertex[j];
            let mut down = node.upper.clone();
            down[j] = v.floor().to_integer();
            push(&mut heap, node.lower.clone(), down);
            let mut up = node.lower;
            up[j] = v.ceil().to_integer();
            push(&mut heap, up, node.upper);
        }
        None
    }

    /// Fixes `x[index] = value` and returns the lexicographically smallest
    /// integer point of what remains.
    pub fn lexicographic_min_with(&self, index: usize, value: &BigInt) -> Option<Vec<BigInt>> {
        let mut sys = self.clone();
        sys.lower[index] = value.clone();
        sys.upper[index] = value.clone();
        let n = sys.matrix.cols();
        for i in 0..n {
            if sys.lower[i] == sys.upper[i] {
                continue;
            }
            let mut objective = vec![BigInt::zero(); n];
            objective[i] = -BigInt::one();
            let (neg_min, _) = sys.maximize(&objective)?;
            let min = -neg_min;
            sys.lower[i] = min.clone();
            sys.upper[i] = min;
        }
        // every coordinate is now pinned
        Some(sys.lower)
    }
}

/// Index whose fractional part is closest to 1/2; ties go to the lowest index.
fn most_fractional(vertex: &[Rational]) -> Option<usize> {
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut best: Option<(usize, Rational)> = None;
    for (j, v) in vertex.iter().enumerate() {
        if v.is_integer() {
            continue;
        }
        let frac = v - v.floor();
        let dist = if frac > half { &frac - &half } else { &half - &frac };
        if best.as_ref().is_none_or(|(_, d)| dist < *d) {
            best = Some((j, dist));
        }
    }
    best.map(|(j, _)| j)
}
