//! Weighted trees and their intersection forms.

use crate::exact::qi;
use crate::{RatMatrix, Rational};
use num_traits::{One, Signed, Zero};

/// A tree of smooth rational curves: vertex `i` has self-intersection
/// `-weights[i]`, edges are transverse single intersections.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DualTree {
    pub weights: Vec<i64>,
    pub edges: Vec<(usize, usize)>,
}

impl DualTree {
    pub fn chain(weights: &[u32]) -> Self {
        let n = weights.len();
        DualTree {
            weights: weights.iter().map(|&w| w as i64).collect(),
            edges: (1..n).map(|i| (i - 1, i)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn matrix(&self) -> RatMatrix {
        let n = self.len();
        let mut m = RatMatrix::zeros(n);
        for i in 0..n {
            m.set(i, i, qi(-self.weights[i]));
        }
        for &(a, b) in &self.edges {
            m.set(a, b, qi(1));
            m.set(b, a, qi(1));
        }
        m
    }

    /// `K·E_j = w_j - 2` for each vertex.
    pub fn k_degrees(&self) -> Vec<i64> {
        self.weights.iter().map(|w| w - 2).collect()
    }

    fn elimination_order(&self) -> (Vec<usize>, Vec<Option<usize>>) {
        let n = self.len();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        for root in 0..n {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let start = order.len();
            order.push(root);
            let mut head = start;
            while head < order.len() {
                let v = order[head];
                head += 1;
                for &u in &adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        parent[u] = Some(v);
                        order.push(u);
                    }
                }
            }
        }
        order.reverse();
        (order, parent)
    }

    /// Leaf-first elimination. Returns the pivots and the reduced right hand
    /// side, or `None` when a pivot vanishes.
    fn eliminate(&self, b: &[Rational]) -> Option<(Vec<Rational>, Vec<Rational>, Vec<usize>, Vec<Option<usize>>)> {
        let (order, parent) = self.elimination_order();
        let mut piv: Vec<Rational> = self.weights.iter().map(|&w| qi(-w)).collect();
        let mut rhs = b.to_vec();
        for &v in &order {
            if piv[v].is_zero() {
                return None;
            }
            if let Some(p) = parent[v] {
                let inv = Rational::one() / piv[v].clone();
                piv[p] = piv[p].clone() - inv.clone();
                rhs[p] = rhs[p].clone() - rhs[v].clone() * inv;
            }
        }
        Some((piv, rhs, order, parent))
    }

    pub fn det(&self) -> Rational {
        let zero = vec![Rational::zero(); self.len()];
        match self.eliminate(&zero) {
            Some((piv, ..)) => piv.into_iter().fold(Rational::one(), |a, p| a * p),
            None => self.matrix().det(),
        }
    }

    /// Solves `M x = b` where `M` is the intersection matrix.
    pub fn solve(&self, b: &[Rational]) -> Option<Vec<Rational>> {
        assert_eq!(b.len(), self.len());
        let Some((piv, rhs, order, parent)) = self.eliminate(b) else {
            return self.matrix().solve(b).ok();
        };
        let mut x = vec![Rational::zero(); self.len()];
        for &v in order.iter().rev() {
            let up = parent[v].map(|p| x[p].clone()).unwrap_or_else(Rational::zero);
            x[v] = (rhs[v].clone() - up) / piv[v].clone();
        }
        Some(x)
    }

    /// Negative definiteness via the elimination pivots (all negative).
    pub fn is_negative_definite(&self) -> bool {
        let zero = vec![Rational::zero(); self.len()];
        match self.eliminate(&zero) {
            Some((piv, ..)) => piv.iter().all(|p| p.is_negative()),
            None => false,
        }
    }

    /// Coefficients `e` with `(K + Σ e_i E_i)·E_j = 0`.
    pub fn discrepancies(&self) -> Option<Vec<Rational>> {
        let b: Vec<Rational> = self.weights.iter().map(|&w| qi(2 - w)).collect();
        self.solve(&b)
    }
}
