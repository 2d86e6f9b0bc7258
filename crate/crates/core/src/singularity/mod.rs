//! Dual graphs of log terminal surface singularities.
//!
//! Chains are Hirzebruch-Jung strings of weights `w_i = -E_i^2 >= 2`. A chain
//! may be marked at either end, recording where a curve germ meets it; the
//! marked end plays the role of `E_1`. Stars have a central curve and three
//! branch chains, each listed from the end meeting the centre.

mod enumerate;
mod graph;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exact::{q, qi};
use crate::Rational;

pub use enumerate::{
    bogomolov_tuples, enumerate_small_coefficient, enumerate_small_index, lt_chains, lt_stars,
    BogomolovFamily, CoefficientFamily, EnumerationEntry, Stratum, SMALL_INDEX_GUARD,
};
pub use graph::DualTree;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SingularityError {
    #[error("empty chain")]
    EmptyChain,
    #[error("weight {0} is below 2")]
    InvalidWeight(i64),
    #[error("chain has no marked end")]
    Unmarked,
    #[error("spectral value {0} is not an integer")]
    NonIntegral(String),
    #[error("graph is not negative definite")]
    NotNegativeDefinite,
    #[error("graph is not log terminal: coefficient {0} >= 1")]
    NotLogTerminal(String),
    #[error("expected a smooth point to be excluded")]
    SmoothPoint,
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("cannot parse `{0}`")]
    Parse(String),
    #[error("coefficient bound {0} is above the supported maximum 3/5")]
    CoefficientBound(String),
    #[error("bound {got} exceeds the guard {max}")]
    GuardExceeded { got: i64, max: i64 },
}

/// A Hirzebruch-Jung chain with optional end markings.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ChainSingularity {
    weights: Vec<u32>,
    marked_left: bool,
    marked_right: bool,
}

impl ChainSingularity {
    pub fn new(weights: Vec<u32>) -> Result<Self, SingularityError> {
        if weights.is_empty() {
            return Err(SingularityError::EmptyChain);
        }
        if let Some(&w) = weights.iter().find(|&&w| w < 2) {
            return Err(SingularityError::InvalidWeight(w as i64));
        }
        Ok(ChainSingularity { weights, marked_left: false, marked_right: false })
    }

    /// A chain marked at its left end.
    pub fn marked(weights: Vec<u32>) -> Result<Self, SingularityError> {
        Ok(Self::new(weights)?.with_marks(true, false))
    }

    pub fn with_marks(mut self, left: bool, right: bool) -> Self {
        self.marked_left = left;
        self.marked_right = right;
        self
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn marked_left(&self) -> bool {
        self.marked_left
    }

    pub fn marked_right(&self) -> bool {
        self.marked_right
    }

    pub fn reversed(&self) -> Self {
        let mut w = self.weights.clone();
        w.reverse();
        ChainSingularity { weights: w, marked_left: self.marked_right, marked_right: self.marked_left }
    }

    /// Orients the chain so that a marked end is on the left.
    pub fn canonical(&self) -> Self {
        if !self.marked_left && self.marked_right {
            self.reversed()
        } else {
            self.clone()
        }
    }

    /// Representative of the chain up to reversal, ignoring markings.
    pub fn unoriented(&self) -> Vec<u32> {
        let mut r = self.weights.clone();
        r.reverse();
        if r < self.weights {
            r
        } else {
            self.weights.clone()
        }
    }

    pub fn is_du_val(&self) -> bool {
        self.weights.iter().all(|&w| w == 2)
    }

    pub fn tree(&self) -> DualTree {
        DualTree::chain(&self.weights)
    }

    /// The index `d_n` of the recurrence `d_k = w_k d_{k-1} - d_{k-2}`.
    pub fn index(&self) -> u64 {
        chain_index_of(&self.weights)
    }

    /// The index of the chain with its first curve removed (1 for a single curve).
    pub fn tail_index(&self) -> u64 {
        chain_index_of(&self.weights[1..])
    }

    /// Prepends a `2` at the (left) marked end.
    pub fn suspend(&self) -> Self {
        let mut w = Vec::with_capacity(self.len() + 1);
        w.push(2);
        w.extend_from_slice(&self.weights);
        ChainSingularity { weights: w, marked_left: true, marked_right: self.marked_right }
    }
}

/// Index recurrence over a (possibly empty) weight sequence.
pub fn chain_index_of(weights: &[u32]) -> u64 {
    let (mut d0, mut d1): (u64, u64) = (1, 1);
    let mut first = true;
    for &w in weights {
        if first {
            d1 = w as u64;
            first = false;
            continue;
        }
        let next = (w as u64)
            .checked_mul(d1)
            .and_then(|x| x.checked_sub(d0))
            .expect("chain index overflow");
        d0 = d1;
        d1 = next;
    }
    d1
}

impl fmt::Display for ChainSingularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.weights.iter().map(|w| w.to_string()).collect();
        write!(f, "{}", s.join(","))?;
        match (self.marked_left, self.marked_right) {
            (true, true) => write!(f, "@LR"),
            (true, false) => write!(f, "@L"),
            (false, true) => write!(f, "@R"),
            (false, false) => Ok(()),
        }
    }
}

fn parse_weights(s: &str) -> Result<Vec<u32>, SingularityError> {
    s.split(',')
        .map(|t| t.trim().parse::<u32>().map_err(|_| SingularityError::Parse(s.to_string())))
        .collect()
}

impl FromStr for ChainSingularity {
    type Err = SingularityError;

    /// Comma separated weights with an optional `@L`, `@R` or `@LR` suffix.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (body, mark) = match s.split_once('@') {
            Some((b, m)) => (b, m.trim()),
            None => (s, ""),
        };
        let (l, r) = match mark {
            "" => (false, false),
            "L" => (true, false),
            "R" => (false, true),
            "LR" | "RL" => (true, true),
            _ => return Err(SingularityError::Parse(s.to_string())),
        };
        Ok(ChainSingularity::new(parse_weights(body)?)?.with_marks(l, r))
    }
}

/// A non-chain point: a central curve of weight `center` meeting three chains.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct StarSingularity {
    center: u32,
    branches: [Vec<u32>; 3],
}

impl StarSingularity {
    /// Builds and validates a star (negative definite, log terminal).
    pub fn new(center: u32, branches: [Vec<u32>; 3]) -> Result<Self, SingularityError> {
        let s = Self::unchecked(center, branches)?;
        let t = s.tree();
        if !t.is_negative_definite() {
            return Err(SingularityError::NotNegativeDefinite);
        }
        let e = t.discrepancies().ok_or(SingularityError::NotNegativeDefinite)?;
        if let Some(bad) = e.iter().find(|x| **x >= Rational::one()) {
            return Err(SingularityError::NotLogTerminal(crate::fmt_q(bad)));
        }
        Ok(s)
    }

    pub(crate) fn unchecked(center: u32, mut branches: [Vec<u32>; 3]) -> Result<Self, SingularityError> {
        if center < 2 {
            return Err(SingularityError::InvalidWeight(center as i64));
        }
        for b in &branches {
            if b.is_empty() {
                return Err(SingularityError::EmptyChain);
            }
            if let Some(&w) = b.iter().find(|&&w| w < 2) {
                return Err(SingularityError::InvalidWeight(w as i64));
            }
        }
        branches.sort();
        Ok(StarSingularity { center, branches })
    }

    pub fn center(&self) -> u32 {
        self.center
    }

    pub fn branches(&self) -> &[Vec<u32>; 3] {
        &self.branches
    }

    /// Vertex 0 is the centre, followed by each branch from the centre outwards.
    pub fn tree(&self) -> DualTree {
        let mut weights = vec![self.center as i64];
        let mut edges = Vec::new();
        for b in &self.branches {
            let mut prev = 0;
            for &w in b {
                let v = weights.len();
                weights.push(w as i64);
                edges.push((prev, v));
                prev = v;
            }
        }
        DualTree { weights, edges }
    }

    pub fn branch_indices(&self) -> [u64; 3] {
        [0, 1, 2].map(|i| chain_index_of(&self.branches[i]))
    }

    pub fn is_du_val(&self) -> bool {
        self.center == 2 && self.branches.iter().flatten().all(|&w| w == 2)
    }
}

impl fmt::Display for StarSingularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b: Vec<String> = self
            .branches
            .iter()
            .map(|b| b.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        write!(f, "star({}; {})", self.center, b.join(" | "))
    }
}

impl FromStr for StarSingularity {
    type Err = SingularityError;

    /// `star(c; b1 | b2 | b3)` with each branch listed from the centre.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || SingularityError::Parse(s.to_string());
        let inner = s
            .trim()
            .strip_prefix("star(")
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(err)?;
        let (c, rest) = inner.split_once(';').ok_or_else(err)?;
        let center: u32 = c.trim().parse().map_err(|_| err())?;
        let parts: Vec<&str> = rest.split('|').collect();
        if parts.len() != 3 {
            return Err(err());
        }
        let b = [parse_weights(parts[0])?, parse_weights(parts[1])?, parse_weights(parts[2])?];
        StarSingularity::new(center, b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum SingularityGraph {
    Smooth,
    Chain(ChainSingularity),
    Star(StarSingularity),
}

impl SingularityGraph {
    pub fn tree(&self) -> DualTree {
        match self {
            SingularityGraph::Smooth => DualTree { weights: vec![], edges: vec![] },
            SingularityGraph::Chain(c) => c.tree(),
            SingularityGraph::Star(s) => s.tree(),
        }
    }

    pub fn is_du_val(&self) -> bool {
        match self {
            SingularityGraph::Smooth => true,
            SingularityGraph::Chain(c) => c.is_du_val(),
            SingularityGraph::Star(s) => s.is_du_val(),
        }
    }
}

impl fmt::Display for SingularityGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SingularityGraph::Smooth => write!(f, "smooth"),
            SingularityGraph::Chain(c) => write!(f, "({c})"),
            SingularityGraph::Star(s) => write!(f, "{s}"),
        }
    }
}

impl FromStr for SingularityGraph {
    type Err = SingularityError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t == "smooth" {
            Ok(SingularityGraph::Smooth)
        } else if t.starts_with("star(") {
            Ok(SingularityGraph::Star(t.parse()?))
        } else {
            Ok(SingularityGraph::Chain(t.parse()?))
        }
    }
}

/// Discrepancy data of a singular point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscrepancyData {
    /// Coefficients `e_i = e(E_i)`, in the vertex order of [`SingularityGraph::tree`].
    pub e: Vec<Rational>,
    pub coefficient: Rational,
    /// Chain index; `None` for stars.
    pub index: Option<u64>,
    pub det_abs: u64,
}

pub fn chain_index(c: &ChainSingularity) -> u64 {
    c.index()
}

pub fn discrepancies(g: &SingularityGraph) -> Result<DiscrepancyData, SingularityError> {
    let t = match g {
        SingularityGraph::Smooth => return Err(SingularityError::SmoothPoint),
        other => other.tree(),
    };
    let e = t.discrepancies().ok_or(SingularityError::NotNegativeDefinite)?;
    let coefficient = e.iter().max().cloned().unwrap_or_else(Rational::zero);
    let det = t.det().abs();
    let det_abs = det.to_integer().to_u64().expect("determinant fits in u64");
    let index = match g {
        SingularityGraph::Chain(c) => Some(c.index()),
        _ => None,
    };
    Ok(DiscrepancyData { e, coefficient, index, det_abs })
}

/// Coefficient of the left end of a chain (marked end convention).
fn left_end_coefficient(c: &ChainSingularity) -> Rational {
    c.tree().discrepancies().expect("chains are negative definite")[0].clone()
}

/// `k` with `e(E_1) = k / r` at the marked end.
pub fn spectral_value(c: &ChainSingularity) -> Result<u64, SingularityError> {
    let c = if c.marked_left {
        c.clone()
    } else if c.marked_right {
        c.reversed()
    } else {
        return Err(SingularityError::Unmarked);
    };
    let k = left_end_coefficient(&c) * qi(c.index() as i64);
    if !k.is_integer() {
        return Err(SingularityError::NonIntegral(crate::fmt_q(&k)));
    }
    Ok(k.to_integer().to_u64().expect("spectral value is non-negative"))
}

pub fn suspend(c: &ChainSingularity) -> ChainSingularity {
    c.canonical().suspend()
}

/// `e(E_1, K + λD)` for a germ `D` meeting the marked end normally.
pub fn boundary_coefficient_chain(
    c: &ChainSingularity,
    lambda: &Rational,
) -> Result<Rational, SingularityError> {
    let r = qi(c.index() as i64);
    let k = qi(spectral_value(c)? as i64);
    let one = Rational::one();
    Ok(lambda.clone() * (r.clone() - one.clone()) / r.clone() + (one - lambda.clone()) * k / r)
}

/// Coefficient of the central curve, checked to be of the form `k/(k+1)` and
/// maximal among all coefficients.
pub fn star_coefficient(s: &StarSingularity) -> Result<Rational, SingularityError> {
    let e = s.tree().discrepancies().ok_or(SingularityError::NotNegativeDefinite)?;
    let c = e[0].clone();
    if e.iter().any(|x| *x > c) {
        return Err(SingularityError::Invariant(format!("central coefficient of {s} is not maximal")));
    }
    let one = Rational::one();
    if c >= one {
        return Err(SingularityError::NotLogTerminal(crate::fmt_q(&c)));
    }
    let k = c.clone() / (one - c.clone());
    if !k.is_integer() {
        return Err(SingularityError::Invariant(format!(
            "central coefficient {} of {s} is not of the form k/(k+1)",
            crate::fmt_q(&c)
        )));
    }
    Ok(c)
}

/// The different `(r_i - 1)/r_i` at points of index `r_i`.
pub fn different_coefficients(indices: &[u64]) -> Vec<Rational> {
    indices
        .iter()
        .map(|&r| {
            assert!(r >= 1, "indices are positive");
            q(r as i64 - 1, r as i64)
        })
        .collect()
}

/// Least common multiple of the denominators of a vector (as an integer).
pub fn denominator_lcm(e: &[Rational]) -> u64 {
    e.iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
        .to_u64()
        .expect("lcm fits in u64")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ch(s: &str) -> ChainSingularity {
        s.parse().unwrap()
    }

    #[test]
    fn indices() {
        assert_eq!(ch("2").index(), 2);
        assert_eq!(ch("2,5,2,2,2,2").index(), 37);
        assert_eq!(ch("2,2,4,2,2,2,2").index(), 38);
        assert_eq!(ch("2,2,4,2,2,2,2,2,2").index(), 52);
    }

    #[test]
    fn small_discrepancies() {
        let d = discrepancies(&"3".parse().unwrap()).unwrap();
        assert_eq!(d.e, vec![q(1, 3)]);
        let d = discrepancies(&"2,2,2".parse().unwrap()).unwrap();
        assert!(d.e.iter().all(|x| x.is_zero()));
        let d = discrepancies(&"3,2".parse().unwrap()).unwrap();
        assert_eq!(d.e, vec![q(2, 5), q(1, 5)]);
        assert_eq!(d.coefficient, q(2, 5));
    }

    #[test]
    fn spectral_values() {
        assert_eq!(spectral_value(&ch("2,2,2@L")).unwrap(), 0);
        assert_eq!(spectral_value(&ch("2,2,3@L")).unwrap(), 1);
        assert_eq!(spectral_value(&ch("3,2@L")).unwrap(), 2);
        assert_eq!(spectral_value(&suspend(&ch("3,2@L"))).unwrap(), 2);
        assert_eq!(spectral_value(&ch("3,2")), Err(SingularityError::Unmarked));
        assert_eq!(suspend(&ch("3@L")), ch("2,3@L"));
        assert_eq!(suspend(&ch("4@L")).weights(), &[2, 4]);
    }

    #[test]
    fn boundary_coefficients() {
        let a = q(2, 7);
        assert_eq!(boundary_coefficient_chain(&ch("3@L"), &a).unwrap(), q(1, 3) + a / qi(3));
        assert_eq!(boundary_coefficient_chain(&ch("3,2,2@L"), &q(60, 67)).unwrap(), q(381, 469));
        assert_eq!(boundary_coefficient_chain(&ch("2,5,2@L"), &qi(1)).unwrap(), q(15, 16));
    }

    #[test]
    fn stars() {
        let s: StarSingularity = "star(2; 2 | 2 | 2)".parse().unwrap();
        assert_eq!(star_coefficient(&s).unwrap(), qi(0));
        let s: StarSingularity = "star(2; 2 | 2 | 3)".parse().unwrap();
        assert_eq!(star_coefficient(&s).unwrap(), q(1, 2));
        let s: StarSingularity = "star(2; 2 | 2 | 2,3)".parse().unwrap();
        assert_eq!(star_coefficient(&s).unwrap(), q(1, 2));
        assert!("star(2; 2 | 3 | 6)".parse::<StarSingularity>().is_err());
    }

    #[test]
    fn different() {
        assert_eq!(different_coefficients(&[1]), vec![qi(0)]);
        assert_eq!(different_coefficients(&[2, 3]), vec![q(1, 2), q(2, 3)]);
        assert_eq!(different_coefficients(&[5]), vec![q(4, 5)]);
    }

    #[test]
    fn parsing_round_trip() {
        for s in ["2,5,2,2,2,2@L", "3,2", "2,3@R", "4@LR"] {
            assert_eq!(ch(s).to_string(), s);
        }
        assert_eq!(ch("2,3@R").canonical(), ch("3,2@L"));
        assert!("2,1".parse::<ChainSingularity>().is_err());
        assert!("".parse::<ChainSingularity>().is_err());
    }
}
