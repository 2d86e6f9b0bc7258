//! Numerical certificates: Riemann–Roch and Bogomolov bounds, the
//! uniruledness inequality, local klt bounds, toric surfaces, and replicas of
//! the local contraction and fibre tables.

mod fibre;
mod tables;
mod toric;

pub use fibre::{fibre_catalogue, fibre_entry, FibreBlowup, FibreEntry, FibreModel, LtStatus};
pub use tables::{contraction_tables, cusp_constant, node_constraint, ContractionEntry, CuspType, LinearConstraint, NodeType};
pub use toric::{toric_density_sample, toric_k2, toric_max_gap, ToricFamily};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::config::{k_squared, ConfigError, SurfaceModel};
use crate::exact::qi;
use crate::{q, Rational};

/// Contributions of one non Du Val point to the Riemann–Roch count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointStats {
    /// `Γ(t) = Σ (1 - e_j)(w_j - 2)`.
    #[serde(serialize_with = "crate::exact::ser_q")]
    pub gamma: Rational,
    /// `δ(t) = Σ e_j (w_j - 2)`.
    #[serde(serialize_with = "crate::exact::ser_q")]
    pub delta: Rational,
    /// `w(t) = Σ (w_j - 2)`.
    pub w: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct RRStats {
    pub n: usize,
    pub k_squared_tilde: i64,
    pub w: i64,
    #[serde(serialize_with = "crate::exact::ser_q")]
    pub gamma: Rational,
    pub per_point: Vec<PointStats>,
}

/// `χ(-K - D) = 1 - n + K²_S̃ + Σ w(t)` on the resolution of the non Du Val points.
pub fn rr_chi(s: &SurfaceModel) -> Result<(Rational, RRStats), ConfigError> {
    let k2 = s
        .config
        .k_squared_smooth
        .ok_or_else(|| ConfigError::Unsupported("K^2 of the smooth model is unknown".into()))?;
    let mut per_point = Vec::new();
    for sp in s.non_du_val() {
        let mut st = PointStats { gamma: Rational::zero(), delta: Rational::zero(), w: 0 };
        for (w, e) in sp.tree.weights.iter().zip(&sp.discrepancies) {
            let kd = qi(w - 2);
            st.gamma += (Rational::one() - e) * &kd;
            st.delta += e * &kd;
            st.w += w - 2;
        }
        per_point.push(st);
    }
    let w: i64 = per_point.iter().map(|p| p.w).sum();
    let gamma = per_point.iter().map(|p| p.gamma.clone()).sum();
    let n = per_point.len();
    let chi = qi(1 - n as i64 + k2 + w);
    Ok((chi, RRStats { n, k_squared_tilde: k2, w, gamma, per_point }))
}

/// Why a surface is known to have a tiger.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum TigerReason {
    /// At most one non Du Val point, or two with `e(S) ≤ 1/2`.
    FewNonDuValPoints,
    /// `K² > 4`.
    LargeDegree,
}

/// A sufficient condition for a tiger; `None` is inconclusive.
pub fn tiger_certificate(s: &SurfaceModel) -> Option<TigerReason> {
    let n = s.non_du_val().count();
    let e = s.singularities.iter().map(|p| p.coefficient()).max().unwrap_or_else(Rational::zero);
    let positive = k_squared(s).map(|k| k > Rational::zero()).unwrap_or(true);
    if positive && (n <= 1 || (n == 2 && e <= q(1, 2))) {
        return Some(TigerReason::FewNonDuValPoints);
    }
    if matches!(k_squared(s), Ok(k) if k > qi(4)) {
        return Some(TigerReason::LargeDegree);
    }
    None
}

/// `Σ (r_p - 1)/r_p ≤ e(S) - e(B)` over points off `B`.
pub fn bogomolov_check(indices_off_b: &[u64], e_top_s: i64, e_top_b: i64) -> bool {
    let sum: Rational = indices_off_b.iter().map(|&r| q(r as i64 - 1, r as i64)).sum();
    sum <= qi(e_top_s - e_top_b)
}

/// [`bogomolov_check`] on a rational surface with `B` a tree of `s` smooth rational curves.
pub fn bogomolov_rational(indices_off_b: &[u64], s: usize) -> bool {
    let e_b = if s == 0 { 0 } else { 1 + s as i64 };
    bogomolov_check(indices_off_b, 3, e_b)
}

/// `-K·Z ≥ 1/x + 1/y` for a rational curve with branch indices `x`, `y`.
pub fn uniruled_criterion(kz: &Rational, x: u64, y: u64) -> bool {
    assert!(x >= 1 && y >= 1, "indices are positive");
    *kz >= q(1, x as i64) + q(1, y as i64)
}

/// Branch data of a boundary at a smooth point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SmoothPointKind {
    /// Components through the point as (coefficient, multiplicity).
    Mult(Vec<(Rational, u32)>),
    /// Node of order `g` with branch coefficients.
    Node { g: u32, a: Rational, b: Rational },
    Cusp { g: u32, a: Rational },
}

/// Necessary conditions for a flush pair at a smooth point with `m = m(Δ)`.
pub fn smooth_point_flush_bounds(kind: &SmoothPointKind, m: &Rational) -> bool {
    match kind {
        SmoothPointKind::Mult(parts) => {
            let s: Rational = parts.iter().map(|(a, mult)| a * qi(*mult as i64)).sum();
            s - Rational::one() < *m
        }
        SmoothPointKind::Node { g, a, b } => {
            let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
            *g < 2 || hi * qi(2) + lo < qi(2)
        }
        SmoothPointKind::Cusp { a, .. } => *a < q(4, 5),
    }
}

/// `max(a, b) + m_p < 1`, sufficient for klt at a normal crossing of two boundary components.
pub fn local_klt_bound(a: &Rational, b: &Rational, mp: &Rational) -> bool {
    a.max(b) + mp < Rational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bogomolov_examples() {
        assert!(!bogomolov_rational(&[2, 5, 7, 17], 0));
        assert!(bogomolov_rational(&[3, 3, 3, 1000], 0));
        assert!(bogomolov_rational(&[], 0));
        assert!(bogomolov_rational(&[2], 1));
        assert!(!bogomolov_rational(&[2], 2));
    }

    #[test]
    fn uniruled_examples() {
        assert!(uniruled_criterion(&q(4, 37), 37, 37));
        assert!(!uniruled_criterion(&q(2, 57), 57, 19));
        for m in 1..40 {
            assert!(!uniruled_criterion(&q(1, m), m as u64, m as u64));
        }
    }

    #[test]
    fn smooth_point_examples() {
        let a = q(1, 2);
        assert!(!smooth_point_flush_bounds(&SmoothPointKind::Mult(vec![(a.clone(), 3)]), &a));
        let a = q(49, 100);
        assert!(smooth_point_flush_bounds(&SmoothPointKind::Mult(vec![(a.clone(), 3)]), &a));
        assert!(!smooth_point_flush_bounds(&SmoothPointKind::Node { g: 2, a: q(3, 4), b: q(1, 2) }, &q(1, 2)));
        assert!(smooth_point_flush_bounds(&SmoothPointKind::Cusp { g: 1, a: q(3, 4) }, &q(3, 4)));
        assert!(!smooth_point_flush_bounds(&SmoothPointKind::Cusp { g: 1, a: q(4, 5) }, &q(4, 5)));
    }

    #[test]
    fn klt_bound_examples() {
        assert!(local_klt_bound(&q(60, 67), &Rational::zero(), &q(15, 469)));
        assert_eq!(q(60, 67) + q(15, 469), q(435, 469));
        assert!(!local_klt_bound(&Rational::one(), &Rational::zero(), &Rational::zero()));
        assert!(local_klt_bound(&Rational::zero(), &Rational::zero(), &Rational::zero()));
    }
}
