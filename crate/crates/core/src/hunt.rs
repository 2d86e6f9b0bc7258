//! The hunt: extract a divisor of maximal coefficient, scale the boundary to
//! be trivial on the other extremal ray, contract that ray and repeat.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::config::{
    blow_down, exceptional_coefficients, k_dot, log_pullback, q_intersection, q_self, Boundary, ConfigError,
    SurfaceModel,
};
use crate::exact::Eps;
use crate::singularity::SingularityGraph;
use crate::{fmt_q, EpsRational, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HuntError {
    #[error("the surface has no singular point to extract")]
    SmoothSurface,
    #[error("the ray {0} is not K-negative")]
    RayNotNegative(String),
    #[error("the boundary is trivial on the ray {0}")]
    DegenerateRay(String),
    #[error("no tracked curve spans the second extremal ray")]
    Unresolved,
    #[error("contraction is not log terminal: {0}")]
    ContractionNotLt(String),
    #[error("coefficient of {0} did not increase")]
    NotIncreasing(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// The second extremal ray of an extraction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Extremal {
    Sigma(String),
    Fibre(String),
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Outcome {
    /// `Σ` was contracted; `q` describes the point it became.
    Contracted { sigma: String, q: String },
    Net { fibre: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HuntRecord {
    pub extracted: String,
    /// The singular point `x` containing the extracted divisor, as a graph.
    pub x: String,
    /// `e(E, K + Δ)` before scaling.
    pub coefficient: EpsRational,
    /// `None` when `Γ_ε` is infinitesimal on the ray and only the limit is finite.
    pub lambda: Option<EpsRational>,
    pub outcome: Outcome,
    pub singularities_after: Vec<String>,
    pub boundary_after: Boundary,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HuntState {
    pub surface: SurfaceModel,
    pub boundary: Boundary,
    pub step: usize,
    pub log: Vec<HuntRecord>,
    /// Every earlier surface with the divisor extracted from it.
    pub history: Vec<(SurfaceModel, String)>,
}

impl HuntState {
    pub fn new(surface: SurfaceModel, boundary: Boundary) -> Self {
        HuntState { surface, boundary, step: 0, log: Vec::new(), history: Vec::new() }
    }
}

fn curve_order(s: &SurfaceModel, c: &str) -> usize {
    s.config.index_of(c).unwrap_or(usize::MAX)
}

/// A divisor of maximal coefficient: weight at least 3 preferred, central
/// divisors at star points, then the first in configuration order.
pub fn select_hunt_divisor(s: &SurfaceModel, delta: &Boundary) -> Result<String, HuntError> {
    if s.singularities.is_empty() {
        return Err(HuntError::SmoothSurface);
    }
    let coeffs = exceptional_coefficients(s, delta)?;
    let max = coeffs.values().max().cloned().expect("non-empty");
    let mut best: Vec<&String> = coeffs.iter().filter(|(_, v)| **v == max).map(|(k, _)| k).collect();
    let info = |e: &str| {
        let (p, v) = s.locate(e).expect("exceptional");
        let sp = &s.singularities[p];
        (matches!(sp.graph, SingularityGraph::Star(_)) && v == 0, sp.tree.weights[v] >= 3)
    };
    best.sort_by_key(|e| {
        let (central, heavy) = info(e);
        (!central, !heavy, curve_order(s, e))
    });
    Ok(best[0].clone())
}

/// Scans kept curves of `T` (other than `extracted`) for the second ray.
pub fn find_extremal(t: &SurfaceModel, extracted: &str) -> Result<Extremal, HuntError> {
    let mut fibre = None;
    for c in t.kept_curves() {
        if c == extracted || t.config.curve(&c)?.local {
            continue;
        }
        if k_dot(t, &c)? >= Rational::zero() {
            continue;
        }
        let q = q_self(t, &c)?;
        if q < Rational::zero() {
            return Ok(Extremal::Sigma(c));
        }
        if q.is_zero() && fibre.is_none() {
            fibre = Some(c);
        }
    }
    Ok(fibre.map(Extremal::Fibre).unwrap_or(Extremal::Unresolved))
}

/// `λ` with `K_T + λΓ_ε` trivial on `ray`, and `Γ' = λΓ_ε`.
pub fn scale(
    t: &SurfaceModel,
    gamma: &Boundary,
    extracted: &str,
    ray: &str,
) -> Result<(Option<EpsRational>, Boundary), HuntError> {
    let mut g_eps = gamma.clone();
    g_eps.set(extracted, gamma.get(extracted) + Eps::epsilon());
    let num = -k_dot(t, ray)?;
    if num <= Rational::zero() {
        return Err(HuntError::RayNotNegative(ray.to_string()));
    }
    let mut den = EpsRational::zero();
    for (c, v) in &g_eps.0 {
        let dot = q_intersection(t, c, ray)?;
        den = den + v.scale(&dot);
    }
    if den.is_zero() {
        return Err(HuntError::DegenerateRay(ray.to_string()));
    }
    let num = Eps::from_std(num);
    if !den.std.is_zero() {
        let lambda = num.checked_div(&den).expect("non-zero standard part");
        return Ok((Some(lambda.clone()), g_eps.scale(&lambda)));
    }
    // Γ_ε = ε·G: only the limit coefficients num·G/(G·R) are finite.
    if g_eps.0.values().any(|v| !v.std.is_zero()) {
        return Err(HuntError::DegenerateRay(ray.to_string()));
    }
    let g = Boundary(g_eps.0.iter().map(|(c, v)| (c.clone(), Eps::from_std(v.eps.clone()))).collect());
    let lambda = num.checked_div(&Eps::from_std(den.eps)).expect("non-zero");
    Ok((None, g.scale(&lambda)))
}

fn describe_point(s: &SurfaceModel, touching: &[String]) -> String {
    touching
        .iter()
        .find_map(|c| s.locate(c))
        .map(|(p, _)| s.singularities[p].graph.to_string())
        .unwrap_or_else(|| "smooth".into())
}

/// One hunt step. Returns the next state and whether the step ended in a net.
pub fn hunt_step(state: &HuntState) -> Result<(HuntState, bool), HuntError> {
    let s = &state.surface;
    let e = select_hunt_divisor(s, &state.boundary)?;
    let (xp, _) = s.locate(&e).expect("exceptional");
    let x = s.singularities[xp].graph.to_string();
    let gamma = log_pullback(s, &state.boundary, std::slice::from_ref(&e))?;
    let coefficient = gamma.get(&e);
    let t_ex: Vec<String> = s.exceptional.iter().filter(|c| **c != e).cloned().collect();
    let t = s.with_exceptional(t_ex.clone())?;
    let ray = match find_extremal(&t, &e)? {
        Extremal::Sigma(c) => c,
        Extremal::Fibre(f) => {
            let (lambda, gp) = scale(&t, &gamma, &e, &f)?;
            let mut next = state.clone();
            next.log.push(HuntRecord {
                extracted: e.clone(),
                x,
                coefficient,
                lambda,
                outcome: Outcome::Net { fibre: f },
                singularities_after: t.singularities.iter().map(|p| p.graph.to_string()).collect(),
                boundary_after: gp,
            });
            next.history.push((s.clone(), e));
            next.surface = t;
            next.step += 1;
            return Ok((next, true));
        }
        Extremal::Unresolved => return Err(HuntError::Unresolved),
    };
    let (lambda, gprime) = scale(&t, &gamma, &e, &ray)?;
    if let Some(l) = &lambda {
        if *l < Eps::one() {
            return Err(HuntError::NotIncreasing(e));
        }
    }

    // Contract the ray on the smooth model, then every exceptional (-1)-curve it uncovers.
    let touching: Vec<String> = {
        let ri = t.config.index_of(&ray)?;
        t_ex.iter().filter(|c| t.config.inter[ri][t.config.index_of(c).unwrap()] > 0).cloned().collect()
    };
    let (mut cfg, _) = blow_down(&t.config, &ray).map_err(|err| match err {
        ConfigError::NotMinusOne(c) => HuntError::ContractionNotLt(format!("{c} is not a (-1)-curve on the resolution")),
        other => other.into(),
    })?;
    let mut remaining = t_ex;
    while let Some(pos) = remaining.iter().position(|c| {
        let cur = cfg.curve(c).expect("tracked");
        cur.self_int == -1 && cur.k_deg == -1
    }) {
        let c = remaining.remove(pos);
        cfg = blow_down(&cfg, &c)?.0;
    }
    let next_surface = crate::config::contract_to_surface(&cfg, &crate::config::ContractionPolicy::Explicit(remaining))
        .map_err(|err| HuntError::ContractionNotLt(err.to_string()))?;

    let mut boundary = Boundary::new();
    for (c, v) in &gprime.0 {
        if *c != ray && cfg.index_of(c).is_ok() {
            boundary.set(c, v.clone());
        }
    }
    for (c, v) in &state.boundary.0 {
        if boundary.get(c) <= *v && *c != ray {
            return Err(HuntError::NotIncreasing(c.clone()));
        }
    }
    let q = describe_point(&next_surface, &touching);
    let mut next = state.clone();
    next.log.push(HuntRecord {
        extracted: e.clone(),
        x,
        coefficient,
        lambda,
        outcome: Outcome::Contracted { sigma: ray, q },
        singularities_after: next_surface.singularities.iter().map(|p| p.graph.to_string()).collect(),
        boundary_after: boundary.clone(),
    });
    next.history.push((s.clone(), e));
    next.surface = next_surface;
    next.boundary = boundary;
    next.step += 1;
    Ok((next, false))
}

/// Why a hunt stopped.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum HuntEnd {
    Net,
    Smooth,
    StepLimit,
    Unresolved,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HuntRun {
    pub state: HuntState,
    pub end: HuntEnd,
}

/// Iterates [`hunt_step`] up to `max_steps` times.
pub fn run_hunt(s: &SurfaceModel, delta: &Boundary, max_steps: usize) -> Result<HuntRun, HuntError> {
    let mut state = HuntState::new(s.clone(), delta.clone());
    for _ in 0..max_steps {
        if state.surface.singularities.is_empty() {
            return Ok(HuntRun { state, end: HuntEnd::Smooth });
        }
        match hunt_step(&state) {
            Ok((next, net)) => {
                state = next;
                if net {
                    return Ok(HuntRun { state, end: HuntEnd::Net });
                }
            }
            Err(HuntError::Unresolved) => return Ok(HuntRun { state, end: HuntEnd::Unresolved }),
            Err(e) => return Err(e),
        }
    }
    let end = if state.surface.singularities.is_empty() { HuntEnd::Smooth } else { HuntEnd::StepLimit };
    Ok(HuntRun { state, end })
}

/// The boundaries `γ_i = Σ_{j≤i} m_j E_j` with `m_{i+1} = e(E_{i+1}, K_{S_i} + γ_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaSequence(pub Vec<(String, Rational)>);

/// Recomputes the `γ` boundaries along a hunt. `m1` overrides the first
/// coefficient; later ones are computed from it.
pub fn gamma_sequence(history: &[(SurfaceModel, String)], m1: Option<Rational>) -> Result<GammaSequence, HuntError> {
    let mut out: Vec<(String, Rational)> = Vec::new();
    for (i, (s, e)) in history.iter().enumerate() {
        let mut gamma = Boundary::new();
        for (c, m) in &out {
            if s.config.index_of(c).is_ok() && !s.is_exceptional(c) {
                gamma.set(c, Eps::from_std(m.clone()));
            }
        }
        let m = match (&m1, i) {
            (Some(v), 0) => v.clone(),
            _ => exceptional_coefficients(s, &gamma)?[e].std.clone(),
        };
        out.push((e.clone(), m));
    }
    Ok(GammaSequence(out))
}

/// JSON form of a hunt log.
pub fn hunt_log_json(log: &[HuntRecord]) -> serde_json::Value {
    let steps: Vec<serde_json::Value> = log
        .iter()
        .map(|r| {
            let boundary: BTreeMap<&String, serde_json::Value> = r
                .boundary_after
                .0
                .iter()
                .map(|(k, v)| (k, serde_json::json!({"std": fmt_q(&v.std), "eps": fmt_q(&v.eps)})))
                .collect();
            serde_json::json!({
                "extracted": r.extracted,
                "x": r.x,
                "coefficient": {"std": fmt_q(&r.coefficient.std), "eps": fmt_q(&r.coefficient.eps)},
                "lambda": r.lambda.as_ref().map(|l| serde_json::json!({"std": fmt_q(&l.std), "eps": fmt_q(&l.eps)})),
                "outcome": r.outcome,
                "singularities_after": r.singularities_after,
                "boundary_after": boundary,
            })
        })
        .collect();
    serde_json::Value::Array(steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_program;

    #[test]
    fn du_val_tie_is_first_by_id() {
        let s = parse_program("surface abstract K2 7\nchain E 2,2\ncurve S self -1 kdeg -1\nmeet S E1 1\n")
            .unwrap()
            .surface()
            .unwrap();
        assert_eq!(select_hunt_divisor(&s, &Boundary::new()).unwrap(), "E1");
    }

    #[test]
    fn smooth_surface_has_nothing_to_extract() {
        let s = parse_program("surface P2\ncurve L degree 1\n").unwrap().surface().unwrap();
        assert_eq!(select_hunt_divisor(&s, &Boundary::new()), Err(HuntError::SmoothSurface));
    }
}
