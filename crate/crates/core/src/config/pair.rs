//! Pairs `K_S + Δ`: log pullback, coefficients of exceptional divisors, log
//! resolutions, log terminal and log canonical verdicts, flush and level tests.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::program::{exceptional_coefficient, execute_tracking, Instruction};
use super::surface::SurfaceModel;
use super::{blow_up, BranchKind, ConfigError, Configuration};
use crate::exact::Eps;
use crate::{EpsRational, Rational};

/// Coefficients of a divisor supported on kept curves.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Boundary(pub BTreeMap<String, EpsRational>);

impl Boundary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_rationals<'a>(items: impl IntoIterator<Item = (&'a str, Rational)>) -> Self {
        let mut b = Boundary::new();
        for (k, v) in items {
            b.set(k, Eps::from_std(v));
        }
        b
    }

    pub fn get(&self, c: &str) -> EpsRational {
        self.0.get(c).cloned().unwrap_or_else(Eps::zero)
    }

    pub fn set(&mut self, c: &str, v: EpsRational) {
        if v.is_zero() {
            self.0.remove(c);
        } else {
            self.0.insert(c.to_string(), v);
        }
    }

    pub fn support(&self) -> Vec<String> {
        self.0.keys().cloned().collect()
    }

    /// Least non-zero coefficient, 1 for the empty divisor.
    pub fn m(&self) -> EpsRational {
        self.0.values().min().cloned().unwrap_or_else(Eps::one)
    }

    pub fn is_boundary(&self) -> bool {
        self.0.values().all(|v| *v >= Eps::zero() && *v <= Eps::one())
    }

    pub fn scale(&self, k: &EpsRational) -> Boundary {
        let mut b = Boundary::new();
        for (c, v) in &self.0 {
            b.set(c, v.clone() * k.clone());
        }
        b
    }
}

/// Coefficients `e(E, K + Δ)` of every exceptional curve of the minimal resolution.
pub fn exceptional_coefficients(
    s: &SurfaceModel,
    delta: &Boundary,
) -> Result<BTreeMap<String, EpsRational>, ConfigError> {
    let mut out: BTreeMap<String, EpsRational> = BTreeMap::new();
    for sp in &s.singularities {
        for (e, d) in sp.curves.iter().zip(&sp.discrepancies) {
            out.insert(e.clone(), Eps::from_std(d.clone()));
        }
    }
    for (c, coef) in &delta.0 {
        if s.is_exceptional(c) {
            return Err(ConfigError::Unsupported(format!("a boundary on kept curves, but {c} is contracted")));
        }
        let ci = s.config.index_of(c)?;
        let pull = s.pullback_from(|e| s.config.inter_idx(ci, s.config.index_of(e).unwrap()));
        for (e, v) in pull {
            let acc = out.remove(&e).unwrap_or_else(Eps::zero);
            out.insert(e, acc + coef.scale(&v));
        }
    }
    Ok(out)
}

fn all_coefficients(s: &SurfaceModel, delta: &Boundary) -> Result<BTreeMap<String, EpsRational>, ConfigError> {
    let mut coeffs = exceptional_coefficients(s, delta)?;
    coeffs.extend(delta.0.iter().map(|(c, v)| (c.clone(), v.clone())));
    Ok(coeffs)
}

/// `Γ` with `K_T + Γ = f^*(K_S + Δ)` on the model `T` extracting `extracted`.
/// The result is supported on kept curves and the extracted curves.
pub fn log_pullback(s: &SurfaceModel, delta: &Boundary, extracted: &[String]) -> Result<Boundary, ConfigError> {
    let coeffs = exceptional_coefficients(s, delta)?;
    let mut out = delta.clone();
    for e in extracted {
        let v = coeffs
            .get(e)
            .cloned()
            .ok_or_else(|| ConfigError::Unsupported(format!("an exceptional curve, but {e} is kept")))?;
        out.set(e, v);
    }
    Ok(out)
}

/// A divisor over `S`: a curve of the minimal resolution, or the last
/// exceptional curve of further blow-ups of it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DivisorSpec {
    Resolution(String),
    Infinitesimal { blowups: Vec<Instruction>, target: String },
}

/// `e(V, K + Δ)`.
pub fn coefficient_of(s: &SurfaceModel, delta: &Boundary, v: &DivisorSpec) -> Result<EpsRational, ConfigError> {
    let mut coeffs = all_coefficients(s, delta)?;
    match v {
        DivisorSpec::Resolution(e) => {
            if !s.is_exceptional(e) {
                return Err(ConfigError::Unsupported(format!("an exceptional curve, but {e} is kept")));
            }
            Ok(coeffs[e].clone())
        }
        DivisorSpec::Infinitesimal { blowups, target } => {
            let mut cfg = s.config.clone();
            for ins in blowups {
                cfg = execute_tracking(&cfg, ins, Some(&mut coeffs))?;
            }
            coeffs.get(target).cloned().ok_or_else(|| ConfigError::UnknownCurve(target.clone()))
        }
    }
}

/// A log resolution of `(S, Δ)` dominating the minimal resolution.
#[derive(Clone, Debug)]
pub struct LogResolution {
    pub config: Configuration,
    /// Coefficients of the strict transforms of `Δ` and of all exceptional divisors.
    pub coefficients: BTreeMap<String, EpsRational>,
    /// Exceptional divisors over `S`, each with the singular point it lies over (`None` for smooth points).
    pub exceptional: Vec<(String, Option<usize>)>,
    /// Divisors created beyond the minimal resolution, in order.
    pub added: Vec<String>,
}

fn non_snc_point(cfg: &Configuration, relevant: &BTreeSet<String>) -> Option<String> {
    cfg.points.iter().find_map(|p| {
        let idx: Vec<usize> = (0..p.branches.len()).filter(|&i| relevant.contains(&p.branches[i].curve)).collect();
        let bad = idx.len() > 2
            || idx.iter().any(|&i| p.branches[i].kind != BranchKind::Smooth)
            || (idx.len() == 2
                && (p.contact[idx[0]][idx[1]] > 1 || p.branches[idx[0]].curve == p.branches[idx[1]].curve));
        bad.then(|| p.id.clone())
    })
}

const RESOLUTION_LIMIT: usize = 10_000;

/// Blows up until the exceptional locus plus the support of `Δ` has simple
/// normal crossings (two branches of one curve never count as normal).
pub fn log_resolution(s: &SurfaceModel, delta: &Boundary) -> Result<LogResolution, ConfigError> {
    let mut coeffs = all_coefficients(s, delta)?;
    let mut relevant: BTreeSet<String> = s.exceptional.iter().cloned().collect();
    relevant.extend(delta.support());
    let mut over: BTreeMap<String, Option<usize>> =
        s.exceptional.iter().map(|e| (e.clone(), s.locate(e).map(|(p, _)| p))).collect();
    let mut cfg = s.config.clone();
    let mut added = Vec::new();
    while let Some(pt) = non_snc_point(&cfg, &relevant) {
        if added.len() >= RESOLUTION_LIMIT {
            return Err(ConfigError::NonFiniteContact(pt));
        }
        let p = cfg.point(&pt)?;
        if p.branches.iter().any(|b| matches!(b.kind, BranchKind::Opaque(_))) {
            return Err(ConfigError::NonFiniteContact(format!("branch of unknown shape at {pt}")));
        }
        let under = p.branches.iter().find_map(|b| over.get(&b.curve).copied().flatten());
        let name = (added.len() + 1..)
            .map(|k| format!("r{k}"))
            .find(|n| cfg.index_of(n).is_err() && cfg.point(n).is_err())
            .expect("unbounded");
        coeffs.insert(name.clone(), exceptional_coefficient(p, &coeffs));
        cfg = blow_up(&cfg, &pt, &name)?;
        relevant.insert(name.clone());
        over.insert(name.clone(), under);
        added.push(name);
    }
    let exceptional = cfg
        .curves
        .iter()
        .filter_map(|c| over.get(&c.id).map(|o| (c.id.clone(), *o)))
        .collect();
    Ok(LogResolution { config: cfg, coefficients: coeffs, exceptional, added })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairClass {
    NotLc,
    Lc,
    Lt,
    Plt,
    Klt,
}

impl PairClass {
    pub fn is_lt(self) -> bool {
        self >= PairClass::Lt
    }

    pub fn is_lc(self) -> bool {
        self >= PairClass::Lc
    }
}

/// Verdict at one point of `S`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct PointClass {
    /// Index into the singular points, or `None` for a smooth point.
    pub singular_point: Option<usize>,
    /// Exceptional divisors of the log resolution over the point.
    pub divisors: Vec<String>,
    /// Coefficient-one components of `Δ` crossing at a smooth point.
    pub crossing: Vec<String>,
    pub class: PairClass,
}

/// Classifies `K_S + Δ` at every singular point of `S`, at every smooth point
/// the log resolution blows up, and at every crossing of two coefficient-one
/// components of `Δ`.
pub fn classify_pair(s: &SurfaceModel, delta: &Boundary) -> Result<Vec<PointClass>, ConfigError> {
    let res = log_resolution(s, delta)?;
    let cfg = &res.config;
    let one = Eps::one();

    // Connected components of the exceptional locus over smooth points.
    let smooth: Vec<&String> = res.exceptional.iter().filter(|(_, o)| o.is_none()).map(|(e, _)| e).collect();
    let mut groups: Vec<(Option<usize>, Vec<String>)> =
        (0..s.singularities.len()).map(|i| (Some(i), Vec::new())).collect();
    for (e, o) in &res.exceptional {
        if let Some(p) = o {
            groups[*p].1.push(e.clone());
        }
    }
    let mut seen = BTreeSet::new();
    for start in &smooth {
        if !seen.insert((*start).clone()) {
            continue;
        }
        let mut comp = vec![(*start).clone()];
        let mut k = 0;
        while k < comp.len() {
            let i = cfg.index_of(&comp[k])?;
            for other in &smooth {
                if !seen.contains(*other) && cfg.inter[i][cfg.index_of(other)?] > 0 {
                    seen.insert((*other).clone());
                    comp.push((*other).clone());
                }
            }
            k += 1;
        }
        groups.push((None, comp));
    }

    let support = delta.support();
    let mut out = Vec::new();
    for (sp, curves) in groups {
        let idx: Vec<usize> = curves.iter().map(|e| cfg.index_of(e)).collect::<Result<_, _>>()?;
        let mut bound = Vec::new();
        for c in &support {
            let ci = cfg.index_of(c)?;
            if idx.iter().any(|&j| cfg.inter[ci][j] > 0) {
                bound.push(delta.get(c));
            }
        }
        let exc: Vec<&EpsRational> = curves.iter().map(|e| &res.coefficients[e]).collect();
        let class = if exc.iter().any(|c| **c > one) || bound.iter().any(|c| *c > one) {
            PairClass::NotLc
        } else if exc.iter().any(|c| **c >= one) {
            PairClass::Lc
        } else if bound.iter().any(|c| *c >= one) {
            PairClass::Plt
        } else {
            PairClass::Klt
        };
        out.push(PointClass { singular_point: sp, divisors: curves, crossing: Vec::new(), class });
    }

    // Normal crossings of two reduced components: lt but not plt.
    let reduced: Vec<&String> = support.iter().filter(|c| delta.get(c) >= one).collect();
    for (a, x) in reduced.iter().enumerate() {
        for y in &reduced[a + 1..] {
            let n = cfg.intersection(x, y)?;
            if n == 0 {
                continue;
            }
            let class = if delta.get(x) > one || delta.get(y) > one { PairClass::NotLc } else { PairClass::Lt };
            for _ in 0..n {
                out.push(PointClass {
                    singular_point: None,
                    divisors: Vec::new(),
                    crossing: vec![(*x).clone(), (*y).clone()],
                    class,
                });
            }
        }
    }
    Ok(out)
}

/// The worst verdict over all points.
pub fn pair_class(s: &SurfaceModel, delta: &Boundary) -> Result<PairClass, ConfigError> {
    Ok(classify_pair(s, delta)?.iter().map(|p| p.class).min().unwrap_or(PairClass::Klt))
}

/// Outcome of a flush or level test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FlushVerdict {
    pub holds: bool,
    /// `m(Δ)`.
    pub m: EpsRational,
    /// A divisor of largest coefficient and that coefficient.
    pub witness: Option<(String, EpsRational)>,
}

fn flush_like(s: &SurfaceModel, delta: &Boundary, strict: bool) -> Result<FlushVerdict, ConfigError> {
    let m = delta.m();
    let fails = |c: &EpsRational| if strict { *c >= m } else { *c > m };
    let mut best: Option<(String, EpsRational)> = None;
    let consider = |best: &mut Option<(String, EpsRational)>, name: &str, c: &EpsRational| {
        if best.as_ref().is_none_or(|(_, b)| c > b) {
            *best = Some((name.to_string(), c.clone()));
        }
    };
    for (e, c) in &exceptional_coefficients(s, delta)? {
        consider(&mut best, e, c);
    }
    if best.as_ref().is_none_or(|(_, c)| !fails(c)) {
        let res = log_resolution(s, delta)?;
        for name in &res.added {
            consider(&mut best, name, &res.coefficients[name]);
        }
    }
    let holds = best.as_ref().is_none_or(|(_, c)| !fails(c));
    Ok(FlushVerdict { holds, m, witness: best })
}

/// Every exceptional divisor has coefficient `< m(Δ)`.
pub fn is_flush(s: &SurfaceModel, delta: &Boundary) -> Result<FlushVerdict, ConfigError> {
    flush_like(s, delta, true)
}

/// Every exceptional divisor has coefficient `≤ m(Δ)`.
pub fn is_level(s: &SurfaceModel, delta: &Boundary) -> Result<FlushVerdict, ConfigError> {
    flush_like(s, delta, false)
}
