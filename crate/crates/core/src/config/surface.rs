//! Contraction to a normal surface and Mumford's rational intersection pairing.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::{ConfigError, Configuration};
use crate::exact::qi;
use crate::singularity::{ChainSingularity, DualTree, SingularityGraph, StarSingularity};
use crate::Rational;

/// Which curves `S̃ → S` contracts.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum ContractionPolicy {
    /// Every curve with `K·C ≥ 0`, except analysis curves, local curves and the listed ones.
    #[default]
    KNonNegative,
    KNonNegativeExcept(Vec<String>),
    Explicit(Vec<String>),
}

/// One singular point of the contracted surface.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SingularPoint {
    pub graph: SingularityGraph,
    /// Curves of the minimal resolution, in the vertex order of `tree`.
    pub curves: Vec<String>,
    #[serde(skip)]
    pub tree: DualTree,
    #[serde(skip)]
    pub discrepancies: Vec<Rational>,
    pub det_abs: u64,
    /// Kept curves meeting the point: (curve, vertex, intersection number on S̃).
    pub adjacency: Vec<(String, usize, i64)>,
}

impl SingularPoint {
    pub fn vertex_of(&self, curve: &str) -> Option<usize> {
        self.curves.iter().position(|c| c == curve)
    }

    /// Largest discrepancy coefficient at the point.
    pub fn coefficient(&self) -> Rational {
        self.discrepancies.iter().max().cloned().unwrap_or_else(Rational::zero)
    }

    /// Order of the local fundamental group, `|det|` of the intersection matrix.
    pub fn index(&self) -> u64 {
        self.det_abs
    }

    /// Cartier index of `K` at the point.
    pub fn cartier_index(&self) -> u64 {
        crate::singularity::denominator_lcm(&self.discrepancies)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SurfaceModel {
    pub config: Configuration,
    /// Exceptional curves of `S̃ → S`, in configuration order.
    pub exceptional: Vec<String>,
    pub singularities: Vec<SingularPoint>,
}

/// A local analytic branch of a kept curve at a singular point (or at a smooth point).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Germ {
    pub id: String,
    pub host_curve: String,
    /// Index into [`SurfaceModel::singularities`].
    pub point: Option<usize>,
    /// Exceptional curves met on the resolution with local intersection numbers.
    pub incidences: Vec<(String, i64)>,
}

impl SurfaceModel {
    pub fn is_exceptional(&self, curve: &str) -> bool {
        self.exceptional.iter().any(|c| c == curve)
    }

    pub fn kept_curves(&self) -> Vec<String> {
        self.config
            .curves
            .iter()
            .filter(|c| !self.is_exceptional(&c.id))
            .map(|c| c.id.clone())
            .collect()
    }

    /// Singular point and vertex carrying an exceptional curve.
    pub fn locate(&self, curve: &str) -> Option<(usize, usize)> {
        self.singularities
            .iter()
            .enumerate()
            .find_map(|(i, s)| s.vertex_of(curve).map(|v| (i, v)))
    }

    /// Discrepancy of an exceptional curve.
    pub fn discrepancy(&self, curve: &str) -> Option<Rational> {
        self.locate(curve).map(|(i, v)| self.singularities[i].discrepancies[v].clone())
    }

    /// Non Du Val singular points.
    pub fn non_du_val(&self) -> impl Iterator<Item = &SingularPoint> {
        self.singularities.iter().filter(|s| !s.graph.is_du_val())
    }

    /// Re-contracts the same configuration with a different exceptional set.
    pub fn with_exceptional(&self, exceptional: Vec<String>) -> Result<SurfaceModel, ConfigError> {
        contract_to_surface(&self.config, &ContractionPolicy::Explicit(exceptional))
    }

    fn point_solve(&self, p: usize, rhs: &[Rational]) -> Vec<Rational> {
        self.singularities[p].tree.solve(rhs).expect("exceptional lattice is negative definite")
    }

    /// Pullback coefficients of a divisor described by its intersection numbers
    /// with the exceptional curves.
    pub(crate) fn pullback_from(&self, dot: impl Fn(&str) -> i64) -> BTreeMap<String, Rational> {
        let mut out = BTreeMap::new();
        for (pi, s) in self.singularities.iter().enumerate() {
            let rhs: Vec<Rational> = s.curves.iter().map(|e| qi(-dot(e))).collect();
            if rhs.iter().all(Zero::is_zero) {
                continue;
            }
            for (e, c) in s.curves.iter().zip(self.point_solve(pi, &rhs)) {
                out.insert(e.clone(), c);
            }
        }
        out
    }
}

fn solve_sign_check(tree: &DualTree) -> Result<Vec<Rational>, ConfigError> {
    if !tree.is_negative_definite() {
        return Err(ConfigError::NotNegativeDefinite);
    }
    tree.discrepancies().ok_or(ConfigError::NotNegativeDefinite)
}

/// Contracts the curves selected by `policy` and recognises each connected
/// component as a log terminal chain or star.
pub fn contract_to_surface(
    cfg: &Configuration,
    policy: &ContractionPolicy,
) -> Result<SurfaceModel, ConfigError> {
    let selected: Vec<usize> = match policy {
        ContractionPolicy::Explicit(names) => {
            let mut v = names.iter().map(|n| cfg.index_of(n)).collect::<Result<Vec<_>, _>>()?;
            v.sort_unstable();
            v.dedup();
            v
        }
        ContractionPolicy::KNonNegative | ContractionPolicy::KNonNegativeExcept(_) => {
            let keep: &[String] = match policy {
                ContractionPolicy::KNonNegativeExcept(k) => k,
                _ => &[],
            };
            cfg.curves
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.analysis && !c.local && c.k_deg >= 0 && !keep.contains(&c.id))
                .map(|(i, _)| i)
                .collect()
        }
    };
    let in_set: BTreeSet<usize> = selected.iter().copied().collect();

    let mut seen = BTreeSet::new();
    let mut singularities = Vec::new();
    for &start in &selected {
        if seen.contains(&start) {
            continue;
        }
        let mut comp = vec![start];
        seen.insert(start);
        let mut k = 0;
        while k < comp.len() {
            let i = comp[k];
            for &j in &selected {
                if !seen.contains(&j) && cfg.inter[i][j] != 0 {
                    seen.insert(j);
                    comp.push(j);
                }
            }
            k += 1;
        }
        singularities.push(recognise(cfg, &comp, &in_set)?);
    }
    singularities.sort_by_key(|s| {
        s.curves.iter().map(|c| cfg.index_of(c).unwrap_or(usize::MAX)).min()
    });
    Ok(SurfaceModel {
        config: cfg.clone(),
        exceptional: selected.iter().map(|&i| cfg.curves[i].id.clone()).collect(),
        singularities,
    })
}

fn recognise(
    cfg: &Configuration,
    comp: &[usize],
    in_set: &BTreeSet<usize>,
) -> Result<SingularPoint, ConfigError> {
    let names = || comp.iter().map(|&i| cfg.curves[i].id.clone()).collect::<Vec<_>>().join(",");
    let mut adj: BTreeMap<usize, Vec<usize>> = comp.iter().map(|&i| (i, Vec::new())).collect();
    let mut edges = 0;
    for (a, &i) in comp.iter().enumerate() {
        let c = &cfg.curves[i];
        if c.self_int > -1 || (!c.local && c.k_deg != -2 - c.self_int) {
            if c.self_int >= 0 {
                return Err(ConfigError::NotNegativeDefinite);
            }
            return Err(ConfigError::UnrecognizedGraph(format!("{} is not a smooth rational curve", c.id)));
        }
        for &j in &comp[a + 1..] {
            match cfg.inter[i][j] {
                0 => {}
                1 => {
                    adj.get_mut(&i).unwrap().push(j);
                    adj.get_mut(&j).unwrap().push(i);
                    edges += 1;
                }
                _ => return Err(ConfigError::UnrecognizedGraph(names())),
            }
        }
    }
    if edges + 1 != comp.len() {
        return Err(ConfigError::UnrecognizedGraph(names()));
    }
    let weight = |i: usize| (-cfg.curves[i].self_int) as u32;
    let branch_from = |from: usize, to: usize| {
        let mut out = vec![to];
        let (mut prev, mut cur) = (from, to);
        loop {
            let next: Vec<usize> = adj[&cur].iter().copied().filter(|&x| x != prev).collect();
            match next.as_slice() {
                [] => return Some(out),
                [n] => {
                    out.push(*n);
                    prev = cur;
                    cur = *n;
                }
                _ => return None,
            }
        }
    };
    let high: Vec<usize> = comp.iter().copied().filter(|i| adj[i].len() > 2).collect();
    let (graph, order) = match high.as_slice() {
        [] => {
            let order = if comp.len() == 1 {
                vec![comp[0]]
            } else {
                let end = *comp.iter().find(|i| adj[i].len() == 1).expect("a path has an end");
                let mut o = vec![end];
                o.extend(branch_from(end, adj[&end][0]).expect("path"));
                let fwd: Vec<u32> = o.iter().map(|&i| weight(i)).collect();
                let rev: Vec<u32> = fwd.iter().rev().copied().collect();
                if rev > fwd {
                    o.reverse();
                }
                o
            };
            let w: Vec<u32> = order.iter().map(|&i| weight(i)).collect();
            (SingularityGraph::Chain(ChainSingularity::new(w)?), order)
        }
        [c] if adj[c].len() == 3 => {
            let mut arms: Vec<(Vec<u32>, Vec<usize>)> = Vec::new();
            for &n in &adj[c] {
                let arm = branch_from(*c, n).ok_or_else(|| ConfigError::UnrecognizedGraph(names()))?;
                arms.push((arm.iter().map(|&i| weight(i)).collect(), arm));
            }
            arms.sort_by(|a, b| a.0.cmp(&b.0));
            let mut order = vec![*c];
            for (_, a) in &arms {
                order.extend(a);
            }
            let b = [arms[0].0.clone(), arms[1].0.clone(), arms[2].0.clone()];
            let star = StarSingularity::new(weight(*c), b).map_err(|e| match e {
                crate::singularity::SingularityError::NotNegativeDefinite => ConfigError::NotNegativeDefinite,
                crate::singularity::SingularityError::NotLogTerminal(s) => ConfigError::NotLogTerminal(s),
                other => ConfigError::Singularity(other),
            })?;
            (SingularityGraph::Star(star), order)
        }
        _ => return Err(ConfigError::UnrecognizedGraph(names())),
    };
    let position: BTreeMap<usize, usize> = order.iter().enumerate().map(|(v, &i)| (i, v)).collect();
    let tree = DualTree {
        weights: order.iter().map(|&i| weight(i) as i64).collect(),
        edges: order
            .iter()
            .flat_map(|&i| adj[&i].iter().filter(move |&&j| i < j).map(move |&j| (i, j)))
            .map(|(i, j)| (position[&i], position[&j]))
            .collect(),
    };
    let discrepancies = solve_sign_check(&tree)?;
    if let Some(bad) = discrepancies.iter().find(|x| **x >= Rational::one()) {
        return Err(ConfigError::NotLogTerminal(format!("{} has coefficient {}", names(), crate::fmt_q(bad))));
    }
    let det_abs = tree.det().abs().to_integer().to_u64().expect("determinant fits in u64");
    let mut adjacency = Vec::new();
    for (v, &e) in order.iter().enumerate() {
        for (j, c) in cfg.curves.iter().enumerate() {
            if !in_set.contains(&j) && cfg.inter[e][j] != 0 {
                adjacency.push((c.id.clone(), v, cfg.inter[e][j]));
            }
        }
    }
    Ok(SingularPoint {
        graph,
        curves: order.iter().map(|&i| cfg.curves[i].id.clone()).collect(),
        tree,
        discrepancies,
        det_abs,
        adjacency,
    })
}

/// What to pull back: a kept curve or a single germ.
#[derive(Clone, Copy, Debug)]
pub enum PullbackTarget<'a> {
    Curve(&'a str),
    Germ(&'a Germ),
}

impl<'a> From<&'a str> for PullbackTarget<'a> {
    fn from(s: &'a str) -> Self {
        PullbackTarget::Curve(s)
    }
}

impl<'a> From<&'a Germ> for PullbackTarget<'a> {
    fn from(g: &'a Germ) -> Self {
        PullbackTarget::Germ(g)
    }
}

/// Coefficients `c` of the exceptional curves (in [`SurfaceModel::exceptional`]
/// order) such that `target + Σ c_i E_i` is trivial on every `E_j`.
pub fn mumford_pullback<'a>(
    s: &SurfaceModel,
    target: impl Into<PullbackTarget<'a>>,
) -> Result<Vec<Rational>, ConfigError> {
    let map = match target.into() {
        PullbackTarget::Curve(c) => {
            let ci = s.config.index_of(c)?;
            s.pullback_from(|e| s.config.inter_idx(ci, s.config.index_of(e).unwrap()))
        }
        PullbackTarget::Germ(g) => {
            let inc: BTreeMap<&str, i64> = g.incidences.iter().map(|(e, n)| (e.as_str(), *n)).collect();
            s.pullback_from(|e| inc.get(e).copied().unwrap_or(0))
        }
    };
    Ok(s.exceptional.iter().map(|e| map.get(e).cloned().unwrap_or_else(Rational::zero)).collect())
}

fn require_kept(s: &SurfaceModel, c: &str) -> Result<usize, ConfigError> {
    let i = s.config.index_of(c)?;
    if s.is_exceptional(c) {
        return Err(ConfigError::Unsupported(format!("a kept curve, but {c} is contracted")));
    }
    Ok(i)
}

/// `C·D` on the contracted surface.
pub fn q_intersection(s: &SurfaceModel, c: &str, d: &str) -> Result<Rational, ConfigError> {
    let ci = require_kept(s, c)?;
    let di = require_kept(s, d)?;
    if ci == di && s.config.curves[ci].local {
        return Err(ConfigError::Unsupported(format!("global data for {c}")));
    }
    let pull = mumford_pullback(s, c)?;
    let mut x = qi(s.config.inter_idx(ci, di));
    for (e, cv) in s.exceptional.iter().zip(&pull) {
        if !cv.is_zero() {
            x += cv.clone() * qi(s.config.inter_idx(s.config.index_of(e)?, di));
        }
    }
    Ok(x)
}

pub fn q_self(s: &SurfaceModel, c: &str) -> Result<Rational, ConfigError> {
    q_intersection(s, c, c)
}

/// `K_S·C` for a kept curve.
pub fn k_dot(s: &SurfaceModel, c: &str) -> Result<Rational, ConfigError> {
    let ci = require_kept(s, c)?;
    if s.config.curves[ci].local {
        return Err(ConfigError::Unsupported(format!("global data for {c}")));
    }
    let mut x = qi(s.config.curves[ci].k_deg);
    for sp in &s.singularities {
        for (e, d) in sp.curves.iter().zip(&sp.discrepancies) {
            let n = s.config.inter_idx(s.config.index_of(e)?, ci);
            if n != 0 {
                x += d.clone() * qi(n);
            }
        }
    }
    Ok(x)
}

/// `K_S^2 = K_{S̃}^2 + Σ e_i K·E_i`.
pub fn k_squared(s: &SurfaceModel) -> Result<Rational, ConfigError> {
    let k2 = s
        .config
        .k_squared_smooth
        .ok_or_else(|| ConfigError::Unsupported("a surface with known K^2".into()))?;
    let mut x = qi(k2);
    for sp in &s.singularities {
        for (w, d) in sp.tree.weights.iter().zip(&sp.discrepancies) {
            x += d.clone() * qi(w - 2);
        }
    }
    Ok(x)
}

/// Local branches of a kept curve at the singular points it passes through.
pub fn germs_of(s: &SurfaceModel, curve: &str) -> Result<Vec<Germ>, ConfigError> {
    let ci = require_kept(s, curve)?;
    let mut out = Vec::new();
    for (pi, sp) in s.singularities.iter().enumerate() {
        let mut tracked: BTreeMap<&str, i64> = BTreeMap::new();
        for p in &s.config.points {
            for (bi, b) in p.branches.iter().enumerate() {
                if b.curve != curve {
                    continue;
                }
                let inc: Vec<(String, i64)> = p
                    .branches
                    .iter()
                    .enumerate()
                    .filter(|(_, o)| sp.vertex_of(&o.curve).is_some())
                    .map(|(oi, o)| (o.curve.clone(), p.contact[bi][oi]))
                    .collect();
                if inc.is_empty() {
                    continue;
                }
                for (e, n) in &inc {
                    *tracked.entry(sp.curves[sp.vertex_of(e).unwrap()].as_str()).or_default() += n;
                }
                out.push(Germ {
                    id: format!("{curve}@{}#{}", p.id, out.len() + 1),
                    host_curve: curve.to_string(),
                    point: Some(pi),
                    incidences: inc,
                });
            }
        }
        for e in &sp.curves {
            let total = s.config.inter_idx(ci, s.config.index_of(e)?);
            let rest = total - tracked.get(e.as_str()).copied().unwrap_or(0);
            for _ in 0..rest.max(0) {
                out.push(Germ {
                    id: format!("{curve}@{e}#{}", out.len() + 1),
                    host_curve: curve.to_string(),
                    point: Some(pi),
                    incidences: vec![(e.clone(), 1)],
                });
            }
        }
    }
    Ok(out)
}

/// Local Cartier index of a germ: the lcm of the denominators of its pullback.
pub fn branch_index(s: &SurfaceModel, g: &Germ) -> Result<u64, ConfigError> {
    let mut points = g.incidences.iter().filter_map(|(e, _)| s.locate(e).map(|(p, _)| p));
    let Some(first) = points.next() else {
        return Ok(1);
    };
    if points.any(|p| p != first) {
        return Err(ConfigError::MultiplePoints);
    }
    let pull = mumford_pullback(s, g)?;
    let l = pull
        .iter()
        .fold(num_bigint::BigInt::one(), |acc, x| acc.lcm(x.denom()));
    Ok(l.to_u64().expect("index fits in u64"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_program;
    use crate::q;

    #[test]
    fn bare_plane() {
        let prog = parse_program("surface P2\ncurve L degree 1\n").unwrap();
        let s = prog.surface().unwrap();
        assert!(s.exceptional.is_empty());
        assert_eq!(k_squared(&s).unwrap(), qi(9));
        assert_eq!(k_dot(&s, "L").unwrap(), qi(-3));
        assert_eq!(q_self(&s, "L").unwrap(), qi(1));
    }

    #[test]
    fn germ_on_three_curve() {
        let prog = parse_program("surface abstract K2 0\ncurve E self -3 kdeg 1\ncurve C self -1 kdeg -1\nmeet E C 1\n").unwrap();
        let s = prog.surface().unwrap();
        let g = germs_of(&s, "C").unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(mumford_pullback(&s, &g[0]).unwrap(), vec![q(1, 3)]);
        assert_eq!(branch_index(&s, &g[0]).unwrap(), 3);
        assert_eq!(k_dot(&s, "C").unwrap(), q(-2, 3));
    }
}
