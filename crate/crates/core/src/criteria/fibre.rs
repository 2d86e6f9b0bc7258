//! Singular fibres of `P^1`-fibrations over a curve germ, built by blowing up
//! a smooth fibre, and the catalogue of multiple fibres with small coefficient.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::config::{contract_to_surface, BaseSurface, Configuration, ContractionPolicy, Curve, Origin, SurfaceModel};
use crate::singularity::DualTree;
use crate::{q, Rational};

/// A fibre of a ruled surface after blow-ups, with its unique `(-1)`-curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FibreModel {
    /// `-C²` of each component.
    pub weights: Vec<i64>,
    pub multiplicities: Vec<i64>,
    pub edges: BTreeSet<(usize, usize)>,
    pub sigma: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum FibreBlowup {
    /// At the point where the `(-1)`-curve meets component `i`.
    Neighbour(usize),
    /// At a point of the `(-1)`-curve on no other component.
    Interior,
}

/// Status of `K_T + G` at the singular points along `G`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum LtStatus {
    Nowhere,
    Partly,
    Everywhere,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FibreEntry {
    /// Singular points along `G`, canonically written, `'` marking contact with `G`.
    pub points: Vec<String>,
    pub multiplicity: i64,
    pub lt: LtStatus,
    #[serde(serialize_with = "crate::exact::ser_q")]
    pub coefficient: Rational,
    /// `m(-a) + ...` along the fibre when it is a chain.
    pub fibre: Option<String>,
    pub blowups: Vec<FibreBlowup>,
}

fn edge(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

impl FibreModel {
    /// `(-2) + 2(-1) + (-2)`, the first fibre with a unique `(-1)`-curve.
    pub fn start() -> Self {
        FibreModel {
            weights: vec![2, 1, 2],
            multiplicities: vec![1, 2, 1],
            edges: [(0, 1), (1, 2)].into_iter().collect(),
            sigma: 1,
        }
    }

    pub fn neighbours(&self, v: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| if a == v { Some(b) } else if b == v { Some(a) } else { None })
            .collect()
    }

    pub fn blow_up(&self, b: FibreBlowup) -> Option<Self> {
        let mut f = self.clone();
        let s = self.sigma;
        let n = f.weights.len();
        match b {
            FibreBlowup::Neighbour(j) => {
                if !self.edges.contains(&edge(s, j)) {
                    return None;
                }
                f.edges.remove(&edge(s, j));
                f.weights[j] += 1;
                f.multiplicities.push(self.multiplicities[s] + self.multiplicities[j]);
                f.edges.insert(edge(j, n));
            }
            FibreBlowup::Interior => f.multiplicities.push(self.multiplicities[s]),
        }
        f.weights[s] += 1;
        f.weights.push(1);
        f.edges.insert(edge(s, n));
        f.sigma = n;
        Some(f)
    }

    pub fn moves(&self) -> Vec<FibreBlowup> {
        let mut v: Vec<FibreBlowup> = self.neighbours(self.sigma).into_iter().map(FibreBlowup::Neighbour).collect();
        v.push(FibreBlowup::Interior);
        v
    }

    /// The fibre is numerically trivial on every component.
    pub fn is_fibre(&self) -> bool {
        (0..self.weights.len()).all(|i| {
            let s: i64 = self.neighbours(i).iter().map(|&j| self.multiplicities[j]).sum();
            s == self.weights[i] * self.multiplicities[i]
        })
    }

    fn name(i: usize) -> String {
        format!("F{i}")
    }

    pub fn configuration(&self) -> Configuration {
        let mut cfg = Configuration::new(BaseSurface::Local);
        for (i, w) in self.weights.iter().enumerate() {
            cfg.add_curve(Curve {
                id: Self::name(i),
                self_int: -w,
                k_deg: w - 2,
                origin: Origin::Declared,
                analysis: false,
                local: false,
            })
            .expect("fresh names");
        }
        for &(a, b) in &self.edges {
            cfg.set_intersection(&Self::name(a), &Self::name(b), 1).expect("declared");
        }
        cfg
    }

    /// Contracts every component but the `(-1)`-curve.
    pub fn surface(&self) -> Option<SurfaceModel> {
        let others = (0..self.weights.len()).filter(|&i| i != self.sigma).map(Self::name).collect();
        contract_to_surface(&self.configuration(), &ContractionPolicy::Explicit(others)).ok()
    }

    fn chain_order(&self) -> Option<Vec<usize>> {
        let ends: Vec<usize> = (0..self.weights.len()).filter(|&i| self.neighbours(i).len() == 1).collect();
        if ends.len() != 2 || self.edges.len() + 1 != self.weights.len() {
            return None;
        }
        let mut order = vec![ends[0]];
        while order.len() < self.weights.len() {
            let last = *order.last().unwrap();
            let next = self.neighbours(last).into_iter().find(|v| !order.contains(v))?;
            order.push(next);
        }
        Some(order)
    }

    pub fn fibre_string(&self) -> Option<String> {
        let order = self.chain_order()?;
        let parts: Vec<String> = order
            .iter()
            .map(|&i| match self.multiplicities[i] {
                1 => format!("(-{})", self.weights[i]),
                m => format!("{m}(-{})", self.weights[i]),
            })
            .collect();
        Some(parts.join(" + "))
    }
}

fn token(w: i64, marked: bool) -> String {
    if marked {
        format!("{w}'")
    } else {
        w.to_string()
    }
}

/// A chain written in the lexicographically smaller orientation.
pub fn marked_chain(parts: &[(i64, bool)]) -> String {
    let fwd: Vec<String> = parts.iter().map(|&(w, m)| token(w, m)).collect();
    let rev: Vec<String> = fwd.iter().rev().cloned().collect();
    format!("({})", fwd.join(",").min(rev.join(",")))
}

/// A star with centre weight `c` and branches listed outward.
pub fn marked_star(c: (i64, bool), branches: &[Vec<(i64, bool)>]) -> String {
    let mut b: Vec<String> =
        branches.iter().map(|br| br.iter().map(|&(w, m)| token(w, m)).collect::<Vec<_>>().join(",")).collect();
    b.sort();
    format!("star({}; {})", token(c.0, c.1), b.join(" | "))
}

fn describe_tree(t: &DualTree, marked: &BTreeSet<usize>) -> String {
    let n = t.len();
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in &t.edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let part = |i: usize| (t.weights[i], marked.contains(&i));
    let walk = |from: usize, to: usize| {
        let mut out = vec![part(to)];
        let (mut prev, mut cur) = (from, to);
        while let Some(&next) = adj[cur].iter().find(|&&x| x != prev) {
            out.push(part(next));
            prev = cur;
            cur = next;
        }
        out
    };
    match (0..n).find(|&i| adj[i].len() > 2) {
        Some(c) => {
            let branches: Vec<Vec<(i64, bool)>> = adj[c].iter().map(|&b| walk(c, b)).collect();
            marked_star(part(c), &branches)
        }
        None => {
            let start = (0..n).find(|&i| adj[i].len() <= 1).expect("a chain has an end");
            let mut parts = vec![part(start)];
            if let Some(&nb) = adj[start].first() {
                parts.extend(walk(start, nb));
            }
            marked_chain(&parts)
        }
    }
}

/// Singular points of `T` along the fibre, multiplicity, and lt status of `K_T + G`.
pub fn fibre_entry(f: &FibreModel, blowups: &[FibreBlowup]) -> Option<FibreEntry> {
    let s = f.surface()?;
    let g = FibreModel::name(f.sigma);
    let mut points = Vec::new();
    let mut lt_count = 0;
    for sp in &s.singularities {
        let marks: Vec<(usize, i64)> =
            sp.adjacency.iter().filter(|(c, _, _)| *c == g).map(|(_, v, n)| (*v, *n)).collect();
        let marked: BTreeSet<usize> = marks.iter().map(|m| m.0).collect();
        points.push(describe_tree(&sp.tree, &marked));
        let ends = |v: usize| sp.tree.edges.iter().filter(|&&(a, b)| a == v || b == v).count() <= 1;
        let is_chain = sp.tree.edges.len() + 1 == sp.tree.len()
            && (0..sp.tree.len()).all(|v| sp.tree.edges.iter().filter(|&&(a, b)| a == v || b == v).count() <= 2);
        if is_chain && marks.len() == 1 && marks[0].1 == 1 && ends(marks[0].0) {
            lt_count += 1;
        }
    }
    points.sort();
    let lt = if lt_count == s.singularities.len() {
        LtStatus::Everywhere
    } else if lt_count == 0 {
        LtStatus::Nowhere
    } else {
        LtStatus::Partly
    };
    let coefficient = s.singularities.iter().map(|p| p.coefficient()).max().unwrap_or_default();
    Some(FibreEntry {
        points,
        multiplicity: f.multiplicities[f.sigma],
        lt,
        coefficient,
        fibre: f.fibre_string(),
        blowups: blowups.to_vec(),
    })
}

/// Every fibre reachable from `(-2) + 2(-1) + (-2)` by at most `max_blowups`
/// further blow-ups, keyed by its point description and multiplicity.
pub fn all_fibres(max_blowups: usize) -> BTreeMap<(Vec<String>, i64), FibreEntry> {
    let mut out = BTreeMap::new();
    let mut frontier = vec![(FibreModel::start(), Vec::new())];
    for depth in 0..=max_blowups {
        let mut next = Vec::new();
        for (f, path) in frontier {
            if let Some(e) = fibre_entry(&f, &path) {
                out.entry((e.points.clone(), e.multiplicity)).or_insert(e);
            }
            if depth < max_blowups {
                for m in f.moves() {
                    let g = f.blow_up(m).expect("legal move");
                    let mut p = path.clone();
                    p.push(m);
                    next.push((g, p));
                }
            }
        }
        frontier = next;
    }
    out
}

fn du_val_or_almost(p: &str) -> bool {
    if p.starts_with("star") {
        return false;
    }
    let ws: Vec<&str> = p.trim_matches(|c| c == '(' || c == ')').split(',').map(|t| t.trim_end_matches('\'')).collect();
    let threes = ws.iter().filter(|w| **w == "3").count();
    let others = ws.iter().all(|w| *w == "2" || *w == "3");
    others && (threes == 0 || (threes == 1 && (ws[0] == "3" || ws[ws.len() - 1] == "3")))
}

/// Multiple fibres on a log terminal `T` with `e(T) < 2/3` containing a Du
/// Val or almost Du Val cyclic point, up to `max_blowups` blow-ups.
pub fn fibre_catalogue(max_blowups: usize) -> Vec<FibreEntry> {
    all_fibres(max_blowups)
        .into_values()
        .filter(|e| e.multiplicity >= 2 && e.coefficient < q(2, 3) && e.points.iter().any(|p| du_val_or_almost(p)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_fibres() {
        let f = FibreModel::start();
        assert!(f.is_fibre());
        let e = fibre_entry(&f, &[]).unwrap();
        assert_eq!(e.points, vec!["(2')", "(2')"]);
        assert_eq!(e.multiplicity, 2);
        assert_eq!(e.lt, LtStatus::Everywhere);
        let g = f.blow_up(FibreBlowup::Interior).unwrap();
        assert!(g.is_fibre());
        let e = fibre_entry(&g, &[FibreBlowup::Interior]).unwrap();
        assert_eq!(e.points, vec!["(2,2',2)"]);
        assert_eq!(e.lt, LtStatus::Nowhere);
    }
}
