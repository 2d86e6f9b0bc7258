//! Enumeration of log terminal graphs by coefficient and by index.
//!
//! Growth steps (raising a weight, appending a vertex) strictly increase the
//! index and every coefficient, so depth-first search can prune as soon as a
//! bound is crossed.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use super::{chain_index_of, ChainSingularity, SingularityError, SingularityGraph, StarSingularity};
use crate::exact::q;
use crate::Rational;

/// Default cap on chain indices (and star branch indices) for infinite families.
pub const DEFAULT_INDEX_CAP: u64 = 200;
/// Largest index accepted by [`enumerate_small_index`].
pub const SMALL_INDEX_GUARD: i64 = 30;

fn coefficient_of(weights: &[i64], edges: &[(usize, usize)]) -> Option<Rational> {
    let t = super::DualTree { weights: weights.to_vec(), edges: edges.to_vec() };
    if !t.is_negative_definite() {
        return None;
    }
    t.discrepancies()?.into_iter().max()
}

fn chain_coefficient(w: &[u32]) -> Rational {
    super::DualTree::chain(w)
        .discrepancies()
        .expect("chains are negative definite")
        .into_iter()
        .max()
        .unwrap_or_else(Rational::zero)
}

/// All chains up to reversal with index at most `max_index`, optionally only
/// those with coefficient strictly below `bound`. Du Val chains are included.
pub fn lt_chains(max_index: u64, bound: Option<&Rational>) -> Vec<Vec<u32>> {
    let mut out = BTreeSet::new();
    let mut stack = vec![vec![2u32]];
    while let Some(w) = stack.pop() {
        if chain_index_of(&w) > max_index {
            continue;
        }
        let du_val = w.iter().all(|&x| x == 2);
        if !du_val {
            if let Some(b) = bound {
                if chain_coefficient(&w) >= *b {
                    continue;
                }
            }
        }
        let mut r = w.clone();
        r.reverse();
        out.insert(if r < w { r } else { w.clone() });
        let mut raised = w.clone();
        *raised.last_mut().unwrap() += 1;
        stack.push(raised);
        let mut longer = w;
        longer.push(2);
        stack.push(longer);
    }
    out.into_iter().collect()
}

/// All log terminal stars with centre weight at most `max_center` and branch
/// indices at most `max_branch_index`, optionally with coefficient below `bound`.
pub fn lt_stars(max_center: u32, max_branch_index: u64, bound: Option<&Rational>) -> Vec<StarSingularity> {
    let mut seen: HashSet<(u32, [Vec<u32>; 3])> = HashSet::new();
    let mut out = BTreeSet::new();
    let mut stack = vec![(2u32, [vec![2u32], vec![2], vec![2]])];
    while let Some((c, b)) = stack.pop() {
        let mut key = b.clone();
        key.sort();
        if c > max_center || !seen.insert((c, key)) {
            continue;
        }
        if b.iter().any(|x| chain_index_of(x) > max_branch_index) {
            continue;
        }
        let r: Vec<u64> = b.iter().map(|x| chain_index_of(x)).collect();
        let inv = r.iter().fold(Rational::zero(), |a, &ri| a + q(1, ri as i64));
        if inv <= Rational::one() {
            continue;
        }
        let Ok(s) = StarSingularity::unchecked(c, b.clone()) else { continue };
        let t = s.tree();
        let Some(e) = coefficient_of(&t.weights, &t.edges) else { continue };
        if e >= Rational::one() {
            continue;
        }
        if let Some(bd) = bound {
            if !s.is_du_val() && e >= *bd {
                continue;
            }
        }
        out.insert(s);
        stack.push((c + 1, b.clone()));
        for i in 0..3 {
            let mut raised = b.clone();
            *raised[i].last_mut().unwrap() += 1;
            stack.push((c, raised));
            let mut longer = b.clone();
            longer[i].push(2);
            stack.push((c, longer));
        }
    }
    out.into_iter().collect()
}

/// Non Du Val chains of index at most `n`, up to reversal.
///
/// Stars are not returned: the smallest non-chain point other than `D_4` has
/// local fundamental group of order at least 16, and star group orders are
/// not computed here.
pub fn enumerate_small_index(n: i64) -> Result<Vec<ChainSingularity>, SingularityError> {
    if n > SMALL_INDEX_GUARD {
        return Err(SingularityError::GuardExceeded { got: n, max: SMALL_INDEX_GUARD });
    }
    if n < 2 {
        return Ok(Vec::new());
    }
    Ok(lt_chains(n as u64, None)
        .into_iter()
        .filter(|w| w.iter().any(|&x| x != 2))
        .map(|w| ChainSingularity::new(w).expect("weights are at least 2"))
        .collect())
}

/// Position of a coefficient relative to one half.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Stratum {
    BelowHalf,
    Half,
    AboveHalf,
}

impl Stratum {
    fn of(e: &Rational) -> Self {
        let h = q(1, 2);
        if *e < h {
            Stratum::BelowHalf
        } else if *e == h {
            Stratum::Half
        } else {
            Stratum::AboveHalf
        }
    }
}

/// A one-parameter family: `template` contains `A_j`, a run of `j` curves of weight 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CoefficientFamily {
    pub template: String,
    pub j_min: u32,
    /// `None` when the family continues up to the index cap.
    pub j_max: Option<u32>,
    /// `(a, b, c, d)` with coefficient `(a j + b) / (c j + d)`, where the
    /// denominator is the index (chains) or `|det|` (stars).
    pub closed_form: Option<[i64; 4]>,
    pub stratum: Stratum,
    #[serde(skip)]
    pub members: Vec<(u32, SingularityGraph, Rational)>,
}

impl CoefficientFamily {
    pub fn closed_form_string(&self) -> Option<String> {
        let [a, b, c, d] = self.closed_form?;
        let lin = |x: i64, y: i64| -> String {
            match (x, y) {
                (0, y) => y.to_string(),
                (x, 0) => format!("{}j", coef(x)),
                (x, y) if y < 0 => format!("{}j-{}", coef(x), -y),
                (x, y) => format!("{}j+{}", coef(x), y),
            }
        };
        fn coef(x: i64) -> String {
            match x {
                1 => String::new(),
                -1 => "-".into(),
                x => x.to_string(),
            }
        }
        if a * d == b * c {
            let e = if d != 0 { q(b, d) } else { q(a, c) };
            return Some(crate::fmt_q(&e));
        }
        Some(format!("({})/({})", lin(a, b), lin(c, d)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum EnumerationEntry {
    Family(CoefficientFamily),
    Sporadic { graph: SingularityGraph, coefficient: String, stratum: Stratum },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Skeleton {
    Chain(Vec<u32>),
    Star(u32, [Vec<u32>; 3]),
}

/// Splits a weight sequence into its non-2 weights and the runs of 2s around them.
fn split_runs(w: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let mut big = Vec::new();
    let mut runs = vec![0];
    for &x in w {
        if x == 2 {
            *runs.last_mut().unwrap() += 1;
        } else {
            big.push(x);
            runs.push(0);
        }
    }
    (big, runs)
}

fn join_runs(big: &[u32], runs: &[u32]) -> Vec<u32> {
    let mut w = Vec::new();
    for (i, &r) in runs.iter().enumerate() {
        w.extend(std::iter::repeat_n(2, r as usize));
        if i < big.len() {
            w.push(big[i]);
        }
    }
    w
}

fn orientations(g: &SingularityGraph) -> Vec<(Skeleton, Vec<u32>)> {
    match g {
        SingularityGraph::Smooth => vec![],
        SingularityGraph::Chain(c) => {
            let mut w = c.weights().to_vec();
            let (b1, r1) = split_runs(&w);
            w.reverse();
            let (b2, r2) = split_runs(&w);
            vec![(Skeleton::Chain(b1), r1), (Skeleton::Chain(b2), r2)]
        }
        SingularityGraph::Star(s) => {
            let b = s.branches();
            const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
            PERMS
                .iter()
                .map(|p| {
                    let mut bigs: [Vec<u32>; 3] = Default::default();
                    let mut runs = Vec::new();
                    for (k, &i) in p.iter().enumerate() {
                        let (bg, rn) = split_runs(&b[i]);
                        bigs[k] = bg;
                        runs.extend(rn);
                    }
                    (Skeleton::Star(s.center(), bigs), runs)
                })
                .collect()
        }
    }
}

fn compose(sk: &Skeleton, runs: &[u32]) -> Option<SingularityGraph> {
    match sk {
        Skeleton::Chain(big) => {
            let w = join_runs(big, runs);
            ChainSingularity::new(w).ok().map(SingularityGraph::Chain)
        }
        Skeleton::Star(c, bigs) => {
            let mut off = 0;
            let mut br: [Vec<u32>; 3] = Default::default();
            for k in 0..3 {
                let n = bigs[k].len() + 1;
                br[k] = join_runs(&bigs[k], &runs[off..off + n]);
                off += n;
            }
            StarSingularity::unchecked(*c, br).ok().map(SingularityGraph::Star)
        }
    }
}

fn render(sk: &Skeleton, runs: &[u32], slot: usize) -> String {
    let seq = |big: &[u32], rn: &[u32], var: Option<usize>| -> String {
        let mut parts: Vec<String> = Vec::new();
        for (i, &r) in rn.iter().enumerate() {
            if Some(i) == var {
                parts.push("A_j".into());
            } else {
                parts.extend(std::iter::repeat_n("2".to_string(), r as usize));
            }
            if i < big.len() {
                parts.push(big[i].to_string());
            }
        }
        parts.join(",")
    };
    match sk {
        Skeleton::Chain(big) => format!("({})", seq(big, runs, Some(slot))),
        Skeleton::Star(c, bigs) => {
            let mut off = 0;
            let mut b = Vec::new();
            for big in bigs {
                let n = big.len() + 1;
                let var = (slot >= off && slot < off + n).then(|| slot - off);
                b.push(seq(big, &runs[off..off + n], var));
                off += n;
            }
            format!("star({}; {})", c, b.join(" | "))
        }
    }
}

fn exceeds_cap(g: &SingularityGraph, cap: u64) -> bool {
    match g {
        SingularityGraph::Smooth => false,
        SingularityGraph::Chain(c) => c.index() > cap,
        SingularityGraph::Star(s) => s.branch_indices().iter().any(|&r| r > cap),
    }
}

fn denominator(g: &SingularityGraph) -> i64 {
    match g {
        SingularityGraph::Chain(c) => c.index() as i64,
        other => super::discrepancies(other).expect("lt graph").det_abs as i64,
    }
}

fn fit_closed_form(members: &[(u32, SingularityGraph, Rational)]) -> Option<[i64; 4]> {
    if members.len() < 2 {
        return None;
    }
    let pts: Vec<(i64, i64, i64)> = members
        .iter()
        .map(|(j, g, e)| {
            let d = denominator(g);
            let n = e.clone() * crate::exact::qi(d);
            (*j as i64, n.to_integer().to_i64().expect("small numerator"), d)
        })
        .collect();
    let (j0, n0, d0) = pts[0];
    let (j1, n1, d1) = pts[1];
    let dj = j1 - j0;
    if (n1 - n0) % dj != 0 || (d1 - d0) % dj != 0 {
        return None;
    }
    let a = (n1 - n0) / dj;
    let c = (d1 - d0) / dj;
    let b = n0 - a * j0;
    let d = d0 - c * j0;
    pts.iter()
        .all(|&(j, n, dd)| a * j + b == n && c * j + d == dd)
        .then_some([a, b, c, d])
}

struct Line {
    skeleton: Skeleton,
    runs: Vec<u32>,
    slot: usize,
    values: BTreeMap<u32, usize>,
    open_ended: bool,
}

/// Every non Du Val log terminal graph with coefficient below `bound`,
/// grouped into one-parameter families and sporadic members, and split into
/// strata relative to one half. Families are followed up to index
/// [`DEFAULT_INDEX_CAP`].
pub fn enumerate_small_coefficient(bound: &Rational) -> Result<Vec<EnumerationEntry>, SingularityError> {
    enumerate_small_coefficient_capped(bound, DEFAULT_INDEX_CAP)
}

pub fn enumerate_small_coefficient_capped(
    bound: &Rational,
    cap: u64,
) -> Result<Vec<EnumerationEntry>, SingularityError> {
    if *bound > q(3, 5) {
        return Err(SingularityError::CoefficientBound(crate::fmt_q(bound)));
    }
    let mut members: Vec<(SingularityGraph, Rational)> = Vec::new();
    for w in lt_chains(cap, Some(bound)) {
        if w.iter().all(|&x| x == 2) {
            continue;
        }
        let e = chain_coefficient(&w);
        members.push((SingularityGraph::Chain(ChainSingularity::new(w).unwrap()), e));
    }
    for s in lt_stars(u32::MAX, cap, Some(bound)) {
        if s.is_du_val() {
            continue;
        }
        let e = super::star_coefficient(&s)?;
        members.push((SingularityGraph::Star(s), e));
    }
    let mut lines: BTreeMap<(Skeleton, usize, Vec<u32>), Line> = BTreeMap::new();
    for (id, (g, _)) in members.iter().enumerate() {
        for (sk, runs) in orientations(g) {
            for slot in 0..runs.len() {
                let mut key_runs = runs.clone();
                key_runs[slot] = 0;
                let line = lines.entry((sk.clone(), slot, key_runs.clone())).or_insert_with(|| Line {
                    skeleton: sk.clone(),
                    runs: key_runs,
                    slot,
                    values: BTreeMap::new(),
                    open_ended: false,
                });
                line.values.insert(runs[slot], id);
            }
        }
    }
    for line in lines.values_mut() {
        let top = *line.values.keys().next_back().unwrap();
        let mut runs = line.runs.clone();
        runs[line.slot] = top + 1;
        line.open_ended = compose(&line.skeleton, &runs).is_some_and(|g| exceeds_cap(&g, cap));
    }

    let mut covered = vec![false; members.len()];
    let mut raw_families: Vec<(String, Vec<(u32, usize)>, bool)> = Vec::new();
    loop {
        // Longest run of consecutive uncovered values on each line.
        let mut best: Option<(bool, usize, usize, String, Vec<(u32, usize)>)> = None;
        for line in lines.values() {
            let mut segs: Vec<Vec<(u32, usize)>> = Vec::new();
            let mut cur: Vec<(u32, usize)> = Vec::new();
            for (&v, &id) in &line.values {
                if covered[id] {
                    if !cur.is_empty() {
                        segs.push(std::mem::take(&mut cur));
                    }
                    continue;
                }
                if cur.last().is_some_and(|&(pv, _)| pv + 1 != v) {
                    segs.push(std::mem::take(&mut cur));
                }
                cur.push((v, id));
            }
            if !cur.is_empty() {
                segs.push(cur);
            }
            let top = *line.values.keys().next_back().unwrap();
            let seg_open = |s: &Vec<(u32, usize)>| line.open_ended && s.last().is_some_and(|x| x.0 == top);
            let Some(best_seg) = segs.into_iter().max_by_key(|s| (seg_open(s), s.len())) else {
                continue;
            };
            if best_seg.len() < 2 {
                continue;
            }
            let open = seg_open(&best_seg);
            let template = render(&line.skeleton, &line.runs, line.slot);
            let rightmost = line.runs.len() - 1 - line.slot;
            let cand = (open, best_seg.len(), rightmost, template, best_seg);
            let better = match &best {
                None => true,
                Some(b) => (cand.0, cand.1, std::cmp::Reverse(cand.2), std::cmp::Reverse(&cand.3))
                    > (b.0, b.1, std::cmp::Reverse(b.2), std::cmp::Reverse(&b.3)),
            };
            if better {
                best = Some(cand);
            }
        }
        let Some((open, _, _, template, seg)) = best else { break };
        for &(_, id) in &seg {
            covered[id] = true;
        }
        raw_families.push((template, seg, open));
    }

    let mut out = Vec::new();
    for (template, seg, open) in raw_families {
        let mut i = 0;
        while i < seg.len() {
            let st = Stratum::of(&members[seg[i].1].1);
            let mut k = i;
            while k + 1 < seg.len() && Stratum::of(&members[seg[k + 1].1].1) == st {
                k += 1;
            }
            let part = &seg[i..=k];
            if part.len() == 1 {
                covered[part[0].1] = false;
            } else {
                let ms: Vec<(u32, SingularityGraph, Rational)> = part
                    .iter()
                    .map(|&(j, id)| (j, members[id].0.clone(), members[id].1.clone()))
                    .collect();
                let last = k + 1 == seg.len();
                out.push(EnumerationEntry::Family(CoefficientFamily {
                    template: template.clone(),
                    j_min: part[0].0,
                    j_max: if open && last { None } else { Some(part[part.len() - 1].0) },
                    closed_form: fit_closed_form(&ms),
                    stratum: st,
                    members: ms,
                }));
            }
            i = k + 1;
        }
    }
    for (id, (g, e)) in members.iter().enumerate() {
        if !covered[id] {
            out.push(EnumerationEntry::Sporadic {
                graph: g.clone(),
                coefficient: crate::fmt_q(e),
                stratum: Stratum::of(e),
            });
        }
    }
    Ok(out)
}

/// Four indices `(a, b, c, m)`, `3 <= a <= b <= c <= m`, with `Σ (r-1)/r <= 3`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BogomolovFamily {
    pub prefix: [u64; 3],
    pub m_min: u64,
    /// `None` for an unbounded family.
    pub m_max: Option<u64>,
}

pub fn bogomolov_tuples() -> Vec<BogomolovFamily> {
    let one = Rational::one();
    let mut out = Vec::new();
    for a in 3..=4u64 {
        for b in a..=12 {
            for c in b..=24 {
                let s = q(1, a as i64) + q(1, b as i64) + q(1, c as i64);
                if s.clone() + q(1, c as i64) < one {
                    continue;
                }
                if s >= one {
                    out.push(BogomolovFamily { prefix: [a, b, c], m_min: c, m_max: None });
                    continue;
                }
                let m_max = (one.clone() / (one.clone() - s)).floor().to_integer().to_u64().unwrap();
                if m_max >= c {
                    out.push(BogomolovFamily { prefix: [a, b, c], m_min: c, m_max: Some(m_max) });
                }
            }
        }
    }
    out
}
