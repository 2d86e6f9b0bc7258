//! Smooth surface models built by blowing up points, with exact intersection
//! bookkeeping and the passage to a normal surface by contracting curves.

mod pair;
mod program;
mod report;
mod surface;

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub use pair::{
    classify_pair, coefficient_of, exceptional_coefficients, is_flush, is_level, log_pullback, log_resolution, pair_class, Boundary,
    DivisorSpec, FlushVerdict, LogResolution, PairClass, PointClass,
};
pub use program::{parse_program, BlowupProgram, Instruction, PointRef};
pub use report::{surface_report, CurveReport, GermReport, SingularityReport, SurfaceReport};
pub use surface::{
    branch_index, contract_to_surface, germs_of, k_dot, k_squared, mumford_pullback, q_intersection,
    q_self, ContractionPolicy, Germ, PullbackTarget, SingularPoint, SurfaceModel,
};

use crate::singularity::SingularityError;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown curve `{0}`")]
    UnknownCurve(String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("contact between {0} and {1} exceeds their intersection number")]
    ContactExceedsIntersection(String, String),
    #[error("inconsistent blow-up center: {0}")]
    InconsistentCenter(String),
    #[error("`{0}` is not a (-1)-curve")]
    NotMinusOne(String),
    #[error("exceptional locus is not negative definite")]
    NotNegativeDefinite,
    #[error("singular point is not log terminal: {0}")]
    NotLogTerminal(String),
    #[error("exceptional component is neither a chain nor a star: {0}")]
    UnrecognizedGraph(String),
    #[error("germ meets more than one singular point")]
    MultiplePoints,
    #[error("contact data does not resolve: {0}")]
    NonFiniteContact(String),
    #[error("operation needs {0}")]
    Unsupported(String),
    #[error(transparent)]
    Singularity(#[from] SingularityError),
}

/// How a curve arose.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Origin {
    Plane,
    Declared,
    ExceptionalOfBlowup(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Curve {
    pub id: String,
    pub self_int: i64,
    pub k_deg: i64,
    pub origin: Origin,
    /// Curves flagged for analysis are never contracted by the default policy.
    pub analysis: bool,
    /// Only local contact data is meaningful (self-intersection and K-degree are not).
    pub local: bool,
}

/// Local shape of one analytic branch at a tracked point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum BranchKind {
    Smooth,
    /// Simple singular branch `y^2 = x^(2g+1)`; multiplicity 2, resolved by `g` blow-ups.
    Cusp(u32),
    /// Branch of the given multiplicity that the engine cannot follow through a blow-up.
    Opaque(u32),
}

impl BranchKind {
    pub fn multiplicity(self) -> i64 {
        match self {
            BranchKind::Smooth => 1,
            BranchKind::Cusp(_) => 2,
            BranchKind::Opaque(m) => m as i64,
        }
    }

    fn after_blowup(self) -> Option<Self> {
        match self {
            BranchKind::Smooth => Some(BranchKind::Smooth),
            BranchKind::Cusp(1) => Some(BranchKind::Smooth),
            BranchKind::Cusp(g) => Some(BranchKind::Cusp(g - 1)),
            BranchKind::Opaque(_) => None,
        }
    }

    /// Shape at the image point after contracting a (-1)-curve the branch meets `i` times.
    fn after_blowdown(self, i: i64) -> Self {
        match (self, i) {
            (BranchKind::Smooth, 1) => BranchKind::Smooth,
            (BranchKind::Smooth, 2) => BranchKind::Cusp(1),
            (BranchKind::Cusp(g), 2) => BranchKind::Cusp(g + 1),
            (_, i) => BranchKind::Opaque(i as u32),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Branch {
    pub curve: String,
    pub kind: BranchKind,
}

/// A tracked point: the branches through it and their pairwise local
/// intersection numbers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Point {
    pub id: String,
    pub branches: Vec<Branch>,
    /// Symmetric; diagonal unused.
    pub contact: Vec<Vec<i64>>,
}

impl Point {
    pub fn multiplicity_of(&self, curve: &str) -> i64 {
        self.branches
            .iter()
            .filter(|b| b.curve == curve)
            .map(|b| b.kind.multiplicity())
            .sum()
    }

    pub fn contains(&self, curve: &str) -> bool {
        self.branches.iter().any(|b| b.curve == curve)
    }

    /// Local intersection number of two curves at this point.
    pub fn local_intersection(&self, c: &str, d: &str) -> i64 {
        let mut s = 0;
        for (i, a) in self.branches.iter().enumerate() {
            for (j, b) in self.branches.iter().enumerate() {
                if i != j && a.curve == c && b.curve == d {
                    s += self.contact[i][j];
                }
            }
        }
        s
    }

    /// Structural form with point-independent ordering, used for comparisons.
    fn normal_form(&self) -> Vec<(Branch, Vec<i64>)> {
        let mut idx: Vec<usize> = (0..self.branches.len()).collect();
        idx.sort_by(|&i, &j| {
            let key = |k: usize| (&self.branches[k].curve, self.branches[k].kind);
            key(i).cmp(&key(j))
        });
        idx.iter()
            .map(|&i| {
                let row = idx.iter().map(|&j| if i == j { 0 } else { self.contact[i][j] }).collect();
                (self.branches[i].clone(), row)
            })
            .collect()
    }
}

/// The starting surface of a configuration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum BaseSurface {
    Plane,
    Abstract,
    Local,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum Step {
    BlowUp { point: String, exceptional: String },
    BlowDown { curve: String, point: String },
}

/// A smooth projective surface (or a neighbourhood of a configuration of
/// curves on one) with a finite set of tracked curves and points.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Configuration {
    pub base: BaseSurface,
    pub curves: Vec<Curve>,
    /// Symmetric table of intersection numbers between distinct curves.
    pub inter: Vec<Vec<i64>>,
    pub points: Vec<Point>,
    pub history: Vec<Step>,
    /// K^2 of the smooth model, when the whole surface is known.
    pub k_squared_smooth: Option<i64>,
    next_point: usize,
}

impl Configuration {
    pub fn new(base: BaseSurface) -> Self {
        let k2 = match base {
            BaseSurface::Plane => Some(9),
            _ => None,
        };
        Configuration {
            base,
            curves: Vec::new(),
            inter: Vec::new(),
            points: Vec::new(),
            history: Vec::new(),
            k_squared_smooth: k2,
            next_point: 0,
        }
    }

    pub fn plane() -> Self {
        Self::new(BaseSurface::Plane)
    }

    pub fn index_of(&self, name: &str) -> Result<usize, ConfigError> {
        self.curves
            .iter()
            .position(|c| c.id == name)
            .ok_or_else(|| ConfigError::UnknownCurve(name.to_string()))
    }

    pub fn curve(&self, name: &str) -> Result<&Curve, ConfigError> {
        self.index_of(name).map(|i| &self.curves[i])
    }

    pub fn point(&self, id: &str) -> Result<&Point, ConfigError> {
        self.points
            .iter()
            .find(|p| p.id == id)
            .ok_or_else(|| ConfigError::UnknownPoint(id.to_string()))
    }

    /// Intersection number of two tracked curves (self-intersection on the diagonal).
    pub fn intersection(&self, c: &str, d: &str) -> Result<i64, ConfigError> {
        let i = self.index_of(c)?;
        let j = self.index_of(d)?;
        Ok(self.inter_idx(i, j))
    }

    pub(crate) fn inter_idx(&self, i: usize, j: usize) -> i64 {
        if i == j {
            self.curves[i].self_int
        } else {
            self.inter[i][j]
        }
    }

    fn name_taken(&self, name: &str) -> bool {
        self.curves.iter().any(|c| c.id == name) || self.points.iter().any(|p| p.id == name)
    }

    pub fn add_curve(&mut self, curve: Curve) -> Result<usize, ConfigError> {
        if self.name_taken(&curve.id) {
            return Err(ConfigError::DuplicateName(curve.id));
        }
        for row in &mut self.inter {
            row.push(0);
        }
        self.curves.push(curve);
        self.inter.push(vec![0; self.curves.len()]);
        Ok(self.curves.len() - 1)
    }

    pub fn set_intersection(&mut self, c: &str, d: &str, n: i64) -> Result<(), ConfigError> {
        let i = self.index_of(c)?;
        let j = self.index_of(d)?;
        if i == j {
            self.curves[i].self_int = n;
        } else {
            self.inter[i][j] = n;
            self.inter[j][i] = n;
        }
        Ok(())
    }

    fn fresh_point_id(&mut self) -> String {
        loop {
            self.next_point += 1;
            let id = format!("p{}", self.next_point);
            if !self.name_taken(&id) {
                return id;
            }
        }
    }

    /// Adds a tracked point. Contacts default to the product of multiplicities.
    pub fn add_point(
        &mut self,
        id: Option<&str>,
        branches: Vec<Branch>,
        contacts: &[(usize, usize, i64)],
    ) -> Result<String, ConfigError> {
        for b in &branches {
            self.index_of(&b.curve)?;
        }
        let n = branches.len();
        let mut contact = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    contact[i][j] = branches[i].kind.multiplicity() * branches[j].kind.multiplicity();
                }
            }
        }
        for &(i, j, v) in contacts {
            let mi = branches[i].kind.multiplicity() * branches[j].kind.multiplicity();
            if v < mi {
                return Err(ConfigError::InconsistentCenter(format!(
                    "contact {v} between {} and {} is below the product of multiplicities",
                    branches[i].curve, branches[j].curve
                )));
            }
            contact[i][j] = v;
            contact[j][i] = v;
        }
        let id = match id {
            Some(s) => {
                if self.name_taken(s) {
                    return Err(ConfigError::DuplicateName(s.to_string()));
                }
                s.to_string()
            }
            None => self.fresh_point_id(),
        };
        self.points.push(Point { id: id.clone(), branches, contact });
        Ok(id)
    }

    /// Sum over tracked points of local intersection numbers of `c` and `d`.
    pub fn tracked_intersection(&self, c: &str, d: &str) -> i64 {
        self.points.iter().map(|p| p.local_intersection(c, d)).sum()
    }

    /// Checks that no tracked contacts exceed global intersection numbers.
    pub fn check_contacts(&self) -> Result<(), ConfigError> {
        if self.base == BaseSurface::Local {
            return Ok(());
        }
        for i in 0..self.curves.len() {
            for j in (i + 1)..self.curves.len() {
                let (c, d) = (&self.curves[i].id, &self.curves[j].id);
                if self.tracked_intersection(c, d) > self.inter[i][j] {
                    return Err(ConfigError::ContactExceedsIntersection(c.clone(), d.clone()));
                }
            }
        }
        Ok(())
    }

    /// Tracked points whose branches include all the given curves.
    pub fn points_on(&self, curves: &[&str]) -> Vec<&Point> {
        self.points
            .iter()
            .filter(|p| curves.iter().all(|c| p.contains(c)))
            .collect()
    }

    /// The number of blow-ups in the history minus the number of blow-downs.
    pub fn net_blowups(&self) -> i64 {
        self.history
            .iter()
            .map(|s| match s {
                Step::BlowUp { .. } => 1,
                Step::BlowDown { .. } => -1,
            })
            .sum()
    }

    /// Structural equality up to point names and history.
    pub fn same_geometry(&self, other: &Configuration) -> bool {
        if self.curves.len() != other.curves.len() || self.k_squared_smooth != other.k_squared_smooth {
            return false;
        }
        let mut perm = Vec::with_capacity(self.curves.len());
        for c in &self.curves {
            match other.curves.iter().position(|d| d.id == c.id) {
                Some(j) if other.curves[j].self_int == c.self_int && other.curves[j].k_deg == c.k_deg => {
                    perm.push(j)
                }
                _ => return false,
            }
        }
        for i in 0..perm.len() {
            for j in 0..perm.len() {
                if i != j && self.inter[i][j] != other.inter[perm[i]][perm[j]] {
                    return false;
                }
            }
        }
        let mut a: Vec<_> = self.points.iter().map(Point::normal_form).collect();
        let mut b: Vec<_> = other.points.iter().map(Point::normal_form).collect();
        a.sort_by(|x, y| format!("{x:?}").cmp(&format!("{y:?}")));
        b.sort_by(|x, y| format!("{x:?}").cmp(&format!("{y:?}")));
        a == b
    }
}

/// Blows up a tracked point, naming the exceptional curve `name`.
pub fn blow_up(cfg: &Configuration, point: &str, name: &str) -> Result<Configuration, ConfigError> {
    let mut out = cfg.clone();
    let pidx = out
        .points
        .iter()
        .position(|p| p.id == point)
        .ok_or_else(|| ConfigError::UnknownPoint(point.to_string()))?;
    if out.name_taken(name) {
        return Err(ConfigError::DuplicateName(name.to_string()));
    }
    let p = out.points.remove(pidx);
    let n = p.branches.len();

    let mut new_kinds = Vec::with_capacity(n);
    for b in &p.branches {
        new_kinds.push(b.kind.after_blowup().ok_or_else(|| {
            ConfigError::Unsupported(format!("a followable branch of {} at {}", b.curve, p.id))
        })?);
    }
    let mut residual = p.contact.clone();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                residual[i][j] -= p.branches[i].kind.multiplicity() * p.branches[j].kind.multiplicity();
                if residual[i][j] < 0 {
                    return Err(ConfigError::InconsistentCenter(format!(
                        "{} and {} have contact {} at {}",
                        p.branches[i].curve, p.branches[j].curve, p.contact[i][j], p.id
                    )));
                }
            }
        }
    }

    // Multiplicity of every curve at the center.
    let mult: Vec<i64> = out.curves.iter().map(|c| p.multiplicity_of(&c.id)).collect();
    let step = out.history.len();
    let e = out.add_curve(Curve {
        id: name.to_string(),
        self_int: -1,
        k_deg: -1,
        origin: Origin::ExceptionalOfBlowup(step),
        analysis: false,
        local: false,
    })?;
    let base_local = out.base == BaseSurface::Local;
    for (i, &m) in mult.iter().enumerate() {
        if m == 0 {
            continue;
        }
        out.curves[i].self_int -= m * m;
        out.curves[i].k_deg += m;
        out.inter[i][e] = m;
        out.inter[e][i] = m;
        for (j, &mj) in mult.iter().enumerate() {
            if j != i && mj > 0 {
                out.inter[i][j] -= m * mj;
                if out.inter[i][j] < 0 && !base_local {
                    return Err(ConfigError::InconsistentCenter(format!(
                        "{} and {} would have negative intersection",
                        out.curves[i].id, out.curves[j].id
                    )));
                }
            }
        }
    }

    // Branches with positive residual contact stay together on the exceptional curve.
    let mut class: Vec<Option<usize>> = vec![None; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if class[i].is_some() {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&j| j == i || residual[i][j] > 0).collect();
        for &a in &members {
            if class[a].is_some() {
                return Err(ConfigError::InconsistentCenter(format!(
                    "contacts at {} are not transitive",
                    p.id
                )));
            }
            for &b in &members {
                if a != b && residual[a][b] == 0 {
                    return Err(ConfigError::InconsistentCenter(format!(
                        "contacts at {} are not transitive",
                        p.id
                    )));
                }
            }
        }
        for &a in &members {
            class[a] = Some(classes.len());
        }
        classes.push(members);
    }
    for members in classes {
        let mut branches: Vec<Branch> =
            members.iter().map(|&i| Branch { curve: p.branches[i].curve.clone(), kind: new_kinds[i] }).collect();
        branches.push(Branch { curve: name.to_string(), kind: BranchKind::Smooth });
        let k = branches.len();
        let mut contact = vec![vec![0; k]; k];
        for (a, &i) in members.iter().enumerate() {
            for (b, &j) in members.iter().enumerate() {
                if a != b {
                    contact[a][b] = residual[i][j];
                }
            }
            let m = p.branches[i].kind.multiplicity();
            contact[a][k - 1] = m;
            contact[k - 1][a] = m;
        }
        let id = out.fresh_point_id();
        out.points.push(Point { id, branches, contact });
    }
    if let Some(k2) = out.k_squared_smooth.as_mut() {
        *k2 -= 1;
    }
    out.history.push(Step::BlowUp { point: p.id, exceptional: name.to_string() });
    Ok(out)
}

/// Contracts a (-1)-curve. The image point becomes a tracked point carrying
/// every branch that met the curve. Returns the new configuration and the id
/// of the image point (if it is tracked).
pub fn blow_down(cfg: &Configuration, c: &str) -> Result<(Configuration, Option<String>), ConfigError> {
    let ci = cfg.index_of(c)?;
    let cc = &cfg.curves[ci];
    if cc.self_int != -1 || (cc.k_deg != -1 && !cc.local) {
        return Err(ConfigError::NotMinusOne(c.to_string()));
    }
    let mut out = cfg.clone();
    let m: Vec<i64> = (0..out.curves.len()).map(|i| if i == ci { 0 } else { out.inter[i][ci] }).collect();
    for i in 0..out.curves.len() {
        if m[i] == 0 {
            continue;
        }
        out.curves[i].self_int += m[i] * m[i];
        out.curves[i].k_deg -= m[i];
        for j in 0..out.curves.len() {
            if j != i && m[j] > 0 {
                out.inter[i][j] += m[i] * m[j];
            }
        }
    }

    // Gather branches at the image point.
    let mut branches: Vec<Branch> = Vec::new();
    let mut groups: Vec<usize> = Vec::new();
    let mut local: Vec<Vec<i64>> = Vec::new(); // contact at old point, per branch pair in same group
    let mut meets: Vec<i64> = Vec::new();
    let mut kept_points = Vec::new();
    let mut tracked_per_curve: BTreeMap<String, i64> = BTreeMap::new();
    let mut group = 0;
    for p in out.points.drain(..) {
        let Some(ck) = p.branches.iter().position(|b| b.curve == c) else {
            kept_points.push(p);
            continue;
        };
        if p.branches.iter().filter(|b| b.curve == c).count() > 1 {
            return Err(ConfigError::Unsupported(format!("a smooth curve {c}")));
        }
        for (k, b) in p.branches.iter().enumerate() {
            if k == ck {
                continue;
            }
            let i = p.contact[k][ck];
            *tracked_per_curve.entry(b.curve.clone()).or_default() += i;
            branches.push(Branch { curve: b.curve.clone(), kind: b.kind.after_blowdown(i) });
            groups.push(group);
            meets.push(i);
        }
        let idx: Vec<usize> = (0..p.branches.len()).filter(|&k| k != ck).collect();
        for (a, &k) in idx.iter().enumerate() {
            let mut row = vec![0; idx.len()];
            for (b, &l) in idx.iter().enumerate() {
                if a != b {
                    row[b] = p.contact[k][l];
                }
            }
            local.push(row);
        }
        group += 1;
    }
    let group_start: Vec<usize> = {
        let mut starts = Vec::new();
        let mut prev = usize::MAX;
        for (k, &g) in groups.iter().enumerate() {
            if g != prev {
                starts.push(k);
                prev = g;
            }
        }
        starts
    };
    // Untracked transverse intersections become extra smooth branches.
    for (i, curve) in cfg.curves.iter().enumerate() {
        if i == ci || m[i] == 0 {
            continue;
        }
        let tracked = tracked_per_curve.get(&curve.id).copied().unwrap_or(0);
        for _ in tracked..m[i] {
            branches.push(Branch { curve: curve.id.clone(), kind: BranchKind::Smooth });
            groups.push(usize::MAX);
            meets.push(1);
            local.push(Vec::new());
        }
    }
    let n = branches.len();
    let mut contact = vec![vec![0; n]; n];
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            let base = branches[a].kind.multiplicity() * branches[b].kind.multiplicity();
            let extra = if groups[a] == groups[b] && groups[a] != usize::MAX {
                let s = group_start[groups[a]];
                local[a][b - s]
            } else {
                0
            };
            contact[a][b] = base + extra;
        }
    }
    out.points = kept_points;
    let keep = n >= 2 || branches.iter().any(|b| b.kind != BranchKind::Smooth);
    let new_id = if keep {
        let id = out.fresh_point_id();
        out.points.push(Point { id: id.clone(), branches, contact });
        Some(id)
    } else {
        None
    };

    out.curves.remove(ci);
    out.inter.remove(ci);
    for row in &mut out.inter {
        row.remove(ci);
    }
    if let Some(k2) = out.k_squared_smooth.as_mut() {
        *k2 += 1;
    }
    out.history.push(Step::BlowDown {
        curve: c.to_string(),
        point: new_id.clone().unwrap_or_default(),
    });
    Ok((out, new_id))
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.curves {
            writeln!(f, "{}: self {} K {}", c.id, c.self_int, c.k_deg)?;
        }
        for p in &self.points {
            let names: Vec<_> = p.branches.iter().map(|b| b.curve.as_str()).collect();
            writeln!(f, "{}: {}", p.id, names.join(" "))?;
        }
        Ok(())
    }
}
