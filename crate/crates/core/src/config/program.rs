//! Line-oriented blow-up programs.
//!
//! ```text
//! surface P2
//! curve A degree 1
//! curve B degree 2
//! curve D degree 1
//! point d on B D contact B:D=2
//! blowup d along D times 3
//! ```
//!
//! Directives: `surface P2 | abstract [K2 n] | local`; `curve NAME [degree d]
//! [self s kdeg k] [analysis]`; `chain PREFIX w1,w2,..`; `meet X Y n`;
//! `point NAME on BRANCH.. [contact BRANCH:BRANCH=n ..]` where a branch is
//! `X`, `X#k` (k-th branch of X) or either followed by `~g` (a cusp resolved by
//! g blow-ups); `blowup POINT [along C] [times n] [as NAME]` where POINT is a
//! point name or `meet(X,Y,..)`; `blowdown C`; `contract C..`; `keep C..`;
//! `analysis C..`.

use std::collections::BTreeMap;

use super::surface::{contract_to_surface, ContractionPolicy, SurfaceModel};
use super::{blow_down, blow_up, BaseSurface, Branch, BranchKind, ConfigError, Configuration, Curve, Origin, Point};
use crate::EpsRational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointRef {
    Named(String),
    Meet(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instruction {
    BlowUp { at: PointRef, along: Option<String>, times: usize, name: Option<String> },
    BlowDown(String),
    MarkAnalysis(Vec<String>),
}

/// A parsed and validated program.
#[derive(Clone, Debug)]
pub struct BlowupProgram {
    /// The configuration after all declarations, before any blow-up.
    pub initial: Configuration,
    pub instructions: Vec<(usize, Instruction)>,
    pub policy: ContractionPolicy,
    result: Configuration,
}

impl BlowupProgram {
    /// The configuration after executing every instruction.
    pub fn configuration(&self) -> &Configuration {
        &self.result
    }

    pub fn surface(&self) -> Result<SurfaceModel, ConfigError> {
        contract_to_surface(&self.result, &self.policy)
    }
}

fn perr(line: usize, msg: impl Into<String>) -> ConfigError {
    ConfigError::Parse { line, msg: msg.into() }
}

fn parse_int(line: usize, s: Option<&str>, what: &str) -> Result<i64, ConfigError> {
    s.ok_or_else(|| perr(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| perr(line, format!("invalid {what}")))
}

struct BranchTok {
    curve: String,
    index: usize,
    kind: BranchKind,
}

fn parse_branch(line: usize, tok: &str) -> Result<BranchTok, ConfigError> {
    let (rest, kind) = match tok.split_once('~') {
        Some((r, g)) => {
            let g: u32 = g.parse().map_err(|_| perr(line, format!("invalid cusp order in `{tok}`")))?;
            if g == 0 {
                return Err(perr(line, "cusp order must be positive"));
            }
            (r, BranchKind::Cusp(g))
        }
        None => (tok, BranchKind::Smooth),
    };
    let (curve, index) = match rest.split_once('#') {
        Some((c, k)) => (c, k.parse().map_err(|_| perr(line, format!("invalid branch index in `{tok}`")))?),
        None => (rest, 1),
    };
    if curve.is_empty() {
        return Err(perr(line, format!("empty curve name in `{tok}`")));
    }
    Ok(BranchTok { curve: curve.to_string(), index, kind })
}

fn parse_point_ref(line: usize, s: &str) -> Result<PointRef, ConfigError> {
    if let Some(inner) = s.strip_prefix("meet(").and_then(|r| r.strip_suffix(')')) {
        let names: Vec<String> = inner.split(',').map(|x| x.trim().to_string()).collect();
        if names.len() < 2 || names.iter().any(String::is_empty) {
            return Err(perr(line, format!("invalid point reference `{s}`")));
        }
        Ok(PointRef::Meet(names))
    } else {
        Ok(PointRef::Named(s.to_string()))
    }
}

/// Splits a line into tokens, keeping `meet(..)` groups together.
fn tokens(s: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut depth = 0;
    for ch in s.chars() {
        match ch {
            '(' => {
                depth += 1;
                cur.push(ch);
            }
            ')' => {
                depth -= 1;
                cur.push(ch);
            }
            c if c.is_whitespace() && depth == 0 => {
                if !cur.is_empty() {
                    out.push(std::mem::take(&mut cur));
                }
            }
            c if c.is_whitespace() => {}
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

#[derive(Default)]
struct Builder {
    cfg: Option<Configuration>,
    degrees: BTreeMap<String, i64>,
    meets: BTreeMap<(String, String), i64>,
    finished_declarations: bool,
}

impl Builder {
    fn cfg(&mut self, line: usize) -> Result<&mut Configuration, ConfigError> {
        self.cfg.as_mut().ok_or_else(|| perr(line, "missing `surface` line"))
    }

    /// Fixes global intersection numbers once the first blow-up is reached.
    fn finish(&mut self, line: usize) -> Result<(), ConfigError> {
        if self.finished_declarations {
            return Ok(());
        }
        self.finished_declarations = true;
        let degrees = std::mem::take(&mut self.degrees);
        let meets = std::mem::take(&mut self.meets);
        let cfg = self.cfg(line)?;
        let n = cfg.curves.len();
        for i in 0..n {
            for j in (i + 1)..n {
                let (ci, cj) = (cfg.curves[i].id.clone(), cfg.curves[j].id.clone());
                let key = if ci < cj { (ci.clone(), cj.clone()) } else { (cj.clone(), ci.clone()) };
                let v = match (cfg.base.clone(), meets.get(&key)) {
                    (BaseSurface::Plane, _) => degrees[&ci] * degrees[&cj],
                    (_, Some(&v)) => v,
                    (_, None) => cfg.tracked_intersection(&ci, &cj),
                };
                cfg.inter[i][j] = v;
                cfg.inter[j][i] = v;
            }
        }
        cfg.check_contacts()
    }
}

fn resolve_point(cfg: &mut Configuration, at: &PointRef) -> Result<String, ConfigError> {
    match at {
        PointRef::Named(n) => cfg.point(n).map(|p| p.id.clone()),
        PointRef::Meet(names) => {
            for n in names {
                cfg.index_of(n)?;
            }
            let refs: Vec<&str> = names.iter().map(String::as_str).collect();
            let found: Vec<String> = cfg.points_on(&refs).iter().map(|p| p.id.clone()).collect();
            match found.as_slice() {
                [one] => Ok(one.clone()),
                [] if names.len() == 2 => {
                    let free = cfg.intersection(&names[0], &names[1])?
                        - cfg.tracked_intersection(&names[0], &names[1]);
                    if free != 1 {
                        return Err(ConfigError::InconsistentCenter(format!(
                            "{} and {} do not meet in a unique untracked point",
                            names[0], names[1]
                        )));
                    }
                    let b = |c: &str| Branch { curve: c.to_string(), kind: BranchKind::Smooth };
                    cfg.add_point(None, vec![b(&names[0]), b(&names[1])], &[])
                }
                [] => Err(ConfigError::InconsistentCenter(format!("no tracked point on {}", names.join(", ")))),
                _ => Err(ConfigError::InconsistentCenter(format!(
                    "several tracked points on {}",
                    names.join(", ")
                ))),
            }
        }
    }
}

/// Executes one instruction.
pub(crate) fn execute(cfg: &Configuration, ins: &Instruction) -> Result<Configuration, ConfigError> {
    execute_tracking(cfg, ins, None)
}

/// Executes one instruction, extending `coeffs` with the coefficient
/// `Σ γ_Y m_Y - 1` of each new exceptional curve.
pub(crate) fn execute_tracking(
    cfg: &Configuration,
    ins: &Instruction,
    mut coeffs: Option<&mut BTreeMap<String, EpsRational>>,
) -> Result<Configuration, ConfigError> {
    match ins {
        Instruction::BlowDown(c) => Ok(blow_down(cfg, c)?.0),
        Instruction::MarkAnalysis(names) => {
            let mut out = cfg.clone();
            for n in names {
                let i = out.index_of(n)?;
                out.curves[i].analysis = true;
            }
            Ok(out)
        }
        Instruction::BlowUp { at, along, times, name } => {
            let mut cur = cfg.clone();
            let mut center = resolve_point(&mut cur, at)?;
            if *times > 1 && along.is_none() {
                return Err(ConfigError::InconsistentCenter("repeated blow-up needs `along`".into()));
            }
            if let Some(c) = along {
                cur.index_of(c)?;
                if !cur.point(&center)?.contains(c) {
                    return Err(ConfigError::InconsistentCenter(format!("{c} does not pass through {center}")));
                }
            }
            let prefix = match (name, at) {
                (Some(n), _) => n.clone(),
                (None, PointRef::Named(p)) => p.clone(),
                (None, PointRef::Meet(_)) => format!("e{}", cur.history.len() + 1),
            };
            for k in 0..*times {
                let ename = if *times == 1 && (name.is_some() || matches!(at, PointRef::Meet(_))) {
                    prefix.clone()
                } else {
                    format!("{prefix}{}", k + 1)
                };
                if let Some(c) = coeffs.as_deref_mut() {
                    let v = exceptional_coefficient(cur.point(&center)?, c);
                    c.insert(ename.clone(), v);
                }
                cur = blow_up(&cur, &center, &ename)?;
                if k + 1 < *times {
                    let c = along.as_deref().unwrap();
                    let next: Vec<String> = cur.points_on(&[c, &ename]).iter().map(|p| p.id.clone()).collect();
                    center = match next.as_slice() {
                        [one] => one.clone(),
                        _ => {
                            return Err(ConfigError::InconsistentCenter(format!(
                                "{c} does not meet {ename} in a single tracked point"
                            )))
                        }
                    };
                }
            }
            Ok(cur)
        }
    }
}

pub(crate) fn exceptional_coefficient(p: &Point, coeffs: &BTreeMap<String, EpsRational>) -> EpsRational {
    let mut v = -EpsRational::one();
    for b in &p.branches {
        if let Some(c) = coeffs.get(&b.curve) {
            v = v + c.scale(&crate::qi(b.kind.multiplicity()));
        }
    }
    v
}

/// Parses and validates a program, executing it to check every instruction.
pub fn parse_program(text: &str) -> Result<BlowupProgram, ConfigError> {
    let mut b = Builder::default();
    let mut instructions = Vec::new();
    let mut policy = ContractionPolicy::default();
    let mut state: Option<Configuration> = None;
    let mut initial: Option<Configuration> = None;
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = strip_comment(raw).trim();
        if body.is_empty() {
            continue;
        }
        let toks = tokens(body);
        let kw = toks[0].as_str();
        let args = &toks[1..];
        let is_decl = matches!(kw, "surface" | "curve" | "chain" | "meet" | "point");
        if is_decl && b.finished_declarations {
            return Err(perr(line, format!("`{kw}` after the first blow-up")));
        }
        match kw {
            "surface" => {
                if b.cfg.is_some() {
                    return Err(perr(line, "duplicate `surface` line"));
                }
                let mut cfg = match args.first().map(String::as_str) {
                    Some("P2") => Configuration::new(BaseSurface::Plane),
                    Some("abstract") => Configuration::new(BaseSurface::Abstract),
                    Some("local") => Configuration::new(BaseSurface::Local),
                    _ => return Err(perr(line, "expected `surface P2`, `surface abstract` or `surface local`")),
                };
                if let Some(k) = args.iter().position(|a| a == "K2") {
                    if cfg.base != BaseSurface::Abstract {
                        return Err(perr(line, "K2 applies to abstract surfaces"));
                    }
                    cfg.k_squared_smooth = Some(parse_int(line, args.get(k + 1).map(String::as_str), "K2")?);
                }
                b.cfg = Some(cfg);
            }
            "curve" => {
                let name = args.first().ok_or_else(|| perr(line, "missing curve name"))?.clone();
                let mut degree = None;
                let mut self_int = None;
                let mut k_deg = None;
                let mut analysis = false;
                let mut i = 1;
                while i < args.len() {
                    match args[i].as_str() {
                        "degree" => {
                            degree = Some(parse_int(line, args.get(i + 1).map(String::as_str), "degree")?);
                            i += 2;
                        }
                        "self" => {
                            self_int = Some(parse_int(line, args.get(i + 1).map(String::as_str), "self")?);
                            i += 2;
                        }
                        "kdeg" => {
                            k_deg = Some(parse_int(line, args.get(i + 1).map(String::as_str), "kdeg")?);
                            i += 2;
                        }
                        "analysis" => {
                            analysis = true;
                            i += 1;
                        }
                        other => return Err(perr(line, format!("unexpected `{other}`"))),
                    }
                }
                let base = b.cfg(line)?.base.clone();
                let curve = match base {
                    BaseSurface::Plane => {
                        let d = degree.ok_or_else(|| perr(line, "plane curves need a degree"))?;
                        if d < 1 {
                            return Err(perr(line, "degree must be positive"));
                        }
                        b.degrees.insert(name.clone(), d);
                        Curve { id: name, self_int: d * d, k_deg: -3 * d, origin: Origin::Plane, analysis, local: false }
                    }
                    BaseSurface::Abstract | BaseSurface::Local => {
                        if degree.is_some() {
                            return Err(perr(line, "degree applies to plane curves"));
                        }
                        match (self_int, k_deg) {
                            (Some(s), Some(k)) => {
                                Curve { id: name, self_int: s, k_deg: k, origin: Origin::Declared, analysis, local: false }
                            }
                            (None, None) if base == BaseSurface::Local => {
                                Curve { id: name, self_int: 0, k_deg: 0, origin: Origin::Declared, analysis, local: true }
                            }
                            _ => return Err(perr(line, "abstract curves need `self` and `kdeg`")),
                        }
                    }
                };
                b.cfg(line)?.add_curve(curve)?;
            }
            "chain" => {
                let prefix = args.first().ok_or_else(|| perr(line, "missing chain prefix"))?.clone();
                let ws = args.get(1).ok_or_else(|| perr(line, "missing chain weights"))?;
                if b.cfg(line)?.base == BaseSurface::Plane {
                    return Err(perr(line, "chains apply to abstract or local surfaces"));
                }
                let mut prev: Option<String> = None;
                for (k, w) in ws.split(',').enumerate() {
                    let w: i64 = w.trim().parse().map_err(|_| perr(line, format!("invalid weight `{w}`")))?;
                    let name = format!("{prefix}{}", k + 1);
                    b.cfg(line)?.add_curve(Curve {
                        id: name.clone(),
                        self_int: -w,
                        k_deg: w - 2,
                        origin: Origin::Declared,
                        analysis: false,
                        local: false,
                    })?;
                    if let Some(p) = prev {
                        let key = if p < name { (p, name.clone()) } else { (name.clone(), p) };
                        b.meets.insert(key, 1);
                    }
                    prev = Some(name);
                }
            }
            "meet" => {
                if args.len() != 3 {
                    return Err(perr(line, "expected `meet X Y n`"));
                }
                let cfg = b.cfg(line)?;
                if cfg.base == BaseSurface::Plane {
                    return Err(perr(line, "plane intersections follow from degrees"));
                }
                cfg.index_of(&args[0])?;
                cfg.index_of(&args[1])?;
                if args[0] == args[1] {
                    return Err(perr(line, "use `self` for self-intersections"));
                }
                let n = parse_int(line, Some(&args[2]), "intersection number")?;
                if n < 0 {
                    return Err(perr(line, "intersection numbers of distinct curves are non-negative"));
                }
                let (x, y) = (args[0].clone(), args[1].clone());
                b.meets.insert(if x < y { (x, y) } else { (y, x) }, n);
            }
            "point" => {
                let name = args.first().ok_or_else(|| perr(line, "missing point name"))?.clone();
                if args.get(1).map(String::as_str) != Some("on") {
                    return Err(perr(line, "expected `point NAME on ...`"));
                }
                let mut branches: Vec<BranchTok> = Vec::new();
                let mut i = 2;
                while i < args.len() && args[i] != "contact" {
                    branches.push(parse_branch(line, &args[i])?);
                    i += 1;
                }
                if branches.is_empty() {
                    return Err(perr(line, "a point needs at least one branch"));
                }
                let find = |t: &BranchTok| branches.iter().position(|b| b.curve == t.curve && b.index == t.index);
                let mut contacts = Vec::new();
                for spec in args.iter().skip(i + 1) {
                    let (pair, v) = spec.split_once('=').ok_or_else(|| perr(line, format!("invalid contact `{spec}`")))?;
                    let (x, y) = pair.split_once(':').ok_or_else(|| perr(line, format!("invalid contact `{spec}`")))?;
                    let (x, y) = (parse_branch(line, x)?, parse_branch(line, y)?);
                    let xi = find(&x).ok_or_else(|| perr(line, format!("`{}` is not a branch at {name}", x.curve)))?;
                    let yi = find(&y).ok_or_else(|| perr(line, format!("`{}` is not a branch at {name}", y.curve)))?;
                    if xi == yi {
                        return Err(perr(line, "contact of a branch with itself"));
                    }
                    let v = parse_int(line, Some(v), "contact order")?;
                    contacts.push((xi, yi, v));
                }
                let cfg = b.cfg(line)?;
                let list = branches.iter().map(|t| Branch { curve: t.curve.clone(), kind: t.kind }).collect();
                cfg.add_point(Some(&name), list, &contacts).map_err(|e| match e {
                    ConfigError::InconsistentCenter(m) => perr(line, m),
                    other => other,
                })?;
            }
            "blowup" => {
                b.finish(line)?;
                let at = parse_point_ref(line, args.first().ok_or_else(|| perr(line, "missing center"))?)?;
                let mut along = None;
                let mut times = 1;
                let mut name = None;
                let mut i = 1;
                while i < args.len() {
                    let v = args.get(i + 1).ok_or_else(|| perr(line, format!("`{}` needs a value", args[i])))?;
                    match args[i].as_str() {
                        "along" => along = Some(v.clone()),
                        "times" => {
                            times = parse_int(line, Some(v), "count")? as usize;
                            if times == 0 {
                                return Err(perr(line, "count must be positive"));
                            }
                        }
                        "as" => name = Some(v.clone()),
                        other => return Err(perr(line, format!("unexpected `{other}`"))),
                    }
                    i += 2;
                }
                instructions.push((line, Instruction::BlowUp { at, along, times, name }));
            }
            "blowdown" => {
                b.finish(line)?;
                let c = args.first().ok_or_else(|| perr(line, "missing curve"))?.clone();
                instructions.push((line, Instruction::BlowDown(c)));
            }
            "contract" | "keep" | "analysis" => {
                b.finish(line)?;
                let names: Vec<String> = args.to_vec();
                match kw {
                    "contract" => policy = ContractionPolicy::Explicit(names),
                    "keep" => policy = ContractionPolicy::KNonNegativeExcept(names),
                    _ => instructions.push((line, Instruction::MarkAnalysis(names))),
                }
            }
            other => return Err(perr(line, format!("unknown directive `{other}`"))),
        }
        if state.is_none() && b.finished_declarations {
            let cfg = b.cfg.clone().expect("surface declared");
            initial = Some(cfg.clone());
            state = Some(cfg);
        }
        if let (Some(cur), Some((l, ins))) = (state.as_mut(), instructions.last()) {
            if *l == line {
                *cur = apply(cur, ins, line)?;
            }
        }
    }
    if !b.finished_declarations {
        b.finish(0)?;
        let cfg = b.cfg.clone().ok_or_else(|| perr(0, "missing `surface` line"))?;
        initial = Some(cfg.clone());
        state = Some(cfg);
    }
    let result = state.expect("state set");
    for n in match &policy {
        ContractionPolicy::Explicit(v) | ContractionPolicy::KNonNegativeExcept(v) => v.clone(),
        ContractionPolicy::KNonNegative => Vec::new(),
    } {
        result.index_of(&n)?;
    }
    Ok(BlowupProgram { initial: initial.expect("set"), instructions, policy, result })
}

/// A `#` starting a word begins a comment; inside a word it marks a branch index.
fn strip_comment(raw: &str) -> &str {
    let mut prev_space = true;
    for (i, ch) in raw.char_indices() {
        if ch == '#' && prev_space {
            return &raw[..i];
        }
        prev_space = ch.is_whitespace();
    }
    raw
}

fn apply(cfg: &Configuration, ins: &Instruction, line: usize) -> Result<Configuration, ConfigError> {
    execute(cfg, ins).map_err(|e| match e {
        ConfigError::Parse { msg, .. } => perr(line, msg),
        other => other,
    })
}
