//! Quantities a corpus case can assert, and their exact values.

use std::fmt;

use ltsurf::config::{branch_index, germs_of, k_dot, k_squared, q_intersection, q_self, BranchKind, SurfaceModel};
use ltsurf::criteria::{rr_chi, tiger_certificate, uniruled_criterion, TigerReason};
use ltsurf::hunt::{GammaSequence, HuntEnd, HuntRun, Outcome};
use ltsurf::singularity::{boundary_coefficient_chain, chain_index_of, ChainSingularity};
use ltsurf::{fmt_q, Rational};
use serde::Serialize;

use crate::expr::eval;
use crate::CorpusError;

/// A computed or expected value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Value {
    Q(Rational),
    Bool(bool),
    Text(String),
    /// Compared as multisets.
    QList(Vec<Rational>),
    /// Compared as multisets.
    TextList(Vec<String>),
}

impl Value {
    fn normalized(&self) -> Value {
        match self {
            Value::QList(v) => {
                let mut v = v.clone();
                v.sort();
                Value::QList(v)
            }
            Value::TextList(v) => {
                let mut v = v.clone();
                v.sort();
                Value::TextList(v)
            }
            other => other.clone(),
        }
    }

    /// Exact equality, ignoring the order of list entries.
    pub fn matches(&self, other: &Value) -> bool {
        self.normalized() == other.normalized()
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Q(q) => write!(f, "{}", fmt_q(q)),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Text(t) => write!(f, "{t}"),
            Value::QList(v) => write!(f, "[{}]", v.iter().map(fmt_q).collect::<Vec<_>>().join(", ")),
            Value::TextList(v) => write!(f, "{}", v.join(" + ")),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Q,
    Bool,
    Text,
    QList,
    TextList,
}

/// A parsed quantity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Quantity {
    /// Singularity graphs of the surface.
    Graphs,
    /// Indices of all singular points.
    Indices,
    /// Graph of the point containing an exceptional curve.
    Graph(String),
    Index(String),
    CartierIndex(String),
    /// Coefficient of an exceptional curve.
    Coefficient(String),
    /// Largest coefficient at the point containing an exceptional curve.
    PointCoefficient(String),
    MaxCoefficient,
    MinusK(String),
    SelfInt(String),
    Intersection(String, String),
    /// Local Cartier indices of the branches of a curve at singular points.
    BranchIndices(String),
    /// `-K·C ≥ 1/x + 1/y` for the two singular branches of `C`.
    Uniruled(String),
    KSquared,
    Chi,
    Tiger,
    /// The curves meet transversally at smooth points, at most two through each point.
    NormalCrossings(Vec<String>),
    ChainIndex(Vec<u32>),
    /// `boundary_coefficient_chain` on a chain marked at its left end.
    BoundaryChain(Vec<u32>, String),
    HuntEnd,
    HuntSteps,
    StepExtracted(usize),
    StepX(usize),
    StepCoefficient(usize),
    StepCoefficientEps(usize),
    StepLambda(usize),
    StepSigma(usize),
    StepSingularities(usize),
    StepBoundary(usize, String),
    /// `m_i` of the `γ`-sequence.
    Gamma(usize),
    /// A surface quantity on `S_i` of the hunt.
    At(usize, Box<Quantity>),
}

fn weights(s: &str) -> Result<Vec<u32>, CorpusError> {
    s.trim_matches(|c| c == '(' || c == ')')
        .split(',')
        .map(|w| w.trim().parse::<u32>().map_err(|_| CorpusError::Quantity(format!("invalid weights `{s}`"))))
        .collect()
}

impl Quantity {
    pub fn parse(text: &str) -> Result<Quantity, CorpusError> {
        let bad = || CorpusError::Quantity(format!("unknown quantity `{text}`"));
        let toks: Vec<&str> = text.split_whitespace().collect();
        let first = *toks.first().ok_or_else(bad)?;
        if let Some((si, rest)) = first.split_once(':') {
            let i = si.strip_prefix('S').and_then(|n| n.parse::<usize>().ok()).ok_or_else(bad)?;
            let mut inner = vec![rest];
            inner.extend_from_slice(&toks[1..]);
            let q = Quantity::parse(&inner.join(" "))?;
            if !q.is_surface_quantity() {
                return Err(bad());
            }
            return Ok(Quantity::At(i, Box::new(q)));
        }
        let arg = |i: usize| toks.get(i).map(|s| s.to_string()).ok_or_else(bad);
        let step = || toks.get(1).and_then(|s| s.parse::<usize>().ok()).filter(|&i| i >= 1).ok_or_else(bad);
        let q = match (first, toks.len()) {
            ("graphs", 1) => Quantity::Graphs,
            ("indices", 1) => Quantity::Indices,
            ("graph", 2) => Quantity::Graph(arg(1)?),
            ("index", 2) => Quantity::Index(arg(1)?),
            ("cartier-index", 2) => Quantity::CartierIndex(arg(1)?),
            ("coefficient", 2) => Quantity::Coefficient(arg(1)?),
            ("point-coefficient", 2) => Quantity::PointCoefficient(arg(1)?),
            ("max-coefficient", 1) => Quantity::MaxCoefficient,
            ("minus-k", 2) => Quantity::MinusK(arg(1)?),
            ("self", 2) => Quantity::SelfInt(arg(1)?),
            ("intersection", 3) => Quantity::Intersection(arg(1)?, arg(2)?),
            ("branch-indices", 2) => Quantity::BranchIndices(arg(1)?),
            ("uniruled", 2) => Quantity::Uniruled(arg(1)?),
            ("k2", 1) => Quantity::KSquared,
            ("chi", 1) => Quantity::Chi,
            ("tiger", 1) => Quantity::Tiger,
            ("normal-crossings", n) if n >= 3 => Quantity::NormalCrossings(toks[1..].iter().map(|s| s.to_string()).collect()),
            ("chain-index", 2) => Quantity::ChainIndex(weights(toks[1])?),
            ("boundary-chain", 4) if toks[2] == "at" => Quantity::BoundaryChain(weights(toks[1])?, arg(3)?),
            ("hunt-end", 1) => Quantity::HuntEnd,
            ("hunt-steps", 1) => Quantity::HuntSteps,
            ("step", 3) => match toks[2] {
                "extracted" => Quantity::StepExtracted(step()?),
                "x" => Quantity::StepX(step()?),
                "coefficient" => Quantity::StepCoefficient(step()?),
                "coefficient-eps" => Quantity::StepCoefficientEps(step()?),
                "lambda" => Quantity::StepLambda(step()?),
                "sigma" => Quantity::StepSigma(step()?),
                "singularities" => Quantity::StepSingularities(step()?),
                _ => return Err(bad()),
            },
            ("step", 4) if toks[2] == "boundary" => Quantity::StepBoundary(step()?, arg(3)?),
            ("gamma", 2) => Quantity::Gamma(step()?),
            _ => return Err(bad()),
        };
        Ok(q)
    }

    fn is_surface_quantity(&self) -> bool {
        !matches!(
            self,
            Quantity::ChainIndex(_)
                | Quantity::BoundaryChain(..)
                | Quantity::HuntEnd
                | Quantity::HuntSteps
                | Quantity::StepExtracted(_)
                | Quantity::StepX(_)
                | Quantity::StepCoefficient(_)
                | Quantity::StepCoefficientEps(_)
                | Quantity::StepLambda(_)
                | Quantity::StepSigma(_)
                | Quantity::StepSingularities(_)
                | Quantity::StepBoundary(..)
                | Quantity::Gamma(_)
                | Quantity::At(..)
        )
    }

    fn kind(&self) -> Kind {
        match self {
            Quantity::Graphs | Quantity::StepSingularities(_) => Kind::TextList,
            Quantity::Indices | Quantity::BranchIndices(_) => Kind::QList,
            Quantity::Graph(_)
            | Quantity::Tiger
            | Quantity::HuntEnd
            | Quantity::StepExtracted(_)
            | Quantity::StepX(_)
            | Quantity::StepSigma(_) => Kind::Text,
            Quantity::Uniruled(_) | Quantity::NormalCrossings(_) => Kind::Bool,
            Quantity::At(_, q) => q.kind(),
            _ => Kind::Q,
        }
    }

    /// Parses an expected value of this quantity's kind.
    pub fn parse_value(&self, text: &str, k: Option<i64>) -> Result<Value, CorpusError> {
        let text = text.trim();
        let list_body = || {
            text.strip_prefix('[')
                .and_then(|t| t.strip_suffix(']'))
                .ok_or_else(|| CorpusError::Expression(format!("expected `[...]`, found `{text}`")))
        };
        Ok(match self.kind() {
            Kind::Q => Value::Q(eval(text, k)?),
            Kind::Bool => match text {
                "true" => Value::Bool(true),
                "false" => Value::Bool(false),
                _ => return Err(CorpusError::Expression(format!("expected `true` or `false`, found `{text}`"))),
            },
            Kind::Text => Value::Text(text.to_string()),
            Kind::QList => {
                let body = list_body()?;
                let items = if body.trim().is_empty() { Vec::new() } else { body.split(',').collect() };
                Value::QList(items.into_iter().map(|e| eval(e, k)).collect::<Result<_, _>>()?)
            }
            Kind::TextList => {
                let items = if text == "none" { Vec::new() } else { text.split(" + ").map(|s| s.trim().to_string()).collect() };
                Value::TextList(items)
            }
        })
    }
}

/// Everything a case computes before its quantities are read off.
pub struct Context<'a> {
    pub k: Option<i64>,
    pub surface: Option<&'a SurfaceModel>,
    pub hunt: Option<&'a HuntRun>,
    /// `S_0, S_1, ...` along the hunt.
    pub surfaces: Vec<&'a SurfaceModel>,
    pub gamma: Option<&'a GammaSequence>,
}

fn point_of<'s>(s: &'s SurfaceModel, c: &str) -> Result<&'s ltsurf::config::SingularPoint, CorpusError> {
    s.locate(c)
        .map(|(p, _)| &s.singularities[p])
        .ok_or_else(|| CorpusError::Evaluation(format!("`{c}` is not exceptional")))
}

fn singular_branch_indices(s: &SurfaceModel, c: &str) -> Result<Vec<u64>, CorpusError> {
    germs_of(s, c)?
        .iter()
        .filter(|g| g.point.is_some())
        .map(|g| branch_index(s, g).map_err(CorpusError::from))
        .collect()
}

fn normal_crossings(s: &SurfaceModel, curves: &[String]) -> Result<bool, CorpusError> {
    for c in curves {
        s.config.index_of(c)?;
        if s.is_exceptional(c) {
            return Err(CorpusError::Evaluation(format!("`{c}` is contracted")));
        }
    }
    for p in &s.config.points {
        let on: Vec<usize> = (0..p.branches.len()).filter(|&i| curves.contains(&p.branches[i].curve)).collect();
        if on.len() < 2 {
            continue;
        }
        if on.len() > 2 || on.iter().any(|&i| p.branches[i].kind != BranchKind::Smooth) || p.contact[on[0]][on[1]] != 1 {
            return Ok(false);
        }
        if p.branches.iter().any(|b| s.is_exceptional(&b.curve)) {
            return Ok(false);
        }
    }
    for sp in &s.singularities {
        let through = curves.iter().filter(|c| sp.adjacency.iter().any(|(a, _, _)| a == *c)).count();
        if through >= 2 {
            return Ok(false);
        }
    }
    Ok(true)
}

fn tiger_text(r: Option<TigerReason>) -> String {
    match r {
        None => "none".into(),
        Some(TigerReason::FewNonDuValPoints) => "few-non-du-val-points".into(),
        Some(TigerReason::LargeDegree) => "large-degree".into(),
    }
}

fn eval_surface(q: &Quantity, s: &SurfaceModel) -> Result<Value, CorpusError> {
    Ok(match q {
        Quantity::Graphs => Value::TextList(s.singularities.iter().map(|p| p.graph.to_string()).collect()),
        Quantity::Indices => Value::QList(s.singularities.iter().map(|p| Rational::from_integer(p.index().into())).collect()),
        Quantity::Graph(c) => Value::Text(point_of(s, c)?.graph.to_string()),
        Quantity::Index(c) => Value::Q(Rational::from_integer(point_of(s, c)?.index().into())),
        Quantity::CartierIndex(c) => Value::Q(Rational::from_integer(point_of(s, c)?.cartier_index().into())),
        Quantity::Coefficient(c) => Value::Q(
            s.discrepancy(c).ok_or_else(|| CorpusError::Evaluation(format!("`{c}` is not exceptional")))?,
        ),
        Quantity::PointCoefficient(c) => Value::Q(point_of(s, c)?.coefficient()),
        Quantity::MaxCoefficient => {
            Value::Q(s.singularities.iter().map(|p| p.coefficient()).max().unwrap_or_default())
        }
        Quantity::MinusK(c) => Value::Q(-k_dot(s, c)?),
        Quantity::SelfInt(c) => Value::Q(q_self(s, c)?),
        Quantity::Intersection(c, d) => Value::Q(q_intersection(s, c, d)?),
        Quantity::BranchIndices(c) => Value::QList(
            singular_branch_indices(s, c)?.into_iter().map(|i| Rational::from_integer(i.into())).collect(),
        ),
        Quantity::Uniruled(c) => {
            let idx = singular_branch_indices(s, c)?;
            if idx.len() != 2 {
                return Err(CorpusError::Evaluation(format!(
                    "`{c}` has {} singular branches; the criterion needs two",
                    idx.len()
                )));
            }
            Value::Bool(uniruled_criterion(&-k_dot(s, c)?, idx[0], idx[1]))
        }
        Quantity::KSquared => Value::Q(k_squared(s)?),
        Quantity::Chi => Value::Q(rr_chi(s)?.0),
        Quantity::Tiger => Value::Text(tiger_text(tiger_certificate(s))),
        Quantity::NormalCrossings(cs) => Value::Bool(normal_crossings(s, cs)?),
        _ => unreachable!("not a surface quantity"),
    })
}

fn need<'a, T>(x: Option<&'a T>, what: &str) -> Result<&'a T, CorpusError> {
    x.ok_or_else(|| CorpusError::Evaluation(format!("the case has no {what}")))
}

/// Computes a quantity in a case context.
pub fn evaluate(q: &Quantity, ctx: &Context<'_>) -> Result<Value, CorpusError> {
    let record = |i: usize| -> Result<&ltsurf::hunt::HuntRecord, CorpusError> {
        need(ctx.hunt, "hunt")?
            .state
            .log
            .get(i - 1)
            .ok_or_else(|| CorpusError::Evaluation(format!("the hunt has no step {i}")))
    };
    Ok(match q {
        Quantity::ChainIndex(w) => Value::Q(Rational::from_integer(chain_index_of(w).into())),
        Quantity::BoundaryChain(w, lambda) => {
            let c = ChainSingularity::marked(w.clone())?;
            Value::Q(boundary_coefficient_chain(&c, &eval(lambda, ctx.k)?)?)
        }
        Quantity::HuntEnd => Value::Text(
            match need(ctx.hunt, "hunt")?.end {
                HuntEnd::Net => "net",
                HuntEnd::Smooth => "smooth",
                HuntEnd::StepLimit => "step-limit",
                HuntEnd::Unresolved => "unresolved",
            }
            .into(),
        ),
        Quantity::HuntSteps => Value::Q(Rational::from_integer(need(ctx.hunt, "hunt")?.state.log.len().into())),
        Quantity::StepExtracted(i) => Value::Text(record(*i)?.extracted.clone()),
        Quantity::StepX(i) => Value::Text(record(*i)?.x.clone()),
        Quantity::StepCoefficient(i) => Value::Q(record(*i)?.coefficient.std.clone()),
        Quantity::StepCoefficientEps(i) => Value::Q(record(*i)?.coefficient.eps.clone()),
        Quantity::StepLambda(i) => Value::Q(
            record(*i)?
                .lambda
                .as_ref()
                .map(|l| l.std.clone())
                .ok_or_else(|| CorpusError::Evaluation(format!("step {i} has only an infinitesimal scaling")))?,
        ),
        Quantity::StepSigma(i) => Value::Text(match &record(*i)?.outcome {
            Outcome::Contracted { sigma, .. } => sigma.clone(),
            Outcome::Net { fibre } => format!("net {fibre}"),
        }),
        Quantity::StepSingularities(i) => Value::TextList(record(*i)?.singularities_after.clone()),
        Quantity::StepBoundary(i, c) => Value::Q(record(*i)?.boundary_after.get(c).std),
        Quantity::Gamma(i) => Value::Q(
            need(ctx.gamma, "gamma sequence")?
                .0
                .get(i - 1)
                .map(|(_, m)| m.clone())
                .ok_or_else(|| CorpusError::Evaluation(format!("the gamma sequence has no term {i}")))?,
        ),
        Quantity::At(i, inner) => {
            let s = ctx
                .surfaces
                .get(*i)
                .ok_or_else(|| CorpusError::Evaluation(format!("the hunt did not reach S{i}")))?;
            eval_surface(inner, s)?
        }
        other => eval_surface(other, need(ctx.surface, "surface")?)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ltsurf::q;

    #[test]
    fn parse_quantities() {
        assert_eq!(Quantity::parse("minus-k M").unwrap(), Quantity::MinusK("M".into()));
        assert_eq!(
            Quantity::parse("S3:intersection A B").unwrap(),
            Quantity::At(3, Box::new(Quantity::Intersection("A".into(), "B".into())))
        );
        assert_eq!(Quantity::parse("chain-index 2,5,2").unwrap(), Quantity::ChainIndex(vec![2, 5, 2]));
        assert_eq!(Quantity::parse("step 2 boundary A").unwrap(), Quantity::StepBoundary(2, "A".into()));
        assert!(Quantity::parse("S1:hunt-end").is_err());
        assert!(Quantity::parse("step 0 x").is_err());
        assert!(Quantity::parse("nonsense").is_err());
    }

    #[test]
    fn values_compare_as_multisets() {
        let a = Quantity::Graphs.parse_value("(2) + (3)", None).unwrap();
        let b = Value::TextList(vec!["(3)".into(), "(2)".into()]);
        assert!(a.matches(&b));
        let l = Quantity::Indices.parse_value("[37, 38]", None).unwrap();
        assert!(l.matches(&Value::QList(vec![q(38, 1), q(37, 1)])));
        assert!(Quantity::Indices.parse_value("37", None).is_err());
        assert_eq!(Quantity::Graphs.parse_value("none", None).unwrap(), Value::TextList(vec![]));
    }

    #[test]
    fn chain_quantities_need_no_surface() {
        let ctx = Context { k: None, surface: None, hunt: None, surfaces: vec![], gamma: None };
        let v = evaluate(&Quantity::parse("chain-index 2,5,2,2,2,2").unwrap(), &ctx).unwrap();
        assert_eq!(v, Value::Q(q(37, 1)));
        let v = evaluate(&Quantity::parse("boundary-chain 3,2,2 at 60/67").unwrap(), &ctx).unwrap();
        assert_eq!(v, Value::Q(q(381, 469)));
        assert!(evaluate(&Quantity::KSquared, &ctx).is_err());
    }
}
