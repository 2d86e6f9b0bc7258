//! Regression corpus of worked surface constructions with exact expectations.
//!
//! Each case is a blow-up program plus `expect` lines naming a quantity, its
//! exact value, and a citation label. Parametric cases declare a range for
//! `k` and are expanded by [`run_family`].

mod expr;
mod format;
mod quantity;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use ltsurf::config::{parse_program, surface_report, Boundary, ConfigError, SurfaceModel};
use ltsurf::hunt::{gamma_sequence, run_hunt, GammaSequence, HuntError, HuntRun};
use ltsurf::singularity::SingularityError;

pub use expr::{eval, substitute};
pub use format::parse_corpus;
pub use quantity::{evaluate, Context, Quantity, Value};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{file}:{line}: {msg}")]
    Format { file: String, line: usize, msg: String },
    #[error("expression: {0}")]
    Expression(String),
    #[error("quantity: {0}")]
    Quantity(String),
    #[error("evaluation: {0}")]
    Evaluation(String),
    #[error("k={k} is outside the range {lo}..{hi} of `{id}`")]
    OutOfRange { id: String, k: i64, lo: i64, hi: i64 },
    #[error("build failure: {0}")]
    Build(#[from] ConfigError),
    #[error("hunt failure: {0}")]
    Hunt(#[from] HuntError),
    #[error(transparent)]
    Singularity(#[from] SingularityError),
}

/// One asserted (or informational) quantity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Expectation {
    pub quantity: String,
    pub value: Option<String>,
    /// Restricts the expectation to one member of a family.
    pub when: Option<i64>,
    pub cite: String,
    pub informational: bool,
    pub line: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CorpusCase {
    pub id: String,
    pub source: String,
    pub about: String,
    /// Program text with `{expr}` templates.
    pub program: String,
    pub params: Option<(i64, i64)>,
    pub hunt: Option<usize>,
    pub gamma_start: Option<String>,
    /// A further extraction after the hunt: the curve of the point of this
    /// graph that the named curve passes through.
    pub gamma_extra: Option<(String, String)>,
    pub expected: Vec<Expectation>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Info,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub quantity: String,
    pub expected: Option<String>,
    pub computed: Option<String>,
    pub cite: String,
    pub status: Status,
    /// Why the value could not be computed or parsed.
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseReport {
    pub id: String,
    pub k: Option<i64>,
    pub checks: Vec<Check>,
    /// Set when the program or the hunt failed.
    pub error: Option<String>,
    /// Surface report of `S_0` attached to failing cases.
    pub diagnostics: Option<serde_json::Value>,
}

impl CaseReport {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(|c| c.status != Status::Fail)
    }

    /// `id` or `id[k]`.
    pub fn label(&self) -> String {
        match self.k {
            Some(k) => format!("{}[{k}]", self.id),
            None => self.id.clone(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CorpusReport {
    pub cases: Vec<CaseReport>,
}

impl CorpusReport {
    pub fn passed(&self) -> bool {
        self.cases.iter().all(CaseReport::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CaseReport> {
        self.cases.iter().filter(|c| !c.passed())
    }

    /// Number of asserted checks that passed, and the total asserted.
    pub fn tally(&self) -> (usize, usize) {
        let asserted = self.cases.iter().flat_map(|c| &c.checks).filter(|c| c.status != Status::Info);
        asserted.fold((0, 0), |(p, t), c| (p + usize::from(c.status == Status::Pass), t + 1))
    }

    /// Human-readable summary with a diff line per failing check.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.cases {
            let mark = if c.passed() { "ok  " } else { "FAIL" };
            out += &format!("{mark} {}\n", c.label());
            if let Some(e) = &c.error {
                out += &format!("     error: {e}\n");
            }
            for ch in &c.checks {
                match ch.status {
                    Status::Fail => {
                        out += &format!(
                            "     {}: expected {}, computed {}{}\n",
                            ch.quantity,
                            ch.expected.as_deref().unwrap_or("?"),
                            ch.computed.as_deref().unwrap_or("?"),
                            ch.error.as_deref().map(|e| format!(" ({e})")).unwrap_or_default()
                        );
                    }
                    Status::Info => {
                        out += &format!("     info {}: {}", ch.quantity, ch.computed.as_deref().unwrap_or("?"));
                        if let Some(e) = &ch.expected {
                            out += &format!(" (stated {e})");
                        }
                        out.push('\n');
                    }
                    Status::Pass => {}
                }
            }
        }
        let (p, t) = self.tally();
        out += &format!("{p}/{t} checks passed in {} case runs\n", self.cases.len());
        out
    }
}

const SHIPPED: &[(&str, &str)] = &[
    ("chains.txt", include_str!("../data/chains.txt")),
    ("worked.txt", include_str!("../data/worked.txt")),
    ("families.txt", include_str!("../data/families.txt")),
];

/// The corpus shipped with the crate.
pub fn shipped_corpus() -> Vec<CorpusCase> {
    SHIPPED
        .iter()
        .flat_map(|(f, t)| parse_corpus(f, t).unwrap_or_else(|e| panic!("shipped corpus is malformed: {e}")))
        .collect()
}

/// The surface `S_0` of a case, or `None` if it has no program.
pub fn build_surface(case: &CorpusCase, k: Option<i64>) -> Result<Option<SurfaceModel>, CorpusError> {
    if case.program.trim().is_empty() {
        return Ok(None);
    }
    let text = substitute(&case.program, k)?;
    Ok(Some(parse_program(&text)?.surface()?))
}

struct Computed {
    surface: Option<SurfaceModel>,
    hunt: Option<HuntRun>,
    gamma: Option<GammaSequence>,
}

fn compute(case: &CorpusCase, k: Option<i64>) -> Result<Computed, CorpusError> {
    let surface = build_surface(case, k)?;
    let (mut hunt, mut gamma) = (None, None);
    if let Some(max) = case.hunt {
        let s = surface.as_ref().ok_or_else(|| CorpusError::Evaluation("`hunt` needs a program".into()))?;
        let run = run_hunt(s, &Boundary::new(), max)?;
        let mut history = run.state.history.clone();
        if let Some((curve, graph)) = &case.gamma_extra {
            let last = &run.state.surface;
            let e = last
                .singularities
                .iter()
                .filter(|p| p.graph.to_string() == *graph)
                .find_map(|p| p.adjacency.iter().find(|(c, _, _)| c == curve).map(|(_, v, _)| p.curves[*v].clone()))
                .ok_or_else(|| CorpusError::Evaluation(format!("no {graph} point on {curve} after the hunt")))?;
            history.push((last.clone(), e));
        }
        let m1 = case.gamma_start.as_deref().map(|t| eval(t, k)).transpose()?;
        gamma = Some(gamma_sequence(&history, m1)?);
        hunt = Some(run);
    }
    Ok(Computed { surface, hunt, gamma })
}

fn check(e: &Expectation, ctx: &Context<'_>) -> Check {
    let mut c = Check {
        quantity: e.quantity.clone(),
        expected: None,
        computed: None,
        cite: e.cite.clone(),
        status: if e.informational { Status::Info } else { Status::Fail },
        error: None,
    };
    let res = (|| -> Result<(Option<Value>, Value), CorpusError> {
        let qtext = substitute(&e.quantity, ctx.k)?;
        c.quantity = qtext.clone();
        let q = Quantity::parse(&qtext)?;
        let expected = match &e.value {
            Some(v) => Some(q.parse_value(&substitute(v, ctx.k)?, ctx.k)?),
            None => None,
        };
        if let Some(x) = &expected {
            c.expected = Some(x.to_string());
        }
        Ok((expected, evaluate(&q, ctx)?))
    })();
    match res {
        Ok((expected, computed)) => {
            c.computed = Some(computed.to_string());
            if !e.informational && expected.is_some_and(|x| x.matches(&computed)) {
                c.status = Status::Pass;
            }
        }
        Err(err) => c.error = Some(err.to_string()),
    }
    c
}

fn run_member(case: &CorpusCase, k: Option<i64>) -> CaseReport {
    let mut report = CaseReport { id: case.id.clone(), k, checks: Vec::new(), error: None, diagnostics: None };
    match compute(case, k) {
        Ok(done) => {
            let mut surfaces: Vec<&SurfaceModel> = Vec::new();
            if let Some(run) = &done.hunt {
                surfaces.extend(run.state.history.iter().map(|(s, _)| s));
                if run.end != ltsurf::hunt::HuntEnd::Net {
                    surfaces.push(&run.state.surface);
                }
            } else if let Some(s) = &done.surface {
                surfaces.push(s);
            }
            let ctx = Context { k, surface: done.surface.as_ref(), hunt: done.hunt.as_ref(), surfaces, gamma: done.gamma.as_ref() };
            report.checks =
                case.expected.iter().filter(|e| e.when.is_none() || e.when == k).map(|e| check(e, &ctx)).collect();
            if !report.passed() {
                report.diagnostics = done.surface.as_ref().and_then(|s| surface_report(s).ok()).and_then(|r| serde_json::to_value(r).ok());
            }
        }
        Err(e) => report.error = Some(e.to_string()),
    }
    report
}

/// Runs a case; a parametric case is run at every `k` of its range.
pub fn run_case(case: &CorpusCase) -> Vec<CaseReport> {
    match case.params {
        Some((lo, hi)) => (lo..=hi).map(|k| run_member(case, Some(k))).collect(),
        None => vec![run_member(case, None)],
    }
}

/// Runs a parametric case over a sub-range of its declared range.
pub fn run_family(case: &CorpusCase, ks: std::ops::RangeInclusive<i64>) -> Result<Vec<CaseReport>, CorpusError> {
    let (lo, hi) = case
        .params
        .ok_or_else(|| CorpusError::Evaluation(format!("`{}` is not a family", case.id)))?;
    if let Some(k) = ks.clone().find(|k| !(lo..=hi).contains(k)) {
        return Err(CorpusError::OutOfRange { id: case.id.clone(), k, lo, hi });
    }
    Ok(ks.map(|k| run_member(case, Some(k))).collect())
}

/// Runs every case, in parallel, reporting in corpus order.
pub fn run_all(cases: &[CorpusCase]) -> CorpusReport {
    let cases = cases.par_iter().map(run_case).collect::<Vec<_>>().into_iter().flatten().collect();
    CorpusReport { cases }
}
