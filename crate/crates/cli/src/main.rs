//! `ltsurf`: exact computations on log terminal surface singularities and
//! rank one log del Pezzo surfaces.
//!
//! Exit codes: 0 success, 1 computation error, 2 usage error, 3 corpus failure.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use ltsurf::config::{parse_program, surface_report, Boundary, SurfaceReport};
use ltsurf::criteria::{bogomolov_rational, toric_k2, uniruled_criterion};
use ltsurf::hunt::{hunt_log_json, run_hunt, HuntRecord, Outcome};
use ltsurf::singularity::{
    discrepancies, enumerate_small_coefficient, enumerate_small_index, spectral_value, star_coefficient,
    ChainSingularity, EnumerationEntry, SingularityGraph, StarSingularity,
};
use ltsurf::{fmt_q, parse_q, EpsRational, Rational};

#[derive(Parser)]
#[command(name = "ltsurf", version, about = "Exact intersection theory for log terminal surfaces")]
struct Cli {
    /// Print JSON instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Index, discrepancies, coefficient and spectral value of a chain such as `2,5,2` or `3,2@R`.
    Chain {
        #[arg(value_parser = parse_chain)]
        weights: ChainSingularity,
    },
    /// Discrepancies and coefficient of a star such as `star(2; 2 | 2 | 3)` or `2;2|2|3`.
    Star {
        #[arg(value_parser = parse_star)]
        graph: StarSingularity,
    },
    /// Surface report of a blow-up program.
    Build {
        #[arg(short, long)]
        file: PathBuf,
    },
    /// Hunt log of a blow-up program with empty boundary.
    Hunt {
        #[arg(short, long)]
        file: PathBuf,
        #[arg(long, default_value_t = 10)]
        max_steps: usize,
    },
    /// Certificate checks.
    Check {
        #[command(subcommand)]
        check: Check,
    },
    /// Classification lists.
    Enumerate {
        #[command(subcommand)]
        list: Enumerate,
    },
    /// `K²` of the toric surface with indices `p q r`.
    Toric {
        #[arg(value_parser = clap::value_parser!(i64).range(1..))]
        p: i64,
        #[arg(value_parser = clap::value_parser!(i64).range(1..))]
        q: i64,
        #[arg(value_parser = clap::value_parser!(i64).range(1..))]
        r: i64,
    },
    /// Runs the regression corpus (the shipped one unless files are given).
    VerifyPaper {
        #[arg(long = "corpus")]
        files: Vec<PathBuf>,
    },
}

#[derive(Subcommand)]
enum Check {
    /// Bogomolov bound for the indices of the singular points off the boundary.
    Bogomolov {
        #[arg(value_parser = parse_indices)]
        indices: Indices,
        /// Number of components of a genus zero boundary.
        #[arg(long, default_value_t = 0)]
        boundary_components: usize,
    },
    /// Uniruledness inequality for a curve with `-K·C` and two branch indices.
    Uniruled {
        #[arg(value_parser = parse_rational, allow_hyphen_values = true)]
        minus_k: Rational,
        x: u64,
        y: u64,
    },
}

#[derive(Subcommand)]
enum Enumerate {
    /// Non Du Val points with coefficient below the bound (at most 3/5).
    SmallCoefficient {
        #[arg(value_parser = parse_rational)]
        bound: Rational,
    },
    /// Non Du Val points of index at most `n`.
    SmallIndex { n: i64 },
}

struct Output {
    text: String,
    json: Value,
    corpus_failed: bool,
}

impl Output {
    fn new(text: String, json: Value) -> Self {
        Output { text, json, corpus_failed: false }
    }
}

fn fmt_eps(x: &EpsRational) -> String {
    let eps = &x.eps;
    if num_traits::Zero::is_zero(eps) {
        fmt_q(&x.std)
    } else {
        format!("{} + ({})ε", fmt_q(&x.std), fmt_q(eps))
    }
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    parse_q(s).ok_or_else(|| format!("`{s}` is not a rational number"))
}

fn parse_chain(s: &str) -> Result<ChainSingularity, String> {
    s.parse().map_err(|e: ltsurf::singularity::SingularityError| e.to_string())
}

fn parse_star(s: &str) -> Result<StarSingularity, String> {
    let text = if s.trim_start().starts_with("star(") { s.to_string() } else { format!("star({s})") };
    text.parse().map_err(|e: ltsurf::singularity::SingularityError| e.to_string())
}

/// Comma-separated positive indices.
#[derive(Clone, Debug)]
struct Indices(Vec<u64>);

fn parse_indices(s: &str) -> Result<Indices, String> {
    let idx = s
        .split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| match x.trim().parse::<u64>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(format!("`{x}` is not a positive index")),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Indices(idx))
}

fn chain(c: &ChainSingularity) -> Result<Output> {
    let mut c = c.clone();
    if !c.marked_left() && !c.marked_right() {
        c = c.with_marks(true, false);
    }
    let d = discrepancies(&SingularityGraph::Chain(c.clone()))?;
    let k = spectral_value(&c)?;
    let e: Vec<String> = d.e.iter().map(fmt_q).collect();
    let text = format!(
        "chain {c}\nindex {}\ndiscrepancies {}\ncoefficient {}\nspectral value {k}\n",
        c.index(),
        e.join(" "),
        fmt_q(&d.coefficient)
    );
    let json = json!({
        "chain": c.to_string(),
        "index": c.index(),
        "discrepancies": e,
        "coefficient": fmt_q(&d.coefficient),
        "spectralValue": k,
    });
    Ok(Output::new(text, json))
}

fn star(s: &StarSingularity) -> Result<Output> {
    let d = discrepancies(&SingularityGraph::Star(s.clone()))?;
    let c = star_coefficient(s)?;
    let e: Vec<String> = d.e.iter().map(fmt_q).collect();
    let b = s.branch_indices();
    let text = format!(
        "star {s}\nbranch indices {} {} {}\ndeterminant {}\ndiscrepancies {}\ncoefficient {}\n",
        b[0],
        b[1],
        b[2],
        d.det_abs,
        e.join(" "),
        fmt_q(&c)
    );
    let json = json!({
        "star": s.to_string(),
        "branchIndices": b,
        "determinant": d.det_abs,
        "discrepancies": e,
        "coefficient": fmt_q(&c),
    });
    Ok(Output::new(text, json))
}

fn read_program(file: &PathBuf) -> Result<ltsurf::config::SurfaceModel> {
    let text = std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    Ok(parse_program(&text)?.surface()?)
}

fn render_report(r: &SurfaceReport) -> String {
    let mut out = String::new();
    for s in &r.singularities {
        out += &format!(
            "point {} index {} cartier index {} coefficient {}\n  curves {}\n  discrepancies {}\n",
            s.graph,
            s.index,
            s.cartier_index,
            s.coefficient,
            s.curves.join(" "),
            s.discrepancies.join(" ")
        );
        if !s.markings.is_empty() {
            out += &format!("  meets {}\n", s.markings.join(" "));
        }
    }
    out += &format!("K^2 {}\n", r.k_squared.as_deref().unwrap_or("undefined"));
    for c in &r.curves {
        out += &format!("curve {}", c.id);
        if let (Some(k), Some(s)) = (&c.k_deg, &c.self_int) {
            out += &format!(" K.C {k} C^2 {s}");
        }
        let singular: Vec<String> =
            c.germs.iter().filter(|g| g.point.is_some()).map(|g| format!("{}:{}", g.id, g.branch_index)).collect();
        if !singular.is_empty() {
            out += &format!(" branches {}", singular.join(" "));
        }
        out.push('\n');
    }
    out
}

fn build(file: &PathBuf) -> Result<Output> {
    let r = surface_report(&read_program(file)?)?;
    Ok(Output::new(render_report(&r), serde_json::to_value(&r)?))
}

fn render_step(i: usize, r: &HuntRecord) -> String {
    let lambda = r.lambda.as_ref().map(fmt_eps).unwrap_or_else(|| "limit".into());
    let outcome = match &r.outcome {
        Outcome::Contracted { sigma, q } => format!("contract {sigma} to {q}"),
        Outcome::Net { fibre } => format!("net with fibre {fibre}"),
    };
    format!(
        "step {i}: extract {} from {} coefficient {} lambda {lambda}; {outcome}; points {}\n",
        r.extracted,
        r.x,
        fmt_eps(&r.coefficient),
        if r.singularities_after.is_empty() { "none".into() } else { r.singularities_after.join(" + ") }
    )
}

fn hunt(file: &PathBuf, max_steps: usize) -> Result<Output> {
    let run = run_hunt(&read_program(file)?, &Boundary::new(), max_steps)?;
    let mut text: String = run.state.log.iter().enumerate().map(|(i, r)| render_step(i + 1, r)).collect();
    let end = serde_json::to_value(&run.end)?;
    text += &format!("end {}\n", end.as_str().unwrap_or_default());
    Ok(Output::new(text, json!({"steps": hunt_log_json(&run.state.log), "end": end})))
}

fn check(c: &Check) -> Result<Output> {
    match c {
        Check::Bogomolov { indices, boundary_components } => {
            let idx = &indices.0;
            let ok = bogomolov_rational(idx, *boundary_components);
            Ok(Output::new(format!("bogomolov {ok}\n"), json!({"indices": idx, "bogomolov": ok})))
        }
        Check::Uniruled { minus_k, x, y } => {
            let kz = minus_k;
            let ok = uniruled_criterion(kz, *x, *y);
            Ok(Output::new(
                format!("uniruled {ok}\n"),
                json!({"minusK": fmt_q(kz), "x": x, "y": y, "uniruled": ok}),
            ))
        }
    }
}

fn enumerate(e: &Enumerate) -> Result<Output> {
    match e {
        Enumerate::SmallCoefficient { bound } => {
            let entries = enumerate_small_coefficient(bound)?;
            let mut text = String::new();
            for entry in &entries {
                text += &match entry {
                    EnumerationEntry::Family(f) => {
                        let range = match f.j_max {
                            Some(m) => format!("{}..{m}", f.j_min),
                            None => format!("{}..", f.j_min),
                        };
                        let e = f.closed_form_string().unwrap_or_else(|| "varies".into());
                        format!("{} j={range} e={e} {:?}\n", f.template, f.stratum)
                    }
                    EnumerationEntry::Sporadic { graph, coefficient, stratum } => {
                        format!("{graph} e={coefficient} {stratum:?}\n")
                    }
                };
            }
            Ok(Output::new(text, serde_json::to_value(&entries)?))
        }
        Enumerate::SmallIndex { n } => {
            let chains = enumerate_small_index(*n)?;
            let text: String = chains.iter().map(|c| format!("({}) index {}\n", c, c.index())).collect();
            let json: Vec<Value> = chains.iter().map(|c| json!({"chain": c.to_string(), "index": c.index()})).collect();
            Ok(Output::new(text, Value::Array(json)))
        }
    }
}

fn verify(files: &[PathBuf]) -> Result<Output> {
    let cases = if files.is_empty() {
        ltsurf_corpus::shipped_corpus()
    } else {
        let mut cases = Vec::new();
        for f in files {
            let text = std::fs::read_to_string(f).with_context(|| format!("reading {}", f.display()))?;
            cases.extend(ltsurf_corpus::parse_corpus(&f.display().to_string(), &text)?);
        }
        cases
    };
    let report = ltsurf_corpus::run_all(&cases);
    let mut out = Output::new(report.render(), serde_json::to_value(&report)?);
    out.corpus_failed = !report.passed();
    Ok(out)
}

fn run(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Chain { weights } => chain(weights),
        Command::Star { graph } => star(graph),
        Command::Build { file } => build(file),
        Command::Hunt { file, max_steps } => hunt(file, *max_steps),
        Command::Check { check: c } => check(c),
        Command::Enumerate { list } => enumerate(list),
        Command::Toric { p, q, r } => {
            let k2 = fmt_q(&toric_k2(*p, *q, *r));
            Ok(Output::new(format!("K^2 {k2}\n"), json!({"indices": [p, q, r], "kSquared": k2})))
        }
        Command::VerifyPaper { files } => verify(files),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("JSON values serialize"));
            } else {
                print!("{}", out.text);
            }
            if out.corpus_failed {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
