//! The corpus text format: blow-up program lines interleaved with directives.
//!
//! ```text
//! case <id>
//! about <free text>
//! param k <lo>..<hi>
//! hunt <max steps>
//! gamma-start <expr>
//! gamma-extra <curve> <graph>
//! expect <quantity> = <value> [when k=<n>] cite <label>
//! info <quantity> [= <value>] [when k=<n>] cite <label>
//! ```
//!
//! Every other non-comment line belongs to the case's blow-up program. `{expr}`
//! in program lines, quantities and values is replaced by its value at `k`.

use crate::{CorpusCase, CorpusError, Expectation};

fn err(file: &str, line: usize, msg: impl Into<String>) -> CorpusError {
    CorpusError::Format { file: file.to_string(), line, msg: msg.into() }
}

fn parse_expectation(file: &str, line: usize, body: &str, informational: bool) -> Result<Expectation, CorpusError> {
    let (body, cite) = body.rsplit_once(" cite ").ok_or_else(|| err(file, line, "missing `cite <label>`"))?;
    let cite = cite.trim();
    if cite.is_empty() {
        return Err(err(file, line, "empty citation"));
    }
    let (body, when) = match body.rsplit_once(" when ") {
        Some((b, w)) => {
            let n = w
                .trim()
                .strip_prefix("k=")
                .and_then(|n| n.trim().parse::<i64>().ok())
                .ok_or_else(|| err(file, line, format!("invalid `when {w}`")))?;
            (b, Some(n))
        }
        None => (body, None),
    };
    let (quantity, value) = match body.split_once(" = ") {
        Some((q, v)) => (q.trim(), Some(v.trim().to_string())),
        None if informational => (body.trim(), None),
        None => return Err(err(file, line, "missing ` = <value>`")),
    };
    if quantity.is_empty() {
        return Err(err(file, line, "missing quantity"));
    }
    Ok(Expectation { quantity: quantity.to_string(), value, when, cite: cite.to_string(), informational, line })
}

/// Parses one corpus file into its cases.
pub fn parse_corpus(file: &str, text: &str) -> Result<Vec<CorpusCase>, CorpusError> {
    let mut cases: Vec<CorpusCase> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.trim();
        if body.is_empty() || body.starts_with('#') {
            continue;
        }
        let (kw, rest) = body.split_once(char::is_whitespace).unwrap_or((body, ""));
        let rest = rest.trim();
        if kw == "case" {
            if rest.is_empty() || rest.contains(char::is_whitespace) {
                return Err(err(file, line, "expected `case <id>`"));
            }
            if cases.iter().any(|c| c.id == rest) {
                return Err(err(file, line, format!("duplicate case `{rest}`")));
            }
            cases.push(CorpusCase { id: rest.to_string(), source: file.to_string(), ..Default::default() });
            continue;
        }
        let case = cases.last_mut().ok_or_else(|| err(file, line, "content before the first `case`"))?;
        match kw {
            "about" => {
                if !case.about.is_empty() {
                    case.about.push(' ');
                }
                case.about.push_str(rest);
            }
            "param" => {
                let range = rest
                    .strip_prefix("k ")
                    .and_then(|r| r.trim().split_once(".."))
                    .and_then(|(a, b)| Some((a.trim().parse::<i64>().ok()?, b.trim().parse::<i64>().ok()?)))
                    .filter(|(a, b)| a <= b)
                    .ok_or_else(|| err(file, line, "expected `param k <lo>..<hi>`"))?;
                case.params = Some(range);
            }
            "hunt" => {
                let n = rest.parse::<usize>().ok().filter(|&n| n >= 1);
                case.hunt = Some(n.ok_or_else(|| err(file, line, "expected `hunt <max steps>`"))?);
            }
            "gamma-start" => case.gamma_start = Some(rest.to_string()),
            "gamma-extra" => {
                let (curve, graph) =
                    rest.split_once(' ').ok_or_else(|| err(file, line, "expected `gamma-extra <curve> <graph>`"))?;
                case.gamma_extra = Some((curve.trim().to_string(), graph.trim().to_string()));
            }
            "expect" => case.expected.push(parse_expectation(file, line, rest, false)?),
            "info" => case.expected.push(parse_expectation(file, line, rest, true)?),
            _ => {
                case.program.push_str(body);
                case.program.push('\n');
            }
        }
    }
    for c in &cases {
        if c.gamma_extra.is_some() && c.hunt.is_none() {
            return Err(err(file, 0, format!("case `{}` uses `gamma-extra` without `hunt`", c.id)));
        }
        for e in &c.expected {
            if let Some(k) = e.when {
                match c.params {
                    Some((lo, hi)) if (lo..=hi).contains(&k) => {}
                    _ => return Err(err(file, e.line, format!("k={k} outside the declared range of `{}`", c.id))),
                }
            }
        }
    }
    Ok(cases)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directives_and_program() {
        let text = "# comment\ncase demo\nabout a demo\nparam k 4..5\nsurface P2\ncurve L degree 1\n\
                    expect k2 = 9 cite plane\nexpect index A = 31 when k=4 cite table\ninfo self L cite note\n";
        let cases = parse_corpus("demo.txt", text).unwrap();
        assert_eq!(cases.len(), 1);
        let c = &cases[0];
        assert_eq!(c.program, "surface P2\ncurve L degree 1\n");
        assert_eq!(c.params, Some((4, 5)));
        assert_eq!(c.expected.len(), 3);
        assert_eq!(c.expected[1].when, Some(4));
        assert_eq!(c.expected[1].value.as_deref(), Some("31"));
        assert!(c.expected[2].informational && c.expected[2].value.is_none());
    }

    #[test]
    fn errors_carry_lines() {
        let e = parse_corpus("f", "case a\nexpect k2 = 9\n").unwrap_err();
        assert!(matches!(e, CorpusError::Format { line: 2, .. }));
        assert!(parse_corpus("f", "surface P2\n").is_err());
        assert!(parse_corpus("f", "case a\nexpect k2 = 9 when k=3 cite x\n").is_err());
        assert!(parse_corpus("f", "case a\ncase a\n").is_err());
    }
}
