use ltsurf::config::{k_dot, k_squared, q_self};
use ltsurf::config::Boundary;
use ltsurf::exact::Eps;
use ltsurf::hunt::run_hunt;
use ltsurf_corpus::{build_surface, parse_corpus, run_all, run_case, run_family, shipped_corpus, CorpusError, Status};

const SMALL: &str = "\
case two-chains
about A pair of chain indices.
expect chain-index 2,3 = 5 cite two chains, first
expect chain-index 4 = 4 cite two chains, second
";

#[test]
fn shipped_corpus_passes() {
    let report = run_all(&shipped_corpus());
    assert!(report.passed(), "{}", report.render());
    let (passed, total) = report.tally();
    assert_eq!(passed, total);
    assert!(total > 150);
}

#[test]
fn ids_are_unique_across_files() {
    let cases = shipped_corpus();
    let mut ids: Vec<_> = cases.iter().map(|c| c.id.as_str()).collect();
    ids.sort_unstable();
    ids.dedup();
    assert_eq!(ids.len(), cases.len());
}

#[test]
fn empty_corpus_gives_empty_report() {
    let cases = parse_corpus("empty.txt", "# nothing\n\n").unwrap();
    assert!(cases.is_empty());
    let report = run_all(&cases);
    assert!(report.cases.is_empty());
    assert!(report.passed());
    assert_eq!(report.tally(), (0, 0));
}

#[test]
fn wrong_expectation_is_reported_with_a_diff() {
    let text = SMALL.replace("= 5 cite", "= 6 cite");
    let report = run_all(&parse_corpus("small.txt", &text).unwrap());
    assert!(!report.passed());
    let failing: Vec<_> = report.failures().collect();
    assert_eq!(failing.len(), 1);
    let check = failing[0].checks.iter().find(|c| c.status == Status::Fail).unwrap();
    assert_eq!(check.expected.as_deref(), Some("6/1"));
    assert_eq!(check.computed.as_deref(), Some("5/1"));
    assert!(report.render().contains("chain-index 2,3: expected 6/1, computed 5/1"));
    assert_eq!(report.tally(), (1, 2));
}

#[test]
fn failing_surface_case_carries_diagnostics() {
    let mut case = shipped_corpus().into_iter().find(|c| c.id == "hunt-to-quadric-cone").unwrap();
    let e = case.expected.iter_mut().find(|e| e.quantity == "index A").unwrap();
    e.value = Some("36".into());
    let report = &run_case(&case)[0];
    assert!(!report.passed());
    let diag = report.diagnostics.as_ref().expect("surface report attached");
    assert!(diag.to_string().contains("2,5,2,2,2,2"));
}

#[test]
fn informational_lines_never_fail() {
    let text = "case noted\ninfo chain-index 2,3 = 7 cite noted, wrong on purpose\n";
    let report = run_all(&parse_corpus("noted.txt", text).unwrap());
    assert!(report.passed());
    assert_eq!(report.cases[0].checks[0].status, Status::Info);
    assert_eq!(report.tally(), (0, 0));
}

#[test]
fn family_range_is_enforced() {
    let case = shipped_corpus().into_iter().find(|c| c.id == "add-2-3-2-point").unwrap();
    let reports = run_family(&case, 5..=5).unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0].label(), "add-2-3-2-point[5]");
    assert!(reports[0].passed());
    match run_family(&case, 4..=6) {
        Err(CorpusError::OutOfRange { k: 6, lo: 4, hi: 5, .. }) => {}
        other => panic!("expected an out-of-range error, got {other:?}"),
    }
    let fixed = shipped_corpus().into_iter().find(|c| c.id == "hunt-to-quadric-cone").unwrap();
    assert!(run_family(&fixed, 1..=1).is_err());
}

#[test]
fn malformed_program_is_a_case_error() {
    let text = "case broken\nsurface P2\ncurve A degree 1\nblowup nowhere\nexpect index A = 1 cite broken program\n";
    let report = run_all(&parse_corpus("broken.txt", text).unwrap());
    assert!(!report.passed());
    assert!(report.cases[0].error.is_some());
}

/// On a rank one surface every curve class is a multiple of `K`.
#[test]
fn degree_identity_on_plane_surfaces() {
    let mut checked = 0;
    for case in shipped_corpus().iter().filter(|c| c.program.contains("surface P2")) {
        let ks: Vec<Option<i64>> = match case.params {
            Some((lo, hi)) => (lo..=hi).map(Some).collect(),
            None => vec![None],
        };
        for k in ks {
            let s = build_surface(case, k).unwrap().unwrap();
            let k2 = k_squared(&s).unwrap();
            for c in s.kept_curves() {
                let kc = k_dot(&s, &c).unwrap();
                assert_eq!(k2.clone() * q_self(&s, &c).unwrap(), kc.clone() * kc, "{} at {k:?}, curve {c}", case.id);
                checked += 1;
            }
        }
    }
    assert!(checked > 50);
}

/// Along every shipped hunt the scaling factors are at least one and each
/// tracked boundary component gains coefficient at every step.
#[test]
fn hunts_only_raise_coefficients() {
    let one = Eps::one();
    let mut compared = 0;
    for case in shipped_corpus().iter().filter(|c| c.hunt.is_some() && c.params.is_none()) {
        let s = build_surface(case, None).unwrap().unwrap();
        let run = run_hunt(&s, &Boundary::new(), case.hunt.unwrap()).unwrap();
        let mut before = Boundary::new();
        for rec in &run.state.log {
            if let Some(l) = &rec.lambda {
                assert!(*l >= one, "{}: scaling {l:?} at {}", case.id, rec.extracted);
            }
            assert!(rec.boundary_after.is_boundary(), "{}: after {}", case.id, rec.extracted);
            for c in before.support() {
                if rec.boundary_after.support().contains(&c) {
                    assert!(rec.boundary_after.get(&c) > before.get(&c), "{}: {c} at {}", case.id, rec.extracted);
                    compared += 1;
                }
            }
            before = rec.boundary_after.clone();
        }
    }
    assert!(compared >= 3);
}
