use std::path::PathBuf;
use std::process::{Command, Output};

const PROGRAM: &str = "\
surface P2
curve A degree 1
curve B degree 2
curve D degree 1
curve M degree 1 analysis
point d on B D contact B:D=2
point a on A B
point b on A B M contact B:M=2
blowup d along D times 3
blowup b along B times 5
blowup a along A times 5
";

fn ltsurf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ltsurf")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn temp_file(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ltsurf-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn chain_report() {
    let o = ltsurf(&["chain", "2,5,2,2,2,2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("index 37\n"), "{s}");
    assert!(s.contains("coefficient 30/37\n"));
    assert!(s.contains("spectral value 15\n"));
}

#[test]
fn chain_json() {
    let o = ltsurf(&["chain", "3,2@R", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["index"], 5);
    assert_eq!(v["coefficient"], "2/5");
    assert_eq!(v["spectralValue"], 1);
}

#[test]
fn star_report() {
    let o = ltsurf(&["star", "2;2|2|3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("coefficient 1/2\n"));
}

#[test]
fn toric_and_checks() {
    assert_eq!(stdout(&ltsurf(&["toric", "1", "1", "1"])), "K^2 9/1\n");
    assert_eq!(stdout(&ltsurf(&["toric", "3", "7", "5"])), "K^2 15/7\n");
    assert_eq!(stdout(&ltsurf(&["check", "bogomolov", "2,5,7,17"])), "bogomolov false\n");
    assert_eq!(stdout(&ltsurf(&["check", "bogomolov", "3,3,3,1000"])), "bogomolov true\n");
    assert_eq!(stdout(&ltsurf(&["check", "uniruled", "4/37", "37", "37"])), "uniruled true\n");
}

#[test]
fn enumerations() {
    let s = stdout(&ltsurf(&["enumerate", "small-coefficient", "3/5"]));
    assert!(s.contains("(3,A_j) j=0.. e=(j+1)/(2j+3) BelowHalf\n"), "{s}");
    assert!(s.contains("(2,4) e=4/7 AboveHalf\n"));
    let s = stdout(&ltsurf(&["enumerate", "small-index", "7"]));
    assert_eq!(s.lines().count(), 8);
    assert_eq!(ltsurf(&["enumerate", "small-coefficient", "2/3"]).status.code(), Some(1));
}

#[test]
fn build_and_hunt() {
    let p = temp_file("quadric-cone.txt", PROGRAM);
    let p = p.to_str().unwrap();
    let o = ltsurf(&["build", "-f", p]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("point (2,5,2,2,2,2) index 37"), "{s}");
    assert!(s.contains("K^2 8/703\n"));
    assert!(s.contains("curve M K.C -4/37"));

    let v: serde_json::Value = serde_json::from_slice(&ltsurf(&["--json", "build", "-f", p]).stdout).unwrap();
    assert_eq!(v["kSquared"], "8/703");
    assert_eq!(v["singularities"][1]["index"], 38);

    let s = stdout(&ltsurf(&["hunt", "-f", p, "--max-steps", "6"]));
    assert!(s.starts_with("step 1: extract A from (2,5,2,2,2,2) coefficient 30/37"), "{s}");
    assert!(s.ends_with("end net\n"));
    let v: serde_json::Value = serde_json::from_slice(&ltsurf(&["hunt", "-f", p, "--json"]).stdout).unwrap();
    assert_eq!(v["end"], "net");
    assert_eq!(v["steps"].as_array().unwrap().len(), 4);
}

#[test]
fn output_is_byte_stable() {
    let p = temp_file("stable.txt", PROGRAM);
    let args = ["--json", "build", "-f", p.to_str().unwrap()];
    assert_eq!(ltsurf(&args).stdout, ltsurf(&args).stdout);
    let args = ["enumerate", "small-coefficient", "3/5"];
    assert_eq!(ltsurf(&args).stdout, ltsurf(&args).stdout);
}

#[test]
fn verify_paper_exit_codes() {
    let o = ltsurf(&["verify-paper"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let bad = temp_file("bad.txt", "case off-by-one\nexpect chain-index 2,3 = 6 cite deliberately wrong\n");
    let o = ltsurf(&["verify-paper", "--corpus", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("expected 6/1, computed 5/1"));
    let malformed = temp_file("malformed.txt", "expect chain-index 2 = 2 cite outside a case\n");
    assert_eq!(ltsurf(&["verify-paper", "--corpus", malformed.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn usage_and_computation_errors() {
    assert_eq!(ltsurf(&[]).status.code(), Some(2));
    assert_eq!(ltsurf(&["chain", "2,1"]).status.code(), Some(2));
    assert_eq!(ltsurf(&["toric", "0", "1", "1"]).status.code(), Some(2));
    assert_eq!(ltsurf(&["check", "bogomolov", "2,x"]).status.code(), Some(2));
    let o = ltsurf(&["build", "-f", "/nonexistent/program.txt"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: reading"));
    let broken = temp_file("broken.txt", "surface P2\nblowup nowhere\n");
    assert_eq!(ltsurf(&["build", "-f", broken.to_str().unwrap()]).status.code(), Some(1));
}
