use std::io::Write;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_operad-lab"));
    c.env_remove("OPERAD_LAB_CONFIG");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn compose_prints_four_terms() {
    let o = run(&["compose", "2(1,3) o_2 1(2)"]);
    assert_eq!(o.status.code(), Some(0));
    let mut lines: Vec<String> = stdout(&o).lines().map(str::to_string).collect();
    lines.sort();
    assert_eq!(lines, ["1 2(1,3(4))", "1 2(1,3,4)", "1 2(3(1),4)", "1 2(3(1,4))"]);
}

#[test]
fn compose_units() {
    assert_eq!(stdout(&run(&["compose", "1 o_1 1(2)"])).trim(), "1 1(2)");
    assert_eq!(stdout(&run(&["compose", "1(2) o_2 1"])).trim(), "1 1(2)");
}

#[test]
fn compose_rejects_bad_input() {
    assert_eq!(run(&["compose", "1(2) o_5 1"]).status.code(), Some(64));
    assert_eq!(run(&["compose", "1(("]).status.code(), Some(64));
}

#[test]
fn verify_pass_and_report_shape() {
    let o = run(&["verify", "th3.1", "--max-weight", "4", "--mode", "exact"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("\"schema_version\": 1"));
    assert!(s.contains("\"verdict\": \"pass\""));
    assert!(s.contains("\"mode\": \"exact\""));
}

#[test]
fn verify_mismatch_exit_code() {
    let o = run(&["verify", "th3.4", "--max-weight", "4"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("\"verdict\": \"fail\""));
}

#[test]
fn verify_cap_exit_code() {
    let o = run(&["verify", "th5.1", "--max-arity", "3", "--max-alphas", "6"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["verify", "th9.9"]).status.code(), Some(64));
    assert_eq!(run(&["verify", "th3.1", "--mode", "fuzzy"]).status.code(), Some(64));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("lab.conf");
    let out = dir.path().join("report.json");
    let mut f = std::fs::File::create(&cfg).unwrap();
    writeln!(f, "# small run\nmax_weight = 3\nmode = exact\nout = {}", out.display()).unwrap();
    let o = bin().env("OPERAD_LAB_CONFIG", &cfg).args(["verify", "th3.2"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let json = std::fs::read_to_string(&out).unwrap();
    assert!(json.contains("\"max_weight\": 3"));
    let o = bin().env("OPERAD_LAB_CONFIG", &cfg).args(["verify", "th3.2", "--max-weight", "4"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(std::fs::read_to_string(&out).unwrap().contains("\"max_weight\": 4"));
}

#[test]
fn corrupted_sign_is_internal_failure() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("flip.conf");
    std::fs::write(&cfg, "suspension_flip = 2,2,2\n").unwrap();
    let o = bin().env("OPERAD_LAB_CONFIG", &cfg).args(["verify", "th2.1", "--max-weight", "3"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reports_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let o = run(&["verify", "th5.1", "--max-arity", "2", "--max-alphas", "3", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn dims_table() {
    let o = run(&["dims", "operad:PL", "lie_to_pl", "--max-arity", "3", "--max-weight", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("operad:PL\t3\t9"));
    assert!(s.contains("lie_to_pl\t4\t2"));
    assert_eq!(run(&["dims", "tw:x"]).status.code(), Some(64));
}
