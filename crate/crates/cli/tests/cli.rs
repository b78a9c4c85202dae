use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(format!("{name}.alg"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shleib"))
        .args(args)
        .output()
        .unwrap()
}

fn run_on(cmd: &str, name: &str, extra: &[&str]) -> Output {
    let path = fixture(name);
    let mut args = vec![cmd, path.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn without_timing(s: &str) -> String {
    s.lines()
        .filter(|l| !l.starts_with("timing_ms"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn valid_fixtures_validate() {
    for name in [
        "l2b",
        "l2_action",
        "abelian3",
        "hemi",
        "lie_abelian",
        "mc_heis",
    ] {
        let o = run_on("validate", name, &[]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
        assert!(stdout(&o).contains("verdict: pass"));
    }
}

#[test]
fn broken_family_exits_one_with_a_witness() {
    let o = run_on("check-sh", "hemi_perturbed", &[]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("check sh-leibniz const=2: fail"), "{text}");
    assert!(text.contains("  witness const=2: (e) -> "), "{text}");
    assert!(text.contains("verdict: fail"));
}

#[test]
fn first_violation_stops_after_the_first_failure() {
    let o = run_on("check-sh", "hemi_perturbed", &["--first-violation"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert_eq!(text.matches("check ").count(), 1, "{text}");
}

#[test]
fn input_errors_exit_two() {
    let o = run_on("check-everything", "l2b", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "));
    assert_eq!(
        run(&["validate", "/nonexistent/file.alg"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run_on("check-sh", "l2b", &["--max-const", "12"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run_on("check-sh", "l2b", &["--max-arity", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run_on("check-sh", "l2b", &["--format", "yaml"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run_on("gauge", "hemi_perturbed", &[]).status.code(),
        Some(2)
    );
}

#[test]
fn malformed_documents_report_located_errors() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    write!(file, "[basis]\nx 0\ny 1\n[bracket]\nx x -> y:1\n").unwrap();
    let o = run(&["validate", file.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 5: "), "{err}");
    assert!(o.stdout.is_empty());
}

#[test]
fn structured_output_is_json() {
    let o = run_on("check-deformation", "mc_heis", &["--format", "structured"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["command"], "check-deformation");
    assert_eq!(v["verdict"], "pass");
    assert_eq!(v["checks"][0]["name"], "deformation");
    assert_eq!(v["checks"][0]["scope"]["max_order"], 3);
    assert_eq!(v["checks"][0]["violations"], 0);
}

#[test]
fn output_is_deterministic() {
    let a = run_on("report-all", "l2_action", &["--max-const", "4"]);
    let b = run_on("report-all", "l2_action", &["--max-const", "4"]);
    assert_eq!(without_timing(&stdout(&a)), without_timing(&stdout(&b)));
}

#[test]
fn report_all_passes_on_the_maurer_cartan_fixture() {
    let o = run_on("report-all", "mc_heis", &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    for check in [
        "check leibniz",
        "check deformation",
        "check sh-leibniz const=6",
        "check key-lemma i=3 j=3",
        "check gauge-coalgebra-map",
    ] {
        assert!(text.contains(check), "{check}");
    }
}

#[test]
fn non_maurer_cartan_fixture_fails_at_order_two() {
    let o = run_on("validate", "mc_heis_non_mc", &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(
        stdout(&o).contains("check maurer-cartan order=2: fail"),
        "{}",
        stdout(&o)
    );
}

#[test]
fn gauge_output_parses_back() {
    let o = run_on("gauge", "hemi", &[]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let start = text.find("output:\n").unwrap() + "output:\n".len();
    let end = text.find("verdict: ").unwrap();
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(&text.as_bytes()[start..end]).unwrap();
    let again = run(&["check-deformation", file.path().to_str().unwrap()]);
    assert_eq!(again.status.code(), Some(0), "{}", stdout(&again));
}

#[test]
fn derive_prints_the_bracket_tables() {
    let o = run_on("derive", "l2_action", &[]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("[l 1] degree 1"));
    assert!(text.contains("[l 2] degree 0"));
}
