use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_moonchain"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path_str(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn stat_reports_the_circled_chain() {
    let out = run(&["stat", path_str(&fixture("fig3.txt"))]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("ne=3 se=2\n"), "{text}");
    assert!(text.contains("ne witness: (5,2),(3,4),(2,5)"), "{text}");
}

#[test]
fn classify_names_the_shape() {
    let out = run(&["classify", path_str(&fixture("fig1a.txt"))]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("class: moon"));
    let out = run(&["classify", path_str(&fixture("fig11_left.txt"))]);
    assert!(stdout(&out).contains("class: row-comparable"), "{}", stdout(&out));
}

#[test]
fn swap_out_of_range_is_a_usage_error() {
    let f = fixture("fig3.txt");
    for swap in ["0", "6", "40"] {
        let out = run(&["apply", "phi", path_str(&f), "--swap", swap]);
        assert_eq!(out.status.code(), Some(2), "swap {swap}");
    }
}

#[test]
fn parse_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    std::fs::write(&bad, "1.1\n").unwrap();
    let out = run(&["stat", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("contiguous"));
    let out = run(&["stat", path_str(&dir.path().join("missing.txt"))]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn apply_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let once = dir.path().join("once.txt");
    let twice = dir.path().join("twice.json");
    let src = fixture("fig12.txt");
    let out = run(&[
        "apply",
        "f",
        path_str(&src),
        "--doc",
        "1",
        "--swap",
        "2",
        "-o",
        path_str(&once),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["apply", "f", path_str(&once), "--swap", "2", "-o", path_str(&twice)]);
    assert_eq!(out.status.code(), Some(0));
    let json = std::fs::read_to_string(&twice).unwrap();
    assert!(json.trim_start().starts_with('{'));
    let back = stdout(&run(&["stat", path_str(&twice)]));
    let original = stdout(&run(&["stat", path_str(&fixture("fig12.txt"))]));
    let first = original.split("\n\n").next().unwrap();
    assert_eq!(back.trim_end(), first.trim_end());
}

#[test]
fn apply_phi_prints_grid_text() {
    let out = run(&["apply", "phi", path_str(&fixture("fig3.txt")), "--swap", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 6);
    assert!(text.lines().all(|l| l.len() == 7));
}

#[test]
fn psi_rejects_rows_with_several_ones() {
    let out = run(&["apply", "psi", path_str(&fixture("fig3.txt")), "--swap", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dist_prints_polynomials() {
    let out = run(&["dist", path_str(&fixture("fig11_left.txt")), "--restricted"]);
    assert_eq!(stdout(&out), "1*q^1 + 37*q^2 + 31*q^3 + 3*q^4\n");
    let out = run(&["dist", path_str(&fixture("m1.txt")), "--restricted", "--joint"]);
    assert!(stdout(&out).ends_with("symmetric\n"));
    let out = run(&[
        "dist",
        path_str(&fixture("fig9_m.txt")),
        "--doc",
        "1",
        "--col-sums",
        "2,1,1",
        "--row-sums",
        "1,1,1,1",
    ]);
    assert_eq!(stdout(&out), "1*q^1 + 7*q^2 + 1*q^3\n");
    let out = run(&["dist", path_str(&fixture("m1.txt"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_reports_violations_with_witnesses() {
    let f = fixture("fig10.txt");
    let out = run(&[
        "verify",
        "coupling-lemma",
        path_str(&f),
        "--doc",
        "1",
        "--swap",
        "3",
        "--relaxed",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(
        text.starts_with("FAIL coupling-lemma: ne(M)=3 ne(M')=4 ne(N)=4 ne(N')=4"),
        "{text}"
    );
    assert_eq!(text.matches("\n\n").count(), 4);

    let out = run(&[
        "verify",
        "theorem1",
        path_str(&fixture("fig9_m.txt")),
        "--doc",
        "1",
        "--swap",
        "2",
        "--all",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "PASS theorem1: 2048 fillings\n");

    let out = run(&["verify", "no-such-property", path_str(&f)]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_output_does_not_depend_on_workers() {
    let args = |w: &'static str| {
        run(&[
            "sweep",
            "--max-rows",
            "3",
            "--max-cols",
            "3",
            "--props",
            "theorem1,theorem2",
            "--workers",
            w,
        ])
    };
    let one = args("1");
    let four = args("4");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(stdout(&one), stdout(&four));
    assert!(stdout(&one).contains("PASS theorem2"));
}

#[test]
fn reproduce_is_stable() {
    for name in ["fig3", "fig8", "fig9", "fig10", "fig11", "fig12", "example52"] {
        let a = run(&["reproduce", name]);
        assert_eq!(a.status.code(), Some(0), "{name}: {}", stdout(&a));
        assert!(stdout(&a).ends_with("PASS\n"));
        assert_eq!(stdout(&a), stdout(&run(&["reproduce", name])));
    }
    let out = run(&["reproduce", "example52"]);
    assert!(stdout(&out).matches("*x^").count() >= 33);
    assert_eq!(run(&["reproduce", "fig99"]).status.code(), Some(2));
}
