use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use tempfile::TempDir;

const EXAMPLE: &str = "1 2 4\n1 3 4\n1 2 3 4\n2 3\n1 2 3\n";
const EXAMPLE_MIS: &str = "1 4\n2 3\n3 3\n4 1\n";

fn misminer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_misminer"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

struct Fixture {
    _dir: TempDir,
    data: PathBuf,
    mis: PathBuf,
}

impl Fixture {
    fn new() -> Self {
        let dir = TempDir::new().unwrap();
        let data = dir.path().join("example.dat");
        let mis = dir.path().join("example.mis");
        fs::write(&data, EXAMPLE).unwrap();
        fs::write(&mis, EXAMPLE_MIS).unwrap();
        Fixture {
            _dir: dir,
            data,
            mis,
        }
    }

    fn data(&self) -> &str {
        self.data.to_str().unwrap()
    }

    fn mis(&self) -> &str {
        self.mis.to_str().unwrap()
    }

    fn path(&self, name: &str) -> PathBuf {
        self._dir.path().join(name)
    }
}

fn lines(o: &Output) -> Vec<String> {
    stdout(o).lines().map(str::to_owned).collect()
}

fn report(o: &Output) -> String {
    stderr(o).lines().last().unwrap_or_default().to_owned()
}

#[test]
fn stats_reports_counts_and_density() {
    let f = Fixture::new();
    let o = misminer(&["stats", f.data()]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(
        out.starts_with("5 transactions, 4 items, density 75.0%"),
        "{out}"
    );
    assert!(out.contains("avg transaction size 3.00"));
}

#[test]
fn stats_on_missing_file_exits_2() {
    let o = misminer(&["stats", "/nonexistent/x.dat"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("cannot open"));
}

#[test]
fn stats_on_malformed_file_exits_2() {
    let f = Fixture::new();
    let bad = f.path("bad.dat");
    fs::write(&bad, "1 2\nx y\n").unwrap();
    let o = misminer(&["stats", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gen_mis_constant_floor() {
    let f = Fixture::new();
    let o = misminer(&["gen-mis", f.data(), "--beta", "0", "--mis-min", "3"]);
    assert!(o.status.success());
    let l = lines(&o);
    assert_eq!(l.len(), 4);
    assert!(l.iter().all(|line| line.ends_with(" 3")));
}

#[test]
fn gen_mis_full_beta_gives_frequencies() {
    let f = Fixture::new();
    let o = misminer(&["gen-mis", f.data(), "--beta", "1", "--mis-min", "1"]);
    let mut l = lines(&o);
    l.sort();
    assert_eq!(l, vec!["1 4", "2 4", "3 4", "4 3"]);
}

#[test]
fn gen_mis_output_feeds_mine() {
    let f = Fixture::new();
    let o = misminer(&[
        "gen-mis",
        f.data(),
        "--beta",
        "1/2",
        "--mis-min",
        "40%",
        "--relative",
    ]);
    assert!(o.status.success());
    let mis = f.path("gen.mis");
    fs::write(&mis, o.stdout).unwrap();
    let o = misminer(&[
        "mine",
        f.data(),
        "--mis",
        mis.to_str().unwrap(),
        "--count-only",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
}

#[test]
fn gen_mis_rejects_bad_flags() {
    let f = Fixture::new();
    for args in [
        vec!["--beta", "1.5", "--mis-min", "1"],
        vec!["--beta", "abc", "--mis-min", "1"],
        vec!["--mis-min", "0"],
        vec!["--mis-min", "2", "--relative"],
        vec!["--mis-min", "1", "--rounding", "sideways"],
        vec!["--bogus"],
    ] {
        let mut full = vec!["gen-mis", f.data()];
        full.extend(args.iter().copied());
        assert_eq!(misminer(&full).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn mine_q0_on_example() {
    let f = Fixture::new();
    let o = misminer(&["mine", f.data(), "--mis", f.mis(), "--query", "q0"]);
    assert!(o.status.success());
    let l = lines(&o);
    assert_eq!(l.len(), 14);
    for expected in ["1 2", "4", "1 2 3 4", "2 3 4"] {
        assert!(l.iter().any(|x| x == expected), "missing {expected}");
    }
    assert!(!l.iter().any(|x| x == "1 2 3"));
    let r = report(&o);
    assert!(
        r.starts_with("sol=14 ") && r.contains(" fails=0 ") && r.contains(" ms="),
        "{r}"
    );
}

#[test]
fn mine_q2_on_example() {
    let f = Fixture::new();
    let o = misminer(&[
        "mine",
        f.data(),
        "--mis",
        f.mis(),
        "--query",
        "q2",
        "--ub",
        "1",
        "--card",
        "2",
    ]);
    let mut l = lines(&o);
    l.sort();
    assert_eq!(l, vec!["1 2", "1 3", "2 3"]);
}

#[test]
fn mine_q3_disjoint_and_distinct() {
    let f = Fixture::new();
    let base = [
        "mine",
        f.data(),
        "--mis",
        f.mis(),
        "--query",
        "q3",
        "-k",
        "2",
        "--ub",
        "1",
        "--card",
        "2",
    ];
    let o = misminer(&base);
    assert!(o.status.success());
    assert!(stdout(&o).is_empty());
    assert!(report(&o).starts_with("sol=0 "));

    let mut distinct = base.to_vec();
    distinct.extend(["--mode", "distinct"]);
    let o = misminer(&distinct);
    let l = lines(&o);
    assert_eq!(l.len(), 3);
    assert!(l.iter().all(|x| x.contains(" | ")));
}

#[test]
fn mine_lex_order_fails_on_example() {
    let f = Fixture::new();
    let o = misminer(&[
        "mine",
        f.data(),
        "--mis",
        f.mis(),
        "--order",
        "lex",
        "--count-only",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).is_empty());
    let r = report(&o);
    assert!(r.starts_with("sol=14 ") && !r.contains(" fails=0 "), "{r}");
}

#[test]
fn mine_writes_to_out_file_and_is_deterministic() {
    let f = Fixture::new();
    let a = f.path("a.txt");
    let b = f.path("b.txt");
    for p in [&a, &b] {
        let o = misminer(&[
            "mine",
            f.data(),
            "--mis",
            f.mis(),
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        assert!(stdout(&o).is_empty());
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert_eq!(text.lines().count(), 14);
}

#[test]
fn mine_with_assigned_profile() {
    let f = Fixture::new();
    let o = misminer(&[
        "mine",
        f.data(),
        "--beta",
        "1",
        "--mis-min",
        "1",
        "--count-only",
    ]);
    assert!(o.status.success());
    assert!(report(&o).starts_with("sol="));
}

#[test]
fn mine_inconsistent_flags_exit_1() {
    let f = Fixture::new();
    let cases: Vec<Vec<&str>> = vec![
        vec!["--mis", f.mis(), "--query", "q1"],
        vec!["--mis", f.mis(), "--query", "q2", "--ub", "1"],
        vec![
            "--mis",
            f.mis(),
            "--query",
            "q3",
            "--ub",
            "1",
            "--card",
            "2",
        ],
        vec!["--mis", f.mis(), "--query", "q0", "-k", "2"],
        vec!["--mis", f.mis(), "--query", "q9"],
        vec!["--mis", f.mis(), "--order", "random"],
        vec!["--mis", f.mis(), "--mis-min", "2"],
        vec!["--query", "q0"],
    ];
    for args in cases {
        let mut full = vec!["mine", f.data()];
        full.extend(args.iter().copied());
        assert_eq!(misminer(&full).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn mine_input_errors_exit_2() {
    let f = Fixture::new();
    let o = misminer(&["mine", "/nonexistent.dat", "--mis", f.mis()]);
    assert_eq!(o.status.code(), Some(2));
    let bad = f.path("bad.mis");
    fs::write(&bad, "1 4\n2 3\n").unwrap();
    let o = misminer(&["mine", f.data(), "--mis", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = misminer(&[
        "mine",
        f.data(),
        "--mis",
        f.mis(),
        "--out",
        "/nonexistent/dir/out",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_passes_on_a_correct_build() {
    let o = misminer(&[
        "verify",
        "--items",
        "8",
        "--transactions",
        "30",
        "--density",
        "0.4",
        "--trials",
        "100",
        "--seed",
        "7",
        "--query",
        "q0",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = misminer(&[
        "verify",
        "--items",
        "6",
        "--transactions",
        "20",
        "--trials",
        "20",
        "--query",
        "q3",
        "-k",
        "2",
        "--ub",
        "5",
        "--card",
        "1",
        "--no-symbreak",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn verify_catches_injected_mutation() {
    let o = misminer(&[
        "verify",
        "--items",
        "8",
        "--transactions",
        "30",
        "--density",
        "0.4",
        "--trials",
        "100",
        "--seed",
        "7",
        "--inject-off-by-one",
    ]);
    assert_eq!(o.status.code(), Some(3));
    let out = stdout(&o);
    assert!(
        out.contains("MISMATCH") && out.contains("missing: "),
        "{out}"
    );
}

#[test]
fn verify_guard_exits_1() {
    let o = misminer(&["verify", "--items", "30"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bench_single_item_completes() {
    let o = misminer(&[
        "bench",
        "--items",
        "1",
        "--transactions",
        "1",
        "--budget-ms",
        "5",
    ]);
    assert!(o.status.success());
    let l = lines(&o);
    assert_eq!(l.len(), 2);
    let cols: Vec<&str> = l[1].split_whitespace().collect();
    assert_eq!(&cols[..2], &["1", "1"]);
    assert!(cols[3].parse::<f64>().unwrap() > 0.0);
}

#[test]
fn bench_sweep_prints_three_points() {
    let o = misminer(&[
        "bench",
        "--scale-sweep",
        "--items",
        "10",
        "--transactions",
        "100",
        "--budget-ms",
        "5",
        "--max-nodes",
        "50",
    ]);
    assert!(o.status.success());
    assert_eq!(lines(&o).len(), 4);
}

#[test]
fn help_and_version_exit_0() {
    assert!(misminer(&["--help"]).status.success());
    assert!(misminer(&["--version"]).status.success());
    assert_eq!(misminer(&[]).status.code(), Some(1));
}
