use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qtsallis"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

/// Column `name` of the CSV row whose first field equals `q`.
fn csv_field(csv: &str, q: &str, name: &str) -> String {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = header.iter().position(|h| *h == name).unwrap();
    let row = lines.find(|l| l.split(',').next() == Some(q)).unwrap();
    row.split(',').nth(col).unwrap().to_string()
}

fn summary_count(summary: &str) -> usize {
    let tail = summary.split("): ").nth(1).unwrap();
    tail.split(',').next().unwrap().parse().unwrap()
}

#[test]
fn entropy_builtins() {
    let o = run(&["entropy", "--builtin", "maximally-mixed-qubit", "--q", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "0.5\n");
    let o = run(&["entropy", "--builtin", "proposition", "--q", "2"]);
    assert_eq!(stdout(&o), "0.5\n");
}

#[test]
fn entropy_from_files_and_stdin() {
    let dir = TempDir::new().unwrap();
    let pure = write(dir.path(), "pure.json", r#"{"re": [[1, 0], [0, 0]]}"#);
    assert_eq!(stdout(&run(&["entropy", &pure, "--q", "1.5"])), "0\n");
    let o = run_with_stdin(&["entropy", "-", "--q", "2"], r#"{"re": [[0.5, 0], [0, 0.5]]}"#);
    assert_eq!(stdout(&o), "0.5\n");
    let prop = stdout(&run(&["repro", "proposition"]));
    let o = run_with_stdin(&["entropy", "-", "--q", "2"], &prop);
    assert_eq!(stdout(&o), "0.5\n");
}

#[test]
fn entropy_input_errors() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.json", "{ not json");
    assert_eq!(code(&run(&["entropy", &bad, "--q", "2"])), 2);
    let not_state = write(dir.path(), "m.json", r#"{"re": [[2, 0], [0, 0]]}"#);
    assert_eq!(code(&run(&["entropy", &not_state, "--q", "2"])), 2);
    assert_eq!(code(&run(&["entropy", "--builtin", "bell", "--q", "0"])), 2);
    assert_eq!(code(&run(&["entropy", "--builtin", "bell", "--q", "-1"])), 2);
    assert_eq!(code(&run(&["entropy", "--builtin", "bell", "--q", "2", "--nope"])), 2);
    assert_eq!(code(&run(&["entropy", "missing-file.json", "--q", "2"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
}

#[test]
fn ssa_check_exit_codes() {
    let prop = stdout(&run(&["repro", "proposition"]));
    let o = run_with_stdin(&["ssa-check", "-", "--q", "2"], &prop);
    assert_eq!(code(&o), 1);
    assert_eq!(csv_field(&stdout(&o), "2", "deficit"), "-0.25");

    let o = run_with_stdin(&["ssa-check", "-", "--q", "1"], &prop);
    assert_eq!(code(&o), 0);

    let classical = r#"{"dims": [2, 1, 2], "re": [[0.1, 0, 0, 0], [0, 0.2, 0, 0], [0, 0, 0.3, 0], [0, 0, 0, 0.4]]}"#;
    let o = run_with_stdin(&["ssa-check", "-", "--q-grid", "1:5:0.5"], classical);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o).lines().count(), 10);

    let no_dims = r#"{"re": [[0.5, 0], [0, 0.5]]}"#;
    assert_eq!(code(&run_with_stdin(&["ssa-check", "-", "--q", "2"], no_dims)), 2);
    assert_eq!(code(&run_with_stdin(&["ssa-check", "-"], &prop)), 2);
    assert_eq!(code(&run_with_stdin(&["ssa-check", "-", "--q", "2", "--q-grid", "1:2:1"], &prop)), 2);
    assert_eq!(code(&run_with_stdin(&["ssa-check", "-", "--q-grid", "2:1:1"], &prop)), 2);
}

#[test]
fn ssa_check_json_output() {
    let prop = stdout(&run(&["repro", "proposition"]));
    let o = run_with_stdin(&["ssa-check", "-", "--q-grid", "1.5:2:0.5", "--format", "json"], &prop);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1]["deficit"], serde_json::json!(-0.25));
    assert_eq!(rows[1]["thm3_operator_dominance"], serde_json::json!(false));
}

#[test]
fn repro_counterexample_matrix() {
    let o = run(&["repro", "proposition"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["dims"], serde_json::json!([2, 2, 2]));
    let re = v["re"].as_array().unwrap();
    let quarter = [(2, 2), (2, 4), (4, 2), (4, 4), (3, 3), (3, 5), (5, 3), (5, 5)];
    for (i, row) in re.iter().enumerate() {
        for (j, x) in row.as_array().unwrap().iter().enumerate() {
            let want = if quarter.contains(&(i, j)) { 0.25 } else { 0.0 };
            assert_eq!(x.as_f64().unwrap(), want, "entry ({i}, {j})");
        }
    }
    assert!(v.get("im").is_none());
    // default report grid 0.25:3:0.25 on stderr
    let report = stderr(&o);
    assert_eq!(report.lines().count(), 13);
    assert_eq!(csv_field(&report, "2", "deficit"), "-0.25");
    assert_eq!(csv_field(&report, "2", "regularization"), "9.9999999999999995e-07");
}

fn assert_round_trip(args: &[&str]) {
    let dir = TempDir::new().unwrap();
    let report_path = dir.path().join("report.csv");
    let mut full = args.to_vec();
    full.extend(["--report-out", report_path.to_str().unwrap()]);
    let o = run(&full);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let state = write(dir.path(), "state.json", &stdout(&o));
    let again = run(&["ssa-check", &state, "--q-grid", "0.25:3:0.25", "--all-theorems"]);
    assert_eq!(stdout(&again), fs::read_to_string(&report_path).unwrap(), "{args:?}");
}

#[test]
fn repro_output_round_trips_through_ssa_check() {
    assert_round_trip(&["repro", "proposition"]);
    assert_round_trip(&["repro", "entangled-product"]);
    assert_round_trip(&["repro", "bell-family", "--p", "0.6", "--r", "0.55", "--theta", "0.7"]);
    assert_round_trip(&["repro", "bell-family", "--p", "0.5", "--r", "0.6", "--theta", "-1.2"]);
}

#[test]
fn repro_entangled_product_default() {
    let o = run(&["repro", "entangled-product"]);
    assert_eq!(csv_field(&stderr(&o), "2", "deficit"), "-0.25");
    let dir = TempDir::new().unwrap();
    let product = write(dir.path(), "p.json", r#"{"dims": [2, 2], "re": [[1,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]]}"#);
    assert_eq!(code(&run(&["repro", "entangled-product", "--rho12", &product])), 2);
    let mixed3 = write(dir.path(), "r3.json", r#"{"re": [[0.2, 0, 0], [0, 0.3, 0], [0, 0, 0.5]]}"#);
    let o = run(&["repro", "entangled-product", "--rho3", &mixed3]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["dims"], serde_json::json!([2, 2, 3]));
}

#[test]
fn repro_bell_family_at_zero_angle_is_diagonal() {
    let o = run(&["repro", "bell-family", "--p", "0.6", "--r", "0.55", "--theta", "0"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let re = v["re"].as_array().unwrap();
    let lambda = [0.6 * 0.55, 0.4 * 0.55, 0.6 * 0.45, 0.4 * 0.45];
    for (i, row) in re.iter().enumerate() {
        for (j, x) in row.as_array().unwrap().iter().enumerate() {
            let want = if i == j { 0.5 * lambda[i % 4] } else { 0.0 };
            assert!((x.as_f64().unwrap() - want).abs() < 1e-15);
        }
    }
    let report = stderr(&o);
    assert_eq!(csv_field(&report, "1.5", "thm3_operator_dominance"), "true");
    assert_eq!(csv_field(&report, "1.5", "ssa_holds"), "true");
    // p·r > 1 - r
    assert_eq!(code(&run(&["repro", "bell-family", "--p", "1", "--r", "0.6"])), 2);
}

#[test]
fn repro_diag4() {
    let o = run(&["repro", "diag4", "--a", "0.4", "--b", "0.3", "--c", "0.2", "--d", "0.1"]);
    assert_eq!(code(&o), 0);
    let report = stderr(&o);
    assert_eq!(report.lines().count(), 10);
    assert!(report.lines().skip(1).all(|l| l.split(',').nth(3) == Some("true")));
    let gap: f64 = csv_field(&report, "2", "subadditivity_gap").parse().unwrap();
    assert!((gap - 0.2).abs() < 1e-12);
    let lhs: f64 = csv_field(&report, "2", "lhs").parse().unwrap();
    let rhs: f64 = csv_field(&report, "2", "rhs").parse().unwrap();
    assert!((rhs - lhs - gap).abs() < 1e-12);
    assert_eq!(code(&run(&["repro", "diag4", "--a", "0.5", "--b", "0.5", "--c", "0.5", "--d", "0"])), 2);
    let o = run(&["repro", "--q-grid", "0.5:1:0.5", "diag4", "--a", "0.25", "--b", "0.25", "--c", "0.25", "--d", "0.25"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn quasi_command() {
    let dir = TempDir::new().unwrap();
    let rho = write(dir.path(), "rho.json", r#"{"re": [[0.7, 0.1], [0.1, 0.3]], "im": [[0, 0.05], [-0.05, 0]]}"#);
    let sigma = write(dir.path(), "sigma.json", r#"{"re": [[0.4, 0], [0, 0.6]]}"#);
    let a = write(dir.path(), "a.json", r#"{"re": [[1, 2], [0, 1]], "im": [[0, 1], [0, 0]]}"#);
    let same = run(&["quasi", "--rho", &rho, "--sigma", &rho, "--q", "1.5"]);
    assert_eq!(code(&same), 0);
    assert!(stdout(&same).trim().parse::<f64>().unwrap().abs() < 1e-14);
    let spectral = run(&["quasi", "--rho", &rho, "--sigma", &sigma, "--weight", &a, "--q", "0.5"]);
    let oracle = run(&["quasi", "--rho", &rho, "--sigma", &sigma, "--weight", &a, "--q", "0.5", "--oracle"]);
    let s: f64 = stdout(&spectral).trim().parse().unwrap();
    let o: f64 = stdout(&oracle).trim().parse().unwrap();
    assert!((s - o).abs() < 1e-10);
    let singular = write(dir.path(), "sing.json", r#"{"re": [[1, 0], [0, 0]]}"#);
    assert_eq!(code(&run(&["quasi", "--rho", &singular, "--sigma", &sigma, "--q", "2"])), 2);
}

#[test]
fn classical_check_command() {
    let dir = TempDir::new().unwrap();
    let uniform = write(dir.path(), "u.json", r#"{"dims": [2, 2, 2], "weights": [0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125]}"#);
    let o = run(&["classical-check", &uniform, "--q", "2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "q,deficit\n2,0.125\n");
    assert_eq!(code(&run(&["classical-check", &uniform, "--q", "0.5"])), 2);
    let bad = write(dir.path(), "b.json", r#"{"dims": [2, 2, 2], "weights": [0.5]}"#);
    assert_eq!(code(&run(&["classical-check", &bad, "--q", "2"])), 2);
}

#[test]
fn search_known_outcomes() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("f.csv");
    let o = run(&[
        "search", "--ensemble", "classical-diagonal", "--q-grid", "1:3:0.5", "--samples", "200",
        "--out", out.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert_eq!(summary_count(&stdout(&o)), 0);
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 1 + 200 * 5);

    let o = run(&["search", "--dims", "2,2,2", "--q-grid", "1:1:1", "--samples", "300", "--out", out.to_str().unwrap()]);
    assert_eq!(summary_count(&stdout(&o)), 0);
}

#[test]
fn search_input_errors() {
    let dir = TempDir::new().unwrap();
    let unwritable = dir.path().join("no-such-dir").join("f.csv");
    let o = run(&["search", "--samples", "2", "--out", unwritable.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("cannot write"));
    assert_eq!(code(&run(&["search", "--dims", "2,2"])), 2);
    assert_eq!(code(&run(&["search", "--ensemble", "haar"])), 2);
    assert_eq!(code(&run(&["search", "--samples", "0"])), 2);
    assert_eq!(code(&run(&["search", "--dims", "3,2,2", "--inject-proposition"])), 2);
    let o = bin().args(["search", "--samples", "2"]).env("QTSALLIS_THREADS", "0").output().unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn search_is_independent_of_thread_count() {
    let go = |threads: &str| {
        bin()
            .args(["search", "--seed", "5", "--samples", "40", "--q-grid", "0.5:2.5:0.5"])
            .env("QTSALLIS_THREADS", threads)
            .output()
            .unwrap()
    };
    let a = go("1");
    let b = go("4");
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8(a.stdout).unwrap().lines().count(), 1 + 40 * 5);
}

// Frozen run of `search --seed 0 --dims 2,2,2 --q-grid 1.5:2.5:0.5 --samples 2000`.
// The Hilbert-Schmidt ensemble yields no violations there; the counterexample
// has to be injected to produce them.
const GOLDEN_WORST_PLAIN: f64 = 0.0469271835688531;
const GOLDEN_WORST_PLAIN_STATE: &str = "1292";
const GOLDEN_INJECTED: [(&str, f64); 3] = [
    ("2.5", -0.2785954792089683),
    ("2", -0.25),
    ("1.5", -0.17157287525380993),
];

#[test]
fn golden_search_run() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("plain.csv");
    let base = ["search", "--seed", "0", "--dims", "2,2,2", "--q-grid", "1.5:2.5:0.5", "--samples", "2000"];
    let mut args = base.to_vec();
    args.extend(["--out", out.to_str().unwrap()]);
    let o = run(&args);
    assert_eq!(code(&o), 0);
    assert_eq!(summary_count(&stdout(&o)), 0);
    let csv = fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 1 + 6000);
    let top: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(top[0], GOLDEN_WORST_PLAIN_STATE);
    assert_eq!(top[6], "2.5");
    assert!((top[11].parse::<f64>().unwrap() - GOLDEN_WORST_PLAIN).abs() < 1e-12);

    let out = dir.path().join("injected.csv");
    let mut args = base.to_vec();
    args.extend(["--inject-proposition", "--out", out.to_str().unwrap()]);
    let o = run(&args);
    assert_eq!(summary_count(&stdout(&o)), 3);
    let csv = fs::read_to_string(&out).unwrap();
    for (line, (q, deficit)) in csv.lines().skip(1).zip(GOLDEN_INJECTED) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!((f[0], f[1], f[6]), ("0", "proposition", q));
        assert!((f[11].parse::<f64>().unwrap() - deficit).abs() < 1e-12);
    }
    // the next cell is the plain run's best
    let fourth: Vec<&str> = csv.lines().nth(4).unwrap().split(',').collect();
    assert!((fourth[11].parse::<f64>().unwrap() - GOLDEN_WORST_PLAIN).abs() < 1e-12);
}
