use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lacunary")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lacunary-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn bound_with_oracle() {
    let o = run(&["bound", "--q", "379", "--f", "x^96+x+317", "--d", "2", "--oracle"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("best: 6 "), "{out}");
    assert!(out.contains("oracle: 6 nonzero roots {21, 37, 89, 303, 322, 365}"), "{out}");
}

#[test]
fn bound_csv_has_lacunary_row() {
    let o = run(&["bound", "--q", "47", "--f", "x^22+22x^2+24", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut rows = csv::Reader::from_reader(out.as_bytes());
    assert_eq!(rows.headers().unwrap().iter().collect::<Vec<_>>(), ["method", "d", "applicable", "value", "witness"]);
    let hit = rows
        .records()
        .map(|r| r.unwrap())
        .any(|r| &r[0] == "lacunary" && &r[1] == "2" && &r[3] == "6");
    assert!(hit, "{out}");
}

#[test]
fn bound_json_parses() {
    let o = run(&["bound", "--q", "47", "--f", "x^22+22x^2+24", "--d", "2", "--oracle", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["best"]["value"], 6);
    assert_eq!(v["oracle"]["count"], 6);
}

#[test]
fn bound_errors() {
    let o = run(&["bound", "--q", "13", "--f", "0"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("zero polynomial"));

    let o = run(&["bound", "--q", "15", "--f", "x+1"]);
    assert_eq!(o.status.code(), Some(1));

    let o = run(&["bound", "--q", "13", "--f", "x^+1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("byte"));
}

#[test]
fn reduce_exponents_flag() {
    let plain = run(&["bound", "--q", "13", "--f", "x^25 + 2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&plain)).unwrap();
    assert_eq!(v["poly"], "x^25 + 2");
    let reduced = run(&["bound", "--q", "13", "--f", "x^25 + 2", "--reduce-exponents", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&reduced)).unwrap();
    assert_eq!(v["poly"], "x + 2");
}

#[test]
fn iterate_materialized() {
    let o = run(&["iterate", "--q", "379", "--f", "x^96+x+317", "--d", "2", "--materialize", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("x^188 - 54x^2 + 124x - 1"), "{out}");
    assert!(out.contains("x^6 - x^4 - 131x^3 + 55x^2 + 127x + 116"), "{out}");
    assert!(stderr(&o).contains("regime: case 1, i=0, value 6"));
}

#[test]
fn iterate_summary() {
    let o = run(&["iterate", "--q", "367", "--f", "x^137+x+111", "--d", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("min d(l_i + g_i): 10 at i=2"), "{out}");
    assert!(out.contains("regime: case 2, i=0, value 10"), "{out}");
}

#[test]
fn iterate_d1_is_a_precondition_failure() {
    let o = run(&["iterate", "--q", "367", "--f", "x^137+x+111", "--d", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("d = 1"));
}

#[test]
fn sweep_to_files_is_deterministic() {
    let csv_a = scratch("a.csv");
    let csv_b = scratch("b.csv");
    let svg = scratch("r.svg");
    for path in [&csv_a, &csv_b] {
        let o = run(&[
            "sweep",
            "--q",
            "379",
            "--d",
            "2",
            "--out",
            path.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    let a = std::fs::read(&csv_a).unwrap();
    assert_eq!(a, std::fs::read(&csv_b).unwrap());
    let mut rows = csv::Reader::from_reader(a.as_slice());
    let row = rows.records().map(|r| r.unwrap()).find(|r| &r[0] == "93" && &r[1] == "1").unwrap();
    assert_eq!(&row[3], "1");
    assert_eq!(&row[4], "6");
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));

    let o = run(&["sweep", "--q", "379", "--d", "5"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn construct_outputs() {
    let o = run(&["construct", "--family", "ex1", "--q", "47", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("x^22 + 22x^2 + 24"));
    assert_eq!(lines.next(), Some("family,field,poly,bound_method,bound,count,roots"));
    assert_eq!(lines.next(), Some("three-residues,47,x^22 + 22x^2 + 24,lacunary,6,6,1;12;13;34;35;46"));

    let o = run(&["construct", "--family", "cyclotomic", "--q", "13", "--step", "2", "--n", "2"]);
    assert!(stdout(&o).contains("roots (4): 3, 4, 9, 10"));

    let o = run(&["construct", "--family", "two-residues", "--q", "13"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn verify_small_run() {
    let o = run(&["verify", "--seed", "7", "--trials", "300", "--inject", "47:x^22+22x^2+24", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["trials"], 300);
    assert_eq!(v["injected"], 1);
    assert_eq!(v["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn redei_check_command() {
    let o = run(&["redei-check", "--q", "13", "--d", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("924 subsets, 6 survivors (6 expected): PASS"), "{out}");

    let o = run(&["redei-check", "--q", "101", "--d", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("enumeration cap"));
}
