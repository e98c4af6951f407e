use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn pfreq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pfreq"))
        .args(args)
        .env_remove("PFREQ_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn json_lines(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("valid JSON line"))
        .collect()
}

#[test]
fn solve_disk_eigenvalue_on_two_grids() {
    let out = pfreq(&[
        "solve",
        "--domain",
        "disk:r=1",
        "--q",
        "2",
        "--h",
        "1/32,1/64",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json_lines(&out);
    assert_eq!(rows.len(), 2);
    let l: Vec<f64> = rows
        .iter()
        .map(|r| r["lambda1"].as_f64().unwrap())
        .collect();
    let target = 5.783185962946784;
    assert!((l[1] - target).abs() < (l[0] - target).abs());
    assert_eq!(rows[1]["h"].as_f64().unwrap(), 1.0 / 64.0);
}

#[test]
fn solve_rejects_bad_exponent() {
    let out = pfreq(&["solve", "--q", "2.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("q must lie in [1, 2]"));
    assert!(out.stdout.is_empty());
}

#[test]
fn solve_square_torsion() {
    let out = pfreq(&[
        "solve",
        "--domain",
        "rect:w=1,h=1",
        "--q",
        "1",
        "--h",
        "1/64",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json_lines(&out);
    let t = 1.0 / rows[0]["lambda1"].as_f64().unwrap();
    assert!((t - 0.0351442).abs() / 0.0351442 < 0.01, "{t}");
}

#[test]
fn constants_grid_csv() {
    let out = pfreq(&["constants", "--q-grid", "1:2:0.05", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "q,pi_2q,lambda1_interval");
    assert_eq!(lines.len(), 22);
    let first: f64 = lines[1].split(',').nth(1).unwrap().parse().unwrap();
    let last: f64 = lines[21].split(',').nth(1).unwrap().parse().unwrap();
    assert!((first - 2.0 * 3f64.sqrt()).abs() < 1e-4);
    assert!((last - std::f64::consts::PI).abs() < 1e-4);
}

#[test]
fn conjugate_check_reports_small_error() {
    let out = pfreq(&[
        "conjugate-check",
        "--q",
        "1.5",
        "--samples",
        "25",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("q,check,s,xi.0,xi.1,lhs,rhs,relative_error\n"));
    assert_eq!(text.lines().count(), 51);
    for line in text.lines().skip(1) {
        let err: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(err <= 1e-3);
    }
    assert!(String::from_utf8_lossy(&out.stderr).contains("max relative error"));
}

#[test]
fn bounds_on_nonconvex_polygon() {
    let l = "poly:0,0;2,0;2,1;1,1;1,2;0,2";
    let out = pfreq(&["bounds", "--domain", l, "--q", "1.5", "--h", "1/16"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let rows = json_lines(&out);
    for r in &rows {
        let name = r["name"].as_str().unwrap();
        if [
            "hersch_makai",
            "hersch_makai_perimeter",
            "transplant",
            "polya",
        ]
        .contains(&name)
        {
            assert!(r["value"].is_null());
            assert!(r["note"].as_str().unwrap().starts_with("inapplicable"));
        }
        if ["faber_krahn", "diaz_weinstein"].contains(&name) {
            assert_eq!(r["satisfied"], Value::Bool(true));
        }
    }
}

#[test]
fn dual_square_eigen_certificate_and_export() {
    let dir = tempfile::tempdir().unwrap();
    let export = dir.path().join("pair");
    let out = pfreq(&[
        "dual",
        "--domain",
        "rect:w=1,h=1",
        "--q",
        "2",
        "--h",
        "1/64",
        "--export-pair",
        export.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let rows = json_lines(&out);
    assert!(rows[0]["gap_relative"].as_f64().unwrap().abs() <= 0.02);
    assert_eq!(rows[0]["within_budget"], Value::Bool(true));
    let f = fs::read_to_string(export.join("f_q2_h1-64.csv")).unwrap();
    assert!(f.starts_with("index,x,y,value\n"));
    let phi = fs::read_to_string(export.join("phi_q2_h1-64.csv")).unwrap();
    assert!(phi.starts_with("index,x,y,vx,vy\n"));
}

#[test]
fn dual_sweep_gaps_decrease() {
    let out = pfreq(&["dual", "--domain", "disk:r=1", "--q", "1.5", "--h-sweep"]);
    assert_eq!(out.status.code(), Some(0));
    let gaps: Vec<f64> = json_lines(&out)
        .iter()
        .map(|r| r["gap_relative"].as_f64().unwrap().abs())
        .collect();
    assert_eq!(gaps.len(), 3);
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
}

#[test]
fn malformed_domain_file_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.dom");
    fs::write(&path, "h 0.1\nnx 3\nny 3\norigin 0 0\nconvex 1\n000\n010\n").unwrap();
    let out = pfreq(&["dual", "--domain", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = pfreq(&[
        "solve",
        "--domain",
        dir.path().join("missing.dom").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn domain_file_round_trip_through_cli() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("square.dom");
    let dom = principal_frequency::GridDomain::rectangle(1.0, 1.0, 1.0 / 16.0).unwrap();
    principal_frequency::geometry::io::write_domain(&dom, &path).unwrap();
    let a = pfreq(&["solve", "--domain", path.to_str().unwrap(), "--q", "1.5"]);
    let b = pfreq(&[
        "solve",
        "--domain",
        "rect:w=1,h=1",
        "--q",
        "1.5",
        "--h",
        "1/16",
    ]);
    assert_eq!(a.status.code(), Some(0));
    let (ra, rb) = (json_lines(&a), json_lines(&b));
    assert_eq!(ra[0]["lambda1"], rb[0]["lambda1"]);
}

#[test]
fn output_is_deterministic_and_respects_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_pfreq"))
            .args([
                "report",
                "--domain",
                "rect:w=2,h=1",
                "--q",
                "1,1.5",
                "--h",
                "1/16",
                "--seed",
                "3",
            ])
            .env("PFREQ_OUT_DIR", dir.path())
            .output()
            .unwrap()
    };
    // At h = 1/16 the q = 1.5 gap exceeds its budget, so the run reports a numerical failure.
    let code = run().status.code();
    assert_eq!(code, Some(1));
    let first = fs::read(dir.path().join("report.jsonl")).unwrap();
    assert_eq!(run().status.code(), code);
    let second = fs::read(dir.path().join("report.jsonl")).unwrap();
    assert_eq!(first, second);
    let rows: Vec<Value> = String::from_utf8(first)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0]["bounds"]["polya"]["satisfied"].as_bool().unwrap());
    assert!(rows[1]["duality"]["gap_relative"].is_number());
}

#[test]
fn explicit_out_path_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/solve.csv");
    let out = pfreq(&[
        "solve",
        "--q",
        "1",
        "--h",
        "1/16",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(path).unwrap();
    assert!(text.starts_with("domain,q,lambda1,lambda1_alt,primal_max,iterations,residual,h\n"));
}

#[test]
fn unknown_subcommand_and_help() {
    assert_eq!(pfreq(&["frobnicate"]).status.code(), Some(2));
    let help = pfreq(&["--help"]);
    assert_eq!(help.status.code(), Some(0));
    let text = String::from_utf8_lossy(&help.stdout);
    for cmd in [
        "solve",
        "dual",
        "bounds",
        "constants",
        "conjugate-check",
        "report",
    ] {
        assert!(text.contains(cmd), "{cmd}");
    }
}
