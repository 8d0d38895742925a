use serde_json::Value;
use std::process::{Command, Output};

fn nlcone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nlcone"))
        .args(args)
        .env_remove("NLCONE_QUAD_ABS_TOL")
        .env_remove("NLCONE_QUAD_REL_TOL")
        .output()
        .unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let out = nlcone(&all);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn measured(v: &Value) -> (f64, f64) {
    let obj = v
        .as_object()
        .unwrap_or_else(|| panic!("not a {{value, error}} object: {v}"));
    assert_eq!(obj.len(), 2, "{v}");
    (obj["value"].as_f64().unwrap(), obj["error"].as_f64().unwrap())
}

#[test]
fn alpha_at_s_zero_is_the_limit() {
    let doc = json(&["alpha", "--m", "2", "--n", "1"]);
    let (a, err) = measured(&doc["result"]["alpha"]);
    assert!((a - 1.0 / 3f64.sqrt()).abs() < 1e-9);
    assert!(err < 1e-9);
    measured(&doc["result"]["residual"]);
}

#[test]
fn json_round_trips_byte_for_byte() {
    let out = nlcone(&["--format", "json", "stability", "--m", "3", "--n", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let value: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(serde_json::to_string_pretty(&value).unwrap() + "\n", text);
}

#[test]
fn stability_verdicts_at_s_zero() {
    for (m, n, verdict) in [("4", "3", "stable"), ("2", "2", "unstable")] {
        let doc = json(&["stability", "--m", m, "--n", n]);
        let r = &doc["result"];
        assert_eq!(r["verdict"], verdict, "({m},{n})");
        assert_eq!(r["decisive"], true);
        for key in ["h", "a0_squared", "margin", "alpha"] {
            measured(&r[key]);
        }
    }
}

#[test]
fn invalid_parameters_exit_with_2() {
    for args in [
        &["alpha", "--m", "1", "--n", "2"][..],
        &["alpha", "--m", "2", "--n", "1", "--s", "0.95"],
        &["stability", "--m", "3", "--n", "1", "--alpha=-0.5"],
        &["--jobs", "0", "alpha0", "--m", "2", "--n", "1"],
        &["--quad-rel-tol=-1", "alpha0", "--m", "2", "--n", "1"],
        &["no-such-command"],
    ] {
        let out = nlcone(args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}

#[test]
fn environment_sets_tolerances_and_flags_win() {
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_nlcone"));
        cmd.env_remove("NLCONE_QUAD_REL_TOL").env_remove("NLCONE_QUAD_ABS_TOL");
        if let Some(v) = env {
            cmd.env("NLCONE_QUAD_REL_TOL", v);
        }
        cmd.args(["--format", "json", "alpha0", "--m", "2", "--n", "1"]);
        if let Some(v) = flag {
            cmd.args(["--quad-rel-tol", v]);
        }
        let out = cmd.output().unwrap();
        assert!(out.status.success());
        let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
        doc["meta"]["defaults"]["quad_rel_tol"].as_f64().unwrap()
    };
    assert_eq!(run(None, None), 1e-6);
    assert_eq!(run(Some("1e-8"), None), 1e-8);
    assert_eq!(run(Some("1e-8"), Some("1e-9")), 1e-9);

    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nlcone"));
    let out = cmd
        .env("NLCONE_QUAD_ABS_TOL", "nan")
        .args(["alpha0", "--m", "2", "--n", "1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn table1_csv_has_one_row_per_m_and_quantity() {
    let out = nlcone(&["--format", "csv", "table1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body.len(), 13);
    let header: Vec<&str> = body[0].split(',').collect();
    assert_eq!(header.len(), 2 + 14);
    assert_eq!(&header[..4], ["m", "quantity", "n=1", "n=1_err"]);
    for (i, row) in body[1..].iter().enumerate() {
        let cells: Vec<&str> = row.split(',').collect();
        assert_eq!(cells.len(), header.len());
        let m: usize = cells[0].parse().unwrap();
        assert_eq!(m, 2 + i / 2);
        assert_eq!(cells[1], if i % 2 == 0 { "H" } else { "A0^2" });
        // Filled exactly for n ≤ m.
        for n in 1..=7 {
            assert_eq!(cells[2 * n].is_empty(), n > m, "{row}");
        }
    }
}

#[test]
fn scan_of_a_symmetric_cone_stays_at_one() {
    let doc = json(&[
        "scan", "--m", "3", "--n", "3", "--s-from", "0.1", "--s-to", "0.4", "--steps", "3",
    ]);
    let rows = doc["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for r in rows {
        assert_eq!(measured(&r["alpha"]).0, 1.0);
    }
}

#[test]
fn mc_check_on_a_symmetric_cone() {
    let doc = json(&["--samples", "200000", "mc-check", "--m", "3", "--n", "3", "--s", "0.2"]);
    let r = &doc["result"];
    let (q, _) = measured(&r["quadrature"]);
    let (mc, stderr) = measured(&r["monte_carlo"]);
    assert!(q.abs() < 1e-8);
    assert!(mc.abs() <= 3.0 * stderr);
    assert_eq!(r["agrees_3sigma"], true);
}

#[test]
fn out_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.json");
    let out = nlcone(&[
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
        "alpha0",
        "--m",
        "3",
        "--n",
        "3",
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(measured(&doc["result"]["alpha"]).0, 1.0);
}

#[test]
fn human_output_carries_provenance() {
    let out = nlcone(&["alpha0", "--m", "2", "--n", "1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# nlcone "));
    assert!(text.contains("quad_rel_tol=1e-6"));
}

#[test]
fn probe_and_self_check_succeed() {
    let out = nlcone(&["jacobi-probe", "--m", "3", "--n", "3", "--s", "0.2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = nlcone(&["--samples", "200000", "self-check"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}
