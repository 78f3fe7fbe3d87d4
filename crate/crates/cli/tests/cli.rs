use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qregion(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qregion"))
        .args(args)
        .env_remove("QREGION_SEED")
        .env_remove("QREGION_TOL_MEMBER")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write_builtin(dir: &Path, name: &str) -> String {
    let path = dir.join(format!("{name}.json"));
    let out = qregion(&["builtin", name, "-o", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path.to_str().unwrap().to_string()
}

#[test]
fn validate_reports_informational_completeness() {
    let dir = tempfile::tempdir().unwrap();
    let tetra = write_builtin(dir.path(), "tetrahedron");
    let out = qregion(&["validate", &tetra, "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("informationally complete: true"));

    let trine = write_builtin(dir.path(), "trine");
    let out = qregion(&["validate", &trine, "--format", "text"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("informationally complete: false"));
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let tetra = write_builtin(dir.path(), "tetrahedron");
    let text = std::fs::read_to_string(&tetra).unwrap();
    let truncated = dir.path().join("truncated.json");
    std::fs::write(&truncated, &text[..text.len() / 3]).unwrap();
    assert_eq!(qregion(&["validate", truncated.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(qregion(&["validate", "/no/such/file.json"]).status.code(), Some(2));

    // diag(1, −0.1), diag(0, 1.1): sums to the identity but is not positive.
    let bad = r#"{"format":"qregion-ensemble","version":1,"kind":"measurement","dim":2,"label":"bad",
        "elements":[[[[1,0],[0,0]],[[0,0],[-0.1,0]]],[[[0,0],[0,0]],[[0,0],[1.1,0]]]]}"#;
    let bad_path = dir.path().join("bad.json");
    std::fs::write(&bad_path, bad).unwrap();
    let out = qregion(&["validate", bad_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["result"]["valid"], Value::Bool(false));

    // Other commands refuse invalid input unless told otherwise.
    let bad = bad_path.to_str().unwrap();
    assert_eq!(qregion(&["region", bad]).status.code(), Some(1));
    assert_eq!(qregion(&["region", bad, "--allow-invalid"]).status.code(), Some(0));
}

#[test]
fn region_reports_closed_forms() {
    let out = qregion(&["region", "builtin:tetrahedron"]);
    assert!(out.status.success());
    let v = json(&out);
    let q = &v["result"]["covariance"];
    assert!((q[0][0].as_f64().unwrap() - 1.0 / 16.0).abs() < 1e-12);
    assert!((q[0][1].as_f64().unwrap() + 1.0 / 48.0).abs() < 1e-12);
    assert_eq!(v["result"]["rank"], 3);

    let out = qregion(&["region", "builtin:sic-states(3)"]);
    let c = json(&out)["result"]["slice_coefficients"].clone();
    let want = [0.0, 2.0 / 3.0, 2.0 / 3.0, 0.0];
    for (k, w) in want.iter().enumerate() {
        assert!((c[k].as_f64().unwrap() - w).abs() < 1e-12);
    }
}

#[test]
fn region_profiles() {
    let out = qregion(&["region", "builtin:pair", "--profile"]);
    let pts = json(&out)["result"]["profile"]["points"].clone();
    let pts = pts.as_array().unwrap();
    assert_eq!(pts.len(), 3);
    assert_eq!(pts[0], serde_json::json!([0.0, 0.0]));
    assert!((pts[1][1].as_f64().unwrap() - 0.5f64.sqrt()).abs() < 1e-12);
    assert_eq!(pts[2][0], 2.0);

    let out = qregion(&["region", "builtin:trine", "--profile", "--coords", "0,2", "--profile-points", "16"]);
    let v = json(&out);
    assert_eq!(v["result"]["profile"]["points"].as_array().unwrap().len(), 17);
    assert_eq!(qregion(&["region", "builtin:trine", "--profile", "--coords", "0"]).status.code(), Some(2));
}

#[test]
fn member_verdicts() {
    let inside = json(&qregion(&["member", "builtin:tetrahedron", "--point", "0.25,0.25,0.25,0.25"]));
    assert_eq!(inside["result"]["membership"]["verdict"], "inside");

    // Image of |0⟩⟨0| under the tetrahedron SIC.
    let p = "0.5,0.16666666666666666,0.16666666666666666,0.16666666666666666";
    let pure = json(&qregion(&["member", "builtin:tetrahedron", "--point", p]));
    assert_eq!(pure["result"]["membership"]["verdict"], "boundary");

    let out = json(&qregion(&["member", "builtin:pair", "--point", "1,0"]));
    assert_eq!(out["result"]["member"], false);

    let slice = json(&qregion(&["member", "builtin:pair", "--point", "1,0.5", "--k", "1"]));
    assert_eq!(slice["result"]["membership"]["verdict"], "boundary");

    assert_eq!(qregion(&["member", "builtin:pair", "--point", "1,0,0"]).status.code(), Some(2));
    assert_eq!(qregion(&["member", "builtin:pair", "--point", "x"]).status.code(), Some(2));
}

#[test]
fn reconstruct_commands() {
    let out = qregion(&["reconstruct", "builtin:tetrahedron", "--point", "0.25,0.25,0.25,0.25"]);
    assert!(out.status.success());
    let v = json(&out);
    let op = &v["result"]["operator"];
    assert!((op[0][0][0].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(op[0][1][0].as_f64().unwrap().abs() < 1e-12);
    assert!((v["result"]["trace"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    let p = "0.5,0.16666666666666666,0.16666666666666666,0.16666666666666666";
    let v = json(&qregion(&["reconstruct", "builtin:tetrahedron", "--point", p]));
    let ev = v["result"]["eigenvalues"].as_array().unwrap();
    assert!((ev[0].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!(ev[1].as_f64().unwrap().abs() < 1e-9);

    // Off the affine range: the entries do not sum to one.
    assert_eq!(qregion(&["reconstruct", "builtin:tetrahedron", "--point", "1,1,1,1"]).status.code(), Some(1));

    let v = json(&qregion(&["reconstruct", "builtin:pair", "--point", "1,0.5", "--k", "1"]));
    let op = &v["result"]["operator"];
    assert!((op[0][0][0].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert!(op[1][1][0].as_f64().unwrap().abs() < 1e-9);
    assert_eq!(qregion(&["reconstruct", "builtin:pair", "--point", "1,0.5"]).status.code(), Some(2));
}

#[test]
fn simtest_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let own = dir.path().join("own.csv");
    let out = qregion(&["images", "builtin:trine", "--samples", "3000", "-o", own.to_str().unwrap()]);
    assert!(out.status.success());
    let out = qregion(&["simtest", "builtin:trine", own.to_str().unwrap(), "--slack", "0.02"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json(&out)["result"]["certificate"]["verdict"], "contained");

    let point = dir.path().join("point.csv");
    std::fs::write(&point, "0.3333333333333333,0.3333333333333333,0.3333333333333334\n").unwrap();
    let out = qregion(&["simtest", "builtin:trine", point.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let w = &json(&out)["result"]["certificate"]["witnesses"][0];
    assert!(w["margin"].as_f64().unwrap() > 0.0);

    let out = qregion(&["simtest", "builtin:trine", own.to_str().unwrap(), "--slack", "0.02", "--mode", "sampled"]);
    assert_eq!(out.status.code(), Some(3));

    // Nine outcomes: the hull has affine dimension 8, beyond facet enumeration.
    let big = dir.path().join("big.csv");
    let out = qregion(&["images", "builtin:sic(3)", "--samples", "200", "-o", big.to_str().unwrap()]);
    assert!(out.status.success());
    let out = qregion(&["simtest", "builtin:sic(3)", big.to_str().unwrap(), "--slack", "0.5", "--directions", "500"]);
    assert_eq!(out.status.code(), Some(3));

    let out = qregion(&["simtest", "builtin:tetrahedron", own.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let garbage = dir.path().join("garbage.csv");
    std::fs::write(&garbage, "0.5,0.5,0\nhello,world,x\n").unwrap();
    assert_eq!(qregion(&["simtest", "builtin:trine", garbage.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn verify_runs_the_right_suite() {
    let out = qregion(&["verify", "builtin:tetrahedron", "--samples", "2000"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["result"]["violations"], 0);
    assert_eq!(v["result"]["checks"].as_array().unwrap().len(), 2);

    let v = json(&qregion(&["verify", "builtin:pair", "--samples", "500"]));
    assert_eq!(v["result"]["checks"][0]["check"], "states_cone");

    let v = json(&qregion(&["verify", "builtin:trine", "--samples", "0"]));
    assert_eq!(v["result"]["checks"][0]["samples"], 0);
    assert!(v["result"]["checks"][1]["skipped"].is_string());
}

#[test]
fn reports_are_reproducible_and_echo_settings() {
    let args = ["verify", "builtin:mub(3)", "--samples", "300", "--seed", "42", "--tol-member", "1e-6"];
    let a = qregion(&args);
    let b = qregion(&args);
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    assert_eq!(v["seed"], 42);
    assert_eq!(v["tolerances"]["member"], 1e-6);
    let c = qregion(&["verify", "builtin:mub(3)", "--samples", "300", "--seed", "43"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn environment_sets_defaults_and_flags_win() {
    let run = |env_seed: &str, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_qregion"));
        cmd.args(["member", "builtin:trine", "--point", "0.5,0.25,0.25"]).args(extra);
        cmd.env("QREGION_SEED", env_seed).env("QREGION_TOL_MEMBER", "0.5");
        json(&cmd.output().unwrap())
    };
    let v = run("7", &[]);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["tolerances"]["member"], 0.5);
    let v = run("7", &["--seed", "9", "--tol-member", "0.25"]);
    assert_eq!(v["seed"], 9);
    assert_eq!(v["tolerances"]["member"], 0.25);
}

#[test]
fn builtin_listing_and_round_trip() {
    let v = json(&qregion(&["builtin"]));
    assert!(v["result"]["names"].as_array().unwrap().iter().any(|n| n == "trine"));
    assert_eq!(qregion(&["builtin", "octahedron"]).status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let path = write_builtin(dir.path(), "mub-states(3)");
    let again = qregion(&["builtin", "mub-states(3)"]);
    assert_eq!(std::fs::read(&path).unwrap(), again.stdout);
    assert_eq!(qregion(&["validate", &path]).status.code(), Some(0));
}
