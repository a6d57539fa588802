use std::path::Path;
use std::process::Command;

use maxcompact::report::SCHEMA_VERSION;
use maxcompact::CliError;
use maxcompact_core::bounds::{ComponentBoundShape, Constant};
use maxcompact_core::Error;
use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_maxcompact");

fn run(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(BIN).args(args).output().unwrap();
    let code = out.status.code().unwrap();
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, json, String::from_utf8(out.stderr).unwrap())
}

fn in_process(args: &[&str]) -> (i32, String, String) {
    let (mut o, mut e) = (Vec::new(), Vec::new());
    let mut full = vec!["maxcompact"];
    full.extend_from_slice(args);
    let code = maxcompact::run(full, &mut o, &mut e);
    (
        code,
        String::from_utf8(o).unwrap(),
        String::from_utf8(e).unwrap(),
    )
}

#[test]
fn bound_prints_exact_integer() {
    let (code, v, err) = run(&["bound", "1", "3"]);
    assert_eq!(code, 0);
    let digits = "3913682773310478006096374181454410310377586159070959808544768";
    assert_eq!(v["results"]["n_iso"], digits);
    assert_eq!(v["results"]["n_iso_factored"], "2^168 * 1^30 * 3^21");
    assert_eq!(err.trim(), digits);
    assert_eq!(v["schema_version"], SCHEMA_VERSION);
    assert_eq!(v["command"], "bound");
    let shape: ComponentBoundShape =
        serde_json::from_value(v["results"]["components"].clone()).unwrap();
    assert_eq!(
        (shape.c1, shape.c2, shape.g),
        (Constant::Unresolved, Constant::Unresolved, 1)
    );
    let p = &v["results"]["formats"]["product"];
    assert_eq!(p, &serde_json::json!(["9", "9", "3", "12", "144503", "10"]));
}

#[test]
fn torsion_of_third_and_half() {
    let (code, v, err) = run(&["torsion", "1/3,1/2"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["order"], 6);
    assert_eq!(err.trim(), "order: 6");
    let (_, v, _) = run(&["torsion", "0.3183098861837907,0.5"]);
    assert_eq!(v["results"]["order"], Value::Null);
    let (_, v, _) = run(&["torsion", "1/3,1/2", "--curve", "4,0"]);
    assert!(v["results"]["identity_distance"].as_f64().unwrap() < 1e-8);
}

#[test]
fn lemma_fuzzing_reports_no_violations() {
    let (code, v, err) = run(&["lemmas", "--trials", "1000", "--seed", "7"]);
    assert_eq!(code, 0);
    assert!(err.contains("violations: 0"));
    assert_eq!(v["results"]["violations"], 0);
    assert_eq!(v["results"]["trials"], 1000);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["bound", "0", "3"]).0, 1);
    assert_eq!(run(&["nonsense"]).0, 1);
    assert_eq!(run(&["periods", "--curve", "3,1"]).0, 1);
    assert_eq!(run(&["periods", "--curve", "3"]).0, 1);
    assert_eq!(run(&["log", "--curve", "4,0", "1,2,3,4"]).0, 1);
    assert_eq!(
        run(&["intersect", "--curve", "4,0", "--resolution", "64"]).0,
        1
    );
    assert_eq!(in_process(&["--help"]).0, 0);
    let numerical: CliError = Error::NoConvergence {
        context: "test",
        residual: 1.0,
    }
    .into();
    assert_eq!(numerical.exit_code(), 2);
    let invalid: CliError = Error::EmptySystem.into();
    assert_eq!(invalid.exit_code(), 1);
}

#[test]
fn periods_of_square_lattice() {
    let (code, v, _) = run(&["periods", "--curve", "4,0", "--curve", "1-2i,0.5+i"]);
    assert_eq!(code, 0);
    let c = &v["results"]["curves"];
    assert_eq!(c[0]["tau"], "0+1i");
    assert_eq!(c[0]["j"], "1728+0i");
    assert_eq!(v["inputs"]["curves"][1]["g3"], "0.5+1i");
    assert!(c[1]["legendre_residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn exp_then_log_through_reports() {
    let (code, v, _) = run(&["exp", "--curve", "1.5-0.2i,0.3", "0.31+0.17i,-0.4+0.1i"]);
    assert_eq!(code, 0);
    assert!(v["results"]["model_residual"].as_f64().unwrap() < 1e-9);
    let coords: Vec<String> = v["results"]["point"][0]["coords"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c.as_str().unwrap().to_owned())
        .collect();
    let joined = coords.join(",");
    let (code, back, _) = run(&["log", "--curve", "1.5-0.2i,0.3", &joined]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["betti"].as_array().unwrap().len(), 2);
    for k in 0..2 {
        let a = v["results"]["betti"][k].as_f64().unwrap();
        let b = back["results"]["betti"][k].as_f64().unwrap();
        let d = (a - b) - (a - b).round();
        assert!(d.abs() < 1e-8, "{a} vs {b}");
    }
}

#[test]
fn betti_points_lie_on_the_compact_subgroup() {
    let (code, v, _) = run(&[
        "betti", "--curve", "4,0", "--curve", "0,1", "1/3,1/2", "0.25,0.7",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["in_compact"], true);
    assert_eq!(v["results"]["torsion_order"], 60);
    assert!(v["results"]["model_residual"].as_f64().unwrap() < 1e-9);
    assert_eq!(v["results"]["point"].as_array().unwrap().len(), 2);
}

fn write(dir: &Path, name: &str, text: &str) {
    std::fs::write(dir.join(name), text).unwrap();
}

#[test]
fn intersect_from_config_with_plot() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "level.var",
        "# zeta level set\nX3_1 - 0.37*X0_1\n",
    );
    write(
        dir.path(),
        "run.toml",
        "[[curve]]\ng2 = 4\ng3 = 0\n\n[variety]\nfile = \"level.var\"\n\n[solver]\nresolution = 32\n\n[output]\nplot = \"grid.csv\"\n",
    );
    let cfg = dir.path().join("run.toml");
    let (code, v, err) = run(&[
        "intersect",
        "--config",
        cfg.to_str().unwrap(),
        "--resolution",
        "48",
    ]);
    assert_eq!(code, 0, "{err}");
    assert_eq!(v["inputs"]["resolution"], 48);
    assert_eq!(v["results"]["solution_count"], 2);
    assert_eq!(v["results"]["within_bound"], true);
    assert_eq!(v["provenance"]["resolutions"], serde_json::json!([48]));
    let csv = std::fs::read_to_string(dir.path().join("grid.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("p1,q1,residual"));
    assert_eq!(lines.count(), 48 * 48);

    assert_eq!(
        run(&[
            "intersect",
            "--config",
            cfg.to_str().unwrap(),
            "--tol",
            "1e-3"
        ])
        .0,
        1
    );
    write(dir.path(), "bad.var", "X3_1 - X0_1^2\n");
    let bad = dir.path().join("bad.var");
    let (code, _, err) = run(&[
        "intersect",
        "--curve",
        "4,0",
        "--variety",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(code, 1);
    assert!(err.contains("not homogeneous"), "{err}");
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.json");
    let (code, v, _) = run(&["bound", "2", "5", "--out", path.to_str().unwrap()]);
    assert_eq!((code, v), (0, Value::Null));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["results"]["n_iso_factored"], "2^420 * 2^60 * 5^42");
}
