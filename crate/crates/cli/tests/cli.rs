use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mellin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mellin")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn report(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON report")
}

fn read_report(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn transform_examples() {
    let o = mellin(&["transform", "t*th + t"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "-tau*s + tau");
    assert_eq!(stdout(&mellin(&["transform", "1"])).trim(), "1");
    assert_eq!(stdout(&mellin(&["transform", "--inverse", "tau"])).trim(), "t");
    assert_eq!(stdout(&mellin(&["transform", "--inverse", "-tau*s + tau"])).trim(), "t*th + t");
}

#[test]
fn transform_errors() {
    assert_eq!(mellin(&["transform", "t +"]).status.code(), Some(2));
    assert_eq!(mellin(&["transform", "tau"]).status.code(), Some(3));
    assert_eq!(mellin(&["transform", "--inverse", "th"]).status.code(), Some(3));
}

#[test]
fn parse_prints_canonical_form() {
    let o = mellin(&["parse", "th*t"]);
    assert_eq!(stdout(&o).trim(), "t*th + t");
    let o = mellin(&["parse", "--json", "--algebra", "dtilde", "tau*t"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["algebra"], "Dtilde");
    assert_eq!(v["terms"][0]["tau"][0], 1);
    assert_eq!(mellin(&["parse", "t + s"]).status.code(), Some(3));
    assert_eq!(mellin(&["parse", "(t"]).status.code(), Some(2));
}

#[test]
fn koszul_examples() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.json");
    let o = mellin(&["koszul", "--I", "", "--J", "1", "--N", "12", "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = read_report(&path);
    assert_eq!(v["result"]["verdict"], "acyclic");
    assert_eq!(v["verdict"], "pass");

    let o = mellin(&["koszul", "--I", "1", "--J", "", "--N", "12"]);
    assert_eq!(o.status.code(), Some(0));
    let v = report(&o);
    assert_eq!(v["result"]["verdict"], "h0");
    let actions = v["result"]["induced_actions"].as_array().unwrap();
    assert_eq!(actions.len(), 2);
    assert!(actions.iter().all(|a| a["holds"] == true));

    let o = mellin(&["koszul", "--I", "1", "--J", "2", "--N", "8"]);
    assert_eq!(report(&o)["result"]["verdict"], "acyclic");
}

#[test]
fn koszul_overflow_and_bad_config() {
    assert_eq!(mellin(&["koszul", "--I", "1", "--N", "12", "--degree-bound", "0"]).status.code(), Some(4));
    assert_eq!(mellin(&["koszul", "--I", "1", "--N", "3"]).status.code(), Some(1));
}

#[test]
fn verify_cases() {
    let o = mellin(&["verify", "th + t", "--function", "exponential"]);
    assert_eq!(o.status.code(), Some(0));
    let v = report(&o);
    assert_eq!(v["result"]["operator"], "tau - s");
    assert_eq!(v["result"]["points"].as_array().unwrap().len(), 20);

    // normalizes to th + 2t, which annihilates e^{-2t}
    assert_eq!(mellin(&["verify", "t*th^0 + 0 + th + t", "--function", "exponential:2"]).status.code(), Some(0));
    assert_eq!(mellin(&["verify", "th + t - tinv", "--function", "bessel"]).status.code(), Some(0));
    assert_eq!(mellin(&["verify", "th + 2*t^2", "--function", "gaussian"]).status.code(), Some(0));
}

#[test]
fn verify_failures() {
    assert_eq!(mellin(&["verify", "th + t", "--function", "gaussian"]).status.code(), Some(5));
    let o = mellin(&["verify", "th + t", "--function", "exponential", "--start", "-1", "--stop", "1", "--count", "3"]);
    assert_eq!(o.status.code(), Some(6));
    assert_eq!(mellin(&["verify", "th + tau"]).status.code(), Some(3));
}

#[test]
fn moments_cases() {
    let o = mellin(&["moments", "--k", "8", "radial-mode2"]);
    assert_eq!(o.status.code(), Some(0));
    let v = report(&o);
    let stokes = v["result"]["stokes"].as_array().unwrap();
    assert_eq!(stokes.len(), 9);
    assert!(stokes.iter().all(|r| r["max_relative"].as_f64().unwrap() <= 1e-6));

    let v = report(&mellin(&["moments", "zero", "--k", "3"]));
    for side in ["infinity", "zero"] {
        for e in v["result"]["table"][side].as_array().unwrap() {
            assert_eq!(e["value"], serde_json::json!([0.0, 0.0]));
        }
    }
}

#[test]
fn expand_cases() {
    let o = mellin(&["expand", "--R", "0.5", "geometric"]);
    assert_eq!(o.status.code(), Some(0));
    let v = report(&o);
    assert!(v["result"]["reconstruction"]["max_relative"].as_f64().unwrap() <= 1e-8);
    assert_eq!(mellin(&["expand", "power:-1.5", "--R", "0.5"]).status.code(), Some(0));
    // ρ = R/2 = 1/2 leaves a truncation tail near 1e-7 for this family
    assert_eq!(mellin(&["expand", "power:2.5", "--R", "1"]).status.code(), Some(1));
}

#[test]
fn config_file_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "function = \"custom\"\ntolerance = 1e-8\n[grid]\nstart = 0.5\nstop = 3.0\ncount = 5\n\
         [ray_function]\nexponent = [{ k = 1, a = -1.0 }, { k = -1, a = -1.0 }]\n",
    )
    .unwrap();
    let out1 = dir.path().join("a.json");
    let out2 = dir.path().join("b.json");
    for out in [&out1, &out2] {
        let o = mellin(&["verify", "th + t - tinv", "--config", cfg.to_str().unwrap(), "-o", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let a = std::fs::read(&out1).unwrap();
    assert_eq!(a, std::fs::read(&out2).unwrap());
    let v = read_report(&out1);
    assert_eq!(v["config"]["grid"]["count"], 5);
    assert_eq!(v["result"]["points"].as_array().unwrap().len(), 5);

    std::fs::write(&cfg, "truncation = \"twelve\"\n").unwrap();
    assert_eq!(mellin(&["koszul", "--I", "1", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}
