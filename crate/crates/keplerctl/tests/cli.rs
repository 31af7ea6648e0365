use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_keplerctl")).args(args.split_whitespace()).output().expect("binary runs")
}

fn code(args: &str) -> i32 {
    run(args).status.code().unwrap()
}

fn json(args: &str) -> Value {
    let out = run(args);
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn full_sweeps_pass() {
    assert_eq!(code("verify --D 3 --n 0 --pairs all"), 0);
    assert_eq!(code("verify --D 4 --n 1 --pairs all --kmax 0"), 0);
}

#[test]
fn dimension_condition_is_a_usage_error() {
    assert_eq!(code("verify --D 3 --n 1"), 2);
    assert_eq!(code("spectrum --D 1 --n 0"), 2);
    assert_eq!(code("harmonic --M 3 --n 1 --l 2"), 2);
    assert_eq!(code("branching --M 4 --n 1 --l 2"), 2);
    assert_eq!(code("verify --D 3 --pairs most"), 2);
    assert_eq!(code("verify --D 3 --jobs 0"), 2);
}

#[test]
fn hydrogen_spectrum_csv() {
    let out = run("spectrum --D 3 --n 0 --kmax 3 --format csv");
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines,
        [
            "k,energy_exact,energy_decimal,degeneracy",
            "0,-1/2,-0.5,1",
            "1,-1/8,-0.125,4",
            "2,-1/18,-0.05555555555555555,9",
            "3,-1/32,-0.03125,16",
        ]
    );
}

#[test]
fn super_spectrum_json() {
    let doc = json("spectrum --D 4 --n 1 --kmax 1 --format json");
    assert_eq!(doc["schema_version"], 1);
    let rows = doc["spectrum"].as_array().unwrap();
    let energies: Vec<&str> = rows.iter().map(|r| r["energy_exact"].as_str().unwrap()).collect();
    let degs: Vec<u64> = rows.iter().map(|r| r["degeneracy"].as_u64().unwrap()).collect();
    assert_eq!(energies, ["-2", "-2/9"]);
    assert_eq!(degs, [1, 7]);
    assert_eq!(code("spectrum --D 4 --n 1 --kmax 0 --check-states"), 0);
}

#[test]
fn tensor_commands() {
    let h = json("harmonic --M 5 --n 1 --l 2");
    assert_eq!(h["result"]["dim_s"], 26);
    assert_eq!(h["result"]["harmonic_dim"], 25);
    assert_eq!(h["result"]["decomposition"], true);
    let b = json("branching --M 5 --n 1 --l 2");
    assert_eq!(b["result"]["identity"], "25 = 18+6+1");
    assert_eq!(b["passed"], true);
}

#[test]
fn reports_pass_and_faults_fail() {
    assert_eq!(code("report --D 3 --n 0 --kmax 2"), 0);
    assert_eq!(code("report --D 4 --n 1 --kmax 2"), 0);
    assert_eq!(code("report --D 4 --n 1 --kmax 2 --inject-fault"), 1);
    for fault in ["generator", "pairing", "dilation"] {
        let doc = json(&format!("report --D 3 --n 0 --kmax 1 --inject-fault {fault}"));
        assert_eq!(doc["passed"], false, "{fault}");
        assert_eq!(code(&format!("verify --D 3 --n 0 --pairs all --inject-fault {fault}")), 1, "{fault}");
    }
}

#[test]
fn reports_are_reproducible() {
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("timing");
        v
    };
    let a = strip(json("verify --D 4 --n 1 --seed 7 --kmax 0"));
    let b = strip(json("verify --D 4 --n 1 --seed 7 --kmax 0 --jobs 3"));
    assert_eq!(a, b);
    assert_eq!(a["parameters"]["seed"], 7);
}

#[test]
fn writes_to_file() {
    let path = std::env::temp_dir().join(format!("keplerctl-{}.csv", std::process::id()));
    let out = run(&format!("spectrum --D 3 --kmax 1 --format csv --out {}", path.display()));
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(text.starts_with("k,energy_exact,energy_decimal,degeneracy\n0,-1/2,"));
}
