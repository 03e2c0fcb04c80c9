use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn qnot() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_qnot"));
    c.env_remove("QNOT_TOL");
    c
}

fn run(args: &[&str]) -> Output {
    qnot().args(args).output().expect("spawn qnot")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&o.stdout));
    })
}

fn normalized(amps: &[(f64, f64)]) -> Value {
    let n = amps.iter().map(|(a, b)| a * a + b * b).sum::<f64>().sqrt();
    json!({
        "dim": amps.len(),
        "amps": amps.iter().map(|(a, b)| [a / n, b / n]).collect::<Vec<_>>(),
    })
}

fn write_set(dir: &TempDir, name: &str, target: &str, states: &[&[(f64, f64)]]) -> PathBuf {
    let doc = json!({
        "target": target,
        "states": states.iter().map(|s| normalized(s)).collect::<Vec<_>>(),
    });
    let p = dir.path().join(name);
    std::fs::write(&p, doc.to_string()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn complex_triple(dir: &TempDir) -> PathBuf {
    write_set(
        dir,
        "triple.json",
        "conjugate",
        &[
            &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)],
            &[(0.3, 0.0), (0.9539392014169456, 0.0), (0.0, 0.0)],
            &[(0.24, 0.13), (0.5, 0.4), (0.72, 0.0)],
        ],
    )
}

#[test]
fn check_real_pair_is_perfect() {
    let dir = TempDir::new().unwrap();
    let input = write_set(
        &dir,
        "real.json",
        "not",
        &[&[(1.0, 0.0), (0.0, 0.0)], &[(0.6, 0.0), (0.8, 0.0)]],
    );
    let o = run(&["check", "--input", s(&input)]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["perfect_unitary"]["feasible"], true);
    assert_eq!(v["perfect_with_probe"]["feasible"], true);
    assert!(v["probabilistic"].is_null());
}

#[test]
fn check_text_prints_polar_gram() {
    let dir = TempDir::new().unwrap();
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let input = write_set(
        &dir,
        "plus.json",
        "not",
        &[&[(r, 0.0), (r, 0.0)], &[(r, 0.0), (0.0, r)]],
    );
    let o = run(&["check", "--input", s(&input), "--format", "text"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("t = 0.707106781187"), "{text}");
    assert!(text.contains("theta = 0.785398163397"), "{text}");
    assert!(text.contains("perfect unitary: infeasible"));
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&run(&["check", "--input", s(&missing)])), 2);

    let garbage = dir.path().join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    assert_eq!(code(&run(&["check", "--input", s(&garbage)])), 2);

    let unnormalized = dir.path().join("unnormalized.json");
    std::fs::write(
        &unnormalized,
        r#"{"target":"not","states":[{"dim":2,"amps":[[1,0],[1,0]]}]}"#,
    )
    .unwrap();
    let o = run(&["check", "--input", s(&unnormalized)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("normalized"));

    let mixed = dir.path().join("mixed.json");
    std::fs::write(
        &mixed,
        r#"{"target":"conjugate","states":[{"dim":2,"amps":[[1,0],[0,0]]},{"dim":3,"amps":[[1,0],[0,0],[0,0]]}]}"#,
    )
    .unwrap();
    assert_eq!(code(&run(&["check", "--input", s(&mixed)])), 2);

    let input = complex_triple(&dir);
    assert_eq!(
        code(&run(&["check", "--input", s(&input), "--gamma", "0.5,0.5"])),
        2
    );
    assert_eq!(
        code(&run(&[
            "check",
            "--input",
            s(&input),
            "--gamma",
            "0,0.5,0.5"
        ])),
        2
    );
    assert_eq!(
        code(&run(&["check", "--input", s(&input), "--shots", "0"])),
        2
    );
    assert_eq!(code(&run(&["simulate", "--input", s(&input)])), 2);
}

#[test]
fn synthesize_simulate_round_trip() {
    let dir = TempDir::new().unwrap();
    let input = complex_triple(&dir);
    let machine = dir.path().join("machine.json");
    let o = run(&["synthesize", "--input", s(&input), "--output", s(&machine)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));

    let o = run(&[
        "simulate",
        "--input",
        s(&input),
        "--machine",
        s(&machine),
        "--shots",
        "2000",
        "--seed",
        "9",
    ]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["shots"], 2000);
    assert_eq!(v["seed"], 9);
    assert_eq!(v["rng"], "chacha8");
    let states = v["states"].as_array().unwrap();
    assert_eq!(states.len(), 3);
    for st in states {
        assert!((st["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-8);
        assert!(st["mc_success"].as_u64().unwrap() <= 2000);
    }

    let again = run(&[
        "simulate",
        "--input",
        s(&input),
        "--machine",
        s(&machine),
        "--shots",
        "2000",
        "--seed",
        "9",
    ]);
    assert_eq!(stdout_json(&again)["states"], v["states"]);
    let other = run(&[
        "simulate",
        "--input",
        s(&input),
        "--machine",
        s(&machine),
        "--shots",
        "2000",
        "--seed",
        "10",
    ]);
    assert_ne!(stdout_json(&other)["states"], v["states"]);
}

#[test]
fn synthesize_with_gamma_and_text_format() {
    let dir = TempDir::new().unwrap();
    let input = write_set(
        &dir,
        "pair.json",
        "not",
        &[&[(1.0, 0.0), (0.3, 0.4)], &[(0.2, -0.5), (1.0, 0.0)]],
    );
    let machine = dir.path().join("m.json");
    let o = run(&[
        "synthesize",
        "--input",
        s(&input),
        "--gamma",
        "0.05,0.05",
        "--phases",
        "0,0",
        "--output",
        s(&machine),
        "--format",
        "text",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8(o.stdout)
        .unwrap()
        .contains("gammas: [0.05, 0.05]"));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&machine).unwrap()).unwrap();
    assert_eq!(v["machine"]["gammas"], json!([0.05, 0.05]));
    let o = run(&[
        "simulate",
        "--input",
        s(&input),
        "--machine",
        s(&machine),
        "--shots",
        "10",
    ]);
    assert_eq!(code(&o), 0);
    let o = run(&["synthesize", "--input", s(&input), "--gamma", "1,1"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn dependent_set_exits_3() {
    let dir = TempDir::new().unwrap();
    let input = write_set(
        &dir,
        "dependent.json",
        "not",
        &[
            &[(1.0, 0.0), (0.0, 0.0)],
            &[(0.0, 0.0), (1.0, 0.0)],
            &[(1.0, 0.0), (0.0, 1.0)],
        ],
    );
    let o = run(&["synthesize", "--input", s(&input)]);
    assert_eq!(code(&o), 3);
}

#[test]
fn corrupted_machine_exits_4() {
    let dir = TempDir::new().unwrap();
    let input = complex_triple(&dir);
    let machine = dir.path().join("machine.json");
    assert_eq!(
        code(&run(&[
            "synthesize",
            "--input",
            s(&input),
            "--output",
            s(&machine)
        ])),
        0
    );
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(&machine).unwrap()).unwrap();
    let re = v["machine"]["unitary"][0][0][0].as_f64().unwrap();
    v["machine"]["unitary"][0][0][0] = json!(re + 1e-3);
    std::fs::write(&machine, v.to_string()).unwrap();
    let o = run(&[
        "simulate",
        "--input",
        s(&input),
        "--machine",
        s(&machine),
        "--shots",
        "100",
    ]);
    assert_eq!(code(&o), 4);
    assert!(!stdout_json(&o)["all_green"].as_bool().unwrap());
}

#[test]
fn gamma_max_delta_zero_and_random() {
    let dir = TempDir::new().unwrap();
    let real = write_set(
        &dir,
        "real.json",
        "conjugate",
        &[
            &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)],
            &[(0.5, 0.0), (0.8, 0.0), (0.0, 0.0)],
            &[(0.3, 0.0), (0.4, 0.0), (0.7, 0.0)],
        ],
    );
    let o = run(&["gamma-max", "--input", s(&real)]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["closed_form"]["gamma_max"], 1.0);
    assert_eq!(v["closed_form"]["method"], "closed_form");
    assert_eq!(v["oracle"]["gamma_max"], 1.0);

    let o = run(&["gamma-max", "--input", s(&complex_triple(&dir))]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    let g = v["closed_form"]["gamma_max"].as_f64().unwrap();
    assert!(g > 0.0 && g < 1.0);
    assert!(v["difference"].as_f64().unwrap() <= 1e-5);
    assert_eq!(
        v["closed_form"]["probe_phases"].as_array().unwrap().len(),
        3
    );
}

#[test]
fn gamma_max_dependent_triple_exits_6() {
    let dir = TempDir::new().unwrap();
    let input = write_set(
        &dir,
        "flat.json",
        "conjugate",
        &[
            &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0)],
            &[(0.6, 0.0), (0.0, 0.8), (0.0, 0.0)],
            &[(0.3, 0.2), (0.5, -0.4), (0.0, 0.0)],
        ],
    );
    assert_eq!(code(&run(&["gamma-max", "--input", s(&input)])), 6);
}

#[test]
fn gamma_max_needs_three_states() {
    let dir = TempDir::new().unwrap();
    let input = write_set(
        &dir,
        "pair.json",
        "not",
        &[&[(1.0, 0.0), (0.3, 0.4)], &[(0.2, -0.5), (1.0, 0.0)]],
    );
    assert_eq!(code(&run(&["gamma-max", "--input", s(&input)])), 2);
}

#[test]
fn oracle_reports_both_searches() {
    let dir = TempDir::new().unwrap();
    let input = complex_triple(&dir);
    let out = dir.path().join("oracle.json");
    let o = run(&[
        "oracle",
        "--input",
        s(&input),
        "--phases",
        "0,0,0",
        "--output",
        s(&out),
    ]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let equal = v["equal_gamma"]["gamma_max"].as_f64().unwrap();
    let mean = v["coordinate_mean"].as_f64().unwrap();
    assert!(mean >= equal - 1e-12);
    assert_eq!(v["equal_gamma"]["method"], "bisection");
    assert_eq!(v["coordinate"]["method"], "coordinate");
    assert!(v["at_phases"]["gamma_max"].as_f64().unwrap() > 0.0);
}

#[test]
fn tolerance_env_override() {
    let dir = TempDir::new().unwrap();
    let input = complex_triple(&dir);
    let v = stdout_json(&run(&["gamma-max", "--input", s(&input)]));
    let g = v["closed_form"]["gamma_max"].as_f64().unwrap() + 1e-6;
    let phases: Vec<String> = v["closed_form"]["probe_phases"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p.as_f64().unwrap().to_string())
        .collect();
    let gamma = format!("{g},{g},{g}");
    let args = [
        "check",
        "--input",
        s(&input),
        "--gamma",
        &gamma,
        "--phases",
        &phases.join(","),
    ];

    let strict = run(&args);
    assert_eq!(code(&strict), 0);
    assert_eq!(stdout_json(&strict)["probabilistic"]["feasible"], false);

    let loose = qnot().args(args).env("QNOT_TOL", "1e-3").output().unwrap();
    assert_eq!(code(&loose), 0);
    assert_eq!(stdout_json(&loose)["probabilistic"]["feasible"], true);

    let bad = qnot().args(args).env("QNOT_TOL", "-1").output().unwrap();
    assert_eq!(code(&bad), 2);
}
