use std::process::Command;

use serde_json::Value;

fn betageom(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_betageom"))
        .args(args)
        .output()
        .expect("binary runs");
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> Value {
    let (code, stdout, stderr) = betageom(args);
    assert_eq!(code, 0, "{args:?}: {stderr}");
    serde_json::from_str(&stdout).unwrap()
}

fn value(v: &Value) -> f64 {
    v["value"].as_f64().unwrap()
}

#[test]
fn uniform_triangle_volume_example() {
    let v = json(&["polytope", "--d", "2", "--n", "3", "--betas", "0,0,0", "--quantity", "volume"]);
    assert_eq!(v["schema"], "betageom/1");
    assert!((value(&v) - 0.232101).abs() < 1e-6, "{}", value(&v));
    assert!(v["quad_config"]["rel_tol"].is_number());
    assert!(v["wall_time_seconds"].is_number());
    for (_, r) in v["diagnostics"].as_object().unwrap() {
        assert!(r.as_f64().unwrap() < 1e-9);
    }
}

#[test]
fn theta_of_empty_multisets_is_one() {
    let v = json(&["theta", "--x", "3.0", "--Y", "", "--Z", ""]);
    assert_eq!(value(&v), 1.0);
}

#[test]
fn apex_limit_cone_is_binomial() {
    // only the apex parameter large: P[C != R^2] -> sum_{l < 2} C(3, l) / 2^3
    let v = json(&[
        "cone",
        "--d",
        "2",
        "--betas",
        "0,0,0,0",
        "--apex-beta",
        "1e6",
        "--quantity",
        "prob-proper",
    ]);
    assert!((value(&v) - 0.5).abs() < 5e-3, "{}", value(&v));
}

#[test]
fn exit_codes() {
    assert_eq!(betageom(&["polytope", "--d", "2", "--betas", "0,0,0"]).0, 2);
    assert_eq!(
        betageom(&["polytope", "--d", "2", "--betas", "0,zero,0", "--quantity", "volume"]).0,
        2
    );
    assert_eq!(
        betageom(&[
            "polytope",
            "--d",
            "2",
            "--betas",
            "0,0,0",
            "--quantity",
            "volume",
            "--frobnicate"
        ])
        .0,
        2
    );
    assert_eq!(
        betageom(&["polytope", "--d", "2", "--betas", "0,0,0", "--quantity", "girth"]).0,
        2
    );
    assert_eq!(
        betageom(&[
            "cone",
            "--d",
            "1",
            "--betas",
            "-1,0",
            "--apex-beta",
            "0",
            "--quantity",
            "prob-proper"
        ])
        .0,
        2
    );
    assert_eq!(betageom(&["--help"]).0, 0);

    let (code, stdout, _) = betageom(&[
        "cone",
        "--d",
        "2",
        "--betas",
        "0,0,0",
        "--apex-beta",
        "-3",
        "--quantity",
        "prob-proper",
    ]);
    assert_eq!(code, 3);
    let err: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(err["schema"], "betageom/1");
    assert_eq!(err["error"]["kind"], "domain");
    assert_eq!(err["error"]["exit_code"], 3);
    let (code, stdout, _) = betageom(&["polytope", "--d", "2", "--betas", "0,0,0", "--quantity", "fk", "--k", "5"]);
    assert_eq!(code, 3);
    assert_eq!(serde_json::from_str::<Value>(&stdout).unwrap()["error"]["kind"], "index");

    // three replications cannot reproduce a volume
    let (code, stdout, _) = betageom(&["verify", "--d", "2", "--betas", "0,0,0,0", "--samples", "3"]);
    assert_eq!(code, 1);
    let v: Value = serde_json::from_str(&stdout).unwrap();
    assert_eq!(v["passed"], false);
}

#[test]
fn reports_round_trip_through_the_echoed_request() {
    let cases: &[&[&str]] = &[
        &[
            "polytope",
            "--d",
            "3",
            "--betas",
            "0.3,-1,2.5e0,1,0",
            "--quantity",
            "fk",
            "--k",
            "1",
        ],
        &[
            "polytope",
            "--d",
            "2",
            "--betas",
            "uniform:0.7",
            "--n",
            "5",
            "--quantity",
            "beta-content",
            "--content-beta",
            "-0.5",
        ],
        &[
            "cone",
            "--d",
            "3",
            "--betas",
            "0.1,0.2,0.3,0.4",
            "--apex-beta",
            "1e-1",
            "--quantity",
            "upsilon",
            "--k",
            "2",
            "--tol",
            "1e-9",
        ],
        &[
            "cone",
            "--d",
            "2",
            "--betas",
            "0,1,2",
            "--apex-beta",
            "0.5",
            "--quantity",
            "external-angle",
            "--face",
            "1",
        ],
        &["theta", "--x", "0.75", "--Y", "1,2", "--Z", "0.5,3"],
    ];
    for args in cases {
        let first = json(args);
        let argv: Vec<String> = first["request"]["argv"]
            .as_array()
            .unwrap()
            .iter()
            .map(|a| a.as_str().unwrap().to_string())
            .collect();
        let argv: Vec<&str> = argv.iter().map(String::as_str).collect();
        let second = json(&argv);
        let (a, b) = (value(&first), value(&second));
        assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()), "{args:?}: {a} vs {b}");
        assert_eq!(first["request"], second["request"]);
    }
}

#[test]
fn simulate_ignores_the_thread_count() {
    let base = [
        "simulate",
        "--model",
        "cone",
        "--d",
        "2",
        "--betas",
        "0,1,-0.5,2",
        "--apex-beta",
        "0",
        "--samples",
        "9000",
        "--seed",
        "11",
    ];
    let one = betageom(&[&base[..], &["--jobs", "1"]].concat());
    let three = betageom(&[&base[..], &["--jobs", "3"]].concat());
    assert_eq!(one.0, 0);
    assert_eq!(one.1, three.1);
    let v: Value = serde_json::from_str(&one.1).unwrap();
    assert_eq!(v["estimates"]["prob_full_space"]["samples"], 9000);
    assert_eq!(v["rng"]["streams"], 3);
}

#[test]
fn verify_is_deterministic_given_the_seed() {
    let args = [
        "verify",
        "--d",
        "2",
        "--betas",
        "0,1,2,-0.5",
        "--apex-beta",
        "0.5",
        "--samples",
        "8192",
        "--seed",
        "3",
    ];
    let (c1, a, _) = betageom(&args);
    let (c2, b, _) = betageom(&args);
    assert_eq!(c1, c2);
    assert_eq!(a, b);
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = std::env::temp_dir().join(format!("betageom-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("run.toml");
    std::fs::write(&path, "d = 2\nbetas = \"0,0,0\"\nquantity = \"sylvester\"\n").unwrap();
    let p = path.to_str().unwrap();
    let v = json(&["polytope", "--config", p, "--quantity", "volume"]);
    assert!((value(&v) - 0.232101).abs() < 1e-6);
    std::fs::write(&path, "d = 2\nbetas = \"0,0,0,0\"\nquantity = \"sylvester\"\n").unwrap();
    let v = json(&["polytope", "--config", p]);
    assert!((value(&v) - 35.0 / (12.0 * std::f64::consts::PI.powi(2))).abs() < 1e-9);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn tables_emit_csv_sweeps() {
    let (code, out, err) = betageom(&[
        "tables",
        "--model",
        "polytope",
        "--d",
        "2",
        "--betas",
        "uniform:0",
        "--n",
        "4",
        "--quantity",
        "fk",
        "--k",
        "0",
        "--from",
        "-1",
        "--to",
        "2",
        "--steps",
        "4",
    ]);
    assert_eq!(code, 0, "{err}");
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "betas,fk");
    assert_eq!(lines.len(), 5);
    let f0: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    // four points on the circle are always in convex position
    assert!((f0[0] - 4.0).abs() < 1e-9);
    assert!(f0.windows(2).all(|w| w[1] < w[0]));

    let (code, out, _) = betageom(&[
        "tables",
        "--model",
        "polytope",
        "--d",
        "2",
        "--betas",
        "0,0,0,0",
        "--quantity",
        "beta-content",
        "--sweep",
        "content-beta",
        "--from",
        "0",
        "--to",
        "4",
        "--steps",
        "3",
    ]);
    assert_eq!(code, 0);
    assert!(out.starts_with("content-beta,beta-content\n"));
}
