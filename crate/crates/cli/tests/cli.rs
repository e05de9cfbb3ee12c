use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lightcone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lightcone"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn assert_schema_valid(doc: &Value) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schema/output.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "schema violations: {errors:?}");
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const CORNELL: [&str; 10] = [
    "--potential",
    "cornell",
    "--A",
    "0",
    "--B",
    "1",
    "--m",
    "1",
    "--ell",
    "0",
];
const KRATZER_EXAMPLE: [&str; 20] = [
    "wavefunction",
    "--potential",
    "kratzer",
    "--C",
    "1",
    "--D",
    "-0.5",
    "--m",
    "1",
    "--n",
    "1",
    "--ell",
    "0",
    "--r-min",
    "0.001",
    "--r-max",
    "20",
    "--points",
    "2000",
    "--format",
];

#[test]
fn cornell_spectrum_values() {
    let mut args = vec!["spectrum"];
    args.extend(CORNELL);
    args.extend(["--n-max", "2", "--format", "json"]);
    let out = lightcone(&args);
    assert!(out.status.success(), "{}", stderr(&out));
    let doc = json_of(&out);
    assert_schema_valid(&doc);
    let eps: Vec<f64> = doc["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["epsilon"].as_f64().unwrap())
        .collect();
    let expect = [2.0, 6f64.sqrt(), 8f64.sqrt()];
    for (e, x) in eps.iter().zip(expect) {
        assert!((e - x).abs() < 1e-14, "{e} vs {x}");
    }
    assert_eq!(eps.len(), 3);
}

#[test]
fn kratzer_wavefunction_csv() {
    let mut args = KRATZER_EXAMPLE.to_vec();
    args.push("csv");
    let out = lightcone(&args);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,gamma1"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 2000);
    let norm: f64 = rows
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 * w[0].1 + w[1].1 * w[1].1))
        .sum();
    assert!((norm - 1.0).abs() < 1e-8, "{norm}");
    assert!(!text.contains('\r'));
    // The level sits on the growing branch, which is reported, not hidden.
    assert!(stderr(&out).contains("code=non-decaying-tail"));
}

#[test]
fn csv_round_trips_json_values() {
    let mut args = KRATZER_EXAMPLE.to_vec();
    args.push("csv");
    let csv = String::from_utf8(lightcone(&args).stdout).unwrap();
    args.pop();
    args.push("json");
    let out = lightcone(&args);
    let doc = json_of(&out);
    assert_schema_valid(&doc);
    let g = doc["results"]["gamma1"].as_array().unwrap();
    for (line, v) in csv.lines().skip(1).zip(g) {
        let cell: f64 = line.split_once(',').unwrap().1.parse().unwrap();
        assert_eq!(cell.to_bits(), v.as_f64().unwrap().to_bits());
    }
}

#[test]
fn angular_report() {
    let out = lightcone(&["angular", "--n", "0", "--ell", "0", "--samples", "64"]);
    assert!(out.status.success());
    let doc = json_of(&out);
    assert_schema_valid(&doc);
    assert!(doc["results"]["max_residual"].as_f64().unwrap() < 1e-10);
    assert_eq!(doc["results"]["table"].as_array().unwrap().len(), 64);

    let csv = lightcone(&[
        "angular",
        "--n",
        "2",
        "--ell",
        "1",
        "--samples",
        "8",
        "--format",
        "csv",
    ]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("theta,t1,t2,r1,r2"));
    assert_eq!(text.lines().count(), 9);
}

#[test]
fn oracle_compare_exact_states() {
    let out = lightcone(&[
        "oracle-compare",
        "--potential",
        "cornell",
        "--A",
        "0.5",
        "--B",
        "1",
        "--m",
        "0",
        "--n",
        "2",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let doc = json_of(&out);
    assert_schema_valid(&doc);
    let r = &doc["results"][0];
    assert_eq!(r["true_polynomial"], Value::Bool(true));
    assert_eq!(r["within_error"], Value::Bool(true));
    assert!(r["residual_max"].as_f64().unwrap() < 1e-8);
}

#[test]
fn deterministic_output() {
    let mut args = KRATZER_EXAMPLE.to_vec();
    args.push("csv");
    assert_eq!(lightcone(&args).stdout, lightcone(&args).stdout);
    let a = lightcone(&[
        "spectrum",
        "--potential",
        "kratzer",
        "--C",
        "1",
        "--D",
        "0.5",
        "--m",
        "1",
        "--n-max",
        "3",
    ]);
    let b = lightcone(&[
        "spectrum",
        "--potential",
        "kratzer",
        "--C",
        "1",
        "--D",
        "0.5",
        "--m",
        "1",
        "--n-max",
        "3",
    ]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_errors_exit_2() {
    let cases: [&[&str]; 5] = [
        &["spectrum", "--potential", "cornell", "--A", "0", "--m", "1"],
        &[
            "spectrum",
            "--potential",
            "cornell",
            "--A",
            "0",
            "--B",
            "1",
            "--m",
            "1",
            "--n",
            "3",
            "--n-max",
            "1",
        ],
        &[
            "wavefunction",
            "--potential",
            "cornell",
            "--A",
            "0",
            "--B",
            "1",
            "--m",
            "0",
            "--points",
            "1",
        ],
        &[
            "spectrum",
            "--potential",
            "coulomb",
            "--z",
            "0.1",
            "--m",
            "1",
        ],
        &["nonsense"],
    ];
    for args in cases {
        let out = lightcone(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = stderr(&out);
        assert!(err.starts_with("error code="), "{err}");
        assert_eq!(err.lines().count(), 1, "{err}");
    }
}

#[test]
fn numerical_failure_exits_3() {
    // Odd Cornell levels at m = 0 never terminate; the regular branch overflows.
    let out = lightcone(&[
        "wavefunction",
        "--potential",
        "cornell",
        "--A",
        "0",
        "--B",
        "1",
        "--m",
        "0",
        "--n",
        "1",
        "--r-max",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("error code="));
    let out = lightcone(&[
        "spectrum",
        "--potential",
        "kratzer",
        "--C",
        "1",
        "--D",
        "3",
        "--m",
        "1",
        "--n",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("code=NO_BOUND_STATE"));
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    std::fs::write(
        &path,
        "potential = \"cornell\"\nA = 0.0\nB = 1.0\nm = 1.0\nn-max = 2\n",
    )
    .unwrap();
    let p = path.to_str().unwrap();

    let doc = json_of(&lightcone(&["spectrum", "--config", p]));
    assert_eq!(doc["results"].as_array().unwrap().len(), 3);
    assert_eq!(doc["inputs"]["B"], 1.0);

    let doc = json_of(&lightcone(&[
        "spectrum", "--config", p, "--B", "2", "--n-max", "0",
    ]));
    let eps = doc["results"][0]["epsilon"].as_f64().unwrap();
    assert!((eps - 8f64.sqrt()).abs() < 1e-14);

    std::fs::write(&path, "potential = \"cornell\"\nbogus = 1\n").unwrap();
    assert_eq!(
        lightcone(&["spectrum", "--config", p]).status.code(),
        Some(2)
    );
    let missing = dir.path().join("absent.toml");
    assert_eq!(
        lightcone(&["spectrum", "--config", missing.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn output_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("a.csv");
    let out = lightcone(&[
        "angular",
        "--n",
        "1",
        "--format",
        "csv",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(path)
        .unwrap()
        .starts_with("theta,t1,t2,r1,r2\n"));
}

fn flagged_ids(doc: &Value) -> Vec<String> {
    doc["results"]["cases"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == "flag")
        .map(|c| c["id"].as_str().unwrap().to_string())
        .collect()
}

fn passed_criteria(doc: &Value) -> Vec<bool> {
    doc["results"]["criteria"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["passed"].as_bool().unwrap())
        .collect()
}

#[test]
fn verify_suite_and_fault_injection() {
    let clean = lightcone(&["verify"]);
    assert_eq!(clean.status.code(), Some(0), "{}", stderr(&clean));
    let clean = json_of(&clean);
    assert_schema_valid(&clean);
    assert!(passed_criteria(&clean).iter().all(|&p| p));

    let loose = lightcone(&["verify", "--tol", "1e-2"]);
    assert_eq!(loose.status.code(), Some(0));
    let loose = json_of(&loose);
    assert_eq!(passed_criteria(&loose), passed_criteria(&clean));
    let base = flagged_ids(&clean);
    assert!(flagged_ids(&loose).iter().all(|id| base.contains(id)));

    let bad = lightcone(&["verify", "--inject-q-sign-flip"]);
    assert_eq!(bad.status.code(), Some(3));
    assert!(stderr(&bad).contains("code=ACCEPTANCE_FAILED"));
    let bad = json_of(&bad);
    assert_schema_valid(&bad);
    let map_flags: Vec<_> = bad["results"]["cases"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["reason"] == "map-verification-failed")
        .map(|c| c["id"].as_str().unwrap().to_string())
        .collect();
    assert!(!map_flags.is_empty());
    assert!(
        map_flags.iter().all(|id| id.starts_with("cornell-map ")),
        "{map_flags:?}"
    );
}
