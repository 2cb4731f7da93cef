use std::process::{Command, Output};

use serde_json::Value;

fn landau_bloch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_landau-bloch"))
        .args(args)
        .env_remove("SOURCE_DATE_EPOCH")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_str(&stdout(out)).unwrap()
}

fn schema(name: &str) -> jsonschema::Validator {
    let text = match name {
        "constants" => include_str!("../../../book/src/schemas/constants.schema.json"),
        "hardy" => include_str!("../../../book/src/schemas/hardy.schema.json"),
        "curve" => include_str!("../../../book/src/schemas/curve.schema.json"),
        "verify" => include_str!("../../../book/src/schemas/verify.schema.json"),
        "polymap" => include_str!("../../../book/src/schemas/polymap.schema.json"),
        _ => unreachable!(),
    };
    jsonschema::validator_for(&serde_json::from_str(text).unwrap()).unwrap()
}

fn assert_valid(name: &str, doc: &Value) {
    let validator = schema(name);
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

// Parses the CSV body, skipping the leading manifest comment.
fn csv_rows(text: &str) -> (Vec<String>, Vec<[f64; 2]>) {
    let mut lines = text.lines();
    let manifest = lines.next().unwrap();
    assert!(manifest.starts_with("# {"));
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|line| {
            let mut cells = line.split(',').map(|c| c.parse::<f64>().unwrap());
            [cells.next().unwrap(), cells.next().unwrap()]
        })
        .collect();
    (header, rows)
}

#[test]
fn constants_command() {
    let doc = json(&landau_bloch(&["constants", "--alpha", "1", "--n", "1", "--lambda", "1", "--K", "1"]));
    assert_valid("constants", &doc);
    let r = &doc["result"];
    assert!((r["schlicht_radius_lower"].as_f64().unwrap() - 3f64.sqrt() / 4.0).abs() < 1e-9);
    assert_eq!(r["admissible_upper_radius"].as_f64().unwrap(), 0.0);
    assert_eq!(doc["manifest"]["command"], "constants");
    assert_eq!(doc["manifest"]["parameters"]["K"], 1.0);

    let doc = json(&landau_bloch(&["constants", "--alpha", "1", "--n", "2"]));
    assert!((doc["result"]["a0"].as_f64().unwrap() - 0.5).abs() < 1e-15);

    let out = landau_bloch(&["constants", "--lambda", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("lambda must be in (0, 1]"));
}

#[test]
fn hardy_command() {
    let doc = json(&landau_bloch(&["hardy", "--p", "2", "--n", "1"]));
    assert_valid("hardy", &doc);
    let r = &doc["result"];
    assert!((r["optimal_scale"].as_f64().unwrap() - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
    let r0 = r["optimal_scale"].as_f64().unwrap();
    assert!((r["closed_form_ratio"].as_f64().unwrap() - 1.0 / r0).abs() < 1e-12);

    let out = landau_bloch(&["hardy", "--k0", "1", "--lambda0", "2"]);
    assert_eq!(out.status.code(), Some(2));
    let out = landau_bloch(&["hardy", "--p", "1", "--n", "3", "--k0", "0.01", "--lambda0", "0.01"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("parameter regime"));
}

#[test]
fn lower_curve_csv() {
    let out = landau_bloch(&["curve", "lower", "--alpha", "1", "--n", "1", "--lambda", "0.5", "--points", "201"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(!text.contains('\r'));
    let (header, rows) = csv_rows(&text);
    assert_eq!(header, ["z_abs", "lower_envelope"]);
    assert_eq!(rows.len(), 201);
    assert_eq!(rows[0], [0.0, 0.5]);
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));

    let constants = json(&landau_bloch(&["constants", "--alpha", "1", "--n", "1", "--lambda", "0.5"]));
    let m = constants["result"]["m_lambda"].as_f64().unwrap();
    let step = rows[1][0];
    let nearest = rows
        .iter()
        .min_by(|a, b| (a[0] - m).abs().total_cmp(&(b[0] - m).abs()))
        .unwrap();
    assert!((nearest[0] - m).abs() <= step / 2.0);
    // The envelope crosses zero at m with slope of order one.
    assert!(nearest[1].abs() <= 5.0 * step);

    // 17 significant digits in scientific notation.
    let first_data = text.lines().nth(2).unwrap();
    assert_eq!(first_data, "0.0000000000000000e0,5.0000000000000000e-1");
}

#[test]
fn upper_and_schlicht_curves() {
    let (header, rows) = csv_rows(&stdout(&landau_bloch(&["curve", "upper", "--lambda", "0.5", "--points", "11"])));
    assert_eq!(header, ["z_abs", "upper_envelope"]);
    assert_eq!(rows.len(), 11);
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));

    let out = landau_bloch(&["curve", "schlicht-vs-lambda", "--alpha", "1", "--n", "1", "--K", "1", "--points", "20"]);
    let (header, rows) = csv_rows(&stdout(&out));
    assert_eq!(header, ["lambda", "schlicht_radius_lower"]);
    let last = rows.last().unwrap();
    assert_eq!(last[0], 1.0);
    assert!((last[1] - 0.4330127).abs() < 1e-7);
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0] && w[1][1] > w[0][1]));

    let doc = json(&landau_bloch(&["curve", "lower", "--points", "5", "--format", "json"]));
    assert_valid("curve", &doc);
    assert_eq!(doc["rows"].as_array().unwrap().len(), 5);

    assert_eq!(landau_bloch(&["curve", "lower", "--points", "1"]).status.code(), Some(2));
    assert_eq!(landau_bloch(&["curve", "upper", "--lambda", "1"]).status.code(), Some(2));
}

#[test]
fn verify_suites() {
    let doc = json(&landau_bloch(&["verify", "extremal"]));
    assert_valid("verify", &doc);
    assert_eq!(doc["passed"], true);
    assert!(doc["report"]["axis_gap"].as_f64().unwrap() <= 1e-8);
    assert_eq!(doc["manifest"]["timestamp"], "1970-01-01T00:00:00Z");

    let doc = json(&landau_bloch(&["verify", "random-poly", "--seed", "42", "--samples", "10000"]));
    assert_valid("verify", &doc);
    assert_eq!(doc["report"]["violations"], 0);
    assert_eq!(doc["cases"].as_array().unwrap().len(), 100);
    assert_eq!(doc["manifest"]["seed"], 42);

    let doc = json(&landau_bloch(&["verify", "hardy-injectivity", "--samples", "500"]));
    assert_valid("verify", &doc);
    assert_eq!(doc["passed"], true);

    let out = landau_bloch(&["verify", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn verify_reads_map_files() {
    let dir = std::env::temp_dir().join(format!("landau-bloch-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("map.json");
    let map = r#"{"n": 1, "components": [[{"re": 0.2, "im": 0.0, "exp": [0]}, {"re": 1.0, "im": 0.5, "exp": [1]}, {"re": -0.4, "im": 0.1, "exp": [3]}]]}"#;
    assert_valid("polymap", &serde_json::from_str(map).unwrap());
    std::fs::write(&path, map).unwrap();
    let path_arg = path.to_str().unwrap();

    let doc = json(&landau_bloch(&["verify", "random-poly", "--map-file", path_arg, "--alpha", "2", "--samples", "2000"]));
    assert_valid("verify", &doc);
    assert_eq!(doc["cases"].as_array().unwrap().len(), 1);
    assert_eq!(doc["passed"], true);

    let doc = json(&landau_bloch(&["verify", "hardy-injectivity", "--map-file", path_arg, "--samples", "500"]));
    assert_eq!(doc["passed"], true);

    std::fs::write(&path, r#"{"n": 1, "components": [[{"re": 1, "im": 0, "exp": [1, 0]}]]}"#).unwrap();
    let out = landau_bloch(&["verify", "random-poly", "--map-file", path_arg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("invalid map"));
    assert_eq!(landau_bloch(&["verify", "extremal", "--map-file", path_arg]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn output_is_reproducible() {
    for args in [
        &["verify", "random-poly", "--seed", "9", "--samples", "1000"][..],
        &["constants", "--alpha", "0.5", "--n", "3", "--lambda", "0.3", "--K", "2"][..],
        &["curve", "schlicht-vs-lambda", "--points", "7"][..],
    ] {
        assert_eq!(landau_bloch(args).stdout, landau_bloch(args).stdout);
    }
    let stamped = Command::new(env!("CARGO_BIN_EXE_landau-bloch"))
        .args(["constants"])
        .env("SOURCE_DATE_EPOCH", "1700000000")
        .output()
        .unwrap();
    let doc: Value = serde_json::from_slice(&stamped.stdout).unwrap();
    assert_eq!(doc["manifest"]["timestamp"], "2023-11-14T22:13:20Z");
}
