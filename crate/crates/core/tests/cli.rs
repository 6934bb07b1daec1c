use std::process::Command;

use serde_json::Value;

const D12_U: &str = "beta:(1,12)(2,11)(3,10)(4,9)(5,8)(6,7):(1,2)(3,12)(4,11)(5,10)(6,9)(7,8)";
const D12_V: &str = "beta:(2,12)(3,11)(4,10)(5,9)(6,8):(1,4)(2,3)(5,12)(6,11)(7,10)(8,9)";

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_freepairs"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let (code, out, _) = run(&full);
    (code, serde_json::from_str(&out).expect("stdout is JSON"))
}

fn schema() -> Value {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../schema/freepairs-output.schema.json"
    );
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Validator for the subset of JSON Schema the output schema uses.
fn validate(root: &Value, schema: &Value, v: &Value, path: &str) -> Result<(), String> {
    let fail = |msg: &str| Err(format!("{path}: {msg}"));
    if let Some(r) = schema.get("$ref").and_then(Value::as_str) {
        let mut target = root;
        for part in r.trim_start_matches("#/").split('/') {
            target = &target[part];
        }
        validate(root, target, v, path)?;
    }
    if let Some(ty) = schema.get("type") {
        let types: Vec<&str> = match ty {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
            _ => vec![],
        };
        let ok = types.iter().any(|t| match *t {
            "object" => v.is_object(),
            "array" => v.is_array(),
            "string" => v.is_string(),
            "integer" => v.is_i64() || v.is_u64(),
            "number" => v.is_number(),
            "boolean" => v.is_boolean(),
            "null" => v.is_null(),
            _ => false,
        });
        if !ok {
            return fail(&format!("expected {types:?}, got {v}"));
        }
    }
    if let Some(c) = schema.get("const") {
        if c != v {
            return fail(&format!("expected const {c}"));
        }
    }
    if let Some(e) = schema.get("enum").and_then(Value::as_array) {
        if !e.contains(v) {
            return fail(&format!("{v} not in enum"));
        }
    }
    if let (Some(min), Some(n)) = (schema.get("minimum").and_then(Value::as_f64), v.as_f64()) {
        if n < min {
            return fail(&format!("{n} below minimum {min}"));
        }
    }
    if let Some(obj) = v.as_object() {
        for key in schema
            .get("required")
            .and_then(Value::as_array)
            .into_iter()
            .flatten()
        {
            if !obj.contains_key(key.as_str().unwrap()) {
                return fail(&format!("missing `{key}`"));
            }
        }
        if let Some(props) = schema.get("properties").and_then(Value::as_object) {
            for (k, sub) in props {
                if let Some(x) = obj.get(k) {
                    validate(root, sub, x, &format!("{path}.{k}"))?;
                }
            }
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), v.as_array()) {
        for (i, x) in arr.iter().enumerate() {
            validate(root, items, x, &format!("{path}[{i}]"))?;
        }
    }
    if let Some(all) = schema.get("allOf").and_then(Value::as_array) {
        for s in all {
            validate(root, s, v, path)?;
        }
    }
    if let Some(one) = schema.get("oneOf").and_then(Value::as_array) {
        let hits = one
            .iter()
            .filter(|s| validate(root, s, v, path).is_ok())
            .count();
        if hits != 1 {
            return fail(&format!("{hits} oneOf branches match"));
        }
    }
    Ok(())
}

#[test]
fn validator_rejects_bad_documents() {
    let s = schema();
    let bad = serde_json::json!({"command": "bass-eval", "d": 0, "k": 1, "m": 1, "j": 0});
    assert!(validate(&s, &s, &bad, "$").is_err());
    let bad = serde_json::json!({"command": "units-enumerate", "group": "S3", "type": "delta",
        "count": 7, "nontrivial": 6, "parameter_pairs": 1});
    assert!(validate(&s, &s, &bad, "$").is_err());
}

#[test]
fn every_command_matches_the_schema() {
    let s = schema();
    let cases: Vec<Vec<&str>> = vec![
        vec!["units", "enumerate", "--group", "S3", "--type", "beta"],
        vec![
            "units",
            "enumerate",
            "--group",
            "S4",
            "--type",
            "gamma",
            "--count-only",
        ],
        vec![
            "pair",
            "verdict",
            "--group",
            "S3",
            "--u",
            "gamma:(1,2,3):(1,2)",
            "--v",
            "beta:(1,3,2):(1,3)",
        ],
        vec![
            "pair", "verdict", "--group", "D12", "--u", D12_U, "--v", D12_V,
        ],
        vec![
            "pair",
            "min-power",
            "--group",
            "S3",
            "--u",
            "gamma:(1,2,3):(1,2)",
            "--v",
            "beta:(1,3,2):(1,3)",
        ],
        vec!["invariant", "--group", "S3", "--mode", "M"],
        vec!["invariant", "--group", "C6", "--mode", "m"],
        vec![
            "manyfp", "--group", "S3", "--x", "(1,2,3)", "--h", "(1,2)", "--k", "(1,2)",
        ],
        vec!["stau", "a5"],
        vec![
            "stau",
            "metabelian",
            "--q",
            "11",
            "--exponents",
            "1,3,9,5,4",
            "--k",
            "2",
            "--m",
            "10",
        ],
        vec![
            "bass", "eval", "--d", "5", "--k", "2", "--m", "4", "--j", "1",
        ],
    ];
    for args in cases {
        let (code, v) = json(&args);
        assert!(code == 0 || code == 3, "{args:?} exited {code}");
        validate(&s, &s, &v, "$").unwrap_or_else(|e| panic!("{args:?}: {e}"));
    }
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    for args in [
        vec![
            "--format",
            "json",
            "invariant",
            "--group",
            "S3",
            "--mode",
            "M",
        ],
        vec![
            "--format",
            "json",
            "--jobs",
            "1",
            "invariant",
            "--group",
            "S3",
            "--mode",
            "M",
        ],
        vec!["--format", "json", "stau", "a5"],
        vec![
            "--format",
            "json",
            "pair",
            "min-power",
            "--group",
            "D12",
            "--u",
            D12_U,
            "--v",
            D12_V,
        ],
    ] {
        let first = run(&args).1;
        assert!(!first.is_empty());
        assert_eq!(first, run(&args).1, "{args:?}");
    }
    let a = run(&[
        "--format",
        "json",
        "--jobs",
        "1",
        "invariant",
        "--group",
        "S3",
        "--mode",
        "m",
    ])
    .1;
    let b = run(&[
        "--format",
        "json",
        "--jobs",
        "4",
        "invariant",
        "--group",
        "S3",
        "--mode",
        "m",
    ])
    .1;
    assert_eq!(a, b);
}

#[test]
fn exit_codes() {
    let verdict =
        |u: &str, v: &str| run(&["pair", "verdict", "--group", "S3", "--u", u, "--v", v]).0;
    assert_eq!(verdict("gamma:(1,2,3):(1,2)", "beta:(1,3,2):(1,3)"), 0);
    assert_eq!(
        run(&["pair", "verdict", "--group", "D12", "--u", D12_U, "--v", D12_V]).0,
        3
    );
    assert_eq!(run(&["invariant", "--group", "D12", "--mode", "m"]).0, 3);
    // usage and parse errors
    assert_eq!(run(&["units"]).0, 1);
    assert_eq!(
        run(&["units", "enumerate", "--group", "Q8", "--type", "beta"]).0,
        1
    );
    assert_eq!(verdict("delta:(1,2):(1,2)", "beta:(1,3,2):(1,3)"), 1);
    // preconditions
    assert_eq!(
        run(&["units", "enumerate", "--group", "S9", "--type", "beta"]).0,
        2
    );
    assert_eq!(
        run(&["bass", "eval", "--d", "6", "--k", "2", "--m", "2", "--j", "1"]).0,
        2
    );
    assert_eq!(verdict("bass:(1,2,3):2:2", "beta:(1,3,2):(1,3)"), 2);
    assert_eq!(
        run(&[
            "pair",
            "min-power",
            "--group",
            "S3",
            "--u",
            "gamma:(1,2):(1,2)",
            "--v",
            "beta:(1,3,2):(1,3)"
        ])
        .0,
        2
    );
    assert_eq!(
        run(&["manyfp", "--group", "S3", "--x", "(1,2)", "--h", "(1,2)", "--k", "(1,2)"]).0,
        2
    );
}

#[test]
fn text_output_headlines() {
    let (code, out, _) = run(&[
        "units",
        "enumerate",
        "--group",
        "S3",
        "--type",
        "beta",
        "--count-only",
    ]);
    assert_eq!((code, out.as_str()), (0, "7\n"));
    let (code, out, err) = run(&["invariant", "--group", "S3", "--mode", "M"]);
    assert_eq!(code, 0);
    assert!(out.contains("M(S3) = 2"), "{out}");
    assert!(!err.is_empty());
    let (_, out, _) = run(&[
        "bass", "eval", "--d", "5", "--k", "2", "--m", "4", "--j", "0",
    ]);
    assert!(out.starts_with("u_{2,4,5}(z^0) = 1 "), "{out}");
}
