//! The reproduce summary against the schema shipped in `schemas/`.
//!
//! Only the keywords the schema uses are checked: `type`, `const`, `enum`,
//! `required`, `properties`, `additionalProperties: false`, `items`,
//! `minItems`/`maxItems`, `minimum`/`maximum`/`exclusiveMinimum`, `oneOf`
//! and local `$ref`s.

use std::path::Path;

use dfs_oneway_cli::config::{MeanCount, SlicingArg};
use dfs_oneway_cli::reproduce::{reproduce, summary_path, ReproduceArgs};
use serde_json::Value;

fn schema() -> Value {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas/summary.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn resolve<'a>(root: &'a Value, s: &'a Value) -> &'a Value {
    match s.get("$ref").and_then(Value::as_str) {
        Some(r) => {
            let name = r.strip_prefix("#/$defs/").expect("local ref");
            &root["$defs"][name]
        }
        None => s,
    }
}

fn type_ok(t: &str, v: &Value) -> bool {
    match t {
        "object" => v.is_object(),
        "array" => v.is_array(),
        "string" => v.is_string(),
        "boolean" => v.is_boolean(),
        "number" => v.is_number(),
        "integer" => v.is_u64() || v.is_i64(),
        "null" => v.is_null(),
        other => panic!("unsupported type {other}"),
    }
}

fn check(root: &Value, schema: &Value, v: &Value, at: &str, errs: &mut Vec<String>) {
    let s = resolve(root, schema);
    if let Some(t) = s.get("type").and_then(Value::as_str) {
        if !type_ok(t, v) {
            errs.push(format!("{at}: expected {t}"));
            return;
        }
    }
    if let Some(c) = s.get("const") {
        if c != v {
            errs.push(format!("{at}: expected {c}"));
        }
    }
    if let Some(e) = s.get("enum").and_then(Value::as_array) {
        if !e.contains(v) {
            errs.push(format!("{at}: {v} not in enum"));
        }
    }
    if let Some(x) = v.as_f64() {
        if s.get("minimum").and_then(Value::as_f64).is_some_and(|m| x < m) {
            errs.push(format!("{at}: {x} below minimum"));
        }
        if s.get("maximum").and_then(Value::as_f64).is_some_and(|m| x > m) {
            errs.push(format!("{at}: {x} above maximum"));
        }
        if s.get("exclusiveMinimum").and_then(Value::as_f64).is_some_and(|m| x <= m) {
            errs.push(format!("{at}: {x} not above exclusive minimum"));
        }
    }
    if let Some(alts) = s.get("oneOf").and_then(Value::as_array) {
        let matching = alts
            .iter()
            .filter(|alt| {
                let mut sub = Vec::new();
                check(root, alt, v, at, &mut sub);
                sub.is_empty()
            })
            .count();
        if matching != 1 {
            errs.push(format!("{at}: {matching} oneOf branches match"));
        }
    }
    if let Some(obj) = v.as_object() {
        for r in s.get("required").and_then(Value::as_array).into_iter().flatten() {
            let key = r.as_str().unwrap();
            if !obj.contains_key(key) {
                errs.push(format!("{at}: missing {key}"));
            }
        }
        let props = s.get("properties").and_then(Value::as_object);
        for (k, child) in obj {
            match props.and_then(|p| p.get(k)) {
                Some(ps) => check(root, ps, child, &format!("{at}.{k}"), errs),
                None if s.get("additionalProperties") == Some(&Value::Bool(false)) => {
                    errs.push(format!("{at}: unexpected property {k}"))
                }
                None => {}
            }
        }
    }
    if let Some(arr) = v.as_array() {
        let n = arr.len() as u64;
        if s.get("minItems").and_then(Value::as_u64).is_some_and(|m| n < m) {
            errs.push(format!("{at}: fewer than minItems"));
        }
        if s.get("maxItems").and_then(Value::as_u64).is_some_and(|m| n > m) {
            errs.push(format!("{at}: more than maxItems"));
        }
        if let Some(items) = s.get("items") {
            for (i, child) in arr.iter().enumerate() {
                check(root, items, child, &format!("{at}[{i}]"), errs);
            }
        }
    }
}

fn validate(v: &Value) -> Vec<String> {
    let root = schema();
    let mut errs = Vec::new();
    check(&root, &root, v, "$", &mut errs);
    errs
}

fn summary(mean: &str, slicing: &str) -> Value {
    let dir = tempfile::tempdir().unwrap();
    let args = ReproduceArgs {
        out: dir.path().to_path_buf(),
        mean_count: mean.parse::<MeanCount>().unwrap(),
        seed: 42,
        slicing: slicing.parse::<SlicingArg>().unwrap(),
        policy: dfs_oneway::protocol::Policy::PostselectReference,
        alpha: 0.0,
        white_noise: 0.0,
        haar_samples: 100,
        bloch_samples: 10,
    };
    reproduce(&args).unwrap();
    serde_json::from_str(&std::fs::read_to_string(summary_path(dir.path())).unwrap()).unwrap()
}

#[test]
fn summaries_validate() {
    for (mean, slicing) in [("inf", "exact"), ("1000", "exact"), ("1000", "quarters")] {
        let errs = validate(&summary(mean, slicing));
        assert!(errs.is_empty(), "{mean}/{slicing}: {errs:?}");
    }
}

#[test]
fn broken_summaries_are_rejected() {
    let good = summary("inf", "exact");

    let mut v = good.clone();
    v["runs"].as_array_mut().unwrap().pop();
    assert!(!validate(&v).is_empty());

    let mut v = good.clone();
    v.as_object_mut().unwrap().remove("comparisons");
    assert!(!validate(&v).is_empty());

    let mut v = good.clone();
    v["config"]["mean_count"] = Value::from("many");
    assert!(!validate(&v).is_empty());

    let mut v = good.clone();
    v["runs"][0]["chi"]["matrix"].as_array_mut().unwrap().pop();
    assert!(!validate(&v).is_empty());

    let mut v = good;
    v["extra"] = Value::from(1);
    assert!(!validate(&v).is_empty());
}
