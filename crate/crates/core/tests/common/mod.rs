#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

/// Shipped problem files and the commands whose reports are stored.
pub const GOLDEN_CASES: &[(&str, &[&str])] = &[
    (
        "identity",
        &[
            "polar",
            "pinv",
            "verify-thm31",
            "btransform",
            "classify",
            "closed-range",
        ],
    ),
    (
        "nilpotent2",
        &[
            "polar",
            "pinv",
            "verify-thm31",
            "btransform",
            "classify",
            "closed-range",
        ],
    ),
    (
        "diag34",
        &[
            "polar",
            "pinv",
            "verify-thm31",
            "btransform",
            "classify",
            "closed-range",
        ],
    ),
    (
        "mult_x",
        &[
            "polar",
            "pinv",
            "verify-thm31",
            "check-complemented",
            "closed-range",
        ],
    ),
    (
        "mult_xminus2",
        &[
            "polar",
            "pinv",
            "verify-thm31",
            "check-complemented",
            "closed-range",
        ],
    ),
    (
        "two_component_projection",
        &[
            "polar",
            "pinv",
            "verify-thm31",
            "check-complemented",
            "closed-range",
        ],
    ),
    (
        "graded_inv_n",
        &["graded-report", "closed-range", "verify-thm31"],
    ),
];

pub fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

/// Runs the binary from the crate root; returns stdout and the exit code.
pub fn run(args: &[&str]) -> (String, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_regpolar"))
        .args(args)
        .current_dir(root())
        .env_remove("REGPOLAR_TOL")
        .output()
        .expect("binary runs");
    (
        String::from_utf8(out.stdout).unwrap(),
        out.status.code().unwrap_or(-1),
    )
}

pub fn schema() -> jsonschema::JSONSchema {
    let raw = std::fs::read_to_string(root().join("tests/report.schema.json")).unwrap();
    let value: serde_json::Value = serde_json::from_str(&raw).unwrap();
    jsonschema::JSONSchema::compile(&value).expect("schema compiles")
}

/// Schema violations of a json report, empty when valid.
pub fn violations(schema: &jsonschema::JSONSchema, json: &str) -> Vec<String> {
    let value: serde_json::Value = match serde_json::from_str(json) {
        Ok(v) => v,
        Err(e) => return vec![format!("not json: {e}")],
    };
    let out = match schema.validate(&value) {
        Ok(()) => Vec::new(),
        Err(errors) => errors
            .map(|e| format!("{} at {}", e, e.instance_path))
            .collect(),
    };
    out
}

pub fn golden_path(name: &str, cmd: &str) -> PathBuf {
    root()
        .join("tests/golden")
        .join(format!("{name}.{cmd}.json"))
}
