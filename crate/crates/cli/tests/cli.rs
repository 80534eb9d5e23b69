use std::io::Write;
use std::path::PathBuf;
use std::process::{Command as Proc, Stdio};

use gentle_cli::{run, Command, Config};
use serde_json::Value;

fn path(parts: &[&str]) -> PathBuf {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("tests");
    p.extend(parts);
    p
}

fn data(name: &str) -> String {
    std::fs::read_to_string(path(&["data", name])).unwrap()
}

fn json(cmd: Command, name: &str) -> Value {
    serde_json::from_str(&run(cmd, &data(name), &Config::default()).unwrap()).unwrap()
}

fn bin(args: &[&str], stdin: Option<&str>) -> (i32, String) {
    let mut child = Proc::new(env!("CARGO_BIN_EXE_gentle-si"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    if let Some(text) = stdin {
        child
            .stdin
            .take()
            .unwrap()
            .write_all(text.as_bytes())
            .unwrap();
    }
    drop(child.stdin.take());
    let out = child.wait_with_output().unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8(out.stdout).unwrap(),
    )
}

#[test]
fn peg_dot_matches_golden() {
    let dot = run(
        Command::Peg,
        &data("running.model"),
        &Config {
            dot: true,
            ..Config::default()
        },
    )
    .unwrap();
    let golden = std::fs::read_to_string(path(&["golden", "running.dot"])).unwrap();
    assert_eq!(dot, golden);
    let nodes = dot
        .lines()
        .filter(|l| l.ends_with("\";") && !l.contains("->"))
        .count();
    assert_eq!(nodes, 22);
}

#[test]
fn output_is_deterministic() {
    for cmd in [Command::Peg, Command::Presentation, Command::Verify] {
        let a = run(cmd, &data("running.model"), &Config::default()).unwrap();
        let b = run(cmd, &data("running.model"), &Config::default()).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn presentation_reports_bounds() {
    let p = json(Command::Presentation, "running.model");
    assert_eq!(p["bounds"]["generators"], 42);
    assert_eq!(p["bounds"]["relations"], 168);
    assert_eq!(p["maximal"], true);
    for g in p["generators"].as_array().unwrap() {
        assert!(g["degree"].as_u64().unwrap() <= 42);
    }
}

#[test]
fn validate_flags_non_gentle_input() {
    let v = json(Command::Validate, "cover.model");
    assert_eq!(v["ok"], false);
    assert_eq!(v["string_algebra"]["ok"], true);
    assert_eq!(v["gentle"]["violations"][0]["axiom"], "c");
    assert_eq!(
        json(Command::Validate, "running.model")["rank"]["is_rank_sequence"],
        true
    );
}

#[test]
fn color_and_cover() {
    let c = json(Command::Color, "running.model");
    assert_eq!(
        c["ideal"],
        serde_json::json!(["a2a1", "b2b1", "b3b2", "c2c1"])
    );
    let k = json(Command::Cover, "cover.model");
    assert_eq!(k["kernel"], serde_json::json!(["b3a2"]));
    assert_eq!(k["colors"]["b1"], 2);
}

#[test]
fn components_of_a_path() {
    let c = json(Command::Components, "path.model");
    assert_eq!(
        c["components"],
        serde_json::json!([{ "r": [1, 0] }, { "r": [0, 1] }])
    );
}

#[test]
fn system_commands() {
    let g = json(Command::Generators, "eleven.sys");
    assert_eq!(g["forced"], serde_json::json!(["e1", "e2"]));
    let v = json(Command::Verify, "closing.sys");
    assert_eq!(v["generators_match"], true);
    assert_eq!(v["relations_match"], true);
    let err = run(Command::Peg, &data("closing.sys"), &Config::default()).unwrap_err();
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn binary_reads_files_and_stdin() {
    let file = path(&["data", "closing.sys"]);
    let (code, out) = bin(&["relations", file.to_str().unwrap()], None);
    assert_eq!(code, 0);
    let (code2, out2) = bin(&["relations", "-"], Some(&data("closing.sys")));
    assert_eq!(code2, 0);
    assert_eq!(out, out2);
}

#[test]
fn binary_error_exit_codes() {
    let (code, out) = bin(&["validate"], Some("vertex 1\nvertex 1\n"));
    assert_eq!(code, 1);
    let e: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(e["error"]["kind"], "syntax");
    assert_eq!(e["error"]["line"], 2);

    let (code, out) = bin(
        &["generators"],
        Some("vertex 1\nvertex 2\narrow a 1 2\nbeta 1 1\nbeta 2 1\nrank a 2\n"),
    );
    assert_eq!(code, 1, "{out}");
    let (code, _) = bin(&["peg", "/nonexistent/file"], None);
    assert_eq!(code, 1);
}
