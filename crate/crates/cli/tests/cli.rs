//! End-to-end runs of the `bescheck` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bescheck")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn exit_codes_follow_verdicts() {
    assert_eq!(code(&run(&["check", &fixture("example2.bes")])), 0);
    assert_eq!(code(&run(&["check", &fixture("example1.bes")])), 1);
    assert_eq!(code(&run(&["check", &fixture("case_study_loop.bes")])), 2);
    assert_eq!(code(&run(&["check", &fixture("missing.bes")])), 3);
    assert_eq!(code(&run(&["check", "--mode", "bogus", &fixture("example2.bes")])), 3);
}

#[test]
fn batch_exit_code_is_the_most_severe() {
    let out = run(&["check", &fixture("example2.bes"), &fixture("case_study_loop.bes"), &fixture("example1.bes")]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert!(text.contains("example2.bes: consistent, stable"));
    assert!(text.contains("example1.bes: inconsistent"));
}

#[test]
fn human_trace_for_example_one() {
    let out = run(&["check", "--trace", "--no-timings", &fixture("example1.bes")]);
    let text = stdout(&out);
    assert!(text.contains("conflict on c"), "{text}");
    assert!(text.contains("1?? -> 101"), "{text}");
}

#[test]
fn json_report_fields() {
    let out = run(&["check", "--format", "json", "--trace", &fixture("example1.bes")]);
    let v = json(&out);
    assert_eq!(v["consistent"], false);
    assert_eq!(v["reachable_count"], "3");
    assert_eq!(v["exit_code"], 1);
    let trace = &v["traces"][0];
    assert_eq!(trace["states"], serde_json::json!(["1??", "101"]));

    let out = run(&["check", "--format", "json", &fixture("example2.bes"), &fixture("example1.bes")]);
    let v = json(&out);
    assert_eq!(v.as_array().map(Vec::len), Some(2));
}

#[test]
fn engines_agree_on_fixtures() {
    for name in
        ["example1.bes", "example2.bes", "example2_free.bes", "example3.bes", "case_study.bes", "case_study_loop.bes"]
    {
        for mode in ["relaxed", "strict"] {
            let verdicts: Vec<(Value, Value, i32)> = ["direct", "ctl", "oracle"]
                .iter()
                .map(|engine| {
                    let out = run(&["check", "--format", "json", "--mode", mode, "--engine", engine, &fixture(name)]);
                    let v = json(&out);
                    (v["consistent"].clone(), v["stable"].clone(), code(&out))
                })
                .collect();
            assert!(verdicts.windows(2).all(|w| w[0] == w[1]), "{name} {mode}: {verdicts:?}");
        }
    }
}

#[test]
fn interleaving_fairness() {
    let out = run(&["check", "--semantics", "interleave", "--format", "json", &fixture("example2.bes")]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["stable"], "stable");
    let out = run(&["check", "--semantics", "interleave", "--format", "json", &fixture("example3.bes")]);
    assert_eq!(code(&out), 2);
    assert_eq!(json(&out)["witness"].as_array().map(Vec::len), Some(5));
    let out = run(&["check", "--semantics", "interleave", "--mode", "strict", &fixture("example3.bes")]);
    assert_eq!(code(&out), 3);
}

#[test]
fn ctl_subcommand() {
    assert_eq!(code(&run(&["ctl", &fixture("example2.bes"), "EF b_true"])), 0);
    assert_eq!(code(&run(&["ctl", &fixture("case_study.bes"), "AG true"])), 0);
    let out = run(&["ctl", &fixture("example2.bes"), "AF AG (b_true & c_false & d_false)"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).starts_with("holds"));
    assert_eq!(code(&run(&["ctl", &fixture("example1.bes"), "AG !conflict"])), 1);
    assert_eq!(code(&run(&["ctl", &fixture("example1.bes"), "AG nope_true"])), 3);
    assert_eq!(code(&run(&["ctl", &fixture("example1.bes"), "AG ("])), 3);
}

#[test]
fn generated_chain_checks() {
    let out = run(&["gen-chain", "--m", "4", "--k", "2"]);
    assert_eq!(code(&out), 0);
    let dir = std::env::temp_dir().join(format!("bescheck-chain-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("chain.bes");
    std::fs::write(&path, &out.stdout).unwrap();
    let out = run(&["check", "--format", "json", path.to_str().unwrap()]);
    let v = json(&out);
    assert_eq!(v["consistent"], true);
    assert_eq!(v["stable"], "unstable");
    assert_eq!(code(&out), 2);
    std::fs::remove_dir_all(&dir).unwrap();
    assert_eq!(code(&run(&["gen-chain", "--m", "1", "--k", "1"])), 3);
}

#[test]
fn chain_fixture() {
    let out = run(&["check", "--format", "json", &fixture("chain_m32_k1.bes")]);
    assert_eq!(code(&out), 2);
    let count: f64 = json(&out)["reachable_count"].as_str().unwrap().parse().unwrap();
    assert!((count / 5.41166e11 - 1.0).abs() < 1e-5, "{count}");
}

#[test]
fn json_is_deterministic_apart_from_timings() {
    let strip = |out: &Output| {
        let mut v = json(out);
        v.as_object_mut().unwrap().remove("timings_ms");
        v
    };
    for name in ["example1.bes", "case_study.bes", "case_study_loop.bes"] {
        let args = ["check", "--format", "json", "--trace", "--mode", "strict"];
        let a = run(&[&args[..], &[fixture(name).as_str()]].concat());
        let b = run(&[&args[..], &[fixture(name).as_str()]].concat());
        assert_eq!(strip(&a), strip(&b), "{name}");
    }
}

#[test]
fn smallest_ring_agrees_across_engines() {
    let src = run(&["gen-chain", "--m", "2", "--k", "0"]);
    let path = std::env::temp_dir().join(format!("bescheck-ring-{}.bes", std::process::id()));
    std::fs::write(&path, &src.stdout).unwrap();
    let p = path.to_str().unwrap();
    let verdicts: Vec<(Value, Value)> = ["direct", "ctl", "oracle"]
        .iter()
        .map(|e| {
            let v = json(&run(&["check", "--format", "json", "--engine", e, p]));
            (v["consistent"].clone(), v["stable"].clone())
        })
        .collect();
    std::fs::remove_file(&path).unwrap();
    assert!(verdicts.iter().all(|v| *v == (Value::Bool(true), Value::from("unstable"))), "{verdicts:?}");
}
