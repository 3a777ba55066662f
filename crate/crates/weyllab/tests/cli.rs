use std::f64::consts::PI;
use std::fs;
use std::process::Command;

use proptest::prelude::*;
use serde_json::Value;
use weyllab::cli::main_with;
use weyllab::config::Command as Cmd;
use weyllab::ExperimentConfig;

struct Outcome {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Outcome {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = main_with(std::iter::once("weyllab").chain(args.iter().copied()), &mut out, &mut err);
    Outcome { code, stdout: String::from_utf8(out).unwrap(), stderr: String::from_utf8(err).unwrap() }
}

fn json(text: &str) -> Value {
    serde_json::from_str(text).unwrap()
}

#[test]
fn weyl_prints_the_summary_line() {
    let o = run(&["weyl", "--symbol", "poly: x1^2+x2^2", "--L", "25"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(o.stdout, "count=80 prediction=78.5398 rel_err=0.0186\n");
}

#[test]
fn mixed_degree_symbol_exits_2() {
    let o = run(&["weyl", "--symbol", "poly: x1^2+x2^3", "--L", "25"]);
    assert_eq!(o.code, 2);
    assert_eq!(o.stderr, "symbol: mixed-degree monomial at term 2\n");
    assert!(o.stdout.is_empty());
}

#[test]
fn numerical_refusal_exits_3() {
    let o = run(&["limit-kernel", "--symbol", "poly: x1^2+x2^2", "--s", "1", "--h", "0.5,0"]);
    assert_eq!(o.code, 3);
    assert!(o.stderr.starts_with("s: "), "{}", o.stderr);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&["weyl", "--bogus", "1"]).code, 2);
    assert_eq!(run(&["nonsense"]).code, 2);
    assert_eq!(run(&["weyl", "--symbol", "poly: x1^2", "--L", "abc"]).code, 2);
    assert_eq!(run(&["weyl", "--symbol", "poly: x1^2", "--L", "10", "--format", "xml"]).code, 2);
    assert_eq!(run(&["--threads", "0", "weyl", "--symbol", "poly: x1^2", "--L", "10"]).code, 2);
    assert_eq!(run(&["--help"]).code, 0);
}

#[test]
fn dirichlet_log_fit_json() {
    let o = run(&["log-fit", "--model", "dirichlet", "--s", "0.5", "--x", "1.5707963", "--L-list", "1e4:1e8:8"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v = json(&o.stdout);
    let target = 1.0 / (2.0 * PI);
    assert!((v["target"].as_f64().unwrap() - target).abs() < 1e-15);
    assert!((v["slope"].as_f64().unwrap() / target - 1.0).abs() < 1e-3);
    assert_eq!(v["samples"].as_array().unwrap().len(), 8);
    // machine format carries 17 significant digits
    assert!(o.stdout.contains("\"target\": 1.5915494309189535e-1"));
}

#[test]
fn output_file_gets_the_artifact_and_stdout_the_summary() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("decay.csv");
    let p = path.to_str().unwrap();
    let o = run(&["osc-decay", "--symbol", "poly: x1^2+x2^2", "--h", "1,0", "--t-max", "1000", "--output", p]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert!(o.stdout.starts_with("slope="), "{}", o.stdout);
    let csv = fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,abs_J,re_J,im_J"));
    assert_eq!(lines.count(), 81);

    let path = dir.path().join("count.json");
    let p = path.to_str().unwrap();
    assert_eq!(run(&["weyl", "--symbol", "poly: x1^2+x2^2", "--L", "25", "--output", p]).code, 0);
    assert_eq!(json(&fs::read_to_string(&path).unwrap())["count"], 80);
}

#[test]
fn unwritable_output_exits_2() {
    let o = run(&["weyl", "--symbol", "poly: x1^2", "--L", "10", "--output", "/nonexistent/dir/out.json"]);
    assert_eq!(o.code, 2);
    assert!(o.stderr.starts_with("/nonexistent/dir/out.json: "), "{}", o.stderr);
}

#[test]
fn saved_config_reruns_identically_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let c = cfg.to_str().unwrap();
    let first = run(&[
        "kernel",
        "--symbol",
        "poly: x1^2+x2^2",
        "--x",
        "0.3,1.1",
        "--y",
        "2,0.5",
        "--L",
        "400",
        "--save-config",
        c,
    ]);
    assert_eq!(first.code, 0, "{}", first.stderr);
    let text = fs::read_to_string(&cfg).unwrap();
    assert!(text.starts_with("command = kernel\n"), "{text}");
    assert_eq!(ExperimentConfig::parse(&text).unwrap().serialize(), text);

    let again = run(&["kernel", "--config", c]);
    assert_eq!(again.stdout, first.stdout);

    let changed = run(&["kernel", "--config", c, "--L", "100"]);
    assert_eq!(changed.code, 0);
    assert_ne!(changed.stdout, first.stdout);

    let wrong = run(&["weyl", "--config", c]);
    assert_eq!(wrong.code, 2);
    assert!(wrong.stderr.starts_with("config: "), "{}", wrong.stderr);
}

#[test]
fn config_files_keep_comments_and_layout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("fit.cfg");
    let text = "# interior point\ncommand = log-fit\nmodel   = dirichlet\n\ns=0.5\nx = 0.7853981633974483\nL-list = 1e4:1e8:8\n";
    fs::write(&cfg, text).unwrap();
    let o = run(&["log-fit", "--config", cfg.to_str().unwrap(), "--save-config", cfg.to_str().unwrap()]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    assert_eq!(fs::read_to_string(&cfg).unwrap(), text);
}

fn outputs_with_threads(args: &[&str]) -> Vec<String> {
    ["1", "2", "5"]
        .iter()
        .map(|t| {
            let mut full = vec!["--threads", t];
            full.extend_from_slice(args);
            let o = run(&full);
            assert_eq!(o.code, 0, "{}", o.stderr);
            o.stdout
        })
        .collect()
}

#[test]
fn outputs_do_not_depend_on_thread_count() {
    let cases: [&[&str]; 5] = [
        &[
            "kernel",
            "--symbol",
            "poly: x1^2+2*x2^2",
            "--x",
            "0.3,1.1",
            "--y",
            "2,0.5",
            "--L",
            "3e4",
            "--s",
            "0.4",
            "--format",
            "json",
        ],
        &["rescale-scan", "--symbol", "poly: x1^2+x2^2", "--s", "0.5", "--L-list", "100,1000", "--resolution", "128"],
        &["osc-decay", "--symbol", "poly: x1^4+x2^4", "--h", "1,1", "--t-max", "1000"],
        &[
            "green-fit",
            "--symbol",
            "poly: x1^2+x2^2",
            "--s",
            "1",
            "--L",
            "1e4",
            "--base",
            "1,1",
            "--direction",
            "1,0.3",
        ],
        &["admissible", "--symbol", "poly: x1^4+x2^4", "--k0", "4", "--format", "csv"],
    ];
    for args in cases {
        let outs = outputs_with_threads(args);
        assert!(outs.windows(2).all(|w| w[0] == w[1]), "{}", args[0]);
    }
}

#[test]
fn link_check_paths_agree() {
    let o = run(&["link-check", "--symbol", "poly: x1^2+x2^2", "--L", "400", "--x", "0.3,1.1", "--y", "2,0.5"]);
    assert_eq!(o.code, 0, "{}", o.stderr);
    let v = json(&o.stdout);
    assert_eq!(v["weights"].as_array().unwrap().len(), 3);
    assert!(v["max_discrepancy"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn binary_runs_the_quick_suite_as_json() {
    let out =
        Command::new(env!("CARGO_BIN_EXE_weyllab")).args(["suite", "quick", "--format", "json"]).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(v["pass"], true);
    for record in v["results"].as_array().unwrap() {
        for key in ["criterion", "measured", "target", "tol", "pass"] {
            assert!(record.get(key).is_some());
        }
    }
}

#[test]
fn binary_reads_the_thread_variable() {
    let out = Command::new(env!("CARGO_BIN_EXE_weyllab"))
        .env("WEYLLAB_THREADS", "many")
        .args(["weyl", "--symbol", "poly: x1^2", "--L", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("threads: "));
}

fn config_text(command: Cmd) -> impl Strategy<Value = String> {
    let keys: Vec<&'static str> = command.params().iter().map(|p| p.key).collect();
    let n = keys.len();
    (
        proptest::sample::subsequence(keys, 0..=n),
        proptest::collection::vec(("[ \t]{0,2}", "[ \t]{0,2}", "[-0-9a-z.,:^+* ]{1,12}", 0u8..4), n),
        any::<bool>(),
    )
        .prop_map(move |(keys, decor, trailing)| {
            let mut lines = vec![format!("command = {}", command.name())];
            for (key, (pre, mid, value, extra)) in keys.iter().zip(decor) {
                match extra {
                    0 => lines.push(String::new()),
                    1 => lines.push(format!("# note on {key}")),
                    _ => {}
                }
                lines.push(format!("{pre}{key}{mid}={mid}{}", value.trim()));
            }
            let mut text = lines.join("\n");
            if trailing {
                text.push('\n');
            }
            text
        })
        .prop_filter("values must be non-empty", |t| t.lines().all(|l| !l.trim_end().ends_with('=')))
}

proptest! {
    #[test]
    fn config_round_trip_is_byte_identical(
        text in prop_oneof![config_text(Cmd::Kernel), config_text(Cmd::GreenFit), config_text(Cmd::OscDecay)]
    ) {
        let config = ExperimentConfig::parse(&text).unwrap();
        prop_assert_eq!(config.serialize(), text);
    }
}
