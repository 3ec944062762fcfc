use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use invforge::cli::{run, EXIT_BUDGET, EXIT_FALSE, EXIT_OK, EXIT_USAGE};

fn data(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn in_process(args: &[&str]) -> (i32, String, String) {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("invforge").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn with_stdin(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_invforge"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

#[test]
fn verify_thm_prints_the_verdict() {
    let (code, out, _) = in_process(&["verify-thm", "--lzs", &data("lzs-265-like.cfg"), "--boolfun", &data("paper-z.anf")]);
    assert_eq!(code, EXIT_OK);
    assert!(out.ends_with("ALL STEPS PASS\n"));
    let (_, summary, _) = in_process(&[
        "verify-thm", "--lzs", &data("lzs-265-like.cfg"), "--boolfun", &data("paper-z.anf"), "--report", "summary",
    ]);
    assert_eq!(summary, "full_chain: true\nALL STEPS PASS\n");
}

#[test]
fn non_solution_exits_one() {
    let (code, out, _) = in_process(&[
        "fe", "--lzs", &data("lzs-265-like.cfg"), "--invariant", &data("thm7.poly"), "--boolfun", &data("random.anf"),
    ]);
    assert_eq!(code, EXIT_FALSE);
    assert!(out.contains("is_zero: false"));
}

#[test]
fn hypothesis_violation_is_a_usage_error() {
    let (code, out, err) =
        in_process(&["verify-thm", "--lzs", &data("broken-hypothesis.cfg"), "--boolfun", &data("paper-z.anf")]);
    assert_eq!(code, EXIT_USAGE);
    assert!(out.is_empty());
    assert!(err.contains("{D(2),D(3)} = {24,28}"), "{err}");
    assert_eq!(err.lines().count(), 1);
}

#[test]
fn budget_overflow_exits_three() {
    let (code, _, err) = in_process(&[
        "fe", "--lzs", &data("lzs-265-like.cfg"), "--invariant", &data("thm7.poly"), "--symbolic", "--budget", "100",
    ]);
    assert_eq!(code, EXIT_BUDGET);
    assert!(err.contains("budget"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(in_process(&["frobnicate"]).0, EXIT_USAGE);
    assert_eq!(in_process(&["fe", "--lzs", &data("lzs-265-like.cfg")]).0, EXIT_USAGE);
    assert_eq!(in_process(&["fe", "--lzs", "/nonexistent", "--invariant", &data("thm7.poly")]).0, EXIT_USAGE);
    assert_eq!(
        in_process(&["fe", "--lzs", &data("thm7.poly"), "--invariant", &data("thm7.poly")]).0,
        EXIT_USAGE,
        "a polynomial is not a wiring"
    );
    assert_eq!(in_process(&["step", "--lzs", &data("lzs-265-like.cfg"), "--boolfun", &data("paper-z.anf"), "--fkl", "12"]).0, EXIT_USAGE);
    assert_eq!(in_process(&["linear-cycle", "--lzs", &data("lzs-265-like.cfg"), "--mask", "nope"]).0, EXIT_USAGE);
    assert_eq!(in_process(&["--help"]).0, EXIT_OK);
}

#[test]
fn stdin_is_accepted_for_paths() {
    let out = with_stdin(&["annihilators", "--poly", "-", "--degree", "1"], "ab\n");
    assert_eq!(out.status.code(), Some(EXIT_OK));
    let text = String::from_utf8(out.stdout).unwrap();
    // ab is 1 only at a = b = 1, where a+1 and b+1 vanish
    assert!(text.contains("dimension: 2"), "{text}");

    let wiring = std::fs::read_to_string(data("lzs-265-like.cfg")).unwrap();
    let out = with_stdin(&["verify-thm", "--lzs", "-", "--boolfun", &data("paper-z.anf"), "--report", "summary"], &wiring);
    assert_eq!(out.status.code(), Some(EXIT_OK));
}

#[test]
fn json_lines_mirror_text_fields() {
    let args = ["fe", "--lzs", &data("lzs-265-like.cfg"), "--invariant", &data("setup827.poly"), "--boolfun", &data("paper-z.anf")];
    let (_, text, _) = in_process(&args);
    let mut json_args = args.to_vec();
    json_args.extend(["--format", "json-lines"]);
    let (_, json, _) = in_process(&json_args);
    let record: serde_json::Value = serde_json::from_str(json.trim()).unwrap();
    for line in text.lines() {
        let (key, value) = line.split_once(": ").unwrap();
        let field = &record[key];
        let rendered = match field {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Array(a) if a.is_empty() => "-".into(),
            serde_json::Value::Array(a) => a.iter().map(|v| v.as_str().unwrap()).collect::<Vec<_>>().join(","),
            other => other.to_string(),
        };
        assert_eq!(rendered, value, "field {key}");
    }
}

#[test]
fn absorber_check_follows_the_verdict() {
    let dir = std::env::temp_dir().join(format!("invforge-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let (f, g) = (dir.join("f.poly"), dir.join("g.poly"));
    std::fs::write(&f, "abc").unwrap();
    std::fs::write(&g, "ab").unwrap();
    let (f, g) = (f.display().to_string(), g.display().to_string());
    assert_eq!(in_process(&["absorbers", "--poly", &f, "--check", &g]).0, EXIT_OK);
    assert_eq!(in_process(&["absorbers", "--poly", &g, "--check", &f]).0, EXIT_FALSE);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn step_follows_the_library() {
    use invforge::cipher::{step, CipherState, RoundBits, Wiring};
    use invforge::lab::solution_function;
    let (code, out, _) = in_process(&[
        "step", "--lzs", &data("lzs-265-like.cfg"), "--boolfun", &data("paper-z.anf"), "--state", "0x0f0f0f0f0",
        "--fkl", "110", "--rounds", "2",
    ]);
    assert_eq!(code, EXIT_OK);
    let w = Wiring::lzs_265_like();
    let bits = RoundBits::new(true, true, false);
    let one = step(CipherState::new(0x0f0f0f0f0), &w, &solution_function(), bits);
    let two = step(one, &w, &solution_function(), bits);
    let expected = format!(
        "round 0 state 0f0f0f0f0\nround 1 state {:09x} fkl 110\nround 2 state {:09x} fkl 110\n",
        one.bits(),
        two.bits()
    );
    assert_eq!(out, expected);
}

#[test]
fn thread_cap_does_not_change_output() {
    let args = ["search", "--lzs", &data("lzs-265-like.cfg"), "--invariant", &data("thm7.poly"), "--trials", "64", "--seed", "5"];
    let run_with = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_invforge")).args(args).env("INVFORGE_THREADS", threads).output().unwrap()
    };
    let (a, b) = (run_with("1"), run_with("3"));
    assert_eq!(a.status.code(), Some(EXIT_OK));
    assert_eq!(a.stdout, b.stdout);
}
