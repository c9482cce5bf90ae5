use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dirtyperiod")).args(args).output().expect("spawn")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn synthesize_offset_uses_one_borrowed_wire() {
    let o = run(&["synthesize", "offset", "-n", "4", "-K", "5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("total_width=5"), "{text}");
    assert!(text.contains("round_trip=ok"));
}

#[test]
fn synthesize_mcx_is_linear() {
    let o = run(&["synthesize", "mcx", "-c", "5"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("toffoli_count=12"), "{}", stdout(&o));
}

#[test]
fn written_file_verifies_and_mutation_fails() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bimul.txt");
    let p = path.to_str().unwrap();
    let o = run(&["synthesize", "bimultiply", "-R", "7", "-K", "3", "-c", "1", "--out", p]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));

    let o = run(&["verify", "--file", p]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("result: pass"));

    let text = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    let gate = lines.iter().rposition(|l| !l.starts_with('#') && !l.trim().is_empty()).unwrap();
    lines.remove(gate);
    fs::write(&path, lines.join("\n")).unwrap();
    let o = run(&["verify", "--file", p]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("counterexample"));

    let o = run(&["measure", p]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("toffoli_count="));
}

#[test]
fn verify_reports_dirty_sweep() {
    let o = run(&["verify", "increment", "-n", "5", "-c", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("dirty sweep: all"), "{text}");
    assert!(text.contains("result: pass"));

    let o = run(&["verify", "mod_double", "-R", "11"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn shor_factors_small_moduli() {
    for (r, want) in [("15", "factors: 3 5"), ("21", "factors: 3 7")] {
        let o = run(&["shor", "-R", r, "--seed", "3"]);
        assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
        assert!(stdout(&o).contains(want), "{}", stdout(&o));
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["shor", "-R", "16"]).status.code(), Some(2));
    assert_eq!(run(&["synthesize", "frobnicate", "-n", "3"]).status.code(), Some(2));
    assert_eq!(run(&["synthesize", "offset"]).status.code(), Some(2));
    assert_eq!(run(&["verify"]).status.code(), Some(2));
}

#[test]
fn list_names_every_construction() {
    let o = run(&["list"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for name in ["add", "increment", "mcx", "mod_offset", "bimultiply"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}
