use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn grammar(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../grammars").join(name)
}

fn ptlc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptlc"))
        .args(args)
        .env("TLC_COLOR", "0")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn compiled_sample(dir: &Path) -> String {
    let out = dir.join("sample.rel");
    let o = ptlc(&[
        "compile",
        grammar("sample.tlc").to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    out.to_str().unwrap().to_owned()
}

#[test]
fn compile_writes_relation_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.rel");
    let o = ptlc(&[
        "compile",
        grammar("sample.tlc").to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
        "--snapshots",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rel = std::fs::read_to_string(&out).unwrap();
    assert!(rel.starts_with("relation lexical 1 surface 1\n"));
    for tag in ["initial", "after-cr", "after-sc"] {
        let snap = std::fs::read_to_string(dir.path().join(format!("s.{tag}.fsa"))).unwrap();
        assert!(snap.starts_with(&format!("# phase {tag}\nstates ")), "{snap}");
    }
}

#[test]
fn compile_is_deterministic() {
    let a = ptlc(&["compile", grammar("sample.tlc").to_str().unwrap()]);
    let b = ptlc(&["compile", grammar("sample.tlc").to_str().unwrap()]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let dot = ptlc(&["compile", grammar("sample.tlc").to_str().unwrap(), "--dot"]);
    assert!(stdout(&dot).starts_with("digraph"));
}

#[test]
fn lookup_both_directions() {
    let dir = tempfile::tempdir().unwrap();
    let rel = compiled_sample(dir.path());
    let gen = ptlc(&["lookup", &rel, "generate", "cd"]);
    assert!(gen.status.success());
    assert_eq!(stdout(&gen), "cbd\n");
    let ana = ptlc(&["lookup", &rel, "analyze", "Vbbb"]);
    assert_eq!(stdout(&ana), "VBBB\n");
    let none = ptlc(&["lookup", &rel, "analyze", "cd"]);
    assert!(none.status.success());
    assert_eq!(stdout(&none), "");
}

#[test]
fn lookup_rejects_unknown_symbols() {
    let dir = tempfile::tempdir().unwrap();
    let rel = compiled_sample(dir.path());
    let o = ptlc(&["lookup", &rel, "analyze", "xyz"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("error: symbol `x`"), "{}", stderr(&o));
}

#[test]
fn lookup_flags_truncation() {
    let dir = tempfile::tempdir().unwrap();
    let rel = compiled_sample(dir.path());
    let o = ptlc(&["lookup", &rel, "generate", "cd", "--bound", "1"]);
    assert_eq!(stdout(&o), "cbd\n");
    let loops = dir.path().join("loops.tlc");
    std::fs::write(
        &loops,
        "tapes lexical 1 surface 1\nalphabet 1 : a\nalphabet 2 : a e\nrule A => lex : _ a _ surf : _ a _\nrule E => lex : _ [] _ surf : _ e _\n",
    )
    .unwrap();
    let out = dir.path().join("loops.rel");
    assert!(ptlc(&["compile", loops.to_str().unwrap(), "-o", out.to_str().unwrap()])
        .status
        .success());
    let o = ptlc(&["lookup", out.to_str().unwrap(), "generate", "a", "--bound", "1"]);
    assert_eq!(stdout(&o), "a\nae\nea\n!truncated\n");
}

#[test]
fn multi_tape_lookup() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.rel");
    let o = ptlc(&[
        "compile",
        grammar("three_tape.tlc").to_str().unwrap(),
        "-o",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let gen = ptlc(&["lookup", out.to_str().unwrap(), "generate", "ks,CVC"]);
    assert_eq!(stdout(&gen), "kas\n");
    let ana = ptlc(&["lookup", out.to_str().unwrap(), "analyze", "kas"]);
    assert_eq!(stdout(&ana), "ks,CVC\n");
}

#[test]
fn check_reports_equivalence() {
    let o = ptlc(&["check", grammar("sample.tlc").to_str().unwrap(), "--bound", "3"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "equivalent up to bound 3\n");
    let o = ptlc(&[
        "check",
        grammar("k_insertion.tlc").to_str().unwrap(),
        "--variant",
        "2i",
        "--bound",
        "3",
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
}

#[test]
fn check_catches_a_broken_compiler() {
    let o = ptlc(&[
        "check",
        grammar("sample.tlc").to_str().unwrap(),
        "--bound",
        "2",
        "--skip-sc",
    ]);
    assert!(!o.status.success());
    assert_eq!(
        stdout(&o),
        "counterexample: ⟨cd,cd⟩: compiled relation accepts, oracle rejects\n"
    );
}

#[test]
fn grammar_errors_carry_line_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.tlc");
    std::fs::write(&empty, "").unwrap();
    let o = ptlc(&["compile", empty.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).starts_with("error: line 1:"), "{}", stderr(&o));

    let overlap = dir.path().join("overlap.tlc");
    std::fs::write(
        &overlap,
        "tapes lexical 1 surface 1\nalphabet 1 : a\nalphabet 2 : a b\nrule X => lex : _ a _ surf : _ a _\nrule Y => lex : _ a _ surf : _ a _\nrule Y => lex : _ a _ surf : _ b _\n",
    )
    .unwrap();
    let o = ptlc(&["compile", overlap.to_str().unwrap()]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("overlap"), "{}", stderr(&o));
    assert!(stderr(&o).starts_with("error: line "), "{}", stderr(&o));
}

#[test]
fn dump_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let rel = compiled_sample(dir.path());
    let o = ptlc(&["dump", &rel]);
    assert_eq!(stdout(&o), std::fs::read_to_string(&rel).unwrap());
    let o = ptlc(&["dump", &rel, "--dot"]);
    assert!(stdout(&o).contains("B:b"));
}

#[test]
fn bad_variant_and_bound_are_rejected() {
    let g = grammar("sample.tlc");
    assert!(!ptlc(&["check", g.to_str().unwrap(), "--variant", "3"]).status.success());
    assert!(!ptlc(&["check", g.to_str().unwrap(), "--bound", "0"]).status.success());
}
