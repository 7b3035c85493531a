use std::path::PathBuf;
use std::process::{Command, Output};

fn semfo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semfo")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, text: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("semfo-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn repro_viterbi_extension() {
    let o = semfo(&["repro", "viterbi-extension"]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{out}");
    assert!(out.contains("pi_A = 1/2"));
    assert!(out.contains("pi_B = 1/4"));
    assert!(out.ends_with("PASS\n"));
}

#[test]
fn repro_nat_polynomial() {
    let o = semfo(&["repro", "nat-polynomial", "--n", "4"]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{out}");
    assert!(out.contains("pi_4 = 4*x^4"));
    assert!(out.ends_with("PASS\n"));
}

#[test]
fn repro_others_pass() {
    for name in ["doubt-extension", "fuzzy-rewrite"] {
        let o = semfo(&["repro", name]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stdout(&o));
    }
}

#[test]
fn eval_prints_exact_values() {
    let p = scratch("v.txt", "semiring: viterbi\nuniverse: a b\nR(a) = 1/2\nR(b) = 1/2\n");
    let o = semfo(&["eval", "--interp", p.to_str().unwrap(), "--formula", "E x. A y. R(x)"]);
    assert_eq!(stdout(&o), "1/4\n");
    let o = semfo(&[
        "eval",
        "--semiring",
        "tropical",
        "--interp",
        p.to_str().unwrap(),
        "--formula",
        "E x. A y. R(x)",
    ]);
    assert_eq!(stdout(&o), "1\n");
}

#[test]
fn malformed_file_is_a_usage_error() {
    let p = scratch("bad.txt", "semiring: viterbi\nuniverse: a\nR(a = 1/2\n");
    let o = semfo(&["eval", "--interp", p.to_str().unwrap(), "--formula", "E x. R(x)"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    let o = semfo(&["eval", "--interp", "/nonexistent/file", "--formula", "E x. R(x)"]);
    assert_eq!(o.status.code(), Some(2));
    let o = semfo(&["eval", "--formula", "E x. R(x)"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn check_exit_codes() {
    let refuted = semfo(&[
        "check",
        "--property",
        "extensions",
        "--semiring",
        "viterbi",
        "--formula",
        "E x. A y. R(x)",
        "--max-size",
        "2",
        "--grid",
        "0,1/4,1/2,1",
    ]);
    assert_eq!(refuted.status.code(), Some(1));
    assert!(stdout(&refuted).contains("result: refuted"));
    let holds = semfo(&[
        "check",
        "--property",
        "extensions",
        "--semiring",
        "viterbi",
        "--formula",
        "E x. R(x)",
        "--max-size",
        "2",
    ]);
    assert_eq!(holds.status.code(), Some(0));
}

#[test]
fn strategies_and_provenance() {
    let o = semfo(&["strategies", "--formula", "A! y. E! z. R(z)", "--n", "3"]);
    assert_eq!(stdout(&o), "strategies: 27\n");
    let o = semfo(&[
        "--quiet",
        "strategies",
        "--formula",
        "E x. A y. R(x)",
        "--n",
        "2",
        "--classify",
    ]);
    assert_eq!(
        stdout(&o),
        "strategies: 2\nexistential: 0\nalmost existential: 2\nrelies on forall: 0\n"
    );
    let o = semfo(&["provenance", "--formula", "E x. A y. R(x)", "--n", "2"]);
    assert_eq!(stdout(&o), "x[R(1)]^2 + x[R(2)]^2\n");
}

#[test]
fn trivial_and_rewrite() {
    let o = semfo(&["trivial", "--formula", "A! x. E! y. true | R(x)", "--n", "1"]);
    assert_eq!(
        (o.status.code(), stdout(&o)),
        (Some(1), "trivial at n = 1: no\n".into())
    );
    let o = semfo(&["trivial", "--formula", "A! x. E! y. true | R(x)"]);
    assert_eq!(o.status.code(), Some(2));
    let o = semfo(&[
        "--quiet",
        "rewrite",
        "--mode",
        "strict",
        "--formula",
        "(A! x. R(x)) | (E! x. R(x))",
    ]);
    assert_eq!((o.status.code(), stdout(&o)), (Some(0), "E x. R(x)\n".into()));
    let o = semfo(&["rewrite", "--mode", "strict", "--formula", "A y. E z. R(z)"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn entail_refutes_with_a_witness() {
    let phi = scratch("phi.txt", "# premise\nE x. R(x)\n");
    let psi = scratch("psi.txt", "A x. R(x)\n");
    let o = semfo(&[
        "entail",
        "--phi",
        phi.to_str().unwrap(),
        "--psi",
        psi.to_str().unwrap(),
        "--sizes",
        "1..2",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("semiring: s3"));
    let o = semfo(&["entail", "--phi", psi.to_str().unwrap(), "--psi", phi.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn output_is_byte_stable() {
    let args = [
        "rewrite",
        "--mode",
        "lattice",
        "--formula",
        "A y. E z. R(z)",
        "--seed",
        "7",
    ];
    assert_eq!(semfo(&args).stdout, semfo(&args).stdout);
}
