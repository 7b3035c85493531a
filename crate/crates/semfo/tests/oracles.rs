//! Hand-computed values checked against both the evaluator and the naive oracle.

mod common;

use common::{brute_trivial, naive};
use semfo::eval::eval;
use semfo::formula::{parse, parse_sentence, Vocabulary};
use semfo::interpretation::Interpretation;
use semfo::preservation::{is_trivial_at, s3_entailment};
use semfo::semiring::{nat_value, rat_value, SemiringSpec, Value};
use semfo::strategy::{build_game_tree, optimal};

fn unary(spec: SemiringSpec, values: &[Value]) -> Interpretation {
    let vocab = Vocabulary::from_pairs([("R", 1)]).unwrap();
    let mut pi = Interpretation::numbered(spec, values.len(), &vocab).unwrap();
    for (i, v) in values.iter().enumerate() {
        pi.set_atom("R", &[i as u32], v.clone()).unwrap();
    }
    pi
}

fn check(pi: &Interpretation, src: &str, want: Value) {
    let f = parse_sentence(src).unwrap();
    assert_eq!(eval(pi, &f).unwrap(), want, "{src}");
    assert_eq!(naive(pi, &f), want, "{src} (naive)");
}

#[test]
fn natural_numbers_count() {
    let pi = unary(SemiringSpec::Nat, &[nat_value(2), nat_value(3)]);
    check(&pi, "E x. R(x)", nat_value(5));
    check(&pi, "A x. R(x)", nat_value(6));
    check(&pi, "E x. E y. R(x) & R(y)", nat_value(25));
    check(&pi, "E! x. E! y. R(x) & R(y)", nat_value(12));
    check(&pi, "A x. R(x) | ~R(x)", nat_value(6));
    check(&pi, "E x. true", nat_value(2));
}

#[test]
fn tropical_costs() {
    let pi = unary(SemiringSpec::Tropical, &[rat_value(2, 1), rat_value(3, 1)]);
    check(&pi, "E x. R(x)", rat_value(2, 1));
    check(&pi, "A x. R(x)", rat_value(5, 1));
    check(&pi, "E x. ~R(x)", Value::Inf);
    check(&pi, "E x. A y. R(x)", rat_value(4, 1));
}

#[test]
fn viterbi_and_lukasiewicz() {
    let half = rat_value(1, 2);
    let pi = unary(SemiringSpec::Viterbi, &[half.clone(), half.clone()]);
    check(&pi, "E x. A y. R(x)", rat_value(1, 4));
    check(&pi, "(A x. R(x)) | (E x. R(x))", half.clone());
    let pi = unary(SemiringSpec::Lukasiewicz, &[rat_value(3, 4), rat_value(3, 4)]);
    check(&pi, "A x. R(x)", rat_value(1, 2));
    check(&pi, "A x. A y. R(x) & R(y)", rat_value(0, 1));
}

#[test]
fn doubt_reverses_the_order() {
    let pi = unary(SemiringSpec::Doubt, &[rat_value(1, 4), rat_value(1, 2)]);
    check(&pi, "E x. R(x)", rat_value(1, 4));
    check(&pi, "A x. R(x)", rat_value(3, 4));
    check(&pi, "E x. A y. R(x)", rat_value(1, 2));
    let s = SemiringSpec::Doubt;
    assert!(s.leq(&rat_value(1, 2), &rat_value(1, 4)));
}

#[test]
fn s3_and_min_max() {
    let pi = unary(SemiringSpec::S3, &[Value::Level(1), Value::Level(2)]);
    check(&pi, "E x. R(x)", Value::Level(2));
    check(&pi, "A x. R(x)", Value::Level(1));
    check(&pi, "A x. R(x) | ~R(x)", Value::Level(1));
}

#[test]
fn strategy_counts() {
    let f = parse_sentence("A! y. E! z. R(z)").unwrap();
    assert_eq!(build_game_tree(&f, 3).unwrap().count_strategies(), 27);
    let f = parse_sentence("A! y. E! z [y]. R(z)").unwrap();
    assert_eq!(build_game_tree(&f, 3).unwrap().count_strategies(), 8);
    let g = parse_sentence("E x. A y. R(x)").unwrap();
    assert_eq!(build_game_tree(&g, 2).unwrap().count_strategies(), 2);
    let pi = unary(SemiringSpec::Viterbi, &[rat_value(1, 2), rat_value(1, 2)]);
    let opt = optimal(&pi, &g).unwrap();
    assert_eq!(opt.value, rat_value(1, 4));
    assert_eq!(opt.count, 2);
}

#[test]
fn triviality_examples() {
    let t = parse("A! x. E! y. true | R(x)").unwrap();
    let never = parse("E! x. R(x) | ~R(x)").unwrap();
    let expected = [(1, false, false), (2, true, false), (3, true, false)];
    for (n, a, b) in expected {
        assert_eq!(is_trivial_at(&t, n).unwrap(), a);
        assert_eq!(brute_trivial(&t, n), a);
        assert_eq!(is_trivial_at(&never, n).unwrap(), b);
        assert_eq!(brute_trivial(&never, n), b);
    }
}

#[test]
fn s3_entailment_examples() {
    let phi = [parse_sentence("E x. R(x)").unwrap()];
    let psi = [parse_sentence("A x. R(x)").unwrap()];
    assert!(s3_entailment(&phi, &psi, &[2]).unwrap().is_refuted());
    assert!(!s3_entailment(&psi, &phi, &[1, 2, 3]).unwrap().is_refuted());
}
