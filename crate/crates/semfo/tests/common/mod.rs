//! Test-only oracles and generators shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use semfo::formula::{exists, exists_d, forall, forall_d, parse_sentence, Formula, Term, Var};
use semfo::interpretation::{enumerate_interpretations, Interpretation};
use semfo::semiring::{SemiringSpec, Value};

fn resolve(t: &Term, env: &BTreeMap<Var, u32>) -> u32 {
    match t {
        Term::Var(v) => env[v],
        Term::Const(c) => *c,
    }
}

/// Direct recursive evaluation over the AST, independent of the compiled evaluator.
pub fn naive_eval(pi: &Interpretation, f: &Formula, env: &BTreeMap<Var, u32>) -> Value {
    let s = pi.semiring();
    let truth = |b: bool| if b { s.one() } else { s.zero() };
    let quant = |v: &Var, avoid: Option<&[Var]>, body: &Formula, universal: bool| {
        let banned: BTreeSet<u32> = avoid.unwrap_or(&[]).iter().map(|a| env[a]).collect();
        let mut acc = if universal { s.one() } else { s.zero() };
        for e in 0..pi.size() as u32 {
            if banned.contains(&e) {
                continue;
            }
            let mut inner = env.clone();
            inner.insert(v.clone(), e);
            let val = naive_eval(pi, body, &inner);
            acc = if universal {
                s.mul(&acc, &val)
            } else {
                s.add(&acc, &val)
            };
        }
        acc
    };
    match f {
        Formula::True => s.one(),
        Formula::False => s.zero(),
        Formula::Atom { rel, args, neg } => {
            let a: Vec<u32> = args.iter().map(|t| resolve(t, env)).collect();
            pi.lit(rel, &a, *neg).unwrap().clone()
        }
        Formula::Eq(a, b) => truth(resolve(a, env) == resolve(b, env)),
        Formula::Neq(a, b) => truth(resolve(a, env) != resolve(b, env)),
        Formula::And(a, b) => s.mul(&naive_eval(pi, a, env), &naive_eval(pi, b, env)),
        Formula::Or(a, b) => s.add(&naive_eval(pi, a, env), &naive_eval(pi, b, env)),
        Formula::Exists(v, b) => quant(v, None, b, false),
        Formula::Forall(v, b) => quant(v, None, b, true),
        Formula::ExistsD(v, avoid, b) => quant(v, Some(avoid), b, false),
        Formula::ForallD(v, avoid, b) => quant(v, Some(avoid), b, true),
    }
}

pub fn naive(pi: &Interpretation, f: &Formula) -> Value {
    naive_eval(pi, f, &BTreeMap::new())
}

/// Brute-force triviality: `φ(ā)` evaluates to `1` on every model-defining
/// S₃-interpretation of size `n`, with `ā` the first distinct elements.
pub fn brute_trivial(phi: &Formula, n: usize) -> bool {
    let vocab = phi.vocabulary().unwrap();
    let env: BTreeMap<Var, u32> = phi.free_vars().into_iter().zip(0u32..).collect();
    enumerate_interpretations(&SemiringSpec::S3, &vocab, n, &[Value::Level(1), Value::Level(2)])
        .unwrap()
        .all(|pi| naive_eval(&pi, phi, &env) == Value::Level(2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fragment {
    Any,
    Sigma1,
    Pi1,
    Sigma1Positive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flavor {
    Fo,
    FoNeq,
}

/// Random formula generator over `R/1` and either `E/2` (`binary`) or `Q/1`.
pub struct Gen {
    pub flavor: Flavor,
    pub fragment: Fragment,
    pub binary: bool,
    pub max_qr: usize,
}

impl Gen {
    pub fn sentence<R: Rng>(&self, rng: &mut R) -> Formula {
        loop {
            let f = self.node(rng, &mut vec![], 0, 3);
            if f.is_sentence() && f.qr() >= 1 {
                return f;
            }
        }
    }

    fn literal<R: Rng>(&self, rng: &mut R, scope: &[Var]) -> Formula {
        let pick = |rng: &mut R| Term::Var(scope.choose(rng).unwrap().clone());
        let neg = self.fragment != Fragment::Sigma1Positive && rng.gen_bool(0.3);
        let (rel, args) = if self.binary && rng.gen_bool(0.4) {
            ("E", vec![pick(rng), pick(rng)])
        } else if !self.binary && rng.gen_bool(0.3) {
            ("Q", vec![pick(rng)])
        } else {
            ("R", vec![pick(rng)])
        };
        Formula::Atom {
            rel: rel.into(),
            args,
            neg,
        }
    }

    fn node<R: Rng>(&self, rng: &mut R, scope: &mut Vec<Var>, qr: usize, budget: usize) -> Formula {
        let can_quantify = qr < self.max_qr;
        let must_quantify = scope.is_empty();
        let roll = rng.gen_range(0..10);
        if must_quantify || (can_quantify && budget > 0 && roll < 4) {
            if !can_quantify {
                return if rng.gen_bool(0.5) {
                    Formula::True
                } else {
                    Formula::False
                };
            }
            let v = format!("v{}", scope.len());
            scope.push(v.clone());
            let body = self.node(rng, scope, qr + 1, budget.saturating_sub(1));
            scope.pop();
            let universal = match self.fragment {
                Fragment::Any => rng.gen_bool(0.5),
                Fragment::Sigma1 | Fragment::Sigma1Positive => false,
                Fragment::Pi1 => true,
            };
            return match (self.flavor, universal) {
                (Flavor::Fo, false) => exists(&v, body),
                (Flavor::Fo, true) => forall(&v, body),
                (Flavor::FoNeq, false) => exists_d(&v, body),
                (Flavor::FoNeq, true) => forall_d(&v, body),
            };
        }
        if budget > 0 && roll < 7 {
            let a = self.node(rng, scope, qr, budget - 1);
            let b = self.node(rng, scope, qr, budget - 1);
            return if rng.gen_bool(0.5) {
                Formula::And(Box::new(a), Box::new(b))
            } else {
                Formula::Or(Box::new(a), Box::new(b))
            };
        }
        if roll == 9 && self.fragment != Fragment::Pi1 {
            return Formula::True;
        }
        self.literal(rng, scope)
    }
}

/// Hand-written FO≠ sentences over `R/1` and `E/2` of quantifier rank at most 2.
pub const HAND_CORPUS: &[&str] = &[
    "E! x. R(x)",
    "A! x. R(x)",
    "E! x. ~R(x)",
    "A! x. R(x) | ~R(x)",
    "E! x. R(x) | ~R(x)",
    "E! x. A! y. R(x)",
    "E! x. A! y. R(y)",
    "A! x. E! y. R(y)",
    "A! y. E! z. R(z)",
    "E! x. E! y. R(x) & R(y)",
    "E! x. E! y. E(x, y)",
    "A! x. A! y. E(x, y)",
    "A! x. E! y. E(x, y)",
    "E! x. A! y. E(x, y) | ~R(y)",
    "E! x. R(x) & A! y. E(x, y)",
    "(A! x. R(x)) | (E! x. R(x))",
    "E! x. R(x) | A! y. R(y)",
    "A! x. R(x) | true",
    "E! x. A! y. true | R(x)",
    "A! x. E! y. true | R(x)",
    "E! x. R(x) & ~R(x)",
    "A! x. ~E(x, x) | R(x)",
    "E! x. E(x, x) & A! y. ~E(y, y)",
    "(E! x. R(x)) & (E! x. ~R(x))",
    "A! x. A! y. R(x) | R(y)",
    "A! x. A! y. R(x) | ~R(y)",
    "E! x. E! y. E(x, y) & E(y, x)",
    "A! x. E! y. E(x, y) & R(y)",
    "E! x. A! y. E(x, y) & R(x)",
    "A! x. (E! y. E(x, y)) | R(x)",
];

/// At least `count` distinct FO≠ sentences of quantifier rank at most 2:
/// [`HAND_CORPUS`] topped up from a seeded generator.
pub fn corpus(count: usize) -> Vec<Formula> {
    use rand::SeedableRng;
    let mut out: Vec<Formula> = HAND_CORPUS.iter().map(|s| parse_sentence(s).unwrap()).collect();
    let gen = Gen {
        flavor: Flavor::FoNeq,
        fragment: Fragment::Any,
        binary: true,
        max_qr: 2,
    };
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
    while out.len() < count {
        let f = gen.sentence(&mut rng);
        if f.size() <= 12 && !out.contains(&f) {
            out.push(f);
        }
    }
    out
}
