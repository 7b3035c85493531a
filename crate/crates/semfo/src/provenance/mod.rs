//! Provenance polynomials and the canonical polynomial interpretation.

pub mod poly;

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

pub use poly::{absorbs, Monomial, NatPoly, PVar, SPoly};

use crate::error::{invalid, precondition, Error, Result};
use crate::formula::Vocabulary;
use crate::interpretation::Interpretation;
use crate::semiring::{SemiringSpec, Value};

/// Which polynomial semiring `π_n` maps into.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyFlavor {
    /// `S(X⁺, X⁻)`
    Absorptive,
    /// `ℕ[X]`
    Nat,
}

impl PolyFlavor {
    pub fn spec(self) -> SemiringSpec {
        match self {
            PolyFlavor::Absorptive => SemiringSpec::SPoly,
            PolyFlavor::Nat => SemiringSpec::NatPoly,
        }
    }
}

/// `π_n`: universe `1..=n`, each literal `L` mapped to its own variable `x_L`.
pub fn pi_n(vocab: &Vocabulary, n: usize, flavor: PolyFlavor) -> Result<Interpretation> {
    if n < 1 {
        return Err(invalid("pi_n needs n >= 1"));
    }
    let mut pi = Interpretation::numbered(flavor.spec(), n, vocab)?;
    for (rel, args) in pi.atoms() {
        let var = |neg| PVar::lit(&rel, args.clone(), neg);
        let (pos, neg) = match flavor {
            PolyFlavor::Absorptive => (
                Value::SPoly(SPoly::var(var(false))),
                Value::SPoly(SPoly::var(var(true))),
            ),
            PolyFlavor::Nat => (
                Value::NatPoly(NatPoly::var(var(false))),
                Value::NatPoly(NatPoly::var(var(true))),
            ),
        };
        pi.set_pair(&rel, &args, pos, neg)?;
    }
    Ok(pi)
}

/// A variable assignment `X → S`.
pub type Assignment = BTreeMap<PVar, Value>;

/// Checks `f(x_α) · f(x_¬α) = 0` for every atom whose two variables are assigned.
pub fn check_consistent(target: &SemiringSpec, f: &Assignment) -> Result<()> {
    for (v, a) in f {
        target.check(a)?;
        if let Some(d) = v.dual() {
            if let Some(b) = f.get(&d) {
                if !target.is_zero(&target.mul(a, b)) {
                    return Err(precondition(format!("inconsistent assignment on {v} and {d}")));
                }
            }
        }
    }
    Ok(())
}

fn scalar(target: &SemiringSpec, c: &BigUint, v: &Value) -> Value {
    let mut acc = target.zero();
    let mut base = v.clone();
    let mut k = c.clone();
    while !k.is_zero() {
        if (&k & BigUint::one()) == BigUint::one() {
            acc = target.add(&acc, &base);
        }
        base = target.add(&base, &base);
        k >>= 1;
    }
    acc
}

fn power(target: &SemiringSpec, v: &Value, e: u32) -> Value {
    let mut acc = target.one();
    let mut base = v.clone();
    let mut k = e;
    while k > 0 {
        if k & 1 == 1 {
            acc = target.mul(&acc, &base);
        }
        base = target.mul(&base, &base);
        k >>= 1;
    }
    acc
}

fn monomial_value(target: &SemiringSpec, m: &Monomial, f: &Assignment) -> Result<Value> {
    m.pairs().iter().try_fold(target.one(), |acc, (v, e)| {
        let x = f
            .get(v)
            .ok_or_else(|| Error::NotFound(format!("no value assigned to {v}")))?;
        Ok(target.mul(&acc, &power(target, x, *e)))
    })
}

/// The homomorphic image of a polynomial under the assignment `f`. For
/// absorptive polynomials the target must be absorptive.
pub fn specialize(p: &Value, target: &SemiringSpec, f: &Assignment) -> Result<Value> {
    check_consistent(target, f)?;
    match p {
        Value::NatPoly(q) => q.terms().try_fold(target.zero(), |acc, (m, c)| {
            Ok(target.add(&acc, &scalar(target, c, &monomial_value(target, m, f)?)))
        }),
        Value::SPoly(q) => {
            if !target.flags().absorptive {
                return Err(precondition(format!("{target} is not absorptive")));
            }
            q.monomials().try_fold(target.zero(), |acc, m| {
                Ok(target.add(&acc, &monomial_value(target, m, f)?))
            })
        }
        _ => Err(invalid("specialize expects a polynomial")),
    }
}

/// The assignment `x_L ↦ π(L)` for every literal variable in the support.
pub fn assignment_from(pi: &Interpretation, vars: impl IntoIterator<Item = PVar>) -> Result<Assignment> {
    let mut f = Assignment::new();
    for v in vars {
        if let PVar::Lit { rel, args, neg } = &v {
            let val = pi.lit(rel, args, *neg)?.clone();
            f.insert(v, val);
        }
    }
    Ok(f)
}

/// All literal variables over `[n]` for a vocabulary.
pub fn literal_vars(vocab: &Vocabulary, n: usize) -> Result<Vec<PVar>> {
    let pi = Interpretation::numbered(SemiringSpec::Boolean, n, vocab)?;
    Ok(pi
        .atoms()
        .into_iter()
        .flat_map(|(rel, args)| [PVar::lit(&rel, args.clone(), false), PVar::lit(&rel, args, true)])
        .collect())
}

/// Identifies every positive literal variable of `rel` with the single variable `name`.
pub fn identify_relation(p: &NatPoly, rel: &str, name: &str) -> NatPoly {
    p.rename(&|v| match v {
        PVar::Lit { rel: r, neg: false, .. } if &**r == rel => PVar::named(name),
        _ => v.clone(),
    })
}

/// Total degree of a polynomial value.
pub fn degree(p: &Value) -> Result<u64> {
    match p {
        Value::NatPoly(q) => Ok(q.degree()),
        Value::SPoly(q) => Ok(q.degree()),
        _ => Err(invalid("degree expects a polynomial")),
    }
}
