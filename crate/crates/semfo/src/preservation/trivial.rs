use std::collections::{BTreeMap, BTreeSet};

use crate::error::{precondition, Error, Result};
use crate::eval::{eval_compiled, Compiled};
use crate::formula::{Formula, Term, Var};
use crate::interpretation::Interpretation;
use crate::provenance::{pi_n, PolyFlavor};
use crate::semiring::{SemiringSpec, Value};

/// `2^{|φ|+1} + qr(φ) + 2`, the top of the default probe range.
pub fn probe_threshold(phi: &Formula) -> u128 {
    let exp = (phi.size() + 1).min(120) as u32;
    (1u128 << exp) + phi.qr() as u128 + 2
}

fn instantiation(phi: &Formula, n: usize) -> Result<BTreeMap<Var, u32>> {
    if !phi.is_foneq() {
        return Err(Error::Flavor("triviality is defined for FO≠ formulas".into()));
    }
    let free = phi.free_vars();
    if n < free.len().max(1) {
        return Err(precondition(format!(
            "n = {n} is too small to instantiate {} free variables",
            free.len()
        )));
    }
    Ok(free.into_iter().zip(0u32..).collect())
}

/// Whether `φ(x̄)` is trivial for universe size `n`: `π_n⟦φ(ā)⟧ = 1` in the
/// absorptive polynomial semiring for one tuple `ā` of distinct elements.
pub fn is_trivial_at(phi: &Formula, n: usize) -> Result<bool> {
    let a = instantiation(phi, n)?;
    let c = Compiled::new(phi)?;
    let pi = pi_n(&phi.vocabulary()?, n, PolyFlavor::Absorptive)?;
    Ok(matches!(eval_compiled(&pi, &c, &a)?, Value::SPoly(p) if p.is_one()))
}

/// Same verdict as [`is_trivial_at`], computed through the S₃ image of `π_n`
/// sending every variable to `ε`: a polynomial is `1` exactly when it contains
/// the empty monomial, which is exactly when its image is `1`.
pub fn trivial_by_eps(phi: &Formula, n: usize) -> Result<bool> {
    let a = instantiation(phi, n)?;
    let c = Compiled::new(phi)?;
    let mut pi = Interpretation::numbered(SemiringSpec::S3, n, &phi.vocabulary()?)?;
    for (rel, args) in pi.atoms() {
        pi.set_pair(&rel, &args, SemiringSpec::eps(), SemiringSpec::eps())?;
    }
    Ok(eval_compiled(&pi, &c, &a)? == Value::Level(2))
}

/// Element ids of the all-`ε` evaluation: real elements `< n`, fresh ones above.
struct EpsEval<'a> {
    n: u64,
    consts: &'a BTreeSet<u64>,
}

impl EpsEval<'_> {
    fn term(t: &Term, env: &BTreeMap<Var, u64>) -> u64 {
        match t {
            Term::Var(v) => env[v],
            Term::Const(c) => u64::from(*c),
        }
    }

    /// `0`, `ε`, `1` as `0`, `1`, `2`.
    fn eval(&self, f: &Formula, env: &BTreeMap<Var, u64>) -> u8 {
        match f {
            Formula::True => 2,
            Formula::False => 0,
            Formula::Atom { .. } => 1,
            Formula::Eq(a, b) => 2 * u8::from(Self::term(a, env) == Self::term(b, env)),
            Formula::Neq(a, b) => 2 * u8::from(Self::term(a, env) != Self::term(b, env)),
            Formula::And(a, b) => self.eval(a, env).min(self.eval(b, env)),
            Formula::Or(a, b) => self.eval(a, env).max(self.eval(b, env)),
            Formula::Exists(v, b) => self.quantify(v, &[], b, env, false),
            Formula::Forall(v, b) => self.quantify(v, &[], b, env, true),
            Formula::ExistsD(v, avoid, b) => self.quantify(v, avoid, b, env, false),
            Formula::ForallD(v, avoid, b) => self.quantify(v, avoid, b, env, true),
        }
    }

    /// One representative per equality type: every element already in play
    /// and, if one is left, a single fresh element.
    fn quantify(&self, v: &Var, avoid: &[Var], body: &Formula, env: &BTreeMap<Var, u64>, universal: bool) -> u8 {
        let banned: BTreeSet<u64> = avoid.iter().map(|a| env[a]).collect();
        let in_play: BTreeSet<u64> = env.values().chain(self.consts).copied().collect();
        let fresh = (in_play.len() as u64) < self.n;
        let mut choices: Vec<u64> = in_play.iter().copied().filter(|e| !banned.contains(e)).collect();
        if fresh {
            choices.push(self.n + in_play.len() as u64);
        }
        let values = choices.into_iter().map(|e| {
            let mut inner = env.clone();
            inner.insert(v.clone(), e);
            self.eval(body, &inner)
        });
        if universal {
            values.min().unwrap_or(2)
        } else {
            values.max().unwrap_or(0)
        }
    }
}

/// [`trivial_by_eps`] without building the interpretation: the all-`ε`
/// interpretation is invariant under permutations of elements outside the
/// instantiation and the constants, so each quantifier needs only one
/// representative per equality type. Exact for every `n`.
pub fn trivial_symbolic(phi: &Formula, n: usize) -> Result<bool> {
    let a = instantiation(phi, n)?;
    let consts: BTreeSet<u64> = phi.constants().into_iter().map(u64::from).collect();
    if consts.iter().any(|&c| c >= n as u64) {
        return Err(precondition(format!("a constant lies outside a universe of size {n}")));
    }
    let env = a.into_iter().map(|(v, e)| (v, u64::from(e))).collect();
    Ok(EpsEval {
        n: n as u64,
        consts: &consts,
    }
    .eval(phi, &env)
        == 2)
}

/// Size from which [`trivial_symbolic`] no longer depends on `n`.
fn symbolic_plateau(phi: &Formula) -> usize {
    let consts = phi.constants();
    let top = consts.iter().next_back().map_or(0, |&c| c as usize + 1);
    phi.free_vars().len() + consts.len() + phi.qr() + 1 + top
}

/// Stabilized triviality verdict over a probe range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EventualVerdict {
    /// Trivial for every probed size from `from` on.
    Trivial {
        from: usize,
        probed: (usize, usize),
    },
    NonTrivial {
        from: usize,
        probed: (usize, usize),
    },
    /// The last probes disagree; `verdicts` lists `(n, trivial)` for the tail.
    Unstable {
        verdicts: Vec<(usize, bool)>,
    },
}

impl EventualVerdict {
    pub fn is_trivial(&self) -> Option<bool> {
        match self {
            EventualVerdict::Trivial { .. } => Some(true),
            EventualVerdict::NonTrivial { .. } => Some(false),
            EventualVerdict::Unstable { .. } => None,
        }
    }

    /// First size of the stable tail.
    pub fn stable_from(&self) -> Option<usize> {
        match self {
            EventualVerdict::Trivial { from, .. } | EventualVerdict::NonTrivial { from, .. } => Some(*from),
            EventualVerdict::Unstable { .. } => None,
        }
    }
}

/// Probes triviality for every `n` in `range` (default: from `|x̄|+1` up to
/// [`probe_threshold`]) and reports the verdict at the top of the range,
/// together with the size from which it no longer changes. The range must
/// reach the threshold. Sizes past the point where the verdict provably stops
/// depending on `n` share one evaluation.
pub fn is_eventually_trivial(phi: &Formula, range: Option<(usize, usize)>) -> Result<EventualVerdict> {
    let threshold = probe_threshold(phi);
    let default_hi = usize::try_from(threshold).unwrap_or(usize::MAX);
    let lo_default = phi.free_vars().len() + 1;
    let (lo, hi) = range.unwrap_or((lo_default, default_hi));
    if (hi as u128) < threshold {
        return Err(precondition(format!(
            "probe range must reach 2^(|phi|+1)+qr+2 = {threshold}"
        )));
    }
    let lo = lo
        .max(phi.free_vars().len().max(1))
        .max(phi.constants().iter().next_back().map_or(0, |&c| c as usize + 1));
    if lo > hi {
        return Err(precondition("empty probe range"));
    }
    let plateau = symbolic_plateau(phi).max(lo);
    let at = |n: usize| trivial_symbolic(phi, n.min(plateau));
    let mut early: Vec<(usize, bool)> = Vec::new();
    for n in lo..=hi.min(plateau) {
        early.push((n, at(n)?));
    }
    let tail: Vec<(usize, bool)> = (hi.saturating_sub(2).max(lo)..=hi)
        .map(|n| Ok((n, at(n)?)))
        .collect::<Result<_>>()?;
    let top = tail.last().expect("non-empty range").1;
    if tail.iter().any(|&(_, t)| t != top) {
        return Ok(EventualVerdict::Unstable { verdicts: tail });
    }
    let from = early
        .iter()
        .rev()
        .take_while(|&&(_, t)| t == top)
        .last()
        .map_or(hi, |&(n, _)| n);
    Ok(if top {
        EventualVerdict::Trivial { from, probed: (lo, hi) }
    } else {
        EventualVerdict::NonTrivial { from, probed: (lo, hi) }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::eval_with;
    use crate::formula::parse;
    use crate::interpretation::enumerate_interpretations;

    fn brute(phi: &Formula, n: usize) -> bool {
        let vocab = phi.vocabulary().unwrap();
        let a = instantiation(phi, n).unwrap();
        enumerate_interpretations(&SemiringSpec::S3, &vocab, n, &[Value::Level(1), Value::Level(2)])
            .unwrap()
            .all(|pi| eval_with(&pi, phi, &a).unwrap() == Value::Level(2))
    }

    #[test]
    fn trivial_only_from_two() {
        let f = parse("A! x. E! y. true | R(x)").unwrap();
        assert!(!is_trivial_at(&f, 1).unwrap());
        for n in 2..=4 {
            assert!(is_trivial_at(&f, n).unwrap());
        }
        assert!(matches!(
            is_eventually_trivial(&f, None).unwrap(),
            EventualVerdict::Trivial { from: 2, .. }
        ));
    }

    #[test]
    fn never_trivial() {
        let f = parse("E! x. R(x) | ~R(x)").unwrap();
        for n in 1..=4 {
            assert!(!is_trivial_at(&f, n).unwrap());
        }
        assert_eq!(is_eventually_trivial(&f, None).unwrap().is_trivial(), Some(false));
    }

    #[test]
    fn agrees_with_brute_force_and_eps() {
        for src in [
            "A! y. R(y) | ~R(y)",
            "A! y. R(x) | true",
            "A! y. E! z. true",
            "A! y. E! z. R(z) | ~R(z)",
            "A! y. R(x) | ~R(x)",
        ] {
            let f = parse(src).unwrap();
            for n in f.free_vars().len().max(1)..=3 {
                let t = is_trivial_at(&f, n).unwrap();
                assert_eq!(t, brute(&f, n), "{src} at {n}");
                assert_eq!(t, trivial_by_eps(&f, n).unwrap(), "{src} at {n}");
                assert_eq!(t, trivial_symbolic(&f, n).unwrap(), "{src} at {n}");
            }
        }
    }

    #[test]
    fn too_small() {
        let f = parse("A! y. R(x, y) | R(z, y)").unwrap();
        assert!(matches!(is_trivial_at(&f, 1), Err(Error::Precondition(_))));
    }

    #[test]
    fn symbolic_matches_concrete_up_to_six() {
        for src in [
            "A! y. E! z. R(z) & ~R(y) | true",
            "A! y. E! z [x]. true",
            "A! y. A! z. E! w. true",
            "A! y. E! z [x]. (R(y) | true) & E! w [x, y, z]. true",
            "A! y. R(#2) | ~R(y)",
            "A! y. E! z [x]. R(#1) & R(z) | true",
        ] {
            let f = parse(src).unwrap();
            for n in 3..=6 {
                assert_eq!(
                    trivial_symbolic(&f, n).unwrap(),
                    trivial_by_eps(&f, n).unwrap(),
                    "{src} at {n}"
                );
            }
        }
    }

    #[test]
    fn large_threshold_is_probed() {
        let f = parse("A! y. E! z. (R(z) | true) & (Q(y) | true) & (R(y) | ~R(z) | true)").unwrap();
        assert!(probe_threshold(&f) > 1 << 12);
        let v = is_eventually_trivial(&f, None).unwrap();
        assert_eq!(v.is_trivial(), Some(true));
    }
}
