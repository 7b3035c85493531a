use std::sync::Arc;

use crate::error::{precondition, Error, Result};
use crate::eval::{eval_set, vocabulary_of};
use crate::formula::Formula;
use crate::interpretation::{enumerate_interpretations, is_subinterpretation, Interpretation};
use crate::semiring::{find_weakly_separating_hom, FiniteLattice, SemiringHom, SemiringSpec, Value};

/// Outcome of a bounded S₃ entailment or equivalence check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum S3Verdict {
    /// No counterexample among `checked` model-defining S₃-interpretations.
    ConsistentWithEntailment {
        checked: usize,
    },
    Refuted(Box<Interpretation>),
}

impl S3Verdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, S3Verdict::Refuted(_))
    }
}

const S3_VALUES: [Value; 2] = [Value::Level(1), Value::Level(2)];

fn one_direction(phi: &[Formula], psi: &[Formula], sizes: &[usize], both: bool) -> Result<S3Verdict> {
    let vocab = vocabulary_of(&[phi, psi])?;
    let one = Value::Level(2);
    let mut checked = 0;
    for &n in sizes {
        for pi in enumerate_interpretations(&SemiringSpec::S3, &vocab, n, &S3_VALUES)? {
            checked += 1;
            let a = eval_set(&pi, phi)? == one;
            let b = eval_set(&pi, psi)? == one;
            if (a && !b) || (both && b && !a) {
                return Ok(S3Verdict::Refuted(Box::new(pi)));
            }
        }
    }
    Ok(S3Verdict::ConsistentWithEntailment { checked })
}

/// Checks `π⟦Φ⟧ = 1 ⇒ π⟦Ψ⟧ = 1` on every model-defining S₃-interpretation of
/// the given sizes. A refutation refutes `Φ ⊨ Ψ` in every lattice semiring
/// other than 𝔹; the absence of one is bounded evidence only.
pub fn s3_entailment(phi: &[Formula], psi: &[Formula], sizes: &[usize]) -> Result<S3Verdict> {
    one_direction(phi, psi, sizes, false)
}

/// Both directions of [`s3_entailment`].
pub fn s3_equivalence(phi: &[Formula], psi: &[Formula], sizes: &[usize]) -> Result<S3Verdict> {
    one_direction(phi, psi, sizes, true)
}

/// An S₃ counterexample to extension preservation obtained from one over a
/// finite lattice.
#[derive(Clone, Debug)]
pub struct S3Lift {
    pub starred: Arc<FiniteLattice>,
    pub hom: SemiringHom,
    pub a: Interpretation,
    pub b: Interpretation,
    pub value_a: Value,
    pub value_b: Value,
}

/// Lifts `πA ⊆ πB` with `πA⟦Φ⟧ ≰ πB⟦Φ⟧` over `L` to S₃: adjoin a new bottom
/// `0*`, move both interpretations to `L*` (sending `0` to `0*`), find a
/// weakly separating homomorphism `h: L* → S₃` and compose.
pub fn lift_counterexample_to_s3(
    l: &Arc<FiniteLattice>,
    a: &Interpretation,
    b: &Interpretation,
    phi: &[Formula],
) -> Result<S3Lift> {
    let spec = SemiringSpec::Lattice(l.clone());
    if a.semiring() != &spec || b.semiring() != &spec {
        return Err(precondition("both interpretations must be over the given lattice"));
    }
    if l.len() <= 2 {
        return Err(precondition(
            "the lattice is Boolean: no homomorphism to S₃ has kernel {0}",
        ));
    }
    if !is_subinterpretation(a, b) {
        return Err(precondition("πA is not a subinterpretation of πB"));
    }
    let (va, vb) = (eval_set(a, phi)?, eval_set(b, phi)?);
    if spec.leq(&va, &vb) {
        return Err(precondition("πA⟦Φ⟧ ≤ πB⟦Φ⟧, nothing to lift"));
    }
    let (lstar, _) = l.adjoin_bottom();
    let lstar = Arc::new(lstar);
    let star_spec = SemiringSpec::Lattice(lstar.clone());
    let bottom = l.bottom();
    let up = |v: &Value| match v {
        Value::Level(i) if *i == bottom => Value::Level(0),
        Value::Level(i) => Value::Level(i + 1),
        other => other.clone(),
    };
    let (sa, sb) = (a.map_values(star_spec.clone(), up), b.map_values(star_spec.clone(), up));
    let (s, t) = match (eval_set(&sa, phi)?, eval_set(&sb, phi)?) {
        (Value::Level(s), Value::Level(t)) => (s, t),
        _ => unreachable!("lattice values are levels"),
    };
    let hom = find_weakly_separating_hom(&lstar, s, t)?;
    let (ha, hb) = (sa.compose_hom(&hom)?, sb.compose_hom(&hom)?);
    let (value_a, value_b) = (eval_set(&ha, phi)?, eval_set(&hb, phi)?);
    if !SemiringSpec::S3.lt(&value_b, &value_a) {
        return Err(Error::Verification(format!(
            "lifted pair is not separated ({} vs {})",
            SemiringSpec::S3.show(&value_a),
            SemiringSpec::S3.show(&value_b)
        )));
    }
    Ok(S3Lift {
        starred: lstar,
        hom,
        a: ha,
        b: hb,
        value_a,
        value_b,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_sentence;
    use crate::preservation::{check_preservation, default_grid, Property, SearchSpace};

    #[test]
    fn tautology_is_not_s3_valid() {
        let phi = [parse_sentence("E x. x = x").unwrap()];
        let psi = [parse_sentence("E x. R(x) | ~R(x)").unwrap()];
        assert!(s3_entailment(&phi, &psi, &[1]).unwrap().is_refuted());
        assert!(!s3_entailment(&psi, &phi, &[1, 2]).unwrap().is_refuted());
        assert!(!s3_equivalence(&psi, &psi, &[1, 2]).unwrap().is_refuted());
    }

    #[test]
    fn chain_counterexample_lifts() {
        let l = Arc::new(FiniteLattice::chain(4));
        let spec = SemiringSpec::Lattice(l.clone());
        let f = parse_sentence("A x. R(x) | ~R(x)").unwrap();
        let v = check_preservation(
            &f,
            &spec,
            Property::Extensions,
            &SearchSpace::new(vec![1, 2], default_grid(&spec)),
        )
        .unwrap();
        let w = v.witness().unwrap();
        let lift = lift_counterexample_to_s3(&l, &w.a, &w.b, std::slice::from_ref(&f)).unwrap();
        assert!(is_subinterpretation(&lift.a, &lift.b));
        let again = check_preservation(
            &f,
            &SemiringSpec::S3,
            Property::Extensions,
            &SearchSpace::new(vec![1, 2], default_grid(&SemiringSpec::S3)),
        )
        .unwrap();
        assert!(again.is_refuted());
    }

    #[test]
    fn boolean_is_rejected() {
        let l = Arc::new(FiniteLattice::chain(2));
        let spec = SemiringSpec::Lattice(l.clone());
        let f = parse_sentence("A x. R(x)").unwrap();
        let v = check_preservation(
            &f,
            &spec,
            Property::Extensions,
            &SearchSpace::new(vec![1, 2], default_grid(&spec)),
        )
        .unwrap();
        let w = v.witness().unwrap();
        assert!(matches!(
            lift_counterexample_to_s3(&l, &w.a, &w.b, &[f]),
            Err(Error::Precondition(_))
        ));
    }
}
