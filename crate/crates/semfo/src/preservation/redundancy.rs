use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::One;

use super::Witness;
use crate::error::{invalid, precondition, Error, Result};
use crate::eval::{eval, Node, QKind};
use crate::formula::Formula;
use crate::interpretation::Interpretation;
use crate::semiring::{SemiringSpec, Value};
use crate::strategy::{
    a_lit, best_almost_existential, best_existential, build_game_tree, has_default_avoid, translate_strategy, GameTree,
    SNode, Strategy, Translation,
};

fn optimal_in_class(pi: &Interpretation, psi: &Formula, best: Option<(Value, Strategy)>) -> Result<Option<Strategy>> {
    let v = eval(pi, psi)?;
    Ok(best.and_then(|(b, t)| (b == v).then_some(t)))
}

/// An existential strategy optimal for `π` and `ψ`, if one exists. `None`
/// means `π` is a counterexample to redundancy of `∀` in `ψ`.
pub fn has_existential_optimal(pi: &Interpretation, psi: &Formula) -> Result<Option<Strategy>> {
    optimal_in_class(pi, psi, best_existential(pi, psi)?)
}

/// An almost existential strategy optimal for `π` and `ψ`, if one exists.
pub fn has_almost_existential_optimal(pi: &Interpretation, psi: &Formula) -> Result<Option<Strategy>> {
    optimal_in_class(pi, psi, best_almost_existential(pi, psi)?)
}

fn real(v: &Value) -> Option<BigRational> {
    match v {
        Value::Rat(r) => Some(r.clone()),
        _ => None,
    }
}

fn zero_real(spec: &SemiringSpec) -> Option<BigRational> {
    real(&spec.zero())
}

/// Replaces every literal value `1` by a value `s` close enough to `1` that
/// every strict inequality between strategy values under `π` stays strict.
/// `δ` is the least positive gap between strategy values (the value `0` of
/// the dummy strategy included) and `e` the largest number of literal leaves.
pub fn eliminate_one_valuations(pi: &Interpretation, psi: &Formula, guard: u128) -> Result<Interpretation> {
    let spec = pi.semiring().clone();
    if !matches!(
        spec,
        SemiringSpec::Viterbi | SemiringSpec::Tropical | SemiringSpec::Lukasiewicz | SemiringSpec::Doubt
    ) {
        return Err(precondition(format!(
            "{spec} is not one of viterbi, tropical, lukasiewicz, doubt"
        )));
    }
    let val = eval(pi, psi)?;
    if spec.is_zero(&val) {
        return Err(precondition("the formula evaluates to 0"));
    }
    if !pi.image().iter().any(|v| spec.is_one(v)) {
        return Ok(pi.clone());
    }
    let strategies = build_game_tree(psi, pi.size())?.enumerate(guard)?;
    let e = strategies
        .iter()
        .map(Strategy::literal_leaves)
        .max()
        .unwrap_or(0)
        .max(1);
    let mut reals: Vec<BigRational> = strategies
        .iter()
        .map(|t| Ok(real(&t.eval(pi)?)))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    reals.extend(zero_real(&spec));
    reals.sort();
    reals.dedup();
    let delta = reals
        .windows(2)
        .map(|w| &w[1] - &w[0])
        .min()
        .unwrap_or_else(BigRational::one);
    let two_e = BigRational::from_integer((2 * e).into());
    let s = match spec {
        SemiringSpec::Viterbi => {
            let vr = real(&val).expect("viterbi values are rational");
            let bound = BigRational::one() - &delta / &vr;
            let mut k: i64 = 2;
            loop {
                let s = BigRational::one() - BigRational::new(1.into(), k.into());
                if num_traits::pow(s.clone(), e) > bound {
                    break s;
                }
                k *= 2;
            }
        }
        SemiringSpec::Lukasiewicz => BigRational::one() - &delta / &two_e,
        _ => &delta / &two_e,
    };
    let sv = Value::Rat(s);
    let out = pi.map_values(spec.clone(), |v| if spec.is_one(v) { sv.clone() } else { v.clone() });
    if spec.is_zero(&eval(&out, psi)?) || out.image().iter().any(|v| spec.is_one(v)) {
        return Err(Error::Verification("one-elimination lost the non-zero value".into()));
    }
    Ok(out)
}

/// `0 < v < π⟦ψ⟧` at half the natural-order distance to `0`.
pub fn padding_value(spec: &SemiringSpec, val: &Value) -> Result<Value> {
    if spec.is_zero(val) {
        return Err(precondition("padding needs a non-zero value"));
    }
    let r = real(val).ok_or_else(|| invalid(format!("{spec} has no rational padding value")))?;
    let two = BigRational::from_integer(2.into());
    Ok(Value::Rat(match spec {
        SemiringSpec::Viterbi | SemiringSpec::Lukasiewicz | SemiringSpec::Fuzzy => r / two,
        SemiringSpec::Doubt => (r + BigRational::one()) / two,
        SemiringSpec::Tropical => r * two + BigRational::one(),
        _ => return Err(invalid(format!("{spec} has no rational padding value"))),
    }))
}

/// Extends `π` by `count` elements whose atoms all take the padding value.
pub fn pad_for_redundancy(pi: &Interpretation, psi: &Formula, count: usize) -> Result<Interpretation> {
    let v = padding_value(pi.semiring(), &eval(pi, psi)?)?;
    pi.pad(count, &v)
}

/// Renames element `i` to `perm[i]`; element names travel with their elements.
pub fn relabel(pi: &Interpretation, perm: &[u32]) -> Result<Interpretation> {
    let n = pi.size();
    let image: BTreeSet<u32> = perm.iter().copied().collect();
    if perm.len() != n || image.len() != n || image.iter().any(|&e| e as usize >= n) {
        return Err(invalid("relabel needs a permutation of the universe"));
    }
    let mut names = vec![String::new(); n];
    for (i, &j) in perm.iter().enumerate() {
        names[j as usize] = pi.universe()[i].clone();
    }
    let mut out = Interpretation::new(pi.semiring().clone(), names, &pi.vocabulary())?;
    for (rel, args) in pi.atoms() {
        let moved: Vec<u32> = args.iter().map(|&a| perm[a as usize]).collect();
        out.set_pair(
            &rel,
            &moved,
            pi.lit(&rel, &args, false)?.clone(),
            pi.lit(&rel, &args, true)?.clone(),
        )?;
    }
    Ok(out)
}

/// A strict extension-preservation violation obtained by dropping one element.
#[derive(Clone, Debug)]
pub struct ShrinkReport {
    /// `π` with the unused elements moved to the top of the universe.
    pub original: Interpretation,
    /// The subinterpretation induced by `[n+r]`.
    pub smaller: Interpretation,
    pub before: Value,
    pub after: Value,
    pub translation: Translation,
}

impl ShrinkReport {
    /// The pair as a preservation witness (`A = smaller`, `B = original`).
    pub fn witness(&self) -> Witness {
        Witness {
            a: self.smaller.clone(),
            b: self.original.clone(),
            map: (0..self.smaller.size() as u32).collect(),
            value_a: self.after.clone(),
            value_b: self.before.clone(),
        }
    }
}

fn forall_node_below_one(t: &Strategy, pi: &Interpretation) -> Result<bool> {
    let c = t.compiled();
    let s = pi.semiring();
    let mut stack: Vec<&SNode> = vec![&t.root];
    while let Some(v) = stack.pop() {
        if matches!(
            c.nodes[v.node],
            Node::Quant {
                kind: QKind::Forall,
                ..
            }
        ) && !v.children.is_empty()
        {
            let mut all = true;
            for w in &v.children {
                all &= !s.is_one(&t.eval_at(pi, w)?);
            }
            if all {
                return Ok(true);
            }
        }
        stack.extend(&v.children);
    }
    Ok(false)
}

/// Turns an optimal strategy `T` for `π` that uses a universal node into a
/// subinterpretation with one element fewer and a strictly larger value.
/// Each unmet precondition is reported by name.
pub fn shrink_counterexample(pi: &Interpretation, t: &Strategy, psi: &Formula) -> Result<ShrinkReport> {
    let fail = |name: &str, detail: String| Err(precondition(format!("{name}: {detail}")));
    if !psi.is_sentence() || !psi.is_foneq() || !has_default_avoid(psi) {
        return fail(
            "fo_neq_sentence",
            "ψ must be an FO≠ sentence with standard exclusions".into(),
        );
    }
    if t.tree.formula() != psi || t.n() != pi.size() {
        return fail("strategy", "T is not a strategy for ψ over the universe of π".into());
    }
    let s = pi.semiring();
    let r = psi.qr();
    let k = pi.size();
    let need = 2u128.saturating_mul((1u128 << psi.size().min(120)) + r as u128 + 1);
    if (k as u128) < need {
        return fail("universe_size", format!("{k} < 2·(2^|ψ| + qr(ψ) + 1) = {need}"));
    }
    let val = eval(pi, psi)?;
    if s.is_zero(&val) {
        return fail("nonzero_value", "π⟦ψ⟧ = 0".into());
    }
    if t.eval(pi)? != val {
        return fail("optimality", "π⟦T⟧ ≠ π⟦ψ⟧".into());
    }
    if !forall_node_below_one(t, pi)? {
        return fail(
            "forall_node",
            "no universal node whose successors all evaluate below 1".into(),
        );
    }
    let used = a_lit(t, &t.root);
    let unused: Vec<u32> = (0..k as u32).filter(|e| !used.contains(e)).collect();
    if unused.len() < r + 1 {
        return fail(
            "free_elements",
            format!("only {} elements avoid the literals of T, need {}", unused.len(), r + 1),
        );
    }
    let top: BTreeSet<u32> = unused[unused.len() - (r + 1)..].iter().copied().collect();
    let order: Vec<u32> = (0..k as u32)
        .filter(|e| !top.contains(e))
        .chain(top.iter().copied())
        .collect();
    let mut perm = vec![0u32; k];
    for (new, &old) in order.iter().enumerate() {
        perm[old as usize] = new as u32;
    }
    let original = relabel(pi, &perm)?;
    let root = t.root.map_elements(&|e| perm[e as usize]);
    let moved = Strategy {
        tree: GameTree {
            compiled: t.tree.compiled.clone(),
            n: k,
            root_env: root.env.clone(),
        },
        root,
    };
    moved.validate()?;
    let translation = translate_strategy(&moved)?;
    let keep: Vec<u32> = (0..(k - 1) as u32).collect();
    let smaller = original.restrict(&keep)?;
    let before = eval(&original, psi)?;
    let after = eval(&smaller, psi)?;
    if !s.lt(&before, &after) {
        return Err(Error::Verification(format!(
            "dropping an element did not increase the value ({} vs {})",
            s.show(&before),
            s.show(&after)
        )));
    }
    Ok(ShrinkReport {
        original,
        smaller,
        before,
        after,
        translation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_sentence;
    use crate::preservation::Property;
    use crate::semiring::rat_value;
    use crate::strategy::{optimal, optimal_strategies};

    fn uniform(n: usize, v: Value) -> Interpretation {
        let f = parse_sentence("E x. R(x)").unwrap();
        let mut pi = Interpretation::numbered(SemiringSpec::Viterbi, n, &f.vocabulary().unwrap()).unwrap();
        for (rel, args) in pi.atoms() {
            pi.set_atom(&rel, &args, v.clone()).unwrap();
        }
        pi
    }

    #[test]
    fn redundancy_examples() {
        let mut pi = uniform(2, rat_value(1, 2));
        let or = parse_sentence("(A! x. R(x)) | (E! x. R(x))").unwrap();
        assert!(has_existential_optimal(&pi, &or).unwrap().is_some());
        pi.set_atom("R", &[1], rat_value(1, 3)).unwrap();
        let and = parse_sentence("(A! x. R(x)) & (E! x. R(x))").unwrap();
        assert!(has_existential_optimal(&pi, &and).unwrap().is_none());
        let nested = parse_sentence("A! y. E! z. R(z)").unwrap();
        let pi3 = uniform(3, rat_value(1, 2));
        assert!(has_existential_optimal(&pi3, &nested).unwrap().is_none());
        assert!(has_almost_existential_optimal(&pi3, &nested).unwrap().is_some());
    }

    #[test]
    fn ones_are_eliminated() {
        let f = parse_sentence("E! x. R(x)").unwrap();
        let pi = uniform(2, rat_value(1, 1));
        let star = eliminate_one_valuations(&pi, &f, 1000).unwrap();
        assert!(!star.image().iter().any(|v| SemiringSpec::Viterbi.is_one(v)));
        let before = optimal_strategies(&pi, &f, 1000).unwrap().len();
        let after = optimal_strategies(&star, &f, 1000).unwrap().len();
        assert!(after <= before && after > 0);
        let free = uniform(2, rat_value(1, 2));
        assert_eq!(eliminate_one_valuations(&free, &f, 1000).unwrap(), free);
    }

    #[test]
    fn shrinks_padded_instance() {
        let psi = parse_sentence("E! x. A! y. R(x)").unwrap();
        let r = psi.qr();
        let k = 2 * ((1usize << psi.size()) + r + 1);
        let base = uniform(k - r - 1, rat_value(1, 2));
        let pi = pad_for_redundancy(&base, &psi, r + 1).unwrap();
        assert_eq!(pi.size(), k);
        let t = optimal(&pi, &psi).unwrap().strategy;
        let rep = shrink_counterexample(&pi, &t, &psi).unwrap();
        assert!(SemiringSpec::Viterbi.lt(&rep.before, &rep.after));
        assert_eq!(rep.smaller.size(), k - 1);
        assert!(rep.witness().revalidate(&psi, Property::Extensions).unwrap());
    }

    #[test]
    fn shrink_rejects_subtree_one() {
        let psi = parse_sentence("E! x. A! y. R(x)").unwrap();
        let k = 2 * ((1usize << psi.size()) + psi.qr() + 1);
        let pi = uniform(k, rat_value(1, 1));
        let t = optimal(&pi, &psi).unwrap().strategy;
        let err = shrink_counterexample(&pi, &t, &psi).unwrap_err();
        assert!(err.to_string().contains("forall_node"), "{err}");
    }

    #[test]
    fn relabel_roundtrip() {
        let mut pi = uniform(3, rat_value(1, 2));
        pi.set_atom("R", &[0], rat_value(1, 4)).unwrap();
        let q = relabel(&pi, &[2, 0, 1]).unwrap();
        assert_eq!(q.lit("R", &[2], false).unwrap(), &rat_value(1, 4));
        assert_eq!(q.universe()[2], "1");
    }
}
