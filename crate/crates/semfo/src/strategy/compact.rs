use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::{a_exists, a_lit, classify, GameTree, SNode, Strategy, StrategyClass};
use crate::error::{precondition, Error, Result};
use crate::eval::{Compiled, Node, QKind, UNBOUND};
use crate::formula::{fresh_var, Formula};
use std::sync::Arc;

/// `c_m` for a formula of size `size`: `c_0 = 0`, `c_{m+1} = 2^{size+1}·((c_m+1)·c_m + 1)`.
pub fn c_constants(size: usize, m: usize) -> BigUint {
    let base = BigUint::one() << (size + 1);
    (0..m).fold(BigUint::zero(), |c, _| &base * ((&c + 1u32) * &c + 1u32))
}

fn swap_node(v: &SNode, b: u32, c: u32) -> SNode {
    let g = |e: u32| {
        if e == b {
            c
        } else if e == c {
            b
        } else {
            e
        }
    };
    v.map_elements(&g)
}

fn compact_level(t: &Strategy, v: &mut SNode, level: usize) -> Result<()> {
    let c = t.compiled();
    let is_target = matches!(
        c.nodes[v.node],
        Node::Quant {
            kind: QKind::Forall,
            ..
        }
    ) && c.subs[v.node].qr_forall() == level;
    if !is_target {
        for w in &mut v.children {
            compact_level(t, w, level)?;
        }
        return Ok(());
    }
    let Some(l) = v
        .children
        .iter()
        .position(|w| w.inst.is_some_and(|b| !a_lit(t, w).contains(&b)))
    else {
        return Err(precondition(format!("strategy relies on forall at `{}`", t.label(v))));
    };
    let model = v.children[l].clone();
    let il = model.inst.expect("universal successor binds an element");
    let mut keep: BTreeSet<u32> = a_exists(t, &model);
    keep.extend(a_lit(t, &model));
    for w in &mut v.children {
        let ij = w.inst.expect("universal successor binds an element");
        if ij != il && !keep.contains(&ij) {
            *w = swap_node(&model, il, ij);
        }
    }
    Ok(())
}

/// Rewrites an almost existential strategy so that below every universal node with
/// `qr_∀ ≤ m` all but a bounded number of branches are copies of one branch that
/// avoids the universal element, without enlarging the polynomial support.
pub fn compact_almost_existential(t: &Strategy, m: usize) -> Result<Strategy> {
    if classify(t).class == StrategyClass::ReliesOnForall {
        return Err(precondition("strategy relies on forall"));
    }
    let mut root = t.root.clone();
    for level in 1..=m {
        compact_level(t, &mut root, level)?;
    }
    let out = Strategy {
        tree: t.tree.clone(),
        root,
    };
    out.validate()
        .map_err(|e| Error::Verification(format!("compaction broke the strategy: {e}")))?;
    if !out.support().is_subset(&t.support()) || classify(&out).class == StrategyClass::ReliesOnForall {
        return Err(Error::Verification("compaction enlarged the support".into()));
    }
    Ok(out)
}

/// Translates an almost existential `T ∈ C_{n+r}(ψ)` with support in `X_n` into an
/// almost existential `T* ∈ C_n(ψ)` whose support is contained in that of `T`.
///
/// The strategy is wrapped into one for `∀≠y ψ`, compacted, and one copy is
/// taken back. The `r` overflow elements are swapped with non-witnesses and the
/// universal branches instantiating them are dropped. Fails with a precondition
/// error if too few non-witness elements are available.
pub fn translate_almost_existential(t: &Strategy, n: usize) -> Result<Strategy> {
    let psi = t.tree.formula().clone();
    if !psi.is_sentence() || !psi.is_foneq() {
        return Err(precondition("translation needs an FO≠ sentence"));
    }
    let r = psi.qr();
    if t.n() != n + r {
        return Err(precondition(format!("strategy universe must be n+r = {}", n + r)));
    }
    if classify(t).class == StrategyClass::ReliesOnForall {
        return Err(precondition("strategy relies on forall"));
    }
    if let Some(v) = t
        .support()
        .iter()
        .find(|v| v.elements().iter().any(|&e| e as usize >= n))
    {
        return Err(precondition(format!("support variable {v} lies outside X_n")));
    }
    // Wrap into a strategy for ∀≠y ψ; the body keeps its node ids and its slots shift by one.
    let y = fresh_var("y", &psi.all_vars());
    let wrapped_f = Formula::ForallD(y, vec![], Box::new(psi.clone()));
    let wc = Compiled::new(&wrapped_f)?;
    debug_assert_eq!(wc.nodes.len(), t.compiled().nodes.len() + 1);
    fn shift(v: &SNode) -> SNode {
        let mut env = vec![UNBOUND];
        env.extend(&v.env);
        SNode {
            node: v.node,
            env,
            inst: v.inst,
            children: v.children.iter().map(shift).collect(),
        }
    }
    let total = t.n();
    let wroot = SNode {
        node: wc.root,
        env: {
            let mut e = vec![UNBOUND];
            e.extend(&t.root.env);
            e
        },
        inst: None,
        children: (0..total as u32)
            .map(|b| SNode {
                inst: Some(b),
                ..shift(&t.root)
            })
            .collect(),
    };
    let wrapped = Strategy {
        tree: GameTree {
            root_env: wroot.env.clone(),
            compiled: Arc::new(wc),
            n: total,
        },
        root: wroot,
    };
    wrapped.validate()?;
    let compacted = compact_almost_existential(&wrapped, r + 1)?;
    let witnesses = a_exists(&compacted, &compacted.root);
    // Pair each overflow element n+j with itself or with a fresh non-witness of [n].
    let mut free_low = (0..n as u32).filter(|e| !witnesses.contains(e));
    let mut perm: Vec<u32> = (0..total as u32).collect();
    for j in n..total {
        let e = j as u32;
        if witnesses.contains(&e) {
            let i = free_low
                .next()
                .ok_or_else(|| precondition("too few non-witness elements for the translation"))?;
            perm[j] = i;
            perm[i as usize] = e;
        }
    }
    let copy = &compacted.root.children[0];
    fn unshift(v: &SNode, perm: &[u32], n: u32, c: &Compiled) -> Option<SNode> {
        let map = |e: u32| if e == UNBOUND { e } else { perm[e as usize] };
        let inst = v.inst.map(map);
        let is_forall = matches!(
            c.nodes[v.node],
            Node::Quant {
                kind: QKind::Forall,
                ..
            }
        );
        let children = v
            .children
            .iter()
            .filter_map(|w| {
                let out = unshift(w, perm, n, c)?;
                if is_forall && out.inst.is_some_and(|b| b >= n) {
                    None
                } else {
                    Some(out)
                }
            })
            .collect();
        Some(SNode {
            node: v.node,
            env: v.env[1..].iter().map(|&e| map(e)).collect(),
            inst,
            children,
        })
    }
    let mut root = unshift(copy, &perm, n as u32, t.compiled()).expect("root survives");
    root.inst = None;
    let out = Strategy {
        tree: GameTree {
            compiled: t.tree.compiled.clone(),
            n,
            root_env: root.env.clone(),
        },
        root,
    };
    out.validate()
        .map_err(|e| Error::Verification(format!("translated tree is not a strategy: {e}")))?;
    if !out.support().is_subset(&t.support()) {
        return Err(Error::Verification("translation enlarged the support".into()));
    }
    if classify(&out).class == StrategyClass::ReliesOnForall {
        return Err(Error::Verification("translation lost almost existentiality".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_sentence;
    use crate::strategy::build_game_tree;
    use rand::SeedableRng;

    #[test]
    fn constants() {
        assert_eq!(c_constants(3, 0), BigUint::zero());
        assert_eq!(c_constants(3, 1), BigUint::from(16u32));
        assert_eq!(c_constants(3, 2), BigUint::from(16u32 * (17 * 16 + 1)));
    }

    #[test]
    fn compaction_shares_witness_pattern() {
        let f = parse_sentence("A! y. E! z. R(z)").unwrap();
        let tree = build_game_tree(&f, 6).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let t = tree.sample(&mut rng, &|_, _, _| true, 0.0).unwrap();
        let out = compact_almost_existential(&t, 1).unwrap();
        let witnesses: BTreeSet<u32> = out.root.children.iter().map(|w| w.children[0].inst.unwrap()).collect();
        assert!(witnesses.len() <= 2, "{witnesses:?}");
        assert!(out.support().is_subset(&t.support()));
    }

    #[test]
    fn rejects_reliance() {
        let f = parse_sentence("A! y. R(y)").unwrap();
        let t = &build_game_tree(&f, 3).unwrap().enumerate(1).unwrap()[0];
        assert!(compact_almost_existential(t, 1).is_err());
    }

    #[test]
    fn translation_shrinks_universe() {
        let f = parse_sentence("E! x. A! y. E! z. R(x) & Q(z)").unwrap();
        let n = 6;
        let tree = build_game_tree(&f, n + f.qr()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let t = crate::strategy::translate::sample_supported(&tree, n, &mut rng, 0.5).unwrap();
            let out = translate_almost_existential(&t, n).unwrap();
            assert_eq!(out.n(), n);
            assert!(out.support().is_subset(&t.support()));
        }
    }
}
