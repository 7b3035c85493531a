use std::collections::{BTreeSet, HashMap};

use super::{build_game_tree, is_choice, GameTree, SNode, Strategy};
use crate::error::{precondition, Result};
use crate::eval::{Compiled, Node, QKind};
use crate::formula::Formula;
use crate::interpretation::Interpretation;
use crate::semiring::{SemiringSpec, Value};

/// An optimal strategy together with the optimal value and the number of optimal strategies.
#[derive(Clone, Debug)]
pub struct Optimal {
    pub value: Value,
    pub strategy: Strategy,
    pub count: u128,
}

struct Dp<'a> {
    pi: &'a Interpretation,
    tree: GameTree,
    rels: Vec<usize>,
}

type Key = (usize, Vec<u32>);

impl Dp<'_> {
    fn new<'a>(pi: &'a Interpretation, psi: &Formula) -> Result<Dp<'a>> {
        let f = pi.semiring().flags();
        if !(f.additively_idempotent && f.linearly_ordered) {
            return Err(precondition(format!(
                "{} is not a linearly ordered semiring with idempotent addition",
                pi.semiring()
            )));
        }
        let tree = build_game_tree(psi, pi.size())?;
        let rels = tree.compiled.bind_relations(pi)?;
        Ok(Dp { pi, tree, rels })
    }

    fn node(&self, i: usize) -> &Node {
        &self.tree.compiled.nodes[i]
    }

    fn leaf(&self, node: usize, env: &[u32]) -> Value {
        let s = self.pi.semiring();
        match self.node(node) {
            Node::Lit { rel, args, neg } => {
                let a: Vec<u32> = args.iter().map(|&x| Compiled::resolve(x, env)).collect();
                self.pi.lit_by_index(self.rels[*rel], &a, *neg).clone()
            }
            Node::False => s.zero(),
            Node::Eq(a, b) => bool_value(s, Compiled::resolve(*a, env) == Compiled::resolve(*b, env)),
            Node::Neq(a, b) => bool_value(s, Compiled::resolve(*a, env) != Compiled::resolve(*b, env)),
            _ => s.one(),
        }
    }

    fn best(&self, node: usize, env: &[u32], memo: &mut HashMap<Key, (Value, u128)>) -> (Value, u128) {
        if let Some(r) = memo.get(&(node, env.to_vec())) {
            return r.clone();
        }
        let s = self.pi.semiring();
        let succ = self.tree.successors(node, env);
        let r = if succ.is_empty() {
            if is_choice(self.node(node)) {
                (s.zero(), 0)
            } else {
                (self.leaf(node, env), 1)
            }
        } else if is_choice(self.node(node)) {
            let vals: Vec<(Value, u128)> = succ.iter().map(|(c, e, _)| self.best(*c, e, memo)).collect();
            let top = vals.iter().fold(s.zero(), |a, (v, _)| s.max(&a, v).clone());
            let count = vals
                .iter()
                .filter(|(v, _)| *v == top)
                .fold(0u128, |a, (_, k)| a.saturating_add(*k));
            (top, count)
        } else {
            succ.iter().fold((s.one(), 1u128), |(a, k), (c, e, _)| {
                let (v, j) = self.best(*c, e, memo);
                (s.mul(&a, &v), k.saturating_mul(j))
            })
        };
        memo.insert((node, env.to_vec()), r.clone());
        r
    }

    fn extract(&self, node: usize, env: &[u32], inst: Option<u32>, memo: &mut HashMap<Key, (Value, u128)>) -> SNode {
        let succ = self.tree.successors(node, env);
        let children = if is_choice(self.node(node)) {
            let top = self.best(node, env, memo).0;
            succ.iter()
                .find(|(c, e, _)| self.best(*c, e, memo).0 == top)
                .map(|(c, e, b)| vec![self.extract(*c, e, *b, memo)])
                .unwrap_or_default()
        } else {
            succ.iter().map(|(c, e, b)| self.extract(*c, e, *b, memo)).collect()
        };
        SNode {
            node,
            env: env.to_vec(),
            inst,
            children,
        }
    }

    /// Multiset of strategy values below a node.
    fn dist(&self, node: usize, env: &[u32], memo: &mut HashMap<Key, Vec<(Value, u128)>>) -> Vec<(Value, u128)> {
        if let Some(r) = memo.get(&(node, env.to_vec())) {
            return r.clone();
        }
        let s = self.pi.semiring();
        let succ = self.tree.successors(node, env);
        let mut out: Vec<(Value, u128)> = Vec::new();
        let put = |out: &mut Vec<(Value, u128)>, v: Value, k: u128| match out.iter_mut().find(|(w, _)| *w == v) {
            Some((_, c)) => *c = c.saturating_add(k),
            None => out.push((v, k)),
        };
        if succ.is_empty() {
            if !is_choice(self.node(node)) {
                put(&mut out, self.leaf(node, env), 1);
            }
        } else if is_choice(self.node(node)) {
            for (c, e, _) in &succ {
                for (v, k) in self.dist(*c, e, memo) {
                    put(&mut out, v, k);
                }
            }
        } else {
            out.push((s.one(), 1));
            for (c, e, _) in &succ {
                let d = self.dist(*c, e, memo);
                let mut next = Vec::new();
                for (a, i) in &out {
                    for (b, j) in &d {
                        put(&mut next, s.mul(a, b), i.saturating_mul(*j));
                    }
                }
                out = next;
            }
        }
        memo.insert((node, env.to_vec()), out.clone());
        out
    }

    /// Best value over strategies that avoid universal nodes.
    fn existential(&self, node: usize, env: &[u32], memo: &mut HashMap<Key, Option<Value>>) -> Option<Value> {
        if let Some(r) = memo.get(&(node, env.to_vec())) {
            return r.clone();
        }
        let s = self.pi.semiring();
        let r = match self.node(node) {
            Node::Quant {
                kind: QKind::Forall, ..
            } => None,
            n if is_choice(n) => self
                .tree
                .successors(node, env)
                .iter()
                .filter_map(|(c, e, _)| self.existential(*c, e, memo))
                .reduce(|a, b| s.max(&a, &b).clone()),
            Node::And(a, b) => {
                let x = self.existential(*a, env, memo)?;
                let y = self.existential(*b, env, memo)?;
                Some(s.mul(&x, &y))
            }
            _ => Some(self.leaf(node, env)),
        };
        memo.insert((node, env.to_vec()), r.clone());
        r
    }

    fn extract_existential(
        &self,
        node: usize,
        env: &[u32],
        inst: Option<u32>,
        memo: &mut HashMap<Key, Option<Value>>,
    ) -> SNode {
        let succ = self.tree.successors(node, env);
        let children = if is_choice(self.node(node)) {
            let top = self.existential(node, env, memo);
            succ.iter()
                .find(|(c, e, _)| self.existential(*c, e, memo) == top)
                .map(|(c, e, b)| vec![self.extract_existential(*c, e, *b, memo)])
                .unwrap_or_default()
        } else {
            succ.iter()
                .map(|(c, e, b)| self.extract_existential(*c, e, *b, memo))
                .collect()
        };
        SNode {
            node,
            env: env.to_vec(),
            inst,
            children,
        }
    }

    /// Best value over almost existential strategies whose leaf literals avoid `forb`.
    fn almost(
        &self,
        node: usize,
        env: &[u32],
        forb: &BTreeSet<u32>,
        memo: &mut HashMap<(usize, Vec<u32>, Vec<u32>), AeEntry>,
    ) -> Option<Value> {
        let key = (node, env.to_vec(), forb.iter().copied().collect::<Vec<u32>>());
        if let Some(r) = memo.get(&key) {
            return r.0.clone();
        }
        let s = self.pi.semiring();
        let succ = self.tree.successors(node, env);
        let (val, pick) = match self.node(node) {
            Node::Lit { args, .. } => {
                let hit = args.iter().any(|&a| forb.contains(&Compiled::resolve(a, env)));
                ((!hit).then(|| self.leaf(node, env)), None)
            }
            Node::Quant {
                kind: QKind::Forall, ..
            } => {
                let plain: Vec<Option<Value>> = succ.iter().map(|(c, e, _)| self.almost(*c, e, forb, memo)).collect();
                let marked: Vec<Option<Value>> = succ
                    .iter()
                    .map(|(c, e, b)| {
                        let mut f = forb.clone();
                        f.insert(b.expect("quantifier move binds an element"));
                        self.almost(*c, e, &f, memo)
                    })
                    .collect();
                let mut best: Option<(Value, usize)> = None;
                for i in 0..succ.len() {
                    let Some(m) = &marked[i] else { continue };
                    let mut acc = Some(m.clone());
                    for (j, p) in plain.iter().enumerate() {
                        if j != i {
                            acc = match (acc, p) {
                                (Some(a), Some(p)) => Some(s.mul(&a, p)),
                                _ => None,
                            };
                        }
                    }
                    if let Some(v) = acc {
                        if best.as_ref().is_none_or(|(b, _)| s.lt(b, &v)) {
                            best = Some((v, i));
                        }
                    }
                }
                match best {
                    Some((v, i)) => (Some(v), Some(i)),
                    None => (None, None),
                }
            }
            n if is_choice(n) => {
                let mut best: Option<(Value, usize)> = None;
                for (i, (c, e, _)) in succ.iter().enumerate() {
                    if let Some(v) = self.almost(*c, e, forb, memo) {
                        if best.as_ref().is_none_or(|(b, _)| s.lt(b, &v)) {
                            best = Some((v, i));
                        }
                    }
                }
                match best {
                    Some((v, i)) => (Some(v), Some(i)),
                    None => (None, None),
                }
            }
            Node::And(..) => {
                let mut acc = Some(s.one());
                for (c, e, _) in &succ {
                    acc = match (acc, self.almost(*c, e, forb, memo)) {
                        (Some(a), Some(v)) => Some(s.mul(&a, &v)),
                        _ => None,
                    };
                }
                (acc, None)
            }
            _ => (Some(self.leaf(node, env)), None),
        };
        memo.insert(key, (val.clone(), pick));
        val
    }

    fn extract_almost(
        &self,
        node: usize,
        env: &[u32],
        inst: Option<u32>,
        forb: &BTreeSet<u32>,
        memo: &mut HashMap<(usize, Vec<u32>, Vec<u32>), AeEntry>,
    ) -> SNode {
        self.almost(node, env, forb, memo);
        let pick = memo[&(node, env.to_vec(), forb.iter().copied().collect::<Vec<u32>>())].1;
        let succ = self.tree.successors(node, env);
        let children = match self.node(node) {
            Node::Quant {
                kind: QKind::Forall, ..
            } => {
                let star = pick.expect("feasible universal node has a designated branch");
                succ.iter()
                    .enumerate()
                    .map(|(i, (c, e, b))| {
                        let mut f = forb.clone();
                        if i == star {
                            f.insert(b.unwrap());
                        }
                        self.extract_almost(*c, e, *b, &f, memo)
                    })
                    .collect()
            }
            n if is_choice(n) => {
                let (c, e, b) = &succ[pick.expect("feasible choice node has a pick")];
                vec![self.extract_almost(*c, e, *b, forb, memo)]
            }
            _ => succ
                .iter()
                .map(|(c, e, b)| self.extract_almost(*c, e, *b, forb, memo))
                .collect(),
        };
        SNode {
            node,
            env: env.to_vec(),
            inst,
            children,
        }
    }
}

type AeEntry = (Option<Value>, Option<usize>);

fn bool_value(s: &SemiringSpec, b: bool) -> Value {
    if b {
        s.one()
    } else {
        s.zero()
    }
}

/// Optimal value by dynamic programming, one optimal strategy, and the number of optimal strategies.
pub fn optimal(pi: &Interpretation, psi: &Formula) -> Result<Optimal> {
    let dp = Dp::new(pi, psi)?;
    let mut memo = HashMap::new();
    let root = dp.tree.compiled.root;
    let env = dp.tree.root_env.clone();
    let (value, local) = dp.best(root, &env, &mut memo);
    let node = dp.extract(root, &env, None, &mut memo);
    // Locally optimal choices are exactly the optimal strategies when products are
    // strictly monotone; otherwise count through the value distribution.
    let strict = matches!(
        pi.semiring(),
        SemiringSpec::Viterbi | SemiringSpec::Tropical | SemiringSpec::Boolean
    );
    let count = if strict && !pi.semiring().is_zero(&value) {
        local
    } else {
        dp.dist(root, &env, &mut HashMap::new())
            .into_iter()
            .find(|(v, _)| *v == value)
            .map_or(0, |(_, k)| k)
    };
    Ok(Optimal {
        value,
        strategy: Strategy {
            tree: dp.tree.clone(),
            root: node,
        },
        count,
    })
}

/// Every optimal strategy, by enumeration.
pub fn optimal_strategies(pi: &Interpretation, psi: &Formula, guard: u128) -> Result<Vec<Strategy>> {
    let best = optimal(pi, psi)?;
    let all = best.strategy.tree.enumerate(guard)?;
    let mut out = Vec::new();
    for t in all {
        if t.eval(pi)? == best.value {
            out.push(t);
        }
    }
    Ok(out)
}

/// The best existential strategy, if any exists.
pub fn best_existential(pi: &Interpretation, psi: &Formula) -> Result<Option<(Value, Strategy)>> {
    let dp = Dp::new(pi, psi)?;
    let mut memo = HashMap::new();
    let root = dp.tree.compiled.root;
    let env = dp.tree.root_env.clone();
    Ok(dp.existential(root, &env, &mut memo).map(|v| {
        let node = dp.extract_existential(root, &env, None, &mut memo);
        (
            v,
            Strategy {
                tree: dp.tree.clone(),
                root: node,
            },
        )
    }))
}

/// The best almost existential strategy, if any exists.
pub fn best_almost_existential(pi: &Interpretation, psi: &Formula) -> Result<Option<(Value, Strategy)>> {
    let dp = Dp::new(pi, psi)?;
    let mut memo = HashMap::new();
    let root = dp.tree.compiled.root;
    let env = dp.tree.root_env.clone();
    let none = BTreeSet::new();
    Ok(dp.almost(root, &env, &none, &mut memo).map(|v| {
        let node = dp.extract_almost(root, &env, None, &none, &mut memo);
        (
            v,
            Strategy {
                tree: dp.tree.clone(),
                root: node,
            },
        )
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::eval;
    use crate::formula::{parse_sentence, Vocabulary};
    use crate::interpretation::random_interpretation;
    use crate::semiring::{rat_value, SemiringSpec};
    use crate::strategy::{classify, StrategyClass, STRATEGY_GUARD};
    use rand::SeedableRng;

    fn viterbi(vals: &[(u32, Value)]) -> Interpretation {
        let v = Vocabulary::from_pairs([("R", 1)]).unwrap();
        let mut pi = Interpretation::numbered(SemiringSpec::Viterbi, vals.len(), &v).unwrap();
        for (a, x) in vals {
            pi.set_atom("R", &[*a], x.clone()).unwrap();
        }
        pi
    }

    #[test]
    fn argmax_witness() {
        let pi = viterbi(&[(0, rat_value(1, 2)), (1, rat_value(1, 4))]);
        let o = optimal(&pi, &parse_sentence("E x. R(x)").unwrap()).unwrap();
        assert_eq!(o.value, rat_value(1, 2));
        assert_eq!(o.strategy.root.children[0].inst, Some(0));
        assert_eq!(o.count, 1);
    }

    #[test]
    fn tie_count() {
        let pi = viterbi(&[(0, rat_value(1, 2)), (1, rat_value(1, 2))]);
        let f = parse_sentence("E x. A y. R(x)").unwrap();
        let o = optimal(&pi, &f).unwrap();
        assert_eq!(o.value, rat_value(1, 4));
        assert_eq!(o.count, 2);
        assert_eq!(optimal_strategies(&pi, &f, STRATEGY_GUARD).unwrap().len(), 2);
    }

    #[test]
    fn dp_matches_eval_and_enumeration() {
        let v = Vocabulary::from_pairs([("R", 1), ("Q", 2)]).unwrap();
        let grid = [rat_value(1, 4), rat_value(1, 2), rat_value(1, 1)];
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for src in [
            "A! x. E! y. Q(x,y) | R(y)",
            "E! x. A! y. R(x) & ~Q(x,y)",
            "A x. E y. Q(x,y)",
        ] {
            let f = parse_sentence(src).unwrap();
            for _ in 0..20 {
                let pi = random_interpretation(&SemiringSpec::Viterbi, &v, 3, &grid, &mut rng).unwrap();
                let o = optimal(&pi, &f).unwrap();
                assert_eq!(o.value, eval(&pi, &f).unwrap());
                assert_eq!(o.strategy.eval(&pi).unwrap(), o.value);
                o.strategy.validate().unwrap();
                let all = optimal_strategies(&pi, &f, STRATEGY_GUARD).unwrap();
                assert_eq!(all.len() as u128, o.count);
                let ex = all
                    .iter()
                    .filter(|t| classify(t).class == StrategyClass::Existential)
                    .count();
                let has = best_existential(&pi, &f).unwrap().is_some_and(|(x, _)| x == o.value);
                assert_eq!(ex > 0, has);
                let ae = all
                    .iter()
                    .filter(|t| classify(t).class != StrategyClass::ReliesOnForall)
                    .count();
                let has = best_almost_existential(&pi, &f).unwrap().is_some_and(|(x, t)| {
                    assert_ne!(classify(&t).class, StrategyClass::ReliesOnForall);
                    x == o.value
                });
                assert_eq!(ae > 0, has);
            }
        }
    }

    #[test]
    fn rejects_lattices() {
        let pi = Interpretation::numbered(
            SemiringSpec::lattice(crate::semiring::FiniteLattice::diamond()),
            1,
            &Vocabulary::new(),
        )
        .unwrap();
        assert!(optimal(&pi, &Formula::True).is_err());
    }
}
