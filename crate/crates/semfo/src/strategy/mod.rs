//! Model-checking games and evaluation strategies.
//!
//! A strategy keeps one successor at every `∨`/`∃` node and every successor
//! at `∧`/`∀` nodes. Its valuation is the product of its leaf values, and the
//! valuation of a formula is the sum over all its strategies.

mod compact;
mod optimal;
mod translate;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

pub use compact::{c_constants, compact_almost_existential, translate_almost_existential};
pub use optimal::{best_almost_existential, best_existential, optimal, optimal_strategies, Optimal};
pub use translate::{sample_supported, translate_bound, translate_strategy, DroppedBranch, Translation};

use crate::error::{invalid, Error, Result};
use crate::eval::{eval_compiled, Compiled, Node, QKind, UNBOUND};
use crate::formula::{default_avoid, Formula, Var};
use crate::interpretation::Interpretation;
use crate::provenance::{Monomial, PVar, SPoly};
use crate::semiring::Value;

/// Default bound on the number of strategies enumerated.
pub const STRATEGY_GUARD: u128 = 1_000_000;

/// The game `C_n(φ(ā))`: a compiled formula, a universe size and the root instantiation.
#[derive(Clone, Debug)]
pub struct GameTree {
    pub compiled: Arc<Compiled>,
    pub n: usize,
    pub root_env: Vec<u32>,
}

/// Game tree of a sentence over `[n]`.
pub fn build_game_tree(psi: &Formula, n: usize) -> Result<GameTree> {
    GameTree::instantiated(psi, n, &BTreeMap::new())
}

impl GameTree {
    /// Game tree of `φ(ā)` with the free variables bound by `assignment`.
    pub fn instantiated(phi: &Formula, n: usize, assignment: &BTreeMap<Var, u32>) -> Result<GameTree> {
        let compiled = Compiled::new(phi)?;
        let mut root_env = compiled.empty_env();
        for (v, s) in &compiled.free {
            let e = *assignment.get(v).ok_or_else(|| Error::Unbound(v.clone()))?;
            if e as usize >= n {
                return Err(invalid(format!("element {e} is not in [{n}]")));
            }
            root_env[*s] = e;
        }
        if let Some(&k) = phi.constants().iter().find(|&&k| k as usize >= n) {
            return Err(invalid(format!("constant #{} is not in [{n}]", k + 1)));
        }
        Ok(GameTree {
            compiled: Arc::new(compiled),
            n,
            root_env,
        })
    }

    pub fn formula(&self) -> &Formula {
        &self.compiled.formula
    }

    /// The same game over a different universe size.
    pub fn resized(&self, n: usize) -> GameTree {
        GameTree {
            compiled: self.compiled.clone(),
            n,
            root_env: self.root_env.clone(),
        }
    }

    /// Successors of a position: `(child node, child env, instantiated element)`.
    pub fn successors(&self, node: usize, env: &[u32]) -> Vec<(usize, Vec<u32>, Option<u32>)> {
        let slot = match &self.compiled.nodes[node] {
            Node::Quant { slot, .. } => Some(*slot),
            _ => None,
        };
        self.compiled
            .moves(node, env, self.n)
            .into_iter()
            .map(|(c, b)| {
                let mut e = env.to_vec();
                if let (Some(s), Some(b)) = (slot, b) {
                    e[s] = b;
                }
                (c, self.restrict(c, &e), b)
            })
            .collect()
    }

    /// Keeps only the slots free in the subformula at `node`, so that a position
    /// is exactly the instantiated subformula.
    pub fn restrict(&self, node: usize, env: &[u32]) -> Vec<u32> {
        let mut out = vec![UNBOUND; env.len()];
        for &s in &self.compiled.scope[node] {
            out[s] = env[s];
        }
        out
    }

    /// Number of strategies, saturating at `u128::MAX`.
    pub fn count_strategies(&self) -> u128 {
        let mut memo = HashMap::new();
        self.count_at(self.compiled.root, &self.root_env, &mut memo)
    }

    fn count_at(&self, node: usize, env: &[u32], memo: &mut HashMap<(usize, Vec<u32>), u128>) -> u128 {
        if let Some(&c) = memo.get(&(node, env.to_vec())) {
            return c;
        }
        let succ = self.successors(node, env);
        let c = if succ.is_empty() {
            u128::from(!is_choice(&self.compiled.nodes[node]))
        } else if is_choice(&self.compiled.nodes[node]) {
            succ.iter()
                .fold(0u128, |a, (c, e, _)| a.saturating_add(self.count_at(*c, e, memo)))
        } else {
            succ.iter()
                .fold(1u128, |a, (c, e, _)| a.saturating_mul(self.count_at(*c, e, memo)))
        };
        memo.insert((node, env.to_vec()), c);
        c
    }

    /// All strategies, refused when there are more than `guard`.
    pub fn enumerate(&self, guard: u128) -> Result<Vec<Strategy>> {
        let count = self.count_strategies();
        if count > guard {
            return Err(Error::Guard(format!("{count} strategies exceed the guard {guard}")));
        }
        Ok(self
            .all_at(self.compiled.root, &self.root_env, None)
            .into_iter()
            .map(|root| Strategy {
                tree: self.clone(),
                root,
            })
            .collect())
    }

    fn all_at(&self, node: usize, env: &[u32], inst: Option<u32>) -> Vec<SNode> {
        let succ = self.successors(node, env);
        let leaf = |children| SNode {
            node,
            env: env.to_vec(),
            inst,
            children,
        };
        if succ.is_empty() {
            return if is_choice(&self.compiled.nodes[node]) {
                vec![]
            } else {
                vec![leaf(vec![])]
            };
        }
        if is_choice(&self.compiled.nodes[node]) {
            succ.iter()
                .flat_map(|(c, e, b)| self.all_at(*c, e, *b))
                .map(|ch| leaf(vec![ch]))
                .collect()
        } else {
            let mut combos: Vec<Vec<SNode>> = vec![vec![]];
            for (c, e, b) in &succ {
                let opts = self.all_at(*c, e, *b);
                combos = combos
                    .into_iter()
                    .flat_map(|pre| {
                        opts.iter().map(move |o| {
                            let mut v = pre.clone();
                            v.push(o.clone());
                            v
                        })
                    })
                    .collect();
            }
            combos.into_iter().map(leaf).collect()
        }
    }

    /// A random strategy whose leaves all satisfy `ok`, or `None` if there is none.
    /// Choice nodes pick uniformly among completable successors, except that with
    /// probability `high_bias` a quantifier picks its largest completable element.
    pub fn sample<R: Rng>(
        &self,
        rng: &mut R,
        ok: &dyn Fn(&GameTree, usize, &[u32]) -> bool,
        high_bias: f64,
    ) -> Option<Strategy> {
        let mut memo = HashMap::new();
        if !self.feasible(self.compiled.root, &self.root_env, ok, &mut memo) {
            return None;
        }
        let root = self.sample_at(self.compiled.root, &self.root_env, None, rng, ok, high_bias, &mut memo);
        Some(Strategy {
            tree: self.clone(),
            root,
        })
    }

    fn feasible(
        &self,
        node: usize,
        env: &[u32],
        ok: &dyn Fn(&GameTree, usize, &[u32]) -> bool,
        memo: &mut HashMap<(usize, Vec<u32>), bool>,
    ) -> bool {
        if let Some(&b) = memo.get(&(node, env.to_vec())) {
            return b;
        }
        let succ = self.successors(node, env);
        let b = if succ.is_empty() {
            !is_choice(&self.compiled.nodes[node]) && ok(self, node, env)
        } else if is_choice(&self.compiled.nodes[node]) {
            succ.iter().any(|(c, e, _)| self.feasible(*c, e, ok, memo))
        } else {
            succ.iter().all(|(c, e, _)| self.feasible(*c, e, ok, memo))
        };
        memo.insert((node, env.to_vec()), b);
        b
    }

    fn sample_at<R: Rng>(
        &self,
        node: usize,
        env: &[u32],
        inst: Option<u32>,
        rng: &mut R,
        ok: &dyn Fn(&GameTree, usize, &[u32]) -> bool,
        high_bias: f64,
        memo: &mut HashMap<(usize, Vec<u32>), bool>,
    ) -> SNode {
        let succ = self.successors(node, env);
        let children = if is_choice(&self.compiled.nodes[node]) {
            let good: Vec<_> = succ.iter().filter(|(c, e, _)| self.feasible(*c, e, ok, memo)).collect();
            let pick = if good[0].2.is_some() && rng.gen_bool(high_bias) {
                good.iter().max_by_key(|s| s.2).copied()
            } else {
                good.choose(rng).copied()
            };
            let (c, e, b) = pick.expect("feasible choice node has a feasible child");
            vec![self.sample_at(*c, e, *b, rng, ok, high_bias, memo)]
        } else {
            succ.iter()
                .map(|(c, e, b)| self.sample_at(*c, e, *b, rng, ok, high_bias, memo))
                .collect()
        };
        SNode {
            node,
            env: env.to_vec(),
            inst,
            children,
        }
    }

    /// Elements of a leaf literal at `node` under `env`.
    pub fn literal_elements(&self, node: usize, env: &[u32]) -> Vec<u32> {
        match &self.compiled.nodes[node] {
            Node::Lit { args, .. } => args.iter().map(|&a| Compiled::resolve(a, env)).collect(),
            _ => vec![],
        }
    }
}

/// `∨` and `∃` nodes, where the Verifier picks one successor.
pub(crate) fn is_choice(n: &Node) -> bool {
    matches!(
        n,
        Node::Or(..)
            | Node::Quant {
                kind: QKind::Exists,
                ..
            }
    )
}

/// A node of a strategy tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SNode {
    /// Node of the compiled formula.
    pub node: usize,
    /// Slot values; `UNBOUND` for slots not yet bound.
    pub env: Vec<u32>,
    /// The element bound on the edge from the parent quantifier.
    pub inst: Option<u32>,
    pub children: Vec<SNode>,
}

impl SNode {
    pub fn size(&self) -> usize {
        1 + self.children.iter().map(SNode::size).sum::<usize>()
    }

    pub fn child(&self, path: &[usize]) -> Option<&SNode> {
        match path.split_first() {
            None => Some(self),
            Some((i, rest)) => self.children.get(*i)?.child(rest),
        }
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a SNode)) {
        f(self);
        for c in &self.children {
            c.visit(f);
        }
    }

    pub(crate) fn map_elements(&self, g: &impl Fn(u32) -> u32) -> SNode {
        SNode {
            node: self.node,
            env: self.env.iter().map(|&e| if e == UNBOUND { e } else { g(e) }).collect(),
            inst: self.inst.map(g),
            children: self.children.iter().map(|c| c.map_elements(g)).collect(),
        }
    }
}

/// An evaluation strategy `T ∈ C_n(φ(ā))`.
#[derive(Clone, Debug)]
pub struct Strategy {
    pub tree: GameTree,
    pub root: SNode,
}

/// Whether a strategy is existential, almost existential, or relies on `∀`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum StrategyClass {
    Existential,
    AlmostExistential,
    ReliesOnForall,
}

impl fmt::Display for StrategyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyClass::Existential => "existential",
            StrategyClass::AlmostExistential => "almost existential",
            StrategyClass::ReliesOnForall => "relies on forall",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StrategyStats {
    /// Witnesses: elements instantiated at existential nodes.
    pub a_exists: BTreeSet<u32>,
    /// Elements occurring in leaf literals.
    pub a_lit: BTreeSet<u32>,
    pub class: StrategyClass,
}

/// Outcome of comparing `π⟦ψ⟧` with the sum over all strategies.
#[derive(Clone, Debug)]
pub struct SumReport {
    pub eval: Value,
    pub sum: Value,
    pub strategies: u128,
}

impl SumReport {
    pub fn holds(&self) -> bool {
        self.eval == self.sum
    }
}

impl Strategy {
    pub fn n(&self) -> usize {
        self.tree.n
    }

    pub fn compiled(&self) -> &Compiled {
        &self.tree.compiled
    }

    /// Label `λ(v)`: the subformula with the values of its free variables.
    pub fn label(&self, v: &SNode) -> String {
        let c = self.compiled();
        let f = &c.subs[v.node];
        let binds: Vec<String> = c.scope[v.node]
            .iter()
            .map(|&s| format!("{}={}", c.slot_names[s], v.env[s] + 1))
            .collect();
        if binds.is_empty() {
            f.to_string()
        } else {
            format!("{f}  @ {}", binds.join(", "))
        }
    }

    /// Checks that the tree is a strategy of its game.
    pub fn validate(&self) -> Result<()> {
        if self.root.node != self.compiled().root || self.root.env != self.tree.root_env {
            return Err(invalid("strategy root does not match the game root"));
        }
        self.validate_at(&self.root)
    }

    fn validate_at(&self, v: &SNode) -> Result<()> {
        if v.env.iter().any(|&e| e != UNBOUND && e as usize >= self.n()) {
            return Err(invalid(format!(
                "node `{}` uses an element outside [{}]",
                self.label(v),
                self.n()
            )));
        }
        let succ = self.tree.successors(v.node, &v.env);
        let node = &self.compiled().nodes[v.node];
        let matches = |s: &(usize, Vec<u32>, Option<u32>), c: &SNode| s.0 == c.node && s.1 == c.env && s.2 == c.inst;
        if is_choice(node) {
            if v.children.len() != 1 || !succ.iter().any(|s| matches(s, &v.children[0])) {
                return Err(invalid(format!(
                    "choice node `{}` must keep one legal successor",
                    self.label(v)
                )));
            }
        } else {
            let mut seen: Vec<bool> = vec![false; succ.len()];
            if v.children.len() != succ.len() {
                return Err(invalid(format!(
                    "node `{}` keeps {} of {} successors",
                    self.label(v),
                    v.children.len(),
                    succ.len()
                )));
            }
            for c in &v.children {
                let i = succ
                    .iter()
                    .enumerate()
                    .position(|(i, s)| !seen[i] && matches(s, c))
                    .ok_or_else(|| invalid(format!("illegal successor under `{}`", self.label(v))))?;
                seen[i] = true;
            }
        }
        v.children.iter().try_for_each(|c| self.validate_at(c))
    }

    /// `π⟦T⟧`: the product of the leaf values.
    pub fn eval(&self, pi: &Interpretation) -> Result<Value> {
        self.eval_at(pi, &self.root)
    }

    /// `π⟦T(v)⟧` for a node `v` of this strategy.
    pub fn eval_at(&self, pi: &Interpretation, v: &SNode) -> Result<Value> {
        if pi.size() != self.n() {
            return Err(invalid(format!(
                "strategy over [{}] evaluated on a universe of size {}",
                self.n(),
                pi.size()
            )));
        }
        let rels = self.compiled().bind_relations(pi)?;
        let s = pi.semiring();
        let mut acc = s.one();
        let mut err = None;
        v.visit(&mut |v| {
            if !v.children.is_empty() {
                return;
            }
            let val = match &self.compiled().nodes[v.node] {
                Node::Lit { rel, args, neg } => {
                    let a: Vec<u32> = args.iter().map(|&x| Compiled::resolve(x, &v.env)).collect();
                    pi.lit_by_index(rels[*rel], &a, *neg).clone()
                }
                Node::False => s.zero(),
                Node::Eq(a, b) | Node::Neq(a, b) => {
                    let same = Compiled::resolve(*a, &v.env) == Compiled::resolve(*b, &v.env);
                    if same == matches!(self.compiled().nodes[v.node], Node::Eq(..)) {
                        s.one()
                    } else {
                        s.zero()
                    }
                }
                Node::True
                | Node::And(..)
                | Node::Quant {
                    kind: QKind::Forall, ..
                } => s.one(),
                _ => {
                    err = Some(invalid("choice node without successor"));
                    s.zero()
                }
            };
            acc = s.mul(&acc, &val);
        });
        match err {
            Some(e) => Err(e),
            None => Ok(acc),
        }
    }

    /// `π_n⟦T⟧` in `S(X⁺,X⁻)`: a single monomial, or `None` for 0.
    pub fn monomial(&self) -> Option<Monomial> {
        subtree_monomial(self, &self.root)
    }

    pub fn poly(&self) -> SPoly {
        self.monomial().map(SPoly::from_monomial).unwrap_or_else(SPoly::zero)
    }

    /// Support of `π_n⟦T⟧`.
    pub fn support(&self) -> BTreeSet<PVar> {
        self.monomial().map(|m| m.vars().cloned().collect()).unwrap_or_default()
    }

    pub fn stats(&self) -> StrategyStats {
        classify(self)
    }

    /// Number of leaves with a relational literal.
    pub fn literal_leaves(&self) -> usize {
        let mut k = 0;
        self.root.visit(&mut |v| {
            if matches!(self.compiled().nodes[v.node], Node::Lit { .. }) {
                k += 1;
            }
        });
        k
    }

    /// The substrategy rooted at `path`, as a strategy for the instantiated subformula.
    pub fn subtree(&self, path: &[usize]) -> Result<SNode> {
        self.root
            .child(path)
            .cloned()
            .ok_or_else(|| invalid("no such strategy node"))
    }
}

pub(crate) fn subtree_monomial(t: &Strategy, v: &SNode) -> Option<Monomial> {
    let c = t.compiled();
    let mut m = Monomial::one();
    let mut zero = false;
    v.visit(&mut |u| {
        if !u.children.is_empty() {
            return;
        }
        match &c.nodes[u.node] {
            Node::Lit { rel, args, neg } => {
                let a: Vec<u32> = args.iter().map(|&x| Compiled::resolve(x, &u.env)).collect();
                m = m.mul(&Monomial::var(PVar::lit(&c.rels[*rel].0, a, *neg)));
            }
            Node::False => zero = true,
            Node::Eq(a, b) => zero |= Compiled::resolve(*a, &u.env) != Compiled::resolve(*b, &u.env),
            Node::Neq(a, b) => zero |= Compiled::resolve(*a, &u.env) == Compiled::resolve(*b, &u.env),
            _ => {}
        }
    });
    if zero || m.has_conflict() {
        None
    } else {
        Some(m)
    }
}

/// `Σ_T π⟦T⟧` compared with `π⟦ψ⟧`.
pub fn sum_of_strategies_check(pi: &Interpretation, psi: &Formula, guard: u128) -> Result<SumReport> {
    let tree = build_game_tree(psi, pi.size())?;
    let all = tree.enumerate(guard)?;
    let s = pi.semiring();
    let mut sum = s.zero();
    for t in &all {
        sum = s.add(&sum, &t.eval(pi)?);
    }
    Ok(SumReport {
        eval: eval_compiled(pi, &tree.compiled, &BTreeMap::new())?,
        sum,
        strategies: all.len() as u128,
    })
}

fn lit_elements(t: &Strategy, v: &SNode, out: &mut BTreeSet<u32>) {
    v.visit(&mut |u| {
        if u.children.is_empty() {
            out.extend(t.tree.literal_elements(u.node, &u.env));
        }
    });
}

/// `A_Lit(T(v))`.
pub fn a_lit(t: &Strategy, v: &SNode) -> BTreeSet<u32> {
    let mut out = BTreeSet::new();
    lit_elements(t, v, &mut out);
    out
}

/// `A_∃(T(v))`.
pub fn a_exists(t: &Strategy, v: &SNode) -> BTreeSet<u32> {
    let c = t.compiled();
    let mut out = BTreeSet::new();
    v.visit(&mut |u| {
        if let Node::Quant {
            kind: QKind::Exists, ..
        } = c.nodes[u.node]
        {
            out.extend(u.children.iter().filter_map(|w| w.inst));
        }
    });
    out
}

/// Witness sets and the class of a strategy.
pub fn classify(t: &Strategy) -> StrategyStats {
    let c = t.compiled();
    let mut universal = false;
    let mut relies = false;
    t.root.visit(&mut |u| {
        if let Node::Quant {
            kind: QKind::Forall, ..
        } = c.nodes[u.node]
        {
            universal = true;
            if u.children
                .iter()
                .all(|w| w.inst.is_some_and(|b| a_lit(t, w).contains(&b)))
            {
                relies = true;
            }
        }
    });
    StrategyStats {
        a_exists: a_exists(t, &t.root),
        a_lit: a_lit(t, &t.root),
        class: if !universal {
            StrategyClass::Existential
        } else if relies {
            StrategyClass::ReliesOnForall
        } else {
            StrategyClass::AlmostExistential
        },
    }
}

/// `T[b ↔ c]`, a strategy for `φ(ā, c)` when `T` is one for `φ(ā, b)`.
pub fn swap_instantiation(t: &Strategy, b: u32, c: u32) -> Result<Strategy> {
    if b == c {
        return Ok(t.clone());
    }
    let bound: Vec<u32> = t.tree.root_env.iter().copied().filter(|&e| e != UNBOUND).collect();
    if bound.contains(&c) {
        return Err(invalid(format!("element {} is already instantiated", c + 1)));
    }
    if c as usize >= t.n() {
        return Err(invalid(format!("element {} is not in [{}]", c + 1, t.n())));
    }
    let g = move |e: u32| {
        if e == b {
            c
        } else if e == c {
            b
        } else {
            e
        }
    };
    let root = t.root.map_elements(&g);
    let out = Strategy {
        tree: GameTree {
            compiled: t.tree.compiled.clone(),
            n: t.n(),
            root_env: root.env.clone(),
        },
        root,
    };
    out.validate()?;
    Ok(out)
}

/// Every quantifier excludes exactly the free variables of its scope.
pub fn has_default_avoid(f: &Formula) -> bool {
    let mut ok = true;
    f.visit(&mut |g| {
        if let Formula::ExistsD(v, s, b) | Formula::ForallD(v, s, b) = g {
            ok &= *s == default_avoid(v, b);
        }
    });
    ok
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &Strategy, v: &SNode, depth: usize, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let pad = "  ".repeat(depth);
            match (v.inst, t.compiled().nodes.get(v.node)) {
                (Some(b), _) => writeln!(f, "{pad}[{}] {}", b + 1, t.label(v))?,
                _ => writeln!(f, "{pad}{}", t.label(v))?,
            }
            v.children.iter().try_for_each(|c| go(t, c, depth + 1, f))
        }
        go(self, &self.root, 0, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::eval;
    use crate::formula::{parse, parse_sentence, Vocabulary};
    use crate::interpretation::enumerate_interpretations;
    use crate::semiring::{rat_value, SemiringSpec};

    fn unary() -> Vocabulary {
        Vocabulary::from_pairs([("R", 1)]).unwrap()
    }

    #[test]
    fn two_branches() {
        let f = parse_sentence("E x. R(x)").unwrap();
        let t = build_game_tree(&f, 2).unwrap();
        assert_eq!(t.count_strategies(), 2);
        let mut pi = Interpretation::numbered(SemiringSpec::Viterbi, 2, &unary()).unwrap();
        pi.set_atom("R", &[0], rat_value(1, 2)).unwrap();
        pi.set_atom("R", &[1], rat_value(1, 4)).unwrap();
        let vals: Vec<Value> = t.enumerate(10).unwrap().iter().map(|s| s.eval(&pi).unwrap()).collect();
        assert_eq!(vals, vec![rat_value(1, 2), rat_value(1, 4)]);
    }

    #[test]
    fn viterbi_quarter() {
        let f = parse_sentence("E x. A y. R(x)").unwrap();
        let mut pi = Interpretation::numbered(SemiringSpec::Viterbi, 2, &unary()).unwrap();
        pi.set_atom("R", &[0], rat_value(1, 2)).unwrap();
        pi.set_atom("R", &[1], rat_value(1, 2)).unwrap();
        for s in build_game_tree(&f, 2).unwrap().enumerate(10).unwrap() {
            s.validate().unwrap();
            assert_eq!(s.eval(&pi).unwrap(), rat_value(1, 4));
        }
    }

    #[test]
    fn true_leaf_is_one() {
        let t = build_game_tree(&Formula::True, 1).unwrap().enumerate(1).unwrap();
        let pi = Interpretation::numbered(SemiringSpec::Viterbi, 1, &Vocabulary::new()).unwrap();
        assert_eq!(t[0].eval(&pi).unwrap(), rat_value(1, 1));
    }

    #[test]
    fn sum_of_strategies_s3() {
        let v = Vocabulary::from_pairs([("R", 1), ("Q", 1)]).unwrap();
        for src in [
            "A! x. E! y. R(x) | Q(y)",
            "E x. A y. R(x) & ~Q(y)",
            "A x. (R(x) | E y. Q(y) & x = y)",
        ] {
            let f = parse_sentence(src).unwrap();
            for pi in enumerate_interpretations(&SemiringSpec::S3, &v, 2, &[Value::Level(1), Value::Level(2)]).unwrap()
            {
                let r = sum_of_strategies_check(&pi, &f, STRATEGY_GUARD).unwrap();
                assert!(r.holds(), "{src}: {} vs {}", r.eval, r.sum);
            }
        }
    }

    #[test]
    fn monomial_matches_pi_n() {
        let f = parse_sentence("A! x. E! y. R(x) | ~R(y)").unwrap();
        let pi = crate::provenance::pi_n(&unary(), 3, crate::provenance::PolyFlavor::Absorptive).unwrap();
        for s in build_game_tree(&f, 3).unwrap().enumerate(1000).unwrap() {
            assert_eq!(Value::SPoly(s.poly()), s.eval(&pi).unwrap());
        }
        assert_eq!(
            eval(&pi, &f).unwrap(),
            Value::SPoly(
                build_game_tree(&f, 3)
                    .unwrap()
                    .enumerate(1000)
                    .unwrap()
                    .iter()
                    .fold(SPoly::zero(), |a, s| a.add(&s.poly()))
            )
        );
    }

    #[test]
    fn classes() {
        let cls = |src: &str, n| {
            let f = parse_sentence(src).unwrap();
            build_game_tree(&f, n)
                .unwrap()
                .enumerate(1000)
                .unwrap()
                .iter()
                .map(|s| classify(s).class)
                .collect::<BTreeSet<_>>()
        };
        // z may coincide with y, so the diagonal choice relies on forall.
        assert_eq!(
            cls("A! y. E! z. R(z)", 3),
            [StrategyClass::AlmostExistential, StrategyClass::ReliesOnForall].into()
        );
        assert_eq!(cls("A! y. E! z []. R(z) & R(z)", 3).len(), 2);
        assert_eq!(
            cls("A! y. E! z. R(z) & y != z", 3),
            [StrategyClass::AlmostExistential].into()
        );
        assert_eq!(cls("A! y. Q(y)", 2), [StrategyClass::ReliesOnForall].into());
        assert_eq!(cls("E! x. R(x)", 2), [StrategyClass::Existential].into());
    }

    #[test]
    fn swap() {
        let f = parse("R(x)").unwrap();
        let g = GameTree::instantiated(&f, 2, &[("x".to_string(), 0)].into()).unwrap();
        let t = &g.enumerate(1).unwrap()[0];
        let s = swap_instantiation(t, 0, 1).unwrap();
        assert_eq!(s.support(), [PVar::lit("R", vec![1], false)].into());
        let same = swap_instantiation(t, 0, 0).unwrap();
        assert_eq!(same.root, t.root);
        let g =
            GameTree::instantiated(&parse("A! y. R(x) | Q(y)").unwrap(), 3, &[("x".to_string(), 0)].into()).unwrap();
        let mut rng = rand::thread_rng();
        let t = g.sample(&mut rng, &|_, _, _| true, 0.0).unwrap();
        swap_instantiation(&t, 0, 2).unwrap().validate().unwrap();
    }

    #[test]
    fn labels_print() {
        let f = parse_sentence("E! x. A! y. R(x)").unwrap();
        let s = &build_game_tree(&f, 2).unwrap().enumerate(10).unwrap()[0];
        let text = s.to_string();
        assert!(text.contains("[1] A! y. R(x)  @ x=1"), "{text}");
    }
}
