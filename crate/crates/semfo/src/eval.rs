//! Semiring valuation `π⟦φ⟧`.

use std::collections::{BTreeMap, HashMap};

use crate::error::{invalid, Error, Result};
use crate::formula::{Formula, Term, Var, Vocabulary};
use crate::interpretation::{enumerate_interpretations, Interpretation};
use crate::semiring::{SemiringSpec, Value};

/// Argument of a compiled literal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Arg {
    Slot(usize),
    Const(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QKind {
    Exists,
    Forall,
}

/// A formula node in a compiled arena. Every binder owns a variable slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node {
    True,
    False,
    Lit {
        rel: usize,
        args: Vec<Arg>,
        neg: bool,
    },
    Eq(Arg, Arg),
    Neq(Arg, Arg),
    And(usize, usize),
    Or(usize, usize),
    Quant {
        kind: QKind,
        distinct: bool,
        slot: usize,
        avoid: Vec<usize>,
        body: usize,
        /// Slots free in this node, used as memo key.
        free: Vec<usize>,
    },
}

/// Arena form of a formula, shared by evaluation and the game trees.
#[derive(Clone, Debug)]
pub struct Compiled {
    pub nodes: Vec<Node>,
    pub root: usize,
    /// Name of each slot (free variables first).
    pub slot_names: Vec<Var>,
    pub free: Vec<(Var, usize)>,
    pub rels: Vec<(String, usize)>,
    pub formula: Formula,
    /// The subformula each node was compiled from.
    pub subs: Vec<Formula>,
    /// Slots of the free variables of each node's subformula.
    pub scope: Vec<Vec<usize>>,
}

pub const UNBOUND: u32 = u32::MAX;

impl Compiled {
    pub fn new(f: &Formula) -> Result<Compiled> {
        f.vocabulary()?;
        let mut c = Compiled {
            nodes: vec![],
            root: 0,
            slot_names: vec![],
            free: vec![],
            rels: vec![],
            formula: f.clone(),
            subs: vec![],
            scope: vec![],
        };
        let mut scope: Vec<(Var, usize)> = Vec::new();
        for v in f.free_vars() {
            let s = c.slot_names.len();
            c.slot_names.push(v.clone());
            c.free.push((v.clone(), s));
            scope.push((v, s));
        }
        c.root = c.build(f, &mut scope);
        Ok(c)
    }

    pub fn slots(&self) -> usize {
        self.slot_names.len()
    }

    /// A fresh environment with every slot unbound.
    pub fn empty_env(&self) -> Vec<u32> {
        vec![UNBOUND; self.slots()]
    }

    fn lookup(scope: &[(Var, usize)], v: &str) -> usize {
        scope
            .iter()
            .rev()
            .find(|(w, _)| w == v)
            .map(|(_, s)| *s)
            .expect("free variables are pre-bound")
    }

    fn arg(scope: &[(Var, usize)], t: &Term) -> Arg {
        match t {
            Term::Var(v) => Arg::Slot(Self::lookup(scope, v)),
            Term::Const(c) => Arg::Const(*c),
        }
    }

    fn push(&mut self, n: Node, f: &Formula, scope: &[(Var, usize)]) -> usize {
        self.nodes.push(n);
        self.subs.push(f.clone());
        self.scope
            .push(f.free_vars().iter().map(|x| Self::lookup(scope, x)).collect());
        self.nodes.len() - 1
    }

    fn build(&mut self, f: &Formula, scope: &mut Vec<(Var, usize)>) -> usize {
        match f {
            Formula::True => self.push(Node::True, f, scope),
            Formula::False => self.push(Node::False, f, scope),
            Formula::Atom { rel, args, neg } => {
                let r = match self.rels.iter().position(|(n, _)| n == rel) {
                    Some(i) => i,
                    None => {
                        self.rels.push((rel.clone(), args.len()));
                        self.rels.len() - 1
                    }
                };
                let args = args.iter().map(|t| Self::arg(scope, t)).collect();
                self.push(
                    Node::Lit {
                        rel: r,
                        args,
                        neg: *neg,
                    },
                    f,
                    scope,
                )
            }
            Formula::Eq(a, b) => {
                let n = Node::Eq(Self::arg(scope, a), Self::arg(scope, b));
                self.push(n, f, scope)
            }
            Formula::Neq(a, b) => {
                let n = Node::Neq(Self::arg(scope, a), Self::arg(scope, b));
                self.push(n, f, scope)
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                let x = self.build(a, scope);
                let y = self.build(b, scope);
                self.push(
                    if matches!(f, Formula::And(..)) {
                        Node::And(x, y)
                    } else {
                        Node::Or(x, y)
                    },
                    f,
                    scope,
                )
            }
            Formula::Exists(v, b) | Formula::Forall(v, b) | Formula::ExistsD(v, _, b) | Formula::ForallD(v, _, b) => {
                let avoid: Vec<usize> = match f {
                    Formula::ExistsD(_, s, _) | Formula::ForallD(_, s, _) => {
                        s.iter().map(|x| Self::lookup(scope, x)).collect()
                    }
                    _ => vec![],
                };
                let free: Vec<usize> = f.free_vars().iter().map(|x| Self::lookup(scope, x)).collect();
                let slot = self.slot_names.len();
                self.slot_names.push(v.clone());
                scope.push((v.clone(), slot));
                let body = self.build(b, scope);
                scope.pop();
                let kind = if f.is_universal() { QKind::Forall } else { QKind::Exists };
                let distinct = matches!(f, Formula::ExistsD(..) | Formula::ForallD(..));
                self.push(
                    Node::Quant {
                        kind,
                        distinct,
                        slot,
                        avoid,
                        body,
                        free,
                    },
                    f,
                    scope,
                )
            }
        }
    }

    /// Elements a quantifier node ranges over in `env`.
    pub fn domain(&self, node: usize, env: &[u32], n: usize) -> Vec<u32> {
        match &self.nodes[node] {
            Node::Quant {
                distinct: true, avoid, ..
            } => (0..n as u32).filter(|b| avoid.iter().all(|&s| env[s] != *b)).collect(),
            Node::Quant { .. } => (0..n as u32).collect(),
            _ => vec![],
        }
    }

    /// Children of a node in the game: `(child node, element bound)`.
    pub fn moves(&self, node: usize, env: &[u32], n: usize) -> Vec<(usize, Option<u32>)> {
        match &self.nodes[node] {
            Node::And(a, b) | Node::Or(a, b) => vec![(*a, None), (*b, None)],
            Node::Quant { body, .. } => self
                .domain(node, env, n)
                .into_iter()
                .map(|b| (*body, Some(b)))
                .collect(),
            _ => vec![],
        }
    }

    /// Maps relation ids to the interpretation's table indices, checking arities.
    pub fn bind_relations(&self, pi: &Interpretation) -> Result<Vec<usize>> {
        let voc = pi.vocabulary();
        self.rels
            .iter()
            .map(|(name, arity)| match voc.arity(name) {
                Some(a) if a == *arity => Ok(pi.relation_index(name).unwrap()),
                Some(a) => Err(Error::Arity {
                    rel: name.clone(),
                    expected: a,
                    found: *arity,
                }),
                None => Err(Error::NotFound(format!("relation `{name}` in the interpretation"))),
            })
            .collect()
    }

    pub fn resolve(arg: Arg, env: &[u32]) -> u32 {
        match arg {
            Arg::Slot(s) => env[s],
            Arg::Const(c) => c,
        }
    }
}

struct Evaluator<'a> {
    c: &'a Compiled,
    pi: &'a Interpretation,
    rels: Vec<usize>,
    memo: HashMap<(usize, Vec<u32>), Value>,
}

impl Evaluator<'_> {
    fn eval(&mut self, node: usize, env: &mut Vec<u32>) -> Value {
        let s = self.pi.semiring();
        match &self.c.nodes[node] {
            Node::True => s.one(),
            Node::False => s.zero(),
            Node::Lit { rel, args, neg } => {
                let a: Vec<u32> = args.iter().map(|&x| Compiled::resolve(x, env)).collect();
                self.pi.lit_by_index(self.rels[*rel], &a, *neg).clone()
            }
            Node::Eq(a, b) | Node::Neq(a, b) => {
                let same = Compiled::resolve(*a, env) == Compiled::resolve(*b, env);
                if same == matches!(self.c.nodes[node], Node::Eq(..)) {
                    s.one()
                } else {
                    s.zero()
                }
            }
            &Node::And(a, b) => {
                let x = self.eval(a, env);
                if s.is_zero(&x) {
                    return x;
                }
                let y = self.eval(b, env);
                s.mul(&x, &y)
            }
            &Node::Or(a, b) => {
                let x = self.eval(a, env);
                let y = self.eval(b, env);
                s.add(&x, &y)
            }
            Node::Quant {
                kind, slot, body, free, ..
            } => {
                let key = (node, free.iter().map(|&f| env[f]).collect::<Vec<u32>>());
                if let Some(v) = self.memo.get(&key) {
                    return v.clone();
                }
                let (kind, slot, body) = (*kind, *slot, *body);
                let mut acc = match kind {
                    QKind::Exists => s.zero(),
                    QKind::Forall => s.one(),
                };
                for b in self.c.domain(node, env, self.pi.size()) {
                    env[slot] = b;
                    let v = self.eval(body, env);
                    acc = match kind {
                        QKind::Exists => s.add(&acc, &v),
                        QKind::Forall => s.mul(&acc, &v),
                    };
                }
                env[slot] = UNBOUND;
                self.memo.insert(key, acc.clone());
                acc
            }
        }
    }
}

/// Evaluates a compiled formula under an assignment of its free variables.
pub fn eval_compiled(pi: &Interpretation, c: &Compiled, assignment: &BTreeMap<Var, u32>) -> Result<Value> {
    let mut env = c.empty_env();
    for (v, s) in &c.free {
        let e = *assignment.get(v).ok_or_else(|| Error::Unbound(v.clone()))?;
        if e as usize >= pi.size() {
            return Err(invalid(format!("element {e} is not in the universe")));
        }
        env[*s] = e;
    }
    if let Some(&k) = c.formula.constants().iter().find(|&&k| k as usize >= pi.size()) {
        return Err(invalid(format!("constant #{} is not in the universe", k + 1)));
    }
    let mut ev = Evaluator {
        c,
        pi,
        rels: c.bind_relations(pi)?,
        memo: HashMap::new(),
    };
    Ok(ev.eval(c.root, &mut env))
}

/// `π⟦φ(ā)⟧` with the free variables bound by `assignment`.
pub fn eval_with(pi: &Interpretation, f: &Formula, assignment: &BTreeMap<Var, u32>) -> Result<Value> {
    eval_compiled(pi, &Compiled::new(f)?, assignment)
}

/// `π⟦φ⟧` for a sentence.
pub fn eval(pi: &Interpretation, f: &Formula) -> Result<Value> {
    eval_with(pi, f, &BTreeMap::new())
}

/// `π⟦Φ⟧ = ∏_{φ∈Φ} π⟦φ⟧`.
pub fn eval_set(pi: &Interpretation, fs: &[Formula]) -> Result<Value> {
    let s = pi.semiring();
    fs.iter().try_fold(s.one(), |acc, f| Ok(s.mul(&acc, &eval(pi, f)?)))
}

/// Outcome of a bounded entailment check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EntailVerdict {
    HoldsOnSample { checked: usize },
    Refuted(Box<Interpretation>),
}

pub fn vocabulary_of(fs: &[&[Formula]]) -> Result<Vocabulary> {
    let mut v = Vocabulary::new();
    for group in fs {
        for f in group.iter() {
            v.merge(&f.vocabulary()?)?;
        }
    }
    Ok(v)
}

/// Checks `π⟦Φ⟧ ≤ π⟦Ψ⟧` on every enumerated interpretation of the given size.
/// Sound for refutation only.
pub fn entails_at(
    phi: &[Formula],
    psi: &[Formula],
    spec: &SemiringSpec,
    size: usize,
    value_set: &[Value],
) -> Result<EntailVerdict> {
    let vocab = vocabulary_of(&[phi, psi])?;
    let mut checked = 0;
    for pi in enumerate_interpretations(spec, &vocab, size, value_set)? {
        checked += 1;
        if !spec.leq(&eval_set(&pi, phi)?, &eval_set(&pi, psi)?) {
            return Ok(EntailVerdict::Refuted(Box::new(pi)));
        }
    }
    Ok(EntailVerdict::HoldsOnSample { checked })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse;
    use crate::semiring::{nat_value, rat_value};

    fn pi_b() -> Interpretation {
        Interpretation::parse("semiring: viterbi\nuniverse: a b\nR(a) = 1/2\nR(b) = 1/4\n", None).unwrap()
    }

    #[test]
    fn viterbi_universal() {
        let f = parse("A x. R(x)").unwrap();
        assert_eq!(eval(&pi_b(), &f).unwrap(), rat_value(1, 8));
        assert_eq!(eval(&pi_b().restrict(&[0]).unwrap(), &f).unwrap(), rat_value(1, 2));
    }

    #[test]
    fn equality_literals() {
        let pi = pi_b();
        assert_eq!(eval(&pi, &parse("#1 = #1").unwrap()).unwrap(), rat_value(1, 1));
        assert_eq!(eval(&pi, &parse("#1 = #2").unwrap()).unwrap(), rat_value(0, 1));
    }

    #[test]
    fn nat_sum_and_product() {
        let pi = Interpretation::parse("semiring: nat\nuniverse: a b\nR(a) = 2\nR(b) = 3\n", None).unwrap();
        assert_eq!(eval(&pi, &parse("E x. R(x)").unwrap()).unwrap(), nat_value(5));
        assert_eq!(eval(&pi, &parse("A x. R(x)").unwrap()).unwrap(), nat_value(6));
    }

    #[test]
    fn distinct_quantifiers_skip_bound_elements() {
        let pi = pi_b();
        let f = parse("E x. E! y. R(x) & R(y)").unwrap();
        assert_eq!(eval(&pi, &f).unwrap(), rat_value(1, 8));
        let g = parse("E x. E! y [x]. R(y)").unwrap();
        assert_eq!(eval(&pi, &g).unwrap(), rat_value(1, 2));
    }

    #[test]
    fn sets_and_errors() {
        let pi = pi_b();
        assert_eq!(eval_set(&pi, &[]).unwrap(), rat_value(1, 1));
        assert!(matches!(eval(&pi, &parse("R(x)").unwrap()), Err(Error::Unbound(_))));
        assert!(eval(&pi, &parse("Q(#1)").unwrap()).is_err());
        assert!(eval(&pi, &parse("R(#3)").unwrap()).is_err());
    }

    #[test]
    fn entailment_examples() {
        let s3 = SemiringSpec::S3;
        let vals = [Value::Level(1), Value::Level(2)];
        let ex = parse("E x. R(x)").unwrap();
        let all = parse("A x. R(x)").unwrap();
        match entails_at(&[ex.clone()], &[all], &s3, 2, &vals).unwrap() {
            EntailVerdict::Refuted(pi) => {
                let r = [
                    pi.lit("R", &[0], false).unwrap().clone(),
                    pi.lit("R", &[1], false).unwrap().clone(),
                ];
                assert!(r.contains(&Value::Level(2)));
            }
            v => panic!("{v:?}"),
        }
        assert!(matches!(
            entails_at(&[ex.clone()], &[ex], &s3, 2, &vals).unwrap(),
            EntailVerdict::HoldsOnSample { .. }
        ));
    }
}
