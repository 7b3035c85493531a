use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

pub type Var = String;

/// A term: a variable or a universe element (0-based id, printed `#k` 1-based).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    Const(u32),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

/// Negation normal form formula. Relation atoms carry a polarity flag.
///
/// `ExistsD(y, avoid, φ)` and `ForallD(y, avoid, φ)` are the FO≠ quantifiers:
/// `y` ranges over the elements not assigned to any variable in `avoid`. The
/// parser sets `avoid` to the free variables of `φ` other than `y`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom { rel: String, args: Vec<Term>, neg: bool },
    Eq(Term, Term),
    Neq(Term, Term),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Exists(Var, Box<Formula>),
    Forall(Var, Box<Formula>),
    ExistsD(Var, Vec<Var>, Box<Formula>),
    ForallD(Var, Vec<Var>, Box<Formula>),
}

/// Which quantifier family a formula uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    Fo,
    FoNeq,
}

/// `|ψ|` (node count), quantifier rank and universal nesting depth.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FormulaMetrics {
    pub size: usize,
    pub qr: usize,
    pub qr_forall: usize,
}

/// Relation symbols with arities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Vocabulary(BTreeMap<String, usize>);

impl Vocabulary {
    pub fn new() -> Vocabulary {
        Vocabulary(BTreeMap::new())
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, usize)>) -> Result<Vocabulary> {
        let mut v = Vocabulary::new();
        for (name, arity) in pairs {
            v.add(name, arity)?;
        }
        Ok(v)
    }

    /// Adds a symbol, rejecting arity 0 and conflicting re-declarations.
    pub fn add(&mut self, name: &str, arity: usize) -> Result<()> {
        if arity == 0 {
            return Err(Error::Invalid(format!("relation {name} must have arity >= 1")));
        }
        match self.0.get(name) {
            Some(&a) if a != arity => Err(Error::Arity {
                rel: name.to_string(),
                expected: a,
                found: arity,
            }),
            _ => {
                self.0.insert(name.to_string(), arity);
                Ok(())
            }
        }
    }

    pub fn arity(&self, name: &str) -> Option<usize> {
        self.0.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, usize)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn merge(&mut self, other: &Vocabulary) -> Result<()> {
        for (n, a) in other.iter() {
            self.add(n, a)?;
        }
        Ok(())
    }
}

pub fn atom(rel: &str, vars: &[&str]) -> Formula {
    Formula::Atom {
        rel: rel.to_string(),
        args: vars.iter().map(|v| Term::var(v)).collect(),
        neg: false,
    }
}

pub fn neg_atom(rel: &str, vars: &[&str]) -> Formula {
    Formula::Atom {
        rel: rel.to_string(),
        args: vars.iter().map(|v| Term::var(v)).collect(),
        neg: true,
    }
}

pub fn and(a: Formula, b: Formula) -> Formula {
    Formula::And(Box::new(a), Box::new(b))
}

pub fn or(a: Formula, b: Formula) -> Formula {
    Formula::Or(Box::new(a), Box::new(b))
}

pub fn exists(v: &str, body: Formula) -> Formula {
    Formula::Exists(v.to_string(), Box::new(body))
}

pub fn forall(v: &str, body: Formula) -> Formula {
    Formula::Forall(v.to_string(), Box::new(body))
}

/// `∃≠v body` with the default exclusion set.
pub fn exists_d(v: &str, body: Formula) -> Formula {
    let avoid = default_avoid(v, &body);
    Formula::ExistsD(v.to_string(), avoid, Box::new(body))
}

/// `∀≠v body` with the default exclusion set.
pub fn forall_d(v: &str, body: Formula) -> Formula {
    let avoid = default_avoid(v, &body);
    Formula::ForallD(v.to_string(), avoid, Box::new(body))
}

pub fn default_avoid(v: &str, body: &Formula) -> Vec<Var> {
    body.free_vars().into_iter().filter(|x| x != v).collect()
}

/// Left-folded conjunction; empty conjunction is `⊤`.
pub fn big_and(items: impl IntoIterator<Item = Formula>) -> Formula {
    items.into_iter().reduce(and).unwrap_or(Formula::True)
}

/// Left-folded disjunction; empty disjunction is `⊥`.
pub fn big_or(items: impl IntoIterator<Item = Formula>) -> Formula {
    items.into_iter().reduce(or).unwrap_or(Formula::False)
}

impl Formula {
    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::And(a, b) | Formula::Or(a, b) => vec![a, b],
            Formula::Exists(_, b) | Formula::Forall(_, b) | Formula::ExistsD(_, _, b) | Formula::ForallD(_, _, b) => {
                vec![b]
            }
            _ => vec![],
        }
    }

    pub fn is_quantifier(&self) -> bool {
        matches!(
            self,
            Formula::Exists(..) | Formula::Forall(..) | Formula::ExistsD(..) | Formula::ForallD(..)
        )
    }

    pub fn is_universal(&self) -> bool {
        matches!(self, Formula::Forall(..) | Formula::ForallD(..))
    }

    pub fn is_literal(&self) -> bool {
        matches!(
            self,
            Formula::Atom { .. } | Formula::Eq(..) | Formula::Neq(..) | Formula::True | Formula::False
        )
    }

    /// Free variables. The exclusion set of an FO≠ quantifier counts as free.
    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<Var>) {
        let add_term = |t: &Term, out: &mut BTreeSet<Var>| {
            if let Term::Var(v) = t {
                out.insert(v.clone());
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom { args, .. } => args.iter().for_each(|t| add_term(t, out)),
            Formula::Eq(a, b) | Formula::Neq(a, b) => {
                add_term(a, out);
                add_term(b, out);
            }
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
            Formula::Exists(v, b) | Formula::Forall(v, b) => {
                let mut inner = b.free_vars();
                inner.remove(v);
                out.extend(inner);
            }
            Formula::ExistsD(v, avoid, b) | Formula::ForallD(v, avoid, b) => {
                let mut inner = b.free_vars();
                inner.remove(v);
                out.extend(inner);
                out.extend(avoid.iter().cloned());
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Every variable name occurring anywhere (free, bound or excluded).
    pub fn all_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Atom { args, .. } => out.extend(args.iter().filter_map(|t| t.as_var().map(str::to_string))),
            Formula::Eq(a, b) | Formula::Neq(a, b) => {
                out.extend([a, b].iter().filter_map(|t| t.as_var().map(str::to_string)))
            }
            Formula::Exists(v, _) | Formula::Forall(v, _) => {
                out.insert(v.clone());
            }
            Formula::ExistsD(v, s, _) | Formula::ForallD(v, s, _) => {
                out.insert(v.clone());
                out.extend(s.iter().cloned());
            }
            _ => {}
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        for c in self.children() {
            c.visit(f);
        }
    }

    /// Relation symbols used, checking that arities are consistent.
    pub fn vocabulary(&self) -> Result<Vocabulary> {
        let mut voc = Vocabulary::new();
        let mut err = None;
        self.visit(&mut |f| {
            if let Formula::Atom { rel, args, .. } = f {
                if let Err(e) = voc.add(rel, args.len()) {
                    err.get_or_insert(e);
                }
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(voc),
        }
    }

    /// Node count: every AST node counts 1.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn qr(&self) -> usize {
        let inner = self.children().iter().map(|c| c.qr()).max().unwrap_or(0);
        inner + usize::from(self.is_quantifier())
    }

    pub fn qr_forall(&self) -> usize {
        let inner = self.children().iter().map(|c| c.qr_forall()).max().unwrap_or(0);
        inner + usize::from(self.is_universal())
    }

    pub fn metrics(&self) -> FormulaMetrics {
        FormulaMetrics {
            size: self.size(),
            qr: self.qr(),
            qr_forall: self.qr_forall(),
        }
    }

    fn any(&self, p: &impl Fn(&Formula) -> bool) -> bool {
        p(self) || self.children().iter().any(|c| c.any(p))
    }

    /// Contains no FO≠ quantifier.
    pub fn is_fo(&self) -> bool {
        !self.any(&|f| matches!(f, Formula::ExistsD(..) | Formula::ForallD(..)))
    }

    /// Contains no equality literal and no plain quantifier.
    pub fn is_foneq(&self) -> bool {
        !self.any(&|f| {
            matches!(
                f,
                Formula::Eq(..) | Formula::Neq(..) | Formula::Exists(..) | Formula::Forall(..)
            )
        })
    }

    pub fn flavor(&self) -> Result<Flavor> {
        if self.is_fo() {
            Ok(Flavor::Fo)
        } else if self.is_foneq() {
            Ok(Flavor::FoNeq)
        } else {
            Err(Error::Flavor("formula mixes FO and FO≠ constructs".into()))
        }
    }

    pub fn expect_flavor(&self, flavor: Flavor) -> Result<()> {
        let ok = match flavor {
            Flavor::Fo => self.is_fo(),
            Flavor::FoNeq => self.is_foneq(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Flavor(format!("expected {flavor:?} formula")))
        }
    }

    pub fn has_universal(&self) -> bool {
        self.any(&|f| f.is_universal())
    }

    pub fn has_existential(&self) -> bool {
        self.any(&|f| matches!(f, Formula::Exists(..) | Formula::ExistsD(..)))
    }

    pub fn is_quantifier_free(&self) -> bool {
        !self.any(&|f| f.is_quantifier())
    }

    /// Existential (Σ₁ in NNF): no universal quantifier.
    pub fn is_sigma1(&self) -> bool {
        !self.has_universal()
    }

    /// Universal (Π₁ in NNF): no existential quantifier.
    pub fn is_pi1(&self) -> bool {
        !self.has_existential()
    }

    /// Positive existential: Σ₁ without negated atoms or inequalities.
    pub fn is_sigma1_positive(&self) -> bool {
        self.is_sigma1() && !self.any(&|f| matches!(f, Formula::Atom { neg: true, .. } | Formula::Neq(..)))
    }

    /// NNF negation.
    pub fn negate(&self) -> Formula {
        match self {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Atom { rel, args, neg } => Formula::Atom {
                rel: rel.clone(),
                args: args.clone(),
                neg: !neg,
            },
            Formula::Eq(a, b) => Formula::Neq(a.clone(), b.clone()),
            Formula::Neq(a, b) => Formula::Eq(a.clone(), b.clone()),
            Formula::And(a, b) => or(a.negate(), b.negate()),
            Formula::Or(a, b) => and(a.negate(), b.negate()),
            Formula::Exists(v, b) => Formula::Forall(v.clone(), Box::new(b.negate())),
            Formula::Forall(v, b) => Formula::Exists(v.clone(), Box::new(b.negate())),
            Formula::ExistsD(v, s, b) => Formula::ForallD(v.clone(), s.clone(), Box::new(b.negate())),
            Formula::ForallD(v, s, b) => Formula::ExistsD(v.clone(), s.clone(), Box::new(b.negate())),
        }
    }

    /// Elements named by constants.
    pub fn constants(&self) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            let ts: Vec<&Term> = match f {
                Formula::Atom { args, .. } => args.iter().collect(),
                Formula::Eq(a, b) | Formula::Neq(a, b) => vec![a, b],
                _ => vec![],
            };
            for t in ts {
                if let Term::Const(c) = t {
                    out.insert(*c);
                }
            }
        });
        out
    }
}
