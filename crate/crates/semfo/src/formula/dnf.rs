use std::collections::BTreeSet;

use super::ast::{big_and, big_or, Formula, Var};
use super::transform::{fresh_var, rename_free, standardize_apart};
use crate::error::{Error, Result};

/// One disjunct `∃≠z₁[S₁] … ∃≠zₖ[Sₖ] (L₁ ∧ … ∧ Lₘ)` of an existential prenex DNF.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disjunct {
    pub prefix: Vec<(Var, Vec<Var>)>,
    pub lits: Vec<Formula>,
}

impl Disjunct {
    pub fn bound(&self) -> impl Iterator<Item = &Var> {
        self.prefix.iter().map(|(v, _)| v)
    }

    /// Some literal mentions `y`.
    pub fn mentions(&self, y: &str) -> bool {
        self.lits.iter().any(|l| l.free_vars().contains(y))
    }

    pub fn to_formula(&self) -> Formula {
        let matrix = big_and(self.lits.iter().cloned());
        self.prefix.iter().rev().fold(matrix, |acc, (v, s)| {
            Formula::ExistsD(v.clone(), s.clone(), Box::new(acc))
        })
    }

    fn rename(&self, from: &str, to: &str) -> Disjunct {
        Disjunct {
            prefix: self
                .prefix
                .iter()
                .map(|(v, s)| {
                    let v = if v == from { to.to_string() } else { v.clone() };
                    let mut s: Vec<Var> = s
                        .iter()
                        .map(|x| if x == from { to.to_string() } else { x.clone() })
                        .collect();
                    s.sort();
                    (v, s)
                })
                .collect(),
            lits: self.lits.iter().map(|l| rename_free(l, from, to)).collect(),
        }
    }
}

/// `⋁ᵢ ∃≠z̄ᵢ θᵢ` with each `θᵢ` a conjunction of literals; empty means `⊥`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrenexDnf {
    pub disjuncts: Vec<Disjunct>,
}

impl PrenexDnf {
    pub fn to_formula(&self) -> Formula {
        big_or(self.disjuncts.iter().map(Disjunct::to_formula))
    }
}

/// Rewrites a universal-free FO≠ formula into an existential prenex DNF.
/// Because every quantifier keeps its exclusion set, the result is
/// equivalent in every semiring.
pub fn existential_prenex_dnf(f: &Formula) -> Result<PrenexDnf> {
    if f.has_universal() {
        return Err(Error::Invalid(
            "existential_prenex_dnf: universal quantifier found".into(),
        ));
    }
    if !f.is_foneq() {
        return Err(Error::Flavor("existential_prenex_dnf expects an FO≠ formula".into()));
    }
    let f = standardize_apart(f);
    let mut used = f.all_vars();
    Ok(PrenexDnf {
        disjuncts: dnf(&f, &mut used),
    })
}

fn dnf(f: &Formula, used: &mut BTreeSet<Var>) -> Vec<Disjunct> {
    match f {
        Formula::True => vec![Disjunct {
            prefix: vec![],
            lits: vec![],
        }],
        Formula::False => vec![],
        Formula::Or(a, b) => {
            let mut out = dnf(a, used);
            out.extend(dnf(b, used));
            out
        }
        Formula::And(a, b) => {
            let da = dnf(a, used);
            let db = dnf(b, used);
            let mut out = Vec::new();
            for x in &da {
                for y in &db {
                    let mut y = y.clone();
                    let clash: Vec<Var> = y.bound().filter(|v| x.bound().any(|w| w == *v)).cloned().collect();
                    for v in clash {
                        let w = fresh_var(&v, used);
                        used.insert(w.clone());
                        y = y.rename(&v, &w);
                    }
                    let mut prefix = x.prefix.clone();
                    prefix.extend(y.prefix);
                    let mut lits = x.lits.clone();
                    lits.extend(y.lits);
                    out.push(Disjunct { prefix, lits });
                }
            }
            out
        }
        Formula::ExistsD(v, s, b) => dnf(b, used)
            .into_iter()
            .map(|mut d| {
                d.prefix.insert(0, (v.clone(), s.clone()));
                d
            })
            .collect(),
        _ => vec![Disjunct {
            prefix: vec![],
            lits: vec![f.clone()],
        }],
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse;
    use super::*;

    #[test]
    fn base_case() {
        let d = existential_prenex_dnf(&parse("R(x) | Q(x)").unwrap()).unwrap();
        assert_eq!(d.disjuncts.len(), 2);
        assert!(d.disjuncts.iter().all(|x| x.prefix.is_empty()));
    }

    #[test]
    fn conjunction_of_existentials() {
        let d = existential_prenex_dnf(&parse("(E! z. R(z)) & E! u. Q(u)").unwrap()).unwrap();
        assert_eq!(d.disjuncts.len(), 1);
        assert_eq!(d.to_formula().to_string(), "E! z. E! u []. R(z) & Q(u)");
    }

    #[test]
    fn clashing_names_are_renamed() {
        let d = existential_prenex_dnf(&parse("(E! z. R(z)) & ((E! z. Q(z)) | P(y))").unwrap()).unwrap();
        assert_eq!(
            d.to_formula().to_string(),
            "(E! z. E! z1 []. R(z) & Q(z1)) | E! z []. R(z) & P(y)"
        );
    }

    #[test]
    fn rejects_universal() {
        assert!(existential_prenex_dnf(&parse("A! y. R(y)").unwrap()).is_err());
    }
}
