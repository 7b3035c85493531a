use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};

/// A provenance variable: either the token `x_L` of an instantiated literal
/// over `[n]`, or a free-standing named variable (used after identifying
/// variables, e.g. all `x_R(i)` with a single `x`).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PVar {
    Lit { rel: Arc<str>, args: Vec<u32>, neg: bool },
    Named(Arc<str>),
}

impl PVar {
    pub fn lit(rel: &str, args: Vec<u32>, neg: bool) -> PVar {
        PVar::Lit {
            rel: Arc::from(rel),
            args,
            neg,
        }
    }

    pub fn named(name: &str) -> PVar {
        PVar::Named(Arc::from(name))
    }

    /// The variable of the complementary literal, if this is a literal token.
    pub fn dual(&self) -> Option<PVar> {
        match self {
            PVar::Lit { rel, args, neg } => Some(PVar::Lit {
                rel: rel.clone(),
                args: args.clone(),
                neg: !neg,
            }),
            PVar::Named(_) => None,
        }
    }

    /// Elements (0-based ids) mentioned by the variable.
    pub fn elements(&self) -> &[u32] {
        match self {
            PVar::Lit { args, .. } => args,
            PVar::Named(_) => &[],
        }
    }
}

impl fmt::Display for PVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PVar::Lit { rel, args, neg } => {
                write!(f, "x[{}{}(", if *neg { "~" } else { "" }, rel)?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{}", a + 1)?;
                }
                write!(f, ")]")
            }
            PVar::Named(n) => write!(f, "{n}"),
        }
    }
}

/// A monomial as a sorted list of (variable, positive exponent) pairs.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<(PVar, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn var(v: PVar) -> Monomial {
        Monomial(vec![(v, 1)])
    }

    pub fn from_pairs(mut pairs: Vec<(PVar, u32)>) -> Monomial {
        pairs.retain(|(_, e)| *e > 0);
        pairs.sort();
        let mut out: Vec<(PVar, u32)> = Vec::with_capacity(pairs.len());
        for (v, e) in pairs {
            match out.last_mut() {
                Some((w, f)) if *w == v => *f = checked_exp(*f, e),
                _ => out.push((v, e)),
            }
        }
        Monomial(out)
    }

    pub fn pairs(&self) -> &[(PVar, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|(_, e)| *e as u64).sum()
    }

    pub fn exponent(&self, v: &PVar) -> u32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(v))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0.clone(), checked_exp(a[i].1, b[j].1)));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self` divides `other`, i.e. `other = m · self` for some monomial `m`.
    pub fn divides(&self, other: &Monomial) -> bool {
        let mut j = 0;
        for (v, e) in &self.0 {
            while j < other.0.len() && other.0[j].0 < *v {
                j += 1;
            }
            if j == other.0.len() || other.0[j].0 != *v || other.0[j].1 < *e {
                return false;
            }
        }
        true
    }

    /// Contains both `x_α` and `x_¬α`; such a monomial is zero in the quotient.
    pub fn has_conflict(&self) -> bool {
        self.0.iter().any(|(v, _)| match v.dual() {
            Some(d) => self.exponent(&d) > 0,
            None => false,
        })
    }

    pub fn vars(&self) -> impl Iterator<Item = &PVar> {
        self.0.iter().map(|(v, _)| v)
    }

    pub fn rename(&self, f: &impl Fn(&PVar) -> PVar) -> Monomial {
        Monomial::from_pairs(self.0.iter().map(|(v, e)| (f(v), *e)).collect())
    }
}

fn checked_exp(a: u32, b: u32) -> u32 {
    a.checked_add(b).expect("monomial exponent overflow (cap 2^32)")
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, (v, e)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "*")?;
            }
            if *e == 1 {
                write!(f, "{v}")?;
            } else {
                write!(f, "{v}^{e}")?;
            }
        }
        Ok(())
    }
}

/// `m1` absorbs `m2` iff `m2 = m · m1`.
pub fn absorbs(m1: &Monomial, m2: &Monomial) -> bool {
    m1.divides(m2)
}

/// Element of the absorptive semiring S(X⁺, X⁻): an antichain of monomials
/// under absorption, with monomials containing dual variables removed.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct SPoly(BTreeSet<Monomial>);

impl SPoly {
    pub fn zero() -> SPoly {
        SPoly(BTreeSet::new())
    }

    pub fn one() -> SPoly {
        SPoly::from_monomial(Monomial::one())
    }

    pub fn var(v: PVar) -> SPoly {
        SPoly::from_monomial(Monomial::var(v))
    }

    pub fn from_monomial(m: Monomial) -> SPoly {
        let mut s = BTreeSet::new();
        if !m.has_conflict() {
            s.insert(m);
        }
        SPoly(s)
    }

    pub fn from_monomials(ms: impl IntoIterator<Item = Monomial>) -> SPoly {
        SPoly(prune(ms.into_iter().filter(|m| !m.has_conflict()).collect()))
    }

    pub fn monomials(&self) -> impl Iterator<Item = &Monomial> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0.iter().next().unwrap().is_one()
    }

    pub fn add(&self, other: &SPoly) -> SPoly {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        SPoly(prune(self.0.union(&other.0).cloned().collect()))
    }

    pub fn mul(&self, other: &SPoly) -> SPoly {
        let mut out = BTreeSet::new();
        for a in &self.0 {
            for b in &other.0 {
                let m = a.mul(b);
                if !m.has_conflict() {
                    out.insert(m);
                }
            }
        }
        SPoly(prune(out))
    }

    /// Natural order: `self ≤ other` iff every monomial of `self` is absorbed
    /// by some monomial of `other` (so that `self + other = other`).
    pub fn leq(&self, other: &SPoly) -> bool {
        self.0.iter().all(|m| other.0.iter().any(|o| absorbs(o, m)))
    }

    pub fn is_antichain(&self) -> bool {
        for a in &self.0 {
            for b in &self.0 {
                if a != b && absorbs(a, b) {
                    return false;
                }
            }
        }
        true
    }

    pub fn support(&self) -> BTreeSet<PVar> {
        self.0.iter().flat_map(|m| m.vars().cloned()).collect()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn rename(&self, f: &impl Fn(&PVar) -> PVar) -> SPoly {
        SPoly::from_monomials(self.0.iter().map(|m| m.rename(f)))
    }
}

fn prune(set: BTreeSet<Monomial>) -> BTreeSet<Monomial> {
    let v: Vec<Monomial> = set.into_iter().collect();
    let mut keep = vec![true; v.len()];
    for i in 0..v.len() {
        for j in 0..v.len() {
            if i != j && keep[j] && absorbs(&v[j], &v[i]) {
                keep[i] = false;
                break;
            }
        }
    }
    v.into_iter().zip(keep).filter_map(|(m, k)| k.then_some(m)).collect()
}

impl fmt::Display for SPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

/// Element of ℕ[X].
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct NatPoly(BTreeMap<Monomial, BigUint>);

impl NatPoly {
    pub fn zero() -> NatPoly {
        NatPoly(BTreeMap::new())
    }

    pub fn one() -> NatPoly {
        NatPoly::constant(BigUint::one())
    }

    pub fn constant(c: BigUint) -> NatPoly {
        NatPoly::term(c, Monomial::one())
    }

    pub fn var(v: PVar) -> NatPoly {
        NatPoly::term(BigUint::one(), Monomial::var(v))
    }

    pub fn term(c: BigUint, m: Monomial) -> NatPoly {
        let mut map = BTreeMap::new();
        if !c.is_zero() {
            map.insert(m, c);
        }
        NatPoly(map)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigUint)> {
        self.0.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.0.len() == 1 && self.0.iter().next().map(|(m, c)| m.is_one() && c.is_one()).unwrap()
    }

    pub fn add(&self, other: &NatPoly) -> NatPoly {
        let mut out = self.0.clone();
        for (m, c) in &other.0 {
            *out.entry(m.clone()).or_insert_with(BigUint::zero) += c;
        }
        NatPoly(out)
    }

    pub fn mul(&self, other: &NatPoly) -> NatPoly {
        let mut out: BTreeMap<Monomial, BigUint> = BTreeMap::new();
        for (a, c) in &self.0 {
            for (b, d) in &other.0 {
                *out.entry(a.mul(b)).or_insert_with(BigUint::zero) += c * d;
            }
        }
        NatPoly(out)
    }

    /// Natural order of ℕ[X]: coefficient-wise comparison.
    pub fn leq(&self, other: &NatPoly) -> bool {
        self.0.iter().all(|(m, c)| other.0.get(m).is_some_and(|d| c <= d))
    }

    pub fn degree(&self) -> u64 {
        self.0.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn support(&self) -> BTreeSet<PVar> {
        self.0.keys().flat_map(|m| m.vars().cloned()).collect()
    }

    /// Applies a variable renaming (possibly identifying variables).
    pub fn rename(&self, f: &impl Fn(&PVar) -> PVar) -> NatPoly {
        let mut out = NatPoly::zero();
        for (m, c) in &self.0 {
            out = out.add(&NatPoly::term(c.clone(), m.rename(f)));
        }
        out
    }
}

impl fmt::Display for NatPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if m.is_one() {
                write!(f, "{c}")?;
            } else if c.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{c}*{m}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> PVar {
        PVar::named("x")
    }
    fn y() -> PVar {
        PVar::named("y")
    }

    #[test]
    fn smaller_exponents_absorb() {
        let x2y = Monomial::from_pairs(vec![(x(), 2), (y(), 1)]);
        let xy = Monomial::from_pairs(vec![(x(), 1), (y(), 1)]);
        let p = SPoly::from_monomial(x2y).add(&SPoly::from_monomial(xy.clone()));
        assert_eq!(p, SPoly::from_monomial(xy));
    }

    #[test]
    fn dual_variables_annihilate() {
        let a = PVar::lit("R", vec![0], false);
        let p = SPoly::var(a.clone()).mul(&SPoly::var(a.dual().unwrap()));
        assert!(p.is_zero());
    }

    #[test]
    fn neutral_elements() {
        let p = SPoly::var(x()).add(&SPoly::var(y()));
        assert_eq!(p.add(&SPoly::zero()), p);
        assert_eq!(p.mul(&SPoly::one()), p);
        let q = NatPoly::var(x()).add(&NatPoly::var(x()));
        assert_eq!(q.to_string(), "2*x");
        assert_eq!(q.mul(&NatPoly::one()), q);
    }

    #[test]
    fn display_is_canonical() {
        let p = SPoly::var(y()).add(&SPoly::var(x()));
        assert_eq!(p.to_string(), "x + y");
        let m = Monomial::from_pairs(vec![(PVar::lit("R", vec![1, 0], true), 3)]);
        assert_eq!(m.to_string(), "x[~R(2,1)]^3");
    }
}
