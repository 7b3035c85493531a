//! Commutative semirings with exact carriers.

pub mod hom;
pub mod lattice;

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::provenance::poly::{NatPoly, SPoly};

pub use hom::{
    adjoin_bottom_hom, check_hom, find_weakly_separating_hom, s3_embedding, threshold_hom, HomMap, HomReport,
    SemiringHom, Threshold,
};
pub use lattice::FiniteLattice;

/// A semiring from the supported family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SemiringSpec {
    Boolean,
    /// The three-element min-max semiring `{0 < ε < 1}`, stored as levels 0, 1, 2.
    S3,
    /// Min-max semiring on the chain `0 < 1 < … < k-1`.
    Chain(u32),
    Lattice(Arc<FiniteLattice>),
    /// `([0,1], max, min, 0, 1)`
    Fuzzy,
    /// `([0,1], max, ·, 0, 1)`
    Viterbi,
    /// `(ℚ≥0 ∪ {∞}, min, +, ∞, 0)`
    Tropical,
    /// `([0,1], max, ⊙, 0, 1)` with `s ⊙ t = max(s+t−1, 0)`
    Lukasiewicz,
    /// `([0,1], min, ⊕, 1, 0)` with `s ⊕ t = min(s+t, 1)`
    Doubt,
    Nat,
    NatInf,
    NatPoly,
    SPoly,
}

/// Algebraic properties used to gate algorithms.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Flags {
    pub additively_idempotent: bool,
    pub absorptive: bool,
    pub multiplicatively_idempotent: bool,
    pub linearly_ordered: bool,
}

/// A value tagged with its carrier.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Bool(bool),
    /// Chain level or finite-lattice element id.
    Level(u32),
    Rat(BigRational),
    Nat(BigUint),
    /// `∞` of ℕ∞ and of the tropical semiring.
    Inf,
    NatPoly(NatPoly),
    SPoly(SPoly),
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_value(n: i64, d: i64) -> Value {
    Value::Rat(rat(n, d))
}

pub fn nat_value(n: u64) -> Value {
    Value::Nat(BigUint::from(n))
}

fn mismatch(spec: &SemiringSpec, v: &Value) -> Error {
    Error::CarrierMismatch(format!("{v:?} is not an element of {}", spec.name()))
}

impl SemiringSpec {
    pub fn chain(k: u32) -> Result<SemiringSpec> {
        if k < 2 {
            return Err(Error::Invalid(format!("chain:{k} needs at least 2 levels")));
        }
        Ok(SemiringSpec::Chain(k))
    }

    pub fn lattice(l: FiniteLattice) -> SemiringSpec {
        SemiringSpec::Lattice(Arc::new(l))
    }

    /// Parses a CLI semiring identifier. `lattice:<file>` reads the file;
    /// `spoly:<n>` ignores `n` here (it sizes the canonical interpretation).
    pub fn parse(id: &str) -> Result<SemiringSpec> {
        let id = id.trim();
        if let Some(k) = id.strip_prefix("chain:") {
            let k: u32 = k
                .parse()
                .map_err(|_| Error::Invalid(format!("bad chain length `{k}`")))?;
            return SemiringSpec::chain(k);
        }
        if let Some(path) = id.strip_prefix("lattice:") {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Invalid(format!("cannot read {path}: {e}")))?;
            return Ok(SemiringSpec::lattice(FiniteLattice::parse(&text)?));
        }
        if let Some(n) = id.strip_prefix("spoly:") {
            n.parse::<usize>()
                .map_err(|_| Error::Invalid(format!("bad spoly size `{n}`")))?;
            return Ok(SemiringSpec::SPoly);
        }
        Ok(match id {
            "boolean" => SemiringSpec::Boolean,
            "s3" => SemiringSpec::S3,
            "fuzzy" => SemiringSpec::Fuzzy,
            "viterbi" => SemiringSpec::Viterbi,
            "tropical" => SemiringSpec::Tropical,
            "lukasiewicz" => SemiringSpec::Lukasiewicz,
            "doubt" => SemiringSpec::Doubt,
            "nat" => SemiringSpec::Nat,
            "natinf" => SemiringSpec::NatInf,
            "natpoly" => SemiringSpec::NatPoly,
            "spoly" => SemiringSpec::SPoly,
            _ => return Err(Error::Invalid(format!("unknown semiring `{id}`"))),
        })
    }

    pub fn name(&self) -> String {
        match self {
            SemiringSpec::Boolean => "boolean".into(),
            SemiringSpec::S3 => "s3".into(),
            SemiringSpec::Chain(k) => format!("chain:{k}"),
            SemiringSpec::Lattice(l) => format!("lattice({} elements)", l.len()),
            SemiringSpec::Fuzzy => "fuzzy".into(),
            SemiringSpec::Viterbi => "viterbi".into(),
            SemiringSpec::Tropical => "tropical".into(),
            SemiringSpec::Lukasiewicz => "lukasiewicz".into(),
            SemiringSpec::Doubt => "doubt".into(),
            SemiringSpec::Nat => "nat".into(),
            SemiringSpec::NatInf => "natinf".into(),
            SemiringSpec::NatPoly => "natpoly".into(),
            SemiringSpec::SPoly => "spoly".into(),
        }
    }

    pub fn flags(&self) -> Flags {
        use SemiringSpec::*;
        let (ai, ab, mi, lin) = match self {
            Boolean | S3 | Chain(_) | Fuzzy => (true, true, true, true),
            Lattice(l) => (true, true, true, l.is_chain()),
            Viterbi | Tropical | Lukasiewicz | Doubt => (true, true, false, true),
            Nat | NatInf => (false, false, false, true),
            NatPoly => (false, false, false, false),
            SPoly => (true, true, false, false),
        };
        Flags {
            additively_idempotent: ai,
            absorptive: ab,
            multiplicatively_idempotent: mi,
            linearly_ordered: lin,
        }
    }

    /// Lattice semirings: additively and multiplicatively idempotent and absorptive.
    pub fn is_lattice(&self) -> bool {
        let f = self.flags();
        f.absorptive && f.multiplicatively_idempotent
    }

    /// Addition is the maximum of a linear natural order.
    pub fn is_max_plus_like(&self) -> bool {
        let f = self.flags();
        f.additively_idempotent && f.linearly_ordered
    }

    fn levels(&self) -> Option<u32> {
        match self {
            SemiringSpec::S3 => Some(3),
            SemiringSpec::Chain(k) => Some(*k),
            SemiringSpec::Lattice(l) => Some(l.len() as u32),
            _ => None,
        }
    }

    pub fn zero(&self) -> Value {
        use SemiringSpec::*;
        match self {
            Boolean => Value::Bool(false),
            S3 | Chain(_) => Value::Level(0),
            Lattice(l) => Value::Level(l.bottom()),
            Fuzzy | Viterbi | Lukasiewicz => Value::Rat(BigRational::zero()),
            Doubt => Value::Rat(BigRational::one()),
            Tropical => Value::Inf,
            Nat | NatInf => Value::Nat(BigUint::zero()),
            NatPoly => Value::NatPoly(crate::provenance::poly::NatPoly::zero()),
            SPoly => Value::SPoly(crate::provenance::poly::SPoly::zero()),
        }
    }

    pub fn one(&self) -> Value {
        use SemiringSpec::*;
        match self {
            Boolean => Value::Bool(true),
            S3 => Value::Level(2),
            Chain(k) => Value::Level(k - 1),
            Lattice(l) => Value::Level(l.top()),
            Fuzzy | Viterbi | Lukasiewicz => Value::Rat(BigRational::one()),
            Doubt | Tropical => Value::Rat(BigRational::zero()),
            Nat | NatInf => Value::Nat(BigUint::one()),
            NatPoly => Value::NatPoly(crate::provenance::poly::NatPoly::one()),
            SPoly => Value::SPoly(crate::provenance::poly::SPoly::one()),
        }
    }

    /// The middle element ε of S₃.
    pub fn eps() -> Value {
        Value::Level(1)
    }

    /// Whether `v` is an element of this carrier.
    pub fn contains(&self, v: &Value) -> bool {
        use SemiringSpec::*;
        let unit = |r: &BigRational| !r.is_negative() && *r <= BigRational::one();
        match (self, v) {
            (Boolean, Value::Bool(_)) => true,
            (S3 | Chain(_) | Lattice(_), Value::Level(l)) => *l < self.levels().unwrap(),
            (Fuzzy | Viterbi | Lukasiewicz | Doubt, Value::Rat(r)) => unit(r),
            (Tropical, Value::Rat(r)) => !r.is_negative(),
            (Tropical, Value::Inf) => true,
            (Nat, Value::Nat(_)) => true,
            (NatInf, Value::Nat(_) | Value::Inf) => true,
            (NatPoly, Value::NatPoly(_)) => true,
            (SPoly, Value::SPoly(_)) => true,
            _ => false,
        }
    }

    pub fn check(&self, v: &Value) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(mismatch(self, v))
        }
    }

    pub fn try_add(&self, a: &Value, b: &Value) -> Result<Value> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add(a, b))
    }

    pub fn try_mul(&self, a: &Value, b: &Value) -> Result<Value> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    /// Semiring addition. Panics on a carrier mismatch; use [`Self::try_add`]
    /// for unchecked input.
    pub fn add(&self, a: &Value, b: &Value) -> Value {
        use SemiringSpec::*;
        match (self, a, b) {
            (Boolean, Value::Bool(x), Value::Bool(y)) => Value::Bool(*x || *y),
            (S3 | Chain(_), Value::Level(x), Value::Level(y)) => Value::Level(*x.max(y)),
            (Lattice(l), Value::Level(x), Value::Level(y)) => Value::Level(l.join(*x, *y)),
            (Fuzzy | Viterbi | Lukasiewicz, Value::Rat(x), Value::Rat(y)) => Value::Rat(x.max(y).clone()),
            (Doubt, Value::Rat(x), Value::Rat(y)) => Value::Rat(x.min(y).clone()),
            (Tropical, Value::Inf, o) | (Tropical, o, Value::Inf) => o.clone(),
            (Tropical, Value::Rat(x), Value::Rat(y)) => Value::Rat(x.min(y).clone()),
            (Nat | NatInf, Value::Nat(x), Value::Nat(y)) => Value::Nat(x + y),
            (NatInf, Value::Inf, _) | (NatInf, _, Value::Inf) => Value::Inf,
            (NatPoly, Value::NatPoly(x), Value::NatPoly(y)) => Value::NatPoly(x.add(y)),
            (SPoly, Value::SPoly(x), Value::SPoly(y)) => Value::SPoly(x.add(y)),
            _ => panic!("{}", mismatch(self, if self.contains(a) { b } else { a })),
        }
    }

    /// Semiring multiplication. Panics on a carrier mismatch.
    pub fn mul(&self, a: &Value, b: &Value) -> Value {
        use SemiringSpec::*;
        match (self, a, b) {
            (Boolean, Value::Bool(x), Value::Bool(y)) => Value::Bool(*x && *y),
            (S3 | Chain(_), Value::Level(x), Value::Level(y)) => Value::Level(*x.min(y)),
            (Lattice(l), Value::Level(x), Value::Level(y)) => Value::Level(l.meet(*x, *y)),
            (Fuzzy, Value::Rat(x), Value::Rat(y)) => Value::Rat(x.min(y).clone()),
            (Viterbi, Value::Rat(x), Value::Rat(y)) => Value::Rat(x * y),
            (Lukasiewicz, Value::Rat(x), Value::Rat(y)) => {
                let s = x + y - BigRational::one();
                Value::Rat(if s.is_negative() { BigRational::zero() } else { s })
            }
            (Doubt, Value::Rat(x), Value::Rat(y)) => {
                let s = x + y;
                Value::Rat(if s > BigRational::one() { BigRational::one() } else { s })
            }
            (Tropical, Value::Inf, _) | (Tropical, _, Value::Inf) => Value::Inf,
            (Tropical, Value::Rat(x), Value::Rat(y)) => Value::Rat(x + y),
            (Nat | NatInf, Value::Nat(x), Value::Nat(y)) => Value::Nat(x * y),
            (NatInf, Value::Inf, Value::Nat(x)) | (NatInf, Value::Nat(x), Value::Inf) => {
                if x.is_zero() {
                    Value::Nat(BigUint::zero())
                } else {
                    Value::Inf
                }
            }
            (NatInf, Value::Inf, Value::Inf) => Value::Inf,
            (NatPoly, Value::NatPoly(x), Value::NatPoly(y)) => Value::NatPoly(x.mul(y)),
            (SPoly, Value::SPoly(x), Value::SPoly(y)) => Value::SPoly(x.mul(y)),
            _ => panic!("{}", mismatch(self, if self.contains(a) { b } else { a })),
        }
    }

    pub fn sum<'a>(&self, vals: impl IntoIterator<Item = &'a Value>) -> Value {
        vals.into_iter().fold(self.zero(), |acc, v| self.add(&acc, v))
    }

    pub fn prod<'a>(&self, vals: impl IntoIterator<Item = &'a Value>) -> Value {
        vals.into_iter().fold(self.one(), |acc, v| self.mul(&acc, v))
    }

    pub fn big_sum(&self, vals: &[Value]) -> Result<Value> {
        vals.iter().try_fold(self.zero(), |acc, v| self.try_add(&acc, v))
    }

    pub fn big_prod(&self, vals: &[Value]) -> Result<Value> {
        vals.iter().try_fold(self.one(), |acc, v| self.try_mul(&acc, v))
    }

    pub fn is_zero(&self, v: &Value) -> bool {
        *v == self.zero()
    }

    pub fn is_one(&self, v: &Value) -> bool {
        *v == self.one()
    }

    /// The natural order `s ≤ t ⇔ ∃r. s + r = t`.
    pub fn leq(&self, a: &Value, b: &Value) -> bool {
        use SemiringSpec::*;
        match (self, a, b) {
            (Boolean, Value::Bool(x), Value::Bool(y)) => !*x || *y,
            (S3 | Chain(_), Value::Level(x), Value::Level(y)) => x <= y,
            (Lattice(l), Value::Level(x), Value::Level(y)) => l.leq(*x, *y),
            (Fuzzy | Viterbi | Lukasiewicz, Value::Rat(x), Value::Rat(y)) => x <= y,
            (Doubt, Value::Rat(x), Value::Rat(y)) => x >= y,
            (Tropical, _, Value::Rat(_)) if matches!(a, Value::Inf) => true,
            (Tropical, Value::Rat(_), Value::Inf) => false,
            (Tropical, Value::Inf, Value::Inf) => true,
            (Tropical, Value::Rat(x), Value::Rat(y)) => x >= y,
            (Nat | NatInf, Value::Nat(x), Value::Nat(y)) => x <= y,
            (NatInf, _, Value::Inf) => true,
            (NatInf, Value::Inf, Value::Nat(_)) => false,
            (NatPoly, Value::NatPoly(x), Value::NatPoly(y)) => x.leq(y),
            (SPoly, Value::SPoly(x), Value::SPoly(y)) => x.leq(y),
            _ => panic!("{}", mismatch(self, if self.contains(a) { b } else { a })),
        }
    }

    pub fn lt(&self, a: &Value, b: &Value) -> bool {
        a != b && self.leq(a, b)
    }

    /// Natural-order maximum of two comparable values (linear orders only).
    pub fn max<'a>(&self, a: &'a Value, b: &'a Value) -> &'a Value {
        if self.leq(a, b) {
            b
        } else {
            a
        }
    }

    /// All carrier elements, for finite carriers.
    pub fn elements(&self) -> Option<Vec<Value>> {
        match self {
            SemiringSpec::Boolean => Some(vec![Value::Bool(false), Value::Bool(true)]),
            _ => self.levels().map(|k| (0..k).map(Value::Level).collect()),
        }
    }

    /// Parses a value written in the carrier's textual syntax.
    pub fn parse_value(&self, text: &str) -> Result<Value> {
        use SemiringSpec::*;
        let t = text.trim();
        let bad = || Error::Invalid(format!("`{t}` is not a value of {}", self.name()));
        let v = match self {
            Boolean => match t {
                "0" | "false" => Value::Bool(false),
                "1" | "true" => Value::Bool(true),
                _ => return Err(bad()),
            },
            S3 => match t {
                "0" => Value::Level(0),
                "e" | "eps" | "ε" => Value::Level(1),
                "1" => Value::Level(2),
                _ => return Err(bad()),
            },
            Chain(_) => Value::Level(t.parse().map_err(|_| bad())?),
            Lattice(l) => Value::Level(l.index_of(t).ok_or_else(bad)?),
            Fuzzy | Viterbi | Lukasiewicz | Doubt => Value::Rat(parse_rat(t).ok_or_else(bad)?),
            Tropical => match t {
                "inf" | "∞" => Value::Inf,
                _ => Value::Rat(parse_rat(t).ok_or_else(bad)?),
            },
            Nat | NatInf => match t {
                "inf" | "∞" if *self == NatInf => Value::Inf,
                _ => Value::Nat(t.parse().map_err(|_| bad())?),
            },
            NatPoly | SPoly => return Err(bad()),
        };
        self.check(&v)?;
        Ok(v)
    }

    /// Formats a value in the carrier's textual syntax.
    pub fn show(&self, v: &Value) -> String {
        match (self, v) {
            (SemiringSpec::S3, Value::Level(l)) => ["0", "e", "1"][*l as usize].to_string(),
            (SemiringSpec::Lattice(lat), Value::Level(l)) => lat.name(*l).to_string(),
            _ => v.to_string(),
        }
    }
}

/// Parses `p/q` or an integer into a rational.
pub fn parse_rat(t: &str) -> Option<BigRational> {
    let t = t.trim();
    match t.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p, q))
        }
        None => Some(BigRational::from_integer(t.parse().ok()?)),
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{}", if *b { 1 } else { 0 }),
            Value::Level(l) => write!(f, "{l}"),
            Value::Rat(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Value::Nat(n) => write!(f, "{n}"),
            Value::Inf => write!(f, "inf"),
            Value::NatPoly(p) => write!(f, "{p}"),
            Value::SPoly(p) => write!(f, "{p}"),
        }
    }
}

impl fmt::Display for SemiringSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn viterbi_product() {
        let v = SemiringSpec::Viterbi;
        assert_eq!(v.mul(&rat_value(1, 2), &rat_value(1, 2)), rat_value(1, 4));
    }

    #[test]
    fn lukasiewicz_truncates() {
        let l = SemiringSpec::Lukasiewicz;
        assert_eq!(l.mul(&rat_value(1, 2), &rat_value(1, 3)), rat_value(0, 1));
    }

    #[test]
    fn natinf_sums() {
        let s = SemiringSpec::NatInf;
        assert_eq!(
            s.big_sum(&[nat_value(2), nat_value(3), Value::Inf]).unwrap(),
            Value::Inf
        );
        assert_eq!(s.big_sum(&[]).unwrap(), nat_value(0));
        assert_eq!(s.mul(&Value::Inf, &nat_value(0)), nat_value(0));
    }

    #[test]
    fn natural_orders() {
        assert!(SemiringSpec::Doubt.leq(&rat_value(7, 10), &rat_value(3, 10)));
        assert!(!SemiringSpec::Nat.leq(&nat_value(3), &nat_value(2)));
        for s in [
            SemiringSpec::Tropical,
            SemiringSpec::Doubt,
            SemiringSpec::Viterbi,
            SemiringSpec::S3,
        ] {
            assert!(s.leq(&s.zero(), &s.one()));
        }
        assert!(SemiringSpec::Tropical.leq(&rat_value(5, 1), &rat_value(2, 1)));
    }

    #[test]
    fn mismatch_is_reported() {
        let err = SemiringSpec::Viterbi.try_add(&Value::Bool(true), &rat_value(1, 2));
        assert!(matches!(err, Err(Error::CarrierMismatch(_))));
        assert!(SemiringSpec::Fuzzy.parse_value("3/2").is_err());
    }

    #[test]
    fn parse_and_show() {
        let s3 = SemiringSpec::parse("s3").unwrap();
        assert_eq!(s3.parse_value("e").unwrap(), SemiringSpec::eps());
        assert_eq!(s3.show(&SemiringSpec::eps()), "e");
        assert_eq!(SemiringSpec::Viterbi.parse_value("2/4").unwrap().to_string(), "1/2");
        assert_eq!(SemiringSpec::parse("chain:4").unwrap(), SemiringSpec::Chain(4));
        assert!(SemiringSpec::parse("nope").is_err());
    }
}
