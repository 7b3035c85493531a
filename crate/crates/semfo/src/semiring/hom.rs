use std::fmt;
use std::sync::Arc;

use super::{rat_value, FiniteLattice, SemiringSpec, Value};
use crate::error::{precondition, Error, Result};

type MapFn = Arc<dyn Fn(&Value) -> Value + Send + Sync>;

/// How a homomorphism computes images.
#[derive(Clone)]
pub enum HomMap {
    /// Explicit table for finite carriers.
    Table(Vec<(Value, Value)>),
    /// Closed-form map.
    Func(MapFn),
}

impl fmt::Debug for HomMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HomMap::Table(t) => f.debug_tuple("Table").field(t).finish(),
            HomMap::Func(_) => f.write_str("Func(..)"),
        }
    }
}

/// A map between semirings, claimed to be a homomorphism. Use [`check_hom`]
/// to verify the claim.
#[derive(Clone, Debug)]
pub struct SemiringHom {
    pub source: SemiringSpec,
    pub target: SemiringSpec,
    pub name: String,
    pub map: HomMap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Threshold {
    GeqEps,
    GeqOne,
}

impl SemiringHom {
    pub fn from_table(
        source: SemiringSpec,
        target: SemiringSpec,
        name: &str,
        table: Vec<(Value, Value)>,
    ) -> SemiringHom {
        SemiringHom {
            source,
            target,
            name: name.to_string(),
            map: HomMap::Table(table),
        }
    }

    pub fn from_fn(
        source: SemiringSpec,
        target: SemiringSpec,
        name: &str,
        f: impl Fn(&Value) -> Value + Send + Sync + 'static,
    ) -> SemiringHom {
        SemiringHom {
            source,
            target,
            name: name.to_string(),
            map: HomMap::Func(Arc::new(f)),
        }
    }

    pub fn apply(&self, v: &Value) -> Value {
        match &self.map {
            HomMap::Table(t) => t
                .iter()
                .find(|(a, _)| a == v)
                .map(|(_, b)| b.clone())
                .unwrap_or_else(|| panic!("{} is undefined on {v}", self.name)),
            HomMap::Func(f) => f(v),
        }
    }

    /// Kernel is `{0}`: only zero maps to zero (checked on the finite carrier).
    pub fn has_trivial_kernel(&self) -> Option<bool> {
        let els = self.source.elements()?;
        Some(
            els.iter()
                .all(|v| self.source.is_zero(v) || !self.target.is_zero(&self.apply(v))),
        )
    }

    /// The table of a finite-carrier homomorphism.
    pub fn table(&self) -> Option<Vec<(Value, Value)>> {
        let els = self.source.elements()?;
        Some(
            els.into_iter()
                .map(|v| {
                    let w = self.apply(&v);
                    (v, w)
                })
                .collect(),
        )
    }
}

/// The threshold homomorphisms `h_{≥ε}` and `h_{≥1}` on S₃.
pub fn threshold_hom(kind: Threshold) -> SemiringHom {
    let (name, eps_image) = match kind {
        Threshold::GeqEps => ("h>=eps", 2),
        Threshold::GeqOne => ("h>=1", 0),
    };
    SemiringHom::from_table(
        SemiringSpec::S3,
        SemiringSpec::S3,
        name,
        vec![
            (Value::Level(0), Value::Level(0)),
            (Value::Level(1), Value::Level(eps_image)),
            (Value::Level(2), Value::Level(2)),
        ],
    )
}

/// Embeds S₃ into a larger lattice semiring. For fuzzy the middle element
/// goes to 1/2; for chains and finite lattices to the first element strictly
/// between bottom and top.
pub fn s3_embedding(target: &SemiringSpec) -> Result<SemiringHom> {
    let mid = match target {
        SemiringSpec::Fuzzy => rat_value(1, 2),
        SemiringSpec::S3 => Value::Level(1),
        SemiringSpec::Chain(k) if *k >= 3 => Value::Level(1),
        SemiringSpec::Lattice(l) => {
            let m = l
                .elements()
                .find(|&x| x != l.bottom() && x != l.top())
                .ok_or_else(|| precondition("lattice has no middle element"))?;
            Value::Level(m)
        }
        _ => return Err(precondition(format!("no S3 embedding into {target}"))),
    };
    Ok(SemiringHom::from_table(
        SemiringSpec::S3,
        target.clone(),
        "s3-embedding",
        vec![
            (Value::Level(0), target.zero()),
            (Value::Level(1), mid),
            (Value::Level(2), target.one()),
        ],
    ))
}

/// Result of checking the homomorphism laws.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct HomReport {
    pub checked_pairs: usize,
    pub failures: Vec<String>,
}

impl HomReport {
    pub fn is_hom(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `h(0)=0`, `h(1)=1`, additivity and multiplicativity, exhaustively
/// on finite carriers and on `samples` otherwise.
pub fn check_hom(h: &SemiringHom, samples: &[Value]) -> HomReport {
    let (s, t) = (&h.source, &h.target);
    let vals = s.elements().unwrap_or_else(|| samples.to_vec());
    let mut rep = HomReport::default();
    if h.apply(&s.zero()) != t.zero() {
        rep.failures.push("h(0) != 0".into());
    }
    if h.apply(&s.one()) != t.one() {
        rep.failures.push("h(1) != 1".into());
    }
    for a in &vals {
        for b in &vals {
            rep.checked_pairs += 1;
            let (ha, hb) = (h.apply(a), h.apply(b));
            if h.apply(&s.add(a, b)) != t.add(&ha, &hb) {
                rep.failures.push(format!("h({a} + {b}) != h({a}) + h({b})"));
            }
            if h.apply(&s.mul(a, b)) != t.mul(&ha, &hb) {
                rep.failures.push(format!("h({a} * {b}) != h({a}) * h({b})"));
            }
        }
    }
    rep
}

/// Largest lattice accepted by [`find_weakly_separating_hom`].
pub const SEPARATING_GUARD: usize = 12;

/// Searches all maps `L → S₃` for a homomorphism that weakly ≤-separates `s`
/// from `t`: kernel `{0}`, `h(s) > h(t)`, and every subset with join `s`
/// (meet `t`) has a member with the same image as `s` (`t`). Exponential in |L|.
pub fn find_weakly_separating_hom(l: &Arc<FiniteLattice>, s: u32, t: u32) -> Result<SemiringHom> {
    let n = l.len();
    if n > SEPARATING_GUARD {
        return Err(Error::Guard(format!("lattice has {n} > {SEPARATING_GUARD} elements")));
    }
    if l.leq(s, t) {
        return Err(precondition(format!("{} <= {}", l.name(s), l.name(t))));
    }
    if let Some((a, b)) = l.zero_divisors() {
        return Err(precondition(format!(
            "zero divisors {} * {} = 0; adjoin a bottom first",
            l.name(a),
            l.name(b)
        )));
    }
    let (bot, top) = (l.bottom() as usize, l.top() as usize);
    let free: Vec<usize> = (0..n).filter(|&i| i != bot && i != top).collect();
    let subsets: Vec<(u32, u32, u32)> = (0u32..1 << n)
        .map(|mask| {
            let members = (0..n as u32).filter(move |i| mask >> i & 1 == 1);
            (mask, l.join_all(members.clone()), l.meet_all(members))
        })
        .collect();
    for choice in 0u32..1 << free.len() {
        let mut h = vec![0u32; n];
        h[top] = 2;
        for (k, &i) in free.iter().enumerate() {
            h[i] = if choice >> k & 1 == 1 { 2 } else { 1 };
        }
        let is_hom = (0..n).all(|a| {
            (0..n).all(|b| {
                h[l.join(a as u32, b as u32) as usize] == h[a].max(h[b])
                    && h[l.meet(a as u32, b as u32) as usize] == h[a].min(h[b])
            })
        });
        if !is_hom || h[s as usize] <= h[t as usize] {
            continue;
        }
        let attained = |target: u32, use_join: bool| {
            subsets.iter().all(|&(mask, j, m)| {
                let bound = if use_join { j } else { m };
                bound != target || (0..n).any(|i| mask >> i & 1 == 1 && h[i] == h[target as usize])
            })
        };
        if attained(s, true) && attained(t, false) {
            let spec = SemiringSpec::Lattice(l.clone());
            let table = (0..n).map(|i| (Value::Level(i as u32), Value::Level(h[i]))).collect();
            return Ok(SemiringHom::from_table(
                spec,
                SemiringSpec::S3,
                "weakly-separating",
                table,
            ));
        }
    }
    Err(Error::NotFound(format!(
        "no weakly separating hom for {} over {}",
        l.name(s),
        l.name(t)
    )))
}

/// The companion map `h*: L* → L` of [`FiniteLattice::adjoin_bottom`].
pub fn adjoin_bottom_hom(starred: &Arc<FiniteLattice>, original: &Arc<FiniteLattice>, map: &[u32]) -> SemiringHom {
    let table = map
        .iter()
        .enumerate()
        .map(|(i, &j)| (Value::Level(i as u32), Value::Level(j)))
        .collect();
    SemiringHom::from_table(
        SemiringSpec::Lattice(starred.clone()),
        SemiringSpec::Lattice(original.clone()),
        "h*",
        table,
    )
}
