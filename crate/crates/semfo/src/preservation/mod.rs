//! Bounded preservation checks, triviality and redundancy of universal
//! subformulae, counterexample construction, S₃ reductions and the Σ₁
//! rewriting pipelines.

mod redundancy;
mod rewrite;
mod s3;
mod trivial;

use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::eval::eval;
use crate::formula::Formula;
use crate::interpretation::{
    check_interp_hom, enumerate_interpretations, is_subinterpretation, HomClass, Interpretation,
};
use crate::semiring::{rat_value, SemiringSpec, Value};

pub use redundancy::{
    eliminate_one_valuations, has_almost_existential_optimal, has_existential_optimal, pad_for_redundancy,
    padding_value, relabel, shrink_counterexample, ShrinkReport,
};
pub use rewrite::{
    rewrite_sigma1_lattice, rewrite_sigma1_strict, RewriteConfig, RewriteOutcome, RewriteReport, SubVerdict,
    Substitution, Verification,
};
pub use s3::{lift_counterexample_to_s3, s3_entailment, s3_equivalence, S3Lift, S3Verdict};
pub use trivial::{
    is_eventually_trivial, is_trivial_at, probe_threshold, trivial_by_eps, trivial_symbolic, EventualVerdict,
};

/// Default bound on the number of comparisons a check may perform.
pub const CHECK_GUARD: u128 = 5_000_000;

/// Which preservation property to check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Property {
    /// `πA ⊆ πB ⇒ πA⟦ψ⟧ ≤ πB⟦ψ⟧`
    Extensions,
    /// `πA ⊆ πB ⇒ πA⟦ψ⟧ ≥ πB⟦ψ⟧`
    Subinterpretations,
    /// `g: πA → πB` a homomorphism `⇒ πA⟦ψ⟧ ≤ πB⟦ψ⟧`
    Homomorphisms,
}

impl Property {
    pub fn parse(s: &str) -> Result<Property> {
        Ok(match s {
            "extensions" | "ext" => Property::Extensions,
            "subints" | "subinterpretations" => Property::Subinterpretations,
            "homs" | "homomorphisms" => Property::Homomorphisms,
            _ => return Err(invalid(format!("unknown property `{s}`"))),
        })
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::Extensions => "extensions",
            Property::Subinterpretations => "subinterpretations",
            Property::Homomorphisms => "homomorphisms",
        })
    }
}

/// The finite search space of a check: universe sizes and literal values.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchSpace {
    pub sizes: Vec<usize>,
    /// Literal values; `0` is ignored since every atom takes a non-zero value on one side.
    pub grid: Vec<Value>,
    pub guard: u128,
}

impl SearchSpace {
    pub fn new(sizes: Vec<usize>, grid: Vec<Value>) -> SearchSpace {
        SearchSpace {
            sizes,
            grid,
            guard: CHECK_GUARD,
        }
    }

    fn values(&self, spec: &SemiringSpec) -> Result<Vec<Value>> {
        let mut out: Vec<Value> = Vec::new();
        for v in &self.grid {
            spec.check(v)?;
            if !spec.is_zero(v) && !out.contains(v) {
                out.push(v.clone());
            }
        }
        if out.is_empty() {
            return Err(invalid("the value grid needs a non-zero value"));
        }
        out.sort_by(|a, b| natural_cmp(spec, a, b));
        Ok(out)
    }

    fn sorted_sizes(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.sizes.iter().copied().filter(|&k| k > 0).collect();
        s.sort_unstable();
        s.dedup();
        s
    }
}

/// A grid of literal values covering the characteristic values of `spec`.
pub fn default_grid(spec: &SemiringSpec) -> Vec<Value> {
    use SemiringSpec::*;
    match spec {
        Boolean => vec![Value::Bool(true)],
        S3 => vec![Value::Level(1), Value::Level(2)],
        Chain(k) => (1..*k).map(Value::Level).collect(),
        Lattice(l) => l.elements().filter(|&e| e != l.bottom()).map(Value::Level).collect(),
        Fuzzy | Viterbi | Lukasiewicz => vec![rat_value(1, 4), rat_value(1, 2), rat_value(1, 1)],
        Doubt => vec![rat_value(3, 4), rat_value(1, 2), rat_value(0, 1)],
        Tropical => vec![rat_value(2, 1), rat_value(1, 1), rat_value(0, 1)],
        Nat | NatInf => vec![crate::semiring::nat_value(1), crate::semiring::nat_value(2)],
        NatPoly | SPoly => vec![spec.one()],
    }
}

fn natural_cmp(spec: &SemiringSpec, a: &Value, b: &Value) -> std::cmp::Ordering {
    use std::cmp::Ordering::*;
    if a == b {
        Equal
    } else if spec.leq(a, b) {
        Less
    } else if spec.leq(b, a) {
        Greater
    } else {
        format!("{a:?}").cmp(&format!("{b:?}"))
    }
}

/// A pair of interpretations and an element map violating a preservation property.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub a: Interpretation,
    pub b: Interpretation,
    /// Image in `b` of each element of `a`.
    pub map: Vec<u32>,
    pub value_a: Value,
    pub value_b: Value,
}

impl Witness {
    /// Re-checks the relation between `a` and `b` and the violated order from scratch.
    pub fn revalidate(&self, psi: &Formula, property: Property) -> Result<bool> {
        let s = self.a.semiring();
        let related = match property {
            Property::Extensions | Property::Subinterpretations => {
                is_subinterpretation(&self.a, &self.b)
                    && self
                        .a
                        .universe()
                        .iter()
                        .zip(&self.map)
                        .all(|(name, &j)| self.b.element(name) == Some(j))
            }
            Property::Homomorphisms => check_interp_hom(&self.map, &self.a, &self.b)? != HomClass::NotHom,
        };
        let (va, vb) = (eval(&self.a, psi)?, eval(&self.b, psi)?);
        Ok(related && va == self.value_a && vb == self.value_b && violates(s, property, &va, &vb))
    }
}

fn violates(s: &SemiringSpec, property: Property, va: &Value, vb: &Value) -> bool {
    match property {
        Property::Extensions | Property::Homomorphisms => !s.leq(va, vb),
        Property::Subinterpretations => !s.leq(vb, va),
    }
}

/// Outcome of a bounded preservation check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    /// No violation among `checked` related pairs.
    HoldsOnSearchSpace {
        checked: u128,
    },
    Refuted(Box<Witness>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreservationVerdict {
    pub property: Property,
    pub outcome: Outcome,
    pub space: SearchSpace,
}

impl PreservationVerdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self.outcome, Outcome::Refuted(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match &self.outcome {
            Outcome::Refuted(w) => Some(w),
            Outcome::HoldsOnSearchSpace { .. } => None,
        }
    }

    /// Plain-text report.
    pub fn render(&self) -> String {
        let space = format!(
            "sizes {:?}, grid {}",
            self.space.sizes,
            self.space
                .grid
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
        match &self.outcome {
            Outcome::HoldsOnSearchSpace { checked } => format!(
                "property: {}\nresult: holds_on_search_space\nchecked: {checked}\nsearch space: {space}\n",
                self.property
            ),
            Outcome::Refuted(w) => {
                let s = w.a.semiring();
                let map: Vec<String> = w
                    .map
                    .iter()
                    .enumerate()
                    .map(|(i, &j)| format!("{}->{}", w.a.universe()[i], w.b.universe()[j as usize]))
                    .collect();
                format!(
                    "property: {}\nresult: refuted\nsearch space: {space}\nvalue A: {}\nvalue B: {}\nmap: {}\n--- A\n{}--- B\n{}",
                    self.property,
                    s.show(&w.value_a),
                    s.show(&w.value_b),
                    map.join(" "),
                    w.a.to_text(),
                    w.b.to_text()
                )
            }
        }
    }
}

/// Exhaustively checks `property` for `ψ` over every model-defining
/// interpretation with the given sizes and literal values. Refutations are
/// minimized greedily: elements are dropped, then values lowered, as long as
/// the violation persists. The first violation in enumeration order is used.
pub fn check_preservation(
    psi: &Formula,
    spec: &SemiringSpec,
    property: Property,
    space: &SearchSpace,
) -> Result<PreservationVerdict> {
    if !psi.is_sentence() {
        return Err(invalid("preservation is checked for sentences"));
    }
    let vocab = psi.vocabulary()?;
    let values = space.values(spec)?;
    let sizes = space.sorted_sizes();
    let verdict = |outcome| PreservationVerdict {
        property,
        outcome,
        space: space.clone(),
    };
    let found = match property {
        Property::Extensions | Property::Subinterpretations => {
            search_substructures(psi, spec, property, &vocab, &sizes, &values, space.guard)?
        }
        Property::Homomorphisms => search_homs(psi, spec, &vocab, &sizes, &values, space.guard)?,
    };
    Ok(match found {
        Ok(checked) => verdict(Outcome::HoldsOnSearchSpace { checked }),
        Err(w) => {
            let w = minimize(psi, property, &values, w)?;
            verdict(Outcome::Refuted(Box::new(w)))
        }
    })
}

fn subsets_of_size(m: usize, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: u32, m: u32, k: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for e in start..m {
            cur.push(e);
            go(e + 1, m, k, cur, out);
            cur.pop();
        }
    }
    go(0, m as u32, k, &mut cur, &mut out);
    out
}

fn binomial(m: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (m - i) as u128 / (i + 1) as u128)
}

fn guard_error(work: u128, guard: u128) -> Error {
    Error::Guard(format!("search space of {work} comparisons exceeds the guard {guard}"))
}

type Search = std::result::Result<u128, Witness>;

fn search_substructures(
    psi: &Formula,
    spec: &SemiringSpec,
    property: Property,
    vocab: &crate::formula::Vocabulary,
    sizes: &[usize],
    values: &[Value],
    guard: u128,
) -> Result<Search> {
    let mut work = 0u128;
    for &m in sizes {
        let subs: u128 = sizes.iter().filter(|&&k| k < m).map(|&k| binomial(m, k)).sum();
        if subs > 0 {
            let count = enumerate_interpretations(spec, vocab, m, values)?.total();
            work = work.saturating_add(count.saturating_mul(subs));
        }
    }
    if work > guard {
        return Err(guard_error(work, guard));
    }
    let mut checked = 0u128;
    for &m in sizes {
        let smaller: Vec<Vec<u32>> = sizes
            .iter()
            .filter(|&&k| k < m)
            .flat_map(|&k| subsets_of_size(m, k))
            .collect();
        if smaller.is_empty() {
            continue;
        }
        for b in enumerate_interpretations(spec, vocab, m, values)? {
            let vb = eval(&b, psi)?;
            for s in &smaller {
                let a = b.restrict(s)?;
                let va = eval(&a, psi)?;
                checked += 1;
                if violates(spec, property, &va, &vb) {
                    return Ok(Err(Witness {
                        a,
                        b,
                        map: s.clone(),
                        value_a: va,
                        value_b: vb,
                    }));
                }
            }
        }
    }
    Ok(Ok(checked))
}

fn all_maps(k: usize, m: usize) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|g| {
                (0..m as u32).map(move |e| {
                    let mut h = g.clone();
                    h.push(e);
                    h
                })
            })
            .collect();
    }
    out
}

fn search_homs(
    psi: &Formula,
    spec: &SemiringSpec,
    vocab: &crate::formula::Vocabulary,
    sizes: &[usize],
    values: &[Value],
    guard: u128,
) -> Result<Search> {
    let mut work = 0u128;
    for &k in sizes {
        for &m in sizes {
            let ca = enumerate_interpretations(spec, vocab, k, values)?.total();
            let cb = enumerate_interpretations(spec, vocab, m, values)?.total();
            let maps = (m as u128).saturating_pow(k as u32);
            work = work.saturating_add(ca.saturating_mul(cb).saturating_mul(maps));
        }
    }
    if work > guard {
        return Err(guard_error(work, guard));
    }
    let mut evaluated: Vec<(usize, Vec<(Interpretation, Value)>)> = Vec::new();
    for &k in sizes {
        let all = enumerate_interpretations(spec, vocab, k, values)?
            .map(|pi| {
                let v = eval(&pi, psi)?;
                Ok((pi, v))
            })
            .collect::<Result<Vec<_>>>()?;
        evaluated.push((k, all));
    }
    let mut checked = 0u128;
    for (k, as_) in &evaluated {
        for (m, bs) in &evaluated {
            let maps = all_maps(*k, *m);
            for (a, va) in as_ {
                for (b, vb) in bs {
                    for g in &maps {
                        if check_interp_hom(g, a, b)? == HomClass::NotHom {
                            continue;
                        }
                        checked += 1;
                        if !spec.leq(va, vb) {
                            return Ok(Err(Witness {
                                a: a.clone(),
                                b: b.clone(),
                                map: g.clone(),
                                value_a: va.clone(),
                                value_b: vb.clone(),
                            }));
                        }
                    }
                }
            }
        }
    }
    Ok(Ok(checked))
}

fn refutes(
    psi: &Formula,
    property: Property,
    a: &Interpretation,
    b: &Interpretation,
    map: &[u32],
) -> Result<Option<Witness>> {
    let w = Witness {
        a: a.clone(),
        b: b.clone(),
        map: map.to_vec(),
        value_a: eval(a, psi)?,
        value_b: eval(b, psi)?,
    };
    Ok(if w.revalidate(psi, property)? { Some(w) } else { None })
}

/// Lowers the value of one literal side to each smaller grid value, smallest first.
fn lowered(pi: &Interpretation, values: &[Value]) -> Vec<Interpretation> {
    let s = pi.semiring();
    let mut out = Vec::new();
    for (rel, args) in pi.atoms() {
        for neg in [false, true] {
            let cur = pi.lit(&rel, &args, neg).expect("atom exists").clone();
            if s.is_zero(&cur) {
                continue;
            }
            for v in values.iter().filter(|v| s.lt(v, &cur)) {
                let mut p = pi.clone();
                let set = if neg {
                    p.set_neg(&rel, &args, v.clone())
                } else {
                    p.set_atom(&rel, &args, v.clone())
                };
                if set.is_ok() {
                    out.push(p);
                }
            }
        }
    }
    out
}

fn minimize(psi: &Formula, property: Property, values: &[Value], mut w: Witness) -> Result<Witness> {
    match property {
        Property::Extensions | Property::Subinterpretations => {
            // Drop elements of B, keeping A ⊆ B non-empty and proper.
            'drop: loop {
                for e in 0..w.b.size() as u32 {
                    let in_a = w.map.contains(&e);
                    if (in_a && w.map.len() == 1) || (!in_a && w.b.size() == w.map.len() + 1) {
                        continue;
                    }
                    let keep: Vec<u32> = (0..w.b.size() as u32).filter(|&x| x != e).collect();
                    let b = w.b.restrict(&keep)?;
                    let map: Vec<u32> = w
                        .map
                        .iter()
                        .filter(|&&x| x != e)
                        .map(|&x| if x > e { x - 1 } else { x })
                        .collect();
                    let a = b.restrict(&map)?;
                    if let Some(nw) = refutes(psi, property, &a, &b, &map)? {
                        w = nw;
                        continue 'drop;
                    }
                }
                break;
            }
            'lower: loop {
                for b in lowered(&w.b, values) {
                    let a = b.restrict(&w.map)?;
                    if let Some(nw) = refutes(psi, property, &a, &b, &w.map)? {
                        w = nw;
                        continue 'lower;
                    }
                }
                break;
            }
        }
        Property::Homomorphisms => {
            'drop: loop {
                if w.a.size() > 1 {
                    for e in 0..w.a.size() as u32 {
                        let keep: Vec<u32> = (0..w.a.size() as u32).filter(|&x| x != e).collect();
                        let a = w.a.restrict(&keep)?;
                        let map: Vec<u32> = keep.iter().map(|&x| w.map[x as usize]).collect();
                        if let Some(nw) = refutes(psi, property, &a, &w.b, &map)? {
                            w = nw;
                            continue 'drop;
                        }
                    }
                }
                break;
            }
            'lower: loop {
                for a in lowered(&w.a, values) {
                    if let Some(nw) = refutes(psi, property, &a, &w.b, &w.map)? {
                        w = nw;
                        continue 'lower;
                    }
                }
                for b in lowered(&w.b, values) {
                    if let Some(nw) = refutes(psi, property, &w.a, &b, &w.map)? {
                        w = nw;
                        continue 'lower;
                    }
                }
                break;
            }
        }
    }
    Ok(w)
}
