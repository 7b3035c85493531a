//! Finite semiring interpretations.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::formula::Vocabulary;
use crate::semiring::{SemiringHom, SemiringSpec, Value};

/// Maximum number of atoms for exhaustive enumeration.
pub const ENUM_ATOM_GUARD: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
struct Table {
    name: String,
    arity: usize,
    /// `[π(α), π(¬α)]` per atom, indexed in mixed radix over the universe.
    vals: Vec<[Value; 2]>,
}

/// A finite interpretation `π: Lit_A(τ) → S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interpretation {
    semiring: SemiringSpec,
    universe: Vec<String>,
    tables: Vec<Table>,
    index: BTreeMap<String, usize>,
}

/// How an element map between interpretations behaves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum HomClass {
    NotHom,
    Hom,
    StrongHom,
    Embedding,
}

fn atom_count(n: usize, arity: usize) -> usize {
    n.checked_pow(arity as u32).expect("atom table too large")
}

fn atom_index(n: usize, args: &[u32]) -> usize {
    args.iter().fold(0, |acc, &a| acc * n + a as usize)
}

fn atom_args(n: usize, arity: usize, mut idx: usize) -> Vec<u32> {
    let mut args = vec![0u32; arity];
    for slot in args.iter_mut().rev() {
        *slot = (idx % n) as u32;
        idx /= n;
    }
    args
}

impl Interpretation {
    /// Every atom false: `π(α) = 0`, `π(¬α) = 1`.
    pub fn new(semiring: SemiringSpec, universe: Vec<String>, vocab: &Vocabulary) -> Result<Interpretation> {
        if universe.is_empty() {
            return Err(invalid("universe must be non-empty"));
        }
        let distinct: BTreeSet<&String> = universe.iter().collect();
        if distinct.len() != universe.len() {
            return Err(invalid("universe names must be distinct"));
        }
        let mut pi = Interpretation {
            semiring,
            universe,
            tables: vec![],
            index: BTreeMap::new(),
        };
        pi.extend_vocab(vocab)?;
        Ok(pi)
    }

    /// Universe `1..=n`.
    pub fn numbered(semiring: SemiringSpec, n: usize, vocab: &Vocabulary) -> Result<Interpretation> {
        Interpretation::new(semiring, (1..=n).map(|i| i.to_string()).collect(), vocab)
    }

    /// Adds the relations of `vocab` that are missing, with every atom false.
    pub fn extend_vocab(&mut self, vocab: &Vocabulary) -> Result<()> {
        for (name, arity) in vocab.iter() {
            match self.index.get(name) {
                Some(&i) if self.tables[i].arity != arity => {
                    return Err(Error::Arity {
                        rel: name.to_string(),
                        expected: self.tables[i].arity,
                        found: arity,
                    })
                }
                Some(_) => {}
                None => {
                    let pair = [self.semiring.zero(), self.semiring.one()];
                    let vals = vec![pair; atom_count(self.universe.len(), arity)];
                    self.index.insert(name.to_string(), self.tables.len());
                    self.tables.push(Table {
                        name: name.to_string(),
                        arity,
                        vals,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn semiring(&self) -> &SemiringSpec {
        &self.semiring
    }

    pub fn size(&self) -> usize {
        self.universe.len()
    }

    pub fn universe(&self) -> &[String] {
        &self.universe
    }

    pub fn element(&self, name: &str) -> Option<u32> {
        self.universe.iter().position(|u| u == name).map(|i| i as u32)
    }

    pub fn vocabulary(&self) -> Vocabulary {
        Vocabulary::from_pairs(self.tables.iter().map(|t| (t.name.as_str(), t.arity))).unwrap()
    }

    pub fn relation_index(&self, rel: &str) -> Option<usize> {
        self.index.get(rel).copied()
    }

    fn table(&self, rel: &str) -> Result<&Table> {
        self.index
            .get(rel)
            .map(|&i| &self.tables[i])
            .ok_or_else(|| Error::NotFound(format!("relation `{rel}`")))
    }

    fn slot(&mut self, rel: &str, args: &[u32]) -> Result<&mut [Value; 2]> {
        let n = self.universe.len();
        if args.iter().any(|&a| a as usize >= n) {
            return Err(invalid(format!("element out of range in {rel}{args:?}")));
        }
        let i = *self
            .index
            .get(rel)
            .ok_or_else(|| Error::NotFound(format!("relation `{rel}`")))?;
        let t = &mut self.tables[i];
        if t.arity != args.len() {
            return Err(Error::Arity {
                rel: rel.to_string(),
                expected: t.arity,
                found: args.len(),
            });
        }
        Ok(&mut t.vals[atom_index(n, args)])
    }

    /// `π(L)` for the literal `R(args)` or `¬R(args)`.
    pub fn lit(&self, rel: &str, args: &[u32], neg: bool) -> Result<&Value> {
        let t = self.table(rel)?;
        if t.arity != args.len() {
            return Err(Error::Arity {
                rel: rel.to_string(),
                expected: t.arity,
                found: args.len(),
            });
        }
        if args.iter().any(|&a| a as usize >= self.size()) {
            return Err(invalid(format!("element out of range in {rel}{args:?}")));
        }
        Ok(&t.vals[atom_index(self.size(), args)][neg as usize])
    }

    /// Fast lookup by relation position, unchecked.
    pub(crate) fn lit_by_index(&self, rel: usize, args: &[u32], neg: bool) -> &Value {
        &self.tables[rel].vals[atom_index(self.size(), args)][neg as usize]
    }

    /// Sets `π(α) = v` and `π(¬α)` to the complementary side (`0`, or `1` when `v = 0`).
    pub fn set_atom(&mut self, rel: &str, args: &[u32], v: Value) -> Result<()> {
        self.semiring.check(&v)?;
        let (zero, one) = (self.semiring.zero(), self.semiring.one());
        let pair = if v == zero { [zero, one] } else { [v, zero] };
        *self.slot(rel, args)? = pair;
        Ok(())
    }

    /// Sets `π(¬α) = v` and `π(α)` to the complementary side.
    pub fn set_neg(&mut self, rel: &str, args: &[u32], v: Value) -> Result<()> {
        self.semiring.check(&v)?;
        let (zero, one) = (self.semiring.zero(), self.semiring.one());
        let pair = if v == zero { [one, zero] } else { [zero, v] };
        *self.slot(rel, args)? = pair;
        Ok(())
    }

    /// Sets both literal values without any model-defining adjustment.
    pub fn set_pair(&mut self, rel: &str, args: &[u32], pos: Value, neg: Value) -> Result<()> {
        self.semiring.check(&pos)?;
        self.semiring.check(&neg)?;
        *self.slot(rel, args)? = [pos, neg];
        Ok(())
    }

    /// All atoms as `(relation, args)`, in table order.
    pub fn atoms(&self) -> Vec<(String, Vec<u32>)> {
        let n = self.size();
        self.tables
            .iter()
            .flat_map(|t| (0..t.vals.len()).map(move |i| (t.name.clone(), atom_args(n, t.arity, i))))
            .collect()
    }

    pub fn atom_total(&self) -> usize {
        self.tables.iter().map(|t| t.vals.len()).sum()
    }

    pub fn format_atom(&self, rel: &str, args: &[u32], neg: bool) -> String {
        let names: Vec<&str> = args.iter().map(|&a| self.universe[a as usize].as_str()).collect();
        format!("{}{rel}({})", if neg { "~" } else { "" }, names.join(","))
    }

    /// Checks that exactly one of `π(α)`, `π(¬α)` is zero for every atom.
    /// Polynomial carriers are accepted as they stand (the quotient
    /// `x_α · x_¬α = 0` plays that role).
    pub fn validate(&self) -> Result<()> {
        if matches!(self.semiring, SemiringSpec::NatPoly | SemiringSpec::SPoly) {
            return Ok(());
        }
        let n = self.size();
        for t in &self.tables {
            for (i, [p, q]) in t.vals.iter().enumerate() {
                if self.semiring.is_zero(p) == self.semiring.is_zero(q) {
                    return Err(Error::NotModelDefining(self.format_atom(
                        &t.name,
                        &atom_args(n, t.arity, i),
                        false,
                    )));
                }
            }
        }
        Ok(())
    }

    /// The induced subinterpretation on `subset` (kept in universe order).
    pub fn restrict(&self, subset: &[u32]) -> Result<Interpretation> {
        let mut keep: Vec<u32> = subset.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if keep.is_empty() || keep.iter().any(|&a| a as usize >= self.size()) {
            return Err(invalid("restrict: subset must be a non-empty subset of the universe"));
        }
        let names = keep.iter().map(|&a| self.universe[a as usize].clone()).collect();
        let mut out = Interpretation::new(self.semiring.clone(), names, &self.vocabulary())?;
        let m = keep.len();
        for (ti, t) in self.tables.iter().enumerate() {
            for i in 0..out.tables[ti].vals.len() {
                let args: Vec<u32> = atom_args(m, t.arity, i).iter().map(|&a| keep[a as usize]).collect();
                out.tables[ti].vals[i] = t.vals[atom_index(self.size(), &args)].clone();
            }
        }
        Ok(out)
    }

    /// Extension by `count` fresh elements. Every atom mentioning a fresh
    /// element gets `π(α) = fill` and `π(¬α) = 0` (or `0`/`1` if `fill = 0`).
    pub fn pad(&self, count: usize, fill: &Value) -> Result<Interpretation> {
        self.semiring.check(fill)?;
        let mut names = self.universe.clone();
        let taken: BTreeSet<String> = names.iter().cloned().collect();
        let mut k = self.size() + 1;
        while names.len() < self.size() + count {
            let cand = k.to_string();
            if !taken.contains(&cand) {
                names.push(cand);
            }
            k += 1;
        }
        let mut out = Interpretation::new(self.semiring.clone(), names, &self.vocabulary())?;
        let (n, m) = (self.size(), out.size());
        let (zero, one) = (self.semiring.zero(), self.semiring.one());
        let fresh = if self.semiring.is_zero(fill) {
            [zero.clone(), one]
        } else {
            [fill.clone(), zero]
        };
        for (ti, t) in self.tables.iter().enumerate() {
            for i in 0..out.tables[ti].vals.len() {
                let args = atom_args(m, t.arity, i);
                out.tables[ti].vals[i] = if args.iter().all(|&a| (a as usize) < n) {
                    t.vals[atom_index(n, &args)].clone()
                } else {
                    fresh.clone()
                };
            }
        }
        Ok(out)
    }

    /// Literal-wise image under a semiring homomorphism.
    pub fn compose_hom(&self, h: &SemiringHom) -> Result<Interpretation> {
        if h.source != self.semiring {
            return Err(Error::CarrierMismatch(format!(
                "homomorphism source {} differs from {}",
                h.source, self.semiring
            )));
        }
        let mut out = self.clone();
        out.semiring = h.target.clone();
        for t in &mut out.tables {
            for pair in &mut t.vals {
                *pair = [h.apply(&pair[0]), h.apply(&pair[1])];
            }
        }
        out.validate()?;
        Ok(out)
    }

    /// Replaces every literal value through `f`, possibly changing the carrier.
    pub fn map_values(&self, target: SemiringSpec, f: impl Fn(&Value) -> Value) -> Interpretation {
        let mut out = self.clone();
        out.semiring = target;
        for t in &mut out.tables {
            for pair in &mut t.vals {
                *pair = [f(&pair[0]), f(&pair[1])];
            }
        }
        out
    }

    /// Distinct literal values occurring.
    pub fn image(&self) -> Vec<Value> {
        let mut out: Vec<Value> = Vec::new();
        for t in &self.tables {
            for pair in &t.vals {
                for v in pair {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
            }
        }
        out
    }

    /// Renders in the interpretation file format, listing atoms with a
    /// non-default value.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "semiring: {}", self.semiring.name());
        let _ = writeln!(s, "universe: {}", self.universe.join(" "));
        let (zero, one) = (self.semiring.zero(), self.semiring.one());
        for (rel, args) in self.atoms() {
            let [p, q] = &self.tables[self.index[&rel]].vals[atom_index(self.size(), &args)];
            if *p == zero && *q == one {
                continue;
            }
            if *p == zero {
                let _ = writeln!(s, "{} = {}", self.format_atom(&rel, &args, true), self.semiring.show(q));
            } else {
                let _ = writeln!(
                    s,
                    "{} = {}",
                    self.format_atom(&rel, &args, false),
                    self.semiring.show(p)
                );
                if *q != zero {
                    let _ = writeln!(s, "{} = {}", self.format_atom(&rel, &args, true), self.semiring.show(q));
                }
            }
        }
        let _ = writeln!(s, "default: 0");
        s
    }

    /// Parses the interpretation file format. `semiring` overrides the file's
    /// `semiring:` line when given.
    pub fn parse(text: &str, semiring: Option<&SemiringSpec>) -> Result<Interpretation> {
        let mut spec = semiring.cloned();
        let mut universe: Option<Vec<String>> = None;
        let mut entries: Vec<(usize, bool, String, Vec<String>, String)> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let syntax = |msg: String| Error::Syntax {
                line: lineno + 1,
                col: 1,
                msg,
            };
            if let Some(rest) = line.strip_prefix("semiring:") {
                if spec.is_none() {
                    spec = Some(SemiringSpec::parse(rest)?);
                }
            } else if let Some(rest) = line.strip_prefix("universe:") {
                universe = Some(rest.split_whitespace().map(str::to_string).collect());
            } else if let Some(rest) = line.strip_prefix("default:") {
                if rest.trim() != "0" {
                    return Err(syntax("only `default: 0` is supported".into()));
                }
            } else {
                let (lhs, rhs) = line
                    .split_once('=')
                    .ok_or_else(|| syntax(format!("expected `R(a) = v`, found `{line}`")))?;
                let lhs = lhs.trim();
                let (neg, lhs) = match lhs.strip_prefix('~') {
                    Some(l) => (true, l.trim()),
                    None => (false, lhs),
                };
                let (rel, args) = lhs
                    .strip_suffix(')')
                    .and_then(|l| l.split_once('('))
                    .ok_or_else(|| syntax(format!("malformed atom `{lhs}`")))?;
                let args: Vec<String> = args.split(',').map(|a| a.trim().to_string()).collect();
                if rel.trim().is_empty() || args.iter().any(String::is_empty) {
                    return Err(syntax(format!("malformed atom `{lhs}`")));
                }
                entries.push((lineno + 1, neg, rel.trim().to_string(), args, rhs.trim().to_string()));
            }
        }
        let spec = spec.ok_or_else(|| invalid("missing `semiring:` line"))?;
        let universe = universe.ok_or_else(|| invalid("missing `universe:` line"))?;
        let mut vocab = Vocabulary::new();
        for (line, _, rel, args, _) in &entries {
            vocab.add(rel, args.len()).map_err(|e| Error::Syntax {
                line: *line,
                col: 1,
                msg: e.to_string(),
            })?;
        }
        let mut pi = Interpretation::new(spec.clone(), universe, &vocab)?;
        let mut seen: BTreeMap<(String, Vec<u32>), (bool, Value)> = BTreeMap::new();
        for (line, neg, rel, args, rhs) in entries {
            let syntax = |msg: String| Error::Syntax { line, col: 1, msg };
            let ids: Vec<u32> = args
                .iter()
                .map(|a| pi.element(a).ok_or_else(|| syntax(format!("unknown element `{a}`"))))
                .collect::<Result<_>>()?;
            let v = spec.parse_value(&rhs).map_err(|e| syntax(e.to_string()))?;
            if let Some((other_neg, other)) = seen.get(&(rel.clone(), ids.clone())) {
                if *other_neg == neg || !(spec.is_zero(other) || spec.is_zero(&v)) {
                    return Err(Error::NotModelDefining(pi.format_atom(&rel, &ids, false)));
                }
            }
            seen.insert((rel.clone(), ids.clone()), (neg, v.clone()));
            if neg {
                pi.set_neg(&rel, &ids, v)?;
            } else {
                pi.set_atom(&rel, &ids, v)?;
            }
        }
        pi.validate()?;
        Ok(pi)
    }
}

/// `πA ⊆ πB`: same carrier, A's element names occur in B, literal values agree.
pub fn is_subinterpretation(a: &Interpretation, b: &Interpretation) -> bool {
    if a.semiring != b.semiring {
        return false;
    }
    let Some(map) = a.universe.iter().map(|u| b.element(u)).collect::<Option<Vec<u32>>>() else {
        return false;
    };
    for (ti, t) in a.tables.iter().enumerate() {
        let Some(&bi) = b.index.get(&t.name) else {
            return false;
        };
        if b.tables[bi].arity != t.arity {
            return false;
        }
        for i in 0..t.vals.len() {
            let args: Vec<u32> = atom_args(a.size(), t.arity, i)
                .iter()
                .map(|&x| map[x as usize])
                .collect();
            if a.tables[ti].vals[i] != b.tables[bi].vals[atom_index(b.size(), &args)] {
                return false;
            }
        }
    }
    true
}

/// Classifies the element map `g: A → B`. A homomorphism needs, for every
/// positive atom, the sum of the preimage values to lie below the image value.
pub fn check_interp_hom(g: &[u32], a: &Interpretation, b: &Interpretation) -> Result<HomClass> {
    if g.len() != a.size() || g.iter().any(|&x| x as usize >= b.size()) {
        return Err(invalid("element map must be total on A with values in B"));
    }
    if a.semiring != b.semiring {
        return Err(Error::CarrierMismatch(
            "interpretations over different semirings".into(),
        ));
    }
    let s = &a.semiring;
    let mut strong = true;
    let mut is_hom = true;
    for t in &a.tables {
        let bt = b.table(&t.name)?;
        let mut sums: BTreeMap<usize, Value> = BTreeMap::new();
        for (i, pair) in t.vals.iter().enumerate() {
            let img: Vec<u32> = atom_args(a.size(), t.arity, i).iter().map(|&x| g[x as usize]).collect();
            let j = atom_index(b.size(), &img);
            if *pair != bt.vals[j] {
                strong = false;
            }
            let acc = sums.entry(j).or_insert_with(|| s.zero());
            *acc = s.add(acc, &pair[0]);
        }
        for (j, sum) in sums {
            if !s.leq(&sum, &bt.vals[j][0]) {
                is_hom = false;
            }
        }
    }
    let injective = g.iter().collect::<BTreeSet<_>>().len() == g.len();
    Ok(if strong && injective {
        HomClass::Embedding
    } else if strong && is_hom {
        HomClass::StrongHom
    } else if is_hom {
        HomClass::Hom
    } else {
        HomClass::NotHom
    })
}

/// Streams every model-defining interpretation on `1..=size` whose atoms take
/// a value from `value_set` on exactly one side.
pub struct InterpretationEnum {
    base: Interpretation,
    values: Vec<Value>,
    digits: Vec<usize>,
    atoms: Vec<(String, Vec<u32>)>,
    done: bool,
}

pub fn enumerate_interpretations(
    spec: &SemiringSpec,
    vocab: &Vocabulary,
    size: usize,
    value_set: &[Value],
) -> Result<InterpretationEnum> {
    if value_set.is_empty() {
        return Err(invalid("value set must be non-empty"));
    }
    for v in value_set {
        spec.check(v)?;
        if spec.is_zero(v) {
            return Err(invalid("value set must not contain 0"));
        }
    }
    let base = Interpretation::numbered(spec.clone(), size, vocab)?;
    let atoms = base.atoms();
    if atoms.len() > ENUM_ATOM_GUARD {
        return Err(Error::Guard(format!(
            "{} atoms exceed the enumeration guard of {ENUM_ATOM_GUARD}",
            atoms.len()
        )));
    }
    Ok(InterpretationEnum {
        base,
        values: value_set.to_vec(),
        digits: vec![0; atoms.len()],
        atoms,
        done: false,
    })
}

impl InterpretationEnum {
    /// `(2·|V|)^#atoms`.
    pub fn total(&self) -> u128 {
        (2 * self.values.len() as u128).pow(self.atoms.len() as u32)
    }
}

impl Iterator for InterpretationEnum {
    type Item = Interpretation;

    fn next(&mut self) -> Option<Interpretation> {
        if self.done {
            return None;
        }
        let k = self.values.len();
        let mut pi = self.base.clone();
        for ((rel, args), &d) in self.atoms.iter().zip(&self.digits) {
            if d < k {
                pi.set_atom(rel, args, self.values[d].clone()).unwrap();
            } else {
                pi.set_neg(rel, args, self.values[d - k].clone()).unwrap();
            }
        }
        let mut i = 0;
        loop {
            if i == self.digits.len() {
                self.done = true;
                break;
            }
            self.digits[i] += 1;
            if self.digits[i] < 2 * k {
                break;
            }
            self.digits[i] = 0;
            i += 1;
        }
        Some(pi)
    }
}

/// A random model-defining interpretation on `1..=size`: each atom takes a
/// random grid value on a random side (`0` on the positive side means false).
pub fn random_interpretation(
    spec: &SemiringSpec,
    vocab: &Vocabulary,
    size: usize,
    grid: &[Value],
    rng: &mut impl Rng,
) -> Result<Interpretation> {
    let nonzero: Vec<&Value> = grid.iter().filter(|v| !spec.is_zero(v)).collect();
    if nonzero.is_empty() {
        return Err(invalid("grid needs a non-zero value"));
    }
    let mut pi = Interpretation::numbered(spec.clone(), size, vocab)?;
    for (rel, args) in pi.atoms() {
        let v = (*nonzero.choose(rng).unwrap()).clone();
        if rng.gen_bool(0.5) {
            pi.set_atom(&rel, &args, v)?;
        } else {
            pi.set_neg(&rel, &args, v)?;
        }
    }
    Ok(pi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semiring::{nat_value, rat_value, threshold_hom, Threshold};

    fn unary_r() -> Vocabulary {
        Vocabulary::from_pairs([("R", 1)]).unwrap()
    }

    fn example_b() -> Interpretation {
        Interpretation::parse(
            "semiring: viterbi\nuniverse: a b\nR(a) = 1/2\nR(b) = 1/4\ndefault: 0\n",
            None,
        )
        .unwrap()
    }

    #[test]
    fn restrict_and_pad() {
        let b = example_b();
        let a = b.restrict(&[0]).unwrap();
        assert_eq!(a.lit("R", &[0], false).unwrap(), &rat_value(1, 2));
        assert!(is_subinterpretation(&a, &b));
        assert_eq!(b.restrict(&[0, 1]).unwrap(), b);
        let p = a.pad(1, &rat_value(1, 4)).unwrap();
        assert_eq!(p.lit("R", &[1], false).unwrap(), &rat_value(1, 4));
        assert!(is_subinterpretation(&a, &p));
    }

    #[test]
    fn hom_classification() {
        let b = example_b();
        let a = b.restrict(&[0]).unwrap();
        assert_eq!(check_interp_hom(&[0, 0], &b, &a).unwrap(), HomClass::Hom);
        assert_eq!(check_interp_hom(&[0, 1], &b, &b).unwrap(), HomClass::Embedding);
        let mut n2 = Interpretation::numbered(SemiringSpec::Nat, 2, &unary_r()).unwrap();
        n2.set_atom("R", &[0], nat_value(2)).unwrap();
        n2.set_atom("R", &[1], nat_value(3)).unwrap();
        let mut n1 = Interpretation::numbered(SemiringSpec::Nat, 1, &unary_r()).unwrap();
        n1.set_atom("R", &[0], nat_value(4)).unwrap();
        assert_eq!(check_interp_hom(&[0, 0], &n2, &n1).unwrap(), HomClass::NotHom);
    }

    #[test]
    fn threshold_image_can_break_model_definingness() {
        let mut pi = Interpretation::numbered(SemiringSpec::S3, 1, &unary_r()).unwrap();
        pi.set_atom("R", &[0], Value::Level(1)).unwrap();
        let r = pi.compose_hom(&threshold_hom(Threshold::GeqOne));
        assert!(matches!(r, Err(Error::NotModelDefining(_))));
    }

    #[test]
    fn enumeration_counts() {
        let v = unary_r();
        let eps1 = [Value::Level(1), Value::Level(2)];
        assert_eq!(
            enumerate_interpretations(&SemiringSpec::S3, &v, 1, &eps1)
                .unwrap()
                .total(),
            4
        );
        assert_eq!(
            enumerate_interpretations(&SemiringSpec::S3, &v, 2, &eps1)
                .unwrap()
                .total(),
            16
        );
        let all: Vec<_> = enumerate_interpretations(&SemiringSpec::Boolean, &v, 1, &[Value::Bool(true)])
            .unwrap()
            .collect();
        assert_eq!(all.len(), 2);
        assert!(all.iter().all(|p| p.validate().is_ok()));
        let big = Vocabulary::from_pairs([("E", 2)]).unwrap();
        assert!(matches!(
            enumerate_interpretations(&SemiringSpec::S3, &big, 5, &eps1),
            Err(Error::Guard(_))
        ));
    }

    #[test]
    fn file_round_trip() {
        let b = example_b();
        assert_eq!(Interpretation::parse(&b.to_text(), None).unwrap(), b);
        assert!(Interpretation::parse("semiring: viterbi\nuniverse: a\nR(a) = 1/2\n~R(a) = 1/2\n", None).is_err());
        assert!(Interpretation::parse("semiring: viterbi\nuniverse: a\nR(b) = 1/2\n", None).is_err());
    }
}
