use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    check_preservation, default_grid, is_eventually_trivial, EventualVerdict, PreservationVerdict, Property,
    SearchSpace,
};
use crate::error::{precondition, Error, Result};
use crate::eval::eval;
use crate::formula::{
    and, big_or, distinct_guard, existential_prenex_dnf, find_postorder, flatten_sigma1, fo_to_foneq, foneq_to_fo,
    fresh_tuple, psi_n, render, simplify_absorptive, subformula_at, substitute_subformula, Formula,
};
use crate::interpretation::{enumerate_interpretations, random_interpretation, Interpretation};
use crate::semiring::{rat_value, SemiringSpec, Value};

/// Bounds of a rewrite run. Every report states the bounds it used.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteConfig {
    /// Exhaustive verification on sizes `1..=exhaustive_max`.
    pub exhaustive_max: usize,
    /// Sizes above this many interpretations are sampled instead of enumerated.
    pub exhaustive_guard: u128,
    pub samples: usize,
    pub sample_max: usize,
    /// Largest size `n` tried for the large-universe combination.
    pub max_threshold: usize,
    /// Sizes of the preservation gate.
    pub gate_sizes: Vec<usize>,
    pub seed: u64,
}

impl Default for RewriteConfig {
    fn default() -> RewriteConfig {
        RewriteConfig {
            exhaustive_max: 3,
            exhaustive_guard: 200_000,
            samples: 1000,
            sample_max: 5,
            max_threshold: 4,
            gate_sizes: vec![1, 2],
            seed: 0,
        }
    }
}

/// How a universal subformula was eliminated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubVerdict {
    /// Eventually trivial, replaced by `⊤`.
    Trivial,
    /// Replaced by `⊥`.
    Redundant,
    /// The disjuncts not mentioning `y` were pulled out, the rest replaced by `⊥`.
    ContinuitySplit,
}

impl SubVerdict {
    fn tag(self) -> &'static str {
        match self {
            SubVerdict::Trivial => "trivial",
            SubVerdict::Redundant => "redundant",
            SubVerdict::ContinuitySplit => "continuity-split",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Substitution {
    pub subformula: Formula,
    pub replacement: Formula,
    pub verdict: SubVerdict,
    /// Size from which the triviality verdict was stable, if probed.
    pub stable_from: Option<usize>,
}

/// Result of comparing input and output on one semiring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub semiring: SemiringSpec,
    pub exhaustive_sizes: Vec<usize>,
    pub exhaustive_checked: usize,
    pub sampled: usize,
    pub sample_max: usize,
    /// First interpretation on which input and output differ.
    pub failure: Option<(Interpretation, Value, Value)>,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RewriteReport {
    pub input: Formula,
    /// A universal-free FO sentence.
    pub output: Formula,
    /// Size `n` of the large-universe combination; `1` means no combination was needed.
    pub threshold: usize,
    /// `2·(2^|ψ| + qr(ψ) + 1)` for the strict pipeline.
    pub theoretical_threshold: Option<u128>,
    pub substitutions: Vec<Substitution>,
    pub verification: Vec<Verification>,
}

impl RewriteReport {
    pub fn passed(&self) -> bool {
        self.verification.iter().all(Verification::passed)
    }

    /// Plain-text report with a stable layout.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "input: {}", render(&self.input));
        let _ = writeln!(out, "output: {}", render(&self.output));
        let _ = writeln!(out, "threshold: {}", self.threshold);
        if let Some(t) = self.theoretical_threshold {
            let _ = writeln!(out, "theoretical threshold: {t}");
        }
        let _ = writeln!(out, "substitutions: {}", self.substitutions.len());
        for s in &self.substitutions {
            let stable = s
                .stable_from
                .map(|n| format!(" (stable from n = {n})"))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "  {} => {} [{}]{stable}",
                render(&s.subformula),
                render(&s.replacement),
                s.verdict.tag()
            );
        }
        for v in &self.verification {
            let _ = writeln!(
                out,
                "verification {}: exhaustive sizes {:?} ({} interpretations), {} samples of size <= {}: {}",
                v.semiring,
                v.exhaustive_sizes,
                v.exhaustive_checked,
                v.sampled,
                v.sample_max,
                if v.passed() { "PASS" } else { "FAIL" }
            );
            if let Some((pi, a, b)) = &v.failure {
                let s = pi.semiring();
                let _ = writeln!(out, "  input value {} vs output value {}", s.show(a), s.show(b));
                out.push_str(&pi.to_text());
            }
        }
        out
    }
}

/// Either a verified rewrite or the gate's refutation.
#[derive(Clone, Debug)]
pub enum RewriteOutcome {
    Rewritten(Box<RewriteReport>),
    NotPreserved(Box<PreservationVerdict>),
}

fn split_flavors(psi: &Formula) -> Result<(Formula, Formula)> {
    if !psi.is_sentence() {
        return Err(precondition("rewriting expects a sentence"));
    }
    if psi.is_fo() {
        Ok((psi.clone(), fo_to_foneq(psi)?))
    } else {
        Ok((foneq_to_fo(psi)?, psi.clone()))
    }
}

fn gate(fo: &Formula, spec: &SemiringSpec, cfg: &RewriteConfig) -> Result<Option<PreservationVerdict>> {
    let space = SearchSpace::new(cfg.gate_sizes.clone(), default_grid(spec));
    let v = check_preservation(fo, spec, Property::Extensions, &space)?;
    Ok(v.is_refuted().then_some(v))
}

/// Compares `psi` and `out` on all interpretations up to `exhaustive_max`
/// and on random ones up to `sample_max`, exactly.
fn verify(
    psi: &Formula,
    out: &Formula,
    spec: &SemiringSpec,
    grid: &[Value],
    cfg: &RewriteConfig,
    salt: u64,
) -> Result<Verification> {
    let vocab = psi.vocabulary()?;
    let values: Vec<Value> = grid.iter().filter(|v| !spec.is_zero(v)).cloned().collect();
    let mut v = Verification {
        semiring: spec.clone(),
        exhaustive_sizes: vec![],
        exhaustive_checked: 0,
        sampled: 0,
        sample_max: cfg.sample_max,
        failure: None,
    };
    let differs = |pi: Interpretation| -> Result<Option<(Interpretation, Value, Value)>> {
        let (a, b) = (eval(&pi, psi)?, eval(&pi, out)?);
        Ok((a != b).then_some((pi, a, b)))
    };
    for n in 1..=cfg.exhaustive_max {
        let all = match enumerate_interpretations(spec, &vocab, n, &values) {
            Ok(e) if e.total() <= cfg.exhaustive_guard => e,
            Ok(_) | Err(Error::Guard(_)) => continue,
            Err(e) => return Err(e),
        };
        v.exhaustive_sizes.push(n);
        for pi in all {
            v.exhaustive_checked += 1;
            if let Some(f) = differs(pi)? {
                v.failure = Some(f);
                return Ok(v);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ salt);
    for _ in 0..cfg.samples {
        let n = rng.gen_range(1..=cfg.sample_max.max(1));
        let pi = random_interpretation(spec, &vocab, n, grid, &mut rng)?;
        v.sampled += 1;
        if let Some(f) = differs(pi)? {
            v.failure = Some(f);
            return Ok(v);
        }
    }
    Ok(v)
}

/// `∃x₁…∃xₙ(⋀ xᵢ≠xⱼ ∧ φ) ∨ ⋁_{i≤n} ψᵢ`, flattened; for `n = 1` just `φ`.
fn combine(psi: &Formula, phi: &Formula, n: usize) -> Result<Formula> {
    let theta = if n <= 1 {
        phi.clone()
    } else {
        let xs = fresh_tuple(&and(psi.clone(), phi.clone()), n);
        let guarded = xs.iter().rev().fold(and(distinct_guard(&xs), phi.clone()), |acc, x| {
            Formula::Exists(x.clone(), Box::new(acc))
        });
        let mut parts = vec![guarded];
        for i in 1..=n {
            parts.push(psi_n(psi, i)?);
        }
        big_or(parts)
    };
    flatten_sigma1(&simplify_absorptive(&theta))
}

type Suite<'a> = Vec<(SemiringSpec, Vec<Value>, u64)>;

/// Tries `n = 1, 2, …` until the combination passes every suite.
fn finish(
    psi: &Formula,
    phi: &Formula,
    suites: &Suite<'_>,
    cfg: &RewriteConfig,
) -> Result<(Formula, usize, Vec<Verification>)> {
    let mut last = None;
    for n in 1..=cfg.max_threshold.max(1) {
        let out = combine(psi, phi, n)?;
        let mut checks = Vec::new();
        for (spec, grid, salt) in suites {
            let v = verify(psi, &out, spec, grid, cfg, *salt)?;
            let ok = v.passed();
            checks.push(v);
            if !ok {
                break;
            }
        }
        let ok = checks.iter().all(Verification::passed);
        last = Some((out, n, checks));
        if ok {
            break;
        }
    }
    Ok(last.expect("at least one threshold is tried"))
}

/// Σ₁ rewriting over Viterbi, tropical, Łukasiewicz or doubt: every universal
/// subformula `∀≠y φ` of the FO≠ form is replaced by `⊤` if it is eventually
/// trivial and by `⊥` otherwise; the result is combined with `ψ₁ … ψₙ` for the
/// least `n` passing verification and flattened. Runs an extension-preservation
/// gate first; a refuted gate is returned instead of a rewrite.
pub fn rewrite_sigma1_strict(psi: &Formula, spec: &SemiringSpec, cfg: &RewriteConfig) -> Result<RewriteOutcome> {
    if !matches!(
        spec,
        SemiringSpec::Viterbi | SemiringSpec::Tropical | SemiringSpec::Lukasiewicz | SemiringSpec::Doubt
    ) {
        return Err(precondition(format!(
            "{spec} is not one of viterbi, tropical, lukasiewicz, doubt"
        )));
    }
    let (fo, neq) = split_flavors(psi)?;
    if let Some(v) = gate(&fo, spec, cfg)? {
        return Ok(RewriteOutcome::NotPreserved(Box::new(v)));
    }
    let paths = find_postorder(&neq, &|f| matches!(f, Formula::ForallD(..)));
    let mut subs = Vec::new();
    for p in &paths {
        let sub = subformula_at(&neq, p)?.clone();
        let verdict = is_eventually_trivial(&sub, None)?;
        let (replacement, kind) = match &verdict {
            EventualVerdict::Trivial { .. } => (Formula::True, SubVerdict::Trivial),
            EventualVerdict::NonTrivial { .. } => (Formula::False, SubVerdict::Redundant),
            EventualVerdict::Unstable { verdicts } => {
                return Err(Error::Verification(format!(
                    "triviality of `{}` did not stabilize: {verdicts:?}",
                    render(&sub)
                )))
            }
        };
        subs.push(Substitution {
            subformula: sub,
            replacement,
            verdict: kind,
            stable_from: verdict.stable_from(),
        });
    }
    let mut cur = neq.clone();
    for (p, s) in paths.iter().zip(&subs) {
        cur = substitute_subformula(&cur, p, &s.replacement)?;
    }
    let phi = foneq_to_fo(&simplify_absorptive(&cur))?;
    let suites = vec![(spec.clone(), default_grid(spec), 1)];
    let (output, threshold, verification) = finish(&fo, &phi, &suites, cfg)?;
    let r = neq.qr() as u128;
    let theoretical = (1u128 << neq.size().min(120)).saturating_add(r + 1).saturating_mul(2);
    Ok(RewriteOutcome::Rewritten(Box::new(RewriteReport {
        input: psi.clone(),
        output,
        threshold,
        theoretical_threshold: Some(theoretical),
        substitutions: subs,
        verification,
    })))
}

/// Σ₁ rewriting valid in every lattice semiring other than 𝔹. Repeatedly
/// takes an innermost `∀≠y φ` with universal-free `φ`, brings `φ` into
/// existential prenex DNF, keeps the disjuncts whose literals do not mention
/// `y` and drops the rest. Verified by exact S₃ comparison and fuzzy sampling.
pub fn rewrite_sigma1_lattice(psi: &Formula, cfg: &RewriteConfig) -> Result<RewriteOutcome> {
    let (fo, neq) = split_flavors(psi)?;
    let s3 = SemiringSpec::S3;
    let gate_cfg = RewriteConfig {
        gate_sizes: cfg.gate_sizes.iter().copied().chain([3]).collect(),
        ..cfg.clone()
    };
    if let Some(v) = gate(&fo, &s3, &gate_cfg)? {
        return Ok(RewriteOutcome::NotPreserved(Box::new(v)));
    }
    let mut cur = neq;
    let mut subs = Vec::new();
    let innermost = |f: &Formula| matches!(f, Formula::ForallD(_, _, b) if !b.has_universal());
    while let Some(p) = find_postorder(&cur, &innermost).into_iter().next() {
        let sub = subformula_at(&cur, &p)?.clone();
        let Formula::ForallD(y, _, body) = &sub else {
            unreachable!()
        };
        let dnf = existential_prenex_dnf(body)?;
        let total = dnf.disjuncts.len();
        let chi: Vec<Formula> = dnf
            .disjuncts
            .into_iter()
            .filter(|d| !d.mentions(y))
            .map(|mut d| {
                for (_, avoid) in &mut d.prefix {
                    avoid.retain(|x| x != y);
                }
                d.to_formula()
            })
            .collect();
        let verdict = if chi.is_empty() {
            SubVerdict::Redundant
        } else {
            SubVerdict::ContinuitySplit
        };
        let _ = total;
        let replacement = big_or(chi);
        cur = simplify_absorptive(&substitute_subformula(&cur, &p, &replacement)?);
        subs.push(Substitution {
            subformula: sub,
            replacement,
            verdict,
            stable_from: None,
        });
    }
    let phi = foneq_to_fo(&cur)?;
    let fuzzy_grid = vec![rat_value(1, 4), rat_value(1, 2), rat_value(3, 4), rat_value(1, 1)];
    let suites = vec![(s3.clone(), default_grid(&s3), 1), (SemiringSpec::Fuzzy, fuzzy_grid, 2)];
    let (output, threshold, verification) = finish(&fo, &phi, &suites, cfg)?;
    Ok(RewriteOutcome::Rewritten(Box::new(RewriteReport {
        input: psi.clone(),
        output,
        threshold,
        theoretical_threshold: None,
        substitutions: subs,
        verification,
    })))
}
