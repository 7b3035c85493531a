//! `semfo`: command line front end.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use semfo::eval::eval;
use semfo::formula::{parse_sentence, render, Formula, Vocabulary};
use semfo::interpretation::{is_subinterpretation, Interpretation};
use semfo::preservation::{
    check_preservation, default_grid, is_eventually_trivial, is_trivial_at, probe_threshold, rewrite_sigma1_lattice,
    rewrite_sigma1_strict, s3_entailment, EventualVerdict, Property, RewriteConfig, RewriteOutcome, S3Verdict,
    SearchSpace,
};
use semfo::provenance::{degree, identify_relation, pi_n, Monomial, NatPoly, PVar, PolyFlavor};
use semfo::semiring::{rat_value, SemiringSpec, Value};
use semfo::strategy::{build_game_tree, classify, optimal, StrategyClass, STRATEGY_GUARD};
use semfo::Error;

#[derive(Parser)]
#[command(name = "semfo", version, about = "First-order logic under semiring semantics")]
struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Upper bound on enumerated objects.
    #[arg(long, global = true)]
    guard: Option<u128>,
    /// Print only the result line.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate a sentence on an interpretation file.
    Eval {
        #[arg(long)]
        semiring: Option<String>,
        #[arg(long)]
        interp: PathBuf,
        #[arg(long)]
        formula: String,
    },
    /// Count, list, classify or optimize evaluation strategies.
    Strategies(StrategiesArgs),
    /// Evaluate a sentence on the generic polynomial interpretation of size n.
    Provenance {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "natpoly")]
        semiring: String,
    },
    /// Bounded preservation check.
    Check {
        #[arg(long)]
        property: String,
        #[arg(long)]
        semiring: String,
        #[arg(long)]
        formula: String,
        #[arg(long, default_value_t = 3)]
        max_size: usize,
        /// Comma separated literal values; defaults to the semiring's grid.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Triviality of a formula at one size or over the probe range.
    Trivial {
        #[arg(long)]
        formula: String,
        #[arg(long, conflicts_with = "probe")]
        n: Option<usize>,
        #[arg(long)]
        probe: bool,
    },
    /// Rewrite an extension-preserved sentence into Σ₁.
    Rewrite {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        formula: String,
        /// Target semiring of the strict pipeline.
        #[arg(long, default_value = "viterbi")]
        semiring: String,
    },
    /// Bounded S₃ entailment between two files of sentences.
    Entail {
        #[arg(long, default_value = "s3")]
        semiring: String,
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        psi: PathBuf,
        /// `a..b` or a comma separated list.
        #[arg(long, default_value = "1..3")]
        sizes: String,
    },
    /// Replay a worked example and assert its values.
    Repro {
        #[arg(value_enum)]
        name: Example,
        #[arg(long, default_value_t = 4)]
        n: usize,
    },
}

#[derive(Args)]
struct StrategiesArgs {
    #[arg(long)]
    formula: String,
    #[arg(long)]
    n: usize,
    #[arg(long, group = "what")]
    list: bool,
    #[arg(long, group = "what", requires = "interp")]
    optimal: bool,
    #[arg(long, group = "what")]
    classify: bool,
    #[arg(long)]
    interp: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Strict,
    Lattice,
}

#[derive(Clone, Copy, ValueEnum)]
enum Example {
    ViterbiExtension,
    DoubtExtension,
    NatPolynomial,
    FuzzyRewrite,
}

/// Text to print and the exit code.
struct Report {
    text: String,
    code: u8,
}

impl Report {
    fn ok(text: String) -> Report {
        Report { text, code: 0 }
    }

    fn verdict(text: String, holds: bool) -> Report {
        Report {
            text,
            code: if holds { 0 } else { 1 },
        }
    }
}

enum Failure {
    Lib(Error),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        Failure::Lib(e)
    }
}

type Outcome = Result<Report, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {}: {e}", path.display())))
}

fn sentences(path: &Path) -> Result<Vec<Formula>, Failure> {
    let mut out = Vec::new();
    for line in read(path)?.lines() {
        let line = line.split('#').next().unwrap().trim();
        if !line.is_empty() {
            out.push(parse_sentence(line)?);
        }
    }
    Ok(out)
}

fn parse_sizes(s: &str) -> Result<Vec<usize>, Failure> {
    let bad = || usage(format!("bad size list `{s}`"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    if let Some((a, b)) = s.split_once("..") {
        let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
        if a == 0 || a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(num).collect()
}

fn cmd_eval(semiring: Option<String>, interp: &Path, formula: &str) -> Outcome {
    let spec = semiring.as_deref().map(SemiringSpec::parse).transpose()?;
    let pi = Interpretation::parse(&read(interp)?, spec.as_ref())?;
    let f = parse_sentence(formula)?;
    Ok(Report::ok(format!("{}\n", pi.semiring().show(&eval(&pi, &f)?))))
}

fn cmd_strategies(a: StrategiesArgs, guard: u128, quiet: bool) -> Outcome {
    let f = parse_sentence(&a.formula)?;
    let tree = build_game_tree(&f, a.n)?;
    let mut out = String::new();
    if a.optimal {
        let pi = Interpretation::parse(&read(a.interp.as_deref().unwrap())?, None)?;
        if pi.size() != a.n {
            return Err(usage(format!(
                "--n {} but the interpretation has size {}",
                a.n,
                pi.size()
            )));
        }
        let opt = optimal(&pi, &f)?;
        let _ = writeln!(out, "optimal value: {}", pi.semiring().show(&opt.value));
        let _ = writeln!(out, "optimal strategies: {}", opt.count);
        if !quiet {
            let _ = write!(out, "{}", opt.strategy);
        }
        return Ok(Report::ok(out));
    }
    let _ = writeln!(out, "strategies: {}", tree.count_strategies());
    if a.list || a.classify {
        let all = tree.enumerate(guard)?;
        let mut counts = [0usize; 3];
        for (i, t) in all.iter().enumerate() {
            let stats = classify(t);
            counts[stats.class as usize] += 1;
            if quiet {
                continue;
            }
            if a.list {
                let _ = writeln!(out, "strategy {}:", i + 1);
                for line in t.to_string().lines() {
                    let _ = writeln!(out, "  {line}");
                }
            } else {
                let _ = writeln!(out, "strategy {}: {}", i + 1, stats.class);
            }
        }
        if a.classify {
            for c in [
                StrategyClass::Existential,
                StrategyClass::AlmostExistential,
                StrategyClass::ReliesOnForall,
            ] {
                let _ = writeln!(out, "{c}: {}", counts[c as usize]);
            }
        }
    }
    Ok(Report::ok(out))
}

fn cmd_provenance(formula: &str, n: usize, semiring: &str) -> Outcome {
    let flavor = match semiring {
        "natpoly" => PolyFlavor::Nat,
        s if s == "spoly" || s.starts_with("spoly:") => PolyFlavor::Absorptive,
        _ => return Err(usage(format!("provenance needs natpoly or spoly, not `{semiring}`"))),
    };
    let f = parse_sentence(formula)?;
    let pi = pi_n(&f.vocabulary()?, n, flavor)?;
    Ok(Report::ok(format!("{}\n", eval(&pi, &f)?)))
}

fn cmd_check(
    property: &str,
    semiring: &str,
    formula: &str,
    max_size: usize,
    grid: Option<&str>,
    guard: Option<u128>,
) -> Outcome {
    let property = Property::parse(property)?;
    let spec = SemiringSpec::parse(semiring)?;
    let f = parse_sentence(formula)?;
    let grid = match grid {
        Some(g) => g
            .split(',')
            .map(|t| spec.parse_value(t))
            .collect::<Result<Vec<_>, _>>()?,
        None => default_grid(&spec),
    };
    let mut space = SearchSpace::new((1..=max_size).collect(), grid);
    if let Some(g) = guard {
        space.guard = g;
    }
    let verdict = check_preservation(&f, &spec, property, &space)?;
    Ok(Report::verdict(verdict.render(), !verdict.is_refuted()))
}

fn cmd_trivial(formula: &str, n: Option<usize>, quiet: bool) -> Outcome {
    let f = semfo::formula::parse(formula)?;
    if let Some(n) = n {
        let t = is_trivial_at(&f, n)?;
        return Ok(Report::verdict(
            format!("trivial at n = {n}: {}\n", if t { "yes" } else { "no" }),
            t,
        ));
    }
    let threshold = probe_threshold(&f);
    let verdict = is_eventually_trivial(&f, None)?;
    let mut out = String::new();
    let (text, code) = match &verdict {
        EventualVerdict::Trivial { from, probed } => (
            format!(
                "eventually trivial from n = {from} (probed {}..={})",
                probed.0, probed.1
            ),
            0,
        ),
        EventualVerdict::NonTrivial { from, probed } => (
            format!(
                "eventually non-trivial from n = {from} (probed {}..={})",
                probed.0, probed.1
            ),
            1,
        ),
        EventualVerdict::Unstable { verdicts } => {
            let tail: Vec<String> = verdicts
                .iter()
                .map(|(n, t)| format!("{n}:{}", if *t { "yes" } else { "no" }))
                .collect();
            (format!("unstable: {}", tail.join(" ")), 2)
        }
    };
    let _ = writeln!(out, "{text}");
    if !quiet {
        let _ = writeln!(out, "probe threshold: {threshold} (conservative, not a proven bound)");
    }
    Ok(Report { text: out, code })
}

fn cmd_rewrite(mode: Mode, formula: &str, semiring: &str, seed: u64, quiet: bool) -> Outcome {
    let f = parse_sentence(formula)?;
    let cfg = RewriteConfig {
        seed,
        ..RewriteConfig::default()
    };
    let outcome = match mode {
        Mode::Strict => rewrite_sigma1_strict(&f, &SemiringSpec::parse(semiring)?, &cfg)?,
        Mode::Lattice => rewrite_sigma1_lattice(&f, &cfg)?,
    };
    Ok(match outcome {
        RewriteOutcome::Rewritten(r) => {
            let mut out = format!("{}\n", render(&r.output));
            if !quiet {
                out.push_str(&r.render());
            }
            Report::verdict(out, r.passed())
        }
        RewriteOutcome::NotPreserved(v) => Report::verdict(format!("not extension preserved\n{}", v.render()), false),
    })
}

fn cmd_entail(semiring: &str, phi: &Path, psi: &Path, sizes: &str) -> Outcome {
    if SemiringSpec::parse(semiring)? != SemiringSpec::S3 {
        return Err(usage("entail supports --semiring s3 only"));
    }
    let (phi, psi) = (sentences(phi)?, sentences(psi)?);
    Ok(match s3_entailment(&phi, &psi, &parse_sizes(sizes)?)? {
        S3Verdict::ConsistentWithEntailment { checked } => {
            Report::verdict(format!("no counterexample among {checked} interpretations\n"), true)
        }
        S3Verdict::Refuted(pi) => Report::verdict(format!("refuted by\n{}", pi.to_text()), false),
    })
}

fn line(out: &mut String, ok: &mut bool, cond: bool, text: String) {
    *ok &= cond;
    let _ = writeln!(out, "{} {text}", if cond { "ok  " } else { "FAIL" });
}

fn extension_pair(spec: SemiringSpec, values: [Value; 2], want: [Value; 2]) -> Outcome {
    let f = parse_sentence("E x. A y. R(x)")?;
    let vocab = Vocabulary::from_pairs([("R", 1)])?;
    let mut a = Interpretation::numbered(spec.clone(), 1, &vocab)?;
    a.set_atom("R", &[0], values[0].clone())?;
    let mut b = Interpretation::numbered(spec.clone(), 2, &vocab)?;
    b.set_atom("R", &[0], values[0].clone())?;
    b.set_atom("R", &[1], values[1].clone())?;
    let (va, vb) = (eval(&a, &f)?, eval(&b, &f)?);
    let (mut out, mut ok) = (String::new(), true);
    let _ = writeln!(out, "formula: {}", render(&f));
    line(
        &mut out,
        &mut ok,
        is_subinterpretation(&a, &b),
        "pi_A is a subinterpretation of pi_B".into(),
    );
    line(&mut out, &mut ok, va == want[0], format!("pi_A = {}", spec.show(&va)));
    line(&mut out, &mut ok, vb == want[1], format!("pi_B = {}", spec.show(&vb)));
    line(
        &mut out,
        &mut ok,
        !spec.leq(&va, &vb),
        format!("{} is not below {}", spec.show(&va), spec.show(&vb)),
    );
    let space = SearchSpace::new(vec![1, 2], values.to_vec());
    let verdict = check_preservation(&f, &spec, Property::Extensions, &space)?;
    line(
        &mut out,
        &mut ok,
        verdict.is_refuted(),
        "extension check refutes".into(),
    );
    let _ = writeln!(out, "{}", if ok { "PASS" } else { "FAIL" });
    Ok(Report::verdict(out, ok))
}

fn repro(name: Example, n: usize) -> Outcome {
    match name {
        Example::ViterbiExtension => extension_pair(
            SemiringSpec::Viterbi,
            [rat_value(1, 2), rat_value(1, 2)],
            [rat_value(1, 2), rat_value(1, 4)],
        ),
        Example::DoubtExtension => extension_pair(
            SemiringSpec::Doubt,
            [rat_value(1, 2), rat_value(1, 2)],
            [rat_value(1, 2), rat_value(1, 1)],
        ),
        Example::NatPolynomial => {
            if n == 0 {
                return Err(usage("--n must be at least 1"));
            }
            let f = parse_sentence("E x. A y. R(x)")?;
            let g = parse_sentence("E x. E y. R(x) & R(y)")?;
            let pi = pi_n(&f.vocabulary()?, n, PolyFlavor::Nat)?;
            let Value::NatPoly(p) = eval(&pi, &f)? else {
                return Err(Error::Verification("not a polynomial".into()).into());
            };
            let got = identify_relation(&p, "R", "x");
            let exp = u32::try_from(n).map_err(|_| usage("--n is too large"))?;
            let want = NatPoly::term(n.into(), Monomial::from_pairs(vec![(PVar::named("x"), exp)]));
            let (mut out, mut ok) = (String::new(), true);
            let _ = writeln!(out, "formula: {}", render(&f));
            line(&mut out, &mut ok, got == want, format!("pi_{n} = {got}"));
            let d = degree(&eval(&pi, &g)?)?;
            line(&mut out, &mut ok, d == 2, format!("deg pi_{n}[{}] = {d}", render(&g)));
            let _ = writeln!(out, "{}", if ok { "PASS" } else { "FAIL" });
            Ok(Report::verdict(out, ok))
        }
        Example::FuzzyRewrite => {
            let cfg = RewriteConfig::default();
            let (mut out, mut ok) = (String::new(), true);
            for src in ["A y. E z. R(z)", "A y. (E z. R(z)) | (E z. R(z) & Q(y))"] {
                let f = parse_sentence(src)?;
                match rewrite_sigma1_lattice(&f, &cfg)? {
                    RewriteOutcome::Rewritten(r) => {
                        let got = render(&r.output);
                        line(&mut out, &mut ok, got == "E z. R(z)", format!("{src} => {got}"));
                        line(&mut out, &mut ok, r.passed(), "verified on S3 and fuzzy".into());
                    }
                    RewriteOutcome::NotPreserved(_) => line(&mut out, &mut ok, false, format!("{src}: gate refuted")),
                }
            }
            let _ = writeln!(out, "{}", if ok { "PASS" } else { "FAIL" });
            Ok(Report::verdict(out, ok))
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let guard = cli.guard.unwrap_or(STRATEGY_GUARD);
    match cli.cmd {
        Cmd::Eval {
            semiring,
            interp,
            formula,
        } => cmd_eval(semiring, &interp, &formula),
        Cmd::Strategies(a) => cmd_strategies(a, guard, cli.quiet),
        Cmd::Provenance { formula, n, semiring } => cmd_provenance(&formula, n, &semiring),
        Cmd::Check {
            property,
            semiring,
            formula,
            max_size,
            grid,
        } => cmd_check(&property, &semiring, &formula, max_size, grid.as_deref(), cli.guard),
        Cmd::Trivial { formula, n, probe } => {
            if n.is_none() && !probe {
                return Err(usage("trivial needs --n <k> or --probe"));
            }
            cmd_trivial(&formula, n, cli.quiet)
        }
        Cmd::Rewrite {
            mode,
            formula,
            semiring,
        } => cmd_rewrite(mode, &formula, &semiring, cli.seed, cli.quiet),
        Cmd::Entail {
            semiring,
            phi,
            psi,
            sizes,
        } => cmd_entail(&semiring, &phi, &psi, &sizes),
        Cmd::Repro { name, n } => repro(name, n),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(r) => {
            print!("{}", r.text);
            ExitCode::from(r.code)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
