use std::collections::BTreeSet;

use super::ast::{and, big_and, big_or, default_avoid, or, Flavor, Formula, Term, Var};
use crate::error::{invalid, Error, Result};

/// A name not in `used`, built from `base` by appending digits.
pub fn fresh_var(base: &str, used: &BTreeSet<Var>) -> Var {
    let base = base.trim_end_matches(|c: char| c.is_ascii_digit());
    let base = if base.is_empty() { "v" } else { base };
    if !used.contains(base) {
        return base.to_string();
    }
    (1..).map(|i| format!("{base}{i}")).find(|c| !used.contains(c)).unwrap()
}

fn rename_term(t: &Term, y: &str, x: &str) -> Term {
    match t {
        Term::Var(v) if v == y => Term::Var(x.to_string()),
        _ => t.clone(),
    }
}

fn rename_avoid(s: &[Var], y: &str, x: &str) -> Vec<Var> {
    let mut out: Vec<Var> = s
        .iter()
        .map(|v| if v == y { x.to_string() } else { v.clone() })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Replaces the free occurrences of `y` by the variable `x`, renaming binders
/// that would capture `x`.
pub fn rename_free(f: &Formula, y: &str, x: &str) -> Formula {
    if y == x {
        return f.clone();
    }
    match f {
        Formula::True | Formula::False => f.clone(),
        Formula::Atom { rel, args, neg } => Formula::Atom {
            rel: rel.clone(),
            args: args.iter().map(|t| rename_term(t, y, x)).collect(),
            neg: *neg,
        },
        Formula::Eq(a, b) => Formula::Eq(rename_term(a, y, x), rename_term(b, y, x)),
        Formula::Neq(a, b) => Formula::Neq(rename_term(a, y, x), rename_term(b, y, x)),
        Formula::And(a, b) => and(rename_free(a, y, x), rename_free(b, y, x)),
        Formula::Or(a, b) => or(rename_free(a, y, x), rename_free(b, y, x)),
        Formula::Exists(v, b) | Formula::Forall(v, b) | Formula::ExistsD(v, _, b) | Formula::ForallD(v, _, b) => {
            let avoid = match f {
                Formula::ExistsD(_, s, _) | Formula::ForallD(_, s, _) => rename_avoid(s, y, x),
                _ => vec![],
            };
            let (v2, body) = if v == y {
                (v.clone(), (**b).clone())
            } else if v == x && b.free_vars().contains(y) {
                let mut used = b.all_vars();
                used.insert(x.to_string());
                used.insert(y.to_string());
                let w = fresh_var(v, &used);
                (w.clone(), rename_free(&rename_free(b, v, &w), y, x))
            } else {
                (v.clone(), rename_free(b, y, x))
            };
            rebuild_quant(f, v2, avoid, body)
        }
    }
}

fn rebuild_quant(template: &Formula, v: Var, avoid: Vec<Var>, body: Formula) -> Formula {
    let body = Box::new(body);
    match template {
        Formula::Exists(..) => Formula::Exists(v, body),
        Formula::Forall(..) => Formula::Forall(v, body),
        Formula::ExistsD(..) => Formula::ExistsD(v, avoid, body),
        Formula::ForallD(..) => Formula::ForallD(v, avoid, body),
        _ => unreachable!("not a quantifier"),
    }
}

/// Renames bound variables so that every binder introduces a distinct name
/// that is also distinct from the free variables. The first binder of each
/// name keeps it.
pub fn standardize_apart(f: &Formula) -> Formula {
    let mut used = f.free_vars();
    standardize(f, &mut used)
}

fn standardize(f: &Formula, used: &mut BTreeSet<Var>) -> Formula {
    match f {
        Formula::And(a, b) => {
            let a = standardize(a, used);
            and(a, standardize(b, used))
        }
        Formula::Or(a, b) => {
            let a = standardize(a, used);
            or(a, standardize(b, used))
        }
        Formula::Exists(v, b) | Formula::Forall(v, b) | Formula::ExistsD(v, _, b) | Formula::ForallD(v, _, b) => {
            let avoid = match f {
                Formula::ExistsD(_, s, _) | Formula::ForallD(_, s, _) => s.clone(),
                _ => vec![],
            };
            let (w, body) = if used.contains(v) {
                let mut all = used.clone();
                all.extend(b.all_vars());
                let w = fresh_var(v, &all);
                (w.clone(), rename_free(b, v, &w))
            } else {
                (v.clone(), (**b).clone())
            };
            used.insert(w.clone());
            let body = standardize(&body, used);
            rebuild_quant(f, w, avoid, body)
        }
        _ => f.clone(),
    }
}

/// Constant folding valid in every semiring: `φ∨⊥`, `φ∧⊤`, `φ∧⊥`,
/// `Q y. ⊥` for existential and `Q y. ⊤` for universal quantifiers.
pub fn simplify(f: &Formula) -> Formula {
    fold(f, false)
}

/// As [`simplify`], additionally using `⊤∨φ = ⊤` and `∃y φ = φ` for `y` not
/// free in `φ` (plain quantifier), valid in absorptive semirings.
pub fn simplify_absorptive(f: &Formula) -> Formula {
    fold(f, true)
}

fn fold(f: &Formula, absorptive: bool) -> Formula {
    use Formula::*;
    match f {
        And(a, b) => match (fold(a, absorptive), fold(b, absorptive)) {
            (False, _) | (_, False) => False,
            (True, x) | (x, True) => x,
            (x, y) => and(x, y),
        },
        Or(a, b) => match (fold(a, absorptive), fold(b, absorptive)) {
            (False, x) | (x, False) => x,
            (True, _) | (_, True) if absorptive => True,
            (x, y) => or(x, y),
        },
        Exists(v, b) => match fold(b, absorptive) {
            False => False,
            x if absorptive && !x.free_vars().contains(v) => x,
            x => Exists(v.clone(), Box::new(x)),
        },
        Forall(v, b) => match fold(b, absorptive) {
            True => True,
            x => Forall(v.clone(), Box::new(x)),
        },
        ExistsD(v, s, b) => match fold(b, absorptive) {
            False => False,
            x => ExistsD(v.clone(), s.clone(), Box::new(x)),
        },
        ForallD(v, s, b) => match fold(b, absorptive) {
            True => True,
            x => ForallD(v.clone(), s.clone(), Box::new(x)),
        },
        _ => f.clone(),
    }
}

/// FO → FO≠. Free variables are read as denoting pairwise distinct elements;
/// for sentences the translation is equivalent in every semiring.
pub fn fo_to_foneq(f: &Formula) -> Result<Formula> {
    f.expect_flavor(Flavor::Fo)?;
    if !f.constants().is_empty() {
        return Err(invalid("fo_to_foneq expects a formula without constants"));
    }
    Ok(to_foneq(&standardize_apart(f)))
}

fn to_foneq(f: &Formula) -> Formula {
    match f {
        Formula::Eq(a, b) => {
            if a == b {
                Formula::True
            } else {
                Formula::False
            }
        }
        Formula::Neq(a, b) => {
            if a == b {
                Formula::False
            } else {
                Formula::True
            }
        }
        Formula::And(a, b) => and(to_foneq(a), to_foneq(b)),
        Formula::Or(a, b) => or(to_foneq(a), to_foneq(b)),
        Formula::Exists(y, b) | Formula::Forall(y, b) => {
            let free: Vec<Var> = f.free_vars().into_iter().collect();
            let universal = matches!(f, Formula::Forall(..));
            let mut parts: Vec<Formula> = free.iter().map(|x| to_foneq(&rename_free(b, y, x))).collect();
            let body = Box::new(to_foneq(b));
            parts.push(if universal {
                Formula::ForallD(y.clone(), free.clone(), body)
            } else {
                Formula::ExistsD(y.clone(), free.clone(), body)
            });
            if universal {
                big_and(parts)
            } else {
                big_or(parts)
            }
        }
        _ => f.clone(),
    }
}

/// FO≠ → FO, guarding each distinct quantifier with (in)equalities against
/// its exclusion set.
pub fn foneq_to_fo(f: &Formula) -> Result<Formula> {
    f.expect_flavor(Flavor::FoNeq)?;
    Ok(to_fo(f))
}

fn to_fo(f: &Formula) -> Formula {
    match f {
        Formula::And(a, b) => and(to_fo(a), to_fo(b)),
        Formula::Or(a, b) => or(to_fo(a), to_fo(b)),
        Formula::ExistsD(y, s, b) => {
            let guard: Vec<Formula> = s
                .iter()
                .map(|x| Formula::Neq(Term::Var(y.clone()), Term::Var(x.clone())))
                .collect();
            let body = if guard.is_empty() {
                to_fo(b)
            } else {
                and(big_and(guard), to_fo(b))
            };
            Formula::Exists(y.clone(), Box::new(body))
        }
        Formula::ForallD(y, s, b) => {
            // Mutually exclusive cases, exact in every semiring.
            let neq = |x: &Var| Formula::Neq(Term::Var(y.clone()), Term::Var(x.clone()));
            let mut cases: Vec<Formula> = (0..s.len())
                .map(|i| {
                    let hit = Formula::Eq(Term::Var(y.clone()), Term::Var(s[i].clone()));
                    big_and(s[..i].iter().map(neq).chain([hit]))
                })
                .collect();
            cases.push(big_and(s.iter().map(neq).chain([to_fo(b)])));
            Formula::Forall(y.clone(), Box::new(big_or(cases)))
        }
        _ => f.clone(),
    }
}

/// Names `x1..xn` (or a variant) avoiding every variable of `f`.
pub fn fresh_tuple(f: &Formula, n: usize) -> Vec<Var> {
    let used = f.all_vars();
    let mut base = "x".to_string();
    loop {
        let names: Vec<Var> = (1..=n).map(|i| format!("{base}{i}")).collect();
        if names.iter().all(|v| !used.contains(v)) {
            return names;
        }
        base.push('_');
    }
}

/// `⋀_{i<j} xᵢ ≠ xⱼ`, or `⊤` for fewer than two variables.
pub fn distinct_guard(xs: &[Var]) -> Formula {
    let mut parts = Vec::new();
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            parts.push(Formula::Neq(Term::Var(xs[i].clone()), Term::Var(xs[j].clone())));
        }
    }
    big_and(parts)
}

/// The existential sentence `ψₙ` whose value is the sum of the values of `ψ`
/// on the size-`n` subinterpretations.
pub fn psi_n(f: &Formula, n: usize) -> Result<Formula> {
    if n < 1 {
        return Err(invalid("psi_n needs n >= 1"));
    }
    f.expect_flavor(Flavor::Fo)?;
    if !f.is_sentence() {
        return Err(invalid("psi_n expects a sentence"));
    }
    let xs = fresh_tuple(f, n);
    let unfolded = unfold(f, &xs);
    let matrix = if n == 1 {
        unfolded
    } else {
        and(distinct_guard(&xs), unfolded)
    };
    Ok(xs
        .iter()
        .rev()
        .fold(matrix, |acc, x| Formula::Exists(x.clone(), Box::new(acc))))
}

fn unfold(f: &Formula, xs: &[Var]) -> Formula {
    match f {
        Formula::And(a, b) => and(unfold(a, xs), unfold(b, xs)),
        Formula::Or(a, b) => or(unfold(a, xs), unfold(b, xs)),
        Formula::Exists(y, b) => big_or(xs.iter().map(|x| unfold(&rename_free(b, y, x), xs))),
        Formula::Forall(y, b) => big_and(xs.iter().map(|x| unfold(&rename_free(b, y, x), xs))),
        _ => f.clone(),
    }
}

/// Pulls all existential quantifiers of a positive Boolean combination of
/// existential FO sentences to the front. Equivalent over additively
/// idempotent semirings.
pub fn flatten_sigma1(f: &Formula) -> Result<Formula> {
    if f.has_universal() {
        return Err(invalid("flatten_sigma1: input contains a universal quantifier"));
    }
    f.expect_flavor(Flavor::Fo)?;
    let (prefix, matrix) = pull(&standardize_apart(f));
    Ok(prefix
        .into_iter()
        .rev()
        .fold(matrix, |acc, v| Formula::Exists(v, Box::new(acc))))
}

fn pull(f: &Formula) -> (Vec<Var>, Formula) {
    match f {
        Formula::And(a, b) | Formula::Or(a, b) => {
            let (mut pa, ma) = pull(a);
            let (pb, mb) = pull(b);
            pa.extend(pb);
            let m = if matches!(f, Formula::And(..)) {
                and(ma, mb)
            } else {
                or(ma, mb)
            };
            (pa, m)
        }
        Formula::Exists(v, b) => {
            let (mut p, m) = pull(b);
            p.insert(0, v.clone());
            (p, m)
        }
        _ => (vec![], f.clone()),
    }
}

/// Root-to-node child indices.
pub type Path = Vec<usize>;

pub fn subformula_at<'a>(f: &'a Formula, path: &[usize]) -> Result<&'a Formula> {
    let mut cur = f;
    for &i in path {
        cur = cur
            .children()
            .get(i)
            .copied()
            .ok_or_else(|| invalid(format!("invalid path {path:?}")))?;
    }
    Ok(cur)
}

/// Variables bound on the way down to `path` (outermost first).
pub fn binders_along(f: &Formula, path: &[usize]) -> Result<Vec<Var>> {
    let mut out = Vec::new();
    let mut cur = f;
    for &i in path {
        if let Formula::Exists(v, _) | Formula::Forall(v, _) | Formula::ExistsD(v, _, _) | Formula::ForallD(v, _, _) =
            cur
        {
            out.push(v.clone());
        }
        cur = cur
            .children()
            .get(i)
            .copied()
            .ok_or_else(|| invalid(format!("invalid path {path:?}")))?;
    }
    Ok(out)
}

/// Replaces the node at `path`. The replacement's free variables must be
/// visible at that position.
pub fn substitute_subformula(host: &Formula, path: &[usize], replacement: &Formula) -> Result<Formula> {
    let mut visible: BTreeSet<Var> = host.free_vars();
    visible.extend(binders_along(host, path)?);
    if let Some(v) = replacement.free_vars().into_iter().find(|v| !visible.contains(v)) {
        return Err(Error::Invalid(format!(
            "variable `{v}` of the replacement is not in scope at {path:?}"
        )));
    }
    replace(host, path, replacement)
}

fn replace(host: &Formula, path: &[usize], repl: &Formula) -> Result<Formula> {
    let Some((&i, rest)) = path.split_first() else {
        return Ok(repl.clone());
    };
    let bad = || invalid(format!("invalid path component {i}"));
    Ok(match host {
        Formula::And(a, b) | Formula::Or(a, b) => {
            let (a, b) = match i {
                0 => (replace(a, rest, repl)?, (**b).clone()),
                1 => ((**a).clone(), replace(b, rest, repl)?),
                _ => return Err(bad()),
            };
            if matches!(host, Formula::And(..)) {
                and(a, b)
            } else {
                or(a, b)
            }
        }
        Formula::Exists(v, b) | Formula::Forall(v, b) | Formula::ExistsD(v, _, b) | Formula::ForallD(v, _, b) => {
            if i != 0 {
                return Err(bad());
            }
            let avoid = match host {
                Formula::ExistsD(_, s, _) | Formula::ForallD(_, s, _) => s.clone(),
                _ => vec![],
            };
            rebuild_quant(host, v.clone(), avoid, replace(b, rest, repl)?)
        }
        _ => return Err(bad()),
    })
}

/// Paths of all nodes satisfying `pred`, in post-order (children before
/// parents, left before right), so the first hit is leftmost-innermost.
pub fn find_postorder(f: &Formula, pred: &impl Fn(&Formula) -> bool) -> Vec<Path> {
    let mut out = Vec::new();
    let mut path = Vec::new();
    post(f, pred, &mut path, &mut out);
    out
}

fn post(f: &Formula, pred: &impl Fn(&Formula) -> bool, path: &mut Path, out: &mut Vec<Path>) {
    for (i, c) in f.children().into_iter().enumerate() {
        path.push(i);
        post(c, pred, path, out);
        path.pop();
    }
    if pred(f) {
        out.push(path.clone());
    }
}

/// Resets every FO≠ exclusion set to the free variables of its body.
pub fn normalize_avoid(f: &Formula) -> Formula {
    match f {
        Formula::And(a, b) => and(normalize_avoid(a), normalize_avoid(b)),
        Formula::Or(a, b) => or(normalize_avoid(a), normalize_avoid(b)),
        Formula::Exists(v, b) | Formula::Forall(v, b) | Formula::ExistsD(v, _, b) | Formula::ForallD(v, _, b) => {
            let body = normalize_avoid(b);
            let avoid = default_avoid(v, &body);
            rebuild_quant(f, v.clone(), avoid, body)
        }
        _ => f.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse::{parse, parse_sentence};
    use super::*;

    #[test]
    fn fo_to_foneq_with_free_variable() {
        let f = parse("E y. R(x1,y)").unwrap();
        let g = fo_to_foneq(&f).unwrap();
        assert_eq!(g.to_string(), "R(x1,x1) | E! y. R(x1,y)");
    }

    #[test]
    fn foneq_to_fo_guards() {
        let f = parse("E! y. R(x1,y)").unwrap();
        assert_eq!(foneq_to_fo(&f).unwrap().to_string(), "E y. y != x1 & R(x1,y)");
        assert!(matches!(
            foneq_to_fo(&parse("E y. R(y)").unwrap()),
            Err(Error::Flavor(_))
        ));
    }

    #[test]
    fn equalities_collapse() {
        let f = parse_sentence("E x. E y. x = y & R(y)").unwrap();
        let g = simplify(&fo_to_foneq(&f).unwrap());
        assert_eq!(g.to_string(), "E! x. R(x)");
    }

    #[test]
    fn psi_2_shape() {
        let f = parse_sentence("E x. A y. R(x)").unwrap();
        assert_eq!(
            psi_n(&f, 2).unwrap().to_string(),
            "E x1. E x2. x1 != x2 & (R(x1) & R(x1) | R(x2) & R(x2))"
        );
        assert!(psi_n(&f, 0).is_err());
    }

    #[test]
    fn flatten_pulls_out() {
        let f = parse_sentence("(E x. R(x)) & (E y. Q(y))").unwrap();
        assert_eq!(flatten_sigma1(&f).unwrap().to_string(), "E x. E y. R(x) & Q(y)");
        let g = parse_sentence("(E x. R(x)) | (E x. Q(x))").unwrap();
        assert_eq!(flatten_sigma1(&g).unwrap().to_string(), "E x. E x1. R(x) | Q(x1)");
        let h = parse_sentence("E x. R(x)").unwrap();
        assert_eq!(flatten_sigma1(&h).unwrap(), h);
        assert!(flatten_sigma1(&parse_sentence("A x. R(x)").unwrap()).is_err());
    }

    #[test]
    fn substitution_by_path() {
        let f = parse_sentence("E! x. A! y. R(x)").unwrap();
        let g = substitute_subformula(&f, &[0], &Formula::True).unwrap();
        assert_eq!(g.to_string(), "E! x. true");
        assert!(substitute_subformula(&f, &[1], &Formula::True).is_err());
        assert!(substitute_subformula(&f, &[0], &parse("Q(z)").unwrap()).is_err());
    }

    #[test]
    fn rename_avoids_capture() {
        let f = parse("E x. R(x,y)").unwrap();
        let g = rename_free(&f, "y", "x");
        assert_eq!(g.to_string(), "E x1. R(x1,x)");
    }

    #[test]
    fn leftmost_innermost() {
        let f = parse_sentence("A x. (A y. R(y)) | A z. Q(z)").unwrap();
        let paths = find_postorder(&f, &|g| g.is_universal());
        assert_eq!(paths, vec![vec![0, 0], vec![0, 1], vec![]]);
    }
}
