use std::fmt::{self, Write};

use super::ast::{default_avoid, Formula, Term};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(c) => write!(f, "#{}", c + 1),
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        render_into(self, 0, true, &mut s)?;
        f.write_str(&s)
    }
}

/// Renders in the parser's concrete syntax.
pub fn render(f: &Formula) -> String {
    f.to_string()
}

// `prec`: 1 allows a bare disjunction, 2 a bare conjunction, 3 neither.
// `tail`: nothing follows, so a quantifier may extend to the end.
fn render_into(f: &Formula, prec: u8, tail: bool, out: &mut String) -> fmt::Result {
    match f {
        Formula::True => out.push_str("true"),
        Formula::False => out.push_str("false"),
        Formula::Atom { rel, args, neg } => {
            if *neg {
                out.push('~');
            }
            write!(out, "{rel}(")?;
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write!(out, "{a}")?;
            }
            out.push(')');
        }
        Formula::Eq(a, b) => write!(out, "{a} = {b}")?,
        Formula::Neq(a, b) => write!(out, "{a} != {b}")?,
        Formula::Or(l, r) => {
            let paren = prec > 1;
            let tail = tail || paren;
            if paren {
                out.push('(');
            }
            render_into(l, 1, false, out)?;
            out.push_str(" | ");
            render_into(r, 2, tail, out)?;
            if paren {
                out.push(')');
            }
        }
        Formula::And(l, r) => {
            let paren = prec > 2;
            let tail = tail || paren;
            if paren {
                out.push('(');
            }
            render_into(l, 2, false, out)?;
            out.push_str(" & ");
            render_into(r, 3, tail, out)?;
            if paren {
                out.push(')');
            }
        }
        Formula::Exists(v, b) | Formula::Forall(v, b) | Formula::ExistsD(v, _, b) | Formula::ForallD(v, _, b) => {
            let paren = !tail;
            if paren {
                out.push('(');
            }
            let q = match f {
                Formula::Exists(..) => "E",
                Formula::Forall(..) => "A",
                Formula::ExistsD(..) => "E!",
                _ => "A!",
            };
            write!(out, "{q} {v}")?;
            if let Formula::ExistsD(_, avoid, _) | Formula::ForallD(_, avoid, _) = f {
                if *avoid != default_avoid(v, b) {
                    write!(out, " [{}]", avoid.join(","))?;
                }
            }
            out.push_str(". ");
            render_into(b, 0, true, out)?;
            if paren {
                out.push(')');
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::parse::parse;

    #[test]
    fn round_trips() {
        for src in [
            "E x. A y. R(x)",
            "~R(x) | Q(x) & P(x)",
            "(R(x) | Q(x)) & P(x)",
            "(E x. R(x)) & Q(y)",
            "R(y) & (E x. R(x)) | Q(y)",
            "R(y) & E x. R(x) | Q(y)",
            "A! y. E! z. R(z) & Q(y)",
            "E! z [x]. R(z)",
            "x = y | x != #2",
            "(true | false) & true",
            "R(x) | (Q(x) | P(x))",
        ] {
            let f = parse(src).unwrap();
            let printed = f.to_string();
            assert_eq!(printed, src, "render of `{src}`");
            assert_eq!(parse(&printed).unwrap(), f);
        }
    }
}
