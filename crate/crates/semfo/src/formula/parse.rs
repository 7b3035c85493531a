use super::ast::{and, default_avoid, or, Formula, Term, Var, Vocabulary};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Const(u32),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Tilde,
    Amp,
    Bar,
    Eq,
    Neq,
    Quant { universal: bool, distinct: bool },
    True,
    False,
    End,
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, line: l0, col: c0 });
        let mut step = 1;
        match c {
            '\n' => {
                line += 1;
                col = 0;
            }
            c if c.is_whitespace() => {}
            '(' => push(&mut out, Tok::LParen),
            ')' => push(&mut out, Tok::RParen),
            '[' => push(&mut out, Tok::LBracket),
            ']' => push(&mut out, Tok::RBracket),
            ',' => push(&mut out, Tok::Comma),
            '.' => push(&mut out, Tok::Dot),
            '~' => push(&mut out, Tok::Tilde),
            '&' => push(&mut out, Tok::Amp),
            '|' => push(&mut out, Tok::Bar),
            '=' => push(&mut out, Tok::Eq),
            '!' if chars.get(i + 1) == Some(&'=') => {
                push(&mut out, Tok::Neq);
                step = 2;
            }
            '#' => {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let digits: String = chars[i + 1..j].iter().collect();
                let k: u32 = digits.parse().map_err(|_| Error::Syntax {
                    line: l0,
                    col: c0,
                    msg: "expected element number after `#`".into(),
                })?;
                if k == 0 {
                    return Err(Error::Syntax {
                        line: l0,
                        col: c0,
                        msg: "elements are numbered from 1".into(),
                    });
                }
                push(&mut out, Tok::Const(k - 1));
                step = j - i;
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_' || chars[j] == '\'') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                step = j - i;
                let next = chars.get(j).copied();
                let tok = match word.as_str() {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    "E" | "A" if next == Some('!') && chars.get(j + 1) != Some(&'=') => {
                        step += 1;
                        Tok::Quant {
                            universal: word == "A",
                            distinct: true,
                        }
                    }
                    "E" | "A" if next != Some('(') => Tok::Quant {
                        universal: word == "A",
                        distinct: false,
                    },
                    _ => Tok::Ident(word),
                };
                push(&mut out, tok);
            }
            _ => {
                return Err(Error::Syntax {
                    line: l0,
                    col: c0,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        }
        i += step;
        col += step;
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let s = &self.toks[self.pos];
        Err(Error::Syntax {
            line: s.line,
            col: s.col,
            msg: msg.into(),
        })
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn var(&mut self) -> Result<Var> {
        match self.peek().clone() {
            Tok::Ident(v) => {
                self.bump();
                Ok(v)
            }
            _ => self.err("expected a variable"),
        }
    }

    fn term(&mut self) -> Result<Term> {
        match self.peek().clone() {
            Tok::Ident(v) => {
                self.bump();
                Ok(Term::Var(v))
            }
            Tok::Const(c) => {
                self.bump();
                Ok(Term::Const(c))
            }
            _ => self.err("expected a variable or `#k`"),
        }
    }

    fn or(&mut self) -> Result<Formula> {
        let mut f = self.and()?;
        while *self.peek() == Tok::Bar {
            self.bump();
            f = or(f, self.and()?);
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            f = and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(self.unary()?.negate())
            }
            Tok::Quant { universal, distinct } => {
                self.bump();
                let v = self.var()?;
                let avoid = if *self.peek() == Tok::LBracket {
                    if !distinct {
                        return self.err("exclusion lists are only allowed on `E!`/`A!`");
                    }
                    self.bump();
                    let mut vs = Vec::new();
                    if *self.peek() != Tok::RBracket {
                        vs.push(self.var()?);
                        while *self.peek() == Tok::Comma {
                            self.bump();
                            vs.push(self.var()?);
                        }
                    }
                    self.expect(Tok::RBracket, "`]`")?;
                    vs.sort();
                    vs.dedup();
                    Some(vs)
                } else {
                    None
                };
                self.expect(Tok::Dot, "`.` after the quantified variable")?;
                let body = Box::new(self.or()?);
                Ok(match (universal, distinct) {
                    (false, false) => Formula::Exists(v, body),
                    (true, false) => Formula::Forall(v, body),
                    (u, true) => {
                        let avoid = avoid.unwrap_or_else(|| default_avoid(&v, &body));
                        if u {
                            Formula::ForallD(v, avoid, body)
                        } else {
                            Formula::ExistsD(v, avoid, body)
                        }
                    }
                })
            }
            Tok::LParen => {
                self.bump();
                let f = self.or()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(f)
            }
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Ident(name) if self.toks[self.pos + 1].tok == Tok::LParen => {
                self.bump();
                self.bump();
                let mut args = vec![self.term()?];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    args.push(self.term()?);
                }
                self.expect(Tok::RParen, "`)` closing the atom")?;
                Ok(Formula::Atom {
                    rel: name,
                    args,
                    neg: false,
                })
            }
            Tok::Ident(_) | Tok::Const(_) => {
                let a = self.term()?;
                match self.bump() {
                    Tok::Eq => Ok(Formula::Eq(a, self.term()?)),
                    Tok::Neq => Ok(Formula::Neq(a, self.term()?)),
                    _ => {
                        self.pos -= 1;
                        self.err("expected `=` or `!=`")
                    }
                }
            }
            Tok::End => self.err("unexpected end of input"),
            _ => self.err("expected a formula"),
        }
    }
}

/// Parses a formula, pushing negations to the atoms. Relation arities must be
/// used consistently.
pub fn parse(text: &str) -> Result<Formula> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let f = p.or()?;
    if *p.peek() != Tok::End {
        return p.err("trailing input");
    }
    f.vocabulary()?;
    Ok(f)
}

/// Parses a sentence: as [`parse`], rejecting free variables.
pub fn parse_sentence(text: &str) -> Result<Formula> {
    let f = parse(text)?;
    if let Some(v) = f.free_vars().into_iter().next() {
        return Err(Error::Unbound(v));
    }
    Ok(f)
}

/// Parses and checks the arities against a declared vocabulary.
pub fn parse_with_vocab(text: &str, vocab: &Vocabulary) -> Result<Formula> {
    let f = parse(text)?;
    for (rel, arity) in f.vocabulary()?.iter() {
        match vocab.arity(rel) {
            Some(a) if a != arity => {
                return Err(Error::Arity {
                    rel: rel.to_string(),
                    expected: a,
                    found: arity,
                })
            }
            None => return Err(Error::Invalid(format!("unknown relation `{rel}`"))),
            _ => {}
        }
    }
    Ok(f)
}
