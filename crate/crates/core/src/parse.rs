//! Parser for the concept text grammar.
//!
//! ```text
//! C ::= top | bot | NAME | not C | (C and C) | (C or C)
//!     | (exists R . C) | (forall R . C)
//!     | (atleast N R . C) | (atmost N R . C)
//!     | (FEATURE >= V) | (FEATURE <= V)
//! R ::= NAME | inv(NAME)
//! ```

use crate::concept::{Concept, Node, Role};
use crate::database::Signature;
use crate::error::{Error, Result};
use crate::value::Value;

const KEYWORDS: [&str; 10] = [
    "top", "bot", "not", "and", "or", "exists", "forall", "atleast", "atmost", "inv",
];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LParen,
    RParen,
    Dot,
    Geq,
    Leq,
    Word(String),
    Number(String),
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let start = (line, col);
        let push = |out: &mut Vec<Spanned>, tok| {
            out.push(Spanned {
                tok,
                line: start.0,
                column: start.1,
            })
        };
        match c {
            '\n' => {
                line += 1;
                col = 1;
                i += 1;
                continue;
            }
            c if c.is_whitespace() => {}
            '(' => push(&mut out, Tok::LParen),
            ')' => push(&mut out, Tok::RParen),
            '.' if !chars.get(i + 1).is_some_and(|d| d.is_ascii_digit()) => {
                push(&mut out, Tok::Dot)
            }
            '>' | '<' => {
                if chars.get(i + 1) != Some(&'=') {
                    return Err(Error::Syntax {
                        line,
                        column: col,
                        message: format!("expected `{c}=`"),
                    });
                }
                push(&mut out, if c == '>' { Tok::Geq } else { Tok::Leq });
                i += 2;
                col += 2;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                push(&mut out, Tok::Word(chars[i..j].iter().collect()));
                col += j - i;
                i = j;
                continue;
            }
            c if c.is_ascii_digit() || c == '-' || c == '+' || c == '.' => {
                let mut j = i + 1;
                while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                    j += 1;
                }
                push(&mut out, Tok::Number(chars[i..j].iter().collect()));
                col += j - i;
                i = j;
                continue;
            }
            other => {
                return Err(Error::Syntax {
                    line,
                    column: col,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
        i += 1;
        col += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let (line, column) = self
            .toks
            .get(self.pos)
            .map_or(self.end, |t| (t.line, t.column));
        Err(Error::Syntax {
            line,
            column,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, off: usize) -> Option<&Tok> {
        self.toks.get(self.pos + off).map(|t| &t.tok)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<()> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected {what}"))
        }
    }

    fn name(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Word(w)) if !KEYWORDS.contains(&w.as_str()) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            _ => self.err("expected a name"),
        }
    }

    fn role(&mut self) -> Result<Role> {
        if self.peek() == Some(&Tok::Word("inv".into())) {
            self.pos += 1;
            self.expect(Tok::LParen, "`(` after `inv`")?;
            let n = self.name()?;
            self.expect(Tok::RParen, "`)`")?;
            Ok(Role::inverse_of(&n))
        } else {
            Ok(Role::new(&self.name()?))
        }
    }

    fn number(&mut self) -> Result<u32> {
        match self.peek() {
            Some(Tok::Number(n)) if n.bytes().all(|b| b.is_ascii_digit()) => {
                let parsed = n.parse::<u32>();
                match parsed {
                    Ok(v) => {
                        self.pos += 1;
                        Ok(v)
                    }
                    Err(_) => self.err("number out of range"),
                }
            }
            _ => self.err("expected a non-negative integer"),
        }
    }

    fn concept(&mut self) -> Result<Concept> {
        match self.peek().cloned() {
            Some(Tok::Word(w)) => match w.as_str() {
                "top" => {
                    self.pos += 1;
                    Ok(Concept::top())
                }
                "bot" => {
                    self.pos += 1;
                    Ok(Concept::bot())
                }
                "not" => {
                    self.pos += 1;
                    Ok(Concept::not(self.concept()?))
                }
                _ => Ok(Concept::name(&self.name()?)),
            },
            Some(Tok::LParen) => {
                self.pos += 1;
                let c = self.parenthesized()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(c)
            }
            _ => self.err("expected a concept"),
        }
    }

    fn parenthesized(&mut self) -> Result<Concept> {
        if let Some(Tok::Word(w)) = self.peek().cloned() {
            match w.as_str() {
                "exists" | "forall" => {
                    self.pos += 1;
                    let r = self.role()?;
                    self.expect(Tok::Dot, "`.`")?;
                    let c = self.concept()?;
                    return Ok(if w == "exists" {
                        Concept::exists(r, c)
                    } else {
                        Concept::forall(r, c)
                    });
                }
                "atleast" | "atmost" => {
                    self.pos += 1;
                    let n = self.number()?;
                    if w == "atleast" && n == 0 {
                        self.pos -= 1;
                        return self.err("at-least restrictions need a number >= 1");
                    }
                    let r = self.role()?;
                    self.expect(Tok::Dot, "`.`")?;
                    let c = self.concept()?;
                    return Ok(Concept::new(if w == "atleast" {
                        Node::AtLeast(n, r, c)
                    } else {
                        Node::AtMost(n, r, c)
                    }));
                }
                _ if !KEYWORDS.contains(&w.as_str())
                    && matches!(self.peek_at(1), Some(Tok::Geq | Tok::Leq)) =>
                {
                    self.pos += 1;
                    let geq = self.next() == Some(Tok::Geq);
                    let v = match self.peek() {
                        Some(Tok::Number(n)) => match n.parse::<Value>() {
                            Ok(v) => v,
                            Err(e) => return self.err(e.to_string()),
                        },
                        _ => return self.err("expected a decimal value"),
                    };
                    self.pos += 1;
                    return Ok(if geq {
                        Concept::feature_geq(&w, v)
                    } else {
                        Concept::feature_leq(&w, v)
                    });
                }
                _ => {}
            }
        }
        let left = self.concept()?;
        match self.next() {
            Some(Tok::Word(op)) if op == "and" => Ok(Concept::and(left, self.concept()?)),
            Some(Tok::Word(op)) if op == "or" => Ok(Concept::or(left, self.concept()?)),
            _ => {
                self.pos -= 1;
                self.err("expected `and` or `or`")
            }
        }
    }
}

/// Parses a concept in the text grammar.
pub fn parse_concept(text: &str) -> Result<Concept> {
    let toks = lex(text)?;
    let last_line = text.lines().count().max(1);
    let last_col = text.lines().last().map_or(1, |l| l.chars().count() + 1);
    let mut p = Parser {
        toks,
        pos: 0,
        end: (last_line, last_col),
    };
    let c = p.concept()?;
    if p.pos < p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(c)
}

/// A name in a concept that does not occur in the database signature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownName {
    pub kind: &'static str,
    pub name: String,
}

/// Parses a concept and reports names absent from `sig`; such names are
/// still accepted and evaluate to empty extensions.
pub fn parse_concept_checked(text: &str, sig: &Signature) -> Result<(Concept, Vec<UnknownName>)> {
    let c = parse_concept(text)?;
    let mut warnings = Vec::new();
    let mut push = |kind, name: &str| {
        let w = UnknownName {
            kind,
            name: name.to_string(),
        };
        if !warnings.contains(&w) {
            warnings.push(w);
        }
    };
    let mut stack = vec![c.clone()];
    while let Some(x) = stack.pop() {
        match x.node() {
            Node::Name(n) if !sig.contains_concept(n) => push("concept", n),
            Node::AtLeast(_, r, _) | Node::AtMost(_, r, _) if !sig.contains_role(&r.name) => {
                push("role", &r.name)
            }
            Node::FeatureGeq(f, _) | Node::FeatureLeq(f, _) if !sig.contains_feature(f) => {
                push("feature", f)
            }
            _ => {}
        }
        stack.extend(x.children().into_iter().cloned());
    }
    Ok((c, warnings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::database::parse_facts;

    #[test]
    fn parses_number_restriction_with_feature() {
        let c = parse_concept("(atmost 1 child . (height >= 140))").unwrap();
        let want = Concept::at_most(
            1,
            Role::new("child"),
            Concept::feature_geq("height", Value::from_int(140)),
        );
        assert_eq!(c, want);
    }

    #[test]
    fn parses_inverse_exists() {
        let c = parse_concept("(exists inv(r) . top)").unwrap();
        assert_eq!(c, Concept::exists(Role::inverse_of("r"), Concept::top()));
    }

    #[test]
    fn parses_everything_else() {
        let c = parse_concept("not (A and (B or (forall r . not bot)))").unwrap();
        assert_eq!(c.to_string(), "not (A and (B or (forall r . not bot)))");
        let c = parse_concept("(atleast 2 r . (w <= -1.5))").unwrap();
        assert_eq!(c.to_string(), "(atleast 2 r . (w <= -1.5))");
        let c = parse_concept("(atleast 1 r . A)").unwrap();
        assert_eq!(c.to_string(), "(exists r . A)");
    }

    #[test]
    fn reports_position() {
        match parse_concept("(A and\n  (exists r A))") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (2, 13)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_concept("(atleast 0 r . A)").is_err());
        assert!(parse_concept("(A xor B)").is_err());
        assert!(parse_concept("A B").is_err());
        assert!(parse_concept("(and and and)").is_err());
        assert!(parse_concept("").is_err());
    }

    #[test]
    fn warns_about_unknown_names() {
        let db = parse_facts("A(a)\nr(a,b)\nh(a, 3)").unwrap();
        let (_, w) =
            parse_concept_checked("((exists s . B) and ((h >= 1) or (g <= 2)))", &db.signature())
                .unwrap();
        let names: Vec<_> = w.iter().map(|u| u.name.as_str()).collect();
        assert_eq!(names.len(), 3);
        assert!(names.contains(&"s") && names.contains(&"B") && names.contains(&"g"));
    }
}
