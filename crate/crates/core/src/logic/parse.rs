//! Recursive-descent parser for formula text.
//!
//! ```text
//! or    := and ( ('|' | '∨') and )*
//! and   := unary ( ('&' | '∧') unary )*
//! unary := ('~' | '¬') unary | atom
//! atom  := IDENT | 'True' | 'False' | '(' or ')'
//! ```
//!
//! Offsets in errors count characters from the start of the input.

use super::{ConceptId, Formula, LogicError};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, LogicError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let tok = match c {
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            '~' | '¬' => Tok::Not,
            '&' | '∧' => Tok::And,
            '|' | '∨' => Tok::Or,
            '(' => Tok::Open,
            ')' => Tok::Close,
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((start, Tok::Ident(chars[start..i].iter().collect())));
                continue;
            }
            other => {
                return Err(LogicError::Syntax {
                    offset: i,
                    message: format!("unexpected character '{other}'"),
                })
            }
        };
        out.push((i, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a, F> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    resolve: &'a mut F,
}

impl<F: FnMut(&str, usize) -> Result<ConceptId, LogicError>> Parser<'_, F> {
    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn expr(&mut self) -> Result<Formula, LogicError> {
        let mut children = vec![self.conj()?];
        while self.peek() == Some(&Tok::Or) {
            self.pos += 1;
            children.push(self.conj()?);
        }
        Ok(Formula::or(children))
    }

    fn conj(&mut self) -> Result<Formula, LogicError> {
        let mut children = vec![self.unary()?];
        while self.peek() == Some(&Tok::And) {
            self.pos += 1;
            children.push(self.unary()?);
        }
        Ok(Formula::and(children))
    }

    fn unary(&mut self) -> Result<Formula, LogicError> {
        if self.peek() == Some(&Tok::Not) {
            self.pos += 1;
            return Ok(Formula::not(self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Formula, LogicError> {
        let offset = self.offset();
        let Some(tok) = self.peek().cloned() else {
            return Err(LogicError::Syntax {
                offset,
                message: "unexpected end of input, expected an operand".into(),
            });
        };
        self.pos += 1;
        match tok {
            Tok::Ident(name) => match name.as_str() {
                "True" => Ok(Formula::Const(true)),
                "False" => Ok(Formula::Const(false)),
                _ => Ok(Formula::Var((self.resolve)(&name, offset)?)),
            },
            Tok::Open => {
                let inner = self.expr()?;
                if self.peek() != Some(&Tok::Close) {
                    return Err(LogicError::Syntax {
                        offset: self.offset(),
                        message: "expected ')'".into(),
                    });
                }
                self.pos += 1;
                Ok(inner)
            }
            other => Err(LogicError::Syntax {
                offset,
                message: format!("unexpected {}, expected an operand", describe(&other)),
            }),
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Ident(_) => "identifier",
        Tok::Not => "'~'",
        Tok::And => "'&'",
        Tok::Or => "'|'",
        Tok::Open => "'('",
        Tok::Close => "')'",
    }
}

fn parse_with<F>(text: &str, mut resolve: F) -> Result<Formula, LogicError>
where
    F: FnMut(&str, usize) -> Result<ConceptId, LogicError>,
{
    let toks = tokenize(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        end: text.chars().count(),
        resolve: &mut resolve,
    };
    let f = p.expr()?;
    if let Some(t) = p.peek() {
        return Err(LogicError::Syntax {
            offset: p.offset(),
            message: format!("unexpected {} after complete formula", describe(t)),
        });
    }
    Ok(f)
}

/// Parses `text` against a fixed concept-name table.
pub fn parse<S: AsRef<str>>(text: &str, names: &[S]) -> Result<Formula, LogicError> {
    parse_with(text, |name, offset| {
        names
            .iter()
            .position(|n| n.as_ref() == name)
            .map(ConceptId)
            .ok_or_else(|| LogicError::UnknownIdentifier {
                name: name.to_string(),
                offset,
            })
    })
}

/// Parses `text`, assigning concept indices to identifiers in order of first
/// appearance. Returns the formula and the discovered name table.
pub fn parse_infer_names(text: &str) -> Result<(Formula, Vec<String>), LogicError> {
    let mut names: Vec<String> = Vec::new();
    let f = parse_with(text, |name, _| {
        Ok(ConceptId(match names.iter().position(|n| n == name) {
            Some(i) => i,
            None => {
                names.push(name.to_string());
                names.len() - 1
            }
        }))
    })?;
    Ok((f, names))
}
