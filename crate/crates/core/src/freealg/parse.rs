//! Expression parser.
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := scalar? factor ('*' factor)*
//! factor := identifier | '(' expr ')'
//! scalar := ['-'] digits ['/' digits]
//! ```
//!
//! Also accepted: a `*` between the scalar and the first factor, a term that is
//! a bare scalar, a leading sign on any term, scalars as later factors, and
//! named parameters, which behave as degree-zero scalars.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::poly::NcPoly;
use super::word::{Alphabet, Word};
use crate::exactla::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("inhomogeneous expression at byte {offset}: degree {first} vs degree {second}")]
    Inhomogeneous { offset: usize, first: u32, second: u32 },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("expected degree {expected}, found degree {found}")]
    WrongDegree { expected: u32, found: u32 },
}

impl ParseError {
    pub fn offset(&self) -> Option<usize> {
        match self {
            ParseError::Syntax { offset, .. }
            | ParseError::Inhomogeneous { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. } => Some(*offset),
            ParseError::WrongDegree { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Int(BigInt),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'0'..=b'9' => {
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                out.push((Tok::Int(text[start..i].parse().expect("digits")), start));
                continue;
            }
            c if c.is_ascii_alphabetic() => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(text[start..i].to_string()), start));
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap();
                return Err(ParseError::Syntax { offset: start, message: format!("unexpected character `{ch}`") });
            }
        };
        out.push((tok, start));
        i += 1;
    }
    Ok(out)
}

/// A parsed value: polynomial plus its degree, `None` for a literal zero that fits any degree.
struct Value {
    poly: NcPoly,
    degree: Option<u32>,
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    end: usize,
    alphabet: &'a Alphabet,
    params: &'a BTreeMap<String, Scalar>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    fn syntax<T>(&self, message: &str) -> Result<T, ParseError> {
        Err(ParseError::Syntax { offset: self.offset(), message: message.to_string() })
    }

    fn expr(&mut self) -> Result<Value, ParseError> {
        let mut acc = self.signed_term()?;
        while let Some(t) = self.peek() {
            let sign = match t {
                Tok::Plus => Scalar::one(),
                Tok::Minus => -Scalar::one(),
                _ => break,
            };
            self.pos += 1;
            let at = self.offset();
            let term = self.signed_term()?;
            let degree = match (acc.degree, term.degree) {
                (Some(a), Some(b)) if a != b => {
                    return Err(ParseError::Inhomogeneous { offset: at, first: a, second: b })
                }
                (a, b) => a.or(b),
            };
            let mut poly = acc.poly.with_degree(degree.unwrap_or(0));
            poly.add_scaled(&term.poly.with_degree(degree.unwrap_or(0)), &sign);
            acc = Value { poly, degree };
        }
        Ok(acc)
    }

    fn signed_term(&mut self) -> Result<Value, ParseError> {
        let mut sign = Scalar::one();
        while let Some(t) = self.peek() {
            match t {
                Tok::Minus => sign = -sign,
                Tok::Plus => {}
                _ => break,
            }
            self.pos += 1;
        }
        let mut v = self.term()?;
        v.poly = v.poly.scale(&sign);
        Ok(v)
    }

    fn starts_factor(&self) -> bool {
        matches!(self.peek(), Some(Tok::Ident(_) | Tok::LParen | Tok::Int(_)))
    }

    fn term(&mut self) -> Result<Value, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                }
                // juxtaposition right after a scalar: `2 x1`
                Some(Tok::Ident(_) | Tok::LParen) if acc.degree == Some(0) || acc.degree.is_none() => {}
                _ => break,
            }
            let f = self.factor()?;
            let degree = match (acc.degree, f.degree) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            };
            let poly = acc.poly.mul(&f.poly);
            acc = match degree {
                Some(d) => Value { poly: poly.with_degree(d), degree },
                None => Value { poly: NcPoly::zero(0), degree: None },
            };
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Value, ParseError> {
        let at = self.offset();
        match self.peek().cloned() {
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                if let Some(i) = self.alphabet.index_of(&name) {
                    Ok(Value { poly: NcPoly::generator(i, self.alphabet), degree: Some(self.alphabet.degree(i)) })
                } else if let Some(c) = self.params.get(&name) {
                    Ok(Value { poly: NcPoly::constant(c.clone()), degree: Some(0) })
                } else {
                    Err(ParseError::UnknownIdentifier { offset: at, name })
                }
            }
            Some(Tok::Int(n)) => {
                self.pos += 1;
                let mut d = BigInt::from(1);
                if self.peek() == Some(&Tok::Slash) {
                    self.pos += 1;
                    match self.peek().cloned() {
                        Some(Tok::Int(m)) => {
                            if m == BigInt::from(0) {
                                return self.syntax("zero denominator");
                            }
                            self.pos += 1;
                            d = m;
                        }
                        _ => return self.syntax("expected denominator digits"),
                    }
                }
                let c = Scalar::from_bigint(n, d);
                if c.is_zero() {
                    Ok(Value { poly: NcPoly::zero(0), degree: None })
                } else {
                    Ok(Value { poly: NcPoly::constant(c), degree: Some(0) })
                }
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.syntax("expected `)`");
                }
                self.pos += 1;
                Ok(v)
            }
            Some(_) => self.syntax("expected identifier, number or `(`"),
            None => self.syntax("unexpected end of input"),
        }
    }
}

/// Parse a homogeneous expression; parameters act as scalar constants.
pub fn parse_expr_with(text: &str, alphabet: &Alphabet, params: &BTreeMap<String, Scalar>) -> Result<NcPoly, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser { toks, pos: 0, end: text.len(), alphabet, params };
    if p.peek().is_none() {
        return p.syntax("empty expression");
    }
    let v = p.expr()?;
    if p.pos < p.toks.len() {
        if p.starts_factor() {
            return p.syntax("expected `*`, `+` or `-`");
        }
        return p.syntax("unexpected token");
    }
    Ok(v.poly.with_degree(v.degree.unwrap_or(0)))
}

pub fn parse_expr(text: &str, alphabet: &Alphabet) -> Result<NcPoly, ParseError> {
    parse_expr_with(text, alphabet, &BTreeMap::new())
}

/// Parse and require a given degree; a literal zero takes that degree.
pub fn parse_expr_of_degree(
    text: &str,
    alphabet: &Alphabet,
    params: &BTreeMap<String, Scalar>,
    degree: u32,
) -> Result<NcPoly, ParseError> {
    let p = parse_expr_with(text, alphabet, params)?;
    if p.is_zero() {
        return Ok(p.with_degree(degree));
    }
    if p.degree() != degree {
        return Err(ParseError::WrongDegree { expected: degree, found: p.degree() });
    }
    Ok(p)
}

/// The single-letter word for generator `name`, if present.
pub fn generator_word(alphabet: &Alphabet, name: &str) -> Option<Word> {
    alphabet.index_of(name).map(Word::letter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ab() -> Alphabet {
        Alphabet::linear(&["x1", "x2"]).unwrap()
    }

    #[test]
    fn parses_relation() {
        let a = ab();
        let f1 = parse_expr("x1*x1*x2 - x2*x1*x1", &a).unwrap();
        assert_eq!(f1.degree(), 3);
        assert_eq!(f1.coeff(&Word::from_letters(&[0, 0, 1])), Scalar::one());
        assert_eq!(f1.coeff(&Word::from_letters(&[1, 0, 0])), -Scalar::one());
        assert_eq!(f1.len(), 2);
    }

    #[test]
    fn zero_and_errors() {
        let a = ab();
        assert!(parse_expr("0", &a).unwrap().is_zero());
        match parse_expr("x1 + x1*x2", &a) {
            Err(ParseError::Inhomogeneous { first: 1, second: 2, offset: 5 }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_expr("x1 + z", &a), Err(ParseError::UnknownIdentifier { offset: 5, .. })));
        assert!(matches!(parse_expr("x1 +", &a), Err(ParseError::Syntax { offset: 4, .. })));
        assert!(matches!(parse_expr("x1 $ x2", &a), Err(ParseError::Syntax { offset: 3, .. })));
        assert!(matches!(parse_expr("(x1", &a), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn scalars_and_parameters() {
        let a = ab();
        let mut params = BTreeMap::new();
        params.insert("p".to_string(), Scalar::from_i64(3));
        let q = parse_expr_with("-1/2 x1*x2 + p*(x2*x1 - 2*x1*x2)", &a, &params).unwrap();
        assert_eq!(q.coeff(&Word::from_letters(&[0, 1])), Scalar::ratio(-13, 2));
        assert_eq!(q.coeff(&Word::from_letters(&[1, 0])), Scalar::from_i64(3));
        let z = parse_expr_of_degree("0", &a, &params, 2).unwrap();
        assert_eq!(z.degree(), 2);
        assert!(parse_expr_of_degree("x1", &a, &params, 2).is_err());
    }

    fn random_poly() -> impl Strategy<Value = NcPoly> {
        proptest::collection::vec((proptest::collection::vec(0usize..2, 3), -5i64..6, 1i64..4), 0..6).prop_map(|ts| {
            NcPoly::from_terms(3, ts.into_iter().map(|(w, n, d)| (Word::from_letters(&w), Scalar::ratio(n, d))))
        })
    }

    proptest! {
        #[test]
        fn print_then_parse_roundtrips(p in random_poly()) {
            let a = ab();
            let text = p.to_text(&a);
            prop_assert_eq!(parse_expr(&text, &a).unwrap(), p);
        }

        #[test]
        fn generator_maps_are_multiplicative(p in random_poly(), q in random_poly(), m in proptest::collection::vec(-2i64..3, 4)) {
            let a = ab();
            let x1 = NcPoly::generator(0, &a);
            let x2 = NcPoly::generator(1, &a);
            let imgs = vec![
                x1.scale(&Scalar::from_i64(m[0])).add(&x2.scale(&Scalar::from_i64(m[1]))),
                x1.scale(&Scalar::from_i64(m[2])).add(&x2.scale(&Scalar::from_i64(m[3]))),
            ];
            let lhs = p.mul(&q).apply_generator_map(&imgs, &a).unwrap();
            let rhs = p.apply_generator_map(&imgs, &a).unwrap().mul(&q.apply_generator_map(&imgs, &a).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn multiplication_is_associative_and_distributive(p in random_poly(), q in random_poly(), r in random_poly()) {
            prop_assert_eq!(p.mul(&q).mul(&r), p.mul(&q.mul(&r)));
            prop_assert_eq!(p.mul(&q.add(&r)), p.mul(&q).add(&p.mul(&r)));
        }
    }
}
