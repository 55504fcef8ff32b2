//! Text grammar for symbols.
//!
//! ```text
//! expr    := signed (('+' | '-') term)*
//! term    := signed ('*' signed)*
//! signed  := ('+' | '-')* power
//! power   := atom ('^' integer)?
//! atom    := number | number 'i' | 'i' | 'z'
//!          | 'exp' '(' expr ')' | '(' expr ')'
//! number  := digits ('.' digits?)? (('e' | 'E') ('+' | '-')? digits)?
//!          | '.' digits (exponent)?
//! ```
//!
//! The argument of `exp` must reduce to a linear polynomial `c₀ + c₁ z`.
//! Whitespace is ignored between tokens. Examples:
//! `(1+2i)*z^2*exp((0.5-1i)*z) + 3`, `exp(-1i*z)`, `z^2*exp(0.5*z) + 3*z`.

use num_complex::Complex64;
use thiserror::Error;

use super::affine::AffineMap;
use super::function::{is_finite, EntireFunction, TOL_SYM};
use super::SymbolError;

/// Largest integer exponent accepted after `^`.
pub const MAX_POWER: u32 = 64;
/// Largest polynomial degree a parsed symbol may reach.
pub const MAX_DEGREE: usize = 256;
/// Largest number of distinct exponential rates in a parsed symbol.
pub const MAX_TERMS: usize = 64;
const MAX_DEPTH: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("parse error at byte {position}: {kind}")]
pub struct ParseError {
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("expected {0}")]
    Expected(&'static str),
    #[error("malformed number")]
    BadNumber,
    #[error("exponent must be an integer in 0..={MAX_POWER}")]
    BadExponent,
    #[error("argument of exp must be linear in z")]
    NonLinearExponent,
    #[error("expression exceeds the size limits (degree {MAX_DEGREE}, {MAX_TERMS} rates)")]
    TooLarge,
    #[error("nesting too deep")]
    TooDeep,
    #[error("value is not finite")]
    NonFinite,
    #[error("expected a constant")]
    NotConstant,
    #[error("expected two comma separated values")]
    BadPair,
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok {
    Num(f64),
    Imag(f64),
    Z,
    Exp,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |position, kind| ParseError { position, kind };
    while i < bytes.len() {
        let ch = bytes[i];
        let start = i;
        match ch {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((start, Tok::Plus)),
            b'-' => out.push((start, Tok::Minus)),
            b'*' => out.push((start, Tok::Star)),
            b'^' => out.push((start, Tok::Caret)),
            b'(' => out.push((start, Tok::LParen)),
            b')' => out.push((start, Tok::RParen)),
            b'z' => out.push((start, Tok::Z)),
            b'i' => out.push((start, Tok::Imag(1.0))),
            b'e' if src[i..].starts_with("exp") => {
                out.push((start, Tok::Exp));
                i += 3;
                continue;
            }
            b'0'..=b'9' | b'.' => {
                let mut j = i;
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                if j < bytes.len() && bytes[j] == b'.' {
                    j += 1;
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                }
                // exponent only when followed by digits, so `2exp` still lexes
                if j < bytes.len() && (bytes[j] == b'e' || bytes[j] == b'E') {
                    let mut k = j + 1;
                    if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                        k += 1;
                    }
                    if k < bytes.len() && bytes[k].is_ascii_digit() {
                        while k < bytes.len() && bytes[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let text = &src[i..j];
                let value: f64 = text.parse().map_err(|_| err(start, ParseErrorKind::BadNumber))?;
                if !value.is_finite() {
                    return Err(err(start, ParseErrorKind::NonFinite));
                }
                if j < bytes.len() && bytes[j] == b'i' {
                    out.push((start, Tok::Imag(value)));
                    j += 1;
                } else {
                    out.push((start, Tok::Num(value)));
                }
                i = j;
                continue;
            }
            _ => {
                let c = src[i..].chars().next().unwrap_or('?');
                return Err(err(start, ParseErrorKind::UnexpectedChar(c)));
            }
        }
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    end: usize,
    depth: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<Tok> {
        self.toks.get(self.pos).map(|t| t.1)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn fail<T>(&self, kind: ParseErrorKind) -> Result<T, ParseError> {
        Err(ParseError {
            position: self.offset(),
            kind,
        })
    }

    fn expect(&mut self, tok: Tok, what: &'static str) -> Result<(), ParseError> {
        if self.peek() == Some(tok) {
            self.pos += 1;
            Ok(())
        } else if self.peek().is_none() {
            self.fail(ParseErrorKind::UnexpectedEnd)
        } else {
            self.fail(ParseErrorKind::Expected(what))
        }
    }

    fn checked(&self, f: EntireFunction, at: usize) -> Result<EntireFunction, ParseError> {
        let bad = |kind| Err(ParseError { position: at, kind });
        if f.degree() > MAX_DEGREE || f.terms().len() > MAX_TERMS {
            return bad(ParseErrorKind::TooLarge);
        }
        let finite = f
            .terms()
            .iter()
            .all(|t| is_finite(t.rate()) && t.coeffs().iter().all(|c| is_finite(*c)));
        if !finite {
            return bad(ParseErrorKind::NonFinite);
        }
        Ok(f)
    }

    fn expr(&mut self) -> Result<EntireFunction, ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return self.fail(ParseErrorKind::TooDeep);
        }
        let mut acc = self.term()?;
        loop {
            let at = self.offset();
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = self.checked(acc.add(&rhs), at)?;
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let rhs = self.term()?;
                    acc = self.checked(acc.sub(&rhs), at)?;
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<EntireFunction, ParseError> {
        let mut acc = self.signed()?;
        while self.peek() == Some(Tok::Star) {
            let at = self.offset();
            self.pos += 1;
            let rhs = self.signed()?;
            acc = self.checked(acc.mul(&rhs), at)?;
        }
        Ok(acc)
    }

    fn signed(&mut self) -> Result<EntireFunction, ParseError> {
        let mut negate = false;
        loop {
            match self.peek() {
                Some(Tok::Plus) => self.pos += 1,
                Some(Tok::Minus) => {
                    negate = !negate;
                    self.pos += 1;
                }
                _ => break,
            }
        }
        let value = self.power()?;
        Ok(if negate { -&value } else { value })
    }

    fn power(&mut self) -> Result<EntireFunction, ParseError> {
        let base = self.atom()?;
        if self.peek() != Some(Tok::Caret) {
            return Ok(base);
        }
        let at = self.offset();
        self.pos += 1;
        let n = match self.peek() {
            Some(Tok::Num(v)) if v.fract() == 0.0 && (0.0..=MAX_POWER as f64).contains(&v) => v as u32,
            None => return self.fail(ParseErrorKind::UnexpectedEnd),
            _ => return self.fail(ParseErrorKind::BadExponent),
        };
        self.pos += 1;
        let mut result = EntireFunction::one();
        let mut square = base;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = self.checked(result.mul(&square), at)?;
            }
            e >>= 1;
            if e > 0 {
                square = self.checked(square.mul(&square), at)?;
            }
        }
        Ok(result)
    }

    fn atom(&mut self) -> Result<EntireFunction, ParseError> {
        let at = self.offset();
        let Some(tok) = self.peek() else {
            return self.fail(ParseErrorKind::UnexpectedEnd);
        };
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(EntireFunction::constant(Complex64::new(v, 0.0))),
            Tok::Imag(v) => Ok(EntireFunction::constant(Complex64::new(0.0, v))),
            Tok::Z => Ok(EntireFunction::z()),
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Tok::Exp => {
                self.expect(Tok::LParen, "'(' after exp")?;
                let arg = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                let (c0, c1) = linear_parts(&arg).ok_or(ParseError {
                    position: at,
                    kind: ParseErrorKind::NonLinearExponent,
                })?;
                let coeff = c0.exp();
                if !is_finite(coeff) {
                    return Err(ParseError {
                        position: at,
                        kind: ParseErrorKind::NonFinite,
                    });
                }
                EntireFunction::exp_linear(coeff, c1).map_err(|e| ParseError {
                    position: at,
                    kind: e.into(),
                })
            }
            _ => {
                self.pos -= 1;
                self.fail(ParseErrorKind::Expected("a number, 'z', 'exp' or '('"))
            }
        }
    }
}

fn linear_parts(f: &EntireFunction) -> Option<(Complex64, Complex64)> {
    match f.terms() {
        [] => Some((Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))),
        [t] if t.rate().norm() <= TOL_SYM && t.degree() <= 1 => {
            let c = t.coeffs();
            Some((c[0], c.get(1).copied().unwrap_or_default()))
        }
        _ => None,
    }
}

/// Parses a symbol in the documented grammar into canonical form.
pub fn parse_symbol(text: &str) -> Result<EntireFunction, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        end: text.len(),
        depth: 0,
    };
    let f = p.expr()?;
    if p.pos != toks.len() {
        let tok_is_close = p.peek() == Some(Tok::RParen);
        return p.fail(if tok_is_close {
            ParseErrorKind::UnexpectedChar(')')
        } else {
            ParseErrorKind::Expected("an operator or end of input")
        });
    }
    Ok(f)
}

/// Parses a complex constant written in the symbol grammar, e.g. `0.5-1i`.
pub fn parse_complex(text: &str) -> Result<Complex64, ParseError> {
    let f = parse_symbol(text)?;
    f.constant_value().ok_or(ParseError {
        position: 0,
        kind: ParseErrorKind::NotConstant,
    })
}

/// Parses `a,b` into the affine map `z ↦ a z + b`.
pub fn parse_affine(text: &str) -> Result<AffineMap, ParseError> {
    let mut depth = 0i32;
    let mut split = None;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                if split.is_some() {
                    return Err(ParseError {
                        position: i,
                        kind: ParseErrorKind::BadPair,
                    });
                }
                split = Some(i);
            }
            _ => {}
        }
    }
    let Some(i) = split else {
        return Err(ParseError {
            position: text.len(),
            kind: ParseErrorKind::BadPair,
        });
    };
    let shift = |e: ParseError, by: usize| ParseError {
        position: e.position + by,
        kind: e.kind,
    };
    let a = parse_complex(&text[..i])?;
    let b = parse_complex(&text[i + 1..]).map_err(|e| shift(e, i + 1))?;
    AffineMap::new(a, b).map_err(|e| ParseError {
        position: 0,
        kind: e.into(),
    })
}

/// Parses a comma separated list of positive radii.
pub fn parse_radii(text: &str) -> Result<Vec<f64>, ParseError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for piece in text.split(',') {
        let trimmed = piece.trim();
        let value: f64 = trimmed.parse().map_err(|_| ParseError {
            position: offset,
            kind: ParseErrorKind::BadNumber,
        })?;
        if !(value.is_finite() && value > 0.0) {
            return Err(ParseError {
                position: offset,
                kind: ParseErrorKind::BadNumber,
            });
        }
        out.push(value);
        offset += piece.len() + 1;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_one() {
        assert_eq!(parse_symbol("1").unwrap().constant_value(), Some(c(1.0, 0.0)));
    }

    #[test]
    fn negative_imaginary_rate() {
        let f = parse_symbol("exp((0-1i)*z)").unwrap();
        assert_eq!(f.terms().len(), 1);
        assert_eq!(f.terms()[0].rate(), c(0.0, -1.0));
        assert_eq!(f.terms()[0].coeffs(), &[c(1.0, 0.0)]);
    }

    #[test]
    fn two_term_canonical_form() {
        let f = parse_symbol("z^2*exp(0.5*z) + 3*z").unwrap();
        assert_eq!(f.terms().len(), 2);
        let z = c(0.3, 0.7);
        let want = z * z * (0.5 * z).exp() + 3.0 * z;
        assert!((f.evaluate(z) - want).norm() < 1e-14);
    }

    #[test]
    fn documented_example() {
        let f = parse_symbol("(1+2i)*z^2*exp((0.5-1i)*z) + 3").unwrap();
        let z = c(-0.4, 1.2);
        let want = c(1.0, 2.0) * z * z * (c(0.5, -1.0) * z).exp() + 3.0;
        assert!((f.evaluate(z) - want).norm() < 1e-14);
    }

    #[test]
    fn exp_with_constant_offset() {
        let f = parse_symbol("exp(1 + 2*z)").unwrap();
        assert!((f.evaluate(c(0.0, 0.0)) - c(1f64.exp(), 0.0)).norm() < 1e-15);
        assert_eq!(f.terms()[0].rate(), c(2.0, 0.0));
    }

    #[test]
    fn scientific_and_bare_imaginary() {
        assert_eq!(parse_complex("1.5e-3i").unwrap(), c(0.0, 1.5e-3));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
        assert_eq!(parse_complex("2E2").unwrap(), c(200.0, 0.0));
    }

    #[test]
    fn positions_are_reported() {
        let e = parse_symbol("z + $").unwrap_err();
        assert_eq!(e.position, 4);
        assert!(matches!(e.kind, ParseErrorKind::UnexpectedChar('$')));
        let e = parse_symbol("exp(z^2)").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NonLinearExponent);
        let e = parse_symbol("(z").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::UnexpectedEnd);
        assert!(parse_symbol("z^65").is_err());
        assert!(parse_symbol("z^1.5").is_err());
        assert!(parse_symbol("").is_err());
        assert!(parse_symbol("z z").is_err());
        assert!(parse_symbol("exp(800)").is_err());
    }

    #[test]
    fn size_limits() {
        assert!(parse_symbol("(z+1)^64^64").is_err());
        assert_eq!(
            parse_symbol("((z+1)^64)^64").unwrap_err().kind,
            ParseErrorKind::TooLarge
        );
        let deep = format!("{}z{}", "(".repeat(100), ")".repeat(100));
        assert_eq!(parse_symbol(&deep).unwrap_err().kind, ParseErrorKind::TooDeep);
    }

    #[test]
    fn zero_symbol_parses() {
        assert!(parse_symbol("z - z").unwrap().is_zero());
    }

    #[test]
    fn render_round_trip() {
        for text in [
            "1",
            "0",
            "(1+2i)*z^2*exp((0.5-1i)*z) + 3",
            "-z^3 + 1e-7*z - exp(-2.5i*z)",
            "0.1*exp(0.3*z)*(z+1)^3",
        ] {
            let f = parse_symbol(text).unwrap();
            let g = parse_symbol(&f.render()).unwrap();
            assert!(f.approx_eq(&g, 0.0), "{text} -> {}", f.render());
        }
    }

    #[test]
    fn affine_and_radii() {
        let phi = parse_affine("0.5,0").unwrap();
        assert_eq!(phi.a(), c(0.5, 0.0));
        let phi = parse_affine("(0+1i), 1-2i").unwrap();
        assert_eq!(phi.b(), c(1.0, -2.0));
        assert!(parse_affine("2,0").is_err());
        assert!(parse_affine("0.5").is_err());
        assert!(parse_affine("0.5,z").is_err());
        assert_eq!(parse_radii("1, 2,4").unwrap(), vec![1.0, 2.0, 4.0]);
        assert!(parse_radii("1,-2").is_err());
    }
}
