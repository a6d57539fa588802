//! Text format: one polynomial per line, `#` starts a comment.
//!
//! ```text
//! line   := expr
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*        division by constants only
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' integer)?
//! atom   := number | number 'i' | 'i' | variable | '(' expr ')'
//! number := digits ('.' digits)? (('e' | 'E') ('+' | '-')? digits)?
//! ```

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Zero};

use super::{Coeff, Monomial, MultiProjPoly, VarietySpec};
use crate::{Error, Result};

const MAX_EXPONENT: u32 = 64;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigRational),
    ImagNum(BigRational),
    Imag,
    Var {
        affine: bool,
        coord: usize,
        factor: usize,
    },
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

struct Lexed {
    tok: Tok,
    column: usize,
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn lex(src: &str, line: usize, g: usize) -> Result<Vec<Lexed>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' | '−' => Some(Tok::Minus),
            '*' | '·' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Lexed { tok, column });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            let (value, next) =
                lex_number(&chars, i).ok_or_else(|| syntax(line, column, "malformed number"))?;
            i = next;
            let imag = i < chars.len()
                && chars[i] == 'i'
                && !chars
                    .get(i + 1)
                    .is_some_and(|c| c.is_alphanumeric() || *c == '_');
            if imag {
                i += 1;
                out.push(Lexed {
                    tok: Tok::ImagNum(value),
                    column,
                });
            } else {
                out.push(Lexed {
                    tok: Tok::Num(value),
                    column,
                });
            }
            continue;
        }
        if c.is_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            out.push(Lexed {
                tok: lex_word(&word, line, column, g)?,
                column,
            });
            continue;
        }
        return Err(syntax(
            line,
            column,
            alloc::format!("unexpected character '{c}'"),
        ));
    }
    Ok(out)
}

fn lex_number(chars: &[char], mut i: usize) -> Option<(BigRational, usize)> {
    let mut digits = String::new();
    let mut frac_len = 0i64;
    let mut seen_point = false;
    while i < chars.len() {
        let c = chars[i];
        if c.is_ascii_digit() {
            digits.push(c);
            if seen_point {
                frac_len += 1;
            }
        } else if c == '.' && !seen_point {
            seen_point = true;
        } else {
            break;
        }
        i += 1;
    }
    if digits.is_empty() {
        return None;
    }
    let mut exp = 0i64;
    if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
        let mut j = i + 1;
        let mut neg = false;
        if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
            neg = chars[j] == '-';
            j += 1;
        }
        let start = j;
        while j < chars.len() && chars[j].is_ascii_digit() {
            j += 1;
        }
        if j > start {
            let e: String = chars[start..j].iter().collect();
            exp = e.parse::<i64>().ok()?;
            if exp > 4000 {
                return None;
            }
            if neg {
                exp = -exp;
            }
            i = j;
        }
    }
    let mantissa: BigInt = digits.parse().ok()?;
    let shift = exp - frac_len;
    let ten = BigInt::from(10u32);
    let value = if shift >= 0 {
        BigRational::from_integer(mantissa * Pow::pow(&ten, shift as u64))
    } else {
        BigRational::new(mantissa, Pow::pow(&ten, (-shift) as u64))
    };
    Some((value, i))
}

fn lex_word(word: &str, line: usize, column: usize, g: usize) -> Result<Tok> {
    if word == "i" {
        return Ok(Tok::Imag);
    }
    let bad = || syntax(line, column, alloc::format!("unknown identifier '{word}'"));
    let mut it = word.chars();
    let affine = match it.next() {
        Some('X') => false,
        Some('x') => true,
        _ => return Err(bad()),
    };
    let rest: String = it.collect();
    let (coord, factor) = rest.split_once('_').ok_or_else(bad)?;
    let coord: usize = coord.parse().map_err(|_| bad())?;
    let factor: usize = factor.parse().map_err(|_| bad())?;
    if coord > 4 || (affine && coord == 0) {
        return Err(syntax(
            line,
            column,
            alloc::format!("no coordinate {coord} in '{word}'"),
        ));
    }
    if factor == 0 || factor > g {
        return Err(syntax(
            line,
            column,
            alloc::format!("factor {factor} in '{word}' is outside 1..={g}"),
        ));
    }
    Ok(Tok::Var {
        affine,
        coord,
        factor: factor - 1,
    })
}

/// Polynomial under construction.
#[derive(Clone)]
struct Poly {
    terms: BTreeMap<Monomial, Coeff>,
}

impl Poly {
    fn constant(g: usize, c: Coeff) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(alloc::vec![[0; 5]; g], c);
        }
        Poly { terms }
    }

    fn var(g: usize, factor: usize, coord: usize) -> Self {
        let mut m = alloc::vec![[0; 5]; g];
        m[factor][coord] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(m, Coeff::integer(1));
        Poly { terms }
    }

    fn as_constant(&self, g: usize) -> Option<Coeff> {
        let zero = alloc::vec![[0u32; 5]; g];
        match self.terms.len() {
            0 => Some(Coeff::integer(0)),
            1 => self.terms.get(&zero).cloned(),
            _ => None,
        }
    }

    fn add(mut self, o: &Poly, sign: i64) -> Self {
        for (m, c) in &o.terms {
            let e = self
                .terms
                .entry(m.clone())
                .or_insert_with(|| Coeff::integer(0));
            *e = if sign > 0 { &*e + c } else { &*e - c };
        }
        self.terms.retain(|_, c| !c.is_zero());
        self
    }

    fn mul(&self, o: &Poly) -> Self {
        let mut terms: BTreeMap<Monomial, Coeff> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let m: Monomial = ma
                    .iter()
                    .zip(mb)
                    .map(|(a, b)| core::array::from_fn(|i| a[i] + b[i]))
                    .collect();
                let e = terms.entry(m).or_insert_with(|| Coeff::integer(0));
                *e = &*e + &(ca * cb);
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Poly { terms }
    }

    fn scale(mut self, c: &Coeff) -> Self {
        for v in self.terms.values_mut() {
            *v = &*v * c;
        }
        self.terms.retain(|_, c| !c.is_zero());
        self
    }
}

struct Parser<'a> {
    toks: &'a [Lexed],
    pos: usize,
    line: usize,
    g: usize,
    end_column: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn column(&self) -> usize {
        self.toks
            .get(self.pos)
            .map_or(self.end_column, |t| t.column)
    }

    fn err(&self, msg: &str) -> Error {
        syntax(self.line, self.column(), msg)
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = self.term()?;
        loop {
            let sign = match self.peek() {
                Some(Tok::Plus) => 1,
                Some(Tok::Minus) => -1,
                _ => return Ok(acc),
            };
            self.pos += 1;
            let t = self.term()?;
            acc = acc.add(&t, sign);
        }
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let f = self.unary()?;
                    acc = acc.mul(&f);
                }
                Some(Tok::Slash) => {
                    self.pos += 1;
                    let column = self.column();
                    let d = self.unary()?;
                    let c = d
                        .as_constant(self.g)
                        .ok_or_else(|| syntax(self.line, column, "division by a non-constant"))?;
                    let inv = c
                        .inv()
                        .ok_or_else(|| syntax(self.line, column, "division by zero"))?;
                    acc = acc.scale(&inv);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<Poly> {
        match self.peek() {
            Some(Tok::Minus) => {
                self.pos += 1;
                Ok(self.unary()?.scale(&Coeff::integer(-1)))
            }
            Some(Tok::Plus) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.pos += 1;
        let column = self.column();
        let e = match self.peek() {
            Some(Tok::Num(n)) if n.is_integer() => n.to_integer(),
            _ => return Err(self.err("exponent must be a nonnegative integer")),
        };
        self.pos += 1;
        let e: u32 = e
            .try_into()
            .ok()
            .filter(|&e| e <= MAX_EXPONENT)
            .ok_or_else(|| syntax(self.line, column, "exponent too large"))?;
        let mut acc = Poly::constant(self.g, Coeff::integer(1));
        for _ in 0..e {
            acc = acc.mul(&base);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Poly> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.err("unexpected end of line"));
        };
        self.pos += 1;
        match tok {
            Tok::Num(n) => Ok(Poly::constant(self.g, Coeff::real(n))),
            Tok::ImagNum(n) => Ok(Poly::constant(self.g, Coeff::new(BigRational::zero(), n))),
            Tok::Imag => Ok(Poly::constant(self.g, Coeff::imaginary_unit())),
            Tok::Var { coord, factor, .. } => Ok(Poly::var(self.g, factor, coord)),
            Tok::LParen => {
                let e = self.expr()?;
                if self.peek() != Some(&Tok::RParen) {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            _ => {
                self.pos -= 1;
                Err(self.err("expected a number, variable or '('"))
            }
        }
    }
}

fn parse_line(src: &str, line: usize, g: usize) -> Result<MultiProjPoly> {
    let toks = lex(src, line, g)?;
    let mut affine = alloc::vec![false; g];
    let mut homogeneous = alloc::vec![false; g];
    for t in &toks {
        if let Tok::Var {
            affine: a, factor, ..
        } = t.tok
        {
            if a {
                affine[factor] = true;
            } else {
                homogeneous[factor] = true;
            }
        }
    }
    if affine.iter().zip(&homogeneous).any(|(a, h)| *a && *h) {
        return Err(Error::MixedCoordinates { line });
    }
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        line,
        g,
        end_column: src.chars().count() + 1,
    };
    let poly = p.expr()?;
    if p.pos < toks.len() {
        return Err(p.err("unexpected token"));
    }
    if poly.terms.keys().all(|m| m.iter().all(|r| *r == [0; 5])) {
        return Err(Error::ConstantEquation { line });
    }
    let mut terms = poly.terms;
    for k in 0..g {
        let degs = terms.keys().map(|m| m[k].iter().sum::<u32>());
        if affine[k] {
            let d = degs.max().unwrap_or(0);
            terms = terms
                .into_iter()
                .map(|(mut m, c)| {
                    let e: u32 = m[k].iter().sum();
                    m[k][0] += d - e;
                    (m, c)
                })
                .collect();
        } else {
            let mut degs = degs;
            if let Some(d) = degs.next() {
                if degs.any(|e| e != d) {
                    return Err(Error::InhomogeneousDegree {
                        line,
                        factor: k + 1,
                    });
                }
            }
        }
    }
    MultiProjPoly::new(g, terms).map_err(|e| match e {
        Error::InhomogeneousDegree { factor, .. } => Error::InhomogeneousDegree { line, factor },
        other => other,
    })
}

/// Parses a variety over `g` factors. Empty lines and `#` comments are
/// skipped; line numbers in errors count from 1.
pub fn parse_variety(text: &str, g: usize) -> Result<VarietySpec> {
    if g == 0 {
        return Err(Error::InvalidArgument(
            "a variety needs at least one factor".to_string(),
        ));
    }
    let mut polys = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        polys.push(parse_line(body, n + 1, g)?);
    }
    VarietySpec::new(g, polys)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn numbers_are_exact() {
        let chars: Vec<char> = "1.25e-2".chars().collect();
        assert_eq!(lex_number(&chars, 0).unwrap().0, rat(1, 80));
        let chars: Vec<char> = "300".chars().collect();
        assert_eq!(
            lex_number(&chars, 0).unwrap().0,
            BigRational::from_i64(300).unwrap()
        );
    }

    #[test]
    fn linear_equation() {
        let spec = parse_variety("X3_1 - 2*X0_1", 1).unwrap();
        assert_eq!(spec.delta(), 1);
        assert_eq!(spec.polys().len(), 1);
        assert_eq!(spec.polys()[0].terms().len(), 2);
    }

    #[test]
    fn affine_input_is_homogenised() {
        let spec = parse_variety("x1_1^3 - x2_1", 1).unwrap();
        assert_eq!(spec.delta(), 3);
        let p = &spec.polys()[0];
        assert_eq!(
            p.terms().get(&alloc::vec![[2, 0, 1, 0, 0]]),
            Some(&Coeff::integer(-1))
        );
        assert_eq!(
            p.terms().get(&alloc::vec![[0, 3, 0, 0, 0]]),
            Some(&Coeff::integer(1))
        );
    }

    #[test]
    fn complex_coefficients() {
        let spec = parse_variety("(1/2 + 3i)*X1_1 - i*X2_1/4", 1).unwrap();
        let p = &spec.polys()[0];
        assert_eq!(
            p.terms().get(&alloc::vec![[0, 1, 0, 0, 0]]),
            Some(&Coeff::new(rat(1, 2), rat(3, 1)))
        );
        assert_eq!(
            p.terms().get(&alloc::vec![[0, 0, 1, 0, 0]]),
            Some(&Coeff::new(rat(0, 1), rat(-1, 4)))
        );
    }

    #[test]
    fn errors_carry_positions() {
        match parse_variety("X1_1 +\n X1_1 * $", 1) {
            Err(Error::Syntax { line: 1, .. }) => {}
            other => panic!("{other:?}"),
        }
        match parse_variety("X1_1\nX1_1 * $", 1) {
            Err(Error::Syntax {
                line: 2, column: 8, ..
            }) => {}
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_variety("X1_1^2 - X0_1", 1),
            Err(Error::InhomogeneousDegree { line: 1, factor: 1 })
        ));
        assert!(matches!(
            parse_variety("x1_1 - X0_1", 1),
            Err(Error::MixedCoordinates { line: 1 })
        ));
        assert!(matches!(
            parse_variety("# nothing\n\n", 1),
            Err(Error::EmptySystem)
        ));
        assert!(matches!(
            parse_variety("X1_2", 1),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            parse_variety("X1_1 / X0_1", 1),
            Err(Error::Syntax { .. })
        ));
        assert!(matches!(
            parse_variety("X1_1 - X1_1", 1),
            Err(Error::ConstantEquation { line: 1 })
        ));
    }
}
