//! Surface syntax for twisted polynomials with coefficients in Z[p], e.g.
//! `F^2 - (1+p)*F + p`, and for points of P^1 such as `(g^3 : 1)`.
//!
//! Integer coefficients are fixed by sigma, so products of such polynomials
//! commute with F and ordinary polynomial arithmetic applies.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::fields::{FqElement, FqField};
use crate::isocrystal::TwistedPoly;
use crate::supersingular::SurfaceParameter;
use crate::witt::{WittElement, WittRing};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(u64),
    P,
    F,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            c if c.is_whitespace() => {
                chars.next();
            }
            '0'..='9' => {
                let mut v: u64 = 0;
                while let Some(&d) = chars.peek() {
                    let Some(x) = d.to_digit(10) else { break };
                    v = v
                        .checked_mul(10)
                        .and_then(|v| v.checked_add(x as u64))
                        .ok_or_else(|| Error::Parse("integer literal too large".into()))?;
                    chars.next();
                }
                out.push(Tok::Num(v));
            }
            _ => {
                chars.next();
                out.push(match c {
                    'p' => Tok::P,
                    'F' => Tok::F,
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    '*' => Tok::Star,
                    '^' => Tok::Caret,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    other => return Err(Error::Parse(format!("unexpected character {other:?}"))),
                });
            }
        }
    }
    Ok(out)
}

/// Polynomial in F, `c[k]` the coefficient of F^k.
type Dense = Vec<WittElement>;

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    ring: &'a WittRing,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }
    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }
    fn constant(&self, c: WittElement) -> Dense {
        vec![c]
    }
    fn add(&self, a: &Dense, b: &Dense) -> Dense {
        let n = a.len().max(b.len());
        (0..n)
            .map(|i| {
                let x = a.get(i).cloned().unwrap_or_else(|| self.ring.zero());
                let y = b.get(i).cloned().unwrap_or_else(|| self.ring.zero());
                x.add(&y)
            })
            .collect()
    }
    fn neg(&self, a: &Dense) -> Dense {
        a.iter().map(|c| c.neg()).collect()
    }
    fn mul(&self, a: &Dense, b: &Dense) -> Dense {
        let mut out = vec![self.ring.zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = out[i + j].add(&x.mul(y));
            }
        }
        out
    }

    fn expr(&mut self) -> Result<Dense> {
        let mut acc = match self.peek() {
            Some(Tok::Minus) => {
                self.bump();
                let t = self.term()?;
                self.neg(&t)
            }
            Some(Tok::Plus) => {
                self.bump();
                self.term()?
            }
            _ => self.term()?,
        };
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    let t = self.term()?;
                    acc = self.add(&acc, &t);
                }
                Some(Tok::Minus) => {
                    self.bump();
                    let t = self.term()?;
                    acc = self.add(&acc, &self.neg(&t));
                }
                _ => return Ok(acc),
            }
        }
    }

    /// Factors joined by `*` or by juxtaposition (`2F`, `p(1+p)`).
    fn term(&mut self) -> Result<Dense> {
        let mut acc = self.power()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    let f = self.power()?;
                    acc = self.mul(&acc, &f);
                }
                Some(Tok::Num(_) | Tok::P | Tok::F | Tok::LParen) => {
                    let f = self.power()?;
                    acc = self.mul(&acc, &f);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn power(&mut self) -> Result<Dense> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        self.bump();
        let e = match self.bump() {
            Some(Tok::Num(e)) if e <= 64 => e,
            Some(Tok::Num(_)) => return Err(Error::Parse("exponent above 64".into())),
            _ => return Err(Error::Parse("exponent must be a nonnegative integer".into())),
        };
        let mut acc = self.constant(self.ring.one());
        for _ in 0..e {
            acc = self.mul(&acc, &base);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<Dense> {
        match self.bump() {
            Some(Tok::Num(v)) => {
                let r = self.ring.zpn().reduce_i128(v as i128);
                Ok(self.constant(self.ring.from_coeffs(&[r])?))
            }
            Some(Tok::P) => Ok(self.constant(self.ring.p_power(1))),
            Some(Tok::F) => Ok(vec![self.ring.zero(), self.ring.one()]),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(e),
                    _ => Err(Error::Parse("missing closing parenthesis".into())),
                }
            }
            Some(t) => Err(Error::Parse(format!("unexpected token {t:?}"))),
            None => Err(Error::Parse("unexpected end of input".into())),
        }
    }
}

/// Parses a twisted polynomial; the result must be monic in F.
pub fn parse_poly(text: &str, ring: &WittRing) -> Result<TwistedPoly> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut parser = Parser { toks, pos: 0, ring };
    let mut dense = parser.expr()?;
    if parser.pos != parser.toks.len() {
        return Err(Error::Parse(format!("trailing input at token {}", parser.pos)));
    }
    while dense.len() > 1 && dense.last().is_some_and(|c| c.is_zero()) {
        dense.pop();
    }
    dense.reverse();
    if dense.len() < 2 {
        return Err(Error::Parse("polynomial has no F term".into()));
    }
    if dense[0] != ring.one() {
        return Err(Error::NotMonic(format!("leading coefficient {:?}", dense[0])));
    }
    TwistedPoly::from_witt(&dense)
}

/// "s/r" or "s" in lowest terms with r > 0.
pub fn parse_rational(text: &str) -> Result<Ratio<i64>> {
    let bad = || Error::Parse(format!("not a rational: {text:?}"));
    let t = text.trim();
    let (s, r) = match t.split_once('/') {
        Some((s, r)) => (s.trim().parse::<i64>().map_err(|_| bad())?, r.trim().parse::<i64>().map_err(|_| bad())?),
        None => (t.parse::<i64>().map_err(|_| bad())?, 1),
    };
    if r == 0 {
        return Err(Error::Parse("zero denominator".into()));
    }
    Ok(Ratio::new(s, r))
}

/// A field element: an integer (prime field), `g^k` (power of the field
/// generator) or `[c0, c1, ..]` (power-basis coordinates).
pub fn parse_field_element(text: &str, field: &FqField) -> Result<FqElement> {
    let t = text.trim();
    if let Some(e) = t.strip_prefix("g^") {
        let k: u128 = e.trim().parse().map_err(|_| Error::Parse(format!("bad exponent in {t:?}")))?;
        return Ok(field.generator().pow(k));
    }
    if t == "g" {
        return Ok(field.generator());
    }
    if let Some(inner) = t.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
        let p = field.p() as i64;
        let coeffs = inner
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(|s| s.trim().parse::<i64>().map(|c| c.rem_euclid(p) as u64))
            .collect::<std::result::Result<Vec<u64>, _>>()
            .map_err(|_| Error::Parse(format!("bad coordinates {t:?}")))?;
        return field.from_coeffs(&coeffs);
    }
    let v: i64 = t.parse().map_err(|_| Error::Parse(format!("not a field element: {t:?}")))?;
    Ok(field.from_int(v))
}

/// `(a : b)` with coordinates in `field`, or `generic`.
pub fn parse_parameter(text: &str, field: &FqField) -> Result<SurfaceParameter> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("generic") {
        return Ok(SurfaceParameter::Generic);
    }
    let inner = t
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("expected (a:b), got {t:?}")))?;
    let (a, b) = inner.split_once(':').ok_or_else(|| Error::Parse(format!("expected (a:b), got {t:?}")))?;
    SurfaceParameter::point(parse_field_element(a, field)?, parse_field_element(b, field)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::Tower;

    fn ring() -> WittRing {
        Tower::default().witt_ring(2, 1, 8).unwrap()
    }

    #[test]
    fn parses_surface_syntax() {
        let w = ring();
        let a = parse_poly("F^2 - (1+p)*F + p", &w).unwrap();
        assert_eq!(a, TwistedPoly::from_ints(&w, &[1, -3, 2]).unwrap());
        let b = parse_poly("(F - 1)(F - p)", &w).unwrap();
        assert_eq!(a, b);
        assert_eq!(parse_poly("F^2-p", &w).unwrap(), TwistedPoly::from_ints(&w, &[1, 0, -2]).unwrap());
        assert_eq!(parse_poly("-p + F^3 + 2F", &w).unwrap(), TwistedPoly::from_ints(&w, &[1, 0, 2, -2]).unwrap());
        assert_eq!(parse_poly("F^2 - p^2", &w).unwrap(), TwistedPoly::from_ints(&w, &[1, 0, -4]).unwrap());
    }

    #[test]
    fn rejects_malformed_polynomials() {
        let w = ring();
        for bad in ["", "F^", "F +", "(F - 1", "2F^2 - 1", "F^2 - x", "7", "F^99"] {
            assert!(parse_poly(bad, &w).is_err(), "{bad}");
        }
    }

    #[test]
    fn rationals_and_parameters() {
        assert_eq!(parse_rational("2/4").unwrap(), Ratio::new(1, 2));
        assert_eq!(parse_rational("-3").unwrap(), Ratio::from_integer(-3));
        assert!(parse_rational("1/0").is_err() && parse_rational("a").is_err());
        let f = Tower::default().field(3, 4).unwrap();
        let t = parse_parameter("(g^10 : 1)", &f).unwrap();
        assert_eq!(t, SurfaceParameter::point(f.generator().pow(10), f.one()).unwrap());
        assert_eq!(parse_parameter("( [0,1] : 2 )", &f).unwrap(), SurfaceParameter::point(f.generator(), f.from_int(2)).unwrap());
        assert_eq!(parse_parameter("generic", &f).unwrap(), SurfaceParameter::Generic);
        assert!(parse_parameter("(0:0)", &f).is_err());
        assert!(parse_parameter("1:0", &f).is_err());
    }
}
