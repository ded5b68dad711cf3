//! Text form for l-weight expressions.
//!
//! Grammar (whitespace allowed between tokens):
//!
//! ```text
//! expr   := factor ('*' factor)*
//! factor := name '[' int ']' ('^' int)?
//! name   := 'Y' | 'Psi' | 'A'
//! ```
//!
//! `Y[r]` is the fundamental l-weight at spectral exponent `q^r` (odd
//! `r`), `Psi[r]` the prefundamental at even `r`, and `A[r]` the root
//! l-weight at even `r`. Exponents default to 1 and may be negative:
//! `Psi[0]^-1` is the inverse prefundamental. Parse errors carry the
//! byte offset of the offending input.

use crate::error::{Error, Result};
use crate::lweight::{a_lweight, psi_of, y_of, LWeight};
use crate::qseries::AMonomial;

/// A parsed expression: the l-weight it denotes, plus — when every
/// factor is a positive power of `Y` — the underlying multiset of odd
/// spectral exponents, which identifies a finite standard module.
#[derive(Debug, Clone)]
pub struct ParsedExpr {
    pub lweight: LWeight,
    pub ystring: Option<Vec<i64>>,
}

struct Scanner<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn new(src: &'a str) -> Self {
        Self { src: src.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn fail(&self, what: &str) -> Error {
        Error::Parse(format!("expected {what} at byte {}", self.pos))
    }

    fn expect(&mut self, b: u8) -> Result<()> {
        if self.peek() == Some(b) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.fail(&format!("'{}'", b as char)))
        }
    }

    fn integer(&mut self) -> Result<i64> {
        let start = self.pos;
        if self.peek() == Some(b'-') || self.peek() == Some(b'+') {
            self.pos += 1;
        }
        let digits_from = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if self.pos == digits_from {
            return Err(self.fail("an integer"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .expect("ascii")
            .parse::<i64>()
            .map_err(|_| Error::Parse(format!("integer out of range at byte {start}")))
    }

    fn name(&mut self) -> Result<&'a str> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_alphabetic()) {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.fail("a factor name (Y, Psi or A)"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii"))
    }
}

/// Parse an l-weight expression such as `Y[-1]*Y[-3]` or `Psi[0]^-1`.
pub fn parse_lweight_expr(input: &str) -> Result<ParsedExpr> {
    let mut sc = Scanner::new(input);
    let mut lweight = LWeight::trivial();
    let mut ystring: Option<Vec<i64>> = Some(Vec::new());
    loop {
        sc.skip_ws();
        let name_at = sc.pos;
        let name = sc.name()?;
        sc.skip_ws();
        sc.expect(b'[')?;
        sc.skip_ws();
        let r = sc.integer()?;
        sc.skip_ws();
        sc.expect(b']')?;
        sc.skip_ws();
        let exp = if sc.peek() == Some(b'^') {
            sc.pos += 1;
            sc.skip_ws();
            sc.integer()?
        } else {
            1
        };
        let base = match name {
            "Y" => y_of(r)?,
            "Psi" => {
                if r.rem_euclid(2) != 0 {
                    return Err(Error::Parity(format!(
                        "Psi spectral exponent {r} must be even on the integer lattice"
                    )));
                }
                psi_of(r, 1)?
            }
            "A" => a_lweight(r)?,
            other => {
                return Err(Error::Parse(format!(
                    "unknown factor name '{other}' at byte {name_at}"
                )))
            }
        };
        lweight = lweight.product(&base.power(exp)?)?;
        if name == "Y" && exp >= 1 {
            if let Some(ys) = ystring.as_mut() {
                for _ in 0..exp {
                    ys.push(r);
                }
            }
        } else {
            ystring = None;
        }
        sc.skip_ws();
        match sc.peek() {
            None => break,
            Some(b'*') => {
                sc.pos += 1;
            }
            Some(_) => return Err(sc.fail("'*' or end of input")),
        }
    }
    Ok(ParsedExpr { lweight, ystring })
}

/// Parse a product of inverse-A factors such as `A[0]^-1 * A[-2]^-2`
/// (or the bare `1` for the empty monomial) into an inverse-A monomial.
/// Every factor must be `A` with a negative exponent.
pub fn parse_a_monomial(input: &str) -> Result<AMonomial> {
    if input.trim() == "1" {
        return Ok(AMonomial::one());
    }
    let mut sc = Scanner::new(input);
    let mut out = AMonomial::one();
    loop {
        sc.skip_ws();
        let name_at = sc.pos;
        let name = sc.name()?;
        if name != "A" {
            return Err(Error::Parse(format!(
                "expected an inverse-A factor at byte {name_at}"
            )));
        }
        sc.skip_ws();
        sc.expect(b'[')?;
        sc.skip_ws();
        let r = sc.integer()?;
        sc.skip_ws();
        sc.expect(b']')?;
        sc.skip_ws();
        if sc.peek() != Some(b'^') {
            return Err(sc.fail("'^' with a negative exponent"));
        }
        sc.pos += 1;
        sc.skip_ws();
        let exp_at = sc.pos;
        let exp = sc.integer()?;
        if exp >= 0 {
            return Err(Error::Parse(format!(
                "inverse-A exponent must be negative at byte {exp_at}"
            )));
        }
        let mult = u32::try_from(-exp)
            .map_err(|_| Error::Parse(format!("exponent out of range at byte {exp_at}")))?;
        out.multiply(r, mult)?;
        sc.skip_ws();
        match sc.peek() {
            None => break,
            Some(b'*') => {
                sc.pos += 1;
            }
            Some(_) => return Err(sc.fail("'*' or end of input")),
        }
    }
    Ok(out)
}
