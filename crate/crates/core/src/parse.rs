//! Parser for function literals.
//!
//! ```text
//! expr   = term (('+' | '-') term)*
//! term   = factor ('*' factor)*
//! factor = atom ('^' int)?
//! atom   = rational | 'i' | 'x'<k> | 'p'<k> | 'e(' int (',' int)* ')' | '(' expr ')' | '-' factor
//! ```
//!
//! `x<k>` is the k-th coordinate (1-based). On phase space `p<k>` is the k-th
//! momentum, stored after the `n` positions. `e(k1,..,kn)` is `exp(i k.x)`.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::function::FunctionExpr;
use crate::scalar::{parse_rat, Gauss};

/// How variable names map to coordinates.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Coordinates {
    /// `x1..xn` on `R^n`.
    Plain(usize),
    /// `x1..xn, p1..pn` on `R^{2n}`.
    PhaseSpace(usize),
}

impl Coordinates {
    pub fn dim(self) -> usize {
        match self {
            Coordinates::Plain(n) => n,
            Coordinates::PhaseSpace(n) => 2 * n,
        }
    }

    /// Display name of coordinate `i`, the inverse of parsing.
    pub fn name(self, i: usize) -> String {
        match self {
            Coordinates::PhaseSpace(n) if i >= n => format!("p{}", i - n + 1),
            _ => format!("x{}", i + 1),
        }
    }
}

pub fn parse_function(src: &str, coords: Coordinates) -> Result<FunctionExpr> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, coords };
    let f = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    coords: Coordinates,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {}", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected `{}`", c as char)))
        }
    }

    fn digits(&mut self) -> Result<&str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits"))
    }

    fn int(&mut self) -> Result<i64> {
        let neg = self.eat(b'-');
        let d = self.digits()?;
        let v: i64 = d.parse().map_err(|_| self.error("integer out of range"))?;
        Ok(if neg { -v } else { v })
    }

    fn expr(&mut self) -> Result<FunctionExpr> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = acc.add(&self.term()?);
            } else if self.eat(b'-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<FunctionExpr> {
        let mut acc = self.factor()?;
        while self.eat(b'*') {
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<FunctionExpr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let e = self.digits()?;
            let e: u32 = e.parse().map_err(|_| self.error("exponent out of range"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn variable(&mut self, offset: usize) -> Result<FunctionExpr> {
        self.pos += 1;
        let k: usize = self.digits()?.parse().map_err(|_| self.error("index out of range"))?;
        let n = match self.coords {
            Coordinates::Plain(n) | Coordinates::PhaseSpace(n) => n,
        };
        if k == 0 || k > n {
            return Err(self.error(&format!("coordinate index {k} outside 1..={n}")));
        }
        FunctionExpr::var(self.coords.dim(), offset + k - 1)
    }

    /// `2i` and `(1/2)i`: an `i` written directly after a number or a
    /// parenthesized group multiplies it, matching how coefficients print.
    fn imaginary_suffix(&mut self, e: FunctionExpr) -> FunctionExpr {
        if self.src.get(self.pos) == Some(&b'i') {
            self.pos += 1;
            e.map_coeffs(|c| c * &Gauss::i())
        } else {
            e
        }
    }

    fn atom(&mut self) -> Result<FunctionExpr> {
        let dim = self.coords.dim();
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.factor()?.neg())
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(self.imaginary_suffix(e))
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(FunctionExpr::constant(dim, Gauss::i()))
            }
            Some(b'x') => self.variable(0),
            Some(b'p') => match self.coords {
                Coordinates::PhaseSpace(n) => self.variable(n),
                Coordinates::Plain(_) => Err(self.error("momenta need phase-space coordinates")),
            },
            Some(b'e') => {
                self.pos += 1;
                self.expect(b'(')?;
                let mut k = vec![self.int()?];
                while self.eat(b',') {
                    k.push(self.int()?);
                }
                self.expect(b')')?;
                if k.len() != dim {
                    return Err(self.error(&format!("wave vector needs {dim} entries")));
                }
                Ok(FunctionExpr::plane_wave(dim, &k))
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                self.digits()?;
                if self.src.get(self.pos) == Some(&b'/') {
                    self.pos += 1;
                    self.digits()?;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                let r = parse_rat(text)?;
                if r.is_zero() {
                    return Ok(FunctionExpr::zero(dim));
                }
                Ok(self.imaginary_suffix(FunctionExpr::constant(dim, Gauss::real(r))))
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use crate::series::Linear;

    fn x(dim: usize, i: usize) -> FunctionExpr {
        FunctionExpr::var(dim, i).unwrap()
    }

    #[test]
    fn imaginary_coefficients_parse_as_printed() {
        let c = Coordinates::Plain(1);
        let half_i = FunctionExpr::constant(1, Gauss::imag(rat(1, 2)));
        assert_eq!(parse_function("(1/2)i", c).unwrap(), half_i);
        assert_eq!(parse_function("-(1/2)i*x1", c).unwrap(), half_i.mul(&x(1, 0)).neg());
        assert_eq!(parse_function("(1-2i)", c).unwrap(), FunctionExpr::constant(1, Gauss::new(rat(1, 1), rat(-2, 1))));
    }

    #[test]
    fn parses_polynomials_and_waves() {
        let c = Coordinates::Plain(2);
        let f = parse_function("3/2*x1^2 - x2*(x1 + i) + e(1,-2)", c).unwrap();
        let expected = x(2, 0)
            .pow(2)
            .scale(&Gauss::real(rat(3, 2)))
            .sub(&x(2, 1).mul(&x(2, 0).add(&FunctionExpr::constant(2, Gauss::i()))))
            .add(&FunctionExpr::plane_wave(2, &[1, -2]));
        assert_eq!(f, expected);
        assert_eq!(parse_function("-x1^2", c).unwrap(), x(2, 0).pow(2).neg());
        assert_eq!(parse_function("0*x1", c).unwrap(), FunctionExpr::zero(2));
    }

    #[test]
    fn phase_space_names() {
        let c = Coordinates::PhaseSpace(2);
        assert_eq!(parse_function("p2", c).unwrap(), x(4, 3));
        assert_eq!(c.name(3), "p2");
        assert_eq!(parse_function("x1*p1", c).unwrap().render_with(&|i| c.name(i)), "x1*p1");
    }

    #[test]
    fn rejects_malformed_input() {
        let c = Coordinates::Plain(2);
        for bad in ["x3", "x1 +", "(x1", "p1", "e(1)", "x1 x2", "2^", "#"] {
            assert!(matches!(parse_function(bad, c), Err(Error::Parse(_))), "{bad}");
        }
    }
}
