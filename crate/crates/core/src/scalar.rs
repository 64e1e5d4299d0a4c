//! Exact scalars: rationals, Gaussian rationals, and phase-carrying scalars
//! with formal powers of hbar.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rat = BigRational;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parses `"p/q"`, `"p"` or `"-p/q"` into an exact rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational `{s}`"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad())?;
            let q: BigInt = q.trim().parse().map_err(|_| bad())?;
            if q.is_zero() {
                return Err(bad());
            }
            Ok(Rat::new(p, q))
        }
        None => Ok(Rat::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn format_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact complex number with rational real and imaginary parts.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Gauss {
    pub re: Rat,
    pub im: Rat,
}

impl Gauss {
    pub fn new(re: Rat, im: Rat) -> Self {
        Gauss { re, im }
    }

    pub fn real(re: Rat) -> Self {
        Gauss { re, im: Rat::zero() }
    }

    pub fn int(n: i64) -> Self {
        Self::real(rat_int(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Self::real(rat(n, d))
    }

    pub fn i() -> Self {
        Gauss { re: Rat::zero(), im: Rat::one() }
    }

    /// `i * q` for rational `q`.
    pub fn imag(im: Rat) -> Self {
        Gauss { re: Rat::zero(), im }
    }

    pub fn zero() -> Self {
        Self::int(0)
    }

    pub fn one() -> Self {
        Self::int(1)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Gauss { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn scale(&self, r: &Rat) -> Self {
        Gauss { re: &self.re * r, im: &self.im * r }
    }

    pub fn inv(&self) -> Option<Self> {
        let norm = &self.re * &self.re + &self.im * &self.im;
        if norm.is_zero() {
            return None;
        }
        Some(Gauss { re: &self.re / &norm, im: -(&self.im / &norm) })
    }

    /// `i^k` for any integer `k`.
    pub fn i_pow(k: i64) -> Self {
        match k.rem_euclid(4) {
            0 => Self::one(),
            1 => Self::i(),
            2 => Self::int(-1),
            _ => Self::imag(rat_int(-1)),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Gauss::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }
}

impl Default for Gauss {
    fn default() -> Self {
        Gauss::zero()
    }
}

impl<'a> Add<&'a Gauss> for &'a Gauss {
    type Output = Gauss;
    fn add(self, o: &Gauss) -> Gauss {
        Gauss { re: &self.re + &o.re, im: &self.im + &o.im }
    }
}

impl<'a> Sub<&'a Gauss> for &'a Gauss {
    type Output = Gauss;
    fn sub(self, o: &Gauss) -> Gauss {
        Gauss { re: &self.re - &o.re, im: &self.im - &o.im }
    }
}

impl<'a> Mul<&'a Gauss> for &'a Gauss {
    type Output = Gauss;
    fn mul(self, o: &Gauss) -> Gauss {
        if self.im.is_zero() && o.im.is_zero() {
            return Gauss::real(&self.re * &o.re);
        }
        if self.re.is_zero() && o.re.is_zero() {
            return Gauss::real(-(&self.im * &o.im));
        }
        Gauss { re: &self.re * &o.re - &self.im * &o.im, im: &self.re * &o.im + &self.im * &o.re }
    }
}

impl Neg for &Gauss {
    type Output = Gauss;
    fn neg(self) -> Gauss {
        Gauss { re: -self.re.clone(), im: -self.im.clone() }
    }
}

impl Neg for Gauss {
    type Output = Gauss;
    fn neg(self) -> Gauss {
        Gauss { re: -self.re, im: -self.im }
    }
}

impl AddAssign<&Gauss> for Gauss {
    fn add_assign(&mut self, o: &Gauss) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl fmt::Display for Gauss {
    /// `3`, `-1/2`, `2i`, `(1/2)i`, `-(1/2)i`, `(1+2i)`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let imag = |q: &Rat| -> String {
            let a = q.abs();
            let body = if a.is_one() {
                "i".to_string()
            } else if a.is_integer() {
                format!("{}i", format_rat(&a))
            } else {
                format!("({})i", format_rat(&a))
            };
            if q.is_negative() {
                format!("-{body}")
            } else {
                body
            }
        };
        if self.im.is_zero() {
            write!(f, "{}", format_rat(&self.re))
        } else if self.re.is_zero() {
            write!(f, "{}", imag(&self.im))
        } else {
            let im = imag(&self.im);
            let sep = if im.starts_with('-') { "" } else { "+" };
            write!(f, "({}{}{})", format_rat(&self.re), sep, im)
        }
    }
}

/// Symbols that may appear in the exponent of a unit phase `exp(i * sum)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum PhaseSym {
    /// The noncommutativity parameter theta^{ij}, `i < j`.
    Theta(u8, u8),
    /// The number 1; used when theta has been given numerically.
    Unit,
    /// Coordinate `coord` of the lattice site labelled `site`.
    Site(u16, u8),
}

impl fmt::Display for PhaseSym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhaseSym::Theta(i, j) => write!(f, "t{}{}", i + 1, j + 1),
            PhaseSym::Unit => write!(f, "1"),
            PhaseSym::Site(s, c) => write!(f, "y{}_{}", s, c + 1),
        }
    }
}

/// A unit phase `exp(i * sum_s r_s * s)`, stored as its exponent vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Phase(BTreeMap<PhaseSym, Rat>);

impl Phase {
    pub fn identity() -> Self {
        Phase(BTreeMap::new())
    }

    pub fn single(sym: PhaseSym, r: Rat) -> Self {
        let mut p = Phase::identity();
        p.add_term(sym, &r);
        p
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    pub fn exponents(&self) -> &BTreeMap<PhaseSym, Rat> {
        &self.0
    }

    pub fn add_term(&mut self, sym: PhaseSym, r: &Rat) {
        if r.is_zero() {
            return;
        }
        let e = self.0.entry(sym).or_insert_with(Rat::zero);
        *e += r;
        if e.is_zero() {
            self.0.remove(&sym);
        }
    }

    /// Phase multiplication adds exponents.
    pub fn mul(&self, o: &Phase) -> Phase {
        let mut out = self.clone();
        for (s, r) in &o.0 {
            out.add_term(*s, r);
        }
        out
    }

    pub fn inv(&self) -> Phase {
        Phase(self.0.iter().map(|(s, r)| (*s, -r.clone())).collect())
    }

    /// Evaluates every theta symbol at zero.
    pub fn drop_theta(&self) -> Phase {
        Phase(self.0.iter().filter(|(s, _)| !matches!(s, PhaseSym::Theta(..))).map(|(s, r)| (*s, r.clone())).collect())
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.0.iter().map(|(s, r)| format!("{}*{}", format_rat(r), s)).collect();
        write!(f, "exp(i*({}))", parts.join("+"))
    }
}

/// A single exact scalar `value * hbar^hbar_power * phase`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Scalar {
    pub value: Gauss,
    pub hbar_power: i32,
    pub phase: Phase,
}

impl Scalar {
    pub fn new(value: Gauss, hbar_power: i32, phase: Phase) -> Self {
        Scalar { value, hbar_power, phase }
    }

    pub fn from_gauss(value: Gauss) -> Self {
        Scalar { value, hbar_power: 0, phase: Phase::identity() }
    }

    pub fn one() -> Self {
        Self::from_gauss(Gauss::one())
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    /// Two scalars can be added into one iff hbar power and phase agree.
    pub fn same_kind(&self, o: &Scalar) -> bool {
        self.hbar_power == o.hbar_power && self.phase == o.phase
    }

    pub fn checked_add(&self, o: &Scalar) -> Option<Scalar> {
        self.same_kind(o).then(|| Scalar { value: &self.value + &o.value, ..self.clone() })
    }
}

impl Mul<&Scalar> for &Scalar {
    type Output = Scalar;
    fn mul(self, o: &Scalar) -> Scalar {
        Scalar { value: &self.value * &o.value, hbar_power: self.hbar_power + o.hbar_power, phase: self.phase.mul(&o.phase) }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)?;
        if self.hbar_power != 0 {
            write!(f, "*hbar^{}", self.hbar_power)?;
        }
        if !self.phase.is_identity() {
            write!(f, "*{}", self.phase)?;
        }
        Ok(())
    }
}

pub fn factorial(n: u32) -> Rat {
    (1..=n as i64).fold(rat_int(1), |acc, k| acc * rat_int(k))
}

pub fn binomial(n: u32, k: u32) -> Rat {
    if k > n {
        return Rat::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}
