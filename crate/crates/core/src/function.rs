//! Polynomial times plane-wave functions on R^n with exact coefficients.

use std::collections::BTreeMap;
use std::fmt;

use smallvec::SmallVec;

use crate::error::{check_dim, Error, Result};
use crate::scalar::{rat_int, Gauss};
use crate::series::{Linear, Ring};

/// Packed monomial key: `dim` exponents followed by `dim` wave-vector entries.
pub type MonoKey = SmallVec<[i32; 8]>;

/// `sum c * x^alpha * exp(i k.x)` in canonical merged form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct FunctionExpr {
    dim: usize,
    terms: BTreeMap<MonoKey, Gauss>,
}

impl FunctionExpr {
    pub fn zero(dim: usize) -> Self {
        FunctionExpr { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: Gauss) -> Self {
        let mut f = Self::zero(dim);
        f.add_term(SmallVec::from_elem(0, 2 * dim), c);
        f
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, Gauss::one())
    }

    /// The coordinate function `x^{index+1}`.
    pub fn var(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(Error::IndexOutOfRange { index, dim });
        }
        Ok(Self::monomial(dim, Gauss::one(), &unit_exps(dim, index), None))
    }

    pub fn monomial(dim: usize, c: Gauss, exps: &[u32], wave: Option<&[i64]>) -> Self {
        assert_eq!(exps.len(), dim);
        let mut key: MonoKey = exps.iter().map(|e| *e as i32).collect();
        match wave {
            Some(k) => {
                assert_eq!(k.len(), dim);
                key.extend(k.iter().map(|k| *k as i32));
            }
            None => key.extend(std::iter::repeat_n(0, dim)),
        }
        let mut f = Self::zero(dim);
        f.add_term(key, c);
        f
    }

    /// `exp(i k.x)`.
    pub fn plane_wave(dim: usize, k: &[i64]) -> Self {
        Self::monomial(dim, Gauss::one(), &vec![0; dim], Some(k))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MonoKey, &Gauss)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, key: MonoKey, c: Gauss) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&key) {
            Some(v) => {
                *v += &c;
                if v.is_zero() {
                    self.terms.remove(&key);
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    /// Coefficient of a pure constant term.
    pub fn constant_term(&self) -> Gauss {
        self.terms.get(&MonoKey::from_elem(0, 2 * self.dim)).cloned().unwrap_or_default()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|k| k.iter().all(|e| *e == 0))
    }

    /// Largest total polynomial degree among the terms.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|k| k[..self.dim].iter().sum::<i32>() as u32).max().unwrap_or(0)
    }

    pub fn has_plane_waves(&self) -> bool {
        self.terms.keys().any(|k| k[self.dim..].iter().any(|w| *w != 0))
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        Linear::add_assign(&mut out, o);
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.sub_assign(o);
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&Gauss::int(-1))
    }

    /// Pointwise product; plane-wave vectors add.
    pub fn mul(&self, o: &Self) -> Self {
        debug_assert_eq!(self.dim, o.dim);
        let mut out = Self::zero(self.dim);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &o.terms {
                let key: MonoKey = ka.iter().zip(kb.iter()).map(|(a, b)| a + b).collect();
                out.add_term(key, ca * cb);
            }
        }
        out
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self> {
        check_dim(self.dim, o.dim)?;
        Ok(self.mul(o))
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::one(self.dim), |acc, _| acc.mul(self))
    }

    /// `d/dx^{mu+1}`; a plane wave contributes `i k_mu`.
    pub fn partial(&self, mu: usize) -> Self {
        assert!(mu < self.dim, "partial index {mu} out of range for dimension {}", self.dim);
        let mut out = Self::zero(self.dim);
        for (k, c) in &self.terms {
            let e = k[mu];
            if e > 0 {
                let mut key = k.clone();
                key[mu] -= 1;
                out.add_term(key, c.scale(&rat_int(e as i64)));
            }
            let w = k[self.dim + mu];
            if w != 0 {
                out.add_term(k.clone(), c * &Gauss::imag(rat_int(w as i64)));
            }
        }
        out
    }

    pub fn try_partial(&self, mu: usize) -> Result<Self> {
        if mu >= self.dim {
            return Err(Error::IndexOutOfRange { index: mu, dim: self.dim });
        }
        Ok(self.partial(mu))
    }

    /// Re-expresses the function in `new_dim` coordinates, placing its own
    /// coordinates at `offset..offset+dim`.
    pub fn embed(&self, new_dim: usize, offset: usize) -> Self {
        assert!(offset + self.dim <= new_dim);
        let mut out = Self::zero(new_dim);
        for (k, c) in &self.terms {
            let mut key = MonoKey::from_elem(0, 2 * new_dim);
            for i in 0..self.dim {
                key[offset + i] = k[i];
                key[new_dim + offset + i] = k[self.dim + i];
            }
            out.add_term(key, c.clone());
        }
        out
    }

    /// Applies `f` to every coefficient.
    pub fn map_coeffs(&self, mut f: impl FnMut(&Gauss) -> Gauss) -> Self {
        let mut out = Self::zero(self.dim);
        for (k, c) in &self.terms {
            out.add_term(k.clone(), f(c));
        }
        out
    }

    pub fn exps(&self, key: &MonoKey) -> Vec<u32> {
        key[..self.dim].iter().map(|e| *e as u32).collect()
    }

    /// All monomials `x^alpha` with `|alpha| <= deg`.
    pub fn monomials_up_to(dim: usize, deg: u32) -> Vec<FunctionExpr> {
        let mut out = Vec::new();
        let mut exps = vec![0u32; dim];
        fn rec(dim: usize, pos: usize, left: u32, exps: &mut Vec<u32>, out: &mut Vec<FunctionExpr>) {
            if pos == dim {
                out.push(FunctionExpr::monomial(dim, Gauss::one(), exps, None));
                return;
            }
            for e in 0..=left {
                exps[pos] = e;
                rec(dim, pos + 1, left - e, exps, out);
            }
            exps[pos] = 0;
        }
        rec(dim, 0, deg, &mut exps, &mut out);
        out
    }

    /// Canonical rendering with the given coordinate names.
    pub fn render_with(&self, names: &dyn Fn(usize) -> String) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut keys: Vec<&MonoKey> = self.terms.keys().collect();
        let d = self.dim;
        keys.sort_by(|a, b| {
            let da: i32 = a[..d].iter().sum();
            let db: i32 = b[..d].iter().sum();
            da.cmp(&db).then_with(|| b[..d].cmp(&a[..d])).then_with(|| a[d..].cmp(&b[d..]))
        });
        let mut out = String::new();
        for (n, key) in keys.iter().enumerate() {
            let c = &self.terms[*key];
            let mut factors = Vec::new();
            for i in 0..d {
                match key[i] {
                    0 => {}
                    1 => factors.push(names(i)),
                    e => factors.push(format!("{}^{}", names(i), e)),
                }
            }
            if key[d..].iter().any(|w| *w != 0) {
                let ks: Vec<String> = key[d..].iter().map(|w| w.to_string()).collect();
                factors.push(format!("e({})", ks.join(",")));
            }
            let (neg, mag) = split_sign(c);
            let body = if factors.is_empty() {
                mag.to_string()
            } else if mag.is_one() {
                factors.join("*")
            } else {
                format!("{}*{}", mag, factors.join("*"))
            };
            if n == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }
}

/// Splits off a leading minus so sums render as `a - b`.
pub(crate) fn split_sign(c: &Gauss) -> (bool, Gauss) {
    use num_traits::{Signed, Zero};
    let neg = if c.im.is_zero() {
        c.re.is_negative()
    } else if c.re.is_zero() {
        c.im.is_negative()
    } else {
        false
    };
    if neg {
        (true, -c)
    } else {
        (false, c.clone())
    }
}

fn unit_exps(dim: usize, i: usize) -> Vec<u32> {
    let mut e = vec![0; dim];
    e[i] = 1;
    e
}

pub fn default_name(i: usize) -> String {
    format!("x{}", i + 1)
}

impl fmt::Display for FunctionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render_with(&default_name))
    }
}

impl Linear for FunctionExpr {
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_assign(&mut self, o: &Self) {
        debug_assert_eq!(self.dim, o.dim);
        for (k, c) in &o.terms {
            self.add_term(k.clone(), c.clone());
        }
    }
    fn term_count(&self) -> usize {
        self.terms.len()
    }
    fn scale(&self, c: &Gauss) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        self.map_coeffs(|x| x * c)
    }
}

impl Ring for FunctionExpr {
    fn one_like(&self) -> Self {
        Self::one(self.dim)
    }
    fn ring_mul(&self, o: &Self) -> Self {
        self.mul(o)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn x(i: usize) -> FunctionExpr {
        FunctionExpr::var(2, i).unwrap()
    }

    #[test]
    fn product_of_coordinates() {
        let p = x(0).mul(&x(1));
        assert_eq!(p, FunctionExpr::monomial(2, Gauss::one(), &[1, 1], None));
        assert_eq!(p.mul(&FunctionExpr::one(2)), p);
        assert_eq!(p.to_string(), "x1*x2");
    }

    #[test]
    fn plane_waves_add_wave_vectors() {
        let a = FunctionExpr::plane_wave(2, &[1, -2]);
        let b = FunctionExpr::plane_wave(2, &[3, 2]);
        assert_eq!(a.mul(&b), FunctionExpr::plane_wave(2, &[4, 0]));
        assert!(a.mul(&FunctionExpr::plane_wave(2, &[-1, 2])).is_constant());
    }

    #[test]
    fn partial_derivatives() {
        assert_eq!(x(0).mul(&x(1)).partial(0), x(1));
        let w = FunctionExpr::plane_wave(2, &[3, 1]);
        assert_eq!(w.partial(0), w.scale(&Gauss::imag(rat(3, 1))));
        assert!(FunctionExpr::constant(2, Gauss::int(5)).partial(1).is_zero());
        assert!(x(0).try_partial(2).is_err());
        assert!(FunctionExpr::var(2, 2).is_err());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = FunctionExpr::one(2);
        let b = FunctionExpr::one(3);
        assert!(matches!(a.try_mul(&b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn rendering_is_sorted_and_signed() {
        let f = x(0).pow(2).scale(&Gauss::frac(-3, 2)).add(&FunctionExpr::constant(2, Gauss::imag(rat(1, 2)))).add(&x(1));
        assert_eq!(f.to_string(), "(1/2)i + x2 - 3/2*x1^2");
    }

    #[test]
    fn monomial_enumeration() {
        assert_eq!(FunctionExpr::monomials_up_to(2, 2).len(), 6);
        assert_eq!(FunctionExpr::monomials_up_to(3, 6).len(), 84);
    }
}
