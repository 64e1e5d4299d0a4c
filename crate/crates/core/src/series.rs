//! Truncated power series in the formal deformation parameter lambda.

use std::collections::BTreeMap;
use std::fmt;

use crate::scalar::{rat, Gauss};

/// A vector space over the Gaussian rationals.
pub trait Linear: Clone + PartialEq {
    fn is_zero(&self) -> bool;
    fn add_assign(&mut self, other: &Self);
    fn scale(&self, c: &Gauss) -> Self;

    fn sub_assign(&mut self, other: &Self) {
        self.add_assign(&other.scale(&Gauss::int(-1)));
    }

    /// Size measure used in residual reports.
    fn term_count(&self) -> usize {
        usize::from(!self.is_zero())
    }
}

/// A commutative ring on top of [`Linear`].
pub trait Ring: Linear {
    fn one_like(&self) -> Self;
    fn ring_mul(&self, other: &Self) -> Self;
}

impl Linear for Gauss {
    fn is_zero(&self) -> bool {
        Gauss::is_zero(self)
    }
    fn add_assign(&mut self, other: &Self) {
        *self += other;
    }
    fn scale(&self, c: &Gauss) -> Self {
        self * c
    }
}

impl Ring for Gauss {
    fn one_like(&self) -> Self {
        Gauss::one()
    }
    fn ring_mul(&self, other: &Self) -> Self {
        self * other
    }
}

/// `sum_{d <= order} lambda^d coeffs[d]`; degrees above `order` are dropped
/// and zero coefficients are never stored.
#[derive(Clone, PartialEq, Debug)]
pub struct LambdaSeries<T> {
    order: u32,
    coeffs: BTreeMap<u32, T>,
}

impl<T: Linear> LambdaSeries<T> {
    pub fn zero(order: u32) -> Self {
        LambdaSeries { order, coeffs: BTreeMap::new() }
    }

    pub fn constant(value: T, order: u32) -> Self {
        Self::monomial(0, value, order)
    }

    pub fn monomial(degree: u32, value: T, order: u32) -> Self {
        let mut s = Self::zero(order);
        s.add_term(degree, &value);
        s
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn coeff(&self, d: u32) -> Option<&T> {
        self.coeffs.get(&d)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &T)> {
        self.coeffs.iter().map(|(d, t)| (*d, t))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Adds `lambda^d * value`, discarding it when `d` exceeds the order.
    pub fn add_term(&mut self, d: u32, value: &T) {
        if d > self.order || value.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&d) {
            Some(c) => {
                c.add_assign(value);
                if c.is_zero() {
                    self.coeffs.remove(&d);
                }
            }
            None => {
                self.coeffs.insert(d, value.clone());
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.truncate(self.order.min(other.order));
        for (d, c) in other.iter() {
            out.add_term(d, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Gauss::int(-1)))
    }

    pub fn add_assign(&mut self, other: &Self) {
        self.order = self.order.min(other.order);
        self.coeffs.retain(|d, _| *d <= other.order);
        for (d, c) in other.iter() {
            self.add_term(d, c);
        }
    }

    pub fn scale(&self, c: &Gauss) -> Self {
        let mut out = Self::zero(self.order);
        for (d, t) in self.iter() {
            out.add_term(d, &t.scale(c));
        }
        out
    }

    /// Multiplies by `lambda^k`; the result is known through `order + k`.
    pub fn shift(&self, k: u32) -> Self {
        let mut out = Self::zero(self.order + k);
        for (d, t) in self.iter() {
            out.add_term(d + k, t);
        }
        out
    }

    pub fn truncate(&self, order: u32) -> Self {
        let order = order.min(self.order);
        LambdaSeries { order, coeffs: self.coeffs.range(..=order).map(|(d, t)| (*d, t.clone())).collect() }
    }

    pub fn with_order(mut self, order: u32) -> Self {
        self.order = order;
        self.coeffs.retain(|d, _| *d <= order);
        self
    }

    pub fn map<U: Linear>(&self, mut f: impl FnMut(&T) -> U) -> LambdaSeries<U> {
        let mut out = LambdaSeries::zero(self.order);
        for (d, t) in self.iter() {
            out.add_term(d, &f(t));
        }
        out
    }

    /// Graded Cauchy product through a bilinear map, truncated at the
    /// smaller of the two orders.
    pub fn bilinear<U: Linear, V: Linear>(&self, other: &LambdaSeries<U>, mut f: impl FnMut(&T, &U) -> V) -> LambdaSeries<V> {
        let order = self.order.min(other.order);
        let mut out = LambdaSeries::zero(order);
        for (d1, a) in self.iter() {
            for (d2, b) in other.iter() {
                if d1 + d2 <= order {
                    out.add_term(d1 + d2, &f(a, b));
                }
            }
        }
        out
    }

    /// Like [`bilinear`](Self::bilinear) for maps that themselves return a series.
    pub fn bilinear_series<U: Linear, V: Linear>(
        &self,
        other: &LambdaSeries<U>,
        mut f: impl FnMut(&T, &U, u32) -> LambdaSeries<V>,
    ) -> LambdaSeries<V> {
        let order = self.order.min(other.order);
        let mut out = LambdaSeries::zero(order);
        for (d1, a) in self.iter() {
            for (d2, b) in other.iter() {
                if d1 + d2 <= order {
                    let budget = order - d1 - d2;
                    for (d3, c) in f(a, b, budget).iter() {
                        out.add_term(d1 + d2 + d3, c);
                    }
                }
            }
        }
        out
    }

    /// Term counts at each degree `0..=order`.
    pub fn counts(&self) -> Vec<usize> {
        (0..=self.order).map(|d| self.coeff(d).map(|t| t.term_count()).unwrap_or(0)).collect()
    }

    /// Degrees at which the series is nonzero.
    pub fn support(&self) -> Vec<u32> {
        self.coeffs.keys().copied().collect()
    }
}

impl<T: Ring> LambdaSeries<T> {
    pub fn mul(&self, other: &Self) -> Self {
        self.bilinear(other, |a, b| a.ring_mul(b))
    }

    /// `exp(x)` for a series with vanishing constant term.
    pub fn exp(&self) -> Self {
        assert!(self.coeff(0).is_none(), "exp needs a series without constant term");
        let Some((_, any)) = self.coeffs.iter().next() else {
            return self.clone();
        };
        let one = LambdaSeries::constant(any.one_like(), self.order);
        let mut out = one.clone();
        let mut power = one;
        for k in 1..=self.order {
            power = power.mul(self).scale(&Gauss::real(rat(1, k as i64)));
            if power.is_zero() {
                break;
            }
            out = out.add(&power);
        }
        out
    }
}

impl<T: Linear + fmt::Display> fmt::Display for LambdaSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .iter()
            .map(|(d, t)| match d {
                0 => format!("{t}"),
                1 => format!("L*({t})"),
                _ => format!("L^{d}*({t})"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
