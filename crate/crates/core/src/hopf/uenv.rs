//! The enveloping algebra `U(Xi)[[lambda]]` of vector fields: words of
//! fields, Hopf operations, the adjoint action, the deformed product and the
//! `X`/`D` maps. Equality is decided by evaluation on monomials.

use std::collections::{BTreeMap, HashMap};

use super::action::Orbit;
use super::lie::Generators;
use super::twist::TwistExpansion;
use super::ug::UgTensor;
use crate::diffop::DiffOp;
use crate::field::{Deformable, VectorField};
use crate::function::FunctionExpr;
use crate::scalar::Gauss;
use crate::series::{LambdaSeries, Linear};

/// A product of vector fields; the empty word is the unit.
pub type Word = Vec<VectorField>;

/// Finite sum of `c * lambda^d * word`.
#[derive(Clone, PartialEq, Debug)]
pub struct UEnvElement {
    dim: usize,
    order: u32,
    terms: BTreeMap<(u32, Word), Gauss>,
}

impl UEnvElement {
    pub fn zero(dim: usize, order: u32) -> Self {
        UEnvElement { dim, order, terms: BTreeMap::new() }
    }

    pub fn unit(dim: usize, order: u32) -> Self {
        Self::word(dim, order, vec![])
    }

    pub fn word(dim: usize, order: u32, w: Word) -> Self {
        let mut out = Self::zero(dim, order);
        out.add_term(0, w, Gauss::one());
        out
    }

    pub fn field(v: &VectorField, order: u32) -> Self {
        Self::word(v.dim(), order, vec![v.clone()])
    }

    /// Image of a single-leg `U(g)` tensor under the generator realization.
    pub fn from_ug(gens: &Generators, t: &UgTensor) -> Self {
        assert_eq!(t.arity(), 1);
        let mut out = Self::zero(gens.dim(), t.order());
        for (d, ws, c) in t.terms() {
            out.add_term(d, ws[0].iter().map(|g| gens.field(*g).clone()).collect(), c.clone());
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &Word, &Gauss)> {
        self.terms.iter().map(|((d, w), c)| (*d, w, c))
    }

    pub fn add_term(&mut self, degree: u32, w: Word, c: Gauss) {
        if degree > self.order || c.is_zero() || w.iter().any(|v| v.is_zero()) {
            return;
        }
        let key = (degree, w);
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

    pub fn with_order(&self, order: u32) -> Self {
        let mut out = Self::zero(self.dim, order);
        for ((d, w), c) in &self.terms {
            out.add_term(*d, w.clone(), c.clone());
        }
        out
    }

    /// Multiplies by `lambda^k`.
    pub fn shift(&self, k: u32) -> Self {
        let mut out = Self::zero(self.dim, self.order);
        for ((d, w), c) in &self.terms {
            out.add_term(d + k, w.clone(), c.clone());
        }
        out
    }

    /// Collapses a series of elements into one element.
    pub fn flatten(s: &LambdaSeries<UEnvElement>, dim: usize) -> Self {
        let mut out = Self::zero(dim, s.order());
        for (d, e) in s.iter() {
            out.add_assign(&e.shift(d));
        }
        out
    }

    /// Concatenation product.
    pub fn mul(&self, o: &Self) -> Self {
        let order = self.order.min(o.order);
        let mut out = Self::zero(self.dim, order);
        for ((d1, w1), c1) in &self.terms {
            for ((d2, w2), c2) in &o.terms {
                if d1 + d2 <= order {
                    let mut w = w1.clone();
                    w.extend_from_slice(w2);
                    out.add_term(d1 + d2, w, c1 * c2);
                }
            }
        }
        out
    }

    /// `eps`: keeps the coefficients of the empty word.
    pub fn counit(&self) -> LambdaSeries<Gauss> {
        let mut out = LambdaSeries::zero(self.order);
        for ((d, w), c) in &self.terms {
            if w.is_empty() {
                out.add_term(*d, c);
            }
        }
        out
    }

    /// `S(v_1...v_k) = (-1)^k v_k...v_1`.
    pub fn antipode(&self) -> Self {
        let mut out = Self::zero(self.dim, self.order);
        for ((d, w), c) in &self.terms {
            let sign = if w.len() % 2 == 0 { Gauss::one() } else { Gauss::int(-1) };
            out.add_term(*d, w.iter().rev().cloned().collect(), c * &sign);
        }
        out
    }

    /// `Delta(v_1...v_k)`: sum over ordered splittings into two subwords.
    pub fn coproduct(&self) -> UTensor {
        let mut out = UTensor::zero(self.dim, 2, self.order);
        for ((d, w), c) in &self.terms {
            for (l, r) in splittings(w) {
                out.add_term(*d, vec![l, r], c.clone());
            }
        }
        out
    }

    /// Adjoint action of a vector field, `ad_t(z) = t z - z t`, computed as
    /// the derivation `[t, .]` on each factor.
    pub fn ad_field(&self, t: &VectorField) -> Self {
        let mut out = Self::zero(self.dim, self.order);
        for ((d, w), c) in &self.terms {
            for i in 0..w.len() {
                let b = t.bracket(&w[i]);
                if b.is_zero() {
                    continue;
                }
                let mut nw = w.clone();
                nw[i] = b;
                out.add_term(*d, nw, c.clone());
            }
        }
        out
    }

    /// Adjoint action of a general element, `ad_xi(z) = xi_1 z S(xi_2)`.
    pub fn adjoint_action(&self, zeta: &Self) -> Self {
        let mut out = Self::zero(self.dim, self.order.min(zeta.order));
        for (d, legs, c) in self.coproduct().terms() {
            let left = Self::word(self.dim, out.order, legs[0].clone());
            let right = Self::word(self.dim, out.order, legs[1].clone()).antipode();
            out.add_assign(&left.mul(zeta).mul(&right).scale(c).shift(d));
        }
        out
    }

    /// `sum c lambda^d w(f)` with words acting right to left.
    pub fn apply(&self, f: &FunctionExpr) -> LambdaSeries<FunctionExpr> {
        let mut out = LambdaSeries::zero(self.order);
        let mut cache: HashMap<&[VectorField], FunctionExpr> = HashMap::new();
        for ((d, w), c) in &self.terms {
            let img = apply_word(w, f, &mut cache);
            out.add_term(*d, &img.scale(c));
        }
        out
    }

    /// Normal-form differential operator of each lambda-degree.
    pub fn realize(&self) -> LambdaSeries<DiffOp> {
        let mut out = LambdaSeries::zero(self.order);
        let mut cache: HashMap<Word, DiffOp> = HashMap::new();
        for ((d, w), c) in &self.terms {
            out.add_term(*d, &realize_word(w, self.dim, &mut cache).scale(c));
        }
        out
    }

    /// Largest word length (derivative order bound).
    pub fn max_length(&self) -> usize {
        self.terms.keys().map(|(_, w)| w.len()).max().unwrap_or(0)
    }
}

fn apply_word<'a>(w: &'a [VectorField], f: &FunctionExpr, cache: &mut HashMap<&'a [VectorField], FunctionExpr>) -> FunctionExpr {
    if w.is_empty() {
        return f.clone();
    }
    if let Some(v) = cache.get(w) {
        return v.clone();
    }
    let inner = apply_word(&w[1..], f, cache);
    let out = w[0].apply(&inner);
    cache.insert(w, out.clone());
    out
}

fn realize_word(w: &[VectorField], dim: usize, cache: &mut HashMap<Word, DiffOp>) -> DiffOp {
    if w.is_empty() {
        return DiffOp::identity(dim);
    }
    if let Some(op) = cache.get(w) {
        return op.clone();
    }
    let head = realize_word(&w[..w.len() - 1], dim, cache);
    let op = head.compose(&DiffOp::from_vector_field(&w[w.len() - 1]));
    cache.insert(w.to_vec(), op.clone());
    op
}

fn splittings(w: &[VectorField]) -> Vec<(Word, Word)> {
    let mut out = Vec::with_capacity(1 << w.len());
    for mask in 0u32..(1 << w.len()) {
        let mut l = Vec::new();
        let mut r = Vec::new();
        for (i, v) in w.iter().enumerate() {
            if mask & (1 << i) != 0 {
                l.push(v.clone());
            } else {
                r.push(v.clone());
            }
        }
        out.push((l, r));
    }
    out
}

impl Linear for UEnvElement {
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_assign(&mut self, o: &Self) {
        self.order = self.order.min(o.order);
        let order = self.order;
        self.terms.retain(|(d, _), _| *d <= order);
        for ((d, w), c) in &o.terms {
            self.add_term(*d, w.clone(), c.clone());
        }
    }
    fn term_count(&self) -> usize {
        self.terms.len()
    }
    fn scale(&self, s: &Gauss) -> Self {
        let mut out = Self::zero(self.dim, self.order);
        for ((d, w), c) in &self.terms {
            out.add_term(*d, w.clone(), c * s);
        }
        out
    }
}

impl Deformable for UEnvElement {
    fn lie(&self, v: &VectorField) -> Self {
        self.ad_field(v)
    }
}

/// Element of `U(Xi)^{(x)arity}[[lambda]]`.
#[derive(Clone, PartialEq, Debug)]
pub struct UTensor {
    dim: usize,
    arity: usize,
    order: u32,
    terms: BTreeMap<(u32, Vec<Word>), Gauss>,
}

impl UTensor {
    pub fn zero(dim: usize, arity: usize, order: u32) -> Self {
        UTensor { dim, arity, order, terms: BTreeMap::new() }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &[Word], &Gauss)> {
        self.terms.iter().map(|((d, ws), c)| (*d, ws.as_slice(), c))
    }

    pub fn add_term(&mut self, degree: u32, ws: Vec<Word>, c: Gauss) {
        if degree > self.order || c.is_zero() || ws.iter().flatten().any(|v| v.is_zero()) {
            return;
        }
        let key = (degree, ws);
        let e = self.terms.entry(key.clone()).or_default();
        *e += &c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// Leg-wise concatenation product.
    pub fn mul(&self, o: &Self) -> Self {
        let order = self.order.min(o.order);
        let mut out = Self::zero(self.dim, self.arity, order);
        for ((d1, w1), c1) in &self.terms {
            for ((d2, w2), c2) in &o.terms {
                if d1 + d2 <= order {
                    let ws = w1.iter().zip(w2).map(|(a, b)| a.iter().chain(b).cloned().collect()).collect();
                    out.add_term(d1 + d2, ws, c1 * c2);
                }
            }
        }
        out
    }

    pub fn coproduct_leg(&self, leg: usize) -> Self {
        let mut out = Self::zero(self.dim, self.arity + 1, self.order);
        for ((d, ws), c) in &self.terms {
            for (l, r) in splittings(&ws[leg]) {
                let mut nw = ws[..leg].to_vec();
                nw.push(l);
                nw.push(r);
                nw.extend_from_slice(&ws[leg + 1..]);
                out.add_term(*d, nw, c.clone());
            }
        }
        out
    }

    pub fn counit_leg(&self, leg: usize) -> Self {
        let mut out = Self::zero(self.dim, self.arity - 1, self.order);
        for ((d, ws), c) in &self.terms {
            if ws[leg].is_empty() {
                let mut nw = ws.clone();
                nw.remove(leg);
                out.add_term(*d, nw, c.clone());
            }
        }
        out
    }

    pub fn antipode_leg(&self, leg: usize) -> Self {
        let mut out = Self::zero(self.dim, self.arity, self.order);
        for ((d, ws), c) in &self.terms {
            let sign = if ws[leg].len() % 2 == 0 { Gauss::one() } else { Gauss::int(-1) };
            let mut nw = ws.clone();
            nw[leg].reverse();
            out.add_term(*d, nw, c * &sign);
        }
        out
    }

    /// `mu`: multiplies all legs together.
    pub fn multiply_legs(&self) -> UEnvElement {
        let mut out = UEnvElement::zero(self.dim, self.order);
        for ((d, ws), c) in &self.terms {
            out.add_term(*d, ws.iter().flatten().cloned().collect(), c.clone());
        }
        out
    }

    /// Single-leg tensor as an element.
    pub fn into_element(&self) -> UEnvElement {
        assert_eq!(self.arity, 1);
        self.multiply_legs()
    }

    /// Realization on `arity` copies of `R^n`, leg `i` acting on copy `i`.
    pub fn realize(&self) -> LambdaSeries<DiffOp> {
        let total = self.dim * self.arity;
        let mut out = LambdaSeries::zero(self.order);
        for ((d, ws), c) in &self.terms {
            let mut op = DiffOp::identity(total);
            for (leg, w) in ws.iter().enumerate() {
                for v in w {
                    op = op.compose(&DiffOp::from_vector_field(&v.embed(total, leg * self.dim)));
                }
            }
            out.add_term(*d, &op.scale(c));
        }
        out
    }
}

/// Evaluates both operator series on every monomial of total degree
/// `<= deg` in `dim` variables and compares the results.
pub fn op_equal_series(a: &LambdaSeries<DiffOp>, b: &LambdaSeries<DiffOp>, dim: usize, deg: u32) -> bool {
    let order = a.order().min(b.order());
    FunctionExpr::monomials_up_to(dim, deg).iter().all(|m| {
        (0..=order).all(|d| {
            let ea = a.coeff(d).map(|op| op.apply(m)).unwrap_or_else(|| FunctionExpr::zero(dim));
            let eb = b.coeff(d).map(|op| op.apply(m)).unwrap_or_else(|| FunctionExpr::zero(dim));
            ea == eb
        })
    })
}

/// Semantic equality of enveloping-algebra elements by evaluation on all
/// monomials of degree `<= deg`.
pub fn op_equal(a: &UEnvElement, b: &UEnvElement, deg: u32) -> bool {
    let order = a.order().min(b.order());
    FunctionExpr::monomials_up_to(a.dim(), deg).iter().all(|m| a.apply(m).truncate(order) == b.apply(m).truncate(order))
}

/// Equality of tensors by evaluation on monomial tensors of degree `<= deg`.
pub fn op_equal_tensor(a: &UTensor, b: &UTensor, deg: u32) -> bool {
    op_equal_series(&a.realize(), &b.realize(), a.dim * a.arity, deg)
}

/// `xi * zeta = fbar^a(xi) fbar_a(zeta)` with twist legs acting by the
/// adjoint action.
pub fn uenv_star(xi: &UEnvElement, zeta: &UEnvElement, tw: &TwistExpansion) -> UEnvElement {
    let order = tw.order.min(xi.order()).min(zeta.order());
    let s = super::action::act2(&tw.gens, &tw.finv, xi, zeta, order, |a, b| a.mul(b));
    UEnvElement::flatten(&s, xi.dim()).with_order(order)
}

/// `D(xi) = fbar^a(xi) fbar_a`.
pub fn dmap(xi: &UEnvElement, tw: &TwistExpansion) -> UEnvElement {
    let order = tw.order.min(xi.order());
    let mut orbit = Orbit::new(&tw.gens, xi.clone());
    let mut out = UEnvElement::zero(xi.dim(), order);
    for (d, ws, c) in tw.finv.terms() {
        if d > order {
            continue;
        }
        let left = orbit.get(&ws[0]).clone();
        let right = leg_word(&tw.gens, &ws[1], order);
        out.add_assign(&left.mul(&right).scale(c).shift(d));
    }
    out
}

fn leg_word(gens: &Generators, w: &[u8], order: u32) -> UEnvElement {
    UEnvElement::word(gens.dim(), order, w.iter().map(|g| gens.field(*g).clone()).collect())
}

/// `chi = f^a S(f_a)`.
pub fn chi(tw: &TwistExpansion) -> UEnvElement {
    let mut out = UEnvElement::zero(tw.dim(), tw.order);
    for (d, ws, c) in tw.f.terms() {
        let l = leg_word(&tw.gens, &ws[0], tw.order);
        let r = leg_word(&tw.gens, &ws[1], tw.order).antipode();
        out.add_assign(&l.mul(&r).scale(c).shift(d));
    }
    out
}

/// `X(xi) = fbar^a xi chi S^{-1}(fbar_a)`; the antipode of a
/// cocommutative enveloping algebra is an involution.
pub fn xmap(xi: &UEnvElement, tw: &TwistExpansion) -> UEnvElement {
    let order = tw.order.min(xi.order());
    let xc = xi.mul(&chi(tw)).with_order(order);
    let mut out = UEnvElement::zero(xi.dim(), order);
    for (d, ws, c) in tw.finv.terms() {
        if d > order {
            continue;
        }
        let l = leg_word(&tw.gens, &ws[0], order);
        let r = leg_word(&tw.gens, &ws[1], order).antipode();
        out.add_assign(&l.mul(&xc).mul(&r).scale(c).shift(d));
    }
    out
}
