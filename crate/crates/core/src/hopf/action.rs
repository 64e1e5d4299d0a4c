//! Action of enveloping-algebra words and twist legs on fields through
//! iterated Lie derivatives.

use std::collections::HashMap;

use super::lie::Generators;
use super::ug::{GenWord, UgTensor};
use crate::field::Deformable;
use crate::series::{LambdaSeries, Linear};

/// Memoized images `w(x)` of one object under generator words.
pub struct Orbit<'a, T> {
    gens: &'a Generators,
    cache: HashMap<GenWord, T>,
}

impl<'a, T: Deformable> Orbit<'a, T> {
    pub fn new(gens: &'a Generators, base: T) -> Self {
        let mut cache = HashMap::new();
        cache.insert(GenWord::new(), base);
        Orbit { gens, cache }
    }

    /// `g_{w[0]}(g_{w[1]}(...(x)))`.
    pub fn get(&mut self, w: &[u8]) -> &T {
        if !self.cache.contains_key(w) {
            let inner = self.get(&w[1..]).clone();
            let img = inner.lie(self.gens.field(w[0]));
            self.cache.insert(GenWord::from_slice(w), img);
        }
        &self.cache[w]
    }
}

/// Applies a single word to an object.
pub fn act_word<T: Deformable>(gens: &Generators, w: &[u8], x: &T) -> T {
    let mut out = x.clone();
    for g in w.iter().rev() {
        out = out.lie(gens.field(*g));
    }
    out
}

/// Applies a one-leg tensor `sum c lambda^d w` to an object.
pub fn act1<T: Deformable>(gens: &Generators, t: &UgTensor, x: &T, budget: u32) -> LambdaSeries<T> {
    assert_eq!(t.arity(), 1);
    let order = t.order().min(budget);
    let mut orbit = Orbit::new(gens, x.clone());
    let mut out = LambdaSeries::zero(order);
    for (d, ws, c) in t.terms() {
        if d <= order {
            let img = orbit.get(&ws[0]);
            if !img.is_zero() {
                out.add_term(d, &img.scale(c));
            }
        }
    }
    out
}

/// `sum c lambda^d op(w1(a), w2(b))` for a two-leg tensor, through degree
/// `min(order, budget)`.
pub fn act2<A, B, C>(gens: &Generators, t: &UgTensor, a: &A, b: &B, budget: u32, mut op: impl FnMut(&A, &B) -> C) -> LambdaSeries<C>
where
    A: Deformable,
    B: Deformable,
    C: Linear,
{
    assert_eq!(t.arity(), 2);
    let order = t.order().min(budget);
    let mut oa = Orbit::new(gens, a.clone());
    let mut ob = Orbit::new(gens, b.clone());
    let mut out = LambdaSeries::zero(order);
    for (d, ws, c) in t.terms() {
        if d > order {
            continue;
        }
        let ia = oa.get(&ws[0]).clone();
        if ia.is_zero() {
            continue;
        }
        let ib = ob.get(&ws[1]);
        if ib.is_zero() {
            continue;
        }
        let v = op(&ia, ib);
        if !v.is_zero() {
            out.add_term(d, &v.scale(c));
        }
    }
    out
}

/// [`act2`] on series arguments: degrees of the arguments and of the
/// tensor add, and everything above the common order is dropped.
pub fn act2_series<A, B, C>(
    gens: &Generators,
    t: &UgTensor,
    a: &LambdaSeries<A>,
    b: &LambdaSeries<B>,
    mut op: impl FnMut(&A, &B) -> C,
) -> LambdaSeries<C>
where
    A: Deformable,
    B: Deformable,
    C: Linear,
{
    a.bilinear_series(b, |x, y, budget| act2(gens, t, x, y, budget, &mut op)).with_order(t.order().min(a.order()).min(b.order()))
}

/// One-leg action on a series argument.
pub fn act1_series<T: Deformable>(gens: &Generators, t: &UgTensor, x: &LambdaSeries<T>) -> LambdaSeries<T> {
    let order = t.order().min(x.order());
    let mut out = LambdaSeries::zero(order);
    for (d, v) in x.iter() {
        if d > order {
            continue;
        }
        for (d2, w) in act1(gens, t, v, order - d).iter() {
            out.add_term(d + d2, w);
        }
    }
    out
}
