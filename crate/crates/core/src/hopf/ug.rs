//! Tensor powers of the enveloping algebra `U(g)[[lambda]]` in PBW normal
//! form. Generator words are kept with nondecreasing indices, so equality of
//! normal forms is equality in `U(g)^{(x)k}`.

use std::collections::BTreeMap;
use std::fmt;

use smallvec::SmallVec;

use super::lie::{Generators, LieAlgebra};
use crate::scalar::{rat, Gauss};

/// A product of generators `g_{w[0]} g_{w[1]} ...`; empty is the unit.
pub type GenWord = SmallVec<[u8; 8]>;

/// Rewrites a word into PBW normal form using `g_i g_j = g_j g_i + [g_i, g_j]`.
pub fn normal_order(alg: &LieAlgebra, word: &[u8]) -> Vec<(GenWord, Gauss)> {
    let mut done: BTreeMap<GenWord, Gauss> = BTreeMap::new();
    let mut work: Vec<(GenWord, Gauss)> = vec![(GenWord::from_slice(word), Gauss::one())];
    while let Some((w, c)) = work.pop() {
        match w.windows(2).position(|p| p[0] > p[1]) {
            None => {
                let e = done.entry(w).or_default();
                *e += &c;
            }
            Some(i) => {
                let mut swapped = w.clone();
                swapped.swap(i, i + 1);
                for (k, s) in alg.bracket(w[i], w[i + 1]) {
                    let mut shorter: GenWord = w[..i].into();
                    shorter.push(*k);
                    shorter.extend_from_slice(&w[i + 2..]);
                    work.push((shorter, &c * &Gauss::real(s.clone())));
                }
                work.push((swapped, c));
            }
        }
    }
    done.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// Element of `U(g)^{(x)arity}[[lambda]]` truncated at `order`.
#[derive(Clone, PartialEq, Debug)]
pub struct UgTensor {
    arity: usize,
    order: u32,
    terms: BTreeMap<(u32, Vec<GenWord>), Gauss>,
}

impl UgTensor {
    pub fn zero(arity: usize, order: u32) -> Self {
        UgTensor { arity, order, terms: BTreeMap::new() }
    }

    pub fn one(arity: usize, order: u32) -> Self {
        let mut t = Self::zero(arity, order);
        t.add_term(0, vec![GenWord::new(); arity], Gauss::one());
        t
    }

    /// `c * lambda^degree * w_1 (x) ... (x) w_k`, normal-ordering each leg.
    pub fn monomial(alg: &LieAlgebra, order: u32, degree: u32, words: &[&[u8]], c: Gauss) -> Self {
        let mut t = Self::one(words.len(), order);
        for (leg, w) in words.iter().enumerate() {
            let mut f = Self::zero(words.len(), order);
            for (nw, nc) in normal_order(alg, w) {
                let mut ws = vec![GenWord::new(); words.len()];
                ws[leg] = nw;
                f.add_term(0, ws, nc);
            }
            t = t.mul(&f, alg);
        }
        let mut out = Self::zero(words.len(), order);
        for ((d, ws), v) in t.terms {
            out.add_term(d + degree, ws, &v * &c);
        }
        out
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, &[GenWord], &Gauss)> {
        self.terms.iter().map(|((d, ws), c)| (*d, ws.as_slice(), c))
    }

    /// Adds a term whose legs are already in normal form.
    pub fn add_term(&mut self, degree: u32, words: Vec<GenWord>, c: Gauss) {
        debug_assert_eq!(words.len(), self.arity);
        if degree > self.order || c.is_zero() {
            return;
        }
        let key = (degree, words);
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

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.order = self.order.min(o.order);
        out.terms.retain(|(d, _), _| *d <= out.order);
        for ((d, ws), c) in &o.terms {
            out.add_term(*d, ws.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Gauss) -> Self {
        let mut out = Self::zero(self.arity, self.order);
        for ((d, ws), c) in &self.terms {
            out.add_term(*d, ws.clone(), c * s);
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&Gauss::int(-1)))
    }

    /// Leg-wise product, truncated at the smaller order.
    pub fn mul(&self, o: &Self, alg: &LieAlgebra) -> Self {
        assert_eq!(self.arity, o.arity);
        let order = self.order.min(o.order);
        let mut out = Self::zero(self.arity, order);
        for ((d1, w1), c1) in &self.terms {
            for ((d2, w2), c2) in &o.terms {
                if d1 + d2 > order {
                    continue;
                }
                let c = c1 * c2;
                let mut partial: Vec<(Vec<GenWord>, Gauss)> = vec![(Vec::with_capacity(self.arity), c)];
                for leg in 0..self.arity {
                    let mut cat = w1[leg].clone();
                    cat.extend_from_slice(&w2[leg]);
                    let expanded = if alg.is_abelian() {
                        cat.sort_unstable();
                        vec![(cat, Gauss::one())]
                    } else {
                        normal_order(alg, &cat)
                    };
                    let mut next = Vec::with_capacity(partial.len() * expanded.len());
                    for (ws, pc) in &partial {
                        for (nw, nc) in &expanded {
                            let mut ws = ws.clone();
                            ws.push(nw.clone());
                            next.push((ws, pc * nc));
                        }
                    }
                    partial = next;
                }
                for (ws, c) in partial {
                    out.add_term(d1 + d2, ws, c);
                }
            }
        }
        out
    }

    /// `exp(x)` by its Taylor series; `x` must have no degree-0 part.
    pub fn exp(&self, alg: &LieAlgebra) -> Self {
        assert!(self.terms.keys().all(|(d, _)| *d > 0), "exp needs a tensor without degree-0 part");
        let mut out = Self::one(self.arity, self.order);
        let mut power = out.clone();
        for k in 1..=self.order {
            power = power.mul(self, alg).scale(&Gauss::real(rat(1, k as i64)));
            if power.is_zero() {
                break;
            }
            out = out.add(&power);
        }
        out
    }

    /// Reorders legs: leg `i` of the result is leg `perm[i]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.arity);
        let mut out = Self::zero(self.arity, self.order);
        for ((d, ws), c) in &self.terms {
            out.add_term(*d, perm.iter().map(|p| ws[*p].clone()).collect(), c.clone());
        }
        out
    }

    /// `a (x) b -> b (x) a`.
    pub fn flip(&self) -> Self {
        self.permute(&[1, 0])
    }

    /// Places the legs of `self` at `legs` inside a tensor of arity
    /// `arity`, with unit words elsewhere (e.g. `F_12`, `F_23`).
    pub fn embed(&self, arity: usize, legs: &[usize]) -> Self {
        assert_eq!(legs.len(), self.arity);
        let mut out = Self::zero(arity, self.order);
        for ((d, ws), c) in &self.terms {
            let mut nw = vec![GenWord::new(); arity];
            for (i, l) in legs.iter().enumerate() {
                nw[*l] = ws[i].clone();
            }
            out.add_term(*d, nw, c.clone());
        }
        out
    }

    /// Applies the coproduct to leg `leg`; the arity grows by one.
    /// `Delta(g_1...g_k)` is the sum over ordered splittings into two
    /// subsequences, which stay in normal form.
    pub fn coproduct_leg(&self, leg: usize) -> Self {
        let mut out = Self::zero(self.arity + 1, self.order);
        for ((d, ws), c) in &self.terms {
            let w = &ws[leg];
            for mask in 0u32..(1 << w.len()) {
                let mut left = GenWord::new();
                let mut right = GenWord::new();
                for (i, g) in w.iter().enumerate() {
                    if mask & (1 << i) != 0 {
                        left.push(*g);
                    } else {
                        right.push(*g);
                    }
                }
                let mut nw = ws[..leg].to_vec();
                nw.push(left);
                nw.push(right);
                nw.extend_from_slice(&ws[leg + 1..]);
                out.add_term(*d, nw, c.clone());
            }
        }
        out
    }

    /// Applies the counit to leg `leg`; the arity drops by one.
    pub fn counit_leg(&self, leg: usize) -> Self {
        let mut out = Self::zero(self.arity - 1, self.order);
        for ((d, ws), c) in &self.terms {
            if ws[leg].is_empty() {
                let mut nw = ws.clone();
                nw.remove(leg);
                out.add_term(*d, nw, c.clone());
            }
        }
        out
    }

    /// Applies the antipode `S(g_1...g_k) = (-1)^k g_k...g_1` to leg `leg`.
    pub fn antipode_leg(&self, leg: usize, alg: &LieAlgebra) -> Self {
        let mut out = Self::zero(self.arity, self.order);
        for ((d, ws), c) in &self.terms {
            let rev: GenWord = ws[leg].iter().rev().copied().collect();
            let sign = if ws[leg].len() % 2 == 0 { Gauss::one() } else { Gauss::int(-1) };
            for (nw, nc) in normal_order(alg, &rev) {
                let mut words = ws.clone();
                words[leg] = nw;
                out.add_term(*d, words, &(c * &sign) * &nc);
            }
        }
        out
    }

    /// Multiplies the legs together into a single element of `U(g)`.
    pub fn multiply_legs(&self, alg: &LieAlgebra) -> Self {
        let mut out = Self::zero(1, self.order);
        for ((d, ws), c) in &self.terms {
            let cat: GenWord = ws.iter().flat_map(|w| w.iter().copied()).collect();
            for (nw, nc) in normal_order(alg, &cat) {
                out.add_term(*d, vec![nw], c * &nc);
            }
        }
        out
    }

    /// Number of terms at each lambda-degree `0..=order`.
    pub fn counts_by_degree(&self) -> Vec<usize> {
        let mut counts = vec![0; self.order as usize + 1];
        for (d, _) in self.terms.keys() {
            counts[*d as usize] += 1;
        }
        counts
    }

    pub fn truncate(&self, order: u32) -> Self {
        let mut out = Self::zero(self.arity, order.min(self.order));
        for ((d, ws), c) in &self.terms {
            out.add_term(*d, ws.clone(), c.clone());
        }
        out
    }

    pub fn render(&self, gens: &Generators) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((d, ws), c)| {
                let legs: Vec<String> = ws
                    .iter()
                    .map(|w| {
                        if w.is_empty() {
                            "1".to_string()
                        } else {
                            w.iter().map(|g| gens.name(*g).to_string()).collect::<Vec<_>>().join("*")
                        }
                    })
                    .collect();
                let lam = match d {
                    0 => String::new(),
                    1 => "L*".to_string(),
                    _ => format!("L^{d}*"),
                };
                format!("{lam}{c}*{}", legs.join("(x)"))
            })
            .collect();
        parts.join(" + ")
    }
}

impl fmt::Display for UgTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((d, ws), c)| {
                let legs: Vec<String> = ws.iter().map(|w| format!("{:?}", w.as_slice())).collect();
                format!("L^{d}*{c}*{}", legs.join("(x)"))
            })
            .collect();
        write!(f, "{}", if parts.is_empty() { "0".to_string() } else { parts.join(" + ") })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat_int;

    fn sl2_borel() -> LieAlgebra {
        // [H, E] = 2E with H = g0, E = g1.
        LieAlgebra::from_brackets(2, &[(0, 1, vec![(1, rat_int(2))])])
    }

    #[test]
    fn normal_ordering_uses_the_bracket() {
        let alg = sl2_borel();
        // E H = H E - 2E
        let got = normal_order(&alg, &[1, 0]);
        let expected = vec![(GenWord::from_slice(&[0, 1]), Gauss::one()), (GenWord::from_slice(&[1]), Gauss::int(-2))];
        let mut got = got;
        got.sort();
        let mut expected = expected;
        expected.sort();
        assert_eq!(got, expected);
    }

    #[test]
    fn coproduct_of_product_of_generators() {
        let alg = LieAlgebra::abelian(2);
        let t = UgTensor::monomial(&alg, 2, 0, &[&[0, 1]], Gauss::one());
        let d = t.coproduct_leg(0);
        assert_eq!(d.num_terms(), 4);
        let unit = UgTensor::one(1, 2).coproduct_leg(0);
        assert_eq!(unit, UgTensor::one(2, 2));
    }

    #[test]
    fn antipode_and_counit_axioms() {
        let alg = sl2_borel();
        for w in [&[0u8, 1][..], &[1, 0, 1], &[0, 0, 1]] {
            let x = UgTensor::monomial(&alg, 0, 0, &[w], Gauss::one());
            let dx = x.coproduct_leg(0);
            assert_eq!(dx.counit_leg(0), x);
            assert_eq!(dx.counit_leg(1), x);
            assert!(dx.antipode_leg(0, &alg).multiply_legs(&alg).is_zero());
            assert_eq!(dx.coproduct_leg(0), dx.coproduct_leg(1));
        }
    }

    #[test]
    fn coproduct_is_multiplicative() {
        let alg = sl2_borel();
        let a = UgTensor::monomial(&alg, 0, 0, &[&[1]], Gauss::one());
        let b = UgTensor::monomial(&alg, 0, 0, &[&[0, 1]], Gauss::one());
        let lhs = a.mul(&b, &alg).coproduct_leg(0);
        let rhs = a.coproduct_leg(0).mul(&b.coproduct_leg(0), &alg);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn exponential_inverse() {
        let alg = sl2_borel();
        let x = UgTensor::monomial(&alg, 3, 1, &[&[0], &[1]], Gauss::frac(1, 2));
        let f = x.exp(&alg);
        let finv = x.scale(&Gauss::int(-1)).exp(&alg);
        assert_eq!(f.mul(&finv, &alg), UgTensor::one(2, 3));
    }
}
