//! Seeded random inputs for identity checks. The same seed yields the same
//! corpus on every platform.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::field::{OneForm, VectorField};
use crate::function::FunctionExpr;
use crate::geometry::FrameConnection;
use crate::hopf::UEnvElement;
use crate::modes::{ClassicalModePoly, ModeLattice};
use crate::scalar::{rat, Gauss, Rat};
use crate::series::{LambdaSeries, Linear};

pub struct Corpus {
    rng: ChaCha8Rng,
}

impl Corpus {
    pub fn new(seed: u64) -> Self {
        Corpus { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn coeff(&mut self) -> Gauss {
        let choices = [-2, -1, 1, 2];
        Gauss::int(*choices.choose(&mut self.rng).expect("nonempty"))
    }

    /// Rational in `[-3, 3]` with denominator at most 3.
    pub fn rational(&mut self) -> Rat {
        rat(self.rng.gen_range(-3..=3), self.rng.gen_range(1..=3))
    }

    fn exponents(&mut self, dim: usize, max_deg: u32) -> Vec<u32> {
        let total = self.rng.gen_range(0..=max_deg);
        let mut e = vec![0; dim];
        for _ in 0..total {
            e[self.rng.gen_range(0..dim)] += 1;
        }
        e
    }

    /// Nonzero polynomial with one to three terms of degree at most
    /// `max_deg` and coefficients in `{-2, -1, 1, 2}`.
    pub fn poly(&mut self, dim: usize, max_deg: u32) -> FunctionExpr {
        loop {
            let mut f = FunctionExpr::zero(dim);
            for _ in 0..self.rng.gen_range(1..=3) {
                let e = self.exponents(dim, max_deg);
                let c = self.coeff();
                f = f.add(&FunctionExpr::monomial(dim, c, &e, None));
            }
            if !f.is_zero() {
                return f;
            }
        }
    }

    /// Polynomial in the first `waves` coordinates' plane waves: with even
    /// odds multiplies a polynomial by `exp(i k.x)` with `k` in `[-1, 1]`
    /// on those coordinates.
    pub fn wave_poly(&mut self, dim: usize, waves: usize, max_deg: u32) -> FunctionExpr {
        let f = self.poly(dim, max_deg);
        if self.rng.gen_bool(0.5) {
            let mut k = vec![0; dim];
            for kc in k.iter_mut().take(waves) {
                *kc = self.rng.gen_range(-1..=1);
            }
            f.mul(&FunctionExpr::plane_wave(dim, &k))
        } else {
            f
        }
    }

    /// Each component is zero with probability one half, else `poly`.
    pub fn vector_field(&mut self, dim: usize, max_deg: u32) -> VectorField {
        loop {
            let comps = (0..dim).map(|_| self.sparse_poly(dim, max_deg)).collect();
            let v = VectorField::from_comps(comps).expect("dimensions agree");
            if !v.is_zero() {
                return v;
            }
        }
    }

    pub fn one_form(&mut self, dim: usize, max_deg: u32) -> OneForm {
        loop {
            let comps = (0..dim).map(|_| self.sparse_poly(dim, max_deg)).collect();
            let w = OneForm::from_comps(comps).expect("dimensions agree");
            if !w.is_zero() {
                return w;
            }
        }
    }

    fn sparse_poly(&mut self, dim: usize, max_deg: u32) -> FunctionExpr {
        if self.rng.gen_bool(0.5) {
            FunctionExpr::zero(dim)
        } else {
            self.poly(dim, max_deg)
        }
    }

    /// Sum of one or two words, each a product of one or two vector fields
    /// with components of degree at most one.
    pub fn uenv(&mut self, dim: usize, order: u32) -> UEnvElement {
        let mut out = UEnvElement::zero(dim, order);
        for _ in 0..self.rng.gen_range(1..=2) {
            let len = self.rng.gen_range(1..=2);
            let word = (0..len).map(|_| self.vector_field(dim, 1)).collect();
            let c = self.coeff();
            out.add_term(0, word, c);
        }
        out
    }

    /// Connection coefficients with a degree-2 classical part and a degree-1
    /// first-order correction, each entry nonzero with probability one half.
    pub fn connection(&mut self, dim: usize, order: u32) -> FrameConnection {
        FrameConnection::from_fn(dim, order, |_, _, _| {
            let mut s = LambdaSeries::zero(order);
            if self.rng.gen_bool(0.5) {
                s.add_term(0, &self.poly(dim, 2));
            }
            if order >= 1 && self.rng.gen_bool(0.5) {
                s.add_term(1, &self.poly(dim, 1));
            }
            s
        })
        .expect("dimension matches")
    }

    /// Antisymmetric matrix with random rational entries above the diagonal.
    pub fn theta(&mut self, dim: usize) -> Vec<Vec<Rat>> {
        let mut t = vec![vec![rat(0, 1); dim]; dim];
        for i in 0..dim {
            for j in i + 1..dim {
                let r = loop {
                    let r = self.rational();
                    if r != rat(0, 1) {
                        break r;
                    }
                };
                t[j][i] = -r.clone();
                t[i][j] = r;
            }
        }
        t
    }

    /// Monomial in `a`, `a*` over the lattice momenta with `1..=max_deg`
    /// factors and coefficient in `{-2, -1, 1, 2}`.
    pub fn mode_monomial(&mut self, lat: &ModeLattice, max_deg: usize) -> ClassicalModePoly {
        let len = self.rng.gen_range(1..=max_deg);
        let mut out = ClassicalModePoly::constant(crate::scalar::Scalar::from_gauss(self.coeff()));
        for _ in 0..len {
            let k = lat.momenta().choose(&mut self.rng).expect("nonempty lattice").clone();
            let sym = if self.rng.gen_bool(0.5) { ClassicalModePoly::a(&k) } else { ClassicalModePoly::a_dag(&k) };
            out = out.mul(&sym);
        }
        out
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_corpus() {
        let mut a = Corpus::new(7);
        let mut b = Corpus::new(7);
        for _ in 0..5 {
            assert_eq!(a.poly(3, 3), b.poly(3, 3));
            assert_eq!(a.vector_field(2, 2), b.vector_field(2, 2));
        }
        assert_eq!(a.theta(3), b.theta(3));
    }

    #[test]
    fn bounds_hold() {
        let mut c = Corpus::new(1);
        for _ in 0..50 {
            let f = c.poly(2, 3);
            assert!(!f.is_zero() && f.degree() <= 3);
            let t = c.theta(3);
            for i in 0..3 {
                assert_eq!(t[i][i], rat(0, 1));
                for j in 0..3 {
                    assert_eq!(t[i][j], -t[j][i].clone());
                }
            }
        }
    }
}
