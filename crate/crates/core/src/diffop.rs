//! Linear differential operators `sum_alpha c_alpha(x) d^alpha` in normal
//! form (coefficients to the left of derivatives).

use std::collections::BTreeMap;
use std::fmt;

use smallvec::SmallVec;

use crate::field::VectorField;
use crate::function::FunctionExpr;
use crate::scalar::{binomial, Gauss, Rat};
use crate::series::{Linear, Ring};

type MultiIndex = SmallVec<[u8; 8]>;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DiffOp {
    dim: usize,
    terms: BTreeMap<MultiIndex, FunctionExpr>,
}

impl DiffOp {
    pub fn zero(dim: usize) -> Self {
        DiffOp { dim, terms: BTreeMap::new() }
    }

    pub fn identity(dim: usize) -> Self {
        Self::multiplication(&FunctionExpr::one(dim))
    }

    /// Multiplication by `f`.
    pub fn multiplication(f: &FunctionExpr) -> Self {
        let mut op = Self::zero(f.dim());
        op.add_term(MultiIndex::from_elem(0, f.dim()), f);
        op
    }

    pub fn from_vector_field(v: &VectorField) -> Self {
        let dim = v.dim();
        let mut op = Self::zero(dim);
        for (mu, c) in v.comps().iter().enumerate() {
            let mut a = MultiIndex::from_elem(0, dim);
            a[mu] = 1;
            op.add_term(a, c);
        }
        op
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    fn add_term(&mut self, a: MultiIndex, f: &FunctionExpr) {
        if f.is_zero() {
            return;
        }
        let e = self.terms.entry(a.clone()).or_insert_with(|| FunctionExpr::zero(self.dim));
        e.add_assign(f);
        if e.is_zero() {
            self.terms.remove(&a);
        }
    }

    /// Highest derivative order present.
    pub fn order(&self) -> u32 {
        self.terms.keys().map(|a| a.iter().map(|e| *e as u32).sum()).max().unwrap_or(0)
    }

    /// Highest polynomial degree among the coefficients.
    pub fn coeff_degree(&self) -> u32 {
        self.terms.values().map(|c| c.degree()).max().unwrap_or(0)
    }

    pub fn apply(&self, f: &FunctionExpr) -> FunctionExpr {
        let mut out = FunctionExpr::zero(self.dim);
        for (a, c) in &self.terms {
            let mut g = f.clone();
            for (mu, e) in a.iter().enumerate() {
                for _ in 0..*e {
                    g = g.partial(mu);
                }
            }
            if !g.is_zero() {
                out.add_assign(&c.mul(&g));
            }
        }
        out
    }

    /// Operator product `self o other`, brought back to normal form by the
    /// Leibniz rule `d^a (b d^c) = sum_{g <= a} C(a,g) d^g(b) d^{a-g+c}`.
    pub fn compose(&self, o: &Self) -> Self {
        let mut out = Self::zero(self.dim);
        // Derivatives of total order above a polynomial's degree vanish.
        let bounds: Vec<u32> = o.terms.values().map(|c| if c.has_plane_waves() { u32::MAX } else { c.degree() }).collect();
        for (a, ca) in &self.terms {
            for ((b, cb), bound) in o.terms.iter().zip(&bounds) {
                if *bound == 0 {
                    let idx: MultiIndex = (0..self.dim).map(|mu| a[mu] + b[mu]).collect();
                    out.add_term(idx, &ca.mul(cb));
                    continue;
                }
                for g in sub_indices(a) {
                    if g.iter().map(|e| *e as u32).sum::<u32>() > *bound {
                        continue;
                    }
                    let mut coeff = Rat::from_integer(1.into());
                    let mut db = cb.clone();
                    for mu in 0..self.dim {
                        coeff *= binomial(a[mu] as u32, g[mu] as u32);
                        for _ in 0..g[mu] {
                            db = db.partial(mu);
                        }
                    }
                    if db.is_zero() {
                        continue;
                    }
                    let idx: MultiIndex = (0..self.dim).map(|mu| a[mu] - g[mu] + b[mu]).collect();
                    out.add_term(idx, &ca.mul(&db).scale(&Gauss::real(coeff)));
                }
            }
        }
        out
    }

    pub fn commutator(&self, o: &Self) -> Self {
        let mut out = self.compose(o);
        out.sub_assign(&o.compose(self));
        out
    }

    /// Places the operator on the coordinates `offset..offset+dim` of a
    /// larger space.
    pub fn embed(&self, new_dim: usize, offset: usize) -> Self {
        let mut out = Self::zero(new_dim);
        for (a, c) in &self.terms {
            let mut idx = MultiIndex::from_elem(0, new_dim);
            idx[offset..offset + self.dim].copy_from_slice(a);
            out.add_term(idx, &c.embed(new_dim, offset));
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u8], &FunctionExpr)> {
        self.terms.iter().map(|(a, c)| (a.as_slice(), c))
    }
}

fn sub_indices(a: &[u8]) -> Vec<MultiIndex> {
    let mut out = vec![MultiIndex::new()];
    for e in a {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..=*e).map(move |g| {
                    let mut q = p.clone();
                    q.push(g);
                    q
                })
            })
            .collect();
    }
    out
}

impl Linear for DiffOp {
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_assign(&mut self, o: &Self) {
        for (a, c) in &o.terms {
            self.add_term(a.clone(), c);
        }
    }
    fn term_count(&self) -> usize {
        self.terms.values().map(|c| c.num_terms()).sum()
    }
    fn scale(&self, c: &Gauss) -> Self {
        let mut out = Self::zero(self.dim);
        for (a, f) in &self.terms {
            out.add_term(a.clone(), &f.scale(c));
        }
        out
    }
}

impl Ring for DiffOp {
    fn one_like(&self) -> Self {
        Self::identity(self.dim)
    }
    fn ring_mul(&self, o: &Self) -> Self {
        self.compose(o)
    }
}

impl fmt::Display for DiffOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(a, c)| {
                let ds: Vec<String> = a
                    .iter()
                    .enumerate()
                    .filter(|(_, e)| **e > 0)
                    .map(|(mu, e)| if *e == 1 { format!("d{}", mu + 1) } else { format!("d{}^{}", mu + 1, e) })
                    .collect();
                if ds.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c})*{}", ds.join("*"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> FunctionExpr {
        FunctionExpr::var(2, i).unwrap()
    }

    #[test]
    fn composition_matches_sequential_application() {
        let u = VectorField::from_comps(vec![x(0).mul(&x(1)), x(1).pow(2)]).unwrap();
        let v = VectorField::from_comps(vec![x(1), x(0).pow(2).scale(&Gauss::int(3))]).unwrap();
        let uv = DiffOp::from_vector_field(&u).compose(&DiffOp::from_vector_field(&v));
        for f in FunctionExpr::monomials_up_to(2, 4) {
            assert_eq!(uv.apply(&f), u.apply(&v.apply(&f)));
        }
        let comm = DiffOp::from_vector_field(&u).commutator(&DiffOp::from_vector_field(&v));
        assert_eq!(comm, DiffOp::from_vector_field(&u.bracket(&v)));
    }

    #[test]
    fn partials_commute() {
        let d1 = DiffOp::from_vector_field(&VectorField::coord(2, 0));
        let d2 = DiffOp::from_vector_field(&VectorField::coord(2, 1));
        assert_eq!(d1.compose(&d2), d2.compose(&d1));
        assert_eq!(d1.compose(&d2).order(), 2);
    }

    #[test]
    fn embedding_separates_variables() {
        let d1 = DiffOp::from_vector_field(&VectorField::coord(2, 0));
        let a = d1.embed(4, 0);
        let b = DiffOp::multiplication(&x(0)).embed(4, 2);
        assert_eq!(a.compose(&b), b.compose(&a));
    }
}
