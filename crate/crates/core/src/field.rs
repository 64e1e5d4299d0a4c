//! Vector fields, 1-forms, exterior forms and mixed tensors with
//! polynomial coefficients, together with their undeformed calculus.

use std::collections::BTreeMap;
use std::fmt;

use smallvec::SmallVec;

use crate::error::{check_dim, Error, Result};
use crate::function::FunctionExpr;
use crate::scalar::Gauss;
use crate::series::Linear;

/// Objects the twist can act on through Lie derivatives.
pub trait Deformable: Linear {
    /// Lie derivative along `v`.
    fn lie(&self, v: &VectorField) -> Self;
}

impl Deformable for FunctionExpr {
    fn lie(&self, v: &VectorField) -> Self {
        v.apply(self)
    }
}

/// `sum_mu v^mu d/dx^mu`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct VectorField {
    comps: Vec<FunctionExpr>,
}

impl VectorField {
    pub fn zero(dim: usize) -> Self {
        VectorField { comps: vec![FunctionExpr::zero(dim); dim] }
    }

    /// The coordinate field `d/dx^{i+1}`.
    pub fn coord(dim: usize, i: usize) -> Self {
        let mut v = Self::zero(dim);
        v.comps[i] = FunctionExpr::one(dim);
        v
    }

    pub fn from_comps(comps: Vec<FunctionExpr>) -> Result<Self> {
        let dim = comps.len();
        for c in &comps {
            check_dim(dim, c.dim())?;
        }
        Ok(VectorField { comps })
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn comp(&self, mu: usize) -> &FunctionExpr {
        &self.comps[mu]
    }

    pub fn comps(&self) -> &[FunctionExpr] {
        &self.comps
    }

    /// `v(f) = v^mu d_mu f`.
    pub fn apply(&self, f: &FunctionExpr) -> FunctionExpr {
        let mut out = FunctionExpr::zero(f.dim());
        for (mu, c) in self.comps.iter().enumerate() {
            if !c.is_zero() {
                out.add_assign(&c.mul(&f.partial(mu)));
            }
        }
        out
    }

    /// `f * v`.
    pub fn mul_fn(&self, f: &FunctionExpr) -> Self {
        VectorField { comps: self.comps.iter().map(|c| c.mul(f)).collect() }
    }

    /// `[u, v](h) = u(v(h)) - v(u(h))`.
    pub fn bracket(&self, o: &Self) -> Self {
        let comps = (0..self.dim()).map(|mu| self.apply(&o.comps[mu]).sub(&o.apply(&self.comps[mu]))).collect();
        VectorField { comps }
    }

    pub fn embed(&self, new_dim: usize, offset: usize) -> Self {
        let mut out = Self::zero(new_dim);
        for (mu, c) in self.comps.iter().enumerate() {
            out.comps[offset + mu] = c.embed(new_dim, offset);
        }
        out
    }

    pub fn to_tensor(&self) -> Tensor {
        let mut t = Tensor::zero(self.dim(), vec![Slot::Vector]);
        for (mu, c) in self.comps.iter().enumerate() {
            t.add_comp(SmallVec::from_slice(&[mu as u8]), c);
        }
        t
    }
}

/// Undeformed Lie bracket with dimension checking.
pub fn lie_bracket(u: &VectorField, v: &VectorField) -> Result<VectorField> {
    check_dim(u.dim(), v.dim())?;
    Ok(u.bracket(v))
}

/// Undeformed pairing `<v, w> = v^mu w_mu`.
pub fn pairing(v: &VectorField, w: &OneForm) -> Result<FunctionExpr> {
    check_dim(v.dim(), w.dim())?;
    let mut out = FunctionExpr::zero(v.dim());
    for (a, b) in v.comps.iter().zip(&w.comps) {
        out.add_assign(&a.mul(b));
    }
    Ok(out)
}

impl Linear for VectorField {
    fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }
    fn add_assign(&mut self, o: &Self) {
        for (a, b) in self.comps.iter_mut().zip(&o.comps) {
            a.add_assign(b);
        }
    }
    fn term_count(&self) -> usize {
        self.comps.iter().map(|c| c.num_terms()).sum()
    }
    fn scale(&self, c: &Gauss) -> Self {
        VectorField { comps: self.comps.iter().map(|f| f.scale(c)).collect() }
    }
}

impl Deformable for VectorField {
    /// On vector fields the Lie derivative is the adjoint action.
    fn lie(&self, v: &VectorField) -> Self {
        v.bracket(self)
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_components(f, &self.comps, "d")
    }
}

fn write_components(f: &mut fmt::Formatter<'_>, comps: &[FunctionExpr], prefix: &str) -> fmt::Result {
    let parts: Vec<String> =
        comps.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(mu, c)| format!("({c})*{prefix}{}", mu + 1)).collect();
    if parts.is_empty() {
        write!(f, "0")
    } else {
        write!(f, "{}", parts.join(" + "))
    }
}

/// `sum_nu w_nu dx^nu`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct OneForm {
    comps: Vec<FunctionExpr>,
}

impl OneForm {
    pub fn zero(dim: usize) -> Self {
        OneForm { comps: vec![FunctionExpr::zero(dim); dim] }
    }

    /// The coordinate differential `dx^{i+1}`.
    pub fn coord(dim: usize, i: usize) -> Self {
        let mut w = Self::zero(dim);
        w.comps[i] = FunctionExpr::one(dim);
        w
    }

    pub fn from_comps(comps: Vec<FunctionExpr>) -> Result<Self> {
        let dim = comps.len();
        for c in &comps {
            check_dim(dim, c.dim())?;
        }
        Ok(OneForm { comps })
    }

    /// `df`.
    pub fn exact(f: &FunctionExpr) -> Self {
        OneForm { comps: (0..f.dim()).map(|mu| f.partial(mu)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn comp(&self, mu: usize) -> &FunctionExpr {
        &self.comps[mu]
    }

    pub fn comps(&self) -> &[FunctionExpr] {
        &self.comps
    }

    pub fn mul_fn(&self, f: &FunctionExpr) -> Self {
        OneForm { comps: self.comps.iter().map(|c| c.mul(f)).collect() }
    }

    pub fn to_form(&self) -> Form {
        let mut out = Form::zero(self.dim(), 1);
        for (mu, c) in self.comps.iter().enumerate() {
            out.add_comp(SmallVec::from_slice(&[mu as u8]), c);
        }
        out
    }

    pub fn to_tensor(&self) -> Tensor {
        let mut t = Tensor::zero(self.dim(), vec![Slot::Covector]);
        for (mu, c) in self.comps.iter().enumerate() {
            t.add_comp(SmallVec::from_slice(&[mu as u8]), c);
        }
        t
    }
}

impl Linear for OneForm {
    fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }
    fn add_assign(&mut self, o: &Self) {
        for (a, b) in self.comps.iter_mut().zip(&o.comps) {
            a.add_assign(b);
        }
    }
    fn term_count(&self) -> usize {
        self.comps.iter().map(|c| c.num_terms()).sum()
    }
    fn scale(&self, c: &Gauss) -> Self {
        OneForm { comps: self.comps.iter().map(|f| f.scale(c)).collect() }
    }
}

impl Deformable for OneForm {
    /// `(L_v w)_nu = v(w_nu) + w_mu d_nu v^mu`.
    fn lie(&self, v: &VectorField) -> Self {
        let dim = self.dim();
        let comps = (0..dim)
            .map(|nu| {
                let mut c = v.apply(&self.comps[nu]);
                for mu in 0..dim {
                    if !self.comps[mu].is_zero() {
                        c.add_assign(&self.comps[mu].mul(&v.comps[mu].partial(nu)));
                    }
                }
                c
            })
            .collect();
        OneForm { comps }
    }
}

impl fmt::Display for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_components(f, &self.comps, "dx")
    }
}

pub type Indices = SmallVec<[u8; 4]>;

/// Sign of the permutation sorting `idx`, or `None` on a repeated index.
fn sort_sign(idx: &mut [u8]) -> Option<i64> {
    let mut sign = 1;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

/// Exterior `p`-form `sum_{I increasing} a_I dx^{i1} ^ ... ^ dx^{ip}`,
/// with `a ^ b = a (x) b - b (x) a` on 1-forms.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Form {
    dim: usize,
    degree: usize,
    comps: BTreeMap<Indices, FunctionExpr>,
}

impl Form {
    pub fn zero(dim: usize, degree: usize) -> Self {
        Form { dim, degree, comps: BTreeMap::new() }
    }

    pub fn function(f: &FunctionExpr) -> Self {
        let mut out = Self::zero(f.dim(), 0);
        out.add_comp(Indices::new(), f);
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn comps(&self) -> impl Iterator<Item = (&[u8], &FunctionExpr)> {
        self.comps.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn comp(&self, idx: &[u8]) -> FunctionExpr {
        self.comps.get(idx).cloned().unwrap_or_else(|| FunctionExpr::zero(self.dim))
    }

    /// Adds `f dx^{idx}` for indices in any order.
    pub fn add_comp(&mut self, idx: Indices, f: &FunctionExpr) {
        debug_assert_eq!(idx.len(), self.degree);
        let mut idx = idx;
        let Some(sign) = sort_sign(&mut idx) else { return };
        if f.is_zero() {
            return;
        }
        let f = if sign < 0 { f.neg() } else { f.clone() };
        let e = self.comps.entry(idx.clone()).or_insert_with(|| FunctionExpr::zero(self.dim));
        e.add_assign(&f);
        if e.is_zero() {
            self.comps.remove(&idx);
        }
    }

    pub fn wedge(&self, o: &Self) -> Self {
        let mut out = Form::zero(self.dim, self.degree + o.degree);
        for (i, a) in &self.comps {
            for (j, b) in &o.comps {
                let mut idx = i.clone();
                idx.extend_from_slice(j);
                out.add_comp(idx, &a.mul(b));
            }
        }
        out
    }

    /// Exterior derivative.
    pub fn d(&self) -> Self {
        let mut out = Form::zero(self.dim, self.degree + 1);
        for (i, a) in &self.comps {
            for mu in 0..self.dim {
                let da = a.partial(mu);
                if !da.is_zero() {
                    let mut idx = Indices::from_slice(&[mu as u8]);
                    idx.extend_from_slice(i);
                    out.add_comp(idx, &da);
                }
            }
        }
        out
    }

    /// Interior product `i_v`.
    pub fn interior(&self, v: &VectorField) -> Self {
        if self.degree == 0 {
            return Form::zero(self.dim, 0);
        }
        let mut out = Form::zero(self.dim, self.degree - 1);
        for (i, a) in &self.comps {
            for k in 0..i.len() {
                let vk = &v.comps[i[k] as usize];
                if vk.is_zero() {
                    continue;
                }
                let mut idx = i.clone();
                idx.remove(k);
                let term = a.mul(vk);
                out.add_comp(idx, &if k % 2 == 0 { term } else { term.neg() });
            }
        }
        out
    }

    pub fn mul_fn(&self, f: &FunctionExpr) -> Self {
        let mut out = Form::zero(self.dim, self.degree);
        for (i, a) in &self.comps {
            out.add_comp(i.clone(), &a.mul(f));
        }
        out
    }

    /// Expands into the antisymmetrized tensor of covariant slots.
    pub fn to_tensor(&self) -> Tensor {
        let mut t = Tensor::zero(self.dim, vec![Slot::Covector; self.degree]);
        for (i, a) in &self.comps {
            for perm in permutations(self.degree) {
                let mut idx: Indices = perm.iter().map(|p| i[*p]).collect();
                let mut sorted = idx.clone();
                let sign = sort_sign(&mut sorted).expect("distinct indices");
                t.add_comp(std::mem::take(&mut idx), &if sign < 0 { a.neg() } else { a.clone() });
            }
        }
        t
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

impl Linear for Form {
    fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }
    fn add_assign(&mut self, o: &Self) {
        debug_assert_eq!(self.degree, o.degree);
        for (i, a) in &o.comps {
            self.add_comp(i.clone(), a);
        }
    }
    fn term_count(&self) -> usize {
        self.comps.values().map(|c| c.num_terms()).sum()
    }
    fn scale(&self, c: &Gauss) -> Self {
        let mut out = Form::zero(self.dim, self.degree);
        for (i, a) in &self.comps {
            out.add_comp(i.clone(), &a.scale(c));
        }
        out
    }
}

impl Deformable for Form {
    /// Cartan formula `L_v = i_v d + d i_v`.
    fn lie(&self, v: &VectorField) -> Self {
        let mut out = self.d().interior(v);
        if self.degree > 0 {
            out.add_assign(&self.interior(v).d());
        } else {
            out = Form::function(&v.apply(&self.comp(&[])));
        }
        out
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .comps
            .iter()
            .map(|(i, a)| {
                let basis: Vec<String> = i.iter().map(|k| format!("dx{}", k + 1)).collect();
                if basis.is_empty() {
                    format!("{a}")
                } else {
                    format!("({a})*{}", basis.join("^"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Kind of a tensor slot.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Slot {
    Vector,
    Covector,
}

/// Mixed tensor `sum T_{i1..ik} b^{i1} (x) ... (x) b^{ik}` where each basis
/// factor is `d/dx^i` or `dx^i` according to its slot.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Tensor {
    dim: usize,
    slots: Vec<Slot>,
    comps: BTreeMap<Indices, FunctionExpr>,
}

impl Tensor {
    pub fn zero(dim: usize, slots: Vec<Slot>) -> Self {
        Tensor { dim, slots, comps: BTreeMap::new() }
    }

    pub fn scalar(f: &FunctionExpr) -> Self {
        let mut t = Self::zero(f.dim(), vec![]);
        t.add_comp(Indices::new(), f);
        t
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn rank(&self) -> usize {
        self.slots.len()
    }

    pub fn comps(&self) -> impl Iterator<Item = (&[u8], &FunctionExpr)> {
        self.comps.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn comp(&self, idx: &[u8]) -> FunctionExpr {
        self.comps.get(idx).cloned().unwrap_or_else(|| FunctionExpr::zero(self.dim))
    }

    pub fn add_comp(&mut self, idx: Indices, f: &FunctionExpr) {
        debug_assert_eq!(idx.len(), self.slots.len());
        if f.is_zero() {
            return;
        }
        let e = self.comps.entry(idx.clone()).or_insert_with(|| FunctionExpr::zero(self.dim));
        e.add_assign(f);
        if e.is_zero() {
            self.comps.remove(&idx);
        }
    }

    /// Rank-0 tensor as a function.
    pub fn as_function(&self) -> Option<FunctionExpr> {
        self.slots.is_empty().then(|| self.comp(&[]))
    }

    pub fn as_vector_field(&self) -> Option<VectorField> {
        (self.slots == [Slot::Vector]).then(|| VectorField { comps: (0..self.dim).map(|mu| self.comp(&[mu as u8])).collect() })
    }

    pub fn as_one_form(&self) -> Option<OneForm> {
        (self.slots == [Slot::Covector]).then(|| OneForm { comps: (0..self.dim).map(|mu| self.comp(&[mu as u8])).collect() })
    }

    /// Undeformed tensor product.
    pub fn tensor(&self, o: &Self) -> Self {
        let mut slots = self.slots.clone();
        slots.extend_from_slice(&o.slots);
        let mut out = Tensor::zero(self.dim, slots);
        for (i, a) in &self.comps {
            for (j, b) in &o.comps {
                let mut idx = i.clone();
                idx.extend_from_slice(j);
                out.add_comp(idx, &a.mul(b));
            }
        }
        out
    }

    pub fn mul_fn(&self, f: &FunctionExpr) -> Self {
        let mut out = Tensor::zero(self.dim, self.slots.clone());
        for (i, a) in &self.comps {
            out.add_comp(i.clone(), &a.mul(f));
        }
        out
    }

    /// Contracts the last slot of `self` with the first slot of `o`.
    pub fn contract_inner(&self, o: &Self) -> Result<Self> {
        check_dim(self.dim, o.dim)?;
        let (Some(last), Some(first)) = (self.slots.last(), o.slots.first()) else {
            return Err(Error::RankMismatch("nothing to contract".into()));
        };
        if last == first {
            return Err(Error::RankMismatch(format!("cannot contract {last:?} with {first:?}")));
        }
        let mut slots = self.slots[..self.slots.len() - 1].to_vec();
        slots.extend_from_slice(&o.slots[1..]);
        let mut out = Tensor::zero(self.dim, slots);
        for (i, a) in &self.comps {
            let k = i[i.len() - 1];
            for (j, b) in o.comps.range(Indices::from_slice(&[k])..) {
                if j[0] != k {
                    break;
                }
                let mut idx: Indices = i[..i.len() - 1].into();
                idx.extend_from_slice(&j[1..]);
                out.add_comp(idx, &a.mul(b));
            }
        }
        Ok(out)
    }

    /// Contracts slots `pos` and `pos + 1`, which must be of opposite kind.
    pub fn contract_adjacent(&self, pos: usize) -> Result<Self> {
        if pos + 1 >= self.rank() || self.slots[pos] == self.slots[pos + 1] {
            return Err(Error::RankMismatch(format!("cannot contract slots {pos} and {}", pos + 1)));
        }
        let mut slots = self.slots.clone();
        slots.drain(pos..pos + 2);
        let mut out = Tensor::zero(self.dim, slots);
        for (i, a) in &self.comps {
            if i[pos] == i[pos + 1] {
                let mut idx = i.clone();
                idx.drain(pos..pos + 2);
                out.add_comp(idx, a);
            }
        }
        Ok(out)
    }

    /// Onion pairing: contracts innermost slots first until one side is
    /// exhausted, so `<u (x) v, a (x) b> = <v, a><u, b>`.
    pub fn pair(&self, o: &Self) -> Result<Self> {
        check_dim(self.dim, o.dim)?;
        let mut out = self.tensor(o);
        let mut left = self.rank();
        let mut right = o.rank();
        while left > 0 && right > 0 {
            out = out.contract_adjacent(left - 1)?;
            left -= 1;
            right -= 1;
        }
        Ok(out)
    }

    /// Swaps the two slots of a rank-2 tensor.
    pub fn flip(&self) -> Self {
        assert_eq!(self.rank(), 2);
        let mut out = Tensor::zero(self.dim, vec![self.slots[1], self.slots[0]]);
        for (i, a) in &self.comps {
            out.add_comp(Indices::from_slice(&[i[1], i[0]]), a);
        }
        out
    }
}

impl Linear for Tensor {
    fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }
    fn add_assign(&mut self, o: &Self) {
        debug_assert_eq!(self.slots, o.slots);
        for (i, a) in &o.comps {
            self.add_comp(i.clone(), a);
        }
    }
    fn term_count(&self) -> usize {
        self.comps.values().map(|c| c.num_terms()).sum()
    }
    fn scale(&self, c: &Gauss) -> Self {
        let mut out = Tensor::zero(self.dim, self.slots.clone());
        for (i, a) in &self.comps {
            out.add_comp(i.clone(), &a.scale(c));
        }
        out
    }
}

impl Deformable for Tensor {
    /// Leibniz over slots, with `L_v d_i = -(d_i v^m) d_m` and
    /// `L_v dx^i = (d_m v^i) dx^m`.
    fn lie(&self, v: &VectorField) -> Self {
        let mut out = Tensor::zero(self.dim, self.slots.clone());
        for (i, a) in &self.comps {
            out.add_comp(i.clone(), &v.apply(a));
            for (s, slot) in self.slots.iter().enumerate() {
                let k = i[s] as usize;
                for m in 0..self.dim {
                    let coeff = match slot {
                        Slot::Vector => v.comps[m].partial(k).neg(),
                        Slot::Covector => v.comps[k].partial(m),
                    };
                    if coeff.is_zero() {
                        continue;
                    }
                    let mut idx = i.clone();
                    idx[s] = m as u8;
                    out.add_comp(idx, &a.mul(&coeff));
                }
            }
        }
        out
    }
}

impl fmt::Display for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .comps
            .iter()
            .map(|(i, a)| {
                let basis: Vec<String> = i
                    .iter()
                    .zip(&self.slots)
                    .map(|(k, s)| match s {
                        Slot::Vector => format!("d{}", k + 1),
                        Slot::Covector => format!("dx{}", k + 1),
                    })
                    .collect();
                if basis.is_empty() {
                    format!("{a}")
                } else {
                    format!("({a})*{}", basis.join("(x)"))
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
