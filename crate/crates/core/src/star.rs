//! Twist-deformed bilinear maps: products of functions, module products on
//! fields, tensor and wedge products, pairings, Lie derivatives and the
//! deformed Lie bracket.

use crate::error::{check_dim, Error, Result};
use crate::field::{Deformable, Form, OneForm, Slot, Tensor, VectorField};
use crate::function::FunctionExpr;
use crate::hopf::{expand_twist, Generators, Orbit, TwistExpansion, TwistSpec, UgTensor};
use crate::series::{LambdaSeries, Linear};

/// A twist expanded to a fixed order on `R^n`.
#[derive(Clone, Debug)]
pub struct StarContext {
    twist: TwistExpansion,
}

/// Series of tensor fields produced by the deformed tensor product.
pub type StarTensor = LambdaSeries<Tensor>;

/// Side of a module product relative to the function.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Side {
    Left,
    Right,
}

impl StarContext {
    pub fn new(spec: &TwistSpec, order: u32) -> Result<Self> {
        Ok(StarContext { twist: expand_twist(spec, order)? })
    }

    pub fn from_expansion(twist: TwistExpansion) -> Self {
        StarContext { twist }
    }

    pub fn twist(&self) -> &TwistExpansion {
        &self.twist
    }

    pub fn gens(&self) -> &Generators {
        &self.twist.gens
    }

    pub fn dim(&self) -> usize {
        self.twist.dim()
    }

    pub fn order(&self) -> u32 {
        self.twist.order
    }

    /// `sum c lambda^d op(w1(a), w2(b), budget - d)` over the terms of a
    /// two-leg tensor.
    pub fn twisted<A, B, C>(
        &self,
        t: &UgTensor,
        a: &A,
        b: &B,
        budget: u32,
        mut op: impl FnMut(&A, &B, u32) -> LambdaSeries<C>,
    ) -> LambdaSeries<C>
    where
        A: Deformable,
        B: Deformable,
        C: Linear,
    {
        let order = budget.min(self.order());
        let mut oa = Orbit::new(self.gens(), a.clone());
        let mut ob = Orbit::new(self.gens(), b.clone());
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
            let v = op(&ia, ib, order - d);
            out.add_assign(&v.scale(c).shift(d).with_order(order));
        }
        out
    }

    /// The deformed version `fbar^a(a) . fbar_a(b)` of a bilinear map.
    pub fn star<A, B, C>(&self, a: &A, b: &B, mut op: impl FnMut(&A, &B) -> C) -> LambdaSeries<C>
    where
        A: Deformable,
        B: Deformable,
        C: Linear,
    {
        crate::hopf::act2(self.gens(), &self.twist.finv, a, b, self.order(), |x, y| op(x, y))
    }

    /// Deformed bilinear map on series arguments.
    pub fn star_series<A, B, C>(&self, a: &LambdaSeries<A>, b: &LambdaSeries<B>, op: impl FnMut(&A, &B) -> C) -> LambdaSeries<C>
    where
        A: Deformable,
        B: Deformable,
        C: Linear,
    {
        crate::hopf::act2_series(self.gens(), &self.twist.finv, a, b, op)
    }

    /// [`StarContext::twisted`] on series arguments; degrees add.
    pub fn twisted_series<A, B, C>(
        &self,
        t: &UgTensor,
        a: &LambdaSeries<A>,
        b: &LambdaSeries<B>,
        mut op: impl FnMut(&A, &B, u32) -> LambdaSeries<C>,
    ) -> LambdaSeries<C>
    where
        A: Deformable,
        B: Deformable,
        C: Linear,
    {
        let order = self.order().min(a.order()).min(b.order());
        let mut out = LambdaSeries::zero(order);
        for (da, x) in a.iter() {
            for (db, y) in b.iter() {
                if da + db <= order {
                    out.add_assign(&self.twisted(t, x, y, order - da - db, &mut op).shift(da + db).with_order(order));
                }
            }
        }
        out
    }

    /// `sum Rbar^a(g) # Rbar_a(h)` for a bilinear series-valued `#`: the
    /// R-matrix exchange of the pair `(h, g)`.
    pub fn r_swap<A, B, C>(&self, h: &A, g: &B, op: impl FnMut(&B, &A, u32) -> LambdaSeries<C>) -> LambdaSeries<C>
    where
        A: Deformable,
        B: Deformable,
        C: Linear,
    {
        self.twisted(&self.twist.rinv, g, h, self.order(), op)
    }

    /// [`StarContext::r_swap`] on series arguments.
    pub fn r_swap_series<A, B, C>(
        &self,
        h: &LambdaSeries<A>,
        g: &LambdaSeries<B>,
        op: impl FnMut(&B, &A, u32) -> LambdaSeries<C>,
    ) -> LambdaSeries<C>
    where
        A: Deformable,
        B: Deformable,
        C: Linear,
    {
        self.twisted_series(&self.twist.rinv, g, h, op)
    }
}

/// `f * g = fbar^a(f) fbar_a(g)`.
pub fn star_fn(f: &FunctionExpr, g: &FunctionExpr, ctx: &StarContext) -> Result<LambdaSeries<FunctionExpr>> {
    check_dim(ctx.dim(), f.dim())?;
    check_dim(ctx.dim(), g.dim())?;
    Ok(ctx.star(f, g, |a, b| a.mul(b)))
}

/// Deformed product of two function series.
pub fn star_fn_series(f: &LambdaSeries<FunctionExpr>, g: &LambdaSeries<FunctionExpr>, ctx: &StarContext) -> LambdaSeries<FunctionExpr> {
    ctx.star_series(f, g, |a, b| a.mul(b))
}

/// Objects that are modules over functions.
pub trait FunctionModule: Deformable {
    fn mul_fn(&self, f: &FunctionExpr) -> Self;
}

impl FunctionModule for FunctionExpr {
    fn mul_fn(&self, f: &FunctionExpr) -> Self {
        self.mul(f)
    }
}

impl FunctionModule for VectorField {
    fn mul_fn(&self, f: &FunctionExpr) -> Self {
        VectorField::mul_fn(self, f)
    }
}

impl FunctionModule for OneForm {
    fn mul_fn(&self, f: &FunctionExpr) -> Self {
        OneForm::mul_fn(self, f)
    }
}

impl FunctionModule for Form {
    fn mul_fn(&self, f: &FunctionExpr) -> Self {
        Form::mul_fn(self, f)
    }
}

impl FunctionModule for Tensor {
    fn mul_fn(&self, f: &FunctionExpr) -> Self {
        Tensor::mul_fn(self, f)
    }
}

/// `h * x` (left) or `x * h` (right).
pub fn star_module<X: FunctionModule>(h: &FunctionExpr, x: &X, side: Side, ctx: &StarContext) -> LambdaSeries<X> {
    match side {
        Side::Left => ctx.star(h, x, |a, b| b.mul_fn(a)),
        Side::Right => ctx.star(x, h, |a, b| a.mul_fn(b)),
    }
}

/// Module product with series arguments.
pub fn star_module_series<X: FunctionModule>(
    h: &LambdaSeries<FunctionExpr>,
    x: &LambdaSeries<X>,
    side: Side,
    ctx: &StarContext,
) -> LambdaSeries<X> {
    match side {
        Side::Left => ctx.star_series(h, x, |a, b| b.mul_fn(a)),
        Side::Right => ctx.star_series(x, h, |a, b| a.mul_fn(b)),
    }
}

/// `t1 (x)_* t2 = fbar^a(t1) (x) fbar_a(t2)`.
pub fn tensor_star(t1: &Tensor, t2: &Tensor, ctx: &StarContext) -> StarTensor {
    ctx.star(t1, t2, |a, b| a.tensor(b))
}

pub fn tensor_star_series(t1: &StarTensor, t2: &StarTensor, ctx: &StarContext) -> StarTensor {
    ctx.star_series(t1, t2, |a, b| a.tensor(b))
}

/// `w1 ^_* w2 = fbar^a(w1) ^ fbar_a(w2)`.
pub fn wedge_star(w1: &Form, w2: &Form, ctx: &StarContext) -> LambdaSeries<Form> {
    ctx.star(w1, w2, |a, b| a.wedge(b))
}

pub fn wedge_star_series(w1: &LambdaSeries<Form>, w2: &LambdaSeries<Form>, ctx: &StarContext) -> LambdaSeries<Form> {
    ctx.star_series(w1, w2, |a, b| a.wedge(b))
}

/// The undeformed exterior derivative, which is also the deformed one.
pub fn exterior_d(w: &Form) -> Form {
    w.d()
}

pub fn exterior_d_series(w: &LambdaSeries<Form>) -> LambdaSeries<Form> {
    w.map(|f| f.d())
}

/// `<v, w>_* = <fbar^a(v), fbar_a(w)>`.
pub fn pairing_star(v: &VectorField, w: &OneForm, ctx: &StarContext) -> Result<LambdaSeries<FunctionExpr>> {
    check_dim(ctx.dim(), v.dim())?;
    check_dim(ctx.dim(), w.dim())?;
    Ok(ctx.star(v, w, |a, b| crate::field::pairing(a, b).expect("dimensions checked")))
}

/// Onion pairing of a contravariant tensor with a covariant one, innermost
/// slots contracted first.
pub fn pairing_star_tensor(t: &Tensor, r: &Tensor, ctx: &StarContext) -> Result<StarTensor> {
    check_pairable(t, r)?;
    Ok(ctx.star(t, r, |a, b| a.pair(b).expect("ranks checked")))
}

pub fn pairing_star_tensor_series(t: &StarTensor, r: &StarTensor, ctx: &StarContext) -> Result<StarTensor> {
    for (_, a) in t.iter() {
        for (_, b) in r.iter() {
            check_pairable(a, b)?;
        }
    }
    Ok(ctx.star_series(t, r, |a, b| a.pair(b).expect("ranks checked")))
}

fn check_pairable(t: &Tensor, r: &Tensor) -> Result<()> {
    if t.slots().iter().any(|s| *s != Slot::Vector) || r.slots().iter().any(|s| *s != Slot::Covector) {
        return Err(Error::RankMismatch(format!("cannot pair {:?} with {:?}", t.slots(), r.slots())));
    }
    if t.rank() != r.rank() {
        return Err(Error::RankMismatch(format!("ranks {} and {}", t.rank(), r.rank())));
    }
    check_dim(t.dim(), r.dim())
}

/// `L*_u(x) = L_{fbar^a(u)}(fbar_a(x))`.
pub fn star_lie_derivative<T: Deformable>(u: &VectorField, x: &T, ctx: &StarContext) -> LambdaSeries<T> {
    ctx.star(u, x, |a, b| b.lie(a))
}

pub fn star_lie_derivative_series<T: Deformable>(u: &LambdaSeries<VectorField>, x: &LambdaSeries<T>, ctx: &StarContext) -> LambdaSeries<T> {
    ctx.star_series(u, x, |a, b| b.lie(a))
}

/// `[u, v]_* = [fbar^a(u), fbar_a(v)]`.
pub fn star_lie_bracket(u: &VectorField, v: &VectorField, ctx: &StarContext) -> LambdaSeries<VectorField> {
    ctx.star(u, v, |a, b| a.bracket(b))
}

pub fn star_lie_bracket_series(
    u: &LambdaSeries<VectorField>,
    v: &LambdaSeries<VectorField>,
    ctx: &StarContext,
) -> LambdaSeries<VectorField> {
    ctx.star_series(u, v, |a, b| a.bracket(b))
}

/// `w1 (x)_* w2 + Rbar^a(w2) (x)_* Rbar_a(w1)`.
pub fn star_symmetrize(w1: &OneForm, w2: &OneForm, ctx: &StarContext) -> StarTensor {
    let direct = tensor_star(&w1.to_tensor(), &w2.to_tensor(), ctx);
    let swapped = ctx.r_swap(w1, w2, |b, a, budget| tensor_star(&b.to_tensor(), &a.to_tensor(), ctx).truncate(budget));
    direct.add(&swapped)
}

/// `w1 (x)_* w2 - Rbar^a(w2) (x)_* Rbar_a(w1)`; equals `w1 ^_* w2` as a
/// tensor.
pub fn star_antisymmetrize(w1: &OneForm, w2: &OneForm, ctx: &StarContext) -> StarTensor {
    let direct = tensor_star(&w1.to_tensor(), &w2.to_tensor(), ctx);
    let swapped = ctx.r_swap(w1, w2, |b, a, budget| tensor_star(&b.to_tensor(), &a.to_tensor(), ctx).truncate(budget));
    direct.sub(&swapped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Gauss};

    fn x(i: usize) -> FunctionExpr {
        FunctionExpr::var(2, i).unwrap()
    }

    fn moyal(order: u32) -> StarContext {
        StarContext::new(&TwistSpec::moyal_plane(rat(1, 1)), order).unwrap()
    }

    fn constant_series(c: Gauss, order: u32) -> LambdaSeries<FunctionExpr> {
        LambdaSeries::monomial(1, FunctionExpr::constant(2, c), order)
    }

    #[test]
    fn coordinate_commutator() {
        let ctx = moyal(3);
        let a = star_fn(&x(0), &x(1), &ctx).unwrap();
        let b = star_fn(&x(1), &x(0), &ctx).unwrap();
        assert_eq!(a.sub(&b), constant_series(Gauss::i(), 3));
        let expected = LambdaSeries::constant(x(0).mul(&x(1)), 3).add(&constant_series(Gauss::imag(rat(1, 2)), 3));
        assert_eq!(a, expected);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let ctx = moyal(1);
        assert!(star_fn(&FunctionExpr::var(3, 0).unwrap(), &x(0), &ctx).is_err());
    }

    #[test]
    fn module_products_of_invariant_objects() {
        let ctx = moyal(2);
        let d2 = VectorField::coord(2, 1);
        let left = star_module(&x(0), &d2, Side::Left, &ctx);
        assert_eq!(left, LambdaSeries::constant(d2.mul_fn(&x(0)), 2));
        let one = star_module(&FunctionExpr::one(2), &d2, Side::Left, &ctx);
        assert_eq!(one, LambdaSeries::constant(d2.clone(), 2));
        let dx1 = OneForm::coord(2, 0);
        let h = x(1);
        let right = star_module(&h, &dx1, Side::Right, &ctx);
        let exchanged = ctx.r_swap(&dx1, &h, |g, w, budget| star_module(g, w, Side::Left, &ctx).truncate(budget));
        assert_eq!(right, exchanged);
    }

    #[test]
    fn tensor_and_wedge_of_coordinate_forms() {
        let ctx = moyal(2);
        let dx1 = OneForm::coord(2, 0);
        let dx2 = OneForm::coord(2, 1);
        let t = tensor_star(&dx1.to_tensor(), &dx2.to_tensor(), &ctx);
        assert_eq!(t, LambdaSeries::constant(dx1.to_tensor().tensor(&dx2.to_tensor()), 2));
        assert!(wedge_star(&dx1.to_form(), &dx1.to_form(), &ctx).is_zero());
        let sym = star_symmetrize(&dx1, &dx2, &ctx);
        let mut classical = dx1.to_tensor().tensor(&dx2.to_tensor());
        classical.add_assign(&dx2.to_tensor().tensor(&dx1.to_tensor()));
        assert_eq!(sym, LambdaSeries::constant(classical, 2));
        assert!(star_antisymmetrize(&dx1, &dx1, &ctx).is_zero());
    }

    #[test]
    fn wedge_is_star_antisymmetrized_tensor() {
        let ctx = moyal(3);
        let a = OneForm::coord(2, 0).mul_fn(&x(1));
        let b = OneForm::coord(2, 1).mul_fn(&x(0));
        let wedge = wedge_star(&a.to_form(), &b.to_form(), &ctx).map(|f| f.to_tensor());
        assert_eq!(wedge, star_antisymmetrize(&a, &b, &ctx));
    }

    #[test]
    fn tensor_product_first_order_correction() {
        let ctx = moyal(1);
        let a = OneForm::coord(2, 0).mul_fn(&x(0));
        let b = OneForm::coord(2, 1).mul_fn(&x(1));
        let t = tensor_star(&a.to_tensor(), &b.to_tensor(), &ctx);
        let mut expected = Tensor::zero(2, vec![Slot::Covector, Slot::Covector]);
        expected.add_comp([0u8, 1].into_iter().collect(), &x(0).mul(&x(1)));
        let mut corr = Tensor::zero(2, vec![Slot::Covector, Slot::Covector]);
        corr.add_comp([0u8, 1].into_iter().collect(), &FunctionExpr::constant(2, Gauss::imag(rat(1, 2))));
        assert_eq!(t, LambdaSeries::constant(expected, 1).add(&LambdaSeries::monomial(1, corr, 1)));
    }

    #[test]
    fn exterior_derivative_is_a_star_derivation() {
        let ctx = moyal(3);
        let f = x(0).mul(&x(1)).add(&x(0).pow(2));
        let g = x(1).pow(2);
        let lhs = star_fn(&f, &g, &ctx).unwrap().map(|h| exterior_d(&Form::function(h)));
        let df = Form::function(&f).d();
        let dg = Form::function(&g).d();
        let rhs = star_module(&g, &df, Side::Right, &ctx).add(&star_module(&f, &dg, Side::Left, &ctx));
        assert_eq!(lhs, rhs);
        assert!(exterior_d(&df).is_zero());
    }

    #[test]
    fn pairing_examples() {
        let ctx = moyal(2);
        for i in 0..2 {
            for j in 0..2 {
                let p = pairing_star(&VectorField::coord(2, i), &OneForm::coord(2, j), &ctx).unwrap();
                let expected = if i == j { LambdaSeries::constant(FunctionExpr::one(2), 2) } else { LambdaSeries::zero(2) };
                assert_eq!(p, expected);
            }
        }
        let v = VectorField::coord(2, 0).mul_fn(&x(1));
        let w = OneForm::coord(2, 0).mul_fn(&x(0));
        let p = pairing_star(&v, &w, &ctx).unwrap();
        assert_eq!(p, star_fn(&x(1), &x(0), &ctx).unwrap());
        let t = v.to_tensor();
        assert!(pairing_star_tensor(&t, &t, &ctx).is_err());
    }

    #[test]
    fn coordinate_frame_is_dual_for_every_family() {
        for spec in [TwistSpec::moyal_plane(rat(1, 1)), TwistSpec::jordanian_default(2), TwistSpec::ext_jordanian_default(2)] {
            let ctx = StarContext::new(&spec, 3).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    let p = pairing_star(&VectorField::coord(2, i), &OneForm::coord(2, j), &ctx).unwrap();
                    let one = LambdaSeries::constant(FunctionExpr::one(2), 3);
                    assert_eq!(p, if i == j { one } else { LambdaSeries::zero(3) });
                }
            }
        }
    }

    #[test]
    fn lie_derivative_and_bracket_examples() {
        let ctx = moyal(2);
        let d1 = VectorField::coord(2, 0);
        let d2 = VectorField::coord(2, 1);
        assert_eq!(star_lie_derivative(&d1, &x(0), &ctx), LambdaSeries::constant(FunctionExpr::one(2), 2));
        assert!(star_lie_bracket(&d1, &d2, &ctx).is_zero());
        let u = d2.mul_fn(&x(0));
        let v = d1.mul_fn(&x(1));
        let b = star_lie_bracket(&u, &v, &ctx);
        assert_eq!(b, star_lie_derivative(&u, &v, &ctx));
        assert_eq!(b.coeff(0), Some(&u.bracket(&v)));
    }
}
