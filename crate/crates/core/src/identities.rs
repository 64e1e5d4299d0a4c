//! Residuals of the algebraic laws of a twist-deformed calculus: the
//! star product, the deformed Lie bracket, and the maps between the
//! twisted and untwisted enveloping algebras.

use crate::field::VectorField;
use crate::function::FunctionExpr;
use crate::hopf::{dmap, uenv_star, xmap, TwistExpansion, UEnvElement};
use crate::residual::Residual;
use crate::series::{LambdaSeries, Linear};
use crate::star::{star_fn_series, star_lie_bracket, star_lie_bracket_series, StarContext};

fn constant<T: Linear>(x: &T, order: u32) -> LambdaSeries<T> {
    LambdaSeries::constant(x.clone(), order)
}

fn star(f: &FunctionExpr, g: &FunctionExpr, ctx: &StarContext) -> LambdaSeries<FunctionExpr> {
    ctx.star(f, g, |a, b| a.mul(b))
}

/// `(f * g) * h - f * (g * h)`.
pub fn associativity(f: &FunctionExpr, g: &FunctionExpr, h: &FunctionExpr, ctx: &StarContext) -> Residual {
    let n = ctx.order();
    let left = star_fn_series(&star(f, g, ctx), &constant(h, n), ctx);
    let right = star_fn_series(&constant(f, n), &star(g, h, ctx), ctx);
    Residual::of_difference("associativity", &left, &right)
}

/// `f * g - Rbar^a(g) * Rbar_a(f)`.
pub fn r_commutativity(f: &FunctionExpr, g: &FunctionExpr, ctx: &StarContext) -> Residual {
    let swapped = ctx.r_swap(f, g, |gb, fa, budget| star(gb, fa, ctx).truncate(budget));
    Residual::of_difference("r_commutativity", &star(f, g, ctx), &swapped)
}

/// `[u, v]_* + [Rbar^a(v), Rbar_a(u)]_*`.
pub fn lie_antisymmetry(u: &VectorField, v: &VectorField, ctx: &StarContext) -> Residual {
    let swapped = ctx.r_swap(u, v, |vb, ua, budget| star_lie_bracket(vb, ua, ctx).truncate(budget));
    Residual::of("lie_antisymmetry", &star_lie_bracket(u, v, ctx).add(&swapped))
}

/// `[u, [v, z]_*]_* - [[u, v]_*, z]_* - [Rbar^a(v), [Rbar_a(u), z]_*]_*`.
pub fn lie_jacobi(u: &VectorField, v: &VectorField, z: &VectorField, ctx: &StarContext) -> Residual {
    let n = ctx.order();
    let lhs = star_lie_bracket_series(&constant(u, n), &star_lie_bracket(v, z, ctx), ctx);
    let first = star_lie_bracket_series(&star_lie_bracket(u, v, ctx), &constant(z, n), ctx);
    let second = ctx
        .r_swap(u, v, |vb, ua, budget| star_lie_bracket_series(&constant(vb, budget), &star_lie_bracket(ua, z, ctx).truncate(budget), ctx));
    Residual::of("lie_jacobi", &lhs.sub(&first).sub(&second))
}

/// Number of evaluation monomials of degree `<= deg` on which the two
/// elements differ, per lambda-order.
pub fn op_residual(name: &str, a: &UEnvElement, b: &UEnvElement, deg: u32) -> Residual {
    let order = a.order().min(b.order());
    let mut r = Residual::new(name, order);
    for m in FunctionExpr::monomials_up_to(a.dim(), deg) {
        let diff = a.apply(&m).truncate(order).sub(&b.apply(&m).truncate(order));
        for d in diff.support() {
            r.counts[d as usize] += 1;
        }
    }
    r
}

fn field_series_element(s: &LambdaSeries<VectorField>, dim: usize) -> UEnvElement {
    let mut out = UEnvElement::zero(dim, s.order());
    for (d, v) in s.iter() {
        out.add_term(d, vec![v.clone()], crate::scalar::Gauss::one());
    }
    out
}

/// `[u, v]_*` against `u * v - Rbar^a(v) * Rbar_a(u)` computed in the
/// enveloping algebra, compared as differential operators.
pub fn bracket_is_star_commutator(u: &VectorField, v: &VectorField, ctx: &StarContext, deg: u32) -> Residual {
    let n = ctx.order();
    let dim = ctx.dim();
    let tw = ctx.twist();
    let (ue, ve) = (UEnvElement::field(u, n), UEnvElement::field(v, n));
    let direct = uenv_star(&ue, &ve, tw);
    let swapped = ctx.r_swap(&ue, &ve, |vb, ua, budget| {
        let t = tw.truncate(budget);
        LambdaSeries::constant(uenv_star(&vb.with_order(budget), &ua.with_order(budget), &t), budget)
    });
    let mut commutator = direct;
    commutator.sub_assign(&UEnvElement::flatten(&swapped, dim));
    let bracket = field_series_element(&star_lie_bracket(u, v, ctx), dim);
    op_residual("bracket_is_star_commutator", &bracket, &commutator, deg)
}

/// `X(D(xi)) - xi`.
pub fn x_inverts_d(xi: &UEnvElement, tw: &TwistExpansion, deg: u32) -> Residual {
    op_residual("x_inverts_d", &xmap(&dmap(xi, tw), tw), &xi.with_order(tw.order), deg)
}

/// `D(xi * zeta) - D(xi) D(zeta)`.
pub fn d_is_homomorphism(xi: &UEnvElement, zeta: &UEnvElement, tw: &TwistExpansion, deg: u32) -> Residual {
    let lhs = dmap(&uenv_star(xi, zeta, tw), tw);
    let rhs = dmap(xi, tw).mul(&dmap(zeta, tw)).with_order(tw.order);
    op_residual("d_is_homomorphism", &lhs, &rhs, deg)
}
