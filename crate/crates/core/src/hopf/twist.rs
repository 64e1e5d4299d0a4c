//! Twist specifications, their order-by-order expansion, and the twist
//! axioms checked both in `U(g)` normal form and as differential operators.

use std::collections::HashMap;

use num_traits::Zero;

use super::lie::{Generators, LieAlgebra};
use super::ug::{GenWord, UgTensor};
use crate::diffop::DiffOp;
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::function::FunctionExpr;
use crate::scalar::{rat, rat_int, Gauss, Rat};
use crate::series::{LambdaSeries, Linear};

/// Which family a twist belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Moyal,
    Jordanian,
    ExtJordanian,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Moyal, Family::Jordanian, Family::ExtJordanian];

    pub fn name(self) -> &'static str {
        match self {
            Family::Moyal => "moyal",
            Family::Jordanian => "jordanian",
            Family::ExtJordanian => "ext_jordanian",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "moyal" => Ok(Family::Moyal),
            "jordanian" => Ok(Family::Jordanian),
            "ext_jordanian" | "ext-jordanian" => Ok(Family::ExtJordanian),
            _ => Err(Error::InvalidTwist(format!("unknown twist family `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TwistSpec {
    /// `exp(-(i/2) lambda theta^{mu nu} t_mu (x) t_nu)` for commuting `t_mu`.
    Moyal { theta: Vec<Vec<Rat>>, fields: Vec<VectorField> },
    /// `exp((1/2) H (x) ln(1 + lambda E))` with `[H, E] = 2E`.
    Jordanian { h: VectorField, e: VectorField },
    /// Jordanian factor times `exp(lambda A (x) B (1 + lambda E)^{-1})`.
    ExtJordanian { h: VectorField, e: VectorField, a: VectorField, b: VectorField, alpha: Rat, beta: Rat },
}

fn x_coord(dim: usize, i: usize) -> FunctionExpr {
    FunctionExpr::var(dim, i).expect("coordinate in range")
}

impl TwistSpec {
    /// Moyal twist along the coordinate translations of `R^n`.
    pub fn moyal(theta: Vec<Vec<Rat>>) -> Self {
        let n = theta.len();
        TwistSpec::Moyal { theta, fields: (0..n).map(|i| VectorField::coord(n, i)).collect() }
    }

    /// The trivial twist `1 (x) 1` on `R^n`.
    pub fn identity(dim: usize) -> Self {
        Self::moyal(vec![vec![Rat::zero(); dim]; dim])
    }

    /// Moyal twist on `R^2` with `theta^{12} = t`.
    pub fn moyal_plane(t: Rat) -> Self {
        Self::moyal(vec![vec![Rat::zero(), t.clone()], vec![-t, Rat::zero()]])
    }

    /// `H = -2x d_x`, `E = d_x` on `R^dim` (dim >= 1).
    pub fn jordanian_default(dim: usize) -> Self {
        TwistSpec::Jordanian {
            h: VectorField::coord(dim, 0).mul_fn(&x_coord(dim, 0).scale(&Gauss::int(-2))),
            e: VectorField::coord(dim, 0),
        }
    }

    /// `H = -2x d_x`, `E = d_x`, `A = d_y`, `B = y d_x`, `alpha = 0`,
    /// `beta = 2` on `R^dim` (dim >= 2).
    pub fn ext_jordanian_default(dim: usize) -> Self {
        TwistSpec::ExtJordanian {
            h: VectorField::coord(dim, 0).mul_fn(&x_coord(dim, 0).scale(&Gauss::int(-2))),
            e: VectorField::coord(dim, 0),
            a: VectorField::coord(dim, 1),
            b: VectorField::coord(dim, 0).mul_fn(&x_coord(dim, 1)),
            alpha: rat_int(0),
            beta: rat_int(2),
        }
    }

    pub fn family(&self) -> Family {
        match self {
            TwistSpec::Moyal { .. } => Family::Moyal,
            TwistSpec::Jordanian { .. } => Family::Jordanian,
            TwistSpec::ExtJordanian { .. } => Family::ExtJordanian,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            TwistSpec::Moyal { theta, fields } => fields.first().map(|f| f.dim()).unwrap_or(theta.len()),
            TwistSpec::Jordanian { h, .. } | TwistSpec::ExtJordanian { h, .. } => h.dim(),
        }
    }

    /// Validates the bracket relations and returns the generators.
    pub fn generators(&self) -> Result<Generators> {
        match self {
            TwistSpec::Moyal { theta, fields } => {
                let n = fields.len();
                if theta.len() != n || theta.iter().any(|row| row.len() != n) {
                    return Err(Error::InvalidTwist(format!("theta must be {n}x{n}")));
                }
                for i in 0..n {
                    for j in 0..n {
                        if theta[i][j] != -theta[j][i].clone() {
                            return Err(Error::InvalidTwist("theta must be antisymmetric".into()));
                        }
                    }
                }
                let names = (0..n).map(|i| format!("t{}", i + 1)).collect();
                Generators::new(names, fields.clone(), LieAlgebra::abelian(n))
            }
            TwistSpec::Jordanian { h, e } => {
                let alg = LieAlgebra::from_brackets(2, &[(0, 1, vec![(1, rat_int(2))])]);
                Generators::new(vec!["H".into(), "E".into()], vec![h.clone(), e.clone()], alg)
            }
            TwistSpec::ExtJordanian { h, e, a, b, alpha, beta } => {
                if alpha + beta != rat_int(2) {
                    return Err(Error::InvalidTwist("alpha + beta must equal 2".into()));
                }
                // Generator order: H, E, A, B.
                let alg = LieAlgebra::from_brackets(
                    4,
                    &[
                        (0, 1, vec![(1, rat_int(2))]),
                        (0, 2, vec![(2, alpha.clone())]),
                        (0, 3, vec![(3, beta.clone())]),
                        (2, 3, vec![(1, rat_int(1))]),
                    ],
                );
                Generators::new(vec!["H".into(), "E".into(), "A".into(), "B".into()], vec![h.clone(), e.clone(), a.clone(), b.clone()], alg)
            }
        }
    }
}

/// Twist data truncated at lambda-order `order`.
#[derive(Clone, Debug)]
pub struct TwistExpansion {
    pub family: Family,
    pub order: u32,
    pub gens: Generators,
    pub f: UgTensor,
    pub finv: UgTensor,
    pub f21: UgTensor,
    pub r: UgTensor,
    pub rinv: UgTensor,
}

/// `ln(1 + lambda g)` truncated at `order`, as a single-leg tensor.
fn log_one_plus(alg: &LieAlgebra, g: u8, order: u32) -> UgTensor {
    let mut out = UgTensor::zero(1, order);
    for k in 1..=order {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        let w: GenWord = std::iter::repeat_n(g, k as usize).collect();
        out = out.add(&UgTensor::monomial(alg, order, k, &[&w], Gauss::frac(sign, k as i64)));
    }
    out
}

/// `(1 + lambda g)^{-1}` truncated at `order`.
fn geometric_inverse(alg: &LieAlgebra, g: u8, order: u32) -> UgTensor {
    let mut out = UgTensor::zero(1, order);
    for k in 0..=order {
        let w: GenWord = std::iter::repeat_n(g, k as usize).collect();
        out = out.add(&UgTensor::monomial(alg, order, k, &[&w], Gauss::int(if k % 2 == 0 { 1 } else { -1 })));
    }
    out
}

/// `a (x) b` from two single-leg tensors.
fn outer(a: &UgTensor, b: &UgTensor) -> UgTensor {
    let order = a.order().min(b.order());
    let mut out = UgTensor::zero(2, order);
    for (d1, w1, c1) in a.terms() {
        for (d2, w2, c2) in b.terms() {
            out.add_term(d1 + d2, vec![w1[0].clone(), w2[0].clone()], c1 * c2);
        }
    }
    out
}

/// Expands the twist through lambda-order `order`, after checking its
/// bracket relations against the realizing fields.
pub fn expand_twist(spec: &TwistSpec, order: u32) -> Result<TwistExpansion> {
    let gens = spec.generators()?;
    let alg = gens.algebra().clone();
    let (f, finv) = match spec {
        TwistSpec::Moyal { theta, .. } => {
            let n = theta.len();
            let mut x = UgTensor::zero(2, order);
            for mu in 0..n {
                for nu in 0..n {
                    if !theta[mu][nu].is_zero() {
                        let c = Gauss::imag(-(&theta[mu][nu] * rat(1, 2)));
                        x = x.add(&UgTensor::monomial(&alg, order, 1, &[&[mu as u8], &[nu as u8]], c));
                    }
                }
            }
            (x.exp(&alg), x.scale(&Gauss::int(-1)).exp(&alg))
        }
        TwistSpec::Jordanian { .. } => {
            let h = UgTensor::monomial(&alg, order, 0, &[&[0]], Gauss::frac(1, 2));
            let x = outer(&h, &log_one_plus(&alg, 1, order));
            (x.exp(&alg), x.scale(&Gauss::int(-1)).exp(&alg))
        }
        TwistSpec::ExtJordanian { .. } => {
            let h = UgTensor::monomial(&alg, order, 0, &[&[0]], Gauss::frac(1, 2));
            let x = outer(&h, &log_one_plus(&alg, 1, order));
            let a = UgTensor::monomial(&alg, order, 1, &[&[2]], Gauss::one());
            let b = UgTensor::monomial(&alg, order, 0, &[&[3]], Gauss::one()).mul(&geometric_inverse(&alg, 1, order), &alg);
            let y = outer(&a, &b);
            let f = x.exp(&alg).mul(&y.exp(&alg), &alg);
            let finv = y.scale(&Gauss::int(-1)).exp(&alg).mul(&x.scale(&Gauss::int(-1)).exp(&alg), &alg);
            (f, finv)
        }
    };
    let f21 = f.flip();
    let r = f21.mul(&finv, &alg);
    let rinv = f.mul(&finv.flip(), &alg);
    Ok(TwistExpansion { family: spec.family(), order, gens, f, finv, f21, r, rinv })
}

impl TwistExpansion {
    pub fn dim(&self) -> usize {
        self.gens.dim()
    }

    pub fn algebra(&self) -> &LieAlgebra {
        self.gens.algebra()
    }

    /// Same data truncated at a lower order.
    pub fn truncate(&self, order: u32) -> Self {
        TwistExpansion {
            family: self.family,
            order: order.min(self.order),
            gens: self.gens.clone(),
            f: self.f.truncate(order),
            finv: self.finv.truncate(order),
            f21: self.f21.truncate(order),
            r: self.r.truncate(order),
            rinv: self.rinv.truncate(order),
        }
    }

    /// `true` when every generator acts trivially, so the twist is `1 (x) 1`.
    pub fn is_trivial(&self) -> bool {
        self.f == UgTensor::one(2, self.order)
    }
}

/// Outcome of a twist-axiom check: term counts of the residual at each
/// lambda-degree, once in `U(g)` normal form and once as differential
/// operators realized on copies of `R^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct AxiomResidual {
    pub normal_form: Vec<usize>,
    pub realized: Vec<usize>,
}

impl AxiomResidual {
    pub fn is_zero(&self) -> bool {
        self.normal_form.iter().chain(&self.realized).all(|c| *c == 0)
    }
}

/// Realizes a tensor as a differential operator on `copies` copies of
/// `R^n`; leg `i` acts through the sum of its generators' fields on the
/// copies listed in `legs[i]`.
pub fn realize(gens: &Generators, t: &UgTensor, legs: &[&[usize]], copies: usize) -> LambdaSeries<DiffOp> {
    let n = gens.dim();
    let total = n * copies;
    let gen_op = |g: u8, targets: &[usize]| {
        let mut op = DiffOp::zero(total);
        for c in targets {
            op.add_assign(&DiffOp::from_vector_field(gens.field(g)).embed(total, c * n));
        }
        op
    };
    let mut cache: HashMap<(GenWord, usize), DiffOp> = HashMap::new();
    let mut out = LambdaSeries::zero(t.order());
    for (d, ws, c) in t.terms() {
        let mut op = DiffOp::identity(total);
        for (leg, w) in ws.iter().enumerate() {
            if w.is_empty() {
                continue;
            }
            let key = (w.clone(), leg);
            let wop = cache
                .entry(key)
                .or_insert_with(|| w.iter().fold(DiffOp::identity(total), |acc, g| acc.compose(&gen_op(*g, legs[leg]))))
                .clone();
            op = op.compose(&wop);
        }
        out.add_term(d, &op.scale(c));
    }
    out
}

/// `F_12 (Delta (x) id)(F) - F_23 (id (x) Delta)(F)`.
pub fn check_cocycle(tw: &TwistExpansion) -> AxiomResidual {
    let alg = tw.algebra();
    let f = &tw.f;
    let lhs = f.embed(3, &[0, 1]).mul(&f.coproduct_leg(0), alg);
    let rhs = f.embed(3, &[1, 2]).mul(&f.coproduct_leg(1), alg);
    let normal_form = lhs.sub(&rhs).counts_by_degree();

    let g = &tw.gens;
    let l = realize(g, f, &[&[0], &[1]], 3).mul(&realize(g, f, &[&[0, 1], &[2]], 3));
    let r = realize(g, f, &[&[1], &[2]], 3).mul(&realize(g, f, &[&[0], &[1, 2]], 3));
    let realized = l.sub(&r).counts();
    AxiomResidual { normal_form, realized }
}

/// `((Delta (x) id) F^{-1}) F^{-1}_12 - ((id (x) Delta) F^{-1}) F^{-1}_23`.
pub fn check_inverse_cocycle(tw: &TwistExpansion) -> AxiomResidual {
    let alg = tw.algebra();
    let fi = &tw.finv;
    let lhs = fi.coproduct_leg(0).mul(&fi.embed(3, &[0, 1]), alg);
    let rhs = fi.coproduct_leg(1).mul(&fi.embed(3, &[1, 2]), alg);
    let normal_form = lhs.sub(&rhs).counts_by_degree();
    let g = &tw.gens;
    let l = realize(g, fi, &[&[0, 1], &[2]], 3).mul(&realize(g, fi, &[&[0], &[1]], 3));
    let r = realize(g, fi, &[&[0], &[1, 2]], 3).mul(&realize(g, fi, &[&[1], &[2]], 3));
    AxiomResidual { normal_form, realized: l.sub(&r).counts() }
}

/// Residuals of `(eps (x) id) F - 1` and `(id (x) eps) F - 1`.
pub fn check_counit(tw: &TwistExpansion) -> (Vec<usize>, Vec<usize>) {
    let one = UgTensor::one(1, tw.order);
    (tw.f.counit_leg(0).sub(&one).counts_by_degree(), tw.f.counit_leg(1).sub(&one).counts_by_degree())
}

/// Residuals of `F F^{-1} - 1` and `F^{-1} F - 1`.
pub fn check_inverse(tw: &TwistExpansion) -> (Vec<usize>, Vec<usize>) {
    let alg = tw.algebra();
    let one = UgTensor::one(2, tw.order);
    (tw.f.mul(&tw.finv, alg).sub(&one).counts_by_degree(), tw.finv.mul(&tw.f, alg).sub(&one).counts_by_degree())
}

/// Residual of `F = 1 (x) 1 + O(lambda)`: the degree-0 part minus `1 (x) 1`.
pub fn check_normalization(tw: &TwistExpansion) -> usize {
    tw.f.truncate(0).sub(&UgTensor::one(2, 0)).num_terms()
}

/// Residual of `R - F^{-2}`, which vanishes for abelian twists.
pub fn check_r_is_inverse_square(tw: &TwistExpansion) -> Vec<usize> {
    let alg = tw.algebra();
    tw.r.sub(&tw.finv.mul(&tw.finv, alg)).counts_by_degree()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_theta_gives_unit_twist() {
        let tw = expand_twist(&TwistSpec::identity(2), 4).unwrap();
        assert_eq!(tw.f, UgTensor::one(2, 4));
        assert!(tw.is_trivial());
    }

    #[test]
    fn moyal_first_order() {
        let tw = expand_twist(&TwistSpec::moyal_plane(rat_int(1)), 1).unwrap();
        let alg = tw.algebra().clone();
        let expected = UgTensor::one(2, 1)
            .add(&UgTensor::monomial(&alg, 1, 1, &[&[0], &[1]], Gauss::imag(rat(-1, 2))))
            .add(&UgTensor::monomial(&alg, 1, 1, &[&[1], &[0]], Gauss::imag(rat(1, 2))));
        assert_eq!(tw.f, expected);
    }

    #[test]
    fn jordanian_first_order() {
        let tw = expand_twist(&TwistSpec::jordanian_default(2), 1).unwrap();
        let alg = tw.algebra().clone();
        let expected = UgTensor::one(2, 1).add(&UgTensor::monomial(&alg, 1, 1, &[&[0], &[1]], Gauss::frac(1, 2)));
        assert_eq!(tw.f, expected);
    }

    #[test]
    fn non_commuting_moyal_fields_are_rejected() {
        let x = FunctionExpr::var(2, 0).unwrap();
        let fields = vec![VectorField::coord(2, 0), VectorField::coord(2, 1).mul_fn(&x)];
        let spec = TwistSpec::Moyal { theta: vec![vec![rat_int(0), rat_int(1)], vec![rat_int(-1), rat_int(0)]], fields };
        assert!(matches!(expand_twist(&spec, 2), Err(Error::InvalidTwist(_))));
    }

    #[test]
    fn alpha_plus_beta_must_be_two() {
        let TwistSpec::ExtJordanian { h, e, a, b, .. } = TwistSpec::ext_jordanian_default(2) else { unreachable!() };
        let spec = TwistSpec::ExtJordanian { h, e, a, b, alpha: rat_int(1), beta: rat_int(2) };
        assert!(expand_twist(&spec, 1).is_err());
    }

    #[test]
    fn twist_axioms_for_each_family() {
        for spec in [TwistSpec::moyal_plane(rat(3, 2)), TwistSpec::jordanian_default(2), TwistSpec::ext_jordanian_default(2)] {
            let tw = expand_twist(&spec, 3).unwrap();
            assert!(check_cocycle(&tw).is_zero(), "{:?}", spec.family());
            assert!(check_inverse_cocycle(&tw).is_zero());
            let (a, b) = check_counit(&tw);
            assert!(a.iter().chain(&b).all(|c| *c == 0));
            let (a, b) = check_inverse(&tw);
            assert!(a.iter().chain(&b).all(|c| *c == 0));
            assert_eq!(check_normalization(&tw), 0);
        }
    }

    #[test]
    fn moyal_r_matrix_is_inverse_square() {
        let tw = expand_twist(&TwistSpec::moyal_plane(rat(1, 3)), 4).unwrap();
        assert!(check_r_is_inverse_square(&tw).iter().all(|c| *c == 0));
        let jt = expand_twist(&TwistSpec::jordanian_default(2), 2).unwrap();
        assert!(check_r_is_inverse_square(&jt).iter().any(|c| *c != 0));
    }
}
