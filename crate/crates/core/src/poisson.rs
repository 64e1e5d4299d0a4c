//! Poisson bivectors, Hamiltonian vector fields and the twisted Poisson
//! bracket on phase space.

use crate::error::{check_dim, Error, Result};
use crate::field::{Deformable, Indices, OneForm, Slot, Tensor, VectorField};
use crate::function::FunctionExpr;
use crate::hopf::{Generators, TwistSpec};
use crate::residual::Residual;
use crate::scalar::Rat;
use crate::series::{LambdaSeries, Linear};
use crate::star::{star_fn, star_fn_series, star_lie_bracket, star_lie_derivative, StarContext};

/// Antisymmetric bivector `Lambda = Lambda^{mu nu} d_mu (x) d_nu`, pairing
/// as `{f, g} = <Lambda, df (x) dg> = Lambda^{mu nu} d_nu f d_mu g`.
#[derive(Clone, Debug, PartialEq)]
pub struct PoissonBivector {
    tensor: Tensor,
}

impl PoissonBivector {
    /// `d/dp_l (x) d/dx^l - d/dx^l (x) d/dp_l` on coordinates
    /// `(x^1..x^n, p_1..p_n)`.
    pub fn canonical(n: usize) -> Self {
        let dim = 2 * n;
        let mut t = Tensor::zero(dim, vec![Slot::Vector, Slot::Vector]);
        let one = FunctionExpr::one(dim);
        for l in 0..n {
            t.add_comp(Indices::from_slice(&[(n + l) as u8, l as u8]), &one);
            t.add_comp(Indices::from_slice(&[l as u8, (n + l) as u8]), &one.neg());
        }
        PoissonBivector { tensor: t }
    }

    /// Accepts a rank-2 contravariant tensor with antisymmetric components.
    /// The Jacobi identity is not checked here; see
    /// [`PoissonBivector::jacobi_residual`].
    pub fn from_tensor(tensor: Tensor) -> Result<Self> {
        if tensor.slots() != [Slot::Vector, Slot::Vector] {
            return Err(Error::RankMismatch(format!("bivector needs two vector slots, found {:?}", tensor.slots())));
        }
        let mut sym = tensor.clone();
        sym.add_assign(&tensor.flip());
        if !sym.is_zero() {
            return Err(Error::RankMismatch("bivector components are not antisymmetric".into()));
        }
        Ok(PoissonBivector { tensor })
    }

    pub fn dim(&self) -> usize {
        self.tensor.dim()
    }

    pub fn tensor(&self) -> &Tensor {
        &self.tensor
    }

    pub fn component(&self, mu: usize, nu: usize) -> FunctionExpr {
        self.tensor.comp(&[mu as u8, nu as u8])
    }

    /// Component route for `{f, g}`.
    pub fn bracket(&self, f: &FunctionExpr, g: &FunctionExpr) -> Result<FunctionExpr> {
        check_dim(self.dim(), f.dim())?;
        check_dim(self.dim(), g.dim())?;
        let mut out = FunctionExpr::zero(self.dim());
        for (idx, c) in self.tensor.comps() {
            let (mu, nu) = (idx[0] as usize, idx[1] as usize);
            out = out.add(&c.mul(&f.partial(nu)).mul(&g.partial(mu)));
        }
        Ok(out)
    }

    /// Pairing route `<Lambda, df (x) dg>`.
    pub fn bracket_pairing(&self, f: &FunctionExpr, g: &FunctionExpr) -> Result<FunctionExpr> {
        check_dim(self.dim(), f.dim())?;
        check_dim(self.dim(), g.dim())?;
        let dfdg = OneForm::exact(f).to_tensor().tensor(&OneForm::exact(g).to_tensor());
        let p = self.tensor.pair(&dfdg)?;
        Ok(p.as_function().expect("full contraction is a function"))
    }

    /// `X_f = {f, .}`, by components `X_f^mu = Lambda^{mu nu} d_nu f`.
    pub fn ham_vf(&self, f: &FunctionExpr) -> Result<VectorField> {
        check_dim(self.dim(), f.dim())?;
        let mut comps = vec![FunctionExpr::zero(self.dim()); self.dim()];
        for (idx, c) in self.tensor.comps() {
            let (mu, nu) = (idx[0] as usize, idx[1] as usize);
            comps[mu] = comps[mu].add(&c.mul(&f.partial(nu)));
        }
        VectorField::from_comps(comps)
    }

    /// Pairing route `<Lambda, df>`.
    pub fn ham_vf_pairing(&self, f: &FunctionExpr) -> Result<VectorField> {
        check_dim(self.dim(), f.dim())?;
        let p = self.tensor.pair(&OneForm::exact(f).to_tensor())?;
        Ok(p.as_vector_field().unwrap_or_else(|| VectorField::zero(self.dim())))
    }

    /// `{f, {g, h}} + {g, {h, f}} + {h, {f, g}}`.
    pub fn jacobi_residual(&self, f: &FunctionExpr, g: &FunctionExpr, h: &FunctionExpr) -> Result<FunctionExpr> {
        let a = self.bracket(f, &self.bracket(g, h)?)?;
        let b = self.bracket(g, &self.bracket(h, f)?)?;
        let c = self.bracket(h, &self.bracket(f, g)?)?;
        Ok(a.add(&b).add(&c))
    }

    /// `X_{{f, g}} - [X_f, X_g]`.
    pub fn morphism_residual(&self, f: &FunctionExpr, g: &FunctionExpr) -> Result<VectorField> {
        let lhs = self.ham_vf(&self.bracket(f, g)?)?;
        let rhs = self.ham_vf(f)?.bracket(&self.ham_vf(g)?);
        let mut out = lhs;
        out.sub_assign(&rhs);
        Ok(out)
    }

    /// True iff every generator Lie-derives the bivector to zero.
    pub fn is_invariant_under(&self, gens: &Generators) -> bool {
        gens.fields().iter().all(|t| self.tensor.lie(t).is_zero())
    }
}

/// Compatibility of a twist with a Poisson structure: each twist generator
/// preserves `Lambda`, so `fbar^a (x) fbar_a(Lambda) = 1 (x) Lambda` and its
/// mirror hold.
pub fn compat_check(lambda: &PoissonBivector, spec: &TwistSpec) -> Result<bool> {
    check_dim(lambda.dim(), spec.dim())?;
    Ok(lambda.is_invariant_under(&spec.generators()?))
}

/// `theta^{ls} d/dx^l (x) d/dx^s` on phase space, acting on positions only.
pub fn position_moyal(theta: &[Vec<Rat>]) -> TwistSpec {
    let n = theta.len();
    TwistSpec::Moyal { theta: theta.to_vec(), fields: (0..n).map(|l| VectorField::coord(2 * n, l)).collect() }
}

/// Residual counts of the constants-of-motion check.
#[derive(Clone, Debug)]
pub struct ConstantsReport {
    /// Every twist generator annihilates the Hamiltonian.
    pub hamiltonian_invariant: bool,
    pub residuals: Vec<Residual>,
}

impl ConstantsReport {
    pub fn is_zero(&self) -> bool {
        self.residuals.iter().all(Residual::is_zero)
    }
}

/// A Poisson manifold with a compatible twist. The deformation parameter is
/// kept as a formal series variable; [`PhaseSpace::star_poisson_summed`]
/// sets it to one.
#[derive(Clone, Debug)]
pub struct PhaseSpace {
    lambda: PoissonBivector,
    ctx: StarContext,
}

impl PhaseSpace {
    /// Canonical `T*R^n` with the Moyal twist on positions.
    pub fn canonical(theta: &[Vec<Rat>], order: u32) -> Result<Self> {
        Self::new(PoissonBivector::canonical(theta.len()), &position_moyal(theta), order)
    }

    /// Fails with [`Error::Incompatible`] unless every twist generator
    /// preserves the bivector.
    pub fn new(lambda: PoissonBivector, spec: &TwistSpec, order: u32) -> Result<Self> {
        if !compat_check(&lambda, spec)? {
            return Err(Error::Incompatible("a twist generator does not preserve the Poisson bivector".into()));
        }
        Ok(PhaseSpace { lambda, ctx: StarContext::new(spec, order)? })
    }

    pub fn dim(&self) -> usize {
        self.lambda.dim()
    }

    pub fn order(&self) -> u32 {
        self.ctx.order()
    }

    pub fn bivector(&self) -> &PoissonBivector {
        &self.lambda
    }

    pub fn context(&self) -> &StarContext {
        &self.ctx
    }

    pub fn bracket(&self, f: &FunctionExpr, g: &FunctionExpr) -> Result<FunctionExpr> {
        self.lambda.bracket(f, g)
    }

    pub fn ham_vf(&self, f: &FunctionExpr) -> Result<VectorField> {
        self.lambda.ham_vf(f)
    }

    fn bracket_unchecked(&self, f: &FunctionExpr, g: &FunctionExpr) -> FunctionExpr {
        self.lambda.bracket(f, g).expect("dimensions checked on entry")
    }

    /// `{f, g}_* = {fbar^a(f), fbar_a(g)}`.
    pub fn star_poisson(&self, f: &FunctionExpr, g: &FunctionExpr) -> Result<LambdaSeries<FunctionExpr>> {
        check_dim(self.dim(), f.dim())?;
        check_dim(self.dim(), g.dim())?;
        Ok(self.ctx.star(f, g, |a, b| self.bracket_unchecked(a, b)))
    }

    pub fn star_poisson_series(&self, f: &LambdaSeries<FunctionExpr>, g: &LambdaSeries<FunctionExpr>) -> LambdaSeries<FunctionExpr> {
        self.ctx.star_series(f, g, |a, b| self.bracket_unchecked(a, b))
    }

    /// The bracket with the deformation parameter set to one. Exact whenever
    /// the expansion terminates within the context order, as it does for
    /// polynomials of total degree at most the order.
    pub fn star_poisson_summed(&self, f: &FunctionExpr, g: &FunctionExpr) -> Result<FunctionExpr> {
        let s = self.star_poisson(f, g)?;
        Ok(s.iter().fold(FunctionExpr::zero(self.dim()), |acc, (_, c)| acc.add(c)))
    }

    /// `sum Lambda^{mu nu} d_nu f * d_mu g`, valid for constant components.
    /// On the canonical structure this is `d_x f * d_p g - d_p f * d_x g`.
    pub fn star_poisson_explicit(&self, f: &FunctionExpr, g: &FunctionExpr) -> Result<LambdaSeries<FunctionExpr>> {
        check_dim(self.dim(), f.dim())?;
        check_dim(self.dim(), g.dim())?;
        let mut out = LambdaSeries::zero(self.order());
        for (idx, c) in self.lambda.tensor().comps() {
            if !c.is_constant() {
                return Err(Error::Incompatible("explicit formula needs constant bivector components".into()));
            }
            let (mu, nu) = (idx[0] as usize, idx[1] as usize);
            out.add_assign(&star_fn(&f.partial(nu), &g.partial(mu), &self.ctx)?.scale(&c.constant_term()));
        }
        Ok(out)
    }

    /// `L*_{X_f}(g)`.
    pub fn star_poisson_lie(&self, f: &FunctionExpr, g: &FunctionExpr) -> Result<LambdaSeries<FunctionExpr>> {
        check_dim(self.dim(), g.dim())?;
        Ok(star_lie_derivative(&self.ham_vf(f)?, g, &self.ctx))
    }

    /// `{f, g}_* + {Rbar^a(g), Rbar_a(f)}_*`.
    pub fn antisymmetry_residual(&self, f: &FunctionExpr, g: &FunctionExpr) -> Result<Residual> {
        let direct = self.star_poisson(f, g)?;
        let swapped = self.ctx.r_swap(f, g, |gb, fa, budget| self.star_poisson(gb, fa).expect("checked").truncate(budget));
        Ok(Residual::of("star_antisymmetry", &direct.add(&swapped)))
    }

    /// `{f, {g, h}_*}_* - {{f, g}_*, h}_* - {Rbar^a(g), {Rbar_a(f), h}_*}_*`.
    pub fn jacobi_residual(&self, f: &FunctionExpr, g: &FunctionExpr, h: &FunctionExpr) -> Result<Residual> {
        check_dim(self.dim(), h.dim())?;
        let n = self.order();
        let c = |x: &FunctionExpr| LambdaSeries::constant(x.clone(), n);
        let lhs = self.star_poisson_series(&c(f), &self.star_poisson(g, h)?);
        let first = self.star_poisson_series(&self.star_poisson(f, g)?, &c(h));
        let second = self.ctx.r_swap(f, g, |gb, fa, budget| {
            let inner = self.star_poisson(fa, h).expect("checked").truncate(budget);
            self.star_poisson_series(&LambdaSeries::constant(gb.clone(), budget), &inner)
        });
        Ok(Residual::of("star_jacobi", &lhs.sub(&first).sub(&second)))
    }

    /// `{f, g * h}_* - {f, g}_* * h - Rbar^a(g) * {Rbar_a(f), h}_*`.
    pub fn leibniz_residual(&self, f: &FunctionExpr, g: &FunctionExpr, h: &FunctionExpr) -> Result<Residual> {
        check_dim(self.dim(), h.dim())?;
        let n = self.order();
        let c = |x: &FunctionExpr| LambdaSeries::constant(x.clone(), n);
        let lhs = self.star_poisson_series(&c(f), &star_fn(g, h, &self.ctx)?);
        let first = star_fn_series(&self.star_poisson(f, g)?, &c(h), &self.ctx);
        let second = self.ctx.r_swap(f, g, |gb, fa, budget| {
            let inner = self.star_poisson(fa, h).expect("checked").truncate(budget);
            star_fn_series(&LambdaSeries::constant(gb.clone(), budget), &inner, &self.ctx)
        });
        Ok(Residual::of("star_leibniz", &lhs.sub(&first).sub(&second)))
    }

    /// `[X_f, X_g]_* - X_{{f, g}_*}`.
    pub fn morphism_residual(&self, f: &FunctionExpr, g: &FunctionExpr) -> Result<Residual> {
        let lhs = star_lie_bracket(&self.ham_vf(f)?, &self.ham_vf(g)?, &self.ctx);
        let rhs = self.star_poisson(f, g)?.map(|b| self.lambda.ham_vf(b).expect("checked"));
        Ok(Residual::of_difference("hamiltonian_morphism", &lhs, &rhs))
    }

    /// Definition route against the explicit formula.
    pub fn explicit_residual(&self, f: &FunctionExpr, g: &FunctionExpr) -> Result<Residual> {
        Ok(Residual::of_difference("explicit_formula", &self.star_poisson(f, g)?, &self.star_poisson_explicit(f, g)?))
    }

    /// Definition route against the deformed Lie derivative along `X_f`.
    pub fn lie_residual(&self, f: &FunctionExpr, g: &FunctionExpr) -> Result<Residual> {
        Ok(Residual::of_difference("lie_derivative", &self.star_poisson(f, g)?, &self.star_poisson_lie(f, g)?))
    }

    /// `f' = -{H, f}_*`.
    pub fn time_evolution(&self, h: &FunctionExpr, f: &FunctionExpr) -> Result<LambdaSeries<FunctionExpr>> {
        Ok(self.star_poisson(h, f)?.scale(&crate::scalar::Gauss::int(-1)))
    }

    /// Every twist generator annihilates `h`.
    pub fn is_twist_invariant(&self, h: &FunctionExpr) -> bool {
        self.ctx.gens().fields().iter().all(|t| t.apply(h).is_zero())
    }

    /// For each `Q`: `{Q, H}_*`, and, when `H` is twist invariant, `{Q, H}`
    /// and `{H, Q}_*`. For each pair: `{{Q, Q'}_*, H}_*`. All should vanish.
    pub fn constants_check(&self, h: &FunctionExpr, qs: &[FunctionExpr]) -> Result<ConstantsReport> {
        let invariant = self.is_twist_invariant(h);
        let n = self.order();
        let mut residuals = Vec::new();
        for (i, q) in qs.iter().enumerate() {
            residuals.push(Residual::of(format!("star_conserved[{i}]"), &self.star_poisson(q, h)?));
            if invariant {
                let classical = LambdaSeries::constant(self.bracket(q, h)?, n);
                residuals.push(Residual::of(format!("classical_conserved[{i}]"), &classical));
                residuals.push(Residual::of(format!("reversed_conserved[{i}]"), &self.star_poisson(h, q)?));
            }
        }
        let c = LambdaSeries::constant(h.clone(), n);
        for i in 0..qs.len() {
            for j in i + 1..qs.len() {
                let qq = self.star_poisson(&qs[i], &qs[j])?;
                residuals.push(Residual::of(format!("closure[{i},{j}]"), &self.star_poisson_series(&qq, &c)));
            }
        }
        Ok(ConstantsReport { hamiltonian_invariant: invariant, residuals })
    }
}
