//! Covariant derivative, torsion and curvature for a connection given by
//! its coefficients in the coordinate frame `e_i = d_i`, `theta^i = dx^i`,
//! together with the connection, torsion and curvature forms.

use crate::error::{check_dim, Error, Result};
use crate::field::{Form, OneForm, Slot, VectorField};
use crate::function::FunctionExpr;
use crate::residual::Residual;
use crate::series::{LambdaSeries, Linear};
use crate::star::{
    star_lie_bracket_series, star_lie_derivative_series, star_module_series, tensor_star_series, wedge_star, wedge_star_series, Side,
    StarContext, StarTensor,
};

type FnSeries = LambdaSeries<FunctionExpr>;
type VfSeries = LambdaSeries<VectorField>;
type FormSeries = LambdaSeries<Form>;

/// Coefficients `Gamma_ij^k` of `nabla_{e_i} e_j = Gamma_ij^k * e_k`.
#[derive(Clone, PartialEq, Debug)]
pub struct FrameConnection {
    dim: usize,
    order: u32,
    gamma: Vec<FnSeries>,
}

impl FrameConnection {
    pub fn flat(dim: usize, order: u32) -> Self {
        FrameConnection { dim, order, gamma: vec![LambdaSeries::zero(order); dim * dim * dim] }
    }

    /// Builds the coefficients from `f(i, j, k)`.
    pub fn from_fn(dim: usize, order: u32, mut f: impl FnMut(usize, usize, usize) -> FnSeries) -> Result<Self> {
        let mut c = Self::flat(dim, order);
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    c.set(i, j, k, f(i, j, k))?;
                }
            }
        }
        Ok(c)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.dim + j) * self.dim + k
    }

    pub fn gamma(&self, i: usize, j: usize, k: usize) -> &FnSeries {
        &self.gamma[self.index(i, j, k)]
    }

    pub fn set(&mut self, i: usize, j: usize, k: usize, value: FnSeries) -> Result<()> {
        for idx in [i, j, k] {
            if idx >= self.dim {
                return Err(Error::IndexOutOfRange { index: idx, dim: self.dim });
            }
        }
        for (_, f) in value.iter() {
            check_dim(self.dim, f.dim())?;
        }
        let at = self.index(i, j, k);
        self.gamma[at] = value.with_order(self.order);
        Ok(())
    }

    pub fn is_flat(&self) -> bool {
        self.gamma.iter().all(|g| g.is_zero())
    }

    /// The lambda-independent part, as plain functions.
    pub fn classical_part(&self) -> Vec<FunctionExpr> {
        self.gamma.iter().map(|g| g.coeff(0).cloned().unwrap_or_else(|| FunctionExpr::zero(self.dim))).collect()
    }
}

/// Coefficients `T_ij^l` (index `(i n + j) n + l`) and `R_ijk^l` (index
/// `((i n + j) n + k) n + l`).
#[derive(Clone, PartialEq, Debug)]
pub struct Coefficients {
    pub dim: usize,
    pub torsion: Vec<FnSeries>,
    pub curvature: Vec<FnSeries>,
}

impl Coefficients {
    pub fn torsion(&self, i: usize, j: usize, l: usize) -> &FnSeries {
        &self.torsion[(i * self.dim + j) * self.dim + l]
    }

    pub fn curvature(&self, i: usize, j: usize, k: usize, l: usize) -> &FnSeries {
        &self.curvature[((i * self.dim + j) * self.dim + k) * self.dim + l]
    }
}

/// Connection forms `omega_i^j`, torsion forms `Theta^l` and curvature
/// forms `Omega_k^l`.
#[derive(Clone, PartialEq, Debug)]
pub struct ConnectionForms {
    pub dim: usize,
    pub omega: Vec<FormSeries>,
    pub theta: Vec<FormSeries>,
    pub big_omega: Vec<FormSeries>,
}

impl ConnectionForms {
    pub fn omega(&self, i: usize, j: usize) -> &FormSeries {
        &self.omega[i * self.dim + j]
    }

    pub fn big_omega(&self, k: usize, l: usize) -> &FormSeries {
        &self.big_omega[k * self.dim + l]
    }
}

/// A connection together with the twist it is deformed by.
pub struct StarGeometry<'a> {
    ctx: &'a StarContext,
    conn: &'a FrameConnection,
    order: u32,
    frame: Vec<VfSeries>,
    coframe: Vec<LambdaSeries<OneForm>>,
    /// `Gamma_kj^l * e_l`, index `k n + j`.
    gamma_frame: Vec<VfSeries>,
}

impl<'a> StarGeometry<'a> {
    pub fn new(conn: &'a FrameConnection, ctx: &'a StarContext) -> Result<Self> {
        check_dim(ctx.dim(), conn.dim())?;
        let n = conn.dim();
        let order = ctx.order().min(conn.order());
        let frame: Vec<VfSeries> = (0..n).map(|i| LambdaSeries::constant(VectorField::coord(n, i), order)).collect();
        let coframe = (0..n).map(|i| LambdaSeries::constant(OneForm::coord(n, i), order)).collect();
        let mut gamma_frame = Vec::with_capacity(n * n);
        for k in 0..n {
            for j in 0..n {
                let mut acc = LambdaSeries::zero(order);
                for (l, e) in frame.iter().enumerate() {
                    acc.add_assign(&star_module_series(conn.gamma(k, j, l), e, Side::Left, ctx));
                }
                gamma_frame.push(acc);
            }
        }
        Ok(StarGeometry { ctx, conn, order, frame, coframe, gamma_frame })
    }

    pub fn dim(&self) -> usize {
        self.conn.dim()
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn context(&self) -> &StarContext {
        self.ctx
    }

    pub fn frame(&self, i: usize) -> &VfSeries {
        &self.frame[i]
    }

    fn constant<T: Linear>(&self, x: &T) -> LambdaSeries<T> {
        LambdaSeries::constant(x.clone(), self.order)
    }

    /// `<u, theta^i>_*` for every `i`, so that `u = u^i * e_i`.
    pub fn components(&self, u: &VfSeries) -> Vec<FnSeries> {
        self.coframe
            .iter()
            .map(|th| self.ctx.star_series(u, th, |a, b| crate::field::pairing(a, b).expect("same dimension")).with_order(self.order))
            .collect()
    }

    /// Reassembles `sum_i c^i * e_i`.
    pub fn from_components(&self, c: &[FnSeries]) -> VfSeries {
        let mut out = LambdaSeries::zero(self.order);
        for (ci, e) in c.iter().zip(&self.frame) {
            out.add_assign(&star_module_series(ci, e, Side::Left, self.ctx));
        }
        out
    }

    /// `nabla_{e_i} v` from the Leibniz rule
    /// `nabla_{e_i}(v^j * e_j) = L*_{e_i}(v^j) * e_j + Rbar^a(v^j) * nabla_{Rbar_a(e_i)} e_j`.
    fn nabla_frame(&self, i: usize, v: &VfSeries) -> VfSeries {
        let vt = self.components(v);
        let mut out = LambdaSeries::zero(self.order);
        for (j, vj) in vt.iter().enumerate() {
            if vj.is_zero() {
                continue;
            }
            let lie = star_lie_derivative_series(&self.frame[i], vj, self.ctx);
            out.add_assign(&star_module_series(&lie, &self.frame[j], Side::Left, self.ctx));
            let swapped = self.ctx.twisted_series(&self.ctx.twist().rinv, vj, &self.frame[i], |h, w, budget| {
                let inner = self.nabla_along_of_frame(&self.constant(w), j);
                star_module_series(&self.constant(h), &inner, Side::Left, self.ctx).truncate(budget)
            });
            out.add_assign(&swapped);
        }
        out
    }

    /// `nabla_w e_j = w^k * Gamma_kj^l * e_l`.
    fn nabla_along_of_frame(&self, w: &VfSeries, j: usize) -> VfSeries {
        let n = self.dim();
        let wt = self.components(w);
        let mut out = LambdaSeries::zero(self.order);
        for (k, wk) in wt.iter().enumerate() {
            if !wk.is_zero() {
                out.add_assign(&star_module_series(wk, &self.gamma_frame[k * n + j], Side::Left, self.ctx));
            }
        }
        out
    }

    /// `nabla*_u v = u^i * nabla_{e_i} v`.
    pub fn cov_deriv(&self, u: &VfSeries, v: &VfSeries) -> VfSeries {
        let mut out = LambdaSeries::zero(self.order);
        for (i, ui) in self.components(u).iter().enumerate() {
            if !ui.is_zero() {
                out.add_assign(&star_module_series(ui, &self.nabla_frame(i, v), Side::Left, self.ctx));
            }
        }
        out
    }

    /// `nabla*_u (v (x)_* z) = nabla*_u(v) (x)_* z + Rbar^a(v) (x)_* nabla*_{Rbar_a(u)}(z)`
    /// for vector-field factors.
    pub fn cov_deriv_tensor_product(&self, u: &VfSeries, v: &VfSeries, z: &StarTensor) -> Result<StarTensor> {
        let first = tensor_star_series(&to_tensors(&self.cov_deriv(u, v)), z, self.ctx);
        let mut err = None;
        let second =
            self.ctx.twisted_series(&self.ctx.twist().rinv, v, u, |vb, ub, budget| match self.cov_deriv_tensor(&self.constant(ub), z) {
                Ok(dz) => tensor_star_series(&self.constant(&vb.to_tensor()), &dz, self.ctx).truncate(budget),
                Err(e) => {
                    err = Some(e);
                    LambdaSeries::zero(budget)
                }
            });
        match err {
            Some(e) => Err(e),
            None => Ok(first.add(&second)),
        }
    }

    /// Covariant derivative of a contravariant tensor of rank 1 to 3, through
    /// its components in the basis `e_{i1} (x)_* ... (x)_* e_{ir}`.
    pub fn cov_deriv_tensor(&self, u: &VfSeries, t: &StarTensor) -> Result<StarTensor> {
        let rank = contravariant_rank(t)?;
        if rank == 1 {
            let v = t.map(|x| x.as_vector_field().expect("rank one"));
            return Ok(to_tensors(&self.cov_deriv(u, &v)));
        }
        let n = self.dim();
        let mut out = LambdaSeries::zero(self.order);
        for multi in multi_indices(n, rank) {
            let dual = self.dual_basis(&multi);
            let c =
                self.ctx.star_series(t, &dual, |a, b| a.pair(b).expect("ranks match")).map(|s| s.as_function().expect("full contraction"));
            if c.is_zero() {
                continue;
            }
            let basis = self.basis(&multi);
            let lie = star_lie_derivative_series(u, &c, self.ctx);
            out.add_assign(&star_module_series(&lie, &basis, Side::Left, self.ctx));
            let swapped = self.ctx.twisted_series(&self.ctx.twist().rinv, &c, u, |h, w, budget| {
                let d = self.nabla_basis(&self.constant(w), &multi);
                star_module_series(&self.constant(h), &d, Side::Left, self.ctx).truncate(budget)
            });
            out.add_assign(&swapped);
        }
        Ok(out)
    }

    /// `e_{i1} (x)_* e_{i2} (x)_* ...`.
    fn basis(&self, multi: &[usize]) -> StarTensor {
        let mut out = self.constant(&self.frame[multi[multi.len() - 1]].coeff(0).expect("frame").to_tensor());
        for &i in multi[..multi.len() - 1].iter().rev() {
            out = tensor_star_series(&self.constant(&VectorField::coord(self.dim(), i).to_tensor()), &out, self.ctx);
        }
        out
    }

    /// `theta^{ir} (x)_* ... (x)_* theta^{i1}`, dual to [`Self::basis`] under
    /// the onion pairing.
    fn dual_basis(&self, multi: &[usize]) -> StarTensor {
        let n = self.dim();
        let mut out = self.constant(&OneForm::coord(n, multi[0]).to_tensor());
        for &i in &multi[1..] {
            out = tensor_star_series(&self.constant(&OneForm::coord(n, i).to_tensor()), &out, self.ctx);
        }
        out
    }

    /// `nabla_w(e_i (x)_* E) = nabla_w(e_i) (x)_* E + Rbar^a(e_i) (x)_* nabla_{Rbar_a(w)} E`.
    fn nabla_basis(&self, w: &VfSeries, multi: &[usize]) -> StarTensor {
        let head = multi[0];
        if multi.len() == 1 {
            return to_tensors(&self.nabla_along_of_frame(w, head));
        }
        let rest = self.basis(&multi[1..]);
        let first = tensor_star_series(&to_tensors(&self.nabla_along_of_frame(w, head)), &rest, self.ctx);
        let second = self.ctx.twisted_series(&self.ctx.twist().rinv, &self.frame[head], w, |eb, wb, budget| {
            let d = self.nabla_basis(&self.constant(wb), &multi[1..]);
            tensor_star_series(&self.constant(&eb.to_tensor()), &d, self.ctx).truncate(budget)
        });
        first.add(&second)
    }

    /// `T(u, v) = nabla_u v - nabla_{Rbar^a(v)} Rbar_a(u) - [u, v]_*`.
    pub fn torsion(&self, u: &VfSeries, v: &VfSeries) -> VfSeries {
        let mut out = self.cov_deriv(u, v);
        let swapped =
            self.ctx.r_swap_series(u, v, |vb, ua, budget| self.cov_deriv(&self.constant(vb), &self.constant(ua)).truncate(budget));
        out = out.sub(&swapped);
        out.sub(&star_lie_bracket_series(u, v, self.ctx).with_order(self.order))
    }

    /// `R(u, v, z) = nabla_u nabla_v z - nabla_{Rbar^a(v)} nabla_{Rbar_a(u)} z - nabla_{[u,v]_*} z`.
    pub fn curvature(&self, u: &VfSeries, v: &VfSeries, z: &VfSeries) -> VfSeries {
        let mut out = self.cov_deriv(u, &self.cov_deriv(v, z));
        let swapped = self.ctx.r_swap_series(u, v, |vb, ua, budget| {
            self.cov_deriv(&self.constant(vb), &self.cov_deriv(&self.constant(ua), z)).truncate(budget)
        });
        out = out.sub(&swapped);
        let br = star_lie_bracket_series(u, v, self.ctx).with_order(self.order);
        out.sub(&self.cov_deriv(&br, z))
    }

    /// `T_ij^l = <T(e_i, e_j), theta^l>_*` and
    /// `R_ijk^l = <R(e_i, e_j, e_k), theta^l>_*`.
    pub fn coefficients(&self) -> Coefficients {
        let n = self.dim();
        let mut torsion = Vec::with_capacity(n * n * n);
        let mut curvature = Vec::with_capacity(n * n * n * n);
        for i in 0..n {
            for j in 0..n {
                let t = self.torsion(&self.frame[i], &self.frame[j]);
                torsion.extend(self.components(&t));
            }
        }
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let r = self.curvature(&self.frame[i], &self.frame[j], &self.frame[k]);
                    curvature.extend(self.components(&r));
                }
            }
        }
        Coefficients { dim: n, torsion, curvature }
    }

    fn coform(&self, i: usize) -> FormSeries {
        self.constant(&OneForm::coord(self.dim(), i).to_form())
    }

    /// `theta^j ^_* theta^i`.
    fn wedge_pair(&self, j: usize, i: usize) -> FormSeries {
        let n = self.dim();
        wedge_star(&OneForm::coord(n, j).to_form(), &OneForm::coord(n, i).to_form(), self.ctx).with_order(self.order)
    }

    /// `omega_i^j = theta^k * Gamma_ki^j`, `Theta^l = -1/2 theta^j ^_* theta^i * T_ij^l`,
    /// `Omega_k^l = -1/2 theta^j ^_* theta^i * R_ijk^l`.
    pub fn forms(&self, coeffs: &Coefficients) -> ConnectionForms {
        let n = self.dim();
        let half = crate::scalar::Gauss::frac(-1, 2);
        let mut omega = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = LambdaSeries::zero(self.order);
                for k in 0..n {
                    acc.add_assign(&star_module_series(self.conn.gamma(k, i, j), &self.coform(k), Side::Right, self.ctx));
                }
                omega.push(acc);
            }
        }
        let mut theta = Vec::with_capacity(n);
        for l in 0..n {
            let mut acc = LambdaSeries::zero(self.order);
            for i in 0..n {
                for j in 0..n {
                    let t = coeffs.torsion(i, j, l);
                    if !t.is_zero() {
                        acc.add_assign(&star_module_series(t, &self.wedge_pair(j, i), Side::Right, self.ctx));
                    }
                }
            }
            theta.push(acc.scale(&half));
        }
        let mut big_omega = Vec::with_capacity(n * n);
        for k in 0..n {
            for l in 0..n {
                let mut acc = LambdaSeries::zero(self.order);
                for i in 0..n {
                    for j in 0..n {
                        let r = coeffs.curvature(i, j, k, l);
                        if !r.is_zero() {
                            acc.add_assign(&star_module_series(r, &self.wedge_pair(j, i), Side::Right, self.ctx));
                        }
                    }
                }
                big_omega.push(acc.scale(&half));
            }
        }
        ConnectionForms { dim: n, omega, theta, big_omega }
    }

    /// Residuals of `Theta^l = d theta^l - theta^k ^_* omega_k^l` and
    /// `Omega_k^l = d omega_k^l - omega_k^m ^_* omega_m^l`.
    pub fn cartan_residuals(&self, forms: &ConnectionForms) -> Vec<Residual> {
        let n = self.dim();
        let mut first = Residual::new("cartan_torsion", self.order);
        let mut second = Residual::new("cartan_curvature", self.order);
        for l in 0..n {
            let mut rhs = LambdaSeries::zero(self.order);
            for k in 0..n {
                rhs = rhs.sub(&wedge_star_series(&self.coform(k), forms.omega(k, l), self.ctx));
            }
            first.absorb(&forms.theta[l].sub(&rhs));
        }
        for k in 0..n {
            for l in 0..n {
                let mut rhs = forms.omega(k, l).map(|w| w.d());
                for m in 0..n {
                    rhs = rhs.sub(&wedge_star_series(forms.omega(k, m), forms.omega(m, l), self.ctx));
                }
                second.absorb(&forms.big_omega(k, l).sub(&rhs));
            }
        }
        vec![first, second]
    }

    /// Residuals of `d Theta^i + Theta^j ^_* omega_j^i - theta^j ^_* Omega_j^i`
    /// and `d Omega_k^l + Omega_k^m ^_* omega_m^l - omega_k^m ^_* Omega_m^l`.
    pub fn bianchi_residuals(&self, forms: &ConnectionForms) -> Vec<Residual> {
        let n = self.dim();
        let mut first = Residual::new("bianchi_torsion", self.order);
        let mut second = Residual::new("bianchi_curvature", self.order);
        for i in 0..n {
            let mut acc = forms.theta[i].map(|w| w.d());
            for j in 0..n {
                acc.add_assign(&wedge_star_series(&forms.theta[j], forms.omega(j, i), self.ctx));
                acc = acc.sub(&wedge_star_series(&self.coform(j), forms.big_omega(j, i), self.ctx));
            }
            first.absorb(&acc);
        }
        for k in 0..n {
            for l in 0..n {
                let mut acc = forms.big_omega(k, l).map(|w| w.d());
                for m in 0..n {
                    acc.add_assign(&wedge_star_series(forms.big_omega(k, m), forms.omega(m, l), self.ctx));
                    acc = acc.sub(&wedge_star_series(forms.omega(k, m), forms.big_omega(m, l), self.ctx));
                }
                second.absorb(&acc);
            }
        }
        vec![first, second]
    }

    /// `T(f * u, v) - f * T(u, v)` and `T(u, f * v) - Rbar^a(f) * T(Rbar_a(u), v)`.
    pub fn torsion_linearity(&self, f: &FunctionExpr, u: &VectorField, v: &VectorField) -> Vec<Residual> {
        let (fs, us, vs) = (self.constant(f), self.constant(u), self.constant(v));
        let fu = star_module_series(&fs, &us, Side::Left, self.ctx);
        let fv = star_module_series(&fs, &vs, Side::Left, self.ctx);
        let left = self.torsion(&fu, &vs).sub(&star_module_series(&fs, &self.torsion(&us, &vs), Side::Left, self.ctx));
        let swapped = self.ctx.r_swap(u, f, |fb, ua, budget| {
            let t = self.torsion(&self.constant(ua), &vs);
            star_module_series(&self.constant(fb), &t, Side::Left, self.ctx).truncate(budget)
        });
        let right = self.torsion(&us, &fv).sub(&swapped.with_order(self.order));
        vec![Residual::of("torsion_left_linear", &left), Residual::of("torsion_right_linear", &right)]
    }

    /// Left linearity of the curvature in its first two arguments.
    pub fn curvature_linearity(&self, f: &FunctionExpr, u: &VectorField, v: &VectorField, z: &VectorField) -> Vec<Residual> {
        let (fs, us, vs, zs) = (self.constant(f), self.constant(u), self.constant(v), self.constant(z));
        let fu = star_module_series(&fs, &us, Side::Left, self.ctx);
        let fv = star_module_series(&fs, &vs, Side::Left, self.ctx);
        let left = self.curvature(&fu, &vs, &zs).sub(&star_module_series(&fs, &self.curvature(&us, &vs, &zs), Side::Left, self.ctx));
        let swapped = self.ctx.r_swap(u, f, |fb, ua, budget| {
            let r = self.curvature(&self.constant(ua), &vs, &zs);
            star_module_series(&self.constant(fb), &r, Side::Left, self.ctx).truncate(budget)
        });
        let right = self.curvature(&us, &fv, &zs).sub(&swapped.with_order(self.order));
        vec![Residual::of("curvature_left_linear", &left), Residual::of("curvature_right_linear", &right)]
    }

    /// `T(u, v) + T(Rbar^a(v), Rbar_a(u))` and the curvature analogue.
    pub fn antisymmetry(&self, u: &VectorField, v: &VectorField, z: &VectorField) -> Vec<Residual> {
        let (us, vs, zs) = (self.constant(u), self.constant(v), self.constant(z));
        let t = self
            .torsion(&us, &vs)
            .add(&self.ctx.r_swap(u, v, |vb, ua, budget| self.torsion(&self.constant(vb), &self.constant(ua)).truncate(budget)));
        let r = self
            .curvature(&us, &vs, &zs)
            .add(&self.ctx.r_swap(u, v, |vb, ua, budget| self.curvature(&self.constant(vb), &self.constant(ua), &zs).truncate(budget)));
        vec![Residual::of("torsion_antisymmetry", &t), Residual::of("curvature_antisymmetry", &r)]
    }

    /// `nabla_{h * u} v - h * nabla_u v` and
    /// `nabla_u(h * v) - L*_u(h) * v - Rbar^a(h) * nabla_{Rbar_a(u)} v`.
    pub fn connection_axioms(&self, h: &FunctionExpr, u: &VectorField, v: &VectorField) -> Vec<Residual> {
        let (hs, us, vs) = (self.constant(h), self.constant(u), self.constant(v));
        let hu = star_module_series(&hs, &us, Side::Left, self.ctx);
        let hv = star_module_series(&hs, &vs, Side::Left, self.ctx);
        let first = self.cov_deriv(&hu, &vs).sub(&star_module_series(&hs, &self.cov_deriv(&us, &vs), Side::Left, self.ctx));
        let lie = star_lie_derivative_series(&us, &hs, self.ctx);
        let mut rhs = star_module_series(&lie, &vs, Side::Left, self.ctx);
        rhs.add_assign(&self.ctx.r_swap(u, h, |hb, ua, budget| {
            let d = self.cov_deriv(&self.constant(ua), &vs);
            star_module_series(&self.constant(hb), &d, Side::Left, self.ctx).truncate(budget)
        }));
        let second = self.cov_deriv(&us, &hv).sub(&rhs.with_order(self.order));
        vec![Residual::of("connection_function_linear", &first), Residual::of("connection_leibniz", &second)]
    }

    /// Torsion as a tensor through the two coefficient displays,
    /// `theta^j (x)_* theta^i * T_ij^l` and `1/2 theta^j ^_* theta^i * T_ij^l`,
    /// compared per output index `l`.
    pub fn torsion_display_residual(&self, coeffs: &Coefficients) -> Residual {
        let n = self.dim();
        let mut res = Residual::new("torsion_displays", self.order);
        let half = crate::scalar::Gauss::frac(1, 2);
        for l in 0..n {
            let mut tensor_form = LambdaSeries::zero(self.order);
            let mut wedge_form = LambdaSeries::zero(self.order);
            for i in 0..n {
                for j in 0..n {
                    let t = coeffs.torsion(i, j, l);
                    if t.is_zero() {
                        continue;
                    }
                    let tp = tensor_star_series(
                        &self.constant(&OneForm::coord(n, j).to_tensor()),
                        &self.constant(&OneForm::coord(n, i).to_tensor()),
                        self.ctx,
                    );
                    tensor_form.add_assign(&star_module_series(t, &tp, Side::Right, self.ctx));
                    let wp = self.wedge_pair(j, i).map(|w| w.to_tensor());
                    wedge_form.add_assign(&star_module_series(t, &wp, Side::Right, self.ctx).scale(&half));
                }
            }
            res.absorb(&tensor_form.sub(&wedge_form));
        }
        res
    }
}

fn to_tensors(v: &VfSeries) -> StarTensor {
    v.map(|x| x.to_tensor())
}

fn contravariant_rank(t: &StarTensor) -> Result<usize> {
    let mut rank = None;
    for (_, x) in t.iter() {
        if x.slots().iter().any(|s| *s != Slot::Vector) {
            return Err(Error::RankMismatch("covariant slots are not supported".into()));
        }
        match rank {
            None => rank = Some(x.rank()),
            Some(r) if r != x.rank() => return Err(Error::RankMismatch("mixed ranks in one series".into())),
            _ => {}
        }
    }
    match rank {
        Some(r @ 1..=3) => Ok(r),
        Some(r) => Err(Error::RankMismatch(format!("rank {r} is not supported"))),
        None => Err(Error::RankMismatch("zero tensor has no rank".into())),
    }
}

fn multi_indices(n: usize, rank: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|p| {
                (0..n).map(move |i| {
                    let mut q = p.clone();
                    q.push(i);
                    q
                })
            })
            .collect();
    }
    out
}

/// Undeformed formulas with ordinary products, used as an independent
/// reference. `gamma` is indexed `(i n + j) n + k`.
pub mod classical {
    use crate::field::VectorField;
    use crate::function::FunctionExpr;

    /// `(nabla_u v)^l = u^i (d_i v^l + v^j Gamma_ij^l)`.
    pub fn cov_deriv(gamma: &[FunctionExpr], u: &VectorField, v: &VectorField) -> VectorField {
        let n = u.dim();
        let comps = (0..n)
            .map(|l| {
                let mut acc = FunctionExpr::zero(n);
                for i in 0..n {
                    let mut inner = v.comp(l).partial(i);
                    for j in 0..n {
                        inner = inner.add(&v.comp(j).mul(&gamma[(i * n + j) * n + l]));
                    }
                    acc = acc.add(&u.comp(i).mul(&inner));
                }
                acc
            })
            .collect();
        VectorField::from_comps(comps).expect("dimension")
    }

    /// `T_ij^l = Gamma_ij^l - Gamma_ji^l`.
    pub fn torsion_coeffs(gamma: &[FunctionExpr], n: usize) -> Vec<FunctionExpr> {
        let mut out = Vec::with_capacity(n * n * n);
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    out.push(gamma[(i * n + j) * n + l].sub(&gamma[(j * n + i) * n + l]));
                }
            }
        }
        out
    }

    /// `R_ijk^l = d_i Gamma_jk^l - d_j Gamma_ik^l + Gamma_jk^m Gamma_im^l - Gamma_ik^m Gamma_jm^l`.
    pub fn curvature_coeffs(gamma: &[FunctionExpr], n: usize) -> Vec<FunctionExpr> {
        let g = |a: usize, b: usize, c: usize| &gamma[(a * n + b) * n + c];
        let mut out = Vec::with_capacity(n * n * n * n);
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let mut r = g(j, k, l).partial(i).sub(&g(i, k, l).partial(j));
                        for m in 0..n {
                            r = r.add(&g(j, k, m).mul(g(i, m, l))).sub(&g(i, k, m).mul(g(j, m, l)));
                        }
                        out.push(r);
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hopf::TwistSpec;
    use crate::scalar::{rat, Gauss};

    fn x(i: usize) -> FunctionExpr {
        FunctionExpr::var(2, i).unwrap()
    }

    fn sample_connection(order: u32) -> FrameConnection {
        FrameConnection::from_fn(2, order, |i, j, k| {
            let base = match (i + 2 * j + 3 * k) % 4 {
                0 => x(0),
                1 => x(1).pow(2),
                2 => FunctionExpr::constant(2, Gauss::int(2)),
                _ => x(0).mul(&x(1)),
            };
            let mut s = LambdaSeries::constant(base, order);
            if (i + j + k) % 2 == 0 {
                s.add_term(1, &x(1));
            }
            s
        })
        .unwrap()
    }

    #[test]
    fn frame_derivative_reproduces_coefficients() {
        let ctx = StarContext::new(&TwistSpec::moyal_plane(rat(1, 1)), 2).unwrap();
        let conn = sample_connection(2);
        let geo = StarGeometry::new(&conn, &ctx).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let d = geo.cov_deriv(geo.frame(i), geo.frame(j));
                let mut expected = LambdaSeries::zero(2);
                for k in 0..2 {
                    expected.add_assign(&star_module_series(conn.gamma(i, j, k), geo.frame(k), Side::Left, &ctx));
                }
                assert_eq!(d, expected);
            }
        }
    }

    #[test]
    fn components_reassemble() {
        let ctx = StarContext::new(&TwistSpec::jordanian_default(2), 2).unwrap();
        let conn = FrameConnection::flat(2, 2);
        let geo = StarGeometry::new(&conn, &ctx).unwrap();
        let u = LambdaSeries::constant(VectorField::from_comps(vec![x(0).mul(&x(1)), x(0).pow(2)]).unwrap(), 2);
        assert_eq!(geo.from_components(&geo.components(&u)), u);
    }

    #[test]
    fn flat_commutative_geometry_is_trivial() {
        let ctx = StarContext::new(&TwistSpec::identity(2), 2).unwrap();
        let conn = FrameConnection::flat(2, 2);
        let geo = StarGeometry::new(&conn, &ctx).unwrap();
        let c = geo.coefficients();
        assert!(c.torsion.iter().chain(&c.curvature).all(|s| s.is_zero()));
        let forms = geo.forms(&c);
        assert!(geo.cartan_residuals(&forms).iter().all(|r| r.is_zero()));
    }

    #[test]
    fn commutative_limit_matches_classical_formulas() {
        let ctx = StarContext::new(&TwistSpec::identity(2), 1).unwrap();
        let conn = sample_connection(1);
        let geo = StarGeometry::new(&conn, &ctx).unwrap();
        let c = geo.coefficients();
        let g0 = conn.classical_part();
        let t = classical::torsion_coeffs(&g0, 2);
        let r = classical::curvature_coeffs(&g0, 2);
        for (a, b) in c.torsion.iter().zip(&t) {
            assert_eq!(a.coeff(0).cloned().unwrap_or_else(|| FunctionExpr::zero(2)), *b);
        }
        for (a, b) in c.curvature.iter().zip(&r) {
            assert_eq!(a.coeff(0).cloned().unwrap_or_else(|| FunctionExpr::zero(2)), *b);
        }
        let u = VectorField::from_comps(vec![x(1), x(0).pow(2)]).unwrap();
        let v = VectorField::from_comps(vec![x(0).mul(&x(1)), FunctionExpr::one(2)]).unwrap();
        let d = geo.cov_deriv(&LambdaSeries::constant(u.clone(), 1), &LambdaSeries::constant(v.clone(), 1));
        assert_eq!(d.coeff(0), Some(&classical::cov_deriv(&g0, &u, &v)));
    }

    #[test]
    fn moyal_identities() {
        let ctx = StarContext::new(&TwistSpec::moyal_plane(rat(1, 1)), 2).unwrap();
        let conn = sample_connection(2);
        let geo = StarGeometry::new(&conn, &ctx).unwrap();
        let c = geo.coefficients();
        let forms = geo.forms(&c);
        let mut all = geo.cartan_residuals(&forms);
        all.extend(geo.bianchi_residuals(&forms));
        all.push(geo.torsion_display_residual(&c));
        let u = VectorField::from_comps(vec![x(1), x(0)]).unwrap();
        let v = VectorField::coord(2, 0).mul_fn(&x(0));
        let z = VectorField::coord(2, 1);
        let f = x(0).add(&x(1).pow(2));
        let checks = [
            geo.torsion_linearity(&f, &u, &v),
            geo.curvature_linearity(&f, &u, &v, &z),
            geo.antisymmetry(&u, &v, &z),
            geo.connection_axioms(&f, &u, &v),
        ];
        all.extend(checks.into_iter().flatten());
        for r in &all {
            eprintln!("{r:?}");
        }
        assert!(all.iter().all(|r| r.is_zero()));
    }

    fn two_routes(conn: &FrameConnection, ctx: &StarContext) -> StarTensor {
        let geo = StarGeometry::new(conn, ctx).unwrap();
        let u = LambdaSeries::constant(VectorField::coord(2, 1).mul_fn(&x(0)), 2);
        let v = LambdaSeries::constant(VectorField::coord(2, 0).mul_fn(&x(1)), 2);
        let z = LambdaSeries::constant(VectorField::from_comps(vec![x(0), x(1)]).unwrap().to_tensor(), 2);
        let vz = tensor_star_series(&to_tensors(&v), &z, ctx);
        let direct = geo.cov_deriv_tensor(&u, &vz).unwrap();
        let leibniz = geo.cov_deriv_tensor_product(&u, &v, &z).unwrap();
        direct.sub(&leibniz)
    }

    #[test]
    fn tensor_derivative_two_routes_for_invariant_connection() {
        let ctx = StarContext::new(&TwistSpec::moyal_plane(rat(1, 1)), 2).unwrap();
        let conn = FrameConnection::from_fn(2, 2, |i, j, k| {
            LambdaSeries::constant(FunctionExpr::constant(2, Gauss::int((i + 2 * j + 3 * k) as i64 % 3 - 1)), 2)
        })
        .unwrap();
        assert!(two_routes(&conn, &ctx).is_zero());
        let classical = StarContext::new(&TwistSpec::identity(2), 2).unwrap();
        assert!(two_routes(&sample_connection(2), &classical).is_zero());
        let geo = StarGeometry::new(&conn, &ctx).unwrap();
        let u = LambdaSeries::constant(VectorField::coord(2, 0), 2);
        assert!(geo.cov_deriv_tensor(&u, &LambdaSeries::constant(OneForm::coord(2, 0).to_tensor(), 2)).is_err());
    }

    #[test]
    fn tensor_leibniz_depends_on_decomposition_without_invariance() {
        let ctx = StarContext::new(&TwistSpec::moyal_plane(rat(1, 1)), 2).unwrap();
        let residual = two_routes(&sample_connection(2), &ctx);
        assert!(residual.coeff(0).is_none());
        assert!(residual.coeff(1).is_some());
    }
}
