//! Finite-mode field algebra: classical mode polynomials in `a(k)`,
//! `a*(k)`, normal-ordered operators in `a(k)`, `a^+(k)`, their
//! momentum-graded star products and brackets, and quantization.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::marker::PhantomData;

use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::residual::Residual;
use crate::scalar::{binomial, factorial, rat, Gauss, Phase, PhaseSym, Rat, Scalar};

pub type Momentum = SmallVec<[i64; 3]>;

/// Annihilation `a(k)` or creation `a*(k)` / `a^+(k)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum ModeKind {
    Annihilation,
    Creation,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct ModeSymbol {
    pub kind: ModeKind,
    pub k: Momentum,
}

impl ModeSymbol {
    pub fn a(k: &[i64]) -> Self {
        ModeSymbol { kind: ModeKind::Annihilation, k: k.into() }
    }

    pub fn a_dag(k: &[i64]) -> Self {
        ModeSymbol { kind: ModeKind::Creation, k: k.into() }
    }
}

/// Creation factors (sorted) followed by annihilation factors (sorted).
/// For classical polynomials the order is just a canonical form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct ModeMonomial {
    create: Vec<Momentum>,
    annihilate: Vec<Momentum>,
}

impl ModeMonomial {
    pub fn new(mut create: Vec<Momentum>, mut annihilate: Vec<Momentum>) -> Self {
        create.sort();
        annihilate.sort();
        ModeMonomial { create, annihilate }
    }

    pub fn creations(&self) -> &[Momentum] {
        &self.create
    }

    pub fn annihilations(&self) -> &[Momentum] {
        &self.annihilate
    }

    pub fn degree(&self) -> usize {
        self.create.len() + self.annihilate.len()
    }

    /// `sum k` over annihilators minus `sum k` over creators.
    pub fn grade(&self, d: usize) -> Momentum {
        let mut p: Momentum = SmallVec::from_elem(0, d);
        for k in &self.annihilate {
            for (i, c) in k.iter().enumerate() {
                p[i] += c;
            }
        }
        for k in &self.create {
            for (i, c) in k.iter().enumerate() {
                p[i] -= c;
            }
        }
        p
    }

    fn concat(&self, o: &Self) -> Self {
        let mut create = self.create.clone();
        create.extend(o.create.iter().cloned());
        let mut annihilate = self.annihilate.clone();
        annihilate.extend(o.annihilate.iter().cloned());
        Self::new(create, annihilate)
    }

    fn count(list: &[Momentum], k: &Momentum) -> usize {
        list.iter().filter(|x| *x == k).count()
    }

    fn remove_one(list: &[Momentum], k: &Momentum) -> Vec<Momentum> {
        let mut out = list.to_vec();
        let pos = out.iter().position(|x| x == k).expect("factor present");
        out.remove(pos);
        out
    }

    /// `d/da(k)` (or `d/da*(k)`) as multiplicity and reduced monomial.
    fn derivative(&self, kind: ModeKind, k: &Momentum) -> Option<(usize, ModeMonomial)> {
        let list = match kind {
            ModeKind::Annihilation => &self.annihilate,
            ModeKind::Creation => &self.create,
        };
        let m = Self::count(list, k);
        if m == 0 {
            return None;
        }
        let reduced = match kind {
            ModeKind::Annihilation => ModeMonomial { create: self.create.clone(), annihilate: Self::remove_one(list, k) },
            ModeKind::Creation => ModeMonomial { create: Self::remove_one(list, k), annihilate: self.annihilate.clone() },
        };
        Some((m, reduced))
    }

    fn distinct(list: &[Momentum]) -> Vec<Momentum> {
        let mut out = list.to_vec();
        out.dedup();
        out
    }
}

impl fmt::Display for ModeMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let k = |m: &Momentum| m.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
        let mut parts: Vec<String> = self.create.iter().map(|m| format!("a+({})", k(m))).collect();
        parts.extend(self.annihilate.iter().map(|m| format!("a({})", k(m))));
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

/// Product rule on monomials.
pub trait ModeProduct: Clone + fmt::Debug + PartialEq + Eq + Default {
    fn product(a: &ModeMonomial, b: &ModeMonomial) -> Vec<(ModeMonomial, Rat)>;
}

/// Commuting mode symbols.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Classical;

/// Operators with `[a(k), a^+(k')] = delta_{kk'}`, kept normal ordered.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Quantum;

impl ModeProduct for Classical {
    fn product(a: &ModeMonomial, b: &ModeMonomial) -> Vec<(ModeMonomial, Rat)> {
        vec![(a.concat(b), Rat::one())]
    }
}

impl ModeProduct for Quantum {
    /// Moves the annihilators of `a` past the creators of `b` mode by mode:
    /// `a^m (a^+)^n = sum_j j! C(m,j) C(n,j) (a^+)^{n-j} a^{m-j}`.
    fn product(a: &ModeMonomial, b: &ModeMonomial) -> Vec<(ModeMonomial, Rat)> {
        let mut partial: Vec<(Vec<Momentum>, Vec<Momentum>, Rat)> = vec![(a.annihilate.clone(), b.create.clone(), Rat::one())];
        for k in ModeMonomial::distinct(&a.annihilate) {
            let mut next = Vec::new();
            for (ann, cre, c) in &partial {
                let m = ModeMonomial::count(ann, &k) as u32;
                let n = ModeMonomial::count(cre, &k) as u32;
                for j in 0..=m.min(n) {
                    let coeff = c * factorial(j) * binomial(m, j) * binomial(n, j);
                    let (mut ann2, mut cre2) = (ann.clone(), cre.clone());
                    for _ in 0..j {
                        ann2 = ModeMonomial::remove_one(&ann2, &k);
                        cre2 = ModeMonomial::remove_one(&cre2, &k);
                    }
                    next.push((ann2, cre2, coeff));
                }
            }
            partial = next;
        }
        partial
            .into_iter()
            .map(|(ann, cre, c)| {
                let mut create = a.create.clone();
                create.extend(cre);
                let mut annihilate = ann;
                annihilate.extend(b.annihilate.iter().cloned());
                (ModeMonomial::new(create, annihilate), c)
            })
            .collect()
    }
}

/// The noncommutativity matrix: formal symbols or rational values.
#[derive(Clone, Debug, PartialEq)]
pub enum ThetaParam {
    Symbolic,
    Numeric(Vec<Vec<Rat>>),
}

/// A finite momentum set with per-mode energies.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeLattice {
    d: usize,
    momenta: Vec<Momentum>,
    theta: ThetaParam,
    energies: Vec<Rat>,
}

impl ModeLattice {
    pub fn new(d: usize, momenta: Vec<Vec<i64>>, theta: ThetaParam, energies: Vec<Rat>) -> Result<Self> {
        if momenta.iter().any(|k| k.len() != d) {
            return Err(Error::InvalidLattice(format!("every momentum needs {d} components")));
        }
        let momenta: Vec<Momentum> = momenta.into_iter().map(Momentum::from_vec).collect();
        for (i, k) in momenta.iter().enumerate() {
            if momenta[..i].contains(k) {
                return Err(Error::InvalidLattice(format!("momentum {k:?} listed twice")));
            }
        }
        if energies.len() != momenta.len() || energies.iter().any(|e| !e.is_positive()) {
            return Err(Error::InvalidLattice("one positive energy per momentum is required".into()));
        }
        if let ThetaParam::Numeric(t) = &theta {
            if t.len() != d || t.iter().any(|r| r.len() != d) {
                return Err(Error::InvalidLattice(format!("theta must be {d}x{d}")));
            }
            for i in 0..d {
                for j in 0..d {
                    if t[i][j] != -t[j][i].clone() {
                        return Err(Error::InvalidLattice("theta must be antisymmetric".into()));
                    }
                }
            }
        }
        Ok(ModeLattice { d, momenta, theta, energies })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn momenta(&self) -> &[Momentum] {
        &self.momenta
    }

    pub fn theta(&self) -> &ThetaParam {
        &self.theta
    }

    pub fn energy(&self, k: &[i64]) -> Option<&Rat> {
        self.momenta.iter().position(|m| m.as_slice() == k).map(|i| &self.energies[i])
    }

    pub fn is_negation_closed(&self) -> bool {
        self.momenta.iter().all(|k| {
            let neg: Momentum = k.iter().map(|c| -c).collect();
            self.momenta.contains(&neg)
        })
    }

    /// The same lattice with `theta = 0`.
    pub fn commutative(&self) -> Self {
        ModeLattice { theta: ThetaParam::Numeric(vec![vec![Rat::zero(); self.d]; self.d]), ..self.clone() }
    }

    /// `exp(i * factor * theta(p, q))` with `theta(p, q) = theta^{ij} p_i q_j`.
    pub fn theta_phase(&self, p: &[i64], q: &[i64], factor: &Rat) -> Phase {
        let mut out = Phase::identity();
        for i in 0..self.d {
            for j in i + 1..self.d {
                let w = Rat::from_integer((p[i] * q[j] - p[j] * q[i]).into());
                match &self.theta {
                    ThetaParam::Symbolic => out.add_term(PhaseSym::Theta(i as u8, j as u8), &(factor * w)),
                    ThetaParam::Numeric(t) => out.add_term(PhaseSym::Unit, &(factor * &t[i][j] * w)),
                }
            }
        }
        out
    }
}

type Key = (ModeMonomial, i32, Phase);

/// Linear combination of mode monomials with coefficients
/// `Gauss * hbar^k * phase`.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ModeExpr<P> {
    terms: BTreeMap<Key, Gauss>,
    _product: PhantomData<P>,
}

pub type ClassicalModePoly = ModeExpr<Classical>;
pub type QuantumElement = ModeExpr<Quantum>;

impl<P: ModeProduct> ModeExpr<P> {
    pub fn zero() -> Self {
        ModeExpr { terms: BTreeMap::new(), _product: PhantomData }
    }

    pub fn monomial(m: ModeMonomial, c: Scalar) -> Self {
        let mut out = Self::zero();
        out.add_term(m, c);
        out
    }

    pub fn constant(c: Scalar) -> Self {
        Self::monomial(ModeMonomial::default(), c)
    }

    pub fn one() -> Self {
        Self::constant(Scalar::one())
    }

    pub fn a(k: &[i64]) -> Self {
        Self::monomial(ModeMonomial::new(vec![], vec![k.into()]), Scalar::one())
    }

    /// `a*(k)` classically, `a^+(k)` as an operator.
    pub fn a_dag(k: &[i64]) -> Self {
        Self::monomial(ModeMonomial::new(vec![k.into()], vec![]), Scalar::one())
    }

    pub fn symbol(s: &ModeSymbol) -> Self {
        match s.kind {
            ModeKind::Annihilation => Self::a(&s.k),
            ModeKind::Creation => Self::a_dag(&s.k),
        }
    }

    pub fn add_term(&mut self, m: ModeMonomial, c: Scalar) {
        if c.value.is_zero() {
            return;
        }
        let key = (m, c.hbar_power, c.phase);
        let e = self.terms.entry(key.clone()).or_insert_with(Gauss::zero);
        *e += &c.value;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ModeMonomial, Scalar)> {
        self.terms.iter().map(|((m, h, p), c)| (m, Scalar::new(c.clone(), *h, p.clone())))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in o.terms() {
            out.add_term(m.clone(), c);
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.scale(&Scalar::from_gauss(Gauss::int(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        let mut out = Self::zero();
        for (m, c) in self.terms() {
            out.add_term(m.clone(), &c * s);
        }
        out
    }

    /// Undeformed product: commutative for classical polynomials, operator
    /// product followed by normal ordering for quantum elements.
    pub fn mul(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in self.terms() {
            for (m2, c2) in o.terms() {
                let c = &c1 * &c2;
                for (m, r) in P::product(m1, m2) {
                    out.add_term(m, &c * &Scalar::from_gauss(Gauss::real(r)));
                }
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Splits into single-term pieces; each piece is homogeneous.
    fn pieces(&self) -> impl Iterator<Item = Self> + '_ {
        self.terms().map(|(m, c)| Self::monomial(m.clone(), c))
    }

    fn grade_of(&self, d: usize) -> Momentum {
        self.terms.keys().next().map(|(m, _, _)| m.grade(d)).unwrap_or_else(|| SmallVec::from_elem(0, d))
    }

    /// `sum exp(i * factor * theta(p, q)) op(F_p, G_q)` over homogeneous
    /// pieces `F_p` of `self` and `G_q` of `o`.
    pub fn graded_bilinear<Q: ModeProduct>(
        &self,
        o: &Self,
        lat: &ModeLattice,
        factor: &Rat,
        mut op: impl FnMut(&Self, &Self) -> ModeExpr<Q>,
    ) -> ModeExpr<Q> {
        let mut out = ModeExpr::zero();
        let others: Vec<(Self, Momentum)> = o
            .pieces()
            .map(|g| {
                let q = g.grade_of(lat.dim());
                (g, q)
            })
            .collect();
        for f in self.pieces() {
            let p = f.grade_of(lat.dim());
            for (g, q) in &others {
                let phase = Scalar::new(Gauss::one(), 0, lat.theta_phase(&p, q, factor));
                out = out.add(&op(&f, g).scale(&phase));
            }
        }
        out
    }

    /// `F * G = exp(-(i/2) theta(p, q)) F G` on homogeneous pieces.
    pub fn star(&self, o: &Self, lat: &ModeLattice) -> Self {
        self.graded_bilinear(o, lat, &rat(-1, 2), |f, g| f.mul(g))
    }

    /// `sum op(Rbar^a(G), Rbar_a(F))` for `F = self`; the R-matrix acts on
    /// homogeneous `(G_q, F_p)` by `exp(i theta(q, p))`.
    pub fn r_swap(&self, g: &Self, lat: &ModeLattice, op: impl FnMut(&Self, &Self) -> Self) -> Self {
        g.graded_bilinear(self, lat, &Rat::one(), op)
    }

    /// Sets every theta symbol to zero.
    pub fn drop_theta(&self) -> Self {
        let mut out = Self::zero();
        for (m, c) in self.terms() {
            out.add_term(m.clone(), Scalar::new(c.value, c.hbar_power, c.phase.drop_theta()));
        }
        out
    }

    /// `2 * (power of hbar) - (number of mode factors)`: each mode symbol
    /// carries weight `hbar^{-1/2}` in the canonical normalization.
    pub fn effective_orders(&self) -> Vec<i32> {
        let mut v: Vec<i32> = self.terms.keys().map(|(m, h, _)| 2 * h - m.degree() as i32).collect();
        v.sort();
        v.dedup();
        v
    }

    /// The terms whose effective order equals `order`.
    pub fn part_at(&self, order: i32) -> Self {
        let mut out = Self::zero();
        for (m, c) in self.terms() {
            if 2 * c.hbar_power - m.degree() as i32 == order {
                out.add_term(m.clone(), c);
            }
        }
        out
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(|(m, _, _)| m.degree()).max().unwrap_or(0)
    }

    /// Reinterprets the coefficients over another product rule.
    fn relabel<Q: ModeProduct>(&self) -> ModeExpr<Q> {
        ModeExpr { terms: self.terms.clone(), _product: PhantomData }
    }
}

impl<P> fmt::Display for ModeExpr<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> =
            self.terms.iter().map(|((m, h, p), c)| format!("{} {}", Scalar::new(c.clone(), *h, p.clone()), m)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl ClassicalModePoly {
    /// `{F, G} = sum_k (-i/hbar)(dF/da(k) dG/da*(k) - dF/da*(k) dG/da(k))`.
    pub fn poisson(&self, o: &Self) -> Self {
        let mut out = Self::zero();
        for (m1, c1) in self.terms() {
            for (m2, c2) in o.terms() {
                let c = &c1 * &c2;
                for (first, second, sign) in
                    [(ModeKind::Annihilation, ModeKind::Creation, -1), (ModeKind::Creation, ModeKind::Annihilation, 1)]
                {
                    let list = match first {
                        ModeKind::Annihilation => &m1.annihilate,
                        ModeKind::Creation => &m1.create,
                    };
                    for k in ModeMonomial::distinct(list) {
                        let (Some((a, r1)), Some((b, r2))) = (m1.derivative(first, &k), m2.derivative(second, &k)) else {
                            continue;
                        };
                        let s = Scalar::new(Gauss::imag(Rat::from_integer(((a * b) as i64 * sign).into())), -1, Phase::identity());
                        out.add_term(r1.concat(&r2), &c * &s);
                    }
                }
            }
        }
        out
    }

    /// `{F, G}_* = {fbar^a(F), fbar_a(G)}`.
    pub fn poisson_star(&self, o: &Self, lat: &ModeLattice) -> Self {
        self.graded_bilinear(o, lat, &rat(-1, 2), |f, g| f.poisson(g))
    }

    /// `{F, G}_* + {Rbar^a(G), Rbar_a(F)}_*`.
    pub fn antisymmetry_residual(&self, o: &Self, lat: &ModeLattice) -> Self {
        self.poisson_star(o, lat).add(&self.r_swap(o, lat, |g, f| g.poisson_star(f, lat)))
    }

    /// `{F, G * H}_* - {F, G}_* * H - Rbar^a(G) * {Rbar_a(F), H}_*`.
    pub fn leibniz_residual(&self, g: &Self, h: &Self, lat: &ModeLattice) -> Self {
        let lhs = self.poisson_star(&g.star(h, lat), lat);
        let first = self.poisson_star(g, lat).star(h, lat);
        let second = self.r_swap(g, lat, |gb, fa| gb.star(&fa.poisson_star(h, lat), lat));
        lhs.sub(&first).sub(&second)
    }

    /// `{F, {G, H}_*}_* - {{F, G}_*, H}_* - {Rbar^a(G), {Rbar_a(F), H}_*}_*`.
    pub fn jacobi_residual(&self, g: &Self, h: &Self, lat: &ModeLattice) -> Self {
        let lhs = self.poisson_star(&g.poisson_star(h, lat), lat);
        let first = self.poisson_star(g, lat).poisson_star(h, lat);
        let second = self.r_swap(g, lat, |gb, fa| gb.poisson_star(&fa.poisson_star(h, lat), lat));
        lhs.sub(&first).sub(&second)
    }
}

impl QuantumElement {
    /// Normal orders an arbitrary operator word by repeated application of
    /// `a(k) a^+(k') -> a^+(k') a(k) + delta_{kk'}`.
    pub fn normal_order(word: &[ModeSymbol]) -> Self {
        let mut memo = HashMap::new();
        normal_order_word(word, &mut memo)
    }

    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    /// `[F, G]_* = [fbar^a(F), fbar_a(G)]`.
    pub fn star_commutator(&self, o: &Self, lat: &ModeLattice) -> Self {
        self.graded_bilinear(o, lat, &rat(-1, 2), |f, g| f.commutator(g))
    }

    /// `F * G - Rbar^a(G) * Rbar_a(F)`.
    pub fn star_commutator_r(&self, o: &Self, lat: &ModeLattice) -> Self {
        self.star(o, lat).sub(&self.r_swap(o, lat, |g, f| g.star(f, lat)))
    }

    /// `[F, G]_* + [Rbar^a(G), Rbar_a(F)]_*`.
    pub fn antisymmetry_residual(&self, o: &Self, lat: &ModeLattice) -> Self {
        self.star_commutator(o, lat).add(&self.r_swap(o, lat, |g, f| g.star_commutator(f, lat)))
    }

    /// `[F, G * H]_* - [F, G]_* * H - Rbar^a(G) * [Rbar_a(F), H]_*`.
    pub fn leibniz_residual(&self, g: &Self, h: &Self, lat: &ModeLattice) -> Self {
        let lhs = self.star_commutator(&g.star(h, lat), lat);
        let first = self.star_commutator(g, lat).star(h, lat);
        let second = self.r_swap(g, lat, |gb, fa| gb.star(&fa.star_commutator(h, lat), lat));
        lhs.sub(&first).sub(&second)
    }

    /// `[F, [G, H]_*]_* - [[F, G]_*, H]_* - [Rbar^a(G), [Rbar_a(F), H]_*]_*`.
    pub fn jacobi_residual(&self, g: &Self, h: &Self, lat: &ModeLattice) -> Self {
        let lhs = self.star_commutator(&g.star_commutator(h, lat), lat);
        let first = self.star_commutator(g, lat).star_commutator(h, lat);
        let second = self.r_swap(g, lat, |gb, fa| gb.star_commutator(&fa.star_commutator(h, lat), lat));
        lhs.sub(&first).sub(&second)
    }
}

fn normal_order_word(word: &[ModeSymbol], memo: &mut HashMap<Vec<ModeSymbol>, QuantumElement>) -> QuantumElement {
    if let Some(v) = memo.get(word) {
        return v.clone();
    }
    let swap = word.windows(2).position(|w| w[0].kind == ModeKind::Annihilation && w[1].kind == ModeKind::Creation);
    let out = match swap {
        None => {
            let create = word.iter().filter(|s| s.kind == ModeKind::Creation).map(|s| s.k.clone()).collect();
            let annihilate = word.iter().filter(|s| s.kind == ModeKind::Annihilation).map(|s| s.k.clone()).collect();
            QuantumElement::monomial(ModeMonomial::new(create, annihilate), Scalar::one())
        }
        Some(i) => {
            let mut swapped = word.to_vec();
            swapped.swap(i, i + 1);
            let mut out = normal_order_word(&swapped, memo);
            if word[i].k == word[i + 1].k {
                let mut contracted = word[..i].to_vec();
                contracted.extend_from_slice(&word[i + 2..]);
                out = out.add(&normal_order_word(&contracted, memo));
            }
            out
        }
    };
    memo.insert(word.to_vec(), out.clone());
    out
}

/// `a -> a`, `a* -> a^+`, with creators placed left; the identity on
/// coefficients.
pub fn quantize(f: &ClassicalModePoly) -> QuantumElement {
    f.relabel()
}

/// Result of comparing `{F, G}_*` with `-(i/hbar)[F, G]_*` after
/// quantization.
#[derive(Clone, Debug)]
pub struct Correspondence {
    /// `quantize({F, G}_*) + (i/hbar)[quantize F, quantize G]_*`.
    pub residual: QuantumElement,
    /// Lowest effective hbar order present in either route.
    pub leading_order: Option<i32>,
    /// The residual restricted to `leading_order`.
    pub leading: QuantumElement,
}

pub fn correspondence_residual(f: &ClassicalModePoly, g: &ClassicalModePoly, lat: &ModeLattice) -> Correspondence {
    let classical = quantize(&f.poisson_star(g, lat));
    let i_over_hbar = Scalar::new(Gauss::i(), -1, Phase::identity());
    let quantum = quantize(f).star_commutator(&quantize(g), lat).scale(&i_over_hbar);
    let residual = classical.add(&quantum);
    let leading_order = classical.effective_orders().into_iter().chain(quantum.effective_orders()).min();
    let leading = leading_order.map(|o| residual.part_at(o)).unwrap_or_default();
    Correspondence { residual, leading_order, leading }
}

/// Which pair of lattice fields to bracket.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum FieldPair {
    PhiPi,
    PhiPhi,
    PiPi,
}

impl FieldPair {
    pub const ALL: [FieldPair; 3] = [FieldPair::PhiPi, FieldPair::PhiPhi, FieldPair::PiPi];

    pub fn name(self) -> &'static str {
        match self {
            FieldPair::PhiPi => "phi_pi",
            FieldPair::PhiPhi => "phi_phi",
            FieldPair::PiPi => "pi_pi",
        }
    }
}

fn site_phase(site: u16, k: &[i64], sign: i64) -> Phase {
    let mut p = Phase::identity();
    for (c, kc) in k.iter().enumerate() {
        p.add_term(PhaseSym::Site(site, c as u8), &Rat::from_integer((sign * kc).into()));
    }
    p
}

/// Unnormalized mode pieces: `a(k) e^{ikx} + a*(k) e^{-ikx}` for the field,
/// `a(k) e^{ikx} - a*(k) e^{-ikx}` for the momentum.
fn field_piece(k: &[i64], site: u16, momentum: bool) -> ClassicalModePoly {
    let plus = Scalar::new(Gauss::one(), 0, site_phase(site, k, 1));
    let minus = Scalar::new(Gauss::int(if momentum { -1 } else { 1 }), 0, site_phase(site, k, -1));
    ClassicalModePoly::a(k).scale(&plus).add(&ClassicalModePoly::a_dag(k).scale(&minus))
}

/// Normalization of a diagonal `(k, k)` bucket: the product of the two field
/// prefactors `(2E)^{-1/2}` and `-i hbar (E/2)^{1/2}`, which is rational.
fn diagonal_prefactor(pair: FieldPair, e: &Rat) -> Scalar {
    match pair {
        FieldPair::PhiPi => Scalar::new(Gauss::imag(rat(-1, 2)), 1, Phase::identity()),
        FieldPair::PhiPhi => Scalar::from_gauss(Gauss::real(Rat::one() / (e * rat(2, 1)))),
        FieldPair::PiPi => Scalar::new(Gauss::real(-(e / rat(2, 1))), 2, Phase::identity()),
    }
}

/// Bracket of two lattice fields at sites `s` and `t`, summed per `(k, k')`
/// bucket. Off-diagonal buckets carry irrational prefactors and must vanish;
/// any that do not are reported as an error.
pub fn field_bracket(lat: &ModeLattice, pair: FieldPair, s: u16, t: u16, star: bool) -> Result<ClassicalModePoly> {
    if !lat.is_negation_closed() {
        return Err(Error::InvalidLattice("momentum set is not closed under negation".into()));
    }
    let (left_momentum, right_momentum) = match pair {
        FieldPair::PhiPi => (false, true),
        FieldPair::PhiPhi => (false, false),
        FieldPair::PiPi => (true, true),
    };
    let mut out = ClassicalModePoly::zero();
    for (i, k) in lat.momenta().iter().enumerate() {
        for k2 in lat.momenta() {
            let a = field_piece(k, s, left_momentum);
            let b = field_piece(k2, t, right_momentum);
            let bucket = if star { a.poisson_star(&b, lat) } else { a.poisson(&b) };
            if k == k2 {
                out = out.add(&bucket.scale(&diagonal_prefactor(pair, &lat.energies[i])));
            } else if !bucket.is_zero() {
                return Err(Error::InvalidLattice(format!("off-diagonal bucket {k:?}, {k2:?} does not vanish")));
            }
        }
    }
    Ok(out)
}

/// Compares the deformed and undeformed brackets of the lattice fields for
/// every ordered pair of sites.
pub fn field_bracket_check(lat: &ModeLattice, sites: u16) -> Result<Vec<Residual>> {
    let mut out = Vec::new();
    for pair in FieldPair::ALL {
        for s in 0..sites {
            for t in 0..sites {
                let star = field_bracket(lat, pair, s, t, true)?;
                let plain = field_bracket(lat, pair, s, t, false)?;
                out.push(Residual::count(format!("{}[{s},{t}]", pair.name()), star.sub(&plain).num_terms()));
            }
        }
    }
    Ok(out)
}
