//! Seeded identity suites and their machine-readable report.
//!
//! Every check records per-order residual term counts and a digest of its
//! inputs. Wall times are kept in a separate table so that the report body
//! is byte-stable for a given configuration.

use std::collections::BTreeMap;
use std::time::Instant;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::function::FunctionExpr;
use crate::geometry::{FrameConnection, StarGeometry};
use crate::hopf::twist::{
    check_cocycle, check_counit, check_inverse, check_inverse_cocycle, check_normalization, check_r_is_inverse_square,
};
use crate::hopf::{expand_twist, Family, TwistSpec};
use crate::identities;
use crate::modes::{correspondence_residual, field_bracket_check, quantize, ClassicalModePoly, ModeLattice, QuantumElement, ThetaParam};
use crate::poisson::PhaseSpace;
use crate::residual::Residual;
use crate::scalar::{format_rat, parse_rat, rat, Gauss, Phase, Rat, Scalar};
use crate::star::StarContext;

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Twist,
    Starcalc,
    Geometry,
    Poisson,
    Modes,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Twist, Suite::Starcalc, Suite::Geometry, Suite::Poisson, Suite::Modes];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Twist => "twist",
            Suite::Starcalc => "starcalc",
            Suite::Geometry => "geometry",
            Suite::Poisson => "poisson",
            Suite::Modes => "modes",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Suite::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| Error::Scenario(format!("unknown suite `{s}`")))
    }
}

/// What a verification run covers. Missing JSON fields take the defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifyConfig {
    pub suites: Vec<Suite>,
    /// Twist families covered by the twist, star-calculus and geometry suites.
    pub families: Vec<Family>,
    /// Truncation order in the deformation parameter.
    pub order: u32,
    pub seed: u64,
    /// Functions per law in the star-calculus and Poisson suites.
    pub samples: usize,
    /// Vector-field triples per law in the star-calculus suite.
    pub field_samples: usize,
    /// Enveloping-algebra elements for the twisting-map checks.
    pub uenv_samples: usize,
    /// Random connections per family in the geometry suite.
    pub connections: usize,
    /// Order of the geometry suite, which is the most expensive.
    pub geometry_order: u32,
    /// Monomial pairs for the quantum correspondence.
    pub mode_pairs: usize,
    /// Highest monomial degree on which operators are compared.
    pub eval_degree: u32,
    /// Fixed Moyal parameter `theta12` on the plane and on phase space, as
    /// `"p/q"`. Drawn from the seed when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<String>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            suites: Suite::ALL.to_vec(),
            families: Family::ALL.to_vec(),
            order: 4,
            seed: 42,
            samples: 8,
            field_samples: 4,
            uenv_samples: 4,
            connections: 2,
            geometry_order: 3,
            mode_pairs: 30,
            eval_degree: 6,
            theta: None,
        }
    }
}

impl VerifyConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let c: VerifyConfig = serde_json::from_str(text).map_err(|e| Error::Scenario(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if self.order == 0 || self.geometry_order == 0 {
            return Err(Error::Scenario("truncation order must be at least 1".into()));
        }
        if self.suites.is_empty() || self.families.is_empty() {
            return Err(Error::Scenario("at least one suite and one family are required".into()));
        }
        self.plane_theta()?;
        Ok(())
    }

    /// The fixed plane parameter as an antisymmetric matrix, if one is set.
    pub fn plane_theta(&self) -> Result<Option<Vec<Vec<Rat>>>> {
        let Some(text) = &self.theta else { return Ok(None) };
        let t = parse_rat(text)?;
        Ok(Some(vec![vec![Rat::zero(), t.clone()], vec![-t, Rat::zero()]]))
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Error,
}

/// Whether a check asserts that a residual vanishes or that it does not.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Expect {
    Zero,
    Nonzero,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub id: String,
    pub tag: String,
    pub suite: Suite,
    /// SHA-256 of a canonical rendering of the inputs.
    pub inputs_digest: String,
    /// Rational parameters of the check, written `p/q`.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, String>,
    pub cases: usize,
    pub expect: Expect,
    /// Residual term counts at each order, summed over cases.
    pub counts: Vec<usize>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

/// The deterministic part of a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub config: VerifyConfig,
    pub checks: Vec<CheckRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Wall time of one check, in microseconds.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Timing {
    pub id: String,
    pub micros: u128,
}

#[derive(Clone, Debug)]
pub struct Run {
    pub report: Report,
    pub timings: Vec<Timing>,
}

impl Run {
    /// Report body plus a `timing` table.
    pub fn to_json_with_timing(&self) -> String {
        #[derive(Serialize)]
        struct WithTiming<'a> {
            #[serde(flatten)]
            report: &'a Report,
            timing: &'a [Timing],
        }
        serde_json::to_string_pretty(&WithTiming { report: &self.report, timing: &self.timings }).expect("report serializes") + "\n"
    }
}

pub fn digest(text: &str) -> String {
    hex::encode(Sha256::digest(text.as_bytes()))
}

fn sum_counts(rs: &[Residual]) -> Vec<usize> {
    let len = rs.iter().map(|r| r.counts.len()).max().unwrap_or(0);
    let mut out = vec![0; len];
    for r in rs {
        for (k, c) in r.counts.iter().enumerate() {
            out[k] += c;
        }
    }
    out
}

/// Accumulates checks and their timings.
pub struct Recorder {
    suite: Suite,
    checks: Vec<CheckRecord>,
    timings: Vec<Timing>,
}

/// Everything needed to run one check besides the computation itself.
pub struct CheckSpec {
    pub id: String,
    pub tag: &'static str,
    pub inputs: String,
    pub params: BTreeMap<String, String>,
    pub cases: usize,
    pub expect: Expect,
}

impl CheckSpec {
    pub fn new(id: impl Into<String>, tag: &'static str, inputs: String, cases: usize) -> Self {
        CheckSpec { id: id.into(), tag, inputs, params: BTreeMap::new(), cases, expect: Expect::Zero }
    }

    pub fn param(mut self, key: &str, value: String) -> Self {
        self.params.insert(key.to_string(), value);
        self
    }

    pub fn expect_nonzero(mut self) -> Self {
        self.expect = Expect::Nonzero;
        self
    }
}

impl Recorder {
    pub fn new(suite: Suite) -> Self {
        Recorder { suite, checks: Vec::new(), timings: Vec::new() }
    }

    pub fn run(&mut self, spec: CheckSpec, f: impl FnOnce() -> Result<Vec<Residual>>) {
        let start = Instant::now();
        let outcome = f();
        let micros = start.elapsed().as_micros();
        let (counts, status, message) = match outcome {
            Ok(rs) => {
                let counts = sum_counts(&rs);
                let zero = counts.iter().all(|c| *c == 0);
                let ok = match spec.expect {
                    Expect::Zero => zero,
                    Expect::Nonzero => !zero,
                };
                (counts, if ok { Status::Pass } else { Status::Fail }, None)
            }
            Err(e) => (Vec::new(), Status::Error, Some(e.to_string())),
        };
        let id = format!("{}/{}", self.suite.name(), spec.id);
        self.timings.push(Timing { id: id.clone(), micros });
        self.checks.push(CheckRecord {
            id,
            tag: spec.tag.to_string(),
            suite: self.suite,
            inputs_digest: digest(&spec.inputs),
            params: spec.params,
            cases: spec.cases,
            expect: spec.expect,
            counts,
            status,
            message,
        });
    }

    pub fn finish(self) -> (Vec<CheckRecord>, Vec<Timing>) {
        (self.checks, self.timings)
    }
}

/// Runs the configured suites in a fixed order.
pub fn run(config: &VerifyConfig) -> Run {
    let mut checks = Vec::new();
    let mut timings = Vec::new();
    let mut suites = config.suites.clone();
    suites.sort();
    suites.dedup();
    for suite in suites {
        let (c, t) = run_suite(suite, config);
        checks.extend(c);
        timings.extend(t);
    }
    assemble(config, checks, timings)
}

/// Builds a run from checks recorded outside [`run`].
pub fn assemble(config: &VerifyConfig, checks: Vec<CheckRecord>, timings: Vec<Timing>) -> Run {
    let passed = checks.iter().filter(|c| c.status == Status::Pass).count();
    let summary = Summary { total: checks.len(), passed, failed: checks.len() - passed };
    Run { report: Report { config: config.clone(), checks, summary }, timings }
}

pub fn run_suite(suite: Suite, config: &VerifyConfig) -> (Vec<CheckRecord>, Vec<Timing>) {
    let mut rec = Recorder::new(suite);
    // Each suite draws from its own stream so that selecting suites does not
    // change the inputs of the others.
    let mut corpus = Corpus::new(config.seed.wrapping_add(suite as u64 * 0x9e37_79b9));
    match suite {
        Suite::Twist => twist_suite(&mut rec, &mut corpus, config),
        Suite::Starcalc => starcalc_suite(&mut rec, &mut corpus, config),
        Suite::Geometry => geometry_suite(&mut rec, &mut corpus, config),
        Suite::Poisson => poisson_suite(&mut rec, &mut corpus, config),
        Suite::Modes => modes_suite(&mut rec, &mut corpus, config),
    }
    rec.finish()
}

fn render_theta(theta: &[Vec<Rat>]) -> String {
    let rows: Vec<String> = theta.iter().map(|r| r.iter().map(format_rat).collect::<Vec<_>>().join(",")).collect();
    format!("[{}]", rows.join(";"))
}

/// A labelled twist with its parameters rendered for the report.
pub struct NamedTwist {
    pub label: String,
    pub spec: TwistSpec,
    pub theta: Option<String>,
}

/// Moyal twists with random theta on `R^2` and `R^3` followed by the default
/// Jordanian and extended Jordanian twists on `R^2`.
pub fn twist_corpus(corpus: &mut Corpus, moyal_per_dim: usize) -> Vec<NamedTwist> {
    let mut out = Vec::new();
    for dim in [2, 3] {
        for i in 0..moyal_per_dim {
            let theta = corpus.theta(dim);
            out.push(NamedTwist { label: format!("moyal_r{dim}_{i}"), theta: Some(render_theta(&theta)), spec: TwistSpec::moyal(theta) });
        }
    }
    out.push(NamedTwist { label: "jordanian".into(), spec: TwistSpec::jordanian_default(2), theta: None });
    out.push(NamedTwist { label: "ext_jordanian".into(), spec: TwistSpec::ext_jordanian_default(2), theta: None });
    out
}

fn named(t: &NamedTwist, spec: CheckSpec) -> CheckSpec {
    match &t.theta {
        Some(th) => spec.param("theta", th.clone()),
        None => spec,
    }
}

fn twist_suite(rec: &mut Recorder, corpus: &mut Corpus, config: &VerifyConfig) {
    let n = config.order;
    for t in twist_corpus(corpus, 3).into_iter().filter(|t| config.families.contains(&t.spec.family())) {
        let inputs = format!("{:?}", t.spec);
        let tw = match expand_twist(&t.spec, n) {
            Ok(tw) => tw,
            Err(e) => {
                rec.run(named(&t, CheckSpec::new(format!("{}/expand", t.label), "twist-expansion", inputs, 1)), || Err(e));
                continue;
            }
        };
        let spec = |law: &str, tag| named(&t, CheckSpec::new(format!("{}/{law}", t.label), tag, inputs.clone(), 1));
        let mut realized = Vec::new();
        rec.run(spec("cocycle_normal_form", "twist-cocycle"), || {
            let r = check_cocycle(&tw);
            realized = r.realized;
            Ok(vec![Residual { name: "cocycle".into(), counts: r.normal_form }])
        });
        rec.run(spec("cocycle_realized", "twist-cocycle"), || Ok(vec![Residual { name: "cocycle".into(), counts: realized }]));
        let mut realized = Vec::new();
        rec.run(spec("inverse_cocycle_normal_form", "twist-inverse-cocycle"), || {
            let r = check_inverse_cocycle(&tw);
            realized = r.realized;
            Ok(vec![Residual { name: "inverse_cocycle".into(), counts: r.normal_form }])
        });
        rec.run(spec("inverse_cocycle_realized", "twist-inverse-cocycle"), || {
            Ok(vec![Residual { name: "inverse_cocycle".into(), counts: realized }])
        });
        rec.run(spec("counit", "twist-counit"), || {
            let (l, r) = check_counit(&tw);
            Ok(vec![Residual { name: "left".into(), counts: l }, Residual { name: "right".into(), counts: r }])
        });
        rec.run(spec("inverse", "twist-inverse"), || {
            let (l, r) = check_inverse(&tw);
            Ok(vec![Residual { name: "left".into(), counts: l }, Residual { name: "right".into(), counts: r }])
        });
        rec.run(spec("normalization", "twist-normalization"), || Ok(vec![Residual::count("normalization", check_normalization(&tw))]));
        if t.spec.family() == Family::Moyal {
            rec.run(spec("r_matrix", "r-matrix-inverse-square"), || {
                Ok(vec![Residual { name: "r".into(), counts: check_r_is_inverse_square(&tw) }])
            });
        }
    }
}

/// One twist per family on `R^2`; the Moyal parameter is random.
pub fn family_twists(corpus: &mut Corpus) -> Vec<NamedTwist> {
    let theta = corpus.theta(2);
    moyal_and_jordanian(theta)
}

/// [`family_twists`] with the Moyal parameter fixed by the config, if set.
/// The corpus advances the same way either way.
fn configured_twists(corpus: &mut Corpus, config: &VerifyConfig) -> Vec<NamedTwist> {
    let drawn = corpus.theta(2);
    moyal_and_jordanian(configured_theta(config, drawn))
}

fn configured_theta(config: &VerifyConfig, drawn: Vec<Vec<Rat>>) -> Vec<Vec<Rat>> {
    config.plane_theta().ok().flatten().unwrap_or(drawn)
}

fn moyal_and_jordanian(theta: Vec<Vec<Rat>>) -> Vec<NamedTwist> {
    vec![
        NamedTwist { label: "moyal".into(), theta: Some(render_theta(&theta)), spec: TwistSpec::moyal(theta) },
        NamedTwist { label: "jordanian".into(), spec: TwistSpec::jordanian_default(2), theta: None },
        NamedTwist { label: "ext_jordanian".into(), spec: TwistSpec::ext_jordanian_default(2), theta: None },
    ]
}

fn inputs_of<T: std::fmt::Debug>(label: &str, items: &[T]) -> String {
    format!("{label}:{items:?}")
}

fn context_or_record(rec: &mut Recorder, t: &NamedTwist, order: u32) -> Option<StarContext> {
    match StarContext::new(&t.spec, order) {
        Ok(ctx) => Some(ctx),
        Err(e) => {
            rec.run(named(t, CheckSpec::new(format!("{}/context", t.label), "twist-expansion", format!("{:?}", t.spec), 1)), || Err(e));
            None
        }
    }
}

fn starcalc_suite(rec: &mut Recorder, corpus: &mut Corpus, config: &VerifyConfig) {
    let n = config.order;
    for t in configured_twists(corpus, config).into_iter().filter(|t| config.families.contains(&t.spec.family())) {
        let Some(ctx) = context_or_record(rec, &t, n) else { continue };
        let dim = ctx.dim();
        let triples: Vec<[FunctionExpr; 3]> =
            (0..config.samples).map(|_| [corpus.poly(dim, 3), corpus.poly(dim, 3), corpus.poly(dim, 3)]).collect();
        let id = |law: &str| format!("{}/{law}", t.label);
        rec.run(named(&t, CheckSpec::new(id("associativity"), "star-associativity", inputs_of(&t.label, &triples), triples.len())), || {
            Ok(triples.iter().map(|[f, g, h]| identities::associativity(f, g, h, &ctx)).collect())
        });
        rec.run(
            named(&t, CheckSpec::new(id("r_commutativity"), "star-r-commutativity", inputs_of(&t.label, &triples), triples.len())),
            || Ok(triples.iter().map(|[f, g, _]| identities::r_commutativity(f, g, &ctx)).collect()),
        );
        let fields: Vec<[VectorField; 3]> = (0..config.field_samples)
            .map(|_| [corpus.vector_field(dim, 2), corpus.vector_field(dim, 2), corpus.vector_field(dim, 2)])
            .collect();
        rec.run(
            named(&t, CheckSpec::new(id("lie_antisymmetry"), "star-lie-antisymmetry", inputs_of(&t.label, &fields), fields.len())),
            || Ok(fields.iter().map(|[u, v, _]| identities::lie_antisymmetry(u, v, &ctx)).collect()),
        );
        rec.run(named(&t, CheckSpec::new(id("lie_jacobi"), "star-lie-jacobi", inputs_of(&t.label, &fields), fields.len())), || {
            Ok(fields.iter().map(|[u, v, z]| identities::lie_jacobi(u, v, z, &ctx)).collect())
        });
        let deg = config.eval_degree;
        let spec = CheckSpec::new(id("bracket_is_star_commutator"), "star-lie-operator", inputs_of(&t.label, &fields), fields.len())
            .param("eval_degree", deg.to_string());
        rec.run(named(&t, spec), || Ok(fields.iter().map(|[u, v, _]| identities::bracket_is_star_commutator(u, v, &ctx, deg)).collect()));

        let elems: Vec<_> = (0..config.uenv_samples).map(|_| (corpus.uenv(dim, n), corpus.uenv(dim, n))).collect();
        let tw = ctx.twist();
        let spec = CheckSpec::new(id("x_inverts_d"), "twisting-map-inverse", inputs_of(&t.label, &elems), elems.len());
        rec.run(named(&t, spec), || Ok(elems.iter().map(|(xi, _)| identities::x_inverts_d(xi, tw, deg)).collect()));
        let spec = CheckSpec::new(id("d_is_homomorphism"), "twisting-map-homomorphism", inputs_of(&t.label, &elems), elems.len());
        rec.run(named(&t, spec), || Ok(elems.iter().map(|(xi, zeta)| identities::d_is_homomorphism(xi, zeta, tw, deg)).collect()));
    }
}

/// Residuals of the structure equations (Cartan equations and the torsion
/// display) and of the Bianchi identities for one connection.
pub fn structure_residuals(geo: &StarGeometry) -> (Vec<Residual>, Vec<Residual>) {
    let coeffs = geo.coefficients();
    let forms = geo.forms(&coeffs);
    let mut structure = geo.cartan_residuals(&forms);
    structure.push(geo.torsion_display_residual(&coeffs));
    (structure, geo.bianchi_residuals(&forms))
}

/// Linearity, antisymmetry and connection axioms on random arguments.
pub fn tensoriality_residuals(geo: &StarGeometry, corpus: &mut Corpus) -> Vec<Residual> {
    let dim = geo.dim();
    let f = corpus.poly(dim, 2);
    let (u, v, z) = (corpus.vector_field(dim, 1), corpus.vector_field(dim, 1), corpus.vector_field(dim, 1));
    let mut out = geo.torsion_linearity(&f, &u, &v);
    out.extend(geo.curvature_linearity(&f, &u, &v, &z));
    out.extend(geo.antisymmetry(&u, &v, &z));
    out.extend(geo.connection_axioms(&f, &u, &v));
    out
}

fn geometry_suite(rec: &mut Recorder, corpus: &mut Corpus, config: &VerifyConfig) {
    let n = config.geometry_order;
    for t in configured_twists(corpus, config).into_iter().filter(|t| config.families.contains(&t.spec.family())) {
        let Some(ctx) = context_or_record(rec, &t, n) else { continue };
        let dim = ctx.dim();
        let mut conns: Vec<(String, FrameConnection)> = vec![("flat".into(), FrameConnection::flat(dim, n))];
        conns.extend((0..config.connections).map(|i| (format!("random_{i}"), corpus.connection(dim, n))));
        for (label, conn) in &conns {
            let inputs = format!("{}:{:?}", t.label, conn);
            let id = |law: &str| format!("{}/{label}/{law}", t.label);
            let geo = match StarGeometry::new(conn, &ctx) {
                Ok(g) => g,
                Err(e) => {
                    rec.run(named(&t, CheckSpec::new(id("setup"), "connection-setup", inputs, 1)), || Err(e));
                    continue;
                }
            };
            let mut bianchi = Vec::new();
            rec.run(named(&t, CheckSpec::new(id("cartan"), "cartan-structure", inputs.clone(), 1)), || {
                let (structure, b) = structure_residuals(&geo);
                bianchi = b;
                Ok(structure)
            });
            rec.run(named(&t, CheckSpec::new(id("bianchi"), "bianchi", inputs.clone(), 1)), || Ok(bianchi));
            rec.run(named(&t, CheckSpec::new(id("tensoriality"), "torsion-curvature-tensoriality", inputs, 1)), || {
                Ok(tensoriality_residuals(&geo, corpus))
            });
            if label == "flat" && t.spec.family() == Family::Moyal {
                // A flat frame connection has vanishing torsion and curvature.
                rec.run(named(&t, CheckSpec::new(id("vanishing"), "flat-control", format!("{}:flat", t.label), 1)), || {
                    let c = geo.coefficients();
                    Ok(c.torsion.iter().chain(&c.curvature).map(|s| Residual::of("flat", s)).collect())
                });
            }
        }
    }
}

/// `F = e^{i x1} p2`, `G = e^{i x2} p1` on the four-dimensional phase space:
/// a pair whose deformed bracket differs from the undeformed one.
pub fn wave_pair() -> (FunctionExpr, FunctionExpr) {
    let dim = 4;
    let p = |i: usize| FunctionExpr::var(dim, 2 + i).expect("in range");
    (FunctionExpr::plane_wave(dim, &[1, 0, 0, 0]).mul(&p(1)), FunctionExpr::plane_wave(dim, &[0, 1, 0, 0]).mul(&p(0)))
}

fn poisson_suite(rec: &mut Recorder, corpus: &mut Corpus, config: &VerifyConfig) {
    let theta = configured_theta(config, corpus.theta(2));
    let th = render_theta(&theta);
    let ps = match PhaseSpace::canonical(&theta, config.order) {
        Ok(ps) => ps,
        Err(e) => {
            rec.run(CheckSpec::new("setup", "phase-space-setup", th.clone(), 1).param("theta", th), || Err(e));
            return;
        }
    };
    let triples: Vec<[FunctionExpr; 3]> =
        (0..config.samples).map(|_| [corpus.wave_poly(4, 2, 2), corpus.wave_poly(4, 2, 2), corpus.wave_poly(4, 2, 2)]).collect();
    let inputs = inputs_of(&th, &triples);
    let spec = |law: &str, tag| CheckSpec::new(law, tag, inputs.clone(), triples.len()).param("theta", th.clone());
    rec.run(spec("classical_jacobi", "poisson-jacobi-classical"), || {
        triples.iter().map(|[f, g, h]| Ok(Residual::count("jacobi", ps.bivector().jacobi_residual(f, g, h)?.num_terms()))).collect()
    });
    rec.run(spec("bracket_routes", "poisson-bracket-two-routes"), || {
        triples
            .iter()
            .map(|[f, g, _]| {
                let b = ps.bivector();
                Ok(Residual::count("routes", b.bracket(f, g)?.sub(&b.bracket_pairing(f, g)?).num_terms()))
            })
            .collect()
    });
    rec.run(spec("antisymmetry", "star-poisson-antisymmetry"), || triples.iter().map(|[f, g, _]| ps.antisymmetry_residual(f, g)).collect());
    rec.run(spec("jacobi", "star-poisson-jacobi"), || triples.iter().map(|[f, g, h]| ps.jacobi_residual(f, g, h)).collect());
    rec.run(spec("leibniz", "star-poisson-leibniz"), || triples.iter().map(|[f, g, h]| ps.leibniz_residual(f, g, h)).collect());
    rec.run(spec("explicit_formula", "star-poisson-explicit"), || triples.iter().map(|[f, g, _]| ps.explicit_residual(f, g)).collect());
    rec.run(spec("hamiltonian_morphism", "star-poisson-morphism"), || triples.iter().map(|[f, g, _]| ps.morphism_residual(f, g)).collect());
    rec.run(spec("lie_route", "star-poisson-lie-route"), || triples.iter().map(|[f, g, _]| ps.lie_residual(f, g)).collect());
    let (f, g) = wave_pair();
    let spec = CheckSpec::new("deformation_visible", "star-poisson-deformed", format!("{f:?};{g:?}"), 1)
        .param("theta", th.clone())
        .expect_nonzero();
    rec.run(spec, || {
        let star = ps.star_poisson(&f, &g)?;
        let classical = crate::series::LambdaSeries::constant(ps.bracket(&f, &g)?, ps.order());
        Ok(vec![Residual::of_difference("deformation", &star, &classical)])
    });
}

/// Lattices in `d = 2` with two and four momenta and symbolic theta.
pub fn mode_lattices() -> Vec<(String, ModeLattice)> {
    let small = vec![vec![1, 0], vec![-1, 0]];
    let large = vec![vec![1, 0], vec![-1, 0], vec![1, 2], vec![-1, -2]];
    [("k2", small), ("k4", large)]
        .into_iter()
        .map(|(name, momenta)| {
            let energies = (1..=momenta.len() as i64).map(|e| rat(e + 1, 2)).collect();
            (name.to_string(), ModeLattice::new(2, momenta, ThetaParam::Symbolic, energies).expect("valid lattice"))
        })
        .collect()
}

fn count(x: &ClassicalModePoly) -> Residual {
    Residual::count("terms", x.num_terms())
}

fn qcount(x: &QuantumElement) -> Residual {
    Residual::count("terms", x.num_terms())
}

fn modes_suite(rec: &mut Recorder, corpus: &mut Corpus, config: &VerifyConfig) {
    for (name, lat) in mode_lattices() {
        lattice_checks(rec, corpus, config, &name, &lat);
    }
}

/// Mode-algebra checks on one lattice. Field brackets are only checked when
/// the momentum set is closed under negation.
pub fn lattice_checks(rec: &mut Recorder, corpus: &mut Corpus, config: &VerifyConfig, name: &str, lat: &ModeLattice) {
    type C = ClassicalModePoly;
    type Q = QuantumElement;
    let lat = lat.clone();
    {
        let inputs = format!("{lat:?}");
        let id = |law: &str| format!("{name}/{law}");
        let ks = lat.momenta().to_vec();
        rec.run(CheckSpec::new(id("mode_brackets"), "mode-star-bracket", inputs.clone(), ks.len() * ks.len()), || {
            let minus_i_over_hbar = C::constant(Scalar::new(Gauss::imag(rat(-1, 1)), -1, Phase::identity()));
            let mut out = Vec::new();
            for k in &ks {
                for k2 in &ks {
                    let delta = if k == k2 { minus_i_over_hbar.clone() } else { C::zero() };
                    out.push(count(&C::a(k).poisson_star(&C::a_dag(k2), &lat).sub(&delta)));
                    out.push(count(&C::a(k).poisson_star(&C::a(k2), &lat)));
                    out.push(count(&C::a_dag(k).poisson_star(&C::a_dag(k2), &lat)));
                }
            }
            Ok(out)
        });
        rec.run(CheckSpec::new(id("ccr"), "mode-ccr", inputs.clone(), ks.len() * ks.len()), || {
            let mut out = Vec::new();
            for k in &ks {
                for k2 in &ks {
                    let delta = if k == k2 { Q::one() } else { Q::zero() };
                    out.push(qcount(&Q::a(k).star_commutator(&Q::a_dag(k2), &lat).sub(&delta)));
                    out.push(qcount(&Q::a(k).star_commutator_r(&Q::a_dag(k2), &lat).sub(&delta)));
                    // Exchange form: a(k) * a+(k') - exp(-i theta(k', k)) a+(k') * a(k).
                    let exchange = Scalar::new(Gauss::one(), 0, lat.theta_phase(k2, k, &rat(-1, 1)));
                    let lhs = Q::a(k).star(&Q::a_dag(k2), &lat).sub(&Q::a_dag(k2).star(&Q::a(k), &lat).scale(&exchange));
                    out.push(qcount(&lhs.sub(&delta)));
                    out.push(qcount(&Q::a(k).star_commutator(&Q::a(k2), &lat)));
                    out.push(qcount(&Q::a_dag(k).star_commutator(&Q::a_dag(k2), &lat)));
                    // Undeformed operators keep the canonical relation.
                    out.push(qcount(&Q::a(k).commutator(&Q::a_dag(k2)).sub(&delta)));
                }
            }
            Ok(out)
        });
        let triples: Vec<[C; 3]> = (0..config.samples)
            .map(|_| [corpus.mode_monomial(&lat, 3), corpus.mode_monomial(&lat, 3), corpus.mode_monomial(&lat, 2)])
            .collect();
        let tinputs = inputs_of(&inputs, &triples);
        rec.run(CheckSpec::new(id("classical_laws"), "mode-star-poisson-laws", tinputs.clone(), triples.len()), || {
            Ok(triples
                .iter()
                .flat_map(|[f, g, h]| {
                    [
                        count(&f.antisymmetry_residual(g, &lat)),
                        count(&f.leibniz_residual(g, h, &lat)),
                        count(&f.jacobi_residual(g, h, &lat)),
                    ]
                })
                .collect())
        });
        rec.run(CheckSpec::new(id("quantum_laws"), "mode-star-commutator-laws", tinputs.clone(), triples.len()), || {
            Ok(triples
                .iter()
                .flat_map(|[f, g, h]| {
                    let (f, g, h) = (quantize(f), quantize(g), quantize(h));
                    [
                        qcount(&f.antisymmetry_residual(&g, &lat)),
                        qcount(&f.leibniz_residual(&g, &h, &lat)),
                        qcount(&f.jacobi_residual(&g, &h, &lat)),
                        qcount(&f.star_commutator(&g, &lat).sub(&f.star_commutator_r(&g, &lat))),
                    ]
                })
                .collect())
        });
        let pairs: Vec<(C, C)> = (0..config.mode_pairs).map(|_| (corpus.mode_monomial(&lat, 2), corpus.mode_monomial(&lat, 2))).collect();
        let pinputs = inputs_of(&inputs, &pairs);
        rec.run(CheckSpec::new(id("correspondence_leading"), "quantum-correspondence", pinputs.clone(), pairs.len()), || {
            Ok(pairs.iter().map(|(f, g)| qcount(&correspondence_residual(f, g, &lat).leading)).collect())
        });
        rec.run(CheckSpec::new(id("correspondence_low_degree"), "quantum-correspondence-exact", pinputs, pairs.len()), || {
            Ok(pairs
                .iter()
                .filter(|(f, g)| f.max_degree() + g.max_degree() <= 2)
                .map(|(f, g)| qcount(&correspondence_residual(f, g, &lat).residual))
                .collect())
        });
        if lat.is_negation_closed() {
            rec.run(CheckSpec::new(id("field_brackets"), "lattice-field-brackets", inputs.clone(), 1), || field_bracket_check(&lat, 2));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> VerifyConfig {
        VerifyConfig {
            order: 2,
            samples: 2,
            field_samples: 1,
            uenv_samples: 1,
            connections: 1,
            geometry_order: 1,
            mode_pairs: 4,
            eval_degree: 3,
            ..Default::default()
        }
    }

    #[test]
    fn small_run_passes_and_is_deterministic() {
        let a = run(&small());
        for c in &a.report.checks {
            assert_eq!(c.status, Status::Pass, "{c:?}");
        }
        let b = run(&small());
        assert_eq!(a.report.to_json(), b.report.to_json());
        assert_eq!(a.timings.len(), a.report.checks.len());
    }

    #[test]
    fn suite_selection_keeps_inputs() {
        let all = run(&small());
        let only = run(&VerifyConfig { suites: vec![Suite::Poisson], ..small() });
        let from_all: Vec<_> = all.report.checks.iter().filter(|c| c.suite == Suite::Poisson).collect();
        assert_eq!(from_all.len(), only.report.checks.len());
        for (a, b) in from_all.iter().zip(&only.report.checks) {
            assert_eq!(a.inputs_digest, b.inputs_digest);
        }
    }

    #[test]
    fn config_defaults_fill_missing_fields() {
        let c: VerifyConfig = serde_json::from_str(r#"{"order": 2, "suites": ["twist"]}"#).unwrap();
        assert_eq!(c.order, 2);
        assert_eq!(c.suites, vec![Suite::Twist]);
        assert_eq!(c.seed, 42);
        assert!(VerifyConfig::from_json(r#"{"bogus": 1}"#).is_err());
        assert!(VerifyConfig::from_json(r#"{"order": 0}"#).is_err());
        let c = VerifyConfig::from_json(r#"{"families": ["ext_jordanian"]}"#).unwrap();
        assert_eq!(c.families, vec![Family::ExtJordanian]);
    }

    #[test]
    fn undeformed_plane_fails_the_deformation_check() {
        let config = VerifyConfig { suites: vec![Suite::Poisson], theta: Some("0".into()), ..small() };
        let r = run(&config).report;
        let failed: Vec<&str> = r.checks.iter().filter(|c| c.status != Status::Pass).map(|c| c.id.as_str()).collect();
        assert_eq!(failed, ["poisson/deformation_visible"]);
        assert!(VerifyConfig::from_json(r#"{"theta": "1/x"}"#).is_err());
    }

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::parse(s.name()).unwrap(), s);
        }
        assert!(Suite::parse("nope").is_err());
    }
}
