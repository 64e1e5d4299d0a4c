//! JSON scenario files for phase spaces and mode lattices.
//!
//! Rationals may be written as JSON integers or as `"p/q"` strings. An
//! antisymmetric matrix is given by its upper triangle in row order:
//! `theta12, theta13, .., theta23, ..`.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::function::FunctionExpr;
use crate::modes::{ModeLattice, ThetaParam};
use crate::parse::{parse_function, Coordinates};
use crate::poisson::PhaseSpace;
use crate::scalar::{parse_rat, Rat};

/// A rational as it appears in JSON.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum RatLit {
    Int(i64),
    Text(String),
}

impl RatLit {
    pub fn value(&self) -> Result<Rat> {
        match self {
            RatLit::Int(n) => Ok(Rat::from_integer((*n).into())),
            RatLit::Text(s) => parse_rat(s),
        }
    }
}

/// Antisymmetric `dim x dim` matrix from its upper triangle.
pub fn theta_from_upper(dim: usize, upper: &[Rat]) -> Result<Vec<Vec<Rat>>> {
    let need = dim * dim.saturating_sub(1) / 2;
    if upper.len() != need {
        return Err(Error::Scenario(format!("theta needs {need} upper-triangle entries for dimension {dim}, got {}", upper.len())));
    }
    let mut t = vec![vec![Rat::zero(); dim]; dim];
    let mut it = upper.iter();
    for i in 0..dim {
        for j in i + 1..dim {
            let v = it.next().expect("length checked").clone();
            t[j][i] = -v.clone();
            t[i][j] = v;
        }
    }
    Ok(t)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseSpaceScenario {
    /// Number of degrees of freedom; phase space is `R^{2n}`.
    pub n: usize,
    /// Upper triangle of the `n x n` position twist matrix.
    #[serde(default)]
    pub theta: Vec<RatLit>,
    #[serde(default)]
    pub hamiltonian: Option<String>,
    #[serde(default)]
    pub observables: Vec<String>,
}

/// A phase-space scenario with every field parsed.
#[derive(Clone, Debug)]
pub struct LoadedPhaseSpace {
    pub space: PhaseSpace,
    pub coords: Coordinates,
    pub theta: Vec<Vec<Rat>>,
    pub hamiltonian: Option<FunctionExpr>,
    pub observables: Vec<FunctionExpr>,
}

impl PhaseSpaceScenario {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Scenario(e.to_string()))
    }

    pub fn load(&self, order: u32) -> Result<LoadedPhaseSpace> {
        if self.n == 0 {
            return Err(Error::Scenario("n must be at least 1".into()));
        }
        let upper = if self.theta.is_empty() {
            vec![Rat::zero(); self.n * (self.n - 1) / 2]
        } else {
            self.theta.iter().map(RatLit::value).collect::<Result<_>>()?
        };
        let theta = theta_from_upper(self.n, &upper)?;
        let coords = Coordinates::PhaseSpace(self.n);
        let hamiltonian = self.hamiltonian.as_deref().map(|h| parse_function(h, coords)).transpose()?;
        let observables = self.observables.iter().map(|q| parse_function(q, coords)).collect::<Result<_>>()?;
        Ok(LoadedPhaseSpace { space: PhaseSpace::canonical(&theta, order)?, coords, theta, hamiltonian, observables })
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ThetaLit {
    /// `"sym"`: keep the entries as formal symbols.
    Symbolic(String),
    Upper(Vec<RatLit>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeScenario {
    pub d: usize,
    pub momenta: Vec<Vec<i64>>,
    #[serde(default = "symbolic")]
    pub theta: ThetaLit,
    /// Energies keyed by the comma-joined momentum, as in `"1,0"`. Missing
    /// entries default to one.
    #[serde(default, rename = "E")]
    pub energies: BTreeMap<String, RatLit>,
}

fn symbolic() -> ThetaLit {
    ThetaLit::Symbolic("sym".into())
}

pub fn momentum_key(k: &[i64]) -> String {
    k.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

impl LatticeScenario {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Scenario(e.to_string()))
    }

    pub fn load(&self) -> Result<ModeLattice> {
        let theta = match &self.theta {
            ThetaLit::Symbolic(s) if s == "sym" => ThetaParam::Symbolic,
            ThetaLit::Symbolic(s) => return Err(Error::Scenario(format!("theta must be \"sym\" or a list of rationals, got `{s}`"))),
            ThetaLit::Upper(v) => {
                let upper = v.iter().map(RatLit::value).collect::<Result<Vec<_>>>()?;
                ThetaParam::Numeric(theta_from_upper(self.d, &upper)?)
            }
        };
        let keys: Vec<String> = self.momenta.iter().map(|k| momentum_key(k)).collect();
        if let Some(stray) = self.energies.keys().find(|k| !keys.contains(k)) {
            return Err(Error::Scenario(format!("energy given for unknown momentum `{stray}`")));
        }
        let energies = keys
            .iter()
            .map(|k| self.energies.get(k).map(RatLit::value).unwrap_or_else(|| Ok(Rat::from_integer(1.into()))))
            .collect::<Result<Vec<_>>>()?;
        ModeLattice::new(self.d, self.momenta.clone(), theta, energies)
    }
}
