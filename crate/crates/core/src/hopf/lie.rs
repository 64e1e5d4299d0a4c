//! Finite-dimensional Lie algebras given by structure constants, and their
//! realization by vector fields.

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::field::VectorField;
use crate::scalar::{Gauss, Rat};
use crate::series::Linear;

/// `[g_i, g_j] = sum_k c_{ij}^k g_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra {
    size: usize,
    /// `table[i][j]` lists `(k, c_{ij}^k)`.
    table: Vec<Vec<Vec<(u8, Rat)>>>,
}

/// `[g_i, g_j] = sum_k c_k g_k` as `(i, j, [(k, c_k)])`.
pub type Bracket = (usize, usize, Vec<(usize, Rat)>);

impl LieAlgebra {
    pub fn abelian(size: usize) -> Self {
        LieAlgebra { size, table: vec![vec![Vec::new(); size]; size] }
    }

    /// Builds the algebra from brackets `[g_i, g_j]` listed for `i < j`.
    pub fn from_brackets(size: usize, brackets: &[Bracket]) -> Self {
        let mut alg = Self::abelian(size);
        for (i, j, combo) in brackets {
            let pos: Vec<(u8, Rat)> = combo.iter().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (*k as u8, c.clone())).collect();
            let neg = pos.iter().map(|(k, c)| (*k, -c.clone())).collect();
            alg.table[*i][*j] = pos;
            alg.table[*j][*i] = neg;
        }
        alg
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn bracket(&self, i: u8, j: u8) -> &[(u8, Rat)] {
        &self.table[i as usize][j as usize]
    }

    pub fn is_abelian(&self) -> bool {
        self.table.iter().all(|row| row.iter().all(|c| c.is_empty()))
    }
}

/// Named generators realized as vector fields on a common `R^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct Generators {
    names: Vec<String>,
    fields: Vec<VectorField>,
    algebra: LieAlgebra,
}

impl Generators {
    /// Checks every bracket relation against the concrete fields.
    pub fn new(names: Vec<String>, fields: Vec<VectorField>, algebra: LieAlgebra) -> Result<Self> {
        if fields.len() != algebra.size() || names.len() != fields.len() {
            return Err(Error::InvalidTwist("generator count does not match the algebra".into()));
        }
        let dim = fields.first().map(|f| f.dim()).unwrap_or(0);
        for f in &fields {
            crate::error::check_dim(dim, f.dim())?;
        }
        for i in 0..fields.len() {
            for j in i + 1..fields.len() {
                let actual = fields[i].bracket(&fields[j]);
                let mut expected = VectorField::zero(dim);
                for (k, c) in algebra.bracket(i as u8, j as u8) {
                    expected.add_assign(&fields[*k as usize].scale(&Gauss::real(c.clone())));
                }
                if actual != expected {
                    return Err(Error::InvalidTwist(format!(
                        "[{}, {}] = {} but the algebra requires {}",
                        names[i], names[j], actual, expected
                    )));
                }
            }
        }
        Ok(Generators { names, fields, algebra })
    }

    pub fn dim(&self) -> usize {
        self.fields.first().map(|f| f.dim()).unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.fields.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fields.is_empty()
    }

    pub fn field(&self, i: u8) -> &VectorField {
        &self.fields[i as usize]
    }

    pub fn fields(&self) -> &[VectorField] {
        &self.fields
    }

    pub fn name(&self, i: u8) -> &str {
        &self.names[i as usize]
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::FunctionExpr;
    use crate::scalar::rat_int;

    #[test]
    fn wrong_relation_is_rejected() {
        let x = FunctionExpr::var(2, 0).unwrap();
        let h = VectorField::from_comps(vec![x.scale(&Gauss::int(-2)), FunctionExpr::zero(2)]).unwrap();
        let e = VectorField::coord(2, 0);
        let good = LieAlgebra::from_brackets(2, &[(0, 1, vec![(1, rat_int(2))])]);
        assert!(Generators::new(vec!["H".into(), "E".into()], vec![h.clone(), e.clone()], good).is_ok());
        let bad = LieAlgebra::abelian(2);
        assert!(matches!(Generators::new(vec!["H".into(), "E".into()], vec![h, e], bad), Err(Error::InvalidTwist(_))));
    }
}
