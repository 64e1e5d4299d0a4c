//! Exact symbolic engine for twist-deformed differential geometry.

pub mod corpus;
pub mod diffop;
pub mod error;
pub mod field;
pub mod function;
pub mod geometry;
pub mod hopf;
pub mod identities;
pub mod modes;
pub mod parse;
pub mod poisson;
pub mod residual;
pub mod scalar;
pub mod scenario;
pub mod series;
pub mod star;
pub mod verify;

pub use error::{Error, Result};
pub use field::{Deformable, Form, OneForm, Slot, Tensor, VectorField};
pub use function::FunctionExpr;
pub use scalar::{Gauss, Phase, PhaseSym, Rat, Scalar};
pub use series::{LambdaSeries, Linear, Ring};
