//! Enveloping algebras, Drinfeld twists and their action on fields.

pub mod action;
pub mod lie;
pub mod twist;
pub mod uenv;
pub mod ug;

pub use action::{act1, act1_series, act2, act2_series, act_word, Orbit};
pub use lie::{Generators, LieAlgebra};
pub use twist::{expand_twist, Family, TwistExpansion, TwistSpec};
pub use uenv::{chi, dmap, op_equal, op_equal_series, op_equal_tensor, uenv_star, xmap, UEnvElement, UTensor, Word};
pub use ug::{normal_order, GenWord, UgTensor};
