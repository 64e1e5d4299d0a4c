//! Fixed inputs shared by the benchmarks, so runs compare like with like.

use ncgeom_core::corpus::Corpus;
use ncgeom_core::hopf::TwistSpec;
use ncgeom_core::scalar::rat;
use ncgeom_core::scenario::theta_from_upper;
use ncgeom_core::FunctionExpr;

pub const SEED: u64 = 7;

/// One twist per family on the plane, with a fixed Moyal parameter.
pub fn twists() -> Vec<(&'static str, TwistSpec)> {
    vec![
        ("moyal", TwistSpec::moyal_plane(rat(1, 2))),
        ("jordanian", TwistSpec::jordanian_default(2)),
        ("ext_jordanian", TwistSpec::ext_jordanian_default(2)),
    ]
}

/// Moyal on `R^3` with all three entries set.
pub fn moyal_r3() -> TwistSpec {
    TwistSpec::moyal(theta_from_upper(3, &[rat(1, 2), rat(-1, 3), rat(2, 1)]).expect("three entries"))
}

/// Pairs of cubic polynomials on the plane.
pub fn poly_pairs(n: usize) -> Vec<(FunctionExpr, FunctionExpr)> {
    let mut c = Corpus::new(SEED);
    (0..n).map(|_| (c.poly(2, 3), c.poly(2, 3))).collect()
}
