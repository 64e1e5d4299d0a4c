use ncgeom_core::corpus::Corpus;
use ncgeom_core::hopf::TwistSpec;
use ncgeom_core::identities;
use ncgeom_core::parse::{parse_function, Coordinates};
use ncgeom_core::poisson::PhaseSpace;
use ncgeom_core::scalar::{rat, Rat};
use ncgeom_core::scenario::theta_from_upper;
use ncgeom_core::star::{star_fn, StarContext};
use ncgeom_core::verify;
use ncgeom_core::{FunctionExpr, Gauss, LambdaSeries};
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rat> {
    (-6i64..=6, 1i64..=5).prop_map(|(n, d)| rat(n, d))
}

fn gauss() -> impl Strategy<Value = Gauss> {
    (rational(), rational()).prop_map(|(re, im)| Gauss::new(re, im))
}

/// Sum of up to four monomials on `R^dim`, each optionally times a plane wave.
fn function(dim: usize) -> impl Strategy<Value = FunctionExpr> {
    let term = (gauss(), prop::collection::vec(0u32..=3, dim), prop::option::of(prop::collection::vec(-2i64..=2, dim)));
    prop::collection::vec(term, 1..=4).prop_map(move |terms| {
        terms.iter().fold(FunctionExpr::zero(dim), |acc, (c, e, w)| acc.add(&FunctionExpr::monomial(dim, c.clone(), e, w.as_deref())))
    })
}

fn moyal(t: Rat, order: u32) -> StarContext {
    StarContext::new(&TwistSpec::moyal_plane(t), order).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rendering_parses_back(f in function(3)) {
        let back = parse_function(&f.to_string(), Coordinates::Plain(3)).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn theta_from_upper_is_antisymmetric(upper in prop::collection::vec(rational(), 6)) {
        let t = theta_from_upper(4, &upper).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                prop_assert_eq!(&t[i][j], &-t[j][i].clone());
            }
        }
    }

    #[test]
    fn one_is_a_two_sided_unit(t in rational(), f in function(2)) {
        let ctx = moyal(t, 4);
        let one = FunctionExpr::one(2);
        let expected = LambdaSeries::constant(f.clone(), 4);
        prop_assert_eq!(star_fn(&one, &f, &ctx).unwrap(), expected.clone());
        prop_assert_eq!(star_fn(&f, &one, &ctx).unwrap(), expected);
    }

    #[test]
    fn zeroth_order_is_the_pointwise_product(seed in any::<u64>()) {
        let mut corpus = Corpus::new(seed);
        for twist in verify::family_twists(&mut corpus) {
            let ctx = StarContext::new(&twist.spec, 3).unwrap();
            let (f, g) = (corpus.wave_poly(2, 1, 3), corpus.poly(2, 3));
            let s = star_fn(&f, &g, &ctx).unwrap();
            prop_assert_eq!(s.coeff(0).cloned().unwrap_or_else(|| FunctionExpr::zero(2)), f.mul(&g));
        }
    }

    #[test]
    fn moyal_opposite_product_flips_theta(t in rational(), f in function(2), g in function(2)) {
        let fg = star_fn(&f, &g, &moyal(t.clone(), 4)).unwrap();
        let gf = star_fn(&g, &f, &moyal(-t, 4)).unwrap();
        prop_assert_eq!(fg, gf);
    }

    #[test]
    fn moyal_associative_for_any_theta(t in rational(), f in function(2), g in function(2), h in function(2)) {
        let ctx = moyal(t, 3);
        prop_assert!(identities::associativity(&f, &g, &h, &ctx).is_zero());
        prop_assert!(identities::r_commutativity(&f, &g, &ctx).is_zero());
    }

    #[test]
    fn star_poisson_is_antisymmetric_on_phase_space(t in rational(), seed in any::<u64>()) {
        let theta = theta_from_upper(2, &[t]).unwrap();
        let ps = PhaseSpace::canonical(&theta, 3).unwrap();
        let mut corpus = Corpus::new(seed);
        let (f, g) = (corpus.wave_poly(4, 2, 2), corpus.wave_poly(4, 2, 2));
        prop_assert!(ps.antisymmetry_residual(&f, &g).unwrap().is_zero());
        prop_assert!(ps.explicit_residual(&f, &g).unwrap().is_zero());
    }

    #[test]
    fn mode_star_product_is_associative(seed in any::<u64>()) {
        let mut corpus = Corpus::new(seed);
        for (_, lat) in verify::mode_lattices() {
            let (f, g, h) = (corpus.mode_monomial(&lat, 3), corpus.mode_monomial(&lat, 3), corpus.mode_monomial(&lat, 3));
            let left = f.star(&g, &lat).star(&h, &lat);
            let right = f.star(&g.star(&h, &lat), &lat);
            prop_assert!(left.sub(&right).is_zero());
        }
    }
}
