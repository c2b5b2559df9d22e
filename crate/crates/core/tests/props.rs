//! Property-based invariants over randomized inputs.

use proptest::prelude::*;

use casas_core::coeff::{Field, PrimeField, Rationals};
use casas_core::poly::{
    hasse_derivation_multi, phi_endo, resultant, swap_endo, to_unipoly, Monomial, MultiPoly,
    Ring, UniPoly,
};

const NVARS: usize = 3;

fn arb_poly_q() -> impl Strategy<Value = MultiPoly<Rationals>> {
    let term = (prop::collection::vec(0u32..3, NVARS), -4i64..=4);
    prop::collection::vec(term, 0..6).prop_map(|terms| {
        let ring = Ring::new(NVARS, Rationals);
        MultiPoly::from_terms(
            &ring,
            terms
                .into_iter()
                .map(|(e, c)| (Monomial::new(e), Rationals.from_i64(c)))
                .collect(),
        )
    })
}

fn arb_poly_f7() -> impl Strategy<Value = MultiPoly<PrimeField>> {
    let term = (prop::collection::vec(0u32..3, NVARS), 0u64..7);
    prop::collection::vec(term, 0..6).prop_map(|terms| {
        let f7 = PrimeField::new(7).unwrap();
        let ring = Ring::new(NVARS, f7);
        MultiPoly::from_terms(
            &ring,
            terms.into_iter().map(|(e, c)| (Monomial::new(e), c)).collect(),
        )
    })
}

fn arb_unipoly_f11(max_deg: usize) -> impl Strategy<Value = UniPoly<PrimeField>> {
    prop::collection::vec(0u64..11, 1..=max_deg + 1).prop_map(|coeffs| {
        let f11 = PrimeField::new(11).unwrap();
        UniPoly::new(&f11, coeffs)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms_over_q(a in arb_poly_q(), b in arb_poly_q(), c in arb_poly_q()) {
        let ab_c = a.add(&b).unwrap().add(&c).unwrap();
        let a_bc = a.add(&b.add(&c).unwrap()).unwrap();
        prop_assert_eq!(&ab_c, &a_bc);
        let left = a.mul(&b.add(&c).unwrap()).unwrap();
        let right = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(&left, &right);
        let comm = a.mul(&b).unwrap();
        prop_assert_eq!(&comm, &b.mul(&a).unwrap());
    }

    #[test]
    fn endomorphisms_are_multiplicative(f in arb_poly_f7(), g in arb_poly_f7(), j in 1usize..=4) {
        let ring = f.ring().clone();
        let endo = if j <= NVARS + 1 {
            phi_endo(&ring, j).unwrap()
        } else {
            swap_endo(&ring, 1, NVARS).unwrap()
        };
        let prod = endo.apply(&f.mul(&g).unwrap()).unwrap();
        let split = endo.apply(&f).unwrap().mul(&endo.apply(&g).unwrap()).unwrap();
        prop_assert_eq!(&prod, &split);
        let sum = endo.apply(&f.add(&g).unwrap()).unwrap();
        let split_sum = endo.apply(&f).unwrap().add(&endo.apply(&g).unwrap()).unwrap();
        prop_assert_eq!(&sum, &split_sum);
    }

    #[test]
    fn parse_render_round_trip_q(f in arb_poly_q()) {
        let ring = f.ring().clone();
        let back = MultiPoly::parse(&ring, &f.render()).unwrap();
        prop_assert_eq!(&back, &f);
    }

    #[test]
    fn parse_render_round_trip_f7(f in arb_poly_f7()) {
        let ring = f.ring().clone();
        let back = MultiPoly::parse(&ring, &f.render()).unwrap();
        prop_assert_eq!(&back, &f);
    }

    #[test]
    fn resultant_vanishes_iff_gcd_nontrivial(
        f in arb_unipoly_f11(5),
        g in arb_unipoly_f11(5),
    ) {
        prop_assume!(!f.is_zero() && !g.is_zero());
        let f11 = *f.field();
        let res = resultant(&f, &g).unwrap();
        let gcd = f.gcd(&g).unwrap();
        let nontrivial = gcd.degree().is_some_and(|d| d >= 1);
        prop_assert_eq!(f11.is_zero(&res), nontrivial);
    }

    #[test]
    fn univariate_hasse_matches_multivariate(coeffs in prop::collection::vec(-4i64..=4, 1..7), i in 0u32..6) {
        let q = Rationals;
        let ring = Ring::new(1, q);
        let uni = UniPoly::new(&q, coeffs.iter().map(|&c| q.from_i64(c)).collect());
        let multi = casas_core::poly::from_unipoly(&ring, &uni).unwrap();
        let lhs = uni.hasse_derivative(i);
        let rhs = to_unipoly(&hasse_derivation_multi(&multi, i)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn hasse_is_linear(f in arb_poly_f7(), g in arb_poly_f7(), i in 0u32..4) {
        let lhs = hasse_derivation_multi(&f.add(&g).unwrap(), i);
        let rhs = hasse_derivation_multi(&f, i)
            .add(&hasse_derivation_multi(&g, i))
            .unwrap();
        prop_assert_eq!(lhs, rhs);
    }
}
