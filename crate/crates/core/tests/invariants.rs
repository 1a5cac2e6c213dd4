//! Cross-module invariants, checked on random inputs.

use heatindex_core::charclass::{
    a_hat, ch_de_rham, chern_character, Domain, FormMatrix, IdempotentField,
};
use heatindex_core::heat::heat_supertrace;
use heatindex_core::jlo::{jlo_cochain, k_pairing_index, JloQuery};
use heatindex_core::models::{
    flat_torus_dirac, landau_model, monopole_model, spin_projection, FourierData, MatrixFourierData,
};
use heatindex_core::{Generators, MultiVector, SpectralModel};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

fn two_form(g: Generators, coeffs: &[f64]) -> MultiVector {
    let n = g.count();
    let mut out = MultiVector::zero(g);
    let mut c = coeffs.iter();
    for i in 1..=n {
        for j in i + 1..=n {
            if let Some(&v) = c.next() {
                out += &MultiVector::monomial(g, &[i, j], v).unwrap();
            }
        }
    }
    out
}

fn arb_two_form(n: usize) -> impl Strategy<Value = MultiVector> {
    let g = Generators::new(n).unwrap();
    proptest::collection::vec(-2.0f64..2.0, n * (n - 1) / 2).prop_map(move |c| two_form(g, &c))
}

fn model_strategy() -> impl Strategy<Value = SpectralModel> {
    prop_oneof![
        (1i64..=4, any::<bool>())
            .prop_map(|(k, neg)| landau_model(if neg { -k } else { k }, 60).unwrap()),
        (-3i64..=3).prop_map(|q| monopole_model(q, 50).unwrap()),
        (2usize..=6).prop_map(|m| flat_torus_dirac(m).unwrap()),
    ]
}

fn arb_fourier() -> impl Strategy<Value = FourierData> {
    proptest::collection::vec((-2i64..=2, -2i64..=2, -1.0f64..1.0, -1.0f64..1.0), 1..5).prop_map(
        |terms| {
            FourierData::from_terms(
                terms
                    .into_iter()
                    .map(|(a, b, re, im)| ((a, b), Complex64::new(re, im))),
            )
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn a_hat_degrees(t1 in arb_two_form(8), t2 in arb_two_form(8)) {
        let r = FormMatrix::skew_block(t1).unwrap().direct_sum(&FormMatrix::skew_block(t2).unwrap()).unwrap();
        let a = a_hat(&r).unwrap();
        prop_assert_eq!(a.scalar_part(), Complex64::new(1.0, 0.0));
        for d in [1, 2, 3, 5, 6, 7] {
            prop_assert!(a.degree_part(d).unwrap().is_zero());
        }
    }

    #[test]
    fn chern_additive(f1 in proptest::collection::vec(arb_two_form(4), 1..3), f2 in proptest::collection::vec(arb_two_form(4), 1..3)) {
        let g = Generators::FOUR;
        let a = FormMatrix::diagonal(g, f1.clone()).unwrap();
        let b = FormMatrix::diagonal(g, f2.clone()).unwrap();
        let sum = chern_character(&a.direct_sum(&b).unwrap()).unwrap();
        let parts = chern_character(&a).unwrap() + chern_character(&b).unwrap();
        prop_assert!(sum.abs_diff(&parts) < 1e-12);
    }

    #[test]
    fn ch_de_rham_degree_zero_is_rank(a in 0.2f64..2.0, b in 0.2f64..2.0, c in -0.9f64..0.9) {
        let dom = Domain::Torus { n: 16 };
        let e = IdempotentField::from_fn(dom, |[x, y]| {
            let tau = std::f64::consts::TAU;
            let d = [a * (tau * x).sin(), b * (tau * y).sin(), c + (tau * x).cos() + (tau * y).cos()];
            let norm = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt().max(1e-300);
            spin_projection([d[0] / norm, d[1] / norm, d[2] / norm])
        });
        // the map degenerates where d vanishes; those samples are skipped
        prop_assume!(e.is_ok());
        let ch = ch_de_rham(&e.unwrap()).unwrap();
        for v in ch.values() {
            prop_assert!((v.scalar_part() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn spectra_are_symmetric(model in model_strategy()) {
        prop_assert!(model.is_spectrally_symmetric());
    }

    #[test]
    fn jlo_zero_is_supertrace(model in model_strategy(), t in 0.05f64..2.0, c in -2.0f64..2.0) {
        let a0 = MatrixFourierData::scalar(&FourierData::constant(c));
        let v = jlo_cochain(&JloQuery::new(&model, vec![a0], t).unwrap()).unwrap();
        let s = heat_supertrace(&model, t).unwrap();
        prop_assert!((v.value - Complex64::new(c * s.value, 0.0)).norm() <= 1e-12 + v.tail_bound);
    }

    #[test]
    fn jlo_multilinear(a0 in arb_fourier(), x in arb_fourier(), y in arb_fourier(), a2 in arb_fourier(), re in -2.0f64..2.0, im in -2.0f64..2.0) {
        let model = flat_torus_dirac(5).unwrap();
        let t = 0.05;
        let s = |f: &FourierData| MatrixFourierData::scalar(f);
        let eval = |a1: &FourierData| {
            jlo_cochain(&JloQuery::new(&model, vec![s(&a0), s(a1), s(&a2)], t).unwrap()).unwrap().value
        };
        let c = Complex64::new(re, im);
        let combo = x.add(&y.scale(c));
        let lhs = eval(&combo);
        let rhs = eval(&x) + eval(&y) * c;
        prop_assert!((lhs - rhs).norm() <= 1e-10 * (1.0 + rhs.norm()));
    }

    #[test]
    fn trivial_pairing_t_independent(model in model_strategy(), t1 in 0.05f64..2.0, t2 in 0.05f64..2.0) {
        let e = IdempotentField::constant(Domain::Torus { n: 8 }, DMatrix::identity(1, 1)).unwrap();
        let p1 = k_pairing_index(&model, &e, t1, 2).unwrap();
        let p2 = k_pairing_index(&model, &e, t2, 2).unwrap();
        prop_assert!((p1.pairing - p2.pairing).norm() <= 1e-10 + p1.tail_bound + p2.tail_bound);
        prop_assert_eq!(p1.spectral.index, model.zero_mode_index());
    }
}
