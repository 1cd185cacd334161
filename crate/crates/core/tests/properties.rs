use std::f64::consts::TAU;

use num_complex::Complex64 as C64;
use proptest::prelude::*;

use polar_olct_core::bessel::{bessel_j, bessel_zero, default_lambda_truncation, lambda_sum, BesselOrder};
use polar_olct_core::sampling::{sample_count, stark_interpolate, stark_kernel, theta_kernel, GridMode};
use polar_olct_core::synthesis::{lommel_kernel, synthesize, FourierBesselSpectrum, OrderMap, SynthesisMode};
use polar_olct_core::OffsetParams;

fn unimodular_params() -> impl Strategy<Value = OffsetParams> {
    (-2.0..2.0f64, 0.3..3.0f64, -2.0..2.0f64, prop::array::uniform4(-1.0..1.0f64)).prop_map(|(a, b, d, o)| {
        let c = (a * d - 1.0) / b;
        OffsetParams::new(a, b, c, d, [o[0], o[1]], [o[2], o[3]]).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn stark_partition_of_unity(theta in -20.0..20.0f64, k in 0usize..8) {
        let s: f64 = (0..2 * k + 1).map(|l| stark_kernel(theta, l, k)).sum();
        prop_assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn stark_exact_on_trig_polynomials(
        k in 0usize..6,
        coeffs in prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 11),
        theta in 0.0..TAU,
    ) {
        let m = 2 * k + 1;
        let poly = |t: f64| -> C64 {
            (0..m).map(|i| C64::new(coeffs[i].0, coeffs[i].1) * C64::from_polar(1.0, (i as f64 - k as f64) * t)).sum()
        };
        let nodes: Vec<C64> = (0..m).map(|l| poly(TAU * l as f64 / m as f64)).collect();
        prop_assert!((stark_interpolate(&nodes, theta, k).unwrap() - poly(theta)).norm() < 1e-12);
    }

    #[test]
    fn bessel_three_term_recurrence(v in 1.0..20.0f64, x in 0.1..80.0f64) {
        let j = |o: f64| bessel_j(BesselOrder::new(o).unwrap(), x).unwrap();
        let lhs = j(v - 1.0) + j(v + 1.0);
        let rhs = 2.0 * v / x * j(v);
        prop_assert!((lhs - rhs).abs() < 1e-11 * (1.0 + rhs.abs()));
    }

    #[test]
    fn zeros_are_roots_and_increasing(v in 0.0..10.0f64, j in 1usize..30) {
        let o = BesselOrder::new(v).unwrap();
        let z = bessel_zero(o, j).unwrap();
        let z_next = bessel_zero(o, j + 1).unwrap();
        prop_assert!(bessel_j(o, z).unwrap().abs() < 1e-12);
        prop_assert!(z_next > z + 2.0);
    }

    #[test]
    fn lambda_is_one(x in 0.0..60.0f64) {
        prop_assert!((lambda_sum(x, default_lambda_truncation(x)) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn derived_scalars_are_unimodular(p in unimodular_params()) {
        for z in [p.ell1(), p.ell2(), p.sigma()] {
            prop_assert!((z.norm() - 1.0).abs() < 1e-12);
        }
        let inv = p.inverse();
        prop_assert!((inv.det() - 1.0).abs() < 1e-9);
        let (a, b, c, d) = inv.matrix_inverse();
        prop_assert_eq!((a, b, c, d), (p.a(), p.b(), p.c(), p.d()));
    }

    #[test]
    fn theta_kernel_is_kronecker_without_offsets(j in 1usize..12, jp in 1usize..12, v in 0u32..6, b in 0.5..2.0f64) {
        let p = OffsetParams::lct(0.0, b, -1.0 / b, 0.0).unwrap();
        let o = BesselOrder::integer(v);
        let omega = 2.0;
        let z = bessel_zero(o, j).unwrap();
        let r = b * bessel_zero(o, jp).unwrap() / omega;
        let th = theta_kernel(r, b * z / omega, z, o, &p, omega).unwrap();
        let want = if j == jp { 1.0 } else { 0.0 };
        prop_assert!((th - want).abs() < 1e-12);
    }

    #[test]
    fn lommel_kernel_is_symmetric_on_zeros(i in 1usize..10, j in 1usize..10, c in 0.5..3.0f64) {
        let o = BesselOrder::integer(2);
        let (ai, aj) = (bessel_zero(o, i).unwrap() / c, bessel_zero(o, j).unwrap() / c);
        let lij = lommel_kernel(ai, aj, c, o).unwrap();
        let lji = lommel_kernel(aj, ai, c, o).unwrap();
        prop_assert!((lij - lji).abs() < 1e-12);
    }

    #[test]
    fn count_ratio(k in 0usize..6, n in 1usize..60) {
        let c1 = sample_count(k, n, &GridMode::Theorem1);
        let c2 = sample_count(k, n, &GridMode::Theorem2(BesselOrder::integer(0)));
        prop_assert_eq!(c1, c2 * (2 * k as u64 + 1));
    }

    #[test]
    fn spectrum_csv_round_trip(seed in any::<u64>(), k in 0usize..3, j in 1usize..5) {
        let s = FourierBesselSpectrum::random(2.0, k, j, OrderMap::Identity, seed).unwrap();
        let back = FourierBesselSpectrum::from_csv(&s.to_csv()).unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn synthesis_is_deterministic(seed in any::<u64>(), r in 0.0..10.0f64, t in 0.0..TAU) {
        let p = OffsetParams::lct(1.0, 2.0, -0.25, 0.5).unwrap();
        let f1 = synthesize(&FourierBesselSpectrum::random(2.0, 1, 2, OrderMap::Identity, seed).unwrap(), &p, SynthesisMode::OlctSpace).unwrap();
        let f2 = synthesize(&FourierBesselSpectrum::random(2.0, 1, 2, OrderMap::Identity, seed).unwrap(), &p, SynthesisMode::OlctSpace).unwrap();
        prop_assert_eq!(f1.evaluate(r, t), f2.evaluate(r, t));
    }
}
