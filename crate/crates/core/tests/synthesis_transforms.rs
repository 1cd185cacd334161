use num_complex::Complex64 as C64;
use polar_olct_core::synthesis::{
    synthesize, FourierBesselSpectrum, OrderMap, SpectrumDomain, SynthesisMode,
};
use polar_olct_core::transforms::{
    olct_forward_at, relative_error, PolarFunction, QuadratureConfig,
};
use polar_olct_core::OffsetParams;

fn probe_points(rho_max: f64) -> Vec<(f64, f64)> {
    (0..6)
        .flat_map(|i| (0..5).map(move |q| (rho_max * (i as f64 + 0.5) / 6.0, 0.3 + 1.2 * q as f64)))
        .collect()
}

#[test]
fn transform_of_bandlimited_field_matches_closed_form() {
    let s = FourierBesselSpectrum::tapered(3.0, 2, 6, 3, OrderMap::Identity, 21).unwrap();
    let p = OffsetParams::lct(1.0, 2.0, -0.25, 0.5).unwrap();
    let f = synthesize(&s, &p, SynthesisMode::OlctSpace).unwrap();
    let pts = probe_points(4.0);
    let got = olct_forward_at(&f, &p, &pts, &QuadratureConfig::verified()).unwrap();
    let want: Vec<C64> = pts.iter().map(|&(r, t)| f.transform_closed_form(r, t)).collect();
    let err = relative_error(&got, &want);
    assert!(err < 1e-8, "relative error {err:e}, extent {}", f.radial_extent());
}

#[test]
fn transform_of_space_limited_field_matches_closed_form() {
    let s = FourierBesselSpectrum::tapered(2.5, 1, 5, 3, OrderMap::Identity, 4)
        .unwrap()
        .with_domain(SpectrumDomain::Field);
    let p = OffsetParams::lct(0.5, 1.2, -0.5, 0.8).unwrap();
    let f = synthesize(&s, &p, SynthesisMode::OlctSpace).unwrap();
    assert_eq!(f.radial_extent(), 2.5);
    let pts = probe_points(10.0);
    let got = olct_forward_at(&f, &p, &pts, &QuadratureConfig::verified()).unwrap();
    let want: Vec<C64> = pts.iter().map(|&(r, t)| f.transform_closed_form(r, t)).collect();
    let err = relative_error(&got, &want);
    assert!(err < 1e-8, "relative error {err:e}");
}
