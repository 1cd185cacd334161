//! Forward and inverse polar OLCT/OLCHT by quadrature, the Fourier-transform
//! route used as an independent oracle, azimuthal Fourier coefficients and the
//! Fourier-series assembly of the OLCT from per-order OLCHTs.
//!
//! The 2D forward transform on a polar output grid evaluates the azimuthal
//! trapezoid sum as a circular correlation, computed with FFTs. This is the
//! same discrete sum as the pointwise route, only cheaper.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use crate::bessel::{bessel_j, bessel_jn, bessel_jn_all, BesselOrder};
use crate::error::{Error, Result};
use crate::params::OffsetParams;
use crate::quadrature::{periodic_nodes, GaussLegendre};

/// A complex field on the plane in polar coordinates.
pub trait PolarFunction: Sync {
    fn eval(&self, r: f64, theta: f64) -> C64;

    /// Values on the ring of radius `r`; override when per-radius work can be shared.
    fn eval_ring(&self, r: f64, thetas: &[f64], out: &mut [C64]) {
        for (o, &t) in out.iter_mut().zip(thetas) {
            *o = self.eval(r, t);
        }
    }

    /// Radius beyond which the field is negligible.
    fn radial_extent(&self) -> f64;

    /// `γ` when the field carries a chirp `e^{iγr²}`; used only to size quadratures.
    fn chirp_rate(&self) -> f64 {
        0.0
    }

    /// Highest azimuthal order present.
    fn angular_bandwidth(&self) -> usize {
        0
    }

    /// Radial wavenumber of the field apart from its chirp.
    fn radial_wavenumber(&self) -> f64 {
        0.0
    }
}

/// Adapts a closure into a [`PolarFunction`].
pub struct FnField<F> {
    f: F,
    extent: f64,
    bandwidth: usize,
    wavenumber: f64,
}

impl<F: Fn(f64, f64) -> C64 + Sync> FnField<F> {
    pub fn new(extent: f64, f: F) -> Self {
        Self {
            f,
            extent,
            bandwidth: 0,
            wavenumber: 0.0,
        }
    }

    pub fn with_bandwidth(mut self, angular: usize, radial_wavenumber: f64) -> Self {
        self.bandwidth = angular;
        self.wavenumber = radial_wavenumber;
        self
    }
}

impl<F: Fn(f64, f64) -> C64 + Sync> PolarFunction for FnField<F> {
    fn eval(&self, r: f64, theta: f64) -> C64 {
        (self.f)(r, theta)
    }
    fn radial_extent(&self) -> f64 {
        self.extent
    }
    fn angular_bandwidth(&self) -> usize {
        self.bandwidth
    }
    fn radial_wavenumber(&self) -> f64 {
        self.wavenumber
    }
}

/// Which constant phases the transforms use.
///
/// `Consistent` uses the harmonic factor `(-i)^v` that the Jacobi–Anger
/// expansion of the kernel produces and the exact inverses. `AsPrinted` keeps
/// the `i^v` factor and inverse constants of the original formulas, under which
/// round trips pick up a unimodular constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Convention {
    #[default]
    Consistent,
    AsPrinted,
}

/// Treatment of the offset factors in the Hankel-type transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KernelMode {
    /// λ₁ = λ₂ = 1 and no per-m phase.
    #[default]
    Reduced,
    /// Per-m expansion with order-(v+m) Bessel terms, truncated at `|m| ≤ m_max`
    /// (default from [`default_m_truncation`]).
    Strict { m_max: Option<usize> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OlchtOptions {
    pub kernel: KernelMode,
    pub convention: Convention,
}

/// Order of a Hankel-type transform. Integer orders may be negative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HankelOrder {
    Int(i32),
    Real(BesselOrder),
}

impl HankelOrder {
    pub fn new(v: f64) -> Result<Self> {
        let o = BesselOrder::new(v)?;
        Ok(o.into())
    }

    pub fn value(self) -> f64 {
        match self {
            HankelOrder::Int(n) => n as f64,
            HankelOrder::Real(o) => o.value(),
        }
    }

    pub fn j(self, x: f64) -> f64 {
        match self {
            HankelOrder::Int(n) => bessel_jn(n, x),
            HankelOrder::Real(o) => bessel_j(o, x).unwrap_or(f64::NAN),
        }
    }

    fn shifted(self, m: i32) -> Result<HankelOrder> {
        match self {
            HankelOrder::Int(n) => Ok(HankelOrder::Int(n + m)),
            HankelOrder::Real(o) if m == 0 => Ok(HankelOrder::Real(o)),
            HankelOrder::Real(o) => Err(Error::Domain(format!(
                "strict kernel mode needs an integer order, got {}",
                o.value()
            ))),
        }
    }
}

impl From<BesselOrder> for HankelOrder {
    fn from(o: BesselOrder) -> Self {
        match o.as_integer() {
            Some(n) => HankelOrder::Int(n),
            None => HankelOrder::Real(o),
        }
    }
}

impl From<i32> for HankelOrder {
    fn from(n: i32) -> Self {
        HankelOrder::Int(n)
    }
}

/// `(s·i)^v` for `s = ±1`, exact for integer `v`.
pub fn i_power(v: f64, s: f64) -> C64 {
    if v.fract() == 0.0 {
        let k = (v as i64).rem_euclid(4);
        let z = [C64::new(1.0, 0.0), C64::new(0.0, 1.0), C64::new(-1.0, 0.0), C64::new(0.0, -1.0)]
            [k as usize];
        if s < 0.0 {
            z.conj()
        } else {
            z
        }
    } else {
        C64::from_polar(1.0, s * v * PI / 2.0)
    }
}

impl Convention {
    /// Harmonic factor of the forward transform.
    pub fn forward_phase(self, v: f64) -> C64 {
        match self {
            Convention::Consistent => i_power(v, -1.0),
            Convention::AsPrinted => i_power(v, 1.0),
        }
    }

    /// Constant factor (including the harmonic factor) of the inverse OLCHT.
    pub fn inverse_constant(self, v: f64, params: &OffsetParams) -> C64 {
        match self {
            Convention::Consistent => i_power(v, 1.0) * params.ell1().conj(),
            Convention::AsPrinted => i_power(v, 1.0) * params.ell2(),
        }
    }
}

/// Default m-sum truncation `⌈max(μ₁, μ₂)·radius/b⌉ + 20`, or 0 without offsets.
pub fn default_m_truncation(params: &OffsetParams, radius: f64) -> usize {
    if params.is_centered() {
        0
    } else {
        (params.mu1().max(params.mu2()) * radius / params.b()).ceil() as usize + 20
    }
}

/// Node counts and acceptance tolerance for the 2D quadratures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    pub radial_nodes: Option<usize>,
    pub angular_nodes: Option<usize>,
    pub r_max: Option<f64>,
    /// Repeat with doubled nodes and fail if the results disagree.
    pub verify: bool,
    pub tolerance: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            radial_nodes: None,
            angular_nodes: None,
            r_max: None,
            verify: false,
            tolerance: 1e-6,
        }
    }
}

impl QuadratureConfig {
    pub fn verified() -> Self {
        Self {
            verify: true,
            ..Self::default()
        }
    }
}

/// Polar output grid: strictly increasing radii, `azimuths` uniform angles `2πq/azimuths`.
/// Radii built by [`PolarGrid::quadrature`] carry Gauss–Legendre weights so a
/// spectrum on this grid can be integrated by the inverse transform.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarGrid {
    radii: Vec<f64>,
    weights: Option<Vec<f64>>,
    azimuths: usize,
}

impl PolarGrid {
    pub fn new(radii: Vec<f64>, azimuths: usize) -> Result<Self> {
        if azimuths == 0 {
            return Err(Error::GridMismatch("azimuth count must be positive".into()));
        }
        if radii.windows(2).any(|w| !(w[0] < w[1])) || radii.iter().any(|r| !(*r >= 0.0)) {
            return Err(Error::GridMismatch(
                "radii must be nonnegative and strictly increasing".into(),
            ));
        }
        Ok(Self {
            radii,
            weights: None,
            azimuths,
        })
    }

    /// `count` radii evenly spaced on `(0, extent]`.
    pub fn uniform(extent: f64, count: usize, azimuths: usize) -> Result<Self> {
        let radii = (1..=count)
            .map(|i| extent * i as f64 / count as f64)
            .collect();
        Self::new(radii, azimuths)
    }

    /// Gauss–Legendre radii on `[0, extent]`.
    pub fn quadrature(extent: f64, radial_nodes: usize, azimuths: usize) -> Result<Self> {
        let (radii, weights) = GaussLegendre::new(radial_nodes).on_interval(0.0, extent);
        let mut g = Self::new(radii, azimuths)?;
        g.weights = Some(weights);
        Ok(g)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn weights(&self) -> Option<&[f64]> {
        self.weights.as_deref()
    }

    pub fn azimuths(&self) -> usize {
        self.azimuths
    }

    pub fn phi(&self, q: usize) -> f64 {
        2.0 * PI * q as f64 / self.azimuths as f64
    }

    pub fn len(&self) -> usize {
        self.radii.len() * self.azimuths
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid points `(ρ, φ)` in storage order (radius-major).
    pub fn points(&self) -> Vec<(f64, f64)> {
        let mut out = Vec::with_capacity(self.len());
        for &r in &self.radii {
            for q in 0..self.azimuths {
                out.push((r, self.phi(q)));
            }
        }
        out
    }
}

/// Transform values on a [`PolarGrid`], stored radius-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumField {
    grid: PolarGrid,
    values: Vec<C64>,
    params: OffsetParams,
}

impl SpectrumField {
    pub fn new(grid: PolarGrid, values: Vec<C64>, params: OffsetParams) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self {
            grid,
            values,
            params,
        })
    }

    pub fn grid(&self) -> &PolarGrid {
        &self.grid
    }
    pub fn values(&self) -> &[C64] {
        &self.values
    }
    pub fn params(&self) -> &OffsetParams {
        &self.params
    }
    pub fn get(&self, radial: usize, azimuth: usize) -> C64 {
        self.values[radial * self.grid.azimuths + azimuth]
    }
    /// All azimuths at one radius.
    pub fn row(&self, radial: usize) -> &[C64] {
        let n = self.grid.azimuths;
        &self.values[radial * n..(radial + 1) * n]
    }
}

/// Max `|x - y|` over max `|y|`.
pub fn relative_error(x: &[C64], reference: &[C64]) -> f64 {
    let num = x
        .iter()
        .zip(reference)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let den = reference.iter().map(|b| b.norm()).fold(0.0, f64::max);
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

// ---------------------------------------------------------------------------
// 2D engine

/// Kernel `norm · e^{i[a r²/2b − rρcos(θ−φ)/b + dρ²/2b + τ·x/b − s·u/b]}`.
#[derive(Debug, Clone, Copy)]
struct Kernel2d {
    a: f64,
    b: f64,
    d: f64,
    tau: [f64; 2],
    s: [f64; 2],
    norm: C64,
}

impl Kernel2d {
    fn forward(p: &OffsetParams) -> Self {
        let tau = p.tau();
        let eta = p.eta();
        Self {
            a: p.a(),
            b: p.b(),
            d: p.d(),
            tau,
            s: [p.d() * tau[0] - p.b() * eta[0], p.d() * tau[1] - p.b() * eta[1]],
            norm: p.ell1() / (2.0 * PI * p.b()),
        }
    }

    fn inverse(p: &OffsetParams, convention: Convention) -> Self {
        let inv = p.inverse();
        let s = [
            inv.d * inv.xi[0] - inv.b * inv.gamma[0],
            inv.d * inv.xi[1] - inv.b * inv.gamma[1],
        ];
        let xi2 = inv.xi[0].powi(2) + inv.xi[1].powi(2);
        let norm = match convention {
            Convention::Consistent => p.ell1().conj() / (2.0 * PI * p.b()),
            Convention::AsPrinted => C64::from_polar(1.0, inv.d * xi2 / inv.b) / (2.0 * PI * inv.b),
        };
        Self {
            a: inv.a,
            b: inv.b,
            d: inv.d,
            tau: inv.xi,
            s,
            norm,
        }
    }

    fn input_phase(&self, r: f64, theta: f64) -> C64 {
        let (st, ct) = theta.sin_cos();
        let ph = self.a * r * r / (2.0 * self.b) + r * (self.tau[0] * ct + self.tau[1] * st) / self.b;
        C64::from_polar(1.0, ph)
    }

    fn output_phase(&self, rho: f64, phi: f64) -> C64 {
        let (sp, cp) = phi.sin_cos();
        let ph = self.d * rho * rho / (2.0 * self.b) - rho * (self.s[0] * cp + self.s[1] * sp) / self.b;
        self.norm * C64::from_polar(1.0, ph)
    }
}

/// Weighted input samples on a ring grid, already multiplied by the input
/// chirp: `g[k][t] = w_k r_k (2π/N) f(r_k, θ_t) e^{i[a r²/2b + τ·x/b]}`.
struct Weighted {
    radii: Vec<f64>,
    n_theta: usize,
    g: Vec<C64>,
}

fn weigh<F>(kernel: &Kernel2d, radii: &[f64], weights: &[f64], n_theta: usize, sample: F) -> Weighted
where
    F: Fn(f64, &[f64], &mut [C64]) + Sync,
{
    let thetas = periodic_nodes(n_theta);
    let h = 2.0 * PI / n_theta as f64;
    let mut g = vec![C64::new(0.0, 0.0); radii.len() * n_theta];
    g.par_chunks_mut(n_theta)
        .enumerate()
        .for_each(|(k, row)| {
            let r = radii[k];
            sample(r, &thetas, row);
            let w = weights[k] * r * h;
            for (t, v) in row.iter_mut().enumerate() {
                *v *= w * kernel.input_phase(r, thetas[t]);
            }
        });
    Weighted {
        radii: radii.to_vec(),
        n_theta,
        g,
    }
}

fn apply_points(kernel: &Kernel2d, input: &Weighted, points: &[(f64, f64)]) -> Vec<C64> {
    let n = input.n_theta;
    let cos_t: Vec<f64> = periodic_nodes(n).iter().map(|t| t.cos()).collect();
    let sin_t: Vec<f64> = periodic_nodes(n).iter().map(|t| t.sin()).collect();
    points
        .par_iter()
        .map(|&(rho, phi)| {
            let (sp, cp) = phi.sin_cos();
            let mut total = C64::new(0.0, 0.0);
            for (k, &r) in input.radii.iter().enumerate() {
                let row = &input.g[k * n..(k + 1) * n];
                let q = -r * rho / kernel.b;
                let mut acc = C64::new(0.0, 0.0);
                for t in 0..n {
                    // cos(θ − φ) = cosθ cosφ + sinθ sinφ
                    let c = cos_t[t] * cp + sin_t[t] * sp;
                    acc += row[t] * C64::from_polar(1.0, q * c);
                }
                total += acc;
            }
            kernel.output_phase(rho, phi) * total
        })
        .collect()
}

fn apply_grid(kernel: &Kernel2d, input: &Weighted, grid: &PolarGrid) -> Result<Vec<C64>> {
    let n = input.n_theta;
    let m = grid.azimuths();
    if !n.is_multiple_of(m) {
        return Err(Error::GridMismatch(format!(
            "angular nodes {n} not a multiple of output azimuths {m}"
        )));
    }
    let stride = n / m;
    let mut planner = FftPlanner::<f64>::new();
    let fwd: Arc<dyn Fft<f64>> = planner.plan_fft_forward(n);
    let inv: Arc<dyn Fft<f64>> = planner.plan_fft_inverse(n);
    let mut spectra = input.g.clone();
    for row in spectra.chunks_mut(n) {
        fwd.process(row);
    }
    let cos_t: Vec<f64> = periodic_nodes(n).iter().map(|t| t.cos()).collect();
    let rows: Vec<Vec<C64>> = grid
        .radii()
        .par_iter()
        .map(|&rho| {
            let mut acc = vec![C64::new(0.0, 0.0); n];
            let mut e = vec![C64::new(0.0, 0.0); n];
            let mut scratch = vec![C64::new(0.0, 0.0); fwd.get_inplace_scratch_len()];
            for (k, &r) in input.radii.iter().enumerate() {
                let q = -r * rho / kernel.b;
                for t in 0..=n / 2 {
                    let v = C64::from_polar(1.0, q * cos_t[t]);
                    e[t] = v;
                    if t > 0 {
                        e[n - t] = v;
                    }
                }
                fwd.process_with_scratch(&mut e, &mut scratch);
                let gk = &spectra[k * n..(k + 1) * n];
                for j in 0..n {
                    acc[j] += gk[j] * e[j];
                }
            }
            let mut scratch = vec![C64::new(0.0, 0.0); inv.get_inplace_scratch_len()];
            inv.process_with_scratch(&mut acc, &mut scratch);
            (0..m)
                .map(|qi| kernel.output_phase(rho, grid.phi(qi)) * acc[qi * stride] / n as f64)
                .collect()
        })
        .collect();
    Ok(rows.concat())
}

struct NodePlan {
    r_max: f64,
    radial: usize,
    angular: usize,
}

fn plan_nodes(
    field: &dyn PolarFunction,
    kernel: &Kernel2d,
    rho_max: f64,
    cfg: &QuadratureConfig,
    azimuths: usize,
) -> NodePlan {
    let r_max = cfg.r_max.unwrap_or_else(|| field.radial_extent());
    let b = kernel.b.abs();
    let mu1 = kernel.tau[0].hypot(kernel.tau[1]);
    let chirp = (kernel.a / (2.0 * kernel.b) + field.chirp_rate()).abs();
    let phase = chirp * r_max * r_max
        + r_max * (rho_max + mu1) / b
        + r_max * field.radial_wavenumber();
    let radial = cfg
        .radial_nodes
        .unwrap_or_else(|| 256usize.max((8.0 * phase / PI).ceil() as usize));
    let band = field.angular_bandwidth() as f64 + r_max * (rho_max + mu1) / b;
    let angular = cfg.angular_nodes.unwrap_or_else(|| {
        let want = 512usize.max((1.25 * band + 12.0 * band.cbrt() + 32.0).ceil() as usize);
        let p2 = want.next_power_of_two();
        if p2.is_multiple_of(azimuths) {
            p2
        } else {
            want.div_ceil(azimuths) * azimuths
        }
    });
    NodePlan {
        r_max,
        radial,
        angular,
    }
}

fn sample_field(field: &dyn PolarFunction) -> impl Fn(f64, &[f64], &mut [C64]) + Sync + '_ {
    move |r, thetas, out| field.eval_ring(r, thetas, out)
}

fn forward_with(
    field: &dyn PolarFunction,
    kernel: &Kernel2d,
    plan: &NodePlan,
    target: &Target<'_>,
) -> Result<Vec<C64>> {
    let (radii, weights) = GaussLegendre::new(plan.radial).on_interval(0.0, plan.r_max);
    let input = weigh(kernel, &radii, &weights, plan.angular, sample_field(field));
    match target {
        Target::Grid(g) => apply_grid(kernel, &input, g),
        Target::Points(p) => Ok(apply_points(kernel, &input, p)),
    }
}

enum Target<'a> {
    Grid(&'a PolarGrid),
    Points(&'a [(f64, f64)]),
}

fn check_doubled(coarse: &[C64], fine: &[C64], tolerance: f64) -> Result<()> {
    let scale = fine.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut worst = (0.0, 0usize);
    for (i, (c, f)) in coarse.iter().zip(fine).enumerate() {
        let d = (c - f).norm();
        if d > worst.0 {
            worst = (d, i);
        }
    }
    let relative = if scale > 0.0 { worst.0 / scale } else { worst.0 };
    if relative > 10.0 * tolerance {
        return Err(Error::AccuracyFailure {
            coarse: coarse[worst.1].norm(),
            fine: fine[worst.1].norm(),
            relative,
        });
    }
    Ok(())
}

fn run_forward(
    field: &dyn PolarFunction,
    params: &OffsetParams,
    target: Target<'_>,
    cfg: &QuadratureConfig,
) -> Result<Vec<C64>> {
    let kernel = Kernel2d::forward(params);
    let (rho_max, azimuths) = match &target {
        Target::Grid(g) => (g.radii().last().copied().unwrap_or(0.0), g.azimuths()),
        Target::Points(p) => (p.iter().map(|x| x.0).fold(0.0, f64::max), 1),
    };
    let plan = plan_nodes(field, &kernel, rho_max, cfg, azimuths);
    let base = forward_with(field, &kernel, &plan, &target)?;
    if !cfg.verify {
        return Ok(base);
    }
    let doubled = NodePlan {
        r_max: plan.r_max,
        radial: 2 * plan.radial,
        angular: 2 * plan.angular,
    };
    let fine = forward_with(field, &kernel, &doubled, &target)?;
    check_doubled(&base, &fine, cfg.tolerance)?;
    Ok(fine)
}

/// Forward polar OLCT on a polar output grid by Gauss–Legendre × trapezoid quadrature.
pub fn olct_forward(
    field: &dyn PolarFunction,
    params: &OffsetParams,
    grid: &PolarGrid,
    cfg: &QuadratureConfig,
) -> Result<SpectrumField> {
    let values = run_forward(field, params, Target::Grid(grid), cfg)?;
    SpectrumField::new(grid.clone(), values, *params)
}

/// Forward polar OLCT at arbitrary `(ρ, φ)` points.
pub fn olct_forward_at(
    field: &dyn PolarFunction,
    params: &OffsetParams,
    points: &[(f64, f64)],
    cfg: &QuadratureConfig,
) -> Result<Vec<C64>> {
    run_forward(field, params, Target::Points(points), cfg)
}

/// Inverse polar OLCT evaluated at `(r, θ)` points.
///
/// The spectrum must live on a quadrature grid ([`PolarGrid::quadrature`])
/// that covers its support.
pub fn olct_inverse(
    spectrum: &SpectrumField,
    points: &[(f64, f64)],
    convention: Convention,
) -> Result<Vec<C64>> {
    let grid = spectrum.grid();
    let weights = grid.weights().ok_or_else(|| {
        Error::GridMismatch("inverse transform needs a quadrature grid with weights".into())
    })?;
    let kernel = Kernel2d::inverse(spectrum.params(), convention);
    let n = grid.azimuths();
    let values = spectrum.values();
    let input = weigh(&kernel, grid.radii(), weights, n, |r, _, out| {
        let k = grid.radii().partition_point(|x| *x < r);
        out.copy_from_slice(&values[k * n..(k + 1) * n]);
    });
    Ok(apply_points(&kernel, &input, points))
}

/// The OLCT through the 2D Fourier transform of the chirped, modulated field,
/// with the Fourier transform computed from the field's azimuthal harmonics and
/// Bessel functions. Independent of [`olct_forward`] apart from the field.
pub fn olct_via_ft(
    field: &dyn PolarFunction,
    params: &OffsetParams,
    grid: &PolarGrid,
    cfg: &QuadratureConfig,
) -> Result<SpectrumField> {
    let b = params.b();
    let rho_max = grid.radii().last().copied().unwrap_or(0.0);
    let kernel = Kernel2d::forward(params);
    let plan = plan_nodes(field, &kernel, rho_max, cfg, 1);
    // deliberately different radial nodes from the direct route
    let radial = cfg
        .radial_nodes
        .map(|n| n + n / 3 + 1)
        .unwrap_or(plan.radial + plan.radial / 3 + 1);
    let r_max = plan.r_max;
    let mu1 = params.mu1();
    let harm = r_max * mu1 / b;
    let n_max = field.angular_bandwidth() + (harm + 12.0 * harm.cbrt() + 20.0).ceil() as usize;
    let n_theta = (2 * n_max + 1).max(64).next_power_of_two() * 2;
    let thetas = periodic_nodes(n_theta);
    let (radii, weights) = GaussLegendre::new(radial).on_interval(0.0, r_max);

    // f̃_n(r_k) for |n| ≤ n_max via FFT over θ
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n_theta);
    let harmonics: Vec<Vec<C64>> = radii
        .par_iter()
        .map(|&r| {
            let mut row = vec![C64::new(0.0, 0.0); n_theta];
            field.eval_ring(r, &thetas, &mut row);
            for (t, v) in row.iter_mut().enumerate() {
                let (st, ct) = thetas[t].sin_cos();
                let tau = params.tau();
                let ph = params.a() * r * r / (2.0 * b) + r * (tau[0] * ct + tau[1] * st) / b;
                *v *= C64::from_polar(1.0, ph);
            }
            fft.process(&mut row);
            let scale = 1.0 / n_theta as f64;
            // index n ↦ n (n ≥ 0) and n_theta + n (n < 0)
            let mut h = vec![C64::new(0.0, 0.0); 2 * n_max + 1];
            for n in -(n_max as i64)..=(n_max as i64) {
                let idx = n.rem_euclid(n_theta as i64) as usize;
                h[(n + n_max as i64) as usize] = row[idx] * scale;
            }
            h
        })
        .collect();

    let m = grid.azimuths();
    let rows: Vec<Vec<C64>> = grid
        .radii()
        .par_iter()
        .map(|&rho| {
            let k = rho / b;
            // A_n = ∫ f̃_n(r) J_n(kr) r dr
            let mut a = vec![C64::new(0.0, 0.0); 2 * n_max + 1];
            for (i, &r) in radii.iter().enumerate() {
                let j = bessel_jn_all(n_max, k * r);
                let w = weights[i] * r;
                let h = &harmonics[i];
                for n in -(n_max as i64)..=(n_max as i64) {
                    let jn = if n >= 0 {
                        j[n as usize]
                    } else if n % 2 == 0 {
                        j[(-n) as usize]
                    } else {
                        -j[(-n) as usize]
                    };
                    let idx = (n + n_max as i64) as usize;
                    a[idx] += h[idx] * (w * jn);
                }
            }
            (0..m)
                .map(|q| {
                    let phi = grid.phi(q);
                    let mut ft = C64::new(0.0, 0.0);
                    for n in -(n_max as i64)..=(n_max as i64) {
                        let idx = (n + n_max as i64) as usize;
                        ft += i_power(n as f64, -1.0)
                            * C64::from_polar(1.0, n as f64 * phi)
                            * a[idx];
                    }
                    let ph = params.d() * rho * rho / (2.0 * b)
                        - rho * params.mu2() * (phi + params.phi2()).sin() / b;
                    params.ell1() / b * C64::from_polar(1.0, ph) * ft
                })
                .collect()
        })
        .collect();
    SpectrumField::new(grid.clone(), rows.concat(), *params)
}

// ---------------------------------------------------------------------------
// Azimuthal harmonics

/// Azimuthal Fourier coefficients `f_n(r) = (1/2π)∫ f(r,θ) e^{-inθ} dθ`, `|n| ≤ K`,
/// by the trapezoid rule on `max(4K + 8, requested)` nodes.
pub struct FourierCoefficients<'a> {
    field: &'a dyn PolarFunction,
    k: usize,
    n_theta: usize,
}

impl<'a> FourierCoefficients<'a> {
    pub fn max_order(&self) -> usize {
        self.k
    }

    pub fn orders(&self) -> impl Iterator<Item = i32> {
        let k = self.k as i32;
        -k..=k
    }

    pub fn eval(&self, n: i32, r: f64) -> C64 {
        let thetas = periodic_nodes(self.n_theta);
        let mut ring = vec![C64::new(0.0, 0.0); self.n_theta];
        self.field.eval_ring(r, &thetas, &mut ring);
        harmonic(&ring, &thetas, n)
    }

    /// All coefficients at one radius, ordered `-K..=K`.
    pub fn eval_all(&self, r: f64) -> Vec<C64> {
        let thetas = periodic_nodes(self.n_theta);
        let mut ring = vec![C64::new(0.0, 0.0); self.n_theta];
        self.field.eval_ring(r, &thetas, &mut ring);
        self.orders().map(|n| harmonic(&ring, &thetas, n)).collect()
    }

    /// Samples every coefficient on the given radial quadrature.
    pub fn sample(&self, quad: &RadialQuadrature) -> Vec<RadialSamples> {
        let (nodes, weights) = quad.nodes_weights();
        let per_r: Vec<Vec<C64>> = nodes.par_iter().map(|&r| self.eval_all(r)).collect();
        (0..2 * self.k + 1)
            .map(|i| RadialSamples {
                nodes: nodes.clone(),
                weights: weights.clone(),
                values: per_r.iter().map(|row| row[i]).collect(),
            })
            .collect()
    }
}

fn harmonic(ring: &[C64], thetas: &[f64], n: i32) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for (v, t) in ring.iter().zip(thetas) {
        acc += v * C64::from_polar(1.0, -(n as f64) * t);
    }
    acc / ring.len() as f64
}

pub fn fourier_coefficients(field: &dyn PolarFunction, k: usize) -> FourierCoefficients<'_> {
    let n_theta = (4 * k + 8).max(2 * field.angular_bandwidth() + 8);
    FourierCoefficients { field, k, n_theta }
}

// ---------------------------------------------------------------------------
// 1D (Hankel-type) transforms

/// Gauss–Legendre rule on `[0, extent]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialQuadrature {
    pub extent: f64,
    pub nodes: usize,
}

impl RadialQuadrature {
    pub fn new(extent: f64, nodes: usize) -> Self {
        Self { extent, nodes }
    }

    /// Node count that resolves phase growth `chirp·R² + k·R`.
    pub fn auto(extent: f64, chirp: f64, wavenumber: f64) -> Self {
        let phase = chirp.abs() * extent * extent + wavenumber.abs() * extent;
        Self {
            extent,
            nodes: 256usize.max((8.0 * phase / PI).ceil() as usize),
        }
    }

    pub fn doubled(&self) -> Self {
        Self {
            extent: self.extent,
            nodes: 2 * self.nodes,
        }
    }

    pub fn nodes_weights(&self) -> (Vec<f64>, Vec<f64>) {
        GaussLegendre::new(self.nodes).on_interval(0.0, self.extent)
    }

    pub fn sample(&self, f: impl Fn(f64) -> C64 + Sync) -> RadialSamples {
        let (nodes, weights) = self.nodes_weights();
        let values = nodes.par_iter().map(|&r| f(r)).collect();
        RadialSamples {
            nodes,
            weights,
            values,
        }
    }
}

/// Function values on quadrature nodes, with their weights.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialSamples {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub values: Vec<C64>,
}

/// Classical `H_v[g](k) = ∫₀^∞ g(r) J_v(kr) r dr`.
pub fn hankel_transform(samples: &RadialSamples, order: HankelOrder, k: &[f64]) -> Vec<C64> {
    k.par_iter()
        .map(|&k| {
            let mut acc = C64::new(0.0, 0.0);
            for ((r, w), v) in samples.nodes.iter().zip(&samples.weights).zip(&samples.values) {
                acc += v * (w * r * order.j(k * r));
            }
            acc
        })
        .collect()
}

/// OLCHT of order `v` at the radii `rho`.
pub fn olcht_forward(
    samples: &RadialSamples,
    order: HankelOrder,
    params: &OffsetParams,
    rho: &[f64],
    opts: &OlchtOptions,
) -> Result<Vec<C64>> {
    let b = params.b();
    let a = params.a();
    let chirped = RadialSamples {
        nodes: samples.nodes.clone(),
        weights: samples.weights.clone(),
        values: samples
            .nodes
            .iter()
            .zip(&samples.values)
            .map(|(r, v)| v * C64::from_polar(1.0, a * r * r / (2.0 * b)))
            .collect(),
    };
    let out_phase = |p: f64| params.ell1() / b * C64::from_polar(1.0, params.d() * p * p / (2.0 * b));
    match opts.kernel {
        KernelMode::Reduced => {
            let scaled: Vec<f64> = rho.iter().map(|p| p / b).collect();
            let h = hankel_transform(&chirped, order, &scaled);
            let ph = opts.convention.forward_phase(order.value());
            Ok(h.iter()
                .zip(rho)
                .map(|(h, &p)| ph * out_phase(p) * h)
                .collect())
        }
        KernelMode::Strict { m_max } => {
            let extent = samples.nodes.last().copied().unwrap_or(0.0);
            let reach = extent.max(rho.iter().copied().fold(0.0, f64::max));
            let m_max = m_max.unwrap_or_else(|| default_m_truncation(params, reach)) as i32;
            let dphi = params.phi1() - params.phi2();
            let (mu1, mu2) = (params.mu1(), params.mu2());
            rho.par_iter()
                .map(|&p| {
                    let mut total = C64::new(0.0, 0.0);
                    for m in -m_max..=m_max {
                        let vm = order.shifted(m)?;
                        let jm_out = bessel_jn(m, p * mu2 / b);
                        if jm_out == 0.0 {
                            continue;
                        }
                        let mut acc = C64::new(0.0, 0.0);
                        for ((r, w), v) in
                            chirped.nodes.iter().zip(&chirped.weights).zip(&chirped.values)
                        {
                            acc += v * (w * r * bessel_jn(m, r * mu1 / b) * vm.j(r * p / b));
                        }
                        total += opts.convention.forward_phase(vm.value())
                            * C64::from_polar(jm_out, m as f64 * dphi)
                            * acc;
                    }
                    Ok(out_phase(p) * total)
                })
                .collect()
        }
    }
}

/// Inverse OLCHT of order `v` at the radii `r`; `spectrum` holds transform
/// values on a quadrature rule covering its support.
pub fn olcht_inverse(
    spectrum: &RadialSamples,
    order: HankelOrder,
    params: &OffsetParams,
    r: &[f64],
    opts: &OlchtOptions,
) -> Result<Vec<C64>> {
    let b = params.b();
    let d = params.d();
    let dechirped = RadialSamples {
        nodes: spectrum.nodes.clone(),
        weights: spectrum.weights.clone(),
        values: spectrum
            .nodes
            .iter()
            .zip(&spectrum.values)
            .map(|(p, v)| v * C64::from_polar(1.0, -d * p * p / (2.0 * b)))
            .collect(),
    };
    let out_phase = |x: f64| C64::from_polar(1.0, -params.a() * x * x / (2.0 * b)) / b;
    // convention constant without its harmonic factor; that is applied per order below
    let constant = |v: f64| opts.convention.inverse_constant(v, params);
    match opts.kernel {
        KernelMode::Reduced => {
            let scaled: Vec<f64> = r.iter().map(|x| x / b).collect();
            let h = hankel_transform(&dechirped, order, &scaled);
            let c = constant(order.value());
            Ok(h.iter().zip(r).map(|(h, &x)| c * out_phase(x) * h).collect())
        }
        KernelMode::Strict { m_max } => {
            let extent = spectrum.nodes.last().copied().unwrap_or(0.0);
            let reach = extent.max(r.iter().copied().fold(0.0, f64::max));
            let m_max = m_max.unwrap_or_else(|| default_m_truncation(params, reach)) as i32;
            let dphi = params.phi1() - params.phi2();
            let (mu1, mu2) = (params.mu1(), params.mu2());
            r.par_iter()
                .map(|&x| {
                    let mut total = C64::new(0.0, 0.0);
                    for m in -m_max..=m_max {
                        let vm = order.shifted(m)?;
                        let jm_out = bessel_jn(m, x * mu1 / b);
                        if jm_out == 0.0 {
                            continue;
                        }
                        let mut acc = C64::new(0.0, 0.0);
                        for ((p, w), v) in dechirped
                            .nodes
                            .iter()
                            .zip(&dechirped.weights)
                            .zip(&dechirped.values)
                        {
                            acc += v * (w * p * bessel_jn(m, p * mu2 / b) * vm.j(x * p / b));
                        }
                        total += constant(vm.value())
                            * C64::from_polar(jm_out, -(m as f64) * dphi)
                            * acc;
                    }
                    Ok(out_phase(x) * total)
                })
                .collect()
        }
    }
}

/// [`olcht_forward`] of a closure, checked against a doubled-node quadrature.
pub fn olcht_forward_checked(
    f: impl Fn(f64) -> C64 + Sync,
    order: HankelOrder,
    params: &OffsetParams,
    quad: &RadialQuadrature,
    rho: &[f64],
    opts: &OlchtOptions,
    tolerance: f64,
) -> Result<Vec<C64>> {
    let coarse = olcht_forward(&quad.sample(&f), order, params, rho, opts)?;
    let fine = olcht_forward(&quad.doubled().sample(&f), order, params, rho, opts)?;
    check_doubled(&coarse, &fine, tolerance)?;
    Ok(fine)
}

// ---------------------------------------------------------------------------
// Fourier-series route

/// Which OLCHT order pairs with the `n`-th azimuthal coefficient.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesOrder {
    /// `Σ H_n[f_n] e^{inφ}`
    OrderN,
    /// `Σ H_{2n}[f_n] e^{inφ}`
    Order2N,
}

impl SeriesOrder {
    pub fn bessel_order(self, n: i32) -> i32 {
        match self {
            SeriesOrder::OrderN => n,
            SeriesOrder::Order2N => 2 * n,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SeriesOrder::OrderN => "order_n",
            SeriesOrder::Order2N => "order_2n",
        }
    }
}

/// Per-order transform terms `H[f_n](ρ_i)` at each grid radius, orders `-K..=K`.
pub fn series_terms(
    coefficients: &[RadialSamples],
    params: &OffsetParams,
    rho: &[f64],
    mode: SeriesOrder,
    opts: &OlchtOptions,
) -> Result<Vec<Vec<C64>>> {
    let k = (coefficients.len() as i32 - 1) / 2;
    (-k..=k)
        .zip(coefficients)
        .map(|(n, s)| olcht_forward(s, HankelOrder::Int(mode.bessel_order(n)), params, rho, opts))
        .collect()
}

/// Assembles `Σ_{|n|≤K} H[f_n](ρ) e^{inφ}` on a polar grid.
pub fn olct_series(
    coefficients: &[RadialSamples],
    params: &OffsetParams,
    grid: &PolarGrid,
    mode: SeriesOrder,
    opts: &OlchtOptions,
) -> Result<SpectrumField> {
    if coefficients.len().is_multiple_of(2) {
        return Err(Error::LengthMismatch {
            expected: coefficients.len() + 1,
            got: coefficients.len(),
        });
    }
    let k = (coefficients.len() as i32 - 1) / 2;
    let terms = series_terms(coefficients, params, grid.radii(), mode, opts)?;
    let mut values = Vec::with_capacity(grid.len());
    for i in 0..grid.radii().len() {
        for q in 0..grid.azimuths() {
            let phi = grid.phi(q);
            let mut acc = C64::new(0.0, 0.0);
            for (idx, n) in (-k..=k).enumerate() {
                acc += terms[idx][i] * C64::from_polar(1.0, n as f64 * phi);
            }
            values.push(acc);
        }
    }
    SpectrumField::new(grid.clone(), values, *params)
}

/// `|(1/2π)∫|F(ρ,φ)|²dφ − Σ_n |H_n(ρ)|²|` with the azimuthal integral by the
/// trapezoid rule over the uniform row.
pub fn parseval_check(row: &[C64], terms: &[C64]) -> f64 {
    if row.is_empty() {
        return terms.iter().map(|t| t.norm_sqr()).sum();
    }
    let lhs: f64 = row.iter().map(|v| v.norm_sqr()).sum::<f64>() / row.len() as f64;
    let rhs: f64 = terms.iter().map(|t| t.norm_sqr()).sum();
    (lhs - rhs).abs()
}

/// Errors of both series modes against a reference spectrum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesVerdict {
    pub order_n_error: f64,
    pub order_2n_error: f64,
    pub tolerance: f64,
}

impl SeriesVerdict {
    /// The single mode within tolerance, if exactly one is.
    pub fn matching(&self) -> Option<SeriesOrder> {
        match (
            self.order_n_error <= self.tolerance,
            self.order_2n_error <= self.tolerance,
        ) {
            (true, false) => Some(SeriesOrder::OrderN),
            (false, true) => Some(SeriesOrder::Order2N),
            _ => None,
        }
    }
}

/// Compares both series assemblies with a reference spectrum on the same grid.
pub fn adjudicate_series(
    coefficients: &[RadialSamples],
    reference: &SpectrumField,
    opts: &OlchtOptions,
    tolerance: f64,
) -> Result<SeriesVerdict> {
    let p = reference.params();
    let n = olct_series(coefficients, p, reference.grid(), SeriesOrder::OrderN, opts)?;
    let n2 = olct_series(coefficients, p, reference.grid(), SeriesOrder::Order2N, opts)?;
    Ok(SeriesVerdict {
        order_n_error: relative_error(n.values(), reference.values()),
        order_2n_error: relative_error(n2.values(), reference.values()),
        tolerance,
    })
}
