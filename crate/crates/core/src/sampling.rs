//! Polar sampling grids and the reconstruction series.
//!
//! Radial samples sit at the normalized zeros `α_{vj} = b z_{vj}/Ω` and
//! azimuthal samples at `θ_l = 2πl/(2K+1)`. Two grid families exist: one set
//! of zeros per azimuthal order (`Theorem1`, `Corollary1`) or one fixed order
//! shared by all rings (`Theorem2`, `Corollary2`). The corollary modes sample
//! the transform instead of the field.

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::bessel::{bessel_j, bessel_jn_all, bessel_zero, quotient_near_zero, BesselOrder};
use crate::error::{Error, Result};
use crate::params::OffsetParams;
use crate::synthesis::PolarField;
use crate::transforms::{default_m_truncation, Convention, KernelMode};

/// Azimuthal Dirichlet kernel `o_l(θ)` for `2K+1` uniform nodes.
pub fn stark_kernel(theta: f64, l: usize, k: usize) -> f64 {
    let m = (2 * k + 1) as f64;
    let d = theta - TAU * l as f64 / m;
    let s = (d / 2.0).sin();
    if s.abs() > 1e-6 {
        return (m * d / 2.0).sin() / (m * s);
    }
    // near a node (mod 2π) use the cosine sum, which has no singularity
    let mut acc = 1.0;
    for n in 1..=k {
        acc += 2.0 * (n as f64 * d).cos();
    }
    acc / m
}

/// `Σ_l values[l]·o_l(θ)`; exact for trigonometric polynomials of degree ≤ K.
pub fn stark_interpolate(values: &[C64], theta: f64, k: usize) -> Result<C64> {
    if values.len() != 2 * k + 1 {
        return Err(Error::LengthMismatch {
            expected: 2 * k + 1,
            got: values.len(),
        });
    }
    Ok(values
        .iter()
        .enumerate()
        .map(|(l, v)| v * stark_kernel(theta, l, k))
        .sum())
}

/// Radial interpolating function `ϑ_{vj}(r)` for the sample `α = b z/Ω`,
/// using `μ₂` from `params`.
pub fn theta_kernel(
    r: f64,
    alpha: f64,
    z: f64,
    order: BesselOrder,
    params: &OffsetParams,
    omega: f64,
) -> Result<f64> {
    let next = BesselOrder::new(order.value() + 1.0)?;
    let jn1 = bessel_j(next, z)?;
    let jv = bessel_j(order, omega * r / params.b())?;
    Ok(theta_at(r, alpha, z, jn1, jv, order.value(), params.mu2(), omega, params.b()))
}

// `jv` is J_v(Ωr/b), shared by all j at a given probe.
#[allow(clippy::too_many_arguments)]
fn theta_at(r: f64, alpha: f64, z: f64, jn1: f64, jv: f64, v: f64, mu2: f64, omega: f64, b: f64) -> f64 {
    let c = omega / b;
    let delta = c * (r - alpha);
    if delta.abs() < 1e-3 {
        let q = quotient_near_zero(v, z, -jn1, delta);
        return -2.0 * (mu2 + alpha) * q / (jn1 * (alpha + r + 2.0 * mu2));
    }
    2.0 * b * (mu2 + alpha) * jv / (omega * jn1 * (alpha - r) * (alpha + r + 2.0 * mu2))
}

/// Which reconstruction formula a grid serves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridMode {
    /// field samples, zeros of order `|n|` for each azimuthal order
    Theorem1,
    /// field samples, zeros of one order `v`
    Theorem2(BesselOrder),
    /// transform samples, zeros of order `|n|` for each azimuthal order
    Corollary1,
    /// transform samples, zeros of one order `v`
    Corollary2(BesselOrder),
}

impl GridMode {
    pub fn per_order(&self) -> bool {
        matches!(self, GridMode::Theorem1 | GridMode::Corollary1)
    }

    pub fn samples_spectrum(&self) -> bool {
        matches!(self, GridMode::Corollary1 | GridMode::Corollary2(_))
    }

    pub fn name(&self) -> String {
        match self {
            GridMode::Theorem1 => "theorem1".into(),
            GridMode::Theorem2(v) => format!("theorem2(v={})", v.value()),
            GridMode::Corollary1 => "corollary1".into(),
            GridMode::Corollary2(v) => format!("corollary2(v={})", v.value()),
        }
    }
}

/// The count of series terms: `((2K+1)N)²` for per-order grids, `(2K+1)N²` otherwise.
pub fn sample_count(k: usize, n: usize, mode: &GridMode) -> u64 {
    let (k, n) = ((2 * k + 1) as u64, n as u64);
    if mode.per_order() {
        (k * n) * (k * n)
    } else {
        k * n * n
    }
}

/// Zeros and normalized zeros of one Bessel order.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialBasis {
    order: BesselOrder,
    zeros: Vec<f64>,
    alphas: Vec<f64>,
    jn1: Vec<f64>,
}

impl RadialBasis {
    fn new(order: BesselOrder, count: usize, b: f64, omega: f64) -> Result<Self> {
        let next = BesselOrder::new(order.value() + 1.0)?;
        let zeros: Vec<f64> = (1..=count)
            .map(|j| bessel_zero(order, j))
            .collect::<Result<_>>()?;
        let jn1 = zeros.iter().map(|&z| bessel_j(next, z)).collect::<Result<_>>()?;
        Ok(Self {
            order,
            alphas: zeros.iter().map(|z| b * z / omega).collect(),
            zeros,
            jn1,
        })
    }

    pub fn order(&self) -> BesselOrder {
        self.order
    }
    pub fn zeros(&self) -> &[f64] {
        &self.zeros
    }
    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }
}

/// Sampling abscissae and azimuths.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    mode: GridMode,
    k: usize,
    n_zeros: usize,
    omega: f64,
    params: OffsetParams,
    // one basis per azimuthal order -K..=K for per-order modes, else a single one
    bases: Vec<RadialBasis>,
}

impl SampleGrid {
    pub fn new(mode: GridMode, k: usize, n_zeros: usize, omega: f64, params: &OffsetParams) -> Result<Self> {
        if n_zeros == 0 {
            return Err(Error::InvalidParams("at least one zero per order is needed".into()));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParams(format!("Omega must be positive, got {omega}")));
        }
        let b = params.b();
        let bases = match mode {
            GridMode::Theorem1 | GridMode::Corollary1 => {
                let mut unique: Vec<RadialBasis> = Vec::with_capacity(k + 1);
                for n in 0..=k {
                    unique.push(RadialBasis::new(BesselOrder::integer(n as u32), n_zeros, b, omega)?);
                }
                // z_{-n,j} = z_{n,j}
                (-(k as i32)..=k as i32)
                    .map(|n| unique[n.unsigned_abs() as usize].clone())
                    .collect()
            }
            GridMode::Theorem2(v) | GridMode::Corollary2(v) => {
                vec![RadialBasis::new(v, n_zeros, b, omega)?]
            }
        };
        Ok(Self {
            mode,
            k,
            n_zeros,
            omega,
            params: *params,
            bases,
        })
    }

    pub fn mode(&self) -> GridMode {
        self.mode
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn n_zeros(&self) -> usize {
        self.n_zeros
    }
    pub fn omega(&self) -> f64 {
        self.omega
    }
    pub fn params(&self) -> &OffsetParams {
        &self.params
    }
    pub fn bases(&self) -> &[RadialBasis] {
        &self.bases
    }

    pub fn azimuth(&self, l: usize) -> f64 {
        TAU * l as f64 / (2 * self.k + 1) as f64
    }

    pub fn azimuths(&self) -> Vec<f64> {
        (0..2 * self.k + 1).map(|l| self.azimuth(l)).collect()
    }

    /// Number of stored samples: slabs × zeros × azimuths.
    pub fn len(&self) -> usize {
        self.bases.len() * self.n_zeros * (2 * self.k + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Radius inside which the truncated series is trusted: `0.9·min_n α_{n,N}`.
    pub fn reliable_radius(&self) -> f64 {
        0.9 * self
            .bases
            .iter()
            .map(|b| *b.alphas.last().expect("n_zeros > 0"))
            .fold(f64::INFINITY, f64::min)
    }

    /// `(slab, j, l) → (radius, azimuth)` for every stored sample, in storage order.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let az = self.azimuths();
        let mut out = Vec::with_capacity(self.len());
        for basis in &self.bases {
            for &alpha in &basis.alphas {
                for &t in &az {
                    out.push((alpha, t));
                }
            }
        }
        out
    }
}

/// Values on a [`SampleGrid`], stored slab-major, then by zero, then by azimuth.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    grid: SampleGrid,
    values: Vec<C64>,
}

impl SampleSet {
    pub fn new(grid: SampleGrid, values: Vec<C64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &SampleGrid {
        &self.grid
    }
    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Terms of the reconstruction series with the m-sum cut at `M = N`;
    /// this is the figure [`sample_count`] reports.
    pub fn term_count(&self) -> u64 {
        self.values.len() as u64 * self.grid.n_zeros as u64
    }

    pub fn get(&self, slab: usize, j: usize, l: usize) -> C64 {
        let az = 2 * self.grid.k + 1;
        self.values[(slab * self.grid.n_zeros + j) * az + l]
    }

    fn ring(&self, slab: usize, j: usize) -> &[C64] {
        let az = 2 * self.grid.k + 1;
        let start = (slab * self.grid.n_zeros + j) * az;
        &self.values[start..start + az]
    }
}

/// Samples `f` at every grid point.
pub fn sample_with(grid: &SampleGrid, f: impl Fn(f64, f64) -> C64 + Sync) -> SampleSet {
    let values = grid.points().par_iter().map(|&(r, t)| f(r, t)).collect();
    SampleSet {
        grid: grid.clone(),
        values,
    }
}

/// Samples the field for theorem grids and its closed-form transform for corollary grids.
pub fn sample_field(field: &PolarField, grid: &SampleGrid) -> SampleSet {
    if grid.mode.samples_spectrum() {
        sample_with(grid, |r, t| field.transform_closed_form(r, t))
    } else {
        sample_with(grid, |r, t| field.evaluate(r, t))
    }
}

/// Inner chirp of the transform-domain series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SpectralChirp {
    /// `e^{−idα²/2b}`
    #[default]
    D,
    /// `e^{−iaα²/2b}`
    A,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReconstructionOptions {
    pub kernel: KernelMode,
    pub convention: Convention,
    pub chirp: SpectralChirp,
    /// Overrides the m-sum truncation of the strict kernel.
    pub m_truncation: Option<usize>,
}

impl Default for ReconstructionOptions {
    fn default() -> Self {
        Self {
            kernel: KernelMode::Strict { m_max: None },
            convention: Convention::Consistent,
            chirp: SpectralChirp::D,
            m_truncation: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Side {
    Field,
    Spectrum(SpectralChirp),
}

impl ReconstructionOptions {
    /// m-sum truncation used for a probe at radius `x`.
    pub fn m_used(&self, grid: &SampleGrid, x: f64) -> usize {
        match self.kernel {
            KernelMode::Reduced => 0,
            KernelMode::Strict { m_max } => self.m_truncation.or(m_max).unwrap_or_else(|| {
                let reach = grid
                    .bases
                    .iter()
                    .flat_map(|b| b.alphas.last().copied())
                    .fold(x.max(grid.omega), f64::max);
                default_m_truncation(&grid.params, reach)
            }),
        }
    }
}

// One-order series at probe radius x.
fn series(
    basis: &RadialBasis,
    samples: &[C64],
    x: f64,
    side: Side,
    grid: &SampleGrid,
    opts: &ReconstructionOptions,
) -> C64 {
    let p = &grid.params;
    let (a, b, d) = (p.a(), p.b(), p.d());
    let omega = grid.omega;
    let v = basis.order.value();
    let strict = matches!(opts.kernel, KernelMode::Strict { .. });
    let mu2 = if strict { p.mu2() } else { 0.0 };
    let jv = bessel_j(basis.order, omega * x / b).unwrap_or(f64::NAN);

    let (outer, inner_rate) = match side {
        Side::Field => (C64::from_polar(1.0, -a * x * x / (2.0 * b)), a / (2.0 * b)),
        Side::Spectrum(chirp) => {
            let rate = match chirp {
                SpectralChirp::D => d,
                SpectralChirp::A => a,
            };
            (C64::from_polar(1.0, d * x * x / (2.0 * b)), -rate / (2.0 * b))
        }
    };
    let prefactor = match opts.convention {
        Convention::Consistent => C64::new(1.0, 0.0),
        Convention::AsPrinted => C64::from_polar(1.0, PI * v) * p.sigma(),
    };

    // weights w_j = Σ_m J_m(μ_out x/b) J_m²(μ_mid Ω/b) J_m(μ₁α_j/b), m ascending
    let m_max = opts.m_used(grid, x);
    let n = samples.len().min(basis.alphas.len());
    let mut weights = vec![1.0; n];
    if strict && m_max > 0 {
        let (mu_out, mu_mid) = match side {
            Side::Field => (p.mu1(), p.mu2()),
            Side::Spectrum(_) => (p.mu2(), p.mu1()),
        };
        let outer_j = bessel_jn_all(m_max, mu_out * x / b);
        let mid_j = bessel_jn_all(m_max, mu_mid * omega / b);
        let coef: Vec<f64> = (0..=m_max)
            .map(|m| outer_j[m] * mid_j[m] * mid_j[m])
            .collect();
        for (j, w) in weights.iter_mut().enumerate() {
            let inner_j = bessel_jn_all(m_max, p.mu1() * basis.alphas[j] / b);
            // J_{-m} terms equal the J_m terms, the sign (-1)^{4m} cancels
            let mut acc = coef[0] * inner_j[0];
            for m in 1..=m_max {
                acc += 2.0 * coef[m] * inner_j[m];
            }
            *w = acc;
        }
    }

    let mut acc = C64::new(0.0, 0.0);
    for j in 0..n {
        if samples[j] == C64::new(0.0, 0.0) {
            continue;
        }
        let alpha = basis.alphas[j];
        let th = theta_at(x, alpha, basis.zeros[j], basis.jn1[j], jv, v, mu2, omega, b);
        acc += samples[j] * C64::from_polar(weights[j] * th, inner_rate * alpha * alpha);
    }
    prefactor * outer * acc
}

/// Reconstructs an isotropic profile from its values at the zeros of `order`.
pub fn reconstruct_isotropic(
    samples: &[C64],
    order: BesselOrder,
    params: &OffsetParams,
    omega: f64,
    opts: &ReconstructionOptions,
    r: f64,
) -> Result<C64> {
    reconstruct_coefficient(samples, order, params, omega, opts, r)
}

/// Reconstructs one Fourier coefficient `f_n(r)` from its values at the zeros
/// of its Bessel order.
pub fn reconstruct_coefficient(
    samples: &[C64],
    order: BesselOrder,
    params: &OffsetParams,
    omega: f64,
    opts: &ReconstructionOptions,
    r: f64,
) -> Result<C64> {
    let grid = SampleGrid::new(GridMode::Theorem2(order), 0, samples.len().max(1), omega, params)?;
    Ok(series(&grid.bases[0], samples, r, Side::Field, &grid, opts))
}

fn check_mode(samples: &SampleSet, mode: GridMode, spectrum: bool) -> Result<()> {
    if samples.grid.mode != mode {
        return Err(Error::GridMismatch(format!(
            "samples are on a {} grid, requested {}",
            samples.grid.mode.name(),
            mode.name()
        )));
    }
    if mode.samples_spectrum() != spectrum {
        let which = if spectrum { "spectrum" } else { "field" };
        return Err(Error::GridMismatch(format!(
            "{} does not reconstruct the {which}",
            mode.name()
        )));
    }
    Ok(())
}

fn reconstruct(samples: &SampleSet, side: Side, opts: &ReconstructionOptions, x: f64, angle: f64) -> C64 {
    let grid = &samples.grid;
    let k = grid.k;
    let m = 2 * k + 1;
    if grid.mode.per_order() {
        let az = grid.azimuths();
        let mut total = C64::new(0.0, 0.0);
        for (slab, n) in (-(k as i32)..=k as i32).enumerate() {
            // DFT of each ring gives the n-th coefficient at α_{nj}
            let coeff: Vec<C64> = (0..grid.n_zeros)
                .map(|j| {
                    samples
                        .ring(slab, j)
                        .iter()
                        .zip(&az)
                        .map(|(v, t)| v * C64::from_polar(1.0, -(n as f64) * t))
                        .sum::<C64>()
                        / m as f64
                })
                .collect();
            let f_n = series(&grid.bases[slab], &coeff, x, side, grid, opts);
            total += f_n * C64::from_polar(1.0, n as f64 * angle);
        }
        total
    } else {
        let o: Vec<f64> = (0..m).map(|l| stark_kernel(angle, l, k)).collect();
        let ring_values: Vec<C64> = (0..grid.n_zeros)
            .map(|j| samples.ring(0, j).iter().zip(&o).map(|(v, w)| v * w).sum())
            .collect();
        series(&grid.bases[0], &ring_values, x, side, grid, opts)
    }
}

/// Reconstructs `f(r, θ)` from field samples on a theorem grid.
pub fn reconstruct_field(
    samples: &SampleSet,
    mode: GridMode,
    opts: &ReconstructionOptions,
    r: f64,
    theta: f64,
) -> Result<C64> {
    check_mode(samples, mode, false)?;
    Ok(reconstruct(samples, Side::Field, opts, r, theta))
}

/// Reconstructs the OLCT `F(ρ, φ)` from transform samples on a corollary grid.
pub fn reconstruct_spectrum(
    samples: &SampleSet,
    mode: GridMode,
    opts: &ReconstructionOptions,
    rho: f64,
    phi: f64,
) -> Result<C64> {
    check_mode(samples, mode, true)?;
    Ok(reconstruct(samples, Side::Spectrum(opts.chirp), opts, rho, phi))
}

/// `count × count` probes with `r_i = radius·i/(count−1)` and
/// `θ_q = 2πq/count + 0.1`, offset from the sampling azimuths.
pub fn probe_grid(radius: f64, count: usize) -> Vec<(f64, f64)> {
    let steps = count.saturating_sub(1).max(1) as f64;
    (0..count)
        .flat_map(|i| (0..count).map(move |q| (radius * i as f64 / steps, TAU * q as f64 / count as f64 + 0.1)))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProbeError {
    pub r: f64,
    pub theta: f64,
    pub truth: C64,
    pub reconstructed: C64,
}

impl ProbeError {
    pub fn abs_error(&self) -> f64 {
        (self.truth - self.reconstructed).norm()
    }
}

/// Errors of one reconstruction over a probe set.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionReport {
    pub mode: GridMode,
    pub k: usize,
    pub n_zeros: usize,
    /// m-sum truncation at the outermost probe
    pub m_truncation: usize,
    pub probes: Vec<ProbeError>,
    /// stored samples
    pub samples: usize,
    /// [`sample_count`] for the grid
    pub sample_count: u64,
    pub elapsed: Duration,
}

impl ReconstructionReport {
    pub fn max_abs_error(&self) -> f64 {
        self.probes.iter().map(ProbeError::abs_error).fold(0.0, f64::max)
    }

    pub fn mean_abs_error(&self) -> f64 {
        if self.probes.is_empty() {
            return 0.0;
        }
        self.probes.iter().map(ProbeError::abs_error).sum::<f64>() / self.probes.len() as f64
    }

    /// Max error over the max true magnitude.
    pub fn max_rel_error(&self) -> f64 {
        let peak = self.probes.iter().map(|p| p.truth.norm()).fold(0.0, f64::max);
        let e = self.max_abs_error();
        if peak == 0.0 {
            e
        } else {
            e / peak
        }
    }
}

/// Reconstructs at every probe and compares with `truth`.
pub fn evaluate_reconstruction(
    samples: &SampleSet,
    opts: &ReconstructionOptions,
    probes: &[(f64, f64)],
    truth: &[C64],
) -> Result<ReconstructionReport> {
    if probes.len() != truth.len() {
        return Err(Error::LengthMismatch {
            expected: probes.len(),
            got: truth.len(),
        });
    }
    let grid = &samples.grid;
    let start = Instant::now();
    let spectrum = grid.mode.samples_spectrum();
    let recon: Vec<C64> = probes
        .par_iter()
        .map(|&(x, t)| {
            if spectrum {
                reconstruct_spectrum(samples, grid.mode, opts, x, t)
            } else {
                reconstruct_field(samples, grid.mode, opts, x, t)
            }
        })
        .collect::<Result<_>>()?;
    let elapsed = start.elapsed();
    let reach = probes.iter().map(|p| p.0).fold(0.0, f64::max);
    Ok(ReconstructionReport {
        mode: grid.mode,
        k: grid.k,
        n_zeros: grid.n_zeros,
        m_truncation: opts.m_used(grid, reach),
        probes: probes
            .iter()
            .zip(truth)
            .zip(recon)
            .map(|((&(r, theta), &truth), reconstructed)| ProbeError {
                r,
                theta,
                truth,
                reconstructed,
            })
            .collect(),
        samples: samples.len(),
        sample_count: sample_count(grid.k, grid.n_zeros, &grid.mode),
        elapsed,
    })
}
