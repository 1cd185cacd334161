//! Exactly bandlimited test fields built from finite Fourier–Bessel spectra.
//!
//! A spectrum assigns coefficients `ε_{n,j}` to each azimuthal order `|n| ≤ K`
//! and zero index `j ≤ J`. In the `Transform` domain the coefficients describe
//! the (reduced-kernel) OLCHT of `f_n`, which is then a finite Fourier–Bessel
//! series supported on `[0, Ω)`; the radial profile follows in closed form
//! from the Lommel integral. In the `Field` domain the coefficients describe
//! `f_n` itself on `[0, Ω)`, so the field is space-limited instead.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::OnceLock;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bessel::{bessel_j, bessel_zero, quotient_near_zero, BesselOrder};
use crate::error::{Error, Result};
use crate::params::OffsetParams;
use crate::transforms::{i_power, PolarFunction};

const MAX_COEFFICIENT: f64 = 1e6;

/// Bessel order paired with azimuthal order `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrderMap {
    /// `v = |n|`
    Identity,
    /// `v = 2|n|`
    Doubled,
    /// the same `v` for every `n`
    Fixed(BesselOrder),
}

impl OrderMap {
    pub fn order(&self, n: i32) -> BesselOrder {
        match self {
            OrderMap::Identity => BesselOrder::integer(n.unsigned_abs()),
            OrderMap::Doubled => BesselOrder::integer(2 * n.unsigned_abs()),
            OrderMap::Fixed(v) => *v,
        }
    }

    fn label(&self) -> String {
        match self {
            OrderMap::Identity => "identity".into(),
            OrderMap::Doubled => "doubled".into(),
            OrderMap::Fixed(v) => format!("fixed:{}", v.value()),
        }
    }

    fn parse(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(OrderMap::Identity),
            "doubled" => Ok(OrderMap::Doubled),
            _ => {
                let v = s
                    .strip_prefix("fixed:")
                    .ok_or_else(|| Error::Parse(format!("unknown order map `{s}`")))?;
                let v: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad fixed order `{v}`")))?;
                Ok(OrderMap::Fixed(BesselOrder::new(v)?))
            }
        }
    }
}

/// Whether the coefficients expand the transform or the field itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpectrumDomain {
    Transform,
    Field,
}

/// Coefficients `ε_{n,j}`, `|n| ≤ K`, `1 ≤ j ≤ J`.
#[derive(Debug, Clone, PartialEq)]
pub struct FourierBesselSpectrum {
    omega: f64,
    k: usize,
    j_spec: usize,
    coeffs: Vec<C64>,
    order_map: OrderMap,
    domain: SpectrumDomain,
    seed: Option<u64>,
}

impl FourierBesselSpectrum {
    pub fn zeros(omega: f64, k: usize, j_spec: usize, order_map: OrderMap) -> Result<Self> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::InvalidParams(format!("Omega must be positive, got {omega}")));
        }
        Ok(Self {
            omega,
            k,
            j_spec,
            coeffs: vec![C64::new(0.0, 0.0); (2 * k + 1) * j_spec],
            order_map,
            domain: SpectrumDomain::Transform,
            seed: None,
        })
    }

    pub fn with_domain(mut self, domain: SpectrumDomain) -> Self {
        self.domain = domain;
        self
    }

    /// Coefficients drawn uniformly from the unit disk.
    pub fn random(omega: f64, k: usize, j_spec: usize, order_map: OrderMap, seed: u64) -> Result<Self> {
        let mut s = Self::zeros(omega, k, j_spec, order_map)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for c in s.coeffs.iter_mut() {
            *c = unit_disk(&mut rng);
        }
        s.seed = Some(seed);
        Ok(s)
    }

    /// Random combination of divided-difference stencils over `taper + 1`
    /// consecutive zeros. Each stencil makes the Fourier–Bessel sum vanish to
    /// high order at the band edge, so the dual-domain profile decays fast.
    pub fn tapered(
        omega: f64,
        k: usize,
        j_spec: usize,
        taper: usize,
        order_map: OrderMap,
        seed: u64,
    ) -> Result<Self> {
        if j_spec <= taper {
            return Err(Error::InvalidParams(format!(
                "taper {taper} needs more than {taper} coefficients per order, got {j_spec}"
            )));
        }
        let mut s = Self::zeros(omega, k, j_spec, order_map)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for n in -(k as i32)..=(k as i32) {
            let v = order_map.order(n);
            let z: Vec<f64> = (1..=j_spec)
                .map(|j| bessel_zero(v, j))
                .collect::<Result<_>>()?;
            let next = BesselOrder::new(v.value() + 1.0)?;
            for start in 0..(j_spec - taper) {
                let amp = unit_disk(&mut rng);
                let idx: Vec<usize> = (start..=start + taper).collect();
                let mut st = Vec::with_capacity(idx.len());
                for &i in &idx {
                    let xi = z[i] * z[i];
                    let w: f64 = idx
                        .iter()
                        .filter(|&&m| m != i)
                        .map(|&m| 1.0 / (xi - z[m] * z[m]))
                        .product();
                    let dj = -bessel_j(next, z[i])?;
                    st.push(w / (z[i] * dj));
                }
                let scale = st.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                for (&i, e) in idx.iter().zip(&st) {
                    let pos = s.index(n, i + 1);
                    s.coeffs[pos] += amp * (e / scale);
                }
            }
        }
        s.seed = Some(seed);
        Ok(s)
    }

    fn index(&self, n: i32, j: usize) -> usize {
        (n + self.k as i32) as usize * self.j_spec + (j - 1)
    }

    fn check(&self, n: i32, j: usize) -> Result<()> {
        if n.unsigned_abs() as usize > self.k || j == 0 || j > self.j_spec {
            return Err(Error::Domain(format!(
                "coefficient ({n}, {j}) outside |n| <= {}, 1 <= j <= {}",
                self.k, self.j_spec
            )));
        }
        Ok(())
    }

    pub fn get(&self, n: i32, j: usize) -> C64 {
        self.check(n, j).map(|_| self.coeffs[self.index(n, j)]).unwrap_or_default()
    }

    pub fn set(&mut self, n: i32, j: usize, value: C64) -> Result<()> {
        self.check(n, j)?;
        if !(value.norm() <= MAX_COEFFICIENT) {
            return Err(Error::Domain(format!(
                "coefficient magnitude {} exceeds {MAX_COEFFICIENT}",
                value.norm()
            )));
        }
        let i = self.index(n, j);
        self.coeffs[i] = value;
        Ok(())
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
    pub fn k(&self) -> usize {
        self.k
    }
    pub fn j_spec(&self) -> usize {
        self.j_spec
    }
    pub fn order_map(&self) -> OrderMap {
        self.order_map
    }
    pub fn domain(&self) -> SpectrumDomain {
        self.domain
    }
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }
    pub fn coefficients(&self, n: i32) -> &[C64] {
        let start = self.index(n, 1);
        &self.coeffs[start..start + self.j_spec]
    }

    /// Serializes to the spectrum CSV format.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "# seed={seed}");
        }
        let _ = writeln!(out, "# order_map={}", self.order_map.label());
        let domain = match self.domain {
            SpectrumDomain::Transform => "transform",
            SpectrumDomain::Field => "field",
        };
        let _ = writeln!(out, "# domain={domain}");
        let _ = writeln!(out, "Omega,K");
        let _ = writeln!(out, "{},{}", self.omega, self.k);
        let _ = writeln!(out, "n,j,Re(eps),Im(eps)");
        for n in -(self.k as i32)..=(self.k as i32) {
            for j in 1..=self.j_spec {
                let e = self.get(n, j);
                let _ = writeln!(out, "{n},{j},{:e},{:e}", e.re, e.im);
            }
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut order_map = OrderMap::Identity;
        let mut domain = SpectrumDomain::Transform;
        let mut seed = None;
        let mut header: Option<(f64, usize)> = None;
        let mut rows = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(c) = line.strip_prefix('#') {
                if let Some((key, val)) = c.trim().split_once('=') {
                    match key.trim() {
                        "order_map" => order_map = OrderMap::parse(val.trim())?,
                        "domain" => {
                            domain = match val.trim() {
                                "transform" => SpectrumDomain::Transform,
                                "field" => SpectrumDomain::Field,
                                other => {
                                    return Err(Error::Parse(format!("unknown domain `{other}`")))
                                }
                            }
                        }
                        "seed" => seed = val.trim().parse().ok(),
                        _ => {}
                    }
                }
                continue;
            }
            if line.starts_with("Omega") || line.starts_with('n') {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            let bad = || Error::Parse(format!("line {}: `{raw}`", lineno + 1));
            if header.is_none() {
                if cols.len() != 2 {
                    return Err(bad());
                }
                let omega = cols[0].parse().map_err(|_| bad())?;
                let k = cols[1].parse().map_err(|_| bad())?;
                header = Some((omega, k));
                continue;
            }
            if cols.len() != 4 {
                return Err(bad());
            }
            let n: i32 = cols[0].parse().map_err(|_| bad())?;
            let j: usize = cols[1].parse().map_err(|_| bad())?;
            let re: f64 = cols[2].parse().map_err(|_| bad())?;
            let im: f64 = cols[3].parse().map_err(|_| bad())?;
            rows.push((n, j, C64::new(re, im)));
        }
        let (omega, k) = header.ok_or_else(|| Error::Parse("missing `Omega,K` line".into()))?;
        let j_spec = rows.iter().map(|r| r.1).max().unwrap_or(0);
        let mut s = Self::zeros(omega, k, j_spec, order_map)?.with_domain(domain);
        s.seed = seed;
        for (n, j, e) in rows {
            s.set(n, j, e)?;
        }
        Ok(s)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_csv(&text)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }
}

fn unit_disk(rng: &mut ChaCha8Rng) -> C64 {
    let r: f64 = rng.gen::<f64>().sqrt();
    let t: f64 = rng.gen::<f64>() * std::f64::consts::TAU;
    C64::from_polar(r, t)
}

/// `∫₀^c J_v(αρ) J_v(rρ) ρ dρ` for `α` with `J_v(αc) = 0`:
/// `c α J_{v+1}(αc) J_v(rc) / (α² − r²)`, continuous through `r = α`.
pub fn lommel_kernel(alpha: f64, r: f64, c: f64, order: BesselOrder) -> Result<f64> {
    let z = alpha * c;
    let at_zero = bessel_j(order, z)?;
    if at_zero.abs() > 1e-10 {
        return Err(Error::Domain(format!(
            "alpha*c = {z} is not a zero of J_{} (J = {at_zero:e})",
            order.value()
        )));
    }
    let jn1 = bessel_j(BesselOrder::new(order.value() + 1.0)?, z)?;
    lommel_at(order, alpha, z, jn1, r, c)
}

fn lommel_at(order: BesselOrder, alpha: f64, z: f64, jn1: f64, r: f64, c: f64) -> Result<f64> {
    let delta = r * c - z;
    if delta.abs() < 1e-3 {
        let q = quotient_near_zero(order.value(), z, -jn1, delta);
        return Ok(-c * c * alpha * jn1 * q / (alpha + r));
    }
    Ok(c * alpha * jn1 * bessel_j(order, r * c)? / ((alpha - r) * (alpha + r)))
}

/// How the spectrum relates to the transform family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthesisMode {
    /// Every `f_n` has an Ω-bandlimited OLCHT of its mapped order.
    OlchtSpace,
    /// The OLCT itself is Ω-bandlimited; needs the order of each term to be
    /// its azimuthal order.
    OlctSpace,
}

#[derive(Debug, Clone)]
struct Profile {
    n: i32,
    order: BesselOrder,
    alphas: Vec<f64>,
    zeros: Vec<f64>,
    eps: Vec<C64>,
    jn1: Vec<f64>,
}

/// A synthesized field `f(r,θ) = Σ_{|n|≤K} f_n(r) e^{inθ}`.
#[derive(Debug, Clone)]
pub struct PolarField {
    spectrum: FourierBesselSpectrum,
    params: OffsetParams,
    mode: SynthesisMode,
    profiles: Vec<Profile>,
    extent: OnceLock<f64>,
}

/// Builds the field whose per-order transforms are the spectrum's finite
/// Fourier–Bessel series.
pub fn synthesize(
    spectrum: &FourierBesselSpectrum,
    params: &OffsetParams,
    mode: SynthesisMode,
) -> Result<PolarField> {
    if mode == SynthesisMode::OlctSpace {
        if let OrderMap::Fixed(v) = spectrum.order_map {
            let bad = (-(spectrum.k as i32)..=spectrum.k as i32)
                .any(|n| n.unsigned_abs() as f64 != v.value());
            if bad {
                return Err(Error::InvalidParams(
                    "OLCT-space synthesis needs the Bessel order of each term to be |n|".into(),
                ));
            }
        }
    }
    let b = params.b();
    let omega = spectrum.omega;
    let mut profiles = Vec::with_capacity(2 * spectrum.k + 1);
    for n in -(spectrum.k as i32)..=(spectrum.k as i32) {
        let order = spectrum.order_map.order(n);
        let next = BesselOrder::new(order.value() + 1.0)?;
        let zeros: Vec<f64> = (1..=spectrum.j_spec)
            .map(|j| bessel_zero(order, j))
            .collect::<Result<_>>()?;
        let jn1 = zeros
            .iter()
            .map(|&z| bessel_j(next, z))
            .collect::<Result<_>>()?;
        profiles.push(Profile {
            n,
            order,
            alphas: zeros.iter().map(|z| b * z / omega).collect(),
            zeros,
            eps: spectrum.coefficients(n).to_vec(),
            jn1,
        });
    }
    Ok(PolarField {
        spectrum: spectrum.clone(),
        params: *params,
        mode,
        profiles,
        extent: OnceLock::new(),
    })
}

impl PolarField {
    pub fn spectrum(&self) -> &FourierBesselSpectrum {
        &self.spectrum
    }
    pub fn params(&self) -> &OffsetParams {
        &self.params
    }
    pub fn mode(&self) -> SynthesisMode {
        self.mode
    }
    pub fn k(&self) -> usize {
        self.spectrum.k
    }
    pub fn omega(&self) -> f64 {
        self.spectrum.omega
    }

    /// Bessel order used for azimuthal order `n`.
    pub fn order(&self, n: i32) -> BesselOrder {
        self.spectrum.order_map.order(n)
    }

    fn profile(&self, n: i32) -> Option<&Profile> {
        let k = self.spectrum.k as i32;
        if n.abs() > k {
            None
        } else {
            Some(&self.profiles[(n + k) as usize])
        }
    }

    /// `f_n(r)`; zero for `|n| > K`.
    pub fn coefficient(&self, n: i32, r: f64) -> C64 {
        match self.profile(n) {
            Some(p) => self.radial(p, r),
            None => C64::new(0.0, 0.0),
        }
    }

    fn radial(&self, p: &Profile, r: f64) -> C64 {
        let b = self.params.b();
        let omega = self.spectrum.omega;
        let chirp = C64::from_polar(1.0, -self.params.a() * r * r / (2.0 * b));
        let mut acc = C64::new(0.0, 0.0);
        match self.spectrum.domain {
            SpectrumDomain::Transform => {
                let c = omega / b;
                for j in 0..p.eps.len() {
                    if p.eps[j] == C64::new(0.0, 0.0) {
                        continue;
                    }
                    let l = lommel_at(p.order, p.alphas[j], p.zeros[j], p.jn1[j], r, c)
                        .unwrap_or(f64::NAN);
                    acc += p.eps[j] * l;
                }
            }
            SpectrumDomain::Field => {
                if r >= omega {
                    return acc;
                }
                for j in 0..p.eps.len() {
                    let jv = bessel_j(p.order, p.zeros[j] * r / omega).unwrap_or(f64::NAN);
                    acc += p.eps[j] * jv;
                }
            }
        }
        chirp * acc
    }

    /// `f(r, θ)`.
    pub fn evaluate(&self, r: f64, theta: f64) -> C64 {
        let t = theta.rem_euclid(std::f64::consts::TAU);
        self.profiles
            .iter()
            .map(|p| self.radial(p, r) * C64::from_polar(1.0, p.n as f64 * t))
            .sum()
    }

    /// Closed-form reduced-kernel OLCHT of `f_n` under the consistent convention:
    /// `(−i)^v ℓ₁/b · e^{idρ²/2b} · S_n(ρ)`.
    pub fn transform_coefficient(&self, n: i32, rho: f64) -> C64 {
        let Some(p) = self.profile(n) else {
            return C64::new(0.0, 0.0);
        };
        let b = self.params.b();
        let omega = self.spectrum.omega;
        let c = omega / b;
        let mut s = C64::new(0.0, 0.0);
        match self.spectrum.domain {
            SpectrumDomain::Transform => {
                if rho < omega {
                    for j in 0..p.eps.len() {
                        s += p.eps[j] * bessel_j(p.order, p.alphas[j] * rho / b).unwrap_or(f64::NAN);
                    }
                }
            }
            SpectrumDomain::Field => {
                for j in 0..p.eps.len() {
                    let l = lommel_at(p.order, p.alphas[j], p.zeros[j], p.jn1[j], rho, c)
                        .unwrap_or(f64::NAN);
                    s += p.eps[j] * (b * b * l);
                }
            }
        }
        i_power(p.order.value(), -1.0) * self.params.ell1() / b
            * C64::from_polar(1.0, self.params.d() * rho * rho / (2.0 * b))
            * s
    }

    /// `Σ_n` [`transform_coefficient`](Self::transform_coefficient)`(n, ρ) e^{inφ}`,
    /// which is the OLCT when the offsets vanish and the order map is the identity.
    pub fn transform_closed_form(&self, rho: f64, phi: f64) -> C64 {
        self.profiles
            .iter()
            .map(|p| self.transform_coefficient(p.n, rho) * C64::from_polar(1.0, p.n as f64 * phi))
            .sum()
    }

    fn envelope(&self, r: f64) -> f64 {
        self.profiles.iter().map(|p| self.radial(p, r).norm()).sum()
    }

    fn find_extent(&self) -> f64 {
        let omega = self.spectrum.omega;
        if self.spectrum.domain == SpectrumDomain::Field {
            return omega;
        }
        let c = omega / self.params.b();
        let alpha_max = self
            .profiles
            .iter()
            .flat_map(|p| p.alphas.last().copied())
            .fold(0.0, f64::max);
        let h = std::f64::consts::PI / (6.0 * c);
        let cap = alpha_max + 1500.0 / c;
        let quiet_run = 60.0 / c;
        let mut peak = 0.0f64;
        let mut last_loud = 0.0;
        let mut r = 0.0;
        while r <= cap {
            let e = self.envelope(r);
            peak = peak.max(e);
            if e > 1e-10 * peak {
                last_loud = r;
            } else if r > 2.0 * alpha_max && r - last_loud > quiet_run {
                break;
            }
            r += h;
        }
        if peak == 0.0 {
            return alpha_max.max(1.0);
        }
        (last_loud + 2.0 * h).min(cap)
    }
}

impl PolarFunction for PolarField {
    fn eval(&self, r: f64, theta: f64) -> C64 {
        self.evaluate(r, theta)
    }

    fn eval_ring(&self, r: f64, thetas: &[f64], out: &mut [C64]) {
        let f: Vec<(i32, C64)> = self.profiles.iter().map(|p| (p.n, self.radial(p, r))).collect();
        for (o, &t) in out.iter_mut().zip(thetas) {
            *o = f
                .iter()
                .map(|(n, v)| v * C64::from_polar(1.0, *n as f64 * t))
                .sum();
        }
    }

    /// Where the field envelope stays below `1e-10` of its peak.
    fn radial_extent(&self) -> f64 {
        *self.extent.get_or_init(|| self.find_extent())
    }

    fn chirp_rate(&self) -> f64 {
        -self.params.a() / (2.0 * self.params.b())
    }

    fn angular_bandwidth(&self) -> usize {
        self.spectrum.k
    }

    fn radial_wavenumber(&self) -> f64 {
        match self.spectrum.domain {
            SpectrumDomain::Transform => self.spectrum.omega / self.params.b(),
            SpectrumDomain::Field => self
                .profiles
                .iter()
                .flat_map(|p| p.zeros.last().copied())
                .fold(0.0, f64::max)
                / self.spectrum.omega,
        }
    }
}
