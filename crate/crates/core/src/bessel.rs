//! Bessel functions of the first kind, their positive zeros, normalized
//! sampling abscissae and the λ-sum kernel factor.
//!
//! Integer orders go through Miller's backward recurrence, normalized with
//! `J0 + 2 Σ J_2k = 1`, which is stable at every argument. Non-integer orders
//! use the Steed/Temme continued-fraction scheme, which also yields `Y_ν` and
//! therefore covers `-1/2 ≤ v < 0` through the reflection formula.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

use crate::error::{Error, Result};

/// A Bessel order `v ≥ -1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselOrder(f64);

impl BesselOrder {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value < -0.5 {
            return Err(Error::Domain(format!(
                "Bessel order must be finite and >= -1/2, got {value}"
            )));
        }
        Ok(Self(value))
    }

    pub fn integer(n: u32) -> Self {
        Self(n as f64)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Returns the order as an integer when it is integral.
    pub fn as_integer(self) -> Option<i32> {
        if self.0.fract() == 0.0 && self.0.abs() < i32::MAX as f64 {
            Some(self.0 as i32)
        } else {
            None
        }
    }
}

impl From<u32> for BesselOrder {
    fn from(n: u32) -> Self {
        Self::integer(n)
    }
}

/// `J_v(x)` for `v ≥ -1/2` and `x ≥ 0`.
pub fn bessel_j(order: BesselOrder, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "Bessel argument must be finite and >= 0, got {x}"
        )));
    }
    Ok(match order.as_integer() {
        Some(n) => bessel_jn(n, x),
        None => real_order(order.value(), x),
    })
}

/// `J_v(x)` evaluated through the real-order path even when `v` is integral.
///
/// Exposed so the two evaluation paths can be compared against each other.
pub fn bessel_j_real(order: BesselOrder, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!(
            "Bessel argument must be finite and >= 0, got {x}"
        )));
    }
    Ok(real_order(order.value(), x))
}

fn real_order(v: f64, x: f64) -> f64 {
    if x == 0.0 {
        return match v {
            0.0 => 1.0,
            v if v > 0.0 => 0.0,
            _ => f64::INFINITY,
        };
    }
    if v >= 0.0 {
        steed(v, x).0
    } else {
        let nu = -v;
        let (j, y) = steed(nu, x);
        (nu * PI).cos() * j - (nu * PI).sin() * y
    }
}

/// `J_n(x)` for any integer order and real argument.
pub fn bessel_jn(n: i32, x: f64) -> f64 {
    let parity = |k: i32| if k % 2 == 0 { 1.0 } else { -1.0 };
    let mut sign = 1.0;
    let mut m = n;
    if m < 0 {
        m = -m;
        sign *= parity(m);
    }
    let mut ax = x;
    if ax < 0.0 {
        ax = -ax;
        sign *= parity(m);
    }
    sign * miller_single(m as usize, ax)
}

/// `[J_0(x), J_1(x), …, J_nmax(x)]` for `x ≥ 0` in one backward sweep.
pub fn bessel_jn_all(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let start = miller_start(nmax, x);
    let mut next = 0.0_f64; // J_{k+1}
    let mut cur = 1e-300_f64; // J_k
    let mut norm = 0.0;
    for k in (1..=start).rev() {
        if k <= nmax {
            out[k] = cur;
        }
        if k % 2 == 0 {
            norm += 2.0 * cur;
        }
        let prev = (2.0 * k as f64 / x) * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            for v in out.iter_mut() {
                *v *= 1e-250;
            }
        }
    }
    out[0] = cur;
    norm += cur;
    for v in out.iter_mut() {
        *v /= norm;
    }
    out
}

fn miller_start(nmax: usize, x: f64) -> usize {
    let top = (nmax as f64).max(x);
    let k = top + 12.5 * x.cbrt() + 25.0;
    let k = k.ceil() as usize;
    k + (k % 2)
}

fn miller_single(n: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    let start = miller_start(n, x);
    let mut next = 0.0_f64;
    let mut cur = 1e-300_f64;
    let mut norm = 0.0;
    let mut keep = 0.0;
    for k in (1..=start).rev() {
        if k == n {
            keep = cur;
        }
        if k % 2 == 0 {
            norm += 2.0 * cur;
        }
        let prev = (2.0 * k as f64 / x) * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            keep *= 1e-250;
        }
    }
    if n == 0 {
        keep = cur;
    }
    norm += cur;
    keep / norm
}

// Taylor coefficients of 1/Γ(z) about z = 0 (c[k] multiplies z^k).
const RGAMMA: [f64; 27] = [
    0.0,
    1.0,
    0.577_215_664_901_532_9,
    -0.655_878_071_520_253_9,
    -0.042_002_635_034_095_24,
    0.166_538_611_382_291_5,
    -0.042_197_734_555_544_34,
    -0.009_621_971_527_876_974,
    0.007_218_943_246_663_1,
    -0.001_165_167_591_859_065,
    -0.000_215_241_674_114_951,
    0.000_128_050_282_388_116_2,
    -2.013_485_478_078_824e-5,
    -1.250_493_482_142_671e-6,
    1.133_027_231_981_696e-6,
    -2.056_338_416_977_607e-7,
    6.116_095_104_481_416e-9,
    5.002_007_644_469_223e-9,
    -1.181_274_570_487_02e-9,
    1.043_426_711_691_1e-10,
    7.782_263_439_905_071e-12,
    -3.696_805_618_642_206e-12,
    5.100_370_287_454_476e-13,
    -2.058_326_053_566_507e-14,
    -5.348_122_539_423_018e-15,
    1.226_778_628_238_261e-15,
    -1.181_259_301_697_459e-16,
];

/// Returns (gam1, gam2, 1/Γ(1+μ), 1/Γ(1-μ)) for |μ| ≤ 1/2.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    let mut gam1 = 0.0;
    let mut gam2 = 0.0;
    for k in (1..RGAMMA.len()).rev() {
        if k % 2 == 0 {
            gam1 = gam1 * mu * mu - RGAMMA[k];
        } else {
            gam2 = gam2 * mu * mu + RGAMMA[k];
        }
    }
    // gam1 = -Σ_{k even} c_k μ^{k-2}, gam2 = Σ_{k odd} c_k μ^{k-1}
    let gampl = gam2 - mu * gam1;
    let gammi = gam2 + mu * gam1;
    (gam1, gam2, gampl, gammi)
}

/// Steed's method with Temme's series for small x. Returns (J_ν, Y_ν), ν ≥ 0, x > 0.
fn steed(nu: f64, x: f64) -> (f64, f64) {
    const EPS: f64 = 1e-16;
    const FPMIN: f64 = 1e-300;
    const MAXIT: usize = 1_000_000;
    const XMIN: f64 = 2.0;

    let nl = if x < XMIN {
        (nu + 0.5) as usize
    } else {
        (nu - x + 1.5).max(0.0) as usize
    };
    let xmu = nu - nl as f64;
    let xmu2 = xmu * xmu;
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let w = xi2 / PI;

    // CF1: f = J'_ν / J_ν
    let mut isign = 1.0;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    for _ in 0..MAXIT {
        b += xi2;
        d = b - d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b - 1.0 / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = c * d;
        h *= del;
        if d < 0.0 {
            isign = -isign;
        }
        if (del - 1.0).abs() < EPS {
            break;
        }
    }

    let mut rjl = isign * FPMIN;
    let mut rjpl = h * rjl;
    let rjl1 = rjl;
    let mut fact = nu * xi;
    for _ in (1..=nl).rev() {
        let rjtemp = fact * rjl + rjpl;
        fact -= xi;
        rjpl = fact * rjtemp - rjl;
        rjl = rjtemp;
    }
    if rjl == 0.0 {
        rjl = EPS;
    }
    let f = rjpl / rjl;

    let (rjmu, mut rymu, mut ry1);
    if x < XMIN {
        let x2 = 0.5 * x;
        let pimu = PI * xmu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = xmu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(xmu);
        let mut ff = 2.0 / PI * fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let e = e.exp();
        let mut p = e / (gampl * PI);
        let mut q = 1.0 / (e * PI * gammi);
        let pimu2 = 0.5 * pimu;
        let fact3 = if pimu2.abs() < EPS {
            1.0
        } else {
            pimu2.sin() / pimu2
        };
        let r = PI * pimu2 * fact3 * fact3;
        let mut c = 1.0;
        let d = -x2 * x2;
        let mut sum = ff + r * q;
        let mut sum1 = p;
        let mut i = 1.0;
        loop {
            ff = (i * ff + p + q) / (i * i - xmu2);
            c *= d / i;
            p /= i - xmu;
            q /= i + xmu;
            let del = c * (ff + r * q);
            sum += del;
            let del1 = c * p - i * del;
            sum1 += del1;
            if del.abs() < (1.0 + sum.abs()) * EPS || i > 1000.0 {
                break;
            }
            i += 1.0;
        }
        rymu = -sum;
        ry1 = -sum1 * xi2;
        let rymup = xmu * xi * rymu - ry1;
        rjmu = w / (rymup - f * rymu);
    } else {
        // CF2: p + iq = (J' + iY')/(J + iY)
        let mut a = 0.25 - xmu2;
        let mut p = -0.5 * xi;
        let mut q = 1.0;
        let br = 2.0 * x;
        let mut bi = 2.0;
        let mut fact = a * xi / (p * p + q * q);
        let mut cr = br + q * fact;
        let mut ci = bi + p * fact;
        let mut den = br * br + bi * bi;
        let mut dr = br / den;
        let mut di = -bi / den;
        let mut dlr = cr * dr - ci * di;
        let mut dli = cr * di + ci * dr;
        let mut temp = p * dlr - q * dli;
        q = p * dli + q * dlr;
        p = temp;
        for i in 2..MAXIT {
            a += 2.0 * (i as f64 - 1.0);
            bi += 2.0;
            dr = a * dr + br;
            di = a * di + bi;
            if dr.abs() + di.abs() < FPMIN {
                dr = FPMIN;
            }
            fact = a / (cr * cr + ci * ci);
            cr = br + cr * fact;
            ci = bi - ci * fact;
            if cr.abs() + ci.abs() < FPMIN {
                cr = FPMIN;
            }
            den = dr * dr + di * di;
            dr /= den;
            di = -di / den;
            dlr = cr * dr - ci * di;
            dli = cr * di + ci * dr;
            temp = p * dlr - q * dli;
            q = p * dli + q * dlr;
            p = temp;
            if (dlr - 1.0).abs() + dli.abs() < EPS {
                break;
            }
        }
        let gam = (p - f) / q;
        let mag = (w / ((p - f) * gam + q)).sqrt();
        rjmu = mag.copysign(rjl);
        rymu = rjmu * gam;
        let rymup = rymu * (p + q / gam);
        ry1 = xmu * xi * rymu - rymup;
    }

    let scale = rjmu / rjl;
    let rj = rjl1 * scale;
    for i in 1..=nl {
        let rytemp = (xmu + i as f64) * xi2 * ry1 - rymu;
        rymu = ry1;
        ry1 = rytemp;
    }
    (rj, rymu)
}

/// `J'_v(x) = (v/x) J_v(x) - J_{v+1}(x)`.
pub fn bessel_j_derivative(order: BesselOrder, x: f64) -> Result<f64> {
    let v = order.value();
    let next = bessel_j(BesselOrder::new(v + 1.0)?, x)?;
    if x == 0.0 {
        return Ok(if v == 1.0 { 0.5 } else { 0.0 } - next);
    }
    Ok(v / x * bessel_j(order, x)? - next)
}

/// McMahon's large-index approximation of the j-th positive zero.
pub fn mcmahon_zero(order: BesselOrder, index: usize) -> f64 {
    let mu = 4.0 * order.value().powi(2);
    let beta = (index as f64 + order.value() / 2.0 - 0.25) * PI;
    let e = 8.0 * beta;
    beta - (mu - 1.0) / e - 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e.powi(3))
}

/// Ordered positive zeros of `J_v`.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroTable {
    order: BesselOrder,
    zeros: Vec<f64>,
}

impl ZeroTable {
    pub fn new(order: BesselOrder, count: usize) -> Result<Self> {
        let zeros = cached_zeros(order, count)?;
        Ok(Self { order, zeros })
    }

    pub fn order(&self) -> BesselOrder {
        self.order
    }

    pub fn zeros(&self) -> &[f64] {
        &self.zeros
    }

    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    /// 1-based access, matching the usual `z_{vj}` numbering.
    pub fn get(&self, index: usize) -> Option<f64> {
        index.checked_sub(1).and_then(|i| self.zeros.get(i).copied())
    }
}

/// The `index`-th positive zero (1-based) of `J_v`.
pub fn bessel_zero(order: BesselOrder, index: usize) -> Result<f64> {
    if index == 0 {
        return Err(Error::Domain("zero index is 1-based".into()));
    }
    Ok(cached_zeros(order, index)?[index - 1])
}

fn zero_cache() -> &'static Mutex<HashMap<u64, Vec<f64>>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Vec<f64>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn cached_zeros(order: BesselOrder, count: usize) -> Result<Vec<f64>> {
    let key = order.value().to_bits();
    {
        let cache = zero_cache().lock().unwrap_or_else(|e| e.into_inner());
        if let Some(z) = cache.get(&key) {
            if z.len() >= count {
                return Ok(z[..count].to_vec());
            }
        }
    }
    let zeros = find_zeros(order, count)?;
    let mut cache = zero_cache().lock().unwrap_or_else(|e| e.into_inner());
    let entry = cache.entry(key).or_default();
    if entry.len() < zeros.len() {
        *entry = zeros.clone();
    }
    Ok(zeros)
}

fn find_zeros(order: BesselOrder, count: usize) -> Result<Vec<f64>> {
    let v = order.value();
    let f = |x: f64| bessel_j(order, x);
    let mut zeros = Vec::with_capacity(count);
    // J_v has no positive zero below v (v >= 0); for v < 0 the first zero lies above π/2 - ish.
    let step = 0.5;
    let mut lo = (v.max(0.0)).max(0.25);
    let mut flo = f(lo)?;
    while zeros.len() < count {
        let hi = lo + step;
        let fhi = f(hi)?;
        if flo == 0.0 {
            zeros.push(lo);
        } else if flo.signum() != fhi.signum() && fhi != 0.0 {
            zeros.push(polish_zero(order, lo, hi, flo)?);
        }
        lo = hi;
        flo = fhi;
    }
    Ok(zeros)
}

fn polish_zero(order: BesselOrder, mut lo: f64, mut hi: f64, flo: f64) -> Result<f64> {
    let f = |x: f64| bessel_j(order, x);
    let lo_sign = flo.signum();
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..60 {
        let fx = f(x)?;
        if fx == 0.0 {
            break;
        }
        if fx.signum() == lo_sign {
            lo = x;
        } else {
            hi = x;
        }
        let dfx = bessel_j_derivative(order, x)?;
        let mut next = x - fx / dfx;
        if !(next >= lo && next <= hi) {
            next = 0.5 * (lo + hi);
        }
        let done = (next - x).abs() <= 2.0 * f64::EPSILON * x;
        x = next;
        if done {
            break;
        }
    }
    Ok(x)
}

/// `α_{vj} = b·z_{vj}/Ω`.
pub fn normalized_zero(b: f64, omega: f64, order: BesselOrder, index: usize) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::Domain(format!("bandlimit must be positive, got {omega}")));
    }
    if !(b > 0.0) {
        return Err(Error::InvalidParams(format!("b must be positive, got {b}")));
    }
    Ok(b * bessel_zero(order, index)? / omega)
}

/// Default truncation `⌈x⌉ + 30` for [`lambda_sum`].
pub fn default_lambda_truncation(x: f64) -> usize {
    x.abs().ceil() as usize + 30
}

/// `Σ_{|m|≤M} J_m(x)`, which tends to 1 as M grows.
pub fn lambda_sum(x: f64, truncation: usize) -> f64 {
    let all = bessel_jn_all(truncation, x.abs());
    let mut sum = all[0];
    for m in 1..=truncation {
        // J_{-m} = (-1)^m J_m; odd orders cancel for x >= 0.
        let neg = if m % 2 == 0 { 1.0 } else { -1.0 };
        let sign = if x < 0.0 && m % 2 == 1 { -1.0 } else { 1.0 };
        sum += sign * all[m] * (1.0 + neg);
    }
    sum
}

/// Fourth-order expansion of `J_v(z + δ)/δ` around a zero `z` of `J_v`.
///
/// `dj` is `J_v'(z) = -J_{v+1}(z)`. Used to evaluate 0/0 quotients near
/// sampling abscissae without cancellation.
pub(crate) fn quotient_near_zero(v: f64, z: f64, dj: f64, delta: f64) -> f64 {
    let z2 = z * z;
    let d2 = -dj / z;
    let d3 = dj * (2.0 + v * v - z2) / z2;
    let d4 = -d3 / z + dj * (z2 - 4.0 - 5.0 * v * v) / (z2 * z);
    dj + delta * (d2 / 2.0 + delta * (d3 / 6.0 + delta * d4 / 24.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ascending(v: f64, x: f64) -> f64 {
        // Only used for x small enough that the series does not cancel.
        let mut term = (x / 2.0).powf(v) / gamma_pos(v + 1.0);
        let mut sum = term;
        for k in 1..200 {
            term *= -(x * x / 4.0) / (k as f64 * (k as f64 + v));
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    }

    // Lanczos for positive arguments, enough for oracle use.
    fn gamma_pos(x: f64) -> f64 {
        const G: [f64; 9] = [
            0.999_999_999_999_809_9,
            676.520_368_121_885_1,
            -1_259.139_216_722_402_8,
            771.323_428_777_653_1,
            -176.615_029_162_140_6,
            12.507_343_278_686_905,
            -0.138_571_095_265_720_12,
            9.984_369_578_019_572e-6,
            1.505_632_735_149_311_6e-7,
        ];
        let x = x - 1.0;
        let mut a = G[0];
        let t = x + 7.5;
        for (i, g) in G.iter().enumerate().skip(1) {
            a += g / (x + i as f64);
        }
        (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
    }

    fn integral_rep(n: i32, x: f64, nodes: usize) -> f64 {
        let h = 2.0 * PI / nodes as f64;
        (0..nodes)
            .map(|k| {
                let t = -PI + k as f64 * h;
                (n as f64 * t - x * t.sin()).cos()
            })
            .sum::<f64>()
            * h
            / (2.0 * PI)
    }

    const FROZEN: [(f64, f64, f64); 18] = [
        (0.0, 5.0, -0.177_596_771_314_338_3),
        (1.0, 10.0, 0.043_472_746_168_861_44),
        (5.0, 30.0, -0.143_240_295_512_077_1),
        (2.5, 7.3, -0.300_849_431_587_499_8),
        (0.3, 1.7, 0.557_578_403_452_082_2),
        (-0.3, 4.2, -0.290_623_229_803_962_2),
        (8.0, 100.0, 0.043_349_559_882_386_46),
        (0.0, 1000.0, 0.024_786_686_152_420_175),
        (3.7, 0.5, 0.000_378_608_560_810_518_2),
        (20.0, 15.0, 0.007_360_234_079_223_485),
        (7.25, 250.0, 0.034_060_104_620_161_85),
        (0.0, 12.5, 0.146_884_054_700_421_1),
        (3.0, 12.0, 0.195_136_939_531_092_68),
        (40.0, 30.0, 0.000_361_202_360_889_658_5),
        (-0.5, 3.0, -0.456_048_820_794_633_2),
        (1.5, 285.571_428_571_428_56, 0.044_964_966_903_620_086),
        (0.75, 1.99, 0.571_903_519_820_474_5),
        (0.75, 2.01, 0.567_701_674_486_386_6),
    ];

    #[test]
    fn frozen_reference_values() {
        for &(v, x, want) in &FROZEN {
            let got = bessel_j(BesselOrder::new(v).unwrap(), x).unwrap();
            assert_abs_diff_eq!(got, want, epsilon = 1e-13);
        }
    }

    #[test]
    fn trivial_points() {
        assert_eq!(bessel_j(BesselOrder::integer(0), 0.0).unwrap(), 1.0);
        assert_eq!(bessel_j(BesselOrder::integer(1), 0.0).unwrap(), 0.0);
        assert_eq!(bessel_j(BesselOrder::new(0.5).unwrap(), 0.0).unwrap(), 0.0);
        let z = bessel_j(BesselOrder::integer(0), 2.404_825_557_695_773).unwrap();
        assert!(z.abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_domain() {
        assert!(BesselOrder::new(-0.6).is_err());
        assert!(BesselOrder::new(f64::NAN).is_err());
        assert!(bessel_j(BesselOrder::integer(0), -1.0).is_err());
    }

    #[test]
    fn matches_ascending_series_for_small_arguments() {
        for &v in &[0.0, 0.5, 1.0, 1.3, 2.0, 4.6, 7.0] {
            for &x in &[0.01, 0.3, 1.0, 2.5, 4.0] {
                let want = ascending(v, x);
                let got = bessel_j(BesselOrder::new(v).unwrap(), x).unwrap();
                assert_abs_diff_eq!(got, want, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn half_integer_closed_forms() {
        for &x in &[0.2, 1.0, 3.3, 17.0, 90.0, 640.0] {
            let s = (2.0 / (PI * x)).sqrt();
            let j = |v: f64| bessel_j(BesselOrder::new(v).unwrap(), x).unwrap();
            assert_abs_diff_eq!(j(0.5), s * x.sin(), epsilon = 1e-12);
            assert_abs_diff_eq!(j(-0.5), s * x.cos(), epsilon = 1e-12);
            assert_abs_diff_eq!(j(1.5), s * (x.sin() / x - x.cos()), epsilon = 1e-12);
        }
    }

    #[test]
    fn integral_representation_agrees() {
        for n in 0..=6 {
            for &x in &[0.5, 1.0, 5.0, 10.0] {
                let want = integral_rep(n, x, 4096);
                assert_abs_diff_eq!(bessel_jn(n, x), want, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn integer_and_real_paths_agree() {
        for n in 0..=10u32 {
            for &x in &[0.1, 1.5, 1.99, 2.0, 7.0, 33.0, 120.0, 999.0] {
                let o = BesselOrder::integer(n);
                let a = bessel_j(o, x).unwrap();
                let b = bessel_j_real(o, x).unwrap();
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn negative_integer_orders() {
        for m in 0..12 {
            for &x in &[0.0, 0.7, 9.0, 49.0] {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                assert_abs_diff_eq!(bessel_jn(-m, x), sign * bessel_jn(m, x), epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn all_orders_match_single() {
        let all = bessel_jn_all(30, 17.5);
        for (n, v) in all.iter().enumerate() {
            assert_abs_diff_eq!(*v, bessel_jn(n as i32, 17.5), epsilon = 1e-15);
        }
    }

    #[test]
    fn frozen_zeros() {
        let cases: [(f64, [f64; 3]); 4] = [
            (0.0, [2.404_825_557_695_773, 5.520_078_110_286_311, 156.295_034_268_533_52]),
            (1.0, [3.831_705_970_207_512, 7.015_586_669_815_619, 157.862_655_401_930_3]),
            (2.5, [5.763_459_196_894_55, 9.095_011_330_476_355, 160.202_499_033_490_5]),
            (8.0, [12.225_092_264_004_655, 16.037_774_190_887_71, 168.671_596_460_277_6]),
        ];
        for (v, want) in cases {
            let o = BesselOrder::new(v).unwrap();
            for (idx, w) in [1usize, 2, 50].into_iter().zip(want) {
                assert_abs_diff_eq!(bessel_zero(o, idx).unwrap(), w, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn zeros_against_bisection_oracle() {
        let bisect = |v: f64, mut lo: f64, mut hi: f64| {
            let f = |x: f64| ascending(v, x);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(lo).signum() == f(mid).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        let z0 = bisect(0.0, 2.0, 3.0);
        let z1 = bisect(1.0, 3.0, 4.0);
        assert_abs_diff_eq!(bessel_zero(BesselOrder::integer(0), 1).unwrap(), z0, epsilon = 1e-12);
        assert_abs_diff_eq!(bessel_zero(BesselOrder::integer(1), 1).unwrap(), z1, epsilon = 1e-12);
    }

    #[test]
    fn mcmahon_tracks_large_index() {
        let o = BesselOrder::integer(0);
        for j in 20..=60 {
            let z = bessel_zero(o, j).unwrap();
            assert!((z - (j as f64 - 0.25) * PI).abs() < 0.1);
            assert!((z - mcmahon_zero(o, j)).abs() < 1e-6);
        }
    }

    #[test]
    fn zero_table_properties() {
        let t = ZeroTable::new(BesselOrder::new(-0.5).unwrap(), 10).unwrap();
        // J_{-1/2} ∝ cos x: zeros at (j - 1/2)π
        for j in 1..=10 {
            assert_abs_diff_eq!(t.get(j).unwrap(), (j as f64 - 0.5) * PI, epsilon = 1e-12);
        }
        assert_eq!(t.get(0), None);
        assert!(bessel_zero(BesselOrder::integer(0), 0).is_err());
    }

    #[test]
    fn normalized_zero_examples() {
        let z01 = 2.404_825_557_695_773;
        let o0 = BesselOrder::integer(0);
        assert_abs_diff_eq!(normalized_zero(1.0, 1.0, o0, 1).unwrap(), z01, epsilon = 1e-12);
        assert_abs_diff_eq!(normalized_zero(2.0, 1.0, o0, 1).unwrap(), 2.0 * z01, epsilon = 1e-12);
        assert_abs_diff_eq!(
            normalized_zero(1.0, PI, BesselOrder::integer(1), 1).unwrap(),
            3.831_705_970_207_512 / PI,
            epsilon = 1e-12
        );
        assert!(normalized_zero(1.0, 0.0, o0, 1).is_err());
    }

    #[test]
    fn lambda_sum_examples() {
        assert_eq!(lambda_sum(0.0, 7), 1.0);
        assert_abs_diff_eq!(lambda_sum(5.0, 40), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(lambda_sum(5.0, 0), -0.177_596_771_314_34, epsilon = 1e-13);
        // direct sum through independently evaluated J_m
        let direct: f64 = (-12..=12).map(|m| bessel_jn(m, 3.3)).sum();
        assert_abs_diff_eq!(lambda_sum(3.3, 12), direct, epsilon = 1e-14);
    }

    #[test]
    fn near_zero_quotient_matches_direct() {
        let o = BesselOrder::new(1.7).unwrap();
        let z = bessel_zero(o, 3).unwrap();
        let dj = -bessel_j(BesselOrder::new(2.7).unwrap(), z).unwrap();
        for &(d, tol) in &[(1e-2, 1e-9), (1e-3, 1e-12), (-1e-3, 1e-12)] {
            let direct = bessel_j(o, z + d).unwrap() / d;
            assert_abs_diff_eq!(quotient_near_zero(1.7, z, dj, d), direct, epsilon = tol);
        }
    }
}
