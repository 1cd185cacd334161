//! Transform parameters `(a, b, c, d, τ, η)` and the scalars derived from them.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const DET_TOL: f64 = 1e-12;

/// Validated OLCT parameters with `ad - bc = 1` and `b > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffsetParams {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    tau: [f64; 2],
    eta: [f64; 2],
    phi1: f64,
    phi2: f64,
    mu1: f64,
    mu2: f64,
    ell1: C64,
    ell2: C64,
    sigma: C64,
}

impl OffsetParams {
    pub fn new(a: f64, b: f64, c: f64, d: f64, tau: [f64; 2], eta: [f64; 2]) -> Result<Self> {
        let all = [a, b, c, d, tau[0], tau[1], eta[0], eta[1]];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite parameter".into()));
        }
        if !(b > 0.0) {
            return Err(Error::InvalidParams(format!("b must be > 0, got {b}")));
        }
        let det = a * d - b * c;
        if (det - 1.0).abs() > DET_TOL {
            return Err(Error::InvalidParams(format!(
                "ad - bc must equal 1, got {det}"
            )));
        }
        let s = [d * tau[0] - b * eta[0], d * tau[1] - b * eta[1]];
        let mu1 = tau[0].hypot(tau[1]);
        let mu2 = s[0].hypot(s[1]);
        let ell1 = C64::from_polar(1.0, d * mu1 * mu1 / b);
        let ell2 = C64::from_polar(1.0, -a * mu2 * mu2 / b);
        Ok(Self {
            a,
            b,
            c,
            d,
            tau,
            eta,
            phi1: tau[0].atan2(tau[1]),
            phi2: s[0].atan2(s[1]),
            mu1,
            mu2,
            ell1,
            ell2,
            sigma: ell1 * ell2,
        })
    }

    /// Linear canonical parameters without offsets.
    pub fn lct(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(a, b, c, d, [0.0; 2], [0.0; 2])
    }

    /// `A = (0, 1; -1, 0)`, `τ = η = 0`: the classical Fourier/Hankel case.
    pub fn reduction() -> Self {
        Self::lct(0.0, 1.0, -1.0, 0.0).expect("reduction parameters are valid")
    }

    /// Returns a copy with new offsets.
    pub fn with_offsets(&self, tau: [f64; 2], eta: [f64; 2]) -> Result<Self> {
        Self::new(self.a, self.b, self.c, self.d, tau, eta)
    }

    pub fn a(&self) -> f64 {
        self.a
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn d(&self) -> f64 {
        self.d
    }
    pub fn tau(&self) -> [f64; 2] {
        self.tau
    }
    pub fn eta(&self) -> [f64; 2] {
        self.eta
    }
    pub fn phi1(&self) -> f64 {
        self.phi1
    }
    pub fn phi2(&self) -> f64 {
        self.phi2
    }
    pub fn mu1(&self) -> f64 {
        self.mu1
    }
    pub fn mu2(&self) -> f64 {
        self.mu2
    }
    pub fn ell1(&self) -> C64 {
        self.ell1
    }
    pub fn ell2(&self) -> C64 {
        self.ell2
    }
    pub fn sigma(&self) -> C64 {
        self.sigma
    }

    /// True when both offsets vanish.
    pub fn is_centered(&self) -> bool {
        self.tau == [0.0; 2] && self.eta == [0.0; 2]
    }

    pub fn inverse(&self) -> InverseParams {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        InverseParams {
            a: d,
            b: -b,
            c: -c,
            d: a,
            xi: [b * self.eta[0] - d * self.tau[0], b * self.eta[1] - d * self.tau[1]],
            gamma: [c * self.tau[0] - a * self.eta[0], c * self.tau[1] - a * self.eta[1]],
        }
    }

    /// Pointwise polar kernel `K(r, θ; ρ, φ)` of the forward transform.
    pub fn kernel(&self, r: f64, theta: f64, rho: f64, phi: f64) -> C64 {
        let b = self.b;
        let phase = self.a * r * r / (2.0 * b) - r * rho * (theta - phi).cos() / b
            + self.d * rho * rho / (2.0 * b)
            + r * self.mu1 * (theta + self.phi1).sin() / b
            - rho * self.mu2 * (phi + self.phi2).sin() / b;
        self.ell1 * C64::from_polar(1.0, phase) / (2.0 * std::f64::consts::PI * b)
    }
}

/// Parameters of the inverse transform: `A⁻¹ = (d, -b; -c, a)`, `ξ = bη - dτ`,
/// `γ = cτ - aη`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub xi: [f64; 2],
    pub gamma: [f64; 2],
}

impl InverseParams {
    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// Applies the inverse map again; recovers the original `(a, b, c, d)`.
    pub fn matrix_inverse(&self) -> (f64, f64, f64, f64) {
        (self.d, -self.b, -self.c, self.a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn rejects_bad_matrices() {
        assert!(OffsetParams::lct(1.0, 2.0, 0.0, 0.5).is_err());
        assert!(OffsetParams::lct(1.0, -1.0, 0.0, 1.0).is_err());
        assert!(OffsetParams::lct(1.0, 0.0, 0.0, 1.0).is_err());
        assert!(OffsetParams::lct(1.0, 2.0, -0.25, 0.5).is_ok());
    }

    #[test]
    fn derived_scalars() {
        let p = OffsetParams::new(1.0, 1.0, 0.0, 1.0, [0.3, 0.4], [0.1, -0.2]).unwrap();
        assert_abs_diff_eq!(p.mu1(), 0.5, epsilon = 1e-15);
        let s: [f64; 2] = [0.3 - 0.1, 0.4 + 0.2];
        assert_abs_diff_eq!(p.mu2(), s[0].hypot(s[1]), epsilon = 1e-15);
        assert_abs_diff_eq!(p.phi1(), 0.3f64.atan2(0.4), epsilon = 1e-15);
        for z in [p.ell1(), p.ell2(), p.sigma()] {
            assert_abs_diff_eq!(z.norm(), 1.0, epsilon = 1e-12);
        }
        assert_abs_diff_eq!((p.sigma() - p.ell1() * p.ell2()).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn offset_phases_match_dot_products() {
        let p = OffsetParams::new(0.5, 2.0, -0.25, 1.0, [0.0, -0.7], [0.4, 0.0]).unwrap();
        let (r, th): (f64, f64) = (1.3, 2.1);
        let x = [r * th.cos(), r * th.sin()];
        let tau = p.tau();
        let lhs = r * p.mu1() * (th + p.phi1()).sin();
        assert_abs_diff_eq!(lhs, tau[0] * x[0] + tau[1] * x[1], epsilon = 1e-14);
        let s = [p.d() * tau[0] - p.b() * p.eta()[0], p.d() * tau[1] - p.b() * p.eta()[1]];
        let rhs = r * p.mu2() * (th + p.phi2()).sin();
        assert_abs_diff_eq!(rhs, s[0] * x[0] + s[1] * x[1], epsilon = 1e-14);
    }

    #[test]
    fn inverse_params() {
        let p = OffsetParams::new(2.0, 1.0, 1.0, 1.0, [0.2, 0.1], [-0.3, 0.5]).unwrap();
        let inv = p.inverse();
        assert_abs_diff_eq!(inv.det(), 1.0, epsilon = 1e-15);
        assert_eq!(inv.matrix_inverse(), (2.0, 1.0, 1.0, 1.0));
        assert_abs_diff_eq!(inv.xi[0], 1.0 * -0.3 - 1.0 * 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(inv.gamma[1], 1.0 * 0.1 - 2.0 * 0.5, epsilon = 1e-15);
    }
}
