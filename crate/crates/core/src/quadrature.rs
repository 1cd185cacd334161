//! Gauss–Legendre and periodic trapezoid rules.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64 as C64;

/// Gauss–Legendre nodes and weights on [-1, 1], ascending.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Cached rule with `n` nodes.
    pub fn new(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(rule) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&n) {
            return rule.clone();
        }
        let rule = Arc::new(Self::compute(n.max(1)));
        cache
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .insert(n, rule.clone());
        rule
    }

    fn compute(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let half = n.div_ceil(2);
        for i in 0..half {
            // Tricomi-style initial guess, then Newton on P_n.
            let mut x = ((i as f64 + 0.75) / (n as f64 + 0.5) * PI).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            weights[i] = w;
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped to [a, b].
    pub fn on_interval(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let h = 0.5 * (b - a);
        let m = 0.5 * (b + a);
        let x = self.nodes.iter().map(|t| m + h * t).collect();
        let w = self.weights.iter().map(|w| h * w).collect();
        (x, w)
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let (x, w) = self.on_interval(a, b);
        x.iter().zip(&w).map(|(x, w)| w * f(*x)).sum()
    }
}

// (P_n(x), P_n'(x))
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Uniform angles `2πt/n`, `t = 0..n`.
pub fn periodic_nodes(n: usize) -> Vec<f64> {
    (0..n).map(|t| 2.0 * PI * t as f64 / n as f64).collect()
}

/// Trapezoid rule over one period: `(2π/n) Σ f(θ_t)`.
pub fn periodic_trapezoid(n: usize, f: impl Fn(f64) -> C64) -> C64 {
    let h = 2.0 * PI / n as f64;
    let mut acc = NeumaierSum::default();
    for t in 0..n {
        acc.add(f(h * t as f64));
    }
    acc.value() * h
}

/// Compensated complex summation with a fixed order of accumulation.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: C64,
    comp: C64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: C64) {
        let re = two_sum(self.sum.re, x.re);
        let im = two_sum(self.sum.im, x.im);
        self.sum = C64::new(re.0, im.0);
        self.comp += C64::new(re.1, im.1);
    }

    pub fn value(&self) -> C64 {
        self.sum + self.comp
    }
}

fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let err = if a.abs() >= b.abs() {
        (a - s) + b
    } else {
        (b - s) + a
    };
    (s, err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(8);
        // exact to degree 15
        let v = rule.integrate(0.0, 2.0, |x| x.powi(15) - 3.0 * x.powi(4));
        let want = 2f64.powi(16) / 16.0 - 3.0 * 2f64.powi(5) / 5.0;
        assert_abs_diff_eq!(v, want, epsilon = 1e-10);
    }

    #[test]
    fn weights_sum_to_interval_length() {
        for n in [1, 2, 7, 64, 513, 2048] {
            let rule = GaussLegendre::new(n);
            let s: f64 = rule.weights().iter().sum();
            assert_abs_diff_eq!(s, 2.0, epsilon = 1e-12);
            assert!(rule.nodes().windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn oscillatory_integral() {
        let rule = GaussLegendre::new(200);
        let v = rule.integrate(0.0, 50.0, |x| (3.0 * x).cos());
        assert_abs_diff_eq!(v, (150.0f64).sin() / 3.0, epsilon = 1e-13);
    }

    #[test]
    fn trapezoid_is_exact_for_trig_polynomials() {
        let v = periodic_trapezoid(16, |t| C64::from_polar(1.0, 3.0 * t) + 2.0);
        assert_abs_diff_eq!(v.re, 4.0 * PI, epsilon = 1e-13);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = NeumaierSum::default();
        s.add(C64::new(1e16, 0.0));
        for _ in 0..10 {
            s.add(C64::new(1.0, 0.0));
        }
        s.add(C64::new(-1e16, 0.0));
        assert_eq!(s.value().re, 10.0);
    }
}
