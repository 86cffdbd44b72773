//! Gauss–Legendre rules, a collapsed triangle rule, and the normal CDF.

use std::collections::HashMap;
use std::f64::consts::{PI, SQRT_2};
use std::sync::{Arc, Mutex, OnceLock};

/// Nodes and weights of the `m`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

fn compute_gauss_legendre(m: usize) -> GaussLegendre {
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    for i in 0..m.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pm = if m == 1 { x } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = m as f64 * (x * pm - pm1) / (x * x - 1.0);
            let dx = pm / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    GaussLegendre { nodes, weights }
}

/// Cached Gauss–Legendre rule of order `m ≥ 1`.
pub fn gauss_legendre(m: usize) -> Arc<GaussLegendre> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("quadrature cache");
    guard
        .entry(m)
        .or_insert_with(|| Arc::new(compute_gauss_legendre(m.max(1))))
        .clone()
}

/// `∫_a^b f` by the `m`-point Gauss–Legendre rule.
pub fn integrate<F: FnMut(f64) -> f64>(m: usize, a: f64, b: f64, mut f: F) -> f64 {
    let gl = gauss_legendre(m);
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    let mut s = 0.0;
    for (x, w) in gl.nodes.iter().zip(&gl.weights) {
        s += w * f(c + h * x);
    }
    s * h
}

/// Collapsed product rule on the reference triangle: barycentric pairs
/// `(λ_b, λ_c)` with weights summing to ½.
#[derive(Debug)]
pub struct TriangleRule {
    pub points: Vec<(f64, f64)>,
    pub weights: Vec<f64>,
}

/// Triangle rule of `level`, using `2·level` Gauss points per axis.
pub fn triangle_rule(level: usize) -> Arc<TriangleRule> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<TriangleRule>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("triangle cache");
    guard
        .entry(level)
        .or_insert_with(|| {
            let gl = gauss_legendre(2 * level.max(1));
            let mut points = Vec::new();
            let mut weights = Vec::new();
            for (xs, ws) in gl.nodes.iter().zip(&gl.weights) {
                let s = 0.5 * (xs + 1.0);
                for (xt, wt) in gl.nodes.iter().zip(&gl.weights) {
                    let t = 0.5 * (xt + 1.0);
                    points.push((s * (1.0 - t), s * t));
                    weights.push(0.25 * ws * wt * s);
                }
            }
            Arc::new(TriangleRule { points, weights })
        })
        .clone()
}

/// Standard normal CDF `Φ(x) = γ₁((−∞, x))`.
pub fn phi_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Standard normal density.
pub fn phi_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Inverse normal CDF on `(0, 1)`: rational initial guess refined by Newton
/// steps kept inside a shrinking bracket.
pub fn phi_inv(p: f64) -> f64 {
    if !(p > 0.0 && p < 1.0) {
        return if p == 0.0 {
            f64::NEG_INFINITY
        } else if p == 1.0 {
            f64::INFINITY
        } else {
            f64::NAN
        };
    }
    let mut x = acklam(p);
    let (mut lo, mut hi) = (-40.0f64, 40.0f64);
    for _ in 0..60 {
        let e = phi_cdf(x) - p;
        if e == 0.0 {
            break;
        }
        if e > 0.0 {
            hi = hi.min(x);
        } else {
            lo = lo.max(x);
        }
        let d = phi_pdf(x);
        let mut next = x - e / d;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if (next - x).abs() <= 1e-15 * x.abs().max(1.0) {
            x = next;
            break;
        }
        x = next;
    }
    x
}

fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e1,
        2.209460984245205e2,
        -2.759285104469687e2,
        1.383577518672690e2,
        -3.066479806614716e1,
        2.506628277459239,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e1,
        1.615858368580409e2,
        -1.556989798598866e2,
        6.680131188771972e1,
        -1.328068155288572e1,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-3,
        -3.223964580411365e-1,
        -2.400758277161838,
        -2.549732539343734,
        4.374664141464968,
        2.938163982698783,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-3,
        3.224671290700398e-1,
        2.445134137142996,
        3.754408661907416,
    ];
    let pl = 0.02425;
    if p < pl {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - pl {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_exactness() {
        for m in [1, 2, 5, 32, 64] {
            let gl = gauss_legendre(m);
            let s: f64 = gl.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "order {m}");
            // Exact for x^(2m-2).
            let k = 2 * m as i32 - 2;
            let v = integrate(m, 0.0, 1.0, |x| x.powi(k));
            assert!((v - 1.0 / (k as f64 + 1.0)).abs() < 1e-13, "order {m}");
        }
    }

    #[test]
    fn triangle_rule_polynomials() {
        let r = triangle_rule(5);
        let s: f64 = r.weights.iter().sum();
        assert!((s - 0.5).abs() < 1e-15);
        // ∫_T x^a y^b = a! b! / (a+b+2)!
        let v: f64 = r
            .points
            .iter()
            .zip(&r.weights)
            .map(|((x, y), w)| w * x.powi(3) * y.powi(4))
            .sum();
        assert!((v - 6.0 * 24.0 / 362880.0).abs() < 1e-16);
    }

    #[test]
    fn normal_cdf_values() {
        assert!((phi_cdf(0.0) - 0.5).abs() < 1e-16);
        assert!((phi_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-15);
        assert!((phi_cdf(-8.0) - 6.220_960_574_271_785e-16).abs() < 1e-27);
    }

    #[test]
    fn inverse_round_trip() {
        for k in 1..=99 {
            let y = k as f64 / 100.0;
            assert!((phi_cdf(phi_inv(y)) - y).abs() < 1e-14, "{y}");
        }
        assert!((phi_inv(0.975) - 1.959_963_984_540_054).abs() < 1e-13);
        assert!(phi_inv(1e-300) < -37.0);
    }
}
