//! Measures with density (Lebesgue, Gaussian, power-homogeneous), their mass
//! and boundary quadrature on polytopes, ball masses, the Λⁿ probe, and
//! concavity checks.

use crate::bodies::{firey_comb, HPolytope};
use crate::error::{Error, Result};
use crate::geom::{add, axpy, dot, kappa, norm, scale, sub, Vec3};
use crate::quad::{gauss_legendre, phi_cdf, phi_inv, phi_pdf, triangle_rule};
use crate::surfmeas::SphericalAtomMeasure;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, SQRT_2};

/// Even measure with density on ℝⁿ; the dimension comes from the body.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum DensitySpec {
    Lebesgue,
    Gaussian,
    /// Density `|x|^s`, homogeneous of degree `α = n + s`.
    Power { s: f64 },
}

impl DensitySpec {
    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            DensitySpec::Power { s } if !(s.is_finite() && *s > -(dim as f64)) => Err(
                Error::invalid("measure.s", format!("power exponent must exceed -{dim}, got {s}")),
            ),
            _ => Ok(()),
        }
    }

    /// Density value at `x` in dimension `dim`.
    pub fn density(&self, x: &Vec3, dim: usize) -> f64 {
        match self {
            DensitySpec::Lebesgue => 1.0,
            DensitySpec::Gaussian => {
                (2.0 * PI).powf(-(dim as f64) / 2.0) * (-0.5 * dot(x, x)).exp()
            }
            DensitySpec::Power { s } => norm(x).powf(*s),
        }
    }

    /// Homogeneity degree `α`, if the measure is homogeneous.
    pub fn homogeneity(&self, dim: usize) -> Option<f64> {
        match self {
            DensitySpec::Lebesgue => Some(dim as f64),
            DensitySpec::Power { s } => Some(dim as f64 + s),
            DensitySpec::Gaussian => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            DensitySpec::Lebesgue => "lebesgue".into(),
            DensitySpec::Gaussian => "gaussian".into(),
            DensitySpec::Power { s } => format!("power(s={s})"),
        }
    }

    /// Radial cone factor `∫₀¹ φ(t·x) t^{n−1} dt`.
    fn cone_factor(&self, x: &Vec3, dim: usize, gl_nodes: &[f64], gl_weights: &[f64]) -> f64 {
        match self {
            DensitySpec::Lebesgue => 1.0 / dim as f64,
            DensitySpec::Power { s } => norm(x).powf(*s) / (dim as f64 + s),
            DensitySpec::Gaussian => {
                let r2 = dot(x, x);
                let c = (2.0 * PI).powf(-(dim as f64) / 2.0);
                let mut acc = 0.0;
                for (z, w) in gl_nodes.iter().zip(gl_weights) {
                    let t = 0.5 * (z + 1.0);
                    acc += w * (-0.5 * t * t * r2).exp() * t.powi(dim as i32 - 1);
                }
                0.5 * c * acc
            }
        }
    }
}

/// Concavity transform `F`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum FSpec {
    Power { p: f64 },
    Log,
    /// `F = Φ⁻¹`.
    Ehrhard,
}

impl FSpec {
    fn check(&self, x: f64) -> Result<()> {
        let ok = match self {
            FSpec::Ehrhard => x > 0.0 && x < 1.0,
            _ => x > 0.0 && x.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::FDomain(x))
        }
    }

    pub fn f(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok(match self {
            FSpec::Power { p } => x.powf(*p),
            FSpec::Log => x.ln(),
            FSpec::Ehrhard => phi_inv(x),
        })
    }

    pub fn fprime(&self, x: f64) -> Result<f64> {
        self.check(x)?;
        Ok(match self {
            FSpec::Power { p } => p * x.powf(p - 1.0),
            FSpec::Log => 1.0 / x,
            FSpec::Ehrhard => 1.0 / phi_pdf(phi_inv(x)),
        })
    }

    pub fn finv(&self, y: f64) -> Result<f64> {
        match self {
            FSpec::Power { p } if y > 0.0 => Ok(y.powf(1.0 / p)),
            FSpec::Power { .. } => Err(Error::FDomain(y)),
            FSpec::Log => Ok(y.exp()),
            FSpec::Ehrhard => Ok(phi_cdf(y)),
        }
    }

    pub fn name(&self) -> String {
        match self {
            FSpec::Power { p } => format!("x^{p}"),
            FSpec::Log => "log".into(),
            FSpec::Ehrhard => "ehrhard".into(),
        }
    }
}

/// Quadrature settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    pub radial_order: usize,
    /// Gauss–Legendre order on 2D facets.
    pub facet_order: usize,
    /// Triangle rule level on 3D facets (`2·level` points per axis).
    pub tri_level: usize,
    pub tri_max_subdiv: usize,
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            radial_order: 64,
            facet_order: 32,
            tri_level: 5,
            tri_max_subdiv: 4,
            mc_samples: 200_000,
            seed: 0,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        if self.radial_order < 2 {
            return Err(Error::invalid("radial_order", "must be >= 2"));
        }
        if self.facet_order < 2 {
            return Err(Error::invalid("facet_order", "must be >= 2"));
        }
        if self.tri_level < 1 {
            return Err(Error::invalid("tri_level", "must be >= 1"));
        }
        Ok(())
    }
}

/// Integrates a pair of functions over facet `i` of `body`.
fn facet_integral2<G>(body: &HPolytope, i: usize, cfg: &QuadConfig, g: &G) -> [f64; 2]
where
    G: Fn(&Vec3) -> [f64; 2] + Sync,
{
    let area = body.facet_areas()[i];
    if area <= 0.0 {
        return [0.0, 0.0];
    }
    let f = body.facet(i);
    let v = body.vertices();
    if body.dim() == 2 {
        let (a, b) = (&v[f[0]], &v[f[1]]);
        let gl = gauss_legendre(cfg.facet_order);
        let d = sub(b, a);
        let mut acc = [0.0, 0.0];
        for (z, w) in gl.nodes.iter().zip(&gl.weights) {
            let x = axpy(0.5 * (z + 1.0), &d, a);
            let r = g(&x);
            acc[0] += w * r[0];
            acc[1] += w * r[1];
        }
        [0.5 * area * acc[0], 0.5 * area * acc[1]]
    } else {
        let m = f.len() as f64;
        let mut c = [0.0; 3];
        for &k in f {
            c = add(&c, &v[k]);
        }
        let c = scale(&c, 1.0 / m);
        let mut acc = [0.0, 0.0];
        for k in 0..f.len() {
            let (a, b) = (&v[f[k]], &v[f[(k + 1) % f.len()]]);
            let r = tri_adaptive(&c, a, b, cfg, g, 0, None);
            acc[0] += r[0];
            acc[1] += r[1];
        }
        acc
    }
}

fn tri_rule<G>(a: &Vec3, b: &Vec3, c: &Vec3, level: usize, g: &G) -> [f64; 2]
where
    G: Fn(&Vec3) -> [f64; 2],
{
    let rule = triangle_rule(level);
    let (eb, ec) = (sub(b, a), sub(c, a));
    let twice_area = norm(&crate::geom::cross(&eb, &ec));
    let mut acc = [0.0, 0.0];
    for ((lb, lc), w) in rule.points.iter().zip(&rule.weights) {
        let x = axpy(*lc, &ec, &axpy(*lb, &eb, a));
        let r = g(&x);
        acc[0] += w * r[0];
        acc[1] += w * r[1];
    }
    [twice_area * acc[0], twice_area * acc[1]]
}

fn tri_adaptive<G>(
    a: &Vec3,
    b: &Vec3,
    c: &Vec3,
    cfg: &QuadConfig,
    g: &G,
    depth: usize,
    whole: Option<[f64; 2]>,
) -> [f64; 2]
where
    G: Fn(&Vec3) -> [f64; 2],
{
    let i0 = whole.unwrap_or_else(|| tri_rule(a, b, c, cfg.tri_level, g));
    if depth >= cfg.tri_max_subdiv {
        return i0;
    }
    let ab = scale(&add(a, b), 0.5);
    let bc = scale(&add(b, c), 0.5);
    let ca = scale(&add(c, a), 0.5);
    let kids = [[*a, ab, ca], [ab, *b, bc], [ca, bc, *c], [ab, bc, ca]];
    let parts: Vec<[f64; 2]> = kids
        .iter()
        .map(|t| tri_rule(&t[0], &t[1], &t[2], cfg.tri_level, g))
        .collect();
    let sum = [
        parts.iter().map(|p| p[0]).sum::<f64>(),
        parts.iter().map(|p| p[1]).sum::<f64>(),
    ];
    let err = (sum[0] - i0[0]).abs().max((sum[1] - i0[1]).abs());
    let scale_ = sum[0].abs().max(sum[1].abs()).max(1e-300);
    if err <= 1e-14 * scale_ {
        return sum;
    }
    let mut acc = [0.0, 0.0];
    for (t, p) in kids.iter().zip(&parts) {
        let r = tri_adaptive(&t[0], &t[1], &t[2], cfg, g, depth + 1, Some(*p));
        acc[0] += r[0];
        acc[1] += r[1];
    }
    acc
}

/// Whether the density restricted to a facet is a polynomial the rules
/// integrate exactly.
fn polynomial_density(mu: &DensitySpec) -> bool {
    match mu {
        DensitySpec::Lebesgue => true,
        DensitySpec::Power { s } => *s >= 0.0 && *s <= 8.0 && s.fract() == 0.0 && (*s as i64) % 2 == 0,
        DensitySpec::Gaussian => false,
    }
}

/// Per-normal `(facet mass, cone term)` where the cone term is
/// `∫_{F_i} ∫₀¹ φ(tx) t^{n−1} dt dx`.
pub(crate) fn facet_terms(mu: &DensitySpec, body: &HPolytope, cfg: &QuadConfig) -> Vec<[f64; 2]> {
    let dim = body.dim();
    if let DensitySpec::Lebesgue = mu {
        return body
            .facet_areas()
            .iter()
            .map(|a| [*a, a / dim as f64])
            .collect();
    }
    if let (DensitySpec::Gaussian, 3) = (mu, dim) {
        return (0..body.len())
            .into_par_iter()
            .map(|i| gaussian_facet_3d(body, i, cfg))
            .collect();
    }
    let gl = gauss_legendre(cfg.radial_order);
    let mut c = *cfg;
    if polynomial_density(mu) {
        c.tri_max_subdiv = 0;
    }
    let g = |x: &Vec3| {
        [
            mu.density(x, dim),
            mu.cone_factor(x, dim, &gl.nodes, &gl.weights),
        ]
    };
    (0..body.len())
        .into_par_iter()
        .map(|i| facet_integral2(body, i, &c, &g))
        .collect()
}

/// `(2π)^{-3/2} ∫₀^s r² e^{-r²/2} dr`, the standard Gaussian mass of a
/// radius-`s` ball divided by `4π`.
fn gauss_radial3(s: f64) -> f64 {
    let c = (2.0 * PI).powf(-1.5);
    if s < 1.5 {
        // The closed form cancels badly near zero.
        let (x2, mut term, mut acc) = (s * s, s * s * s, 0.0);
        for k in 0..40 {
            let t = term / (2 * k + 3) as f64;
            acc += t;
            if t.abs() < 1e-18 * acc {
                break;
            }
            term *= -0.5 * x2 / (k + 1) as f64;
        }
        return c * acc;
    }
    c * ((PI / 2.0).sqrt() * libm::erf(s / SQRT_2) - s * (-0.5 * s * s).exp())
}

/// Gaussian facet terms in 3D.
///
/// On the facet plane the density splits as `φ₁(h)·φ₂(y)` around the foot of
/// the normal, so each term is a sum of signed edge sectors, each reduced to
/// a 1D rule along the edge. The cone term uses `∫₀¹ φ(tx) t² dt = G(|x|)/|x|³`.
fn gaussian_facet_3d(body: &HPolytope, i: usize, cfg: &QuadConfig) -> [f64; 2] {
    if body.facet_areas()[i] <= 0.0 {
        return [0.0, 0.0];
    }
    let u = &body.normals()[i];
    let h = body.offsets()[i];
    let (e1, e2) = crate::geom::tangent_basis(u);
    let f = body.facet(i);
    let y: Vec<[f64; 2]> = f
        .iter()
        .map(|&k| {
            let v = &body.vertices()[k];
            [dot(v, &e1), dot(v, &e2)]
        })
        .collect();
    let outer = gauss_legendre(cfg.facet_order);
    let inner = gauss_legendre(cfg.radial_order.min(12));
    let phi_h = phi_pdf(h) / (2.0 * PI);
    // Sector profiles F(ρ)/ρ² as functions of q = ρ².
    let mass_profile = |q: f64| {
        if q < 1e-12 {
            phi_h * (0.5 - q / 8.0)
        } else {
            -phi_h * (-0.5 * q).exp_m1() / q
        }
    };
    // ∫_h^S G(s)/s² ds = H(h) − H(S) with H(s) = G(s)/s + c·e^{−s²/2}; the
    // difference cancels for S near h, where a short rule is used instead.
    let c = (2.0 * PI).powf(-1.5);
    let big_h = |s: f64| gauss_radial3(s) / s + c * (-0.5 * s * s).exp();
    let h_top = big_h(h);
    let cone_profile = |q: f64| {
        if q < 1e-300 {
            return gauss_radial3(h) / (2.0 * h * h * h);
        }
        let top = (h * h + q).sqrt();
        if top - h > 0.25 * h {
            return (h_top - big_h(top)) / q;
        }
        let half = 0.5 * (top - h);
        let mut acc = 0.0;
        for (z, w) in inner.nodes.iter().zip(&inner.weights) {
            let s = h + half * (z + 1.0);
            acc += w * gauss_radial3(s) / (s * s);
        }
        half * acc / q
    };
    let (mut m, mut cone, mut twice_area) = (0.0, 0.0, 0.0);
    for k in 0..y.len() {
        let (a, b) = (y[k], y[(k + 1) % y.len()]);
        let cr = a[0] * b[1] - a[1] * b[0];
        twice_area += cr;
        if cr == 0.0 {
            continue;
        }
        let d = [b[0] - a[0], b[1] - a[1]];
        // Profiles are analytic in t up to a distance ~h/|d|; split long edges.
        let pieces = ((d[0].hypot(d[1]) / h).ceil() as usize).clamp(1, 8);
        let (mut em, mut ec) = (0.0, 0.0);
        for p in 0..pieces {
            let (t0, dt) = (p as f64 / pieces as f64, 1.0 / pieces as f64);
            for (z, w) in outer.nodes.iter().zip(&outer.weights) {
                let t = t0 + 0.5 * dt * (z + 1.0);
                let q = (a[0] + t * d[0]).powi(2) + (a[1] + t * d[1]).powi(2);
                em += 0.5 * dt * w * mass_profile(q);
                ec += 0.5 * dt * w * cone_profile(q);
            }
        }
        m += cr * em;
        cone += cr * ec;
    }
    let sgn = if twice_area < 0.0 { -1.0 } else { 1.0 };
    [sgn * m, sgn * cone]
}

/// `μ(K)` by cone decomposition over facets.
pub fn mass(mu: &DensitySpec, body: &HPolytope, cfg: &QuadConfig) -> f64 {
    if let DensitySpec::Lebesgue = mu {
        return body.volume();
    }
    facet_terms(mu, body, cfg)
        .iter()
        .zip(body.offsets())
        .map(|(t, h)| h * t[1])
        .sum()
}

/// Facet masses `∫_{F_i} φ` aligned with the body's normals (zeros kept).
pub fn facet_mass_vector(mu: &DensitySpec, body: &HPolytope, cfg: &QuadConfig) -> Vec<f64> {
    facet_terms(mu, body, cfg).iter().map(|t| t[0]).collect()
}

/// Mass together with the per-normal facet masses, sharing one quadrature pass.
pub fn mass_and_facets(mu: &DensitySpec, body: &HPolytope, cfg: &QuadConfig) -> (f64, Vec<f64>) {
    let t = facet_terms(mu, body, cfg);
    let m = if let DensitySpec::Lebesgue = mu {
        body.volume()
    } else {
        t.iter().zip(body.offsets()).map(|(t, h)| h * t[1]).sum()
    };
    (m, t.iter().map(|t| t[0]).collect())
}

/// Weighted surface measure atoms `(u_i, ∫_{F_i} φ)` for facets of positive area.
pub fn facet_masses(mu: &DensitySpec, body: &HPolytope, cfg: &QuadConfig) -> SphericalAtomMeasure {
    let fm = facet_mass_vector(mu, body, cfg);
    SphericalAtomMeasure::from_parts(
        body.dim(),
        body.normals()
            .iter()
            .zip(body.facet_areas())
            .zip(&fm)
            .filter(|((_, a), _)| **a > 0.0)
            .map(|((u, _), m)| (*u, *m))
            .collect(),
    )
}

/// `μ⁺(∂K) = Σ_i ∫_{F_i} φ`.
pub fn boundary_mass(mu: &DensitySpec, body: &HPolytope, cfg: &QuadConfig) -> f64 {
    facet_mass_vector(mu, body, cfg).iter().sum()
}

/// `μ(rB)` by radial quadrature `nκ_n ∫₀^r φ̃(t) t^{n−1} dt`.
pub fn ball_mass(mu: &DensitySpec, dim: usize, r: f64) -> f64 {
    let n = dim as f64;
    let surf = n * kappa(dim);
    match mu {
        DensitySpec::Lebesgue => kappa(dim) * r.powf(n),
        DensitySpec::Power { s } => surf * r.powf(n + s) / (n + s),
        DensitySpec::Gaussian => {
            // Beyond radius 40 the density is below 1e−340.
            let top = r.min(40.0);
            let panels = (top.ceil() as usize).max(1);
            let h = top / panels as f64;
            let c = (2.0 * PI).powf(-n / 2.0);
            let mut acc = 0.0;
            for k in 0..panels {
                let a = k as f64 * h;
                acc += crate::quad::integrate(32, a, a + h, |t| {
                    c * (-0.5 * t * t).exp() * t.powi(dim as i32 - 1)
                });
            }
            surf * acc
        }
    }
}

/// Λⁿ probe thresholds.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LambdaConfig {
    /// Value above which `μ(rB)^{β/n}/r` counts as blown up at zero.
    pub blowup: f64,
    /// Value below which it counts as vanished at infinity.
    pub vanish: f64,
    /// Minimum tail length in grid points.
    pub tail: usize,
    /// Minimum log-log decay rate accepted as a trend.
    pub min_slope: f64,
}

impl Default for LambdaConfig {
    fn default() -> Self {
        LambdaConfig {
            blowup: 1e6,
            vanish: 1e-6,
            tail: 5,
            min_slope: 1e-3,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LambdaReport {
    pub limit_at_infinity_trend: bool,
    pub limit_at_zero_trend: bool,
    pub pass: bool,
    pub slope_at_infinity: f64,
    pub slope_at_zero: f64,
    pub r_grid: Vec<f64>,
    pub values: Vec<f64>,
}

/// Log-spaced grid with `per_decade` points per decade over `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let m = (decades * per_decade as f64).round() as usize;
    (0..=m)
        .map(|k| lo * 10f64.powf(decades * k as f64 / m as f64))
        .collect()
}

fn lsq_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Probes `μ(rB)^{β/n}/r → 0` as `r → ∞` and `→ ∞` as `r → 0`.
///
/// A tail passes when it has reached the threshold, or when it is strictly
/// monotone in the required direction with log-log slope at least
/// `min_slope` in magnitude over the last `tail` points.
pub fn lambda_check(
    mu: &DensitySpec,
    dim: usize,
    beta: f64,
    r_grid: &[f64],
    lc: &LambdaConfig,
) -> Result<LambdaReport> {
    if r_grid.len() < 2 * lc.tail || beta <= 0.0 {
        return Err(Error::Precondition(format!(
            "lambda_check needs beta > 0 and at least {} grid points",
            2 * lc.tail
        )));
    }
    let mut r: Vec<f64> = r_grid.to_vec();
    r.sort_by(f64::total_cmp);
    let n = dim as f64;
    let values: Vec<f64> = r
        .iter()
        .map(|&t| ball_mass(mu, dim, t).powf(beta / n) / t)
        .collect();
    let lr: Vec<f64> = r.iter().map(|t| t.ln()).collect();
    let lv: Vec<f64> = values.iter().map(|v| v.ln()).collect();
    let k = lc.tail;
    let m = r.len();
    let slope_inf = lsq_slope(&lr[m - k..], &lv[m - k..]);
    let slope_zero = lsq_slope(&lr[..k], &lv[..k]);
    let dec_inf = values[m - k..].windows(2).all(|w| w[1] < w[0]);
    let dec_zero = values[..k].windows(2).all(|w| w[1] < w[0]);
    let inf_ok = values[m - 1] <= lc.vanish || (dec_inf && slope_inf <= -lc.min_slope);
    let zero_ok = values[0] >= lc.blowup || (dec_zero && slope_zero <= -lc.min_slope);
    Ok(LambdaReport {
        limit_at_infinity_trend: inf_ok,
        limit_at_zero_trend: zero_ok,
        pass: inf_ok && zero_ok,
        slope_at_infinity: slope_inf,
        slope_at_zero: slope_zero,
        r_grid: r,
        values,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConcavityReport {
    pub min_slack: f64,
    pub argmin_lambda: f64,
    pub slacks: Vec<f64>,
}

/// `F(μ((1−λ)K +_q λL)) − (1−λ)F(μK) − λF(μL)` over a λ grid.
pub fn concavity_probe(
    mu: &DensitySpec,
    f: &FSpec,
    k: &HPolytope,
    l: &HPolytope,
    lambda_grid: &[f64],
    q: f64,
    cfg: &QuadConfig,
) -> Result<ConcavityReport> {
    if !(q >= 1.0) {
        return Err(Error::QOutOfRange(q));
    }
    if lambda_grid.is_empty() || lambda_grid.iter().any(|t| !(*t > 0.0 && *t < 1.0)) {
        return Err(Error::Precondition("lambda grid must lie in (0,1)".into()));
    }
    let fk = f.f(mass(mu, k, cfg))?;
    let fl = f.f(mass(mu, l, cfg))?;
    let mut slacks = Vec::with_capacity(lambda_grid.len());
    for &t in lambda_grid {
        let c = firey_comb(k, 1.0 - t, l, t, q)?;
        slacks.push(f.f(mass(mu, &c, cfg))? - (1.0 - t) * fk - t * fl);
    }
    let (imin, min_slack) = slacks
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |a, (i, s)| if s < a.1 { (i, s) } else { a });
    Ok(ConcavityReport {
        min_slack,
        argmin_lambda: lambda_grid[imin],
        slacks,
    })
}

/// Hit-or-miss Monte Carlo estimate of `μ(K)` with its standard error.
pub fn mc_mass(mu: &DensitySpec, body: &HPolytope, samples: usize, seed: u64) -> (f64, f64) {
    let dim = body.dim();
    let r = body.circumradius();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vol = (2.0 * r).powi(dim as i32);
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..samples {
        let mut x = [0.0; 3];
        for c in x.iter_mut().take(dim) {
            *c = rng.gen_range(-r..r);
        }
        let inside = body
            .normals()
            .iter()
            .zip(body.offsets())
            .all(|(u, h)| dot(&x, u) <= *h);
        let v = if inside { mu.density(&x, dim) } else { 0.0 };
        s1 += v;
        s2 += v * v;
    }
    let n = samples as f64;
    let mean = s1 / n;
    let var = (s2 / n - mean * mean).max(0.0);
    (vol * mean, vol * (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{axis_box, wulff};
    use crate::geom::circle_grid;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn lebesgue_cube_mass() {
        let c = axis_box(&[1.0, 1.0, 1.0]).unwrap();
        assert!((mass(&DensitySpec::Lebesgue, &c, &cfg()) - 8.0).abs() < 1e-13);
    }

    #[test]
    fn gaussian_disk_and_square() {
        let n = circle_grid(256, 0.0);
        let disk = wulff(2, &n, &vec![1.0; 256]).unwrap();
        let m = mass(&DensitySpec::Gaussian, &disk, &cfg());
        assert!((m - (1.0 - (-0.5f64).exp())).abs() < 1e-4);
        let sq = axis_box(&[1.0, 1.0]).unwrap();
        let oracle = (2.0 * phi_cdf(1.0) - 1.0).powi(2);
        assert!((mass(&DensitySpec::Gaussian, &sq, &cfg()) - oracle).abs() < 1e-12);
        assert!((oracle - 0.466065).abs() < 1e-6);
    }

    #[test]
    fn gaussian_cube_mass_3d() {
        let c = axis_box(&[1.0, 0.5, 2.0]).unwrap();
        let oracle = [1.0, 0.5, 2.0]
            .iter()
            .map(|a| 2.0 * phi_cdf(*a) - 1.0)
            .product::<f64>();
        assert!((mass(&DensitySpec::Gaussian, &c, &cfg()) - oracle).abs() < 1e-12);
    }

    #[test]
    fn ball_masses() {
        assert!((ball_mass(&DensitySpec::Lebesgue, 2, 2.0) - 4.0 * PI).abs() < 1e-12);
        let p = ball_mass(&DensitySpec::Power { s: 1.0 }, 2, 1.0);
        assert!((p - 2.0 * PI / 3.0).abs() < 1e-14);
        assert!((ball_mass(&DensitySpec::Gaussian, 3, 10.0) - 1.0).abs() < 1e-9);
        let r = 1.3f64;
        assert!((ball_mass(&DensitySpec::Gaussian, 2, r) - (1.0 - (-r * r / 2.0).exp())).abs() < 1e-14);
    }

    #[test]
    fn lambda_examples() {
        let g = log_grid(1e-4, 1e4, 10);
        let lc = LambdaConfig::default();
        assert!(lambda_check(&DensitySpec::Gaussian, 2, 0.5, &g, &lc).unwrap().pass);
        assert!(lambda_check(&DensitySpec::Lebesgue, 2, 0.5, &g, &lc).unwrap().pass);
        let bad = lambda_check(&DensitySpec::Lebesgue, 2, 2.0, &g, &lc).unwrap();
        assert!(!bad.limit_at_infinity_trend && !bad.pass);
        // β = n/α is the borderline: the ratio is constant.
        assert!(!lambda_check(&DensitySpec::Lebesgue, 2, 1.0, &g, &lc).unwrap().pass);
    }

    #[test]
    fn square_boundary_and_facets() {
        let sq = axis_box(&[1.0, 1.0]).unwrap();
        assert!((boundary_mass(&DensitySpec::Lebesgue, &sq, &cfg()) - 8.0).abs() < 1e-14);
        let one = (-0.5f64).exp() * (2.0 * phi_cdf(1.0) - 1.0) / (2.0 * PI).sqrt();
        assert!((one - 0.165_190_871_034_016_7).abs() < 1e-15);
        let fm = facet_masses(&DensitySpec::Gaussian, &sq, &cfg());
        assert!(fm.weights().iter().all(|w| (w - one).abs() < 1e-13));
        let b = boundary_mass(&DensitySpec::Gaussian, &sq, &cfg());
        assert!((b - 4.0 * one).abs() < 1e-12);
        assert!((b - 0.660_763_484_136_066_8).abs() < 1e-12);
        let p2 = facet_masses(&DensitySpec::Power { s: 2.0 }, &sq, &cfg());
        assert!(p2.weights().iter().all(|w| (w - 8.0 / 3.0).abs() < 1e-13));
    }

    #[test]
    fn boundary_mass_by_forward_difference() {
        let sq = axis_box(&[1.0, 1.0]).unwrap();
        let ball = wulff(2, &circle_grid(512, 0.0), &vec![1.0; 512]).unwrap();
        let mu = DensitySpec::Gaussian;
        let m0 = mass(&mu, &sq, &cfg());
        let d = |e: f64| {
            let ke = crate::bodies::minkowski_comb(&sq, 1.0, &ball, e).unwrap();
            (mass(&mu, &ke, &cfg()) - m0) / e
        };
        let (d3, d4) = (d(1e-3), d(1e-4));
        let extrap = (10.0 * d4 - d3) / 9.0;
        let b = boundary_mass(&mu, &sq, &cfg());
        assert!((extrap - b).abs() / b < 1e-3);
    }

    #[test]
    fn fspec_maps() {
        let e = FSpec::Ehrhard;
        for k in 1..=99 {
            let y = k as f64 / 100.0;
            assert!((e.finv(e.f(y).unwrap()).unwrap() - y).abs() < 1e-10);
        }
        assert!(e.f(1.2).is_err());
        let p = FSpec::Power { p: 0.5 };
        assert!((p.fprime(4.0).unwrap() - 0.25).abs() < 1e-15);
        let h = 1e-6;
        let x = 0.3;
        let fd = (e.f(x + h).unwrap() - e.f(x - h).unwrap()) / (2.0 * h);
        assert!((fd - e.fprime(x).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn concavity_examples() {
        let sq = axis_box(&[1.0, 1.0]).unwrap();
        let grid = [0.25, 0.5, 0.75];
        let r = concavity_probe(&DensitySpec::Gaussian, &FSpec::Ehrhard, &sq, &sq, &grid, 1.0, &cfg()).unwrap();
        assert!(r.min_slack.abs() < 1e-9);
        let big = sq.scaled(2.0);
        let r = concavity_probe(&DensitySpec::Gaussian, &FSpec::Ehrhard, &sq, &big, &[0.5], 1.0, &cfg()).unwrap();
        assert!(r.min_slack >= -1e-7);
        let e = concavity_probe(&DensitySpec::Lebesgue, &FSpec::Ehrhard, &big, &big, &[0.5], 1.0, &cfg());
        assert!(matches!(e, Err(Error::FDomain(_))));
    }

    #[test]
    fn monte_carlo_agrees() {
        let sq = axis_box(&[1.0, 0.7]).unwrap();
        for mu in [DensitySpec::Gaussian, DensitySpec::Power { s: 1.0 }] {
            let (est, se) = mc_mass(&mu, &sq, 200_000, 3);
            let m = mass(&mu, &sq, &cfg());
            assert!((est - m).abs() <= 3.0 * se, "{mu:?}");
        }
    }
}
