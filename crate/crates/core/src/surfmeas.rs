//! Discrete spherical measures, weighted surface area measures, mixed
//! measures by two routes, and the variational and Minkowski-inequality checks.

use crate::bodies::{minkowski_comb, validate_direction, HPolytope, SAME_DIR_TOL};
use crate::error::{Error, Result};
use crate::geom::{circle_grid, dist, dot, icosphere, neg, Vec3};
use crate::measures::{facet_mass_vector, mass, DensitySpec, FSpec, QuadConfig};
use crate::quad::gauss_legendre;
use serde::{Deserialize, Serialize};

/// Finite measure on the unit sphere given by `(direction, weight)` atoms.
#[derive(Clone, Debug, PartialEq)]
pub struct SphericalAtomMeasure {
    dim: usize,
    dirs: Vec<Vec3>,
    weights: Vec<f64>,
}

impl SphericalAtomMeasure {
    /// Validated constructor: unit directions, non-negative weights, distinct atoms.
    pub fn new(dim: usize, dirs: Vec<Vec3>, weights: Vec<f64>) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(Error::invalid("dim", format!("must be 2 or 3, got {dim}")));
        }
        if dirs.len() != weights.len() {
            return Err(Error::invalid(
                "weights",
                format!("{} weights for {} directions", weights.len(), dirs.len()),
            ));
        }
        for (i, u) in dirs.iter().enumerate() {
            validate_direction(&format!("directions[{i}]"), u, dim)?;
            for j in 0..i {
                if dist(u, &dirs[j]) <= SAME_DIR_TOL {
                    return Err(Error::invalid(
                        format!("directions[{i}]"),
                        format!("duplicates directions[{j}]"),
                    ));
                }
            }
        }
        for (i, w) in weights.iter().enumerate() {
            if !(w.is_finite() && *w >= 0.0) {
                return Err(Error::invalid(
                    format!("weights[{i}]"),
                    format!("must be finite and >= 0, got {w}"),
                ));
            }
        }
        Ok(SphericalAtomMeasure { dim, dirs, weights })
    }

    pub(crate) fn from_parts(dim: usize, atoms: Vec<(Vec3, f64)>) -> Self {
        let (dirs, weights) = atoms.into_iter().unzip();
        SphericalAtomMeasure { dim, dirs, weights }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn dirs(&self) -> &[Vec3] {
        &self.dirs
    }
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
    pub fn len(&self) -> usize {
        self.dirs.len()
    }
    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }
    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }
    pub fn max_weight(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    /// Index of the atom at direction `u`.
    pub fn find(&self, u: &Vec3) -> Option<usize> {
        self.dirs.iter().position(|d| dist(d, u) <= 1e-9)
    }

    /// Weight at `u` (zero when no atom sits there).
    pub fn weight_at(&self, u: &Vec3) -> f64 {
        self.find(u).map_or(0.0, |i| self.weights[i])
    }

    /// Whether atoms are closed under antipody with equal weights.
    pub fn is_even(&self, tol: f64) -> bool {
        self.dirs.iter().zip(&self.weights).all(|(u, w)| {
            self.find(&neg(u))
                .is_some_and(|j| (self.weights[j] - w).abs() <= tol * w.max(1.0))
        })
    }

    /// `½(m + m∘(−·))`.
    pub fn symmetrized(&self) -> SphericalAtomMeasure {
        let mut atoms: Vec<(Vec3, f64)> = Vec::new();
        for (u, w) in self.dirs.iter().zip(&self.weights) {
            for d in [*u, neg(u)] {
                match atoms.iter_mut().find(|(v, _)| dist(v, &d) <= 1e-9) {
                    Some(a) => a.1 += 0.5 * w,
                    None => atoms.push((d, 0.5 * w)),
                }
            }
        }
        SphericalAtomMeasure::from_parts(self.dim, atoms)
    }

    pub fn scaled(&self, c: f64) -> SphericalAtomMeasure {
        SphericalAtomMeasure {
            dim: self.dim,
            dirs: self.dirs.clone(),
            weights: self.weights.iter().map(|w| w * c).collect(),
        }
    }

    /// `Σ w_i |⟨θ, u_i⟩|`.
    pub fn cosine_transform(&self, theta: &Vec3) -> f64 {
        self.dirs
            .iter()
            .zip(&self.weights)
            .map(|(u, w)| w * dot(theta, u).abs())
            .sum()
    }

    /// Minimum of the cosine transform over a 1° circle grid or an icosphere of
    /// level 3; positive iff the measure is not concentrated on a great sphere
    /// (for even measures: on a closed hemisphere).
    pub fn hemisphere_min(&self) -> f64 {
        let grid = if self.dim == 2 {
            circle_grid(360, 0.0)
        } else {
            icosphere(3).0
        };
        let mut m = grid
            .iter()
            .map(|t| self.cosine_transform(t))
            .fold(f64::INFINITY, f64::min);
        // Directions orthogonal to every atom but off the grid.
        if self.dim == 3 {
            for i in 0..self.len() {
                for j in 0..i {
                    let c = crate::geom::cross(&self.dirs[i], &self.dirs[j]);
                    if crate::geom::norm(&c) > 1e-9 {
                        let t = crate::geom::normalize(&c);
                        m = m.min(self.cosine_transform(&t));
                    }
                }
            }
        } else {
            for u in &self.dirs {
                m = m.min(self.cosine_transform(&[-u[1], u[0], 0.0]));
            }
        }
        m
    }
}

/// Weighted surface area measure `S^μ_K` (facet masses).
pub fn surface_measure(mu: &DensitySpec, k: &HPolytope, cfg: &QuadConfig) -> SphericalAtomMeasure {
    crate::measures::facet_masses(mu, k, cfg)
}

/// `L^q` weighted surface measure: atoms `h_K(u_i)^{1−q}·S^μ_K(u_i)`.
pub fn surface_measure_q(
    mu: &DensitySpec,
    k: &HPolytope,
    q: f64,
    cfg: &QuadConfig,
) -> Result<SphericalAtomMeasure> {
    if !(q >= 1.0) {
        return Err(Error::QOutOfRange(q));
    }
    let fm = facet_mass_vector(mu, k, cfg);
    Ok(SphericalAtomMeasure::from_parts(
        k.dim(),
        (0..k.len())
            .filter(|&i| k.facet_areas()[i] > 0.0)
            .map(|i| {
                let w = if q == 1.0 {
                    fm[i]
                } else {
                    k.offsets()[i].powf(1.0 - q) * fm[i]
                };
                (k.normals()[i], w)
            })
            .collect(),
    ))
}

/// `μ(K,L) = Σ h_L(u_i)·S^μ_K(u_i)`.
pub fn mixed_measure(mu: &DensitySpec, k: &HPolytope, l: &HPolytope, cfg: &QuadConfig) -> f64 {
    let s = surface_measure(mu, k, cfg);
    s.dirs()
        .iter()
        .zip(s.weights())
        .map(|(u, w)| l.support(u) * w)
        .sum()
}

/// `(1/q)·Σ h_L(u_i)^q·S^μ_{K,q}(u_i)`.
pub fn mixed_measure_q(
    mu: &DensitySpec,
    k: &HPolytope,
    l: &HPolytope,
    q: f64,
    cfg: &QuadConfig,
) -> Result<f64> {
    let s = surface_measure_q(mu, k, q, cfg)?;
    Ok(s.dirs()
        .iter()
        .zip(s.weights())
        .map(|(u, w)| l.support(u).powf(q) * w)
        .sum::<f64>()
        / q)
}

/// Default finite-difference schedule.
pub const DEFAULT_EPS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];

fn check_schedule(eps: &[f64]) -> Result<()> {
    if eps.is_empty()
        || eps.iter().any(|e| !(e.is_finite() && *e > 0.0))
        || eps.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::Precondition(
            "eps schedule must be non-empty, positive and decreasing".into(),
        ));
    }
    Ok(())
}

/// Value at `x = 0` of the polynomial through `(x_i, y_i)` (Neville).
pub fn extrapolate_to_zero(x: &[f64], y: &[f64]) -> f64 {
    let mut p = y.to_vec();
    let n = x.len();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (x[i + m] * p[i] - x[i] * p[i + 1]) / (x[i + m] - x[i]);
        }
    }
    p[0]
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FdResult {
    pub value: f64,
    pub quotients: Vec<f64>,
    /// Whether the difference quotients move monotonically with ε.
    pub monotone: bool,
}

/// `lim (μ(K+εL) − μ(K))/ε`, extrapolated polynomially in ε over the schedule.
pub fn mixed_measure_fd(
    mu: &DensitySpec,
    k: &HPolytope,
    l: &HPolytope,
    eps: &[f64],
    cfg: &QuadConfig,
) -> Result<FdResult> {
    check_schedule(eps)?;
    let m0 = mass(mu, k, cfg);
    let mut quotients = Vec::with_capacity(eps.len());
    for &e in eps {
        let ke = minkowski_comb(k, 1.0, l, e)?;
        quotients.push((mass(mu, &ke, cfg) - m0) / e);
    }
    let d: Vec<f64> = quotients.windows(2).map(|w| w[1] - w[0]).collect();
    let noise = 1e-9 * quotients[0].abs().max(1e-300);
    let monotone = d.iter().all(|x| *x >= -noise) || d.iter().all(|x| *x <= noise);
    Ok(FdResult {
        value: extrapolate_to_zero(eps, &quotients),
        quotients,
        monotone,
    })
}

/// Both routes to `μ(K,L)` side by side.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MixedReport {
    pub surface_value: f64,
    pub fd_value: f64,
    pub relative_gap: f64,
    pub eps_schedule: Vec<f64>,
}

pub fn mixed_report(
    mu: &DensitySpec,
    k: &HPolytope,
    l: &HPolytope,
    eps: &[f64],
    cfg: &QuadConfig,
) -> Result<MixedReport> {
    let s = mixed_measure(mu, k, l, cfg);
    let fd = mixed_measure_fd(mu, k, l, eps, cfg)?.value;
    Ok(MixedReport {
        surface_value: s,
        fd_value: fd,
        relative_gap: (s - fd).abs() / s.abs().max(1e-30),
        eps_schedule: eps.to_vec(),
    })
}

/// `|μ(K) − ∫₀¹ μ(tK, K) dt|` with a Gauss–Legendre rule of `t_order` in t.
pub fn integral_identity_residual(
    mu: &DensitySpec,
    k: &HPolytope,
    t_order: usize,
    cfg: &QuadConfig,
) -> f64 {
    let gl = gauss_legendre(t_order.max(1));
    let mut integral = 0.0;
    for (z, w) in gl.nodes.iter().zip(&gl.weights) {
        let t = 0.5 * (z + 1.0);
        let fm = facet_mass_vector(mu, &k.scaled(t), cfg);
        let mixed: f64 = fm.iter().zip(k.offsets()).map(|(m, h)| m * h).sum();
        integral += 0.5 * w * mixed;
    }
    (mass(mu, k, cfg) - integral).abs()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VariationalReport {
    pub fd_derivative: f64,
    pub formula: f64,
    pub residual: f64,
    pub relative: f64,
}

/// Compares `d/dt μ([h_K + t f])` at 0 (central differences extrapolated in
/// t²) with `Σ f(u_i)·S^μ_K(u_i)`.
pub fn variational_residual(
    mu: &DensitySpec,
    k: &HPolytope,
    f: &[f64],
    eps: &[f64],
    cfg: &QuadConfig,
) -> Result<VariationalReport> {
    check_schedule(eps)?;
    if f.len() != k.len() {
        return Err(Error::invalid(
            "f_values",
            format!("{} values for {} normals", f.len(), k.len()),
        ));
    }
    let fmax = f.iter().map(|x| x.abs()).fold(0.0, f64::max);
    if fmax * eps[0] >= k.inradius() {
        return Err(Error::PerturbationTooLarge);
    }
    let fm = facet_mass_vector(mu, k, cfg);
    let formula: f64 = fm.iter().zip(f).map(|(m, x)| m * x).sum();
    if fmax == 0.0 {
        return Ok(VariationalReport {
            fd_derivative: 0.0,
            formula,
            residual: 0.0,
            relative: 0.0,
        });
    }
    let h = k.offsets();
    let mut quotients = Vec::with_capacity(eps.len());
    for &t in eps {
        let plus: Vec<f64> = h.iter().zip(f).map(|(a, b)| a + t * b).collect();
        let minus: Vec<f64> = h.iter().zip(f).map(|(a, b)| a - t * b).collect();
        let kp = k.with_values(&plus)?;
        let km = k.with_values(&minus)?;
        quotients.push((mass(mu, &kp, cfg) - mass(mu, &km, cfg)) / (2.0 * t));
    }
    let t2: Vec<f64> = eps.iter().map(|t| t * t).collect();
    let fd = extrapolate_to_zero(&t2, &quotients);
    let residual = (fd - formula).abs();
    Ok(VariationalReport {
        fd_derivative: fd,
        formula,
        residual,
        relative: residual / formula.abs().max(1e-30),
    })
}

/// `μ_q(K,L) − μ_q(K,K) − (F(μL) − F(μK))/F′(μK)` (plain mixed measures at q = 1).
pub fn minkowski_ineq_slack(
    mu: &DensitySpec,
    f: &FSpec,
    k: &HPolytope,
    l: &HPolytope,
    q: f64,
    cfg: &QuadConfig,
) -> Result<f64> {
    if !(q >= 1.0) {
        return Err(Error::QOutOfRange(q));
    }
    let mk = mass(mu, k, cfg);
    let ml = mass(mu, l, cfg);
    let fp = f.fprime(mk)?;
    if fp == 0.0 || !fp.is_finite() {
        return Err(Error::DegenerateFDerivative);
    }
    let (kl, kk) = if q == 1.0 {
        (mixed_measure(mu, k, l, cfg), mixed_measure(mu, k, k, cfg))
    } else {
        (
            mixed_measure_q(mu, k, l, q, cfg)?,
            mixed_measure_q(mu, k, k, q, cfg)?,
        )
    };
    Ok(kl - kk - (f.f(ml)? - f.f(mk)?) / fp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::axis_box;
    use crate::quad::phi_cdf;
    use std::f64::consts::PI;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    fn gauss_facet_oracle(a: f64, b: f64) -> f64 {
        // Facet x = a of [−a,a]×[−b,b].
        (-0.5 * a * a).exp() / (2.0 * PI).sqrt() * (2.0 * phi_cdf(b) - 1.0) / (2.0 * PI).sqrt()
            * (2.0 * PI).sqrt()
    }

    #[test]
    fn atom_measure_validation() {
        assert!(SphericalAtomMeasure::new(2, vec![[1.0, 0.0, 0.0]], vec![-1.0]).is_err());
        assert!(SphericalAtomMeasure::new(2, vec![[1.0, 0.1, 0.0]], vec![1.0]).is_err());
        let m = SphericalAtomMeasure::new(2, vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]], vec![1.0, 1.0]).unwrap();
        assert!(m.is_even(1e-12));
        assert_eq!(m.hemisphere_min(), 0.0);
        assert_eq!(m.cosine_transform(&[1.0, 0.0, 0.0]), 2.0);
        assert_eq!(m.cosine_transform(&[0.0, 1.0, 0.0]), 0.0);
    }

    #[test]
    fn cosine_transform_uniform_grid() {
        let dirs = circle_grid(360, 0.0);
        let m = SphericalAtomMeasure::new(2, dirs, vec![1.0 / 360.0; 360]).unwrap();
        for t in circle_grid(7, 0.123) {
            assert!((m.cosine_transform(&t) - 2.0 / PI).abs() < 1e-3);
        }
    }

    #[test]
    fn surface_measures() {
        let c = axis_box(&[1.0, 1.0, 1.0]).unwrap();
        let s = surface_measure(&DensitySpec::Lebesgue, &c, &cfg());
        assert_eq!(s.len(), 6);
        assert!(s.weights().iter().all(|w| (w - 4.0).abs() < 1e-13));
        let sq = axis_box(&[1.0, 1.0]).unwrap();
        let g = surface_measure(&DensitySpec::Gaussian, &sq, &cfg());
        assert!(g.weights().iter().all(|w| (w - gauss_facet_oracle(1.0, 1.0)).abs() < 1e-13));
        let b = crate::measures::boundary_mass(&DensitySpec::Gaussian, &sq, &cfg());
        assert!((g.total() - b).abs() < 1e-10);
    }

    #[test]
    fn lq_surface_measures() {
        let sq = axis_box(&[1.0, 1.0]).unwrap();
        let mu = DensitySpec::Gaussian;
        assert_eq!(surface_measure_q(&mu, &sq, 1.0, &cfg()).unwrap(), surface_measure(&mu, &sq, &cfg()));
        let s3 = surface_measure_q(&mu, &sq, 3.0, &cfg()).unwrap();
        let s1 = surface_measure(&mu, &sq, &cfg());
        for (a, b) in s3.weights().iter().zip(s1.weights()) {
            assert!((a - b).abs() < 1e-15);
        }
        let r = axis_box(&[2.0, 1.0]).unwrap();
        let s = surface_measure_q(&DensitySpec::Lebesgue, &r, 2.0, &cfg()).unwrap();
        assert!((s.weight_at(&[1.0, 0.0, 0.0]) - 1.0).abs() < 1e-14);
        assert!((s.weight_at(&[0.0, -1.0, 0.0]) - 4.0).abs() < 1e-14);
        assert!(surface_measure_q(&mu, &sq, 0.5, &cfg()).is_err());
    }

    #[test]
    fn mixed_examples() {
        let sq = axis_box(&[1.0, 1.0]).unwrap();
        let leb = DensitySpec::Lebesgue;
        assert!((mixed_measure(&leb, &sq, &sq, &cfg()) - 8.0).abs() < 1e-14);
        assert!((mixed_measure(&leb, &sq, &sq.scaled(2.0), &cfg()) - 16.0).abs() < 1e-13);
        let g = mixed_measure(&DensitySpec::Gaussian, &sq, &sq, &cfg());
        assert!((g - 4.0 * gauss_facet_oracle(1.0, 1.0)).abs() < 1e-13);
        let fd = mixed_measure_fd(&leb, &sq, &sq, &DEFAULT_EPS, &cfg()).unwrap();
        assert!((fd.value - 8.0).abs() < 1e-6);
        let rep = mixed_report(&DensitySpec::Gaussian, &sq, &sq, &DEFAULT_EPS, &cfg()).unwrap();
        assert!(rep.relative_gap < 1e-3);
        assert!(mixed_measure_fd(&leb, &sq, &sq, &[1e-3, 1e-2], &cfg()).is_err());
        assert!(mixed_measure_fd(&leb, &sq, &sq, &[], &cfg()).is_err());
    }

    #[test]
    fn lq_mixed() {
        let r = axis_box(&[2.0, 1.0]).unwrap();
        let l = axis_box(&[0.5, 1.5]).unwrap();
        for mu in [DensitySpec::Lebesgue, DensitySpec::Gaussian, DensitySpec::Power { s: 1.0 }] {
            let kk = mixed_measure_q(&mu, &r, &r, 2.5, &cfg()).unwrap();
            assert!((kk - mixed_measure(&mu, &r, &r, &cfg()) / 2.5).abs() < 1e-12);
            let q1 = mixed_measure_q(&mu, &r, &l, 1.0, &cfg()).unwrap();
            assert!((q1 - mixed_measure(&mu, &r, &l, &cfg())).abs() < 1e-14);
        }
        let sq = axis_box(&[1.0, 1.0]).unwrap();
        let v = mixed_measure_q(&DensitySpec::Lebesgue, &sq, &sq, 2.0, &cfg()).unwrap();
        assert!((v - 4.0).abs() < 1e-14);
    }

    #[test]
    fn integral_identity_examples() {
        let sq = axis_box(&[1.0, 1.0]).unwrap();
        let r = axis_box(&[1.5, 0.7, 1.0]).unwrap();
        assert!(integral_identity_residual(&DensitySpec::Lebesgue, &sq, 32, &cfg()) < 1e-10);
        assert!(integral_identity_residual(&DensitySpec::Lebesgue, &r, 32, &cfg()) < 1e-10);
        assert!(integral_identity_residual(&DensitySpec::Gaussian, &sq, 32, &cfg()) < 1e-6);
        assert!(integral_identity_residual(&DensitySpec::Power { s: 1.0 }, &sq, 32, &cfg()) < 1e-9);
    }

    #[test]
    fn variational_examples() {
        let sq = axis_box(&[1.0, 1.0]).unwrap();
        let z = variational_residual(&DensitySpec::Gaussian, &sq, &[0.0; 4], &DEFAULT_EPS, &cfg()).unwrap();
        assert_eq!(z.residual, 0.0);
        let f: Vec<f64> = sq.offsets().to_vec();
        let g = variational_residual(&DensitySpec::Gaussian, &sq, &f, &DEFAULT_EPS, &cfg()).unwrap();
        assert!(g.relative <= 1e-3);
        // Indicator of the ±e₁ pair: derivative is the two facet lengths.
        let ind: Vec<f64> = sq.normals().iter().map(|u| if u[0].abs() > 0.5 { 1.0 } else { 0.0 }).collect();
        let l = variational_residual(&DensitySpec::Lebesgue, &sq, &ind, &DEFAULT_EPS, &cfg()).unwrap();
        assert!((l.fd_derivative - 4.0).abs() < 1e-9);
        assert!(l.relative <= 1e-3);
        let big = vec![200.0; 4];
        assert_eq!(
            variational_residual(&DensitySpec::Lebesgue, &sq, &big, &DEFAULT_EPS, &cfg()).unwrap_err(),
            Error::PerturbationTooLarge
        );
    }

    #[test]
    fn minkowski_slack_examples() {
        let sq = axis_box(&[1.0, 1.0]).unwrap();
        let leb = DensitySpec::Lebesgue;
        let f = FSpec::Power { p: 0.5 };
        assert!(minkowski_ineq_slack(&leb, &f, &sq, &sq, 1.0, &cfg()).unwrap().abs() < 1e-9);
        let r = axis_box(&[2.0, 0.5]).unwrap();
        assert!(minkowski_ineq_slack(&leb, &f, &sq, &r, 1.0, &cfg()).unwrap() >= -1e-9);
        let g = DensitySpec::Gaussian;
        let s = minkowski_ineq_slack(&g, &FSpec::Ehrhard, &sq.scaled(1.2), &sq.scaled(1.6), 1.0, &cfg()).unwrap();
        assert!(s > 0.0);
        let s = minkowski_ineq_slack(&g, &FSpec::Ehrhard, &sq.scaled(1.6), &sq.scaled(1.2), 1.0, &cfg()).unwrap();
        assert!(s > 0.0);
    }
}
