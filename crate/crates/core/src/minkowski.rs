//! Weighted (and `L^q`) Minkowski problem: given an even atomic measure `ν`,
//! find a symmetric polytope `K` with `c·S^μ_{K,q} = ν`.
//!
//! The solver maximizes `Ψ(h) = (n/β)·μ([h])^{β/n} − Σ h_i^q ν_i` over even
//! support vectors on the atom directions by projected gradient ascent.

use crate::bodies::{hausdorff, wulff, HPolytope};
use crate::error::{Error, Result};
use crate::geom::{dist, neg};
use crate::measures::{ball_mass, mass_and_facets, DensitySpec, QuadConfig};
use crate::surfmeas::SphericalAtomMeasure;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Target relative residual `max|c·S − ν| / max ν`.
    pub tol: f64,
    pub max_iters: usize,
    /// Initial support numbers, one per atom of `ν` (antipodes averaged).
    pub init: Option<Vec<f64>>,
    /// Floor `h_i ≥ floor_factor·median(h⁰)`.
    pub floor_factor: f64,
    /// Armijo sufficient-increase constant.
    pub c1: f64,
    /// Halvings per iteration before the search counts as stalled.
    pub max_halvings: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-6,
            max_iters: 5000,
            init: None,
            floor_factor: 1e-6,
            c1: 1e-4,
            max_halvings: 50,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub body: HPolytope,
    pub c: f64,
    pub beta: f64,
    pub q: f64,
    pub iterations: usize,
    pub residual_inf: f64,
    pub residual_rel: f64,
    pub converged: bool,
    /// Some support number sits on the positivity floor.
    pub floor_binding: bool,
    /// Some support number sits on the containment ceiling `R`.
    pub ceiling_binding: bool,
    pub ceiling: f64,
    pub functional_trace: Vec<f64>,
}

/// Atom index of each atom's antipode.
fn antipodes(nu: &SphericalAtomMeasure) -> Result<Vec<usize>> {
    nu.dirs()
        .iter()
        .enumerate()
        .map(|(i, u)| {
            let d = neg(u);
            nu.dirs()
                .iter()
                .position(|v| dist(v, &d) <= 1e-9)
                .filter(|&j| (nu.weights()[j] - nu.weights()[i]).abs() <= 1e-12 * nu.weights()[i].max(1.0))
                .ok_or(Error::NotEven)
        })
        .collect()
}

/// Checks that `ν` is an admissible target.
pub fn check_target(nu: &SphericalAtomMeasure) -> Result<Vec<usize>> {
    let anti = antipodes(nu)?;
    if nu.is_empty() || nu.hemisphere_min() <= 1e-12 * nu.total() {
        return Err(Error::DegenerateTarget);
    }
    Ok(anti)
}

/// `q_β(ν, r) = (n/β)·μ(rB)^{β/n} − r^q·ν(S)`.
pub fn ball_functional(mu: &DensitySpec, dim: usize, beta: f64, nu_total: f64, q: f64, r: f64) -> f64 {
    let n = dim as f64;
    (n / beta) * ball_mass(mu, dim, r).powf(beta / n) - r.powf(q) * nu_total
}

fn log_r_grid() -> Vec<f64> {
    crate::measures::log_grid(1e-8, 1e8, 20)
}

/// Radius `r*` maximizing `q_β(ν, r)` on a log grid.
pub fn warm_start_radius(mu: &DensitySpec, dim: usize, beta: f64, nu: &SphericalAtomMeasure, q: f64) -> f64 {
    let t = nu.total();
    log_r_grid()
        .into_iter()
        .map(|r| (r, ball_functional(mu, dim, beta, t, q, r)))
        .fold((1.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a })
        .0
}

/// Containment radius: the last zero of `q_β(C_ν·ν, r)` with
/// `C_ν = min_θ (cosine transform)/ν(S)`; infinite when none is found.
pub fn containment_radius(mu: &DensitySpec, dim: usize, beta: f64, nu: &SphericalAtomMeasure, q: f64) -> f64 {
    let t = nu.hemisphere_min();
    let grid = log_r_grid();
    let vals: Vec<f64> = grid
        .iter()
        .map(|&r| ball_functional(mu, dim, beta, t, q, r))
        .collect();
    let Some(last) = vals.iter().rposition(|v| *v > 0.0) else {
        return f64::INFINITY;
    };
    if last + 1 == grid.len() {
        return f64::INFINITY;
    }
    let (mut lo, mut hi) = (grid[last], grid[last + 1]);
    for _ in 0..100 {
        let mid = (lo * hi).sqrt();
        if ball_functional(mu, dim, beta, t, q, mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

struct Eval {
    body: HPolytope,
    psi: f64,
    grad: Vec<f64>,
    c: f64,
    residual_inf: f64,
}

fn evaluate(
    mu: &DensitySpec,
    beta: f64,
    q: f64,
    nu: &SphericalAtomMeasure,
    anti: &[usize],
    h: &[f64],
    cfg: &QuadConfig,
) -> Result<Eval> {
    let dim = nu.dim();
    let n = dim as f64;
    let body = wulff(dim, nu.dirs(), h)?;
    let (m, fm) = mass_and_facets(mu, &body, cfg);
    let nw = nu.weights();
    let mpow = m.powf(beta / n - 1.0);
    let psi = (n / beta) * m.powf(beta / n)
        - h.iter()
            .zip(nw)
            .map(|(x, w)| if q == 1.0 { x * w } else { x.powf(q) * w })
            .sum::<f64>();
    let raw: Vec<f64> = (0..h.len())
        .map(|i| {
            let qterm = if q == 1.0 { nw[i] } else { q * h[i].powf(q - 1.0) * nw[i] };
            mpow * fm[i] - qterm
        })
        .collect();
    let grad: Vec<f64> = (0..h.len()).map(|i| 0.5 * (raw[i] + raw[anti[i]])).collect();
    let c = mpow / q;
    let residual_inf = (0..h.len())
        .map(|i| {
            let s = if q == 1.0 { fm[i] } else { body.offsets()[i].powf(1.0 - q) * fm[i] };
            (c * s - nw[i]).abs()
        })
        .fold(0.0, f64::max);
    Ok(Eval {
        body,
        psi,
        grad,
        c,
        residual_inf,
    })
}

/// `solve_q` with `q = 1`.
pub fn solve(
    mu: &DensitySpec,
    beta: f64,
    nu: &SphericalAtomMeasure,
    cfg: &QuadConfig,
    opt: &SolveOptions,
) -> Result<SolveReport> {
    solve_q(mu, beta, nu, 1.0, cfg, opt)
}

/// Maximizes `Ψ` and returns the body with its constant `c = μ(K)^{β/n−1}/q`.
pub fn solve_q(
    mu: &DensitySpec,
    beta: f64,
    nu: &SphericalAtomMeasure,
    q: f64,
    cfg: &QuadConfig,
    opt: &SolveOptions,
) -> Result<SolveReport> {
    if !(q >= 1.0) {
        return Err(Error::QOutOfRange(q));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Precondition(format!("beta must be positive, got {beta}")));
    }
    let dim = nu.dim();
    mu.validate(dim)?;
    let anti = check_target(nu)?;
    let m = nu.len();
    let maxw = nu.max_weight();
    let mut h: Vec<f64> = match &opt.init {
        Some(v) if v.len() == m && v.iter().all(|x| *x > 0.0 && x.is_finite()) => {
            (0..m).map(|i| 0.5 * (v[i] + v[anti[i]])).collect()
        }
        Some(_) => {
            return Err(Error::invalid("init", format!("needs {m} positive values")));
        }
        None => vec![warm_start_radius(mu, dim, beta, nu, q); m],
    };
    let mut sorted = h.clone();
    sorted.sort_by(f64::total_cmp);
    let floor = opt.floor_factor * sorted[m / 2];
    let ceiling = containment_radius(mu, dim, beta, nu, q);
    for x in h.iter_mut() {
        *x = x.clamp(floor, ceiling);
    }
    let project = |x: f64| x.clamp(floor, ceiling);
    let mut cur = evaluate(mu, beta, q, nu, &anti, &h, cfg)?;
    let mut trace = vec![cur.psi];
    let mut iterations = 0;
    let mut step = {
        let g = cur.grad.iter().map(|x| x.abs()).fold(0.0, f64::max);
        if g > 0.0 { 1.0 / g } else { 1.0 }
    };
    while cur.residual_inf / maxw > opt.tol && iterations < opt.max_iters {
        let mut t = step;
        let mut accepted = None;
        for _ in 0..opt.max_halvings {
            let trial: Vec<f64> = h
                .iter()
                .zip(&cur.grad)
                .map(|(x, g)| project(x + t * g))
                .collect();
            let dh: Vec<f64> = trial.iter().zip(&h).map(|(a, b)| a - b).collect();
            let ascent: f64 = dh.iter().zip(&cur.grad).map(|(d, g)| d * g).sum();
            if ascent <= 0.0 {
                break;
            }
            if let Ok(next) = evaluate(mu, beta, q, nu, &anti, &trial, cfg) {
                let gain = next.psi - cur.psi;
                let noise = 64.0 * f64::EPSILON * cur.psi.abs().max(1e-300);
                let armijo = gain >= opt.c1 * ascent;
                // Below rounding level the increase cannot be measured; accept
                // when the gradient at the trial point still points forward.
                let slope_ok = gain.abs() <= noise
                    && next.grad.iter().zip(&dh).map(|(g, d)| g * d).sum::<f64>() >= 0.0;
                if armijo || slope_ok {
                    accepted = Some((trial, next, dh));
                    break;
                }
            }
            t *= 0.5;
        }
        let Some((trial, next, dh)) = accepted else {
            return Err(Error::Stalled(opt.max_halvings));
        };
        // Barzilai–Borwein length for the next trial step.
        let y: Vec<f64> = next.grad.iter().zip(&cur.grad).map(|(a, b)| a - b).collect();
        let sy: f64 = dh.iter().zip(&y).map(|(a, b)| a * b).sum();
        let ss: f64 = dh.iter().map(|a| a * a).sum();
        step = if sy < 0.0 && ss > 0.0 { ss / -sy } else { 2.0 * t };
        h = trial;
        cur = next;
        trace.push(cur.psi);
        iterations += 1;
    }
    let residual_rel = cur.residual_inf / maxw;
    let tiny = 1e-12 * ceiling.min(1e300);
    Ok(SolveReport {
        c: cur.c,
        beta,
        q,
        iterations,
        residual_inf: cur.residual_inf,
        residual_rel,
        converged: residual_rel <= opt.tol,
        floor_binding: h.iter().any(|x| *x <= floor * (1.0 + 1e-12)),
        ceiling_binding: ceiling.is_finite() && h.iter().any(|x| *x >= ceiling - tiny),
        ceiling,
        functional_trace: trace,
        body: cur.body,
    })
}

fn homogeneity_degree(mu: &DensitySpec, dim: usize) -> Result<f64> {
    let alpha = mu.homogeneity(dim).ok_or_else(|| {
        Error::Unsupported(format!("{} is not homogeneous", mu.name()))
    })?;
    if (alpha - 1.0).abs() < 1e-12 {
        return Err(Error::OneHomogeneous);
    }
    Ok(alpha)
}

/// Solves `S^μ_{K,q} = ν` exactly (`c = 1`) for an α-homogeneous measure:
/// runs the solver with `β = n/(2α)` and dilates by `A` with
/// `A^{α−q} = μ(K̃)^{β/n−1}/q`.
pub fn solve_homogeneous(
    mu: &DensitySpec,
    nu: &SphericalAtomMeasure,
    q: f64,
    cfg: &QuadConfig,
    opt: &SolveOptions,
) -> Result<SolveReport> {
    let dim = nu.dim();
    let alpha = homogeneity_degree(mu, dim)?;
    if (alpha - q).abs() < 1e-12 {
        return Err(Error::Unsupported(format!("alpha = q = {q} has no rescaling")));
    }
    let beta = dim as f64 / (2.0 * alpha);
    let mut rep = solve_q(mu, beta, nu, q, cfg, opt)?;
    let a = rep.c.powf(1.0 / (alpha - q));
    rep.body = rep.body.scaled(a);
    let r = residual(mu, &rep.body, 1.0, nu, q, cfg)?;
    rep.c = 1.0;
    rep.residual_inf = r.inf_norm;
    rep.residual_rel = r.rel_norm;
    rep.converged = rep.converged && r.rel_norm <= opt.tol;
    Ok(rep)
}

#[derive(Clone, Debug, Serialize)]
pub struct Residual {
    pub inf_norm: f64,
    pub rel_norm: f64,
    pub per_atom: Vec<f64>,
}

/// Per-atom `|c·S^μ_{K,q}(u_i) − ν(u_i)|`.
pub fn residual(
    mu: &DensitySpec,
    k: &HPolytope,
    c: f64,
    nu: &SphericalAtomMeasure,
    q: f64,
    cfg: &QuadConfig,
) -> Result<Residual> {
    if !(q >= 1.0) {
        return Err(Error::QOutOfRange(q));
    }
    let idx: Vec<usize> = nu
        .dirs()
        .iter()
        .enumerate()
        .map(|(i, u)| k.find_normal(u).ok_or(Error::NormalMismatch(i)))
        .collect::<Result<_>>()?;
    let (_, fm) = mass_and_facets(mu, k, cfg);
    let per_atom: Vec<f64> = idx
        .iter()
        .zip(nu.weights())
        .map(|(&j, w)| {
            let s = if q == 1.0 { fm[j] } else { k.offsets()[j].powf(1.0 - q) * fm[j] };
            (c * s - w).abs()
        })
        .collect();
    let inf_norm = per_atom.iter().copied().fold(0.0, f64::max);
    Ok(Residual {
        inf_norm,
        rel_norm: inf_norm / nu.max_weight().max(1e-300),
        per_atom,
    })
}

/// μ-Blaschke body: the symmetric body with `S^μ = ½(S^μ_K + S^μ_K∘(−·))`.
pub fn blaschke(mu: &DensitySpec, k: &HPolytope, cfg: &QuadConfig, opt: &SolveOptions) -> Result<SolveReport> {
    homogeneity_degree(mu, k.dim())?;
    let target = crate::surfmeas::surface_measure(mu, k, cfg).symmetrized();
    solve_homogeneous(mu, &target, 1.0, cfg, opt)
}

#[derive(Clone, Debug)]
pub struct BlaschkeBetaReport {
    pub solve: SolveReport,
    pub target: SphericalAtomMeasure,
    /// `max|c·S^μ(result) − target| / max target`.
    pub residual_rel: f64,
    pub mass_ratio: f64,
}

/// β-μ-Blaschke body: solves `c·S^μ = ½μ(K)^{β/n−1}(S^μ_K(u) + S^μ_K(−u))`.
pub fn blaschke_beta(
    mu: &DensitySpec,
    beta: f64,
    k: &HPolytope,
    cfg: &QuadConfig,
    opt: &SolveOptions,
) -> Result<BlaschkeBetaReport> {
    let n = k.dim() as f64;
    let (m, _) = mass_and_facets(mu, k, cfg);
    let target = crate::surfmeas::surface_measure(mu, k, cfg)
        .symmetrized()
        .scaled(m.powf(beta / n - 1.0));
    let rep = solve(mu, beta, &target, cfg, opt)?;
    let (m2, _) = mass_and_facets(mu, &rep.body, cfg);
    Ok(BlaschkeBetaReport {
        residual_rel: rep.residual_rel,
        mass_ratio: m2 / m,
        solve: rep,
        target,
    })
}

/// Which solver a uniqueness probe restarts.
#[derive(Clone, Copy, Debug)]
pub enum ProbeMode {
    Solve { beta: f64, q: f64 },
    Homogeneous { q: f64 },
}

#[derive(Clone, Debug)]
pub struct UniquenessReport {
    pub max_pairwise_hausdorff: f64,
    pub reports: Vec<std::result::Result<SolveReport, Error>>,
    pub all_ok: bool,
}

/// Restarts the solver from seeded random support vectors in `[0.5, 2]` and
/// reports the largest pairwise Hausdorff distance between solutions.
pub fn uniqueness_probe(
    mu: &DensitySpec,
    nu: &SphericalAtomMeasure,
    mode: ProbeMode,
    restarts: usize,
    seed: u64,
    cfg: &QuadConfig,
    opt: &SolveOptions,
) -> Result<UniquenessReport> {
    if restarts < 2 {
        return Err(Error::Precondition("restarts must be >= 2".into()));
    }
    let anti = check_target(nu)?;
    let reports: Vec<std::result::Result<SolveReport, Error>> = (0..restarts)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            let raw: Vec<f64> = (0..nu.len()).map(|_| rng.gen_range(0.5..2.0)).collect();
            let init: Vec<f64> = (0..nu.len())
                .map(|i| if anti[i] < i { raw[anti[i]] } else { raw[i] })
                .collect();
            let o = SolveOptions {
                init: Some(init),
                ..opt.clone()
            };
            match mode {
                ProbeMode::Solve { beta, q } => solve_q(mu, beta, nu, q, cfg, &o),
                ProbeMode::Homogeneous { q } => solve_homogeneous(mu, nu, q, cfg, &o),
            }
        })
        .collect();
    let bodies: Vec<&HPolytope> = reports.iter().filter_map(|r| r.as_ref().ok()).map(|r| &r.body).collect();
    let mut worst: f64 = 0.0;
    for i in 0..bodies.len() {
        for j in 0..i {
            worst = worst.max(hausdorff(bodies[i], bodies[j]));
        }
    }
    Ok(UniquenessReport {
        max_pairwise_hausdorff: worst,
        all_ok: reports.iter().all(|r| r.as_ref().is_ok_and(|s| s.converged)),
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{axis_box, facet_data};
    use crate::quad::phi_cdf;
    use std::f64::consts::PI;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    fn box_target(w: &[f64]) -> SphericalAtomMeasure {
        // Atoms (±e_i, w_i).
        let mut d = Vec::new();
        let mut ws = Vec::new();
        for (i, x) in w.iter().enumerate() {
            let mut e = [0.0; 3];
            e[i] = 1.0;
            d.push(e);
            d.push(neg(&e));
            ws.push(*x);
            ws.push(*x);
        }
        SphericalAtomMeasure::new(w.len(), d, ws).unwrap()
    }

    #[test]
    fn lebesgue_square_scale_oracle() {
        // c·2a = 2 with c = (4a²)^{β/2 − 1}; for β = ½ this gives a = 1/8.
        let nu = box_target(&[2.0, 2.0]);
        let r = solve(&DensitySpec::Lebesgue, 0.5, &nu, &cfg(), &SolveOptions::default()).unwrap();
        assert!(r.converged && r.residual_rel <= 1e-6);
        let a = bisect(1e-6, 10.0, |a| (4.0 * a * a).powf(0.25 - 1.0) * 2.0 * a - 2.0);
        assert!((a - 0.125).abs() < 1e-12);
        assert!(hausdorff(&r.body, &axis_box(&[a, a]).unwrap()) < 1e-6);
        let v = r.body.volume();
        assert!((r.c - v.powf(0.25 - 1.0)).abs() < 1e-10);
        for w in r.functional_trace.windows(2) {
            assert!(w[1] >= w[0] - 1e-13 * w[0].abs());
        }
    }

    /// Bisection for a decreasing or increasing scalar root.
    fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
        let flo = f(lo);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if (f(mid) > 0.0) == (flo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn lebesgue_beta_equal_n_over_alpha_has_no_solution() {
        // With β = n/α the constant c·S is scale invariant: no square solves it.
        let nu = box_target(&[2.0, 2.0]);
        let opt = SolveOptions {
            max_iters: 300,
            ..Default::default()
        };
        match solve(&DensitySpec::Lebesgue, 1.0, &nu, &cfg(), &opt) {
            Ok(r) => assert!(!r.converged || r.floor_binding || r.ceiling_binding),
            Err(e) => assert!(matches!(e, Error::Stalled(_))),
        }
    }

    #[test]
    fn gaussian_square_oracle() {
        let w = 0.1;
        let nu = box_target(&[w, w]);
        let r = solve(&DensitySpec::Gaussian, 0.5, &nu, &cfg(), &SolveOptions { tol: 1e-9, ..Default::default() }).unwrap();
        assert!(r.converged);
        let facet = |a: f64| (-0.5 * a * a).exp() * (2.0 * phi_cdf(a) - 1.0) / (2.0 * PI).sqrt();
        let gm = |a: f64| (2.0 * phi_cdf(a) - 1.0).powi(2);
        let a = bisect(1e-3, 20.0, |a| gm(a).powf(0.25 - 1.0) * facet(a) - w);
        for h in r.body.offsets() {
            assert!((h - a).abs() < 1e-7, "{h} vs {a}");
        }
    }

    #[test]
    fn hemisphere_target_is_degenerate() {
        let nu = SphericalAtomMeasure::new(2, vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]], vec![1.0, 1.0]).unwrap();
        let e = solve(&DensitySpec::Gaussian, 0.5, &nu, &cfg(), &SolveOptions::default()).unwrap_err();
        assert_eq!(e.to_string(), "degenerate target");
        let odd = SphericalAtomMeasure::new(
            2,
            vec![[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0]],
            vec![1.0, 2.0, 1.0, 1.0],
        )
        .unwrap();
        assert_eq!(solve(&DensitySpec::Gaussian, 0.5, &odd, &cfg(), &SolveOptions::default()).unwrap_err(), Error::NotEven);
    }

    #[test]
    fn homogeneous_boxes() {
        let opt = SolveOptions { tol: 1e-9, ..Default::default() };
        let r = solve_homogeneous(&DensitySpec::Lebesgue, &box_target(&[2.0, 2.0]), 1.0, &cfg(), &opt).unwrap();
        assert!(hausdorff(&r.body, &axis_box(&[1.0, 1.0]).unwrap()) <= 1e-5);
        assert_eq!(r.c, 1.0);
        let r = solve_homogeneous(&DensitySpec::Lebesgue, &box_target(&[2.0, 4.0]), 1.0, &cfg(), &opt).unwrap();
        assert!(hausdorff(&r.body, &axis_box(&[2.0, 1.0]).unwrap()) <= 1e-5);
        // Power s = 1: facet mass of [−a,a]² on x = a is ∫_{−a}^{a} √(a²+y²) dy
        // = a²(√2 + asinh 1); solve w = that.
        let w = 1.5;
        let r = solve_homogeneous(&DensitySpec::Power { s: 1.0 }, &box_target(&[w, w]), 1.0, &cfg(), &opt).unwrap();
        let a = bisect(1e-6, 10.0, |a| a * a * (2f64.sqrt() + 1f64.asinh()) - w);
        assert!(hausdorff(&r.body, &axis_box(&[a, a]).unwrap()) <= 1e-6);
        let one = DensitySpec::Power { s: -1.0 };
        assert_eq!(solve_homogeneous(&one, &box_target(&[1.0, 1.0]), 1.0, &cfg(), &opt).unwrap_err(), Error::OneHomogeneous);
    }

    #[test]
    fn lq_solver_agrees_with_q1() {
        let nu = box_target(&[0.1, 0.1]);
        let opt = SolveOptions { tol: 1e-10, ..Default::default() };
        let a = solve(&DensitySpec::Gaussian, 0.5, &nu, &cfg(), &opt).unwrap();
        let b = solve_q(&DensitySpec::Gaussian, 0.5, &nu, 1.0, &cfg(), &opt).unwrap();
        assert!(hausdorff(&a.body, &b.body) < 1e-8);
        assert!((a.c - b.c).abs() < 1e-8);
        // q = 2: stationarity m^{β/n−1}·S(a) = 2·a·w.
        let q = solve_q(&DensitySpec::Gaussian, 0.5, &nu, 2.0, &cfg(), &opt).unwrap();
        assert!(q.converged);
        let facet = |a: f64| (-0.5 * a * a).exp() * (2.0 * phi_cdf(a) - 1.0) / (2.0 * PI).sqrt();
        let gm = |a: f64| (2.0 * phi_cdf(a) - 1.0).powi(2);
        let s = bisect(1e-3, 20.0, |a| gm(a).powf(-0.75) * facet(a) - 2.0 * a * 0.1);
        assert!((q.body.offsets()[0] - s).abs() < 1e-6);
    }

    #[test]
    fn residual_rules() {
        let k = axis_box(&[1.0, 0.5]).unwrap();
        let nu = crate::surfmeas::surface_measure(&DensitySpec::Gaussian, &k, &cfg()).scaled(0.7);
        let r = residual(&DensitySpec::Gaussian, &k, 0.7, &nu, 1.0, &cfg()).unwrap();
        assert!(r.inf_norm < 1e-12);
        let nu = facet_data(&k);
        let r = residual(&DensitySpec::Lebesgue, &k.scaled(1.01), 1.0, &nu, 1.0, &cfg()).unwrap();
        for (i, p) in r.per_atom.iter().enumerate() {
            assert!((p - 0.01 * nu.weights()[i]).abs() < 1e-12);
        }
        let other = box_target(&[1.0, 1.0]);
        let tri = crate::bodies::wulff(
            2,
            &[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2, 0.0]],
            &[1.0, 1.0, 1.0],
        )
        .unwrap();
        assert!(matches!(residual(&DensitySpec::Lebesgue, &tri, 1.0, &other, 1.0, &cfg()), Err(Error::NormalMismatch(_))));
    }

    #[test]
    fn uniqueness_lebesgue_box() {
        let nu = box_target(&[2.0, 3.0]);
        let opt = SolveOptions { tol: 1e-9, ..Default::default() };
        let u = uniqueness_probe(&DensitySpec::Lebesgue, &nu, ProbeMode::Homogeneous { q: 1.0 }, 5, 1, &cfg(), &opt).unwrap();
        assert!(u.all_ok);
        assert!(u.max_pairwise_hausdorff <= 1e-5);
    }
}
