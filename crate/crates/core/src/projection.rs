//! Weighted projection bodies, the surface-area identity, and the
//! Shephard-type comparison harness.
//!
//! `Π_μK` is the zonotope with generators `½·w_i·u_i` over the atoms of
//! `S^μ_K`, so `h_{Π_μK}(θ) = ½·Σ w_i|⟨θ, u_i⟩|`.

use crate::bodies::{zonotope, HPolytope, Zonotope};
use crate::error::{Error, Result};
use crate::geom::{
    circle_grid, cross, dot, icosphere, icosphere_weights, kappa, norm, normalize, scale, tangent_basis, Vec3,
};
use crate::hull::hull2d;
use crate::measures::{boundary_mass, mass, DensitySpec, QuadConfig};
use crate::minkowski::{blaschke, solve_homogeneous, SolveOptions};
use crate::surfmeas::{mixed_measure, surface_measure, SphericalAtomMeasure};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// `Σ w_i|⟨θ, u_i⟩|`.
pub fn cosine_transform(m: &SphericalAtomMeasure, theta: &Vec3) -> f64 {
    m.cosine_transform(theta)
}

/// `Π_μK`, kept as the atom measure `S^μ_K`; the polytope is realized on demand.
#[derive(Clone, Debug)]
pub struct ProjectionBody {
    measure: DensitySpec,
    atoms: SphericalAtomMeasure,
}

impl ProjectionBody {
    /// Projection body of an arbitrary finite atom measure.
    pub fn from_atoms(measure: DensitySpec, atoms: SphericalAtomMeasure) -> Self {
        ProjectionBody { measure, atoms }
    }
    pub fn dim(&self) -> usize {
        self.atoms.dim()
    }
    pub fn measure(&self) -> &DensitySpec {
        &self.measure
    }
    pub fn atoms(&self) -> &SphericalAtomMeasure {
        &self.atoms
    }
    pub fn support(&self, theta: &Vec3) -> f64 {
        0.5 * self.atoms.cosine_transform(theta)
    }
    /// Generators `½·w_i·u_i`.
    pub fn generators(&self) -> Vec<Vec3> {
        self.atoms
            .dirs()
            .iter()
            .zip(self.atoms.weights())
            .filter(|(_, w)| **w > 0.0)
            .map(|(u, w)| scale(u, 0.5 * w))
            .collect()
    }
    /// Realizes the zonotope. In 3D the facet count grows quadratically in
    /// the number of atom pairs.
    pub fn zonotope(&self) -> Result<Zonotope> {
        zonotope(self.dim(), &self.generators())
    }
    /// `∫_S h dθ`, exact: `∫_S |⟨θ, g⟩| dθ = 2κ_{n−1}|g|`.
    pub fn sphere_integral(&self) -> f64 {
        kappa(self.dim() - 1) * self.atoms.total()
    }
    /// `∫_S h dθ` by a fixed rule: trapezoid on 2048 angles in 2D, vertex
    /// weights of the level-5 icosphere in 3D. The kinks of `h` limit this
    /// to second order.
    pub fn sphere_integral_grid(&self) -> f64 {
        if self.dim() == 2 {
            let m = 2048;
            let h = 2.0 * PI / m as f64;
            circle_grid(m, 0.0).iter().map(|t| self.support(t)).sum::<f64>() * h
        } else {
            let (v, w) = icosphere_weights(5);
            v.iter().zip(&w).map(|(t, wt)| wt * self.support(t)).sum()
        }
    }
}

/// `Π_μK` from the weighted surface measure of `K`.
pub fn projection_body(mu: &DensitySpec, k: &HPolytope, cfg: &QuadConfig) -> ProjectionBody {
    ProjectionBody {
        measure: *mu,
        atoms: surface_measure(mu, k, cfg),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct IdentityReport {
    pub boundary_mass: f64,
    pub sphere_integral: f64,
    pub residual: f64,
    /// Same identity with the fixed grid rule.
    pub grid_integral: f64,
    pub grid_residual: f64,
}

/// Both sides of `μ⁺(∂K) = (1/κ_{n−1})·∫_S h_{Π_μK}`.
pub fn surface_area_identity(mu: &DensitySpec, k: &HPolytope, cfg: &QuadConfig) -> IdentityReport {
    let pb = projection_body(mu, k, cfg);
    let kap = kappa(k.dim() - 1);
    let b = boundary_mass(mu, k, cfg);
    let exact = pb.sphere_integral() / kap;
    let grid = pb.sphere_integral_grid() / kap;
    IdentityReport {
        boundary_mass: b,
        sphere_integral: exact,
        residual: (b - exact).abs(),
        grid_integral: grid,
        grid_residual: (b - grid).abs(),
    }
}

/// `|μ⁺(∂K) − (1/κ_{n−1})·∫_S h_{Π_μK}|` with the exact sphere integral.
pub fn surface_area_identity_residual(mu: &DensitySpec, k: &HPolytope, cfg: &QuadConfig) -> f64 {
    surface_area_identity(mu, k, cfg).residual
}

/// Minimum over the sphere of `Σ c_i|⟨θ, u_i⟩|` for signed `c_i`, with a
/// minimizer.
///
/// Exact in 2D: between consecutive kinks the sum is `⟨θ, w⟩` for a fixed
/// `w`, minimized at an arc end or at `−w/|w|`. In 3D the candidates are the
/// level-4 icosphere, all pairwise kink-circle crossings `u_i × u_j`, and the
/// cell minimizers `−w/|w|` seen from the best of those.
pub fn min_signed_cosine(dim: usize, terms: &[(Vec3, f64)]) -> (f64, Vec3) {
    let eval = |t: &Vec3| terms.iter().map(|(u, c)| c * dot(t, u).abs()).sum::<f64>();
    let linear_part = |t: &Vec3| {
        let mut w = [0.0; 3];
        for (u, c) in terms {
            let s = dot(t, u).signum();
            for k in 0..3 {
                w[k] += c * s * u[k];
            }
        }
        w
    };
    let mut best = (f64::INFINITY, [1.0, 0.0, 0.0]);
    let consider = |t: Vec3, best: &mut (f64, Vec3)| {
        let v = eval(&t);
        if v < best.0 {
            *best = (v, t);
        }
    };
    if dim == 2 {
        let mut kinks: Vec<f64> = Vec::with_capacity(2 * terms.len());
        for (u, _) in terms {
            let a = u[1].atan2(u[0]);
            for d in [0.5 * PI, -0.5 * PI] {
                kinks.push((a + d).rem_euclid(2.0 * PI));
            }
        }
        kinks.sort_by(f64::total_cmp);
        kinks.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        if kinks.is_empty() {
            kinks.push(0.0);
        }
        let at = |a: f64| [a.cos(), a.sin(), 0.0];
        for i in 0..kinks.len() {
            let a = kinks[i];
            let b = if i + 1 < kinks.len() {
                kinks[i + 1]
            } else {
                kinks[0] + 2.0 * PI
            };
            consider(at(a), &mut best);
            let w = linear_part(&at(0.5 * (a + b)));
            if norm(&w) > 0.0 {
                let c = (-w[1]).atan2(-w[0]).rem_euclid(2.0 * PI);
                for c in [c, c + 2.0 * PI] {
                    if c > a && c < b {
                        consider(at(c), &mut best);
                    }
                }
            }
        }
        for t in circle_grid(360, 0.0) {
            consider(t, &mut best);
        }
        return best;
    }
    let mut cands: Vec<Vec3> = icosphere(4).0;
    for i in 0..terms.len() {
        for j in 0..i {
            let c = cross(&terms[i].0, &terms[j].0);
            if norm(&c) > 1e-9 {
                let n = normalize(&c);
                cands.push(n);
                cands.push(crate::geom::neg(&n));
            }
        }
    }
    let mut vals: Vec<(f64, usize)> = cands.iter().enumerate().map(|(i, t)| (eval(t), i)).collect();
    vals.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for &(v, i) in &vals {
        if v < best.0 {
            best = (v, cands[i]);
        }
    }
    for &(_, i) in vals.iter().take(32) {
        let w = linear_part(&cands[i]);
        if norm(&w) > 0.0 {
            consider(normalize(&scale(&w, -1.0)), &mut best);
        }
    }
    best
}

/// `min_θ (h_B(θ) − h_A(θ))` for projection bodies `A`, `B`.
pub fn support_margin(a: &ProjectionBody, b: &ProjectionBody) -> f64 {
    let mut terms: Vec<(Vec3, f64)> = Vec::new();
    for (u, w) in b.atoms.dirs().iter().zip(b.atoms.weights()) {
        terms.push((*u, 0.5 * w));
    }
    for (u, w) in a.atoms.dirs().iter().zip(a.atoms.weights()) {
        terms.push((*u, -0.5 * w));
    }
    min_signed_cosine(a.dim(), &terms).0
}

/// Largest `t` with `t·h_A ≤ h_B` on the sphere (bisection on the margin).
pub fn max_dominated_scale(a: &ProjectionBody, b: &ProjectionBody) -> f64 {
    let scaled = |t: f64| ProjectionBody {
        measure: a.measure,
        atoms: a.atoms.scaled(t),
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while support_margin(&scaled(hi), b) >= 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e12 {
            return hi;
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if support_margin(&scaled(mid), b) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// A 3D polytope is a zonotope iff every facet is centrally symmetric.
pub fn is_zonotope(body: &HPolytope) -> bool {
    if !body.is_symmetric(1e-9) {
        return false;
    }
    if body.dim() == 2 {
        return true;
    }
    let r = body.circumradius();
    for i in 0..body.len() {
        if body.facet_areas()[i] <= 0.0 {
            continue;
        }
        let (e1, e2) = tangent_basis(&body.normals()[i]);
        let pts: Vec<Vec3> = body
            .facet(i)
            .iter()
            .map(|&v| {
                let p = &body.vertices()[v];
                [dot(p, &e1), dot(p, &e2), 0.0]
            })
            .collect();
        let h = hull2d(&pts, 1e-12 * r * r);
        let m = h.len();
        if m % 2 == 1 {
            return false;
        }
        let half = m / 2;
        let c = [
            pts[h[0]][0] + pts[h[half]][0],
            pts[h[0]][1] + pts[h[half]][1],
        ];
        for k in 1..half {
            let s = [
                pts[h[k]][0] + pts[h[k + half]][0],
                pts[h[k]][1] + pts[h[k + half]][1],
            ];
            if (s[0] - c[0]).hypot(s[1] - c[1]) > 1e-8 * r {
                return false;
            }
        }
    }
    true
}

/// Distance bound to the projection bodies: 1 for zonotopes and symmetric
/// planar bodies, `√n` otherwise.
pub fn d_pi(l: &HPolytope) -> f64 {
    if is_zonotope(l) {
        1.0
    } else {
        (l.dim() as f64).sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShephardBound {
    /// `μ(K) ≤ (β/α)·𝒜_K·d_Π·ν(L)`.
    Q1AK,
    /// `μ(K) ≤ (β/α)·𝒜_L·d_Π·ν(L)`.
    Q1AL,
    /// `μ = ν`: `μ(K) ≤ d_Π^{α/(α−1)}·μ(L)`.
    CorQ1,
    /// `μ(K) ≤ 𝒵·ν(L) + ℒ` with `F = x^p`.
    Hard1,
    /// `μ(K) ≤ 𝒵·ν(L)`, closed form for `F = x^p`.
    CorHard2,
    /// `μ(K, L) ≤ β·d_Π·ν(L)`.
    LemmaQ1Mixed,
}

impl ShephardBound {
    pub const ALL: [ShephardBound; 6] = [
        ShephardBound::Q1AK,
        ShephardBound::Q1AL,
        ShephardBound::CorQ1,
        ShephardBound::Hard1,
        ShephardBound::CorHard2,
        ShephardBound::LemmaQ1Mixed,
    ];
    pub fn name(&self) -> &'static str {
        match self {
            ShephardBound::Q1AK => "q1_AK",
            ShephardBound::Q1AL => "q1_AL",
            ShephardBound::CorQ1 => "cor_q1",
            ShephardBound::Hard1 => "hard1",
            ShephardBound::CorHard2 => "cor_hard2",
            ShephardBound::LemmaQ1Mixed => "lemma_q1_mixed",
        }
    }
}

impl std::str::FromStr for ShephardBound {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        ShephardBound::ALL
            .iter()
            .find(|b| b.name().eq_ignore_ascii_case(s))
            .copied()
            .ok_or_else(|| {
                let names: Vec<&str> = ShephardBound::ALL.iter().map(|b| b.name()).collect();
                format!("unknown bound '{s}' ({})", names.join(", "))
            })
    }
}

/// Constants entering the bounds; `None` where undefined for the inputs.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct ShephardConstants {
    pub a_k: Option<f64>,
    pub a_l: Option<f64>,
    pub b: Option<f64>,
    pub z: Option<f64>,
    pub l_term: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShephardReport {
    /// `min_θ (h_{Π_νL} − h_{Π_μK})`.
    pub hypothesis_margin: f64,
    pub hypothesis_holds: bool,
    pub bound_name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub d_pi_used: f64,
    pub alpha: f64,
    pub beta: f64,
    pub constants: ShephardConstants,
}

/// Homogeneity degree of a measure admitted by the harness.
fn harness_degree(m: &DensitySpec, dim: usize) -> Result<f64> {
    match m {
        DensitySpec::Gaussian => Err(Error::Unsupported(
            "shephard comparison is not meaningful for log-concave measures such as the gaussian".into(),
        )),
        _ => {
            m.validate(dim)?;
            Ok(m.homogeneity(dim).expect("lebesgue and power are homogeneous"))
        }
    }
}

/// `α ≥ n` with `0 < p ≤ 1/α`, or `α < n` with `p = 1/α`.
pub fn check_concavity(alpha: f64, dim: usize, p: f64) -> Result<()> {
    let n = dim as f64;
    let ok = if alpha >= n {
        p > 0.0 && p <= 1.0 / alpha + 1e-12
    } else {
        (p - 1.0 / alpha).abs() <= 1e-12
    };
    if ok {
        Ok(())
    } else {
        Err(Error::ConcavityHypothesis(format!(
            "alpha = {alpha}, p = {p} (need alpha >= {n} and 0 < p <= 1/alpha, or p = 1/alpha)"
        )))
    }
}

/// Evaluates one Shephard-type bound for symmetric `K`, `L`.
///
/// `p` is the concavity exponent of `μ`; it enters the admissibility check
/// and the `hard1` / `cor_hard2` bounds.
pub fn shephard_check(
    mu: &DensitySpec,
    nu: &DensitySpec,
    k: &HPolytope,
    l: &HPolytope,
    p: f64,
    bound: ShephardBound,
    cfg: &QuadConfig,
) -> Result<ShephardReport> {
    let dim = k.dim();
    if l.dim() != dim {
        return Err(Error::Precondition("dimension mismatch".into()));
    }
    if !k.is_symmetric(1e-9) || !l.is_symmetric(1e-9) {
        return Err(Error::Precondition("K and L must be origin-symmetric".into()));
    }
    let alpha = harness_degree(mu, dim)?;
    let beta = harness_degree(nu, dim)?;
    check_concavity(alpha, dim, p)?;
    if (alpha - 1.0).abs() < 1e-12 {
        return Err(Error::OneHomogeneous);
    }
    let pk = projection_body(mu, k, cfg);
    let pl = projection_body(nu, l, cfg);
    let margin = support_margin(&pk, &pl);
    let dp = d_pi(l);
    let mk = mass(mu, k, cfg);
    let ml = mass(mu, l, cfg);
    let nl = mass(nu, l, cfg);
    let e = 1.0 / (alpha - 1.0);
    let mut c = ShephardConstants {
        a_k: Some((mk / ml).powf(1.0 / alpha)),
        a_l: Some((nl / ml * beta / alpha * dp).powf(e)),
        b: Some((beta * nl / (alpha * ml) * dp).powf(alpha * e)),
        ..Default::default()
    };
    let hard_ok = alpha > 1.0 && p < 1.0;
    if hard_ok {
        c.z = Some(match bound {
            ShephardBound::CorHard2 => {
                (nl / ml).powf(p / (1.0 - p))
                    * (alpha * p * beta * (1.0 - p) * dp / (alpha - 1.0)
                        + (1.0 - alpha * p) * (1.0 - p) * mk / nl)
                        .powf(1.0 / (1.0 - p))
            }
            _ => beta * dp / (alpha - 1.0),
        });
        c.l_term = Some((mk - (ml / mk).powf(p) * mk / (1.0 - p)) / (alpha * p));
    }
    let (lhs, rhs) = match bound {
        ShephardBound::Q1AK => (mk, beta / alpha * c.a_k.unwrap() * dp * nl),
        ShephardBound::Q1AL => (mk, beta / alpha * c.a_l.unwrap() * dp * nl),
        ShephardBound::CorQ1 => {
            if mu != nu {
                return Err(Error::Precondition("cor_q1 requires mu = nu".into()));
            }
            (mk, dp.powf(alpha * e) * ml)
        }
        ShephardBound::Hard1 | ShephardBound::CorHard2 => {
            if !hard_ok {
                return Err(Error::Precondition(format!(
                    "{} requires alpha > 1 and p < 1",
                    bound.name()
                )));
            }
            let z = c.z.unwrap();
            match bound {
                ShephardBound::Hard1 => (mk, z * nl + c.l_term.unwrap()),
                _ => (mk, z * nl),
            }
        }
        ShephardBound::LemmaQ1Mixed => (mixed_measure(mu, k, l, cfg), beta * dp * nl),
    };
    Ok(ShephardReport {
        hypothesis_margin: margin,
        hypothesis_holds: margin >= 0.0,
        bound_name: bound.name().into(),
        lhs,
        rhs,
        slack: rhs - lhs,
        d_pi_used: dp,
        alpha,
        beta,
        constants: c,
    })
}

/// `C(μ) = μ(R)^{1−1/α}` where `S^μ_R = (1/κ_{n−1})·du`, discretized on an
/// even grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilityConstant {
    pub c_mu: f64,
    /// Circle grid size (2D) or icosphere level (3D).
    pub grid_level: usize,
    pub atoms: usize,
    pub residual_rel: f64,
}

/// Default grid: 64 angles in 2D, icosphere level 2 (162 atoms) in 3D.
pub const STABILITY_GRID: [usize; 2] = [64, 2];

pub fn stability_constant(
    mu: &DensitySpec,
    dim: usize,
    cfg: &QuadConfig,
    opt: &SolveOptions,
) -> Result<StabilityConstant> {
    let alpha = harness_degree(mu, dim)?;
    let level = if dim == 2 { STABILITY_GRID[0] } else { STABILITY_GRID[1] };
    let kap = kappa(dim - 1);
    let (dirs, w): (Vec<Vec3>, Vec<f64>) = if dim == 2 {
        let d = circle_grid(level, 0.0);
        let w = vec![2.0 * PI / level as f64 / kap; d.len()];
        (d, w)
    } else {
        let (d, w) = icosphere_weights(level);
        let w = w.iter().map(|x| x / kap).collect();
        (d, w)
    };
    let atoms = dirs.len();
    let nu = SphericalAtomMeasure::new(dim, dirs, w)?.symmetrized();
    let rep = solve_homogeneous(mu, &nu, 1.0, cfg, opt)?;
    let m = mass(mu, &rep.body, cfg);
    Ok(StabilityConstant {
        c_mu: m.powf(1.0 - 1.0 / alpha),
        grid_level: level,
        atoms,
        residual_rel: rep.residual_rel,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StabilityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub c_mu: f64,
    pub epsilon: f64,
    pub hypothesis_margin: f64,
    /// `h_{Π_μK} ≤ h_{Π_νL} − ε` on the sphere.
    pub precondition_met: bool,
    pub holds: bool,
    pub d_pi_used: f64,
    pub grid_level: usize,
}

/// `μ(K)^{1−1/α} ≤ (β/α)(ν(L)/μ(L))·d_Π·μ(L)^{1−1/α} − C(μ)·ε`.
pub fn stability_check(
    mu: &DensitySpec,
    nu: &DensitySpec,
    k: &HPolytope,
    l: &HPolytope,
    eps: f64,
    cfg: &QuadConfig,
    opt: &SolveOptions,
) -> Result<StabilityReport> {
    let c = stability_constant(mu, k.dim(), cfg, opt)?;
    stability_check_with(mu, nu, k, l, eps, &c, cfg)
}

/// As [`stability_check`] with a precomputed `C(μ)`.
pub fn stability_check_with(
    mu: &DensitySpec,
    nu: &DensitySpec,
    k: &HPolytope,
    l: &HPolytope,
    eps: f64,
    c: &StabilityConstant,
    cfg: &QuadConfig,
) -> Result<StabilityReport> {
    let dim = k.dim();
    if !(eps > 0.0) {
        return Err(Error::Precondition(format!("epsilon must be positive, got {eps}")));
    }
    if !k.is_symmetric(1e-9) || !l.is_symmetric(1e-9) {
        return Err(Error::Precondition("K and L must be origin-symmetric".into()));
    }
    let alpha = harness_degree(mu, dim)?;
    let beta = harness_degree(nu, dim)?;
    if (alpha - 1.0).abs() < 1e-12 {
        return Err(Error::OneHomogeneous);
    }
    let margin = support_margin(&projection_body(mu, k, cfg), &projection_body(nu, l, cfg));
    let dp = d_pi(l);
    let mk = mass(mu, k, cfg);
    let ml = mass(mu, l, cfg);
    let nl = mass(nu, l, cfg);
    let ex = 1.0 - 1.0 / alpha;
    let lhs = mk.powf(ex);
    let rhs = beta / alpha * (nl / ml) * dp * ml.powf(ex) - c.c_mu * eps;
    Ok(StabilityReport {
        lhs,
        rhs,
        c_mu: c.c_mu,
        epsilon: eps,
        hypothesis_margin: margin,
        precondition_met: margin >= eps,
        holds: lhs <= rhs,
        d_pi_used: dp,
        grid_level: c.grid_level,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjectiveClassReport {
    /// `max_θ |h_{Π_μ∇_μK} − h_{Π_μK}|` over the fine probe grid.
    pub support_gap: f64,
    pub mass_k: f64,
    pub mass_nabla: f64,
    /// `μ(∇_μK) ≥ μ(K)` is expected (α ≥ n).
    pub mass_increase_expected: bool,
    pub mass_ok: bool,
    pub residual_rel: f64,
}

/// Compares `Π_μ∇_μK` with `Π_μK` and the masses of `∇_μK` and `K`.
pub fn projective_class_probe(
    mu: &DensitySpec,
    k: &HPolytope,
    cfg: &QuadConfig,
    opt: &SolveOptions,
) -> Result<ProjectiveClassReport> {
    let dim = k.dim();
    let alpha = harness_degree(mu, dim)?;
    let rep = blaschke(mu, k, cfg, opt)?;
    let pk = projection_body(mu, k, cfg);
    let pn = projection_body(mu, &rep.body, cfg);
    let support_gap = crate::bodies::fine_probe_grid(dim)
        .iter()
        .map(|t| (pn.support(t) - pk.support(t)).abs())
        .fold(0.0, f64::max);
    let mass_k = mass(mu, k, cfg);
    let mass_nabla = mass(mu, &rep.body, cfg);
    let expected = alpha >= dim as f64;
    Ok(ProjectiveClassReport {
        support_gap,
        mass_k,
        mass_nabla,
        mass_increase_expected: expected,
        mass_ok: !expected || mass_nabla >= mass_k * (1.0 - 1e-9),
        residual_rel: rep.residual_rel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bodies::{axis_box, wulff};
    use crate::corpus::{random_body, random_bodies, instance_rng, Kind};

    fn atoms(dim: usize, a: &[(Vec3, f64)]) -> SphericalAtomMeasure {
        SphericalAtomMeasure::new(dim, a.iter().map(|x| x.0).collect(), a.iter().map(|x| x.1).collect())
            .unwrap()
    }

    #[test]
    fn cosine_transform_values() {
        let m = atoms(2, &[([1.0, 0.0, 0.0], 1.0), ([-1.0, 0.0, 0.0], 1.0)]);
        assert_eq!(cosine_transform(&m, &[1.0, 0.0, 0.0]), 2.0);
        assert_eq!(cosine_transform(&m, &[0.0, 1.0, 0.0]), 0.0);
        let g = circle_grid(360, 0.0);
        let u = SphericalAtomMeasure::new(2, g.clone(), vec![1.0 / 360.0; 360]).unwrap();
        for t in [[1.0, 0.0, 0.0], normalize(&[0.3, 0.7, 0.0])] {
            assert!((cosine_transform(&u, &t) - 2.0 / PI).abs() < 1e-3);
        }
    }

    #[test]
    fn cube_projection() {
        let cube = axis_box(&[1.0, 1.0, 1.0]).unwrap();
        let pb = projection_body(&DensitySpec::Lebesgue, &cube, &QuadConfig::default());
        assert!((pb.support(&[1.0, 0.0, 0.0]) - 4.0).abs() < 1e-12);
        let z = pb.zonotope().unwrap();
        assert!((z.body().support(&[1.0, 0.0, 0.0]) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_round_polygon() {
        let dirs = circle_grid(256, 0.0);
        let k = wulff(2, &dirs, &vec![1.0; 256]).unwrap();
        let pb = projection_body(&DensitySpec::Gaussian, &k, &QuadConfig::default());
        let want = 2.0 * (-0.5f64).exp() / (2.0 * PI);
        for t in circle_grid(7, 0.1) {
            assert!((pb.support(&t) - want).abs() < 1e-3);
        }
    }

    #[test]
    fn reflection_invariance() {
        let cfg = QuadConfig::default();
        let k = random_body(2, Kind::Polygon, &mut instance_rng(3, 0));
        let a = projection_body(&DensitySpec::Gaussian, &k, &cfg);
        let b = projection_body(&DensitySpec::Gaussian, &k.reflected(), &cfg);
        for t in circle_grid(50, 0.01) {
            assert!((a.support(&t) - b.support(&t)).abs() < 1e-12);
        }
    }

    #[test]
    fn zonotope_realization_matches_atoms() {
        let cfg = QuadConfig::default();
        for dim in [2, 3] {
            let k = random_body(dim, Kind::Polygon, &mut instance_rng(1, dim as u64));
            let pb = projection_body(&DensitySpec::Power { s: 1.0 }, &k, &cfg);
            let z = pb.zonotope().unwrap();
            let mut rng = instance_rng(9, 0);
            use rand::Rng;
            for _ in 0..1000 {
                let mut t = [0.0; 3];
                for c in t.iter_mut().take(dim) {
                    *c = rng.gen_range(-1.0..1.0);
                }
                let t = normalize(&t);
                assert!((z.body().support(&t) - pb.support(&t)).abs() < 1e-10);
                assert!((z.support(&t) - pb.support(&t)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn identity_square() {
        let cfg = QuadConfig::default();
        let sq = axis_box(&[1.0, 1.0]).unwrap();
        let r = surface_area_identity(&DensitySpec::Lebesgue, &sq, &cfg);
        assert!((r.boundary_mass - 8.0).abs() < 1e-12);
        assert!(r.residual < 1e-6);
        assert!(r.grid_residual < 1e-4);
        assert!(surface_area_identity_residual(&DensitySpec::Gaussian, &sq, &cfg) < 1e-5);
        let pair = atoms(3, &[([0.0, 0.0, 1.0], 0.7), ([0.0, 0.0, -1.0], 0.7)]);
        let pb = ProjectionBody::from_atoms(DensitySpec::Lebesgue, pair);
        assert!((pb.sphere_integral() / kappa(2) - 1.4).abs() < 1e-14);
    }

    #[test]
    fn margin_is_exact_in_2d() {
        // h_B − h_A for squares of different sizes: minimum on the axes.
        let a = atoms(2, &[([1.0, 0.0, 0.0], 1.0), ([-1.0, 0.0, 0.0], 1.0), ([0.0, 1.0, 0.0], 2.0), ([0.0, -1.0, 0.0], 2.0)]);
        let b = atoms(2, &[([1.0, 0.0, 0.0], 1.5), ([-1.0, 0.0, 0.0], 1.5), ([0.0, 1.0, 0.0], 2.2), ([0.0, -1.0, 0.0], 2.2)]);
        let pa = ProjectionBody::from_atoms(DensitySpec::Lebesgue, a);
        let pb = ProjectionBody::from_atoms(DensitySpec::Lebesgue, b);
        // Difference ½(0.5|x| + 0.2|y|)·2 on the circle: minimum 0.2 at θ = e₂.
        assert!((support_margin(&pa, &pb) - 0.2).abs() < 1e-14);
        assert!((max_dominated_scale(&pa, &pb) - 1.1).abs() < 1e-12);
    }

    #[test]
    fn zonotope_detection() {
        let z = crate::bodies::zonotope(3, &[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.5, 0.5, 0.5]])
            .unwrap();
        assert!(is_zonotope(z.body()));
        assert_eq!(d_pi(z.body()), 1.0);
        // Octahedron: triangular facets.
        let oct = crate::bodies::polar(&axis_box(&[1.0, 1.0, 1.0]).unwrap());
        assert!(!is_zonotope(&oct));
        assert_eq!(d_pi(&oct), 3f64.sqrt());
        for k in random_bodies(5, 3, Kind::Zonotope, 2) {
            assert!(is_zonotope(&k));
        }
    }

    #[test]
    fn shephard_equal_bodies() {
        let cfg = QuadConfig::default();
        let l = random_body(2, Kind::Zonotope, &mut instance_rng(4, 0));
        let leb = DensitySpec::Lebesgue;
        let r = shephard_check(&leb, &leb, &l, &l, 0.5, ShephardBound::CorQ1, &cfg).unwrap();
        assert!(r.hypothesis_margin.abs() < 1e-12);
        assert!((r.lhs - r.rhs).abs() < 1e-12 * r.rhs);
        for b in ShephardBound::ALL {
            let r = shephard_check(&leb, &leb, &l, &l, 0.5, b, &cfg).unwrap();
            assert!(r.slack >= -1e-12 * r.rhs.abs(), "{}", b.name());
        }
    }

    #[test]
    fn shephard_power_vs_lebesgue() {
        let cfg = QuadConfig::default();
        let l = random_body(2, Kind::Zonotope, &mut instance_rng(5, 0));
        let k = l.scaled(0.3);
        let mu = DensitySpec::Power { s: 1.0 };
        for b in [ShephardBound::Q1AK, ShephardBound::Q1AL] {
            let r = shephard_check(&mu, &DensitySpec::Lebesgue, &k, &l, 1.0 / 3.0, b, &cfg).unwrap();
            assert!(r.hypothesis_holds);
            assert!(r.slack >= 0.0);
        }
    }

    #[test]
    fn shephard_refusals() {
        let cfg = QuadConfig::default();
        let l = axis_box(&[1.0, 1.0]).unwrap();
        let g = shephard_check(&DensitySpec::Gaussian, &DensitySpec::Lebesgue, &l, &l, 0.5, ShephardBound::Q1AK, &cfg);
        assert!(matches!(g, Err(Error::Unsupported(_))));
        let e = shephard_check(&DensitySpec::Lebesgue, &DensitySpec::Lebesgue, &l, &l, 0.9, ShephardBound::Q1AK, &cfg)
            .unwrap_err();
        assert!(e.to_string().starts_with("concavity hypothesis unmet"));
        // α = 1.5 < n requires p = 1/α.
        let mu = DensitySpec::Power { s: -0.5 };
        assert!(shephard_check(&mu, &mu, &l, &l, 0.5, ShephardBound::CorQ1, &cfg).is_err());
        assert!(shephard_check(&mu, &mu, &l, &l, 1.0 / 1.5, ShephardBound::CorQ1, &cfg).is_ok());
        let mu1 = DensitySpec::Power { s: -1.0 };
        assert_eq!(
            shephard_check(&mu1, &mu1, &l, &l, 1.0, ShephardBound::CorQ1, &cfg).unwrap_err(),
            Error::OneHomogeneous
        );
    }

    #[test]
    fn hard_bounds_reduce_when_alpha_p_is_one() {
        let cfg = QuadConfig::default();
        let l = random_body(2, Kind::Zonotope, &mut instance_rng(6, 0));
        let k = l.scaled(0.6);
        let leb = DensitySpec::Lebesgue;
        let h2 = shephard_check(&leb, &leb, &k, &l, 0.5, ShephardBound::CorHard2, &cfg).unwrap();
        // αp = 1: 𝒵 = (ν/μ)^{1/(α−1)}·(β d_Π/α)^{α/(α−1)} = 1 for μ = ν.
        assert!((h2.constants.z.unwrap() - 1.0).abs() < 1e-12);
        let h1 = shephard_check(&leb, &leb, &k, &l, 0.5, ShephardBound::Hard1, &cfg).unwrap();
        assert!(h1.slack >= 0.0 && h2.slack >= 0.0);
    }

    #[test]
    fn stability_constant_matches_ball() {
        let cfg = QuadConfig::default();
        let opt = SolveOptions::default();
        for mu in [DensitySpec::Lebesgue, DensitySpec::Power { s: 1.0 }] {
            let c = stability_constant(&mu, 2, &cfg, &opt).unwrap();
            // Ball with r^{α−1} = 1/κ₁.
            let alpha = mu.homogeneity(2).unwrap();
            let r = (1.0 / kappa(1)).powf(1.0 / (alpha - 1.0));
            let ball = crate::measures::ball_mass(&mu, 2, r).powf(1.0 - 1.0 / alpha);
            assert!((c.c_mu - ball).abs() < 2e-3 * ball, "{} vs {}", c.c_mu, ball);
            assert_eq!(c.grid_level, 64);
        }
    }

    #[test]
    fn stability_limits() {
        let cfg = QuadConfig::default();
        let opt = SolveOptions::default();
        let leb = DensitySpec::Lebesgue;
        let l = random_body(2, Kind::Zonotope, &mut instance_rng(8, 0));
        let k = l.scaled(0.5);
        let c = stability_constant(&leb, 2, &cfg, &opt).unwrap();
        let tiny = stability_check_with(&leb, &leb, &k, &l, 1e-9, &c, &cfg).unwrap();
        let q1 = shephard_check(&leb, &leb, &k, &l, 0.5, ShephardBound::CorQ1, &cfg).unwrap();
        assert!((tiny.rhs.powf(2.0) - q1.rhs).abs() < 1e-6 * q1.rhs);
        let half = stability_check_with(&leb, &leb, &k, &l, 0.5 * tiny.hypothesis_margin, &c, &cfg).unwrap();
        assert!(half.precondition_met && half.holds);
        let big = stability_check_with(&leb, &leb, &k, &l, 2.0 * tiny.hypothesis_margin, &c, &cfg).unwrap();
        assert!(!big.precondition_met);
    }

    #[test]
    fn projective_class_symmetric_and_triangle() {
        let cfg = QuadConfig::default();
        let opt = SolveOptions { tol: 1e-10, ..Default::default() };
        let leb = DensitySpec::Lebesgue;
        let sym = random_body(2, Kind::SymPolygon, &mut instance_rng(2, 0));
        let r = projective_class_probe(&leb, &sym, &cfg, &opt).unwrap();
        assert!(r.support_gap <= 1e-8, "{}", r.support_gap);
        assert!((r.mass_nabla - r.mass_k).abs() < 1e-8 * r.mass_k);
        // Triangle: ∇K is the hexagon with the symmetrized edge measure.
        let s3 = 3f64.sqrt() / 2.0;
        let tri = wulff(2, &[[0.0, -1.0, 0.0], [s3, 0.5, 0.0], [-s3, 0.5, 0.0]], &[0.5, 0.5, 0.5]).unwrap();
        let r = projective_class_probe(&leb, &tri, &cfg, &opt).unwrap();
        assert!(r.support_gap <= 1e-6, "{}", r.support_gap);
        assert!(r.mass_nabla > r.mass_k && r.mass_ok);
        // The hexagon has six edges of half the triangle's edge length √3.
        let hex_area = 1.5 * 3f64.sqrt() * (0.5 * 3f64.sqrt()).powi(2);
        assert!((r.mass_nabla - hex_area).abs() < 1e-6);
    }
}
