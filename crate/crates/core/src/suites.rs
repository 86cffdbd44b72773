//! Seeded property suites behind `wbm verify` and the acceptance run.
//!
//! Each suite checks one stated property over a corpus drawn from
//! [`crate::corpus`] and returns one row per checked quantity. Instances run
//! in parallel; rows come back in instance order, so reports are identical
//! across runs and thread counts.

use crate::bodies::{axis_box, facet_data, fine_probe_grid, hausdorff, minkowski_comb, polar, wulff, HPolytope};
use crate::corpus::{instance_rng, random_body, Kind};
use crate::geom::{icosphere, kappa, neg, normalize, probe_grid, Vec3};
use crate::measures::{concavity_probe, mass, mc_mass, DensitySpec, FSpec, QuadConfig};
use crate::minkowski::{solve, solve_homogeneous, uniqueness_probe, ProbeMode, SolveOptions};
use crate::projection::{
    max_dominated_scale, projection_body, projective_class_probe, shephard_check, surface_area_identity,
    ShephardBound,
};
use crate::quad::{phi_cdf, phi_pdf};
use crate::surfmeas::{
    integral_identity_residual, minkowski_ineq_slack, mixed_measure, mixed_report, surface_measure,
    surface_measure_q, variational_residual, SphericalAtomMeasure, DEFAULT_EPS,
};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Inputs shared by all suites.
#[derive(Clone, Debug)]
pub struct SuiteArgs {
    pub seed: u64,
    /// Instances per configuration; each suite has its own default.
    pub count: Option<usize>,
    /// Restricts family-parametrized suites to one measure.
    pub measure: Option<DensitySpec>,
    pub cfg: QuadConfig,
}

impl Default for SuiteArgs {
    fn default() -> Self {
        SuiteArgs {
            seed: 0,
            count: None,
            measure: None,
            cfg: QuadConfig::default(),
        }
    }
}

impl SuiteArgs {
    fn n(&self, default: usize) -> usize {
        self.count.unwrap_or(default)
    }

    fn families(&self, default: &[DensitySpec]) -> Vec<DensitySpec> {
        match self.measure {
            Some(m) => vec![m],
            None => default.to_vec(),
        }
    }

    /// Stream seed for configuration `tag`, so suites sharing a seed do not
    /// share bodies.
    fn stream(&self, tag: u64) -> u64 {
        self.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(tag)
    }
}

/// One checked quantity: `value` against `limit` in the suite's direction.
#[derive(Clone, Debug, Serialize)]
pub struct Row {
    pub id: String,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Row {
    /// Passes when `value <= limit`.
    pub fn le(id: impl Into<String>, value: f64, limit: f64) -> Row {
        Row {
            id: id.into(),
            value,
            limit,
            pass: value <= limit,
            note: None,
        }
    }
    /// Passes when `value >= limit`.
    pub fn ge(id: impl Into<String>, value: f64, limit: f64) -> Row {
        Row {
            id: id.into(),
            value,
            limit,
            pass: value >= limit,
            note: None,
        }
    }
    /// A failed computation.
    pub fn error(id: impl Into<String>, e: impl std::fmt::Display) -> Row {
        Row {
            id: id.into(),
            value: f64::NAN,
            limit: f64::NAN,
            pass: false,
            note: Some(format!("error: {e}")),
        }
    }
    /// A vacuous check whose premise did not hold.
    pub fn skipped(id: impl Into<String>, why: impl Into<String>) -> Row {
        Row {
            id: id.into(),
            value: f64::NAN,
            limit: f64::NAN,
            pass: true,
            note: Some(why.into()),
        }
    }
    fn with_note(mut self, note: impl Into<String>) -> Row {
        self.note = Some(note.into());
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub property: String,
    pub pass: bool,
    pub checked: usize,
    pub failed: usize,
    pub rows: Vec<Row>,
}

pub struct Suite {
    pub name: &'static str,
    /// The property, as printed in the report header.
    pub property: &'static str,
    run: fn(&SuiteArgs) -> Vec<Row>,
}

impl Suite {
    pub fn run(&self, args: &SuiteArgs) -> SuiteReport {
        let rows = (self.run)(args);
        let failed = rows.iter().filter(|r| !r.pass).count();
        SuiteReport {
            suite: self.name.into(),
            property: self.property.into(),
            pass: failed == 0,
            checked: rows.len(),
            failed,
            rows,
        }
    }
}

pub fn find(name: &str) -> Option<&'static Suite> {
    SUITES.iter().find(|s| s.name == name)
}

pub fn names() -> Vec<&'static str> {
    SUITES.iter().map(|s| s.name).collect()
}

/// Runs every suite in table order.
pub fn run_all(args: &SuiteArgs) -> Vec<SuiteReport> {
    SUITES.iter().map(|s| s.run(args)).collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn bodies(args: &SuiteArgs, tag: u64, dim: usize, kind: Kind, n: usize) -> Vec<HPolytope> {
    let s = args.stream(tag);
    (0..n)
        .into_par_iter()
        .map(|i| random_body(dim, kind, &mut instance_rng(s, i as u64)))
        .collect()
}

fn pairs(args: &SuiteArgs, tag: u64, dim: usize, kind: Kind, n: usize) -> Vec<(HPolytope, HPolytope)> {
    let s = args.stream(tag);
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = instance_rng(s, i as u64);
            (random_body(dim, kind, &mut rng), random_body(dim, kind, &mut rng))
        })
        .collect()
}

fn kind_name(k: Kind) -> &'static str {
    match k {
        Kind::Polygon => "polygon",
        Kind::SymPolygon => "sym-polygon",
        Kind::Zonotope => "zonotope",
        Kind::Box => "box",
    }
}

/// Runs `f` over instances in parallel and flattens the rows in order.
fn over<T: Sync>(items: &[T], f: impl Fn(usize, &T) -> Vec<Row> + Sync) -> Vec<Row> {
    items
        .par_iter()
        .enumerate()
        .map(|(i, x)| f(i, x))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

const FAMILIES: [DensitySpec; 3] = [
    DensitySpec::Lebesgue,
    DensitySpec::Gaussian,
    DensitySpec::Power { s: 1.0 },
];

fn point_set_distance(a: &[Vec3], b: &[Vec3]) -> f64 {
    let one = |x: &[Vec3], y: &[Vec3]| {
        x.iter()
            .map(|p| y.iter().map(|q| crate::geom::dist(p, q)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one(a, b).max(one(b, a))
}

fn wulff_idempotence(a: &SuiteArgs) -> Vec<Row> {
    let mut rows = Vec::new();
    for dim in [2, 3] {
        for (t, kind) in [Kind::Polygon, Kind::Zonotope, Kind::Box].into_iter().enumerate() {
            let bs = bodies(a, 10 * dim as u64 + t as u64, dim, kind, a.n(10));
            rows.extend(over(&bs, |i, k| {
                let id = format!("{}d/{}/{i}", dim, kind_name(kind));
                vec![match wulff(dim, k.normals(), k.offsets()) {
                    Ok(k2) => Row::le(id, point_set_distance(k.vertices(), k2.vertices()), 1e-10),
                    Err(e) => Row::error(id, e),
                }]
            }));
        }
    }
    rows
}

fn polar_duality(a: &SuiteArgs) -> Vec<Row> {
    let mut rows = Vec::new();
    for dim in [2, 3] {
        let grid = probe_grid(dim, 2);
        for (t, kind) in [Kind::SymPolygon, Kind::Zonotope, Kind::Box].into_iter().enumerate() {
            let bs = bodies(a, 20 * dim as u64 + t as u64, dim, kind, a.n(10));
            rows.extend(over(&bs, |i, k| {
                let p = polar(k);
                let worst = grid
                    .iter()
                    .map(|t| (p.support(t) * k.radial(t) - 1.0).abs())
                    .fold(0.0, f64::max);
                vec![Row::le(format!("{}d/{}/{i}", dim, kind_name(kind)), worst, 1e-9)]
            }));
        }
    }
    rows
}

fn closure(a: &SuiteArgs) -> Vec<Row> {
    let mut rows = Vec::new();
    for dim in [2, 3] {
        for (t, kind) in [Kind::Polygon, Kind::SymPolygon, Kind::Zonotope, Kind::Box]
            .into_iter()
            .enumerate()
        {
            let ps = pairs(a, 30 * dim as u64 + t as u64, dim, kind, a.n(10));
            rows.extend(over(&ps, |i, (k, l)| {
                let id = format!("{}d/{}/{i}", dim, kind_name(kind));
                let mut out = vec![Row::le(id.clone(), k.closure_defect(), 1e-9)];
                out.push(match minkowski_comb(k, 1.0, l, 1.0) {
                    Ok(s) => Row::le(format!("{id}/sum"), s.closure_defect(), 1e-9),
                    Err(e) => Row::error(format!("{id}/sum"), e),
                });
                out
            }));
        }
    }
    rows
}

fn evenness(a: &SuiteArgs) -> Vec<Row> {
    let mut rows = Vec::new();
    for dim in [2, 3] {
        for (t, kind) in [Kind::SymPolygon, Kind::Zonotope, Kind::Box].into_iter().enumerate() {
            let bs = bodies(a, 40 * dim as u64 + t as u64, dim, kind, a.n(10));
            rows.extend(over(&bs, |i, k| {
                let s = facet_data(k);
                let worst = s
                    .dirs()
                    .iter()
                    .zip(s.weights())
                    .map(|(u, w)| (w - s.weight_at(&neg(u))).abs())
                    .fold(0.0, f64::max);
                vec![Row::le(format!("{}d/{}/{i}", dim, kind_name(kind)), worst, 1e-10)]
            }));
        }
    }
    rows
}

fn monotonicity(a: &SuiteArgs) -> Vec<Row> {
    let mut rows = Vec::new();
    for dim in [2, 3] {
        let grid = probe_grid(dim, if dim == 2 { 0 } else { 3 });
        let ps = pairs(a, 50 + dim as u64, dim, Kind::Polygon, a.n(10));
        rows.extend(over(&ps, |i, (k, l)| {
            // Shrink K until its support is dominated by L's on the grid.
            let s = grid
                .iter()
                .map(|t| l.support(t) / k.support(t))
                .fold(f64::INFINITY, f64::min);
            let inner = k.scaled(0.9 * s);
            let dominated = grid.iter().all(|t| inner.support(t) <= l.support(t));
            let id = format!("{dim}d/{i}");
            if !dominated {
                return vec![Row::error(id, "support dominance not certified")];
            }
            let worst = grid
                .iter()
                .map(|t| inner.radial(t) - l.radial(t))
                .fold(f64::NEG_INFINITY, f64::max);
            vec![Row::le(id, worst, 0.0)]
        }));
    }
    rows
}

fn power_family(a: &SuiteArgs) -> Vec<DensitySpec> {
    match a.measure {
        Some(m @ DensitySpec::Power { .. }) => vec![m],
        _ => [0.0, 1.0, 2.0].iter().map(|&s| DensitySpec::Power { s }).collect(),
    }
}

fn mass_homogeneity(a: &SuiteArgs) -> Vec<Row> {
    let mut rows = Vec::new();
    for dim in [2, 3] {
        let bs = bodies(a, 60 + dim as u64, dim, Kind::Polygon, a.n(20));
        for mu in power_family(a) {
            let alpha = mu.homogeneity(dim).expect("power is homogeneous");
            rows.extend(over(&bs, |i, k| {
                let m = mass(&mu, k, &a.cfg);
                [0.5, 2.0]
                    .iter()
                    .map(|&t| {
                        let mt = mass(&mu, &k.scaled(t), &a.cfg);
                        Row::le(format!("{dim}d/{}/t={t}/{i}", mu.name()), rel(mt, t.powf(alpha) * m), 1e-8)
                    })
                    .collect()
            }));
        }
    }
    rows
}

fn quadrature_convergence(a: &SuiteArgs) -> Vec<Row> {
    let mut rows = Vec::new();
    let mu = DensitySpec::Gaussian;
    let fine = QuadConfig {
        radial_order: 2 * a.cfg.radial_order,
        ..a.cfg
    };
    for dim in [2, 3] {
        let bs = bodies(a, 70 + dim as u64, dim, Kind::Polygon, a.n(10));
        rows.extend(over(&bs, |i, k| {
            vec![Row::le(
                format!("{dim}d/{i}"),
                rel(mass(&mu, k, &fine), mass(&mu, k, &a.cfg)),
                1e-8,
            )]
        }));
    }
    rows
}

fn mc_agreement(a: &SuiteArgs) -> Vec<Row> {
    let mut rows = Vec::new();
    for dim in [2, 3] {
        let bs = bodies(a, 80 + dim as u64, dim, Kind::Polygon, a.n(5));
        for mu in a.families(&FAMILIES) {
            rows.extend(over(&bs, |i, k| {
                let q = mass(&mu, k, &a.cfg);
                let (m, se) = mc_mass(&mu, k, a.cfg.mc_samples, a.stream(i as u64));
                vec![Row::le(format!("{dim}d/{}/{i}", mu.name()), (q - m).abs() / se, 3.0)]
            }));
        }
    }
    rows
}

fn mass_evenness(a: &SuiteArgs) -> Vec<Row> {
    let mut rows = Vec::new();
    for dim in [2, 3] {
        let bs = bodies(a, 90 + dim as u64, dim, Kind::Polygon, a.n(10));
        for mu in a.families(&FAMILIES) {
            rows.extend(over(&bs, |i, k| {
                vec![Row::le(
                    format!("{dim}d/{}/{i}", mu.name()),
                    rel(mass(&mu, &k.reflected(), &a.cfg), mass(&mu, k, &a.cfg)),
                    1e-12,
                )]
            }));
        }
    }
    rows
}

fn lambda_grid() -> Vec<f64> {
    (1..10).map(|k| k as f64 / 10.0).collect()
}

/// `(μ, F, corpus)` triples for which the weighted Minkowski inequality is
/// asserted.
fn minkowski_setups(a: &SuiteArgs, dim: usize) -> Vec<(DensitySpec, FSpec, Kind)> {
    a.families(&FAMILIES)
        .into_iter()
        .map(|mu| match mu {
            DensitySpec::Lebesgue => (mu, FSpec::Power { p: 1.0 / dim as f64 }, Kind::Polygon),
            DensitySpec::Gaussian => (mu, FSpec::Ehrhard, Kind::Polygon),
            DensitySpec::Power { .. } => (
                mu,
                FSpec::Power {
                    p: 1.0 / mu.homogeneity(dim).expect("power is homogeneous"),
                },
                Kind::SymPolygon,
            ),
        })
        .collect()
}

/// Dilates `k` by 1.25 until its Gaussian mass is at least ½.
fn gaussian_half(k: HPolytope, cfg: &QuadConfig) -> HPolytope {
    let mut k = k;
    while mass(&DensitySpec::Gaussian, &k, cfg) < 0.5 {
        k = k.scaled(1.25);
    }
    k
}

fn equality_probe(a: &SuiteArgs) -> Vec<Row> {
    let mut rows = Vec::new();
    let grid = lambda_grid();
    for dim in [2, 3] {
        for (mu, f, kind) in minkowski_setups(a, dim) {
            let bs = bodies(a, 100 + dim as u64, dim, kind, a.n(5));
            rows.extend(over(&bs, |i, k| {
                let mut rng = instance_rng(a.stream(101), i as u64);
                let t: f64 = rng.gen_range(0.6..1.6);
                let (k, l) = match mu {
                    DensitySpec::Gaussian => {
                        let k = gaussian_half(k.clone(), &a.cfg);
                        let l = k.scaled(t.max(1.0));
                        (k, l)
                    }
                    _ => (k.clone(), k.scaled(t)),
                };
                let id = format!("{dim}d/{}/{i}", mu.name());
                match concavity_probe(&mu, &f, &k, &l, &grid, 1.0, &a.cfg) {
                    Ok(r) => {
                        let at_half = r.slacks[4];
                        if at_half <= 1e-9 {
                            let worst = r.slacks.iter().map(|s| s.abs()).fold(0.0, f64::max);
                            vec![Row::le(id, worst, 1e-6)]
                        } else {
                            vec![Row::skipped(id, format!("slack at 1/2 is {at_half}"))]
                        }
                    }
                    Err(e) => vec![Row::error(id, e)],
                }
            }));
        }
    }
    rows
}

fn cross_route(a: &SuiteArgs) -> Vec<Row> {
    let mut rows = Vec::new();
    for dim in [2, 3] {
        let ps = pairs(a, 110 + dim as u64, dim, Kind::Polygon, a.n(20));
        for mu in a.families(&FAMILIES) {
            rows.extend(over(&ps, |i, (k, l)| {
                let id = format!("{dim}d/{}/{i}", mu.name());
                vec![match mixed_report(&mu, k, l, &DEFAULT_EPS, &a.cfg) {
                    Ok(r) => Row::le(id, r.relative_gap, 1e-3),
                    Err(e) => Row::error(id, e),
                }]
            }));
        }
    }
    rows
}

fn surface_homogeneity(a: &SuiteArgs) -> Vec<Row> {
    let mut rows = Vec::new();
    for dim in [2, 3] {
        let bs = bodies(a, 120 + dim as u64, dim, Kind::Polygon, a.n(10));
        for mu in power_family(a) {
            let alpha = mu.homogeneity(dim).expect("power is homogeneous");
            rows.extend(over(&bs, |i, k| {
                let mut out = Vec::new();
                for q in [1.0, 2.0] {
                    let s = surface_measure_q(&mu, k, q, &a.cfg).expect("q >= 1");
                    for t in [0.5, 2.0] {
                        let st = surface_measure_q(&mu, &k.scaled(t), q, &a.cfg).expect("q >= 1");
                        let f = t.powf(alpha - q);
                        let worst = s
                            .weights()
                            .iter()
                            .zip(st.weights())
                            .map(|(w, wt)| rel(*wt, f * w))
                            .fold(0.0, f64::max);
                        let worst = if s.len() == st.len() { worst } else { f64::INFINITY };
                        out.push(Row::le(format!("{dim}d/{}/q={q}/t={t}/{i}", mu.name()), worst, 1e-8));
                    }
                }
                out
            }));
        }
    }
    rows
}

fn equality_link(a: &SuiteArgs) -> Vec<Row> {
    let mut rows = Vec::new();
    let half = [0.5];
    for dim in [2, 3] {
        for (mu, f, kind) in minkowski_setups(a, dim) {
            let ps = pairs(a, 130 + dim as u64, dim, kind, a.n(5));
            rows.extend(over(&ps, |i, (k, l)| {
                let (k, l2) = match mu {
                    DensitySpec::Gaussian => {
                        let k = gaussian_half(k.clone(), &a.cfg);
                        let l = gaussian_half(l.clone(), &a.cfg);
                        (k, l)
                    }
                    _ => (k.clone(), l.clone()),
                };
                let mut out = Vec::new();
                // A homothetic pair (an equality case) and a generic pair.
                for (tag, other) in [("homothetic", k.scaled(1.3)), ("generic", l2)] {
                    let id = format!("{dim}d/{}/{tag}/{i}", mu.name());
                    let s = minkowski_ineq_slack(&mu, &f, &k, &other, 1.0, &a.cfg);
                    out.push(match s {
                        Ok(s) if s <= 1e-9 => match concavity_probe(&mu, &f, &k, &other, &half, 1.0, &a.cfg) {
                            Ok(c) => Row::le(id, c.min_slack.abs(), 1e-6),
                            Err(e) => Row::error(id, e),
                        },
                        Ok(s) => Row::skipped(id, format!("inequality slack {s} exceeds 1e-9")),
                        Err(e) => Row::error(id, e),
                    });
                }
                out
            }));
        }
    }
    rows
}

fn self_mixed(a: &SuiteArgs) -> Vec<Row> {
    let mut rows = Vec::new();
    let mut fams = vec![DensitySpec::Lebesgue];
    fams.extend(power_family(a));
    if let Some(m) = a.measure {
        fams = vec![m];
    }
    for dim in [2, 3] {
        let bs = bodies(a, 140 + dim as u64, dim, Kind::Polygon, a.n(10));
        for mu in &fams {
            let Some(alpha) = mu.homogeneity(dim) else { continue };
            rows.extend(over(&bs, |i, k| {
                vec![Row::le(
                    format!("{dim}d/{}/{i}", mu.name()),
                    rel(mixed_measure(mu, k, k, &a.cfg), alpha * mass(mu, k, &a.cfg)),
                    1e-8,
                )]
            }));
        }
    }
    rows
}

fn variational(a: &SuiteArgs) -> Vec<Row> {
    let mut rows = Vec::new();
    for dim in [2, 3] {
        let ps = pairs(a, 150 + dim as u64, dim, Kind::Polygon, a.n(10));
        for mu in a.families(&FAMILIES) {
            rows.extend(over(&ps, |i, (k, l)| {
                // Perturb along real facets only: at a slot whose facet is
                // degenerate, the two signs of t change the body differently,
                // which spoils the central difference.
                let k = &k.trimmed();
                let h_l: Vec<f64> = k.normals().iter().map(|u| l.support(u)).collect();
                let mut rng = instance_rng(a.stream(151), i as u64);
                let raw: Vec<f64> = k.normals().iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
                // Even: antipodal normals share a value.
                let even: Vec<f64> = (0..k.len())
                    .map(|j| match k.find_normal(&neg(&k.normals()[j])) {
                        Some(m) if m < j => raw[m],
                        _ => raw[j],
                    })
                    .collect();
                [("h_L", h_l), ("even", even)]
                    .into_iter()
                    .map(|(tag, f)| {
                        let id = format!("{dim}d/{}/{tag}/{i}", mu.name());
                        match variational_residual(&mu, k, &f, &DEFAULT_EPS, &a.cfg) {
                            Ok(r) => Row::le(id, r.relative, 1e-3),
                            Err(e) => Row::error(id, e),
                        }
                    })
                    .collect()
            }));
        }
    }
    rows
}

fn integral_identity(a: &SuiteArgs) -> Vec<Row> {
    let mut rows = Vec::new();
    for dim in [2, 3] {
        let bs = bodies(a, 150 + dim as u64, dim, Kind::Polygon, a.n(10));
        for mu in a.families(&FAMILIES) {
            rows.extend(over(&bs, |i, k| {
                let r = integral_identity_residual(&mu, k, 32, &a.cfg);
                vec![Row::le(format!("{dim}d/{}/{i}", mu.name()), r / mass(&mu, k, &a.cfg), 1e-6)]
            }));
        }
    }
    rows
}

fn minkowski_ineq(a: &SuiteArgs) -> Vec<Row> {
    let mut rows = Vec::new();
    for dim in [2, 3] {
        for (mu, f, kind) in minkowski_setups(a, dim) {
            let ps = pairs(a, 160 + dim as u64, dim, kind, a.n(100));
            rows.extend(over(&ps, |i, (k, l)| {
                let (k, l) = match mu {
                    DensitySpec::Gaussian => (gaussian_half(k.clone(), &a.cfg), gaussian_half(l.clone(), &a.cfg)),
                    _ => (k.clone(), l.clone()),
                };
                let id = format!("{dim}d/{}/{i}", mu.name());
                let mut out = vec![match minkowski_ineq_slack(&mu, &f, &k, &l, 1.0, &a.cfg) {
                    Ok(s) => Row::ge(id.clone(), s, -1e-9),
                    Err(e) => Row::error(id.clone(), e),
                }];
                out.push(match minkowski_ineq_slack(&mu, &f, &k, &k, 1.0, &a.cfg) {
                    Ok(s) => Row::le(format!("{id}/K=L"), s.abs(), 1e-9),
                    Err(e) => Row::error(format!("{id}/K=L"), e),
                });
                out
            }));
        }
    }
    rows
}

fn tight_opt() -> SolveOptions {
    SolveOptions {
        tol: 1e-9,
        ..Default::default()
    }
}

fn box_recovery(a: &SuiteArgs) -> Vec<Row> {
    let mut rows = Vec::new();
    for dim in [2, 3] {
        let bs = bodies(a, 170 + dim as u64, dim, Kind::Box, a.n(10));
        rows.extend(over(&bs, |i, b| {
            let id = format!("{dim}d/{i}");
            match solve_homogeneous(&DensitySpec::Lebesgue, &facet_data(b), 1.0, &a.cfg, &tight_opt()) {
                Ok(r) => vec![
                    Row::le(format!("{id}/hausdorff"), hausdorff(&r.body, b), 1e-5),
                    Row::le(format!("{id}/residual_rel"), r.residual_rel, 1e-6),
                ],
                Err(e) => vec![Row::error(id, e)],
            }
        }));
    }
    rows
}

/// Atoms `(±e_i, w)`.
pub fn box_target(dim: usize, w: f64) -> SphericalAtomMeasure {
    let mut d = Vec::new();
    for i in 0..dim {
        let mut e = [0.0; 3];
        e[i] = 1.0;
        d.push(e);
        d.push(neg(&e));
    }
    SphericalAtomMeasure::new(dim, d, vec![w; 2 * dim]).expect("axis atoms")
}

/// Gaussian cube `[−a,a]ⁿ`: facet mass `φ(a)(2Φ(a)−1)^{n−1}` and mass
/// `(2Φ(a)−1)ⁿ`. Returns the half-width solving `γ(Q)^{β/n−1}·facet = w`,
/// found by bisection (the left side decreases in `a`).
pub fn gaussian_cube_oracle(dim: usize, beta: f64, w: f64) -> (f64, f64) {
    let n = dim as f64;
    let facet = |a: f64| phi_pdf(a) * (2.0 * phi_cdf(a) - 1.0).powi(dim as i32 - 1);
    let g = |a: f64| (2.0 * phi_cdf(a) - 1.0).powf(n * (beta / n - 1.0)) * facet(a) - w;
    let (mut lo, mut hi) = (1e-6, 40.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let a = 0.5 * (lo + hi);
    (a, facet(a))
}

fn gaussian_existence(a: &SuiteArgs) -> Vec<Row> {
    let mut rows = Vec::new();
    let beta = 0.5;
    let mu = DensitySpec::Gaussian;
    for dim in [2usize, 3] {
        let n = a.n(5);
        let ws: Vec<f64> = (0..n)
            .map(|i| instance_rng(a.stream(180 + dim as u64), i as u64).gen_range(0.05..0.3))
            .collect();
        rows.extend(over(&ws, |i, &w| {
            let id = format!("{dim}d/{i}");
            let nu = box_target(dim, w);
            match solve(&mu, beta, &nu, &a.cfg, &tight_opt()) {
                Ok(r) => {
                    let (_, facet) = gaussian_cube_oracle(dim, beta, w);
                    let fm = surface_measure(&mu, &r.body, &a.cfg);
                    let worst = fm.weights().iter().map(|x| (x - facet).abs()).fold(0.0, f64::max);
                    let m = mass(&mu, &r.body, &a.cfg);
                    vec![
                        Row::le(format!("{id}/residual_rel"), r.residual_rel, 1e-6),
                        Row::le(format!("{id}/facet_mass"), worst, 1e-5),
                        Row::le(format!("{id}/c"), (r.c - m.powf(beta / dim as f64 - 1.0)).abs(), 1e-10),
                    ]
                }
                Err(e) => vec![Row::error(id, e)],
            }
        }));
    }
    rows
}

/// Even targets for solver-contract suites: surface measures of symmetric
/// bodies, for Lebesgue, Gaussian (`β = ½`) and power `s = 1` (homogeneous).
fn solver_runs(a: &SuiteArgs, tag: u64) -> Vec<(String, std::result::Result<crate::minkowski::SolveReport, String>, SphericalAtomMeasure, DensitySpec)> {
    let mut jobs = Vec::new();
    for dim in [2, 3] {
        let bs = bodies(a, tag + dim as u64, dim, Kind::SymPolygon, a.n(3));
        for mu in a.families(&FAMILIES) {
            for (i, k) in bs.iter().enumerate() {
                jobs.push((format!("{dim}d/{}/{i}", mu.name()), mu, k.clone()));
            }
        }
    }
    jobs.into_par_iter()
        .map(|(id, mu, k)| {
            let nu = surface_measure(&mu, &k, &a.cfg);
            let r = match mu {
                DensitySpec::Gaussian => solve(&mu, 0.5, &nu, &a.cfg, &SolveOptions::default()),
                _ => solve_homogeneous(&mu, &nu, 1.0, &a.cfg, &SolveOptions::default()),
            };
            (id, r.map_err(|e| e.to_string()), nu, mu)
        })
        .collect()
}

fn solver_ascent(a: &SuiteArgs) -> Vec<Row> {
    solver_runs(a, 190)
        .into_iter()
        .map(|(id, r, _, _)| match r {
            Ok(r) => {
                let worst = r
                    .functional_trace
                    .windows(2)
                    .map(|w| (w[0] - w[1]) / w[0].abs().max(1e-300))
                    .fold(0.0, f64::max);
                Row::le(id, worst, 1e-13).with_note(format!("{} iterations", r.iterations))
            }
            Err(e) => Row::error(id, e),
        })
        .collect()
}

fn stationarity(a: &SuiteArgs) -> Vec<Row> {
    let tol = SolveOptions::default().tol;
    solver_runs(a, 200)
        .into_iter()
        .flat_map(|(id, r, _, _)| match r {
            Ok(r) => vec![
                Row::le(format!("{id}/residual_rel"), r.residual_rel, tol),
                Row::ge(format!("{id}/converged"), r.converged as u8 as f64, 1.0),
            ],
            Err(e) => vec![Row::error(id, e)],
        })
        .collect()
}

fn containment(a: &SuiteArgs) -> Vec<Row> {
    solver_runs(a, 210)
        .into_iter()
        .map(|(id, r, _, _)| match r {
            Ok(r) => {
                let reach = r.body.circumradius() / r.ceiling;
                let mut row = Row::le(id, reach, 1.0);
                if r.ceiling_binding {
                    row.pass = false;
                    row.note = Some("ceiling binds at convergence".into());
                }
                row
            }
            Err(e) => Row::error(id, e),
        })
        .collect()
}

fn homogeneous_consistency(a: &SuiteArgs) -> Vec<Row> {
    let tol = SolveOptions::default().tol;
    solver_runs(a, 220)
        .into_iter()
        .filter(|(_, _, _, mu)| mu.homogeneity(2).is_some())
        .map(|(id, r, nu, mu)| match r {
            Ok(r) => {
                let s = surface_measure(&mu, &r.body, &a.cfg);
                let worst = nu
                    .dirs()
                    .iter()
                    .zip(nu.weights())
                    .map(|(u, w)| (s.weight_at(u) - w).abs())
                    .fold(0.0, f64::max);
                Row::le(id, worst / nu.max_weight(), tol)
            }
            Err(e) => Row::error(id, e),
        })
        .collect()
}

fn scale_equivariance(a: &SuiteArgs) -> Vec<Row> {
    let mut rows = Vec::new();
    let opt = SolveOptions {
        tol: 1e-10,
        ..Default::default()
    };
    let leb = DensitySpec::Lebesgue;
    for dim in [2, 3] {
        let bs = bodies(a, 230 + dim as u64, dim, Kind::SymPolygon, a.n(3));
        rows.extend(over(&bs, |i, k| {
            let t: f64 = instance_rng(a.stream(231), i as u64).gen_range(0.5..2.0);
            let nu = facet_data(k);
            let id = format!("{dim}d/{i}");
            let r1 = solve_homogeneous(&leb, &nu, 1.0, &a.cfg, &opt);
            let r2 = solve_homogeneous(&leb, &nu.scaled(t.powi(dim as i32 - 1)), 1.0, &a.cfg, &opt);
            vec![match (r1, r2) {
                (Ok(r1), Ok(r2)) => {
                    let want = r1.body.scaled(t);
                    Row::le(id, hausdorff(&r2.body, &want) / want.circumradius(), 1e-6)
                }
                (Err(e), _) | (_, Err(e)) => Row::error(id, e),
            }]
        }));
    }
    rows
}

fn uniqueness(a: &SuiteArgs) -> Vec<Row> {
    let mut jobs: Vec<(String, DensitySpec, ProbeMode, SphericalAtomMeasure)> = Vec::new();
    let n = a.n(3);
    let fams = a.families(&[DensitySpec::Lebesgue, DensitySpec::Gaussian]);
    for dim in [2, 3] {
        let bs = bodies(a, 240 + dim as u64, dim, Kind::SymPolygon, n);
        for (i, k) in bs.into_iter().enumerate() {
            for mu in &fams {
                match mu {
                    DensitySpec::Gaussian => {
                        // K itself solves the target, and has mass ≥ ½.
                        let k = gaussian_half(k.clone(), &a.cfg);
                        let m = mass(mu, &k, &a.cfg);
                        let nu = surface_measure(mu, &k, &a.cfg).scaled(m.powf(0.5 / dim as f64 - 1.0));
                        jobs.push((format!("{dim}d/gaussian/{i}"), *mu, ProbeMode::Solve { beta: 0.5, q: 1.0 }, nu));
                    }
                    DensitySpec::Lebesgue => {
                        let nu = facet_data(&k);
                        jobs.push((format!("{dim}d/lebesgue/{i}"), *mu, ProbeMode::Homogeneous { q: 1.0 }, nu.clone()));
                        jobs.push((format!("{dim}d/lebesgue/q=2/{i}"), *mu, ProbeMode::Solve { beta: 0.5, q: 2.0 }, nu));
                    }
                    DensitySpec::Power { .. } => {
                        let nu = surface_measure(mu, &k, &a.cfg);
                        jobs.push((format!("{dim}d/{}/{i}", mu.name()), *mu, ProbeMode::Homogeneous { q: 1.0 }, nu));
                    }
                }
            }
        }
    }
    let seed = a.stream(241);
    jobs.into_par_iter()
        .map(|(id, mu, mode, nu)| match uniqueness_probe(&mu, &nu, mode, 5, seed, &a.cfg, &tight_opt()) {
            Ok(u) => {
                let mut row = Row::le(id.clone(), u.max_pairwise_hausdorff, 1e-4);
                if !u.all_ok {
                    row.pass = false;
                    row.note = Some("a restart did not converge".into());
                }
                if mu == DensitySpec::Gaussian {
                    let low = u
                        .reports
                        .iter()
                        .filter_map(|r| r.as_ref().ok())
                        .map(|r| mass(&mu, &r.body, &a.cfg))
                        .fold(f64::INFINITY, f64::min);
                    if low < 0.5 {
                        return Row::skipped(id, format!("solution mass {low} below 1/2"));
                    }
                }
                row
            }
            Err(e) => Row::error(id, e),
        })
        .collect()
}

fn random_directions(dim: usize, n: usize, seed: u64) -> Vec<Vec3> {
    let mut rng = instance_rng(seed, 0);
    (0..n)
        .map(|_| loop {
            let mut v = [0.0; 3];
            for c in v.iter_mut().take(dim) {
                *c = rng.gen_range(-1.0..1.0);
            }
            let r = crate::geom::norm(&v);
            if r > 0.1 && r <= 1.0 {
                break normalize(&v);
            }
        })
        .collect()
}

fn zonotope_realization(a: &SuiteArgs) -> Vec<Row> {
    let mut rows = Vec::new();
    for dim in [2, 3] {
        let bs = bodies(a, 250 + dim as u64, dim, Kind::Polygon, a.n(5));
        let dirs = random_directions(dim, 1000, a.stream(251));
        for mu in a.families(&FAMILIES) {
            rows.extend(over(&bs, |i, k| {
                let id = format!("{dim}d/{}/{i}", mu.name());
                let pb = projection_body(&mu, k, &a.cfg);
                let s = surface_measure(&mu, k, &a.cfg);
                match pb.zonotope() {
                    Ok(z) => {
                        let worst = dirs
                            .iter()
                            .map(|t| (z.body().support(t) - 0.5 * s.cosine_transform(t)).abs())
                            .fold(0.0, f64::max);
                        vec![Row::le(id, worst, 1e-10)]
                    }
                    Err(e) => vec![Row::error(id, e)],
                }
            }));
        }
    }
    rows
}

fn linear_image(a: &SuiteArgs) -> Vec<Row> {
    let mut rows = Vec::new();
    let leb = DensitySpec::Lebesgue;
    for dim in [2, 3] {
        let grid = probe_grid(dim, 2);
        let bs = bodies(a, 260 + dim as u64, dim, Kind::Polygon, a.n(10));
        rows.extend(over(&bs, |i, k| {
            let pk = projection_body(&leb, k, &a.cfg);
            [0.5, 2.0]
                .iter()
                .map(|&t| {
                    let pt = projection_body(&leb, &k.scaled(t), &a.cfg);
                    let f = t.powi(dim as i32 - 1);
                    let worst = grid
                        .iter()
                        .map(|th| rel(pt.support(th), f * pk.support(th)))
                        .fold(0.0, f64::max);
                    Row::le(format!("{dim}d/t={t}/{i}"), worst, 1e-9)
                })
                .collect()
        }));
    }
    rows
}

/// Two even measures on one atom set whose cosine transforms agree on
/// `4·(atom count)` generic directions: the weights are recovered from the
/// transform values by least squares and compared.
fn funk_hecke(a: &SuiteArgs) -> Vec<Row> {
    let mut rows = Vec::new();
    for dim in [2, 3] {
        // One representative per antipodal pair.
        let reps: Vec<Vec3> = if dim == 2 {
            crate::geom::circle_grid(16, 0.0).into_iter().take(8).collect()
        } else {
            icosphere(1)
                .0
                .into_iter()
                .filter(|u| u[2] > 1e-12 || (u[2].abs() <= 1e-12 && (u[1] > 1e-12 || (u[1].abs() <= 1e-12 && u[0] > 0.0))))
                .collect()
        };
        let m = reps.len();
        let dirs = random_directions(dim, 4 * 2 * m, a.stream(270 + dim as u64));
        // Column j: |⟨θ, u_j⟩| + |⟨θ, −u_j⟩|.
        let mat = nalgebra::DMatrix::from_fn(dirs.len(), m, |r, c| 2.0 * crate::geom::dot(&dirs[r], &reps[c]).abs());
        let svd = mat.clone().svd(true, true);
        let sv = &svd.singular_values;
        let cond = sv.max() / sv.min();
        let n = a.n(10);
        let ws: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let mut rng = instance_rng(a.stream(271 + dim as u64), i as u64);
                (0..m).map(|_| rng.gen_range(0.1..2.0)).collect()
            })
            .collect();
        rows.extend(over(&ws, |i, w| {
            let id = format!("{dim}d/{i}");
            if !(cond < 1e8) {
                return vec![Row::error(id, format!("ill-conditioned probe system (condition {cond:e})"))];
            }
            let mut atoms_d = Vec::new();
            let mut atoms_w = Vec::new();
            for (u, x) in reps.iter().zip(w) {
                atoms_d.push(*u);
                atoms_d.push(neg(u));
                atoms_w.push(*x);
                atoms_w.push(*x);
            }
            let mu1 = SphericalAtomMeasure::new(dim, atoms_d, atoms_w).expect("distinct atoms");
            let b = nalgebra::DVector::from_iterator(dirs.len(), dirs.iter().map(|t| mu1.cosine_transform(t)));
            let rec = svd.solve(&b, 1e-14).expect("svd has both factors");
            let worst = rec.iter().zip(w).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            vec![Row::le(id, worst, 1e-8).with_note(format!("condition {cond:.3e}"))]
        }));
    }
    rows
}

fn shephard_monotone(a: &SuiteArgs) -> Vec<Row> {
    let mut rows = Vec::new();
    let leb = DensitySpec::Lebesgue;
    let cs: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).collect();
    for dim in [2, 3] {
        let p = 1.0 / dim as f64;
        let ls = bodies(a, 280 + dim as u64, dim, Kind::Zonotope, a.n(5));
        rows.extend(over(&ls, |i, l| {
            let id = format!("{dim}d/{i}");
            let mut margin = f64::INFINITY;
            let mut slacks = Vec::new();
            for &c in &cs {
                let k = l.scaled(c);
                for b in ShephardBound::ALL {
                    match shephard_check(&leb, &leb, &k, l, p, b, &a.cfg) {
                        Ok(r) => {
                            margin = margin.min(r.hypothesis_margin / l.volume());
                            if b == ShephardBound::CorQ1 {
                                slacks.push(r.slack / r.rhs);
                            }
                        }
                        Err(e) => return vec![Row::error(format!("{id}/{}", b.name()), e)],
                    }
                }
            }
            let rise = slacks.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
            vec![
                Row::ge(format!("{id}/margin"), margin, -1e-12),
                Row::le(format!("{id}/slack_increase"), rise, 1e-12),
                Row::le(format!("{id}/slack_at_1"), slacks.last().copied().unwrap_or(f64::NAN).abs(), 1e-9),
            ]
        }));
    }
    rows
}

/// Scale `t` of `k` putting `Π_μ(tK)` at fraction `frac` of the largest
/// scale dominated by `Π_ν L`, for an `α`-homogeneous `μ`.
/// Dilation of `K` putting `h_{Π_μ tK}` at `frac` of the largest factor still
/// dominated by `h_{Π_νL}`.
pub fn dominated_scale(
    mu: &DensitySpec,
    nu: &DensitySpec,
    k: &HPolytope,
    l: &HPolytope,
    frac: f64,
    cfg: &QuadConfig,
) -> f64 {
    let alpha = mu.homogeneity(k.dim()).expect("homogeneous");
    let s = max_dominated_scale(&projection_body(mu, k, cfg), &projection_body(nu, l, cfg));
    (frac * s).powf(1.0 / (alpha - 1.0))
}

fn shephard_planar(a: &SuiteArgs) -> Vec<Row> {
    let leb = DensitySpec::Lebesgue;
    let ps: Vec<(HPolytope, HPolytope, f64)> = (0..a.n(50))
        .into_par_iter()
        .map(|i| {
            let mut rng = instance_rng(a.stream(290), i as u64);
            let kind = if rng.gen_bool(0.5) { Kind::SymPolygon } else { Kind::Zonotope };
            let k = random_body(2, kind, &mut rng);
            let l = random_body(2, Kind::Zonotope, &mut rng);
            (k, l, rng.gen_range(0.5..1.0))
        })
        .collect();
    over(&ps, |i, (k, l, frac)| {
        let id = format!("2d/{i}");
        let k = k.scaled(dominated_scale(&leb, &leb, k, l, *frac, &a.cfg));
        match shephard_check(&leb, &leb, &k, l, 0.5, ShephardBound::CorQ1, &a.cfg) {
            Ok(r) if r.hypothesis_holds => {
                if r.d_pi_used != 1.0 {
                    return vec![Row::error(id, "planar symmetric body not given d_pi = 1")];
                }
                vec![Row::ge(id, (l.volume() - k.volume()) / l.volume(), -1e-12)]
            }
            Ok(r) => vec![Row::skipped(id, format!("hypothesis margin {}", r.hypothesis_margin))],
            Err(e) => vec![Row::error(id, e)],
        }
    })
}

fn keith(a: &SuiteArgs) -> Vec<Row> {
    let leb = DensitySpec::Lebesgue;
    let factor = 3f64.powf(0.25) * 3f64.sqrt();
    let ps: Vec<(HPolytope, HPolytope, f64)> = (0..a.n(50))
        .into_par_iter()
        .map(|i| {
            let mut rng = instance_rng(a.stream(300), i as u64);
            let k = random_body(3, Kind::SymPolygon, &mut rng);
            let lk = if rng.gen_bool(0.5) { Kind::SymPolygon } else { Kind::Zonotope };
            let l = random_body(3, lk, &mut rng);
            (k, l, rng.gen_range(0.5..1.0))
        })
        .collect();
    over(&ps, |i, (k, l, frac)| {
        let id = format!("3d/{i}");
        let k = k.scaled(dominated_scale(&leb, &leb, k, l, *frac, &a.cfg));
        match shephard_check(&leb, &leb, &k, l, 1.0 / 3.0, ShephardBound::CorQ1, &a.cfg) {
            Ok(r) if r.hypothesis_holds => {
                let bound = factor * l.volume();
                vec![Row::ge(id, (bound - k.volume()) / bound, 0.0)
                    .with_note(format!("d_pi {}", r.d_pi_used))]
            }
            Ok(r) => vec![Row::skipped(id, format!("hypothesis margin {}", r.hypothesis_margin))],
            Err(e) => vec![Row::error(id, e)],
        }
    })
}

fn shephard_mixed(a: &SuiteArgs) -> Vec<Row> {
    let mu = DensitySpec::Power { s: 1.0 };
    let nu = DensitySpec::Lebesgue;
    let mut rows = Vec::new();
    for dim in [2usize, 3] {
        let p = 1.0 / (dim as f64 + 1.0);
        let ps: Vec<(HPolytope, HPolytope, f64)> = (0..a.n(50))
            .into_par_iter()
            .map(|i| {
                let mut rng = instance_rng(a.stream(310 + dim as u64), i as u64);
                let k = random_body(dim, Kind::SymPolygon, &mut rng);
                let l = random_body(dim, Kind::Zonotope, &mut rng);
                (k, l, rng.gen_range(0.5..1.0))
            })
            .collect();
        rows.extend(over(&ps, |i, (k, l, frac)| {
            let k = k.scaled(dominated_scale(&mu, &nu, k, l, *frac, &a.cfg));
            [ShephardBound::Q1AK, ShephardBound::Q1AL]
                .iter()
                .map(|&b| {
                    let id = format!("{dim}d/{}/{i}", b.name());
                    match shephard_check(&mu, &nu, &k, l, p, b, &a.cfg) {
                        Ok(r) if r.hypothesis_holds => Row::ge(id, r.slack / r.rhs, 0.0),
                        Ok(r) => Row::skipped(id, format!("hypothesis margin {}", r.hypothesis_margin)),
                        Err(e) => Row::error(id, e),
                    }
                })
                .collect()
        }));
    }
    rows
}

fn surface_area_identity_suite(a: &SuiteArgs) -> Vec<Row> {
    let mut rows = Vec::new();
    for dim in [2, 3] {
        let bs = bodies(a, 150 + dim as u64, dim, Kind::Polygon, a.n(10));
        for mu in a.families(&FAMILIES) {
            rows.extend(over(&bs, |i, k| {
                let r = surface_area_identity(&mu, k, &a.cfg);
                vec![Row::le(format!("{dim}d/{}/{i}", mu.name()), r.residual, 1e-5)
                    .with_note(format!("grid rule residual {:.3e}", r.grid_residual))]
            }));
        }
    }
    rows
}

fn blaschke_projection(a: &SuiteArgs) -> Vec<Row> {
    let opt = SolveOptions {
        tol: 1e-10,
        ..Default::default()
    };
    let mut rows = Vec::new();
    let bs = bodies(a, 320, 2, Kind::Polygon, a.n(10));
    let fams: Vec<DensitySpec> = a
        .families(&[DensitySpec::Lebesgue, DensitySpec::Power { s: 1.0 }])
        .into_iter()
        .filter(|m| m.homogeneity(2).is_some())
        .collect();
    for mu in fams {
        rows.extend(over(&bs, |i, k| {
            let id = format!("2d/{}/{i}", mu.name());
            match projective_class_probe(&mu, k, &a.cfg, &opt) {
                Ok(r) => {
                    let pk = projection_body(&mu, k, &a.cfg);
                    let scale = fine_probe_grid(2).iter().map(|t| pk.support(t)).fold(0.0, f64::max);
                    let gap = Row::le(format!("{id}/support_gap"), r.support_gap / scale, 1e-6);
                    let ratio = r.mass_nabla / r.mass_k;
                    // The mass comparison needs p-concavity of mu on K, which
                    // |x|^s lacks for asymmetric bodies.
                    let mass = if mu == DensitySpec::Lebesgue || k.is_symmetric(1e-9) {
                        Row::ge(format!("{id}/mass_ratio"), ratio, 1.0 - 1e-9)
                    } else {
                        Row::skipped(format!("{id}/mass_ratio"), format!("no concavity for asymmetric K; ratio {ratio}"))
                    };
                    vec![gap, mass]
                }
                Err(e) => vec![Row::error(id, e)],
            }
        }));
    }
    rows
}

/// Cube of side 2 and its shadow: a self-contained exact check.
fn cube_projection(_a: &SuiteArgs) -> Vec<Row> {
    let cube = axis_box(&[1.0, 1.0, 1.0]).expect("unit half-widths");
    let pb = projection_body(&DensitySpec::Lebesgue, &cube, &QuadConfig::default());
    let mut rows = Vec::new();
    for (i, e) in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]].iter().enumerate() {
        rows.push(Row::le(format!("e{}", i + 1), (pb.support(e) - 4.0).abs(), 0.0));
    }
    let s = 1.0 / 3f64.sqrt();
    rows.push(Row::le("diagonal", (pb.support(&[s, s, s]) - 4.0 * 3f64.sqrt()).abs(), 1e-12));
    // h_{ΠK} integrates to κ_{n−1}·(surface area).
    rows.push(Row::le("sphere_integral", (pb.sphere_integral() - kappa(2) * 24.0).abs(), 1e-12));
    rows
}

pub static SUITES: &[Suite] = &[
    Suite {
        name: "wulff-idempotence",
        property: "the Wulff shape of a body's reduced offsets has the same vertex set (within 1e-10)",
        run: wulff_idempotence,
    },
    Suite {
        name: "polar-duality",
        property: "for symmetric K, h(polar K, t) * radial(K, t) = 1 within 1e-9",
        run: polar_duality,
    },
    Suite {
        name: "closure",
        property: "sum of facet_area_i * u_i vanishes within 1e-9 for constructed bodies and sums",
        run: closure,
    },
    Suite {
        name: "evenness",
        property: "facet data of a symmetric body is even (antipodal weights equal within 1e-10)",
        run: evenness,
    },
    Suite {
        name: "monotonicity",
        property: "support dominance A <= B on the probe grid implies radial(A) <= radial(B) there",
        run: monotonicity,
    },
    Suite {
        name: "mass-homogeneity",
        property: "power density |x|^s: mass(tK) = t^(n+s) mass(K) within 1e-8 relative",
        run: mass_homogeneity,
    },
    Suite {
        name: "quadrature-convergence",
        property: "gaussian mass changes by < 1e-8 relative when radial_order doubles",
        run: quadrature_convergence,
    },
    Suite {
        name: "mc-agreement",
        property: "quadrature mass and hit-or-miss Monte Carlo agree within 3 standard errors",
        run: mc_agreement,
    },
    Suite {
        name: "mass-evenness",
        property: "mass(K) = mass(-K) within 1e-12 relative",
        run: mass_evenness,
    },
    Suite {
        name: "equality-probe",
        property: "concavity slack <= 1e-9 at lambda = 1/2 implies |slack| <= 1e-6 on the whole lambda grid",
        run: equality_probe,
    },
    Suite {
        name: "cross-route",
        property: "mixed measure from S^mu_K and from finite differences of mu(K + eL) agree within 1e-3 relative",
        run: cross_route,
    },
    Suite {
        name: "surface-homogeneity",
        property: "power density: S^mu_{tK,q} = t^(alpha-q) S^mu_{K,q} atomwise within 1e-8 relative (q = 1, 2)",
        run: surface_homogeneity,
    },
    Suite {
        name: "equality-link",
        property: "Minkowski inequality slack <= 1e-9 implies concavity slack at lambda = 1/2 within 1e-6",
        run: equality_link,
    },
    Suite {
        name: "self-mixed",
        property: "alpha-homogeneous mu: mu(K,K) = alpha mu(K) within 1e-8 relative",
        run: self_mixed,
    },
    Suite {
        name: "variational",
        property: "d/dt mu([h_K + t f]) at 0 equals sum f(u_i) S^mu_K(u_i) within 1e-3 relative",
        run: variational,
    },
    Suite {
        name: "integral-identity",
        property: "mu(K) = integral over t in [0,1] of mu(tK, K), within 1e-6 relative",
        run: integral_identity,
    },
    Suite {
        name: "minkowski-ineq",
        property: "mu(K,L) - mu(K,K) >= (F(mu L) - F(mu K)) / F'(mu K) up to 1e-9, with equality for K = L",
        run: minkowski_ineq,
    },
    Suite {
        name: "box-recovery",
        property: "the homogeneous Lebesgue solve of a box's surface measure returns the box (Hausdorff 1e-5, residual 1e-6)",
        run: box_recovery,
    },
    Suite {
        name: "gaussian-existence",
        property: "gaussian solve with beta = 1/2 converges on axis targets and matches the one-dimensional cube oracle",
        run: gaussian_existence,
    },
    Suite {
        name: "solver-ascent",
        property: "the solver functional is nondecreasing along accepted iterates",
        run: solver_ascent,
    },
    Suite {
        name: "stationarity",
        property: "at convergence max |c S^mu_K(u_i) - nu(u_i)| <= tol * max nu",
        run: stationarity,
    },
    Suite {
        name: "containment",
        property: "solutions stay inside the containment ball and the ceiling never binds at convergence",
        run: containment,
    },
    Suite {
        name: "homogeneous-consistency",
        property: "homogeneous solves satisfy S^mu_K = nu atomwise within tol",
        run: homogeneous_consistency,
    },
    Suite {
        name: "scale-equivariance",
        property: "Lebesgue: scaling nu by t^(n-1) scales the solution by t within 1e-6 relative",
        run: scale_equivariance,
    },
    Suite {
        name: "uniqueness",
        property: "5 seeded restarts reach solutions within Hausdorff distance 1e-4 of each other",
        run: uniqueness,
    },
    Suite {
        name: "zonotope-realization",
        property: "the realized projection zonotope has support 1/2 cosine transform of S^mu_K within 1e-10",
        run: zonotope_realization,
    },
    Suite {
        name: "linear-image",
        property: "Lebesgue: Pi(tK) = t^(n-1) Pi K within 1e-9 relative",
        run: linear_image,
    },
    Suite {
        name: "funk-hecke",
        property: "even atom measures with equal cosine transforms on 4x the atom count of generic directions have equal weights within 1e-8",
        run: funk_hecke,
    },
    Suite {
        name: "shephard-monotone",
        property: "K = cL: the projection hypothesis holds and the cor_q1 slack decreases to 0 as c -> 1",
        run: shephard_monotone,
    },
    Suite {
        name: "shephard-planar",
        property: "n = 2, Lebesgue, L a zonotope: Pi K inside Pi L implies Vol K <= Vol L",
        run: shephard_planar,
    },
    Suite {
        name: "keith",
        property: "n = 3, Lebesgue: Pi K inside Pi L implies Vol K <= 3^(1/4) sqrt(3) Vol L",
        run: keith,
    },
    Suite {
        name: "shephard-mixed",
        property: "mu = |x| density, nu = Lebesgue: the A_K and A_L volume bounds hold under the projection hypothesis",
        run: shephard_mixed,
    },
    Suite {
        name: "surface-area-identity",
        property: "mu+(dK) = (1/kappa_(n-1)) * integral of h(Pi_mu K) over the sphere, within 1e-5",
        run: surface_area_identity_suite,
    },
    Suite {
        name: "cube-projection",
        property: "the side-2 cube has h(Pi K, e_i) = 4",
        run: cube_projection,
    },
    Suite {
        name: "blaschke-projection",
        property: "Pi_mu of the Blaschke body equals Pi_mu K within 1e-6 on the probe grid",
        run: blaschke_projection,
    },
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        let mut n = names();
        n.sort_unstable();
        let len = n.len();
        n.dedup();
        assert_eq!(n.len(), len);
    }

    #[test]
    fn cube_oracle() {
        // A cube with half-width a solves its own target.
        let (a, facet) = gaussian_cube_oracle(2, 0.5, 0.1);
        let m = (2.0 * phi_cdf(a) - 1.0).powi(2);
        assert!((m.powf(0.25 - 1.0) * facet - 0.1).abs() < 1e-12);
    }

    #[test]
    fn small_suites_pass() {
        let args = SuiteArgs {
            count: Some(2),
            ..Default::default()
        };
        for name in ["closure", "evenness", "cube-projection", "funk-hecke", "self-mixed"] {
            let r = find(name).unwrap().run(&args);
            assert!(r.pass, "{name}: {:?}", r.rows.iter().filter(|x| !x.pass).collect::<Vec<_>>());
        }
    }
}
