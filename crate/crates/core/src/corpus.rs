//! Seeded random bodies for property sweeps.
//!
//! Instance `i` of a sweep draws from its own ChaCha stream, so corpora are
//! reproducible and independent of evaluation order.

use crate::bodies::{axis_box, wulff, zonotope, HPolytope};
use crate::geom::{circle_grid, cross, dot, norm, normalize, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    /// Wulff shape of random support values on the fixed direction set.
    Polygon,
    /// As `Polygon` with antipodal values tied.
    SymPolygon,
    Zonotope,
    Box,
}

impl std::str::FromStr for Kind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "polygon" => Ok(Kind::Polygon),
            "sym-polygon" => Ok(Kind::SymPolygon),
            "zonotope" => Ok(Kind::Zonotope),
            "box" => Ok(Kind::Box),
            _ => Err(format!("unknown body kind '{s}' (polygon, sym-polygon, zonotope, box)")),
        }
    }
}

/// Independent generator for instance `index` of a run seeded with `seed`.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// 16 even directions in 2D; 26 in 3D (axes, face diagonals, body diagonals).
pub fn fixed_directions(dim: usize) -> Vec<Vec3> {
    if dim == 2 {
        return circle_grid(16, 0.0);
    }
    let s3 = 1.0 / 3f64.sqrt();
    let mut d = Vec::new();
    for i in 0..3 {
        for sgn in [1.0, -1.0] {
            let mut e = [0.0; 3];
            e[i] = sgn;
            d.push(e);
        }
    }
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        for (a, b) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)] {
            let mut e = [0.0; 3];
            e[i] = a * FRAC_1_SQRT_2;
            e[j] = b * FRAC_1_SQRT_2;
            d.push(e);
        }
    }
    for a in [1.0, -1.0] {
        for b in [1.0, -1.0] {
            for c in [1.0, -1.0] {
                d.push([a * s3, b * s3, c * s3]);
            }
        }
    }
    d
}

/// Minimum offset of generated polygons.
pub const MIN_OFFSET: f64 = 0.5;
pub const MAX_OFFSET: f64 = 2.0;

fn polygon(dim: usize, rng: &mut ChaCha8Rng, symmetric: bool) -> HPolytope {
    let dirs = fixed_directions(dim);
    let mut vals: Vec<f64> = dirs.iter().map(|_| rng.gen_range(MIN_OFFSET..MAX_OFFSET)).collect();
    if symmetric {
        for i in 0..dirs.len() {
            let j = dirs
                .iter()
                .position(|d| crate::geom::dist(d, &crate::geom::neg(&dirs[i])) < 1e-12)
                .expect("fixed directions are even");
            if j < i {
                vals[i] = vals[j];
            }
        }
    }
    wulff(dim, &dirs, &vals).expect("values bounded below give a body")
}

fn random_unit(dim: usize, rng: &mut ChaCha8Rng) -> Vec3 {
    loop {
        let mut v = [0.0; 3];
        for c in v.iter_mut().take(dim) {
            *c = rng.gen_range(-1.0..1.0);
        }
        let n = norm(&v);
        if n > 0.1 && n <= 1.0 {
            return normalize(&v);
        }
    }
}

fn random_zonotope(dim: usize, rng: &mut ChaCha8Rng) -> HPolytope {
    loop {
        let k = rng.gen_range(4..=10);
        let gens: Vec<Vec3> = (0..k)
            .map(|_| {
                let u = random_unit(dim, rng);
                let l = rng.gen_range(0.2..0.8);
                [u[0] * l, u[1] * l, u[2] * l]
            })
            .collect();
        // Keep the inradius away from zero.
        let well_spread = if dim == 2 {
            gens.iter().any(|a| gens.iter().any(|b| cross(a, b)[2].abs() > 0.1 * norm(a) * norm(b)))
        } else {
            (0..k).any(|i| {
                (0..i).any(|j| {
                    (0..j).any(|l| dot(&gens[i], &cross(&gens[j], &gens[l])).abs() > 0.05)
                })
            })
        };
        if well_spread {
            if let Ok(z) = zonotope(dim, &gens) {
                let b = z.into_body();
                let r = b.inradius();
                return if r < 0.25 { b.scaled(0.25 / r) } else { b };
            }
        }
    }
}

/// One body of `kind` from `rng`.
pub fn random_body(dim: usize, kind: Kind, rng: &mut ChaCha8Rng) -> HPolytope {
    match kind {
        Kind::Polygon => polygon(dim, rng, false),
        Kind::SymPolygon => polygon(dim, rng, true),
        Kind::Zonotope => random_zonotope(dim, rng),
        Kind::Box => {
            let w: Vec<f64> = (0..dim).map(|_| rng.gen_range(0.5..2.0)).collect();
            axis_box(&w).expect("positive half-widths")
        }
    }
}

/// `n` bodies, instance `i` drawn from stream `i`.
pub fn random_bodies(n: usize, dim: usize, kind: Kind, seed: u64) -> Vec<HPolytope> {
    (0..n)
        .map(|i| random_body(dim, kind, &mut instance_rng(seed, i as u64)))
        .collect()
}

/// `n` pairs; both members of pair `i` come from stream `i`.
pub fn random_pairs(n: usize, dim: usize, kind: Kind, seed: u64) -> Vec<(HPolytope, HPolytope)> {
    (0..n)
        .map(|i| {
            let mut rng = instance_rng(seed, i as u64);
            let a = random_body(dim, kind, &mut rng);
            let b = random_body(dim, kind, &mut rng);
            (a, b)
        })
        .collect()
}
