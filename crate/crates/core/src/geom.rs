//! Small fixed-size vector helpers and spherical direction grids.
//!
//! Points and directions are stored as `[f64; 3]`; two-dimensional data keeps
//! the third coordinate at zero.

use std::f64::consts::PI;

pub type Vec3 = [f64; 3];

#[inline]
pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn add(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub(a: &Vec3, b: &Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale(a: &Vec3, t: f64) -> Vec3 {
    [a[0] * t, a[1] * t, a[2] * t]
}

#[inline]
pub fn axpy(t: f64, a: &Vec3, b: &Vec3) -> Vec3 {
    [t * a[0] + b[0], t * a[1] + b[1], t * a[2] + b[2]]
}

#[inline]
pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist(a: &Vec3, b: &Vec3) -> f64 {
    norm(&sub(a, b))
}

pub fn normalize(a: &Vec3) -> Vec3 {
    let n = norm(a);
    scale(a, 1.0 / n)
}

#[inline]
pub fn neg(a: &Vec3) -> Vec3 {
    [-a[0], -a[1], -a[2]]
}

/// Pads a slice of length 2 or 3 into a `Vec3`.
pub fn from_slice(s: &[f64]) -> Vec3 {
    let mut v = [0.0; 3];
    for (i, x) in s.iter().take(3).enumerate() {
        v[i] = *x;
    }
    v
}

pub fn to_vec(v: &Vec3, dim: usize) -> Vec<f64> {
    v[..dim].to_vec()
}

/// Solves the 3x3 system with rows `r` and right-hand side `b` by Cramer's rule.
pub fn solve3(r: &[Vec3; 3], b: &Vec3) -> Option<Vec3> {
    let det = dot(&r[0], &cross(&r[1], &r[2]));
    if det.abs() < 1e-300 {
        return None;
    }
    // Columns of the inverse are the cross products of row pairs.
    let c0 = cross(&r[1], &r[2]);
    let c1 = cross(&r[2], &r[0]);
    let c2 = cross(&r[0], &r[1]);
    Some(scale(&axpy(b[2], &c2, &axpy(b[1], &c1, &scale(&c0, b[0]))), 1.0 / det))
}

/// Orthonormal pair spanning the plane orthogonal to unit `u`.
pub fn tangent_basis(u: &Vec3) -> (Vec3, Vec3) {
    let a = if u[0].abs() < 0.6 {
        [1.0, 0.0, 0.0]
    } else if u[1].abs() < 0.6 {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    let e1 = normalize(&sub(&a, &scale(u, dot(&a, u))));
    let e2 = cross(u, &e1);
    (e1, e2)
}

/// `m` equally spaced unit vectors on the circle, starting at angle `offset`.
pub fn circle_grid(m: usize, offset: f64) -> Vec<Vec3> {
    (0..m)
        .map(|k| {
            let t = offset + 2.0 * PI * k as f64 / m as f64;
            [t.cos(), t.sin(), 0.0]
        })
        .collect()
}

/// Icosphere vertices and triangles after `level` rounds of 4-way subdivision.
pub fn icosphere(level: usize) -> (Vec<Vec3>, Vec<[usize; 3]>) {
    let p = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<Vec3> = [
        [-1.0, p, 0.0],
        [1.0, p, 0.0],
        [-1.0, -p, 0.0],
        [1.0, -p, 0.0],
        [0.0, -1.0, p],
        [0.0, 1.0, p],
        [0.0, -1.0, -p],
        [0.0, 1.0, -p],
        [p, 0.0, -1.0],
        [p, 0.0, 1.0],
        [-p, 0.0, -1.0],
        [-p, 0.0, 1.0],
    ]
    .iter()
    .map(normalize)
    .collect();
    let mut tris: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..level {
        let mut mid = std::collections::HashMap::new();
        let mut next = Vec::with_capacity(tris.len() * 4);
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<Vec3>| -> usize {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                verts.push(normalize(&add(&verts[a], &verts[b])));
                verts.len() - 1
            })
        };
        for t in &tris {
            let ab = midpoint(t[0], t[1], &mut verts);
            let bc = midpoint(t[1], t[2], &mut verts);
            let ca = midpoint(t[2], t[0], &mut verts);
            next.push([t[0], ab, ca]);
            next.push([t[1], bc, ab]);
            next.push([t[2], ca, bc]);
            next.push([ab, bc, ca]);
        }
        tris = next;
    }
    (verts, tris)
}

/// Area of the spherical triangle with unit vertices `a`, `b`, `c`.
pub fn spherical_triangle_area(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    let num = dot(a, &cross(b, c)).abs();
    let den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
    2.0 * num.atan2(den)
}

/// Icosphere vertices with weights equal to a third of the spherical area of
/// each incident triangle; weights sum to 4π.
pub fn icosphere_weights(level: usize) -> (Vec<Vec3>, Vec<f64>) {
    let (v, t) = icosphere(level);
    let mut w = vec![0.0; v.len()];
    for tri in &t {
        let a = spherical_triangle_area(&v[tri[0]], &v[tri[1]], &v[tri[2]]) / 3.0;
        for &i in tri {
            w[i] += a;
        }
    }
    (v, w)
}

/// Uniform probe directions: a 1° circle grid in 2D, an icosphere in 3D.
pub fn probe_grid(dim: usize, level: usize) -> Vec<Vec3> {
    if dim == 2 {
        circle_grid(360 * (1 << level.min(4)), 0.0)
    } else {
        icosphere(level).0
    }
}

/// Antipodally symmetric direction set: `m` directions (m even) on the circle,
/// or icosphere vertices in 3D (which are closed under negation).
pub fn even_directions(dim: usize, m_or_level: usize) -> Vec<Vec3> {
    if dim == 2 {
        circle_grid(m_or_level, 0.0)
    } else {
        icosphere(m_or_level).0
    }
}

/// Volume of the unit ball in ℝⁿ.
pub fn kappa(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        _ => {
            let nf = n as f64;
            PI.powf(nf / 2.0) / libm::tgamma(nf / 2.0 + 1.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icosphere_counts_and_weights() {
        let (v, t) = icosphere(2);
        assert_eq!(v.len(), 162);
        assert_eq!(t.len(), 320);
        let (_, w) = icosphere_weights(3);
        let s: f64 = w.iter().sum();
        assert!((s - 4.0 * PI).abs() < 1e-10);
    }

    #[test]
    fn icosphere_is_antipodal() {
        let (v, _) = icosphere(2);
        for a in &v {
            assert!(v.iter().any(|b| dist(&neg(a), b) < 1e-12));
        }
    }

    #[test]
    fn solve3_identity() {
        let r = [[2.0, 0.0, 0.0], [0.0, 3.0, 0.0], [1.0, 0.0, 1.0]];
        let x = solve3(&r, &[2.0, 3.0, 2.0]).unwrap();
        assert!(dist(&x, &[1.0, 1.0, 1.0]) < 1e-14);
    }

    #[test]
    fn ball_volumes() {
        assert!((kappa(3) - 4.0 * PI / 3.0).abs() < 1e-15);
        assert!((kappa(4) - PI * PI / 2.0).abs() < 1e-12);
    }
}
