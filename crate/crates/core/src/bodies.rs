//! Convex polytopes in the plane and in space given by outer unit normals and
//! support numbers, with derived vertices and facets.

use crate::error::{Error, Result};
use crate::geom::{
    self, add, circle_grid, cross, dist, dot, neg, norm, normalize, scale, sub, tangent_basis,
    Vec3,
};
use crate::hull::{hull2d, hull3d};
use rayon::prelude::*;
use crate::surfmeas::SphericalAtomMeasure;

/// Tolerance on `|‖u‖ − 1|` for input directions.
pub const UNIT_TOL: f64 = 1e-12;
/// Angular separation below which two normals are the same direction.
pub const SAME_DIR_TOL: f64 = 1e-10;
/// Relative tolerance for facet membership and geometric identities.
pub const GEOM_TOL: f64 = 1e-9;

/// Convex polytope `{x : ⟨x,u_i⟩ ≤ h_i}` with the origin in its interior.
///
/// Offsets are reduced: each equals the support of the body at its normal.
/// Normals whose facet degenerates keep their slot with facet area 0.
#[derive(Clone, Debug)]
pub struct HPolytope {
    dim: usize,
    normals: Vec<Vec3>,
    offsets: Vec<f64>,
    vertices: Vec<Vec3>,
    facets: Vec<Vec<usize>>,
    facet_areas: Vec<f64>,
}

impl HPolytope {
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn normals(&self) -> &[Vec3] {
        &self.normals
    }
    pub fn offsets(&self) -> &[f64] {
        &self.offsets
    }
    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }
    /// Vertex indices of facet `i`: the two endpoints in 2D, a counter-clockwise
    /// polygon (seen from outside) in 3D.
    pub fn facet(&self, i: usize) -> &[usize] {
        &self.facets[i]
    }
    pub fn facet_areas(&self) -> &[f64] {
        &self.facet_areas
    }
    pub fn len(&self) -> usize {
        self.normals.len()
    }
    pub fn is_empty(&self) -> bool {
        self.normals.is_empty()
    }

    /// Largest vertex norm.
    pub fn circumradius(&self) -> f64 {
        self.vertices.iter().map(norm).fold(0.0, f64::max)
    }

    /// Radius of the largest origin-centred ball inside the body.
    pub fn inradius(&self) -> f64 {
        self.offsets.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `h_K(θ)`; positively 1-homogeneous in `θ`.
    pub fn support(&self, theta: &Vec3) -> f64 {
        self.vertices
            .iter()
            .map(|v| dot(v, theta))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `ρ_K(θ)`, so that `ρ(θ)·θ` lies on the boundary.
    pub fn radial(&self, theta: &Vec3) -> f64 {
        let mut r = f64::INFINITY;
        for (u, h) in self.normals.iter().zip(&self.offsets) {
            let c = dot(theta, u);
            if c > 0.0 {
                r = r.min(h / c);
            }
        }
        r
    }

    /// Lebesgue volume by cone decomposition.
    pub fn volume(&self) -> f64 {
        let s: f64 = self
            .offsets
            .iter()
            .zip(&self.facet_areas)
            .map(|(h, a)| h * a)
            .sum();
        s / self.dim as f64
    }

    /// `Σ_i area_i·u_i`, zero for every closed polytope.
    pub fn closure_defect(&self) -> f64 {
        let mut s = [0.0; 3];
        for (u, a) in self.normals.iter().zip(&self.facet_areas) {
            s = geom::axpy(*a, u, &s);
        }
        norm(&s)
    }

    /// Whether normals are closed under negation with matching offsets.
    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.normals.iter().zip(&self.offsets).all(|(u, h)| {
            self.find_normal(&neg(u))
                .is_some_and(|j| (self.offsets[j] - h).abs() <= tol * h.max(1.0))
        })
    }

    /// Index of the normal equal to `u`, if any.
    pub fn find_normal(&self, u: &Vec3) -> Option<usize> {
        self.normals.iter().position(|w| dist(w, u) <= 1e-9)
    }

    /// `t·K` for `t > 0`.
    pub fn scaled(&self, t: f64) -> HPolytope {
        HPolytope {
            dim: self.dim,
            normals: self.normals.clone(),
            offsets: self.offsets.iter().map(|h| h * t).collect(),
            vertices: self.vertices.iter().map(|v| scale(v, t)).collect(),
            facets: self.facets.clone(),
            facet_areas: self
                .facet_areas
                .iter()
                .map(|a| a * t.powi(self.dim as i32 - 1))
                .collect(),
        }
    }

    /// `−K`.
    pub fn reflected(&self) -> HPolytope {
        let normals: Vec<Vec3> = self.normals.iter().map(neg).collect();
        wulff_unchecked(self.dim, &normals, &self.offsets).expect("reflection of a valid body")
    }

    /// The same body described by its facets of positive area only.
    pub fn trimmed(&self) -> HPolytope {
        let keep: Vec<usize> = (0..self.len()).filter(|&i| self.facet_areas[i] > 0.0).collect();
        let normals: Vec<Vec3> = keep.iter().map(|&i| self.normals[i]).collect();
        let values: Vec<f64> = keep.iter().map(|&i| self.offsets[i]).collect();
        wulff_unchecked(self.dim, &normals, &values).expect("facets of a valid body bound it")
    }

    /// Rebuilds the body from new support numbers on the same normals.
    pub fn with_values(&self, values: &[f64]) -> Result<HPolytope> {
        wulff_unchecked(self.dim, &self.normals, values)
    }
}

fn validate_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::invalid("dim", format!("must be 2 or 3, got {dim}")))
    }
}

/// Checks that `u` is a unit vector of dimension `dim`.
pub fn validate_direction(path: &str, u: &Vec3, dim: usize) -> Result<()> {
    if u.iter().any(|x| !x.is_finite()) {
        return Err(Error::invalid(path, "non-finite coordinate"));
    }
    if dim == 2 && u[2] != 0.0 {
        return Err(Error::invalid(path, "third coordinate in a 2D direction"));
    }
    let n = norm(u);
    if (n - 1.0).abs() > UNIT_TOL {
        return Err(Error::invalid(path, format!("not a unit vector (norm {n})")));
    }
    Ok(())
}

/// Wulff shape `{x : ⟨x,u_i⟩ ≤ f_i}` of positive values on distinct unit normals.
pub fn wulff(dim: usize, normals: &[Vec3], values: &[f64]) -> Result<HPolytope> {
    validate_dim(dim)?;
    if normals.len() != values.len() {
        return Err(Error::invalid(
            "offsets",
            format!("{} values for {} normals", values.len(), normals.len()),
        ));
    }
    for (i, u) in normals.iter().enumerate() {
        validate_direction(&format!("normals[{i}]"), u, dim)?;
    }
    for (i, f) in values.iter().enumerate() {
        if !f.is_finite() || *f <= 0.0 {
            return Err(Error::invalid(
                format!("offsets[{i}]"),
                format!("must be positive and finite, got {f}"),
            ));
        }
    }
    for i in 0..normals.len() {
        for j in 0..i {
            if dist(&normals[i], &normals[j]) <= SAME_DIR_TOL {
                return Err(Error::invalid(
                    format!("normals[{i}]"),
                    format!("duplicates normals[{j}]"),
                ));
            }
        }
    }
    wulff_unchecked(dim, normals, values)
}

/// Wulff shape after merging near-duplicate normals (keeping the smaller value).
pub fn wulff_merged(dim: usize, normals: &[Vec3], values: &[f64]) -> Result<HPolytope> {
    let (n, v) = merge_directions(normals, values, 1e-9);
    wulff_unchecked(dim, &n, &v)
}

fn merge_directions(normals: &[Vec3], values: &[f64], tol: f64) -> (Vec<Vec3>, Vec<f64>) {
    let n = normals.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| normals[a][0].total_cmp(&normals[b][0]).then(a.cmp(&b)));
    let mut rep: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let i = order[k];
        for &j in order[..k].iter().rev() {
            if normals[i][0] - normals[j][0] > tol {
                break;
            }
            if rep[j] == j && dist(&normals[i], &normals[j]) <= tol {
                rep[i] = j;
                break;
            }
        }
    }
    let mut best = values.to_vec();
    for i in 0..n {
        let r = rep[i];
        best[r] = best[r].min(values[i]);
    }
    let keep: Vec<usize> = (0..n).filter(|&i| rep[i] == i).collect();
    (
        keep.iter().map(|&i| normals[i]).collect(),
        keep.iter().map(|&i| best[i]).collect(),
    )
}

pub(crate) fn wulff_unchecked(dim: usize, normals: &[Vec3], values: &[f64]) -> Result<HPolytope> {
    if normals.len() < dim + 1 {
        return Err(Error::UnboundedWulff);
    }
    let dual: Vec<Vec3> = normals
        .iter()
        .zip(values)
        .map(|(u, f)| scale(u, 1.0 / f))
        .collect();
    let s = dual.iter().map(norm).fold(0.0, f64::max);
    let mut cand: Vec<Vec3> = Vec::new();
    if dim == 2 {
        let hull = hull2d(&dual, 1e-14 * s * s);
        if hull.len() < 3 {
            return Err(Error::UnboundedWulff);
        }
        for k in 0..hull.len() {
            let a = hull[k];
            let b = hull[(k + 1) % hull.len()];
            let (pa, pb) = (&dual[a], &dual[b]);
            let c = pa[0] * pb[1] - pa[1] * pb[0];
            if c <= 1e-12 * s * s {
                return Err(Error::UnboundedWulff);
            }
            let (ua, ub) = (&normals[a], &normals[b]);
            let det = ua[0] * ub[1] - ua[1] * ub[0];
            let (fa, fb) = (values[a], values[b]);
            cand.push([
                (fa * ub[1] - fb * ua[1]) / det,
                (ua[0] * fb - ub[0] * fa) / det,
                0.0,
            ]);
        }
    } else {
        let faces = hull3d(&dual, 1e-13 * s).ok_or(Error::UnboundedWulff)?;
        for f in &faces {
            if f.offset <= 1e-12 * s {
                return Err(Error::UnboundedWulff);
            }
            if norm(&f.normal) < 0.5 {
                continue;
            }
            // The dual plane ⟨n,y⟩ = d is the primal vertex n/d.
            let r = [normals[f.v[0]], normals[f.v[1]], normals[f.v[2]]];
            // Nearly coplanar normals pin the vertex only along a line; facet
            // clipping recovers any true vertex skipped here.
            if dot(&r[0], &cross(&r[1], &r[2])).abs() < 1e-10 {
                continue;
            }
            let b = [values[f.v[0]], values[f.v[1]], values[f.v[2]]];
            let v = geom::solve3(&r, &b).unwrap_or_else(|| scale(&f.normal, 1.0 / f.offset));
            cand.push(v);
        }
    }
    let r = cand.iter().map(norm).fold(0.0, f64::max);
    // Drop candidates outside any halfspace (numerical slivers).
    cand.retain(|v| {
        v.iter().all(|x| x.is_finite())
            && normals
                .iter()
                .zip(values)
                .all(|(u, f)| dot(v, u) <= f + 1e-9 * r.max(*f))
    });
    let vertices = dedup_points(&cand, 1e-11 * r);
    if vertices.len() < dim + 1 {
        return Err(Error::UnboundedWulff);
    }
    let r = vertices.iter().map(norm).fold(0.0, f64::max);
    if dim == 3 {
        return Ok(assemble_3d(normals, values, vertices, r));
    }
    let offsets: Vec<f64> = normals
        .iter()
        .zip(values)
        .map(|(u, f)| {
            vertices
                .iter()
                .map(|v| dot(v, u))
                .fold(f64::NEG_INFINITY, f64::max)
                .min(*f)
        })
        .collect();
    let tol = GEOM_TOL * r;
    let mut facets = Vec::with_capacity(normals.len());
    let mut areas = Vec::with_capacity(normals.len());
    for (u, h) in normals.iter().zip(&offsets) {
        let on: Vec<usize> = (0..vertices.len())
            .filter(|&k| dot(&vertices[k], u) >= h - tol)
            .collect();
        let (f, a) = if dim == 2 {
            facet_2d(&vertices, u, &on)
        } else {
            facet_3d(&vertices, u, &on, r)
        };
        facets.push(f);
        areas.push(a);
    }
    Ok(HPolytope {
        dim,
        normals: normals.to_vec(),
        offsets,
        vertices,
        facets,
        facet_areas: areas,
    })
}

/// 3D facets by clipping each facet plane against every other halfspace.
///
/// Vertices at the end of edges shorter than the dual-hull tolerance are
/// recovered here and appended to `vertices`.
fn assemble_3d(normals: &[Vec3], values: &[f64], mut vertices: Vec<Vec3>, r: f64) -> HPolytope {
    let polys: Vec<Vec<Vec3>> = (0..normals.len())
        .into_par_iter()
        .map(|i| clip_facet(normals, values, i, r))
        .collect();
    let tol = 1e-10 * r;
    let mut facets = Vec::with_capacity(normals.len());
    let mut areas = Vec::with_capacity(normals.len());
    for (i, poly) in polys.iter().enumerate() {
        let (e1, e2) = tangent_basis(&normals[i]);
        let flat: Vec<[f64; 2]> = poly.iter().map(|p| [dot(p, &e1), dot(p, &e2)]).collect();
        let m = flat.len();
        let mut twice_area = 0.0;
        for k in 0..m {
            let (a, b) = (flat[k], flat[(k + 1) % m]);
            twice_area += a[0] * b[1] - a[1] * b[0];
        }
        // Degenerate facets only touch the body: their clip points can sit
        // inside edges, so they never create vertices.
        let solid = twice_area > 1e-11 * r * r;
        let mut idx = Vec::with_capacity(poly.len());
        for (k, p) in poly.iter().enumerate() {
            let on_line = {
                let (a, b, c) = (flat[(k + m - 1) % m], flat[k], flat[(k + 1) % m]);
                let (dx, dy) = (c[0] - a[0], c[1] - a[1]);
                let len = dx.hypot(dy);
                len > 0.0 && ((b[0] - a[0]) * dy - (b[1] - a[1]) * dx).abs() / len <= 1e-13 * r
            };
            let k = match vertices.iter().position(|v| dist(v, p) <= tol) {
                Some(k) => k,
                None if solid && !on_line => {
                    vertices.push(*p);
                    vertices.len() - 1
                }
                None => continue,
            };
            if idx.last() != Some(&k) && idx.first() != Some(&k) {
                idx.push(k);
            }
        }
        let mut area = 0.0;
        if idx.len() >= 3 {
            for k in 0..idx.len() {
                let a = &vertices[idx[k]];
                let b = &vertices[idx[(k + 1) % idx.len()]];
                area += dot(a, &e1) * dot(b, &e2) - dot(a, &e2) * dot(b, &e1);
            }
        }
        facets.push(idx);
        areas.push(0.5 * area.max(0.0));
    }
    let offsets: Vec<f64> = normals
        .iter()
        .zip(values)
        .map(|(u, f)| {
            vertices
                .iter()
                .map(|v| dot(v, u))
                .fold(f64::NEG_INFINITY, f64::max)
                .min(*f)
        })
        .collect();
    HPolytope {
        dim: 3,
        normals: normals.to_vec(),
        offsets,
        vertices,
        facets,
        facet_areas: areas,
    }
}

/// Facet `i` as a ccw polygon (seen from outside), empty or degenerate when
/// the constraint is redundant.
fn clip_facet(normals: &[Vec3], values: &[f64], i: usize, r: f64) -> Vec<Vec3> {
    let u = &normals[i];
    let h = values[i];
    let (e1, e2) = tangent_basis(u);
    let big = 4.0 * r + 1.0;
    let mut poly: Vec<[f64; 2]> = vec![[-big, -big], [big, -big], [big, big], [-big, big]];
    let mut order: Vec<usize> = (0..normals.len()).filter(|&j| j != i).collect();
    order.sort_by(|&a, &b| dot(&normals[b], u).total_cmp(&dot(&normals[a], u)).then(a.cmp(&b)));
    let mut next = Vec::with_capacity(16);
    for j in order {
        let w = &normals[j];
        let (ca, cb) = (dot(w, &e1), dot(w, &e2));
        let rhs = values[j] - h * dot(w, u);
        let g = |p: &[f64; 2]| ca * p[0] + cb * p[1] - rhs;
        next.clear();
        for k in 0..poly.len() {
            let p = poly[k];
            let q = poly[(k + 1) % poly.len()];
            let (gp, gq) = (g(&p), g(&q));
            if gp <= 0.0 {
                next.push(p);
            }
            if (gp < 0.0 && gq > 0.0) || (gp > 0.0 && gq < 0.0) {
                let t = gp / (gp - gq);
                next.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            }
        }
        std::mem::swap(&mut poly, &mut next);
        if poly.is_empty() {
            break;
        }
    }
    let centre = scale(u, h);
    poly.iter()
        .map(|p| add(&centre, &add(&scale(&e1, p[0]), &scale(&e2, p[1]))))
        .collect()
}

fn facet_2d(verts: &[Vec3], u: &Vec3, on: &[usize]) -> (Vec<usize>, f64) {
    let t = [-u[1], u[0], 0.0];
    let lo = on
        .iter()
        .copied()
        .min_by(|&a, &b| dot(&verts[a], &t).total_cmp(&dot(&verts[b], &t)));
    let hi = on
        .iter()
        .copied()
        .max_by(|&a, &b| dot(&verts[a], &t).total_cmp(&dot(&verts[b], &t)));
    match (lo, hi) {
        (Some(a), Some(b)) if a != b => (vec![a, b], dot(&sub(&verts[b], &verts[a]), &t)),
        (Some(a), _) => (vec![a], 0.0),
        _ => (Vec::new(), 0.0),
    }
}

fn facet_3d(verts: &[Vec3], u: &Vec3, on: &[usize], r: f64) -> (Vec<usize>, f64) {
    if on.len() < 3 {
        return (on.to_vec(), 0.0);
    }
    let (e1, e2) = tangent_basis(u);
    let proj: Vec<Vec3> = on
        .iter()
        .map(|&k| [dot(&verts[k], &e1), dot(&verts[k], &e2), 0.0])
        .collect();
    let h = hull2d(&proj, 1e-14 * r * r);
    if h.len() < 3 {
        return (h.iter().map(|&k| on[k]).collect(), 0.0);
    }
    let mut area = 0.0;
    for k in 0..h.len() {
        let a = &proj[h[k]];
        let b = &proj[h[(k + 1) % h.len()]];
        area += a[0] * b[1] - a[1] * b[0];
    }
    (h.iter().map(|&k| on[k]).collect(), 0.5 * area)
}

fn dedup_points(pts: &[Vec3], tol: f64) -> Vec<Vec3> {
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| pts[a][0].total_cmp(&pts[b][0]));
    let mut kept: Vec<usize> = Vec::new();
    for &i in &order {
        let dup = kept
            .iter()
            .rev()
            .take_while(|&&j| pts[i][0] - pts[j][0] <= tol)
            .any(|&j| dist(&pts[i], &pts[j]) <= tol);
        if !dup {
            kept.push(i);
        }
    }
    kept.sort_unstable();
    kept.iter().map(|&i| pts[i]).collect()
}

/// Polar body: the Wulff shape of `1/|v|` on the directions of the vertices.
pub fn polar(body: &HPolytope) -> HPolytope {
    let normals: Vec<Vec3> = body.vertices.iter().map(normalize).collect();
    let values: Vec<f64> = body.vertices.iter().map(|v| 1.0 / norm(v)).collect();
    wulff_merged(body.dim, &normals, &values).expect("polar of a body with origin interior")
}

/// `a·A + b·B`, exact in both dimensions.
///
/// In 3D the extra facet normals of the sum are cross products of an edge of
/// `A` with an edge of `B` at which both edges are extremal, so no refinement
/// grid is needed.
pub fn minkowski_comb(a_body: &HPolytope, a: f64, b_body: &HPolytope, b: f64) -> Result<HPolytope> {
    if a_body.dim != b_body.dim {
        return Err(Error::Precondition("dimension mismatch".into()));
    }
    if !(a >= 0.0 && b >= 0.0 && a + b > 0.0) {
        return Err(Error::Precondition(format!(
            "coefficients must be >= 0 with positive sum, got {a}, {b}"
        )));
    }
    if b == 0.0 {
        return Ok(a_body.scaled(a));
    }
    if a == 0.0 {
        return Ok(b_body.scaled(b));
    }
    let dim = a_body.dim;
    let mut normals: Vec<Vec3> = a_body.normals.clone();
    normals.extend_from_slice(&b_body.normals);
    if dim == 3 {
        normals.extend(edge_pair_normals(a_body, b_body));
    }
    let values: Vec<f64> = vec![0.0; normals.len()];
    let (normals, _) = merge_directions(&normals, &values, 1e-9);
    let values: Vec<f64> = normals
        .iter()
        .map(|u| a * a_body.support(u) + b * b_body.support(u))
        .collect();
    wulff_unchecked(dim, &normals, &values)
}

fn edges(body: &HPolytope) -> Vec<(usize, usize)> {
    let mut e = Vec::new();
    for f in &body.facets {
        for k in 0..f.len() {
            let (a, b) = (f[k], f[(k + 1) % f.len()]);
            if a < b {
                e.push((a, b));
            }
        }
    }
    e.sort_unstable();
    e.dedup();
    e
}

fn edge_pair_normals(a: &HPolytope, b: &HPolytope) -> Vec<Vec3> {
    let (ea, eb) = (edges(a), edges(b));
    let ra = a.circumradius();
    let rb = b.circumradius();
    let extremal = |body: &HPolytope, (p, q): (usize, usize), n: &Vec3, r: f64| {
        let h = body.support(n);
        let tol = 1e-10 * r;
        dot(&body.vertices[p], n) >= h - tol && dot(&body.vertices[q], n) >= h - tol
    };
    let mut out = Vec::new();
    for &(p, q) in &ea {
        let da = sub(&a.vertices[q], &a.vertices[p]);
        for &(s, t) in &eb {
            let db = sub(&b.vertices[t], &b.vertices[s]);
            let c = cross(&da, &db);
            if norm(&c) <= 1e-9 * norm(&da) * norm(&db) {
                continue;
            }
            let n = normalize(&c);
            for m in [n, neg(&n)] {
                if extremal(a, (p, q), &m, ra) && extremal(b, (s, t), &m, rb) {
                    out.push(m);
                }
            }
        }
    }
    out
}

/// Default refinement grid for Firey combinations: 256 directions in 2D,
/// 1024 antipodal directions in 3D.
pub fn refinement_grid(dim: usize) -> Vec<Vec3> {
    if dim == 2 {
        circle_grid(256, 0.0)
    } else {
        let m = 512;
        let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
        let mut g = Vec::with_capacity(2 * m);
        for k in 0..m {
            // Upper hemisphere points and their antipodes.
            let z = 1.0 - (k as f64 + 0.5) / m as f64;
            let r = (1.0 - z * z).sqrt();
            let t = golden * k as f64;
            let p = [r * t.cos(), r * t.sin(), z];
            g.push(p);
            g.push(neg(&p));
        }
        g
    }
}

/// Firey `L^q` combination with support `(a·h_A^q + b·h_B^q)^{1/q}`, realized
/// on the union of both normal sets plus [`refinement_grid`].
pub fn firey_comb(a_body: &HPolytope, a: f64, b_body: &HPolytope, b: f64, q: f64) -> Result<HPolytope> {
    if !(q >= 1.0) {
        return Err(Error::QOutOfRange(q));
    }
    if q == 1.0 {
        return minkowski_comb(a_body, a, b_body, b);
    }
    if a_body.dim != b_body.dim {
        return Err(Error::Precondition("dimension mismatch".into()));
    }
    if !(a >= 0.0 && b >= 0.0 && a + b > 0.0) {
        return Err(Error::Precondition(format!(
            "coefficients must be >= 0 with positive sum, got {a}, {b}"
        )));
    }
    let mut normals = a_body.normals.clone();
    normals.extend_from_slice(&b_body.normals);
    normals.extend(refinement_grid(a_body.dim));
    let zeros = vec![0.0; normals.len()];
    let (normals, _) = merge_directions(&normals, &zeros, 1e-9);
    let values: Vec<f64> = normals
        .iter()
        .map(|u| firey_support(a_body, a, b_body, b, q, u))
        .collect();
    wulff_unchecked(a_body.dim, &normals, &values)
}

/// Pointwise Firey support `(a·h_A(θ)^q + b·h_B(θ)^q)^{1/q}`.
pub fn firey_support(a_body: &HPolytope, a: f64, b_body: &HPolytope, b: f64, q: f64, theta: &Vec3) -> f64 {
    (a * a_body.support(theta).powf(q) + b * b_body.support(theta).powf(q)).powf(1.0 / q)
}

/// Zonotope `Σ_j [−g_j, g_j]` with support `Σ_j |⟨θ, g_j⟩|`.
#[derive(Clone, Debug)]
pub struct Zonotope {
    generators: Vec<Vec3>,
    body: HPolytope,
}

impl Zonotope {
    pub fn generators(&self) -> &[Vec3] {
        &self.generators
    }
    pub fn body(&self) -> &HPolytope {
        &self.body
    }
    pub fn into_body(self) -> HPolytope {
        self.body
    }
    /// Exact support from the generators.
    pub fn support(&self, theta: &Vec3) -> f64 {
        self.generators.iter().map(|g| dot(theta, g).abs()).sum()
    }
}

/// Builds the zonotope of `generators`; parallel generators are merged first.
pub fn zonotope(dim: usize, generators: &[Vec3]) -> Result<Zonotope> {
    validate_dim(dim)?;
    let mut merged: Vec<Vec3> = Vec::new();
    for (i, g) in generators.iter().enumerate() {
        if g.iter().any(|x| !x.is_finite()) || (dim == 2 && g[2] != 0.0) {
            return Err(Error::invalid(format!("generators[{i}]"), "invalid coordinates"));
        }
        let l = norm(g);
        if l == 0.0 {
            continue;
        }
        match merged
            .iter_mut()
            .find(|m| norm(&cross(m, g)) <= 1e-12 * l * norm(m))
        {
            Some(m) => {
                let s = if dot(m, g) >= 0.0 { 1.0 } else { -1.0 };
                *m = add(m, &scale(g, s));
            }
            None => merged.push(*g),
        }
    }
    let scale_g = merged.iter().map(norm).fold(0.0, f64::max);
    let mut normals: Vec<Vec3> = Vec::new();
    if dim == 2 {
        for g in &merged {
            let p = normalize(&[-g[1], g[0], 0.0]);
            normals.push(p);
            normals.push(neg(&p));
        }
    } else {
        for i in 0..merged.len() {
            for j in 0..i {
                let c = cross(&merged[i], &merged[j]);
                if norm(&c) > 1e-12 * scale_g * scale_g {
                    let p = normalize(&c);
                    normals.push(p);
                    normals.push(neg(&p));
                }
            }
        }
    }
    let spans = match dim {
        2 => merged.len() >= 2,
        _ => (0..merged.len()).any(|i| {
            (0..i).any(|j| {
                (0..j).any(|k| {
                    dot(&merged[i], &cross(&merged[j], &merged[k])).abs()
                        > 1e-12 * scale_g.powi(3)
                })
            })
        }),
    };
    if !spans {
        return Err(Error::Precondition("zonotope generators do not span".into()));
    }
    let zeros = vec![0.0; normals.len()];
    let (normals, _) = merge_directions(&normals, &zeros, 1e-12);
    let values: Vec<f64> = normals
        .iter()
        .map(|u| merged.iter().map(|g| dot(u, g).abs()).sum())
        .collect();
    let body = wulff_unchecked(dim, &normals, &values)?;
    Ok(Zonotope {
        generators: merged,
        body,
    })
}

/// Classical surface area measure: atoms `(u_i, area_i)` of positive area.
pub fn facet_data(body: &HPolytope) -> SphericalAtomMeasure {
    SphericalAtomMeasure::from_parts(
        body.dim,
        body.normals
            .iter()
            .zip(&body.facet_areas)
            .filter(|(_, a)| **a > 0.0)
            .map(|(u, a)| (*u, *a))
            .collect(),
    )
}

/// Probe directions for support comparisons: a 0.1° circle grid in 2D, an
/// icosphere of level 4 in 3D.
pub fn fine_probe_grid(dim: usize) -> Vec<Vec3> {
    if dim == 2 {
        circle_grid(3600, 0.0)
    } else {
        geom::icosphere(4).0
    }
}

/// Hausdorff distance `max_θ |h_A(θ) − h_B(θ)|` over [`fine_probe_grid`] and
/// both bodies' normals.
pub fn hausdorff(a_body: &HPolytope, b_body: &HPolytope) -> f64 {
    let mut dirs = fine_probe_grid(a_body.dim);
    dirs.extend_from_slice(&a_body.normals);
    dirs.extend_from_slice(&b_body.normals);
    for v in a_body.vertices.iter().chain(&b_body.vertices) {
        dirs.push(normalize(v));
    }
    dirs.iter()
        .map(|t| (a_body.support(t) - b_body.support(t)).abs())
        .fold(0.0, f64::max)
}

/// Axis-aligned box `Π [−w_i, w_i]`.
pub fn axis_box(half_widths: &[f64]) -> Result<HPolytope> {
    let dim = half_widths.len();
    let mut normals = Vec::new();
    let mut values = Vec::new();
    for (i, w) in half_widths.iter().enumerate() {
        let mut e = [0.0; 3];
        e[i] = 1.0;
        normals.push(e);
        normals.push(neg(&e));
        values.push(*w);
        values.push(*w);
    }
    wulff(dim, &normals, &values)
}

/// Body with the given vertices (origin must be interior), via the polar.
pub fn from_vertices(dim: usize, vertices: &[Vec3]) -> Result<HPolytope> {
    validate_dim(dim)?;
    let mut normals = Vec::new();
    let mut values = Vec::new();
    if dim == 2 {
        let h = hull2d(vertices, 0.0);
        for k in 0..h.len() {
            let a = &vertices[h[k]];
            let b = &vertices[h[(k + 1) % h.len()]];
            let e = sub(b, a);
            let u = normalize(&[e[1], -e[0], 0.0]);
            normals.push(u);
            values.push(dot(&u, a));
        }
    } else {
        let s = vertices.iter().map(norm).fold(0.0, f64::max);
        let faces = hull3d(vertices, 1e-12 * s).ok_or(Error::UnboundedWulff)?;
        for f in faces {
            normals.push(f.normal);
            values.push(f.offset);
        }
    }
    if values.iter().any(|v| *v <= 0.0) {
        return Err(Error::Precondition("origin is not interior to the hull".into()));
    }
    wulff_merged(dim, &normals, &values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn square() -> HPolytope {
        axis_box(&[1.0, 1.0]).unwrap()
    }

    fn cube() -> HPolytope {
        axis_box(&[1.0, 1.0, 1.0]).unwrap()
    }

    fn has_vertex(k: &HPolytope, p: &Vec3) -> bool {
        k.vertices().iter().any(|v| dist(v, p) < 1e-12)
    }

    #[test]
    fn wulff_square() {
        let k = square();
        assert_eq!(k.vertices().len(), 4);
        for p in [[1.0, 1.0, 0.0], [-1.0, 1.0, 0.0], [1.0, -1.0, 0.0], [-1.0, -1.0, 0.0]] {
            assert!(has_vertex(&k, &p));
        }
        for a in k.facet_areas() {
            assert!((a - 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn wulff_redundant_diagonals_reduce() {
        let d = FRAC_1_SQRT_2;
        let normals = vec![
            [1.0, 0.0, 0.0],
            [-1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [0.0, -1.0, 0.0],
            [d, d, 0.0],
            [-d, -d, 0.0],
        ];
        let k = wulff(2, &normals, &[1.0, 1.0, 1.0, 1.0, 2.0, 2.0]).unwrap();
        // Brute-force vertex enumeration over all pairs of boundary lines.
        let vals = [1.0, 1.0, 1.0, 1.0, 2.0, 2.0];
        let mut brute = Vec::new();
        for i in 0..6 {
            for j in 0..i {
                let (a, b) = (normals[i], normals[j]);
                let det = a[0] * b[1] - a[1] * b[0];
                if det.abs() < 1e-12 {
                    continue;
                }
                let x = [
                    (vals[i] * b[1] - vals[j] * a[1]) / det,
                    (a[0] * vals[j] - b[0] * vals[i]) / det,
                    0.0,
                ];
                if (0..6).all(|m| dot(&x, &normals[m]) <= vals[m] + 1e-12)
                    && !brute.iter().any(|p| dist(p, &x) < 1e-12)
                {
                    brute.push(x);
                }
            }
        }
        assert_eq!(brute.len(), 4);
        assert_eq!(k.vertices().len(), 4);
        for p in &brute {
            assert!(has_vertex(&k, p));
        }
        assert!((k.offsets()[4] - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(k.facet_areas()[4], 0.0);
        assert_eq!(k.facet_areas()[5], 0.0);
    }

    #[test]
    fn wulff_slab_is_unbounded() {
        let e = wulff(2, &[[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0]], &[1.0, 1.0]).unwrap_err();
        assert_eq!(e.to_string(), "unbounded Wulff shape");
        let half = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0]];
        assert_eq!(wulff(2, &half, &[1.0, 1.0, 1.0]).unwrap_err(), Error::UnboundedWulff);
    }

    #[test]
    fn wulff_names_bad_normal() {
        let e = wulff(2, &[[1.0, 0.0, 0.0], [0.0, 1.1, 0.0], [-1.0, 0.0, 0.0]], &[1.0; 3])
            .unwrap_err();
        assert!(e.to_string().starts_with("normals[1]"), "{e}");
    }

    #[test]
    fn support_and_radial() {
        let k = square();
        let d = [FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0];
        assert_eq!(k.support(&[1.0, 0.0, 0.0]), 1.0);
        assert!((k.support(&d) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(k.radial(&[1.0, 0.0, 0.0]), 1.0);
        assert!((k.radial(&d) - 2f64.sqrt()).abs() < 1e-15);
        let s3 = 1.0 / 3f64.sqrt();
        assert!((cube().support(&[s3, s3, s3]) - 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn ball_polygon_radial_bounds() {
        let n = circle_grid(64, 0.0);
        let k = wulff(2, &n, &vec![1.0; 64]).unwrap();
        for t in circle_grid(997, 0.3) {
            let r = k.radial(&t);
            assert!(r >= 1.0 - 1e-12 && r <= 1.0 / (PI / 64.0).cos() + 1e-12);
        }
        // The inradius/circumradius sandwich for the regular 64-gon.
        assert!((k.circumradius() - 1.0 / (PI / 64.0).cos()).abs() < 1e-12);
    }

    #[test]
    fn polar_square_is_cross_polytope() {
        let p = polar(&square());
        assert_eq!(p.vertices().len(), 4);
        for v in [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-1.0, 0.0, 0.0], [0.0, -1.0, 0.0]] {
            assert!(has_vertex(&p, &v));
        }
        let pp = polar(&p);
        assert_eq!(pp.vertices().len(), 4);
        for v in square().vertices() {
            assert!(pp.vertices().iter().any(|w| dist(v, w) < 1e-9));
        }
    }

    #[test]
    fn polar_cube_is_octahedron() {
        let p = polar(&cube());
        assert_eq!(p.vertices().len(), 6);
        for i in 0..3 {
            let mut e = [0.0; 3];
            e[i] = 1.0;
            assert!(has_vertex(&p, &e));
            assert!(has_vertex(&p, &neg(&e)));
        }
        assert!((p.volume() - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn cube_facets() {
        let k = cube();
        assert_eq!(k.vertices().len(), 8);
        for a in k.facet_areas() {
            assert!((a - 4.0).abs() < 1e-13);
        }
        assert!((k.volume() - 8.0).abs() < 1e-13);
        assert!(k.closure_defect() < 1e-12);
    }

    #[test]
    fn sums_basic() {
        let k = square();
        let two = minkowski_comb(&k, 1.0, &k, 1.0).unwrap();
        assert!(hausdorff(&two, &k.scaled(2.0)) < 1e-12);
        let ball = wulff(2, &circle_grid(32, 0.0), &vec![1.0; 32]).unwrap();
        let same = minkowski_comb(&k, 1.0, &ball, 0.0).unwrap();
        assert!(hausdorff(&same, &k) < 1e-15);
    }

    fn brute_sum_hull(a: &HPolytope, b: &HPolytope) -> HPolytope {
        let mut pts = Vec::new();
        for v in a.vertices() {
            for w in b.vertices() {
                pts.push(add(v, w));
            }
        }
        from_vertices(a.dim(), &pts).unwrap()
    }

    #[test]
    fn square_plus_rotated_square_matches_vertex_hull() {
        let k = square();
        let d = FRAC_1_SQRT_2;
        let l = wulff(
            2,
            &[[d, d, 0.0], [-d, d, 0.0], [-d, -d, 0.0], [d, -d, 0.0]],
            &[1.0; 4],
        )
        .unwrap();
        let s = minkowski_comb(&k, 1.0, &l, 1.0).unwrap();
        let oracle = brute_sum_hull(&k, &l);
        assert!((s.volume() - oracle.volume()).abs() < 1e-12);
        assert!(hausdorff(&s, &oracle) < 1e-12);
        // Octagon area: 4 + 2·V(K,L)·... evaluated directly.
        let v_kl = 0.5 * k.normals().iter().zip(k.facet_areas()).map(|(u, a)| l.support(u) * a).sum::<f64>();
        assert!((s.volume() - (k.volume() + 2.0 * v_kl + l.volume())).abs() < 1e-12);
    }

    #[test]
    fn sum_3d_matches_vertex_hull() {
        let k = cube();
        let o = polar(&cube());
        let s = minkowski_comb(&k, 1.0, &o, 0.5).unwrap();
        for t in geom::icosphere(3).0 {
            let exact = k.support(&t) + 0.5 * o.support(&t);
            assert!((s.support(&t) - exact).abs() < 1e-9);
        }
        assert!(s.closure_defect() < 1e-9);
    }

    #[test]
    fn firey_rules() {
        let k = square();
        let l = axis_box(&[2.0, 0.5]).unwrap();
        assert!(firey_comb(&k, 0.5, &l, 0.5, 0.5).is_err());
        let kk = firey_comb(&k, 0.5, &k, 0.5, 3.0).unwrap();
        assert!(hausdorff(&kk, &k) < 1e-12);
        let f2 = firey_comb(&k, 0.5, &l, 0.5, 2.0).unwrap();
        let m = minkowski_comb(&k, 0.5, &l, 0.5).unwrap();
        for t in circle_grid(360, 0.0) {
            assert!(f2.support(&t) >= m.support(&t) - 1e-12);
            assert!(f2.support(&t) >= firey_support(&k, 0.5, &l, 0.5, 2.0, &t) - 1e-12);
        }
        for u in &refinement_grid(2) {
            let direct = firey_support(&k, 0.5, &l, 0.5, 2.0, u);
            assert!(f2.support(u) <= direct + 1e-12);
        }
    }

    #[test]
    fn zonotopes() {
        let z = zonotope(2, &[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).unwrap();
        assert!(hausdorff(z.body(), &square()) < 1e-14);
        let c = zonotope(3, &[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        assert!(hausdorff(c.body(), &cube()) < 1e-14);
        assert!(zonotope(2, &[[1.0, 0.0, 0.0], [-2.0, 0.0, 0.0]]).is_err());
    }

    #[test]
    fn zonotope_random_planar() {
        let gens: Vec<Vec3> = (0..8)
            .map(|k| {
                let t = 0.7 * k as f64 + 0.1;
                [t.cos() * (0.3 + 0.1 * k as f64), t.sin() * (0.3 + 0.1 * k as f64), 0.0]
            })
            .collect();
        let z = zonotope(2, &gens).unwrap();
        for t in circle_grid(100, 0.05) {
            let direct: f64 = gens.iter().map(|g| dot(&t, g).abs()).sum();
            assert!((z.body().support(&t) - direct).abs() < 1e-10);
        }
    }

    #[test]
    fn facet_data_examples() {
        let s = facet_data(&square());
        assert_eq!(s.len(), 4);
        assert!(s.weights().iter().all(|w| (w - 2.0).abs() < 1e-14));
        let c = facet_data(&cube());
        assert_eq!(c.len(), 6);
        assert!(c.weights().iter().all(|w| (w - 4.0).abs() < 1e-13));
        let t = from_vertices(2, &[[-0.25, -0.25, 0.0], [0.75, -0.25, 0.0], [-0.25, 0.75, 0.0]]).unwrap();
        let mut w = facet_data(&t).weights().to_vec();
        w.sort_by(f64::total_cmp);
        assert!((w[0] - 1.0).abs() < 1e-12 && (w[1] - 1.0).abs() < 1e-12);
        assert!((w[2] - 2f64.sqrt()).abs() < 1e-12);
    }
}
