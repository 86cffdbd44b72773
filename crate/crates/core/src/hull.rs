//! Convex hulls of point sets in the plane and in space.

use crate::geom::{cross, dot, norm, scale, sub, Vec3};
use std::collections::{HashMap, HashSet};

#[inline]
fn cross2(o: &Vec3, a: &Vec3, b: &Vec3) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Counter-clockwise hull of planar points (indices), collinear points dropped.
///
/// `eps` is the cross-product tolerance below which a turn counts as straight.
pub fn hull2d(pts: &[Vec3], eps: f64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..pts.len()).collect();
    idx.sort_by(|&a, &b| {
        pts[a][0]
            .total_cmp(&pts[b][0])
            .then(pts[a][1].total_cmp(&pts[b][1]))
    });
    idx.dedup_by(|a, b| (pts[*a][0] - pts[*b][0]).abs() <= 0.0 && (pts[*a][1] - pts[*b][1]).abs() <= 0.0);
    if idx.len() < 3 {
        return idx;
    }
    let mut lower: Vec<usize> = Vec::new();
    for &i in &idx {
        while lower.len() >= 2
            && cross2(&pts[lower[lower.len() - 2]], &pts[lower[lower.len() - 1]], &pts[i]) <= eps
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::new();
    for &i in idx.iter().rev() {
        while upper.len() >= 2
            && cross2(&pts[upper[upper.len() - 2]], &pts[upper[upper.len() - 1]], &pts[i]) <= eps
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Triangular face of a 3D hull with outward unit normal and plane offset.
#[derive(Clone, Debug)]
pub struct Face {
    pub v: [usize; 3],
    pub normal: Vec3,
    pub offset: f64,
}

fn make_face(pts: &[Vec3], a: usize, b: usize, c: usize) -> Face {
    let n = cross(&sub(&pts[b], &pts[a]), &sub(&pts[c], &pts[a]));
    let l = norm(&n);
    let normal = if l > 0.0 { scale(&n, 1.0 / l) } else { n };
    Face {
        v: [a, b, c],
        normal,
        offset: dot(&normal, &pts[a]),
    }
}

/// Incremental 3D convex hull. Returns `None` when the points are (nearly)
/// coplanar. Points within `eps` of a face plane count as on the hull.
///
/// The faces removed for a new point form a connected patch grown from the
/// face it lies furthest above, so the surface stays a closed manifold even
/// when many points are coplanar. Points within `100·eps` of an inserted
/// point are skipped.
pub fn hull3d(pts: &[Vec3], eps: f64) -> Option<Vec<Face>> {
    let n = pts.len();
    if n < 4 {
        return None;
    }
    // Initial simplex from extreme points.
    let i0 = (0..n).min_by(|&a, &b| pts[a][0].total_cmp(&pts[b][0]))?;
    let i1 = (0..n).max_by(|&a, &b| {
        norm(&sub(&pts[a], &pts[i0])).total_cmp(&norm(&sub(&pts[b], &pts[i0])))
    })?;
    let d01 = sub(&pts[i1], &pts[i0]);
    let line_dist = |k: usize| norm(&cross(&d01, &sub(&pts[k], &pts[i0])));
    let i2 = (0..n).max_by(|&a, &b| line_dist(a).total_cmp(&line_dist(b)))?;
    let pn = cross(&d01, &sub(&pts[i2], &pts[i0]));
    if norm(&pn) <= eps * norm(&d01) {
        return None;
    }
    let plane_dist = |k: usize| dot(&pn, &sub(&pts[k], &pts[i0])).abs();
    let i3 = (0..n).max_by(|&a, &b| plane_dist(a).total_cmp(&plane_dist(b)))?;
    if plane_dist(i3) <= eps * norm(&pn) {
        return None;
    }
    let centre = scale(
        &[
            pts[i0][0] + pts[i1][0] + pts[i2][0] + pts[i3][0],
            pts[i0][1] + pts[i1][1] + pts[i2][1] + pts[i3][1],
            pts[i0][2] + pts[i1][2] + pts[i2][2] + pts[i3][2],
        ],
        0.25,
    );
    let mut faces: Vec<Face> = Vec::new();
    let mut alive: Vec<bool> = Vec::new();
    // Directed edge (a, b) -> face having it in its ccw boundary.
    let mut edge_face: HashMap<(usize, usize), usize> = HashMap::new();
    let push = |face: Face,
                    faces: &mut Vec<Face>,
                    alive: &mut Vec<bool>,
                    edge_face: &mut HashMap<(usize, usize), usize>| {
        let id = faces.len();
        let [a, b, c] = face.v;
        edge_face.insert((a, b), id);
        edge_face.insert((b, c), id);
        edge_face.insert((c, a), id);
        faces.push(face);
        alive.push(true);
    };
    for f in [[i0, i1, i2], [i0, i1, i3], [i0, i2, i3], [i1, i2, i3]] {
        let mut face = make_face(pts, f[0], f[1], f[2]);
        if dot(&face.normal, &centre) > face.offset {
            face = make_face(pts, f[0], f[2], f[1]);
        }
        push(face, &mut faces, &mut alive, &mut edge_face);
    }
    let simplex = [i0, i1, i2, i3];
    // Far points first: fewer transient slivers.
    let mut order: Vec<usize> = (0..n).filter(|p| !simplex.contains(p)).collect();
    order.sort_by(|&a, &b| {
        norm(&sub(&pts[b], &centre))
            .total_cmp(&norm(&sub(&pts[a], &centre)))
            .then(a.cmp(&b))
    });
    let height = |f: &Face, p: usize| dot(&f.normal, &pts[p]) - f.offset;
    let mut used: Vec<usize> = simplex.to_vec();
    let mut region: Vec<usize> = Vec::new();
    let mut in_region: HashSet<usize> = HashSet::new();
    for p in order {
        let mut best = None;
        let mut best_h = eps;
        for (id, f) in faces.iter().enumerate() {
            if alive[id] {
                let h = height(f, p);
                if h > best_h {
                    best_h = h;
                    best = Some(id);
                }
            }
        }
        let Some(seed) = best else { continue };
        // A near-duplicate of a hull vertex would only add sliver faces.
        if used.iter().any(|&v| norm(&sub(&pts[v], &pts[p])) <= 100.0 * eps) {
            continue;
        }
        used.push(p);
        region.clear();
        in_region.clear();
        region.push(seed);
        in_region.insert(seed);
        let mut k = 0;
        while k < region.len() {
            let [a, b, c] = faces[region[k]].v;
            for (x, y) in [(a, b), (b, c), (c, a)] {
                if let Some(&g) = edge_face.get(&(y, x)) {
                    if !in_region.contains(&g) && height(&faces[g], p) > eps {
                        in_region.insert(g);
                        region.push(g);
                    }
                }
            }
            k += 1;
        }
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        for &id in &region {
            let [a, b, c] = faces[id].v;
            for (x, y) in [(a, b), (b, c), (c, a)] {
                match edge_face.get(&(y, x)) {
                    Some(g) if in_region.contains(g) => {}
                    _ => horizon.push((x, y)),
                }
            }
        }
        for &id in &region {
            alive[id] = false;
            let [a, b, c] = faces[id].v;
            for e in [(a, b), (b, c), (c, a)] {
                if edge_face.get(&e) == Some(&id) {
                    edge_face.remove(&e);
                }
            }
        }
        horizon.sort_unstable();
        for (a, b) in horizon {
            push(make_face(pts, a, b, p), &mut faces, &mut alive, &mut edge_face);
        }
    }
    Some(
        faces
            .into_iter()
            .zip(alive)
            .filter_map(|(f, a)| a.then_some(f))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_hull_drops_interior_and_collinear() {
        let pts = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [2.0, 0.0, 0.0],
            [2.0, 2.0, 0.0],
            [0.0, 2.0, 0.0],
            [1.0, 1.0, 0.0],
        ];
        let h = hull2d(&pts, 1e-12);
        assert_eq!(h.len(), 4);
        assert!(!h.contains(&1) && !h.contains(&5));
    }

    #[test]
    fn cube_hull_faces_are_outward() {
        let mut pts = Vec::new();
        for i in 0..8 {
            pts.push([
                if i & 1 == 0 { -1.0 } else { 1.0 },
                if i & 2 == 0 { -1.0 } else { 1.0 },
                if i & 4 == 0 { -1.0 } else { 1.0 },
            ]);
        }
        pts.push([0.1, 0.2, 0.3]);
        let f = hull3d(&pts, 1e-12).unwrap();
        assert_eq!(f.len(), 12);
        for face in &f {
            assert!((face.offset - 1.0).abs() < 1e-12);
            assert!(!face.v.contains(&8));
        }
    }

    #[test]
    fn coplanar_points_have_no_3d_hull() {
        let pts = vec![
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [1.0, 1.0, 0.0],
        ];
        assert!(hull3d(&pts, 1e-12).is_none());
    }

    #[test]
    fn lattice_with_near_duplicates_stays_convex() {
        // Coplanar grid points on every face plus copies shifted by roundoff.
        let mut pts = Vec::new();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    let p = [i as f64 - 1.5, j as f64 - 1.5, k as f64 - 1.5];
                    pts.push(p);
                    pts.push([p[0] + 1e-15, p[1] - 2e-16, p[2]]);
                }
            }
        }
        let f = hull3d(&pts, 1e-13).unwrap();
        for face in &f {
            assert!((norm(&face.normal) - 1.0).abs() < 1e-12);
            for p in &pts {
                assert!(dot(&face.normal, p) - face.offset < 1e-12);
            }
        }
        let area: f64 = f
            .iter()
            .map(|t| {
                let [a, b, c] = t.v;
                0.5 * norm(&cross(&sub(&pts[b], &pts[a]), &sub(&pts[c], &pts[a])))
            })
            .sum();
        assert!((area - 54.0).abs() < 1e-9);
    }
}
