//! Convex-hull machinery used by the integrand validity test and the
//! dual-Wulff construction: planar monotone chain, a 3D quickhull, and the
//! subdivided-icosahedron direction grid.

use crate::error::{Error, Result};
use nalgebra::{Vector2, Vector3};
use std::collections::HashMap;

/// Cross product of `ab` and `ac`.
#[inline]
pub fn cross2(a: &Vector2<f64>, b: &Vector2<f64>, c: &Vector2<f64>) -> f64 {
    (b - a).perp(&(c - a))
}

/// Andrew's monotone chain. Returns indices of hull vertices in
/// counterclockwise order. Collinear boundary points are dropped.
pub fn planar_hull_indices(points: &[Vector2<f64>]) -> Result<Vec<usize>> {
    if points.len() < 3 {
        return Err(Error::DegenerateHull { need: 3 });
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| {
        points[i]
            .x
            .total_cmp(&points[j].x)
            .then(points[i].y.total_cmp(&points[j].y))
    });
    order.dedup_by(|&mut i, &mut j| (points[i] - points[j]).norm() < 1e-14);

    let mut lower: Vec<usize> = Vec::with_capacity(order.len());
    for &i in &order {
        while lower.len() >= 2
            && cross2(
                &points[lower[lower.len() - 2]],
                &points[lower[lower.len() - 1]],
                &points[i],
            ) <= 0.0
        {
            lower.pop();
        }
        lower.push(i);
    }
    let mut upper: Vec<usize> = Vec::with_capacity(order.len());
    for &i in order.iter().rev() {
        while upper.len() >= 2
            && cross2(
                &points[upper[upper.len() - 2]],
                &points[upper[upper.len() - 1]],
                &points[i],
            ) <= 0.0
        {
            upper.pop();
        }
        upper.push(i);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(Error::DegenerateHull { need: 3 });
    }
    Ok(lower)
}

/// How far `p` sits inside the convex polygon `hull` (ccw vertices):
/// the minimum over edges of the inward signed distance. Near zero for
/// boundary points, positive inside, negative outside.
pub fn planar_depth(hull: &[Vector2<f64>], p: &Vector2<f64>) -> f64 {
    let n = hull.len();
    let mut depth = f64::INFINITY;
    for i in 0..n {
        let a = hull[i];
        let b = hull[(i + 1) % n];
        let e = b - a;
        let len = e.norm();
        if len < 1e-15 {
            continue;
        }
        // outward normal of a ccw polygon edge
        let nrm = Vector2::new(e.y, -e.x) / len;
        depth = depth.min(nrm.dot(&a) - nrm.dot(p));
    }
    depth
}

/// A facet of a 3D hull: plane `normal·x = offset` with outward normal.
#[derive(Clone, Copy, Debug)]
pub struct HullFacet {
    pub vertices: [usize; 3],
    pub normal: Vector3<f64>,
    pub offset: f64,
}

/// 3D quickhull over a point cloud with at least four affinely
/// independent points. Returns the facet list; vertex indices refer to
/// the input slice.
pub fn quickhull3(points: &[Vector3<f64>]) -> Result<Vec<HullFacet>> {
    if points.len() < 4 {
        return Err(Error::DegenerateHull { need: 4 });
    }
    let scale = points
        .iter()
        .map(|p| p.amax())
        .fold(0.0f64, f64::max)
        .max(1e-12);
    let eps = 1e-10 * scale;

    let (i0, i1, i2, i3) = initial_simplex(points, eps)?;
    let centroid = (points[i0] + points[i1] + points[i2] + points[i3]) / 4.0;

    struct Face {
        v: [usize; 3],
        normal: Vector3<f64>,
        offset: f64,
        outside: Vec<usize>,
        alive: bool,
    }

    let make_face = |a: usize, b: usize, c: usize| -> Face {
        let n = (points[b] - points[a]).cross(&(points[c] - points[a]));
        let n = n / n.norm();
        let (v, n) = if n.dot(&centroid) > n.dot(&points[a]) {
            ([a, c, b], -n)
        } else {
            ([a, b, c], n)
        };
        Face {
            v,
            normal: n,
            offset: n.dot(&points[v[0]]),
            outside: Vec::new(),
            alive: true,
        }
    };

    let mut faces: Vec<Face> = vec![
        make_face(i0, i1, i2),
        make_face(i0, i1, i3),
        make_face(i0, i2, i3),
        make_face(i1, i2, i3),
    ];
    let mut edge_owner: HashMap<(usize, usize), usize> = HashMap::new();
    for (fi, f) in faces.iter().enumerate() {
        for k in 0..3 {
            edge_owner.insert((f.v[k], f.v[(k + 1) % 3]), fi);
        }
    }

    // initial conflict assignment
    for (pi, p) in points.iter().enumerate() {
        if pi == i0 || pi == i1 || pi == i2 || pi == i3 {
            continue;
        }
        for f in faces.iter_mut() {
            if f.normal.dot(p) - f.offset > eps {
                f.outside.push(pi);
                break;
            }
        }
    }

    let mut pending: Vec<usize> = (0..faces.len()).collect();
    while let Some(fi) = pending.pop() {
        if !faces[fi].alive || faces[fi].outside.is_empty() {
            continue;
        }
        let apex = *faces[fi]
            .outside
            .iter()
            .max_by(|&&a, &&b| {
                let da = faces[fi].normal.dot(&points[a]);
                let db = faces[fi].normal.dot(&points[b]);
                da.total_cmp(&db)
            })
            .unwrap();
        let ap = points[apex];

        // visible region via flood fill across shared edges
        let mut visible = vec![fi];
        let mut seen = vec![false; faces.len()];
        seen[fi] = true;
        let mut stack = vec![fi];
        while let Some(g) = stack.pop() {
            let vids = faces[g].v;
            for k in 0..3 {
                let e = (vids[(k + 1) % 3], vids[k]);
                if let Some(&h) = edge_owner.get(&e) {
                    if !seen[h] && faces[h].alive {
                        seen[h] = true;
                        if faces[h].normal.dot(&ap) - faces[h].offset > eps {
                            visible.push(h);
                            stack.push(h);
                        }
                    }
                }
            }
        }

        // horizon: directed edges of visible faces whose twin face is hidden
        let mut horizon: Vec<(usize, usize)> = Vec::new();
        let mut orphans: Vec<usize> = Vec::new();
        for &g in &visible {
            let vids = faces[g].v;
            for k in 0..3 {
                let a = vids[k];
                let b = vids[(k + 1) % 3];
                let twin = edge_owner.get(&(b, a)).copied();
                let twin_visible = twin
                    .map(|h| visible.contains(&h))
                    .unwrap_or(false);
                if !twin_visible {
                    horizon.push((a, b));
                }
            }
        }
        for &g in &visible {
            faces[g].alive = false;
            let vids = faces[g].v;
            for k in 0..3 {
                edge_owner.remove(&(vids[k], vids[(k + 1) % 3]));
            }
            orphans.append(&mut faces[g].outside);
        }

        let mut new_ids = Vec::with_capacity(horizon.len());
        for &(a, b) in &horizon {
            let mut f = make_face(a, b, apex);
            f.outside = Vec::new();
            let id = faces.len();
            faces.push(f);
            let vids = faces[id].v;
            for k in 0..3 {
                edge_owner.insert((vids[k], vids[(k + 1) % 3]), id);
            }
            new_ids.push(id);
        }
        for pi in orphans {
            if pi == apex {
                continue;
            }
            for &id in &new_ids {
                if faces[id].normal.dot(&points[pi]) - faces[id].offset > eps {
                    faces[id].outside.push(pi);
                    break;
                }
            }
        }
        for &id in &new_ids {
            if !faces[id].outside.is_empty() {
                pending.push(id);
            }
        }
    }

    Ok(faces
        .into_iter()
        .filter(|f| f.alive)
        .map(|f| HullFacet {
            vertices: f.v,
            normal: f.normal,
            offset: f.offset,
        })
        .collect())
}

fn initial_simplex(points: &[Vector3<f64>], eps: f64) -> Result<(usize, usize, usize, usize)> {
    let mut i0 = 0;
    let mut i1 = 0;
    let mut best = -1.0;
    for axis in 0..3 {
        let lo = (0..points.len())
            .min_by(|&a, &b| points[a][axis].total_cmp(&points[b][axis]))
            .unwrap();
        let hi = (0..points.len())
            .max_by(|&a, &b| points[a][axis].total_cmp(&points[b][axis]))
            .unwrap();
        let d = (points[hi] - points[lo]).norm();
        if d > best {
            best = d;
            i0 = lo;
            i1 = hi;
        }
    }
    if best <= eps {
        return Err(Error::DegenerateHull { need: 4 });
    }
    let dir = (points[i1] - points[i0]) / best;
    let i2 = (0..points.len())
        .max_by(|&a, &b| {
            let da = ((points[a] - points[i0]) - (points[a] - points[i0]).dot(&dir) * dir).norm();
            let db = ((points[b] - points[i0]) - (points[b] - points[i0]).dot(&dir) * dir).norm();
            da.total_cmp(&db)
        })
        .unwrap();
    let n = (points[i1] - points[i0]).cross(&(points[i2] - points[i0]));
    if n.norm() <= eps {
        return Err(Error::DegenerateHull { need: 4 });
    }
    let n = n / n.norm();
    let i3 = (0..points.len())
        .max_by(|&a, &b| {
            let da = (points[a] - points[i0]).dot(&n).abs();
            let db = (points[b] - points[i0]).dot(&n).abs();
            da.total_cmp(&db)
        })
        .unwrap();
    if (points[i3] - points[i0]).dot(&n).abs() <= eps {
        return Err(Error::DegenerateHull { need: 4 });
    }
    Ok((i0, i1, i2, i3))
}

/// Inward depth of `p` with respect to the facet planes of a 3D hull:
/// near zero on the boundary, positive inside, negative outside.
pub fn hull3_depth(facets: &[HullFacet], p: &Vector3<f64>) -> f64 {
    facets
        .iter()
        .map(|f| f.offset - f.normal.dot(p))
        .fold(f64::INFINITY, f64::min)
}

/// Subdivided-icosahedron grid on S².
#[derive(Debug)]
pub struct Icosphere {
    pub nodes: Vec<Vector3<f64>>,
    pub triangles: Vec<[usize; 3]>,
    /// triangles incident to each node
    pub incident: Vec<Vec<usize>>,
}

/// Node counts by subdivision level: 12, 42, 162, 642, 2562, ...
pub fn icosphere(subdivisions: u32) -> Icosphere {
    let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
    let mut nodes: Vec<Vector3<f64>> = [
        (-1.0, phi, 0.0),
        (1.0, phi, 0.0),
        (-1.0, -phi, 0.0),
        (1.0, -phi, 0.0),
        (0.0, -1.0, phi),
        (0.0, 1.0, phi),
        (0.0, -1.0, -phi),
        (0.0, 1.0, -phi),
        (phi, 0.0, -1.0),
        (phi, 0.0, 1.0),
        (-phi, 0.0, -1.0),
        (-phi, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vector3::new(x, y, z).normalize())
    .collect();
    let mut triangles: Vec<[usize; 3]> = vec![
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

    for _ in 0..subdivisions {
        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(triangles.len() * 4);
        let mut mid = |a: usize, b: usize, nodes: &mut Vec<Vector3<f64>>| -> usize {
            let key = (a.min(b), a.max(b));
            if let Some(&m) = midpoint.get(&key) {
                return m;
            }
            let m = ((nodes[a] + nodes[b]) / 2.0).normalize();
            nodes.push(m);
            let idx = nodes.len() - 1;
            midpoint.insert(key, idx);
            idx
        };
        for &[a, b, c] in &triangles {
            let ab = mid(a, b, &mut nodes);
            let bc = mid(b, c, &mut nodes);
            let ca = mid(c, a, &mut nodes);
            next.push([a, ab, ca]);
            next.push([b, bc, ab]);
            next.push([c, ca, bc]);
            next.push([ab, bc, ca]);
        }
        triangles = next;
    }

    let mut incident = vec![Vec::new(); nodes.len()];
    for (ti, t) in triangles.iter().enumerate() {
        for &v in t {
            incident[v].push(ti);
        }
    }
    Icosphere {
        nodes,
        triangles,
        incident,
    }
}

impl Icosphere {
    /// Gnomonic barycentric coordinates of direction `d` in triangle `ti`,
    /// normalized to sum 1; `None` if `d` is outside the triangle cone.
    pub fn barycentric(&self, ti: usize, d: &Vector3<f64>) -> Option<[f64; 3]> {
        let [a, b, c] = self.triangles[ti];
        let m = nalgebra::Matrix3::from_columns(&[self.nodes[a], self.nodes[b], self.nodes[c]]);
        let coeffs = m.lu().solve(d)?;
        let sum = coeffs.x + coeffs.y + coeffs.z;
        if sum <= 0.0 {
            return None;
        }
        let bary = [coeffs.x / sum, coeffs.y / sum, coeffs.z / sum];
        if bary.iter().all(|&t| t >= -1e-9) {
            Some(bary)
        } else {
            None
        }
    }

    /// Triangle containing direction `d`, found via the nearest node's
    /// incident triangles with a full scan as fallback.
    pub fn locate(&self, d: &Vector3<f64>) -> Option<(usize, [f64; 3])> {
        let nearest = (0..self.nodes.len())
            .max_by(|&a, &b| self.nodes[a].dot(d).total_cmp(&self.nodes[b].dot(d)))
            .unwrap();
        for &ti in &self.incident[nearest] {
            if let Some(bary) = self.barycentric(ti, d) {
                return Some((ti, bary));
            }
        }
        for ti in 0..self.triangles.len() {
            if let Some(bary) = self.barycentric(ti, d) {
                return Some((ti, bary));
            }
        }
        None
    }
}
