//! Wulff shapes and their duals: the inversion/projection maps, planar
//! Wulff construction by half-plane intersection, apex detection through
//! normal cones, and the three-way equivalence report tying the cap law,
//! local maximality + apex, and dual-graph flatness together.

use crate::error::{Error, Result};
use crate::hull::planar_hull_indices;
use crate::integrand::{cap_law_witness, CapSampling, ConvexIntegrand};
use crate::sphere::{UnitVec, UnitVec2, UnitVec3};
use crate::tol::{acos_clamped, ANGLE_EPS};
use nalgebra::{SVector, Vector2, Vector3, Vector4};
use std::f64::consts::{PI, TAU};

/// Inversion with respect to the origin: `(θ, r) ↦ (−θ, 1/r)`,
/// i.e. `x ↦ −x/‖x‖²`. An involution on nonzero points.
pub fn invert_point<const D: usize>(x: &SVector<f64, D>) -> Result<SVector<f64, D>> {
    let n2 = x.norm_squared();
    if n2 < 1e-24 {
        return Err(Error::ZeroVector);
    }
    Ok(-x / n2)
}

/// Central projection relative to the last-coordinate pole: divides by the
/// last component, landing in the plane `{x_D = 1}`. Rejects the equator
/// and the lower hemisphere.
pub fn alpha_n<const D: usize>(p: &UnitVec<D>) -> Result<SVector<f64, D>> {
    let last = p.as_vector()[D - 1];
    if last <= 1e-12 {
        return Err(Error::NotUpperHemisphere);
    }
    Ok(p.as_vector() / last)
}

/// Inverse central projection: normalizes a point of the plane `{x_D = 1}`
/// back onto the upper hemisphere.
pub fn alpha_n_inv<const D: usize>(y: &SVector<f64, D>) -> Result<UnitVec<D>> {
    if (y[D - 1] - 1.0).abs() > 1e-9 {
        return Err(Error::Schema(format!(
            "projection-plane point must have last coordinate 1, got {}",
            y[D - 1]
        )));
    }
    UnitVec::normalize(*y)
}

/// Spherical blow-up `Ψ_N(P̃) = (N − (N·P̃)P̃)/√(1 − (N·P̃)²)` with the pole
/// `N` on the last coordinate axis. Sends every point to the point of the
/// upper hemisphere at distance π/2 from it along the meridian.
pub fn psi_n<const D: usize>(p: &UnitVec<D>) -> Result<UnitVec<D>> {
    let c = p.as_vector()[D - 1];
    let denom2 = 1.0 - c * c;
    if denom2 < 1e-24 {
        return Err(Error::PoleInput);
    }
    let mut n = SVector::<f64, D>::zeros();
    n[D - 1] = 1.0;
    UnitVec::normalize((n - c * p.as_vector()) / denom2.sqrt())
}

fn composite_inversion<const D: usize>(lifted: SVector<f64, D>) -> Result<SVector<f64, D>> {
    let on_sphere = UnitVec::normalize(lifted)?;
    let blown = psi_n(&on_sphere)?;
    alpha_n(&blown)
}

/// `|composite(x) − invert(x)|` for the identity
/// `inv = Id⁻¹ ∘ α_N ∘ Ψ_N ∘ α_N⁻¹ ∘ Id` on plane points (ambient S²).
pub fn inversion_identity_residual2(x: &Vector2<f64>) -> Result<f64> {
    let lifted = Vector3::new(x.x, x.y, 1.0);
    let projected = composite_inversion(lifted)?;
    let direct = invert_point(x)?;
    Ok((Vector2::new(projected.x, projected.y) - direct).norm())
}

/// Same identity one dimension up: space points through S³.
pub fn inversion_identity_residual3(x: &Vector3<f64>) -> Result<f64> {
    let lifted = Vector4::new(x.x, x.y, x.z, 1.0);
    let projected = composite_inversion(lifted)?;
    let direct = invert_point(x)?;
    Ok((Vector3::new(projected.x, projected.y, projected.z) - direct).norm())
}

/// Planar Wulff shape: intersection of the half-planes
/// `{x·θ_i ≤ γ(θ_i)}` over a uniform direction grid, stored as a closed
/// counterclockwise vertex chain with the origin strictly inside.
#[derive(Clone, Debug)]
pub struct WulffPolygon {
    vertices: Vec<Vector2<f64>>,
    grid_size: usize,
}

impl WulffPolygon {
    pub fn vertices(&self) -> &[Vector2<f64>] {
        &self.vertices
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    fn validate(vertices: Vec<Vector2<f64>>, grid_size: usize) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::EmptyWulff);
        }
        let n = vertices.len();
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            let c = vertices[(i + 2) % n];
            if (b - a).perp(&(c - b)) < -1e-12 {
                return Err(Error::EmptyWulff);
            }
        }
        let poly = Self {
            vertices,
            grid_size,
        };
        if poly.depth(&Vector2::zeros()) <= 0.0 {
            return Err(Error::EmptyWulff);
        }
        Ok(poly)
    }

    /// Inward distance of `p` to the boundary: positive inside,
    /// negative outside.
    pub fn depth(&self, p: &Vector2<f64>) -> f64 {
        crate::hull::planar_depth(&self.vertices, p)
    }

    /// Support function `max_v v·θ`.
    pub fn support(&self, theta: &UnitVec2) -> f64 {
        self.vertices
            .iter()
            .map(|v| v.dot(theta.as_vector()))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn area(&self) -> f64 {
        let n = self.vertices.len();
        (0..n)
            .map(|i| self.vertices[i].perp(&self.vertices[(i + 1) % n]))
            .sum::<f64>()
            / 2.0
    }

    /// Boundary point hit by the ray `ℝ₊·dir`.
    pub fn ray_boundary_point(&self, dir: &UnitVec2) -> Vector2<f64> {
        let d = dir.as_vector();
        let n = self.vertices.len();
        let mut best_t = f64::INFINITY;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let e = b - a;
            let det = d.perp(&e);
            if det.abs() < 1e-15 {
                continue;
            }
            // solve t·d = a + s·e
            let t = a.perp(&e) / det;
            let s = a.perp(d) / det;
            if t > 0.0 && (-1e-12..=1.0 + 1e-12).contains(&s) {
                best_t = best_t.min(t);
            }
        }
        d * best_t
    }

    /// Angular width of the outward normal cone at vertex `idx`
    /// (the exterior angle); zero exactly for collinear neighbors.
    pub fn normal_cone_width(&self, idx: usize) -> Result<f64> {
        if idx >= self.vertices.len() {
            return Err(Error::NotAVertex);
        }
        let n = self.vertices.len();
        let prev = self.vertices[(idx + n - 1) % n];
        let here = self.vertices[idx];
        let next = self.vertices[(idx + 1) % n];
        let n1 = edge_normal(&prev, &here);
        let n2 = edge_normal(&here, &next);
        Ok(acos_clamped(n1.dot(&n2)))
    }

    /// Normal-cone width at an arbitrary boundary point: the exterior
    /// angle when the point is a vertex, zero on edge interiors.
    pub fn normal_cone_width_at(&self, p: &Vector2<f64>) -> Result<f64> {
        if self.depth(p).abs() > 1e-7 * (1.0 + p.norm()) {
            return Err(Error::NotOnBoundary);
        }
        let snap = 1e-7 * (1.0 + p.norm());
        for (i, v) in self.vertices.iter().enumerate() {
            if (v - p).norm() <= snap {
                return self.normal_cone_width(i);
            }
        }
        Ok(0.0)
    }
}

fn edge_normal(a: &Vector2<f64>, b: &Vector2<f64>) -> Vector2<f64> {
    let e = b - a;
    Vector2::new(e.y, -e.x).normalize()
}

/// Builds the planar Wulff shape of an S¹ integrand on `n_dirs` uniform
/// directions. The half-plane envelope is obtained by walking the hull of
/// the scaled direction points `θ/γ(θ)` and intersecting consecutive
/// active constraints; ties in direction keep the first occurrence.
pub fn build_wulff(gamma: &ConvexIntegrand<2>, n_dirs: usize) -> Result<WulffPolygon> {
    if n_dirs < 8 {
        return Err(Error::GridTooSmall { need: 8, got: n_dirs });
    }
    let scaled: Vec<Vector2<f64>> = (0..n_dirs)
        .map(|i| {
            let theta = UnitVec2::from_angle(TAU * i as f64 / n_dirs as f64);
            theta.as_vector() / gamma.eval(&theta)
        })
        .collect();
    let hull = planar_hull_indices(&scaled)?;
    let m = hull.len();
    let mut vertices: Vec<Vector2<f64>> = Vec::with_capacity(m);
    for k in 0..m {
        let a = scaled[hull[k]];
        let b = scaled[hull[(k + 1) % m]];
        // intersection of x·a = 1 and x·b = 1
        let det = a.perp(&b);
        if det.abs() < 1e-15 {
            continue;
        }
        let v = Vector2::new(b.y - a.y, a.x - b.x) / det;
        // collinear runs of the scaled grid reproduce one corner many
        // times (up to rounding); coalesce them
        if let Some(last) = vertices.last() {
            if (v - last).norm() <= 1e-9 * (1.0 + v.norm()) {
                continue;
            }
        }
        vertices.push(v);
    }
    while vertices.len() > 1 {
        let first = vertices[0];
        let last = *vertices.last().unwrap();
        if (first - last).norm() <= 1e-9 * (1.0 + first.norm()) {
            vertices.pop();
        } else {
            break;
        }
    }
    WulffPolygon::validate(vertices, n_dirs)
}

/// Dual Wulff shape: convex hull of the inverted graph
/// `{(−θ, 1/γ(θ))}`, as a counterclockwise polygon.
#[derive(Clone, Debug)]
pub struct DualWulff {
    vertices: Vec<Vector2<f64>>,
    /// all sampled inverted-graph points, in grid order
    samples: Vec<Vector2<f64>>,
}

impl DualWulff {
    pub fn vertices(&self) -> &[Vector2<f64>] {
        &self.vertices
    }

    pub fn samples(&self) -> &[Vector2<f64>] {
        &self.samples
    }

    pub fn depth(&self, p: &Vector2<f64>) -> f64 {
        crate::hull::planar_depth(&self.vertices, p)
    }
}

pub fn build_dual_wulff(gamma: &ConvexIntegrand<2>, n_dirs: usize) -> Result<DualWulff> {
    if n_dirs < 8 {
        return Err(Error::GridTooSmall { need: 8, got: n_dirs });
    }
    let samples: Vec<Vector2<f64>> = (0..n_dirs)
        .map(|i| {
            let theta = UnitVec2::from_angle(TAU * i as f64 / n_dirs as f64);
            let p = gamma.inv_graph_point(&theta).position();
            Vector2::new(p[0], p[1])
        })
        .collect();
    let hull = planar_hull_indices(&samples)?;
    let vertices: Vec<Vector2<f64>> = hull.iter().map(|&i| samples[i]).collect();
    Ok(DualWulff { vertices, samples })
}

/// A 2-plane through the origin containing the queried direction,
/// selected by a rotation angle about it.
#[derive(Clone, Copy, Debug)]
pub struct SectionPlane {
    pub apex_dir: UnitVec3,
    pub rotation: f64,
}

impl SectionPlane {
    /// In-plane tangent direction orthogonal to the apex direction.
    pub fn tangent(&self) -> Vector3<f64> {
        let (u, v) = self.apex_dir.tangent_basis();
        u * self.rotation.cos() + v * self.rotation.sin()
    }
}

/// Smoothness threshold separating discretization cones from genuine
/// vertices: a cone is an apex only above `max(tol, 3·(2π/grid))`.
fn apex_threshold(grid: usize, tol: f64) -> f64 {
    tol.max(3.0 * TAU / grid as f64)
}

/// Apex test for S¹ integrands: the normal-cone width at the boundary
/// point `ℝ₊P ∩ ∂W_γ` must clear the discretization threshold.
pub fn detect_apex2(gamma: &ConvexIntegrand<2>, p: &UnitVec2, grid: usize, tol: f64) -> Result<bool> {
    let wulff = build_wulff(gamma, grid)?;
    let hit = wulff.ray_boundary_point(p);
    let width = wulff.normal_cone_width_at(&hit)?;
    Ok(width > apex_threshold(grid, tol))
}

/// Apex test for S² integrands: every sampled section plane through `p`
/// must be non-smooth at `p`. Sections restrict the integrand to the
/// plane's great circle; the sampled rotations cover `[0, π)`.
pub fn detect_apex3(
    gamma: &ConvexIntegrand<3>,
    p: &UnitVec3,
    sections: usize,
    grid: usize,
    tol: f64,
) -> Result<bool> {
    assert!(sections >= 8, "need at least 8 section planes");
    let planar_p = UnitVec2::from_angle(0.0);
    for k in 0..sections {
        let plane = SectionPlane {
            apex_dir: *p,
            rotation: PI * k as f64 / sections as f64,
        };
        let section = gamma.restrict_to_section(p, &plane.tangent());
        if !detect_apex2(&section, &planar_p, grid, tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Outcome of checking the three equivalent apex conditions at one
/// direction: (1) the cap law, (2) local maximality together with the
/// apex property, (3) flatness of the inverted graph against the
/// hyperplane through `(1/γ(P))(−P)` with normal `P`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct Theorem1Report {
    /// condition (1), with the certified cap radius when it holds
    pub cap_law: bool,
    pub cap_law_delta: Option<f64>,
    /// components of condition (2)
    pub local_max: bool,
    pub apex: bool,
    /// condition (3), with the measured hyperplane deviation
    pub dual_flat: bool,
    pub flat_residual: f64,
    /// number of section planes sampled (S² inputs only); the paper
    /// quantifies over all planes, so this records the sampling risk
    pub sections: Option<usize>,
    pub agree: bool,
}

impl Theorem1Report {
    pub fn condition2(&self) -> bool {
        self.local_max && self.apex
    }

    fn assemble(
        cap_law: Option<f64>,
        local_max: bool,
        apex: bool,
        dual_flat: bool,
        flat_residual: f64,
        sections: Option<usize>,
    ) -> Self {
        let cl = cap_law.is_some();
        let agree = cl == (local_max && apex) && cl == dual_flat;
        Theorem1Report {
            cap_law: cl,
            cap_law_delta: cap_law,
            local_max,
            apex,
            dual_flat,
            flat_residual,
            sections,
            agree,
        }
    }
}

/// Knobs for the equivalence check; the defaults match the rest of the
/// crate (720-direction grids, 16 sections, 1e-9 angle tolerance).
#[derive(Clone, Copy, Debug)]
pub struct Theorem1Config {
    pub search_delta: f64,
    pub tol: f64,
    pub grid: usize,
    pub sections: usize,
}

impl Default for Theorem1Config {
    fn default() -> Self {
        Theorem1Config {
            search_delta: 1.2,
            tol: ANGLE_EPS,
            grid: 720,
            sections: 16,
        }
    }
}

const LOCAL_MAX_FLOOR: f64 = 1e-3;
const RESIDUAL_GRID: usize = 256;

/// Deviation of the inverted graph over the sampled cap from the
/// hyperplane `{y : y·(−P) = 1/γ(P)}`.
pub fn plane_residual<const D: usize>(
    gamma: &ConvexIntegrand<D>,
    p: &UnitVec<D>,
    delta: f64,
    grid: usize,
) -> f64
where
    UnitVec<D>: CapSampling,
{
    let target = 1.0 / gamma.eval(p);
    UnitVec::cap_grid(p, delta, grid)
        .iter()
        .map(|q| {
            let inv = gamma.inv_graph_point(q).position();
            (inv.dot(&(-p.as_vector())) - target).abs()
        })
        .fold(0.0, f64::max)
}

fn flat_witness<const D: usize>(
    gamma: &ConvexIntegrand<D>,
    p: &UnitVec<D>,
    search_delta: f64,
    tol: f64,
) -> (Option<f64>, f64)
where
    UnitVec<D>: CapSampling,
{
    let scale = 1.0 / gamma.eval(p);
    let holds = |delta: f64| plane_residual(gamma, p, delta, RESIDUAL_GRID) <= tol * scale;
    if !holds(LOCAL_MAX_FLOOR) {
        return (None, plane_residual(gamma, p, LOCAL_MAX_FLOOR, RESIDUAL_GRID));
    }
    if holds(search_delta) {
        return (
            Some(search_delta),
            plane_residual(gamma, p, search_delta, RESIDUAL_GRID),
        );
    }
    let (mut lo, mut hi) = (LOCAL_MAX_FLOOR, search_delta);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (Some(lo), plane_residual(gamma, p, lo, RESIDUAL_GRID))
}

fn local_max_on_cap<const D: usize>(
    gamma: &ConvexIntegrand<D>,
    p: &UnitVec<D>,
    delta: f64,
    tol: f64,
) -> bool
where
    UnitVec<D>: CapSampling,
{
    let gp = gamma.eval(p);
    UnitVec::cap_grid(p, delta, RESIDUAL_GRID)
        .iter()
        .all(|q| gamma.eval(q) <= gp * (1.0 + tol))
}

fn theorem1_core<const D: usize>(
    gamma: &ConvexIntegrand<D>,
    p: &UnitVec<D>,
    cfg: &Theorem1Config,
    apex: bool,
    sections: Option<usize>,
) -> Theorem1Report
where
    UnitVec<D>: CapSampling,
{
    let cap_law = cap_law_witness(gamma, p, cfg.search_delta, cfg.tol);
    let check_delta = cap_law.unwrap_or(LOCAL_MAX_FLOOR);
    let local_max = local_max_on_cap(gamma, p, check_delta, cfg.tol);
    let (flat, flat_residual) = flat_witness(gamma, p, cfg.search_delta, cfg.tol);
    Theorem1Report::assemble(cap_law, local_max, apex, flat.is_some(), flat_residual, sections)
}

/// Three-way equivalence report for an S¹ integrand.
pub fn theorem1_report2(
    gamma: &ConvexIntegrand<2>,
    p: &UnitVec2,
    cfg: &Theorem1Config,
) -> Result<Theorem1Report> {
    let apex = detect_apex2(gamma, p, cfg.grid, 1e-6)?;
    Ok(theorem1_core(gamma, p, cfg, apex, None))
}

/// Three-way equivalence report for an S² integrand, sampling
/// `cfg.sections` planes through `p` for the apex component.
pub fn theorem1_report3(
    gamma: &ConvexIntegrand<3>,
    p: &UnitVec3,
    cfg: &Theorem1Config,
) -> Result<Theorem1Report> {
    let apex = detect_apex3(gamma, p, cfg.sections, cfg.grid, 1e-6)?;
    Ok(theorem1_core(gamma, p, cfg, apex, Some(cfg.sections)))
}

/// A detected flat patch of the dual-Wulff boundary: a run of inverted
/// graph points collinear within tolerance whose supporting line has its
/// perpendicular foot (the would-be ball center `M`) inside the run.
#[derive(Clone, Debug, serde::Serialize)]
pub struct FlatDisk {
    pub center: Vec<f64>,
    pub residual: f64,
    pub points: usize,
}

/// Scans the dual-Wulff boundary of an S¹ integrand for flat patches
/// whose affine span has normal parallel to the patch center.
pub fn corollary_flat_disk2(
    gamma: &ConvexIntegrand<2>,
    grid: usize,
    tol: f64,
) -> Result<(bool, Vec<FlatDisk>)> {
    let dual = build_dual_wulff(gamma, grid)?;
    let samples = dual.samples();
    let n = samples.len();
    let mut disks = Vec::new();
    let mut i = 0;
    let mut consumed = 0usize;
    while consumed < n {
        // grow the longest run starting at i that stays collinear
        let mut len = 2usize;
        let mut best: Option<(Vector2<f64>, f64)> = None;
        loop {
            let run: Vec<Vector2<f64>> = (0..len).map(|k| samples[(i + k) % n]).collect();
            match fit_line(&run, tol) {
                Some(fit) => {
                    best = Some(fit);
                    if len >= n {
                        break;
                    }
                    len += 1;
                }
                None => {
                    len -= 1;
                    break;
                }
            }
        }
        if len >= 3 {
            let (foot, residual) = best.expect("fitted run");
            let first = samples[i % n];
            let last = samples[(i + len - 1) % n];
            let dirv = last - first;
            let t = (foot - first).dot(&dirv) / dirv.norm_squared();
            if (0.0..=1.0).contains(&t) {
                disks.push(FlatDisk {
                    center: vec![foot.x, foot.y],
                    residual,
                    points: len,
                });
            }
        }
        i += len.max(1);
        consumed += len.max(1);
    }
    Ok((!disks.is_empty(), disks))
}

/// Total-least-squares line through a run; returns the perpendicular
/// foot of the origin on it when the max residual stays within the
/// scale-relative tolerance.
fn fit_line(run: &[Vector2<f64>], tol: f64) -> Option<(Vector2<f64>, f64)> {
    let k = run.len() as f64;
    let centroid: Vector2<f64> = run.iter().sum::<Vector2<f64>>() / k;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for p in run {
        let d = p - centroid;
        sxx += d.x * d.x;
        sxy += d.x * d.y;
        syy += d.y * d.y;
    }
    // smallest eigenvector of the scatter matrix = line normal
    let tr = sxx + syy;
    let det = sxx * syy - sxy * sxy;
    let lambda = tr / 2.0 - ((tr * tr / 4.0 - det).max(0.0)).sqrt();
    let normal = if sxy.abs() > 1e-30 {
        Vector2::new(lambda - syy, sxy).normalize()
    } else if sxx <= syy {
        Vector2::new(1.0, 0.0)
    } else {
        Vector2::new(0.0, 1.0)
    };
    let offset = normal.dot(&centroid);
    let scale = run.iter().map(|p| p.norm()).sum::<f64>() / k;
    let residual = run
        .iter()
        .map(|p| (normal.dot(p) - offset).abs())
        .fold(0.0, f64::max);
    if residual > tol * scale {
        return None;
    }
    Some((normal * offset, residual))
}

/// S² version of the flat-disk scan: fits planes to the inverted graph
/// over caps around sampled directions and keeps those whose normal is
/// parallel to the perpendicular foot.
pub fn corollary_flat_disk3(
    gamma: &ConvexIntegrand<3>,
    tol: f64,
) -> Result<(bool, Vec<FlatDisk>)> {
    let grid = crate::hull::icosphere(3);
    let delta = 0.12;
    let mut disks = Vec::new();
    for node in &grid.nodes {
        let q = UnitVec::try_new(*node).expect("grid node");
        // inverted-graph points over the cap of directions around −q
        let center = q.antipode();
        let pts: Vec<Vector3<f64>> = UnitVec3::cap_grid(&center, delta, 64)
            .iter()
            .map(|theta| {
                let p = gamma.inv_graph_point(theta).position();
                Vector3::new(p[0], p[1], p[2])
            })
            .collect();
        if let Some((foot, residual)) = fit_plane(&pts, tol) {
            // the perpendicular foot must land inside the sampled patch
            let aligned = foot.normalize().dot(q.as_vector()) > delta.cos();
            if aligned {
                disks.push(FlatDisk {
                    center: vec![foot.x, foot.y, foot.z],
                    residual,
                    points: pts.len(),
                });
            }
        }
    }
    Ok((!disks.is_empty(), disks))
}

fn fit_plane(pts: &[Vector3<f64>], tol: f64) -> Option<(Vector3<f64>, f64)> {
    let k = pts.len() as f64;
    let centroid: Vector3<f64> = pts.iter().sum::<Vector3<f64>>() / k;
    let mut scatter = nalgebra::Matrix3::<f64>::zeros();
    for p in pts {
        let d = p - centroid;
        scatter += d * d.transpose();
    }
    let eig = scatter.symmetric_eigen();
    let min_idx = eig.eigenvalues.imin();
    let normal: Vector3<f64> = eig.eigenvectors.column(min_idx).into();
    let offset = normal.dot(&centroid);
    let scale = pts.iter().map(|p| p.norm()).sum::<f64>() / k;
    let residual = pts
        .iter()
        .map(|p| (normal.dot(p) - offset).abs())
        .fold(0.0, f64::max);
    if residual > tol * scale {
        return None;
    }
    Some((normal * offset, residual))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrand::ConvexIntegrand;

    fn u2(x: f64, y: f64) -> UnitVec2 {
        UnitVec::normalize(Vector2::new(x, y)).unwrap()
    }

    fn square_support() -> ConvexIntegrand<2> {
        ConvexIntegrand::support(vec![
            SVector::<f64, 2>::new(1.0, 1.0),
            SVector::<f64, 2>::new(-1.0, 1.0),
            SVector::<f64, 2>::new(-1.0, -1.0),
            SVector::<f64, 2>::new(1.0, -1.0),
        ])
        .unwrap()
    }

    #[test]
    fn invert_point_formula_and_involution() {
        let x = Vector2::new(2.0, 0.0);
        let y = invert_point(&x).unwrap();
        assert!((y - Vector2::new(-0.5, 0.0)).norm() < 1e-15);
        let z = Vector2::new(0.0, 1.0);
        assert!((invert_point(&z).unwrap() - Vector2::new(0.0, -1.0)).norm() < 1e-15);
        assert!(invert_point(&Vector2::zeros()).is_err());

        for i in 0..1000 {
            let a = (i as f64) * 0.618;
            let r = 0.1 + 9.9 * ((i as f64 * 0.37).sin().abs());
            let x = Vector2::new(r * a.cos(), r * a.sin());
            let back = invert_point(&invert_point(&x).unwrap()).unwrap();
            assert!((back - x).norm() < 1e-12 * r.max(1.0));
        }
    }

    #[test]
    fn alpha_and_psi_examples() {
        let pole = UnitVec3::new_unchecked(0.0, 0.0, 1.0);
        let proj = alpha_n(&pole).unwrap();
        assert!((proj - Vector3::new(0.0, 0.0, 1.0)).norm() < 1e-15);

        let s = std::f64::consts::FRAC_1_SQRT_2;
        let p = UnitVec3::new_unchecked(s, 0.0, s);
        let proj = alpha_n(&p).unwrap();
        assert!((proj - Vector3::new(1.0, 0.0, 1.0)).norm() < 1e-12);

        // equator maps to the pole under the blow-up
        let eq = UnitVec3::new_unchecked(0.0, 1.0, 0.0);
        assert!(psi_n(&eq).unwrap().approx_eq(&pole, 1e-12));
        // and the worked example
        let blown = psi_n(&p).unwrap();
        assert!(blown.approx_eq(&UnitVec3::new_unchecked(-s, 0.0, s), 1e-12));
        assert!(psi_n(&pole).is_err());
        assert!(alpha_n(&eq).is_err());
    }

    #[test]
    fn psi_keeps_quarter_turn_distance() {
        for i in 0..1000 {
            let a = i as f64 * 0.7;
            let b = i as f64 * 0.41 + 0.2;
            let p = UnitVec3::new_unchecked(a.cos() * b.sin(), a.sin() * b.sin(), b.cos());
            if p.as_vector().z.abs() > 1.0 - 1e-9 {
                continue;
            }
            let q = psi_n(&p).unwrap();
            assert!((crate::sphere::sph_dist(&p, &q) - PI / 2.0).abs() < 1e-12);
            assert!(q.as_vector().z > 0.0);
        }
    }

    #[test]
    fn alpha_round_trip() {
        for i in 0..200 {
            let a = i as f64 * 1.3;
            let b = i as f64 * 0.29 + 0.1;
            let p = UnitVec3::new_unchecked(a.cos() * b.sin(), a.sin() * b.sin(), b.cos().abs() + 0.1);
            let plane = alpha_n(&p).unwrap();
            let back = alpha_n_inv(&plane).unwrap();
            assert!(back.approx_eq(&p, 1e-12));
        }
    }

    #[test]
    fn inversion_identity_residual_tiny() {
        assert!(inversion_identity_residual2(&Vector2::new(0.0, 1.0)).unwrap() < 1e-12);
        assert!(inversion_identity_residual2(&Vector2::new(2.0, 0.0)).unwrap() < 1e-12);
        assert!(inversion_identity_residual3(&Vector3::new(0.3, -1.2, 0.5)).unwrap() < 1e-12);
        assert!(inversion_identity_residual2(&Vector2::zeros()).is_err());
    }

    #[test]
    fn wulff_of_constant_is_disc() {
        let one = ConvexIntegrand::<2>::constant(1.0).unwrap();
        let w = build_wulff(&one, 720).unwrap();
        assert!((w.area() - PI).abs() < 1e-3);
        // support resamples to the integrand within O(1/N²)
        for k in 0..32 {
            let theta = UnitVec2::from_angle(TAU * k as f64 / 32.0);
            assert!((w.support(&theta) - 1.0).abs() < 1e-4);
        }
    }

    #[test]
    fn wulff_of_square_support() {
        let w = build_wulff(&square_support(), 360).unwrap();
        // vertices reach the four corners
        for corner in [
            Vector2::new(1.0, 1.0),
            Vector2::new(-1.0, 1.0),
            Vector2::new(-1.0, -1.0),
            Vector2::new(1.0, -1.0),
        ] {
            let closest = w
                .vertices()
                .iter()
                .map(|v| (v - corner).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(closest < 1e-3, "corner {corner:?} missing ({closest})");
        }
        assert!((w.area() - 4.0).abs() < 1e-3);
    }

    #[test]
    fn dual_wulff_of_square_is_diamond() {
        let dual = build_dual_wulff(&square_support(), 720).unwrap();
        for corner in [
            Vector2::new(1.0, 0.0),
            Vector2::new(0.0, 1.0),
            Vector2::new(-1.0, 0.0),
            Vector2::new(0.0, -1.0),
        ] {
            let closest = dual
                .vertices()
                .iter()
                .map(|v| (v - corner).norm())
                .fold(f64::INFINITY, f64::min);
            assert!(closest < 1e-9, "diamond corner {corner:?} missing");
        }
        // all inverted-graph samples on the hull boundary
        let verts = dual.vertices().to_vec();
        for s in dual.samples() {
            assert!(crate::hull::planar_depth(&verts, s) <= 1e-9);
        }
    }

    #[test]
    fn normal_cone_widths() {
        let w = build_wulff(&square_support(), 360).unwrap();
        let hit = w.ray_boundary_point(&u2(1.0, 1.0));
        let width = w.normal_cone_width_at(&hit).unwrap();
        assert!((width - PI / 2.0).abs() < 1e-6, "width {width}");

        let one = ConvexIntegrand::<2>::constant(1.0).unwrap();
        let disc = build_wulff(&one, 720).unwrap();
        let hit = disc.ray_boundary_point(&u2(1.0, 0.0));
        let width = disc.normal_cone_width_at(&hit).unwrap();
        assert!(width <= TAU / 720.0 + 1e-9, "width {width}");

        assert!(disc.normal_cone_width_at(&Vector2::new(3.0, 3.0)).is_err());
    }

    #[test]
    fn hexagon_cone_width() {
        let hexagon: Vec<SVector<f64, 2>> = (0..6)
            .map(|k| {
                let a = TAU * k as f64 / 6.0;
                SVector::<f64, 2>::new(a.cos(), a.sin())
            })
            .collect();
        let g = ConvexIntegrand::support(hexagon).unwrap();
        let w = build_wulff(&g, 720).unwrap();
        let hit = w.ray_boundary_point(&u2(1.0, 0.0));
        let width = w.normal_cone_width_at(&hit).unwrap();
        assert!((width - PI / 3.0).abs() < 1e-6, "width {width}");
    }

    #[test]
    fn apex_detection_flat_and_pointed() {
        assert!(detect_apex2(&square_support(), &u2(1.0, 1.0), 720, 1e-6).unwrap());
        // edge-midpoint direction is smooth
        assert!(!detect_apex2(&square_support(), &u2(1.0, 0.0), 720, 1e-6).unwrap());
        let one = ConvexIntegrand::<2>::constant(1.0).unwrap();
        assert!(!detect_apex2(&one, &u2(0.3, 0.8), 720, 1e-6).unwrap());
        // scale invariance
        let five = ConvexIntegrand::<2>::constant(5.0).unwrap();
        let p = u2(0.2, -0.9);
        let patched = five.patch_apex(p, 7.0).unwrap();
        let scaled = ConvexIntegrand::<2>::constant(15.0)
            .unwrap()
            .patch_apex(p, 21.0)
            .unwrap();
        assert_eq!(
            detect_apex2(&patched, &p, 720, 1e-6).unwrap(),
            detect_apex2(&scaled, &p, 720, 1e-6).unwrap()
        );
    }

    #[test]
    fn apex_detection_3d_patched() {
        let one = ConvexIntegrand::<3>::constant(1.0).unwrap();
        let p = UnitVec3::new_unchecked(0.3, -0.5, 0.81);
        let patched = one.patch_apex(p, 2f64.sqrt()).unwrap();
        assert!(detect_apex3(&patched, &p, 16, 720, 1e-6).unwrap());
        assert!(!detect_apex3(&one, &p, 16, 720, 1e-6).unwrap());
    }

    #[test]
    fn theorem1_patched_all_true() {
        let one = ConvexIntegrand::<2>::constant(1.0).unwrap();
        let p = u2(1.0, 0.0);
        let patched = one.patch_apex(p, 2f64.sqrt()).unwrap();
        let report = theorem1_report2(&patched, &p, &Theorem1Config::default()).unwrap();
        assert!(report.cap_law && report.condition2() && report.dual_flat);
        assert!(report.agree);
        let delta = report.cap_law_delta.unwrap();
        assert!((delta - PI / 4.0).abs() < 1e-3, "delta {delta}");
    }

    #[test]
    fn theorem1_smooth_all_false() {
        let one = ConvexIntegrand::<2>::constant(1.0).unwrap();
        let report = theorem1_report2(&one, &u2(0.6, 0.8), &Theorem1Config::default()).unwrap();
        assert!(!report.cap_law && !report.condition2() && !report.dual_flat);
        assert!(report.agree);
    }

    #[test]
    fn theorem1_square_corner_all_true() {
        let report =
            theorem1_report2(&square_support(), &u2(1.0, 1.0), &Theorem1Config::default()).unwrap();
        assert!(report.cap_law && report.condition2() && report.dual_flat);
        assert!(report.agree);
    }

    #[test]
    fn theorem1_vertex_without_local_max_agrees() {
        // a lopsided body: (1,0) is a hull vertex hit by the ray, but the
        // support in direction (1,0) is attained elsewhere, so γ is not
        // locally maximal; apex alone is true, yet all three conditions
        // fail together and the report still agrees
        let g = ConvexIntegrand::support(vec![
            SVector::<f64, 2>::new(1.0, 0.0),
            SVector::<f64, 2>::new(1.2, 3.0),
            SVector::<f64, 2>::new(-1.0, 0.5),
            SVector::<f64, 2>::new(-0.5, -4.0),
            SVector::<f64, 2>::new(0.8, -0.6),
        ])
        .unwrap();
        let p = u2(1.0, 0.0);
        let report = theorem1_report2(&g, &p, &Theorem1Config::default()).unwrap();
        assert!(report.apex);
        assert!(!report.local_max);
        assert!(!report.cap_law);
        assert!(!report.condition2());
        assert!(!report.dual_flat);
        assert!(report.agree);
    }

    #[test]
    fn flat_disk_corollary_planar() {
        let one = ConvexIntegrand::<2>::constant(1.0).unwrap();
        let p = u2(1.0, 0.0);
        let patched = one.patch_apex(p, 2f64.sqrt()).unwrap();
        let (found, disks) = corollary_flat_disk2(&patched, 720, 1e-8).unwrap();
        assert!(found);
        let m = Vector2::new(disks[0].center[0], disks[0].center[1]);
        let expected = -p.as_vector() / 2f64.sqrt();
        assert!((m - expected).norm() < 1e-3, "center {m:?}");

        let (smooth_found, _) = corollary_flat_disk2(&one, 720, 1e-8).unwrap();
        assert!(!smooth_found);

        let (square_found, disks) = corollary_flat_disk2(&square_support(), 720, 1e-8).unwrap();
        assert!(square_found);
        assert_eq!(disks.len(), 4);
        for d in &disks {
            // diamond edge lines sit at distance 1/√2 from the origin
            let m = Vector2::new(d.center[0], d.center[1]);
            assert!((m.norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-3);
        }
    }

    #[test]
    fn flat_disk_corollary_spherical() {
        let one = ConvexIntegrand::<3>::constant(1.0).unwrap();
        let p = UnitVec3::new_unchecked(0.1, 0.2, 0.97);
        let patched = one.patch_apex(p, 2f64.sqrt()).unwrap();
        let (found, disks) = corollary_flat_disk3(&patched, 1e-8).unwrap();
        assert!(found);
        let best = disks
            .iter()
            .min_by(|a, b| a.residual.total_cmp(&b.residual))
            .unwrap();
        let m = Vector3::new(best.center[0], best.center[1], best.center[2]);
        let expected = -p.as_vector() / 2f64.sqrt();
        assert!((m - expected).norm() < 1e-2, "center {m:?}");

        let (smooth_found, _) = corollary_flat_disk3(&one, 1e-8).unwrap();
        assert!(!smooth_found);
    }
}
