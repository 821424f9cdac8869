//! Convex bodies on S² represented by their boundary: a closed
//! counterclockwise chain of small-circle arcs, great-circle segments,
//! and vertices carrying their extreme support pair.
//!
//! Storing boundary features (rather than point clouds) makes polar
//! duality exact and feature-preserving: arcs of radius ρ dualize to arcs
//! of radius π/2 − ρ about the same center, great segments collapse to
//! vertices at their pole, and vertices open up into great segments
//! between their extreme supports. Membership and distance queries run
//! through the constraint view — one closed-form support-arc constraint
//! per feature — so no sampling error enters on the inner side.

use crate::error::{Error, Result};
use crate::hull::planar_hull_indices;
use crate::sphere::{chord_angle, sph_dist, UnitVec, UnitVec3};
use crate::tol::{acos_clamped, ANGLE_EPS, HEMI_MARGIN};
use nalgebra::{Vector2, Vector3};
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI, TAU};

/// Arcs within SEG_TOL of radius π/2 count as great segments.
const SEG_TOL: f64 = 1e-9;

/// One boundary feature. Arcs and segments are traversed from `from` to
/// `to` counterclockwise about `+center` / `+pole`; `from == to` encodes
/// a full circle.
#[derive(Clone, Debug)]
pub enum ArcFeature {
    /// Small-circle arc of spherical radius `rho ∈ (0, π/2)`.
    Arc {
        center: UnitVec3,
        rho: f64,
        from: UnitVec3,
        to: UnitVec3,
    },
    /// Great-circle segment on `∂H(pole)`.
    Segment {
        pole: UnitVec3,
        from: UnitVec3,
        to: UnitVec3,
    },
    /// Corner point with its extreme supporting-hemisphere centers, in
    /// boundary order (incoming side first).
    Vertex {
        at: UnitVec3,
        in_support: UnitVec3,
        out_support: UnitVec3,
    },
}

impl ArcFeature {
    pub fn start(&self) -> UnitVec3 {
        match self {
            ArcFeature::Arc { from, .. } | ArcFeature::Segment { from, .. } => *from,
            ArcFeature::Vertex { at, .. } => *at,
        }
    }

    pub fn end(&self) -> UnitVec3 {
        match self {
            ArcFeature::Arc { to, .. } | ArcFeature::Segment { to, .. } => *to,
            ArcFeature::Vertex { at, .. } => *at,
        }
    }

    fn geom(&self) -> Option<ArcGeom> {
        match self {
            ArcFeature::Arc {
                center,
                rho,
                from,
                to,
            } => Some(ArcGeom::new(*center, *rho, from, to)),
            ArcFeature::Segment { pole, from, to } => {
                Some(ArcGeom::new(*pole, FRAC_PI_2, from, to))
            }
            ArcFeature::Vertex { .. } => None,
        }
    }

    /// The feature's supporting-hemisphere centers: the dual feature in
    /// geometric form. Arcs yield the shrunk concentric arc, segments a
    /// single point (their pole), vertices the great arc from one
    /// extreme support to the other.
    fn support_geom(&self) -> SupportSet {
        match self {
            ArcFeature::Arc {
                center,
                rho,
                from,
                to,
            } => {
                let w_from = support_center(center, *rho, from);
                let w_to = support_center(center, *rho, to);
                SupportSet::Arc(ArcGeom::new(*center, FRAC_PI_2 - rho, &w_from, &w_to))
            }
            ArcFeature::Segment { pole, .. } => SupportSet::Point(*pole),
            ArcFeature::Vertex {
                at,
                in_support,
                out_support,
            } => SupportSet::Arc(ArcGeom::new(*at, FRAC_PI_2, in_support, out_support)),
        }
    }
}

/// Supporting-hemisphere center of the circle `(center, rho)` at the
/// boundary point `x`: the point at distance π/2 from `x` on the great
/// circle through `center` and `x`, past the center.
pub(crate) fn support_center(center: &UnitVec3, rho: f64, x: &UnitVec3) -> UnitVec3 {
    let s = rho.sin();
    UnitVec::normalize((center.as_vector() - rho.cos() * x.as_vector()) / s)
        .expect("support center")
}

enum SupportSet {
    Point(UnitVec3),
    Arc(ArcGeom),
}

impl SupportSet {
    fn min_dot(&self, q: &UnitVec3) -> f64 {
        match self {
            SupportSet::Point(p) => p.dot(q),
            SupportSet::Arc(g) => g.dot_range(q).0,
        }
    }
}

/// Circle-arc geometry in an orthonormal frame at the center:
/// `x(s) = cos ρ·c + sin ρ·(cos s·e1 + sin s·e2)` for
/// `s ∈ [s0, s0 + span]`, `span ∈ (0, 2π]`.
#[derive(Clone, Copy, Debug)]
struct ArcGeom {
    center: Vector3<f64>,
    rho: f64,
    e1: Vector3<f64>,
    e2: Vector3<f64>,
    s0: f64,
    span: f64,
}

impl ArcGeom {
    fn new(center: UnitVec3, rho: f64, from: &UnitVec3, to: &UnitVec3) -> Self {
        let (e1, e2) = center.tangent_basis();
        let c = *center.as_vector();
        let ang = |x: &UnitVec3| -> f64 { x.as_vector().dot(&e2).atan2(x.as_vector().dot(&e1)) };
        let s0 = ang(from);
        let span = if from.approx_eq(to, 1e-12) {
            TAU
        } else {
            (ang(to) - s0).rem_euclid(TAU)
        };
        ArcGeom {
            center: c,
            rho,
            e1,
            e2,
            s0,
            span,
        }
    }

    fn point_at(&self, s: f64) -> UnitVec3 {
        let v = self.center * self.rho.cos()
            + (self.e1 * s.cos() + self.e2 * s.sin()) * self.rho.sin();
        UnitVec::normalize(v).expect("arc point")
    }

    fn endpoints(&self) -> (UnitVec3, UnitVec3) {
        (self.point_at(self.s0), self.point_at(self.s0 + self.span))
    }

    /// Parameters where `s ↦ q·x(s)` can attain its extrema over the
    /// span: the endpoints plus interior critical points.
    fn critical_params(&self, q: &Vector3<f64>) -> Vec<f64> {
        let a = self.rho.sin() * q.dot(&self.e1);
        let b = self.rho.sin() * q.dot(&self.e2);
        let mut out = vec![self.s0, self.s0 + self.span];
        if a.hypot(b) > 1e-15 {
            let phi = b.atan2(a);
            for cand in [phi, phi + PI] {
                let offset = (cand - self.s0).rem_euclid(TAU);
                if offset <= self.span {
                    out.push(self.s0 + offset);
                }
            }
        }
        out
    }

    /// Exact (min, max) of `q·x(s)` over the arc.
    fn dot_range(&self, q: &UnitVec3) -> (f64, f64) {
        let qv = q.as_vector();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for s in self.critical_params(qv) {
            let d = qv.dot(self.point_at(s).as_vector());
            lo = lo.min(d);
            hi = hi.max(d);
        }
        (lo, hi)
    }

    /// Distance from `q` to the arc point set, chord-precise near zero.
    fn nearest_distance(&self, q: &UnitVec3) -> f64 {
        let qv = q.as_vector();
        let mut best_s = self.s0;
        let mut best = f64::NEG_INFINITY;
        for s in self.critical_params(qv) {
            let d = qv.dot(self.point_at(s).as_vector());
            if d > best {
                best = d;
                best_s = s;
            }
        }
        chord_angle(q, &self.point_at(best_s))
    }

    /// Unit tangent in travel direction at parameter `s`.
    fn tangent_at(&self, s: f64) -> Vector3<f64> {
        let x = self.point_at(s);
        self.center.cross(x.as_vector()).normalize()
    }
}

/// The supporting hemispheres of a body at one boundary point.
#[derive(Clone, Debug)]
pub enum SupportAt {
    /// Smooth boundary point: the unique support center.
    Unique(UnitVec3),
    /// Vertex: the extreme pair, in boundary order.
    Pair(UnitVec3, UnitVec3),
}

/// Widths of a body over its supporting hemispheres.
#[derive(Clone, Debug, Serialize)]
pub struct WidthReport {
    /// (support center, width) pairs over the candidate scan
    pub entries: Vec<([f64; 3], f64)>,
    /// thickness Δ: the minimal width
    pub min: f64,
    pub max: f64,
    /// support center achieving the minimum and its farthest co-support
    pub argmin_pair: ([f64; 3], [f64; 3]),
}

/// A spherical convex body bounded by a closed feature chain, with an
/// interior witness certifying hemisphericity.
#[derive(Clone, Debug)]
pub struct SphericalBody {
    features: Vec<ArcFeature>,
    witness: UnitVec3,
}

impl SphericalBody {
    /// Validates and assembles a body: the chain must close, arc
    /// endpoints must sit on their circles, every boundary sample must
    /// satisfy every feature's support constraints, and everything must
    /// fit in the witness cap of radius π/2 − 1e-6.
    pub fn new(features: Vec<ArcFeature>, witness: UnitVec3) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::DegenerateHull { need: 1 });
        }
        for (i, f) in features.iter().enumerate() {
            let next = &features[(i + 1) % features.len()];
            let gap = chord_angle(&f.end(), &next.start());
            if gap > ANGLE_EPS {
                return Err(Error::OpenChain { gap });
            }
            match f {
                ArcFeature::Arc {
                    center,
                    rho,
                    from,
                    to,
                } => {
                    if !(*rho > 0.0 && *rho < FRAC_PI_2 - SEG_TOL) {
                        return Err(Error::InvalidCapRadius(*rho));
                    }
                    for x in [from, to] {
                        let dist = chord_angle(center, x);
                        if (dist - rho).abs() > ANGLE_EPS {
                            return Err(Error::ArcRadiusMismatch { dist, rho: *rho });
                        }
                    }
                }
                ArcFeature::Segment { pole, from, to } => {
                    for x in [from, to] {
                        let dist = chord_angle(pole, x);
                        if (dist - FRAC_PI_2).abs() > ANGLE_EPS {
                            return Err(Error::ArcRadiusMismatch {
                                dist,
                                rho: FRAC_PI_2,
                            });
                        }
                    }
                }
                ArcFeature::Vertex {
                    at,
                    in_support,
                    out_support,
                } => {
                    for w in [in_support, out_support] {
                        if at.dot(w).abs() > 1e-7 {
                            return Err(Error::ArcRadiusMismatch {
                                dist: sph_dist(at, w),
                                rho: FRAC_PI_2,
                            });
                        }
                    }
                }
            }
        }
        let body = SphericalBody { features, witness };
        body.check_hemisphericity()?;
        body.check_convexity()?;
        Ok(body)
    }

    fn check_hemisphericity(&self) -> Result<()> {
        let limit = (FRAC_PI_2 - HEMI_MARGIN).cos();
        for p in self.boundary_samples(32) {
            if self.witness.dot(&p) < limit {
                return Err(Error::NonHemispherical);
            }
        }
        Ok(())
    }

    fn check_convexity(&self) -> Result<()> {
        let per = (4096 / self.features.len().max(1)).clamp(4, 64);
        let samples = self.boundary_samples(per);
        let mut worst = 0.0f64;
        for q in &samples {
            for f in &self.features {
                let slack = f.support_geom().min_dot(q);
                worst = worst.min(slack);
            }
        }
        if worst < -ANGLE_EPS {
            return Err(Error::NotConvexBody { depth: -worst });
        }
        if !self.contains(&self.witness, 0.0) {
            return Err(Error::NonHemispherical);
        }
        Ok(())
    }

    /// Spherical cap as a body: one full-circle arc.
    pub fn cap(center: UnitVec3, rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho < FRAC_PI_2) {
            return Err(Error::InvalidCapRadius(rho));
        }
        let (e1, _) = center.tangent_basis();
        let x0 = UnitVec::normalize(center.as_vector() * rho.cos() + e1 * rho.sin())?;
        SphericalBody::new(
            vec![ArcFeature::Arc {
                center,
                rho,
                from: x0,
                to: x0,
            }],
            center,
        )
    }

    pub fn features(&self) -> &[ArcFeature] {
        &self.features
    }

    pub fn witness(&self) -> UnitVec3 {
        self.witness
    }

    /// Corner points of the chain, in boundary order.
    pub fn vertices(&self) -> Vec<UnitVec3> {
        self.features
            .iter()
            .filter_map(|f| match f {
                ArcFeature::Vertex { at, .. } => Some(*at),
                _ => None,
            })
            .collect()
    }

    /// Membership through the constraint view: `q` lies in the body iff
    /// it is inside every feature's supporting hemispheres.
    pub fn contains(&self, q: &UnitVec3, tol: f64) -> bool {
        self.features
            .iter()
            .all(|f| f.support_geom().min_dot(q) >= -tol)
    }

    /// Distance from `q` to the boundary point set, chord-precise near
    /// zero.
    pub fn distance_to_boundary(&self, q: &UnitVec3) -> f64 {
        self.features
            .iter()
            .map(|f| match f.geom() {
                Some(g) => g.nearest_distance(q),
                None => chord_angle(q, &f.start()),
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance from `q` to the body: zero inside, boundary distance
    /// outside.
    pub fn distance_to_body(&self, q: &UnitVec3) -> f64 {
        if self.contains(q, ANGLE_EPS) {
            0.0
        } else {
            self.distance_to_boundary(q)
        }
    }

    /// `per_feature` boundary points per arc feature at parameters
    /// `s0 + span·j/k`. Doubling `k` refines each sample set in place,
    /// so maxima over samples grow monotonically under refinement.
    pub fn boundary_samples(&self, per_feature: usize) -> Vec<UnitVec3> {
        let mut out = Vec::new();
        for f in &self.features {
            if let Some(g) = f.geom() {
                for j in 0..per_feature {
                    out.push(g.point_at(g.s0 + g.span * j as f64 / per_feature as f64));
                }
            }
        }
        out
    }

    /// Feature-exact polar dual: the chain of the polar body in the same
    /// traversal order.
    pub fn polar_dual(&self) -> Result<SphericalBody> {
        let mut dual = Vec::with_capacity(self.features.len());
        for f in &self.features {
            dual.push(match f {
                ArcFeature::Arc {
                    center,
                    rho,
                    from,
                    to,
                } => ArcFeature::Arc {
                    center: *center,
                    rho: FRAC_PI_2 - rho,
                    from: support_center(center, *rho, from),
                    to: support_center(center, *rho, to),
                },
                ArcFeature::Segment { pole, from, to } => ArcFeature::Vertex {
                    at: *pole,
                    in_support: *from,
                    out_support: *to,
                },
                ArcFeature::Vertex {
                    at,
                    in_support,
                    out_support,
                } => ArcFeature::Segment {
                    pole: *at,
                    from: *in_support,
                    to: *out_support,
                },
            });
        }
        SphericalBody::new(dual, self.witness)
    }

    /// Supporting hemispheres at a boundary point: the extreme pair at a
    /// vertex, the unique center elsewhere.
    pub fn supporting_hemispheres(&self, p: &UnitVec3) -> Result<SupportAt> {
        for f in &self.features {
            if let ArcFeature::Vertex {
                at,
                in_support,
                out_support,
            } = f
            {
                if at.approx_eq(p, ANGLE_EPS) {
                    return Ok(SupportAt::Pair(*in_support, *out_support));
                }
            }
        }
        for f in &self.features {
            let Some(g) = f.geom() else { continue };
            if g.nearest_distance(p) <= ANGLE_EPS {
                return Ok(SupportAt::Unique(match f {
                    ArcFeature::Arc { center, rho, .. } => support_center(center, *rho, p),
                    ArcFeature::Segment { pole, .. } => *pole,
                    ArcFeature::Vertex { .. } => unreachable!(),
                }));
            }
        }
        Err(Error::NotOnBoundary)
    }

    /// Width with respect to the supporting hemisphere centered at `p`:
    /// the minimal lune thickness over co-supporting hemispheres,
    /// `π − max{|pq| : q ∈ ∂C°}`.
    pub fn width_wrt(&self, p: &UnitVec3) -> Result<f64> {
        let dual = self.polar_dual()?;
        let slack = dual.distance_to_boundary(p);
        if slack > 1e-7 {
            return Err(Error::NotSupporting { slack });
        }
        Ok(PI - dual.max_boundary_distance(p))
    }

    /// Largest distance from `p` to the boundary, feature-exact.
    fn max_boundary_distance(&self, p: &UnitVec3) -> f64 {
        self.features
            .iter()
            .map(|f| match f.geom() {
                Some(g) => acos_clamped(g.dot_range(p).0),
                None => sph_dist(p, &f.start()),
            })
            .fold(0.0, f64::max)
    }

    /// Width scan over the support set ∂C°: candidates are the dual
    /// vertices, dual arc endpoints, the per-pair interior extremizers
    /// of the boundary-distance functional, and a uniform safety scan
    /// along every dual arc.
    pub fn thickness(&self) -> Result<WidthReport> {
        let dual = self.polar_dual()?;
        let mut targets: Vec<Vector3<f64>> = Vec::new();
        for f in dual.features() {
            match f.geom() {
                Some(g) => {
                    targets.push(g.center);
                    let (a, b) = g.endpoints();
                    targets.push(*a.as_vector());
                    targets.push(*b.as_vector());
                }
                None => targets.push(*f.start().as_vector()),
            }
        }
        let mut candidates: Vec<UnitVec3> = Vec::new();
        for f in dual.features() {
            match f.geom() {
                Some(g) => {
                    for z in &targets {
                        for s in g.critical_params(z) {
                            candidates.push(g.point_at(s));
                        }
                    }
                    for j in 0..64 {
                        candidates.push(g.point_at(g.s0 + g.span * j as f64 / 64.0));
                    }
                }
                None => candidates.push(f.start()),
            }
        }

        let mut entries = Vec::with_capacity(candidates.len());
        let mut min = f64::INFINITY;
        let mut max = f64::NEG_INFINITY;
        let mut argmin = ([0.0; 3], [0.0; 3]);
        for p in &candidates {
            let width = PI - dual.max_boundary_distance(p);
            let pv = *p.as_vector();
            entries.push(([pv.x, pv.y, pv.z], width));
            if width < min {
                min = width;
                let far = dual.farthest_boundary_point(p);
                let fv = far.as_vector();
                argmin = ([pv.x, pv.y, pv.z], [fv.x, fv.y, fv.z]);
            }
            max = max.max(width);
        }
        Ok(WidthReport {
            entries,
            min,
            max,
            argmin_pair: argmin,
        })
    }

    fn farthest_boundary_point(&self, p: &UnitVec3) -> UnitVec3 {
        let mut best = self.features[0].start();
        let mut best_dot = f64::INFINITY;
        for f in &self.features {
            match f.geom() {
                Some(g) => {
                    for s in g.critical_params(p.as_vector()) {
                        let x = g.point_at(s);
                        let d = x.dot(p);
                        if d < best_dot {
                            best_dot = d;
                            best = x;
                        }
                    }
                }
                None => {
                    let d = f.start().dot(p);
                    if d < best_dot {
                        best_dot = d;
                        best = f.start();
                    }
                }
            }
        }
        best
    }

    /// Constant-width test: all widths over the support set agree within
    /// `tol`. Returns the thickness Δ as the width value.
    pub fn is_constant_width(&self, tol: f64) -> Result<(bool, f64)> {
        let report = self.thickness()?;
        Ok((report.max - report.min <= tol, report.min))
    }

    /// Interior vertex angle and extreme-support distance at a vertex;
    /// by the vertex identity their sum is π. The angle is measured from
    /// the actual boundary tangents, independently of the stored pair.
    pub fn vertex_angle_identity(&self, v: &UnitVec3) -> Result<(f64, f64)> {
        let n = self.features.len();
        for (i, f) in self.features.iter().enumerate() {
            let ArcFeature::Vertex {
                at,
                in_support,
                out_support,
            } = f
            else {
                continue;
            };
            if !at.approx_eq(v, ANGLE_EPS) {
                continue;
            }
            let prev = self.features[(i + n - 1) % n]
                .geom()
                .ok_or(Error::SmoothPoint)?;
            let next = self.features[(i + 1) % n].geom().ok_or(Error::SmoothPoint)?;
            let t_in = prev.tangent_at(prev.s0 + prev.span);
            let t_out = next.tangent_at(next.s0);
            let exterior = acos_clamped(t_in.dot(&t_out));
            let angle = PI - exterior;
            return Ok((angle, sph_dist(in_support, out_support)));
        }
        Err(Error::SmoothPoint)
    }

    /// A cap contained in both the body and its polar dual, centered at
    /// the witness: radius `min(inradius, π/2 − circumradius)`, verified
    /// by sampling 200 cap points against both constraint views.
    pub fn interior_cap_witness(&self) -> Result<(UnitVec3, f64)> {
        let p = self.witness;
        let inradius = self.distance_to_boundary(&p);
        let circumradius = self.max_boundary_distance(&p);
        let delta = inradius.min(FRAC_PI_2 - circumradius);
        if delta <= 0.0 {
            return Err(Error::WitnessVerification {
                place: "degenerate cap radius",
            });
        }
        let dual = self.polar_dual()?;
        let (e1, e2) = p.tangent_basis();
        for k in 0..200 {
            let ang = TAU * k as f64 / 200.0;
            let r = delta * (0.999 - 0.5 * (k % 2) as f64);
            let q = UnitVec::normalize(
                p.as_vector() * r.cos() + (e1 * ang.cos() + e2 * ang.sin()) * r.sin(),
            )?;
            if !self.contains(&q, ANGLE_EPS) {
                return Err(Error::WitnessVerification { place: "body" });
            }
            if !dual.contains(&q, ANGLE_EPS) {
                return Err(Error::WitnessVerification { place: "polar dual" });
            }
        }
        Ok((p, delta))
    }
}

/// Spherical convex hull of a hemispherical point set: a spherical
/// polygon (great segments and vertices) built through the gnomonic
/// projection about the normalized point mean.
pub fn s_conv(points: &[UnitVec3]) -> Result<SphericalBody> {
    if points.len() < 3 {
        return Err(Error::DegenerateHull { need: 3 });
    }
    let mean: Vector3<f64> = points.iter().map(|p| *p.as_vector()).sum();
    let witness = UnitVec::normalize(mean).map_err(|_| Error::NonHemispherical)?;
    let limit = (FRAC_PI_2 - HEMI_MARGIN).cos();
    if points.iter().any(|p| p.dot(&witness) < limit) {
        return Err(Error::NonHemispherical);
    }
    let (e1, e2) = witness.tangent_basis();
    let plane: Vec<Vector2<f64>> = points
        .iter()
        .map(|p| {
            let w = p.dot(&witness);
            Vector2::new(p.as_vector().dot(&e1) / w, p.as_vector().dot(&e2) / w)
        })
        .collect();
    let hull = planar_hull_indices(&plane)?;
    let verts: Vec<UnitVec3> = hull.iter().map(|&i| points[i]).collect();
    let k = verts.len();
    let pole = |a: &UnitVec3, b: &UnitVec3| -> Result<UnitVec3> { UnitVec::normalize(a.cross(b)) };
    let mut features = Vec::with_capacity(2 * k);
    for j in 0..k {
        let prev = &verts[(j + k - 1) % k];
        let here = &verts[j];
        let next = &verts[(j + 1) % k];
        features.push(ArcFeature::Vertex {
            at: *here,
            in_support: pole(prev, here)?,
            out_support: pole(here, next)?,
        });
        features.push(ArcFeature::Segment {
            pole: pole(here, next)?,
            from: *here,
            to: *next,
        });
    }
    SphericalBody::new(features, witness)
}

/// JSON form of a boundary feature.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum FeatureSpec {
    #[serde(rename = "arc")]
    Arc {
        center: [f64; 3],
        rho: f64,
        from: [f64; 3],
        to: [f64; 3],
    },
    #[serde(rename = "segment")]
    Segment {
        pole: [f64; 3],
        from: [f64; 3],
        to: [f64; 3],
    },
    #[serde(rename = "vertex")]
    Vertex {
        at: [f64; 3],
        normals: [[f64; 3]; 2],
    },
}

/// JSON description of a spherical body.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BodySpec {
    pub features: Vec<FeatureSpec>,
    pub witness: [f64; 3],
}

fn uv(a: &[f64; 3]) -> Result<UnitVec3> {
    UnitVec::try_new(Vector3::new(a[0], a[1], a[2]))
}

fn arr(u: &UnitVec3) -> [f64; 3] {
    let v = u.as_vector();
    [v.x, v.y, v.z]
}

impl BodySpec {
    pub fn parse(&self) -> Result<SphericalBody> {
        let mut features = Vec::with_capacity(self.features.len());
        for f in &self.features {
            features.push(match f {
                FeatureSpec::Arc {
                    center,
                    rho,
                    from,
                    to,
                } => ArcFeature::Arc {
                    center: uv(center)?,
                    rho: *rho,
                    from: uv(from)?,
                    to: uv(to)?,
                },
                FeatureSpec::Segment { pole, from, to } => ArcFeature::Segment {
                    pole: uv(pole)?,
                    from: uv(from)?,
                    to: uv(to)?,
                },
                FeatureSpec::Vertex { at, normals } => ArcFeature::Vertex {
                    at: uv(at)?,
                    in_support: uv(&normals[0])?,
                    out_support: uv(&normals[1])?,
                },
            });
        }
        SphericalBody::new(features, uv(&self.witness)?)
    }

    pub fn from_body(body: &SphericalBody) -> Self {
        let features = body
            .features()
            .iter()
            .map(|f| match f {
                ArcFeature::Arc {
                    center,
                    rho,
                    from,
                    to,
                } => FeatureSpec::Arc {
                    center: arr(center),
                    rho: *rho,
                    from: arr(from),
                    to: arr(to),
                },
                ArcFeature::Segment { pole, from, to } => FeatureSpec::Segment {
                    pole: arr(pole),
                    from: arr(from),
                    to: arr(to),
                },
                ArcFeature::Vertex {
                    at,
                    in_support,
                    out_support,
                } => FeatureSpec::Vertex {
                    at: arr(at),
                    normals: [arr(in_support), arr(out_support)],
                },
            })
            .collect();
        BodySpec {
            features,
            witness: arr(&body.witness()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hull::icosphere;

    fn u3(x: f64, y: f64, z: f64) -> UnitVec3 {
        UnitVec::normalize(Vector3::new(x, y, z)).unwrap()
    }

    fn orthant() -> SphericalBody {
        s_conv(&[u3(1.0, 0.0, 0.0), u3(0.0, 1.0, 0.0), u3(0.0, 0.0, 1.0)]).unwrap()
    }

    #[test]
    fn cap_body_roundtrip() {
        let c = u3(0.2, -0.3, 0.93);
        let cap = SphericalBody::cap(c, 0.7).unwrap();
        assert!(cap.contains(&c, 0.0));
        let (e1, _) = c.tangent_basis();
        let q = UnitVec::normalize(c.as_vector() * 0.69f64.cos() + e1 * 0.69f64.sin()).unwrap();
        assert!(cap.contains(&q, 1e-9));
        let outside = UnitVec::normalize(c.as_vector() * 0.8f64.cos() + e1 * 0.8f64.sin()).unwrap();
        assert!(!cap.contains(&outside, 1e-9));
        assert!((cap.distance_to_body(&outside) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn orthant_triangle_structure() {
        let tri = orthant();
        assert_eq!(tri.vertices().len(), 3);
        assert_eq!(tri.features().len(), 6);
        assert!(tri.contains(&u3(1.0, 1.0, 1.0), 1e-12));
        assert!(tri.contains(&u3(1.0, 0.0, 0.0), 1e-9));
        assert!(!tri.contains(&u3(-0.1, 0.5, 0.5), 1e-9));
    }

    #[test]
    fn s_conv_idempotent_and_contains_inputs() {
        let center = u3(0.3, 0.4, 0.87);
        let (e1, e2) = center.tangent_basis();
        let pts: Vec<UnitVec3> = (0..100)
            .map(|i| {
                let a = i as f64 * 2.399963; // golden angle
                let r = 0.6 * ((i as f64 + 1.0) / 100.0).sqrt();
                UnitVec::normalize(
                    center.as_vector() * r.cos() + (e1 * a.cos() + e2 * a.sin()) * r.sin(),
                )
                .unwrap()
            })
            .collect();
        let hull = s_conv(&pts).unwrap();
        for p in &pts {
            assert!(hull.contains(p, 1e-9));
        }
        let rehull = s_conv(&hull.vertices()).unwrap();
        assert_eq!(rehull.vertices().len(), hull.vertices().len());
        for (a, b) in rehull.vertices().iter().zip(hull.vertices()) {
            assert!(a.approx_eq(&b, 1e-9));
        }
    }

    #[test]
    fn s_conv_rejects_non_hemispherical() {
        assert!(matches!(
            s_conv(&[
                u3(1.0, 0.0, 0.0),
                u3(-1.0, 0.1, 0.0),
                u3(0.0, 0.0, 1.0),
                u3(0.1, -1.0, 0.0),
            ]),
            Err(Error::NonHemispherical)
        ));
    }

    #[test]
    fn polar_dual_of_cap_is_shrunk_cap() {
        let c = u3(0.1, 0.5, 0.86);
        let cap = SphericalBody::cap(c, 0.6).unwrap();
        let dual = cap.polar_dual().unwrap();
        match dual.features() {
            [ArcFeature::Arc { center, rho, .. }] => {
                assert!(center.approx_eq(&c, 1e-12));
                assert!((rho - (FRAC_PI_2 - 0.6)).abs() < 1e-12);
            }
            other => panic!("unexpected dual features {other:?}"),
        }
        // dense hemisphere-intersection oracle: q ∈ C° iff q·p ≥ 0 for
        // every boundary point p of C (checked away from the rim)
        let samples = cap.boundary_samples(512);
        for node in &icosphere(2).nodes {
            let q = UnitVec::try_new(*node).unwrap();
            let rim = (sph_dist(&q, &c) - (FRAC_PI_2 - 0.6)).abs();
            if rim < 0.02 {
                continue;
            }
            let oracle = samples.iter().all(|p| q.dot(p) >= -1e-6);
            assert_eq!(dual.contains(&q, 1e-9), oracle, "disagreement at {q:?}");
        }
    }

    #[test]
    fn orthant_is_self_dual() {
        let tri = orthant();
        let dual = tri.polar_dual().unwrap();
        for v in dual.vertices() {
            let closest = tri
                .vertices()
                .iter()
                .map(|w| sph_dist(&v, w))
                .fold(f64::INFINITY, f64::min);
            assert!(closest < 1e-12);
        }
        assert_eq!(dual.features().len(), 6);
    }

    #[test]
    fn double_polar_is_identity() {
        let tri = orthant();
        let back = tri.polar_dual().unwrap().polar_dual().unwrap();
        for (f, g) in tri.features().iter().zip(back.features()) {
            assert!(f.start().approx_eq(&g.start(), 1e-12));
            assert!(f.end().approx_eq(&g.end(), 1e-12));
        }

        let cap = SphericalBody::cap(u3(0.0, 0.0, 1.0), 0.4).unwrap();
        let back = cap.polar_dual().unwrap().polar_dual().unwrap();
        match (cap.features(), back.features()) {
            ([ArcFeature::Arc { rho: r1, .. }], [ArcFeature::Arc { rho: r2, .. }]) => {
                assert!((r1 - r2).abs() < 1e-15);
            }
            _ => panic!("cap structure lost"),
        }
    }

    #[test]
    fn polar_inclusion_reversal_on_nested_caps() {
        let c = u3(0.0, 0.3, 0.95);
        let small = SphericalBody::cap(c, 0.4).unwrap();
        let large = SphericalBody::cap(c, 0.9).unwrap();
        let ds = small.polar_dual().unwrap();
        let dl = large.polar_dual().unwrap();
        // X ⊆ Y ⇒ Y° ⊆ X°
        for q in dl.boundary_samples(128) {
            assert!(ds.contains(&q, 1e-9));
        }
    }

    #[test]
    fn supporting_hemispheres_cases() {
        let tri = orthant();
        let e3 = u3(0.0, 0.0, 1.0);
        match tri.supporting_hemispheres(&e3).unwrap() {
            SupportAt::Pair(q, r) => {
                let pair = [q, r];
                assert!(pair.iter().any(|w| w.approx_eq(&u3(1.0, 0.0, 0.0), 1e-9)));
                assert!(pair.iter().any(|w| w.approx_eq(&u3(0.0, 1.0, 0.0), 1e-9)));
            }
            other => panic!("expected pair, got {other:?}"),
        }
        // great-segment interior point supports at the segment pole
        let mid = u3(1.0, 1.0, 0.0);
        match tri.supporting_hemispheres(&mid).unwrap() {
            SupportAt::Unique(w) => assert!(w.approx_eq(&e3, 1e-9)),
            other => panic!("expected unique, got {other:?}"),
        }

        let c = u3(0.2, 0.2, 0.96);
        let cap = SphericalBody::cap(c, 0.5).unwrap();
        let p = cap.boundary_samples(8)[3];
        match cap.supporting_hemispheres(&p).unwrap() {
            SupportAt::Unique(w) => {
                // center at distance π/2 − ρ past the cap center
                assert!((sph_dist(&w, &c) - (FRAC_PI_2 - 0.5)).abs() < 1e-9);
                assert!((sph_dist(&w, &p) - FRAC_PI_2).abs() < 1e-9);
                // tangency oracle: every boundary sample inside H(w)
                for b in cap.boundary_samples(256) {
                    assert!(w.dot(&b) >= -1e-9);
                }
            }
            other => panic!("expected unique, got {other:?}"),
        }

        assert!(tri.supporting_hemispheres(&u3(1.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn widths_of_caps_and_orthant() {
        let c = u3(0.4, -0.1, 0.91);
        let cap = SphericalBody::cap(c, 0.6).unwrap();
        let dual = cap.polar_dual().unwrap();
        let support = dual.boundary_samples(16)[5];
        let w = cap.width_wrt(&support).unwrap();
        assert!((w - 1.2).abs() < 1e-12, "cap width {w}");
        let (cw, tau) = cap.is_constant_width(1e-9).unwrap();
        assert!(cw);
        assert!((tau - 1.2).abs() < 1e-12);

        let tri = orthant();
        let e3 = u3(0.0, 0.0, 1.0);
        let w = tri.width_wrt(&e3).unwrap();
        assert!((w - FRAC_PI_2).abs() < 1e-12, "orthant width {w}");

        // support scan: the spherical orthant triangle is the classic
        // constant-width-π/2 polytope, so the whole width column is π/2
        let report = tri.thickness().unwrap();
        assert!((report.min - FRAC_PI_2).abs() < 1e-9);
        assert!((report.max - FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn width_scan_matches_brute_force_oracle() {
        // the oracle scans近-supporting grid directions only through
        // boundary samples and the lune formula, independent of the
        // feature machinery
        let tri = orthant();
        let samples = tri.boundary_samples(256);
        let grid = icosphere(4);
        let mut supports: Vec<UnitVec3> = Vec::new();
        for node in &grid.nodes {
            let q = UnitVec::try_new(*node).unwrap();
            let min_dot = samples.iter().map(|p| q.dot(p)).fold(f64::INFINITY, f64::min);
            if min_dot.abs() <= 0.05 {
                supports.push(q);
            }
        }
        assert!(supports.len() > 40, "only {} support candidates", supports.len());
        let mut oracle_min = f64::INFINITY;
        let mut oracle_max = f64::NEG_INFINITY;
        for q in &supports {
            let farthest = supports
                .iter()
                .map(|r| sph_dist(q, r))
                .fold(0.0, f64::max);
            let width = PI - farthest;
            oracle_min = oracle_min.min(width);
            oracle_max = oracle_max.max(width);
        }
        // coarse oracle agrees with the exact scan at grid resolution
        assert!((oracle_min - FRAC_PI_2).abs() < 0.15, "oracle min {oracle_min}");
        assert!((oracle_max - FRAC_PI_2).abs() < 0.15, "oracle max {oracle_max}");

        // a generic polygon is NOT of constant width and the scan sees it
        let poly = s_conv(&[
            u3(0.9, 0.1, 0.6),
            u3(-0.2, 0.8, 0.65),
            u3(-0.6, -0.4, 0.75),
            u3(0.5, -0.7, 0.7),
        ])
        .unwrap();
        let (cw, _) = poly.is_constant_width(1e-3).unwrap();
        assert!(!cw);
    }

    #[test]
    fn width_duality_on_caps() {
        for rho in [0.3, 0.6, 1.0] {
            let cap = SphericalBody::cap(u3(0.1, 0.2, 0.97), rho).unwrap();
            let dual = cap.polar_dual().unwrap();
            let (cw1, t1) = cap.is_constant_width(1e-8).unwrap();
            let (cw2, t2) = dual.is_constant_width(1e-8).unwrap();
            assert!(cw1 && cw2);
            assert!((t1 + t2 - PI).abs() < 1e-8, "rho {rho}: {t1} + {t2}");
        }
    }

    #[test]
    fn vertex_identity_on_orthant_and_smooth_error() {
        let tri = orthant();
        let e3 = u3(0.0, 0.0, 1.0);
        let (angle, dist) = tri.vertex_angle_identity(&e3).unwrap();
        assert!((angle - FRAC_PI_2).abs() < 1e-12);
        assert!((dist - FRAC_PI_2).abs() < 1e-12);
        assert!((angle + dist - PI).abs() < 1e-12);

        let cap = SphericalBody::cap(e3, 0.5).unwrap();
        let p = cap.boundary_samples(4)[1];
        assert!(matches!(
            cap.vertex_angle_identity(&p),
            Err(Error::SmoothPoint)
        ));
    }

    #[test]
    fn vertex_identity_on_random_polygons() {
        for seed in 0..8 {
            let center = u3(0.1 * seed as f64 - 0.3, 0.2, 0.9);
            let (e1, e2) = center.tangent_basis();
            let pts: Vec<UnitVec3> = (0..7)
                .map(|i| {
                    let a = TAU * i as f64 / 7.0 + seed as f64 * 0.37;
                    let r = 0.25 + 0.3 * ((seed * 7 + i) as f64 * 1.7).sin().abs();
                    UnitVec::normalize(
                        center.as_vector() * r.cos() + (e1 * a.cos() + e2 * a.sin()) * r.sin(),
                    )
                    .unwrap()
                })
                .collect();
            let poly = s_conv(&pts).unwrap();
            for v in poly.vertices() {
                let (angle, dist) = poly.vertex_angle_identity(&v).unwrap();
                assert!(
                    (angle + dist - PI).abs() < 1e-9,
                    "seed {seed}: angle {angle} dist {dist}"
                );
            }
        }
    }

    #[test]
    fn interior_cap_witness_examples() {
        let c = u3(0.3, 0.1, 0.95);
        let cap = SphericalBody::cap(c, 0.6).unwrap();
        let (p, delta) = cap.interior_cap_witness().unwrap();
        assert!(p.approx_eq(&c, 1e-12));
        assert!((delta - 0.6f64.min(FRAC_PI_2 - 0.6)).abs() < 1e-9);

        let tri = orthant();
        let (p, delta) = tri.interior_cap_witness().unwrap();
        assert!(p.approx_eq(&u3(1.0, 1.0, 1.0), 1e-9));
        let inradius = (1.0f64 / 3.0f64.sqrt()).asin();
        assert!((delta - inradius).abs() < 1e-9, "delta {delta}");
    }

    #[test]
    fn support_duality_feature_wise() {
        // H(P) supports C° at Q iff H(Q) supports C at P: the extreme
        // supports of C° at a dual vertex are boundary points of C
        let tri = orthant();
        let dual = tri.polar_dual().unwrap();
        let e3 = u3(0.0, 0.0, 1.0);
        match dual.supporting_hemispheres(&e3).unwrap() {
            SupportAt::Pair(q, r) => {
                for w in [q, r] {
                    assert!(tri.distance_to_boundary(&w) < 1e-9);
                }
            }
            SupportAt::Unique(w) => {
                assert!(tri.distance_to_boundary(&w) < 1e-9);
            }
        }
    }

    #[test]
    fn body_spec_roundtrip() {
        let tri = orthant();
        let spec = BodySpec::from_body(&tri);
        let json = serde_json::to_string(&spec).unwrap();
        let parsed: BodySpec = serde_json::from_str(&json).unwrap();
        let back = parsed.parse().unwrap();
        assert_eq!(back.features().len(), tri.features().len());
        for (f, g) in tri.features().iter().zip(back.features()) {
            assert!(f.start().approx_eq(&g.start(), 1e-12));
        }
        // breaking the chain is rejected (removing a segment opens it)
        let mut bad = BodySpec::from_body(&tri);
        let seg_idx = bad
            .features
            .iter()
            .position(|f| matches!(f, FeatureSpec::Segment { .. }))
            .unwrap();
        bad.features.remove(seg_idx);
        assert!(bad.parse().is_err());
    }
}
