//! Convex integrands γ: Sⁿ → ℝ₊ for n = 1, 2: evaluation, validity
//! checking against the inverted-graph definition, apex-cap patching, and
//! the sphere-patch residual of the apex characterization.
//!
//! The inverted graph of γ is the set `{(−θ, 1/γ(θ))}` in polar form; γ is
//! a convex integrand exactly when that set bounds a convex body, which is
//! what [`ConvexIntegrand::is_convex_integrand`] samples.

use crate::error::{Error, Result};
use crate::hull::{hull3_depth, icosphere, planar_depth, planar_hull_indices, quickhull3, Icosphere};
use crate::sphere::{UnitVec, UnitVec2, UnitVec3};
use crate::tol::ANGLE_EPS;
use nalgebra::{SVector, Vector2, Vector3};
use std::f64::consts::TAU;
use std::sync::Arc;

/// Deterministic sample grid on a spherical cap, used by residual checks.
pub trait CapSampling: Sized {
    /// About `grid` points covering the closed cap of radius `delta`
    /// around `center`, always including the center itself.
    fn cap_grid(center: &Self, delta: f64, grid: usize) -> Vec<Self>;
}

impl CapSampling for UnitVec2 {
    fn cap_grid(center: &Self, delta: f64, grid: usize) -> Vec<Self> {
        let base = center.angle();
        let n = grid.max(3);
        (0..n)
            .map(|i| {
                let t = -delta + 2.0 * delta * i as f64 / (n - 1) as f64;
                UnitVec2::from_angle(base + t)
            })
            .chain(std::iter::once(*center))
            .collect()
    }
}

impl CapSampling for UnitVec3 {
    fn cap_grid(center: &Self, delta: f64, grid: usize) -> Vec<Self> {
        let (u, v) = center.tangent_basis();
        let rings = ((grid as f64).sqrt().ceil() as usize).max(2);
        let azimuths = (grid / rings).max(6);
        let mut out = vec![*center];
        for r in 1..=rings {
            let rho = delta * r as f64 / rings as f64;
            for a in 0..azimuths {
                let phi = TAU * a as f64 / azimuths as f64;
                let dir = center.as_vector() * rho.cos()
                    + (u * phi.cos() + v * phi.sin()) * rho.sin();
                out.push(UnitVec::normalize(dir).expect("cap sample"));
            }
        }
        out
    }
}

/// A point of the inverted graph: direction `−θ` with radius `1/γ(θ)`.
#[derive(Clone, Copy, Debug)]
pub struct InvGraphPoint<const D: usize> {
    pub direction: UnitVec<D>,
    pub radius: f64,
}

impl<const D: usize> InvGraphPoint<D> {
    pub fn position(&self) -> SVector<f64, D> {
        self.direction.as_vector() * self.radius
    }
}

/// Tabulated values, with topology depending on the sphere dimension.
#[derive(Clone, Debug)]
enum TableData {
    /// Values at angles `2πi/m` on S¹, interpolated linearly in angle.
    Circle { values: Vec<f64> },
    /// Values at the nodes of a subdivided icosahedron, interpolated with
    /// gnomonic barycentric weights on the containing triangle.
    Sphere {
        grid: Arc<Icosphere>,
        values: Vec<f64>,
    },
}

#[derive(Clone, Debug)]
enum Kind<const D: usize> {
    Constant(f64),
    /// Support function of the convex hull of a point set containing the
    /// origin strictly in its interior.
    Support(Vec<SVector<f64, D>>),
    /// Pointwise maximum of a base integrand and the vertex support
    /// `max(0, height·(apex·θ))`.
    Patched {
        base: Box<ConvexIntegrand<D>>,
        apex: UnitVec<D>,
        height: f64,
    },
    Table(TableData),
}

/// A positive continuous integrand on Sⁿ (ambient dimension `D = n + 1`).
#[derive(Clone, Debug)]
pub struct ConvexIntegrand<const D: usize> {
    kind: Kind<D>,
}

impl<const D: usize> ConvexIntegrand<D> {
    pub fn constant(value: f64) -> Result<Self> {
        if value <= 0.0 {
            return Err(Error::NonPositiveIntegrand { value });
        }
        Ok(Self {
            kind: Kind::Constant(value),
        })
    }

    /// Support function `θ ↦ max_i v_i·θ` of the hull of `points`.
    pub fn support(points: Vec<SVector<f64, D>>) -> Result<Self> {
        let integrand = Self {
            kind: Kind::Support(points),
        };
        integrand.check_origin_interior()?;
        Ok(integrand)
    }

    fn check_origin_interior(&self) -> Result<()> {
        let Kind::Support(points) = &self.kind else {
            return Ok(());
        };
        let depth = match D {
            2 => {
                let pts: Vec<Vector2<f64>> = points
                    .iter()
                    .map(|p| Vector2::new(p[0], p[1]))
                    .collect();
                let hull = planar_hull_indices(&pts)?;
                let verts: Vec<Vector2<f64>> = hull.iter().map(|&i| pts[i]).collect();
                planar_depth(&verts, &Vector2::zeros())
            }
            3 => {
                let pts: Vec<Vector3<f64>> = points
                    .iter()
                    .map(|p| Vector3::new(p[0], p[1], p[2]))
                    .collect();
                let facets = quickhull3(&pts)?;
                hull3_depth(&facets, &Vector3::zeros())
            }
            _ => unreachable!("only S¹ and S² are supported"),
        };
        if depth <= ANGLE_EPS {
            return Err(Error::NonPositiveIntegrand { value: depth });
        }
        Ok(())
    }

    pub fn eval(&self, theta: &UnitVec<D>) -> f64 {
        match &self.kind {
            Kind::Constant(v) => *v,
            Kind::Support(points) => points
                .iter()
                .map(|p| p.dot(theta.as_vector()))
                .fold(f64::NEG_INFINITY, f64::max),
            Kind::Patched { base, apex, height } => {
                let vertex = (height * apex.dot(theta)).max(0.0);
                base.eval(theta).max(vertex)
            }
            Kind::Table(data) => eval_table(data, theta.as_vector().as_slice()),
        }
    }

    /// Apex patching: pointwise maximum of `self` and the vertex support
    /// of the point `height·apex`. Requires the patch to protrude,
    /// `height > self(apex)`; then the cap law `γ(Q) = height·(apex·Q)`
    /// holds on a cap of positive radius around `apex`.
    pub fn patch_apex(&self, apex: UnitVec<D>, height: f64) -> Result<Self> {
        let base_value = self.eval(&apex);
        if height <= base_value {
            return Err(Error::ApexHeightTooLow {
                height,
                base: base_value,
            });
        }
        Ok(Self {
            kind: Kind::Patched {
                base: Box::new(self.clone()),
                apex,
                height,
            },
        })
    }

    /// Apex direction and height, when this integrand is a patch.
    pub fn apex_params(&self) -> Option<(UnitVec<D>, f64)> {
        match &self.kind {
            Kind::Patched { apex, height, .. } => Some((*apex, *height)),
            _ => None,
        }
    }

    /// Inverted-graph point `(−θ, 1/γ(θ))` for a direction `θ`.
    pub fn inv_graph_point(&self, theta: &UnitVec<D>) -> InvGraphPoint<D> {
        InvGraphPoint {
            direction: theta.antipode(),
            radius: 1.0 / self.eval(theta),
        }
    }
}

fn eval_table(data: &TableData, coords: &[f64]) -> f64 {
    match data {
        TableData::Circle { values } => {
            let m = values.len();
            let angle = coords[1].atan2(coords[0]).rem_euclid(TAU);
            let pos = angle / (TAU / m as f64);
            let i = (pos.floor() as usize) % m;
            let frac = pos - pos.floor();
            values[i] * (1.0 - frac) + values[(i + 1) % m] * frac
        }
        TableData::Sphere { grid, values } => {
            let d = Vector3::new(coords[0], coords[1], coords[2]);
            let (ti, bary) = grid.locate(&d).expect("direction not on grid");
            let [a, b, c] = grid.triangles[ti];
            bary[0] * values[a] + bary[1] * values[b] + bary[2] * values[c]
        }
    }
}

impl ConvexIntegrand<2> {
    /// Tabulated integrand on the uniform circle grid `2πi/m`.
    /// Adjacent values must respect the declared Lipschitz bound.
    pub fn table_circle(values: Vec<f64>, lipschitz: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyTable);
        }
        let m = values.len();
        let step = TAU / m as f64;
        for (i, &v) in values.iter().enumerate() {
            if v <= 0.0 {
                return Err(Error::NonPositiveIntegrand { value: v });
            }
            let next = values[(i + 1) % m];
            let observed = (next - v).abs() / step;
            if observed > lipschitz + 1e-12 {
                return Err(Error::LipschitzViolation {
                    bound: lipschitz,
                    observed,
                });
            }
        }
        Ok(Self {
            kind: Kind::Table(TableData::Circle { values }),
        })
    }

    /// Samples the inverted graph on `grid_size` directions and accepts
    /// exactly when no sampled point sinks more than `tol` inside the
    /// hull of all sampled points.
    pub fn is_convex_integrand(&self, grid_size: usize, tol: f64) -> bool {
        assert!(grid_size >= 16, "grid_size must be at least 16");
        let points: Vec<Vector2<f64>> = (0..grid_size)
            .map(|i| {
                let theta = UnitVec2::from_angle(TAU * i as f64 / grid_size as f64);
                let g = self.inv_graph_point(&theta);
                let p = g.position();
                Vector2::new(p[0], p[1])
            })
            .collect();
        let Ok(hull) = planar_hull_indices(&points) else {
            return false;
        };
        let verts: Vec<Vector2<f64>> = hull.iter().map(|&i| points[i]).collect();
        points.iter().all(|p| planar_depth(&verts, p) <= tol)
    }

    /// Validity at the default resolution: 720 directions, tol 1e-9.
    pub fn is_convex_integrand_default(&self) -> bool {
        self.is_convex_integrand(720, ANGLE_EPS)
    }
}

impl ConvexIntegrand<3> {
    /// Tabulated integrand on a subdivided-icosahedron grid; `values`
    /// must match the node count of the given subdivision level.
    pub fn table_sphere(subdivisions: u32, values: Vec<f64>, lipschitz: f64) -> Result<Self> {
        let grid = Arc::new(icosphere(subdivisions));
        if values.len() != grid.nodes.len() {
            return Err(Error::Schema(format!(
                "table expects {} values for subdivision level {}, got {}",
                grid.nodes.len(),
                subdivisions,
                values.len()
            )));
        }
        for &v in &values {
            if v <= 0.0 {
                return Err(Error::NonPositiveIntegrand { value: v });
            }
        }
        for t in &grid.triangles {
            for k in 0..3 {
                let a = t[k];
                let b = t[(k + 1) % 3];
                let dist = (grid.nodes[a] - grid.nodes[b]).norm().asin().max(1e-12);
                let observed = (values[a] - values[b]).abs() / dist;
                if observed > lipschitz + 1e-12 {
                    return Err(Error::LipschitzViolation {
                        bound: lipschitz,
                        observed,
                    });
                }
            }
        }
        Ok(Self {
            kind: Kind::Table(TableData::Sphere { grid, values }),
        })
    }

    /// Hull-boundary membership of the inverted graph sampled on an
    /// icosphere with at least `grid_size` nodes.
    pub fn is_convex_integrand(&self, grid_size: usize, tol: f64) -> bool {
        assert!(grid_size >= 16, "grid_size must be at least 16");
        let mut level = 0;
        while 10 * 4usize.pow(level) + 2 < grid_size && level < 5 {
            level += 1;
        }
        let grid = icosphere(level);
        let points: Vec<Vector3<f64>> = grid
            .nodes
            .iter()
            .map(|n| {
                let theta = UnitVec::try_new(*n).expect("grid node");
                let g = self.inv_graph_point(&theta);
                let p = g.position();
                Vector3::new(p[0], p[1], p[2])
            })
            .collect();
        let Ok(facets) = quickhull3(&points) else {
            return false;
        };
        points.iter().all(|p| hull3_depth(&facets, p) <= tol)
    }

    /// Validity at the default resolution: 2562 icosphere nodes, tol 1e-9.
    pub fn is_convex_integrand_default(&self) -> bool {
        self.is_convex_integrand(2562, ANGLE_EPS)
    }

    /// Exact restriction to the great circle spanned by `anchor` and the
    /// tangent direction `tangent` (anchor maps to planar angle 0).
    ///
    /// Constant, support, and patched integrands restrict exactly; the
    /// patch becomes a planar patch of height `height·|proj|` in the
    /// projected apex direction. Tabulated integrands are resampled on a
    /// 720-node circle grid.
    pub fn restrict_to_section(&self, anchor: &UnitVec3, tangent: &Vector3<f64>) -> ConvexIntegrand<2> {
        let project = |v: &Vector3<f64>| Vector2::new(v.dot(anchor.as_vector()), v.dot(tangent));
        match &self.kind {
            Kind::Constant(v) => ConvexIntegrand {
                kind: Kind::Constant(*v),
            },
            Kind::Support(points) => ConvexIntegrand {
                kind: Kind::Support(
                    points
                        .iter()
                        .map(|p| {
                            let p3 = Vector3::new(p[0], p[1], p[2]);
                            let q = project(&p3);
                            SVector::<f64, 2>::new(q.x, q.y)
                        })
                        .collect(),
                ),
            },
            Kind::Patched { base, apex, height } => {
                let q = project(apex.as_vector());
                let r = q.norm();
                let base2 = base.restrict_to_section(anchor, tangent);
                if r < 1e-12 {
                    return base2;
                }
                ConvexIntegrand {
                    kind: Kind::Patched {
                        base: Box::new(base2),
                        apex: UnitVec::normalize(SVector::<f64, 2>::new(q.x, q.y))
                            .expect("projected apex"),
                        height: height * r,
                    },
                }
            }
            Kind::Table(_) => {
                let m = 720;
                let values: Vec<f64> = (0..m)
                    .map(|i| {
                        let t = TAU * i as f64 / m as f64;
                        let dir = anchor.as_vector() * t.cos() + tangent * t.sin();
                        self.eval(&UnitVec::normalize(dir).expect("section direction"))
                    })
                    .collect();
                ConvexIntegrand {
                    kind: Kind::Table(TableData::Circle { values }),
                }
            }
        }
    }
}

/// Maximum over the sampled cap of `| ‖γ(Q)Q − ½γ(P)P‖ − ½γ(P) |`:
/// zero exactly when the graph of γ over the cap is a piece of the sphere
/// with center `½γ(P)P` and radius `½γ(P)`.
pub fn sphere_patch_residual<const D: usize>(
    gamma: &ConvexIntegrand<D>,
    p: &UnitVec<D>,
    delta: f64,
    grid: usize,
) -> f64
where
    UnitVec<D>: CapSampling,
{
    let gp = gamma.eval(p);
    let center = p.as_vector() * (gp / 2.0);
    UnitVec::cap_grid(p, delta, grid)
        .iter()
        .map(|q| {
            let graph = q.as_vector() * gamma.eval(q);
            ((graph - center).norm() - gp / 2.0).abs()
        })
        .fold(0.0, f64::max)
}

/// Maximum cap-law residual `|γ(Q) − γ(P)(P·Q)|` over the sampled cap.
pub fn cap_law_residual<const D: usize>(
    gamma: &ConvexIntegrand<D>,
    p: &UnitVec<D>,
    delta: f64,
    grid: usize,
) -> f64
where
    UnitVec<D>: CapSampling,
{
    let gp = gamma.eval(p);
    UnitVec::cap_grid(p, delta, grid)
        .iter()
        .map(|q| (gamma.eval(q) - gp * p.dot(q)).abs())
        .fold(0.0, f64::max)
}

/// Largest sampled cap radius (within `search_delta`) on which the cap law
/// holds to `tol`, found by bisection; `None` when even tiny caps fail.
pub fn cap_law_witness<const D: usize>(
    gamma: &ConvexIntegrand<D>,
    p: &UnitVec<D>,
    search_delta: f64,
    tol: f64,
) -> Option<f64>
where
    UnitVec<D>: CapSampling,
{
    const GRID: usize = 256;
    const FLOOR: f64 = 1e-3;
    let gp = gamma.eval(p);
    let holds = |delta: f64| cap_law_residual(gamma, p, delta, GRID) <= tol * gp;
    if !holds(FLOOR) {
        return None;
    }
    if holds(search_delta) {
        return Some(search_delta);
    }
    let (mut lo, mut hi) = (FLOOR, search_delta);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if holds(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(lo)
}

/// JSON description of an integrand, the on-disk schema of the CLI.
#[derive(Clone, Debug, serde::Serialize, serde::Deserialize)]
pub struct IntegrandSpec {
    pub n: u8,
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub base: Option<Box<IntegrandSpec>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub apex: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub height: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subdivisions: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<f64>,
}

/// An integrand of either supported dimension, as loaded from JSON.
#[derive(Clone, Debug)]
pub enum AnyIntegrand {
    N1(ConvexIntegrand<2>),
    N2(ConvexIntegrand<3>),
}

impl IntegrandSpec {
    pub fn parse(&self) -> Result<AnyIntegrand> {
        match self.n {
            1 => Ok(AnyIntegrand::N1(self.build::<2>()?)),
            2 => Ok(AnyIntegrand::N2(self.build::<3>()?)),
            n => Err(Error::Schema(format!("n must be 1 or 2, got {n}"))),
        }
    }

    fn build<const D: usize>(&self) -> Result<ConvexIntegrand<D>> {
        match self.kind.as_str() {
            "constant" => {
                let value = self
                    .value
                    .ok_or_else(|| Error::Schema("constant integrand needs \"value\"".into()))?;
                ConvexIntegrand::constant(value)
            }
            "support" => {
                let raw = self
                    .points
                    .as_ref()
                    .ok_or_else(|| Error::Schema("support integrand needs \"points\"".into()))?;
                let mut points = Vec::with_capacity(raw.len());
                for p in raw {
                    if p.len() != D {
                        return Err(Error::Schema(format!(
                            "support point has {} coordinates, expected {D}",
                            p.len()
                        )));
                    }
                    points.push(SVector::<f64, D>::from_iterator(p.iter().copied()));
                }
                ConvexIntegrand::support(points)
            }
            "patched" => {
                let base = self
                    .base
                    .as_ref()
                    .ok_or_else(|| Error::Schema("patched integrand needs \"base\"".into()))?;
                let apex = self
                    .apex
                    .as_ref()
                    .ok_or_else(|| Error::Schema("patched integrand needs \"apex\"".into()))?;
                let height = self
                    .height
                    .ok_or_else(|| Error::Schema("patched integrand needs \"height\"".into()))?;
                if apex.len() != D {
                    return Err(Error::Schema(format!(
                        "apex has {} coordinates, expected {D}",
                        apex.len()
                    )));
                }
                let base = base.build::<D>()?;
                let apex = UnitVec::try_new(SVector::<f64, D>::from_iterator(apex.iter().copied()))?;
                base.patch_apex(apex, height)
            }
            "table" => {
                let values = self
                    .values
                    .clone()
                    .ok_or_else(|| Error::Schema("table integrand needs \"values\"".into()))?;
                let lipschitz = self
                    .lipschitz
                    .ok_or_else(|| Error::Schema("table integrand needs \"lipschitz\"".into()))?;
                build_table::<D>(values, self.subdivisions, lipschitz)
            }
            other => Err(Error::Schema(format!("unknown integrand kind {other:?}"))),
        }
    }
}

fn build_table<const D: usize>(
    values: Vec<f64>,
    subdivisions: Option<u32>,
    lipschitz: f64,
) -> Result<ConvexIntegrand<D>> {
    // Dimension dispatch through the concrete impls; D is 2 or 3 here.
    if D == 2 {
        let t = ConvexIntegrand::<2>::table_circle(values, lipschitz)?;
        Ok(ConvexIntegrand { kind: transmute_kind(t.kind) })
    } else {
        let level = subdivisions
            .ok_or_else(|| Error::Schema("n=2 table integrand needs \"subdivisions\"".into()))?;
        let t = ConvexIntegrand::<3>::table_sphere(level, values, lipschitz)?;
        Ok(ConvexIntegrand { kind: transmute_kind(t.kind) })
    }
}

// Table data is dimension-independent storage; the enum's type parameter
// only constrains the non-table variants, so this re-tag is sound and
// checked by construction above.
fn transmute_kind<const A: usize, const B: usize>(kind: Kind<A>) -> Kind<B> {
    match kind {
        Kind::Table(data) => Kind::Table(data),
        _ => unreachable!("only table kinds are re-tagged"),
    }
}
