//! Exact geometry of convex polygons inside an ambient ball `B_R(0)`.
//!
//! All values are immutable once constructed. Boundary points count as
//! inside (closed-set convention) in every membership and containment test.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance used for the ball check and closed-set membership.
pub const REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn dot(self, o: Point2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn dist(self, o: Point2) -> f64 {
        (self - o).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl From<[f64; 2]> for Point2 {
    fn from(a: [f64; 2]) -> Self {
        Point2::new(a[0], a[1])
    }
}

impl From<Point2> for [f64; 2] {
    fn from(p: Point2) -> Self {
        [p.x, p.y]
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, o: Point2) -> Point2 {
        Point2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, o: Point2) -> Point2 {
        Point2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<Point2> for f64 {
    type Output = Point2;
    fn mul(self, p: Point2) -> Point2 {
        Point2::new(self * p.x, self * p.y)
    }
}

/// Distance from `p` to the closed segment `[a, b]`.
pub fn segment_distance(p: Point2, a: Point2, b: Point2) -> f64 {
    let ab = b - a;
    let len2 = ab.dot(ab);
    if len2 == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.dist(a + t * ab)
}

/// A strictly convex polygon with counter-clockwise vertices, contained in
/// the closed ball of radius `ball_radius` about the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "DomainFile", try_from = "DomainFile")]
pub struct ConvexDomain {
    vertices: Vec<Point2>,
    ball_radius: f64,
}

/// On-disk form of a domain: `{ "R": number, "vertices": [[x, y], ...] }`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainFile {
    #[serde(rename = "R")]
    pub ball_radius: f64,
    pub vertices: Vec<Point2>,
}

impl From<ConvexDomain> for DomainFile {
    fn from(d: ConvexDomain) -> Self {
        DomainFile {
            ball_radius: d.ball_radius,
            vertices: d.vertices,
        }
    }
}

impl TryFrom<DomainFile> for ConvexDomain {
    type Error = Error;
    fn try_from(f: DomainFile) -> Result<Self> {
        ConvexDomain::from_strict(f.vertices, f.ball_radius)
    }
}

impl ConvexDomain {
    /// Builds a domain from an ordered vertex chain.
    ///
    /// Repeated and collinear vertices are dropped (cross-product tolerance
    /// `1e-12 R²`) and clockwise input is reversed; whatever remains must
    /// satisfy every invariant.
    pub fn new(vertices: Vec<Point2>, ball_radius: f64) -> Result<Self> {
        check_radius(ball_radius)?;
        let mut v = vertices;
        v.dedup();
        while v.len() > 1 && v.first() == v.last() {
            v.pop();
        }
        if signed_area(&v) < 0.0 {
            v.reverse();
        }
        let tol = collinear_tol(ball_radius);
        remove_collinear(&mut v, tol);
        Self::from_strict(v, ball_radius)
    }

    /// Validates the chain as given, without any cleanup. Errors name the
    /// violated invariant.
    pub fn from_strict(vertices: Vec<Point2>, ball_radius: f64) -> Result<Self> {
        check_radius(ball_radius)?;
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidDomain(format!(
                "at least 3 vertices required, found {n}"
            )));
        }
        if let Some(k) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidDomain(format!("vertex {k} is not finite")));
        }
        let farthest = vertices.iter().map(|p| p.norm()).fold(0.0, f64::max);
        if farthest > ball_radius * (1.0 + REL_TOL) {
            return Err(Error::OutsideAmbientBall {
                radius: ball_radius,
                farthest,
            });
        }
        let tol = collinear_tol(ball_radius);
        let mut turning = 0.0;
        for k in 0..n {
            let prev = vertices[(k + n - 1) % n];
            let cur = vertices[k];
            let next = vertices[(k + 1) % n];
            let e0 = cur - prev;
            let e1 = next - cur;
            let c = e0.cross(e1);
            if c.abs() <= tol {
                return Err(Error::InvalidDomain(format!(
                    "strict convexity violated: vertex {k} is collinear with its neighbours"
                )));
            }
            if c < 0.0 {
                return Err(Error::InvalidDomain(format!(
                    "counter-clockwise convexity violated: clockwise turn at vertex {k}"
                )));
            }
            turning += c.atan2(e0.dot(e1));
        }
        if (turning - 2.0 * PI).abs() > 1e-6 {
            return Err(Error::InvalidDomain(format!(
                "simple convex polygon required: total turning {:.6} rad, expected 2π",
                turning
            )));
        }
        let area = signed_area(&vertices);
        if area <= 0.0 {
            return Err(Error::InvalidDomain("area must be positive".into()));
        }
        Ok(ConvexDomain {
            vertices,
            ball_radius,
        })
    }

    /// Regular `n`-gon with the given circumradius; the first vertex sits on
    /// the positive x-axis relative to `center`.
    pub fn regular(n: usize, circumradius: f64, center: Point2, ball_radius: f64) -> Result<Self> {
        if n < 3 || circumradius <= 0.0 {
            return Err(Error::DegenerateInput(format!(
                "regular polygon needs n >= 3 and positive radius (n = {n}, r = {circumradius})"
            )));
        }
        let pts = (0..n)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / n as f64;
                center + circumradius * Point2::new(t.cos(), t.sin())
            })
            .collect();
        ConvexDomain::new(pts, ball_radius)
    }

    /// Axis-aligned rectangle.
    pub fn rectangle(width: f64, height: f64, center: Point2, ball_radius: f64) -> Result<Self> {
        let (a, b) = (0.5 * width, 0.5 * height);
        ConvexDomain::new(
            vec![
                center + Point2::new(-a, -b),
                center + Point2::new(a, -b),
                center + Point2::new(a, b),
                center + Point2::new(-a, b),
            ],
            ball_radius,
        )
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn ball_radius(&self) -> f64 {
        self.ball_radius
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |k| (self.vertices[k], self.vertices[(k + 1) % n]))
    }

    /// Shoelace area.
    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }

    /// Area centroid.
    pub fn centroid(&self) -> Point2 {
        let (mut cx, mut cy, mut a2) = (0.0, 0.0, 0.0);
        for (p, q) in self.edges() {
            let w = p.cross(q);
            a2 += w;
            cx += (p.x + q.x) * w;
            cy += (p.y + q.y) * w;
        }
        Point2::new(cx / (3.0 * a2), cy / (3.0 * a2))
    }

    pub fn diameter(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (i, p) in self.vertices.iter().enumerate() {
            for q in &self.vertices[i + 1..] {
                d = d.max(p.dist(*q));
            }
        }
        d
    }

    /// Largest vertex norm, i.e. the smallest ball about the origin that
    /// contains the polygon.
    pub fn max_vertex_norm(&self) -> f64 {
        self.vertices.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }

    /// Signed Euclidean distance to the boundary: negative inside, zero on
    /// the boundary, positive outside.
    pub fn signed_distance(&self, p: Point2) -> f64 {
        let mut inside = true;
        let mut dmin = f64::INFINITY;
        for (a, b) in self.edges() {
            if (b - a).cross(p - a) < 0.0 {
                inside = false;
            }
            dmin = dmin.min(segment_distance(p, a, b));
        }
        if inside {
            -dmin
        } else {
            dmin
        }
    }

    /// Distance from `p` to the closed polygon (zero inside).
    pub fn distance_to(&self, p: Point2) -> f64 {
        self.signed_distance(p).max(0.0)
    }

    /// Closed-set membership with tolerance `1e-12 R`.
    pub fn contains_point(&self, p: Point2) -> bool {
        self.signed_distance(p) <= REL_TOL * self.ball_radius
    }

    /// `other ⊆ self`; for convex polygons it suffices to test vertices.
    pub fn contains_domain(&self, other: &ConvexDomain) -> bool {
        other.vertices.iter().all(|&p| self.contains_point(p))
    }

    /// Homothety `x ↦ center + t (x − center)`.
    pub fn scale_about(&self, center: Point2, t: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::PreconditionViolated(format!(
                "scale factor must be positive, got {t}"
            )));
        }
        if t == 1.0 {
            return Ok(self.clone());
        }
        let pts = self
            .vertices
            .iter()
            .map(|&v| center + t * (v - center))
            .collect();
        ConvexDomain::new(pts, self.ball_radius)
    }

    /// Homothety about the centroid.
    pub fn scaled(&self, t: f64) -> Result<Self> {
        self.scale_about(self.centroid(), t)
    }

    /// Homothety about the centroid that brings the area to `target`.
    pub fn scale_to_area(&self, target: f64) -> Result<Self> {
        if !(target > 0.0) || !target.is_finite() {
            return Err(Error::PreconditionViolated(format!(
                "target area must be positive, got {target}"
            )));
        }
        self.scaled((target / self.area()).sqrt())
    }

    pub fn translated(&self, offset: Point2) -> Result<Self> {
        let pts = self.vertices.iter().map(|&v| v + offset).collect();
        ConvexDomain::new(pts, self.ball_radius)
    }

    /// Same polygon, different ambient ball.
    pub fn with_ball_radius(&self, ball_radius: f64) -> Result<Self> {
        ConvexDomain::from_strict(self.vertices.clone(), ball_radius)
    }
}

fn check_radius(r: f64) -> Result<()> {
    if r > 0.0 && r.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidDomain(format!(
            "ball radius R must be positive and finite, got {r}"
        )))
    }
}

fn collinear_tol(r: f64) -> f64 {
    REL_TOL * r * r
}

fn signed_area(v: &[Point2]) -> f64 {
    let n = v.len();
    if n < 3 {
        return 0.0;
    }
    0.5 * (0..n).map(|k| v[k].cross(v[(k + 1) % n])).sum::<f64>()
}

fn remove_collinear(v: &mut Vec<Point2>, tol: f64) {
    loop {
        let n = v.len();
        if n < 3 {
            return;
        }
        let hit = (0..n).find(|&k| {
            let prev = v[(k + n - 1) % n];
            let next = v[(k + 1) % n];
            (v[k] - prev).cross(next - v[k]).abs() <= tol
        });
        match hit {
            Some(k) => {
                v.remove(k);
            }
            None => return,
        }
    }
}

/// Convex hull (Andrew's monotone chain), counter-clockwise, collinear points
/// removed.
pub fn convex_hull(points: &[Point2], ball_radius: f64) -> Result<ConvexDomain> {
    check_radius(ball_radius)?;
    if points.iter().any(|p| !p.is_finite()) {
        return Err(Error::DegenerateInput("non-finite point".into()));
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return Err(Error::DegenerateInput(format!(
            "hull of {} distinct points has zero area",
            pts.len()
        )));
    }
    let tol = collinear_tol(ball_radius);
    let turn = |o: Point2, a: Point2, b: Point2| (a - o).cross(b - o);
    let mut hull: Vec<Point2> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= tol {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && turn(hull[hull.len() - 2], hull[hull.len() - 1], p) <= tol {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    if hull.len() < 3 || signed_area(&hull) <= 0.0 {
        return Err(Error::DegenerateInput("points are collinear; hull has zero area".into()));
    }
    ConvexDomain::new(hull, ball_radius)
}

/// Exact Hausdorff distance between two convex polygons.
///
/// The distance from a point to a convex set is a convex function, so its
/// maximum over a polygon is attained at a vertex.
pub fn hausdorff_distance(a: &ConvexDomain, b: &ConvexDomain) -> f64 {
    let directed = |p: &ConvexDomain, q: &ConvexDomain| {
        p.vertices
            .iter()
            .map(|&v| q.distance_to(v))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

/// Exact Hausdorff distance between a convex polygon and the closed disk of
/// radius `rho` about `center`.
///
/// With support functions, `d_H = sup_u |h_P(u) − ⟨center, u⟩ − ρ|`. The
/// supremum of `h_{P−center}` is the farthest vertex distance and its
/// infimum over unit directions is minus the signed distance of `center`.
pub fn hausdorff_to_disk(p: &ConvexDomain, center: Point2, rho: f64) -> f64 {
    let far = p
        .vertices
        .iter()
        .map(|v| v.dist(center))
        .fold(0.0, f64::max);
    (far - rho).max(rho + p.signed_distance(center))
}

/// Upper bound on `|area(B) − area(A)|` for convex `A ⊆ B ⊆ B_R(0)` with
/// `d_H(A, B) = delta`: the outer parallel set of `A` has area at most
/// `area(A) + per(A) δ + π δ²` and `per(A) ≤ 2πR`.
pub fn outer_parallel_area_bound(ball_radius: f64, delta: f64) -> f64 {
    2.0 * PI * ball_radius * delta + PI * delta * delta
}

/// Anything that can answer "does this closed region contain the convex
/// polygon `k`".
pub trait Region {
    fn contains_convex(&self, k: &ConvexDomain) -> bool;
}

impl Region for ConvexDomain {
    fn contains_convex(&self, k: &ConvexDomain) -> bool {
        self.contains_domain(k)
    }
}

/// A closed polygonal region bounded by an outer ring and optional holes,
/// not necessarily convex. Only containment is supported.
#[derive(Debug, Clone)]
pub struct PolygonalRegion {
    outer: Vec<Point2>,
    holes: Vec<Vec<Point2>>,
    tol: f64,
}

impl PolygonalRegion {
    pub fn new(outer: Vec<Point2>, holes: Vec<Vec<Point2>>) -> Result<Self> {
        if outer.len() < 3 || holes.iter().any(|h| h.len() < 3) {
            return Err(Error::DegenerateInput("every ring needs at least 3 vertices".into()));
        }
        let scale = outer.iter().map(|p| p.norm()).fold(1.0, f64::max);
        Ok(PolygonalRegion {
            outer,
            holes,
            tol: REL_TOL * scale,
        })
    }

    /// `domain` with the open disk of radius `radius` about `center` removed;
    /// the disk is replaced by a circumscribed regular `segments`-gon so the
    /// polygonal hole covers it.
    pub fn punctured(domain: &ConvexDomain, center: Point2, radius: f64, segments: usize) -> Result<Self> {
        if segments < 3 || !(radius > 0.0) {
            return Err(Error::DegenerateInput("puncture needs radius > 0 and >= 3 segments".into()));
        }
        let r = radius / (PI / segments as f64).cos();
        let hole = (0..segments)
            .map(|k| {
                let t = 2.0 * PI * k as f64 / segments as f64;
                center + r * Point2::new(t.cos(), t.sin())
            })
            .collect();
        PolygonalRegion::new(domain.vertices().to_vec(), vec![hole])
    }

    fn rings(&self) -> impl Iterator<Item = &Vec<Point2>> {
        std::iter::once(&self.outer).chain(self.holes.iter())
    }

    fn boundary_edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        self.rings().flat_map(|r| {
            let n = r.len();
            (0..n).map(move |k| (r[k], r[(k + 1) % n]))
        })
    }

    /// Closed membership: inside by even-odd rule, or on the boundary.
    pub fn contains_point(&self, p: Point2) -> bool {
        if self
            .boundary_edges()
            .any(|(a, b)| segment_distance(p, a, b) <= self.tol)
        {
            return true;
        }
        let mut inside = false;
        for (a, b) in self.boundary_edges() {
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }
}

/// Does the segment `[a, b]` meet the interior of the convex polygon `k`?
fn segment_meets_interior(a: Point2, b: Point2, k: &ConvexDomain, tol: f64) -> bool {
    // Clip the parameter range against every inward-shrunk half-plane.
    let (mut t0, mut t1) = (0.0f64, 1.0f64);
    let d = b - a;
    let vs = k.vertices();
    let n = vs.len();
    for i in 0..n {
        let p = vs[i];
        let e = vs[(i + 1) % n] - p;
        let len = e.norm();
        // interior: cross(e, x - p) / len > tol
        let f0 = e.cross(a - p) / len - tol;
        let fd = e.cross(d) / len;
        if fd == 0.0 {
            if f0 <= 0.0 {
                return false;
            }
        } else {
            let t = -f0 / fd;
            if fd > 0.0 {
                t0 = t0.max(t);
            } else {
                t1 = t1.min(t);
            }
        }
        if t0 >= t1 {
            return false;
        }
    }
    t0 < t1
}

impl Region for PolygonalRegion {
    fn contains_convex(&self, k: &ConvexDomain) -> bool {
        k.vertices().iter().all(|&p| self.contains_point(p))
            && !self
                .boundary_edges()
                .any(|(a, b)| segment_meets_interior(a, b, k, self.tol))
    }
}

/// Smallest 1-based index `m₀` such that every element of `sequence` from
/// position `m₀` on contains `k`, or `None` when the final element does not.
///
/// `k` must lie at positive distance from the complement of `limit`.
pub fn eventually_contains<R: Region>(
    sequence: &[R],
    limit: &ConvexDomain,
    k: &ConvexDomain,
) -> Result<Option<usize>> {
    let margin = k
        .vertices()
        .iter()
        .map(|&p| limit.signed_distance(p))
        .fold(f64::NEG_INFINITY, f64::max);
    if !(margin < 0.0) {
        return Err(Error::PreconditionViolated(format!(
            "K is not compactly contained in the limit domain (max signed distance {margin:e})"
        )));
    }
    let mut m0 = None;
    for (idx, region) in sequence.iter().enumerate().rev() {
        if region.contains_convex(k) {
            m0 = Some(idx + 1);
        } else {
            break;
        }
    }
    Ok(m0)
}
