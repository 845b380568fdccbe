//! Generator recovery from a tessellation.
//!
//! At a degree-3 vertex the generator of each incident cell lies on a ray whose
//! angle with the cell's boundary edge is `π − θ`, where `θ` is the sector of the
//! cell on the far side of the vertex. Algorithms I–III intersect these rays; the
//! least-squares method instead solves the bisector conditions of all interior
//! edges at once.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::geom::{ccw_angle, distance, ray_intersection, Point2, Ray};
use crate::lsq::{self, Solver, SparseRows};
use crate::tess::{
    extract_subdivision, format_real, Polygon, Subdivision, TessError, Tessellation,
};

/// Default rotation applied to rays by Algorithm III, in radians.
pub const DEFAULT_EPSILON: f64 = 1e-4;
/// Condition numbers above this mark a least-squares solve as ill-conditioned.
pub const CONDITION_WARNING: f64 = 1e8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InvertError {
    #[error("vertex {0} is not an ordinary vertex of the polygon")]
    VertexNotOnPolygon(usize),
    #[error("vertices without exactly three edges: {0:?}")]
    DegenerateVertex(Vec<usize>),
    #[error("sector angles at vertex {0} leave no room for a generator ray")]
    SectorAngleOverflow(usize),
    #[error("polygon {0} has fewer than two usable vertices")]
    InsufficientVertices(usize),
    #[error("all rays of polygon {0} are parallel or divergent")]
    AllRaysParallel(usize),
    #[error("no ray pair of polygon {0} intersects")]
    NoUsableIntersections(usize),
    #[error("least-squares system has rank {rank} < {unknowns}")]
    RankDeficient {
        rank: usize,
        unknowns: usize,
        /// Minimum-norm solution of the system.
        estimate: Box<GeneratorEstimate>,
    },
    #[error("{edges} interior edges cannot determine {polygons} generators")]
    TooFewEdges { edges: usize, polygons: usize },
    #[error("epsilon must be positive and finite, got {0}")]
    InvalidEpsilon(f64),
    #[error("tolerance must be nonnegative, got {0}")]
    InvalidTolerance(f64),
    #[error(transparent)]
    Tess(#[from] TessError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    AlgI,
    AlgII,
    AlgIII,
    LeastSquares,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::AlgI,
        Method::AlgII,
        Method::AlgIII,
        Method::LeastSquares,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Method::AlgI => "alg1",
            Method::AlgII => "alg2",
            Method::AlgIII => "alg3",
            Method::LeastSquares => "lsq",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "alg1" | "algi" | "i" => Ok(Method::AlgI),
            "alg2" | "algii" | "ii" => Ok(Method::AlgII),
            "alg3" | "algiii" | "iii" => Ok(Method::AlgIII),
            "lsq" | "leastsquares" | "least-squares" => Ok(Method::LeastSquares),
            other => Err(format!(
                "unknown method `{other}` (expected alg1, alg2, alg3 or lsq)"
            )),
        }
    }
}

/// Parses a comma-separated method list; `all` selects every method.
pub fn parse_methods(s: &str) -> Result<Vec<Method>, String> {
    let mut out = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        if part.trim().eq_ignore_ascii_case("all") {
            out.extend(Method::ALL);
        } else {
            out.push(part.parse()?);
        }
    }
    out.sort();
    out.dedup();
    if out.is_empty() {
        return Err("no method given".into());
    }
    Ok(out)
}

/// Half line from a vertex of a polygon through the polygon's generator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorRay {
    pub polygon_index: usize,
    pub vertex_index: usize,
    pub ray: Ray,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PolygonDiagnostics {
    /// Ray-pair intersections contributing to the estimate.
    pub candidates: Vec<Point2>,
    /// Algorithm III weights, parallel to `candidates`.
    pub weights: Vec<f64>,
    /// Largest distance between two candidates.
    pub spread: f64,
    /// Ray pairs examined.
    pub n_pairs: usize,
    /// Pairs discarded because they did not intersect.
    pub n_dropped: usize,
    pub n_usable_vertices: usize,
    /// Ordinary vertices whose ray could not be built.
    pub n_unusable_vertices: usize,
    /// Point minimizing the squared distances to all ray lines.
    pub line_fit: Option<Point2>,
    pub error: Option<InvertError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeastSquaresDiagnostics {
    pub residual_norm: f64,
    pub condition_number: f64,
    pub rank: usize,
    pub unknowns: usize,
    pub equations: usize,
    pub ill_conditioned: bool,
    pub solver: Solver,
}

/// One recovered position per polygon, with diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorEstimate {
    pub method: Method,
    pub polygons: Vec<Polygon>,
    /// Estimated generators; NaN for polygons whose inversion failed.
    pub positions: Vec<Point2>,
    pub per_polygon: Vec<PolygonDiagnostics>,
    pub least_squares: Option<LeastSquaresDiagnostics>,
}

impl GeneratorEstimate {
    pub fn is_complete(&self) -> bool {
        self.per_polygon.iter().all(|d| d.error.is_none())
    }

    pub fn first_error(&self) -> Option<&InvertError> {
        self.per_polygon.iter().find_map(|d| d.error.as_ref())
    }

    pub fn failed_polygons(&self) -> Vec<usize> {
        self.per_polygon
            .iter()
            .enumerate()
            .filter(|(_, d)| d.error.is_some())
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvertOptions {
    /// Algorithm III ray rotation in radians.
    pub epsilon: f64,
}

impl Default for InvertOptions {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
        }
    }
}

fn direction(t: &Tessellation, from: usize, to: usize) -> Option<Point2> {
    (t.vertex(to) - t.vertex(from)).normalized()
}

/// Ray at position `pos` of `polygon` (vertices listed counterclockwise).
fn ray_at(
    t: &Tessellation,
    polygon: &Polygon,
    polygon_index: usize,
    pos: usize,
) -> Result<GeneratorRay, InvertError> {
    let v = polygon.vertex_indices[pos];
    if t.is_dummy(v) {
        return Err(InvertError::VertexNotOnPolygon(v));
    }
    let (prev, next) = polygon.around(pos);
    let nb = t.neighbors(v);
    if nb.len() != 3 || prev == next {
        return Err(InvertError::DegenerateVertex(vec![v]));
    }
    let Some(&third) = nb.iter().find(|&&u| u != prev && u != next) else {
        return Err(InvertError::DegenerateVertex(vec![v]));
    };
    let (Some(e_next), Some(e_prev), Some(e_third)) = (
        direction(t, v, next),
        direction(t, v, prev),
        direction(t, v, third),
    ) else {
        return Err(InvertError::DegenerateVertex(vec![v]));
    };
    let own = ccw_angle(e_next, e_prev);
    let far = ccw_angle(e_prev, e_third);
    let turn = PI - far;
    if !(turn > 0.0 && turn < own) {
        return Err(InvertError::SectorAngleOverflow(v));
    }
    let ray = Ray::new(t.vertex(v), e_next.rotated(turn)).expect("unit direction");
    Ok(GeneratorRay {
        polygon_index,
        vertex_index: v,
        ray,
    })
}

/// Generator ray of `polygon` at tessellation vertex `vertex`.
pub fn generator_ray(
    t: &Tessellation,
    polygon: &Polygon,
    polygon_index: usize,
    vertex: usize,
) -> Result<GeneratorRay, InvertError> {
    let pos = polygon
        .vertex_indices
        .iter()
        .position(|&u| u == vertex)
        .filter(|_| !t.is_dummy(vertex))
        .ok_or(InvertError::VertexNotOnPolygon(vertex))?;
    ray_at(t, polygon, polygon_index, pos)
}

/// Rays at every ordinary vertex of a polygon, in polygon order.
fn polygon_rays(
    t: &Tessellation,
    polygon: &Polygon,
    polygon_index: usize,
) -> Vec<(usize, Result<GeneratorRay, InvertError>)> {
    (0..polygon.len())
        .filter(|&k| !t.is_dummy(polygon.vertex_indices[k]))
        .map(|k| (k, ray_at(t, polygon, polygon_index, k)))
        .collect()
}

/// Total displacement of the intersection of `a` and `b` when each ray in turn
/// is rotated by `±epsilon`. `None` if any of the five intersections is missing.
pub fn intersection_stability(a: &Ray, b: &Ray, epsilon: f64) -> Option<(Point2, f64)> {
    let x = ray_intersection(a, b)?;
    let mut delta = 0.0;
    for (ra, rb) in [
        (a.rotated(epsilon), *b),
        (a.rotated(-epsilon), *b),
        (*a, b.rotated(epsilon)),
        (*a, b.rotated(-epsilon)),
    ] {
        delta += distance(ray_intersection(&ra, &rb)?, x);
    }
    Some((x, delta))
}

/// Point minimizing the sum of squared distances to the lines carrying `rays`.
pub fn line_fit(rays: &[Ray]) -> Option<Point2> {
    let (mut a11, mut a12, mut a22, mut b1, mut b2) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for r in rays {
        let n = r.direction().perp();
        let c = n.dot(r.origin());
        a11 += n.x * n.x;
        a12 += n.x * n.y;
        a22 += n.y * n.y;
        b1 += n.x * c;
        b2 += n.y * c;
    }
    let det = a11 * a22 - a12 * a12;
    if det.abs() <= 1e-12 * (a11 + a22).powi(2) {
        return None;
    }
    Some(Point2::new(
        (a22 * b1 - a12 * b2) / det,
        (a11 * b2 - a12 * b1) / det,
    ))
}

fn spread(points: &[Point2]) -> f64 {
    let mut s: f64 = 0.0;
    for (i, &p) in points.iter().enumerate() {
        for &q in &points[i + 1..] {
            s = s.max(distance(p, q));
        }
    }
    s
}

fn mean(points: &[Point2]) -> Point2 {
    let sum = points.iter().fold(Point2::default(), |acc, &p| acc + p);
    sum * (1.0 / points.len() as f64)
}

/// Pair order for Algorithm I: (0,1), then (0,2), (1,2), (0,3), (1,3), (2,3), …
fn fallback_pairs(k: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..k).flat_map(|b| (0..b).map(move |a| (a, b)))
}

fn invert_polygon(
    t: &Tessellation,
    polygon: &Polygon,
    index: usize,
    method: Method,
    opts: &InvertOptions,
) -> (Point2, PolygonDiagnostics) {
    let all = polygon_rays(t, polygon, index);
    let rays: Vec<Ray> = all
        .iter()
        .filter_map(|(_, r)| r.as_ref().ok().map(|g| g.ray))
        .collect();
    let mut d = PolygonDiagnostics {
        n_usable_vertices: rays.len(),
        n_unusable_vertices: all.len() - rays.len(),
        line_fit: line_fit(&rays),
        ..Default::default()
    };
    let nan = Point2::new(f64::NAN, f64::NAN);
    if rays.len() < 2 {
        d.error = Some(InvertError::InsufficientVertices(index));
        return (nan, d);
    }
    let k = rays.len();
    match method {
        Method::AlgI => {
            for (a, b) in fallback_pairs(k) {
                d.n_pairs += 1;
                if let Some(x) = ray_intersection(&rays[a], &rays[b]) {
                    d.candidates.push(x);
                    return (x, d);
                }
                d.n_dropped += 1;
            }
            d.error = Some(InvertError::AllRaysParallel(index));
            (nan, d)
        }
        Method::AlgII => {
            for (a, b) in fallback_pairs(k) {
                d.n_pairs += 1;
                match ray_intersection(&rays[a], &rays[b]) {
                    Some(x) => d.candidates.push(x),
                    None => d.n_dropped += 1,
                }
            }
            if d.candidates.is_empty() {
                d.error = Some(InvertError::NoUsableIntersections(index));
                return (nan, d);
            }
            d.spread = spread(&d.candidates);
            (mean(&d.candidates), d)
        }
        Method::AlgIII => {
            let mut inv = Vec::new();
            for (a, b) in fallback_pairs(k) {
                d.n_pairs += 1;
                match intersection_stability(&rays[a], &rays[b], opts.epsilon) {
                    Some((x, delta)) if delta > 0.0 && delta.is_finite() => {
                        d.candidates.push(x);
                        inv.push(1.0 / delta);
                    }
                    _ => d.n_dropped += 1,
                }
            }
            if d.candidates.is_empty() {
                d.error = Some(InvertError::NoUsableIntersections(index));
                return (nan, d);
            }
            let total: f64 = inv.iter().sum();
            d.weights = inv.iter().map(|w| w / total).collect();
            d.spread = spread(&d.candidates);
            let est = d
                .candidates
                .iter()
                .zip(&d.weights)
                .fold(Point2::default(), |acc, (&p, &w)| acc + p * w);
            (est, d)
        }
        Method::LeastSquares => unreachable!("handled globally"),
    }
}

/// Runs `method` on every polygon, recording per-polygon failures instead of
/// aborting. Least squares fails as a whole or not at all.
pub fn invert(
    t: &Tessellation,
    method: Method,
    opts: &InvertOptions,
) -> Result<GeneratorEstimate, InvertError> {
    if !(opts.epsilon > 0.0 && opts.epsilon.is_finite()) {
        return Err(InvertError::InvalidEpsilon(opts.epsilon));
    }
    invert_with_faces(t, &extract_subdivision(t)?, method, opts)
}

/// As [`invert`], with faces supplied instead of extracted from the vertex
/// positions. The faces must index vertices of `t`.
pub fn invert_with_faces(
    t: &Tessellation,
    sub: &Subdivision,
    method: Method,
    opts: &InvertOptions,
) -> Result<GeneratorEstimate, InvertError> {
    if !(opts.epsilon > 0.0 && opts.epsilon.is_finite()) {
        return Err(InvertError::InvalidEpsilon(opts.epsilon));
    }
    if method == Method::LeastSquares {
        return least_squares(t, sub);
    }
    let results: Vec<(Point2, PolygonDiagnostics)> = sub
        .polygons
        .par_iter()
        .enumerate()
        .map(|(i, p)| invert_polygon(t, p, i, method, opts))
        .collect();
    let (positions, per_polygon) = results.into_iter().unzip();
    Ok(GeneratorEstimate {
        method,
        polygons: sub.polygons.clone(),
        positions,
        per_polygon,
        least_squares: None,
    })
}

fn strict(est: GeneratorEstimate) -> Result<GeneratorEstimate, InvertError> {
    match est.first_error() {
        Some(e) => Err(e.clone()),
        None => Ok(est),
    }
}

/// Algorithm I: intersection of the rays of the first two usable vertices.
pub fn invert_alg1(t: &Tessellation) -> Result<GeneratorEstimate, InvertError> {
    strict(invert(t, Method::AlgI, &InvertOptions::default())?)
}

/// Algorithm II: mean of all pairwise ray intersections.
pub fn invert_alg2(t: &Tessellation) -> Result<GeneratorEstimate, InvertError> {
    strict(invert(t, Method::AlgII, &InvertOptions::default())?)
}

/// Algorithm III: pairwise intersections weighted by inverse sensitivity.
pub fn invert_alg3(t: &Tessellation, epsilon: f64) -> Result<GeneratorEstimate, InvertError> {
    strict(invert(t, Method::AlgIII, &InvertOptions { epsilon })?)
}

/// Least-squares solution of the bisector conditions over all interior edges.
pub fn invert_least_squares(t: &Tessellation) -> Result<GeneratorEstimate, InvertError> {
    least_squares(t, &extract_subdivision(t)?)
}

/// Rows of the bisector system, each pair divided by the edge length. Vertex
/// coordinates are taken relative to `origin`.
pub(crate) fn bisector_system(
    t: &Tessellation,
    sub: &Subdivision,
    origin: Point2,
) -> (SparseRows, Vec<f64>, Vec<usize>) {
    let n = sub.polygons.len();
    let mut a = SparseRows::new(2 * n);
    let mut b = Vec::new();
    let mut edges_of = vec![0usize; n];
    for &(s, e, left, right) in &sub.edge_faces {
        let (Some(k), Some(l)) = (left, right) else {
            continue;
        };
        if k == l {
            continue;
        }
        let sp = t.vertex(s) - origin;
        let tp = t.vertex(e) - origin;
        let d = sp - tp;
        let len = d.norm();
        if len == 0.0 {
            continue;
        }
        let (d1, d2) = (d.x / len, d.y / len);
        a.push(vec![
            (2 * k, d1),
            (2 * k + 1, d2),
            (2 * l, -d1),
            (2 * l + 1, -d2),
        ]);
        b.push(0.0);
        a.push(vec![
            (2 * k, d2 / 2.0),
            (2 * l, d2 / 2.0),
            (2 * k + 1, -d1 / 2.0),
            (2 * l + 1, -d1 / 2.0),
        ]);
        b.push(tp.x * d2 - tp.y * d1);
        edges_of[k] += 1;
        edges_of[l] += 1;
    }
    (a, b, edges_of)
}

fn least_squares(t: &Tessellation, sub: &Subdivision) -> Result<GeneratorEstimate, InvertError> {
    let n = sub.polygons.len();
    let origin = t
        .ordinary_bounding_box()
        .map(|r| r.center())
        .unwrap_or_default();
    let (a, b, edges_of) = bisector_system(t, sub, origin);
    let m = a.n_rows() / 2;
    if m < n || n == 0 {
        return Err(InvertError::TooFewEdges {
            edges: m,
            polygons: n,
        });
    }
    let sol = lsq::solve(&a, &b);
    let positions: Vec<Point2> = (0..n)
        .map(|i| Point2::new(sol.x[2 * i], sol.x[2 * i + 1]) + origin)
        .collect();
    let per_polygon = edges_of
        .iter()
        .map(|&e| PolygonDiagnostics {
            n_pairs: e,
            ..Default::default()
        })
        .collect();
    let diag = LeastSquaresDiagnostics {
        residual_norm: sol.residual_norm,
        condition_number: sol.condition_number,
        rank: sol.rank,
        unknowns: 2 * n,
        equations: a.n_rows(),
        ill_conditioned: sol.condition_number.is_nan() || sol.condition_number > CONDITION_WARNING,
        solver: sol.solver,
    };
    let est = GeneratorEstimate {
        method: Method::LeastSquares,
        polygons: sub.polygons.clone(),
        positions,
        per_polygon,
        least_squares: Some(diag),
    };
    if sol.rank < 2 * n {
        return Err(InvertError::RankDeficient {
            rank: sol.rank,
            unknowns: 2 * n,
            estimate: Box::new(est),
        });
    }
    Ok(est)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecognitionVerdict {
    pub is_voronoi: bool,
    /// False when the edges cross; no polygons are reported then.
    pub planar: bool,
    pub polygons: Vec<Polygon>,
    /// Infinite for polygons that are not convex or whose rays fail.
    pub per_polygon_spread: Vec<f64>,
    pub tolerance_used: f64,
    pub failing_polygons: Vec<usize>,
    pub nonconvex_polygons: Vec<usize>,
}

fn is_convex_at_ordinary(t: &Tessellation, p: &Polygon) -> bool {
    (0..p.len()).all(|k| {
        let v = p.vertex_indices[k];
        if t.is_dummy(v) {
            return true;
        }
        let (prev, next) = p.around(k);
        let a = t.vertex(v) - t.vertex(prev);
        let b = t.vertex(next) - t.vertex(v);
        a.cross(b) > 0.0
    })
}

/// Checks whether the rays of each pair of adjacent polygon vertices meet in a
/// single point per polygon; the tessellation is Voronoi iff they do.
pub fn recognize_voronoi(
    t: &Tessellation,
    tolerance: f64,
) -> Result<RecognitionVerdict, InvertError> {
    if tolerance.is_nan() || tolerance < 0.0 {
        return Err(InvertError::InvalidTolerance(tolerance));
    }
    let bad: Vec<usize> = (0..t.n_ordinary()).filter(|&v| t.degree(v) != 3).collect();
    if !bad.is_empty() {
        return Err(InvertError::DegenerateVertex(bad));
    }
    let sub = match extract_subdivision(t) {
        Ok(sub) => sub,
        Err(TessError::NonPlanarEmbedding { .. }) => {
            return Ok(RecognitionVerdict {
                is_voronoi: false,
                planar: false,
                polygons: Vec::new(),
                per_polygon_spread: Vec::new(),
                tolerance_used: tolerance,
                failing_polygons: Vec::new(),
                nonconvex_polygons: Vec::new(),
            })
        }
        Err(e) => return Err(e.into()),
    };
    let results: Vec<(f64, bool)> = sub
        .polygons
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            if !is_convex_at_ordinary(t, p) {
                return (f64::INFINITY, false);
            }
            let k = p.len();
            let mut candidates = Vec::new();
            for a in 0..k {
                let b = (a + 1) % k;
                if b == a || t.is_dummy(p.vertex_indices[a]) || t.is_dummy(p.vertex_indices[b]) {
                    continue;
                }
                let (Ok(ra), Ok(rb)) = (ray_at(t, p, i, a), ray_at(t, p, i, b)) else {
                    return (f64::INFINITY, true);
                };
                match ray_intersection(&ra.ray, &rb.ray) {
                    Some(x) => candidates.push(x),
                    None => return (f64::INFINITY, true),
                }
            }
            (spread(&candidates), true)
        })
        .collect();
    let per_polygon_spread: Vec<f64> = results.iter().map(|r| r.0).collect();
    let nonconvex_polygons = results
        .iter()
        .enumerate()
        .filter(|(_, r)| !r.1)
        .map(|(i, _)| i)
        .collect();
    let failing_polygons: Vec<usize> = per_polygon_spread
        .iter()
        .enumerate()
        .filter(|(_, &s)| s.is_nan() || s > tolerance)
        .map(|(i, _)| i)
        .collect();
    Ok(RecognitionVerdict {
        is_voronoi: failing_polygons.is_empty(),
        planar: true,
        polygons: sub.polygons,
        per_polygon_spread,
        tolerance_used: tolerance,
        failing_polygons,
        nonconvex_polygons,
    })
}

pub const ESTIMATE_CSV_HEADER: &str = "polygon,x,y,spread,method,n_pairs,n_dropped,error";

/// CSV rows (without header) for one estimate.
pub fn estimate_csv_rows(est: &GeneratorEstimate) -> String {
    let mut out = String::new();
    for (i, (p, d)) in est.positions.iter().zip(&est.per_polygon).enumerate() {
        let err = d
            .error
            .as_ref()
            .map(|e| e.to_string().replace(',', ";"))
            .unwrap_or_default();
        out.push_str(&format!(
            "{i},{},{},{},{},{},{},{err}\n",
            format_real(p.x),
            format_real(p.y),
            format_real(d.spread),
            est.method,
            d.n_pairs,
            d.n_dropped
        ));
    }
    out
}

pub fn estimate_csv(est: &GeneratorEstimate) -> String {
    format!("{ESTIMATE_CSV_HEADER}\n{}", estimate_csv_rows(est))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{build_voronoi, GeneratorSet};
    use crate::geom::Rect;
    use crate::tess::parse_tessellation;
    use std::f64::consts::FRAC_PI_3;

    fn diagram(pts: &[(f64, f64)], b: (f64, f64, f64, f64)) -> crate::forward::VoronoiDiagram {
        let g = GeneratorSet::new(
            pts.iter().map(|&(x, y)| Point2::new(x, y)).collect(),
            Rect::new(b.0, b.1, b.2, b.3),
        )
        .unwrap();
        build_voronoi(&g).unwrap()
    }

    fn plus_pattern() -> crate::forward::VoronoiDiagram {
        diagram(
            &[(0.0, 0.0), (2.0, 0.0), (-2.0, 0.0), (0.0, 2.0), (0.0, -2.0)],
            (-3.0, -3.0, 3.0, 3.0),
        )
    }

    #[test]
    fn ray_of_three_generator_vertex_points_at_origin() {
        let d = diagram(
            &[(0.0, 0.0), (2.0, 0.0), (0.0, 2.0)],
            (-3.0, -3.0, 3.0, 3.0),
        );
        let t = d.tessellation();
        let cell = d.cell_of_generator(0);
        let ci = d.generator_of_cell().iter().position(|&g| g == 0).unwrap();
        let r = generator_ray(t, cell, ci, 0).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!(distance(r.ray.direction(), Point2::new(-s, -s)) < 1e-12);
        assert!(r.ray.line_distance(Point2::new(0.0, 0.0)) < 1e-9);
    }

    #[test]
    fn honeycomb_vertex_ray_bisects_sector() {
        let text = "tess 4 0\nv 0.0 0.0\nv 1.0 0.0\nv -0.5 0.8660254037844386\nv -0.5 -0.8660254037844386\n\
                    adj 0: 1 2 3\nadj 1: 0\nadj 2: 0\nadj 3: 0\n";
        let t = parse_tessellation(text).unwrap();
        // Sector between the edges to vertices 1 and 2, seen from vertex 0.
        let p = Polygon {
            vertex_indices: vec![0, 1, 2],
            is_unbounded: true,
        };
        let r = ray_at(&t, &p, 0, 0).unwrap();
        let expect = Point2::new(1.0, 0.0).rotated(FRAC_PI_3);
        assert!(distance(r.ray.direction(), expect) < 1e-12);
    }

    #[test]
    fn square_cell_alg2_averages_four_pairs() {
        let d = plus_pattern();
        let t = d.tessellation();
        let est = invert(t, Method::AlgII, &InvertOptions::default()).unwrap();
        let ci = d.generator_of_cell().iter().position(|&g| g == 0).unwrap();
        let diag = &est.per_polygon[ci];
        assert_eq!(diag.n_pairs, 6);
        assert_eq!(diag.n_dropped, 2);
        assert!(distance(est.positions[ci], Point2::new(0.0, 0.0)) < 1e-12);
    }

    #[test]
    fn exact_round_trip_all_methods() {
        let d = diagram(
            &[
                (0.12, 0.31),
                (0.83, 0.22),
                (0.45, 0.77),
                (0.51, 0.43),
                (0.91, 0.88),
                (0.18, 0.92),
                (0.67, 0.61),
                (0.33, 0.08),
            ],
            (0.0, 0.0, 1.0, 1.0),
        );
        let truth = d.generators_by_cell();
        let t = d.tessellation();
        for est in [
            invert_alg1(t).unwrap(),
            invert_alg2(t).unwrap(),
            invert_alg3(t, DEFAULT_EPSILON).unwrap(),
            invert_least_squares(t).unwrap(),
        ] {
            for (p, q) in est.positions.iter().zip(&truth) {
                assert!(distance(*p, *q) < 1e-6, "{} {p} {q}", est.method);
            }
        }
        let lsq = invert_least_squares(t).unwrap();
        assert!(lsq.least_squares.unwrap().residual_norm < 1e-8);
        let v = recognize_voronoi(t, 1e-7).unwrap();
        assert!(v.is_voronoi);
    }

    #[test]
    fn alg3_weights_sum_to_one() {
        let d = plus_pattern();
        let est = invert_alg3(d.tessellation(), DEFAULT_EPSILON).unwrap();
        for diag in &est.per_polygon {
            if !diag.weights.is_empty() {
                let s: f64 = diag.weights.iter().sum();
                assert!((s - 1.0).abs() < 1e-9);
                assert!(diag.weights.iter().all(|&w| w >= 0.0));
            }
        }
    }

    #[test]
    fn near_parallel_pair_is_less_stable() {
        let target = Point2::new(0.0, 0.0);
        let from = |o: Point2| Ray::new(o, target - o).unwrap();
        let a = from(Point2::new(-1.0, 0.0));
        let near = from(Point2::new(-1.0, 0.05));
        let ortho = from(Point2::new(0.0, -1.0));
        let (_, d_near) =
            intersection_stability(&a, &near, 1e-4).unwrap_or((target, f64::INFINITY));
        let (_, d_ortho) = intersection_stability(&a, &ortho, 1e-4).unwrap();
        assert!(d_near > d_ortho);
    }

    #[test]
    fn single_vertex_polygons_are_insufficient() {
        let d = diagram(
            &[(0.0, 0.0), (2.0, 0.0), (0.0, 2.0)],
            (-3.0, -3.0, 3.0, 3.0),
        );
        assert!(matches!(
            invert_alg1(d.tessellation()),
            Err(InvertError::InsufficientVertices(_))
        ));
    }

    #[test]
    fn method_parsing() {
        assert_eq!(parse_methods("all").unwrap(), Method::ALL.to_vec());
        assert_eq!(
            parse_methods("alg3,alg1").unwrap(),
            vec![Method::AlgI, Method::AlgIII]
        );
        assert!(parse_methods("alg9").is_err());
    }

    #[test]
    fn line_fit_of_concurrent_rays() {
        let target = Point2::new(0.3, -0.2);
        let rays: Vec<Ray> = [(1.0, 0.0), (0.0, 1.0), (-1.0, -1.0)]
            .iter()
            .map(|&(x, y)| {
                let o = Point2::new(x, y);
                Ray::new(o, target - o).unwrap()
            })
            .collect();
        assert!(distance(line_fit(&rays).unwrap(), target) < 1e-12);
    }
}
