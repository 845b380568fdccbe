//! Invert, re-synthesize and compare: error metrology for the inversion methods.

use std::collections::HashMap;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::forward::{
    build_voronoi, detect_degeneracy, DegeneracyVerdict, ForwardError, GeneratorSet,
    VoronoiDiagram, MIN_GENERATOR_SEPARATION,
};
use crate::geom::{distance, Point2, Rect};
use crate::invert::{
    invert, invert_with_faces, GeneratorEstimate, InvertError, InvertOptions, Method,
};
use crate::tess::{displace_vertex, format_real, perturb_vertices, Tessellation};
use crate::tess::{extract_subdivision, Polygon, Subdivision};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HarnessError {
    #[error("estimates {0} and {1} coincide")]
    DuplicateEstimates(usize, usize),
    #[error("estimate {0} is not finite")]
    NonFiniteEstimate(usize),
    #[error("sweep needs at least one sigma, seed and method")]
    EmptySweep,
    #[error("sigma must be finite and nonnegative, got {0}")]
    InvalidSigma(f64),
    #[error("no invertible configuration found after {0} attempts")]
    NoInvertibleSample(usize),
    #[error(transparent)]
    Forward(#[from] ForwardError),
    #[error(transparent)]
    Invert(#[from] InvertError),
}

/// Forward diagram of the estimated generators. The bounds are enlarged when
/// an estimate falls outside them.
pub fn resynthesize(est: &GeneratorEstimate, bounds: Rect) -> Result<VoronoiDiagram, HarnessError> {
    resynthesize_points(&est.positions, bounds)
}

pub fn resynthesize_points(
    points: &[Point2],
    bounds: Rect,
) -> Result<VoronoiDiagram, HarnessError> {
    if let Some(i) = points.iter().position(|p| !p.is_finite()) {
        return Err(HarnessError::NonFiniteEstimate(i));
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].x.total_cmp(&points[b].x).then(a.cmp(&b)));
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if points[j].x - points[i].x > MIN_GENERATOR_SEPARATION {
                break;
            }
            if distance(points[i], points[j]) <= MIN_GENERATOR_SEPARATION {
                return Err(HarnessError::DuplicateEstimates(i.min(j), i.max(j)));
            }
        }
    }
    let mut b = bounds;
    if !points.iter().all(|&p| bounds.contains_strictly(p)) {
        let hull =
            Rect::bounding(points.iter().copied().chain(bounds.corners())).expect("nonempty");
        b = hull.expanded(0.01 * hull.diagonal());
    }
    Ok(build_voronoi(&GeneratorSet::new(points.to_vec(), b)?)?)
}

/// Vertex agreement between two tessellations.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexMatch {
    /// RMS distance over matched pairs; NaN when nothing matched.
    pub vertex_rms: f64,
    /// Matched pairs over the larger ordinary vertex count.
    pub matched_fraction: f64,
    pub n_matched: usize,
    pub no_matches: bool,
}

/// Greedy one-to-one matching of ordinary vertices by ascending distance,
/// restricted to pairs closer than `match_radius`.
pub fn vertex_rms_error(a: &Tessellation, b: &Tessellation, match_radius: f64) -> VertexMatch {
    let pa: Vec<Point2> = (0..a.n_ordinary()).map(|v| a.vertex(v)).collect();
    let pb: Vec<Point2> = (0..b.n_ordinary()).map(|v| b.vertex(v)).collect();
    let total = pa.len().max(pb.len());
    let scale = pa
        .iter()
        .chain(&pb)
        .map(|p| p.x.abs().max(p.y.abs()))
        .fold(1.0, f64::max);
    let cell = match_radius.max(1e-12 * scale);
    let key = |p: Point2| ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (j, &p) in pb.iter().enumerate() {
        grid.entry(key(p)).or_default().push(j);
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, &p) in pa.iter().enumerate() {
        let (kx, ky) = key(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(list) = grid.get(&(kx + dx, ky + dy)) {
                    for &j in list {
                        let d = distance(p, pb[j]);
                        if d <= match_radius {
                            pairs.push((d, i, j));
                        }
                    }
                }
            }
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
    let mut used_a = vec![false; pa.len()];
    let mut used_b = vec![false; pb.len()];
    let (mut n, mut sum) = (0usize, 0.0);
    for (d, i, j) in pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            n += 1;
            sum += d * d;
        }
    }
    VertexMatch {
        vertex_rms: if n > 0 {
            (sum / n as f64).sqrt()
        } else {
            f64::NAN
        },
        matched_fraction: if total > 0 {
            n as f64 / total as f64
        } else {
            1.0
        },
        n_matched: n,
        no_matches: n == 0,
    }
}

/// `5·sigma` when noise is known and positive, else 1% of `diagonal`.
pub fn default_match_radius(sigma: Option<f64>, diagonal: f64) -> f64 {
    match sigma {
        Some(s) if s > 0.0 => 5.0 * s,
        _ => 0.01 * diagonal,
    }
}

/// One (sigma, seed, method) outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub sigma: f64,
    pub seed: u64,
    pub method: Method,
    /// RMS distance from each polygon's estimate to its true generator.
    pub generator_rms: Option<f64>,
    /// Observed tessellation against the re-synthesized diagram.
    pub vertex_rms: f64,
    pub matched_fraction: f64,
    /// `ok`, or the first failure.
    pub status: String,
}

impl ErrorReport {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SweepOptions {
    pub invert: InvertOptions,
    /// Overrides [`default_match_radius`].
    pub match_radius: Option<f64>,
}

fn status_of(e: &impl std::fmt::Display) -> String {
    e.to_string().replace([',', '\n'], ";")
}

/// Observed configuration shared by the rows of a sweep.
#[derive(Debug, Clone)]
pub struct SweepBase {
    pub tessellation: Tessellation,
    /// Faces used for every inversion; perturbation keeps vertex indices.
    pub faces: Subdivision,
    /// True generator of each face, when known.
    pub truth: Option<Vec<Option<Point2>>>,
    /// Region handed to the re-synthesis.
    pub bounds: Rect,
}

impl SweepBase {
    pub fn from_diagram(d: &VoronoiDiagram) -> Self {
        SweepBase {
            tessellation: d.tessellation().clone(),
            faces: d.subdivision().clone(),
            truth: Some(d.generators_by_cell().into_iter().map(Some).collect()),
            bounds: d.generators().bounds(),
        }
    }

    /// Faces are extracted from `t`; each face is assigned the generator of
    /// `truth` that lies inside it.
    pub fn from_tessellation(
        t: Tessellation,
        truth: Option<&[Point2]>,
    ) -> Result<Self, HarnessError> {
        let faces = extract_subdivision(&t).map_err(InvertError::from)?;
        let bounds = t.bounding_box().ok_or(HarnessError::EmptySweep)?;
        let truth = truth.map(|pts| {
            faces
                .polygons
                .iter()
                .map(|poly| {
                    pts.iter()
                        .copied()
                        .find(|&p| inside_open_polygon(&t, poly, p))
                })
                .collect()
        });
        Ok(SweepBase {
            tessellation: t,
            faces,
            truth,
            bounds,
        })
    }
}

/// Whether `p` lies on the inner side of every edge of a counterclockwise
/// polygon, ignoring the closing edge between two dummies.
pub fn inside_open_polygon(t: &Tessellation, poly: &Polygon, p: Point2) -> bool {
    let k = poly.len();
    (0..k).all(|a| {
        let (u, v) = (poly.vertex_indices[a], poly.vertex_indices[(a + 1) % k]);
        if t.is_dummy(u) && t.is_dummy(v) {
            return true;
        }
        (t.vertex(v) - t.vertex(u)).cross(p - t.vertex(u)) >= 0.0
    })
}

/// Per-polygon distance to the truth (infinite where inversion failed) and the
/// first problem met.
fn generator_errors(
    truth: &[Option<Point2>],
    est: &GeneratorEstimate,
) -> (Vec<f64>, Option<String>) {
    let mut errs = Vec::with_capacity(est.positions.len());
    let mut problem = None;
    for (i, p) in est.positions.iter().enumerate() {
        match truth.get(i).copied().flatten() {
            Some(q) if p.is_finite() => errs.push(distance(*p, q)),
            Some(_) => {
                problem.get_or_insert_with(|| match &est.per_polygon[i].error {
                    Some(e) => status_of(e),
                    None => format!("polygon {i} has no estimate"),
                });
                errs.push(f64::INFINITY);
            }
            None => {
                problem.get_or_insert_with(|| format!("polygon {i} has no true generator"));
                errs.push(f64::INFINITY);
            }
        }
    }
    (errs, problem)
}

fn rms(values: &[f64]) -> f64 {
    (values.iter().map(|v| v * v).sum::<f64>() / values.len().max(1) as f64).sqrt()
}

fn estimate_or_status(
    observed: &Tessellation,
    faces: &Subdivision,
    method: Method,
    opts: &InvertOptions,
) -> (Option<GeneratorEstimate>, String) {
    match invert_with_faces(observed, faces, method, opts) {
        Ok(e) => {
            let status = e
                .first_error()
                .map(status_of)
                .unwrap_or_else(|| "ok".into());
            (Some(e), status)
        }
        Err(InvertError::RankDeficient { estimate, .. }) => {
            (Some(*estimate), "rank deficient".into())
        }
        Err(e) => (None, status_of(&e)),
    }
}

/// Inverts `observed` (the base tessellation with moved vertices) and scores it.
pub fn evaluate(
    base: &SweepBase,
    observed: &Tessellation,
    method: Method,
    sigma: f64,
    seed: u64,
    opts: &SweepOptions,
) -> ErrorReport {
    let (est, status) = estimate_or_status(observed, &base.faces, method, &opts.invert);
    let mut report = ErrorReport {
        sigma,
        seed,
        method,
        generator_rms: None,
        vertex_rms: f64::NAN,
        matched_fraction: 0.0,
        status,
    };
    let Some(est) = est else { return report };
    if let Some(truth) = &base.truth {
        let (errs, problem) = generator_errors(truth, &est);
        if let (Some(p), true) = (problem, report.is_ok()) {
            report.status = p;
        }
        let finite: Vec<f64> = errs.into_iter().filter(|e| e.is_finite()).collect();
        report.generator_rms = (!finite.is_empty()).then(|| rms(&finite));
    }
    let radius = opts
        .match_radius
        .unwrap_or_else(|| default_match_radius(Some(sigma), base.bounds.diagonal()));
    if est.positions.iter().all(|p| p.is_finite()) {
        match resynthesize(&est, base.bounds) {
            Ok(re) => {
                let m = vertex_rms_error(observed, re.tessellation(), radius);
                report.vertex_rms = m.vertex_rms;
                report.matched_fraction = m.matched_fraction;
            }
            Err(e) if report.is_ok() => report.status = status_of(&e),
            Err(_) => {}
        }
    }
    report
}

/// Perturbs the base tessellation for every (sigma, seed) and scores each
/// method. Rows are ordered by sigma, then seed, then method, as given.
pub fn sweep(
    base: &SweepBase,
    sigmas: &[f64],
    seeds: &[u64],
    methods: &[Method],
    opts: &SweepOptions,
) -> Result<Vec<ErrorReport>, HarnessError> {
    if sigmas.is_empty() || seeds.is_empty() || methods.is_empty() {
        return Err(HarnessError::EmptySweep);
    }
    if let Some(&s) = sigmas.iter().find(|s| !(s.is_finite() && **s >= 0.0)) {
        return Err(HarnessError::InvalidSigma(s));
    }
    let jobs: Vec<(f64, u64)> = sigmas
        .iter()
        .flat_map(|&s| seeds.iter().map(move |&seed| (s, seed)))
        .collect();
    let rows: Vec<Vec<ErrorReport>> = jobs
        .par_iter()
        .map(|&(sigma, seed)| {
            let observed = perturb_vertices(&base.tessellation, sigma, seed);
            methods
                .iter()
                .map(|&m| evaluate(base, &observed, m, sigma, seed, opts))
                .collect()
        })
        .collect();
    Ok(rows.into_iter().flatten().collect())
}

/// [`sweep`] over the forward diagram of `g`.
pub fn noise_sweep(
    g: &GeneratorSet,
    sigmas: &[f64],
    seeds: &[u64],
    methods: &[Method],
    opts: &SweepOptions,
) -> Result<Vec<ErrorReport>, HarnessError> {
    if sigmas.is_empty() || seeds.is_empty() || methods.is_empty() {
        return Err(HarnessError::EmptySweep);
    }
    sweep(
        &SweepBase::from_diagram(&build_voronoi(g)?),
        sigmas,
        seeds,
        methods,
        opts,
    )
}

pub const SWEEP_CSV_HEADER: &str =
    "sigma,seed,method,generator_rms,vertex_rms,matched_fraction,status";

pub fn sweep_csv(rows: &[ErrorReport]) -> String {
    let mut out = format!("{SWEEP_CSV_HEADER}\n");
    for r in rows {
        let g = r.generator_rms.map(format_real).unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{g},{},{},{}",
            format_real(r.sigma),
            r.seed,
            r.method,
            format_real(r.vertex_rms),
            format_real(r.matched_fraction),
            r.status
        );
    }
    out
}

/// Median of `values`; NaN for an empty list.
pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        let (a, b) = (v[k / 2 - 1], v[k / 2]);
        if a == b {
            a
        } else {
            a / 2.0 + b / 2.0
        }
    }
}

/// Per (sigma, method) medians. Failed rows count as infinite error.
#[derive(Debug, Clone, PartialEq)]
pub struct MedianRow {
    pub sigma: f64,
    pub method: Method,
    pub median_generator_rms: f64,
    pub median_vertex_rms: f64,
    pub n_rows: usize,
    pub n_failed: usize,
}

pub fn median_table(rows: &[ErrorReport]) -> Vec<MedianRow> {
    let mut keys: Vec<(f64, Method)> = Vec::new();
    for r in rows {
        if !keys.iter().any(|&(s, m)| s == r.sigma && m == r.method) {
            keys.push((r.sigma, r.method));
        }
    }
    keys.into_iter()
        .map(|(sigma, method)| {
            let sel: Vec<&ErrorReport> = rows
                .iter()
                .filter(|r| r.sigma == sigma && r.method == method)
                .collect();
            let score = |r: &&ErrorReport, v: Option<f64>| match v {
                Some(x) if r.is_ok() && x.is_finite() => x,
                _ => f64::INFINITY,
            };
            let g: Vec<f64> = sel.iter().map(|r| score(r, r.generator_rms)).collect();
            let v: Vec<f64> = sel.iter().map(|r| score(r, Some(r.vertex_rms))).collect();
            MedianRow {
                sigma,
                method,
                median_generator_rms: median(&g),
                median_vertex_rms: median(&v),
                n_rows: sel.len(),
                n_failed: sel.iter().filter(|r| !r.is_ok()).count(),
            }
        })
        .collect()
}

pub fn format_median_table(table: &[MedianRow]) -> String {
    let mut out = format!(
        "{:>12} {:>6} {:>22} {:>22} {:>6} {:>6}\n",
        "sigma", "method", "median_generator_rms", "median_vertex_rms", "rows", "failed"
    );
    for r in table {
        let _ = writeln!(
            out,
            "{:>12.3e} {:>6} {:>22.6e} {:>22.6e} {:>6} {:>6}",
            r.sigma, r.method, r.median_generator_rms, r.median_vertex_rms, r.n_rows, r.n_failed
        );
    }
    out
}

/// Per-polygon effect of one grossly misplaced vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct OutlierReport {
    pub method: Method,
    pub vertex: usize,
    pub displacement: Point2,
    /// `(polygon, near, error)`: `near` marks polygons containing the vertex or
    /// one of its neighbors; error is infinite where inversion failed.
    pub per_polygon: Vec<(usize, bool, f64)>,
    pub status: String,
}

/// Displaces one randomly chosen ordinary vertex by `fraction` of the bounds
/// diagonal in a random direction and reports each polygon's error.
pub fn outlier_study(
    g: &GeneratorSet,
    seed: u64,
    fraction: f64,
    methods: &[Method],
    opts: &InvertOptions,
) -> Result<Vec<OutlierReport>, HarnessError> {
    let truth = build_voronoi(g)?;
    let base = SweepBase::from_diagram(&truth);
    let t = truth.tessellation();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertex = rng.random_range(0..t.n_ordinary());
    let angle = rng.random_range(0.0..std::f64::consts::TAU);
    let displacement = Point2::new(angle.cos(), angle.sin()) * (fraction * g.bounds().diagonal());
    let observed = displace_vertex(t, vertex, displacement);
    let mut near_set = vec![vertex];
    near_set.extend_from_slice(t.neighbors(vertex));
    let truth_points = base.truth.as_deref().expect("diagram truth");
    Ok(methods
        .iter()
        .map(|&method| {
            let (est, status) = estimate_or_status(&observed, &base.faces, method, opts);
            let mut report = OutlierReport {
                method,
                vertex,
                displacement,
                per_polygon: Vec::new(),
                status,
            };
            if let Some(est) = est {
                let (errs, _) = generator_errors(truth_points, &est);
                report.per_polygon = est
                    .polygons
                    .iter()
                    .zip(errs)
                    .enumerate()
                    .map(|(i, (poly, e))| {
                        let near = poly.vertex_indices.iter().any(|v| near_set.contains(v));
                        (i, near, e)
                    })
                    .collect();
            }
            report
        })
        .collect())
}

pub const OUTLIER_CSV_HEADER: &str = "method,vertex,polygon,near,error,status";

pub fn outlier_csv(reports: &[OutlierReport]) -> String {
    let mut out = format!("{OUTLIER_CSV_HEADER}\n");
    for r in reports {
        for &(p, near, e) in &r.per_polygon {
            let _ = writeln!(
                out,
                "{},{},{p},{near},{},{}",
                r.method,
                r.vertex,
                format_real(e),
                r.status
            );
        }
        if r.per_polygon.is_empty() {
            let _ = writeln!(out, "{},{},,,,{}", r.method, r.vertex, r.status);
        }
    }
    out
}

impl OutlierReport {
    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

/// `n` uniform points strictly inside `bounds`.
pub fn random_generators(n: usize, bounds: Rect, seed: u64) -> Result<GeneratorSet, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = (0..n)
        .map(|_| {
            Point2::new(
                bounds.min.x + bounds.width() * rng.random::<f64>(),
                bounds.min.y + bounds.height() * rng.random::<f64>(),
            )
        })
        .collect();
    Ok(GeneratorSet::new(pts, bounds)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lattice {
    /// Triangular lattice; its cells form a honeycomb.
    Hex,
    Square,
}

impl std::str::FromStr for Lattice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hex" => Ok(Lattice::Hex),
            "square" => Ok(Lattice::Square),
            other => Err(format!(
                "unknown lattice `{other}` (expected hex or square)"
            )),
        }
    }
}

/// Unit-spacing lattice of `rows × cols` points, with bounds half a spacing
/// beyond the outermost points.
pub fn lattice_generators(
    kind: Lattice,
    rows: usize,
    cols: usize,
) -> Result<GeneratorSet, HarnessError> {
    let h = 3f64.sqrt() / 2.0;
    let mut pts = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            pts.push(match kind {
                Lattice::Hex => {
                    Point2::new(c as f64 + if r % 2 == 1 { 0.5 } else { 0.0 }, r as f64 * h)
                }
                Lattice::Square => Point2::new(c as f64, r as f64),
            });
        }
    }
    let bounds = Rect::bounding(pts.iter().copied())
        .unwrap_or(Rect::new(0.0, 0.0, 0.0, 0.0))
        .expanded(0.5);
    Ok(GeneratorSet::new(pts, bounds)?)
}

/// Whether every polygon of `d` can be inverted by ray intersection: no
/// degenerate vertices and at least two usable vertices per polygon.
pub fn is_invertible(d: &VoronoiDiagram) -> bool {
    if detect_degeneracy(d) != DegeneracyVerdict::NonDegenerate {
        return false;
    }
    let t = d.tessellation();
    if (0..t.n_ordinary()).any(|v| t.degree(v) != 3) {
        return false;
    }
    match invert(t, Method::AlgI, &InvertOptions::default()) {
        Ok(e) => e
            .per_polygon
            .iter()
            .all(|p| p.error.is_none() && p.n_usable_vertices >= 2),
        Err(_) => false,
    }
}

/// First random configuration (seeds `seed`, `seed + 1`, …) whose diagram is
/// invertible. Returns the set, its diagram and the number of rejected draws.
pub fn sample_invertible(
    n: usize,
    bounds: Rect,
    seed: u64,
    max_attempts: usize,
) -> Result<(GeneratorSet, VoronoiDiagram, usize), HarnessError> {
    for k in 0..max_attempts {
        let g = random_generators(n, bounds, seed.wrapping_add(k as u64))?;
        let d = build_voronoi(&g)?;
        if is_invertible(&d) {
            return Ok((g, d, k));
        }
    }
    Err(HarnessError::NoInvertibleSample(max_attempts))
}
