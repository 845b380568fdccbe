//! Forward construction of planar Voronoi diagrams.
//!
//! Each cell is the intersection of the half-planes `H(p_i, p_j)`, computed by
//! clipping a large working square with the bisectors of nearby generators in
//! growing rings of a bucket grid. Clipping for a cell stops once no unvisited
//! generator can be close enough to cut it.
//!
//! The resulting tessellation keeps every finite Voronoi vertex as an ordinary
//! vertex. Each infinite edge ends in a dummy placed where it leaves the *frame*:
//! the bounds rectangle, or a slightly padded rectangle around the bounds and
//! every Voronoi vertex when some vertex falls outside the bounds.

use std::collections::HashMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::geom::{circumcircle, distance, Circle, Point2, Rect};
use crate::tess::{
    self, extract_subdivision, format_real, Polygon, Subdivision, TessError, Tessellation,
};

/// Default distance under which Voronoi vertices are merged.
pub const DEFAULT_MERGE_TOLERANCE: f64 = 1e-9;
/// Minimum allowed distance between two generators.
pub const MIN_GENERATOR_SEPARATION: f64 = 1e-9;
/// Half-width of the working square, in multiples of the bounds diagonal.
const WORK_RADIUS: f64 = 1e4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ForwardError {
    #[error("need at least 2 generators, got {0}")]
    TooFewGenerators(usize),
    #[error("generators {0} and {1} coincide")]
    DuplicateGenerators(usize, usize),
    #[error("generator {0} is not strictly inside the bounds")]
    GeneratorOutsideBounds(usize),
    #[error("bounds must be finite with min < max")]
    InvalidBounds,
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("vertex {0} is not an interior Voronoi vertex")]
    NotInteriorVertex(usize),
    #[error("resolution must be at least 2")]
    InvalidResolution,
    #[error(transparent)]
    Tess(#[from] TessError),
    #[error("inconsistent diagram: {0}")]
    Inconsistent(String),
}

/// Generator points and the rectangle they live in.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSet {
    points: Vec<Point2>,
    bounds: Rect,
}

impl GeneratorSet {
    pub fn new(points: Vec<Point2>, bounds: Rect) -> Result<Self, ForwardError> {
        if !bounds.is_valid() {
            return Err(ForwardError::InvalidBounds);
        }
        if points.len() < 2 {
            return Err(ForwardError::TooFewGenerators(points.len()));
        }
        if let Some(i) = points
            .iter()
            .position(|&p| !p.is_finite() || !bounds.contains_strictly(p))
        {
            return Err(ForwardError::GeneratorOutsideBounds(i));
        }
        if let Some((i, j)) = closest_pair_below(&points, MIN_GENERATOR_SEPARATION) {
            return Err(ForwardError::DuplicateGenerators(i.min(j), i.max(j)));
        }
        Ok(Self { points, bounds })
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn bounds(&self) -> Rect {
        self.bounds
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Applies `f` to the generators and to the bounds corners.
    pub fn map(&self, f: impl Fn(Point2) -> Point2) -> Result<GeneratorSet, ForwardError> {
        let a = f(self.bounds.min);
        let b = f(self.bounds.max);
        let bounds = Rect::new(a.x.min(b.x), a.y.min(b.y), a.x.max(b.x), a.y.max(b.y));
        GeneratorSet::new(self.points.iter().map(|&p| f(p)).collect(), bounds)
    }
}

/// First pair (in index order of the sweep) closer than `tol`.
fn closest_pair_below(points: &[Point2], tol: f64) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].x.total_cmp(&points[b].x).then(a.cmp(&b)));
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if points[j].x - points[i].x > tol {
                break;
            }
            if distance(points[i], points[j]) <= tol {
                return Some((i, j));
            }
        }
    }
    None
}

/// Uniform bucket grid over a rectangle for neighbor queries.
pub(crate) struct PointGrid {
    origin: Point2,
    cell: Point2,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<usize>>,
}

impl PointGrid {
    pub(crate) fn new(points: &[Point2], bounds: Rect) -> Self {
        let side = ((points.len() as f64 / 2.0).sqrt().ceil() as usize).max(1);
        let (nx, ny) = (side, side);
        let cell = Point2::new(bounds.width() / nx as f64, bounds.height() / ny as f64);
        let mut grid = PointGrid {
            origin: bounds.min,
            cell,
            nx,
            ny,
            buckets: vec![Vec::new(); nx * ny],
        };
        for (i, &p) in points.iter().enumerate() {
            let (cx, cy) = grid.cell_of(p);
            grid.buckets[cy * nx + cx].push(i);
        }
        grid
    }

    fn cell_of(&self, p: Point2) -> (usize, usize) {
        let fx = ((p.x - self.origin.x) / self.cell.x).floor();
        let fy = ((p.y - self.origin.y) / self.cell.y).floor();
        (
            (fx.max(0.0) as usize).min(self.nx - 1),
            (fy.max(0.0) as usize).min(self.ny - 1),
        )
    }

    fn min_cell_side(&self) -> f64 {
        self.cell.x.min(self.cell.y)
    }

    fn max_ring(&self) -> usize {
        self.nx.max(self.ny)
    }

    /// Calls `f` for each point in the square ring at Chebyshev distance `r`.
    fn for_each_in_ring(&self, center: (usize, usize), r: usize, mut f: impl FnMut(usize)) {
        let (cx, cy) = (center.0 as isize, center.1 as isize);
        let r = r as isize;
        for dy in -r..=r {
            let y = cy + dy;
            if y < 0 || y >= self.ny as isize {
                continue;
            }
            let step = if dy.abs() == r { 1 } else { (2 * r).max(1) };
            let mut dx = -r;
            while dx <= r {
                let x = cx + dx;
                if x >= 0 && x < self.nx as isize {
                    for &i in &self.buckets[y as usize * self.nx + x as usize] {
                        f(i);
                    }
                }
                dx += step;
            }
        }
    }

    /// Nearest point to `q`, ties broken by lowest index.
    pub(crate) fn nearest(&self, points: &[Point2], q: Point2) -> usize {
        let c = self.cell_of(q);
        let mut best = (f64::INFINITY, usize::MAX);
        // Lower bound on the distance from q to any point in ring r + 1.
        let qcx = self.origin.x + self.cell.x * c.0 as f64;
        let qcy = self.origin.y + self.cell.y * c.1 as f64;
        let inner = (q.x - qcx)
            .min(qcx + self.cell.x - q.x)
            .min(q.y - qcy)
            .min(qcy + self.cell.y - q.y)
            .max(0.0);
        for r in 0..=self.max_ring() {
            self.for_each_in_ring(c, r, |i| {
                let d = (points[i] - q).norm_squared();
                if d < best.0 || (d == best.0 && i < best.1) {
                    best = (d, i);
                }
            });
            let reach = inner + r as f64 * self.min_cell_side();
            if best.1 != usize::MAX && reach * reach > best.0 {
                break;
            }
        }
        best.1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Label {
    Gen(usize),
    Wall,
}

/// Half-plane `normal · x <= offset` with a unit normal.
#[derive(Debug, Clone, Copy)]
struct HalfPlane {
    normal: Point2,
    offset: f64,
}

impl HalfPlane {
    fn bisector(p: Point2, q: Point2) -> HalfPlane {
        let normal = (q - p).normalized().expect("distinct generators");
        HalfPlane {
            normal,
            offset: normal.dot(p.midpoint(q)),
        }
    }

    fn eval(&self, x: Point2) -> f64 {
        self.normal.dot(x) - self.offset
    }

    fn intersect(&self, o: &HalfPlane) -> Option<Point2> {
        let det = self.normal.cross(o.normal);
        if det.abs() < 1e-14 {
            return None;
        }
        let x = (self.offset * o.normal.y - o.offset * self.normal.y) / det;
        let y = (self.normal.x * o.offset - o.normal.x * self.offset) / det;
        Some(Point2::new(x, y))
    }
}

/// Convex cell under construction; `labels[k]` names the edge `verts[k] -> verts[k+1]`.
#[derive(Debug, Clone)]
struct Cell {
    verts: Vec<Point2>,
    labels: Vec<Label>,
    lines: Vec<HalfPlane>,
}

struct CellBuilder<'a> {
    points: &'a [Point2],
    center: Point2,
    scale: f64,
}

impl CellBuilder<'_> {
    fn eps(&self, x: Point2) -> f64 {
        1e-12 * (self.scale + distance(x, self.center))
    }

    fn initial(&self, work: Rect) -> Cell {
        let c = work.corners();
        let walls = [
            HalfPlane {
                normal: Point2::new(0.0, -1.0),
                offset: -work.min.y,
            },
            HalfPlane {
                normal: Point2::new(1.0, 0.0),
                offset: work.max.x,
            },
            HalfPlane {
                normal: Point2::new(0.0, 1.0),
                offset: work.max.y,
            },
            HalfPlane {
                normal: Point2::new(-1.0, 0.0),
                offset: -work.min.x,
            },
        ];
        Cell {
            verts: c.to_vec(),
            labels: vec![Label::Wall; 4],
            lines: walls.to_vec(),
        }
    }

    fn clip(&self, cell: &mut Cell, i: usize, j: usize) {
        let h = HalfPlane::bisector(self.points[i], self.points[j]);
        let k = cell.verts.len();
        let d: Vec<f64> = cell.verts.iter().map(|&v| h.eval(v)).collect();
        let inside: Vec<bool> = cell
            .verts
            .iter()
            .zip(&d)
            .map(|(&v, &dv)| dv <= self.eps(v))
            .collect();
        if inside.iter().all(|&b| b) {
            return;
        }
        let mut verts = Vec::with_capacity(k + 1);
        let mut labels = Vec::with_capacity(k + 1);
        let mut lines = Vec::with_capacity(k + 1);
        for a in 0..k {
            let b = (a + 1) % k;
            let crossing = |cell: &Cell| -> Point2 {
                cell.lines[a].intersect(&h).unwrap_or_else(|| {
                    let t = d[a] / (d[a] - d[b]);
                    cell.verts[a] + (cell.verts[b] - cell.verts[a]) * t
                })
            };
            match (inside[a], inside[b]) {
                (true, true) => {
                    verts.push(cell.verts[a]);
                    labels.push(cell.labels[a]);
                    lines.push(cell.lines[a]);
                }
                (true, false) => {
                    verts.push(cell.verts[a]);
                    labels.push(cell.labels[a]);
                    lines.push(cell.lines[a]);
                    verts.push(crossing(cell));
                    labels.push(Label::Gen(j));
                    lines.push(h);
                }
                (false, true) => {
                    verts.push(crossing(cell));
                    labels.push(cell.labels[a]);
                    lines.push(cell.lines[a]);
                }
                (false, false) => {}
            }
        }
        cell.verts = verts;
        cell.labels = labels;
        cell.lines = lines;
    }

    fn build(&self, grid: &PointGrid, work: Rect, i: usize) -> Cell {
        let p = self.points[i];
        let mut cell = self.initial(work);
        let c = grid.cell_of(p);
        let h = grid.min_cell_side();
        let mut ring_pts: Vec<(f64, usize)> = Vec::new();
        for r in 0..=grid.max_ring() {
            ring_pts.clear();
            grid.for_each_in_ring(c, r, |j| {
                if j != i {
                    ring_pts.push(((self.points[j] - p).norm_squared(), j));
                }
            });
            ring_pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            for &(_, j) in &ring_pts {
                self.clip(&mut cell, i, j);
            }
            let radius = cell
                .verts
                .iter()
                .map(|&v| distance(v, p))
                .fold(0.0, f64::max);
            if r as f64 * h > 2.0 * radius * (1.0 + 1e-9) {
                break;
            }
        }
        cell
    }
}

/// Sutherland–Hodgman clip of a convex polygon to a rectangle.
fn clip_to_rect(poly: &[Point2], r: &Rect) -> Vec<Point2> {
    let planes = [
        (Point2::new(0.0, -1.0), -r.min.y),
        (Point2::new(1.0, 0.0), r.max.x),
        (Point2::new(0.0, 1.0), r.max.y),
        (Point2::new(-1.0, 0.0), -r.min.x),
    ];
    let mut cur = poly.to_vec();
    for (n, c) in planes {
        if cur.is_empty() {
            break;
        }
        let mut out = Vec::with_capacity(cur.len() + 1);
        let k = cur.len();
        for a in 0..k {
            let pa = cur[a];
            let pb = cur[(a + 1) % k];
            let da = n.dot(pa) - c;
            let db = n.dot(pb) - c;
            if da <= 0.0 {
                out.push(pa);
            }
            if (da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0) {
                let t = da / (da - db);
                out.push(pa + (pb - pa) * t);
            }
        }
        cur = out;
    }
    cur
}

/// Options for [`build_voronoi_with`].
#[derive(Debug, Clone, Copy)]
pub struct BuildOptions {
    /// Voronoi vertices closer than this are merged into one.
    pub merge_tolerance: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            merge_tolerance: DEFAULT_MERGE_TOLERANCE,
        }
    }
}

/// A Voronoi diagram, its tessellation and the cell/generator correspondence.
#[derive(Debug, Clone)]
pub struct VoronoiDiagram {
    generators: GeneratorSet,
    tessellation: Tessellation,
    frame: Rect,
    subdivision: Subdivision,
    generator_of_cell: Vec<usize>,
    cell_of_generator: Vec<usize>,
    regions: Vec<Vec<Point2>>,
    vertex_generators: Vec<Vec<usize>>,
}

impl VoronoiDiagram {
    pub fn generators(&self) -> &GeneratorSet {
        &self.generators
    }

    pub fn tessellation(&self) -> &Tessellation {
        &self.tessellation
    }

    pub fn into_tessellation(self) -> Tessellation {
        self.tessellation
    }

    /// Rectangle carrying the dummies; contains the bounds and every ordinary vertex.
    pub fn frame(&self) -> Rect {
        self.frame
    }

    /// Faces of the tessellation, in extraction order.
    pub fn cells(&self) -> &[Polygon] {
        &self.subdivision.polygons
    }

    /// Faces and the faces on either side of every edge.
    pub fn subdivision(&self) -> &Subdivision {
        &self.subdivision
    }

    pub fn generator_of_cell(&self) -> &[usize] {
        &self.generator_of_cell
    }

    pub fn cell_of_generator(&self, g: usize) -> &Polygon {
        &self.subdivision.polygons[self.cell_of_generator[g]]
    }

    /// Cell `g` clipped to the bounds, counterclockwise.
    pub fn region(&self, g: usize) -> &[Point2] {
        &self.regions[g]
    }

    pub fn regions(&self) -> &[Vec<Point2>] {
        &self.regions
    }

    /// Generators whose cells meet at ordinary vertex `v` (empty for pass-through vertices).
    pub fn vertex_generators(&self, v: usize) -> &[usize] {
        &self.vertex_generators[v]
    }

    /// Ordinary vertices that are genuine Voronoi vertices.
    pub fn voronoi_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.tessellation.n_ordinary()).filter(|&v| self.vertex_generators[v].len() >= 3)
    }

    /// True generator positions listed in cell (extraction) order.
    pub fn generators_by_cell(&self) -> Vec<Point2> {
        self.generator_of_cell
            .iter()
            .map(|&g| self.generators.points[g])
            .collect()
    }
}

/// Builds the Voronoi diagram of `g` with default options.
pub fn build_voronoi(g: &GeneratorSet) -> Result<VoronoiDiagram, ForwardError> {
    build_voronoi_with(g, BuildOptions::default())
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum EndPoint {
    Vertex(usize),
    Wall(Point2),
}

pub fn build_voronoi_with(
    g: &GeneratorSet,
    opts: BuildOptions,
) -> Result<VoronoiDiagram, ForwardError> {
    let points = &g.points;
    let n = points.len();
    let bounds = g.bounds;
    let diag = bounds.diagonal();
    let work = {
        let c = bounds.center();
        let r = WORK_RADIUS * diag;
        Rect::new(c.x - r, c.y - r, c.x + r, c.y + r)
    };
    let grid = PointGrid::new(points, bounds);
    let builder = CellBuilder {
        points,
        center: bounds.center(),
        scale: diag,
    };
    let cells: Vec<Cell> = (0..n)
        .into_par_iter()
        .map(|i| builder.build(&grid, work, i))
        .collect();

    // Voronoi vertices keyed by their defining generator triple.
    let mut triple_index: HashMap<[usize; 3], usize> = HashMap::new();
    let mut triple_pos: Vec<Point2> = Vec::new();
    let mut triples: Vec<[usize; 3]> = Vec::new();
    let mut cell_vertex_triple: Vec<Vec<Option<usize>>> = vec![Vec::new(); n];
    // Visiting cells in Z-order numbers nearby vertices consecutively.
    for i in z_order(points, &bounds) {
        let cell = &cells[i];
        let k = cell.verts.len();
        let mut ids = Vec::with_capacity(k);
        for a in 0..k {
            let incoming = cell.labels[(a + k - 1) % k];
            let outgoing = cell.labels[a];
            match (incoming, outgoing) {
                (Label::Gen(x), Label::Gen(y)) if x != y => {
                    let mut key = [i, x, y];
                    key.sort_unstable();
                    let id = *triple_index.entry(key).or_insert_with(|| {
                        let pos = circumcircle(points[key[0]], points[key[1]], points[key[2]])
                            .map(|c| c.center)
                            .unwrap_or(cell.verts[a]);
                        triple_pos.push(pos);
                        triples.push(key);
                        triple_pos.len() - 1
                    });
                    ids.push(Some(id));
                }
                _ => ids.push(None),
            }
        }
        cell_vertex_triple[i] = ids;
    }

    // Merge coincident circumcenters.
    let cluster_of = cluster_points(&triple_pos, opts.merge_tolerance);
    let n_clusters = cluster_of.iter().copied().max().map_or(0, |m| m + 1);
    let mut vertex_pos = vec![Point2::default(); n_clusters];
    let mut vertex_count = vec![0usize; n_clusters];
    let mut vertex_generators: Vec<Vec<usize>> = vec![Vec::new(); n_clusters];
    for (t, &c) in cluster_of.iter().enumerate() {
        vertex_pos[c] = vertex_pos[c] + triple_pos[t];
        vertex_count[c] += 1;
        vertex_generators[c].extend_from_slice(&triples[t]);
    }
    for c in 0..n_clusters {
        vertex_pos[c] = vertex_pos[c] * (1.0 / vertex_count[c] as f64);
        vertex_generators[c].sort_unstable();
        vertex_generators[c].dedup();
    }

    // One edge per adjacent generator pair, taken from the first cell that has it.
    let mut edge_seen: HashMap<(usize, usize), ()> = HashMap::new();
    let mut edges: Vec<((usize, usize), EndPoint, EndPoint)> = Vec::new();
    for (i, cell) in cells.iter().enumerate() {
        let k = cell.verts.len();
        for a in 0..k {
            let Label::Gen(j) = cell.labels[a] else {
                continue;
            };
            let key = (i.min(j), i.max(j));
            if edge_seen.insert(key, ()).is_some() {
                continue;
            }
            let b = (a + 1) % k;
            let end = |idx: usize| match cell_vertex_triple[i][idx] {
                Some(t) => EndPoint::Vertex(cluster_of[t]),
                None => EndPoint::Wall(cell.verts[idx]),
            };
            edges.push((key, end(a), end(b)));
        }
    }

    // Pass-through vertices for edges with no finite endpoint.
    let mut midpoints: Vec<(usize, Point2, Point2, (usize, usize))> = Vec::new();
    for &(pair, a, b) in &edges {
        if let (EndPoint::Wall(wa), EndPoint::Wall(wb)) = (a, b) {
            let dir = (wb - wa).normalized().unwrap_or(Point2::new(1.0, 0.0));
            let c = bounds.center();
            let m = wa + dir * (c - wa).dot(dir);
            midpoints.push((n_clusters + midpoints.len(), m, dir, pair));
        }
    }

    let frame = {
        let margin = 1e-9 * diag;
        let inner = bounds.expanded(-margin);
        let all_inside = vertex_pos
            .iter()
            .chain(midpoints.iter().map(|m| &m.1))
            .all(|&p| inner.contains_strictly(p));
        if all_inside {
            bounds
        } else {
            let hull = Rect::bounding(
                vertex_pos
                    .iter()
                    .copied()
                    .chain(midpoints.iter().map(|m| m.1))
                    .chain(bounds.corners()),
            )
            .expect("nonempty");
            hull.expanded(0.01 * hull.diagonal())
        }
    };

    let n_ordinary = n_clusters + midpoints.len();
    let mut vertices: Vec<Point2> = vertex_pos.clone();
    vertices.extend(midpoints.iter().map(|m| m.1));
    vertex_generators.extend(midpoints.iter().map(|_| Vec::new()));
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); n_ordinary];
    let mut dummies: Vec<(usize, Point2)> = Vec::new();
    let mut edge_pairs: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    let exit_point = |origin: Point2, dir: Point2| -> Point2 {
        let t = frame
            .exit_parameter(origin, dir)
            .unwrap_or(1e-6 * frame.diagonal());
        origin + dir * t
    };
    let mut mid_iter = midpoints.iter();
    for &(pair, a, b) in &edges {
        match (a, b) {
            (EndPoint::Vertex(u), EndPoint::Vertex(v)) => {
                if u != v && !adjacency[u].contains(&v) {
                    adjacency[u].push(v);
                    adjacency[v].push(u);
                    edge_pairs.insert((u.min(v), u.max(v)), pair);
                }
            }
            (EndPoint::Vertex(u), EndPoint::Wall(w)) | (EndPoint::Wall(w), EndPoint::Vertex(u)) => {
                let axis = (points[pair.1] - points[pair.0])
                    .perp()
                    .normalized()
                    .expect("distinct");
                let dir = if axis.dot(w - vertex_pos[u]) >= 0.0 {
                    axis
                } else {
                    -axis
                };
                let pos = exit_point(vertex_pos[u], dir);
                let id = n_ordinary + dummies.len();
                dummies.push((u, pos));
                adjacency[u].push(id);
                edge_pairs.insert((u, id), pair);
            }
            (EndPoint::Wall(_), EndPoint::Wall(_)) => {
                let &(m, pos, dir, _) = mid_iter.next().expect("midpoint recorded");
                for d in [dir, -dir] {
                    let id = n_ordinary + dummies.len();
                    dummies.push((m, exit_point(pos, d)));
                    adjacency[m].push(id);
                    edge_pairs.insert((m, id), pair);
                }
            }
        }
    }
    vertices.extend(dummies.iter().map(|d| d.1));
    let tessellation = Tessellation::new(vertices, n_ordinary, adjacency)?;

    // Match faces to generators through the generator pair of a bounding edge.
    let sub = extract_subdivision(&tessellation)?;
    let mut generator_of_cell = Vec::with_capacity(sub.polygons.len());
    for poly in &sub.polygons {
        let vs = &poly.vertex_indices;
        let k = vs.len();
        let mut owner = None;
        for a in 0..k {
            let (u, v) = (vs[a], vs[(a + 1) % k]);
            if tessellation.is_dummy(u) && tessellation.is_dummy(v) {
                continue;
            }
            let Some(&(gi, gj)) = edge_pairs.get(&(u.min(v), u.max(v))) else {
                continue;
            };
            let pu = tessellation.vertex(u);
            let dir = tessellation.vertex(v) - pu;
            let si = dir.cross(points[gi] - pu);
            let sj = dir.cross(points[gj] - pu);
            owner = Some(if si >= sj { gi } else { gj });
            break;
        }
        generator_of_cell
            .push(owner.ok_or_else(|| {
                ForwardError::Inconsistent("face without a labelled edge".into())
            })?);
    }
    if generator_of_cell.len() != n {
        return Err(ForwardError::Inconsistent(format!(
            "{} faces for {n} generators",
            generator_of_cell.len()
        )));
    }
    let mut cell_of_generator = vec![usize::MAX; n];
    for (c, &gidx) in generator_of_cell.iter().enumerate() {
        if cell_of_generator[gidx] != usize::MAX {
            return Err(ForwardError::Inconsistent(format!(
                "generator {gidx} owns two faces"
            )));
        }
        cell_of_generator[gidx] = c;
    }

    let regions = cells
        .iter()
        .map(|c| clip_to_rect(&c.verts, &bounds))
        .collect();

    Ok(VoronoiDiagram {
        generators: g.clone(),
        tessellation,
        frame,
        subdivision: sub,
        generator_of_cell,
        cell_of_generator,
        regions,
        vertex_generators,
    })
}

/// Indices of `points` sorted along a Morton curve over `bounds`.
fn z_order(points: &[Point2], bounds: &Rect) -> Vec<usize> {
    fn spread_bits(mut v: u64) -> u64 {
        v &= 0xffff;
        v = (v | (v << 8)) & 0x00ff_00ff;
        v = (v | (v << 4)) & 0x0f0f_0f0f;
        v = (v | (v << 2)) & 0x3333_3333;
        (v | (v << 1)) & 0x5555_5555
    }
    let quantize =
        |v: f64, lo: f64, span: f64| ((v - lo) / span * 65535.0).clamp(0.0, 65535.0) as u64;
    let mut keyed: Vec<(u64, usize)> = points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let x = quantize(p.x, bounds.min.x, bounds.width());
            let y = quantize(p.y, bounds.min.y, bounds.height());
            (spread_bits(x) | (spread_bits(y) << 1), i)
        })
        .collect();
    keyed.sort_unstable();
    keyed.into_iter().map(|(_, i)| i).collect()
}

/// Groups points closer than `tol` (transitively); returns a cluster id per point,
/// numbered in order of first appearance.
fn cluster_points(points: &[Point2], tol: f64) -> Vec<usize> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    if tol > 0.0 {
        let key = |p: Point2| ((p.x / tol).floor() as i64, (p.y / tol).floor() as i64);
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, &p) in points.iter().enumerate() {
            let (kx, ky) = key(p);
            for dx in -1..=1 {
                for dy in -1..=1 {
                    if let Some(list) = buckets.get(&(kx + dx, ky + dy)) {
                        for &j in list {
                            if distance(points[i], points[j]) <= tol {
                                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                                if ri != rj {
                                    parent[ri.max(rj)] = ri.min(rj);
                                }
                            }
                        }
                    }
                }
            }
            buckets.entry((kx, ky)).or_default().push(i);
        }
    }
    let mut id_of_root: HashMap<usize, usize> = HashMap::new();
    (0..n)
        .map(|i| {
            let r = find(&mut parent, i);
            let next = id_of_root.len();
            *id_of_root.entry(r).or_insert(next)
        })
        .collect()
}

/// Outcome of [`detect_degeneracy`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DegeneracyVerdict {
    NonDegenerate,
    Degenerate(Vec<usize>),
}

/// Lists ordinary vertices where four or more edges meet.
pub fn detect_degeneracy(d: &VoronoiDiagram) -> DegeneracyVerdict {
    let t = &d.tessellation;
    let bad: Vec<usize> = (0..t.n_ordinary())
        .filter(|&v| t.degree(v) >= 4 || d.vertex_generators[v].len() >= 4)
        .collect();
    if bad.is_empty() {
        DegeneracyVerdict::NonDegenerate
    } else {
        DegeneracyVerdict::Degenerate(bad)
    }
}

/// The empty circle centered at a Voronoi vertex: radius is the distance to
/// the nearest generator.
pub fn largest_empty_circle_at(d: &VoronoiDiagram, vertex: usize) -> Result<Circle, ForwardError> {
    let t = &d.tessellation;
    if vertex >= t.n_ordinary() || d.vertex_generators[vertex].len() < 3 {
        return Err(ForwardError::NotInteriorVertex(vertex));
    }
    let center = t.vertex(vertex);
    let radius = d
        .generators
        .points
        .iter()
        .map(|&p| distance(center, p))
        .fold(f64::INFINITY, f64::min);
    Ok(Circle { center, radius })
}

/// Generators lying on `circle` within a relative tolerance.
pub fn generators_on_circle(g: &GeneratorSet, circle: &Circle, rel_tol: f64) -> Vec<usize> {
    let tol = rel_tol * circle.radius.max(1.0);
    g.points
        .iter()
        .enumerate()
        .filter(|(_, &p)| circle.signed_distance(p).abs() <= tol)
        .map(|(i, _)| i)
        .collect()
}

/// Nearest-generator labels on a square sample grid over the bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelGrid {
    pub resolution: usize,
    /// Row-major, row 0 at the lowest `y`.
    pub labels: Vec<usize>,
}

impl LabelGrid {
    pub fn get(&self, row: usize, col: usize) -> usize {
        self.labels[row * self.resolution + col]
    }
}

/// Center of sample `(row, col)` of a `resolution`² grid over `bounds`.
pub fn grid_sample(bounds: &Rect, resolution: usize, row: usize, col: usize) -> Point2 {
    let r = resolution as f64;
    Point2::new(
        bounds.min.x + (col as f64 + 0.5) * bounds.width() / r,
        bounds.min.y + (row as f64 + 0.5) * bounds.height() / r,
    )
}

/// Terminal state of equal-rate growth from every generator: each sample takes
/// the index of its nearest generator, lowest index on ties.
pub fn grid_growth_labels(g: &GeneratorSet, resolution: usize) -> Result<LabelGrid, ForwardError> {
    if resolution < 2 {
        return Err(ForwardError::InvalidResolution);
    }
    let grid = PointGrid::new(&g.points, g.bounds);
    let labels = (0..resolution)
        .into_par_iter()
        .flat_map_iter(|row| {
            let grid = &grid;
            (0..resolution).map(move |col| {
                grid.nearest(&g.points, grid_sample(&g.bounds, resolution, row, col))
            })
        })
        .collect();
    Ok(LabelGrid { resolution, labels })
}

/// Text dump: a `labels <resolution>` header, then rows from the top of the bounds down.
pub fn format_label_grid(grid: &LabelGrid) -> String {
    let mut out = format!("labels {}\n", grid.resolution);
    for row in (0..grid.resolution).rev() {
        let line: Vec<String> = (0..grid.resolution)
            .map(|c| grid.get(row, c).to_string())
            .collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

fn gen_err(line: usize, message: impl Into<String>) -> ForwardError {
    ForwardError::Format {
        line,
        message: message.into(),
    }
}

/// Parses the `gen` text format.
pub fn parse_generators(text: &str) -> Result<GeneratorSet, ForwardError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let real = |tok: Option<&str>, line: usize| {
        tess::parse_real_token(tok, line).map_err(|(l, m)| gen_err(l, m))
    };
    let (hl, header) = lines.next().ok_or_else(|| gen_err(1, "empty input"))?;
    let mut f = header.split_whitespace();
    if f.next() != Some("gen") {
        return Err(gen_err(hl, "expected header `gen <n>`"));
    }
    let n: usize = f
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| gen_err(hl, "bad generator count"))?;
    let (bl, bline) = lines
        .next()
        .ok_or_else(|| gen_err(hl, "missing bounds line"))?;
    let mut f = bline.split_whitespace();
    if f.next() != Some("bounds") {
        return Err(gen_err(bl, "expected `bounds <xmin> <ymin> <xmax> <ymax>`"));
    }
    let b = [
        real(f.next(), bl)?,
        real(f.next(), bl)?,
        real(f.next(), bl)?,
        real(f.next(), bl)?,
    ];
    let mut points = Vec::with_capacity(n);
    let mut last = bl;
    for (l, line) in lines {
        last = l;
        let mut f = line.split_whitespace();
        if f.next() != Some("p") {
            return Err(gen_err(l, "expected `p <x> <y>`"));
        }
        let x = real(f.next(), l)?;
        let y = real(f.next(), l)?;
        if f.next().is_some() {
            return Err(gen_err(l, "trailing fields"));
        }
        points.push(Point2::new(x, y));
    }
    if points.len() != n {
        return Err(gen_err(
            last,
            format!("expected {n} points, found {}", points.len()),
        ));
    }
    GeneratorSet::new(points, Rect::new(b[0], b[1], b[2], b[3]))
}

pub fn serialize_generators(g: &GeneratorSet) -> String {
    let b = g.bounds;
    let mut out = format!(
        "gen {}\nbounds {} {} {} {}\n",
        g.points.len(),
        format_real(b.min.x),
        format_real(b.min.y),
        format_real(b.max.x),
        format_real(b.max.y)
    );
    for p in &g.points {
        let _ = writeln!(out, "p {} {}", format_real(p.x), format_real(p.y));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tess::{polygon_area, vertex_degree_check, DegreeVerdict};

    fn gs(pts: &[(f64, f64)], b: (f64, f64, f64, f64)) -> GeneratorSet {
        GeneratorSet::new(
            pts.iter().map(|&(x, y)| Point2::new(x, y)).collect(),
            Rect::new(b.0, b.1, b.2, b.3),
        )
        .unwrap()
    }

    #[test]
    fn generator_set_validation() {
        let b = Rect::new(0.0, 0.0, 1.0, 1.0);
        assert_eq!(
            GeneratorSet::new(vec![Point2::new(0.5, 0.5)], b),
            Err(ForwardError::TooFewGenerators(1))
        );
        assert_eq!(
            GeneratorSet::new(vec![Point2::new(0.5, 0.5), Point2::new(0.5, 0.5)], b),
            Err(ForwardError::DuplicateGenerators(0, 1))
        );
        assert_eq!(
            GeneratorSet::new(vec![Point2::new(0.5, 0.5), Point2::new(1.0, 0.5)], b),
            Err(ForwardError::GeneratorOutsideBounds(1))
        );
    }

    #[test]
    fn two_generators_share_one_edge_on_bisector() {
        let g = gs(&[(0.0, 1.0), (2.0, 1.0)], (-1.0, -1.0, 3.0, 3.0));
        let d = build_voronoi(&g).unwrap();
        let t = d.tessellation();
        // A single pass-through vertex carries the edge to two dummies.
        assert_eq!(t.n_ordinary(), 1);
        assert_eq!(t.n_dummy(), 2);
        for v in 0..t.n_vertices() {
            assert!((t.vertex(v).x - 1.0).abs() < 1e-12);
        }
        assert_eq!(d.cells().len(), 2);
        assert_eq!(d.frame(), g.bounds());
    }

    #[test]
    fn three_generators_single_vertex() {
        let g = gs(
            &[(0.0, 0.0), (2.0, 0.0), (0.0, 2.0)],
            (-3.0, -3.0, 3.0, 3.0),
        );
        let d = build_voronoi(&g).unwrap();
        let t = d.tessellation();
        assert_eq!(t.n_ordinary(), 1);
        assert!(distance(t.vertex(0), Point2::new(1.0, 1.0)) < 1e-12);
        assert_eq!(t.n_dummy(), 3);
        assert_eq!(d.cells().len(), 3);
        for gidx in 0..3 {
            let area: f64 = polygon_area(t, d.cell_of_generator(gidx), &d.frame());
            assert!(area > 0.0);
        }
        assert_eq!(detect_degeneracy(&d), DegeneracyVerdict::NonDegenerate);
        let c = largest_empty_circle_at(&d, 0).unwrap();
        assert!((c.radius - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(generators_on_circle(&g, &c, 1e-9), vec![0, 1, 2]);
    }

    #[test]
    fn square_corners_are_degenerate() {
        let g = gs(
            &[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)],
            (-1.0, -1.0, 2.0, 2.0),
        );
        let d = build_voronoi(&g).unwrap();
        let DegeneracyVerdict::Degenerate(vs) = detect_degeneracy(&d) else {
            panic!("expected degeneracy")
        };
        assert_eq!(vs.len(), 1);
        let p = d.tessellation().vertex(vs[0]);
        assert!(distance(p, Point2::new(0.5, 0.5)) < 1e-12);
        assert_eq!(d.tessellation().degree(vs[0]), 4);
        assert_eq!(
            vertex_degree_check(d.tessellation()),
            DegreeVerdict::Violations(vec![vs[0]])
        );
        let c = largest_empty_circle_at(&d, vs[0]).unwrap();
        assert_eq!(generators_on_circle(&g, &c, 1e-9).len(), 4);
    }

    #[test]
    fn not_interior_vertex() {
        let g = gs(
            &[(0.0, 0.0), (2.0, 0.0), (0.0, 2.0)],
            (-3.0, -3.0, 3.0, 3.0),
        );
        let d = build_voronoi(&g).unwrap();
        assert_eq!(
            largest_empty_circle_at(&d, 1),
            Err(ForwardError::NotInteriorVertex(1))
        );
    }

    #[test]
    fn regions_tile_bounds() {
        let g = gs(
            &[(0.1, 0.2), (0.8, 0.3), (0.4, 0.9), (0.5, 0.5), (0.9, 0.9)],
            (0.0, 0.0, 1.0, 1.0),
        );
        let d = build_voronoi(&g).unwrap();
        let total: f64 = d
            .regions()
            .iter()
            .map(|r| {
                let mut ring = r.clone();
                ring.push(r[0]);
                crate::geom::signed_area(&ring)
            })
            .sum();
        assert!((total - 1.0).abs() < 1e-9, "{total}");
    }

    #[test]
    fn two_site_growth_labels() {
        let g = gs(&[(0.0, 1.0), (2.0, 1.0)], (-1.0, -1.0, 3.0, 3.0));
        let grid = grid_growth_labels(&g, 8).unwrap();
        for row in 0..8 {
            for col in 0..8 {
                let expect = if col < 4 { 0 } else { 1 };
                assert_eq!(grid.get(row, col), expect);
            }
        }
        assert_eq!(
            grid_growth_labels(&g, 1),
            Err(ForwardError::InvalidResolution)
        );
        let text = format_label_grid(&grid);
        assert!(text.starts_with("labels 8\n0 0 0 0 1 1 1 1\n"));
    }

    #[test]
    fn generator_file_round_trip() {
        let g = gs(&[(0.25, 0.5), (0.75, 0.125)], (0.0, 0.0, 1.0, 1.0));
        let text = serialize_generators(&g);
        assert_eq!(
            text,
            "gen 2\nbounds 0.0 0.0 1.0 1.0\np 0.25 0.5\np 0.75 0.125\n"
        );
        assert_eq!(parse_generators(&text).unwrap(), g);
        assert!(matches!(
            parse_generators("gen 2\nbounds 0 0 1 1\np 0.5 0.5\n"),
            Err(ForwardError::Format { .. })
        ));
    }
}
