//! Tessellation data model and its text format.
//!
//! A tessellation is a vertex list plus one adjacency list per ordinary vertex.
//! Infinite edges are stored by pointing at a trailing *dummy* vertex: an
//! arbitrary point further along the edge that has no adjacency list of its own.
//!
//! Faces are not stored. [`extract_polygons`] rebuilds them by sorting the edges
//! around every vertex by angle and walking next-counterclockwise. When the walk
//! runs into a dummy it continues at the next dummy counterclockwise around the
//! centroid of the ordinary vertices, which closes every unbounded face.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::geom::{signed_area, Point2, Rect};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TessError {
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("adjacency is not symmetric: {from} lists {to} but not the reverse")]
    AsymmetricAdjacency { from: usize, to: usize },
    #[error("dummy vertex {vertex} misplaced: {reason}")]
    DummyMisplaced { vertex: usize, reason: String },
    #[error("invalid adjacency at vertex {vertex}: {reason}")]
    InvalidAdjacency { vertex: usize, reason: String },
    #[error("vertex {vertex} has a non-finite coordinate")]
    NonFinite { vertex: usize },
    #[error(
        "edges do not form a planar embedding (Euler characteristic {found}, expected {expected})"
    )]
    NonPlanarEmbedding { found: i64, expected: i64 },
    #[error("vertex {0} has no incident edges")]
    IsolatedVertex(usize),
}

fn format_err(line: usize, message: impl Into<String>) -> TessError {
    TessError::Format {
        line,
        message: message.into(),
    }
}

/// Vertices, adjacency lists and the ordinary/dummy split.
#[derive(Debug, Clone, PartialEq)]
pub struct Tessellation {
    vertices: Vec<Point2>,
    n_ordinary: usize,
    adjacency: Vec<Vec<usize>>,
    /// For each dummy (indexed from 0), the ordinary vertex that references it.
    dummy_parent: Vec<usize>,
}

impl Tessellation {
    /// Validates and builds a tessellation. `adjacency` has one list per ordinary vertex.
    pub fn new(
        vertices: Vec<Point2>,
        n_ordinary: usize,
        adjacency: Vec<Vec<usize>>,
    ) -> Result<Self, TessError> {
        let total = vertices.len();
        if n_ordinary > total {
            return Err(TessError::InvalidAdjacency {
                vertex: total,
                reason: format!("{n_ordinary} ordinary vertices but only {total} vertices"),
            });
        }
        if adjacency.len() != n_ordinary {
            let vertex = adjacency.len().min(n_ordinary);
            if adjacency.len() > n_ordinary {
                return Err(TessError::DummyMisplaced {
                    vertex,
                    reason: "dummy vertices carry no adjacency list".into(),
                });
            }
            return Err(TessError::InvalidAdjacency {
                vertex,
                reason: "missing adjacency list".into(),
            });
        }
        if let Some(v) = vertices.iter().position(|p| !p.is_finite()) {
            return Err(TessError::NonFinite { vertex: v });
        }
        let mut dummy_parent = vec![usize::MAX; total - n_ordinary];
        for (i, list) in adjacency.iter().enumerate() {
            for (k, &j) in list.iter().enumerate() {
                if j >= total {
                    return Err(TessError::InvalidAdjacency {
                        vertex: i,
                        reason: format!("neighbor {j} out of range"),
                    });
                }
                if j == i {
                    return Err(TessError::InvalidAdjacency {
                        vertex: i,
                        reason: "self-loop".into(),
                    });
                }
                if list[..k].contains(&j) {
                    return Err(TessError::InvalidAdjacency {
                        vertex: i,
                        reason: format!("neighbor {j} repeated"),
                    });
                }
                if j < n_ordinary {
                    if !adjacency[j].contains(&i) {
                        return Err(TessError::AsymmetricAdjacency { from: i, to: j });
                    }
                } else {
                    let slot = &mut dummy_parent[j - n_ordinary];
                    if *slot != usize::MAX {
                        return Err(TessError::DummyMisplaced {
                            vertex: j,
                            reason: format!("referenced by both {} and {i}", *slot),
                        });
                    }
                    *slot = i;
                }
            }
        }
        if let Some(k) = dummy_parent.iter().position(|&p| p == usize::MAX) {
            return Err(TessError::DummyMisplaced {
                vertex: n_ordinary + k,
                reason: "not referenced by any ordinary vertex".into(),
            });
        }
        Ok(Self {
            vertices,
            n_ordinary,
            adjacency,
            dummy_parent,
        })
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Point2 {
        self.vertices[v]
    }

    pub fn n_ordinary(&self) -> usize {
        self.n_ordinary
    }

    pub fn n_dummy(&self) -> usize {
        self.vertices.len() - self.n_ordinary
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_dummy(&self, v: usize) -> bool {
        v >= self.n_ordinary
    }

    /// Neighbors of an ordinary vertex, in stored order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    /// Number of incident edges; dummies always have degree one.
    pub fn degree(&self, v: usize) -> usize {
        if self.is_dummy(v) {
            1
        } else {
            self.adjacency[v].len()
        }
    }

    /// The ordinary vertex holding `dummy` in its adjacency list.
    pub fn dummy_parent(&self, dummy: usize) -> usize {
        self.dummy_parent[dummy - self.n_ordinary]
    }

    /// Number of undirected edges, counting each infinite edge once.
    pub fn n_edges(&self) -> usize {
        let mut ord = 0;
        for (i, list) in self.adjacency.iter().enumerate() {
            ord += list
                .iter()
                .filter(|&&j| j < self.n_ordinary && j > i)
                .count();
        }
        ord + self.n_dummy()
    }

    /// Undirected edges `(a, b)` with `a < b`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.n_edges());
        for (i, list) in self.adjacency.iter().enumerate() {
            for &j in list {
                if j > i {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Same topology, vertices moved by `f`.
    pub fn map_vertices(&self, mut f: impl FnMut(Point2) -> Point2) -> Tessellation {
        Tessellation {
            vertices: self.vertices.iter().map(|&p| f(p)).collect(),
            ..self.clone()
        }
    }

    /// Bounding box of every vertex, dummies included.
    pub fn bounding_box(&self) -> Option<Rect> {
        Rect::bounding(self.vertices.iter().copied())
    }

    /// Bounding box of the ordinary vertices only.
    pub fn ordinary_bounding_box(&self) -> Option<Rect> {
        Rect::bounding(self.vertices[..self.n_ordinary].iter().copied())
    }
}

/// Parses the `tess` text format.
pub fn parse_tessellation(text: &str) -> Result<Tessellation, TessError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (hline, header) = lines.next().ok_or_else(|| format_err(1, "empty input"))?;
    let mut fields = header.split_whitespace();
    if fields.next() != Some("tess") {
        return Err(format_err(
            hline,
            "expected header `tess <n_ordinary> <n_dummy>`",
        ));
    }
    let n_ordinary = parse_count(fields.next(), hline, "n_ordinary")?;
    let n_dummy = parse_count(fields.next(), hline, "n_dummy")?;
    if fields.next().is_some() {
        return Err(format_err(hline, "trailing fields in header"));
    }
    let total = n_ordinary
        .checked_add(n_dummy)
        .ok_or_else(|| format_err(hline, "vertex count overflow"))?;

    let mut vertices = Vec::with_capacity(total);
    let mut adjacency: Vec<Vec<usize>> = Vec::with_capacity(n_ordinary);
    let mut last_line = hline;
    for (lineno, line) in lines {
        last_line = lineno;
        let mut f = line.split_whitespace();
        match f.next() {
            Some("v") => {
                if !adjacency.is_empty() {
                    return Err(format_err(lineno, "vertex line after adjacency lines"));
                }
                if vertices.len() == total {
                    return Err(format_err(
                        lineno,
                        format!("more than {total} vertex lines"),
                    ));
                }
                let x = parse_real(f.next(), lineno)?;
                let y = parse_real(f.next(), lineno)?;
                if f.next().is_some() {
                    return Err(format_err(lineno, "trailing fields in vertex line"));
                }
                vertices.push(Point2::new(x, y));
            }
            Some(tag) if tag == "adj" || tag.starts_with("adj") => {
                if vertices.len() != total {
                    return Err(format_err(
                        lineno,
                        format!("expected {total} vertex lines, found {}", vertices.len()),
                    ));
                }
                let rest = line["adj".len()..].trim_start();
                let (idx, list) = rest
                    .split_once(':')
                    .ok_or_else(|| format_err(lineno, "expected `adj <i>: ...`"))?;
                let i: usize = idx.trim().parse().map_err(|_| {
                    format_err(lineno, format!("bad vertex index `{}`", idx.trim()))
                })?;
                if i >= n_ordinary && i < total {
                    return Err(TessError::DummyMisplaced {
                        vertex: i,
                        reason: format!("line {lineno}: dummy vertices carry no adjacency list"),
                    });
                }
                if i != adjacency.len() {
                    return Err(format_err(
                        lineno,
                        format!(
                            "expected adjacency of vertex {}, found {i}",
                            adjacency.len()
                        ),
                    ));
                }
                let neighbors = list
                    .split_whitespace()
                    .map(|tok| {
                        tok.parse::<usize>()
                            .map_err(|_| format_err(lineno, format!("bad neighbor index `{tok}`")))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                adjacency.push(neighbors);
            }
            Some(other) => {
                return Err(format_err(lineno, format!("unknown record `{other}`")));
            }
            None => unreachable!("blank lines are filtered"),
        }
    }
    if vertices.len() != total {
        return Err(format_err(
            last_line,
            format!("expected {total} vertex lines, found {}", vertices.len()),
        ));
    }
    if adjacency.len() != n_ordinary {
        return Err(format_err(
            last_line,
            format!(
                "expected {n_ordinary} adjacency lines, found {}",
                adjacency.len()
            ),
        ));
    }
    Tessellation::new(vertices, n_ordinary, adjacency)
}

fn parse_count(tok: Option<&str>, line: usize, what: &str) -> Result<usize, TessError> {
    tok.ok_or_else(|| format_err(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| format_err(line, format!("bad {what}")))
}

pub(crate) fn parse_real_token(tok: Option<&str>, line: usize) -> Result<f64, (usize, String)> {
    let tok = tok.ok_or((line, "missing coordinate".to_string()))?;
    let v: f64 = tok
        .parse()
        .map_err(|_| (line, format!("bad number `{tok}`")))?;
    if !v.is_finite() {
        return Err((line, format!("non-finite number `{tok}`")));
    }
    Ok(v)
}

fn parse_real(tok: Option<&str>, line: usize) -> Result<f64, TessError> {
    parse_real_token(tok, line).map_err(|(l, m)| format_err(l, m))
}

/// Formats a real as the shortest decimal that parses back to the same value.
pub fn format_real(v: f64) -> String {
    format!("{v:?}")
}

/// Canonical text form; [`parse_tessellation`] inverts it exactly.
pub fn serialize_tessellation(t: &Tessellation) -> String {
    let mut out = String::with_capacity(32 * t.n_vertices());
    let _ = writeln!(out, "tess {} {}", t.n_ordinary, t.n_dummy());
    for p in &t.vertices {
        let _ = writeln!(out, "v {} {}", format_real(p.x), format_real(p.y));
    }
    for (i, list) in t.adjacency.iter().enumerate() {
        let _ = write!(out, "adj {i}:");
        for j in list {
            let _ = write!(out, " {j}");
        }
        out.push('\n');
    }
    out
}

/// A face of the subdivision, as a counterclockwise cycle of vertex indices.
///
/// Bounded faces start at their smallest vertex index. Unbounded faces start at
/// the dummy where the walk re-enters the tessellation, so the ordinary chain
/// sits between the first and last dummies.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polygon {
    pub vertex_indices: Vec<usize>,
    pub is_unbounded: bool,
}

impl Polygon {
    pub fn len(&self) -> usize {
        self.vertex_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertex_indices.is_empty()
    }

    /// Ordinary vertices in counterclockwise order.
    pub fn ordinary_vertices<'a>(
        &'a self,
        t: &'a Tessellation,
    ) -> impl Iterator<Item = usize> + 'a {
        self.vertex_indices
            .iter()
            .copied()
            .filter(move |&v| !t.is_dummy(v))
    }

    /// Counterclockwise neighbors `(prev, next)` of the entry at `pos`.
    pub fn around(&self, pos: usize) -> (usize, usize) {
        let k = self.vertex_indices.len();
        (
            self.vertex_indices[(pos + k - 1) % k],
            self.vertex_indices[(pos + 1) % k],
        )
    }
}

/// Faces of a tessellation plus, for every undirected edge, the faces on each side.
#[derive(Debug, Clone)]
pub struct Subdivision {
    pub polygons: Vec<Polygon>,
    /// `(a, b, left of a→b, left of b→a)`; `None` marks the outer face.
    pub edge_faces: Vec<(usize, usize, Option<usize>, Option<usize>)>,
}

/// Angular order of neighbors around each ordinary vertex (counterclockwise).
fn rotation_system(t: &Tessellation) -> Vec<Vec<usize>> {
    (0..t.n_ordinary)
        .map(|v| {
            let o = t.vertices[v];
            let mut keyed: Vec<(f64, usize)> = t.adjacency[v]
                .iter()
                .map(|&w| {
                    let d = t.vertices[w] - o;
                    (d.y.atan2(d.x), w)
                })
                .collect();
            keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
            keyed.into_iter().map(|(_, w)| w).collect()
        })
        .collect()
}

/// Dummies in counterclockwise order around the centroid of the ordinary vertices.
fn dummy_cycle(t: &Tessellation) -> Vec<usize> {
    let pts = if t.n_ordinary > 0 {
        &t.vertices[..t.n_ordinary]
    } else {
        &t.vertices[..]
    };
    let n = pts.len().max(1) as f64;
    let c = pts.iter().fold(Point2::default(), |acc, &p| acc + p) * (1.0 / n);
    let mut keyed: Vec<(f64, usize)> = (t.n_ordinary..t.n_vertices())
        .map(|d| {
            let v = t.vertices[d] - c;
            (v.y.atan2(v.x), d)
        })
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    keyed.into_iter().map(|(_, d)| d).collect()
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Builds every face and records which faces border each edge.
pub fn extract_subdivision(t: &Tessellation) -> Result<Subdivision, TessError> {
    let n = t.n_vertices();
    for v in 0..t.n_ordinary {
        if t.adjacency[v].is_empty() {
            return Err(TessError::IsolatedVertex(v));
        }
    }
    let rotation = rotation_system(t);
    let cycle = dummy_cycle(t);
    let mut next_dummy = vec![usize::MAX; n];
    for (k, &d) in cycle.iter().enumerate() {
        next_dummy[d] = cycle[(k + 1) % cycle.len()];
    }

    // Directed edges: out-edges of ordinary vertices, then dummy -> parent.
    let mut first_out = vec![0usize; t.n_ordinary + 1];
    for v in 0..t.n_ordinary {
        first_out[v + 1] = first_out[v] + rotation[v].len();
    }
    let n_ord_directed = first_out[t.n_ordinary];
    let n_directed = n_ord_directed + t.n_dummy();
    let edge_id = |u: usize, pos: usize| first_out[u] + pos;
    let dummy_edge = |d: usize| n_ord_directed + (d - t.n_ordinary);
    let mut source = vec![0usize; n_ord_directed];
    for u in 0..t.n_ordinary {
        source[first_out[u]..first_out[u + 1]].fill(u);
    }
    // Degrees are small, so a linear scan beats any map.
    let pos_in_rotation = |v: usize, u: usize| {
        rotation[v]
            .iter()
            .position(|&w| w == u)
            .expect("symmetric adjacency")
    };
    let endpoints = |e: usize| -> (usize, usize) {
        if e >= n_ord_directed {
            let d = t.n_ordinary + (e - n_ord_directed);
            (d, t.dummy_parent(d))
        } else {
            let u = source[e];
            (u, rotation[u][e - first_out[u]])
        }
    };

    let mut face_of = vec![usize::MAX; n_directed];
    let mut raw_faces: Vec<Vec<usize>> = Vec::new();
    let mut has_dummy: Vec<bool> = Vec::new();
    for start in 0..n_directed {
        if face_of[start] != usize::MAX {
            continue;
        }
        let face_id = raw_faces.len();
        let mut verts: Vec<usize> = Vec::new();
        let mut touches_dummy = false;
        let mut e = start;
        loop {
            if face_of[e] != usize::MAX {
                if e == start {
                    break;
                }
                // A rotation system always yields closed orbits; reaching a used
                // edge other than the start means the structure is corrupt.
                return Err(TessError::NonPlanarEmbedding {
                    found: -1,
                    expected: 2,
                });
            }
            face_of[e] = face_id;
            let (u, v) = endpoints(e);
            if verts.last() != Some(&u) {
                verts.push(u);
            }
            if t.is_dummy(v) {
                touches_dummy = true;
                if verts.last() != Some(&v) {
                    verts.push(v);
                }
                e = dummy_edge(next_dummy[v]);
            } else {
                let rot = &rotation[v];
                let k = pos_in_rotation(v, u);
                let w_pos = (k + rot.len() - 1) % rot.len();
                e = edge_id(v, w_pos);
            }
        }
        if verts.len() > 1 && verts.first() == verts.last() {
            verts.pop();
        }
        raw_faces.push(verts);
        has_dummy.push(touches_dummy);
    }

    // Euler check on the graph closed by the virtual cycle through the dummies.
    let mut dsu = Dsu::new(n);
    for (a, b) in t.edges() {
        dsu.union(a, b);
    }
    for w in cycle.windows(2) {
        dsu.union(w[0], w[1]);
    }
    let mut components = 0i64;
    for v in 0..n {
        if dsu.find(v) == v {
            components += 1;
        }
    }
    let v_count = n as i64;
    let e_count = (t.n_edges() + t.n_dummy()) as i64;
    let f_count = raw_faces.len() as i64 + i64::from(t.n_dummy() > 0);
    let chi = v_count - e_count + f_count;
    if chi != 2 * components {
        return Err(TessError::NonPlanarEmbedding {
            found: chi,
            expected: 2 * components,
        });
    }

    // Drop outer faces: dummy-free faces with nonpositive signed area.
    let mut remap = vec![None; raw_faces.len()];
    let mut polygons = Vec::new();
    for (f, verts) in raw_faces.into_iter().enumerate() {
        if !has_dummy[f] {
            let ring: Vec<Point2> = verts.iter().map(|&v| t.vertices[v]).collect();
            if signed_area(&ring) <= 0.0 {
                continue;
            }
        }
        remap[f] = Some(polygons.len());
        polygons.push(canonical_polygon(t, verts, has_dummy[f]));
    }

    let mut edge_faces = Vec::with_capacity(t.n_edges());
    for u in 0..t.n_ordinary {
        for (pos, &v) in rotation[u].iter().enumerate() {
            let fwd = remap[face_of[edge_id(u, pos)]];
            if t.is_dummy(v) {
                edge_faces.push((u, v, fwd, remap[face_of[dummy_edge(v)]]));
            } else if v > u {
                let back = remap[face_of[edge_id(v, pos_in_rotation(v, u))]];
                edge_faces.push((u, v, fwd, back));
            }
        }
    }
    Ok(Subdivision {
        polygons,
        edge_faces,
    })
}

fn canonical_polygon(t: &Tessellation, mut verts: Vec<usize>, unbounded: bool) -> Polygon {
    let k = verts.len();
    let start = if unbounded {
        // Entry dummies are dummies preceded by a dummy.
        (0..k)
            .filter(|&i| t.is_dummy(verts[i]) && t.is_dummy(verts[(i + k - 1) % k]))
            .min_by_key(|&i| verts[i])
            .or_else(|| (0..k).find(|&i| t.is_dummy(verts[i])))
            .unwrap_or(0)
    } else {
        (0..k).min_by_key(|&i| verts[i]).unwrap_or(0)
    };
    verts.rotate_left(start);
    Polygon {
        vertex_indices: verts,
        is_unbounded: unbounded,
    }
}

/// Faces of the subdivision, excluding the unbounded complement.
pub fn extract_polygons(t: &Tessellation) -> Result<Vec<Polygon>, TessError> {
    Ok(extract_subdivision(t)?.polygons)
}

/// Closed outline of a polygon. Unbounded polygons are closed along `frame`,
/// which should contain every vertex and carry the dummies on its boundary.
pub fn polygon_ring(t: &Tessellation, poly: &Polygon, frame: &Rect) -> Vec<Point2> {
    let k = poly.vertex_indices.len();
    let mut ring = Vec::with_capacity(k + 4);
    for i in 0..k {
        let v = poly.vertex_indices[i];
        ring.push(t.vertices[v]);
        let w = poly.vertex_indices[(i + 1) % k];
        if poly.is_unbounded && t.is_dummy(v) && t.is_dummy(w) {
            ring.extend(frame.corners_between(t.vertices[v], t.vertices[w]));
        }
    }
    ring
}

/// Area of a polygon closed along `frame`.
pub fn polygon_area(t: &Tessellation, poly: &Polygon, frame: &Rect) -> f64 {
    let mut ring = polygon_ring(t, poly, frame);
    if let Some(&first) = ring.first() {
        ring.push(first);
    }
    signed_area(&ring)
}

/// Result of the degree-three check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DegreeVerdict {
    AllDegreeThree,
    Violations(Vec<usize>),
}

/// Lists every ordinary vertex whose degree is not three.
pub fn vertex_degree_check(t: &Tessellation) -> DegreeVerdict {
    let bad: Vec<usize> = (0..t.n_ordinary)
        .filter(|&v| t.adjacency[v].len() != 3)
        .collect();
    if bad.is_empty() {
        DegreeVerdict::AllDegreeThree
    } else {
        DegreeVerdict::Violations(bad)
    }
}

/// Adds independent Gaussian noise with standard deviation `sigma` to both
/// coordinates of every ordinary vertex. Dummies and adjacency are untouched.
pub fn perturb_vertices(t: &Tessellation, sigma: f64, seed: u64) -> Tessellation {
    assert!(
        sigma >= 0.0 && sigma.is_finite(),
        "sigma must be finite and nonnegative"
    );
    if sigma == 0.0 {
        return t.clone();
    }
    let normal = Normal::new(0.0, sigma).expect("valid sigma");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = t.clone();
    for p in &mut out.vertices[..t.n_ordinary] {
        let dx = normal.sample(&mut rng);
        let dy = normal.sample(&mut rng);
        *p = Point2::new(p.x + dx, p.y + dy);
    }
    out
}

/// Moves a single ordinary vertex.
pub fn displace_vertex(t: &Tessellation, vertex: usize, offset: Point2) -> Tessellation {
    assert!(
        vertex < t.n_ordinary,
        "only ordinary vertices can be displaced"
    );
    let mut out = t.clone();
    out.vertices[vertex] = out.vertices[vertex] + offset;
    out
}
