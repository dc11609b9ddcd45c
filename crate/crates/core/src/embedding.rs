//! Segment lists, graph embeddings and their text formats.
//!
//! A `.seg` file lists drawn strokes in raw figure coordinates (y axis pointing
//! down, arbitrary scale). [`build_embedding`] turns such a list into an
//! [`Embedding`]: coordinates are scaled so one matchstick has length 1, the y
//! axis is flipped to point up, coincident endpoints are merged and strokes
//! spanning several matchsticks are split at the vertices lying on them.
//!
//! A `.mge` file stores an embedding exactly:
//!
//! ```text
//! name unit triangle
//! unit 1.0
//! v 0 0.0000000000000000e0 0.0000000000000000e0
//! v 1 1.0000000000000000e0 0.0000000000000000e0
//! v 2 5.0000000000000000e-1 8.6602540378443860e-1
//! e 0 1
//! e 1 2
//! e 0 2 red
//! ```

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::geom::{distance, Point, Segment, TolerancePolicy};

/// Largest number of matchsticks a single drawn stroke may span.
pub const MAX_MULTIPLIER: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmbeddingError {
    #[error("an embedding needs at least 2 vertices and 1 edge")]
    TooSmall,
    #[error("edge {index} references missing vertex {vertex}")]
    DanglingEdge { index: usize, vertex: usize },
    #[error("edge {index} is a loop at vertex {vertex}")]
    SelfLoop { index: usize, vertex: usize },
    #[error("duplicate edge {a}-{b}")]
    DuplicateEdge { a: usize, b: usize },
    #[error("vertex {0} has no incident edge")]
    IsolatedVertex(usize),
    #[error("vertex {0} has a non-finite coordinate")]
    NonFinite(usize),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("input contains no data records")]
    Empty,
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

impl ParseError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        ParseError::Line {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IngestError {
    #[error("segment {index} has length {length}, not a multiple 1..={max} of the unit {unit}", max = MAX_MULTIPLIER)]
    UnitMismatch {
        index: usize,
        length: f64,
        unit: f64,
    },
    #[error("segment {index} spans {multiplier} units but has no vertex near {missing}")]
    Subdivision {
        index: usize,
        multiplier: usize,
        missing: Point,
    },
    #[error("vertices {a} and {b} are {distance} apart: closer than twice the snap radius but not merged")]
    Ambiguous { a: usize, b: usize, distance: f64 },
    #[error("segment {index} collapses to a single vertex after snapping")]
    Collapsed { index: usize },
    #[error("edge {a}-{b} has length {length} after ingestion")]
    EdgeLength { a: usize, b: usize, length: f64 },
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
}

/// Raw strokes as transcribed from a drawing.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentList {
    pub source_name: String,
    pub segments: Vec<Segment>,
    pub tags: Vec<Option<String>>,
}

impl SegmentList {
    pub fn new(
        source_name: impl Into<String>,
        segments: Vec<Segment>,
        tags: Vec<Option<String>>,
    ) -> Result<Self, ParseError> {
        if segments.is_empty() {
            return Err(ParseError::Empty);
        }
        assert_eq!(segments.len(), tags.len(), "one tag slot per segment");
        Ok(Self {
            source_name: source_name.into(),
            segments,
            tags,
        })
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn parse_real(token: &str, line: usize) -> Result<f64, ParseError> {
    let v: f64 = token
        .parse()
        .map_err(|_| ParseError::at(line, format!("not a number: {token:?}")))?;
    if !v.is_finite() {
        return Err(ParseError::at(line, format!("non-finite value {token:?}")));
    }
    Ok(v)
}

/// Parses the `.seg` format: `x1 y1 x2 y2 [tag]` per line, `#` comments,
/// optional `name <text>` header.
pub fn parse_segments(text: &str) -> Result<SegmentList, ParseError> {
    let mut name = String::new();
    let mut segments = Vec::new();
    let mut tags = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("name") {
            if rest.is_empty() || rest.starts_with(char::is_whitespace) {
                name = rest.trim().to_string();
                continue;
            }
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(4..=5).contains(&fields.len()) {
            return Err(ParseError::at(
                lineno,
                format!("expected `x1 y1 x2 y2 [tag]`, found {} fields", fields.len()),
            ));
        }
        let mut c = [0.0; 4];
        for (slot, tok) in c.iter_mut().zip(&fields) {
            *slot = parse_real(tok, lineno)?;
        }
        let seg = Segment::new(Point::new(c[0], c[1]), Point::new(c[2], c[3]))
            .map_err(|e| ParseError::at(lineno, e.to_string()))?;
        segments.push(seg);
        tags.push(fields.get(4).map(|t| t.to_string()));
    }
    SegmentList::new(name, segments, tags)
}

fn multiplier(length: f64, unit: f64) -> usize {
    (length / unit).round().max(1.0) as usize
}

/// Estimates the raw length of one matchstick.
///
/// Every segment length is divided by its rounded multiple of the shortest
/// segment; the median of these quotients is the estimate. Each segment must
/// then be within `unit_tol_raw` (relative) of 1, 2 or 3 units.
pub fn estimate_unit(sl: &SegmentList, tol: &TolerancePolicy) -> Result<f64, IngestError> {
    let lengths: Vec<f64> = sl.segments.iter().map(Segment::length).collect();
    let shortest = lengths.iter().copied().fold(f64::INFINITY, f64::min);
    let mut quotients: Vec<f64> = lengths
        .iter()
        .map(|&l| l / multiplier(l, shortest) as f64)
        .collect();
    quotients.sort_by(f64::total_cmp);
    let mid = quotients.len() / 2;
    let unit = if quotients.len() % 2 == 1 {
        quotients[mid]
    } else {
        0.5 * (quotients[mid - 1] + quotients[mid])
    };
    for (index, &length) in lengths.iter().enumerate() {
        let k = multiplier(length, unit);
        let expected = k as f64 * unit;
        if k > MAX_MULTIPLIER || (length - expected).abs() > tol.unit_tol_raw * expected {
            return Err(IngestError::UnitMismatch {
                index,
                length,
                unit,
            });
        }
    }
    Ok(unit)
}

/// Uniform grid over points for fixed-radius neighbour queries.
pub(crate) struct PointGrid {
    cell: f64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
}

impl PointGrid {
    pub(crate) fn new(points: &[Point], cell: f64) -> Self {
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            buckets.entry(Self::key(*p, cell)).or_default().push(i);
        }
        Self { cell, buckets }
    }

    fn key(p: Point, cell: f64) -> (i64, i64) {
        ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)
    }

    /// Indices of points within `radius` of `p` (radius must not exceed the cell size).
    pub(crate) fn within(&self, points: &[Point], p: Point, radius: f64) -> Vec<usize> {
        debug_assert!(radius <= self.cell);
        let (cx, cy) = Self::key(p, self.cell);
        let mut out = Vec::new();
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = self.buckets.get(&(cx + dx, cy + dy)) {
                    out.extend(
                        bucket
                            .iter()
                            .copied()
                            .filter(|&j| distance(points[j], p) <= radius),
                    );
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub(crate) fn nearest_within(&self, points: &[Point], p: Point, radius: f64) -> Option<usize> {
        self.within(points, p, radius)
            .into_iter()
            .min_by(|&a, &b| distance(points[a], p).total_cmp(&distance(points[b], p)))
    }
}

struct DisjointSet(Vec<usize>);

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self((0..n).collect())
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

/// Single-linkage clustering with radius `radius`.
///
/// Returns per-point cluster labels (numbered by first appearance) and cluster
/// centroids. Centroids are summed in coordinate order so they do not depend on
/// input order.
pub(crate) fn cluster_points(points: &[Point], radius: f64) -> (Vec<usize>, Vec<Point>) {
    let grid = PointGrid::new(points, radius);
    let mut sets = DisjointSet::new(points.len());
    for (i, &p) in points.iter().enumerate() {
        for j in grid.within(points, p, radius) {
            sets.union(i, j);
        }
    }
    let mut label_of_root = HashMap::new();
    let mut labels = Vec::with_capacity(points.len());
    let mut members: Vec<Vec<Point>> = Vec::new();
    for (i, &p) in points.iter().enumerate() {
        let root = sets.find(i);
        let label = *label_of_root.entry(root).or_insert_with(|| {
            members.push(Vec::new());
            members.len() - 1
        });
        members[label].push(p);
        labels.push(label);
    }
    let centroids = members
        .into_iter()
        .map(|mut pts| {
            pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
            let n = pts.len() as f64;
            let sum = pts.iter().fold(Point::default(), |acc, &p| acc + p);
            sum * (1.0 / n)
        })
        .collect();
    (labels, centroids)
}

/// Reconstructs the unit-scale embedding drawn by a segment list.
pub fn build_embedding(sl: &SegmentList, tol: &TolerancePolicy) -> Result<Embedding, IngestError> {
    let unit = estimate_unit(sl, tol)?;
    let normalize = |p: Point| Point::new(p.x / unit, -p.y / unit);
    let m = sl.segments.len();
    let mut endpoints = Vec::with_capacity(2 * m);
    for s in &sl.segments {
        endpoints.push(normalize(s.a));
    }
    for s in &sl.segments {
        endpoints.push(normalize(s.b));
    }
    let (labels, vertices) = cluster_points(&endpoints, tol.snap_tol);

    let pair_radius = 2.0 * tol.snap_tol;
    let grid = PointGrid::new(&vertices, pair_radius);
    for (a, &p) in vertices.iter().enumerate() {
        if let Some(b) = grid
            .within(&vertices, p, pair_radius)
            .into_iter()
            .find(|&b| b != a)
        {
            return Err(IngestError::Ambiguous {
                a: a.min(b),
                b: a.max(b),
                distance: distance(p, vertices[b]),
            });
        }
    }

    let mut builder = EdgeAccumulator::default();
    for (index, tag) in sl.tags.iter().enumerate() {
        let (a, b) = (labels[index], labels[index + m]);
        if a == b {
            return Err(IngestError::Collapsed { index });
        }
        let k = multiplier(sl.segments[index].length(), unit);
        let mut chain = vec![a];
        for q in 1..k {
            let target = vertices[a] + (vertices[b] - vertices[a]) * (q as f64 / k as f64);
            let v = grid
                .nearest_within(&vertices, target, tol.snap_tol)
                .ok_or(IngestError::Subdivision {
                    index,
                    multiplier: k,
                    missing: target,
                })?;
            chain.push(v);
        }
        chain.push(b);
        for w in chain.windows(2) {
            if w[0] == w[1] {
                return Err(IngestError::Collapsed { index });
            }
            builder.add(w[0], w[1], tag.clone());
        }
    }

    let embedding = Embedding::new(sl.source_name.clone(), vertices, builder.finish())?;
    for (i, edge) in embedding.edges().iter().enumerate() {
        let length = embedding.edge_length(i);
        if (length - 1.0).abs() > tol.unit_tol_raw {
            return Err(IngestError::EdgeLength {
                a: edge.a,
                b: edge.b,
                length,
            });
        }
    }
    Ok(embedding)
}

/// Collects edges in first-seen order, merging duplicates and their tags.
#[derive(Default)]
struct EdgeAccumulator {
    index: HashMap<Edge, usize>,
    edges: Vec<(usize, usize, Option<String>)>,
}

impl EdgeAccumulator {
    fn add(&mut self, a: usize, b: usize, tag: Option<String>) {
        let key = Edge::new(a, b);
        match self.index.get(&key) {
            Some(&i) => {
                let slot = &mut self.edges[i].2;
                *slot = union_tags(slot.take(), tag);
            }
            None => {
                self.index.insert(key, self.edges.len());
                self.edges.push((key.a, key.b, tag));
            }
        }
    }

    fn finish(self) -> Vec<(usize, usize, Option<String>)> {
        self.edges
    }
}

fn union_tags(a: Option<String>, b: Option<String>) -> Option<String> {
    match (a, b) {
        (None, t) | (t, None) => t,
        (Some(a), Some(b)) => {
            let mut parts: Vec<String> = a
                .split(',')
                .chain(b.split(','))
                .map(str::to_string)
                .collect();
            parts.sort();
            parts.dedup();
            Some(parts.join(","))
        }
    }
}

/// Unordered vertex pair, stored with `a < b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
}

impl Edge {
    pub fn new(u: usize, v: usize) -> Self {
        Self {
            a: u.min(v),
            b: u.max(v),
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.a == v || self.b == v
    }

    /// The endpoint opposite `v`, if `v` is an endpoint.
    pub fn other(&self, v: usize) -> Option<usize> {
        if self.a == v {
            Some(self.b)
        } else if self.b == v {
            Some(self.a)
        } else {
            None
        }
    }

    pub fn shares_vertex(&self, other: &Edge) -> bool {
        self.contains(other.a) || self.contains(other.b)
    }
}

/// A straight-line drawing of a graph: vertex positions plus edges.
#[derive(Clone, Debug, PartialEq)]
pub struct Embedding {
    name: String,
    vertices: Vec<Point>,
    edges: Vec<Edge>,
    tags: Vec<Option<String>>,
    adjacency: Vec<Vec<usize>>,
    lookup: HashMap<Edge, usize>,
}

impl Embedding {
    pub fn new(
        name: impl Into<String>,
        vertices: Vec<Point>,
        edges: Vec<(usize, usize, Option<String>)>,
    ) -> Result<Self, EmbeddingError> {
        let n = vertices.len();
        if n < 2 || edges.is_empty() {
            return Err(EmbeddingError::TooSmall);
        }
        if let Some(i) = vertices
            .iter()
            .position(|p| !(p.x.is_finite() && p.y.is_finite()))
        {
            return Err(EmbeddingError::NonFinite(i));
        }
        let mut adjacency = vec![Vec::new(); n];
        let mut lookup = HashMap::with_capacity(edges.len());
        let mut list = Vec::with_capacity(edges.len());
        let mut tags = Vec::with_capacity(edges.len());
        for (index, (u, v, tag)) in edges.into_iter().enumerate() {
            for w in [u, v] {
                if w >= n {
                    return Err(EmbeddingError::DanglingEdge { index, vertex: w });
                }
            }
            if u == v {
                return Err(EmbeddingError::SelfLoop { index, vertex: u });
            }
            let e = Edge::new(u, v);
            if lookup.insert(e, index).is_some() {
                return Err(EmbeddingError::DuplicateEdge { a: e.a, b: e.b });
            }
            adjacency[u].push(v);
            adjacency[v].push(u);
            list.push(e);
            tags.push(tag);
        }
        if let Some(v) = adjacency.iter().position(Vec::is_empty) {
            return Err(EmbeddingError::IsolatedVertex(v));
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Ok(Self {
            name: name.into(),
            vertices,
            edges: list,
            tags,
            adjacency,
            lookup,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Point {
        self.vertices[v]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn tags(&self) -> &[Option<String>] {
        &self.tags
    }

    pub fn tag(&self, edge: usize) -> Option<&str> {
        self.tags[edge].as_deref()
    }

    /// Whether the edge carries `tag`, possibly among several comma-separated labels.
    pub fn has_tag(&self, edge: usize, tag: &str) -> bool {
        self.tag(edge)
            .is_some_and(|t| t.split(',').any(|part| part == tag))
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        self.lookup.get(&Edge::new(u, v)).copied()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.lookup.contains_key(&Edge::new(u, v))
    }

    pub fn segment(&self, edge: usize) -> Segment {
        let e = self.edges[edge];
        Segment {
            a: self.vertices[e.a],
            b: self.vertices[e.b],
        }
    }

    pub fn edge_length(&self, edge: usize) -> f64 {
        let e = self.edges[edge];
        distance(self.vertices[e.a], self.vertices[e.b])
    }

    pub fn centroid(&self) -> Point {
        let n = self.vertices.len() as f64;
        self.vertices.iter().fold(Point::default(), |acc, &p| acc + p) * (1.0 / n)
    }

    pub fn is_connected(&self) -> bool {
        connected(self.vertex_count(), self.edges.iter().copied())
    }

    /// Same graph with new vertex positions.
    pub fn with_vertices(&self, vertices: Vec<Point>) -> Result<Self, EmbeddingError> {
        if vertices.len() != self.vertices.len() {
            return Err(EmbeddingError::TooSmall);
        }
        if let Some(i) = vertices
            .iter()
            .position(|p| !(p.x.is_finite() && p.y.is_finite()))
        {
            return Err(EmbeddingError::NonFinite(i));
        }
        Ok(Self {
            vertices,
            ..self.clone()
        })
    }

    /// Applies `f` to every vertex position.
    pub fn map_points(&self, mut f: impl FnMut(Point) -> Point) -> Self {
        Self {
            vertices: self.vertices.iter().map(|&p| f(p)).collect(),
            ..self.clone()
        }
    }

    /// Relabels vertices so that old vertex `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, EmbeddingError> {
        let mut vertices = vec![Point::default(); self.vertices.len()];
        for (old, &new) in perm.iter().enumerate() {
            vertices[new] = self.vertices[old];
        }
        let edges = self
            .edges
            .iter()
            .zip(&self.tags)
            .map(|(e, t)| (perm[e.a], perm[e.b], t.clone()))
            .collect();
        Self::new(self.name.clone(), vertices, edges)
    }

    /// Copy with one edge deleted. Fails if a vertex would become isolated.
    pub fn without_edge(&self, edge: usize) -> Result<Self, EmbeddingError> {
        let edges = self
            .edges
            .iter()
            .zip(&self.tags)
            .enumerate()
            .filter(|(i, _)| *i != edge)
            .map(|(_, (e, t))| (e.a, e.b, t.clone()))
            .collect();
        Self::new(self.name.clone(), self.vertices.clone(), edges)
    }

    /// Copy with an extra edge.
    pub fn with_edge(&self, u: usize, v: usize) -> Result<Self, EmbeddingError> {
        let mut edges: Vec<_> = self
            .edges
            .iter()
            .zip(&self.tags)
            .map(|(e, t)| (e.a, e.b, t.clone()))
            .collect();
        edges.push((u, v, None));
        Self::new(self.name.clone(), self.vertices.clone(), edges)
    }
}

/// Breadth-first connectivity over an edge list on `n` vertices.
pub fn connected(n: usize, edges: impl IntoIterator<Item = Edge>) -> bool {
    if n == 0 {
        return true;
    }
    let mut adj = vec![Vec::new(); n];
    for e in edges {
        adj[e.a].push(e.b);
        adj[e.b].push(e.a);
    }
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                queue.push_back(w);
            }
        }
    }
    count == n
}

/// Vertex counts of an (m;n)-regular graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DegreeProfile {
    pub m: usize,
    pub n: usize,
    pub count_m: usize,
    pub count_n: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("not ({m};{n})-regular: {} vertices of other degree, first {:?}", offending.len(), offending.first())]
pub struct ProfileViolation {
    pub m: usize,
    pub n: usize,
    /// (vertex, degree) pairs with a degree outside {m, n}.
    pub offending: Vec<(usize, usize)>,
}

/// Counts vertices of degree `m` and `n`; any other degree is a violation.
/// When `m == n` all vertices are counted under `m`.
pub fn degree_profile(e: &Embedding, m: usize, n: usize) -> Result<DegreeProfile, ProfileViolation> {
    let mut count_m = 0;
    let mut count_n = 0;
    let mut offending = Vec::new();
    for (v, d) in e.degrees().into_iter().enumerate() {
        if d == m {
            count_m += 1;
        } else if d == n {
            count_n += 1;
        } else {
            offending.push((v, d));
        }
    }
    if offending.is_empty() {
        Ok(DegreeProfile {
            m,
            n,
            count_m,
            count_n,
        })
    } else {
        Err(ProfileViolation { m, n, offending })
    }
}

fn fmt_coord(x: f64) -> String {
    format!("{x:.16e}")
}

/// Serializes to the `.mge` format.
pub fn write_embedding(e: &Embedding) -> String {
    let mut out = String::new();
    writeln!(out, "name {}", e.name()).unwrap();
    writeln!(out, "unit 1.0").unwrap();
    for (i, p) in e.vertices().iter().enumerate() {
        writeln!(out, "v {i} {} {}", fmt_coord(p.x), fmt_coord(p.y)).unwrap();
    }
    for (edge, tag) in e.edges().iter().zip(e.tags()) {
        match tag {
            Some(t) => writeln!(out, "e {} {} {t}", edge.a, edge.b).unwrap(),
            None => writeln!(out, "e {} {}", edge.a, edge.b).unwrap(),
        }
    }
    out
}

/// Parses the `.mge` format.
pub fn read_embedding(text: &str) -> Result<Embedding, ParseError> {
    let mut name = String::new();
    let mut vertices = Vec::new();
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "name" => name = line["name".len()..].trim().to_string(),
            "unit" => {
                let u = fields
                    .get(1)
                    .ok_or_else(|| ParseError::at(lineno, "missing unit value"))?;
                if parse_real(u, lineno)? != 1.0 {
                    return Err(ParseError::at(lineno, "only unit 1.0 is supported"));
                }
            }
            "v" => {
                if fields.len() != 4 {
                    return Err(ParseError::at(lineno, "expected `v <id> <x> <y>`"));
                }
                let id: usize = fields[1]
                    .parse()
                    .map_err(|_| ParseError::at(lineno, "bad vertex id"))?;
                if id != vertices.len() {
                    return Err(ParseError::at(
                        lineno,
                        format!("vertex ids must be dense from 0, expected {}", vertices.len()),
                    ));
                }
                vertices.push(Point::new(
                    parse_real(fields[2], lineno)?,
                    parse_real(fields[3], lineno)?,
                ));
            }
            "e" => {
                if !(3..=4).contains(&fields.len()) {
                    return Err(ParseError::at(lineno, "expected `e <id1> <id2> [tag]`"));
                }
                let mut ids = [0usize; 2];
                for (slot, tok) in ids.iter_mut().zip(&fields[1..3]) {
                    *slot = tok
                        .parse()
                        .map_err(|_| ParseError::at(lineno, format!("bad vertex id {tok:?}")))?;
                    if *slot >= vertices.len() {
                        return Err(ParseError::at(
                            lineno,
                            format!("edge references undefined vertex {slot}"),
                        ));
                    }
                }
                edges.push((ids[0], ids[1], fields.get(3).map(|t| t.to_string())));
            }
            other => {
                return Err(ParseError::at(
                    lineno,
                    format!("unknown record type {other:?}"),
                ))
            }
        }
    }
    if vertices.is_empty() && edges.is_empty() {
        return Err(ParseError::Empty);
    }
    Ok(Embedding::new(name, vertices, edges)?)
}
