//! Isometry groups of embeddings, outer boundaries, angle fans and the
//! combined asymmetry report.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::embedding::{Edge, Embedding, PointGrid};
use crate::geom::{direction_angle, normalize_degrees, Point, TolerancePolicy};
use crate::motifs::{motif_inventory, MotifInventory};
use crate::rigidity::{analyze, RigidityError, RigidityResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryGroup {
    Cyclic(usize),
    Dihedral(usize),
}

impl SymmetryGroup {
    pub fn is_trivial(&self) -> bool {
        *self == SymmetryGroup::Cyclic(1)
    }

    pub fn order(&self) -> usize {
        match *self {
            SymmetryGroup::Cyclic(k) => k,
            SymmetryGroup::Dihedral(k) => 2 * k,
        }
    }
}

impl fmt::Display for SymmetryGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(&match self {
            SymmetryGroup::Cyclic(k) => format!("C_{k}"),
            SymmetryGroup::Dihedral(k) => format!("D_{k}"),
        })
    }
}

/// A symmetry found in the data: rotation about the centroid, or reflection
/// in an axis through it, together with the induced vertex permutation.
#[derive(Clone, Debug, PartialEq)]
pub struct Isometry {
    /// Rotation angle in degrees for rotations; `None` for reflections.
    pub rotation_deg: Option<f64>,
    /// Axis direction in degrees, `[0, 180)`, for reflections.
    pub axis_deg: Option<f64>,
    /// `permutation[i]` is the image of vertex (or boundary position) `i`.
    pub permutation: Vec<usize>,
}

impl Isometry {
    pub fn is_reflection(&self) -> bool {
        self.axis_deg.is_some()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryReport {
    /// Number of rotations (including the identity).
    pub rotation_order: usize,
    /// Mirror axis directions in degrees.
    pub mirror_axes: Vec<f64>,
    pub point_symmetric: bool,
    pub group: SymmetryGroup,
    pub centroid: Point,
    pub isometries: Vec<Isometry>,
}

impl SymmetryReport {
    fn from_isometries(centroid: Point, isometries: Vec<Isometry>) -> Self {
        let rotations: Vec<f64> = isometries.iter().filter_map(|i| i.rotation_deg).collect();
        let mut mirror_axes: Vec<f64> = isometries.iter().filter_map(|i| i.axis_deg).collect();
        mirror_axes.sort_by(f64::total_cmp);
        let rotation_order = rotations.len().max(1);
        let point_symmetric = rotations.iter().any(|&r| (r - 180.0).abs() < 1e-3);
        let group = if mirror_axes.is_empty() {
            SymmetryGroup::Cyclic(rotation_order)
        } else {
            SymmetryGroup::Dihedral(rotation_order)
        };
        Self {
            rotation_order,
            mirror_axes,
            point_symmetric,
            group,
            centroid,
            isometries,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.group.is_trivial()
    }

    pub fn to_key_values(&self, prefix: &str) -> Vec<(String, String)> {
        let axes: Vec<String> = self.mirror_axes.iter().map(|a| format!("{a:.6}")).collect();
        vec![
            (format!("{prefix}group"), self.group.to_string()),
            (format!("{prefix}rotation_order"), self.rotation_order.to_string()),
            (format!("{prefix}mirror_axes"), self.mirror_axes.len().to_string()),
            (
                format!("{prefix}mirror_axis_angles"),
                if axes.is_empty() { "-".into() } else { axes.join(",") },
            ),
            (format!("{prefix}point_symmetric"), self.point_symmetric.to_string()),
        ]
    }
}

fn reflect(p: Point, centroid: Point, axis_rad: f64) -> Point {
    let d = p - centroid;
    centroid + Point::new(d.x, -d.y).rotated(2.0 * axis_rad)
}

/// Tries a candidate map: every vertex must land within `radius` of a distinct
/// vertex and every edge on an edge.
fn induced_permutation(
    e: &Embedding,
    grid: &PointGrid,
    radius: f64,
    map: impl Fn(Point) -> Point,
) -> Option<Vec<usize>> {
    let points = e.vertices();
    let mut perm = Vec::with_capacity(points.len());
    let mut used = vec![false; points.len()];
    for &p in points {
        let target = grid.nearest_within(points, map(p), radius)?;
        if std::mem::replace(&mut used[target], true) {
            return None;
        }
        perm.push(target);
    }
    e.edges()
        .iter()
        .all(|ed| e.has_edge(perm[ed.a], perm[ed.b]))
        .then_some(perm)
}

/// Rotations about and reflections through the vertex centroid that map the
/// embedding onto itself within `snap_tol`.
pub fn isometry_group(e: &Embedding, tol: &TolerancePolicy) -> SymmetryReport {
    let centroid = e.centroid();
    let points = e.vertices();
    let radius = |p: Point| (p - centroid).norm();
    let angle = |p: Point| (p - centroid).y.atan2((p - centroid).x);
    let reference = (0..points.len())
        .max_by(|&a, &b| radius(points[a]).total_cmp(&radius(points[b])))
        .expect("non-empty embedding");
    let r_ref = radius(points[reference]);
    let a_ref = angle(points[reference]);
    let grid = PointGrid::new(points, tol.snap_tol);
    let mut isometries = Vec::new();
    if r_ref <= tol.snap_tol {
        return SymmetryReport::from_isometries(centroid, isometries);
    }
    let candidates: Vec<usize> = (0..points.len())
        .filter(|&j| (radius(points[j]) - r_ref).abs() <= tol.snap_tol)
        .collect();
    for &j in &candidates {
        let theta = angle(points[j]) - a_ref;
        if let Some(perm) =
            induced_permutation(e, &grid, tol.snap_tol, |p| centroid + (p - centroid).rotated(theta))
        {
            let deg = if j == reference {
                0.0
            } else {
                normalize_degrees(theta.to_degrees())
            };
            isometries.push(Isometry {
                rotation_deg: Some(deg),
                axis_deg: None,
                permutation: perm,
            });
        }
    }
    for &j in &candidates {
        let axis = 0.5 * (angle(points[j]) + a_ref);
        if let Some(perm) = induced_permutation(e, &grid, tol.snap_tol, |p| reflect(p, centroid, axis)) {
            isometries.push(Isometry {
                rotation_deg: None,
                axis_deg: Some(normalize_degrees(axis.to_degrees()).rem_euclid(180.0)),
                permutation: perm,
            });
        }
    }
    isometries.sort_by(|a, b| {
        (a.is_reflection(), a.rotation_deg.or(a.axis_deg))
            .partial_cmp(&(b.is_reflection(), b.rotation_deg.or(b.axis_deg)))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    SymmetryReport::from_isometries(centroid, isometries)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ShapeError {
    #[error("outer face traversal did not close after {steps} steps; verify the embedding is non-crossing first")]
    Traversal { steps: usize },
    #[error("outer boundary revisits vertex {vertex}; the outer face is not bounded by a simple cycle")]
    NotSimple { vertex: usize },
    #[error("vertex {vertex} is not an endpoint of edge {}-{}", edge.a, edge.b)]
    NotIncident { vertex: usize, edge: Edge },
    #[error("edge {}-{} is not in the embedding", edge.a, edge.b)]
    MissingEdge { edge: Edge },
    #[error("expected exactly two red edges at one vertex, found {0}")]
    RedEdges(usize),
}

/// Closed polygon bounding the outer face, counterclockwise.
#[derive(Clone, Debug, PartialEq)]
pub struct OuterShape {
    pub cycle: Vec<usize>,
    pub points: Vec<Point>,
    /// Entry `k`: length of boundary edge `k -> k+1` and the signed turn
    /// (degrees, left positive) made at vertex `k+1`.
    pub turn_signature: Vec<(f64, f64)>,
}

impl OuterShape {
    pub fn len(&self) -> usize {
        self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycle.is_empty()
    }

    /// Even-odd test; points on the boundary count as inside.
    pub fn contains(&self, p: Point, eps: f64) -> bool {
        let n = self.points.len();
        let mut inside = false;
        for i in 0..n {
            let (a, b) = (self.points[i], self.points[(i + 1) % n]);
            let seg = crate::geom::Segment { a, b };
            if crate::geom::point_segment_distance(p, &seg).0 <= eps {
                return true;
            }
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) / (b.y - a.y) * (b.x - a.x);
                if p.x < x {
                    inside = !inside;
                }
            }
        }
        inside
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.points.len();
        0.5 * (0..n)
            .map(|i| self.points[i].cross(self.points[(i + 1) % n]))
            .sum::<f64>()
    }
}

fn signed_turn_deg(a: Point, b: Point, c: Point) -> f64 {
    let u = b - a;
    let v = c - b;
    u.cross(v).atan2(u.dot(v)).to_degrees()
}

/// Walks the outer face starting from the lowest (then leftmost) vertex
/// along its most clockwise edge, always taking the next edge
/// counterclockwise from the one just arrived on.
pub fn outer_boundary(e: &Embedding) -> Result<OuterShape, ShapeError> {
    let points = e.vertices();
    let angle = |from: usize, to: usize| {
        direction_angle(points[from], points[to]).expect("edges have distinct endpoints")
    };
    let start = (0..points.len())
        .min_by(|&a, &b| {
            points[a]
                .y
                .total_cmp(&points[b].y)
                .then(points[a].x.total_cmp(&points[b].x))
        })
        .expect("non-empty embedding");
    let first = *e
        .neighbors(start)
        .iter()
        .min_by(|&&a, &&b| angle(start, a).total_cmp(&angle(start, b)))
        .expect("no isolated vertices");

    let mut cycle = vec![start];
    let (mut prev, mut cur) = (start, first);
    let limit = 2 * e.edge_count() + 1;
    let mut steps = 0;
    while (prev, cur) != (start, first) || steps == 0 {
        steps += 1;
        if steps > limit {
            return Err(ShapeError::Traversal { steps });
        }
        if cur != start {
            cycle.push(cur);
        }
        let back = angle(cur, prev);
        let next = *e
            .neighbors(cur)
            .iter()
            .min_by(|&&a, &&b| {
                let offset = |n: usize| {
                    let d = normalize_degrees(angle(cur, n) - back);
                    if n == prev || d == 0.0 {
                        360.0
                    } else {
                        d
                    }
                };
                offset(a).total_cmp(&offset(b))
            })
            .expect("no isolated vertices");
        prev = cur;
        cur = next;
    }
    let mut seen = vec![false; points.len()];
    for &v in &cycle {
        if std::mem::replace(&mut seen[v], true) {
            return Err(ShapeError::NotSimple { vertex: v });
        }
    }
    let pts: Vec<Point> = cycle.iter().map(|&v| points[v]).collect();
    let n = pts.len();
    let turn_signature = (0..n)
        .map(|k| {
            let (a, b, c) = (pts[k], pts[(k + 1) % n], pts[(k + 2) % n]);
            ((b - a).norm(), signed_turn_deg(a, b, c))
        })
        .collect();
    Ok(OuterShape {
        cycle,
        points: pts,
        turn_signature,
    })
}

/// Symmetries of the cyclic boundary signature: cyclic shifts give
/// rotations, reversal plus shift gives reflections. Lengths match within
/// `snap_tol`, turn angles within `snap_tol` radians.
pub fn shape_symmetry(s: &OuterShape, tol: &TolerancePolicy) -> SymmetryReport {
    let n = s.len();
    let centroid = s.points.iter().fold(Point::default(), |acc, &p| acc + p) * (1.0 / n as f64);
    // lengths[i]: edge i -> i+1; turns[i]: turn at vertex i
    let lengths: Vec<f64> = s.turn_signature.iter().map(|t| t.0).collect();
    let turns: Vec<f64> = (0..n).map(|i| s.turn_signature[(i + n - 1) % n].1).collect();
    let len_ok = |a: f64, b: f64| (a - b).abs() <= tol.snap_tol;
    let turn_ok = |a: f64, b: f64| (a - b).abs() <= tol.match_angle_deg();
    let polar = |p: Point| (p - centroid).y.atan2((p - centroid).x).to_degrees();

    let mut isometries = Vec::new();
    for d in 0..n {
        if (0..n).all(|i| len_ok(lengths[(i + d) % n], lengths[i]) && turn_ok(turns[(i + d) % n], turns[i])) {
            let rotation = if d == 0 {
                0.0
            } else {
                normalize_degrees(polar(s.points[d]) - polar(s.points[0]))
            };
            isometries.push(Isometry {
                rotation_deg: Some(rotation),
                axis_deg: None,
                permutation: (0..n).map(|i| (i + d) % n).collect(),
            });
        }
    }
    for shift in 0..n {
        let image = |i: usize| (shift + n - i % n) % n;
        let ok = (0..n).all(|i| {
            turn_ok(turns[image(i)], turns[i]) && len_ok(lengths[(image(i) + n - 1) % n], lengths[i])
        });
        if ok {
            let p0 = s.points[0];
            let q0 = s.points[image(0)];
            let dir = if image(0) == 0 { p0 - centroid } else { (q0 - p0).perp() };
            let axis = dir.y.atan2(dir.x).to_degrees().rem_euclid(180.0);
            isometries.push(Isometry {
                rotation_deg: None,
                axis_deg: Some(if axis >= 180.0 { 0.0 } else { axis }),
                permutation: (0..n).map(image).collect(),
            });
        }
    }
    SymmetryReport::from_isometries(centroid, isometries)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Clockwise,
    CounterClockwise,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Orientation::Clockwise => "clockwise",
            Orientation::CounterClockwise => "counterclockwise",
        })
    }
}

impl FromStr for Orientation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cw" | "clockwise" => Ok(Orientation::Clockwise),
            "ccw" | "counterclockwise" | "anticlockwise" => Ok(Orientation::CounterClockwise),
            other => Err(format!("unknown orientation {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AngleFan {
    pub vertex: usize,
    /// Angles in degrees between consecutive incident edges.
    pub angles: Vec<f64>,
    /// Neighbours in fan order, starting with the start edge.
    pub neighbors: Vec<usize>,
    pub orientation: Orientation,
}

/// Angles between consecutive edges at `v`, beginning at `start_edge` and
/// turning in `orientation` (y-up frame).
pub fn angle_fan(e: &Embedding, v: usize, start_edge: Edge, orientation: Orientation) -> Result<AngleFan, ShapeError> {
    let first = start_edge.other(v).ok_or(ShapeError::NotIncident {
        vertex: v,
        edge: start_edge,
    })?;
    if !e.has_edge(start_edge.a, start_edge.b) {
        return Err(ShapeError::MissingEdge { edge: start_edge });
    }
    let c = e.vertex(v);
    let dir = |n: usize| direction_angle(c, e.vertex(n)).expect("edges have distinct endpoints");
    let base = dir(first);
    let sweep = |n: usize| match orientation {
        Orientation::CounterClockwise => normalize_degrees(dir(n) - base),
        Orientation::Clockwise => normalize_degrees(base - dir(n)),
    };
    let mut neighbors: Vec<usize> = e.neighbors(v).to_vec();
    neighbors.sort_by(|&a, &b| {
        let key = |n: usize| if n == first { -1.0 } else { sweep(n) };
        key(a).total_cmp(&key(b))
    });
    let k = neighbors.len();
    let angles = if k == 1 {
        vec![360.0]
    } else {
        (0..k)
            .map(|i| {
                let a = if i == 0 { 0.0 } else { sweep(neighbors[i]) };
                let b = if i + 1 == k { 360.0 } else { sweep(neighbors[i + 1]) };
                b - a
            })
            .collect()
    };
    Ok(AngleFan {
        vertex: v,
        angles,
        neighbors,
        orientation,
    })
}

/// The fan at the common vertex of the two edges tagged `red`, starting with
/// the angle between them.
pub fn red_edge_fan(e: &Embedding, orientation: Orientation) -> Result<AngleFan, ShapeError> {
    let red: Vec<Edge> = (0..e.edge_count())
        .filter(|&i| e.has_tag(i, "red"))
        .map(|i| e.edges()[i])
        .collect();
    let [r1, r2] = red[..] else {
        return Err(ShapeError::RedEdges(red.len()));
    };
    let center = if r2.contains(r1.a) {
        r1.a
    } else if r2.contains(r1.b) {
        r1.b
    } else {
        return Err(ShapeError::RedEdges(2));
    };
    for (start, other) in [(r1, r2), (r2, r1)] {
        let fan = angle_fan(e, center, start, orientation)?;
        if fan.neighbors.get(1) == other.other(center).as_ref() {
            return Ok(fan);
        }
    }
    Err(ShapeError::RedEdges(2))
}

/// Evaluation of the rigid / no symmetry / asymmetric outline conditions,
/// with the motif inventory for the rearrangement question, which this tool
/// does not decide.
#[derive(Clone, Debug)]
pub struct AsymmetryReport {
    pub rigidity: Result<RigidityResult, RigidityError>,
    pub isometry: SymmetryReport,
    pub shape: Result<SymmetryReport, ShapeError>,
    pub inventory: MotifInventory,
}

impl AsymmetryReport {
    pub fn rigid(&self) -> bool {
        self.rigidity.as_ref().is_ok_and(|r| r.rigid)
    }

    pub fn no_symmetry(&self) -> bool {
        self.isometry.is_trivial()
    }

    /// `None` when the outer boundary could not be determined.
    pub fn asymmetric_outline(&self) -> Option<bool> {
        self.shape.as_ref().ok().map(SymmetryReport::is_trivial)
    }

    /// Set when the edges are fully covered by rigid motif occurrences, so a
    /// rearrangement of those pieces may produce a different (possibly
    /// symmetric) graph.
    pub fn rearrangement_flag(&self) -> Option<String> {
        if self.inventory.coverage < 1.0 - 1e-12 {
            return None;
        }
        let parts: Vec<String> = self
            .inventory
            .entries
            .iter()
            .filter(|en| en.count > 0)
            .map(|en| format!("{} x{}", en.pattern, en.count))
            .collect();
        Some(format!(
            "all edges lie in rigid motifs ({}); check whether the pieces rearrange into a graph violating the other conditions",
            parts.join(", ")
        ))
    }

    pub fn to_key_values(&self) -> Vec<(String, String)> {
        let mut kv = vec![
            ("condition_rigid".to_string(), self.rigid().to_string()),
            ("condition_no_symmetry".to_string(), self.no_symmetry().to_string()),
            (
                "condition_asymmetric_outline".to_string(),
                match self.asymmetric_outline() {
                    Some(b) => b.to_string(),
                    None => "undetermined".to_string(),
                },
            ),
            (
                "condition_no_rearrangement".to_string(),
                "not decided by this tool".to_string(),
            ),
        ];
        if let Some(flag) = self.rearrangement_flag() {
            kv.push(("rearrangement_note".to_string(), flag));
        }
        kv
    }
}

pub fn asymmetry_report(e: &Embedding, tol: &TolerancePolicy) -> AsymmetryReport {
    AsymmetryReport {
        rigidity: analyze(e, tol),
        isometry: isometry_group(e, tol),
        shape: outer_boundary(e).map(|s| shape_symmetry(&s, tol)),
        inventory: motif_inventory(e, tol),
    }
}
