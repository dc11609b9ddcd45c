//! Least-squares refinement of vertex positions towards exact unit edge lengths.
//!
//! The residual of edge `(i, j)` is `|p_i - p_j|^2 - 1`. Steps are damped
//! Gauss-Newton steps computed from a singular value decomposition of the
//! Jacobian, dropping directions below the rank cutoff so that flexible
//! frameworks take minimum-norm steps.
//!
//! The plane's three trivial motions are removed by fixing vertex 0 and the
//! direction of its first incident edge: the neighbour on that edge may only
//! slide along it.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::embedding::{Edge, Embedding};
use crate::geom::{distance, Point, TolerancePolicy};

pub const DEFAULT_MAX_ITER: usize = 200;
/// Smallest step considered progress.
pub const MIN_STEP: f64 = 1e-14;
const INITIAL_DAMPING: f64 = 1e-8;
const MAX_RETRIES: usize = 10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RefineError {
    #[error("input too far from unit lengths: max deviation {residual:.3e} exceeds {limit:.3e}")]
    Precondition { residual: f64, limit: f64 },
    #[error("refinement diverged after {iterations} iterations (residual {residual:.3e})")]
    Diverged {
        iterations: usize,
        residual: f64,
        /// Vertex positions at the point of failure.
        iterate: Vec<Point>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct RefineResult {
    pub embedding: Embedding,
    pub iterations: usize,
    /// Maximum `|length - 1|` over all edges.
    pub final_residual: f64,
    pub converged: bool,
    /// Largest distance any vertex moved.
    pub displacement: f64,
}

/// Maximum `|length - 1|` over all edges.
pub fn residual(e: &Embedding) -> f64 {
    max_deviation(e.vertices(), e.edges())
}

fn max_deviation(points: &[Point], edges: &[Edge]) -> f64 {
    edges
        .iter()
        .map(|ed| (distance(points[ed.a], points[ed.b]) - 1.0).abs())
        .fold(0.0, f64::max)
}

/// Squared-length residuals `|p_a - p_b|^2 - 1`, one per edge.
pub fn squared_length_residuals(points: &[Point], edges: &[Edge]) -> DVector<f64> {
    DVector::from_iterator(
        edges.len(),
        edges
            .iter()
            .map(|ed| (points[ed.a] - points[ed.b]).norm_squared() - 1.0),
    )
}

/// Jacobian of [`squared_length_residuals`] with respect to all `2V`
/// coordinates, ordered `x_0, y_0, x_1, ...`.
pub fn constraint_jacobian(points: &[Point], edges: &[Edge]) -> DMatrix<f64> {
    let mut j = DMatrix::zeros(edges.len(), 2 * points.len());
    for (row, ed) in edges.iter().enumerate() {
        let d = points[ed.a] - points[ed.b];
        j[(row, 2 * ed.a)] = 2.0 * d.x;
        j[(row, 2 * ed.a + 1)] = 2.0 * d.y;
        j[(row, 2 * ed.b)] = -2.0 * d.x;
        j[(row, 2 * ed.b + 1)] = -2.0 * d.y;
    }
    j
}

/// Free-variable parametrization with three coordinates pinned.
struct Gauge {
    anchor_pos: Point,
    slider: usize,
    direction: Point,
    /// Column of each vertex's x coordinate (y follows), `None` for the anchor;
    /// for the slider this is its single along-edge parameter.
    column: Vec<Option<usize>>,
    n_vars: usize,
}

impl Gauge {
    fn new(e: &Embedding) -> Self {
        let anchor = 0;
        let first = e
            .edges()
            .iter()
            .find(|ed| ed.contains(anchor))
            .expect("no isolated vertices");
        let slider = first.other(anchor).expect("edge contains anchor");
        let anchor_pos = e.vertex(anchor);
        let offset = e.vertex(slider) - anchor_pos;
        let direction = offset * (1.0 / offset.norm());
        let mut column = vec![None; e.vertex_count()];
        let mut next = 0;
        for (v, col) in column.iter_mut().enumerate() {
            if v == anchor {
                continue;
            }
            *col = Some(next);
            next += if v == slider { 1 } else { 2 };
        }
        Self {
            anchor_pos,
            slider,
            direction,
            column,
            n_vars: next,
        }
    }

    fn pack(&self, points: &[Point]) -> DVector<f64> {
        let mut x = DVector::zeros(self.n_vars);
        for (v, p) in points.iter().enumerate() {
            match self.column[v] {
                None => {}
                Some(c) if v == self.slider => x[c] = (*p - self.anchor_pos).dot(self.direction),
                Some(c) => {
                    x[c] = p.x;
                    x[c + 1] = p.y;
                }
            }
        }
        x
    }

    fn unpack(&self, x: &DVector<f64>) -> Vec<Point> {
        self.column
            .iter()
            .enumerate()
            .map(|(v, col)| match *col {
                None => self.anchor_pos,
                Some(c) if v == self.slider => self.anchor_pos + self.direction * x[c],
                Some(c) => Point::new(x[c], x[c + 1]),
            })
            .collect()
    }

    fn jacobian(&self, points: &[Point], edges: &[Edge]) -> DMatrix<f64> {
        let mut j = DMatrix::zeros(edges.len(), self.n_vars);
        for (row, ed) in edges.iter().enumerate() {
            let d = (points[ed.a] - points[ed.b]) * 2.0;
            for (v, g) in [(ed.a, d), (ed.b, d * -1.0)] {
                match self.column[v] {
                    None => {}
                    Some(c) if v == self.slider => j[(row, c)] = g.dot(self.direction),
                    Some(c) => {
                        j[(row, c)] = g.x;
                        j[(row, c + 1)] = g.y;
                    }
                }
            }
        }
        j
    }
}

/// Refines `e` so all edges have unit length.
///
/// Stops when the maximum length deviation is at most `tol.unit_tol_refined`,
/// when a step shorter than [`MIN_STEP`] is proposed, or after `max_iter`
/// iterations.
pub fn refine(e: &Embedding, tol: &TolerancePolicy, max_iter: usize) -> Result<RefineResult, RefineError> {
    let edges = e.edges();
    let start = residual(e);
    // negated so a NaN residual is rejected too
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(start <= tol.unit_tol_raw) {
        return Err(RefineError::Precondition {
            residual: start,
            limit: tol.unit_tol_raw,
        });
    }
    let gauge = Gauge::new(e);
    let mut points = e.vertices().to_vec();
    let mut x = gauge.pack(&points);
    let mut r = squared_length_residuals(&points, edges);
    let mut cost = r.norm_squared();
    let mut damping = INITIAL_DAMPING;
    let mut iterations = 0;

    'outer: while iterations < max_iter && max_deviation(&points, edges) > tol.unit_tol_refined {
        let svd = gauge.jacobian(&points, edges).svd(true, true);
        let (u, v_t) = (svd.u.as_ref().unwrap(), svd.v_t.as_ref().unwrap());
        let s = &svd.singular_values;
        let s_max = s.max();
        let projected = u.transpose() * &r;
        let mut retries = 0;
        loop {
            let mut step = DVector::zeros(gauge.n_vars);
            for k in 0..s.len() {
                if s[k] <= tol.rank_tol * s_max {
                    continue;
                }
                let coeff = -s[k] / (s[k] * s[k] + damping) * projected[k];
                step += v_t.row(k).transpose() * coeff;
            }
            if step.norm() <= MIN_STEP {
                break 'outer;
            }
            let candidate_x = &x + &step;
            let candidate = gauge.unpack(&candidate_x);
            let candidate_r = squared_length_residuals(&candidate, edges);
            let candidate_cost = candidate_r.norm_squared();
            if candidate_cost < cost {
                x = candidate_x;
                points = candidate;
                r = candidate_r;
                cost = candidate_cost;
                damping = (damping / 10.0).max(1e-16);
                break;
            }
            damping *= 10.0;
            retries += 1;
            if retries >= MAX_RETRIES {
                return Err(RefineError::Diverged {
                    iterations,
                    residual: max_deviation(&points, edges),
                    iterate: points,
                });
            }
        }
        iterations += 1;
    }

    let final_residual = max_deviation(&points, edges);
    let displacement = points
        .iter()
        .zip(e.vertices())
        .map(|(p, q)| distance(*p, *q))
        .fold(0.0, f64::max);
    let embedding = e
        .with_vertices(points)
        .expect("refined coordinates are finite");
    Ok(RefineResult {
        embedding,
        iterations,
        final_residual,
        converged: final_residual <= tol.unit_tol_refined,
        displacement,
    })
}
