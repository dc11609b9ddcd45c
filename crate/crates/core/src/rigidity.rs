//! Infinitesimal rigidity of bar-joint frameworks via the rigidity matrix.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::embedding::{connected, Edge, Embedding};
use crate::geom::{Point, TolerancePolicy};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RigidityError {
    #[error("edge {edge} has (near) zero length")]
    DegenerateEdge { edge: usize },
    #[error("framework is disconnected; rank test does not apply")]
    Disconnected,
    #[error("rigidity analysis needs at least 3 vertices")]
    TooFewVertices,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RigidityResult {
    pub rank: usize,
    /// `2V - 3 - rank`: dimension of the non-trivial infinitesimal motions.
    pub dof: usize,
    pub rigid: bool,
    /// Descending.
    pub singular_values: Vec<f64>,
    /// Orthonormal velocity fields spanning the non-trivial flexes, present when `dof > 0`.
    pub flex_basis: Option<Vec<Vec<Point>>>,
}

impl RigidityResult {
    pub fn verdict(&self) -> &'static str {
        if self.rigid {
            "rigid (infinitesimally)"
        } else {
            "flexible (infinitesimal flex found)"
        }
    }
}

/// E x 2V matrix; the row of edge `(i, j)` holds `p_i - p_j` in the columns of
/// `i` and `p_j - p_i` in those of `j`.
pub fn rigidity_matrix(e: &Embedding) -> Result<DMatrix<f64>, RigidityError> {
    matrix_for(e.vertices(), e.edges())
}

fn matrix_for(points: &[Point], edges: &[Edge]) -> Result<DMatrix<f64>, RigidityError> {
    let mut m = DMatrix::zeros(edges.len(), 2 * points.len());
    for (row, ed) in edges.iter().enumerate() {
        let d = points[ed.a] - points[ed.b];
        if d.norm() < 1e-12 {
            return Err(RigidityError::DegenerateEdge { edge: row });
        }
        m[(row, 2 * ed.a)] = d.x;
        m[(row, 2 * ed.a + 1)] = d.y;
        m[(row, 2 * ed.b)] = -d.x;
        m[(row, 2 * ed.b + 1)] = -d.y;
    }
    Ok(m)
}

/// Number of singular values above `rank_tol` times the largest.
pub fn numerical_rank(singular_values: &[f64], rank_tol: f64) -> usize {
    let max = singular_values.iter().copied().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    singular_values
        .iter()
        .filter(|&&s| s > rank_tol * max)
        .count()
}

/// Numerical rank of the rigidity matrix; unlike [`analyze`] this accepts
/// disconnected frameworks.
pub fn matrix_rank(e: &Embedding, rank_tol: f64) -> Result<usize, RigidityError> {
    Ok(numerical_rank(&sorted_singular_values(&rigidity_matrix(e)?), rank_tol))
}

fn sorted_singular_values(m: &DMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

/// Orthonormal basis of the three trivial planar motions.
fn trivial_motions(points: &[Point]) -> Vec<DVector<f64>> {
    let n = points.len();
    let c = points.iter().fold(Point::default(), |acc, &p| acc + p) * (1.0 / n as f64);
    let mut tx = DVector::zeros(2 * n);
    let mut ty = DVector::zeros(2 * n);
    let mut rot = DVector::zeros(2 * n);
    for (i, p) in points.iter().enumerate() {
        tx[2 * i] = 1.0;
        ty[2 * i + 1] = 1.0;
        rot[2 * i] = -(p.y - c.y);
        rot[2 * i + 1] = p.x - c.x;
    }
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for mut v in [tx, ty, rot] {
        for b in &basis {
            let proj = b.dot(&v);
            v -= b * proj;
        }
        basis.push(v.normalize());
    }
    basis
}

/// Gram-Schmidt with pivoting on the largest remaining norm; returns at most `count` vectors.
fn orthonormal_span(mut vectors: Vec<DVector<f64>>, count: usize) -> Vec<DVector<f64>> {
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(count);
    while basis.len() < count {
        let Some((best, norm)) = vectors
            .iter()
            .map(|v| v.norm())
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(&b.1))
        else {
            break;
        };
        if norm == 0.0 {
            break;
        }
        let q = vectors.swap_remove(best) / norm;
        for v in &mut vectors {
            let proj = q.dot(v);
            *v -= &q * proj;
        }
        basis.push(q);
    }
    basis
}

/// Rank, degrees of freedom and (for flexible frameworks) a flex basis.
pub fn analyze(e: &Embedding, tol: &TolerancePolicy) -> Result<RigidityResult, RigidityError> {
    let n = e.vertex_count();
    if n < 3 {
        return Err(RigidityError::TooFewVertices);
    }
    if !e.is_connected() {
        return Err(RigidityError::Disconnected);
    }
    let m = rigidity_matrix(e)?;
    let rows = m.nrows().max(m.ncols());
    // zero rows make the thin decomposition return a full right basis
    let padded = if rows > m.nrows() {
        let mut p = DMatrix::zeros(rows, m.ncols());
        p.rows_mut(0, m.nrows()).copy_from(&m);
        p
    } else {
        m.clone()
    };
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.as_ref().expect("requested V^T");
    let max = svd.singular_values.max();
    let cutoff = tol.rank_tol * max;

    let mut singular_values = sorted_singular_values(&m);
    singular_values.truncate(m.nrows().min(m.ncols()));
    let rank = numerical_rank(&singular_values, tol.rank_tol);
    let dof = (2 * n - 3).saturating_sub(rank);

    let flex_basis = (dof > 0).then(|| {
        let trivial = trivial_motions(e.vertices());
        let null: Vec<DVector<f64>> = svd
            .singular_values
            .iter()
            .enumerate()
            .filter(|(_, &s)| s <= cutoff)
            .map(|(k, _)| {
                let mut v: DVector<f64> = v_t.row(k).transpose();
                for t in &trivial {
                    let proj = t.dot(&v);
                    v -= t * proj;
                }
                v
            })
            .collect();
        orthonormal_span(null, dof)
            .into_iter()
            .map(|v| (0..n).map(|i| Point::new(v[2 * i], v[2 * i + 1])).collect())
            .collect()
    });

    Ok(RigidityResult {
        rank,
        dof,
        rigid: dof == 0,
        singular_values,
        flex_basis,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RemovalOutcome {
    Dof(usize),
    Disconnected,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeRemoval {
    pub index: usize,
    pub edge: Edge,
    pub outcome: RemovalOutcome,
}

impl EdgeRemoval {
    /// Removal leaves a connected but flexible framework, or disconnects it.
    pub fn makes_flexible(&self) -> bool {
        !matches!(self.outcome, RemovalOutcome::Dof(0))
    }
}

/// Degrees of freedom after deleting each edge in turn.
pub fn edge_removal_scan(e: &Embedding, tol: &TolerancePolicy) -> Result<Vec<EdgeRemoval>, RigidityError> {
    analyze(e, tol)?;
    let n = e.vertex_count();
    let full = rigidity_matrix(e)?;
    let scan_one = |index: usize| {
        let edge = e.edges()[index];
        let rest = e
            .edges()
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != index)
            .map(|(_, ed)| *ed);
        let outcome = if !connected(n, rest) {
            RemovalOutcome::Disconnected
        } else {
            let reduced = full.clone().remove_row(index);
            let rank = numerical_rank(&sorted_singular_values(&reduced), tol.rank_tol);
            RemovalOutcome::Dof((2 * n - 3).saturating_sub(rank))
        };
        EdgeRemoval {
            index,
            edge,
            outcome,
        }
    };
    let workers = std::thread::available_parallelism()
        .map(|w| w.get())
        .unwrap_or(1)
        .min(8);
    let count = e.edge_count();
    let chunk = count.div_ceil(workers);
    let mut results: Vec<EdgeRemoval> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..count)
            .step_by(chunk.max(1))
            .map(|start| {
                let scan_one = &scan_one;
                scope.spawn(move || (start..(start + chunk).min(count)).map(scan_one).collect::<Vec<_>>())
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("scan worker panicked"))
            .collect()
    });
    results.sort_by_key(|r| r.index);
    Ok(results)
}
