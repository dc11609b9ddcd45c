//! Matchstick-graph verification: unit lengths, non-crossing, degree profile, connectivity.

use std::fmt;

use crate::embedding::{degree_profile, DegreeProfile, Embedding, ProfileViolation};
use crate::geom::{direction_angle, segment_separation, TolerancePolicy};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitCheck {
    pub ok: bool,
    pub max_abs_deviation: f64,
}

/// Every edge length within `tol` of 1.
pub fn check_unit_lengths(e: &Embedding, tol: f64) -> UnitCheck {
    let max_abs_deviation = (0..e.edge_count())
        .map(|i| (e.edge_length(i) - 1.0).abs())
        .fold(0.0, f64::max);
    UnitCheck {
        ok: max_abs_deviation <= tol,
        max_abs_deviation,
    }
}

/// Why a pair of edges breaks planarity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Violation {
    /// Two edges with no common vertex touch or cross.
    Crossing { separation: f64 },
    /// Two edges at a common vertex lie on top of each other.
    Overlap { angle_deg: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlanarityCheck {
    pub ok: bool,
    /// Offending edge-index pairs `(i, j)` with `i < j`.
    pub violations: Vec<((usize, usize), Violation)>,
    /// Disjoint edge pairs whose separation is in `(sep_fail, sep_warn]`.
    pub near_contacts: Vec<((usize, usize), f64)>,
    pub min_separation: f64,
}

/// Pairwise scan of all edges.
///
/// Disjoint pairs at separation `<= sep_fail` are crossings; those up to
/// `sep_warn` are near contacts. Edges sharing a vertex must leave it at an
/// angle of at least `angle_tol` degrees.
pub fn check_noncrossing(e: &Embedding, tol: &TolerancePolicy) -> PlanarityCheck {
    let edges = e.edges();
    let segments: Vec<_> = (0..edges.len()).map(|i| e.segment(i)).collect();
    let mut violations = Vec::new();
    let mut near_contacts = Vec::new();
    let mut min_separation = f64::INFINITY;
    for i in 0..edges.len() {
        for j in i + 1..edges.len() {
            let (ei, ej) = (edges[i], edges[j]);
            if ei.shares_vertex(&ej) {
                let common = if ej.contains(ei.a) { ei.a } else { ei.b };
                let (Some(oi), Some(oj)) = (ei.other(common), ej.other(common)) else {
                    continue;
                };
                let c = e.vertex(common);
                let (Ok(ai), Ok(aj)) = (direction_angle(c, e.vertex(oi)), direction_angle(c, e.vertex(oj)))
                else {
                    violations.push(((i, j), Violation::Overlap { angle_deg: 0.0 }));
                    continue;
                };
                let diff = (ai - aj).abs();
                let angle = diff.min(360.0 - diff);
                if angle < tol.angle_tol {
                    violations.push(((i, j), Violation::Overlap { angle_deg: angle }));
                }
                continue;
            }
            let sep = segment_separation(&segments[i], &segments[j]);
            min_separation = min_separation.min(sep);
            if sep <= tol.sep_fail {
                violations.push(((i, j), Violation::Crossing { separation: sep }));
            } else if sep <= tol.sep_warn {
                near_contacts.push(((i, j), sep));
            }
        }
    }
    PlanarityCheck {
        ok: violations.is_empty(),
        violations,
        near_contacts,
        min_separation,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub unit: UnitCheck,
    pub planarity: PlanarityCheck,
    pub profile: Result<DegreeProfile, ProfileViolation>,
    pub connected: bool,
}

impl VerificationReport {
    pub fn profile_ok(&self) -> bool {
        self.profile.is_ok()
    }

    pub fn passed(&self) -> bool {
        self.unit.ok && self.planarity.ok && self.profile_ok() && self.connected
    }

    /// Machine-readable `key: value` lines.
    pub fn to_key_values(&self) -> Vec<(String, String)> {
        let mut kv = vec![
            ("unit_ok".to_string(), self.unit.ok.to_string()),
            (
                "unit_max_abs_deviation".to_string(),
                format!("{:.3e}", self.unit.max_abs_deviation),
            ),
            ("planarity_ok".to_string(), self.planarity.ok.to_string()),
            (
                "planarity_violations".to_string(),
                self.planarity.violations.len().to_string(),
            ),
            (
                "near_contacts".to_string(),
                self.planarity.near_contacts.len().to_string(),
            ),
            (
                "min_separation".to_string(),
                format!("{:.6e}", self.planarity.min_separation),
            ),
            ("profile_ok".to_string(), self.profile_ok().to_string()),
        ];
        match &self.profile {
            Ok(p) => {
                kv.push(("profile".to_string(), format!("({};{})", p.m, p.n)));
                kv.push(("count_m".to_string(), p.count_m.to_string()));
                kv.push(("count_n".to_string(), p.count_n.to_string()));
            }
            Err(v) => {
                kv.push(("profile".to_string(), format!("({};{})", v.m, v.n)));
                let list: Vec<String> = v
                    .offending
                    .iter()
                    .map(|(vx, d)| format!("{vx}:{d}"))
                    .collect();
                kv.push(("profile_offending".to_string(), list.join(",")));
            }
        }
        kv.push(("connected".to_string(), self.connected.to_string()));
        kv.push((
            "summary".to_string(),
            if self.passed() { "pass" } else { "fail" }.to_string(),
        ));
        kv
    }
}

impl fmt::Display for VerificationReport {
    /// Human summary.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mark = |ok: bool| if ok { "ok" } else { "FAILED" };
        writeln!(
            f,
            "unit lengths: {} (max deviation {:.3e})",
            mark(self.unit.ok),
            self.unit.max_abs_deviation
        )?;
        writeln!(
            f,
            "non-crossing: {} ({} violations, {} near contacts)",
            mark(self.planarity.ok),
            self.planarity.violations.len(),
            self.planarity.near_contacts.len()
        )?;
        match &self.profile {
            Ok(p) => writeln!(
                f,
                "degree profile: ok ({} of degree {}, {} of degree {})",
                p.count_m, p.m, p.count_n, p.n
            )?,
            Err(v) => writeln!(f, "degree profile: FAILED ({v})")?,
        }
        writeln!(f, "connected: {}", mark(self.connected))?;
        write!(
            f,
            "matchstick graph: {}",
            if self.passed() { "PASS" } else { "FAIL" }
        )
    }
}

/// Runs every check against the (m;n) profile.
pub fn verify_matchstick(e: &Embedding, m: usize, n: usize, tol: &TolerancePolicy) -> VerificationReport {
    VerificationReport {
        unit: check_unit_lengths(e, tol.unit_tol_refined),
        planarity: check_noncrossing(e, tol),
        profile: degree_profile(e, m, n),
        connected: e.is_connected(),
    }
}
