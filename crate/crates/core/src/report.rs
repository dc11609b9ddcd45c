//! The full pipeline (refine, verify, rigidity, symmetry, motifs) and its
//! comparison against catalog expectations.

use std::collections::BTreeMap;
use std::fmt;

use crate::catalog::{CatalogEntry, CatalogError, EntryKind, Expected, ShapeExpectation};
use crate::embedding::{degree_profile, DegreeProfile, Embedding, ProfileViolation};
use crate::geom::TolerancePolicy;
use crate::motifs::{bundled_patterns, find_near_motifs, inventory_with, MotifInventory};
use crate::refine::{refine, RefineError, RefineResult, DEFAULT_MAX_ITER};
use crate::rigidity::{analyze, edge_removal_scan, EdgeRemoval, RigidityError, RigidityResult};
use crate::symmetry::{
    isometry_group, outer_boundary, red_edge_fan, shape_symmetry, AngleFan, AsymmetryReport, Orientation, OuterShape, ShapeError,
    SymmetryReport,
};
use crate::verify::{check_noncrossing, check_unit_lengths, PlanarityCheck, UnitCheck};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Options {
    /// Degree profile to verify; inferred from the degrees when absent.
    pub profile: Option<(usize, usize)>,
    pub removal_scan: bool,
    /// Compute the angle fan at the red edges in this direction.
    pub fan: Option<Orientation>,
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub name: String,
    pub refinement: RefineResult,
    pub unit: UnitCheck,
    pub planarity: PlanarityCheck,
    pub connected: bool,
    pub degrees: BTreeMap<usize, usize>,
    /// `None` when more than two distinct degrees occur and no profile was given.
    pub profile: Option<Result<DegreeProfile, ProfileViolation>>,
    pub rigidity: Result<RigidityResult, RigidityError>,
    pub removals: Option<Result<Vec<EdgeRemoval>, RigidityError>>,
    pub isometry: SymmetryReport,
    pub boundary: Result<OuterShape, ShapeError>,
    pub shape: Option<SymmetryReport>,
    pub inventory: MotifInventory,
    pub near_motifs: BTreeMap<String, usize>,
    pub red_edges: usize,
    pub fan: Option<Result<AngleFan, ShapeError>>,
}

impl Analysis {
    pub fn embedding(&self) -> &Embedding {
        &self.refinement.embedding
    }

    pub fn isostatic(&self) -> bool {
        let e = self.embedding();
        self.rigidity.as_ref().is_ok_and(|r| r.rigid) && e.edge_count() + 3 == 2 * e.vertex_count()
    }

    /// The asymmetry conditions assembled from this analysis.
    pub fn asymmetry(&self) -> AsymmetryReport {
        AsymmetryReport {
            rigidity: self.rigidity.clone(),
            isometry: self.isometry.clone(),
            shape: match (&self.boundary, &self.shape) {
                (Ok(_), Some(s)) => Ok(s.clone()),
                (Err(e), _) => Err(e.clone()),
                (Ok(_), None) => unreachable!("shape is computed whenever the boundary is"),
            },
            inventory: self.inventory.clone(),
        }
    }

    pub fn matchstick_ok(&self) -> bool {
        self.unit.ok && self.planarity.ok && self.connected && self.profile.as_ref().is_none_or(|p| p.is_ok())
    }

    pub fn to_key_values(&self) -> Vec<(String, String)> {
        let e = self.embedding();
        let r = &self.refinement;
        let mut kv: Vec<(String, String)> = Vec::new();
        let mut put = |k: &str, v: String| kv.push((k.to_string(), v));
        put("name", self.name.clone());
        put("vertices", e.vertex_count().to_string());
        put("edges", e.edge_count().to_string());
        let degrees: Vec<String> = self.degrees.iter().map(|(d, c)| format!("{d}x{c}")).collect();
        put("degrees", degrees.join(","));
        put("refine_iterations", r.iterations.to_string());
        put("refine_converged", r.converged.to_string());
        put("refine_residual", format!("{:.3e}", r.final_residual));
        put("refine_displacement", format!("{:.3e}", r.displacement));
        put("unit_ok", self.unit.ok.to_string());
        put("unit_max_abs_deviation", format!("{:.3e}", self.unit.max_abs_deviation));
        put("planarity_ok", self.planarity.ok.to_string());
        put("planarity_violations", self.planarity.violations.len().to_string());
        put("near_contacts", self.planarity.near_contacts.len().to_string());
        put("min_separation", format!("{:.6e}", self.planarity.min_separation));
        put("connected", self.connected.to_string());
        match &self.profile {
            Some(Ok(p)) => {
                put("profile", format!("({};{})", p.m, p.n));
                put("profile_ok", "true".into());
                put("count_n", p.count_n.to_string());
            }
            Some(Err(v)) => {
                put("profile", format!("({};{})", v.m, v.n));
                put("profile_ok", "false".into());
            }
            None => put("profile", "none".into()),
        }
        match &self.rigidity {
            Ok(rg) => {
                put("rank", rg.rank.to_string());
                put("dof", rg.dof.to_string());
                put("rigidity", rg.verdict().to_string());
            }
            Err(err) => put("rigidity", format!("error: {err}")),
        }
        put("isostatic", self.isostatic().to_string());
        if let Some(Ok(scan)) = &self.removals {
            let flexible = scan.iter().filter(|s| s.makes_flexible()).count();
            put("removal_scan", format!("{flexible}/{} removals flexible", scan.len()));
        }
        kv.extend(self.isometry.to_key_values("symmetry_"));
        match (&self.boundary, &self.shape) {
            (Ok(b), Some(s)) => {
                kv.push(("boundary_length".into(), b.len().to_string()));
                kv.extend(s.to_key_values("shape_"));
            }
            (Err(err), _) => kv.push(("boundary".into(), format!("error: {err}"))),
            _ => {}
        }
        kv.extend(self.inventory.to_key_values());
        for (name, n) in &self.near_motifs {
            kv.push((format!("near_{name}"), n.to_string()));
        }
        if self.red_edges > 0 {
            kv.push(("red_edges".into(), self.red_edges.to_string()));
        }
        match &self.fan {
            Some(Ok(f)) => {
                kv.push(("fan_vertex".into(), f.vertex.to_string()));
                kv.push(("fan_orientation".into(), f.orientation.to_string()));
                let a: Vec<String> = f.angles.iter().map(|x| format!("{x:.12}")).collect();
                kv.push(("fan_angles".into(), a.join(",")));
                kv.push(("fan_sum".into(), format!("{:.12}", f.angles.iter().sum::<f64>())));
            }
            Some(Err(err)) => kv.push(("fan".into(), format!("error: {err}"))),
            None => {}
        }
        kv
    }
}

pub fn degree_histogram(e: &Embedding) -> BTreeMap<usize, usize> {
    let mut h = BTreeMap::new();
    for d in e.degrees() {
        *h.entry(d).or_insert(0) += 1;
    }
    h
}

fn infer_profile(h: &BTreeMap<usize, usize>) -> Option<(usize, usize)> {
    let keys: Vec<usize> = h.keys().copied().collect();
    match keys[..] {
        [d] => Some((d, d)),
        [m, n] => Some((m, n)),
        _ => None,
    }
}

/// Refines `raw` and runs every analysis on the result.
pub fn analyze_embedding(raw: &Embedding, opts: &Options, tol: &TolerancePolicy) -> Result<Analysis, RefineError> {
    let refinement = refine(raw, tol, DEFAULT_MAX_ITER)?;
    let e = &refinement.embedding;
    let degrees = degree_histogram(e);
    let profile = opts
        .profile
        .or_else(|| infer_profile(&degrees))
        .map(|(m, n)| degree_profile(e, m, n));
    let boundary = outer_boundary(e);
    let shape = boundary.as_ref().ok().map(|b| shape_symmetry(b, tol));
    let patterns = bundled_patterns(tol);
    let near_motifs = patterns
        .iter()
        .map(|p| (p.name.clone(), find_near_motifs(p, e, tol).len()))
        .collect();
    let red_edges = (0..e.edge_count()).filter(|&i| e.has_tag(i, "red")).count();
    Ok(Analysis {
        name: e.name().to_string(),
        unit: check_unit_lengths(e, tol.unit_tol_refined),
        planarity: check_noncrossing(e, tol),
        connected: e.is_connected(),
        degrees,
        profile,
        rigidity: analyze(e, tol),
        removals: opts.removal_scan.then(|| edge_removal_scan(e, tol)),
        isometry: isometry_group(e, tol),
        boundary,
        shape,
        inventory: inventory_with(&patterns, e, tol),
        near_motifs,
        red_edges,
        fan: opts.fan.map(|o| red_edge_fan(e, o)),
        refinement,
    })
}

/// One expectation compared with what was observed.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub key: String,
    pub expected: String,
    pub observed: String,
    pub ok: bool,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "expect {}: {} (expected {}, observed {})",
            self.key,
            if self.ok { "ok" } else { "MISMATCH" },
            self.expected,
            self.observed
        )
    }
}

fn outcome(key: &str, expected: impl fmt::Display, observed: impl fmt::Display, ok: bool) -> Outcome {
    Outcome {
        key: key.to_string(),
        expected: expected.to_string(),
        observed: observed.to_string(),
        ok,
    }
}

fn eq<T: PartialEq + fmt::Display>(key: &str, expected: T, observed: T) -> Outcome {
    let ok = expected == observed;
    outcome(key, expected, observed, ok)
}

/// Compares an analysis with the expectations; `raw` is the unrefined embedding.
pub fn check_expectations(x: &Expected, raw: &Embedding, a: &Analysis) -> Vec<Outcome> {
    let mut out = Vec::new();
    if let Some(v) = x.vertices {
        out.push(eq("vertices", v, raw.vertex_count()));
    }
    if let Some(ed) = x.edges {
        out.push(eq("edges", ed, raw.edge_count()));
    }
    out.push(outcome(
        "refinement",
        "converged",
        format!("residual {:.3e}", a.refinement.final_residual),
        a.refinement.converged,
    ));
    out.push(eq("unit_lengths", true, a.unit.ok));
    out.push(eq("non_crossing", true, a.planarity.ok));
    out.push(eq("connected", true, a.connected));
    if let Some((m, n)) = x.profile {
        let p = degree_profile(a.embedding(), m, n);
        out.push(outcome(&format!("profile ({m};{n})"), "satisfied", p.as_ref().map_or_else(|v| v.to_string(), |_| "satisfied".into()), p.is_ok()));
        if let Some(c) = x.count_n {
            out.push(eq(&format!("degree_{n}_count"), c, a.degrees.get(&n).copied().unwrap_or(0)));
        }
    }
    if let Some(rigid) = x.rigid {
        let observed = a.rigidity.as_ref().map_or_else(|e| e.to_string(), |r| format!("dof {}", r.dof));
        let ok = a.rigidity.as_ref().is_ok_and(|r| r.rigid == rigid);
        out.push(outcome("rigid", rigid, observed, ok));
    }
    if let Some(iso) = x.isostatic {
        out.push(eq("isostatic", iso, a.isostatic()));
    }
    if let Some(all) = x.every_removal_flexible {
        let observed = match &a.removals {
            Some(Ok(scan)) => {
                let flexible = scan.iter().filter(|s| s.makes_flexible()).count();
                (flexible == scan.len(), format!("{flexible}/{}", scan.len()))
            }
            Some(Err(err)) => (false, err.to_string()),
            None => (false, "not scanned".into()),
        };
        out.push(outcome("every_removal_flexible", all, observed.1, observed.0 == all));
    }
    if let Some(g) = x.symmetry {
        out.push(eq("symmetry_group", g.to_string(), a.isometry.group.to_string()));
    }
    if let Some(k) = x.rotation_order {
        out.push(eq("rotation_order", k, a.isometry.rotation_order));
    }
    if let Some(k) = x.mirrors {
        out.push(eq("mirrors", k, a.isometry.mirror_axes.len()));
    }
    if x.symmetry == Some("C_1") {
        out.push(eq("point_symmetric", false, a.isometry.point_symmetric));
    }
    if let Some(shape) = x.shape {
        let (ok, observed) = match &a.shape {
            Some(s) => (
                match shape {
                    ShapeExpectation::Trivial => s.is_trivial(),
                    ShapeExpectation::PointSymmetric => s.point_symmetric,
                },
                format!("{} point_symmetric={}", s.group, s.point_symmetric),
            ),
            None => (false, "no boundary".into()),
        };
        let expected = match shape {
            ShapeExpectation::Trivial => "C_1",
            ShapeExpectation::PointSymmetric => "point symmetric",
        };
        out.push(outcome("outer_shape", expected, observed, ok));
    }
    if let Some(n) = x.boundary_len {
        out.push(eq("boundary_length", n, a.boundary.as_ref().map_or(0, OuterShape::len)));
    }
    for &(name, count) in x.motifs {
        let entry = a.inventory.entries.iter().find(|e| e.pattern == name);
        let observed = entry.map_or(0, |e| e.disjoint_count);
        let detail = entry.map_or("unknown pattern".to_string(), |e| {
            format!("{} ({} occurrences)", e.disjoint_count, e.count)
        });
        out.push(outcome(&format!("motif {name}"), count, detail, observed == count));
    }
    if let Some(n) = x.red_edges {
        out.push(eq("red_edges", n, a.red_edges));
    }
    if let Some(fan) = x.fan {
        let (ok, observed) = match &a.fan {
            Some(Ok(f)) => {
                let worst = f
                    .angles
                    .iter()
                    .zip(fan.angles)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                let sum = f.angles.iter().sum::<f64>();
                (
                    f.angles.len() == fan.angles.len() && worst <= fan.tolerance && (sum - 360.0).abs() <= 1e-9,
                    format!("{} angles, max deviation {worst:.3e}, sum {sum:.12}", f.angles.len()),
                )
            }
            Some(Err(err)) => (false, err.to_string()),
            None => (false, "not computed".into()),
        };
        out.push(outcome(
            "red_fan",
            format!("{} printed angles within {:e}", fan.angles.len(), fan.tolerance),
            observed,
            ok,
        ));
    }
    out
}

/// Report for a catalog entry or a file.
#[derive(Clone, Debug)]
pub struct Report {
    pub lines: Vec<(String, String)>,
    pub outcomes: Vec<Outcome>,
}

impl Report {
    pub fn all_ok(&self) -> bool {
        self.outcomes.iter().all(|o| o.ok)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, v) in &self.lines {
            writeln!(f, "{k}: {v}")?;
        }
        for o in &self.outcomes {
            writeln!(f, "{o}")?;
        }
        Ok(())
    }
}

pub fn options_for(entry: &CatalogEntry) -> Options {
    Options {
        profile: entry.expected.profile,
        removal_scan: entry.expected.every_removal_flexible.is_some(),
        fan: entry.expected.fan.map(|f| f.orientation),
    }
}

/// Runs the pipeline on a catalog entry and checks its expectations.
pub fn entry_report(entry: &CatalogEntry, tol: &TolerancePolicy) -> Result<Report, CatalogError> {
    match entry.kind {
        EntryKind::Stub => Err(entry.stub_error()),
        EntryKind::Outline => {
            let corners = entry.outline_vertex_count(tol)?;
            let mut lines = vec![
                ("name".to_string(), entry.id.to_string()),
                ("kind".to_string(), "outline".to_string()),
                ("outline_vertices".to_string(), corners.to_string()),
            ];
            let mut outcomes = Vec::new();
            if let Some(n) = entry.expected.boundary_len {
                outcomes.push(eq("outline_vertices", n, corners));
            }
            // cross-check against the graph whose outer shape this draws
            if let Some(graph) = crate::catalog::entry("fig3a") {
                let boundary = graph.refined(tol).ok().and_then(|e| outer_boundary(&e).ok());
                let len = boundary.map_or(0, |b| b.len());
                lines.push(("fig3a_boundary_length".into(), len.to_string()));
                outcomes.push(eq("matches fig3a boundary", corners, len));
            }
            Ok(Report { lines, outcomes })
        }
        EntryKind::Matchstick | EntryKind::Pattern => {
            let raw = entry.embedding(tol)?;
            let analysis = analyze_embedding(&raw, &options_for(entry), tol).map_err(|source| CatalogError::Refine {
                id: entry.id.to_string(),
                source,
            })?;
            let mut lines = vec![("kind".to_string(), entry.kind.to_string())];
            lines.extend(analysis.to_key_values());
            lines.extend(analysis.asymmetry().to_key_values());
            let outcomes = check_expectations(&entry.expected, &raw, &analysis);
            Ok(Report { lines, outcomes })
        }
    }
}
