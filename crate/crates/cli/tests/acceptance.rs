//! Acceptance gate: every criterion is evaluated at its stated tolerance and
//! reported as one PASS/FAIL line. Exits nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use matchstick_core::catalog::{self, EntryKind, RED_FAN_ANGLES};
use matchstick_core::embedding::{read_embedding, write_embedding, Edge, Embedding};
use matchstick_core::geom::{Point, TolerancePolicy};
use matchstick_core::motifs::{bundled_patterns, find_motifs, inventory_with, MotifInventory};
use matchstick_core::refine::{constraint_jacobian, refine, squared_length_residuals, RefineResult, DEFAULT_MAX_ITER};
use matchstick_core::rigidity::{analyze, edge_removal_scan, matrix_rank};
use matchstick_core::symmetry::{isometry_group, outer_boundary, red_edge_fan, shape_symmetry, Orientation};
use matchstick_core::verify::{check_noncrossing, check_unit_lengths, verify_matchstick};

struct Figure {
    raw: Embedding,
    refinement: RefineResult,
}

impl Figure {
    fn e(&self) -> &Embedding {
        &self.refinement.embedding
    }
}

type Figures = BTreeMap<&'static str, Figure>;
type Verdict = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);

fn tol() -> TolerancePolicy {
    TolerancePolicy::default()
}

fn load_figures() -> Figures {
    let ids: Vec<&'static str> = catalog::entries()
        .filter(|e| matches!(e.kind, EntryKind::Matchstick | EntryKind::Pattern))
        .map(|e| e.id)
        .collect();
    std::thread::scope(|s| {
        let handles: Vec<_> = ids
            .iter()
            .map(|&id| {
                s.spawn(move || {
                    let entry = catalog::entry(id).unwrap();
                    let raw = entry.embedding(&tol()).unwrap_or_else(|e| panic!("{e}"));
                    let refinement = refine(&raw, &tol(), DEFAULT_MAX_ITER).unwrap_or_else(|e| panic!("{id}: {e}"));
                    (id, Figure { raw, refinement })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    })
}

fn all_ok(failures: Vec<String>, summary: String) -> Verdict {
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(failures.join("; "))
    }
}

fn ingestion_counts(f: &Figures) -> Verdict {
    let expected = [
        ("fig1a", 12, 21),
        ("fig1b", 22, 41),
        ("fig1c", 22, 42),
        ("fig1d", 22, 42),
        ("fig2a", 63, 126),
        ("fig2b", 63, 126),
        ("fig3a", 60, 121),
        ("fig4", 66, 132),
        ("fig5", 62, 125),
        ("fig6", 63, 128),
        ("fig7", 63, 128),
        ("fig8", 93, 189),
        ("fig9", 87, 176),
    ];
    let failures = expected
        .iter()
        .filter_map(|&(id, v, e)| {
            let g = &f[id].raw;
            let got = (g.vertex_count(), g.edge_count());
            (got != (v, e)).then(|| format!("{id}: {}/{} != {v}/{e}", got.0, got.1))
        })
        .collect();
    all_ok(failures, format!("{} figures match their captions exactly", expected.len()))
}

fn refinement(f: &Figures) -> Verdict {
    let mut worst = (0.0f64, 0.0f64, 0usize);
    let failures = f
        .iter()
        .filter_map(|(id, fig)| {
            let r = &fig.refinement;
            worst = (
                worst.0.max(r.final_residual),
                worst.1.max(r.displacement),
                worst.2.max(r.iterations),
            );
            let ok = r.converged && r.final_residual <= 1e-9 && r.iterations <= 200 && r.displacement <= 1e-2;
            (!ok).then(|| {
                format!(
                    "{id}: residual {:.1e}, {} iterations, displacement {:.1e}",
                    r.final_residual, r.iterations, r.displacement
                )
            })
        })
        .collect();
    all_ok(
        failures,
        format!(
            "{} entries (outline excluded); worst residual {:.1e}, displacement {:.1e}, iterations {}",
            f.len(),
            worst.0,
            worst.1,
            worst.2
        ),
    )
}

fn verification(f: &Figures) -> Verdict {
    let profiles = [
        ("fig2a", 4, 63),
        ("fig2b", 4, 63),
        ("fig3a", 5, 2),
        ("fig4", 4, 66),
        ("fig5", 5, 2),
        ("fig6", 6, 2),
        ("fig7", 6, 2),
        ("fig8", 7, 2),
        ("fig9", 8, 1),
    ];
    let mut failures = Vec::new();
    for (id, n, count) in profiles {
        let e = f[id].e();
        let r = verify_matchstick(e, 4, n, &tol());
        let observed = e.degrees().iter().filter(|&&d| d == n).count();
        if !r.passed() || observed != count {
            failures.push(format!("{id}: passed={} degree-{n} count {observed} (want {count})", r.passed()));
        }
    }
    // building blocks carry a (2;4) profile in the catalog
    let mut blocks = 0;
    for (id, fig) in f {
        let listed = profiles.iter().any(|p| p.0 == *id);
        if let (false, Some((m, n))) = (listed, catalog::entry(id).unwrap().expected.profile) {
            blocks += 1;
            if !verify_matchstick(fig.e(), m, n, &tol()).passed() {
                failures.push(format!("{id}: ({m};{n}) verification failed"));
            }
        }
    }
    // the detail graph has no two-degree profile; the remaining checks apply
    let e = f["fig13"].e();
    let (u, p) = (check_unit_lengths(e, 1e-9), check_noncrossing(e, &tol()));
    if !(u.ok && p.ok && e.is_connected()) {
        failures.push("fig13: unit/non-crossing/connectivity".into());
    }
    all_ok(
        failures,
        format!(
            "{} profiled graphs pass with the expected degree counts, {blocks} building blocks pass; fig13 passes without a profile ({} near contacts)",
            profiles.len(),
            p.near_contacts.len()
        ),
    )
}

fn rigidity(f: &Figures) -> Verdict {
    let ids = [
        "fig1a", "fig1b", "fig1c", "fig1d", "fig2a", "fig2b", "fig3a", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9",
        "fig13",
    ];
    let mut failures: Vec<String> = ids
        .iter()
        .filter_map(|&id| match analyze(f[id].e(), &tol()) {
            Ok(r) if r.dof == 0 => None,
            Ok(r) => Some(format!("{id}: dof {}", r.dof)),
            Err(e) => Some(format!("{id}: {e}")),
        })
        .collect();
    for id in ["fig1a", "fig1b"] {
        let e = f[id].e();
        if e.edge_count() + 3 != 2 * e.vertex_count() {
            failures.push(format!("{id}: E != 2V-3"));
        }
    }
    let e = f["fig13"].e();
    let isostatic = e.edge_count() + 3 == 2 * e.vertex_count();
    let scan = edge_removal_scan(e, &tol()).map_err(|err| err.to_string())?;
    let flexible = scan.iter().filter(|r| r.makes_flexible()).count();
    let reading = if isostatic {
        if flexible != scan.len() {
            failures.push(format!("fig13: only {flexible}/{} removals flexible", scan.len()));
        }
        "every"
    } else {
        if flexible == 0 {
            failures.push("fig13: no removal makes it flexible".into());
        }
        "some"
    };
    all_ok(
        failures,
        format!(
            "{} graphs have dof 0; fig1a/fig1b isostatic; fig13 E=2V-3={isostatic}, {reading}-edge reading: {flexible}/{} removals flexible",
            ids.len(),
            scan.len()
        ),
    )
}

fn symmetry(f: &Figures) -> Verdict {
    let t = tol();
    let mut failures = Vec::new();
    let g2b = isometry_group(f["fig2b"].e(), &t);
    if g2b.rotation_order != 3 {
        failures.push(format!("fig2b rotation order {}", g2b.rotation_order));
    }
    let kite = isometry_group(f["fig1a"].e(), &t);
    if kite.mirror_axes.len() != 1 {
        failures.push(format!("fig1a has {} mirrors", kite.mirror_axes.len()));
    }
    for id in ["fig4", "fig5", "fig6", "fig7", "fig8", "fig9"] {
        let g = isometry_group(f[id].e(), &t);
        if !(g.is_trivial() && g.mirror_axes.is_empty() && !g.point_symmetric) {
            failures.push(format!("{id} isometry group {}", g.group));
        }
        match outer_boundary(f[id].e()) {
            Ok(b) if shape_symmetry(&b, &t).is_trivial() => {}
            Ok(b) => failures.push(format!("{id} outer shape {}", shape_symmetry(&b, &t).group)),
            Err(e) => failures.push(format!("{id}: {e}")),
        }
    }
    let b3 = outer_boundary(f["fig3a"].e()).map_err(|e| e.to_string())?;
    let s3 = shape_symmetry(&b3, &t);
    if !s3.point_symmetric {
        failures.push(format!("fig3a outer shape {} is not point symmetric", s3.group));
    }
    all_ok(
        failures,
        format!(
            "fig2b {} (rotation order 3), fig1a {} with one mirror, fig4-9 C_1 with trivial outlines, fig3a outline {} point-symmetric",
            g2b.group, kite.group, s3.group
        ),
    )
}

fn angle_fan(f: &Figures) -> Verdict {
    let printed_sum: f64 = RED_FAN_ANGLES.iter().sum();
    let mut failures = Vec::new();
    if (printed_sum - 360.0).abs() > 2e-4 {
        failures.push(format!("printed list sums to {printed_sum}"));
    }
    let fan = red_edge_fan(f["fig13"].e(), Orientation::Clockwise).map_err(|e| e.to_string())?;
    let worst = fan
        .angles
        .iter()
        .zip(RED_FAN_ANGLES)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let sum: f64 = fan.angles.iter().sum();
    if fan.angles.len() != 11 || worst > 1e-4 {
        failures.push(format!("{} angles, max deviation {worst:.2e}", fan.angles.len()));
    }
    if (sum - 360.0).abs() > 1e-9 {
        failures.push(format!("refined fan sums to {sum}"));
    }
    if f["fig13"].e().degree(fan.vertex) != 11 {
        failures.push("fan vertex is not of degree 11".into());
    }
    all_ok(
        failures,
        format!(
            "11 angles within {worst:.1e} of the printed list (clockwise from the red edges), sum error {:.1e}; printed sum error {:.1e}",
            (sum - 360.0).abs(),
            (printed_sum - 360.0).abs()
        ),
    )
}

fn motifs(f: &Figures) -> Verdict {
    let t = tol();
    let patterns = bundled_patterns(&t);
    let inv = |id: &str| inventory_with(&patterns, f[id].e(), &t);
    let pick = |i: &MotifInventory, name: &str| i.entries.iter().find(|e| e.pattern == name).cloned().unwrap();
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    let mut check = |id: &str, name: &str, want: usize| {
        let e = pick(&inv(id), name);
        if e.disjoint_count != want {
            failures.push(format!("{id} {name}: {} (want {want})", e.disjoint_count));
        }
        if e.count != e.disjoint_count {
            notes.push(format!("{id} has {} overlapping {name} occurrences", e.count));
        }
    };
    check("fig2a", "kite", 6);
    for id in ["fig5", "fig6", "fig7"] {
        check(id, "triplet-kite", 2);
    }
    check("fig9", "double-kite", 2);
    for p in &patterns {
        let n = find_motifs(p, &p.embedding, &t).len();
        if n != 1 {
            failures.push(format!("{} self-match count {n}", p.name));
        }
    }
    let mut summary = "fig2a kite 6, fig5/6/7 triplet-kite 2, fig9 double-kite 2 (edge-disjoint), self-matches 1".to_string();
    if !notes.is_empty() {
        summary.push_str(&format!("; surplus: {}", notes.join(", ")));
    }
    all_ok(failures, summary)
}

fn random_framework(rng: &mut StdRng) -> Option<Embedding> {
    let n = rng.random_range(4..=9);
    let points = (0..n)
        .map(|_| Point::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
        .collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.random_bool(0.4) {
                edges.push((a, b, None));
            }
        }
    }
    Embedding::new("random", points, edges).ok()
}

fn property_suites(f: &Figures) -> Verdict {
    let t = tol();
    let mut failures = Vec::new();
    let mut rng = StdRng::seed_from_u64(2024);

    for (id, fig) in f {
        if fig.e().degrees().iter().sum::<usize>() != 2 * fig.e().edge_count() {
            failures.push(format!("handshake {id}"));
        }
    }

    for id in ["fig1a", "fig3a", "fig9", "fig13"] {
        let e = f[id].e();
        for _ in 0..3 {
            let angle = rng.random_range(0.0..std::f64::consts::TAU);
            let shift = Point::new(rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0));
            let m = e.map_points(|p| p.rotated(angle) + shift);
            let (u0, u1) = (check_unit_lengths(e, 1e-9), check_unit_lengths(&m, 1e-9));
            let (p0, p1) = (check_noncrossing(e, &t), check_noncrossing(&m, &t));
            let (r0, r1) = (analyze(e, &t).unwrap(), analyze(&m, &t).unwrap());
            let (g0, g1) = (isometry_group(e, &t), isometry_group(&m, &t));
            let ok = (u0.max_abs_deviation - u1.max_abs_deviation).abs() <= 1e-10
                && (p0.min_separation - p1.min_separation).abs() <= 1e-10
                && p0.near_contacts.len() == p1.near_contacts.len()
                && r0.rank == r1.rank
                && g0.group == g1.group;
            if !ok {
                failures.push(format!("motion invariance {id}"));
            }
        }
    }

    let mut checked = 0;
    while checked < 100 {
        let Some(e) = random_framework(&mut rng) else { continue };
        let base = matrix_rank(&e, t.rank_tol).unwrap();
        let k = rng.random_range(0..e.edge_count());
        if let Ok(smaller) = e.without_edge(k) {
            let r = matrix_rank(&smaller, t.rank_tol).unwrap();
            if !(r <= base && base <= r + 1) {
                failures.push(format!("rank after removal {base} -> {r}"));
            }
        }
        let (a, b) = (rng.random_range(0..e.vertex_count()), rng.random_range(0..e.vertex_count()));
        if let Ok(bigger) = e.with_edge(a, b) {
            let r = matrix_rank(&bigger, t.rank_tol).unwrap();
            if !(base <= r && r <= base + 1) {
                failures.push(format!("rank after addition {base} -> {r}"));
            }
        }
        checked += 1;
    }

    for (id, fig) in f {
        let again = refine(fig.e(), &t, DEFAULT_MAX_ITER).unwrap();
        if again.displacement > 1e-12 {
            failures.push(format!("idempotence {id}: {:.1e}", again.displacement));
        }
    }

    let mut worst_rel = 0.0f64;
    for _ in 0..20 {
        let Some(e) = random_framework(&mut rng) else { continue };
        let pts = e.vertices().to_vec();
        let edges: Vec<Edge> = e.edges().to_vec();
        let jac = constraint_jacobian(&pts, &edges);
        let h = 1e-6;
        for col in 0..2 * pts.len() {
            let shifted = |delta: f64| {
                let mut q = pts.clone();
                let p = &mut q[col / 2];
                if col % 2 == 0 {
                    p.x += delta;
                } else {
                    p.y += delta;
                }
                squared_length_residuals(&q, &edges)
            };
            let fd = (shifted(h) - shifted(-h)) / (2.0 * h);
            let exact = jac.column(col);
            let rel = (fd - exact).norm() / exact.norm().max(1.0);
            worst_rel = worst_rel.max(rel);
        }
    }
    if worst_rel > 1e-6 {
        failures.push(format!("jacobian relative error {worst_rel:.1e}"));
    }

    for (id, fig) in f {
        let text = write_embedding(fig.e());
        match read_embedding(&text) {
            Ok(back) if write_embedding(&back) == text => {}
            _ => failures.push(format!("round trip {id}")),
        }
    }

    all_ok(
        failures,
        format!(
            "handshake, motion invariance (1e-10), 100 rank monotonicity cases, idempotence (1e-12), jacobian rel. error {worst_rel:.1e}, byte-identical round trips"
        ),
    )
}

fn out_of_scope_guard() -> Verdict {
    let mut failures = Vec::new();
    let mut shown = Vec::new();
    for (id, v, e) in [("fig10", 136, 277), ("fig11", 114, 231), ("fig12", 382, 771)] {
        let o = Command::new(env!("CARGO_BIN_EXE_msg"))
            .args(["report", id, "--expect"])
            .env_remove("MSG_CATALOG_DIR")
            .output()
            .map_err(|e| e.to_string())?;
        let out = String::from_utf8_lossy(&o.stdout);
        let err = String::from_utf8_lossy(&o.stderr);
        let counts = out.contains(&format!("caption_vertices: {v}")) && out.contains(&format!("caption_edges: {e}"));
        if o.status.code() != Some(3) || !counts || !err.contains("no data") {
            failures.push(format!("{id}: exit {:?}", o.status.code()));
        }
        shown.push(format!("{v}/{e}"));
    }
    all_ok(failures, format!("stubs exit 3 with caption counts {}", shown.join(", ")))
}

fn main() -> ExitCode {
    let start = std::time::Instant::now();
    let figures = load_figures();
    let criteria: [Criterion; 9] = [
        ("ingestion counts", Box::new(|| ingestion_counts(&figures))),
        ("refinement", Box::new(|| refinement(&figures))),
        ("matchstick verification", Box::new(|| verification(&figures))),
        ("rigidity", Box::new(|| rigidity(&figures))),
        ("symmetry", Box::new(|| symmetry(&figures))),
        ("angle fan", Box::new(|| angle_fan(&figures))),
        ("motifs", Box::new(|| motifs(&figures))),
        ("property suites", Box::new(|| property_suites(&figures))),
        ("out-of-scope guard", Box::new(out_of_scope_guard)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} [{name}]: PASS - {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} [{name}]: FAIL - {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
