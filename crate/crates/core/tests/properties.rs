use std::collections::BTreeSet;
use std::sync::OnceLock;

use proptest::prelude::*;

use matchstick_core::catalog::{self, EntryKind};
use matchstick_core::embedding::{read_embedding, write_embedding, Edge, Embedding};
use matchstick_core::geom::{Point, TolerancePolicy};
use matchstick_core::motifs::{bundled_patterns, inventory_with};
use matchstick_core::refine::{refine, DEFAULT_MAX_ITER};
use matchstick_core::rigidity::analyze;
use matchstick_core::symmetry::{angle_fan, isometry_group, outer_boundary, shape_symmetry, Orientation};
use matchstick_core::verify::{check_noncrossing, check_unit_lengths};

fn tol() -> TolerancePolicy {
    TolerancePolicy::default()
}

fn refined_all() -> &'static [(&'static str, Embedding)] {
    static CACHE: OnceLock<Vec<(&'static str, Embedding)>> = OnceLock::new();
    CACHE.get_or_init(|| {
        catalog::entries()
            .filter(|e| matches!(e.kind, EntryKind::Matchstick | EntryKind::Pattern))
            .map(|e| (e.id, e.refined(&tol()).unwrap()))
            .collect()
    })
}

fn refined(id: &str) -> &'static Embedding {
    &refined_all().iter().find(|(k, _)| *k == id).unwrap().1
}

fn moved(e: &Embedding, angle: f64, shift: Point) -> Embedding {
    e.map_points(|p| p.rotated(angle) + shift)
}

/// Whether `b` is a cyclic rotation of `a` within `eps`.
fn cyclic_eq(a: &[(f64, f64)], b: &[(f64, f64)], eps: f64) -> bool {
    let n = a.len();
    n == b.len()
        && (0..n.max(1)).any(|d| {
            (0..n).all(|i| {
                let (x, y) = (a[i], b[(i + d) % n]);
                (x.0 - y.0).abs() <= eps && (x.1 - y.1).abs() <= eps
            })
        })
}

#[test]
fn handshake_on_every_embedding() {
    for (id, e) in refined_all() {
        let degree_sum: usize = e.degrees().iter().sum();
        assert_eq!(degree_sum, 2 * e.edge_count(), "{id}");
    }
}

#[test]
fn mge_round_trip_is_byte_identical() {
    for (id, e) in refined_all() {
        let text = write_embedding(e);
        let back = read_embedding(&text).unwrap();
        assert_eq!(write_embedding(&back), text, "{id}");
        assert_eq!(back.vertices(), e.vertices(), "{id}");
    }
}

#[test]
fn refinement_is_idempotent() {
    for (id, e) in refined_all() {
        let again = refine(e, &tol(), DEFAULT_MAX_ITER).unwrap();
        assert!(again.displacement <= 1e-12, "{id}: moved {}", again.displacement);
        assert!(again.converged);
    }
}

#[test]
fn isometries_form_a_group() {
    for id in ["fig1a", "fig1d", "fig2b", "fig4"] {
        let g = isometry_group(refined(id), &tol());
        let perms: BTreeSet<Vec<usize>> = g.isometries.iter().map(|i| i.permutation.clone()).collect();
        assert_eq!(perms.len(), g.isometries.len(), "{id}: distinct elements");
        assert_eq!(g.isometries.len(), g.group.order(), "{id}");
        for a in &perms {
            for b in &perms {
                let ab: Vec<usize> = (0..a.len()).map(|i| a[b[i]]).collect();
                assert!(perms.contains(&ab), "{id}: not closed under composition");
            }
        }
    }
}

#[test]
fn vertex_and_outline_symmetry_agree_on_regular_polygons() {
    for n in 3..=9 {
        let r = 0.5 / (std::f64::consts::PI / n as f64).sin();
        let pts = (0..n)
            .map(|i| Point::new(0.0, r).rotated(std::f64::consts::TAU * i as f64 / n as f64))
            .collect();
        let edges = (0..n).map(|i| (i, (i + 1) % n, None)).collect();
        let e = Embedding::new("polygon", pts, edges).unwrap();
        let g = isometry_group(&e, &tol());
        let s = shape_symmetry(&outer_boundary(&e).unwrap(), &tol());
        assert_eq!(g.group.to_string(), format!("D_{n}"));
        assert_eq!(s.group, g.group);
        assert_eq!(s.point_symmetric, n % 2 == 0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn analyses_are_invariant_under_rigid_motion(
        idx in 0usize..4,
        angle in 0.0..std::f64::consts::TAU,
        dx in -50.0..50.0f64,
        dy in -50.0..50.0f64,
    ) {
        let id = ["fig1a", "fig2b", "fig3a", "fig13"][idx];
        let e = refined(id);
        let m = moved(e, angle, Point::new(dx, dy));
        let t = tol();

        let (u0, u1) = (check_unit_lengths(e, 1e-9), check_unit_lengths(&m, 1e-9));
        prop_assert_eq!(u0.ok, u1.ok);
        prop_assert!((u0.max_abs_deviation - u1.max_abs_deviation).abs() <= 1e-10);
        let (p0, p1) = (check_noncrossing(e, &t), check_noncrossing(&m, &t));
        prop_assert_eq!(p0.violations.len(), p1.violations.len());
        prop_assert_eq!(p0.near_contacts.len(), p1.near_contacts.len());
        prop_assert!((p0.min_separation - p1.min_separation).abs() <= 1e-10);

        let (r0, r1) = (analyze(e, &t).unwrap(), analyze(&m, &t).unwrap());
        prop_assert_eq!(r0.rank, r1.rank);
        prop_assert_eq!(r0.dof, r1.dof);

        let (g0, g1) = (isometry_group(e, &t), isometry_group(&m, &t));
        prop_assert_eq!(g0.group, g1.group);
        prop_assert_eq!(g0.point_symmetric, g1.point_symmetric);

        let (b0, b1) = (outer_boundary(e).unwrap(), outer_boundary(&m).unwrap());
        prop_assert!(cyclic_eq(&b0.turn_signature, &b1.turn_signature, 1e-10));
        prop_assert_eq!(shape_symmetry(&b0, &t).group, shape_symmetry(&b1, &t).group);
    }

    #[test]
    fn motif_counts_survive_reflection(angle in 0.0..std::f64::consts::TAU) {
        let t = tol();
        let patterns = bundled_patterns(&t);
        let e = refined("fig2a");
        let mirrored = e.map_points(|p| Point::new(-p.x, p.y).rotated(angle));
        let a = inventory_with(&patterns, e, &t);
        let b = inventory_with(&patterns, &mirrored, &t);
        for (x, y) in a.entries.iter().zip(&b.entries) {
            prop_assert_eq!(x.count, y.count);
            prop_assert_eq!(x.disjoint_count, y.disjoint_count);
        }
    }

    #[test]
    fn fans_cover_a_full_turn(v in 0usize..87, pick in 0usize..8, ccw in any::<bool>()) {
        let e = refined("fig9");
        let nbrs = e.neighbors(v);
        let start = Edge::new(v, nbrs[pick % nbrs.len()]);
        let orientation = if ccw { Orientation::CounterClockwise } else { Orientation::Clockwise };
        let fan = angle_fan(e, v, start, orientation).unwrap();
        prop_assert_eq!(fan.angles.len(), nbrs.len());
        prop_assert!((fan.angles.iter().sum::<f64>() - 360.0).abs() <= 1e-9);
        prop_assert!(fan.angles.iter().all(|&a| a > 0.0));
        prop_assert_eq!(fan.neighbors[0], start.other(v).unwrap());
    }
}
