use std::path::Path;
use std::process::{Command, Output};

fn msg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_msg"))
        .args(args)
        .env_remove("MSG_CATALOG_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn ingest_prints_counts() {
    let o = msg(&["ingest", "fig1a.seg"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("V=12 E=21"));
    let o = msg(&["ingest", "fig8.seg"]);
    assert!(stdout(&o).starts_with("V=93 E=189"));
}

#[test]
fn empty_input_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.seg");
    std::fs::write(&path, "").unwrap();
    let o = msg(&["ingest", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no data"));
}

#[test]
fn unknown_input_is_an_input_error() {
    assert_eq!(msg(&["verify", "nonexistent-figure"]).status.code(), Some(2));
    assert_eq!(msg(&["verify", "fig4", "--snap-tol", "-1"]).status.code(), Some(2));
}

#[test]
fn ingest_refine_verify_chain() {
    let dir = tempfile::tempdir().unwrap();
    let raw = dir.path().join("kite.mge");
    let exact = dir.path().join("kite-refined.mge");
    let raw_s = raw.to_str().unwrap();
    let exact_s = exact.to_str().unwrap();
    assert!(msg(&["ingest", "fig1a", raw_s]).status.success());
    // stored transcription is only approximately unit
    assert_eq!(msg(&["verify", raw_s]).status.code(), Some(1));
    let o = msg(&["refine", raw_s, "-o", exact_s]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("converged: true"));
    let o = msg(&["verify", exact_s, "--profile", "2,4"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("summary: pass"));
    assert_eq!(msg(&["verify", exact_s, "--profile", "4,4"]).status.code(), Some(1));
}

#[test]
fn report_expectations() {
    let o = msg(&["report", "fig4", "--expect"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = msg(&["report", "fig2a", "--expect"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("symmetry_group: C_1"));
    assert!(text.contains("motif_kite: 6"));
    assert!(text.contains("rearrangement_note:"));
}

#[test]
fn stubs_report_no_data() {
    for (id, v, e) in [("fig10", 136, 277), ("fig11", 114, 231), ("fig12", 382, 771)] {
        let o = msg(&["report", id, "--expect"]);
        assert_eq!(o.status.code(), Some(3), "{id}");
        let text = stdout(&o);
        assert!(text.contains(&format!("caption_vertices: {v}")));
        assert!(text.contains(&format!("caption_edges: {e}")));
        assert!(String::from_utf8_lossy(&o.stderr).contains("no data in paper source"));
    }
}

#[test]
fn render_examples() {
    let dir = tempfile::tempdir().unwrap();
    let tri = dir.path().join("tri.mge");
    std::fs::write(
        &tri,
        "name triangle\nunit 1.0\nv 0 0 0\nv 1 1 0\nv 2 0.5 0.8660254037844386\ne 0 1\ne 1 2\ne 0 2\n",
    )
    .unwrap();
    let svg = stdout(&msg(&["render", tri.to_str().unwrap()]));
    assert_eq!(svg.matches("<line ").count(), 3);
    assert_eq!(svg.matches("<circle ").count(), 3);

    let svg = stdout(&msg(&["render", "fig13"]));
    assert_eq!(svg.matches("stroke=\"red\"").count(), 2);
    let svg = stdout(&msg(&["render", "fig1a"]));
    assert_eq!(svg.matches("<line ").count(), 21);
}

#[test]
fn render_is_deterministic_and_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    for p in [&a, &b] {
        let o = msg(&["render", "fig9", "--highlight-degree", "8", "-o", p.to_str().unwrap()]);
        assert!(o.status.success());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let bad = dir.path().join("missing").join("x.svg");
    assert_eq!(msg(&["render", "fig1a", "-o", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn catalog_listing() {
    let text = stdout(&msg(&["catalog"]));
    for id in [
        "fig1a", "fig1b", "fig1c", "fig1d", "fig2a", "fig2b", "fig3a", "fig3b-outline", "fig4", "fig5", "fig6",
        "fig7", "fig8", "fig9", "fig13", "fig10", "fig11", "fig12",
    ] {
        assert!(text.lines().any(|l| l.split_whitespace().next() == Some(id)), "{id}");
    }
    let row = |id: &str| text.lines().find(|l| l.starts_with(&format!("{id} "))).unwrap().to_string();
    let fig11 = row("fig11");
    assert!(fig11.contains("114") && fig11.contains("231"));
    assert!(row("fig9").contains("double-kite=2"));
}

#[test]
fn subcommands_on_catalog_ids() {
    let o = msg(&["rigidity", "fig1a"]);
    assert!(stdout(&o).contains("dof: 0"));
    let o = msg(&["symmetry", "fig2b"]);
    assert!(stdout(&o).contains("symmetry_rotation_order: 3"));
    let o = msg(&["symmetry", "fig13", "--red-fan"]);
    assert!(stdout(&o).contains("fan_angles: 32.3625"));
    let o = msg(&["motifs", "fig9"]);
    assert!(stdout(&o).contains("motif_double-kite_disjoint: 2"));
}

#[test]
fn catalog_dir_override() {
    let dir = tempfile::tempdir().unwrap();
    // a lone triangle drawn at scale 10 stands in for fig1a
    std::fs::write(
        dir.path().join("fig1a.seg"),
        "name fig1a\n0 0 10 0\n10 0 5 -8.660254\n5 -8.660254 0 0\n",
    )
    .unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_msg"))
        .args(["ingest", "fig1a"])
        .env("MSG_CATALOG_DIR", dir.path())
        .output()
        .unwrap();
    assert!(stdout(&o).starts_with("V=3 E=3"));
    assert!(Path::new(env!("CARGO_BIN_EXE_msg")).exists());
}
