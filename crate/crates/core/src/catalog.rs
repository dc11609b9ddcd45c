//! The bundled figure catalog and the properties each figure is expected to have.
//!
//! Segment data ships inside the library; setting `MSG_CATALOG_DIR` makes
//! [`CatalogEntry::segment_text`] read `<dir>/<id>.seg` instead.

use std::fmt;

use thiserror::Error;

use crate::embedding::{build_embedding, cluster_points, parse_segments, Embedding, IngestError, ParseError, SegmentList};
use crate::geom::{Point, TolerancePolicy};
use crate::refine::{refine, RefineError, RefineResult, DEFAULT_MAX_ITER};
use crate::symmetry::Orientation;

pub const CATALOG_DIR_VAR: &str = "MSG_CATALOG_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EntryKind {
    Matchstick,
    Pattern,
    Outline,
    Stub,
}

impl fmt::Display for EntryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            EntryKind::Matchstick => "matchstick",
            EntryKind::Pattern => "pattern",
            EntryKind::Outline => "outline",
            EntryKind::Stub => "stub",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShapeExpectation {
    Trivial,
    PointSymmetric,
}

/// Expected angle fan at the vertex joining the two red edges.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FanExpectation {
    pub orientation: Orientation,
    pub angles: &'static [f64],
    pub tolerance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Expected {
    pub vertices: Option<usize>,
    pub edges: Option<usize>,
    pub profile: Option<(usize, usize)>,
    /// Number of vertices of degree `n`.
    pub count_n: Option<usize>,
    pub rigid: Option<bool>,
    pub isostatic: Option<bool>,
    pub symmetry: Option<&'static str>,
    pub rotation_order: Option<usize>,
    pub mirrors: Option<usize>,
    pub shape: Option<ShapeExpectation>,
    pub boundary_len: Option<usize>,
    /// Edge-disjoint occurrence counts.
    pub motifs: &'static [(&'static str, usize)],
    /// Every single-edge removal leaves a flexible framework.
    pub every_removal_flexible: Option<bool>,
    pub fan: Option<FanExpectation>,
    pub red_edges: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub kind: EntryKind,
    seg: Option<&'static str>,
    /// Vertex and edge counts from the caption, for every entry including stubs.
    pub caption_counts: Option<(usize, usize)>,
    pub expected: Expected,
    pub notes: &'static str,
}

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("unknown catalog id {0:?}")]
    Unknown(String),
    #[error("{id}: no data in paper source (caption only: {vertices} vertices, {edges} edges)")]
    Stub { id: String, vertices: usize, edges: usize },
    #[error("{id}: cannot read {path}: {source}")]
    Io {
        id: String,
        path: String,
        source: std::io::Error,
    },
    #[error("{id}: {source}")]
    Parse { id: String, source: ParseError },
    #[error("{id}: {source}")]
    Ingest { id: String, source: IngestError },
    #[error("{id}: {source}")]
    Refine { id: String, source: RefineError },
    #[error("{id}: outline entries are not matchstick graphs")]
    Outline { id: String },
}

/// Angles at the right degree-11 vertex of the isostatic detail graph, as printed.
#[allow(clippy::excessive_precision)] // kept digit for digit
pub const RED_FAN_ANGLES: [f64; 11] = [
    32.362519660072210,
    40.49207000332465,
    25.382433534610843,
    34.890820876760450,
    32.21894760945070,
    34.514335947363630,
    29.108515978283318,
    36.31491131809427,
    29.550687898877964,
    35.065359484316880,
    30.09939768884507,
];

/// Catalog ids of the bundled patterns with their motif names.
pub const PATTERNS: [(&str, &str); 4] = [
    ("fig1a", "kite"),
    ("fig1b", "triplet-kite"),
    ("fig1c", "double-kite"),
    ("fig1d", "reverse-double-kite"),
];

const NONE: Expected = Expected {
    vertices: None,
    edges: None,
    profile: None,
    count_n: None,
    rigid: None,
    isostatic: None,
    symmetry: None,
    rotation_order: None,
    mirrors: None,
    shape: None,
    boundary_len: None,
    motifs: &[],
    every_removal_flexible: None,
    fan: None,
    red_edges: None,
};

const fn asymmetric(v: usize, e: usize, n: usize, count_n: usize, motifs: &'static [(&'static str, usize)]) -> Expected {
    Expected {
        vertices: Some(v),
        edges: Some(e),
        profile: Some((4, n)),
        count_n: Some(count_n),
        rigid: Some(true),
        symmetry: Some("C_1"),
        mirrors: Some(0),
        shape: Some(ShapeExpectation::Trivial),
        motifs,
        ..NONE
    }
}

macro_rules! seg {
    ($id:literal) => {
        Some(include_str!(concat!("../catalog/", $id, ".seg")))
    };
}

pub static CATALOG: [CatalogEntry; 19] = [
    CatalogEntry {
        id: "fig1a",
        kind: EntryKind::Pattern,
        seg: seg!("fig1a"),
        caption_counts: Some((12, 21)),
        expected: Expected {
            vertices: Some(12),
            edges: Some(21),
            profile: Some((2, 4)),
            count_n: Some(9),
            rigid: Some(true),
            isostatic: Some(true),
            symmetry: Some("D_1"),
            mirrors: Some(1),
            motifs: &[("kite", 1)],
            ..NONE
        },
        notes: "kite; vertical mirror",
    },
    CatalogEntry {
        id: "fig1b",
        kind: EntryKind::Pattern,
        seg: seg!("fig1b"),
        caption_counts: Some((22, 41)),
        expected: Expected {
            vertices: Some(22),
            edges: Some(41),
            rigid: Some(true),
            isostatic: Some(true),
            mirrors: Some(1),
            motifs: &[("triplet-kite", 1)],
            ..NONE
        },
        notes: "triplet kite; degrees 2, 3 and 4",
    },
    CatalogEntry {
        id: "fig1c",
        kind: EntryKind::Pattern,
        seg: seg!("fig1c"),
        caption_counts: Some((22, 42)),
        expected: Expected {
            vertices: Some(22),
            edges: Some(42),
            profile: Some((2, 4)),
            count_n: Some(20),
            rigid: Some(true),
            motifs: &[("double-kite", 1), ("kite", 2)],
            ..NONE
        },
        notes: "double kite: two joined kites",
    },
    CatalogEntry {
        id: "fig1d",
        kind: EntryKind::Pattern,
        seg: seg!("fig1d"),
        caption_counts: Some((22, 42)),
        expected: Expected {
            vertices: Some(22),
            edges: Some(42),
            profile: Some((2, 4)),
            count_n: Some(20),
            rigid: Some(true),
            motifs: &[("reverse-double-kite", 1), ("kite", 2)],
            ..NONE
        },
        notes: "reverse double kite: two joined kites",
    },
    CatalogEntry {
        id: "fig2a",
        kind: EntryKind::Matchstick,
        seg: seg!("fig2a"),
        caption_counts: Some((63, 126)),
        expected: Expected {
            vertices: Some(63),
            edges: Some(126),
            profile: Some((4, 4)),
            count_n: Some(63),
            rigid: Some(true),
            symmetry: Some("C_1"),
            mirrors: Some(0),
            motifs: &[("kite", 6)],
            ..NONE
        },
        notes: "asymmetric, but its six kites rearrange into fig2b",
    },
    CatalogEntry {
        id: "fig2b",
        kind: EntryKind::Matchstick,
        seg: seg!("fig2b"),
        caption_counts: Some((63, 126)),
        expected: Expected {
            vertices: Some(63),
            edges: Some(126),
            profile: Some((4, 4)),
            count_n: Some(63),
            rigid: Some(true),
            rotation_order: Some(3),
            ..NONE
        },
        notes: "rotational symmetry of order 3 (the data also has three mirrors)",
    },
    CatalogEntry {
        id: "fig3a",
        kind: EntryKind::Matchstick,
        seg: seg!("fig3a"),
        caption_counts: Some((60, 121)),
        expected: Expected {
            vertices: Some(60),
            edges: Some(121),
            profile: Some((4, 5)),
            count_n: Some(2),
            rigid: Some(true),
            symmetry: Some("C_1"),
            mirrors: Some(0),
            shape: Some(ShapeExpectation::PointSymmetric),
            boundary_len: Some(22),
            ..NONE
        },
        notes: "asymmetric graph with a point-symmetric outer shape",
    },
    CatalogEntry {
        id: "fig3b-outline",
        kind: EntryKind::Outline,
        seg: seg!("fig3b-outline"),
        caption_counts: None,
        expected: Expected {
            boundary_len: Some(22),
            ..NONE
        },
        notes: "outer shape of fig3a; chords are not matchsticks",
    },
    CatalogEntry {
        id: "fig4",
        kind: EntryKind::Matchstick,
        seg: seg!("fig4"),
        caption_counts: Some((66, 132)),
        expected: asymmetric(66, 132, 4, 66, &[]),
        notes: "4-regular, completely asymmetric",
    },
    CatalogEntry {
        id: "fig5",
        kind: EntryKind::Matchstick,
        seg: seg!("fig5"),
        caption_counts: Some((62, 125)),
        expected: asymmetric(62, 125, 5, 2, &[("triplet-kite", 2)]),
        notes: "(4;5), contains two triplet kites",
    },
    CatalogEntry {
        id: "fig6",
        kind: EntryKind::Matchstick,
        seg: seg!("fig6"),
        caption_counts: Some((63, 128)),
        expected: asymmetric(63, 128, 6, 2, &[("triplet-kite", 2)]),
        notes: "(4;6) v1; triplet-kite count shared with v2",
    },
    CatalogEntry {
        id: "fig7",
        kind: EntryKind::Matchstick,
        seg: seg!("fig7"),
        caption_counts: Some((63, 128)),
        expected: asymmetric(63, 128, 6, 2, &[("triplet-kite", 2)]),
        notes: "(4;6) v2; triplet-kite count shared with v1",
    },
    CatalogEntry {
        id: "fig8",
        kind: EntryKind::Matchstick,
        seg: seg!("fig8"),
        caption_counts: Some((93, 189)),
        expected: asymmetric(93, 189, 7, 2, &[]),
        notes: "(4;7)",
    },
    CatalogEntry {
        id: "fig9",
        kind: EntryKind::Matchstick,
        seg: seg!("fig9"),
        caption_counts: Some((87, 176)),
        expected: asymmetric(87, 176, 8, 1, &[("double-kite", 2)]),
        notes: "(4;8), contains two double kites",
    },
    CatalogEntry {
        id: "fig10",
        kind: EntryKind::Stub,
        seg: None,
        caption_counts: Some((136, 277)),
        expected: NONE,
        notes: "(4;9); caption only",
    },
    CatalogEntry {
        id: "fig11",
        kind: EntryKind::Stub,
        seg: None,
        caption_counts: Some((114, 231)),
        expected: NONE,
        notes: "(4;10); caption only",
    },
    CatalogEntry {
        id: "fig12",
        kind: EntryKind::Stub,
        seg: None,
        caption_counts: Some((382, 771)),
        expected: NONE,
        notes: "(4;11); caption only",
    },
    CatalogEntry {
        id: "fig13",
        kind: EntryKind::Matchstick,
        seg: seg!("fig13"),
        caption_counts: None,
        expected: Expected {
            rigid: Some(true),
            isostatic: Some(true),
            every_removal_flexible: Some(true),
            red_edges: Some(2),
            fan: Some(FanExpectation {
                orientation: Orientation::Clockwise,
                angles: &RED_FAN_ANGLES,
                tolerance: 1e-4,
            }),
            ..NONE
        },
        notes: "isostatic detail around a degree-11 vertex",
    },
    CatalogEntry {
        id: "fig3b",
        kind: EntryKind::Outline,
        seg: seg!("fig3b-outline"),
        caption_counts: None,
        expected: Expected {
            boundary_len: Some(22),
            ..NONE
        },
        notes: "alias of fig3b-outline",
    },
];

/// Looks up an entry; a trailing `.seg` or `.mge` is ignored.
pub fn entry(id: &str) -> Option<&'static CatalogEntry> {
    let id = id
        .strip_suffix(".seg")
        .or_else(|| id.strip_suffix(".mge"))
        .unwrap_or(id);
    CATALOG.iter().find(|e| e.id == id)
}

/// Entries in listing order, without aliases.
pub fn entries() -> impl Iterator<Item = &'static CatalogEntry> {
    CATALOG.iter().filter(|e| e.id != "fig3b")
}

impl CatalogEntry {
    pub fn is_stub(&self) -> bool {
        self.kind == EntryKind::Stub
    }

    pub fn stub_error(&self) -> CatalogError {
        let (vertices, edges) = self.caption_counts.unwrap_or((0, 0));
        CatalogError::Stub {
            id: self.id.to_string(),
            vertices,
            edges,
        }
    }

    /// Raw `.seg` text, from `MSG_CATALOG_DIR` when set.
    pub fn segment_text(&self) -> Result<String, CatalogError> {
        let bundled = self.seg.ok_or_else(|| self.stub_error())?;
        match std::env::var_os(CATALOG_DIR_VAR) {
            Some(dir) => {
                let file = if self.id == "fig3b" { "fig3b-outline" } else { self.id };
                let path = std::path::Path::new(&dir).join(format!("{file}.seg"));
                std::fs::read_to_string(&path).map_err(|source| CatalogError::Io {
                    id: self.id.to_string(),
                    path: path.display().to_string(),
                    source,
                })
            }
            None => Ok(bundled.to_string()),
        }
    }

    pub fn segments(&self) -> Result<SegmentList, CatalogError> {
        parse_segments(&self.segment_text()?).map_err(|source| CatalogError::Parse {
            id: self.id.to_string(),
            source,
        })
    }

    /// The unrefined embedding reconstructed from the transcription.
    pub fn embedding(&self, tol: &TolerancePolicy) -> Result<Embedding, CatalogError> {
        if self.kind == EntryKind::Outline {
            return Err(CatalogError::Outline { id: self.id.to_string() });
        }
        build_embedding(&self.segments()?, tol).map_err(|source| CatalogError::Ingest {
            id: self.id.to_string(),
            source,
        })
    }

    pub fn refine_result(&self, tol: &TolerancePolicy) -> Result<(Embedding, RefineResult), CatalogError> {
        let raw = self.embedding(tol)?;
        let result = refine(&raw, tol, DEFAULT_MAX_ITER).map_err(|source| CatalogError::Refine {
            id: self.id.to_string(),
            source,
        })?;
        Ok((raw, result))
    }

    pub fn refined(&self, tol: &TolerancePolicy) -> Result<Embedding, CatalogError> {
        Ok(self.refine_result(tol)?.1.embedding)
    }

    /// Number of distinct stroke endpoints; for outlines this is the polygon's vertex count.
    pub fn outline_vertex_count(&self, tol: &TolerancePolicy) -> Result<usize, CatalogError> {
        Ok(outline_vertex_count(&self.segments()?, tol))
    }
}

/// Distinct endpoints of a drawing whose strokes need not be unit length.
/// The median stroke length serves as the scale for `snap_tol`.
pub fn outline_vertex_count(sl: &SegmentList, tol: &TolerancePolicy) -> usize {
    let mut lengths: Vec<f64> = sl.segments.iter().map(|s| s.length()).collect();
    if lengths.is_empty() {
        return 0;
    }
    lengths.sort_by(f64::total_cmp);
    let scale = lengths[lengths.len() / 2];
    let points: Vec<Point> = sl.segments.iter().flat_map(|s| [s.a, s.b]).collect();
    cluster_points(&points, tol.snap_tol * scale).1.len()
}
