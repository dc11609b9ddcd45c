//! Occurrences of small rigid patterns inside a larger embedding.
//!
//! A pattern occurs when a rigid motion (optionally with a reflection) maps
//! every pattern vertex to within `snap_tol` of a distinct host vertex and
//! every pattern edge onto a host edge.

use std::collections::BTreeSet;

use crate::catalog;
use crate::embedding::{Embedding, PointGrid};
use crate::geom::{Point, TolerancePolicy};

#[derive(Clone, Debug, PartialEq)]
pub struct Pattern {
    pub name: String,
    pub embedding: Embedding,
    /// Number of rigid motions mapping the pattern onto itself.
    pub automorphism_count: usize,
}

impl Pattern {
    pub fn new(name: impl Into<String>, embedding: Embedding, tol: &TolerancePolicy) -> Self {
        let mut p = Self {
            name: name.into(),
            embedding,
            automorphism_count: 1,
        };
        p.automorphism_count = raw_alignments(&p, &p.embedding, tol).full.len().max(1);
        p
    }
}

/// The four patterns shipped with the catalog, refined with `tol`.
pub fn bundled_patterns(tol: &TolerancePolicy) -> Vec<Pattern> {
    catalog::PATTERNS
        .iter()
        .map(|&(id, name)| {
            let entry = catalog::entry(id).expect("bundled pattern is in the catalog");
            let e = entry
                .refined(tol)
                .unwrap_or_else(|err| panic!("bundled pattern {id} failed to build: {err}"));
            Pattern::new(name, e, tol)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct MotifMatch {
    pub pattern: String,
    /// `vertex_map[i]` is the host vertex for pattern vertex `i`.
    pub vertex_map: Vec<usize>,
    pub reflected: bool,
    /// Root-mean-square residual of the best rigid fit.
    pub rms_error: f64,
}

impl MotifMatch {
    pub fn host_vertices(&self) -> BTreeSet<usize> {
        self.vertex_map.iter().copied().collect()
    }
}

/// A partial occurrence with at most two pattern vertices missing.
#[derive(Clone, Debug, PartialEq)]
pub struct NearMatch {
    pub pattern: String,
    pub matched: BTreeSet<usize>,
    pub missing: usize,
}

struct Alignments {
    full: Vec<MotifMatch>,
    near: Vec<NearMatch>,
}

const MAX_MISSING: usize = 2;

/// Best rigid-fit RMS between corresponding point lists, after optionally
/// reflecting `a` in the x axis.
pub fn procrustes_rms(a: &[Point], b: &[Point], reflect: bool) -> f64 {
    let n = a.len() as f64;
    let a: Vec<Point> = a
        .iter()
        .map(|p| if reflect { Point::new(p.x, -p.y) } else { *p })
        .collect();
    let ca = a.iter().fold(Point::default(), |s, &p| s + p) * (1.0 / n);
    let cb = b.iter().fold(Point::default(), |s, &p| s + p) * (1.0 / n);
    let (mut sc, mut sd) = (0.0, 0.0);
    for (p, q) in a.iter().zip(b) {
        let (p, q) = (*p - ca, *q - cb);
        sd += p.dot(q);
        sc += p.cross(q);
    }
    let theta = sc.atan2(sd);
    let sq: f64 = a
        .iter()
        .zip(b)
        .map(|(p, q)| ((*p - ca).rotated(theta) - (*q - cb)).norm_squared())
        .sum();
    (sq / n).sqrt()
}

fn raw_alignments(pattern: &Pattern, host: &Embedding, tol: &TolerancePolicy) -> Alignments {
    let pe = &pattern.embedding;
    let pts = pe.vertices();
    let seed = pe.edges()[0];
    let (pa, pb) = (pts[seed.a], pts[seed.b]);
    let hosts = host.vertices();
    let grid = PointGrid::new(hosts, tol.snap_tol);
    let mut full = Vec::new();
    let mut near = Vec::new();

    for he in host.edges() {
        for (u, v) in [(he.a, he.b), (he.b, he.a)] {
            for reflected in [false, true] {
                let flip = |p: Point| if reflected { Point::new(p.x, -p.y) } else { p };
                let d = flip(pb - pa);
                let h = hosts[v] - hosts[u];
                let theta = h.y.atan2(h.x) - d.y.atan2(d.x);
                let place = |p: Point| hosts[u] + flip(p - pa).rotated(theta);

                let mut map: Vec<Option<usize>> = Vec::with_capacity(pts.len());
                let mut used = BTreeSet::new();
                let mut missing = 0;
                for &p in pts {
                    match grid.nearest_within(hosts, place(p), tol.snap_tol) {
                        Some(t) if used.insert(t) => map.push(Some(t)),
                        Some(_) => {
                            missing = usize::MAX;
                            break;
                        }
                        None => {
                            missing += 1;
                            map.push(None);
                        }
                    }
                    if missing > MAX_MISSING {
                        break;
                    }
                }
                if missing > MAX_MISSING {
                    continue;
                }
                let edges_ok = pe.edges().iter().all(|ed| match (map[ed.a], map[ed.b]) {
                    (Some(x), Some(y)) => host.has_edge(x, y),
                    _ => true,
                });
                if !edges_ok {
                    continue;
                }
                if missing == 0 {
                    let vertex_map: Vec<usize> = map.into_iter().flatten().collect();
                    let image: Vec<Point> = vertex_map.iter().map(|&t| hosts[t]).collect();
                    full.push(MotifMatch {
                        pattern: pattern.name.clone(),
                        rms_error: procrustes_rms(pts, &image, reflected),
                        vertex_map,
                        reflected,
                    });
                } else {
                    near.push(NearMatch {
                        pattern: pattern.name.clone(),
                        matched: map.into_iter().flatten().collect(),
                        missing,
                    });
                }
            }
        }
    }
    Alignments { full, near }
}

/// Distinct occurrences of `pattern` in `host`, one per host vertex set,
/// ordered by smallest host vertex id.
pub fn find_motifs(pattern: &Pattern, host: &Embedding, tol: &TolerancePolicy) -> Vec<MotifMatch> {
    dedup_full(raw_alignments(pattern, host, tol).full)
}

fn dedup_full(mut all: Vec<MotifMatch>) -> Vec<MotifMatch> {
    all.sort_by(|a, b| {
        a.host_vertices()
            .cmp(&b.host_vertices())
            .then(a.rms_error.total_cmp(&b.rms_error))
    });
    all.dedup_by(|a, b| a.host_vertices() == b.host_vertices());
    all
}

/// Partial occurrences not contained in any full one, deduplicated.
pub fn find_near_motifs(pattern: &Pattern, host: &Embedding, tol: &TolerancePolicy) -> Vec<NearMatch> {
    let Alignments { full, near } = raw_alignments(pattern, host, tol);
    let full_sets: Vec<BTreeSet<usize>> = full.iter().map(MotifMatch::host_vertices).collect();
    let mut out: Vec<NearMatch> = near
        .into_iter()
        .filter(|n| !full_sets.iter().any(|f| n.matched.is_subset(f)))
        .collect();
    out.sort_by(|a, b| a.matched.cmp(&b.matched).then(a.missing.cmp(&b.missing)));
    out.dedup_by(|a, b| a.matched == b.matched);
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct InventoryEntry {
    pub pattern: String,
    /// Distinct occurrences, possibly overlapping.
    pub count: usize,
    /// Largest number of occurrences that share no edge.
    pub disjoint_count: usize,
    pub near_count: usize,
    pub matches: Vec<MotifMatch>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MotifInventory {
    pub entries: Vec<InventoryEntry>,
    /// Fraction of host edges with both endpoints inside one occurrence and
    /// joined by a pattern edge.
    pub coverage: f64,
}

impl MotifInventory {
    pub fn count(&self, pattern: &str) -> Option<usize> {
        self.entries.iter().find(|e| e.pattern == pattern).map(|e| e.count)
    }

    pub fn disjoint_count(&self, pattern: &str) -> Option<usize> {
        self.entries
            .iter()
            .find(|e| e.pattern == pattern)
            .map(|e| e.disjoint_count)
    }

    pub fn to_key_values(&self) -> Vec<(String, String)> {
        let mut kv: Vec<(String, String)> = self
            .entries
            .iter()
            .flat_map(|e| {
                [
                    (format!("motif_{}", e.pattern), e.count.to_string()),
                    (format!("motif_{}_disjoint", e.pattern), e.disjoint_count.to_string()),
                    (format!("motif_{}_near", e.pattern), e.near_count.to_string()),
                ]
            })
            .collect();
        kv.push(("motif_edge_coverage".into(), format!("{:.4}", self.coverage)));
        kv
    }
}

/// Host edge indices covered by the pattern edges of an occurrence.
pub fn host_edges(pattern: &Pattern, host: &Embedding, m: &MotifMatch) -> BTreeSet<usize> {
    pattern
        .embedding
        .edges()
        .iter()
        .filter_map(|ed| host.edge_index(m.vertex_map[ed.a], m.vertex_map[ed.b]))
        .collect()
}

/// Size of the largest pairwise disjoint subfamily (exact branch and bound;
/// occurrence counts in practice are small).
pub fn max_disjoint(sets: &[BTreeSet<usize>]) -> usize {
    fn go(sets: &[BTreeSet<usize>], chosen: &mut Vec<usize>, start: usize, best: &mut usize) {
        *best = (*best).max(chosen.len());
        if chosen.len() + (sets.len() - start) <= *best {
            return;
        }
        for i in start..sets.len() {
            if chosen.iter().all(|&c| sets[c].is_disjoint(&sets[i])) {
                chosen.push(i);
                go(sets, chosen, i + 1, best);
                chosen.pop();
            }
        }
    }
    let mut best = 0;
    go(sets, &mut Vec::new(), 0, &mut best);
    best
}

pub fn inventory_with(patterns: &[Pattern], host: &Embedding, tol: &TolerancePolicy) -> MotifInventory {
    let mut covered = vec![false; host.edge_count()];
    let entries = patterns
        .iter()
        .map(|p| {
            let Alignments { full, near } = raw_alignments(p, host, tol);
            let full_sets: Vec<BTreeSet<usize>> = full.iter().map(MotifMatch::host_vertices).collect();
            let mut near_sets: Vec<BTreeSet<usize>> = near
                .into_iter()
                .map(|n| n.matched)
                .filter(|n| !full_sets.iter().any(|f| n.is_subset(f)))
                .collect();
            near_sets.sort();
            near_sets.dedup();
            let matches = dedup_full(full);
            let edge_sets: Vec<BTreeSet<usize>> = matches.iter().map(|m| host_edges(p, host, m)).collect();
            for &i in edge_sets.iter().flatten() {
                covered[i] = true;
            }
            InventoryEntry {
                pattern: p.name.clone(),
                count: matches.len(),
                disjoint_count: max_disjoint(&edge_sets),
                near_count: near_sets.len(),
                matches,
            }
        })
        .collect();
    let coverage = if covered.is_empty() {
        0.0
    } else {
        covered.iter().filter(|&&c| c).count() as f64 / covered.len() as f64
    };
    MotifInventory { entries, coverage }
}

/// Inventory against the bundled patterns.
pub fn motif_inventory(host: &Embedding, tol: &TolerancePolicy) -> MotifInventory {
    inventory_with(&bundled_patterns(tol), host, tol)
}
