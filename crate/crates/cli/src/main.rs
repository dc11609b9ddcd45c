use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use matchstick_core::catalog::{self, CatalogEntry, CatalogError, EntryKind};
use matchstick_core::embedding::{
    build_embedding, estimate_unit, parse_segments, read_embedding, write_embedding, Edge, Embedding,
};
use matchstick_core::geom::TolerancePolicy;
use matchstick_core::motifs::{bundled_patterns, find_near_motifs, inventory_with};
use matchstick_core::refine::{refine, RefineError, DEFAULT_MAX_ITER};
use matchstick_core::report::{analyze_embedding, degree_histogram, entry_report, Options};
use matchstick_core::rigidity::{analyze, edge_removal_scan, RemovalOutcome};
use matchstick_core::svg::{render_svg, Style};
use matchstick_core::symmetry::{angle_fan, isometry_group, outer_boundary, red_edge_fan, shape_symmetry, Orientation};
use matchstick_core::verify::{check_noncrossing, check_unit_lengths, verify_matchstick};

/// Reconstruct, refine and analyse matchstick graphs.
///
/// INPUT is a `.seg` drawing, an `.mge` embedding or a catalog id such as
/// `fig4`. Drawings and catalog entries are refined before analysis; `.mge`
/// files are analysed as stored.
#[derive(Parser)]
#[command(name = "msg", version)]
struct Cli {
    #[command(flatten)]
    tol: TolArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct TolArgs {
    /// Endpoint merge radius, also used for symmetry and motif matching (units)
    #[arg(long, global = true)]
    snap_tol: Option<f64>,
    /// Edge length tolerance after refinement (units)
    #[arg(long, global = true)]
    unit_tol: Option<f64>,
    /// Relative edge length tolerance for transcribed drawings
    #[arg(long, global = true)]
    unit_tol_raw: Option<f64>,
    /// Relative singular value cutoff for numerical rank
    #[arg(long, global = true)]
    rank_tol: Option<f64>,
    /// Separation reported as a near contact (units)
    #[arg(long, global = true)]
    sep_warn: Option<f64>,
    /// Separation counted as a crossing (units)
    #[arg(long, global = true)]
    sep_fail: Option<f64>,
    /// Minimum angle between edges at a shared vertex (degrees)
    #[arg(long, global = true)]
    angle_tol: Option<f64>,
}

impl TolArgs {
    fn policy(&self) -> Result<TolerancePolicy, Failure> {
        let mut t = TolerancePolicy::default();
        let overrides = [
            (&mut t.snap_tol, self.snap_tol),
            (&mut t.unit_tol_refined, self.unit_tol),
            (&mut t.unit_tol_raw, self.unit_tol_raw),
            (&mut t.rank_tol, self.rank_tol),
            (&mut t.sep_warn, self.sep_warn),
            (&mut t.sep_fail, self.sep_fail),
            (&mut t.angle_tol, self.angle_tol),
        ];
        for (slot, value) in overrides {
            if let Some(v) = value {
                *slot = v;
            }
        }
        t.validate().map_err(|e| Failure::Input(e.to_string()))?;
        Ok(t)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build an embedding from a segment drawing
    Ingest {
        input: String,
        /// Write the embedding (.mge) here
        output: Option<PathBuf>,
        #[arg(short, long, conflicts_with = "output")]
        o: Option<PathBuf>,
    },
    /// Refine vertex positions to exact unit edge lengths
    Refine {
        input: String,
        #[arg(short, long)]
        o: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
        max_iter: usize,
    },
    /// Check unit lengths, non-crossing, connectivity and degree profile
    Verify {
        input: String,
        /// Degree profile as `m,n`; inferred when the graph has at most two degrees
        #[arg(long, value_parser = parse_profile)]
        profile: Option<(usize, usize)>,
    },
    /// Infinitesimal rigidity and optional single-edge removal scan
    Rigidity {
        input: String,
        #[arg(long)]
        scan: bool,
    },
    /// Symmetry group, outer shape and angle fans
    Symmetry {
        input: String,
        /// Print the angle fan at this vertex
        #[arg(long, requires = "start")]
        fan: Option<usize>,
        /// Neighbour of the fan vertex whose edge starts the fan
        #[arg(long)]
        start: Option<usize>,
        /// Print the fan at the vertex joining the two red edges
        #[arg(long)]
        red_fan: bool,
        /// Fan direction: cw or ccw
        #[arg(long, default_value = "cw")]
        orientation: Orientation,
    },
    /// Occurrences of the bundled rigid patterns
    Motifs { input: String },
    /// Full pipeline report
    Report {
        /// Catalog id or file; omit with --all
        #[arg(required_unless_present = "all")]
        input: Option<String>,
        /// Compare against the catalog expectations and fail on mismatch
        #[arg(long)]
        expect: bool,
        /// Report every catalog entry
        #[arg(long, conflicts_with = "input")]
        all: bool,
        #[arg(long, value_parser = parse_profile)]
        profile: Option<(usize, usize)>,
        /// Include the single-edge removal scan
        #[arg(long)]
        scan: bool,
    },
    /// Draw an embedding as SVG
    Render {
        input: String,
        #[arg(short, long)]
        o: Option<PathBuf>,
        /// Highlight vertices of this degree
        #[arg(long)]
        highlight_degree: Option<usize>,
    },
    /// List the bundled catalog
    Catalog,
}

fn parse_profile(s: &str) -> Result<(usize, usize), String> {
    let (m, n) = s
        .split_once(',')
        .or_else(|| s.split_once(';'))
        .ok_or_else(|| format!("expected m,n, got {s:?}"))?;
    let parse = |x: &str| x.trim().parse::<usize>().map_err(|e| format!("{x:?}: {e}"));
    Ok((parse(m)?, parse(n)?))
}

#[derive(Debug)]
enum Failure {
    /// Checks ran and failed.
    Verification,
    Input(String),
    NoData(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification => 1,
            Failure::Input(_) => 2,
            Failure::NoData(_) => 3,
        }
    }
}

impl From<CatalogError> for Failure {
    fn from(e: CatalogError) -> Self {
        match e {
            CatalogError::Stub { .. } => Failure::NoData(e.to_string()),
            CatalogError::Refine {
                source: RefineError::Diverged { .. },
                ..
            } => {
                eprintln!("error: {e}");
                Failure::Verification
            }
            other => Failure::Input(other.to_string()),
        }
    }
}

fn input_err(e: impl std::fmt::Display) -> Failure {
    Failure::Input(e.to_string())
}

/// Where an embedding came from decides whether it is refined first.
struct Loaded {
    embedding: Embedding,
    transcribed: bool,
}

fn load(input: &str, tol: &TolerancePolicy) -> Result<Loaded, Failure> {
    let path = Path::new(input);
    if path.is_file() {
        let text = std::fs::read_to_string(path).map_err(|e| input_err(format!("{input}: {e}")))?;
        let transcribed = path.extension().is_some_and(|x| x == "seg");
        let mut embedding = if transcribed {
            let sl = parse_segments(&text).map_err(|e| input_err(format!("{input}: {e}")))?;
            build_embedding(&sl, tol).map_err(|e| input_err(format!("{input}: {e}")))?
        } else {
            read_embedding(&text).map_err(|e| input_err(format!("{input}: {e}")))?
        };
        if embedding.name().is_empty() {
            let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned());
            embedding.set_name(stem.unwrap_or_default());
        }
        return Ok(Loaded {
            embedding,
            transcribed,
        });
    }
    let entry = catalog::entry(input).ok_or_else(|| input_err(format!("{input}: no such file or catalog id")))?;
    Ok(Loaded {
        embedding: entry.embedding(tol)?,
        transcribed: true,
    })
}

/// The embedding to analyse: transcriptions are refined, `.mge` files are not.
fn load_for_analysis(input: &str, tol: &TolerancePolicy) -> Result<Embedding, Failure> {
    let loaded = load(input, tol)?;
    if !loaded.transcribed {
        return Ok(loaded.embedding);
    }
    match refine(&loaded.embedding, tol, DEFAULT_MAX_ITER) {
        Ok(r) => Ok(r.embedding),
        Err(e @ RefineError::Precondition { .. }) => Err(input_err(e)),
        Err(e) => {
            eprintln!("error: {e}");
            Err(Failure::Verification)
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| input_err(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn print_kv(kv: &[(String, String)]) {
    for (k, v) in kv {
        println!("{k}: {v}");
    }
}

fn cmd_ingest(input: &str, output: Option<&Path>, tol: &TolerancePolicy) -> Result<(), Failure> {
    let sl = if Path::new(input).is_file() {
        let text = std::fs::read_to_string(input).map_err(|e| input_err(format!("{input}: {e}")))?;
        parse_segments(&text).map_err(|e| input_err(format!("{input}: {e}")))?
    } else {
        let entry = catalog::entry(input).ok_or_else(|| input_err(format!("{input}: no such file or catalog id")))?;
        entry.segments()?
    };
    let unit = estimate_unit(&sl, tol).map_err(input_err)?;
    let e = build_embedding(&sl, tol).map_err(input_err)?;
    println!("V={} E={} unit={unit:.6}", e.vertex_count(), e.edge_count());
    if let Some(p) = output {
        write_output(Some(p), &write_embedding(&e))?;
    }
    Ok(())
}

fn cmd_refine(input: &str, output: Option<&Path>, max_iter: usize, tol: &TolerancePolicy) -> Result<(), Failure> {
    let loaded = load(input, tol)?;
    match refine(&loaded.embedding, tol, max_iter) {
        Ok(r) => {
            println!("iterations: {}", r.iterations);
            println!("final_residual: {:.3e}", r.final_residual);
            println!("converged: {}", r.converged);
            println!("displacement: {:.3e}", r.displacement);
            if let Some(p) = output {
                write_output(Some(p), &write_embedding(&r.embedding))?;
            }
            if r.converged {
                Ok(())
            } else {
                Err(Failure::Verification)
            }
        }
        Err(e @ RefineError::Precondition { .. }) => Err(input_err(e)),
        Err(e) => {
            eprintln!("error: {e}");
            Err(Failure::Verification)
        }
    }
}

fn cmd_verify(input: &str, profile: Option<(usize, usize)>, tol: &TolerancePolicy) -> Result<(), Failure> {
    let e = load_for_analysis(input, tol)?;
    let histogram = degree_histogram(&e);
    let degrees: Vec<usize> = histogram.keys().copied().collect();
    let profile = profile.or(match degrees[..] {
        [d] => Some((d, d)),
        [m, n] => Some((m, n)),
        _ => None,
    });
    let passed = match profile {
        Some((m, n)) => {
            let report = verify_matchstick(&e, m, n, tol);
            print_kv(&report.to_key_values());
            eprintln!("{report}");
            report.passed()
        }
        None => {
            let unit = check_unit_lengths(&e, tol.unit_tol_refined);
            let planarity = check_noncrossing(&e, tol);
            let connected = e.is_connected();
            let ok = unit.ok && planarity.ok && connected;
            println!("unit_ok: {}", unit.ok);
            println!("unit_max_abs_deviation: {:.3e}", unit.max_abs_deviation);
            println!("planarity_ok: {}", planarity.ok);
            println!("planarity_violations: {}", planarity.violations.len());
            println!("near_contacts: {}", planarity.near_contacts.len());
            println!("min_separation: {:.6e}", planarity.min_separation);
            println!("profile: none ({} distinct degrees; pass --profile m,n)", degrees.len());
            println!("connected: {connected}");
            println!("summary: {}", if ok { "pass" } else { "fail" });
            ok
        }
    };
    if passed {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

fn cmd_rigidity(input: &str, scan: bool, tol: &TolerancePolicy) -> Result<(), Failure> {
    let e = load_for_analysis(input, tol)?;
    let r = analyze(&e, tol).map_err(input_err)?;
    println!("rank: {}", r.rank);
    println!("dof: {}", r.dof);
    println!("rigidity: {}", r.verdict());
    println!("isostatic_count: {}", e.edge_count() + 3 == 2 * e.vertex_count());
    if let Some(sigma) = r.singular_values.iter().rev().find(|&&s| s > 0.0) {
        println!("smallest_nonzero_singular_value: {sigma:.3e}");
    }
    if scan {
        let removals = edge_removal_scan(&e, tol).map_err(input_err)?;
        let flexible = removals.iter().filter(|x| x.makes_flexible()).count();
        println!("removal_scan: {flexible}/{} removals flexible", removals.len());
        for x in &removals {
            let outcome = match x.outcome {
                RemovalOutcome::Dof(d) => format!("dof {d}"),
                RemovalOutcome::Disconnected => "disconnected".to_string(),
            };
            println!("removal {} ({}-{}): {outcome}", x.index, x.edge.a, x.edge.b);
        }
    }
    Ok(())
}

fn cmd_symmetry(
    input: &str,
    fan: Option<(usize, usize)>,
    red_fan: bool,
    orientation: Orientation,
    tol: &TolerancePolicy,
) -> Result<(), Failure> {
    let e = load_for_analysis(input, tol)?;
    print_kv(&isometry_group(&e, tol).to_key_values("symmetry_"));
    match outer_boundary(&e) {
        Ok(b) => {
            println!("boundary_length: {}", b.len());
            let cycle: Vec<String> = b.cycle.iter().map(usize::to_string).collect();
            println!("boundary_cycle: {}", cycle.join(","));
            print_kv(&shape_symmetry(&b, tol).to_key_values("shape_"));
        }
        Err(err) => println!("boundary: error: {err}"),
    }
    let mut fans = Vec::new();
    if let Some((v, start)) = fan {
        fans.push(angle_fan(&e, v, Edge::new(v, start), orientation).map_err(input_err)?);
    }
    if red_fan {
        fans.push(red_edge_fan(&e, orientation).map_err(input_err)?);
    }
    for f in fans {
        let angles: Vec<String> = f.angles.iter().map(|a| format!("{a:.12}")).collect();
        let order: Vec<String> = f.neighbors.iter().map(usize::to_string).collect();
        println!("fan_vertex: {}", f.vertex);
        println!("fan_orientation: {}", f.orientation);
        println!("fan_neighbors: {}", order.join(","));
        println!("fan_angles: {}", angles.join(","));
        println!("fan_sum: {:.12}", f.angles.iter().sum::<f64>());
    }
    Ok(())
}

fn cmd_motifs(input: &str, tol: &TolerancePolicy) -> Result<(), Failure> {
    let e = load_for_analysis(input, tol)?;
    let patterns = bundled_patterns(tol);
    let inv = inventory_with(&patterns, &e, tol);
    print_kv(&inv.to_key_values());
    for entry in &inv.entries {
        for m in &entry.matches {
            let ids: Vec<String> = m.vertex_map.iter().map(usize::to_string).collect();
            println!(
                "match {}: vertices {} reflected={} rms={:.3e}",
                m.pattern,
                ids.join(","),
                m.reflected,
                m.rms_error
            );
        }
    }
    for p in &patterns {
        for n in find_near_motifs(p, &e, tol) {
            let ids: Vec<String> = n.matched.iter().map(usize::to_string).collect();
            println!("near {}: vertices {} missing={}", n.pattern, ids.join(","), n.missing);
        }
    }
    Ok(())
}

fn report_one(
    input: &str,
    expect: bool,
    profile: Option<(usize, usize)>,
    scan: bool,
    tol: &TolerancePolicy,
) -> Result<String, Failure> {
    if let Some(entry) = catalog::entry(input).filter(|_| !Path::new(input).is_file()) {
        if entry.is_stub() {
            let (v, e) = entry.caption_counts.unwrap_or((0, 0));
            println!("name: {}", entry.id);
            println!("kind: stub");
            println!("caption_vertices: {v} (unverifiable)");
            println!("caption_edges: {e} (unverifiable)");
            return Err(entry.stub_error().into());
        }
        let report = entry_report(entry, tol)?;
        let mut text = String::new();
        for (k, v) in &report.lines {
            text.push_str(&format!("{k}: {v}\n"));
        }
        if expect {
            for o in &report.outcomes {
                text.push_str(&format!("{o}\n"));
            }
            let failed = report.outcomes.iter().filter(|o| !o.ok).count();
            text.push_str(&format!("expectations: {}/{} met\n", report.outcomes.len() - failed, report.outcomes.len()));
            if failed > 0 {
                print!("{text}");
                return Err(Failure::Verification);
            }
        }
        return Ok(text);
    }
    if expect {
        return Err(input_err(format!("{input}: --expect needs a catalog id")));
    }
    let loaded = load(input, tol)?;
    let opts = Options {
        profile,
        removal_scan: scan,
        fan: None,
    };
    let analysis = analyze_embedding(&loaded.embedding, &opts, tol).map_err(|e| match e {
        RefineError::Precondition { .. } => input_err(e),
        other => {
            eprintln!("error: {other}");
            Failure::Verification
        }
    })?;
    let mut text = String::new();
    for (k, v) in analysis.to_key_values().iter().chain(&analysis.asymmetry().to_key_values()) {
        text.push_str(&format!("{k}: {v}\n"));
    }
    Ok(text)
}

fn cmd_report_all(expect: bool, tol: &TolerancePolicy) -> Result<(), Failure> {
    let entries: Vec<&CatalogEntry> = catalog::entries().collect();
    let results: Vec<Result<String, CatalogError>> = std::thread::scope(|s| {
        let handles: Vec<_> = entries
            .iter()
            .map(|entry| {
                s.spawn(move || {
                    let report = entry_report(entry, tol)?;
                    let mut text = String::new();
                    for (k, v) in &report.lines {
                        text.push_str(&format!("{k}: {v}\n"));
                    }
                    if expect {
                        for o in &report.outcomes {
                            text.push_str(&format!("{o}\n"));
                        }
                    }
                    let ok = report.all_ok() || !expect;
                    text.push_str(&format!("status: {}\n", if ok { "ok" } else { "MISMATCH" }));
                    Ok(text)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("report thread panicked")).collect()
    });
    let mut failed = false;
    for (entry, result) in entries.iter().zip(results) {
        println!("== {} ==", entry.id);
        match result {
            Ok(text) => {
                failed |= text.ends_with("status: MISMATCH\n");
                print!("{text}");
            }
            Err(e @ CatalogError::Stub { .. }) => println!("{e}"),
            Err(e) => {
                println!("error: {e}");
                failed = true;
            }
        }
    }
    if failed {
        Err(Failure::Verification)
    } else {
        Ok(())
    }
}

fn cmd_render(input: &str, output: Option<&Path>, highlight: Option<usize>, tol: &TolerancePolicy) -> Result<(), Failure> {
    let e = load_for_analysis(input, tol)?;
    let svg = render_svg(
        &e,
        &Style {
            highlight_degree: highlight,
        },
    );
    write_output(output, &svg)
}

fn cmd_catalog() {
    println!(
        "{:<14} {:<10} {:>4} {:>4}  {:<8} {:>7}  {:<9} {:<28} notes",
        "id", "kind", "V", "E", "profile", "count_n", "symmetry", "motifs"
    );
    for entry in catalog::entries() {
        let x = &entry.expected;
        let opt = |v: Option<usize>| v.map_or("-".to_string(), |v| v.to_string());
        let (v, e) = match entry.kind {
            EntryKind::Stub => (opt(entry.caption_counts.map(|c| c.0)), opt(entry.caption_counts.map(|c| c.1))),
            _ => (opt(x.vertices), opt(x.edges)),
        };
        let profile = x.profile.map_or("-".to_string(), |(m, n)| format!("({m};{n})"));
        let symmetry = x
            .symmetry
            .map(str::to_string)
            .or(x.rotation_order.map(|k| format!("rot {k}")))
            .unwrap_or_else(|| "-".into());
        let motifs: Vec<String> = x.motifs.iter().map(|(n, c)| format!("{n}={c}")).collect();
        println!(
            "{:<14} {:<10} {:>4} {:>4}  {:<8} {:>7}  {:<9} {:<28} {}",
            entry.id,
            entry.kind,
            v,
            e,
            profile,
            opt(x.count_n),
            symmetry,
            if motifs.is_empty() { "-".into() } else { motifs.join(",") },
            entry.notes
        );
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let tol = cli.tol.policy()?;
    match cli.command {
        Command::Ingest { input, output, o } => cmd_ingest(&input, output.or(o).as_deref(), &tol),
        Command::Refine { input, o, max_iter } => cmd_refine(&input, o.as_deref(), max_iter, &tol),
        Command::Verify { input, profile } => cmd_verify(&input, profile, &tol),
        Command::Rigidity { input, scan } => cmd_rigidity(&input, scan, &tol),
        Command::Symmetry {
            input,
            fan,
            start,
            red_fan,
            orientation,
        } => cmd_symmetry(&input, fan.zip(start), red_fan, orientation, &tol),
        Command::Motifs { input } => cmd_motifs(&input, &tol),
        Command::Report {
            input,
            expect,
            all,
            profile,
            scan,
        } => {
            if all {
                cmd_report_all(expect, &tol)
            } else {
                let input = input.expect("clap requires input without --all");
                let text = report_one(&input, expect, profile, scan, &tol)?;
                print!("{text}");
                Ok(())
            }
        }
        Command::Render {
            input,
            o,
            highlight_degree,
        } => cmd_render(&input, o.as_deref(), highlight_degree, &tol),
        Command::Catalog => {
            cmd_catalog();
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Input(msg) => eprintln!("error: {msg}"),
                Failure::NoData(msg) => eprintln!("{msg}"),
                Failure::Verification => {}
            }
            ExitCode::from(f.code())
        }
    }
}
