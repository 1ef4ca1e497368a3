use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use degbound_core::bipartition::{
    abc_partition, cellulate_general, torus_checkerboard, two_color_orientable, verify_cellulation, Cellulation,
    Color,
};
use degbound_core::correctability::{
    certify_with_partition, hemisphere_partition, homogeneous_sweep, SweepConfig, Verdict,
};
use degbound_core::layout::{layout_from_complex_with_cap, torus_lattice_layout, QuditLayout, SiteKind};
use degbound_core::manifolds::Manifold;
use degbound_core::mesh_io::{parse_mesh, spread_positions, subdivided_positions, write_off};
use degbound_core::simplicial::{barycentric_subdivide, SimplicialComplex, SubdivisionMap};
use degbound_core::stabilizer::{
    fracton_code, planted_code, stacked_layers, surface_code_on_complex, toric_code, FractonModel, StabilizerCode,
};

/// Mesh layouts are built from twice-subdivided complexes whose vertex degrees grow quickly.
const MESH_DENSITY_CAP: usize = 1024;

#[derive(Parser)]
#[command(name = "degbound", version, about = "Cellulations, correctability and degeneracy certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build and verify a red/blue cellulation.
    Cellulate(CellulateArgs),
    /// Certify log2 D <= |C| for a code.
    Certify(CertifyArgs),
    /// Sample disjoint-ball regions and test their correctability.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct Output {
    /// Report file; defaults to a file in $DEGBOUND_OUT_DIR when that is set.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, env = "DEGBOUND_OUT_DIR", hide_env_values = true)]
    out_dir: Option<PathBuf>,
    /// Emit JSON instead of key: value text.
    #[arg(long)]
    json: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ManifoldArg {
    Sphere,
    Torus,
    GenusSurface,
    KleinBottle,
    ProjectivePlane,
    Torus3,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PathArg {
    General,
    Orientable,
}

#[derive(Args)]
struct CellulateArgs {
    #[arg(long, value_enum, default_value = "torus", conflicts_with = "mesh")]
    manifold: ManifoldArg,
    /// Genus for genus-surface.
    #[arg(long, default_value_t = 2)]
    genus: usize,
    /// Read the triangulation from a mesh file instead.
    #[arg(long)]
    mesh: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "general")]
    path: PathArg,
    /// Checkerboard with this many blocks per axis on the lattice torus (torus or torus3 only).
    #[arg(long)]
    blocks: Option<usize>,
    /// Lattice size for --blocks.
    #[arg(long = "L", default_value_t = 8)]
    size: usize,
    /// Mesh refinement for the qudit layout; 2 in dimension 2, 0 otherwise.
    #[arg(long)]
    refine: Option<usize>,
    #[arg(long, default_value_t = 2.0)]
    r_skel: f64,
    #[arg(long, default_value_t = 2.0)]
    r_sep: f64,
    /// Write the colored surface as OFF (dimension 2).
    #[arg(long)]
    off: Option<PathBuf>,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CodeArg {
    Toric2,
    Toric3,
    Xcube,
    Cubic1,
    Checkerboard,
    Stacked,
    SphereSurface,
    Surface,
    Planted,
}

#[derive(Args)]
struct CodeChoice {
    #[arg(long, value_enum)]
    code: CodeArg,
    #[arg(long = "L", default_value_t = 8)]
    size: usize,
    /// Triangulation for the surface code.
    #[arg(long, value_enum, default_value = "sphere")]
    manifold: ManifoldArg,
    #[arg(long, default_value_t = 2)]
    genus: usize,
}

#[derive(Args)]
struct CertifyArgs {
    #[command(flatten)]
    code: CodeChoice,
    #[arg(long, default_value_t = 2)]
    blocks: usize,
    #[arg(long, default_value_t = 1.0)]
    r_skel: f64,
    #[arg(long, default_value_t = 1.0)]
    r_sep: f64,
    /// Exit 0 when A or B is not correctable and the bound does not apply.
    #[arg(long)]
    allow_not_applicable: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    code: CodeChoice,
    #[arg(long, default_value_t = 1)]
    balls: usize,
    #[arg(long, default_value_t = 2.0)]
    radius: f64,
    #[arg(long, default_value_t = 50)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Exit 0 even when some region is not correctable.
    #[arg(long)]
    allow_failures: bool,
    #[command(flatten)]
    output: Output,
}

fn manifold(arg: ManifoldArg, genus: usize) -> Manifold {
    match arg {
        ManifoldArg::Sphere => Manifold::Sphere,
        ManifoldArg::Torus => Manifold::Torus,
        ManifoldArg::GenusSurface => Manifold::GenusSurface(genus),
        ManifoldArg::KleinBottle => Manifold::KleinBottle,
        ManifoldArg::ProjectivePlane => Manifold::ProjectivePlane,
        ManifoldArg::Torus3 => Manifold::Torus3,
    }
}

fn emit(output: &Output, default_name: &str, text: &str, json: &str) -> Result<()> {
    let body = if output.json { json } else { text };
    print!("{body}");
    let ext = if output.json { "json" } else { "txt" };
    let path = match (&output.out, &output.out_dir) {
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            Some(dir.join(format!("{default_name}.{ext}")))
        }
        _ => None,
    };
    if let Some(p) = path {
        std::fs::write(&p, body).with_context(|| format!("writing {}", p.display()))?;
        log::info!("wrote {}", p.display());
    }
    Ok(())
}

fn cellulate(args: &CellulateArgs) -> Result<bool> {
    if let Some(blocks) = args.blocks {
        let dim = match args.manifold {
            ManifoldArg::Torus => 2,
            ManifoldArg::Torus3 => 3,
            _ => bail!("--blocks needs --manifold torus or torus3"),
        };
        let cell = torus_checkerboard(dim, blocks)?;
        let layout = torus_lattice_layout(dim, args.size, SiteKind::Edges)?;
        let report = verify_cellulation(&cell, &layout, args.r_skel, args.r_sep)?;
        emit(&args.output, &format!("cellulate-torus{dim}-blocks{blocks}"), &report.to_text(), &report.to_json())?;
        return Ok(report.passed());
    }

    let (label, k) = match &args.mesh {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let stem = path.file_stem().map_or("mesh".into(), |s| s.to_string_lossy().into_owned());
            (stem, parse_mesh(&text)?)
        }
        None => {
            let m = manifold(args.manifold, args.genus);
            (m.to_string(), m.triangulate()?)
        }
    };
    let refine = args.refine.unwrap_or(if k.dim() == 2 { 2 } else { 0 });

    let (cell, facts, layers) = match args.path {
        PathArg::General => {
            let g = cellulate_general(&k)?;
            let facts = g.facts(&label);
            let layers = vec![(g.k.clone(), None), (g.m1.clone(), Some(g.map1.clone())), (g.m2.clone(), Some(g.map2.clone()))];
            (g.cellulation().clone(), Some(facts), layers)
        }
        PathArg::Orientable => {
            let (m1, map1) = barycentric_subdivide(&k);
            let m1 = Arc::new(m1);
            let coloring = two_color_orientable(&m1).context("the orientable shortcut needs an orientable manifold")?;
            (coloring.cellulation, None, vec![(Arc::new(k.clone()), None), (m1, Some(map1))])
        }
    };
    let base = cell.complex().expect("complex-based cellulation").clone();
    let layout = layout_from_complex_with_cap(&base, refine, MESH_DENSITY_CAP)?;
    let mut report = verify_cellulation(&cell, &layout, args.r_skel, args.r_sep)?;
    report.pipeline = facts;

    if let Some(off) = &args.off {
        write_colored_off(off, &layers, &cell)?;
    }
    emit(&args.output, &format!("cellulate-{label}"), &report.to_text(), &report.to_json())?;
    Ok(report.passed())
}

type Layer = (Arc<SimplicialComplex>, Option<SubdivisionMap>);

fn write_colored_off(path: &Path, layers: &[Layer], cell: &Cellulation) -> Result<()> {
    let mut pos = spread_positions(layers[0].0.count(0));
    for w in layers.windows(2) {
        let map = w[1].1.as_ref().expect("subdivision map");
        pos = subdivided_positions(&w[0].0, &pos, &w[1].0, map);
    }
    let top = &layers.last().expect("at least one layer").0;
    let text = write_off(top, &pos, |t| match cell.cell_of_top(t).map(|c| cell.color(c)) {
        Some(Color::Red) => [0.85, 0.2, 0.2],
        Some(Color::Blue) => [0.2, 0.3, 0.85],
        None => [0.6, 0.6, 0.6],
    })?;
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn build_code(choice: &CodeChoice) -> Result<(StabilizerCode, QuditLayout)> {
    let l = choice.size;
    Ok(match choice.code {
        CodeArg::Toric2 => toric_code(2, l)?,
        CodeArg::Toric3 => toric_code(3, l)?,
        CodeArg::Xcube => fracton_code(FractonModel::XCube, l)?,
        CodeArg::Cubic1 => fracton_code(FractonModel::Cubic1, l)?,
        CodeArg::Checkerboard => fracton_code(FractonModel::Checkerboard, l)?,
        CodeArg::Stacked => stacked_layers(l)?,
        CodeArg::SphereSurface => surface_code_on_complex(&Manifold::Sphere.triangulate()?)?,
        CodeArg::Surface => surface_code_on_complex(&manifold(choice.manifold, choice.genus).triangulate()?)?,
        CodeArg::Planted => {
            let layout = torus_lattice_layout(2, l, SiteKind::Edges)?;
            (planted_code(layout.n_qudits()), layout)
        }
    })
}

fn certify(args: &CertifyArgs) -> Result<bool> {
    let (code, layout) = build_code(&args.code)?;
    let label = code.name().replace(['(', ')', '='], "");
    let cert = if layout.mesh().is_some() {
        let p = hemisphere_partition(&layout)?;
        certify_with_partition(&code, &layout, &p, "hemispheres", (None, None))?
    } else {
        let dim = layout.flat().expect("flat layout").dim();
        let cell = torus_checkerboard(dim, args.blocks)?;
        let report = verify_cellulation(&cell, &layout, args.r_skel, args.r_sep)?;
        if !report.passed() {
            eprint!("{}", report.to_text());
            bail!("cellulation failed verification at r_skel = {}, r_sep = {}", args.r_skel, args.r_sep);
        }
        if report.c_covers_all {
            bail!(
                "C covers every qudit at r_skel = {}; shrink --r-skel or enlarge --L so A and B are nonempty",
                args.r_skel
            );
        }
        let p = abc_partition(&cell, &layout, args.r_skel, &report)?;
        certify_with_partition(&code, &layout, &p, &report.base, (Some(args.r_skel), Some(args.r_sep)))?
    };
    emit(&args.output, &format!("certify-{label}"), &cert.to_text(), &cert.to_json())?;
    Ok(match cert.verdict {
        Verdict::Holds => cert.entropy.all_hold(),
        Verdict::Violated => false,
        Verdict::NotApplicable => args.allow_not_applicable,
    })
}

fn sweep(args: &SweepArgs) -> Result<bool> {
    let (code, layout) = build_code(&args.code)?;
    let cfg = SweepConfig::new(args.radius, args.balls, args.samples, args.seed);
    let report = homogeneous_sweep(&code, &layout, &cfg)?;
    let label = format!("{}-seed{}", code.name().replace(['(', ')', '='], ""), args.seed);
    emit(&args.output, &format!("sweep-{label}"), &report.to_text(), &report.to_json())?;
    Ok(report.all_correctable() || args.allow_failures)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Cellulate(a) => cellulate(a),
        Command::Certify(a) => certify(a),
        Command::Sweep(a) => sweep(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
