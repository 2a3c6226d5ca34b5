use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "vortex", version, about = "Singular vortex dynamics: point vortices, filaments, membranes and sheets")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Time integration drivers.
    #[command(subcommand)]
    Simulate(Simulate),
    /// ε-truncation slope analyses.
    #[command(subcommand)]
    Analyze(Analyze),
    /// Symplectic forms and pairings on given tangent fields.
    #[command(subcommand)]
    Evaluate(Evaluate),
    /// Write a deterministic fixture file.
    #[command(subcommand)]
    Fixture(Fixture),
    /// Invariant suites and acceptance criteria.
    #[command(subcommand)]
    Check(Check),
    /// Run a TOML scenario file.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Clone, Args)]
pub struct Stepping {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub dt: f64,
    #[arg(long)]
    pub steps: usize,
    /// `.csv` for a diagnostics table, anything else for NDJSON.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Simulate {
    /// Kirchhoff point vortices; records H, Px, Py, I per step.
    Points2d {
        #[command(flatten)]
        run: Stepping,
        /// rk4 or implicit_midpoint.
        #[arg(long, default_value = "rk4")]
        scheme: String,
    },
    /// Binormal flow of a closed curve.
    Filament3d {
        #[command(flatten)]
        run: Stepping,
        /// Include vertices every this many steps (0: never).
        #[arg(long, default_value_t = 1)]
        dump_every: usize,
        #[arg(long)]
        resample_every: Option<usize>,
        /// Stop when non-adjacent segments come closer than this fraction
        /// of the mean edge length.
        #[arg(long)]
        self_intersection: Option<f64>,
    },
    /// Skew-mean-curvature flow of a closed surface in R⁴.
    Membrane {
        #[command(flatten)]
        run: Stepping,
        #[arg(long, default_value_t = 0)]
        dump_every: usize,
    },
    /// Independent binormal flow of every fiber of a sheet.
    SheetFamily {
        #[command(flatten)]
        run: Stepping,
        #[arg(long, default_value_t = 0)]
        dump_every: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum Analyze {
    /// Fit v_ε at one vertex against ln(1/ε).
    LiaSlope {
        /// Membrane or closed curve file.
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        vertex: usize,
        #[arg(long, default_value_t = 1.0)]
        eps_decades: f64,
        #[arg(long, default_value_t = 7)]
        eps_count: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit E_ε against ln(1/ε).
    EnergySlope {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        eps_decades: f64,
        #[arg(long, default_value_t = 7)]
        eps_count: usize,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Args)]
pub struct FormArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// `V`/`W` vector lines.
    #[arg(long)]
    pub fields: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum Evaluate {
    /// Marsden–Weinstein form of a curve or membrane.
    Mw(FormArgs),
    /// Kirillov–Kostant form of point vortices.
    Kk(FormArgs),
    /// Vortex-sheet form, fields at vertices.
    SheetForm(FormArgs),
    /// Sheet pairing ∫ f V·n, one `V` per triangle.
    Pairing(FormArgs),
}

#[derive(Debug, Subcommand)]
pub enum Fixture {
    Circle3d {
        #[arg(long, default_value_t = 512)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long)]
        out: PathBuf,
    },
    Icosphere4d {
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 4)]
        level: u32,
        #[arg(long, default_value_t = 1.0)]
        strength: f64,
        #[arg(long)]
        out: PathBuf,
    },
    Flatpatch4d {
        #[arg(long, default_value_t = 1.0)]
        side: f64,
        #[arg(long, default_value_t = 32)]
        cells: usize,
        #[arg(long)]
        out: PathBuf,
    },
    #[command(name = "torus_band_sheet", alias = "torus-band-sheet")]
    TorusBandSheet {
        #[arg(long, default_value_t = 0.5)]
        width: f64,
        #[arg(long, default_value_t = 64)]
        nu: usize,
        #[arg(long, default_value_t = 32)]
        nv: usize,
        #[arg(long)]
        out: PathBuf,
    },
    #[command(name = "cylinder_fibration", alias = "cylinder-fibration")]
    CylinderFibration {
        #[arg(long, default_value_t = 8)]
        fibers: usize,
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(long, default_value_t = 0.1)]
        df: f64,
        #[arg(long)]
        out: PathBuf,
    },
    #[command(name = "random_vortices", alias = "random-vortices")]
    RandomVortices {
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum Check {
    /// Property suite on a named fixture.
    Invariants {
        /// sphere4d, circle3d, flatpatch4d or random_vortices.
        #[arg(long)]
        fixture: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Acceptance criteria, all or one.
    Acceptance {
        #[arg(long)]
        criterion: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
}
