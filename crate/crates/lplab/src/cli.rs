//! `lplab` subcommands. Exit codes: 0 success, 2 precondition error, 3 numerical
//! refusal (margin or divergence, report still written), 64 usage error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use lplab_core::counterexample::{
    ball_criterion, cone_sample, delta_sequence_dim, kernel_lower_bound, lacunary_field,
    prop19_profile, prop19_ratio, BumpBasis, KernelProfile, LacunaryParams, OrthonormalBump,
    SignPattern,
};
use lplab_core::duhamel::{band_diagnostics, saturating_trajectory, EpsilonFunction};
use lplab_core::eta::EtaSequence;
use lplab_core::field::{delta_j, reconstruct};
use lplab_core::geometry::PointSet;
use lplab_core::microlocal::{
    decay_check, density_function, dini_check, eta_from_density, eta_summable, DensityProfile,
    DensitySampling,
};
use lplab_core::norms::{band_norms, norm, SpaceSpec};
use lplab_core::paraproduct::{eta_estimate, separation_constant, EtaSetup};
use lplab_core::quad::{log2_slope, spread};
use lplab_core::rng::LabRng;
use lplab_core::solver::{
    catalan, catalan_recursive, local_solve, picard_in, series_bound, series_sum, tk_series_in,
    PicardStart, Problem, SolverReport,
};
use lplab_core::symbol::SymbolSpec;
use lplab_core::{Grid, LabError, SpectralField};

use crate::builtin::{resolve_u0, CONSTANT};
use crate::config::{GridCfg, RunConfig};
use crate::error::{AppError, AppResult};
use crate::lpf::{decode, encode, write_field};
use crate::output::{diagnostics_table, eta_table, fmt, series_table, write_json, Report, Table};
use crate::spec::{parse_set, parse_space, read_eta_csv};

#[derive(Debug, Parser)]
#[command(
    name = "lplab",
    version,
    about = "Littlewood-Paley analysis and mild-solution experiments on periodic grids"
)]
pub struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Thread cap (falls back to LPLAB_THREADS).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub dim: Option<usize>,
    /// Points per axis.
    #[arg(long, global = true)]
    pub size: Option<usize>,
    /// Box scale L (box side 2πL).
    #[arg(long = "l", global = true)]
    pub l: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// JSON report path.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// CSV table path.
    #[arg(long, global = true)]
    pub csv: Option<PathBuf>,
    /// Suppress tables and summaries on stdout.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Debug, Args, Clone)]
pub struct SolveArgs {
    /// `builtin:<constant|small|large|critical|sawtooth>` or an LPF1 file.
    #[arg(long, default_value = "builtin:small")]
    pub u0: String,
    /// Base space E.
    #[arg(long)]
    pub space: Option<String>,
    /// Exponent N of the time weight.
    #[arg(long = "N")]
    pub n_exp: Option<u32>,
    /// Number of series terms.
    #[arg(long = "K")]
    pub k_max: Option<u32>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub quad_nodes: Option<usize>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Probe pairs for the ‖B‖ estimate.
    #[arg(long)]
    pub probes: Option<usize>,
    /// scalar1 | cone
    #[arg(long)]
    pub symbol: Option<String>,
    /// Iterate even when the smallness margin exceeds 1.
    #[arg(long)]
    pub allow_large: bool,
    /// LPF1 dump of the solution at the last sample time.
    #[arg(long)]
    pub dump: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Band norms ‖Δ_j u‖_E over the resolvable window.
    Decompose {
        #[arg(long, default_value = "builtin:critical")]
        u0: String,
        #[arg(long)]
        space: Option<String>,
        /// Directory for LPF1 dumps of the band pieces.
        #[arg(long)]
        dump_dir: Option<PathBuf>,
    },
    /// Norm of a field in a space.
    Norm {
        #[arg(long, default_value = "builtin:constant")]
        u0: String,
        #[arg(long)]
        space: Option<String>,
    },
    /// Measured compatibility profile η_n.
    EtaScan {
        #[arg(long)]
        space: Option<String>,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        n_min: i32,
        #[arg(long, default_value_t = 4)]
        n_max: i32,
        /// Output band j.
        #[arg(long, default_value_t = 2)]
        j: i32,
    },
    /// Separated-band product constant ‖fg‖/(2^l‖f‖‖g‖).
    Separation {
        #[arg(long)]
        space: Option<String>,
        #[arg(long, default_value_t = 5)]
        k: i32,
        #[arg(long = "band-l", default_value_t = 2)]
        band_l: i32,
        #[arg(long, default_value_t = 8)]
        trials: usize,
    },
    /// Picard iteration for u = Su₀ + B(u,u).
    Solve(SolveArgs),
    /// Series Σ T_k and its Catalan envelope.
    Series(SolveArgs),
    /// Short-time solve on (0, T].
    LocalSolve {
        #[command(flatten)]
        solve: SolveArgs,
        #[arg(long = "T", default_value_t = 1.0 / 64.0)]
        t_end: f64,
        /// Smallest sample time.
        #[arg(long)]
        t_min: Option<f64>,
    },
    /// R_j, C_j against their envelopes on a (j, t) sweep.
    Diagnostics {
        /// Comma-separated bands; default is the top six of the window.
        #[arg(long)]
        js: Option<String>,
        /// Comma-separated times; default 4^{-m}, m = 1..6.
        #[arg(long)]
        ts: Option<String>,
        #[arg(long, default_value_t = 16)]
        nodes: usize,
        #[arg(long = "N", default_value_t = 4)]
        n_exp: u32,
    },
    /// Obstruction constructions: product ratios, δ-sequences, lacunary fields, kernel bound
    #[command(subcommand)]
    Counterexample(CounterCmd),
    /// Density, Dini, η and decay checks for fields singular along a set
    #[command(subcommand)]
    Microlocal(MicroCmd),
    /// Fast invariant checks.
    Selftest,
}

#[derive(Debug, Subcommand)]
pub enum CounterCmd {
    /// ‖Δ₀(f_k g_k)‖_∞ and consecutive ratios.
    Prop19 {
        #[arg(long, default_value_t = 3)]
        k_min: i32,
        #[arg(long, default_value_t = 6)]
        k_max: i32,
    },
    /// δ_j² construction, its slack and partial sums.
    DeltaSeq {
        /// `harmonic` (η_n = (n+1)^{-1/2}), `geometric` (2^{-n}) or an η CSV file.
        #[arg(long, default_value = "harmonic")]
        eta: String,
        #[arg(long, default_value_t = 4)]
        j_min: i32,
        #[arg(long, default_value_t = 40)]
        j_max: i32,
        #[arg(long = "space-dim", default_value_t = 3)]
        space_dim: u32,
    },
    /// Lacunary field Σ ε_l δ_j b(· − l) and its ball criterion.
    Lacunary {
        #[arg(long, default_value_t = 1.5)]
        x1: f64,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value = "4,5")]
        shells: String,
        /// Period P of the translate lattice box.
        #[arg(long, default_value_t = 64)]
        period: usize,
        /// Use the unsmoothed bump.
        #[arg(long)]
        raw: bool,
        /// Number of random sign patterns.
        #[arg(long, default_value_t = 4)]
        patterns: u64,
    },
    /// Kernel integral over the cone sample.
    Kernel {
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum MicroCmd {
    /// Measured density function ε_S(2^{-m}).
    Density {
        #[arg(long)]
        set: Option<String>,
        #[arg(long, default_value_t = 4)]
        m_max: u32,
    },
    /// Dini verdict for a reference profile or a measured set.
    Dini {
        /// linear | log | point | plane | measured
        #[arg(long, default_value = "point")]
        profile: String,
        #[arg(long)]
        set: Option<String>,
        #[arg(long, default_value_t = 24)]
        m_max: u32,
    },
    /// η_n derived from a measured density.
    Eta {
        #[arg(long, default_value_t = 1.0)]
        sp: f64,
        #[arg(long)]
        set: Option<String>,
        #[arg(long, default_value_t = 4)]
        m_max: u32,
    },
    /// Envelope constants sup|Δ_j u(t)|/(2^j(1+2^j d_S)^{-s′}) along a solution.
    Decay {
        #[arg(long, default_value_t = 2.0)]
        sp: f64,
        #[arg(long)]
        set: Option<String>,
        #[arg(long, default_value = "builtin:sawtooth")]
        u0: String,
        /// Target smallness margin for the rescaled datum.
        #[arg(long, default_value_t = 0.3)]
        margin: f64,
    },
}

const G2_32: GridCfg = GridCfg {
    dim: 2,
    n: 32,
    l: 1.0,
};
const G2_64: GridCfg = GridCfg {
    dim: 2,
    n: 64,
    l: 1.0,
};
const G2_256: GridCfg = GridCfg {
    dim: 2,
    n: 256,
    l: 1.0,
};
const G3_64: GridCfg = GridCfg {
    dim: 3,
    n: 64,
    l: 1.0,
};

macro_rules! say {
    ($ctx:expr, $($t:tt)*) => {
        if !$ctx.quiet {
            println!($($t)*);
        }
    };
}

struct Ctx {
    cfg: RunConfig,
    quiet: bool,
    grid_flags: (Option<usize>, Option<usize>, Option<f64>),
}

impl Ctx {
    fn grid(&mut self, fallback: GridCfg) -> AppResult<Grid> {
        let base = self.cfg.grid.unwrap_or(fallback);
        let (d, n, l) = self.grid_flags;
        let g = GridCfg {
            dim: d.unwrap_or(base.dim),
            n: n.unwrap_or(base.n),
            l: l.unwrap_or(base.l),
        };
        self.cfg.grid = Some(g);
        g.grid()
    }

    fn space(&mut self, flag: &Option<String>) -> &str {
        if let Some(s) = flag {
            self.cfg.space = s.clone();
        }
        &self.cfg.space
    }

    fn u0(&mut self, arg: &str, grid: Grid) -> AppResult<SpectralField> {
        let f = resolve_u0(arg, grid)?;
        if f.grid != grid {
            // a field file fixes the grid
            self.cfg.grid = Some(f.grid.into());
        }
        Ok(f)
    }

    fn report<T: Serialize>(&self, command: &str, result: T) -> AppResult<()> {
        if let Some(p) = &self.cfg.outputs.report {
            write_json(
                Path::new(p),
                &Report {
                    command,
                    config: &self.cfg,
                    result,
                },
            )?;
        }
        Ok(())
    }

    fn table(&self, t: &Table) -> AppResult<()> {
        if let Some(p) = &self.cfg.outputs.csv {
            t.write(Path::new(p))?;
        }
        Ok(())
    }
}

fn threads_from_env() -> Option<usize> {
    std::env::var("LPLAB_THREADS")
        .ok()
        .and_then(|v| v.trim().parse().ok())
}

fn list<T: std::str::FromStr>(s: &str) -> AppResult<Vec<T>> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<T>()
                .map_err(|_| AppError::Parse(format!("bad list entry '{v}'")))
        })
        .collect()
}

/// Half-cell offset centre of the box; keeps the point off the sampling lattice.
fn default_set(grid: &Grid) -> PointSet {
    let h = grid.spacing();
    let c = (grid.n / 2) as f64 * h + 0.5 * h;
    let mut p = [0.0; 3];
    for v in p.iter_mut().take(grid.dim) {
        *v = c;
    }
    PointSet::point(p)
}

fn set_or_default(arg: &Option<String>, grid: &Grid) -> AppResult<PointSet> {
    match arg {
        Some(s) => parse_set(s, grid),
        None => Ok(default_set(grid)),
    }
}

/// Entry point; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 64 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> AppResult<i32> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::from_json(&std::fs::read_to_string(p)?)?,
        None => RunConfig::default(),
    };
    if let Some(t) = cli.threads.or_else(threads_from_env) {
        if t == 0 {
            return Err(AppError::Parse("--threads must be positive".into()));
        }
        cfg.threads = t;
    }
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(p) = &cli.out {
        cfg.outputs.report = Some(p.display().to_string());
    }
    if let Some(p) = &cli.csv {
        cfg.outputs.csv = Some(p.display().to_string());
    }
    let mut ctx = Ctx {
        cfg,
        quiet: cli.quiet,
        grid_flags: (cli.dim, cli.size, cli.l),
    };
    match cli.cmd {
        Cmd::Decompose {
            u0,
            space,
            dump_dir,
        } => decompose(&mut ctx, &u0, &space, dump_dir),
        Cmd::Norm { u0, space } => {
            let g = ctx.grid(G2_64)?;
            let f = ctx.u0(&u0, g)?;
            let spec = parse_space(ctx.space(&space), &f.grid)?;
            let v = norm(&f, &spec)?;
            say!(ctx, "{}", fmt(v));
            ctx.report("norm", json!({ "norm": v }))?;
            Ok(0)
        }
        Cmd::EtaScan {
            space,
            trials,
            n_min,
            n_max,
            j,
        } => {
            let g = ctx.grid(G2_256)?;
            let spec = parse_space(ctx.space(&space), &g)?;
            let m = eta_estimate(
                &spec,
                &EtaSetup { grid: g, j },
                n_min..=n_max,
                trials,
                ctx.cfg.seed,
            )?;
            let t = eta_table(&m);
            print_table(&ctx, &t);
            say!(ctx, "slope {}", fmt(m.slope()));
            ctx.table(&t)?;
            ctx.report(
                "eta-scan",
                json!({ "measurement": m, "slope": m.slope(), "j": j }),
            )?;
            Ok(0)
        }
        Cmd::Separation {
            space,
            k,
            band_l,
            trials,
        } => {
            let g = ctx.grid(G2_256)?;
            let spec = parse_space(ctx.space(&space), &g)?;
            let c = separation_constant(&spec, &g, k, band_l, trials, ctx.cfg.seed)?;
            say!(ctx, "{}", fmt(c));
            ctx.report(
                "separation",
                json!({ "k": k, "l": band_l, "trials": trials, "constant": c }),
            )?;
            Ok(0)
        }
        Cmd::Solve(a) => solve(&mut ctx, &a),
        Cmd::Series(a) => series(&mut ctx, &a),
        Cmd::LocalSolve {
            solve,
            t_end,
            t_min,
        } => local(&mut ctx, &solve, t_end, t_min),
        Cmd::Diagnostics {
            js,
            ts,
            nodes,
            n_exp,
        } => diagnostics(&mut ctx, js, ts, nodes, n_exp),
        Cmd::Counterexample(c) => counterexample(&mut ctx, c),
        Cmd::Microlocal(c) => microlocal(&mut ctx, c),
        Cmd::Selftest => selftest(&ctx),
    }
}

fn print_table(ctx: &Ctx, t: &Table) {
    say!(ctx, "{}", t.header.join(","));
    for r in &t.rows {
        say!(ctx, "{}", r.join(","));
    }
}

fn decompose(
    ctx: &mut Ctx,
    u0: &str,
    space: &Option<String>,
    dump_dir: Option<PathBuf>,
) -> AppResult<i32> {
    let g = ctx.grid(G2_64)?;
    let f = ctx.u0(u0, g)?;
    let spec = parse_space(ctx.space(space), &f.grid)?;
    let bands = band_norms(&f, &spec)?;
    let mut t = Table::new(&["j", "norm"]);
    for (j, v) in &bands {
        t.push(vec![j.to_string(), fmt(*v)]);
    }
    if let Some(dir) = &dump_dir {
        std::fs::create_dir_all(dir)?;
        for j in f.grid.bands() {
            write_field(
                &dir.join(format!("band_{j}.lpf")),
                &delta_j(&f, j)?,
                &format!("band {j}"),
            )?;
        }
        ctx.cfg.outputs.field = Some(dir.display().to_string());
    }
    let rec = reconstruct(&f);
    let mut tail = f.sub(&rec)?;
    tail.coef_mut()[0] = Complex64::new(0.0, 0.0);
    let rel = tail.l2_norm_spectral() / f.l2_norm_spectral().max(f64::MIN_POSITIVE);
    print_table(ctx, &t);
    ctx.table(&t)?;
    ctx.report(
        "decompose",
        json!({ "bands": bands, "window": f.grid.band_window(), "unresolved_fraction": rel }),
    )?;
    Ok(0)
}

fn apply_solver_flags(ctx: &mut Ctx, a: &SolveArgs) {
    let c = &mut ctx.cfg;
    if let Some(s) = &a.space {
        c.space = s.clone();
    }
    if let Some(v) = a.n_exp {
        c.n_exp = v;
    }
    if let Some(v) = a.k_max {
        c.k_max = v;
    }
    if let Some(v) = a.tol {
        c.tol = v;
    }
    if let Some(v) = a.quad_nodes {
        c.quad_nodes = v;
    }
    if let Some(v) = a.max_iter {
        c.max_iter = v;
    }
    if let Some(v) = a.probes {
        c.probes = v;
    }
    if let Some(v) = &a.symbol {
        c.symbol = v.clone();
    }
    if let Some(p) = &a.dump {
        c.outputs.field = Some(p.display().to_string());
    }
}

fn problem(ctx: &mut Ctx, a: &SolveArgs) -> AppResult<Problem> {
    apply_solver_flags(ctx, a);
    let g = ctx.grid(G2_32)?;
    let f = ctx.u0(&a.u0, g)?;
    let mut sc = ctx.cfg.solver_config(f.grid)?;
    if sc.sym.is_vector() {
        return Err(LabError::Unsupported("the scalar solver takes scalar1 or cone".into()).into());
    }
    sc.allow_large = a.allow_large;
    Ok(Problem::new(&f, &sc)?)
}

fn refusal(pb: &Problem, msg: String) -> SolverReport {
    let margin = 4.0 * pb.norm_b * pb.norm_a;
    SolverReport {
        norm_b: pb.norm_b,
        norm_a: pb.norm_a,
        margin,
        uniqueness_radius: 1.0 / (2.0 * pb.norm_b),
        term_norms: Vec::new(),
        catalan_bounds: Vec::new(),
        fitted_constants: Vec::new(),
        picard_distances: Vec::new(),
        iterations: 0,
        converged: false,
        final_residual: f64::NAN,
        solution_norm: f64::NAN,
        in_uniqueness_ball: false,
        refused: true,
        note: Some(msg),
    }
}

fn summary(ctx: &Ctx, rep: &SolverReport) {
    say!(ctx, "margin {}", fmt(rep.margin));
    say!(ctx, "norm_b {}", fmt(rep.norm_b));
    say!(ctx, "iterations {}", rep.iterations);
    say!(ctx, "residual {}", fmt(rep.final_residual));
    say!(ctx, "converged {}", rep.converged);
}

fn solve(ctx: &mut Ctx, a: &SolveArgs) -> AppResult<i32> {
    let pb = problem(ctx, a)?;
    match picard_in(&pb, PicardStart::Datum) {
        Ok((u, rep)) => {
            summary(ctx, &rep);
            if let Some(p) = &ctx.cfg.outputs.field {
                write_field(
                    Path::new(p),
                    u.fields.last().expect("nonempty path"),
                    "solution at the last sample time",
                )?;
            }
            let mut t = Table::new(&["iteration", "distance"]);
            for (i, d) in rep.picard_distances.iter().enumerate() {
                t.push(vec![(i + 1).to_string(), fmt(*d)]);
            }
            ctx.table(&t)?;
            ctx.report("solve", &rep)?;
            Ok(if rep.converged { 0 } else { 3 })
        }
        Err(LabError::Precondition(msg)) => {
            let rep = refusal(&pb, msg.clone());
            eprintln!("refused: {msg}");
            ctx.report("solve", &rep)?;
            Ok(3)
        }
        Err(e) => Err(e.into()),
    }
}

fn series(ctx: &mut Ctx, a: &SolveArgs) -> AppResult<i32> {
    let pb = problem(ctx, a)?;
    match tk_series_in(&pb) {
        Ok((terms, rep)) => {
            let sum = series_sum(&terms)?;
            let residual = pb.residual(&sum)?;
            let bound = series_bound(pb.norm_b, pb.norm_a).ok();
            let t = series_table(&rep.term_norms, &rep.catalan_bounds);
            print_table(ctx, &t);
            say!(ctx, "residual {}", fmt(residual));
            ctx.table(&t)?;
            ctx.report(
                "series",
                json!({ "solver": rep, "series_residual": residual, "series_bound": bound }),
            )?;
            Ok(0)
        }
        Err(LabError::Precondition(msg)) => {
            eprintln!("refused: {msg}");
            ctx.report("series", json!({ "solver": refusal(&pb, msg) }))?;
            Ok(3)
        }
        Err(e) => Err(e.into()),
    }
}

fn local(ctx: &mut Ctx, a: &SolveArgs, t_end: f64, t_min: Option<f64>) -> AppResult<i32> {
    apply_solver_flags(ctx, a);
    let g = ctx.grid(G2_32)?;
    let f = ctx.u0(&a.u0, g)?;
    let mut sc = ctx.cfg.solver_config(f.grid)?;
    if let Some(t) = t_min {
        sc.t_min = t;
    }
    let (u, rep) = local_solve(&f, t_end, &sc)?;
    for (t, l) in &rep.l_norms {
        say!(ctx, "L_norm T={} {}", fmt(*t), fmt(*l));
    }
    say!(ctx, "iterations {}", rep.iterations);
    say!(ctx, "residual {}", fmt(rep.residual));
    if let Some(p) = &ctx.cfg.outputs.field {
        write_field(
            Path::new(p),
            u.fields.last().expect("nonempty path"),
            "local solution at T",
        )?;
    }
    ctx.report("local-solve", json!({ "local": rep, "t_min": sc.t_min }))?;
    Ok(if rep.converged { 0 } else { 3 })
}

fn diagnostics(
    ctx: &mut Ctx,
    js: Option<String>,
    ts: Option<String>,
    nodes: usize,
    n_exp: u32,
) -> AppResult<i32> {
    let g = ctx.grid(G2_256)?;
    let js: Vec<i32> = match js {
        Some(s) => list(&s)?,
        None => {
            let (lo, hi) = g.band_window();
            ((hi - 5).max(lo)..=hi).collect()
        }
    };
    let ts: Vec<f64> = match ts {
        Some(s) => list(&s)?,
        None => (1..=6).map(|m| 2f64.powi(-2 * m)).collect(),
    };
    let spec = SpaceSpec::l3();
    let seed = ctx.cfg.seed;
    let top = (g.n / 2 - 1) as f64 / g.l;
    let f = LabRng::new(seed, 0).shell_field(g, 0.9 / g.l, top);
    let h = LabRng::new(seed.wrapping_add(1), 0).shell_field(g, 0.9 / g.l, top);
    let u = saturating_trajectory(&f, &spec, n_exp)?;
    let v = saturating_trajectory(&h, &spec, n_exp)?;
    let eps = EpsilonFunction::new(EtaSequence::from_fn(-4, 20, |n| 2f64.powi(-2 * n.max(0)))?);
    let rows = band_diagnostics(
        &u,
        &v,
        &ts,
        &js,
        &spec,
        &eps,
        n_exp,
        nodes,
        SymbolSpec::Scalar1,
    )?;
    let t = diagnostics_table(&rows);
    print_table(ctx, &t);
    ctx.table(&t)?;
    let ratios: Vec<f64> = rows.iter().map(|r| r.ratio_r()).collect();
    ctx.report(
        "diagnostics",
        json!({ "rows": rows, "ratio_spread": spread(&ratios), "nodes": nodes, "n_exp": n_exp }),
    )?;
    Ok(0)
}

fn counterexample(ctx: &mut Ctx, c: CounterCmd) -> AppResult<i32> {
    match c {
        CounterCmd::Prop19 { k_min, k_max } => {
            let g = ctx.grid(GridCfg {
                dim: 2,
                n: 1024,
                l: 2.0,
            })?;
            let phi = prop19_profile(g)?;
            let mut t = Table::new(&["k", "value", "ratio"]);
            let mut vals: Vec<f64> = Vec::new();
            for k in k_min..=k_max {
                let v = prop19_ratio(k, &phi)?;
                let r = vals.last().map(|p| v / p);
                t.push(vec![k.to_string(), fmt(v), r.map(fmt).unwrap_or_default()]);
                vals.push(v);
            }
            print_table(ctx, &t);
            ctx.table(&t)?;
            ctx.report(
                "counterexample prop19",
                json!({ "k_min": k_min, "k_max": k_max, "values": vals }),
            )?;
            Ok(0)
        }
        CounterCmd::DeltaSeq {
            eta,
            j_min,
            j_max,
            space_dim,
        } => {
            let seq = match eta.as_str() {
                "harmonic" => EtaSequence::from_fn(0, j_max, |n| 1.0 / ((n + 1) as f64).sqrt())?,
                "geometric" => EtaSequence::from_fn(0, j_max, |n| 2f64.powi(-n))?,
                path => read_eta_csv(Path::new(path))?,
            };
            let d = delta_sequence_dim(&seq, j_min..=j_max, space_dim)?;
            let mut t = Table::new(&[
                "j",
                "delta2",
                "sigma",
                "slack",
                "partial_sum",
                "harmonic_sum",
            ]);
            let mut h = 0.0;
            for (i, j) in (j_min..=j_max).enumerate() {
                h += 1.0 / (j + 1) as f64;
                t.push(vec![
                    j.to_string(),
                    fmt(d.delta2_at(j)),
                    fmt(d.sigma_at(j)),
                    fmt(d.slack[i]),
                    fmt(d.partial_sums[i]),
                    fmt(h),
                ]);
            }
            print_table(ctx, &t);
            ctx.table(&t)?;
            let min_slack = d.slack.iter().cloned().fold(f64::INFINITY, f64::min);
            ctx.report(
                "counterexample delta-seq",
                json!({ "eta": eta, "min_slack": min_slack, "hypothesis_divergent": d.hypothesis_divergent, "sequence": d }),
            )?;
            Ok(0)
        }
        CounterCmd::Lacunary {
            x1,
            alpha,
            shells,
            period,
            raw,
            patterns,
        } => {
            let g = ctx.grid(G2_256)?;
            let shells: Vec<i32> = list(&shells)?;
            let bump = OrthonormalBump::new(g.dim, g.n, period)?;
            let top = *shells
                .iter()
                .max()
                .ok_or_else(|| AppError::Parse("no shells".into()))?;
            let eta = EtaSequence::from_fn(0, top + 8, |n| 1.0 / ((n + 1) as f64).sqrt())?;
            let delta = delta_sequence_dim(
                &eta,
                shells.iter().cloned().min().unwrap_or(0)..=top,
                g.dim as u32,
            )?;
            let mut params = LacunaryParams::new(x1, alpha, shells);
            if raw {
                params.basis = BumpBasis::Raw;
            }
            let mut t = Table::new(&["pattern", "ball_criterion", "l3"]);
            let mut crit = Vec::new();
            let pats: Vec<SignPattern> = std::iter::once(SignPattern::AllPlus)
                .chain((0..patterns).map(|s| SignPattern::Random(ctx.cfg.seed + s)))
                .collect();
            for p in &pats {
                let a = lacunary_field(&delta, &params, *p, &bump)?;
                let b = ball_criterion(&a, &eta)?;
                let l3 = norm(&a, &SpaceSpec::l3())?;
                let name = match p {
                    SignPattern::AllPlus => "all_plus".to_string(),
                    SignPattern::Random(s) => format!("random_{s}"),
                };
                t.push(vec![name, fmt(b), fmt(l3)]);
                crit.push(b);
            }
            print_table(ctx, &t);
            ctx.table(&t)?;
            ctx.report(
                "counterexample lacunary",
                json!({
                    "params": params, "period": period,
                    "periodization_residual": bump.periodization_residual(),
                    "ball_criterion": crit, "sign_spread": spread(&crit),
                }),
            )?;
            Ok(0)
        }
        CounterCmd::Kernel { alpha } => {
            let prof = KernelProfile::default();
            let mut t = Table::new(&["x1", "l1", "l2", "l3", "integral", "ratio", "in_cone"]);
            let mut beta = f64::INFINITY;
            for (x1, l) in cone_sample() {
                let v = kernel_lower_bound(x1, l, &prof, alpha)?;
                if v.in_cone {
                    beta = beta.min(v.ratio);
                }
                t.push(vec![
                    fmt(x1),
                    fmt(l[0]),
                    fmt(l[1]),
                    fmt(l[2]),
                    fmt(v.integral),
                    fmt(v.ratio),
                    v.in_cone.to_string(),
                ]);
            }
            print_table(ctx, &t);
            say!(ctx, "beta {}", fmt(beta));
            ctx.table(&t)?;
            ctx.report(
                "counterexample kernel",
                json!({ "alpha": alpha, "profile": prof, "beta": beta }),
            )?;
            Ok(0)
        }
    }
}

fn microlocal(ctx: &mut Ctx, c: MicroCmd) -> AppResult<i32> {
    match c {
        MicroCmd::Density { set, m_max } => {
            let g = ctx.grid(G3_64)?;
            let s = set_or_default(&set, &g)?;
            let p = density_function(&g, &s, m_max, &DensitySampling::for_grid(&g))?;
            let oracle = match set.as_deref().map(|x| x.split('(').next().unwrap_or("")) {
                None | Some("point") => Some(DensityProfile::point_oracle(g.dim, m_max)),
                Some("plane") if g.dim == 3 => Some(DensityProfile::plane_oracle(m_max)),
                _ => None,
            };
            let mut t = Table::new(&["delta", "measured", "oracle"]);
            for (i, (d, v)) in p.deltas.iter().zip(&p.values).enumerate() {
                t.push(vec![
                    fmt(*d),
                    fmt(*v),
                    oracle
                        .as_ref()
                        .map(|o| fmt(o.values[i]))
                        .unwrap_or_default(),
                ]);
            }
            print_table(ctx, &t);
            ctx.table(&t)?;
            ctx.report(
                "microlocal density",
                json!({ "profile": p, "oracle": oracle }),
            )?;
            Ok(0)
        }
        MicroCmd::Dini {
            profile,
            set,
            m_max,
        } => {
            let p = match profile.as_str() {
                "linear" => DensityProfile::analytic("linear", m_max, |d| d),
                "log" => {
                    DensityProfile::analytic("log", m_max, |d| 1.0 / (std::f64::consts::E / d).ln())
                }
                "point" => DensityProfile::point_oracle(3, m_max),
                "plane" => DensityProfile::plane_oracle(m_max),
                "measured" => {
                    let g = ctx.grid(G3_64)?;
                    let s = set_or_default(&set, &g)?;
                    density_function(
                        &g,
                        &s,
                        m_max.min(g.n.trailing_zeros()),
                        &DensitySampling::for_grid(&g),
                    )?
                }
                other => return Err(AppError::Parse(format!("unknown profile '{other}'"))),
            };
            let r = dini_check(&p)?;
            say!(ctx, "dyadic_sum {}", fmt(r.dyadic_sum));
            say!(ctx, "tail_slope {}", fmt(r.tail_slope));
            say!(ctx, "dini {}", if r.pass { "pass" } else { "fail" });
            ctx.report("microlocal dini", json!({ "profile": p, "verdict": r }))?;
            Ok(0)
        }
        MicroCmd::Eta { sp, set, m_max } => {
            let g = ctx.grid(G3_64)?;
            let s = set_or_default(&set, &g)?;
            let p = density_function(&g, &s, m_max, &DensitySampling::for_grid(&g))?;
            let e = eta_from_density(sp, &p)?;
            let x: Vec<f64> = (0..e.values.len())
                .map(|n| (e.n_lo + n as i32) as f64)
                .collect();
            let slope = log2_slope(&x, &e.values);
            let mut t = Table::new(&["n", "eta"]);
            for (n, v) in x.iter().zip(&e.values) {
                t.push(vec![n.to_string(), fmt(*v)]);
            }
            print_table(ctx, &t);
            say!(ctx, "slope {}", fmt(slope));
            ctx.table(&t)?;
            ctx.report(
                "microlocal eta",
                json!({ "s_prime": sp, "eta": e, "slope": slope, "summable": eta_summable(&e) }),
            )?;
            Ok(0)
        }
        MicroCmd::Decay {
            sp,
            set,
            u0,
            margin,
        } => {
            let g = ctx.grid(G2_64)?;
            let f = ctx.u0(&u0, g)?;
            let g = f.grid;
            let set = match set {
                Some(s) => parse_set(&s, &g)?,
                None => PointSet::plane(&g, 0, 0.0),
            };
            let mut sc = ctx.cfg.solver_config(g)?;
            sc.probes = sc.probes.min(8);
            let pb = Problem::new(&f, &sc)?;
            let m0 = 4.0 * pb.norm_b * pb.norm_a;
            let f = f.scale_real(margin / m0);
            let pb = Problem::new(&f, &sc)?;
            let (u, rep) = match picard_in(&pb, PicardStart::Datum) {
                Ok(x) => x,
                Err(LabError::Precondition(msg)) => {
                    eprintln!("refused: {msg}");
                    ctx.report("microlocal decay", json!({ "solver": refusal(&pb, msg) }))?;
                    return Ok(3);
                }
                Err(e) => return Err(e.into()),
            };
            let ts = nearest_times(&pb.a.times, &[0.25, 0.0625, 0.015625, 0.00390625]);
            let d = decay_check(&u, &pb.a, &set, sp, &ts)?;
            let mut t = Table::new(&["t", "constant_u", "constant_w"]);
            for r in &d.rows {
                t.push(vec![fmt(r.t), fmt(r.constant_u), fmt(r.constant_w)]);
            }
            print_table(ctx, &t);
            ctx.table(&t)?;
            ctx.report("microlocal decay", json!({ "solver": rep, "decay": d }))?;
            Ok(if rep.converged { 0 } else { 3 })
        }
    }
}

/// Sample times closest (in log) to each target.
fn nearest_times(times: &[f64], targets: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = targets
        .iter()
        .filter_map(|t| {
            times
                .iter()
                .cloned()
                .filter(|s| *s > 0.0)
                .min_by(|a, b| (a / t).ln().abs().total_cmp(&(b / t).ln().abs()))
        })
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

fn check(name: &str, ok: bool, all: &mut bool) -> Value {
    println!("{} {name}", if ok { "PASS" } else { "FAIL" });
    *all &= ok;
    json!({ "check": name, "pass": ok })
}

fn selftest(ctx: &Ctx) -> AppResult<i32> {
    let mut all = true;
    let mut out = Vec::new();
    let g = Grid::new(2, 32, 1.0)?;
    let c = SpectralField::constant(g, Complex64::new(CONSTANT, 0.0));
    let want = CONSTANT * g.box_volume().cbrt();
    let l3 = norm(&c, &SpaceSpec::l3())?;
    out.push(check(
        "constant_l3_norm",
        (l3 - want).abs() <= 1e-12 * want,
        &mut all,
    ));

    let f = LabRng::new(1, 0).bandlimited_field(g, g.j_min(), g.j_max() - 1);
    let rec = reconstruct(&f);
    let err = rec.sub(&f)?.l2_norm_spectral() / f.l2_norm_spectral();
    out.push(check("band_reconstruction", err <= 1e-10, &mut all));

    let rec = catalan_recursive(30);
    let cat = (1..=30u32).all(|k| {
        catalan(k)
            .map(|v| v == rec[k as usize - 1])
            .unwrap_or(false)
    });
    out.push(check("catalan_closed_form", cat, &mut all));

    let sb = series_bound(2.0, 0.125)?;
    out.push(check(
        "series_bound_at_unit_margin",
        (sb - 0.25).abs() < 1e-15,
        &mut all,
    ));

    let back = decode(&encode(&f))?;
    let bitwise = back
        .coef()
        .iter()
        .zip(f.coef())
        .all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits());
    out.push(check(
        "lpf1_round_trip",
        bitwise && back.grid == f.grid,
        &mut all,
    ));

    let grammar = [
        "lebesgue:p=3",
        "besov:s=-0.5,p=6,q=inf",
        "cn:base=morrey:p=3,q=2,N=4",
        "fq:q=2",
    ]
    .iter()
    .all(|s| parse_space(s, &g).is_ok());
    out.push(check("space_grammar", grammar, &mut all));

    let pw = SpectralField::plane_wave(g, [2, 1, 0], Complex64::new(1.0, 0.0))?;
    let h = lplab_core::field::heat(&pw, 0.1)?;
    let idx = g.linear_of_freq([2, 1, 0]).expect("on grid");
    out.push(check(
        "heat_plane_wave",
        (h.coef()[idx].re - (-0.5f64).exp()).abs() < 1e-15,
        &mut all,
    ));

    ctx.report("selftest", json!({ "checks": out, "pass": all }))?;
    Ok(if all { 0 } else { 2 })
}
