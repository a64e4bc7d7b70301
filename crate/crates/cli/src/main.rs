//! Batch front end for the few-body solvers: every subcommand reads its
//! physics from flags, writes machine-readable CSV or JSON to stdout (or a
//! file), and reports typed solver failures on stderr with exit code 3.
//!
//! Data goes to stdout, diagnostics to stderr; floating values are printed
//! with 17 significant digits so outputs re-read bit-exactly.

use std::fmt::Write as _;
use std::io::Write as _;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use narrowres::model::ResonanceParams;
use narrowres::numerics::{build_log_gauss_grid, RadialGrid};
use narrowres::threebody::{
    energy_relation_residual_trimer, reconstruct_nk, solve_amplitude, solve_levels_in,
    thomas_collapse_probe, QScan,
};
use narrowres::twobody::{dimer_observables, f0, f_eps};

#[derive(Parser)]
#[command(
    name = "narrowres",
    version,
    about = "Few-body solvers for bosons at a narrow Feshbach resonance",
    long_about = None
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form dimer observables (binding, molecule number, tail).
    Dimer(DimerArgs),
    /// Scattering amplitude samples: f0, plus f_eps when --eps > 0.
    Amplitude(AmplitudeArgs),
    /// Three-body (trimer) solvers.
    #[command(subcommand)]
    Trimer(TrimerCommand),
    /// Trimer spectra over a scattering-length sweep.
    Scan(ScanArgs),
    /// Grid-refinement probe of the zero-range collapse.
    CollapseProbe(CollapseArgs),
}

#[derive(Subcommand)]
enum TrimerCommand {
    /// Bound-state levels from the determinant sweep.
    Spectrum(SpectrumArgs),
    /// One-body momentum distribution and tail fit of a solved level.
    Nk(NkArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct OutputArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<std::path::PathBuf>,
}

#[derive(Args)]
struct DimerArgs {
    /// Inverse scattering length 1/a.
    #[arg(long, allow_negative_numbers = true)]
    inv_a: f64,
    /// Width parameter R*.
    #[arg(long)]
    rstar: f64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct AmplitudeArgs {
    #[arg(long, allow_negative_numbers = true)]
    inv_a: f64,
    #[arg(long)]
    rstar: f64,
    /// Gaussian cutoff range; adds f_eps columns when > 0.
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    #[arg(long, default_value_t = 1e-2)]
    k_min: f64,
    #[arg(long, default_value_t = 1e2)]
    k_max: f64,
    /// Number of log-spaced samples.
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Clone)]
struct GridArgs {
    /// Quadrature points of the solver grid.
    #[arg(long, default_value_t = 300)]
    n_points: usize,
    /// Lower edge of the momentum grid (default 1e-7 / R*).
    #[arg(long)]
    k_min: Option<f64>,
    /// Upper edge of the momentum grid (default 1e3 / R*).
    #[arg(long)]
    k_max: Option<f64>,
    /// Lower edge of the binding-wavenumber scan (default 100 k_min).
    #[arg(long)]
    q_min: Option<f64>,
    /// Upper edge of the binding-wavenumber scan (default k_max / 10).
    #[arg(long)]
    q_max: Option<f64>,
}

impl GridArgs {
    fn build(&self, r_star: f64) -> Result<(RadialGrid, QScan), narrowres::Error> {
        let k_min = self.k_min.unwrap_or(1e-7 / r_star);
        let k_max = self.k_max.unwrap_or(1e3 / r_star);
        let grid = build_log_gauss_grid(self.n_points, k_min, k_max)?;
        let mut scan = QScan::for_grid(&grid);
        if let Some(q_min) = self.q_min {
            scan.q_min = q_min;
        }
        if let Some(q_max) = self.q_max {
            scan.q_max = q_max;
        }
        Ok((grid, scan))
    }
}

#[derive(Args)]
struct SpectrumArgs {
    #[arg(long, allow_negative_numbers = true)]
    inv_a: f64,
    #[arg(long)]
    rstar: f64,
    /// How many levels to look for, deepest first.
    #[arg(long, default_value_t = 3)]
    levels: usize,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct NkArgs {
    #[arg(long, allow_negative_numbers = true)]
    inv_a: f64,
    #[arg(long)]
    rstar: f64,
    /// Level index (0 = ground state).
    #[arg(long, default_value_t = 0)]
    level: usize,
    #[command(flatten)]
    grid: GridArgs,
    /// Output-grid points for the distribution samples.
    #[arg(long, default_value_t = 240)]
    out_points: usize,
    /// Lower edge of the output grid (default q / 100).
    #[arg(long)]
    out_k_min: Option<f64>,
    /// Upper edge of the output grid (default the solver k_max).
    #[arg(long)]
    out_k_max: Option<f64>,
    /// Lower edge of the tail-fit window (default max(10 q, 30/R*)).
    #[arg(long)]
    fit_k_lo: Option<f64>,
    /// Upper edge of the tail-fit window (default min(out k_max/2, 300/R*)).
    #[arg(long)]
    fit_k_hi: Option<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, allow_negative_numbers = true)]
    inv_a_from: f64,
    #[arg(long, allow_negative_numbers = true)]
    inv_a_to: f64,
    /// Number of sweep points (endpoints included).
    #[arg(long)]
    steps: usize,
    #[arg(long)]
    rstar: f64,
    #[arg(long, default_value_t = 1)]
    levels: usize,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct CollapseArgs {
    /// Comma-separated list of grid cutoffs, e.g. 1e2,1e3,1e4.
    #[arg(long, value_delimiter = ',', required = true)]
    kmax_list: Vec<f64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    inv_a: f64,
    /// R* for the bounded column (the collapsing column always uses R* = 0).
    #[arg(long, default_value_t = 1.0)]
    rstar: f64,
    /// Grid density for the probe grids.
    #[arg(long, default_value_t = 40)]
    points_per_decade: usize,
    #[command(flatten)]
    out: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Solver(e)) => {
            eprintln!("{e}");
            ExitCode::from(3)
        }
        Err(RunError::Io(e)) => {
            eprintln!("io error: {e}");
            ExitCode::FAILURE
        }
    }
}

enum RunError {
    Solver(narrowres::Error),
    Io(std::io::Error),
}

impl From<narrowres::Error> for RunError {
    fn from(e: narrowres::Error) -> Self {
        RunError::Solver(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}

fn run(cli: Cli) -> Result<(), RunError> {
    match cli.command {
        Command::Dimer(args) => dimer(args),
        Command::Amplitude(args) => amplitude(args),
        Command::Trimer(TrimerCommand::Spectrum(args)) => spectrum(args),
        Command::Trimer(TrimerCommand::Nk(args)) => nk(args),
        Command::Scan(args) => scan(args),
        Command::CollapseProbe(args) => collapse_probe(args),
    }
}

/// 17 significant digits: enough to reproduce the double bit-for-bit.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn emit(out: &OutputArgs, data: &str) -> Result<(), RunError> {
    match &out.output {
        None => {
            std::io::stdout().write_all(data.as_bytes())?;
            Ok(())
        }
        Some(path) => {
            std::fs::write(path, data)?;
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable result")
}

fn dimer(args: DimerArgs) -> Result<(), RunError> {
    let p = ResonanceParams::new(args.inv_a, args.rstar);
    let sol = dimer_observables(&p)?;
    let text = match args.format {
        Format::Json => format!("{}\n", to_json(&sol)),
        Format::Csv => {
            let mut s = String::from("kappa,energy,n_mol,c4,c6\n");
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                fmt(sol.kappa),
                fmt(sol.energy),
                fmt(sol.n_mol),
                fmt(sol.c4),
                fmt(sol.c6)
            );
            s
        }
    };
    emit(&args.out, &text)
}

fn amplitude(args: AmplitudeArgs) -> Result<(), RunError> {
    let with_eps = args.eps > 0.0;
    let p = ResonanceParams::with_cutoff(args.inv_a, args.rstar, args.eps);
    if args.n < 2 || !(args.k_min > 0.0 && args.k_min < args.k_max) {
        return Err(narrowres::Error::BadRange("need n >= 2 and 0 < k_min < k_max".into()).into());
    }
    let mut text = String::from(if with_eps {
        "k,re_f0,im_f0,re_feps,im_feps\n"
    } else {
        "k,re_f0,im_f0\n"
    });
    let step = (args.k_max / args.k_min).ln() / (args.n - 1) as f64;
    for i in 0..args.n {
        let k = args.k_min * (step * i as f64).exp();
        let f = f0(k, &p)?;
        if with_eps {
            let fe = f_eps(k, &p)?;
            let _ = writeln!(
                text,
                "{},{},{},{},{}",
                fmt(k),
                fmt(f.re),
                fmt(f.im),
                fmt(fe.re),
                fmt(fe.im)
            );
        } else {
            let _ = writeln!(text, "{},{},{}", fmt(k), fmt(f.re), fmt(f.im));
        }
    }
    emit(&args.out, &text)
}

fn spectrum(args: SpectrumArgs) -> Result<(), RunError> {
    let p = ResonanceParams::new(args.inv_a, args.rstar);
    let (grid, scan) = args.grid.build(args.rstar)?;
    let spectrum = solve_levels_in(&p, &grid, args.levels, scan)?;
    if spectrum.fewer_than_requested() {
        eprintln!(
            "note: found {} of {} requested levels",
            spectrum.levels.len(),
            args.levels
        );
    }
    let text = match args.format {
        Format::Json => format!("{}\n", to_json(&spectrum.levels)),
        Format::Csv => {
            let mut s = String::from("index,q,energy\n");
            for l in &spectrum.levels {
                let _ = writeln!(s, "{},{},{}", l.index, fmt(l.q), fmt(l.energy));
            }
            s
        }
    };
    emit(&args.out, &text)
}

#[derive(serde::Serialize)]
struct NkFooter {
    c4_fit: f64,
    c6_fit: f64,
    n_mol: f64,
    k_mol: f64,
    sum_rule_residual: f64,
    energy_residual: f64,
}

fn nk(args: NkArgs) -> Result<(), RunError> {
    let p = ResonanceParams::new(args.inv_a, args.rstar);
    let (grid, scan) = args.grid.build(args.rstar)?;
    let spectrum = solve_levels_in(&p, &grid, args.level + 1, scan)?;
    let Some(level) = spectrum.levels.get(args.level) else {
        return Err(narrowres::Error::BadRange(format!(
            "level {} not found (got {} levels)",
            args.level,
            spectrum.levels.len()
        ))
        .into());
    };
    let sol = solve_amplitude(level, &p, &grid)?;
    let q = level.q;
    let out_k_min = args.out_k_min.unwrap_or(q * 1e-2);
    let out_k_max = args.out_k_max.unwrap_or(grid.k_max());
    let out_grid = build_log_gauss_grid(args.out_points, out_k_min, out_k_max)?;
    let fit_lo = args.fit_k_lo.unwrap_or((10.0 * q).max(30.0 / args.rstar));
    let fit_hi = args
        .fit_k_hi
        .unwrap_or((out_k_max / 2.0).min(300.0 / args.rstar));
    let dist = reconstruct_nk(&sol, &out_grid, Some((fit_lo, fit_hi)))?;
    let energy_residual = energy_relation_residual_trimer(&sol, &dist)?;

    let mut text = String::from("k,n_k\n");
    for (k, v) in dist.k_samples.iter().zip(&dist.values) {
        let _ = writeln!(text, "{},{}", fmt(*k), fmt(*v));
    }
    let footer = NkFooter {
        c4_fit: dist.c4_fit,
        c6_fit: dist.c6_fit,
        n_mol: sol.n_mol,
        k_mol: sol.k_mol,
        sum_rule_residual: dist.sum_rule_residual,
        energy_residual,
    };
    let _ = writeln!(text, "{}", to_json(&footer));
    emit(&args.out, &text)
}

fn scan(args: ScanArgs) -> Result<(), RunError> {
    if args.steps < 2 {
        return Err(narrowres::Error::BadRange("need steps >= 2".into()).into());
    }
    let (grid, qscan) = args.grid.build(args.rstar)?;
    let mut header = String::from("inv_a");
    for n in 0..args.levels {
        let _ = write!(header, ",q{n}");
    }
    let mut text = format!("{header}\n");
    let d_inv_a = (args.inv_a_to - args.inv_a_from) / (args.steps - 1) as f64;
    for i in 0..args.steps {
        let inv_a = args.inv_a_from + d_inv_a * i as f64;
        let p = ResonanceParams::new(inv_a, args.rstar);
        let spectrum = solve_levels_in(&p, &grid, args.levels, qscan)?;
        let _ = write!(text, "{}", fmt(inv_a));
        for n in 0..args.levels {
            match spectrum.levels.get(n) {
                Some(l) => {
                    let _ = write!(text, ",{}", fmt(l.q));
                }
                None => text.push(','),
            }
        }
        text.push('\n');
    }
    emit(&args.out, &text)
}

fn collapse_probe(args: CollapseArgs) -> Result<(), RunError> {
    let p = ResonanceParams::with_cutoff(args.inv_a, args.rstar, 0.0);
    let mut kmaxes = args.kmax_list.clone();
    kmaxes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let grids: Vec<RadialGrid> = kmaxes
        .iter()
        .map(|&k_max| {
            let decades = (k_max / 1e-4).log10().max(1.0);
            let n = ((args.points_per_decade as f64) * decades).ceil() as usize;
            build_log_gauss_grid(n.max(64), 1e-4, k_max)
        })
        .collect::<Result<_, _>>()?;
    let rows = thomas_collapse_probe(&p, &grids)?;
    let mut text = String::from("kmax,q0_rstar0,q0_rstar1\n");
    for r in rows {
        let _ = writeln!(
            text,
            "{},{},{}",
            fmt(r.k_max),
            fmt(r.q0_zero_range),
            fmt(r.q0_finite)
        );
    }
    emit(&args.out, &text)
}
