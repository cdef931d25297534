mod specs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quasidist::diagnostics::{self, CheckReport};
use quasidist::distributions::{self, CohenKernel};
use quasidist::evolution::{evolve_kr_field, evolve_wave, FreeEvolutionParams};
use quasidist::fock::{self, DensityMatrix, LEAKAGE_TOL};
use quasidist::io::{self, Part};
use quasidist::{DistKind, PhaseField, WaveField, C64};

use specs::{CliResult, Failure, StateKind, StateSpec, EXIT_CHECK};

/// Phase-space quasi-distributions of one-dimensional quantum states.
#[derive(Parser)]
#[command(name = "quasidist", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a distribution on a grid and write it as QPSF.
    Compute(ComputeArgs),
    /// Write K-R frames of a freely evolving state.
    Evolve(EvolveArgs),
    /// Rebuild a density matrix from K-R samples.
    Reconstruct(ReconstructArgs),
    /// Export a QPSF field as a PGM heatmap or contour polylines.
    Render(RenderArgs),
}

#[derive(Args)]
struct StateArgs {
    #[arg(long, value_enum)]
    state: StateKind,
    /// Comma-separated `key=value` parameters of the state.
    #[arg(long = "state-args", default_value = "")]
    state_args: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DistName {
    Wigner,
    Kr,
    Mh,
    Cohen,
    SigmaKr,
    SOrdered,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    /// FFTs of the sampled wavefunction on a (q, p) grid.
    Wave,
    /// Truncated number basis on an alpha-plane lattice.
    Fock,
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    state: StateArgs,
    #[arg(long, value_enum)]
    dist: DistName,
    #[arg(long, allow_negative_numbers = true)]
    sigma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    s: Option<f64>,
    /// Cohen kernel: unity, kr, mh or sigma (uses --sigma).
    #[arg(long)]
    kernel: Option<String>,
    /// `n=..,qmin=..,qmax=..,pmin=..,pmax=..` (plus `m=..` for the Fock engine).
    #[arg(long, default_value = "")]
    grid: String,
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    #[arg(long, value_enum, default_value_t = Engine::Wave)]
    engine: Engine,
    /// Number-basis cutoff of the Fock engine.
    #[arg(long, default_value_t = 64)]
    dim: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long)]
    marginals: Option<PathBuf>,
    /// Run the diagnostics suite; exit 4 if any check fails.
    #[arg(long)]
    check: bool,
}

#[derive(Args)]
struct EvolveArgs {
    #[command(flatten)]
    state: StateArgs,
    #[arg(long, default_value = "")]
    grid: String,
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    /// Final time; frames are evenly spaced on [0, t].
    #[arg(long, allow_negative_numbers = true)]
    t: f64,
    #[arg(long, default_value_t = 1.0)]
    mass: f64,
    #[arg(long, default_value_t = 5)]
    frames: usize,
    #[arg(long = "out-dir")]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ReconstructArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    dim: usize,
    #[arg(long)]
    out: PathBuf,
    /// Reference state `kind[:k=v,...]`; prints the fidelity.
    #[arg(long)]
    truth: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PartArg {
    Re,
    Im,
    Abs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Heatmap,
    ContourData,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum)]
    part: PartArg,
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = configure_threads().and_then(|_| match cli.cmd {
        Command::Compute(a) => compute(a),
        Command::Evolve(a) => evolve(a),
        Command::Reconstruct(a) => reconstruct(a),
        Command::Render(a) => render(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code as u8)
        }
    }
}

/// Honors `QPSF_THREADS` as a cap on the worker pool.
fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("QPSF_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::usage(format!("QPSF_THREADS must be a positive integer, got {v:?}")))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::usage(format!("cannot size thread pool: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    log::info!("sequential build ignores QPSF_THREADS={n}");
    Ok(())
}

fn report(reports: &[CheckReport]) -> CliResult<()> {
    print!("{}", diagnostics::to_text(reports));
    if diagnostics::all_passed(reports) {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_CHECK,
            msg: "diagnostics failed".into(),
        })
    }
}

fn sigma_for(a: &ComputeArgs) -> CliResult<f64> {
    match (a.dist, a.sigma) {
        (DistName::SigmaKr, Some(s)) => Ok(s),
        (DistName::SigmaKr, None) => Err(Failure::usage("--dist sigma-kr needs --sigma")),
        (DistName::Kr | DistName::Mh, None | Some(1.0)) => Ok(1.0),
        (DistName::Wigner, None | Some(0.0)) => Ok(0.0),
        (DistName::Cohen, s) => Ok(s.unwrap_or(f64::NAN)),
        (DistName::SOrdered, None) => Ok(f64::NAN),
        _ => Err(Failure::usage("--sigma conflicts with the chosen distribution")),
    }
}

fn kernel_for(a: &ComputeArgs) -> CliResult<CohenKernel> {
    let name = a
        .kernel
        .as_deref()
        .ok_or_else(|| Failure::usage("--dist cohen needs --kernel"))?;
    Ok(match name {
        "unity" => CohenKernel::unity(),
        "kr" => CohenKernel::kirkwood_rihaczek(a.hbar),
        "mh" => CohenKernel::margenau_hill(a.hbar),
        "sigma" => {
            let s = a
                .sigma
                .ok_or_else(|| Failure::usage("--kernel sigma needs --sigma"))?;
            distributions::sigma_kernel(s, a.hbar)
        }
        other => {
            return Err(Failure::usage(format!(
                "unknown kernel {other:?}; expected unity, kr, mh or sigma"
            )))
        }
    })
}

fn compute(a: ComputeArgs) -> CliResult<()> {
    let state = StateSpec::new(a.state.state, &a.state.state_args)?;
    let sigma = sigma_for(&a)?;
    if a.s.is_some() && a.dist != DistName::SOrdered {
        return Err(Failure::usage("--s applies to --dist s-ordered"));
    }
    if a.kernel.is_some() && a.dist != DistName::Cohen {
        return Err(Failure::usage("--kernel applies to --dist cohen"));
    }
    let (field, psi) = match a.engine {
        Engine::Wave => {
            let (pos, grid) = specs::wave_grid(&a.grid, a.hbar)?;
            let psi = state.wave(&pos)?;
            let field = match a.dist {
                DistName::Wigner => distributions::wigner(&psi, &grid)?,
                DistName::Kr => distributions::kirkwood_rihaczek(&psi, &grid)?,
                DistName::Mh => distributions::margenau_hill(&psi, &grid)?,
                DistName::SigmaKr => distributions::sigma_kr(&psi, sigma, &grid)?,
                DistName::Cohen => distributions::cohen(&psi, &kernel_for(&a)?, &grid)?,
                DistName::SOrdered => {
                    return Err(Failure::usage("--dist s-ordered needs --engine fock"))
                }
            };
            (field, Some(psi))
        }
        Engine::Fock => {
            let grid = specs::alpha_grid(&a.grid)?;
            let rho = DensityMatrix::pure(&state.ket(a.dim)?)?;
            let field = match a.dist {
                DistName::Wigner | DistName::Kr | DistName::SigmaKr => fock::generalized_kr(&rho, &grid, sigma)?,
                DistName::Mh => fock::generalized_kr(&rho, &grid, 1.0)?
                    .map(DistKind::MargenauHill, |v| C64::new(v.re, 0.0)),
                DistName::SOrdered => {
                    let s = a.s.ok_or_else(|| Failure::usage("--dist s-ordered needs --s"))?;
                    fock::s_ordered(&rho, &grid, s)?
                }
                DistName::Cohen => return Err(Failure::usage("--dist cohen needs --engine wave")),
            };
            (field, None)
        }
    };
    io::save_qpsf(&field, &a.out)?;
    println!(
        "wrote {} ({}, {}x{})",
        a.out.display(),
        field.tag(),
        field.grid.n(),
        field.grid.m()
    );
    if let Some(p) = &a.csv {
        io::save_field_csv(&field, p)?;
    }
    if let Some(p) = &a.marginals {
        io::save_marginals_csv(&field, psi.as_ref(), p)?;
    }
    if a.check {
        let reports = match &psi {
            Some(psi) => diagnostics::wavefunction_suite(&field, psi)?,
            None => vec![
                diagnostics::check_normalization(&field),
                diagnostics::check_reality_wigner(&field),
            ],
        };
        report(&reports)?;
    }
    Ok(())
}

fn frame_times(t: f64, frames: usize) -> Vec<f64> {
    if frames == 1 {
        return vec![t];
    }
    (0..frames).map(|k| t * k as f64 / (frames - 1) as f64).collect()
}

fn evolve(a: EvolveArgs) -> CliResult<()> {
    if a.frames == 0 {
        return Err(Failure::usage("--frames must be at least 1"));
    }
    let base = FreeEvolutionParams::new(a.mass, a.t)?;
    let state = StateSpec::new(a.state.state, &a.state.state_args)?;
    let (pos, grid) = specs::wave_grid(&a.grid, a.hbar)?;
    let psi0 = state.wave(&pos)?;
    let k0 = distributions::kirkwood_rihaczek(&psi0, &grid)?;
    std::fs::create_dir_all(&a.out_dir).map_err(quasidist::Error::from)?;
    let mut reports = Vec::new();
    for (k, t) in frame_times(a.t, a.frames).into_iter().enumerate() {
        let p = base.at(t)?;
        let field = evolve_kr_field(&k0, p)?;
        let psi: WaveField = evolve_wave(&psi0, p)?;
        let direct = distributions::kirkwood_rihaczek(&psi, &grid)?;
        let path = a.out_dir.join(format!("frame_{k:04}.qpsf"));
        io::save_qpsf(&field, &path)?;
        let ctx = format!("frame {k}, t={t}");
        reports.push(CheckReport::new(
            format!("two-path[{k}]"),
            field.sup_diff(&direct),
            0.0,
            1e-6,
            ctx.clone(),
        ));
        for mut r in diagnostics::check_marginals(&field, &psi)? {
            r.name = format!("{}[{k}]", r.name);
            r.context = ctx.clone();
            reports.push(r);
        }
        println!("wrote {}", path.display());
    }
    report(&reports)
}

fn reconstruct(a: ReconstructArgs) -> CliResult<()> {
    let field: PhaseField = io::load_qpsf(&a.input)?;
    if !field.kind.is_kirkwood_rihaczek() {
        return Err(Failure::usage(format!(
            "reconstruction needs a sigma-kr field with sigma = 1, got tag {:?}",
            field.tag()
        )));
    }
    let r = fock::reconstruct(&field, a.dim)?;
    io::save_density_csv(r.density.operator(), &a.out)?;
    println!("wrote {} (dim {})", a.out.display(), a.dim);
    println!("raw trace = {:.9}{:+.3e}i", r.raw_trace.re, r.raw_trace.im);
    println!("min eigenvalue = {:.6e}", r.min_eigenvalue);
    if let Some(t) = &a.truth {
        let spec = StateSpec::parse(t)?;
        let big = spec.ket(a.dim.max(128))?;
        let v = big.rows(0, a.dim).into_owned();
        let lost = 1.0 - v.norm_squared();
        if lost > LEAKAGE_TOL {
            log::warn!("dim {} truncates the reference state (lost norm {lost:.3e})", a.dim);
        }
        let f = (v.adjoint() * r.density.matrix() * &v)[(0, 0)].re;
        println!("fidelity = {f:.6}");
    }
    Ok(())
}

fn render(a: RenderArgs) -> CliResult<()> {
    let field = io::load_qpsf(&a.input)?;
    let part = match a.part {
        PartArg::Re => Part::Re,
        PartArg::Im => Part::Im,
        PartArg::Abs => Part::Abs,
    };
    match a.mode {
        Mode::Heatmap => {
            let side = io::save_heatmap(&field, part, &a.out)?;
            println!("wrote {} and {}", a.out.display(), side.display());
        }
        Mode::ContourData => {
            let lines = io::save_contour_csv(&field, part, &a.out)?;
            println!("wrote {} ({} polylines)", a.out.display(), lines.len());
        }
    }
    Ok(())
}
