use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rabi_polaron::batch::{self, parse_grid, parse_outputs, GridSpec, Output, SweepConfig, SweepOverrides};
use rabi_polaron::observables::{classify, photon_statistics, EntropyBase, PhotonSource};
use rabi_polaron::variational::Ansatz;
use rabi_polaron::wigner::{self, Component, PhaseGrid};
use rabi_polaron::{solve_ground, Error, ModelParams};

#[derive(Parser)]
#[command(name = "rabi-polaron", version, about = "Quantum Rabi model ground states: polaron ansatz, exact diagonalisation, Wigner diagnostics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct PointArgs {
    /// Frequency ratio R = Δ/ω.
    #[arg(short = 'R', long)]
    ratio: f64,
    /// Coupling in units of g_c.
    #[arg(long)]
    g_over_gc: f64,
    #[arg(long, default_value = "full4")]
    ansatz: Ansatz,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one point and print a JSON record.
    Point {
        #[command(flatten)]
        point: PointArgs,
        /// Comma-separated outputs, or `all`.
        #[arg(long, default_value = "all")]
        outputs: String,
        #[arg(long, default_value = "e")]
        entropy_base: EntropyBase,
    },
    /// Run a parameter sweep and write CSV files plus a manifest.
    Sweep {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Ratio to sweep; repeat for several.
        #[arg(short = 'R', long)]
        ratio: Vec<f64>,
        /// Coupling grid `min:max:count` in units of g_c.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        ansatz: Option<String>,
        #[arg(long)]
        outputs: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        entropy_base: Option<String>,
    },
    /// Write a Wigner component on the default grid as CSV.
    Wigner {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, default_value = "W_T")]
        component: Component,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the Wigner negativities of the total, even and odd parts.
    Negativity {
        #[command(flatten)]
        point: PointArgs,
    },
    /// Print variational and exact photon-number distributions as CSV.
    Fock {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Print the coupling-region classification.
    Classify {
        #[command(flatten)]
        point: PointArgs,
    },
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, Error> {
    serde_json::to_string_pretty(v).map_err(|e| Error::Parse(e.to_string()))
}

fn stdout_error(e: std::io::Error) -> Result<(), Error> {
    // A closed pipe (e.g. `| head`) is not an error for the user.
    match e.kind() {
        std::io::ErrorKind::BrokenPipe => Ok(()),
        _ => Err(Error::Io { path: "<stdout>".into(), source: e }),
    }
}

fn emit(text: &str) -> Result<(), Error> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{text}").and_then(|()| out.flush()).or_else(stdout_error)
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Point { point, outputs, entropy_base } => {
            let outputs = parse_outputs(&outputs)?;
            let rec = batch::run_point(point.ratio, point.g_over_gc, &outputs, point.ansatz, entropy_base)?;
            emit(&to_json(&rec)?)?;
        }
        Command::Sweep { config, ratio, grid, ansatz, outputs, out, jobs, entropy_base } => {
            let base = match &config {
                Some(path) => SweepConfig::load(path)?,
                None => SweepConfig::default(),
            };
            let outputs: Option<BTreeSet<Output>> = outputs.as_deref().map(parse_outputs).transpose()?;
            let grid = grid
                .map(|g| parse_grid(&g).map(|_| GridSpec::Text(g)))
                .transpose()?;
            let cfg = base.apply(SweepOverrides {
                ratios: (!ratio.is_empty()).then_some(ratio),
                grid,
                ansatz,
                outputs,
                output_dir: out,
                entropy_base,
                jobs,
            });
            let report = batch::run_sweep(&cfg)?;
            eprintln!(
                "{} points, {} files, {} failed; manifest {}",
                report.records.len(),
                report.manifest.files.len(),
                report.failures(),
                report.manifest_path.display()
            );
        }
        Command::Wigner { point, component, out } => {
            let sol = batch::solve_point(point.ratio, point.g_over_gc, point.ansatz)?;
            let grid = PhaseGrid::default_for(&sol.params);
            let field = wigner::analytic_field(&sol, &grid)?;
            let values = field.get(component);
            match out {
                Some(path) => wigner::save_grid(&path, &grid, values)?,
                None => {
                    let stdout = std::io::stdout();
                    wigner::write_grid_csv(stdout.lock(), &grid, values).or_else(stdout_error)?;
                }
            }
        }
        Command::Negativity { point } => {
            let sol = batch::solve_point(point.ratio, point.g_over_gc, point.ansatz)?;
            emit(&to_json(&wigner::ground_state_negativities(&sol.params)?)?)?;
        }
        Command::Fock { point, n_max } => {
            let sol = batch::solve_point(point.ratio, point.g_over_gc, point.ansatz)?;
            let ed = solve_ground(&sol.model, 1e-10)?;
            let var = photon_statistics(PhotonSource::Variational(&sol.params), n_max);
            let exact = photon_statistics(PhotonSource::Exact(&ed), Some(n_max.unwrap_or(var.n_max)));
            for w in [&var.warning, &exact.warning].into_iter().flatten() {
                eprintln!("warning: {w}");
            }
            let mut csv = String::from("n,parity,variational,exact");
            for n in 0..var.distribution.len() {
                let parity = if n % 2 == 0 { "even" } else { "odd" };
                let e = exact.distribution.populations.get(n).copied().unwrap_or(0.0);
                csv += &format!("\n{n},{parity},{:?},{e:?}", var.distribution.populations[n]);
            }
            emit(&csv)?;
        }
        Command::Classify { point } => {
            let model = ModelParams::from_ratio(point.ratio, point.g_over_gc)?;
            let sol = batch::solve_point(point.ratio, point.g_over_gc, point.ansatz)?;
            emit(&to_json(&classify(&model, &sol))?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::Domain(_) | Error::Parse(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
