use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use slicefem::testcases::{CaseName, TestcaseSpec};
use slicefem_cli::{run, RunConfig};

#[derive(Parser)]
#[command(name = "slicefem", version, about = "Implicit compatible finite element vertical-slice solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a testcase.
    Run(RunArgs),
    /// List the available testcases with their default settings.
    ListCases,
}

#[derive(Args)]
struct RunArgs {
    /// Testcase name (may instead come from the config file).
    case: Option<String>,
    /// TOML file with the same keys as the options below.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    ncols: Option<usize>,
    #[arg(long)]
    nlayers: Option<usize>,
    /// Time step in seconds.
    #[arg(long)]
    dt: Option<f64>,
    /// End time in seconds.
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Write sampled fields every N steps (initial and final fields are always written).
    #[arg(long)]
    output_every: Option<usize>,
    #[arg(long)]
    checkpoint_every: Option<usize>,
    /// Absolute Newton tolerance on the scaled RMS residual.
    #[arg(long)]
    newton_tol: Option<f64>,
    /// Relative GMRES tolerance.
    #[arg(long)]
    gmres_tol: Option<f64>,
    #[arg(long)]
    gmres_restart: Option<usize>,
    #[arg(long)]
    sample_nx: Option<usize>,
    #[arg(long)]
    sample_nz: Option<usize>,
    /// Also write fields in the structured binary format.
    #[arg(long)]
    binary: bool,
    /// Start without the initial perturbation.
    #[arg(long)]
    no_perturbation: bool,
    /// Initial horizontal wind in m/s.
    #[arg(long)]
    initial_wind: Option<f64>,
    /// Continue from a checkpoint file.
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Suppress per-step progress lines.
    #[arg(long, short)]
    quiet: bool,
}

impl RunArgs {
    fn config(&self) -> RunConfig {
        RunConfig {
            case: self.case.clone(),
            ncols: self.ncols,
            nlayers: self.nlayers,
            dt: self.dt,
            t_end: self.t_end,
            threads: self.threads,
            out_dir: self.out_dir.clone(),
            output_every: self.output_every,
            checkpoint_every: self.checkpoint_every,
            newton_tol: self.newton_tol,
            gmres_tol: self.gmres_tol,
            gmres_restart: self.gmres_restart,
            sample_nx: self.sample_nx,
            sample_nz: self.sample_nz,
            binary: self.binary.then_some(true),
            no_perturbation: self.no_perturbation.then_some(true),
            initial_wind: self.initial_wind,
            bubble_density: None,
            resume: self.resume.clone(),
        }
    }
}

fn list_cases() {
    println!("{:<8} {:>9} {:>8} {:>7} {:>9}  description", "name", "grid", "dt [s]", "steps", "t_end [s]");
    for c in CaseName::ALL {
        let s = TestcaseSpec::new(c);
        println!(
            "{:<8} {:>9} {:>8} {:>7} {:>9}  {}",
            c.as_str(),
            format!("{}x{}", s.ncols, s.nlayers),
            s.dt,
            s.num_steps(),
            s.t_end,
            c.description()
        );
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListCases => {
            list_cases();
            ExitCode::SUCCESS
        }
        Command::Run(args) => {
            let cfg = match &args.config {
                Some(p) => match RunConfig::from_toml_file(p) {
                    Ok(c) => c.merge(args.config()),
                    Err(e) => {
                        eprintln!("error: {e:#}");
                        return ExitCode::from(2);
                    }
                },
                None => args.config(),
            };
            if let Err(e) = cfg.case_name().and_then(|_| cfg.testcase()) {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            if let Some(n) = cfg.threads {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("warning: could not configure {n} threads: {e}");
                }
            }
            match run(&cfg, args.quiet) {
                Ok(s) => {
                    println!("{}", s.line());
                    ExitCode::SUCCESS
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::FAILURE
                }
            }
        }
    }
}
