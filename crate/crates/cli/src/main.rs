use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use modebeam::geometry::{build_antenna1, build_antenna2};
use modebeam_cli::output::{cut_csv, cut_file_name, OutputDir, SolutionRecord};
use modebeam_cli::runner::{ecc_table, solve_target, synthesize_solution, target_plane, Setup, CUT_STEP_DEG};
use modebeam_cli::{parse_scenario, run_scenario, CliError, GridSize, RunOptions, Scenario, OUT_ENV};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "modebeam", version, about = "Multimode antenna beam steering simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Scenario JSON file.
    #[arg(long, global = true)]
    scenario: Option<PathBuf>,
    /// Output directory; falls back to the scenario's output_dir, then $MODEBEAM_OUT.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Sphere grid for ECC and directivity, as <n_theta>x<n_phi>.
    #[arg(long, global = true, default_value = "64x128")]
    grid: String,
    /// Accepted for scripting compatibility; every algorithm is deterministic.
    #[arg(long, global = true)]
    seedless: bool,
    /// Reject unknown scenario keys and steering results outside tolerance.
    #[arg(long, global = true)]
    strict: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print flat and bent resonance frequencies.
    Resonance,
    /// Write pattern-cut CSVs for every steering target.
    Pattern,
    /// Print steering solutions.
    Steer,
    /// Print the pairwise envelope correlation of all ports.
    Ecc,
    /// Run the full scenario: cuts, report and manifest.
    Run,
    /// Print both preset layouts.
    Presets,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("modebeam: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn print_json<S: Serialize>(v: &S) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(v).map_err(|e| CliError::Numeric(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn load(common: &Common) -> Result<Scenario, CliError> {
    let path = common.scenario.as_deref().ok_or_else(|| CliError::Config("--scenario is required".into()))?;
    parse_scenario(path, common.strict, &mut |w| eprintln!("modebeam: warning: {w}"))
}

fn out_dir(common: &Common, s: &Scenario) -> Result<PathBuf, CliError> {
    common
        .out
        .clone()
        .or_else(|| s.output_dir.clone())
        .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
        .ok_or_else(|| CliError::Config(format!("no output directory: pass --out, set output_dir or {OUT_ENV}")))
}

fn options(common: &Common) -> Result<RunOptions, CliError> {
    Ok(RunOptions { grid: common.grid.parse::<GridSize>()?, strict: common.strict })
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    let common = &cli.common;
    match cli.command {
        Command::Presets => {
            #[derive(Serialize)]
            struct Presets {
                antenna1: modebeam::Layout,
                antenna2: modebeam::Layout,
            }
            print_json(&Presets { antenna1: build_antenna1(), antenna2: build_antenna2() })
        }
        Command::Resonance => {
            let s = load(common)?;
            print_json(&Setup::new(&s)?.resonance)
        }
        Command::Ecc => {
            let s = load(common)?;
            let opts = options(common)?;
            print_json(&ecc_table(&Setup::new(&s)?, &opts.grid.build()?)?)
        }
        Command::Steer => {
            let s = load(common)?;
            let opts = options(common)?;
            let setup = Setup::new(&s)?;
            let records = s
                .steering
                .iter()
                .map(|t| solve_target(&s, &setup, t, &opts).map(|sol| SolutionRecord::from(&sol)))
                .collect::<Result<Vec<_>, _>>()?;
            print_json(&records)
        }
        Command::Pattern => {
            let s = load(common)?;
            let opts = options(common)?;
            write_patterns(&s, &out_dir(common, &s)?, &opts)
        }
        Command::Run => {
            let s = load(common)?;
            let opts = options(common)?;
            let files = run_scenario(&s, &out_dir(common, &s)?, &opts)?;
            for f in files {
                println!("{}", f.display());
            }
            Ok(())
        }
    }
}

fn write_patterns(s: &Scenario, root: &Path, opts: &RunOptions) -> Result<(), CliError> {
    let setup = Setup::new(s)?;
    let mut out = OutputDir::create(root)?;
    for (i, t) in s.steering.iter().enumerate() {
        let sol = solve_target(s, &setup, t, opts)?;
        let field = synthesize_solution(&setup, &sol.excitation)?;
        let cut = modebeam::metrics::PatternCut::sample(&field, target_plane(s, t), CUT_STEP_DEG, true)
            .map_err(CliError::from_core)?;
        out.write(&cut_file_name(i, t), cut_csv(&cut)?.as_bytes())?;
    }
    for f in out.finish(s, opts, "ok")? {
        println!("{}", f.display());
    }
    Ok(())
}
