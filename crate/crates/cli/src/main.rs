use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use formation::bench::bench_suite;
use formation::generate::{gen_random_with_holes, gen_tight};
use formation::io::{InstanceFile, ScheduleFile};
use formation::oracle::verify;
use formation::plan;

/// Collision-free, distance-optimal formation planning on graphs.
#[derive(Debug, Parser)]
#[command(name = "formation", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Plan an instance and write a schedule file.
    Plan {
        #[arg(long)]
        input: PathBuf,
        /// Retime departures as early as collisions allow.
        #[arg(long)]
        compress: bool,
        #[arg(long)]
        output: PathBuf,
    },
    /// Check a schedule against an instance. Exits 1 if any check fails.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
    },
    /// Random grid instance with disjoint starts and goals.
    Gen {
        #[arg(long)]
        cols: usize,
        #[arg(long)]
        rows: usize,
        #[arg(long)]
        agents: usize,
        #[arg(long, env = "FORMATION_SEED", default_value_t = 0)]
        seed: u64,
        /// Number of random cells to remove; the grid stays connected.
        #[arg(long, default_value_t = 0)]
        holes: usize,
        /// Defaults to stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Two stars joined by a path, where every start-goal distance is `ell`.
    Tight {
        #[arg(long)]
        agents: usize,
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Time the planner on random grids. Prints CSV records, then a summary
    /// table and scaling ratios to stderr.
    Bench {
        /// Comma-separated sizes, e.g. `20x20,40x40`.
        #[arg(long, value_delimiter = ',', value_parser = parse_grid, required = true)]
        grid: Vec<(usize, usize)>,
        #[arg(long, value_delimiter = ',', required = true)]
        agents: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        runs: usize,
        #[arg(long, env = "FORMATION_SEED", default_value_t = 0)]
        seed: u64,
    },
    /// Print one row per agent and one column per step.
    Trace {
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long, value_enum, default_value_t = TraceFormat::Csv)]
        format: TraceFormat,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TraceFormat {
    Csv,
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (c, r) = s.split_once(['x', 'X']).ok_or_else(|| format!("expected COLSxROWS, got `{s}`"))?;
    let c = c.trim().parse().map_err(|e| format!("cols in `{s}`: {e}"))?;
    let r = r.trim().parse().map_err(|e| format!("rows in `{s}`: {e}"))?;
    Ok((c, r))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_instance(path: &Path) -> Result<formation::Instance> {
    let text = read(path)?;
    let file = InstanceFile::parse(&text).with_context(|| format!("parsing instance {}", path.display()))?;
    file.to_instance().with_context(|| format!("invalid instance {}", path.display()))
}

fn read_schedule(path: &Path) -> Result<ScheduleFile> {
    let text = read(path)?;
    ScheduleFile::parse(&text).with_context(|| format!("parsing schedule {}", path.display()))
}

fn emit(text: &str, output: Option<&Path>) -> Result<()> {
    match output {
        Some(p) => fs::write(p, format!("{text}\n")).with_context(|| format!("writing {}", p.display())),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Plan { input, compress, output } => {
            let instance = read_instance(&input)?;
            let planned = plan(&instance, compress).context("planning failed")?;
            let file = ScheduleFile::new(&instance, &planned.schedule);
            emit(&file.to_json(), Some(&output))?;
            eprintln!("makespan {} total_distance {}", file.makespan, file.total_distance);
        }
        Command::Verify { input, schedule } => {
            let instance = read_instance(&input)?;
            let file = read_schedule(&schedule)?;
            let problems = file.inconsistencies();
            let report = verify(&instance, &file.to_schedule()?);
            println!("{report}");
            for p in &problems {
                println!("inconsistent: {p}");
            }
            return Ok(report.passed() && problems.is_empty());
        }
        Command::Gen { cols, rows, agents, seed, holes, output } => {
            let file = gen_random_with_holes(cols, rows, agents, holes, seed)?;
            emit(&file.to_json(), output.as_deref())?;
        }
        Command::Tight { agents, ell, output } => {
            emit(&gen_tight(agents, ell)?.to_json(), output.as_deref())?;
        }
        Command::Bench { grid, agents, runs, seed } => {
            if runs == 0 {
                bail!("--runs must be at least 1");
            }
            let table = bench_suite(&grid, &agents, runs, seed)?;
            print!("{}", table.to_csv());
            eprint!("{}", table.render());
            for row in table.scaling() {
                eprintln!(
                    "n={} {} -> {} vertices: measured x{:.2}, worst case x{:.1}",
                    row.agents, row.from_vertices, row.to_vertices, row.measured_ratio, row.predicted_ratio
                );
            }
        }
        Command::Trace { schedule, format: TraceFormat::Csv } => {
            print!("{}", read_schedule(&schedule)?.trace());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
