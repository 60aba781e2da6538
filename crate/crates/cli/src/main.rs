use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qcpop_cli::bench::{run_bench_coherent, run_bench_identify, expect_mode, BenchSettings};
use qcpop_cli::output::{coherent_summary, identify_summary, write_bench};
use qcpop_cli::single::run_single;
use qcpop_cli::{CliError, CliResult, Mode, RunConfig};

#[derive(Parser)]
#[command(name = "qcpop", version, about = "Quantum control as polynomial optimization")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one gate, state, time-optimal or identification problem and
    /// print the solution as JSON.
    Solve(Common),
    /// Gate synthesis over random targets.
    BenchCoherent(Common),
    /// Coupling identification over random known controls.
    BenchIdentify(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    samples: Option<usize>,
    /// Output directory (bench) or file (solve); stdout for solve by default.
    #[arg(long)]
    out: Option<PathBuf>,
    /// 0 disables the relaxation.
    #[arg(long)]
    relaxation_order: Option<u32>,
    #[arg(long)]
    multistart: Option<usize>,
}

impl Common {
    fn load(&self) -> CliResult<RunConfig> {
        let mut cfg = RunConfig::load(&self.config)?;
        if let Some(s) = self.seed {
            cfg.solver.seed = s;
        }
        if let Some(n) = self.samples {
            cfg.experiment.samples = n;
        }
        if let Some(d) = self.relaxation_order {
            cfg.solver.relaxation_order = Some(d);
        }
        if let Some(k) = self.multistart {
            cfg.solver.multistart = k;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn out_dir(&self, cfg: &RunConfig) -> CliResult<PathBuf> {
        self.out
            .clone()
            .or_else(|| cfg.output.dir.clone())
            .ok_or_else(|| CliError::Config("an output directory is required (--out or output.dir)".into()))
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Solve(args) => {
            let cfg = args.load()?;
            if cfg.mode.is_bench() {
                return Err(CliError::Config(format!(
                    "mode {:?} runs through its bench command",
                    cfg.mode
                )));
            }
            let report = run_single(&cfg)?;
            let text = serde_json::to_string_pretty(&report)? + "\n";
            match &args.out {
                Some(path) => write_file(path, &text)?,
                None => print!("{text}"),
            }
        }
        Command::BenchCoherent(args) => {
            let cfg = args.load()?;
            expect_mode(&cfg, Mode::BenchCoherent)?;
            let dir = args.out_dir(&cfg)?;
            let settings = BenchSettings::from_config(&cfg);
            let out = run_bench_coherent(&cfg, &settings)?;
            let summary = coherent_summary(&out, settings.seed);
            write_bench(&dir, &out, &summary)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        Command::BenchIdentify(args) => {
            let cfg = args.load()?;
            expect_mode(&cfg, Mode::BenchIdentify)?;
            let dir = args.out_dir(&cfg)?;
            let settings = BenchSettings::from_config(&cfg);
            let out = run_bench_identify(&cfg, &settings)?;
            let summary = identify_summary(&out, settings.seed);
            write_bench(&dir, &out, &summary)?;
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
