use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stretch_idla::coupling::CouplingOptions;
use stretch_idla::render::RenderOptions;
use stretch_idla::{Vertex, WeightProfile};
use stretch_idla_cli::{
    cmd_compare, cmd_couple, cmd_fpp, cmd_render, cmd_shells, cmd_sidla, cmd_stats, CliError, CliResult, EngineChoice,
    RenderSource, RunConfig,
};

#[derive(Parser)]
#[command(name = "sidla", version, about = "Stretch IDLA and FPP forest simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 64)]
    width: u32,
    #[arg(long, default_value_t = 32)]
    height: u32,
    #[arg(long, default_value = "stretch")]
    profile: WeightProfile,
    #[arg(long, default_value_t = 1)]
    replicas: u32,
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

impl Common {
    fn config(&self) -> CliResult<RunConfig> {
        RunConfig::new(self.seed, self.width, self.height, self.profile, self.replicas, self.out.clone())
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineArg {
    Jump,
    Rings,
}

#[derive(Clone, Copy, ValueEnum)]
enum SourceArg {
    Fpp,
    Sidla,
}

#[derive(Subcommand)]
enum Command {
    /// Geodesic forest snapshots.
    Fpp(Common),
    /// Particle-system runs until the window is covered.
    Sidla {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "jump")]
        engine: EngineArg,
    },
    /// Replays coupled rings and checks them against the forest.
    Couple {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 1.5)]
        horizon_factor: f64,
        #[arg(long, default_value_t = 256.0)]
        gap_window: f64,
    },
    /// Exhaustive shell-identity check over small trees.
    Shells {
        #[arg(long, default_value_t = 8)]
        max_edges: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Height survival, flank and level-one statistics for the tree at the origin.
    Stats(Common),
    /// Chi-square comparison of particle-system and FPP histograms.
    Compare(Common),
    /// SVG picture of a forest.
    Render {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "fpp")]
        source: SourceArg,
        /// Root to draw in red; `none` disables highlighting.
        #[arg(long, default_value = "0")]
        highlight_root: String,
        #[arg(long, default_value_t = 4.0)]
        scale: f64,
        #[arg(long)]
        max_level: Option<u32>,
    },
}

fn run(command: Command) -> CliResult<()> {
    match command {
        Command::Fpp(c) => cmd_fpp(&c.config()?)?.iter().for_each(|l| println!("{l}")),
        Command::Sidla { common, engine } => {
            let engine = match engine {
                EngineArg::Jump => EngineChoice::Jump,
                EngineArg::Rings => EngineChoice::Rings,
            };
            cmd_sidla(&common.config()?, engine)?.iter().for_each(|l| println!("{l}"));
        }
        Command::Couple { common, horizon_factor, gap_window } => {
            let cfg = common.config()?;
            let opts = CouplingOptions { profile: cfg.profile, horizon_factor, gap_window };
            let summary = cmd_couple(&cfg, &opts)?;
            summary.lines.iter().for_each(|l| println!("{l}"));
            if !summary.all_equal {
                return Err(CliError::Verification("replayed rings differ from the geodesic forest".into()));
            }
        }
        Command::Shells { max_edges, out } => {
            let (line, pass) = cmd_shells(max_edges, &out)?;
            println!("{line}");
            if !pass {
                return Err(CliError::Verification("shell identity violated".into()));
            }
        }
        Command::Stats(c) => {
            let s = cmd_stats(&c.config()?)?;
            for r in &s.flank {
                println!(
                    "flank n={} kappa={} samples={} frequency={:.4} upper99={:.4} pass={}",
                    r.n, r.kappa, r.samples, r.frequency, r.upper99, r.pass
                );
            }
            s.files.iter().for_each(|f| println!("wrote {}", f.display()));
        }
        Command::Compare(c) => {
            let s = cmd_compare(&c.config()?)?;
            println!(
                "compare level1 chi2={:.4} dof={} p={:.4}; height chi2={:.4} dof={} p={:.4}",
                s.level_one.statistic, s.level_one.dof, s.level_one.p_value, s.height.statistic, s.height.dof, s.height.p_value
            );
            println!("wrote {}", s.path.display());
            if !s.pass() {
                return Err(CliError::Verification("histograms differ at the 1% level".into()));
            }
        }
        Command::Render { common, source, highlight_root, scale, max_level } => {
            let highlight_root = match highlight_root.as_str() {
                "none" => None,
                s => {
                    let x: i64 = s.parse().map_err(|_| CliError::Config(format!("bad root {s:?}")))?;
                    Some(Vertex::new(x, 0).map_err(|e| CliError::Config(e.to_string()))?)
                }
            };
            let opts = RenderOptions { highlight_root, scale, max_level };
            let source = match source {
                SourceArg::Fpp => RenderSource::Fpp,
                SourceArg::Sidla => RenderSource::Sidla,
            };
            cmd_render(&common.config()?, source, &opts)?.iter().for_each(|p| println!("wrote {}", p.display()));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sidla: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
