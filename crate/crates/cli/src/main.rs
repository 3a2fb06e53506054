use clap::{Parser, Subcommand, ValueEnum};
use rabi_bloch::ChainKind;
use rabi_bloch_cli::presets::{preset, Preset};
use rabi_bloch_cli::runner::{run_analytic, run_bessel_table, run_compare, run_evolve, run_sweep, Invocation};
use rabi_bloch_cli::{CliResult, RunConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "rabi-bloch", version, about = "Bloch oscillations of the photon distribution in the quantum Rabi model")]
struct Cli {
    /// key = value configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// output directory (default: out, or out/<preset>)
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// abort on validity warnings
    #[arg(long, global = true)]
    strict: bool,
    /// time step in units of T_B (overrides dt_per_period)
    #[arg(long, global = true)]
    dt: Option<f64>,
    /// accepted for compatibility; runs are always deterministic
    #[arg(long, global = true)]
    seedless_deterministic: bool,
    /// chain used for the sector dynamics
    #[arg(long, global = true, value_enum, default_value_t = Chain::Equivalent)]
    chain: Chain,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Chain {
    Equivalent,
    Effective,
}

impl From<Chain> for ChainKind {
    fn from(c: Chain) -> Self {
        match c {
            Chain::Equivalent => ChainKind::Equivalent,
            Chain::Effective => ChainKind::Effective,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Simulate and write distribution, centers, overlaps and predictions
    Evolve,
    /// Scan L and report max P_b for each value
    SweepL {
        #[arg(long, default_value_t = 23.0)]
        from: f64,
        #[arg(long, default_value_t = 30.0)]
        to: f64,
        #[arg(long, default_value_t = 71)]
        steps: usize,
    },
    /// Compare simulation against the closed-form prediction
    Compare {
        /// also run the other chain and report max |ΔP_a|
        #[arg(long)]
        cross_chain: bool,
    },
    /// Write the closed-form prediction only
    Analytic,
    /// Run a figure preset: fig2, fig3, fig4a..d, fig5a..d
    Preset { name: String },
}

fn load(cli: &Cli) -> CliResult<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    apply_flags(cli, &mut cfg)?;
    Ok(cfg)
}

fn apply_flags(cli: &Cli, cfg: &mut RunConfig) -> CliResult<()> {
    if cli.strict {
        cfg.strict = true;
    }
    if let Some(dt) = cli.dt {
        cfg.dt_per_period = Some(dt);
    }
    cfg.validate()
}

fn invocation(cli: &Cli, command: &str, preset: Option<&str>, notes: Vec<String>) -> Invocation {
    Invocation {
        command: command.to_string(),
        preset: preset.map(str::to_string),
        chain: cli.chain.into(),
        notes,
    }
}

fn execute(cli: &Cli) -> CliResult<()> {
    let out = |default: &str| cli.out_dir.clone().unwrap_or_else(|| PathBuf::from(default));
    match &cli.command {
        Command::Evolve => {
            let cfg = load(cli)?;
            let dir = out("out");
            let res = run_evolve(&cfg, invocation(cli, "evolve", None, vec![]), &dir)?;
            println!(
                "wrote {} files to {} (γ = {:.6}, {} samples)",
                res.metadata.files.len(),
                dir.display(),
                res.metadata.derived.gamma,
                res.record.samples.len()
            );
        }
        Command::SweepL { from, to, steps } => {
            let cfg = load(cli)?;
            let dir = out("out");
            let rows = run_sweep(&cfg, invocation(cli, "sweep-l", None, vec![]), *from, *to, *steps, &dir)?;
            for r in rows.iter().filter(|r| r.suppressed) {
                println!(
                    "transition suppressed at L = {:.4} ({:.4}); nearest J0 zero {:.4}",
                    r.l, r.max_p_b, r.nearest_j0_zero
                );
            }
            println!("wrote {}", dir.join("sweep.csv").display());
        }
        Command::Compare { cross_chain } => {
            let cfg = load(cli)?;
            let dir = out("out");
            let r = run_compare(&cfg, invocation(cli, "compare", None, vec![]), &dir, *cross_chain)?;
            println!(
                "P_a(kT_B) vs cos²(γkT_B): max {:.4e}, rms {:.4e} over {} periods",
                r.p_a_max_deviation, r.p_a_rms_deviation, r.periods
            );
            println!(
                "center vs prediction: max {:.4e}, rms {:.4e}",
                r.center_max_deviation, r.center_rms_deviation
            );
            if let Some(d) = r.cross_chain_max_deviation {
                println!("other chain: max |ΔP_a| = {d:.4e}");
            }
        }
        Command::Analytic => {
            let cfg = load(cli)?;
            let dir = out("out");
            let meta = run_analytic(&cfg, invocation(cli, "analytic", None, vec![]), &dir)?;
            println!("wrote {} files to {}", meta.files.len(), dir.display());
        }
        Command::Preset { name } => {
            let dir = out(&format!("out/{name}"));
            match preset(name)? {
                Preset::BesselTable => {
                    run_bessel_table(invocation(cli, "preset", Some(name), vec![]), &dir)?;
                    println!("wrote J0 table to {}", dir.display());
                }
                Preset::Run { mut config, notes } => {
                    apply_flags(cli, &mut config)?;
                    for n in &notes {
                        eprintln!("note: {n}");
                    }
                    let res = run_evolve(&config, invocation(cli, "preset", Some(name), notes), &dir)?;
                    println!(
                        "wrote {} files to {} (γ = {:.6})",
                        res.metadata.files.len(),
                        dir.display(),
                        res.metadata.derived.gamma
                    );
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
