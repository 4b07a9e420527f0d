//! Thin command-line front end: flags (optionally overlaying a JSON config
//! file) are translated into a `RunConfig` and dispatched to the library.

use clap::{Args, Parser, Subcommand};

use regcomply::cli::{
    run, write_output, CommandKind, OutputFormat, RunConfig, WeightsSpec,
};
use regcomply::sampler::McMode;
use regcomply::search::{MeasureKind, SearchConfig};

#[derive(Parser)]
#[command(
    name = "regcomply",
    version,
    about = "Compliance measures of weighted l1 regularizers for sparse recovery"
)]
struct Cli {
    /// JSON config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<std::path::PathBuf>,
    /// Output path (stdout when omitted).
    #[arg(long, global = true)]
    output: Option<String>,
    /// Output format: json (canonical) or csv (flat projection).
    #[arg(long, global = true, value_parser = parse_format)]
    format: Option<OutputFormat>,
    #[command(subcommand)]
    command: Option<Cmd>,
}

#[derive(Args, Default)]
struct Common {
    /// Ambient dimension n.
    #[arg(long)]
    n: Option<usize>,
    /// Sparsity level k.
    #[arg(long)]
    k: Option<usize>,
    /// Weights: comma list, "ones", or "random:COUNT:SEED".
    #[arg(long, value_parser = parse_weights)]
    weights: Option<WeightsSpec>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Monte Carlo sample count.
    #[arg(long)]
    samples: Option<u64>,
    /// Local-search restarts.
    #[arg(long)]
    restarts: Option<usize>,
    /// Grid resolution per free weight coordinate.
    #[arg(long)]
    grid_steps: Option<usize>,
    /// Convergence tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Iteration cap per simplex run.
    #[arg(long)]
    max_iters: Option<usize>,
    /// Cross-check searches against the brute-force oracle (small instances).
    #[arg(long)]
    certify: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Exact 3D cone areas and the uniform / non-uniform measures.
    Measure3d(Common),
    /// Monte Carlo compliance in any dimension.
    Mc {
        #[command(flatten)]
        common: Common,
        /// u (uniform) or nu (non-uniform).
        #[arg(long, value_parser = parse_mode)]
        mode: Option<McMode>,
    },
    /// Necessary-side RIP measures (B, gamma, delta).
    RipNec(Common),
    /// Sufficient-side RIP measure (D, delta).
    RipSuff(Common),
    /// Maximize a measure over the weight vector.
    Optimize {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_measure)]
        measure: Option<MeasureKind>,
    },
    /// Verify a candidate maximizer against random competitors.
    Certify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_parser = parse_measure)]
        measure: Option<MeasureKind>,
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Brute-force cross-check battery for the supremum searches.
    Oracle(Common),
    /// Emit the flat-witness value tables (B_L and D_L versus L).
    Curves {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        l_max: Option<usize>,
    },
}

fn parse_weights(s: &str) -> Result<WeightsSpec, String> {
    WeightsSpec::parse_cli(s).map_err(|e| e.to_string())
}

fn parse_mode(s: &str) -> Result<McMode, String> {
    match s {
        "u" => Ok(McMode::U),
        "nu" => Ok(McMode::Nu),
        other => Err(format!("mode must be 'u' or 'nu', got '{other}'")),
    }
}

fn parse_measure(s: &str) -> Result<MeasureKind, String> {
    match s {
        "u3" => Ok(MeasureKind::Uniform3d),
        "nu3" => Ok(MeasureKind::NonUniform3d),
        "rip-nec" => Ok(MeasureKind::RipNecessary),
        "rip-suff" => Ok(MeasureKind::RipSufficient),
        "mc-u" => Ok(MeasureKind::McUniform),
        "mc-nu" => Ok(MeasureKind::McNonUniform),
        other => Err(format!(
            "measure must be one of u3, nu3, rip-nec, rip-suff, mc-u, mc-nu; got '{other}'"
        )),
    }
}

fn parse_format(s: &str) -> Result<OutputFormat, String> {
    match s {
        "json" => Ok(OutputFormat::Json),
        "csv" => Ok(OutputFormat::Csv),
        other => Err(format!("format must be 'json' or 'csv', got '{other}'")),
    }
}

fn apply_common(cfg: &mut RunConfig, c: &Common) {
    if c.n.is_some() {
        cfg.n = c.n;
    }
    if c.k.is_some() {
        cfg.k = c.k;
    }
    if c.weights.is_some() {
        cfg.weights = c.weights.clone();
    }
    if c.seed.is_some() {
        cfg.seed = c.seed;
    }
    if c.samples.is_some() {
        cfg.samples = c.samples;
    }
    let touches_search = c.restarts.is_some()
        || c.grid_steps.is_some()
        || c.tolerance.is_some()
        || c.max_iters.is_some()
        || c.certify;
    if touches_search {
        let mut s = cfg.search.unwrap_or(SearchConfig {
            seed: cfg.seed.unwrap_or(0),
            mc_samples: cfg.samples.unwrap_or(1_000_000),
            ..Default::default()
        });
        if let Some(v) = c.restarts {
            s.restarts = v;
        }
        if let Some(v) = c.grid_steps {
            s.grid_steps = v;
        }
        if let Some(v) = c.tolerance {
            s.tolerance = v;
        }
        if let Some(v) = c.max_iters {
            s.max_iters = v;
        }
        if let Some(v) = c.seed {
            s.seed = v;
        }
        if c.certify {
            s.certify = true;
        }
        cfg.search = Some(s);
    }
}

fn build_config(cli: &Cli) -> Result<RunConfig, regcomply::Error> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let bytes = std::fs::read(path)
                .map_err(|e| regcomply::Error::Config(format!("read {}: {e}", path.display())))?;
            RunConfig::from_json(&bytes)?
        }
        None => {
            let kind = match &cli.command {
                Some(cmd) => command_kind(cmd),
                None => {
                    return Err(regcomply::Error::Config(
                        "a subcommand or --config file is required".into(),
                    ))
                }
            };
            RunConfig::new(kind)
        }
    };
    if let Some(cmd) = &cli.command {
        cfg.command = command_kind(cmd);
        match cmd {
            Cmd::Measure3d(c) | Cmd::RipNec(c) | Cmd::RipSuff(c) | Cmd::Oracle(c) => {
                apply_common(&mut cfg, c)
            }
            Cmd::Mc { common, mode } => {
                apply_common(&mut cfg, common);
                if mode.is_some() {
                    cfg.mode = *mode;
                }
            }
            Cmd::Optimize { common, measure } => {
                apply_common(&mut cfg, common);
                if measure.is_some() {
                    cfg.measure = *measure;
                }
            }
            Cmd::Certify {
                common,
                measure,
                trials,
            } => {
                apply_common(&mut cfg, common);
                if measure.is_some() {
                    cfg.measure = *measure;
                }
                if trials.is_some() {
                    cfg.trials = *trials;
                }
            }
            Cmd::Curves { common, l_max } => {
                apply_common(&mut cfg, common);
                if l_max.is_some() {
                    cfg.l_max = *l_max;
                }
            }
        }
    }
    if cli.output.is_some() {
        cfg.output = cli.output.clone();
    }
    if cli.format.is_some() {
        cfg.format = cli.format;
    }
    Ok(cfg)
}

fn command_kind(cmd: &Cmd) -> CommandKind {
    match cmd {
        Cmd::Measure3d(_) => CommandKind::Measure3d,
        Cmd::Mc { .. } => CommandKind::Mc,
        Cmd::RipNec(_) => CommandKind::RipNec,
        Cmd::RipSuff(_) => CommandKind::RipSuff,
        Cmd::Optimize { .. } => CommandKind::Optimize,
        Cmd::Certify { .. } => CommandKind::Certify,
        Cmd::Oracle(_) => CommandKind::Oracle,
        Cmd::Curves { .. } => CommandKind::Curves,
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match build_config(&cli).and_then(|cfg| {
        let report = run(&cfg)?;
        write_output(&report)?;
        Ok(())
    }) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("regcomply: {e}");
            e.exit_code()
        }
    };
    std::process::exit(code);
}
