//! Command-line entry point.
//!
//! Exit codes: 0 success, 1 usage error, 2 verification failure, 3 runtime
//! error. No command reads the clock or environment randomness; rerunning
//! with the same seed produces byte-identical output whatever `--threads`.

use std::io::Write as _;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use percpca::experiments::{bounds_table, gamma_scan, p_sweep, subcritical_decay, tau_scaling};
use percpca::report::{
    bounds_csv, decay_csv, gamma_csv, line_chart_svg, scaling_csv, simulate_csv, survival_csv,
    SimulatePoint,
};
use percpca::runconfig::{
    default_verify_seed, parse_bool, render_config, Command, ConfigFile, Format, RawOptions,
    Resolver, RunConfig, SWEEP_DEFAULT_N, SWEEP_DEFAULT_R, SWEEP_DEFAULT_T, SWEEP_FULL_N,
    SWEEP_FULL_R, SWEEP_FULL_T,
};
use percpca::simulate::estimate_mean_tau;
use percpca::verify::{all_pass, run_verify};

const EXIT_OK: i32 = 0;
const EXIT_USAGE: i32 = 1;
const EXIT_VERIFY_FAILED: i32 = 2;
const EXIT_RUNTIME: i32 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "percpca",
    version,
    about = "Percolation PCA toolkit: analytic bounds, absorption dynamics, and exact verification",
    disable_help_subcommand = true
)]
struct Cli {
    /// Flat key=value configuration file; command-line flags override it
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Worker thread cap (output is independent of this)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output file (stdout when omitted)
    #[arg(short = 'o', long, global = true, value_name = "PATH")]
    output: Option<PathBuf>,

    /// Output format: csv or json (verify always emits json)
    #[arg(long, global = true)]
    format: Option<String>,

    /// Echo the fully resolved run configuration and exit
    #[arg(long, global = true)]
    print_config: bool,

    /// Also write a small SVG line chart of the resulting curve
    #[arg(long, global = true, value_name = "PATH")]
    svg: Option<PathBuf>,

    /// Noise coupling across p via one uniform per vertex. This is the only
    /// noise construction; the flag is accepted for config compatibility.
    #[arg(long, global = true)]
    coupled_uniform: bool,

    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Args, Debug, Default)]
struct CommonOpts {
    /// Neighbourhood offsets, e.g. -U -1,0,1 (repeat for several in `bounds`)
    #[arg(
        short = 'U',
        long = "neighborhood",
        value_name = "OFFSETS",
        allow_hyphen_values = true
    )]
    u: Vec<String>,

    /// Master seed (required for stochastic commands; no wall-clock default)
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum CliCommand {
    /// Analytic lower bounds p1 and p2 per neighbourhood
    Bounds {
        #[command(flatten)]
        common: CommonOpts,
        /// Also solve p2 with the alternate phi exponent (debug column)
        #[arg(long)]
        phi_exponent_debug: bool,
    },
    /// Mean absorption time of the ring at one (n, p)
    Simulate {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        n: Option<i64>,
        #[arg(long)]
        p: Option<f64>,
        #[arg(long)]
        replicas: Option<u64>,
        #[arg(long = "t-max")]
        t_max: Option<u64>,
    },
    /// Survival probability of the origin over a p-grid
    Sweep {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        n: Option<i64>,
        /// Time horizon T
        #[arg(long = "T", visible_alias = "t-end")]
        t_end: Option<u64>,
        /// Replicas R
        #[arg(long = "R", visible_alias = "replicas")]
        replicas: Option<u64>,
        /// Grid start:stop:step (inclusive) or explicit comma list
        #[arg(long = "p-grid")]
        p_grid: Option<String>,
        /// Use the published-experiment scale (n=T=100000, R=2000)
        #[arg(long)]
        full_scale: bool,
    },
    /// Absorption-time scaling over system sizes, with regime classification
    TauScaling {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        p: Option<f64>,
        /// Comma-separated ascending half-widths, e.g. 8,16,32
        #[arg(long = "n-list")]
        n_list: Option<String>,
        #[arg(long)]
        replicas: Option<u64>,
        #[arg(long = "t-max")]
        t_max: Option<u64>,
    },
    /// Edge-speed difference over a p-grid, with the sign-change estimate
    GammaScan {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long = "p-grid")]
        p_grid: Option<String>,
        #[arg(long = "m-max")]
        m_max: Option<u64>,
        #[arg(long)]
        replicas: Option<u64>,
    },
    /// Subcritical survival decay fit over cluster depths
    Decay {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        p: Option<f64>,
        /// Comma-separated ascending depths, e.g. 2,4,...,20
        #[arg(long = "m-list")]
        m_list: Option<String>,
        #[arg(long)]
        replicas: Option<u64>,
    },
    /// Run the exact oracle suite and emit a JSON pass/fail report
    Verify {
        #[command(flatten)]
        common: CommonOpts,
    },
}

fn main() {
    std::process::exit(real_main());
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };

    let file = match &cli.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => match ConfigFile::parse(&text) {
                Ok(f) => f,
                Err(e) => return usage_error(&e),
            },
            Err(e) => return usage_error(&format!("cannot read config {}: {e}", path.display())),
        },
        None => ConfigFile::default(),
    };

    let cfg = match resolve(&cli, &file) {
        Ok(cfg) => cfg,
        Err(e) => return usage_error(&e),
    };

    if cli.print_config {
        print!("{}", render_config(&cfg));
        return EXIT_OK;
    }

    let run = || execute(&cfg);
    let outcome = match cfg.threads {
        Some(t) => {
            let pool = match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: cannot build thread pool: {e}");
                    return EXIT_RUNTIME;
                }
            };
            pool.install(run)
        }
        None => run(),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_RUNTIME
        }
    }
}

fn usage_error(msg: &str) -> i32 {
    eprintln!("error: {msg}");
    EXIT_USAGE
}

fn resolve(cli: &Cli, file: &ConfigFile) -> Result<RunConfig, String> {
    let threads = match cli.threads {
        Some(t) => Some(t),
        None => file
            .get("threads")
            .map(|s| s.parse::<usize>().map_err(|_| format!("bad threads '{s}'")))
            .transpose()?,
    };
    if let Some(0) = threads {
        return Err("threads must be >= 1".into());
    }
    let output = cli
        .output
        .clone()
        .or_else(|| file.get("output").map(PathBuf::from));
    let format = match &cli.format {
        Some(s) => Format::parse(s)?,
        None => file
            .get("format")
            .map(Format::parse)
            .transpose()?
            .unwrap_or_default(),
    };

    let command = match &cli.command {
        CliCommand::Bounds {
            common,
            phi_exponent_debug,
        } => {
            let raw = raw_from(common);
            let r = Resolver { cli: &raw, file };
            let debug_file = file
                .get("phi-exponent-debug")
                .map(parse_bool)
                .transpose()?
                .unwrap_or(false);
            Command::Bounds {
                neighborhoods: r.neighborhood_list()?,
                phi_exponent_debug: *phi_exponent_debug || debug_file,
            }
        }
        CliCommand::Simulate {
            common,
            n,
            p,
            replicas,
            t_max,
        } => {
            let mut raw = raw_from(common);
            raw.n = *n;
            raw.p = *p;
            raw.replicas = *replicas;
            raw.t_max = *t_max;
            let r = Resolver { cli: &raw, file };
            Command::Simulate {
                u: r.neighborhood()?,
                n: r.pos_i64(raw.n, "n", None)?,
                p: r.p()?,
                replicas: r.pos_u64(raw.replicas, "replicas", Some(200))?,
                t_max: r.pos_u64(raw.t_max, "t-max", Some(1_000_000))?,
                seed: r.seed()?,
            }
        }
        CliCommand::Sweep {
            common,
            n,
            t_end,
            replicas,
            p_grid,
            full_scale,
        } => {
            let mut raw = raw_from(common);
            raw.n = *n;
            raw.t_end = *t_end;
            raw.r = *replicas;
            raw.p_grid = p_grid.clone();
            raw.full_scale = *full_scale;
            let r = Resolver { cli: &raw, file };
            let (dn, dt, dr) = if r.full_scale()? {
                (SWEEP_FULL_N, SWEEP_FULL_T, SWEEP_FULL_R)
            } else {
                (SWEEP_DEFAULT_N, SWEEP_DEFAULT_T, SWEEP_DEFAULT_R)
            };
            Command::Sweep {
                u: r.neighborhood()?,
                n: r.pos_i64(raw.n, "n", Some(dn))?,
                t_end: r.pos_u64(raw.t_end, "t", Some(dt))?,
                replicas: r.pos_u64(raw.r, "r", Some(dr))?,
                p_grid: r.p_grid("0.45:0.65:0.005")?,
                seed: r.seed()?,
            }
        }
        CliCommand::TauScaling {
            common,
            p,
            n_list,
            replicas,
            t_max,
        } => {
            let mut raw = raw_from(common);
            raw.p = *p;
            raw.n_list = n_list.clone();
            raw.replicas = *replicas;
            raw.t_max = *t_max;
            let r = Resolver { cli: &raw, file };
            Command::TauScaling {
                u: r.neighborhood()?,
                p: r.p()?,
                n_list: r.n_list("8,16,32,64,128,256")?,
                replicas: r.pos_u64(raw.replicas, "replicas", Some(64))?,
                t_max: r.pos_u64(raw.t_max, "t-max", Some(1_000_000))?,
                seed: r.seed()?,
            }
        }
        CliCommand::GammaScan {
            common,
            p_grid,
            m_max,
            replicas,
        } => {
            let mut raw = raw_from(common);
            raw.p_grid = p_grid.clone();
            raw.m_max = *m_max;
            raw.replicas = *replicas;
            let r = Resolver { cli: &raw, file };
            Command::GammaScan {
                u: r.neighborhood()?,
                p_grid: r.p_grid("0.5:0.9:0.05")?,
                m_max: r.pos_u64(raw.m_max, "m-max", Some(400))?,
                replicas: r.pos_u64(raw.replicas, "replicas", Some(200))?,
                seed: r.seed()?,
            }
        }
        CliCommand::Decay {
            common,
            p,
            m_list,
            replicas,
        } => {
            let mut raw = raw_from(common);
            raw.p = *p;
            raw.m_list = m_list.clone();
            raw.replicas = *replicas;
            let r = Resolver { cli: &raw, file };
            Command::Decay {
                u: r.neighborhood()?,
                p: r.p()?,
                m_list: r.m_list("2,4,6,8,10,12,14,16,18,20")?,
                replicas: r.pos_u64(raw.replicas, "replicas", Some(2000))?,
                seed: r.seed()?,
            }
        }
        CliCommand::Verify { common } => {
            let raw = raw_from(common);
            let r = Resolver { cli: &raw, file };
            Command::Verify {
                seed: r.seed().unwrap_or_else(|_| default_verify_seed()),
            }
        }
    };
    let svg = cli
        .svg
        .clone()
        .or_else(|| file.get("svg").map(PathBuf::from));
    if svg.is_some()
        && !matches!(
            command,
            Command::Sweep { .. }
                | Command::GammaScan { .. }
                | Command::TauScaling { .. }
                | Command::Decay { .. }
        )
    {
        return Err("--svg only applies to curve-producing commands (sweep, gamma-scan, tau-scaling, decay)".into());
    }
    Ok(RunConfig {
        command,
        threads,
        output,
        format,
        svg,
    })
}

fn raw_from(common: &CommonOpts) -> RawOptions {
    RawOptions {
        u: common.u.clone(),
        seed: common.seed,
        ..RawOptions::default()
    }
}

fn execute(cfg: &RunConfig) -> Result<i32, String> {
    match &cfg.command {
        Command::Bounds {
            neighborhoods,
            phi_exponent_debug,
        } => {
            let rows = bounds_table(neighborhoods, *phi_exponent_debug).map_err(stringify)?;
            emit(cfg, bounds_csv(&rows), || {
                serde_json::to_string_pretty(&rows)
            })?;
            Ok(EXIT_OK)
        }
        Command::Simulate {
            u,
            n,
            p,
            replicas,
            t_max,
            seed,
        } => {
            let est = estimate_mean_tau(*n, u, *p, *replicas, *seed, *t_max).map_err(stringify)?;
            let pt = SimulatePoint {
                neighborhood: u.to_string(),
                n: *n,
                p: *p,
                t_max: *t_max,
                master_seed: *seed,
                estimate: &est,
            };
            emit(cfg, simulate_csv(&pt), || {
                serde_json::to_string_pretty(&est)
            })?;
            Ok(EXIT_OK)
        }
        Command::Sweep {
            u,
            n,
            t_end,
            replicas,
            p_grid,
            seed,
        } => {
            let curve = p_sweep(u, *n, *t_end, *replicas, p_grid, *seed).map_err(stringify)?;
            write_svg(cfg, "survival probability", || {
                curve.rows.iter().map(|r| (r.p, r.p_hat)).collect()
            })?;
            emit(cfg, survival_csv(&curve), || {
                serde_json::to_string_pretty(&curve)
            })?;
            Ok(EXIT_OK)
        }
        Command::TauScaling {
            u,
            p,
            n_list,
            replicas,
            t_max,
            seed,
        } => {
            let table = tau_scaling(u, *p, n_list, *replicas, *t_max, *seed).map_err(stringify)?;
            write_svg(cfg, "mean absorption time", || {
                table
                    .rows
                    .iter()
                    .filter_map(|r| r.mean_tau.map(|m| (r.n as f64, m)))
                    .collect()
            })?;
            emit(cfg, scaling_csv(&table), || {
                serde_json::to_string_pretty(&table)
            })?;
            Ok(EXIT_OK)
        }
        Command::GammaScan {
            u,
            p_grid,
            m_max,
            replicas,
            seed,
        } => {
            let scan = gamma_scan(u, p_grid, *m_max, *replicas, *seed).map_err(stringify)?;
            write_svg(cfg, "edge-speed difference", || {
                scan.rows.iter().map(|r| (r.p, r.gamma_hat)).collect()
            })?;
            emit(cfg, gamma_csv(&scan), || {
                serde_json::to_string_pretty(&scan)
            })?;
            Ok(EXIT_OK)
        }
        Command::Decay {
            u,
            p,
            m_list,
            replicas,
            seed,
        } => {
            let fit = subcritical_decay(u, *p, m_list, *replicas, *seed).map_err(stringify)?;
            write_svg(cfg, "origin survival", || {
                fit.rows.iter().map(|r| (r.m as f64, r.p_hat)).collect()
            })?;
            emit(cfg, decay_csv(&fit), || serde_json::to_string_pretty(&fit))?;
            Ok(EXIT_OK)
        }
        Command::Verify { seed } => {
            let report = run_verify(*seed).map_err(stringify)?;
            let ok = all_pass(&report);
            let json = serde_json::to_string_pretty(&report).map_err(|e| e.to_string())? + "\n";
            write_output(cfg, &json)?;
            for (name, c) in &report {
                eprintln!("{name}: {}", if c.pass { "pass" } else { "FAIL" });
            }
            Ok(if ok { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
    }
}

fn stringify(e: percpca_core::Error) -> String {
    e.to_string()
}

fn write_svg(
    cfg: &RunConfig,
    title: &str,
    points: impl FnOnce() -> Vec<(f64, f64)>,
) -> Result<(), String> {
    if let Some(path) = &cfg.svg {
        let chart = line_chart_svg(title, &points());
        std::fs::write(path, chart).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(())
}

fn emit(
    cfg: &RunConfig,
    csv: String,
    json: impl FnOnce() -> serde_json::Result<String>,
) -> Result<(), String> {
    let text = match cfg.format {
        Format::Csv => csv,
        Format::Json => json().map_err(|e| e.to_string())? + "\n",
    };
    write_output(cfg, &text)
}

fn write_output(cfg: &RunConfig, text: &str) -> Result<(), String> {
    match &cfg.output {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| format!("cannot write stdout: {e}"))
        }
    }
}
