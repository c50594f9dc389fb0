use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use drccp::experiments::{
    demand_scenarios, kde_compare, run_motivating, solve_supply_chain, KdeCompareConfig,
    MotivatingConfig, ScMethod, SupplyChainConfig,
};
use drccp::gan::{sample, train_gan, GanConfig};
use drccp::io::{
    emit_kde_comparison, emit_report, emit_solve_result, emit_training_trace, load_dataset,
    load_instance, load_model, save_dataset, save_model, write_algorithm_report, ReportFormat,
};
use drccp::saa::{BigMRule, GapMode, SaaParams};
use drccp::scenarios::ObjectiveSense;
use drccp::supply_chain::{
    count_model_size, desk_instance, simulate, DesignDecision, SupplyChainInstance,
};

mod usage;
use usage::UsageError;

#[derive(Parser)]
#[command(
    name = "drccp",
    version,
    about = "GAN-driven distributionally robust chance constrained programming"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Master seed; required by every stochastic command.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// TOML file with `[gan]`, `[saa]`, `[instance]` and `[demand]` tables.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Also draw SVG charts from the emitted CSV tables.
    #[arg(long, global = true)]
    svg: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Train a GAN on a CSV data set and save the model.
    Train {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        max_epochs: Option<usize>,
        #[arg(long)]
        batch_size: Option<usize>,
        /// Clamp generated values at zero.
        #[arg(long)]
        nonnegative: bool,
    },
    /// Draw samples from a saved model.
    Sample {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, short)]
        n: usize,
    },
    /// Masked-mixture experiment comparing KDE and GAN samples.
    KdeCompare {
        #[arg(long, default_value_t = 200)]
        n_data: usize,
        #[arg(long, default_value_t = 200)]
        n_generated: usize,
    },
    /// Three-variable chance constrained example through the bounding algorithm.
    Motivating {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        n_prime: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        h: Option<usize>,
        #[arg(long)]
        gamma: Option<f64>,
        /// Maximize x1 + x2 + x3 instead of minimizing it.
        #[arg(long)]
        maximize: bool,
        #[arg(long, value_enum)]
        gap: Option<GapArg>,
        #[arg(long, value_enum)]
        big_m: Option<BigMArg>,
    },
    /// Solve the supply-chain design model.
    ScSolve {
        #[arg(long, value_enum)]
        method: MethodArg,
        /// Instance TOML; defaults to the bundled desk instance.
        #[arg(long)]
        instance: Option<PathBuf>,
        /// Demand history CSV, one column per (customer, period).
        #[arg(long)]
        history: Option<PathBuf>,
        /// Number of GAN demand scenarios.
        #[arg(long)]
        n_samples: Option<usize>,
        #[arg(long)]
        gamma: Option<f64>,
    },
    /// Operate a fixed design against demand realizations.
    ScSimulate {
        /// `design.json` written by sc-solve.
        #[arg(long)]
        design: PathBuf,
        #[arg(long)]
        instance: Option<PathBuf>,
        /// Realizations CSV; defaults to fresh draws of the bundled demand process.
        #[arg(long)]
        demand: Option<PathBuf>,
        #[arg(long, default_value_t = 100)]
        realizations: usize,
    },
    /// Model size of the joint SAA supply-chain model.
    ScSize {
        #[arg(long)]
        instance: Option<PathBuf>,
        /// Counts I,J,K,R,T (overrides the instance).
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        #[arg(long, short, default_value_t = 50)]
        n: usize,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum MethodArg {
    Deterministic,
    TwoStage,
    Drccp,
}

impl From<MethodArg> for ScMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Deterministic => ScMethod::Deterministic,
            MethodArg::TwoStage => ScMethod::TwoStage,
            MethodArg::Drccp => ScMethod::Drccp,
        }
    }
}

#[derive(Copy, Clone, ValueEnum)]
enum GapArg {
    Relative,
    Absolute,
}

#[derive(Copy, Clone, ValueEnum)]
enum BigMArg {
    Literal,
    BoundBased,
}

#[derive(Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct RunConfig {
    gan: Option<GanConfig>,
    saa: Option<SaaParams>,
    instance: Option<SupplyChainInstance>,
    demand: Option<drccp::supply_chain::DemandProcess>,
}

impl Common {
    fn seed(&self, command: &str) -> Result<u64> {
        self.seed
            .ok_or_else(|| UsageError(format!("{command} is stochastic and needs --seed")).into())
    }

    fn format(&self) -> ReportFormat {
        if self.svg {
            ReportFormat::Svg
        } else {
            ReportFormat::Csv
        }
    }

    fn run_config(&self) -> Result<RunConfig> {
        match &self.config {
            None => Ok(RunConfig::default()),
            Some(p) => {
                let text = fs::read_to_string(p).map_err(drccp::Error::from)?;
                toml::from_str(&text)
                    .map_err(|e| drccp::Error::Serde(e.to_string()))
                    .with_context(|| format!("reading config {}", p.display()))
            }
        }
    }

    fn out_dir(&self) -> Result<&Path> {
        fs::create_dir_all(&self.out)
            .map_err(drccp::Error::from)
            .with_context(|| format!("creating output directory {}", self.out.display()))?;
        Ok(&self.out)
    }
}

fn instance(path: &Option<PathBuf>, cfg: &RunConfig) -> Result<SupplyChainInstance> {
    Ok(match (path, &cfg.instance) {
        (Some(p), _) => {
            load_instance(p).with_context(|| format!("loading instance {}", p.display()))?
        }
        (None, Some(i)) => {
            i.validate()?;
            i.clone()
        }
        (None, None) => desk_instance(),
    })
}

fn write_json<T: serde::Serialize>(value: &T, path: &Path) -> Result<()> {
    let text =
        serde_json::to_string_pretty(value).map_err(|e| drccp::Error::Serde(e.to_string()))?;
    fs::write(path, text + "\n").map_err(drccp::Error::from)?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let common = cli.common;
    let cfg = common.run_config()?;
    match cli.command {
        Command::Train {
            data,
            max_epochs,
            batch_size,
            nonnegative,
        } => {
            let seed = common.seed("train")?;
            let data =
                load_dataset(&data).with_context(|| format!("loading {}", data.display()))?;
            let mut gan = cfg.gan.unwrap_or_default();
            gan.seed_a = drccp::seed::derive_seed(seed, &[1]);
            gan.seed_b = drccp::seed::derive_seed(seed, &[2]);
            if let Some(e) = max_epochs {
                gan.max_epochs = e;
            }
            if let Some(b) = batch_size {
                gan.batch_size = b;
            }
            gan.nonnegative |= nonnegative;
            let model = train_gan(&data, &gan)?;
            let dir = common.out_dir()?;
            save_model(&model, dir.join("model.json"))?;
            emit_training_trace(&model.trace, dir, common.format())?;
            println!(
                "trained {} epochs, twin ratio stop {}; model written to {}",
                model.trace.stopped_epoch,
                if model.trace.converged {
                    "reached"
                } else {
                    "not reached"
                },
                dir.join("model.json").display()
            );
        }
        Command::Sample { model, n } => {
            let seed = common.seed("sample")?;
            let model =
                load_model(&model).with_context(|| format!("loading {}", model.display()))?;
            let data = sample(&model, n, seed)?;
            let path = common.out_dir()?.join("samples.csv");
            save_dataset(&data, &path)?;
            println!("{n} samples written to {}", path.display());
        }
        Command::KdeCompare {
            n_data,
            n_generated,
        } => {
            let config = KdeCompareConfig {
                n_data,
                n_generated,
                seed: common.seed("kde-compare")?,
                gan: cfg.gan.unwrap_or_default(),
            };
            let cmp = kde_compare(&config)?;
            emit_kde_comparison(&cmp, common.out_dir()?, common.format())?;
            let s = cmp.summary;
            println!("fraction inside the masked square");
            println!("  original {:.3}", s.original);
            println!("  kde      {:.3}", s.kde);
            println!("  gan      {:.3}", s.gan);
        }
        Command::Motivating {
            n,
            n_prime,
            m,
            h,
            gamma,
            maximize,
            gap,
            big_m,
        } => {
            let mut config = MotivatingConfig {
                seed: common.seed("motivating")?,
                ..MotivatingConfig::default()
            };
            if let Some(g) = cfg.gan {
                config.gan = g;
            }
            if let Some(s) = cfg.saa {
                config.saa = s;
            }
            if maximize {
                config.sense = ObjectiveSense::Maximize;
                config.saa.big_m_rule = BigMRule::BoundBased;
            }
            let saa = &mut config.saa;
            saa.n = n.unwrap_or(saa.n);
            saa.n_prime = n_prime.unwrap_or(saa.n_prime);
            saa.m = m.unwrap_or(saa.m);
            saa.h = h.unwrap_or(saa.h);
            saa.gamma = gamma.or(saa.gamma);
            if let Some(g) = gap {
                saa.gap_mode = match g {
                    GapArg::Relative => GapMode::Relative,
                    GapArg::Absolute => GapMode::Absolute,
                };
            }
            if let Some(b) = big_m {
                saa.big_m_rule = match b {
                    BigMArg::Literal => BigMRule::Literal,
                    BigMArg::BoundBased => BigMRule::BoundBased,
                };
            }
            let run = run_motivating(&config)?;
            let dir = common.out_dir()?;
            save_dataset(&run.history, dir.join("history.csv"))?;
            emit_training_trace(&run.gan.trace, dir, common.format())?;
            write_algorithm_report(&run.report, dir)?;
            let r = &run.report;
            println!("status        {:?}", r.status);
            println!("upper bound g {}", r.upper_bound);
            println!("lower bound v {}", r.lower_bound);
            println!("gap           {} ({:?})", r.gap, r.gap_mode);
            println!(
                "alpha'        {}  gamma {}  theta_N {}  L {}",
                r.alpha_prime, r.gamma, r.theta_n, r.l
            );
            if let Some(x) = &r.best_solution {
                println!("x             {x:?}");
            }
        }
        Command::ScSolve {
            method,
            instance: inst_path,
            history,
            n_samples,
            gamma,
        } => {
            let mut config = SupplyChainConfig {
                seed: common.seed("sc-solve")?,
                instance: instance(&inst_path, &cfg)?,
                ..SupplyChainConfig::default()
            };
            if let Some(g) = cfg.gan {
                config.gan = g;
            }
            if let Some(d) = cfg.demand {
                config.demand = d;
            }
            if let Some(s) = cfg.saa {
                config.milp = s.milp;
            }
            config.n_samples = n_samples.unwrap_or(config.n_samples);
            config.gamma = gamma.or(config.gamma);
            let history = match history {
                Some(p) => load_dataset(&p).with_context(|| format!("loading {}", p.display()))?,
                None => config.history()?,
            };
            let (gan, scenarios) = demand_scenarios(&config, &history)?;
            let method: ScMethod = method.into();
            let result = solve_supply_chain(&config, method, &scenarios)?;
            let dir = common.out_dir()?;
            let stem = format!("{}_", method.name());
            save_dataset(&scenarios, dir.join("scenarios.csv"))?;
            emit_training_trace(&gan.trace, dir, common.format())?;
            emit_solve_result(&result, &config.instance, dir, &stem, common.format())?;
            write_json(&result.design, &dir.join(format!("{stem}design.json")))?;
            write_json(&result, &dir.join(format!("{stem}result.json")))?;
            println!(
                "{} total cost {:.4} ({:?})",
                method.name(),
                result.total_cost,
                result.solver_status
            );
            for (k, v) in result.breakdown.entries() {
                println!("  {k:<18} {v:.4}");
            }
            println!("  external units     {:.4}", result.total_external());
        }
        Command::ScSimulate {
            design,
            instance: inst_path,
            demand,
            realizations,
        } => {
            let inst = instance(&inst_path, &cfg)?;
            let text = fs::read_to_string(&design).map_err(drccp::Error::from)?;
            let design: DesignDecision =
                serde_json::from_str(&text).map_err(|e| drccp::Error::Serde(e.to_string()))?;
            let rows: Vec<Vec<f64>> = match demand {
                Some(p) => load_dataset(&p)?.iter().map(<[f64]>::to_vec).collect(),
                None => {
                    let config = SupplyChainConfig {
                        seed: common.seed("sc-simulate")?,
                        demand: cfg
                            .demand
                            .unwrap_or_else(drccp::supply_chain::DemandProcess::desk),
                        ..SupplyChainConfig::default()
                    };
                    config.holdout(realizations)?
                }
            };
            let milp = cfg.saa.map(|s| s.milp).unwrap_or_default();
            let report = simulate(&design, &inst, &rows, &milp)?;
            emit_report(&report, common.out_dir()?, "", common.format())?;
            println!("scenarios            {}", report.scenarios.len());
            println!("average cost         {:.4}", report.average_cost);
            println!("average external     {:.4}", report.average_external);
            println!("scenarios w/ external {}", report.external_count);
        }
        Command::ScSize {
            instance: inst_path,
            dims,
            n,
        } => {
            let mut inst = instance(&inst_path, &cfg)?;
            if let Some(d) = dims {
                if d.len() != 5 || d.contains(&0) {
                    return Err(
                        UsageError("--dims takes five positive counts I,J,K,R,T".into()).into(),
                    );
                }
                (
                    inst.sites,
                    inst.customers,
                    inst.suppliers,
                    inst.levels,
                    inst.periods,
                ) = (d[0], d[1], d[2], d[3], d[4]);
            }
            let size = count_model_size(&inst, n);
            println!("binaries {}", size.binaries);
            println!("continuous {}", size.continuous);
            println!("rows {}", size.rows);
            let ds = drccp::Dataset::new(
                vec!["binaries".into(), "continuous".into(), "rows".into()],
                drccp::Matrix::from_rows(&[vec![
                    size.binaries as f64,
                    size.continuous as f64,
                    size.rows as f64,
                ]])?,
            )?;
            save_dataset(&ds, common.out_dir()?.join("size.csv"))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            if usage::is_structured(&e) {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
        Err(_) => ExitCode::from(2),
    }
}
