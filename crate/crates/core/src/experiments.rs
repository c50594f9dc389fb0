//! End-to-end runs of the bundled experiments, shared by the CLI, the
//! acceptance tests and the browser demo.

use serde::{Deserialize, Serialize};

use crate::ambiguity::{modified_risk, AmbiguityParams};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::gan::{sample, train_gan, GanConfig, GanModel};
use crate::kde::{fit_kde, kde_sample, KdeModel};
use crate::milp::{solve_milp, MilpOptions};
use crate::saa::{run_algorithm, AlgorithmReport, BigMRule, CcpModel, GapMode, SaaParams};
use crate::scenarios::{
    inside_mask, missing_data_mixture, motivating_mixture, motivating_spec, ObjectiveSense,
    MASK_LOWER, MASK_UPPER,
};
use crate::seed::derive_seed;
use crate::supply_chain::{
    build_deterministic, build_saa_drccp, build_two_stage, desk_instance, extract_result,
    ChanceMode, DemandProcess, SolveResult, SupplyChainInstance,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KdeCompareConfig {
    /// Points drawn from the mixture before masking.
    pub n_data: usize,
    /// Points generated by each fitted model.
    pub n_generated: usize,
    pub seed: u64,
    pub gan: GanConfig,
}

impl Default for KdeCompareConfig {
    fn default() -> Self {
        Self {
            n_data: 200,
            n_generated: 200,
            seed: 0,
            gan: GanConfig::default(),
        }
    }
}

pub struct KdeComparison {
    pub original: Dataset,
    pub masked: Dataset,
    pub kde: KdeModel,
    pub gan: GanModel,
    pub kde_samples: Dataset,
    pub gan_samples: Dataset,
    pub summary: KdeCompareSummary,
}

/// Fractions of each point set inside the masked square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KdeCompareSummary {
    pub original: f64,
    pub kde: f64,
    pub gan: f64,
    pub gan_stopped_epoch: usize,
    pub gan_converged: bool,
}

/// Samples the mixture, deletes every point inside the mask, fits KDE and a
/// GAN to the remainder and measures how much generated mass each puts back
/// inside the mask.
pub fn kde_compare(config: &KdeCompareConfig) -> Result<KdeComparison> {
    let original = missing_data_mixture().sample(config.n_data, derive_seed(config.seed, &[0]))?;
    let masked = original.filter(|r| !inside_mask(r));
    let kde = fit_kde(&masked)?;
    let gan_config = GanConfig {
        seed_a: derive_seed(config.seed, &[1]),
        seed_b: derive_seed(config.seed, &[2]),
        ..config.gan.clone()
    };
    let gan = train_gan(&masked, &gan_config)?;
    let kde_samples = kde_sample(&kde, config.n_generated, derive_seed(config.seed, &[3]));
    let gan_samples = sample(&gan, config.n_generated, derive_seed(config.seed, &[4]))?;
    let summary = KdeCompareSummary {
        original: original.fraction_inside(&MASK_LOWER, &MASK_UPPER),
        kde: kde_samples.fraction_inside(&MASK_LOWER, &MASK_UPPER),
        gan: gan_samples.fraction_inside(&MASK_LOWER, &MASK_UPPER),
        gan_stopped_epoch: gan.trace.stopped_epoch,
        gan_converged: gan.trace.converged,
    };
    Ok(KdeComparison {
        original,
        masked,
        kde,
        gan,
        kde_samples,
        gan_samples,
        summary,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MotivatingConfig {
    /// Size of the historical data set the GAN learns from.
    pub n_history: usize,
    pub sense: ObjectiveSense,
    pub seed: u64,
    pub gan: GanConfig,
    pub saa: SaaParams,
}

impl Default for MotivatingConfig {
    fn default() -> Self {
        Self {
            n_history: 200,
            sense: ObjectiveSense::Minimize,
            seed: 0,
            gan: GanConfig::default(),
            saa: SaaParams {
                n: 200,
                m: 20,
                h: 5,
                gap_mode: GapMode::Absolute,
                big_m_rule: BigMRule::Literal,
                ..SaaParams::default()
            },
        }
    }
}

pub struct MotivatingRun {
    pub history: Dataset,
    pub gan: GanModel,
    pub model: CcpModel,
    pub report: AlgorithmReport,
}

/// Learns the uncertainty from synthetic history with a GAN and runs the
/// bounding algorithm on the three-variable example with scenarios drawn
/// from the generator.
pub fn run_motivating(config: &MotivatingConfig) -> Result<MotivatingRun> {
    let history = motivating_mixture().sample(config.n_history, derive_seed(config.seed, &[0]))?;
    let gan_config = GanConfig {
        seed_a: derive_seed(config.seed, &[1]),
        seed_b: derive_seed(config.seed, &[2]),
        ..config.gan.clone()
    };
    let gan = train_gan(&history, &gan_config)?;
    let model = CcpModel {
        spec: motivating_spec(config.sense),
        rule: config.saa.big_m_rule,
    };
    let params = SaaParams {
        seed: derive_seed(config.seed, &[3]),
        ..config.saa.clone()
    };
    let report = run_algorithm(&model, &gan, &params)?;
    Ok(MotivatingRun {
        history,
        gan,
        model,
        report,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScMethod {
    /// Hard demand rows at the scenario mean.
    Deterministic,
    /// Equally weighted scenarios with recourse.
    TwoStage,
    /// Joint chance constraint at the modified risk level.
    Drccp,
}

impl ScMethod {
    pub const ALL: [ScMethod; 3] = [ScMethod::Deterministic, ScMethod::TwoStage, ScMethod::Drccp];

    pub fn name(self) -> &'static str {
        match self {
            ScMethod::Deterministic => "deterministic",
            ScMethod::TwoStage => "two-stage",
            ScMethod::Drccp => "drccp",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SupplyChainConfig {
    pub instance: SupplyChainInstance,
    /// Years of synthetic history when no history file is supplied.
    pub n_history: usize,
    /// Scenarios generated by the GAN for the stochastic models.
    pub n_samples: usize,
    /// SAA risk level; `None` uses the modified risk level.
    pub gamma: Option<f64>,
    pub chance_mode: ChanceMode,
    pub demand: DemandProcess,
    pub gan: GanConfig,
    pub milp: MilpOptions,
    pub seed: u64,
}

impl Default for SupplyChainConfig {
    fn default() -> Self {
        Self {
            instance: desk_instance(),
            n_history: 30,
            n_samples: 30,
            gamma: None,
            chance_mode: ChanceMode::Joint,
            demand: DemandProcess::desk(),
            gan: GanConfig {
                nonnegative: true,
                batch_size: 10,
                ..GanConfig::default()
            },
            milp: MilpOptions::default(),
            seed: 0,
        }
    }
}

impl SupplyChainConfig {
    pub fn history(&self) -> Result<Dataset> {
        self.demand
            .sample(self.n_history, derive_seed(self.seed, &[0]))
    }

    /// Held-out demand realizations from the generating process, independent
    /// of the history and of the GAN scenarios.
    pub fn holdout(&self, n: usize) -> Result<Vec<Vec<f64>>> {
        Ok(self
            .demand
            .sample(n, derive_seed(self.seed, &[9]))?
            .iter()
            .map(<[f64]>::to_vec)
            .collect())
    }

    pub fn gamma(&self) -> Result<f64> {
        match self.gamma {
            Some(g) => Ok(g),
            None => Ok(modified_risk(&AmbiguityParams::new(
                self.instance.alpha,
                self.instance.d,
            )?)),
        }
    }
}

/// Trains the demand GAN on `history` and draws the scenario set.
pub fn demand_scenarios(
    config: &SupplyChainConfig,
    history: &Dataset,
) -> Result<(GanModel, Dataset)> {
    let gan_config = GanConfig {
        seed_a: derive_seed(config.seed, &[1]),
        seed_b: derive_seed(config.seed, &[2]),
        ..config.gan.clone()
    };
    let gan = train_gan(history, &gan_config)?;
    let samples = sample(&gan, config.n_samples, derive_seed(config.seed, &[3]))?;
    Ok((gan, samples))
}

/// Builds and solves one of the three supply-chain models on `scenarios`.
pub fn solve_supply_chain(
    config: &SupplyChainConfig,
    method: ScMethod,
    scenarios: &Dataset,
) -> Result<SolveResult> {
    let inst = &config.instance;
    inst.validate()?;
    if scenarios.is_empty() {
        return Err(Error::invalid("at least one demand scenario is required"));
    }
    let (problem, layout, weights) = match method {
        ScMethod::Deterministic => {
            let (p, l) = build_deterministic(inst, &scenarios.column_means())?;
            (p, l, vec![1.0])
        }
        ScMethod::TwoStage => {
            let w = vec![1.0 / scenarios.len() as f64; scenarios.len()];
            let (p, l) = build_two_stage(inst, scenarios, &w)?;
            (p, l, w)
        }
        ScMethod::Drccp => {
            let (p, l) = build_saa_drccp(inst, scenarios, config.gamma()?, config.chance_mode)?;
            (p, l, vec![1.0])
        }
    };
    let sol = solve_milp(&problem, &config.milp)?;
    if !sol.has_solution() {
        return Err(Error::numeric(format!(
            "{} model ended with solver status {:?}",
            method.name(),
            sol.status
        )));
    }
    extract_result(
        inst,
        &layout,
        &sol.values,
        &weights,
        sol.status,
        sol.bound_gap,
    )
}
