//! Sample average approximation of joint chance constraints, statistical
//! upper/lower bounds and the replicated bounding loop around them.

use serde::{Deserialize, Serialize};

use crate::ambiguity::{modified_risk, AmbiguityParams};
use crate::dataset::{Dataset, Matrix};
use crate::error::{Error, Result};
use crate::gan::{self, GanModel};
use crate::kde::{kde_sample, KdeModel};
use crate::milp::{solve_milp, MilpOptions, MilpProblem, MilpStatus, Sense};
use crate::scenarios::Mixture;
use crate::seed::{derive_seed, rng_from_seed};
use crate::stats::{lower_bound_params, upper_confidence, violation_budget};

/// Absolute slack before a chance row counts as violated.
pub const VIOLATION_SLACK: f64 = 1e-9;

/// `a·x + b·ζ <= c`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChanceRow {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeterministicRow {
    pub a: Vec<f64>,
    pub sense: Sense,
    pub rhs: f64,
}

/// Linear program with a joint affine chance constraint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CcpSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub cost: Vec<f64>,
    pub chance_rows: Vec<ChanceRow>,
    #[serde(default)]
    pub deterministic_rows: Vec<DeterministicRow>,
    pub alpha: f64,
    pub d: f64,
}

impl CcpSpec {
    pub fn n(&self) -> usize {
        self.cost.len()
    }

    pub fn zeta_dim(&self) -> usize {
        self.chance_rows.first().map_or(0, |r| r.b.len())
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if self.lower.len() != n || self.upper.len() != n {
            return Err(Error::Dimension {
                context: "CcpSpec bounds",
                expected: n,
                actual: self.lower.len().min(self.upper.len()),
            });
        }
        if self.chance_rows.is_empty() {
            return Err(Error::invalid(
                "joint chance constraint needs at least one row",
            ));
        }
        let k = self.zeta_dim();
        for row in &self.chance_rows {
            if row.a.len() != n {
                return Err(Error::Dimension {
                    context: "chance row a",
                    expected: n,
                    actual: row.a.len(),
                });
            }
            if row.b.len() != k {
                return Err(Error::Dimension {
                    context: "chance row b",
                    expected: k,
                    actual: row.b.len(),
                });
            }
        }
        for row in &self.deterministic_rows {
            if row.a.len() != n {
                return Err(Error::Dimension {
                    context: "deterministic row",
                    expected: n,
                    actual: row.a.len(),
                });
            }
        }
        AmbiguityParams::new(self.alpha, self.d)?;
        Ok(())
    }

    pub fn alpha_prime(&self) -> Result<f64> {
        Ok(modified_risk(&AmbiguityParams::new(self.alpha, self.d)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BigMRule {
    /// `M = b·ζⁿ`, clamped at 0; exact only for non-negative data whose
    /// ζ-free row is implied elsewhere.
    Literal,
    /// `M = max(0, sup_x a·x - c + b·ζⁿ)` over the variable box.
    #[default]
    BoundBased,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn row_sup(a: &[f64], lower: &[f64], upper: &[f64]) -> f64 {
    a.iter()
        .zip(lower.iter().zip(upper))
        .map(|(&ai, (&l, &u))| {
            if ai > 0.0 {
                ai * u
            } else if ai < 0.0 {
                ai * l
            } else {
                0.0
            }
        })
        .sum()
}

fn sparse(a: &[f64], offset: usize) -> Vec<(usize, f64)> {
    a.iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(j, v)| (j + offset, *v))
        .collect()
}

/// Big-M SAA reformulation. Columns `0..n` are `x`, then one binary `A_n`
/// per sample; the last row is the cardinality row.
pub fn build_saa(
    spec: &CcpSpec,
    samples: &Dataset,
    gamma: f64,
    rule: BigMRule,
) -> Result<MilpProblem> {
    spec.validate()?;
    if samples.dim() != spec.zeta_dim() {
        return Err(Error::Dimension {
            context: "SAA samples",
            expected: spec.zeta_dim(),
            actual: samples.dim(),
        });
    }
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::invalid(format!(
            "gamma must lie in [0, 1), got {gamma}"
        )));
    }
    let n = spec.n();
    let mut p = MilpProblem::new();
    for j in 0..n {
        p.add_continuous(format!("x{j}"), spec.lower[j], spec.upper[j], spec.cost[j]);
    }
    let sups: Vec<f64> = spec
        .chance_rows
        .iter()
        .map(|r| row_sup(&r.a, &spec.lower, &spec.upper))
        .collect();
    if rule == BigMRule::BoundBased && sups.iter().any(|s| !s.is_finite()) {
        return Err(Error::invalid(
            "bound-based big-M needs finite variable bounds on every chance row; use literal or bound x",
        ));
    }
    let a_cols: Vec<usize> = (0..samples.len())
        .map(|s| p.add_binary(format!("A{s}"), 0.0))
        .collect();
    for (i, row) in spec.deterministic_rows.iter().enumerate() {
        p.add_row(format!("det{i}"), sparse(&row.a, 0), row.sense, row.rhs);
    }
    for (s, zeta) in samples.iter().enumerate() {
        for (r, row) in spec.chance_rows.iter().enumerate() {
            let bz = dot(&row.b, zeta);
            let big_m = match rule {
                BigMRule::Literal => bz.max(0.0),
                BigMRule::BoundBased => (sups[r] - row.c + bz).max(0.0),
            };
            let mut coeffs = sparse(&row.a, 0);
            if big_m != 0.0 {
                coeffs.push((a_cols[s], -big_m));
            }
            p.add_row(format!("cc{r}_{s}"), coeffs, Sense::Le, row.c - bz);
        }
    }
    let rhs = match rule {
        BigMRule::Literal => violation_budget(gamma, samples.len()) as f64,
        BigMRule::BoundBased => gamma * samples.len() as f64,
    };
    p.add_row(
        "cardinality",
        a_cols.iter().map(|&c| (c, 1.0)).collect(),
        Sense::Le,
        rhs,
    );
    Ok(p)
}

/// Fraction of samples violating at least one chance row at `x`.
pub fn violation_rate(spec: &CcpSpec, x: &[f64], samples: &Dataset) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::invalid("violation rate of an empty sample set"));
    }
    if x.len() != spec.n() {
        return Err(Error::Dimension {
            context: "violation_rate decision",
            expected: spec.n(),
            actual: x.len(),
        });
    }
    if samples.dim() != spec.zeta_dim() {
        return Err(Error::Dimension {
            context: "violation_rate samples",
            expected: spec.zeta_dim(),
            actual: samples.dim(),
        });
    }
    let bad = samples.iter().filter(|z| spec.violated(x, z)).count();
    Ok(bad as f64 / samples.len() as f64)
}

/// A chance-constrained model whose SAA can be built for any sample set.
pub trait SaaModel: Sync {
    fn zeta_dim(&self) -> usize;
    fn alpha_prime(&self) -> Result<f64>;
    fn build(&self, samples: &Dataset, gamma: f64) -> Result<MilpProblem>;
    /// Decision vector extracted from a MILP solution of `build`.
    fn decision(&self, values: &[f64]) -> Vec<f64>;
    fn violated(&self, x: &[f64], zeta: &[f64]) -> bool;
}

impl CcpSpec {
    pub fn violated(&self, x: &[f64], zeta: &[f64]) -> bool {
        self.chance_rows
            .iter()
            .any(|r| dot(&r.a, x) + dot(&r.b, zeta) - r.c > VIOLATION_SLACK)
    }
}

/// A spec paired with the big-M rule used to build its SAA.
#[derive(Debug, Clone, PartialEq)]
pub struct CcpModel {
    pub spec: CcpSpec,
    pub rule: BigMRule,
}

impl SaaModel for CcpModel {
    fn zeta_dim(&self) -> usize {
        self.spec.zeta_dim()
    }

    fn alpha_prime(&self) -> Result<f64> {
        self.spec.alpha_prime()
    }

    fn build(&self, samples: &Dataset, gamma: f64) -> Result<MilpProblem> {
        build_saa(&self.spec, samples, gamma, self.rule)
    }

    fn decision(&self, values: &[f64]) -> Vec<f64> {
        values[..self.spec.n()].to_vec()
    }

    fn violated(&self, x: &[f64], zeta: &[f64]) -> bool {
        self.spec.violated(x, zeta)
    }
}

/// Something that produces i.i.d. scenarios reproducibly from a seed.
pub trait ScenarioSource: Sync {
    fn dim(&self) -> usize;
    fn draw(&self, n: usize, seed: u64) -> Result<Dataset>;
}

impl ScenarioSource for GanModel {
    fn dim(&self) -> usize {
        self.data_dim()
    }

    fn draw(&self, n: usize, seed: u64) -> Result<Dataset> {
        gan::sample(self, n, seed)
    }
}

impl ScenarioSource for KdeModel {
    fn dim(&self) -> usize {
        KdeModel::dim(self)
    }

    fn draw(&self, n: usize, seed: u64) -> Result<Dataset> {
        Ok(kde_sample(self, n, seed))
    }
}

impl ScenarioSource for Mixture {
    fn dim(&self) -> usize {
        Mixture::dim(self)
    }

    fn draw(&self, n: usize, seed: u64) -> Result<Dataset> {
        self.sample(n, seed)
    }
}

/// Uniform resampling with replacement from a fixed population.
#[derive(Debug, Clone, PartialEq)]
pub struct Empirical(pub Dataset);

impl ScenarioSource for Empirical {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn draw(&self, n: usize, seed: u64) -> Result<Dataset> {
        use rand::Rng;
        if self.0.is_empty() {
            return Err(Error::invalid("cannot resample an empty population"));
        }
        let mut rng = rng_from_seed(seed);
        let d = self.0.dim();
        let mut out = Matrix::zeros(n, d);
        for r in 0..n {
            let k = rng.random_range(0..self.0.len());
            out.row_mut(r).copy_from_slice(self.0.row(k));
        }
        Dataset::new(self.0.names().to_vec(), out)
    }
}

/// Point mass at a fixed scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Constant(pub Vec<f64>);

impl ScenarioSource for Constant {
    fn dim(&self) -> usize {
        self.0.len()
    }

    fn draw(&self, n: usize, _seed: u64) -> Result<Dataset> {
        let data = self
            .0
            .iter()
            .copied()
            .cycle()
            .take(n * self.0.len())
            .collect();
        Ok(Dataset::from_matrix(Matrix::from_vec(
            n,
            self.0.len(),
            data,
        )?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum GapMode {
    /// `(g - v) / g`; requires `g > 0`.
    #[default]
    Relative,
    /// `g - v`.
    Absolute,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SaaParams {
    pub n: usize,
    pub n_prime: usize,
    pub m: usize,
    pub h: usize,
    /// Revised risk level of the SAA; `None` uses α'.
    pub gamma: Option<f64>,
    pub beta: f64,
    pub tol: f64,
    pub big_m_rule: BigMRule,
    pub gap_mode: GapMode,
    pub max_outer: usize,
    pub seed: u64,
    pub milp: MilpOptions,
}

impl Default for SaaParams {
    fn default() -> Self {
        Self {
            n: 200,
            n_prime: 1000,
            m: 20,
            h: 20,
            gamma: None,
            beta: 0.05,
            tol: 0.01,
            big_m_rule: BigMRule::BoundBased,
            gap_mode: GapMode::Relative,
            max_outer: 5,
            seed: 0,
            milp: MilpOptions::default(),
        }
    }
}

impl SaaParams {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n_prime == 0 || self.m == 0 || self.h == 0 || self.max_outer == 0 {
            return Err(Error::invalid(
                "N, N', M, H and max_outer must be at least 1",
            ));
        }
        if let Some(g) = self.gamma {
            if !(0.0..1.0).contains(&g) {
                return Err(Error::invalid(format!("gamma must lie in [0, 1), got {g}")));
            }
        }
        if !(self.beta > 0.0 && self.beta < 0.5) {
            return Err(Error::invalid(format!(
                "beta must lie in (0, 0.5), got {}",
                self.beta
            )));
        }
        if !(self.tol >= 0.0) {
            return Err(Error::invalid("tol must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationRecord {
    pub outer: usize,
    pub h: usize,
    pub m: usize,
    pub train_seed: u64,
    pub validation_seed: u64,
    pub milp_status: MilpStatus,
    /// SAA optimum; `+inf` when the SAA problem is infeasible.
    pub objective: f64,
    pub x: Vec<f64>,
    pub q_hat: f64,
    pub upper: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportStatus {
    Converged,
    NotConverged,
    NoValidatedUpperBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmReport {
    pub status: ReportStatus,
    pub upper_bound: f64,
    pub lower_bound: f64,
    pub gap: f64,
    pub gap_mode: GapMode,
    /// Per-batch L-th smallest SAA optimum.
    pub batch_lower_bounds: Vec<f64>,
    /// Per-batch minimum admitted objective (`+inf` if none admitted).
    pub batch_upper_bounds: Vec<f64>,
    pub alpha_prime: f64,
    pub gamma: f64,
    pub theta_n: f64,
    pub l: usize,
    pub outer_iterations: usize,
    pub master_seed: u64,
    pub best_solution: Option<Vec<f64>>,
    /// Records of the returned outer iteration, ordered by (h, m).
    pub records: Vec<ValidationRecord>,
    pub wall_seconds: f64,
}

/// Per-outer-iteration aggregation, shared with tests that recompute it.
pub fn aggregate(
    records: &[ValidationRecord],
    h: usize,
    m: usize,
    l: usize,
) -> (Vec<f64>, Vec<f64>) {
    let mut lows = Vec::with_capacity(h);
    let mut ups = Vec::with_capacity(h);
    for batch in records.chunks(m).take(h) {
        let mut objs: Vec<f64> = batch.iter().map(|r| r.objective).collect();
        objs.sort_by(f64::total_cmp);
        lows.push(objs[l - 1]);
        ups.push(
            batch
                .iter()
                .filter(|r| r.accepted)
                .map(|r| r.objective)
                .fold(f64::INFINITY, f64::min),
        );
    }
    (lows, ups)
}

fn gap_of(mode: GapMode, g: f64, v: f64) -> Result<f64> {
    match mode {
        GapMode::Absolute => Ok(g - v),
        GapMode::Relative => {
            if g <= 0.0 {
                Err(Error::GapUndefined(g))
            } else {
                Ok((g - v) / g)
            }
        }
    }
}

/// Replicated SAA bounding loop.
///
/// For each batch `h` and replication `m` an SAA problem on `N` fresh
/// scenarios is solved, then its solution is checked on `N'` independent
/// scenarios; it enters the upper bound only if the upper confidence limit
/// of its violation rate is at most α'. The lower bound averages over
/// batches the `L`-th smallest SAA optimum. The loop restarts with new seeds
/// while the gap exceeds `tol`, at most `max_outer` times.
pub fn run_algorithm<S: SaaModel + ?Sized, Q: ScenarioSource + ?Sized>(
    model: &S,
    sampler: &Q,
    params: &SaaParams,
) -> Result<AlgorithmReport> {
    params.validate()?;
    if sampler.dim() != model.zeta_dim() {
        return Err(Error::Dimension {
            context: "scenario source",
            expected: model.zeta_dim(),
            actual: sampler.dim(),
        });
    }
    let start = std::time::Instant::now();
    let alpha_prime = model.alpha_prime()?;
    let gamma = params.gamma.unwrap_or(alpha_prime);
    let (theta_n, l) = lower_bound_params(gamma, params.n, alpha_prime, params.m, params.beta)?;

    let mut best: Option<AlgorithmReport> = None;
    for outer in 0..params.max_outer {
        let mut records = Vec::with_capacity(params.h * params.m);
        for h in 0..params.h {
            for m in 0..params.m {
                let path = [outer as u64, h as u64, m as u64];
                let train_seed = derive_seed(params.seed, &[path[0], path[1], path[2], 0]);
                let validation_seed = derive_seed(params.seed, &[path[0], path[1], path[2], 1]);
                records.push(replicate(
                    model,
                    sampler,
                    params,
                    gamma,
                    alpha_prime,
                    [outer, h, m],
                    train_seed,
                    validation_seed,
                )?);
            }
        }
        let (lows, ups) = aggregate(&records, params.h, params.m, l);
        let v = lows.iter().sum::<f64>() / lows.len() as f64;
        let g = ups.iter().copied().fold(f64::INFINITY, f64::min);
        let best_solution = records
            .iter()
            .filter(|r| r.accepted && r.objective == g)
            .map(|r| r.x.clone())
            .next();
        let (status, gap) = if g.is_infinite() {
            (ReportStatus::NoValidatedUpperBound, f64::INFINITY)
        } else {
            let gap = gap_of(params.gap_mode, g, v)?;
            let status = if gap <= params.tol {
                ReportStatus::Converged
            } else {
                ReportStatus::NotConverged
            };
            (status, gap)
        };
        let report = AlgorithmReport {
            status,
            upper_bound: g,
            lower_bound: v,
            gap,
            gap_mode: params.gap_mode,
            batch_lower_bounds: lows,
            batch_upper_bounds: ups,
            alpha_prime,
            gamma,
            theta_n,
            l,
            outer_iterations: outer + 1,
            master_seed: params.seed,
            best_solution,
            records,
            wall_seconds: 0.0,
        };
        let done = status == ReportStatus::Converged;
        let better = match &best {
            None => true,
            Some(b) => report.gap < b.gap || b.status == ReportStatus::NoValidatedUpperBound,
        };
        if better {
            best = Some(report);
        }
        if done {
            break;
        }
    }
    let mut report = best.expect("max_outer >= 1");
    report.wall_seconds = start.elapsed().as_secs_f64();
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn replicate<S: SaaModel + ?Sized, Q: ScenarioSource + ?Sized>(
    model: &S,
    sampler: &Q,
    params: &SaaParams,
    gamma: f64,
    alpha_prime: f64,
    [outer, h, m]: [usize; 3],
    train_seed: u64,
    validation_seed: u64,
) -> Result<ValidationRecord> {
    let samples = sampler.draw(params.n, train_seed)?;
    let problem = model.build(&samples, gamma)?;
    let sol = solve_milp(&problem, &params.milp)?;
    let mut rec = ValidationRecord {
        outer,
        h,
        m,
        train_seed,
        validation_seed,
        milp_status: sol.status,
        objective: f64::INFINITY,
        x: Vec::new(),
        q_hat: 1.0,
        upper: 1.0,
        accepted: false,
    };
    if sol.status == MilpStatus::Unbounded {
        return Err(Error::invalid("SAA problem is unbounded"));
    }
    if !sol.has_solution() {
        return Ok(rec);
    }
    let x = model.decision(&sol.values);
    let validation = sampler.draw(params.n_prime, validation_seed)?;
    let bad = validation.iter().filter(|z| model.violated(&x, z)).count();
    rec.q_hat = bad as f64 / params.n_prime as f64;
    rec.upper = upper_confidence(rec.q_hat, params.n_prime, params.beta);
    rec.accepted = rec.upper <= alpha_prime;
    rec.objective = sol.objective;
    rec.x = x;
    Ok(rec)
}
