use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::milp::{MilpProblem, Sense};
use crate::saa::{SaaModel, VIOLATION_SLACK};
use crate::stats::violation_budget;

use super::instance::SupplyChainInstance;

/// Column indices of one copy of the operational variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpsBlock {
    x0: usize,
    z0: usize,
    inv0: usize,
    l0: usize,
}

/// Column layout of a built model. Operational blocks are repeated per
/// scenario in the two-stage model and appear once otherwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub sites: usize,
    pub customers: usize,
    pub suppliers: usize,
    pub levels: usize,
    pub periods: usize,
    blocks: Vec<OpsBlock>,
    ca0: usize,
    cf0: usize,
    co0: usize,
    y0: usize,
    a0: usize,
    pub num_indicators: usize,
}

impl Layout {
    pub fn x(&self, s: usize, i: usize, j: usize, t: usize) -> usize {
        self.blocks[s].x0 + (i * self.customers + j) * self.periods + t
    }
    pub fn z(&self, s: usize, k: usize, i: usize, t: usize) -> usize {
        self.blocks[s].z0 + (k * self.sites + i) * self.periods + t
    }
    pub fn inv(&self, s: usize, i: usize, t: usize) -> usize {
        self.blocks[s].inv0 + i * self.periods + t
    }
    pub fn l(&self, s: usize, j: usize, t: usize) -> usize {
        self.blocks[s].l0 + j * self.periods + t
    }
    pub fn ca(&self, i: usize, r: usize) -> usize {
        self.ca0 + i * self.levels + r
    }
    pub fn cf(&self, i: usize) -> usize {
        self.cf0 + i
    }
    pub fn co(&self, i: usize) -> usize {
        self.co0 + i
    }
    pub fn y(&self, i: usize, r: usize) -> usize {
        self.y0 + i * self.levels + r
    }
    pub fn indicator(&self, n: usize) -> usize {
        self.a0 + n
    }
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Delivered product plus external supply at `(j, t)` in block `s`.
    pub fn delivered(&self, values: &[f64], s: usize, j: usize, t: usize) -> f64 {
        (0..self.sites)
            .map(|i| values[self.x(s, i, j, t)])
            .sum::<f64>()
            + values[self.l(s, j, t)]
    }
}

fn add_block(p: &mut MilpProblem, inst: &SupplyChainInstance, tag: &str, weight: f64) -> OpsBlock {
    let (ni, nj, nk, nt) = (inst.sites, inst.customers, inst.suppliers, inst.periods);
    let x0 = p.num_vars();
    for i in 0..ni {
        for j in 0..nj {
            for t in 0..nt {
                p.add_continuous(
                    format!("X{tag}[{i},{j},{t}]"),
                    0.0,
                    f64::INFINITY,
                    weight * inst.c[i][j],
                );
            }
        }
    }
    let z0 = p.num_vars();
    for k in 0..nk {
        for i in 0..ni {
            for t in 0..nt {
                p.add_continuous(
                    format!("Z{tag}[{k},{i},{t}]"),
                    0.0,
                    f64::INFINITY,
                    weight * inst.a[k][i],
                );
            }
        }
    }
    let inv0 = p.num_vars();
    for i in 0..ni {
        for t in 0..nt {
            p.add_continuous(
                format!("I{tag}[{i},{t}]"),
                0.0,
                f64::INFINITY,
                weight * inst.pi,
            );
        }
    }
    let l0 = p.num_vars();
    for j in 0..nj {
        for t in 0..nt {
            p.add_continuous(
                format!("L{tag}[{j},{t}]"),
                0.0,
                f64::INFINITY,
                weight * inst.pex,
            );
        }
    }
    OpsBlock { x0, z0, inv0, l0 }
}

/// Variables and the design rows (45)-(48); operational blocks and their
/// rows (49)-(52) for each of `blocks` scenario weights.
fn build_core(inst: &SupplyChainInstance, weights: &[f64]) -> Result<(MilpProblem, Layout)> {
    inst.validate()?;
    let (ni, nr) = (inst.sites, inst.levels);
    let mut p = MilpProblem::new();
    let tags: Vec<String> = if weights.len() == 1 {
        vec![String::new()]
    } else {
        (0..weights.len()).map(|s| format!("_s{s}")).collect()
    };
    let blocks: Vec<OpsBlock> = weights
        .iter()
        .zip(&tags)
        .map(|(&w, tag)| add_block(&mut p, inst, tag, w))
        .collect();
    let ca0 = p.num_vars();
    for i in 0..ni {
        for r in 0..nr {
            p.add_continuous(format!("CA[{i},{r}]"), 0.0, inst.pm[r], 0.0);
        }
    }
    let cf0 = p.num_vars();
    for i in 0..ni {
        p.add_continuous(format!("CF[{i}]"), 0.0, f64::INFINITY, 1.0);
    }
    let co0 = p.num_vars();
    for i in 0..ni {
        p.add_continuous(format!("CO[{i}]"), 0.0, f64::INFINITY, 1.0);
    }
    let y0 = p.num_vars();
    for i in 0..ni {
        for r in 0..nr {
            p.add_binary(format!("Y[{i},{r}]"), 0.0);
        }
    }
    let a0 = p.num_vars();
    let lay = Layout {
        sites: inst.sites,
        customers: inst.customers,
        suppliers: inst.suppliers,
        levels: inst.levels,
        periods: inst.periods,
        blocks,
        ca0,
        cf0,
        co0,
        y0,
        a0,
        num_indicators: 0,
    };

    for i in 0..ni {
        p.add_row(
            format!("one_level[{i}]"),
            (0..nr).map(|r| (lay.y(i, r), 1.0)).collect(),
            Sense::Le,
            1.0,
        );
    }
    for i in 0..ni {
        let mut coeffs = vec![(lay.cf(i), 1.0)];
        for r in 0..nr {
            let (pl, pu) = inst.bracket(r);
            let (cl, cu) = inst.cost_bracket(r);
            let slope = (cu - cl) / (pu - pl);
            coeffs.push((lay.y(i, r), -(cl - pl * slope)));
            coeffs.push((lay.ca(i, r), -slope));
        }
        p.add_row(format!("capital[{i}]"), coeffs, Sense::Eq, 0.0);
    }
    for i in 0..ni {
        for r in 0..nr {
            let (pl, pu) = inst.bracket(r);
            p.add_row(
                format!("cap_upper[{i},{r}]"),
                vec![(lay.ca(i, r), 1.0), (lay.y(i, r), -pu)],
                Sense::Le,
                0.0,
            );
            p.add_row(
                format!("cap_lower[{i},{r}]"),
                vec![(lay.y(i, r), pl), (lay.ca(i, r), -1.0)],
                Sense::Le,
                0.0,
            );
        }
    }
    for i in 0..ni {
        let mut coeffs = vec![(lay.co(i), 1.0)];
        coeffs.extend((0..nr).map(|r| (lay.ca(i, r), -inst.vv[i])));
        p.add_row(format!("operating[{i}]"), coeffs, Sense::Eq, 0.0);
    }
    for (s, tag) in tags.iter().enumerate() {
        add_ops_rows(&mut p, inst, &lay, s, tag);
    }
    Ok((p, lay))
}

fn add_ops_rows(
    p: &mut MilpProblem,
    inst: &SupplyChainInstance,
    lay: &Layout,
    s: usize,
    tag: &str,
) {
    let (ni, nj, nk, nr, nt) = (
        inst.sites,
        inst.customers,
        inst.suppliers,
        inst.levels,
        inst.periods,
    );
    for i in 0..ni {
        for t in 0..nt {
            let mut coeffs: Vec<(usize, f64)> = (0..nj).map(|j| (lay.x(s, i, j, t), 1.0)).collect();
            coeffs.extend((0..nr).map(|r| (lay.ca(i, r), -1.0)));
            p.add_row(format!("capacity{tag}[{i},{t}]"), coeffs, Sense::Le, 0.0);
        }
    }
    for k in 0..nk {
        for t in 0..nt {
            p.add_row(
                format!("supply{tag}[{k},{t}]"),
                (0..ni).map(|i| (lay.z(s, k, i, t), 1.0)).collect(),
                Sense::Le,
                inst.bm[k][t],
            );
        }
    }
    // (1 - eta)(I_t + sum_k Z_t - sum_j X_t / beta) = I_{t+1}, with t = T
    // wrapping to the first period
    let keep = 1.0 - inst.eta;
    let balance = |p: &mut MilpProblem, i: usize, t: usize, next: usize, name: String| {
        let mut coeffs = vec![(lay.inv(s, i, t), keep)];
        coeffs.extend((0..nk).map(|k| (lay.z(s, k, i, t), keep)));
        coeffs.extend((0..nj).map(|j| (lay.x(s, i, j, t), -keep / inst.conversion_rate)));
        coeffs.push((lay.inv(s, i, next), -1.0));
        p.add_row(name, coeffs, Sense::Eq, 0.0);
    };
    for i in 0..ni {
        for t in 0..nt - 1 {
            balance(p, i, t, t + 1, format!("inventory{tag}[{i},{t}]"));
        }
    }
    for i in 0..ni {
        balance(p, i, nt - 1, 0, format!("inventory_cycle{tag}[{i}]"));
    }
}

fn check_demand(inst: &SupplyChainInstance, d: &[f64]) -> Result<()> {
    if d.len() != inst.demand_dim() {
        return Err(Error::Dimension {
            context: "demand vector (J*T)",
            expected: inst.demand_dim(),
            actual: d.len(),
        });
    }
    if d.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::invalid("demand must be finite and non-negative"));
    }
    Ok(())
}

fn add_demand_rows(p: &mut MilpProblem, lay: &Layout, s: usize, d: &[f64], tag: &str) {
    for j in 0..lay.customers {
        for t in 0..lay.periods {
            let mut coeffs: Vec<(usize, f64)> =
                (0..lay.sites).map(|i| (lay.x(s, i, j, t), 1.0)).collect();
            coeffs.push((lay.l(s, j, t), 1.0));
            p.add_row(
                format!("demand{tag}[{j},{t}]"),
                coeffs,
                Sense::Ge,
                d[j * lay.periods + t],
            );
        }
    }
}

/// Design model with hard demand rows for one demand vector.
pub fn build_deterministic(
    inst: &SupplyChainInstance,
    demand: &[f64],
) -> Result<(MilpProblem, Layout)> {
    check_demand(inst, demand)?;
    let (mut p, lay) = build_core(inst, &[1.0])?;
    add_demand_rows(&mut p, &lay, 0, demand, "");
    Ok((p, lay))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ChanceMode {
    /// One indicator per scenario shared by every (j, t) row.
    #[default]
    Joint,
    /// One indicator per (j, t, n), with a budget per (j, t).
    Individual,
}

/// Big-M SAA of the demand chance constraint with `M = d_jtn`.
pub fn build_saa_drccp(
    inst: &SupplyChainInstance,
    samples: &Dataset,
    gamma: f64,
    mode: ChanceMode,
) -> Result<(MilpProblem, Layout)> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::invalid(format!(
            "gamma must lie in [0, 1), got {gamma}"
        )));
    }
    if samples.is_empty() {
        return Err(Error::invalid("at least one demand sample is required"));
    }
    for d in samples.iter() {
        check_demand(inst, d)?;
    }
    let (mut p, mut lay) = build_core(inst, &[1.0])?;
    let n = samples.len();
    let (nj, nt) = (inst.customers, inst.periods);
    let budget = violation_budget(gamma, n) as f64;
    match mode {
        ChanceMode::Joint => {
            for s in 0..n {
                p.add_binary(format!("A[{s}]"), 0.0);
            }
            lay.num_indicators = n;
            for (s, d) in samples.iter().enumerate() {
                for j in 0..nj {
                    for t in 0..nt {
                        let djt = d[j * nt + t];
                        let mut coeffs: Vec<(usize, f64)> =
                            (0..inst.sites).map(|i| (lay.x(0, i, j, t), 1.0)).collect();
                        coeffs.push((lay.l(0, j, t), 1.0));
                        if djt != 0.0 {
                            coeffs.push((lay.indicator(s), djt));
                        }
                        p.add_row(format!("demand[{j},{t},{s}]"), coeffs, Sense::Ge, djt);
                    }
                }
            }
            p.add_row(
                "violations",
                (0..n).map(|s| (lay.indicator(s), 1.0)).collect(),
                Sense::Le,
                budget,
            );
        }
        ChanceMode::Individual => {
            for j in 0..nj {
                for t in 0..nt {
                    for s in 0..n {
                        p.add_binary(format!("A[{j},{t},{s}]"), 0.0);
                    }
                }
            }
            lay.num_indicators = nj * nt * n;
            for j in 0..nj {
                for t in 0..nt {
                    for (s, d) in samples.iter().enumerate() {
                        let djt = d[j * nt + t];
                        let ind = lay.indicator((j * nt + t) * n + s);
                        let mut coeffs: Vec<(usize, f64)> =
                            (0..inst.sites).map(|i| (lay.x(0, i, j, t), 1.0)).collect();
                        coeffs.push((lay.l(0, j, t), 1.0));
                        if djt != 0.0 {
                            coeffs.push((ind, djt));
                        }
                        p.add_row(format!("demand[{j},{t},{s}]"), coeffs, Sense::Ge, djt);
                    }
                    let row = (0..n)
                        .map(|s| (lay.indicator((j * nt + t) * n + s), 1.0))
                        .collect();
                    p.add_row(format!("violations[{j},{t}]"), row, Sense::Le, budget);
                }
            }
        }
    }
    Ok((p, lay))
}

/// Two-stage model: `Y`, `CA` (and so capital and operating cost) are
/// shared; flows, inventory and external supply are per scenario and
/// weighted by the scenario probabilities.
pub fn build_two_stage(
    inst: &SupplyChainInstance,
    scenarios: &Dataset,
    probabilities: &[f64],
) -> Result<(MilpProblem, Layout)> {
    if scenarios.len() != probabilities.len() || scenarios.is_empty() {
        return Err(Error::Dimension {
            context: "two-stage scenario probabilities",
            expected: scenarios.len(),
            actual: probabilities.len(),
        });
    }
    if probabilities.iter().any(|p| !(*p >= 0.0))
        || (probabilities.iter().sum::<f64>() - 1.0).abs() > 1e-9
    {
        return Err(Error::invalid(
            "scenario probabilities must be non-negative and sum to 1",
        ));
    }
    for d in scenarios.iter() {
        check_demand(inst, d)?;
    }
    let (mut p, lay) = build_core(inst, probabilities)?;
    for (s, d) in scenarios.iter().enumerate() {
        let tag = if scenarios.len() == 1 {
            String::new()
        } else {
            format!("_s{s}")
        };
        add_demand_rows(&mut p, &lay, s, d, &tag);
    }
    Ok((p, lay))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSize {
    pub binaries: usize,
    pub continuous: usize,
    pub rows: usize,
}

/// Size of the joint SAA model for `n` scenarios, from the formulas alone.
pub fn count_model_size(inst: &SupplyChainInstance, n: usize) -> ModelSize {
    let (i, j, k, r, t) = (
        inst.sites,
        inst.customers,
        inst.suppliers,
        inst.levels,
        inst.periods,
    );
    let core_rows = i + i + 2 * i * r + i + i * t + k * t + i * (t - 1) + i;
    let chance_rows = if n == 0 { 0 } else { j * t * n + 1 };
    ModelSize {
        binaries: i * r + n,
        continuous: i * j * t + k * i * t + i * t + j * t + i * r + 2 * i,
        rows: core_rows + chance_rows,
    }
}

impl ModelSize {
    pub fn of(problem: &MilpProblem) -> Self {
        let binaries = problem.num_integer();
        ModelSize {
            binaries,
            continuous: problem.num_vars() - binaries,
            rows: problem.num_rows(),
        }
    }
}

/// The joint DRCCP as an SAA model: the decision is the full column vector
/// and a scenario is violated when any (j, t) delivery falls short.
#[derive(Debug, Clone, PartialEq)]
pub struct DrccpModel {
    pub instance: SupplyChainInstance,
    pub mode: ChanceMode,
}

impl SaaModel for DrccpModel {
    fn zeta_dim(&self) -> usize {
        self.instance.demand_dim()
    }

    fn alpha_prime(&self) -> Result<f64> {
        crate::ambiguity::AmbiguityParams::new(self.instance.alpha, self.instance.d)
            .map(|p| crate::ambiguity::modified_risk(&p))
    }

    fn build(&self, samples: &Dataset, gamma: f64) -> Result<MilpProblem> {
        build_saa_drccp(&self.instance, samples, gamma, self.mode).map(|(p, _)| p)
    }

    fn decision(&self, values: &[f64]) -> Vec<f64> {
        values.to_vec()
    }

    fn violated(&self, x: &[f64], zeta: &[f64]) -> bool {
        let lay = operational_layout(&self.instance);
        (0..lay.customers).any(|j| {
            (0..lay.periods)
                .any(|t| lay.delivered(x, 0, j, t) < zeta[j * lay.periods + t] - VIOLATION_SLACK)
        })
    }
}

/// Layout of the single-block models without building a problem.
pub(crate) fn operational_layout(inst: &SupplyChainInstance) -> Layout {
    let (ni, nj, nk, nr, nt) = (
        inst.sites,
        inst.customers,
        inst.suppliers,
        inst.levels,
        inst.periods,
    );
    let x0 = 0;
    let z0 = x0 + ni * nj * nt;
    let inv0 = z0 + nk * ni * nt;
    let l0 = inv0 + ni * nt;
    let ca0 = l0 + nj * nt;
    let cf0 = ca0 + ni * nr;
    let co0 = cf0 + ni;
    let y0 = co0 + ni;
    let a0 = y0 + ni * nr;
    Layout {
        sites: ni,
        customers: nj,
        suppliers: nk,
        levels: nr,
        periods: nt,
        blocks: vec![OpsBlock { x0, z0, inv0, l0 }],
        ca0,
        cf0,
        co0,
        y0,
        a0,
        num_indicators: 0,
    }
}
