use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::milp::{solve_milp, MilpOptions, MilpStatus};

use super::build::{build_deterministic, Layout};
use super::instance::SupplyChainInstance;

/// Interpolated capital cost of capacity `ca` at zero-based level `r`.
pub fn capital_cost(ca: f64, r: usize, pm: &[f64], cm: &[f64]) -> Result<f64> {
    if r >= pm.len() || pm.len() != cm.len() {
        return Err(Error::invalid(format!("capacity level {r} out of range")));
    }
    let (pl, pu) = (if r == 0 { 0.0 } else { pm[r - 1] }, pm[r]);
    let (cl, cu) = (if r == 0 { 0.0 } else { cm[r - 1] }, cm[r]);
    if !(ca >= pl && ca <= pu) {
        return Err(Error::invalid(format!(
            "capacity {ca} outside level bracket [{pl}, {pu}]"
        )));
    }
    Ok(cl + (ca - pl) * (cu - cl) / (pu - pl))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignDecision {
    /// `y[i][r]`
    pub y: Vec<Vec<bool>>,
    /// `ca[i][r]`
    pub ca: Vec<Vec<f64>>,
}

impl DesignDecision {
    pub fn validate(&self, inst: &SupplyChainInstance) -> Result<()> {
        if self.y.len() != inst.sites || self.ca.len() != inst.sites {
            return Err(Error::Dimension {
                context: "design sites",
                expected: inst.sites,
                actual: self.y.len(),
            });
        }
        for i in 0..inst.sites {
            if self.y[i].len() != inst.levels || self.ca[i].len() != inst.levels {
                return Err(Error::Dimension {
                    context: "design levels",
                    expected: inst.levels,
                    actual: self.y[i].len(),
                });
            }
            if self.y[i].iter().filter(|b| **b).count() > 1 {
                return Err(Error::invalid(format!(
                    "site {i} selects more than one capacity level"
                )));
            }
            for r in 0..inst.levels {
                let (pl, pu) = inst.bracket(r);
                let on = if self.y[i][r] { 1.0 } else { 0.0 };
                let ca = self.ca[i][r];
                if ca < pl * on - 1e-6 || ca > pu * on + 1e-6 {
                    return Err(Error::invalid(format!(
                        "capacity {ca} of site {i}, level {r} violates its bracket"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn capacity(&self, i: usize) -> f64 {
        self.ca[i].iter().sum()
    }

    pub fn capital_cost(&self, inst: &SupplyChainInstance) -> Result<f64> {
        let mut total = 0.0;
        for i in 0..inst.sites {
            for r in 0..inst.levels {
                if self.y[i][r] {
                    total += capital_cost(self.ca[i][r], r, &inst.pm, &inst.cm)?;
                }
            }
        }
        Ok(total)
    }

    pub fn operating_cost(&self, inst: &SupplyChainInstance) -> f64 {
        (0..inst.sites).map(|i| inst.vv[i] * self.capacity(i)).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub capital: f64,
    pub operating: f64,
    pub product_transport: f64,
    /// Raw-material procurement and transport.
    pub raw_material: f64,
    pub inventory: f64,
    pub external: f64,
}

impl CostBreakdown {
    pub fn total(&self) -> f64 {
        self.capital
            + self.operating
            + self.product_transport
            + self.raw_material
            + self.inventory
            + self.external
    }

    pub fn entries(&self) -> [(&'static str, f64); 6] {
        [
            ("capital", self.capital),
            ("operating", self.operating),
            ("product_transport", self.product_transport),
            ("raw_material", self.raw_material),
            ("inventory", self.inventory),
            ("external", self.external),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub design: DesignDecision,
    /// `x[i][j][t]`; probability-weighted over scenarios in the two-stage
    /// model.
    pub x: Vec<Vec<Vec<f64>>>,
    /// `z[k][i][t]`
    pub z: Vec<Vec<Vec<f64>>>,
    /// `inventory[i][t]`
    pub inventory: Vec<Vec<f64>>,
    /// `external[j][t]`
    pub external: Vec<Vec<f64>>,
    pub breakdown: CostBreakdown,
    pub total_cost: f64,
    pub solver_status: MilpStatus,
    pub bound_gap: f64,
}

impl SolveResult {
    pub fn total_external(&self) -> f64 {
        self.external.iter().flatten().sum()
    }

    pub fn production(&self, i: usize, t: usize) -> f64 {
        self.x[i].iter().map(|xj| xj[t]).sum()
    }
}

/// Reads a solution vector back into named quantities. `weights` are the
/// scenario probabilities of the operational blocks (`[1.0]` for the
/// single-block models).
pub fn extract_result(
    inst: &SupplyChainInstance,
    lay: &Layout,
    values: &[f64],
    weights: &[f64],
    status: MilpStatus,
    bound_gap: f64,
) -> Result<SolveResult> {
    if weights.len() != lay.num_blocks() {
        return Err(Error::Dimension {
            context: "scenario weights",
            expected: lay.num_blocks(),
            actual: weights.len(),
        });
    }
    let (ni, nj, nk, nr, nt) = (
        inst.sites,
        inst.customers,
        inst.suppliers,
        inst.levels,
        inst.periods,
    );
    let avg = |f: &dyn Fn(usize) -> usize| -> f64 {
        weights
            .iter()
            .enumerate()
            .map(|(s, w)| w * values[f(s)])
            .sum()
    };
    let mut y = vec![vec![false; nr]; ni];
    let mut ca = vec![vec![0.0; nr]; ni];
    for i in 0..ni {
        for r in 0..nr {
            y[i][r] = values[lay.y(i, r)] > 0.5;
            let (pl, pu) = inst.bracket(r);
            ca[i][r] = if y[i][r] {
                values[lay.ca(i, r)].clamp(pl, pu)
            } else {
                0.0
            };
        }
    }
    let x: Vec<Vec<Vec<f64>>> = (0..ni)
        .map(|i| {
            (0..nj)
                .map(|j| (0..nt).map(|t| avg(&|s| lay.x(s, i, j, t))).collect())
                .collect()
        })
        .collect();
    let z: Vec<Vec<Vec<f64>>> = (0..nk)
        .map(|k| {
            (0..ni)
                .map(|i| (0..nt).map(|t| avg(&|s| lay.z(s, k, i, t))).collect())
                .collect()
        })
        .collect();
    let inventory: Vec<Vec<f64>> = (0..ni)
        .map(|i| (0..nt).map(|t| avg(&|s| lay.inv(s, i, t))).collect())
        .collect();
    let external: Vec<Vec<f64>> = (0..nj)
        .map(|j| (0..nt).map(|t| avg(&|s| lay.l(s, j, t))).collect())
        .collect();
    let mut b = CostBreakdown {
        capital: (0..ni).map(|i| values[lay.cf(i)]).sum(),
        operating: (0..ni).map(|i| values[lay.co(i)]).sum(),
        ..CostBreakdown::default()
    };
    for i in 0..ni {
        for j in 0..nj {
            b.product_transport += inst.c[i][j] * x[i][j].iter().sum::<f64>();
        }
    }
    for k in 0..nk {
        for i in 0..ni {
            b.raw_material += inst.a[k][i] * z[k][i].iter().sum::<f64>();
        }
    }
    b.inventory = inst.pi * inventory.iter().flatten().sum::<f64>();
    b.external = inst.pex * external.iter().flatten().sum::<f64>();
    Ok(SolveResult {
        design: DesignDecision { y, ca },
        x,
        z,
        inventory,
        external,
        total_cost: b.total(),
        breakdown: b,
        solver_status: status,
        bound_gap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioOutcome {
    pub total_cost: f64,
    pub external: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub scenarios: Vec<ScenarioOutcome>,
    pub average_cost: f64,
    pub average_external: f64,
    /// Scenarios whose external supply exceeds 1e-6.
    pub external_count: usize,
}

impl SimulationReport {
    pub fn from_outcomes(scenarios: Vec<ScenarioOutcome>) -> Self {
        let n = scenarios.len().max(1) as f64;
        let average_cost = scenarios.iter().map(|s| s.total_cost).sum::<f64>() / n;
        let average_external = scenarios.iter().map(|s| s.external).sum::<f64>() / n;
        let external_count = scenarios.iter().filter(|s| s.external > 1e-6).count();
        Self {
            scenarios,
            average_cost,
            average_external,
            external_count,
        }
    }
}

/// Operates a fixed design against each demand realization: the design
/// columns are pinned by their bounds and the remaining flows re-optimized.
pub fn simulate(
    design: &DesignDecision,
    inst: &SupplyChainInstance,
    realizations: &[Vec<f64>],
    options: &MilpOptions,
) -> Result<SimulationReport> {
    design.validate(inst)?;
    let mut out = Vec::with_capacity(realizations.len());
    for d in realizations {
        let (mut p, lay) = build_deterministic(inst, d)?;
        for i in 0..inst.sites {
            for r in 0..inst.levels {
                let yv = if design.y[i][r] { 1.0 } else { 0.0 };
                let (pl, pu) = inst.bracket(r);
                let cav = design.ca[i][r].clamp(pl * yv, pu * yv);
                let (yc, cc) = (lay.y(i, r), lay.ca(i, r));
                p.vars[yc].lower = yv;
                p.vars[yc].upper = yv;
                p.vars[cc].lower = cav;
                p.vars[cc].upper = cav;
            }
        }
        let sol = solve_milp(&p, options)?;
        if !sol.has_solution() {
            return Err(Error::numeric(format!(
                "simulation LP for a fixed design ended with status {:?}",
                sol.status
            )));
        }
        let res = extract_result(inst, &lay, &sol.values, &[1.0], sol.status, sol.bound_gap)?;
        out.push(ScenarioOutcome {
            total_cost: res.total_cost,
            external: res.total_external(),
        });
    }
    Ok(SimulationReport::from_outcomes(out))
}
