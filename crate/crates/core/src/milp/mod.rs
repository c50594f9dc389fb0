//! Bounded-variable simplex and best-first branch-and-bound.
//!
//! Problems are always minimizations. Every variable needs a finite lower
//! bound; upper bounds may be `f64::INFINITY`. Binary variables are integral
//! variables with bounds `[0, 1]`.

mod branch;
mod lp_format;
mod simplex;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use branch::{solve_milp, MilpOptions};
pub use lp_format::write_lp;
pub use simplex::solve_lp;

/// Absolute tolerance used when checking integrality of a returned solution.
pub const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
    pub cost: f64,
    pub integer: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Constraint {
    pub name: String,
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn activity(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(j, a)| a * x[j]).sum()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MilpProblem {
    pub vars: Vec<Variable>,
    pub rows: Vec<Constraint>,
}

impl MilpProblem {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        cost: f64,
        integer: bool,
    ) -> usize {
        self.vars.push(Variable {
            name: name.into(),
            lower,
            upper,
            cost,
            integer,
        });
        self.vars.len() - 1
    }

    pub fn add_continuous(
        &mut self,
        name: impl Into<String>,
        lower: f64,
        upper: f64,
        cost: f64,
    ) -> usize {
        self.add_var(name, lower, upper, cost, false)
    }

    pub fn add_binary(&mut self, name: impl Into<String>, cost: f64) -> usize {
        self.add_var(name, 0.0, 1.0, cost, true)
    }

    pub fn add_row(
        &mut self,
        name: impl Into<String>,
        coeffs: Vec<(usize, f64)>,
        sense: Sense,
        rhs: f64,
    ) -> usize {
        self.rows.push(Constraint {
            name: name.into(),
            coeffs,
            sense,
            rhs,
        });
        self.rows.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn num_integer(&self) -> usize {
        self.vars.iter().filter(|v| v.integer).count()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.vars.iter().zip(x).map(|(v, xi)| v.cost * xi).sum()
    }

    /// Largest bound or row violation of `x`, ignoring integrality.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (v, &xi) in self.vars.iter().zip(x) {
            worst = worst.max(v.lower - xi).max(xi - v.upper);
        }
        for row in &self.rows {
            let a = row.activity(x);
            let viol = match row.sense {
                Sense::Le => a - row.rhs,
                Sense::Ge => row.rhs - a,
                Sense::Eq => (a - row.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.vars.len();
        for (j, v) in self.vars.iter().enumerate() {
            if !v.lower.is_finite() {
                return Err(Error::invalid(format!(
                    "variable {} ({j}) needs a finite lower bound",
                    v.name
                )));
            }
            if v.upper.is_nan() || v.upper == f64::NEG_INFINITY || v.lower > v.upper {
                return Err(Error::invalid(format!(
                    "variable {} ({j}) has bounds [{}, {}]",
                    v.name, v.lower, v.upper
                )));
            }
            if !v.cost.is_finite() {
                return Err(Error::numeric(format!(
                    "objective coefficient of {}",
                    v.name
                )));
            }
        }
        for (i, row) in self.rows.iter().enumerate() {
            if !row.rhs.is_finite() {
                return Err(Error::numeric(format!(
                    "right-hand side of row {} ({i})",
                    row.name
                )));
            }
            for &(j, a) in &row.coeffs {
                if j >= n {
                    return Err(Error::invalid(format!(
                        "row {} ({i}) references column {j}, only {n} variables",
                        row.name
                    )));
                }
                if !a.is_finite() {
                    return Err(Error::numeric(format!(
                        "coefficient of column {j} in row {}",
                        row.name
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LpSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MilpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    GapLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MilpSolution {
    pub status: MilpStatus,
    pub values: Vec<f64>,
    pub objective: f64,
    /// Best proven lower bound on the optimum.
    pub best_bound: f64,
    pub bound_gap: f64,
    pub node_count: usize,
    pub iteration_count: usize,
}

impl MilpSolution {
    pub fn has_solution(&self) -> bool {
        matches!(self.status, MilpStatus::Optimal | MilpStatus::GapLimit) && !self.values.is_empty()
    }
}
