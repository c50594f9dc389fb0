//! Three-echelon supply chain design under uncertain demand.
//!
//! Suppliers `k` ship raw material `Z[k][i][t]` to candidate sites `i`,
//! which hold raw-material inventory `I[i][t]`, convert it into product at
//! `conversion_rate` product per raw unit and ship product `X[i][j][t]` to
//! customers `j`. Unmet demand is covered by external product `L[j][t]`.
//! Each site picks at most one capacity level `r` (binary `Y[i][r]`) with
//! capacity `CA[i][r]` and piecewise-linear capital cost `CF[i]`.
//!
//! Demand matrices are flattened customer-major: entry `j * T + t`.

mod build;
mod instance;
mod result;

pub use build::{
    build_deterministic, build_saa_drccp, build_two_stage, count_model_size, ChanceMode,
    DrccpModel, Layout, ModelSize,
};
pub use instance::{demand_history, desk_instance, DemandProcess, SupplyChainInstance};
pub use result::{
    capital_cost, extract_result, simulate, CostBreakdown, DesignDecision, ScenarioOutcome,
    SimulationReport, SolveResult,
};
