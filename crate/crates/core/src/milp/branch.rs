//! Best-first branch-and-bound over LP relaxations.
//!
//! Nodes are kept in a priority queue keyed by their parent's relaxation
//! bound. After each branching the ceil child is processed immediately
//! (a plunge) and the floor child is queued.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::Result;

use super::simplex::{solve_bounded, StandardForm};
use super::{LpStatus, MilpProblem, MilpSolution, MilpStatus, INTEGRALITY_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MilpOptions {
    /// Stop once (incumbent - bound) / |incumbent| falls to this value.
    pub rel_gap: f64,
    pub node_limit: usize,
}

impl Default for MilpOptions {
    fn default() -> Self {
        Self {
            rel_gap: 1e-3,
            node_limit: 200_000,
        }
    }
}

struct Node {
    bound: f64,
    id: usize,
    /// (variable, lower, upper) overrides applied on top of the root bounds.
    fixes: Vec<(usize, f64, f64)>,
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // BinaryHeap is a max-heap: reverse so the lowest bound, then the
    // lowest id, pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .bound
            .total_cmp(&self.bound)
            .then_with(|| other.id.cmp(&self.id))
    }
}

fn prune_slack(incumbent: f64, rel_gap: f64) -> f64 {
    (rel_gap * incumbent.abs()).max(1e-9 * incumbent.abs().max(1.0))
}

fn relative_gap(incumbent: f64, bound: f64) -> f64 {
    let diff = incumbent - bound;
    if diff <= 1e-9 * incumbent.abs().max(1.0) {
        0.0
    } else if incumbent == 0.0 {
        f64::INFINITY
    } else {
        diff / incumbent.abs()
    }
}

/// Most fractional integral variable, ties to the lowest index.
fn branching_candidate(problem: &MilpProblem, x: &[f64]) -> Option<(usize, f64)> {
    let mut pick = None;
    let mut best = INTEGRALITY_TOL;
    for (j, v) in problem.vars.iter().enumerate() {
        if !v.integer {
            continue;
        }
        let frac = x[j] - x[j].floor();
        let dist = frac.min(1.0 - frac);
        if dist > best {
            best = dist;
            pick = Some((j, x[j]));
        }
    }
    pick
}

pub fn solve_milp(problem: &MilpProblem, options: &MilpOptions) -> Result<MilpSolution> {
    problem.validate()?;
    let sf = StandardForm::new(problem);
    let root_lb: Vec<f64> = problem
        .vars
        .iter()
        .map(|v| if v.integer { v.lower.ceil() } else { v.lower })
        .collect();
    let root_ub: Vec<f64> = problem
        .vars
        .iter()
        .map(|v| if v.integer { v.upper.floor() } else { v.upper })
        .collect();

    let mut heap = BinaryHeap::new();
    let mut next_id = 1usize;
    let mut current = Some(Node {
        bound: f64::NEG_INFINITY,
        id: 0,
        fixes: Vec::new(),
    });
    let mut incumbent: Option<(f64, Vec<f64>)> = None;
    // smallest relaxation bound among nodes dropped by the gap rule
    let mut pruned_bound = f64::INFINITY;
    let mut nodes = 0usize;
    let mut iterations = 0usize;
    let mut hit_limit = false;
    let (mut lb, mut ub) = (root_lb.clone(), root_ub.clone());

    loop {
        let node = match current.take() {
            Some(n) => n,
            None => match heap.pop() {
                Some(n) => n,
                None => break,
            },
        };
        if let Some((inc, _)) = &incumbent {
            if node.bound >= inc - prune_slack(*inc, options.rel_gap) {
                pruned_bound = pruned_bound.min(node.bound);
                continue;
            }
        }
        if nodes >= options.node_limit {
            hit_limit = true;
            pruned_bound = pruned_bound.min(node.bound);
            break;
        }
        nodes += 1;

        lb.copy_from_slice(&root_lb);
        ub.copy_from_slice(&root_ub);
        for &(j, l, u) in &node.fixes {
            lb[j] = l;
            ub[j] = u;
        }
        let lp = solve_bounded(&sf, &lb, &ub)?;
        iterations += lp.iterations;
        match lp.status {
            LpStatus::Infeasible => continue,
            LpStatus::Unbounded => {
                return Ok(MilpSolution {
                    status: MilpStatus::Unbounded,
                    values: Vec::new(),
                    objective: f64::NEG_INFINITY,
                    best_bound: f64::NEG_INFINITY,
                    bound_gap: f64::INFINITY,
                    node_count: nodes,
                    iteration_count: iterations,
                });
            }
            LpStatus::Optimal => {}
        }
        if let Some((inc, _)) = &incumbent {
            if lp.objective >= inc - prune_slack(*inc, options.rel_gap) {
                pruned_bound = pruned_bound.min(lp.objective);
                continue;
            }
        }
        match branching_candidate(problem, &lp.values) {
            None => incumbent = Some((lp.objective, lp.values)),
            Some((j, v)) => {
                let mut floor = node.fixes.clone();
                floor.push((j, lb[j], v.floor()));
                let mut ceil = node.fixes;
                ceil.push((j, v.ceil(), ub[j]));
                heap.push(Node {
                    bound: lp.objective,
                    id: next_id,
                    fixes: floor,
                });
                current = Some(Node {
                    bound: lp.objective,
                    id: next_id + 1,
                    fixes: ceil,
                });
                next_id += 2;
            }
        }
    }

    let open_bound = heap
        .iter()
        .map(|n| n.bound)
        .chain(current.iter().map(|n| n.bound))
        .fold(pruned_bound, f64::min);
    Ok(match incumbent {
        Some((obj, values)) => {
            let best_bound = open_bound.min(obj);
            MilpSolution {
                status: if hit_limit {
                    MilpStatus::GapLimit
                } else {
                    MilpStatus::Optimal
                },
                values,
                objective: obj,
                best_bound,
                bound_gap: relative_gap(obj, best_bound),
                node_count: nodes,
                iteration_count: iterations,
            }
        }
        None => MilpSolution {
            status: if hit_limit {
                MilpStatus::GapLimit
            } else {
                MilpStatus::Infeasible
            },
            values: Vec::new(),
            objective: f64::INFINITY,
            best_bound: open_bound,
            bound_gap: f64::INFINITY,
            node_count: nodes,
            iteration_count: iterations,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::{solve_lp, Sense};

    fn knapsack() -> MilpProblem {
        knapsack_cap(5.0)
    }

    fn knapsack_cap(cap: f64) -> MilpProblem {
        let mut p = MilpProblem::new();
        let a = p.add_binary("a", -3.0);
        let b = p.add_binary("b", -4.0);
        let c = p.add_binary("c", -5.0);
        p.add_row("cap", vec![(a, 2.0), (b, 3.0), (c, 4.0)], Sense::Le, cap);
        p
    }

    #[test]
    fn small_knapsack() {
        let s = solve_milp(&knapsack(), &MilpOptions::default()).unwrap();
        assert_eq!(s.status, MilpStatus::Optimal);
        assert!((s.objective + 7.0).abs() < 1e-9);
        assert!((s.values[0] - 1.0).abs() < 1e-6);
        assert!((s.values[1] - 1.0).abs() < 1e-6);
        assert!(s.values[2].abs() < 1e-6);
    }

    #[test]
    fn continuous_problem_matches_lp() {
        let mut p = MilpProblem::new();
        let x = p.add_continuous("x", 0.0, 4.0, -1.0);
        let y = p.add_continuous("y", 0.0, 4.0, -2.0);
        p.add_row("r", vec![(x, 1.0), (y, 3.0)], Sense::Le, 6.0);
        let lp = solve_lp(&p).unwrap();
        let mip = solve_milp(&p, &MilpOptions::default()).unwrap();
        assert_eq!(mip.node_count, 1);
        assert_eq!(lp.values, mip.values);
        assert_eq!(lp.objective, mip.objective);
    }

    #[test]
    fn infeasible_integer_problem() {
        // 2x = 1 with x integer
        let mut p = MilpProblem::new();
        let x = p.add_var("x", 0.0, 3.0, 1.0, true);
        p.add_row("half", vec![(x, 2.0)], Sense::Eq, 1.0);
        let s = solve_milp(&p, &MilpOptions::default()).unwrap();
        assert_eq!(s.status, MilpStatus::Infeasible);
        assert!(!s.has_solution());
    }

    #[test]
    fn node_limit_reports_gap_limit() {
        let opts = MilpOptions {
            rel_gap: 0.0,
            node_limit: 1,
        };
        // relaxation a = b = 1, c = 1/4 is fractional
        let s = solve_milp(&knapsack_cap(6.0), &opts).unwrap();
        assert_eq!(s.status, MilpStatus::GapLimit);
        assert!(!s.has_solution());
        let full = solve_milp(&knapsack_cap(6.0), &MilpOptions::default()).unwrap();
        // a + c fills capacity 6 for value 8
        assert!((full.objective + 8.0).abs() < 1e-9);
        assert!(full.best_bound <= full.objective);
        assert_eq!(s.node_count, 1);
    }

    #[test]
    fn deterministic_node_counts() {
        let a = solve_milp(&knapsack(), &MilpOptions::default()).unwrap();
        let b = solve_milp(&knapsack(), &MilpOptions::default()).unwrap();
        assert_eq!(a, b);
    }
}
