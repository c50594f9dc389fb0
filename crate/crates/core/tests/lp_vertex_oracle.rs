//! Small random LPs checked against brute-force vertex enumeration.

use drccp::milp::{solve_lp, solve_milp, LpStatus, MilpOptions, MilpProblem, MilpStatus, Sense};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Hyperplanes a·x = b from rows and box faces.
fn faces(p: &MilpProblem) -> Vec<(Vec<f64>, f64)> {
    let n = p.num_vars();
    let mut out = Vec::new();
    for row in &p.rows {
        let mut a = vec![0.0; n];
        for &(j, v) in &row.coeffs {
            a[j] += v;
        }
        out.push((a, row.rhs));
    }
    for (j, v) in p.vars.iter().enumerate() {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        out.push((e.clone(), v.lower));
        out.push((e, v.upper));
    }
    out
}

fn solve_square(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k].abs() < 1e-10 {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in 0..n {
            if i != k {
                let f = a[i][k] / a[k][k];
                for c in k..n {
                    a[i][c] -= f * a[k][c];
                }
                b[i] -= f * b[k];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = combinations(n - 1, k);
    for mut c in combinations(n - 1, k - 1) {
        c.push(n - 1);
        out.push(c);
    }
    out
}

fn vertex_optimum(p: &MilpProblem) -> Option<f64> {
    let f = faces(p);
    let n = p.num_vars();
    let mut best: Option<f64> = None;
    for combo in combinations(f.len(), n) {
        let a = combo.iter().map(|&i| f[i].0.clone()).collect();
        let b = combo.iter().map(|&i| f[i].1).collect();
        if let Some(x) = solve_square(a, b) {
            if p.max_violation(&x) <= 1e-8 {
                let v = p.objective_value(&x);
                best = Some(best.map_or(v, |b: f64| b.min(v)));
            }
        }
    }
    best
}

fn random_lp(rng: &mut ChaCha8Rng, n: usize, m: usize, integer: bool) -> MilpProblem {
    let mut p = MilpProblem::new();
    for j in 0..n {
        let lo = rng.random_range(-2.0..1.0f64).round();
        let hi = lo + rng.random_range(1.0..5.0f64).round();
        p.add_var(
            format!("x{j}"),
            lo,
            hi,
            rng.random_range(-3.0..3.0),
            integer,
        );
    }
    for i in 0..m {
        let coeffs = (0..n).map(|j| (j, rng.random_range(-2.0..2.0))).collect();
        let sense = match rng.random_range(0..5) {
            0 => Sense::Ge,
            1 => Sense::Eq,
            _ => Sense::Le,
        };
        p.add_row(format!("r{i}"), coeffs, sense, rng.random_range(-1.0..3.0));
    }
    p
}

#[test]
fn lp_matches_vertex_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut feasible = 0;
    for case in 0..300 {
        let n = 2 + case % 3;
        let m = 1 + case % 5;
        let p = random_lp(&mut rng, n, m, false);
        let lp = solve_lp(&p).unwrap();
        match vertex_optimum(&p) {
            Some(v) => {
                feasible += 1;
                assert_eq!(lp.status, LpStatus::Optimal, "case {case}");
                assert!(
                    (lp.objective - v).abs() < 1e-7,
                    "case {case}: {} vs {v}",
                    lp.objective
                );
                assert!(p.max_violation(&lp.values) < 1e-7, "case {case}");
            }
            None => assert_eq!(lp.status, LpStatus::Infeasible, "case {case}"),
        }
    }
    assert!(feasible > 100);
}

#[test]
fn integer_program_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for case in 0..150 {
        let n = 2 + case % 3;
        let p = random_lp(&mut rng, n, 1 + case % 4, true);
        // enumerate every integer point of the box
        let mut best: Option<f64> = None;
        let mut x: Vec<f64> = p.vars.iter().map(|v| v.lower).collect();
        loop {
            if p.max_violation(&x) <= 1e-9 {
                let v = p.objective_value(&x);
                best = Some(best.map_or(v, |b: f64| b.min(v)));
            }
            let mut k = 0;
            while k < n {
                x[k] += 1.0;
                if x[k] <= p.vars[k].upper {
                    break;
                }
                x[k] = p.vars[k].lower;
                k += 1;
            }
            if k == n {
                break;
            }
        }
        let opts = MilpOptions {
            rel_gap: 0.0,
            ..MilpOptions::default()
        };
        let s = solve_milp(&p, &opts).unwrap();
        match best {
            Some(v) => {
                assert_eq!(s.status, MilpStatus::Optimal, "case {case}");
                assert!(
                    (s.objective - v).abs() < 1e-7,
                    "case {case}: {} vs {v}",
                    s.objective
                );
                for (xi, var) in s.values.iter().zip(&p.vars) {
                    assert!(!var.integer || (xi - xi.round()).abs() <= 1e-6);
                }
            }
            None => assert_eq!(s.status, MilpStatus::Infeasible, "case {case}"),
        }
    }
}

#[test]
fn larger_sparse_lp_is_feasible_and_stable() {
    // transportation-style problem with a known optimum: supplies equal
    // demands and unit costs are i + j, so every feasible plan costs the same
    let (s, d) = (12, 15);
    let mut p = MilpProblem::new();
    let mut idx = vec![vec![0; d]; s];
    for (i, row) in idx.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = p.add_continuous(format!("f{i}_{j}"), 0.0, f64::INFINITY, (i + j) as f64);
        }
    }
    for (i, row) in idx.iter().enumerate() {
        p.add_row(
            format!("s{i}"),
            row.iter().map(|&v| (v, 1.0)).collect(),
            Sense::Le,
            5.0,
        );
    }
    for j in 0..d {
        p.add_row(
            format!("d{j}"),
            idx.iter().map(|r| (r[j], 1.0)).collect(),
            Sense::Ge,
            4.0,
        );
    }
    let lp = solve_lp(&p).unwrap();
    assert_eq!(lp.status, LpStatus::Optimal);
    assert!(p.max_violation(&lp.values) < 1e-7);
    // cheapest assignment: total demand 60 served from supplies with the
    // lowest i; cost = sum_j 4 j + sum over shipped units of i
    let demand_cost: f64 = (0..d).map(|j| 4.0 * j as f64).sum();
    let supply_cost: f64 = (0..12).map(|i| 5.0 * i as f64).sum();
    assert!((lp.objective - (demand_cost + supply_cost)).abs() < 1e-6);
}
