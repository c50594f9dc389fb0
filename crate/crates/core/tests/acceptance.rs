//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! fails. Run with `cargo test -p drccp --test acceptance`.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use drccp::ambiguity::{modified_risk, AmbiguityParams};
use drccp::experiments::{
    demand_scenarios, kde_compare, run_motivating, solve_supply_chain, KdeCompareConfig,
    MotivatingConfig, ScMethod, SupplyChainConfig,
};
use drccp::gan::{sample, GanConfig};
use drccp::milp::{solve_lp, solve_milp, LpStatus, MilpOptions, MilpProblem, MilpStatus, Sense};
use drccp::nn::{grad_check, Activation, LossKind, Mlp};
use drccp::saa::{
    build_saa, run_algorithm, violation_rate, BigMRule, CcpModel, CcpSpec, ChanceRow, Constant,
    DeterministicRow, GapMode, ReportStatus, SaaParams, ScenarioSource,
};
use drccp::stats::{binomial_cdf, lower_bound_params, normal_quantile, violation_budget};
use drccp::supply_chain::{
    build_saa_drccp, count_model_size, desk_instance, simulate, ChanceMode, ModelSize, SolveResult,
    SupplyChainInstance,
};
use drccp::{Dataset, Matrix};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn exact() -> MilpOptions {
    MilpOptions {
        rel_gap: 0.0,
        ..MilpOptions::default()
    }
}

// 1
fn modified_risk_level() -> Outcome {
    let a = modified_risk(&AmbiguityParams::new(0.10, 0.10).map_err(|e| e.to_string())?);
    check(a == 0.05, format!("alpha' = {a:?}"))
}

// 2
fn model_size() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut pts = |n: usize| -> Vec<(f64, f64)> {
        (0..n)
            .map(|_| (rng.random_range(0.0..300.0), rng.random_range(0.0..500.0)))
            .collect()
    };
    let (sites, customers, suppliers) = (pts(15), pts(25), pts(26));
    let base = SupplyChainInstance {
        levels: 3,
        periods: 12,
        pm: vec![100.0, 300.0, 600.0],
        cm: vec![50.0, 120.0, 200.0],
        vv: vec![1.0; 15],
        bm: vec![vec![80.0; 12]; 26],
        ..desk_instance()
    };
    let inst = SupplyChainInstance::with_geometry(
        &sites, &customers, &suppliers, 0.01, 0.02, &[0.5; 26], 1.6, base,
    );
    inst.validate().map_err(|e| e.to_string())?;
    let demand =
        Matrix::from_vec(50, 300, (0..50 * 300).map(|k| (k % 17) as f64).collect()).unwrap();
    let samples = Dataset::from_matrix(demand);
    let (p, _) =
        build_saa_drccp(&inst, &samples, 0.05, ChanceMode::Joint).map_err(|e| e.to_string())?;
    let built = ModelSize::of(&p);
    let formula = count_model_size(&inst, 50);
    let want = ModelSize {
        binaries: 95,
        continuous: 9735,
        rows: 15808,
    };
    check(
        built == want && formula == want,
        format!("formula {formula:?}, built {built:?}"),
    )
}

fn random_spec(rng: &mut ChaCha8Rng, n: usize, rows: usize, zdim: usize) -> CcpSpec {
    let mut u = |lo: f64, hi: f64| rng.random_range(lo..hi);
    let cost = (0..n).map(|_| u(-1.0, 1.0)).collect();
    let chance_rows = (0..rows)
        .map(|_| ChanceRow {
            a: (0..n).map(|_| u(-1.0, 1.0)).collect(),
            b: (0..zdim).map(|_| u(-1.0, 1.0)).collect(),
            c: u(0.5, 3.0),
        })
        .collect();
    let deterministic_rows = vec![DeterministicRow {
        a: (0..n).map(|_| u(0.0, 1.0)).collect(),
        sense: Sense::Le,
        rhs: u(2.0, 6.0),
    }];
    CcpSpec {
        lower: vec![0.0; n],
        upper: (0..n).map(|_| u(2.0, 5.0)).collect(),
        cost,
        chance_rows,
        deterministic_rows,
        alpha: 0.1,
        d: 0.1,
    }
}

/// Minimum over every admissible set of discarded scenarios of the LP with
/// the remaining scenario rows enforced.
fn subset_oracle(spec: &CcpSpec, samples: &Dataset, budget: usize) -> f64 {
    let n = samples.len();
    let mut best = f64::INFINITY;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize > budget {
            continue;
        }
        let mut p = MilpProblem::new();
        for j in 0..spec.n() {
            p.add_continuous(format!("x{j}"), spec.lower[j], spec.upper[j], spec.cost[j]);
        }
        for row in &spec.deterministic_rows {
            p.add_row(
                "det",
                row.a.iter().copied().enumerate().collect(),
                row.sense,
                row.rhs,
            );
        }
        for (s, z) in samples.iter().enumerate() {
            if mask & (1 << s) != 0 {
                continue;
            }
            for r in &spec.chance_rows {
                let bz: f64 = r.b.iter().zip(z).map(|(b, z)| b * z).sum();
                p.add_row(
                    "cc",
                    r.a.iter().copied().enumerate().collect(),
                    Sense::Le,
                    r.c - bz,
                );
            }
        }
        let sol = solve_lp(&p).unwrap();
        if sol.status == LpStatus::Optimal {
            best = best.min(sol.objective);
        }
    }
    best
}

// 3
fn milp_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut infeasible = 0;
    for case in 0..100 {
        let n = rng.random_range(2..=3);
        let rows = rng.random_range(1..=2);
        let zdim = rng.random_range(1..=2);
        let spec = random_spec(&mut rng, n, rows, zdim);
        let ns = rng.random_range(4..=12);
        let samples = Dataset::from_rows(
            &(0..ns)
                .map(|_| (0..zdim).map(|_| rng.random_range(-1.5..2.5)).collect())
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let gamma = [0.0, 0.1, 0.2, 0.3, 0.45][case % 5];
        let p =
            build_saa(&spec, &samples, gamma, BigMRule::BoundBased).map_err(|e| e.to_string())?;
        let sol = solve_milp(&p, &exact()).map_err(|e| e.to_string())?;
        let oracle = subset_oracle(&spec, &samples, violation_budget(gamma, ns));
        let got = if sol.has_solution() {
            sol.objective
        } else {
            f64::INFINITY
        };
        if oracle.is_infinite() || got.is_infinite() {
            infeasible += 1;
            if oracle != got {
                return Err(format!("case {case}: milp {got} vs oracle {oracle}"));
            }
            continue;
        }
        let err = (got - oracle).abs();
        worst = worst.max(err);
        if err > 1e-6 {
            return Err(format!("case {case}: milp {got} vs oracle {oracle}"));
        }
    }
    Ok(format!(
        "worst |diff| {worst:.2e}, {infeasible} infeasible cases agree"
    ))
}

// 4
fn gradient_fidelity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let kinds = [
        Activation::Relu,
        Activation::leaky(),
        Activation::Tanh,
        Activation::Sigmoid,
        Activation::Identity,
    ];
    let mut worst: f64 = 0.0;
    for case in 0..20 {
        let input = rng.random_range(1..=8);
        let depth = rng.random_range(1..=2);
        let mut dims = vec![input];
        for _ in 0..depth {
            dims.push(rng.random_range(2..=16));
        }
        dims.push(1);
        let acts: Vec<Activation> = (0..dims.len() - 1)
            .map(|l| kinds[(case + l) % kinds.len()])
            .collect();
        let net = Mlp::glorot(dims, acts, &mut rng).map_err(|e| e.to_string())?;
        let batch = Matrix::from_vec(
            4,
            input,
            (0..4 * input)
                .map(|_| rng.random_range(-1.5..1.5))
                .collect(),
        )
        .unwrap();
        let loss = if case % 2 == 0 {
            LossKind::Sum
        } else {
            LossKind::HalfSquared
        };
        let e = grad_check(&net, loss, &batch).map_err(|e| e.to_string())?;
        worst = worst.max(e);
    }
    check(
        worst <= 1e-4,
        format!("worst relative error {worst:.2e} over 20 networks"),
    )
}

fn exact_binomial_cdf(k: u64, p: f64, n: u64) -> f64 {
    let p = BigRational::from_float(p).unwrap();
    let q = BigRational::one() - &p;
    let mut total = BigRational::zero();
    let mut binom = BigInt::one();
    for i in 0..=k.min(n) {
        let term = BigRational::from_integer(binom.clone())
            * num_traits::pow(p.clone(), i as usize)
            * num_traits::pow(q.clone(), (n - i) as usize);
        total += term;
        binom = binom * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    total.to_f64().unwrap()
}

const QUANTILES: [(f64, f64); 19] = [
    (1e-10, -6.361340902404056204695376),
    (1e-6, -4.753424308822898948193988),
    (0.001, -3.0902323061678135415404),
    (0.01, -2.326347874040841100885606),
    (0.025, -1.959963984540054235524594),
    (0.05, -1.644853626951472714863849),
    (0.1, -1.281551565544600466965103),
    (0.2, -0.8416212335729142051787061),
    (0.3, -0.5244005127080407840382893),
    (0.4, -0.2533471031357997987981962),
    (0.5, 0.0),
    (0.6, 0.2533471031357997987981962),
    (0.75, 0.674489750196081743202227),
    (0.9, 1.281551565544600466965103),
    (0.95, 1.644853626951472714863849),
    (0.975, 1.959963984540054235524594),
    (0.99, 2.326347874040841100885606),
    (0.999, 3.0902323061678135415404),
    (0.999999, 4.753424308822898948193988),
];

// 5
fn statistical_utilities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut cases: Vec<(u64, f64, u64)> = vec![
        (10, 0.05, 200),
        (0, 0.5, 2),
        (250, 0.5, 500),
        (3, 0.001, 500),
    ];
    for _ in 0..40 {
        let n = rng.random_range(1..=500);
        cases.push((rng.random_range(0..=n), rng.random_range(0.0..1.0), n));
    }
    let mut worst_b: f64 = 0.0;
    for &(k, p, n) in &cases {
        let err = (binomial_cdf(k as i64, p, n) - exact_binomial_cdf(k, p, n)).abs();
        worst_b = worst_b.max(err);
    }
    let worst_q = QUANTILES
        .iter()
        .map(|&(p, z)| (normal_quantile(p) - z).abs())
        .fold(0.0, f64::max);
    let mut violations = 0;
    let mut errors = 0;
    for _ in 0..1000 {
        let n = rng.random_range(10..=400);
        let gamma = rng.random_range(0.0..0.3);
        let alpha = rng.random_range(0.01..0.2);
        let m = rng.random_range(1..=60);
        let beta = rng.random_range(0.001..0.49);
        let theta_ref = binomial_cdf(violation_budget(gamma, n) as i64, alpha, n as u64);
        match lower_bound_params(gamma, n, alpha, m, beta) {
            Ok((theta, l)) => {
                let lower_ok = binomial_cdf(l as i64 - 1, theta, m as u64) <= beta;
                let maximal = l == m || binomial_cdf(l as i64, theta, m as u64) > beta;
                if theta != theta_ref || !(1..=m).contains(&l) || !lower_ok || !maximal {
                    violations += 1;
                }
            }
            Err(_) => {
                errors += 1;
                if binomial_cdf(0, theta_ref, m as u64) <= beta {
                    violations += 1;
                }
            }
        }
    }
    check(
        worst_b <= 1e-12 && worst_q <= 1e-6 && violations == 0,
        format!(
            "binomial worst {worst_b:.1e} on {} cases, quantile worst {worst_q:.1e}, \
             L sweep: {violations} violations in 1000 ({errors} correctly rejected)",
            cases.len()
        ),
    )
}

// 6 and 7 share one run
fn missing_data_and_twins() -> (Outcome, Outcome) {
    let cmp = match kde_compare(&KdeCompareConfig::default()) {
        Ok(c) => c,
        Err(e) => return (Err(e.to_string()), Err(e.to_string())),
    };
    let s = cmp.summary;
    let six = check(
        s.gan >= 3.0 * s.kde,
        format!(
            "inside-square fraction: original {:.3}, KDE {:.3}, GAN {:.3} (ratio {:.1})",
            s.original,
            s.kde,
            s.gan,
            s.gan / s.kde.max(f64::MIN_POSITIVE)
        ),
    );
    let trace = &cmp.gan.trace;
    let last = trace.twin.last().map_or(f64::NAN, |c| c.ratio);
    let seven = check(
        trace.converged && last <= 0.05 && trace.stopped_epoch < GanConfig::default().max_epochs,
        format!(
            "twin ratio {last:.4} at epoch {} (initial distance {:.3}, cap {})",
            trace.stopped_epoch,
            trace.initial_distance,
            GanConfig::default().max_epochs
        ),
    );
    (six, seven)
}

// 8
fn motivating_example() -> Outcome {
    let config = MotivatingConfig::default();
    let run = run_motivating(&config).map_err(|e| e.to_string())?;
    let r = &run.report;
    let alpha_prime = r.alpha_prime;
    if alpha_prime != 0.05 {
        return Err(format!("alpha' {alpha_prime}"));
    }
    for rec in r.records.iter().filter(|x| x.accepted) {
        if rec.upper > 0.05 {
            return Err(format!("admitted candidate with U = {}", rec.upper));
        }
    }
    for rec in r.records.iter().filter(|x| !x.x.is_empty()) {
        let val = run
            .gan
            .draw(config.saa.n_prime, rec.validation_seed)
            .map_err(|e| e.to_string())?;
        let q = violation_rate(&run.model.spec, &rec.x, &val).map_err(|e| e.to_string())?;
        if q != rec.q_hat {
            return Err(format!("stored q_hat {} but recomputed {q}", rec.q_hat));
        }
    }
    let m = config.saa.m;
    let mut lows = Vec::new();
    for batch in r.records.chunks(m) {
        let mut objs: Vec<f64> = batch.iter().map(|x| x.objective).collect();
        objs.sort_by(f64::total_cmp);
        lows.push(objs[r.l - 1]);
    }
    let v = lows.iter().sum::<f64>() / lows.len() as f64;
    let g = r
        .records
        .iter()
        .filter(|x| x.accepted)
        .map(|x| x.objective)
        .fold(f64::INFINITY, f64::min);
    if v != r.lower_bound || g != r.upper_bound || r.gap != g - v {
        return Err(format!(
            "report (g {}, v {}, gap {}) vs recomputed ({g}, {v}, {})",
            r.upper_bound,
            r.lower_bound,
            r.gap,
            g - v
        ));
    }
    let x = r.best_solution.clone().ok_or("no validated solution")?;
    let fresh = sample(&run.gan, 10_000, 0xF2E5).map_err(|e| e.to_string())?;
    let out = violation_rate(&run.model.spec, &x, &fresh).map_err(|e| e.to_string())?;
    check(
        out <= 0.07,
        format!(
            "status {:?}, g {g}, v {v}, x {x:?}, violation on 1e4 fresh samples {out:.4}, {} records",
            r.status,
            r.records.len()
        ),
    )
}

// 9
fn degenerate_distribution() -> Outcome {
    let spec = CcpSpec {
        lower: vec![0.0, 0.0],
        upper: vec![10.0, 10.0],
        cost: vec![1.0, 2.0],
        chance_rows: vec![
            ChanceRow {
                a: vec![-1.0, -1.0],
                b: vec![1.0, 0.0],
                c: 0.0,
            },
            ChanceRow {
                a: vec![0.0, -1.0],
                b: vec![0.0, 1.0],
                c: 0.0,
            },
        ],
        deterministic_rows: vec![],
        alpha: 0.1,
        d: 0.1,
    };
    let zeta = vec![3.0, 1.25];
    let mut direct = MilpProblem::new();
    direct.add_continuous("x0", 0.0, 10.0, 1.0);
    direct.add_continuous("x1", 0.0, 10.0, 2.0);
    direct.add_row("r0", vec![(0, 1.0), (1, 1.0)], Sense::Ge, 3.0);
    direct.add_row("r1", vec![(1, 1.0)], Sense::Ge, 1.25);
    let want = solve_lp(&direct).map_err(|e| e.to_string())?.objective;
    let params = SaaParams {
        n: 20,
        n_prime: 200,
        m: 10,
        h: 3,
        gap_mode: GapMode::Relative,
        seed: 9,
        ..SaaParams::default()
    };
    let model = CcpModel {
        spec,
        rule: BigMRule::BoundBased,
    };
    let r = run_algorithm(&model, &Constant(zeta), &params).map_err(|e| e.to_string())?;
    check(
        r.status == ReportStatus::Converged
            && r.outer_iterations == 1
            && r.gap == 0.0
            && (r.upper_bound - want).abs() <= 1e-6
            && (r.lower_bound - want).abs() <= 1e-6,
        format!(
            "UB {} LB {} gap {} after {} outer iteration(s); direct optimum {want}",
            r.upper_bound, r.lower_bound, r.gap, r.outer_iterations
        ),
    )
}

fn solution_invariants(inst: &SupplyChainInstance, r: &SolveResult) -> Result<(), String> {
    let tol = 1e-6;
    r.design.validate(inst).map_err(|e| e.to_string())?;
    let (ni, nj, nk, nt) = (inst.sites, inst.customers, inst.suppliers, inst.periods);
    let keep = 1.0 - inst.eta;
    for i in 0..ni {
        let cap = r.design.capacity(i);
        for t in 0..nt {
            if r.production(i, t) > cap + tol {
                return Err(format!("site {i} period {t} exceeds capacity"));
            }
            let raw: f64 = (0..nk).map(|k| r.z[k][i][t]).sum();
            let next = (t + 1) % nt;
            let expect =
                keep * (r.inventory[i][t] + raw - r.production(i, t) / inst.conversion_rate);
            if (expect - r.inventory[i][next]).abs() > tol * (1.0 + expect.abs()) {
                return Err(format!("inventory balance at site {i}, period {t}"));
            }
        }
    }
    for k in 0..nk {
        for t in 0..nt {
            let used: f64 = (0..ni).map(|i| r.z[k][i][t]).sum();
            if used > inst.bm[k][t] + tol {
                return Err(format!("supplier {k} period {t} over its limit"));
            }
        }
    }
    let flows =
        r.x.iter()
            .flatten()
            .flatten()
            .chain(r.z.iter().flatten().flatten());
    if flows
        .chain(r.inventory.iter().flatten())
        .chain(r.external.iter().flatten())
        .any(|v| *v < -tol)
    {
        return Err("negative flow".into());
    }
    if (r.breakdown.total() - r.total_cost).abs() > tol {
        return Err("breakdown does not sum to the total".into());
    }
    let capital = r.design.capital_cost(inst).map_err(|e| e.to_string())?;
    if (capital - r.breakdown.capital).abs() > 1e-6 * (1.0 + capital) {
        return Err(format!(
            "capital {} vs interpolated {capital}",
            r.breakdown.capital
        ));
    }
    let _ = nj;
    Ok(())
}

// 10
fn supply_chain_desk() -> Outcome {
    let config = SupplyChainConfig {
        seed: 10,
        ..SupplyChainConfig::default()
    };
    let history = config.history().map_err(|e| e.to_string())?;
    let (_, scenarios) = demand_scenarios(&config, &history).map_err(|e| e.to_string())?;
    if scenarios.len() != 30 {
        return Err(format!("{} scenarios", scenarios.len()));
    }
    let mut results = Vec::new();
    for m in ScMethod::ALL {
        let r =
            solve_supply_chain(&config, m, &scenarios).map_err(|e| format!("{}: {e}", m.name()))?;
        solution_invariants(&config.instance, &r).map_err(|e| format!("{}: {e}", m.name()))?;
        results.push(r);
    }
    let (det, two, dr) = (&results[0], &results[1], &results[2]);
    let held = config.holdout(100).map_err(|e| e.to_string())?;
    let sim_det =
        simulate(&det.design, &config.instance, &held, &config.milp).map_err(|e| e.to_string())?;
    let sim_dr =
        simulate(&dr.design, &config.instance, &held, &config.milp).map_err(|e| e.to_string())?;
    let slack = 1e-6 * det.total_cost.abs().max(1.0);
    check(
        det.total_cost <= two.total_cost + slack
            && two.total_cost <= dr.total_cost + slack
            && sim_dr.external_count <= sim_det.external_count,
        format!(
            "cost deterministic {:.2} <= two-stage {:.2} <= DRCCP {:.2}; scenarios using external product: \
             DRCCP {} vs deterministic {} of 100",
            det.total_cost, two.total_cost, dr.total_cost, sim_dr.external_count, sim_det.external_count
        ),
    )
}

// 11
fn gamma_monotonicity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let gammas = [0.0, 0.05, 0.1, 0.2];
    let mut strict = 0;
    for case in 0..20 {
        let n = rng.random_range(2..=4);
        let rows = rng.random_range(1..=3);
        let zdim = rng.random_range(1..=3);
        let spec = random_spec(&mut rng, n, rows, zdim);
        let samples = Dataset::from_rows(
            &(0..20)
                .map(|_| (0..zdim).map(|_| rng.random_range(-1.0..2.0)).collect())
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let mut prev = f64::INFINITY;
        for &g in &gammas {
            let p =
                build_saa(&spec, &samples, g, BigMRule::BoundBased).map_err(|e| e.to_string())?;
            let sol = solve_milp(&p, &exact()).map_err(|e| e.to_string())?;
            let obj = if sol.status == MilpStatus::Optimal {
                sol.objective
            } else {
                f64::INFINITY
            };
            if obj > prev + 1e-9 * prev.abs().max(1.0) {
                return Err(format!(
                    "case {case}: objective rose from {prev} to {obj} at gamma {g}"
                ));
            }
            if obj < prev - 1e-9 {
                strict += 1;
            }
            prev = obj;
        }
    }
    Ok(format!(
        "20 specs x 4 risk levels nonincreasing ({strict} strict decreases)"
    ))
}

fn guarded(f: impl FnOnce() -> Outcome) -> Outcome {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    })
}

fn main() {
    let names = [
        "modified risk level",
        "model-size reproduction",
        "MILP oracle equivalence",
        "gradient fidelity",
        "statistical utilities",
        "missing-data rectangle fraction",
        "twin-generator stopping",
        "motivating example end-to-end",
        "degenerate-distribution identity",
        "supply-chain desk instance",
        "SAA monotonicity in gamma",
    ];
    let start = Instant::now();
    let results: Vec<(Outcome, f64)> = std::thread::scope(|s| {
        let timed = |f: fn() -> Outcome| {
            move || {
                let t = Instant::now();
                (guarded(f), t.elapsed().as_secs_f64())
            }
        };
        let singles: Vec<_> = [
            modified_risk_level as fn() -> Outcome,
            model_size,
            milp_oracle,
            gradient_fidelity,
            statistical_utilities,
        ]
        .into_iter()
        .map(|f| s.spawn(timed(f)))
        .collect();
        let pair = s.spawn(|| {
            let t = Instant::now();
            let r = catch_unwind(missing_data_and_twins)
                .unwrap_or_else(|_| (Err("panicked".into()), Err("panicked".into())));
            (r, t.elapsed().as_secs_f64())
        });
        let rest: Vec<_> = [
            motivating_example as fn() -> Outcome,
            degenerate_distribution,
            supply_chain_desk,
            gamma_monotonicity,
        ]
        .into_iter()
        .map(|f| s.spawn(timed(f)))
        .collect();
        let mut out: Vec<(Outcome, f64)> = singles.into_iter().map(|h| h.join().unwrap()).collect();
        let ((six, seven), secs) = pair.join().unwrap();
        out.push((six, secs));
        out.push((seven, secs));
        out.extend(rest.into_iter().map(|h| h.join().unwrap()));
        out
    });
    let mut failed = 0;
    for (k, ((res, secs), name)) in results.iter().zip(names).enumerate() {
        let (tag, detail) = match res {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "[{tag}] criterion {:>2} {name} ({secs:.1}s): {detail}",
            k + 1
        );
    }
    println!(
        "{} of {} criteria passed in {:.1}s",
        names.len() - failed,
        names.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
