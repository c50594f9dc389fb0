//! Revised primal simplex over bounded variables with a dense basis inverse.
//!
//! Rows are brought to the form `a x + s = b` with `s >= 0` (`<=` rows) or
//! `s = 0` (`=` rows); `>=` rows are negated first. Phase 1 adds one
//! artificial per row whose slack cannot absorb the initial residual.

use crate::error::{Error, Result};

use super::{LpSolution, LpStatus, MilpProblem, Sense};

const FEAS_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const DRIVE_OUT_TOL: f64 = 1e-7;
const BLAND_AFTER: usize = 1000;
const REFACTOR_EVERY: usize = 500;
const NONBASIC: usize = usize::MAX;

/// Column-oriented copy of a problem, shared by every node of a search.
pub(crate) struct StandardForm {
    n: usize,
    m: usize,
    col_start: Vec<usize>,
    col_row: Vec<usize>,
    col_val: Vec<f64>,
    rhs: Vec<f64>,
    equality: Vec<bool>,
    cost: Vec<f64>,
    opt_tol: f64,
}

impl StandardForm {
    pub(crate) fn new(problem: &MilpProblem) -> Self {
        let n = problem.num_vars();
        let m = problem.num_rows();
        let mut counts = vec![0usize; n + 1];
        for row in &problem.rows {
            for &(j, _) in &row.coeffs {
                counts[j + 1] += 1;
            }
        }
        for j in 0..n {
            counts[j + 1] += counts[j];
        }
        let col_start = counts.clone();
        let nnz = col_start[n];
        let mut fill = counts;
        let mut col_row = vec![0; nnz];
        let mut col_val = vec![0.0; nnz];
        let mut rhs = Vec::with_capacity(m);
        let mut equality = Vec::with_capacity(m);
        for (i, row) in problem.rows.iter().enumerate() {
            let sign = if row.sense == Sense::Ge { -1.0 } else { 1.0 };
            for &(j, a) in &row.coeffs {
                col_row[fill[j]] = i;
                col_val[fill[j]] = sign * a;
                fill[j] += 1;
            }
            rhs.push(sign * row.rhs);
            equality.push(row.sense == Sense::Eq);
        }
        let cost: Vec<f64> = problem.vars.iter().map(|v| v.cost).collect();
        let cmax = cost.iter().fold(1.0f64, |acc, c| acc.max(c.abs()));
        Self {
            n,
            m,
            col_start,
            col_row,
            col_val,
            rhs,
            equality,
            cost,
            opt_tol: 1e-9 * cmax,
        }
    }
}

/// Solves the LP relaxation of `problem` (integrality flags are ignored).
pub fn solve_lp(problem: &MilpProblem) -> Result<LpSolution> {
    problem.validate()?;
    let sf = StandardForm::new(problem);
    let lb: Vec<f64> = problem.vars.iter().map(|v| v.lower).collect();
    let ub: Vec<f64> = problem.vars.iter().map(|v| v.upper).collect();
    solve_bounded(&sf, &lb, &ub)
}

/// Solves the relaxation with structural bounds replaced by `lb`/`ub`.
pub(crate) fn solve_bounded(sf: &StandardForm, lb: &[f64], ub: &[f64]) -> Result<LpSolution> {
    if lb.iter().zip(ub).any(|(l, u)| l > u) {
        return Ok(LpSolution {
            status: LpStatus::Infeasible,
            values: Vec::new(),
            objective: f64::INFINITY,
            iterations: 0,
        });
    }
    let mut s = Simplex::new(sf, lb, ub);
    s.run()
}

struct Simplex<'a> {
    sf: &'a StandardForm,
    m: usize,
    lb: Vec<f64>,
    ub: Vec<f64>,
    cost: Vec<f64>,
    x: Vec<f64>,
    basis: Vec<usize>,
    pos: Vec<usize>,
    /// B⁻¹ stored column-major: column `r` is `binv[r*m..(r+1)*m]`.
    binv: Vec<f64>,
    /// Simplex multipliers `c_B B⁻¹`, updated at each pivot.
    y: Vec<f64>,
    /// Devex reference weights for pricing.
    weights: Vec<f64>,
    art_row: Vec<usize>,
    art_sign: Vec<f64>,
    iterations: usize,
    iteration_cap: usize,
    since_refactor: usize,
}

enum Step {
    Optimal,
    Unbounded,
    Moved,
}

impl<'a> Simplex<'a> {
    fn new(sf: &'a StandardForm, lb_s: &[f64], ub_s: &[f64]) -> Self {
        let (n, m) = (sf.n, sf.m);
        let mut lb = lb_s.to_vec();
        let mut ub = ub_s.to_vec();
        let mut x = lb.clone();
        // residual b - A x_N with structurals at their lower bounds
        let mut resid = sf.rhs.clone();
        for j in 0..n {
            if x[j] != 0.0 {
                for k in sf.col_start[j]..sf.col_start[j + 1] {
                    resid[sf.col_row[k]] -= sf.col_val[k] * x[j];
                }
            }
        }
        let mut basis = vec![0; m];
        let mut art_row = Vec::new();
        let mut art_sign = Vec::new();
        for i in 0..m {
            lb.push(0.0);
            ub.push(if sf.equality[i] { 0.0 } else { f64::INFINITY });
            let fits = if sf.equality[i] {
                resid[i].abs() <= FEAS_TOL
            } else {
                resid[i] >= -FEAS_TOL
            };
            if fits {
                x.push(resid[i].max(0.0));
                basis[i] = n + i;
            } else {
                x.push(0.0);
                art_row.push(i);
                art_sign.push(resid[i].signum());
            }
        }
        for (k, &i) in art_row.iter().enumerate() {
            lb.push(0.0);
            ub.push(f64::INFINITY);
            x.push(resid[i].abs());
            basis[i] = n + m + k;
        }
        let total = x.len();
        let mut pos = vec![NONBASIC; total];
        for (r, &j) in basis.iter().enumerate() {
            pos[j] = r;
        }
        let mut binv = vec![0.0; m * m];
        for (r, &j) in basis.iter().enumerate() {
            binv[r * m + r] = if j >= n + m { art_sign[j - n - m] } else { 1.0 };
        }
        Self {
            sf,
            m,
            lb,
            ub,
            cost: vec![0.0; total],
            x,
            basis,
            pos,
            binv,
            y: vec![0.0; m],
            weights: vec![1.0; total],
            art_row,
            art_sign,
            iterations: 0,
            iteration_cap: 50 * (total + m) + 10_000,
            since_refactor: 0,
        }
    }

    fn num_cols(&self) -> usize {
        self.x.len()
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.sf.n + self.m
    }

    /// Calls `f(row, value)` for each nonzero of column `j`.
    fn for_col(&self, j: usize, mut f: impl FnMut(usize, f64)) {
        let sf = self.sf;
        if j < sf.n {
            for k in sf.col_start[j]..sf.col_start[j + 1] {
                f(sf.col_row[k], sf.col_val[k]);
            }
        } else if j < sf.n + self.m {
            f(j - sf.n, 1.0);
        } else {
            let k = j - sf.n - self.m;
            f(self.art_row[k], self.art_sign[k]);
        }
    }

    fn run(&mut self) -> Result<LpSolution> {
        let n = self.sf.n;
        if !self.art_row.is_empty() {
            for j in n + self.m..self.num_cols() {
                self.cost[j] = 1.0;
            }
            if let Step::Unbounded = self.optimize()? {
                return Err(Error::numeric("phase 1 reported unbounded"));
            }
            self.recompute_basics();
            let infeas: f64 = (n + self.m..self.num_cols()).map(|j| self.x[j]).sum();
            let scale = self.sf.rhs.iter().fold(1.0f64, |a, b| a.max(b.abs()));
            if infeas > 1e-7 * scale {
                return Ok(LpSolution {
                    status: LpStatus::Infeasible,
                    values: Vec::new(),
                    objective: f64::INFINITY,
                    iterations: self.iterations,
                });
            }
            for j in n + self.m..self.num_cols() {
                self.ub[j] = 0.0;
                self.x[j] = 0.0;
                self.cost[j] = 0.0;
            }
            self.drive_out_artificials();
            self.recompute_basics();
        }
        self.cost[..n].copy_from_slice(&self.sf.cost);
        let status = match self.optimize()? {
            Step::Unbounded => LpStatus::Unbounded,
            _ => LpStatus::Optimal,
        };
        self.recompute_basics();
        let mut values = self.x[..n].to_vec();
        for (j, v) in values.iter_mut().enumerate() {
            *v = v.clamp(self.lb[j], self.ub[j]);
        }
        let objective = if status == LpStatus::Unbounded {
            f64::NEG_INFINITY
        } else {
            values.iter().zip(&self.sf.cost).map(|(v, c)| v * c).sum()
        };
        Ok(LpSolution {
            status,
            values,
            objective,
            iterations: self.iterations,
        })
    }

    fn optimize(&mut self) -> Result<Step> {
        self.y = self.duals();
        self.weights.fill(1.0);
        let mut stalled = 0usize;
        loop {
            if self.iterations >= self.iteration_cap {
                return Err(Error::numeric("simplex iteration limit reached"));
            }
            let bland = stalled >= BLAND_AFTER;
            match self.iterate(bland)? {
                (Step::Optimal, _) => return Ok(Step::Optimal),
                (Step::Unbounded, _) => return Ok(Step::Unbounded),
                (Step::Moved, improving) => {
                    if improving {
                        stalled = 0;
                    } else {
                        stalled += 1;
                    }
                }
            }
        }
    }

    fn duals(&self) -> Vec<f64> {
        let m = self.m;
        let cb: Vec<f64> = self.basis.iter().map(|&j| self.cost[j]).collect();
        (0..m)
            .map(|r| {
                let col = &self.binv[r * m..(r + 1) * m];
                col.iter().zip(&cb).map(|(a, c)| a * c).sum()
            })
            .collect()
    }

    fn reduced_cost(&self, j: usize, y: &[f64]) -> f64 {
        let mut d = self.cost[j];
        self.for_col(j, |r, a| d -= y[r] * a);
        d
    }

    /// B⁻¹ a_j.
    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut alpha = vec![0.0; m];
        self.for_col(j, |r, a| {
            let col = &self.binv[r * m..(r + 1) * m];
            for (o, b) in alpha.iter_mut().zip(col) {
                *o += a * b;
            }
        });
        alpha
    }

    /// One pivot. Returns the step kind and whether the objective improved.
    fn iterate(&mut self, bland: bool) -> Result<(Step, bool)> {
        let y = std::mem::take(&mut self.y);
        let tol = self.sf.opt_tol;
        let mut entering = None;
        let mut best = 0.0;
        for j in 0..self.num_cols() {
            if self.pos[j] != NONBASIC || self.ub[j] - self.lb[j] <= 0.0 {
                continue;
            }
            let d = self.reduced_cost(j, &y);
            let at_upper = self.x[j] >= self.ub[j];
            let score = if (!at_upper && d < -tol) || (at_upper && d > tol) {
                d * d / self.weights[j]
            } else {
                continue;
            };
            if bland {
                entering = Some((j, d));
                break;
            }
            if score > best {
                best = score;
                entering = Some((j, d));
            }
        }
        self.y = y;
        let Some((q, dq)) = entering else {
            return Ok((Step::Optimal, false));
        };
        let dir = if dq < 0.0 { 1.0 } else { -1.0 };
        let alpha = self.ftran(q);

        let leave = if bland {
            self.ratio_bland(&alpha, dir)
        } else {
            self.ratio_harris(&alpha, dir)
        };
        let span = self.ub[q] - self.lb[q];
        let (t, leave) = match leave {
            Some((r, t)) if t < span => (t, Some(r)),
            _ if span.is_finite() => (span, None),
            _ => return Ok((Step::Unbounded, false)),
        };

        self.iterations += 1;
        self.x[q] += dir * t;
        for (r, a) in alpha.iter().enumerate() {
            if *a != 0.0 {
                let j = self.basis[r];
                self.x[j] -= dir * t * a;
            }
        }
        match leave {
            None => {
                // bound flip
                self.x[q] = if dir > 0.0 { self.ub[q] } else { self.lb[q] };
            }
            Some(r) => {
                let out = self.basis[r];
                let delta = -dir * alpha[r];
                self.x[out] = if delta < 0.0 {
                    self.lb[out]
                } else {
                    self.ub[out]
                };
                if !bland {
                    self.update_weights(r, q, &alpha);
                }
                self.pivot(r, q, &alpha, dq);
            }
        }
        Ok((Step::Moved, t * dq.abs() > 1e-12))
    }

    /// Devex update from the pivot row `r` of `B⁻¹ A` before the basis change.
    fn update_weights(&mut self, r: usize, q: usize, alpha: &[f64]) {
        let m = self.m;
        let rho: Vec<f64> = (0..m).map(|c| self.binv[c * m + r]).collect();
        let arq = alpha[r];
        let wq = self.weights[q];
        let mut max_w: f64 = 0.0;
        for j in 0..self.num_cols() {
            if self.pos[j] != NONBASIC || j == q {
                continue;
            }
            let mut arj = 0.0;
            self.for_col(j, |i, a| arj += rho[i] * a);
            if arj != 0.0 {
                let ratio = arj / arq;
                let w = (ratio * ratio * wq).max(self.weights[j]);
                self.weights[j] = w;
                max_w = max_w.max(w);
            }
        }
        let out = self.basis[r];
        self.weights[out] = (wq / (arq * arq)).max(1.0);
        if max_w > 1e8 {
            self.weights.fill(1.0);
        }
    }

    /// Two-pass ratio test: the first pass relaxes bounds by `FEAS_TOL`, the
    /// second picks the largest pivot among rows within that step.
    fn ratio_harris(&self, alpha: &[f64], dir: f64) -> Option<(usize, f64)> {
        let mut t_max = f64::INFINITY;
        for (r, &a) in alpha.iter().enumerate() {
            if a.abs() <= PIVOT_TOL {
                continue;
            }
            let j = self.basis[r];
            let delta = -dir * a;
            let lim = if delta < 0.0 {
                (self.x[j] - self.lb[j] + FEAS_TOL) / -delta
            } else if self.ub[j].is_finite() {
                (self.ub[j] - self.x[j] + FEAS_TOL) / delta
            } else {
                continue;
            };
            t_max = t_max.min(lim);
        }
        if t_max == f64::INFINITY {
            return None;
        }
        let mut pick: Option<(usize, f64)> = None;
        let mut best_pivot = 0.0;
        for (r, &a) in alpha.iter().enumerate() {
            if a.abs() <= PIVOT_TOL {
                continue;
            }
            let j = self.basis[r];
            let delta = -dir * a;
            let ratio = if delta < 0.0 {
                (self.x[j] - self.lb[j]) / -delta
            } else if self.ub[j].is_finite() {
                (self.ub[j] - self.x[j]) / delta
            } else {
                continue;
            };
            if ratio <= t_max && a.abs() > best_pivot {
                best_pivot = a.abs();
                pick = Some((r, ratio.max(0.0)));
            }
        }
        pick
    }

    /// Textbook minimum ratio, ties broken by lowest variable index.
    fn ratio_bland(&self, alpha: &[f64], dir: f64) -> Option<(usize, f64)> {
        let mut pick: Option<(usize, f64)> = None;
        for (r, &a) in alpha.iter().enumerate() {
            if a.abs() <= PIVOT_TOL {
                continue;
            }
            let j = self.basis[r];
            let delta = -dir * a;
            let ratio = if delta < 0.0 {
                (self.x[j] - self.lb[j]) / -delta
            } else if self.ub[j].is_finite() {
                (self.ub[j] - self.x[j]) / delta
            } else {
                continue;
            };
            let ratio = ratio.max(0.0);
            pick = match pick {
                None => Some((r, ratio)),
                Some((pr, pt)) => {
                    if ratio < pt - 1e-12 || (ratio <= pt + 1e-12 && j < self.basis[pr]) {
                        Some((r, ratio))
                    } else {
                        Some((pr, pt))
                    }
                }
            };
        }
        pick
    }

    /// Basis change at row `r`; `dq` is the entering reduced cost, used to
    /// update the multipliers as `y += dq / alpha_r * (row r of B⁻¹)`.
    fn pivot(&mut self, r: usize, q: usize, alpha: &[f64], dq: f64) {
        let m = self.m;
        let piv = alpha[r];
        let nz: Vec<(usize, f64)> = alpha
            .iter()
            .enumerate()
            .filter(|(i, a)| **a != 0.0 && *i != r)
            .map(|(i, a)| (i, *a))
            .collect();
        let step = dq / piv;
        for c in 0..m {
            let col = &mut self.binv[c * m..(c + 1) * m];
            if col[r] == 0.0 {
                continue;
            }
            if step != 0.0 {
                self.y[c] += step * col[r];
            }
            let v = col[r] / piv;
            for &(i, a) in &nz {
                col[i] -= a * v;
            }
            col[r] = v;
        }
        let out = self.basis[r];
        self.pos[out] = NONBASIC;
        self.basis[r] = q;
        self.pos[q] = r;
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_EVERY {
            self.refactor();
            self.y = self.duals();
        }
    }

    /// Rebuilds B⁻¹ from the basis columns by Gauss-Jordan elimination.
    fn refactor(&mut self) {
        let m = self.m;
        self.since_refactor = 0;
        // row-major dense B and identity
        let mut b = vec![0.0; m * m];
        for (r, &j) in self.basis.iter().enumerate() {
            let mut col = Vec::new();
            self.for_col(j, |i, a| col.push((i, a)));
            for (i, a) in col {
                b[i * m + r] += a;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        let mut perm: Vec<usize> = (0..m).collect();
        for k in 0..m {
            let mut p = k;
            let mut best = b[perm[k] * m + k].abs();
            for (idx, &row) in perm.iter().enumerate().skip(k + 1) {
                let v = b[row * m + k].abs();
                if v > best {
                    best = v;
                    p = idx;
                }
            }
            if best < 1e-12 {
                // singular basis; keep the product-form inverse
                return;
            }
            perm.swap(k, p);
            let pr = perm[k];
            let pv = b[pr * m + k];
            for c in 0..m {
                b[pr * m + c] /= pv;
                inv[pr * m + c] /= pv;
            }
            for &row in perm.iter() {
                if row == pr {
                    continue;
                }
                let f = b[row * m + k];
                if f == 0.0 {
                    continue;
                }
                for c in 0..m {
                    let bv = b[pr * m + c];
                    if bv != 0.0 {
                        b[row * m + c] -= f * bv;
                    }
                    let iv = inv[pr * m + c];
                    if iv != 0.0 {
                        inv[row * m + c] -= f * iv;
                    }
                }
            }
        }
        // row perm[k] of `inv` is row k of B⁻¹; store column-major
        for k in 0..m {
            let row = perm[k];
            for c in 0..m {
                self.binv[c * m + k] = inv[row * m + c];
            }
        }
        self.recompute_basics();
    }

    /// x_B = B⁻¹ (b - N x_N).
    fn recompute_basics(&mut self) {
        let m = self.m;
        let mut resid = self.sf.rhs.clone();
        for j in 0..self.num_cols() {
            if self.pos[j] == NONBASIC && self.x[j] != 0.0 {
                let xj = self.x[j];
                self.for_col(j, |r, a| resid[r] -= a * xj);
            }
        }
        let mut xb = vec![0.0; m];
        for (c, rc) in resid.iter().enumerate() {
            if *rc != 0.0 {
                let col = &self.binv[c * m..(c + 1) * m];
                for (o, b) in xb.iter_mut().zip(col) {
                    *o += rc * b;
                }
            }
        }
        for (r, v) in xb.into_iter().enumerate() {
            self.x[self.basis[r]] = v;
        }
    }

    /// Replaces basic artificials (all at zero after phase 1) by
    /// non-artificial columns where a usable pivot exists. Rows where none
    /// exists are redundant; their artificial stays basic, fixed at zero.
    fn drive_out_artificials(&mut self) {
        let m = self.m;
        for r in 0..m {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            let row: Vec<f64> = (0..m).map(|c| self.binv[c * m + r]).collect();
            let mut pick = None;
            let mut best = DRIVE_OUT_TOL;
            for j in 0..self.sf.n + m {
                if self.pos[j] != NONBASIC {
                    continue;
                }
                let mut v = 0.0;
                self.for_col(j, |i, a| v += row[i] * a);
                if v.abs() > best {
                    best = v.abs();
                    pick = Some(j);
                }
            }
            if let Some(q) = pick {
                let alpha = self.ftran(q);
                self.pivot(r, q, &alpha, 0.0);
            }
        }
    }
}
