//! Two-phase bounded-variable revised simplex with an explicit dense basis
//! inverse.
//!
//! Rows are turned into equalities by one logical variable each (`<=` gives
//! bounds `[0, inf)`, `>=` gives `(-inf, 0]`, `=` gives `[0, 0]`). Rows whose
//! logical variable cannot absorb the initial residual get an artificial
//! variable; phase 1 minimizes the artificial sum. Pricing is Dantzig's rule
//! with a switch to Bland's rule after 500 consecutive degenerate pivots.
//! The basis inverse is updated per pivot and refactorized from scratch at a
//! fixed interval. All tie-breaks are by index, so the iterate sequence is a
//! deterministic function of the program and options.

use super::dense;
use super::{LinearProgram, LpError, LpSolution, RowSense, SolveOptions, SolveStatus};

const PIVOT_TOL: f64 = 1e-9;
const DEGEN_STEP_TOL: f64 = 1e-10;
const BLAND_TRIGGER: usize = 500;
const REFACTOR_INTERVAL: usize = 100;
const RATIO_TIE_TOL: f64 = 1e-12;

/// Solves `lp` to a status-qualified solution.
pub fn solve(lp: &LinearProgram, opts: &SolveOptions) -> Result<LpSolution, LpError> {
    lp.validate()?;
    if opts.scale {
        return solve_scaled(lp, opts);
    }
    let mut worker = Worker::new(lp, opts);
    Ok(worker.run())
}

fn solve_scaled(lp: &LinearProgram, opts: &SolveOptions) -> Result<LpSolution, LpError> {
    let (scaled, row_scale, col_scale) = equilibrate(lp);
    let inner_opts = SolveOptions { scale: false, ..opts.clone() };
    let mut worker = Worker::new(&scaled, &inner_opts);
    let mut sol = worker.run();
    for (j, x) in sol.x.iter_mut().enumerate() {
        *x *= col_scale[j];
    }
    for (i, y) in sol.duals.iter_mut().enumerate() {
        *y *= row_scale[i];
    }
    if sol.status == SolveStatus::Optimal || sol.status == SolveStatus::IterationLimit {
        sol.objective = lp.objective_value(&sol.x);
    }
    sol.scaled = true;
    Ok(sol)
}

/// Power-of-two row/column equilibration; exact to unscale.
fn equilibrate(lp: &LinearProgram) -> (LinearProgram, Vec<f64>, Vec<f64>) {
    let m = lp.num_rows();
    let n = lp.num_cols();
    let mut row_max = vec![0.0f64; m];
    for (row, _, v) in lp.triplets() {
        row_max[row] = row_max[row].max(v.abs());
    }
    let pow2 = |x: f64| -> f64 {
        if x <= 0.0 {
            1.0
        } else {
            (2.0f64).powi(-(x.log2().round() as i32))
        }
    };
    let row_scale: Vec<f64> = row_max.iter().map(|&x| pow2(x)).collect();
    let mut col_max = vec![0.0f64; n];
    for (row, col, v) in lp.triplets() {
        col_max[col] = col_max[col].max((row_scale[row] * v).abs());
    }
    let col_scale: Vec<f64> = col_max.iter().map(|&x| pow2(x)).collect();

    let mut scaled = LinearProgram::new();
    for j in 0..n {
        let (lo, up) = lp.bounds(j);
        scaled.add_col(lp.objective()[j] * col_scale[j], lo / col_scale[j], up / col_scale[j]);
    }
    for i in 0..m {
        scaled.add_row(lp.row_sense(i), lp.rhs(i) * row_scale[i], &[]);
    }
    for (row, col, v) in lp.triplets() {
        scaled.cols[col].push((row, v * row_scale[row] * col_scale[col]));
    }
    (scaled, row_scale, col_scale)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum VState {
    Basic(usize),
    AtLower,
    AtUpper,
    /// Nonbasic free variable resting at zero.
    FreeZero,
}

enum Step {
    Optimal,
    Unbounded,
    Moved,
}

struct Worker<'a> {
    lp: &'a LinearProgram,
    m: usize,
    n_struct: usize,
    n_total: usize,
    /// Columns of logical and artificial variables (index `j - n_struct`).
    extra_cols: Vec<Vec<(usize, f64)>>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    cost: Vec<f64>,
    xval: Vec<f64>,
    state: Vec<VState>,
    basis: Vec<usize>,
    binv: Vec<f64>,
    n_artificial: usize,
    feas_tol: f64,
    opt_tol: f64,
    max_iters: usize,
    anti_cycling: bool,
    iterations: usize,
    degen_streak: usize,
    bland: bool,
    pivots_since_refactor: usize,
    unbounded: bool,
    numeric_failure: bool,
}

impl<'a> Worker<'a> {
    fn new(lp: &'a LinearProgram, opts: &SolveOptions) -> Self {
        let m = lp.num_rows();
        let n_struct = lp.num_cols();
        let mut lower = Vec::with_capacity(n_struct + m);
        let mut upper = Vec::with_capacity(n_struct + m);
        for j in 0..n_struct {
            let (lo, up) = lp.bounds(j);
            lower.push(lo);
            upper.push(up);
        }
        let mut extra_cols = Vec::with_capacity(m);
        for i in 0..m {
            extra_cols.push(vec![(i, 1.0)]);
            match lp.row_sense(i) {
                RowSense::Le => {
                    lower.push(0.0);
                    upper.push(f64::INFINITY);
                }
                RowSense::Ge => {
                    lower.push(f64::NEG_INFINITY);
                    upper.push(0.0);
                }
                RowSense::Eq => {
                    lower.push(0.0);
                    upper.push(0.0);
                }
            }
        }

        let mut state = Vec::with_capacity(n_struct + m);
        let mut xval = Vec::with_capacity(n_struct + m);
        for j in 0..n_struct {
            if lower[j].is_finite() {
                state.push(VState::AtLower);
                xval.push(lower[j]);
            } else if upper[j].is_finite() {
                state.push(VState::AtUpper);
                xval.push(upper[j]);
            } else {
                state.push(VState::FreeZero);
                xval.push(0.0);
            }
        }

        // Residual each logical variable must absorb.
        let mut residual: Vec<f64> = (0..m).map(|i| lp.rhs(i)).collect();
        for j in 0..n_struct {
            if xval[j] != 0.0 {
                for &(row, v) in lp.col_entries(j) {
                    residual[row] -= v * xval[j];
                }
            }
        }

        let mut basis = vec![usize::MAX; m];
        let mut binv = vec![0.0; m * m];
        // Rows whose logical variable cannot take the residual: (row, sign,
        // artificial start value).
        let mut pending: Vec<(usize, f64, f64)> = Vec::new();
        for i in 0..m {
            let slack = n_struct + i;
            let (slo, sup) = (lower[slack], upper[slack]);
            let r = residual[i];
            if r >= slo - 1e-12 && r <= sup + 1e-12 {
                state.push(VState::Basic(i));
                xval.push(r);
                basis[i] = slack;
                binv[i * m + i] = 1.0;
            } else {
                let clamped = r.clamp(slo, sup);
                state.push(if clamped == slo { VState::AtLower } else { VState::AtUpper });
                xval.push(clamped);
                let gap = r - clamped;
                pending.push((i, if gap >= 0.0 { 1.0 } else { -1.0 }, gap.abs()));
            }
        }
        let n_artificial = pending.len();
        for (idx, &(row, sign, value)) in pending.iter().enumerate() {
            let art = n_struct + m + idx;
            extra_cols.push(vec![(row, sign)]);
            lower.push(0.0);
            upper.push(f64::INFINITY);
            state.push(VState::Basic(row));
            xval.push(value);
            basis[row] = art;
            binv[row * m + row] = sign; // inverse of a +-1 diagonal entry
        }

        let n_total = n_struct + m + n_artificial;
        let cost = vec![0.0; n_total];
        let max_iters = opts.max_iters.unwrap_or(10 * (m + n_struct).max(1));
        Worker {
            lp,
            m,
            n_struct,
            n_total,
            extra_cols,
            lower,
            upper,
            cost,
            xval,
            state,
            basis,
            binv,
            n_artificial,
            feas_tol: opts.feas_tol,
            opt_tol: opts.opt_tol,
            max_iters,
            anti_cycling: opts.anti_cycling,
            iterations: 0,
            degen_streak: 0,
            bland: false,
            pivots_since_refactor: 0,
            unbounded: false,
            numeric_failure: false,
        }
    }

    fn col(&self, j: usize) -> &[(usize, f64)] {
        if j < self.n_struct {
            self.lp.col_entries(j)
        } else {
            &self.extra_cols[j - self.n_struct]
        }
    }

    fn run(&mut self) -> LpSolution {
        // Phase 1: drive artificials to zero.
        if self.n_artificial > 0 {
            for a in 0..self.n_artificial {
                self.cost[self.n_struct + self.m + a] = 1.0;
            }
            let finished = self.iterate();
            if self.numeric_failure || !finished {
                return self.finish(SolveStatus::IterationLimit);
            }
            let infeas: f64 = (0..self.n_artificial)
                .map(|a| self.xval[self.n_struct + self.m + a].max(0.0))
                .sum();
            let rhs_scale = (0..self.m).map(|i| self.lp.rhs(i).abs()).fold(1.0, f64::max);
            if infeas > self.feas_tol * rhs_scale {
                return self.finish(SolveStatus::Infeasible);
            }
            // Freeze artificials at zero for phase 2.
            for a in 0..self.n_artificial {
                let j = self.n_struct + self.m + a;
                self.cost[j] = 0.0;
                self.lower[j] = 0.0;
                self.upper[j] = 0.0;
                if !matches!(self.state[j], VState::Basic(_)) {
                    self.state[j] = VState::AtLower;
                    self.xval[j] = 0.0;
                }
            }
            self.degen_streak = 0;
            self.bland = false;
        }

        // Phase 2: the real objective.
        for j in 0..self.n_struct {
            self.cost[j] = self.lp.objective()[j];
        }
        self.unbounded = false;
        let finished = self.iterate();
        if self.numeric_failure || !finished {
            return self.finish(SolveStatus::IterationLimit);
        }
        if self.unbounded {
            return self.finish(SolveStatus::Unbounded);
        }
        self.finish(SolveStatus::Optimal)
    }

    /// Runs simplex iterations under the current cost vector. Returns false
    /// when the iteration limit was hit.
    fn iterate(&mut self) -> bool {
        loop {
            if self.iterations >= self.max_iters {
                return false;
            }
            match self.step() {
                Step::Optimal => {
                    self.unbounded = false;
                    return true;
                }
                Step::Unbounded => {
                    self.unbounded = true;
                    return true;
                }
                Step::Moved => {}
            }
            if self.numeric_failure {
                return true;
            }
        }
    }

    fn step(&mut self) -> Step {
        let duals = self.compute_duals();

        // Pricing: most violating reduced cost, smallest index on ties;
        // plain smallest index in Bland mode.
        let mut chosen: Option<(usize, f64, f64)> = None; // (var, score, dir)
        for j in 0..self.n_total {
            let st = self.state[j];
            if matches!(st, VState::Basic(_)) || self.lower[j] == self.upper[j] {
                continue;
            }
            let mut red = self.cost[j];
            for &(row, v) in self.col(j) {
                red -= duals[row] * v;
            }
            let (score, dir) = match st {
                VState::AtLower => (-red, 1.0),
                VState::AtUpper => (red, -1.0),
                VState::FreeZero => (red.abs(), if red > 0.0 { -1.0 } else { 1.0 }),
                VState::Basic(_) => unreachable!(),
            };
            if score > self.opt_tol {
                if self.bland {
                    chosen = Some((j, score, dir));
                    break;
                }
                match chosen {
                    Some((_, best, _)) if best >= score => {}
                    _ => chosen = Some((j, score, dir)),
                }
            }
        }
        let Some((entering, _, dir)) = chosen else {
            return Step::Optimal;
        };

        let w = self.ftran(entering);

        // Ratio test over basic variables; the entering variable's own bound
        // span competes as well (a tie prefers the bound flip).
        let own_span = self.upper[entering] - self.lower[entering];
        let mut best_t = if own_span.is_finite() { own_span } else { f64::INFINITY };
        let mut leaving: Option<(usize, bool)> = None; // (basis row, hits upper bound)
        let mut leaving_weight = 0.0f64;
        for i in 0..self.m {
            let delta = -dir * w[i];
            if delta.abs() <= PIVOT_TOL {
                continue;
            }
            let bvar = self.basis[i];
            let (target, hits_upper) =
                if delta > 0.0 { (self.upper[bvar], true) } else { (self.lower[bvar], false) };
            if !target.is_finite() {
                continue;
            }
            let t = ((target - self.xval[bvar]) / delta).max(0.0);
            let take = match leaving {
                None => t < best_t - RATIO_TIE_TOL,
                Some((prev_row, _)) => {
                    if t < best_t - RATIO_TIE_TOL {
                        true
                    } else if t <= best_t + RATIO_TIE_TOL {
                        if self.bland {
                            bvar < self.basis[prev_row]
                        } else {
                            delta.abs() > leaving_weight
                        }
                    } else {
                        false
                    }
                }
            };
            if take {
                best_t = best_t.min(t);
                leaving = Some((i, hits_upper));
                leaving_weight = delta.abs();
            }
        }

        if best_t.is_infinite() {
            return Step::Unbounded;
        }

        self.iterations += 1;
        if self.anti_cycling {
            if best_t <= DEGEN_STEP_TOL {
                self.degen_streak += 1;
                if self.degen_streak > BLAND_TRIGGER {
                    self.bland = true;
                }
            } else {
                self.degen_streak = 0;
                self.bland = false;
            }
        }

        // Apply the move.
        for i in 0..self.m {
            let delta = -dir * w[i];
            if delta != 0.0 {
                let bvar = self.basis[i];
                self.xval[bvar] += best_t * delta;
            }
        }
        self.xval[entering] += dir * best_t;

        match leaving {
            Some((prow, hits_upper)) => {
                let leaving_var = self.basis[prow];
                self.xval[leaving_var] =
                    if hits_upper { self.upper[leaving_var] } else { self.lower[leaving_var] };
                self.state[leaving_var] =
                    if hits_upper { VState::AtUpper } else { VState::AtLower };
                self.state[entering] = VState::Basic(prow);
                self.basis[prow] = entering;
                self.update_binv(prow, &w);
                self.pivots_since_refactor += 1;
                if self.pivots_since_refactor >= REFACTOR_INTERVAL {
                    self.refactor();
                }
            }
            None => {
                // Bound flip: the entering variable runs to its other bound.
                self.state[entering] = if dir > 0.0 { VState::AtUpper } else { VState::AtLower };
                self.xval[entering] =
                    if dir > 0.0 { self.upper[entering] } else { self.lower[entering] };
            }
        }
        Step::Moved
    }

    fn compute_duals(&self) -> Vec<f64> {
        let m = self.m;
        let mut y = vec![0.0; m];
        for i in 0..m {
            let c = self.cost[self.basis[i]];
            if c != 0.0 {
                let row = &self.binv[i * m..(i + 1) * m];
                for (k, yk) in y.iter_mut().enumerate() {
                    *yk += c * row[k];
                }
            }
        }
        y
    }

    fn ftran(&self, j: usize) -> Vec<f64> {
        let m = self.m;
        let mut w = vec![0.0; m];
        for &(row, v) in self.col(j) {
            if v != 0.0 {
                for (i, wi) in w.iter_mut().enumerate() {
                    *wi += self.binv[i * m + row] * v;
                }
            }
        }
        w
    }

    fn update_binv(&mut self, prow: usize, w: &[f64]) {
        let m = self.m;
        let piv = w[prow];
        debug_assert!(piv.abs() > PIVOT_TOL);
        let inv_piv = 1.0 / piv;
        for k in 0..m {
            self.binv[prow * m + k] *= inv_piv;
        }
        for i in 0..m {
            if i == prow {
                continue;
            }
            let f = w[i];
            if f != 0.0 {
                for k in 0..m {
                    self.binv[i * m + k] -= f * self.binv[prow * m + k];
                }
            }
        }
    }

    /// Rebuilds the basis inverse from scratch and recomputes basic values.
    fn refactor(&mut self) {
        self.pivots_since_refactor = 0;
        let m = self.m;
        if m == 0 {
            return;
        }
        let mut b = vec![0.0; m * m];
        for (i, &var) in self.basis.iter().enumerate() {
            for &(row, v) in self.col(var) {
                b[row * m + i] = v;
            }
        }
        let mut fresh = vec![0.0; m * m];
        if !dense::invert(&b, &mut fresh, m, 1e-12) {
            self.numeric_failure = true;
            return;
        }
        self.binv = fresh;
        let mut residual: Vec<f64> = (0..m).map(|i| self.lp.rhs(i)).collect();
        for j in 0..self.n_total {
            if matches!(self.state[j], VState::Basic(_)) {
                continue;
            }
            let xv = self.xval[j];
            if xv != 0.0 {
                for &(row, v) in self.col(j) {
                    residual[row] -= v * xv;
                }
            }
        }
        for i in 0..m {
            let mut acc = 0.0;
            for k in 0..m {
                acc += self.binv[i * m + k] * residual[k];
            }
            self.xval[self.basis[i]] = acc;
        }
    }

    fn finish(&mut self, status: SolveStatus) -> LpSolution {
        let mut x: Vec<f64> = self.xval[..self.n_struct].to_vec();
        for (j, v) in x.iter_mut().enumerate() {
            let (lo, up) = self.lp.bounds(j);
            *v = v.clamp(lo, up);
            if *v == 0.0 {
                *v = 0.0; // normalize -0.0
            }
        }
        let objective = match status {
            SolveStatus::Optimal | SolveStatus::IterationLimit => self.lp.objective_value(&x),
            SolveStatus::Unbounded => f64::NEG_INFINITY,
            SolveStatus::Infeasible => f64::NAN,
        };
        let duals = self.compute_duals();
        LpSolution { status, x, objective, duals, iterations: self.iterations, scaled: false }
    }
}
