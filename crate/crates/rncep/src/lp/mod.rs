//! Sparse linear programs and a bounded-variable revised simplex solver.
//!
//! The [`LinearProgram`] type is the carrier for every model this crate
//! builds: minimization over sparse columns with per-column bounds
//! (default `[0, +inf)`) and `<=` / `>=` / `=` rows. [`solve`] runs a
//! two-phase bounded-variable revised simplex with an explicit dense basis
//! inverse; it is deterministic (same program and options give the same
//! iterate sequence). [`write_lp_file`] emits the program in the usual
//! human-readable LP text format for cross-checks with external solvers,
//! and [`vertex_enumerate`] brute-forces the vertices of small polyhedra
//! as an independent oracle for the simplex.

mod dense;
mod simplex;
mod vertex;
mod writer;

pub use simplex::solve;
pub use vertex::vertex_enumerate;
pub use writer::{write_lp_file, ColumnNames, IndexedNames};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("column {col} out of range ({ncols} columns)")]
    BadColumn { col: usize, ncols: usize },
    #[error("non-finite coefficient {value} at row {row}, column {col}")]
    BadCoefficient { row: usize, col: usize, value: f64 },
    #[error("non-finite right-hand side {value} in row {row}")]
    BadRhs { row: usize, value: f64 },
    #[error("non-finite objective coefficient {value} for column {col}")]
    BadObjective { col: usize, value: f64 },
    #[error("empty bound interval [{lower}, {upper}] for column {col}")]
    EmptyBounds { col: usize, lower: f64, upper: f64 },
    #[error("duplicate entry for row {row}, column {col}")]
    DuplicateEntry { row: usize, col: usize },
    #[error("column {0} has no name")]
    UnnamedColumn(usize),
    #[error("vertex enumeration supports at most {max} dimensions, got {got}")]
    TooManyDimensions { got: usize, max: usize },
}

/// Sense of a constraint row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowSense {
    Le,
    Ge,
    Eq,
}

/// Termination status of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
}

/// A sparse minimization LP in bounded form.
///
/// Columns are created with [`LinearProgram::add_col`] and rows with
/// [`LinearProgram::add_row`]; the constraint matrix is kept column-major.
#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    obj: Vec<f64>,
    lower: Vec<f64>,
    upper: Vec<f64>,
    /// Column-major entries: `cols[j]` holds `(row, value)` pairs in
    /// increasing row order.
    cols: Vec<Vec<(usize, f64)>>,
    sense: Vec<RowSense>,
    rhs: Vec<f64>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a column with the given objective coefficient and bounds,
    /// returning its index. Use `f64::INFINITY` / `f64::NEG_INFINITY` for
    /// unbounded sides.
    pub fn add_col(&mut self, obj: f64, lower: f64, upper: f64) -> usize {
        self.obj.push(obj);
        self.lower.push(lower);
        self.upper.push(upper);
        self.cols.push(Vec::new());
        self.obj.len() - 1
    }

    /// Adds a constraint row. Zero-valued entries are dropped; each column
    /// may appear at most once per row.
    pub fn add_row(&mut self, sense: RowSense, rhs: f64, entries: &[(usize, f64)]) -> usize {
        let row = self.rhs.len();
        self.sense.push(sense);
        self.rhs.push(rhs);
        for &(col, value) in entries {
            if value != 0.0 {
                self.cols[col].push((row, value));
            }
        }
        row
    }

    pub fn num_cols(&self) -> usize {
        self.obj.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rhs.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.obj
    }

    pub fn bounds(&self, col: usize) -> (f64, f64) {
        (self.lower[col], self.upper[col])
    }

    pub fn row_sense(&self, row: usize) -> RowSense {
        self.sense[row]
    }

    pub fn rhs(&self, row: usize) -> f64 {
        self.rhs[row]
    }

    pub fn col_entries(&self, col: usize) -> &[(usize, f64)] {
        &self.cols[col]
    }

    /// All matrix entries as `(row, col, value)` triplets in column-major
    /// order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.cols
            .iter()
            .enumerate()
            .flat_map(|(col, entries)| entries.iter().map(move |&(row, v)| (row, col, v)))
    }

    /// Objective value of a candidate point.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.obj.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Row activities `A x`.
    pub fn row_activity(&self, x: &[f64]) -> Vec<f64> {
        let mut act = vec![0.0; self.num_rows()];
        for (col, entries) in self.cols.iter().enumerate() {
            let xv = x[col];
            if xv != 0.0 {
                for &(row, v) in entries {
                    act[row] += v * xv;
                }
            }
        }
        act
    }

    /// Largest absolute violation of rows and bounds at `x`.
    pub fn feasibility_residual(&self, x: &[f64]) -> f64 {
        let act = self.row_activity(x);
        let mut worst = 0.0f64;
        for row in 0..self.num_rows() {
            let gap = match self.sense[row] {
                RowSense::Le => act[row] - self.rhs[row],
                RowSense::Ge => self.rhs[row] - act[row],
                RowSense::Eq => (act[row] - self.rhs[row]).abs(),
            };
            worst = worst.max(gap);
        }
        for col in 0..self.num_cols() {
            worst = worst.max(self.lower[col] - x[col]);
            worst = worst.max(x[col] - self.upper[col]);
        }
        worst
    }

    /// Structural validation: finite data, valid indices, no duplicate
    /// entries, non-empty bound intervals.
    pub fn validate(&self) -> Result<(), LpError> {
        let ncols = self.num_cols();
        for (col, &c) in self.obj.iter().enumerate() {
            if !c.is_finite() {
                return Err(LpError::BadObjective { col, value: c });
            }
        }
        for col in 0..ncols {
            let (lo, up) = (self.lower[col], self.upper[col]);
            if lo.is_nan() || up.is_nan() || lo > up || lo == f64::INFINITY || up == f64::NEG_INFINITY {
                return Err(LpError::EmptyBounds { col, lower: lo, upper: up });
            }
        }
        for (row, &b) in self.rhs.iter().enumerate() {
            if !b.is_finite() {
                return Err(LpError::BadRhs { row, value: b });
            }
        }
        for (col, entries) in self.cols.iter().enumerate() {
            let mut prev = usize::MAX;
            for &(row, v) in entries {
                if row >= self.num_rows() {
                    return Err(LpError::BadColumn { col, ncols: self.num_rows() });
                }
                if !v.is_finite() {
                    return Err(LpError::BadCoefficient { row, col, value: v });
                }
                if prev != usize::MAX && row <= prev {
                    return Err(LpError::DuplicateEntry { row, col });
                }
                prev = row;
            }
        }
        Ok(())
    }
}

/// Options for [`solve`].
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Absolute feasibility tolerance for bounds and rows.
    pub feas_tol: f64,
    /// Optimality (reduced-cost) tolerance.
    pub opt_tol: f64,
    /// Iteration cap; `None` means `10 * (rows + cols)`.
    pub max_iters: Option<usize>,
    /// Switch to Bland's rule after 500 consecutive degenerate pivots.
    pub anti_cycling: bool,
    /// Equilibrate rows and columns by powers of two before solving.
    pub scale: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            feas_tol: 1e-7,
            opt_tol: 1e-7,
            max_iters: None,
            anti_cycling: true,
            scale: false,
        }
    }
}

/// Result of a solve.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: SolveStatus,
    /// Primal values per column (meaningful for `Optimal` and
    /// `IterationLimit`).
    pub x: Vec<f64>,
    /// Objective value; `NaN` for `Infeasible`, `-inf` for `Unbounded`.
    pub objective: f64,
    /// Row duals `y` with `reduced cost = c - A^T y`; `y <= 0` on `<=` rows
    /// and `y >= 0` on `>=` rows at optimality.
    pub duals: Vec<f64>,
    pub iterations: usize,
    /// Whether equilibration scaling was applied (values are reported in
    /// the original units either way).
    pub scaled: bool,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }

    /// Dual objective `y'b + sum_j min over [l_j, u_j] of (c_j - y'A_j) x_j`,
    /// used by the strong-duality checks.
    pub fn dual_objective(&self, lp: &LinearProgram) -> f64 {
        let mut val: f64 = self.duals.iter().zip(0..lp.num_rows()).map(|(y, r)| y * lp.rhs(r)).sum();
        for col in 0..lp.num_cols() {
            let mut red = lp.objective()[col];
            for &(row, v) in lp.col_entries(col) {
                red -= self.duals[row] * v;
            }
            let (lo, up) = lp.bounds(col);
            // Best contribution of this column to the Lagrangian.
            let contrib = if red > 0.0 {
                if lo.is_finite() {
                    red * lo
                } else {
                    f64::NEG_INFINITY
                }
            } else if red < 0.0 {
                if up.is_finite() {
                    red * up
                } else {
                    f64::NEG_INFINITY
                }
            } else {
                0.0
            };
            val += contrib;
        }
        val
    }
}
