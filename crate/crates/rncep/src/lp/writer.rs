//! Plain-text LP format output.
//!
//! The emitted grammar is the usual CPLEX-style LP text format, restricted
//! to what this crate produces:
//!
//! ```text
//! Minimize
//!  obj: <term> [(+|-) <term>]*
//! Subject To
//!  c<row>: <terms> (<=|>=|=) <number>
//! Bounds
//!  <bound line per column with non-default bounds>
//! End
//! ```
//!
//! Default bounds are `[0, +inf)` and are not written. Numbers are printed
//! in shortest round-trip decimal form (at most 17 significant digits, the
//! exact `f64` is recovered on parse). Unit coefficients are written without
//! a number, so a one-variable objective `min -x0` prints as `obj: - x0`.
//! Files in this form are accepted by mainstream LP solvers for
//! cross-checking objective values.

use std::fmt::Write as _;

use super::{LinearProgram, LpError, RowSense};

/// Source of column names for [`write_lp_file`].
pub trait ColumnNames {
    fn column_name(&self, col: usize) -> Option<String>;
}

/// Default naming scheme `x0, x1, ...`.
pub struct IndexedNames;

impl ColumnNames for IndexedNames {
    fn column_name(&self, col: usize) -> Option<String> {
        Some(format!("x{col}"))
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v}")
}

fn push_term(out: &mut String, first: bool, coef: f64, name: &str) {
    let neg = coef < 0.0;
    let mag = coef.abs();
    if first {
        out.push(' ');
        if neg {
            out.push_str("- ");
        }
    } else if neg {
        out.push_str(" - ");
    } else {
        out.push_str(" + ");
    }
    if mag != 1.0 {
        let _ = write!(out, "{} ", fmt_num(mag));
    }
    out.push_str(name);
}

/// Writes `lp` in LP text format, naming columns through `names`.
pub fn write_lp_file(lp: &LinearProgram, names: &dyn ColumnNames) -> Result<String, LpError> {
    lp.validate()?;
    let n = lp.num_cols();
    let mut col_names = Vec::with_capacity(n);
    for col in 0..n {
        col_names.push(names.column_name(col).ok_or(LpError::UnnamedColumn(col))?);
    }

    let mut out = String::new();
    out.push_str("Minimize\n obj:");
    let mut first = true;
    for (col, &c) in lp.objective().iter().enumerate() {
        if c != 0.0 {
            push_term(&mut out, first, c, &col_names[col]);
            first = false;
        }
    }
    out.push('\n');

    out.push_str("Subject To\n");
    let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); lp.num_rows()];
    for (row, col, v) in lp.triplets() {
        rows[row].push((col, v));
    }
    for (row, entries) in rows.iter().enumerate() {
        let _ = write!(out, " c{row}:");
        if entries.is_empty() {
            out.push_str(" 0");
        } else {
            let mut first = true;
            for &(col, v) in entries {
                push_term(&mut out, first, v, &col_names[col]);
                first = false;
            }
        }
        let sense = match lp.row_sense(row) {
            RowSense::Le => "<=",
            RowSense::Ge => ">=",
            RowSense::Eq => "=",
        };
        let _ = writeln!(out, " {} {}", sense, fmt_num(lp.rhs(row)));
    }

    let mut bounds = String::new();
    for col in 0..n {
        let (lo, up) = lp.bounds(col);
        let name = &col_names[col];
        if lo == 0.0 && up == f64::INFINITY {
            continue;
        }
        if lo == f64::NEG_INFINITY && up == f64::INFINITY {
            let _ = writeln!(bounds, " {name} free");
        } else if lo == up {
            let _ = writeln!(bounds, " {name} = {}", fmt_num(lo));
        } else if lo == f64::NEG_INFINITY {
            let _ = writeln!(bounds, " -infinity <= {name} <= {}", fmt_num(up));
        } else if up == f64::INFINITY {
            let _ = writeln!(bounds, " {name} >= {}", fmt_num(lo));
        } else {
            let _ = writeln!(bounds, " {} <= {name} <= {}", fmt_num(lo), fmt_num(up));
        }
    }
    if !bounds.is_empty() {
        out.push_str("Bounds\n");
        out.push_str(&bounds);
    }
    out.push_str("End\n");
    Ok(out)
}
