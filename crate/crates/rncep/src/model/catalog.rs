//! Structured variable keys and the key-to-column bijection.

use std::collections::HashMap;
use std::fmt;

use crate::lp::ColumnNames;

/// Identity of one LP column across all model families.
///
/// `commodity` indexes the commodity the variable belongs to, `driver` the
/// commodity whose demand drives an affine or dual term, `row` a polyhedron
/// row, and `node`/`arc` network elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKey {
    /// Capacity expansion on an arc (first stage).
    Invest { arc: usize },
    /// Per-scenario flow of a commodity on an arc.
    Flow { commodity: usize, scenario: usize, arc: usize },
    /// Per-scenario outsourced demand of a commodity.
    Shortfall { commodity: usize, scenario: usize },
    /// Worst-case total outsourced demand.
    MaxShortfall,
    /// Affine flow policy intercept.
    PolicyOffset { commodity: usize, arc: usize },
    /// Affine flow policy coefficient on a driver demand.
    PolicySlope { commodity: usize, driver: usize, arc: usize },
    /// Objective dualization: polyhedron-row multiplier.
    ObjPoly { row: usize },
    /// Objective dualization: multiplier linking the product variable to
    /// the driver demand.
    ObjLink { commodity: usize, driver: usize },
    /// Objective dualization: multiplier of the scaled-indicator cap.
    ObjScale { commodity: usize, driver: usize },
    /// Objective dualization: multiplier of the mixed McCormick row.
    ObjMix { commodity: usize, driver: usize },
    /// Objective dualization: upper-bound multiplier.
    ObjUpper { driver: usize },
    /// Objective dualization: lower-bound multiplier.
    ObjLower { driver: usize },
    /// Objective dualization: indicator-cap multiplier.
    ObjUnit { commodity: usize },
    /// Flow-conservation dualization: polyhedron-row multiplier.
    FlowPoly { commodity: usize, node: usize, row: usize },
    /// Flow-conservation dualization: demand upper-bound multiplier.
    FlowUpper { commodity: usize, node: usize, driver: usize },
    /// Flow-conservation dualization: demand lower-bound multiplier.
    FlowLower { commodity: usize, node: usize, driver: usize },
    /// Capacity dualization: polyhedron-row multiplier.
    CapPoly { arc: usize, row: usize },
    /// Capacity dualization: demand upper-bound multiplier.
    CapUpper { arc: usize, driver: usize },
    /// Capacity dualization: demand lower-bound multiplier.
    CapLower { arc: usize, driver: usize },
    /// Flow-positivity dualization: polyhedron-row multiplier.
    PosPoly { commodity: usize, arc: usize, row: usize },
    /// Flow-positivity dualization: demand upper-bound multiplier.
    PosUpper { commodity: usize, driver: usize, arc: usize },
    /// Flow-positivity dualization: demand lower-bound multiplier.
    PosLower { commodity: usize, driver: usize, arc: usize },
}

impl fmt::Display for VarKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use VarKey::*;
        match *self {
            Invest { arc } => write!(f, "x_a{arc}"),
            Flow { commodity, scenario, arc } => write!(f, "f_k{commodity}_s{scenario}_a{arc}"),
            Shortfall { commodity, scenario } => write!(f, "h_k{commodity}_s{scenario}"),
            MaxShortfall => write!(f, "tau"),
            PolicyOffset { commodity, arc } => write!(f, "phi_k{commodity}_a{arc}"),
            PolicySlope { commodity, driver, arc } => {
                write!(f, "Phi_k{commodity}_l{driver}_a{arc}")
            }
            ObjPoly { row } => write!(f, "q_m{row}"),
            ObjLink { commodity, driver } => write!(f, "r_k{commodity}_l{driver}"),
            ObjScale { commodity, driver } => write!(f, "s_k{commodity}_l{driver}"),
            ObjMix { commodity, driver } => write!(f, "t_k{commodity}_l{driver}"),
            ObjUpper { driver } => write!(f, "u_l{driver}"),
            ObjLower { driver } => write!(f, "v_l{driver}"),
            ObjUnit { commodity } => write!(f, "w_k{commodity}"),
            FlowPoly { commodity, node, row } => write!(f, "alpha_k{commodity}_n{node}_m{row}"),
            FlowUpper { commodity, node, driver } => {
                write!(f, "betau_k{commodity}_n{node}_l{driver}")
            }
            FlowLower { commodity, node, driver } => {
                write!(f, "betal_k{commodity}_n{node}_l{driver}")
            }
            CapPoly { arc, row } => write!(f, "pi_a{arc}_m{row}"),
            CapUpper { arc, driver } => write!(f, "rhou_a{arc}_l{driver}"),
            CapLower { arc, driver } => write!(f, "rhol_a{arc}_l{driver}"),
            PosPoly { commodity, arc, row } => write!(f, "xi_k{commodity}_a{arc}_m{row}"),
            PosUpper { commodity, driver, arc } => {
                write!(f, "zetau_k{commodity}_l{driver}_a{arc}")
            }
            PosLower { commodity, driver, arc } => {
                write!(f, "zetal_k{commodity}_l{driver}_a{arc}")
            }
        }
    }
}

/// Bijection between [`VarKey`]s and LP column indices, in column order.
#[derive(Debug, Clone, Default)]
pub struct VariableCatalog {
    keys: Vec<VarKey>,
    index: HashMap<VarKey, usize>,
}

impl VariableCatalog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers `key` as the next column and returns its index. Panics on
    /// duplicates — builders create each key exactly once.
    pub fn push(&mut self, key: VarKey) -> usize {
        let col = self.keys.len();
        let prev = self.index.insert(key, col);
        assert!(prev.is_none(), "duplicate variable key {key}");
        self.keys.push(key);
        col
    }

    pub fn index_of(&self, key: &VarKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn key(&self, col: usize) -> Option<&VarKey> {
        self.keys.get(col)
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &VarKey)> {
        self.keys.iter().enumerate()
    }
}

impl ColumnNames for VariableCatalog {
    fn column_name(&self, col: usize) -> Option<String> {
        self.keys.get(col).map(|k| k.to_string())
    }
}
