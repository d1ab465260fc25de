//! Robust and stochastic capacity expansion for multicommodity networks.
//!
//! Given a directed network with expandable arc capacities and a set of
//! demand scenarios, this crate builds and solves four planning models —
//! nominal, worst-case over a discrete demand set, an affine adjustable
//! counterpart over a polyhedral demand set, and a stochastic model at a
//! fitted mean demand — then assesses the resulting investments
//! out-of-sample by re-optimizing flows per evaluation scenario and
//! reporting mean / max / CVaR / standard deviation of the outsourced
//! demand. Everything runs on the built-in bounded-variable simplex
//! solver; no external solver is required.
//!
//! The `examples/` directory is the front door: one runnable example per
//! capability (parsing, uncertainty-set construction, model solving,
//! evaluation, frontier sweeps, the LP toolkit). The `rncep` binary drives
//! the same pipeline from a TOML config for batch experiments.

pub mod evaluate;
pub mod lp;
pub mod model;
pub mod pipeline;
pub mod rng;
pub mod sndlib;
pub mod uncertainty;
