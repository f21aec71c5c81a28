//! Energy levels of the quartic anharmonic oscillator `p²/2 + x²/2 + λx⁴`
//! from the Morse–Feshbach nonlinear perturbation series, solved
//! self-consistently order by order.
//!
//! The Hamiltonian is split as `H = H_D + H_N` around a shifted oscillator
//! frequency (see [`splitparams`]), the series right-hand side `g(E)` is
//! evaluated by a banded walk recursion ([`series`]), and `E = g(E)` is
//! solved per order ([`solver`]). [`oracle`] diagonalizes the unsplit
//! Hamiltonian as an independent reference, and [`report`] assembles the
//! tables and records printed by the `mfnps` binary.

pub mod hamiltonian;
pub mod oracle;
pub mod report;
pub mod series;
pub mod solver;
pub mod splitparams;

pub use hamiltonian::{build_banded, build_unsplit, BandedOperator};
pub use oracle::{diagonalize, oracle_energy, OracleResult};
pub use series::{evaluate_series, SeriesEvaluation};
pub use solver::{
    convergence_table, digits_stabilized, self_consistent_energy, ConvergenceTable, EnergySolution,
    SolverConfig, Status,
};
pub use splitparams::{build_chain, SchemeKind, SchemeSpec, SplitChain};
