//! Witnessed entanglement of multipartite quantum states.
//!
//! The central quantity is `E_W(ρ) = max(0, -Tr(W_ρ ρ))`, where `W_ρ` is the
//! unit-trace witness that is nonnegative on every product vector of a
//! partition scheme and most negative on `ρ`. [`solver`] computes it by
//! cutting-plane linear programming; [`witness`] and [`measures`] provide the
//! closed-form companions used to cross-check it.

pub mod basis;
pub mod error;
pub mod linalg;
pub mod lp;
pub mod measures;
pub mod oracle;
pub mod partition;
pub mod rng;
pub mod selftest;
pub mod solver;
pub mod states;
pub mod sweep;
pub mod witness;

pub use error::{Error, Result, StateViolation};
pub use linalg::{ComplexMatrix, Dims, StateVector};
pub use measures::{full_report, MeasureReport, MeasureSelection};
pub use partition::{enumerate_partitions, Partition, PartitionScheme, ProductVector};
pub use solver::{solve, SolverConfig, WitnessProblem, WitnessResult};
pub use states::DensityOperator;
pub use sweep::{run_sweep, Column, Family, SweepSpec, SweepTable};
pub use witness::Witness;
