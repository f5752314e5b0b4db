//! Incremental-learning QAOA for weighted MaxCut.
//!
//! * [`graph`]: graphs, the dataset generators and the text format.
//! * [`oracle`]: exact MaxCut by enumeration and random-partition baselines.
//! * [`statevector`]: dense simulation of the QAOA circuit.
//! * [`cobyla`] and [`qaoa`]: the ansatz objective and its optimizer.
//! * [`trainer`]: phase schedules, parameter reuse and early break.
//! * [`bench`]: the experiment harness behind the `pilqaoa` CLI.

pub mod bench;
pub mod cobyla;
pub mod error;
pub mod graph;
pub mod oracle;
pub mod qaoa;
pub mod rng;
pub mod statevector;
pub mod trainer;

pub use error::{Error, Result};
pub use graph::{DatasetSpec, Family, Graph};
pub use oracle::{cut_value, max_cut_bruteforce, random_partition_max, Assignment, OracleResult};
pub use qaoa::{best_sampled_cut, evaluate_objective, optimize, OptimResult, ParamVector, QaoaProblem};
pub use statevector::{CutTable, StateVector};
pub use trainer::{build_schedule, early_break_check, train_pil, train_standard, Method, TrainConfig, TrainReport};
