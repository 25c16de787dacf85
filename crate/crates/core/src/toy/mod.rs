//! Hand-crafted single-attention-layer models on boolean tasks.
//!
//! Everything in this module runs in exact rational arithmetic: accuracies
//! are `k / 2^m` fractions compared with `==`, never within a tolerance.

mod ablation;
mod models;
mod orbit;
mod task;

pub use ablation::{ablation_modes, AblationMode};
pub use models::{
    paper_handcraft_table, toy_predict, verify_handcraft_table, HandcraftGrid, ModelKind,
    ToyPrediction,
};
pub use orbit::{orbit_bound, orbit_bound_of_rule, OrbitPartition};
pub use task::{Row, TaskKind, ToyTask};

/// Exact rational accuracy/probability type for the toy family.
pub type Frac = num_rational::Ratio<i64>;

/// Errors from the toy-model family.
#[derive(Debug, thiserror::Error)]
pub enum ToyError {
    #[error("m={0} exceeds the enumeration limit of 20")]
    MTooLarge(usize),
    #[error("task {task:?} needs m >= {needed}, got {m}")]
    MTooSmall {
        task: TaskKind,
        needed: usize,
        m: usize,
    },
}
