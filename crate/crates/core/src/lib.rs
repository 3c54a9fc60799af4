//! Shuffle queues: simulation, sortability, enumeration and cost.
//!
//! Sweeps over all permutations of a size run through [`exec`], which uses
//! rayon when the `parallel` feature is on (the default) and plain
//! iteration otherwise. Results never depend on the worker count.

pub mod conjecture;
pub mod cost;
pub mod cut;
pub mod deque;
pub mod device;
pub mod enumeration;
pub mod error;
pub mod exec;
pub mod method;
pub mod oeis;
pub mod perm;
pub mod report;

pub use device::{DeviceVariant, EngineConfig, Iteration, Op, Sorter};
pub use error::{Error, Result, Violation};
pub use exec::Strategy;
pub use method::{Builtin, ShufflingMethod};
pub use perm::{Permutation, Word};
pub use report::CheckReport;
