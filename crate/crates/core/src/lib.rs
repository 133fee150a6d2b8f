//! Exact solver for the minimum-size perfect decision tree training problem.
//!
//! Given a two-class data set, the solver finds an axis-parallel decision
//! tree with the minimum number of inner vertices that classifies every
//! training example correctly. The search is a branch and bound over
//! witness trees (partial trees whose leaves are anchored by correctly
//! classified examples), pruned by data reduction, set-cover lower bounds,
//! symmetry-breaking subset constraints and a set-trie cache of lower
//! bounds for example subsets.
//!
//! The core is generic over the coordinate scalar through [`value::Value`];
//! `f64` is the default and what the CLI uses.

pub mod bounds;
pub mod constraints;
pub mod dataset;
pub mod lp;
pub mod oracle;
pub mod reduce;
pub mod search;
pub mod settrie;
pub mod tree;
pub mod value;
pub mod witness;

pub use dataset::{ClassLabel, Cut, DataSet, Example, InstanceStats, ParseOptions};
pub use search::{SearchConfig, SearchStats, SolveResult, SolveStatus, Strategy};
pub use tree::PlainTree;
pub use value::Value;
pub use witness::{Refinement, WitnessTree};

/// Dense example-id sets; ids are `0..n` after preprocessing.
pub type ExampleSet = fixedbitset::FixedBitSet;

/// The solver instantiated over `f64` coordinates (the default scalar).
pub type DataSetF64 = DataSet<f64>;
/// Single-precision variant; useful when memory matters more than parsing range.
pub type DataSetF32 = DataSet<f32>;
/// Integer coordinates, e.g. for purely ordinal data.
pub type DataSetI64 = DataSet<i64>;
