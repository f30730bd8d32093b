//! Entropy-based outlier mining for categorical data.
//!
//! Given a table of `n` records over `m` categorical attributes, the detector
//! looks for the `k` records whose removal leaves the remainder with the
//! smallest expected entropy, where the expected entropy is the sum of the
//! per-attribute Shannon entropies (attributes treated as independent).
//!
//! The search is greedy: `k` scans over the data, each removing the single
//! record whose removal lowers the objective the most. Per-attribute value
//! counts and cached `Σ c·ln c` sums make each candidate evaluation `O(m)`, so
//! a full run costs `O(n·k·m)`.
//!
//! ```
//! use entropy_outlier::{greedy_detect, CategoricalTable};
//!
//! let table = CategoricalTable::encode(&[
//!     vec!["a", "x"],
//!     vec!["a", "x"],
//!     vec!["a", "x"],
//!     vec!["b", "y"],
//! ])
//! .unwrap();
//! let result = greedy_detect(&table, 1).unwrap();
//! assert_eq!(result.selected, vec![3]);
//! assert_eq!(result.final_entropy(), 0.0);
//! ```

pub mod bench;
pub mod dataset;
pub mod detector;
pub mod entropy;
pub mod error;
pub mod evaluation;
pub mod io;
pub mod plot;
pub mod synth;

pub use dataset::{AttributeDictionary, CategoricalTable};
pub use detector::{
    exhaustive_optimal, greedy_detect, greedy_detect_with, naive_greedy_detect, DetectOptions,
    OutlierResult,
};
pub use entropy::{attribute_entropy, joint_entropy, EntropyValue, FrequencyModel};
pub use error::{Error, Result};
pub use evaluation::{coverage_at, CoverageRow, EvaluationReport};
pub use io::{downsample_class, drop_missing, load_table, write_result, ColumnSelector, LoadSpec};
pub use synth::{generate_synthetic, SynthSpec};
