//! Quantum error-correcting codes over mixed alphabets.
//!
//! The crate builds codes on systems whose particles have different
//! dimensions, certifies them against the Knill–Laflamme conditions, and
//! classifies them against the mixed-alphabet Singleton and Hamming bounds.

pub mod algebra;
pub mod bounds;
pub mod clique;
pub mod compose;
pub mod error;
pub mod errors;
pub mod graphs;
pub mod graphstate;
pub mod projection;
pub mod verifier;

pub use algebra::{ModVec, Phase};
pub use clique::{CodingClique, SearchMode, SearchOptions};
pub use error::{Error, Result};
pub use errors::{enumerate_errors, ErrorWord, Layer, MixedSystem};
pub use graphs::WeightedGraph;
pub use graphstate::{CompositeGraph, Label, StateVector};
pub use verifier::{Code, KlReport, Verdict};
