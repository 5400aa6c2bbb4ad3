//! Group-level behavioural forma mentis networks (BFMNs) from
//! free-association and valence data.
//!
//! The crate covers the full pipeline:
//!
//! - [`ingest`]: association/valence CSVs, MAS-IT questionnaires, data
//!   cleaning, median-split anxiety subgroups, lexical resources
//! - [`valence`]: Kruskal-Wallis word valence categorization
//! - [`graph`]: BFMN construction and structural features
//! - [`frames`]: semantic frames, valence auras, Jaccard overlap
//! - [`affect`]: Plutchik emotion profiles with resampled z-scores
//! - [`concreteness`]: frame concreteness against null baselines
//! - [`twin`]: LLM "digital twin" participant generation
//! - [`render`]: circular frame diagrams, emotional flowers, overlap bars
//! - [`pipeline`]: config-driven orchestration used by the `bfmn` binary
//!
//! Every resampling routine takes an explicit seed and is reproducible
//! bit-for-bit. See the `examples/` directory for one runnable walkthrough
//! per capability.

pub mod affect;
pub mod concreteness;
pub mod error;
pub mod frames;
pub mod graph;
pub mod ingest;
pub mod pipeline;
pub mod render;
pub mod sampling;
pub mod stats;
pub mod twin;
pub mod valence;

pub use error::{Error, Result};
