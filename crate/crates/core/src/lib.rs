//! Keyword discourse analytics over historical newspaper OCR: page search and
//! caching, keyword snippets, OCR-variant merging, per-state embeddings,
//! two-group log-odds, and reprint networks.

// Negated float comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod embed;
pub mod geo;
pub mod hash;
pub mod ingest;
pub mod normalize;
pub mod pipeline;
pub mod reuse;
pub mod snippet;
pub mod stats;
