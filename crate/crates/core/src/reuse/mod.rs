//! Reprint detection by shared word n-grams, reprint clusters and the
//! state-level reprint network.

mod detect;
mod network;

pub use detect::{detect_reprints, shingle_hash, shingles, DetectOptions, ReprintEdge, ShingleSet, SHINGLE_SEED};
pub use network::{
    average_clustering, build_state_network, reprint_clusters, ReprintCluster, StateEdge, StateNetwork, StateNode,
};

#[derive(Debug, thiserror::Error)]
pub enum ReuseError {
    #[error("snippet {0:?} is not in the corpus")]
    UnknownSnippet(String),
}
