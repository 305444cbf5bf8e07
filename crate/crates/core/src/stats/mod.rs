//! Two-group corpus partition and log-odds word comparison.

mod groups;
mod logodds;

pub use groups::{
    partition_by_group, Group, GroupingMode, GroupingPolicy, Partition, CONFEDERATE_STATES, EXCLUDED_STATES,
    UNION_STATES,
};
pub use logodds::{compute_log_odds, top_words, GroupCounts, LogOddsRow, PriorCounts};

#[derive(Debug, thiserror::Error)]
pub enum StatsError {
    #[error("degenerate corpus: {0}")]
    DegenerateCorpus(String),
    #[error("no positive prior count for {0:?}")]
    MissingPrior(String),
    #[error("invalid prior: {0}")]
    InvalidPrior(String),
    #[error("state {0:?} appears in more than one group")]
    OverlappingGroups(String),
}
