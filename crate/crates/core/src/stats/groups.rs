use std::collections::BTreeSet;

use log::warn;
use serde::{Deserialize, Serialize};

use super::StatsError;
use crate::snippet::Snippet;

pub const CONFEDERATE_STATES: [&str; 11] = [
    "Alabama",
    "Arkansas",
    "Florida",
    "Georgia",
    "Louisiana",
    "Mississippi",
    "North Carolina",
    "South Carolina",
    "Tennessee",
    "Texas",
    "Virginia",
];

pub const UNION_STATES: [&str; 23] = [
    "Maine",
    "New York",
    "New Hampshire",
    "Vermont",
    "Massachusetts",
    "Connecticut",
    "Rhode Island",
    "Pennsylvania",
    "New Jersey",
    "Ohio",
    "Indiana",
    "Illinois",
    "Kansas",
    "Michigan",
    "Minnesota",
    "Wisconsin",
    "Iowa",
    "California",
    "Nevada",
    "Oregon",
    "Delaware",
    "Maryland",
    "West Virginia",
];

/// Territories left out of both groups regardless of mode.
pub const EXCLUDED_STATES: [&str; 2] = ["Virgin Islands", "Puerto Rico"];

/// Where states on none of the lists go.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupingMode {
    /// Only the listed Union states form the second group; others are
    /// excluded with a warning.
    ListedUnion,
    /// Every non-Confederate, non-excluded state forms the second group.
    RestOfUs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    Confederate,
    Union,
    Excluded,
    /// On no list and routed to the excluded set (listed-Union mode only).
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupingPolicy {
    pub confederate: BTreeSet<String>,
    pub union: BTreeSet<String>,
    pub excluded: BTreeSet<String>,
    pub mode: GroupingMode,
}

fn key(state: &str) -> String {
    state.trim().to_lowercase()
}

impl GroupingPolicy {
    /// The historical lists above.
    pub fn standard(mode: GroupingMode) -> Self {
        let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect();
        Self { confederate: set(&CONFEDERATE_STATES), union: set(&UNION_STATES), excluded: set(&EXCLUDED_STATES), mode }
    }

    /// A custom policy. The sets must be pairwise disjoint; the two
    /// territories are always added to the excluded set.
    pub fn new(
        confederate: BTreeSet<String>,
        union: BTreeSet<String>,
        excluded: BTreeSet<String>,
        mode: GroupingMode,
    ) -> Result<Self, StatsError> {
        let mut excluded = excluded;
        excluded.extend(EXCLUDED_STATES.iter().map(|s| s.to_string()));
        let keys = |s: &BTreeSet<String>| s.iter().map(|x| key(x)).collect::<BTreeSet<_>>();
        let (c, u, e) = (keys(&confederate), keys(&union), keys(&excluded));
        for (a, b) in [(&c, &u), (&c, &e), (&u, &e)] {
            if let Some(x) = a.intersection(b).next() {
                return Err(StatsError::OverlappingGroups(x.clone()));
            }
        }
        Ok(Self { confederate, union, excluded, mode })
    }

    /// Group of a state name (case-insensitive).
    pub fn classify(&self, state: &str) -> Group {
        let k = key(state);
        let has = |s: &BTreeSet<String>| s.iter().any(|x| key(x) == k);
        if has(&self.excluded) {
            Group::Excluded
        } else if has(&self.confederate) {
            Group::Confederate
        } else if has(&self.union) {
            Group::Union
        } else {
            match self.mode {
                GroupingMode::ListedUnion => Group::Unknown,
                GroupingMode::RestOfUs => Group::Union,
            }
        }
    }
}

/// Snippets split into the two compared groups and the excluded rest.
#[derive(Debug, Clone, Default)]
pub struct Partition<'a> {
    pub confederate: Vec<&'a Snippet>,
    pub union: Vec<&'a Snippet>,
    pub excluded: Vec<&'a Snippet>,
    /// States found on no list (listed-Union mode); their snippets are in
    /// `excluded`.
    pub unknown_states: BTreeSet<String>,
}

pub fn partition_by_group<'a>(snippets: &'a [Snippet], policy: &GroupingPolicy) -> Partition<'a> {
    let mut p = Partition::default();
    for s in snippets {
        match policy.classify(&s.state) {
            Group::Confederate => p.confederate.push(s),
            Group::Union => p.union.push(s),
            Group::Excluded => p.excluded.push(s),
            Group::Unknown => {
                if p.unknown_states.insert(s.state.clone()) {
                    warn!("unknown state {:?} is excluded from the group comparison", s.state);
                }
                p.excluded.push(s);
            }
        }
    }
    p
}
