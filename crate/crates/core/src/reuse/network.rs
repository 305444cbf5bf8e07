use std::collections::{BTreeMap, BTreeSet, HashMap};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::{ReprintEdge, ReuseError};
use crate::geo;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateNode {
    pub state: String,
    pub lat: Option<f64>,
    pub lon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StateEdge {
    pub state_a: String,
    pub state_b: String,
    pub weight: u64,
}

/// Reprint edges aggregated to states. Edges between two snippets of the
/// same state are counted in `intra_state` and kept out of `edges`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct StateNetwork {
    pub nodes: Vec<StateNode>,
    pub edges: Vec<StateEdge>,
    pub intra_state: BTreeMap<String, u64>,
}

impl StateNetwork {
    /// A network from explicit nodes and weighted edges. Nodes are sorted,
    /// edge endpoints are ordered and parallel edges summed; self-loops go to
    /// `intra_state`.
    pub fn from_parts<S: AsRef<str>>(nodes: &[S], edges: &[(S, S, u64)]) -> Self {
        let mut names: BTreeSet<String> = nodes.iter().map(|s| s.as_ref().to_string()).collect();
        let mut weights: BTreeMap<(String, String), u64> = BTreeMap::new();
        let mut intra_state = BTreeMap::new();
        for (a, b, w) in edges {
            let (a, b) = (a.as_ref().to_string(), b.as_ref().to_string());
            names.insert(a.clone());
            names.insert(b.clone());
            if a == b {
                *intra_state.entry(a).or_default() += w;
            } else {
                let key = if a < b { (a, b) } else { (b, a) };
                *weights.entry(key).or_default() += w;
            }
        }
        let nodes = names
            .into_iter()
            .map(|state| {
                let coords = geo::capital_coordinates(&state);
                StateNode { lat: coords.map(|c| c.0), lon: coords.map(|c| c.1), state }
            })
            .collect();
        let edges = weights
            .into_iter()
            .filter(|&(_, w)| w > 0)
            .map(|((state_a, state_b), weight)| StateEdge { state_a, state_b, weight })
            .collect();
        Self { nodes, edges, intra_state }
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> u64 {
        self.edges.iter().map(|e| e.weight).sum()
    }
}

/// Aggregates snippet-level reprint edges into a weighted state network.
/// Nodes are the states of every snippet that has at least one edge.
pub fn build_state_network(
    edges: &[ReprintEdge],
    snippet_state: &HashMap<String, String>,
) -> Result<StateNetwork, ReuseError> {
    let state_of =
        |id: &String| snippet_state.get(id).map(String::as_str).ok_or_else(|| ReuseError::UnknownSnippet(id.clone()));
    let mut pairs = Vec::with_capacity(edges.len());
    for e in edges {
        pairs.push((state_of(&e.snippet_a)?, state_of(&e.snippet_b)?, 1));
    }
    Ok(StateNetwork::from_parts::<&str>(&[], &pairs))
}

/// A connected component of the snippet reprint graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReprintCluster {
    pub cluster_id: usize,
    pub size: usize,
    pub earliest_date: NaiveDate,
    pub snippet_ids: Vec<String>,
}

/// Connected components over reprint edges, largest first (ties by earliest
/// date, then first member id). Ids are 1-based ranks; members are sorted.
pub fn reprint_clusters(
    edges: &[ReprintEdge],
    snippet_date: &HashMap<String, NaiveDate>,
) -> Result<Vec<ReprintCluster>, ReuseError> {
    let mut ids: Vec<&String> = edges.iter().flat_map(|e| [&e.snippet_a, &e.snippet_b]).collect();
    ids.sort();
    ids.dedup();
    let pos: HashMap<&String, usize> = ids.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let mut parent: Vec<usize> = (0..ids.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for e in edges {
        let (a, b) = (find(&mut parent, pos[&e.snippet_a]), find(&mut parent, pos[&e.snippet_b]));
        if a != b {
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut groups: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (i, id) in ids.iter().enumerate() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push((*id).clone());
    }
    let mut clusters = Vec::with_capacity(groups.len());
    for (_, members) in groups {
        let mut earliest = None;
        for m in &members {
            let d = *snippet_date.get(m).ok_or_else(|| ReuseError::UnknownSnippet(m.clone()))?;
            earliest = Some(earliest.map_or(d, |e: NaiveDate| e.min(d)));
        }
        clusters.push(ReprintCluster {
            cluster_id: 0,
            size: members.len(),
            earliest_date: earliest.expect("components are non-empty"),
            snippet_ids: members,
        });
    }
    clusters.sort_by(|a, b| {
        b.size
            .cmp(&a.size)
            .then(a.earliest_date.cmp(&b.earliest_date))
            .then_with(|| a.snippet_ids[0].cmp(&b.snippet_ids[0]))
    });
    for (i, c) in clusters.iter_mut().enumerate() {
        c.cluster_id = i + 1;
    }
    Ok(clusters)
}

/// Mean local clustering coefficient over all nodes.
///
/// Unweighted: fraction of neighbor pairs that are linked. Weighted: the
/// mean over neighbor pairs of the geometric mean of the three edge weights
/// of each closed triple, weights divided by the largest weight. Nodes with
/// fewer than two neighbors contribute 0; an empty network gives 0.
pub fn average_clustering(network: &StateNetwork, weighted: bool) -> f64 {
    if network.nodes.is_empty() {
        return 0.0;
    }
    let index: HashMap<&str, usize> = network.nodes.iter().enumerate().map(|(i, n)| (n.state.as_str(), i)).collect();
    let n = network.nodes.len();
    let max_w = network.edges.iter().map(|e| e.weight).max().unwrap_or(1) as f64;
    let mut adj: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
    for e in &network.edges {
        let (a, b) = (index[e.state_a.as_str()], index[e.state_b.as_str()]);
        if a == b {
            continue;
        }
        let w = if weighted { e.weight as f64 / max_w } else { 1.0 };
        adj[a].insert(b, w);
        adj[b].insert(a, w);
    }
    let mut total = 0.0;
    for u in 0..n {
        let nbrs: Vec<(usize, f64)> = adj[u].iter().map(|(&v, &w)| (v, w)).collect();
        let k = nbrs.len();
        if k < 2 {
            continue;
        }
        let mut sum = 0.0;
        for (i, &(v, wuv)) in nbrs.iter().enumerate() {
            for &(x, wux) in &nbrs[i + 1..] {
                if let Some(&wvx) = adj[v].get(&x) {
                    sum += if weighted { (wuv * wux * wvx).cbrt() } else { 1.0 };
                }
            }
        }
        total += 2.0 * sum / (k * (k - 1)) as f64;
    }
    total / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edge(a: &str, b: &str) -> ReprintEdge {
        ReprintEdge { snippet_a: a.into(), snippet_b: b.into(), shared: 4 }
    }

    #[test]
    fn one_cross_state_edge() {
        let states: HashMap<String, String> =
            [("m1", "Massachusetts"), ("n1", "New York")].map(|(a, b)| (a.into(), b.into())).into();
        let net = build_state_network(&[edge("m1", "n1")], &states).unwrap();
        assert_eq!(net.edges, [StateEdge { state_a: "Massachusetts".into(), state_b: "New York".into(), weight: 1 }]);
        assert_eq!(net.nodes.len(), 2);
        assert!(net.nodes[0].lat.is_some());
        assert!(build_state_network(&[], &states).unwrap().is_empty());
        assert!(matches!(
            build_state_network(&[edge("m1", "zz")], &states),
            Err(ReuseError::UnknownSnippet(id)) if id == "zz"
        ));
    }

    #[test]
    fn intra_state_edges_are_separate() {
        let states: HashMap<String, String> = [("a", "Ohio"), ("b", "Ohio")].map(|(a, b)| (a.into(), b.into())).into();
        let net = build_state_network(&[edge("a", "b")], &states).unwrap();
        assert!(net.edges.is_empty());
        assert_eq!(net.intra_state["Ohio"], 1);
        assert_eq!(net.nodes.len(), 1);
        assert_eq!(average_clustering(&net, false), 0.0);
    }

    #[test]
    fn clusters_are_components() {
        let d = |s: &str| NaiveDate::parse_from_str(s, "%Y-%m-%d").unwrap();
        let dates: HashMap<String, NaiveDate> = [
            ("a", d("1876-07-08")),
            ("b", d("1880-01-01")),
            ("c", d("1877-01-01")),
            ("x", d("1850-01-01")),
            ("y", d("1851-01-01")),
        ]
        .map(|(k, v)| (k.to_string(), v))
        .into();
        let cl = reprint_clusters(&[edge("a", "b"), edge("b", "c"), edge("x", "y")], &dates).unwrap();
        assert_eq!(cl.len(), 2);
        assert_eq!((cl[0].cluster_id, cl[0].size), (1, 3));
        assert_eq!(cl[0].earliest_date, d("1876-07-08"));
        assert_eq!(cl[0].snippet_ids, ["a", "b", "c"]);
        assert_eq!(cl[1].size, 2);
    }

    #[test]
    fn reference_graphs() {
        let tri = StateNetwork::from_parts(&["a"], &[("a", "b", 1), ("b", "c", 1), ("a", "c", 1)]);
        assert_eq!(average_clustering(&tri, false), 1.0);
        assert_eq!(average_clustering(&tri, true), 1.0);
        let star = StateNetwork::from_parts(&["h"], &[("h", "a", 1), ("h", "b", 1), ("h", "c", 1)]);
        assert_eq!(average_clustering(&star, false), 0.0);
        assert_eq!(average_clustering(&StateNetwork::default(), true), 0.0);
        // Triangle with one heavy edge: each node's triple has geometric mean
        // (1 · 0.5 · 0.5)^(1/3) after dividing by the maximum weight 2.
        let w = StateNetwork::from_parts(&["a"], &[("a", "b", 2), ("b", "c", 1), ("a", "c", 1)]);
        assert!((average_clustering(&w, true) - 0.25f64.cbrt()).abs() < 1e-15);
    }
}
