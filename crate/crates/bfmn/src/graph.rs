//! Group-level behavioural forma mentis networks: simple, undirected,
//! unweighted graphs whose nodes carry a valence label.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::AssociationRecord;
use crate::valence::{Valence, ValenceLabel};

/// Behavioural forma mentis network. Construction is canonical: node ids
/// follow sorted word order, so two graphs built from the same data compare
/// equal regardless of record order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bfmn {
    group: String,
    words: Vec<String>,
    index: BTreeMap<String, u32>,
    valences: Vec<Valence>,
    adj: Vec<BTreeSet<u32>>,
    n_edges: usize,
}

impl Bfmn {
    /// Assembles a graph from explicit nodes and edges; used for induced
    /// subgraphs. Self-loops are rejected, as are edges naming unknown
    /// nodes. Duplicate node entries keep the last valence.
    pub fn from_parts(
        group: impl Into<String>,
        nodes: impl IntoIterator<Item = (String, Valence)>,
        edges: impl IntoIterator<Item = (String, String)>,
    ) -> Result<Bfmn> {
        let node_map: BTreeMap<String, Valence> = nodes.into_iter().collect();
        let words: Vec<String> = node_map.keys().cloned().collect();
        let index: BTreeMap<String, u32> = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();
        let valences: Vec<Valence> = words.iter().map(|w| node_map[w]).collect();

        let mut adj = vec![BTreeSet::new(); words.len()];
        let mut edge_set: BTreeSet<(u32, u32)> = BTreeSet::new();
        for (a, b) in edges {
            if a == b {
                return Err(Error::Data(format!("self-loop on `{a}`")));
            }
            let i = *index
                .get(&a)
                .ok_or_else(|| Error::NodeNotFound(a.clone()))?;
            let j = *index
                .get(&b)
                .ok_or_else(|| Error::NodeNotFound(b.clone()))?;
            edge_set.insert((i.min(j), i.max(j)));
        }
        for &(i, j) in &edge_set {
            adj[i as usize].insert(j);
            adj[j as usize].insert(i);
        }
        Ok(Bfmn {
            group: group.into(),
            words,
            index,
            valences,
            n_edges: edge_set.len(),
            adj,
        })
    }

    pub fn group(&self) -> &str {
        &self.group
    }

    pub fn node_count(&self) -> usize {
        self.words.len()
    }

    pub fn edge_count(&self) -> usize {
        self.n_edges
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    pub fn valence(&self, word: &str) -> Option<Valence> {
        self.index.get(word).map(|&i| self.valences[i as usize])
    }

    pub fn degree(&self, word: &str) -> Option<usize> {
        self.index.get(word).map(|&i| self.adj[i as usize].len())
    }

    pub fn neighbors(&self, word: &str) -> Option<impl Iterator<Item = &str>> {
        self.index
            .get(word)
            .map(|&i| self.adj[i as usize].iter().map(|&j| self.words[j as usize].as_str()))
    }

    pub fn has_edge(&self, a: &str, b: &str) -> bool {
        match (self.index.get(a), self.index.get(b)) {
            (Some(&i), Some(&j)) => self.adj[i as usize].contains(&j),
            _ => false,
        }
    }

    /// Edges as sorted word pairs (a < b), in deterministic order.
    pub fn edges(&self) -> Vec<(&str, &str)> {
        let mut out = Vec::with_capacity(self.n_edges);
        for (i, nbrs) in self.adj.iter().enumerate() {
            for &j in nbrs {
                if (j as usize) > i {
                    out.push((self.words[i].as_str(), self.words[j as usize].as_str()));
                }
            }
        }
        out
    }

    pub(crate) fn idx(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub(crate) fn word_at(&self, i: u32) -> &str {
        &self.words[i as usize]
    }

    pub(crate) fn adj_at(&self, i: u32) -> &BTreeSet<u32> {
        &self.adj[i as usize]
    }

    fn bfs(&self, src: u32, dist: &mut [i64]) {
        dist.iter_mut().for_each(|d| *d = -1);
        dist[src as usize] = 0;
        let mut queue = VecDeque::new();
        queue.push_back(src);
        while let Some(u) = queue.pop_front() {
            let du = dist[u as usize];
            for &v in &self.adj[u as usize] {
                if dist[v as usize] < 0 {
                    dist[v as usize] = du + 1;
                    queue.push_back(v);
                }
            }
        }
    }

    /// Nodes of the largest connected component (ties broken by smallest
    /// contained node id, which is deterministic).
    pub fn largest_component(&self) -> Vec<u32> {
        let n = self.node_count();
        let mut comp = vec![u32::MAX; n];
        let mut best: Option<(usize, u32)> = None; // (size, root)
        let mut next = 0u32;
        for start in 0..n as u32 {
            if comp[start as usize] != u32::MAX {
                continue;
            }
            let id = next;
            next += 1;
            let mut size = 0usize;
            let mut queue = VecDeque::new();
            comp[start as usize] = id;
            queue.push_back(start);
            while let Some(u) = queue.pop_front() {
                size += 1;
                for &v in &self.adj[u as usize] {
                    if comp[v as usize] == u32::MAX {
                        comp[v as usize] = id;
                        queue.push_back(v);
                    }
                }
            }
            if best.map(|(s, _)| size > s).unwrap_or(true) {
                best = Some((size, id));
            }
        }
        match best {
            Some((_, id)) => (0..n as u32).filter(|&u| comp[u as usize] == id).collect(),
            None => Vec::new(),
        }
    }
}

/// Builds a group BFMN by aggregating the cue-response pairs of all
/// records: repeated associations collapse into one simple edge, self-pairs
/// are dropped, and nodes are the endpoints of the retained edges.
///
/// Words without a label fall back to neutral and are reported in the
/// returned warning list.
pub fn build_bfmn(
    group: impl Into<String>,
    records: &[AssociationRecord],
    labels: &BTreeMap<String, ValenceLabel>,
) -> (Bfmn, Vec<String>) {
    let mut edge_set: BTreeSet<(String, String)> = BTreeSet::new();
    for record in records {
        for (a, b) in record.pairs() {
            if a == b {
                continue;
            }
            let key = if a < b {
                (a.to_string(), b.to_string())
            } else {
                (b.to_string(), a.to_string())
            };
            edge_set.insert(key);
        }
    }

    let mut index: BTreeMap<String, u32> = BTreeMap::new();
    for (a, b) in &edge_set {
        let next = index.len() as u32;
        index.entry(a.clone()).or_insert(next);
        let next = index.len() as u32;
        index.entry(b.clone()).or_insert(next);
    }
    // reindex in sorted word order for canonical node ids
    let words: Vec<String> = index.keys().cloned().collect();
    let index: BTreeMap<String, u32> = words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.clone(), i as u32))
        .collect();

    let mut warnings = Vec::new();
    let valences: Vec<Valence> = words
        .iter()
        .map(|w| match labels.get(w) {
            Some(l) => l.label,
            None => {
                warnings.push(format!("no valence label for `{w}`, defaulting to neutral"));
                Valence::Neutral
            }
        })
        .collect();

    let mut adj = vec![BTreeSet::new(); words.len()];
    for (a, b) in &edge_set {
        let (i, j) = (index[a], index[b]);
        adj[i as usize].insert(j);
        adj[j as usize].insert(i);
    }

    let graph = Bfmn {
        group: group.into(),
        words,
        index,
        valences,
        n_edges: edge_set.len(),
        adj,
    };
    (graph, warnings)
}

/// Node clustering coefficient 2T(u) / (deg(u) (deg(u) - 1)); zero below
/// degree 2.
pub fn clustering_coefficient(g: &Bfmn, word: &str) -> Result<f64> {
    let u = g.idx(word).ok_or_else(|| Error::NodeNotFound(word.into()))?;
    Ok(clustering_by_index(g, u))
}

fn clustering_by_index(g: &Bfmn, u: u32) -> f64 {
    let nbrs = g.adj_at(u);
    let deg = nbrs.len();
    if deg < 2 {
        return 0.0;
    }
    let mut triangles = 0u64;
    let nbr_vec: Vec<u32> = nbrs.iter().copied().collect();
    for (i, &v) in nbr_vec.iter().enumerate() {
        for &w in &nbr_vec[i + 1..] {
            if g.adj_at(v).contains(&w) {
                triangles += 1;
            }
        }
    }
    2.0 * triangles as f64 / (deg as f64 * (deg - 1) as f64)
}

/// Mean node clustering over all nodes, degree-<2 nodes counted as zero.
pub fn mean_clustering(g: &Bfmn) -> f64 {
    if g.node_count() == 0 {
        return 0.0;
    }
    let total: f64 = (0..g.node_count() as u32)
        .map(|u| clustering_by_index(g, u))
        .sum();
    total / g.node_count() as f64
}

/// Average shortest path length over ordered pairs of the largest
/// connected component. A single-node component yields 0.
pub fn avg_shortest_path(g: &Bfmn) -> Result<f64> {
    let (sum, _max, n) = path_sums(g)?;
    if n < 2 {
        return Ok(0.0);
    }
    Ok(sum as f64 / (n as f64 * (n as f64 - 1.0)))
}

/// Maximum eccentricity over the largest connected component.
pub fn diameter(g: &Bfmn) -> Result<u64> {
    let (_sum, max, _n) = path_sums(g)?;
    Ok(max)
}

fn path_sums(g: &Bfmn) -> Result<(u64, u64, usize)> {
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let component = g.largest_component();
    let in_component: BTreeSet<u32> = component.iter().copied().collect();
    let mut dist = vec![-1i64; g.node_count()];
    let mut sum = 0u64;
    let mut max = 0u64;
    for &src in &component {
        g.bfs(src, &mut dist);
        for &t in &in_component {
            let d = dist[t as usize];
            debug_assert!(d >= 0, "component member unreachable");
            sum += d as u64;
            max = max.max(d as u64);
        }
    }
    Ok((sum, max, component.len()))
}

/// Hubs: all nodes whose degree reaches the degree found at rank
/// `ceil(top_fraction * N)` of the descending degree ordering. Ties at the
/// cutoff are all included. Sorted by degree descending, then word.
pub fn hubs(g: &Bfmn, top_fraction: f64) -> Vec<(String, usize)> {
    assert!(
        top_fraction > 0.0 && top_fraction <= 1.0,
        "top_fraction must be in (0, 1]"
    );
    let n = g.node_count();
    if n == 0 {
        return Vec::new();
    }
    let mut ranked: Vec<(usize, &str)> = g
        .words()
        .map(|w| (g.degree(w).unwrap(), w))
        .collect();
    ranked.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| a.1.cmp(b.1)));
    let rank = ((top_fraction * n as f64).ceil() as usize).clamp(1, n);
    let cutoff = ranked[rank - 1].0;
    ranked
        .into_iter()
        .take_while(|&(deg, _)| deg >= cutoff)
        .map(|(deg, w)| (w.to_string(), deg))
        .collect()
}

/// Closeness centrality with the component-size scaling factor
/// (r-1)/(n-1) * (r-1)/sum(d); isolated nodes score 0.
pub fn closeness_centrality(g: &Bfmn, word: &str) -> Result<f64> {
    let u = g.idx(word).ok_or_else(|| Error::NodeNotFound(word.into()))?;
    let n = g.node_count();
    if n < 2 {
        return Ok(0.0);
    }
    let mut dist = vec![-1i64; n];
    g.bfs(u, &mut dist);
    let mut reachable = 0u64;
    let mut total = 0u64;
    for &d in dist.iter() {
        if d >= 0 {
            reachable += 1;
            total += d as u64;
        }
    }
    if reachable < 2 || total == 0 {
        return Ok(0.0);
    }
    let r = (reachable - 1) as f64;
    Ok(r / (n as f64 - 1.0) * (r / total as f64))
}

/// Whole-graph descriptor set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkFeatures {
    pub n_nodes: usize,
    pub n_edges: usize,
    pub avg_shortest_path: f64,
    pub diameter: u64,
    pub clustering: f64,
    pub hubs: Vec<(String, usize)>,
    /// size of the largest connected component the path metrics cover
    pub lcc_nodes: usize,
}

pub fn network_features(g: &Bfmn, hub_fraction: f64) -> Result<NetworkFeatures> {
    let (sum, max, lcc_nodes) = path_sums(g)?;
    let avg = if lcc_nodes < 2 {
        0.0
    } else {
        sum as f64 / (lcc_nodes as f64 * (lcc_nodes as f64 - 1.0))
    };
    Ok(NetworkFeatures {
        n_nodes: g.node_count(),
        n_edges: g.edge_count(),
        avg_shortest_path: avg,
        diameter: max,
        clustering: mean_clustering(g),
        hubs: hubs(g, hub_fraction),
        lcc_nodes,
    })
}

/// Graph export: edge list plus node attributes, both tab-separated.
pub fn edge_list_tsv(g: &Bfmn) -> String {
    let mut out = String::from("word_a\tword_b\n");
    for (a, b) in g.edges() {
        out.push_str(&format!("{a}\t{b}\n"));
    }
    out
}

pub fn node_list_tsv(g: &Bfmn) -> String {
    let mut out = String::from("word\tvalence\n");
    for w in g.words() {
        out.push_str(&format!("{w}\t{}\n", g.valence(w).unwrap()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::GroupTag;
    use std::collections::BTreeMap;

    pub(crate) fn graph_from_edges(edges: &[(&str, &str)]) -> Bfmn {
        let records: Vec<AssociationRecord> = edges
            .iter()
            .enumerate()
            .map(|(i, (a, b))| AssociationRecord {
                participant_id: format!("p_{i}"),
                group_tag: GroupTag::parse("p"),
                cue: a.to_string(),
                responses: vec![b.to_string()],
                valences: BTreeMap::new(),
            })
            .collect();
        build_bfmn("test", &records, &BTreeMap::new()).0
    }

    fn record(pid: &str, cue: &str, responses: &[&str]) -> AssociationRecord {
        AssociationRecord {
            participant_id: pid.into(),
            group_tag: GroupTag::parse(pid),
            cue: cue.into(),
            responses: responses.iter().map(|s| s.to_string()).collect(),
            valences: BTreeMap::new(),
        }
    }

    #[test]
    fn repeated_pairs_collapse_to_one_edge() {
        let records = vec![
            record("p1", "math", &["ansia"]),
            record("p2", "math", &["ansia"]),
        ];
        let (g, _) = build_bfmn("g", &records, &BTreeMap::new());
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        assert!(g.has_edge("math", "ansia"));
        assert!(g.has_edge("ansia", "math"));
    }

    #[test]
    fn self_pairs_dropped() {
        let records = vec![record("p1", "math", &["math", "numeri"])];
        let (g, _) = build_bfmn("g", &records, &BTreeMap::new());
        assert_eq!(g.edge_count(), 1);
        assert!(!g.has_edge("math", "math"));
    }

    #[test]
    fn duplicated_record_list_builds_identical_graph() {
        let records = vec![
            record("p1", "a", &["b", "c"]),
            record("p2", "b", &["c"]),
        ];
        let mut doubled = records.clone();
        doubled.extend(records.clone());
        let (g1, _) = build_bfmn("g", &records, &BTreeMap::new());
        let (g2, _) = build_bfmn("g", &doubled, &BTreeMap::new());
        assert_eq!(g1, g2);
    }

    #[test]
    fn graph_invariant_to_record_order() {
        let records = vec![
            record("p1", "a", &["b", "c"]),
            record("p2", "d", &["a"]),
            record("p3", "b", &["d", "e"]),
        ];
        let mut reversed = records.clone();
        reversed.reverse();
        let (g1, _) = build_bfmn("g", &records, &BTreeMap::new());
        let (g2, _) = build_bfmn("g", &reversed, &BTreeMap::new());
        assert_eq!(g1, g2);
    }

    #[test]
    fn missing_labels_warn_and_default_neutral() {
        let records = vec![record("p1", "a", &["b"])];
        let (g, warnings) = build_bfmn("g", &records, &BTreeMap::new());
        assert_eq!(warnings.len(), 2);
        assert_eq!(g.valence("a"), Some(Valence::Neutral));
    }

    #[test]
    fn star_center_has_zero_clustering() {
        let g = graph_from_edges(&[("c", "l1"), ("c", "l2"), ("c", "l3"), ("c", "l4")]);
        assert_eq!(clustering_coefficient(&g, "c").unwrap(), 0.0);
    }

    #[test]
    fn triangle_nodes_have_clustering_one() {
        let g = graph_from_edges(&[("a", "b"), ("b", "c"), ("a", "c")]);
        for w in ["a", "b", "c"] {
            assert_eq!(clustering_coefficient(&g, w).unwrap(), 1.0);
        }
        assert_eq!(mean_clustering(&g), 1.0);
    }

    #[test]
    fn clustering_half_for_deg4_three_triangles() {
        // x adjacent to a,b,c,d with edges (a,b), (b,c), (c,d): T(x) = 3
        let g = graph_from_edges(&[
            ("x", "a"),
            ("x", "b"),
            ("x", "c"),
            ("x", "d"),
            ("a", "b"),
            ("b", "c"),
            ("c", "d"),
        ]);
        assert!((clustering_coefficient(&g, "x").unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unknown_node_is_an_error() {
        let g = graph_from_edges(&[("a", "b")]);
        assert!(matches!(
            clustering_coefficient(&g, "zz"),
            Err(Error::NodeNotFound(_))
        ));
    }

    #[test]
    fn path_graph_average_distance() {
        let g = graph_from_edges(&[("a", "b"), ("b", "c")]);
        assert!((avg_shortest_path(&g).unwrap() - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(diameter(&g).unwrap(), 2);
    }

    #[test]
    fn complete_graph_distances() {
        let g = graph_from_edges(&[
            ("a", "b"),
            ("a", "c"),
            ("a", "d"),
            ("b", "c"),
            ("b", "d"),
            ("c", "d"),
        ]);
        assert!((avg_shortest_path(&g).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(diameter(&g).unwrap(), 1);
    }

    #[test]
    fn metrics_use_largest_component() {
        // path of 3 plus a separate edge: metrics come from the path
        let g = graph_from_edges(&[("a", "b"), ("b", "c"), ("x", "y")]);
        assert!((avg_shortest_path(&g).unwrap() - 4.0 / 3.0).abs() < 1e-12);
        assert_eq!(diameter(&g).unwrap(), 2);
        let f = network_features(&g, 0.5).unwrap();
        assert_eq!(f.lcc_nodes, 3);
        assert_eq!(f.n_nodes, 5);
    }

    #[test]
    fn empty_graph_errors() {
        let g = graph_from_edges(&[]);
        assert!(matches!(avg_shortest_path(&g), Err(Error::EmptyGraph)));
        assert!(matches!(diameter(&g), Err(Error::EmptyGraph)));
    }

    #[test]
    fn hubs_rank_one_returns_max_degree_nodes() {
        // star: only the center reaches the rank-1 cutoff
        let edges: Vec<(String, String)> = (0..99)
            .map(|i| ("hub".to_string(), format!("n{i:02}")))
            .collect();
        let edge_refs: Vec<(&str, &str)> =
            edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let g = graph_from_edges(&edge_refs);
        let h = hubs(&g, 0.01);
        assert_eq!(h, vec![("hub".to_string(), 99)]);
    }

    #[test]
    fn hubs_include_all_ties_at_cutoff() {
        // triangle: everyone has degree 2
        let g = graph_from_edges(&[("a", "b"), ("b", "c"), ("a", "c")]);
        let h = hubs(&g, 0.34);
        assert_eq!(h.len(), 3);
    }

    #[test]
    fn closeness_of_star() {
        let g = graph_from_edges(&[("c", "l1"), ("c", "l2"), ("c", "l3"), ("c", "l4")]);
        assert!((closeness_centrality(&g, "c").unwrap() - 1.0).abs() < 1e-12);
        assert!((closeness_centrality(&g, "l1").unwrap() - 4.0 / 7.0).abs() < 1e-12);
    }

    #[test]
    fn closeness_of_isolated_node_is_zero() {
        // isolated nodes cannot exist in an edge-built graph; emulate with
        // a disconnected pair and check the scaling factor instead
        let g = graph_from_edges(&[("a", "b"), ("x", "y")]);
        // reachable = 2 of 4 nodes: C = (1/3) * (1/1)
        assert!((closeness_centrality(&g, "a").unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn export_layouts() {
        let g = graph_from_edges(&[("b", "a")]);
        assert_eq!(edge_list_tsv(&g), "word_a\tword_b\na\tb\n");
        assert_eq!(node_list_tsv(&g), "word\tvalence\na\tneutral\nb\tneutral\n");
    }
}
