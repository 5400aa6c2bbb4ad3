//! Semantic frames: the first-neighbour set of a target word, the induced
//! subgraph on it, its valence aura, and frame-pair overlap.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{network_features, Bfmn, NetworkFeatures};
use crate::valence::Valence;

pub const FRAME_HUB_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemanticFrame {
    pub target: String,
    pub target_valence: Valence,
    /// first neighbours of the target; the target itself is never a member
    pub members: BTreeSet<String>,
    pub member_valences: BTreeMap<String, Valence>,
    /// edges among {target} plus members, stored as sorted word pairs
    pub induced_edges: BTreeSet<(String, String)>,
}

impl SemanticFrame {
    /// Node count in the table convention: members plus the target.
    pub fn node_count(&self) -> usize {
        self.members.len() + 1
    }

    pub fn member_count(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Extracts the semantic frame of `target`: its neighbourhood and the
/// subgraph induced on target plus neighbours.
pub fn extract_frame(g: &Bfmn, target: &str) -> Result<SemanticFrame> {
    let target_idx = g
        .idx(target)
        .ok_or_else(|| Error::NodeNotFound(target.into()))?;

    let mut in_frame: BTreeSet<u32> = g.adj_at(target_idx).clone();
    let members: BTreeSet<String> = in_frame.iter().map(|&i| g.word_at(i).to_string()).collect();
    in_frame.insert(target_idx);

    let mut induced_edges = BTreeSet::new();
    for &u in &in_frame {
        for &v in g.adj_at(u) {
            if v > u && in_frame.contains(&v) {
                let (a, b) = (g.word_at(u), g.word_at(v));
                let key = if a < b {
                    (a.to_string(), b.to_string())
                } else {
                    (b.to_string(), a.to_string())
                };
                induced_edges.insert(key);
            }
        }
    }

    let member_valences = members
        .iter()
        .map(|w| (w.clone(), g.valence(w).unwrap()))
        .collect();

    Ok(SemanticFrame {
        target: target.to_string(),
        target_valence: g.valence(target).unwrap(),
        members,
        member_valences,
        induced_edges,
    })
}

/// Valence composition of a frame's members and the resulting modal
/// polarity. The target's own label is reported separately on the frame.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Aura {
    pub target: String,
    pub positive: usize,
    pub neutral: usize,
    pub negative: usize,
    pub polarity: Valence,
}

/// Modal polarity over member labels; any tie for the maximum count is
/// neutral, as is an empty frame.
pub fn aura(frame: &SemanticFrame) -> Aura {
    let mut positive = 0;
    let mut neutral = 0;
    let mut negative = 0;
    for v in frame.member_valences.values() {
        match v {
            Valence::Positive => positive += 1,
            Valence::Neutral => neutral += 1,
            Valence::Negative => negative += 1,
        }
    }
    let top = positive.max(neutral).max(negative);
    let winners = [positive, neutral, negative]
        .iter()
        .filter(|&&c| c == top && top > 0)
        .count();
    let polarity = if top == 0 || winners > 1 {
        Valence::Neutral
    } else if positive == top {
        Valence::Positive
    } else if neutral == top {
        Valence::Neutral
    } else {
        Valence::Negative
    };
    Aura {
        target: frame.target.clone(),
        positive,
        neutral,
        negative,
        polarity,
    }
}

/// Jaccard overlap of two frames' member sets, in [0, 1]. Two empty frames
/// overlap 0 by convention.
pub fn jaccard(frame_a: &SemanticFrame, frame_b: &SemanticFrame) -> f64 {
    let intersection = frame_a.members.intersection(&frame_b.members).count();
    let union = frame_a.members.union(&frame_b.members).count();
    if union == 0 {
        0.0
    } else {
        intersection as f64 / union as f64
    }
}

/// Structural descriptors of the frame's induced subgraph, hubs at the
/// frame-level 5% fraction.
pub fn frame_features(frame: &SemanticFrame) -> NetworkFeatures {
    let mut nodes: Vec<(String, Valence)> = frame
        .member_valences
        .iter()
        .map(|(w, &v)| (w.clone(), v))
        .collect();
    nodes.push((frame.target.clone(), frame.target_valence));
    let g = Bfmn::from_parts("frame", nodes, frame.induced_edges.iter().cloned())
        .expect("induced edges reference frame nodes");
    network_features(&g, FRAME_HUB_FRACTION).expect("frame graph has the target node")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_bfmn;
    use crate::ingest::{AssociationRecord, GroupTag};
    use crate::valence::ValenceLabel;

    fn graph(edges: &[(&str, &str)], labels: &[(&str, Valence)]) -> Bfmn {
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
        let labels: BTreeMap<String, ValenceLabel> = labels
            .iter()
            .map(|(w, v)| {
                (
                    w.to_string(),
                    ValenceLabel {
                        word: w.to_string(),
                        label: *v,
                        p_value: None,
                        mean: None,
                        n_ratings: 0,
                        occurrences: 1,
                    },
                )
            })
            .collect();
        build_bfmn("g", &records, &labels).0
    }

    #[test]
    fn frame_holds_neighbours_and_induced_edges() {
        let g = graph(&[("t", "a"), ("t", "b"), ("a", "b"), ("b", "z")], &[]);
        let f = extract_frame(&g, "t").unwrap();
        assert_eq!(f.member_count(), 2);
        assert_eq!(f.node_count(), 3);
        assert_eq!(f.induced_edges.len(), 3); // t-a, t-b, a-b
        assert!(!f.members.contains("t"));
        assert!(!f.members.contains("z"));
    }

    #[test]
    fn frame_of_missing_node_errors() {
        let g = graph(&[("a", "b")], &[]);
        assert!(matches!(
            extract_frame(&g, "nope"),
            Err(Error::NodeNotFound(_))
        ));
    }

    #[test]
    fn aura_takes_the_mode() {
        let g = graph(
            &[
                ("t", "n1"),
                ("t", "n2"),
                ("t", "n3"),
                ("t", "n4"),
                ("t", "n5"),
                ("t", "p1"),
                ("t", "p2"),
                ("t", "z1"),
            ],
            &[
                ("n1", Valence::Negative),
                ("n2", Valence::Negative),
                ("n3", Valence::Negative),
                ("n4", Valence::Negative),
                ("n5", Valence::Negative),
                ("p1", Valence::Positive),
                ("p2", Valence::Positive),
                ("z1", Valence::Neutral),
            ],
        );
        let a = aura(&extract_frame(&g, "t").unwrap());
        assert_eq!((a.negative, a.positive, a.neutral), (5, 2, 1));
        assert_eq!(a.polarity, Valence::Negative);
    }

    #[test]
    fn aura_tie_is_neutral() {
        let g = graph(
            &[("t", "a"), ("t", "b"), ("t", "c"), ("t", "d")],
            &[
                ("a", Valence::Negative),
                ("b", Valence::Negative),
                ("c", Valence::Positive),
                ("d", Valence::Positive),
            ],
        );
        let a = aura(&extract_frame(&g, "t").unwrap());
        assert_eq!(a.polarity, Valence::Neutral);
    }

    #[test]
    fn empty_frame_aura_is_neutral_with_zero_counts() {
        let frame = SemanticFrame {
            target: "t".into(),
            target_valence: Valence::Neutral,
            members: BTreeSet::new(),
            member_valences: BTreeMap::new(),
            induced_edges: BTreeSet::new(),
        };
        let a = aura(&frame);
        assert_eq!((a.positive, a.neutral, a.negative), (0, 0, 0));
        assert_eq!(a.polarity, Valence::Neutral);
    }

    #[test]
    fn jaccard_boundaries() {
        let g = graph(
            &[("s", "a"), ("s", "b"), ("t", "a"), ("t", "b"), ("u", "x")],
            &[],
        );
        let fs = extract_frame(&g, "s").unwrap();
        let ft = extract_frame(&g, "t").unwrap();
        let fu = extract_frame(&g, "u").unwrap();
        assert_eq!(jaccard(&fs, &ft), 1.0);
        assert_eq!(jaccard(&fs, &fu), 0.0);
        assert_eq!(jaccard(&fs, &fs), 1.0);
        assert_eq!(jaccard(&ft, &fs), jaccard(&fs, &ft));
    }

    #[test]
    fn jaccard_partial_overlap() {
        let g = graph(
            &[("s", "a"), ("s", "b"), ("s", "c"), ("t", "b"), ("t", "c"), ("t", "d")],
            &[],
        );
        let fs = extract_frame(&g, "s").unwrap();
        let ft = extract_frame(&g, "t").unwrap();
        // members share {b, c}; union {a, b, c, d, s?, t?}: s and t are
        // neighbours of nothing here besides their own members
        assert!((jaccard(&fs, &ft) - 2.0 / 4.0).abs() < 1e-12);
    }

    #[test]
    fn undirectedness_links_mutual_membership() {
        let g = graph(&[("s", "t"), ("s", "a"), ("t", "b")], &[]);
        let fs = extract_frame(&g, "s").unwrap();
        let ft = extract_frame(&g, "t").unwrap();
        assert_eq!(
            fs.members.contains("t"),
            ft.members.contains("s")
        );
    }

    #[test]
    fn star_frame_features() {
        let g = graph(
            &[("t", "a"), ("t", "b"), ("t", "c"), ("t", "d")],
            &[],
        );
        let f = frame_features(&extract_frame(&g, "t").unwrap());
        assert_eq!(f.n_nodes, 5);
        assert_eq!(f.n_edges, 4);
        assert_eq!(f.clustering, 0.0);
        assert!(f.avg_shortest_path < 2.0);
        assert_eq!(f.diameter, 2);
        assert_eq!(f.hubs[0], ("t".to_string(), 4));
    }

    #[test]
    fn single_member_frame_features() {
        let g = graph(&[("t", "a"), ("x", "y")], &[]);
        let f = frame_features(&extract_frame(&g, "t").unwrap());
        assert_eq!(f.n_nodes, 2);
        assert!((f.avg_shortest_path - 1.0).abs() < 1e-12);
        assert_eq!(f.diameter, 1);
    }

    #[test]
    fn empty_frame_features_degenerate() {
        let frame = SemanticFrame {
            target: "t".into(),
            target_valence: Valence::Neutral,
            members: BTreeSet::new(),
            member_valences: BTreeMap::new(),
            induced_edges: BTreeSet::new(),
        };
        let f = frame_features(&frame);
        assert_eq!(f.n_nodes, 1);
        assert_eq!(f.n_edges, 0);
        assert_eq!(f.avg_shortest_path, 0.0);
    }

    #[test]
    fn frame_diameter_never_exceeds_two() {
        let mut rng = crate::sampling::rng_for(5);
        use rand::Rng;
        for _ in 0..30 {
            let mut edges = vec![];
            let n = rng.random_range(2..12);
            for i in 0..n {
                edges.push(("hubword".to_string(), format!("m{i}")));
            }
            for _ in 0..rng.random_range(0..10) {
                let a = rng.random_range(0..n);
                let b = rng.random_range(0..n);
                if a != b {
                    edges.push((format!("m{a}"), format!("m{b}")));
                }
            }
            let edge_refs: Vec<(&str, &str)> =
                edges.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
            let g = graph(&edge_refs, &[]);
            let f = frame_features(&extract_frame(&g, "hubword").unwrap());
            assert!(f.diameter <= 2);
            assert!(f.avg_shortest_path <= 2.0);
        }
    }
}
