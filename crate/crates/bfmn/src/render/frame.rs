//! Circular semantic-frame diagrams.

use std::collections::BTreeMap;

use super::{fmt2, svg_open, xml_escape, RenderSpec};
use crate::error::{Error, Result};
use crate::frames::SemanticFrame;
use crate::graph::{closeness_centrality, Bfmn};
use crate::valence::Valence;

const SIZE: u32 = 900;
const RADIUS: f64 = 320.0;

/// Renders a frame as a circular embedding: nodes ordered by degree then
/// name, labels colored by valence and scaled by frame-level closeness
/// centrality, contrastive positive-negative edges in purple, and edges
/// under the frequency threshold omitted.
pub fn render_frame_svg(
    frame: &SemanticFrame,
    spec: &RenderSpec,
    freq_table: &BTreeMap<(String, String), u64>,
) -> Result<String> {
    if frame.is_empty() {
        return Err(Error::EmptyFrame);
    }

    let mut nodes: Vec<(String, Valence)> = frame
        .member_valences
        .iter()
        .map(|(w, &v)| (w.clone(), v))
        .collect();
    nodes.push((frame.target.clone(), frame.target_valence));
    let graph = Bfmn::from_parts("render", nodes, frame.induced_edges.iter().cloned())
        .expect("frame edges reference frame nodes");

    // degree descending, then lexicographic: a deterministic circle order
    let mut ordered: Vec<&str> = graph.words().collect();
    ordered.sort_by(|a, b| {
        graph
            .degree(b)
            .cmp(&graph.degree(a))
            .then_with(|| a.cmp(b))
    });

    let n = ordered.len();
    let center = SIZE as f64 / 2.0;
    let position = |index: usize| -> (f64, f64) {
        let angle = -std::f64::consts::FRAC_PI_2
            + 2.0 * std::f64::consts::PI * index as f64 / n as f64;
        (
            center + RADIUS * angle.cos(),
            center + RADIUS * angle.sin(),
        )
    };
    let index_of: BTreeMap<&str, usize> = ordered
        .iter()
        .enumerate()
        .map(|(i, &w)| (w, i))
        .collect();

    let closeness: BTreeMap<&str, f64> = ordered
        .iter()
        .map(|&w| (w, closeness_centrality(&graph, w).unwrap_or(0.0)))
        .collect();
    let c_min = closeness.values().copied().fold(f64::INFINITY, f64::min);
    let c_max = closeness.values().copied().fold(f64::NEG_INFINITY, f64::max);
    let font_for = |w: &str| -> f64 {
        if (c_max - c_min).abs() < 1e-12 {
            (spec.min_font + spec.max_font) / 2.0
        } else {
            spec.min_font + (spec.max_font - spec.min_font) * (closeness[w] - c_min) / (c_max - c_min)
        }
    };

    let mut svg = svg_open(SIZE, SIZE);
    svg.push_str(&format!(
        "<title>{}</title>\n",
        xml_escape(spec.display(&frame.target))
    ));

    // edges under the labels
    for (a, b) in &frame.induced_edges {
        let count = freq_table
            .get(&(a.clone(), b.clone()))
            .copied()
            .unwrap_or(1);
        if count < spec.min_edge_frequency {
            continue;
        }
        let (x1, y1) = position(index_of[a.as_str()]);
        let (x2, y2) = position(index_of[b.as_str()]);
        let va = graph.valence(a).unwrap();
        let vb = graph.valence(b).unwrap();
        let contrast = matches!(
            (va, vb),
            (Valence::Positive, Valence::Negative) | (Valence::Negative, Valence::Positive)
        );
        let color = if contrast {
            &spec.contrast_edge_color
        } else {
            &spec.default_edge_color
        };
        let width = if contrast { "1.6" } else { "1.0" };
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" \
             stroke-width=\"{width}\" stroke-opacity=\"0.75\"/>\n",
            fmt2(x1),
            fmt2(y1),
            fmt2(x2),
            fmt2(y2),
        ));
    }

    for (i, &word) in ordered.iter().enumerate() {
        let (x, y) = position(i);
        let valence = graph.valence(word).unwrap();
        let color = spec.color_for(valence);
        let font = font_for(word);
        svg.push_str(&format!(
            "<circle cx=\"{}\" cy=\"{}\" r=\"3.5\" fill=\"{color}\"/>\n",
            fmt2(x),
            fmt2(y),
        ));
        // label pushed outward from the circle, anchored by side
        let outward = 1.0 + 18.0 / RADIUS;
        let lx = center + (x - center) * outward;
        let ly = center + (y - center) * outward;
        let anchor = if lx < center - 1.0 {
            "end"
        } else if lx > center + 1.0 {
            "start"
        } else {
            "middle"
        };
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" fill=\"{color}\" font-size=\"{}\" \
             font-family=\"sans-serif\" text-anchor=\"{anchor}\" dominant-baseline=\"middle\"\
             >{}</text>\n",
            fmt2(lx),
            fmt2(ly),
            fmt2(font),
            xml_escape(spec.display(word)),
        ));
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}
