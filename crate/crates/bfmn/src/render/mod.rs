//! Publication-style SVG output: circular frame diagrams, emotional
//! flowers, and Jaccard bar charts. Renderers are pure functions of their
//! inputs; rendering the same data twice yields identical bytes.

mod bars;
mod flower;
mod frame;

pub use bars::render_jaccard_bars;
pub use flower::render_flower_svg;
pub use frame::render_frame_svg;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::valence::Valence;

/// Display conventions: positive nodes in the cyan family, negative in
/// red, neutral in black, with purple reserved for edges that bridge
/// opposite valences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderSpec {
    pub positive_color: String,
    pub neutral_color: String,
    pub negative_color: String,
    pub contrast_edge_color: String,
    pub default_edge_color: String,
    /// association pairs below this count are not drawn
    pub min_edge_frequency: u64,
    pub min_font: f64,
    pub max_font: f64,
    /// source word -> display word, applied to labels only
    pub translation_map: BTreeMap<String, String>,
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec {
            positive_color: "#00a3b4".into(),
            neutral_color: "#141414".into(),
            negative_color: "#d62728".into(),
            contrast_edge_color: "#8e44ad".into(),
            default_edge_color: "#c8c8c8".into(),
            min_edge_frequency: 1,
            min_font: 10.0,
            max_font: 26.0,
            translation_map: BTreeMap::new(),
        }
    }
}

impl RenderSpec {
    pub fn color_for(&self, valence: Valence) -> &str {
        match valence {
            Valence::Positive => &self.positive_color,
            Valence::Neutral => &self.neutral_color,
            Valence::Negative => &self.negative_color,
        }
    }

    pub fn display<'a>(&'a self, word: &'a str) -> &'a str {
        self.translation_map
            .get(word)
            .map(String::as_str)
            .unwrap_or(word)
    }
}

pub(crate) fn xml_escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            _ => out.push(c),
        }
    }
    out
}

/// Fixed-precision coordinate formatting keeps output byte-stable.
pub(crate) fn fmt2(x: f64) -> String {
    format!("{x:.2}")
}

pub(crate) fn svg_open(width: u32, height: u32) -> String {
    format!(
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" \
         width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n\
         <rect width=\"{width}\" height=\"{height}\" fill=\"white\"/>\n"
    )
}
