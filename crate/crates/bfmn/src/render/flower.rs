//! Emotional flowers: eight petals at fixed positions and colors, length
//! driven by the emotion z-score, unfilled when not significant.

use super::{fmt2, svg_open, xml_escape};
use crate::affect::{Emotion, EmotionProfile, EMOTIONS};

const SIZE: u32 = 640;
const INNER_RADIUS: f64 = 46.0;
const BASE_LEN: f64 = 36.0;
const LEN_PER_Z: f64 = 28.0;
const Z_CAP: f64 = 6.0;

fn petal_color(e: Emotion) -> &'static str {
    match e {
        Emotion::Joy => "#f5c71a",
        Emotion::Trust => "#9acd32",
        Emotion::Fear => "#2e8b57",
        Emotion::Surprise => "#38b6c9",
        Emotion::Sadness => "#3b6fd4",
        Emotion::Disgust => "#9267cc",
        Emotion::Anger => "#e0393e",
        Emotion::Anticipation => "#f2972a",
    }
}

/// Petal length is affine in the z-score, clipped below at zero and capped
/// so extreme values stay inside the canvas.
fn petal_length(z: f64) -> f64 {
    BASE_LEN + LEN_PER_Z * z.clamp(0.0, Z_CAP)
}

/// Renders an eight-petal emotion profile. Significant petals are filled
/// in their Plutchik color, non-significant ones drawn as outlines; the
/// central circle marks neutrality.
pub fn render_flower_svg(profile: &EmotionProfile, title: &str) -> String {
    let center = SIZE as f64 / 2.0;
    let mut svg = svg_open(SIZE, SIZE);
    svg.push_str(&format!("<title>{}</title>\n", xml_escape(title)));

    for (i, e) in EMOTIONS.iter().enumerate() {
        let angle_deg = -90.0 + 45.0 * i as f64;
        let angle = angle_deg.to_radians();
        let z = profile.z_score(*e);
        let len = petal_length(z);
        let color = petal_color(*e);
        let filled = profile.is_significant(*e);

        // ellipse along the outward axis, its inner tip at the circle
        let cx = center + (INNER_RADIUS + len / 2.0) * angle.cos();
        let cy = center + (INNER_RADIUS + len / 2.0) * angle.sin();
        let (fill, stroke) = if filled {
            (color, color)
        } else {
            ("none", color)
        };
        svg.push_str(&format!(
            "<ellipse cx=\"{}\" cy=\"{}\" rx=\"{}\" ry=\"16\" fill=\"{fill}\" \
             fill-opacity=\"0.85\" stroke=\"{stroke}\" stroke-width=\"1.5\" \
             transform=\"rotate({} {} {})\"/>\n",
            fmt2(cx),
            fmt2(cy),
            fmt2(len / 2.0),
            fmt2(angle_deg),
            fmt2(cx),
            fmt2(cy),
        ));

        let label_r = INNER_RADIUS + len + 26.0;
        let lx = center + label_r * angle.cos();
        let ly = center + label_r * angle.sin();
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" fill=\"#333333\" font-size=\"13\" \
             font-family=\"sans-serif\" text-anchor=\"middle\" dominant-baseline=\"middle\"\
             >{} ({})</text>\n",
            fmt2(lx),
            fmt2(ly),
            e.name(),
            fmt2(z),
        ));
    }

    // neutral core
    svg.push_str(&format!(
        "<circle cx=\"{c}\" cy=\"{c}\" r=\"{r}\" fill=\"#d9d9d9\" stroke=\"#8c8c8c\" \
         stroke-width=\"1\"/>\n",
        c = fmt2(center),
        r = fmt2(INNER_RADIUS * 0.72),
    ));
    svg.push_str(&format!(
        "<text x=\"{c}\" y=\"{y}\" fill=\"#111111\" font-size=\"15\" \
         font-family=\"sans-serif\" text-anchor=\"middle\">{}</text>\n",
        xml_escape(title),
        c = fmt2(center),
        y = fmt2(SIZE as f64 - 22.0),
    ));
    svg.push_str("</svg>\n");
    svg
}
