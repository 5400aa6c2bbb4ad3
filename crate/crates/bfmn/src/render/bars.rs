//! Bar charts for frame-overlap (Jaccard) values across samples.

use std::collections::BTreeMap;

use super::{fmt2, svg_open, xml_escape};

const WIDTH: u32 = 840;
const HEIGHT: u32 = 420;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_BOTTOM: f64 = 110.0;
const MARGIN_TOP: f64 = 30.0;

/// Zero overlaps are drawn at this floor so they stay visible.
pub const ZERO_FLOOR: f64 = 0.001;

/// log-scale axis minimum, half a decade under the floor
const LOG_MIN: f64 = 0.0005;

/// Renders one bar per sample (labels verbatim, in map order). Values must
/// lie in [0, 1]; zeros are plotted at the 0.001 floor. `log_scale`
/// switches the y axis from linear to log10.
pub fn render_jaccard_bars(values: &BTreeMap<String, f64>, log_scale: bool) -> String {
    let plot_w = WIDTH as f64 - MARGIN_LEFT - 20.0;
    let plot_h = HEIGHT as f64 - MARGIN_TOP - MARGIN_BOTTOM;
    let baseline = HEIGHT as f64 - MARGIN_BOTTOM;

    let height_of = |v: f64| -> f64 {
        let v = if v <= 0.0 { ZERO_FLOOR } else { v };
        if log_scale {
            let min_l = LOG_MIN.log10();
            plot_h * (v.log10() - min_l) / (0.0 - min_l)
        } else {
            plot_h * v
        }
    };

    let mut svg = svg_open(WIDTH, HEIGHT);
    // axes
    svg.push_str(&format!(
        "<line x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\" stroke=\"#333333\" stroke-width=\"1\"/>\n\
         <line x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"#333333\" stroke-width=\"1\"/>\n",
        l = fmt2(MARGIN_LEFT),
        t = fmt2(MARGIN_TOP),
        b = fmt2(baseline),
        r = fmt2(WIDTH as f64 - 20.0),
    ));
    // y reference ticks
    let ticks: &[f64] = if log_scale {
        &[0.001, 0.01, 0.1, 1.0]
    } else {
        &[0.0, 0.25, 0.5, 0.75, 1.0]
    };
    for &tick in ticks {
        let y = baseline - height_of(tick.max(LOG_MIN));
        svg.push_str(&format!(
            "<line x1=\"{x0}\" y1=\"{y}\" x2=\"{x1}\" y2=\"{y}\" stroke=\"#bbbbbb\" \
             stroke-width=\"0.5\"/>\n<text x=\"{xt}\" y=\"{y}\" fill=\"#333333\" \
             font-size=\"11\" font-family=\"sans-serif\" text-anchor=\"end\" \
             dominant-baseline=\"middle\">{tick}</text>\n",
            x0 = fmt2(MARGIN_LEFT),
            x1 = fmt2(WIDTH as f64 - 20.0),
            y = fmt2(y),
            xt = fmt2(MARGIN_LEFT - 6.0),
        ));
    }

    if !values.is_empty() {
        let n = values.len();
        let slot = plot_w / n as f64;
        let bar_w = (slot * 0.62).min(80.0);
        for (i, (label, &value)) in values.iter().enumerate() {
            debug_assert!((0.0..=1.0).contains(&value), "jaccard out of range");
            let h = height_of(value).max(1.5);
            let x = MARGIN_LEFT + slot * i as f64 + (slot - bar_w) / 2.0;
            svg.push_str(&format!(
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"#3b6fd4\" \
                 fill-opacity=\"0.85\"/>\n",
                fmt2(x),
                fmt2(baseline - h),
                fmt2(bar_w),
                fmt2(h),
            ));
            let cx = x + bar_w / 2.0;
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" fill=\"#222222\" font-size=\"12\" \
                 font-family=\"sans-serif\" text-anchor=\"end\" \
                 transform=\"rotate(-40 {} {})\">{}</text>\n",
                fmt2(cx),
                fmt2(baseline + 16.0),
                fmt2(cx),
                fmt2(baseline + 16.0),
                xml_escape(label),
            ));
            svg.push_str(&format!(
                "<text x=\"{}\" y=\"{}\" fill=\"#222222\" font-size=\"11\" \
                 font-family=\"sans-serif\" text-anchor=\"middle\">{}</text>\n",
                fmt2(cx),
                fmt2(baseline - h - 5.0),
                if value <= 0.0 { ZERO_FLOOR } else { value },
            ));
        }
    }
    svg.push_str("</svg>\n");
    svg
}
