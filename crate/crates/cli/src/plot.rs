//! Grouped bar chart of effective evidence weights.
//!
//! Three task groups by three sources (private, human, AI), one bar each,
//! with standard-error whiskers and a dashed reference line at weight 1,
//! the benchmark of an ideal evidence-weigher. Output is a plain SVG string
//! assembled with fixed two-decimal coordinates, so a given input always
//! yields identical bytes. Tasks without a fit leave their slot empty and
//! are named in a legend note.

use std::fmt::Write;

use cascade_core::ScenarioId;
use cascade_estimator::{EvidenceSource, TaskWeights};

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 62.0;
const RIGHT: f64 = 622.0;
const TOP: f64 = 36.0;
const BOTTOM: f64 = 356.0;
const BAR_WIDTH: f64 = 36.0;
const BAR_STEP: f64 = 44.0;
const TICK_STEP: f64 = 0.25;

fn source_color(source: EvidenceSource) -> &'static str {
    match source {
        EvidenceSource::Private => "#4e79a7",
        EvidenceSource::Human => "#f28e2b",
        EvidenceSource::Ai => "#59a14f",
    }
}

/// Renders the weight chart. Input order is irrelevant; groups follow the
/// fixed task order and duplicate tasks keep their first entry.
pub fn plot_weights(weights: &[TaskWeights]) -> String {
    let by_task: Vec<Option<&TaskWeights>> = ScenarioId::ALL
        .iter()
        .map(|task| weights.iter().find(|w| w.task == *task))
        .collect();
    let missing: Vec<&str> = ScenarioId::ALL
        .iter()
        .zip(&by_task)
        .filter(|(_, found)| found.is_none())
        .map(|(task, _)| task.as_str())
        .collect();

    // Y range: multiples of the tick step covering zero, the reference line
    // and every whisker end.
    let mut lo = 0.0f64;
    let mut hi = 1.25f64;
    for weights in by_task.iter().flatten() {
        for source in EvidenceSource::ALL {
            let w = weights.get(source);
            if w.estimate.is_finite() && w.standard_error.is_finite() {
                lo = lo.min(w.estimate - w.standard_error);
                hi = hi.max(w.estimate + w.standard_error + 0.05);
            }
        }
    }
    let lo_ticks = (lo / TICK_STEP).floor() as i64;
    let hi_ticks = (hi / TICK_STEP).ceil() as i64;
    let (y_min, y_max) = (lo_ticks as f64 * TICK_STEP, hi_ticks as f64 * TICK_STEP);
    let y_of = |value: f64| BOTTOM - (value - y_min) / (y_max - y_min) * (BOTTOM - TOP);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\">"
    );
    let _ = writeln!(
        svg,
        "  <title>Effective evidence weights by task and source</title>"
    );
    let _ = writeln!(
        svg,
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"#ffffff\"/>"
    );
    let _ = writeln!(
        svg,
        "  <text x=\"{:.2}\" y=\"22\" font-size=\"15\" text-anchor=\"middle\">Effective evidence weights by task</text>",
        (LEFT + RIGHT) / 2.0
    );

    // Horizontal grid and tick labels.
    for tick in lo_ticks..=hi_ticks {
        let value = tick as f64 * TICK_STEP;
        let y = y_of(value);
        let _ = writeln!(
            svg,
            "  <line x1=\"{LEFT:.2}\" y1=\"{y:.2}\" x2=\"{RIGHT:.2}\" y2=\"{y:.2}\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>"
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">{value:.2}</text>",
            LEFT - 8.0,
            y + 4.0
        );
    }

    let group_width = (RIGHT - LEFT) / ScenarioId::ALL.len() as f64;
    for (slot, (task, entry)) in ScenarioId::ALL.iter().zip(&by_task).enumerate() {
        let center = LEFT + (slot as f64 + 0.5) * group_width;
        let _ = writeln!(
            svg,
            "  <text x=\"{center:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">{task}</text>",
            BOTTOM + 22.0
        );
        let Some(weights) = entry else { continue };
        for (k, source) in EvidenceSource::ALL.into_iter().enumerate() {
            let w = weights.get(source);
            let x_center = center + (k as f64 - 1.0) * BAR_STEP;
            let x = x_center - BAR_WIDTH / 2.0;
            let y_value = y_of(w.estimate);
            let y_zero = y_of(0.0);
            let y_top = y_value.min(y_zero);
            let bar_height = (y_value - y_zero).abs();
            let _ = writeln!(
                svg,
                "  <rect class=\"bar\" x=\"{x:.2}\" y=\"{y_top:.2}\" width=\"{BAR_WIDTH:.2}\" height=\"{bar_height:.2}\" fill=\"{}\"/>",
                source_color(source)
            );
            if w.standard_error > 0.0 {
                let y_hi = y_of(w.estimate + w.standard_error);
                let y_lo = y_of(w.estimate - w.standard_error);
                let cap = 5.0;
                let _ = writeln!(
                    svg,
                    "  <path class=\"whisker\" d=\"M {x_center:.2} {y_hi:.2} L {x_center:.2} {y_lo:.2} M {:.2} {y_hi:.2} L {:.2} {y_hi:.2} M {:.2} {y_lo:.2} L {:.2} {y_lo:.2}\" stroke=\"#333333\" stroke-width=\"1.5\" fill=\"none\"/>",
                    x_center - cap,
                    x_center + cap,
                    x_center - cap,
                    x_center + cap
                );
            }
        }
    }

    // Axis frame, zero baseline and the rational-benchmark line.
    let y_zero = y_of(0.0);
    let _ = writeln!(
        svg,
        "  <line x1=\"{LEFT:.2}\" y1=\"{y_zero:.2}\" x2=\"{RIGHT:.2}\" y2=\"{y_zero:.2}\" stroke=\"#333333\" stroke-width=\"1\"/>"
    );
    let _ = writeln!(
        svg,
        "  <line x1=\"{LEFT:.2}\" y1=\"{TOP:.2}\" x2=\"{LEFT:.2}\" y2=\"{BOTTOM:.2}\" stroke=\"#333333\" stroke-width=\"1\"/>"
    );
    let y_ref = y_of(1.0);
    let _ = writeln!(
        svg,
        "  <line class=\"reference\" x1=\"{LEFT:.2}\" y1=\"{y_ref:.2}\" x2=\"{RIGHT:.2}\" y2=\"{y_ref:.2}\" stroke=\"#b0332a\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>"
    );
    let _ = writeln!(
        svg,
        "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" fill=\"#b0332a\">weight = 1</text>",
        RIGHT - 70.0,
        y_ref - 6.0
    );
    let _ = writeln!(
        svg,
        "  <text x=\"16\" y=\"{:.2}\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2})\">weight (log-odds per signal)</text>",
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0
    );

    // Legend, with a note for tasks that have no fit.
    let legend_x = LEFT + 8.0;
    for (k, source) in EvidenceSource::ALL.into_iter().enumerate() {
        let x = legend_x + k as f64 * 92.0;
        let _ = writeln!(
            svg,
            "  <rect x=\"{x:.2}\" y=\"{:.2}\" width=\"12\" height=\"12\" fill=\"{}\"/>",
            TOP + 4.0,
            source_color(source)
        );
        let _ = writeln!(
            svg,
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">{}</text>",
            x + 16.0,
            TOP + 14.0,
            source.label()
        );
    }
    if !missing.is_empty() {
        let _ = writeln!(
            svg,
            "  <text class=\"missing-note\" x=\"{legend_x:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"#b0332a\">no fit: {}</text>",
            TOP + 32.0,
            missing.join(", ")
        );
    }
    svg.push_str("</svg>\n");
    svg
}
