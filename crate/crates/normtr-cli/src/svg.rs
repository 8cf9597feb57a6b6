//! Hand-rolled SVG line chart for residual-vs-iteration curves.
//!
//! The output is a pure function of the input series: fixed canvas, fixed
//! palette, and fixed-precision coordinates, so rendering the same runs twice
//! produces byte-identical files.

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

/// One curve: a seed label and its (k, residual) points.
pub struct Series {
    pub label: String,
    pub points: Vec<(u64, f64)>,
}

/// Renders residual curves on a log-scaled y axis. Non-positive residuals
/// cannot be placed on a log axis and are skipped.
pub fn residual_chart(series: &[Series]) -> String {
    let mut max_k: u64 = 1;
    let mut min_log = f64::INFINITY;
    let mut max_log = f64::NEG_INFINITY;
    for s in series {
        for &(k, r) in &s.points {
            max_k = max_k.max(k);
            if r > 0.0 && r.is_finite() {
                let l = r.log10();
                min_log = min_log.min(l);
                max_log = max_log.max(l);
            }
        }
    }
    let (lo, hi) = if min_log.is_finite() {
        let lo = min_log.floor() as i32;
        let hi = max_log.ceil() as i32;
        if lo == hi { (lo - 1, hi + 1) } else { (lo, hi) }
    } else {
        (-1, 1)
    };

    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let x_of = |k: u64| LEFT + plot_w * (k as f64) / (max_k as f64);
    let y_of = |log: f64| TOP + plot_h * (hi as f64 - log) / ((hi - lo) as f64);

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<text x=\"{:.2}\" y=\"18\" font-family=\"monospace\" font-size=\"14\" \
         text-anchor=\"middle\">residual vs k (log scale)</text>\n",
        LEFT + plot_w / 2.0
    ));

    // Decade gridlines and y labels.
    for p in lo..=hi {
        let y = y_of(p as f64);
        out.push_str(&format!(
            "<line x1=\"{LEFT:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" \
             stroke=\"#dddddd\" stroke-width=\"1\"/>\n",
            LEFT + plot_w
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\" \
             text-anchor=\"end\">1e{p}</text>\n",
            LEFT - 6.0,
            y + 4.0
        ));
    }

    // X axis ticks at 0, max_k/2 (when distinct), and max_k.
    let mut ticks = vec![0, max_k];
    if max_k >= 2 {
        ticks.insert(1, max_k / 2);
    }
    for k in ticks {
        let x = x_of(k);
        out.push_str(&format!(
            "<line x1=\"{x:.2}\" y1=\"{:.2}\" x2=\"{x:.2}\" y2=\"{:.2}\" \
             stroke=\"#999999\" stroke-width=\"1\"/>\n",
            TOP + plot_h,
            TOP + plot_h + 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{x:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\" \
             text-anchor=\"middle\">{k}</text>\n",
            TOP + plot_h + 18.0
        ));
    }
    out.push_str(&format!(
        "<rect x=\"{LEFT:.2}\" y=\"{TOP:.2}\" width=\"{plot_w:.2}\" height=\"{plot_h:.2}\" \
         fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n"
    ));

    // Curves plus legend entries, in input order.
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let pts: Vec<String> = s
            .points
            .iter()
            .filter(|&&(_, r)| r > 0.0 && r.is_finite())
            .map(|&(k, r)| format!("{:.2},{:.2}", x_of(k), y_of(r.log10())))
            .collect();
        if !pts.is_empty() {
            out.push_str(&format!(
                "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" \
                 points=\"{}\"/>\n",
                pts.join(" ")
            ));
        }
        let ly = TOP + 14.0 * (i as f64) + 10.0;
        out.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{ly:.2}\" x2=\"{:.2}\" y2=\"{ly:.2}\" \
             stroke=\"{color}\" stroke-width=\"2\"/>\n",
            LEFT + plot_w - 120.0,
            LEFT + plot_w - 100.0
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-family=\"monospace\" font-size=\"11\">{}</text>\n",
            LEFT + plot_w - 94.0,
            ly + 4.0,
            s.label
        ));
    }
    out.push_str("</svg>\n");
    out
}
