//! Standalone SVG 1.1 histogram rendering with an optional law density
//! overlaid as a path. Out-of-window eigenvalues are annotated, never
//! silently dropped.

use crate::error::Result;
use crate::laws::Law;
use crate::spectra::Histogram;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 45.0;

fn fmt(v: f64) -> String {
    format!("{v:.4}")
}

/// Render a histogram of `values` (optionally against a law's density).
pub fn histogram_svg(
    values: &[f64],
    law: Option<&Law>,
    bins: Option<usize>,
    window: Option<(f64, f64)>,
    title: &str,
) -> Result<String> {
    let hist = match (bins, window) {
        (Some(b), Some((lo, hi))) => Histogram::with_bins(values, b, lo, hi)?,
        (Some(b), None) => {
            let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
            Histogram::with_bins(values, b, lo, hi)?
        }
        (None, w) => Histogram::freedman_diaconis(values, w)?,
    };

    let lo = hist.edges[0];
    let hi = *hist.edges.last().unwrap();
    let plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;

    let mut y_max = hist.densities.iter().cloned().fold(0.0, f64::max);
    let law_points: Vec<(f64, f64)> = match law {
        Some(law) => (0..=256)
            .map(|i| {
                let x = lo + (hi - lo) * i as f64 / 256.0;
                (x, law.pdf(x))
            })
            .collect(),
        None => Vec::new(),
    };
    for &(_, d) in &law_points {
        y_max = y_max.max(d);
    }
    if y_max <= 0.0 {
        y_max = 1.0;
    }
    y_max *= 1.08;

    let x_pos = |x: f64| MARGIN_LEFT + (x - lo) / (hi - lo) * plot_w;
    let y_pos = |d: f64| MARGIN_TOP + plot_h * (1.0 - d / y_max);

    let mut s = String::new();
    s.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" \
         width=\"{WIDTH}\" height=\"{HEIGHT}\" viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    s.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    s.push_str(&format!(
        "<text x=\"{}\" y=\"20\" font-family=\"monospace\" font-size=\"14\">{}</text>\n",
        MARGIN_LEFT,
        title.replace('<', "&lt;").replace('&', "&amp;")
    ));

    // bars
    for (i, &d) in hist.densities.iter().enumerate() {
        if d <= 0.0 {
            continue;
        }
        let x0 = x_pos(hist.edges[i]);
        let x1 = x_pos(hist.edges[i + 1]);
        let y = y_pos(d);
        s.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" \
             fill=\"#7aa6c2\" stroke=\"#3d5a73\" stroke-width=\"0.5\"/>\n",
            fmt(x0),
            fmt(y),
            fmt(x1 - x0),
            fmt(MARGIN_TOP + plot_h - y),
        ));
    }

    // law density path
    if !law_points.is_empty() {
        let mut path = String::from("M");
        for (i, &(x, d)) in law_points.iter().enumerate() {
            if i > 0 {
                path.push_str(" L");
            }
            path.push_str(&format!("{} {}", fmt(x_pos(x)), fmt(y_pos(d))));
        }
        s.push_str(&format!(
            "<path d=\"{path}\" fill=\"none\" stroke=\"#c2443d\" stroke-width=\"1.8\"/>\n"
        ));
    }

    // axes
    s.push_str(&format!(
        "<line x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\" stroke=\"black\"/>\n",
        l = MARGIN_LEFT,
        r = WIDTH - MARGIN_RIGHT,
        t = MARGIN_TOP,
        b = MARGIN_TOP + plot_h,
    ));
    for i in 0..=4 {
        let x = lo + (hi - lo) * i as f64 / 4.0;
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\" \
             text-anchor=\"middle\">{}</text>\n",
            fmt(x_pos(x)),
            MARGIN_TOP + plot_h + 16.0,
            fmt(x)
        ));
    }
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"11\">{}</text>\n",
        8.0,
        MARGIN_TOP + 10.0,
        fmt(y_max / 1.08)
    ));

    if hist.outliers > 0 {
        s.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"monospace\" font-size=\"12\" \
             fill=\"#c2443d\">{} eigenvalue(s) outside window</text>\n",
            MARGIN_LEFT,
            MARGIN_TOP + plot_h + 34.0,
            hist.outliers
        ));
    }
    s.push_str("</svg>\n");
    Ok(s)
}
