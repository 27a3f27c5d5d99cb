//! Minimal dependency-free SVG charts. CSV is the canonical output; these
//! are quick-look companions.

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 40.0;

fn scale(values: &[f64]) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if (hi - lo).abs() < 1e-300 {
        return (lo - 0.5, hi + 0.5);
    }
    (lo.min(0.0), hi.max(0.0))
}

fn header(title: &str) -> String {
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {w} {h}\">\n",
            "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
            "<text x=\"{cx}\" y=\"20\" font-size=\"14\" text-anchor=\"middle\" ",
            "font-family=\"sans-serif\">{title}</text>\n"
        ),
        w = WIDTH,
        h = HEIGHT,
        cx = WIDTH / 2.0,
        title = title
    )
}

/// Stem plot of per-feature scores.
pub fn stem_chart(title: &str, values: &[f64]) -> String {
    let (lo, hi) = scale(values);
    let y_of = |v: f64| HEIGHT - MARGIN - (v - lo) / (hi - lo) * (HEIGHT - 2.0 * MARGIN);
    let x_of = |i: usize| MARGIN + (i as f64 + 0.5) / values.len() as f64 * (WIDTH - 2.0 * MARGIN);
    let mut out = header(title);
    let y0 = y_of(0.0);
    out.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{y0:.3}\" x2=\"{x2}\" y2=\"{y0:.3}\" stroke=\"#888\"/>\n",
        m = MARGIN,
        x2 = WIDTH - MARGIN
    ));
    for (i, &v) in values.iter().enumerate() {
        let (x, y) = (x_of(i), y_of(v));
        out.push_str(&format!(
            "<line x1=\"{x:.3}\" y1=\"{y0:.3}\" x2=\"{x:.3}\" y2=\"{y:.3}\" stroke=\"#1f6fb2\"/>\n"
        ));
        out.push_str(&format!(
            "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"1.8\" fill=\"#1f6fb2\"/>\n"
        ));
    }
    out.push_str("</svg>\n");
    out
}

/// Line plot of one or more series over a shared x grid.
pub fn line_chart(title: &str, series: &[(&str, &[f64])]) -> String {
    let all: Vec<f64> = series.iter().flat_map(|(_, v)| v.iter().copied()).collect();
    let (lo, hi) = scale(&all);
    let y_of = |v: f64| HEIGHT - MARGIN - (v - lo) / (hi - lo) * (HEIGHT - 2.0 * MARGIN);
    let colors = ["#1f6fb2", "#d55e00", "#009e73", "#9467bd"];
    let mut out = header(title);
    for (si, (name, values)) in series.iter().enumerate() {
        let color = colors[si % colors.len()];
        let points: Vec<String> = values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let x =
                    MARGIN + i as f64 / (values.len().max(2) - 1) as f64 * (WIDTH - 2.0 * MARGIN);
                format!("{:.3},{:.3}", x, y_of(v))
            })
            .collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" points=\"{}\"/>\n",
            points.join(" ")
        ));
        out.push_str(&format!(
            "<text x=\"{x}\" y=\"{y}\" font-size=\"11\" fill=\"{color}\" \
             font-family=\"sans-serif\">{name}</text>\n",
            x = WIDTH - MARGIN - 120.0,
            y = 30.0 + 14.0 * si as f64,
        ));
    }
    out.push_str("</svg>\n");
    out
}
