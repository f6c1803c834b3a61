//! Minimal SVG line chart for trajectory inspection: one series, event
//! markers at control switches, no external dependencies.

pub struct EventMark {
    pub t: f64,
    pub label: String,
}

const W: f64 = 960.0;
const H: f64 = 420.0;
const ML: f64 = 60.0;
const MR: f64 = 20.0;
const MT: f64 = 30.0;
const MB: f64 = 40.0;

pub fn line_chart(title: &str, series: &[(f64, f64)], events: &[EventMark]) -> String {
    let (t_min, t_max) = bounds(series.iter().map(|p| p.0));
    let (x_min, x_max) = bounds(series.iter().map(|p| p.1));
    let x_pad = 0.05 * (x_max - x_min).max(1e-12);
    let (x_min, x_max) = (x_min - x_pad, x_max + x_pad);
    let sx = |t: f64| ML + (t - t_min) / (t_max - t_min).max(1e-300) * (W - ML - MR);
    let sy = |x: f64| H - MB - (x - x_min) / (x_max - x_min).max(1e-300) * (H - MT - MB);

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    out.push_str(&format!(
        "<text x=\"{}\" y=\"20\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
        W / 2.0,
        escape(title)
    ));
    // Axes.
    out.push_str(&format!(
        "<line x1=\"{ML}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        H - MB,
        W - MR,
        H - MB
    ));
    out.push_str(&format!(
        "<line x1=\"{ML}\" y1=\"{MT}\" x2=\"{ML}\" y2=\"{}\" stroke=\"black\"/>\n",
        H - MB
    ));
    for (v, label_x, anchor) in [(t_min, sx(t_min), "start"), (t_max, sx(t_max), "end")] {
        out.push_str(&format!(
            "<text x=\"{label_x}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"{anchor}\">{v:.1}</text>\n",
            H - MB + 16.0
        ));
    }
    for v in [x_min + x_pad, x_max - x_pad] {
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{v:.3}</text>\n",
            ML - 6.0,
            sy(v) + 4.0
        ));
    }
    // Event markers.
    for ev in events {
        let x = sx(ev.t);
        out.push_str(&format!(
            "<line x1=\"{x}\" y1=\"{MT}\" x2=\"{x}\" y2=\"{}\" stroke=\"#cc3333\" stroke-dasharray=\"4 3\"/>\n",
            H - MB
        ));
        out.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"10\" fill=\"#cc3333\">{}</text>\n",
            x + 3.0,
            MT + 12.0,
            escape(&ev.label)
        ));
    }
    // Series polyline (thinned to keep files small).
    let stride = (series.len() / 4000).max(1);
    let mut points = String::new();
    for (i, (t, x)) in series.iter().enumerate() {
        if i % stride == 0 || i + 1 == series.len() {
            points.push_str(&format!("{:.2},{:.2} ", sx(*t), sy(*x)));
        }
    }
    out.push_str(&format!(
        "<polyline fill=\"none\" stroke=\"#3355bb\" stroke-width=\"1.2\" points=\"{}\"/>\n",
        points.trim_end()
    ));
    out.push_str("</svg>\n");
    out
}

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
