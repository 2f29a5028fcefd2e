//! Report writers: pretty JSON, CSV tables, a small self-contained SVG line
//! chart, and shared formatting helpers. Everything written here is
//! deterministic for a fixed input — no clocks, no environment.

use std::path::Path;

use serde::Serialize;

use freqset_core::milp::SolveStatus;

use crate::files::FileError;

pub fn ensure_dir(path: &Path) -> Result<(), FileError> {
    std::fs::create_dir_all(path)
        .map_err(|e| FileError::Io { path: path.display().to_string(), source: e })
}

/// Pretty JSON with a trailing newline.
pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), FileError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| FileError::Json { path: path.display().to_string(), source: e })?;
    text.push('\n');
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), FileError> {
    std::fs::write(path, text)
        .map_err(|e| FileError::Io { path: path.display().to_string(), source: e })
}

/// Writes one CSV table: a header row, then the given records.
pub fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), FileError> {
    let csv_err =
        |e: csv::Error| FileError::Csv { path: path.display().to_string(), detail: e.to_string() };
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header).map_err(csv_err)?;
    for row in rows {
        writer.write_record(&row).map_err(csv_err)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| FileError::Csv { path: path.display().to_string(), detail: e.to_string() })?;
    std::fs::write(path, bytes)
        .map_err(|e| FileError::Io { path: path.display().to_string(), source: e })
}

/// Optimality-gap cell: `OPT` for a proven optimum, otherwise the relative
/// gap as a percentage of the incumbent.
pub fn format_gap(status: SolveStatus, objective: f64, gap_absolute: f64) -> String {
    if status == SolveStatus::Optimal {
        return "OPT".to_string();
    }
    let rel = 100.0 * gap_absolute / objective.abs().max(1e-9);
    format!("{rel:.2}%")
}

/// One chart series: a name and its (x, y) points in x order.
pub struct Series {
    pub name: String,
    pub points: Vec<(f64, f64)>,
}

const PALETTE: [&str; 4] = ["#2b6cb0", "#c53030", "#2f855a", "#6b46c1"];

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for v in values {
        lo = lo.min(v);
        hi = hi.max(v);
    }
    if !lo.is_finite() || !hi.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo < 1e-12 {
        // Flat data: pad so the line sits mid-chart.
        return (lo - 1.0, hi + 1.0);
    }
    (lo, hi)
}

/// A minimal line chart as a standalone SVG document. Coordinates are
/// rounded to two decimals so the text is stable across runs.
pub fn svg_line_chart(title: &str, x_label: &str, y_label: &str, series: &[Series]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const ML: f64 = 70.0; // left margin
    const MR: f64 = 20.0;
    const MT: f64 = 40.0;
    const MB: f64 = 50.0;
    let plot_w = W - ML - MR;
    let plot_h = H - MT - MB;

    let (x_lo, x_hi) = bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.0)));
    let (y_lo, y_hi) = bounds(series.iter().flat_map(|s| s.points.iter().map(|p| p.1)));
    let sx = |x: f64| ML + (x - x_lo) / (x_hi - x_lo) * plot_w;
    let sy = |y: f64| MT + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
        W / 2.0,
        xml_escape(title)
    ));
    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{ML:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
        MT + plot_h,
        W - MR,
        MT + plot_h
    ));
    svg.push_str(&format!(
        "<line x1=\"{ML:.2}\" y1=\"{MT:.2}\" x2=\"{ML:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
        MT + plot_h
    ));
    // Tick labels at both ends of each axis.
    for (v, frac) in [(x_lo, 0.0), ((x_lo + x_hi) / 2.0, 0.5), (x_hi, 1.0)] {
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{v:.2}</text>\n",
            ML + frac * plot_w,
            MT + plot_h + 18.0
        ));
    }
    for (v, frac) in [(y_lo, 0.0), ((y_lo + y_hi) / 2.0, 0.5), (y_hi, 1.0)] {
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">{v:.2}</text>\n",
            ML - 8.0,
            MT + plot_h - frac * plot_h + 4.0
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>\n",
        ML + plot_w / 2.0,
        H - 12.0,
        xml_escape(x_label)
    ));
    svg.push_str(&format!(
        "<text x=\"16\" y=\"{:.2}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.2})\">{}</text>\n",
        MT + plot_h / 2.0,
        MT + plot_h / 2.0,
        xml_escape(y_label)
    ));
    for (i, s) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> =
            s.points.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
        svg.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            path.join(" ")
        ));
        for &(x, y) in &s.points {
            svg.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{color}\"/>\n",
                sx(x),
                sy(y)
            ));
        }
        // Legend entry.
        let ly = MT + 6.0 + i as f64 * 16.0;
        svg.push_str(&format!(
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"10\" height=\"10\" fill=\"{color}\"/>\n",
            W - MR - 150.0,
            ly
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\">{}</text>\n",
            W - MR - 135.0,
            ly + 9.0,
            xml_escape(&s.name)
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

fn xml_escape(text: &str) -> String {
    text.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
