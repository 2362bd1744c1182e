//! File formats written by the command-line tool: `#`-commented CSV
//! tables, pretty JSON documents and a two-curve SVG plot.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};

/// Decimal form that parses back to the same `f64` (17 significant digits).
pub fn format_value(v: f64) -> String {
    format!("{v:.16e}")
}

/// A CSV table with leading `# ` comment lines.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub comments: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable {
            comments: Vec::new(),
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.comments {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "{}", self.header.join(","));
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(|v| format_value(*v)).collect();
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |line: usize, what: &str| {
            Error::InvalidParameter(format!("CSV line {line}: {what}"))
        };
        let mut lines = text.lines().enumerate();
        let mut comments = Vec::new();
        let header = loop {
            let (_, line) = lines.next().ok_or_else(|| bad(0, "missing header"))?;
            match line.strip_prefix('#') {
                Some(c) => comments.push(c.strip_prefix(' ').unwrap_or(c).to_string()),
                None => break line.split(',').map(str::to_string).collect::<Vec<_>>(),
            }
        };
        let mut rows = Vec::new();
        for (n, line) in lines {
            let row = line
                .split(',')
                .map(|f| f.parse::<f64>().map_err(|_| bad(n + 1, "non-numeric field")))
                .collect::<Result<Vec<_>>>()?;
            if row.len() != header.len() {
                return Err(bad(n + 1, "wrong number of fields"));
            }
            rows.push(row);
        }
        Ok(CsvTable {
            comments,
            header,
            rows,
        })
    }
}

/// Pretty JSON with a trailing newline.
pub fn render_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidParameter(format!("JSON encoding failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Parses a document written by [`render_json`] and writes it again.
pub fn reserialize_json(text: &str) -> Result<String> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| Error::InvalidParameter(format!("JSON parse failed: {e}")))?;
    render_json(&value)
}

/// A named series for [`svg_plot`].
pub struct Series<'a> {
    pub label: &'a str,
    pub color: &'a str,
    pub points: &'a [(f64, f64)],
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 60.0;

/// Standalone 800×600 SVG line plot, one polyline per series.
pub fn svg_plot(series: &[Series<'_>], x_label: &str, y_label: &str) -> String {
    let all = series.iter().flat_map(|s| s.points.iter());
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for &(x, y) in all {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x1 > x0) {
        x1 = x0 + 1.0;
    }
    if !(y1 > y0) {
        y1 = y0 + 1.0;
    }
    let px = |x: f64| MARGIN + (x - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |y: f64| HEIGHT - MARGIN - (y - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="800" height="600" viewBox="0 0 800 600">"#
    );
    let _ = writeln!(out, r#"<rect width="800" height="600" fill="white"/>"#);
    let (ax, ay) = (px(0.0_f64.clamp(x0, x1)), py(0.0_f64.clamp(y0, y1)));
    let _ = writeln!(
        out,
        r#"<line x1="{:.2}" y1="{ay:.2}" x2="{:.2}" y2="{ay:.2}" stroke="black"/>"#,
        MARGIN,
        WIDTH - MARGIN
    );
    let _ = writeln!(
        out,
        r#"<line x1="{ax:.2}" y1="{:.2}" x2="{ax:.2}" y2="{:.2}" stroke="black"/>"#,
        MARGIN,
        HEIGHT - MARGIN
    );
    for (i, s) in series.iter().enumerate() {
        let pts: Vec<String> = s
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            out,
            r#"<polyline fill="none" stroke="{}" stroke-width="2" points="{}"/>"#,
            s.color,
            pts.join(" ")
        );
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" fill="{}" font-size="14">{}</text>"#,
            MARGIN + 10.0,
            MARGIN + 20.0 * (i + 1) as f64,
            s.color,
            s.label
        );
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.2}" y="{:.2}" font-size="16" text-anchor="middle">{x_label}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 15.0
    );
    let _ = writeln!(
        out,
        r#"<text x="20" y="{:.2}" font-size="16" text-anchor="middle" transform="rotate(-90 20 {:.2})">{y_label}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    let _ = writeln!(out, "</svg>");
    out
}
