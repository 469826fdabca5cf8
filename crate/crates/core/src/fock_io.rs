//! Tables, CSV/JSON/SVG artifacts and state serialization.
//!
//! Reals are written with 17 significant digits so every finite double
//! survives a round trip bit for bit. Provenance of a table goes to a JSON
//! sidecar next to the CSV (`scan.csv` → `scan.meta.json`), which keeps the
//! CSV itself plain RFC 4180.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::states::FockState;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub provenance: BTreeMap<String, String>,
}

impl ScanTable {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
            provenance: BTreeMap::new(),
        }
    }

    pub fn push_row(&mut self, row: Vec<f64>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Range(format!(
                "row has {} values but the table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn with_provenance(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.provenance.insert(key.into(), value.to_string());
        self
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.columns
            .iter()
            .position(|c| c == name)
            .ok_or_else(|| Error::Range(format!("no column named {name:?}")))
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let i = self.column_index(name)?;
        Ok(self.rows.iter().map(|r| r[i]).collect())
    }
}

/// 17 significant digits; shortest forms for the non-finite values.
pub fn format_real(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

fn sidecar(path: &Path) -> PathBuf {
    path.with_extension("meta.json")
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse(format!("{}: {other:?}", path.display())),
    }
}

/// Header line plus one line per row, LF endings.
pub fn write_csv(table: &ScanTable, path: &Path) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    w.write_record(&table.columns).map_err(|e| csv_err(path, e))?;
    for row in &table.rows {
        w.write_record(row.iter().map(|&x| format_real(x)))
            .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    if !table.provenance.is_empty() {
        let meta =
            serde_json::to_string_pretty(&table.provenance).map_err(|e| Error::Parse(e.to_string()))?;
        let p = sidecar(path);
        fs::write(&p, meta + "\n").map_err(|e| Error::io(p, e))?;
    }
    Ok(())
}

pub fn read_csv(path: &Path) -> Result<ScanTable> {
    let mut r = csv::ReaderBuilder::new()
        .from_path(path)
        .map_err(|e| csv_err(path, e))?;
    let columns: Vec<String> = r
        .headers()
        .map_err(|e| csv_err(path, e))?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut table = ScanTable::new(columns);
    for rec in r.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let row = rec
            .iter()
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("{}: {f:?} is not a number", path.display())))
            })
            .collect::<Result<Vec<_>>>()?;
        table.push_row(row)?;
    }
    let p = sidecar(path);
    if p.exists() {
        let text = fs::read_to_string(&p).map_err(|e| Error::io(&p, e))?;
        table.provenance = serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))?;
    }
    Ok(table)
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlotStyle {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub width: f64,
    pub height: f64,
}

impl Default for PlotStyle {
    fn default() -> Self {
        Self {
            title: String::new(),
            x_label: String::new(),
            y_label: String::new(),
            width: 640.0,
            height: 420.0,
        }
    }
}

const PALETTE: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"];

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn range(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(v), b.max(v))
        });
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if lo == hi {
        (lo - 0.5, hi + 0.5)
    } else {
        (lo, hi)
    }
}

/// Standalone SVG 1.1 line plot of `y_cols` against `x_col`, linear axes.
/// Non-finite samples break a polyline into separate pieces.
pub fn render_svg_lineplot(
    table: &ScanTable,
    x_col: &str,
    y_cols: &[&str],
    style: &PlotStyle,
) -> Result<String> {
    let x = table.column(x_col)?;
    let ys = y_cols
        .iter()
        .map(|c| table.column(c))
        .collect::<Result<Vec<_>>>()?;
    let (w, h) = (style.width, style.height);
    let (ml, mr, mt, mb) = (60.0, 20.0, 30.0, 45.0);
    let (pw, ph) = (w - ml - mr, h - mt - mb);
    let (x0, x1) = range(x.iter().copied());
    let (y0, y1) = range(ys.iter().flatten().copied());
    let sx = |v: f64| ml + (v - x0) / (x1 - x0) * pw;
    let sy = |v: f64| mt + ph - (v - y0) / (y1 - y0) * ph;

    let mut s = String::new();
    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>"#
    );
    for k in 0..=4 {
        let f = k as f64 / 4.0;
        let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
        let (px, py) = (sx(xv), sy(yv));
        let _ = writeln!(
            s,
            r#"<line x1="{px:.2}" y1="{:.2}" x2="{px:.2}" y2="{:.2}" stroke="black"/><text x="{px:.2}" y="{:.2}" font-size="11" text-anchor="middle">{}</text>"#,
            mt + ph,
            mt + ph + 5.0,
            mt + ph + 18.0,
            tick(xv)
        );
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{py:.2}" x2="{ml}" y2="{py:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" font-size="11" text-anchor="end">{}</text>"#,
            ml - 5.0,
            ml - 8.0,
            py + 4.0,
            tick(yv)
        );
    }
    if !style.title.is_empty() {
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="18" font-size="14" text-anchor="middle">{}</text>"#,
            ml + pw / 2.0,
            escape(&style.title)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" font-size="12" text-anchor="middle">{}</text>"#,
        ml + pw / 2.0,
        h - 8.0,
        escape(&style.x_label)
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{:.2}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {:.2})">{}</text>"#,
        mt + ph / 2.0,
        mt + ph / 2.0,
        escape(&style.y_label)
    );
    for (i, (name, y)) in y_cols.iter().zip(&ys).enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut pieces: Vec<Vec<String>> = vec![Vec::new()];
        for (xv, yv) in x.iter().zip(y) {
            if xv.is_finite() && yv.is_finite() {
                pieces
                    .last_mut()
                    .unwrap()
                    .push(format!("{:.2},{:.2}", sx(*xv), sy(*yv)));
            } else if !pieces.last().unwrap().is_empty() {
                pieces.push(Vec::new());
            }
        }
        for p in pieces.iter().filter(|p| !p.is_empty()) {
            let _ = writeln!(
                s,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                p.join(" ")
            );
        }
        let ly = mt + 14.0 + 16.0 * i as f64;
        let lx = ml + pw - 120.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}" font-size="11">{}</text>"#,
            lx + 20.0,
            lx + 25.0,
            ly + 4.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    Ok(s)
}

fn tick(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

pub fn write_svg_lineplot(
    table: &ScanTable,
    x_col: &str,
    y_cols: &[&str],
    path: &Path,
    style: &PlotStyle,
) -> Result<()> {
    let svg = render_svg_lineplot(table, x_col, y_cols, style)?;
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}

pub fn state_to_json(s: &FockState) -> Result<String> {
    serde_json::to_string_pretty(s).map_err(|e| Error::Parse(e.to_string()))
}

pub fn state_from_json(text: &str) -> Result<FockState> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn state_roundtrip(s: &FockState) -> Result<FockState> {
    state_from_json(&state_to_json(s)?)
}

pub fn write_state_json(s: &FockState, path: &Path) -> Result<()> {
    fs::write(path, state_to_json(s)? + "\n").map_err(|e| Error::io(path, e))
}

pub fn read_state_json(path: &Path) -> Result<FockState> {
    state_from_json(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
}
