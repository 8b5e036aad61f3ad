//! Static SVG rendering of trajectory CSV files.

use std::fmt::Write as _;
use std::process::ExitCode;

use serde_json::Value;

use crate::error::{write_failed, CliError};
use crate::PlotArgs;

const PALETTE: [&str; 10] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
];
const SIZE: f64 = 600.0;

/// Particle paths read from a trajectory CSV, indexed from 0.
pub fn read_paths(path: &str) -> Result<Vec<Vec<(f64, f64)>>, CliError> {
    let bad = |m: String| CliError::Input(format!("{path}: {m}"));
    let mut r = csv::Reader::from_path(path).map_err(|e| bad(e.to_string()))?;
    let headers = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    let column = |name: &str| headers.iter().position(|h| h.trim() == name);
    let mut cols = Vec::new();
    while let (Some(x), Some(y)) = (column(&format!("x{}", cols.len() + 1)), column(&format!("y{}", cols.len() + 1))) {
        cols.push((x, y));
    }
    if cols.is_empty() {
        return Err(bad("no x1,y1 columns".into()));
    }
    let mut paths = vec![Vec::new(); cols.len()];
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let num = |i: usize| -> Result<f64, CliError> {
            rec.get(i)
                .and_then(|v| v.trim().parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(format!("row {}: column {} is not a finite number", line + 2, i + 1)))
        };
        for (p, &(x, y)) in paths.iter_mut().zip(&cols) {
            p.push((num(x)?, num(y)?));
        }
    }
    if paths[0].is_empty() {
        return Err(bad("no data rows".into()));
    }
    Ok(paths)
}

/// Trace blocks (1-based labels) from a classification report, which may be
/// raw JSON or `classify` output containing a fenced JSON block.
pub fn read_blocks(path: &str) -> Result<Vec<Vec<usize>>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {path}: {e}")))?;
    let json = match text.find("```json") {
        Some(start) => {
            let rest = &text[start + 7..];
            &rest[..rest.find("```").unwrap_or(rest.len())]
        }
        None => text.as_str(),
    };
    let v: Value = serde_json::from_str(json).map_err(|e| CliError::Input(format!("{path}: {e}")))?;
    let blocks = v
        .get("trace_report")
        .and_then(|r| r.get("blocks"))
        .or_else(|| v.get("blocks"))
        .and_then(Value::as_array)
        .ok_or_else(|| CliError::Input(format!("{path}: report has no trace blocks")))?;
    blocks
        .iter()
        .map(|b| {
            b.get("members")
                .and_then(Value::as_array)
                .and_then(|m| m.iter().map(|x| x.as_u64().map(|x| x as usize)).collect::<Option<Vec<_>>>())
                .ok_or_else(|| CliError::Input(format!("{path}: malformed block {b}")))
        })
        .collect()
}

/// Color class of each particle: its block index, or a fresh class per
/// particle without a block.
pub fn color_classes(n: usize, blocks: &[Vec<usize>]) -> Vec<usize> {
    let mut class = vec![None; n];
    for (b, members) in blocks.iter().enumerate() {
        for &m in members {
            if (1..=n).contains(&m) {
                class[m - 1] = Some(b);
            }
        }
    }
    let mut next = blocks.len();
    class
        .into_iter()
        .map(|c| {
            c.unwrap_or_else(|| {
                next += 1;
                next - 1
            })
        })
        .collect()
}

pub fn render(paths: &[Vec<(f64, f64)>], classes: &[usize]) -> String {
    let pts = paths.iter().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let margin = 0.05 * span;
    let (vx, vy) = (x0 - margin, -y1 - margin);
    let (vw, vh) = (x1 - x0 + 2.0 * margin, y1 - y0 + 2.0 * margin);
    let stroke = 0.004 * span;

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{:.0}" viewBox="{vx:.6} {vy:.6} {vw:.6} {vh:.6}">"#,
        SIZE * vh / vw
    );
    let _ = writeln!(svg, r#"<rect x="{vx:.6}" y="{vy:.6}" width="{vw:.6}" height="{vh:.6}" fill="white"/>"#);
    for (i, path) in paths.iter().enumerate() {
        let color = PALETTE[classes[i] % PALETTE.len()];
        let points: Vec<String> = path.iter().map(|&(x, y)| format!("{:.6},{:.6}", x + 0.0, 0.0 - y)).collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="{stroke:.6}" stroke-linejoin="round" points="{}"><title>particle {} (class {})</title></polyline>"#,
            points.join(" "),
            i + 1,
            classes[i] + 1
        );
        if let Some(&(x, y)) = path.first() {
            let _ = writeln!(svg, r#"<circle cx="{:.6}" cy="{:.6}" r="{:.6}" fill="{color}"/>"#, x + 0.0, 0.0 - y, 2.5 * stroke);
        }
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn run(args: &PlotArgs) -> Result<ExitCode, CliError> {
    let paths = read_paths(&args.trajectory)?;
    let blocks = match &args.partition {
        Some(p) => read_blocks(p)?,
        None => Vec::new(),
    };
    let classes = color_classes(paths.len(), &blocks);
    std::fs::write(&args.out, render(&paths, &classes)).map_err(|e| write_failed(&args.out, e))?;
    let distinct = {
        let mut c = classes.clone();
        c.sort_unstable();
        c.dedup();
        c.len()
    };
    println!("{} particles in {distinct} color classes written to {}", paths.len(), args.out);
    Ok(ExitCode::SUCCESS)
}
