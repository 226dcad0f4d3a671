//! CSV writing, index-ordered parallel maps and small SVG plots.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::error::{CliError, CliResult};

/// Map `f` over `items` on a pool of `jobs` threads; results keep input order.
pub fn par_map<T, R, F>(jobs: usize, items: &[T], f: F) -> CliResult<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> CliResult<R> + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| CliError::Numerical(format!("thread pool: {e}")))?;
    pool.install(|| items.par_iter().map(&f).collect())
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("creating {}: {e}", dir.display())))
}

/// Write a header and rows of preformatted fields.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> CliResult<PathBuf> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    w.write_record(header)?;
    for r in rows {
        if r.len() != header.len() {
            return Err(CliError::Numerical(format!(
                "{}: row has {} fields, header {}",
                path.display(),
                r.len(),
                header.len()
            )));
        }
        w.write_record(r)?;
    }
    w.flush()?;
    Ok(path.to_path_buf())
}

/// Shortest round-trip representation, so equal values print identically.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 400.0;
const MARGIN: f64 = 50.0;

fn bounds(values: impl Iterator<Item = f64>) -> (f64, f64) {
    let (lo, hi) = values
        .filter(|v| v.is_finite())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if !lo.is_finite() {
        (0.0, 1.0)
    } else if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, hi + 0.5)
    }
}

fn svg_open(title: &str, xlabel: &str, ylabel: &str) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(s, r#"<text x="{}" y="20" text-anchor="middle">{title}</text>"#, WIDTH / 2.0);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{xlabel}</text>"#,
        WIDTH / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">{ylabel}</text>"#,
        HEIGHT / 2.0,
        HEIGHT / 2.0
    );
    let _ = writeln!(
        s,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{}" height="{}" fill="none" stroke="black"/>"#,
        WIDTH - 2.0 * MARGIN,
        HEIGHT - 2.0 * MARGIN
    );
    s
}

/// One polyline per series over a shared x axis; non-finite points break the line.
pub fn line_plot(path: &Path, title: &str, xlabel: &str, ylabel: &str, x: &[f64], series: &[(&str, Vec<f64>)]) -> CliResult<()> {
    const COLORS: [&str; 6] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];
    let (x0, x1) = bounds(x.iter().copied());
    let (y0, y1) = bounds(series.iter().flat_map(|(_, y)| y.iter().copied()));
    let px = |v: f64| MARGIN + (v - x0) / (x1 - x0) * (WIDTH - 2.0 * MARGIN);
    let py = |v: f64| HEIGHT - MARGIN - (v - y0) / (y1 - y0) * (HEIGHT - 2.0 * MARGIN);

    let mut s = svg_open(title, xlabel, ylabel);
    for (k, (name, y)) in series.iter().enumerate() {
        let color = COLORS[k % COLORS.len()];
        let mut segment = Vec::new();
        let flush = |seg: &mut Vec<String>, s: &mut String| {
            if seg.len() > 1 {
                let _ = writeln!(
                    s,
                    r#"<polyline fill="none" stroke="{color}" points="{}"/>"#,
                    seg.join(" ")
                );
            }
            seg.clear();
        };
        for (&xv, &yv) in x.iter().zip(y) {
            if yv.is_finite() {
                segment.push(format!("{:.2},{:.2}", px(xv), py(yv)));
            } else {
                flush(&mut segment, &mut s);
            }
        }
        flush(&mut segment, &mut s);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{color}">{name}</text>"#,
            WIDTH - MARGIN + 4.0 - 120.0,
            MARGIN + 16.0 * (k as f64 + 1.0)
        );
    }
    let _ = writeln!(s, r#"<text x="{MARGIN}" y="{}">{x0:.4}</text>"#, HEIGHT - MARGIN + 14.0);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="end">{x1:.4}</text>"#,
        WIDTH - MARGIN,
        HEIGHT - MARGIN + 14.0
    );
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{y1:.4}</text>"#, MARGIN - 2.0, MARGIN + 4.0);
    let _ = writeln!(s, r#"<text x="{}" y="{}" text-anchor="end">{y0:.4}</text>"#, MARGIN - 2.0, HEIGHT - MARGIN);
    s.push_str("</svg>\n");
    std::fs::write(path, s).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Heat map of `z[row][col]` with rows along x and columns along y, values in
/// `[-pi, pi]` mapped onto a blue-white-red scale.
pub fn phase_map(path: &Path, title: &str, xlabel: &str, ylabel: &str, z: &[Vec<f64>]) -> CliResult<()> {
    let rows = z.len().max(1) as f64;
    let cols = z.first().map_or(1, Vec::len).max(1) as f64;
    let cw = (WIDTH - 2.0 * MARGIN) / rows;
    let ch = (HEIGHT - 2.0 * MARGIN) / cols;
    let mut s = svg_open(title, xlabel, ylabel);
    for (i, row) in z.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            let t = (v / std::f64::consts::PI).clamp(-1.0, 1.0);
            let (r, g, b) = if t >= 0.0 {
                (255.0, 255.0 * (1.0 - t), 255.0 * (1.0 - t))
            } else {
                (255.0 * (1.0 + t), 255.0 * (1.0 + t), 255.0)
            };
            let _ = writeln!(
                s,
                r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="rgb({},{},{})"/>"#,
                MARGIN + i as f64 * cw,
                HEIGHT - MARGIN - (j as f64 + 1.0) * ch,
                cw + 0.05,
                ch + 0.05,
                r.round(),
                g.round(),
                b.round()
            );
        }
    }
    s.push_str("</svg>\n");
    std::fs::write(path, s).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
