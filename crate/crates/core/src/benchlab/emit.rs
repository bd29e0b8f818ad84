//! Table output: csv, gnuplot-style dat, and a log-log svg.

use std::fmt::Write as _;
use std::io;
use std::path::Path;

use super::fit::fit_scaling;
use super::harness::BenchTable;

pub fn to_csv(t: &BenchTable) -> String {
    let mut s = String::from("size,time_ms,calls\n");
    for r in &t.rows {
        writeln!(s, "{},{},{}", r.size, r.time_ms, r.calls).unwrap();
    }
    s
}

/// Two whitespace-separated columns, size and milliseconds.
pub fn to_dat(t: &BenchTable) -> String {
    let mut s = format!("# {} on {} ({})\n# size time_ms\n", t.program, t.class, t.mode.name());
    for r in &t.rows {
        writeln!(s, "{} {}", r.size, r.time_ms).unwrap();
    }
    s
}

pub fn parse_dat(text: &str) -> Result<Vec<(u64, f64)>, String> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split_whitespace();
        let bad = || format!("line {}: expected `size time_ms`", i + 1);
        let size = cols.next().and_then(|c| c.parse().ok()).ok_or_else(bad)?;
        let time = cols.next().and_then(|c| c.parse().ok()).ok_or_else(bad)?;
        if cols.next().is_some() {
            return Err(bad());
        }
        out.push((size, time));
    }
    Ok(out)
}

const PALETTE: [&str; 7] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b"];

/// Log-log plot of time against size, one polyline per table, with the
/// fitted line dashed where a fit exists.
pub fn to_svg(title: &str, tables: &[BenchTable]) -> String {
    let (w, h, pad) = (720.0, 480.0, 60.0);
    let pts: Vec<(f64, f64)> = tables
        .iter()
        .flat_map(|t| t.rows.iter().filter(|r| r.size > 0 && r.time_ms > 0.0).map(|r| (r.size as f64, r.time_ms)))
        .collect();
    let span = |f: fn(&(f64, f64)) -> f64| {
        let lo = pts.iter().map(f).fold(f64::INFINITY, f64::min).log10();
        let hi = pts.iter().map(f).fold(f64::NEG_INFINITY, f64::max).log10();
        if !lo.is_finite() {
            (0.0, 1.0)
        } else if hi - lo < 1e-9 {
            (lo - 0.5, hi + 0.5)
        } else {
            (lo, hi)
        }
    };
    let (x0, x1) = span(|p| p.0);
    let (y0, y1) = span(|p| p.1);
    let px = |x: f64| pad + (x.log10() - x0) / (x1 - x0) * (w - 2.0 * pad);
    let py = |y: f64| h - pad - (y.log10() - y0) / (y1 - y0) * (h - 2.0 * pad);

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#).unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(s, r#"<text x="{}" y="24" text-anchor="middle" font-family="sans-serif" font-size="16">{}</text>"#, w / 2.0, xml(title)).unwrap();
    writeln!(
        s,
        r#"<path d="M{pad} {pad} L{pad} {b} L{r} {b}" stroke="black" fill="none"/>"#,
        b = h - pad,
        r = w - pad
    )
    .unwrap();
    writeln!(s, r#"<text x="{}" y="{}" text-anchor="middle" font-family="sans-serif" font-size="12">size (nodes + edges), log scale</text>"#, w / 2.0, h - 20.0).unwrap();
    writeln!(s, r#"<text x="16" y="{}" font-family="sans-serif" font-size="12" transform="rotate(-90 16 {})">time (ms), log scale</text>"#, h / 2.0, h / 2.0).unwrap();
    for (i, t) in tables.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let rows: Vec<(f64, f64)> =
            t.rows.iter().filter(|r| r.size > 0 && r.time_ms > 0.0).map(|r| (r.size as f64, r.time_ms)).collect();
        let line: Vec<String> = rows.iter().map(|&(x, y)| format!("{:.1},{:.1}", px(x), py(y))).collect();
        writeln!(s, r#"<polyline class="series" points="{}" stroke="{color}" fill="none"/>"#, line.join(" ")).unwrap();
        for &(x, y) in &rows {
            writeln!(s, r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}"/>"#, px(x), py(y)).unwrap();
        }
        let mut legend = t.class.clone();
        if let Ok(f) = fit_scaling(&rows) {
            let (a, b) = (rows[0].0, rows[rows.len() - 1].0);
            let at = |x: f64| (f.intercept + f.slope * x.ln()).exp();
            writeln!(
                s,
                r#"<line class="fit" x1="{:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="{color}" stroke-dasharray="4 3"/>"#,
                px(a),
                py(at(a)),
                px(b),
                py(at(b))
            )
            .unwrap();
            write!(legend, " (slope {:.2})", f.slope).unwrap();
        }
        writeln!(
            s,
            r#"<text x="{}" y="{}" fill="{color}" font-family="sans-serif" font-size="12">{}</text>"#,
            pad + 10.0,
            pad + 16.0 * i as f64,
            xml(&legend)
        )
        .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

fn xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Writes `<stem>.csv`, `<stem>.dat` for each table, a combined svg and
/// a manifest into `dir`.
pub fn write_results(dir: &Path, stem: &str, tables: &[BenchTable], manifest: &str) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for t in tables {
        let name = format!("{stem}-{}-{}", t.class, t.mode.name());
        std::fs::write(dir.join(format!("{name}.csv")), to_csv(t))?;
        std::fs::write(dir.join(format!("{name}.dat")), to_dat(t))?;
    }
    std::fs::write(dir.join(format!("{stem}.svg")), to_svg(stem, tables))?;
    std::fs::write(dir.join(format!("{stem}.manifest")), manifest)?;
    Ok(())
}
