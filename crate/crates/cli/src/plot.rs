//! SVG line plots of result tables, one file per panel.

use crate::config::usage;
use plotters::prelude::*;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Columns that identify a curve when they are not on the x axis.
const GROUP_KEYS: [&str; 5] = ["method", "weight", "zeta", "alpha", "omega_bar"];

pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub fn read_table(path: &Path) -> anyhow::Result<Table> {
    let mut rd = match csv::Reader::from_path(path) {
        Ok(r) => r,
        Err(e) => return usage(format!("cannot read {}: {e}", path.display())),
    };
    let headers: Vec<String> = match rd.headers() {
        Ok(h) => h.iter().map(str::to_string).collect(),
        Err(e) => return usage(format!("{}: {e}", path.display())),
    };
    let mut rows = Vec::new();
    for r in rd.records() {
        match r {
            Ok(r) => rows.push(r.iter().map(str::to_string).collect()),
            Err(e) => return usage(format!("{}: {e}", path.display())),
        }
    }
    if headers.iter().all(|h| h.is_empty()) || rows.is_empty() {
        return usage(format!("{} has no result rows", path.display()));
    }
    Ok(Table { headers, rows })
}

/// Panels used when none are requested, chosen from the table's columns.
pub fn default_panels(t: &Table) -> (String, Vec<Vec<String>>) {
    let has = |c: &str| t.headers.iter().any(|h| h == c);
    let v = |cs: &[&str]| cs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    if has("ReC") {
        let p = vec![v(&["ReC", "ImC"]), v(&["ReK", "ImK"]), v(&["ReChi", "ImChi"])];
        ("omega_bar".into(), p)
    } else if has("AbsG") {
        ("r".into(), vec![v(&["AbsG"])])
    } else if has("delta_beta") {
        ("omega_bar".into(), vec![v(&["delta_beta"])])
    } else if has("ReMu") {
        ("omega_bar".into(), vec![v(&["ReMu", "ImMu"]), v(&["ReD", "ImD"])])
    } else {
        ("omega_bar".into(), Vec::new())
    }
}

fn column(t: &Table, name: &str) -> anyhow::Result<usize> {
    match t.headers.iter().position(|h| h == name) {
        Some(i) => Ok(i),
        None => usage(format!("unknown column '{name}' (available: {})", t.headers.join(", "))),
    }
}

fn axis_label(c: &str) -> String {
    match c {
        "omega_bar" => "ω̄".to_string(),
        "r" => "r".to_string(),
        _ => c.replace("Chi", "χ").replace("Xi", "ξ"),
    }
}

type Series = BTreeMap<String, Vec<(f64, f64)>>;

fn collect_series(t: &Table, x: usize, ys: &[usize], groups: &[usize]) -> Series {
    let mut out = Series::new();
    for row in &t.rows {
        let Ok(xv) = row[x].parse::<f64>() else { continue };
        for &y in ys {
            let Ok(yv) = row[y].parse::<f64>() else { continue };
            if !xv.is_finite() || !yv.is_finite() {
                continue;
            }
            let mut key = t.headers[y].clone();
            for &g in groups {
                key.push_str(&format!(" {}={}", t.headers[g], row[g]));
            }
            out.entry(key).or_default().push((xv, yv));
        }
    }
    out
}

fn bounds(series: &Series) -> ((f64, f64), (f64, f64)) {
    let pts = series.values().flatten();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !(x1 > x0) {
        x1 = x0 + 1.0;
    }
    let pad = 0.05 * (y1 - y0).abs().max(1e-12);
    ((x0, x1), (y0 - pad, y1 + pad))
}

fn render(path: &Path, x_name: &str, ys: &[String], series: &Series) -> anyhow::Result<()> {
    let root = SVGBackend::new(path, (900, 560)).into_drawing_area();
    root.fill(&WHITE).map_err(|e| anyhow::anyhow!("{e}"))?;
    let ((x0, x1), (y0, y1)) = bounds(series);
    let mut chart = ChartBuilder::on(&root)
        .caption(ys.iter().map(|s| axis_label(s)).collect::<Vec<_>>().join(", "), ("sans-serif", 22))
        .margin(12)
        .x_label_area_size(44)
        .y_label_area_size(64)
        .build_cartesian_2d(x0..x1, y0..y1)
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    chart
        .configure_mesh()
        .x_desc(axis_label(x_name))
        .y_desc(ys.iter().map(|s| axis_label(s)).collect::<Vec<_>>().join(" / "))
        .draw()
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = Palette99::pick(i).to_rgba();
        chart
            .draw_series(LineSeries::new(pts.iter().copied(), color.stroke_width(2)))
            .map_err(|e| anyhow::anyhow!("{e}"))?
            .label(name.clone())
            .legend(move |(x, y)| PathElement::new(vec![(x, y), (x + 18, y)], color.stroke_width(2)));
    }
    chart
        .configure_series_labels()
        .background_style(WHITE.mix(0.85))
        .border_style(BLACK)
        .draw()
        .map_err(|e| anyhow::anyhow!("{e}"))?;
    root.present().map_err(|e| anyhow::anyhow!("{e}"))?;
    Ok(())
}

/// Writes one SVG per panel into `dir`; returns the file paths.
pub fn plot(input: &Path, x: Option<&str>, panels: &[String], dir: &Path) -> anyhow::Result<Vec<PathBuf>> {
    let t = read_table(input)?;
    let (default_x, default_panels) = default_panels(&t);
    let x_name = x.map(str::to_string).unwrap_or(default_x);
    let panels: Vec<Vec<String>> = if panels.is_empty() {
        default_panels
    } else {
        panels
            .iter()
            .map(|p| p.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect())
            .collect()
    };
    if panels.is_empty() || panels.iter().any(|p| p.is_empty()) {
        return usage("no columns to plot; pass --panel COL[,COL...]");
    }
    let xi = column(&t, &x_name)?;
    let groups: Vec<usize> = GROUP_KEYS
        .iter()
        .filter(|k| **k != x_name)
        .filter_map(|k| t.headers.iter().position(|h| h == k))
        .collect();
    let stem = input.file_stem().and_then(|s| s.to_str()).unwrap_or("plot");
    let mut out = Vec::new();
    for p in &panels {
        let ys = p.iter().map(|c| column(&t, c)).collect::<anyhow::Result<Vec<_>>>()?;
        let series = collect_series(&t, xi, &ys, &groups);
        if series.is_empty() {
            return usage(format!("columns {} have no numeric values", p.join(",")));
        }
        let path = dir.join(format!("{stem}_{}.svg", p.join("_")));
        render(&path, &x_name, p, &series)?;
        out.push(path);
    }
    Ok(out)
}
