//! Experiment output files: frozen-schema CSVs, a manifest, and an optional
//! SVG scatter.

use crate::error::Result;
use crate::step_fn::StepFn;
use serde::Serialize;
use std::fmt::Write as FmtWrite;
use std::path::Path;

pub const SCHEMA_VERSION: &str = "v1";

/// A CSV table with a `# schema=v1` header comment. Cell values are written
/// with Rust's shortest-roundtrip float formatting so identical runs produce
/// byte-identical files.
#[derive(Debug, Clone)]
pub struct CsvTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(columns: &[&str]) -> CsvTable {
        CsvTable {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_row(&mut self, cells: Vec<String>) {
        assert_eq!(cells.len(), self.columns.len(), "row width mismatch");
        self.rows.push(cells);
    }

    pub fn to_string(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# schema={SCHEMA_VERSION}");
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_string())?;
        Ok(())
    }

    /// Column values parsed back as floats (for aggregate recomputation).
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        self.rows
            .iter()
            .map(|r| r[idx].parse::<f64>().ok())
            .collect::<Option<Vec<f64>>>()
    }
}

pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x}")
    }
}

/// Writes `manifest.json` echoing the config, the crate version, the master
/// seed and the per-replication stream seeds.
pub fn write_manifest<C: Serialize>(
    dir: &Path,
    config: &C,
    master_seed: u64,
    replications: usize,
) -> Result<()> {
    let seeds: Vec<u64> = (0..replications.min(64) as u64)
        .map(|i| crate::rng::stream_seed(master_seed, i))
        .collect();
    let manifest = serde_json::json!({
        "version": env!("CARGO_PKG_VERSION"),
        "schema": SCHEMA_VERSION,
        "master_seed": master_seed,
        "stream_seed_scheme": "splitmix64(master_seed XOR replication_index)",
        "stream_seeds_head": seeds,
        "config": config,
    });
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    Ok(())
}

/// Data for the scatter figure: observations, truth, MLE, posterior draws.
pub struct FigureData<'a> {
    pub xs: &'a [f64],
    pub ys: &'a [f64],
    pub truth: Vec<(f64, f64)>,
    pub mle: Option<&'a StepFn>,
    pub posterior_draws: Vec<StepFn>,
    pub window: f64,
}

/// Renders a static SVG scatter: data points, the truth polyline, the MLE
/// and up to 50 gray posterior-draw overlays.
pub fn render_figure(fig: &FigureData) -> String {
    let (w, h) = (720.0, 480.0);
    let margin = 40.0;
    let ymin = fig
        .ys
        .iter()
        .chain(fig.truth.iter().map(|(_, y)| y))
        .fold(f64::INFINITY, |m, y| m.min(*y));
    let ymax = fig
        .ys
        .iter()
        .chain(fig.truth.iter().map(|(_, y)| y))
        .fold(f64::NEG_INFINITY, |m, y| m.max(*y));
    let (ymin, ymax) = if ymin < ymax { (ymin, ymax) } else { (ymin - 1.0, ymax + 1.0) };
    let sx = move |x: f64| margin + x / fig.window * (w - 2.0 * margin);
    let sy = move |y: f64| h - margin - (y - ymin) / (ymax - ymin) * (h - 2.0 * margin);
    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" \
         viewBox=\"0 0 {w} {h}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    );
    let step_path = |f: &StepFn| {
        let mut d = String::new();
        let breaks = f.breaks();
        let values = f.values();
        let _ = write!(d, "M {} {}", sx(breaks[0]), sy(values[0]));
        for i in 0..values.len() {
            let _ = write!(d, " L {} {}", sx(breaks[i + 1]), sy(values[i]));
            if i + 1 < values.len() {
                let _ = write!(d, " L {} {}", sx(breaks[i + 1]), sy(values[i + 1]));
            }
        }
        d
    };
    for f in fig.posterior_draws.iter().take(50) {
        let _ = write!(
            svg,
            "<path d=\"{}\" fill=\"none\" stroke=\"#aaaaaa\" stroke-width=\"0.7\" \
             opacity=\"0.5\"/>\n",
            step_path(f)
        );
    }
    if !fig.truth.is_empty() {
        let mut d = String::new();
        let _ = write!(d, "M {} {}", sx(fig.truth[0].0), sy(fig.truth[0].1));
        for (x, y) in &fig.truth[1..] {
            let _ = write!(d, " L {} {}", sx(*x), sy(*y));
        }
        let _ = write!(
            svg,
            "<path d=\"{d}\" fill=\"none\" stroke=\"black\" stroke-width=\"1.8\"/>\n"
        );
    }
    if let Some(mle) = fig.mle {
        let _ = write!(
            svg,
            "<path d=\"{}\" fill=\"none\" stroke=\"#cc0000\" stroke-width=\"1.4\"/>\n",
            step_path(mle)
        );
    }
    for (x, y) in fig.xs.iter().zip(fig.ys) {
        let _ = write!(
            svg,
            "<circle cx=\"{}\" cy=\"{}\" r=\"1.6\" fill=\"#3366cc\" opacity=\"0.75\"/>\n",
            sx(*x),
            sy(*y)
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Polyline of a truth for figures.
pub fn truth_polyline(t: &crate::truth::Truth) -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    for s in t.segments() {
        pts.push((s.x0, s.slope * s.x0 + s.intercept));
        pts.push((s.x1, s.slope * s.x1 + s.intercept));
    }
    pts
}

/// Thread-pool sizing honoring the `BPL_THREADS` cap.
pub fn configure_threads() {
    if let Ok(val) = std::env::var("BPL_THREADS") {
        if let Ok(n) = val.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_schema_header_and_roundtrips_columns() {
        let mut t = CsvTable::new(&["rep", "value"]);
        t.push_row(vec!["0".into(), fmt_f64(0.125)]);
        t.push_row(vec!["1".into(), fmt_f64(-3.5e-7)]);
        let s = t.to_string();
        assert!(s.starts_with("# schema=v1\nrep,value\n"));
        assert_eq!(t.column("value").unwrap(), vec![0.125, -3.5e-7]);
        assert!(t.column("missing").is_none());
    }

    #[test]
    fn svg_renders_all_layers() {
        let f = StepFn::new(vec![0.0, 0.5, 1.0], vec![0.2, 0.8]).unwrap();
        let fig = FigureData {
            xs: &[0.1, 0.6],
            ys: &[0.5, 1.0],
            truth: vec![(0.0, 0.0), (1.0, 1.0)],
            mle: Some(&f),
            posterior_draws: vec![f.clone()],
            window: 1.0,
        };
        let svg = render_figure(&fig);
        assert!(svg.contains("<svg"));
        assert!(svg.contains("circle"));
        assert!(svg.contains("#cc0000"));
        assert!(svg.contains("#aaaaaa"));
    }
}
