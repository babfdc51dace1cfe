//! Artifact writers: frontier CSV and `.dat` tables, the SVG plot, and the
//! JSON comparison report.

use std::fmt::Write as _;
use std::path::Path;

use regionlab_core::{Certificate, DominanceReport, Frontier, FrontierPoint, RatePair, SearchStats};
use serde::{Deserialize, Serialize};

use crate::scenario::Scenario;
use crate::CliError;

pub const UDC_COLUMNS: [&str; 14] = [
    "r1_bits", "r2_bits", "rho", "alpha", "beta", "lam1", "lam2", "lam3", "gamma1", "gamma2", "r11", "r1r", "r22",
    "r2p",
];
pub const ICDMS_COLUMNS: [&str; 4] = ["r1_bits", "r2_bits", "alpha", "gamma"];

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(format!("{}: {e}", path.display()))
}

fn cert_fields(cert: &Certificate) -> Vec<f64> {
    match cert {
        Certificate::Cooperative { params, split } => params.to_array().iter().chain(split).copied().collect(),
        Certificate::Baseline { alpha, gamma } => vec![*alpha, *gamma],
        Certificate::Split(split) => split.to_vec(),
        Certificate::None => Vec::new(),
    }
}

/// Frontier as CSV text. Each row is a vertex followed by its certificate;
/// missing certificate fields are left empty.
pub fn frontier_csv(f: &Frontier, columns: &[&str]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Runtime(e.to_string());
    w.write_record(columns).map_err(err)?;
    for p in &f.points {
        let mut row = vec![p.rate.r1.to_string(), p.rate.r2.to_string()];
        row.extend(cert_fields(&p.cert).iter().map(f64::to_string));
        row.resize(columns.len(), String::new());
        w.write_record(&row).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Runtime(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Runtime(e.to_string()))
}

/// Reads the rate columns of a frontier CSV. Certificates are not restored.
pub fn read_frontier_csv(text: &str) -> Result<Frontier, CliError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let bad = |m: String| CliError::Runtime(format!("frontier csv: {m}"));
    let headers = r.headers().map_err(|e| bad(e.to_string()))?.clone();
    if headers.get(0) != Some("r1_bits") || headers.get(1) != Some("r2_bits") {
        return Err(bad("first columns must be r1_bits,r2_bits".into()));
    }
    let mut points = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        let num = |i: usize| -> Result<f64, CliError> {
            rec.get(i)
                .unwrap_or("")
                .parse()
                .map_err(|e| bad(format!("row {}: {e}", points.len() + 1)))
        };
        points.push(FrontierPoint::bare(num(0)?, num(1)?));
    }
    Ok(Frontier {
        points,
        stats: SearchStats::default(),
    })
}

/// Whitespace-separated table for gnuplot.
pub fn frontier_dat(f: &Frontier, label: &str) -> String {
    let mut s = format!("# {label}\n# r1_bits r2_bits\n");
    for p in &f.points {
        let _ = writeln!(s, "{} {}", p.rate.r1, p.rate.r2);
    }
    s
}

/// Boundary of the down-closed region: the vertices plus their projections
/// onto the axes.
fn closed_outline(f: &Frontier) -> Vec<RatePair> {
    let (Some(first), Some(last)) = (f.points.first(), f.points.last()) else {
        return Vec::new();
    };
    let mut out = vec![RatePair::new(0.0, first.rate.r2)];
    out.extend(f.points.iter().map(|p| p.rate));
    out.push(RatePair::new(last.rate.r1, 0.0));
    out
}

fn nice_step(span: f64) -> f64 {
    let raw = span / 5.0;
    let mag = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 2.5, 5.0, 10.0]
        .into_iter()
        .map(|m| m * mag)
        .find(|s| *s >= raw)
        .unwrap_or(10.0 * mag)
}

/// Two-curve plot with both axes in bits.
pub fn comparison_svg(title: &str, curves: &[(&str, &str, &Frontier)]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 480.0;
    const LEFT: f64 = 70.0;
    const RIGHT: f64 = 20.0;
    const TOP: f64 = 40.0;
    const BOTTOM: f64 = 60.0;

    let outlines: Vec<Vec<RatePair>> = curves.iter().map(|c| closed_outline(c.2)).collect();
    let all = outlines.iter().flatten();
    let xmax = all.clone().map(|p| p.r1).fold(0.0, f64::max);
    let ymax = all.map(|p| p.r2).fold(0.0, f64::max);
    let (xstep, ystep) = (nice_step(xmax.max(1e-3)), nice_step(ymax.max(1e-3)));
    let xmax = (xmax / xstep).ceil().max(1.0) * xstep;
    let ymax = (ymax / ystep).ceil().max(1.0) * ystep;
    let px = |x: f64| LEFT + x / xmax * (W - LEFT - RIGHT);
    let py = |y: f64| H - BOTTOM - y / ymax * (H - TOP - BOTTOM);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="24" text-anchor="middle" font-size="14">{}</text>"#,
        W / 2.0,
        escape(title)
    );

    let (x0, y0, x1, y1) = (px(0.0), py(0.0), px(xmax), py(ymax));
    let _ = writeln!(
        s,
        r#"<path d="M{x0:.2},{y1:.2} L{x0:.2},{y0:.2} L{x1:.2},{y0:.2}" fill="none" stroke="black"/>"#
    );
    let ticks = |max: f64, step: f64| {
        (0..)
            .map(move |k| k as f64 * step)
            .take_while(move |v| *v <= max + step * 1e-9)
    };
    for v in ticks(xmax, xstep) {
        let x = px(v);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y0:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            y0 + 5.0,
            y0 + 20.0,
            fmt_tick(v)
        );
    }
    for v in ticks(ymax, ystep) {
        let y = py(v);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{x0:.2}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"#,
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0,
            fmt_tick(v)
        );
    }
    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">R1 (bits/channel use)</text>"#,
        (x0 + x1) / 2.0,
        H - 15.0
    );
    let _ = writeln!(
        s,
        r#"<text x="18" y="{:.2}" text-anchor="middle" transform="rotate(-90 18 {:.2})">R2 (bits/channel use)</text>"#,
        (y0 + y1) / 2.0,
        (y0 + y1) / 2.0
    );

    for (i, ((label, color, _), outline)) in curves.iter().zip(&outlines).enumerate() {
        let pts: Vec<String> = outline
            .iter()
            .map(|p| format!("{:.2},{:.2}", px(p.r1), py(p.r2)))
            .collect();
        if !pts.is_empty() {
            let _ = writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                pts.join(" ")
            );
        }
        let ly = TOP + 10.0 + 18.0 * i as f64;
        let lx = W - RIGHT - 190.0;
        let _ = writeln!(
            s,
            r#"<line x1="{lx:.2}" y1="{ly:.2}" x2="{:.2}" y2="{ly:.2}" stroke="{color}" stroke-width="2"/><text x="{:.2}" y="{:.2}">{}</text>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0,
            escape(label)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn fmt_tick(v: f64) -> String {
    let s = format!("{v:.3}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontierSummary {
    pub vertices: usize,
    pub max_r1_bits: f64,
    pub max_r2_bits: f64,
    pub evaluations: u64,
    pub skipped: u64,
}

impl FrontierSummary {
    pub fn of(f: &Frontier) -> Self {
        Self {
            vertices: f.len(),
            max_r1_bits: f.max_r1().unwrap_or(0.0),
            max_r2_bits: f.max_r2().unwrap_or(0.0),
            evaluations: f.stats.evaluations,
            skipped: f.stats.skipped,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SquaredGains {
    pub c21: f64,
    pub c12: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Runtime {
    pub udc_seconds: f64,
    pub icdms_seconds: f64,
    pub total_seconds: f64,
}

/// Contents of `comparison.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub tool: String,
    pub version: String,
    pub scenario: Scenario,
    pub gains_squared: SquaredGains,
    /// "capacity" when the baseline is known to be optimal, else "achievable only".
    pub icdms_region: String,
    pub udc: FrontierSummary,
    pub icdms: FrontierSummary,
    /// Gaps are UDC minus baseline `R1` at equal `R2`.
    pub dominance: DominanceReport,
    pub udc_dominates: bool,
    pub runtime: Runtime,
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| io_err(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use regionlab_core::{convex_hull_upper, UdcParams};

    fn sample() -> Frontier {
        convex_hull_upper(vec![
            FrontierPoint {
                rate: RatePair::new(0.5, 1.25),
                cert: Certificate::Cooperative {
                    params: UdcParams::default(),
                    split: [0.0, 0.5, 1.0, 0.25],
                },
            },
            FrontierPoint {
                rate: RatePair::new(1.0 / 3.0, 1.5),
                cert: Certificate::Baseline { alpha: 0.1, gamma: 2.0 },
            },
            FrontierPoint::bare(1.5, 0.0),
        ])
    }

    #[test]
    fn csv_round_trip() {
        let f = sample();
        let text = frontier_csv(&f, &UDC_COLUMNS).unwrap();
        assert!(text.starts_with("r1_bits,r2_bits,rho,"));
        let back = read_frontier_csv(&text).unwrap();
        assert_eq!(back.pairs(), f.pairs());
        assert!(back.is_well_formed());
        let row = text.lines().nth(2).unwrap();
        assert_eq!(row.split(',').count(), UDC_COLUMNS.len());
    }

    #[test]
    fn csv_rejects_garbage() {
        assert!(read_frontier_csv("a,b\n1,2\n").is_err());
        assert!(read_frontier_csv("r1_bits,r2_bits\n1,x\n").is_err());
    }

    #[test]
    fn svg_is_closed_and_has_both_curves() {
        let f = sample();
        let svg = comparison_svg("t <1>", &[("a", "red", &f), ("b", "blue", &f)]);
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("t &lt;1&gt;"));
        let empty = comparison_svg("e", &[("a", "red", &Frontier::default())]);
        assert_eq!(empty.matches("<polyline").count(), 0);
    }

    #[test]
    fn tick_steps() {
        assert_eq!(nice_step(1.7), 0.5);
        assert_eq!(nice_step(10.0), 2.0);
        assert_eq!(fmt_tick(0.5), "0.5");
        assert_eq!(fmt_tick(2.0), "2");
    }
}
