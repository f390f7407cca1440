//! Verification reports and their tabular and graphical companions.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checks::{run_check, CheckResult, Tolerances, Verdict};
use super::data::{DomainData, Quantity, SuiteOptions};
use super::study::ConvergenceStudy;
use super::{CheckId, VerifyError};
use crate::geometry::GeometryReport;
use crate::mesh::Family;

/// Per-level bookkeeping kept in the report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub level: usize,
    pub max_edge: f64,
    pub counts: Vec<usize>,
    pub kernel_dims: Vec<usize>,
    pub relative_kernel_dims: Vec<usize>,
    pub max_asymmetry: f64,
    pub min_relative_eigenvalue: f64,
    pub mean_flux: f64,
    pub volume: f64,
    pub area: f64,
}

/// Eigenvalue studies of one degree.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DegreeStudies {
    pub degree: usize,
    pub relative: bool,
    pub studies: Vec<ConvergenceStudy>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DomainSummary {
    pub domain: String,
    pub family: Family,
    pub geometry: GeometryReport,
    pub levels: Vec<LevelSummary>,
    pub eigenvalues: Vec<DegreeStudies>,
    pub scalars: Vec<ConvergenceStudy>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub pass: usize,
    pub fail: usize,
    pub skipped: usize,
    pub equality_detected: usize,
    pub warn: usize,
}

impl Tally {
    fn count(runs: &[CheckResult]) -> Self {
        let mut t = Tally::default();
        for r in runs {
            match r.verdict {
                Verdict::Pass => t.pass += 1,
                Verdict::Fail => t.fail += 1,
                Verdict::Skipped => t.skipped += 1,
                Verdict::EqualityDetected => t.equality_detected += 1,
                Verdict::Warn => t.warn += 1,
            }
        }
        t
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// Resolved run configuration, filled in by the caller.
    pub config: serde_json::Value,
    pub domains: Vec<DomainSummary>,
    pub runs: Vec<CheckResult>,
    pub tally: Tally,
}

impl VerificationReport {
    pub fn has_failures(&self) -> bool {
        self.tally.fail > 0
    }

    pub fn runs_of(&self, id: CheckId) -> impl Iterator<Item = &CheckResult> {
        self.runs.iter().filter(move |r| r.check_id == id)
    }
}

/// Scalar quantities studied on every domain.
pub const SCALAR_QUANTITIES: [Quantity; 4] = [
    Quantity::BoundaryLambda1,
    Quantity::Mu1,
    Quantity::ExitDefect,
    Quantity::MeanValueGap,
];

pub fn summarize(d: &DomainData) -> Result<DomainSummary, VerifyError> {
    let levels = d
        .levels
        .iter()
        .map(|l| {
            let all = l.primal.iter().chain(&l.dual);
            LevelSummary {
                level: l.level,
                max_edge: l.max_edge,
                counts: l.counts.clone(),
                kernel_dims: l.primal.iter().map(|s| s.kernel_dim).collect(),
                relative_kernel_dims: l.dual.iter().map(|s| s.kernel_dim).collect(),
                max_asymmetry: all.clone().map(|s| s.asymmetry).fold(0.0, f64::max),
                min_relative_eigenvalue: all
                    .map(|s| s.min_relative_eigenvalue)
                    .fold(f64::INFINITY, f64::min),
                mean_flux: l.exit_time.mean_flux,
                volume: l.volume,
                area: l.area,
            }
        })
        .collect();
    let mut eigenvalues = Vec::new();
    for relative in [false, true] {
        for (degree, studies) in d.eigen_studies(relative)? {
            eigenvalues.push(DegreeStudies {
                degree,
                relative,
                studies,
            });
        }
    }
    let scalars = SCALAR_QUANTITIES
        .iter()
        .map(|&q| d.study(q))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DomainSummary {
        domain: d.domain(),
        family: d.family,
        geometry: d.geometry.clone(),
        levels,
        eigenvalues,
        scalars,
    })
}

/// Runs the checks on precomputed domain data. Results are ordered by
/// domain, then by registry order.
pub fn verify_data(
    data: &[DomainData],
    ids: &[CheckId],
    tols: &Tolerances,
) -> Result<VerificationReport, VerifyError> {
    let mut ids = ids.to_vec();
    ids.sort();
    ids.dedup();
    let mut runs = Vec::new();
    let mut domains = Vec::new();
    for d in data {
        domains.push(summarize(d)?);
        for &id in &ids {
            runs.extend(run_check(id, d, tols)?);
        }
    }
    let tally = Tally::count(&runs);
    Ok(VerificationReport {
        config: serde_json::Value::Null,
        domains,
        runs,
        tally,
    })
}

/// Computes every domain (concurrently) and runs the checks.
pub fn run_suite(
    domains: &[(Family, SuiteOptions)],
    ids: &[CheckId],
    tols: &Tolerances,
) -> Result<(VerificationReport, Vec<DomainData>), VerifyError> {
    let data = domains
        .par_iter()
        .map(|(f, o)| DomainData::compute(f, o))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((verify_data(&data, ids, tols)?, data))
}

fn join(values: impl IntoIterator<Item = String>) -> String {
    values.into_iter().collect::<Vec<_>>().join(" ")
}

fn csv_string(rows: Vec<Vec<String>>) -> Result<String, VerifyError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.write_record(&r)
            .map_err(|e| VerifyError::Output(e.to_string()))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| VerifyError::Output(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| VerifyError::Output(e.to_string()))
}

/// Extrapolated eigenvalues per (domain, problem, degree).
pub fn eigen_table_csv(data: &[DomainData]) -> Result<String, VerifyError> {
    let mut rows = vec![[
        "domain",
        "problem",
        "degree",
        "index",
        "levels",
        "values",
        "extrapolated",
        "order",
        "error_bar",
        "flag",
    ]
    .map(String::from)
    .to_vec()];
    for d in data {
        for relative in [false, true] {
            for (p, studies) in d.eigen_studies(relative)? {
                for (i, s) in studies.iter().enumerate() {
                    rows.push(vec![
                        d.domain(),
                        if relative { "relative" } else { "absolute" }.to_string(),
                        p.to_string(),
                        (i + 1).to_string(),
                        join(s.levels.iter().map(|l| l.to_string())),
                        join(s.values.iter().map(|v| format!("{v:.12e}"))),
                        format!("{:.12e}", s.extrapolated),
                        s.order.map(|o| format!("{o:.4}")).unwrap_or_default(),
                        format!("{:.3e}", s.error_bar),
                        s.flag
                            .map(|f| {
                                serde_json::to_value(f)
                                    .unwrap()
                                    .as_str()
                                    .unwrap_or_default()
                                    .to_string()
                            })
                            .unwrap_or_default(),
                    ]);
                }
            }
        }
    }
    csv_string(rows)
}

/// Quantities drawn in the per-domain plot data.
fn tracked(d: &DomainData) -> Vec<Quantity> {
    let n = d.n();
    let mut q: Vec<Quantity> = (0..=n)
        .flat_map(|p| (1..=3).map(move |k| Quantity::Nu { k, p }))
        .collect();
    q.extend((0..=n).map(|p| Quantity::NuDual { k: 1, p }));
    q.extend(SCALAR_QUANTITIES);
    q
}

/// Level-versus-value rows of every tracked quantity.
pub fn plot_data_csv(d: &DomainData) -> Result<String, VerifyError> {
    let mut rows = vec![["domain", "quantity", "level", "max_edge", "value"]
        .map(String::from)
        .to_vec()];
    for q in tracked(d) {
        let Ok(values) = d.values(q) else { continue };
        for (l, v) in d.levels.iter().zip(values) {
            rows.push(vec![
                d.domain(),
                q.to_string(),
                l.level.to_string(),
                format!("{:.6e}", l.max_edge),
                format!("{v:.12e}"),
            ]);
        }
    }
    csv_string(rows)
}

const PALETTE: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
];

/// A plain SVG line chart.
pub fn svg_line_chart(title: &str, x_label: &str, series: &[(String, Vec<(f64, f64)>)]) -> String {
    let (w, h, left, right, top, bottom) = (560.0, 360.0, 64.0, 150.0, 36.0, 44.0);
    let pts = series
        .iter()
        .flat_map(|(_, s)| s.iter())
        .filter(|p| p.1.is_finite());
    let (mut x0, mut x1, mut y0, mut y1) = (
        f64::INFINITY,
        f64::NEG_INFINITY,
        f64::INFINITY,
        f64::NEG_INFINITY,
    );
    for &(x, y) in pts {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    }
    if !x0.is_finite() {
        (x0, x1, y0, y1) = (0.0, 1.0, 0.0, 1.0);
    }
    if x1 - x0 < 1e-12 {
        x1 = x0 + 1.0;
    }
    if y1 - y0 < 1e-12 {
        y0 -= 0.5;
        y1 += 0.5;
    }
    let pad = 0.05 * (y1 - y0);
    let (y0, y1) = (y0 - pad, y1 + pad);
    let px = |x: f64| left + (x - x0) / (x1 - x0) * (w - left - right);
    let py = |y: f64| h - bottom - (y - y0) / (y1 - y0) * (h - top - bottom);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<text x="{}" y="20" text-anchor="middle" font-size="14">{}</text>"#,
        w / 2.0,
        escape(title)
    );
    let (ax0, ax1, ay0, ay1) = (left, w - right, h - bottom, top);
    let _ = writeln!(
        s,
        r#"<path d="M{ax0} {ay1} L{ax0} {ay0} L{ax1} {ay0}" fill="none" stroke="black"/>"#
    );
    for i in 0..=4 {
        let y = y0 + (y1 - y0) * i as f64 / 4.0;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="end">{:.4}</text>"#,
            left - 6.0,
            py(y) + 4.0,
            y
        );
    }
    let mut x = x0.ceil();
    while x <= x1 + 1e-9 {
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            px(x),
            ay0 + 16.0,
            x
        );
        x += 1.0;
    }
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
        (ax0 + ax1) / 2.0,
        h - 8.0,
        escape(x_label)
    );
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let path: Vec<String> = pts
            .iter()
            .filter(|p| p.1.is_finite())
            .map(|&(x, y)| format!("{:.2},{:.2}", px(x), py(y)))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
            path.join(" ")
        );
        let ly = top + 16.0 * i as f64 + 8.0;
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{}</text>"#,
            ax1 + 10.0,
            ax1 + 28.0,
            ax1 + 34.0,
            ly + 4.0,
            escape(name)
        );
    }
    s.push_str("</svg>\n");
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// First eigenvalue of every degree, both problems, against the level.
pub fn eigenvalue_chart(d: &DomainData) -> String {
    let n = d.n();
    let mut series = Vec::new();
    for p in 0..=n {
        for q in [Quantity::Nu { k: 1, p }, Quantity::NuDual { k: 1, p }] {
            if let Ok(v) = d.values(q) {
                let pts = d
                    .levels
                    .iter()
                    .zip(v)
                    .map(|(l, v)| (l.level as f64, v))
                    .collect();
                series.push((q.to_string(), pts));
            }
        }
    }
    svg_line_chart(
        &format!("first eigenvalues on {}", d.domain()),
        "level",
        &series,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn chart_is_well_formed() {
        let svg = svg_line_chart(
            "a < b",
            "level",
            &[("s".into(), vec![(1.0, 2.0), (2.0, 1.5), (3.0, f64::NAN)])],
        );
        assert!(svg.starts_with("<svg") && svg.trim_end().ends_with("</svg>"));
        assert!(svg.contains("a &lt; b"));
        assert_eq!(svg.matches("<polyline").count(), 1);
    }
}
