//! Instances of the registered checks on one domain and their verdicts.

use serde::{Deserialize, Serialize};

use super::data::{DomainData, Quantity};
use super::reference::reference_ball;
use super::study::ConvergenceStudy;
use super::{CheckId, Kind, VerifyError};
use crate::feec::AnalyticField;
use crate::geometry::{check_all, Gate, Hypothesis};

/// Outcome class of one check instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
    EqualityDetected,
    Warn,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skipped => "SKIPPED",
            Verdict::EqualityDetected => "EQUALITY-DETECTED",
            Verdict::Warn => "WARN",
        }
    }
}

/// One evaluated instance of a registered check.
///
/// `margin` is oriented so that nonnegative means the statement holds: for
/// inequalities it is `lhs - rhs` with the larger side on the left, for
/// identities it is `-|lhs - rhs|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check_id: CheckId,
    pub domain: String,
    pub degree: Option<usize>,
    pub instance: String,
    pub hypotheses: Gate,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub studies: Vec<ConvergenceStudy>,
}

/// Thresholds used to turn margins into verdicts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Tolerances {
    /// Floor for comparisons of extrapolated quantities.
    pub floor: f64,
    /// Multiple of the combined error bars added to the floor.
    pub error_bar_factor: f64,
    /// Matrix symmetry tolerance (relative).
    pub symmetry: f64,
    /// Smallest admissible relative eigenvalue of a DtN pencil, negated.
    pub psd: f64,
    /// Kernel counts need this separation from the next eigenvalue.
    pub kernel_gap: f64,
    /// A mean-value gap below this counts as vanishing.
    pub mean_value_small: f64,
    /// An exit-time flux defect below this counts as vanishing.
    pub defect_small: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            floor: 1e-6,
            error_bar_factor: 3.0,
            symmetry: 1e-10,
            psd: 1e-8,
            kernel_gap: 100.0,
            mean_value_small: 1e-3,
            defect_small: 1e-2,
        }
    }
}

#[derive(Clone, Debug)]
enum Source {
    Study(Quantity),
    Exact(String, f64),
}

/// Linear combination of studied and exact quantities.
#[derive(Clone, Debug, Default)]
struct Expr(Vec<(f64, Source)>);

struct Value {
    value: f64,
    bar: f64,
    studies: Vec<ConvergenceStudy>,
}

fn q(quantity: Quantity) -> Expr {
    Expr(vec![(1.0, Source::Study(quantity))])
}

fn exact(label: impl Into<String>, value: f64) -> Expr {
    Expr(vec![(1.0, Source::Exact(label.into(), value))])
}

fn nu(k: usize, p: usize) -> Quantity {
    Quantity::Nu { k, p }
}

impl Expr {
    fn scaled(mut self, c: f64) -> Self {
        for t in &mut self.0 {
            t.0 *= c;
        }
        self
    }

    fn plus(mut self, other: Expr) -> Self {
        self.0.extend(other.0);
        self
    }

    fn eval(&self, d: &DomainData) -> Result<Value, VerifyError> {
        let mut out = Value {
            value: 0.0,
            bar: 0.0,
            studies: Vec::new(),
        };
        for (c, s) in &self.0 {
            match s {
                Source::Study(quantity) => {
                    let st = d.study(*quantity)?;
                    out.value += c * st.extrapolated;
                    out.bar += c.abs() * st.error_bar;
                    out.studies.push(st);
                }
                Source::Exact(label, v) => {
                    out.value += c * v;
                    out.studies.push(ConvergenceStudy::exact(label, *v));
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Relation {
    /// `lhs >= rhs`, near-equality reported.
    Geq,
    /// `lhs > rhs` beyond the tolerance.
    Gt,
    /// `lhs = rhs` within the tolerance.
    Eq,
    /// `lhs >= rhs` up to a fixed tolerance, no equality report.
    Bound,
}

struct Instance {
    degree: Option<usize>,
    label: String,
    hyps: Vec<Hypothesis>,
    relation: Relation,
    lhs: Expr,
    rhs: Expr,
    /// Mismatches only warn (unproven reference values, inconclusive
    /// strictness).
    warn_only: bool,
    fixed_tolerance: Option<f64>,
}

impl Instance {
    fn new(
        id: CheckId,
        degree: usize,
        n: usize,
        label: impl Into<String>,
        lhs: Expr,
        rhs: Expr,
    ) -> Self {
        let relation = match id.kind() {
            Kind::Inequality => Relation::Geq,
            Kind::Strict => Relation::Gt,
            Kind::Identity => Relation::Eq,
        };
        Self {
            degree: Some(degree),
            label: label.into(),
            hyps: id.hypotheses(n, degree),
            relation,
            lhs,
            rhs,
            warn_only: false,
            fixed_tolerance: None,
        }
    }

    fn with_relation(mut self, r: Relation) -> Self {
        self.relation = r;
        self
    }

    fn with_hyps(mut self, hyps: Vec<Hypothesis>) -> Self {
        self.hyps = hyps;
        self
    }
}

fn verdict(relation: Relation, margin: f64, tol: f64, warn_only: bool) -> Verdict {
    let fail = if warn_only {
        Verdict::Warn
    } else {
        Verdict::Fail
    };
    match relation {
        Relation::Geq if margin < -tol => fail,
        Relation::Geq if margin <= tol => Verdict::EqualityDetected,
        Relation::Geq => Verdict::Pass,
        Relation::Gt if margin > tol => Verdict::Pass,
        Relation::Gt if margin < -tol => fail,
        Relation::Gt => Verdict::Warn,
        Relation::Eq | Relation::Bound if margin >= -tol => Verdict::Pass,
        Relation::Eq | Relation::Bound => fail,
    }
}

fn evaluate(
    id: CheckId,
    d: &DomainData,
    inst: Instance,
    tols: &Tolerances,
) -> Result<CheckResult, VerifyError> {
    let gate = check_all(&d.geometry, &inst.hyps);
    let lhs = inst.lhs.eval(d)?;
    let rhs = inst.rhs.eval(d)?;
    let tol = inst
        .fixed_tolerance
        .unwrap_or_else(|| tols.floor.max(tols.error_bar_factor * (lhs.bar + rhs.bar)));
    let margin = match inst.relation {
        Relation::Eq => -(lhs.value - rhs.value).abs(),
        _ => lhs.value - rhs.value,
    };
    let verdict = if gate.is_satisfied() {
        verdict(inst.relation, margin, tol, inst.warn_only)
    } else {
        Verdict::Skipped
    };
    let note = match (inst.relation, verdict) {
        (Relation::Gt, Verdict::Warn) => {
            Some("strictness not resolved within tolerance".to_string())
        }
        (_, Verdict::Warn) => {
            Some("reference value is unproven; mismatch reported as a warning".to_string())
        }
        _ if inst.warn_only => {
            Some("reference value is unproven; a mismatch would only warn".to_string())
        }
        _ => None,
    };
    let mut studies = lhs.studies;
    studies.extend(rhs.studies);
    Ok(CheckResult {
        check_id: id,
        domain: d.domain(),
        degree: inst.degree,
        instance: inst.label,
        hypotheses: gate,
        lhs: lhs.value,
        rhs: rhs.value,
        margin,
        tolerance: tol,
        verdict,
        note,
        studies,
    })
}

fn matrix_instances(id: CheckId, d: &DomainData, tols: &Tolerances) -> Vec<Instance> {
    let n = d.n();
    let mut out = Vec::new();
    for dual in [false, true] {
        for p in 0..=n {
            let spectra = d
                .levels
                .iter()
                .map(|l| if dual { &l.dual[p] } else { &l.primal[p] });
            let which = if dual { "relative" } else { "absolute" };
            let inst = if id == CheckId::Sym {
                let worst = spectra.map(|s| s.asymmetry).fold(0.0f64, f64::max);
                let mut i = Instance::new(
                    id,
                    p,
                    n,
                    format!("{which} p={p}"),
                    exact("max asymmetry", worst),
                    exact("0", 0.0),
                );
                i.fixed_tolerance = Some(tols.symmetry);
                i
            } else {
                let worst = spectra
                    .map(|s| s.min_relative_eigenvalue)
                    .fold(f64::INFINITY, f64::min);
                let mut i = Instance::new(
                    id,
                    p,
                    n,
                    format!("{which} p={p}"),
                    exact("min relative eigenvalue", worst),
                    exact("0", 0.0),
                )
                .with_relation(Relation::Bound);
                i.fixed_tolerance = Some(tols.psd);
                i
            };
            out.push(inst);
        }
    }
    out
}

fn kernel_results(d: &DomainData, tols: &Tolerances) -> Vec<CheckResult> {
    let n = d.n();
    (0..=n)
        .map(|p| {
            let betti = d.geometry.absolute_betti(p);
            let dims: Vec<usize> = d.levels.iter().map(|l| l.primal[p].kernel_dim).collect();
            let gaps: Vec<f64> = d.levels.iter().map(|l| l.primal[p].kernel_gap).collect();
            let mismatch = dims.iter().map(|&k| k.abs_diff(betti)).max().unwrap_or(0);
            let ambiguous = gaps.iter().any(|&g| !(g >= tols.kernel_gap));
            let margin = -(mismatch as f64) - if ambiguous { 1.0 } else { 0.0 };
            let note = format!("kernel dimensions by level {dims:?}, separation ratios {gaps:?}");
            CheckResult {
                check_id: CheckId::Ker,
                domain: d.domain(),
                degree: Some(p),
                instance: format!("p={p}"),
                hypotheses: Gate::Satisfied,
                lhs: *dims.last().unwrap_or(&0) as f64,
                rhs: betti as f64,
                margin,
                tolerance: 0.0,
                verdict: if margin < 0.0 {
                    Verdict::Fail
                } else {
                    Verdict::Pass
                },
                note: Some(note),
                studies: Vec::new(),
            }
        })
        .collect()
}

fn mean_value_result(d: &DomainData, tols: &Tolerances) -> Result<CheckResult, VerifyError> {
    let gap = d.study(Quantity::MeanValueGap)?;
    let defect = d.study(Quantity::ExitDefect)?;
    let gap_small = gap.extrapolated.abs() <= tols.mean_value_small;
    let defect_small = defect.extrapolated.abs() <= tols.defect_small;
    let lhs: f64 = if gap_small { 1.0 } else { 0.0 };
    let rhs = if defect_small { 1.0 } else { 0.0 };
    let margin = -(lhs - rhs).abs();
    Ok(CheckResult {
        check_id: CheckId::Mv,
        domain: d.domain(),
        degree: None,
        instance: "gap small <=> defect small".into(),
        hypotheses: Gate::Satisfied,
        lhs,
        rhs,
        margin,
        tolerance: 0.0,
        verdict: if margin < 0.0 {
            Verdict::Fail
        } else {
            Verdict::Pass
        },
        note: Some(format!(
            "gap {:.3e} (small below {:e}), defect {:.3e} (small below {:e})",
            gap.extrapolated, tols.mean_value_small, defect.extrapolated, tols.defect_small
        )),
        studies: vec![gap, defect],
    })
}

fn field_instances(d: &DomainData) -> Vec<Instance> {
    let id = CheckId::Field;
    let n = d.n();
    let mut out = Vec::new();
    for f in &d.fields {
        let deg = f.field.degree();
        let nor = exact(
            format!("normal/volume energy of {}", f.label),
            f.normal / f.volume,
        );
        let tan = exact(
            format!("tangential/volume energy of {}", f.label),
            f.tangential / f.volume,
        );
        let parallel = matches!(f.field, AnalyticField::Parallel { .. });
        if parallel && deg >= 2 {
            out.push(Instance::new(
                id,
                deg,
                n,
                format!("exact {}", f.label),
                nor.clone(),
                q(nu(1, deg - 1)),
            ));
        }
        if !parallel {
            out.push(Instance::new(
                id,
                1,
                n,
                format!("exact {}", f.label),
                nor.clone(),
                q(nu(2, 0)),
            ));
        }
        if deg <= n {
            let mut inst = Instance::new(
                id,
                deg,
                n,
                format!("co-exact {}", f.label),
                tan,
                q(nu(1, n - deg)),
            );
            if !parallel {
                inst = inst.with_hyps(vec![Hypothesis::RelativeVanishing(1)]);
            }
            out.push(inst);
        }
    }
    out
}

fn instances(id: CheckId, d: &DomainData, tols: &Tolerances) -> Result<Vec<Instance>, VerifyError> {
    let n = d.n();
    let g = &d.geometry;
    let iso = || exact("Vol(Sigma)/Vol(Omega)", g.iso_ratio);
    let sigma = |p: usize| g.sigma_p(p);
    let lambda = || q(Quantity::BoundaryLambda1);
    let mut out = Vec::new();
    match id {
        CheckId::Sym | CheckId::Psd => out = matrix_instances(id, d, tols),
        CheckId::Dual => {
            for p in 0..=n {
                let lhs = q(Quantity::NuDual { k: 1, p });
                out.push(Instance::new(
                    id,
                    p,
                    n,
                    format!("p={p}"),
                    lhs,
                    q(nu(1, n - p)),
                ));
            }
        }
        CheckId::LowA => {
            for p in id.degrees(n) {
                let c = (n - p + 2) as f64 / (n - p + 1) as f64;
                let rhs = exact(format!("sigma_{p} (n-p+2)/(n-p+1)"), c * sigma(p));
                out.push(Instance::new(id, p, n, format!("p={p}"), q(nu(1, p)), rhs));
            }
        }
        CheckId::LowB => {
            for p in id.degrees(n) {
                let c = (p + 1) as f64 / p as f64;
                let rhs = exact(format!("sigma_{p} (p+1)/p"), c * sigma(p));
                out.push(Instance::new(id, p, n, format!("p={p}"), q(nu(1, p)), rhs));
            }
        }
        CheckId::Eq1 => {
            let rhs = exact("(n+1) H", (n + 1) as f64 * g.h);
            out.push(Instance::new(id, n, n, format!("p={n}"), q(nu(1, n)), rhs));
        }
        CheckId::Cons => {
            for p in 1..=n {
                let rhs =
                    q(nu(1, p - 1)).plus(exact(format!("sigma_{p}/{p}"), sigma(p) / p as f64));
                out.push(Instance::new(id, p, n, format!("p={p}"), q(nu(1, p)), rhs));
            }
        }
        CheckId::Mono => {
            for p in 1..n {
                out.push(Instance::new(
                    id,
                    p,
                    n,
                    format!("nu_{{1,{}}} >= nu_{{1,{p}}}", p + 1),
                    q(nu(1, p + 1)),
                    q(nu(1, p)),
                ));
            }
            for p in 1..=n {
                let inst = Instance::new(
                    id,
                    p,
                    n,
                    format!("nu_{{1,{p}}} > 0"),
                    q(nu(1, p)),
                    exact("0", 0.0),
                )
                .with_relation(Relation::Gt);
                out.push(inst);
            }
        }
        CheckId::IsoN => out.push(Instance::new(
            id,
            n,
            n,
            format!("p={n}"),
            iso(),
            q(nu(1, n)),
        )),
        CheckId::IsoPair => {
            for p in 1..=n {
                let rhs = if p == 1 {
                    q(nu(2, 0)).plus(q(nu(1, n - 1)))
                } else {
                    q(nu(1, p - 1)).plus(q(nu(1, n - p)))
                };
                out.push(Instance::new(id, p, n, format!("p={p}"), iso(), rhs));
            }
        }
        CheckId::Field => out = field_instances(d),
        CheckId::Hodge => {
            for p in 1..=n {
                let rhs = q(nu(1, n - p))
                    .scaled(0.5 * sigma(p))
                    .plus(q(nu(1, p - 1)).scaled(0.5 * sigma(n - p + 1)));
                out.push(Instance::new(id, p, n, format!("p={p}"), lambda(), rhs));
            }
        }
        CheckId::Esc => {
            let nh = n as f64 * g.h;
            let rhs = q(nu(1, n - 1))
                .scaled(0.5 * sigma(1))
                .plus(q(nu(2, 0)).scaled(0.5 * nh));
            out.push(Instance::new(id, 1, n, "curvature bound", lambda(), rhs));
            let strict = Instance::new(
                id,
                1,
                n,
                "strict bound",
                lambda(),
                q(nu(2, 0)).scaled(0.5 * nh),
            )
            .with_relation(Relation::Gt);
            out.push(strict);
        }
        CheckId::Bih => {
            let mu = || q(Quantity::Mu1);
            out.push(Instance::new(
                id,
                n,
                n,
                "mu_1 >= nu_{1,n}",
                mu(),
                q(nu(1, n)),
            ));
            out.push(
                Instance::new(
                    id,
                    n,
                    n,
                    "mu_1 >= (n+1) H",
                    mu(),
                    exact("(n+1) H", (n + 1) as f64 * g.h),
                )
                .with_hyps(vec![Hypothesis::MeanConvex]),
            );
            out.push(Instance::new(
                id,
                n,
                n,
                "mu_1 <= Vol(Sigma)/Vol(Omega)",
                iso(),
                mu(),
            ));
        }
        CheckId::Ball => {
            for p in 0..=n {
                let r = reference_ball(n, p)?;
                let mut first = Instance::new(
                    id,
                    p,
                    n,
                    format!("nu_{{1,{p}}}"),
                    q(nu(1, p)),
                    exact("reference", r.first),
                );
                first.warn_only = r.unproven;
                out.push(first);
                if let Some(second) = r.second {
                    out.push(Instance::new(
                        id,
                        p,
                        n,
                        "nu_{2,0}",
                        q(nu(2, 0)),
                        exact("reference", second),
                    ));
                }
            }
        }
        CheckId::Ker | CheckId::Mv => {}
    }
    Ok(out)
}

/// Evaluates every instance of `id` on a domain.
pub fn run_check(
    id: CheckId,
    d: &DomainData,
    tols: &Tolerances,
) -> Result<Vec<CheckResult>, VerifyError> {
    match id {
        CheckId::Ker => Ok(kernel_results(d, tols)),
        CheckId::Mv => Ok(vec![mean_value_result(d, tols)?]),
        _ => instances(id, d, tols)?
            .into_iter()
            .map(|i| evaluate(id, d, i, tols))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_classes() {
        assert_eq!(verdict(Relation::Geq, 0.5, 0.1, false), Verdict::Pass);
        assert_eq!(
            verdict(Relation::Geq, 0.05, 0.1, false),
            Verdict::EqualityDetected
        );
        assert_eq!(
            verdict(Relation::Geq, -0.05, 0.1, false),
            Verdict::EqualityDetected
        );
        assert_eq!(verdict(Relation::Geq, -0.5, 0.1, false), Verdict::Fail);
        assert_eq!(verdict(Relation::Gt, 0.05, 0.1, false), Verdict::Warn);
        assert_eq!(verdict(Relation::Gt, 0.5, 0.1, false), Verdict::Pass);
        assert_eq!(verdict(Relation::Eq, -0.05, 0.1, false), Verdict::Pass);
        assert_eq!(verdict(Relation::Eq, -0.5, 0.1, true), Verdict::Warn);
        assert_eq!(verdict(Relation::Bound, -0.5, 0.1, false), Verdict::Fail);
        let json = serde_json::to_string(&Verdict::EqualityDetected).unwrap();
        assert_eq!(json, "\"EQUALITY-DETECTED\"");
    }
}
