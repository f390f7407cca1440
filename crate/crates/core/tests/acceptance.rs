//! Exit gate: one line per acceptance criterion, with pinned tolerances.
//!
//! Runs the full benchmark suite once (a few minutes in release mode) and
//! exits non-zero if any criterion fails. WARN lines do not fail the run.

use std::process::ExitCode;
use std::time::Instant;

use formsteklov::feec::tangential_trace;
use formsteklov::mesh::{generate, read_mesh_str, write_mesh_string, DomainSpec, Family};
use formsteklov::scalar::mean_exit_time;
use formsteklov::verify::{
    run_suite, CheckId, DomainData, Quantity, SuiteOptions, Tolerances, Verdict, VerificationReport,
};

const DISK_SPECTRUM_REL: f64 = 0.01;
const DISK_ORDER: (f64, f64) = (1.7, 2.3);
const BALL_P2_REL: f64 = 0.03;
const BALL_P1_REL: f64 = 0.03;
const DISK_P1_REL: f64 = 0.01;
const DUALITY_REL: f64 = 0.02;
const KERNEL_GAP: f64 = 100.0;
const SYMMETRY: f64 = 1e-10;
const PSD: f64 = -1e-8;
const EQUALITY_ABSENT_REL: f64 = 0.01;
const DEFECT_SMALL: f64 = 1e-2;
const MU_DISK_REL: f64 = 0.02;
const MU_BALL_REL: f64 = 0.03;
/// Levels of the dedicated exit-time sweep on the ball. The exit-time defect
/// converges at first order and the spectral levels stop at 3.
const BALL_DEFECT_LEVELS: [usize; 3] = [3, 4, 5];

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Outcome {
    Pass,
    Warn,
    Fail,
}

struct Line {
    outcome: Outcome,
    detail: Vec<String>,
}

impl Line {
    fn new() -> Self {
        Self {
            outcome: Outcome::Pass,
            detail: Vec::new(),
        }
    }

    fn require(&mut self, ok: bool, what: String) {
        if !ok {
            self.outcome = self.outcome.max(Outcome::Fail);
        }
        self.detail
            .push(if ok { what } else { format!("{what} [failed]") });
    }

    fn prefer(&mut self, ok: bool, what: String) {
        if !ok {
            self.outcome = self.outcome.max(Outcome::Warn);
        }
        self.detail
            .push(if ok { what } else { format!("{what} [warn]") });
    }
}

struct Suite {
    family: Family,
    data: DomainData,
    report: VerificationReport,
}

fn families() -> Vec<Family> {
    vec![
        Family::Disk,
        Family::Ellipse { a: 1.0, b: 0.7 },
        Family::Annulus {
            r_in: 0.5,
            r_out: 1.0,
        },
        Family::Ball,
        Family::Ellipsoid {
            a: 1.0,
            b: 0.8,
            c: 0.7,
        },
        Family::Shell {
            r_in: 0.5,
            r_out: 1.0,
        },
        Family::Cuboid {
            lx: 1.0,
            ly: 1.0,
            lz: 1.0,
        },
    ]
}

fn suite<'a>(all: &'a [Suite], kind: &str) -> &'a Suite {
    all.iter()
        .find(|s| s.family.kind() == kind)
        .expect("family in suite")
}

fn extrapolated(d: &DomainData, q: Quantity) -> (f64, f64, Option<f64>) {
    let s = d.study(q).expect("study");
    (s.extrapolated, s.error_bar, s.order)
}

fn rel(x: f64, r: f64) -> f64 {
    (x - r).abs() / r.abs().max(1.0)
}

fn non_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0])
}

fn criterion_1(all: &[Suite]) -> Line {
    let mut line = Line::new();
    let disk = &suite(all, "disk").data;
    let exact = [0.0, 1.0, 1.0, 2.0, 2.0, 3.0, 3.0];
    line.require(
        disk.level_numbers() == vec![2, 3, 4, 5],
        format!("levels {:?}", disk.level_numbers()),
    );
    for (i, &e) in exact.iter().enumerate() {
        let (v, _, order) = extrapolated(disk, Quantity::Nu { k: i + 1, p: 0 });
        let ok = if e == 0.0 {
            v.abs() <= DISK_SPECTRUM_REL
        } else {
            rel(v, e) <= DISK_SPECTRUM_REL
        };
        line.require(ok, format!("nu_{}={v:.5}", i + 1));
        if e > 0.0 {
            let q = order.unwrap_or(f64::NAN);
            line.require(
                (DISK_ORDER.0..=DISK_ORDER.1).contains(&q),
                format!("order {q:.2}"),
            );
        }
    }
    line
}

fn criterion_2(all: &[Suite]) -> Line {
    let mut line = Line::new();
    let ball = &suite(all, "ball").data;
    let disk = &suite(all, "disk").data;
    let (v, _, _) = extrapolated(ball, Quantity::Nu { k: 1, p: 2 });
    line.require(
        rel(v, 3.0) <= BALL_P2_REL,
        format!("ball nu_{{1,2}}={v:.5} vs 3 (3%)"),
    );
    let (v, _, _) = extrapolated(ball, Quantity::Nu { k: 1, p: 1 });
    line.prefer(
        rel(v, 5.0 / 3.0) <= BALL_P1_REL,
        format!("ball nu_{{1,1}}={v:.5} vs 5/3 (3%, unproven value)"),
    );
    let (v, _, _) = extrapolated(disk, Quantity::Nu { k: 1, p: 1 });
    line.require(
        rel(v, 2.0) <= DISK_P1_REL,
        format!("disk nu_{{1,1}}={v:.5} vs 2 (1%)"),
    );
    line
}

fn criterion_3(all: &[Suite]) -> Line {
    let mut line = Line::new();
    for kind in ["disk", "ball", "ellipse"] {
        let d = &suite(all, kind).data;
        let nu = d.values(Quantity::Nu { k: 1, p: d.n() }).unwrap();
        let nud = d.values(Quantity::NuDual { k: 1, p: 0 }).unwrap();
        let gaps: Vec<f64> = nu
            .iter()
            .zip(&nud)
            .map(|(a, b)| (a - b).abs() / a)
            .collect();
        let last = *gaps.last().unwrap();
        line.require(
            last <= DUALITY_REL && non_increasing(&gaps),
            format!(
                "{kind} {:.2}% at finest, decreasing {}",
                100.0 * last,
                non_increasing(&gaps)
            ),
        );
    }
    line
}

fn criterion_4(all: &[Suite]) -> Line {
    let mut line = Line::new();
    for (kind, p, betti) in [
        ("disk", 1, 0),
        ("annulus", 1, 1),
        ("ball", 1, 0),
        ("ball", 2, 0),
        ("shell", 2, 1),
    ] {
        let d = &suite(all, kind).data;
        let dims: Vec<usize> = d.levels.iter().map(|l| l.primal[p].kernel_dim).collect();
        let gap = d
            .levels
            .iter()
            .map(|l| l.primal[p].kernel_gap)
            .fold(f64::INFINITY, f64::min);
        line.require(
            dims.iter().all(|&k| k == betti) && gap >= KERNEL_GAP,
            format!("{kind} p={p} dims {dims:?} (b={betti}) gap>={gap:.1e}"),
        );
    }
    line
}

fn criterion_5(all: &[Suite]) -> Line {
    let mut line = Line::new();
    let (mut asym, mut min_ev, mut count) = (0.0f64, f64::INFINITY, 0usize);
    for s in all {
        for l in &s.data.levels {
            for r in l.primal.iter().chain(&l.dual) {
                asym = asym.max(r.asymmetry);
                min_ev = min_ev.min(r.min_relative_eigenvalue);
                count += 1;
            }
        }
    }
    line.require(
        asym <= SYMMETRY,
        format!("{count} matrices, max asymmetry {asym:.1e}"),
    );
    line.require(
        min_ev >= PSD,
        format!("min relative eigenvalue {min_ev:.1e}"),
    );
    line
}

fn criterion_6(all: &[Suite]) -> Line {
    let mut line = Line::new();
    let ids = [
        CheckId::LowA,
        CheckId::LowB,
        CheckId::Eq1,
        CheckId::Cons,
        CheckId::Mono,
        CheckId::IsoN,
        CheckId::IsoPair,
        CheckId::Field,
        CheckId::Hodge,
        CheckId::Esc,
        CheckId::Bih,
    ];
    for s in all {
        let runs: Vec<_> = ids.iter().flat_map(|&id| s.report.runs_of(id)).collect();
        let fails = runs.iter().filter(|r| r.verdict == Verdict::Fail).count();
        let skipped = runs
            .iter()
            .filter(|r| r.verdict == Verdict::Skipped)
            .count();
        let kind = s.family.kind();
        let violating = matches!(s.family, Family::Annulus { .. } | Family::Shell { .. });
        line.require(
            fails == 0 && (!violating || skipped > 0),
            format!(
                "{kind}: {} runs, {fails} fail, {skipped} skipped",
                runs.len()
            ),
        );
    }
    line
}

fn criterion_7(all: &[Suite]) -> Line {
    let mut line = Line::new();
    for id in [CheckId::IsoN, CheckId::Eq1] {
        for kind in ["disk", "ball"] {
            let detected = suite(all, kind)
                .report
                .runs_of(id)
                .any(|r| r.verdict == Verdict::EqualityDetected);
            line.require(detected, format!("{} {kind} detected", id.as_str()));
        }
        let runs: Vec<_> = suite(all, "ellipse").report.runs_of(id).collect();
        let clear = !runs.is_empty()
            && runs.iter().all(|r| {
                r.verdict != Verdict::EqualityDetected
                    && r.margin > EQUALITY_ABSENT_REL * r.rhs.abs()
            });
        let margins: Vec<String> = runs.iter().map(|r| format!("{:.3}", r.margin)).collect();
        line.require(
            clear,
            format!(
                "{} ellipse clear (margin {})",
                id.as_str(),
                margins.join(",")
            ),
        );
    }
    line
}

fn criterion_8(all: &[Suite]) -> Line {
    let mut line = Line::new();
    let disk = suite(all, "disk")
        .data
        .values(Quantity::ExitDefect)
        .unwrap();
    line.require(
        *disk.last().unwrap() <= DEFECT_SMALL && non_increasing(&disk),
        format!("disk defect {:.4} at finest", disk.last().unwrap()),
    );
    let ball: Vec<f64> = BALL_DEFECT_LEVELS
        .iter()
        .map(|&l| {
            let cx = generate(&DomainSpec::new(Family::Ball, l)).unwrap();
            mean_exit_time(&cx).unwrap().defect
        })
        .collect();
    let spectral = suite(all, "ball")
        .data
        .values(Quantity::ExitDefect)
        .unwrap();
    line.require(
        *ball.last().unwrap() <= DEFECT_SMALL && non_increasing(&ball) && non_increasing(&spectral),
        format!(
            "ball defect {:.4} at level {} ({:.4} at spectral finest)",
            ball.last().unwrap(),
            BALL_DEFECT_LEVELS[2],
            spectral.last().unwrap()
        ),
    );
    let d = &suite(all, "ellipse").data;
    let ell: Vec<f64> = d
        .levels
        .iter()
        .filter(|l| l.level >= 2)
        .map(|l| l.exit_time.defect)
        .collect();
    let low = ell.iter().cloned().fold(f64::INFINITY, f64::min);
    line.require(low >= DEFECT_SMALL, format!("ellipse defect >= {low:.4}"));
    for s in all {
        let ok = s
            .report
            .runs_of(CheckId::Mv)
            .all(|r| r.verdict == Verdict::Pass);
        line.require(ok, format!("{} tracks", s.family.kind()));
    }
    line
}

fn criterion_9(all: &[Suite]) -> Line {
    let mut line = Line::new();
    let (mu, _, _) = extrapolated(&suite(all, "disk").data, Quantity::Mu1);
    line.require(rel(mu, 2.0) <= MU_DISK_REL, format!("disk mu_1={mu:.4}"));
    let (mu, _, _) = extrapolated(&suite(all, "ball").data, Quantity::Mu1);
    line.require(rel(mu, 3.0) <= MU_BALL_REL, format!("ball mu_1={mu:.4}"));
    let tols = Tolerances::default();
    for s in all {
        let d = &s.data;
        let (mu, mu_bar, _) = extrapolated(d, Quantity::Mu1);
        let (nu, nu_bar, _) = extrapolated(d, Quantity::Nu { k: 1, p: d.n() });
        let iso = d.geometry.iso_ratio;
        let lower = tols.floor.max(tols.error_bar_factor * (mu_bar + nu_bar));
        let upper = tols.floor.max(tols.error_bar_factor * mu_bar);
        line.require(
            nu - lower <= mu && mu <= iso + upper,
            format!("{} {nu:.3}<={mu:.3}<={iso:.3}", s.family.kind()),
        );
    }
    line
}

fn criterion_10(all: &[Suite]) -> Line {
    let mut line = Line::new();
    let mut meshes = 0;
    let mut ok_dd = true;
    let mut ok_trace = true;
    let mut ok_io = true;
    for s in all {
        for &level in &s.data.level_numbers() {
            let cx = generate(&DomainSpec::new(s.family, level)).unwrap();
            let n = cx.dim();
            for p in 0..n.saturating_sub(1) {
                ok_dd &= cx.coboundary(p + 1).matmul(&cx.coboundary(p)).is_zero();
            }
            let bd = cx.boundary().unwrap();
            for p in 0..n - 1 {
                let lhs = tangential_trace(&cx, p + 1)
                    .unwrap()
                    .matmul(&cx.coboundary(p).to_real());
                let rhs = bd
                    .complex()
                    .coboundary(p)
                    .to_real()
                    .matmul(&tangential_trace(&cx, p).unwrap());
                ok_trace &= lhs.add_scaled(&rhs, -1.0).max_abs() == 0.0;
            }
            let text = write_mesh_string(&cx);
            ok_io &= write_mesh_string(&read_mesh_str(&text).unwrap()) == text;
            meshes += 1;
        }
    }
    line.require(ok_dd, format!("{meshes} meshes: DD=0"));
    line.require(ok_trace, "trace commutes".into());
    line.require(ok_io, "round trip byte-identical".into());
    line
}

type Criterion = (&'static str, fn(&[Suite]) -> Line);

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let start = Instant::now();
    let tols = Tolerances::default();
    let all: Vec<Suite> = families()
        .into_iter()
        .map(|family| {
            let t = Instant::now();
            let opts = SuiteOptions::new(SuiteOptions::default_levels(&family));
            let (report, mut data) =
                run_suite(&[(family, opts)], &CheckId::ALL, &tols).expect("suite runs");
            println!("suite {family}: {:.1}s", t.elapsed().as_secs_f64());
            Suite {
                family,
                data: data.remove(0),
                report,
            }
        })
        .collect();
    let criteria: [Criterion; 10] = [
        ("disk classical spectrum", criterion_1),
        ("ball values", criterion_2),
        ("duality", criterion_3),
        ("kernel and topology", criterion_4),
        ("matrix symmetry and PSD", criterion_5),
        ("inequality suite", criterion_6),
        ("equality detection", criterion_7),
        ("harmonic-domain consistency", criterion_8),
        ("biharmonic squeeze", criterion_9),
        ("combinatorial exactness", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let line = f(&all);
        let tag = match line.outcome {
            Outcome::Pass => "PASS",
            Outcome::Warn => "WARN",
            Outcome::Fail => {
                failed += 1;
                "FAIL"
            }
        };
        println!(
            "criterion {:>2} {tag} {name}: {}",
            i + 1,
            line.detail.join("; ")
        );
    }
    println!(
        "acceptance: {failed} failed, {:.0}s",
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
