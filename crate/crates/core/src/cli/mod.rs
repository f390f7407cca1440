//! The `formsteklov` command line: mesh generation, spectra, verification.

mod args;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::Parser;
use serde::Serialize;
use thiserror::Error;

pub use args::{
    parse_levels, Cli, Command, DomainArgs, DomainKind, GenArgs, SpectrumArgs, VerifyArgs,
};

use crate::mesh::{self, DomainSpec, Family, MeshError, SimplicialComplex};
use crate::steklov::{self, DualScheme, MassOptions, SpectrumResult};
use crate::verify::{
    self, CheckId, ConvergenceStudy, SuiteOptions, Tolerances, Verdict, VerifyError,
};

/// Exit status: success.
pub const EXIT_OK: i32 = 0;
/// Exit status: invalid arguments, domain parameters, or input files.
pub const EXIT_INVALID: i32 = 2;
/// Exit status: a solver or factorization failed.
pub const EXIT_SOLVER: i32 = 3;
/// Exit status: at least one check failed.
pub const EXIT_CHECK_FAILED: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("cannot write {path}: {msg}")]
    Output { path: PathBuf, msg: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) | CliError::Output { .. } => EXIT_INVALID,
            CliError::Solver(_) => EXIT_SOLVER,
        }
    }
}

impl From<MeshError> for CliError {
    fn from(e: MeshError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<steklov::SteklovError> for CliError {
    fn from(e: steklov::SteklovError) -> Self {
        match e {
            steklov::SteklovError::DegreeOutOfRange { .. } | steklov::SteklovError::NoBoundary => {
                CliError::Invalid(e.to_string())
            }
            e => CliError::Solver(e.to_string()),
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::TooFewLevels(_)
            | VerifyError::NonConsecutiveLevels(_)
            | VerifyError::ReferenceOutOfRange { .. }
            | VerifyError::UnknownCheck(_)
            | VerifyError::Mesh(_) => CliError::Invalid(e.to_string()),
            VerifyError::Output(msg) => CliError::Output {
                path: PathBuf::new(),
                msg,
            },
            e => CliError::Solver(e.to_string()),
        }
    }
}

/// Fully resolved parameters of one run, embedded in every JSON output.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub version: &'static str,
    pub command: &'static str,
    pub domains: Vec<Family>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mesh: Option<PathBuf>,
    pub levels: Vec<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub degree: Option<usize>,
    pub dual: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count: Option<usize>,
    pub mass: MassOptions,
    pub dual_scheme: DualScheme,
    pub checks: Vec<CheckId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<Tolerances>,
    pub outputs: Vec<PathBuf>,
    pub jobs: usize,
    pub deterministic: bool,
}

impl RunConfig {
    fn new(command: &'static str, cli: &Cli) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION"),
            command,
            domains: Vec::new(),
            mesh: None,
            levels: Vec::new(),
            degree: None,
            dual: false,
            count: None,
            mass: MassOptions::default(),
            dual_scheme: DualScheme::default(),
            checks: Vec::new(),
            tolerances: None,
            outputs: Vec::new(),
            jobs: if cli.deterministic { 1 } else { cli.jobs },
            deterministic: cli.deterministic,
        }
    }
}

/// Parses the process arguments, runs, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
        }
    };
    configure_threads(&cli);
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(&cli, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Sets the worker pool size and the dense-kernel parallelism. Only the
/// first call in a process takes effect for the pool.
pub fn configure_threads(cli: &Cli) {
    let jobs = if cli.deterministic { 1 } else { cli.jobs };
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build_global();
    if cli.deterministic || jobs == 1 {
        faer::set_global_parallelism(faer::Par::Seq);
    } else {
        faer::set_global_parallelism(faer::Par::rayon(jobs));
    }
}

/// Runs a parsed command, writing human-readable output to `out`.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::Gen(a) => cmd_gen(a, out),
        Command::Spectrum(a) => cmd_spectrum(cli, a, out),
        Command::Verify(a) => cmd_verify(cli, a, out),
    }
}

fn say(out: &mut dyn Write, line: impl AsRef<str>) {
    let _ = writeln!(out, "{}", line.as_ref());
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Output {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })?;
    }
    fs::write(path, contents).map_err(|e| CliError::Output {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })
}

fn single_family(kind: DomainKind, shape: &DomainArgs) -> Result<Family, CliError> {
    if kind == DomainKind::All {
        return Err(CliError::Invalid("`all` is only accepted by verify".into()));
    }
    let f = shape.family(kind)[0];
    f.validate()?;
    Ok(f)
}

fn cmd_gen(a: &GenArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let family = single_family(a.domain, &a.shape)?;
    let cx = mesh::generate(&DomainSpec::new(family, a.level))?;
    let bd = cx.boundary().map(|b| b.n_components()).unwrap_or(0);
    say(
        out,
        format!(
            "{family} level {}: simplices by dimension {:?}, {bd} boundary component(s), max edge {:.4}",
            a.level,
            cx.counts(),
            cx.max_edge_length()
        ),
    );
    if let Some(path) = &a.out {
        mesh::write_mesh(&cx, path)?;
        say(out, format!("wrote {}", path.display()));
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SpectrumOutput<'a> {
    config: &'a RunConfig,
    spectra: Vec<SpectrumResult>,
    studies: Vec<ConvergenceStudy>,
}

fn one_spectrum(
    cx: &SimplicialComplex,
    degree: usize,
    dual: bool,
    count: usize,
    mass: MassOptions,
) -> Result<SpectrumResult, CliError> {
    if degree >= cx.dim() {
        return Err(CliError::Invalid(format!(
            "degree {degree} out of range for a boundary of dimension {}",
            cx.dim() - 1
        )));
    }
    let asm = if dual {
        steklov::assemble_dual(cx, degree, mass, DualScheme::default())?
    } else {
        steklov::assemble_primal(cx, degree, mass)?
    };
    Ok(steklov::spectrum(&steklov::dtn_matrix(&asm)?, count)?)
}

fn cmd_spectrum(cli: &Cli, a: &SpectrumArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let mut cfg = RunConfig::new("spectrum", cli);
    cfg.degree = Some(a.degree);
    cfg.dual = a.dual;
    cfg.count = Some(a.count);
    cfg.mass = MassOptions {
        lumped_sigma: a.lumped,
    };
    cfg.outputs = a.out.iter().cloned().collect();
    let mut spectra = Vec::new();
    let mut studies = Vec::new();
    if let Some(path) = &a.mesh {
        cfg.mesh = Some(path.clone());
        let cx = mesh::read_mesh(path)?;
        spectra.push(one_spectrum(&cx, a.degree, a.dual, a.count, cfg.mass)?);
    } else {
        let kind = a.domain.expect("clap enforces --mesh or --domain");
        let family = single_family(kind, &a.shape)?;
        let levels = match &a.levels {
            Some(s) => parse_levels(s, &family).map_err(CliError::Invalid)?,
            None => SuiteOptions::default_levels(&family),
        };
        cfg.domains = vec![family];
        cfg.levels = vec![levels.clone()];
        for &l in &levels {
            let cx = mesh::generate(&DomainSpec::new(family, l))?;
            let mut s = one_spectrum(&cx, a.degree, a.dual, a.count, cfg.mass)?;
            s.level = Some(l);
            spectra.push(s);
        }
        let kept = spectra
            .iter()
            .map(|s| s.eigenvalues.len())
            .min()
            .unwrap_or(0);
        let label = if a.dual { "nuD" } else { "nu" };
        for k in 0..kept {
            let values: Vec<f64> = spectra.iter().map(|s| s.eigenvalues[k]).collect();
            let name = format!("{label}_{{{},{}}}", k + 1, a.degree);
            studies.push(verify::richardson(&name, &levels, &values)?);
        }
    }
    for s in &spectra {
        let level = s
            .level
            .map(|l| format!("level {l}"))
            .unwrap_or_else(|| "mesh".into());
        let ev: Vec<String> = s.eigenvalues.iter().map(|v| format!("{v:.6}")).collect();
        say(
            out,
            format!("{level}: kernel {} | {}", s.kernel_dim, ev.join(" ")),
        );
    }
    for st in &studies {
        let order = st
            .order
            .map(|q| format!("{q:.2}"))
            .unwrap_or_else(|| "-".into());
        say(
            out,
            format!(
                "{}: extrapolated {:.6} ± {:.1e} (order {order})",
                st.quantity, st.extrapolated, st.error_bar
            ),
        );
    }
    let json = serde_json::to_string_pretty(&SpectrumOutput {
        config: &cfg,
        spectra,
        studies,
    })
    .expect("spectrum output serializes");
    match &a.out {
        Some(path) => write_file(path, &(json + "\n"))?,
        None => say(out, json),
    }
    Ok(EXIT_OK)
}

/// Sibling output path `<stem>.<suffix>` next to the report.
fn sibling(report: &Path, suffix: &str) -> PathBuf {
    let stem = report
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    report.with_file_name(format!("{stem}.{suffix}"))
}

fn cmd_verify(cli: &Cli, a: &VerifyArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let mut cfg = RunConfig::new("verify", cli);
    let mut families: Vec<Family> = a.domain.iter().flat_map(|&k| a.shape.family(k)).collect();
    families.dedup();
    for f in &families {
        f.validate()?;
    }
    let ids: Vec<CheckId> = if a.checks.is_empty() {
        CheckId::ALL.to_vec()
    } else {
        a.checks
            .iter()
            .map(|c| c.parse::<CheckId>())
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Invalid(e.to_string()))?
    };
    let mut tols = Tolerances::default();
    if let Some(v) = a.tolerance_floor {
        tols.floor = v;
    }
    if let Some(v) = a.error_bar_factor {
        tols.error_bar_factor = v;
    }
    let mass = MassOptions {
        lumped_sigma: a.lumped,
    };
    let mut suites = Vec::new();
    for f in &families {
        let levels = match &a.levels {
            Some(s) => parse_levels(s, f).map_err(CliError::Invalid)?,
            None => SuiteOptions::default_levels(f),
        };
        let mut opts = SuiteOptions::new(levels);
        opts.mass = mass;
        suites.push((*f, opts));
    }
    cfg.domains = families.clone();
    cfg.levels = suites.iter().map(|(_, o)| o.levels.clone()).collect();
    cfg.mass = mass;
    cfg.checks = ids.clone();
    cfg.tolerances = Some(tols);

    let (mut report, data) = verify::run_suite(&suites, &ids, &tols)?;

    let mut files: Vec<(PathBuf, String)> = Vec::new();
    if let Some(path) = &a.report {
        files.push((
            sibling(path, "eigenvalues.csv"),
            verify::eigen_table_csv(&data)?,
        ));
        for d in &data {
            let key = d.family.kind();
            files.push((
                sibling(path, &format!("{key}.plot.csv")),
                verify::plot_data_csv(d)?,
            ));
            files.push((
                sibling(path, &format!("{key}.svg")),
                verify::eigenvalue_chart(d),
            ));
        }
        cfg.outputs = std::iter::once(path.clone())
            .chain(files.iter().map(|(p, _)| p.clone()))
            .collect();
    }
    report.config = serde_json::to_value(&cfg).expect("config serializes");

    for r in &report.runs {
        say(
            out,
            format!(
                "{:<13} {:<22} {:<36} {:<17} margin {:>+11.4e}  tol {:.2e}",
                r.check_id.as_str(),
                r.domain,
                r.instance,
                r.verdict.as_str(),
                r.margin,
                r.tolerance
            ),
        );
    }
    let t = report.tally;
    say(
        out,
        format!(
            "{} PASS, {} EQUALITY-DETECTED, {} WARN, {} SKIPPED, {} FAIL",
            t.pass, t.equality_detected, t.warn, t.skipped, t.fail
        ),
    );
    if let Some(path) = &a.report {
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        write_file(path, &(json + "\n"))?;
        for (p, contents) in &files {
            write_file(p, contents)?;
        }
        say(
            out,
            format!(
                "wrote {} and {} companion file(s)",
                path.display(),
                files.len()
            ),
        );
    }
    let failed = report.runs.iter().any(|r| r.verdict == Verdict::Fail);
    Ok(if failed { EXIT_CHECK_FAILED } else { EXIT_OK })
}
