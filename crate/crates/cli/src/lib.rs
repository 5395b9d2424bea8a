//! Gallery configuration, batch execution and report writers for the `curvlab` binary.

use std::collections::{BTreeMap, HashSet};
use std::io::{self, Write};
use std::time::Instant;

use curvlab_core::{
    build_chart, classify, curvature_at, find_audit, gauss_package, run_audits, run_claim, seeded_algebraic_package,
    AuditContext, AuditOutcome, Chart, ClassificationReport, CurvaturePackage, HypersurfaceData, MetricPoint,
    Premise, Provenance, Sym2, Tolerances, CLAIMS,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

/// The gallery shipped with the binary.
pub const DEFAULT_GALLERY: &str = include_str!("../gallery/default.json");

#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration (exit code 2).
    Config(String),
    Io(io::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

fn cfg_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GalleryConfig {
    #[serde(default)]
    pub cases: Vec<GalleryCase>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GalleryCase {
    pub name: String,
    pub source: Source,
    #[serde(default)]
    pub checks: Checks,
    #[serde(default)]
    pub tol_overrides: TolOverrides,
    /// Conditions asserted to hold at every point of the case.
    #[serde(default)]
    pub claims: Vec<String>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Source {
    Chart {
        kind: String,
        #[serde(default)]
        params: BTreeMap<String, f64>,
        points: Vec<Vec<f64>>,
    },
    Hypersurface {
        g: MetricSpec,
        #[serde(rename = "H")]
        h: ShapeSpec,
        epsilon: f64,
        kappa_tilde: f64,
    },
    Algebraic {
        seed: u64,
        n: usize,
        #[serde(default)]
        signature: usize,
        #[serde(default = "default_terms")]
        terms: usize,
    },
}

fn default_terms() -> usize {
    3
}

/// `"identity"`, `"minkowski"` or an explicit matrix.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum MetricSpec {
    Named(String),
    Matrix(Vec<Vec<f64>>),
}

/// An explicit matrix, a diagonal, or eigenvalues with multiplicities.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum ShapeSpec {
    Matrix(Vec<Vec<f64>>),
    Diagonal { diag: Vec<f64> },
    Eigenvalues { eigenvalues: Vec<(f64, usize)> },
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(untagged)]
pub enum Checks {
    #[default]
    #[serde(skip)]
    All,
    Named(String),
    List(Vec<String>),
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolOverrides {
    pub exact: Option<f64>,
    pub premise: Option<f64>,
    pub nonzero: Option<f64>,
    pub rank_rel: Option<f64>,
    pub eig_gap: Option<f64>,
}

impl TolOverrides {
    fn apply(&self, mut t: Tolerances) -> Tolerances {
        let set = |dst: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut t.exact, self.exact);
        set(&mut t.premise, self.premise);
        set(&mut t.nonzero, self.nonzero);
        set(&mut t.rank_rel, self.rank_rel);
        set(&mut t.eig_gap, self.eig_gap);
        t
    }

    fn values(&self) -> impl Iterator<Item = f64> {
        [self.exact, self.premise, self.nonzero, self.rank_rel, self.eig_gap].into_iter().flatten()
    }
}

pub fn parse_config(text: &str) -> Result<GalleryConfig, CliError> {
    serde_json::from_str(text).map_err(|e| cfg_err(format!("cannot parse config: {e}")))
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub workers: usize,
    /// Added to every algebraic case seed.
    pub seed: u64,
    /// Global exactness tolerance; the premise tolerance becomes a tenth of it.
    pub tol: Option<f64>,
    pub meta: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { workers: 1, seed: 0, tol: None, meta: true }
    }
}

impl RunOptions {
    fn base_tolerances(&self) -> Tolerances {
        match self.tol {
            Some(t) => Tolerances::default().with_exact(t),
            None => Tolerances::default(),
        }
    }
}

enum Prepared {
    Chart(Chart, Vec<f64>),
    Hypersurface(HypersurfaceData),
    Algebraic { seed: u64, n: usize, signature: usize, terms: usize },
}

/// One evaluation point of one case.
struct Job<'c> {
    name: String,
    case: &'c GalleryCase,
    what: Prepared,
    checks: Option<Vec<String>>,
    tol: Tolerances,
}

fn metric_from(spec: &MetricSpec, n: usize) -> Result<MetricPoint, CliError> {
    let m = match spec {
        MetricSpec::Named(s) if s == "identity" => Ok(MetricPoint::euclidean(n)),
        MetricSpec::Named(s) if s == "minkowski" => MetricPoint::pseudo_euclidean(n, 1),
        MetricSpec::Named(s) => return Err(cfg_err(format!("unknown metric `{s}`"))),
        MetricSpec::Matrix(rows) => Sym2::from_rows(rows).and_then(MetricPoint::new),
    };
    m.map_err(|e| cfg_err(format!("metric: {e}")))
}

fn shape_from(spec: &ShapeSpec) -> Result<Sym2, CliError> {
    match spec {
        ShapeSpec::Matrix(rows) => Sym2::from_rows(rows).map_err(|e| cfg_err(format!("H: {e}"))),
        ShapeSpec::Diagonal { diag } => Ok(Sym2::diag(diag)),
        ShapeSpec::Eigenvalues { eigenvalues } => {
            let d: Vec<f64> = eigenvalues.iter().flat_map(|&(v, m)| std::iter::repeat_n(v, m)).collect();
            Ok(Sym2::diag(&d))
        }
    }
}

fn metric_dim(spec: &MetricSpec, h: &Sym2) -> usize {
    match spec {
        MetricSpec::Matrix(rows) => rows.len(),
        MetricSpec::Named(_) => h.n(),
    }
}

fn checks_of(case: &GalleryCase) -> Result<Option<Vec<String>>, CliError> {
    let list = match &case.checks {
        Checks::All => return Ok(None),
        Checks::Named(s) if s == "all" => return Ok(None),
        Checks::Named(s) => vec![s.clone()],
        Checks::List(v) => v.clone(),
    };
    for c in &list {
        find_audit(c).map_err(|_| cfg_err(format!("case `{}`: unknown check `{c}`", case.name)))?;
    }
    Ok(Some(list))
}

/// Validates the configuration and expands it into per-point jobs.
fn prepare<'c>(cfg: &'c GalleryConfig, opts: &RunOptions) -> Result<Vec<Job<'c>>, CliError> {
    let mut seen = HashSet::new();
    let mut jobs = Vec::new();
    for case in &cfg.cases {
        if !seen.insert(case.name.as_str()) {
            return Err(cfg_err(format!("duplicate case name `{}`", case.name)));
        }
        let checks = checks_of(case)?;
        if let Some(c) = case.claims.iter().find(|c| !CLAIMS.contains(&c.as_str())) {
            return Err(cfg_err(format!("case `{}`: unknown claim `{c}`", case.name)));
        }
        if case.tol_overrides.values().any(|v| !(v.is_finite() && v > 0.0)) {
            return Err(cfg_err(format!("case `{}`: tolerances must be positive", case.name)));
        }
        let tol = case.tol_overrides.apply(opts.base_tolerances());
        let mut push = |name: String, what: Prepared| {
            jobs.push(Job { name, case, what, checks: checks.clone(), tol });
        };
        match &case.source {
            Source::Chart { kind, params, points } => {
                let chart = build_chart(kind, params).map_err(|e| cfg_err(format!("case `{}`: {e}", case.name)))?;
                if points.is_empty() {
                    return Err(cfg_err(format!("case `{}`: no sample points", case.name)));
                }
                for (i, x) in points.iter().enumerate() {
                    if x.len() != chart.n() {
                        return Err(cfg_err(format!(
                            "case `{}`: point {i} has {} coordinates, chart needs {}",
                            case.name,
                            x.len(),
                            chart.n()
                        )));
                    }
                    let name = if points.len() == 1 { case.name.clone() } else { format!("{}@{i}", case.name) };
                    push(name, Prepared::Chart(chart.clone(), x.clone()));
                }
            }
            Source::Hypersurface { g, h, epsilon, kappa_tilde } => {
                let h = shape_from(h)?;
                let m = metric_from(g, metric_dim(g, &h))?;
                let data = HypersurfaceData::new(m, h, *epsilon, *kappa_tilde)
                    .map_err(|e| cfg_err(format!("case `{}`: {e}", case.name)))?;
                push(case.name.clone(), Prepared::Hypersurface(data));
            }
            Source::Algebraic { seed, n, signature, terms } => {
                push(
                    case.name.clone(),
                    Prepared::Algebraic { seed: seed.wrapping_add(opts.seed), n: *n, signature: *signature, terms: *terms },
                );
            }
        }
    }
    Ok(jobs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Errored,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseReport {
    pub name: String,
    pub source: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<ClassificationReport>,
    pub audits: Vec<AuditOutcome>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

impl CaseReport {
    pub fn failing_audits(&self) -> impl Iterator<Item = &AuditOutcome> {
        self.audits.iter().filter(|a| !a.passed)
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Summary {
    pub cases: usize,
    pub passed: usize,
    pub failed: usize,
    pub errored: usize,
    pub audits_run: usize,
    pub premises_held: usize,
    /// `case/audit` for every premise-true, conclusion-false outcome.
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub unix_time: u64,
    pub workers: usize,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub meta: Option<Meta>,
    pub cases: Vec<CaseReport>,
    pub summary: Summary,
}

impl Report {
    pub fn has_failures(&self) -> bool {
        self.summary.failed > 0
    }

    pub fn exit_code(&self, strict: bool) -> i32 {
        if self.has_failures() || (strict && self.summary.errored > 0) {
            1
        } else {
            0
        }
    }
}

fn package_of(what: &Prepared) -> curvlab_core::Result<(CurvaturePackage, Provenance)> {
    Ok(match what {
        Prepared::Chart(chart, x) => (curvature_at(chart, x)?, Provenance::Chart(chart.kind().clone(), x.clone())),
        Prepared::Hypersurface(data) => (gauss_package(data)?, Provenance::Hypersurface),
        Prepared::Algebraic { seed, n, signature, terms } => {
            (seeded_algebraic_package(*seed, *n, *signature, *terms)?, Provenance::Algebraic)
        }
    })
}

fn run_job(job: &Job, meta: bool) -> CaseReport {
    let start = Instant::now();
    let (source, point) = match &job.what {
        Prepared::Chart(_, x) => ("chart", Some(x.clone())),
        Prepared::Hypersurface(_) => ("hypersurface", None),
        Prepared::Algebraic { .. } => ("algebraic", None),
    };
    let mut out = CaseReport {
        name: job.name.clone(),
        source,
        point,
        status: Status::Errored,
        error: None,
        classification: None,
        audits: Vec::new(),
        wall_time_s: None,
    };
    match package_of(&job.what) {
        Err(e) => out.error = Some(e.to_string()),
        Ok((pkg, prov)) => {
            let cx = match &job.what {
                Prepared::Hypersurface(data) => AuditContext::for_hypersurface(&pkg, data.clone(), job.tol),
                _ => AuditContext::new(&pkg, prov, job.tol),
            };
            let mut audits = run_audits(&cx, job.checks.as_deref()).expect("checks validated");
            for c in &job.case.claims {
                audits.push(run_claim(&cx, c).expect("claims validated"));
            }
            out.status = if audits.iter().all(|a| a.passed) { Status::Pass } else { Status::Fail };
            out.classification = Some(cx.report().clone());
            out.audits = audits;
        }
    }
    if meta {
        out.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    out
}

fn summarize(cases: &[CaseReport]) -> Summary {
    let mut s = Summary { cases: cases.len(), ..Summary::default() };
    for c in cases {
        match c.status {
            Status::Pass => s.passed += 1,
            Status::Fail => s.failed += 1,
            Status::Errored => s.errored += 1,
        }
        s.audits_run += c.audits.len();
        s.premises_held += c.audits.iter().filter(|a| a.premise == Premise::Holds).count();
        s.failures.extend(c.failing_audits().map(|a| format!("{}/{}", c.name, a.name)));
    }
    s
}

/// Runs every case of `cfg` and assembles the report.
pub fn run_gallery(cfg: &GalleryConfig, opts: &RunOptions) -> Result<Report, CliError> {
    let jobs = prepare(cfg, opts)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers.max(1))
        .build()
        .map_err(|e| cfg_err(format!("cannot start worker pool: {e}")))?;
    let cases: Vec<CaseReport> = pool.install(|| jobs.par_iter().map(|j| run_job(j, opts.meta)).collect());
    let summary = summarize(&cases);
    let meta = opts.meta.then(|| Meta {
        tool: "curvlab",
        version: env!("CARGO_PKG_VERSION"),
        unix_time: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        workers: opts.workers.max(1),
        seed: opts.seed,
    });
    Ok(Report { meta, cases, summary })
}

/// Classification of the first point of the named case.
pub fn classify_case(cfg: &GalleryConfig, name: &str, opts: &RunOptions) -> Result<ClassificationReport, CliError> {
    let jobs = prepare(cfg, opts)?;
    let job = jobs
        .iter()
        .find(|j| j.case.name == name)
        .ok_or_else(|| cfg_err(format!("no case named `{name}`")))?;
    let (pkg, _) = package_of(&job.what).map_err(|e| cfg_err(format!("case `{name}`: {e}")))?;
    Ok(classify(&pkg, &job.tol))
}

/// Pretty JSON with every float written to 17 significant digits.
struct SigFig(PrettyFormatter<'static>);

macro_rules! delegate {
    ($($name:ident $(, $arg:ident : $ty:ty)*;)*) => {
        $(
            fn $name<W: ?Sized + Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
                self.0.$name(w $(, $arg)*)
            }
        )*
    };
}

impl Formatter for SigFig {
    delegate! {
        begin_array;
        end_array;
        begin_array_value, first: bool;
        end_array_value;
        begin_object;
        end_object;
        begin_object_key, first: bool;
        begin_object_value;
        end_object_value;
    }

    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        if v.is_finite() {
            write!(w, "{v:.16e}")
        } else {
            w.write_all(b"null")
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("report is serializable");
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigFig(PrettyFormatter::new()));
    v.serialize(&mut ser).expect("writing to memory");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

fn fmt_num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        String::new()
    }
}

/// One row per residual and constant.
pub fn to_csv(report: &Report) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io_err = |e: csv::Error| CliError::Io(io::Error::other(e));
    w.write_record(["case", "status", "audit", "premise", "passed", "kind", "key", "value"]).map_err(io_err)?;
    for c in &report.cases {
        let status = serde_json::to_value(c.status).expect("enum");
        let status = status.as_str().unwrap_or_default();
        if c.audits.is_empty() {
            w.write_record([c.name.as_str(), status, "", "", "", "", "", ""]).map_err(io_err)?;
        }
        for a in &c.audits {
            let passed = if a.passed { "true" } else { "false" };
            let rows = a
                .residuals
                .iter()
                .map(|(k, v)| ("residual", k, v))
                .chain(a.constants.iter().map(|(k, v)| ("constant", k, v)));
            let mut any = false;
            for (kind, k, v) in rows {
                any = true;
                w.write_record([&c.name, status, &a.name, a.premise.as_str(), passed, kind, k, &fmt_num(*v)])
                    .map_err(io_err)?;
            }
            if !any {
                w.write_record([&c.name, status, &a.name, a.premise.as_str(), passed, "", "", ""]).map_err(io_err)?;
            }
        }
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("CSV is UTF-8"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_gallery_parses() {
        let cfg = parse_config(DEFAULT_GALLERY).unwrap();
        assert!(cfg.cases.len() >= 60);
        assert!(prepare(&cfg, &RunOptions::default()).is_ok());
    }

    #[test]
    fn floats_use_seventeen_digits() {
        let s = to_json(&serde_json::json!({"x": 0.1, "y": f64::NAN, "n": 3}));
        assert!(s.contains("1.0000000000000001e-1"), "{s}");
        assert!(s.contains("\"y\": null") && s.contains("\"n\": 3"));
    }

    #[test]
    fn rejects_unknown_check_and_duplicates() {
        let bad = r#"{"cases":[{"name":"a","source":{"type":"algebraic","seed":1,"n":4},"checks":["nope"]}]}"#;
        assert!(matches!(prepare(&parse_config(bad).unwrap(), &RunOptions::default()), Err(CliError::Config(_))));
        let dup = r#"{"cases":[{"name":"a","source":{"type":"algebraic","seed":1,"n":4}},
                               {"name":"a","source":{"type":"algebraic","seed":2,"n":4}}]}"#;
        assert!(prepare(&parse_config(dup).unwrap(), &RunOptions::default()).is_err());
        let kind = r#"{"cases":[{"name":"a","source":{"type":"chart","kind":"torus","points":[[0]]}}]}"#;
        assert!(prepare(&parse_config(kind).unwrap(), &RunOptions::default()).is_err());
    }

    #[test]
    fn shape_specs_agree() {
        let a = shape_from(&ShapeSpec::Eigenvalues { eigenvalues: vec![(1.0, 2), (0.0, 1)] }).unwrap();
        let b = shape_from(&ShapeSpec::Diagonal { diag: vec![1.0, 1.0, 0.0] }).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn tolerance_overrides_take_precedence() {
        let o = TolOverrides { exact: Some(1e-6), ..Default::default() };
        let t = o.apply(Tolerances::default().with_exact(1e-4));
        assert_eq!(t.exact, 1e-6);
        assert_eq!(t.premise, 1e-5);
    }
}
