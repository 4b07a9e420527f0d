//! Run configuration and command dispatch behind the `regcomply` binary.
//!
//! Commands are described by a [`RunConfig`] (parseable from a single JSON
//! document; CLI flags overlay file values). Results are emitted as JSON
//! (canonical; floats carry 15 significant digits) or as a flat CSV
//! projection for plotting, written atomically (temp file + rename). Every
//! report echoes the full effective configuration, the crate version, and
//! the seed, so runs can be reproduced from their output alone.

use std::io::Write as IoWrite;
use std::path::Path;
use std::sync::atomic::{AtomicBool, Ordering};

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    compliance_nonuniform_3d, compliance_uniform_3d, descent_cone_area_3d, published_cone_area_3d,
};
use crate::model::{SparsityModel, WeightVector};
use crate::oracle::{
    brute_b_sigma, brute_d_sigma, brute_cone_area_3d, brute_gamma_projector, GridSpec,
};
use crate::rip::{
    b_flat_l1, b_sigma, d_flat_l1, delta_suff, ext_real, gamma_projector, gamma_sigma, Method,
};
use crate::sampler::{mc_compliance, substream_seed, McMode};
use crate::search::{
    optimality_certificate, optimize_weights, CertificateReport, MeasureKind, OptimizationTrace,
    SearchConfig, WEIGHT_FLOOR,
};

/// Subcommands of the tool.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Measure3d,
    Mc,
    RipNec,
    RipSuff,
    Optimize,
    Certify,
    Oracle,
    Curves,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Weight specification: an explicit list, `"ones"`, or
/// `"random:COUNT:SEED"` for a batch of random normalized weight vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WeightsSpec {
    List(Vec<f64>),
    Text(String),
}

impl WeightsSpec {
    /// Parse the CLI form: `ones`, `random:COUNT:SEED`, or a comma list.
    pub fn parse_cli(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "ones" || s.starts_with("random:") {
            return Ok(WeightsSpec::Text(s.to_string()));
        }
        let vals: Result<Vec<f64>> = s
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("invalid weight entry '{tok}'")))
            })
            .collect();
        Ok(WeightsSpec::List(vals?))
    }

    pub fn resolve(&self, n: usize) -> Result<Vec<WeightVector>> {
        match self {
            WeightsSpec::List(vals) => {
                if vals.len() != n {
                    return Err(Error::Config(format!(
                        "weights have {} entries but n = {n}",
                        vals.len()
                    )));
                }
                Ok(vec![WeightVector::normalized(vals)?])
            }
            WeightsSpec::Text(s) if s == "ones" => Ok(vec![WeightVector::ones(n)?]),
            WeightsSpec::Text(s) => {
                let parts: Vec<&str> = s.split(':').collect();
                if parts.len() != 3 || parts[0] != "random" {
                    return Err(Error::Config(format!(
                        "weights must be a list, 'ones', or 'random:COUNT:SEED'; got '{s}'"
                    )));
                }
                let count: usize = parts[1]
                    .parse()
                    .map_err(|_| Error::Config(format!("invalid count in '{s}'")))?;
                let seed: u64 = parts[2]
                    .parse()
                    .map_err(|_| Error::Config(format!("invalid seed in '{s}'")))?;
                if count < 1 {
                    return Err(Error::Config("random weight count must be >= 1".into()));
                }
                let mut out = Vec::with_capacity(count);
                for i in 0..count {
                    let mut rng =
                        ChaCha8Rng::seed_from_u64(substream_seed(seed, 0x77E1, i as u64));
                    let raw: Vec<f64> =
                        (0..n).map(|_| rng.random_range(WEIGHT_FLOOR..=1.0)).collect();
                    out.push(WeightVector::normalized(&raw)?);
                }
                Ok(out)
            }
        }
    }
}

/// A full run description; all optional fields fall back to documented
/// defaults when the command needs them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightsSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<McMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
}

impl RunConfig {
    pub fn new(command: CommandKind) -> Self {
        RunConfig {
            command,
            n: None,
            k: None,
            weights: None,
            measure: None,
            mode: None,
            samples: None,
            seed: None,
            trials: None,
            l_max: None,
            search: None,
            output: None,
            format: None,
        }
    }

    pub fn from_json(bytes: &[u8]) -> Result<Self> {
        serde_json::from_slice(bytes).map_err(|e| Error::Config(format!("config parse: {e}")))
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn samples(&self) -> u64 {
        self.samples.unwrap_or(1_000_000)
    }

    fn model(&self) -> Result<SparsityModel> {
        let n = self
            .n
            .ok_or_else(|| Error::Config("missing field: n".into()))?;
        let k = self
            .k
            .ok_or_else(|| Error::Config("missing field: k".into()))?;
        SparsityModel::new(n, k).map_err(|e| Error::Config(e.to_string()))
    }

    fn weight_vectors(&self, n: usize) -> Result<Vec<WeightVector>> {
        match &self.weights {
            Some(spec) => spec.resolve(n),
            None => Ok(vec![WeightVector::ones(n)
                .map_err(|e| Error::Config(e.to_string()))?]),
        }
    }

    fn effective_search(&self) -> SearchConfig {
        self.search.unwrap_or(SearchConfig {
            seed: self.seed(),
            mc_samples: self.samples(),
            ..Default::default()
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measure3dResult {
    pub weights: Vec<f64>,
    /// Exact per-axis descent-cone areas (steradians).
    pub areas: Vec<f64>,
    /// Largest per-axis area; the quantity the non-uniform measure sees.
    pub area: f64,
    pub published_areas: Vec<f64>,
    /// Published closed form at the same worst axis, for comparison.
    pub published_formula_area: f64,
    /// |area - published_formula_area| in steradians.
    pub published_deviation: f64,
    pub u: f64,
    pub nu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub weights: Vec<f64>,
    pub mode: McMode,
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RipNecResult {
    pub weights: Vec<f64>,
    pub b: f64,
    #[serde(with = "ext_real")]
    pub gamma: f64,
    pub delta: f64,
    pub witness: Option<Vec<f64>>,
    pub method: Method,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RipSuffResult {
    pub weights: Vec<f64>,
    pub d: f64,
    pub delta: f64,
    pub witness: Option<Vec<f64>>,
    pub method: Method,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub weights: Vec<f64>,
    pub b_search: f64,
    pub b_oracle: f64,
    pub b_rel_gap: f64,
    pub d_search: f64,
    pub d_oracle: f64,
    pub d_rel_gap: f64,
    /// Largest relative disagreement between the top-2k closed form for the
    /// restricted conditioning and its eigen-analysis oracle, over random z.
    pub gamma_identity_max_error: f64,
    /// Monte Carlo vs closed-form cone area at axis 0, in standard errors
    /// (n = 3 only).
    pub cone_area_sigma_distance: Option<f64>,
    pub points_evaluated: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub l: usize,
    pub b_l: f64,
    pub d_l: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum CommandOutput {
    Measure3d { results: Vec<Measure3dResult> },
    Mc { results: Vec<McResult> },
    RipNec { results: Vec<RipNecResult> },
    RipSuff { results: Vec<RipSuffResult> },
    Optimize { trace: OptimizationTrace },
    Certify { report: CertificateReport },
    Oracle { results: Vec<OracleResult> },
    Curves { k: usize, rows: Vec<CurveRow> },
}

/// Everything a run emits: version, timestamp, the effective configuration,
/// and the command output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    pub timestamp: u64,
    pub seed: u64,
    pub config: RunConfig,
    pub results: CommandOutput,
}

static THREAD_POOL_INIT: AtomicBool = AtomicBool::new(false);

/// Cap the rayon worker count from `REGCOMPLY_THREADS` (first call wins;
/// default is machine parallelism). Determinism never depends on this.
pub fn init_thread_pool_from_env() {
    if THREAD_POOL_INIT.swap(true, Ordering::SeqCst) {
        return;
    }
    if let Ok(s) = std::env::var("REGCOMPLY_THREADS") {
        if let Ok(t) = s.parse::<usize>() {
            if t >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
            }
        }
    }
}

/// Execute a run configuration and collect the report.
pub fn run(config: &RunConfig) -> Result<RunReport> {
    init_thread_pool_from_env();
    let results = dispatch(config)?;
    Ok(RunReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp: std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        seed: config.seed(),
        config: config.clone(),
        results,
    })
}

fn dispatch(config: &RunConfig) -> Result<CommandOutput> {
    match config.command {
        CommandKind::Measure3d => {
            if config.n.unwrap_or(3) != 3 || config.k.unwrap_or(1) != 1 {
                return Err(Error::Config(
                    "measure3d is the exact 1-sparse computation in R^3 (n = 3, k = 1)".into(),
                ));
            }
            let mut results = Vec::new();
            for w in config.weight_vectors(3)? {
                let areas: Vec<f64> = (0..3)
                    .map(|axis| descent_cone_area_3d(&w, axis, 1).map(|a| a.steradians()))
                    .collect::<Result<_>>()?;
                let published: Vec<f64> = (0..3)
                    .map(|axis| published_cone_area_3d(&w, axis).map(|a| a.steradians()))
                    .collect::<Result<_>>()?;
                let worst = (0..3)
                    .max_by(|&a, &b| areas[a].partial_cmp(&areas[b]).unwrap())
                    .unwrap();
                results.push(Measure3dResult {
                    weights: w.as_slice().to_vec(),
                    area: areas[worst],
                    published_formula_area: published[worst],
                    published_deviation: (areas[worst] - published[worst]).abs(),
                    areas,
                    published_areas: published,
                    u: compliance_uniform_3d(&w)?,
                    nu: compliance_nonuniform_3d(&w)?,
                });
            }
            Ok(CommandOutput::Measure3d { results })
        }
        CommandKind::Mc => {
            let model = config.model()?;
            let mode = config.mode.unwrap_or(McMode::U);
            let mut results = Vec::new();
            for w in config.weight_vectors(model.n)? {
                let est = mc_compliance(&w, &model, mode, config.samples(), config.seed())?;
                results.push(McResult {
                    weights: w.as_slice().to_vec(),
                    mode,
                    estimate: est.estimate,
                    std_error: est.std_error,
                    samples: est.samples,
                    seed: est.seed,
                });
            }
            Ok(CommandOutput::Mc { results })
        }
        CommandKind::RipNec => {
            let model = config.model()?;
            let search = config.effective_search();
            let mut results = Vec::new();
            for w in config.weight_vectors(model.n)? {
                let nec = gamma_sigma(&w, &model, &search)?;
                results.push(RipNecResult {
                    weights: w.as_slice().to_vec(),
                    b: nec.b.value,
                    gamma: nec.gamma.value,
                    delta: nec.delta.value,
                    witness: nec.b.witness,
                    method: nec.b.method,
                    certified: nec.b.certified,
                });
            }
            Ok(CommandOutput::RipNec { results })
        }
        CommandKind::RipSuff => {
            let model = config.model()?;
            let search = config.effective_search();
            let mut results = Vec::new();
            for w in config.weight_vectors(model.n)? {
                let suff = delta_suff(&w, &model, &search)?;
                results.push(RipSuffResult {
                    weights: w.as_slice().to_vec(),
                    d: suff.d.value,
                    delta: suff.delta.value,
                    witness: suff.d.witness,
                    method: suff.d.method,
                    certified: suff.d.certified,
                });
            }
            Ok(CommandOutput::RipSuff { results })
        }
        CommandKind::Optimize => {
            let model = config.model()?;
            let measure = config
                .measure
                .ok_or_else(|| Error::Config("missing field: measure".into()))?;
            let trace = optimize_weights(measure, &model, &config.effective_search())?;
            Ok(CommandOutput::Optimize { trace })
        }
        CommandKind::Certify => {
            let model = config.model()?;
            let measure = config
                .measure
                .ok_or_else(|| Error::Config("missing field: measure".into()))?;
            let candidates = config.weight_vectors(model.n)?;
            if candidates.len() != 1 {
                return Err(Error::Config(
                    "certify needs exactly one candidate weight vector".into(),
                ));
            }
            let report = optimality_certificate(
                measure,
                &candidates[0],
                &model,
                config.trials.unwrap_or(200),
                config.seed(),
            )?;
            Ok(CommandOutput::Certify { report })
        }
        CommandKind::Oracle => {
            let model = config.model()?;
            let search = config.effective_search();
            let grid = GridSpec::default();
            let mut results = Vec::new();
            for w in config.weight_vectors(model.n)? {
                let b_report = b_sigma(&w, &model, &search)?;
                let b_brute = brute_b_sigma(&w, &model, &grid)?;
                let d_report = delta_suff(&w, &model, &search)?;
                let d_brute = brute_d_sigma(&w, &model, &grid)?;
                let rel_gap = |a: f64, o: f64| (a - o).abs() / o.max(1e-9);

                let mut gamma_err = 0.0f64;
                for i in 0..5u64 {
                    let mut rng = ChaCha8Rng::seed_from_u64(substream_seed(
                        config.seed(),
                        0x6A77A,
                        i,
                    ));
                    let z: Vec<f64> =
                        (0..model.n).map(|_| rng.random_range(-1.0..1.0)).collect();
                    let closed = gamma_projector(&z, &model)?;
                    let brute = brute_gamma_projector(&z, &model)?;
                    if closed.is_finite() && brute.is_finite() {
                        gamma_err = gamma_err.max((closed - brute).abs() / closed);
                    } else if closed.is_finite() != brute.is_finite() {
                        gamma_err = f64::INFINITY;
                    }
                }

                let cone_area_sigma_distance = if model.n == 3 {
                    let mc =
                        brute_cone_area_3d(&w, 0, 1, config.samples().min(1_000_000), config.seed())?;
                    let exact = descent_cone_area_3d(&w, 0, 1)?.steradians();
                    Some((mc.steradians - exact).abs() / mc.std_error)
                } else {
                    None
                };

                results.push(OracleResult {
                    weights: w.as_slice().to_vec(),
                    b_search: b_report.value,
                    b_oracle: b_brute.value,
                    b_rel_gap: rel_gap(b_report.value, b_brute.value),
                    d_search: d_report.d.value,
                    d_oracle: d_brute.value,
                    d_rel_gap: rel_gap(d_report.d.value, d_brute.value),
                    gamma_identity_max_error: gamma_err,
                    cone_area_sigma_distance,
                    points_evaluated: b_brute.points_evaluated + d_brute.points_evaluated,
                });
            }
            Ok(CommandOutput::Oracle { results })
        }
        CommandKind::Curves => {
            let k = config
                .k
                .ok_or_else(|| Error::Config("missing field: k".into()))?;
            if k < 1 {
                return Err(Error::Config("k must be >= 1".into()));
            }
            let l_max = config.l_max.unwrap_or(10);
            let rows = (1..=l_max)
                .map(|l| CurveRow {
                    l,
                    b_l: b_flat_l1(l, k),
                    d_l: d_flat_l1(l, k),
                })
                .collect();
            Ok(CommandOutput::Curves { k, rows })
        }
    }
}

/// Format a float with 15 significant digits (fixed notation in a sane
/// magnitude window, scientific outside it).
pub(crate) fn fmt_f64(v: f64) -> String {
    if v == 0.0 {
        return "0.0".to_string();
    }
    let a = v.abs();
    if (1e-4..1e15).contains(&a) {
        let exponent = a.log10().floor() as i32;
        let prec = (14 - exponent).max(0) as usize;
        format!("{v:.prec$}")
    } else {
        format!("{v:.14e}")
    }
}

struct SigDigitFormatter;

impl serde_json::ser::Formatter for SigDigitFormatter {
    fn write_f64<W: ?Sized + std::io::Write>(
        &mut self,
        writer: &mut W,
        value: f64,
    ) -> std::io::Result<()> {
        if value.is_finite() {
            writer.write_all(fmt_f64(value).as_bytes())
        } else {
            writer.write_all(b"null")
        }
    }
}

/// Canonical JSON bytes (compact, 15 significant digits on floats, trailing
/// newline).
pub fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigDigitFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Io(format!("serialize: {e}")))?;
    out.push(b'\n');
    Ok(out)
}

fn csv_row(fields: &[String]) -> String {
    fields.join(",")
}

fn weights_cell(w: &[f64]) -> String {
    w.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(";")
}

/// Flat CSV projection of a report (for plotting).
pub fn to_csv(report: &RunReport) -> Result<String> {
    let mut lines = Vec::new();
    match &report.results {
        CommandOutput::Measure3d { results } => {
            lines.push("weights,area,published_formula_area,u,nu".to_string());
            for r in results {
                lines.push(csv_row(&[
                    weights_cell(&r.weights),
                    fmt_f64(r.area),
                    fmt_f64(r.published_formula_area),
                    fmt_f64(r.u),
                    fmt_f64(r.nu),
                ]));
            }
        }
        CommandOutput::Mc { results } => {
            lines.push("weights,mode,estimate,std_error,samples,seed".to_string());
            for r in results {
                lines.push(csv_row(&[
                    weights_cell(&r.weights),
                    match r.mode {
                        McMode::U => "u".into(),
                        McMode::Nu => "nu".into(),
                    },
                    fmt_f64(r.estimate),
                    fmt_f64(r.std_error),
                    r.samples.to_string(),
                    r.seed.to_string(),
                ]));
            }
        }
        CommandOutput::RipNec { results } => {
            lines.push("weights,b,gamma,delta,certified".to_string());
            for r in results {
                lines.push(csv_row(&[
                    weights_cell(&r.weights),
                    fmt_f64(r.b),
                    if r.gamma.is_finite() {
                        fmt_f64(r.gamma)
                    } else {
                        "inf".into()
                    },
                    fmt_f64(r.delta),
                    r.certified.to_string(),
                ]));
            }
        }
        CommandOutput::RipSuff { results } => {
            lines.push("weights,d,delta,certified".to_string());
            for r in results {
                lines.push(csv_row(&[
                    weights_cell(&r.weights),
                    fmt_f64(r.d),
                    fmt_f64(r.delta),
                    r.certified.to_string(),
                ]));
            }
        }
        CommandOutput::Optimize { trace } => {
            lines.push("iteration,value,weights".to_string());
            for p in &trace.history {
                lines.push(csv_row(&[
                    p.iteration.to_string(),
                    fmt_f64(p.value),
                    weights_cell(&p.weights),
                ]));
            }
        }
        CommandOutput::Certify { report } => {
            lines.push("trial,margin".to_string());
            for (t, m) in report.margins.iter().enumerate() {
                lines.push(csv_row(&[t.to_string(), fmt_f64(*m)]));
            }
        }
        CommandOutput::Oracle { results } => {
            lines.push(
                "weights,b_search,b_oracle,b_rel_gap,d_search,d_oracle,d_rel_gap".to_string(),
            );
            for r in results {
                lines.push(csv_row(&[
                    weights_cell(&r.weights),
                    fmt_f64(r.b_search),
                    fmt_f64(r.b_oracle),
                    fmt_f64(r.b_rel_gap),
                    fmt_f64(r.d_search),
                    fmt_f64(r.d_oracle),
                    fmt_f64(r.d_rel_gap),
                ]));
            }
        }
        CommandOutput::Curves { rows, .. } => {
            lines.push("l,b_l,d_l".to_string());
            for r in rows {
                lines.push(csv_row(&[
                    r.l.to_string(),
                    fmt_f64(r.b_l),
                    fmt_f64(r.d_l),
                ]));
            }
        }
    }
    lines.push(String::new());
    Ok(lines.join("\n"))
}

/// Render the report in the configured format.
pub fn render(report: &RunReport) -> Result<Vec<u8>> {
    match report.config.format.unwrap_or(OutputFormat::Json) {
        OutputFormat::Json => to_json_bytes(report),
        OutputFormat::Csv => Ok(to_csv(report)?.into_bytes()),
    }
}

/// Write rendered bytes to the configured destination; files are written
/// atomically (temp file in the same directory, then rename).
pub fn write_output(report: &RunReport) -> Result<()> {
    let bytes = render(report)?;
    match &report.config.output {
        None => {
            std::io::stdout().write_all(&bytes)?;
            Ok(())
        }
        Some(path) => write_atomic(Path::new(path), &bytes),
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    std::fs::write(&tmp, bytes)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}
