//! Configuration, dispatch and report writing for the `almost-conv` binary.
//!
//! Every analysis is a direct call into the `almost_conv` library; this crate
//! only resolves inputs and schedules, serializes results and maps errors to
//! exit codes.

use std::fs;
use std::path::{Path, PathBuf};

use almost_conv::cyclic::{cyclic_suite, DEFAULT_TOL};
use almost_conv::io::{read_signal_file, signal_csv_string, write_atomic};
use almost_conv::spectral::default_delta_schedule;
use almost_conv::tauberian::{
    abel_sweep, chain_report, default_abel_schedule, default_laplace_schedule, fatou_check, hardy_littlewood_continuous,
    hardy_littlewood_discrete, laplace_sweep, primitive_oac_check, residue_oac_estimate, ChainConfig, MeanSweep,
};
use almost_conv::{
    ac_verdict, cesaro_sweep, default_schedule, dft_spectrum, render_continuous, render_discrete, spectral_ac_verdict,
    spectrum_support_check, AnySignal, Complex64, ContinuousSignal, DiscreteSignal, Error, GeneratorSpec, Sampled,
    Sidedness, Taper, WindowSchedule,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Version of the JSON report layout.
pub const SCHEMA: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("{0}")]
    Analysis(Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Hypothesis(_) => 2,
            _ => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::HypothesisViolated(m) => CliError::Hypothesis(m),
            Error::Parse(m) => CliError::Config(m),
            other => CliError::Analysis(other),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Analysis {
    #[default]
    Cesaro,
    Spectral,
    Spectrum,
    Tauber,
    Chain,
    CyclicSuite,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TauberMethod {
    #[default]
    Abel,
    Laplace,
    HardyLittlewood,
    Residue,
    Fatou,
    Primitive,
}

/// Sampling range for generator inputs: integer range or uniform grid.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderRange {
    pub n_min: Option<i64>,
    pub n_max: Option<i64>,
    pub x0: Option<f64>,
    pub step: Option<f64>,
    pub count: Option<usize>,
}

/// Geometric window schedule; lengths are in the units of the signal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub k_min: f64,
    pub k_max: f64,
    #[serde(default = "default_growth")]
    pub growth: f64,
    #[serde(default)]
    pub sidedness: Sidedness,
}

fn default_growth() -> f64 {
    2.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauberConfig {
    #[serde(default)]
    pub method: TauberMethod,
    /// Coefficient bound; defaults to the sup of the data.
    pub bound: Option<f64>,
    /// Lower bound `C` with data `>= -C` (Hardy-Littlewood, primitive).
    pub lower: Option<f64>,
    #[serde(default = "default_eps_tail")]
    pub eps_tail: f64,
    /// Declared value `f(1)` (Fatou) or `L psi(0)` (primitive).
    pub target: Option<Complex64>,
}

fn default_eps_tail() -> f64 {
    1e-12
}

impl Default for TauberConfig {
    fn default() -> Self {
        TauberConfig {
            method: TauberMethod::Abel,
            bound: None,
            lower: None,
            eps_tail: default_eps_tail(),
            target: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Generator JSON or samples CSV (decided by the `.csv` extension).
    pub input: Option<PathBuf>,
    /// Inline generator, used when `input` is absent.
    pub spec: Option<GeneratorSpec>,
    #[serde(default)]
    pub range: RenderRange,
    #[serde(default)]
    pub analysis: Analysis,
    pub schedule: Option<ScheduleConfig>,
    /// Gap half-widths for the spectral route, decreasing.
    pub deltas: Option<Vec<f64>>,
    /// Abel radii (increasing to 1) or Laplace abscissas (decreasing to 0).
    pub x_schedule: Option<Vec<f64>>,
    /// Verdict tolerance; 1e-2 for signal analyses, 1e-9 for the cyclic
    /// suite when absent.
    pub tol: Option<f64>,
    #[serde(default)]
    pub seed: u64,
    /// Group order and case count for the cyclic suite.
    pub n: Option<usize>,
    pub cases: Option<usize>,
    #[serde(default)]
    pub taper: Taper,
    pub mask_threshold: Option<f64>,
    #[serde(default)]
    pub tauber: TauberConfig,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            input: None,
            spec: None,
            range: RenderRange::default(),
            analysis: Analysis::default(),
            schedule: None,
            deltas: None,
            x_schedule: None,
            tol: None,
            seed: 0,
            n: None,
            cases: None,
            taper: Taper::default(),
            mask_threshold: None,
            tauber: TauberConfig::default(),
        }
    }
}

impl AnalysisConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("bad config JSON: {e}")))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn tol(&self) -> f64 {
        self.tol.unwrap_or(if self.analysis == Analysis::CyclicSuite { DEFAULT_TOL } else { 1e-2 })
    }

    pub fn validate(&self) -> CliResult<()> {
        if !(self.tol() > 0.0) {
            return Err(CliError::Config("tol must be positive".into()));
        }
        if let Some(s) = &self.schedule {
            if !(s.k_min > 0.0 && s.k_min < s.k_max) {
                return Err(CliError::Config("schedule needs 0 < k_min < k_max".into()));
            }
            if !(s.growth > 1.0) {
                return Err(CliError::Config("schedule growth must exceed 1".into()));
            }
        }
        Ok(())
    }
}

/// Parse a generator from JSON text.
pub fn parse_spec(text: &str) -> CliResult<GeneratorSpec> {
    serde_json::from_str(text).map_err(|e| CliError::Config(format!("bad generator JSON: {e}")))
}

pub fn load_spec(path: &Path) -> CliResult<GeneratorSpec> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_spec(&text)
}

/// Render `spec` over `range`: a grid when `step` is given, integers
/// otherwise (default `[0, 2^14]`).
pub fn render(spec: &GeneratorSpec, range: &RenderRange) -> CliResult<AnySignal> {
    if let Some(step) = range.step {
        let count = range.count.ok_or_else(|| CliError::Config("grid rendering needs count".into()))?;
        Ok(render_continuous(spec, range.x0.unwrap_or(0.0), step, count)?.into())
    } else {
        let n_min = range.n_min.unwrap_or(0);
        let n_max = range.n_max.unwrap_or(1 << 14);
        Ok(render_discrete(spec, n_min, n_max)?.into())
    }
}

/// The signal under analysis and, for generator inputs, its recipe.
pub fn resolve_input(config: &AnalysisConfig) -> CliResult<(AnySignal, Option<GeneratorSpec>)> {
    match (&config.input, &config.spec) {
        (Some(path), _) if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) => {
            let s = read_signal_file(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            Ok((s, None))
        }
        (Some(path), _) => {
            let spec = load_spec(path)?;
            Ok((render(&spec, &config.range)?, Some(spec)))
        }
        (None, Some(spec)) => Ok((render(spec, &config.range)?, Some(spec.clone()))),
        (None, None) => Err(CliError::Config("no input: give an input path or an inline spec".into())),
    }
}

/// Files produced by one run, relative to the output directory.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub report: Value,
    pub curves: Vec<(String, String)>,
}

fn schedule_for<S: Sampled>(signal: &S, config: &AnalysisConfig) -> CliResult<WindowSchedule> {
    match &config.schedule {
        Some(s) => {
            let integral = signal.lattice().is_discrete();
            Ok(WindowSchedule::geometric(s.k_min, s.k_max, s.growth, s.sidedness, integral)?)
        }
        None => Ok(default_schedule(signal)?),
    }
}

fn cesaro<S: Sampled>(signal: &S, config: &AnalysisConfig) -> CliResult<RunOutput> {
    let schedule = schedule_for(signal, config)?;
    let sweep = cesaro_sweep(signal, &schedule, signal.lattice().step())?;
    let verdict = ac_verdict(&sweep, config.tol());
    Ok(RunOutput {
        curves: vec![("sweep.csv".into(), sweep.to_csv()?)],
        report: json!({ "verdict": verdict, "sweep": sweep }),
    })
}

fn spectral<S: Sampled>(signal: &S, config: &AnalysisConfig) -> CliResult<RunOutput> {
    let deltas = config.deltas.clone().unwrap_or_else(|| default_delta_schedule(signal));
    let verdict = spectral_ac_verdict(signal, &deltas, config.tol())?;
    Ok(RunOutput {
        curves: vec![],
        report: json!({ "verdict": verdict, "deltas": deltas }),
    })
}

fn spectrum<S: Sampled>(signal: &S, spec: Option<&GeneratorSpec>, config: &AnalysisConfig) -> CliResult<RunOutput> {
    let est = dft_spectrum(signal, config.taper, config.mask_threshold)?;
    let support = spec.map(|g| spectrum_support_check(g, &est, config.tol()));
    Ok(RunOutput {
        curves: vec![("spectrum.csv".into(), est.to_csv()?)],
        report: json!({
            "window_len": est.window_len,
            "step": est.step,
            "taper": est.taper,
            "mask_threshold": est.mask_threshold,
            "parseval_rel_error": est.parseval_rel_error,
            "masked_freqs": est.masked_freqs().collect::<Vec<_>>(),
            "support": support,
        }),
    })
}

fn coefficients(signal: &DiscreteSignal) -> CliResult<&[Complex64]> {
    if signal.n_min() != 0 {
        return Err(CliError::Config("coefficient streams must start at index 0".into()));
    }
    Ok(signal.values())
}

fn sweep_curve(sweep: &MeanSweep) -> CliResult<Vec<(String, String)>> {
    Ok(vec![("sweep.csv".into(), sweep.to_csv()?)])
}

fn tauber_discrete(signal: &DiscreteSignal, config: &AnalysisConfig) -> CliResult<RunOutput> {
    let t = &config.tauber;
    let coeffs = coefficients(signal)?;
    let bound = t.bound.unwrap_or_else(|| signal.bound());
    let xs = match &config.x_schedule {
        Some(x) => x.clone(),
        None => default_abel_schedule(coeffs.len(), bound, t.eps_tail)?,
    };
    let need_lower = || t.lower.ok_or_else(|| CliError::Config("this method needs tauber.lower".into()));
    let need_target = || t.target.ok_or_else(|| CliError::Config("this method needs tauber.target".into()));
    Ok(match t.method {
        TauberMethod::Abel => {
            let sweep = abel_sweep(coeffs, bound, &xs, t.eps_tail)?;
            RunOutput { curves: sweep_curve(&sweep)?, report: json!({ "sweep": sweep }) }
        }
        TauberMethod::HardyLittlewood => {
            let r = hardy_littlewood_discrete(coeffs, bound, need_lower()?, &xs, t.eps_tail, config.tol())?;
            RunOutput { curves: sweep_curve(&r.sweep)?, report: serde_json::to_value(&r).expect("serializable") }
        }
        TauberMethod::Residue => {
            let r = residue_oac_estimate(coeffs, bound, &xs, t.eps_tail, config.tol())?;
            RunOutput { curves: sweep_curve(&r.sweep)?, report: serde_json::to_value(&r).expect("serializable") }
        }
        TauberMethod::Fatou => {
            let r = fatou_check(coeffs, need_target()?, config.tol())?;
            RunOutput { curves: vec![], report: serde_json::to_value(&r).expect("serializable") }
        }
        TauberMethod::Laplace | TauberMethod::Primitive => {
            return Err(CliError::Config("Laplace and primitive checks need a sampled function on a grid".into()))
        }
    })
}

fn tauber_continuous(signal: &ContinuousSignal, config: &AnalysisConfig) -> CliResult<RunOutput> {
    let t = &config.tauber;
    let xs = || match &config.x_schedule {
        Some(x) => Ok(x.clone()),
        None => default_laplace_schedule(signal, t.eps_tail),
    };
    Ok(match t.method {
        TauberMethod::Laplace => {
            let sweep = laplace_sweep(signal, &xs()?, t.eps_tail)?;
            RunOutput { curves: sweep_curve(&sweep)?, report: json!({ "sweep": sweep }) }
        }
        TauberMethod::HardyLittlewood => {
            let lower = t.lower.ok_or_else(|| CliError::Config("this method needs tauber.lower".into()))?;
            let r = hardy_littlewood_continuous(signal, lower, &xs()?, t.eps_tail, config.tol())?;
            RunOutput { curves: sweep_curve(&r.sweep)?, report: serde_json::to_value(&r).expect("serializable") }
        }
        TauberMethod::Primitive => {
            let target = t.target.ok_or_else(|| CliError::Config("this method needs tauber.target".into()))?;
            let r = primitive_oac_check(signal, target, config.tol(), t.lower)?;
            RunOutput { curves: vec![], report: serde_json::to_value(&r).expect("serializable") }
        }
        _ => return Err(CliError::Config("Abel, residue and Fatou checks need a coefficient stream".into())),
    })
}

fn chain<S: Sampled>(signal: &S, config: &AnalysisConfig) -> CliResult<RunOutput> {
    let cc = ChainConfig {
        tol: config.tol(),
        schedule: match &config.schedule {
            Some(_) => Some(schedule_for(signal, config)?),
            None => None,
        },
        ..ChainConfig::default()
    };
    let r = chain_report(signal, &cc)?;
    Ok(RunOutput { curves: vec![], report: serde_json::to_value(&r).expect("serializable") })
}

/// Run the configured analysis without touching the file system (apart from
/// reading inputs).
pub fn execute(config: &AnalysisConfig) -> CliResult<RunOutput> {
    config.validate()?;
    if config.analysis == Analysis::CyclicSuite {
        let n = config.n.unwrap_or(64);
        let cases = config.cases.unwrap_or(100);
        let r = cyclic_suite(n, cases, config.seed, config.tol())?;
        return Ok(RunOutput { curves: vec![], report: serde_json::to_value(&r).expect("serializable") });
    }
    let (signal, spec) = resolve_input(config)?;
    match (&signal, config.analysis) {
        (AnySignal::Discrete(s), Analysis::Cesaro) => cesaro(s, config),
        (AnySignal::Continuous(s), Analysis::Cesaro) => cesaro(s, config),
        (AnySignal::Discrete(s), Analysis::Spectral) => spectral(s, config),
        (AnySignal::Continuous(s), Analysis::Spectral) => spectral(s, config),
        (AnySignal::Discrete(s), Analysis::Spectrum) => spectrum(s, spec.as_ref(), config),
        (AnySignal::Continuous(s), Analysis::Spectrum) => spectrum(s, spec.as_ref(), config),
        (AnySignal::Discrete(s), Analysis::Tauber) => tauber_discrete(s, config),
        (AnySignal::Continuous(s), Analysis::Tauber) => tauber_continuous(s, config),
        (AnySignal::Discrete(s), Analysis::Chain) => chain(s, config),
        (AnySignal::Continuous(s), Analysis::Chain) => chain(s, config),
        (_, Analysis::CyclicSuite) => unreachable!("handled above"),
    }
}

/// Full report document: schema version, analysis kind and result.
pub fn report_document(config: &AnalysisConfig, output: &RunOutput) -> Value {
    json!({
        "schema": SCHEMA,
        "analysis": config.analysis,
        "config": config,
        "result": output.report,
    })
}

/// Execute and write `report.json` plus any CSV curves into `out_dir`.
pub fn run(config: &AnalysisConfig, out_dir: &Path) -> CliResult<Vec<PathBuf>> {
    let output = execute(config)?;
    let doc = report_document(config, &output);
    let mut text = serde_json::to_string_pretty(&doc).expect("serializable");
    text.push('\n');
    let mut written = Vec::new();
    let report = out_dir.join("report.json");
    write_atomic(&report, text.as_bytes())?;
    written.push(report);
    for (name, body) in &output.curves {
        let path = out_dir.join(name);
        write_atomic(&path, body.as_bytes())?;
        written.push(path);
    }
    Ok(written)
}

/// Render a generator to CSV at `out`; nothing is written on error.
pub fn generate(spec: &GeneratorSpec, range: &RenderRange, out: &Path) -> CliResult<()> {
    let signal = render(spec, range)?;
    write_atomic(out, signal_csv_string(&signal)?.as_bytes())?;
    Ok(())
}
