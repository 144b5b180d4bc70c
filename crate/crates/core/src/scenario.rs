//! Scenario catalog, n-sweep driver and result emission.
//!
//! A [`ScenarioConfig`] is read from flat `key=value` text (keys are the CLI
//! flag names) and then overridden key by key. [`run_scenario`] evaluates
//! every n of the sweep, [`sweep_summary`] turns the results into trends and
//! [`write_scenario`] emits CSV or JSON files, each with a `.meta.json`
//! sidecar echoing the configuration.

use std::borrow::Cow;
use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::concentration::{
    property_suite, spectral_concentration_experiment, truncation_survival_experiment,
    ConcentrationTable, Inequality, PiecewiseLinear, SuiteSummary, SurvivalTable,
};
use crate::conditions::{default_eps_grid, evaluate_conditions, ConditionReport, DEFAULT_DELTA_GRID};
use crate::ensemble::{
    heavy_tail_scale, threshold_sequence, EnsembleSpec, LawFamily, ProfileKind, SymmetryClass,
    VarianceProfile, THRESHOLD_GRID_FLOOR,
};
use crate::error::{io_err, Error, Result};
use crate::gauss::{corollary_lhs, RowSubset, RowSumStudy, RECOMMENDED_RESAMPLES};
use crate::metrics::{
    compensated_sum, kolmogorov_distance, levy_distance, semicircle_density, semicircle_moment,
    Semicircle,
};
use crate::spectra::{esd, pool, sample_spectra, SpectralSample, StepMeasure};
use crate::walks::{
    census, exact_trace_moment, moment_prediction, write_census_csv, CensusRow, ORACLE_MAX_K,
    ORACLE_MAX_N,
};

/// Version string written into every sidecar.
pub const VERSION: &str = concat!("v", env!("CARGO_PKG_VERSION"));

pub const HISTOGRAM_BINS: usize = 200;
pub const HISTOGRAM_RANGE: (f64, f64) = (-3.0, 3.0);
pub const MAX_K: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioName {
    UniformGauss,
    Rademacher,
    Checkerboard,
    Block,
    HeavyTail,
    TruncationPipeline,
    Custom,
}

impl ScenarioName {
    pub const ALL: [ScenarioName; 7] = [
        Self::UniformGauss,
        Self::Rademacher,
        Self::Checkerboard,
        Self::Block,
        Self::HeavyTail,
        Self::TruncationPipeline,
        Self::Custom,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::UniformGauss => "uniform-gauss",
            Self::Rademacher => "rademacher",
            Self::Checkerboard => "checkerboard",
            Self::Block => "block",
            Self::HeavyTail => "heavy-tail",
            Self::TruncationPipeline => "truncation-pipeline",
            Self::Custom => "custom",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            Self::UniformGauss => "Gaussian entries, all variances 1/n",
            Self::Rademacher => "random signs, all variances 1/n",
            Self::Checkerboard => "Gaussian entries of variance 2/n where i+j is even, zero elsewhere",
            Self::Block => "Gaussian 1/n profile with the off-diagonal of the bottom-right block zeroed",
            Self::HeavyTail => "cubic-tail entries scaled so truncated row sums are exactly 1",
            Self::TruncationPipeline => "heavy-tail ensemble before and after truncation and centering",
            Self::Custom => "profile loaded from a CSV file (--profile-file)",
        }
    }

    fn default_family(&self) -> LawFamily {
        match self {
            Self::Rademacher => LawFamily::Rademacher,
            Self::HeavyTail | Self::TruncationPipeline => LawFamily::HeavyTailCubic,
            _ => LawFamily::Gaussian,
        }
    }
}

impl FromStr for ScenarioName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::UnknownName {
                what: "scenario",
                value: s.to_string(),
            })
    }
}

impl fmt::Display for ScenarioName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::UnknownName {
                what: "format",
                value: other.to_string(),
            }),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Csv => "csv",
            Self::Json => "json",
        })
    }
}

/// Everything a run depends on. `out` and `threads` only affect where and
/// how fast results are produced, never their content.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: ScenarioName,
    /// Dimensions, strictly ascending. Empty for `custom` means the size of
    /// the loaded profile.
    pub n: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub k_max: usize,
    pub eps_grid: Vec<f64>,
    pub delta_grid: Vec<f64>,
    /// Overrides the scenario's entry family.
    pub law: Option<LawFamily>,
    pub class: SymmetryClass,
    pub resamples: usize,
    pub format: Format,
    pub profile_file: Option<PathBuf>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            scenario: ScenarioName::UniformGauss,
            n: vec![256],
            trials: 10,
            seed: 0,
            k_max: 8,
            eps_grid: default_eps_grid(),
            delta_grid: DEFAULT_DELTA_GRID.to_vec(),
            law: None,
            class: SymmetryClass::Real,
            resamples: RECOMMENDED_RESAMPLES,
            format: Format::Csv,
            profile_file: None,
            out: None,
            threads: None,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("bad value `{value}` for `{key}`")))
}

fn parse_list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| parse_value(key, v))
        .collect()
}

impl ScenarioConfig {
    /// Sets one key. Keys are flag names; `_` and `-` are interchangeable.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        match key.as_str() {
            "scenario" => self.scenario = value.parse()?,
            "n" => self.n = parse_list(&key, value)?,
            "trials" => self.trials = parse_value(&key, value)?,
            "seed" => self.seed = parse_value(&key, value)?,
            "k-max" => self.k_max = parse_value(&key, value)?,
            "eps-grid" => self.eps_grid = parse_list(&key, value)?,
            "delta-grid" => self.delta_grid = parse_list(&key, value)?,
            "law" => self.law = Some(value.parse()?),
            "class" => self.class = value.parse()?,
            "resamples" => self.resamples = parse_value(&key, value)?,
            "format" => self.format = value.parse()?,
            "profile-file" => self.profile_file = Some(PathBuf::from(value)),
            "out" => self.out = Some(PathBuf::from(value)),
            "threads" => self.threads = Some(parse_value(&key, value)?),
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    /// Applies `key=value` lines; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key=value", no + 1)))?;
            self.set(k, v)
                .map_err(|e| Error::Config(format!("line {}: {e}", no + 1)))?;
        }
        Ok(())
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let mut config = Self::default();
        config.apply_text(&text)?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.n.is_empty() && self.scenario != ScenarioName::Custom {
            return bad("n list is empty".into());
        }
        if self.n.windows(2).any(|w| w[0] >= w[1]) {
            return bad("n list must be strictly ascending".into());
        }
        if self.n.contains(&0) {
            return Err(Error::EmptyDimension);
        }
        if matches!(self.scenario, ScenarioName::HeavyTail | ScenarioName::TruncationPipeline)
            && self.n.iter().any(|&n| n < 3)
        {
            return bad("heavy-tail scenarios need n >= 3".into());
        }
        if self.trials == 0 {
            return bad("trials must be >= 1".into());
        }
        if self.resamples == 0 {
            return bad("resamples must be >= 1".into());
        }
        if self.k_max > MAX_K {
            return bad(format!("k-max {} above {MAX_K}", self.k_max));
        }
        if self.eps_grid.iter().any(|e| !(*e > 0.0)) {
            return bad("eps grid values must be > 0".into());
        }
        if self.delta_grid.iter().any(|d| !(*d > 0.0 && *d <= 1.0)) {
            return bad("delta grid values must be in (0, 1]".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be >= 1".into());
        }
        match (self.scenario, &self.profile_file) {
            (ScenarioName::Custom, None) => bad("the custom scenario needs profile-file".into()),
            (ScenarioName::Custom, Some(_)) | (_, None) => Ok(()),
            (other, Some(_)) => bad(format!("profile-file does not apply to {other}")),
        }
    }

    /// Runs `f` on a pool with `threads` workers, or on the global pool.
    pub fn install<T: Send>(&self, f: impl FnOnce() -> T + Send) -> Result<T> {
        match self.threads {
            None => Ok(f()),
            Some(t) => Ok(rayon::ThreadPoolBuilder::new().num_threads(t).build()?.install(f)),
        }
    }
}

/// A validated configuration with its profile (for `custom`) loaded.
#[derive(Clone, Debug)]
pub struct Scenario {
    config: ScenarioConfig,
    ns: Vec<usize>,
    custom: Option<VarianceProfile>,
}

impl Scenario {
    pub fn new(config: ScenarioConfig) -> Result<Self> {
        config.validate()?;
        let custom = match &config.profile_file {
            Some(path) => Some(VarianceProfile::load_csv(path)?),
            None => None,
        };
        let ns = match &custom {
            Some(p) if config.n.is_empty() => vec![p.n()],
            Some(p) if config.n != [p.n()] => {
                return Err(Error::Config(format!(
                    "custom profile has n = {}, config asks for {:?}",
                    p.n(),
                    config.n
                )))
            }
            _ => config.n.clone(),
        };
        Ok(Self { config, ns, custom })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn ns(&self) -> &[usize] {
        &self.ns
    }

    pub fn family(&self) -> LawFamily {
        self.config.law.unwrap_or_else(|| self.config.scenario.default_family())
    }

    /// The untruncated ensemble at dimension `n`.
    pub fn spec_at(&self, n: usize) -> Result<EnsembleSpec> {
        let family = self.family();
        let profile = match self.config.scenario {
            ScenarioName::UniformGauss | ScenarioName::Rademacher => VarianceProfile::uniform(n)?,
            ScenarioName::Checkerboard => VarianceProfile::checkerboard(n)?,
            ScenarioName::Block => VarianceProfile::block(n)?,
            ScenarioName::HeavyTail | ScenarioName::TruncationPipeline => {
                let s = heavy_tail_scale(n)?;
                VarianceProfile::uniform(n)?.scaled(s * s * n as f64)?
            }
            ScenarioName::Custom => {
                let p = self.custom.as_ref().expect("custom profile loaded in Scenario::new");
                if p.n() != n {
                    return Err(Error::DimensionMismatch { left: p.n(), right: n });
                }
                p.clone()
            }
        };
        let spec = EnsembleSpec::new(profile, family)
            .with_class(self.config.class)
            .with_seed(self.config.seed);
        spec.validate()?;
        Ok(spec)
    }

    /// Truncation levels for the pipeline scenario, one per n; `None` for
    /// every other scenario.
    pub fn truncation_levels(&self) -> Result<Option<Vec<f64>>> {
        if self.config.scenario != ScenarioName::TruncationPipeline {
            return Ok(None);
        }
        let mut grid = Vec::new();
        let mut eps = 0.5;
        while eps >= THRESHOLD_GRID_FLOOR {
            grid.push(eps);
            eps *= 0.5;
        }
        let table: Vec<Vec<f64>> = self
            .ns
            .iter()
            .map(|&n| Ok(evaluate_conditions(&self.spec_at(n)?, &grid, &[])?.weak_lindeberg))
            .collect::<Result<_>>()?;
        let lhs = |e: f64, n: usize| {
            let i = self.ns.iter().position(|&m| m == n).expect("n from the sweep");
            let g = grid.iter().position(|&x| x == e).expect("dyadic grid level");
            table[i][g]
        };
        Ok(Some(threshold_sequence(&self.ns, lhs)))
    }

    /// `(stage, spec)` pairs evaluated at index `idx` of the sweep.
    fn stages(&self, idx: usize, levels: &Option<Vec<f64>>) -> Result<Vec<(Stage, EnsembleSpec)>> {
        let spec = self.spec_at(self.ns[idx])?;
        Ok(match levels {
            Some(etas) => {
                let truncated = spec.clone().truncated(etas[idx]);
                vec![(Stage::Raw, spec), (Stage::Truncated, truncated)]
            }
            None => vec![(Stage::Raw, spec)],
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Raw,
    Truncated,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Raw => "raw",
            Self::Truncated => "truncated",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentRow {
    pub k: usize,
    /// `(1/(n T)) sum_t tr W_t^k`, the k-th moment of the mean ESD.
    pub empirical: f64,
    pub standard_error: f64,
    pub prediction: Option<f64>,
    pub prediction_error_bound: Option<f64>,
    /// Exact `(1/n) E tr W^k` for small discrete ensembles.
    pub oracle: Option<f64>,
    pub semicircle: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub density: f64,
    pub semicircle: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageResult {
    pub stage: Stage,
    pub conditions: ConditionReport,
    pub kolmogorov: f64,
    pub levy: f64,
    /// Per-trial distances of the single-draw ESDs to the semicircle.
    pub trial_kolmogorov: Vec<f64>,
    pub trial_levy: Vec<f64>,
    pub moments: Vec<MomentRow>,
    pub histogram: Vec<HistogramBin>,
    pub mean_esd: StepMeasure,
}

impl StageResult {
    /// Monte Carlo standard error attached to a mean-ESD distance: the
    /// spread of the per-trial distances over `sqrt(T)`.
    pub fn kolmogorov_se(&self) -> f64 {
        standard_error(&self.trial_kolmogorov)
    }

    pub fn levy_se(&self) -> f64 {
        standard_error(&self.trial_levy)
    }
}

fn standard_error(values: &[f64]) -> f64 {
    let t = values.len();
    if t < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / t as f64;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (t - 1) as f64;
    (var / t as f64).sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointResult {
    pub n: usize,
    /// Truncation level of the truncated stage, if any.
    pub eta: Option<f64>,
    pub stages: Vec<StageResult>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub config: ScenarioConfig,
    pub points: Vec<PointResult>,
}

/// Variance profile of `spec` for the moment prediction, when it has one.
fn prediction_profile(spec: &EnsembleSpec) -> Result<Option<Cow<'_, VarianceProfile>>> {
    match (spec.truncation, spec.family) {
        (_, LawFamily::Zero) => Ok(None),
        (None, f) if f.has_finite_variance() => Ok(Some(Cow::Borrowed(&spec.profile))),
        (None, _) => Ok(None),
        // after truncation only a uniform real profile stays a single number
        (Some(_), _) if spec.profile.kind() == ProfileKind::Uniform && spec.class == SymmetryClass::Real => {
            let n = spec.n();
            let v = spec.law_at(0, n.min(2) - 1).second_moment();
            Ok(Some(Cow::Owned(VarianceProfile::uniform(n)?.scaled(v * n as f64)?)))
        }
        _ => Ok(None),
    }
}

fn moments(spec: &EnsembleSpec, spectra: &[SpectralSample], k_max: usize) -> Result<Vec<MomentRow>> {
    let n = spec.n();
    let profile = prediction_profile(spec)?;
    (1..=k_max)
        .map(|k| {
            let per_trial: Vec<f64> = spectra.iter().map(|s| s.power_sum(k as u32) / n as f64).collect();
            let empirical = compensated_sum(per_trial.iter().copied()) / spectra.len() as f64;
            let (prediction, prediction_error_bound) = match &profile {
                Some(p) => {
                    let m = moment_prediction(p, k)?;
                    (Some(m.value), Some(m.error_bound))
                }
                None => (None, None),
            };
            let oracle = if n <= ORACLE_MAX_N && k <= ORACLE_MAX_K {
                exact_trace_moment(spec, k).ok()
            } else {
                None
            };
            Ok(MomentRow {
                k,
                empirical,
                standard_error: standard_error(&per_trial),
                prediction,
                prediction_error_bound,
                oracle,
                semicircle: semicircle_moment(k as u32),
            })
        })
        .collect()
}

/// Density histogram of the pooled eigenvalues on [`HISTOGRAM_RANGE`];
/// mass outside the range is dropped.
pub fn histogram(spectra: &[SpectralSample]) -> Vec<HistogramBin> {
    let (lo, hi) = HISTOGRAM_RANGE;
    let bins = HISTOGRAM_BINS;
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0u64; bins];
    let mut total = 0u64;
    for s in spectra {
        for &x in s.eigenvalues() {
            total += 1;
            if !(lo..=hi).contains(&x) {
                continue;
            }
            let b = (((x - lo) / width) as usize).min(bins - 1);
            counts[b] += 1;
        }
    }
    let edge = |b: usize| lo + (hi - lo) * b as f64 / bins as f64;
    (0..bins)
        .map(|b| {
            let (a, c) = (edge(b), edge(b + 1));
            HistogramBin {
                lo: a,
                hi: c,
                density: counts[b] as f64 / (total.max(1) as f64 * width),
                semicircle: semicircle_density(0.5 * (a + c)),
            }
        })
        .collect()
}

fn run_stage(stage: Stage, spec: &EnsembleSpec, config: &ScenarioConfig) -> Result<StageResult> {
    let conditions = evaluate_conditions(spec, &config.eps_grid, &config.delta_grid)?;
    let spectra = sample_spectra(spec, config.trials)?;
    let mean_esd = pool(&spectra)?;
    let per_trial: Vec<(f64, f64)> = spectra
        .par_iter()
        .map(|s| {
            let m = esd(s)?;
            Ok((kolmogorov_distance(&m, &Semicircle), levy_distance(&m, &Semicircle)))
        })
        .collect::<Result<_>>()?;
    Ok(StageResult {
        stage,
        kolmogorov: kolmogorov_distance(&mean_esd, &Semicircle),
        levy: levy_distance(&mean_esd, &Semicircle),
        trial_kolmogorov: per_trial.iter().map(|p| p.0).collect(),
        trial_levy: per_trial.iter().map(|p| p.1).collect(),
        moments: moments(spec, &spectra, config.k_max)?,
        histogram: histogram(&spectra),
        mean_esd,
        conditions,
    })
}

/// Evaluates every n of the sweep: conditions, mean ESD, distances to the
/// semicircle, moments against predictions and a histogram. Deterministic
/// given the configuration, whatever the thread count.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioResult> {
    let scenario = Scenario::new(config.clone())?;
    config.install(|| {
        let levels = scenario.truncation_levels()?;
        let points = (0..scenario.ns().len())
            .map(|idx| {
                let stages = scenario
                    .stages(idx, &levels)?
                    .iter()
                    .map(|(stage, spec)| run_stage(*stage, spec, config))
                    .collect::<Result<_>>()?;
                Ok(PointResult {
                    n: scenario.ns()[idx],
                    eta: levels.as_ref().map(|l| l[idx]),
                    stages,
                })
            })
            .collect::<Result<_>>()?;
        Ok(ScenarioResult {
            config: config.clone(),
            points,
        })
    })?
}

/// Condition functionals only, per n and stage; nothing is sampled.
pub fn run_conditions(config: &ScenarioConfig) -> Result<Vec<(Stage, ConditionReport)>> {
    let scenario = Scenario::new(config.clone())?;
    config.install(|| {
        let levels = scenario.truncation_levels()?;
        let mut out = Vec::new();
        for idx in 0..scenario.ns().len() {
            for (stage, spec) in scenario.stages(idx, &levels)? {
                out.push((stage, evaluate_conditions(&spec, &config.eps_grid, &config.delta_grid)?));
            }
        }
        Ok(out)
    })?
}

/// Empirical moments against predictions and oracle values, per n and stage.
pub fn run_moments(config: &ScenarioConfig) -> Result<Vec<(usize, Stage, Vec<MomentRow>)>> {
    let scenario = Scenario::new(config.clone())?;
    config.install(|| {
        let levels = scenario.truncation_levels()?;
        let mut out = Vec::new();
        for idx in 0..scenario.ns().len() {
            for (stage, spec) in scenario.stages(idx, &levels)? {
                let spectra = sample_spectra(&spec, config.trials)?;
                out.push((spec.n(), stage, moments(&spec, &spectra, config.k_max)?));
            }
        }
        Ok(out)
    })?
}

/// Row-sum studies over all rows, per n.
pub fn run_gauss(config: &ScenarioConfig) -> Result<Vec<RowSumStudy>> {
    let scenario = Scenario::new(config.clone())?;
    config.install(|| {
        scenario
            .ns()
            .iter()
            .map(|&n| corollary_lhs(&scenario.spec_at(n)?, config.resamples, RowSubset::All))
            .collect()
    })?
}

/// Levels used by the survival experiment of `concentrate`.
pub const SURVIVAL_EPS: [f64; 6] = [0.05, 0.1, 0.2, 0.5, 0.8, 1.0];
/// Deviation levels used by the spectral concentration experiment.
pub const CONCENTRATION_T: [f64; 4] = [0.02, 0.05, 0.1, 0.2];
/// Matrix size of the rank and perturbation property suites.
pub const SUITE_SIZE: usize = 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub suites: Vec<SuiteSummary>,
    pub survival: Vec<SurvivalTable>,
    pub spectral: Vec<ConcentrationTable>,
}

/// Property suites (`trials` random pairs each), and per n the
/// truncation-survival and spectral-concentration tables.
pub fn run_concentrate(config: &ScenarioConfig) -> Result<ConcentrationReport> {
    let scenario = Scenario::new(config.clone())?;
    config.install(|| {
        let suites = [Inequality::Rank, Inequality::Perturbation]
            .into_iter()
            .map(|i| property_suite(i, SUITE_SIZE, config.trials, config.seed))
            .collect::<Result<_>>()?;
        let levels = scenario.truncation_levels()?;
        let ramp = PiecewiseLinear::ramp(-0.1, 0.1)?;
        let mut survival = Vec::new();
        let mut spectral = Vec::new();
        for (idx, &n) in scenario.ns().iter().enumerate() {
            let spec = scenario.spec_at(n)?;
            let eta = match &levels {
                Some(l) => l[idx],
                None if spec.has_finite_variance() => (n as f64).powf(-0.25).min(0.5),
                None => 0.5,
            };
            survival.push(truncation_survival_experiment(&spec, eta, &SURVIVAL_EPS, config.trials)?);
            let target = match &levels {
                Some(l) => spec.truncated(l[idx]),
                None => spec,
            };
            spectral.push(spectral_concentration_experiment(&target, &ramp, &CONCENTRATION_T, config.trials)?);
        }
        Ok(ConcentrationReport {
            suites,
            survival,
            spectral,
        })
    })?
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING-KEBAB-CASE")]
pub enum TrendFlag {
    /// Every step decreases by more than twice its combined standard error.
    MonotoneDown,
    /// All values are zero (to 1e-12).
    FlatAtZero,
    None,
}

impl fmt::Display for TrendFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::MonotoneDown => "MONOTONE-DOWN",
            Self::FlatAtZero => "FLAT-AT-ZERO",
            Self::None => "-",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrendRow {
    pub functional: String,
    pub parameter: Option<f64>,
    pub stage: Stage,
    pub ns: Vec<usize>,
    pub values: Vec<f64>,
    /// Zero for exactly computed functionals.
    pub standard_errors: Vec<f64>,
    /// `last / first`; `None` when the first value is zero.
    pub ratio: Option<f64>,
    pub flag: TrendFlag,
}

/// Flags a sequence of estimates with standard errors.
pub fn classify_trend(values: &[f64], standard_errors: &[f64]) -> TrendFlag {
    if values.iter().all(|v| v.abs() <= 1e-12) {
        return TrendFlag::FlatAtZero;
    }
    let down = (1..values.len()).all(|i| {
        let noise = (standard_errors[i - 1].powi(2) + standard_errors[i].powi(2)).sqrt();
        values[i - 1] - values[i] > 2.0 * noise
    });
    if down && values.len() >= 2 {
        TrendFlag::MonotoneDown
    } else {
        TrendFlag::None
    }
}

fn nearest(grid: &[f64], target: f64) -> Option<usize> {
    (0..grid.len()).min_by(|&a, &b| (grid[a] - target).abs().total_cmp(&(grid[b] - target).abs()))
}

/// Trends over n for the distances to the semicircle and the main condition
/// functionals (Lindeberg-type ones at the grid point nearest 1/2, the margin
/// at the point nearest 0.01). Needs at least two values of n.
pub fn sweep_summary(result: &ScenarioResult) -> Result<Vec<TrendRow>> {
    let points = &result.points;
    if points.len() < 2 {
        return Err(Error::InvalidParameter("a trend needs at least two values of n".into()));
    }
    let ns: Vec<usize> = points.iter().map(|p| p.n).collect();
    let eps_idx = nearest(&result.config.eps_grid, 0.5);
    let delta_idx = nearest(&result.config.delta_grid, 0.01);
    let mut rows = Vec::new();
    for (s, first) in points[0].stages.iter().enumerate() {
        let stage = first.stage;
        let stages: Vec<&StageResult> = points.iter().map(|p| &p.stages[s]).collect();
        let mut push = |name: &str, parameter: Option<f64>, get: &dyn Fn(&StageResult) -> Option<(f64, f64)>| {
            let pairs: Option<Vec<(f64, f64)>> = stages.iter().map(|r| get(r)).collect();
            if let Some(pairs) = pairs {
                let values: Vec<f64> = pairs.iter().map(|p| p.0).collect();
                let ses: Vec<f64> = pairs.iter().map(|p| p.1).collect();
                let ratio = (values[0] != 0.0).then(|| values[values.len() - 1] / values[0]);
                rows.push(TrendRow {
                    functional: name.to_string(),
                    parameter,
                    stage,
                    ns: ns.clone(),
                    flag: classify_trend(&values, &ses),
                    values,
                    standard_errors: ses,
                    ratio,
                });
            }
        };
        push("kolmogorov", None, &|r| Some((r.kolmogorov, r.kolmogorov_se())));
        push("levy", None, &|r| Some((r.levy, r.levy_se())));
        push("row_one", None, &|r| r.conditions.row_one.map(|v| (v, 0.0)));
        push("weak_row_one", None, &|r| Some((r.conditions.weak_row_one, 0.0)));
        push("weak_zero", None, &|r| Some((r.conditions.weak_zero, 0.0)));
        if let Some(e) = eps_idx {
            let eps = result.config.eps_grid[e];
            push("lindeberg", Some(eps), &|r| r.conditions.lindeberg.as_ref().map(|l| (l[e], 0.0)));
            push("weak_lindeberg", Some(eps), &|r| Some((r.conditions.weak_lindeberg[e], 0.0)));
        }
        if let Some(d) = delta_idx {
            let delta = result.config.delta_grid[d];
            push("margin", Some(delta), &|r| Some((r.conditions.margin_curve[d], 0.0)));
        }
    }
    Ok(rows)
}

// ---- emission ----

fn num(v: f64) -> String {
    v.to_string()
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// Writes data files into one directory, each with a sidecar
/// `<file>.meta.json` holding the configuration echo and version.
pub struct Emitter {
    dir: PathBuf,
    meta: serde_json::Value,
    written: Vec<PathBuf>,
}

impl Emitter {
    pub fn new(dir: impl AsRef<Path>, command: &str, config: &ScenarioConfig) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        let meta = serde_json::json!({
            "command": command,
            "config": config,
            "version": VERSION,
        });
        Ok(Self {
            dir,
            meta,
            written: Vec::new(),
        })
    }

    fn create(&self, path: &Path) -> Result<BufWriter<File>> {
        Ok(BufWriter::new(File::create(path).map_err(io_err(path))?))
    }

    fn sidecar(&mut self, name: &str) -> Result<()> {
        let path = self.dir.join(format!("{name}.meta.json"));
        let mut meta = self.meta.clone();
        meta["file"] = serde_json::Value::from(name);
        let mut w = self.create(&path)?;
        serde_json::to_writer_pretty(&mut w, &meta)?;
        writeln!(w).map_err(io_err(&path))?;
        w.flush().map_err(io_err(&path))?;
        Ok(())
    }

    /// CSV with a header row.
    pub fn csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let path = self.dir.join(name);
        let mut w = csv::Writer::from_writer(self.create(&path)?);
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush().map_err(io_err(&path))?;
        self.written.push(path);
        self.sidecar(name)
    }

    /// CSV produced by a writer callback (which writes its own header).
    pub fn csv_with(&mut self, name: &str, f: impl FnOnce(&mut BufWriter<File>) -> Result<()>) -> Result<()> {
        let path = self.dir.join(name);
        let mut w = self.create(&path)?;
        f(&mut w)?;
        w.flush().map_err(io_err(&path))?;
        self.written.push(path);
        self.sidecar(name)
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let path = self.dir.join(name);
        let mut w = self.create(&path)?;
        serde_json::to_writer_pretty(&mut w, value)?;
        writeln!(w).map_err(io_err(&path))?;
        w.flush().map_err(io_err(&path))?;
        self.written.push(path);
        self.sidecar(name)
    }

    /// Data files written so far, in order.
    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn into_written(self) -> Vec<PathBuf> {
        self.written
    }
}

fn condition_rows(n: usize, stage: Stage, report: &ConditionReport) -> Vec<Vec<String>> {
    report
        .long_rows()
        .into_iter()
        .map(|(f, p, v)| vec![n.to_string(), stage.to_string(), f.to_string(), opt(p), num(v)])
        .collect()
}

const CONDITION_HEADER: [&str; 5] = ["n", "stage", "functional", "parameter", "value"];
const MOMENT_HEADER: [&str; 10] = [
    "n",
    "stage",
    "k",
    "empirical",
    "standard_error",
    "prediction",
    "prediction_error_bound",
    "oracle",
    "semicircle",
    "deviation",
];

fn moment_rows(n: usize, stage: Stage, moments: &[MomentRow]) -> Vec<Vec<String>> {
    moments
        .iter()
        .map(|m| {
            vec![
                n.to_string(),
                stage.to_string(),
                m.k.to_string(),
                num(m.empirical),
                num(m.standard_error),
                opt(m.prediction),
                opt(m.prediction_error_bound),
                opt(m.oracle),
                num(m.semicircle),
                num(m.empirical - m.semicircle),
            ]
        })
        .collect()
}

fn trend_rows(trend: &[TrendRow]) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for t in trend {
        for (i, n) in t.ns.iter().enumerate() {
            rows.push(vec![
                t.functional.clone(),
                opt(t.parameter),
                t.stage.to_string(),
                n.to_string(),
                num(t.values[i]),
                num(t.standard_errors[i]),
                opt(t.ratio),
                t.flag.to_string(),
            ]);
        }
    }
    rows
}

/// Emits a full scenario run: conditions, distances, moments, histogram,
/// mean ESD and (for two or more n) the trend table.
pub fn write_scenario(result: &ScenarioResult, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let config = &result.config;
    let trend = if result.points.len() >= 2 {
        Some(sweep_summary(result)?)
    } else {
        None
    };
    let mut out = Emitter::new(dir, "simulate", config)?;
    if config.format == Format::Json {
        #[derive(Serialize)]
        struct Doc<'a> {
            points: &'a [PointResult],
            trend: &'a Option<Vec<TrendRow>>,
        }
        out.json(
            "scenario.json",
            &Doc {
                points: &result.points,
                trend: &trend,
            },
        )?;
        return Ok(out.into_written());
    }

    let mut conditions = Vec::new();
    let mut distances = Vec::new();
    let mut moments = Vec::new();
    let mut hist = Vec::new();
    let mut esd_rows = Vec::new();
    for p in &result.points {
        for s in &p.stages {
            conditions.extend(condition_rows(p.n, s.stage, &s.conditions));
            distances.push(vec![
                p.n.to_string(),
                s.stage.to_string(),
                opt(if s.stage == Stage::Truncated { p.eta } else { None }),
                num(s.kolmogorov),
                num(s.kolmogorov_se()),
                num(s.levy),
                num(s.levy_se()),
            ]);
            moments.extend(moment_rows(p.n, s.stage, &s.moments));
            for b in &s.histogram {
                hist.push(vec![
                    p.n.to_string(),
                    s.stage.to_string(),
                    num(b.lo),
                    num(b.hi),
                    num(0.5 * (b.lo + b.hi)),
                    num(b.density),
                    num(b.semicircle),
                ]);
            }
            for (a, w) in s.mean_esd.atoms().iter().zip(s.mean_esd.weights()) {
                esd_rows.push(vec![p.n.to_string(), s.stage.to_string(), num(*a), num(*w)]);
            }
        }
    }
    out.csv("conditions.csv", &CONDITION_HEADER, &conditions)?;
    out.csv(
        "distances.csv",
        &["n", "stage", "eta", "kolmogorov", "kolmogorov_se", "levy", "levy_se"],
        &distances,
    )?;
    out.csv("moments.csv", &MOMENT_HEADER, &moments)?;
    out.csv(
        "histogram.csv",
        &["n", "stage", "lo", "hi", "center", "density", "semicircle"],
        &hist,
    )?;
    out.csv("mean_esd.csv", &["n", "stage", "atom", "weight"], &esd_rows)?;
    if let Some(trend) = &trend {
        out.csv(
            "trend.csv",
            &["functional", "parameter", "stage", "n", "value", "standard_error", "ratio", "flag"],
            &trend_rows(trend),
        )?;
    }
    Ok(out.into_written())
}

pub fn write_conditions(
    config: &ScenarioConfig,
    reports: &[(Stage, ConditionReport)],
    dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>> {
    let mut out = Emitter::new(dir, "conditions", config)?;
    match config.format {
        Format::Json => {
            #[derive(Serialize)]
            struct Entry<'a> {
                stage: Stage,
                report: &'a ConditionReport,
            }
            let doc: Vec<Entry> = reports.iter().map(|(stage, report)| Entry { stage: *stage, report }).collect();
            out.json("conditions.json", &doc)?;
        }
        Format::Csv => {
            let rows: Vec<Vec<String>> = reports
                .iter()
                .flat_map(|(stage, r)| condition_rows(r.n, *stage, r))
                .collect();
            out.csv("conditions.csv", &CONDITION_HEADER, &rows)?;
        }
    }
    Ok(out.into_written())
}

pub fn write_moments(
    config: &ScenarioConfig,
    moments: &[(usize, Stage, Vec<MomentRow>)],
    dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>> {
    let mut out = Emitter::new(dir, "moments", config)?;
    match config.format {
        Format::Json => out.json("moments.json", &moments)?,
        Format::Csv => {
            let rows: Vec<Vec<String>> = moments
                .iter()
                .flat_map(|(n, stage, m)| moment_rows(*n, *stage, m))
                .collect();
            out.csv("moments.csv", &MOMENT_HEADER, &rows)?;
        }
    }
    Ok(out.into_written())
}

/// Walk census for every length up to `k_max`, plus the full list of
/// canonical walks of length `k_max`.
pub fn write_walks(config: &ScenarioConfig, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let k_max = config.k_max.max(1);
    let rows: Vec<CensusRow> = (1..=k_max)
        .map(census)
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let mut out = Emitter::new(dir, "walks", config)?;
    match config.format {
        Format::Json => out.json("census.json", &rows)?,
        Format::Csv => {
            let table: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    [r.k, r.t, r.walks, r.zeroed_out, r.tree_pair, r.sub_leading]
                        .iter()
                        .map(|v| v.to_string())
                        .collect()
                })
                .collect();
            out.csv(
                "census.csv",
                &["k", "t", "walks", "zeroed_out", "tree_pair", "sub_leading"],
                &table,
            )?;
            out.csv_with("walks.csv", |w| write_census_csv(k_max, w))?;
        }
    }
    Ok(out.into_written())
}

pub fn write_gauss(config: &ScenarioConfig, studies: &[RowSumStudy], dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let mut out = Emitter::new(dir, "gauss", config)?;
    match config.format {
        Format::Json => out.json("gauss.json", &studies)?,
        Format::Csv => {
            let mut rows = Vec::new();
            for s in studies {
                for (r, l) in s.rows.iter().zip(&s.levy) {
                    rows.push(vec![r.to_string(), num(*l), s.n.to_string(), s.resamples.to_string()]);
                }
            }
            out.csv("gauss.csv", &["row", "levy", "n", "resamples"], &rows)?;
            let summary: Vec<Vec<String>> = studies
                .iter()
                .map(|s| vec![s.n.to_string(), s.resamples.to_string(), num(s.average)])
                .collect();
            out.csv("gauss_summary.csv", &["n", "resamples", "average"], &summary)?;
        }
    }
    Ok(out.into_written())
}

pub fn write_concentrate(
    config: &ScenarioConfig,
    report: &ConcentrationReport,
    dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>> {
    let mut out = Emitter::new(dir, "concentrate", config)?;
    if config.format == Format::Json {
        out.json("concentrate.json", report)?;
        return Ok(out.into_written());
    }
    let suites: Vec<Vec<String>> = report
        .suites
        .iter()
        .map(|s| {
            let name = match s.inequality {
                Inequality::Rank => "rank",
                Inequality::Perturbation => "perturbation",
            };
            vec![name.to_string(), s.cases.to_string(), s.violations.to_string(), num(s.worst_gap)]
        })
        .collect();
    out.csv("suites.csv", &["inequality", "cases", "violations", "worst_gap"], &suites)?;
    let mut survival = Vec::new();
    for t in &report.survival {
        for r in &t.rows {
            survival.push(vec![
                t.n.to_string(),
                num(t.eta),
                num(r.eps),
                num(r.empirical),
                num(r.bound),
                r.check.satisfied.to_string(),
                r.applicable.to_string(),
            ]);
        }
    }
    out.csv(
        "survival.csv",
        &["n", "eta", "t", "empirical", "bound", "satisfied", "applicable"],
        &survival,
    )?;
    let mut spectral = Vec::new();
    for t in &report.spectral {
        for r in &t.rows {
            spectral.push(vec![
                t.n.to_string(),
                num(r.t),
                num(r.empirical),
                num(r.bound),
                r.check.satisfied.to_string(),
            ]);
        }
    }
    out.csv("concentration.csv", &["n", "t", "empirical", "bound", "satisfied"], &spectral)?;
    Ok(out.into_written())
}
