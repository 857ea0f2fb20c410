//! Config-driven runs, parameter sweeps and deterministic export.
//!
//! A scenario is a TOML file with flat sections:
//!
//! ```toml
//! [model]
//! E1 = 0.0
//! E2 = 0.0
//! omega1 = 0.3989422804014327
//! omega2 = 0.3989422804014327
//! rho = 1.0
//!
//! [time]
//! t_max = 10.0
//! n_points = 201
//!
//! [sweep]
//! axis1 = "y"
//! values1 = [0.1, 1.0, 10.0]
//! ```
//!
//! Every output carries the SHA-256 of the run manifest, which records the
//! resolved configuration and the module versions.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::io::{fmt_f64, Cell, CsvTable};
use crate::model::{DerivedParams, ModelConfig, WellPair};
use crate::oracle::{DiscretizedReservoir, SingleParticleOracle};
use crate::single::{self, DotDensity, Trajectory};
use crate::{boson, fermion};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_SWEEP_CAP: usize = 10_000;

/// Parameter names a sweep axis may refer to.
pub const SWEEP_AXES: [&str; 10] = [
    "E1",
    "E2",
    "omega1",
    "omega2",
    "rho",
    "lambda_cutoff",
    "yprime",
    "U",
    "y",
    "epsilon",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Evolve,
    Asymptotic,
    Dwell,
    OracleCompare,
    Fermions,
    Bosons,
    Sweep,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Evolve => "evolve",
            Kind::Asymptotic => "asymptotic",
            Kind::Dwell => "dwell",
            Kind::OracleCompare => "oracle-compare",
            Kind::Fermions => "fermions",
            Kind::Bosons => "bosons",
            Kind::Sweep => "sweep",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    #[serde(default = "one")]
    pub c1_re: f64,
    #[serde(default)]
    pub c1_im: f64,
    #[serde(default)]
    pub c2_re: f64,
    #[serde(default)]
    pub c2_im: f64,
}

impl Default for InitialConfig {
    fn default() -> Self {
        Self {
            c1_re: 1.0,
            c1_im: 0.0,
            c2_re: 0.0,
            c2_im: 0.0,
        }
    }
}

impl InitialConfig {
    pub fn amplitudes(&self) -> [Complex64; 2] {
        [
            Complex64::new(self.c1_re, self.c1_im),
            Complex64::new(self.c2_re, self.c2_im),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_n_points")]
    pub n_points: usize,
    /// Integration step; defaults to the model's recommended step.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Start of the decay fit window; defaults to `t_max / 2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit_from: Option<f64>,
}

impl Default for TimeConfig {
    fn default() -> Self {
        Self {
            t_max: default_t_max(),
            n_points: default_n_points(),
            dt: None,
            fit_from: None,
        }
    }
}

impl TimeConfig {
    pub fn grid(&self) -> Vec<f64> {
        single::time_grid(self.t_max, self.n_points)
    }

    pub fn fit_start(&self) -> f64 {
        self.fit_from.unwrap_or(0.5 * self.t_max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default = "default_n_levels")]
    pub n_levels: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            n_levels: default_n_levels(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BosonConfig {
    #[serde(rename = "N1", default = "one_usize")]
    pub n1: usize,
    #[serde(rename = "N2", default = "one_usize")]
    pub n2: usize,
}

impl Default for BosonConfig {
    fn default() -> Self {
        Self { n1: 1, n2: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FermionCase {
    /// One electron per well, separated dots.
    #[default]
    Separated,
    /// Two electrons, one per parallel pair.
    Parallel,
    /// Three electrons in the parallel geometry.
    Three,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FermionConfig {
    #[serde(default)]
    pub case: FermionCase,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    Sigma11Final,
    DotOccupationFinal,
    Sigma11Asymptotic,
    P0,
    DecayRate,
    DwellTimeFit,
    DwellTime,
}

impl Statistic {
    pub const ALL: [Statistic; 7] = [
        Statistic::Sigma11Final,
        Statistic::DotOccupationFinal,
        Statistic::Sigma11Asymptotic,
        Statistic::P0,
        Statistic::DecayRate,
        Statistic::DwellTimeFit,
        Statistic::DwellTime,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Statistic::Sigma11Final => "sigma11_final",
            Statistic::DotOccupationFinal => "dot_occupation_final",
            Statistic::Sigma11Asymptotic => "sigma11_asymptotic",
            Statistic::P0 => "p0",
            Statistic::DecayRate => "decay_rate",
            Statistic::DwellTimeFit => "dwell_time_fit",
            Statistic::DwellTime => "dwell_time",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub axis1: String,
    pub values1: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis2: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values2: Vec<f64>,
    #[serde(default = "all_statistics")]
    pub statistics: Vec<Statistic>,
    #[serde(default = "default_sweep_cap")]
    pub cap: usize,
}

impl SweepConfig {
    pub fn point_count(&self) -> usize {
        match self.axis2 {
            Some(_) => self.values1.len() * self.values2.len(),
            None => self.values1.len(),
        }
    }
}

/// A parsed and validated scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub bosons: BosonConfig,
    #[serde(default)]
    pub fermions: FermionConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

fn one() -> f64 {
    1.0
}
fn one_usize() -> usize {
    1
}
fn default_t_max() -> f64 {
    10.0
}
fn default_n_points() -> usize {
    201
}
fn default_n_levels() -> usize {
    400
}
fn default_sweep_cap() -> usize {
    DEFAULT_SWEEP_CAP
}
fn all_statistics() -> Vec<Statistic> {
    Statistic::ALL.to_vec()
}

fn config_err(path: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Config {
        path: path.into(),
        reason: reason.into(),
    }
}

/// Re-labels model validation errors with the offending key path.
fn model_err(e: Error) -> Error {
    match e {
        Error::InvalidParameter { name, reason } => config_err(format!("model.{name}"), reason),
        Error::DegenerateSystem => config_err("model.omega1", Error::DegenerateSystem.to_string()),
        other => other,
    }
}

impl ScenarioConfig {
    /// Parses and validates; errors carry the key path.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text).map_err(|e| config_err("<document>", e.to_string()))?;
        let cfg: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            config_err(path, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err(path.display().to_string(), e.to_string()))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.time;
        if !(t.t_max > 0.0) || !t.t_max.is_finite() {
            return Err(config_err("time.t_max", "must be positive and finite"));
        }
        if t.n_points < 2 {
            return Err(config_err("time.n_points", "need at least two samples"));
        }
        if let Some(dt) = t.dt {
            if !(dt > 0.0) || !dt.is_finite() {
                return Err(config_err("time.dt", "must be positive and finite"));
            }
        }
        if let Some(f) = t.fit_from {
            if !(f >= 0.0 && f < t.t_max) {
                return Err(config_err("time.fit_from", "must lie in [0, t_max)"));
            }
        }
        let c = self.initial.amplitudes();
        let norm = c[0].norm_sqr() + c[1].norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(config_err("initial", Error::NotNormalized(norm).to_string()));
        }
        self.model.well_pair().map_err(model_err)?;
        if let Some(s) = &self.sweep {
            validate_sweep(s)?;
        }
        Ok(())
    }

    /// Copy with defaults that depend on the model made explicit.
    pub fn resolved(&self) -> Result<Self> {
        let mut out = self.clone();
        if self.sweep.is_none() {
            let pair = self.model.well_pair().map_err(model_err)?;
            out.model.lambda_cutoff = Some(pair.lambda_cutoff());
            out.time.dt = Some(self.time.dt.unwrap_or_else(|| single::default_step(&pair)));
        }
        out.time.fit_from = Some(self.time.fit_start());
        Ok(out)
    }
}

fn validate_sweep(s: &SweepConfig) -> Result<()> {
    let axes = [("sweep.axis1", Some(&s.axis1)), ("sweep.axis2", s.axis2.as_ref())];
    for (path, axis) in axes {
        if let Some(a) = axis {
            if !SWEEP_AXES.contains(&a.as_str()) {
                return Err(config_err(
                    path,
                    format!("unknown parameter `{a}`, expected one of {}", SWEEP_AXES.join(", ")),
                ));
            }
        }
    }
    if s.axis2.as_deref() == Some(s.axis1.as_str()) {
        return Err(config_err("sweep.axis2", "must differ from axis1"));
    }
    if s.values1.is_empty() {
        return Err(config_err("sweep.values1", "sweep axis is empty"));
    }
    match (&s.axis2, s.values2.is_empty()) {
        (Some(_), true) => return Err(config_err("sweep.values2", "sweep axis is empty")),
        (None, false) => return Err(config_err("sweep.values2", "values given without axis2")),
        _ => {}
    }
    if s.statistics.is_empty() {
        return Err(config_err("sweep.statistics", "no statistics requested"));
    }
    let count = s.point_count();
    if count > s.cap {
        return Err(Error::SweepTooLarge { count, cap: s.cap });
    }
    Ok(())
}

/// Sets one named parameter on a model config.
pub fn apply_axis(model: &mut ModelConfig, axis: &str, value: f64) -> Result<()> {
    match axis {
        "E1" => model.e1 = value,
        "E2" => model.e2 = value,
        "omega1" => model.omega1 = value,
        "omega2" => model.omega2 = value,
        "rho" => model.rho = value,
        "lambda_cutoff" => model.lambda_cutoff = Some(value),
        "yprime" => model.yprime = Some(value),
        "U" => model.u = Some(value),
        "y" => {
            if !(value > 0.0) || !value.is_finite() {
                return Err(config_err("sweep.y", format!("must be positive, got {value}")));
            }
            let sign = if model.omega2 < 0.0 { -1.0 } else { 1.0 };
            model.omega2 = sign * model.omega1.abs() * value.sqrt();
        }
        "epsilon" => {
            let mid = 0.5 * (model.e1 + model.e2);
            model.e1 = mid + 0.5 * value;
            model.e2 = mid - 0.5 * value;
        }
        other => return Err(config_err("sweep", format!("unknown parameter `{other}`"))),
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub kind: Kind,
    pub format: Format,
    pub modules: BTreeMap<&'static str, &'static str>,
    pub config: ScenarioConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub derived: Option<DerivedParams>,
}

impl Manifest {
    pub fn new(kind: Kind, format: Format, cfg: &ScenarioConfig) -> Result<Self> {
        let modules = [
            "model-core",
            "optimal-basis",
            "single-particle",
            "reservoir-oracle",
            "many-fermion",
            "many-boson",
            "cli",
        ]
        .into_iter()
        .map(|m| (m, VERSION))
        .collect();
        let derived = match cfg.sweep {
            None => Some(cfg.model.well_pair().map_err(model_err)?.derive()),
            Some(_) => None,
        };
        Ok(Self {
            tool: "distant-wells",
            version: VERSION,
            kind,
            format,
            modules,
            config: cfg.resolved()?,
            derived,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    /// Lowercase hex SHA-256 of [`Manifest::to_json`].
    pub fn sha256(&self) -> Result<String> {
        Ok(sha256_hex(self.to_json()?.as_bytes()))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut out = String::with_capacity(64);
    for b in digest.iter() {
        let _ = write!(out, "{b:02x}");
    }
    out
}

/// Result of a run before rendering: a table plus `key=value` metadata.
#[derive(Debug, Clone)]
pub struct Output {
    pub table: CsvTable,
    pub meta: Vec<(String, String)>,
}

/// A rendered run: the main file and its manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct Rendered {
    pub body: String,
    pub manifest: String,
    pub manifest_sha256: String,
}

fn scenario_err(kind: Kind) -> impl Fn(Error) -> Error {
    move |e| match e {
        e @ (Error::Config { .. } | Error::SweepTooLarge { .. }) => e,
        e => e.in_context(kind.name()),
    }
}

/// Runs a scenario and returns the unrendered output.
pub fn execute(kind: Kind, cfg: &ScenarioConfig) -> Result<Output> {
    let run = || -> Result<Output> {
        match kind {
            Kind::Evolve => evolve(cfg),
            Kind::Asymptotic => asymptotic(cfg),
            Kind::Dwell => dwell(cfg),
            Kind::OracleCompare => oracle_compare(cfg),
            Kind::Fermions => fermions(cfg),
            Kind::Bosons => bosons(cfg),
            Kind::Sweep => {
                let s = cfg
                    .sweep
                    .as_ref()
                    .ok_or_else(|| config_err("sweep", "missing [sweep] section"))?;
                Ok(Output {
                    table: sweep(cfg, s)?,
                    meta: Vec::new(),
                })
            }
        }
    };
    run().map_err(scenario_err(kind))
}

/// Runs and renders a scenario.
pub fn run(kind: Kind, cfg: &ScenarioConfig, format: Format) -> Result<Rendered> {
    let manifest = Manifest::new(kind, format, cfg)?;
    let manifest_json = manifest.to_json()?;
    let hash = sha256_hex(manifest_json.as_bytes());
    let out = execute(kind, cfg)?;
    let body = match format {
        Format::Csv => {
            let mut comments = vec![
                ("manifest_sha256".to_string(), hash.clone()),
                ("kind".to_string(), kind.name().to_string()),
            ];
            comments.extend(out.meta.iter().cloned());
            out.table.render(&comments)
        }
        Format::Json => {
            let meta: BTreeMap<&str, &str> = out.meta.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
            let doc = serde_json::json!({
                "manifest_sha256": hash,
                "kind": kind.name(),
                "meta": meta,
                "data": out.table.to_json(),
            });
            let mut s = serde_json::to_string_pretty(&doc)?;
            s.push('\n');
            s
        }
    };
    Ok(Rendered {
        body,
        manifest: manifest_json,
        manifest_sha256: hash,
    })
}

/// Runs twice and insists on byte-identical results.
pub fn run_checked(kind: Kind, cfg: &ScenarioConfig, format: Format) -> Result<Rendered> {
    let first = run(kind, cfg, format)?;
    let second = run(kind, cfg, format)?;
    if first.body != second.body {
        return Err(Error::Nondeterministic(kind.name().into()));
    }
    if first.manifest != second.manifest {
        return Err(Error::Nondeterministic("manifest".into()));
    }
    Ok(first)
}

/// Path of the manifest written next to `out`.
pub fn manifest_path(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

/// Writes the main file and the manifest sidecar.
pub fn write_outputs(rendered: &Rendered, out: &Path) -> Result<()> {
    std::fs::write(out, &rendered.body)?;
    std::fs::write(manifest_path(out), &rendered.manifest)?;
    Ok(())
}

fn pair_of(cfg: &ScenarioConfig) -> Result<WellPair> {
    cfg.model.well_pair().map_err(model_err)
}

fn master_run(cfg: &ScenarioConfig, pair: &WellPair) -> Result<Trajectory> {
    let dt = cfg.time.dt.unwrap_or_else(|| single::default_step(pair));
    let init = DotDensity::from_amplitudes(cfg.initial.amplitudes());
    single::master_trajectory(pair, init, &cfg.time.grid(), dt)
}

fn quantity_table(rows: &[(&str, f64)]) -> CsvTable {
    let mut t = CsvTable::new(["quantity", "value"]);
    for (k, v) in rows {
        t.push_row(vec![Cell::Text((*k).to_string()), (*v).into()]);
    }
    t
}

fn evolve(cfg: &ScenarioConfig) -> Result<Output> {
    let pair = pair_of(cfg)?;
    Ok(Output {
        table: master_run(cfg, &pair)?.to_table(),
        meta: Vec::new(),
    })
}

fn asymptotic(cfg: &ScenarioConfig) -> Result<Output> {
    let pair = pair_of(cfg)?;
    let c = cfg.initial.amplitudes();
    let (p0, p1) = single::asymptotic_probs(&pair, c)?;
    let s = single::asymptotic_state(&pair, c)?;
    Ok(Output {
        table: quantity_table(&[
            ("p0", p0),
            ("p1", p1),
            ("sigma11", s.sigma11),
            ("sigma22", s.sigma22),
            ("re_sigma12", s.sigma12.re),
            ("im_sigma12", s.sigma12.im),
            ("sigma00", s.sigma00),
        ]),
        meta: Vec::new(),
    })
}

fn dwell(cfg: &ScenarioConfig) -> Result<Output> {
    let pair = pair_of(cfg)?;
    let tau = single::dwell_time(&pair)?;
    let rate = master_run(cfg, &pair)?.fitted_decay_rate(cfg.time.fit_start())?;
    let tau_fit = 1.0 / rate;
    Ok(Output {
        table: quantity_table(&[
            ("dwell_time", tau),
            ("dwell_time_fit", tau_fit),
            ("decay_rate_fit", rate),
            ("relative_difference", (tau_fit - tau) / tau),
        ]),
        meta: Vec::new(),
    })
}

fn oracle_compare(cfg: &ScenarioConfig) -> Result<Output> {
    let pair = pair_of(cfg)?;
    let res = DiscretizedReservoir::for_pair(&pair, cfg.oracle.n_levels)?;
    let oracle = SingleParticleOracle::new(&pair, res)?;
    let times = cfg.time.grid();
    let run = oracle.run(cfg.initial.amplitudes(), &times)?;
    let master = master_run(cfg, &pair)?;
    let mut table = CsvTable::new(Trajectory::COLUMNS.iter().copied().chain([
        "sigma11_master",
        "sigma22_master",
        "re_sigma12_master",
    ]));
    let mut max_dev = 0.0f64;
    for (o, m) in run.trajectory.states.iter().zip(&master.states) {
        max_dev = max_dev.max(o.dots().max_abs_diff(&m.dots()));
        table.push_row(vec![
            o.t.into(),
            o.sigma11.into(),
            o.sigma22.into(),
            o.sigma12.re.into(),
            o.sigma12.im.into(),
            o.sigma00.into(),
            m.sigma11.into(),
            m.sigma22.into(),
            m.sigma12.re.into(),
        ]);
    }
    let r = &run.report;
    let meta = vec![
        ("lambda_cutoff".into(), fmt_f64(r.lambda_cutoff)),
        ("n_levels".into(), r.n_levels.to_string()),
        ("spacing".into(), fmt_f64(r.spacing)),
        ("recurrence_time".into(), fmt_f64(r.recurrence_time)),
        ("max_norm_drift".into(), fmt_f64(r.max_norm_drift)),
        ("recurrence_warning".into(), r.recurrence_warning.to_string()),
        ("max_deviation_from_master".into(), fmt_f64(max_dev)),
    ];
    Ok(Output { table, meta })
}

fn fermions(cfg: &ScenarioConfig) -> Result<Output> {
    let branches = match cfg.fermions.case {
        FermionCase::Separated => fermion::two_electron_asymptotic(&pair_of(cfg)?)?,
        FermionCase::Parallel => {
            fermion::two_electron_parallel_asymptotic(&cfg.model.parallel_pair().map_err(model_err)?)?
        }
        FermionCase::Three => fermion::three_electron_asymptotic(&cfg.model.parallel_pair().map_err(model_err)?)?,
    };
    let mut table = CsvTable::new([
        "reservoir_count",
        "probability",
        "occupation",
        "re_amplitude",
        "im_amplitude",
    ]);
    let mut meta = Vec::new();
    for (i, b) in branches.iter().enumerate() {
        meta.push((format!("branch{i}_modes"), b.modes.join(" ")));
        for term in &b.terms {
            let occ: String = term.occupation.iter().map(|n| char::from(b'0' + n)).collect();
            table.push_row(vec![
                b.reservoir_count.into(),
                b.probability.into(),
                Cell::Text(occ),
                term.amplitude.re.into(),
                term.amplitude.im.into(),
            ]);
        }
    }
    Ok(Output { table, meta })
}

fn bosons(cfg: &ScenarioConfig) -> Result<Output> {
    let pair = pair_of(cfg)?;
    let dist = boson::emission_distribution(&pair, cfg.bosons.n1, cfg.bosons.n2)?;
    Ok(Output {
        table: dist.to_table("m"),
        meta: vec![
            ("N1".into(), cfg.bosons.n1.to_string()),
            ("N2".into(), cfg.bosons.n2.to_string()),
        ],
    })
}

fn ok_or_nan(r: Result<f64>) -> Result<f64> {
    match r {
        Ok(v) => Ok(v),
        Err(Error::NoBoundState(_) | Error::InfiniteDwellTime | Error::InvalidParameter { name: "fit", .. }) => {
            Ok(f64::NAN)
        }
        Err(e) => Err(e),
    }
}

/// Summary statistics at one sweep point, in the order requested.
pub fn sweep_point(cfg: &ScenarioConfig, model: &ModelConfig, stats: &[Statistic]) -> Result<Vec<f64>> {
    let pair = model.well_pair().map_err(model_err)?;
    let c = cfg.initial.amplitudes();
    let needs_traj = stats.iter().any(|s| {
        matches!(
            s,
            Statistic::Sigma11Final | Statistic::DotOccupationFinal | Statistic::DecayRate | Statistic::DwellTimeFit
        )
    });
    let traj = if needs_traj {
        Some(master_run(cfg, &pair)?)
    } else {
        None
    };
    let last = traj.as_ref().and_then(|t| t.last());
    let rate = match &traj {
        Some(t) => ok_or_nan(t.fitted_decay_rate(cfg.time.fit_start()))?,
        None => f64::NAN,
    };
    stats
        .iter()
        .map(|s| match s {
            Statistic::Sigma11Final => Ok(last.map_or(f64::NAN, |l| l.sigma11)),
            Statistic::DotOccupationFinal => Ok(last.map_or(f64::NAN, |l| l.dot_occupation())),
            Statistic::Sigma11Asymptotic => ok_or_nan(single::asymptotic_state(&pair, c).map(|s| s.sigma11)),
            Statistic::P0 => ok_or_nan(single::asymptotic_probs(&pair, c).map(|p| p.0)),
            Statistic::DecayRate => Ok(rate),
            Statistic::DwellTimeFit => Ok(1.0 / rate),
            Statistic::DwellTime => ok_or_nan(single::dwell_time(&pair)),
        })
        .collect()
}

/// One row per grid point, `axis1` outermost. Points run on worker threads;
/// rows are assembled in grid order.
pub fn sweep(cfg: &ScenarioConfig, s: &SweepConfig) -> Result<CsvTable> {
    validate_sweep(s)?;
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(s.point_count());
    for &v1 in &s.values1 {
        match &s.axis2 {
            Some(_) => points.extend(s.values2.iter().map(|&v2| vec![v1, v2])),
            None => points.push(vec![v1]),
        }
    }
    let axes: Vec<&str> = std::iter::once(s.axis1.as_str()).chain(s.axis2.as_deref()).collect();
    let models = points
        .iter()
        .map(|p| {
            let mut m = cfg.model.clone();
            for (axis, &v) in axes.iter().zip(p) {
                apply_axis(&mut m, axis, v)?;
            }
            Ok(m)
        })
        .collect::<Result<Vec<_>>>()?;

    let workers = std::thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(models.len());
    let chunk = models.len().div_ceil(workers.max(1));
    let results: Vec<Result<Vec<f64>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = models
            .chunks(chunk)
            .map(|ms| {
                scope.spawn(move || {
                    ms.iter()
                        .map(|m| sweep_point(cfg, m, &s.statistics))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });

    let header = axes
        .iter()
        .map(|a| a.to_string())
        .chain(["resolved_y".into(), "resolved_epsilon".into()])
        .chain(s.statistics.iter().map(|st| st.name().to_string()));
    let mut table = CsvTable::new(header);
    for ((p, m), r) in points.iter().zip(&models).zip(results) {
        let stats = r.map_err(|e| {
            let at: Vec<String> = axes.iter().zip(p).map(|(a, v)| format!("{a}={v}")).collect();
            e.in_context(format!("sweep point {}", at.join(", ")))
        })?;
        let d = m.well_pair().map_err(model_err)?.derive();
        let row = p
            .iter()
            .copied()
            .chain([d.y, d.epsilon])
            .chain(stats)
            .map(Cell::Float)
            .collect();
        table.push_row(row);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    const UNIT: &str = "0.3989422804014327";

    fn base(extra: &str) -> String {
        format!("[model]\nomega1 = {UNIT}\nomega2 = {UNIT}\nrho = 1.0\n{extra}")
    }

    #[test]
    fn unknown_key_reports_path() {
        let err = ScenarioConfig::from_toml_str(&base("omgea3 = 1.0\n")).unwrap_err();
        match err {
            Error::Config { path, .. } => assert_eq!(path, "model.omgea3"),
            e => panic!("{e}"),
        }
        let err = ScenarioConfig::from_toml_str(&base("[time]\nt_max = \"x\"\n")).unwrap_err();
        match err {
            Error::Config { path, .. } => assert_eq!(path, "time.t_max"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn invalid_model_value_reports_path() {
        let err = ScenarioConfig::from_toml_str("[model]\nomega1 = 1.0\nomega2 = 1.0\nrho = -1.0\n").unwrap_err();
        match err {
            Error::Config { path, .. } => assert_eq!(path, "model.rho"),
            e => panic!("{e}"),
        }
    }

    #[test]
    fn empty_axis_and_unknown_axis_rejected() {
        let e = ScenarioConfig::from_toml_str(&base("[sweep]\naxis1 = \"y\"\nvalues1 = []\n")).unwrap_err();
        assert!(matches!(e, Error::Config { ref path, .. } if path == "sweep.values1"));
        let e = ScenarioConfig::from_toml_str(&base("[sweep]\naxis1 = \"gamma\"\nvalues1 = [1.0]\n")).unwrap_err();
        assert!(matches!(e, Error::Config { ref path, .. } if path == "sweep.axis1"));
    }

    #[test]
    fn cap_refusal_reports_count() {
        let e = ScenarioConfig::from_toml_str(&base(
            "[sweep]\naxis1 = \"y\"\nvalues1 = [1.0, 2.0, 3.0]\naxis2 = \"E1\"\nvalues2 = [0.0, 1.0]\ncap = 5\n",
        ))
        .unwrap_err();
        assert!(matches!(e, Error::SweepTooLarge { count: 6, cap: 5 }));
    }

    #[test]
    fn y_axis_scales_omega2() {
        let cfg = ScenarioConfig::from_toml_str(&base("")).unwrap();
        let mut m = cfg.model.clone();
        apply_axis(&mut m, "y", 4.0).unwrap();
        assert!((m.well_pair().unwrap().derive().y - 4.0).abs() < 1e-12);
        apply_axis(&mut m, "epsilon", 0.5).unwrap();
        assert!((m.e1 - m.e2 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn symmetric_evolve_reaches_quarter() {
        let cfg = ScenarioConfig::from_toml_str(&base("[time]\nt_max = 30.0\nn_points = 31\n")).unwrap();
        let out = execute(Kind::Evolve, &cfg).unwrap();
        let last = out.table.rows.last().unwrap();
        assert!(matches!(last[1], Cell::Float(v) if (v - 0.25).abs() < 1e-6));
    }

    #[test]
    fn rendering_is_deterministic_and_hashed() {
        let cfg = ScenarioConfig::from_toml_str(&base("[bosons]\nN1 = 1\nN2 = 1\n")).unwrap();
        let r = run_checked(Kind::Bosons, &cfg, Format::Csv).unwrap();
        assert!(r
            .body
            .starts_with(&format!("# manifest_sha256={}\n", r.manifest_sha256)));
        assert_eq!(sha256_hex(r.manifest.as_bytes()), r.manifest_sha256);
        let j = run(Kind::Bosons, &cfg, Format::Json).unwrap();
        let v: serde_json::Value = serde_json::from_str(&j.body).unwrap();
        assert_eq!(v["manifest_sha256"], serde_json::json!(j.manifest_sha256));
        assert_ne!(j.manifest_sha256, r.manifest_sha256);
    }

    #[test]
    fn module_errors_carry_context() {
        let cfg = ScenarioConfig::from_toml_str(&base("E1 = 0.5\n")).unwrap();
        let e = execute(Kind::Asymptotic, &cfg).unwrap_err();
        assert!(
            matches!(e, Error::Scenario { ref context, .. } if context == "asymptotic"),
            "{e}"
        );
    }

    #[test]
    fn sweep_rows_follow_grid_order() {
        let cfg = ScenarioConfig::from_toml_str(&base(
            "[time]\nt_max = 5.0\nn_points = 11\n[sweep]\naxis1 = \"y\"\nvalues1 = [0.1, 1.0, 10.0]\naxis2 = \"epsilon\"\nvalues2 = [0.0, 0.1]\nstatistics = [\"sigma11_asymptotic\", \"dwell_time\"]\n",
        ))
        .unwrap();
        let t = sweep(&cfg, cfg.sweep.as_ref().unwrap()).unwrap();
        assert_eq!(
            t.header,
            [
                "y",
                "epsilon",
                "resolved_y",
                "resolved_epsilon",
                "sigma11_asymptotic",
                "dwell_time"
            ]
        );
        assert_eq!(t.rows.len(), 6);
        let get = |r: usize, c: usize| match t.rows[r][c] {
            Cell::Float(v) => v,
            _ => unreachable!(),
        };
        assert!((get(0, 4) - 0.01 / 1.21).abs() < 1e-12);
        assert!(get(1, 4).is_nan());
        assert!(get(0, 5).is_nan());
        assert!((get(5, 0) - 10.0).abs() < 1e-15 && (get(5, 1) - 0.1).abs() < 1e-15);
    }
}
