//! Sweep and single-point drivers behind the command-line interface.
//!
//! A sweep writes one CSV per requested scalar (`R,g_over_gc,g_abs,value,status`),
//! optional Fock and Wigner files, and a `manifest.json` listing every file
//! with its SHA-256 digest. Output depends only on the configuration, not on
//! the number of worker threads.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exact_diag::{solve_ground, EDResult, DEFAULT_ENERGY_TOL};
use crate::model::ModelParams;
use crate::observables::{
    classify, displacement_gap, entanglement_entropy, mean_photon_m, photon_statistics,
    spin_probabilities, Classification, EntropyBase, FockDistribution, PhotonSource,
};
use crate::variational::{minimize_ground, sweep, Ansatz, GroundStateSolution, MinimizeOptions};
use crate::wigner::{analytic_field, ground_state_negativities, write_grid_csv, Component, Negativities, PhaseGrid};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Output {
    Energy,
    Error,
    Xi,
    Weights,
    Displacements,
    M,
    PUp,
    Entropy,
    Negativity,
    Fock,
    WignerGrids,
    Classify,
}

impl Output {
    pub const ALL: [Output; 12] = [
        Output::Energy,
        Output::Error,
        Output::Xi,
        Output::Weights,
        Output::Displacements,
        Output::M,
        Output::PUp,
        Output::Entropy,
        Output::Negativity,
        Output::Fock,
        Output::WignerGrids,
        Output::Classify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Output::Energy => "energy",
            Output::Error => "error",
            Output::Xi => "xi",
            Output::Weights => "weights",
            Output::Displacements => "displacements",
            Output::M => "m",
            Output::PUp => "p_up",
            Output::Entropy => "entropy",
            Output::Negativity => "negativity",
            Output::Fock => "fock",
            Output::WignerGrids => "wigner-grids",
            Output::Classify => "classify",
        }
    }

    fn needs_exact(self) -> bool {
        matches!(self, Output::Error | Output::Fock)
    }
}

impl std::str::FromStr for Output {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().replace('_', "-");
        Output::ALL
            .into_iter()
            .find(|o| o.name().replace('_', "-") == key)
            .ok_or_else(|| Error::config(format!("unknown output '{s}'")))
    }
}

/// Parse a comma-separated output list; `all` selects everything.
pub fn parse_outputs(s: &str) -> Result<BTreeSet<Output>> {
    if s.trim() == "all" {
        return Ok(Output::ALL.into_iter().collect());
    }
    s.split(',').filter(|t| !t.trim().is_empty()).map(str::parse).collect()
}

/// Coupling grid in units of g_c.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    /// `"min:max:count"`.
    Text(String),
    List(Vec<f64>),
    Range { min: f64, max: f64, count: usize },
}

impl GridSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        let values = match self {
            GridSpec::Text(s) => return parse_grid(s),
            GridSpec::List(v) => v.clone(),
            GridSpec::Range { min, max, count } => linspace(*min, *max, *count)?,
        };
        check_couplings(&values)?;
        Ok(values)
    }
}

fn linspace(min: f64, max: f64, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::config("grid count must be at least 1"));
    }
    if !(min.is_finite() && max.is_finite()) || max < min {
        return Err(Error::config(format!("grid range {min}..{max} is invalid")));
    }
    if count == 1 {
        return Ok(vec![min]);
    }
    let step = (max - min) / (count - 1) as f64;
    Ok((0..count).map(|i| if i + 1 == count { max } else { min + i as f64 * step }).collect())
}

fn check_couplings(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::config("coupling grid is empty"));
    }
    if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return Err(Error::config(format!("g/g_c must be finite and non-negative, got {v}")));
    }
    Ok(())
}

/// `"min:max:count"` → evenly spaced values including both ends.
pub fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::config(format!("grid '{s}' must look like min:max:count")));
    }
    let num = |t: &str| t.trim().parse::<f64>().map_err(|e| Error::config(format!("grid '{s}': {e}")));
    let count = parts[2]
        .trim()
        .parse::<usize>()
        .map_err(|e| Error::config(format!("grid '{s}': {e}")))?;
    let values = linspace(num(parts[0])?, num(parts[1])?, count)?;
    check_couplings(&values)?;
    Ok(values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SeedPolicy {
    /// Restart each point from several fixed seeds.
    pub multi_start: bool,
    /// Warm-start along the coupling grid in both directions.
    pub continuation: bool,
}

impl Default for SeedPolicy {
    fn default() -> Self {
        SeedPolicy { multi_start: true, continuation: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub ratios: Vec<f64>,
    pub g_over_gc: GridSpec,
    pub ansatz: String,
    pub outputs: BTreeSet<Output>,
    pub wigner_points: Vec<(f64, f64)>,
    pub output_dir: PathBuf,
    pub seed_policy: SeedPolicy,
    pub entropy_base: String,
    pub jobs: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            ratios: vec![100.0],
            g_over_gc: GridSpec::Range { min: 0.0, max: 3.0, count: 61 },
            ansatz: Ansatz::Full.label().to_string(),
            outputs: [Output::Energy, Output::Error].into_iter().collect(),
            wigner_points: Vec::new(),
            output_dir: PathBuf::from("out"),
            seed_policy: SeedPolicy::default(),
            entropy_base: "e".to_string(),
            jobs: 1,
        }
    }
}

/// Command-line values that take precedence over the configuration file.
#[derive(Debug, Clone, Default)]
pub struct SweepOverrides {
    pub ratios: Option<Vec<f64>>,
    pub grid: Option<GridSpec>,
    pub ansatz: Option<String>,
    pub outputs: Option<BTreeSet<Output>>,
    pub output_dir: Option<PathBuf>,
    pub entropy_base: Option<String>,
    pub jobs: Option<usize>,
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(format!("invalid sweep configuration: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn apply(mut self, o: SweepOverrides) -> Self {
        if let Some(v) = o.ratios {
            self.ratios = v;
        }
        if let Some(v) = o.grid {
            self.g_over_gc = v;
        }
        if let Some(v) = o.ansatz {
            self.ansatz = v;
        }
        if let Some(v) = o.outputs {
            self.outputs = v;
        }
        if let Some(v) = o.output_dir {
            self.output_dir = v;
        }
        if let Some(v) = o.entropy_base {
            self.entropy_base = v;
        }
        if let Some(v) = o.jobs {
            self.jobs = v;
        }
        self
    }

    fn resolve(&self) -> Result<ResolvedConfig> {
        if self.ratios.is_empty() {
            return Err(Error::config("at least one ratio is required"));
        }
        if let Some(r) = self.ratios.iter().find(|r| !(**r > 0.0) || !r.is_finite()) {
            return Err(Error::config(format!("ratio must be positive, got {r}")));
        }
        for &(r, k) in &self.wigner_points {
            ModelParams::from_ratio(r, k).map_err(|e| Error::config(format!("wigner point ({r}, {k}): {e}")))?;
        }
        if self.jobs == 0 {
            return Err(Error::config("jobs must be at least 1"));
        }
        Ok(ResolvedConfig {
            g_over_gc: self.g_over_gc.values()?,
            ansatz: self.ansatz.parse()?,
            base: self.entropy_base.parse()?,
        })
    }
}

struct ResolvedConfig {
    g_over_gc: Vec<f64>,
    ansatz: Ansatz,
    base: EntropyBase,
}

/// Everything computed at one sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub schema_version: u32,
    pub ratio: f64,
    pub g_over_gc: f64,
    pub g_abs: f64,
    pub ansatz: Ansatz,
    pub status: String,
    pub warnings: Vec<String>,
    pub classification: Option<Classification>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ed_energy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub energy_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub xi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d_beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_up: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_down: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entropy_base: Option<EntropyBase>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub negativities: Option<Negativities>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fock: Option<FockTable>,
    #[serde(skip)]
    pub evaluations: usize,
}

/// Parity-resolved photon distributions at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FockTable {
    pub variational: FockDistribution,
    pub exact: Option<FockDistribution>,
}

impl FockTable {
    fn to_csv(&self) -> String {
        let mut s = String::from("n,parity,variational,exact\n");
        let len = self.variational.len().max(self.exact.as_ref().map_or(0, |e| e.len()));
        for n in 0..len {
            let parity = if n % 2 == 0 { "even" } else { "odd" };
            let v = self.variational.populations.get(n).copied().unwrap_or(0.0);
            let e = self.exact.as_ref().map_or(f64::NAN, |e| e.populations.get(n).copied().unwrap_or(0.0));
            let _ = writeln!(s, "{n},{parity},{v:?},{e:?}");
        }
        s
    }
}

fn evaluate(
    solution: GroundStateSolution,
    outputs: &BTreeSet<Output>,
    base: EntropyBase,
) -> PointRecord {
    let model = solution.model;
    let vp = solution.params;
    let mut warnings = Vec::new();
    if let crate::variational::SolveStatus::ConvergedWithWarning(w) = &solution.status {
        warnings.push(w.clone());
    }
    let want = |o: Output| outputs.contains(&o);
    let ed: Option<EDResult> = if outputs.iter().any(|o| o.needs_exact()) {
        match solve_ground(&model, DEFAULT_ENERGY_TOL) {
            Ok(ed) => Some(ed),
            Err(e) => {
                warnings.push(format!("exact diagonalisation: {e}"));
                None
            }
        }
    } else {
        None
    };
    let (p_up, p_down) = spin_probabilities(&vp);
    let negativities = if want(Output::Negativity) {
        match ground_state_negativities(&vp) {
            Ok(n) => Some(n),
            Err(e) => {
                warnings.push(format!("negativity: {e}"));
                Some(Negativities { total: f64::NAN, even: f64::NAN, odd: f64::NAN })
            }
        }
    } else {
        None
    };
    let fock = want(Output::Fock).then(|| {
        let var = photon_statistics(PhotonSource::Variational(&vp), None);
        if let Some(w) = &var.warning {
            warnings.push(format!("variational Fock: {w}"));
        }
        let exact = ed.as_ref().map(|e| photon_statistics(PhotonSource::Exact(e), None).distribution);
        FockTable { variational: var.distribution, exact }
    });
    let ed_energy = ed.as_ref().map(|e| e.energy);
    let energy_error = ed_energy.map(|e| ((solution.energy - e) / e).abs());
    let failed_exact = want(Output::Error) && ed_energy.is_none();
    let status = if failed_exact {
        "failed"
    } else if warnings.is_empty() {
        "ok"
    } else {
        "warning"
    };
    let evaluations = solution.trace.iter().map(|t| t.evaluations).sum();
    PointRecord {
        schema_version: SCHEMA_VERSION,
        ratio: model.ratio,
        g_over_gc: model.g_over_gc(),
        g_abs: model.g,
        ansatz: solution.ansatz,
        status: status.to_string(),
        warnings,
        classification: Some(classify(&model, &solution)),
        energy: want(Output::Energy).then_some(solution.energy),
        ed_energy: want(Output::Error).then_some(ed_energy).flatten(),
        energy_error: want(Output::Error).then_some(energy_error.unwrap_or(f64::NAN)),
        xi: want(Output::Xi).then_some(vp.xi),
        alpha: want(Output::Weights).then_some(vp.alpha),
        beta: want(Output::Weights).then_some(vp.beta),
        d_alpha: want(Output::Displacements).then_some(vp.d_alpha),
        d_beta: want(Output::Displacements).then_some(vp.d_beta),
        delta_d: want(Output::Displacements).then_some(displacement_gap(&vp)),
        m: want(Output::M).then_some(mean_photon_m(&vp)),
        p_up: want(Output::PUp).then_some(p_up),
        p_down: want(Output::PUp).then_some(p_down),
        entropy: want(Output::Entropy).then_some(entanglement_entropy(p_up, base)),
        entropy_base: want(Output::Entropy).then_some(base),
        negativities,
        fock,
        evaluations,
    }
}

fn solve_options(policy: SeedPolicy) -> MinimizeOptions {
    let mut o = MinimizeOptions { compare_exact: false, ..MinimizeOptions::default() };
    if !policy.multi_start {
        o.restarts = 0;
    }
    o
}

/// Solve and evaluate a single point.
pub fn run_point(
    ratio: f64,
    g_over_gc: f64,
    outputs: &BTreeSet<Output>,
    ansatz: Ansatz,
    base: EntropyBase,
) -> Result<PointRecord> {
    let model = ModelParams::from_ratio(ratio, g_over_gc)?;
    let solution = minimize_ground(&model, ansatz, &solve_options(SeedPolicy::default()))?;
    Ok(evaluate(solution, outputs, base))
}

/// Single-point solution with default settings, for subcommands that need
/// the variational state itself.
pub fn solve_point(ratio: f64, g_over_gc: f64, ansatz: Ansatz) -> Result<GroundStateSolution> {
    let model = ModelParams::from_ratio(ratio, g_over_gc)?;
    minimize_ground(&model, ansatz, &solve_options(SeedPolicy::default()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileEntry {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointDiagnostics {
    pub ratio: f64,
    pub g_over_gc: f64,
    pub status: String,
    pub warnings: Vec<String>,
    pub energy: Option<f64>,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub tool: String,
    pub version: String,
    pub config: SweepConfig,
    pub files: Vec<FileEntry>,
    pub points: Vec<PointDiagnostics>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport {
    pub manifest: Manifest,
    pub records: Vec<PointRecord>,
    pub manifest_path: PathBuf,
}

impl SweepReport {
    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| r.status == "failed").count()
    }
}

fn failed_record(model: &ModelParams, ansatz: Ansatz, err: &Error) -> PointRecord {
    PointRecord {
        schema_version: SCHEMA_VERSION,
        ratio: model.ratio,
        g_over_gc: model.g_over_gc(),
        g_abs: model.g,
        ansatz,
        status: "failed".into(),
        warnings: vec![err.to_string()],
        classification: None,
        energy: None,
        ed_energy: None,
        energy_error: None,
        xi: None,
        alpha: None,
        beta: None,
        d_alpha: None,
        d_beta: None,
        delta_d: None,
        m: None,
        p_up: None,
        p_down: None,
        entropy: None,
        entropy_base: None,
        negativities: None,
        fock: None,
        evaluations: 0,
    }
}

fn solve_ratio(ratio: f64, cfg: &ResolvedConfig, policy: SeedPolicy) -> Vec<std::result::Result<GroundStateSolution, (ModelParams, Error)>> {
    let opts = solve_options(policy);
    let models: Vec<ModelParams> = cfg
        .g_over_gc
        .iter()
        .map(|&k| ModelParams::from_ratio(ratio, k).expect("validated grid"))
        .collect();
    if policy.continuation {
        // Continuation needs the grid in ascending order.
        let mut order: Vec<usize> = (0..models.len()).collect();
        order.sort_by(|&a, &b| cfg.g_over_gc[a].total_cmp(&cfg.g_over_gc[b]));
        let sorted: Vec<f64> = order.iter().map(|&i| cfg.g_over_gc[i]).collect();
        match sweep(ratio, &sorted, cfg.ansatz, &opts) {
            Ok(sols) => {
                let mut out: Vec<Option<GroundStateSolution>> = vec![None; models.len()];
                for (slot, s) in order.into_iter().zip(sols) {
                    out[slot] = Some(s);
                }
                out.into_iter().map(|s| Ok(s.expect("filled"))).collect()
            }
            Err(e) => models.iter().map(|m| Err((*m, Error::config(e.to_string())))).collect(),
        }
    } else {
        models
            .par_iter()
            .map(|m| minimize_ground(m, cfg.ansatz, &opts).map_err(|e| (*m, e)))
            .collect()
    }
}

fn fmt_value(v: f64) -> String {
    format!("{v:?}")
}

fn point_tag(ratio: f64, g_over_gc: f64) -> String {
    format!("R{}_g{}", fmt_value(ratio), fmt_value(g_over_gc))
}

struct Emitter {
    dir: PathBuf,
    files: Vec<FileEntry>,
}

impl Emitter {
    fn write(&mut self, name: &str, contents: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
        self.files.push(FileEntry {
            path: name.to_string(),
            sha256: hex::encode(Sha256::digest(contents)),
            bytes: contents.len(),
        });
        Ok(())
    }
}

fn scalar_csv(records: &[PointRecord], value: impl Fn(&PointRecord) -> Option<String>) -> String {
    let mut s = String::from("R,g_over_gc,g_abs,value,status\n");
    for r in records {
        let v = value(r).unwrap_or_else(|| "NaN".to_string());
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            fmt_value(r.ratio),
            fmt_value(r.g_over_gc),
            fmt_value(r.g_abs),
            v,
            r.status
        );
    }
    s
}

fn num(v: Option<f64>) -> Option<String> {
    v.map(fmt_value)
}

/// Run a sweep and write its files into `config.output_dir`.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepReport> {
    let cfg = config.resolve()?;
    let dir = &config.output_dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::config(format!("cannot create {}: {e}", dir.display())))?;
    let probe = dir.join(".write-test");
    std::fs::write(&probe, b"").map_err(|e| Error::config(format!("{} is not writable: {e}", dir.display())))?;
    let _ = std::fs::remove_file(&probe);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;

    let (records, grids) = pool.install(|| -> Result<_> {
        let solved: Vec<_> = config
            .ratios
            .par_iter()
            .map(|&r| solve_ratio(r, &cfg, config.seed_policy))
            .collect();
        let records: Vec<PointRecord> = solved
            .into_par_iter()
            .flatten()
            .map(|s| match s {
                Ok(sol) => evaluate(sol, &config.outputs, cfg.base),
                Err((m, e)) => failed_record(&m, cfg.ansatz, &e),
            })
            .collect();
        let grids = if config.outputs.contains(&Output::WignerGrids) {
            config
                .wigner_points
                .par_iter()
                .map(|&(r, k)| {
                    let sol = solve_point(r, k, cfg.ansatz)?;
                    let grid = PhaseGrid::default_for(&sol.params);
                    let field = analytic_field(&sol, &grid)?;
                    let mut buf = Vec::new();
                    write_grid_csv(&mut buf, &grid, field.get(Component::Total))
                        .map_err(|e| Error::io("<memory>", e))?;
                    Ok((format!("wigner_{}.csv", point_tag(r, k)), buf))
                })
                .collect::<Result<Vec<_>>>()?
        } else {
            Vec::new()
        };
        Ok((records, grids))
    })?;

    let mut em = Emitter { dir: dir.clone(), files: Vec::new() };
    for out in &config.outputs {
        match out {
            Output::Energy => em.write("energy.csv", scalar_csv(&records, |r| num(r.energy)).as_bytes())?,
            Output::Error => em.write("error.csv", scalar_csv(&records, |r| num(r.energy_error)).as_bytes())?,
            Output::Xi => em.write("xi.csv", scalar_csv(&records, |r| num(r.xi)).as_bytes())?,
            Output::Weights => {
                em.write("alpha.csv", scalar_csv(&records, |r| num(r.alpha)).as_bytes())?;
                em.write("beta.csv", scalar_csv(&records, |r| num(r.beta)).as_bytes())?;
            }
            Output::Displacements => {
                em.write("d_alpha.csv", scalar_csv(&records, |r| num(r.d_alpha)).as_bytes())?;
                em.write("d_beta.csv", scalar_csv(&records, |r| num(r.d_beta)).as_bytes())?;
                em.write("delta_d.csv", scalar_csv(&records, |r| num(r.delta_d)).as_bytes())?;
            }
            Output::M => em.write("m.csv", scalar_csv(&records, |r| num(r.m)).as_bytes())?,
            Output::PUp => em.write("p_up.csv", scalar_csv(&records, |r| num(r.p_up)).as_bytes())?,
            Output::Entropy => em.write("entropy.csv", scalar_csv(&records, |r| num(r.entropy)).as_bytes())?,
            Output::Negativity => {
                em.write("negativity_total.csv", scalar_csv(&records, |r| num(r.negativities.map(|n| n.total))).as_bytes())?;
                em.write("negativity_even.csv", scalar_csv(&records, |r| num(r.negativities.map(|n| n.even))).as_bytes())?;
                em.write("negativity_odd.csv", scalar_csv(&records, |r| num(r.negativities.map(|n| n.odd))).as_bytes())?;
            }
            Output::Classify => em.write(
                "classify.csv",
                scalar_csv(&records, |r| r.classification.as_ref().map(|c| c.region.to_string())).as_bytes(),
            )?,
            Output::Fock => {
                for r in &records {
                    if let Some(f) = &r.fock {
                        em.write(&format!("fock_{}.csv", point_tag(r.ratio, r.g_over_gc)), f.to_csv().as_bytes())?;
                    }
                }
            }
            Output::WignerGrids => {
                for (name, buf) in &grids {
                    em.write(name, buf)?;
                }
            }
        }
    }

    let manifest = Manifest {
        schema_version: SCHEMA_VERSION,
        tool: env!("CARGO_PKG_NAME").to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        files: em.files,
        points: records
            .iter()
            .map(|r| PointDiagnostics {
                ratio: r.ratio,
                g_over_gc: r.g_over_gc,
                status: r.status.clone(),
                warnings: r.warnings.clone(),
                energy: r.energy,
                evaluations: r.evaluations,
            })
            .collect(),
    };
    let manifest_path = dir.join("manifest.json");
    let json = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Parse(e.to_string()))?;
    std::fs::write(&manifest_path, json + "\n").map_err(|e| Error::io(&manifest_path, e))?;
    Ok(SweepReport { manifest, records, manifest_path })
}
