//! Configuration, manifests and the five pipeline commands.
//!
//! A run is described by a TOML [`PipelineConfig`]; command-line flags in
//! [`Overrides`] win over file values. Every random choice is derived from
//! the global seed through named sub-streams.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::assets::llm::{Fixture, FixtureClient, HttpLlmClient, RecordingClient, TemplateClient};
use crate::assets::{builtin_library, generate_library, AssetError, AssetLibrary, LlmClient, LlmError, CATEGORIES};
use crate::cgrpo::{
    split_heldout, sim_train, write_trace_jsonl, CgrpoConfig, CgrpoError, MockOracle, SimConfig, WeightingMode,
};
use crate::curriculum::{
    build_dataset, read_jsonl, write_jsonl, BuildContext, CurriculumError, DatasetPreset, SampleFailure,
};
use crate::rng::{derive_indexed, derive_seed};
use crate::sampler::{run_trials, BandPreset, SamplerConfig, SamplerError, SamplerMethod, TrialReport};
use crate::scheduler::{write_trace_csv, SchedulerError, SchedulerKind, SchedulerParams};

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Asset(#[from] AssetError),
    #[error(transparent)]
    Llm(#[from] LlmError),
    #[error(transparent)]
    Curriculum(#[from] CurriculumError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Scheduler(#[from] SchedulerError),
    #[error(transparent)]
    Cgrpo(#[from] CgrpoError),
    #[error("dataset build produced no samples ({failures} failures, first: {first})")]
    NoSamples { failures: usize, first: String, external: bool },
}

impl PipelineError {
    /// 2 for failures of an external service, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        let external = match self {
            PipelineError::Asset(e) => e.is_external(),
            PipelineError::Llm(e) => e.is_external(),
            PipelineError::Curriculum(CurriculumError::Asset(e)) => e.is_external(),
            PipelineError::NoSamples { external, .. } => *external,
            _ => false,
        };
        if external { 2 } else { 1 }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io { path: path.to_path_buf(), source }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum AssetMode {
    /// Deterministic library compiled into the crate.
    #[default]
    Builtin,
    /// A chat-completions endpoint configured by environment variables.
    Live,
    /// Replays responses recorded from a live run.
    Fixture,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AssetsConfig {
    pub mode: AssetMode,
    /// Defaults to `<output_dir>/library.json`.
    pub library: Option<PathBuf>,
    /// Responses to replay in fixture mode, or to record into in live mode.
    pub fixture: Option<PathBuf>,
    pub retry_cap: usize,
    pub max_in_flight: usize,
}

impl Default for AssetsConfig {
    fn default() -> Self {
        Self {
            mode: AssetMode::Builtin,
            library: None,
            fixture: None,
            retry_cap: crate::assets::DEFAULT_RETRY_CAP,
            max_in_flight: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    pub size: usize,
    pub preset: DatasetPreset,
    /// Explicit per-level weights; overrides `preset`.
    pub weights: Option<Vec<f64>>,
    /// Defaults to `<output_dir>/dataset.jsonl`.
    pub path: Option<PathBuf>,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self { size: 500, preset: DatasetPreset::Uniform, weights: None, path: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleConfig {
    pub kind: SchedulerKind,
    pub params: SchedulerParams,
}

impl Default for ScheduleConfig {
    fn default() -> Self {
        Self { kind: SchedulerKind::Gaussian, params: SchedulerParams::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub steps: usize,
    pub seeds: usize,
    pub schedulers: Vec<SchedulerKind>,
    pub smoothing: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { steps: 200, seeds: 5, schedulers: SchedulerKind::ALL.to_vec(), smoothing: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    /// Trials per (band, method) cell for `sample-graphs`.
    pub trials: usize,
    pub assets: AssetsConfig,
    pub sampler: SamplerConfig,
    pub dataset: DatasetConfig,
    pub scheduler: ScheduleConfig,
    pub cgrpo: CgrpoConfig,
    pub sim: SimConfig,
    pub train: TrainConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: 2024,
            output_dir: PathBuf::from("out"),
            trials: 1000,
            assets: AssetsConfig::default(),
            sampler: SamplerConfig::default(),
            dataset: DatasetConfig::default(),
            scheduler: ScheduleConfig::default(),
            cgrpo: CgrpoConfig::default(),
            sim: SimConfig::default(),
            train: TrainConfig::default(),
        }
    }
}

/// Flags that override file values.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct Overrides {
    /// Global seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory for every artifact.
    #[arg(long, global = true)]
    pub output_dir: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub mode: Option<AssetMode>,
    /// Asset library JSON path.
    #[arg(long, global = true)]
    pub library: Option<PathBuf>,
    /// Recorded LLM responses.
    #[arg(long, global = true)]
    pub fixture: Option<PathBuf>,
    /// Trials per cell for sample-graphs.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Annealing iterations per sampler run.
    #[arg(long, global = true)]
    pub max_iterations: Option<usize>,
    /// Number of dataset samples.
    #[arg(long, global = true)]
    pub size: Option<usize>,
    /// uniform, skew-easy or skew-difficult.
    #[arg(long, global = true)]
    pub preset: Option<DatasetPreset>,
    /// Dataset JSONL path.
    #[arg(long, global = true)]
    pub dataset: Option<PathBuf>,
    /// random, easy_to_hard or gaussian.
    #[arg(long, global = true)]
    pub scheduler: Option<SchedulerKind>,
    /// Number of difficulty levels for schedule.
    #[arg(long, global = true)]
    pub levels: Option<usize>,
    /// Schedule length for schedule.
    #[arg(long, global = true)]
    pub total_steps: Option<usize>,
    #[arg(long, global = true)]
    pub beta: Option<f64>,
    #[arg(long, global = true)]
    pub sigma: Option<f64>,
    /// Optimizer steps per simulated run.
    #[arg(long, global = true)]
    pub steps: Option<usize>,
    /// Seeds per scheduler for train-sim.
    #[arg(long, global = true)]
    pub seeds: Option<usize>,
    /// level-weight or sampling-only.
    #[arg(long, global = true)]
    pub weighting: Option<WeightingMode>,
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, PipelineError> {
        toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        Self::from_toml(&std::fs::read_to_string(path).map_err(io_err(path))?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn apply(&mut self, o: &Overrides) {
        macro_rules! set {
            ($src:expr => $dst:expr) => {
                if let Some(v) = $src.clone() {
                    $dst = v;
                }
            };
        }
        set!(o.seed => self.seed);
        set!(o.output_dir => self.output_dir);
        set!(o.mode => self.assets.mode);
        set!(o.trials => self.trials);
        set!(o.max_iterations => self.sampler.max_iterations);
        set!(o.size => self.dataset.size);
        set!(o.preset => self.dataset.preset);
        set!(o.scheduler => self.scheduler.kind);
        set!(o.levels => self.scheduler.params.levels);
        set!(o.total_steps => self.scheduler.params.total_steps);
        set!(o.beta => self.scheduler.params.beta);
        set!(o.sigma => self.scheduler.params.sigma);
        set!(o.steps => self.train.steps);
        set!(o.seeds => self.train.seeds);
        set!(o.weighting => self.cgrpo.mode);
        if o.library.is_some() {
            self.assets.library = o.library.clone();
        }
        if o.fixture.is_some() {
            self.assets.fixture = o.fixture.clone();
        }
        if o.dataset.is_some() {
            self.dataset.path = o.dataset.clone();
        }
        if o.preset.is_some() {
            self.dataset.weights = None;
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        self.sampler.validate()?;
        self.cgrpo.validate()?;
        if self.assets.mode == AssetMode::Fixture && self.assets.fixture.is_none() {
            return Err(PipelineError::Config("fixture mode needs `assets.fixture`".into()));
        }
        if self.assets.max_in_flight == 0 {
            return Err(PipelineError::Config("assets.max_in_flight must be positive".into()));
        }
        if let Some(w) = &self.dataset.weights {
            crate::curriculum::level_counts(0, w)?;
        }
        Ok(())
    }

    /// SHA-256 of the config as JSON with sorted keys.
    pub fn digest(&self) -> String {
        let value = serde_json::to_value(self).expect("config serializes");
        hex::encode(Sha256::digest(serde_json::to_string(&value).expect("json").as_bytes()))
    }

    pub fn library_path(&self) -> PathBuf {
        self.assets.library.clone().unwrap_or_else(|| self.output_dir.join("library.json"))
    }

    pub fn dataset_path(&self) -> PathBuf {
        self.dataset.path.clone().unwrap_or_else(|| self.output_dir.join("dataset.jsonl"))
    }

    fn level_weights(&self) -> Vec<f64> {
        self.dataset.weights.clone().unwrap_or_else(|| self.dataset.preset.weights())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub config_digest: String,
    pub seed: u64,
    pub artifacts: Vec<String>,
    pub versions: BTreeMap<String, String>,
    pub timings_ms: BTreeMap<String, u64>,
    pub counts: BTreeMap<String, usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<SampleFailure>,
}

impl RunManifest {
    fn new(command: &str, config: &PipelineConfig) -> Self {
        let mut versions = BTreeMap::new();
        versions.insert("compgen".to_string(), env!("CARGO_PKG_VERSION").to_string());
        Self {
            command: command.to_string(),
            config_digest: config.digest(),
            seed: config.seed,
            versions,
            ..Default::default()
        }
    }

    fn time(&mut self, stage: &str, start: Instant) {
        self.timings_ms.insert(stage.to_string(), start.elapsed().as_millis() as u64);
    }

    fn artifact(&mut self, path: &Path) {
        self.artifacts.push(path.display().to_string());
    }
}

/// Result of a command: its manifest and a human-readable summary.
#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub manifest: RunManifest,
    pub summary: String,
}

fn ensure_parent(path: &Path) -> Result<(), PipelineError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    Ok(())
}

/// Writes through a temporary sibling so readers never see partial files.
fn write_file(path: &Path, bytes: &[u8]) -> Result<(), PipelineError> {
    ensure_parent(path)?;
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes).map_err(io_err(&tmp))?;
    std::fs::rename(&tmp, path).map_err(io_err(path))
}

fn write_manifest(config: &PipelineConfig, manifest: &RunManifest) -> Result<PathBuf, PipelineError> {
    let path = config.output_dir.join(format!("{}.manifest.json", manifest.command));
    let json = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    write_file(&path, json.as_bytes())?;
    Ok(path)
}

fn merge_fixture(path: &Path, recorded: Fixture) -> Result<(), PipelineError> {
    let mut fixture = if path.exists() { Fixture::load(path)? } else { Fixture::default() };
    for (k, v) in recorded.entries {
        fixture.entries.entry(k).or_insert(v);
    }
    ensure_parent(path)?;
    fixture.save(path)?;
    Ok(())
}

/// Runs `f` with the client the asset mode calls for, then saves any
/// responses recorded in live mode.
fn with_client<T>(
    config: &PipelineConfig,
    f: impl FnOnce(&dyn LlmClient) -> Result<T, PipelineError>,
) -> Result<T, PipelineError> {
    match config.assets.mode {
        AssetMode::Builtin => f(&TemplateClient),
        AssetMode::Fixture => {
            let path = config.assets.fixture.as_ref().expect("validated");
            f(&FixtureClient::load(path)?)
        }
        AssetMode::Live => {
            let client = RecordingClient::new(HttpLlmClient::from_env(config.assets.max_in_flight)?);
            let out = f(&client);
            if let Some(path) = &config.assets.fixture {
                merge_fixture(path, client.fixture())?;
            }
            out
        }
    }
}

fn load_library(config: &PipelineConfig) -> Result<AssetLibrary, PipelineError> {
    let path = config.library_path();
    if path.exists() {
        Ok(AssetLibrary::load(&path)?)
    } else if config.assets.mode == AssetMode::Builtin {
        Ok(builtin_library())
    } else {
        Err(PipelineError::Config(format!(
            "library {} not found; run gen-assets first",
            path.display()
        )))
    }
}

pub fn cmd_gen_assets(config: &PipelineConfig) -> Result<CommandOutput, PipelineError> {
    config.validate()?;
    let mut manifest = RunManifest::new("gen-assets", config);
    let start = Instant::now();
    let library = match config.assets.mode {
        AssetMode::Builtin => builtin_library(),
        _ => {
            let categories: Vec<String> = CATEGORIES.iter().map(|c| c.to_string()).collect();
            with_client(config, |client| Ok(generate_library(&categories, client, config.assets.retry_cap)?))?
        }
    };
    manifest.time("generate", start);
    let path = config.library_path();
    ensure_parent(&path)?;
    library.save(&path)?;
    manifest.artifact(&path);
    manifest.counts.insert("objects".into(), library.objects.len());
    manifest.counts.insert("catalogs".into(), library.catalogs.len());
    manifest.counts.insert("relations".into(), library.relations.len());
    write_manifest(config, &manifest)?;
    let summary = format!(
        "{} objects, {} catalogs, {} cached relations -> {}",
        library.objects.len(),
        library.catalogs.len(),
        library.relations.len(),
        path.display()
    );
    Ok(CommandOutput { manifest, summary })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReportFile {
    pub config_digest: String,
    pub trials: usize,
    pub max_iterations: usize,
    pub cells: Vec<TrialReport>,
}

/// Methods as rows, bands as column pairs of success rate and median
/// iterations-to-target.
pub fn render_trial_table(cells: &[TrialReport]) -> String {
    let mut out = String::new();
    let _ = write!(out, "{:<18}", "method");
    for band in BandPreset::ALL {
        let _ = write!(out, "{:>10}{:>6}", format!("{} SR", band.name()), "NTD");
    }
    out.push('\n');
    for method in SamplerMethod::ALL {
        let _ = write!(out, "{:<18}", method.name());
        for band in BandPreset::ALL {
            match cells.iter().find(|c| c.method == method.name() && c.band == band.name()) {
                Some(c) => {
                    let _ = write!(out, "{:>9.2}%{:>6}", 100.0 * c.success_rate, c.ntd);
                }
                None => {
                    let _ = write!(out, "{:>10}{:>6}", "-", "-");
                }
            }
        }
        out.push('\n');
    }
    out
}

pub fn cmd_sample_graphs(config: &PipelineConfig) -> Result<CommandOutput, PipelineError> {
    config.validate()?;
    let mut manifest = RunManifest::new("sample-graphs", config);
    let library = load_library(config)?;
    let mut sampler = config.sampler.clone();
    sampler.seed = derive_seed(config.seed, "sampler");
    let start = Instant::now();
    let mut cells = Vec::new();
    for band in BandPreset::ALL {
        let range = band.range(&sampler, library.concept_capacity())?;
        for method in SamplerMethod::ALL {
            cells.push(run_trials(config.trials, band.name(), &range, &sampler, &library, method));
        }
    }
    manifest.time("trials", start);
    let report = TrialReportFile {
        config_digest: manifest.config_digest.clone(),
        trials: config.trials,
        max_iterations: sampler.max_iterations,
        cells,
    };
    let table = render_trial_table(&report.cells);
    let json_path = config.output_dir.join("trial_report.json");
    let text_path = config.output_dir.join("trial_report.txt");
    write_file(&json_path, serde_json::to_string_pretty(&report).expect("json").as_bytes())?;
    write_file(&text_path, table.as_bytes())?;
    manifest.artifact(&json_path);
    manifest.artifact(&text_path);
    manifest.counts.insert("cells".into(), report.cells.len());
    write_manifest(config, &manifest)?;
    Ok(CommandOutput { manifest, summary: table })
}

pub fn cmd_build_dataset(config: &PipelineConfig) -> Result<CommandOutput, PipelineError> {
    config.validate()?;
    let mut manifest = RunManifest::new("build-dataset", config);
    let library = load_library(config)?;
    let weights = config.level_weights();
    let start = Instant::now();
    let outcome = with_client(config, |client| {
        let mut ctx = BuildContext::new(&library, client, config.seed);
        ctx.sampler = config.sampler.clone();
        ctx.config_digest = manifest.config_digest.clone();
        Ok(build_dataset(config.dataset.size, &weights, &ctx)?)
    })?;
    manifest.time("build", start);
    if outcome.samples.is_empty() && !outcome.failures.is_empty() {
        return Err(PipelineError::NoSamples {
            failures: outcome.failures.len(),
            first: outcome.failures[0].error.clone(),
            external: config.assets.mode == AssetMode::Live,
        });
    }
    let path = config.dataset_path();
    let mut buf = Vec::new();
    write_jsonl(&outcome.samples, &mut buf)?;
    write_file(&path, &buf)?;
    manifest.artifact(&path);
    let mut per_level = [0usize; crate::curriculum::LEVELS as usize];
    for s in &outcome.samples {
        per_level[s.level as usize - 1] += 1;
    }
    manifest.counts.insert("samples".into(), outcome.samples.len());
    manifest.counts.insert("failures".into(), outcome.failures.len());
    manifest.counts.insert("learned_relations".into(), outcome.learned_relations.len());
    for (i, n) in per_level.iter().enumerate() {
        manifest.counts.insert(format!("level_{:02}", i + 1), *n);
    }
    manifest.failures = outcome.failures;
    write_manifest(config, &manifest)?;
    let levels: Vec<String> = per_level.iter().map(|n| n.to_string()).collect();
    let summary = format!(
        "{} samples ({} failed) -> {}\nper level: {}",
        outcome.samples.len(),
        manifest.failures.len(),
        path.display(),
        levels.join(" ")
    );
    Ok(CommandOutput { manifest, summary })
}

pub fn cmd_schedule(config: &PipelineConfig) -> Result<CommandOutput, PipelineError> {
    let mut manifest = RunManifest::new("schedule", config);
    let kind = config.scheduler.kind;
    let params = &config.scheduler.params;
    params.validate()?;
    let mut buf = Vec::new();
    write_trace_csv(kind, params, &mut buf)?;
    let path = config.output_dir.join(format!("schedule_{}.csv", kind.name()));
    write_file(&path, &buf)?;
    manifest.artifact(&path);
    manifest.counts.insert("rows".into(), params.total_steps);
    write_manifest(config, &manifest)?;
    let summary = format!(
        "{} schedule, {} levels x {} steps -> {}",
        kind.name(),
        params.levels,
        params.total_steps,
        path.display()
    );
    Ok(CommandOutput { manifest, summary })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchedulerSummary {
    pub scheduler: SchedulerKind,
    pub seeds: Vec<u64>,
    pub initial_heldout: Vec<f64>,
    pub final_heldout: Vec<f64>,
    pub mean_initial: f64,
    pub mean_final: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainSummary {
    pub config_digest: String,
    pub steps: usize,
    pub heldout_size: usize,
    pub schedulers: Vec<SchedulerSummary>,
    /// Pairwise `mean_final(a) >= mean_final(b)`, keyed `"a>=b"`.
    pub orderings: BTreeMap<String, bool>,
}

impl TrainSummary {
    pub fn mean_final(&self, kind: SchedulerKind) -> Option<f64> {
        self.schedulers.iter().find(|s| s.scheduler == kind).map(|s| s.mean_final)
    }
}

pub fn cmd_train_sim(config: &PipelineConfig) -> Result<CommandOutput, PipelineError> {
    config.validate()?;
    let mut manifest = RunManifest::new("train-sim", config);
    let path = config.dataset_path();
    if !path.exists() {
        return Err(PipelineError::Config(format!(
            "dataset {} not found; run build-dataset first",
            path.display()
        )));
    }
    let data = read_jsonl(&path)?;
    let oracle = MockOracle { smoothing: config.train.smoothing };
    let seeds: Vec<u64> = (0..config.train.seeds as u64)
        .map(|i| derive_indexed(config.seed, "train", i))
        .collect();
    let runs: Vec<(SchedulerKind, usize)> = config
        .train
        .schedulers
        .iter()
        .flat_map(|&k| (0..seeds.len()).map(move |i| (k, i)))
        .collect();
    let start = Instant::now();
    let outcomes = runs
        .par_iter()
        .map(|&(kind, i)| {
            let (train, heldout) = split_heldout(&data, seeds[i]);
            let out = sim_train(
                &train,
                &heldout,
                kind,
                &config.scheduler.params,
                &config.cgrpo,
                &config.sim,
                &oracle,
                config.train.steps,
                seeds[i],
            )?;
            Ok((out, heldout.len()))
        })
        .collect::<Result<Vec<_>, CgrpoError>>()?;
    manifest.time("train", start);

    let trace_dir = config.output_dir.join("traces");
    let mut summaries = Vec::new();
    let mut heldout_size = 0;
    for kind in &config.train.schedulers {
        let mut s = SchedulerSummary {
            scheduler: *kind,
            seeds: seeds.clone(),
            initial_heldout: Vec::new(),
            final_heldout: Vec::new(),
            mean_initial: 0.0,
            mean_final: 0.0,
        };
        for ((k, i), (out, held)) in runs.iter().zip(&outcomes) {
            if k != kind {
                continue;
            }
            heldout_size = *held;
            let mut buf = Vec::new();
            write_trace_jsonl(&out.trace, &mut buf)?;
            let p = trace_dir.join(format!("{}_seed{}.jsonl", kind.name(), i));
            write_file(&p, &buf)?;
            manifest.artifact(&p);
            s.initial_heldout.push(out.initial_heldout);
            s.final_heldout.push(out.final_heldout);
        }
        let n = s.final_heldout.len().max(1) as f64;
        s.mean_initial = s.initial_heldout.iter().sum::<f64>() / n;
        s.mean_final = s.final_heldout.iter().sum::<f64>() / n;
        summaries.push(s);
    }
    let mut orderings = BTreeMap::new();
    for a in &summaries {
        for b in &summaries {
            if a.scheduler != b.scheduler {
                orderings.insert(format!("{}>={}", a.scheduler.name(), b.scheduler.name()), a.mean_final >= b.mean_final);
            }
        }
    }
    let summary = TrainSummary {
        config_digest: manifest.config_digest.clone(),
        steps: config.train.steps,
        heldout_size,
        schedulers: summaries,
        orderings,
    };
    let summary_path = config.output_dir.join("train_summary.json");
    write_file(&summary_path, serde_json::to_string_pretty(&summary).expect("json").as_bytes())?;
    manifest.artifact(&summary_path);
    manifest.counts.insert("traces".into(), outcomes.len());
    write_manifest(config, &manifest)?;

    let mut text = format!("{:<14}{:>10}{:>10}\n", "scheduler", "initial", "final");
    for s in &summary.schedulers {
        let _ = writeln!(text, "{:<14}{:>10.4}{:>10.4}", s.scheduler.name(), s.mean_initial, s.mean_final);
    }
    Ok(CommandOutput { manifest, summary: text })
}
