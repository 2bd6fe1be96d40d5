//! Curriculum samples: a concrete scene graph at a target difficulty level, its
//! description text and the yes/no questions that score a rendition of it.
//!
//! Level `l` is the difficulty band `(l - 1, l]`.

mod questions;
mod text;

use std::io::{BufRead, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use questions::{generate_questions, Probe, Question, QuestionCategory};
pub use text::{
    check_prompt, fallback_render, generate_prompt, number_word, plural, FidelityReport,
    PromptSource, RenderedPrompt, COUNT_WINDOW,
};

use crate::assets::{instantiate, AssetError, AssetLibrary, InstantiateOptions, LlmClient, RelationResolver};
use crate::rng::{derive_indexed, from_seed, indexed_stream, stream};
use crate::sampler::{sample_graph, DifficultyRange, SamplerConfig, SamplerError};
use crate::scene_graph::{difficulty_variant, rational_to_f64, Rational, SceneGraph};

pub const LEVELS: u32 = 10;

#[derive(Debug, thiserror::Error)]
pub enum CurriculumError {
    #[error("level {0} outside 1..={LEVELS}")]
    InvalidLevel(u32),
    #[error("invalid level weights: {0}")]
    InvalidWeights(String),
    #[error("no graph found for level {level} after {attempts} sampler runs")]
    SampleFailed { level: u32, attempts: usize },
    #[error(transparent)]
    Sampler(#[from] SamplerError),
    #[error(transparent)]
    Asset(#[from] AssetError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub sampler_seed: u64,
    pub config_digest: String,
    pub attempts: usize,
    pub prompt_source: PromptSource,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurriculumSample {
    pub id: usize,
    pub level: u32,
    pub difficulty: f64,
    /// Exact difficulty as `numer/denom`.
    pub difficulty_exact: String,
    pub graph: SceneGraph,
    pub prompt: String,
    pub questions: Vec<Question>,
    pub provenance: Provenance,
}

/// Level whose band `(l - 1, l]` holds `d`, clamped to `1..=LEVELS`.
pub fn level_of(d: Rational) -> u32 {
    (d.ceil().to_integer() as u32).clamp(1, LEVELS)
}

pub fn level_range(level: u32, cfg: &SamplerConfig, concept_cap: usize) -> Result<DifficultyRange, CurriculumError> {
    if !(1..=LEVELS).contains(&level) {
        return Err(CurriculumError::InvalidLevel(level));
    }
    Ok(DifficultyRange::half_open(
        Rational::from_integer(u64::from(level) - 1),
        Rational::from_integer(u64::from(level)),
        cfg.max_objects,
        concept_cap,
        cfg.measure,
    )?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DatasetPreset {
    Uniform,
    SkewEasy,
    SkewDifficult,
}

impl DatasetPreset {
    pub fn weights(self) -> Vec<f64> {
        let active: Vec<u32> = match self {
            DatasetPreset::Uniform => (1..=LEVELS).collect(),
            DatasetPreset::SkewEasy => vec![1, 2, 3],
            DatasetPreset::SkewDifficult => vec![8, 9, 10],
        };
        (1..=LEVELS)
            .map(|l| if active.contains(&l) { 1.0 / active.len() as f64 } else { 0.0 })
            .collect()
    }
}

impl std::str::FromStr for DatasetPreset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(DatasetPreset::Uniform),
            "skew-easy" => Ok(DatasetPreset::SkewEasy),
            "skew-difficult" => Ok(DatasetPreset::SkewDifficult),
            other => Err(format!("unknown preset `{other}` (uniform, skew-easy, skew-difficult)")),
        }
    }
}

/// Per-level sample counts by largest-remainder rounding; ties go to the
/// lower level.
pub fn level_counts(n: usize, weights: &[f64]) -> Result<Vec<usize>, CurriculumError> {
    if weights.len() != LEVELS as usize {
        return Err(CurriculumError::InvalidWeights(format!(
            "expected {LEVELS} weights, got {}",
            weights.len()
        )));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(CurriculumError::InvalidWeights("negative or non-finite weight".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(CurriculumError::InvalidWeights(format!("weights sum to {total}")));
    }
    let exact: Vec<f64> = weights.iter().map(|w| w * n as f64).collect();
    let mut counts: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&a, &b| {
        let fa = exact[a] - exact[a].floor();
        let fb = exact[b] - exact[b].floor();
        fb.total_cmp(&fa).then(a.cmp(&b))
    });
    let short = n - counts.iter().sum::<usize>();
    for &i in order.iter().filter(|&&i| weights[i] > 0.0).take(short) {
        counts[i] += 1;
    }
    Ok(counts)
}

/// Everything a sample build needs besides its index and level.
pub struct BuildContext<'a> {
    pub library: &'a AssetLibrary,
    pub client: &'a dyn LlmClient,
    pub sampler: SamplerConfig,
    pub instantiate: InstantiateOptions,
    /// Sampler runs per sample before giving up.
    pub max_attempts: usize,
    pub prompt_retries: usize,
    pub config_digest: String,
    pub seed: u64,
}

impl<'a> BuildContext<'a> {
    pub fn new(library: &'a AssetLibrary, client: &'a dyn LlmClient, seed: u64) -> Self {
        Self {
            library,
            client,
            sampler: SamplerConfig::default(),
            instantiate: InstantiateOptions::default(),
            max_attempts: 20,
            prompt_retries: 3,
            config_digest: String::new(),
            seed,
        }
    }
}

struct AbstractDraw {
    graph: SceneGraph,
    seed: u64,
    attempts: usize,
}

fn sample_abstract(index: usize, level: u32, ctx: &BuildContext<'_>) -> Result<AbstractDraw, CurriculumError> {
    let cap = ctx.library.concept_capacity();
    let range = level_range(level, &ctx.sampler, cap)?;
    for attempt in 0..ctx.max_attempts.max(1) {
        let seed = derive_indexed(ctx.seed, &format!("sample{index}"), attempt as u64);
        let cfg = SamplerConfig { seed, ..ctx.sampler.clone() };
        let res = sample_graph(&range, &cfg, cap, &mut from_seed(seed));
        if res.success {
            return Ok(AbstractDraw { graph: res.graph, seed, attempts: attempt + 1 });
        }
    }
    Err(CurriculumError::SampleFailed { level, attempts: ctx.max_attempts.max(1) })
}

fn bind(
    index: usize,
    draw: &AbstractDraw,
    ctx: &BuildContext<'_>,
    resolver: &RelationResolver<'_>,
) -> Result<SceneGraph, CurriculumError> {
    let mut rng = indexed_stream(ctx.seed, "instantiate", index as u64);
    Ok(instantiate(&draw.graph, ctx.library, &mut rng, resolver, &ctx.instantiate)?)
}

fn finish(index: usize, level: u32, graph: SceneGraph, draw: &AbstractDraw, ctx: &BuildContext<'_>) -> CurriculumSample {
    let d = difficulty_variant(&graph, ctx.sampler.measure).expect("sampled graphs have objects");
    let prompt = generate_prompt(&graph, ctx.client, ctx.prompt_retries);
    CurriculumSample {
        id: index,
        level,
        difficulty: rational_to_f64(d),
        difficulty_exact: d.to_string(),
        questions: generate_questions(&graph),
        prompt: prompt.text,
        graph,
        provenance: Provenance {
            sampler_seed: draw.seed,
            config_digest: ctx.config_digest.clone(),
            attempts: draw.attempts,
            prompt_source: prompt.source,
        },
    }
}

/// Samples a graph in the level's band, binds assets, renders the prompt and
/// generates questions.
pub fn build_sample(
    index: usize,
    level: u32,
    ctx: &BuildContext<'_>,
    resolver: &RelationResolver<'_>,
) -> Result<CurriculumSample, CurriculumError> {
    let draw = sample_abstract(index, level, ctx)?;
    let graph = bind(index, &draw, ctx, resolver)?;
    Ok(finish(index, level, graph, &draw, ctx))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleFailure {
    pub index: usize,
    pub level: u32,
    pub error: String,
}

pub struct DatasetOutcome {
    pub samples: Vec<CurriculumSample>,
    pub failures: Vec<SampleFailure>,
    /// Relations generated during this build, ready to merge into the library.
    pub learned_relations: std::collections::BTreeMap<String, crate::assets::RelationAsset>,
}

/// Builds `n` samples with per-level counts from `weights`, in a shuffled but
/// seed-determined level order.
///
/// Graph sampling and text generation run in parallel. Asset binding runs in
/// index order so that the relation cache, and therefore the output, does not
/// depend on thread scheduling.
pub fn build_dataset(n: usize, weights: &[f64], ctx: &BuildContext<'_>) -> Result<DatasetOutcome, CurriculumError> {
    let counts = level_counts(n, weights)?;
    let mut levels: Vec<u32> = counts
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| std::iter::repeat_n(i as u32 + 1, c))
        .collect();
    levels.shuffle(&mut stream(ctx.seed, "dataset-order"));

    let draws: Vec<Result<AbstractDraw, CurriculumError>> = levels
        .par_iter()
        .enumerate()
        .map(|(i, &level)| sample_abstract(i, level, ctx))
        .collect();

    let resolver = RelationResolver::new(ctx.library, ctx.client, ctx.instantiate.retry_cap);
    let mut failures = Vec::new();
    let mut bound = Vec::new();
    for (i, draw) in draws.into_iter().enumerate() {
        let level = levels[i];
        match draw.and_then(|d| bind(i, &d, ctx, &resolver).map(|g| (d, g))) {
            Ok((d, g)) => bound.push((i, level, d, g)),
            Err(e) => {
                log::warn!("sample {i} (level {level}) failed: {e}");
                failures.push(SampleFailure { index: i, level, error: e.to_string() });
            }
        }
    }

    let samples: Vec<CurriculumSample> = bound
        .into_par_iter()
        .map(|(i, level, d, g)| finish(i, level, g, &d, ctx))
        .collect();
    Ok(DatasetOutcome {
        samples,
        failures,
        learned_relations: resolver.learned(),
    })
}

pub fn write_jsonl<W: Write>(samples: &[CurriculumSample], mut out: W) -> Result<(), CurriculumError> {
    for s in samples {
        serde_json::to_writer(&mut out, s)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_jsonl(path: &Path) -> Result<Vec<CurriculumSample>, CurriculumError> {
    let file = std::io::BufReader::new(std::fs::File::open(path)?);
    let mut out = Vec::new();
    for line in file.lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(serde_json::from_str(&line)?);
        }
    }
    Ok(out)
}
