//! Curriculum-weighted group-relative policy optimization.
//!
//! Rewards are per-question oracle probabilities averaged per rendition,
//! optionally weighted by the scheduler's probability of the sample's level.
//! Advantages are normalized within each group with the population standard
//! deviation, and the objective is the clipped ratio surrogate minus a KL
//! penalty against a reference policy.

mod oracle;
mod sim;

pub use oracle::{mock_oracle, HttpOracle, MockOracle, OracleError, Rendition, RewardOracle, TableOracle};
pub use sim::{
    bernoulli_kl, evaluate_heldout, sim_train, split_heldout, write_trace_jsonl, Decision, ElementKind,
    GroupRollout, SimConfig, SimPolicy, TraceRecord, TrainOutcome, HELDOUT_LEVELS, HELDOUT_SIZE,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curriculum::Question;
use crate::scheduler::{distribution, SchedulerError, SchedulerKind, SchedulerParams};

#[derive(Debug, thiserror::Error)]
pub enum CgrpoError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("no questions to score")]
    NoQuestions,
    #[error("every reward was excluded")]
    AllExcluded,
    #[error("group of size {0}; at least 2 renditions are required")]
    GroupTooSmall(usize),
    #[error("non-finite {what} at rendition {index}")]
    NonFinite { what: &'static str, index: usize },
    #[error("dataset has no usable training samples")]
    EmptyDataset,
    #[error(transparent)]
    Scheduler(#[from] SchedulerError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightingMode {
    /// Rewards are scaled by `p(t, level)` of the drawn sample.
    LevelWeight,
    /// The schedule only decides which levels are drawn.
    #[default]
    SamplingOnly,
}

impl std::str::FromStr for WeightingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "level-weight" | "level_weight" => Ok(WeightingMode::LevelWeight),
            "sampling-only" | "sampling_only" => Ok(WeightingMode::SamplingOnly),
            other => Err(format!("unknown weighting mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CgrpoConfig {
    pub group_size: usize,
    pub clip_epsilon: f64,
    pub kl_coef: f64,
    pub std_guard: f64,
    pub mode: WeightingMode,
    /// Score a random subset of this many questions per group.
    pub question_subsample: Option<usize>,
}

impl Default for CgrpoConfig {
    fn default() -> Self {
        Self {
            group_size: 8,
            clip_epsilon: 0.2,
            kl_coef: 0.01,
            std_guard: 1e-8,
            mode: WeightingMode::SamplingOnly,
            question_subsample: None,
        }
    }
}

impl CgrpoConfig {
    pub fn validate(&self) -> Result<(), CgrpoError> {
        let bad = |m: String| Err(CgrpoError::InvalidConfig(m));
        if self.group_size < 2 {
            return bad(format!("group_size must be >= 2, got {}", self.group_size));
        }
        if !(self.clip_epsilon > 0.0 && self.clip_epsilon < 1.0) {
            return bad(format!("clip_epsilon must be in (0, 1), got {}", self.clip_epsilon));
        }
        if !(self.kl_coef >= 0.0 && self.kl_coef.is_finite()) {
            return bad(format!("kl_coef must be >= 0, got {}", self.kl_coef));
        }
        if !(self.std_guard > 0.0) {
            return bad(format!("std_guard must be > 0, got {}", self.std_guard));
        }
        if self.question_subsample == Some(0) {
            return bad("question_subsample must be positive".into());
        }
        Ok(())
    }
}

/// One score per question, in order. Oracle failures become `None`.
pub fn question_rewards(
    rendition: &Rendition,
    questions: &[Question],
    oracle: &dyn RewardOracle,
) -> Result<Vec<Option<f64>>, CgrpoError> {
    if questions.is_empty() {
        return Err(CgrpoError::NoQuestions);
    }
    Ok(questions
        .iter()
        .map(|q| match oracle.score(q, rendition) {
            Ok(p) => Some(p.clamp(0.0, 1.0)),
            Err(e) => {
                log::warn!("excluding `{}`: {e}", q.text);
                None
            }
        })
        .collect())
}

/// Scores the renditions of one group concurrently.
pub fn group_rewards(
    renditions: &[Rendition],
    questions: &[Question],
    oracle: &dyn RewardOracle,
) -> Result<Vec<Vec<Option<f64>>>, CgrpoError> {
    renditions
        .par_iter()
        .map(|r| question_rewards(r, questions, oracle))
        .collect()
}

pub fn curriculum_weight(
    level: usize,
    t: usize,
    kind: SchedulerKind,
    params: &SchedulerParams,
    mode: WeightingMode,
) -> Result<f64, CgrpoError> {
    if !(1..=params.levels).contains(&level) {
        return Err(CgrpoError::InvalidConfig(format!("level {level} outside 1..={}", params.levels)));
    }
    match mode {
        WeightingMode::SamplingOnly => Ok(1.0),
        WeightingMode::LevelWeight => Ok(distribution(kind, t, params)?.p(level)),
    }
}

/// `weight * mean(rewards)` over the non-missing entries.
pub fn overall_reward(rewards: &[Option<f64>], weight: f64) -> Result<f64, CgrpoError> {
    let kept: Vec<f64> = rewards.iter().flatten().copied().collect();
    if kept.is_empty() {
        return Err(CgrpoError::AllExcluded);
    }
    Ok(weight * kept.iter().sum::<f64>() / kept.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdvantageSet {
    pub values: Vec<f64>,
    pub mean: f64,
    pub std: f64,
    /// True when the spread fell under the guard and everything was zeroed.
    pub degenerate: bool,
}

pub fn advantages(rewards: &[f64], guard: f64) -> Result<AdvantageSet, CgrpoError> {
    if rewards.len() < 2 {
        return Err(CgrpoError::GroupTooSmall(rewards.len()));
    }
    let n = rewards.len() as f64;
    let mean = rewards.iter().sum::<f64>() / n;
    let std = (rewards.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / n).sqrt();
    let degenerate = !(std >= guard);
    let values = if degenerate {
        vec![0.0; rewards.len()]
    } else {
        rewards.iter().map(|r| (r - mean) / std).collect()
    };
    Ok(AdvantageSet { values, mean, std, degenerate })
}

pub fn clipped_term(ratio: f64, advantage: f64, epsilon: f64) -> f64 {
    let clipped = ratio.clamp(1.0 - epsilon, 1.0 + epsilon);
    (ratio * advantage).min(clipped * advantage)
}

/// True when `clipped_term` is locally constant in the ratio.
pub fn is_clipped(ratio: f64, advantage: f64, epsilon: f64) -> bool {
    (advantage > 0.0 && ratio >= 1.0 + epsilon) || (advantage < 0.0 && ratio <= 1.0 - epsilon)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveDiagnostics {
    pub mean_ratio: f64,
    pub clip_fraction: f64,
    pub kl: f64,
}

/// `(1/G) sum_i clipped_term(exp(logp_i - logp_old_i), A_i) - kl_coef * kl`.
pub fn cgrpo_objective(
    logp: &[f64],
    logp_old: &[f64],
    advantages: &[f64],
    kl: f64,
    config: &CgrpoConfig,
) -> Result<(f64, ObjectiveDiagnostics), CgrpoError> {
    let g = logp.len();
    if g != logp_old.len() || g != advantages.len() {
        return Err(CgrpoError::InvalidConfig(format!(
            "length mismatch: {} / {} / {}",
            g,
            logp_old.len(),
            advantages.len()
        )));
    }
    if g == 0 {
        return Err(CgrpoError::GroupTooSmall(0));
    }
    let mut total = 0.0;
    let mut ratio_sum = 0.0;
    let mut clipped = 0usize;
    for i in 0..g {
        let ratio = (logp[i] - logp_old[i]).exp();
        if !ratio.is_finite() {
            return Err(CgrpoError::NonFinite { what: "ratio", index: i });
        }
        let term = clipped_term(ratio, advantages[i], config.clip_epsilon);
        if !term.is_finite() {
            return Err(CgrpoError::NonFinite { what: "surrogate", index: i });
        }
        total += term;
        ratio_sum += ratio;
        if ratio < 1.0 - config.clip_epsilon || ratio > 1.0 + config.clip_epsilon {
            clipped += 1;
        }
    }
    if !kl.is_finite() {
        return Err(CgrpoError::NonFinite { what: "kl", index: 0 });
    }
    let objective = total / g as f64 - config.kl_coef * kl;
    Ok((
        objective,
        ObjectiveDiagnostics {
            mean_ratio: ratio_sum / g as f64,
            clip_fraction: clipped as f64 / g as f64,
            kl,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curriculum::generate_questions;
    use crate::scene_graph::fixtures::dogs_and_hamburger;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn advantage_examples() {
        assert_eq!(advantages(&[0.0, 1.0], 1e-8).unwrap().values, vec![-1.0, 1.0]);
        let flat = advantages(&[0.3; 4], 1e-8).unwrap();
        assert!(flat.degenerate && flat.values.iter().all(|a| *a == 0.0));
        let a = advantages(&[0.2, 0.5, 0.8], 1e-8).unwrap().values;
        assert!(close(a[0], -1.2247, 1e-4) && close(a[1], 0.0, 1e-12) && close(a[2], 1.2247, 1e-4));
        assert!(matches!(advantages(&[1.0], 1e-8), Err(CgrpoError::GroupTooSmall(1))));
    }

    #[test]
    fn clipped_term_examples() {
        assert_eq!(clipped_term(1.0, -0.7, 0.2), -0.7);
        assert!(close(clipped_term(1.5, 1.0, 0.2), 1.2, 1e-12));
        assert!(close(clipped_term(0.5, -1.0, 0.2), -0.8, 1e-12));
    }

    #[test]
    fn overall_reward_examples() {
        assert_eq!(overall_reward(&[Some(1.0), Some(0.0)], 1.0).unwrap(), 0.5);
        assert!(close(overall_reward(&[Some(0.4), Some(0.6), Some(0.8)], 0.5).unwrap(), 0.3, 1e-12));
        assert_eq!(overall_reward(&[Some(1.0), None], 1.0).unwrap(), 1.0);
        assert!(matches!(overall_reward(&[None, None], 1.0), Err(CgrpoError::AllExcluded)));
    }

    #[test]
    fn mock_oracle_semantics() {
        let g = dogs_and_hamburger();
        let qs = generate_questions(&g);
        let full = Rendition::of_graph(&g);
        let oracle = mock_oracle();
        let all: Vec<Option<f64>> = question_rewards(&full, &qs, &oracle).unwrap();
        assert!(all.iter().all(|r| *r == Some(1.0)));

        let mut no_burger = full.clone();
        no_burger.objects.retain(|o| o != "hamburger");
        no_burger.relations.clear();
        let r = question_rewards(&no_burger, &qs, &oracle).unwrap();
        let burger = qs.iter().position(|q| q.text == "Is there a hamburger in the image?").unwrap();
        assert_eq!(r[burger], Some(0.0));

        let mut one_dog = full.clone();
        let first = one_dog.objects.iter().position(|o| o == "dog").unwrap();
        one_dog.objects.remove(first);
        let r = question_rewards(&one_dog, &qs, &oracle).unwrap();
        let count = qs.iter().position(|q| q.category == crate::curriculum::QuestionCategory::Count).unwrap();
        assert_eq!(r[count], Some(0.0));

        let smooth = MockOracle::smoothed();
        let r = question_rewards(&one_dog, &qs, &smooth).unwrap();
        assert_eq!(r[count], Some(0.05));
        assert_eq!(r[0], Some(0.95));
        assert!(matches!(question_rewards(&full, &[], &oracle), Err(CgrpoError::NoQuestions)));
    }

    #[test]
    fn failed_questions_are_excluded() {
        let g = dogs_and_hamburger();
        let qs = generate_questions(&g);
        let mut table = TableOracle::default();
        table.scores.insert(qs[0].text.clone(), 0.25);
        let r = question_rewards(&Rendition::of_graph(&g), &qs, &table).unwrap();
        assert_eq!(r[0], Some(0.25));
        assert!(r[1..].iter().all(Option::is_none));
        assert_eq!(overall_reward(&r, 1.0).unwrap(), 0.25);
    }

    #[test]
    fn weights_by_mode() {
        let p = SchedulerParams::new(10, 100);
        for level in 1..=10 {
            let w = curriculum_weight(level, 37, SchedulerKind::Random, &p, WeightingMode::LevelWeight).unwrap();
            assert!(close(w, 0.1, 1e-15));
            let s = curriculum_weight(level, 37, SchedulerKind::Gaussian, &p, WeightingMode::SamplingOnly).unwrap();
            assert_eq!(s, 1.0);
        }
        // t = 25 sits in the third of ten equal stages
        let e2h = |l| curriculum_weight(l, 25, SchedulerKind::EasyToHard, &p, WeightingMode::LevelWeight).unwrap();
        assert_eq!(e2h(3), 1.0);
        assert_eq!(e2h(2), 0.0);
        assert!(curriculum_weight(11, 0, SchedulerKind::Random, &p, WeightingMode::LevelWeight).is_err());
    }

    #[test]
    fn objective_at_identity() {
        let adv = advantages(&[0.1, 0.4, 0.9, 0.2], 1e-8).unwrap().values;
        let logp = [-1.0, -2.0, -0.5, -3.0];
        let cfg = CgrpoConfig::default();
        let (j, d) = cgrpo_objective(&logp, &logp, &adv, 0.0, &cfg).unwrap();
        assert!(j.abs() < 1e-12);
        assert_eq!(d.mean_ratio, 1.0);
        assert_eq!(d.clip_fraction, 0.0);
        let bad = cgrpo_objective(&[f64::INFINITY, 0.0], &[0.0, 0.0], &[1.0, -1.0], 0.0, &cfg);
        assert!(matches!(bad, Err(CgrpoError::NonFinite { index: 0, .. })));
    }

    #[test]
    fn kl_coef_zero_is_plain_surrogate() {
        let cfg = CgrpoConfig { kl_coef: 0.0, ..Default::default() };
        let logp = [-1.0, -0.2, -2.5];
        let old = [-1.3, -0.1, -2.0];
        let adv = [1.0, -0.5, -0.5];
        let (j, _) = cgrpo_objective(&logp, &old, &adv, 4.0, &cfg).unwrap();
        let plain: f64 = (0..3)
            .map(|i| clipped_term((logp[i] - old[i]).exp(), adv[i], 0.2))
            .sum::<f64>()
            / 3.0;
        assert!(close(j, plain, 1e-15));
    }

    #[test]
    fn config_validation() {
        assert!(CgrpoConfig::default().validate().is_ok());
        assert!(CgrpoConfig { group_size: 1, ..Default::default() }.validate().is_err());
        assert!(CgrpoConfig { clip_epsilon: 1.0, ..Default::default() }.validate().is_err());
        assert!(CgrpoConfig { kl_coef: -0.1, ..Default::default() }.validate().is_err());
        assert!(CgrpoConfig { std_guard: 0.0, ..Default::default() }.validate().is_err());
    }

    proptest! {
        #[test]
        fn clipped_never_exceeds_unclipped(r in 0.01f64..5.0, a in -5.0f64..5.0, eps in 0.01f64..0.99) {
            let c = clipped_term(r, a, eps);
            prop_assert!(c <= r * a + 1e-12);
            if (1.0 - eps..=1.0 + eps).contains(&r) {
                prop_assert!((c - r * a).abs() <= 1e-12);
            }
        }

        #[test]
        fn advantages_normalized(rewards in prop::collection::vec(0.0f64..1.0, 2..16)) {
            let set = advantages(&rewards, 1e-8).unwrap();
            if !set.degenerate {
                let n = rewards.len() as f64;
                let mean = set.values.iter().sum::<f64>() / n;
                let var = set.values.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n;
                prop_assert!(mean.abs() < 1e-9);
                prop_assert!((var.sqrt() - 1.0).abs() < 1e-9);
            }
        }
    }
}
