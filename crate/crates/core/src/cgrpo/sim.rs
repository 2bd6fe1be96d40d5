//! A desk-scale stand-in for a text-to-image model.
//!
//! Given a prompt graph, the policy includes every element independently with
//! probability `sigmoid(z)`, where
//! `z = base[kind] + offset[level][kind] - load_penalty * (level - 1)`.
//! An attribute is visible only when its owner is rendered, and a relation
//! only when both endpoints are, so the rendition log-probability sums over
//! the visible decisions.

use std::collections::BTreeMap;
use std::io::Write;
use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{
    advantages, cgrpo_objective, curriculum_weight, group_rewards, is_clipped, overall_reward, CgrpoConfig,
    CgrpoError, ObjectiveDiagnostics, Rendition, RewardOracle,
};
use crate::curriculum::{CurriculumSample, Question};
use crate::rng::stream;
use crate::scene_graph::SceneGraph;
use crate::scheduler::{distribution, sample_level, SchedulerKind, SchedulerParams};

pub const HELDOUT_SIZE: usize = 50;
pub const HELDOUT_LEVELS: RangeInclusive<u32> = 8..=10;

const KINDS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ElementKind {
    Object,
    Attribute,
    Relation,
}

impl ElementKind {
    pub const ALL: [ElementKind; KINDS] = [ElementKind::Object, ElementKind::Attribute, ElementKind::Relation];

    fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Decision {
    pub kind: ElementKind,
    pub included: bool,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// `KL(Bern(sigmoid(z)) || Bern(sigmoid(z_ref)))`.
pub fn bernoulli_kl(z: f64, z_ref: f64) -> f64 {
    let p = sigmoid(z);
    // log p - log q = softplus(-z_ref) - softplus(-z), and likewise for 1 - p
    let kl = p * (softplus(-z_ref) - softplus(-z)) + (1.0 - p) * (softplus(z_ref) - softplus(z));
    kl.max(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimPolicy {
    pub levels: usize,
    pub load_penalty: f64,
    /// `[base; KINDS]` followed by `levels` blocks of per-level offsets.
    pub params: Vec<f64>,
}

impl SimPolicy {
    pub fn new(levels: usize, init_logit: f64, load_penalty: f64) -> Self {
        let mut params = vec![0.0; KINDS * (levels + 1)];
        params[..KINDS].fill(init_logit);
        Self { levels, load_penalty, params }
    }

    fn level(&self, level: usize) -> usize {
        level.clamp(1, self.levels)
    }

    fn indices(&self, kind: ElementKind, level: usize) -> [usize; 2] {
        [kind.index(), KINDS * self.level(level) + kind.index()]
    }

    pub fn logit(&self, kind: ElementKind, level: usize) -> f64 {
        let [b, o] = self.indices(kind, level);
        self.params[b] + self.params[o] - self.load_penalty * (self.level(level) as f64 - 1.0)
    }

    pub fn prob(&self, kind: ElementKind, level: usize) -> f64 {
        sigmoid(self.logit(kind, level))
    }

    /// Uses one uniform per graph element in the order objects, attributes,
    /// relations, whether or not the element ends up visible.
    pub fn render<F: FnMut() -> f64>(
        &self,
        graph: &SceneGraph,
        level: usize,
        mut uniform: F,
    ) -> (Rendition, Vec<Decision>) {
        let probs = ElementKind::ALL.map(|k| self.prob(k, level));
        let mut rendition = Rendition::default();
        let mut decisions = Vec::new();
        let mut shown = BTreeMap::new();
        for o in &graph.objects {
            let included = uniform() < probs[0];
            decisions.push(Decision { kind: ElementKind::Object, included });
            shown.insert(o.id, included);
            if included {
                rendition.objects.push(o.name.clone());
            }
        }
        for a in &graph.attributes {
            let u = uniform();
            if shown[&a.owner] {
                let included = u < probs[1];
                decisions.push(Decision { kind: ElementKind::Attribute, included });
                if included {
                    let owner = graph.object(a.owner).expect("valid graph");
                    rendition.attributes.push((owner.name.clone(), a.concept.clone(), a.value.clone()));
                }
            }
        }
        for r in &graph.relations {
            let u = uniform();
            if shown[&r.subject] && shown[&r.object] {
                let included = u < probs[2];
                decisions.push(Decision { kind: ElementKind::Relation, included });
                if included {
                    let s = graph.object(r.subject).expect("valid graph");
                    let o = graph.object(r.object).expect("valid graph");
                    rendition.relations.push((s.name.clone(), r.predicate.clone(), o.name.clone()));
                }
            }
        }
        (rendition, decisions)
    }

    pub fn log_prob(&self, level: usize, decisions: &[Decision]) -> f64 {
        let z = ElementKind::ALL.map(|k| self.logit(k, level));
        decisions
            .iter()
            .map(|d| {
                let z = z[d.kind.index()];
                if d.included { -softplus(-z) } else { -softplus(z) }
            })
            .sum()
    }

    /// Adds `scale * d log_prob / d params` into `grad`.
    pub fn add_grad_log_prob(&self, level: usize, decisions: &[Decision], scale: f64, grad: &mut [f64]) {
        let p = ElementKind::ALL.map(|k| self.prob(k, level));
        let mut per_kind = [0.0; KINDS];
        for d in decisions {
            let k = d.kind.index();
            per_kind[k] += if d.included { 1.0 } else { 0.0 } - p[k];
        }
        for kind in ElementKind::ALL {
            for i in self.indices(kind, level) {
                grad[i] += scale * per_kind[kind.index()];
            }
        }
    }

    /// Exact KL between the latent inclusion distributions over every
    /// element of `graph`.
    pub fn kl_to(&self, reference: &SimPolicy, graph: &SceneGraph, level: usize) -> f64 {
        let n = element_counts(graph);
        ElementKind::ALL
            .iter()
            .map(|&k| n[k.index()] as f64 * bernoulli_kl(self.logit(k, level), reference.logit(k, level)))
            .sum()
    }

    pub fn add_grad_kl(&self, reference: &SimPolicy, graph: &SceneGraph, level: usize, scale: f64, grad: &mut [f64]) {
        let n = element_counts(graph);
        for kind in ElementKind::ALL {
            let z = self.logit(kind, level);
            let p = sigmoid(z);
            let d = n[kind.index()] as f64 * p * (1.0 - p) * (z - reference.logit(kind, level));
            for i in self.indices(kind, level) {
                grad[i] += scale * d;
            }
        }
    }
}

fn element_counts(graph: &SceneGraph) -> [usize; KINDS] {
    [graph.objects.len(), graph.attributes.len(), graph.relations.len()]
}

/// `G` renditions of one prompt with their decisions and log-probabilities
/// under the sampling policy and the reference.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupRollout {
    pub sample_id: usize,
    pub level: usize,
    pub graph: SceneGraph,
    pub renditions: Vec<Rendition>,
    pub decisions: Vec<Vec<Decision>>,
    pub logp_old: Vec<f64>,
    pub logp_ref: Vec<f64>,
}

impl GroupRollout {
    pub fn sample<R: Rng + ?Sized>(
        policy: &SimPolicy,
        reference: &SimPolicy,
        sample: &CurriculumSample,
        group_size: usize,
        rng: &mut R,
    ) -> Self {
        let level = sample.level as usize;
        let mut renditions = Vec::with_capacity(group_size);
        let mut decisions = Vec::with_capacity(group_size);
        for _ in 0..group_size {
            let (r, d) = policy.render(&sample.graph, level, || rng.random::<f64>());
            renditions.push(r);
            decisions.push(d);
        }
        let logp_old = decisions.iter().map(|d| policy.log_prob(level, d)).collect();
        let logp_ref = decisions.iter().map(|d| reference.log_prob(level, d)).collect();
        Self {
            sample_id: sample.id,
            level,
            graph: sample.graph.clone(),
            renditions,
            decisions,
            logp_old,
            logp_ref,
        }
    }

    /// Objective at `policy` and its gradient with respect to `policy.params`.
    pub fn objective_and_gradient(
        &self,
        policy: &SimPolicy,
        reference: &SimPolicy,
        advantages: &[f64],
        config: &CgrpoConfig,
    ) -> Result<(f64, ObjectiveDiagnostics, Vec<f64>), CgrpoError> {
        let logp: Vec<f64> = self.decisions.iter().map(|d| policy.log_prob(self.level, d)).collect();
        let kl = policy.kl_to(reference, &self.graph, self.level);
        let (objective, diag) = cgrpo_objective(&logp, &self.logp_old, advantages, kl, config)?;
        let g = self.decisions.len() as f64;
        let mut grad = vec![0.0; policy.params.len()];
        for (i, d) in self.decisions.iter().enumerate() {
            let ratio = (logp[i] - self.logp_old[i]).exp();
            if advantages[i] != 0.0 && !is_clipped(ratio, advantages[i], config.clip_epsilon) {
                policy.add_grad_log_prob(self.level, d, advantages[i] * ratio / g, &mut grad);
            }
        }
        policy.add_grad_kl(reference, &self.graph, self.level, -config.kl_coef, &mut grad);
        Ok((objective, diag, grad))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimConfig {
    pub init_logit: f64,
    pub load_penalty: f64,
    pub learning_rate: f64,
    /// Gradient steps per rollout group.
    pub inner_steps: usize,
    /// Renditions per held-out prompt.
    pub eval_replicates: usize,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            init_logit: -3.0,
            load_penalty: 0.5,
            learning_rate: 0.2,
            inner_steps: 2,
            eval_replicates: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub step: usize,
    pub level_drawn: u32,
    pub mean_reward: f64,
    pub heldout_reward: f64,
    pub clip_fraction: f64,
    pub kl: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome {
    pub trace: Vec<TraceRecord>,
    pub initial_heldout: f64,
    pub final_heldout: f64,
    pub policy: SimPolicy,
}

/// Moves up to [`HELDOUT_SIZE`] samples from levels 8-10 into a held-out set
/// chosen by `seed`.
pub fn split_heldout(dataset: &[CurriculumSample], seed: u64) -> (Vec<CurriculumSample>, Vec<CurriculumSample>) {
    let mut candidates: Vec<usize> = dataset
        .iter()
        .enumerate()
        .filter(|(_, s)| HELDOUT_LEVELS.contains(&s.level))
        .map(|(i, _)| i)
        .collect();
    candidates.shuffle(&mut stream(seed, "heldout"));
    let mut chosen: Vec<usize> = candidates.into_iter().take(HELDOUT_SIZE).collect();
    chosen.sort_unstable();
    let mut train = Vec::new();
    let mut heldout = Vec::new();
    for (i, s) in dataset.iter().enumerate() {
        if chosen.binary_search(&i).is_ok() {
            heldout.push(s.clone());
        } else {
            train.push(s.clone());
        }
    }
    (train, heldout)
}

/// Pre-drawn uniforms so every evaluation of every policy sees the same noise.
struct HeldoutNoise {
    uniforms: Vec<Vec<Vec<f64>>>,
}

impl HeldoutNoise {
    fn new(heldout: &[CurriculumSample], replicates: usize, seed: u64) -> Self {
        let mut rng = stream(seed, "heldout-eval");
        let uniforms = heldout
            .iter()
            .map(|s| {
                let n = s.graph.objects.len() + s.graph.attributes.len() + s.graph.relations.len();
                (0..replicates).map(|_| (0..n).map(|_| rng.random::<f64>()).collect()).collect()
            })
            .collect();
        Self { uniforms }
    }
}

fn heldout_reward(
    policy: &SimPolicy,
    heldout: &[CurriculumSample],
    noise: &HeldoutNoise,
    oracle: &dyn RewardOracle,
) -> f64 {
    let mut total = 0.0;
    let mut n = 0usize;
    for (s, reps) in heldout.iter().zip(&noise.uniforms) {
        for u in reps {
            let mut it = u.iter().copied();
            let (r, _) = policy.render(&s.graph, s.level as usize, || it.next().expect("one uniform per element"));
            if let Ok(rewards) = super::question_rewards(&r, &s.questions, oracle) {
                if let Ok(v) = overall_reward(&rewards, 1.0) {
                    total += v;
                    n += 1;
                }
            }
        }
    }
    if n == 0 { 0.0 } else { total / n as f64 }
}

/// Mean held-out reward with noise fixed by `seed`.
pub fn evaluate_heldout(
    policy: &SimPolicy,
    heldout: &[CurriculumSample],
    replicates: usize,
    oracle: &dyn RewardOracle,
    seed: u64,
) -> f64 {
    heldout_reward(policy, heldout, &HeldoutNoise::new(heldout, replicates, seed), oracle)
}

fn nearest_level(pools: &BTreeMap<u32, Vec<usize>>, level: u32) -> u32 {
    *pools
        .keys()
        .min_by_key(|&&l| ((l as i64 - level as i64).abs(), l))
        .expect("pools are non-empty")
}

fn subsample(questions: &[Question], k: Option<usize>, rng: &mut impl Rng) -> Vec<Question> {
    match k {
        Some(k) if k < questions.len() => {
            let mut idx = rand::seq::index::sample(rng, questions.len(), k).into_vec();
            idx.sort_unstable();
            idx.into_iter().map(|i| questions[i].clone()).collect()
        }
        _ => questions.to_vec(),
    }
}

/// Runs `steps` optimizer steps. `schedule.total_steps` is replaced by
/// `steps`; `schedule.levels` must match the policy.
#[allow(clippy::too_many_arguments)]
pub fn sim_train(
    train: &[CurriculumSample],
    heldout: &[CurriculumSample],
    kind: SchedulerKind,
    schedule: &SchedulerParams,
    config: &CgrpoConfig,
    sim: &SimConfig,
    oracle: &dyn RewardOracle,
    steps: usize,
    seed: u64,
) -> Result<TrainOutcome, CgrpoError> {
    config.validate()?;
    let mut policy = SimPolicy::new(schedule.levels, sim.init_logit, sim.load_penalty);
    let noise = HeldoutNoise::new(heldout, sim.eval_replicates, seed);
    let initial_heldout = heldout_reward(&policy, heldout, &noise, oracle);
    if steps == 0 {
        return Ok(TrainOutcome { trace: Vec::new(), initial_heldout, final_heldout: initial_heldout, policy });
    }
    let mut pools: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for (i, s) in train.iter().enumerate() {
        if !s.questions.is_empty() {
            pools.entry(s.level).or_default().push(i);
        }
    }
    if pools.is_empty() {
        return Err(CgrpoError::EmptyDataset);
    }
    let params = SchedulerParams { total_steps: steps, ..schedule.clone() };
    params.validate()?;
    let reference = policy.clone();
    let mut sched_rng = stream(seed, "scheduler");
    let mut policy_rng = stream(seed, "policy");
    let mut trace = Vec::with_capacity(steps);
    for t in 0..steps {
        let dist = distribution(kind, t, &params)?;
        let drawn = sample_level(&dist, &mut sched_rng) as u32;
        let level = if pools.contains_key(&drawn) { drawn } else { nearest_level(&pools, drawn) };
        let pool = &pools[&level];
        let sample = &train[pool[sched_rng.random_range(0..pool.len())]];
        let questions = subsample(&sample.questions, config.question_subsample, &mut policy_rng);

        let rollout = GroupRollout::sample(&policy, &reference, sample, config.group_size, &mut policy_rng);
        let weight = curriculum_weight(level as usize, t, kind, &params, config.mode)?;
        let scored = group_rewards(&rollout.renditions, &questions, oracle)?;
        let rewards: Vec<f64> = scored
            .iter()
            .map(|r| overall_reward(r, weight))
            .collect::<Result<_, _>>()?;
        let adv = advantages(&rewards, config.std_guard)?;

        let mut diag = ObjectiveDiagnostics::default();
        for _ in 0..sim.inner_steps.max(1) {
            let (_, d, grad) = rollout.objective_and_gradient(&policy, &reference, &adv.values, config)?;
            diag = d;
            for (p, g) in policy.params.iter_mut().zip(&grad) {
                *p += sim.learning_rate * g;
            }
        }
        trace.push(TraceRecord {
            step: t,
            level_drawn: drawn,
            mean_reward: rewards.iter().sum::<f64>() / rewards.len() as f64,
            heldout_reward: heldout_reward(&policy, heldout, &noise, oracle),
            clip_fraction: diag.clip_fraction,
            kl: diag.kl,
        });
    }
    let final_heldout = trace.last().map(|r| r.heldout_reward).unwrap_or(initial_heldout);
    Ok(TrainOutcome { trace, initial_heldout, final_heldout, policy })
}

pub fn write_trace_jsonl<W: Write>(trace: &[TraceRecord], mut out: W) -> Result<(), CgrpoError> {
    for r in trace {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cgrpo::mock_oracle;
    use crate::curriculum::{generate_questions, PromptSource, Provenance};
    use crate::rng::from_seed;
    use crate::scene_graph::fixtures::{dogs_and_hamburger, graph_with_counts};
    use proptest::prelude::*;
    use rand::Rng;

    fn sample_of(graph: SceneGraph, level: u32, id: usize) -> CurriculumSample {
        CurriculumSample {
            id,
            level,
            difficulty: 0.0,
            difficulty_exact: "0".into(),
            questions: generate_questions(&graph),
            graph,
            prompt: String::new(),
            provenance: Provenance {
                sampler_seed: 0,
                config_digest: String::new(),
                attempts: 1,
                prompt_source: PromptSource::Fallback,
            },
        }
    }

    fn random_policy(rng: &mut impl Rng, levels: usize) -> SimPolicy {
        let mut p = SimPolicy::new(levels, 0.0, rng.random_range(0.0..0.5));
        for v in p.params.iter_mut() {
            *v = rng.random_range(-2.0..2.0);
        }
        p
    }

    #[test]
    fn log_prob_matches_probabilities() {
        let p = SimPolicy::new(10, -1.0, 0.1);
        let d = [
            Decision { kind: ElementKind::Object, included: true },
            Decision { kind: ElementKind::Attribute, included: false },
        ];
        let expected = p.prob(ElementKind::Object, 3).ln() + (1.0 - p.prob(ElementKind::Attribute, 3)).ln();
        assert!((p.log_prob(3, &d) - expected).abs() < 1e-12);
    }

    #[test]
    fn render_respects_visibility() {
        let g = dogs_and_hamburger();
        let p = SimPolicy::new(10, 0.0, 0.0);
        // first dog missing, everything else drawn as present
        let mut n = 0;
        let (r, d) = p.render(&g, 1, || {
            n += 1;
            if n == 1 { 0.99 } else { 0.0 }
        });
        assert_eq!(r.count("dog"), 1);
        // the hidden white dog takes its attribute and its relation with it
        assert_eq!(d.len(), 4);
        assert!(r.relations.is_empty());
        let full = p.render(&g, 1, || 0.0).0;
        assert_eq!(full, Rendition::of_graph(&g));
        let none = p.render(&g, 1, || 0.999_999);
        assert_eq!(none.1.len(), g.objects.len());
    }

    #[test]
    fn kl_zero_at_reference_and_nonnegative() {
        let mut rng = from_seed(4);
        let g = graph_with_counts(4, 5, 3);
        for _ in 0..200 {
            let a = random_policy(&mut rng, 10);
            let b = random_policy(&mut rng, 10);
            let level = rng.random_range(1..=10);
            assert_eq!(a.kl_to(&a, &g, level), 0.0);
            assert!(a.kl_to(&b, &g, level) >= 0.0);
        }
        assert!((bernoulli_kl(0.3, -0.2) - {
            let (p, q) = (sigmoid(0.3), sigmoid(-0.2));
            p * (p / q).ln() + (1.0 - p) * ((1.0 - p) / (1.0 - q)).ln()
        })
        .abs()
            < 1e-14);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = from_seed(9);
        let cfg = CgrpoConfig { kl_coef: 0.3, ..Default::default() };
        let g = graph_with_counts(3, 4, 2);
        let sample = sample_of(g, 3, 0);
        for _ in 0..20 {
            let old = random_policy(&mut rng, 3);
            let reference = random_policy(&mut rng, 3);
            let rollout = GroupRollout::sample(&old, &reference, &sample, 6, &mut rng);
            let adv: Vec<f64> = (0..6).map(|_| rng.random_range(-1.5..1.5)).collect();
            let mut current = old.clone();
            for v in current.params.iter_mut() {
                *v += rng.random_range(-0.05..0.05);
            }
            let (_, _, grad) = rollout.objective_and_gradient(&current, &reference, &adv, &cfg).unwrap();
            let h = 1e-5;
            for i in 0..current.params.len() {
                let mut plus = current.clone();
                plus.params[i] += h;
                let mut minus = current.clone();
                minus.params[i] -= h;
                let f = |p: &SimPolicy| rollout.objective_and_gradient(p, &reference, &adv, &cfg).unwrap().0;
                let fd = (f(&plus) - f(&minus)) / (2.0 * h);
                let denom = fd.abs().max(grad[i].abs()).max(1e-8);
                assert!((fd - grad[i]).abs() / denom < 1e-4 || (fd - grad[i]).abs() < 1e-9, "{i}: {fd} vs {}", grad[i]);
            }
        }
    }

    #[test]
    fn zero_steps_leaves_policy_untouched() {
        let train = vec![sample_of(dogs_and_hamburger(), 3, 0)];
        let out = sim_train(
            &train,
            &[],
            SchedulerKind::Gaussian,
            &SchedulerParams::new(10, 100),
            &CgrpoConfig::default(),
            &SimConfig::default(),
            &mock_oracle(),
            0,
            1,
        )
        .unwrap();
        assert!(out.trace.is_empty());
        assert_eq!(out.policy, SimPolicy::new(10, -3.0, SimConfig::default().load_penalty));
    }

    #[test]
    fn training_improves_a_single_prompt() {
        let s = sample_of(dogs_and_hamburger(), 3, 0);
        let out = sim_train(
            &[s.clone()],
            &[s],
            SchedulerKind::Random,
            &SchedulerParams::new(10, 100),
            &CgrpoConfig::default(),
            &SimConfig::default(),
            &mock_oracle(),
            100,
            7,
        )
        .unwrap();
        assert_eq!(out.trace.len(), 100);
        assert!(out.final_heldout > out.initial_heldout);
        // every draw falls back to the only populated level
        assert!(out.trace.iter().all(|r| (1..=10).contains(&r.level_drawn)));
    }

    #[test]
    fn heldout_split_takes_high_levels() {
        let data: Vec<CurriculumSample> = (0..120)
            .map(|i| sample_of(graph_with_counts(1, 0, 0), (i % 10 + 1) as u32, i))
            .collect();
        let (train, heldout) = split_heldout(&data, 3);
        assert_eq!(heldout.len(), 36);
        assert_eq!(train.len(), 84);
        assert!(heldout.iter().all(|s| HELDOUT_LEVELS.contains(&s.level)));
        assert_eq!(split_heldout(&data, 3).1, heldout);
    }

    proptest! {
        #[test]
        fn probabilities_stay_in_unit_interval(z in -50.0f64..50.0, level in 1usize..12) {
            let mut p = SimPolicy::new(10, z, 0.3);
            p.params[5] = -z;
            for k in ElementKind::ALL {
                let q = p.prob(k, level);
                prop_assert!((0.0..=1.0).contains(&q));
                let yes = [Decision { kind: k, included: true }];
                let no = [Decision { kind: k, included: false }];
                prop_assert!(p.log_prob(level, &yes).is_finite());
                prop_assert!(p.log_prob(level, &no).is_finite());
            }
        }
    }
}
