//! Difficulty-constrained scene-graph sampling.
//!
//! The sampler walks over *abstract* graphs: objects live in one of
//! `max_objects` slots (the object id is the slot), attributes are
//! `(owner, concept slot)` pairs with `concept_cap` concept slots per object,
//! and relations are directed edges with at most one edge per unordered pair.
//! Names are placeholders until [`crate::assets::instantiate`] binds them.
//!
//! Each iteration proposes one reversible edit and accepts it with the
//! Metropolis rule `min(1, exp((E(G) - E(G')) / tau_t))`, where the energy is the
//! distance of `Diff(G)` to the target band and `tau_t = max(tau_min, tau0 *
//! gamma^t)`.
//!
//! Proposals are symmetric. An add move of type `t` picks a slot uniformly from
//! a universe `U_t` whose size is the same before and after the edit (object
//! slots, `n * concept_cap` attribute slots, `n * (n - 1)` ordered pairs); a
//! delete move picks the type with probability `w_t / W_add` and then a slot
//! from the same universe. With `w_delete = W_add` the probability of adding
//! `e` to `G` equals the probability of deleting `e` from `G + e`.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assets::AssetLibrary;
use crate::rng::{indexed_stream, StreamRng};
use crate::scene_graph::{
    difficulty_variant, measure_of_counts, rational_to_f64, signature, validate,
    AttributeNode, DifficultyMeasure, ObjectNode, Rational, RelationEdge, SceneGraph,
    SceneGraphError, StructuralSignature,
};

pub const ABSTRACT_OBJECT_NAME: &str = "object";
pub const ABSTRACT_VALUE: &str = "value";
pub const ABSTRACT_PREDICATE: &str = "related to";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SamplerError {
    #[error("invalid difficulty range [{min}, {max}]")]
    InvalidRange { min: String, max: String },
    #[error("no attainable difficulty in ({lo}, {hi}] with at most {max_objects} objects")]
    UnreachableBand { lo: String, hi: String, max_objects: usize },
    #[error("invalid sampler config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Graph(#[from] SceneGraphError),
}

/// Closed target band `[min, max]` on the difficulty scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DifficultyRange {
    pub min: Rational,
    pub max: Rational,
}

impl DifficultyRange {
    pub fn new(min: Rational, max: Rational) -> Result<Self, SamplerError> {
        if min == Rational::from_integer(0) || min > max {
            return Err(SamplerError::InvalidRange {
                min: min.to_string(),
                max: max.to_string(),
            });
        }
        Ok(Self { min, max })
    }

    pub fn integers(min: u64, max: u64) -> Result<Self, SamplerError> {
        Self::new(Rational::from_integer(min), Rational::from_integer(max))
    }

    /// Converts the half-open band `(lo, hi]` into the equivalent closed band
    /// over attainable difficulties: `min` becomes the smallest attainable value
    /// above `lo`.
    pub fn half_open(
        lo: Rational,
        hi: Rational,
        max_objects: usize,
        concept_cap: usize,
        measure: DifficultyMeasure,
    ) -> Result<Self, SamplerError> {
        let mut best: Option<Rational> = None;
        for n in 1..=max_objects {
            let max_r = n * (n - 1) / 2;
            for a in 0..=concept_cap * n {
                for r in 0..=max_r {
                    let d = measure_counts(measure, n, a, r);
                    if d > lo && d <= hi && best.is_none_or(|b| d < b) {
                        best = Some(d);
                    }
                }
            }
        }
        match best {
            Some(min) => Self::new(min, hi),
            None => Err(SamplerError::UnreachableBand {
                lo: lo.to_string(),
                hi: hi.to_string(),
                max_objects,
            }),
        }
    }

    pub fn contains(&self, d: Rational) -> bool {
        self.min <= d && d <= self.max
    }
}

impl fmt::Display for DifficultyRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.min, self.max)
    }
}

fn measure_counts(measure: DifficultyMeasure, n: usize, a: usize, r: usize) -> Rational {
    measure_of_counts(measure, n, a, r).expect("object count is positive")
}

/// Named bands used by the trial protocol: easy (1, 4], medium (4, 7], hard (7, 10].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BandPreset {
    Easy,
    Medium,
    Hard,
}

impl BandPreset {
    pub const ALL: [BandPreset; 3] = [BandPreset::Easy, BandPreset::Medium, BandPreset::Hard];

    pub fn name(self) -> &'static str {
        match self {
            BandPreset::Easy => "easy",
            BandPreset::Medium => "medium",
            BandPreset::Hard => "hard",
        }
    }

    pub fn bounds(self) -> (u64, u64) {
        match self {
            BandPreset::Easy => (1, 4),
            BandPreset::Medium => (4, 7),
            BandPreset::Hard => (7, 10),
        }
    }

    pub fn range(self, config: &SamplerConfig, concept_cap: usize) -> Result<DifficultyRange, SamplerError> {
        let (lo, hi) = self.bounds();
        DifficultyRange::half_open(
            Rational::from_integer(lo),
            Rational::from_integer(hi),
            config.max_objects,
            concept_cap,
            config.measure,
        )
    }
}

impl std::str::FromStr for BandPreset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "easy" => Ok(BandPreset::Easy),
            "medium" => Ok(BandPreset::Medium),
            "hard" => Ok(BandPreset::Hard),
            other => Err(format!("unknown band `{other}` (easy, medium, hard)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnealingSchedule {
    pub tau0: f64,
    pub tau_min: f64,
    pub gamma: f64,
}

impl Default for AnnealingSchedule {
    fn default() -> Self {
        Self {
            tau0: 2.0,
            tau_min: 0.01,
            gamma: 0.95,
        }
    }
}

impl AnnealingSchedule {
    /// Temperature at 1-based iteration `t`.
    pub fn temperature(&self, t: usize) -> f64 {
        (self.tau0 * self.gamma.powi(t as i32)).max(self.tau_min)
    }

    pub fn validate(&self) -> Result<(), SamplerError> {
        let ok = self.tau_min > 0.0
            && self.tau0 >= self.tau_min
            && self.gamma > 0.0
            && self.gamma < 1.0
            && self.tau0.is_finite();
        if ok {
            Ok(())
        } else {
            Err(SamplerError::InvalidConfig(format!("bad annealing schedule {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitStrategy {
    /// No nodes; the first move is a forced object insertion.
    Empty,
    /// 4-7 objects with each attribute slot and object pair filled with probability 1/2.
    Dense,
    /// 1-3 bare objects.
    #[default]
    Minimal,
}

impl std::str::FromStr for InitStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "empty" => Ok(InitStrategy::Empty),
            "dense" => Ok(InitStrategy::Dense),
            "minimal" => Ok(InitStrategy::Minimal),
            other => Err(format!("unknown init strategy `{other}` (empty, dense, minimal)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProposalWeights {
    pub add_object: f64,
    pub add_attribute: f64,
    pub add_relation: f64,
    pub delete: f64,
}

impl Default for ProposalWeights {
    fn default() -> Self {
        // delete carries the same mass as all adds together; that is what makes
        // the add/delete pair symmetric
        Self {
            add_object: 0.1,
            add_attribute: 0.2,
            add_relation: 0.2,
            delete: 0.5,
        }
    }
}

impl ProposalWeights {
    fn add_total(&self) -> f64 {
        self.add_object + self.add_attribute + self.add_relation
    }

    pub fn validate(&self) -> Result<(), SamplerError> {
        let all = [self.add_object, self.add_attribute, self.add_relation, self.delete];
        if all.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(SamplerError::InvalidConfig("negative proposal weight".into()));
        }
        let sum: f64 = all.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(SamplerError::InvalidConfig(format!(
                "proposal weights sum to {sum}, expected 1"
            )));
        }
        if self.add_total() <= 0.0 {
            return Err(SamplerError::InvalidConfig("all add weights are zero".into()));
        }
        Ok(())
    }

    /// True when forward and reverse proposal probabilities coincide.
    pub fn is_symmetric(&self) -> bool {
        (self.delete - self.add_total()).abs() < 1e-12
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SamplerConfig {
    pub max_iterations: usize,
    pub schedule: AnnealingSchedule,
    pub init: InitStrategy,
    pub weights: ProposalWeights,
    /// When false, object insertions (and deletions) are never proposed.
    pub allow_add_object: bool,
    pub max_objects: usize,
    pub max_redraws: usize,
    pub measure: DifficultyMeasure,
    pub seed: u64,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            schedule: AnnealingSchedule::default(),
            init: InitStrategy::Minimal,
            weights: ProposalWeights::default(),
            allow_add_object: true,
            max_objects: 10,
            max_redraws: 10,
            measure: DifficultyMeasure::Product,
            seed: 0,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<(), SamplerError> {
        self.schedule.validate()?;
        self.weights.validate()?;
        if self.max_objects < 1 {
            return Err(SamplerError::InvalidConfig("max_objects must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProposalKind {
    AddObject,
    AddAttribute,
    AddRelation,
    DeleteNode,
}

/// One reversible edit. Attribute concepts are slot indices; relation payloads
/// are ordered `(subject, object)` pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Proposal {
    AddObject { slot: u32 },
    AddAttribute { owner: u32, concept: u32 },
    AddRelation { subject: u32, object: u32 },
    DeleteObject { slot: u32 },
    DeleteAttribute { owner: u32, concept: u32 },
    DeleteRelation { subject: u32, object: u32 },
}

impl Proposal {
    pub fn kind(&self) -> ProposalKind {
        match self {
            Proposal::AddObject { .. } => ProposalKind::AddObject,
            Proposal::AddAttribute { .. } => ProposalKind::AddAttribute,
            Proposal::AddRelation { .. } => ProposalKind::AddRelation,
            _ => ProposalKind::DeleteNode,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerResult {
    pub graph: SceneGraph,
    pub success: bool,
    pub iterations_used: usize,
    pub energy_trace: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplerMethod {
    Adaptive,
    RandomRejection,
    Greedy,
}

impl SamplerMethod {
    pub const ALL: [SamplerMethod; 3] =
        [SamplerMethod::Adaptive, SamplerMethod::RandomRejection, SamplerMethod::Greedy];

    pub fn name(self) -> &'static str {
        match self {
            SamplerMethod::Adaptive => "adaptive_mcmc",
            SamplerMethod::RandomRejection => "random_rejection",
            SamplerMethod::Greedy => "greedy",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialReport {
    pub band: String,
    pub method: String,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub ntd: usize,
}

/// Attribute concept placeholder for concept slot `k`.
pub fn concept_name(k: u32) -> String {
    format!("concept{k}")
}

fn concept_slot(concept: &str) -> Option<u32> {
    concept.strip_prefix("concept")?.parse().ok()
}

pub fn energy(graph: &SceneGraph, range: &DifficultyRange) -> Result<Rational, SceneGraphError> {
    energy_with(graph, range, DifficultyMeasure::Product)
}

pub fn energy_with(
    graph: &SceneGraph,
    range: &DifficultyRange,
    measure: DifficultyMeasure,
) -> Result<Rational, SceneGraphError> {
    let d = difficulty_variant(graph, measure)?;
    Ok(energy_of(d, range))
}

pub fn energy_of(d: Rational, range: &DifficultyRange) -> Rational {
    if d < range.min {
        range.min - d
    } else if d > range.max {
        d - range.max
    } else {
        Rational::from_integer(0)
    }
}

pub fn acceptance_probability(e_current: Rational, e_candidate: Rational, tau: f64) -> f64 {
    if e_candidate <= e_current {
        return 1.0;
    }
    let delta = rational_to_f64(e_candidate) - rational_to_f64(e_current);
    (-delta / tau).exp().min(1.0)
}

/// Read-only view of an abstract graph used by the proposal kernel.
struct Slots {
    objects: Vec<u32>,
    occupied: Vec<bool>,
    attributes: HashSet<(u32, u32)>,
    edges: HashSet<(u32, u32)>,
}

impl Slots {
    fn of(graph: &SceneGraph, max_objects: usize) -> Self {
        let mut occupied = vec![false; max_objects.max(graph.next_object_id() as usize)];
        for o in &graph.objects {
            occupied[o.id as usize] = true;
        }
        let attributes = graph
            .attributes
            .iter()
            .map(|a| (a.owner, concept_slot(&a.concept).unwrap_or(u32::MAX)))
            .collect();
        let edges = graph.relations.iter().map(|r| (r.subject, r.object)).collect();
        Self {
            objects: graph.objects.iter().map(|o| o.id).collect(),
            occupied,
            attributes,
            edges,
        }
    }

    fn n(&self) -> usize {
        self.objects.len()
    }

    fn has_pair(&self, a: u32, b: u32) -> bool {
        self.edges.contains(&(a, b)) || self.edges.contains(&(b, a))
    }
}

fn feasible(p: &Proposal, s: &Slots, cfg: &SamplerConfig) -> bool {
    match *p {
        Proposal::AddObject { slot } => cfg.allow_add_object && !s.occupied[slot as usize],
        Proposal::AddAttribute { owner, concept } => !s.attributes.contains(&(owner, concept)),
        Proposal::AddRelation { subject, object } => !s.has_pair(subject, object),
        Proposal::DeleteObject { slot } => {
            cfg.allow_add_object && s.occupied[slot as usize] && s.n() >= 2
        }
        Proposal::DeleteAttribute { owner, concept } => s.attributes.contains(&(owner, concept)),
        Proposal::DeleteRelation { subject, object } => s.edges.contains(&(subject, object)),
    }
}

/// Every feasible proposal from `graph` with its single-draw probability.
///
/// Infeasible draws are redrawn by [`propose`], so the returned masses sum to
/// the probability that one draw is feasible rather than to 1.
pub fn proposal_distribution(
    graph: &SceneGraph,
    cfg: &SamplerConfig,
    concept_cap: usize,
) -> Vec<(Proposal, f64)> {
    let s = Slots::of(graph, cfg.max_objects);
    let w = &cfg.weights;
    let w_add = w.add_total();
    let n = s.n();
    let mut out = Vec::new();
    let k = cfg.max_objects;
    let pairs = n * n.saturating_sub(1);
    let push = |p: Proposal, mass: f64, out: &mut Vec<(Proposal, f64)>| {
        if mass > 0.0 && feasible(&p, &s, cfg) {
            out.push((p, mass));
        }
    };
    for slot in 0..k as u32 {
        push(Proposal::AddObject { slot }, w.add_object / k as f64, &mut out);
        push(
            Proposal::DeleteObject { slot },
            w.delete * (w.add_object / w_add) / k as f64,
            &mut out,
        );
    }
    if n > 0 {
        let universe = (n * concept_cap) as f64;
        for &owner in &s.objects {
            for concept in 0..concept_cap as u32 {
                push(Proposal::AddAttribute { owner, concept }, w.add_attribute / universe, &mut out);
                push(
                    Proposal::DeleteAttribute { owner, concept },
                    w.delete * (w.add_attribute / w_add) / universe,
                    &mut out,
                );
            }
        }
    }
    if pairs > 0 {
        let universe = pairs as f64;
        for &subject in &s.objects {
            for &object in &s.objects {
                if subject == object {
                    continue;
                }
                push(Proposal::AddRelation { subject, object }, w.add_relation / universe, &mut out);
                push(
                    Proposal::DeleteRelation { subject, object },
                    w.delete * (w.add_relation / w_add) / universe,
                    &mut out,
                );
            }
        }
    }
    out
}

/// One raw draw from the proposal kernel; may be infeasible.
fn draw(s: &Slots, cfg: &SamplerConfig, concept_cap: usize, rng: &mut StreamRng) -> Option<Proposal> {
    let w = &cfg.weights;
    let n = s.n();
    let u: f64 = rng.random::<f64>() * (w.add_total() + w.delete);
    let (delete, kind) = if u < w.add_object {
        (false, 0)
    } else if u < w.add_object + w.add_attribute {
        (false, 1)
    } else if u < w.add_total() {
        (false, 2)
    } else {
        let v = rng.random::<f64>() * w.add_total();
        let kind = if v < w.add_object {
            0
        } else if v < w.add_object + w.add_attribute {
            1
        } else {
            2
        };
        (true, kind)
    };
    match kind {
        0 => {
            let slot = rng.random_range(0..cfg.max_objects) as u32;
            Some(if delete {
                Proposal::DeleteObject { slot }
            } else {
                Proposal::AddObject { slot }
            })
        }
        1 => {
            if n == 0 || concept_cap == 0 {
                return None;
            }
            let owner = s.objects[rng.random_range(0..n)];
            let concept = rng.random_range(0..concept_cap) as u32;
            Some(if delete {
                Proposal::DeleteAttribute { owner, concept }
            } else {
                Proposal::AddAttribute { owner, concept }
            })
        }
        _ => {
            if n < 2 {
                return None;
            }
            let i = rng.random_range(0..n);
            let mut j = rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let (subject, object) = (s.objects[i], s.objects[j]);
            Some(if delete {
                Proposal::DeleteRelation { subject, object }
            } else {
                Proposal::AddRelation { subject, object }
            })
        }
    }
}

/// Applies a proposal to an abstract graph. The proposal must be feasible.
pub fn apply(graph: &SceneGraph, p: &Proposal) -> SceneGraph {
    let mut g = graph.clone();
    match *p {
        Proposal::AddObject { slot } => {
            g.objects.push(ObjectNode {
                id: slot,
                name: ABSTRACT_OBJECT_NAME.into(),
                category: None,
            });
        }
        Proposal::AddAttribute { owner, concept } => {
            let id = g.next_attribute_id();
            g.attributes.push(AttributeNode {
                id,
                owner,
                concept: concept_name(concept),
                value: ABSTRACT_VALUE.into(),
            });
        }
        Proposal::AddRelation { subject, object } => {
            let id = g.next_relation_id();
            g.relations.push(RelationEdge {
                id,
                subject,
                object,
                predicate: ABSTRACT_PREDICATE.into(),
            });
        }
        Proposal::DeleteObject { slot } => {
            g.remove_object_cascade(slot);
        }
        Proposal::DeleteAttribute { owner, concept } => {
            let name = concept_name(concept);
            g.attributes.retain(|a| !(a.owner == owner && a.concept == name));
        }
        Proposal::DeleteRelation { subject, object } => {
            g.relations.retain(|r| !(r.subject == subject && r.object == object));
        }
    }
    g
}

/// Draws a feasible proposal, redrawing infeasible ones up to
/// `cfg.max_redraws` times. `None` means the iteration is spent without a move.
pub fn propose(
    graph: &SceneGraph,
    cfg: &SamplerConfig,
    concept_cap: usize,
    rng: &mut StreamRng,
) -> Option<(SceneGraph, Proposal)> {
    let s = Slots::of(graph, cfg.max_objects);
    for _ in 0..=cfg.max_redraws {
        if let Some(p) = draw(&s, cfg, concept_cap, rng) {
            if feasible(&p, &s, cfg) {
                return Some((apply(graph, &p), p));
            }
        }
    }
    None
}

/// Order-free identity of an abstract graph: object slots, attribute slots and
/// directed edges.
pub type StateKey = (BTreeSet<u32>, BTreeSet<(u32, u32)>, BTreeSet<(u32, u32)>);

pub fn state_key(graph: &SceneGraph) -> StateKey {
    (
        graph.objects.iter().map(|o| o.id).collect(),
        graph
            .attributes
            .iter()
            .map(|a| (a.owner, concept_slot(&a.concept).unwrap_or(u32::MAX)))
            .collect(),
        graph.relations.iter().map(|r| (r.subject, r.object)).collect(),
    )
}

fn random_slots(k: usize, n: usize, rng: &mut StreamRng) -> Vec<u32> {
    let mut slots: Vec<u32> = sample_indices(rng, k, n).into_iter().map(|i| i as u32).collect();
    slots.sort_unstable();
    slots
}

pub fn init_graph(
    strategy: InitStrategy,
    cfg: &SamplerConfig,
    concept_cap: usize,
    rng: &mut StreamRng,
) -> SceneGraph {
    let k = cfg.max_objects;
    let mut g = SceneGraph::new();
    let n = match strategy {
        InitStrategy::Empty => return g,
        InitStrategy::Minimal => rng.random_range(1..=3usize.min(k)),
        InitStrategy::Dense => rng.random_range(4usize.min(k)..=7usize.min(k)),
    };
    for slot in random_slots(k, n, rng) {
        g = apply(&g, &Proposal::AddObject { slot });
    }
    if strategy == InitStrategy::Dense {
        let ids: Vec<u32> = g.objects.iter().map(|o| o.id).collect();
        for &owner in &ids {
            for concept in 0..concept_cap as u32 {
                if rng.random_bool(0.5) {
                    g = apply(&g, &Proposal::AddAttribute { owner, concept });
                }
            }
        }
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                if rng.random_bool(0.5) {
                    let (subject, object) = if rng.random_bool(0.5) { (a, b) } else { (b, a) };
                    g = apply(&g, &Proposal::AddRelation { subject, object });
                }
            }
        }
    }
    g
}

#[derive(Clone, Copy)]
enum Acceptance {
    Metropolis,
    Greedy,
}

fn in_band(graph: &SceneGraph, range: &DifficultyRange, measure: DifficultyMeasure) -> bool {
    difficulty_variant(graph, measure).is_ok_and(|d| range.contains(d)) && validate(graph).is_empty()
}

fn run_chain(
    range: &DifficultyRange,
    cfg: &SamplerConfig,
    concept_cap: usize,
    rng: &mut StreamRng,
    rule: Acceptance,
) -> SamplerResult {
    let mut g = init_graph(cfg.init, cfg, concept_cap, rng);
    let mut e = energy_with(&g, range, cfg.measure).ok();
    let mut trace = Vec::with_capacity(cfg.max_iterations);
    let zero = Rational::from_integer(0);
    if e == Some(zero) && in_band(&g, range, cfg.measure) {
        return SamplerResult { graph: g, success: true, iterations_used: 0, energy_trace: trace };
    }
    for t in 1..=cfg.max_iterations {
        let tau = cfg.schedule.temperature(t);
        let current = match e {
            // empty start: the only sensible move is an object insertion
            None => {
                let slot = rng.random_range(0..cfg.max_objects) as u32;
                g = apply(&g, &Proposal::AddObject { slot });
                let fresh = energy_with(&g, range, cfg.measure).expect("graph has an object");
                e = Some(fresh);
                trace.push(rational_to_f64(fresh));
                if fresh == zero {
                    return SamplerResult { graph: g, success: true, iterations_used: t, energy_trace: trace };
                }
                continue;
            }
            Some(v) => v,
        };
        if let Some((cand, _)) = propose(&g, cfg, concept_cap, rng) {
            let e_cand = energy_with(&cand, range, cfg.measure).expect("proposals keep an object");
            let accept = match rule {
                Acceptance::Metropolis => {
                    let p = acceptance_probability(current, e_cand, tau);
                    p >= 1.0 || rng.random::<f64>() < p
                }
                Acceptance::Greedy => e_cand < current,
            };
            if accept {
                g = cand;
                e = Some(e_cand);
            }
        }
        let now = e.expect("energy defined after the first move");
        trace.push(rational_to_f64(now));
        if now == zero {
            let success = validate(&g).is_empty();
            return SamplerResult { graph: g, success, iterations_used: t, energy_trace: trace };
        }
    }
    SamplerResult {
        graph: g,
        success: false,
        iterations_used: cfg.max_iterations,
        energy_trace: trace,
    }
}

/// Adaptive Metropolis-Hastings sampling with annealing. Returns as soon as the
/// chain enters the band.
pub fn sample_graph(
    range: &DifficultyRange,
    cfg: &SamplerConfig,
    concept_cap: usize,
    rng: &mut StreamRng,
) -> SamplerResult {
    run_chain(range, cfg, concept_cap, rng, Acceptance::Metropolis)
}

/// Same chain, but only strictly energy-reducing moves are accepted.
pub fn baseline_greedy(
    range: &DifficultyRange,
    cfg: &SamplerConfig,
    concept_cap: usize,
    rng: &mut StreamRng,
) -> SamplerResult {
    run_chain(range, cfg, concept_cap, rng, Acceptance::Greedy)
}

/// Draws a fresh random graph per step and accepts only in-band graphs.
///
/// A draw takes `n ~ U{1..library_objects}` objects, each of the `n *
/// concept_cap` attribute slots with probability 1/2 and each unordered pair
/// with probability 1/2 in a random direction. Only the counts decide
/// acceptance, so the graph itself is materialized once, on success.
pub fn baseline_random_rejection(
    range: &DifficultyRange,
    budget: usize,
    library_objects: usize,
    concept_cap: usize,
    measure: DifficultyMeasure,
    rng: &mut StreamRng,
) -> SamplerResult {
    let mut trace = Vec::with_capacity(budget);
    let max_n = library_objects.max(1);
    for t in 1..=budget {
        let n = rng.random_range(1..=max_n);
        let a = Binomial::new((n * concept_cap) as u64, 0.5).expect("p in range").sample(rng) as usize;
        let pairs = n * (n - 1) / 2;
        let r = Binomial::new(pairs as u64, 0.5).expect("p in range").sample(rng) as usize;
        let e = energy_of(measure_counts(measure, n, a, r), range);
        trace.push(rational_to_f64(e));
        if e == Rational::from_integer(0) {
            let graph = materialize(n, a, r, concept_cap, rng);
            let success = validate(&graph).is_empty();
            return SamplerResult { graph, success, iterations_used: t, energy_trace: trace };
        }
    }
    SamplerResult {
        graph: SceneGraph::new(),
        success: false,
        iterations_used: budget,
        energy_trace: trace,
    }
}

fn materialize(n: usize, a: usize, r: usize, concept_cap: usize, rng: &mut StreamRng) -> SceneGraph {
    let mut g = SceneGraph::new();
    for slot in 0..n as u32 {
        g.objects.push(ObjectNode { id: slot, name: ABSTRACT_OBJECT_NAME.into(), category: None });
    }
    for (id, idx) in sample_indices(rng, n * concept_cap, a).into_iter().enumerate() {
        g.attributes.push(AttributeNode {
            id: id as u32,
            owner: (idx / concept_cap) as u32,
            concept: concept_name((idx % concept_cap) as u32),
            value: ABSTRACT_VALUE.into(),
        });
    }
    let pairs: Vec<(u32, u32)> = (0..n as u32)
        .flat_map(|i| ((i + 1)..n as u32).map(move |j| (i, j)))
        .collect();
    for (id, idx) in sample_indices(rng, pairs.len(), r).into_iter().enumerate() {
        let (x, y) = pairs[idx];
        let (subject, object) = if rng.random_bool(0.5) { (x, y) } else { (y, x) };
        g.relations.push(RelationEdge { id: id as u32, subject, object, predicate: ABSTRACT_PREDICATE.into() });
    }
    g
}

/// Runs `n` independent trials with per-trial seeds derived from `cfg.seed`.
/// Trials run in parallel; the report does not depend on scheduling.
pub fn run_trials(
    n: usize,
    band: &str,
    range: &DifficultyRange,
    cfg: &SamplerConfig,
    library: &AssetLibrary,
    method: SamplerMethod,
) -> TrialReport {
    let concept_cap = library.concept_capacity();
    let library_objects = library.objects.len();
    let results: Vec<SamplerResult> = (0..n as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = indexed_stream(cfg.seed, method.name(), i);
            match method {
                SamplerMethod::Adaptive => sample_graph(range, cfg, concept_cap, &mut rng),
                SamplerMethod::Greedy => baseline_greedy(range, cfg, concept_cap, &mut rng),
                SamplerMethod::RandomRejection => baseline_random_rejection(
                    range,
                    cfg.max_iterations,
                    library_objects,
                    concept_cap,
                    cfg.measure,
                    &mut rng,
                ),
            }
        })
        .collect();
    summarize(band, method, range, cfg.measure, &results)
}

fn summarize(
    band: &str,
    method: SamplerMethod,
    range: &DifficultyRange,
    measure: DifficultyMeasure,
    results: &[SamplerResult],
) -> TrialReport {
    let mut signatures: BTreeSet<StructuralSignature> = BTreeSet::new();
    let mut successes = 0;
    for r in results.iter().filter(|r| r.success) {
        // re-check independently of the chain's own bookkeeping
        debug_assert!(in_band(&r.graph, range, measure));
        successes += 1;
        signatures.insert(signature(&r.graph));
    }
    TrialReport {
        band: band.to_string(),
        method: method.name().to_string(),
        trials: results.len(),
        successes,
        success_rate: if results.is_empty() { 0.0 } else { successes as f64 / results.len() as f64 },
        ntd: signatures.len(),
    }
}
