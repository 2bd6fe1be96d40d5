//! Difficulty-controlled scene-graph curricula for compositional
//! text-to-image alignment, and the group-relative policy optimization core
//! that consumes them.
//!
//! * [`scene_graph`]: graph model and the difficulty measure
//! * [`sampler`]: annealed Metropolis-Hastings sampling of graphs in a difficulty band
//! * [`assets`]: object/attribute/relation assets, LLM clients, instantiation
//! * [`curriculum`]: prompts, questions and JSONL datasets
//! * [`scheduler`]: random, easy-to-hard and Gaussian level schedules
//! * [`cgrpo`]: rewards, advantages, the clipped objective and a simulated learner
//! * [`pipeline`]: config, seeds, manifests and the command implementations

pub mod assets;
pub mod cgrpo;
pub mod curriculum;
pub mod rng;
pub mod pipeline;
pub mod sampler;
pub mod scene_graph;
pub mod scheduler;

pub use scene_graph::{
    difficulty, difficulty_variant, signature, validate, DifficultyMeasure, Rational, SceneGraph,
    StructuralSignature,
};
