//! Curriculum schedules: per-step probability vectors over `M` difficulty
//! levels.
//!
//! * random: `p_j = 1 / M`
//! * easy-to-hard: one-hot on the stage `j` with `tau_j <= t < tau_{j+1}`
//! * Gaussian: `x_t = (t / N_T)^beta * (M - 1)`, `mu_j = j - 1`,
//!   `p_j ∝ exp(-(x_t - mu_j)^2 / (2 sigma^2))`

use std::io::Write;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum SchedulerError {
    #[error("invalid scheduler parameters: {0}")]
    InvalidParams(String),
    #[error("step {t} outside [0, {limit}{close}")]
    StepOutOfRange { t: usize, limit: usize, close: char },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SchedulerParams {
    /// Number of difficulty levels `M`.
    pub levels: usize,
    /// Total training steps `N_T`.
    pub total_steps: usize,
    /// Stage boundaries `tau_1..tau_{M+1}` for easy-to-hard; `None` means
    /// `M` equal stages.
    pub stage_bounds: Option<Vec<usize>>,
    pub beta: f64,
    pub sigma: f64,
}

impl Default for SchedulerParams {
    fn default() -> Self {
        Self {
            levels: 10,
            total_steps: 200,
            stage_bounds: None,
            beta: 1.0,
            sigma: 1.0,
        }
    }
}

impl SchedulerParams {
    pub fn new(levels: usize, total_steps: usize) -> Self {
        Self {
            levels,
            total_steps,
            ..Default::default()
        }
    }

    /// `tau_j = floor((j - 1) * N_T / M)` unless explicit bounds are set.
    pub fn bounds(&self) -> Vec<usize> {
        match &self.stage_bounds {
            Some(b) => b.clone(),
            None => (0..=self.levels)
                .map(|j| j * self.total_steps / self.levels.max(1))
                .collect(),
        }
    }

    pub fn validate(&self) -> Result<(), SchedulerError> {
        let bad = |m: String| Err(SchedulerError::InvalidParams(m));
        if self.levels < 1 {
            return bad("at least one level is required".into());
        }
        if self.total_steps < 1 {
            return bad("total_steps must be >= 1".into());
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return bad(format!("beta must be positive, got {}", self.beta));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad(format!("sigma must be positive, got {}", self.sigma));
        }
        let b = self.bounds();
        if b.len() != self.levels + 1 {
            return bad(format!("expected {} stage bounds, got {}", self.levels + 1, b.len()));
        }
        if b[0] != 0 || b[self.levels] != self.total_steps {
            return bad("stage bounds must start at 0 and end at total_steps".into());
        }
        if b.windows(2).any(|w| w[1] <= w[0]) {
            return bad("stage bounds must be strictly increasing".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelDistribution {
    pub probabilities: Vec<f64>,
}

impl LevelDistribution {
    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    /// Probability of 1-based `level`.
    pub fn p(&self, level: usize) -> f64 {
        self.probabilities.get(level.wrapping_sub(1)).copied().unwrap_or(0.0)
    }

    /// 1-based level with the largest probability (lowest on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, p) in self.probabilities.iter().enumerate() {
            if *p > self.probabilities[best] {
                best = i;
            }
        }
        best + 1
    }

    pub fn is_valid(&self) -> bool {
        !self.probabilities.is_empty()
            && self.probabilities.iter().all(|p| *p >= 0.0 && p.is_finite())
            && (self.probabilities.iter().sum::<f64>() - 1.0).abs() <= 1e-12
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchedulerKind {
    Random,
    EasyToHard,
    Gaussian,
}

impl SchedulerKind {
    pub const ALL: [SchedulerKind; 3] =
        [SchedulerKind::Random, SchedulerKind::EasyToHard, SchedulerKind::Gaussian];

    pub fn name(self) -> &'static str {
        match self {
            SchedulerKind::Random => "random",
            SchedulerKind::EasyToHard => "easy_to_hard",
            SchedulerKind::Gaussian => "gaussian",
        }
    }
}

impl std::str::FromStr for SchedulerKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random" => Ok(SchedulerKind::Random),
            "easy_to_hard" | "easy-to-hard" | "e2h" => Ok(SchedulerKind::EasyToHard),
            "gaussian" => Ok(SchedulerKind::Gaussian),
            other => Err(format!("unknown scheduler `{other}` (random, easy_to_hard, gaussian)")),
        }
    }
}

fn check_step(t: usize, params: &SchedulerParams, inclusive: bool) -> Result<(), SchedulerError> {
    params.validate()?;
    let ok = if inclusive { t <= params.total_steps } else { t < params.total_steps };
    if ok {
        Ok(())
    } else {
        Err(SchedulerError::StepOutOfRange {
            t,
            limit: params.total_steps,
            close: if inclusive { ']' } else { ')' },
        })
    }
}

pub fn p_random(t: usize, params: &SchedulerParams) -> Result<LevelDistribution, SchedulerError> {
    check_step(t, params, false)?;
    Ok(LevelDistribution {
        probabilities: vec![1.0 / params.levels as f64; params.levels],
    })
}

pub fn p_easy_to_hard(t: usize, params: &SchedulerParams) -> Result<LevelDistribution, SchedulerError> {
    check_step(t, params, false)?;
    let b = params.bounds();
    let stage = (0..params.levels)
        .find(|&j| b[j] <= t && t < b[j + 1])
        .expect("bounds partition [0, total_steps)");
    let mut probabilities = vec![0.0; params.levels];
    probabilities[stage] = 1.0;
    Ok(LevelDistribution { probabilities })
}

/// Centre `x_t` of the Gaussian schedule.
pub fn gaussian_center(t: usize, params: &SchedulerParams) -> f64 {
    (t as f64 / params.total_steps as f64).powf(params.beta) * (params.levels as f64 - 1.0)
}

pub fn p_gaussian(t: usize, params: &SchedulerParams) -> Result<LevelDistribution, SchedulerError> {
    check_step(t, params, true)?;
    let x = gaussian_center(t, params);
    let two_s2 = 2.0 * params.sigma * params.sigma;
    let exponents: Vec<f64> = (0..params.levels)
        .map(|j| -(x - j as f64).powi(2) / two_s2)
        .collect();
    // shifting by the max exponent cancels in the ratio and avoids underflow
    let top = exponents.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let s: Vec<f64> = exponents.iter().map(|e| (e - top).exp()).collect();
    let z: f64 = s.iter().sum();
    Ok(LevelDistribution {
        probabilities: s.iter().map(|v| v / z).collect(),
    })
}

pub fn distribution(
    kind: SchedulerKind,
    t: usize,
    params: &SchedulerParams,
) -> Result<LevelDistribution, SchedulerError> {
    match kind {
        SchedulerKind::Random => p_random(t, params),
        SchedulerKind::EasyToHard => p_easy_to_hard(t, params),
        SchedulerKind::Gaussian => p_gaussian(t, params),
    }
}

/// Categorical draw; returns a 1-based level.
pub fn sample_level<R: Rng + ?Sized>(dist: &LevelDistribution, rng: &mut R) -> usize {
    let index = WeightedIndex::new(&dist.probabilities).expect("a valid distribution has positive mass");
    index.sample(rng) + 1
}

/// Writes one row per step `t in [0, N_T)` with columns
/// `step, level_1, ..., level_M`.
pub fn write_trace_csv<W: Write>(
    kind: SchedulerKind,
    params: &SchedulerParams,
    out: W,
) -> Result<(), SchedulerError> {
    params.validate()?;
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["step".to_string()];
    header.extend((1..=params.levels).map(|j| format!("level_{j}")));
    w.write_record(&header)?;
    for t in 0..params.total_steps {
        let d = distribution(kind, t, params)?;
        let mut row = vec![t.to_string()];
        row.extend(d.probabilities.iter().map(|p| p.to_string()));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| SchedulerError::Io(e.to_string()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::from_seed;
    use proptest::prelude::*;

    #[test]
    fn random_is_uniform() {
        let p = SchedulerParams::new(10, 100);
        let d0 = p_random(0, &p).unwrap();
        assert!(d0.probabilities.iter().all(|&x| x == 0.1));
        assert_eq!(d0, p_random(99, &p).unwrap());
        assert_eq!(p_random(0, &SchedulerParams::new(1, 5)).unwrap().probabilities, vec![1.0]);
        assert!(p_random(100, &p).is_err());
    }

    #[test]
    fn easy_to_hard_stages() {
        let p = SchedulerParams::new(4, 400);
        assert_eq!(p_easy_to_hard(150, &p).unwrap().probabilities, vec![0.0, 1.0, 0.0, 0.0]);
        assert_eq!(p_easy_to_hard(0, &p).unwrap().argmax(), 1);
        assert_eq!(p_easy_to_hard(399, &p).unwrap().argmax(), 4);
        let custom = SchedulerParams { stage_bounds: Some(vec![0, 10, 300, 350, 400]), ..p };
        assert_eq!(p_easy_to_hard(10, &custom).unwrap().argmax(), 2);
    }

    #[test]
    fn gaussian_endpoints_and_midpoint() {
        let p = SchedulerParams::new(10, 100);
        assert_eq!(p_gaussian(0, &p).unwrap().argmax(), 1);
        assert_eq!(p_gaussian(100, &p).unwrap().argmax(), 10);
        let mid = p_gaussian(50, &p).unwrap();
        assert!((gaussian_center(50, &p) - 4.5).abs() < 1e-15);
        assert!((mid.p(5) - mid.p(6)).abs() <= 1e-12);
        assert!(p_gaussian(101, &p).is_err());
    }

    #[test]
    fn smaller_sigma_is_sharper() {
        let sharp = SchedulerParams { sigma: 0.5, ..SchedulerParams::new(10, 100) };
        let wide = SchedulerParams { sigma: 2.0, ..SchedulerParams::new(10, 100) };
        let max = |d: LevelDistribution| d.probabilities.into_iter().fold(0.0, f64::max);
        assert!(max(p_gaussian(50, &sharp).unwrap()) > max(p_gaussian(50, &wide).unwrap()));
    }

    #[test]
    fn bad_params_rejected() {
        assert!(SchedulerParams::new(0, 10).validate().is_err());
        assert!(SchedulerParams::new(10, 5).validate().is_err());
        assert!(SchedulerParams { beta: 0.0, ..Default::default() }.validate().is_err());
        assert!(SchedulerParams { sigma: -1.0, ..Default::default() }.validate().is_err());
        let bounds = SchedulerParams { stage_bounds: Some(vec![0, 5, 5, 10]), ..SchedulerParams::new(3, 10) };
        assert!(bounds.validate().is_err());
    }

    #[test]
    fn sampling_frequencies() {
        let mut rng = from_seed(1);
        let one_hot = LevelDistribution { probabilities: vec![0.0, 0.0, 1.0] };
        assert!((0..1000).all(|_| sample_level(&one_hot, &mut rng) == 3));
        let fair = LevelDistribution { probabilities: vec![0.5, 0.5] };
        let n = 100_000;
        let ones = (0..n).filter(|_| sample_level(&fair, &mut rng) == 1).count();
        let f = ones as f64 / n as f64;
        // three binomial standard deviations
        assert!((f - 0.5).abs() < 3.0 * (0.25 / n as f64).sqrt(), "{f}");
        let skewed = LevelDistribution { probabilities: vec![0.3, 0.0, 0.7] };
        assert!((0..10_000).all(|_| sample_level(&skewed, &mut rng) != 2));
    }

    #[test]
    fn csv_trace_shape() {
        let p = SchedulerParams::new(4, 400);
        let mut buf = Vec::new();
        write_trace_csv(SchedulerKind::EasyToHard, &p, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "step,level_1,level_2,level_3,level_4");
        assert_eq!(lines.len(), 401);
        assert_eq!(lines[1], "0,1,0,0,0");
        assert_eq!(lines[400], "399,0,0,0,1");
    }

    proptest! {
        #[test]
        fn all_distributions_valid(m in 1usize..15, extra in 0usize..300, beta in 0.1f64..4.0, sigma in 0.1f64..4.0, frac in 0.0f64..1.0) {
            let p = SchedulerParams { beta, sigma, ..SchedulerParams::new(m, m + extra) };
            let t = ((p.total_steps as f64 - 1.0) * frac) as usize;
            for kind in SchedulerKind::ALL {
                prop_assert!(distribution(kind, t, &p).unwrap().is_valid());
            }
            prop_assert!(p_gaussian(p.total_steps, &p).unwrap().is_valid());
        }

        #[test]
        fn gaussian_argmax_non_decreasing(beta in 0.2f64..3.0, sigma in 0.2f64..3.0) {
            let p = SchedulerParams { beta, sigma, ..SchedulerParams::new(10, 200) };
            let argmaxes: Vec<usize> = (0..=200).map(|t| p_gaussian(t, &p).unwrap().argmax()).collect();
            prop_assert!(argmaxes.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn low_beta_moves_ahead_of_linear(beta in 0.05f64..0.95, t in 1usize..199) {
            let p = SchedulerParams { beta, ..SchedulerParams::new(10, 200) };
            let linear = SchedulerParams::new(10, 200);
            prop_assert!(gaussian_center(t, &p) > gaussian_center(t, &linear));
        }
    }
}
