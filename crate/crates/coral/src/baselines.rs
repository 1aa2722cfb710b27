//! Comparison methods: exhaustive oracle search, budget-matched random
//! search, and manufacturer-style preset evaluation. All score with the
//! same reward function as the tuner, so results compare on one scale.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::config_space::{Configuration, ProhibitedSet};
use crate::device::{Backend, MeasurementProtocol};
use crate::optimizer::{
    reward, Leader, MeasurementOutcome, ScenarioConstraints, TraceEntry, TuningResult,
};

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("oracle search needs an enumerable backend (profile table or noiseless surface)")]
    NotEnumerable,
    #[error("backend has an empty grid")]
    EmptyGrid,
    #[error("random search needs at least one trial")]
    ZeroTrials,
    #[error("device spec ships no default preset")]
    NoDefaultPreset,
    #[error("preset configuration does not validate: {0}")]
    InvalidPreset(crate::config_space::Violation),
    #[error(transparent)]
    Measure(#[from] crate::device::MeasureError),
}

/// Evaluate every valid configuration and return the highest-reward one.
/// Ties break to the lexicographically smaller configuration.
pub fn oracle_search(
    backend: &dyn Backend,
    constraints: &ScenarioConstraints,
    protocol: &MeasurementProtocol,
) -> Result<TuningResult, BaselineError> {
    if !backend.enumerable() {
        return Err(BaselineError::NotEnumerable);
    }
    let grid = backend.spec().enumerate_grid();
    if grid.is_empty() {
        return Err(BaselineError::EmptyGrid);
    }
    let mut prohibited = ProhibitedSet::new();
    let mut best: Option<Leader> = None;
    let mut evaluations = 0usize;
    for config in grid {
        let Ok(sample) = backend.measure(&config, protocol) else {
            continue; // hardware-failed or absent configurations are excluded
        };
        evaluations += 1;
        let r = reward(&sample, constraints, &mut prohibited);
        let better = match &best {
            None => true,
            Some(b) => r > b.reward || (r == b.reward && config < b.config),
        };
        if better {
            best = Some(Leader { config, sample, reward: r });
        }
    }
    let best = best.ok_or(BaselineError::EmptyGrid)?;
    Ok(TuningResult::from_best("oracle", constraints, Some(&best), Vec::new(), evaluations))
}

/// Draw `trials` configurations uniformly without replacement and keep the
/// best by reward. A grid smaller than `trials` is evaluated in full.
pub fn random_search(
    backend: &dyn Backend,
    constraints: &ScenarioConstraints,
    trials: usize,
    seed: u64,
    protocol: &MeasurementProtocol,
) -> Result<TuningResult, BaselineError> {
    if trials == 0 {
        return Err(BaselineError::ZeroTrials);
    }
    let grid = backend.spec().enumerate_grid();
    if grid.is_empty() {
        return Err(BaselineError::EmptyGrid);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picks: Vec<Configuration> = grid
        .choose_multiple(&mut rng, trials.min(grid.len()))
        .copied()
        .collect();

    let mut prohibited = ProhibitedSet::new();
    let mut best: Option<Leader> = None;
    let mut trace = Vec::new();
    let mut min_reward = 0.0f64;
    for (i, config) in picks.iter().enumerate() {
        let (outcome, r) = match backend.measure(config, protocol) {
            Ok(sample) => {
                let r = reward(&sample, constraints, &mut prohibited);
                if best.as_ref().map_or(true, |b| r > b.reward) {
                    best = Some(Leader { config: *config, sample, reward: r });
                }
                (MeasurementOutcome::Sample(sample), r)
            }
            Err(e) => {
                let r = min_reward - 1.0;
                prohibited.add(*config);
                (MeasurementOutcome::Failure(e.to_string()), r)
            }
        };
        min_reward = min_reward.min(r);
        trace.push(TraceEntry {
            iteration: i + 1,
            config: *config,
            outcome,
            reward: r,
            aside: false,
            weights: None,
            heuristic_applied: false,
            collision_steps: 0,
        });
    }
    let n = trace.len();
    Ok(TuningResult::from_best("random", constraints, best.as_ref(), trace, n))
}

/// A manufacturer-style fixed configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PresetMode {
    /// Every axis at its maximum allowed value.
    MaxPower,
    /// The per-device default configuration shipped with the spec.
    Default,
}

impl PresetMode {
    pub fn name(self) -> &'static str {
        match self {
            PresetMode::MaxPower => "max_power",
            PresetMode::Default => "default",
        }
    }
}

/// Measure a single preset configuration and score it.
pub fn preset_eval(
    backend: &dyn Backend,
    mode: PresetMode,
    constraints: &ScenarioConstraints,
    protocol: &MeasurementProtocol,
) -> Result<TuningResult, BaselineError> {
    let spec = backend.spec();
    let config = match mode {
        PresetMode::MaxPower => spec.max_config(),
        PresetMode::Default => spec.default_preset().ok_or(BaselineError::NoDefaultPreset)?,
    };
    spec.validate(&config).map_err(BaselineError::InvalidPreset)?;
    let sample = backend.measure(&config, protocol)?;
    let mut prohibited = ProhibitedSet::new();
    let r = reward(&sample, constraints, &mut prohibited);
    let leader = Leader { config, sample, reward: r };
    let trace = vec![TraceEntry {
        iteration: 1,
        config,
        outcome: MeasurementOutcome::Sample(sample),
        reward: r,
        aside: false,
        weights: None,
        heuristic_applied: false,
        collision_steps: 0,
    }];
    Ok(TuningResult::from_best(mode.name(), constraints, Some(&leader), trace, 1))
}
