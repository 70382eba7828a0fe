//! Domain types shared by every part of the simulator.
//!
//! All types are plain immutable values; a simulation step builds the next
//! `Electorate` rather than mutating the current one, so snapshots can be
//! shared freely across threads.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::UtilityFunction;

/// A point in the d-dimensional evaluation space.
///
/// Coordinates start as ballot scores in [0,100] but are not clamped once the
/// dynamics is running; movement rules may push voters outside that box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Position(pub Vec<f64>);

impl Position {
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// First violated invariant, if any: wrong length or non-finite entry.
    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.0.len() != dim {
            return Err(Error::DimensionMismatch {
                left: self.0.len(),
                right: dim,
            });
        }
        for (i, x) in self.0.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::Invariant(format!(
                    "position coordinate {i} is not finite ({x})"
                )));
            }
        }
        Ok(())
    }
}

/// One voter: a position plus the ground-truth ballot label from ingestion.
///
/// `official_vote` is carried for evaluation and reporting only; the dynamics
/// never reads it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoterState {
    pub id: String,
    pub position: Position,
    pub official_vote: Option<usize>,
}

/// Ordered collection of voters. Iteration order is insertion order and is
/// part of the determinism contract.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Electorate {
    pub voters: Vec<VoterState>,
    pub dimension: usize,
}

impl Electorate {
    pub fn new(voters: Vec<VoterState>, dimension: usize) -> Self {
        Self { voters, dimension }
    }

    pub fn len(&self) -> usize {
        self.voters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.voters.is_empty()
    }

    /// First violated invariant: position lengths/finiteness, id uniqueness,
    /// and (when `num_candidates` is given) official_vote bounds.
    pub fn validate(&self, num_candidates: Option<usize>) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for v in &self.voters {
            v.position.validate(self.dimension)?;
            if !seen.insert(v.id.as_str()) {
                return Err(Error::Invariant(format!("duplicate voter id {:?}", v.id)));
            }
            if let (Some(vote), Some(m)) = (v.official_vote, num_candidates) {
                if vote >= m {
                    return Err(Error::Invariant(format!(
                        "voter {:?} official_vote {vote} out of range (m={m})",
                        v.id
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn positions(&self) -> Vec<Position> {
        self.voters.iter().map(|v| v.position.clone()).collect()
    }
}

/// The static candidate set: names plus positions in the same space as the
/// voters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateSet {
    pub names: Vec<String>,
    pub positions: Vec<Position>,
}

impl CandidateSet {
    pub fn new(names: Vec<String>, positions: Vec<Position>) -> Self {
        Self { names, positions }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.positions.first().map_or(0, Position::dim)
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.names.is_empty() {
            return Err(Error::EmptyCandidates);
        }
        if self.names.len() != self.positions.len() {
            return Err(Error::Invariant(format!(
                "{} names but {} positions",
                self.names.len(),
                self.positions.len()
            )));
        }
        let mut seen = std::collections::HashSet::new();
        for name in &self.names {
            if !seen.insert(name.as_str()) {
                return Err(Error::Invariant(format!("duplicate candidate {name:?}")));
            }
        }
        for p in &self.positions {
            p.validate(dim)?;
        }
        Ok(())
    }
}

/// Result of polling a sampled sub-electorate: expressed votes per candidate
/// plus the abstention count.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PollResult {
    pub counts: Vec<usize>,
    pub abstentions: usize,
    pub sample_size: usize,
    pub iteration_taken: usize,
}

impl PollResult {
    pub fn expressed(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn validate(&self, num_candidates: usize) -> Result<()> {
        if self.counts.len() != num_candidates {
            return Err(Error::Invariant(format!(
                "poll has {} counts for {num_candidates} candidates",
                self.counts.len()
            )));
        }
        if self.expressed() + self.abstentions != self.sample_size {
            return Err(Error::Invariant(format!(
                "poll counts {} + abstentions {} != sample size {}",
                self.expressed(),
                self.abstentions,
                self.sample_size
            )));
        }
        if self.sample_size == 0 {
            return Err(Error::Invariant("poll sample size is zero".into()));
        }
        Ok(())
    }
}

/// Full plurality count over an electorate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub counts: Vec<usize>,
    pub abstentions: usize,
}

impl Tally {
    pub fn expressed(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn total(&self) -> usize {
        self.expressed() + self.abstentions
    }

    pub fn validate(&self, voters_tallied: usize) -> Result<()> {
        if self.total() != voters_tallied {
            return Err(Error::Invariant(format!(
                "tally total {} != voters tallied {voters_tallied}",
                self.total()
            )));
        }
        Ok(())
    }
}

/// Which movement rule drives the voters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VelocityRule {
    /// Move toward the nearest of the poll's top-k candidates.
    KPragmatist { k: usize },
    /// Move toward the candidate maximizing utility times win probability.
    MaxExpectedUtility,
    /// Move along the expected-utility-weighted sum of candidate directions.
    OpinionCenter,
}

/// Poll cadence: one initial poll only, or a fresh poll every `period`
/// iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PollSchedule {
    Single,
    Every(usize),
}

/// Everything that parameterizes one simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub velocity_rule: VelocityRule,
    pub utility: UtilityFunction,
    /// Step size multiplying every velocity (1.0 reproduces the raw update).
    pub step_size: f64,
    pub poll_period: PollSchedule,
    /// Fraction of the electorate sampled by each poll, in (0,1].
    pub poll_fraction: f64,
    pub max_iterations: usize,
    /// Consecutive iterations with an identical tally order needed to stop.
    pub stable_window: usize,
    pub seed: u64,
    /// Optional pre-run subsample of the loaded electorate.
    pub sample_size: Option<usize>,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            velocity_rule: VelocityRule::KPragmatist { k: 3 },
            utility: UtilityFunction::inverse_distance(),
            step_size: 1.0,
            poll_period: PollSchedule::Single,
            poll_fraction: 0.1,
            max_iterations: 200,
            stable_window: 50,
            seed: 42,
            sample_size: None,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if let VelocityRule::KPragmatist { k } = self.velocity_rule {
            if k == 0 {
                return Err(Error::InvalidConfig("k must be at least 1".into()));
            }
        }
        self.utility.validate()?;
        if !(self.step_size > 0.0) || !self.step_size.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "step_size must be a positive real, got {}",
                self.step_size
            )));
        }
        if let PollSchedule::Every(p) = self.poll_period {
            if p == 0 {
                return Err(Error::InvalidConfig("poll period must be positive".into()));
            }
        }
        if !(self.poll_fraction > 0.0 && self.poll_fraction <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "poll_fraction must be in (0,1], got {}",
                self.poll_fraction
            )));
        }
        if self.stable_window == 0 {
            return Err(Error::InvalidConfig("stable_window must be positive".into()));
        }
        if self.sample_size == Some(0) {
            return Err(Error::InvalidConfig("sample_size must be positive".into()));
        }
        Ok(())
    }
}

/// One iteration's worth of recorded state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: usize,
    pub tally: Tally,
    /// Present only on iterations where a poll was taken.
    pub poll: Option<PollResult>,
    /// Voter positions after this iteration's movement, in electorate order.
    pub positions: Vec<Position>,
}

/// Everything a run produced, in iteration order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationTrace {
    pub records: Vec<TraceRecord>,
    /// Iteration at which the tally order had been identical for
    /// `stable_window` consecutive iterations, if that happened.
    pub converged_at: Option<usize>,
    /// Candidate indices sorted by the final tally (descending count,
    /// ties by lowest index).
    pub final_order: Vec<usize>,
}

impl SimulationTrace {
    pub fn last_tally(&self) -> &Tally {
        &self.records.last().expect("trace has at least one record").tally
    }

    pub fn validate(&self, max_iterations: usize, stable_window: usize) -> Result<()> {
        if self.records.len() > max_iterations + 1 {
            return Err(Error::Invariant(format!(
                "{} records exceed max_iterations {max_iterations} + 1",
                self.records.len()
            )));
        }
        if let Some(t) = self.converged_at {
            if t + 1 < stable_window {
                return Err(Error::Invariant(format!(
                    "converged_at {t} precedes a full stable window of {stable_window}"
                )));
            }
        }
        Ok(())
    }
}
