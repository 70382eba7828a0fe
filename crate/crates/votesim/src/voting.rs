//! Plurality tallying by nearest candidate, abstention, poll sampling, and
//! poll-derived win probabilities.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{distance, UtilityFunction};
use crate::model::{CandidateSet, Electorate, PollResult, Position, Tally};

/// When a voter casts no vote at all.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AbstentionRule {
    Never,
    /// Abstain iff every candidate is strictly farther than `alpha`.
    BeyondAlpha { alpha: f64 },
}

impl AbstentionRule {
    /// Abstention follows the utility: a repulsed voter beyond `alpha` of
    /// every candidate flees them all, which we count as abstention. The
    /// inverse-distance utility never abstains.
    pub fn from_utility(u: &UtilityFunction) -> Self {
        match *u {
            UtilityFunction::InverseDistance { .. } => Self::Never,
            UtilityFunction::Repulsive { alpha } => Self::BeyondAlpha { alpha },
        }
    }
}

/// Index of the candidate closest to `v`; ties go to the lowest index.
pub fn nearest_candidate(v: &Position, candidates: &CandidateSet) -> Result<usize> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let mut best = 0usize;
    let mut best_dist = distance(v, &candidates.positions[0])?;
    for (j, c) in candidates.positions.iter().enumerate().skip(1) {
        let d = distance(v, c)?;
        if d < best_dist {
            best = j;
            best_dist = d;
        }
    }
    Ok(best)
}

/// A single voter's ballot: the nearest candidate, or `None` under
/// `BeyondAlpha` when every candidate is strictly farther than alpha.
fn cast_vote(
    v: &Position,
    candidates: &CandidateSet,
    abstention: &AbstentionRule,
) -> Result<Option<usize>> {
    let nearest = nearest_candidate(v, candidates)?;
    if let AbstentionRule::BeyondAlpha { alpha } = *abstention {
        if distance(v, &candidates.positions[nearest])? > alpha {
            return Ok(None);
        }
    }
    Ok(Some(nearest))
}

/// Plurality count of the whole electorate: one vote per non-abstaining
/// voter for their nearest candidate.
pub fn plurality_tally(
    electorate: &Electorate,
    candidates: &CandidateSet,
    abstention: &AbstentionRule,
) -> Result<Tally> {
    if candidates.is_empty() {
        return Err(Error::EmptyCandidates);
    }
    let ballots: Vec<Option<usize>> = electorate
        .voters
        .par_iter()
        .map(|v| cast_vote(&v.position, candidates, abstention))
        .collect::<Result<_>>()?;
    let mut counts = vec![0usize; candidates.len()];
    let mut abstentions = 0usize;
    for ballot in ballots {
        match ballot {
            Some(j) => counts[j] += 1,
            None => abstentions += 1,
        }
    }
    Ok(Tally {
        counts,
        abstentions,
    })
}

/// Winning candidate index: argmax of counts, ties to the lowest index.
pub fn winner(tally: &Tally) -> Result<usize> {
    if tally.expressed() == 0 {
        return Err(Error::AllAbstention);
    }
    let mut best = 0usize;
    for (j, &c) in tally.counts.iter().enumerate().skip(1) {
        if c > tally.counts[best] {
            best = j;
        }
    }
    Ok(best)
}

/// Candidate indices sorted by descending count, ties by lowest index.
pub fn ranking(counts: &[usize]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.sort_by(|&a, &b| counts[b].cmp(&counts[a]).then(a.cmp(&b)));
    order
}

/// Poll a uniform sample of `ceil(fraction * n)` distinct voters.
///
/// Consumes the random stream sequentially, so outcomes depend only on the
/// rng state, never on thread count.
pub fn conduct_poll<R: Rng>(
    electorate: &Electorate,
    candidates: &CandidateSet,
    fraction: f64,
    abstention: &AbstentionRule,
    rng: &mut R,
    iteration: usize,
) -> Result<PollResult> {
    if electorate.is_empty() {
        return Err(Error::EmptyElectorate);
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "poll fraction must be in (0,1], got {fraction}"
        )));
    }
    let n = electorate.len();
    let sample_size = ((fraction * n as f64).ceil() as usize).clamp(1, n);
    let mut indices = rand::seq::index::sample(rng, n, sample_size).into_vec();
    indices.sort_unstable();
    let sampled = Electorate::new(
        indices
            .into_iter()
            .map(|i| electorate.voters[i].clone())
            .collect(),
        electorate.dimension,
    );
    let tally = plurality_tally(&sampled, candidates, abstention)?;
    Ok(PollResult {
        counts: tally.counts,
        abstentions: tally.abstentions,
        sample_size,
        iteration_taken: iteration,
    })
}

/// Per-candidate win probability estimated from a poll: each candidate's
/// share of the expressed votes. Abstentions are excluded from the
/// denominator.
pub fn win_probability(poll: &PollResult) -> Result<Vec<f64>> {
    let expressed = poll.expressed();
    if expressed == 0 {
        return Err(Error::NoExpressedVotes {
            iteration: poll.iteration_taken,
        });
    }
    Ok(poll
        .counts
        .iter()
        .map(|&c| c as f64 / expressed as f64)
        .collect())
}
