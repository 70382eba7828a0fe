//! Voter movement: the three velocity rules, the position update, the
//! iteration loop, and order-convergence detection.
//!
//! Each iteration every voter moves by `step_size * velocity(position, poll)`
//! and a full plurality tally is recorded. The run stops once the
//! tally-sorted candidate order has been identical for `stable_window`
//! consecutive iterations (vote counts themselves need not settle), or at
//! `max_iterations`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{distance, UtilityFunction, DEFAULT_EPSILON};
use crate::model::{
    CandidateSet, Electorate, PollResult, PollSchedule, Position, SimulationConfig,
    SimulationTrace, TraceRecord, VelocityRule, VoterState,
};
use crate::voting::{conduct_poll, plurality_tally, ranking, win_probability, AbstentionRule};

/// A movement vector in the evaluation space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Velocity(pub Vec<f64>);

impl Velocity {
    pub fn zero(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

/// Unit vector from `a` to `b`, or the zero vector when the two points are
/// within `eps` of each other (a voter sitting on its target stays put).
pub fn unit_vector(a: &Position, b: &Position, eps: f64) -> Result<Velocity> {
    let norm = distance(a, b)?;
    if norm <= eps {
        return Ok(Velocity::zero(a.dim()));
    }
    Ok(Velocity(
        a.coords()
            .iter()
            .zip(b.coords())
            .map(|(x, y)| (y - x) / norm)
            .collect(),
    ))
}

/// Indices of the top-k candidates by poll counts, ties by lowest index.
fn top_k(poll: &PollResult, k: usize) -> Vec<usize> {
    let mut order = ranking(&poll.counts);
    order.truncate(k);
    order
}

/// Move toward the voter's favourite (nearest) candidate among the poll's
/// top-k.
pub fn velocity_k_pragmatist(
    voter: &VoterState,
    poll: &PollResult,
    candidates: &CandidateSet,
    k: usize,
) -> Result<Velocity> {
    if k == 0 || k > candidates.len() {
        return Err(Error::InvalidConfig(format!(
            "k = {k} outside 1..={}",
            candidates.len()
        )));
    }
    if poll.expressed() == 0 {
        return Err(Error::NoExpressedVotes {
            iteration: poll.iteration_taken,
        });
    }
    let mut target = None;
    let mut best_dist = f64::INFINITY;
    for j in top_k(poll, k) {
        let d = distance(&voter.position, &candidates.positions[j])?;
        // strict < keeps the lowest index on ties (top_k is index-sorted
        // within equal counts, but equal distances across counts still need
        // a deterministic pick)
        let better = d < best_dist || (d == best_dist && Some(j) < target.or(Some(usize::MAX)));
        if better && (target.is_none() || d < best_dist || j < target.unwrap()) {
            target = Some(j);
            best_dist = d;
        }
    }
    let target = target.expect("k >= 1 guarantees a target");
    unit_vector(
        &voter.position,
        &candidates.positions[target],
        DEFAULT_EPSILON,
    )
}

/// Move toward the candidate maximizing `utility * win_probability`, ties by
/// lowest index.
pub fn velocity_max_eu(
    voter: &VoterState,
    poll: &PollResult,
    candidates: &CandidateSet,
    utility: &UtilityFunction,
) -> Result<Velocity> {
    let probs = win_probability(poll)?;
    let mut best = 0usize;
    let mut best_eu = f64::NEG_INFINITY;
    for (j, c) in candidates.positions.iter().enumerate() {
        let eu = utility.evaluate(&voter.position, c)? * probs[j];
        if eu > best_eu {
            best_eu = eu;
            best = j;
        }
    }
    unit_vector(
        &voter.position,
        &candidates.positions[best],
        DEFAULT_EPSILON,
    )
}

/// Move toward a personalised opinion centre: the sum over candidates of the
/// unit direction toward each, weighted by its expected utility. The result
/// is not normalized; with a repulsive utility negative weights point the
/// contribution away from that candidate.
pub fn velocity_opinion_center(
    voter: &VoterState,
    poll: &PollResult,
    candidates: &CandidateSet,
    utility: &UtilityFunction,
) -> Result<Velocity> {
    let probs = win_probability(poll)?;
    let mut total = vec![0.0; voter.position.dim()];
    for (j, c) in candidates.positions.iter().enumerate() {
        let weight = utility.evaluate(&voter.position, c)? * probs[j];
        let e = unit_vector(&voter.position, c, DEFAULT_EPSILON)?;
        for (t, x) in total.iter_mut().zip(&e.0) {
            *t += weight * x;
        }
    }
    Ok(Velocity(total))
}

/// Velocity of one voter under the configured rule.
pub fn voter_velocity(
    voter: &VoterState,
    poll: &PollResult,
    candidates: &CandidateSet,
    config: &SimulationConfig,
) -> Result<Velocity> {
    match config.velocity_rule {
        VelocityRule::KPragmatist { k } => velocity_k_pragmatist(voter, poll, candidates, k),
        VelocityRule::MaxExpectedUtility => {
            velocity_max_eu(voter, poll, candidates, &config.utility)
        }
        VelocityRule::OpinionCenter => {
            velocity_opinion_center(voter, poll, candidates, &config.utility)
        }
    }
}

/// One synchronous update: every voter moves by `step_size * velocity`
/// computed from the same poll. Ids, labels, and voter order are preserved.
pub fn step(
    electorate: &Electorate,
    candidates: &CandidateSet,
    poll: &PollResult,
    config: &SimulationConfig,
) -> Result<Electorate> {
    let voters: Vec<VoterState> = electorate
        .voters
        .par_iter()
        .map(|v| {
            let vel = voter_velocity(v, poll, candidates, config)?;
            let coords = v
                .position
                .coords()
                .iter()
                .zip(&vel.0)
                .map(|(x, dx)| x + config.step_size * dx)
                .collect();
            Ok(VoterState {
                id: v.id.clone(),
                position: Position(coords),
                official_vote: v.official_vote,
            })
        })
        .collect::<Result<_>>()?;
    Ok(Electorate::new(voters, electorate.dimension))
}

fn validate_run_inputs(
    electorate: &Electorate,
    candidates: &CandidateSet,
    config: &SimulationConfig,
) -> Result<AbstentionRule> {
    config.validate()?;
    if electorate.is_empty() {
        return Err(Error::EmptyElectorate);
    }
    candidates.validate(electorate.dimension)?;
    electorate.validate(Some(candidates.len()))?;
    if let VelocityRule::KPragmatist { k } = config.velocity_rule {
        if k > candidates.len() {
            return Err(Error::InvalidConfig(format!(
                "k = {k} exceeds candidate count {}",
                candidates.len()
            )));
        }
    }
    Ok(AbstentionRule::from_utility(&config.utility))
}

/// Run the full iterative simulation, conducting the initial poll at
/// iteration 0 from the configured seed.
pub fn run(
    electorate: &Electorate,
    candidates: &CandidateSet,
    config: &SimulationConfig,
) -> Result<SimulationTrace> {
    let abstention = validate_run_inputs(electorate, candidates, config)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let initial_poll = conduct_poll(
        electorate,
        candidates,
        config.poll_fraction,
        &abstention,
        &mut rng,
        0,
    )?;
    run_loop(electorate, candidates, config, abstention, initial_poll, rng)
}

/// Run with a caller-supplied initial poll instead of sampling one; useful
/// for studying how a fixed announced poll steers the dynamics. Further
/// polls still follow the configured schedule.
pub fn run_with_initial_poll(
    electorate: &Electorate,
    candidates: &CandidateSet,
    config: &SimulationConfig,
    initial_poll: PollResult,
) -> Result<SimulationTrace> {
    let abstention = validate_run_inputs(electorate, candidates, config)?;
    initial_poll.validate(candidates.len())?;
    let rng = ChaCha8Rng::seed_from_u64(config.seed);
    run_loop(electorate, candidates, config, abstention, initial_poll, rng)
}

fn run_loop(
    electorate: &Electorate,
    candidates: &CandidateSet,
    config: &SimulationConfig,
    abstention: AbstentionRule,
    initial_poll: PollResult,
    mut rng: ChaCha8Rng,
) -> Result<SimulationTrace> {
    if initial_poll.expressed() == 0 {
        return Err(Error::NoExpressedVotes { iteration: 0 });
    }

    let mut records = Vec::with_capacity(config.max_iterations.min(4096) + 1);
    let mut current = electorate.clone();
    let mut poll = initial_poll.clone();

    let tally = plurality_tally(&current, candidates, &abstention)?;
    let mut order = ranking(&tally.counts);
    let mut stable_len = 1usize;
    records.push(TraceRecord {
        iteration: 0,
        tally,
        poll: Some(initial_poll),
        positions: current.positions(),
    });
    let mut converged_at = if stable_len >= config.stable_window {
        Some(0)
    } else {
        None
    };

    if converged_at.is_none() {
        for i in 1..=config.max_iterations {
            current = step(&current, candidates, &poll, config)?;
            let tally = plurality_tally(&current, candidates, &abstention)?;

            let new_poll = match config.poll_period {
                PollSchedule::Every(period) if i % period == 0 => {
                    let p = conduct_poll(
                        &current,
                        candidates,
                        config.poll_fraction,
                        &abstention,
                        &mut rng,
                        i,
                    )?;
                    if p.expressed() == 0 {
                        return Err(Error::NoExpressedVotes { iteration: i });
                    }
                    poll = p.clone();
                    Some(p)
                }
                _ => None,
            };

            let new_order = ranking(&tally.counts);
            if new_order == order {
                stable_len += 1;
            } else {
                order = new_order;
                stable_len = 1;
            }
            records.push(TraceRecord {
                iteration: i,
                tally,
                poll: new_poll,
                positions: current.positions(),
            });
            if stable_len >= config.stable_window {
                converged_at = Some(i);
                break;
            }
        }
    }

    let final_order = ranking(&records.last().expect("at least one record").tally.counts);
    Ok(SimulationTrace {
        records,
        converged_at,
        final_order,
    })
}
