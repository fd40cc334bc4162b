//! Seeded Monte Carlo playout of a fixed policy.
//!
//! A stochastic cross-check on [`crate::solver::evaluate_policy`]: play the
//! policy for real, drawing coin flips from a counter-based stream, and
//! compare sample statistics against the exact expectation.
//!
//! Reproducibility: trial `t` draws from ChaCha8 seeded with the run seed
//! and stream index `t` (one `f64` per Toss, Tails when it falls below
//! `q`). Trials are therefore independent of scheduling, and the
//! aggregation is a fixed-order pairwise sum, so serial and parallel runs
//! return bit-identical statistics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{
    abandon_transition, crush_transition, terminal_value, toss_transitions, Action, GameState,
    GameVariant, TossLaw,
};
use crate::solver::Policy;

/// Sample statistics of total net income over a batch of games.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimStats {
    pub trials: u64,
    pub mean: f64,
    pub stderr: f64,
    pub min: f64,
    pub max: f64,
    pub seed: u64,
}

/// Plays `trials` independent games from `start` with `n` actions each,
/// following `policy`, and returns the sample statistics of net income.
pub fn simulate(
    variant: GameVariant,
    policy: &Policy,
    q: f64,
    n: u32,
    start: GameState,
    trials: u64,
    seed: u64,
) -> Result<SimStats> {
    let law = TossLaw::new(q)?;
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    if policy.variant() != variant {
        return Err(Error::VariantMismatch {
            policy: policy.variant(),
            requested: variant,
        });
    }

    let incomes: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|trial| play_one(variant, policy, law, n, start, seed, trial))
        .collect::<Result<_>>()?;

    let count = incomes.len() as f64;
    let mean = pairwise_sum(&incomes, |x| x) / count;
    let stderr = if incomes.len() > 1 {
        let var = pairwise_sum(&incomes, |x| (x - mean) * (x - mean)) / (count - 1.0);
        (var / count).sqrt()
    } else {
        0.0
    };
    let min = incomes.iter().copied().fold(f64::INFINITY, f64::min);
    let max = incomes.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    Ok(SimStats {
        trials,
        mean,
        stderr,
        min,
        max,
        seed,
    })
}

/// One trajectory. All rewards and successor states come from the game
/// transitions; the simulator adds no rules of its own.
fn play_one(
    variant: GameVariant,
    policy: &Policy,
    law: TossLaw,
    n: u32,
    start: GameState,
    seed: u64,
    trial: u64,
) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);

    let mut st = start;
    let mut budget = n;
    let mut total = 0.0;
    loop {
        if let Some(v) = terminal_value(variant, st, budget) {
            total += v;
            break;
        }
        let act = policy.action(st.a, st.h, budget).ok_or(Error::MissingPolicyEntry {
            a: st.a,
            h: st.h,
            n: budget,
        })?;
        let tr = match act {
            Action::Toss => {
                let [tails, heads] = toss_transitions(variant, st, law);
                if rng.random::<f64>() < law.q() {
                    tails
                } else {
                    heads
                }
            }
            Action::Crush => crush_transition(variant, st, law)?,
            Action::Abandon => abandon_transition(variant, st)?,
        };
        total += tr.reward;
        st = tr.next;
        budget -= 1;
        if tr.terminal {
            break;
        }
    }
    Ok(total)
}

/// Pairwise (cascade) summation in slice order: deterministic and accurate.
fn pairwise_sum<F>(xs: &[f64], f: F) -> f64
where
    F: Fn(f64) -> f64 + Copy,
{
    if xs.len() <= 32 {
        return xs.iter().map(|&x| f(x)).sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid], f) + pairwise_sum(&xs[mid..], f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{evaluate_policy, extract_policy, solve};

    #[test]
    fn always_abandon_means_zero_everywhere() {
        let policy = Policy::from_fn(GameVariant::Jm2, 0.3, 50, GameState::new(0, 0), |a, h, _| {
            (a <= h).then_some(Action::Abandon)
        })
        .unwrap();
        let stats = simulate(
            GameVariant::Jm2,
            &policy,
            0.3,
            50,
            GameState::new(0, 0),
            1000,
            7,
        )
        .unwrap();
        assert_eq!(stats.mean, 0.0);
        assert_eq!(stats.stderr, 0.0);
        assert_eq!(stats.min, 0.0);
        assert_eq!(stats.max, 0.0);
        assert_eq!(stats.trials, 1000);
        assert_eq!(stats.seed, 7);
    }

    #[test]
    fn degenerate_coin_always_lands_heads() {
        // At q = 0 the optimal JM2 play is to abandon; every trajectory nets 0.
        let table = solve(GameVariant::Jm2, 0.0, 30, GameState::new(0, 0)).unwrap();
        let policy = extract_policy(&table);
        let stats =
            simulate(GameVariant::Jm2, &policy, 0.0, 30, GameState::new(0, 0), 500, 3).unwrap();
        assert_eq!(stats.mean, 0.0);
        assert_eq!(stats.max, 0.0);
    }

    #[test]
    fn identical_inputs_reproduce_bitwise() {
        let table = solve(GameVariant::Jm2, 0.34, 40, GameState::new(0, 0)).unwrap();
        let policy = extract_policy(&table);
        let run = || {
            simulate(
                GameVariant::Jm2,
                &policy,
                0.34,
                40,
                GameState::new(0, 0),
                20_000,
                0xDECAF,
            )
            .unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.stderr.to_bits(), b.stderr.to_bits());
        assert_eq!(a.min.to_bits(), b.min.to_bits());
        assert_eq!(a.max.to_bits(), b.max.to_bits());
    }

    #[test]
    fn parallel_matches_serial_aggregation() {
        // Replay the per-trial stream serially and aggregate the same way;
        // the rayon path must agree bit for bit.
        let table = solve(GameVariant::Jm2, 0.33, 25, GameState::new(0, 0)).unwrap();
        let policy = extract_policy(&table);
        let law = TossLaw::new(0.33).unwrap();
        let trials = 5000u64;
        let seed = 99;
        let serial: Vec<f64> = (0..trials)
            .map(|t| {
                play_one(GameVariant::Jm2, &policy, law, 25, GameState::new(0, 0), seed, t)
                    .unwrap()
            })
            .collect();
        let mean = pairwise_sum(&serial, |x| x) / trials as f64;
        let stats = simulate(
            GameVariant::Jm2,
            &policy,
            0.33,
            25,
            GameState::new(0, 0),
            trials,
            seed,
        )
        .unwrap();
        assert_eq!(stats.mean.to_bits(), mean.to_bits());
    }

    #[test]
    fn simulated_mean_tracks_the_exact_expectation() {
        let q = 0.33;
        let n = 20;
        let start = GameState::new(0, 0);
        let table = solve(GameVariant::Jm2, q, n, start).unwrap();
        let policy = extract_policy(&table);
        let exact = evaluate_policy(GameVariant::Jm2, &policy, q, n, start).unwrap();
        let stats = simulate(GameVariant::Jm2, &policy, q, n, start, 20_000, 11).unwrap();
        assert!(
            (stats.mean - exact).abs() <= 4.0 * stats.stderr,
            "mean {} vs exact {} (stderr {})",
            stats.mean,
            exact,
            stats.stderr
        );
        assert!(stats.min <= stats.mean && stats.mean <= stats.max);
    }

    #[test]
    fn rejects_bad_inputs() {
        let table = solve(GameVariant::Jm2, 0.3, 10, GameState::new(0, 0)).unwrap();
        let policy = extract_policy(&table);
        assert!(matches!(
            simulate(GameVariant::Jm2, &policy, 0.3, 10, GameState::new(0, 0), 0, 1),
            Err(Error::ZeroTrials)
        ));
        assert!(matches!(
            simulate(GameVariant::Jm3, &policy, 0.3, 10, GameState::new(0, 0), 10, 1),
            Err(Error::VariantMismatch { .. })
        ));
        // Play escapes the policy's coverage: budget larger than the table.
        assert!(matches!(
            simulate(GameVariant::Jm2, &policy, 0.3, 11, GameState::new(0, 0), 10, 1),
            Err(Error::MissingPolicyEntry { .. })
        ));
    }
}
