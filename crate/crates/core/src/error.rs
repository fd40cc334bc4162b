use thiserror::Error;

use crate::game::{Action, GameVariant};

/// Errors surfaced by the solver, threshold search, oracles and simulator.
#[derive(Debug, Error)]
pub enum Error {
    /// The Tails probability left `[0, 0.5)`; every game assumes a coin
    /// rigged in favor of the bank.
    #[error("tails probability must lie in [0, 0.5): got {0}")]
    BiasOutOfRange(f64),

    /// Same domain violation, reported for an exact rational coin.
    #[error("tails probability must lie in [0, 1/2): got {0}")]
    ExactBiasOutOfRange(crate::oracle::Rational),

    /// A horizon exceeded the cap that keeps the computation bounded.
    #[error("horizon {n} exceeds the cap {cap}")]
    HorizonTooLarge { n: u32, cap: u32 },

    /// A horizon of zero was given where at least one action is required.
    #[error("horizon must be at least 1")]
    ZeroHorizon,

    /// An action was requested in a state where the rules do not offer it.
    #[error("{action:?} is illegal in {variant} at state ({a}, {h})")]
    IllegalAction {
        variant: GameVariant,
        action: Action,
        a: u32,
        h: u32,
    },

    /// A policy had no entry for a state it steered play into.
    #[error("policy has no entry for state ({a}, {h}) with {n} actions left")]
    MissingPolicyEntry { a: u32, h: u32, n: u32 },

    /// A policy built for one game was applied to another.
    #[error("policy was built for {policy} but applied to {requested}")]
    VariantMismatch {
        policy: GameVariant,
        requested: GameVariant,
    },

    /// A threshold search range was malformed or did not bracket a threshold.
    #[error("invalid threshold range [{lo}, {hi}]: {reason}")]
    InvalidRange {
        lo: f64,
        hi: f64,
        reason: &'static str,
    },

    /// The bias predicate failed the monotonicity validation grid, so the
    /// bisection bracket cannot be trusted.
    #[error("bias predicate is not monotone in q: witness at {q_with} but none at {q_without}")]
    NonMonotonicBias { q_with: f64, q_without: f64 },

    /// A simulation was requested with zero trials.
    #[error("simulation needs at least one trial")]
    ZeroTrials,
}

pub type Result<T> = std::result::Result<T, Error>;
