//! Solvers for three chip-based Heads-or-Tails games (`JM1`, `JM2`, `JM3`)
//! that model mining incentives on Bitcoin at zero connectivity: whether
//! to persist on a one-block-behind fork, whether deviant mining ever beats
//! honest mining under the current difficulty-adjustment formula, and why
//! counting orphan blocks in that formula removes the incentive.
//!
//! The library computes maximal expected net incomes by finite-horizon
//! dynamic programming ([`solve`], [`value`]), extracts and evaluates
//! optimal policies ([`extract_policy`], [`evaluate_policy`]), locates
//! critical hashrates ([`bias_witness`], [`critical_q`]), and cross-checks
//! everything through three independent routes: brute-force expectimax
//! ([`expectimax_oracle`]), exact rational arithmetic ([`exact_value`]),
//! and seeded Monte Carlo playout ([`simulate`]).

pub mod error;
pub mod game;
pub mod montecarlo;
pub mod oracle;
pub mod solver;
pub mod threshold;

pub use error::{Error, Result};
pub use game::{
    abandon_transition, crush_transition, legal_actions, terminal_value, toss_backup,
    toss_transitions, Action, GameState, GameVariant, TossLaw, Transition,
};
pub use montecarlo::{simulate, SimStats};
pub use oracle::{
    exact_value, expectimax_oracle, parse_decimal_rational, ExactSolver, Rational,
    EXACT_HORIZON_CAP, EXPECTIMAX_HORIZON_CAP,
};
pub use solver::{
    evaluate_policy, extract_policy, solve, value, Policy, ValueTable, DIFFICULTY_PERIOD,
    HORIZON_HARD_CAP, POLICY_TIE_TOLERANCE,
};
pub use threshold::{
    bias_witness, critical_q, BiasWitness, ThresholdBracket, BIAS_EPSILON,
    DEFAULT_THRESHOLD_HORIZON, THRESHOLD_HORIZON_CAP,
};
