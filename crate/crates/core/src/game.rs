//! Rules of the three chip games.
//!
//! Everything downstream (solver, oracles, threshold search, simulator)
//! consumes game semantics exclusively through this module. A state is a
//! pair of chip counts `(a, h)`: `a` chips for the player (blocks on the
//! secret fork), `h` for the bank (official-chain blocks since the fork
//! point). A rigged coin lands Tails with probability `q < 1/2`.
//!
//! The three variants differ in who pays the croupier and what a Crush is
//! worth:
//!
//! * `JM1`: every Toss costs `q` regardless of outcome; reaching `a > h`
//!   ends the game with payout `a`; Abandon ends the game.
//! * `JM2`: a Toss costs `q` only on Heads; Crush (needs `a > h`) pays
//!   `(h+1) - q` and play continues from `(a-h-1, 0)`; Abandon resets to
//!   `(0, 0)` and play continues.
//! * `JM3`: as `JM2` but Crush pays `(1-q)·(h+1)`, since the player also
//!   pays for the `h` orphaned blocks the difficulty function now counts.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Which of the three rule sets governs transitions and payoffs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GameVariant {
    Jm1,
    Jm2,
    Jm3,
}

impl GameVariant {
    pub const ALL: [GameVariant; 3] = [GameVariant::Jm1, GameVariant::Jm2, GameVariant::Jm3];

    pub fn name(self) -> &'static str {
        match self {
            GameVariant::Jm1 => "jm1",
            GameVariant::Jm2 => "jm2",
            GameVariant::Jm3 => "jm3",
        }
    }
}

impl fmt::Display for GameVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GameVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jm1" | "1" => Ok(GameVariant::Jm1),
            "jm2" | "2" => Ok(GameVariant::Jm2),
            "jm3" | "3" => Ok(GameVariant::Jm3),
            other => Err(format!("unknown game '{other}' (expected jm1, jm2 or jm3)")),
        }
    }
}

/// Chip counts: `a` for the player, `h` for the bank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GameState {
    pub a: u32,
    pub h: u32,
}

impl GameState {
    pub const fn new(a: u32, h: u32) -> Self {
        GameState { a, h }
    }

    /// Total chips on the table.
    pub const fn chips(self) -> u32 {
        self.a + self.h
    }
}

impl fmt::Display for GameState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.h)
    }
}

/// The rigged coin: Tails (player wins a chip) with probability `q`,
/// Heads with probability `p = 1 - q`. Construction rejects `q` outside
/// `[0, 0.5)`, so a `TossLaw` is always a valid minority-player coin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TossLaw {
    q: f64,
}

impl TossLaw {
    pub fn new(q: f64) -> Result<Self> {
        if (0.0..0.5).contains(&q) {
            Ok(TossLaw { q })
        } else {
            Err(Error::BiasOutOfRange(q))
        }
    }

    pub fn q(self) -> f64 {
        self.q
    }

    pub fn p(self) -> f64 {
        1.0 - self.q
    }
}

/// The player's three moves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Action {
    Toss,
    Crush,
    Abandon,
}

impl Action {
    pub fn name(self) -> &'static str {
        match self {
            Action::Toss => "toss",
            Action::Crush => "crush",
            Action::Abandon => "abandon",
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One outcome of applying an action: where the game goes, what it pays,
/// how likely the branch is, and whether the game ends there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Transition {
    pub next: GameState,
    pub reward: f64,
    pub probability: f64,
    pub terminal: bool,
}

/// Actions available with `n` actions left.
///
/// With no budget nothing is available. In `JM1` a state with `a > h` is a
/// terminal payout state (see [`terminal_value`]), so it offers no actions
/// either; otherwise the player may Toss or Abandon. In `JM2`/`JM3` the
/// choice is Crush-or-Toss above the bank and Abandon-or-Toss otherwise.
pub fn legal_actions(variant: GameVariant, state: GameState, n: u32) -> &'static [Action] {
    if n == 0 {
        return &[];
    }
    if state.a > state.h {
        match variant {
            GameVariant::Jm1 => &[],
            GameVariant::Jm2 | GameVariant::Jm3 => &[Action::Crush, Action::Toss],
        }
    } else {
        match variant {
            GameVariant::Jm1 => &[Action::Toss, Action::Abandon],
            GameVariant::Jm2 | GameVariant::Jm3 => &[Action::Abandon, Action::Toss],
        }
    }
}

/// The two branches of a Toss: Tails first (probability `q`, player chip),
/// then Heads (probability `1 - q`, bank chip).
///
/// In `JM1` the toss fee `q` is due on both branches; in `JM2`/`JM3` only a
/// Heads outcome (official chain advances) costs the player `q`.
pub fn toss_transitions(variant: GameVariant, state: GameState, law: TossLaw) -> [Transition; 2] {
    let tails_reward = match variant {
        GameVariant::Jm1 => -law.q(),
        GameVariant::Jm2 | GameVariant::Jm3 => 0.0,
    };
    [
        Transition {
            next: GameState::new(state.a + 1, state.h),
            reward: tails_reward,
            probability: law.q(),
            terminal: false,
        },
        Transition {
            next: GameState::new(state.a, state.h + 1),
            reward: -law.q(),
            probability: law.p(),
            terminal: false,
        },
    ]
}

/// Publishing the secret fork. Requires `a > h` and a variant that has the
/// action (`JM1` pays out through its terminal state instead). The bank is
/// wiped out, the player spends `h + 1` chips and keeps `a - h - 1`.
pub fn crush_transition(
    variant: GameVariant,
    state: GameState,
    law: TossLaw,
) -> Result<Transition> {
    if variant == GameVariant::Jm1 || state.a <= state.h {
        return Err(Error::IllegalAction {
            variant,
            action: Action::Crush,
            a: state.a,
            h: state.h,
        });
    }
    Ok(Transition {
        next: GameState::new(state.a - state.h - 1, 0),
        reward: crush_payout(variant, state.h, law),
        probability: 1.0,
        terminal: false,
    })
}

/// Net Crush payout: `(h+1) - q` in `JM2`, `(1-q)·(h+1)` in `JM3`.
pub(crate) fn crush_payout(variant: GameVariant, h: u32, law: TossLaw) -> f64 {
    let republished = f64::from(h) + 1.0;
    match variant {
        GameVariant::Jm1 => unreachable!("JM1 has no crush action"),
        GameVariant::Jm2 => republished - law.q(),
        GameVariant::Jm3 => law.p() * republished,
    }
}

/// Dropping the fork. Free, wipes all chips; ends the game in `JM1`,
/// continues from `(0, 0)` in `JM2`/`JM3`. Illegal when `a > h` (the
/// recurrences never offer it above the bank).
pub fn abandon_transition(variant: GameVariant, state: GameState) -> Result<Transition> {
    if state.a > state.h {
        return Err(Error::IllegalAction {
            variant,
            action: Action::Abandon,
            a: state.a,
            h: state.h,
        });
    }
    Ok(Transition {
        next: GameState::new(0, 0),
        reward: 0.0,
        probability: 1.0,
        terminal: variant == GameVariant::Jm1,
    })
}

/// Value of a state that needs no further expansion: `0` once the budget is
/// spent (all variants), and `a` in `JM1` whenever the player is ahead.
pub fn terminal_value(variant: GameVariant, state: GameState, n: u32) -> Option<f64> {
    if n == 0 {
        return Some(0.0);
    }
    if variant == GameVariant::Jm1 && state.a > state.h {
        return Some(f64::from(state.a));
    }
    None
}

/// Expected value of a Toss given the two continuation values, written in
/// the fee shape of each variant so that solver, policy evaluation and
/// oracles all round identically:
///
/// * `JM1`:       `q·v_tails + (1-q)·v_heads - q`
/// * `JM2`/`JM3`: `q·v_tails + (1-q)·(v_heads - q)`
pub fn toss_backup(variant: GameVariant, law: TossLaw, v_tails: f64, v_heads: f64) -> f64 {
    match variant {
        GameVariant::Jm1 => law.q() * v_tails + law.p() * v_heads - law.q(),
        GameVariant::Jm2 | GameVariant::Jm3 => law.q() * v_tails + law.p() * (v_heads - law.q()),
    }
}
