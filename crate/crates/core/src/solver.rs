//! Finite-horizon dynamic programming over the game graphs.
//!
//! Values are computed bottom-up by remaining budget `n`: every action
//! consumes exactly one budget unit, so layer `n` depends only on layer
//! `n - 1`. Only states reachable from the start within the budget are
//! materialized: a state with budget `n` left satisfies
//! `a + h <= a0 + h0 + (n_max - n)`, because Toss is the only chip-creating
//! action. The streaming entry points ([`value`], and the threshold search
//! built on top of [`sweep`]) keep two rolling layers and run in O(n²)
//! memory; [`solve`] keeps every layer, which is what policy extraction and
//! table-wide checks need, at O(n³) memory.

use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::game::{self, Action, GameState, GameVariant, TossLaw};

/// Hard cap on any horizon accepted by the solver.
pub const HORIZON_HARD_CAP: u32 = 4096;

/// One difficulty-adjustment period; horizons beyond this have no reading
/// in the mining story, though the solver accepts them up to the hard cap.
pub const DIFFICULTY_PERIOD: u32 = 2016;

/// Two action backups closer than this are treated as tied when extracting
/// a policy; ties break Crush over Abandon over Toss.
pub const POLICY_TIE_TOLERANCE: f64 = 1e-12;

/// Position of `(a, h)` in a triangular layer laid out by total chips.
#[inline]
fn tri_index(a: u32, h: u32) -> usize {
    let s = (a + h) as usize;
    s * (s + 1) / 2 + a as usize
}

/// Number of slots for all states with `a + h <= bound`.
fn tri_len(bound: u32) -> usize {
    let b = bound as usize;
    (b + 1) * (b + 2) / 2
}

fn check_horizon(n: u32) -> Result<()> {
    if n > HORIZON_HARD_CAP {
        return Err(Error::HorizonTooLarge {
            n,
            cap: HORIZON_HARD_CAP,
        });
    }
    Ok(())
}

/// Backup of a single action against the previous layer, written in the
/// exact expression shapes of the recurrences so results are reproducible
/// bit for bit across every evaluation path in this crate.
fn action_backup(
    variant: GameVariant,
    law: TossLaw,
    a: u32,
    h: u32,
    action: Action,
    prev: &[f64],
) -> f64 {
    match action {
        Action::Toss => game::toss_backup(
            variant,
            law,
            prev[tri_index(a + 1, h)],
            prev[tri_index(a, h + 1)],
        ),
        Action::Crush => game::crush_payout(variant, h, law) + prev[tri_index(a - h - 1, 0)],
        Action::Abandon => match variant {
            GameVariant::Jm1 => 0.0,
            GameVariant::Jm2 | GameVariant::Jm3 => prev[tri_index(0, 0)],
        },
    }
}

/// Fills `out` with the values of layer `n` (states with `a + h <= bound`).
fn fill_layer(
    variant: GameVariant,
    law: TossLaw,
    n: u32,
    bound: u32,
    prev: Option<&[f64]>,
    out: &mut [f64],
) {
    for s in 0..=bound {
        for a in 0..=s {
            let h = s - a;
            let st = GameState::new(a, h);
            let v = match game::terminal_value(variant, st, n) {
                Some(t) => t,
                None => {
                    let prev = prev.expect("non-terminal states only exist for n >= 1");
                    let mut best = f64::NEG_INFINITY;
                    for &act in game::legal_actions(variant, st, n) {
                        best = best.max(action_backup(variant, law, a, h, act, prev));
                    }
                    best
                }
            };
            out[tri_index(a, h)] = v;
        }
    }
}

/// Runs the layered sweep with two rolling buffers, handing each finished
/// layer to `visit` so callers can read values or stop early.
pub(crate) fn sweep<F>(
    variant: GameVariant,
    law: TossLaw,
    n_max: u32,
    start: GameState,
    mut visit: F,
) where
    F: FnMut(u32, &[f64]) -> ControlFlow<()>,
{
    let s0 = start.chips();
    let cap = tri_len(s0 + n_max);
    let mut prev = vec![0.0; cap];
    let mut cur = vec![0.0; cap];

    fill_layer(variant, law, 0, s0 + n_max, None, &mut prev);
    if visit(0, &prev).is_break() {
        return;
    }
    for n in 1..=n_max {
        let bound = s0 + (n_max - n);
        fill_layer(variant, law, n, bound, Some(&prev), &mut cur);
        if visit(n, &cur).is_break() {
            return;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
}

pub(crate) fn layer_value(values: &[f64], a: u32, h: u32) -> f64 {
    values[tri_index(a, h)]
}

/// Maximal expected net income for every reachable `(a, h, n)`.
#[derive(Debug, Clone)]
pub struct ValueTable {
    variant: GameVariant,
    q: f64,
    n_max: u32,
    start: GameState,
    layers: Vec<Vec<f64>>,
}

impl ValueTable {
    pub fn variant(&self) -> GameVariant {
        self.variant
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn start(&self) -> GameState {
        self.start
    }

    fn bound(&self, n: u32) -> u32 {
        self.start.chips() + (self.n_max - n)
    }

    /// Value at `(a, h)` with `n` actions left, if that state is stored.
    pub fn value(&self, a: u32, h: u32, n: u32) -> Option<f64> {
        if n > self.n_max || a + h > self.bound(n) {
            return None;
        }
        Some(self.layers[n as usize][tri_index(a, h)])
    }

    /// All stored `(a, h, n, value)` entries, by ascending `n`, then total
    /// chips, then `a`.
    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, u32, f64)> + '_ {
        (0..=self.n_max).flat_map(move |n| {
            let layer = &self.layers[n as usize];
            (0..=self.bound(n)).flat_map(move |s| {
                (0..=s).map(move |a| (a, s - a, n, layer[tri_index(a, s - a)]))
            })
        })
    }
}

/// Solves the game: builds the full table of values for every state
/// reachable from `start` within `n_max` actions.
///
/// Memory grows as `n_max³/6` entries; desk-scale horizons (a few hundred)
/// are cheap, while streaming callers ([`value`], the threshold search)
/// should be used for long horizons.
pub fn solve(variant: GameVariant, q: f64, n_max: u32, start: GameState) -> Result<ValueTable> {
    let law = TossLaw::new(q)?;
    check_horizon(n_max)?;
    let s0 = start.chips();
    let mut layers: Vec<Vec<f64>> = Vec::with_capacity(n_max as usize + 1);
    for n in 0..=n_max {
        let bound = s0 + (n_max - n);
        let mut layer = vec![0.0; tri_len(bound)];
        fill_layer(variant, law, n, bound, layers.last().map(Vec::as_slice), &mut layer);
        layers.push(layer);
    }
    Ok(ValueTable {
        variant,
        q,
        n_max,
        start,
        layers,
    })
}

/// Maximal expected net income starting from `(a, h)` with `n` actions.
///
/// Runs the layered sweep with two rolling buffers: O(n²) memory, no table.
pub fn value(variant: GameVariant, a: u32, h: u32, n: u32, q: f64) -> Result<f64> {
    let law = TossLaw::new(q)?;
    check_horizon(n)?;
    let start = GameState::new(a, h);
    let mut out = 0.0;
    sweep(variant, law, n, start, |layer_n, values| {
        if layer_n == n {
            out = layer_value(values, a, h);
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(out)
}

/// The argmax action at every reachable non-terminal state with `n >= 1`.
#[derive(Debug, Clone)]
pub struct Policy {
    variant: GameVariant,
    q: f64,
    n_max: u32,
    start: GameState,
    /// `layers[n - 1]` holds the choices for states with `n` actions left.
    layers: Vec<Vec<Option<Action>>>,
}

impl Policy {
    pub fn variant(&self) -> GameVariant {
        self.variant
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn start(&self) -> GameState {
        self.start
    }

    fn bound(&self, n: u32) -> u32 {
        self.start.chips() + (self.n_max - n)
    }

    /// The prescribed action at `(a, h)` with `n` actions left. `None` for
    /// terminal states, exhausted budgets, and states outside the policy.
    pub fn action(&self, a: u32, h: u32, n: u32) -> Option<Action> {
        if n == 0 || n > self.n_max || a + h > self.bound(n) {
            return None;
        }
        self.layers[(n - 1) as usize][tri_index(a, h)]
    }

    /// All `(a, h, n, action)` entries, by ascending `n`, then total chips,
    /// then `a`.
    pub fn entries(&self) -> impl Iterator<Item = (u32, u32, u32, Action)> + '_ {
        (1..=self.n_max).flat_map(move |n| {
            let layer = &self.layers[(n - 1) as usize];
            (0..=self.bound(n)).flat_map(move |s| {
                (0..=s).filter_map(move |a| {
                    layer[tri_index(a, s - a)].map(|act| (a, s - a, n, act))
                })
            })
        })
    }

    /// Builds a hand-rolled policy from a choice function. Every returned
    /// action is checked against [`game::legal_actions`]; return `None` on
    /// states the policy never visits (and on terminal states).
    pub fn from_fn<F>(
        variant: GameVariant,
        q: f64,
        n_max: u32,
        start: GameState,
        mut choose: F,
    ) -> Result<Policy>
    where
        F: FnMut(u32, u32, u32) -> Option<Action>,
    {
        TossLaw::new(q)?;
        check_horizon(n_max)?;
        let s0 = start.chips();
        let mut layers = Vec::with_capacity(n_max as usize);
        for n in 1..=n_max {
            let bound = s0 + (n_max - n);
            let mut choices: Vec<Option<Action>> = vec![None; tri_len(bound)];
            for s in 0..=bound {
                for a in 0..=s {
                    let h = s - a;
                    if let Some(act) = choose(a, h, n) {
                        if !game::legal_actions(variant, GameState::new(a, h), n).contains(&act) {
                            return Err(Error::IllegalAction {
                                variant,
                                action: act,
                                a,
                                h,
                            });
                        }
                        choices[tri_index(a, h)] = Some(act);
                    }
                }
            }
            layers.push(choices);
        }
        Ok(Policy {
            variant,
            q,
            n_max,
            start,
            layers,
        })
    }
}

/// Tie-break preference: realize value, then reset honestly, then gamble.
const ACTION_PREFERENCE: [Action; 3] = [Action::Crush, Action::Abandon, Action::Toss];

/// Reads the argmax action out of a solved table at every reachable
/// non-terminal state. Backups within [`POLICY_TIE_TOLERANCE`] of the best
/// are tied and resolved by Crush over Abandon over Toss.
pub fn extract_policy(table: &ValueTable) -> Policy {
    let variant = table.variant;
    let law = TossLaw::new(table.q).expect("validated when the table was solved");
    let mut layers = Vec::with_capacity(table.n_max as usize);
    for n in 1..=table.n_max {
        let bound = table.bound(n);
        let prev = table.layers[(n - 1) as usize].as_slice();
        let mut choices: Vec<Option<Action>> = vec![None; tri_len(bound)];
        for s in 0..=bound {
            for a in 0..=s {
                let h = s - a;
                let st = GameState::new(a, h);
                if game::terminal_value(variant, st, n).is_some() {
                    continue;
                }
                let acts = game::legal_actions(variant, st, n);
                let mut best = f64::NEG_INFINITY;
                for &act in acts {
                    best = best.max(action_backup(variant, law, a, h, act, prev));
                }
                let chosen = ACTION_PREFERENCE.iter().copied().find(|act| {
                    acts.contains(act)
                        && best - action_backup(variant, law, a, h, *act, prev)
                            <= POLICY_TIE_TOLERANCE
                });
                choices[tri_index(a, h)] = Some(chosen.expect("some action attains the max"));
            }
        }
        layers.push(choices);
    }
    Policy {
        variant,
        q: table.q,
        n_max: table.n_max,
        start: table.start,
        layers,
    }
}

/// Expected net income of following `policy` exactly: a linear backward
/// recursion with no maximization. Fails with [`Error::MissingPolicyEntry`]
/// if play can reach a state the policy does not cover.
pub fn evaluate_policy(
    variant: GameVariant,
    policy: &Policy,
    q: f64,
    n: u32,
    start: GameState,
) -> Result<f64> {
    let law = TossLaw::new(q)?;
    check_horizon(n)?;
    if policy.variant != variant {
        return Err(Error::VariantMismatch {
            policy: policy.variant,
            requested: variant,
        });
    }
    let s0 = start.chips();

    // Forward pass: mark the states reachable under the policy, checking
    // coverage as we go. reach[m] covers states with m actions left.
    let mut reach: Vec<Vec<bool>> = (0..=n)
        .map(|m| vec![false; tri_len(s0 + (n - m))])
        .collect();
    reach[n as usize][tri_index(start.a, start.h)] = true;
    for m in (1..=n).rev() {
        let bound = s0 + (n - m);
        for s in 0..=bound {
            for a in 0..=s {
                let h = s - a;
                if !reach[m as usize][tri_index(a, h)] {
                    continue;
                }
                let st = GameState::new(a, h);
                if game::terminal_value(variant, st, m).is_some() {
                    continue;
                }
                let act = policy
                    .action(a, h, m)
                    .ok_or(Error::MissingPolicyEntry { a, h, n: m })?;
                let below = &mut reach[(m - 1) as usize];
                match act {
                    Action::Toss => {
                        below[tri_index(a + 1, h)] = true;
                        below[tri_index(a, h + 1)] = true;
                    }
                    Action::Crush => below[tri_index(a - h - 1, 0)] = true,
                    Action::Abandon => match variant {
                        GameVariant::Jm1 => {}
                        GameVariant::Jm2 | GameVariant::Jm3 => below[tri_index(0, 0)] = true,
                    },
                }
            }
        }
    }

    // Backward pass over the marked states only.
    let mut prev = vec![0.0; tri_len(s0 + n)];
    for m in 1..=n {
        let bound = s0 + (n - m);
        let mut cur = vec![0.0; tri_len(bound)];
        for s in 0..=bound {
            for a in 0..=s {
                let h = s - a;
                if !reach[m as usize][tri_index(a, h)] {
                    continue;
                }
                let st = GameState::new(a, h);
                cur[tri_index(a, h)] = match game::terminal_value(variant, st, m) {
                    Some(t) => t,
                    None => {
                        let act = policy.action(a, h, m).expect("checked in forward pass");
                        action_backup(variant, law, a, h, act, &prev)
                    }
                };
            }
        }
        prev = cur;
    }
    Ok(prev[tri_index(start.a, start.h)])
}
