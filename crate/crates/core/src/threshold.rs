//! Bias witnesses and critical-hashrate brackets.
//!
//! A game favors the player at coin `q` if its value turns strictly
//! positive at some horizon; [`bias_witness`] finds the smallest such
//! horizon. [`critical_q`] brackets the infimum of biased `q` by bisection
//! and then validates the result against a coarse grid scan, because
//! monotonicity of the value in `q` is an empirical observation here, not
//! a theorem.

use std::ops::ControlFlow;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::game::{GameState, GameVariant, TossLaw};
use crate::solver::{layer_value, sweep};

/// Values above this are "strictly positive": well above accumulated
/// rounding over ≤ 2016 layers, well below the smallest real bias signal
/// (≈ 4e-8). Also the tolerance for all fairness assertions.
pub const BIAS_EPSILON: f64 = 1e-9;

/// Default horizon for threshold work; the interesting witnesses appear by
/// n = 146, so this has ample headroom while staying fast.
pub const DEFAULT_THRESHOLD_HORIZON: u32 = 300;

/// Largest horizon accepted for threshold work (one difficulty period).
pub const THRESHOLD_HORIZON_CAP: u32 = 2016;

/// Proof that a game is biased: the smallest horizon whose value exceeds
/// [`BIAS_EPSILON`], together with that value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasWitness {
    pub n_star: u32,
    pub value: f64,
}

/// An interval known to contain the critical hashrate: no witness at
/// `q_lo` up to `n_max`, a witness at `q_hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdBracket {
    pub q_lo: f64,
    pub q_hi: f64,
    pub witness_at_hi: BiasWitness,
    pub n_max: u32,
    pub tol: f64,
}

/// Finds the smallest horizon `n <= n_max` at which the game value from
/// `start` exceeds [`BIAS_EPSILON`], in a single layered sweep that records
/// the start-state value at every horizon and stops at the first positive.
pub fn bias_witness(
    variant: GameVariant,
    start: GameState,
    q: f64,
    n_max: u32,
) -> Result<Option<BiasWitness>> {
    let law = TossLaw::new(q)?;
    if n_max == 0 {
        return Err(Error::ZeroHorizon);
    }
    if n_max > THRESHOLD_HORIZON_CAP {
        return Err(Error::HorizonTooLarge {
            n: n_max,
            cap: THRESHOLD_HORIZON_CAP,
        });
    }
    let mut found = None;
    sweep(variant, law, n_max, start, |n, values| {
        let v = layer_value(values, start.a, start.h);
        if v > BIAS_EPSILON {
            found = Some(BiasWitness { n_star: n, value: v });
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    });
    Ok(found)
}

/// Brackets the critical hashrate in `[q_lo, q_hi]` to width `tol` by
/// bisection on "a bias witness exists", then validates the bracket against
/// a grid scan at resolution `max(tol, 1e-3)`.
///
/// Returns `Ok(None)` when `q_hi` itself shows no bias (no threshold in
/// range). Fails with [`Error::NonMonotonicBias`] if the grid scan
/// contradicts the bisection, and [`Error::InvalidRange`] on a malformed
/// range or a witness already present at `q_lo`.
pub fn critical_q(
    variant: GameVariant,
    start: GameState,
    n_max: u32,
    q_lo: f64,
    q_hi: f64,
    tol: f64,
) -> Result<Option<ThresholdBracket>> {
    if !(0.0 <= q_lo && q_lo < q_hi && q_hi < 0.5) {
        return Err(Error::InvalidRange {
            lo: q_lo,
            hi: q_hi,
            reason: "need 0 <= q_lo < q_hi < 0.5",
        });
    }
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::InvalidRange {
            lo: q_lo,
            hi: q_hi,
            reason: "tolerance must be positive",
        });
    }

    let Some(mut witness) = bias_witness(variant, start, q_hi, n_max)? else {
        return Ok(None);
    };
    if bias_witness(variant, start, q_lo, n_max)?.is_some() {
        return Err(Error::InvalidRange {
            lo: q_lo,
            hi: q_hi,
            reason: "a bias witness already exists at the lower bound",
        });
    }

    let (mut lo, mut hi) = (q_lo, q_hi);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // tol below float resolution of the interval
        }
        match bias_witness(variant, start, mid, n_max)? {
            Some(w) => {
                hi = mid;
                witness = w;
            }
            None => lo = mid,
        }
    }

    validate_monotone_grid(variant, start, n_max, q_lo, q_hi, tol, lo, hi)?;

    Ok(Some(ThresholdBracket {
        q_lo: lo,
        q_hi: hi,
        witness_at_hi: witness,
        n_max,
        tol,
    }))
}

/// Scans the bias predicate over `[q_lo, q_hi]` and checks that it flips
/// from false to true exactly once, at a point consistent with the
/// bisection bracket `[lo, hi]`.
#[allow(clippy::too_many_arguments)]
fn validate_monotone_grid(
    variant: GameVariant,
    start: GameState,
    n_max: u32,
    q_lo: f64,
    q_hi: f64,
    tol: f64,
    lo: f64,
    hi: f64,
) -> Result<()> {
    let step = f64::max(tol, 1e-3);
    let mut grid = Vec::new();
    let mut k = 0u32;
    loop {
        let x = q_lo + f64::from(k) * step;
        if x >= q_hi {
            break;
        }
        grid.push(x);
        k += 1;
    }
    grid.push(q_hi);

    let flags: Vec<bool> = grid
        .par_iter()
        .map(|&g| bias_witness(variant, start, g, n_max).map(|w| w.is_some()))
        .collect::<Result<_>>()?;

    for w in flags.windows(2).zip(grid.windows(2)) {
        let (f, g) = w;
        if f[0] && !f[1] {
            return Err(Error::NonMonotonicBias {
                q_with: g[0],
                q_without: g[1],
            });
        }
    }
    let first_true = flags
        .iter()
        .position(|&b| b)
        .expect("the predicate holds at q_hi");
    // The grid's flip must straddle the bisection bracket.
    if grid[first_true] <= lo {
        return Err(Error::NonMonotonicBias {
            q_with: grid[first_true],
            q_without: lo,
        });
    }
    if first_true > 0 && grid[first_true - 1] > hi {
        return Err(Error::NonMonotonicBias {
            q_with: hi,
            q_without: grid[first_true - 1],
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jm1_witness_at_the_reference_coin() {
        let w = bias_witness(GameVariant::Jm1, GameState::new(1, 2), 0.429056, 100)
            .unwrap()
            .expect("biased above the threshold");
        assert!(w.n_star <= 75, "n_star = {}", w.n_star);
        assert!(w.value >= 4.05e-8 * (1.0 - 1e-6), "value = {:e}", w.value);
        // This coin is right at the edge: the bias first shows at n = 75.
        assert_eq!(w.n_star, 75);
    }

    #[test]
    fn jm2_no_witness_just_below() {
        let w = bias_witness(GameVariant::Jm2, GameState::new(0, 0), 0.329392, 300).unwrap();
        assert!(w.is_none());
    }

    #[test]
    fn jm3_never_biased() {
        let w = bias_witness(GameVariant::Jm3, GameState::new(0, 0), 0.45, 200).unwrap();
        assert!(w.is_none());
    }

    #[test]
    fn witness_is_minimal() {
        let start = GameState::new(0, 0);
        let w = bias_witness(GameVariant::Jm2, start, 0.34, 300)
            .unwrap()
            .expect("0.34 is above the threshold");
        let v_before = crate::solver::value(GameVariant::Jm2, 0, 0, w.n_star - 1, 0.34).unwrap();
        assert!(v_before <= BIAS_EPSILON);
        let v_at = crate::solver::value(GameVariant::Jm2, 0, 0, w.n_star, 0.34).unwrap();
        assert_eq!(v_at, w.value);
    }

    #[test]
    fn parameter_validation() {
        assert!(matches!(
            bias_witness(GameVariant::Jm1, GameState::new(1, 2), 0.55, 100),
            Err(Error::BiasOutOfRange(_))
        ));
        assert!(matches!(
            bias_witness(GameVariant::Jm1, GameState::new(1, 2), 0.4, 0),
            Err(Error::ZeroHorizon)
        ));
        assert!(matches!(
            bias_witness(GameVariant::Jm1, GameState::new(1, 2), 0.4, 2017),
            Err(Error::HorizonTooLarge { .. })
        ));
        assert!(matches!(
            critical_q(GameVariant::Jm1, GameState::new(1, 2), 100, 0.45, 0.40, 1e-4),
            Err(Error::InvalidRange { .. })
        ));
        assert!(matches!(
            critical_q(GameVariant::Jm1, GameState::new(1, 2), 100, 0.40, 0.45, 0.0),
            Err(Error::InvalidRange { .. })
        ));
        // Witness already at the lower bound: the range does not bracket.
        assert!(matches!(
            critical_q(GameVariant::Jm2, GameState::new(0, 0), 150, 0.34, 0.45, 1e-3),
            Err(Error::InvalidRange { .. })
        ));
    }

    #[test]
    fn jm1_bracket() {
        let b = critical_q(GameVariant::Jm1, GameState::new(1, 2), 300, 0.40, 0.45, 1e-5)
            .unwrap()
            .expect("threshold lies in range");
        assert!(b.q_hi - b.q_lo <= 1e-5);
        assert!(b.q_lo >= 0.42 && b.q_hi <= 0.43, "bracket [{}, {}]", b.q_lo, b.q_hi);
        // The flip happens between the two reference coins.
        assert!(b.q_lo < 0.429056 && b.q_hi > 0.429055);
        // Bracket consistency: endpoints reproduce none/some.
        assert!(bias_witness(GameVariant::Jm1, GameState::new(1, 2), b.q_lo, 300)
            .unwrap()
            .is_none());
        let w = bias_witness(GameVariant::Jm1, GameState::new(1, 2), b.q_hi, 300)
            .unwrap()
            .expect("witness at q_hi");
        assert_eq!(w, b.witness_at_hi);
    }

    #[test]
    fn jm2_bracket() {
        let b = critical_q(GameVariant::Jm2, GameState::new(0, 0), 150, 0.30, 0.35, 1e-6)
            .unwrap()
            .expect("threshold lies in range");
        assert!(b.q_hi - b.q_lo <= 1e-6);
        assert!(
            b.q_lo >= 0.329392 && b.q_hi <= 0.329394,
            "bracket [{}, {}]",
            b.q_lo,
            b.q_hi
        );
        assert!(bias_witness(GameVariant::Jm2, GameState::new(0, 0), b.q_lo, 150)
            .unwrap()
            .is_none());
        assert!(bias_witness(GameVariant::Jm2, GameState::new(0, 0), b.q_hi, 150)
            .unwrap()
            .is_some());
    }

    #[test]
    fn jm3_has_no_threshold() {
        let b = critical_q(GameVariant::Jm3, GameState::new(0, 0), 150, 0.0, 0.49, 1e-4).unwrap();
        assert!(b.is_none());
    }

    #[test]
    fn brackets_are_deterministic() {
        let run = || {
            critical_q(GameVariant::Jm2, GameState::new(0, 0), 150, 0.30, 0.35, 1e-5)
                .unwrap()
                .unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.q_lo.to_bits(), b.q_lo.to_bits());
        assert_eq!(a.q_hi.to_bits(), b.q_hi.to_bits());
        assert_eq!(a.witness_at_hi, b.witness_at_hi);
    }
}
