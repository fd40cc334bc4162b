//! Independent verification routes for the solver.
//!
//! Two oracles cross-check the layered dynamic program:
//!
//! * [`expectimax_oracle`] recurses over the full action/outcome tree with
//!   no memoization and no reachability pruning, pricing each branch
//!   straight from the [`crate::game`] transitions.
//! * [`ExactSolver`] / [`exact_value`] evaluate the same recurrences in
//!   arbitrary-precision rational arithmetic, which removes floating-point
//!   doubt entirely (fairness results hold exactly, not just within a
//!   tolerance).
//!
//! Both are capped to small horizons: the tree grows exponentially and the
//! rational denominators grow as `denom(q)^n`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::game::{
    self, abandon_transition, crush_transition, toss_transitions, Action, GameState, GameVariant,
    TossLaw,
};

/// Arbitrary-precision rational, always reduced, denominator positive.
pub type Rational = num_rational::BigRational;

/// Largest horizon the unmemoized tree walk accepts (≈ 3ⁿ nodes).
pub const EXPECTIMAX_HORIZON_CAP: u32 = 20;

/// Largest horizon the exact-rational solver accepts.
pub const EXACT_HORIZON_CAP: u32 = 25;

/// Maximal expected net income by brute-force expectimax over the whole
/// game tree. Agrees with [`crate::solver::value`] to within 1e-12; the
/// point is that it shares none of the layering, pruning or memoization.
pub fn expectimax_oracle(variant: GameVariant, a: u32, h: u32, n: u32, q: f64) -> Result<f64> {
    let law = TossLaw::new(q)?;
    if n > EXPECTIMAX_HORIZON_CAP {
        return Err(Error::HorizonTooLarge {
            n,
            cap: EXPECTIMAX_HORIZON_CAP,
        });
    }
    Ok(expectimax(variant, GameState::new(a, h), n, law))
}

fn expectimax(variant: GameVariant, st: GameState, n: u32, law: TossLaw) -> f64 {
    if let Some(v) = game::terminal_value(variant, st, n) {
        return v;
    }
    let mut best = f64::NEG_INFINITY;
    for &act in game::legal_actions(variant, st, n) {
        let ev = match act {
            Action::Toss => toss_transitions(variant, st, law)
                .iter()
                .map(|t| t.probability * (t.reward + expectimax(variant, t.next, n - 1, law)))
                .sum(),
            Action::Crush => {
                let t = crush_transition(variant, st, law).expect("crush is legal here");
                t.reward + expectimax(variant, t.next, n - 1, law)
            }
            Action::Abandon => {
                let t = abandon_transition(variant, st).expect("abandon is legal here");
                if t.terminal {
                    t.reward
                } else {
                    t.reward + expectimax(variant, t.next, n - 1, law)
                }
            }
        };
        best = best.max(ev);
    }
    best
}

/// Memoized exact-rational evaluation of one game at a fixed coin.
pub struct ExactSolver {
    variant: GameVariant,
    q: Rational,
    p: Rational,
    memo: HashMap<(u32, u32, u32), Rational>,
}

impl ExactSolver {
    /// Rejects coins outside `[0, 1/2)`.
    pub fn new(variant: GameVariant, q: Rational) -> Result<Self> {
        let half = Rational::new(BigInt::from(1), BigInt::from(2));
        if q.is_negative() || q >= half {
            return Err(Error::ExactBiasOutOfRange(q));
        }
        let p = Rational::from_integer(BigInt::from(1)) - &q;
        Ok(ExactSolver {
            variant,
            q,
            p,
            memo: HashMap::new(),
        })
    }

    /// Exact maximal expected net income at `(a, h)` with `n` actions left.
    pub fn value(&mut self, a: u32, h: u32, n: u32) -> Result<Rational> {
        if n > EXACT_HORIZON_CAP {
            return Err(Error::HorizonTooLarge {
                n,
                cap: EXACT_HORIZON_CAP,
            });
        }
        Ok(self.eval(a, h, n))
    }

    fn eval(&mut self, a: u32, h: u32, n: u32) -> Rational {
        if n == 0 {
            return Rational::zero();
        }
        if self.variant == GameVariant::Jm1 && a > h {
            return Rational::from_integer(BigInt::from(a));
        }
        if let Some(v) = self.memo.get(&(a, h, n)) {
            return v.clone();
        }

        let tails = self.eval(a + 1, h, n - 1);
        let heads = self.eval(a, h + 1, n - 1);
        let toss = match self.variant {
            GameVariant::Jm1 => &self.q * tails + &self.p * heads - &self.q,
            GameVariant::Jm2 | GameVariant::Jm3 => &self.q * tails + &self.p * (heads - &self.q),
        };
        let other = if a > h {
            let republished = Rational::from_integer(BigInt::from(h) + 1);
            let payout = match self.variant {
                GameVariant::Jm1 => unreachable!("JM1 payout states returned above"),
                GameVariant::Jm2 => republished - &self.q,
                GameVariant::Jm3 => &self.p * republished,
            };
            payout + self.eval(a - h - 1, 0, n - 1)
        } else {
            match self.variant {
                GameVariant::Jm1 => Rational::zero(),
                GameVariant::Jm2 | GameVariant::Jm3 => self.eval(0, 0, n - 1),
            }
        };
        let v = toss.max(other);
        self.memo.insert((a, h, n), v.clone());
        v
    }
}

/// One-shot exact evaluation; see [`ExactSolver`] for repeated queries.
pub fn exact_value(variant: GameVariant, a: u32, h: u32, n: u32, q: Rational) -> Result<Rational> {
    ExactSolver::new(variant, q)?.value(a, h, n)
}

/// Parses a decimal string (`"0.329393"`, `"1e-3"`, `"42"`) or a fraction
/// (`"2/5"`) into an exact [`Rational`]. Used to turn user-facing decimal
/// inputs into the exact coin they denote.
pub fn parse_decimal_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: BigInt = num.trim().parse().ok()?;
        let den: BigInt = den.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        return Some(Rational::new(num, den));
    }

    let (mantissa, exponent) = match s.split_once(['e', 'E']) {
        Some((m, e)) => (m, e.parse::<i64>().ok()?),
        None => (s, 0),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().all(|c| c.is_ascii_digit())
        || !frac_part.chars().all(|c| c.is_ascii_digit())
    {
        return None;
    }
    let joined = format!("{int_part}{frac_part}");
    let num: BigInt = if joined.is_empty() {
        BigInt::zero()
    } else {
        joined.parse().ok()?
    };
    let num = num * BigInt::from(sign);
    let scale = frac_part.len() as i64 - exponent;
    let value = if scale >= 0 {
        Rational::new(num, BigInt::from(10).pow(scale as u32))
    } else {
        Rational::from_integer(num * BigInt::from(10).pow((-scale) as u32))
    };
    Some(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::value;
    use num_traits::{One, ToPrimitive};

    fn ratio(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn expectimax_agrees_with_the_dp() {
        let v = value(GameVariant::Jm2, 0, 0, 12, 0.33).unwrap();
        let o = expectimax_oracle(GameVariant::Jm2, 0, 0, 12, 0.33).unwrap();
        assert!((v - o).abs() <= 1e-12, "dp {v:e} vs expectimax {o:e}");
    }

    #[test]
    fn expectimax_sees_the_fair_game() {
        let o = expectimax_oracle(GameVariant::Jm1, 0, 0, 10, 0.2).unwrap();
        assert!(o.abs() <= 1e-9, "JM1(0,0) should be fair, got {o:e}");
    }

    #[test]
    fn expectimax_zero_budget() {
        for variant in GameVariant::ALL {
            assert_eq!(expectimax_oracle(variant, 2, 3, 0, 0.4).unwrap(), 0.0);
        }
    }

    #[test]
    fn expectimax_guards_depth() {
        assert!(matches!(
            expectimax_oracle(GameVariant::Jm1, 0, 0, 21, 0.3),
            Err(Error::HorizonTooLarge { cap: 20, .. })
        ));
    }

    #[test]
    fn exact_jm3_origin_is_exactly_zero() {
        let v = exact_value(GameVariant::Jm3, 0, 0, 15, ratio(2, 5)).unwrap();
        assert!(v.is_zero(), "E(0,0,15) = {v}");
    }

    #[test]
    fn exact_jm3_respects_the_payout_bound() {
        // value <= p·a with p = 3/4, a = 2.
        let v = exact_value(GameVariant::Jm3, 2, 0, 10, ratio(1, 4)).unwrap();
        assert!(v <= ratio(3, 2), "E(2,0,10) = {v}");
        assert!(v > Rational::zero());
    }

    #[test]
    fn exact_one_step_jm2() {
        let v = exact_value(GameVariant::Jm2, 1, 0, 1, ratio(3, 10)).unwrap();
        assert_eq!(v, ratio(7, 10));
    }

    #[test]
    fn exact_rejects_bad_inputs() {
        assert!(matches!(
            exact_value(GameVariant::Jm2, 0, 0, 26, ratio(1, 10)),
            Err(Error::HorizonTooLarge { cap: 25, .. })
        ));
        assert!(matches!(
            exact_value(GameVariant::Jm2, 0, 0, 5, ratio(1, 2)),
            Err(Error::ExactBiasOutOfRange(_))
        ));
        assert!(matches!(
            exact_value(GameVariant::Jm2, 0, 0, 5, ratio(-1, 10)),
            Err(Error::ExactBiasOutOfRange(_))
        ));
    }

    #[test]
    fn exact_tracks_float_within_fp_noise() {
        let mut solver = ExactSolver::new(GameVariant::Jm2, ratio(1, 4)).unwrap();
        for n in 0..=15 {
            let exact = solver.value(1, 1, n).unwrap().to_f64().unwrap();
            let float = value(GameVariant::Jm2, 1, 1, n, 0.25).unwrap();
            assert!((float - exact).abs() <= 1e-10, "n={n}: {float} vs {exact}");
        }
    }

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_decimal_rational("2/5").unwrap(), ratio(2, 5));
        assert_eq!(parse_decimal_rational("0.25").unwrap(), ratio(1, 4));
        assert_eq!(
            parse_decimal_rational("0.329393").unwrap(),
            ratio(329_393, 1_000_000)
        );
        assert_eq!(parse_decimal_rational("1e-3").unwrap(), ratio(1, 1000));
        assert_eq!(parse_decimal_rational("2.5e1").unwrap(), ratio(25, 1));
        assert_eq!(parse_decimal_rational("42").unwrap(), ratio(42, 1));
        assert_eq!(parse_decimal_rational(".5").unwrap(), ratio(1, 2));
        assert_eq!(parse_decimal_rational("-0.5").unwrap(), ratio(-1, 2));
        assert!(parse_decimal_rational("").is_none());
        assert!(parse_decimal_rational("abc").is_none());
        assert!(parse_decimal_rational("1/0").is_none());
        assert!(Rational::one() > parse_decimal_rational("0.999999").unwrap());
    }
}
