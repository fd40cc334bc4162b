//! The six subcommands. Every number they emit comes from a single library
//! call; the CLI formats and compares but never computes game values
//! itself.

use jmgames::{
    critical_q, evaluate_policy, expectimax_oracle, extract_policy, parse_decimal_rational,
    simulate, solve, value, ExactSolver, GameState, GameVariant, Rational, BIAS_EPSILON,
    EXPECTIMAX_HORIZON_CAP,
};
use num_traits::{ToPrimitive, Zero};
use serde_json::json;

use crate::config::Options;
use crate::output::{csv_f64, csv_table, emit};
use crate::CliError;

pub fn run_value(opts: &Options) -> Result<(), CliError> {
    let game: GameVariant = opts.require("game")?;
    let a: u32 = opts.require("a")?;
    let h: u32 = opts.require("h")?;
    let n: u32 = opts.require("n")?;
    let q: f64 = opts.require("q")?;
    let v = value(game, a, h, n, q)?;

    let check = opts.flag("check")?;
    let mut checks = None;
    if check {
        if n > EXPECTIMAX_HORIZON_CAP {
            return Err(CliError::bad_param(format!(
                "--check requires n <= {EXPECTIMAX_HORIZON_CAP}: got {n}"
            )));
        }
        let tree = expectimax_oracle(game, a, h, n, q)?;
        let exact_q = parse_decimal_rational(opts.require_raw("q")?)
            .ok_or_else(|| CliError::bad_param("--check needs -q as a decimal or fraction"))?;
        let exact = jmgames::exact_value(game, a, h, n, exact_q)?;
        checks = Some((tree, exact));
    }

    let text = match opts.format()? {
        "csv" => {
            let (header, extra) = match &checks {
                Some((tree, exact)) => (
                    "game,a,h,n,q,value,expectimax,exact",
                    format!(",{},{}", csv_f64(*tree), exact),
                ),
                None => ("game,a,h,n,q,value", String::new()),
            };
            let row = format!("{game},{a},{h},{n},{},{}{extra}", csv_f64(q), csv_f64(v));
            csv_table(header, &[row])
        }
        _ => {
            let mut obj = json!({
                "game": game.name(),
                "a": a,
                "h": h,
                "n": n,
                "q": q,
                "value": v,
            });
            if let Some((tree, exact)) = checks {
                obj["checks"] = json!({
                    "expectimax": tree,
                    "exact": exact.to_string(),
                    "exact_f64": exact.to_f64(),
                });
            }
            obj.to_string()
        }
    };
    emit(&text, opts.output())
}

pub fn run_policy(opts: &Options) -> Result<(), CliError> {
    let game: GameVariant = opts.require("game")?;
    let a: u32 = opts.require("a")?;
    let h: u32 = opts.require("h")?;
    let n: u32 = opts.require("n")?;
    let q: f64 = opts.require("q")?;
    let table = solve(game, q, n, GameState::new(a, h))?;
    let policy = extract_policy(&table);

    let text = match opts.format()? {
        "csv" => {
            let rows: Vec<String> = policy
                .entries()
                .map(|(a, h, n, act)| format!("{a},{h},{n},{act}"))
                .collect();
            csv_table("a,h,n,action", &rows)
        }
        _ => {
            let choices: Vec<_> = policy
                .entries()
                .map(|(a, h, n, act)| json!({"a": a, "h": h, "n": n, "action": act.name()}))
                .collect();
            json!({
                "game": game.name(),
                "start": [a, h],
                "n_max": n,
                "q": q,
                "choices": choices,
            })
            .to_string()
        }
    };
    emit(&text, opts.output())
}

pub fn run_threshold(opts: &Options) -> Result<(), CliError> {
    let game: GameVariant = opts.require("game")?;
    let start = opts.require_start("start")?;
    let n_max: u32 = opts.require("nmax")?;
    let lo: f64 = opts.require("lo")?;
    let hi: f64 = opts.require("hi")?;
    let tol: f64 = opts.require("tol")?;
    let bracket = critical_q(game, start, n_max, lo, hi, tol)?;

    let text = match opts.format()? {
        "csv" => {
            let header = "game,start_a,start_h,n_max,q_lo,q_hi,n_star,value";
            let rows: Vec<String> = bracket
                .iter()
                .map(|b| {
                    format!(
                        "{game},{},{},{},{},{},{},{}",
                        start.a,
                        start.h,
                        b.n_max,
                        csv_f64(b.q_lo),
                        csv_f64(b.q_hi),
                        b.witness_at_hi.n_star,
                        csv_f64(b.witness_at_hi.value)
                    )
                })
                .collect();
            csv_table(header, &rows)
        }
        _ => match bracket {
            None => json!({ "bracket": null }).to_string(),
            Some(b) => json!({
                "game": game.name(),
                "start": [start.a, start.h],
                "n_max": b.n_max,
                "q_lo": b.q_lo,
                "q_hi": b.q_hi,
                "n_star": b.witness_at_hi.n_star,
                "value": b.witness_at_hi.value,
            })
            .to_string(),
        },
    };
    emit(&text, opts.output())
}

pub fn run_sweep(opts: &Options) -> Result<(), CliError> {
    let game: GameVariant = opts.require("game")?;
    let start = opts.require_start("start")?;
    let n: u32 = opts.require("n")?;
    let from: f64 = opts.require("from")?;
    let to: f64 = opts.require("to")?;
    let step: f64 = opts.require("step")?;
    if !step.is_finite() || step <= 0.0 {
        return Err(CliError::bad_param(format!(
            "--step must be positive: got {step}"
        )));
    }
    if from > to {
        return Err(CliError::bad_param(format!(
            "empty sweep grid: --from {from} exceeds --to {to}"
        )));
    }

    // Ascending q; the tiny slack keeps the intended last point on the grid.
    let mut points = Vec::new();
    let mut k = 0u32;
    loop {
        let q = from + f64::from(k) * step;
        if q > to + step * 1e-9 {
            break;
        }
        points.push(q);
        k += 1;
    }

    let mut rows = Vec::with_capacity(points.len());
    let mut objects = Vec::with_capacity(points.len());
    let json_wanted = opts.format()? == "json";
    for q in points {
        let v = value(game, start.a, start.h, n, q)?;
        if json_wanted {
            objects.push(json!({
                "game": game.name(),
                "a": start.a,
                "h": start.h,
                "n": n,
                "q": q,
                "value": v,
            }));
        } else {
            rows.push(format!("{},{n},{}", csv_f64(q), csv_f64(v)));
        }
    }

    let text = if json_wanted {
        serde_json::Value::Array(objects).to_string()
    } else {
        csv_table("q,n,value", &rows)
    };
    emit(&text, opts.output())
}

pub fn run_simulate(opts: &Options) -> Result<(), CliError> {
    let game: GameVariant = opts.require("game")?;
    let start = opts.require_start("start")?;
    let n: u32 = opts.require("n")?;
    let q: f64 = opts.require("q")?;
    let trials: u64 = opts.require("trials")?;
    let seed: u64 = opts.require("seed")?;

    let table = solve(game, q, n, start)?;
    let policy = extract_policy(&table);
    let stats = simulate(game, &policy, q, n, start, trials, seed)?;

    let text = match opts.format()? {
        "csv" => {
            let header = "trials,mean,stderr,min,max,seed";
            let row = format!(
                "{},{},{},{},{},{}",
                stats.trials,
                csv_f64(stats.mean),
                csv_f64(stats.stderr),
                csv_f64(stats.min),
                csv_f64(stats.max),
                stats.seed
            );
            csv_table(header, &[row])
        }
        _ => json!({
            "trials": stats.trials,
            "mean": stats.mean,
            "stderr": stats.stderr,
            "min": stats.min,
            "max": stats.max,
            "seed": stats.seed,
        })
        .to_string(),
    };
    emit(&text, opts.output())
}

// --- verify ---------------------------------------------------------------

const JM1_REFERENCE_Q: f64 = 0.429056;
const JM1_REFERENCE_VALUE: f64 = 4.050134694288943e-8;
const JM2_REFERENCE_Q: f64 = 0.329393;
const JM2_REFERENCE_VALUE: f64 = 4.4530581139179404e-8;
const VERIFY_SIM_SEED: u64 = 20240505;

type CheckOutcome = Result<(bool, String), CliError>;
type CheckFn = fn() -> CheckOutcome;

fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn check_jm1_value() -> CheckOutcome {
    let v = value(GameVariant::Jm1, 1, 2, 75, JM1_REFERENCE_Q)?;
    let ok = (v - JM1_REFERENCE_VALUE).abs() <= 1e-6 * JM1_REFERENCE_VALUE;
    Ok((ok, format!("value(1,2,75,q={JM1_REFERENCE_Q}) = {v:e}, expected {JM1_REFERENCE_VALUE:e} (rel 1e-6)")))
}

fn check_jm2_value() -> CheckOutcome {
    let v = value(GameVariant::Jm2, 0, 0, 146, JM2_REFERENCE_Q)?;
    let ok = (v - JM2_REFERENCE_VALUE).abs() <= 1e-6 * JM2_REFERENCE_VALUE;
    Ok((ok, format!("value(0,0,146,q={JM2_REFERENCE_Q}) = {v:e}, expected {JM2_REFERENCE_VALUE:e} (rel 1e-6)")))
}

fn check_jm1_threshold() -> CheckOutcome {
    let b = critical_q(GameVariant::Jm1, GameState::new(1, 2), 300, 0.40, 0.45, 1e-5)?;
    Ok(match b {
        Some(b) => (
            b.q_lo >= 0.4290 && b.q_hi <= 0.4292,
            format!("bracket [{:.6}, {:.6}], expected within [0.4290, 0.4292]", b.q_lo, b.q_hi),
        ),
        None => (false, "no threshold found in [0.40, 0.45]".to_string()),
    })
}

fn check_jm2_threshold() -> CheckOutcome {
    let b = critical_q(GameVariant::Jm2, GameState::new(0, 0), 150, 0.30, 0.35, 1e-8)?;
    Ok(match b {
        Some(b) => (
            b.q_lo >= 0.329392 && b.q_hi <= 0.329394,
            format!(
                "bracket [{:.8}, {:.8}], expected within [0.329392, 0.329394]",
                b.q_lo, b.q_hi
            ),
        ),
        None => (false, "no threshold found in [0.30, 0.35]".to_string()),
    })
}

fn origin_fairness(variant: GameVariant, n_max: u32) -> CheckOutcome {
    let mut worst: f64 = 0.0;
    for k in 0..10 {
        let q = 0.05 * f64::from(k);
        let table = solve(variant, q, n_max, GameState::new(0, 0))?;
        for n in 0..=n_max {
            worst = worst.max(table.value(0, 0, n).unwrap_or(0.0).abs());
        }
    }
    Ok((
        worst <= BIAS_EPSILON,
        format!("max |value(0,0,n<={n_max})| over the q grid = {worst:e} (tol 1e-9)"),
    ))
}

fn check_jm1_fairness() -> CheckOutcome {
    origin_fairness(GameVariant::Jm1, 100)
}

fn check_jm3_fairness() -> CheckOutcome {
    origin_fairness(GameVariant::Jm3, 150)
}

fn check_jm3_exact_fairness() -> CheckOutcome {
    let mut ok = true;
    for q in [ratio(1, 10), ratio(1, 4), ratio(2, 5)] {
        let mut solver = ExactSolver::new(GameVariant::Jm3, q)?;
        for n in 0..=20 {
            ok &= solver.value(0, 0, n)?.is_zero();
        }
    }
    Ok((ok, "exact value(0,0,n<=20) == 0 at q in {1/10, 1/4, 2/5}".to_string()))
}

fn check_jm3_payout_bound() -> CheckOutcome {
    let mut worst = f64::NEG_INFINITY;
    for q in [0.1, 0.3, 0.45] {
        let table = solve(GameVariant::Jm3, q, 100, GameState::new(0, 0))?;
        for (a, _h, _n, v) in table.entries() {
            worst = worst.max(v - (1.0 - q) * f64::from(a));
        }
    }
    Ok((
        worst <= BIAS_EPSILON,
        format!("worst value - (1-q)*a = {worst:e} (tol 1e-9)"),
    ))
}

fn check_expectimax_agreement() -> CheckOutcome {
    let mut worst: f64 = 0.0;
    for variant in GameVariant::ALL {
        for q in [0.1, 0.25, 0.35, 0.45] {
            for a in 0..=3 {
                for h in 0..=3 {
                    let table = solve(variant, q, 12, GameState::new(a, h))?;
                    for n in 0..=12 {
                        let dp = table.value(a, h, n).unwrap_or(0.0);
                        let tree = expectimax_oracle(variant, a, h, n, q)?;
                        worst = worst.max((dp - tree).abs());
                    }
                }
            }
        }
    }
    Ok((worst <= 1e-12, format!("max |dp - expectimax| = {worst:e} (tol 1e-12)")))
}

fn check_exact_agreement() -> CheckOutcome {
    let mut worst: f64 = 0.0;
    for variant in GameVariant::ALL {
        for (q, exact_q) in [
            (0.1, ratio(1, 10)),
            (0.25, ratio(1, 4)),
            (0.35, ratio(7, 20)),
            (0.45, ratio(9, 20)),
        ] {
            let mut exact = ExactSolver::new(variant, exact_q)?;
            for a in 0..=3 {
                for h in 0..=3 {
                    let table = solve(variant, q, 20, GameState::new(a, h))?;
                    for n in 0..=20 {
                        let dp = table.value(a, h, n).unwrap_or(0.0);
                        let ex = exact.value(a, h, n)?.to_f64().unwrap_or(f64::NAN);
                        worst = worst.max((dp - ex).abs());
                    }
                }
            }
        }
    }
    Ok((worst <= 1e-10, format!("max |dp - exact| = {worst:e} (tol 1e-10)")))
}

fn check_policy_and_simulation() -> CheckOutcome {
    let mut ok = true;
    let mut detail = String::new();
    for variant in GameVariant::ALL {
        let start = match variant {
            GameVariant::Jm1 => GameState::new(1, 2),
            _ => GameState::new(0, 0),
        };
        let table = solve(variant, 0.35, 100, start)?;
        let policy = extract_policy(&table);
        let ep = evaluate_policy(variant, &policy, 0.35, 100, start)?;
        let v = table.value(start.a, start.h, 100).unwrap_or(f64::NAN);
        ok &= (ep - v).abs() <= 1e-12;
        let stats = simulate(variant, &policy, 0.35, 100, start, 100_000, VERIFY_SIM_SEED)?;
        ok &= (stats.mean - ep).abs() <= 4.0 * stats.stderr;
        detail.push_str(&format!(
            "{variant}: policy {ep:.6} vs sim {:.6} (stderr {:.6}); ",
            stats.mean, stats.stderr
        ));
    }
    Ok((ok, detail.trim_end_matches("; ").to_string()))
}

pub fn run_verify(opts: &Options) -> Result<(), CliError> {
    let suite: String = opts.require("suite")?;
    let paper: [(&'static str, CheckFn); 4] = [
        ("jm1-value", check_jm1_value),
        ("jm2-value", check_jm2_value),
        ("jm1-threshold", check_jm1_threshold),
        ("jm2-threshold", check_jm2_threshold),
    ];
    let fairness: [(&'static str, CheckFn); 4] = [
        ("jm1-origin-fair", check_jm1_fairness),
        ("jm3-origin-fair", check_jm3_fairness),
        ("jm3-exact-fair", check_jm3_exact_fairness),
        ("jm3-payout-bound", check_jm3_payout_bound),
    ];
    let oracles: [(&'static str, CheckFn); 3] = [
        ("expectimax-agreement", check_expectimax_agreement),
        ("exact-agreement", check_exact_agreement),
        ("policy-simulation", check_policy_and_simulation),
    ];

    let mut checks: Vec<(&'static str, CheckFn)> = Vec::new();
    match suite.as_str() {
        "paper-numbers" => checks.extend(paper),
        "fairness" => checks.extend(fairness),
        "oracles" => checks.extend(oracles),
        "all" => {
            checks.extend(paper);
            checks.extend(fairness);
            checks.extend(oracles);
        }
        other => {
            return Err(CliError::bad_param(format!(
                "unknown suite '{other}': expected paper-numbers, fairness, oracles or all"
            )))
        }
    }

    let mut first_failure = None;
    let mut failures = 0usize;
    for (name, run) in checks {
        let (ok, detail) = run()?;
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failures += 1;
            first_failure.get_or_insert(name);
        }
    }
    if failures > 0 {
        return Err(CliError {
            code: 1,
            message: format!(
                "{failures} verification check(s) failed, first: {}",
                first_failure.unwrap_or("?")
            ),
        });
    }
    Ok(())
}
