//! Seeded invariant suites behind `qsw verify`.

use std::f64::consts::{FRAC_PI_4, SQRT_2};
use std::path::Path;

use qsw::game::{
    enumerate_pure_profiles, expected_payoff, expected_payoff_correlated, find_pure_nash, fully_mixed_nash_2x2,
    is_correlated_equilibrium, is_pure_nash, pure_payoff, EQUILIBRIUM_TOL,
};
use qsw::ns_box::{
    all_vertices, chsh_from_canonical, chsh_value, from_table, is_local, local_vertices, pr_vertices, random_box,
    tilted_chsh_value, to_table, LP_TOL,
};
use qsw::quantum::{
    born_box, born_probability, closed_form_components, optimal_tilted_strategy, random_strategy, theta_from_zeta,
    tilted_quantum_max, zeta_from_theta,
};
use qsw::swgame::{
    build_game, classical_equilibrium_payoffs, delta_v, named_strategy, ns_advice_payoff, payoff_from_box, payoff_sum,
    tabulated_pure_payoff, theta0, theta_grid, GameParams,
};
use qsw::{lp, BayesianGame, BehavioralStrategy, CorrelatedAdvice, PayoffVector, PureStrategyProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::Group;
use crate::inputs;

const RANDOM_CASES: usize = 200;

#[derive(Debug, Serialize)]
pub struct Counterexample {
    pub group: &'static str,
    pub check: String,
    pub data: Value,
}

pub struct Outcome {
    pub group: Group,
    pub result: Result<usize, Counterexample>,
}

struct Suite {
    group: Group,
    checks: usize,
}

impl Suite {
    fn ensure(&mut self, ok: bool, check: &str, data: impl FnOnce() -> Value) -> Result<(), Counterexample> {
        self.checks += 1;
        if ok {
            Ok(())
        } else {
            Err(Counterexample {
                group: self.group.name(),
                check: check.to_string(),
                data: data(),
            })
        }
    }

    fn fail(&self, check: &str, data: Value) -> Counterexample {
        Counterexample {
            group: self.group.name(),
            check: check.to_string(),
            data,
        }
    }
}

pub fn run(groups: &[Group], corpus: Option<&Path>, seed: u64) -> Vec<Outcome> {
    groups
        .iter()
        .map(|&group| {
            let mut s = Suite { group, checks: 0 };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = match group {
                Group::GameCore => game_core(&mut s, &mut rng, corpus),
                Group::NsBox => ns_box(&mut s, &mut rng),
                Group::Quantum => quantum(&mut s, &mut rng),
                Group::Swgame => swgame(&mut s, &mut rng),
            };
            Outcome {
                group,
                result: r.map(|()| s.checks),
            }
        })
        .collect()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn load_corpus(s: &Suite, dir: Option<&Path>, file: &str, bundled: &str) -> Result<BayesianGame, Counterexample> {
    let (text, origin) = match dir {
        Some(d) => {
            let path = d.join(file);
            let text =
                inputs::read(&path).map_err(|e| s.fail("corpus", json!({ "file": path, "error": e.to_string() })))?;
            (text, path.display().to_string())
        }
        None => (bundled.to_string(), format!("bundled {file}")),
    };
    qsw::corpus::parse(&text).map_err(|e| s.fail("corpus", json!({ "file": origin, "error": e.to_string() })))
}

fn random_game(rng: &mut ChaCha8Rng) -> BayesianGame {
    let t = [rng.random_range(1..=3), rng.random_range(1..=3)];
    let a = [rng.random_range(1..=3), rng.random_range(1..=3)];
    let raw: Vec<f64> = (0..t[0] * t[1]).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut prior: Vec<f64> = raw.iter().map(|x| x / total).collect();
    prior[0] += 1.0 - prior.iter().sum::<f64>();
    let n = t[0] * t[1] * a[0] * a[1];
    let vals: Vec<(f64, f64)> = (0..n)
        .map(|_| (rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)))
        .collect();
    BayesianGame::from_fn(t, a, prior, |ta, tb, sa, sb| {
        let (x, y) = vals[((ta * t[1] + tb) * a[0] + sa) * a[1] + sb];
        PayoffVector::new(x, y)
    })
    .expect("random game is well formed")
}

fn random_simplex(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
    let s: f64 = raw.iter().sum();
    let mut out: Vec<f64> = raw.iter().map(|x| x / s).collect();
    out[0] += 1.0 - out.iter().sum::<f64>();
    out
}

fn game_core(s: &mut Suite, rng: &mut ChaCha8Rng, corpus: Option<&Path>) -> Result<(), Counterexample> {
    let bos = load_corpus(s, corpus, "bos.json", qsw::corpus::BOS_JSON)?;
    let chicken = load_corpus(s, corpus, "chicken.json", qsw::corpus::CHICKEN_JSON)?;

    let bos_nash = find_pure_nash(&bos, EQUILIBRIUM_TOL);
    s.ensure(
        bos_nash == [PureStrategyProfile::actions(0, 0), PureStrategyProfile::actions(1, 1)],
        "battle of sexes Nash set",
        || json!(bos_nash),
    )?;
    let ch_nash = find_pure_nash(&chicken, EQUILIBRIUM_TOL);
    s.ensure(
        ch_nash == [PureStrategyProfile::actions(0, 1), PureStrategyProfile::actions(1, 0)],
        "chicken Nash set",
        || json!(ch_nash),
    )?;
    let mixed = fully_mixed_nash_2x2(&chicken).ok_or_else(|| s.fail("chicken mixed equilibrium", Value::Null))?;
    let mp = expected_payoff(&chicken, &mixed).map_err(|e| s.fail("chicken mixed payoff", json!(e.to_string())))?;
    s.ensure(
        close(mp.alice, 14.0 / 3.0, 1e-12) && close(mp.bob, 14.0 / 3.0, 1e-12),
        "chicken mixed payoff",
        || json!(mp),
    )?;
    let advice = CorrelatedAdvice::uniform(vec![
        PureStrategyProfile::actions(0, 0),
        PureStrategyProfile::actions(0, 1),
        PureStrategyProfile::actions(1, 0),
    ])
    .expect("uniform advice");
    let ce = is_correlated_equilibrium(&chicken, &advice, EQUILIBRIUM_TOL).unwrap_or(false);
    s.ensure(ce, "chicken correlated advice obeyed", || json!(advice))?;
    let cp = expected_payoff_correlated(&chicken, &advice).unwrap_or_default();
    s.ensure(
        close(cp.alice, 5.0, 1e-12) && close(cp.bob, 5.0, 1e-12),
        "chicken correlated payoff",
        || json!(cp),
    )?;
    let mut hull: Vec<Vec<f64>> = ch_nash
        .iter()
        .map(|p| {
            let v = pure_payoff(&chicken, p).unwrap_or_default();
            vec![v.alice, v.bob]
        })
        .collect();
    hull.push(vec![mp.alice, mp.bob]);
    let inside = lp::in_convex_hull(&hull, &[cp.alice, cp.bob], 1e-9)
        .map(|r| r.feasible)
        .unwrap_or(true);
    s.ensure(
        !inside,
        "correlated payoff outside Nash hull",
        || json!({ "hull": hull, "point": cp }),
    )?;

    for _ in 0..RANDOM_CASES {
        let game = random_game(rng);
        let profiles = enumerate_pure_profiles(&game);
        let ga: Vec<Vec<f64>> = (0..game.types(qsw::Player::Alice))
            .map(|_| random_simplex(rng, game.actions(qsw::Player::Alice)))
            .collect();
        let gb: Vec<Vec<f64>> = (0..game.types(qsw::Player::Bob))
            .map(|_| random_simplex(rng, game.actions(qsw::Player::Bob)))
            .collect();
        let mut direct = PayoffVector::default();
        for (ta, da) in ga.iter().enumerate() {
            for (tb, db) in gb.iter().enumerate() {
                for (sa, pa) in da.iter().enumerate() {
                    for (sb, pb) in db.iter().enumerate() {
                        direct = direct + game.utility(ta, tb, sa, sb).scale(game.prior(ta, tb) * pa * pb);
                    }
                }
            }
        }
        let strat = BehavioralStrategy::new(ga, gb).expect("valid strategy");
        let v = expected_payoff(&game, &strat).expect("shapes match");
        s.ensure(
            v.max_abs_diff(&direct) <= 1e-12,
            "expected payoff equals direct sum",
            || json!({ "game": game, "strategy": strat, "payoff": v, "direct": direct }),
        )?;

        let nash = find_pure_nash(&game, EQUILIBRIUM_TOL);
        for p in &profiles {
            let point = expected_payoff_correlated(&game, &CorrelatedAdvice::point(p.clone())).expect("profile fits");
            s.ensure(
                point == pure_payoff(&game, p).expect("profile fits"),
                "point advice payoff",
                || json!({ "game": game, "profile": p }),
            )?;
            let is_nash = is_pure_nash(&game, p, EQUILIBRIUM_TOL).expect("profile fits");
            s.ensure(
                nash.contains(p) == is_nash,
                "Nash search filter",
                || json!({ "game": game, "profile": p }),
            )?;
        }

        let w1 = random_simplex(rng, profiles.len());
        let w2 = random_simplex(rng, profiles.len());
        let mu = CorrelatedAdvice::new(profiles.iter().cloned().zip(w1).collect()).expect("valid advice");
        let nu = CorrelatedAdvice::new(profiles.iter().cloned().zip(w2).collect()).expect("valid advice");
        let lambda: f64 = rng.random_range(0.0..=1.0);
        let lhs = expected_payoff_correlated(&game, &mu.mix(&nu, lambda).expect("valid lambda")).expect("fits");
        let rhs = expected_payoff_correlated(&game, &mu).expect("fits").scale(lambda)
            + expected_payoff_correlated(&game, &nu)
                .expect("fits")
                .scale(1.0 - lambda);
        s.ensure(
            lhs.max_abs_diff(&rhs) <= 1e-12,
            "advice payoff is affine",
            || json!({ "game": game, "lambda": lambda, "lhs": lhs, "rhs": rhs }),
        )?;
    }
    Ok(())
}

fn ns_box(s: &mut Suite, rng: &mut ChaCha8Rng) -> Result<(), Counterexample> {
    for b in all_vertices() {
        s.ensure(to_table(&b).validate().is_ok(), "vertex validity", || json!(b))?;
    }
    for b in local_vertices() {
        s.ensure(is_local(&b, LP_TOL).unwrap_or(false), "local vertex feasible", || {
            json!(b)
        })?;
        let v = chsh_value(&b);
        s.ensure(
            v.abs() == 2.0,
            "deterministic CHSH is +-2",
            || json!({ "box": b, "chsh": v }),
        )?;
    }
    for b in pr_vertices() {
        s.ensure(!is_local(&b, LP_TOL).unwrap_or(true), "PR vertex infeasible", || {
            json!(b)
        })?;
    }
    for k in 0..40 {
        let zeta = 0.05 * k as f64;
        let best = local_vertices()
            .iter()
            .map(|b| tilted_chsh_value(b, zeta).expect("zeta in range"))
            .fold(f64::NEG_INFINITY, f64::max);
        s.ensure(
            close(best, 2.0 + 2.0 * zeta, 1e-12),
            "tilted local maximum",
            || json!({ "zeta": zeta, "max": best }),
        )?;
    }
    for _ in 0..RANDOM_CASES {
        let b = random_box(rng);
        let back = from_table(&to_table(&b));
        let ok = back.as_ref().is_ok_and(|r| {
            (0..2).all(|x| {
                close(r.m(x), b.m(x), 1e-15)
                    && close(r.n(x), b.n(x), 1e-15)
                    && (0..2).all(|y| close(r.c(x, y), b.c(x, y), 1e-15))
            })
        });
        s.ensure(ok, "table round trip", || json!(b))?;
        let v = chsh_value(&b);
        s.ensure(
            close(v, chsh_from_canonical(&b), 1e-12) && v.abs() <= 4.0 + 1e-12,
            "CHSH formula",
            || json!({ "box": b, "chsh": v }),
        )?;
        if v > 2.0 + 1e-6 {
            s.ensure(
                !is_local(&b, LP_TOL).unwrap_or(true),
                "CHSH violation implies nonlocal",
                || json!(b),
            )?;
        }
    }
    Ok(())
}

fn quantum(s: &mut Suite, rng: &mut ChaCha8Rng) -> Result<(), Counterexample> {
    for _ in 0..RANDOM_CASES {
        let st = random_strategy(rng);
        let b = match born_box(&st) {
            Ok(b) => b,
            Err(e) => return Err(s.fail("Born box valid", json!({ "strategy": st, "error": e.to_string() }))),
        };
        let v = chsh_value(&b);
        s.ensure(
            v.abs() <= 2.0 * SQRT_2 + 1e-12,
            "Tsirelson bound",
            || json!({ "strategy": st, "chsh": v }),
        )?;
        let mut worst = 0.0f64;
        for k in 0..16 {
            let (xa, xb, oa, ob) = (k >> 3, (k >> 2) & 1, (k >> 1) & 1, k & 1);
            worst = worst.max((born_probability(&st, xa, xb, oa, ob) - b.entry(xa, xb, oa, ob)).abs());
        }
        s.ensure(
            worst <= 1e-12,
            "projector and expectation forms agree",
            || json!({ "strategy": st, "difference": worst }),
        )?;
    }
    for theta in theta_grid(0.0, FRAC_PI_4, 0.01).expect("valid grid") {
        let b = born_box(&optimal_tilted_strategy(theta).expect("theta in range")).expect("valid box");
        let cf = closed_form_components(theta).expect("theta in range");
        s.ensure(
            close(b.m(0), cf.m0, 1e-12) && close(b.n(0), cf.n0, 1e-12) && close(chsh_value(&b), cf.chsh, 1e-12),
            "closed forms",
            || json!({ "theta": theta, "closed_form": cf, "box": b }),
        )?;
        let zeta = zeta_from_theta(theta).expect("theta in range");
        let back = theta_from_zeta(zeta).expect("zeta in range");
        s.ensure(
            close(back, theta, 1e-10),
            "tilt map inverse",
            || json!({ "theta": theta, "back": back }),
        )?;
        let t = tilted_chsh_value(&b, zeta).expect("zeta in range");
        let q = tilted_quantum_max(zeta).expect("zeta in range");
        s.ensure(
            close(t, q, 1e-12) && q > 2.0 + 2.0 * zeta,
            "tilted maximum attained",
            || json!({ "theta": theta, "value": t, "max": q }),
        )?;
    }
    Ok(())
}

fn swgame(s: &mut Suite, rng: &mut ChaCha8Rng) -> Result<(), Counterexample> {
    for _ in 0..RANDOM_CASES {
        let params = GameParams::new(rng.random_range(0.0..2.0), rng.random_range(0.1..300.0)).expect("in range");
        let b = random_box(rng);
        let eq1 = payoff_from_box(&params, &b);
        let brute = ns_advice_payoff(&build_game(&params), &b).expect("2x2 game");
        s.ensure(
            eq1.max_abs_diff(&brute) <= 1e-12,
            "box payoff formula",
            || json!({ "zeta": params.zeta(), "eta": params.eta(), "box": b, "formula": eq1, "brute": brute }),
        )?;
        let sum = payoff_sum(&params, &b);
        s.ensure(
            close(sum, eq1.welfare(), 1e-12),
            "payoff sum formula",
            || json!({ "zeta": params.zeta(), "eta": params.eta(), "box": b, "sum": sum }),
        )?;
    }
    for _ in 0..20 {
        let params = GameParams::new(rng.random_range(0.0..2.0), rng.random_range(0.1..300.0)).expect("in range");
        let game = build_game(&params);
        for l in 1..=4 {
            for m in 1..=4 {
                let p = PureStrategyProfile::new(named_strategy(l).expect("label"), named_strategy(m).expect("label"));
                let got = pure_payoff(&game, &p).expect("fits");
                let want = tabulated_pure_payoff(&params, l, m).expect("label");
                s.ensure(
                    got.max_abs_diff(&want) <= 1e-12,
                    "pure profile table",
                    || json!({ "zeta": params.zeta(), "eta": params.eta(), "cell": [l, m], "got": got, "want": want }),
                )?;
            }
        }
    }
    for _ in 0..RANDOM_CASES {
        let theta = rng.random_range(1e-3..=FRAC_PI_4);
        let eta = rng.random_range(0.1..1000.0);
        let p = delta_v(theta, eta).expect("in range");
        s.ensure(
            p.delta_va >= p.delta_vb - 1e-12,
            "Alice gains at least as much as Bob",
            || json!(p),
        )?;
        let c = classical_equilibrium_payoffs(&GameParams::for_theta(theta, eta).expect("in range"));
        s.ensure(p.welfare > c.welfare(), "quantum welfare beats classical", || json!(p))?;
    }
    let t16 = theta0(16.0).map_err(|e| s.fail("threshold at eta 16", json!(e.to_string())))?;
    s.ensure((0.11..=0.13).contains(&t16), "threshold at eta 16", || json!(t16))?;
    Ok(())
}
