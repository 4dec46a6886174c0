use std::path::Path;

use qsw::game::{
    enumerate_pure_profiles, expected_payoff, expected_payoff_correlated, find_pure_nash, fully_mixed_nash_2x2,
    is_correlated_equilibrium, pure_payoff, EQUILIBRIUM_TOL,
};
use qsw::ns_box::{
    affine_bell, chsh_from_canonical, chsh_value, correlator, local_decomposition, local_vertices, pr_vertices,
    random_box, tilted_chsh_value, to_table, LP_TOL,
};
use qsw::quantum::search::{tilted_grid_search, SearchConfig};
use qsw::quantum::{
    born_box, born_probability, closed_form_components, optimal_beta, optimal_tilted_strategy, theta_from_zeta,
    tilted_quantum_max, zeta_from_theta,
};
use qsw::swgame::{
    log_spaced, ns_advice_payoff, payoff_from_box, payoff_sum, scan, strategy_label, theta0, theta0_sweep,
    IncentivePoint, Theta0Point,
};
use qsw::{lp, BayesianGame, Exec, NsBox, PayoffVector, PureStrategyProfile};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::args::{BoxAction, Format, GameSource, QuantumAction};
use crate::error::CliError;
use crate::inputs::{self, profile_cell, LoadedGame, ProfileRepr};
use crate::output::{fmt_num, Report, Table};

fn pair(v: PayoffVector) -> Value {
    json!([v.alice, v.bob])
}

fn box_json(b: &NsBox) -> Value {
    let mut v = serde_json::to_value(b).expect("box serializes");
    v["table"] = json!(to_table(b).0);
    v
}

/// Strategy labels `g1..g4` for profiles of the two-type family.
fn labels(loaded: &LoadedGame, p: &PureStrategyProfile) -> Value {
    match (loaded.params, strategy_label(&p.alice), strategy_label(&p.bob)) {
        (Some(_), Some(l), Some(m)) => json!([l, m]),
        _ => Value::Null,
    }
}

pub fn eval(
    source: &GameSource,
    strategy: Option<&Path>,
    advice: Option<&Path>,
    box_path: Option<&Path>,
) -> Result<Report, CliError> {
    let loaded = inputs::load_game(source)?;
    let game = &loaded.game;
    if let Some(path) = strategy {
        let s = inputs::load_behavioral(path)?;
        let v = expected_payoff(game, &s)?;
        return Ok(Report::json(json!({ "payoff": pair(v), "welfare": v.welfare() })));
    }
    if let Some(path) = advice {
        let a = inputs::load_advice(path, game)?;
        let v = expected_payoff_correlated(game, &a)?;
        return Ok(Report::json(json!({ "payoff": pair(v), "welfare": v.welfare() })));
    }
    if let Some(path) = box_path {
        let b = inputs::load_box(path)?;
        let v = ns_advice_payoff(game, &b)?;
        let mut out = json!({ "payoff": pair(v), "welfare": v.welfare() });
        if let Some(params) = loaded.params {
            out["closed_form"] = pair(payoff_from_box(&params, &b));
            out["closed_form_sum"] = json!(payoff_sum(&params, &b));
        }
        return Ok(Report::json(out));
    }

    let mut rows = Vec::new();
    let mut items = Vec::new();
    for p in enumerate_pure_profiles(game) {
        let v = pure_payoff(game, &p)?;
        rows.push(vec![
            profile_cell(&p),
            fmt_num(v.alice),
            fmt_num(v.bob),
            fmt_num(v.welfare()),
        ]);
        let mut item = json!({ "profile": ProfileRepr::of(game, &p), "payoff": pair(v) });
        let l = labels(&loaded, &p);
        if !l.is_null() {
            item["labels"] = l;
        }
        items.push(item);
    }
    let table = Table {
        header: vec!["profile", "payoff_A", "payoff_B", "welfare"],
        rows,
    };
    Ok(Report::with_table(Value::Array(items), table, Format::Json))
}

pub fn equilibria(source: &GameSource, mixed: bool) -> Result<Report, CliError> {
    let loaded = inputs::load_game(source)?;
    let game = &loaded.game;
    if mixed {
        let s = fully_mixed_nash_2x2(game).ok_or_else(|| {
            CliError::Usage(
                "no fully mixed equilibrium (needs a 2x2 complete-information game with an interior solution)".into(),
            )
        })?;
        let v = expected_payoff(game, &s)?;
        return Ok(Report::json(
            json!({ "alice": s.alice[0], "bob": s.bob[0], "payoff": pair(v) }),
        ));
    }
    let list: Vec<Value> = find_pure_nash(game, EQUILIBRIUM_TOL)
        .iter()
        .map(|p| {
            let mut item = json!({ "profile": ProfileRepr::of(game, p) });
            let l = labels(&loaded, p);
            if !l.is_null() {
                item["labels"] = l;
            }
            item
        })
        .collect();
    Ok(Report::json(Value::Array(list)))
}

/// Payoffs of the pure Nash equilibria, plus the fully mixed one when it exists.
fn nash_payoffs(game: &BayesianGame) -> Result<Vec<Vec<f64>>, CliError> {
    let mut pts = Vec::new();
    for p in find_pure_nash(game, EQUILIBRIUM_TOL) {
        let v = pure_payoff(game, &p)?;
        pts.push(vec![v.alice, v.bob]);
    }
    if let Some(s) = fully_mixed_nash_2x2(game) {
        let v = expected_payoff(game, &s)?;
        pts.push(vec![v.alice, v.bob]);
    }
    Ok(pts)
}

pub fn ce_check(source: &GameSource, advice: &Path) -> Result<Report, CliError> {
    let loaded = inputs::load_game(source)?;
    let game = &loaded.game;
    let a = inputs::load_advice(advice, game)?;
    let ok = is_correlated_equilibrium(game, &a, EQUILIBRIUM_TOL)?;
    let v = expected_payoff_correlated(game, &a)?;
    let hull = nash_payoffs(game)?;
    let outside = if hull.is_empty() {
        Value::Null
    } else {
        json!(!lp::in_convex_hull(&hull, &[v.alice, v.bob], 1e-9)?.feasible)
    };
    Ok(Report::json(json!({
        "correlated_equilibrium": ok,
        "payoff": pair(v),
        "welfare": v.welfare(),
        "outside_nash_hull": outside,
    })))
}

pub fn box_cmd(action: &BoxAction, seed: u64) -> Result<Report, CliError> {
    match action {
        BoxAction::Validate { path } => {
            let b = inputs::load_box(path)?;
            to_table(&b).validate()?;
            Ok(Report::json(json!({ "valid": true, "box": box_json(&b) })))
        }
        BoxAction::Chsh { path, zeta, affine } => {
            let b = inputs::load_box(path)?;
            let corr: Vec<Vec<f64>> = (0..2).map(|x| (0..2).map(|y| correlator(&b, x, y)).collect()).collect();
            let mut out = json!({
                "chsh": chsh_value(&b),
                "chsh_canonical": chsh_from_canonical(&b),
                "correlators": corr,
            });
            if let Some(z) = zeta {
                let t = tilted_chsh_value(&b, *z)?;
                out["zeta"] = json!(z);
                out["tilted"] = json!(t);
                if let Some(k) = affine {
                    out["affine"] = json!(affine_bell(t, k[0], k[1])?);
                }
            }
            Ok(Report::json(out))
        }
        BoxAction::Local { path } => {
            let b = inputs::load_box(path)?;
            let w = local_decomposition(&b, LP_TOL)?;
            Ok(Report::json(json!({ "local": w.is_some(), "weights": w })))
        }
        BoxAction::Vertices => {
            let mut items = Vec::new();
            for (k, b) in local_vertices().iter().enumerate() {
                let bits: Vec<u8> = (0..4).map(|i| ((k >> (3 - i)) & 1) as u8).collect();
                items.push(json!({ "kind": "local", "labels": bits, "chsh": chsh_value(b), "box": box_json(b) }));
            }
            for (k, b) in pr_vertices().iter().enumerate() {
                let bits: Vec<u8> = (0..3).map(|i| ((k >> (2 - i)) & 1) as u8).collect();
                items.push(json!({ "kind": "pr", "labels": bits, "chsh": chsh_value(b), "box": box_json(b) }));
            }
            Ok(Report::json(Value::Array(items)))
        }
        BoxAction::Random => {
            let b = random_box(&mut ChaCha8Rng::seed_from_u64(seed));
            Ok(Report::json(box_json(&b)))
        }
    }
}

pub fn quantum_cmd(action: &QuantumAction) -> Result<Report, CliError> {
    match action {
        QuantumAction::Born { path } => {
            let s = inputs::load_quantum_strategy(path)?;
            let b = born_box(&s)?;
            let mut probs = Vec::with_capacity(16);
            for xa in 0..2 {
                for xb in 0..2 {
                    for oa in 0..2 {
                        for ob in 0..2 {
                            probs.push(born_probability(&s, xa, xb, oa, ob));
                        }
                    }
                }
            }
            Ok(Report::json(json!({
                "box": box_json(&b),
                "projector_probabilities": probs,
                "chsh": chsh_value(&b),
            })))
        }
        QuantumAction::Optimal { theta, zeta } => {
            let theta = match (theta, zeta) {
                (Some(t), _) => *t,
                (None, Some(z)) => theta_from_zeta(*z)?,
                (None, None) => return Err(CliError::Usage("give --theta or --zeta".into())),
            };
            let s = optimal_tilted_strategy(theta)?;
            let zeta = zeta_from_theta(theta)?;
            let b = born_box(&s)?;
            Ok(Report::json(json!({
                "theta": theta,
                "zeta": zeta,
                "beta": optimal_beta(theta)?,
                "strategy": s,
                "closed_form": closed_form_components(theta)?,
                "box": box_json(&b),
                "tilted": tilted_chsh_value(&b, zeta)?,
                "quantum_max": tilted_quantum_max(zeta)?,
            })))
        }
        QuantumAction::Max { zeta, search, step } => {
            let mut out = json!({
                "zeta": zeta,
                "quantum_max": tilted_quantum_max(*zeta)?,
                "local_max": 2.0 + 2.0 * zeta,
            });
            if *search {
                let cfg = SearchConfig {
                    coarse_step: *step,
                    ..SearchConfig::default()
                };
                out["search"] = serde_json::to_value(tilted_grid_search(*zeta, cfg, Exec::default())?)
                    .map_err(|e| CliError::Internal(e.to_string()))?;
            }
            Ok(Report::json(out))
        }
    }
}

fn incentive_row(p: &IncentivePoint) -> Vec<String> {
    [
        p.theta, p.eta, p.zeta, p.delta_va, p.delta_vb, p.payoff_a, p.payoff_b, p.welfare,
    ]
    .iter()
    .map(|&x| fmt_num(x))
    .collect()
}

pub fn scan_cmd(eta: f64, step: f64, from: f64, to: f64) -> Result<Report, CliError> {
    let pts = scan((from, to), eta, step, Exec::default())?;
    let table = Table {
        header: vec![
            "theta", "eta", "zeta", "delta_vA", "delta_vB", "payoff_A", "payoff_B", "welfare",
        ],
        rows: pts.iter().map(incentive_row).collect(),
    };
    Ok(Report::with_table(json!(pts), table, Format::Csv))
}

fn theta0_report(pts: &[Theta0Point]) -> Report {
    let table = Table {
        header: vec!["eta", "theta0"],
        rows: pts.iter().map(|p| vec![fmt_num(p.eta), fmt_num(p.theta0)]).collect(),
    };
    Report::with_table(json!(pts), table, Format::Csv)
}

pub fn theta0_cmd(eta: f64) -> Result<Report, CliError> {
    let t = theta0(eta)?;
    Ok(theta0_report(&[Theta0Point { eta, theta0: t }]))
}

pub fn fig2(from: f64, to: f64, points: usize) -> Result<Report, CliError> {
    let etas = log_spaced(from, to, points)?;
    Ok(theta0_report(&theta0_sweep(&etas, Exec::default())?))
}
