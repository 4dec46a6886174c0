use std::fs;
use std::path::Path;

use qsw::swgame::{build_game, GameParams};
use qsw::{BayesianGame, BehavioralStrategy, CorrelatedAdvice, NsBox, PureStrategyProfile, QuantumStrategy};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::args::GameSource;
use crate::error::CliError;

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn parse_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    serde_json::from_str(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub struct LoadedGame {
    pub game: BayesianGame,
    /// Set when the game is a member of the `(zeta, eta)` family.
    pub params: Option<GameParams>,
}

pub fn load_game(src: &GameSource) -> Result<LoadedGame, CliError> {
    match (&src.game, src.zeta, src.eta) {
        (Some(path), _, _) => {
            let game =
                qsw::corpus::parse(&read(path)?).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            Ok(LoadedGame { game, params: None })
        }
        (None, Some(zeta), Some(eta)) => {
            let params = GameParams::new(zeta, eta)?;
            Ok(LoadedGame {
                game: build_game(&params),
                params: Some(params),
            })
        }
        _ => Err(CliError::Usage("give --game PATH or both --zeta and --eta".into())),
    }
}

pub fn load_box(path: &Path) -> Result<NsBox, CliError> {
    parse_json(path)
}

pub fn load_quantum_strategy(path: &Path) -> Result<QuantumStrategy, CliError> {
    parse_json(path)
}

pub fn load_behavioral(path: &Path) -> Result<BehavioralStrategy, CliError> {
    let raw: BehavioralStrategy = parse_json(path)?;
    Ok(BehavioralStrategy::new(raw.alice, raw.bob)?)
}

/// `[a, b]` for complete-information games, `[[..], [..]]` otherwise.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProfileRepr {
    Actions([usize; 2]),
    Maps([Vec<usize>; 2]),
}

impl ProfileRepr {
    pub fn of(game: &BayesianGame, p: &PureStrategyProfile) -> Self {
        if game.is_complete_information() {
            ProfileRepr::Actions([p.alice[0], p.bob[0]])
        } else {
            ProfileRepr::Maps([p.alice.clone(), p.bob.clone()])
        }
    }

    pub fn into_profile(self) -> PureStrategyProfile {
        match self {
            ProfileRepr::Actions([a, b]) => PureStrategyProfile::actions(a, b),
            ProfileRepr::Maps([a, b]) => PureStrategyProfile::new(a, b),
        }
    }
}

/// Compact CSV cell: `0/1` or `0.1/1.1`.
pub fn profile_cell(p: &PureStrategyProfile) -> String {
    let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(".");
    format!("{}/{}", join(&p.alice), join(&p.bob))
}

#[derive(Debug, Deserialize)]
struct AdviceEntry {
    profile: ProfileRepr,
    p: f64,
}

pub fn load_advice(path: &Path, game: &BayesianGame) -> Result<CorrelatedAdvice, CliError> {
    let raw: Vec<AdviceEntry> = parse_json(path)?;
    let entries: Vec<(PureStrategyProfile, f64)> = raw.into_iter().map(|e| (e.profile.into_profile(), e.p)).collect();
    for (p, _) in &entries {
        game.check_profile(p)?;
    }
    Ok(CorrelatedAdvice::new(entries)?)
}
