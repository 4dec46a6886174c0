//! Bundled example games (complete-information 2x2).

use crate::error::Result;
use crate::game::BayesianGame;

pub const BOS_JSON: &str = include_str!("../../../corpus/bos.json");
pub const CHICKEN_JSON: &str = include_str!("../../../corpus/chicken.json");

/// Battle of the sexes: `(2,1)` and `(1,2)` on the diagonal, zero elsewhere.
pub fn battle_of_sexes() -> Result<BayesianGame> {
    parse(BOS_JSON)
}

/// Game of chicken: `(6,6) (2,7) / (7,2) (0,0)`.
pub fn chicken() -> Result<BayesianGame> {
    parse(CHICKEN_JSON)
}

pub fn parse(json: &str) -> Result<BayesianGame> {
    serde_json::from_str(json).map_err(|e| crate::Error::InvalidGame(e.to_string()))
}
