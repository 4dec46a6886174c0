//! Two-player Bayesian games with classical and quantum correlated advice.
//!
//! - [`game`]: payoffs, pure Nash and correlated equilibria of finite games
//! - [`ns_box`]: 2-2-2 no-signaling boxes, polytope vertices, Bell expressions
//! - [`quantum`]: two-qubit strategies, the Born rule, tilted-CHSH optima
//! - [`swgame`]: the `G(zeta, eta)` game family and its quantum incentives
//! - [`lp`]: the small simplex used for polytope and hull membership
//! - [`par`]: sequential / rayon execution policy

pub mod corpus;
pub mod error;
pub mod game;
pub mod lp;
pub mod ns_box;
pub mod par;
pub mod quantum;
pub mod swgame;

pub use error::{Error, Result};
pub use game::{BayesianGame, BehavioralStrategy, CorrelatedAdvice, PayoffVector, Player, PureStrategyProfile};
pub use ns_box::{FullTable, NsBox};
pub use par::Exec;
pub use quantum::{ProjectiveMeasurement, QuantumStrategy, SchmidtState};
pub use swgame::{GameParams, IncentivePoint};
