//! Finite two-player Bayesian games: payoffs, pure Nash equilibria and
//! correlated equilibria.
//!
//! Complete-information games are Bayesian games with singleton type sets.
//! Utilities are stored densely, indexed by `(t_A, t_B, s_A, s_B)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Exec;

/// Tolerance for probability vectors summing to one.
pub const PROB_TOL: f64 = 1e-12;
/// Default slack for equilibrium checks.
pub const EQUILIBRIUM_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Player {
    Alice,
    Bob,
}

impl Player {
    pub const BOTH: [Player; 2] = [Player::Alice, Player::Bob];

    pub fn index(self) -> usize {
        match self {
            Player::Alice => 0,
            Player::Bob => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PayoffVector {
    pub alice: f64,
    pub bob: f64,
}

impl PayoffVector {
    pub fn new(alice: f64, bob: f64) -> Self {
        Self { alice, bob }
    }

    pub fn get(&self, player: Player) -> f64 {
        match player {
            Player::Alice => self.alice,
            Player::Bob => self.bob,
        }
    }

    pub fn welfare(&self) -> f64 {
        social_welfare(self)
    }

    pub fn scale(self, k: f64) -> Self {
        Self::new(k * self.alice, k * self.bob)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.alice - other.alice).abs().max((self.bob - other.bob).abs())
    }
}

impl std::ops::Add for PayoffVector {
    type Output = Self;

    fn add(self, other: Self) -> Self {
        Self::new(self.alice + other.alice, self.bob + other.bob)
    }
}

/// Sum of both players' expected payoffs.
pub fn social_welfare(payoffs: &PayoffVector) -> f64 {
    payoffs.alice + payoffs.bob
}

fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    if let Some(x) = p.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return Err(Error::InvalidDistribution(format!(
            "{what}: entry {x} is negative or not finite"
        )));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > PROB_TOL {
        return Err(Error::InvalidDistribution(format!("{what}: sums to {s}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GameFile", into = "GameFile")]
pub struct BayesianGame {
    types: [usize; 2],
    actions: [usize; 2],
    prior: Vec<f64>,
    utilities: Vec<PayoffVector>,
}

impl BayesianGame {
    /// `prior` is row-major over `(t_A, t_B)`; `utilities` is row-major over
    /// `(t_A, t_B, s_A, s_B)`.
    pub fn new(types: [usize; 2], actions: [usize; 2], prior: Vec<f64>, utilities: Vec<PayoffVector>) -> Result<Self> {
        if types.contains(&0) || actions.contains(&0) {
            return Err(Error::InvalidGame("type and action sets must be nonempty".into()));
        }
        if prior.len() != types[0] * types[1] {
            return Err(Error::InvalidGame(format!(
                "prior has {} entries, expected {}",
                prior.len(),
                types[0] * types[1]
            )));
        }
        let n = types[0] * types[1] * actions[0] * actions[1];
        if utilities.len() != n {
            return Err(Error::InvalidGame(format!(
                "utility table has {} entries, expected {n}",
                utilities.len()
            )));
        }
        check_distribution(&prior, "prior")?;
        if utilities.iter().any(|u| !u.alice.is_finite() || !u.bob.is_finite()) {
            return Err(Error::InvalidGame("non-finite utility".into()));
        }
        Ok(Self {
            types,
            actions,
            prior,
            utilities,
        })
    }

    pub fn from_fn(
        types: [usize; 2],
        actions: [usize; 2],
        prior: Vec<f64>,
        f: impl Fn(usize, usize, usize, usize) -> PayoffVector,
    ) -> Result<Self> {
        let mut utilities = Vec::with_capacity(types[0] * types[1] * actions[0] * actions[1]);
        for ta in 0..types[0] {
            for tb in 0..types[1] {
                for sa in 0..actions[0] {
                    for sb in 0..actions[1] {
                        utilities.push(f(ta, tb, sa, sb));
                    }
                }
            }
        }
        Self::new(types, actions, prior, utilities)
    }

    /// A game with singleton type sets; `table[s_A][s_B]` is the payoff pair.
    pub fn complete_information(table: &[Vec<PayoffVector>]) -> Result<Self> {
        let rows = table.len();
        let cols = table.first().map_or(0, Vec::len);
        if table.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidGame("ragged payoff matrix".into()));
        }
        Self::from_fn([1, 1], [rows, cols], vec![1.0], |_, _, sa, sb| table[sa][sb])
    }

    pub fn types(&self, player: Player) -> usize {
        self.types[player.index()]
    }

    pub fn actions(&self, player: Player) -> usize {
        self.actions[player.index()]
    }

    pub fn prior(&self, ta: usize, tb: usize) -> f64 {
        self.prior[ta * self.types[1] + tb]
    }

    pub fn utility(&self, ta: usize, tb: usize, sa: usize, sb: usize) -> PayoffVector {
        let idx = ((ta * self.types[1] + tb) * self.actions[0] + sa) * self.actions[1] + sb;
        self.utilities[idx]
    }

    pub fn is_complete_information(&self) -> bool {
        self.types == [1, 1]
    }

    /// Expected payoff when the joint action is drawn from an arbitrary
    /// conditional `q(s_A, s_B | t_A, t_B)`.
    pub fn expected_payoff_conditional(&self, q: impl Fn(usize, usize, usize, usize) -> f64) -> PayoffVector {
        let mut acc = PayoffVector::default();
        for ta in 0..self.types[0] {
            for tb in 0..self.types[1] {
                let pt = self.prior(ta, tb);
                for sa in 0..self.actions[0] {
                    for sb in 0..self.actions[1] {
                        let w = pt * q(ta, tb, sa, sb);
                        let u = self.utility(ta, tb, sa, sb);
                        acc.alice += w * u.alice;
                        acc.bob += w * u.bob;
                    }
                }
            }
        }
        acc
    }

    fn pure_payoff_unchecked(&self, alice: &[usize], bob: &[usize]) -> PayoffVector {
        let mut acc = PayoffVector::default();
        for (ta, &sa) in alice.iter().enumerate() {
            for (tb, &sb) in bob.iter().enumerate() {
                let pt = self.prior(ta, tb);
                let u = self.utility(ta, tb, sa, sb);
                acc.alice += pt * u.alice;
                acc.bob += pt * u.bob;
            }
        }
        acc
    }

    fn check_pure(&self, player: Player, strategy: &[usize]) -> Result<()> {
        let (nt, ns) = (self.types(player), self.actions(player));
        if strategy.len() != nt {
            return Err(Error::DimensionMismatch(format!(
                "{player:?} strategy covers {} types, game has {nt}",
                strategy.len()
            )));
        }
        if let Some(&s) = strategy.iter().find(|&&s| s >= ns) {
            return Err(Error::DimensionMismatch(format!(
                "{player:?} action {s} out of range (0..{ns})"
            )));
        }
        Ok(())
    }

    pub fn check_profile(&self, profile: &PureStrategyProfile) -> Result<()> {
        self.check_pure(Player::Alice, &profile.alice)?;
        self.check_pure(Player::Bob, &profile.bob)
    }
}

/// On-disk form of a game.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GameFile {
    pub types: [usize; 2],
    pub actions: [usize; 2],
    pub prior: Vec<f64>,
    pub utilities: Vec<UtilityRecord>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[allow(non_snake_case)]
pub struct UtilityRecord {
    pub tA: usize,
    pub tB: usize,
    pub sA: usize,
    pub sB: usize,
    pub vA: f64,
    pub vB: f64,
}

impl TryFrom<GameFile> for BayesianGame {
    type Error = Error;

    fn try_from(file: GameFile) -> Result<Self> {
        let [nta, ntb] = file.types;
        let [nsa, nsb] = file.actions;
        let mut table: Vec<Option<PayoffVector>> = vec![None; nta * ntb * nsa * nsb];
        for r in &file.utilities {
            if r.tA >= nta || r.tB >= ntb || r.sA >= nsa || r.sB >= nsb {
                return Err(Error::InvalidGame(format!(
                    "utility record ({},{},{},{}) out of range",
                    r.tA, r.tB, r.sA, r.sB
                )));
            }
            let idx = ((r.tA * ntb + r.tB) * nsa + r.sA) * nsb + r.sB;
            if table[idx].replace(PayoffVector::new(r.vA, r.vB)).is_some() {
                return Err(Error::InvalidGame(format!(
                    "duplicate utility record ({},{},{},{})",
                    r.tA, r.tB, r.sA, r.sB
                )));
            }
        }
        let utilities = table
            .into_iter()
            .enumerate()
            .map(|(i, u)| u.ok_or_else(|| Error::InvalidGame(format!("missing utility record #{i}"))))
            .collect::<Result<Vec<_>>>()?;
        BayesianGame::new(file.types, file.actions, file.prior, utilities)
    }
}

impl From<BayesianGame> for GameFile {
    fn from(g: BayesianGame) -> Self {
        let mut utilities = Vec::with_capacity(g.utilities.len());
        for ta in 0..g.types[0] {
            for tb in 0..g.types[1] {
                for sa in 0..g.actions[0] {
                    for sb in 0..g.actions[1] {
                        let u = g.utility(ta, tb, sa, sb);
                        utilities.push(UtilityRecord {
                            tA: ta,
                            tB: tb,
                            sA: sa,
                            sB: sb,
                            vA: u.alice,
                            vB: u.bob,
                        });
                    }
                }
            }
        }
        GameFile {
            types: g.types,
            actions: g.actions,
            prior: g.prior,
            utilities,
        }
    }
}

/// One deterministic type-to-action map per player.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PureStrategyProfile {
    pub alice: Vec<usize>,
    pub bob: Vec<usize>,
}

impl PureStrategyProfile {
    pub fn new(alice: Vec<usize>, bob: Vec<usize>) -> Self {
        Self { alice, bob }
    }

    /// Profile of a complete-information game.
    pub fn actions(sa: usize, sb: usize) -> Self {
        Self::new(vec![sa], vec![sb])
    }

    pub fn get(&self, player: Player) -> &[usize] {
        match player {
            Player::Alice => &self.alice,
            Player::Bob => &self.bob,
        }
    }

    fn with(&self, player: Player, strategy: Vec<usize>) -> Self {
        match player {
            Player::Alice => Self::new(strategy, self.bob.clone()),
            Player::Bob => Self::new(self.alice.clone(), strategy),
        }
    }
}

/// All maps from `types` types to `actions` actions, lexicographic in
/// `(s(t_0), s(t_1), ...)`.
pub fn pure_strategies(types: usize, actions: usize) -> Vec<Vec<usize>> {
    let count = actions.pow(types as u32);
    (0..count)
        .map(|mut k| {
            let mut s = vec![0; types];
            for slot in s.iter_mut().rev() {
                *slot = k % actions;
                k /= actions;
            }
            s
        })
        .collect()
}

/// Every pure profile, Alice's strategy outermost, both lexicographic.
pub fn enumerate_pure_profiles(game: &BayesianGame) -> Vec<PureStrategyProfile> {
    let sa = pure_strategies(game.types[0], game.actions[0]);
    let sb = pure_strategies(game.types[1], game.actions[1]);
    sa.iter()
        .flat_map(|a| sb.iter().map(move |b| PureStrategyProfile::new(a.clone(), b.clone())))
        .collect()
}

/// Per-type action distributions `g_i(s_i | t_i)` for both players.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BehavioralStrategy {
    pub alice: Vec<Vec<f64>>,
    pub bob: Vec<Vec<f64>>,
}

impl BehavioralStrategy {
    pub fn new(alice: Vec<Vec<f64>>, bob: Vec<Vec<f64>>) -> Result<Self> {
        for (who, rows) in [("alice", &alice), ("bob", &bob)] {
            for (t, row) in rows.iter().enumerate() {
                check_distribution(row, &format!("{who} type {t}"))?;
            }
        }
        Ok(Self { alice, bob })
    }

    pub fn from_pure(game: &BayesianGame, profile: &PureStrategyProfile) -> Result<Self> {
        game.check_profile(profile)?;
        let onehot = |s: &[usize], n: usize| -> Vec<Vec<f64>> {
            s.iter()
                .map(|&a| (0..n).map(|k| if k == a { 1.0 } else { 0.0 }).collect())
                .collect()
        };
        Ok(Self {
            alice: onehot(&profile.alice, game.actions[0]),
            bob: onehot(&profile.bob, game.actions[1]),
        })
    }

    fn check_against(&self, game: &BayesianGame) -> Result<()> {
        for (player, rows) in [(Player::Alice, &self.alice), (Player::Bob, &self.bob)] {
            if rows.len() != game.types(player) || rows.iter().any(|r| r.len() != game.actions(player)) {
                return Err(Error::DimensionMismatch(format!(
                    "{player:?} strategy shape does not match {} types x {} actions",
                    game.types(player),
                    game.actions(player)
                )));
            }
        }
        Ok(())
    }
}

/// `sum_{t,s} P(t) v_i(t,s) g_A(s_A|t_A) g_B(s_B|t_B)` for both players.
pub fn expected_payoff(game: &BayesianGame, strat: &BehavioralStrategy) -> Result<PayoffVector> {
    strat.check_against(game)?;
    Ok(game.expected_payoff_conditional(|ta, tb, sa, sb| strat.alice[ta][sa] * strat.bob[tb][sb]))
}

pub fn pure_payoff(game: &BayesianGame, profile: &PureStrategyProfile) -> Result<PayoffVector> {
    game.check_profile(profile)?;
    Ok(game.pure_payoff_unchecked(&profile.alice, &profile.bob))
}

/// A distribution over joint pure-strategy profiles handed out by a referee.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelatedAdvice {
    entries: Vec<(PureStrategyProfile, f64)>,
}

impl CorrelatedAdvice {
    /// Duplicate profiles are merged.
    pub fn new(entries: Vec<(PureStrategyProfile, f64)>) -> Result<Self> {
        let weights: Vec<f64> = entries.iter().map(|e| e.1).collect();
        check_distribution(&weights, "advice")?;
        let mut merged: BTreeMap<PureStrategyProfile, f64> = BTreeMap::new();
        for (p, w) in entries {
            *merged.entry(p).or_insert(0.0) += w;
        }
        Ok(Self {
            entries: merged.into_iter().collect(),
        })
    }

    pub fn point(profile: PureStrategyProfile) -> Self {
        Self {
            entries: vec![(profile, 1.0)],
        }
    }

    /// Uniform advice over the given profiles.
    pub fn uniform(profiles: Vec<PureStrategyProfile>) -> Result<Self> {
        if profiles.is_empty() {
            return Err(Error::InvalidDistribution("empty advice".into()));
        }
        let w = 1.0 / profiles.len() as f64;
        Self::new(profiles.into_iter().map(|p| (p, w)).collect())
    }

    /// `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &Self, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::Domain(format!("mixing weight {lambda} outside [0,1]")));
        }
        let entries = self
            .entries
            .iter()
            .map(|(p, w)| (p.clone(), lambda * w))
            .chain(other.entries.iter().map(|(p, w)| (p.clone(), (1.0 - lambda) * w)))
            .collect();
        Self::new(entries)
    }

    pub fn entries(&self) -> &[(PureStrategyProfile, f64)] {
        &self.entries
    }
}

pub fn expected_payoff_correlated(game: &BayesianGame, advice: &CorrelatedAdvice) -> Result<PayoffVector> {
    let mut acc = PayoffVector::default();
    for (p, w) in &advice.entries {
        acc = acc + pure_payoff(game, p)?.scale(*w);
    }
    Ok(acc)
}

/// No unilateral pure deviation gains more than `tol`. Linearity makes pure
/// deviations sufficient.
pub fn is_pure_nash(game: &BayesianGame, profile: &PureStrategyProfile, tol: f64) -> Result<bool> {
    game.check_profile(profile)?;
    let base = game.pure_payoff_unchecked(&profile.alice, &profile.bob);
    for player in Player::BOTH {
        for dev in pure_strategies(game.types(player), game.actions(player)) {
            let p = profile.with(player, dev);
            if game.pure_payoff_unchecked(&p.alice, &p.bob).get(player) > base.get(player) + tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

pub fn find_pure_nash(game: &BayesianGame, tol: f64) -> Vec<PureStrategyProfile> {
    find_pure_nash_with(Exec::default(), game, tol)
}

pub fn find_pure_nash_with(exec: Exec, game: &BayesianGame, tol: f64) -> Vec<PureStrategyProfile> {
    let profiles = enumerate_pure_profiles(game);
    let keep = exec.map(&profiles, |p| is_pure_nash(game, p, tol).unwrap_or(false));
    profiles
        .into_iter()
        .zip(keep)
        .filter_map(|(p, k)| k.then_some(p))
        .collect()
}

/// Aumann obedience: for each player and each recommended pure strategy with
/// positive probability, no remapping to another pure strategy improves the
/// conditional expected payoff by more than `tol`.
pub fn is_correlated_equilibrium(game: &BayesianGame, advice: &CorrelatedAdvice, tol: f64) -> Result<bool> {
    for (p, _) in &advice.entries {
        game.check_profile(p)?;
    }
    for player in Player::BOTH {
        let mut by_rec: BTreeMap<&[usize], Vec<(&PureStrategyProfile, f64)>> = BTreeMap::new();
        for (p, w) in &advice.entries {
            by_rec.entry(p.get(player)).or_default().push((p, *w));
        }
        let alternatives = pure_strategies(game.types(player), game.actions(player));
        for group in by_rec.values() {
            let marginal: f64 = group.iter().map(|(_, w)| w).sum();
            if marginal <= 0.0 {
                continue;
            }
            let obey: f64 = group
                .iter()
                .map(|(p, w)| w * game.pure_payoff_unchecked(&p.alice, &p.bob).get(player))
                .sum();
            for alt in &alternatives {
                let deviate: f64 = group
                    .iter()
                    .map(|(p, w)| {
                        let q = p.with(player, alt.clone());
                        w * game.pure_payoff_unchecked(&q.alice, &q.bob).get(player)
                    })
                    .sum();
                if (deviate - obey) / marginal > tol {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Fully mixed equilibrium of a complete-information 2x2 game from the
/// indifference conditions, if one exists with both probabilities in (0,1).
pub fn fully_mixed_nash_2x2(game: &BayesianGame) -> Option<BehavioralStrategy> {
    if !game.is_complete_information() || game.actions != [2, 2] {
        return None;
    }
    let u = |sa, sb| game.utility(0, 0, sa, sb);
    // Alice's p on action 0 makes Bob indifferent between his actions.
    let db = (u(0, 0).bob - u(0, 1).bob) - (u(1, 0).bob - u(1, 1).bob);
    let da = (u(0, 0).alice - u(1, 0).alice) - (u(0, 1).alice - u(1, 1).alice);
    if db == 0.0 || da == 0.0 {
        return None;
    }
    let p = (u(1, 1).bob - u(1, 0).bob) / db;
    let q = (u(1, 1).alice - u(0, 1).alice) / da;
    let open = |x: f64| x > 0.0 && x < 1.0;
    if !open(p) || !open(q) {
        return None;
    }
    Some(BehavioralStrategy {
        alice: vec![vec![p, 1.0 - p]],
        bob: vec![vec![q, 1.0 - q]],
    })
}
