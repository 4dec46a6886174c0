use proptest::prelude::*;
use qsw::game::{
    enumerate_pure_profiles, expected_payoff, expected_payoff_correlated, find_pure_nash, fully_mixed_nash_2x2,
    is_correlated_equilibrium, is_pure_nash, pure_payoff, EQUILIBRIUM_TOL,
};
use qsw::{corpus, lp, BayesianGame, BehavioralStrategy, CorrelatedAdvice, PayoffVector, PureStrategyProfile};

/// `[tA][tB][sA][sB] -> (vA, vB)`.
type Utilities = Vec<Vec<Vec<Vec<(f64, f64)>>>>;

/// Raw game data kept outside the library types so the oracle below never
/// touches the implementation's indexing.
#[derive(Debug, Clone)]
struct RawGame {
    nt: [usize; 2],
    ns: [usize; 2],
    prior: Vec<Vec<f64>>,
    util: Utilities,
}

impl RawGame {
    fn build(&self) -> BayesianGame {
        let flat_prior: Vec<f64> = self.prior.iter().flatten().copied().collect();
        BayesianGame::from_fn(self.nt, self.ns, flat_prior, |ta, tb, sa, sb| {
            let (a, b) = self.util[ta][tb][sa][sb];
            PayoffVector::new(a, b)
        })
        .unwrap()
    }

    fn oracle(&self, ga: &[Vec<f64>], gb: &[Vec<f64>]) -> (f64, f64) {
        let (mut va, mut vb) = (0.0, 0.0);
        for (ta, da) in ga.iter().enumerate() {
            for (tb, db) in gb.iter().enumerate() {
                for (sa, pa) in da.iter().enumerate() {
                    for (sb, pb) in db.iter().enumerate() {
                        let w = self.prior[ta][tb] * pa * pb;
                        va += w * self.util[ta][tb][sa][sb].0;
                        vb += w * self.util[ta][tb][sa][sb].1;
                    }
                }
            }
        }
        (va, vb)
    }
}

fn normalize(v: Vec<f64>) -> Vec<f64> {
    let s: f64 = v.iter().sum();
    let mut out: Vec<f64> = v.iter().map(|x| x / s).collect();
    let r = 1.0 - out.iter().sum::<f64>();
    out[0] += r;
    out
}

fn simplex(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.01f64..1.0, n).prop_map(normalize)
}

fn raw_game() -> impl Strategy<Value = RawGame> {
    (1usize..=3, 1usize..=3, 1usize..=3, 1usize..=3).prop_flat_map(|(ta, tb, sa, sb)| {
        (
            simplex(ta * tb),
            prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), ta * tb * sa * sb),
        )
            .prop_map(move |(prior, util)| {
                let prior = prior.chunks(tb).map(<[f64]>::to_vec).collect();
                let mut it = util.into_iter();
                let util = (0..ta)
                    .map(|_| {
                        (0..tb)
                            .map(|_| (0..sa).map(|_| (0..sb).map(|_| it.next().unwrap()).collect()).collect())
                            .collect()
                    })
                    .collect();
                RawGame {
                    nt: [ta, tb],
                    ns: [sa, sb],
                    prior,
                    util,
                }
            })
    })
}

fn game_and_strategy() -> impl Strategy<Value = (RawGame, Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    raw_game().prop_flat_map(|g| {
        let ga = prop::collection::vec(simplex(g.ns[0]), g.nt[0]);
        let gb = prop::collection::vec(simplex(g.ns[1]), g.nt[1]);
        (Just(g), ga, gb)
    })
}

fn random_advice(game: &BayesianGame, weights: &[f64]) -> CorrelatedAdvice {
    let profiles = enumerate_pure_profiles(game);
    let w: Vec<f64> = profiles
        .iter()
        .enumerate()
        .map(|(i, _)| weights[i % weights.len()])
        .collect();
    let w = normalize(w);
    CorrelatedAdvice::new(profiles.into_iter().zip(w).collect()).unwrap()
}

proptest! {
    #[test]
    fn expected_payoff_matches_direct_sum((raw, ga, gb) in game_and_strategy()) {
        let game = raw.build();
        let s = BehavioralStrategy::new(ga.clone(), gb.clone()).unwrap();
        let v = expected_payoff(&game, &s).unwrap();
        let (oa, ob) = raw.oracle(&ga, &gb);
        prop_assert!((v.alice - oa).abs() <= 1e-12 && (v.bob - ob).abs() <= 1e-12);
    }

    #[test]
    fn point_advice_reproduces_pure_payoff(raw in raw_game(), pick in 0usize..1000) {
        let game = raw.build();
        let profiles = enumerate_pure_profiles(&game);
        let p = profiles[pick % profiles.len()].clone();
        let via_advice = expected_payoff_correlated(&game, &CorrelatedAdvice::point(p.clone())).unwrap();
        let via_behavioral = expected_payoff(&game, &BehavioralStrategy::from_pure(&game, &p).unwrap()).unwrap();
        prop_assert_eq!(via_advice, pure_payoff(&game, &p).unwrap());
        prop_assert!(via_advice.max_abs_diff(&via_behavioral) <= 1e-12);
    }

    #[test]
    fn correlated_payoff_is_affine(
        raw in raw_game(),
        wa in prop::collection::vec(0.01f64..1.0, 1..8),
        wb in prop::collection::vec(0.01f64..1.0, 1..8),
        lambda in 0.0f64..=1.0,
    ) {
        let game = raw.build();
        let mu = random_advice(&game, &wa);
        let nu = random_advice(&game, &wb);
        let mixed = mu.mix(&nu, lambda).unwrap();
        let lhs = expected_payoff_correlated(&game, &mixed).unwrap();
        let rhs = expected_payoff_correlated(&game, &mu).unwrap().scale(lambda)
            + expected_payoff_correlated(&game, &nu).unwrap().scale(1.0 - lambda);
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn nash_search_is_exact_filter(raw in raw_game()) {
        let game = raw.build();
        let found = find_pure_nash(&game, EQUILIBRIUM_TOL);
        for p in enumerate_pure_profiles(&game) {
            prop_assert_eq!(found.contains(&p), is_pure_nash(&game, &p, EQUILIBRIUM_TOL).unwrap());
        }
        for p in &found {
            prop_assert!(is_correlated_equilibrium(&game, &CorrelatedAdvice::point(p.clone()), EQUILIBRIUM_TOL).unwrap());
        }
    }
}

#[test]
fn nash_filter_on_sixteen_profile_game() {
    use qsw::swgame::{build_game, GameParams};
    let game = build_game(&GameParams::new(0.5, 16.0).unwrap());
    let profiles = enumerate_pure_profiles(&game);
    assert_eq!(profiles.len(), 16);
    let found = find_pure_nash(&game, EQUILIBRIUM_TOL);
    for p in &profiles {
        assert_eq!(found.contains(p), is_pure_nash(&game, p, EQUILIBRIUM_TOL).unwrap());
    }
}

#[test]
fn chicken_correlated_point_outside_nash_hull() {
    let g = corpus::chicken().unwrap();
    let mixed = fully_mixed_nash_2x2(&g).unwrap();
    let mixed_payoff = expected_payoff(&g, &mixed).unwrap();
    let mut points: Vec<Vec<f64>> = find_pure_nash(&g, EQUILIBRIUM_TOL)
        .iter()
        .map(|p| {
            let v = pure_payoff(&g, p).unwrap();
            vec![v.alice, v.bob]
        })
        .collect();
    points.push(vec![mixed_payoff.alice, mixed_payoff.bob]);
    assert_eq!(points.len(), 3);

    let advice = CorrelatedAdvice::uniform(vec![
        PureStrategyProfile::actions(0, 0),
        PureStrategyProfile::actions(0, 1),
        PureStrategyProfile::actions(1, 0),
    ])
    .unwrap();
    let ce = expected_payoff_correlated(&g, &advice).unwrap();
    let r = lp::in_convex_hull(&points, &[ce.alice, ce.bob], 1e-9).unwrap();
    assert!(!r.feasible);
    // A point inside the hull for contrast.
    assert!(lp::in_convex_hull(&points, &[4.5, 4.5], 1e-9).unwrap().feasible);
}

#[test]
fn corpus_files_parse() {
    let bos = corpus::battle_of_sexes().unwrap();
    assert_eq!(
        find_pure_nash(&bos, EQUILIBRIUM_TOL),
        vec![PureStrategyProfile::actions(0, 0), PureStrategyProfile::actions(1, 1)]
    );
    assert!(corpus::parse("{}").is_err());
}
