//! The two-parameter family of Bayesian games `G(zeta, eta)` whose social
//! welfare under no-signaling advice is an affine function of the tilted
//! CHSH expression.
//!
//! Types are box inputs and actions are box outputs: `x_i = t_i`, and
//! outcome +1 is action 0. The type prior is uniform.

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::game::{BayesianGame, PayoffVector};
use crate::ns_box::{chsh_value, NsBox};
use crate::par::Exec;
use crate::quantum::zeta_from_theta;

/// Slack used when deciding whether an incentive is strictly positive.
pub const ADVANTAGE_TOL: f64 = 1e-9;
/// Grid spacing of the sign-change scan in [`theta0`].
pub const THETA0_SCAN_STEP: f64 = 1e-3;
/// Width at which the bisection in [`theta0`] stops.
pub const THETA0_WIDTH: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    zeta: f64,
    eta: f64,
}

impl GameParams {
    pub fn new(zeta: f64, eta: f64) -> Result<Self> {
        if !(0.0..2.0).contains(&zeta) {
            return Err(domain(format!("zeta = {zeta} outside [0, 2)")));
        }
        check_eta(eta)?;
        Ok(Self { zeta, eta })
    }

    /// The game for which the state with Schmidt angle `theta` is optimal.
    pub fn for_theta(theta: f64, eta: f64) -> Result<Self> {
        Self::new(zeta_from_theta(theta)?, eta)
    }

    pub fn zeta(&self) -> f64 {
        self.zeta
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }
}

fn check_eta(eta: f64) -> Result<()> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(domain(format!("eta = {eta} must be positive")));
    }
    Ok(())
}

/// Utility of `(t_A, t_B, s_A, s_B)`; already includes the factor 1/4.
fn utility(p: &GameParams, ta: usize, tb: usize, sa: usize, sb: usize) -> PayoffVector {
    let (z, e) = (p.zeta, p.eta);
    let (a, b) = match (ta, tb, sa, sb) {
        (0, 0, 0, 0) => (e * z + 1.0, e * z - 1.0),
        (0, 0, 0, 1) => (-2.0 * e + e * z + 1.0, -2.0 * e + e * z - 1.0),
        (0, 0, 1, _) => (0.0, 0.0),
        (0, 1, 0, 0) => (2.0 * e + 3.0, 3.0 * e),
        (0, 1, _, _) => (3.0, e),
        (1, 0, 0, 0) => (-1.0, 1.0),
        (1, 0, 1, 0) => (-2.0 * e - 1.0, -2.0 * e + 1.0),
        (1, 0, _, _) => (0.0, 0.0),
        (1, 1, 0, 0) => (-e, -2.0 * e + 9.0),
        (1, 1, _, _) => (e, 9.0),
        _ => unreachable!("binary types and actions"),
    };
    PayoffVector::new(a / 4.0, b / 4.0)
}

pub fn build_game(params: &GameParams) -> BayesianGame {
    BayesianGame::from_fn([2, 2], [2, 2], vec![0.25; 4], |ta, tb, sa, sb| {
        utility(params, ta, tb, sa, sb)
    })
    .expect("G(zeta, eta) table is well formed")
}

/// The four pure strategies `g^1 .. g^4`: constant 0, constant 1, copy the
/// type, flip the type. `label` is 1-based.
pub fn named_strategy(label: usize) -> Option<Vec<usize>> {
    match label {
        1 => Some(vec![0, 0]),
        2 => Some(vec![1, 1]),
        3 => Some(vec![0, 1]),
        4 => Some(vec![1, 0]),
        _ => None,
    }
}

/// Inverse of [`named_strategy`].
pub fn strategy_label(strategy: &[usize]) -> Option<usize> {
    (1..=4).find(|&l| named_strategy(l).as_deref() == Some(strategy))
}

/// Closed-form average payoff of `(g^l_A, g^m_B)` as tabulated for this
/// family (`l`, `m` are 1-based).
pub fn tabulated_pure_payoff(params: &GameParams, l: usize, m: usize) -> Option<PayoffVector> {
    let (e, ez) = (params.eta, params.eta * params.zeta);
    let (a, b) = match (l, m) {
        (1, 1) | (1, 3) | (3, 1) => (3.0 + e + ez, 9.0 + e + ez),
        (1, 2) | (1, 4) | (3, 2) => (4.0 - e + ez, 8.0 - e + ez),
        (2, 1) | (2, 3) | (4, 1) => (2.0 - e, 10.0 - e),
        (2, 2) | (2, 4) | (4, 2) => (3.0 + e, 9.0 + e),
        (3, 3) => (3.0 - e + ez, 9.0 - e + ez),
        (3, 4) => (4.0 + e + ez, 8.0 + e + ez),
        (4, 3) => (2.0 + e, 10.0 + e),
        (4, 4) => (3.0 - e, 9.0 - e),
        _ => return None,
    };
    Some(PayoffVector::new(a / 16.0, b / 16.0))
}

/// Payoffs of the classical equilibria `(g^1,g^1)`, `(g^3,g^1)`, `(g^1,g^3)`.
pub fn classical_equilibrium_payoffs(params: &GameParams) -> PayoffVector {
    let base = params.eta + params.eta * params.zeta;
    PayoffVector::new((3.0 + base) / 16.0, (9.0 + base) / 16.0)
}

/// Expected payoffs when the players feed their types into a box and play
/// its outputs, summed over the table entries.
pub fn ns_advice_payoff(game: &BayesianGame, b: &NsBox) -> Result<PayoffVector> {
    use crate::game::Player;
    for p in Player::BOTH {
        if game.types(p) != 2 || game.actions(p) != 2 {
            return Err(Error::DimensionMismatch(
                "box advice needs two types and two actions per player".into(),
            ));
        }
    }
    Ok(game.expected_payoff_conditional(|ta, tb, sa, sb| b.entry(ta, tb, sa, sb)))
}

/// Payoffs from a box in terms of CHSH and the marginals:
/// `[3^k + eta/2 (CHSH + 2 zeta m_0) - (-1)^k (m_0 - n_0)] / 16` with
/// `k = 1` for Alice and `k = 2` for Bob.
pub fn payoff_from_box(params: &GameParams, b: &NsBox) -> PayoffVector {
    let tilted = chsh_value(b) + 2.0 * params.zeta * b.m(0);
    let common = 0.5 * params.eta * tilted;
    let skew = b.m(0) - b.n(0);
    PayoffVector::new((3.0 + common + skew) / 16.0, (9.0 + common - skew) / 16.0)
}

/// `[12 + eta (CHSH + 2 zeta m_0)] / 16`.
pub fn payoff_sum(params: &GameParams, b: &NsBox) -> f64 {
    let tilted = chsh_value(b) + 2.0 * params.zeta * b.m(0);
    (12.0 + params.eta * tilted) / 16.0
}

/// Closed-form payoffs of the optimal tilted-CHSH strategy at Schmidt angle
/// `theta`, in the game whose tilt matches that angle.
pub fn quantum_payoffs(theta: f64, eta: f64) -> Result<PayoffVector> {
    check_eta(eta)?;
    let zeta = zeta_from_theta(theta)?;
    let s2 = (2.0 * theta).sin();
    let root = (1.0 + s2 * s2).sqrt();
    let chsh_term = 0.5 * eta * (3.0 - (4.0 * theta).cos()) / root;
    let tilt_term = eta * theta.cos().powi(2) * zeta;
    let skew = 0.5 * (2.0 * theta).cos() * (1.0 - 1.0 / root);
    Ok(PayoffVector::new(
        (3.0 + chsh_term + tilt_term + skew) / 16.0,
        (9.0 + chsh_term + tilt_term - skew) / 16.0,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncentivePoint {
    pub theta: f64,
    pub eta: f64,
    pub zeta: f64,
    pub delta_va: f64,
    pub delta_vb: f64,
    pub payoff_a: f64,
    pub payoff_b: f64,
    pub welfare: f64,
}

/// Quantum payoffs minus the classical equilibrium payoffs, with `zeta`
/// locked to `theta`.
pub fn delta_v(theta: f64, eta: f64) -> Result<IncentivePoint> {
    let q = quantum_payoffs(theta, eta)?;
    let params = GameParams::for_theta(theta, eta)?;
    let c = classical_equilibrium_payoffs(&params);
    Ok(IncentivePoint {
        theta,
        eta,
        zeta: params.zeta,
        delta_va: q.alice - c.alice,
        delta_vb: q.bob - c.bob,
        payoff_a: q.alice,
        payoff_b: q.bob,
        welfare: q.welfare(),
    })
}

/// Neither incentive is negative beyond `tol` and at least one exceeds it.
pub fn is_quantum_advantageous(theta: f64, eta: f64, tol: f64) -> Result<bool> {
    let p = delta_v(theta, eta)?;
    Ok(p.delta_va >= -tol && p.delta_vb >= -tol && p.delta_va.max(p.delta_vb) > tol)
}

/// `lo + step, lo + 2 step, ...` up to `hi`, closing with `hi` itself.
pub fn theta_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(lo >= 0.0 && hi <= FRAC_PI_4 && lo < hi) {
        return Err(domain(format!("theta range ({lo}, {hi}] not inside (0, pi/4]")));
    }
    if !(step > 0.0 && step < hi - lo) {
        return Err(domain(format!("step {step} must lie in (0, {})", hi - lo)));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (1..=n).map(|i| lo + i as f64 * step).filter(|&t| t <= hi).collect();
    if grid.last().is_none_or(|&t| hi - t > 1e-12) {
        grid.push(hi);
    }
    Ok(grid)
}

/// Incentive curve over `(lo, hi]`.
pub fn scan(range: (f64, f64), eta: f64, step: f64, exec: Exec) -> Result<Vec<IncentivePoint>> {
    check_eta(eta)?;
    let grid = theta_grid(range.0, range.1, step)?;
    exec.map(&grid, |&t| delta_v(t, eta)).into_iter().collect()
}

/// Schmidt angle above which Bob's incentive is positive.
pub fn theta0(eta: f64) -> Result<f64> {
    check_eta(eta)?;
    let grid = theta_grid(0.0, FRAC_PI_4, THETA0_SCAN_STEP)?;
    let dvb = |t: f64| delta_v(t, eta).map(|p| p.delta_vb);
    let values = grid.iter().map(|&t| dvb(t)).collect::<Result<Vec<_>>>()?;
    let flips: Vec<usize> = (1..values.len())
        .filter(|&i| (values[i] > 0.0) != (values[i - 1] > 0.0))
        .collect();
    match flips.len() {
        0 => {
            let sign = if values[0] > 0.0 { "positive" } else { "non-positive" };
            return Err(Error::NoThreshold { eta, sign });
        }
        1 => {}
        count => return Err(Error::MultipleSignChanges { eta, count }),
    }
    let i = flips[0];
    if values[i] <= 0.0 {
        // Positive below and negative above: not the threshold shape.
        return Err(Error::NoThreshold {
            eta,
            sign: "positive at small angles",
        });
    }
    let (mut lo, mut hi) = (grid[i - 1], grid[i]);
    while hi - lo > THETA0_WIDTH {
        let mid = 0.5 * (lo + hi);
        if dvb(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Theta0Point {
    pub eta: f64,
    pub theta0: f64,
}

/// `n` log-spaced values from `lo` to `hi` inclusive.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi > lo && n >= 2) {
        return Err(domain(format!("cannot log-space {n} points on [{lo}, {hi}]")));
    }
    let (a, b) = (lo.ln(), hi.ln());
    Ok((0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect())
}

pub fn theta0_sweep(etas: &[f64], exec: Exec) -> Result<Vec<Theta0Point>> {
    exec.map(etas, |&eta| theta0(eta).map(|theta0| Theta0Point { eta, theta0 }))
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{find_pure_nash, pure_payoff, PureStrategyProfile, EQUILIBRIUM_TOL};
    use crate::ns_box::{local_vertex, NsBox};
    use std::f64::consts::SQRT_2;

    fn p(zeta: f64, eta: f64) -> GameParams {
        GameParams::new(zeta, eta).unwrap()
    }

    #[test]
    fn table_cells() {
        let g = build_game(&p(1.0, 16.0));
        assert_eq!(g.utility(0, 0, 0, 0), PayoffVector::new(17.0 / 4.0, 15.0 / 4.0));
        for (z, e) in [(0.0, 1.0), (1.5, 300.0)] {
            let g = build_game(&p(z, e));
            assert_eq!(g.utility(0, 0, 1, 0), PayoffVector::default());
            assert_eq!(g.utility(1, 1, 1, 1), PayoffVector::new(e / 4.0, 9.0 / 4.0));
            assert_eq!(g.utility(1, 1, 0, 1), PayoffVector::new(e / 4.0, 9.0 / 4.0));
        }
    }

    #[test]
    fn params_validation() {
        assert!(GameParams::new(2.0, 1.0).is_err());
        assert!(GameParams::new(-0.1, 1.0).is_err());
        assert!(GameParams::new(0.5, 0.0).is_err());
        assert!(GameParams::new(0.5, f64::NAN).is_err());
    }

    #[test]
    fn classical_values() {
        let c = classical_equilibrium_payoffs(&p(0.0, 16.0));
        assert_eq!(c, PayoffVector::new(19.0 / 16.0, 25.0 / 16.0));
        let c = classical_equilibrium_payoffs(&p(1.0, 16.0));
        assert_eq!(c, PayoffVector::new(35.0 / 16.0, 41.0 / 16.0));
        for (z, e) in [(0.3, 2.0), (1.7, 99.0)] {
            let params = p(z, e);
            let g1 = named_strategy(1).unwrap();
            let brute = pure_payoff(&build_game(&params), &PureStrategyProfile::new(g1.clone(), g1)).unwrap();
            assert!(brute.max_abs_diff(&classical_equilibrium_payoffs(&params)) < 1e-14);
        }
    }

    #[test]
    fn box_payoff_examples() {
        let params = p(0.7, 16.0);
        let id = payoff_from_box(&params, &local_vertex(false, false, false, false));
        assert!(id.max_abs_diff(&classical_equilibrium_payoffs(&params)) < 1e-14);
        let minus = payoff_from_box(&params, &local_vertex(false, true, false, true));
        assert!(minus.max_abs_diff(&PayoffVector::new(19.0 / 16.0, 25.0 / 16.0)) < 1e-14);
        let noise = payoff_sum(&params, &NsBox::uniform_noise());
        assert!((noise - (12.0 + 16.0 * 0.7) / 16.0).abs() < 1e-14);
    }

    #[test]
    fn maximally_entangled_incentives() {
        let d = delta_v(FRAC_PI_4, 16.0).unwrap();
        assert!((d.delta_va - (SQRT_2 - 1.0)).abs() < 1e-12);
        assert!((d.delta_vb - (SQRT_2 - 1.0)).abs() < 1e-12);
        let q = quantum_payoffs(FRAC_PI_4, 16.0).unwrap();
        assert!((q.alice - (3.0 + 16.0 * SQRT_2) / 16.0).abs() < 1e-13);
        assert!((q.bob - (9.0 + 16.0 * SQRT_2) / 16.0).abs() < 1e-13);
    }

    #[test]
    fn small_angle_incentives() {
        let d = delta_v(0.05, 16.0).unwrap();
        assert!(d.delta_va > 0.0 && d.delta_vb < 0.0);
        assert!(delta_v(0.05, 256.0).unwrap().delta_vb > 0.0);
        assert!(is_quantum_advantageous(FRAC_PI_4, 16.0, ADVANTAGE_TOL).unwrap());
        assert!(!is_quantum_advantageous(0.05, 16.0, ADVANTAGE_TOL).unwrap());
        assert!(is_quantum_advantageous(0.05, 256.0, ADVANTAGE_TOL).unwrap());
    }

    #[test]
    fn product_limit() {
        let th = 1e-7;
        let q = quantum_payoffs(th, 16.0).unwrap();
        let c = classical_equilibrium_payoffs(&GameParams::for_theta(th, 16.0).unwrap());
        assert!(q.max_abs_diff(&c) < 1e-10);
    }

    #[test]
    fn threshold_values() {
        let t16 = theta0(16.0).unwrap();
        assert!((t16 - 0.12).abs() < 0.01, "{t16}");
        let t256 = theta0(256.0).unwrap();
        assert!((t256 - 0.03).abs() < 0.005, "{t256}");
        assert!(delta_v(t16 + 1e-6, 16.0).unwrap().delta_vb > 0.0);
        assert!(delta_v(t16 - 1e-6, 16.0).unwrap().delta_vb < 0.0);
    }

    #[test]
    fn threshold_missing() {
        // For huge eta Bob's incentive is already positive at the first grid point.
        let r = theta0(1e9);
        assert!(matches!(r, Err(Error::NoThreshold { .. })), "{r:?}");
        assert!(theta0(-1.0).is_err());
    }

    #[test]
    fn grids() {
        let g = theta_grid(0.0, FRAC_PI_4, 0.001).unwrap();
        assert_eq!(g.len(), 786);
        assert_eq!(*g.last().unwrap(), FRAC_PI_4);
        assert!(theta_grid(0.0, FRAC_PI_4, 1.0).is_err());
        assert!(theta_grid(0.0, 1.0, 0.1).is_err());
        let e = log_spaced(16.0, 5000.0, 200).unwrap();
        assert_eq!(e.len(), 200);
        assert_eq!(e[0], 16.0);
        assert_eq!(e[199], 5000.0);
    }

    #[test]
    fn scan_is_ordered_and_consistent() {
        let s = scan((0.0, FRAC_PI_4), 16.0, 0.01, Exec::default()).unwrap();
        assert!(s.windows(2).all(|w| w[0].theta < w[1].theta));
        assert!(s.iter().all(|p| (p.welfare - (p.payoff_a + p.payoff_b)).abs() < 1e-12));
        assert_eq!(s, scan((0.0, FRAC_PI_4), 16.0, 0.01, Exec::Sequential).unwrap());
    }

    #[test]
    fn pure_nash_set_of_family() {
        // The three tabulated equilibria plus (g^2, g^2), which is also an
        // equilibrium whenever zeta < 2 - 1/eta and eta > 1/2.
        let labels = |z, e| -> Vec<(usize, usize)> {
            find_pure_nash(&build_game(&p(z, e)), EQUILIBRIUM_TOL)
                .iter()
                .map(|pr| (strategy_label(&pr.alice).unwrap(), strategy_label(&pr.bob).unwrap()))
                .collect()
        };
        for z in [0.0, 0.5, 1.0, 1.5] {
            assert_eq!(labels(z, 16.0), vec![(1, 1), (1, 3), (3, 1), (2, 2)]);
        }
        // Above zeta = 2 - 1/eta Alice leaves (g^2, g^2).
        assert_eq!(labels(1.95, 16.0), vec![(1, 1), (1, 3), (3, 1)]);
    }

    #[test]
    fn strategy_labels() {
        for l in 1..=4 {
            assert_eq!(strategy_label(&named_strategy(l).unwrap()), Some(l));
        }
        assert_eq!(named_strategy(0), None);
        assert_eq!(tabulated_pure_payoff(&p(0.0, 1.0), 5, 1), None);
    }
}
