//! Brute-force maximization of the tilted CHSH expression over Schmidt
//! angles and x-z plane projective measurements.
//!
//! Alice's two angles and the Schmidt angle are searched on a grid; Bob's
//! measurements are set to the exact best response, which for a fixed
//! state and Alice observables is the unit vector along `T^T (a_0 +/- a_1)`
//! where `T` is the x-z block of the correlation tensor. A compass search
//! then refines the best grid point.

use std::f64::consts::{FRAC_PI_4, PI};

use nalgebra::Matrix2;
use serde::Serialize;

use super::{born_box, pauli_x, pauli_z, ProjectiveMeasurement, QuantumStrategy, SchmidtState, C64};
use crate::error::{domain, Result};
use crate::ns_box::tilted_chsh_value;
use crate::par::Exec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    /// Grid spacing for the Schmidt angle and Alice's two angles.
    pub coarse_step: f64,
    /// Compass search stops once its step falls below this.
    pub min_step: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            coarse_step: 0.01,
            min_step: 1e-10,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SearchResult {
    pub zeta: f64,
    /// Best value on the coarse grid.
    pub coarse_value: f64,
    /// Value after refinement, recomputed from the Born-rule box.
    pub value: f64,
    pub strategy: QuantumStrategy,
    pub grid_points: usize,
}

/// Single- and two-body expectations restricted to the x-z plane.
#[derive(Debug, Clone, Copy)]
struct XzData {
    /// `<sigma_k (x) 1>` for k in (x, z).
    alice_local: [f64; 2],
    /// `<sigma_j (x) sigma_k>` for j, k in (x, z).
    t: [[f64; 2]; 2],
}

impl XzData {
    fn new(theta: f64) -> Self {
        let rho = SchmidtState { theta }.density();
        let ops = [pauli_x(), pauli_z()];
        let id = Matrix2::<C64>::identity();
        let ev = |op: nalgebra::Matrix4<C64>| (rho * op).trace().re;
        let alice_local = [ev(ops[0].kronecker(&id)), ev(ops[1].kronecker(&id))];
        let mut t = [[0.0; 2]; 2];
        for (j, row) in t.iter_mut().enumerate() {
            for (k, v) in row.iter_mut().enumerate() {
                *v = ev(ops[j].kronecker(&ops[k]));
            }
        }
        Self { alice_local, t }
    }

    /// `T^T a` for an Alice direction `a = (a_x, a_z)`.
    fn bob_field(&self, a: [f64; 2]) -> [f64; 2] {
        [
            self.t[0][0] * a[0] + self.t[1][0] * a[1],
            self.t[0][1] * a[0] + self.t[1][1] * a[1],
        ]
    }

    /// Tilted CHSH with Bob playing his best response.
    fn value(&self, zeta: f64, a0: [f64; 2], a1: [f64; 2]) -> f64 {
        let plus = self.bob_field([a0[0] + a1[0], a0[1] + a1[1]]);
        let minus = self.bob_field([a0[0] - a1[0], a0[1] - a1[1]]);
        let m0_term = zeta * (1.0 + a0[0] * self.alice_local[0] + a0[1] * self.alice_local[1]);
        m0_term + plus[0].hypot(plus[1]) + minus[0].hypot(minus[1])
    }

    fn best_bob(&self, a0: [f64; 2], a1: [f64; 2]) -> [ProjectiveMeasurement; 2] {
        let dir = |v: [f64; 2]| {
            if v[0] == 0.0 && v[1] == 0.0 {
                ProjectiveMeasurement::xz(0.0)
            } else {
                ProjectiveMeasurement::xz(v[0].atan2(v[1]))
            }
        };
        [
            dir(self.bob_field([a0[0] + a1[0], a0[1] + a1[1]])),
            dir(self.bob_field([a0[0] - a1[0], a0[1] - a1[1]])),
        ]
    }
}

/// Direction `(sin phi, cos phi)` in (x, z) coordinates.
fn xz_dir(phi: f64) -> [f64; 2] {
    let (s, c) = phi.sin_cos();
    [s, c]
}

pub fn tilted_grid_search(zeta: f64, config: SearchConfig, exec: Exec) -> Result<SearchResult> {
    if !(0.0..2.0).contains(&zeta) {
        return Err(domain(format!("zeta = {zeta} outside [0, 2)")));
    }
    if !(config.coarse_step > 0.0 && config.coarse_step < FRAC_PI_4) || config.min_step <= 0.0 {
        return Err(domain(format!("invalid search configuration {config:?}")));
    }
    let h = config.coarse_step;
    let n_theta = (FRAC_PI_4 / h).ceil() as usize + 1;
    let thetas: Vec<f64> = (0..n_theta).map(|i| (i as f64 * h).min(FRAC_PI_4)).collect();
    let n_angle = (2.0 * PI / h).ceil() as usize;
    let angles: Vec<f64> = (0..n_angle)
        .map(|k| -PI + k as f64 * 2.0 * PI / n_angle as f64)
        .collect();
    let dirs: Vec<[f64; 2]> = angles.iter().map(|&p| xz_dir(p)).collect();
    let data: Vec<XzData> = thetas.iter().map(|&t| XzData::new(t)).collect();

    let inner = |idx: usize| -> (usize, f64) {
        let (i, k0) = (idx / n_angle, idx % n_angle);
        let d = &data[i];
        let mut best = (0, f64::NEG_INFINITY);
        for (k1, a1) in dirs.iter().enumerate() {
            let v = d.value(zeta, dirs[k0], *a1);
            if v > best.1 {
                best = (k1, v);
            }
        }
        best
    };
    let (idx, coarse_value) = exec
        .argmax_range(n_theta * n_angle, |idx| inner(idx).1)
        .expect("nonempty grid");
    let (k1, _) = inner(idx);
    let (i, k0) = (idx / n_angle, idx % n_angle);

    let objective = |p: [f64; 3]| XzData::new(p[0]).value(zeta, xz_dir(p[1]), xz_dir(p[2]));
    let mut point = [thetas[i], angles[k0], angles[k1]];
    let mut best = objective(point);
    let mut step = h;
    while step >= config.min_step {
        let mut improved = false;
        for axis in 0..3 {
            for sign in [1.0, -1.0] {
                let mut cand = point;
                cand[axis] += sign * step;
                cand[0] = cand[0].clamp(0.0, FRAC_PI_4);
                let v = objective(cand);
                if v > best {
                    best = v;
                    point = cand;
                    improved = true;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }

    let d = XzData::new(point[0]);
    let (a0, a1) = (xz_dir(point[1]), xz_dir(point[2]));
    let strategy = QuantumStrategy {
        theta: SchmidtState::new(point[0])?,
        alice: [ProjectiveMeasurement::xz(point[1]), ProjectiveMeasurement::xz(point[2])],
        bob: d.best_bob(a0, a1),
    };
    let value = tilted_chsh_value(&born_box(&strategy)?, zeta)?;
    Ok(SearchResult {
        zeta,
        coarse_value,
        value,
        strategy,
        grid_points: n_theta * n_angle * n_angle,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn best_response_value_matches_born_box() {
        let d = XzData::new(0.3);
        let (a0, a1) = (xz_dir(0.2), xz_dir(1.7));
        let s = QuantumStrategy {
            theta: SchmidtState::new(0.3).unwrap(),
            alice: [ProjectiveMeasurement::xz(0.2), ProjectiveMeasurement::xz(1.7)],
            bob: d.best_bob(a0, a1),
        };
        let born = tilted_chsh_value(&born_box(&s).unwrap(), 0.8).unwrap();
        assert!((born - d.value(0.8, a0, a1)).abs() < 1e-13);
    }

    #[test]
    fn coarse_search_finds_tsirelson() {
        let cfg = SearchConfig {
            coarse_step: 0.05,
            min_step: 1e-10,
        };
        let r = tilted_grid_search(0.0, cfg, Exec::default()).unwrap();
        assert!((r.value - 8f64.sqrt()).abs() < 1e-8, "{}", r.value);
        assert!(r.coarse_value <= r.value + 1e-12);
    }

    #[test]
    fn policies_agree() {
        let cfg = SearchConfig {
            coarse_step: 0.1,
            min_step: 1e-6,
        };
        let a = tilted_grid_search(1.0, cfg, Exec::Sequential).unwrap();
        let b = tilted_grid_search(1.0, cfg, Exec::Parallel).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.strategy, b.strategy);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(tilted_grid_search(2.0, SearchConfig::default(), Exec::Sequential).is_err());
        let bad = SearchConfig {
            coarse_step: 0.0,
            min_step: 1e-9,
        };
        assert!(tilted_grid_search(0.5, bad, Exec::Sequential).is_err());
    }
}
