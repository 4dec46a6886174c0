//! Two-qubit pure states `cos(theta)|00> + sin(theta)|11>` measured with
//! projective two-outcome observables, and the closed-form optimal
//! strategy for the tilted CHSH expression.

use std::f64::consts::FRAC_PI_4;

use nalgebra::{Complex, Matrix2, Matrix4};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::ns_box::{outcome_sign, NsBox};

pub mod search;

pub type C64 = Complex<f64>;

const NORM_TOL: f64 = 1e-12;

fn c(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

pub fn pauli_x() -> Matrix2<C64> {
    Matrix2::new(c(0.0), c(1.0), c(1.0), c(0.0))
}

pub fn pauli_y() -> Matrix2<C64> {
    Matrix2::new(c(0.0), Complex::new(0.0, -1.0), Complex::new(0.0, 1.0), c(0.0))
}

pub fn pauli_z() -> Matrix2<C64> {
    Matrix2::new(c(1.0), c(0.0), c(0.0), c(-1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct SchmidtState {
    theta: f64,
}

impl SchmidtState {
    pub fn new(theta: f64) -> Result<Self> {
        if !(0.0..=FRAC_PI_4).contains(&theta) {
            return Err(domain(format!("Schmidt angle {theta} outside [0, pi/4]")));
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Amplitudes in the basis `|00>, |01>, |10>, |11>`.
    pub fn amplitudes(&self) -> [f64; 4] {
        [self.theta.cos(), 0.0, 0.0, self.theta.sin()]
    }

    pub fn density(&self) -> Matrix4<C64> {
        let a = self.amplitudes();
        Matrix4::from_fn(|i, j| c(a[i] * a[j]))
    }
}

impl TryFrom<f64> for SchmidtState {
    type Error = Error;
    fn try_from(theta: f64) -> Result<Self> {
        Self::new(theta)
    }
}

impl From<SchmidtState> for f64 {
    fn from(s: SchmidtState) -> f64 {
        s.theta
    }
}

/// Observable `n . sigma` with outcomes +1 / -1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct ProjectiveMeasurement {
    bloch: [f64; 3],
}

impl ProjectiveMeasurement {
    pub fn new(bloch: [f64; 3]) -> Result<Self> {
        let norm = bloch.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > NORM_TOL {
            return Err(domain(format!("Bloch vector {bloch:?} has norm {norm}")));
        }
        Ok(Self { bloch })
    }

    /// `cos(phi) sigma_z + sin(phi) sigma_x`.
    pub fn xz(phi: f64) -> Self {
        Self {
            bloch: [phi.sin(), 0.0, phi.cos()],
        }
    }

    pub fn bloch(&self) -> [f64; 3] {
        self.bloch
    }

    pub fn observable(&self) -> Matrix2<C64> {
        let [x, y, z] = self.bloch;
        pauli_x() * c(x) + pauli_y() * c(y) + pauli_z() * c(z)
    }

    /// Projector onto outcome `+1` (bit 0) or `-1` (bit 1).
    pub fn projector(&self, bit: usize) -> Matrix2<C64> {
        (Matrix2::identity() + self.observable() * c(outcome_sign(bit))) * c(0.5)
    }
}

impl TryFrom<[f64; 3]> for ProjectiveMeasurement {
    type Error = Error;
    fn try_from(b: [f64; 3]) -> Result<Self> {
        Self::new(b)
    }
}

impl From<ProjectiveMeasurement> for [f64; 3] {
    fn from(m: ProjectiveMeasurement) -> Self {
        m.bloch
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumStrategy {
    pub theta: SchmidtState,
    pub alice: [ProjectiveMeasurement; 2],
    pub bob: [ProjectiveMeasurement; 2],
}

fn expectation(rho: &Matrix4<C64>, op: &Matrix4<C64>) -> f64 {
    (rho * op).trace().re
}

/// `Tr[rho (E^{x_A}_{o_A} (x) E^{x_B}_{o_B})]` from the projectors directly.
pub fn born_probability(s: &QuantumStrategy, xa: usize, xb: usize, oa: usize, ob: usize) -> f64 {
    let op = s.alice[xa].projector(oa).kronecker(&s.bob[xb].projector(ob));
    expectation(&s.theta.density(), &op)
}

/// The box produced by a strategy, through
/// `P(a,b|x,y) = (1 + a<A_x> + b<B_y> + ab<A_x B_y>) / 4`.
pub fn born_box(s: &QuantumStrategy) -> Result<NsBox> {
    let rho = s.theta.density();
    let id = Matrix2::<C64>::identity();
    let a: Vec<Matrix2<C64>> = s.alice.iter().map(ProjectiveMeasurement::observable).collect();
    let b: Vec<Matrix2<C64>> = s.bob.iter().map(ProjectiveMeasurement::observable).collect();
    let ea: Vec<f64> = a.iter().map(|op| expectation(&rho, &op.kronecker(&id))).collect();
    let eb: Vec<f64> = b.iter().map(|op| expectation(&rho, &id.kronecker(op))).collect();
    let mut cc = [[0.0; 2]; 2];
    for (x, row) in cc.iter_mut().enumerate() {
        for (y, v) in row.iter_mut().enumerate() {
            let eab = expectation(&rho, &a[x].kronecker(&b[y]));
            *v = 0.25 * (1.0 + ea[x] + eb[y] + eab);
        }
    }
    NsBox::new(
        cc,
        [0.5 * (1.0 + ea[0]), 0.5 * (1.0 + ea[1])],
        [0.5 * (1.0 + eb[0]), 0.5 * (1.0 + eb[1])],
    )
}

fn check_open_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta <= FRAC_PI_4) {
        return Err(domain(format!("Schmidt angle {theta} outside (0, pi/4]")));
    }
    Ok(())
}

/// Bob's measurement angle for the optimal strategy: `tan(beta) = sin(2 theta)`.
pub fn optimal_beta(theta: f64) -> Result<f64> {
    check_open_theta(theta)?;
    Ok((2.0 * theta).sin().atan())
}

/// Alice measures `sigma_z`, `sigma_x`; Bob measures
/// `cos(beta) sigma_z +/- sin(beta) sigma_x`.
pub fn optimal_tilted_strategy(theta: f64) -> Result<QuantumStrategy> {
    let beta = optimal_beta(theta)?;
    Ok(QuantumStrategy {
        theta: SchmidtState::new(theta)?,
        alice: [
            ProjectiveMeasurement::xz(0.0),
            ProjectiveMeasurement::xz(std::f64::consts::FRAC_PI_2),
        ],
        bob: [ProjectiveMeasurement::xz(beta), ProjectiveMeasurement::xz(-beta)],
    })
}

/// Tilt parameter for which the state with Schmidt angle `theta` is optimal:
/// `2 / sqrt(1 + 2 tan^2(2 theta))`, written without the tangent so that
/// `theta = pi/4` maps to exactly zero.
pub fn zeta_from_theta(theta: f64) -> Result<f64> {
    check_open_theta(theta)?;
    let cos2 = (2.0 * (FRAC_PI_4 - theta)).sin();
    let sin2 = (2.0 * theta).sin();
    Ok(2.0 * cos2 / (1.0 + sin2 * sin2).sqrt())
}

pub fn theta_from_zeta(zeta: f64) -> Result<f64> {
    if !(0.0..2.0).contains(&zeta) {
        return Err(domain(format!("zeta = {zeta} outside [0, 2)")));
    }
    if zeta == 0.0 {
        return Ok(FRAC_PI_4);
    }
    Ok(0.5 * ((4.0 - zeta * zeta) / (2.0 * zeta * zeta)).sqrt().atan())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub m0: f64,
    pub n0: f64,
    pub chsh: f64,
}

/// `m_0`, `n_0` and CHSH of the optimal strategy at `theta`.
pub fn closed_form_components(theta: f64) -> Result<ClosedForm> {
    check_open_theta(theta)?;
    let root = (1.0 + (2.0 * theta).sin().powi(2)).sqrt();
    Ok(ClosedForm {
        m0: theta.cos().powi(2),
        n0: 0.5 * (1.0 + (2.0 * theta).cos() / root),
        chsh: (3.0 - (4.0 * theta).cos()) / root,
    })
}

/// Quantum maximum of `CHSH + 2 zeta m_0`: `sqrt(8 + 2 zeta^2) + zeta`.
pub fn tilted_quantum_max(zeta: f64) -> Result<f64> {
    if !(0.0..2.0).contains(&zeta) {
        return Err(domain(format!("zeta = {zeta} outside [0, 2)")));
    }
    Ok((8.0 + 2.0 * zeta * zeta).sqrt() + zeta)
}

/// Uniform unit vector on the sphere.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
    loop {
        let v: [f64; 3] = std::array::from_fn(|_| StandardNormal.sample(rng));
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-6 {
            return v.map(|x| x / n);
        }
    }
}

/// Random Schmidt angle in `[0, pi/4]` and random measurement directions.
pub fn random_strategy<R: Rng + ?Sized>(rng: &mut R) -> QuantumStrategy {
    let meas = |rng: &mut R| {
        let v = random_unit_vector(rng);
        // Renormalize once more so the norm check holds to the last ulp.
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        ProjectiveMeasurement::new(v.map(|x| x / n)).expect("unit vector")
    };
    QuantumStrategy {
        theta: SchmidtState::new(rng.random_range(0.0..=FRAC_PI_4)).expect("in range"),
        alice: [meas(rng), meas(rng)],
        bob: [meas(rng), meas(rng)],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ns_box::{chsh_value, is_local, tilted_chsh_value, to_table, LP_TOL};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_8, SQRT_2};

    #[test]
    fn tsirelson_point() {
        let s = QuantumStrategy {
            theta: SchmidtState::new(FRAC_PI_4).unwrap(),
            alice: [ProjectiveMeasurement::xz(0.0), ProjectiveMeasurement::xz(FRAC_PI_2)],
            bob: [
                ProjectiveMeasurement::xz(FRAC_PI_4),
                ProjectiveMeasurement::xz(-FRAC_PI_4),
            ],
        };
        let b = born_box(&s).unwrap();
        assert!((chsh_value(&b) - 2.0 * SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn alice_z_marginal() {
        for theta in [0.1, 0.3, 0.7] {
            let s = optimal_tilted_strategy(theta).unwrap();
            let b = born_box(&s).unwrap();
            assert!((b.m(0) - theta.cos().powi(2)).abs() < 1e-14);
        }
    }

    #[test]
    fn product_state_is_local() {
        let s = QuantumStrategy {
            theta: SchmidtState::new(0.0).unwrap(),
            alice: [ProjectiveMeasurement::xz(0.0), ProjectiveMeasurement::xz(FRAC_PI_2)],
            bob: [ProjectiveMeasurement::xz(0.0), ProjectiveMeasurement::xz(0.0)],
        };
        let b = born_box(&s).unwrap();
        assert!((chsh_value(&b) - 2.0).abs() < 1e-14);
        assert!(is_local(&b, LP_TOL).unwrap());
    }

    #[test]
    fn born_box_matches_projector_traces() {
        let s = QuantumStrategy {
            theta: SchmidtState::new(0.4).unwrap(),
            alice: [
                ProjectiveMeasurement::new([0.0, 0.6, 0.8]).unwrap(),
                ProjectiveMeasurement::new([1.0, 0.0, 0.0]).unwrap(),
            ],
            bob: [
                ProjectiveMeasurement::new([0.0, 1.0, 0.0]).unwrap(),
                ProjectiveMeasurement::new([0.48, 0.6, 0.64]).unwrap(),
            ],
        };
        let t = to_table(&born_box(&s).unwrap());
        for xa in 0..2 {
            for xb in 0..2 {
                for oa in 0..2 {
                    for ob in 0..2 {
                        assert!((t.get(xa, xb, oa, ob) - born_probability(&s, xa, xb, oa, ob)).abs() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn optimal_beta_values() {
        assert!((optimal_beta(FRAC_PI_4).unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert!(optimal_beta(1e-9).unwrap() < 3e-9);
        assert!((optimal_beta(FRAC_PI_8).unwrap() - 0.615_479_708_670_387_3).abs() < 1e-12);
        assert!(optimal_beta(0.0).is_err());
        assert!(optimal_beta(1.0).is_err());
    }

    #[test]
    fn zeta_theta_map() {
        assert_eq!(zeta_from_theta(FRAC_PI_4).unwrap(), 0.0);
        assert!((zeta_from_theta(FRAC_PI_8).unwrap() - 2.0 / 3f64.sqrt()).abs() < 1e-14);
        let small = zeta_from_theta(1e-6).unwrap();
        assert!(small < 2.0 && small > 2.0 - 1e-10);
        assert!(zeta_from_theta(0.0).is_err());
        assert!(zeta_from_theta(0.8).is_err());

        assert_eq!(theta_from_zeta(0.0).unwrap(), FRAC_PI_4);
        assert!((theta_from_zeta(2.0 / 3f64.sqrt()).unwrap() - FRAC_PI_8).abs() < 1e-14);
        let t = theta_from_zeta(1.9).unwrap();
        assert!(t > 0.0);
        assert!((zeta_from_theta(t).unwrap() - 1.9).abs() < 1e-12);
        assert!(theta_from_zeta(2.0).is_err());
        assert!(theta_from_zeta(-0.1).is_err());
    }

    #[test]
    fn zeta_matches_tangent_form() {
        for i in 1..785 {
            let th = i as f64 * 1e-3;
            let tan_form = 2.0 / (1.0 + 2.0 * (2.0 * th).tan().powi(2)).sqrt();
            assert!((zeta_from_theta(th).unwrap() - tan_form).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_endpoints() {
        let cf = closed_form_components(FRAC_PI_4).unwrap();
        assert!((cf.m0 - 0.5).abs() < 1e-15);
        assert!((cf.n0 - 0.5).abs() < 1e-15);
        assert!((cf.chsh - 2.0 * SQRT_2).abs() < 1e-14);
        let cf = closed_form_components(1e-9).unwrap();
        assert!((cf.m0 - 1.0).abs() < 1e-12 && (cf.n0 - 1.0).abs() < 1e-12 && (cf.chsh - 2.0).abs() < 1e-12);
        assert!(closed_form_components(0.0).is_err());
    }

    #[test]
    fn tilted_max_values() {
        assert!((tilted_quantum_max(0.0).unwrap() - 2.0 * SQRT_2).abs() < 1e-15);
        assert!((tilted_quantum_max(1.0).unwrap() - (10f64.sqrt() + 1.0)).abs() < 1e-15);
        assert!((tilted_quantum_max(2.0 - 1e-12).unwrap() - 6.0).abs() < 1e-11);
        assert!(tilted_quantum_max(2.0).is_err());
        for zeta in [0.0, 0.5, 1.0, 1.5, 1.9] {
            let s = optimal_tilted_strategy(theta_from_zeta(zeta).unwrap()).unwrap();
            let v = tilted_chsh_value(&born_box(&s).unwrap(), zeta).unwrap();
            assert!((v - tilted_quantum_max(zeta).unwrap()).abs() < 1e-9, "zeta={zeta}");
        }
    }

    #[test]
    fn measurement_validation_and_json() {
        assert!(ProjectiveMeasurement::new([1.0, 1.0, 0.0]).is_err());
        assert!(SchmidtState::new(-0.1).is_err());
        let s = optimal_tilted_strategy(0.3).unwrap();
        let js = serde_json::to_string(&s).unwrap();
        let back: QuantumStrategy = serde_json::from_str(&js).unwrap();
        assert_eq!(back, s);
        let bad = r#"{"theta":0.3,"alice":[[0,0,1],[1,0,0]],"bob":[[0,0,2],[1,0,0]]}"#;
        assert!(serde_json::from_str::<QuantumStrategy>(bad).is_err());
    }
}
