//! Two-party, two-input, two-output no-signaling boxes.
//!
//! A box is stored by its eight canonical parameters: `c[x][y] = P(++|xy)`,
//! Alice's marginals `m[x] = P(o_A=+1|x)` and Bob's `n[y] = P(o_B=+1|y)`.
//! Output bit 0 is outcome +1 and bit 1 is outcome -1 everywhere.

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::lp;

/// Entry-range tolerance for box validity.
pub const VALIDITY_TOL: f64 = 1e-12;
/// No-signaling tolerance when reading a full table.
pub const NS_TOL: f64 = 1e-9;
/// Slack accepted by the local-membership feasibility solve.
pub const LP_TOL: f64 = 1e-9;

/// `+1` for bit 0, `-1` for bit 1.
pub fn outcome_sign(bit: usize) -> f64 {
    if bit == 0 {
        1.0
    } else {
        -1.0
    }
}

/// The sixteen numbers `P(o_A, o_B | x_A, x_B)`, row `2*x_A + x_B`,
/// column `2*o_A + o_B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FullTable(pub [f64; 16]);

impl FullTable {
    pub fn get(&self, xa: usize, xb: usize, oa: usize, ob: usize) -> f64 {
        self.0[(2 * xa + xb) * 4 + 2 * oa + ob]
    }

    /// Positivity and per-input normalization.
    pub fn validate(&self) -> Result<()> {
        for (i, &p) in self.0.iter().enumerate() {
            if !p.is_finite() || p < -VALIDITY_TOL {
                return Err(Error::InvalidDistribution(format!("table entry {i} = {p}")));
            }
        }
        for row in 0..4 {
            let s: f64 = self.0[row * 4..row * 4 + 4].iter().sum();
            if (s - 1.0).abs() > VALIDITY_TOL {
                return Err(Error::InvalidDistribution(format!(
                    "row (x_A={}, x_B={}) sums to {s}",
                    row / 2,
                    row % 2
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BoxFile", into = "BoxFile")]
pub struct NsBox {
    c: [[f64; 2]; 2],
    m: [f64; 2],
    n: [f64; 2],
}

impl NsBox {
    pub fn new(c: [[f64; 2]; 2], m: [f64; 2], n: [f64; 2]) -> Result<Self> {
        let b = Self { c, m, n };
        for xa in 0..2 {
            for xb in 0..2 {
                for oa in 0..2 {
                    for ob in 0..2 {
                        let p = b.entry(xa, xb, oa, ob);
                        if !p.is_finite() || !(-VALIDITY_TOL..=1.0 + VALIDITY_TOL).contains(&p) {
                            return Err(Error::InvalidDistribution(format!(
                                "P({}{}|{}{}) = {p} outside [0,1]",
                                sign_char(oa),
                                sign_char(ob),
                                xa,
                                xb
                            )));
                        }
                    }
                }
            }
        }
        Ok(b)
    }

    pub fn c(&self, xa: usize, xb: usize) -> f64 {
        self.c[xa][xb]
    }

    pub fn m(&self, xa: usize) -> f64 {
        self.m[xa]
    }

    pub fn n(&self, xb: usize) -> f64 {
        self.n[xb]
    }

    /// One cell of the canonical 4x4 matrix.
    pub fn entry(&self, xa: usize, xb: usize, oa: usize, ob: usize) -> f64 {
        let (c, m, n) = (self.c[xa][xb], self.m[xa], self.n[xb]);
        match (oa, ob) {
            (0, 0) => c,
            (0, _) => m - c,
            (_, 0) => n - c,
            _ => 1.0 - m - n + c,
        }
    }

    /// Uniformly random outputs for every input.
    pub fn uniform_noise() -> Self {
        Self {
            c: [[0.25; 2]; 2],
            m: [0.5; 2],
            n: [0.5; 2],
        }
    }
}

fn sign_char(bit: usize) -> char {
    if bit == 0 {
        '+'
    } else {
        '-'
    }
}

pub fn to_table(b: &NsBox) -> FullTable {
    let mut t = [0.0; 16];
    for xa in 0..2 {
        for xb in 0..2 {
            for oa in 0..2 {
                for ob in 0..2 {
                    t[(2 * xa + xb) * 4 + 2 * oa + ob] = b.entry(xa, xb, oa, ob);
                }
            }
        }
    }
    FullTable(t)
}

pub fn from_table(table: &FullTable) -> Result<NsBox> {
    table.validate()?;
    let t = |xa, xb, oa, ob| table.get(xa, xb, oa, ob);
    let alice_plus = |xa, xb| t(xa, xb, 0, 0) + t(xa, xb, 0, 1);
    let bob_plus = |xa, xb| t(xa, xb, 0, 0) + t(xa, xb, 1, 0);

    let mut worst = (String::new(), 0.0_f64);
    for x in 0..2 {
        let da = (alice_plus(x, 0) - alice_plus(x, 1)).abs();
        if da > worst.1 {
            worst = (format!("P(o_A=+1|x_A={x}) across x_B"), da);
        }
        let db = (bob_plus(0, x) - bob_plus(1, x)).abs();
        if db > worst.1 {
            worst = (format!("P(o_B=+1|x_B={x}) across x_A"), db);
        }
    }
    if worst.1 > NS_TOL {
        return Err(Error::NotNoSignaling {
            marginal: worst.0,
            violation: worst.1,
        });
    }

    NsBox::new(
        [[t(0, 0, 0, 0), t(0, 1, 0, 0)], [t(1, 0, 0, 0), t(1, 1, 0, 0)]],
        [alice_plus(0, 0), alice_plus(1, 0)],
        [bob_plus(0, 0), bob_plus(0, 1)],
    )
}

/// Deterministic box `o_A = alpha*x_A xor beta`, `o_B = gamma*x_B xor delta`.
pub fn local_vertex(alpha: bool, beta: bool, gamma: bool, delta: bool) -> NsBox {
    let oa = |x: usize| ((alpha as usize) * x) ^ (beta as usize);
    let ob = |y: usize| ((gamma as usize) * y) ^ (delta as usize);
    let ind = |b: bool| if b { 1.0 } else { 0.0 };
    let mut c = [[0.0; 2]; 2];
    for (x, row) in c.iter_mut().enumerate() {
        for (y, v) in row.iter_mut().enumerate() {
            *v = ind(oa(x) == 0 && ob(y) == 0);
        }
    }
    NsBox {
        c,
        m: [ind(oa(0) == 0), ind(oa(1) == 0)],
        n: [ind(ob(0) == 0), ind(ob(1) == 0)],
    }
}

/// Extremal nonlocal box: `o_A xor o_B = x_A x_B xor alpha x_A xor beta x_B xor gamma`
/// with uniform marginals.
pub fn pr_vertex(alpha: bool, beta: bool, gamma: bool) -> NsBox {
    let mut c = [[0.0; 2]; 2];
    for (x, row) in c.iter_mut().enumerate() {
        for (y, v) in row.iter_mut().enumerate() {
            let parity = (x & y) ^ ((alpha as usize) & x) ^ ((beta as usize) & y) ^ (gamma as usize);
            *v = if parity == 0 { 0.5 } else { 0.0 };
        }
    }
    NsBox {
        c,
        m: [0.5; 2],
        n: [0.5; 2],
    }
}

fn bits<const N: usize>(k: usize) -> [bool; N] {
    std::array::from_fn(|i| (k >> (N - 1 - i)) & 1 == 1)
}

/// The 16 deterministic boxes, `(alpha, beta, gamma, delta)` in lexicographic order.
pub fn local_vertices() -> Vec<NsBox> {
    (0..16)
        .map(|k| {
            let [a, b, c, d] = bits::<4>(k);
            local_vertex(a, b, c, d)
        })
        .collect()
}

/// The 8 PR-type boxes, `(alpha, beta, gamma)` in lexicographic order.
pub fn pr_vertices() -> Vec<NsBox> {
    (0..8)
        .map(|k| {
            let [a, b, c] = bits::<3>(k);
            pr_vertex(a, b, c)
        })
        .collect()
}

/// All 24 extremal points, local ones first.
pub fn all_vertices() -> Vec<NsBox> {
    let mut v = local_vertices();
    v.extend(pr_vertices());
    v
}

/// `sum o_A o_B P(o_A, o_B | x_A, x_B)`, summed over the table entries.
pub fn correlator(b: &NsBox, xa: usize, xb: usize) -> f64 {
    let mut e = 0.0;
    for oa in 0..2 {
        for ob in 0..2 {
            e += outcome_sign(oa) * outcome_sign(ob) * b.entry(xa, xb, oa, ob);
        }
    }
    e
}

/// `E00 + E01 + E10 - E11` from the correlators.
pub fn chsh_value(b: &NsBox) -> f64 {
    chsh_variant(b, false, false, false)
}

/// CHSH written directly in the canonical parameters.
pub fn chsh_from_canonical(b: &NsBox) -> f64 {
    4.0 * (b.c[0][0] + b.c[0][1] + b.c[1][0] - b.c[1][1] - b.m[0] - b.n[0] + 0.5)
}

/// One of the eight relabelings of CHSH:
/// `sum_{xy} (-1)^(xy xor alpha x xor beta y xor gamma) E_xy`.
pub fn chsh_variant(b: &NsBox, alpha: bool, beta: bool, gamma: bool) -> f64 {
    let mut s = 0.0;
    for x in 0..2 {
        for y in 0..2 {
            let parity = (x & y) ^ ((alpha as usize) & x) ^ ((beta as usize) & y) ^ (gamma as usize);
            s += outcome_sign(parity) * correlator(b, x, y);
        }
    }
    s
}

fn check_zeta(zeta: f64) -> Result<()> {
    if !(0.0..2.0).contains(&zeta) {
        return Err(domain(format!("zeta = {zeta} outside [0, 2)")));
    }
    Ok(())
}

/// `CHSH + 2 zeta m_0`.
pub fn tilted_chsh_value(b: &NsBox, zeta: f64) -> Result<f64> {
    check_zeta(zeta)?;
    Ok(chsh_value(b) + 2.0 * zeta * b.m[0])
}

/// Positive affine image `k1 * value + k2` of a Bell expression. It keeps
/// the maximizers of the original expression.
pub fn affine_bell(value: f64, k1: f64, k2: f64) -> Result<f64> {
    if k1.is_nan() || k1 <= 0.0 {
        return Err(domain(format!("K1 = {k1} must be positive")));
    }
    Ok(k1 * value + k2)
}

fn canonical_vector(b: &NsBox) -> [f64; 8] {
    [
        b.c[0][0], b.c[0][1], b.c[1][0], b.c[1][1], b.m[0], b.m[1], b.n[0], b.n[1],
    ]
}

/// Weights over [`local_vertices`] reproducing `b`, if it lies in the local
/// polytope up to `tol`.
pub fn local_decomposition(b: &NsBox, tol: f64) -> Result<Option<Vec<f64>>> {
    let verts: Vec<[f64; 8]> = local_vertices().iter().map(canonical_vector).collect();
    let target = canonical_vector(b);
    let mut a: Vec<Vec<f64>> = (0..8).map(|k| verts.iter().map(|v| v[k]).collect()).collect();
    a.push(vec![1.0; verts.len()]);
    let mut rhs = target.to_vec();
    rhs.push(1.0);
    let r = lp::nonnegative_solution(&a, &rhs, tol)?;
    Ok(r.feasible.then_some(r.solution))
}

pub fn is_local(b: &NsBox, tol: f64) -> Result<bool> {
    Ok(local_decomposition(b, tol)?.is_some())
}

/// Convex combination of boxes.
pub fn mix(boxes: &[NsBox], weights: &[f64]) -> Result<NsBox> {
    if boxes.len() != weights.len() || boxes.is_empty() {
        return Err(domain(format!("{} boxes but {} weights", boxes.len(), weights.len())));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(domain("mixing weights must be nonnegative"));
    }
    let s: f64 = weights.iter().sum();
    if (s - 1.0).abs() > VALIDITY_TOL {
        return Err(domain(format!("mixing weights sum to {s}")));
    }
    let mut acc = [0.0; 8];
    for (b, w) in boxes.iter().zip(weights) {
        for (a, v) in acc.iter_mut().zip(canonical_vector(b)) {
            *a += w * v;
        }
    }
    NsBox::new([[acc[0], acc[1]], [acc[2], acc[3]]], [acc[4], acc[5]], [acc[6], acc[7]])
}

/// Dirichlet(1,...,1) mixture of the 24 vertices. Uniform on the simplex of
/// vertex weights, not on the polytope itself.
pub fn random_box<R: Rng + ?Sized>(rng: &mut R) -> NsBox {
    let raw: Vec<f64> = (0..24).map(|_| Exp1.sample(rng)).collect();
    let total: f64 = raw.iter().sum();
    let mut w: Vec<f64> = raw.iter().map(|x| x / total).collect();
    // Put the rounding residue on the largest weight so the sum is 1 to the ulp.
    let residue = 1.0 - w.iter().sum::<f64>();
    let imax = (0..24).max_by(|&i, &j| w[i].total_cmp(&w[j])).unwrap_or(0);
    w[imax] += residue;
    mix(&all_vertices(), &w).expect("convex mixture of vertices is a valid box")
}

/// On-disk box: either the eight canonical numbers or the full table.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoxFile {
    Canonical { canonical: CanonicalParams },
    Table { table: Vec<f64> },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CanonicalParams {
    pub c00: f64,
    pub c01: f64,
    pub c10: f64,
    pub c11: f64,
    pub m0: f64,
    pub m1: f64,
    pub n0: f64,
    pub n1: f64,
}

impl TryFrom<BoxFile> for NsBox {
    type Error = Error;

    fn try_from(f: BoxFile) -> Result<Self> {
        match f {
            BoxFile::Canonical { canonical: p } => {
                NsBox::new([[p.c00, p.c01], [p.c10, p.c11]], [p.m0, p.m1], [p.n0, p.n1])
            }
            BoxFile::Table { table } => {
                let arr: [f64; 16] = table.as_slice().try_into().map_err(|_| {
                    Error::DimensionMismatch(format!("box table has {} entries, expected 16", table.len()))
                })?;
                from_table(&FullTable(arr))
            }
        }
    }
}

impl From<NsBox> for BoxFile {
    fn from(b: NsBox) -> Self {
        BoxFile::Canonical {
            canonical: CanonicalParams {
                c00: b.c[0][0],
                c01: b.c[0][1],
                c10: b.c[1][0],
                c11: b.c[1][1],
                m0: b.m[0],
                m1: b.m[1],
                n0: b.n[0],
                n1: b.n[1],
            },
        }
    }
}
