//! Independent reference implementations for the integration tests.
//!
//! The teleportation step is written out on raw arrays, and input averages
//! use the six octahedron states. `Q_j` is linear and `Q_j F_j` quadratic in
//! `|ψ⟩⟨ψ|`, and the octahedron is a spherical 2-design, so its average equals
//! the uniform-sphere average exactly. Nothing here calls the crate's
//! averaging or teleport code.

#![allow(dead_code)]

use num_complex::Complex64 as C;
use proptest::prelude::*;
use teleport_core::densmat::DensityMatrix;
use teleport_core::spin_models::HeisenbergParams;
use teleport_core::teleport::CorrectionLabel;

pub type M4 = [[C; 4]; 4];
pub type M2 = [[C; 2]; 2];

pub fn raw(rho: &DensityMatrix) -> M4 {
    let mut m = [[C::new(0.0, 0.0); 4]; 4];
    for (i, row) in m.iter_mut().enumerate() {
        for (k, x) in row.iter_mut().enumerate() {
            *x = rho.mat()[(i, k)];
        }
    }
    m
}

pub fn bell_ket(phi: f64, j: usize) -> [f64; 4] {
    let (s, c) = phi.sin_cos();
    match j {
        1 => [c, 0.0, 0.0, s],
        2 => [s, 0.0, 0.0, -c],
        3 => [0.0, c, s, 0.0],
        4 => [0.0, s, -c, 0.0],
        _ => panic!("outcome {j}"),
    }
}

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn pauli(name: &str) -> M2 {
    let (o, l, i) = (c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0));
    match name {
        "1" => [[l, o], [o, l]],
        "x" => [[o, l], [l, o]],
        "z" => [[l, o], [o, -l]],
        // z·x
        "zx" => [[o, l], [-l, o]],
        "y" => [[o, -i], [i, o]],
        _ => panic!("{name}"),
    }
}

/// Correction applied by Bob after outcome `j`.
pub fn correction(label: CorrectionLabel, j: usize) -> M2 {
    let table = match label {
        CorrectionLabel::PhiPlus => ["1", "z", "x", "zx"],
        CorrectionLabel::PhiMinus => ["z", "1", "zx", "x"],
        CorrectionLabel::PsiPlus => ["x", "zx", "1", "z"],
        CorrectionLabel::PsiMinus => ["zx", "x", "z", "1"],
    };
    pauli(table[j - 1])
}

/// Bob's unnormalized state `⟨B_j|(|ψ⟩⟨ψ| ⊗ ρ)|B_j⟩` with qubits ordered
/// (input, Alice, Bob).
pub fn bob_state(psi: [C; 2], rho: &M4, phi: f64, j: usize) -> M2 {
    let b = bell_ket(phi, j);
    let mut out = [[c(0.0, 0.0); 2]; 2];
    for (k, row) in out.iter_mut().enumerate() {
        for (l, x) in row.iter_mut().enumerate() {
            for a in 0..2 {
                for bb in 0..2 {
                    for cc in 0..2 {
                        for d in 0..2 {
                            let w = b[2 * a + bb] * b[2 * cc + d];
                            if w != 0.0 {
                                *x += psi[a] * psi[cc].conj() * rho[2 * bb + k][2 * d + l] * w;
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// `(Q_j, Q_j F_j)` for one input.
pub fn branch(psi: [C; 2], rho: &M4, phi: f64, j: usize, label: CorrectionLabel) -> (f64, f64) {
    let s = bob_state(psi, rho, phi, j);
    let q = (s[0][0] + s[1][1]).re;
    let u = correction(label, j);
    // v = U† ψ, then ⟨v|σ|v⟩ = ⟨ψ|UσU†|ψ⟩
    let v = [
        u[0][0].conj() * psi[0] + u[1][0].conj() * psi[1],
        u[0][1].conj() * psi[0] + u[1][1].conj() * psi[1],
    ];
    let mut qf = c(0.0, 0.0);
    for k in 0..2 {
        for l in 0..2 {
            qf += v[k].conj() * s[k][l] * v[l];
        }
    }
    (q, qf.re)
}

pub fn octahedron() -> [[C; 2]; 6] {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    [
        [c(1.0, 0.0), c(0.0, 0.0)],
        [c(0.0, 0.0), c(1.0, 0.0)],
        [c(r, 0.0), c(r, 0.0)],
        [c(r, 0.0), c(-r, 0.0)],
        [c(r, 0.0), c(0.0, r)],
        [c(r, 0.0), c(0.0, -r)],
    ]
}

/// Input-averaged `Q̄_j` and `∫ Q_j F_j^ε`, indexed like the crate's
/// `AveragedQuantities` (`[j−1]`, `[j−1][ε]`).
pub struct DesignAverages {
    pub qbar: [f64; 4],
    pub joint: [[f64; 4]; 4],
}

impl DesignAverages {
    pub fn new(rho: &DensityMatrix, phi: f64) -> Self {
        let m = raw(rho);
        let mut qbar = [0.0; 4];
        let mut joint = [[0.0; 4]; 4];
        let states = octahedron();
        let w = 1.0 / states.len() as f64;
        for psi in states {
            for j in 1..=4 {
                for label in CorrectionLabel::ALL {
                    let (q, qf) = branch(psi, &m, phi, j, label);
                    if label == CorrectionLabel::PhiPlus {
                        qbar[j - 1] += w * q;
                    }
                    joint[j - 1][label.index()] += w * qf;
                }
            }
        }
        Self { qbar, joint }
    }

    pub fn deterministic(&self, label: CorrectionLabel) -> f64 {
        (0..4).map(|j| self.joint[j][label.index()]).sum()
    }

    pub fn conditional(&self, j: usize, label: CorrectionLabel) -> f64 {
        self.joint[j - 1][label.index()] / self.qbar[j - 1]
    }
}

pub fn params_strategy(j_max: f64, h_max: f64) -> impl Strategy<Value = HeisenbergParams> {
    (
        -j_max..=j_max,
        -j_max..=j_max,
        -j_max..=j_max,
        -h_max..=h_max,
        -h_max..=h_max,
    )
        .prop_map(|(jx, jy, jz, ha, hb)| HeisenbergParams::new(jx, jy, jz, ha, hb).unwrap())
}

pub fn no_field_strategy(j_max: f64) -> impl Strategy<Value = HeisenbergParams> {
    (-j_max..=j_max, -j_max..=j_max, -j_max..=j_max)
        .prop_map(|(jx, jy, jz)| HeisenbergParams::new(jx, jy, jz, 0.0, 0.0).unwrap())
}

pub fn label_strategy() -> impl Strategy<Value = CorrectionLabel> {
    prop::sample::select(CorrectionLabel::ALL.to_vec())
}
