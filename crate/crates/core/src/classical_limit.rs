//! Separable channels and the 2/3 ceiling on their average fidelity.
//!
//! A separable channel `Σ p_k ρ^A_k ⊗ ρ^B_k` is stored through the Bloch
//! vectors of its factors. Its averaged fidelities are convex combinations
//! of product-state values, each at most 2/3.

use std::f64::consts::FRAC_PI_4;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::averaging::{OracleProfile, QuadratureGrid};
use crate::densmat::{kron, pauli, CMatrix, DensityMatrix};
use crate::error::{Error, Result};
use crate::teleport::{CorrectionLabel, Family};

pub const CLASSICAL_LIMIT: f64 = 2.0 / 3.0;
const BLOCH_TOL: f64 = 1e-12;
pub const MIN_BOUND_SAMPLES: usize = 1000;
pub const MAX_TERMS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub ax: f64,
    pub ay: f64,
    pub az: f64,
}

impl BlochVector {
    pub fn new(ax: f64, ay: f64, az: f64) -> Result<Self> {
        let v = Self { ax, ay, az };
        if !(v.norm_sq() <= 1.0 + BLOCH_TOL) {
            return Err(Error::InvalidInput(format!(
                "Bloch vector ({ax}, {ay}, {az}) lies outside the unit ball"
            )));
        }
        Ok(v)
    }

    pub fn zero() -> Self {
        Self { ax: 0.0, ay: 0.0, az: 0.0 }
    }

    pub fn norm_sq(&self) -> f64 {
        self.ax * self.ax + self.ay * self.ay + self.az * self.az
    }

    /// `(1 + a·σ)/2`
    pub fn density(&self) -> DensityMatrix {
        let m = &(&pauli::identity() + &pauli::x().scale_real(self.ax))
            + &(&pauli::y().scale_real(self.ay) + &pauli::z().scale_real(self.az));
        DensityMatrix::new_trusted(m.scale_real(0.5))
    }

    /// `a_i = Tr[σ_i ρ]`
    pub fn from_density(rho: &DensityMatrix) -> Result<Self> {
        if rho.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: rho.dim(),
            });
        }
        let t = |s: CMatrix| (&s * rho.mat()).trace().re;
        Self::new(t(pauli::x()), t(pauli::y()), t(pauli::z()))
    }

    /// Uniform in the solid unit ball.
    pub fn random_in_ball<R: Rng>(rng: &mut R) -> Self {
        loop {
            let v = Self {
                ax: rng.gen_range(-1.0..=1.0),
                ay: rng.gen_range(-1.0..=1.0),
                az: rng.gen_range(-1.0..=1.0),
            };
            if v.norm_sq() <= 1.0 {
                return v;
            }
        }
    }

    /// Uniform on the unit sphere (pure states).
    pub fn random_pure<R: Rng>(rng: &mut R) -> Self {
        loop {
            let v = Self::random_in_ball(rng);
            let n = v.norm_sq().sqrt();
            if n > 1e-3 {
                return Self {
                    ax: v.ax / n,
                    ay: v.ay / n,
                    az: v.az / n,
                };
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparableTerm {
    pub weight: f64,
    pub a: BlochVector,
    pub b: BlochVector,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparableChannel {
    terms: Vec<SeparableTerm>,
}

impl SeparableChannel {
    pub fn new(terms: Vec<SeparableTerm>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidInput("separable channel needs at least one term".into()));
        }
        if terms.iter().any(|t| !(0.0..=1.0).contains(&t.weight)) {
            return Err(Error::InvalidInput("separable weights must lie in [0, 1]".into()));
        }
        let total: f64 = terms.iter().map(|t| t.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("separable weights sum to {total}, not 1")));
        }
        Ok(Self { terms })
    }

    pub fn product(a: BlochVector, b: BlochVector) -> Self {
        Self {
            terms: vec![SeparableTerm { weight: 1.0, a, b }],
        }
    }

    pub fn terms(&self) -> &[SeparableTerm] {
        &self.terms
    }

    pub fn density(&self) -> Result<DensityMatrix> {
        let mut m = CMatrix::zeros(4)?;
        for t in &self.terms {
            let prod = kron(t.a.density().mat(), t.b.density().mat())?;
            m = &m + &prod.scale_real(t.weight);
        }
        DensityMatrix::new(m)
    }

    /// `n ∈ 1..=4` terms, flat Dirichlet weights, Bloch vectors uniform in
    /// the ball, or on the sphere when `pure` is set.
    pub fn random<R: Rng>(rng: &mut R, pure: bool) -> Self {
        let n = rng.gen_range(1..=MAX_TERMS);
        let raw: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
        let total: f64 = raw.iter().sum();
        let draw = |rng: &mut R| {
            if pure {
                BlochVector::random_pure(rng)
            } else {
                BlochVector::random_in_ball(rng)
            }
        };
        let terms = raw
            .iter()
            .map(|w| SeparableTerm {
                weight: w / total,
                a: draw(rng),
                b: draw(rng),
            })
            .collect();
        Self { terms }
    }
}

/// Averaged deterministic fidelity of a product channel `ρ^A ⊗ ρ^B` with
/// correction set `label` at angle `phi`:
/// `[3 + a_z b_z ± (a_x b_x − a_y b_y) sin2φ]/6` for the Φ± sets and
/// `[3 − a_z b_z ± (a_x b_x + a_y b_y) sin2φ]/6` for Ψ±.
pub fn product_avg_fidelity(a: &BlochVector, b: &BlochVector, label: CorrectionLabel, phi: f64) -> f64 {
    let sign = if label.is_plus() { 1.0 } else { -1.0 };
    let s = (2.0 * phi).sin();
    match label.family() {
        Family::Phi => (3.0 + a.az * b.az + sign * (a.ax * b.ax - a.ay * b.ay) * s) / 6.0,
        Family::Psi => (3.0 - a.az * b.az + sign * (a.ax * b.ax + a.ay * b.ay) * s) / 6.0,
    }
}

/// Maximum of `product_avg_fidelity` over sets and angles.
pub fn product_opt_fidelity(a: &BlochVector, b: &BlochVector) -> f64 {
    let phi = (3.0 + a.az * b.az + (a.ax * b.ax - a.ay * b.ay).abs()) / 6.0;
    let psi = (3.0 - a.az * b.az + (a.ax * b.ax + a.ay * b.ay).abs()) / 6.0;
    phi.max(psi)
}

/// Oracle deterministic optimum over all sets and `φ ∈ [0, π]`.
pub fn oracle_det_optimum(channel: &DensityMatrix, grid: &QuadratureGrid) -> Result<f64> {
    Ok(OracleProfile::build(channel, grid)?.det_optimum().value)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassicalBoundReport {
    pub samples: usize,
    pub seed: u64,
    pub grid: (usize, usize),
    pub max_fidelity: f64,
    pub max_channel: SeparableChannel,
    /// `a = b = (0, 0, 1)`; expected to sit exactly on 2/3.
    pub saturating_value: f64,
    /// The singlet, which is not separable; expected to reach 1.
    pub entangled_control_value: f64,
    pub bound_holds: bool,
}

/// Grid used for the bound check. The integrands are exact on it; see
/// `averaging`.
pub fn bound_grid() -> QuadratureGrid {
    QuadratureGrid::new(crate::averaging::MIN_NODES, crate::averaging::MIN_NODES).expect("minimum grid")
}

/// Draws `samples` random separable channels (every fourth with pure
/// factors), plus fixed corner cases, and returns the largest oracle
/// deterministic optimum.
pub fn verify_classical_bound(samples: usize, seed: u64) -> Result<ClassicalBoundReport> {
    if samples < MIN_BOUND_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "classical bound check needs at least {MIN_BOUND_SAMPLES} samples (got {samples})"
        )));
    }
    let grid = bound_grid();
    let up = BlochVector::new(0.0, 0.0, 1.0)?;
    let down = BlochVector::new(0.0, 0.0, -1.0)?;
    let saturating = SeparableChannel::product(up, up);
    let mut fixed = vec![
        saturating.clone(),
        SeparableChannel::product(up, down),
        SeparableChannel::product(BlochVector::zero(), BlochVector::zero()),
        SeparableChannel::new(vec![
            SeparableTerm { weight: 0.5, a: up, b: up },
            SeparableTerm { weight: 0.5, a: down, b: down },
        ])?,
    ];
    let x = BlochVector::new(1.0, 0.0, 0.0)?;
    fixed.push(SeparableChannel::product(x, x));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = (f64::NEG_INFINITY, saturating.clone());
    let mut saturating_value = f64::NAN;
    for (i, ch) in fixed
        .into_iter()
        .map(Ok)
        .chain((0..samples).map(|i| Ok::<_, Error>(SeparableChannel::random(&mut rng, i % 4 == 0))))
        .enumerate()
    {
        let ch = ch?;
        let v = oracle_det_optimum(&ch.density()?, &grid)?;
        if i == 0 {
            saturating_value = v;
        }
        if v > best.0 {
            best = (v, ch);
        }
    }

    let singlet = DensityMatrix::from_pure(&CorrectionLabel::PsiMinus.bell_ket())?;
    let entangled_control_value = oracle_det_optimum(&singlet, &grid)?;
    Ok(ClassicalBoundReport {
        samples,
        seed,
        grid: (grid.n_alpha(), grid.n_gamma()),
        max_fidelity: best.0,
        max_channel: best.1,
        saturating_value,
        entangled_control_value,
        bound_holds: best.0 <= CLASSICAL_LIMIT + 1e-9,
    })
}

/// `⟨F̄⟩` of the standard protocol for a product channel; a convenience for
/// checking the closed form at `φ = π/4`.
pub fn product_standard_fidelity(a: &BlochVector, b: &BlochVector, label: CorrectionLabel) -> f64 {
    product_avg_fidelity(a, b, label, FRAC_PI_4)
}
