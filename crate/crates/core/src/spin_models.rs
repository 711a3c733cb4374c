//! Two-qubit Heisenberg Hamiltonians and their Gibbs states.
//!
//! The general model is
//! `H = jx σx⊗σx + jy σy⊗σy + jz σz⊗σz + ha σz⊗1 + hb 1⊗σz`.
//! It never mixes the even-parity block {|00⟩, |11⟩} with the odd-parity
//! block {|01⟩, |10⟩}, so each block is a real symmetric 2×2 problem:
//!
//! * even block `[[jz + Σh, Δj], [Δj, jz − Σh]]`, energies `jz ± η`
//! * odd block `[[−jz + Δh, Σj], [Σj, −jz − Δh]]`, energies `−jz ± χ`
//!
//! Temperatures are always the dimensionless product `kT` with `k = 1`.

use serde::{Deserialize, Serialize};

use crate::densmat::{kron, pauli, CMatrix, DensityMatrix, C64};
use crate::error::{Error, Result};

/// Literature value of the infinite-order transition point of the XXZ model
/// at `J = 1`, `h = 4`. Stored for labeling only; it is not computed here.
pub const XXZ_INFINITE_ORDER_POINT_J1_H4: f64 = 2.74;

const XXX_CROSSING_BRACKET: (f64, f64) = (1e-6, 10.0);
const XXZ_CROSSING_BRACKET: (f64, f64) = (-5.0, 5.0);
const CROSSING_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergParams {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    pub ha: f64,
    pub hb: f64,
}

impl HeisenbergParams {
    pub fn new(jx: f64, jy: f64, jz: f64, ha: f64, hb: f64) -> Result<Self> {
        let p = Self { jx, jy, jz, ha, hb };
        if [jx, jy, jz, ha, hb].iter().all(|v| v.is_finite()) {
            Ok(p)
        } else {
            Err(Error::InvalidInput(format!("non-finite coupling in {p:?}")))
        }
    }

    pub fn zero() -> Self {
        Self {
            jx: 0.0,
            jy: 0.0,
            jz: 0.0,
            ha: 0.0,
            hb: 0.0,
        }
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.jx, self.jy, self.jz, self.ha, self.hb]
    }

    pub fn has_field(&self) -> bool {
        self.ha != 0.0 || self.hb != 0.0
    }

    pub fn derived(&self) -> DerivedParams {
        DerivedParams::from(self)
    }
}

/// Sector combinations of the couplings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub delta_j: f64,
    pub sigma_j: f64,
    pub delta_h: f64,
    pub sigma_h: f64,
    /// Half-gap of the even-parity block.
    pub eta: f64,
    /// Half-gap of the odd-parity block.
    pub chi: f64,
}

impl From<&HeisenbergParams> for DerivedParams {
    fn from(p: &HeisenbergParams) -> Self {
        let delta_j = p.jx - p.jy;
        let sigma_j = p.jx + p.jy;
        let delta_h = p.ha - p.hb;
        let sigma_h = p.ha + p.hb;
        Self {
            delta_j,
            sigma_j,
            delta_h,
            sigma_h,
            eta: delta_j.hypot(sigma_h),
            chi: delta_h.hypot(sigma_j),
        }
    }
}

/// `H = −λ[(1+ζ) σxσx + (1−ζ) σyσy] − σz⊗1 − 1⊗σz`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XYFieldParams {
    pub lambda: f64,
    pub zeta: f64,
}

impl XYFieldParams {
    pub fn new(lambda: f64, zeta: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidInput(format!(
                "lambda must be finite and >= 0 (got {lambda})"
            )));
        }
        if !(zeta.is_finite() && (-1.0..=1.0).contains(&zeta)) {
            return Err(Error::InvalidInput(format!(
                "zeta must lie in [-1, 1] (got {zeta})"
            )));
        }
        Ok(Self { lambda, zeta })
    }
}

/// `H = 2J[σxσx + σyσy + Δ σzσz] − (h/2)(σz⊗1 + 1⊗σz)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct XXZFieldParams {
    pub exchange_j: f64,
    pub delta: f64,
    pub field_h: f64,
}

impl XXZFieldParams {
    pub fn new(exchange_j: f64, delta: f64, field_h: f64) -> Result<Self> {
        if [exchange_j, delta, field_h].iter().all(|v| v.is_finite()) {
            Ok(Self {
                exchange_j,
                delta,
                field_h,
            })
        } else {
            Err(Error::InvalidInput("non-finite XXZ parameter".into()))
        }
    }
}

pub fn from_xy_field(q: XYFieldParams) -> HeisenbergParams {
    HeisenbergParams {
        jx: -q.lambda * (1.0 + q.zeta),
        jy: -q.lambda * (1.0 - q.zeta),
        jz: 0.0,
        ha: -1.0,
        hb: -1.0,
    }
}

pub fn from_xxz_field(q: XXZFieldParams) -> HeisenbergParams {
    HeisenbergParams {
        jx: 2.0 * q.exchange_j,
        jy: 2.0 * q.exchange_j,
        jz: 2.0 * q.exchange_j * q.delta,
        ha: -q.field_h / 2.0,
        hb: -q.field_h / 2.0,
    }
}

pub fn build_hamiltonian(p: &HeisenbergParams) -> CMatrix {
    let i2 = pauli::identity();
    let (x, y, z) = (pauli::x(), pauli::y(), pauli::z());
    let k = |a: &CMatrix, b: &CMatrix| kron(a, b).expect("2x2 ⊗ 2x2 fits");
    let terms = [
        (p.jx, k(&x, &x)),
        (p.jy, k(&y, &y)),
        (p.jz, k(&z, &z)),
        (p.ha, k(&z, &i2)),
        (p.hb, k(&i2, &z)),
    ];
    let mut h = CMatrix::zeros(4).expect("4 is supported");
    for (c, m) in &terms {
        if *c != 0.0 {
            h = &h + &m.scale_real(*c);
        }
    }
    h
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sector {
    /// {|00⟩, |11⟩}
    Even,
    /// {|01⟩, |10⟩}
    Odd,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub energy: f64,
    pub sector: Sector,
    /// Real amplitudes in the computational basis |00⟩, |01⟩, |10⟩, |11⟩.
    pub vector: [f64; 4],
}

impl EigenPair {
    pub fn ket(&self) -> Vec<C64> {
        self.vector.iter().map(|&v| C64::new(v, 0.0)).collect()
    }
}

/// Eigenpairs of the two parity blocks.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockSpectrum {
    /// `[jz + η, jz − η]`
    pub even: [EigenPair; 2],
    /// `[−jz + χ, −jz − χ]`
    pub odd: [EigenPair; 2],
}

impl BlockSpectrum {
    pub fn pairs(&self) -> impl Iterator<Item = &EigenPair> {
        self.even.iter().chain(self.odd.iter())
    }

    /// All four pairs in ascending energy.
    pub fn sorted(&self) -> Vec<EigenPair> {
        let mut v: Vec<EigenPair> = self.pairs().cloned().collect();
        v.sort_by(|a, b| a.energy.total_cmp(&b.energy));
        v
    }

    pub fn ground(&self) -> EigenPair {
        self.sorted().swap_remove(0)
    }

    pub fn sector_ground(&self, sector: Sector) -> f64 {
        match sector {
            Sector::Even => self.even[1].energy,
            Sector::Odd => self.odd[1].energy,
        }
    }
}

/// Diagonalizes `[[c + d, b], [b, c − d]]`, returning `(+r, −r)` vectors
/// as `(cos θ, sin θ)` and `(−sin θ, cos θ)` with `tan 2θ = b/d`.
fn block_2x2(b: f64, d: f64) -> (f64, [f64; 2], [f64; 2]) {
    let r = b.hypot(d);
    let theta = 0.5 * b.atan2(d);
    let (s, c) = theta.sin_cos();
    (r, [c, s], [-s, c])
}

pub fn block_spectrum(p: &HeisenbergParams) -> BlockSpectrum {
    let d = p.derived();
    let (eta, up, down) = block_2x2(d.delta_j, d.sigma_h);
    let even = [
        EigenPair {
            energy: p.jz + eta,
            sector: Sector::Even,
            vector: [up[0], 0.0, 0.0, up[1]],
        },
        EigenPair {
            energy: p.jz - eta,
            sector: Sector::Even,
            vector: [down[0], 0.0, 0.0, down[1]],
        },
    ];
    let (chi, up, down) = block_2x2(d.sigma_j, d.delta_h);
    let odd = [
        EigenPair {
            energy: -p.jz + chi,
            sector: Sector::Odd,
            vector: [0.0, up[0], up[1], 0.0],
        },
        EigenPair {
            energy: -p.jz - chi,
            sector: Sector::Odd,
            vector: [0.0, down[0], down[1], 0.0],
        },
    ];
    BlockSpectrum { even, odd }
}

#[derive(Clone, Debug)]
pub struct ThermalState {
    pub rho: DensityMatrix,
    /// `Σ e^{−β(E − E₀)}` with `E₀` the ground energy.
    pub partition_z: f64,
    pub ground_energy: f64,
    pub beta: f64,
    pub params: HeisenbergParams,
}

impl ThermalState {
    pub fn kt(&self) -> f64 {
        1.0 / self.beta
    }

    /// `ln Tr e^{−βH}`.
    pub fn log_partition(&self) -> f64 {
        self.partition_z.ln() - self.beta * self.ground_energy
    }
}

fn beta_from_kt(kt: f64) -> Result<f64> {
    if !(kt > 0.0) || kt.is_nan() {
        return Err(Error::NonPositiveTemperature(kt));
    }
    Ok(1.0 / kt)
}

/// Gibbs state `e^{−βH}/Z` assembled from the analytic block spectrum.
pub fn thermal_state(p: &HeisenbergParams, kt: f64) -> Result<ThermalState> {
    thermal_state_beta(p, beta_from_kt(kt)?)
}

/// As `thermal_state`, parameterized by `β ≥ 0`; `β = 0` gives `I/4`.
pub fn thermal_state_beta(p: &HeisenbergParams, beta: f64) -> Result<ThermalState> {
    if !(beta >= 0.0) || !beta.is_finite() {
        return Err(Error::InvalidInput(format!("beta must be finite and non-negative (got {beta})")));
    }
    let spec = block_spectrum(p);
    let e0 = spec
        .pairs()
        .map(|e| e.energy)
        .fold(f64::INFINITY, f64::min);
    let weights: Vec<(f64, &EigenPair)> = spec
        .pairs()
        .map(|e| ((-beta * (e.energy - e0)).exp(), e))
        .collect();
    let z: f64 = weights.iter().map(|(w, _)| w).sum();
    let mut rho = CMatrix::zeros(4)?;
    for (w, e) in &weights {
        let w = w / z;
        for i in 0..4 {
            for j in 0..4 {
                rho[(i, j)] += C64::new(w * e.vector[i] * e.vector[j], 0.0);
            }
        }
    }
    Ok(ThermalState {
        rho: DensityMatrix::new(rho)?,
        partition_z: z,
        ground_energy: e0,
        beta,
        params: *p,
    })
}

/// Same state through the generic Hermitian exponential; used to cross-check
/// the block path.
pub fn thermal_state_dense(p: &HeisenbergParams, kt: f64) -> Result<ThermalState> {
    let beta = beta_from_kt(kt)?;
    let h = build_hamiltonian(p);
    let shifted = crate::densmat::expm_hermitian_shifted(&h, -beta)?;
    let z = shifted.mat.trace().re;
    let rho = shifted.mat.scale_real(1.0 / z);
    Ok(ThermalState {
        rho: DensityMatrix::new(rho.hermitian_part())?,
        partition_z: z,
        ground_energy: -shifted.log_factor / beta,
        beta,
        params: *p,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum CriticalModel {
    /// XY family in a transverse field; critical at λ = 1.
    Xy,
    /// XXX (Δ = 1) in field `h`; returns the exchange `J` of the crossing.
    XxxField { field_h: f64 },
    /// XXZ at fixed `J` and `h`; returns the anisotropy `Δ` of the crossing.
    XxzField { exchange_j: f64, field_h: f64 },
}

/// Difference between the lowest even-block and lowest odd-block energies.
fn sector_gap(p: &HeisenbergParams) -> f64 {
    let s = block_spectrum(p);
    s.sector_ground(Sector::Even) - s.sector_ground(Sector::Odd)
}

fn bisect_sign_change(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, fb) = (f(a), f(b));
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(Error::NoLevelCrossing { lo, hi });
    }
    while b - a > CROSSING_TOL {
        let m = 0.5 * (a + b);
        let fm = f(m);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// Ground-level crossing of the two-site model.
pub fn critical_point(model: CriticalModel) -> Result<f64> {
    match model {
        CriticalModel::Xy => Ok(1.0),
        CriticalModel::XxxField { field_h } => {
            let (lo, hi) = XXX_CROSSING_BRACKET;
            bisect_sign_change(
                |j| {
                    sector_gap(&from_xxz_field(XXZFieldParams {
                        exchange_j: j,
                        delta: 1.0,
                        field_h,
                    }))
                },
                lo,
                hi,
            )
        }
        CriticalModel::XxzField {
            exchange_j,
            field_h,
        } => {
            let (lo, hi) = XXZ_CROSSING_BRACKET;
            bisect_sign_change(
                |delta| {
                    sector_gap(&from_xxz_field(XXZFieldParams {
                        exchange_j,
                        delta,
                        field_h,
                    }))
                },
                lo,
                hi,
            )
        }
    }
}

/// `[A, B]` max-norm; handy for commutation checks.
pub fn commutator_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    (&(a * b) - &(b * a)).max_abs()
}
