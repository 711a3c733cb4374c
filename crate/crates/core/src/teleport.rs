//! One run of the teleportation protocol on density matrices.
//!
//! Qubit order is (input, Alice's channel half, Bob's channel half). Alice
//! projects qubits 1 and 2 onto a generalized Bell state, Bob applies the
//! Pauli correction picked by the outcome and the chosen correction set.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::densmat::{kron, partial_trace_leading, pauli, CMatrix, DensityMatrix, C64};
use crate::error::{Error, Result};

/// Outcome probabilities below this are treated as unreachable.
pub const UNREACHABLE_PROBABILITY: f64 = 1e-15;

/// Pure input `√α² |0⟩ + √(1−α²) e^{iγ} |1⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PureQubit {
    alpha_sq: f64,
    gamma: f64,
}

impl PureQubit {
    pub fn new(alpha_sq: f64, gamma: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha_sq) || !gamma.is_finite() {
            return Err(Error::InvalidInput(format!(
                "input qubit needs alpha_sq in [0, 1] and finite gamma (got {alpha_sq}, {gamma})"
            )));
        }
        Ok(Self {
            alpha_sq,
            gamma: gamma.rem_euclid(2.0 * PI),
        })
    }

    pub fn alpha_sq(&self) -> f64 {
        self.alpha_sq
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn ket(&self) -> [C64; 2] {
        let a = self.alpha_sq.sqrt();
        let b = (1.0 - self.alpha_sq).sqrt();
        [C64::new(a, 0.0), C64::from_polar(b, self.gamma)]
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::new_trusted(CMatrix::outer(&self.ket()).expect("2 is supported"))
    }
}

/// Projectors onto `cosφ|00⟩+sinφ|11⟩`, `sinφ|00⟩−cosφ|11⟩`,
/// `cosφ|01⟩+sinφ|10⟩`, `sinφ|01⟩−cosφ|10⟩`.
#[derive(Clone, Debug)]
pub struct GeneralizedBellBasis {
    phi: f64,
    kets: [[f64; 4]; 4],
    projectors: [CMatrix; 4],
    /// `P_j ⊗ 1₂`, cached for the three-qubit products.
    lifted: [CMatrix; 4],
}

impl GeneralizedBellBasis {
    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn ket(&self, j: usize) -> [f64; 4] {
        self.kets[j - 1]
    }

    /// `P_j` for `j` in 1..=4.
    pub fn projector(&self, j: usize) -> &CMatrix {
        &self.projectors[j - 1]
    }

    pub fn projectors(&self) -> &[CMatrix; 4] {
        &self.projectors
    }

    fn lifted(&self, j: usize) -> &CMatrix {
        &self.lifted[j - 1]
    }
}

/// Builds the basis for angle `phi`, reduced into `[0, π)`. A shift by π
/// flips every ket's sign and leaves the projectors unchanged.
pub fn bell_basis(phi: f64) -> GeneralizedBellBasis {
    let phi = phi.rem_euclid(PI);
    let (s, c) = phi.sin_cos();
    let kets = [
        [c, 0.0, 0.0, s],
        [s, 0.0, 0.0, -c],
        [0.0, c, s, 0.0],
        [0.0, s, -c, 0.0],
    ];
    let projectors = kets.map(|k| {
        let ket: Vec<C64> = k.iter().map(|&x| C64::new(x, 0.0)).collect();
        CMatrix::outer(&ket).expect("4 is supported")
    });
    let i2 = pauli::identity();
    let lifted = [0, 1, 2, 3].map(|j| kron(&projectors[j], &i2).expect("4 ⊗ 2 fits"));
    GeneralizedBellBasis {
        phi,
        kets,
        projectors,
        lifted,
    }
}

/// The standard Bell basis, `φ = π/4`.
pub fn standard_bell_basis() -> GeneralizedBellBasis {
    bell_basis(PI / 4.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CorrectionLabel {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

/// Which parity block a correction set belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Phi,
    Psi,
}

impl Family {
    pub fn other(self) -> Self {
        match self {
            Family::Phi => Family::Psi,
            Family::Psi => Family::Phi,
        }
    }

    pub fn plus(self) -> CorrectionLabel {
        match self {
            Family::Phi => CorrectionLabel::PhiPlus,
            Family::Psi => CorrectionLabel::PsiPlus,
        }
    }

    pub fn minus(self) -> CorrectionLabel {
        match self {
            Family::Phi => CorrectionLabel::PhiMinus,
            Family::Psi => CorrectionLabel::PsiMinus,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Phi => "Phi",
            Family::Psi => "Psi",
        }
    }
}

impl CorrectionLabel {
    pub const ALL: [CorrectionLabel; 4] = [
        CorrectionLabel::PhiPlus,
        CorrectionLabel::PhiMinus,
        CorrectionLabel::PsiPlus,
        CorrectionLabel::PsiMinus,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn family(self) -> Family {
        match self {
            CorrectionLabel::PhiPlus | CorrectionLabel::PhiMinus => Family::Phi,
            CorrectionLabel::PsiPlus | CorrectionLabel::PsiMinus => Family::Psi,
        }
    }

    pub fn is_plus(self) -> bool {
        matches!(self, CorrectionLabel::PhiPlus | CorrectionLabel::PsiPlus)
    }

    pub fn name(self) -> &'static str {
        match self {
            CorrectionLabel::PhiPlus => "Phi+",
            CorrectionLabel::PhiMinus => "Phi-",
            CorrectionLabel::PsiPlus => "Psi+",
            CorrectionLabel::PsiMinus => "Psi-",
        }
    }

    /// The Bell state this set is the ideal correction for.
    pub fn bell_ket(self) -> [C64; 4] {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let (z, p, m) = (C64::new(0.0, 0.0), C64::new(r, 0.0), C64::new(-r, 0.0));
        match self {
            CorrectionLabel::PhiPlus => [p, z, z, p],
            CorrectionLabel::PhiMinus => [p, z, z, m],
            CorrectionLabel::PsiPlus => [z, p, p, z],
            CorrectionLabel::PsiMinus => [z, p, m, z],
        }
    }
}

impl fmt::Display for CorrectionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug)]
pub struct CorrectionSet {
    pub label: CorrectionLabel,
    /// `U_1..U_4`, indexed by outcome.
    pub unitaries: [CMatrix; 4],
}

impl CorrectionSet {
    pub fn unitary(&self, j: usize) -> &CMatrix {
        &self.unitaries[j - 1]
    }
}

pub fn correction_set(label: CorrectionLabel) -> CorrectionSet {
    let one = pauli::identity();
    let z = pauli::z();
    let x = pauli::x();
    let zx = &z * &x;
    let unitaries = match label {
        CorrectionLabel::PhiPlus => [one, z, x, zx],
        CorrectionLabel::PhiMinus => [z, one, zx, x],
        CorrectionLabel::PsiPlus => [x, zx, one, z],
        CorrectionLabel::PsiMinus => [zx, x, z, one],
    };
    CorrectionSet { label, unitaries }
}

pub fn all_correction_sets() -> [CorrectionSet; 4] {
    CorrectionLabel::ALL.map(correction_set)
}

fn check_outcome(j: usize) -> Result<()> {
    if (1..=4).contains(&j) {
        Ok(())
    } else {
        Err(Error::InvalidOutcome(j))
    }
}

/// Input and channel combined into the three-qubit state `ρ_in ⊗ ρ_ch`.
#[derive(Clone, Debug)]
pub struct TeleportRun {
    input: PureQubit,
    total: CMatrix,
}

/// Alice's projection for one outcome, before Bob's correction.
#[derive(Clone, Debug)]
pub struct MeasuredBranch {
    pub outcome_j: usize,
    /// `Tr[(P_j ⊗ 1) ρ]`
    pub probability: f64,
    /// `Tr_12[(P_j ⊗ 1) ρ (P_j ⊗ 1)]`, not normalized.
    pub bob_unnormalized: CMatrix,
}

impl MeasuredBranch {
    pub fn reachable(&self) -> bool {
        self.probability >= UNREACHABLE_PROBABILITY
    }

    /// `⟨ψ|U σ U†|ψ⟩` on the unnormalized state, i.e. `Q_j · F_j`.
    pub fn weighted_fidelity(&self, input: &PureQubit, unitary: &CMatrix) -> f64 {
        let ket = input.ket();
        // U†|ψ⟩, then ⟨U†ψ| σ |U†ψ⟩.
        let rotated = unitary.adjoint().apply(&ket);
        self.bob_unnormalized.expectation(&rotated).re
    }
}

impl TeleportRun {
    pub fn new(input: PureQubit, channel: &DensityMatrix) -> Result<Self> {
        if channel.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: channel.dim(),
            });
        }
        let total = kron(input.density().mat(), channel.mat())?;
        Ok(Self { input, total })
    }

    pub fn input(&self) -> &PureQubit {
        &self.input
    }

    pub fn total_state(&self) -> &CMatrix {
        &self.total
    }

    pub fn measure(&self, basis: &GeneralizedBellBasis, j: usize) -> Result<MeasuredBranch> {
        check_outcome(j)?;
        let lifted = basis.lifted(j);
        let projected = lifted * &self.total;
        let probability = projected.trace().re;
        let sandwiched = &projected * lifted;
        let bob_unnormalized = partial_trace_leading(&sandwiched, 2)?;
        Ok(MeasuredBranch {
            outcome_j: j,
            probability,
            bob_unnormalized,
        })
    }
}

#[derive(Clone, Debug)]
pub struct TeleportOutcome {
    pub outcome_j: usize,
    pub probability: f64,
    /// `None` when the outcome is unreachable.
    pub output_state: Option<DensityMatrix>,
    /// Zero when the outcome is unreachable; check `reachable`.
    pub fidelity: f64,
    pub reachable: bool,
}

/// Runs the protocol for outcome `j` and returns Bob's corrected state.
pub fn run_outcome(
    input: PureQubit,
    channel: &DensityMatrix,
    basis: &GeneralizedBellBasis,
    set: &CorrectionSet,
    j: usize,
) -> Result<TeleportOutcome> {
    let run = TeleportRun::new(input, channel)?;
    let branch = run.measure(basis, j)?;
    if !branch.reachable() {
        return Ok(TeleportOutcome {
            outcome_j: j,
            probability: branch.probability.max(0.0),
            output_state: None,
            fidelity: 0.0,
            reachable: false,
        });
    }
    let u = set.unitary(j);
    let corrected = &(u * &branch.bob_unnormalized) * &u.adjoint();
    let output = DensityMatrix::new_trusted(corrected.scale_real(1.0 / branch.probability));
    let fidelity = output.overlap(&input.ket());
    Ok(TeleportOutcome {
        outcome_j: j,
        probability: branch.probability,
        output_state: Some(output),
        fidelity,
        reachable: true,
    })
}

/// `π/2 − φ`, used for the outcome pair (2, 3).
pub fn complementary_angle(phi: f64) -> f64 {
    FRAC_PI_2 - phi
}
