//! Input-averaged success rates and fidelities.
//!
//! Inputs are drawn uniformly in `(α², γ) ∈ [0,1] × [0,2π)`. The integrands
//! are polynomials of degree two in `α²` once the odd `γ` harmonics (which
//! carry the square roots) are averaged away, so Gauss–Legendre in `α²` times
//! an equally spaced `γ` rule is exact for small grids.

use std::f64::consts::{FRAC_PI_4, FRAC_PI_2, PI};
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::densmat::DensityMatrix;
use crate::error::{Error, Result};
use crate::optimize::maximize_phi;
use crate::teleport::{all_correction_sets, bell_basis, CorrectionLabel, CorrectionSet, PureQubit, TeleportRun};

pub const DEFAULT_NODES: usize = 64;
pub const MIN_NODES: usize = 8;
/// Conditional fidelities are undefined below this averaged success rate.
pub const DEGENERATE_QBAR: f64 = 1e-14;
/// Postselection optimizers ignore outcomes rarer than this. The oracle's
/// `Q̄_j` carries an absolute rounding error near 1e−16, so a conditional
/// fidelity at `Q̄_j = q` is only good to about `1e−16 / q`.
pub const MIN_RESOLVABLE_RATE: f64 = 1e-6;
pub const MIN_MONTE_CARLO_SAMPLES: usize = 1000;
pub const MONTE_CARLO_RNG: &str = "ChaCha8";

#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    alpha: Vec<(f64, f64)>,
    n_gamma: usize,
}

impl QuadratureGrid {
    pub fn new(n_alpha: usize, n_gamma: usize) -> Result<Self> {
        if n_alpha < MIN_NODES || n_gamma < MIN_NODES {
            return Err(Error::InvalidInput(format!(
                "quadrature grid needs at least {MIN_NODES} nodes per axis (got {n_alpha}×{n_gamma})"
            )));
        }
        Ok(Self::unchecked(n_alpha, n_gamma))
    }

    fn unchecked(n_alpha: usize, n_gamma: usize) -> Self {
        let rule = GaussLegendre::new(NonZeroUsize::new(n_alpha).expect("positive node count"));
        // Map [-1, 1] to [0, 1]; the weights then sum to one.
        let alpha = rule
            .as_node_weight_pairs()
            .iter()
            .map(|&(x, w)| (0.5 * (x + 1.0), 0.5 * w))
            .collect();
        Self { alpha, n_gamma }
    }

    pub fn n_alpha(&self) -> usize {
        self.alpha.len()
    }

    pub fn n_gamma(&self) -> usize {
        self.n_gamma
    }

    /// `(α², weight)` pairs.
    pub fn alpha_nodes(&self) -> &[(f64, f64)] {
        &self.alpha
    }

    pub fn gamma_nodes(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.n_gamma;
        (0..n).map(move |k| 2.0 * PI * k as f64 / n as f64)
    }

    pub fn gamma_weight(&self) -> f64 {
        1.0 / self.n_gamma as f64
    }

    pub fn doubled(&self) -> Self {
        Self::unchecked(2 * self.n_alpha(), 2 * self.n_gamma)
    }
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        Self::unchecked(DEFAULT_NODES, DEFAULT_NODES)
    }
}

/// Averages for one channel and measurement angle. Outcomes are indexed
/// `0..4` for `j = 1..4`, correction sets by `CorrectionLabel::index`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AveragedQuantities {
    pub phi: f64,
    /// `Q̄_j`
    pub qbar: [f64; 4],
    /// `∫ Q_j F_j^ε dP`, indexed `[j][ε]`.
    pub joint: [[f64; 4]; 4],
    /// `F̄_j^ε = ∫ Q_j F_j^ε / ∫ Q_j`; `None` when `Q̄_j` is degenerate.
    pub fbar_cond: [Option<[f64; 4]>; 4],
    /// `⟨F̄⟩^ε = Σ_j ∫ Q_j F_j^ε`
    pub fbar_det: [f64; 4],
}

impl AveragedQuantities {
    pub fn from_sums(phi: f64, qbar: [f64; 4], joint: [[f64; 4]; 4]) -> Self {
        let mut fbar_cond = [None; 4];
        for j in 0..4 {
            if qbar[j] >= DEGENERATE_QBAR {
                fbar_cond[j] = Some(joint[j].map(|x| x / qbar[j]));
            }
        }
        let mut fbar_det = [0.0; 4];
        for (e, det) in fbar_det.iter_mut().enumerate() {
            *det = (0..4).map(|j| joint[j][e]).sum();
        }
        Self {
            phi,
            qbar,
            joint,
            fbar_cond,
            fbar_det,
        }
    }

    /// `F̄_j^ε` for outcome `j` in 1..=4.
    pub fn conditional(&self, j: usize, label: CorrectionLabel) -> Result<f64> {
        if !(1..=4).contains(&j) {
            return Err(Error::InvalidOutcome(j));
        }
        self.fbar_cond[j - 1]
            .map(|row| row[label.index()])
            .ok_or(Error::DegenerateConditionalAverage(self.qbar[j - 1]))
    }

    pub fn deterministic(&self, label: CorrectionLabel) -> f64 {
        self.fbar_det[label.index()]
    }

    pub fn best_deterministic(&self) -> (CorrectionLabel, f64) {
        let mut best = (CorrectionLabel::PhiPlus, f64::NEG_INFINITY);
        for label in CorrectionLabel::ALL {
            let v = self.deterministic(label);
            if v > best.1 {
                best = (label, v);
            }
        }
        best
    }
}

struct Accumulator {
    qbar: [f64; 4],
    joint: [[f64; 4]; 4],
}

impl Accumulator {
    fn new() -> Self {
        Self {
            qbar: [0.0; 4],
            joint: [[0.0; 4]; 4],
        }
    }
}

/// `Q_j` and `Q_j F_j^ε` for one input, all outcomes and sets.
fn pointwise(
    input: PureQubit,
    channel: &DensityMatrix,
    basis: &crate::teleport::GeneralizedBellBasis,
    sets: &[CorrectionSet; 4],
) -> Result<([f64; 4], [[f64; 4]; 4])> {
    let run = TeleportRun::new(input, channel)?;
    let mut q = [0.0; 4];
    let mut qf = [[0.0; 4]; 4];
    for j in 1..=4 {
        let branch = run.measure(basis, j)?;
        q[j - 1] = branch.probability;
        for set in sets {
            qf[j - 1][set.label.index()] = branch.weighted_fidelity(&input, set.unitary(j));
        }
    }
    Ok((q, qf))
}

/// Quadrature oracle: runs the full protocol at every grid node.
pub fn average_all(channel: &DensityMatrix, phi: f64, grid: &QuadratureGrid) -> Result<AveragedQuantities> {
    if channel.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: channel.dim(),
        });
    }
    let basis = bell_basis(phi);
    let sets = all_correction_sets();
    let wg = grid.gamma_weight();
    // Sums run in node order, so results do not depend on scheduling.
    let mut acc = Accumulator::new();
    for &(a2, wa) in grid.alpha_nodes() {
        let mut row = Accumulator::new();
        for gamma in grid.gamma_nodes() {
            let (q, qf) = pointwise(PureQubit::new(a2, gamma)?, channel, &basis, &sets)?;
            for j in 0..4 {
                row.qbar[j] += q[j];
                for e in 0..4 {
                    row.joint[j][e] += qf[j][e];
                }
            }
        }
        for j in 0..4 {
            acc.qbar[j] += wa * wg * row.qbar[j];
            for e in 0..4 {
                acc.joint[j][e] += wa * wg * row.joint[j][e];
            }
        }
    }
    Ok(AveragedQuantities::from_sums(phi, acc.qbar, acc.joint))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MonteCarloAverages {
    pub estimate: AveragedQuantities,
    pub qbar_stderr: [f64; 4],
    /// Delta-method standard errors of the ratio estimates.
    pub fbar_cond_stderr: [Option<[f64; 4]>; 4],
    pub fbar_det_stderr: [f64; 4],
    pub samples: usize,
    pub seed: u64,
    pub rng: String,
}

/// Stochastic cross-check of `average_all` with inputs sampled uniformly in
/// `(α², γ)` from a seeded ChaCha8 stream.
pub fn average_all_montecarlo(
    channel: &DensityMatrix,
    phi: f64,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloAverages> {
    if samples < MIN_MONTE_CARLO_SAMPLES {
        return Err(Error::InvalidInput(format!(
            "Monte Carlo averaging needs at least {MIN_MONTE_CARLO_SAMPLES} samples (got {samples})"
        )));
    }
    let basis = bell_basis(phi);
    let sets = all_correction_sets();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let n = samples as f64;
    let mut s_q = [0.0; 4];
    let mut s_qq = [0.0; 4];
    let mut s_n = [[0.0; 4]; 4];
    let mut s_nn = [[0.0; 4]; 4];
    let mut s_nq = [[0.0; 4]; 4];
    let mut s_d = [0.0; 4];
    let mut s_dd = [0.0; 4];
    for _ in 0..samples {
        let a2: f64 = rng.gen();
        let gamma: f64 = rng.gen::<f64>() * 2.0 * PI;
        let (q, qf) = pointwise(PureQubit::new(a2, gamma)?, channel, &basis, &sets)?;
        for j in 0..4 {
            s_q[j] += q[j];
            s_qq[j] += q[j] * q[j];
            for e in 0..4 {
                s_n[j][e] += qf[j][e];
                s_nn[j][e] += qf[j][e] * qf[j][e];
                s_nq[j][e] += qf[j][e] * q[j];
            }
        }
        for e in 0..4 {
            let d: f64 = (0..4).map(|j| qf[j][e]).sum();
            s_d[e] += d;
            s_dd[e] += d * d;
        }
    }

    let mean = |s: f64| s / n;
    let var = |s: f64, ss: f64| (ss / n - (s / n).powi(2)).max(0.0);
    let qbar = s_q.map(mean);
    let joint = s_n.map(|row| row.map(mean));
    let estimate = AveragedQuantities::from_sums(phi, qbar, joint);

    let qbar_stderr = [0, 1, 2, 3].map(|j| (var(s_q[j], s_qq[j]) / n).sqrt());
    let fbar_det_stderr = [0, 1, 2, 3].map(|e| (var(s_d[e], s_dd[e]) / n).sqrt());
    let mut fbar_cond_stderr = [None; 4];
    for j in 0..4 {
        let Some(ratio) = estimate.fbar_cond[j] else {
            continue;
        };
        let vq = var(s_q[j], s_qq[j]);
        let mut row = [0.0; 4];
        for e in 0..4 {
            let vn = var(s_n[j][e], s_nn[j][e]);
            let cov = s_nq[j][e] / n - mean(s_n[j][e]) * qbar[j];
            let r = ratio[e];
            let v = (vn - 2.0 * r * cov + r * r * vq).max(0.0) / (qbar[j] * qbar[j]);
            row[e] = (v / n).sqrt();
        }
        fbar_cond_stderr[j] = Some(row);
    }

    Ok(MonteCarloAverages {
        estimate,
        qbar_stderr,
        fbar_cond_stderr,
        fbar_det_stderr,
        samples,
        seed,
        rng: MONTE_CARLO_RNG.to_string(),
    })
}

/// `a + b cos2φ + c sin2φ`
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Harmonic {
    /// From samples at `φ = 0, π/4, π/2`.
    pub fn from_samples(x0: f64, x45: f64, x90: f64) -> Self {
        let a = 0.5 * (x0 + x90);
        Self {
            a,
            b: 0.5 * (x0 - x90),
            c: x45 - a,
        }
    }

    pub fn eval(&self, phi: f64) -> f64 {
        let (s, c) = (2.0 * phi).sin_cos();
        self.a + self.b * c + self.c * s
    }
}

/// Every averaged numerator and success rate depends on `φ` only through
/// `cos2φ` and `sin2φ` (the projectors are quadratic in `cosφ, sinφ`), so
/// three oracle runs determine the whole `φ` dependence.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleProfile {
    pub qbar: [Harmonic; 4],
    pub joint: [[Harmonic; 4]; 4],
}

impl OracleProfile {
    pub fn build(channel: &DensityMatrix, grid: &QuadratureGrid) -> Result<Self> {
        let s0 = average_all(channel, 0.0, grid)?;
        let s45 = average_all(channel, FRAC_PI_4, grid)?;
        let s90 = average_all(channel, FRAC_PI_2, grid)?;
        let qbar = [0, 1, 2, 3].map(|j| Harmonic::from_samples(s0.qbar[j], s45.qbar[j], s90.qbar[j]));
        let joint = [0, 1, 2, 3].map(|j| {
            [0, 1, 2, 3].map(|e| Harmonic::from_samples(s0.joint[j][e], s45.joint[j][e], s90.joint[j][e]))
        });
        Ok(Self { qbar, joint })
    }

    pub fn eval(&self, phi: f64) -> AveragedQuantities {
        let qbar = self.qbar.map(|h| h.eval(phi));
        let joint = self.joint.map(|row| row.map(|h| h.eval(phi)));
        AveragedQuantities::from_sums(phi, qbar, joint)
    }

    pub fn qbar(&self, j: usize, phi: f64) -> f64 {
        self.qbar[j - 1].eval(phi)
    }

    pub fn deterministic(&self, label: CorrectionLabel, phi: f64) -> f64 {
        (0..4).map(|j| self.joint[j][label.index()].eval(phi)).sum()
    }

    /// `None` where `Q̄_j` is degenerate.
    pub fn conditional(&self, j: usize, label: CorrectionLabel, phi: f64) -> Option<f64> {
        let q = self.qbar(j, phi);
        (q >= DEGENERATE_QBAR).then(|| self.joint[j - 1][label.index()].eval(phi) / q)
    }

    /// As [`Self::conditional`], but `None` below [`MIN_RESOLVABLE_RATE`].
    pub fn conditional_resolvable(&self, j: usize, label: CorrectionLabel, phi: f64) -> Option<f64> {
        (self.qbar(j, phi) >= MIN_RESOLVABLE_RATE)
            .then(|| self.conditional(j, label, phi))
            .flatten()
    }
}

/// Optimum found on the oracle profile.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleOptimum {
    pub value: f64,
    pub phi: f64,
    pub correction: CorrectionLabel,
    /// Postselected outcome with its partner, or `None` for the
    /// deterministic protocol.
    pub outcomes: Option<(usize, usize)>,
    pub success_rate: f64,
}

/// Candidates must beat the incumbent by this much, so exact ties resolve
/// to the earliest set and outcome.
const TIE_MARGIN: f64 = 1e-12;
/// Two outcomes are pooled when their conditional fidelities agree this well.
pub const PAIR_TOL: f64 = 1e-9;

impl OracleProfile {
    /// Best `⟨F̄⟩^ε(φ)` over all four correction sets and `φ ∈ [0, π]`.
    pub fn det_optimum(&self) -> OracleOptimum {
        let mut best: Option<OracleOptimum> = None;
        for label in CorrectionLabel::ALL {
            let m = maximize_phi(|phi| Some(self.deterministic(label, phi))).expect("defined everywhere");
            if best.is_none_or(|b| m.value > b.value + TIE_MARGIN) {
                best = Some(OracleOptimum {
                    value: m.value,
                    phi: m.x,
                    correction: label,
                    outcomes: None,
                    success_rate: 1.0,
                });
            }
        }
        best.expect("four candidates")
    }

    /// Best conditional fidelity `F̄_j^ε(φ)` over sets, outcomes and angles
    /// where `Q̄_j ≥` [`MIN_RESOLVABLE_RATE`].
    /// Outcome `j` is pooled with its partner (`1↔4`, `2↔3`) when the two
    /// conditional fidelities coincide there, and the success rate is then
    /// the pair's combined `Q̄`.
    pub fn prob_optimum(&self) -> Option<OracleOptimum> {
        let mut best: Option<OracleOptimum> = None;
        for j in 1..=4 {
            for label in CorrectionLabel::ALL {
                let Some(m) = maximize_phi(|phi| self.conditional_resolvable(j, label, phi)) else {
                    continue;
                };
                if best.is_some_and(|b| m.value <= b.value + TIE_MARGIN) {
                    continue;
                }
                let partner = 5 - j;
                let pooled = self
                    .conditional(partner, label, m.x)
                    .is_some_and(|f| (f - m.value).abs() <= PAIR_TOL);
                let (outcomes, rate) = if pooled {
                    ((j.min(partner), j.max(partner)), self.qbar(j, m.x) + self.qbar(partner, m.x))
                } else {
                    ((j, j), self.qbar(j, m.x))
                };
                best = Some(OracleOptimum {
                    value: m.value,
                    phi: m.x,
                    correction: label,
                    outcomes: Some(outcomes),
                    success_rate: rate,
                });
            }
        }
        best
    }
}
