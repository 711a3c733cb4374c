//! Parameter sweeps, figure datasets and the validation entry point.

use std::f64::consts::FRAC_PI_4;
use std::fmt::{self, Write as _};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::averaging::{OracleProfile, QuadratureGrid};
use crate::classical_limit::{verify_classical_bound, CLASSICAL_LIMIT};
use crate::closed_form::{
    f_branch, f_branch_opt, max_discrepancy, reconcile_with, ConventionMapping, ReconcileOptions,
    ReconciliationReport,
};
use crate::error::{Error, Result};
use crate::spin_models::{
    from_xxz_field, from_xy_field, thermal_state, thermal_state_beta, HeisenbergParams, XXZFieldParams,
    XYFieldParams,
};
use crate::teleport::{CorrectionLabel, Family};

pub const CSV_SCHEMA_VERSION: u32 = 1;
/// Oracle grid for sweeps. The integrands are exact well below this.
pub const SWEEP_GRID_NODES: usize = 16;
/// Cases used when a sweep has to reconcile conventions on the fly.
pub const SWEEP_RECONCILE_CASES: usize = 100;
pub const ENGINE_AGREEMENT_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum ModelSpec {
    Ising { lambda: f64 },
    Xx { lambda: f64 },
    Xy { lambda: f64, zeta: f64 },
    Xxx { exchange_j: f64, field_h: f64 },
    Xxz { exchange_j: f64, delta: f64, field_h: f64 },
    Raw { params: HeisenbergParams },
}

impl ModelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModelSpec::Ising { .. } => "ising",
            ModelSpec::Xx { .. } => "xx",
            ModelSpec::Xy { .. } => "xy",
            ModelSpec::Xxx { .. } => "xxx",
            ModelSpec::Xxz { .. } => "xxz",
            ModelSpec::Raw { .. } => "raw",
        }
    }

    pub fn params(&self) -> Result<HeisenbergParams> {
        Ok(match *self {
            ModelSpec::Ising { lambda } => from_xy_field(XYFieldParams::new(lambda, 1.0)?),
            ModelSpec::Xx { lambda } => from_xy_field(XYFieldParams::new(lambda, 0.0)?),
            ModelSpec::Xy { lambda, zeta } => from_xy_field(XYFieldParams::new(lambda, zeta)?),
            ModelSpec::Xxx { exchange_j, field_h } => from_xxz_field(XXZFieldParams::new(exchange_j, 1.0, field_h)?),
            ModelSpec::Xxz {
                exchange_j,
                delta,
                field_h,
            } => from_xxz_field(XXZFieldParams::new(exchange_j, delta, field_h)?),
            ModelSpec::Raw { params } => params,
        })
    }

    /// The model with the swept variable set to `x`; `kT` leaves it as is.
    pub fn with(&self, var: SweepVariable, x: f64) -> Result<Self> {
        let bad = || {
            Err(Error::InvalidInput(format!(
                "model {} cannot sweep {}",
                self.name(),
                var.name()
            )))
        };
        let mut m = *self;
        match (var, &mut m) {
            (SweepVariable::Kt, _) => {}
            (SweepVariable::Lambda, ModelSpec::Ising { lambda })
            | (SweepVariable::Lambda, ModelSpec::Xx { lambda })
            | (SweepVariable::Lambda, ModelSpec::Xy { lambda, .. }) => *lambda = x,
            (SweepVariable::J, ModelSpec::Xxx { exchange_j, .. })
            | (SweepVariable::J, ModelSpec::Xxz { exchange_j, .. }) => *exchange_j = x,
            (SweepVariable::Delta, ModelSpec::Xxz { delta, .. }) => *delta = x,
            _ => return bad(),
        }
        Ok(m)
    }

    fn columns(&self) -> [Option<f64>; 5] {
        match *self {
            ModelSpec::Ising { lambda } => [Some(lambda), Some(1.0), None, None, None],
            ModelSpec::Xx { lambda } => [Some(lambda), Some(0.0), None, None, None],
            ModelSpec::Xy { lambda, zeta } => [Some(lambda), Some(zeta), None, None, None],
            ModelSpec::Xxx { exchange_j, field_h } => [None, None, Some(exchange_j), Some(1.0), Some(field_h)],
            ModelSpec::Xxz {
                exchange_j,
                delta,
                field_h,
            } => [None, None, Some(exchange_j), Some(delta), Some(field_h)],
            ModelSpec::Raw { .. } => [None; 5],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    Kt,
    Lambda,
    J,
    Delta,
}

impl SweepVariable {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVariable::Kt => "kT",
            SweepVariable::Lambda => "lambda",
            SweepVariable::J => "J",
            SweepVariable::Delta => "delta",
        }
    }
}

impl FromStr for SweepVariable {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kt" | "t" => Ok(SweepVariable::Kt),
            "lambda" => Ok(SweepVariable::Lambda),
            "j" | "bigj" => Ok(SweepVariable::J),
            "delta" => Ok(SweepVariable::Delta),
            _ => Err(Error::InvalidInput(format!("unknown sweep variable {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Oracle,
    Closed,
    Both,
}

impl Engine {
    pub fn name(&self) -> &'static str {
        match self {
            Engine::Oracle => "oracle",
            Engine::Closed => "closed",
            Engine::Both => "both",
        }
    }
}

impl FromStr for Engine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oracle" => Ok(Engine::Oracle),
            "closed" | "closed_form" => Ok(Engine::Closed),
            "both" => Ok(Engine::Both),
            _ => Err(Error::InvalidInput(format!("unknown engine {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub model: ModelSpec,
    pub variable: SweepVariable,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    /// Temperature when the sweep is not over `kT`.
    pub kt: f64,
    pub engine: Engine,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.from < self.to) || !self.from.is_finite() || !self.to.is_finite() {
            return Err(Error::InvalidInput(format!(
                "sweep range needs from < to (got {} .. {})",
                self.from, self.to
            )));
        }
        if self.steps < 2 {
            return Err(Error::InvalidInput(format!("sweep needs at least 2 steps (got {})", self.steps)));
        }
        match self.variable {
            SweepVariable::Kt if self.from <= 0.0 => Err(Error::NonPositiveTemperature(self.from)),
            SweepVariable::Kt => Ok(()),
            _ if !(self.kt > 0.0) => Err(Error::NonPositiveTemperature(self.kt)),
            v => self.model.with(v, self.from).map(|_| ()),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.steps - 1;
        (0..self.steps)
            .map(|i| self.from + (self.to - self.from) * i as f64 / n as f64)
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub model: String,
    pub swept: String,
    pub x: f64,
    pub params: HeisenbergParams,
    pub lambda: Option<f64>,
    pub zeta: Option<f64>,
    pub bigj: Option<f64>,
    pub delta: Option<f64>,
    pub field: Option<f64>,
    pub kt: f64,
    pub det_value: f64,
    pub det_phi: f64,
    pub det_set: CorrectionLabel,
    pub prob_value: f64,
    pub prob_phi: f64,
    pub prob_set: CorrectionLabel,
    pub prob_pair: (usize, usize),
    pub success_rate: f64,
    pub above_classical_det: bool,
    pub above_classical_prob: bool,
    pub engine: Engine,
    /// `max |oracle − closed|` over the two optima when both engines ran.
    pub engine_disagreement: Option<f64>,
}

/// Shared state for evaluating sweep points.
#[derive(Clone, Debug)]
pub struct SweepContext {
    pub mapping: Option<ConventionMapping>,
    pub grid: QuadratureGrid,
    /// Added to the closed forms' `1/3`; fault injection only.
    pub perturbation: f64,
}

impl SweepContext {
    pub fn from_report(report: &ReconciliationReport) -> Self {
        Self {
            mapping: report.mapping,
            grid: sweep_grid(),
            perturbation: report.perturbation,
        }
    }

    /// Oracle only; closed-form requests fail.
    pub fn oracle_only() -> Self {
        Self {
            mapping: None,
            grid: sweep_grid(),
            perturbation: 0.0,
        }
    }
}

pub fn sweep_grid() -> QuadratureGrid {
    QuadratureGrid::new(SWEEP_GRID_NODES, SWEEP_GRID_NODES).expect("valid grid")
}

/// Reconciliation sized for interactive use: 100 cases on the sweep grid.
pub fn quick_reconciliation(seed: u64) -> Result<ReconciliationReport> {
    let mut opts = ReconcileOptions::new(SWEEP_RECONCILE_CASES, seed);
    opts.grid = sweep_grid();
    reconcile_with(&opts)
}

#[derive(Clone, Copy, Debug)]
struct Optima {
    det_value: f64,
    det_phi: f64,
    det_set: CorrectionLabel,
    prob_value: f64,
    prob_phi: f64,
    prob_set: CorrectionLabel,
    prob_pair: (usize, usize),
    success_rate: f64,
}

fn oracle_optima(ctx: &SweepContext, p: &HeisenbergParams, kt: f64) -> Result<Optima> {
    let rho = thermal_state(p, kt)?.rho;
    let profile = OracleProfile::build(&rho, &ctx.grid)?;
    let det = profile.det_optimum();
    let prob = profile
        .prob_optimum()
        .ok_or(Error::DegenerateConditionalAverage(0.0))?;
    Ok(Optima {
        det_value: det.value,
        det_phi: det.phi,
        det_set: det.correction,
        prob_value: prob.value,
        prob_phi: prob.phi,
        prob_set: prob.correction,
        prob_pair: prob.outcomes.expect("postselected"),
        success_rate: prob.success_rate,
    })
}

fn closed_optima(ctx: &SweepContext, p: &HeisenbergParams, kt: f64) -> Result<Optima> {
    let mapping = ctx.mapping.ok_or(Error::UnresolvedReconciliation)?;
    let inp = mapping.inputs(p, 1.0 / kt)?.with_perturbed_constant(ctx.perturbation);
    let det = crate::closed_form::f_det_optimal(&inp);
    let prob = crate::closed_form::prob_optimal(&inp)?;
    let relabel = |r: &crate::closed_form::OptimizationResult| {
        let fam = mapping.physical_family(r.best_branch);
        if r.correction.is_plus() {
            fam.plus()
        } else {
            fam.minus()
        }
    };
    Ok(Optima {
        det_value: det.best_value,
        det_phi: det.best_phi,
        det_set: relabel(&det),
        prob_value: prob.best_value,
        prob_phi: prob.best_phi,
        prob_set: relabel(&prob),
        prob_pair: prob.outcome_pair.expect("postselected").outcomes(),
        success_rate: prob.success_rate,
    })
}

/// One sweep point. With `Engine::Both` the oracle values are reported and
/// the closed forms only feed `engine_disagreement`; if conventions are
/// unresolved the closed forms are skipped.
pub fn evaluate_point(ctx: &SweepContext, model: &ModelSpec, kt: f64, engine: Engine) -> Result<SweepRecord> {
    if !(kt > 0.0) {
        return Err(Error::NonPositiveTemperature(kt));
    }
    let p = model.params()?;
    let (opt, disagreement) = match engine {
        Engine::Oracle => (oracle_optima(ctx, &p, kt)?, None),
        Engine::Closed => (closed_optima(ctx, &p, kt)?, None),
        Engine::Both => {
            let o = oracle_optima(ctx, &p, kt)?;
            let d = match ctx.mapping {
                Some(_) => {
                    let c = closed_optima(ctx, &p, kt)?;
                    Some((o.det_value - c.det_value).abs().max((o.prob_value - c.prob_value).abs()))
                }
                None => None,
            };
            (o, d)
        }
    };
    let [lambda, zeta, bigj, delta, field] = model.columns();
    Ok(SweepRecord {
        model: model.name().to_string(),
        swept: String::new(),
        x: kt,
        params: p,
        lambda,
        zeta,
        bigj,
        delta,
        field,
        kt,
        det_value: opt.det_value,
        det_phi: opt.det_phi,
        det_set: opt.det_set,
        prob_value: opt.prob_value,
        prob_phi: opt.prob_phi,
        prob_set: opt.prob_set,
        prob_pair: opt.prob_pair,
        success_rate: opt.success_rate,
        above_classical_det: opt.det_value > CLASSICAL_LIMIT,
        above_classical_prob: opt.prob_value > CLASSICAL_LIMIT,
        engine,
        engine_disagreement: disagreement,
    })
}

/// One record per grid point, in ascending order of the swept value.
pub fn run_sweep(ctx: &SweepContext, spec: &SweepSpec) -> Result<Vec<SweepRecord>> {
    spec.validate()?;
    if spec.engine == Engine::Closed && ctx.mapping.is_none() {
        return Err(Error::UnresolvedReconciliation);
    }
    spec.values()
        .par_iter()
        .map(|&x| {
            let (model, kt) = match spec.variable {
                SweepVariable::Kt => (spec.model, x),
                v => (spec.model.with(v, x)?, spec.kt),
            };
            let mut r = evaluate_point(ctx, &model, kt, spec.engine)?;
            r.swept = spec.variable.name().to_string();
            r.x = x;
            Ok(r)
        })
        .collect()
}

pub const RECORD_COLUMNS: [&str; 29] = [
    "schema_version",
    "model",
    "swept",
    "x",
    "jx",
    "jy",
    "jz",
    "ha",
    "hb",
    "lambda",
    "zeta",
    "bigj",
    "delta",
    "field",
    "kT",
    "det_value",
    "det_phi",
    "det_set",
    "prob_value",
    "prob_phi",
    "prob_set",
    "prob_pair",
    "success_rate",
    "above_classical_det",
    "above_classical_prob",
    "engine",
    "engine_disagreement",
    "det_family",
    "prob_family",
];

/// 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    // Prints -0.0 as 0.
    format!("{:.16e}", x + 0.0)
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_float).unwrap_or_default()
}

fn family_name(label: CorrectionLabel) -> &'static str {
    match label.family() {
        Family::Phi => "Phi",
        Family::Psi => "Psi",
    }
}

pub fn records_to_csv(records: &[SweepRecord]) -> String {
    let mut out = RECORD_COLUMNS.join(",");
    out.push('\n');
    for r in records {
        let p = r.params;
        let row = [
            CSV_SCHEMA_VERSION.to_string(),
            r.model.clone(),
            r.swept.clone(),
            fmt_float(r.x),
            fmt_float(p.jx),
            fmt_float(p.jy),
            fmt_float(p.jz),
            fmt_float(p.ha),
            fmt_float(p.hb),
            fmt_opt(r.lambda),
            fmt_opt(r.zeta),
            fmt_opt(r.bigj),
            fmt_opt(r.delta),
            fmt_opt(r.field),
            fmt_float(r.kt),
            fmt_float(r.det_value),
            fmt_float(r.det_phi),
            r.det_set.name().to_string(),
            fmt_float(r.prob_value),
            fmt_float(r.prob_phi),
            r.prob_set.name().to_string(),
            format!("{}+{}", r.prob_pair.0, r.prob_pair.1),
            fmt_float(r.success_rate),
            r.above_classical_det.to_string(),
            r.above_classical_prob.to_string(),
            r.engine.name().to_string(),
            fmt_opt(r.engine_disagreement),
            family_name(r.det_set).to_string(),
            family_name(r.prob_set).to_string(),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(text.as_bytes())?;
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
}

impl FigureId {
    pub const ALL: [FigureId; 6] = [
        FigureId::Fig2,
        FigureId::Fig3,
        FigureId::Fig4,
        FigureId::Fig5,
        FigureId::Fig6,
        FigureId::Fig7,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            FigureId::Fig2 => "fig2",
            FigureId::Fig3 => "fig3",
            FigureId::Fig4 => "fig4",
            FigureId::Fig5 => "fig5",
            FigureId::Fig6 => "fig6",
            FigureId::Fig7 => "fig7",
        }
    }
}

impl FromStr for FigureId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|f| f.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidInput(format!("unknown figure {s:?} (expected fig2..fig7)")))
    }
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Curve {
    pub label: String,
    pub spec: SweepSpec,
}

/// One plot: curves sharing an x grid, written under a common file prefix.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Panel {
    pub prefix: String,
    pub title: String,
    pub x_label: String,
    pub curves: Vec<Curve>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FigurePlan {
    pub id: FigureId,
    pub panels: Vec<Panel>,
    /// Parameters the figure plan has to choose itself.
    pub implementer_chosen: Vec<String>,
}

const KT_XY_FAMILY: (f64, f64) = (0.02, 3.0);
const KT_XXZ_FAMILY: (f64, f64) = (0.05, 10.0);

fn kt_curve(label: &str, model: ModelSpec, range: (f64, f64), steps: usize) -> Curve {
    Curve {
        label: label.to_string(),
        spec: SweepSpec {
            model,
            variable: SweepVariable::Kt,
            from: range.0,
            to: range.1,
            steps,
            kt: 1.0,
            engine: Engine::Oracle,
        },
    }
}

fn var_curve(label: &str, model: ModelSpec, var: SweepVariable, range: (f64, f64), kt: f64, steps: usize) -> Curve {
    Curve {
        label: label.to_string(),
        spec: SweepSpec {
            model,
            variable: var,
            from: range.0,
            to: range.1,
            steps,
            kt,
            engine: Engine::Oracle,
        },
    }
}

/// Curve parameters and grids for each figure. `steps` overrides the
/// default resolution.
pub fn figure_plan(id: FigureId, steps: Option<usize>) -> FigurePlan {
    let n = |default: usize| steps.unwrap_or(default);
    let kt_panel = |prefix: &str, title: &str, curves: Vec<Curve>| Panel {
        prefix: prefix.to_string(),
        title: title.to_string(),
        x_label: "kT".to_string(),
        curves,
    };
    let lambdas = [0.7, 1.3];
    match id {
        FigureId::Fig2 => FigurePlan {
            id,
            panels: vec![kt_panel(
                "ising",
                "Ising model in a transverse field",
                lambdas
                    .iter()
                    .map(|&l| kt_curve(&format!("lambda={l}"), ModelSpec::Ising { lambda: l }, KT_XY_FAMILY, n(150)))
                    .collect(),
            )],
            implementer_chosen: vec!["kT grid 0.02..3 (150 points)".into()],
        },
        FigureId::Fig3 => FigurePlan {
            id,
            panels: vec![kt_panel(
                "xx",
                "XX model in a transverse field",
                lambdas
                    .iter()
                    .map(|&l| kt_curve(&format!("lambda={l}"), ModelSpec::Xx { lambda: l }, KT_XY_FAMILY, n(150)))
                    .collect(),
            )],
            implementer_chosen: vec![
                "lambda values 0.7 and 1.3 (carried over from the Ising figure)".into(),
                "kT grid 0.02..3 (150 points)".into(),
            ],
        },
        FigureId::Fig4 => FigurePlan {
            id,
            panels: vec![kt_panel(
                "xy",
                "anisotropic XY model in a transverse field",
                lambdas
                    .iter()
                    .map(|&l| {
                        kt_curve(
                            &format!("lambda={l}"),
                            ModelSpec::Xy { lambda: l, zeta: 0.5 },
                            KT_XY_FAMILY,
                            n(150),
                        )
                    })
                    .collect(),
            )],
            implementer_chosen: vec![
                "anisotropy zeta = 0.5".into(),
                "lambda values 0.7 and 1.3".into(),
                "kT grid 0.02..3 (150 points)".into(),
            ],
        },
        FigureId::Fig5 => FigurePlan {
            id,
            panels: vec![kt_panel(
                "xxx",
                "XXX model, h = 8",
                [0.5, 0.9, 1.5, 2.0]
                    .iter()
                    .map(|&j| {
                        kt_curve(
                            &format!("J={j}"),
                            ModelSpec::Xxx {
                                exchange_j: j,
                                field_h: 8.0,
                            },
                            KT_XXZ_FAMILY,
                            n(200),
                        )
                    })
                    .collect(),
            )],
            implementer_chosen: vec![
                "J values 0.5, 0.9, 1.5, 2.0 (straddling J_c = 1)".into(),
                "kT grid 0.05..10 (200 points)".into(),
            ],
        },
        FigureId::Fig6 => FigurePlan {
            id,
            panels: vec![kt_panel(
                "xxz",
                "XXZ model, J = 1, h = 4",
                [-1.0, -0.5, 0.5, 1.5]
                    .iter()
                    .map(|&d| {
                        kt_curve(
                            &format!("delta={d}"),
                            ModelSpec::Xxz {
                                exchange_j: 1.0,
                                delta: d,
                                field_h: 4.0,
                            },
                            KT_XXZ_FAMILY,
                            n(200),
                        )
                    })
                    .collect(),
            )],
            implementer_chosen: vec![
                "delta values -1, -0.5, 0.5, 1.5 (straddling delta_1 = 0)".into(),
                "kT grid 0.05..10 (200 points)".into(),
            ],
        },
        FigureId::Fig7 => {
            let lam = |prefix: &str, title: &str, model: ModelSpec| Panel {
                prefix: prefix.to_string(),
                title: title.to_string(),
                x_label: "lambda".to_string(),
                curves: [0.1, 0.3]
                    .iter()
                    .map(|&kt| var_curve(&format!("kT={kt}"), model, SweepVariable::Lambda, (0.02, 3.0), kt, n(200)))
                    .collect(),
            };
            let xxx = ModelSpec::Xxx {
                exchange_j: 1.0,
                field_h: 8.0,
            };
            let xxz = ModelSpec::Xxz {
                exchange_j: 1.0,
                delta: 0.0,
                field_h: 4.0,
            };
            FigurePlan {
                id,
                panels: vec![
                    lam("lambda_ising", "Ising model vs lambda", ModelSpec::Ising { lambda: 1.0 }),
                    lam("lambda_xx", "XX model vs lambda", ModelSpec::Xx { lambda: 1.0 }),
                    lam("lambda_xy", "XY model vs lambda", ModelSpec::Xy { lambda: 1.0, zeta: 0.5 }),
                    Panel {
                        prefix: "j_xxx".to_string(),
                        title: "XXX model vs J, h = 8".to_string(),
                        x_label: "J".to_string(),
                        curves: [0.1, 1.0]
                            .iter()
                            .map(|&kt| var_curve(&format!("kT={kt}"), xxx, SweepVariable::J, (0.05, 3.0), kt, n(200)))
                            .collect(),
                    },
                    Panel {
                        prefix: "delta_xxz".to_string(),
                        title: "XXZ model vs delta, J = 1, h = 4".to_string(),
                        x_label: "delta".to_string(),
                        curves: [0.1, 1.0]
                            .iter()
                            .map(|&kt| {
                                var_curve(&format!("kT={kt}"), xxz, SweepVariable::Delta, (-2.0, 3.0), kt, n(200))
                            })
                            .collect(),
                    },
                ],
                implementer_chosen: vec![
                    "XY anisotropy zeta = 0.5".into(),
                    "lambda grid 0.02..3, J grid 0.05..3, delta grid -2..3 (200 points each)".into(),
                ],
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FigureMeta {
    pub figure: String,
    pub schema_version: u32,
    pub tool_version: String,
    pub engine: Engine,
    pub reconciliation_mapping: Option<String>,
    pub plan: FigurePlan,
    pub files: Vec<String>,
}

fn wide_csv(x: &[f64], x_name: &str, curves: &[(String, Vec<f64>)]) -> String {
    let mut out = format!("schema_version,{x_name}");
    for (label, _) in curves {
        let _ = write!(out, ",{label}");
    }
    out.push('\n');
    for (i, xv) in x.iter().enumerate() {
        let _ = write!(out, "{CSV_SCHEMA_VERSION},{}", fmt_float(*xv));
        for (_, ys) in curves {
            let _ = write!(out, ",{}", fmt_float(ys[i]));
        }
        out.push('\n');
    }
    out
}

fn gnuplot_script(panel: &Panel) -> String {
    let n = panel.curves.len();
    let mut s = String::new();
    let _ = writeln!(s, "# {}", panel.title);
    let _ = writeln!(s, "set datafile separator \",\"");
    let _ = writeln!(s, "set datafile columnheaders");
    let _ = writeln!(s, "set terminal pngcairo size 900,650");
    let _ = writeln!(s, "set output \"{}.png\"", panel.prefix);
    let _ = writeln!(s, "set multiplot");
    let _ = writeln!(s, "set xlabel \"{}\"", panel.x_label);
    let _ = writeln!(s, "set ylabel \"average fidelity\"");
    let _ = writeln!(s, "set key top right");
    let mut parts = Vec::new();
    for (k, c) in panel.curves.iter().enumerate() {
        let col = k + 3;
        parts.push(format!(
            "\"{p}_det.csv\" using 2:{col} with lines lw 2 lc {lc} title \"det {l}\"",
            p = panel.prefix,
            lc = k + 1,
            l = c.label
        ));
        parts.push(format!(
            "\"{p}_prob.csv\" using 2:{col} with lines lw 2 dt 2 lc {lc} title \"prob {l}\"",
            p = panel.prefix,
            lc = k + 1,
            l = c.label
        ));
    }
    parts.push("2.0/3.0 with lines dt 4 lc rgb \"red\" title \"2/3\"".to_string());
    let _ = writeln!(s, "plot {}", parts.join(", \\\n     "));
    let _ = writeln!(s, "set origin 0.12,0.12");
    let _ = writeln!(s, "set size 0.4,0.38");
    let _ = writeln!(s, "set ylabel \"success rate\"");
    let _ = writeln!(s, "unset key");
    let inset: Vec<String> = (0..n)
        .map(|k| {
            format!(
                "\"{p}_success.csv\" using 2:{col} with lines lc {lc}",
                p = panel.prefix,
                col = k + 3,
                lc = k + 1
            )
        })
        .collect();
    let _ = writeln!(s, "plot {}", inset.join(", "));
    let _ = writeln!(s, "unset multiplot");
    s
}

/// Writes every panel's datasets, plot script and a metadata file into
/// `outdir`. Returns the paths written.
pub fn reproduce_figure(
    ctx: &SweepContext,
    id: FigureId,
    outdir: &Path,
    engine: Engine,
    steps: Option<usize>,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(outdir)?;
    let mut plan = figure_plan(id, steps);
    let mut written = Vec::new();
    for panel in plan.panels.iter_mut() {
        for c in panel.curves.iter_mut() {
            c.spec.engine = engine;
        }
        let mut all_records = Vec::new();
        let mut det = Vec::new();
        let mut prob = Vec::new();
        let mut succ = Vec::new();
        let x = panel.curves[0].spec.values();
        for c in &panel.curves {
            let records = run_sweep(ctx, &c.spec)?;
            det.push((c.label.clone(), records.iter().map(|r| r.det_value).collect()));
            prob.push((c.label.clone(), records.iter().map(|r| r.prob_value).collect()));
            succ.push((c.label.clone(), records.iter().map(|r| r.success_rate).collect()));
            all_records.extend(records);
        }
        let x_name = panel.x_label.clone();
        for (suffix, text) in [
            ("det.csv", wide_csv(&x, &x_name, &det)),
            ("prob.csv", wide_csv(&x, &x_name, &prob)),
            ("success.csv", wide_csv(&x, &x_name, &succ)),
            ("records.csv", records_to_csv(&all_records)),
        ] {
            let path = outdir.join(format!("{}_{suffix}", panel.prefix));
            write_text(&path, &text)?;
            written.push(path);
        }
        let gp = outdir.join(format!("{}.gp", panel.prefix));
        write_text(&gp, &gnuplot_script(panel))?;
        written.push(gp);
    }
    let meta = FigureMeta {
        figure: id.name().to_string(),
        schema_version: CSV_SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        engine,
        reconciliation_mapping: ctx.mapping.map(|m| m.name().to_string()),
        plan,
        files: written
            .iter()
            .filter_map(|p| p.file_name().map(|f| f.to_string_lossy().into_owned()))
            .collect(),
    };
    let meta_path = outdir.join(format!("{}_meta.json", id.name()));
    write_text(&meta_path, &(serde_json::to_string_pretty(&meta)? + "\n"))?;
    written.push(meta_path);
    Ok(written)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub passed: bool,
    pub max_error: f64,
    pub tolerance: f64,
    pub cases: usize,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ValidationReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub seed: u64,
    pub cases: usize,
    pub fault: Option<f64>,
    pub passed: bool,
    pub mapping: Option<String>,
    pub checks: Vec<CheckEntry>,
    pub reconciliation: ReconciliationReport,
}

impl ValidationReport {
    pub fn exit_code(&self) -> i32 {
        if self.passed {
            0
        } else {
            1
        }
    }
}

#[derive(Clone, Debug)]
pub struct ValidateOptions {
    pub seed: u64,
    pub cases: usize,
    pub bound_samples: usize,
    /// Perturbation of the closed forms' `1/3` constant.
    pub fault: Option<f64>,
}

impl ValidateOptions {
    pub fn new(seed: u64, cases: usize) -> Self {
        Self {
            seed,
            cases,
            bound_samples: 1000,
            fault: None,
        }
    }
}

fn check(name: &str, max_error: f64, tolerance: f64, cases: usize, detail: String) -> CheckEntry {
    CheckEntry {
        name: name.to_string(),
        passed: max_error <= tolerance,
        max_error,
        tolerance,
        cases,
        detail,
    }
}

fn random_params<R: Rng>(rng: &mut R, with_field: bool) -> HeisenbergParams {
    let mut v = [0.0; 5];
    for x in v.iter_mut() {
        *x = rng.gen_range(-3.0..=3.0);
    }
    if !with_field {
        v[3] = 0.0;
        v[4] = 0.0;
    }
    HeisenbergParams::new(v[0], v[1], v[2], v[3], v[4]).expect("finite")
}

/// Reconciliation, invariant suites and the classical-bound check.
pub fn validate(opts: &ValidateOptions) -> Result<ValidationReport> {
    let perturbation = opts.fault.unwrap_or(0.0);
    let mut ropts = ReconcileOptions::new(opts.cases.max(crate::closed_form::MIN_RECONCILIATION_CASES), opts.seed);
    ropts.perturbation = perturbation;
    let rec = reconcile_with(&ropts)?;
    let mut checks = vec![CheckEntry {
        name: "reconciliation".into(),
        passed: rec.is_resolved(),
        max_error: rec.max_abs_error,
        tolerance: rec.tolerance,
        cases: rec.cases_tested,
        detail: rec.mapping_name.clone().unwrap_or_else(|| "unresolved".into()),
    }];

    let ctx = SweepContext::from_report(&rec);
    let grid = ctx.grid.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x5eed);
    let n = (opts.cases / 4).max(10);

    // Averaged-quantity symmetries on thermal channels.
    let mut sym: f64 = 0.0;
    for _ in 0..n {
        let p = random_params(&mut rng, true);
        let beta = rng.gen_range(0.0..=20.0);
        let phi = rng.gen_range(0.0..std::f64::consts::PI);
        let avg = crate::averaging::average_all(&thermal_state_beta(&p, beta)?.rho, phi, &grid)?;
        sym = sym.max((avg.qbar.iter().sum::<f64>() - 1.0).abs());
        sym = sym.max((avg.qbar[0] - avg.qbar[3]).abs());
        sym = sym.max((avg.qbar[1] - avg.qbar[2]).abs());
        for e in 0..4 {
            sym = sym.max((avg.joint[0][e] - avg.joint[3][e]).abs());
            sym = sym.max((avg.joint[1][e] - avg.joint[2][e]).abs());
        }
    }
    checks.push(check("outcome-pair symmetry", sym, 1e-10, n, "Q1=Q4, Q2=Q3, F1=F4, F2=F3, sum Q = 1".into()));

    match rec.mapping {
        Some(mapping) => {
            // Engines agree on optima.
            let mut agree: f64 = 0.0;
            let mut prob_ge_det: f64 = 0.0;
            for _ in 0..n {
                let p = random_params(&mut rng, true);
                let kt = rng.gen_range(0.05..=5.0);
                let r = evaluate_point(&ctx, &ModelSpec::Raw { params: p }, kt, Engine::Both)?;
                agree = agree.max(r.engine_disagreement.unwrap_or(f64::INFINITY));
                prob_ge_det = prob_ge_det.max(r.det_value - r.prob_value);
            }
            checks.push(check("oracle vs closed-form optima", agree, ENGINE_AGREEMENT_TOL, n, mapping.name().into()));
            checks.push(check("postselection never loses", prob_ge_det, 1e-10, n, "det - prob".into()));

            // No field: postselection cannot beat the deterministic optimum.
            let mut collapse: f64 = 0.0;
            let mut rule: f64 = 0.0;
            for _ in 0..n {
                let p = random_params(&mut rng, false);
                let beta = rng.gen_range(0.0..=20.0);
                let inp = mapping.inputs(&p, beta)?.with_perturbed_constant(perturbation);
                let det = crate::closed_form::f_det_optimal(&inp);
                let prob = crate::closed_form::prob_optimal(&inp)?;
                collapse = collapse.max((det.best_value - prob.best_value).abs());
                let p = random_params(&mut rng, true);
                let inp = mapping.inputs(&p, beta)?.with_perturbed_constant(perturbation);
                for b in [Family::Phi, Family::Psi] {
                    let opt = f_branch_opt(&inp, b).0;
                    let g = crate::optimize::maximize_phi(|phi| Some(f_branch(&inp, b, phi))).expect("defined");
                    rule = rule.max(g.value - opt);
                }
            }
            checks.push(check("no-field collapse", collapse, 1e-10, n, "|det - prob|".into()));
            checks.push(check("deterministic pi/4 rule", rule.max(0.0), 1e-10, n, "grid - closed".into()));

            // Closed form against the oracle at pi/4 on the discriminating cases.
            let mut disc: f64 = 0.0;
            for case in &rec.discriminating_cases {
                let inp = mapping.inputs(&case.params, case.beta)?.with_perturbed_constant(perturbation);
                let pred = mapping.predict_inputs(&inp, FRAC_PI_4);
                let oracle = crate::averaging::average_all(
                    &thermal_state_beta(&case.params, case.beta)?.rho,
                    FRAC_PI_4,
                    &grid,
                )?;
                disc = disc.max(max_discrepancy(&pred, &oracle));
            }
            checks.push(check(
                "discriminating cases",
                disc,
                crate::closed_form::RECONCILIATION_TOL,
                rec.discriminating_cases.len(),
                "analytic formulas vs oracle at pi/4".into(),
            ));
        }
        None => checks.push(CheckEntry {
            name: "closed-form suites".into(),
            passed: false,
            max_error: f64::INFINITY,
            tolerance: ENGINE_AGREEMENT_TOL,
            cases: 0,
            detail: "skipped: conventions unresolved".into(),
        }),
    }

    let bound = verify_classical_bound(opts.bound_samples, opts.seed)?;
    checks.push(check(
        "classical bound",
        (bound.max_fidelity - CLASSICAL_LIMIT).max(0.0),
        1e-9,
        bound.samples,
        format!(
            "max {:.12}, saturating {:.12}, entangled control {:.12}",
            bound.max_fidelity, bound.saturating_value, bound.entangled_control_value
        ),
    ));

    let passed = checks.iter().all(|c| c.passed);
    Ok(ValidationReport {
        schema_version: CSV_SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: opts.seed,
        cases: opts.cases,
        fault: opts.fault,
        passed,
        mapping: rec.mapping_name.clone(),
        checks,
        reconciliation: rec,
    })
}
