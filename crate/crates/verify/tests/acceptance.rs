//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::process::ExitCode;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use teleport_core::averaging::{average_all, OracleProfile, QuadratureGrid, MIN_RESOLVABLE_RATE};
use teleport_core::classical_limit::{verify_classical_bound, CLASSICAL_LIMIT};
use teleport_core::closed_form::{
    f_branch, f_branch_opt, g_branch, q_rate, reconcile_conventions, ConventionMapping, ReconciliationReport,
};
use teleport_core::densmat::DensityMatrix;
use teleport_core::optimize::maximize_phi;
use teleport_core::spin_models::{critical_point, thermal_state_beta, CriticalModel, HeisenbergParams};
use teleport_core::sweeps::{
    evaluate_point, run_sweep, Engine, ModelSpec, SweepContext, SweepSpec, SweepVariable,
};
use teleport_core::teleport::{CorrectionLabel, Family};

const SEED: u64 = 20_240_601;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn random_params(rng: &mut ChaCha8Rng, field: bool) -> HeisenbergParams {
    let mut v = [0.0; 5];
    for x in v.iter_mut() {
        *x = rng.gen_range(-3.0..=3.0);
    }
    if !field {
        v[3] = 0.0;
        v[4] = 0.0;
    }
    HeisenbergParams::new(v[0], v[1], v[2], v[3], v[4]).unwrap()
}

fn signed(f: Family, plus: bool) -> CorrectionLabel {
    if plus {
        f.plus()
    } else {
        f.minus()
    }
}

fn c1_formulas(m: ConventionMapping) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 1);
    let grid = QuadratureGrid::default();
    let (n, mut err) = (200, 0.0f64);
    for _ in 0..n {
        let p = random_params(&mut rng, true);
        let beta = rng.gen_range(0.0..=20.0);
        let phi = rng.gen_range(0.0..=PI);
        let inp = m.inputs(&p, beta).unwrap();
        let o = average_all(&thermal_state_beta(&p, beta).unwrap().rho, phi, &grid).unwrap();
        err = err.max((q_rate(&inp, phi) - o.qbar[0]).abs());
        err = err.max((q_rate(&inp, FRAC_PI_2 - phi) - o.qbar[1]).abs());
        for b in [Family::Phi, Family::Psi] {
            for plus in [true, false] {
                let label = signed(m.physical_family(b), plus);
                let a = if plus { phi } else { -phi };
                err = err.max((f_branch(&inp, b, a) - o.deterministic(label)).abs());
                for j in 1..=4 {
                    if o.qbar[j - 1] < MIN_RESOLVABLE_RATE {
                        continue;
                    }
                    let angle = if j == 1 || j == 4 { a } else { FRAC_PI_2 - a };
                    let g = g_branch(&inp, b, angle).unwrap();
                    err = err.max((g - o.conditional(j, label).unwrap()).abs());
                }
            }
        }
    }
    outcome(err <= 1e-8, format!("{n} tuples, max |closed - oracle| = {err:.2e} (tol 1e-8)"))
}

fn c2_no_field(m: ConventionMapping) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 2);
    let grid = QuadratureGrid::new(16, 16).unwrap();
    let (n, mut err) = (50, 0.0f64);
    for _ in 0..n {
        let p = random_params(&mut rng, false);
        let beta = rng.gen_range(0.0..=20.0);
        let det = m.det_optimal(&p, beta).unwrap();
        let prob = m.prob_optimal(&p, beta).unwrap();
        err = err.max((det.best_value - prob.best_value).abs());
        let prof = OracleProfile::build(&thermal_state_beta(&p, beta).unwrap().rho, &grid).unwrap();
        let (od, op) = (prof.det_optimum(), prof.prob_optimum().unwrap());
        err = err.max((od.value - op.value).abs());
    }
    outcome(err <= 1e-10, format!("{n} tuples, max |prob - det| = {err:.2e} (closed form and oracle, tol 1e-10)"))
}

fn c3_classical() -> Outcome {
    let r = verify_classical_bound(10_000, SEED + 3).unwrap();
    let ok = r.max_fidelity <= CLASSICAL_LIMIT + 1e-9 && (r.saturating_value - CLASSICAL_LIMIT).abs() <= 1e-10;
    outcome(
        ok,
        format!(
            "10000 channels, max = 2/3 {:+.2e}; saturating case = 2/3 {:+.2e}; singlet control = {:.12}",
            r.max_fidelity - CLASSICAL_LIMIT,
            r.saturating_value - CLASSICAL_LIMIT,
            r.entangled_control_value
        ),
    )
}

fn c4_ideal() -> Outcome {
    let grid = QuadratureGrid::default();
    let mut err = 0.0f64;
    for label in CorrectionLabel::ALL {
        let rho = DensityMatrix::from_pure(&label.bell_ket()).unwrap();
        let a = average_all(&rho, FRAC_PI_4, &grid).unwrap();
        err = err.max((a.deterministic(label) - 1.0).abs());
        for j in 1..=4 {
            err = err.max((a.conditional(j, label).unwrap() - 1.0).abs());
        }
    }
    let mixed = DensityMatrix::maximally_mixed(4).unwrap();
    for k in 0..=16 {
        let a = average_all(&mixed, PI * k as f64 / 16.0, &grid).unwrap();
        for label in CorrectionLabel::ALL {
            err = err.max((a.deterministic(label) - 0.5).abs());
            for j in 1..=4 {
                if let Ok(f) = a.conditional(j, label) {
                    err = err.max((f - 0.5).abs());
                }
            }
        }
    }
    outcome(err <= 1e-12, format!("max deviation {err:.2e} (tol 1e-12)"))
}

fn models() -> Vec<ModelSpec> {
    vec![
        ModelSpec::Ising { lambda: 0.7 },
        ModelSpec::Ising { lambda: 1.3 },
        ModelSpec::Xx { lambda: 0.7 },
        ModelSpec::Xy { lambda: 1.3, zeta: 0.5 },
        ModelSpec::Xxx {
            exchange_j: 1.5,
            field_h: 8.0,
        },
        ModelSpec::Xxz {
            exchange_j: 1.0,
            delta: -0.5,
            field_h: 4.0,
        },
        ModelSpec::Raw {
            params: HeisenbergParams::new(2.5, -1.0, 3.0, 2.0, -3.0).unwrap(),
        },
    ]
}

fn c5_hot(ctx: &SweepContext) -> Outcome {
    let mut err = 0.0f64;
    for m in models() {
        let r = evaluate_point(ctx, &m, 1e6, Engine::Both).unwrap();
        err = err.max((r.det_value - 0.5).abs()).max((r.prob_value - 0.5).abs());
    }
    outcome(err <= 1e-5, format!("{} models at kT = 1e6, max |value - 1/2| = {err:.2e}", models().len()))
}

fn c6_figure_two(ctx: &SweepContext) -> Outcome {
    let a = evaluate_point(ctx, &ModelSpec::Ising { lambda: 0.7 }, 0.1, Engine::Both).unwrap();
    let b = evaluate_point(ctx, &ModelSpec::Ising { lambda: 1.3 }, 0.1, Engine::Both).unwrap();
    let ok_a = a.prob_value >= 0.99 && (0.07..=0.13).contains(&a.success_rate);
    let ok_b = (0.25..=0.35).contains(&b.success_rate);
    outcome(
        ok_a && ok_b,
        format!(
            "lambda=0.7: prob {:.6}, success {:.4} (want >= 0.99, [0.07, 0.13]) {}; lambda=1.3: success {:.4} (want [0.25, 0.35]) {}",
            a.prob_value,
            a.success_rate,
            if ok_a { "ok" } else { "MISS" },
            b.success_rate,
            if ok_b { "ok" } else { "MISS" }
        ),
    )
}

fn kt_sweep(model: ModelSpec, to: f64, steps: usize) -> SweepSpec {
    SweepSpec {
        model,
        variable: SweepVariable::Kt,
        from: to / steps as f64,
        to,
        steps,
        kt: 1.0,
        engine: Engine::Oracle,
    }
}

fn c7_qualitative(ctx: &SweepContext) -> Outcome {
    // (a)
    let xx = run_sweep(ctx, &kt_sweep(ModelSpec::Xx { lambda: 0.7 }, 3.0, 150)).unwrap();
    let det_max = xx.iter().map(|r| r.det_value).fold(f64::NEG_INFINITY, f64::max);
    let prob_above = xx.iter().any(|r| r.prob_value > CLASSICAL_LIMIT);
    let rising = xx.windows(5).any(|w| w.windows(2).all(|p| p[1].prob_value > p[0].prob_value));
    let a = det_max <= CLASSICAL_LIMIT && prob_above && rising;
    // (b)
    let jc = critical_point(CriticalModel::XxxField { field_h: 8.0 }).unwrap();
    let mut neg_max = f64::NEG_INFINITY;
    for j in [-0.25, -0.5, -1.0, -2.0] {
        let m = ModelSpec::Xxx {
            exchange_j: j,
            field_h: 8.0,
        };
        for r in run_sweep(ctx, &kt_sweep(m, 10.0, 100)).unwrap() {
            neg_max = neg_max.max(r.det_value).max(r.prob_value);
        }
    }
    // Both protocols sit on 2/3 at low kT; allow rounding.
    let b = (jc - 1.0).abs() <= 1e-9 && neg_max <= CLASSICAL_LIMIT + 1e-9;
    // (c)
    let dc = critical_point(CriticalModel::XxzField {
        exchange_j: 1.0,
        field_h: 4.0,
    })
    .unwrap();
    let c = dc.abs() <= 1e-9;
    outcome(
        a && b && c,
        format!(
            "(a) XX det max 2/3 {:+.2e}, prob above 2/3: {prob_above}, rising stretch: {rising}; \
             (b) J_c = {jc:.12}, J<0 max 2/3 {:+.2e}; (c) delta_c = {dc:.2e}",
            det_max - CLASSICAL_LIMIT,
            neg_max - CLASSICAL_LIMIT
        ),
    )
}

fn c8_symmetry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let grid = QuadratureGrid::default();
    let (n, mut err) = (100, 0.0f64);
    for _ in 0..n {
        let p = random_params(&mut rng, true);
        let beta = rng.gen_range(0.0..=20.0);
        let phi = rng.gen_range(0.0..PI);
        let a = average_all(&thermal_state_beta(&p, beta).unwrap().rho, phi, &grid).unwrap();
        err = err.max((a.qbar.iter().sum::<f64>() - 1.0).abs());
        err = err.max((a.qbar[0] - a.qbar[3]).abs()).max((a.qbar[1] - a.qbar[2]).abs());
        for e in 0..4 {
            err = err.max((a.joint[0][e] - a.joint[3][e]).abs());
            err = err.max((a.joint[1][e] - a.joint[2][e]).abs());
            if let (Some(x), Some(y)) = (a.fbar_cond[0], a.fbar_cond[3]) {
                if a.qbar[0] >= MIN_RESOLVABLE_RATE {
                    err = err.max((x[e] - y[e]).abs());
                }
            }
            if let (Some(x), Some(y)) = (a.fbar_cond[1], a.fbar_cond[2]) {
                if a.qbar[1] >= MIN_RESOLVABLE_RATE {
                    err = err.max((x[e] - y[e]).abs());
                }
            }
        }
    }
    outcome(err <= 1e-10, format!("{n} thermal channels, max asymmetry {err:.2e} (tol 1e-10)"))
}

fn c9_phi_rule(m: ConventionMapping) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 9);
    let (n, mut excess) = (200, f64::NEG_INFINITY);
    for _ in 0..n {
        let p = random_params(&mut rng, true);
        let beta = rng.gen_range(0.0..=20.0);
        let inp = m.inputs(&p, beta).unwrap();
        for b in [Family::Phi, Family::Psi] {
            let opt = f_branch_opt(&inp, b).0;
            let g = maximize_phi(|x| Some(f_branch(&inp, b, x))).unwrap();
            excess = excess.max(g.value - opt);
        }
    }
    outcome(excess <= 1e-10, format!("{n} tuples, max(grid - closed) = {excess:.2e} (tol 1e-10)"))
}

fn c10_reconcile(r: &ReconciliationReport) -> Outcome {
    let dir = std::env::temp_dir().join(format!("acceptance-reconcile-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("reconciliation.json");
    r.save(&path).unwrap();
    let back = ReconciliationReport::load(&path).unwrap();
    let _ = std::fs::remove_dir_all(&dir);
    let accepted = back.candidates.iter().filter(|c| c.accepted).count();
    let singlet = back.discriminating_cases.iter().any(|c| c.name.contains("singlet"));
    outcome(
        accepted == 1 && back.is_resolved() && back.max_abs_error <= 1e-8 && singlet,
        format!(
            "{accepted} candidate accepted: {}, max error {:.2e} over {} cases; singlet case persisted: {singlet}",
            back.mapping_name.as_deref().unwrap_or("none"),
            back.max_abs_error,
            back.cases_tested
        ),
    )
}

fn main() -> ExitCode {
    let rec = reconcile_conventions(200, SEED).unwrap();
    let ctx = SweepContext::from_report(&rec);
    let mapping = rec.mapping;

    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let unresolved = || outcome(false, "conventions unresolved".into());
    results.push((1, "oracle/closed-form agreement", mapping.map_or_else(unresolved, c1_formulas)));
    results.push((2, "no-field collapse", mapping.map_or_else(unresolved, c2_no_field)));
    results.push((3, "classical bound", c3_classical()));
    results.push((4, "ideal-channel limits", c4_ideal()));
    results.push((5, "infinite-temperature limit", c5_hot(&ctx)));
    results.push((6, "Ising success rates", c6_figure_two(&ctx)));
    results.push((7, "qualitative figure properties", c7_qualitative(&ctx)));
    results.push((8, "symmetry suites", c8_symmetry()));
    results.push((9, "deterministic angle rule", mapping.map_or_else(unresolved, c9_phi_rule)));
    results.push((10, "reconciliation resolution", c10_reconcile(&rec)));

    let mut failed = 0;
    for (n, name, o) in &results {
        println!("{} criterion {n:>2} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
