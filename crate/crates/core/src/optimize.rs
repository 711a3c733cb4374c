//! One-dimensional maximization over the measurement angle.
//!
//! A dense grid locates the best cell, then golden-section search refines
//! inside the neighbouring cells. Points where the objective is undefined
//! return `None` and are skipped.

use std::f64::consts::PI;

pub const GRID_POINTS: usize = 4096;
pub const PHI_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
}

fn score(v: Option<f64>) -> f64 {
    match v {
        Some(v) if v.is_finite() => v,
        _ => f64::NEG_INFINITY,
    }
}

/// Maximizes `f` on `[lo, hi]`. Returns `None` if `f` is undefined at every
/// grid point.
pub fn maximize<F>(mut f: F, lo: f64, hi: f64, points: usize, tol: f64) -> Option<Maximum>
where
    F: FnMut(f64) -> Option<f64>,
{
    let points = points.max(2);
    let step = (hi - lo) / points as f64;
    let mut best_i = None;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..=points {
        let v = score(f(lo + step * i as f64));
        if v > best_v {
            best_v = v;
            best_i = Some(i);
        }
    }
    let best_i = best_i?;
    let x_best = lo + step * best_i as f64;
    let a = lo + step * best_i.saturating_sub(1) as f64;
    let b = (lo + step * (best_i + 1) as f64).min(hi);
    let refined = golden_section(&mut f, a, b, tol);
    if refined.value > best_v {
        Some(refined)
    } else {
        Some(Maximum {
            x: x_best,
            value: best_v,
        })
    }
}

/// Maximizes over `φ ∈ [0, π]` with the default resolution.
pub fn maximize_phi<F>(f: F) -> Option<Maximum>
where
    F: FnMut(f64) -> Option<f64>,
{
    maximize(f, 0.0, PI, GRID_POINTS, PHI_TOL)
}

fn golden_section<F>(f: &mut F, mut a: f64, mut b: f64, tol: f64) -> Maximum
where
    F: FnMut(f64) -> Option<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = score(f(c));
    let mut fd = score(f(d));
    while (b - a).abs() > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = score(f(c));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = score(f(d));
        }
    }
    if fc >= fd {
        Maximum { x: c, value: fc }
    } else {
        Maximum { x: d, value: fd }
    }
}
