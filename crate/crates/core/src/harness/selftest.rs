//! Quick operator property checks run by `fracaim selftest`.

use crate::conflict_sim::{saddle_check, SaddleSample};
use crate::error::Result;
use crate::fde_solver::{solve_caputo, CaputoProblem};
use crate::frac_ops::{
    divided_gl_difference, gamma, mittag_leffler, mittag_leffler_raw, p_alpha_convolution, p_alpha_partial_integral,
    rl_integral, FractionalOrder, GLWeightTable, MittagLefflerOptions, Trajectory, UniformGrid,
};

use super::scenario::example2;

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, body: impl FnOnce() -> Result<(bool, String)>) -> PropertyCheck {
    match body() {
        Ok((passed, detail)) => PropertyCheck { name, passed, detail },
        Err(e) => PropertyCheck {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn order(a: f64) -> Result<FractionalOrder> {
    FractionalOrder::new(a)
}

pub fn run_selftest() -> Vec<PropertyCheck> {
    vec![
        check("weights: recurrence matches product formula", || {
            let mut worst: f64 = 0.0;
            for a in (1..=9).map(|k| k as f64 / 10.0) {
                let table = GLWeightTable::new(order(a)?, 50);
                let (mut num, mut den) = (1.0f64, 1.0f64);
                for j in 1..=50 {
                    num *= j as f64 - 1.0 - a;
                    den *= j as f64;
                    worst = worst.max((table.get(j) - num / den).abs() / (num / den).abs());
                }
            }
            Ok((worst <= 1e-12, format!("max relative deviation {worst:.2e}")))
        }),
        check("weights: negative tail, positive decreasing partial sums", || {
            let table = GLWeightTable::new(order(0.37)?, 5000);
            let mut sum = 1.0;
            let mut ok = true;
            for &w in &table.weights()[1..] {
                ok &= w < 0.0 && sum + w > 0.0;
                sum += w;
            }
            Ok((ok, format!("partial sum at 5000 = {sum:.6e}")))
        }),
        check("kernel identity for x(t) = t", || {
            let a = order(0.5)?;
            let h = 0.1;
            let grid = UniformGrid::new(1.0, h)?;
            let x = Trajectory::scalar(grid, |t| t);
            let c = 1.0 / gamma(2.0 - a.value());
            let mut worst: f64 = 0.0;
            let mut ok = true;
            for (k, t) in grid.nodes().enumerate() {
                let lhs = divided_gl_difference(&x, a, h, k)?[0];
                let q = p_alpha_convolution(|s| c * s.powf(1.0 - a.value()), a, t, h, 2e-3)?;
                let gap = (lhs - q.value).abs();
                worst = worst.max(gap);
                ok &= gap <= 5.0 * q.error;
            }
            Ok((ok, format!("max gap {worst:.2e}")))
        }),
        check("p_alpha integral over (0, 1]", || {
            let r = p_alpha_partial_integral(order(0.5)?, 1.0, 1e-3)?;
            let exact = 2.0 / std::f64::consts::PI.sqrt();
            let err = (r.signed - exact).abs();
            Ok((err < 1e-10, format!("deviation {err:.2e}")))
        }),
        check("p_alpha integral approaches 1", || {
            let r = p_alpha_partial_integral(order(0.5)?, 64.0, 1e-2)?;
            Ok(((r.signed - 1.0).abs() < 0.05, format!("integral up to 64 = {:.6}", r.signed)))
        }),
        check("Mittag-Leffler: order one is exp, half order matches reference", || {
            let e = mittag_leffler_raw(1.0, 1.5, MittagLefflerOptions::default())?;
            let m = mittag_leffler(order(0.5)?, 1.0)?;
            let ok = (e - 1.5f64.exp()).abs() < 1e-12 && (m - 5.008_980_080_762_283).abs() < 1e-12;
            Ok((ok, format!("E_1(1.5) = {e:.12}, E_0.5(1) = {m:.12}")))
        }),
        check("I^alpha monotone on non-decreasing non-negative input", || {
            let grid = UniformGrid::new(2.0, 0.01)?;
            let phi = Trajectory::scalar(grid, |t| t.sqrt() + (t > 1.0) as u8 as f64);
            let a = order(0.4)?;
            let mut prev = f64::NEG_INFINITY;
            let mut ok = true;
            for k in 0..grid.count() {
                let v = rl_integral(&phi, a, k)?[0];
                ok &= v >= prev;
                prev = v;
            }
            Ok((ok, format!("I^0.4 at t=2: {prev:.6}")))
        }),
        check("solver tracks E_0.5(-sqrt t)", || {
            let a = order(0.5)?;
            let grid = UniformGrid::new(1.0, 1e-3)?;
            let p = CaputoProblem::new(|_, x: &[f64], out: &mut [f64]| out[0] = -x[0], vec![1.0], a, 1.0)?;
            let x = solve_caputo(&p, &grid)?;
            let mut worst: f64 = 0.0;
            for (k, t) in grid.nodes().enumerate() {
                worst = worst.max((x.at(k)[0] - mittag_leffler(a, -t.sqrt())?).abs());
            }
            Ok((worst <= 0.01, format!("max error {worst:.3e}")))
        }),
        check("saddle gap vanishes for the pendulum game", || {
            let d = example2().conflict_dynamics(41, 41)?;
            let mut samples = Vec::new();
            for i in 0..5 {
                let f = i as f64;
                samples.push(SaddleSample {
                    t: 0.7 * f,
                    x: vec![f - 2.0, 0.3 * f],
                    s: vec![(f * 1.3).sin(), (f * 0.7).cos() - 0.5],
                });
            }
            let r = saddle_check(&d, &samples, 0.0)?;
            Ok((r.max_gap == 0.0, format!("max gap {:e}", r.max_gap)))
        }),
    ]
}
