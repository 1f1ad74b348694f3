//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Runs the full-size experiments, so it builds with optimizations
//! (see the workspace `profile.test`).

use std::path::Path;
use std::time::{Duration, Instant};

use fracaim::cli;
use fracaim::conflict_sim::{saddle_check, AimingPartition, ControlGrid, Realization, SaddleSample};
use fracaim::fde_solver::{solve_caputo, CaputoProblem};
use fracaim::frac_ops::{
    divided_gl_difference, gamma, gl_weights, mittag_leffler, p_alpha_convolution, p_alpha_partial_integral,
    rl_integral, FractionalOrder, Trajectory, UniformGrid,
};
use fracaim::harness::{example2, parse_config, run_example2, CsvTable};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRng, TestRunner};

type Check = std::result::Result<String, String>;
type Suite = std::result::Result<(), String>;
type ScalarFn = Box<dyn Fn(f64) -> f64>;

fn order(a: f64) -> FractionalOrder {
    FractionalOrder::new(a).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Suite {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] < w[0])
}

fn rel_gap(value: f64, target: f64) -> f64 {
    (value - target).abs() / target
}

/// Runs the CLI in-process and returns the summary's (h, sup_error) columns.
fn cli_summary(args: &[&str], dir: &Path) -> std::result::Result<(Vec<f64>, Vec<f64>, Duration), String> {
    let mut argv = vec!["fracaim"];
    argv.extend_from_slice(args);
    let dir_arg = dir.to_str().unwrap();
    argv.extend_from_slice(&["--out-dir", dir_arg]);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let start = Instant::now();
    let code = cli::run_with_env(&argv, None, &mut out, &mut err);
    let elapsed = start.elapsed();
    if code != 0 {
        return Err(format!("exit {code}: {}", String::from_utf8_lossy(&err)));
    }
    let table = CsvTable::read(&dir.join("summary.csv")).map_err(|e| e.to_string())?;
    let col = |name| -> std::result::Result<Vec<f64>, String> {
        table
            .column(name)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|v| v.ok_or_else(|| format!("empty `{name}` cell")))
            .collect()
    };
    Ok((col("h")?, col("sup_error")?, elapsed))
}

fn fmt_list(xs: &[f64]) -> String {
    xs.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ")
}

// ---------------------------------------------------------------------------

const EXAMPLE1_REPORTED: [f64; 3] = [0.9585, 0.4232, 0.0436];
const EXAMPLE2_REPORTED: [f64; 2] = [0.114, 0.046];

fn example1_regression() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let args = ["approx", "--scenario", "example1", "--euler-step", "0.001", "--h", "0.1", "--h", "0.01", "--h", "0.001"];
    let (hs, errs, elapsed) = cli_summary(&args, dir.path())?;
    ensure(hs == [0.1, 0.01, 0.001], || format!("unexpected h column {hs:?}"))?;
    for (e, r) in errs.iter().zip(EXAMPLE1_REPORTED) {
        ensure(rel_gap(*e, r) <= 0.25, || format!("sup error {e:.4} not within 25% of {r}"))?;
    }
    ensure(strictly_decreasing(&errs), || format!("errors not strictly decreasing: {}", fmt_list(&errs)))?;
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:.1?}"))?;
    Ok(format!("errors [{}] in {elapsed:.1?}", fmt_list(&errs)))
}

fn example2_regression() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "aiming", "--scenario", "example2",
        "--h", "0.1", "--delta", "0.02", "--h", "0.01", "--delta", "0.005",
        "--v-shape", "sine", "--v-amplitude", "1", "--v-frequency", "3", "--v-offset", "0",
        "--u-tilde-shape", "cosine", "--u-tilde-amplitude", "1", "--u-tilde-frequency", "2", "--u-tilde-offset", "0",
    ];
    let (_, errs, elapsed) = cli_summary(&args, dir.path())?;
    ensure(errs.len() == 2, || format!("expected two runs, got {}", errs.len()))?;
    for (e, r) in errs.iter().zip(EXAMPLE2_REPORTED) {
        ensure(rel_gap(*e, r) <= 0.30, || format!("sup error {e:.4} not within 30% of {r}"))?;
    }
    ensure(errs[1] < errs[0], || format!("fine run {:.4} not below coarse {:.4}", errs[1], errs[0]))?;
    ensure(elapsed < Duration::from_secs(180), || format!("took {elapsed:.1?}"))?;
    Ok(format!("errors [{}] in {elapsed:.1?}", fmt_list(&errs)))
}

/// Test functions with their exact R-L derivatives (which equal the Caputo
/// derivatives since x(0) = 0).
fn power_family(a: f64) -> Vec<(&'static str, ScalarFn, ScalarFn)> {
    vec![
        ("t", Box::new(|t| t), Box::new(move |t: f64| t.powf(1.0 - a) / gamma(2.0 - a))),
        ("t^2", Box::new(|t| t * t), Box::new(move |t: f64| 2.0 * t.powf(2.0 - a) / gamma(3.0 - a))),
    ]
}

fn kernel_identity() -> Check {
    const HORIZON: f64 = 2.0;
    const QUAD_STEP: f64 = 2e-3;
    const FACTOR: f64 = 5.0;
    let mut worst = 0.0f64;
    for a in [0.3, 0.5, 0.7] {
        for h in [0.5, 0.1] {
            let grid = UniformGrid::new(HORIZON, h).unwrap();
            for (name, x, phi) in power_family(a) {
                let traj = Trajectory::scalar(grid, &x);
                for (k, t) in grid.nodes().enumerate() {
                    let lhs = divided_gl_difference(&traj, order(a), h, k).map_err(|e| e.to_string())?[0];
                    let q = p_alpha_convolution(&phi, order(a), t, h, QUAD_STEP).map_err(|e| e.to_string())?;
                    let gap = (lhs - q.value).abs();
                    ensure(gap <= FACTOR * q.error, || {
                        format!("α={a} h={h} x={name} t={t}: gap {gap:.3e} > {FACTOR}×{:.3e}", q.error)
                    })?;
                    if q.error > 0.0 {
                        worst = worst.max(gap / q.error);
                    }
                }
            }
        }
    }
    Ok(format!("worst gap/error ratio {worst:.3}"))
}

/// Doubling study for the signed partial integral of p_α. The references are
/// the closed form Σ_{j<U} w_j (U−j)^α / Γ(α+1) evaluated in 30-digit
/// arithmetic; the calibrated upper limit is the first power of two at which
/// the integral is within 0.05 of 1.
const P_ALPHA_REFERENCE: [(f64, [f64; 5]); 3] = [
    (0.3, [1.1142425085473018, 1.0375206869452452, 1.0137708738112539, 1.0053219981367376, 1.0021090356671289]),
    (0.5, [std::f64::consts::FRAC_2_SQRT_PI, 1.0315795380579744, 1.0095584722409994, 1.0031398337694548, 1.0010710188686041]),
    (0.7, [1.1005474055236657, 1.0174613510139044, 1.0043313027864385, 1.0012070935659262, 1.0003541512713107]),
];
const P_ALPHA_CALIBRATED_UPPER: f64 = 2.0;
const P_ALPHA_QUAD_STEP: f64 = 1e-2;

fn p_alpha_normalization() -> Check {
    let mut summary = Vec::new();
    for (a, reference) in P_ALPHA_REFERENCE {
        let mut reached = None;
        for (i, r) in reference.iter().enumerate() {
            let upper = f64::from(1u32 << i);
            let got = p_alpha_partial_integral(order(a), upper, P_ALPHA_QUAD_STEP)
                .map_err(|e| e.to_string())?
                .signed;
            ensure((got - r).abs() <= 1e-5, || format!("α={a} U={upper}: {got:.8} vs reference {r:.8}"))?;
            if reached.is_none() && (got - 1.0).abs() <= 0.05 {
                reached = Some((upper, got));
            }
        }
        let (upper, got) = reached.ok_or_else(|| format!("α={a}: never within 0.05 of 1"))?;
        ensure(upper == P_ALPHA_CALIBRATED_UPPER, || {
            format!("α={a}: reached 1±0.05 at U={upper}, calibrated {P_ALPHA_CALIBRATED_UPPER}")
        })?;
        summary.push(format!("α={a}: {got:.4} at U={upper}"));
    }
    Ok(summary.join("; "))
}

fn sin_caputo(a: f64) -> impl Fn(f64) -> f64 {
    move |t: f64| {
        (0..40)
            .map(|k| {
                let p = 2.0 * k as f64 + 1.0;
                (-1f64).powi(k) * t.powf(p - a) / gamma(p + 1.0 - a)
            })
            .sum()
    }
}

fn gl_convergence() -> Check {
    const HORIZON: f64 = 2.0;
    const FINEST: f64 = 0.0125;
    let grid = UniformGrid::new(HORIZON, FINEST).unwrap();
    let hs: Vec<f64> = (0..6).map(|i| 0.4 / f64::from(1u32 << i)).collect();
    let mut finest = Vec::new();
    for a in [0.3, 0.7] {
        let mut family = power_family(a);
        family.push(("sin t", Box::new(f64::sin), Box::new(sin_caputo(a))));
        for (name, x, d) in family {
            let traj = Trajectory::scalar(grid, &x);
            let mut gaps = Vec::new();
            for &h in &hs {
                let mut gap = 0.0f64;
                for (k, t) in grid.nodes().enumerate() {
                    let v = divided_gl_difference(&traj, order(a), h, k).map_err(|e| e.to_string())?[0];
                    gap = gap.max((v - d(t)).abs());
                }
                gaps.push(gap);
            }
            ensure(gaps.windows(2).all(|w| w[1] <= w[0]), || {
                format!("α={a} x={name}: gaps not non-increasing [{}]", fmt_list(&gaps))
            })?;
            let last = *gaps.last().unwrap();
            ensure(last <= 0.05, || format!("α={a} x={name}: gap {last:.4} at h={FINEST}"))?;
            finest.push(last);
        }
    }
    Ok(format!("finest-h gaps [{}]", fmt_list(&finest)))
}

fn mittag_leffler_oracle() -> Check {
    let a = order(0.5);
    let problem = CaputoProblem::new(|_t, x: &[f64], out: &mut [f64]| out[0] = -x[0], vec![1.0], a, 1.0)
        .map_err(|e| e.to_string())?;
    let grid = UniformGrid::new(1.0, 1e-4).unwrap();
    let x = solve_caputo(&problem, &grid).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (k, t) in grid.nodes().enumerate() {
        let exact = mittag_leffler(a, -t.sqrt()).map_err(|e| e.to_string())?;
        worst = worst.max((x.at(k)[0] - exact).abs());
    }
    ensure(worst <= 0.01, || format!("max error {worst:.3e}"))?;
    Ok(format!("max error {worst:.3e}"))
}

// --- property suites -------------------------------------------------------

fn product_binomial(a: f64, j: usize) -> f64 {
    let (mut num, mut den) = (1.0, 1.0);
    for i in 1..=j {
        num *= i as f64 - 1.0 - a;
        den *= i as f64;
    }
    num / den
}

fn weight_recurrence() -> Suite {
    for i in 1..=9 {
        let a = f64::from(i) / 10.0;
        let table = gl_weights(order(a), 50).map_err(|e| e.to_string())?;
        for j in 0..=50 {
            let (w, p) = (table.get(j), product_binomial(a, j));
            ensure((w - p).abs() <= 1e-12 * p.abs(), || format!("α={a} j={j}: {w:e} vs {p:e}"))?;
        }
    }
    Ok(())
}

/// Seeded runner so the suite is reproducible; no failure files are written.
fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    let rng = TestRng::deterministic_rng(config.rng_algorithm);
    TestRunner::new_with_rng(config, rng)
}

fn integral_monotonicity() -> Suite {
    let mut runner = runner(200);
    let strategy = (0.05f64..0.95, prop::collection::vec(0.0f64..2.0, 2..120), 0.0f64..3.0);
    runner
        .run(&strategy, |(a, increments, start)| {
            let values: Vec<f64> = increments
                .iter()
                .scan(start, |acc, d| {
                    *acc += d;
                    Some(*acc)
                })
                .collect();
            let grid = UniformGrid::new(values.len() as f64 * 0.05 - 0.05, 0.05).unwrap();
            let phi = Trajectory::new(grid, 1, values).unwrap();
            let integral: Vec<f64> = (0..grid.count()).map(|m| rl_integral(&phi, order(a), m).unwrap()[0]).collect();
            for (m, w) in integral.windows(2).enumerate() {
                prop_assert!(w[1] >= w[0], "α={} decrease at m={}: {} -> {}", a, m, w[0], w[1]);
            }
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn saddle_exact() -> Suite {
    let scenario = example2();
    let mut runner = runner(64);
    let coord = -5.0f64..5.0;
    let samples = prop::collection::vec((0.0f64..10.0, coord.clone(), coord.clone(), coord.clone(), coord), 1..20);
    for points in [2, 3, 11, 201] {
        let d = scenario.conflict_dynamics(points, points).map_err(|e| e.to_string())?;
        runner
            .run(&samples, |raw| {
                let samples: Vec<SaddleSample> = raw
                    .into_iter()
                    .map(|(t, x1, x2, s1, s2)| SaddleSample { t, x: vec![x1, x2], s: vec![s1, s2] })
                    .collect();
                let report = saddle_check(&d, &samples, 0.0).unwrap();
                prop_assert_eq!(report.max_gap, 0.0, "grid of {} points", points);
                prop_assert!(report.holds());
                Ok(())
            })
            .map_err(|e| e.to_string())?;
    }
    Ok(())
}

fn aiming_determinism() -> Suite {
    let args = ["aiming", "--scenario", "example2", "--h", "0.1", "--delta", "0.02"];
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    cli_summary(&args, a.path())?;
    cli_summary(&args, b.path())?;
    let mut names: Vec<_> = std::fs::read_dir(a.path())
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    ensure(names.len() >= 3, || format!("only {} files written", names.len()))?;
    for name in names {
        let left = std::fs::read(a.path().join(&name)).map_err(|e| e.to_string())?;
        let right = std::fs::read(b.path().join(&name)).map_err(|e| e.to_string())?;
        ensure(left == right, || format!("{} differs between runs", name.to_string_lossy()))?;
    }
    Ok(())
}

fn piecewise_constant(r: &Realization, partition: &AimingPartition) -> bool {
    let idx = partition.indices();
    idx.windows(2).all(|cell| (cell[0]..cell[1]).all(|k| r.at(k) == r.at(cell[0])))
}

fn realization_structure() -> Suite {
    let text = "scenario = example2\nh = 0.1\ndelta = 0.02\nh = 0.05\ndelta = 0.01\n";
    let config = parse_config(text).map_err(|e| e.to_string())?;
    let report = run_example2(&config).map_err(|e| e.to_string())?;
    let p = ControlGrid::uniform(-1.0, 1.0, config.p_grid_points).map_err(|e| e.to_string())?;
    let q = ControlGrid::uniform(-1.0, 1.0, config.q_grid_points).map_err(|e| e.to_string())?;
    let grid = config.grid().map_err(|e| e.to_string())?;
    for run in &report.runs {
        let partition = AimingPartition::uniform(run.delta, &grid).map_err(|e| e.to_string())?;
        let r = &run.result;
        let tag = format!("h={} δ={}", run.h, run.delta);
        ensure(piecewise_constant(&r.u, &partition), || format!("{tag}: u not piecewise constant"))?;
        ensure(piecewise_constant(&r.v_tilde, &partition), || format!("{tag}: ṽ not piecewise constant"))?;
        ensure(r.u.members_of(&p), || format!("{tag}: u leaves P"))?;
        ensure(r.v_tilde.members_of(&q), || format!("{tag}: ṽ leaves Q"))?;
        ensure(r.v.within_box_of(&q), || format!("{tag}: v outside Q's box"))?;
        ensure(r.u_tilde.within_box_of(&p), || format!("{tag}: ũ outside P's box"))?;
    }
    Ok(())
}

fn property_suites() -> Check {
    let suites: [(&str, fn() -> Suite); 5] = [
        ("weights", weight_recurrence),
        ("monotonicity", integral_monotonicity),
        ("saddle", saddle_exact),
        ("determinism", aiming_determinism),
        ("realizations", realization_structure),
    ];
    let mut passed = Vec::new();
    for (name, suite) in suites {
        suite().map_err(|e| format!("{name}: {e}"))?;
        passed.push(name);
    }
    Ok(passed.join(", "))
}

/// Convergence of the approximation as h, δ → 0 is only observable through
/// refinement sequences; this criterion holds exactly when the monotone parts
/// of the Example 1, Example 2 and G-L convergence checks hold.
fn refinement_substitute(prior: &[(usize, bool)]) -> Check {
    let covered = [1, 2, 5];
    let failed: Vec<_> = covered
        .iter()
        .filter(|n| !prior.iter().any(|(m, ok)| m == *n && *ok))
        .collect();
    ensure(failed.is_empty(), || format!("refinement criteria failed: {failed:?}"))?;
    Ok("covered by monotone refinement in criteria 1, 2, 5".into())
}

fn main() {
    let criteria: [(usize, &str, fn() -> Check); 7] = [
        (1, "example 1 regression", example1_regression),
        (2, "example 2 regression", example2_regression),
        (3, "kernel identity", kernel_identity),
        (4, "p_alpha normalization", p_alpha_normalization),
        (5, "G-L to R-L convergence", gl_convergence),
        (6, "Mittag-Leffler solver oracle", mittag_leffler_oracle),
        (7, "property suites", property_suites),
    ];
    let mut outcomes: Vec<(usize, bool)> = Vec::new();
    let report = |outcomes: &mut Vec<(usize, bool)>, n: usize, name: &str, result: Check| {
        let (status, detail) = match &result {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("{status}  criterion {n}: {name} — {detail}");
        outcomes.push((n, result.is_ok()));
    };
    for (n, name, check) in criteria {
        report(&mut outcomes, n, name, check());
    }
    let substitute = refinement_substitute(&outcomes);
    report(&mut outcomes, 8, "refinement in place of existence theorems", substitute);

    let failed = outcomes.iter().filter(|(_, ok)| !ok).count();
    println!("{} of {} criteria passed", outcomes.len() - failed, outcomes.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
