//! Acceptance criteria 1-8. Each test prints one PASS/FAIL line for its
//! criterion, preceded by the measured values, and asserts the outcome.
//!
//! Published values are given to two or three significant digits; a value
//! counts as matching when its relative distance from the interval of numbers
//! that print that way (rounded or truncated) is within the tolerance. The raw
//! relative error against the printed number is shown alongside.

mod common;

use std::sync::OnceLock;
use std::time::Instant;

use augdg::augmentation::{cfl_sweep, grid_points, optimized_sweep, CheckSet, Regime, SearchOptions};
use augdg::basis::{build_basis, Family, SpaceSpec};
use augdg::dg::{sweep_solve, SweepOptions};
use augdg::experiments::{
    choose_space, manufactured_2d, run_appendix_a, run_convergence, run_counterexample, run_step, AugmentChoice,
    ConvergenceOptions, Counterexample, ResultTable, StepOptions,
};
use augdg::limiter::{limit_field, lobatto_points};
use common::{last_digit_unit, pass_line, printed_distance, random_cell, relative};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const NONNEG: f64 = 1e-12;

fn report(criterion: u32, ok: bool, summary: &str) {
    println!("criterion {criterion}: {} {summary}", pass_line(ok));
}

/// Compare one measured value with a printed one; prints a line and returns
/// whether it is within `tol` of the printed interval.
fn compare(label: &str, value: f64, printed: f64, sig: i32, tol: f64) -> bool {
    let d = printed_distance(value, printed, last_digit_unit(printed, sig));
    let ok = d <= tol && value.signum() == printed.signum();
    println!(
        "  {label:<40} ours {value:+.4e}  printed {printed:+.*e}  raw {:5.2}%  beyond interval {:5.2}%  {}",
        (sig - 1) as usize,
        100.0 * relative(value, printed),
        100.0 * d,
        if ok { "ok" } else { "MISMATCH" }
    );
    ok
}

// ---------------------------------------------------------------- criterion 1

const EXACT_TOL: f64 = 0.02;
const DG_TOL: f64 = 0.10;

/// (exact, unaugmented, augmented) per row, two significant digits.
const S2_REFERENCE: [[f64; 3]; 4] =
    [[9.4e-4, -2.5e-5, 1.9e-5], [4.7e-4, -1.2e-5, 9.8e-6], [2.3e-4, -6.4e-6, 4.9e-6], [1.1e-4, -3.2e-6, 2.4e-6]];
const Q2_REFERENCE: [[f64; 3]; 5] = [
    [9.5e-3, -3.5e-4, 2.6e-5],
    [4.7e-3, -1.7e-4, 1.3e-5],
    [2.3e-3, -8.8e-5, 6.5e-6],
    [1.1e-3, -4.4e-5, 3.2e-6],
    [5.9e-4, -2.2e-5, 1.6e-6],
];
/// Three significant digits.
const P2_REFERENCE: [[f64; 3]; 3] =
    [[3.37e-3, -1.09e-4, 1.47e-3], [5.03e-11, -1.62e-12, 2.19e-11], [7.49e-19, -2.42e-20, 3.27e-19]];

#[test]
fn criterion_1_counterexample_tables() {
    let start = Instant::now();
    let mut ok = true;
    // S2 and P2 use the designated closed-form augmentation, so their values
    // are compared; for Q2 the cell has B = 1, which neither closed form
    // covers, the augmented space comes from the optimizer and only its sign
    // is compared.
    let cases: [(Counterexample, &[[f64; 3]], i32, bool); 3] = [
        (Counterexample::S2, &S2_REFERENCE, 2, true),
        (Counterexample::Q2, &Q2_REFERENCE, 2, false),
        (Counterexample::P2, &P2_REFERENCE, 3, true),
    ];
    for (case, reference, sig, aug_values) in cases {
        let t = run_counterexample(case, 0).unwrap();
        println!("{case:?}:");
        let cols = ["exact", "unaugmented", "augmented"].map(|c| t.column(c).unwrap());
        assert_eq!(cols[0].len(), reference.len());
        for (i, row) in reference.iter().enumerate() {
            ok &= compare(&format!("row {} exact", i + 1), cols[0][i], row[0], sig, EXACT_TOL);
            ok &= compare(&format!("row {} unaugmented", i + 1), cols[1][i], row[1], sig, DG_TOL);
            if aug_values {
                ok &= compare(&format!("row {} augmented", i + 1), cols[2][i], row[2], sig, DG_TOL);
            } else {
                let sign_ok = cols[2][i] > 0.0;
                println!(
                    "  row {} augmented (sign only)              ours {:+.4e}  printed {:+.1e}  {}",
                    i + 1,
                    cols[2][i],
                    row[2],
                    if sign_ok { "ok" } else { "MISMATCH" }
                );
                ok &= sign_ok;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let fast = secs < 10.0;
    ok &= fast;
    report(1, ok, &format!("counterexample tables ({secs:.1} s, limit 10 s)"));
    assert!(ok, "criterion 1 failed");
}

// ---------------------------------------------------------------- criterion 2

const ERROR_TOL_2D: f64 = 0.05;
const ORDER_TOL_2D: f64 = 0.15;
const LIMITER_CHANGE_TOL: f64 = 0.02;

struct ManufacturedRow {
    error: f64,
    order: f64,
    min_uh: f64,
    aug_error: f64,
    aug_order: f64,
}

const fn row(error: f64, order: f64, min_uh: f64, aug_error: f64, aug_order: f64) -> ManufacturedRow {
    ManufacturedRow { error, order, min_uh, aug_error, aug_order }
}

const NAN: f64 = f64::NAN;

/// Rows N = 10, 20, 40, 80 of the 2D manufactured-solution table.
fn manufactured_rows() -> Vec<(Family, usize, AugmentChoice, [ManufacturedRow; 4])> {
    vec![
        (
            Family::Q,
            2,
            AugmentChoice::Table,
            [
                row(2.01e-3, NAN, 2.74e-4, 2.02e-3, NAN),
                row(2.97e-4, 2.76, -2.93e-4, 2.99e-4, 2.75),
                row(4.29e-5, 2.79, -1.76e-5, 4.32e-5, 2.79),
                row(5.31e-6, 3.01, -2.98e-6, 5.35e-6, 3.01),
            ],
        ),
        (
            Family::S,
            2,
            AugmentChoice::Table,
            [
                row(2.01e-3, NAN, 2.85e-4, 2.02e-3, NAN),
                row(2.97e-4, 2.76, -2.93e-4, 2.97e-4, 2.76),
                row(4.29e-5, 2.79, -1.76e-5, 4.28e-5, 2.79),
                row(5.31e-6, 3.01, -2.98e-6, 5.29e-6, 3.01),
            ],
        ),
        (
            Family::P,
            2,
            AugmentChoice::Optimize,
            [
                row(2.02e-3, NAN, 4.61e-4, 2.00e-3, NAN),
                row(2.98e-4, 2.75, -3.59e-4, 2.94e-4, 2.76),
                row(4.29e-5, 2.79, -2.32e-5, 4.23e-5, 2.79),
                row(5.31e-6, 3.01, -1.46e-6, 5.28e-6, 3.01),
            ],
        ),
        (
            Family::Q,
            3,
            AugmentChoice::Table,
            [
                row(1.68e-4, NAN, 2.63e-4, 1.67e-4, NAN),
                row(1.18e-5, 3.83, -1.44e-5, 1.17e-5, 3.83),
                row(8.32e-7, 3.82, -8.58e-7, 8.31e-7, 3.82),
                row(5.18e-8, 4.00, -6.24e-8, 5.17e-8, 4.00),
            ],
        ),
        (
            Family::P,
            4,
            AugmentChoice::Optimize,
            [
                row(1.12e-5, NAN, 8.84e-7, 1.11e-5, NAN),
                row(3.94e-7, 4.83, -8.77e-8, 3.89e-7, 4.83),
                row(1.27e-8, 4.94, -1.44e-9, 1.26e-8, 4.94),
                row(4.01e-10, 4.99, -4.27e-11, 3.99e-10, 4.98),
            ],
        ),
    ]
}

const NS_2D: [usize; 4] = [10, 20, 40, 80];

/// Convergence tables with augmentation and limiting for every
/// 2D manufactured-solution space, computed once and shared by criteria 2 and 7.
fn manufactured_runs() -> &'static (Vec<ResultTable>, f64) {
    static RUNS: OnceLock<(Vec<ResultTable>, f64)> = OnceLock::new();
    RUNS.get_or_init(|| {
        let start = Instant::now();
        let tables = manufactured_rows()
            .into_iter()
            .map(|(family, k, augment, _)| {
                let mut opts = ConvergenceOptions::new(2, family, k, &NS_2D);
                opts.augment = augment;
                opts.limit = true;
                run_convergence(&opts).unwrap()
            })
            .collect();
        (tables, start.elapsed().as_secs_f64())
    })
}

fn compare_order(label: &str, value: f64, printed: f64, tol: f64) -> bool {
    let ok = (value - printed).abs() <= tol;
    println!(
        "  {label:<40} ours {value:6.3}  printed {printed:5.2}  diff {:+.3}  {}",
        value - printed,
        if ok { "ok" } else { "MISMATCH" }
    );
    ok
}

#[test]
fn criterion_2_convergence_2d() {
    let (tables, secs) = manufactured_runs();
    let mut ok = true;
    for ((family, k, _, reference), t) in manufactured_rows().iter().zip(tables) {
        println!("{family}{k}:");
        let col = |c: &str| t.column(c).unwrap();
        let (err, ord, min_uh, aerr, aord) =
            (col("error"), col("order"), col("min_uh"), col("aug_error"), col("aug_order"));
        for (i, p) in reference.iter().enumerate() {
            let n = NS_2D[i];
            ok &= compare(&format!("N={n} error"), err[i], p.error, 3, ERROR_TOL_2D);
            ok &= compare(&format!("N={n} augmented error"), aerr[i], p.aug_error, 3, ERROR_TOL_2D);
            if i > 0 {
                ok &= compare_order(&format!("N={n} order"), ord[i], p.order, ORDER_TOL_2D);
                ok &= compare_order(&format!("N={n} augmented order"), aord[i], p.aug_order, ORDER_TOL_2D);
            }
            let sign_ok = min_uh[i].signum() == p.min_uh.signum();
            println!(
                "  {:<40} ours {:+.4e}  printed {:+.2e}  {}",
                format!("N={n} min u_h (sign)"),
                min_uh[i],
                p.min_uh,
                if sign_ok { "ok" } else { "MISMATCH" }
            );
            ok &= sign_ok;
        }
    }
    let fast = *secs < 300.0;
    ok &= fast;
    report(2, ok, &format!("2D convergence table ({secs:.0} s shared with criterion 7, limit 300 s)"));
    assert!(ok, "criterion 2 failed");
}

// ---------------------------------------------------------------- criterion 3

const ERROR_TOL_3D: f64 = 0.10;
const ORDER_TOL_3D: f64 = 0.3;

#[test]
fn criterion_3_convergence_3d() {
    let start = Instant::now();
    let ns = [2, 4, 8];
    let mut ok = true;
    // (errors, orders) of the standard spaces, N = 2, 4, 8
    let q_rows: [(Family, usize, [f64; 3], [f64; 2]); 2] = [
        (Family::Q, 2, [3.6674e-5, 5.4880e-6, 5.9162e-7], [2.74, 3.21]),
        (Family::Q, 3, [4.285e-6, 2.408e-7, 9.773e-9], [4.14, 4.62]),
    ];
    for (family, k, errors, orders) in q_rows {
        let t = run_convergence(&ConvergenceOptions::new(3, family, k, &ns)).unwrap();
        println!("{family}{k}:");
        let (err, ord) = (t.column("error").unwrap(), t.column("order").unwrap());
        for i in 0..3 {
            let sig = if family == Family::Q && k == 2 { 5 } else { 4 };
            ok &= compare(&format!("N={} error", ns[i]), err[i], errors[i], sig, ERROR_TOL_3D);
            if i > 0 {
                ok &= compare_order(&format!("N={} order", ns[i]), ord[i], orders[i - 1], ORDER_TOL_3D);
            }
        }
    }
    // P1: orders only, for the standard and the augmented space
    let mut opts = ConvergenceOptions::new(3, Family::P, 1, &ns);
    opts.augment = AugmentChoice::Optimize;
    let t = run_convergence(&opts).unwrap();
    println!("P1:");
    let (ord, aord) = (t.column("order").unwrap(), t.column("aug_order").unwrap());
    for (i, (po, pa)) in [(1.98, 1.88), (2.04, 1.99)].into_iter().enumerate() {
        ok &= compare_order(&format!("N={} order", ns[i + 1]), ord[i + 1], po, ORDER_TOL_3D);
        ok &= compare_order(&format!("N={} augmented order", ns[i + 1]), aord[i + 1], pa, ORDER_TOL_3D);
    }
    let secs = start.elapsed().as_secs_f64();
    ok &= secs < 600.0;
    report(3, ok, &format!("3D convergence table ({secs:.0} s, limit 600 s)"));
    assert!(ok, "criterion 3 failed");
}

// ---------------------------------------------------------------- criterion 4

#[test]
fn criterion_4_cfl_robustness() {
    let mut ok = true;
    let spaces = [(Family::Q, 2), (Family::Q, 3), (Family::Q, 4), (Family::S, 2), (Family::S, 3), (Family::S, 4)];
    for (family, k) in spaces {
        for regime in Regime::ALL {
            let samples = cfl_sweep(family, k, regime, 100, 11).unwrap();
            let worst = samples.iter().map(|s| s.min_v).fold(f64::INFINITY, f64::min);
            let in_regime = samples.iter().all(|s| regime.contains(family, k, s.b));
            let good = worst >= -NONNEG && in_regime && samples.len() == 100;
            println!("  {family}{k} {regime:<6} 100 tuples, smallest min v {worst:+.3e}  {}", if good { "ok" } else { "FAIL" });
            ok &= good;
        }
    }
    for k in 1..=4 {
        let samples = optimized_sweep(k, k + 2, 25, 13, &SearchOptions::default()).unwrap();
        let worst = samples.iter().map(|s| s.min_v).fold(f64::INFINITY, f64::min);
        let good = worst >= -NONNEG && samples.len() == 25;
        println!("  P{k} optimized (r = {}) 25 tuples, smallest min v {worst:+.3e}  {}", k + 2, if good { "ok" } else { "FAIL" });
        ok &= good;
    }
    report(4, ok, "closed-form and optimized certificates over random parameters");
    assert!(ok, "criterion 4 failed");
}

// ---------------------------------------------------------------- criterion 5

#[test]
fn criterion_5_variable_coefficients() {
    let t = run_counterexample(Counterexample::Variable, 0).unwrap();
    let min_v = t.column("min_v").unwrap();
    let mut ok = true;
    ok &= compare("P1 + classic psi, min v", min_v[0], -1.268e-4, 4, 0.10);
    ok &= compare("Q1 + classic psi, min v", min_v[1], -1.363e-3, 4, 0.10);
    for (i, name) in [(2, "P1 optimized"), (3, "Q1 optimized")] {
        let good = min_v[i] > 0.0;
        println!("  {name:<40} ours {:+.4e}  (sign only)  {}", min_v[i], if good { "ok" } else { "MISMATCH" });
        ok &= good;
    }
    report(5, ok, "variable-coefficient test functions");
    assert!(ok, "criterion 5 failed");
}

// ---------------------------------------------------------------- criterion 6

#[test]
fn criterion_6_closed_form_q2() {
    let out = run_appendix_a(10_000, 50, 17).unwrap();
    println!(
        "  sign checks: {} samples, {} violations; cross-validation {:.2e} over {} B; grid minimum {:+.4e} over {} B",
        out.signs.samples,
        out.signs.violations.len(),
        out.cross_validation,
        out.table.rows.len(),
        out.grid_min,
        out.table.rows.len()
    );
    let ok = out.signs.samples >= 10_000
        && out.signs.passed()
        && out.table.rows.len() >= 50
        && out.cross_validation <= 1e-8
        && out.grid_min >= -1e-10;
    report(6, ok, "closed-form Q2 test function oracle");
    assert!(ok, "criterion 6 failed");
}

// ---------------------------------------------------------------- criterion 7

const MEAN_TOL: f64 = 1e-13;

#[test]
fn criterion_7_limiter() {
    let mut ok = true;

    // mean preservation on augmented manufactured-solution fields
    let m = manufactured_2d();
    let mesh = m.mesh(20).unwrap();
    for (family, k, choice) in
        [(Family::Q, 2, AugmentChoice::Table), (Family::Q, 3, AugmentChoice::Table), (Family::P, 2, AugmentChoice::Optimize)]
    {
        let base = build_basis(SpaceSpec::new(family, k, 2)).unwrap();
        let chosen = choose_space(&base, choice, None, CheckSet::GaussWithInflow, &mesh, &m.problem, 0).unwrap().unwrap();
        let so = SweepOptions { augment: choice.mode(), ..SweepOptions::default() };
        let field = sweep_solve(&mesh, &m.problem, &base, Some(&chosen.basis), &so).unwrap().field;
        let (limited, report) = limit_field(&field).unwrap();
        let drift = field.averages().iter().zip(limited.averages()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let good = drift <= MEAN_TOL && report.limited_cells > 0;
        println!(
            "  {family}{k} N=20: {} cells limited, largest change of a cell average {drift:.1e}  {}",
            report.limited_cells,
            if good { "ok" } else { "FAIL" }
        );
        ok &= good;
    }

    // step presets: non-negativity after limiting, and idempotence
    let mut step_cases: Vec<(usize, Family, usize)> =
        vec![(2, Family::Q, 2), (2, Family::S, 2), (2, Family::Q, 3), (2, Family::Q, 4)];
    step_cases.extend((1..=4).map(|k| (3, Family::P, k)));
    for (dim, family, k) in step_cases {
        let out = run_step(&StepOptions::new(dim, family, k, AugmentChoice::Adaptive)).unwrap();
        let unlimited_min = out.summary.rows[0][1];
        let Some(lim) = &out.limited else {
            println!("  {dim}D {family}{k}: limiting impossible, negative cell average  FAIL");
            ok = false;
            continue;
        };
        let pts = lobatto_points(k, dim).unwrap();
        let min_lobatto = lim.field.min_at_points(&pts);
        let (again, _) = limit_field(&lim.field).unwrap();
        let mut change = 0.0f64;
        let mut scale = 0.0f64;
        for c in 0..again.n_cells() {
            for (a, b) in again.coefficients(c).iter().zip(lim.field.coefficients(c)) {
                change = change.max((a - b).abs());
                scale = scale.max(b.abs());
            }
        }
        let drift = lim.field.averages().iter().zip(again.averages()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let good = min_lobatto >= -NONNEG && change <= 1e-12 * scale.max(1.0) && drift <= MEAN_TOL;
        println!(
            "  {dim}D {family}{k} step: unlimited min {unlimited_min:+.3e}, limited min at Lobatto points {min_lobatto:+.3e}, \
             re-limiting changes coefficients by {change:.1e} and averages by {drift:.1e}  {}",
            if good { "ok" } else { "FAIL" }
        );
        ok &= good;
    }

    // accuracy: limiting the augmented 2D manufactured solutions
    let (tables, _) = manufactured_runs();
    for ((family, k, _, _), t) in manufactured_rows().iter().zip(tables) {
        let change = t.column("limited_change").unwrap();
        let worst = change.iter().copied().fold(0.0, f64::max);
        let good = worst < LIMITER_CHANGE_TOL;
        let shown: Vec<String> = change.iter().map(|c| format!("{:.3}%", 100.0 * c)).collect();
        println!("  {family}{k} L2 error change per mesh: {}  {}", shown.join(", "), if good { "ok" } else { "FAIL" });
        ok &= good;
    }
    report(7, ok, "limiter mean preservation, idempotence, non-negativity and accuracy");
    assert!(ok, "criterion 7 failed");
}

// ---------------------------------------------------------------- criterion 8

const SUITE_SIZE: usize = 200;

/// `(negative unaugmented, smallest augmented average, skipped uncertified)`.
fn theorem_suite(seed: u64, neighbourhood: bool) -> (usize, f64, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut negative, mut worst, mut skipped, mut done) = (0, f64::INFINITY, 0, 0);
    while done < SUITE_SIZE {
        let cell = random_cell(&mut rng, neighbourhood).unwrap();
        if cell.certificate_min < -NONNEG {
            skipped += 1;
            continue;
        }
        let (plain, aug) = cell.averages().unwrap();
        negative += usize::from(plain < 0.0);
        worst = worst.min(aug);
        done += 1;
    }
    (negative, worst, skipped)
}

#[test]
fn criterion_8_theorem_suite() {
    let mut ok = true;
    let (neg, worst, skipped) = theorem_suite(8, false);
    println!(
        "  wide parameter ranges: {SUITE_SIZE} certified cells ({skipped} uncertified skipped), smallest augmented \
         average {worst:+.3e}, {neg} unaugmented averages negative"
    );
    ok &= worst >= -NONNEG;
    let mut negative_fraction = neg as f64 / SUITE_SIZE as f64;
    if negative_fraction < 0.10 {
        let (neg, worst, skipped) = theorem_suite(88, true);
        println!(
            "  regenerated near the known failure: {SUITE_SIZE} certified cells ({skipped} uncertified skipped), \
             smallest augmented average {worst:+.3e}, {neg} unaugmented averages negative"
        );
        ok &= worst >= -NONNEG;
        negative_fraction = neg as f64 / SUITE_SIZE as f64;
    }
    ok &= negative_fraction >= 0.10;
    report(8, ok, &format!("non-negative averages with certified spaces ({:.1}% unaugmented negative)", 100.0 * negative_fraction));
    assert!(ok, "criterion 8 failed");
}

#[test]
fn printed_interval_helper() {
    // 9.4e-4 printed: anything in [9.35e-4, 9.5e-4] is at distance zero
    assert_eq!(printed_distance(9.6e-4, 9.4e-4, 1e-5) > 0.0, true);
    assert_eq!(printed_distance(9.45e-4, 9.4e-4, 1e-5), 0.0);
    assert_eq!(printed_distance(-9.36e-4, -9.4e-4, 1e-5), 0.0);
    assert!((last_digit_unit(9.4e-4, 2) - 1e-5).abs() < 1e-20);
    assert!(grid_points(3, 2).len() == 9);
}
