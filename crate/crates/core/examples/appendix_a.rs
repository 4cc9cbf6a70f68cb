//! Closed-form special test function of the augmented Bernstein Q2 space:
//! sign checks of its coefficient polynomials and comparison with the
//! numerical linear solve.

use augdg::experiments::run_appendix_a;

fn main() -> augdg::error::Result<()> {
    let out = run_appendix_a(10_000, 10, 1)?;
    println!("{}", out.table);
    println!("sign violations: {} of {} samples", out.signs.violations.len(), out.signs.samples);
    println!("closed form vs linear solve: {:.2e}", out.cross_validation);
    println!("smallest grid minimum of v: {:.4e}", out.grid_min);
    println!("{}", if out.passed() { "all checks pass" } else { "some checks FAIL" });
    Ok(())
}
