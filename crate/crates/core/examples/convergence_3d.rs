//! L2 errors and observed orders for the smooth 3D manufactured solution.

use augdg::basis::Family;
use augdg::experiments::{run_convergence, ConvergenceOptions};

fn main() -> augdg::error::Result<()> {
    for (family, k) in [(Family::P, 1), (Family::Q, 2), (Family::Q, 3)] {
        println!("{}", run_convergence(&ConvergenceOptions::new(3, family, k, &[2, 4, 8]))?);
    }
    Ok(())
}
