//! L2 errors and observed orders for the smooth 2D manufactured solution, with
//! the augmented and limited errors alongside.
//!
//! Usage: `cargo run --release --example convergence_2d [FAMILY] [K]`

use augdg::basis::Family;
use augdg::experiments::{run_convergence, AugmentChoice, ConvergenceOptions};

fn main() -> augdg::error::Result<()> {
    let mut args = std::env::args().skip(1);
    let family: Family = args.next().as_deref().unwrap_or("Q").parse()?;
    let k: usize = args.next().map_or(2, |s| s.parse().expect("degree"));
    let mut opts = ConvergenceOptions::new(2, family, k, &[10, 20, 40, 80]);
    opts.augment = if family == Family::P { AugmentChoice::Optimize } else { AugmentChoice::Table };
    opts.limit = true;
    println!("{}", run_convergence(&opts)?);
    Ok(())
}
