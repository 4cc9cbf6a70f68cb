//! A square step transported in 1+2 dimensions with optimized augmentation on
//! troubled cells and the scaling limiter. The full preset takes minutes at
//! high degree.
//!
//! Usage: `cargo run --release --example step_3d [K]`

use augdg::basis::Family;
use augdg::experiments::{run_step, AugmentChoice, StepOptions};

fn main() -> augdg::error::Result<()> {
    let k: usize = std::env::args().nth(1).map_or(1, |s| s.parse().expect("degree"));
    let start = std::time::Instant::now();
    let out = run_step(&StepOptions::new(3, Family::P, k, AugmentChoice::Adaptive))?;
    println!("{}", out.summary);
    println!("{:.1} s", start.elapsed().as_secs_f64());
    Ok(())
}
