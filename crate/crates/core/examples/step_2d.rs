//! A step profile transported in 1+1 dimensions: negative values without the
//! limiter, non-negative Lobatto values with it. Writes the final-time
//! profile to `step_2d_profile.csv`.

use std::path::Path;

use augdg::basis::Family;
use augdg::experiments::{run_step, AugmentChoice, StepOptions};

fn main() -> augdg::error::Result<()> {
    for (family, k) in [(Family::Q, 2), (Family::S, 2), (Family::Q, 3), (Family::Q, 4)] {
        let out = run_step(&StepOptions::new(2, family, k, AugmentChoice::Adaptive))?;
        println!("{}", out.summary);
        if (family, k) == (Family::Q, 2) {
            out.profile.save(Path::new("step_2d_profile.csv"))?;
        }
    }
    Ok(())
}
