//! Minimum of the special test function over random cell parameters, for each
//! closed-form augmentation in its regime.

use augdg::augmentation::{cfl_sweep, Regime};
use augdg::basis::Family;

fn main() -> augdg::error::Result<()> {
    let spaces = [(Family::Q, 2), (Family::Q, 3), (Family::Q, 4), (Family::S, 2), (Family::S, 3), (Family::S, 4)];
    for (family, k) in spaces {
        for regime in Regime::ALL {
            let samples = cfl_sweep(family, k, regime, 100, 7)?;
            let worst = samples.iter().min_by(|a, b| a.min_v.total_cmp(&b.min_v)).expect("non-empty");
            println!("{family}{k} {regime:>6}: smallest min v = {:+.3e} at B = {:.3e}", worst.min_v, worst.b);
        }
    }
    Ok(())
}
