//! Cell averages of the three problems on which the standard space produces
//! a negative average from non-negative data.

use augdg::experiments::{run_counterexample, Counterexample};

fn main() -> augdg::error::Result<()> {
    for case in [Counterexample::S2, Counterexample::Q2, Counterexample::P2] {
        println!("{}", run_counterexample(case, 0)?);
    }
    Ok(())
}
