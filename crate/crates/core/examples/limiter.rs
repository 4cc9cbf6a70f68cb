//! Scale a solution with negative point values towards its cell averages.

use augdg::augmentation::grid_points;
use augdg::basis::Family;
use augdg::experiments::{run_step, AugmentChoice, StepOptions};
use augdg::limiter::{limit_field, lobatto_points};

fn main() -> augdg::error::Result<()> {
    let step = run_step(&StepOptions::new(2, Family::Q, 2, AugmentChoice::Adaptive))?;
    let field = &step.unlimited.field;
    if field.averages().iter().any(|&a| a < 0.0) {
        println!("the unlimited solution has negative averages; limiting the augmented sweep instead");
    }
    let limited = step.limited.as_ref().expect("averages are non-negative with limiting");
    let lobatto = lobatto_points(2, 2)?;
    let grid = grid_points(11, 2);
    println!("unlimited: min at Lobatto points {:+.3e}, on grid {:+.3e}", field.min_at_points(&lobatto), field.min_at_points(&grid));
    println!(
        "limited:   min at Lobatto points {:+.3e}, on grid {:+.3e}",
        limited.field.min_at_points(&lobatto),
        limited.field.min_at_points(&grid)
    );
    let (again, report) = limit_field(&limited.field)?;
    let drift = (0..again.n_cells())
        .map(|c| (again.cell_average(c).value - limited.field.cell_average(c).value).abs())
        .fold(0.0, f64::max);
    println!("limiting again changes {} cells, averages by at most {drift:.1e}", report.limited_cells);
    Ok(())
}
