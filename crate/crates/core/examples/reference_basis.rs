//! Build the standard spaces P_k, Q_k and S_k and evaluate their bases.

use augdg::basis::{build_basis, Family, SpaceSpec};

fn main() -> augdg::error::Result<()> {
    for dim in [2, 3] {
        for family in [Family::P, Family::Q, Family::S] {
            let dims: Vec<String> = (1..=4)
                .map(|k| SpaceSpec::new(family, k, dim).dimension().to_string())
                .collect();
            println!("{family} in {dim}D, k = 1..4: dimensions {}", dims.join(", "));
        }
    }
    let q2 = build_basis(SpaceSpec::new(Family::Q, 2, 2))?;
    let x = [0.3, -0.7];
    let values = q2.eval(&x);
    println!("Q2 monomial basis at {x:?}: {values:.4?}");
    Ok(())
}
