//! Gauss–Legendre and Gauss–Lobatto rules on the reference cell.

use augdg::quadrature::{gauss_legendre, gauss_lobatto, gauss_lobatto_1d};

fn main() -> augdg::error::Result<()> {
    let (nodes, weights) = gauss_lobatto_1d(4)?;
    println!("4-point Lobatto nodes {nodes:.6?}\n            weights {weights:.6?}");
    // x^6 y^4 integrates to (2/7)(2/5) on [-1,1]^2
    let f = |p: &[f64]| p[0].powi(6) * p[1].powi(4);
    let exact = 4.0 / 35.0;
    for n in 2..=5 {
        let g = gauss_legendre(n, 2)?.integrate(f);
        let l = gauss_lobatto(n.max(2), 2)?.integrate(f);
        println!("n = {n}: Gauss error {:.2e}, Lobatto error {:.2e}", (g - exact).abs(), (l - exact).abs());
    }
    Ok(())
}
