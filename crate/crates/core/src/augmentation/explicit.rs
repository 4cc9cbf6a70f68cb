//! Closed-form augmented functions for Q_k and S_k, k = 2, 3, 4.
//!
//! Each function is the square of a product of linear factors, so it is
//! non-negative on the whole plane. `low_B` entries cover small B and
//! `high_B` entries large B; see [`Regime::threshold`](super::Regime::threshold).

use crate::basis::Family;
use crate::error::{Error, Result};
use crate::poly::{product, Poly};

use super::Regime;

fn xi() -> Poly {
    Poly::var(2, 0)
}

fn eta() -> Poly {
    Poly::var(2, 1)
}

/// `(t - root)` along `axis`.
fn f(axis: usize, root: f64) -> Poly {
    Poly::linear(2, axis, root)
}

fn prod(factors: &[Poly]) -> Poly {
    product(2, factors)
}

fn psi_q2(regime: Regime) -> Poly {
    let (a, b) = match regime {
        Regime::LowB => (0, 1),
        Regime::HighB => (1, 0),
    };
    // t_a t_b^2 (1 - t_a)^2 (t_a + 1) (1 - t_b^2) / 8, squared
    let one_minus_sq = &Poly::constant(2, 1.0) - &Poly::var(2, b).powi(2);
    let inner = prod(&[Poly::var(2, a), Poly::var(2, b).powi(2), f(a, 1.0).powi(2), f(a, -1.0), one_minus_sq]);
    inner.scale(1.0 / 8.0).powi(2)
}

fn psi_q3(regime: Regime) -> Poly {
    let s = 5f64.sqrt() / 5.0;
    let (r1, r2) = match regime {
        Regime::LowB => (
            prod(&[f(0, s), f(1, s), f(1, -s), f(0, 1.0), f(0, -1.0), f(1, 1.0)]),
            prod(&[f(0, -s), f(1, s), f(1, -s), f(0, 1.0), f(0, -1.0), f(1, -1.0)]),
        ),
        Regime::HighB => (
            prod(&[f(0, s), f(0, -s), f(1, s), f(0, 1.0), f(1, 1.0), f(1, -1.0)]),
            prod(&[f(0, s), f(0, -s), f(1, -s), f(0, -1.0), f(1, 1.0), f(1, -1.0)]),
        ),
    };
    // (25 sqrt 5)^2 = 3125
    (&r1 * &r2).scale(3125.0 / 8f64.powi(4)).powi(2)
}

fn psi_q4(regime: Regime) -> Poly {
    let c = 21f64.sqrt() / 7.0;
    let (w1, w2, w3, w4) = match regime {
        Regime::LowB => (
            prod(&[xi(), f(0, 1.0), f(0, c), f(0, -c)]),
            prod(&[eta(), f(1, 1.0), f(1, c), f(1, -c)]),
            prod(&[xi(), f(0, 1.0), f(0, -1.0), f(0, c)]),
            prod(&[eta(), f(1, -1.0), f(1, c), f(1, -c)]),
        ),
        Regime::HighB => (
            prod(&[xi(), f(0, 1.0), f(0, c), f(0, -c)]),
            prod(&[eta(), f(1, 1.0), f(1, c), f(1, -c)]),
            prod(&[xi(), f(0, -1.0), f(0, c), f(0, -c)]),
            prod(&[eta(), f(1, 1.0), f(1, -1.0), f(1, c)]),
        ),
    };
    let r1 = (&w1 * &w2).scale(49.0 / 64.0);
    let r2 = (&w3 * &w4).scale(-343.0 / 192.0);
    (&r1 * &r2).powi(2)
}

fn psi_s2(regime: Regime) -> Poly {
    match regime {
        Regime::LowB => prod(&[xi(), eta().powi(2), f(0, 1.0).powi(2), f(1, 1.0), f(0, -1.0), f(1, -1.0)])
            .scale(1.0 / 8.0)
            .powi(2),
        Regime::HighB => prod(&[xi().powi(2), eta(), f(0, 1.0), f(1, 1.0).powi(2), f(0, -1.0), f(1, -1.0)])
            .scale(0.5)
            .powi(2),
    }
}

fn psi_s3(regime: Regime) -> Poly {
    let s = 5f64.sqrt() / 5.0;
    let r2 = prod(&[f(0, -s), f(1, -s)]).scale(5f64.sqrt());
    let r1 = match regime {
        Regime::LowB => prod(&[
            f(0, s),
            f(1, s).powi(2),
            f(0, 1.0).powi(2),
            f(0, -1.0).powi(2),
            f(1, 1.0),
            f(1, -1.0).powi(2),
        ]),
        Regime::HighB => prod(&[
            f(0, s).powi(2),
            f(1, s),
            f(0, 1.0),
            f(0, -1.0).powi(2),
            f(1, 1.0).powi(2),
            f(1, -1.0).powi(2),
        ]),
    };
    (&r1 * &r2).scale(5f64.powi(5) / 64f64.powi(2)).powi(2)
}

fn psi_s4(regime: Regime) -> Poly {
    let c = 21f64.sqrt() / 7.0;
    match regime {
        Regime::LowB => {
            let r1 = prod(&[xi().powi(2), eta().powi(2), f(0, 1.0).powi(2), f(1, 1.0), f(0, c), f(0, -c).powi(2)]);
            let r2 = prod(&[f(0, -1.0), f(1, -1.0), f(1, c).powi(2), f(1, -c).powi(2)]);
            (&r1 * &r2).scale(343.0 / 192.0 * 49.0 / 64.0).powi(2)
        }
        Regime::HighB => {
            let r3 = prod(&[xi().powi(2), eta(), f(0, 1.0), f(0, -1.0).powi(2), f(1, 1.0).powi(2), f(0, c).powi(2)]);
            let r4 = prod(&[f(1, -1.0), f(0, -c), f(1, c).powi(2), f(1, -c).powi(2)]);
            (&r3 * &r4).scale(343.0 / 192.0 * 49.0 / 24.0).powi(2)
        }
    }
}

/// The closed-form augmented function for `(family, k)` in the given regime.
pub fn explicit_psi_poly(family: Family, k: usize, regime: Regime) -> Result<Poly> {
    match (family, k) {
        (Family::Q, 2) => Ok(psi_q2(regime)),
        (Family::Q, 3) => Ok(psi_q3(regime)),
        (Family::Q, 4) => Ok(psi_q4(regime)),
        (Family::S, 2) => Ok(psi_s2(regime)),
        (Family::S, 3) => Ok(psi_s3(regime)),
        (Family::S, 4) => Ok(psi_s4(regime)),
        _ => Err(Error::UnsupportedSpace(format!("no closed-form augmented function for {family}{k}"))),
    }
}

/// Extra function `(ξ η)² / 2` for the P2 counterexample.
pub fn psi_p2_unit_cfl() -> Poly {
    (&xi() * &eta()).powi(2).scale(0.5)
}

/// `ξη + (ξ² + η²)/4`, the classical P1 enrichment for constant coefficients.
pub fn psi_p1_classic() -> Poly {
    let q = (&xi().powi(2) + &eta().powi(2)).scale(0.25);
    &(&xi() * &eta()) + &q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q2_low_matches_formula() {
        let p = psi_q2(Regime::LowB);
        let (x, y) = (0.37f64, -0.52f64);
        let e = (x * y * y * (1.0 - x).powi(2) * (x + 1.0) * (1.0 - y * y) / 8.0).powi(2);
        assert!((p.eval(&[x, y]) - e).abs() < 1e-16);
        assert_eq!(p.axis_degrees()[..2], [8, 8]);
    }

    #[test]
    fn s2_high_matches_formula() {
        let p = psi_s2(Regime::HighB);
        let (x, y) = (-0.21f64, 0.8f64);
        let e = (x * x * y * (x - 1.0) * (y - 1.0).powi(2) * (x + 1.0) * (y + 1.0) / 2.0).powi(2);
        assert!((p.eval(&[x, y]) - e).abs() < 1e-16);
    }

    #[test]
    fn q3_low_matches_formula() {
        let s = 5f64.sqrt() / 5.0;
        let (x, y) = (0.11f64, 0.64f64);
        let r1 = (x - s) * (y - s) * (y + s) * (x - 1.0) * (x + 1.0) * (y - 1.0);
        let r2 = (x + s) * (y - s) * (y + s) * (x - 1.0) * (x + 1.0) * (y + 1.0);
        let e = ((25.0 * 5f64.sqrt()).powi(2) * r1 * r2 / 8f64.powi(4)).powi(2);
        let v = psi_q3(Regime::LowB).eval(&[x, y]);
        assert!((v - e).abs() <= 1e-13 * e.abs().max(1e-300), "{v} vs {e}");
    }
}
