//! Upwind discontinuous Galerkin discretisation on Cartesian meshes.

mod assembly;
mod field;
mod problem;
mod sweep;

pub use assembly::{
    assemble_local, assemble_local_2d, assemble_local_3d, bilinear_matrix, default_points, rhs_vector, FaceTable,
    Tabulation,
};
pub use field::{basis_means, cell_average, l2_error, CellAverage, DgField};
pub use problem::{field, BoundaryData, Coefficient, LocalProblem, Problem, ScalarField, Source, SourceSamples, Trace};
pub use sweep::{sweep_solve, AugmentMode, AuditEntry, SweepOptions, SweepResult};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{build_basis, Family, SpaceSpec};
    use crate::mesh::CartesianMesh;

    fn mesh2() -> CartesianMesh {
        CartesianMesh::uniform(&[(0.0, 1.0), (0.0, 1.0)], &[3, 4]).unwrap()
    }

    #[test]
    fn constants_are_preserved() {
        for family in [Family::P, Family::Q, Family::S] {
            let b = build_basis(SpaceSpec::new(family, 2, 2)).unwrap();
            let pr = Problem::new_2d(1.3, 0.4, 0.0).with_inflow(0, |_| 2.5).with_inflow(1, |_| 2.5);
            let r = sweep_solve(&mesh2(), &pr, &b, None, &SweepOptions::default()).unwrap();
            for c in 0..r.field.n_cells() {
                let co = r.field.coefficients(c);
                assert!((co[0] - 2.5).abs() < 1e-10);
                assert!(co[1..].iter().all(|v| v.abs() < 1e-10), "{family}: {co:?}");
            }
        }
    }

    #[test]
    fn zero_data_gives_zero_field() {
        let b = build_basis(SpaceSpec::new(Family::Q, 1, 3)).unwrap();
        let mesh = CartesianMesh::uniform(&[(0.0, 1.0); 3], &[2, 2, 2]).unwrap();
        let r = sweep_solve(&mesh, &Problem::new_3d(1.0, 2.0, 0.5), &b, None, &SweepOptions::default()).unwrap();
        assert!((0..8).all(|c| r.field.coefficients(c).iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn polynomial_solution_is_reproduced() {
        // u = 1 + x y lies in Q1; (α u)_x + (β u)_y + γ u = α y + β x + γ (1 + x y)
        let (a, b, g) = (1.5, 0.7, 0.3);
        let exact = move |x: &[f64]| 1.0 + x[0] * x[1];
        let pr = Problem::new_2d(a, b, g)
            .with_source_field(move |x| a * x[1] + b * x[0] + g * (1.0 + x[0] * x[1]))
            .with_inflow(0, exact)
            .with_inflow(1, exact);
        let basis = build_basis(SpaceSpec::new(Family::Q, 1, 2)).unwrap();
        let r = sweep_solve(&mesh2(), &pr, &basis, None, &SweepOptions::default()).unwrap();
        assert!(l2_error(&r.field, exact, None).unwrap() < 1e-12);
        assert!(r.max_relative_residual < 1e-12);
    }

    #[test]
    fn upstream_cells_ignore_downstream_data() {
        let basis = build_basis(SpaceSpec::new(Family::P, 2, 2)).unwrap();
        let base = Problem::new_2d(1.0, 1.0, 0.0).with_source_field(|x| 1.0 + x[0]);
        let r1 = sweep_solve(&mesh2(), &base, &basis, None, &SweepOptions::default()).unwrap();
        let bumped = base.clone().with_inflow(1, |x| if x[0] > 0.7 { 3.0 } else { 0.0 });
        let r2 = sweep_solve(&mesh2(), &bumped, &basis, None, &SweepOptions::default()).unwrap();
        let m = mesh2();
        for c in 0..m.n_cells() {
            if m.multi_index(c)[0] < 2 {
                assert_eq!(r1.field.coefficients(c), r2.field.coefficients(c));
            }
        }
    }

    #[test]
    fn sign_checks_reject_bad_data() {
        let basis = build_basis(SpaceSpec::new(Family::P, 1, 2)).unwrap();
        let pr = Problem::new_2d(1.0, 1.0, 0.0).with_source_field(|x| x[0] - 0.5);
        assert!(sweep_solve(&mesh2(), &pr, &basis, None, &SweepOptions::default()).is_err());
        let pr = Problem::new_2d(-1.0, 1.0, 0.0);
        assert!(sweep_solve(&mesh2(), &pr, &basis, None, &SweepOptions::default()).is_err());
    }
}
