//! Steady transport solver on disks, annuli, balls and shells.
//!
//! The solution is expanded in boundary-angle Fourier modes and each mode is
//! integrated exactly along straight backward rays, so a sweep reduces to a
//! weighted sum of the interpolated scalar flux over every ray.

mod diagnostics;
mod grid;
mod poisson;
mod rays;
mod solver;

pub use diagnostics::{
    boundary_norm, green_identity_residual, interior_distance, kernel_estimate_check, remainder_diagnostics,
    transport_derivative, KernelReport, RemainderDiagnostics, KERNEL_SCHEMA,
};
pub use grid::{face_angle, ordinate_angle, radial_mesh, wrap, GridSpec, TransportGrid};
pub use poisson::{solve_poisson, PoissonSolution};
pub use solver::{
    angular_average, default_theta_count, export_field, import_field, solve_transport, FieldHeader, SolveMethod,
    SolverOptions, TransportField, TransportProblem, FIELD_SCHEMA,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::BoundaryData;
    use crate::quadgeom::DomainSpec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn small() -> GridSpec {
        GridSpec {
            n_polar: 8,
            finest: 0.25,
            grading: 1.3,
            max_cell: 0.1,
            ..GridSpec::default()
        }
    }

    fn domains() -> [DomainSpec; 4] {
        [
            DomainSpec::Disk { radius: 1.0 },
            DomainSpec::Annulus { inner: 1.0, outer: 2.0 },
            DomainSpec::Ball { radius: 1.0 },
            DomainSpec::Shell { inner: 1.0, outer: 2.0 },
        ]
    }

    fn solve(d: &DomainSpec, eps: f64, data: &BoundaryData, spec: &GridSpec, method: SolveMethod) -> TransportField {
        let opts = SolverOptions {
            method,
            ..SolverOptions::default()
        };
        solve_transport(&TransportProblem::new(d, eps, data, spec, opts).unwrap()).unwrap()
    }

    #[test]
    fn constants_are_reproduced() {
        let c = BoundaryData::Constant { value: 2.5 };
        for d in domains() {
            for m in [SolveMethod::Iterative, SolveMethod::Direct] {
                let f = solve(&d, 0.1, &c, &small(), m);
                let err = f.values.iter().map(|v| (v - 2.5).abs()).fold(0.0, f64::max);
                assert!(err < 1e-10, "{d:?} {m:?}: {err}");
            }
        }
    }

    #[test]
    fn maximum_principle() {
        let data = BoundaryData::Grazing {
            base: 0.0,
            amplitude: 1.0,
            mode: 0,
            width: 0.3,
        };
        for d in domains() {
            let f = solve(&d, 0.1, &data, &small(), SolveMethod::Direct);
            let (lo, hi) = (0.0, 1.0);
            assert!(f.values.iter().all(|v| *v >= lo - 1e-12 && *v <= hi + 1e-12), "{d:?}");
        }
        let f = solve(
            &domains()[0],
            0.1,
            &BoundaryData::default(),
            &small(),
            SolveMethod::Direct,
        );
        assert!(f.values.iter().all(|v| *v >= 0.5 - 1e-12 && *v <= 1.5 + 1e-12));
    }

    #[test]
    fn iteration_matches_direct_solve() {
        let data = BoundaryData::default();
        for d in [domains()[0], domains()[1]] {
            for eps in [0.2, 0.05] {
                let a = solve(&d, eps, &data, &small(), SolveMethod::Iterative);
                let b = solve(&d, eps, &data, &small(), SolveMethod::Direct);
                let diff = a
                    .values
                    .iter()
                    .zip(&b.values)
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0, f64::max);
                assert!(diff < 1e-8, "{d:?} eps={eps}: {diff}");
            }
        }
        let sym = BoundaryData::SinPolynomial {
            coefficients: vec![1.0, 0.5, -0.3],
        };
        for d in [domains()[2], domains()[3]] {
            let a = solve(&d, 0.1, &sym, &small(), SolveMethod::Iterative);
            let b = solve(&d, 0.1, &sym, &small(), SolveMethod::Direct);
            let diff = a
                .values
                .iter()
                .zip(&b.values)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max);
            assert!(diff < 1e-8, "{d:?}: {diff}");
        }
    }

    #[test]
    fn acceleration_cuts_iterations() {
        let d = domains()[0];
        let data = BoundaryData::default();
        let opts = SolverOptions {
            anderson_depth: 0,
            ..SolverOptions::default()
        };
        let p = TransportProblem::new(&d, 0.05, &data, &small(), opts).unwrap();
        let fast = solve_transport(&p).unwrap();
        let slow = solve_transport(&TransportProblem {
            options: SolverOptions {
                acceleration: false,
                max_iterations: 100_000,
                ..p.options
            },
            ..p.clone()
        })
        .unwrap();
        assert!(
            fast.iterations * 5 < slow.iterations,
            "{} vs {}",
            fast.iterations,
            slow.iterations
        );
    }

    #[test]
    fn mixing_keeps_thick_cells_stable() {
        // cells of several mean free paths, where plain DSA amplifies a mode
        let d = domains()[0];
        let data = BoundaryData::default();
        let plain = SolverOptions {
            anderson_depth: 0,
            max_iterations: 80,
            ..SolverOptions::default()
        };
        let p = TransportProblem::new(&d, 0.00625, &data, &GridSpec::default(), plain).unwrap();
        assert!(matches!(solve_transport(&p), Err(crate::Error::IterationLimit { .. })));
        let mixed = solve_transport(&TransportProblem {
            options: SolverOptions::default(),
            ..p.clone()
        })
        .unwrap();
        let direct = solve_transport(&TransportProblem {
            options: SolverOptions {
                method: SolveMethod::Direct,
                ..SolverOptions::default()
            },
            ..p
        })
        .unwrap();
        let diff = mixed
            .values
            .iter()
            .zip(&direct.values)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        assert!(diff < 1e-8, "{diff}");
    }

    #[test]
    fn inflow_trace_equals_data() {
        let d = domains()[1];
        let data = BoundaryData::default();
        let f = solve(&d, 0.1, &data, &small(), SolveMethod::Direct);
        let g = &f.grid;
        let last = g.radii.len() - 1;
        for (it, &th) in g.thetas.iter().enumerate() {
            for (ia, &a) in g.alphas.iter().enumerate() {
                if a.cos() < 0.0 {
                    let phi = face_angle(2, crate::quadgeom::Side::Outer, a);
                    let v = data.value(crate::quadgeom::Side::Outer, th, phi);
                    assert!((f.value(last, it, ia) - v).abs() < 1e-13);
                }
                if a.cos() > 0.0 {
                    let phi = face_angle(2, crate::quadgeom::Side::Inner, a);
                    let v = data.value(crate::quadgeom::Side::Inner, th, phi);
                    assert!((f.value(0, it, ia) - v).abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn iteration_limit_reports_history() {
        let d = domains()[0];
        let opts = SolverOptions {
            max_iterations: 2,
            acceleration: false,
            ..SolverOptions::default()
        };
        let p = TransportProblem::new(&d, 0.05, &BoundaryData::default(), &small(), opts).unwrap();
        match solve_transport(&p) {
            Err(crate::Error::IterationLimit { iterations, residuals }) => {
                assert_eq!(iterations, 2);
                assert_eq!(residuals.len(), 2);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn asymmetric_data_rejected_in_3d() {
        let p = TransportProblem::new(
            &domains()[2],
            0.1,
            &BoundaryData::default(),
            &small(),
            SolverOptions::default(),
        );
        assert!(p.is_err());
    }

    #[test]
    fn averages() {
        let g = TransportGrid::new(&domains()[0], 0.1, &small(), 8).unwrap();
        let c = vec![3.0; g.len()];
        assert!(angular_average(&g, &c).iter().all(|v| (v - 3.0).abs() < 1e-14));
        let odd: Vec<f64> = (0..g.len()).map(|k| g.alphas[k % g.alphas.len()].cos()).collect();
        assert!(angular_average(&g, &odd).iter().all(|v| v.abs() < 1e-14));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f: Vec<f64> = (0..g.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let avg = angular_average(&g, &f);
        let na = g.alphas.len();
        let dev: Vec<f64> = f.iter().enumerate().map(|(k, v)| v - avg[k / na]).collect();
        assert!(angular_average(&g, &dev).iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn export_round_trip() {
        let g = TransportGrid::new(&domains()[1], 0.1, &small(), 8).unwrap();
        let f: Vec<f64> = (0..g.len()).map(|k| k as f64 * 0.5).collect();
        let dir = tempfile::tempdir().unwrap();
        let (_, json) = export_field(&g, &f, dir.path(), "u").unwrap();
        let (h, back) = import_field(&json).unwrap();
        assert_eq!(back, f);
        assert_eq!(h.shape, g.shape());
        assert_eq!(h.schema, FIELD_SCHEMA);
        assert!(export_field(&g, &f[1..], dir.path(), "v").is_err());
    }
}
