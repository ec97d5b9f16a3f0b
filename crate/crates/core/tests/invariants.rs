use curlfem::analysis::{error_norms, field_norms, ConvergenceReport, ReportRow, ERROR_EXACTNESS};
use curlfem::assembly::{assemble, Formulation, MaterialCoefficients, QuadratureDegrees};
use curlfem::fields::BallSolution;
use curlfem::interpolation::{global_interpolate, interpolate_sampled, FeSpace, FemFunction};
use curlfem::mesh::{generate_ball_mesh, Mesh};
use curlfem::reference::ReferenceTet;
use curlfem::study::{run_study, StudyConfig, StudyKind};
use curlfem::transforms::{discrepancies, domain_samples, radial_domain_map, DomainMap};
use curlfem::{Vec3, C64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::{Arc, OnceLock};

fn ball(level: usize, order: usize) -> Arc<Mesh> {
    static MESHES: OnceLock<Vec<Arc<Mesh>>> = OnceLock::new();
    let all = MESHES.get_or_init(|| {
        (0..2)
            .flat_map(|l| [1, 2].map(|o| Arc::new(generate_ball_mesh(l, o).unwrap())))
            .collect()
    });
    all[2 * level + order - 1].clone()
}

fn random_coeffs(n: usize, seed: u64) -> Vec<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect()
}

/// Reference coordinates, inside cell `c`, of the point with barycentric
/// weights `w` on the global face `f`.
fn face_point_in_cell(mesh: &Mesh, c: usize, f: usize, w: [f64; 3]) -> Vec3 {
    let verts = mesh.cell_vertices(c);
    mesh.faces()[f]
        .iter()
        .zip(w)
        .map(|(g, wi)| {
            let local = verts.iter().position(|v| v == g).unwrap();
            ReferenceTet::vertex(local) * wi
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn interpolation_reproduces_discrete_functions(k in 1usize..=2, order in 1usize..=2, seed in any::<u64>()) {
        let space = FeSpace::new(ball(0, order), k).unwrap();
        let coeffs = random_coeffs(space.ndofs(), seed);
        let u = FemFunction::new(&space, coeffs.clone()).unwrap();
        let pi = interpolate_sampled(&space, |c, xh| u.eval(c, xh).unwrap().value).unwrap();
        for (a, b) in pi.coeffs().iter().zip(&coeffs) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn tangential_traces_agree_across_faces(
        k in 1usize..=2,
        order in 1usize..=2,
        seed in any::<u64>(),
        a in 0.05f64..0.9,
        b in 0.05f64..0.9,
    ) {
        prop_assume!(a + b < 0.95);
        let mesh = ball(1, order);
        let space = FeSpace::new(mesh.clone(), k).unwrap();
        let u = FemFunction::new(&space, random_coeffs(space.ndofs(), seed)).unwrap();
        let w = [a, b, 1.0 - a - b];
        let interior: Vec<usize> = (0..mesh.num_faces()).filter(|&f| !mesh.is_boundary_face(f)).collect();
        let f = interior[(seed as usize) % interior.len()];
        let [c0, c1] = mesh.face_cells(f);
        let x0 = face_point_in_cell(&mesh, c0, f, w);
        let x1 = face_point_in_cell(&mesh, c1, f, w);
        let p0 = u.eval(c0, &x0).unwrap();
        let p1 = u.eval(c1, &x1).unwrap();
        prop_assert!((p0.x - p1.x).norm() < 1e-12);
        let jac = mesh.element_map(c0).unwrap().jacobian(&x0);
        let corners = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
            .map(|e| face_point_in_cell(&mesh, c0, f, e));
        for t in [corners[1] - corners[0], corners[2] - corners[0]] {
            let t = jac * t;
            let d = (p0.value - p1.value).dot(&t.map(|x| C64::new(x, 0.0)));
            prop_assert!(d.norm() < 1e-10 * (1.0 + p0.value.norm()));
        }
    }

    #[test]
    fn radial_map_round_trips(order in 1usize..=2, cell in any::<usize>(), a in 0.0f64..1.0, b in 0.0f64..1.0, c in 0.0f64..1.0) {
        prop_assume!(a + b + c <= 1.0);
        let mesh = ball(1, order);
        let map = radial_domain_map(&mesh).unwrap();
        let x = mesh.element_map(cell % mesh.num_cells()).unwrap().point(&Vec3::new(a, b, c));
        let y = map.forward(&x).unwrap();
        prop_assert!((map.inverse(&y).unwrap() - x).norm() < 1e-10);
        prop_assert!(y.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn assembled_matrices_are_symmetric(mu_inv in 0.1f64..5.0, eps in 0.1f64..5.0, omega in 0.1f64..3.0, coercive: bool) {
        let form = if coercive { Formulation::Coercive } else { Formulation::Maxwell };
        let space = FeSpace::new(ball(0, 2), 2).unwrap();
        let m = MaterialCoefficients::homogeneous(mu_inv, eps, omega, form);
        let sys = assemble(&space, &m, QuadratureDegrees::defaults(2, 2, 2)).unwrap();
        prop_assert!(sys.matrix.max_asymmetry() <= 1e-12 * sys.matrix.max_abs());
        prop_assert!(sys.matrix.max_imag() == 0.0);
    }

    #[test]
    fn report_order_does_not_depend_on_insertion(perm in Just(vec![0usize, 1, 2, 3]).prop_shuffle()) {
        let rows: Vec<ReportRow> = (0..4)
            .map(|l| ReportRow {
                level: l,
                h: 0.5f64.powi(l as i32),
                ndof: 10 << l,
                l2_error: Some(0.25f64.powi(l as i32)),
                hcurl_error: Some(0.5f64.powi(l as i32)),
                ..Default::default()
            })
            .collect();
        let mut a = ConvergenceReport::new("s", 1, 1, "m");
        let mut b = ConvergenceReport::new("s", 1, 1, "m");
        for r in &rows {
            a.push(r.clone());
        }
        for &i in &perm {
            b.push(rows[i].clone());
        }
        prop_assert_eq!(a.to_csv(), b.to_csv());
    }
}

#[test]
fn exact_norm_grows_toward_the_ball_norm() {
    for order in [1, 2] {
        let norms: Vec<f64> = (0..4)
            .map(|l| {
                let mesh = generate_ball_mesh(l, order).unwrap();
                field_norms(&mesh, &BallSolution, ERROR_EXACTNESS).unwrap().hcurl
            })
            .collect();
        for w in norms.windows(2) {
            assert!(w[1] >= w[0] - 1e-6, "order {order}: {norms:?}");
        }
    }
}

#[test]
fn interpolant_and_galerkin_errors_share_a_rate() {
    let config = |study| StudyConfig {
        study,
        ..Default::default()
    };
    let galerkin = run_study(&config(StudyKind::BallConvergence)).unwrap();
    let interp = run_study(&config(StudyKind::InterpolationRates)).unwrap();
    let (g, i) = (
        galerkin.report.slopes().hcurl_error.unwrap(),
        interp.report.slopes().hcurl_error.unwrap(),
    );
    assert!((g - i).abs() <= 0.3, "Galerkin {g}, interpolant {i}");
}

#[test]
fn determinant_ratio_stays_bounded_and_tends_to_one() {
    for order in [1, 2] {
        let thetas: Vec<f64> = (0..4)
            .map(|l| {
                let mesh = generate_ball_mesh(l, order).unwrap();
                let map = radial_domain_map(&mesh).unwrap();
                discrepancies(&map, &domain_samples(&mesh).unwrap()).unwrap().theta
            })
            .collect();
        assert!(thetas.iter().all(|&t| (1.0..=10.0).contains(&t)), "{thetas:?}");
        assert!(thetas.windows(2).all(|w| w[1] < w[0]), "{thetas:?}");
    }
}

#[test]
fn interpolation_error_is_below_field_norm() {
    let space = FeSpace::new(ball(1, 2), 2).unwrap();
    let pi = global_interpolate(&space, &BallSolution).unwrap();
    let err = error_norms(&pi, &BallSolution, ERROR_EXACTNESS).unwrap();
    let norm = field_norms(space.mesh(), &BallSolution, ERROR_EXACTNESS).unwrap();
    assert!(err.hcurl < 0.05 * norm.hcurl);
}
