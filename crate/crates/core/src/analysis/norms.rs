use crate::fields::VectorField;
use crate::interpolation::{eval_mapped, FemFunction};
use crate::mesh::Mesh;
use crate::reference::quadrature;
use crate::transforms::{pullback_solution, DomainMap};
use crate::{CVec3, Result, Vec3};
use rayon::prelude::*;
use serde::Serialize;

/// Default exactness of the error quadrature.
pub const ERROR_EXACTNESS: usize = 8;

/// `L²` norms of a field and of its curl over the meshed domain.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct ErrorNorms {
    pub l2: f64,
    pub curl: f64,
    /// `(l2² + curl²)^{1/2}`.
    pub hcurl: f64,
}

impl ErrorNorms {
    fn from_squares(l2: f64, curl: f64) -> Self {
        ErrorNorms {
            l2: l2.sqrt(),
            curl: curl.sqrt(),
            hcurl: (l2 + curl).sqrt(),
        }
    }
}

/// Integrates `|E - E_h|²` and `|curl E - curl E_h|²` over every cell,
/// where `exact(c, x̂, x)` returns the value and curl of `E` at the point
/// `x = T_c(x̂)` of cell `c`.
pub fn error_norms_with(
    solution: &FemFunction,
    exact: impl Fn(usize, &Vec3, &Vec3) -> Result<(CVec3, CVec3)> + Sync,
    exactness: usize,
) -> Result<ErrorNorms> {
    let space = solution.space();
    let mesh = space.mesh();
    let rule = quadrature(exactness)?;
    let points: Vec<Vec3> = (0..rule.len()).map(|i| rule.point(i)).collect();
    let tab: Vec<_> = points.iter().map(|x| space.basis().eval_unchecked(x)).collect();
    let parts: Vec<(f64, f64)> = (0..mesh.num_cells())
        .into_par_iter()
        .map(|c| -> Result<(f64, f64)> {
            let map = mesh.map_unchecked(c);
            let local = solution.local(c);
            let mut acc = (0.0, 0.0);
            for (q, x) in points.iter().enumerate() {
                let p = map.eval(x);
                let fe = eval_mapped(c, &p, &local, &tab[q].0, &tab[q].1)?;
                let (v, w) = exact(c, x, &p.x)?;
                let wt = rule.weights()[q] * p.det.abs();
                acc.0 += wt * (v - fe.value).norm_squared();
                acc.1 += wt * (w - fe.curl).norm_squared();
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let (l2, curl) = parts.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(ErrorNorms::from_squares(l2, curl))
}

/// Errors of a discrete solution against a field defined on the meshed
/// domain.
pub fn error_norms(solution: &FemFunction, exact: &dyn VectorField, exactness: usize) -> Result<ErrorNorms> {
    error_norms_with(solution, |_, _, x| Ok((exact.value(x), exact.curl(x))), exactness)
}

/// Errors of a discrete solution on `D_h` against the pull-back
/// `Ψ E = dT^T (E ∘ T)` of a field on the exact domain.
pub fn pullback_error(
    map: &dyn DomainMap,
    solution: &FemFunction,
    exact: &dyn VectorField,
    exactness: usize,
) -> Result<ErrorNorms> {
    error_norms_with(solution, |_, _, x| pullback_solution(map, exact, x), exactness)
}

/// Norms of a field over the meshed domain.
pub fn field_norms(mesh: &Mesh, field: &dyn VectorField, exactness: usize) -> Result<ErrorNorms> {
    let rule = quadrature(exactness)?;
    let points: Vec<Vec3> = (0..rule.len()).map(|i| rule.point(i)).collect();
    let parts: Vec<(f64, f64)> = (0..mesh.num_cells())
        .into_par_iter()
        .map(|c| {
            let map = mesh.map_unchecked(c);
            let mut acc = (0.0, 0.0);
            for (q, x) in points.iter().enumerate() {
                let p = map.eval(x);
                let wt = rule.weights()[q] * p.det.abs();
                acc.0 += wt * field.value(&p.x).norm_squared();
                acc.1 += wt * field.curl(&p.x).norm_squared();
            }
            acc
        })
        .collect();
    let (l2, curl) = parts.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(ErrorNorms::from_squares(l2, curl))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::BallSolution;
    use crate::interpolation::{global_interpolate, FeSpace};
    use crate::mesh::generate_ball_mesh;
    use crate::transforms::IdentityMap;
    use std::sync::Arc;

    #[test]
    fn zero_solution_gives_the_field_norm() {
        let mesh = Arc::new(generate_ball_mesh(1, 2).unwrap());
        let space = FeSpace::new(mesh.clone(), 1).unwrap();
        let zero = FemFunction::zero(&space);
        let e = error_norms(&zero, &BallSolution, ERROR_EXACTNESS).unwrap();
        let f = field_norms(&mesh, &BallSolution, ERROR_EXACTNESS).unwrap();
        assert!((e.hcurl - f.hcurl).abs() < 1e-14 * f.hcurl);
    }

    #[test]
    fn self_comparison_and_identity_pullback() {
        let mesh = Arc::new(generate_ball_mesh(1, 2).unwrap());
        let space = FeSpace::new(mesh, 2).unwrap();
        let u = global_interpolate(&space, &BallSolution).unwrap();
        let a = error_norms(&u, &BallSolution, ERROR_EXACTNESS).unwrap();
        let b = pullback_error(&IdentityMap, &u, &BallSolution, ERROR_EXACTNESS).unwrap();
        assert_eq!(a, b);
        let own = error_norms_with(
            &u,
            |c, xh, _| {
                let p = u.eval(c, xh)?;
                Ok((p.value, p.curl))
            },
            ERROR_EXACTNESS,
        )
        .unwrap();
        assert!(own.hcurl <= 1e-12);
    }

    #[test]
    fn error_quadrature_is_converged() {
        let mesh = Arc::new(generate_ball_mesh(1, 2).unwrap());
        let space = FeSpace::new(mesh, 1).unwrap();
        let u = global_interpolate(&space, &BallSolution).unwrap();
        let e8 = error_norms(&u, &BallSolution, 8).unwrap();
        let e12 = error_norms(&u, &BallSolution, 12).unwrap();
        assert!((e8.hcurl - e12.hcurl).abs() < 1e-3 * e12.hcurl);
    }
}
