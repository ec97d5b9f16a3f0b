use super::Mesh;
use crate::reference::quadrature;
use crate::Result;
use rayon::prelude::*;
use serde::Serialize;

/// Sampled Jacobian statistics of a mesh.
///
/// Samples are the points of a degree-5 rule in every cell, so the report
/// is reproducible for a given mesh.
#[derive(Clone, Debug, Serialize)]
pub struct MeshQualityReport {
    pub min_det: f64,
    pub max_det: f64,
    /// Largest within-cell ratio `max det / min det`.
    pub theta: f64,
    pub h: f64,
    /// `sup |dT_K| / h` (spectral norm).
    pub jacobian_over_h: f64,
    /// `sup |dT_K^{-1}| * h` (spectral norm).
    pub inverse_jacobian_times_h: f64,
    /// Cells with a non-positive determinant at some sample.
    pub singular_cells: Vec<usize>,
}

struct CellStats {
    min_det: f64,
    max_det: f64,
    max_norm: f64,
    max_inv_norm: f64,
}

pub(crate) fn spectral_norm(m: &crate::Mat3) -> f64 {
    m.singular_values().max()
}

pub fn quality_check(mesh: &Mesh) -> Result<MeshQualityReport> {
    let rule = quadrature(5)?;
    let pts: Vec<_> = (0..rule.len()).map(|i| rule.point(i)).collect();
    let stats: Vec<CellStats> = (0..mesh.num_cells())
        .into_par_iter()
        .map(|c| {
            let map = mesh.map_unchecked(c);
            let mut s = CellStats {
                min_det: f64::INFINITY,
                max_det: f64::NEG_INFINITY,
                max_norm: 0.0,
                max_inv_norm: 0.0,
            };
            for x in &pts {
                let p = map.eval(x);
                s.min_det = s.min_det.min(p.det);
                s.max_det = s.max_det.max(p.det);
                s.max_norm = s.max_norm.max(spectral_norm(&p.jac));
                let inv = p
                    .jac
                    .try_inverse()
                    .map(|m| spectral_norm(&m))
                    .unwrap_or(f64::INFINITY);
                s.max_inv_norm = s.max_inv_norm.max(inv);
            }
            s
        })
        .collect();
    let h = mesh.h();
    let mut r = MeshQualityReport {
        min_det: f64::INFINITY,
        max_det: f64::NEG_INFINITY,
        theta: 1.0,
        h,
        jacobian_over_h: 0.0,
        inverse_jacobian_times_h: 0.0,
        singular_cells: Vec::new(),
    };
    for (c, s) in stats.iter().enumerate() {
        r.min_det = r.min_det.min(s.min_det);
        r.max_det = r.max_det.max(s.max_det);
        if s.min_det <= 0.0 {
            r.singular_cells.push(c);
        } else {
            r.theta = r.theta.max(s.max_det / s.min_det);
        }
        r.jacobian_over_h = r.jacobian_over_h.max(s.max_norm / h);
        r.inverse_jacobian_times_h = r.inverse_jacobian_times_h.max(s.max_inv_norm * h);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_ball_mesh, generate_cube_mesh};

    #[test]
    fn affine_cube_has_unit_theta() {
        let r = quality_check(&generate_cube_mesh(1, 1).unwrap()).unwrap();
        assert!((r.theta - 1.0).abs() < 1e-12);
        assert!((r.min_det - 1.0 / 8.0).abs() < 1e-12);
        assert!(r.singular_cells.is_empty());
    }

    #[test]
    fn ball_quality_is_bounded_across_levels() {
        for order in [1, 2] {
            let mut prev: Option<MeshQualityReport> = None;
            for level in 0..3 {
                let r = quality_check(&generate_ball_mesh(level, order).unwrap()).unwrap();
                assert!(r.min_det > 0.0);
                assert!(r.theta <= 10.0, "theta {}", r.theta);
                if let Some(p) = prev {
                    assert!(r.jacobian_over_h / p.jacobian_over_h < 10.0);
                    assert!(r.inverse_jacobian_times_h / p.inverse_jacobian_times_h < 10.0);
                }
                prev = Some(r);
            }
        }
    }

    #[test]
    fn deterministic() {
        let m = generate_ball_mesh(1, 2).unwrap();
        let a = quality_check(&m).unwrap();
        let b = quality_check(&m).unwrap();
        assert_eq!(a.theta.to_bits(), b.theta.to_bits());
        assert_eq!(a.min_det.to_bits(), b.min_det.to_bits());
    }
}
