//! Discrete curl-conforming spaces on a mesh and the canonical interpolation
//! operators `r_K` (per cell) and `Π_h` (global).

use crate::assembly::DofMap;
use crate::fields::VectorField;
use crate::mesh::{GeometricMap, MapPoint, Mesh};
use crate::reference::NedelecBasis;
use crate::{apply_real, complexify, CVec3, Error, Result, Vec3, C64};
use rayon::prelude::*;
use std::sync::Arc;

/// Nedelec space of degree `k` over a mesh.
#[derive(Clone, Debug)]
pub struct FeSpace {
    mesh: Arc<Mesh>,
    basis: NedelecBasis,
    dofs: DofMap,
}

impl FeSpace {
    pub fn new(mesh: Arc<Mesh>, k: usize) -> Result<Self> {
        let basis = NedelecBasis::new(k)?;
        let dofs = DofMap::new(&mesh, k)?;
        Ok(FeSpace { mesh, basis, dofs })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn basis(&self) -> &NedelecBasis {
        &self.basis
    }

    pub fn dofs(&self) -> &DofMap {
        &self.dofs
    }

    pub fn degree(&self) -> usize {
        self.basis.degree()
    }

    pub fn ndofs(&self) -> usize {
        self.dofs.ndofs()
    }
}

/// Value and curl of a discrete field at one mapped point.
#[derive(Clone, Copy, Debug)]
pub struct FemPoint {
    pub x: Vec3,
    pub value: CVec3,
    pub curl: CVec3,
}

/// A member of a discrete space, given by its global coefficients.
#[derive(Clone, Debug)]
pub struct FemFunction<'a> {
    space: &'a FeSpace,
    coeffs: Vec<C64>,
}

impl<'a> FemFunction<'a> {
    pub fn new(space: &'a FeSpace, coeffs: Vec<C64>) -> Result<Self> {
        if coeffs.len() != space.ndofs() {
            return Err(Error::InvalidInput(format!(
                "expected {} coefficients, got {}",
                space.ndofs(),
                coeffs.len()
            )));
        }
        Ok(FemFunction { space, coeffs })
    }

    pub fn zero(space: &'a FeSpace) -> Self {
        FemFunction {
            space,
            coeffs: vec![C64::new(0.0, 0.0); space.ndofs()],
        }
    }

    pub fn space(&self) -> &'a FeSpace {
        self.space
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<C64> {
        self.coeffs
    }

    /// Local coefficients of cell `c` in the reference basis.
    pub fn local(&self, c: usize) -> Vec<C64> {
        self.space.dofs.to_local(c, &self.coeffs)
    }

    /// Value and curl at `T_c(x̂)`.
    pub fn eval(&self, c: usize, xh: &Vec3) -> Result<FemPoint> {
        if c >= self.space.mesh.num_cells() {
            return Err(Error::InvalidInput(format!("cell {c} out of range")));
        }
        let (vals, curls) = self.space.basis.eval(xh)?;
        let map = self.space.mesh.element_map(c)?;
        let p = map.eval(xh);
        eval_mapped(c, &p, &self.local(c), &vals, &curls)
    }
}

/// Physical value and curl from local coefficients and reference basis
/// values at one point.
pub(crate) fn eval_mapped(
    c: usize,
    p: &MapPoint,
    local: &[C64],
    vals: &[Vec3],
    curls: &[Vec3],
) -> Result<FemPoint> {
    let mut v = CVec3::zeros();
    let mut w = CVec3::zeros();
    for ((l, phi), cphi) in local.iter().zip(vals).zip(curls) {
        v += complexify(phi) * *l;
        w += complexify(cphi) * *l;
    }
    Ok(FemPoint {
        x: p.x,
        value: apply_real(&p.inverse_transpose(c)?, &v),
        curl: apply_real(&(p.jac / p.det), &w),
    })
}

/// `r_K` applied to `field` on the cell with map `map`: the DOFs of the
/// pulled-back field `dT^T (field ∘ T)`.
pub fn local_interpolate(map: &GeometricMap, basis: &NedelecBasis, field: &dyn VectorField) -> Vec<C64> {
    local_interpolate_sampled(map, basis, |xh| field.value(&map.point(xh)))
}

fn local_interpolate_sampled(
    map: &GeometricMap,
    basis: &NedelecBasis,
    value: impl Fn(&Vec3) -> CVec3,
) -> Vec<C64> {
    basis.apply_dofs(|xh: &Vec3, dir: &Vec3| {
        let p = map.eval(xh);
        let t = complexify(&(p.jac * dir));
        let u = value(xh);
        u[0] * t[0] + u[1] * t[1] + u[2] * t[2]
    })
}

/// `Π_h` of a field defined on the whole domain.
pub fn global_interpolate<'a>(space: &'a FeSpace, field: &dyn VectorField) -> Result<FemFunction<'a>> {
    let mesh = space.mesh();
    interpolate_sampled(space, |c, xh| field.value(&mesh.map_unchecked(c).point(xh)))
}

/// `Π_h` of a possibly cellwise-defined field, given through
/// `sample(c, x̂) = U(T_c(x̂))` evaluated from inside cell `c`.
///
/// Every global DOF is taken from the lowest-numbered cell containing its
/// entity. The values recovered from the other cells must agree, otherwise the
/// orientation tables are inconsistent and an error is returned.
pub fn interpolate_sampled<'a>(
    space: &'a FeSpace,
    sample: impl Fn(usize, &Vec3) -> CVec3 + Sync,
) -> Result<FemFunction<'a>> {
    let mesh = space.mesh();
    let dofs = space.dofs();
    let basis = space.basis();
    let k = space.degree();
    let per_cell: Vec<Vec<(usize, C64)>> = (0..mesh.num_cells())
        .into_par_iter()
        .map(|c| {
            let map = mesh.map_unchecked(c);
            let l = local_interpolate_sampled(&map, basis, |xh| sample(c, xh));
            let mut out = Vec::with_capacity(l.len());
            for first in (0..l.len()).step_by(k) {
                out.extend(dofs.block_to_global(c, first, &l[first..]));
            }
            out
        })
        .collect();
    let mut coeffs = vec![C64::new(0.0, 0.0); space.ndofs()];
    let mut owner = vec![usize::MAX; space.ndofs()];
    let scale = per_cell
        .iter()
        .flatten()
        .fold(0.0f64, |m, (_, v)| m.max(v.norm()));
    let tol = 1e-8 * scale.max(f64::MIN_POSITIVE);
    for (c, entries) in per_cell.iter().enumerate() {
        for &(g, v) in entries {
            if owner[g] == usize::MAX {
                owner[g] = c;
                coeffs[g] = v;
            } else if (coeffs[g] - v).norm() > tol {
                return Err(Error::Orientation {
                    entity: if dofs.is_edge_dof(g) { "edge" } else { "face" },
                    index: g,
                });
            }
        }
    }
    FemFunction::new(space, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{ConstantField, TrigField};
    use crate::mesh::{generate_ball_mesh, generate_cube_mesh};
    use crate::reference::poly::{Poly, PolyField};
    use crate::reference::ReferenceTet;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn smooth() -> TrigField {
        TrigField {
            amplitudes: vec![Vec3::new(1.0, -0.3, 0.5), Vec3::new(0.2, 0.7, -0.4)],
            wavevectors: vec![Vec3::new(1.3, -0.7, 2.1), Vec3::new(-1.1, 0.4, 0.9)],
            phases: vec![0.2, 1.4],
        }
    }

    #[test]
    fn constant_field_reproduced_on_affine_cell() {
        let mesh = Arc::new(generate_cube_mesh(1, 1).unwrap());
        let space = FeSpace::new(mesh, 1).unwrap();
        let c = CVec3::new(C64::new(1.0, 2.0), C64::from(-0.5), C64::from(3.0));
        let u = global_interpolate(&space, &ConstantField(c)).unwrap();
        for cell in [0, 5, 17] {
            let p = u.eval(cell, &Vec3::new(0.2, 0.3, 0.1)).unwrap();
            assert!((p.value - c).norm() < 1e-12);
            assert!(p.curl.norm() < 1e-12);
        }
    }

    #[test]
    fn local_polynomial_fields_are_reproduced() {
        let nodes: Vec<Vec3> = [
            Vec3::new(0.1, 0.0, 0.2),
            Vec3::new(1.2, 0.1, 0.0),
            Vec3::new(0.3, 0.9, -0.1),
            Vec3::new(0.0, 0.2, 1.1),
        ]
        .to_vec();
        let map = GeometricMap::from_nodes(&nodes).unwrap();
        let basis = NedelecBasis::new(2).unwrap();
        // A linear field lies in the degree-2 space on an affine cell.
        let field = PolyField([
            Poly::coordinate(1) + Poly::constant(0.5),
            Poly::coordinate(2) * 2.0,
            Poly::coordinate(0) - Poly::coordinate(1),
        ]);
        let l = local_interpolate(&map, &basis, &field);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let mut xh = Vec3::new(rng.random(), rng.random(), rng.random());
            xh /= xh.sum().max(1.0) * 1.01;
            let (vals, curls) = basis.eval(&xh).unwrap();
            let p = eval_mapped(0, &map.eval(&xh), &l, &vals, &curls).unwrap();
            assert!((p.value - field.value(&p.x)).norm() < 1e-10);
            assert!((p.curl - VectorField::curl(&field, &p.x)).norm() < 1e-10);
        }
    }

    fn check_reproduction(order: usize, k: usize) {
        let mesh = Arc::new(generate_ball_mesh(1, order).unwrap());
        let space = FeSpace::new(mesh, k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let coeffs: Vec<C64> = (0..space.ndofs())
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let u = FemFunction::new(&space, coeffs.clone()).unwrap();
        let basis = space.basis();
        let again = interpolate_sampled(&space, |c, xh| {
            let (vals, curls) = basis.eval_unchecked(xh);
            let p = space.mesh().map_unchecked(c).eval(xh);
            eval_mapped(c, &p, &u.local(c), &vals, &curls).unwrap().value
        })
        .unwrap();
        let err = again
            .coeffs()
            .iter()
            .zip(&coeffs)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()));
        assert!(err < 1e-10, "order {order}, k {k}: {err}");
    }

    #[test]
    fn interpolation_reproduces_discrete_functions() {
        for order in [1, 2] {
            for k in [1, 2] {
                check_reproduction(order, k);
            }
        }
    }

    #[test]
    fn tangential_traces_match_across_faces() {
        for (order, k) in [(1, 1), (2, 2), (2, 1), (1, 2)] {
            let mesh = Arc::new(generate_ball_mesh(1, order).unwrap());
            let space = FeSpace::new(mesh.clone(), k).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            let coeffs: Vec<C64> = (0..space.ndofs())
                .map(|_| C64::new(rng.random_range(-1.0..1.0), 0.0))
                .collect();
            let u = FemFunction::new(&space, coeffs).unwrap();
            let interior: Vec<usize> = (0..mesh.num_faces())
                .filter(|&f| !mesh.is_boundary_face(f))
                .collect();
            for _ in 0..25 {
                let f = interior[rng.random_range(0..interior.len())];
                let (s, t): (f64, f64) = (rng.random(), rng.random());
                let (s, t) = if s + t > 1.0 { (1.0 - s, 1.0 - t) } else { (s, t) };
                let lambda = [1.0 - s - t, s, t];
                let verts = mesh.faces()[f];
                let mut traces = Vec::new();
                for c in mesh.face_cells(f) {
                    let cv = mesh.cell_vertices(c);
                    let mut xh = Vec3::zeros();
                    for (v, l) in verts.iter().zip(lambda) {
                        let local = cv.iter().position(|x| x == v).unwrap();
                        xh += ReferenceTet::vertex(local) * l;
                    }
                    let map = mesh.element_map(c).unwrap();
                    let p = map.eval(&xh);
                    // Tangents of the face in this cell's parametrisation,
                    // ordered by global vertex.
                    let local: Vec<usize> = verts
                        .iter()
                        .map(|v| cv.iter().position(|x| x == v).unwrap())
                        .collect();
                    let [a, b, cc] = [0, 1, 2].map(|i| ReferenceTet::vertex(local[i]));
                    let t1 = complexify(&(p.jac * (b - a)));
                    let t2 = complexify(&(p.jac * (cc - a)));
                    let val = u.eval(c, &xh).unwrap();
                    traces.push((val.x, val.value.dot(&t1), val.value.dot(&t2)));
                }
                assert!((traces[0].0 - traces[1].0).norm() < 1e-12);
                assert!((traces[0].1 - traces[1].1).norm() < 1e-8);
                assert!((traces[0].2 - traces[1].2).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn locality_of_cell_dofs() {
        let mesh = Arc::new(generate_ball_mesh(0, 1).unwrap());
        let space = FeSpace::new(mesh.clone(), 2).unwrap();
        let field = smooth();
        let map = mesh.element_map(4).unwrap();
        let a = local_interpolate(&map, space.basis(), &field);
        let far = Vec3::new(5.0, 5.0, 5.0);
        let bumped = crate::fields::FnField {
            value: |x: &Vec3| {
                let bump = if (x - far).norm() < 1.0 { 1.0 } else { 0.0 };
                field.value(x) + CVec3::repeat(C64::from(bump))
            },
            curl: |x: &Vec3| field.curl(x),
        };
        assert_eq!(a, local_interpolate(&map, space.basis(), &bumped));
    }
}
