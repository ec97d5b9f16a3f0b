use crate::reference::geometric_shapes;
use crate::{Error, Mat3, Result, Vec3};

/// The map `T_K` from the reference tetrahedron onto a (possibly curved) cell.
#[derive(Clone, Debug)]
pub struct GeometricMap {
    cell: usize,
    order: usize,
    nodes: [Vec3; 10],
    affine: bool,
}

/// `T_K`, `dT_K` and `det dT_K` at one reference point.
#[derive(Clone, Copy, Debug)]
pub struct MapPoint {
    pub x: Vec3,
    pub jac: Mat3,
    pub det: f64,
}

/// Adjugate (cofactor transpose), so that `adj(A) A = det(A) I`.
pub fn adjugate(a: &Mat3) -> Mat3 {
    let c0 = a.column(0).into_owned();
    let c1 = a.column(1).into_owned();
    let c2 = a.column(2).into_owned();
    Mat3::from_rows(&[
        c1.cross(&c2).transpose(),
        c2.cross(&c0).transpose(),
        c0.cross(&c1).transpose(),
    ])
}

impl MapPoint {
    /// `det(dT) dT^{-1}`.
    pub fn cofactor(&self) -> Mat3 {
        adjugate(&self.jac)
    }

    /// `dT^{-T}`, failing on a singular Jacobian.
    pub fn inverse_transpose(&self, cell: usize) -> Result<Mat3> {
        if self.det.abs() < 1e-300 || !self.det.is_finite() {
            return Err(Error::SingularJacobian { cell, det: self.det });
        }
        Ok(adjugate(&self.jac).transpose() / self.det)
    }
}

impl GeometricMap {
    pub(crate) fn new(cell: usize, order: usize, nodes: [Vec3; 10]) -> Self {
        let affine = order == 1
            || crate::reference::ReferenceTet::EDGES
                .iter()
                .enumerate()
                .all(|(e, [a, b])| {
                    let mid = (nodes[*a] + nodes[*b]) * 0.5;
                    let scale = (nodes[*a] - nodes[*b]).norm();
                    (nodes[4 + e] - mid).norm() <= 1e-14 * scale
                });
        GeometricMap {
            cell,
            order,
            nodes,
            affine,
        }
    }

    /// Map built directly from node coordinates (4 or 10 points).
    pub fn from_nodes(nodes: &[Vec3]) -> Result<Self> {
        let order = match nodes.len() {
            4 => 1,
            10 => 2,
            n => {
                return Err(Error::InvalidInput(format!(
                    "a cell map needs 4 or 10 nodes, got {n}"
                )))
            }
        };
        let mut pts = [Vec3::zeros(); 10];
        pts[..nodes.len()].copy_from_slice(nodes);
        Ok(Self::new(usize::MAX, order, pts))
    }

    pub fn cell(&self) -> usize {
        self.cell
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> &[Vec3] {
        if self.order == 1 {
            &self.nodes[..4]
        } else {
            &self.nodes
        }
    }

    /// True when `dT_K` is constant (straight cell).
    pub fn is_affine(&self) -> bool {
        self.affine
    }

    fn affine_jacobian(&self) -> Mat3 {
        let v = &self.nodes;
        Mat3::from_columns(&[v[1] - v[0], v[2] - v[0], v[3] - v[0]])
    }

    pub fn eval(&self, xh: &Vec3) -> MapPoint {
        if self.affine {
            let jac = self.affine_jacobian();
            return MapPoint {
                x: self.nodes[0] + jac * xh,
                det: jac.determinant(),
                jac,
            };
        }
        let shapes = geometric_shapes(self.order).unwrap();
        let (val, grad) = shapes.eval(xh);
        let mut x = Vec3::zeros();
        let mut jac = Mat3::zeros();
        for i in 0..shapes.num_nodes() {
            x += self.nodes[i] * val[i];
            jac += self.nodes[i] * grad[i].transpose();
        }
        MapPoint {
            x,
            det: jac.determinant(),
            jac,
        }
    }

    pub fn point(&self, xh: &Vec3) -> Vec3 {
        self.eval(xh).x
    }

    pub fn jacobian(&self, xh: &Vec3) -> Mat3 {
        self.eval(xh).jac
    }

    pub fn det(&self, xh: &Vec3) -> f64 {
        self.eval(xh).det
    }

    /// `dT^co = det(dT) dT^{-1}`.
    pub fn cofactor(&self, xh: &Vec3) -> Mat3 {
        self.eval(xh).cofactor()
    }

    /// Polynomial form of the map, one polynomial per physical coordinate.
    pub fn polys(&self) -> [crate::reference::poly::Poly; 3] {
        use crate::reference::poly::Poly;
        let shapes = geometric_shapes(self.order).unwrap();
        let mut out = [Poly::zero(); 3];
        for (i, s) in shapes.polys().iter().enumerate() {
            for d in 0..3 {
                out[d] = out[d] + s.scale(self.nodes[i][d]);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::ReferenceTet;

    fn affine(nodes: [Vec3; 4]) -> GeometricMap {
        GeometricMap::from_nodes(&nodes).unwrap()
    }

    #[test]
    fn reference_cell_is_identity() {
        let m = affine([0, 1, 2, 3].map(ReferenceTet::vertex));
        let p = m.eval(&Vec3::new(0.1, 0.2, 0.3));
        assert_eq!(p.jac, Mat3::identity());
        assert_eq!(p.det, 1.0);
        assert_eq!(p.cofactor(), Mat3::identity());
    }

    #[test]
    fn scaled_cell() {
        let m = affine([0, 1, 2, 3].map(|i| ReferenceTet::vertex(i) * 2.0));
        let p = m.eval(&Vec3::new(0.25, 0.25, 0.25));
        assert!((p.det - 8.0).abs() < 1e-14);
        assert!((p.cofactor() - Mat3::identity() * 4.0).norm() < 1e-14);
    }

    #[test]
    fn det_is_six_volumes() {
        let nodes = [
            Vec3::new(0.3, -0.2, 0.1),
            Vec3::new(1.1, 0.0, 0.2),
            Vec3::new(0.2, 0.9, -0.1),
            Vec3::new(0.1, 0.3, 1.4),
        ];
        let m = affine(nodes);
        let [a, b, c, d] = nodes;
        let vol = (b - a).cross(&(c - a)).dot(&(d - a)) / 6.0;
        assert!((m.det(&Vec3::new(0.2, 0.2, 0.2)) - 6.0 * vol).abs() < 1e-12);
    }

    #[test]
    fn straight_tet10_matches_tet4() {
        let v = [
            Vec3::new(0.3, -0.2, 0.1),
            Vec3::new(1.1, 0.0, 0.2),
            Vec3::new(0.2, 0.9, -0.1),
            Vec3::new(0.1, 0.3, 1.4),
        ];
        let mut ten = v.to_vec();
        for [a, b] in ReferenceTet::EDGES {
            ten.push((v[a] + v[b]) * 0.5);
        }
        let m4 = affine(v);
        let m10 = GeometricMap::from_nodes(&ten).unwrap();
        assert!(m10.is_affine());
        // force the general path as well
        let general = GeometricMap { affine: false, ..m10.clone() };
        let x = Vec3::new(0.1, 0.5, 0.2);
        assert!((m4.point(&x) - general.point(&x)).norm() < 1e-14);
        assert!((m4.jacobian(&x) - general.jacobian(&x)).norm() < 1e-13);
    }

    #[test]
    fn adjugate_identity() {
        let a = Mat3::new(1.0, 2.0, 0.5, -0.3, 1.5, 0.2, 0.7, 0.1, 2.0);
        let r = adjugate(&a) * a - Mat3::identity() * a.determinant();
        assert!(r.norm() < 1e-13);
    }

    #[test]
    fn polys_reproduce_quadratic_map() {
        let mut nodes: Vec<Vec3> = (0..4).map(ReferenceTet::vertex).collect();
        for [a, b] in ReferenceTet::EDGES {
            nodes.push((nodes[a] + nodes[b]) * 0.5 + Vec3::new(0.01 * a as f64, 0.02, -0.01 * b as f64));
        }
        let m = GeometricMap::from_nodes(&nodes).unwrap();
        let p = m.polys();
        let x = Vec3::new(0.2, 0.3, 0.1);
        let y = m.point(&x);
        for d in 0..3 {
            assert!((p[d].eval(&x) - y[d]).abs() < 1e-14);
        }
    }
}
