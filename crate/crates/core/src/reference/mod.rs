//! The reference tetrahedron and everything defined on it.

pub mod nedelec;
pub mod poly;
pub mod quadrature;
pub mod shapes;

pub use nedelec::{nedelec_space, DofFunctional, NedelecBasis};
pub use quadrature::{quadrature, LineRule, QuadratureRule, SimplexRule, TriangleRule};
pub use shapes::{geometric_shapes, GeometricShapeSet};

use crate::Vec3;

/// Tolerance used to decide whether a point lies in the closed reference cell.
pub const INSIDE_TOL: f64 = 1e-12;

/// The unit tetrahedron with vertices `0, e1, e2, e3`.
///
/// Local edge `i` joins `EDGES[i][0] -> EDGES[i][1]`; local face `i` is the
/// face opposite vertex `i`, its vertices listed in ascending order.
pub struct ReferenceTet;

impl ReferenceTet {
    pub const VERTICES: [[f64; 3]; 4] = [
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
    ];
    pub const EDGES: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];
    pub const FACES: [[usize; 3]; 4] = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];
    pub const VOLUME: f64 = 1.0 / 6.0;

    pub fn vertex(i: usize) -> Vec3 {
        let v = Self::VERTICES[i];
        Vec3::new(v[0], v[1], v[2])
    }

    /// Local edge index joining vertices `a` and `b` (either order).
    pub fn edge_index(a: usize, b: usize) -> Option<usize> {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        Self::EDGES.iter().position(|e| *e == [lo, hi])
    }

    /// Barycentric coordinates `(1 - x - y - z, x, y, z)`.
    pub fn barycentric(x: &Vec3) -> [f64; 4] {
        [1.0 - x[0] - x[1] - x[2], x[0], x[1], x[2]]
    }

    pub fn contains(x: &Vec3, tol: f64) -> bool {
        Self::barycentric(x).iter().all(|&l| l >= -tol)
    }

    /// Point on local face `f` with face coordinates `(s, t)`:
    /// `a + s (b - a) + t (c - a)` for the face vertices `(a, b, c)`.
    pub fn face_point(f: usize, s: f64, t: f64) -> Vec3 {
        let [a, b, c] = Self::FACES[f].map(Self::vertex);
        a + (b - a) * s + (c - a) * t
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn volume_from_vertices() {
        let [a, b, c, d] = [0, 1, 2, 3].map(ReferenceTet::vertex);
        let vol = (b - a).cross(&(c - a)).dot(&(d - a)) / 6.0;
        assert_eq!(vol, ReferenceTet::VOLUME);
    }

    #[test]
    fn faces_are_opposite_their_index() {
        for (i, f) in ReferenceTet::FACES.iter().enumerate() {
            assert!(!f.contains(&i));
            assert!(f.windows(2).all(|w| w[0] < w[1]));
        }
        assert_eq!(ReferenceTet::edge_index(3, 1), Some(4));
    }
}
