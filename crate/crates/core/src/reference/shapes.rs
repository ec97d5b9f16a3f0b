//! Lagrange shape functions of order one and two used for element maps.
//!
//! Node order: the four vertices, then the midpoints of the reference edges
//! in [`ReferenceTet::EDGES`] order: (0,1) (0,2) (0,3) (1,2) (1,3) (2,3).

use super::poly::Poly;
use super::ReferenceTet;
use crate::{Error, Result, Vec3};

pub const MAX_NODES: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GeometricShapeSet {
    order: usize,
}

pub fn geometric_shapes(order: usize) -> Result<GeometricShapeSet> {
    match order {
        1 | 2 => Ok(GeometricShapeSet { order }),
        _ => Err(Error::UnsupportedOrder(order)),
    }
}

fn lambda_gradients() -> [Vec3; 4] {
    [
        Vec3::new(-1.0, -1.0, -1.0),
        Vec3::new(1.0, 0.0, 0.0),
        Vec3::new(0.0, 1.0, 0.0),
        Vec3::new(0.0, 0.0, 1.0),
    ]
}

impl GeometricShapeSet {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn num_nodes(&self) -> usize {
        if self.order == 1 {
            4
        } else {
            10
        }
    }

    /// Reference coordinates of node `i`.
    pub fn node(&self, i: usize) -> Vec3 {
        if i < 4 {
            ReferenceTet::vertex(i)
        } else {
            let [a, b] = ReferenceTet::EDGES[i - 4];
            (ReferenceTet::vertex(a) + ReferenceTet::vertex(b)) * 0.5
        }
    }

    /// Values and gradients at `x`; only the first [`Self::num_nodes`] entries are set.
    pub fn eval(&self, x: &Vec3) -> ([f64; MAX_NODES], [Vec3; MAX_NODES]) {
        let l = ReferenceTet::barycentric(x);
        let g = lambda_gradients();
        let mut val = [0.0; MAX_NODES];
        let mut grad = [Vec3::zeros(); MAX_NODES];
        if self.order == 1 {
            val[..4].copy_from_slice(&l);
            grad[..4].copy_from_slice(&g);
        } else {
            for i in 0..4 {
                val[i] = l[i] * (2.0 * l[i] - 1.0);
                grad[i] = g[i] * (4.0 * l[i] - 1.0);
            }
            for (e, [a, b]) in ReferenceTet::EDGES.iter().enumerate() {
                val[4 + e] = 4.0 * l[*a] * l[*b];
                grad[4 + e] = (g[*a] * l[*b] + g[*b] * l[*a]) * 4.0;
            }
        }
        (val, grad)
    }

    /// The same shape functions as explicit polynomials, for symbolic work.
    pub fn polys(&self) -> Vec<Poly> {
        let l = [
            Poly::constant(1.0) - Poly::coordinate(0) - Poly::coordinate(1) - Poly::coordinate(2),
            Poly::coordinate(0),
            Poly::coordinate(1),
            Poly::coordinate(2),
        ];
        if self.order == 1 {
            return l.to_vec();
        }
        let mut out = Vec::with_capacity(10);
        for li in &l {
            out.push(li.checked_mul(&(li.scale(2.0) - Poly::constant(1.0))).unwrap());
        }
        for [a, b] in ReferenceTet::EDGES {
            out.push(l[a].checked_mul(&l[b]).unwrap().scale(4.0));
        }
        out
    }
}
