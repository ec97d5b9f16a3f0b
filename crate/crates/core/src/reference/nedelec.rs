//! First-kind Nedelec spaces of degree 1 and 2 on the reference tetrahedron.
//!
//! The local space is `P_{k-1}^3 + {p homogeneous of degree k : x . p = 0}`.
//! Degrees of freedom:
//!
//! * edge moments `int_0^1 u(a + t(b - a)) . (b - a) q(t) dt` with `q = 1`
//!   for k = 1 and `q in {1 - t, t}` for k = 2 (edge traversed from its lower
//!   to its higher local vertex);
//! * for k = 2, face moments `int u(a + s t1 + r t2) . t_j ds dr` over the
//!   reference triangle, with `t1 = b - a`, `t2 = c - a` for the ascending
//!   face vertices `(a, b, c)`.
//!
//! Both families are invariant under covariant pull-back: evaluating them on
//! `dT^T (u o T)` equals the same moments taken along the mapped edge/face.

use super::poly::{Poly, PolyField};
use super::quadrature::{LineRule, SimplexRule, TriangleRule};
use super::{ReferenceTet, INSIDE_TOL};
use crate::{Error, Result, Vec3};
use nalgebra::DMatrix;
use std::ops::{AddAssign, Mul};

/// Weight polynomial of an edge moment, in the edge parameter `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeWeight {
    One,
    /// `1 - t`, concentrated at the edge start.
    Start,
    /// `t`, concentrated at the edge end.
    End,
}

impl EdgeWeight {
    fn eval(self, t: f64) -> f64 {
        match self {
            EdgeWeight::One => 1.0,
            EdgeWeight::Start => 1.0 - t,
            EdgeWeight::End => t,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DofFunctional {
    Edge { edge: usize, weight: EdgeWeight },
    Face { face: usize, tangent: usize },
}

#[derive(Clone, Debug)]
pub struct NedelecBasis {
    degree: usize,
    functions: Vec<PolyField>,
    curls: Vec<PolyField>,
    dofs: Vec<DofFunctional>,
    line: LineRule,
    triangle: TriangleRule,
}

/// Dimension `k (k + 2) (k + 3) / 2` of the degree-`k` space.
pub fn nedelec_dim(k: usize) -> usize {
    k * (k + 2) * (k + 3) / 2
}

pub fn nedelec_space(k: usize) -> Result<NedelecBasis> {
    NedelecBasis::new(k)
}

fn spanning_set(k: usize) -> Vec<PolyField> {
    let mut out = Vec::new();
    match k {
        1 => {
            for j in 0..3 {
                out.push(PolyField::unit(j));
            }
            for j in 0..3 {
                out.push(PolyField::unit(j).position_cross().unwrap());
            }
        }
        2 => {
            for j in 0..3 {
                out.push(PolyField::unit(j));
                for m in 0..3 {
                    out.push(PolyField::along(j, Poly::coordinate(m)));
                }
            }
            // x × (x_m e_j); the three diagonal terms sum to x × x = 0, drop one.
            for j in 0..3 {
                for m in 0..3 {
                    if (m, j) != (2, 2) {
                        let p = PolyField::along(j, Poly::coordinate(m));
                        out.push(p.position_cross().unwrap());
                    }
                }
            }
        }
        _ => unreachable!(),
    }
    out
}

fn dof_list(k: usize) -> Vec<DofFunctional> {
    let mut out = Vec::new();
    for edge in 0..6 {
        if k == 1 {
            out.push(DofFunctional::Edge {
                edge,
                weight: EdgeWeight::One,
            });
        } else {
            out.push(DofFunctional::Edge {
                edge,
                weight: EdgeWeight::Start,
            });
            out.push(DofFunctional::Edge {
                edge,
                weight: EdgeWeight::End,
            });
        }
    }
    if k == 2 {
        for face in 0..4 {
            for tangent in 0..2 {
                out.push(DofFunctional::Face { face, tangent });
            }
        }
    }
    out
}

impl NedelecBasis {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 || k > 2 {
            return Err(Error::UnsupportedDegree(k));
        }
        let line = SimplexRule::new(2 * k + 2)?;
        let triangle = SimplexRule::new(2 * k + 2)?;
        let span = spanning_set(k);
        let dofs = dof_list(k);
        let n = dofs.len();
        debug_assert_eq!(span.len(), n);
        let mut basis = NedelecBasis {
            degree: k,
            functions: Vec::new(),
            curls: Vec::new(),
            dofs,
            line,
            triangle,
        };
        let d = DMatrix::from_fn(n, n, |i, j| {
            basis.apply_dof(i, |x: &Vec3, dir: &Vec3| span[j].eval(x).dot(dir))
        });
        let c = d
            .try_inverse()
            .ok_or_else(|| Error::InvalidInput(format!("degree {k} DOF matrix is singular")))?;
        basis.functions = (0..n)
            .map(|j| {
                span.iter()
                    .enumerate()
                    .fold(PolyField::zero(), |acc, (l, s)| acc + s.scale(c[(l, j)]))
            })
            .collect();
        basis.curls = basis.functions.iter().map(PolyField::curl).collect();
        Ok(basis)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.dofs.len()
    }

    pub fn functions(&self) -> &[PolyField] {
        &self.functions
    }

    pub fn curls(&self) -> &[PolyField] {
        &self.curls
    }

    pub fn dofs(&self) -> &[DofFunctional] {
        &self.dofs
    }

    /// Number of DOFs carried by each edge.
    pub fn dofs_per_edge(&self) -> usize {
        self.degree
    }

    /// Number of DOFs carried by each face.
    pub fn dofs_per_face(&self) -> usize {
        if self.degree == 2 {
            2
        } else {
            0
        }
    }

    /// Values and curls of all basis functions at a point of the closed
    /// reference tetrahedron.
    pub fn eval(&self, x: &Vec3) -> Result<(Vec<Vec3>, Vec<Vec3>)> {
        if !ReferenceTet::contains(x, INSIDE_TOL) {
            return Err(Error::OutsideReference(x[0], x[1], x[2]));
        }
        Ok(self.eval_unchecked(x))
    }

    pub fn eval_unchecked(&self, x: &Vec3) -> (Vec<Vec3>, Vec<Vec3>) {
        (
            self.functions.iter().map(|f| f.eval(x)).collect(),
            self.curls.iter().map(|f| f.eval(x)).collect(),
        )
    }

    /// Apply DOF `i` to a field given through its tangential sampler
    /// `f(x, dir) = u(x) . dir` on the reference element.
    pub fn apply_dof<T, F>(&self, i: usize, f: F) -> T
    where
        T: Copy + Default + AddAssign + Mul<f64, Output = T>,
        F: Fn(&Vec3, &Vec3) -> T,
    {
        let mut acc = T::default();
        match self.dofs[i] {
            DofFunctional::Edge { edge, weight } => {
                let [a, b] = ReferenceTet::EDGES[edge].map(ReferenceTet::vertex);
                let tau = b - a;
                for (p, w) in self.line.iter() {
                    let t = p[0];
                    acc += f(&(a + tau * t), &tau) * (w * weight.eval(t));
                }
            }
            DofFunctional::Face { face, tangent } => {
                let [a, b, c] = ReferenceTet::FACES[face].map(ReferenceTet::vertex);
                let dir = if tangent == 0 { b - a } else { c - a };
                for (p, w) in self.triangle.iter() {
                    let x = a + (b - a) * p[0] + (c - a) * p[1];
                    acc += f(&x, &dir) * w;
                }
            }
        }
        acc
    }

    /// All DOFs of a field given by its tangential sampler.
    pub fn apply_dofs<T, F>(&self, f: F) -> Vec<T>
    where
        T: Copy + Default + AddAssign + Mul<f64, Output = T>,
        F: Fn(&Vec3, &Vec3) -> T,
    {
        (0..self.dim()).map(|i| self.apply_dof(i, &f)).collect()
    }

    /// `[sigma_i(phi_j)]`, which is the identity for a unisolvent basis.
    pub fn duality_matrix(&self) -> DMatrix<f64> {
        let n = self.dim();
        DMatrix::from_fn(n, n, |i, j| {
            self.apply_dof(i, |x: &Vec3, d: &Vec3| self.functions[j].eval(x).dot(d))
        })
    }

    /// Expand coefficients into a polynomial field.
    pub fn combine(&self, coeffs: &[f64]) -> PolyField {
        self.functions
            .iter()
            .zip(coeffs)
            .fold(PolyField::zero(), |acc, (f, c)| acc + f.scale(*c))
    }
}
