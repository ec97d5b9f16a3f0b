//! Dense polynomials in three variables of total degree at most three.
//!
//! This is enough for Nedelec spaces up to degree two, their curls and the
//! symbolic checks that compose them with quadratic geometry.

use crate::Vec3;
use std::ops::{Add, Mul, Neg, Sub};

/// Highest total degree representable.
pub const MAX_DEGREE: u32 = 3;
/// Number of monomials of total degree <= [`MAX_DEGREE`].
pub const NUM_MONOMIALS: usize = 20;

/// Exponents `(a, b, c)` of `x^a y^b z^c`, graded by total degree.
pub const MONOMIALS: [[u32; 3]; NUM_MONOMIALS] = [
    [0, 0, 0],
    [1, 0, 0],
    [0, 1, 0],
    [0, 0, 1],
    [2, 0, 0],
    [1, 1, 0],
    [1, 0, 1],
    [0, 2, 0],
    [0, 1, 1],
    [0, 0, 2],
    [3, 0, 0],
    [2, 1, 0],
    [2, 0, 1],
    [1, 2, 0],
    [1, 1, 1],
    [1, 0, 2],
    [0, 3, 0],
    [0, 2, 1],
    [0, 1, 2],
    [0, 0, 3],
];

/// Index of a monomial in [`MONOMIALS`], `None` if its degree is too high.
pub fn monomial_index(e: [u32; 3]) -> Option<usize> {
    MONOMIALS.iter().position(|m| *m == e)
}

fn monomial_values(x: &Vec3) -> [f64; NUM_MONOMIALS] {
    let mut p = [[1.0; 4]; 3];
    for d in 0..3 {
        for k in 1..4 {
            p[d][k] = p[d][k - 1] * x[d];
        }
    }
    let mut out = [0.0; NUM_MONOMIALS];
    for (o, e) in out.iter_mut().zip(MONOMIALS.iter()) {
        *o = p[0][e[0] as usize] * p[1][e[1] as usize] * p[2][e[2] as usize];
    }
    out
}

/// Scalar polynomial stored by monomial coefficients.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Poly(pub [f64; NUM_MONOMIALS]);

impl Default for Poly {
    fn default() -> Self {
        Self::zero()
    }
}

impl Poly {
    pub const fn zero() -> Self {
        Poly([0.0; NUM_MONOMIALS])
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial([0, 0, 0], c)
    }

    /// `c * x^a y^b z^c`. Panics if the degree exceeds [`MAX_DEGREE`].
    pub fn monomial(e: [u32; 3], coeff: f64) -> Self {
        let mut p = Self::zero();
        let i = monomial_index(e).expect("monomial degree exceeds MAX_DEGREE");
        p.0[i] = coeff;
        p
    }

    /// The coordinate function `x_axis`.
    pub fn coordinate(axis: usize) -> Self {
        let mut e = [0; 3];
        e[axis] = 1;
        Self::monomial(e, 1.0)
    }

    pub fn eval(&self, x: &Vec3) -> f64 {
        let m = monomial_values(x);
        self.0.iter().zip(m.iter()).map(|(c, v)| c * v).sum()
    }

    /// Highest degree with a coefficient above `tol` in magnitude.
    pub fn degree(&self, tol: f64) -> Option<u32> {
        self.0
            .iter()
            .zip(MONOMIALS.iter())
            .filter(|(c, _)| c.abs() > tol)
            .map(|(_, e)| e[0] + e[1] + e[2])
            .max()
    }

    pub fn derivative(&self, axis: usize) -> Self {
        let mut out = Self::zero();
        for (c, e) in self.0.iter().zip(MONOMIALS.iter()) {
            if *c == 0.0 || e[axis] == 0 {
                continue;
            }
            let mut d = *e;
            d[axis] -= 1;
            out.0[monomial_index(d).unwrap()] += c * e[axis] as f64;
        }
        out
    }

    /// Product, or `None` when the result would exceed [`MAX_DEGREE`].
    pub fn checked_mul(&self, other: &Poly) -> Option<Poly> {
        let mut out = Self::zero();
        for (ca, ea) in self.0.iter().zip(MONOMIALS.iter()) {
            if *ca == 0.0 {
                continue;
            }
            for (cb, eb) in other.0.iter().zip(MONOMIALS.iter()) {
                if *cb == 0.0 {
                    continue;
                }
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]];
                out.0[monomial_index(e)?] += ca * cb;
            }
        }
        Some(out)
    }

    /// Substitute `x_i -> map[i]`. `None` when the result exceeds [`MAX_DEGREE`].
    pub fn compose(&self, map: &[Poly; 3]) -> Option<Poly> {
        let mut out = Self::zero();
        for (c, e) in self.0.iter().zip(MONOMIALS.iter()) {
            if *c == 0.0 {
                continue;
            }
            let mut term = Self::constant(*c);
            for d in 0..3 {
                for _ in 0..e[d] {
                    term = term.checked_mul(&map[d])?;
                }
            }
            out = out + term;
        }
        Some(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        Poly(self.0.map(|c| c * s))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        for (a, b) in self.0.iter_mut().zip(rhs.0.iter()) {
            *a += b;
        }
        self
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        self + (-rhs)
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

impl Mul<f64> for Poly {
    type Output = Poly;
    fn mul(self, s: f64) -> Poly {
        self.scale(s)
    }
}

/// Vector field with polynomial components.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PolyField(pub [Poly; 3]);

impl PolyField {
    pub fn zero() -> Self {
        PolyField([Poly::zero(); 3])
    }

    /// Constant field equal to the unit vector `e_axis`.
    pub fn unit(axis: usize) -> Self {
        let mut f = Self::zero();
        f.0[axis] = Poly::constant(1.0);
        f
    }

    /// `p * e_axis`.
    pub fn along(axis: usize, p: Poly) -> Self {
        let mut f = Self::zero();
        f.0[axis] = p;
        f
    }

    pub fn eval(&self, x: &Vec3) -> Vec3 {
        let m = monomial_values(x);
        let dot = |p: &Poly| p.0.iter().zip(m.iter()).map(|(c, v)| c * v).sum::<f64>();
        Vec3::new(dot(&self.0[0]), dot(&self.0[1]), dot(&self.0[2]))
    }

    pub fn curl(&self) -> PolyField {
        let [u, v, w] = &self.0;
        PolyField([
            w.derivative(1) - v.derivative(2),
            u.derivative(2) - w.derivative(0),
            v.derivative(0) - u.derivative(1),
        ])
    }

    /// `x × self`, where `x` is the position vector.
    pub fn position_cross(&self) -> Option<PolyField> {
        let x = [Poly::coordinate(0), Poly::coordinate(1), Poly::coordinate(2)];
        let [a, b, c] = &self.0;
        Some(PolyField([
            x[1].checked_mul(c)? - x[2].checked_mul(b)?,
            x[2].checked_mul(a)? - x[0].checked_mul(c)?,
            x[0].checked_mul(b)? - x[1].checked_mul(a)?,
        ]))
    }

    pub fn compose(&self, map: &[Poly; 3]) -> Option<PolyField> {
        Some(PolyField([
            self.0[0].compose(map)?,
            self.0[1].compose(map)?,
            self.0[2].compose(map)?,
        ]))
    }

    /// `M(x)^T self` for a matrix of polynomials given by columns.
    pub fn transpose_apply(columns: &[[Poly; 3]; 3], v: &PolyField) -> Option<PolyField> {
        let mut out = PolyField::zero();
        for j in 0..3 {
            let mut acc = Poly::zero();
            for i in 0..3 {
                acc = acc + columns[j][i].checked_mul(&v.0[i])?;
            }
            out.0[j] = acc;
        }
        Some(out)
    }

    pub fn scale(&self, s: f64) -> Self {
        PolyField(self.0.map(|p| p.scale(s)))
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.0.iter().fold(0.0, |m, p| m.max(p.max_abs_coeff()))
    }
}

impl Add for PolyField {
    type Output = PolyField;
    fn add(self, rhs: PolyField) -> PolyField {
        PolyField([
            self.0[0] + rhs.0[0],
            self.0[1] + rhs.0[1],
            self.0[2] + rhs.0[2],
        ])
    }
}

impl Sub for PolyField {
    type Output = PolyField;
    fn sub(self, rhs: PolyField) -> PolyField {
        self + rhs.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_and_eval_agree_with_hand_values() {
        // p = 3 x^2 y - z + 2
        let p = Poly::monomial([2, 1, 0], 3.0) + Poly::coordinate(2) * -1.0 + Poly::constant(2.0);
        let x = Vec3::new(0.5, -2.0, 1.5);
        assert!((p.eval(&x) - (3.0 * 0.25 * -2.0 - 1.5 + 2.0)).abs() < 1e-15);
        let dx = p.derivative(0);
        assert!((dx.eval(&x) - 6.0 * 0.5 * -2.0).abs() < 1e-15);
        assert_eq!(p.degree(0.0), Some(3));
    }

    #[test]
    fn curl_of_rotation_field() {
        // (-y, x, 0) has curl (0, 0, 2)
        let f = PolyField([-Poly::coordinate(1), Poly::coordinate(0), Poly::zero()]);
        let c = f.curl();
        assert_eq!(c.eval(&Vec3::new(0.3, 0.1, 0.7)), Vec3::new(0.0, 0.0, 2.0));
    }

    #[test]
    fn overflowing_product_is_rejected() {
        let a = Poly::monomial([2, 0, 0], 1.0);
        assert!(a.checked_mul(&a).is_none());
        assert!(a.checked_mul(&Poly::coordinate(1)).is_some());
    }

    #[test]
    fn compose_matches_pointwise_substitution() {
        let p = Poly::monomial([1, 1, 0], 2.0) + Poly::coordinate(2);
        let map = [
            Poly::coordinate(0) * 2.0 + Poly::constant(1.0),
            Poly::coordinate(1) - Poly::coordinate(2),
            Poly::monomial([0, 0, 2], 1.0),
        ];
        let q = p.compose(&map).unwrap();
        let x = Vec3::new(0.2, 0.4, 0.9);
        let y = Vec3::new(map[0].eval(&x), map[1].eval(&x), map[2].eval(&x));
        assert!((q.eval(&x) - p.eval(&y)).abs() < 1e-14);
    }
}
