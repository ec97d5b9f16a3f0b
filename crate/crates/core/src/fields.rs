//! Vector fields used as data, exact solutions and test inputs.

use crate::reference::poly::PolyField;
use crate::{complexify, CVec3, Mat3, Vec3, C64};
use std::f64::consts::PI;

/// Complex vector field on R^3 with a curl.
pub trait VectorField: Sync {
    fn value(&self, x: &Vec3) -> CVec3;

    /// Defaults to second-order central differences with step `1e-6`.
    fn curl(&self, x: &Vec3) -> CVec3 {
        fd_curl(|p| self.value(p), x, 1e-6)
    }
}

/// Central-difference curl of `f` at `x`.
pub fn fd_curl(f: impl Fn(&Vec3) -> CVec3, x: &Vec3, step: f64) -> CVec3 {
    let d = |i: usize, j: usize| -> C64 {
        // d f_i / d x_j
        let mut e = Vec3::zeros();
        e[j] = step;
        (f(&(x + e))[i] - f(&(x - e))[i]) / (2.0 * step)
    };
    CVec3::new(d(2, 1) - d(1, 2), d(0, 2) - d(2, 0), d(1, 0) - d(0, 1))
}

/// Closure-backed field with an analytic curl.
pub struct FnField<V, C> {
    pub value: V,
    pub curl: C,
}

impl<V, C> VectorField for FnField<V, C>
where
    V: Fn(&Vec3) -> CVec3 + Sync,
    C: Fn(&Vec3) -> CVec3 + Sync,
{
    fn value(&self, x: &Vec3) -> CVec3 {
        (self.value)(x)
    }
    fn curl(&self, x: &Vec3) -> CVec3 {
        (self.curl)(x)
    }
}

impl VectorField for PolyField {
    fn value(&self, x: &Vec3) -> CVec3 {
        complexify(&self.eval(x))
    }
    fn curl(&self, x: &Vec3) -> CVec3 {
        complexify(&PolyField::curl(self).eval(x))
    }
}

/// Constant field.
pub struct ConstantField(pub CVec3);

impl VectorField for ConstantField {
    fn value(&self, _: &Vec3) -> CVec3 {
        self.0
    }
    fn curl(&self, _: &Vec3) -> CVec3 {
        CVec3::zeros()
    }
}

/// The zero field.
pub struct ZeroField;

impl VectorField for ZeroField {
    fn value(&self, _: &Vec3) -> CVec3 {
        CVec3::zeros()
    }
    fn curl(&self, _: &Vec3) -> CVec3 {
        CVec3::zeros()
    }
}

/// Exact cavity solution on the unit ball:
/// `E(x) = (x1, x2 + cos(pi |x|^2 / 2) / 4, x3)`.
///
/// Its tangential trace vanishes on the unit sphere, where it equals `x`.
pub struct BallSolution;

impl BallSolution {
    pub fn real_value(x: &Vec3) -> Vec3 {
        let g = 0.5 * PI * x.norm_squared();
        Vec3::new(x[0], x[1] + 0.25 * g.cos(), x[2])
    }

    pub fn real_curl(x: &Vec3) -> Vec3 {
        let s = (0.5 * PI * x.norm_squared()).sin();
        Vec3::new(0.25 * PI * x[2] * s, 0.0, -0.25 * PI * x[0] * s)
    }
}

impl VectorField for BallSolution {
    fn value(&self, x: &Vec3) -> CVec3 {
        complexify(&Self::real_value(x))
    }
    fn curl(&self, x: &Vec3) -> CVec3 {
        complexify(&Self::real_curl(x))
    }
}

/// The real vector `[J1, J2, J3]` of the ball experiment; the imposed
/// current is `i [J1, J2, J3]`.
pub fn ball_current_real(x: &Vec3) -> Vec3 {
    let g = 0.5 * PI * x.norm_squared();
    let (s, c) = g.sin_cos();
    let p2 = PI * PI / 8.0;
    Vec3::new(
        x[0] - p2 * x[0] * x[1] * c,
        x[1] + (0.25 + p2 * (x[0] * x[0] + x[2] * x[2])) * c + 0.25 * PI * s,
        x[2] - p2 * x[1] * x[2] * c,
    )
}

/// PEC-compatible manufactured solution on the unit cube:
/// `E = (sin(pi y) sin(pi z), sin(pi x) sin(pi z), sin(pi x) sin(pi y))`.
///
/// Divergence free with `curl curl E = 2 pi^2 E`.
pub struct CubeSolution;

impl CubeSolution {
    pub fn real_value(x: &Vec3) -> Vec3 {
        let [sx, sy, sz] = [0, 1, 2].map(|i| (PI * x[i]).sin());
        Vec3::new(sy * sz, sx * sz, sx * sy)
    }

    pub fn real_curl(x: &Vec3) -> Vec3 {
        let [sx, sy, sz] = [0, 1, 2].map(|i| (PI * x[i]).sin());
        let [cx, cy, cz] = [0, 1, 2].map(|i| (PI * x[i]).cos());
        Vec3::new(
            PI * sx * (cy - cz),
            PI * sy * (cz - cx),
            PI * sz * (cx - cy),
        )
    }
}

impl VectorField for CubeSolution {
    fn value(&self, x: &Vec3) -> CVec3 {
        complexify(&Self::real_value(x))
    }
    fn curl(&self, x: &Vec3) -> CVec3 {
        complexify(&Self::real_curl(x))
    }
}

/// Smooth trigonometric field `U_i(x) = sum_m A[m][i] sin(k_m . x + phase_m)`
/// with analytic derivatives.
#[derive(Clone, Debug)]
pub struct TrigField {
    pub amplitudes: Vec<Vec3>,
    pub wavevectors: Vec<Vec3>,
    pub phases: Vec<f64>,
}

impl TrigField {
    pub fn real_value(&self, x: &Vec3) -> Vec3 {
        self.terms()
            .map(|(a, k, p)| a * (k.dot(x) + p).sin())
            .sum()
    }

    /// `J[i][j] = d U_i / d x_j`.
    pub fn jacobian(&self, x: &Vec3) -> Mat3 {
        self.terms()
            .map(|(a, k, p)| a * k.transpose() * (k.dot(x) + p).cos())
            .sum()
    }

    fn terms(&self) -> impl Iterator<Item = (&Vec3, &Vec3, f64)> {
        self.amplitudes
            .iter()
            .zip(&self.wavevectors)
            .zip(&self.phases)
            .map(|((a, k), p)| (a, k, *p))
    }
}

impl VectorField for TrigField {
    fn value(&self, x: &Vec3) -> CVec3 {
        complexify(&self.real_value(x))
    }
    fn curl(&self, x: &Vec3) -> CVec3 {
        let j = self.jacobian(x);
        complexify(&Vec3::new(
            j[(2, 1)] - j[(1, 2)],
            j[(0, 2)] - j[(2, 0)],
            j[(1, 0)] - j[(0, 1)],
        ))
    }
}
