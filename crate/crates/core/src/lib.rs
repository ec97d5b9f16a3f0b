//! Curl-conforming (Nedelec) finite elements for the time-harmonic Maxwell
//! cavity problem on straight and isoparametric curved tetrahedral meshes,
//! together with the machinery needed to measure how the approximation of a
//! curved domain affects convergence rates.
//!
//! The crate is organised bottom-up:
//!
//! * [`reference`]: reference tetrahedron, Nedelec bases, geometric shape
//!   functions and certified simplex quadrature.
//! * [`mesh`]: ball/cube generators, Gmsh I/O, element maps and quality checks.
//! * [`transforms`]: covariant pull-backs and global domain maps.
//! * [`interpolation`]: discrete spaces, canonical interpolation.
//! * [`assembly`], [`solver`]: linear system construction and solution.
//! * [`analysis`], [`study`]: error norms, convergence orders and reports.

pub mod analysis;
pub mod assembly;
pub mod error;
pub mod fields;
pub mod interpolation;
pub mod mesh;
pub mod reference;
pub mod solver;
pub mod study;
pub mod transforms;

pub use error::{Error, Result};

/// Complex scalar used for fields and linear systems.
pub type C64 = num_complex::Complex64;
/// Real 3-vector, also used for points.
pub type Vec3 = nalgebra::Vector3<f64>;
/// Complex 3-vector.
pub type CVec3 = nalgebra::Vector3<C64>;
/// Real 3x3 matrix.
pub type Mat3 = nalgebra::Matrix3<f64>;
/// Complex 3x3 matrix.
pub type CMat3 = nalgebra::Matrix3<C64>;

/// Promote a real vector to a complex one.
#[inline]
pub fn complexify(v: &Vec3) -> CVec3 {
    v.map(|x| C64::new(x, 0.0))
}

/// Real matrix times complex vector.
#[inline]
pub fn apply_real(m: &Mat3, v: &CVec3) -> CVec3 {
    let re = m * v.map(|z| z.re);
    let im = m * v.map(|z| z.im);
    CVec3::new(
        C64::new(re[0], im[0]),
        C64::new(re[1], im[1]),
        C64::new(re[2], im[2]),
    )
}
