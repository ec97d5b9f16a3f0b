//! Covariant pull-backs and maps between a meshed domain and the exact one.
//!
//! On a cell `K = T_K(K̂)` the covariant pull-back is
//! `ψ(V) = dT_K^T (V ∘ T_K)` and its curl is `dT_K^co (curl V ∘ T_K)` with
//! `dT^co = det(dT) dT^{-1}`. The same formulas with a global map
//! `T: D_h → D` define the field isomorphism `Ψ` used to compare a discrete
//! solution on `D_h` with the exact solution on `D`.

use crate::fields::VectorField;
use crate::mesh::{adjugate, spectral_norm, GeometricMap, MapPoint, Mesh};
use crate::reference::poly::{Poly, PolyField};
use crate::reference::{quadrature, ReferenceTet};
use crate::{apply_real, CVec3, Error, Mat3, Result, Vec3};
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

/// Default core radius of the radial map.
pub const DEFAULT_CORE_RADIUS: f64 = 0.5;

fn singular(det: f64, jac: &Mat3) -> bool {
    let scale = jac.norm().powi(3);
    !det.is_finite() || det.abs() <= 1e-14 * scale.max(f64::MIN_POSITIVE)
}

/// Pull-back by a single cell map.
#[derive(Clone, Debug)]
pub struct ElementPullback {
    map: GeometricMap,
}

impl ElementPullback {
    /// Fails when the Jacobian is singular at a vertex or the barycenter.
    pub fn new(map: GeometricMap) -> Result<Self> {
        let mut probes: Vec<Vec3> = (0..4).map(ReferenceTet::vertex).collect();
        probes.push(Vec3::repeat(0.25));
        for x in &probes {
            let p = map.eval(x);
            if singular(p.det, &p.jac) {
                return Err(Error::SingularJacobian {
                    cell: map.cell(),
                    det: p.det,
                });
            }
        }
        Ok(ElementPullback { map })
    }

    pub fn map(&self) -> &GeometricMap {
        &self.map
    }

    /// `ψ(V)(x̂)` and `curl ψ(V)(x̂)`.
    pub fn pull(&self, field: &dyn VectorField, xh: &Vec3) -> (CVec3, CVec3) {
        let p = self.map.eval(xh);
        (
            apply_real(&p.jac.transpose(), &field.value(&p.x)),
            apply_real(&p.cofactor(), &field.curl(&p.x)),
        )
    }

    /// Inverse action: reference value and curl at `x̂` become the physical
    /// value and curl at `T_K(x̂)`.
    pub fn push(&self, xh: &Vec3, value: &CVec3, curl: &CVec3) -> Result<(Vec3, CVec3, CVec3)> {
        let p = self.checked(xh)?;
        Ok((
            p.x,
            apply_real(&p.inverse_transpose(self.map.cell())?, value),
            apply_real(&(p.jac / p.det), curl),
        ))
    }

    fn checked(&self, xh: &Vec3) -> Result<MapPoint> {
        let p = self.map.eval(xh);
        if singular(p.det, &p.jac) {
            return Err(Error::SingularJacobian {
                cell: self.map.cell(),
                det: p.det,
            });
        }
        Ok(p)
    }

    /// The pulled-back field as a field on reference coordinates.
    pub fn pullback_field<'a>(&'a self, field: &'a dyn VectorField) -> PulledBack<'a> {
        PulledBack { pb: self, field }
    }

    /// Symbolic `ψ(V)` of a polynomial field, when its degree stays within
    /// the polynomial representation.
    pub fn pull_poly(&self, v: &PolyField) -> Option<PolyField> {
        let t = self.map.polys();
        let columns: [[Poly; 3]; 3] =
            std::array::from_fn(|j| std::array::from_fn(|i| t[i].derivative(j)));
        PolyField::transpose_apply(&columns, &v.compose(&t)?)
    }
}

/// `ψ(V)` as a [`VectorField`] on the reference tetrahedron.
pub struct PulledBack<'a> {
    pb: &'a ElementPullback,
    field: &'a dyn VectorField,
}

impl VectorField for PulledBack<'_> {
    fn value(&self, xh: &Vec3) -> CVec3 {
        self.pb.pull(self.field, xh).0
    }
    fn curl(&self, xh: &Vec3) -> CVec3 {
        self.pb.pull(self.field, xh).1
    }
}

/// Pulls `field` back to the reference cell of `pullback`.
pub fn pullback_field<'a>(pullback: &'a ElementPullback, field: &'a dyn VectorField) -> PulledBack<'a> {
    pullback.pullback_field(field)
}

/// A bi-Lipschitz map `T` of a hold-all ball onto itself, sending the
/// meshed domain onto the exact one.
pub trait DomainMap: Sync {
    fn forward(&self, x: &Vec3) -> Result<Vec3>;
    fn inverse(&self, y: &Vec3) -> Result<Vec3>;
    /// `dT(x)`.
    fn jacobian(&self, x: &Vec3) -> Result<Mat3>;

    /// `d(T^{-1})(y)`.
    fn inverse_jacobian(&self, y: &Vec3) -> Result<Mat3> {
        let x = self.inverse(y)?;
        let j = self.jacobian(&x)?;
        j.try_inverse().ok_or(Error::SingularJacobian {
            cell: usize::MAX,
            det: j.determinant(),
        })
    }
}

/// `T = I`.
#[derive(Clone, Copy, Debug, Default)]
pub struct IdentityMap;

impl DomainMap for IdentityMap {
    fn forward(&self, x: &Vec3) -> Result<Vec3> {
        Ok(*x)
    }
    fn inverse(&self, y: &Vec3) -> Result<Vec3> {
        Ok(*y)
    }
    fn jacobian(&self, _: &Vec3) -> Result<Mat3> {
        Ok(Mat3::identity())
    }
}

/// `T(x) = factor * x`.
#[derive(Clone, Copy, Debug)]
pub struct DilationMap {
    pub factor: f64,
}

impl DomainMap for DilationMap {
    fn forward(&self, x: &Vec3) -> Result<Vec3> {
        Ok(x * self.factor)
    }
    fn inverse(&self, y: &Vec3) -> Result<Vec3> {
        Ok(y / self.factor)
    }
    fn jacobian(&self, _: &Vec3) -> Result<Mat3> {
        Ok(Mat3::identity() * self.factor)
    }
}

/// Central-difference Jacobian of `f` at `x`.
pub fn fd_jacobian(f: impl Fn(&Vec3) -> Result<Vec3>, x: &Vec3, step: f64) -> Result<Mat3> {
    let mut j = Mat3::zeros();
    for k in 0..3 {
        let mut e = Vec3::zeros();
        e[k] = step;
        let col = (f(&(x + e))? - f(&(x - e))?) / (2.0 * step);
        j.set_column(k, &col);
    }
    Ok(j)
}

struct Patch {
    map: GeometricMap,
    face: usize,
    corners: [Vec3; 3],
}

impl Patch {
    fn eval(&self, s: f64, r: f64) -> (Vec3, Vec3, Vec3) {
        let [a, b, c] = ReferenceTet::FACES[self.face].map(ReferenceTet::vertex);
        let p = self.map.eval(&ReferenceTet::face_point(self.face, s, r));
        (p.x, p.jac * (b - a), p.jac * (c - a))
    }
}

#[derive(Clone, Copy, Debug)]
struct Hit {
    tau: f64,
    grad_tau: Vec3,
    seam: bool,
}

/// Directions binned on a latitude/longitude grid, each bin listing the
/// boundary patches whose angular cone may contain it.
struct DirectionGrid {
    n_theta: usize,
    n_phi: usize,
    bins: Vec<Vec<u32>>,
}

impl DirectionGrid {
    fn angles(d: &Vec3) -> (f64, f64) {
        let theta = d[2].clamp(-1.0, 1.0).acos();
        let mut phi = d[1].atan2(d[0]);
        if phi < 0.0 {
            phi += 2.0 * PI;
        }
        (theta, phi)
    }

    fn new(cones: &[(Vec3, f64)]) -> Self {
        let n_theta = ((cones.len() as f64 / 2.0).sqrt().ceil() as usize).max(4);
        let n_phi = 2 * n_theta;
        let mut bins = vec![Vec::new(); n_theta * n_phi];
        let dt = PI / n_theta as f64;
        let dp = 2.0 * PI / n_phi as f64;
        for (f, (c, r)) in cones.iter().enumerate() {
            let (tc, pc) = Self::angles(c);
            let lo = tc - r;
            let hi = tc + r;
            let t0 = (lo.max(0.0) / dt).floor() as usize;
            let t1 = ((hi.min(PI) / dt).floor() as usize).min(n_theta - 1);
            let full = lo <= 0.0 || hi >= PI || r.sin() >= tc.sin();
            let (p0, p1) = if full {
                (0, n_phi as isize - 1)
            } else {
                let w = (r.sin() / tc.sin()).asin();
                (
                    ((pc - w) / dp).floor() as isize,
                    ((pc + w) / dp).floor() as isize,
                )
            };
            for t in t0..=t1 {
                for p in p0..=p1.min(p0 + n_phi as isize - 1) {
                    let p = p.rem_euclid(n_phi as isize) as usize;
                    bins[t * n_phi + p].push(f as u32);
                }
            }
        }
        DirectionGrid { n_theta, n_phi, bins }
    }

    fn candidates(&self, d: &Vec3) -> &[u32] {
        let (t, p) = Self::angles(d);
        let ti = ((t / PI * self.n_theta as f64) as usize).min(self.n_theta - 1);
        let pi = ((p / (2.0 * PI) * self.n_phi as f64) as usize).min(self.n_phi - 1);
        &self.bins[ti * self.n_phi + pi]
    }
}

/// Radial blend for a mesh star-shaped with respect to the origin.
///
/// Along the ray through `x̂` the map fixes `[0, ρ₀ b]` and stretches
/// `[ρ₀ b, b]` linearly onto `[ρ₀ b, 1]`, where `b` is the radius at which
/// the ray leaves the meshed domain. The Jacobian is analytic inside a
/// boundary face's ray cone and taken by central differences with step
/// `1e-6 h` on rays through face seams.
pub struct RadialMap {
    rho0: f64,
    step: f64,
    patches: Vec<Patch>,
    cones: Vec<(Vec3, f64)>,
    grid: DirectionGrid,
}

const SEAM_TOL: f64 = 1e-7;
const RANGE_TOL: f64 = 1e-10;

/// Radial map of a ball mesh with the default core radius.
pub fn radial_domain_map(mesh: &Mesh) -> Result<RadialMap> {
    RadialMap::new(mesh, DEFAULT_CORE_RADIUS)
}

impl RadialMap {
    pub fn new(mesh: &Mesh, rho0: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&rho0) {
            return Err(Error::InvalidInput(format!("core radius {rho0} not in [0, 1)")));
        }
        let mut patches = Vec::new();
        for f in mesh.boundary_faces() {
            let c = mesh.face_cells(f)[0];
            let lf = mesh.local_face(c, f).expect("face incident to its cell");
            let map = mesh.element_map(c)?;
            let corners = ReferenceTet::FACES[lf].map(|v| map.point(&ReferenceTet::vertex(v)));
            patches.push(Patch { map, face: lf, corners });
        }
        if patches.is_empty() {
            return Err(Error::InvalidMesh("mesh has no boundary faces".into()));
        }
        let cones: Vec<(Vec3, f64)> = patches
            .iter()
            .map(|p| {
                let dirs: Vec<Vec3> = face_lattice(4)
                    .iter()
                    .map(|&(s, r)| p.eval(s, r).0.normalize())
                    .collect();
                let c = dirs.iter().sum::<Vec3>().normalize();
                let r = dirs
                    .iter()
                    .map(|d| d.dot(&c).clamp(-1.0, 1.0).acos())
                    .fold(0.0, f64::max);
                (c, 1.25 * r + 1e-6)
            })
            .collect();
        let grid = DirectionGrid::new(&cones);
        let map = RadialMap {
            rho0,
            step: 1e-6 * mesh.h(),
            patches,
            cones,
            grid,
        };
        // Every boundary sample must be reached by exactly the ray through it.
        let bad = (0..map.patches.len()).into_par_iter().find_map_first(|i| {
            face_lattice(3).into_iter().find_map(|(s, r)| {
                let x = map.patches[i].eval(s, r).0;
                match map.cast(&x) {
                    Ok(hit) if (hit.tau - 1.0).abs() < 1e-8 => None,
                    _ => Some(x),
                }
            })
        });
        if let Some(x) = bad {
            return Err(Error::RayIntersection(x[0], x[1], x[2]));
        }
        Ok(map)
    }

    pub fn core_radius(&self) -> f64 {
        self.rho0
    }

    fn intersect(&self, i: usize, x: &Vec3) -> Option<Hit> {
        let p = &self.patches[i];
        let [a, b, c] = p.corners;
        let flat = Mat3::from_columns(&[b - a, c - a, -x]);
        let mut u = flat.try_inverse()? * (-a);
        if u[0] < -0.1 || u[1] < -0.1 || u[0] + u[1] > 1.1 || u[2] <= 0.0 {
            return None;
        }
        for _ in 0..40 {
            let (xp, xs, xr) = p.eval(u[0], u[1]);
            let m = Mat3::from_columns(&[xs, xr, -x]);
            let g = xp - x * u[2];
            let du = m.try_inverse()? * g;
            u -= du;
            if du.norm() <= 1e-15 * (1.0 + u.norm()) {
                break;
            }
            if p.map.is_affine() {
                break;
            }
        }
        let (xp, xs, xr) = p.eval(u[0], u[1]);
        let m = Mat3::from_columns(&[xs, xr, -x]);
        if (xp - x * u[2]).norm() > 1e-12 * xp.norm() {
            return None;
        }
        let (s, r, tau) = (u[0], u[1], u[2]);
        let w = 1.0 - s - r;
        if s < -RANGE_TOL || r < -RANGE_TOL || w < -RANGE_TOL || tau <= 0.0 {
            return None;
        }
        let inv = m.try_inverse()?;
        Some(Hit {
            tau,
            grad_tau: inv.row(2).transpose() * tau,
            seam: s.min(r).min(w) < SEAM_TOL,
        })
    }

    /// Intersection of the ray through `x` with the boundary, as the scale
    /// factor `tau` with `tau x` on the boundary.
    fn cast(&self, x: &Vec3) -> Result<Hit> {
        let d = x.normalize();
        for &i in self.grid.candidates(&d) {
            let (c, r) = self.cones[i as usize];
            if d.dot(&c) < r.min(PI).cos() - 1e-12 {
                continue;
            }
            if let Some(h) = self.intersect(i as usize, x) {
                return Ok(h);
            }
        }
        (0..self.patches.len())
            .find_map(|i| self.intersect(i, x))
            .ok_or(Error::RayIntersection(x[0], x[1], x[2]))
    }

    /// Exit radius of the meshed domain along the ray through `x`.
    pub fn exit_radius(&self, x: &Vec3) -> Result<f64> {
        Ok(self.cast(x)?.tau * x.norm())
    }

    fn gain(&self, b: f64) -> f64 {
        (1.0 - self.rho0 * b) / (b * (1.0 - self.rho0))
    }
}

impl DomainMap for RadialMap {
    fn forward(&self, x: &Vec3) -> Result<Vec3> {
        let rho = x.norm();
        if rho == 0.0 {
            return Ok(*x);
        }
        let b = self.cast(x)?.tau * rho;
        let core = self.rho0 * b;
        if rho <= core {
            return Ok(*x);
        }
        let big_r = core + (rho - core) * self.gain(b);
        Ok(x * (big_r / rho))
    }

    fn inverse(&self, y: &Vec3) -> Result<Vec3> {
        let rho = y.norm();
        if rho == 0.0 {
            return Ok(*y);
        }
        let b = self.cast(y)?.tau * rho;
        let core = self.rho0 * b;
        if rho <= core {
            return Ok(*y);
        }
        let r = core + (rho - core) / self.gain(b);
        Ok(y * (r / rho))
    }

    fn jacobian(&self, x: &Vec3) -> Result<Mat3> {
        let rho = x.norm();
        if rho == 0.0 {
            return Ok(Mat3::identity());
        }
        let hit = self.cast(x)?;
        let b = hit.tau * rho;
        let core = self.rho0 * b;
        if rho <= core {
            return Ok(Mat3::identity());
        }
        if hit.seam {
            return fd_jacobian(|p| self.forward(p), x, self.step);
        }
        let d = x / rho;
        let grad_b = hit.grad_tau * rho + d * hit.tau;
        let g = self.gain(b);
        let dg = -1.0 / (b * b * (1.0 - self.rho0));
        let big_r = core + (rho - core) * g;
        let dr_drho = g;
        let dr_db = self.rho0 - self.rho0 * g + (rho - core) * dg;
        let grad_r = d * dr_drho + grad_b * dr_db;
        let proj = Mat3::identity() - d * d.transpose();
        Ok(d * grad_r.transpose() + proj * (big_r / rho))
    }
}

/// Lattice `(s, t)` points with spacing `1/n` on the reference triangle.
pub fn face_lattice(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for i in 0..=n {
        for j in 0..=n - i {
            out.push((i as f64 / n as f64, j as f64 / n as f64));
        }
    }
    out
}

/// Points of `D_h` used to estimate sup norms: the points of a degree-4 rule
/// in every cell followed by a level-4 lattice on every boundary face.
pub fn domain_samples(mesh: &Mesh) -> Result<Vec<Vec3>> {
    let rule = quadrature(4)?;
    let ref_pts: Vec<Vec3> = (0..rule.len()).map(|i| rule.point(i)).collect();
    let lattice = face_lattice(4);
    let mut out: Vec<Vec3> = (0..mesh.num_cells())
        .into_par_iter()
        .flat_map_iter(|c| {
            let map = mesh.map_unchecked(c);
            ref_pts.iter().map(move |x| map.point(x))
        })
        .collect();
    let boundary: Vec<usize> = mesh.boundary_faces().collect();
    out.par_extend(boundary.par_iter().flat_map_iter(|&f| {
        let c = mesh.face_cells(f)[0];
        let lf = mesh.local_face(c, f).unwrap();
        let map = mesh.map_unchecked(c);
        lattice
            .iter()
            .map(move |&(s, t)| map.point(&ReferenceTet::face_point(lf, s, t)))
    }));
    Ok(out)
}

/// Sampled discrepancies of a domain map.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Discrepancy {
    /// `sup |T - I| + sup |T^{-1} - I|`.
    pub d0: f64,
    /// `d0 + sup |dT - I| + sup |d(T^{-1}) - I|`.
    pub d1: f64,
    /// `sup |T - I|`.
    pub forward_sup: f64,
    /// Bound on `|dT|`, `|dT^co|`, `|det dT|` and their counterparts for
    /// `T^{-1}`, together with the reciprocals of the determinants.
    pub theta: f64,
    /// `max(sup det dT, 1 / inf det dT)`.
    pub theta_det: f64,
    pub samples: usize,
}

#[derive(Clone, Copy)]
struct DiscAcc {
    fwd: f64,
    inv: f64,
    djac: f64,
    dinv: f64,
    theta: f64,
    max_det: f64,
    min_det: f64,
}

impl DiscAcc {
    const EMPTY: DiscAcc = DiscAcc {
        fwd: 0.0,
        inv: 0.0,
        djac: 0.0,
        dinv: 0.0,
        theta: 1.0,
        max_det: 0.0,
        min_det: f64::INFINITY,
    };

    fn merge(self, o: DiscAcc) -> DiscAcc {
        DiscAcc {
            fwd: self.fwd.max(o.fwd),
            inv: self.inv.max(o.inv),
            djac: self.djac.max(o.djac),
            dinv: self.dinv.max(o.dinv),
            theta: self.theta.max(o.theta),
            max_det: self.max_det.max(o.max_det),
            min_det: self.min_det.min(o.min_det),
        }
    }
}

/// Estimates `d0`, `d1` and `θ` of `map` over `samples` of `D_h`.
pub fn discrepancies(map: &dyn DomainMap, samples: &[Vec3]) -> Result<Discrepancy> {
    let acc = samples
        .par_iter()
        .map(|x| -> Result<DiscAcc> {
            let y = map.forward(x)?;
            let back = map.inverse(&y)?;
            let j = map.jacobian(x)?;
            let ji = map.inverse_jacobian(&y)?;
            let det = j.determinant();
            let deti = ji.determinant();
            let theta = [
                spectral_norm(&j),
                spectral_norm(&adjugate(&j)),
                det,
                1.0 / det,
                spectral_norm(&ji),
                spectral_norm(&adjugate(&ji)),
                deti,
                1.0 / deti,
            ]
            .into_iter()
            .fold(1.0, f64::max);
            Ok(DiscAcc {
                fwd: (y - x).norm(),
                inv: (back - y).norm(),
                djac: spectral_norm(&(j - Mat3::identity())),
                dinv: spectral_norm(&(ji - Mat3::identity())),
                theta,
                max_det: det,
                min_det: det,
            })
        })
        .try_fold(|| DiscAcc::EMPTY, |a, b| b.map(|b| a.merge(b)))
        .try_reduce(|| DiscAcc::EMPTY, |a, b| Ok(a.merge(b)))?;
    let d0 = acc.fwd + acc.inv;
    Ok(Discrepancy {
        d0,
        d1: d0 + acc.djac + acc.dinv,
        forward_sup: acc.fwd,
        theta: acc.theta,
        theta_det: acc.max_det.max(1.0 / acc.min_det),
        samples: samples.len(),
    })
}

/// Estimate of the Hausdorff distance between the complements of `D_h` and
/// the unit ball: the largest `|1 - |x||` over a level-8 lattice on every
/// boundary face.
pub fn hausdorff_estimate(mesh: &Mesh) -> f64 {
    let lattice = face_lattice(8);
    let faces: Vec<usize> = mesh.boundary_faces().collect();
    faces
        .par_iter()
        .map(|&f| {
            let c = mesh.face_cells(f)[0];
            let lf = mesh.local_face(c, f).unwrap();
            let map = mesh.map_unchecked(c);
            lattice
                .iter()
                .map(|&(s, t)| (1.0 - map.point(&ReferenceTet::face_point(lf, s, t)).norm()).abs())
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

/// `Ψ(U)(x) = dT(x)^T U(T x)` and its curl `dT(x)^co curl U(T x)`.
pub fn pullback_solution(
    map: &dyn DomainMap,
    field: &dyn VectorField,
    x: &Vec3,
) -> Result<(CVec3, CVec3)> {
    let y = map.forward(x)?;
    let j = map.jacobian(x)?;
    let det = j.determinant();
    if singular(det, &j) {
        return Err(Error::SingularJacobian { cell: usize::MAX, det });
    }
    Ok((
        apply_real(&j.transpose(), &field.value(&y)),
        apply_real(&adjugate(&j), &field.curl(&y)),
    ))
}

/// `Ψ^{-1}(V)(y) = d(T^{-1})(y)^T V(T^{-1} y)` and its curl.
pub fn pushforward_solution(
    map: &dyn DomainMap,
    field: &dyn VectorField,
    y: &Vec3,
) -> Result<(CVec3, CVec3)> {
    let x = map.inverse(y)?;
    let j = map.inverse_jacobian(y)?;
    let det = j.determinant();
    if singular(det, &j) {
        return Err(Error::SingularJacobian { cell: usize::MAX, det });
    }
    Ok((
        apply_real(&j.transpose(), &field.value(&x)),
        apply_real(&adjugate(&j), &field.curl(&x)),
    ))
}

/// Real vector field with an analytic Jacobian.
pub trait SmoothField: Sync {
    fn eval(&self, x: &Vec3) -> Vec3;
    /// `J[i][j] = d U_i / d x_j`.
    fn gradient(&self, x: &Vec3) -> Mat3;
}

impl SmoothField for crate::fields::TrigField {
    fn eval(&self, x: &Vec3) -> Vec3 {
        self.real_value(x)
    }
    fn gradient(&self, x: &Vec3) -> Mat3 {
        self.jacobian(x)
    }
}

/// Two sides of a sampled inequality `lhs <= rhs`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Inequality {
    pub lhs: f64,
    pub rhs: f64,
}

impl Inequality {
    /// `lhs <= (1 + slack) rhs`.
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs <= (1.0 + slack) * self.rhs
    }
}

/// Points of a cubic grid with spacing `step` inside the ball of radius
/// `radius`.
pub fn ball_grid(radius: f64, step: f64) -> Vec<Vec3> {
    let n = (radius / step).ceil() as i64;
    let mut out = Vec::new();
    for i in -n..=n {
        for j in -n..=n {
            for k in -n..=n {
                let p = Vec3::new(i as f64, j as f64, k as f64) * step;
                if p.norm() <= radius {
                    out.push(p);
                }
            }
        }
    }
    out
}

/// `sup |U o T - U|` over `samples` against `sup |T - I| |U|_{W^{1,inf}}`,
/// with the Sobolev norm `sup |U| + sup |dU|` taken over `grid`.
pub fn transport_linf(
    map: &dyn DomainMap,
    u: &dyn SmoothField,
    samples: &[Vec3],
    grid: &[Vec3],
) -> Result<Inequality> {
    let (lhs, shift) = samples
        .par_iter()
        .map(|x| -> Result<(f64, f64)> {
            let y = map.forward(x)?;
            Ok(((u.eval(&y) - u.eval(x)).norm(), (y - x).norm()))
        })
        .try_reduce(|| (0.0, 0.0), |a, b| Ok((a.0.max(b.0), a.1.max(b.1))))?;
    let (sup_u, sup_du) = grid
        .par_iter()
        .map(|x| (u.eval(x).norm(), spectral_norm(&u.gradient(x))))
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    Ok(Inequality {
        lhs,
        rhs: shift * (sup_u + sup_du),
    })
}

/// `|U o T - U|_{L2(D_h)}` against `(θ^{1/2} + 1) sup|T - I| |U|_{H1(D)}`.
///
/// Integrals use a rule of the given exactness on every cell; the norm over
/// `D` is computed on `D_h` through the change of variables `y = T x`.
pub fn transport_l2(
    map: &dyn DomainMap,
    mesh: &Mesh,
    u: &dyn SmoothField,
    theta: f64,
    exactness: usize,
) -> Result<Inequality> {
    let rule = quadrature(exactness)?;
    let parts: Vec<[f64; 3]> = (0..mesh.num_cells())
        .into_par_iter()
        .map(|c| -> Result<[f64; 3]> {
            let cm = mesh.map_unchecked(c);
            let mut acc = [0.0; 3];
            for (i, w) in rule.weights().iter().enumerate() {
                let p = cm.eval(&rule.point(i));
                let y = map.forward(&p.x)?;
                let dety = map.jacobian(&p.x)?.determinant();
                let diff = (u.eval(&y) - u.eval(&p.x)).norm_squared();
                let h1 = u.eval(&y).norm_squared() + u.gradient(&y).norm_squared();
                acc[0] += w * p.det * diff;
                acc[1] += w * p.det * h1 * dety;
                acc[2] = acc[2].max((y - p.x).norm());
            }
            Ok(acc)
        })
        .collect::<Result<_>>()?;
    let (mut diff, mut h1, mut shift) = (0.0, 0.0, 0.0f64);
    for p in &parts {
        diff += p[0];
        h1 += p[1];
        shift = shift.max(p[2]);
    }
    Ok(Inequality {
        lhs: diff.sqrt(),
        rhs: (theta.sqrt() + 1.0) * shift * h1.sqrt(),
    })
}
