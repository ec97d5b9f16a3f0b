//! Galerkin matrices and load vectors of the cavity problem, with
//! perfect-conductor elimination.
//!
//! Entries are computed on the reference tetrahedron through
//!
//! * curl term: `(dT ĉurl φ̂_j)^T μ⁻¹(T x̂) (dT ĉurl φ̂_i) / det dT`,
//! * mass term: `(dT^{-T} φ̂_j)^T ε(T x̂) (dT^{-T} φ̂_i) det dT`,
//! * load: `-iω J(T x̂) . (dT^{-T} φ̂_i) det dT`,
//!
//! each with its own quadrature rule.

mod dofmap;
mod materials;
mod matrix_market;
mod sparse;

pub use dofmap::{CellOrientation, DofMap};
pub use materials::{Formulation, MaterialCoefficients, PRESETS};
pub use matrix_market::{write_matrix_market, write_vector_market};
pub use sparse::CsrMatrix;

use crate::interpolation::FeSpace;
use crate::reference::{quadrature, NedelecBasis};
use crate::{apply_real, complexify, CVec3, Error, Result, Vec3, C64};
use rayon::prelude::*;
use serde::Serialize;

/// Exactness of the three element rules.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct QuadratureDegrees {
    /// Curl-curl term.
    pub q1: usize,
    /// Mass term.
    pub q2: usize,
    /// Load.
    pub q3: usize,
}

impl QuadratureDegrees {
    /// Degrees needed for rate `s`: `2k + s - 3` for the curl term and
    /// `3k + s - 3` for the mass term and load.
    pub fn thresholds(k: usize, s: usize) -> (usize, usize) {
        ((2 * k + s).saturating_sub(3), (3 * k + s).saturating_sub(3))
    }

    /// Thresholds raised to cover the Jacobian factors of order-`geo_order`
    /// cells: `q1 = max(2k+s-3, 2(geo_order-1)+2k)` and
    /// `q2 = q3 = max(3k+s-3, 3 geo_order)`.
    pub fn defaults(k: usize, geo_order: usize, s: usize) -> Self {
        let (t1, t2) = Self::thresholds(k, s);
        let q1 = t1.max(2 * (geo_order.max(1) - 1) + 2 * k);
        let q2 = t2.max(3 * geo_order);
        QuadratureDegrees { q1, q2, q3: q2 }
    }

    /// Messages for degrees below the thresholds of rate `s`.
    pub fn warnings(&self, k: usize, s: usize) -> Vec<String> {
        let (t1, t2) = Self::thresholds(k, s);
        let mut out = Vec::new();
        for (name, q, t) in [("q1", self.q1, t1), ("q2", self.q2, t2), ("q3", self.q3, t2)] {
            if q < t {
                out.push(format!("{name} = {q} is below {t} needed for rate {s} with k = {k}"));
            }
        }
        out
    }
}

/// Linear system on all DOFs, before boundary elimination.
#[derive(Clone, Debug)]
pub struct AssembledSystem {
    /// `A_ij = Φ_h(φ_j, φ_i)`.
    pub matrix: CsrMatrix,
    /// `b_i = F_h(φ_i)`.
    pub rhs: Vec<C64>,
    pub boundary: Vec<bool>,
    pub degrees: QuadratureDegrees,
    pub warnings: Vec<String>,
}

/// System restricted to interior DOFs.
#[derive(Clone, Debug)]
pub struct ReducedSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<C64>,
    /// Full index of each reduced unknown.
    pub interior: Vec<usize>,
    pub full_dim: usize,
}

impl ReducedSystem {
    /// Full coefficient vector with zeros on boundary DOFs.
    pub fn embed(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.full_dim];
        for (&i, &v) in self.interior.iter().zip(x) {
            out[i] = v;
        }
        out
    }
}

struct Tabulation {
    weights: Vec<f64>,
    points: Vec<Vec3>,
    values: Vec<Vec<Vec3>>,
    curls: Vec<Vec<Vec3>>,
}

impl Tabulation {
    fn new(basis: &NedelecBasis, degree: usize) -> Result<Self> {
        let rule = quadrature(degree)?;
        let points: Vec<Vec3> = (0..rule.len()).map(|i| rule.point(i)).collect();
        let (values, curls) = points.iter().map(|x| basis.eval_unchecked(x)).unzip();
        Ok(Tabulation {
            weights: rule.weights().to_vec(),
            points,
            values,
            curls,
        })
    }
}

/// Sparsity pattern: DOFs coupled through a common cell.
fn pattern(dofs: &DofMap) -> Vec<Vec<usize>> {
    let n = dofs.ndofs();
    let mut count = vec![0usize; n + 1];
    for c in 0..dofs.num_cells() {
        for &g in dofs.cell_dofs(c) {
            count[g + 1] += 1;
        }
    }
    for i in 0..n {
        count[i + 1] += count[i];
    }
    let mut cells = vec![0usize; count[n]];
    let mut fill = count.clone();
    for c in 0..dofs.num_cells() {
        for &g in dofs.cell_dofs(c) {
            cells[fill[g]] = c;
            fill[g] += 1;
        }
    }
    (0..n)
        .into_par_iter()
        .map(|g| {
            let mut row: Vec<usize> = cells[count[g]..count[g + 1]]
                .iter()
                .flat_map(|&c| dofs.cell_dofs(c).iter().copied())
                .collect();
            row.sort_unstable();
            row.dedup();
            row
        })
        .collect()
}

const CHUNK: usize = 2048;

/// Assembles the full system on `space` with element rules of exactness
/// `degrees`. Degrees below the thresholds for rate `s = k` are recorded in
/// [`AssembledSystem::warnings`].
pub fn assemble(
    space: &FeSpace,
    materials: &MaterialCoefficients,
    degrees: QuadratureDegrees,
) -> Result<AssembledSystem> {
    let mesh = space.mesh();
    let dofs = space.dofs();
    let basis = space.basis();
    let n = dofs.local_dim();
    let curl_tab = Tabulation::new(basis, degrees.q1)?;
    let mass_tab = Tabulation::new(basis, degrees.q2)?;
    let load_tab = Tabulation::new(basis, degrees.q3)?;
    let mass_factor = C64::from(materials.mass_factor());
    let mut matrix = CsrMatrix::from_pattern(pattern(dofs));
    let mut rhs = vec![C64::new(0.0, 0.0); dofs.ndofs()];

    let element = |c: usize| -> Result<(Vec<C64>, Vec<C64>)> {
        let map = mesh.map_unchecked(c);
        let mut a = vec![C64::new(0.0, 0.0); n * n];
        let mut b = vec![C64::new(0.0, 0.0); n];
        let mut phys = vec![CVec3::zeros(); n];
        let mut weighted = vec![CVec3::zeros(); n];
        let checked = |x: &Vec3| {
            let p = map.eval(x);
            if p.det > 0.0 {
                Ok(p)
            } else {
                Err(Error::NonPositiveJacobian { cell: c, det: p.det })
            }
        };
        for (q, x) in curl_tab.points.iter().enumerate() {
            let p = checked(x)?;
            let m = (materials.mu_inv)(&p.x) * C64::from(curl_tab.weights[q] * p.det);
            let scale = p.jac / p.det;
            for i in 0..n {
                phys[i] = complexify(&(scale * curl_tab.curls[q][i]));
                weighted[i] = m * phys[i];
            }
            for i in 0..n {
                for j in 0..n {
                    a[i * n + j] += weighted[j].dot(&phys[i]);
                }
            }
        }
        for (q, x) in mass_tab.points.iter().enumerate() {
            let p = checked(x)?;
            let m = (materials.eps)(&p.x) * (mass_factor * (mass_tab.weights[q] * p.det));
            let g = p.inverse_transpose(c)?;
            for i in 0..n {
                phys[i] = complexify(&(g * mass_tab.values[q][i]));
                weighted[i] = m * phys[i];
            }
            for i in 0..n {
                for j in 0..n {
                    a[i * n + j] += weighted[j].dot(&phys[i]);
                }
            }
        }
        for (q, x) in load_tab.points.iter().enumerate() {
            let p = checked(x)?;
            let f = materials.load(&p.x) * C64::from(load_tab.weights[q] * p.det);
            let g = p.inverse_transpose(c)?;
            for i in 0..n {
                b[i] += apply_real(&g, &complexify(&load_tab.values[q][i])).dot(&f);
            }
        }
        Ok((dofs.matrix_to_slots(c, &a), dofs.vector_to_slots(c, &b)))
    };

    for start in (0..mesh.num_cells()).step_by(CHUNK) {
        let end = (start + CHUNK).min(mesh.num_cells());
        let blocks: Vec<(Vec<C64>, Vec<C64>)> =
            (start..end).into_par_iter().map(element).collect::<Result<_>>()?;
        for (c, (a, b)) in (start..end).zip(blocks) {
            let slots = dofs.cell_dofs(c);
            for (m, &row) in slots.iter().enumerate() {
                rhs[row] += b[m];
                let range = matrix.row_range(row);
                for (k, &col) in slots.iter().enumerate() {
                    let pos = range.start
                        + matrix.cols()[range.clone()]
                            .binary_search(&col)
                            .expect("pattern covers cell couplings");
                    matrix.values_mut()[pos] += a[m * n + k];
                }
            }
        }
    }

    let k = space.degree();
    Ok(AssembledSystem {
        matrix,
        rhs,
        boundary: dofs.boundary().to_vec(),
        degrees,
        warnings: degrees.warnings(k, k),
    })
}

/// Removes boundary rows and columns (zero tangential trace).
pub fn apply_pec(system: &AssembledSystem) -> Result<ReducedSystem> {
    let interior: Vec<usize> = (0..system.boundary.len())
        .filter(|&i| !system.boundary[i])
        .collect();
    if interior.is_empty() {
        return Err(Error::EmptyInteriorSystem);
    }
    Ok(ReducedSystem {
        matrix: system.matrix.submatrix(&interior),
        rhs: interior.iter().map(|&i| system.rhs[i]).collect(),
        interior,
        full_dim: system.boundary.len(),
    })
}
