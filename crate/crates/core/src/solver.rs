//! Solution of the reduced sparse complex systems.
//!
//! The direct path uses a sparse Cholesky factorisation when the matrix is
//! real, symmetric and positive definite, and a sparse LU factorisation
//! otherwise, both with fill-reducing orderings. The iterative path is BiCGStab with Jacobi preconditioning,
//! since the curl-curl minus mass operator is indefinite.

use crate::assembly::{CsrMatrix, ReducedSystem};
use crate::{Error, Result, C64};
use faer::linalg::solvers::Solve;
use faer::sparse::{SparseColMat, Triplet};
use faer::Side;
use serde::{Deserialize, Serialize};

/// Default relative residual tolerance.
pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverMethod {
    Direct,
    Iterative,
}

#[derive(Clone, Copy, Debug)]
pub struct SolveOptions {
    pub method: SolverMethod,
    pub tol: f64,
    /// Iteration cap of the iterative path; `None` means `max(1000, 10 n)`.
    pub max_iterations: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            method: SolverMethod::Direct,
            tol: DEFAULT_TOL,
            max_iterations: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub method: SolverMethod,
    /// `|Ax - b| / |b|`, recomputed from the returned solution.
    pub relative_residual: f64,
    pub iterations: Option<usize>,
    /// Factorisation used by the direct path.
    pub factorization: Option<Factorization>,
    /// Nonzeros of the factorised matrix.
    pub matrix_nnz: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Factorization {
    Cholesky,
    Lu,
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `|Ax - b| / |b|` (absolute residual when `b = 0`).
pub fn relative_residual(a: &CsrMatrix, x: &[C64], b: &[C64]) -> f64 {
    let ax = a.matvec(x);
    let r: Vec<C64> = ax.iter().zip(b).map(|(p, q)| p - q).collect();
    let nb = norm(b);
    if nb > 0.0 {
        norm(&r) / nb
    } else {
        norm(&r)
    }
}

/// Solves `A x = b`.
pub fn solve(a: &CsrMatrix, b: &[C64], opts: &SolveOptions) -> Result<(Vec<C64>, SolveReport)> {
    if a.dim() == 0 {
        return Err(Error::EmptyInteriorSystem);
    }
    if b.len() != a.dim() {
        return Err(Error::InvalidInput(format!(
            "right-hand side has {} entries for a {}x{} matrix",
            b.len(),
            a.dim(),
            a.dim()
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(Error::InvalidInput(format!("tolerance must be positive, got {}", opts.tol)));
    }
    let (x, iterations, factorization) = match opts.method {
        SolverMethod::Direct => {
            let (x, f) = direct(a, b)?;
            (x, None, Some(f))
        }
        SolverMethod::Iterative => {
            let cap = opts.max_iterations.unwrap_or((10 * a.dim()).max(1000));
            let (x, it) = bicgstab(a, b, opts.tol, cap)?;
            (x, Some(it), None)
        }
    };
    let residual = relative_residual(a, &x, b);
    if !(residual <= opts.tol) {
        return Err(Error::ResidualTooLarge {
            residual,
            tol: opts.tol,
        });
    }
    Ok((
        x,
        SolveReport {
            method: opts.method,
            relative_residual: residual,
            iterations,
            factorization,
            matrix_nnz: (opts.method == SolverMethod::Direct).then_some(a.nnz()),
        },
    ))
}

/// Solves a reduced system and re-embeds the solution with zero boundary
/// values.
pub fn solve_system(system: &ReducedSystem, opts: &SolveOptions) -> Result<(Vec<C64>, SolveReport)> {
    let (x, report) = solve(&system.matrix, &system.rhs, opts)?;
    Ok((system.embed(&x), report))
}

fn direct(a: &CsrMatrix, b: &[C64]) -> Result<(Vec<C64>, Factorization)> {
    let scale = a.max_abs();
    if a.max_imag() == 0.0 && a.max_asymmetry() <= 1e-13 * scale {
        if let Some(x) = cholesky(a, b)? {
            return Ok((x, Factorization::Cholesky));
        }
    }
    Ok((lu(a, b)?, Factorization::Lu))
}

/// Real symmetric solve from the lower triangle; `None` when the matrix is
/// not positive definite.
fn cholesky(a: &CsrMatrix, b: &[C64]) -> Result<Option<Vec<C64>>> {
    let n = a.dim();
    let triplets: Vec<Triplet<usize, usize, f64>> = a
        .triplets()
        .into_iter()
        .filter(|(r, c, _)| r >= c)
        .map(|(r, c, v)| Triplet::new(r, c, v.re))
        .collect();
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::Factorization(format!("{e:?}")))?;
    let llt = match mat.sp_cholesky(Side::Lower) {
        Ok(f) => f,
        Err(faer::sparse::linalg::LltError::Numeric(_)) => return Ok(None),
        Err(e) => return Err(Error::Factorization(format!("{e:?}"))),
    };
    let rhs = faer::Mat::<f64>::from_fn(n, 2, |i, j| if j == 0 { b[i].re } else { b[i].im });
    let x = llt.solve(&rhs);
    let out: Vec<C64> = (0..n).map(|i| C64::new(x[(i, 0)], x[(i, 1)])).collect();
    Ok(out.iter().all(|z| z.re.is_finite() && z.im.is_finite()).then_some(out))
}

fn lu(a: &CsrMatrix, b: &[C64]) -> Result<Vec<C64>> {
    let n = a.dim();
    let triplets: Vec<Triplet<usize, usize, faer::c64>> = a
        .triplets()
        .into_iter()
        .map(|(r, c, v)| Triplet::new(r, c, v))
        .collect();
    let mat = SparseColMat::<usize, faer::c64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::Factorization(format!("{e:?}")))?;
    let lu = mat.sp_lu().map_err(|e| match e {
        faer::sparse::linalg::LuError::SymbolicSingular { index } => {
            Error::Factorization(format!("structurally singular: no pivot at step {index}"))
        }
        other => Error::Factorization(format!("{other:?}")),
    })?;
    let rhs = faer::Mat::<faer::c64>::from_fn(n, 1, |i, _| b[i]);
    let x = lu.solve(&rhs);
    let out: Vec<C64> = (0..n).map(|i| x[(i, 0)]).collect();
    if let Some(i) = out.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Factorization(format!(
            "numerically singular: non-finite solution entry {i}"
        )));
    }
    Ok(out)
}

fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).fold(C64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y)
}

/// Jacobi-preconditioned BiCGStab; returns the iterate and iteration count.
fn bicgstab(a: &CsrMatrix, b: &[C64], tol: f64, cap: usize) -> Result<(Vec<C64>, usize)> {
    let n = a.dim();
    let zero = C64::new(0.0, 0.0);
    let inv_diag: Vec<C64> = a
        .diagonal()
        .iter()
        .map(|d| if d.norm() > 0.0 { 1.0 / d } else { C64::new(1.0, 0.0) })
        .collect();
    let precond = |v: &[C64]| -> Vec<C64> { v.iter().zip(&inv_diag).map(|(x, d)| x * d).collect() };
    let nb = norm(b).max(f64::MIN_POSITIVE);
    let mut x = vec![zero; n];
    let mut r = b.to_vec();
    let mut r_hat = r.clone();
    let mut p = vec![zero; n];
    let mut v = vec![zero; n];
    let (mut rho, mut alpha, mut omega) = (C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(1.0, 0.0));
    let mut history = Vec::new();
    for it in 1..=cap {
        let rho_new = dot(&r_hat, &r);
        if rho_new.norm() < 1e-300 {
            // Breakdown: restart the shadow residual.
            r_hat = r.clone();
            p.fill(zero);
            v.fill(zero);
            rho = C64::new(1.0, 0.0);
            alpha = rho;
            omega = rho;
            continue;
        }
        let beta = (rho_new / rho) * (alpha / omega);
        rho = rho_new;
        for i in 0..n {
            p[i] = r[i] + beta * (p[i] - omega * v[i]);
        }
        let y = precond(&p);
        v = a.matvec(&y);
        alpha = rho / dot(&r_hat, &v);
        let s: Vec<C64> = r.iter().zip(&v).map(|(ri, vi)| ri - alpha * vi).collect();
        let z = precond(&s);
        let t = a.matvec(&z);
        let tt = dot(&t, &t);
        omega = if tt.norm() > 0.0 { dot(&t, &s) / tt } else { zero };
        for i in 0..n {
            x[i] += alpha * y[i] + omega * z[i];
            r[i] = s[i] - omega * t[i];
        }
        let rel = norm(&r) / nb;
        history.push(rel);
        if rel <= 0.5 * tol {
            // Guard against drift between the recursive and true residuals.
            if relative_residual(a, &x, b) <= tol {
                return Ok((x, it));
            }
            r = b.iter().zip(a.matvec(&x)).map(|(bi, ax)| bi - ax).collect();
        }
        if !rel.is_finite() {
            break;
        }
    }
    let last = history.last().copied().unwrap_or(f64::NAN);
    Err(Error::NotConverged {
        iterations: history.len(),
        last,
        history,
    })
}
