//! C interface to curlfem.
//!
//! Every fallible function returns a [`CurlfemStatus`]. On failure the
//! message is available from [`curlfem_last_error`] on the same thread.
//! Handles are opaque and must be released with their `_free` function.

use curlfem::analysis::ReportRow;
use curlfem::mesh::{generate_ball_mesh, generate_cube_mesh, read_gmsh, Mesh};
use curlfem::study::{run_study, StudyConfig, StudyOutcome};
use curlfem::Error;
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurlfemStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Unsupported = 3,
    Mesh = 4,
    Solver = 5,
    Io = 6,
    NotAvailable = 7,
    Internal = 8,
    Panic = 9,
}

/// Columns of a convergence report.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CurlfemColumn {
    L2Error = 0,
    HcurlError = 1,
    PullbackError = 2,
    D0 = 3,
    D1 = 4,
    Hausdorff = 5,
}

impl CurlfemColumn {
    fn from_raw(v: u32) -> Option<Self> {
        use CurlfemColumn::*;
        [L2Error, HcurlError, PullbackError, D0, D1, Hausdorff].get(v as usize).copied()
    }
}

/// A tetrahedral mesh.
pub struct CurlfemMesh(Mesh);

/// Result of a refinement study.
pub struct CurlfemReport {
    outcome: StudyOutcome,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct CurlfemMeshInfo {
    pub order: usize,
    pub cells: usize,
    pub nodes: usize,
    pub edges: usize,
    pub faces: usize,
    pub boundary_faces: usize,
    /// Largest vertex-skeleton edge length.
    pub h: f64,
}

/// One report row; absent values are NaN.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default)]
pub struct CurlfemRow {
    pub level: usize,
    pub h: f64,
    pub ndof: usize,
    pub l2_error: f64,
    pub hcurl_error: f64,
    pub pullback_error: f64,
    pub d0: f64,
    pub d1: f64,
    pub hausdorff: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> CurlfemStatus {
    match err {
        Error::AtLevel { source, .. } => status_of(source),
        Error::InvalidInput(_) | Error::OutsideReference(..) => CurlfemStatus::InvalidArgument,
        Error::UnsupportedDegree(_)
        | Error::UnsupportedOrder(_)
        | Error::UnsupportedElementType(_)
        | Error::QuadratureUnavailable { .. } => CurlfemStatus::Unsupported,
        Error::InvalidMesh(_)
        | Error::Parse { .. }
        | Error::SingularJacobian { .. }
        | Error::NonPositiveJacobian { .. }
        | Error::RayIntersection(..) => CurlfemStatus::Mesh,
        Error::EmptyInteriorSystem
        | Error::Factorization(_)
        | Error::NotConverged { .. }
        | Error::ResidualTooLarge { .. } => CurlfemStatus::Solver,
        Error::Io(_) | Error::Json(_) => CurlfemStatus::Io,
        _ => CurlfemStatus::Internal,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (CurlfemStatus, String)>) -> CurlfemStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            CurlfemStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside curlfem");
            CurlfemStatus::Panic
        }
    }
}

fn lift(err: Error) -> (CurlfemStatus, String) {
    (status_of(&err), err.to_string())
}

fn null(name: &str) -> (CurlfemStatus, String) {
    (CurlfemStatus::NullPointer, format!("{name} is null"))
}

unsafe fn read_str<'a>(p: *const c_char, name: &str) -> Result<&'a str, (CurlfemStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (CurlfemStatus::InvalidArgument, format!("{name} is not valid UTF-8")))
}

unsafe fn emit_mesh(out: *mut *mut CurlfemMesh, mesh: curlfem::Result<Mesh>) -> Result<(), (CurlfemStatus, String)> {
    let mesh = mesh.map_err(lift)?;
    *out = Box::into_raw(Box::new(CurlfemMesh(mesh)));
    Ok(())
}

/// Message of the last failed call on this thread, or null. The pointer is
/// valid until the next call into this library from the same thread.
#[no_mangle]
pub extern "C" fn curlfem_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn curlfem_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Built-in ball mesh at `level` with geometric order 1 or 2.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn curlfem_mesh_ball(level: usize, order: usize, out: *mut *mut CurlfemMesh) -> CurlfemStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        emit_mesh(out, generate_ball_mesh(level, order))
    })
}

/// Built-in unit-cube mesh at `level` (order 1).
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn curlfem_mesh_cube(level: usize, out: *mut *mut CurlfemMesh) -> CurlfemStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        emit_mesh(out, generate_cube_mesh(level, 1))
    })
}

/// Reads a Gmsh 2.2 or 4.1 ASCII mesh.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn curlfem_mesh_read_gmsh(path: *const c_char, out: *mut *mut CurlfemMesh) -> CurlfemStatus {
    guard(|| {
        let path = read_str(path, "path")?;
        if out.is_null() {
            return Err(null("out"));
        }
        emit_mesh(out, read_gmsh(path))
    })
}

/// Sizes and mesh width of `mesh`.
///
/// # Safety
/// `mesh` must be a live handle and `info` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn curlfem_mesh_info(mesh: *const CurlfemMesh, info: *mut CurlfemMeshInfo) -> CurlfemStatus {
    guard(|| {
        let mesh = &mesh.as_ref().ok_or_else(|| null("mesh"))?.0;
        let info = info.as_mut().ok_or_else(|| null("info"))?;
        *info = CurlfemMeshInfo {
            order: mesh.order(),
            cells: mesh.num_cells(),
            nodes: mesh.num_nodes(),
            edges: mesh.num_edges(),
            faces: mesh.num_faces(),
            boundary_faces: mesh.boundary_faces().count(),
            h: mesh.h(),
        };
        Ok(())
    })
}

/// # Safety
/// `mesh` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn curlfem_mesh_free(mesh: *mut CurlfemMesh) {
    if !mesh.is_null() {
        drop(Box::from_raw(mesh));
    }
}

/// Runs a study described by a JSON configuration, for example
/// `{"study": "ball-convergence", "k": 1, "geo_order": 1, "levels": 3}`.
///
/// # Safety
/// `config_json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn curlfem_study_run(config_json: *const c_char, out: *mut *mut CurlfemReport) -> CurlfemStatus {
    guard(|| {
        let text = read_str(config_json, "config_json")?;
        if out.is_null() {
            return Err(null("out"));
        }
        let config: StudyConfig = serde_json::from_str(text)
            .map_err(|e| (CurlfemStatus::InvalidArgument, format!("invalid configuration: {e}")))?;
        let outcome = run_study(&config).map_err(lift)?;
        *out = Box::into_raw(Box::new(CurlfemReport { outcome }));
        Ok(())
    })
}

/// # Safety
/// `report` must be a live handle and `rows` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn curlfem_report_num_rows(report: *const CurlfemReport, rows: *mut usize) -> CurlfemStatus {
    guard(|| {
        let report = report.as_ref().ok_or_else(|| null("report"))?;
        *rows.as_mut().ok_or_else(|| null("rows"))? = report.outcome.report.rows().len();
        Ok(())
    })
}

fn nan(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

fn c_row(r: &ReportRow) -> CurlfemRow {
    CurlfemRow {
        level: r.level,
        h: r.h,
        ndof: r.ndof,
        l2_error: nan(r.l2_error),
        hcurl_error: nan(r.hcurl_error),
        pullback_error: nan(r.pullback_error),
        d0: nan(r.d0),
        d1: nan(r.d1),
        hausdorff: nan(r.hausdorff),
    }
}

/// Row `index`, ordered by decreasing mesh width.
///
/// # Safety
/// `report` must be a live handle and `row` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn curlfem_report_row(
    report: *const CurlfemReport,
    index: usize,
    row: *mut CurlfemRow,
) -> CurlfemStatus {
    guard(|| {
        let report = report.as_ref().ok_or_else(|| null("report"))?;
        let row = row.as_mut().ok_or_else(|| null("row"))?;
        let rows = report.outcome.report.rows();
        let r = rows.get(index).ok_or_else(|| {
            (
                CurlfemStatus::InvalidArgument,
                format!("row {index} out of range for {} rows", rows.len()),
            )
        })?;
        *row = c_row(r);
        Ok(())
    })
}

/// Convergence order of `column`, a [`CurlfemColumn`] value, over the last
/// rows. Returns `CURLFEM_STATUS_NOT_AVAILABLE` when the column is empty.
///
/// # Safety
/// `report` must be a live handle and `slope` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn curlfem_report_slope(
    report: *const CurlfemReport,
    column: u32,
    slope: *mut f64,
) -> CurlfemStatus {
    guard(|| {
        let report = report.as_ref().ok_or_else(|| null("report"))?;
        let slope = slope.as_mut().ok_or_else(|| null("slope"))?;
        let column = CurlfemColumn::from_raw(column)
            .ok_or_else(|| (CurlfemStatus::InvalidArgument, format!("unknown column {column}")))?;
        let s = report.outcome.report.slopes();
        let v = match column {
            CurlfemColumn::L2Error => s.l2_error,
            CurlfemColumn::HcurlError => s.hcurl_error,
            CurlfemColumn::PullbackError => s.pullback_error,
            CurlfemColumn::D0 => s.d0,
            CurlfemColumn::D1 => s.d1,
            CurlfemColumn::Hausdorff => s.hausdorff,
        };
        *slope = v.ok_or_else(|| (CurlfemStatus::NotAvailable, format!("no slope for {column:?}")))?;
        Ok(())
    })
}

/// Report as CSV text; release with [`curlfem_string_free`].
///
/// # Safety
/// `report` must be a live handle and `csv` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn curlfem_report_csv(report: *const CurlfemReport, csv: *mut *mut c_char) -> CurlfemStatus {
    guard(|| {
        let report = report.as_ref().ok_or_else(|| null("report"))?;
        if csv.is_null() {
            return Err(null("csv"));
        }
        let text = CString::new(report.outcome.report.to_csv())
            .map_err(|_| (CurlfemStatus::Internal, "CSV contains NUL".to_string()))?;
        *csv = text.into_raw();
        Ok(())
    })
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn curlfem_report_free(report: *mut CurlfemReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn curlfem_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
