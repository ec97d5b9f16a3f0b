//! Error norms, convergence orders and report output.
//!
//! Two error measures are provided: the error against the exact solution
//! restricted to the meshed domain, and the error against its pull-back by a
//! domain map.

mod eoc;
mod norms;
mod report;

pub use eoc::{eoc, eoc_tail, pairwise_eoc};
pub use norms::{error_norms, error_norms_with, field_norms, pullback_error, ErrorNorms, ERROR_EXACTNESS};
pub use report::{ConvergenceReport, ReportRow, Slopes, EOC_WINDOW};
