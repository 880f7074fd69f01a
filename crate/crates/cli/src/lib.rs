//! Verification suites, consistency hunts and report types behind the
//! `hamq` command-line tool.

pub mod hunt;
pub mod report;
pub mod suites;

pub use report::{Failure, SuiteReport};

/// Sizes the global rayon pool from `HAMQ_THREADS` when set. Later calls
/// are no-ops.
pub fn init_threads() {
    if let Some(t) = std::env::var("HAMQ_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global();
    }
}
