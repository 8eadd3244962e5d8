//! Parameter scans, the repetition optimizer, record emitters and the
//! validation suite that back the command-line front end.

mod bound;
mod contour;
mod emit;
mod grid;
mod repeat;
pub mod validate;

pub use bound::{break_even_report, BreakEven, BreakEvenStatus};
pub use contour::{ratio_contour_grid, ContourRecord, RecordStatus};
pub use emit::{format_number, write_csv, write_json, Record};
pub use grid::{GridSpec, Spacing};
pub use repeat::{optimize_repetitions, RepeatRecord, RepetitionScan};
pub use validate::{validate_suite, CheckResult, ValidationConfig, ValidationReport};

/// Runs `f` on a dedicated rayon pool of `threads` workers, or on the global
/// pool when `threads` is `None`.
pub fn with_workers<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .expect("failed to build worker pool")
            .install(f),
        None => f(),
    }
}
