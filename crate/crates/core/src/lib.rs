//! Peer-review balance accounting.
//!
//! A researcher's R-Index is the number of reviews they completed minus the
//! review responsibility their own publications accrued, where each paper's
//! received reviews are split equally among its authors. Positive means the
//! researcher gave more review effort than their papers consumed.
//!
//! The engine is generic over [`Scalar`]; [`Rational`] is the exact default
//! and the one every conservation identity holds for.

pub mod engine;
pub mod ingest;
pub mod model;
pub mod scalar;
pub mod sim;

pub use engine::{
    closure_issues, compute_all, completed_total, conservation_residual,
    cross_check_review_counts, paper_is_eligible, r_index, responsibility_total,
    review_responsibility, ClosureIssue, Discrepancy, EngineError, Report,
};
pub use ingest::{load_dataset, load_dataset_files, parse_papers, parse_reviews, Format, IngestReport};
pub use model::{
    validate_dataset, Dataset, EditorialMode, EvaluationConfig, EventId, PaperId, PaperRecord,
    ResearcherId, ReviewEvent, ReviewKind, ValidationError, ValidationErrors,
};
pub use scalar::Scalar;
pub use sim::{expected_burden, generate_community, SimConfig, SplitMix64};

/// Exact, arbitrary-precision rational in lowest terms.
pub type Rational = num_rational::BigRational;

/// Exact per-researcher report.
pub type RIndexReport = Report<Rational>;

/// Floating-point report, for approximate work.
pub type ApproxReport = Report<f64>;
