//! Explicit rational maps: construction from zeros and poles, powers,
//! Möbius changes of coordinates, local degrees and numerically extracted
//! branching data.

mod map;
mod moebius;
mod parse;
mod poly;
mod report;

pub use map::{
    apply_moebius, build_map, build_scaled, local_degree, power, Factored, RationalMap, Side,
};
pub use moebius::{Moebius, Point};
pub use parse::parse_map;
pub use poly::{relative_residual, Poly};
pub use report::{branching_report, BranchingReport, ReportEntry, ROOT_TOLERANCE, VALUE_TOLERANCE};

pub use num_complex::Complex64;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RatmapError {
    #[error("zero and pole locations must be distinct; {0} repeats")]
    DuplicateLocation(String),
    #[error("multiplicities must be positive")]
    InvalidMultiplicity,
    #[error("not a nonconstant map: {0}")]
    ConstantMap(String),
    #[error("numerator and denominator share a root near {0}")]
    CommonFactor(String),
    #[error("map has degree {0}; branching needs degree at least 2")]
    DegreeTooSmall(u32),
    #[error(
        "local degree at {point} is ill-conditioned (order {order} coefficient ratio {ratio:e})"
    )]
    IllConditioned {
        point: String,
        order: u32,
        ratio: f64,
    },
    #[error("root finding failed: {0}")]
    RootFindingFailure(String),
    #[error("total branching {found} differs from {expected}: {entries}")]
    InconsistentReport {
        expected: u64,
        found: u64,
        entries: String,
    },
    #[error("Möbius triple has coincident points")]
    DegenerateTriple,
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
}
