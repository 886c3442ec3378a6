use std::path::PathBuf;

/// Error type shared by all modules.
///
/// The CLI maps these to exit codes: I/O and format errors exit 2, estimator
/// degeneracy and resolution errors exit 3, invalid specs exit 4.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: bad magic number {found:#010x}, expected {expected:#010x}")]
    BadMagic {
        path: PathBuf,
        found: u32,
        expected: u32,
    },

    #[error("{path}: truncated payload, needed {needed} bytes but found {found}")]
    Truncated {
        path: PathBuf,
        needed: usize,
        found: usize,
    },

    #[error("image/label count mismatch: {images} images vs {labels} labels")]
    CountMismatch { images: usize, labels: usize },

    #[error("{path}: size {size} is not a multiple of the {record} byte record")]
    RecordSize {
        path: PathBuf,
        size: u64,
        record: usize,
    },

    #[error("csv parse error at row {row}: {message}")]
    Csv { row: usize, message: String },

    #[error("invalid spec: {0}")]
    InvalidSpec(String),

    #[error("resolution coarser than manifold: max frequency {max_freq:.4} admits no non-constant mode (K = 0)")]
    ResolutionTooCoarse { max_freq: f64 },

    #[error("degenerate geometry: every neighbor pair has zero distance")]
    DegenerateGeometry,

    #[error("degenerate tail: top order statistics are all equal")]
    DegenerateTail,

    #[error("margin requires at least two classes, found {0}")]
    SingleClass(usize),

    #[error("dataset has no labels; {0} requires them")]
    Unlabeled(&'static str),

    #[error("distributions have mismatched dimensions: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("empty distribution")]
    EmptyDistribution,

    #[error("infeasible ball: minimum-norm interpolant has norm {min_norm:.6} > bound {bound:.6}")]
    InfeasibleBall { min_norm: f64, bound: f64 },

    #[error("{0}")]
    Estimation(String),
}
