use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

/// Error type shared by every module in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: not a P5 PGM file (bad magic)")]
    PgmMagic { path: PathBuf },

    #[error("{path}: malformed PGM header: {detail}")]
    PgmHeader { path: PathBuf, detail: String },

    #[error("{path}: truncated pixel data (expected {expected} bytes, got {got})")]
    Truncated {
        path: PathBuf,
        expected: usize,
        got: usize,
    },

    #[error("{path}: unsupported bit depth: {detail}")]
    UnsupportedDepth { path: PathBuf, detail: String },

    #[error("{path}: PNG error: {detail}")]
    Png { path: PathBuf, detail: String },

    #[error("image dimensions must be at least 1x1")]
    ZeroDimension,

    #[error("dimension mismatch: {want_w}x{want_h} expected, got {got_w}x{got_h}")]
    DimensionMismatch {
        want_w: usize,
        want_h: usize,
        got_w: usize,
        got_h: usize,
    },

    #[error("non-finite pixel value at index {0}")]
    NonFinite(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate PSF: kernel sums to zero")]
    DegeneratePsf,

    #[error("glyph count mismatch: expected {expected} cells, atlas holds {got}")]
    GlyphCountMismatch { expected: usize, got: usize },

    #[error("glyph cell for {0:?} has no ink")]
    EmptyGlyphCell(char),

    #[error("character {0:?} is not in the glyph set")]
    UnknownCharacter(char),

    #[error("cannot render empty text")]
    EmptyText,

    #[error("crop list is empty")]
    EmptyCropList,

    #[error("crop height {height} exceeds canvas limit {limit}")]
    CropTooTall { height: usize, limit: usize },

    #[error("{path}:{line}: malformed annotation line: {detail}")]
    JsonlLine {
        path: PathBuf,
        line: usize,
        detail: String,
    },

    #[error("annotation references missing image {path}")]
    MissingImage { path: PathBuf },

    #[error("dataset name mismatch: {0:?} has no counterpart")]
    NameMismatch(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("solver diverged (non-finite value) at iteration {0}")]
    SolverDiverged(usize),

    #[error("glyph match on blank input")]
    BlankGlyph,
}
