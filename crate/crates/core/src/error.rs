use thiserror::Error;

/// Errors produced by proxy design, training, retrieval, and file I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {context} (expected {expected}, got {actual})")]
    Dimension {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("class {class} has no samples")]
    EmptyClass { class: usize },

    #[error("tag {tag} never occurs in the dataset")]
    EmptyTag { tag: usize },

    #[error("{classes} binary proxies of {bits} bits exceed the 2^{bits} distinct codes available")]
    BinaryCapacity { classes: usize, bits: usize },

    #[error("brute-force assignment limited to C <= {max}, got C = {actual}")]
    BruteForceTooLarge { max: usize, actual: usize },

    #[error("training diverged: {0}")]
    Diverged(String),

    #[error("rotation matrix is not orthogonal (max |GtG - I| = {deviation:.3e})")]
    NotOrthogonal { deviation: f64 },

    #[error("{path}: truncated file at byte offset {offset} ({context})")]
    Truncated {
        path: String,
        offset: u64,
        context: String,
    },

    #[error("{path}: bad magic, expected {expected:?}")]
    BadMagic { path: String, expected: [u8; 4] },

    #[error("{path}: unsupported format version {version}")]
    BadVersion { path: String, version: u32 },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
