//! Error and result types shared by every module in this crate.

use std::fmt;
use std::io;
use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while building or checking a transform.
#[derive(Debug)]
pub enum Error {
    /// An operating-system I/O failure, with the path it concerned.
    Io { path: PathBuf, source: io::Error },
    /// A value does not fit the element encoding of its target list.
    ValueOutOfRange {
        path: PathBuf,
        value: i64,
        width: u8,
        signed: bool,
    },
    /// A `.meta` manifest is missing a field, malformed, or disagrees with
    /// the size of its data file.
    Manifest { path: PathBuf, detail: String },
    /// Lists fed to a single operation disagree on encoding or length.
    ListMismatch { detail: String },
    /// List contents are inconsistent with their role: an encoding names a
    /// component that does not exist, a component ran dry too early, or a
    /// symbol code is out of range. `position` is the 0-based element index
    /// at which the problem surfaced.
    BadContent {
        path: PathBuf,
        position: u64,
        detail: String,
    },
    /// Input text failed validation; `record` names the offending line or
    /// FASTA record.
    InvalidInput { record: String, detail: String },
    /// The input contained no strings at all.
    EmptyInput,
}

impl Error {
    /// True for errors caused by the user's input rather than by the
    /// environment or on-disk state; the CLI maps these to their own exit
    /// code.
    pub fn is_user_input(&self) -> bool {
        matches!(self, Error::InvalidInput { .. } | Error::EmptyInput)
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Error {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid_input(record: impl Into<String>, detail: impl Into<String>) -> Error {
        Error::InvalidInput {
            record: record.into(),
            detail: detail.into(),
        }
    }

    pub(crate) fn bad_content(
        path: impl Into<PathBuf>,
        position: u64,
        detail: impl Into<String>,
    ) -> Error {
        Error::BadContent {
            path: path.into(),
            position,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Io { path, source } => write!(f, "{}: {}", path.display(), source),
            Error::ValueOutOfRange {
                path,
                value,
                width,
                signed,
            } => write!(
                f,
                "{}: value {} does not fit a {}-byte {} element",
                path.display(),
                value,
                width,
                if *signed { "signed" } else { "unsigned" },
            ),
            Error::Manifest { path, detail } => {
                write!(f, "{}: bad manifest: {}", path.display(), detail)
            }
            Error::ListMismatch { detail } => write!(f, "list mismatch: {}", detail),
            Error::BadContent {
                path,
                position,
                detail,
            } => write!(f, "{}: element {}: {}", path.display(), position, detail),
            Error::InvalidInput { record, detail } => write!(f, "{}: {}", record, detail),
            Error::EmptyInput => write!(f, "input contains no strings"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}
