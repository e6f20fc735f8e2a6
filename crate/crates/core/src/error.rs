use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the library. Each variant's message starts with a
/// stable, kebab-case code so callers and scripts can match on it.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty-cloud: point cloud has no points")]
    EmptyCloud,
    #[error("bad-params: {0}")]
    BadParams(String),
    #[error("no-rims: rim set is empty")]
    NoRims,
    #[error("no-rims-detected: no point scored above the threshold")]
    NoRimsDetected,
    #[error("non-unit-quaternion: norm {0}")]
    NonUnitQuaternion(f64),
    #[error("degenerate-cloud: {0}")]
    DegenerateCloud(String),
    #[error("degenerate-quaternion: cannot normalize a quaternion of norm {0}")]
    DegenerateQuaternion(f64),
    #[error("non-finite: {0}")]
    NonFinite(String),
    #[error("empty-centering: centering matrix needs n >= 1")]
    EmptyCentering,
    #[error("bad-gamma: gamma must be positive, got {0}")]
    BadGamma(f64),
    #[error("zero-current-density: current state has zero target density")]
    ZeroCurrentDensity,
    #[error("no-init: empty history and no initial state")]
    NoInit,
    #[error("nothing-to-normalize: measure list is empty")]
    NothingToNormalize,
    #[error("bad-object: {0}")]
    BadObject(String),
    #[error("no-accepted-states: history has no accepted record")]
    NoAcceptedStates,
    #[error("no-frozen-subsample: history metadata carries no frozen subsample")]
    NoFrozenSubsample,
    #[error("subsample-mode-forbids-burnin: burn-in must be 0 when reusing a frozen subsample, got {0}")]
    SubsampleModeForbidsBurnin(usize),
    #[error("bad-config: {0}")]
    BadConfig(String),
    #[error("oracle: {0}")]
    Oracle(String),
    #[error("parse: {path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("incompatible-version: {0}")]
    IncompatibleVersion(String),
    #[error("io: {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// The stable code prefix of the message, e.g. `"no-rims"`.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyCloud => "empty-cloud",
            Error::BadParams(_) => "bad-params",
            Error::NoRims => "no-rims",
            Error::NoRimsDetected => "no-rims-detected",
            Error::NonUnitQuaternion(_) => "non-unit-quaternion",
            Error::DegenerateCloud(_) => "degenerate-cloud",
            Error::DegenerateQuaternion(_) => "degenerate-quaternion",
            Error::NonFinite(_) => "non-finite",
            Error::EmptyCentering => "empty-centering",
            Error::BadGamma(_) => "bad-gamma",
            Error::ZeroCurrentDensity => "zero-current-density",
            Error::NoInit => "no-init",
            Error::NothingToNormalize => "nothing-to-normalize",
            Error::BadObject(_) => "bad-object",
            Error::NoAcceptedStates => "no-accepted-states",
            Error::NoFrozenSubsample => "no-frozen-subsample",
            Error::SubsampleModeForbidsBurnin(_) => "subsample-mode-forbids-burnin",
            Error::BadConfig(_) => "bad-config",
            Error::Oracle(_) => "oracle",
            Error::Parse { .. } => "parse",
            Error::IncompatibleVersion(_) => "incompatible-version",
            Error::Io { .. } => "io",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
