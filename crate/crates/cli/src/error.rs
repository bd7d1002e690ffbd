use std::path::Path;

use survx_core::convnet::ConvnetError;
use survx_core::eval::EvalError;
use survx_core::image::ImageError;
use survx_core::metrics::MetricError;
use survx_core::models::ModelError;
use survx_core::resample::ResampleError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error(transparent)]
    Resample(#[from] ResampleError),
    #[error(transparent)]
    Network(#[from] ConvnetError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("bad manifest: {0}")]
    BadManifest(String),
    #[error("corrupt ratings log: {0}")]
    CorruptRatings(String),
    #[error("port {0} is already in use")]
    PortInUse(u16),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// 1 for usage errors, 2 for everything that failed at run time.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            _ => 2,
        }
    }
}
