use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Machine(#[from] ndr_core::ndr_machine::NdrError),
    #[error(transparent)]
    Estimation(#[from] ndr_core::estimation::EstimationError),
    #[error(transparent)]
    Bayes(#[from] ndr_core::bayes::BayesError),
    #[error(transparent)]
    Mmh(#[from] ndr_core::mmh::MmhError),
    #[error(transparent)]
    MmhFile(#[from] ndr_core::mmh::MmhFileError),
    #[error(transparent)]
    Ptm(#[from] ndr_core::ptm::PtmError),
    #[error(transparent)]
    MachineFile(#[from] ndr_core::ptm::MachineFileError),
    #[error(transparent)]
    System(#[from] ndr_core::formal_system::FormalSystemError),
    #[error("{path}, line {line}: {message}")]
    Trace { path: PathBuf, line: usize, message: String },
}

pub fn io_error(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}
