use std::path::Path;

use thiserror::Error;

/// Exit codes: 2 for parse, I/O and usage errors, 3 for domain errors, 4 when
/// an iteration did not converge.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{origin}:{line}: {msg}")]
    Parse { origin: String, line: usize, msg: String },

    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Domain(#[from] manifoldkit::Error),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn class(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "parse",
            CliError::Io { .. } => "io",
            CliError::Usage(_) => "usage",
            CliError::Domain(e) if no_convergence(e) => "no-convergence",
            CliError::Domain(_) => "domain",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.class() {
            "domain" => 3,
            "no-convergence" => 4,
            _ => 2,
        }
    }
}

fn no_convergence(e: &manifoldkit::Error) -> bool {
    match e {
        manifoldkit::Error::NoConvergence { .. } => true,
        manifoldkit::Error::LogDomainFailure { source, .. } => no_convergence(source),
        _ => false,
    }
}
