use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    /// serde_json messages carry the line and column, or the offending field.
    #[error("invalid JSON in {path}: {message}")]
    Parse { path: String, message: String },
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

macro_rules! domain_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Domain(e.to_string())
            }
        }
    )*};
}

domain_from!(
    chd_core::graphs::GraphError,
    chd_core::hadamard::HadamardError,
    chd_core::diagonalise::DiagonaliseError,
    chd_core::spectral::SpectralError,
    chd_core::walks::WalkError,
    chd_core::cyclotomic::CyclotomicError
);

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Reads JSON inputs and records a digest of each file's bytes.
#[derive(Debug, Default)]
pub struct Inputs {
    pub digests: BTreeMap<String, InputDigest>,
}

impl Inputs {
    pub fn load<T: DeserializeOwned>(&mut self, role: &str, path: &Path) -> Result<T, CliError> {
        let shown = path.display().to_string();
        let bytes = fs::read(path).map_err(|source| CliError::Read { path: shown.clone(), source })?;
        let value = serde_json::from_slice(&bytes).map_err(|e| CliError::Parse {
            path: shown.clone(),
            message: e.to_string(),
        })?;
        let sha256 = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        self.digests.insert(role.to_string(), InputDigest { path: shown, sha256 });
        Ok(value)
    }
}
