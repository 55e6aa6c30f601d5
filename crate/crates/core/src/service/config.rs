//! JSON configuration for clients, and loading of code files.

use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::ServiceError;
use crate::array::{ArrayCode, ArrayJson};
use crate::code::CodeJson;
use crate::emulation::RecoveryScheme;
use crate::protocol::{protocol_by_name, LinearPirProtocol};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub name: String,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClientConfig {
    /// `host:port` of server `h` at position `h`.
    pub servers: Vec<String>,
    /// Path of a PIR code or array code file.
    pub code: String,
    pub protocol: ProtocolConfig,
    #[serde(default)]
    pub seed: u64,
}

impl ClientConfig {
    pub fn load(path: &Path) -> Result<Self, ServiceError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| ServiceError::Config(e.to_string()))
    }
}

/// Either kind of code file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SchemeFile {
    Code(CodeJson),
    Array(ArrayJson),
}

impl SchemeFile {
    pub fn into_scheme(self) -> Result<Arc<dyn RecoveryScheme>, ServiceError> {
        match self {
            SchemeFile::Code(c) => Ok(Arc::new(c.into_code().map_err(|e| ServiceError::Config(e.to_string()))?)),
            SchemeFile::Array(a) => Ok(Arc::new(ArrayCode::from_json(a).map_err(|e| ServiceError::Config(e.to_string()))?)),
        }
    }
}

/// Reads and verifies a code file.
pub fn load_scheme(path: &Path) -> Result<Arc<dyn RecoveryScheme>, ServiceError> {
    let text = std::fs::read_to_string(path)?;
    let file: SchemeFile = serde_json::from_str(&text).map_err(|e| ServiceError::Config(format!("{}: {e}", path.display())))?;
    file.into_scheme()
}

impl ProtocolConfig {
    pub fn build(&self, scheme: &dyn RecoveryScheme) -> Result<Arc<dyn LinearPirProtocol>, ServiceError> {
        Ok(Arc::from(protocol_by_name(&self.name, self.k, scheme.field())?))
    }
}
