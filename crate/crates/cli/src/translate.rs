//! Pluggable post translation. Only an identity stub ships.

use serde::{Deserialize, Serialize};

pub trait Translator: Send + Sync {
    /// Provider name reported to clients.
    fn name(&self) -> &str;

    /// Whether output is a real translation.
    fn is_stub(&self) -> bool;

    fn translate(&self, text: &str, target: &str) -> Result<String, String>;
}

/// Returns the input unchanged.
#[derive(Debug, Default, Clone, Copy)]
pub struct IdentityTranslator;

impl Translator for IdentityTranslator {
    fn name(&self) -> &str {
        "identity"
    }

    fn is_stub(&self) -> bool {
        true
    }

    fn translate(&self, text: &str, _target: &str) -> Result<String, String> {
        Ok(text.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslateRequest {
    pub text: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranslateResponse {
    pub text: String,
    pub target: String,
    pub provider: String,
    pub stub: bool,
}
