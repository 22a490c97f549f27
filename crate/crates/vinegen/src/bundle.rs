//! Versioned JSON persistence for every model kind.
//!
//! A bundle wraps one payload (marginal, pair copula, joint vine model,
//! autoencoder, or composed pipeline) with a format version and creation
//! metadata. The training-data hash is 64-bit FNV-1a over the CSV bytes.
//! The creation timestamp is taken from `SOURCE_DATE_EPOCH` when set and
//! omitted otherwise, so identical fits serialize to identical bytes.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::autoencoder::DenseAutoencoder;
use crate::bicop::BivariateCopula;
use crate::error::{Error, Result};
use crate::marginals::KernelMarginal;
use crate::pipeline::VcaeModel;
use crate::vine::JointModel;

pub const FORMAT_VERSION: u32 = 1;

/// 64-bit FNV-1a hash.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

/// Creation metadata carried by every bundle.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Hex FNV-1a of the training data file bytes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data_hash: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub created_unix: Option<u64>,
}

impl Metadata {
    pub fn new(seed: Option<u64>, training_bytes: Option<&[u8]>) -> Self {
        Metadata {
            seed,
            data_hash: training_bytes.map(|b| format!("{:016x}", fnv1a64(b))),
            created_unix: std::env::var("SOURCE_DATE_EPOCH")
                .ok()
                .and_then(|s| s.parse().ok()),
        }
    }
}

/// The serialized model, tagged by kind.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum BundlePayload {
    Marginal(KernelMarginal),
    Bicop(BivariateCopula),
    Vine(JointModel),
    Ae(DenseAutoencoder),
    Vcae(VcaeModel),
}

impl BundlePayload {
    pub fn kind_name(&self) -> &'static str {
        match self {
            BundlePayload::Marginal(_) => "marginal",
            BundlePayload::Bicop(_) => "bicop",
            BundlePayload::Vine(_) => "vine",
            BundlePayload::Ae(_) => "ae",
            BundlePayload::Vcae(_) => "vcae",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelBundle {
    pub format_version: u32,
    pub metadata: Metadata,
    #[serde(flatten)]
    pub payload: BundlePayload,
}

impl ModelBundle {
    pub fn new(payload: BundlePayload, metadata: Metadata) -> Self {
        ModelBundle {
            format_version: FORMAT_VERSION,
            metadata,
            payload,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// Parse a bundle, checking the format version and rebuilding the vine
    /// structures' derived links.
    pub fn from_json(text: &str) -> Result<Self> {
        let mut bundle: ModelBundle = serde_json::from_str(text)?;
        if bundle.format_version != FORMAT_VERSION {
            return Err(Error::Format(format!(
                "unsupported format_version {} (this build reads {})",
                bundle.format_version, FORMAT_VERSION
            )));
        }
        match &mut bundle.payload {
            BundlePayload::Vine(jm) => jm.vine.rebuild()?,
            BundlePayload::Vcae(m) => {
                m.latent.vine.rebuild()?;
                if let Some(per_class) = m.per_class.as_mut() {
                    for lm in per_class.values_mut() {
                        lm.vine.rebuild()?;
                    }
                }
            }
            _ => {}
        }
        Ok(bundle)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }
}
