//! Versioned, checksummed JSON persistence for fitted pipelines.
//!
//! File layout: `{"format_version":N,"checksum":"<sha256 hex>","payload":{...}}`
//! where the checksum covers the exact payload bytes.

use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};

use crate::corpus::{LabeledDataset, DEFAULT_SEED};
use crate::pipeline::{fit, FittedPipeline, ModelSpec, PipelineConfig};
use crate::{Error, Result};

pub const BUNDLE_FORMAT_VERSION: u64 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingMetadata {
    pub seed: u64,
    pub created_unix_secs: u64,
    pub n_train_rows: usize,
    pub class_counts: IndexMap<String, usize>,
    pub crate_version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelBundle {
    pub format_version: u64,
    pub dataset: String,
    pub pipeline: FittedPipeline<f64>,
    pub metadata: TrainingMetadata,
}

impl ModelBundle {
    pub fn classes(&self) -> &[String] {
        self.pipeline.classes()
    }

    pub fn config(&self) -> &PipelineConfig {
        &self.pipeline.config
    }

    pub fn check(&self) -> Result<()> {
        if self.format_version != BUNDLE_FORMAT_VERSION {
            return Err(Error::VersionMismatch {
                found: self.format_version,
                expected: BUNDLE_FORMAT_VERSION,
            });
        }
        self.pipeline.check_consistent()
    }
}

fn now_unix() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Fits `config` on `train`; the dataset name comes from the schema.
pub fn fit_pipeline(train: &LabeledDataset, config: &PipelineConfig) -> Result<ModelBundle> {
    let pipeline = fit::<f64>(train, config)?;
    let seed = match &config.model {
        ModelSpec::LogReg(t) => t.seed,
        ModelSpec::Mnb { .. } => DEFAULT_SEED,
    };
    let class_counts = train
        .schema()
        .labels()
        .iter()
        .cloned()
        .zip(train.class_counts())
        .collect();
    Ok(ModelBundle {
        format_version: BUNDLE_FORMAT_VERSION,
        dataset: train.schema().name().to_owned(),
        pipeline,
        metadata: TrainingMetadata {
            seed,
            created_unix_secs: now_unix(),
            n_train_rows: train.len(),
            class_counts,
            crate_version: env!("CARGO_PKG_VERSION").to_owned(),
        },
    })
}

#[derive(Deserialize)]
struct Envelope<'a> {
    format_version: u64,
    checksum: String,
    #[serde(borrow)]
    payload: &'a RawValue,
}

fn checksum(payload: &str) -> String {
    hex::encode(Sha256::digest(payload.as_bytes()))
}

pub fn bundle_to_string(bundle: &ModelBundle) -> Result<String> {
    let payload = serde_json::to_string(bundle)?;
    Ok(format!(
        "{{\"format_version\":{},\"checksum\":\"{}\",\"payload\":{payload}}}",
        bundle.format_version,
        checksum(&payload)
    ))
}

/// Checks the version before the checksum, so future formats are reported as such.
pub fn bundle_from_str(text: &str) -> Result<ModelBundle> {
    let env: Envelope<'_> = serde_json::from_str(text).map_err(|e| Error::CorruptedBundle(e.to_string()))?;
    if env.format_version != BUNDLE_FORMAT_VERSION {
        return Err(Error::VersionMismatch {
            found: env.format_version,
            expected: BUNDLE_FORMAT_VERSION,
        });
    }
    let payload = env.payload.get();
    if checksum(payload) != env.checksum {
        return Err(Error::CorruptedBundle("checksum does not match payload".into()));
    }
    let bundle: ModelBundle = serde_json::from_str(payload).map_err(|e| Error::CorruptedBundle(e.to_string()))?;
    bundle.check()?;
    Ok(bundle)
}

pub fn save_bundle(bundle: &ModelBundle, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, bundle_to_string(bundle)?).map_err(|e| Error::io(path, e))
}

pub fn load_bundle(path: impl AsRef<Path>) -> Result<ModelBundle> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = std::str::from_utf8(&bytes).map_err(|e| Error::CorruptedBundle(e.to_string()))?;
    bundle_from_str(text)
}
