//! Versioned, self-describing JSON checkpoints.
//!
//! Floats are written in shortest round-trip form and parsed exactly, so a
//! save/load cycle reproduces every parameter bit for bit.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::network::{layer_sizes, Network, N1, N2, N_IN};
use super::{CoordinateMode, GaussianHeadParams, MlpParams, Model, ModelKind};
use crate::error::{Error, Result};

pub const CHECKPOINT_FORMAT: &str = "mccle-checkpoint";
pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub model: Model,
    pub seed: u64,
    pub train_config_hash: String,
}

#[derive(Serialize, Deserialize)]
struct Architecture {
    n_in: usize,
    n1: usize,
    n2: usize,
    n_out: usize,
}

#[derive(Serialize, Deserialize)]
struct Layers {
    w1: Vec<f64>,
    b1: Vec<f64>,
    w2: Vec<f64>,
    b2: Vec<f64>,
    w3: Vec<f64>,
    b3: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct Document {
    format: String,
    version: u32,
    kind: ModelKind,
    architecture: Architecture,
    seed: u64,
    train_config_hash: String,
    params: Layers,
}

pub fn serialize_params(ckpt: &Checkpoint) -> Result<Vec<u8>> {
    let net = ckpt.model.network();
    net.check_finite()?;
    let sizes = layer_sizes(net.n_out());
    let mut chunks = Vec::with_capacity(6);
    let mut offset = 0;
    for len in sizes {
        chunks.push(net.theta()[offset..offset + len].to_vec());
        offset += len;
    }
    let mut it = chunks.into_iter();
    let mut next = || it.next().unwrap();
    let doc = Document {
        format: CHECKPOINT_FORMAT.into(),
        version: CHECKPOINT_VERSION,
        kind: ckpt.model.kind(),
        architecture: Architecture {
            n_in: N_IN,
            n1: N1,
            n2: N2,
            n_out: net.n_out(),
        },
        seed: ckpt.seed,
        train_config_hash: ckpt.train_config_hash.clone(),
        params: Layers {
            w1: next(),
            b1: next(),
            w2: next(),
            b2: next(),
            w3: next(),
            b3: next(),
        },
    };
    let mut bytes = serde_json::to_vec_pretty(&doc)?;
    bytes.push(b'\n');
    Ok(bytes)
}

/// Parses a checkpoint; with `expected` set, the stored architecture must
/// match that model kind.
pub fn deserialize_params(bytes: &[u8], expected: Option<ModelKind>) -> Result<Checkpoint> {
    let value: Value = serde_json::from_slice(bytes)
        .map_err(|e| Error::CheckpointVersion(format!("unreadable checkpoint header ({e})")))?;
    let format = value.get("format").and_then(Value::as_str);
    let version = value.get("version").and_then(Value::as_u64);
    match (format, version) {
        (Some(CHECKPOINT_FORMAT), Some(v)) if v == CHECKPOINT_VERSION as u64 => {}
        (f, v) => {
            return Err(Error::CheckpointVersion(format!(
                "expected {CHECKPOINT_FORMAT} v{CHECKPOINT_VERSION}, found {f:?} v{v:?}"
            )))
        }
    }
    let doc: Document =
        serde_json::from_value(value).map_err(|e| Error::CheckpointShape(e.to_string()))?;

    let arch = &doc.architecture;
    if arch.n_in != N_IN || arch.n1 != N1 || arch.n2 != N2 || arch.n_out != doc.kind.output_width() {
        return Err(Error::CheckpointShape(format!(
            "architecture {}-{}-{}-{} does not fit kind {}",
            arch.n_in, arch.n1, arch.n2, arch.n_out, doc.kind
        )));
    }
    if let Some(kind) = expected {
        if kind.output_width() != arch.n_out {
            return Err(Error::CheckpointShape(format!(
                "checkpoint holds a {} head with {} outputs, expected {} with {}",
                doc.kind,
                arch.n_out,
                kind,
                kind.output_width()
            )));
        }
        if kind != doc.kind {
            return Err(Error::CheckpointShape(format!(
                "checkpoint holds a {} head, expected {}",
                doc.kind, kind
            )));
        }
    }

    let sizes = layer_sizes(arch.n_out);
    let p = doc.params;
    let parts = [&p.w1, &p.b1, &p.w2, &p.b2, &p.w3, &p.b3];
    let mut theta = Vec::with_capacity(sizes.iter().sum());
    for (name, (part, len)) in ["w1", "b1", "w2", "b2", "w3", "b3"]
        .iter()
        .zip(parts.iter().zip(sizes))
    {
        if part.len() != len {
            return Err(Error::CheckpointShape(format!(
                "{name} has {} values, expected {len}",
                part.len()
            )));
        }
        theta.extend_from_slice(part);
    }
    let net = Network::from_flat(arch.n_out, theta)?;
    let model = match doc.kind {
        ModelKind::Mccle => Model::Mccle(MlpParams(net)),
        ModelKind::GaussCart => Model::Gaussian(GaussianHeadParams {
            trunk: net,
            mode: CoordinateMode::Cartesian,
        }),
        ModelKind::GaussPolar => Model::Gaussian(GaussianHeadParams {
            trunk: net,
            mode: CoordinateMode::Polar,
        }),
    };
    Ok(Checkpoint {
        model,
        seed: doc.seed,
        train_config_hash: doc.train_config_hash,
    })
}
