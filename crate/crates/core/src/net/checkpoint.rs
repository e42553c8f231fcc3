//! Checkpoint archive: a length-prefixed UTF-8 JSON header followed by raw
//! little-endian f32 tensors in the canonical name order (parameters first,
//! then the Adam moments when present). Save -> load -> save is
//! byte-identical.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::optim::{OptHyper, OptState};
use super::params::{NetConfig, Params};

pub const CHECKPOINT_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CheckpointError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed checkpoint: {0}")]
    Malformed(String),
    #[error("unsupported checkpoint format version {0}")]
    Version(u32),
    #[error("checkpoint network config {found:?} does not match expected {expected:?}")]
    ConfigMismatch {
        expected: Box<NetConfig>,
        found: Box<NetConfig>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TensorMeta {
    pub name: String,
    pub shape: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckpointHeader {
    pub format_version: u32,
    pub net_config: NetConfig,
    pub iteration: u32,
    pub opt_step: u64,
    pub rng_seed: u64,
    pub has_opt_state: bool,
    pub tensors: Vec<TensorMeta>,
}

/// Everything read back from an archive. The optimizer moments are raw
/// parameter-shaped tensors; the caller supplies hyperparameters.
pub struct Checkpoint {
    pub header: CheckpointHeader,
    pub params: Params<f32>,
    pub moments: Option<(Params<f32>, Params<f32>)>,
}

impl Checkpoint {
    /// Rebuild optimizer state from stored moments and the given
    /// hyperparameters; `None` when the archive carried no moments.
    pub fn opt_state(&self, hyper: OptHyper) -> Option<OptState<f32>> {
        self.moments.as_ref().map(|(m, v)| OptState {
            step: self.header.opt_step,
            hyper,
            first_moment: m.clone(),
            second_moment: v.clone(),
        })
    }
}

fn manifest(params: &Params<f32>, opt: Option<&OptState<f32>>) -> Vec<TensorMeta> {
    let mut tensors = Vec::new();
    params.visit(|name, tensor, _| {
        tensors.push(TensorMeta {
            name,
            shape: tensor.shape().to_vec(),
        });
    });
    if let Some(opt) = opt {
        opt.first_moment.visit(|name, tensor, _| {
            tensors.push(TensorMeta {
                name: format!("adam_m.{name}"),
                shape: tensor.shape().to_vec(),
            });
        });
        opt.second_moment.visit(|name, tensor, _| {
            tensors.push(TensorMeta {
                name: format!("adam_v.{name}"),
                shape: tensor.shape().to_vec(),
            });
        });
    }
    tensors
}

/// Write a checkpoint archive.
pub fn save(
    path: &Path,
    params: &Params<f32>,
    opt: Option<&OptState<f32>>,
    iteration: u32,
    rng_seed: u64,
) -> Result<(), CheckpointError> {
    let header = CheckpointHeader {
        format_version: CHECKPOINT_FORMAT_VERSION,
        net_config: params.cfg,
        iteration,
        opt_step: opt.map_or(0, |o| o.step),
        rng_seed,
        has_opt_state: opt.is_some(),
        tensors: manifest(params, opt),
    };
    let header_bytes = serde_json::to_vec(&header)
        .map_err(|e| CheckpointError::Malformed(format!("header serialization: {e}")))?;
    let mut writer = BufWriter::new(File::create(path)?);
    writer.write_all(&(header_bytes.len() as u32).to_le_bytes())?;
    writer.write_all(&header_bytes)?;
    write_params(&mut writer, params)?;
    if let Some(opt) = opt {
        write_params(&mut writer, &opt.first_moment)?;
        write_params(&mut writer, &opt.second_moment)?;
    }
    writer.flush()?;
    Ok(())
}

fn write_params<W: Write>(writer: &mut W, params: &Params<f32>) -> Result<(), CheckpointError> {
    let mut result = Ok(());
    params.visit(|_, tensor, _| {
        if result.is_err() {
            return;
        }
        for &v in tensor.iter() {
            if let Err(e) = writer.write_all(&v.to_le_bytes()) {
                result = Err(CheckpointError::Io(e));
                return;
            }
        }
    });
    result
}

fn read_params<R: Read>(
    reader: &mut R,
    cfg: &NetConfig,
) -> Result<Params<f32>, CheckpointError> {
    let mut params = Params::<f32>::zeros(cfg);
    for (_, tensor, _) in params.tensors_mut() {
        let mut bytes = vec![0u8; tensor.len() * 4];
        reader.read_exact(&mut bytes).map_err(|e| {
            CheckpointError::Malformed(format!("tensor data truncated: {e}"))
        })?;
        for (v, chunk) in tensor.data_mut().iter_mut().zip(bytes.chunks_exact(4)) {
            *v = f32::from_le_bytes(chunk.try_into().unwrap());
        }
    }
    Ok(params)
}

/// Read a checkpoint archive, verifying the manifest against the canonical
/// layout implied by the stored network config.
pub fn load(path: &Path) -> Result<Checkpoint, CheckpointError> {
    let mut reader = BufReader::new(File::open(path)?);
    let mut len_bytes = [0u8; 4];
    reader.read_exact(&mut len_bytes)?;
    let header_len = u32::from_le_bytes(len_bytes) as usize;
    let mut header_bytes = vec![0u8; header_len];
    reader.read_exact(&mut header_bytes)?;
    let header: CheckpointHeader = serde_json::from_slice(&header_bytes)
        .map_err(|e| CheckpointError::Malformed(format!("header parse: {e}")))?;
    if header.format_version != CHECKPOINT_FORMAT_VERSION {
        return Err(CheckpointError::Version(header.format_version));
    }
    header
        .net_config
        .validate()
        .map_err(CheckpointError::Malformed)?;

    let params = read_params(&mut reader, &header.net_config)?;
    let moments = if header.has_opt_state {
        let m = read_params(&mut reader, &header.net_config)?;
        let v = read_params(&mut reader, &header.net_config)?;
        Some((m, v))
    } else {
        None
    };

    // The manifest must match the canonical layout exactly.
    let mut expected = Vec::new();
    params.visit(|name, tensor, _| {
        expected.push(TensorMeta {
            name,
            shape: tensor.shape().to_vec(),
        });
    });
    if moments.is_some() {
        for prefix in ["adam_m", "adam_v"] {
            params.visit(|name, tensor, _| {
                expected.push(TensorMeta {
                    name: format!("{prefix}.{name}"),
                    shape: tensor.shape().to_vec(),
                });
            });
        }
    }
    if header.tensors != expected {
        return Err(CheckpointError::Malformed(
            "tensor manifest does not match canonical parameter order".into(),
        ));
    }

    let mut trailing = Vec::new();
    reader.read_to_end(&mut trailing)?;
    if !trailing.is_empty() {
        return Err(CheckpointError::Malformed(format!(
            "{} unexpected trailing bytes",
            trailing.len()
        )));
    }
    Ok(Checkpoint {
        header,
        params,
        moments,
    })
}

/// Load and require a specific network config (for evaluation pairings).
pub fn load_with_config(
    path: &Path,
    expected: &NetConfig,
) -> Result<Checkpoint, CheckpointError> {
    let checkpoint = load(path)?;
    if checkpoint.header.net_config != *expected {
        return Err(CheckpointError::ConfigMismatch {
            expected: Box::new(*expected),
            found: Box::new(checkpoint.header.net_config),
        });
    }
    Ok(checkpoint)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::net::params::init_params;
    use std::fs;

    fn tiny_cfg() -> NetConfig {
        NetConfig {
            blocks: 2,
            filters: 8,
            value_hidden: 16,
            ..NetConfig::default()
        }
    }

    #[test]
    fn save_load_save_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = tiny_cfg();
        let params: Params<f32> = init_params(&cfg, 42);
        let mut opt = OptState::new(&cfg, OptHyper::default());
        opt.step = 17;

        let p1 = dir.path().join("a.ckpt");
        let p2 = dir.path().join("b.ckpt");
        save(&p1, &params, Some(&opt), 5, 42).unwrap();
        let loaded = load(&p1).unwrap();
        assert_eq!(loaded.params, params);
        assert_eq!(loaded.header.iteration, 5);
        assert_eq!(loaded.header.opt_step, 17);
        let opt2 = loaded.opt_state(OptHyper::default()).unwrap();
        save(&p2, &loaded.params, Some(&opt2), 5, 42).unwrap();
        assert_eq!(fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
    }

    #[test]
    fn round_trip_without_optimizer_state() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = tiny_cfg();
        let params: Params<f32> = init_params(&cfg, 1);
        let path = dir.path().join("p.ckpt");
        save(&path, &params, None, 0, 1).unwrap();
        let loaded = load(&path).unwrap();
        assert_eq!(loaded.params, params);
        assert!(loaded.moments.is_none());
        assert!(loaded.opt_state(OptHyper::default()).is_none());
    }

    #[test]
    fn config_mismatch_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let params: Params<f32> = init_params(&tiny_cfg(), 1);
        let path = dir.path().join("p.ckpt");
        save(&path, &params, None, 0, 1).unwrap();
        let other = NetConfig {
            blocks: 3,
            filters: 8,
            value_hidden: 16,
            ..NetConfig::default()
        };
        assert!(matches!(
            load_with_config(&path, &other),
            Err(CheckpointError::ConfigMismatch { .. })
        ));
    }

    #[test]
    fn truncated_archive_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let params: Params<f32> = init_params(&tiny_cfg(), 1);
        let path = dir.path().join("p.ckpt");
        save(&path, &params, None, 0, 1).unwrap();
        let bytes = fs::read(&path).unwrap();
        let cut = dir.path().join("cut.ckpt");
        fs::write(&cut, &bytes[..bytes.len() - 10]).unwrap();
        assert!(load(&cut).is_err());
    }
}
