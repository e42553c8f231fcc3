//! Parameter containers for the dual-head residual network.
//!
//! Canonical tensor order (used by the optimizer, checkpoints, and tests):
//! stem, then each block's conv1/n1/conv2/n2, then the attacker and defender
//! policy heads, then the attacker and defender value heads. Weight tensors
//! are named `*.w`; only those receive weight decay.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::tensor::{Scalar, Tensor};
use crate::encoding::{ACTION_SPACE, NUM_PLANES, PLANE_CELLS};

/// Network shape. Defaults are the production configuration: 8 residual
/// blocks of 128 filters with a 128-wide value hidden layer.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct NetConfig {
    pub blocks: usize,
    pub filters: usize,
    pub input_planes: usize,
    pub policy_actions: usize,
    pub value_hidden: usize,
}

impl Default for NetConfig {
    fn default() -> NetConfig {
        NetConfig {
            blocks: 8,
            filters: 128,
            input_planes: NUM_PLANES,
            policy_actions: ACTION_SPACE,
            value_hidden: 128,
        }
    }
}

impl NetConfig {
    pub fn validate(&self) -> Result<(), String> {
        if self.blocks == 0 {
            return Err("blocks must be >= 1".into());
        }
        if self.filters == 0 {
            return Err("filters must be >= 1".into());
        }
        if self.input_planes != NUM_PLANES {
            return Err(format!("input_planes must be {NUM_PLANES}"));
        }
        if self.policy_actions != ACTION_SPACE {
            return Err(format!("policy_actions must be {ACTION_SPACE}"));
        }
        if self.value_hidden == 0 {
            return Err("value_hidden must be >= 1".into());
        }
        Ok(())
    }

    /// Policy head output channels: one per (direction, distance) pair.
    pub const POLICY_CHANNELS: usize = 32;

    /// Total trainable scalars, in closed form from the shape table.
    pub fn param_count(&self) -> usize {
        let f = self.filters;
        let stem = f * self.input_planes * 9 + 2 * f;
        let block = 2 * (f * f * 9 + 2 * f);
        let policy_head = Self::POLICY_CHANNELS * f + 2 * Self::POLICY_CHANNELS;
        let value_head = f + 2 // 1x1 conv to one channel + its norm
            + self.value_hidden * PLANE_CELLS + self.value_hidden
            + self.value_hidden + 1;
        stem + self.blocks * block + 2 * policy_head + 2 * value_head
    }
}

/// Convolution (no bias) followed by per-channel normalization with learned
/// gain and bias. The normalization statistics are computed per sample over
/// the 81 board cells, so inference needs no running averages.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvNorm<T> {
    pub w: Tensor<T>,
    pub gain: Tensor<T>,
    pub bias: Tensor<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dense<T> {
    pub w: Tensor<T>,
    pub b: Tensor<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResBlock<T> {
    pub conv1: ConvNorm<T>,
    pub conv2: ConvNorm<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PolicyHead<T> {
    pub conv: ConvNorm<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValueHead<T> {
    pub conv: ConvNorm<T>,
    pub fc1: Dense<T>,
    pub fc2: Dense<T>,
}

/// All trainable tensors. The two heads are indexed attacker-first.
#[derive(Clone, Debug, PartialEq)]
pub struct Params<T> {
    pub cfg: NetConfig,
    pub stem: ConvNorm<T>,
    pub blocks: Vec<ResBlock<T>>,
    pub policy: [PolicyHead<T>; 2],
    pub value: [ValueHead<T>; 2],
}

impl<T: Scalar> Params<T> {
    /// Zero-initialized parameters with the right shapes.
    pub fn zeros(cfg: &NetConfig) -> Params<T> {
        let f = cfg.filters;
        let conv_norm = |c_out: usize, c_in: usize, k: usize| ConvNorm {
            w: Tensor::zeros(&[c_out, c_in * k]),
            gain: Tensor::zeros(&[c_out]),
            bias: Tensor::zeros(&[c_out]),
        };
        let policy_head = || PolicyHead {
            conv: conv_norm(NetConfig::POLICY_CHANNELS, f, 1),
        };
        let value_head = || ValueHead {
            conv: conv_norm(1, f, 1),
            fc1: Dense {
                w: Tensor::zeros(&[cfg.value_hidden, PLANE_CELLS]),
                b: Tensor::zeros(&[cfg.value_hidden]),
            },
            fc2: Dense {
                w: Tensor::zeros(&[1, cfg.value_hidden]),
                b: Tensor::zeros(&[1]),
            },
        };
        Params {
            cfg: *cfg,
            stem: conv_norm(f, cfg.input_planes, 9),
            blocks: (0..cfg.blocks)
                .map(|_| ResBlock {
                    conv1: conv_norm(f, f, 9),
                    conv2: conv_norm(f, f, 9),
                })
                .collect(),
            policy: [policy_head(), policy_head()],
            value: [value_head(), value_head()],
        }
    }

    /// Visit every tensor in canonical order. `decay` is true for the
    /// weight tensors that receive weight decay.
    pub fn visit(&self, mut f: impl FnMut(String, &Tensor<T>, bool)) {
        for (name, tensor, decay) in self.tensor_list() {
            f(name, tensor, decay);
        }
    }

    /// Mutable references to every tensor, canonical order, with names and
    /// decay flags. Order matches [`Params::tensor_list`].
    pub fn tensors_mut(&mut self) -> Vec<(String, &mut Tensor<T>, bool)> {
        let mut out: Vec<(String, &mut Tensor<T>, bool)> = Vec::new();
        push_conv_mut("stem", &mut self.stem, &mut out);
        for (i, block) in self.blocks.iter_mut().enumerate() {
            push_conv_mut(&format!("block{i}.conv1"), &mut block.conv1, &mut out);
            push_conv_mut(&format!("block{i}.conv2"), &mut block.conv2, &mut out);
        }
        for (head, tag) in self.policy.iter_mut().zip(["a", "d"]) {
            push_conv_mut(&format!("policy_{tag}"), &mut head.conv, &mut out);
        }
        for (head, tag) in self.value.iter_mut().zip(["a", "d"]) {
            let ValueHead { conv, fc1, fc2 } = head;
            push_conv_mut(&format!("value_{tag}"), conv, &mut out);
            out.push((format!("value_{tag}.fc1.w"), &mut fc1.w, true));
            out.push((format!("value_{tag}.fc1.b"), &mut fc1.b, false));
            out.push((format!("value_{tag}.fc2.w"), &mut fc2.w, true));
            out.push((format!("value_{tag}.fc2.b"), &mut fc2.b, false));
        }
        out
    }

    /// Tensors in canonical order (shared references).
    pub fn tensor_list(&self) -> Vec<(String, &Tensor<T>, bool)> {
        let mut out: Vec<(String, &Tensor<T>, bool)> = Vec::new();
        push_conv("stem", &self.stem, &mut out);
        for (i, block) in self.blocks.iter().enumerate() {
            push_conv(&format!("block{i}.conv1"), &block.conv1, &mut out);
            push_conv(&format!("block{i}.conv2"), &block.conv2, &mut out);
        }
        for (head, tag) in self.policy.iter().zip(["a", "d"]) {
            push_conv(&format!("policy_{tag}"), &head.conv, &mut out);
        }
        for (head, tag) in self.value.iter().zip(["a", "d"]) {
            push_conv(&format!("value_{tag}"), &head.conv, &mut out);
            out.push((format!("value_{tag}.fc1.w"), &head.fc1.w, true));
            out.push((format!("value_{tag}.fc1.b"), &head.fc1.b, false));
            out.push((format!("value_{tag}.fc2.w"), &head.fc2.w, true));
            out.push((format!("value_{tag}.fc2.b"), &head.fc2.b, false));
        }
        out
    }

    pub fn total_len(&self) -> usize {
        self.tensor_list().iter().map(|(_, t, _)| t.len()).sum()
    }

    pub fn all_finite(&self) -> bool {
        self.tensor_list().iter().all(|(_, t, _)| t.all_finite())
    }

    /// Accumulate `other` into `self` elementwise (gradient reduction).
    pub fn add_assign(&mut self, other: &Params<T>) {
        let other_list = other.tensor_list();
        for ((_, dst, _), (_, src, _)) in self.tensors_mut().into_iter().zip(other_list) {
            for (d, s) in dst.data_mut().iter_mut().zip(src.data()) {
                *d += *s;
            }
        }
    }

    pub fn cast<U: Scalar>(&self) -> Params<U> {
        let conv = |cn: &ConvNorm<T>| ConvNorm {
            w: cn.w.cast(),
            gain: cn.gain.cast(),
            bias: cn.bias.cast(),
        };
        Params {
            cfg: self.cfg,
            stem: conv(&self.stem),
            blocks: self
                .blocks
                .iter()
                .map(|b| ResBlock {
                    conv1: conv(&b.conv1),
                    conv2: conv(&b.conv2),
                })
                .collect(),
            policy: [
                PolicyHead {
                    conv: conv(&self.policy[0].conv),
                },
                PolicyHead {
                    conv: conv(&self.policy[1].conv),
                },
            ],
            value: [
                ValueHead {
                    conv: conv(&self.value[0].conv),
                    fc1: Dense {
                        w: self.value[0].fc1.w.cast(),
                        b: self.value[0].fc1.b.cast(),
                    },
                    fc2: Dense {
                        w: self.value[0].fc2.w.cast(),
                        b: self.value[0].fc2.b.cast(),
                    },
                },
                ValueHead {
                    conv: conv(&self.value[1].conv),
                    fc1: Dense {
                        w: self.value[1].fc1.w.cast(),
                        b: self.value[1].fc1.b.cast(),
                    },
                    fc2: Dense {
                        w: self.value[1].fc2.w.cast(),
                        b: self.value[1].fc2.b.cast(),
                    },
                },
            ],
        }
    }
}

fn push_conv<'a, T: Scalar>(
    name: &str,
    cn: &'a ConvNorm<T>,
    out: &mut Vec<(String, &'a Tensor<T>, bool)>,
) {
    out.push((format!("{name}.w"), &cn.w, true));
    out.push((format!("{name}.gain"), &cn.gain, false));
    out.push((format!("{name}.bias"), &cn.bias, false));
}

fn push_conv_mut<'a, T: Scalar>(
    name: &str,
    cn: &'a mut ConvNorm<T>,
    out: &mut Vec<(String, &'a mut Tensor<T>, bool)>,
) {
    let ConvNorm { w, gain, bias } = cn;
    out.push((format!("{name}.w"), w, true));
    out.push((format!("{name}.gain"), gain, false));
    out.push((format!("{name}.bias"), bias, false));
}

/// He-normal initialization, deterministic in the seed: conv and dense
/// weights are N(0, 2/fan_in), norm gains 1, all biases 0.
pub fn init_params<T: Scalar>(cfg: &NetConfig, seed: u64) -> Params<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut params = Params::<T>::zeros(cfg);
    for (name, tensor, _) in params.tensors_mut() {
        if name.ends_with(".w") {
            let fan_in = tensor.shape()[1];
            let normal = Normal::new(0.0, (2.0 / fan_in as f64).sqrt()).unwrap();
            for v in tensor.data_mut() {
                *v = T::from_f64(normal.sample(&mut rng));
            }
        } else if name.ends_with(".gain") {
            for v in tensor.data_mut() {
                *v = T::one();
            }
        }
        // biases stay zero
    }
    params
}
