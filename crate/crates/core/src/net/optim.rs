//! AdamW with decoupled weight decay and the warmup + cosine learning-rate
//! schedule.

use serde::{Deserialize, Serialize};

use super::model::NetError;
use super::params::{NetConfig, Params};
use super::tensor::Scalar;

/// Optimizer and schedule hyperparameters.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptHyper {
    pub peak_lr: f64,
    pub min_lr: f64,
    pub warmup_steps: u64,
    pub total_steps: u64,
    pub weight_decay: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for OptHyper {
    fn default() -> OptHyper {
        OptHyper {
            peak_lr: 0.002,
            min_lr: 0.00001,
            warmup_steps: 500,
            total_steps: 102_400,
            weight_decay: 0.0001,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Learning rate at an optimizer step: linear warmup from 0 to the peak over
/// `warmup_steps`, cosine decay to `min_lr` at `total_steps`, constant after.
pub fn lr_at(hyper: &OptHyper, step: u64) -> f64 {
    if hyper.warmup_steps > 0 && step < hyper.warmup_steps {
        return hyper.peak_lr * step as f64 / hyper.warmup_steps as f64;
    }
    if step >= hyper.total_steps || hyper.total_steps <= hyper.warmup_steps {
        return hyper.min_lr;
    }
    let progress =
        (step - hyper.warmup_steps) as f64 / (hyper.total_steps - hyper.warmup_steps) as f64;
    hyper.min_lr + 0.5 * (hyper.peak_lr - hyper.min_lr) * (1.0 + (std::f64::consts::PI * progress).cos())
}

/// Adam moments congruent to the parameters, plus the step counter.
#[derive(Clone, Debug)]
pub struct OptState<T> {
    pub step: u64,
    pub hyper: OptHyper,
    pub first_moment: Params<T>,
    pub second_moment: Params<T>,
}

impl<T: Scalar> OptState<T> {
    pub fn new(cfg: &NetConfig, hyper: OptHyper) -> OptState<T> {
        OptState {
            step: 0,
            hyper,
            first_moment: Params::zeros(cfg),
            second_moment: Params::zeros(cfg),
        }
    }
}

/// One AdamW step in place: bias-corrected Adam plus decoupled weight decay
/// on the weight tensors only (norm gains and all biases are excluded).
pub fn adamw_update<T: Scalar>(
    params: &mut Params<T>,
    grads: &Params<T>,
    opt: &mut OptState<T>,
) -> Result<(), NetError> {
    if !grads.all_finite() {
        return Err(NetError::NonFinite("gradient"));
    }
    let hyper = opt.hyper;
    let lr = T::from_f64(lr_at(&hyper, opt.step));
    let t = (opt.step + 1) as i32;
    let beta1 = T::from_f64(hyper.beta1);
    let beta2 = T::from_f64(hyper.beta2);
    let one = T::one();
    let bias1 = one - beta1.powi(t);
    let bias2 = one - beta2.powi(t);
    let eps = T::from_f64(hyper.eps);
    let decay_factor = T::from_f64(lr_at(&hyper, opt.step) * hyper.weight_decay);

    let grad_list = grads.tensor_list();
    let mut m_list = opt.first_moment.tensors_mut();
    let mut v_list = opt.second_moment.tensors_mut();
    for (idx, (_, tensor, decayed)) in params.tensors_mut().into_iter().enumerate() {
        let g = grad_list[idx].1.data();
        let m = m_list[idx].1.data_mut();
        let v = v_list[idx].1.data_mut();
        let w = tensor.data_mut();
        for i in 0..w.len() {
            let gi = g[i];
            m[i] = beta1 * m[i] + (one - beta1) * gi;
            v[i] = beta2 * v[i] + (one - beta2) * gi * gi;
            let m_hat = m[i] / bias1;
            let v_hat = v[i] / bias2;
            w[i] -= lr * m_hat / (v_hat.sqrt() + eps);
            if decayed {
                w[i] -= decay_factor * w[i];
            }
        }
    }
    opt.step += 1;
    Ok(())
}
