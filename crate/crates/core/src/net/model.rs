//! Forward pass, loss, and gradients for the dual-head residual network.
//!
//! The trunk is a stem conv-norm-relu followed by residual blocks
//! (conv-norm-relu-conv-norm, add skip, relu). Each side owns a policy head
//! (1x1 conv to 32 channels, norm, reshaped so channel `c` at square `q`
//! lands on action `q*32 + c`) and a value head (1x1 conv to one channel,
//! norm, relu, dense 81 -> hidden, relu, dense -> 1, tanh).
//!
//! All computation is per sample, so results are independent of batch
//! composition; batches parallelize over fixed-size chunks with gradients
//! reduced in chunk order, which keeps training bitwise deterministic for
//! any thread count.

use rayon::prelude::*;
use thiserror::Error;

use super::ops::{
    conv1x1_backward, conv1x1_forward, conv3x3_backward, conv3x3_forward, dense_backward,
    dense_forward, norm_backward, norm_forward, relu_backward_inplace, relu_inplace, CELLS,
};
use super::params::{NetConfig, Params};
use super::tensor::Scalar;
use crate::rules::Side;

#[derive(Debug, Error)]
pub enum NetError {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("policy target places mass on an illegal action in sample {0}")]
    TargetOnIllegalAction(usize),
    #[error("sample {0} has no legal action")]
    EmptyMask(usize),
    #[error("non-finite {0} encountered")]
    NonFinite(&'static str),
}

/// Four-output forward result for one position.
#[derive(Clone, Debug)]
pub struct NetOutput<T> {
    pub logits_attacker: Vec<T>,
    pub value_attacker: T,
    pub logits_defender: Vec<T>,
    pub value_defender: T,
}

/// Logits and value of the head belonging to `side`.
pub fn select_head<T: Scalar>(output: &NetOutput<T>, side: Side) -> (&[T], T) {
    match side {
        Side::Attacker => (&output.logits_attacker, output.value_attacker),
        Side::Defender => (&output.logits_defender, output.value_defender),
    }
}

/// One training batch. Policy targets are probability vectors supported on
/// the legal actions of the originating position; value targets are the
/// final outcome from the perspective of the side to move.
#[derive(Clone, Debug)]
pub struct TrainBatch<T> {
    pub batch: usize,
    pub inputs: Vec<T>,
    pub policy_targets: Vec<T>,
    pub value_targets: Vec<T>,
    pub sides: Vec<Side>,
    pub legal_masks: Vec<bool>,
}

impl<T: Scalar> TrainBatch<T> {
    pub fn validate(&self, cfg: &NetConfig) -> Result<(), NetError> {
        let b = self.batch;
        let a = cfg.policy_actions;
        if self.inputs.len() != b * cfg.input_planes * CELLS
            || self.policy_targets.len() != b * a
            || self.value_targets.len() != b
            || self.sides.len() != b
            || self.legal_masks.len() != b * a
        {
            return Err(NetError::ShapeMismatch(format!(
                "batch {b}: inputs {}, targets {}, values {}, sides {}, masks {}",
                self.inputs.len(),
                self.policy_targets.len(),
                self.value_targets.len(),
                self.sides.len(),
                self.legal_masks.len()
            )));
        }
        for i in 0..b {
            let mask = &self.legal_masks[i * a..(i + 1) * a];
            let target = &self.policy_targets[i * a..(i + 1) * a];
            if !mask.iter().any(|&m| m) {
                return Err(NetError::EmptyMask(i));
            }
            for (t, &m) in target.iter().zip(mask) {
                if !m && *t > T::zero() {
                    return Err(NetError::TargetOnIllegalAction(i));
                }
            }
        }
        Ok(())
    }
}

/// Loss components, averaged over the batch. The entropy of the masked
/// policy is reported for metrics but not optimized.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossTerms {
    pub total: f64,
    pub policy_ce: f64,
    pub value_mse: f64,
    pub entropy: f64,
}

const POLICY_CHANNELS: usize = NetConfig::POLICY_CHANNELS;

struct TrunkActivations<T> {
    stem_xhat: Vec<T>,
    stem_inv: Vec<T>,
    stem_out: Vec<T>,
    blocks: Vec<BlockActivations<T>>,
}

struct BlockActivations<T> {
    xhat1: Vec<T>,
    inv1: Vec<T>,
    r1: Vec<T>,
    xhat2: Vec<T>,
    inv2: Vec<T>,
    out: Vec<T>,
}

/// Trunk forward for one sample; caches are filled only when `train` needs
/// the backward pass.
fn trunk_forward<T: Scalar>(
    params: &Params<T>,
    input: &[T],
    col: &mut [T],
    keep_cache: bool,
) -> (Vec<T>, Option<TrunkActivations<T>>) {
    let cfg = &params.cfg;
    let f = cfg.filters;
    let mut conv_out = vec![T::zero(); f * CELLS];
    conv3x3_forward(
        params.stem.w.data(),
        input,
        cfg.input_planes,
        f,
        &mut col[..cfg.input_planes * 9 * CELLS],
        &mut conv_out,
    );
    let mut xhat = vec![T::zero(); f * CELLS];
    let mut inv = vec![T::zero(); f];
    let mut cur = vec![T::zero(); f * CELLS];
    norm_forward(
        &conv_out,
        params.stem.gain.data(),
        params.stem.bias.data(),
        f,
        &mut xhat,
        &mut inv,
        &mut cur,
    );
    relu_inplace(&mut cur);

    let mut cache = keep_cache.then(|| TrunkActivations {
        stem_xhat: xhat,
        stem_inv: inv,
        stem_out: cur.clone(),
        blocks: Vec::with_capacity(cfg.blocks),
    });

    for block in &params.blocks {
        conv3x3_forward(
            block.conv1.w.data(),
            &cur,
            f,
            f,
            &mut col[..f * 9 * CELLS],
            &mut conv_out,
        );
        let mut xhat1 = vec![T::zero(); f * CELLS];
        let mut inv1 = vec![T::zero(); f];
        let mut r1 = vec![T::zero(); f * CELLS];
        norm_forward(
            &conv_out,
            block.conv1.gain.data(),
            block.conv1.bias.data(),
            f,
            &mut xhat1,
            &mut inv1,
            &mut r1,
        );
        relu_inplace(&mut r1);

        conv3x3_forward(
            block.conv2.w.data(),
            &r1,
            f,
            f,
            &mut col[..f * 9 * CELLS],
            &mut conv_out,
        );
        let mut xhat2 = vec![T::zero(); f * CELLS];
        let mut inv2 = vec![T::zero(); f];
        let mut n2 = vec![T::zero(); f * CELLS];
        norm_forward(
            &conv_out,
            block.conv2.gain.data(),
            block.conv2.bias.data(),
            f,
            &mut xhat2,
            &mut inv2,
            &mut n2,
        );
        for (n, &skip) in n2.iter_mut().zip(cur.iter()) {
            *n += skip;
        }
        relu_inplace(&mut n2);
        cur = n2;

        if let Some(cache) = cache.as_mut() {
            cache.blocks.push(BlockActivations {
                xhat1,
                inv1,
                r1,
                xhat2,
                inv2,
                out: cur.clone(),
            });
        }
    }
    (cur, cache)
}

struct PolicyActivations<T> {
    xhat: Vec<T>,
    inv: Vec<T>,
}

fn policy_forward<T: Scalar>(
    params: &Params<T>,
    head: usize,
    trunk: &[T],
    keep_cache: bool,
) -> (Vec<T>, Option<PolicyActivations<T>>) {
    let cfg = &params.cfg;
    let conv = &params.policy[head].conv;
    let mut pre = vec![T::zero(); POLICY_CHANNELS * CELLS];
    conv1x1_forward(conv.w.data(), trunk, cfg.filters, POLICY_CHANNELS, &mut pre);
    let mut xhat = vec![T::zero(); POLICY_CHANNELS * CELLS];
    let mut inv = vec![T::zero(); POLICY_CHANNELS];
    let mut normed = vec![T::zero(); POLICY_CHANNELS * CELLS];
    norm_forward(
        &pre,
        conv.gain.data(),
        conv.bias.data(),
        POLICY_CHANNELS,
        &mut xhat,
        &mut inv,
        &mut normed,
    );
    // Reshape channel-major (c, q) to the action layout q*32 + c.
    let mut logits = vec![T::zero(); cfg.policy_actions];
    for c in 0..POLICY_CHANNELS {
        for q in 0..CELLS {
            logits[q * POLICY_CHANNELS + c] = normed[c * CELLS + q];
        }
    }
    (logits, keep_cache.then_some(PolicyActivations { xhat, inv }))
}

struct ValueActivations<T> {
    xhat: Vec<T>,
    inv: Vec<T>,
    post_relu: Vec<T>,
    hidden: Vec<T>,
    value: T,
}

fn value_forward<T: Scalar>(
    params: &Params<T>,
    head: usize,
    trunk: &[T],
    keep_cache: bool,
) -> (T, Option<ValueActivations<T>>) {
    let cfg = &params.cfg;
    let vh = &params.value[head];
    let mut pre = vec![T::zero(); CELLS];
    conv1x1_forward(vh.conv.w.data(), trunk, cfg.filters, 1, &mut pre);
    let mut xhat = vec![T::zero(); CELLS];
    let mut inv = vec![T::zero(); 1];
    let mut post = vec![T::zero(); CELLS];
    norm_forward(
        &pre,
        vh.conv.gain.data(),
        vh.conv.bias.data(),
        1,
        &mut xhat,
        &mut inv,
        &mut post,
    );
    relu_inplace(&mut post);
    let mut hidden = vec![T::zero(); cfg.value_hidden];
    dense_forward(
        vh.fc1.w.data(),
        vh.fc1.b.data(),
        &post,
        cfg.value_hidden,
        CELLS,
        &mut hidden,
    );
    relu_inplace(&mut hidden);
    let mut out = [T::zero()];
    dense_forward(vh.fc2.w.data(), vh.fc2.b.data(), &hidden, 1, cfg.value_hidden, &mut out);
    let value = out[0].tanh();
    (
        value,
        keep_cache.then_some(ValueActivations {
            xhat,
            inv,
            post_relu: post,
            hidden,
            value,
        }),
    )
}

fn forward_sample<T: Scalar>(params: &Params<T>, input: &[T], col: &mut [T]) -> NetOutput<T> {
    let (trunk, _) = trunk_forward(params, input, col, false);
    let (logits_attacker, _) = policy_forward(params, 0, &trunk, false);
    let (logits_defender, _) = policy_forward(params, 1, &trunk, false);
    let (value_attacker, _) = value_forward(params, 0, &trunk, false);
    let (value_defender, _) = value_forward(params, 1, &trunk, false);
    NetOutput {
        logits_attacker,
        value_attacker,
        logits_defender,
        value_defender,
    }
}

fn col_scratch_len(cfg: &NetConfig) -> usize {
    cfg.input_planes.max(cfg.filters) * 9 * CELLS
}

/// Batched inference. Rows are computed independently per sample, so the
/// result for a given input never depends on its batch neighbours.
pub fn forward<T: Scalar>(
    params: &Params<T>,
    inputs: &[T],
    batch: usize,
) -> Result<Vec<NetOutput<T>>, NetError> {
    let plane_len = params.cfg.input_planes * CELLS;
    if inputs.len() != batch * plane_len {
        return Err(NetError::ShapeMismatch(format!(
            "expected {} input values for batch {batch}, got {}",
            batch * plane_len,
            inputs.len()
        )));
    }
    let outputs = inputs
        .par_chunks(plane_len)
        .map(|input| {
            let mut col = vec![T::zero(); col_scratch_len(&params.cfg)];
            forward_sample(params, input, &mut col)
        })
        .collect();
    Ok(outputs)
}

/// Log-softmax over the legal entries; illegal entries become -inf.
/// Returns an error when nothing is legal.
pub fn masked_log_softmax<T: Scalar>(logits: &[T], mask: &[bool]) -> Result<Vec<T>, NetError> {
    let mut max = T::neg_infinity();
    for (l, &m) in logits.iter().zip(mask) {
        if m && *l > max {
            max = *l;
        }
    }
    if max == T::neg_infinity() {
        return Err(NetError::EmptyMask(0));
    }
    let mut total = T::zero();
    for (l, &m) in logits.iter().zip(mask) {
        if m {
            total += (*l - max).exp();
        }
    }
    let log_z = total.ln();
    Ok(logits
        .iter()
        .zip(mask)
        .map(|(l, &m)| {
            if m {
                *l - max - log_z
            } else {
                T::neg_infinity()
            }
        })
        .collect())
}

/// Per-sample loss pieces and the gradient of the loss w.r.t. the selected
/// head's logits and pre-tanh value (both already scaled by 1/batch).
struct SampleLoss<T> {
    ce: f64,
    mse: f64,
    entropy: f64,
    dlogits: Vec<T>,
    dvalue_pre_tanh: T,
}

fn sample_loss<T: Scalar>(
    logits: &[T],
    value: T,
    target: &[T],
    mask: &[bool],
    z: T,
    inv_batch: T,
    sample_index: usize,
    with_grad: bool,
) -> Result<SampleLoss<T>, NetError> {
    let logp = masked_log_softmax(logits, mask).map_err(|_| NetError::EmptyMask(sample_index))?;
    let mut ce = T::zero();
    let mut entropy = T::zero();
    for ((&lp, &t), &m) in logp.iter().zip(target).zip(mask) {
        if !m {
            if t > T::zero() {
                return Err(NetError::TargetOnIllegalAction(sample_index));
            }
            continue;
        }
        if t > T::zero() {
            ce -= t * lp;
        }
        let p = lp.exp();
        if p > T::zero() {
            entropy -= p * lp;
        }
    }
    let err = value - z;
    let mse = err * err;
    if !ce.is_finite() || !mse.is_finite() {
        return Err(NetError::NonFinite("loss"));
    }
    let dlogits = if with_grad {
        logp.iter()
            .zip(target)
            .zip(mask)
            .map(|((&lp, &t), &m)| {
                if m {
                    (lp.exp() - t) * inv_batch
                } else {
                    T::zero()
                }
            })
            .collect()
    } else {
        Vec::new()
    };
    let two = T::from_f64(2.0);
    let dvalue_pre_tanh = two * err * (T::one() - value * value) * inv_batch;
    Ok(SampleLoss {
        ce: Scalar::into_f64(ce),
        mse: Scalar::into_f64(mse),
        entropy: Scalar::into_f64(entropy),
        dlogits,
        dvalue_pre_tanh,
    })
}

/// Forward + loss for one sample, optionally accumulating gradients.
#[allow(clippy::too_many_arguments)]
fn train_sample<T: Scalar>(
    params: &Params<T>,
    input: &[T],
    target: &[T],
    mask: &[bool],
    z: T,
    side: Side,
    inv_batch: T,
    sample_index: usize,
    grads: Option<&mut Params<T>>,
) -> Result<(f64, f64, f64), NetError> {
    let cfg = &params.cfg;
    let f = cfg.filters;
    let head = match side {
        Side::Attacker => 0,
        Side::Defender => 1,
    };
    let with_grad = grads.is_some();
    let mut col = vec![T::zero(); col_scratch_len(cfg)];

    let (trunk, trunk_cache) = trunk_forward(params, input, &mut col, with_grad);
    let (logits, policy_cache) = policy_forward(params, head, &trunk, with_grad);
    let (value, value_cache) = value_forward(params, head, &trunk, with_grad);

    let loss = sample_loss(
        &logits,
        value,
        target,
        mask,
        z,
        inv_batch,
        sample_index,
        with_grad,
    )?;
    let Some(grads) = grads else {
        return Ok((loss.ce, loss.mse, loss.entropy));
    };
    let trunk_cache = trunk_cache.unwrap();
    let policy_cache = policy_cache.unwrap();
    let value_cache = value_cache.unwrap();

    let mut dtrunk = vec![T::zero(); f * CELLS];

    // Policy head backward: action layout back to channel-major, norm, conv.
    {
        let mut dnormed = vec![T::zero(); POLICY_CHANNELS * CELLS];
        for c in 0..POLICY_CHANNELS {
            for q in 0..CELLS {
                dnormed[c * CELLS + q] = loss.dlogits[q * POLICY_CHANNELS + c];
            }
        }
        let conv = &params.policy[head].conv;
        let gconv = &mut grads.policy[head].conv;
        let mut dpre = vec![T::zero(); POLICY_CHANNELS * CELLS];
        norm_backward(
            &dnormed,
            &policy_cache.xhat,
            &policy_cache.inv,
            conv.gain.data(),
            POLICY_CHANNELS,
            gconv.gain.data_mut(),
            gconv.bias.data_mut(),
            &mut dpre,
        );
        conv1x1_backward(
            conv.w.data(),
            &trunk,
            &dpre,
            f,
            POLICY_CHANNELS,
            gconv.w.data_mut(),
            &mut dtrunk,
        );
    }

    // Value head backward: tanh, dense stack, norm, conv.
    {
        let vh = &params.value[head];
        let gvh = &mut grads.value[head];
        let du = [loss.dvalue_pre_tanh];
        let mut dhidden = vec![T::zero(); cfg.value_hidden];
        dense_backward(
            vh.fc2.w.data(),
            &value_cache.hidden,
            &du,
            1,
            cfg.value_hidden,
            gvh.fc2.w.data_mut(),
            gvh.fc2.b.data_mut(),
            &mut dhidden,
        );
        relu_backward_inplace(&mut dhidden, &value_cache.hidden);
        let mut dpost = vec![T::zero(); CELLS];
        dense_backward(
            vh.fc1.w.data(),
            &value_cache.post_relu,
            &dhidden,
            cfg.value_hidden,
            CELLS,
            gvh.fc1.w.data_mut(),
            gvh.fc1.b.data_mut(),
            &mut dpost,
        );
        relu_backward_inplace(&mut dpost, &value_cache.post_relu);
        let mut dpre = vec![T::zero(); CELLS];
        norm_backward(
            &dpost,
            &value_cache.xhat,
            &value_cache.inv,
            vh.conv.gain.data(),
            1,
            gvh.conv.gain.data_mut(),
            gvh.conv.bias.data_mut(),
            &mut dpre,
        );
        conv1x1_backward(
            vh.conv.w.data(),
            &trunk,
            &dpre,
            f,
            1,
            gvh.conv.w.data_mut(),
            &mut dtrunk,
        );
    }

    // Trunk backward through the residual blocks.
    let mut dcol = vec![T::zero(); f * 9 * CELLS];
    let mut dcur = dtrunk;
    for (i, block) in params.blocks.iter().enumerate().rev() {
        let acts = &trunk_cache.blocks[i];
        let block_input: &[T] = if i == 0 {
            &trunk_cache.stem_out
        } else {
            &trunk_cache.blocks[i - 1].out
        };
        relu_backward_inplace(&mut dcur, &acts.out);
        // Skip connection: dcur flows both into the conv path and directly
        // to the block input.
        let mut dinput = dcur.clone();

        let gblock = &mut grads.blocks[i];
        let mut dconv2 = vec![T::zero(); f * CELLS];
        norm_backward(
            &dcur,
            &acts.xhat2,
            &acts.inv2,
            block.conv2.gain.data(),
            f,
            gblock.conv2.gain.data_mut(),
            gblock.conv2.bias.data_mut(),
            &mut dconv2,
        );
        let mut dr1 = vec![T::zero(); f * CELLS];
        conv3x3_backward(
            block.conv2.w.data(),
            &acts.r1,
            &dconv2,
            f,
            f,
            &mut col[..f * 9 * CELLS],
            &mut dcol,
            gblock.conv2.w.data_mut(),
            &mut dr1,
        );
        relu_backward_inplace(&mut dr1, &acts.r1);
        let mut dconv1 = vec![T::zero(); f * CELLS];
        norm_backward(
            &dr1,
            &acts.xhat1,
            &acts.inv1,
            block.conv1.gain.data(),
            f,
            gblock.conv1.gain.data_mut(),
            gblock.conv1.bias.data_mut(),
            &mut dconv1,
        );
        conv3x3_backward(
            block.conv1.w.data(),
            block_input,
            &dconv1,
            f,
            f,
            &mut col[..f * 9 * CELLS],
            &mut dcol,
            gblock.conv1.w.data_mut(),
            &mut dinput,
        );
        dcur = dinput;
    }

    // Stem backward.
    relu_backward_inplace(&mut dcur, &trunk_cache.stem_out);
    let mut dstem_pre = vec![T::zero(); f * CELLS];
    norm_backward(
        &dcur,
        &trunk_cache.stem_xhat,
        &trunk_cache.stem_inv,
        params.stem.gain.data(),
        f,
        grads.stem.gain.data_mut(),
        grads.stem.bias.data_mut(),
        &mut dstem_pre,
    );
    // Input gradient is discarded, but dW still needs the im2col of x.
    let k = cfg.input_planes * 9;
    super::ops::im2col(input, cfg.input_planes, &mut col[..k * CELLS]);
    T::gemm_strided(
        f,
        CELLS,
        k,
        T::one(),
        &dstem_pre,
        CELLS as isize,
        1,
        &col[..k * CELLS],
        1,
        CELLS as isize,
        T::one(),
        grads.stem.w.data_mut(),
        k as isize,
        1,
    );

    Ok((loss.ce, loss.mse, loss.entropy))
}

/// Number of gradient accumulation chunks; fixed (not thread-dependent) so
/// reduction order and results never depend on parallelism.
const GRAD_CHUNKS: usize = 8;

fn batch_ranges(batch: usize) -> Vec<(usize, usize)> {
    let chunks = GRAD_CHUNKS.min(batch.max(1));
    let base = batch / chunks;
    let extra = batch % chunks;
    let mut ranges = Vec::with_capacity(chunks);
    let mut start = 0;
    for i in 0..chunks {
        let len = base + usize::from(i < extra);
        ranges.push((start, start + len));
        start += len;
    }
    ranges
}

fn run_batch<T: Scalar>(
    params: &Params<T>,
    batch: &TrainBatch<T>,
    with_grad: bool,
) -> Result<(LossTerms, Option<Params<T>>), NetError> {
    batch.validate(&params.cfg)?;
    let b = batch.batch;
    let a = params.cfg.policy_actions;
    let plane_len = params.cfg.input_planes * CELLS;
    let inv_batch = T::from_f64(1.0 / b as f64);

    let results: Vec<Result<(f64, f64, f64, Option<Params<T>>), NetError>> = batch_ranges(b)
        .into_par_iter()
        .map(|(start, end)| {
            let mut grads = with_grad.then(|| Params::<T>::zeros(&params.cfg));
            let (mut ce, mut mse, mut ent) = (0.0, 0.0, 0.0);
            for i in start..end {
                let (c, m, e) = train_sample(
                    params,
                    &batch.inputs[i * plane_len..(i + 1) * plane_len],
                    &batch.policy_targets[i * a..(i + 1) * a],
                    &batch.legal_masks[i * a..(i + 1) * a],
                    batch.value_targets[i],
                    batch.sides[i],
                    inv_batch,
                    i,
                    grads.as_mut(),
                )?;
                ce += c;
                mse += m;
                ent += e;
            }
            Ok((ce, mse, ent, grads))
        })
        .collect();

    let mut total_ce = 0.0;
    let mut total_mse = 0.0;
    let mut total_entropy = 0.0;
    let mut grads: Option<Params<T>> = None;
    for result in results {
        let (ce, mse, ent, chunk_grads) = result?;
        total_ce += ce;
        total_mse += mse;
        total_entropy += ent;
        if let Some(chunk) = chunk_grads {
            match grads.as_mut() {
                None => grads = Some(chunk),
                Some(acc) => acc.add_assign(&chunk),
            }
        }
    }
    let inv = 1.0 / b as f64;
    let terms = LossTerms {
        total: (total_ce + total_mse) * inv,
        policy_ce: total_ce * inv,
        value_mse: total_mse * inv,
        entropy: total_entropy * inv,
    };
    Ok((terms, grads))
}

/// Mean policy cross-entropy + mean value MSE over the batch (weight decay
/// lives in the optimizer, not the loss).
pub fn loss<T: Scalar>(params: &Params<T>, batch: &TrainBatch<T>) -> Result<LossTerms, NetError> {
    run_batch(params, batch, false).map(|(terms, _)| terms)
}

/// Exact gradient of [`loss`] for every parameter.
pub fn gradients<T: Scalar>(
    params: &Params<T>,
    batch: &TrainBatch<T>,
) -> Result<Params<T>, NetError> {
    run_batch(params, batch, true).map(|(_, grads)| grads.unwrap())
}

/// Loss terms and gradients in one pass (what the trainer uses).
pub fn loss_and_gradients<T: Scalar>(
    params: &Params<T>,
    batch: &TrainBatch<T>,
) -> Result<(LossTerms, Params<T>), NetError> {
    run_batch(params, batch, true).map(|(terms, grads)| (terms, grads.unwrap()))
}
