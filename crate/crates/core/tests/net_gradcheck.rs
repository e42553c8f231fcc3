//! Network verification against independent oracles: a straightforward
//! direct-convolution forward pass, and central finite differences for the
//! full gradient (64-bit arithmetic throughout).

mod common;

use common::random_reachable_positions;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tablutzero::encoding::{encode_state, legal_action_mask, HistoryWindow, ACTION_SPACE};
use tablutzero::net::{forward, gradients, init_params, loss, NetConfig, Params, TrainBatch};
use tablutzero::rules::Side;

const CELLS: usize = 81;

/// Direct-loop reference forward pass (no im2col, no GEMM). Mirrors the
/// layer semantics: conv(no bias) -> per-channel norm over cells -> relu
/// trunk with skips; policy 1x1+norm reshaped to q*32+c; value
/// 1x1+norm+relu, dense-relu-dense, tanh.
mod reference {
    use super::CELLS;
    use tablutzero::net::Params;

    const SIDE: usize = 9;
    const EPS: f64 = 1e-5;

    fn conv3x3(w: &[f64], x: &[f64], c_in: usize, c_out: usize) -> Vec<f64> {
        let mut out = vec![0.0; c_out * CELLS];
        for co in 0..c_out {
            for r in 0..SIDE as isize {
                for c in 0..SIDE as isize {
                    let mut acc = 0.0;
                    for ci in 0..c_in {
                        for ky in -1..=1isize {
                            for kx in -1..=1isize {
                                let (sr, sc) = (r + ky, c + kx);
                                if (0..SIDE as isize).contains(&sr)
                                    && (0..SIDE as isize).contains(&sc)
                                {
                                    acc += w[co * c_in * 9
                                        + ci * 9
                                        + (ky + 1) as usize * 3
                                        + (kx + 1) as usize]
                                        * x[ci * CELLS + (sr * SIDE as isize + sc) as usize];
                                }
                            }
                        }
                    }
                    out[co * CELLS + (r * SIDE as isize + c) as usize] = acc;
                }
            }
        }
        out
    }

    fn conv1x1(w: &[f64], x: &[f64], c_in: usize, c_out: usize) -> Vec<f64> {
        let mut out = vec![0.0; c_out * CELLS];
        for co in 0..c_out {
            for p in 0..CELLS {
                let mut acc = 0.0;
                for ci in 0..c_in {
                    acc += w[co * c_in + ci] * x[ci * CELLS + p];
                }
                out[co * CELLS + p] = acc;
            }
        }
        out
    }

    fn norm(x: &[f64], gain: &[f64], bias: &[f64], channels: usize) -> Vec<f64> {
        let mut out = vec![0.0; channels * CELLS];
        for c in 0..channels {
            let xs = &x[c * CELLS..(c + 1) * CELLS];
            let mean = xs.iter().sum::<f64>() / CELLS as f64;
            let var = xs.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / CELLS as f64;
            let inv = 1.0 / (var + EPS).sqrt();
            for p in 0..CELLS {
                out[c * CELLS + p] = gain[c] * (xs[p] - mean) * inv + bias[c];
            }
        }
        out
    }

    fn relu(mut x: Vec<f64>) -> Vec<f64> {
        for v in &mut x {
            *v = v.max(0.0);
        }
        x
    }

    pub fn forward(params: &Params<f64>, input: &[f64]) -> (Vec<f64>, f64, Vec<f64>, f64) {
        let cfg = &params.cfg;
        let f = cfg.filters;
        let mut cur = relu(norm(
            &conv3x3(params.stem.w.data(), input, cfg.input_planes, f),
            params.stem.gain.data(),
            params.stem.bias.data(),
            f,
        ));
        for block in &params.blocks {
            let r1 = relu(norm(
                &conv3x3(block.conv1.w.data(), &cur, f, f),
                block.conv1.gain.data(),
                block.conv1.bias.data(),
                f,
            ));
            let mut n2 = norm(
                &conv3x3(block.conv2.w.data(), &r1, f, f),
                block.conv2.gain.data(),
                block.conv2.bias.data(),
                f,
            );
            for (n, &s) in n2.iter_mut().zip(&cur) {
                *n += s;
            }
            cur = relu(n2);
        }
        let mut heads = Vec::new();
        for head in 0..2 {
            let conv = &params.policy[head].conv;
            let normed = norm(
                &conv1x1(conv.w.data(), &cur, f, 32),
                conv.gain.data(),
                conv.bias.data(),
                32,
            );
            let mut logits = vec![0.0; cfg.policy_actions];
            for c in 0..32 {
                for q in 0..CELLS {
                    logits[q * 32 + c] = normed[c * CELLS + q];
                }
            }
            let vh = &params.value[head];
            let post = relu(norm(
                &conv1x1(vh.conv.w.data(), &cur, f, 1),
                vh.conv.gain.data(),
                vh.conv.bias.data(),
                1,
            ));
            let mut hidden = vec![0.0; cfg.value_hidden];
            for o in 0..cfg.value_hidden {
                let mut acc = vh.fc1.b.data()[o];
                for i in 0..CELLS {
                    acc += vh.fc1.w.data()[o * CELLS + i] * post[i];
                }
                hidden[o] = acc.max(0.0);
            }
            let mut u = vh.fc2.b.data()[0];
            for i in 0..cfg.value_hidden {
                u += vh.fc2.w.data()[i] * hidden[i];
            }
            heads.push((logits, u.tanh()));
        }
        let (ld, vd) = heads.pop().unwrap();
        let (la, va) = heads.pop().unwrap();
        (la, va, ld, vd)
    }
}

fn tiny_cfg() -> NetConfig {
    NetConfig {
        blocks: 2,
        filters: 16,
        value_hidden: 16,
        ..NetConfig::default()
    }
}

/// Batch of 4 real positions with random normalized targets, two samples
/// per side.
fn sample_batch(seed: u64) -> TrainBatch<f64> {
    let mut rng = StdRng::seed_from_u64(seed);
    let positions = random_reachable_positions(seed, 40);
    let mut picked = Vec::new();
    let mut want_attacker = 2;
    let mut want_defender = 2;
    for state in positions {
        match state.to_move() {
            Side::Attacker if want_attacker > 0 => {
                want_attacker -= 1;
                picked.push(state);
            }
            Side::Defender if want_defender > 0 => {
                want_defender -= 1;
                picked.push(state);
            }
            _ => {}
        }
        if picked.len() == 4 {
            break;
        }
    }
    assert_eq!(picked.len(), 4);

    let mut inputs = Vec::new();
    let mut targets = Vec::new();
    let mut masks = Vec::new();
    let mut values = Vec::new();
    let mut sides = Vec::new();
    for state in picked {
        let window = HistoryWindow::new(state.clone());
        inputs.extend(encode_state(&window).as_slice().iter().map(|&v| v as f64));
        let mask: Vec<bool> = legal_action_mask(&state).unwrap().as_slice().to_vec();
        let mut target = vec![0.0f64; ACTION_SPACE];
        let mut total = 0.0;
        for a in 0..ACTION_SPACE {
            if mask[a] {
                let w: f64 = rng.gen::<f64>();
                target[a] = w;
                total += w;
            }
        }
        for t in &mut target {
            *t /= total;
        }
        targets.extend(target);
        masks.extend(mask);
        values.push([-1.0, 0.0, 1.0][rng.gen_range(0..3)]);
        sides.push(state.to_move());
    }
    TrainBatch {
        batch: 4,
        inputs,
        policy_targets: targets,
        value_targets: values,
        sides,
        legal_masks: masks,
    }
}

#[test]
fn optimized_forward_matches_reference_within_1e5() {
    let cfg = NetConfig {
        blocks: 2,
        filters: 8,
        value_hidden: 8,
        ..NetConfig::default()
    };
    let params: Params<f64> = init_params(&cfg, 99);
    let batch = sample_batch(4);
    for i in 0..batch.batch {
        let input = &batch.inputs[i * 43 * CELLS..(i + 1) * 43 * CELLS];
        let out = &forward(&params, input, 1).unwrap()[0];
        let (la, va, ld, vd) = reference::forward(&params, input);
        let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-6);
        for (x, y) in out.logits_attacker.iter().zip(&la) {
            assert!(rel(*x, *y) < 1e-5, "attacker logits: {x} vs {y}");
        }
        for (x, y) in out.logits_defender.iter().zip(&ld) {
            assert!(rel(*x, *y) < 1e-5, "defender logits: {x} vs {y}");
        }
        assert!(rel(out.value_attacker, va) < 1e-5);
        assert!(rel(out.value_defender, vd) < 1e-5);
    }
}

#[test]
fn analytic_gradients_match_central_differences() {
    let cfg = tiny_cfg();
    let params: Params<f64> = init_params(&cfg, 123);
    let batch = sample_batch(7);
    let analytic = gradients(&params, &batch).unwrap();

    let tensor_sizes: Vec<usize> = params
        .tensor_list()
        .iter()
        .map(|(_, t, _)| t.len())
        .collect();
    let total: usize = tensor_sizes.iter().sum();

    // Central differences are only a valid oracle where the loss is smooth.
    // A +-1e-3 perturbation occasionally flips a ReLU, which corrupts the FD
    // estimate itself (observed ~1e-2 error at such coordinates while
    // smaller steps agree with the analytic value to ~1e-9). Coordinates
    // where the h and h/2 estimates disagree sit on a kink and are redrawn;
    // every kept coordinate is still asserted at step 1e-3.
    let mut rng = StdRng::seed_from_u64(2024);
    let step = 1e-3;
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    let mut redrawn = 0;
    while checked < 200 {
        let flat = rng.gen_range(0..total);
        let (mut tensor_idx, mut offset) = (0usize, flat);
        while offset >= tensor_sizes[tensor_idx] {
            offset -= tensor_sizes[tensor_idx];
            tensor_idx += 1;
        }

        let eval = |delta: f64| -> f64 {
            let mut perturbed = params.clone();
            perturbed.tensors_mut()[tensor_idx].1.data_mut()[offset] += delta;
            loss(&perturbed, &batch).unwrap().total
        };
        let fd = (eval(step) - eval(-step)) / (2.0 * step);
        let fd_half = (eval(step / 2.0) - eval(-step / 2.0)) / step;
        let consistency = (fd - fd_half).abs() / fd.abs().max(fd_half.abs()).max(1e-8);
        if consistency > 1e-5 {
            redrawn += 1;
            assert!(redrawn < 60, "too many kink coordinates; likely a bug");
            continue;
        }

        let exact = analytic.tensor_list()[tensor_idx].1.data()[offset];
        let scale = fd.abs().max(exact.abs());
        let err = if scale < 1e-8 {
            (fd - exact).abs()
        } else {
            (fd - exact).abs() / scale
        };
        worst = worst.max(err);
        assert!(
            err < 1e-4,
            "coordinate ({tensor_idx}, {offset}): fd {fd} vs analytic {exact}, err {err}"
        );
        checked += 1;
    }
    eprintln!("gradcheck: 200 coordinates, {redrawn} redrawn at kinks, worst relative error {worst:.3e}");
}
