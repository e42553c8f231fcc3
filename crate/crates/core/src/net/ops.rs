//! Per-sample layer primitives. Activations are stored channel-major as
//! `[channels][81]` slices; 3x3 convolutions go through im2col + GEMM so a
//! sample's result never depends on its batch neighbours.

use super::tensor::{matmul, Scalar};

pub const CELLS: usize = 81;
const SIDE: usize = 9;
const NORM_EPS: f64 = 1e-5;

/// im2col for a 3x3 kernel with zero padding 1: `col[(c*9 + ky*3 + kx) * 81 + p]`
/// holds input channel `c` sampled at the kernel offset for output cell `p`.
pub fn im2col<T: Scalar>(x: &[T], channels: usize, col: &mut [T]) {
    debug_assert_eq!(x.len(), channels * CELLS);
    debug_assert_eq!(col.len(), channels * 9 * CELLS);
    for c in 0..channels {
        let chan = &x[c * CELLS..(c + 1) * CELLS];
        for ky in 0..3usize {
            for kx in 0..3usize {
                let out = &mut col[(c * 9 + ky * 3 + kx) * CELLS..][..CELLS];
                for row in 0..SIDE {
                    let src_row = row as isize + ky as isize - 1;
                    let dst = &mut out[row * SIDE..row * SIDE + SIDE];
                    if !(0..SIDE as isize).contains(&src_row) {
                        dst.fill(T::zero());
                        continue;
                    }
                    let src = &chan[src_row as usize * SIDE..src_row as usize * SIDE + SIDE];
                    for col_i in 0..SIDE {
                        let src_col = col_i as isize + kx as isize - 1;
                        dst[col_i] = if (0..SIDE as isize).contains(&src_col) {
                            src[src_col as usize]
                        } else {
                            T::zero()
                        };
                    }
                }
            }
        }
    }
}

/// Scatter-add of the im2col gradient back onto the input layout.
pub fn col2im_accumulate<T: Scalar>(dcol: &[T], channels: usize, dx: &mut [T]) {
    debug_assert_eq!(dx.len(), channels * CELLS);
    debug_assert_eq!(dcol.len(), channels * 9 * CELLS);
    for c in 0..channels {
        let chan = &mut dx[c * CELLS..(c + 1) * CELLS];
        for ky in 0..3usize {
            for kx in 0..3usize {
                let grad = &dcol[(c * 9 + ky * 3 + kx) * CELLS..][..CELLS];
                for row in 0..SIDE {
                    let src_row = row as isize + ky as isize - 1;
                    if !(0..SIDE as isize).contains(&src_row) {
                        continue;
                    }
                    for col_i in 0..SIDE {
                        let src_col = col_i as isize + kx as isize - 1;
                        if (0..SIDE as isize).contains(&src_col) {
                            chan[src_row as usize * SIDE + src_col as usize] +=
                                grad[row * SIDE + col_i];
                        }
                    }
                }
            }
        }
    }
}

/// 3x3 convolution: `out[c_out][81] = w[c_out][c_in*9] x col`. `col` is
/// scratch of length `c_in*9*81` and is left holding the im2col image.
pub fn conv3x3_forward<T: Scalar>(
    w: &[T],
    x: &[T],
    c_in: usize,
    c_out: usize,
    col: &mut [T],
    out: &mut [T],
) {
    im2col(x, c_in, col);
    matmul(c_out, c_in * 9, CELLS, w, false, col, false, T::zero(), out);
}

/// Backward of [`conv3x3_forward`]: accumulates `dw += dout * col(x)^T` and
/// `dx += col2im(w^T * dout)`. `col` and `dcol` are scratch.
#[allow(clippy::too_many_arguments)]
pub fn conv3x3_backward<T: Scalar>(
    w: &[T],
    x: &[T],
    dout: &[T],
    c_in: usize,
    c_out: usize,
    col: &mut [T],
    dcol: &mut [T],
    dw: &mut [T],
    dx: &mut [T],
) {
    let k = c_in * 9;
    im2col(x, c_in, col);
    // dW (c_out x k) += dOut (c_out x 81) * col^T (81 x k)
    T::gemm_strided(
        c_out,
        CELLS,
        k,
        T::one(),
        dout,
        CELLS as isize,
        1,
        col,
        1,
        CELLS as isize,
        T::one(),
        dw,
        k as isize,
        1,
    );
    // dCol (k x 81) = w^T (k x c_out) * dOut (c_out x 81)
    matmul(k, c_out, CELLS, w, true, dout, false, T::zero(), dcol);
    col2im_accumulate(dcol, c_in, dx);
}

/// 1x1 convolution: a plain channel-mixing GEMM.
pub fn conv1x1_forward<T: Scalar>(w: &[T], x: &[T], c_in: usize, c_out: usize, out: &mut [T]) {
    matmul(c_out, c_in, CELLS, w, false, x, false, T::zero(), out);
}

/// Backward of [`conv1x1_forward`]: `dw += dout * x^T`, `dx += w^T * dout`.
pub fn conv1x1_backward<T: Scalar>(
    w: &[T],
    x: &[T],
    dout: &[T],
    c_in: usize,
    c_out: usize,
    dw: &mut [T],
    dx: &mut [T],
) {
    T::gemm_strided(
        c_out,
        CELLS,
        c_in,
        T::one(),
        dout,
        CELLS as isize,
        1,
        x,
        1,
        CELLS as isize,
        T::one(),
        dw,
        c_in as isize,
        1,
    );
    matmul(c_in, c_out, CELLS, w, true, dout, false, T::one(), dx);
}

/// Per-channel normalization over the 81 cells of one sample, with learned
/// gain and bias. Caches the normalized activation and inverse stddev.
pub fn norm_forward<T: Scalar>(
    x: &[T],
    gain: &[T],
    bias: &[T],
    channels: usize,
    xhat: &mut [T],
    inv_std: &mut [T],
    out: &mut [T],
) {
    let n = T::from_f64(CELLS as f64);
    let eps = T::from_f64(NORM_EPS);
    for c in 0..channels {
        let xs = &x[c * CELLS..(c + 1) * CELLS];
        let mut mean = T::zero();
        for &v in xs {
            mean += v;
        }
        mean /= n;
        let mut var = T::zero();
        for &v in xs {
            let d = v - mean;
            var += d * d;
        }
        var /= n;
        let inv = (var + eps).sqrt().recip();
        inv_std[c] = inv;
        let (g, b) = (gain[c], bias[c]);
        let xh = &mut xhat[c * CELLS..(c + 1) * CELLS];
        let ys = &mut out[c * CELLS..(c + 1) * CELLS];
        for i in 0..CELLS {
            let h = (xs[i] - mean) * inv;
            xh[i] = h;
            ys[i] = g * h + b;
        }
    }
}

/// Backward of [`norm_forward`] using the cached normalized values.
#[allow(clippy::too_many_arguments)]
pub fn norm_backward<T: Scalar>(
    dout: &[T],
    xhat: &[T],
    inv_std: &[T],
    gain: &[T],
    channels: usize,
    dgain: &mut [T],
    dbias: &mut [T],
    dx: &mut [T],
) {
    let n = T::from_f64(CELLS as f64);
    for c in 0..channels {
        let dy = &dout[c * CELLS..(c + 1) * CELLS];
        let xh = &xhat[c * CELLS..(c + 1) * CELLS];
        let mut sum_dy = T::zero();
        let mut sum_dy_xhat = T::zero();
        for i in 0..CELLS {
            sum_dy += dy[i];
            sum_dy_xhat += dy[i] * xh[i];
        }
        dgain[c] += sum_dy_xhat;
        dbias[c] += sum_dy;
        let mean_dy = sum_dy / n;
        let mean_dy_xhat = sum_dy_xhat / n;
        let scale = gain[c] * inv_std[c];
        let dxs = &mut dx[c * CELLS..(c + 1) * CELLS];
        for i in 0..CELLS {
            dxs[i] += scale * (dy[i] - mean_dy - xh[i] * mean_dy_xhat);
        }
    }
}

pub fn relu_inplace<T: Scalar>(x: &mut [T]) {
    for v in x {
        if *v < T::zero() {
            *v = T::zero();
        }
    }
}

/// ReLU backward via the forward output: gradient passes where `out > 0`.
pub fn relu_backward_inplace<T: Scalar>(dx: &mut [T], out: &[T]) {
    for (d, &o) in dx.iter_mut().zip(out) {
        if o <= T::zero() {
            *d = T::zero();
        }
    }
}

/// y = W x + b for a dense layer.
pub fn dense_forward<T: Scalar>(w: &[T], b: &[T], x: &[T], out_dim: usize, in_dim: usize, y: &mut [T]) {
    for o in 0..out_dim {
        let row = &w[o * in_dim..(o + 1) * in_dim];
        let mut acc = b[o];
        for i in 0..in_dim {
            acc += row[i] * x[i];
        }
        y[o] = acc;
    }
}

/// Backward of [`dense_forward`]: accumulates dW, db and dx.
#[allow(clippy::too_many_arguments)]
pub fn dense_backward<T: Scalar>(
    w: &[T],
    x: &[T],
    dy: &[T],
    out_dim: usize,
    in_dim: usize,
    dw: &mut [T],
    db: &mut [T],
    dx: &mut [T],
) {
    for o in 0..out_dim {
        let g = dy[o];
        db[o] += g;
        let w_row = &w[o * in_dim..(o + 1) * in_dim];
        let dw_row = &mut dw[o * in_dim..(o + 1) * in_dim];
        for i in 0..in_dim {
            dw_row[i] += g * x[i];
            dx[i] += g * w_row[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct convolution reference used to validate the im2col path.
    fn conv3x3_naive(w: &[f64], x: &[f64], c_in: usize, c_out: usize) -> Vec<f64> {
        let mut out = vec![0.0; c_out * CELLS];
        for co in 0..c_out {
            for row in 0..SIDE as isize {
                for col in 0..SIDE as isize {
                    let mut acc = 0.0;
                    for ci in 0..c_in {
                        for ky in -1..=1isize {
                            for kx in -1..=1isize {
                                let (r, c) = (row + ky, col + kx);
                                if (0..SIDE as isize).contains(&r)
                                    && (0..SIDE as isize).contains(&c)
                                {
                                    let wv = w[co * c_in * 9
                                        + ci * 9
                                        + (ky + 1) as usize * 3
                                        + (kx + 1) as usize];
                                    acc += wv * x[ci * CELLS + r as usize * SIDE + c as usize];
                                }
                            }
                        }
                    }
                    out[co * CELLS + row as usize * SIDE + col as usize] = acc;
                }
            }
        }
        out
    }

    fn pseudo_random(len: usize, seed: u64) -> Vec<f64> {
        let mut state = seed;
        (0..len)
            .map(|_| {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((state >> 33) as f64 / (1u64 << 31) as f64) - 1.0
            })
            .collect()
    }

    #[test]
    fn conv3x3_matches_naive_reference() {
        let (c_in, c_out) = (3, 4);
        let w = pseudo_random(c_out * c_in * 9, 1);
        let x = pseudo_random(c_in * CELLS, 2);
        let mut col = vec![0.0; c_in * 9 * CELLS];
        let mut out = vec![0.0; c_out * CELLS];
        conv3x3_forward(&w, &x, c_in, c_out, &mut col, &mut out);
        let naive = conv3x3_naive(&w, &x, c_in, c_out);
        for (a, b) in out.iter().zip(&naive) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn norm_output_is_standardized() {
        let x = pseudo_random(2 * CELLS, 3);
        let gain = vec![1.0; 2];
        let bias = vec![0.0; 2];
        let mut xhat = vec![0.0; 2 * CELLS];
        let mut inv_std = vec![0.0; 2];
        let mut out = vec![0.0; 2 * CELLS];
        norm_forward(&x, &gain, &bias, 2, &mut xhat, &mut inv_std, &mut out);
        for c in 0..2 {
            let ys = &out[c * CELLS..(c + 1) * CELLS];
            let mean: f64 = ys.iter().sum::<f64>() / CELLS as f64;
            let var: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / CELLS as f64;
            assert!(mean.abs() < 1e-12);
            // Variance lands at sigma^2 / (sigma^2 + eps), just shy of 1.
            assert!((var - 1.0).abs() < 1e-3, "var {var}");
        }
    }

    #[test]
    fn col2im_is_adjoint_of_im2col() {
        // <im2col(x), y> == <x, col2im(y)> for random x, y.
        let c = 2;
        let x = pseudo_random(c * CELLS, 5);
        let y = pseudo_random(c * 9 * CELLS, 6);
        let mut col = vec![0.0; c * 9 * CELLS];
        im2col(&x, c, &mut col);
        let lhs: f64 = col.iter().zip(&y).map(|(a, b)| a * b).sum();
        let mut back = vec![0.0; c * CELLS];
        col2im_accumulate(&y, c, &mut back);
        let rhs: f64 = x.iter().zip(&back).map(|(a, b)| a * b).sum();
        assert!((lhs - rhs).abs() < 1e-10);
    }
}
