//! Forward and backward compute kernels behind the tape ops.
//!
//! Convolution and the linear map run as im2col + sgemm; everything else is
//! plain loops. Batch items are independent, so the heavy kernels parallelize
//! across the batch with per-worker scratch buffers; cross-batch reductions
//! (weight gradients, bias gradients, batch statistics) always accumulate in
//! a fixed order so results do not depend on thread scheduling.

use super::Tensor;
use crate::{Error, Result};
use rayon::prelude::*;

/// `C[m,n] = alpha * A[m,k] * B[k,n] + beta * C`, all row-major.
pub(crate) fn sgemm(
    m: usize,
    k: usize,
    n: usize,
    alpha: f32,
    a: &[f32],
    b: &[f32],
    beta: f32,
    c: &mut [f32],
) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), k * n);
    debug_assert_eq!(c.len(), m * n);
    unsafe {
        matrixmultiply::sgemm(
            m,
            k,
            n,
            alpha,
            a.as_ptr(),
            k as isize,
            1,
            b.as_ptr(),
            n as isize,
            1,
            beta,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

/// `C[m,n] = alpha * A[m,k] * B[n,k]^T + beta * C`, row-major inputs.
pub(crate) fn sgemm_bt(
    m: usize,
    k: usize,
    n: usize,
    alpha: f32,
    a: &[f32],
    b: &[f32],
    beta: f32,
    c: &mut [f32],
) {
    debug_assert_eq!(a.len(), m * k);
    debug_assert_eq!(b.len(), n * k);
    debug_assert_eq!(c.len(), m * n);
    unsafe {
        matrixmultiply::sgemm(
            m,
            k,
            n,
            alpha,
            a.as_ptr(),
            k as isize,
            1,
            b.as_ptr(),
            1,
            k as isize,
            beta,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

/// `C[m,n] = alpha * A[k,m]^T * B[k,n] + beta * C`, row-major inputs.
pub(crate) fn sgemm_at(
    m: usize,
    k: usize,
    n: usize,
    alpha: f32,
    a: &[f32],
    b: &[f32],
    beta: f32,
    c: &mut [f32],
) {
    debug_assert_eq!(a.len(), k * m);
    debug_assert_eq!(b.len(), k * n);
    debug_assert_eq!(c.len(), m * n);
    unsafe {
        matrixmultiply::sgemm(
            m,
            k,
            n,
            alpha,
            a.as_ptr(),
            1,
            m as isize,
            b.as_ptr(),
            n as isize,
            1,
            beta,
            c.as_mut_ptr(),
            n as isize,
            1,
        );
    }
}

pub(crate) fn ensure_finite(op: &'static str, t: &Tensor) -> Result<()> {
    if t.data().iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { op })
    }
}

pub struct ConvShape {
    pub batch: usize,
    pub cin: usize,
    pub h: usize,
    pub w: usize,
    pub cout: usize,
    pub kh: usize,
    pub kw: usize,
    pub stride: usize,
    pub pad: usize,
    pub ho: usize,
    pub wo: usize,
}

pub fn conv_shape(
    input: &Tensor,
    weight: &Tensor,
    bias: &Tensor,
    stride: usize,
    pad: usize,
) -> Result<ConvShape> {
    let (batch, cin, h, w) = input.dims4("conv2d input")?;
    let (cout, wcin, kh, kw) = weight.dims4("conv2d weight")?;
    if wcin != cin {
        return Err(Error::shape(
            "conv2d",
            format!("input has {cin} channels but weight expects {wcin}"),
        ));
    }
    if bias.shape() != [cout] {
        return Err(Error::shape(
            "conv2d",
            format!("bias shape {:?} does not match {cout} output channels", bias.shape()),
        ));
    }
    if stride < 1 {
        return Err(Error::invalid("conv2d", "stride must be >= 1"));
    }
    if kh > h + 2 * pad || kw > w + 2 * pad {
        return Err(Error::shape(
            "conv2d",
            format!("kernel {kh}x{kw} larger than padded input {}x{}", h + 2 * pad, w + 2 * pad),
        ));
    }
    let ho = (h + 2 * pad - kh) / stride + 1;
    let wo = (w + 2 * pad - kw) / stride + 1;
    Ok(ConvShape {
        batch,
        cin,
        h,
        w,
        cout,
        kh,
        kw,
        stride,
        pad,
        ho,
        wo,
    })
}

/// Unfolds one image `[cin, h, w]` into a `[cin*kh*kw, ho*wo]` matrix.
fn im2col(plane: &[f32], s: &ConvShape, col: &mut [f32]) {
    let n = s.ho * s.wo;
    for ci in 0..s.cin {
        let src_plane = &plane[ci * s.h * s.w..(ci + 1) * s.h * s.w];
        for ky in 0..s.kh {
            for kx in 0..s.kw {
                let row = ((ci * s.kh + ky) * s.kw + kx) * n;
                for oy in 0..s.ho {
                    let iy = (oy * s.stride + ky) as isize - s.pad as isize;
                    let dst = &mut col[row + oy * s.wo..row + (oy + 1) * s.wo];
                    if iy < 0 || iy >= s.h as isize {
                        dst.fill(0.0);
                        continue;
                    }
                    let src = &src_plane[iy as usize * s.w..(iy as usize + 1) * s.w];
                    for (ox, d) in dst.iter_mut().enumerate() {
                        let ix = (ox * s.stride + kx) as isize - s.pad as isize;
                        *d = if ix < 0 || ix >= s.w as isize {
                            0.0
                        } else {
                            src[ix as usize]
                        };
                    }
                }
            }
        }
    }
}

/// Transpose of [`im2col`]: scatter-adds a column matrix back into the image.
fn col2im(col: &[f32], s: &ConvShape, plane: &mut [f32]) {
    let n = s.ho * s.wo;
    for ci in 0..s.cin {
        let dst_plane = &mut plane[ci * s.h * s.w..(ci + 1) * s.h * s.w];
        for ky in 0..s.kh {
            for kx in 0..s.kw {
                let row = ((ci * s.kh + ky) * s.kw + kx) * n;
                for oy in 0..s.ho {
                    let iy = (oy * s.stride + ky) as isize - s.pad as isize;
                    if iy < 0 || iy >= s.h as isize {
                        continue;
                    }
                    let src = &col[row + oy * s.wo..row + (oy + 1) * s.wo];
                    let dst = &mut dst_plane[iy as usize * s.w..(iy as usize + 1) * s.w];
                    for (ox, v) in src.iter().enumerate() {
                        let ix = (ox * s.stride + kx) as isize - s.pad as isize;
                        if ix >= 0 && ix < s.w as isize {
                            dst[ix as usize] += v;
                        }
                    }
                }
            }
        }
    }
}

/// Cross-correlation (no kernel flip) with zero padding.
pub fn conv2d_forward(
    input: &Tensor,
    weight: &Tensor,
    bias: &Tensor,
    stride: usize,
    pad: usize,
) -> Result<Tensor> {
    ensure_finite("conv2d", input)?;
    ensure_finite("conv2d", weight)?;
    let s = conv_shape(input, weight, bias, stride, pad)?;
    let k = s.cin * s.kh * s.kw;
    let n = s.ho * s.wo;
    let mut out = vec![0.0f32; s.batch * s.cout * n];
    let in_plane = s.cin * s.h * s.w;

    out.par_chunks_mut(s.cout * n)
        .zip(input.data().par_chunks(in_plane))
        .for_each_init(
            || vec![0.0f32; k * n],
            |col, (out_b, in_b)| {
                im2col(in_b, &s, col);
                sgemm(s.cout, k, n, 1.0, weight.data(), col, 0.0, out_b);
                for c in 0..s.cout {
                    let bv = bias.data()[c];
                    for v in &mut out_b[c * n..(c + 1) * n] {
                        *v += bv;
                    }
                }
            },
        );
    Tensor::from_vec(vec![s.batch, s.cout, s.ho, s.wo], out)
}

pub struct ConvGrads {
    pub input: Vec<f32>,
    pub weight: Vec<f32>,
    pub bias: Vec<f32>,
}

pub fn conv2d_backward(
    input: &Tensor,
    weight: &Tensor,
    grad_out: &[f32],
    s: &ConvShape,
) -> ConvGrads {
    let k = s.cin * s.kh * s.kw;
    let n = s.ho * s.wo;
    let in_plane = s.cin * s.h * s.w;
    let mut g_input = vec![0.0f32; s.batch * in_plane];

    // per-image partials for the shared parameters, reduced in batch order
    let partials: Vec<(Vec<f32>, Vec<f64>)> = g_input
        .par_chunks_mut(in_plane)
        .zip(input.data().par_chunks(in_plane))
        .zip(grad_out.par_chunks(s.cout * n))
        .map_init(
            || (vec![0.0f32; k * n], vec![0.0f32; k * n]),
            |(col, gcol), ((gin_b, in_b), g_b)| {
                im2col(in_b, &s_clone(s), col);
                let mut gw = vec![0.0f32; s.cout * k];
                sgemm_bt(s.cout, n, k, 1.0, g_b, col, 0.0, &mut gw);
                sgemm_at(k, s.cout, n, 1.0, weight.data(), g_b, 0.0, gcol);
                col2im(gcol, &s_clone(s), gin_b);
                let mut gb = vec![0.0f64; s.cout];
                for c in 0..s.cout {
                    gb[c] = g_b[c * n..(c + 1) * n].iter().map(|&v| v as f64).sum();
                }
                (gw, gb)
            },
        )
        .collect();

    let mut g_weight = vec![0.0f32; s.cout * k];
    let mut g_bias64 = vec![0.0f64; s.cout];
    for (gw, gb) in &partials {
        for (acc, v) in g_weight.iter_mut().zip(gw) {
            *acc += v;
        }
        for (acc, v) in g_bias64.iter_mut().zip(gb) {
            *acc += v;
        }
    }
    ConvGrads {
        input: g_input,
        weight: g_weight,
        bias: g_bias64.into_iter().map(|v| v as f32).collect(),
    }
}

// ConvShape is plain data; cloning fields for the closure keeps borrowck happy.
fn s_clone(s: &ConvShape) -> ConvShape {
    ConvShape {
        batch: s.batch,
        cin: s.cin,
        h: s.h,
        w: s.w,
        cout: s.cout,
        kh: s.kh,
        kw: s.kw,
        stride: s.stride,
        pad: s.pad,
        ho: s.ho,
        wo: s.wo,
    }
}

/// Elementwise `max(x, slope * x)`.
pub fn leaky_relu_forward(x: &Tensor, slope: f32) -> Tensor {
    let data = x.data().iter().map(|&v| v.max(slope * v)).collect();
    Tensor::from_vec(x.shape().to_vec(), data).expect("shape preserved")
}

pub fn leaky_relu_backward(x: &Tensor, slope: f32, g: &[f32]) -> Vec<f32> {
    x.data()
        .iter()
        .zip(g)
        .map(|(&v, &gv)| if v > 0.0 { gv } else { gv * slope })
        .collect()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PoolMode {
    Max,
    Avg,
}

/// 2x2 pooling; halves both spatial extents. Max mode records argmax
/// positions (0..4) for the backward scatter.
pub fn pool2x2_forward(x: &Tensor, mode: PoolMode) -> Result<(Tensor, Vec<u8>)> {
    let (b, c, h, w) = x.dims4("pool2x2 input")?;
    if h % 2 != 0 || w % 2 != 0 {
        return Err(Error::invalid(
            "pool2x2",
            format!("extents {h}x{w} must be even; pad first"),
        ));
    }
    let (ho, wo) = (h / 2, w / 2);
    let mut out = vec![0.0f32; b * c * ho * wo];
    let mut argmax = if mode == PoolMode::Max {
        vec![0u8; out.len()]
    } else {
        Vec::new()
    };
    for bc in 0..b * c {
        let src = &x.data()[bc * h * w..(bc + 1) * h * w];
        let dst = &mut out[bc * ho * wo..(bc + 1) * ho * wo];
        for oy in 0..ho {
            for ox in 0..wo {
                let base = 2 * oy * w + 2 * ox;
                let quad = [src[base], src[base + 1], src[base + w], src[base + w + 1]];
                match mode {
                    PoolMode::Max => {
                        let mut best = 0usize;
                        for i in 1..4 {
                            if quad[i] > quad[best] {
                                best = i;
                            }
                        }
                        dst[oy * wo + ox] = quad[best];
                        argmax[bc * ho * wo + oy * wo + ox] = best as u8;
                    }
                    PoolMode::Avg => {
                        dst[oy * wo + ox] = 0.25 * (quad[0] + quad[1] + quad[2] + quad[3]);
                    }
                }
            }
        }
    }
    Ok((Tensor::from_vec(vec![b, c, ho, wo], out)?, argmax))
}

pub fn pool2x2_backward(
    x_shape: &[usize],
    mode: PoolMode,
    argmax: &[u8],
    g: &[f32],
) -> Vec<f32> {
    let (b, c, h, w) = (x_shape[0], x_shape[1], x_shape[2], x_shape[3]);
    let (ho, wo) = (h / 2, w / 2);
    let mut gx = vec![0.0f32; b * c * h * w];
    for bc in 0..b * c {
        let dst = &mut gx[bc * h * w..(bc + 1) * h * w];
        let src = &g[bc * ho * wo..(bc + 1) * ho * wo];
        for oy in 0..ho {
            for ox in 0..wo {
                let base = 2 * oy * w + 2 * ox;
                let gv = src[oy * wo + ox];
                match mode {
                    PoolMode::Max => {
                        let idx = argmax[bc * ho * wo + oy * wo + ox] as usize;
                        let off = [0, 1, w, w + 1][idx];
                        dst[base + off] += gv;
                    }
                    PoolMode::Avg => {
                        for off in [0, 1, w, w + 1] {
                            dst[base + off] += 0.25 * gv;
                        }
                    }
                }
            }
        }
    }
    gx
}

/// Catmull-Rom (a = -0.5) tap weights for the two factor-2 phases.
/// Output x maps to input (x + 0.5)/2 - 0.5, so even outputs sit at
/// fraction 0.75 and odd outputs at 0.25 past the base sample.
const CR_TAPS_075: [f32; 4] = [-0.023_437_5, 0.226_562_5, 0.867_187_5, -0.070_312_5];
const CR_TAPS_025: [f32; 4] = [-0.070_312_5, 0.867_187_5, 0.226_562_5, -0.023_437_5];

#[inline]
fn bicubic_taps(out_idx: usize) -> (isize, &'static [f32; 4]) {
    // returns (first source index relative to out_idx/2, taps)
    if out_idx % 2 == 0 {
        ((out_idx / 2) as isize - 2, &CR_TAPS_075)
    } else {
        ((out_idx / 2) as isize - 1, &CR_TAPS_025)
    }
}

fn upsample_row(src: &[f32], dst: &mut [f32]) {
    let n = src.len() as isize;
    for (o, d) in dst.iter_mut().enumerate() {
        let (base, taps) = bicubic_taps(o);
        let mut acc = 0.0f32;
        for (t, &wgt) in taps.iter().enumerate() {
            let i = (base + t as isize).clamp(0, n - 1) as usize;
            acc += wgt * src[i];
        }
        *d = acc;
    }
}

fn upsample_row_adjoint(g_dst: &[f32], g_src: &mut [f32]) {
    let n = g_src.len() as isize;
    for (o, &gv) in g_dst.iter().enumerate() {
        let (base, taps) = bicubic_taps(o);
        for (t, &wgt) in taps.iter().enumerate() {
            let i = (base + t as isize).clamp(0, n - 1) as usize;
            g_src[i] += wgt * gv;
        }
    }
}

/// Bicubic 2x upsampling, separable, edge-clamped; exact on constants.
pub fn bicubic2x_forward(x: &Tensor) -> Result<Tensor> {
    let (b, c, h, w) = x.dims4("upsample_bicubic input")?;
    if h < 2 || w < 2 {
        return Err(Error::invalid(
            "upsample_bicubic",
            format!("extents {h}x{w} must be >= 2"),
        ));
    }
    let (h2, w2) = (2 * h, 2 * w);
    let mut out = vec![0.0f32; b * c * h2 * w2];
    out.par_chunks_mut(h2 * w2)
        .zip(x.data().par_chunks(h * w))
        .for_each(|(dst, src)| {
            // horizontal pass
            let mut wide = vec![0.0f32; h * w2];
            for y in 0..h {
                upsample_row(&src[y * w..(y + 1) * w], &mut wide[y * w2..(y + 1) * w2]);
            }
            // vertical pass
            let mut col_src = vec![0.0f32; h];
            let mut col_dst = vec![0.0f32; h2];
            for xcol in 0..w2 {
                for y in 0..h {
                    col_src[y] = wide[y * w2 + xcol];
                }
                upsample_row(&col_src, &mut col_dst);
                for y in 0..h2 {
                    dst[y * w2 + xcol] = col_dst[y];
                }
            }
        });
    Tensor::from_vec(vec![b, c, h2, w2], out)
}

pub fn bicubic2x_backward(x_shape: &[usize], g: &[f32]) -> Vec<f32> {
    let (b, c, h, w) = (x_shape[0], x_shape[1], x_shape[2], x_shape[3]);
    let (h2, w2) = (2 * h, 2 * w);
    let mut gx = vec![0.0f32; b * c * h * w];
    gx.par_chunks_mut(h * w)
        .zip(g.par_chunks(h2 * w2))
        .for_each(|(gsrc, gdst)| {
            // adjoint of vertical pass
            let mut wide = vec![0.0f32; h * w2];
            let mut col_g = vec![0.0f32; h2];
            let mut col_acc = vec![0.0f32; h];
            for xcol in 0..w2 {
                for y in 0..h2 {
                    col_g[y] = gdst[y * w2 + xcol];
                }
                col_acc.fill(0.0);
                upsample_row_adjoint(&col_g, &mut col_acc);
                for y in 0..h {
                    wide[y * w2 + xcol] = col_acc[y];
                }
            }
            // adjoint of horizontal pass
            for y in 0..h {
                upsample_row_adjoint(&wide[y * w2..(y + 1) * w2], &mut gsrc[y * w..(y + 1) * w]);
            }
        });
    gx
}

/// Affine map per batch row: `out[b] = W x[b] + bias`.
pub fn linear_forward(x: &Tensor, weight: &Tensor, bias: &Tensor) -> Result<Tensor> {
    ensure_finite("linear", x)?;
    let (b, n) = x.dims2("linear input")?;
    let (m, wn) = weight.dims2("linear weight")?;
    if wn != n || bias.shape() != [m] {
        return Err(Error::shape(
            "linear",
            format!(
                "input [{b},{n}] weight [{m},{wn}] bias {:?} are inconsistent",
                bias.shape()
            ),
        ));
    }
    let mut out = vec![0.0f32; b * m];
    sgemm_bt(b, n, m, 1.0, x.data(), weight.data(), 0.0, &mut out);
    for row in out.chunks_mut(m) {
        for (v, bv) in row.iter_mut().zip(bias.data()) {
            *v += bv;
        }
    }
    Tensor::from_vec(vec![b, m], out)
}

pub struct LinearGrads {
    pub input: Vec<f32>,
    pub weight: Vec<f32>,
    pub bias: Vec<f32>,
}

pub fn linear_backward(x: &Tensor, weight: &Tensor, g: &[f32]) -> LinearGrads {
    let (b, n) = (x.shape()[0], x.shape()[1]);
    let m = weight.shape()[0];
    let mut gx = vec![0.0f32; b * n];
    sgemm(b, m, n, 1.0, g, weight.data(), 0.0, &mut gx);
    let mut gw = vec![0.0f32; m * n];
    sgemm_at(m, b, n, 1.0, g, x.data(), 0.0, &mut gw);
    let mut gb = vec![0.0f64; m];
    for row in g.chunks(m) {
        for (acc, &v) in gb.iter_mut().zip(row) {
            *acc += v as f64;
        }
    }
    LinearGrads {
        input: gx,
        weight: gw,
        bias: gb.into_iter().map(|v| v as f32).collect(),
    }
}

/// Per-channel spatial mean: `[B,C,H,W] -> [B,C,1,1]`.
pub fn global_avg_pool_forward(x: &Tensor) -> Result<Tensor> {
    let (b, c, h, w) = x.dims4("global_avg_pool input")?;
    let hw = h * w;
    let mut out = vec![0.0f32; b * c];
    for (o, plane) in out.iter_mut().zip(x.data().chunks(hw)) {
        *o = (plane.iter().map(|&v| v as f64).sum::<f64>() / hw as f64) as f32;
    }
    Tensor::from_vec(vec![b, c, 1, 1], out)
}

pub fn global_avg_pool_backward(x_shape: &[usize], g: &[f32]) -> Vec<f32> {
    let hw = x_shape[2] * x_shape[3];
    let scale = 1.0 / hw as f32;
    let mut gx = vec![0.0f32; x_shape.iter().product()];
    for (gx_plane, &gv) in gx.chunks_mut(hw).zip(g) {
        gx_plane.fill(gv * scale);
    }
    gx
}

pub struct BatchNormSaved {
    pub xhat: Vec<f32>,
    pub inv_std: Vec<f32>,
}

/// Training-mode batch normalization over batch and spatial dims,
/// per channel. Updates running statistics in place (momentum 0.1,
/// unbiased variance for the running estimate).
#[allow(clippy::too_many_arguments)]
pub fn batchnorm_train_forward(
    x: &Tensor,
    gamma: &Tensor,
    beta: &Tensor,
    eps: f32,
    momentum: f32,
    running_mean: &mut [f32],
    running_var: &mut [f32],
) -> Result<(Tensor, BatchNormSaved)> {
    let (b, c, h, w) = x.dims4("batchnorm input")?;
    if gamma.shape() != [c] || beta.shape() != [c] || running_mean.len() != c || running_var.len() != c {
        return Err(Error::shape(
            "batchnorm2d",
            format!("parameter lengths do not match {c} channels"),
        ));
    }
    if eps <= 0.0 {
        return Err(Error::invalid("batchnorm2d", "eps must be > 0"));
    }
    let hw = h * w;
    let n = b * hw;
    let mut out = vec![0.0f32; x.numel()];
    let mut xhat = vec![0.0f32; x.numel()];
    let mut inv_std = vec![0.0f32; c];
    for ch in 0..c {
        let mut sum = 0.0f64;
        let mut sumsq = 0.0f64;
        for bi in 0..b {
            let plane = &x.data()[(bi * c + ch) * hw..(bi * c + ch + 1) * hw];
            for &v in plane {
                sum += v as f64;
                sumsq += (v as f64) * (v as f64);
            }
        }
        let mean = sum / n as f64;
        let var = (sumsq / n as f64 - mean * mean).max(0.0);
        let istd = 1.0 / (var + eps as f64).sqrt();
        inv_std[ch] = istd as f32;
        let g = gamma.data()[ch];
        let be = beta.data()[ch];
        for bi in 0..b {
            let base = (bi * c + ch) * hw;
            for i in 0..hw {
                let xh = ((x.data()[base + i] as f64 - mean) * istd) as f32;
                xhat[base + i] = xh;
                out[base + i] = g * xh + be;
            }
        }
        let unbiased = if n > 1 { var * n as f64 / (n - 1) as f64 } else { var };
        running_mean[ch] = (1.0 - momentum) * running_mean[ch] + momentum * mean as f32;
        running_var[ch] = (1.0 - momentum) * running_var[ch] + momentum * unbiased as f32;
    }
    Ok((
        Tensor::from_vec(x.shape().to_vec(), out)?,
        BatchNormSaved { xhat, inv_std },
    ))
}

/// Inference-mode batch normalization with running statistics.
pub fn batchnorm_eval_forward(
    x: &Tensor,
    gamma: &Tensor,
    beta: &Tensor,
    eps: f32,
    running_mean: &[f32],
    running_var: &[f32],
) -> Result<Tensor> {
    let (b, c, h, w) = x.dims4("batchnorm input")?;
    let hw = h * w;
    let mut out = vec![0.0f32; x.numel()];
    for ch in 0..c {
        let istd = 1.0 / (running_var[ch] + eps).sqrt();
        let g = gamma.data()[ch] * istd;
        let off = beta.data()[ch] - running_mean[ch] * g;
        for bi in 0..b {
            let base = (bi * c + ch) * hw;
            for i in 0..hw {
                out[base + i] = g * x.data()[base + i] + off;
            }
        }
    }
    Tensor::from_vec(x.shape().to_vec(), out)
}

pub struct BatchNormGrads {
    pub input: Vec<f32>,
    pub gamma: Vec<f32>,
    pub beta: Vec<f32>,
}

pub fn batchnorm_backward(
    x_shape: &[usize],
    gamma: &Tensor,
    saved: &BatchNormSaved,
    g: &[f32],
) -> BatchNormGrads {
    let (b, c, h, w) = (x_shape[0], x_shape[1], x_shape[2], x_shape[3]);
    let hw = h * w;
    let n = (b * hw) as f64;
    let mut gx = vec![0.0f32; g.len()];
    let mut dgamma = vec![0.0f32; c];
    let mut dbeta = vec![0.0f32; c];
    for ch in 0..c {
        let mut s1 = 0.0f64; // sum g * xhat
        let mut s2 = 0.0f64; // sum g
        for bi in 0..b {
            let base = (bi * c + ch) * hw;
            for i in 0..hw {
                s1 += (g[base + i] * saved.xhat[base + i]) as f64;
                s2 += g[base + i] as f64;
            }
        }
        dgamma[ch] = s1 as f32;
        dbeta[ch] = s2 as f32;
        let scale = gamma.data()[ch] as f64 * saved.inv_std[ch] as f64;
        for bi in 0..b {
            let base = (bi * c + ch) * hw;
            for i in 0..hw {
                let term =
                    g[base + i] as f64 - (s2 + saved.xhat[base + i] as f64 * s1) / n;
                gx[base + i] = (scale * term) as f32;
            }
        }
    }
    BatchNormGrads {
        input: gx,
        gamma: dgamma,
        beta: dbeta,
    }
}

/// Training-mode dropout: zero a fraction `p`, scale survivors by 1/(1-p).
pub fn dropout_forward(
    x: &Tensor,
    p: f32,
    rng: &mut impl rand::Rng,
) -> Result<(Tensor, Vec<u8>, f32)> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::invalid("dropout", format!("p = {p} outside [0, 1)")));
    }
    let scale = 1.0 / (1.0 - p);
    let mut mask = vec![0u8; x.numel()];
    let mut out = vec![0.0f32; x.numel()];
    for i in 0..x.numel() {
        let keep = rng.random::<f32>() >= p;
        mask[i] = keep as u8;
        out[i] = if keep { x.data()[i] * scale } else { 0.0 };
    }
    Ok((Tensor::from_vec(x.shape().to_vec(), out)?, mask, scale))
}

pub fn dropout_backward(mask: &[u8], scale: f32, g: &[f32]) -> Vec<f32> {
    mask.iter()
        .zip(g)
        .map(|(&m, &gv)| if m == 1 { gv * scale } else { 0.0 })
        .collect()
}

/// Elementwise logistic, clamped just inside (0, 1) so downstream logs and
/// ratios stay finite in f32.
pub fn sigmoid_forward(x: &Tensor) -> Tensor {
    let data = x
        .data()
        .iter()
        .map(|&v| (1.0 / (1.0 + (-v).exp())).clamp(1e-6, 1.0 - 1e-6))
        .collect();
    Tensor::from_vec(x.shape().to_vec(), data).expect("shape preserved")
}

pub fn sigmoid_backward(y: &Tensor, g: &[f32]) -> Vec<f32> {
    y.data()
        .iter()
        .zip(g)
        .map(|(&yv, &gv)| gv * yv * (1.0 - yv))
        .collect()
}

/// Huber-style loss, mean over elements.
pub fn smooth_l1_forward(pred: &Tensor, target: &Tensor, beta: f32) -> Result<Tensor> {
    if pred.shape() != target.shape() {
        return Err(Error::shape(
            "smooth_l1",
            format!("{:?} vs {:?}", pred.shape(), target.shape()),
        ));
    }
    if beta <= 0.0 {
        return Err(Error::invalid("smooth_l1", "beta must be > 0"));
    }
    let mut acc = 0.0f64;
    for (&p, &t) in pred.data().iter().zip(target.data()) {
        let d = (p - t) as f64;
        let b = beta as f64;
        acc += if d.abs() < b {
            0.5 * d * d / b
        } else {
            d.abs() - 0.5 * b
        };
    }
    let mean = acc / pred.numel() as f64;
    Tensor::from_vec(vec![1], vec![mean as f32])
}

pub fn smooth_l1_backward(pred: &Tensor, target: &Tensor, beta: f32, g: f32) -> (Vec<f32>, Vec<f32>) {
    let n = pred.numel() as f32;
    let gp: Vec<f32> = pred
        .data()
        .iter()
        .zip(target.data())
        .map(|(&p, &t)| {
            let d = p - t;
            let inner = if d.abs() < beta { d / beta } else { d.signum() };
            g * inner / n
        })
        .collect();
    let gt = gp.iter().map(|&v| -v).collect();
    (gp, gt)
}

/// `[B,C,H,W] + [B,C]` broadcast add over the spatial dims.
pub fn add_channel_bias_forward(x: &Tensor, bias: &Tensor) -> Result<Tensor> {
    let (b, c, h, w) = x.dims4("add_channel_bias input")?;
    if bias.shape() != [b, c] {
        return Err(Error::shape(
            "add_channel_bias",
            format!("bias {:?} does not match [{b},{c}]", bias.shape()),
        ));
    }
    let hw = h * w;
    let mut out = x.data().to_vec();
    for (plane, &bv) in out.chunks_mut(hw).zip(bias.data()) {
        for v in plane {
            *v += bv;
        }
    }
    Tensor::from_vec(x.shape().to_vec(), out)
}

pub fn add_channel_bias_backward(x_shape: &[usize], g: &[f32]) -> (Vec<f32>, Vec<f32>) {
    let hw = x_shape[2] * x_shape[3];
    let gb: Vec<f32> = g
        .chunks(hw)
        .map(|plane| plane.iter().map(|&v| v as f64).sum::<f64>() as f32)
        .collect();
    (g.to_vec(), gb)
}
