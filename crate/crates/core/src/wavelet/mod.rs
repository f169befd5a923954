//! CDF 9/7 biorthogonal wavelet engine.
//!
//! Forward/inverse transforms run through the lifting scheme; an explicit
//! 9-tap convolution bank ([`FilterBank`]) cross-validates the lifting path
//! and carries the zero-padded filter layout. [`latent_roundtrip`] is the
//! transform the autoencoder applies in its latent space: analysis,
//! optional soft threshold of the detail subbands, synthesis.

mod bank;
mod lifting;
mod pyramid;

pub use bank::FilterBank;
pub use lifting::{
    dwt1d, dwt1d_adjoint, idwt1d, idwt1d_adjoint, lifting_coefficients, ALPHA, BETA, DELTA,
    GAMMA, ZETA,
};
pub use pyramid::{dwt2d, dwt2d_adjoint, idwt2d, idwt2d_adjoint, DetailBands, SubbandPyramid};

use crate::{ImageGrid, Result};

#[inline]
fn soft(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

fn threshold_details(pyramid: &mut SubbandPyramid, shrink: f64) {
    if shrink <= 0.0 {
        return;
    }
    for bands in &mut pyramid.details {
        for grid in [&mut bands.lh, &mut bands.hl, &mut bands.hh] {
            for v in grid.pixels_mut() {
                *v = soft(*v, shrink);
            }
        }
    }
}

/// Latent-space transform: `idwt2d(soft_threshold(dwt2d(x)))`.
///
/// With `shrink == 0` this is the analysis/synthesis roundtrip, an identity
/// up to rounding; positive `shrink` soft-thresholds every detail subband,
/// which is where the layer's denoising action lives.
pub fn latent_roundtrip(plane: &ImageGrid, levels: usize, shrink: f64) -> Result<ImageGrid> {
    let mut pyr = dwt2d(plane, levels)?;
    threshold_details(&mut pyr, shrink);
    idwt2d(&pyr)
}

/// Exact gradient of [`latent_roundtrip`].
///
/// The lifting steps are affine and the soft threshold is piecewise linear,
/// so the chain `dwt2d^T ∘ mask ∘ idwt2d^T` is the true vector-Jacobian
/// product. The mask is recomputed from the forward coefficients.
pub fn latent_roundtrip_backward(
    plane: &ImageGrid,
    g_out: &ImageGrid,
    levels: usize,
    shrink: f64,
) -> Result<ImageGrid> {
    let fwd_pyr = dwt2d(plane, levels)?;
    let mut g_pyr = idwt2d_adjoint(g_out, &fwd_pyr)?;
    if shrink > 0.0 {
        for (gb, fb) in g_pyr.details.iter_mut().zip(&fwd_pyr.details) {
            for (g, f) in [
                (&mut gb.lh, &fb.lh),
                (&mut gb.hl, &fb.hl),
                (&mut gb.hh, &fb.hh),
            ] {
                for (gv, fv) in g.pixels_mut().iter_mut().zip(f.pixels()) {
                    if fv.abs() <= shrink {
                        *gv = 0.0;
                    }
                }
            }
        }
    }
    dwt2d_adjoint(&g_pyr)
}

/// Robust noise estimate: median absolute deviation of the finest HH
/// subband scaled by 1/0.6745. Used to parameterize the baseline denoisers
/// when the true sigma is unknown.
pub fn estimate_noise_sigma(image: &ImageGrid) -> Result<f64> {
    let pyr = dwt2d(image, 1)?;
    let mut mags: Vec<f64> = pyr.details[0].hh.pixels().iter().map(|c| c.abs()).collect();
    mags.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if mags.is_empty() {
        0.0
    } else if mags.len() % 2 == 1 {
        mags[mags.len() / 2]
    } else {
        0.5 * (mags[mags.len() / 2 - 1] + mags[mags.len() / 2])
    };
    Ok(median / 0.6745)
}
