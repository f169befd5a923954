//! Desk-scale laboratory for denoising neutron aperture images.
//!
//! The pipeline synthesizes ground-truth penumbral/pinhole images with a
//! disc ⊛ Gaussian forward model, corrupts them with Gaussian or mixed
//! Gaussian-Poisson noise, denoises them with a wavelet-latent convolutional
//! autoencoder and classical baselines (Gaussian, Wiener, BM3D stage 1), and
//! scores every method with edge-preservation and source-recovery metrics.
//!
//! Module map:
//! - [`tensor`]: dense n-D arrays with reverse-mode gradients and Adam.
//! - [`wavelet`]: CDF 9/7 lifting transform, subband pyramids, latent layer.
//! - [`forward_model`]: aperture rendering, noise synthesis, dataset generation.
//! - [`autoencoder`]: the denoising model, its training loop, checkpoints.
//! - [`baselines`]: Gaussian filter, adaptive Wiener filter, BM3D-S1.
//! - [`metrics`]: noise characterization, edge profiles, fidelity scores,
//!   Wiener–Tikhonov deconvolution, evaluation reports.
//! - [`io`]: raster formats, INI run configuration, ROI extraction.
//! - [`plot`]: minimal raster plotting for report panels.

pub mod autoencoder;
pub mod baselines;
pub mod error;
pub mod forward_model;
pub mod grid;
pub mod io;
pub mod metrics;
pub mod plot;
pub mod rng;
pub mod tensor;
pub mod wavelet;

pub use error::{Error, Result};
pub use grid::ImageGrid;
