//! Synthetic ground truth and noise synthesis.
//!
//! Ground truth is an aperture disc rasterized with 4x4 subpixel area
//! sampling, convolved (same-size, zero padded) with a unit-integral Gaussian
//! source kernel, then max-normalized to peak 1.0. Two corruption models:
//! signal-scaled Gaussian noise, and Poisson counts formed over the
//! Gaussian-noised image.

use crate::io::raster;
use crate::rng::{streams, stream_rng, sub_seed};
use crate::{Error, ImageGrid, Result};
use rand_distr::Distribution;
use rayon::prelude::*;
use std::path::{Path, PathBuf};

/// Gaussian source distribution: the blur element of the forward model.
#[derive(Debug, Clone, Copy)]
pub struct SourceSpec {
    /// Blur width in pixels.
    pub sigma: f64,
    /// Dimensionless peak of the source image.
    pub amplitude: f64,
    /// Center in pixel coordinates.
    pub center: (f64, f64),
}

impl SourceSpec {
    pub fn centered(sigma: f64, size: (usize, usize)) -> Self {
        SourceSpec {
            sigma,
            amplitude: 1.0,
            center: ((size.0 as f64 - 1.0) / 2.0, (size.1 as f64 - 1.0) / 2.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ApertureKind {
    Pinhole,
    Penumbral,
}

impl std::fmt::Display for ApertureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ApertureKind::Pinhole => write!(f, "pinhole"),
            ApertureKind::Penumbral => write!(f, "penumbral"),
        }
    }
}

/// Disc aperture; penumbral when larger than the effective source extent
/// (3 sigma), pinhole when smaller.
#[derive(Debug, Clone, Copy)]
pub struct ApertureSpec {
    pub radius: f64,
    pub center: (f64, f64),
    pub kind: ApertureKind,
}

impl ApertureSpec {
    pub fn centered(radius: f64, kind: ApertureKind, size: (usize, usize)) -> Self {
        ApertureSpec {
            radius,
            center: ((size.0 as f64 - 1.0) / 2.0, (size.1 as f64 - 1.0) / 2.0),
            kind,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseModel {
    Gaussian,
    Mixed,
}

impl std::fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NoiseModel::Gaussian => write!(f, "gaussian"),
            NoiseModel::Mixed => write!(f, "mixed"),
        }
    }
}

/// How Poisson counts are rescaled back to intensities. The literal mode
/// divides by SNR once, which inflates the intensity scale by a factor of
/// SNR; the intensity-preserving mode divides by SNR^2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MixedRescale {
    #[default]
    IntensityPreserving,
    Literal,
}

#[derive(Debug, Clone, Copy)]
pub struct NoiseConfig {
    pub model: NoiseModel,
    pub snr: f64,
    pub seed: u64,
    pub rescale: MixedRescale,
}

impl NoiseConfig {
    pub fn gaussian(seed: u64) -> Self {
        NoiseConfig {
            model: NoiseModel::Gaussian,
            snr: 10.0,
            seed,
            rescale: MixedRescale::default(),
        }
    }

    pub fn mixed(seed: u64) -> Self {
        NoiseConfig {
            model: NoiseModel::Mixed,
            snr: 10.0,
            seed,
            rescale: MixedRescale::default(),
        }
    }
}

fn validate_specs(source: &SourceSpec, aperture: &ApertureSpec) -> Result<()> {
    if !(source.sigma > 0.0) {
        return Err(Error::invalid("forward_model", "source sigma must be > 0"));
    }
    if !(source.amplitude > 0.0) {
        return Err(Error::invalid("forward_model", "source amplitude must be > 0"));
    }
    if !(aperture.radius > 0.0) {
        return Err(Error::invalid("forward_model", "aperture radius must be > 0"));
    }
    let effective_source = 3.0 * source.sigma;
    let consistent = match aperture.kind {
        ApertureKind::Penumbral => aperture.radius > effective_source,
        ApertureKind::Pinhole => aperture.radius < effective_source,
    };
    if !consistent {
        return Err(Error::invalid(
            "forward_model",
            format!(
                "{} aperture of radius {} is inconsistent with effective source extent {}",
                aperture.kind, aperture.radius, effective_source
            ),
        ));
    }
    Ok(())
}

/// Aperture disc indicator rasterized with 4x4 subpixel area sampling.
pub fn render_disc(aperture: &ApertureSpec, size: (usize, usize)) -> ImageGrid {
    let (cx, cy) = aperture.center;
    let r2 = aperture.radius * aperture.radius;
    ImageGrid::from_fn(size.0, size.1, |x, y| {
        let mut hits = 0u32;
        for sy in 0..4 {
            for sx in 0..4 {
                let px = x as f64 + (sx as f64 + 0.5) / 4.0 - 0.5;
                let py = y as f64 + (sy as f64 + 0.5) / 4.0 - 0.5;
                let dx = px - cx;
                let dy = py - cy;
                if dx * dx + dy * dy <= r2 {
                    hits += 1;
                }
            }
        }
        hits as f64 / 16.0
    })
}

/// The Gaussian source image itself (the deconvolution target).
pub fn render_source(source: &SourceSpec, size: (usize, usize)) -> ImageGrid {
    let (cx, cy) = source.center;
    let inv = 1.0 / (2.0 * source.sigma * source.sigma);
    ImageGrid::from_fn(size.0, size.1, |x, y| {
        let dx = x as f64 - cx;
        let dy = y as f64 - cy;
        source.amplitude * (-(dx * dx + dy * dy) * inv).exp()
    })
}

fn gaussian_kernel_1d(sigma: f64) -> Vec<f64> {
    let radius = (3.0 * sigma).ceil().max(1.0) as usize;
    let mut k: Vec<f64> = (0..=2 * radius)
        .map(|i| {
            let d = i as f64 - radius as f64;
            (-d * d / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let sum: f64 = k.iter().sum();
    for v in &mut k {
        *v /= sum;
    }
    k
}

/// Separable same-size convolution with zero padding outside the frame.
fn convolve_separable_zero(img: &ImageGrid, kernel: &[f64]) -> ImageGrid {
    let radius = kernel.len() / 2;
    let (w, h) = (img.width(), img.height());
    // rows
    let mut tmp = ImageGrid::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, &kv) in kernel.iter().enumerate() {
                let xi = x as isize + i as isize - radius as isize;
                if xi >= 0 && (xi as usize) < w {
                    acc += kv * img.get(xi as usize, y);
                }
            }
            tmp.set(x, y, acc);
        }
    }
    // columns
    let mut out = ImageGrid::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let mut acc = 0.0;
            for (i, &kv) in kernel.iter().enumerate() {
                let yi = y as isize + i as isize - radius as isize;
                if yi >= 0 && (yi as usize) < h {
                    acc += kv * tmp.get(x, yi as usize);
                }
            }
            out.set(x, y, acc);
        }
    }
    out
}

/// Noiseless ground truth: disc ⊛ Gaussian, max-normalized to peak 1.0.
pub fn render_ground_truth(
    source: &SourceSpec,
    aperture: &ApertureSpec,
    size: (usize, usize),
) -> Result<ImageGrid> {
    validate_specs(source, aperture)?;
    let margin = 3.0 * source.sigma;
    let (cx, cy) = aperture.center;
    let fits = cx - aperture.radius - margin >= 0.0
        && cy - aperture.radius - margin >= 0.0
        && cx + aperture.radius + margin <= size.0 as f64 - 1.0
        && cy + aperture.radius + margin <= size.1 as f64 - 1.0;
    if !fits {
        return Err(Error::DiscOutsideFrame {
            radius: aperture.radius,
            margin,
            width: size.0,
            height: size.1,
        });
    }
    let disc = render_disc(aperture, size);
    let kernel = gaussian_kernel_1d(source.sigma);
    let blurred = convolve_separable_zero(&disc, &kernel);
    let peak = blurred.max();
    debug_assert!(peak > 0.0);
    Ok(blurred.scale(1.0 / peak))
}

/// Signal-scaled Gaussian corruption: `I_n = I_0 + RMS(I_0) * eps`,
/// `eps ~ N(0,1)` i.i.d. per pixel. An all-zero image passes through
/// unchanged (its RMS is zero).
pub fn add_gaussian_noise(clean: &ImageGrid, cfg: &NoiseConfig) -> Result<ImageGrid> {
    let rms = clean.rms();
    if rms == 0.0 {
        return Ok(clean.clone());
    }
    let mut rng = stream_rng(cfg.seed, streams::NOISE_GAUSSIAN, 0);
    let normal = rand_distr::Normal::new(0.0f64, 1.0).expect("unit normal");
    let pixels = clean
        .pixels()
        .iter()
        .map(|&p| p + rms * normal.sample(&mut rng))
        .collect();
    ImageGrid::from_pixels(clean.width(), clean.height(), pixels)
}

/// Poisson stage of the mixed model, applied over the Gaussian-noised image.
///
/// Negative pixels are clamped to zero before forming the Poisson mean
/// `lambda = SNR^2 * I / max(I)`; sampled counts are rescaled by
/// `max(I_0)/SNR^2` (intensity-preserving, default) or `max(I_0)/SNR`
/// (the literal printed form).
pub fn add_mixed_noise(
    gauss_noisy: &ImageGrid,
    clean: &ImageGrid,
    cfg: &NoiseConfig,
) -> Result<ImageGrid> {
    if cfg.model != NoiseModel::Mixed {
        return Err(Error::invalid(
            "add_mixed_noise",
            "noise model must be `mixed`",
        ));
    }
    if !(cfg.snr > 0.0) {
        return Err(Error::invalid("add_mixed_noise", "snr must be > 0"));
    }
    let clamped = gauss_noisy.map(|v| v.max(0.0));
    let max_i = clamped.max();
    if max_i <= 0.0 {
        return Err(Error::invalid(
            "add_mixed_noise",
            "max of the (clamped) input image is zero",
        ));
    }
    let max_i0 = clean.max();
    let scale = match cfg.rescale {
        MixedRescale::IntensityPreserving => max_i0 / (cfg.snr * cfg.snr),
        MixedRescale::Literal => max_i0 / cfg.snr,
    };
    let mut rng = stream_rng(cfg.seed, streams::NOISE_POISSON, 0);
    let lam_scale = cfg.snr * cfg.snr / max_i;
    let pixels = clamped
        .pixels()
        .iter()
        .map(|&v| {
            let lambda = v * lam_scale;
            let count = if lambda > 0.0 {
                rand_distr::Poisson::new(lambda)
                    .expect("positive lambda")
                    .sample(&mut rng)
            } else {
                0.0
            };
            count * scale
        })
        .collect();
    ImageGrid::from_pixels(clean.width(), clean.height(), pixels)
}

/// Applies the configured noise model end to end.
pub fn corrupt(clean: &ImageGrid, cfg: &NoiseConfig) -> Result<ImageGrid> {
    let g = add_gaussian_noise(clean, cfg)?;
    match cfg.model {
        NoiseModel::Gaussian => Ok(g),
        NoiseModel::Mixed => add_mixed_noise(&g, clean, cfg),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestRow {
    pub filename: String,
    pub seed: u64,
    pub noise_model: NoiseModel,
    pub snr: f64,
    pub source_sigma: f64,
    pub aperture_radius: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DatasetManifest {
    pub rows: Vec<ManifestRow>,
}

impl DatasetManifest {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["filename", "seed", "noise-model", "snr", "source-sigma", "aperture-radius"])?;
        for r in &self.rows {
            w.write_record([
                r.filename.as_str(),
                &r.seed.to_string(),
                &r.noise_model.to_string(),
                &r.snr.to_string(),
                &r.source_sigma.to_string(),
                &r.aperture_radius.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::Reader::from_path(path)?;
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let field = |i: usize| -> Result<&str> {
                rec.get(i).ok_or_else(|| Error::Config {
                    path: path.to_path_buf(),
                    detail: format!("manifest row missing column {i}"),
                })
            };
            let parse_err = |what: &str| Error::Config {
                path: path.to_path_buf(),
                detail: format!("bad {what} in manifest"),
            };
            rows.push(ManifestRow {
                filename: field(0)?.to_string(),
                seed: field(1)?.parse().map_err(|_| parse_err("seed"))?,
                noise_model: match field(2)? {
                    "gaussian" => NoiseModel::Gaussian,
                    "mixed" => NoiseModel::Mixed,
                    other => {
                        return Err(Error::Config {
                            path: path.to_path_buf(),
                            detail: format!("unknown noise model `{other}`"),
                        })
                    }
                },
                snr: field(3)?.parse().map_err(|_| parse_err("snr"))?,
                source_sigma: field(4)?.parse().map_err(|_| parse_err("source-sigma"))?,
                aperture_radius: field(5)?.parse().map_err(|_| parse_err("aperture-radius"))?,
            });
        }
        Ok(DatasetManifest { rows })
    }
}

/// Writes `n` noisy images plus the shared ground truth and a manifest with
/// per-image seeds. Deterministic given the config; images are independent,
/// so synthesis runs in parallel.
pub fn generate_dataset(
    n: usize,
    source: &SourceSpec,
    aperture: &ApertureSpec,
    cfg: &NoiseConfig,
    size: (usize, usize),
    out_dir: &Path,
) -> Result<DatasetManifest> {
    if n < 1 {
        return Err(Error::invalid("generate_dataset", "n must be >= 1"));
    }
    std::fs::create_dir_all(out_dir)?;
    let gt = render_ground_truth(source, aperture, size)?;
    raster::export_raster(&gt, &out_dir.join("ground_truth.nimg"))?;

    let rows: Vec<ManifestRow> = (0..n)
        .map(|i| ManifestRow {
            filename: format!("noisy_{i:05}.nimg"),
            seed: sub_seed(cfg.seed, streams::NOISE_GAUSSIAN, i as u64),
            noise_model: cfg.model,
            snr: cfg.snr,
            source_sigma: source.sigma,
            aperture_radius: aperture.radius,
        })
        .collect();

    let results: Vec<Result<PathBuf>> = rows
        .par_iter()
        .map(|row| {
            let per_image = NoiseConfig {
                seed: row.seed,
                ..*cfg
            };
            let noisy = corrupt(&gt, &per_image)?;
            let path = out_dir.join(&row.filename);
            raster::export_raster(&noisy, &path)?;
            Ok(path)
        })
        .collect();
    for r in results {
        r?;
    }

    let manifest = DatasetManifest { rows };
    manifest.write_csv(&out_dir.join("manifest.csv"))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn default_pair(size: (usize, usize)) -> (SourceSpec, ApertureSpec) {
        (
            SourceSpec::centered(6.0, size),
            ApertureSpec::centered(50.0, ApertureKind::Penumbral, size),
        )
    }

    #[test]
    fn kind_consistency_is_enforced() {
        let size = (256, 256);
        let src = SourceSpec::centered(8.0, size);
        let bad = ApertureSpec::centered(10.0, ApertureKind::Penumbral, size);
        assert!(render_ground_truth(&src, &bad, size).is_err());
        let good = ApertureSpec::centered(10.0, ApertureKind::Pinhole, size);
        assert!(render_ground_truth(&src, &good, size).is_ok());
    }

    #[test]
    fn disc_outside_frame_is_an_error() {
        let size = (128, 128);
        let src = SourceSpec::centered(6.0, size);
        let ap = ApertureSpec::centered(60.0, ApertureKind::Penumbral, size);
        match render_ground_truth(&src, &ap, size) {
            Err(Error::DiscOutsideFrame { .. }) => {}
            other => panic!("expected DiscOutsideFrame, got {other:?}"),
        }
    }

    #[test]
    fn sharp_source_limit_approximates_disc() {
        // sigma -> 0: interior ~ 1, exterior ~ 0
        let size = (128, 128);
        let src = SourceSpec::centered(0.25, size);
        let ap = ApertureSpec::centered(30.0, ApertureKind::Penumbral, size);
        let gt = render_ground_truth(&src, &ap, size).unwrap();
        let c = 63.5;
        assert!(gt.get(64, 64) > 0.999);
        for (x, y) in [(64usize, 64usize), (50, 50), (64, 40)] {
            let dx = x as f64 - c;
            let dy = y as f64 - c;
            assert!((dx * dx + dy * dy).sqrt() < 28.0, "probe must be interior");
            assert!(gt.get(x, y) > 0.99, "interior ({x},{y}) = {}", gt.get(x, y));
        }
        for (x, y) in [(5usize, 5usize), (64, 5), (120, 64)] {
            assert!(gt.get(x, y) < 1e-6, "exterior ({x},{y}) = {}", gt.get(x, y));
        }
    }

    #[test]
    fn centered_disc_is_rotationally_symmetric() {
        let size = (128, 128);
        let src = SourceSpec::centered(4.0, size);
        let ap = ApertureSpec::centered(25.0, ApertureKind::Penumbral, size);
        let gt = render_ground_truth(&src, &ap, size).unwrap();
        let rotated = gt.rotate90();
        for (a, b) in gt.pixels().iter().zip(rotated.pixels()) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn gaussian_noise_zero_image_passthrough() {
        let zero = ImageGrid::zeros(32, 32);
        let cfg = NoiseConfig::gaussian(1);
        let out = add_gaussian_noise(&zero, &cfg).unwrap();
        assert_eq!(out, zero);
    }

    #[test]
    fn gaussian_noise_std_tracks_rms() {
        let size = (334, 334); // > 1e5 pixels
        let (src, ap) = default_pair(size);
        let gt = render_ground_truth(&src, &ap, size).unwrap();
        let rms = gt.rms();
        let noisy = add_gaussian_noise(&gt, &NoiseConfig::gaussian(9)).unwrap();
        let n = gt.pixels().len() as f64;
        let var: f64 = noisy
            .pixels()
            .iter()
            .zip(gt.pixels())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            / n;
        let std = var.sqrt();
        assert!(
            (std / rms - 1.0).abs() < 0.02,
            "empirical std {std} vs rms {rms}"
        );
    }

    #[test]
    fn gaussian_noise_is_seed_deterministic() {
        let size = (64, 64);
        let src = SourceSpec::centered(2.0, size);
        let ap = ApertureSpec::centered(12.0, ApertureKind::Penumbral, size);
        let gt = render_ground_truth(&src, &ap, size).unwrap();
        let a = add_gaussian_noise(&gt, &NoiseConfig::gaussian(77)).unwrap();
        let b = add_gaussian_noise(&gt, &NoiseConfig::gaussian(77)).unwrap();
        assert_eq!(a, b);
        let c = add_gaussian_noise(&gt, &NoiseConfig::gaussian(78)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn noise_scales_with_signal_level() {
        // doubling I_0 doubles the noise std
        let size = (334, 334);
        let (src, ap) = default_pair(size);
        let gt = render_ground_truth(&src, &ap, size).unwrap();
        let doubled = gt.scale(2.0);
        let cfg = NoiseConfig::gaussian(5);
        let n1 = add_gaussian_noise(&gt, &cfg).unwrap();
        let n2 = add_gaussian_noise(&doubled, &cfg).unwrap();
        let std = |noisy: &ImageGrid, clean: &ImageGrid| -> f64 {
            let n = clean.pixels().len() as f64;
            (noisy
                .pixels()
                .iter()
                .zip(clean.pixels())
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                / n)
                .sqrt()
        };
        let r = std(&n2, &doubled) / std(&n1, &gt);
        assert!((r - 2.0).abs() < 0.05, "ratio {r}");
    }

    #[test]
    fn mixed_noise_rejects_zero_max() {
        let zero = ImageGrid::zeros(8, 8);
        let cfg = NoiseConfig::mixed(3);
        assert!(add_mixed_noise(&zero, &zero, &cfg).is_err());
    }

    #[test]
    fn mixed_noise_requires_mixed_model() {
        let img = ImageGrid::from_fn(8, 8, |_, _| 1.0);
        let cfg = NoiseConfig::gaussian(3);
        assert!(add_mixed_noise(&img, &img, &cfg).is_err());
    }

    #[test]
    fn mixed_noise_high_snr_limit_is_identity() {
        let size = (128, 128);
        let (src, ap) = {
            let s = SourceSpec::centered(4.0, size);
            let a = ApertureSpec::centered(25.0, ApertureKind::Penumbral, size);
            (s, a)
        };
        let gt = render_ground_truth(&src, &ap, size).unwrap();
        let cfg = NoiseConfig {
            snr: 1e4,
            ..NoiseConfig::mixed(13)
        };
        let out = add_mixed_noise(&gt, &gt, &cfg).unwrap();
        let num: f64 = out
            .pixels()
            .iter()
            .zip(gt.pixels())
            .map(|(a, b)| (a - b) * (a - b))
            .sum();
        let den: f64 = gt.pixels().iter().map(|v| v * v).sum();
        let rel_rms = (num / den).sqrt();
        assert!(rel_rms < 0.01, "relative rms {rel_rms}");
    }

    #[test]
    fn mixed_noise_expectation_matches_input() {
        // Poisson stage in isolation: E[out] == input, checked at the peak
        // over repeated draws.
        let size = (64, 64);
        let src = SourceSpec::centered(2.0, size);
        let ap = ApertureSpec::centered(12.0, ApertureKind::Penumbral, size);
        let gt = render_ground_truth(&src, &ap, size).unwrap();
        let peak_idx = {
            let mut best = 0;
            for (i, v) in gt.pixels().iter().enumerate() {
                if *v > gt.pixels()[best] {
                    best = i;
                }
            }
            best
        };
        let mut acc = 0.0;
        let reps = 1000;
        for rep in 0..reps {
            let cfg = NoiseConfig {
                seed: rep,
                ..NoiseConfig::mixed(0)
            };
            let out = add_mixed_noise(&gt, &gt, &cfg).unwrap();
            acc += out.pixels()[peak_idx];
        }
        let mean = acc / reps as f64;
        let expect = gt.pixels()[peak_idx];
        assert!(
            (mean / expect - 1.0).abs() < 0.03,
            "peak mean {mean} vs {expect}"
        );
    }

    #[test]
    fn dataset_generation_is_reproducible() {
        let dir = tempfile::tempdir().unwrap();
        let size = (64, 64);
        let src = SourceSpec::centered(2.0, size);
        let ap = ApertureSpec::centered(12.0, ApertureKind::Penumbral, size);
        let cfg = NoiseConfig::gaussian(42);
        let m1 = generate_dataset(3, &src, &ap, &cfg, size, dir.path()).unwrap();
        let bytes1 = std::fs::read(dir.path().join("noisy_00000.nimg")).unwrap();

        let dir2 = tempfile::tempdir().unwrap();
        let m2 = generate_dataset(3, &src, &ap, &cfg, size, dir2.path()).unwrap();
        let bytes2 = std::fs::read(dir2.path().join("noisy_00000.nimg")).unwrap();
        assert_eq!(m1, m2);
        assert_eq!(bytes1, bytes2, "same seed must give identical bytes");

        let cfg3 = NoiseConfig::gaussian(43);
        let dir3 = tempfile::tempdir().unwrap();
        generate_dataset(1, &src, &ap, &cfg3, size, dir3.path()).unwrap();
        let bytes3 = std::fs::read(dir3.path().join("noisy_00000.nimg")).unwrap();
        assert_ne!(bytes1, bytes3, "different seeds must differ");

        let manifest = DatasetManifest::read_csv(&dir.path().join("manifest.csv")).unwrap();
        assert_eq!(manifest, m1);
        assert_eq!(manifest.rows.len(), 3);
    }
}
