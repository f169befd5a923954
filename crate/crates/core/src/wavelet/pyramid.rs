//! Separable 2-D transform: rows then columns per level, recursing on LL.

use super::lifting::{dwt1d, dwt1d_adjoint, idwt1d, idwt1d_adjoint};
use crate::{Error, ImageGrid, Result};

/// One decomposition level's detail subbands.
///
/// Orientation convention after transforming rows (x) then columns (y):
/// `hl` = high x / low y, `lh` = low x / high y, `hh` = high both.
#[derive(Debug, Clone)]
pub struct DetailBands {
    pub lh: ImageGrid,
    pub hl: ImageGrid,
    pub hh: ImageGrid,
}

/// Multi-level decomposition: coarse LL plus per-level details,
/// `details[0]` being the finest level.
#[derive(Debug, Clone)]
pub struct SubbandPyramid {
    pub levels: usize,
    pub ll: ImageGrid,
    pub details: Vec<DetailBands>,
}

impl SubbandPyramid {
    /// Total coefficient count across all subbands.
    pub fn coefficient_count(&self) -> usize {
        let mut n = self.ll.pixels().len();
        for d in &self.details {
            n += d.lh.pixels().len() + d.hl.pixels().len() + d.hh.pixels().len();
        }
        n
    }

    pub fn detail_energy(&self) -> f64 {
        self.details
            .iter()
            .flat_map(|d| [&d.lh, &d.hl, &d.hh])
            .flat_map(|g| g.pixels())
            .map(|c| c * c)
            .sum()
    }
}

fn column(img: &ImageGrid, x: usize) -> Vec<f64> {
    (0..img.height()).map(|y| img.get(x, y)).collect()
}

fn set_column(img: &mut ImageGrid, x: usize, col: &[f64]) {
    for (y, &v) in col.iter().enumerate() {
        img.set(x, y, v);
    }
}

/// One analysis level: returns `(ll, lh, hl, hh)`.
fn transform_once(img: &ImageGrid) -> Result<(ImageGrid, ImageGrid, ImageGrid, ImageGrid)> {
    let (w, h) = (img.width(), img.height());
    let (wa, wd) = (w.div_ceil(2), w / 2);
    let (ha, hd) = (h.div_ceil(2), h / 2);

    let mut row_l = ImageGrid::zeros(wa, h);
    let mut row_h = ImageGrid::zeros(wd, h);
    for y in 0..h {
        let (a, d) = dwt1d(img.row(y))?;
        row_l.pixels_mut()[y * wa..(y + 1) * wa].copy_from_slice(&a);
        row_h.pixels_mut()[y * wd..(y + 1) * wd].copy_from_slice(&d);
    }

    let mut ll = ImageGrid::zeros(wa, ha);
    let mut lh = ImageGrid::zeros(wa, hd);
    for x in 0..wa {
        let (a, d) = dwt1d(&column(&row_l, x))?;
        set_column(&mut ll, x, &a);
        set_column(&mut lh, x, &d);
    }
    let mut hl = ImageGrid::zeros(wd, ha);
    let mut hh = ImageGrid::zeros(wd, hd);
    for x in 0..wd {
        let (a, d) = dwt1d(&column(&row_h, x))?;
        set_column(&mut hl, x, &a);
        set_column(&mut hh, x, &d);
    }
    Ok((ll, lh, hl, hh))
}

/// One synthesis level.
fn inverse_once(ll: &ImageGrid, bands: &DetailBands) -> Result<ImageGrid> {
    let wa = ll.width();
    let wd = bands.hl.width();
    let h = ll.height() + bands.lh.height();

    let mut row_l = ImageGrid::zeros(wa, h);
    for x in 0..wa {
        let col = idwt1d(&column(ll, x), &column(&bands.lh, x))?;
        set_column(&mut row_l, x, &col);
    }
    let mut row_h = ImageGrid::zeros(wd, h);
    for x in 0..wd {
        let col = idwt1d(&column(&bands.hl, x), &column(&bands.hh, x))?;
        set_column(&mut row_h, x, &col);
    }

    let w = wa + wd;
    let mut out = ImageGrid::zeros(w, h);
    for y in 0..h {
        let row = idwt1d(row_l.row(y), row_h.row(y))?;
        out.pixels_mut()[y * w..(y + 1) * w].copy_from_slice(&row);
    }
    Ok(out)
}

fn check_levels(width: usize, height: usize, levels: usize) -> Result<()> {
    if levels < 1 {
        return Err(Error::invalid("dwt2d", "levels must be >= 1"));
    }
    let need = 1usize << levels;
    if width < need || height < need {
        return Err(Error::ImageTooSmall {
            width,
            height,
            levels,
        });
    }
    Ok(())
}

/// Multi-level 2-D analysis.
pub fn dwt2d(image: &ImageGrid, levels: usize) -> Result<SubbandPyramid> {
    check_levels(image.width(), image.height(), levels)?;
    let mut ll = image.clone();
    let mut details = Vec::with_capacity(levels);
    for _ in 0..levels {
        let (next_ll, lh, hl, hh) = transform_once(&ll)?;
        details.push(DetailBands { lh, hl, hh });
        ll = next_ll;
    }
    Ok(SubbandPyramid { levels, ll, details })
}

/// Multi-level 2-D synthesis.
pub fn idwt2d(pyramid: &SubbandPyramid) -> Result<ImageGrid> {
    let mut ll = pyramid.ll.clone();
    for bands in pyramid.details.iter().rev() {
        ll = inverse_once(&ll, bands)?;
    }
    Ok(ll)
}

/// Adjoint of one analysis level: subband gradients -> image gradient.
fn transform_once_adjoint(
    g_ll: &ImageGrid,
    g_bands: &DetailBands,
) -> Result<ImageGrid> {
    let wa = g_ll.width();
    let wd = g_bands.hl.width();
    let h = g_ll.height() + g_bands.lh.height();

    // adjoint of the column stage
    let mut g_row_l = ImageGrid::zeros(wa, h);
    for x in 0..wa {
        let col = dwt1d_adjoint(&column(g_ll, x), &column(&g_bands.lh, x))?;
        set_column(&mut g_row_l, x, &col);
    }
    let mut g_row_h = ImageGrid::zeros(wd, h);
    for x in 0..wd {
        let col = dwt1d_adjoint(&column(&g_bands.hl, x), &column(&g_bands.hh, x))?;
        set_column(&mut g_row_h, x, &col);
    }

    // adjoint of the row stage
    let w = wa + wd;
    let mut g_img = ImageGrid::zeros(w, h);
    for y in 0..h {
        let row = dwt1d_adjoint(g_row_l.row(y), g_row_h.row(y))?;
        g_img.pixels_mut()[y * w..(y + 1) * w].copy_from_slice(&row);
    }
    Ok(g_img)
}

/// Adjoint of one synthesis level: image gradient -> subband gradients.
///
/// The LL geometry at this level is `lh.width() x hl.height()`, so the
/// detail-band shapes determine everything.
fn inverse_once_adjoint(
    g_img: &ImageGrid,
    bands_shape: &DetailBands,
) -> Result<(ImageGrid, DetailBands)> {
    let wa = bands_shape.lh.width();
    let wd = bands_shape.hl.width();
    let ha = bands_shape.hl.height();
    let h = g_img.height();

    // adjoint of the row stage
    let mut g_row_l = ImageGrid::zeros(wa, h);
    let mut g_row_h = ImageGrid::zeros(wd, h);
    for y in 0..h {
        let (ga, gd) = idwt1d_adjoint(g_img.row(y));
        g_row_l.pixels_mut()[y * wa..(y + 1) * wa].copy_from_slice(&ga);
        g_row_h.pixels_mut()[y * wd..(y + 1) * wd].copy_from_slice(&gd);
    }

    // adjoint of the column stage
    let mut g_ll = ImageGrid::zeros(wa, ha);
    let mut g_lh = ImageGrid::zeros(wa, bands_shape.lh.height());
    for x in 0..wa {
        let (ga, gd) = idwt1d_adjoint(&column(&g_row_l, x));
        set_column(&mut g_ll, x, &ga);
        set_column(&mut g_lh, x, &gd);
    }
    let mut g_hl = ImageGrid::zeros(wd, bands_shape.hl.height());
    let mut g_hh = ImageGrid::zeros(wd, bands_shape.hh.height());
    for x in 0..wd {
        let (ga, gd) = idwt1d_adjoint(&column(&g_row_h, x));
        set_column(&mut g_hl, x, &ga);
        set_column(&mut g_hh, x, &gd);
    }
    Ok((
        g_ll,
        DetailBands {
            lh: g_lh,
            hl: g_hl,
            hh: g_hh,
        },
    ))
}

/// Adjoint of [`dwt2d`]. `pyramid_grad` carries the subband gradients; the
/// result has the original image geometry.
pub fn dwt2d_adjoint(pyramid_grad: &SubbandPyramid) -> Result<ImageGrid> {
    let mut g = pyramid_grad.ll.clone();
    for bands in pyramid_grad.details.iter().rev() {
        g = transform_once_adjoint(&g, bands)?;
    }
    Ok(g)
}

/// Adjoint of [`idwt2d`]. `shape` supplies the subband geometry (its values
/// are not read). Peels levels finest-first, mirroring synthesis order.
pub fn idwt2d_adjoint(g_image: &ImageGrid, shape: &SubbandPyramid) -> Result<SubbandPyramid> {
    let mut g = g_image.clone();
    let mut details = Vec::with_capacity(shape.levels);
    for bands_shape in &shape.details {
        let (g_ll, g_bands) = inverse_once_adjoint(&g, bands_shape)?;
        details.push(g_bands);
        g = g_ll;
    }
    Ok(SubbandPyramid {
        levels: shape.levels,
        ll: g,
        details,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;

    fn rand_image(w: usize, h: usize, seed: u64) -> ImageGrid {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        ImageGrid::from_fn(w, h, |_, _| rng.random_range(-1.0..1.0))
    }

    fn pyramid_dot(a: &SubbandPyramid, b: &SubbandPyramid) -> f64 {
        let mut acc: f64 = a
            .ll
            .pixels()
            .iter()
            .zip(b.ll.pixels())
            .map(|(x, y)| x * y)
            .sum();
        for (da, db) in a.details.iter().zip(&b.details) {
            for (ga, gb) in [(&da.lh, &db.lh), (&da.hl, &db.hl), (&da.hh, &db.hh)] {
                acc += ga
                    .pixels()
                    .iter()
                    .zip(gb.pixels())
                    .map(|(x, y)| x * y)
                    .sum::<f64>();
            }
        }
        acc
    }

    fn image_dot(a: &ImageGrid, b: &ImageGrid) -> f64 {
        a.pixels().iter().zip(b.pixels()).map(|(x, y)| x * y).sum()
    }

    #[test]
    fn constant_image_has_zero_details() {
        let img = ImageGrid::from_fn(32, 32, |_, _| 0.7);
        for levels in 1..=3 {
            let pyr = dwt2d(&img, levels).unwrap();
            assert!(pyr.detail_energy() < 1e-20, "levels {levels}");
        }
    }

    #[test]
    fn roundtrip_random_32x32_two_levels() {
        let img = rand_image(32, 32, 3);
        let pyr = dwt2d(&img, 2).unwrap();
        let back = idwt2d(&pyr).unwrap();
        let max_err = img
            .pixels()
            .iter()
            .zip(back.pixels())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        assert!(max_err < 1e-5, "max abs error {max_err}");
    }

    #[test]
    fn roundtrip_odd_sizes() {
        for (w, h, levels) in [(33, 47, 2), (50, 37, 3), (21, 64, 2)] {
            let img = rand_image(w, h, (w * h) as u64);
            let pyr = dwt2d(&img, levels).unwrap();
            let back = idwt2d(&pyr).unwrap();
            assert_eq!(back.width(), w);
            assert_eq!(back.height(), h);
            for (a, b) in img.pixels().iter().zip(back.pixels()) {
                assert!((a - b).abs() < 1e-9, "{w}x{h} levels {levels}");
            }
        }
    }

    #[test]
    fn subband_extents_follow_ceil_halving() {
        let img = rand_image(37, 21, 9);
        let pyr = dwt2d(&img, 2).unwrap();
        assert_eq!(pyr.details[0].hh.width(), 37 / 2);
        assert_eq!(pyr.details[0].lh.width(), 37usize.div_ceil(2));
        assert_eq!(pyr.details[1].lh.width(), 37usize.div_ceil(2).div_ceil(2));
        assert_eq!(pyr.ll.width(), 10);
        assert_eq!(pyr.ll.height(), 6);
        // boundary growth never loses coefficients
        assert!(pyr.coefficient_count() >= 37 * 21);
    }

    #[test]
    fn rejects_undersized_images() {
        let img = rand_image(8, 8, 1);
        assert!(dwt2d(&img, 3).is_ok());
        assert!(dwt2d(&img, 4).is_err());
    }

    #[test]
    fn matches_rows_then_columns_composition() {
        // definitional: one level equals dwt1d on rows, then on columns,
        // bit for bit.
        let img = rand_image(16, 12, 4);
        let pyr = dwt2d(&img, 1).unwrap();

        let (w, h) = (img.width(), img.height());
        let (wa, wd) = (w.div_ceil(2), w / 2);
        let mut row_l = ImageGrid::zeros(wa, h);
        let mut row_h = ImageGrid::zeros(wd, h);
        for y in 0..h {
            let (a, d) = dwt1d(img.row(y)).unwrap();
            row_l.pixels_mut()[y * wa..(y + 1) * wa].copy_from_slice(&a);
            row_h.pixels_mut()[y * wd..(y + 1) * wd].copy_from_slice(&d);
        }
        for x in 0..wa {
            let col: Vec<f64> = (0..h).map(|y| row_l.get(x, y)).collect();
            let (a, d) = dwt1d(&col).unwrap();
            for (y, v) in a.iter().enumerate() {
                assert_eq!(pyr.ll.get(x, y), *v);
            }
            for (y, v) in d.iter().enumerate() {
                assert_eq!(pyr.details[0].lh.get(x, y), *v);
            }
        }
        for x in 0..wd {
            let col: Vec<f64> = (0..h).map(|y| row_h.get(x, y)).collect();
            let (a, d) = dwt1d(&col).unwrap();
            for (y, v) in a.iter().enumerate() {
                assert_eq!(pyr.details[0].hl.get(x, y), *v);
            }
            for (y, v) in d.iter().enumerate() {
                assert_eq!(pyr.details[0].hh.get(x, y), *v);
            }
        }
    }

    #[test]
    fn dwt2d_adjoint_inner_product() {
        let img = rand_image(19, 26, 7);
        let pyr = dwt2d(&img, 2).unwrap();
        // random cotangent with the pyramid's geometry
        let mut seed = 100;
        let mut rand_like = |g: &ImageGrid| {
            seed += 1;
            rand_image(g.width(), g.height(), seed)
        };
        let cot = SubbandPyramid {
            levels: pyr.levels,
            ll: rand_like(&pyr.ll),
            details: pyr
                .details
                .iter()
                .map(|d| DetailBands {
                    lh: rand_like(&d.lh),
                    hl: rand_like(&d.hl),
                    hh: rand_like(&d.hh),
                })
                .collect(),
        };
        let lhs = pyramid_dot(&pyr, &cot);
        let back = dwt2d_adjoint(&cot).unwrap();
        let rhs = image_dot(&img, &back);
        assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn idwt2d_adjoint_inner_product() {
        let img = rand_image(24, 16, 8);
        let pyr = dwt2d(&img, 2).unwrap();
        let recon = idwt2d(&pyr).unwrap();
        let cot = rand_image(24, 16, 55);
        let lhs = image_dot(&recon, &cot);
        let g_pyr = idwt2d_adjoint(&cot, &pyr).unwrap();
        let rhs = pyramid_dot(&pyr, &g_pyr);
        assert!((lhs - rhs).abs() < 1e-9 * (1.0 + lhs.abs()));
    }
}
