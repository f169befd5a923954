//! Explicit 9-tap convolution bank equivalent to the lifting transform.
//!
//! All four filters are stored in 9-slot arrays. The analysis high-pass and
//! synthesis low-pass have genuine support 7 and carry zeros at slots 0 and 8;
//! the analysis low-pass and synthesis high-pass use all 9 taps. Tap values
//! are derived from the lifting constants by impulse probing rather than
//! hard-coded, and the bank is cross-validated against the lifting path.

use super::lifting::{self, reflect};

#[derive(Debug, Clone)]
pub struct FilterBank {
    /// 9-tap analysis low-pass, offsets -4..=4 around the even sample.
    pub analysis_low: [f64; 9],
    /// Analysis high-pass: 7 real taps padded by zeros at slots 0 and 8.
    pub analysis_high: [f64; 9],
    /// Synthesis low-pass: 7 real taps padded by zeros at slots 0 and 8.
    pub synthesis_low: [f64; 9],
    /// 9-tap synthesis high-pass.
    pub synthesis_high: [f64; 9],
}

impl FilterBank {
    /// Derives the CDF 9/7 bank by probing the lifting transform with unit
    /// impulses on a long signal, far from both boundaries.
    pub fn cdf97() -> Self {
        let n = 64usize;
        let k = 16usize; // interior coefficient index probed

        // analysis low-pass: approx_k = sum_j al[j] * x[2k - 4 + j]
        let mut analysis_low = [0.0; 9];
        for (j, tap) in analysis_low.iter_mut().enumerate() {
            let mut x = vec![0.0; n];
            x[2 * k - 4 + j] = 1.0;
            let (approx, _) = lifting::dwt1d(&x).unwrap();
            *tap = approx[k];
        }

        // analysis high-pass: detail_k = sum_j ah[j] * x[2k + 1 - 4 + j]
        let mut analysis_high = [0.0; 9];
        for (j, tap) in analysis_high.iter_mut().enumerate() {
            let mut x = vec![0.0; n];
            x[2 * k + 1 - 4 + j] = 1.0;
            let (_, detail) = lifting::dwt1d(&x).unwrap();
            *tap = detail[k];
        }

        // synthesis filters: responses of the inverse transform to a unit
        // coefficient in the approximation / detail lane.
        let approx_len = n.div_ceil(2);
        let detail_len = n / 2;
        let mut synthesis_low = [0.0; 9];
        {
            let mut a = vec![0.0; approx_len];
            a[k] = 1.0;
            let x = lifting::idwt1d(&a, &vec![0.0; detail_len]).unwrap();
            for (j, tap) in synthesis_low.iter_mut().enumerate() {
                *tap = x[2 * k - 4 + j];
            }
        }
        let mut synthesis_high = [0.0; 9];
        {
            let mut d = vec![0.0; detail_len];
            d[k] = 1.0;
            let x = lifting::idwt1d(&vec![0.0; approx_len], &d).unwrap();
            for (j, tap) in synthesis_high.iter_mut().enumerate() {
                *tap = x[2 * k + 1 - 4 + j];
            }
        }

        FilterBank {
            analysis_low,
            analysis_high,
            synthesis_low,
            synthesis_high,
        }
    }

    /// Analysis by direct convolution with symmetric extension.
    pub fn dwt1d(&self, signal: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = signal.len();
        let approx_len = n.div_ceil(2);
        let detail_len = n / 2;
        let mut approx = vec![0.0; approx_len];
        let mut detail = vec![0.0; detail_len];
        for (k, a) in approx.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, &h) in self.analysis_low.iter().enumerate() {
                acc += h * signal[reflect(2 * k as isize - 4 + j as isize, n)];
            }
            *a = acc;
        }
        for (k, d) in detail.iter_mut().enumerate() {
            let mut acc = 0.0;
            for (j, &h) in self.analysis_high.iter().enumerate() {
                acc += h * signal[reflect(2 * k as isize + 1 - 4 + j as isize, n)];
            }
            *d = acc;
        }
        (approx, detail)
    }

    /// Synthesis by upsample-and-convolve. Boundary folding is not applied,
    /// so only interior samples (full filter support inside the signal) are
    /// exact; this path exists for cross-validation of the lifting transform.
    pub fn idwt1d(&self, approx: &[f64], detail: &[f64]) -> Vec<f64> {
        let n = approx.len() + detail.len();
        let mut out = vec![0.0; n];
        for (k, &a) in approx.iter().enumerate() {
            for (j, &g) in self.synthesis_low.iter().enumerate() {
                let i = 2 * k as isize - 4 + j as isize;
                if i >= 0 && (i as usize) < n {
                    out[i as usize] += g * a;
                }
            }
        }
        for (k, &d) in detail.iter().enumerate() {
            for (j, &g) in self.synthesis_high.iter().enumerate() {
                let i = 2 * k as isize + 1 - 4 + j as isize;
                if i >= 0 && (i as usize) < n {
                    out[i as usize] += g * d;
                }
            }
        }
        out
    }

    /// Maximum deviation from identity of analysis followed by synthesis on
    /// interior samples: the operational biorthogonality check.
    pub fn biorthogonality_error(&self) -> f64 {
        let n = 64;
        let mut worst: f64 = 0.0;
        for q in 12..n - 12 {
            let mut x = vec![0.0; n];
            x[q] = 1.0;
            let (a, d) = self.dwt1d(&x);
            let y = self.idwt1d(&a, &d);
            for i in 12..n - 12 {
                let expect = if i == q { 1.0 } else { 0.0 };
                worst = worst.max((y[i] - expect).abs());
            }
        }
        worst
    }
}
