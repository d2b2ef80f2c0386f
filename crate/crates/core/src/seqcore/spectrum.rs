//! Discrete Fourier power spectra for short integer sequences.
//!
//! Lengths in this crate never exceed a few dozen entries, so the transform
//! is a direct table-driven DFT: the twiddle factors are computed once per
//! length and each bin costs `len` multiply-adds.

use std::f64::consts::TAU;

use super::Symmetry;

#[derive(Debug, Clone)]
pub struct SpectrumPlan {
    len: usize,
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl SpectrumPlan {
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "spectrum of an empty sequence");
        let (cos, sin) = (0..len)
            .map(|j| {
                let theta = TAU * j as f64 / len as f64;
                (theta.cos(), theta.sin())
            })
            .unzip();
        SpectrumPlan { len, cos, sin }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// `|sum_j x_j exp(2 pi i j k / len)|^2`.
    pub fn psd(&self, entries: &[i8], k: usize) -> f64 {
        debug_assert_eq!(entries.len(), self.len);
        let (mut re, mut im) = (0.0, 0.0);
        let mut idx = 0;
        let step = k % self.len;
        for &x in entries {
            let x = f64::from(x);
            re += x * self.cos[idx];
            im += x * self.sin[idx];
            idx += step;
            if idx >= self.len {
                idx -= self.len;
            }
        }
        re * re + im * im
    }

    /// Fills `out[k]` for `k < out.len()`; callers usually pass
    /// `(len + 1) / 2` bins since the spectrum of a real sequence is
    /// symmetric.
    pub fn psd_into(&self, entries: &[i8], out: &mut [f64]) {
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = self.psd(entries, k);
        }
    }

    pub fn psd_vec(&self, entries: &[i8]) -> Vec<f64> {
        let mut out = vec![0.0; self.len];
        self.psd_into(entries, &mut out);
        out
    }
}

/// Largest value in the spectrum, over the non-redundant half of the bins.
pub fn max_psd(plan: &SpectrumPlan, entries: &[i8]) -> f64 {
    (0..=plan.len() / 2).map(|k| plan.psd(entries, k)).fold(0.0, f64::max)
}

/// Spectra of rows given as half-row masks (entry 0 is `+1`, the upper half
/// mirrored by the symmetry class). The transform of such a row is
/// `1 + 2 sum x_i cos` (symmetric) or `1 + 2i sum x_i sin` (skew), so each
/// bin needs one real sum over the half row; it is assembled from tables
/// indexed by the bytes of the mask.
#[derive(Debug, Clone)]
pub struct MaskSpectrum {
    symmetry: Symmetry,
    bins: usize,
    chunks: usize,
    /// `tables[(chunk * 256 + byte) * bins + k]`.
    tables: Vec<f64>,
}

impl MaskSpectrum {
    /// Tables for rows of odd length `n` (at most 129) and bins `0..bins`.
    pub fn new(n: usize, symmetry: Symmetry, bins: usize) -> Self {
        assert!(n % 2 == 1 && n <= 129, "unsupported row length {n}");
        let half = (n - 1) / 2;
        let chunks = half.div_ceil(8);
        let mut tables = vec![0.0; chunks * 256 * bins];
        for chunk in 0..chunks {
            for byte in 0..256usize {
                let slot = &mut tables[(chunk * 256 + byte) * bins..][..bins];
                for bit in 0..8 {
                    let i = chunk * 8 + bit + 1;
                    if i > half {
                        break;
                    }
                    let x = if byte >> bit & 1 == 1 { 1.0 } else { -1.0 };
                    for (k, v) in slot.iter_mut().enumerate() {
                        let theta = TAU * ((i * k) % n) as f64 / n as f64;
                        *v += x * match symmetry {
                            Symmetry::Symmetric => theta.cos(),
                            Symmetry::Skew => theta.sin(),
                        };
                    }
                }
            }
        }
        MaskSpectrum {
            symmetry,
            bins,
            chunks,
            tables,
        }
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    /// Writes the first `bins` spectrum values of the row into `out`.
    pub fn psd_into(&self, mask: u64, out: &mut [f64]) {
        let out = &mut out[..self.bins];
        out.fill(0.0);
        for chunk in 0..self.chunks {
            let byte = (mask >> (8 * chunk) & 0xff) as usize;
            let row = &self.tables[(chunk * 256 + byte) * self.bins..][..self.bins];
            for (o, v) in out.iter_mut().zip(row) {
                *o += v;
            }
        }
        for o in out.iter_mut() {
            *o = match self.symmetry {
                Symmetry::Symmetric => (1.0 + 2.0 * *o) * (1.0 + 2.0 * *o),
                Symmetry::Skew => 1.0 + 4.0 * *o * *o,
            };
        }
    }
}
