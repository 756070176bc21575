//! Deterministic numerical kernels: complex FFT, SVD, least squares,
//! polynomial root-finding and evaluation.
//!
//! All operations are pure functions of their inputs and are safe to call
//! from multiple threads. The dense linear algebra is backed by the system
//! LAPACK; the FFT by `rustfft` (mixed radix, arbitrary lengths).

mod lapack;

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map(|v| v.len()).unwrap_or(0);
        if rows.iter().any(|v| v.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(CMat { rows: r, cols: c, data: rows.into_iter().flatten().collect() })
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.cols + j] = v;
    }

    /// Column `j` as a vector.
    pub fn col(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// self * other
    pub fn matmul(&self, other: &CMat) -> Result<CMat> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "matmul {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    pub fn has_nonfinite(&self) -> bool {
        self.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())
    }
}

/// Full singular value decomposition A = U diag(s) V^H.
#[derive(Debug, Clone)]
pub struct SvdResult {
    /// Nonincreasing, nonnegative.
    pub singular_values: Vec<f64>,
    /// rows x rows unitary, left vectors as columns.
    pub left_vectors: CMat,
    /// cols x cols unitary, right vectors as columns.
    pub right_vectors: CMat,
}

impl SvdResult {
    /// Right singular vector attached to the smallest singular value;
    /// for a wide m x n matrix (m < n) this is the numerical null direction.
    pub fn null_right_vector(&self) -> Vec<C64> {
        self.right_vectors.col(self.right_vectors.cols - 1)
    }
}

pub fn validate_finite(v: &[C64]) -> Result<()> {
    if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Validation("non-finite entry".into()));
    }
    Ok(())
}

pub fn norm2(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Unnormalized DFT: entry k = sum_j samples[j] * exp(-2 pi i j k / len).
pub fn fft(samples: &[C64]) -> Result<Vec<C64>> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let mut planner = FftPlanner::new();
    let plan = planner.plan_fft_forward(samples.len());
    let mut buf = samples.to_vec();
    plan.process(&mut buf);
    Ok(buf)
}

/// Inverse DFT via the conjugate trick, scaled by 1/len.
pub fn ifft(spectrum: &[C64]) -> Result<Vec<C64>> {
    let conj: Vec<C64> = spectrum.iter().map(|z| z.conj()).collect();
    let f = fft(&conj)?;
    let n = spectrum.len() as f64;
    Ok(f.into_iter().map(|z| z.conj() / n).collect())
}

/// Full SVD with both unitary factors.
pub fn svd(m: &CMat) -> Result<SvdResult> {
    if m.rows == 0 || m.cols == 0 {
        return Err(Error::Validation("empty matrix".into()));
    }
    if m.has_nonfinite() {
        return Err(Error::Validation("non-finite matrix entry".into()));
    }
    let (u, s, v) = lapack::svd_full(&m.data, m.rows, m.cols)?;
    Ok(SvdResult {
        singular_values: s,
        left_vectors: CMat { rows: m.rows, cols: m.rows, data: u },
        right_vectors: CMat { rows: m.cols, cols: m.cols, data: v },
    })
}

/// Least-squares minimizer of ||a x - b||_2 (minimum-norm when rank-deficient).
/// Returns (solution, achieved residual norm, rank_deficient flag).
pub fn least_squares(a: &CMat, b: &[C64]) -> Result<(Vec<C64>, f64, bool)> {
    if a.rows != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "least_squares: matrix has {} rows, rhs has {} entries",
            a.rows,
            b.len()
        )));
    }
    if a.rows < a.cols {
        return Err(Error::DimensionMismatch(format!(
            "least_squares: underdetermined system {}x{}",
            a.rows, a.cols
        )));
    }
    let (x, rank) = lapack::lstsq(&a.data, a.rows, a.cols, b)?;
    let mut resid2 = 0f64;
    for i in 0..a.rows {
        let mut acc = -b[i];
        for j in 0..a.cols {
            acc += a.get(i, j) * x[j];
        }
        resid2 += acc.norm_sqr();
    }
    Ok((x, resid2.sqrt(), rank < a.cols))
}

/// All roots (with multiplicity) of sum_k coeffs[k] z^k via companion-matrix
/// eigenvalues. Coefficients are constant-first.
pub fn polynomial_roots(coeffs: &[C64]) -> Result<Vec<C64>> {
    if coeffs.is_empty() {
        return Err(Error::Validation("empty coefficient vector".into()));
    }
    let lead = coeffs[coeffs.len() - 1];
    if lead.norm() == 0.0 {
        return Err(Error::Validation("degree collapse; trim first".into()));
    }
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    // companion of the monic polynomial; zgeev balances internally
    let mut comp = CMat::zeros(deg, deg);
    for i in 1..deg {
        comp.set(i, i - 1, C64::new(1.0, 0.0));
    }
    for i in 0..deg {
        comp.set(i, deg - 1, -coeffs[i] / lead);
    }
    lapack::eigenvalues(&comp.data, deg)
}

/// Horner evaluation of sum_k coeffs[k] z^k (constant-first).
pub fn polyval(coeffs: &[C64], z: C64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for &c in coeffs.iter().rev() {
        acc = acc * z + c;
    }
    acc
}

/// Convolution prefix: out[k] = sum_{j=0..min(k, b_len-1)} a[k-j] * b[j],
/// for k = 0..out_len. Used for the Pade numerator and activation numerator.
pub fn conv_prefix(a: &[C64], b: &[C64], out_len: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); out_len];
    for (k, slot) in out.iter_mut().enumerate() {
        let jmax = k.min(b.len().saturating_sub(1));
        for j in 0..=jmax {
            if k - j < a.len() {
                *slot += a[k - j] * b[j];
            }
        }
    }
    out
}
