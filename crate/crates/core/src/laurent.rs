//! Laurent coefficients of a function from equispaced samples on a circular
//! contour, the aliasing-based accuracy estimate, and the two one-sided
//! coefficient windows consumed by the degree-estimation stage.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit;

/// Values of `f` at the points `rho * exp(2 pi i j / len)`, `j = 0..len-1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ContourSamples {
    pub rho: f64,
    pub values: Vec<C64>,
}

impl ContourSamples {
    pub fn new(rho: f64, values: Vec<C64>) -> Result<Self> {
        if rho <= 0.0 || !rho.is_finite() {
            return Err(Error::Validation(format!("contour radius must be positive, got {rho}")));
        }
        if values.is_empty() {
            return Err(Error::EmptySamples);
        }
        if values.len() % 2 != 0 {
            return Err(Error::Validation(format!(
                "sample count must be even, got {}",
                values.len()
            )));
        }
        numkit::validate_finite(&values)?;
        Ok(ContourSamples { rho, values })
    }

    /// Sample a closed-form function at `2n` equispaced contour points.
    pub fn from_function<F: Fn(C64) -> C64>(f: F, rho: f64, n: usize) -> Result<Self> {
        let m = 2 * n;
        let values = (0..m)
            .map(|j| f(C64::from_polar(rho, 2.0 * std::f64::consts::PI * j as f64 / m as f64)))
            .collect();
        ContourSamples::new(rho, values)
    }

    pub fn n(&self) -> usize {
        self.values.len() / 2
    }
}

/// The window `c_k`, `k = -n..n`, of Laurent coefficients on `|z| = rho`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LaurentWindow {
    pub n: usize,
    pub rho: f64,
    /// `coeffs[k + n]` holds `c_k`.
    coeffs: Vec<C64>,
}

impl LaurentWindow {
    /// `c_k`; indices outside the window read as zero.
    pub fn coeff(&self, k: i64) -> C64 {
        let n = self.n as i64;
        if k < -n || k > n {
            return C64::new(0.0, 0.0);
        }
        self.coeffs[(k + n) as usize]
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    /// 2-norm of the full two-sided window.
    pub fn full_norm(&self) -> f64 {
        numkit::norm2(&self.coeffs)
    }
}

/// Algorithm: single DFT, then `c_k = rho^{-k}/(2n) * fhat[k mod 2n]`.
pub fn compute_coefficients(s: &ContourSamples) -> Result<LaurentWindow> {
    let m = s.values.len();
    let n = m / 2;
    let fhat = numkit::fft(&s.values)?;
    let mut coeffs = vec![C64::new(0.0, 0.0); 2 * n + 1];
    for k in -(n as i64)..=(n as i64) {
        let idx = if k >= 0 { k as usize } else { (2 * n as i64 + k) as usize };
        let scale = s.rho.powi(-k as i32) / m as f64;
        coeffs[(k + n as i64) as usize] = fhat[idx] * scale;
    }
    Ok(LaurentWindow { n, rho: s.rho, coeffs })
}

/// Aliasing-based error estimate: given samples at `2n` points and a refined
/// set at `4n` points on the same contour, estimate
/// `|c_k - c_k^{(2n)}| ~ rho^{-k}/(2n) * |fhat^{(4n)}[k + 2n]|` for `k = -n..n`.
/// Returns the estimates indexed like a window (`out[k + n]`).
pub fn estimate_error(s2n: &ContourSamples, s4n: &ContourSamples) -> Result<Vec<f64>> {
    if (s2n.rho - s4n.rho).abs() > 1e-12 * s2n.rho {
        return Err(Error::Validation(format!(
            "contour radii differ: {} vs {}",
            s2n.rho, s4n.rho
        )));
    }
    if s4n.values.len() != 2 * s2n.values.len() {
        return Err(Error::Validation(format!(
            "refined sample count {} is not twice the base count {}",
            s4n.values.len(),
            s2n.values.len()
        )));
    }
    let n = s2n.n() as i64;
    let fhat4 = numkit::fft(&s4n.values)?;
    let mut out = Vec::with_capacity((2 * n + 1) as usize);
    for k in -n..=n {
        let idx = (k + 2 * n) as usize;
        let est = s2n.rho.powi(-k as i32) / (2 * n) as f64 * fhat4[idx].norm();
        out.push(est);
    }
    Ok(out)
}

/// One-sided windows for the degree estimation:
/// `c_plus = (c_0/2, c_1, ..., c_{n1p+m1p})`,
/// `c_minus = (c_0/2, c_{-1}, ..., c_{-(n1m+m1m)})`.
pub fn split_windows(
    w: &LaurentWindow,
    n1_plus: usize,
    m1_plus: usize,
    n1_minus: usize,
    m1_minus: usize,
) -> Result<(Vec<C64>, Vec<C64>)> {
    let need = (n1_plus + m1_plus).max(n1_minus + m1_minus);
    if w.n < need {
        return Err(Error::Validation(format!(
            "coefficient window has n = {} but the degree bounds need n >= {} \
             (shortfall {})",
            w.n,
            need,
            need - w.n
        )));
    }
    let half = w.coeff(0) / 2.0;
    let mut plus = Vec::with_capacity(n1_plus + m1_plus + 1);
    plus.push(half);
    for k in 1..=(n1_plus + m1_plus) as i64 {
        plus.push(w.coeff(k));
    }
    let mut minus = Vec::with_capacity(n1_minus + m1_minus + 1);
    minus.push(half);
    for k in 1..=(n1_minus + m1_minus) as i64 {
        minus.push(w.coeff(-k));
    }
    Ok((plus, minus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn constant_function() {
        let s = ContourSamples::from_function(|_| c(5.0, 0.0), 0.8, 16).unwrap();
        let w = compute_coefficients(&s).unwrap();
        assert!((w.coeff(0) - c(5.0, 0.0)).norm() < 1e-13);
        for k in 1..=16i64 {
            assert!(w.coeff(k).norm() < 1e-13 && w.coeff(-k).norm() < 1e-13);
        }
    }

    #[test]
    fn identity_function() {
        let s = ContourSamples::from_function(|z| z, 1.0, 8).unwrap();
        let w = compute_coefficients(&s).unwrap();
        assert!((w.coeff(1) - c(1.0, 0.0)).norm() < 1e-14);
        for k in -8i64..=8 {
            if k != 1 {
                assert!(w.coeff(k).norm() < 1e-14, "k={k}");
            }
        }
    }

    #[test]
    fn geometric_series_pole_at_two() {
        // 1/(z-2) = -sum_k z^k / 2^{k+1}; aliasing error ~ 2^{-(2n-k)}
        let s = ContourSamples::from_function(|z| (z - c(2.0, 0.0)).inv(), 1.0, 16).unwrap();
        let w = compute_coefficients(&s).unwrap();
        assert!((w.coeff(0) - c(-0.5, 0.0)).norm() < 1e-9);
        assert!((w.coeff(1) - c(-0.25, 0.0)).norm() < 1e-9);
        for k in 0..=8i64 {
            let expect = -2f64.powi(-(k as i32 + 1));
            let alias = 2f64.powi(-(32 - k as i32));
            assert!((w.coeff(k) - c(expect, 0.0)).norm() < 10.0 * alias + 1e-13, "k={k}");
        }
    }

    #[test]
    fn out_of_window_reads_zero() {
        let s = ContourSamples::from_function(|z| z, 1.0, 4).unwrap();
        let w = compute_coefficients(&s).unwrap();
        assert_eq!(w.coeff(5), c(0.0, 0.0));
        assert_eq!(w.coeff(-100), c(0.0, 0.0));
    }

    #[test]
    fn rejects_odd_and_bad_rho() {
        assert!(ContourSamples::new(1.0, vec![c(1.0, 0.0); 3]).is_err());
        assert!(ContourSamples::new(-0.5, vec![c(1.0, 0.0); 4]).is_err());
        assert!(ContourSamples::new(0.0, vec![c(1.0, 0.0); 4]).is_err());
    }

    #[test]
    fn error_estimate_trig_polynomial_tiny() {
        // f(z) = z is exactly representable below the cutoff
        let s2 = ContourSamples::from_function(|z| z, 1.0, 8).unwrap();
        let s4 = ContourSamples::from_function(|z| z, 1.0, 16).unwrap();
        let est = estimate_error(&s2, &s4).unwrap();
        assert!(est.iter().all(|&e| e < 1e-14));
    }

    #[test]
    fn error_estimate_within_factor_ten_of_truth() {
        // 1/(z-2) at n = 16: true aliasing error known from the geometric series
        let f = |z: C64| (z - c(2.0, 0.0)).inv();
        let s2 = ContourSamples::from_function(f, 1.0, 16).unwrap();
        let s4 = ContourSamples::from_function(f, 1.0, 32).unwrap();
        let w = compute_coefficients(&s2).unwrap();
        let est = estimate_error(&s2, &s4).unwrap();
        for k in [0i64, 4, 8] {
            let exact = c(-2f64.powi(-(k as i32 + 1)), 0.0);
            let true_err = (w.coeff(k) - exact).norm();
            let e = est[(k + 16) as usize];
            assert!(e <= 10.0 * true_err && e >= true_err / 10.0, "k={k}: est {e} true {true_err}");
        }
    }

    #[test]
    fn error_estimate_shrinks_with_n() {
        let f = |z: C64| (z - c(2.0, 0.0)).inv();
        let mut prev = f64::INFINITY;
        for n in [8usize, 16, 32] {
            let s2 = ContourSamples::from_function(f, 1.0, n).unwrap();
            let s4 = ContourSamples::from_function(f, 1.0, 2 * n).unwrap();
            let est = estimate_error(&s2, &s4).unwrap();
            let maxest = est.iter().cloned().fold(0.0, f64::max);
            assert!(maxest < prev, "n={n}");
            prev = maxest;
        }
    }

    #[test]
    fn error_estimate_rejects_mismatch() {
        let s2 = ContourSamples::from_function(|z| z, 1.0, 8).unwrap();
        let s4 = ContourSamples::from_function(|z| z, 0.9, 16).unwrap();
        assert!(estimate_error(&s2, &s4).is_err());
        let s4b = ContourSamples::from_function(|z| z, 1.0, 12).unwrap();
        assert!(estimate_error(&s2, &s4b).is_err());
    }

    #[test]
    fn split_halves_central_coefficient() {
        let s = ContourSamples::from_function(|_| c(4.0, 0.0), 1.0, 8).unwrap();
        let w = compute_coefficients(&s).unwrap();
        let (p, m) = split_windows(&w, 1, 1, 1, 1).unwrap();
        assert!((p[0] - c(2.0, 0.0)).norm() < 1e-13);
        assert!((m[0] - c(2.0, 0.0)).norm() < 1e-13);
        assert_eq!(p.len(), 3);
        assert_eq!(m.len(), 3);
    }

    #[test]
    fn split_identity_function() {
        let s = ContourSamples::from_function(|z| z, 1.0, 8).unwrap();
        let w = compute_coefficients(&s).unwrap();
        let (p, m) = split_windows(&w, 2, 2, 2, 2).unwrap();
        assert!((p[1] - c(1.0, 0.0)).norm() < 1e-13);
        assert!(p[0].norm() < 1e-13 && p[2].norm() < 1e-13);
        assert!(m.iter().all(|z| z.norm() < 1e-13));
    }

    #[test]
    fn split_window_lengths_for_large_bounds() {
        let s = ContourSamples::from_function(|z| z, 0.99, 150).unwrap();
        let w = compute_coefficients(&s).unwrap();
        let (p, m) = split_windows(&w, 70, 70, 70, 70).unwrap();
        assert_eq!(p.len(), 141);
        assert_eq!(m.len(), 141);
    }

    #[test]
    fn split_names_shortfall() {
        let s = ContourSamples::from_function(|z| z, 1.0, 4).unwrap();
        let w = compute_coefficients(&s).unwrap();
        let err = split_windows(&w, 4, 4, 1, 1).unwrap_err();
        assert!(err.to_string().contains("shortfall 4"), "{err}");
    }

    #[test]
    fn split_conserves_data() {
        let s = ContourSamples::from_function(|z| (z - c(2.0, 0.0)).inv() + z.inv(), 1.0, 16)
            .unwrap();
        let w = compute_coefficients(&s).unwrap();
        let (p, m) = split_windows(&w, 5, 5, 5, 5).unwrap();
        // undo the c0/2 split: p[0] + m[0] = c0, and every other entry matches
        assert!((p[0] + m[0] - w.coeff(0)).norm() < 1e-15);
        for k in 1..=10i64 {
            assert_eq!(p[k as usize], w.coeff(k));
            assert_eq!(m[k as usize], w.coeff(-k));
        }
    }

    #[test]
    fn radius_covariance_monomial() {
        for &rho in &[0.5, 0.99, 1.3] {
            for &p in &[2i32, 5] {
                let s = ContourSamples::from_function(|z| z.powi(p), rho, 16).unwrap();
                let w = compute_coefficients(&s).unwrap();
                assert!(
                    (w.coeff(p as i64) - c(1.0, 0.0)).norm() < 1e-12,
                    "rho={rho} p={p}"
                );
            }
        }
    }

    proptest! {
        #[test]
        fn prop_trig_polynomial_roundtrip(seed in 0u64..200) {
            // random trig polynomial of degree m < n recovered to 1e-12 relative
            let n = 12usize;
            let m = 1 + (seed % 8) as i64; // m <= 8 < 12
            let mut s = seed as f64 * 0.417 + 0.21;
            let mut next = move || { s = (s * 719.3).fract(); s - 0.5 };
            let coeffs: Vec<(i64, C64)> = (-m..=m).map(|k| (k, c(next(), next()))).collect();
            let f = |z: C64| {
                coeffs.iter().map(|&(k, ck)| ck * z.powi(k as i32)).sum::<C64>()
            };
            let samples = ContourSamples::from_function(f, 1.0, n).unwrap();
            let w = compute_coefficients(&samples).unwrap();
            let scale = coeffs.iter().map(|(_, ck)| ck.norm()).fold(0.0, f64::max);
            for &(k, ck) in &coeffs {
                prop_assert!((w.coeff(k) - ck).norm() <= 1e-12 * scale);
            }
        }
    }
}
