//! Adaptive rational activation functions of type (d, 1), built as the
//! Laurent-Pade approximant to a seed function with a single pole outside
//! the unit circle.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::laurent::{compute_coefficients, ContourSamples};
use crate::numkit::{self, CMat};

/// Which entire numerator the seed uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhiKind {
    Cos,
    One,
}

impl PhiKind {
    pub fn eval(self, z: C64) -> C64 {
        match self {
            PhiKind::Cos => z.cos(),
            PhiKind::One => C64::new(1.0, 0.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PhiKind::Cos => "cos",
            PhiKind::One => "one",
        }
    }
}

/// Seed function `omega(z) = phi(z) / (z - z0)`, `|z0| > 1`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SeedFunction {
    pub phi: PhiKind,
    pub z0: C64,
}

impl SeedFunction {
    pub fn new(phi: PhiKind, z0: C64) -> Result<Self> {
        if z0.norm() <= 1.0 {
            return Err(Error::Validation(format!(
                "seed pole must lie outside the unit circle, got |z0| = {}",
                z0.norm()
            )));
        }
        Ok(SeedFunction { phi, z0 })
    }

    pub fn eval(&self, z: C64) -> C64 {
        self.phi.eval(z) / (z - self.z0)
    }
}

/// Marker value returned when a rational evaluation lands on its pole.
pub fn infinity_marker() -> C64 {
    C64::new(f64::INFINITY, f64::INFINITY)
}

/// Rational function of type (len(alpha)-1, 1):
/// `r(z) = (sum_j alpha[j] z^j) / (gamma0 + gamma1 z)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Activation {
    pub alpha: Vec<C64>,
    pub gamma0: C64,
    pub gamma1: C64,
}

impl Activation {
    /// The activation's pole `-gamma0 / gamma1`.
    pub fn pole(&self) -> C64 {
        -self.gamma0 / self.gamma1
    }

    pub fn num_degree(&self) -> usize {
        self.alpha.len() - 1
    }
}

/// Build the activation by sampling the seed on the unit circle at
/// `2 * n_samples` points, taking the Taylor window of the seed, and solving
/// the 1 x 2 Toeplitz null-vector problem for the denominator.
///
/// The gamma vector is unit-norm with its phase fixed so that gamma1 is real
/// negative (gamma0 real positive in the degenerate gamma1 = 0 case); the
/// choice pins the otherwise-free sign of the reported hidden-layer weights.
pub fn build_activation(seed: &SeedFunction, num_degree: usize, n_samples: usize) -> Result<Activation> {
    if n_samples < num_degree + 2 {
        return Err(Error::Validation(format!(
            "need n_samples >= num_degree + 2 ({} < {})",
            n_samples,
            num_degree + 2
        )));
    }
    let samples = ContourSamples::from_function(|z| seed.eval(z), 1.0, n_samples)?;
    let w = compute_coefficients(&samples)?;
    // Taylor window c_0 .. c_{num_degree + 1}
    let cpos: Vec<C64> = (0..=(num_degree as i64 + 1)).map(|k| w.coeff(k)).collect();
    let cnorm = numkit::norm2(&cpos);
    let t = CMat::from_rows(vec![vec![cpos[num_degree + 1], cpos[num_degree]]])?;
    if t.data.iter().all(|z| z.norm() <= 1e-14 * cnorm) {
        return Err(Error::Numerical(
            "seed function degenerate at this degree".into(),
        ));
    }
    let svd = numkit::svd(&t)?;
    let mut gamma = svd.null_right_vector();
    if gamma[1].norm() > 1e-300 {
        let phase = -gamma[1].conj() / gamma[1].norm();
        gamma[0] *= phase;
        gamma[1] *= phase;
    } else if gamma[0].norm() > 0.0 {
        let phase = gamma[0].conj() / gamma[0].norm();
        gamma[0] *= phase;
        gamma[1] *= phase;
    }
    // alpha_k = sum_{j=0..min(k,1)} c_{k-j} gamma_j, k = 0..num_degree
    let alpha = numkit::conv_prefix(&cpos, &gamma, num_degree + 1);
    Ok(Activation { alpha, gamma0: gamma[0], gamma1: gamma[1] })
}

/// Evaluate the activation; at the pole the infinity marker is returned.
pub fn eval_activation(a: &Activation, z: C64) -> C64 {
    let den = a.gamma0 + a.gamma1 * z;
    if den.norm() == 0.0 {
        return infinity_marker();
    }
    numkit::polyval(&a.alpha, z) / den
}
