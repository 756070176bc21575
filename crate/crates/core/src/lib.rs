//! Construction of shallow complex-valued networks with rational ("unsafe
//! Pade") activation functions from Laurent coefficient data, without
//! backpropagation.
//!
//! The pipeline runs: contour samples -> FFT Laurent window -> Toeplitz-SVD
//! degree detection -> one rational activation per component -> closed-form
//! hidden layer -> least-squares output layer. The hidden-layer parameters
//! scale and shift the activation's pole onto the function's singularities,
//! so pole locations fall out of the fitted weights. A spectral lab applies
//! the same machinery to the Fourier coefficients of a nonlinear PDE's
//! solution and follows its complex singularities through blow-up.

pub mod activation;
pub mod error;
pub mod funcs;
pub mod laurent;
pub mod network;
pub mod numkit;
pub mod pade;
pub mod pdelab;
pub mod pipeline;

pub use error::{Error, Result};
pub use num_complex::Complex64;
