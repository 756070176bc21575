//! Named test functions shipped with the CLI for reproduction runs.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Poles of the 40-pole benchmark function, grouped by ring.
/// Returns (double poles at 0.8, simple inner poles, simple outer poles).
pub fn benchmark_poles() -> (Vec<C64>, Vec<C64>, Vec<C64>) {
    let pi = std::f64::consts::PI;
    let doubles: Vec<C64> = (1..=5)
        .map(|j| C64::from_polar(0.8, pi * j as f64 / 5.0))
        .collect();
    let mut inner: Vec<C64> = (1..=10)
        .map(|j| C64::from_polar(0.7, pi * j as f64 / 10.0))
        .collect();
    inner.extend((11..=20).map(|j| -C64::from_polar(0.9, pi * j as f64 / 10.0)));
    let mut outer: Vec<C64> = (1..=3)
        .map(|j| C64::from_polar(1.2, pi * (j + 5) as f64 / 10.0))
        .collect();
    outer.extend((4..=6).map(|j| -C64::from_polar(1.2, pi * (j + 5) as f64 / 10.0)));
    outer.extend((7..=10).map(|j| -C64::from_polar(1.2, -pi * (j + 5) as f64 / 10.0)));
    (doubles, inner, outer)
}

/// The 40-pole benchmark: cos(z) over five double poles at radius 0.8,
/// twenty simple poles at 0.7 and 0.9, and ten simple poles at 1.2.
pub fn benchmark_function(z: C64) -> C64 {
    let (doubles, inner, outer) = benchmark_poles();
    let mut out = z.cos();
    for p in doubles {
        let d = z - p;
        out /= d * d;
    }
    for p in inner.into_iter().chain(outer) {
        out /= z - p;
    }
    out
}

/// All distinct poles of the benchmark function with multiplicities.
pub fn benchmark_pole_multiset() -> Vec<(C64, usize)> {
    let (doubles, inner, outer) = benchmark_poles();
    let mut out: Vec<(C64, usize)> = doubles.into_iter().map(|p| (p, 2)).collect();
    out.extend(inner.into_iter().map(|p| (p, 1)));
    out.extend(outer.into_iter().map(|p| (p, 1)));
    out
}

/// Resolve a generator name to a closure. Available: `exfun` (the 40-pole
/// benchmark), `one_over_z_minus_2`, `one_over_z_minus_half`, and
/// `two_poles` (their sum).
pub fn named_function(name: &str) -> Result<Box<dyn Fn(C64) -> C64 + Send + Sync>> {
    match name {
        "exfun" => Ok(Box::new(benchmark_function)),
        "one_over_z_minus_2" => Ok(Box::new(|z: C64| (z - C64::new(2.0, 0.0)).inv())),
        "one_over_z_minus_half" => Ok(Box::new(|z: C64| (z - C64::new(0.5, 0.0)).inv())),
        "two_poles" => Ok(Box::new(|z: C64| {
            (z - C64::new(2.0, 0.0)).inv() + (z - C64::new(0.5, 0.0)).inv()
        })),
        other => Err(Error::Validation(format!("unknown test function '{other}'"))),
    }
}
