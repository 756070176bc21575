//! Spectral lab for the Hilbert-transform Burgers analog: Fourier
//! coefficient ODE integration, time-dependent network fits in the
//! exponential variable, and complex-singularity tracking through blow-up.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::activation::infinity_marker;
use crate::error::{Error, Result};
use crate::network::ComponentSign;
use crate::numkit;
use crate::pipeline::{fit_windows, FitConfig, Model};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PdeConfig {
    pub eta: f64,
    pub nu: f64,
    pub beta: f64,
    /// Spectral cutoff: modes k = -n..n.
    pub n: usize,
    pub dt: f64,
    pub times: Vec<f64>,
}

impl PdeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.eta <= 0.0 || self.nu <= 0.0 || self.beta <= 0.0 {
            return Err(Error::Validation("eta, nu, beta must be positive".into()));
        }
        if self.dt <= 0.0 {
            return Err(Error::Validation("dt must be positive".into()));
        }
        if self.n == 0 {
            return Err(Error::Validation("spectral cutoff must be positive".into()));
        }
        Ok(())
    }

    /// The pole pair reaches the real axis at `-ln(beta) / eta`.
    pub fn blow_up_time(&self) -> f64 {
        -self.beta.ln() / self.eta
    }

    /// True singularity locations `+-i (eta t + ln beta)` in the principal strip.
    pub fn true_singularities(&self, t: f64) -> (C64, C64) {
        let y = self.eta * t + self.beta.ln();
        (C64::new(0.0, y), C64::new(0.0, -y))
    }
}

impl Default for PdeConfig {
    fn default() -> Self {
        PdeConfig {
            eta: 1.0,
            nu: 0.1,
            beta: (-0.25f64).exp(),
            n: 40,
            dt: 1e-3,
            times: (0..=10).map(|i| i as f64 * 0.1).collect(),
        }
    }
}

/// Closed-form solution extended to complex `z`:
/// `u(z,t) = eta + nu (1 - B^2) / (1 + B^2 - 2 B cos z)` with `B = beta e^{eta t}`.
pub fn exact_solution(cfg: &PdeConfig, z: C64, t: f64) -> C64 {
    let b = cfg.beta * (cfg.eta * t).exp();
    let den = C64::new(1.0 + b * b, 0.0) - 2.0 * b * z.cos();
    if den.norm() <= 1e-13 {
        return infinity_marker();
    }
    C64::new(cfg.eta, 0.0) + cfg.nu * (1.0 - b * b) / den
}

/// Fourier coefficients `a_k(t)`, `k = -n..n`, stored at offset `k + n`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralState {
    pub t: f64,
    pub n: usize,
    a: Vec<C64>,
}

impl SpectralState {
    pub fn coeff(&self, k: i64) -> C64 {
        let n = self.n as i64;
        if k < -n || k > n {
            return C64::new(0.0, 0.0);
        }
        self.a[(k + n) as usize]
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.a
    }

    /// `max_k |a_{-k} - conj(a_k)|`, the reality defect of the represented
    /// real-valued solution.
    pub fn reality_defect(&self) -> f64 {
        (0..=self.n as i64)
            .map(|k| (self.coeff(-k) - self.coeff(k).conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Build the state by sampling the closed-form solution at time `t` at
    /// `2n` equispaced grid points and applying one FFT (the Nyquist entry is
    /// split evenly between `k = n` and `k = -n`).
    pub fn from_exact(cfg: &PdeConfig, t: f64) -> Result<Self> {
        cfg.validate()?;
        let n = cfg.n;
        let m = 2 * n;
        let samples: Vec<C64> = (0..m)
            .map(|j| {
                let x = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                exact_solution(cfg, C64::new(x, 0.0), t)
            })
            .collect();
        if samples.iter().any(|v| !v.re.is_finite()) {
            return Err(Error::Numerical(format!(
                "exact solution singular on the sampling grid at t = {t}"
            )));
        }
        let fhat = numkit::fft(&samples)?;
        let mut a = vec![C64::new(0.0, 0.0); 2 * n + 1];
        let scale = 1.0 / m as f64;
        a[n] = fhat[0] * scale;
        for k in 1..n {
            a[n + k] = fhat[k] * scale;
            a[n - k] = fhat[2 * n - k] * scale;
        }
        a[2 * n] = fhat[n] * scale / 2.0;
        a[0] = a[2 * n].conj();
        Ok(SpectralState { t, n, a })
    }
}

/// Initial spectral data from the initial condition.
pub fn init_spectral(cfg: &PdeConfig) -> Result<SpectralState> {
    SpectralState::from_exact(cfg, 0.0)
}

fn rhs(a: &[C64], n: usize, cfg: &PdeConfig) -> Vec<C64> {
    let ni = n as i64;
    let mut out = vec![C64::new(0.0, 0.0); 2 * n + 1];
    for k in -ni..=ni {
        let mut conv = C64::new(0.0, 0.0);
        let jlo = (-ni).max(k - ni);
        let jhi = ni.min(k + ni);
        for j in jlo..=jhi {
            if j == 0 {
                continue;
            }
            let s = if j > 0 { 1.0 } else { -1.0 };
            conv += s * a[(j + ni) as usize] * a[(k - j + ni) as usize];
        }
        let ak = a[(k + ni) as usize];
        out[(k + ni) as usize] = -cfg.nu * (k * k) as f64 * ak + k as f64 * conv;
    }
    out
}

/// One classical RK4 step of the truncated coefficient ODE
/// `da_k/dt = -nu k^2 a_k + k sum_{j+l=k} sign(j) a_j a_l`.
pub fn step_ode(state: &SpectralState, dt: f64, cfg: &PdeConfig) -> Result<SpectralState> {
    if dt <= 0.0 {
        return Err(Error::Validation("dt must be positive".into()));
    }
    let n = state.n;
    let a = &state.a;
    let k1 = rhs(a, n, cfg);
    let stage = |base: &[C64], k: &[C64], h: f64| -> Vec<C64> {
        base.iter().zip(k).map(|(&b, &kk)| b + h * kk).collect()
    };
    let k2 = rhs(&stage(a, &k1, dt / 2.0), n, cfg);
    let k3 = rhs(&stage(a, &k2, dt / 2.0), n, cfg);
    let k4 = rhs(&stage(a, &k3, dt), n, cfg);
    let mut out = Vec::with_capacity(a.len());
    for i in 0..a.len() {
        out.push(a[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
    }
    if out.iter().any(|z| z.norm() > 1e12 || !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numerical(format!(
            "spectral blow-up: coefficient magnitude exceeded 1e12 near t = {}",
            state.t + dt
        )));
    }
    Ok(SpectralState { t: state.t + dt, n, a: out })
}

/// Integrate the ODE from `state.t` to `t_end` in steps of `cfg.dt`
/// (the interval must be a whole number of steps).
pub fn integrate_to(state: &SpectralState, t_end: f64, cfg: &PdeConfig) -> Result<SpectralState> {
    let span = t_end - state.t;
    if span < 0.0 {
        return Err(Error::Validation("cannot integrate backwards".into()));
    }
    let steps = (span / cfg.dt).round() as usize;
    if ((steps as f64 * cfg.dt) - span).abs() > 1e-9 {
        return Err(Error::Validation(format!(
            "interval {span} is not a whole number of dt = {} steps",
            cfg.dt
        )));
    }
    let mut cur = state.clone();
    for _ in 0..steps {
        cur = step_ode(&cur, cfg.dt, cfg)?;
    }
    cur.t = t_end;
    Ok(cur)
}

/// Where the time-dependent coefficients come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoefficientSource {
    /// Integrate the truncated coefficient ODE from t = 0.
    Ode,
    /// Sample the closed-form solution at each output time.
    Exact,
}

/// Fit the network to the state's Fourier coefficients: the plus window is
/// `(a_0/2, a_1, ..., a_{n1+m1})`, the minus window uses the negative-index
/// coefficients, and the resulting model is a function of `w = e^{iz}`.
pub fn fit_at_time(state: &SpectralState, cfg: &FitConfig) -> Result<Model> {
    let n1 = cfg.n1_plus;
    let m1 = cfg.m1_plus;
    if state.n < (n1 + m1).max(cfg.n1_minus + cfg.m1_minus) {
        return Err(Error::Validation(format!(
            "spectral cutoff {} too small for degree bounds",
            state.n
        )));
    }
    let half = state.coeff(0) / 2.0;
    let mut cp = vec![half];
    for k in 1..=(n1 + m1) as i64 {
        cp.push(state.coeff(k));
    }
    let mut cm = vec![half];
    for k in 1..=(cfg.n1_minus + cfg.m1_minus) as i64 {
        cm.push(state.coeff(-k));
    }
    let mut all = cp[1..].to_vec();
    all.extend_from_slice(&cm);
    let tau_scale = numkit::norm2(&all);
    fit_windows(&cp, &cm, Some(tau_scale), cfg, state.n)
}

/// One tracked singularity estimate.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TrackedPole {
    pub sign: ComponentSign,
    pub neuron_index: usize,
    /// `s = -i ln(w-plane pole)`, principal branch.
    pub s: C64,
    /// Whether the imaginary-sign convention for this side holds.
    pub branch_ok: bool,
    /// Distance to the nearest true singularity.
    pub error: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SingularityTrack {
    pub time: f64,
    pub estimates: Vec<TrackedPole>,
    pub truth: (C64, C64),
}

/// Recover the z-plane singularities from a model fitted in the exponential
/// variable. The plus side demands `Im s < 0`, the minus side `Im s > 0`;
/// estimates violating their constraint are flagged, not dropped.
pub fn track_singularities(model: &Model, t: f64, cfg: &PdeConfig) -> Result<SingularityTrack> {
    let (z1, z2) = cfg.true_singularities(t);
    let mut estimates = Vec::new();
    for p in &model.pole_report {
        if p.at_infinity {
            continue;
        }
        // p.location is the w-plane value e^{i s}
        let s = -C64::i() * p.location.ln();
        let branch_ok = match p.component_sign {
            ComponentSign::Plus => s.im < 0.0,
            ComponentSign::Minus => s.im > 0.0,
        };
        let error = (s - z1).norm().min((s - z2).norm());
        estimates.push(TrackedPole {
            sign: p.component_sign,
            neuron_index: p.neuron_index,
            s,
            branch_ok,
            error,
        });
    }
    Ok(SingularityTrack { time: t, estimates, truth: (z1, z2) })
}

/// One row of the weight/bias trajectory across time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub w11_plus: Option<C64>,
    pub b11_plus: Option<C64>,
    pub w11_minus: Option<C64>,
    pub b11_minus: Option<C64>,
    pub track: SingularityTrack,
    /// Per-time ODE diagnostics (present when the source is the ODE).
    pub ode_a0_drift: Option<f64>,
    pub ode_reality_defect: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrajectoryReport {
    pub blow_up_time: f64,
    pub source: CoefficientSource,
    pub rows: Vec<TrajectoryRow>,
    /// Times at which the ODE solve was unavailable (post-blow-up overflow).
    pub ode_failures: Vec<(f64, String)>,
}

/// Fit at every requested time and report hidden-layer trajectories plus
/// singularity tracks.
///
/// With the exact-sampling source this reproduces the reference experiment;
/// the ODE source is kept for solver diagnostics -- past the blow-up time the
/// truncated ODE follows the analytic continuation of the solution (whose
/// coefficients grow without bound) rather than the formula branch, and
/// eventually overflows.
pub fn trajectory_report(
    cfg: &PdeConfig,
    fit_cfg: &FitConfig,
    source: CoefficientSource,
) -> Result<TrajectoryReport> {
    cfg.validate()?;
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    let mut ode_state = match source {
        CoefficientSource::Ode => Some(init_spectral(cfg)?),
        CoefficientSource::Exact => None,
    };
    let a0_init = ode_state.as_ref().map(|s| s.coeff(0));
    for &t in &cfg.times {
        let state = match source {
            CoefficientSource::Exact => SpectralState::from_exact(cfg, t)?,
            CoefficientSource::Ode => {
                let cur = match ode_state.take() {
                    Some(s) => match integrate_to(&s, t, cfg) {
                        Ok(next) => next,
                        Err(e) => {
                            failures.push((t, e.to_string()));
                            break;
                        }
                    },
                    None => break,
                };
                ode_state = Some(cur.clone());
                cur
            }
        };
        if (t - cfg.blow_up_time()).abs() < cfg.dt {
            eprintln!(
                "warning: fitting at t = {t}, within one step of the blow-up time {}",
                cfg.blow_up_time()
            );
        }
        let model = fit_at_time(&state, fit_cfg)?;
        let track = track_singularities(&model, t, cfg)?;
        let first = |c: &Option<crate::network::NetworkComponent>, idx: usize| -> Option<C64> {
            c.as_ref().and_then(|cc| {
                if idx == 0 {
                    cc.w1.first().copied()
                } else {
                    cc.b1.first().copied()
                }
            })
        };
        rows.push(TrajectoryRow {
            t,
            w11_plus: first(&model.plus, 0),
            b11_plus: first(&model.plus, 1),
            w11_minus: first(&model.minus, 0),
            b11_minus: first(&model.minus, 1),
            track,
            ode_a0_drift: match (&ode_state, a0_init) {
                (Some(s), Some(a0)) if source == CoefficientSource::Ode => {
                    Some((s.coeff(0) - a0).norm())
                }
                _ => None,
            },
            ode_reality_defect: ode_state
                .as_ref()
                .filter(|_| source == CoefficientSource::Ode)
                .map(|s| s.reality_defect()),
        });
    }
    Ok(TrajectoryReport {
        blow_up_time: cfg.blow_up_time(),
        source,
        rows,
        ode_failures: failures,
    })
}
