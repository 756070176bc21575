//! Rational degree detection and Pade coefficient vectors from a one-sided
//! Laurent coefficient window, via iterated Toeplitz-SVD rank reduction and
//! end trimming.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkit::{self, CMat};

/// One trimming event: which stage (5, 6 or 7) removed how many entries.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
pub struct TrimEvent {
    pub stage: u8,
    pub lambda: usize,
}

/// Detected degrees plus the numerator/denominator coefficient vectors for
/// one component (constant-first).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegreeEstimate {
    pub n_deg: usize,
    pub m_deg: usize,
    pub p: Vec<C64>,
    pub q: Vec<C64>,
    /// Threshold actually used for the rank counts.
    pub tau: f64,
    /// Number of SVD factorizations computed.
    pub svd_iterations: usize,
    /// Successive values of the denominator degree bound, starting at the
    /// input bound; reductions = len - 1.
    pub reduction_trace: Vec<usize>,
    pub trim_log: Vec<TrimEvent>,
    /// Set when the rank count hit zero (no poles on this side).
    pub analytic: bool,
    /// Set when the degree-bound reduction clamped N1 at zero.
    pub clamped: bool,
}

impl DegreeEstimate {
    pub fn reductions(&self) -> usize {
        self.reduction_trace.len().saturating_sub(1)
    }
}

/// Toeplitz matrix with entry `(k, l) = c[n_deg + k - l]`, `k = 1..m_deg`,
/// `l = 0..m_deg`; indices outside `c` read as zero. For `m_deg = 0` an
/// empty 0 x 1 matrix signals the analytic case.
pub fn build_toeplitz(c: &[C64], n_deg: usize, m_deg: usize) -> CMat {
    let mut t = CMat::zeros(m_deg, m_deg + 1);
    for k in 1..=m_deg {
        for l in 0..=m_deg {
            let idx = n_deg as i64 + k as i64 - l as i64;
            if idx >= 0 && (idx as usize) < c.len() {
                t.set(k - 1, l, c[idx as usize]);
            }
        }
    }
    t
}

/// Rotate a vector's phase so its largest-magnitude entry is real positive.
fn normalize_phase(v: &mut [C64]) {
    let mut best = 0usize;
    let mut bestn = -1.0f64;
    for (i, z) in v.iter().enumerate() {
        if z.norm() > bestn {
            bestn = z.norm();
            best = i;
        }
    }
    if bestn <= 0.0 {
        return;
    }
    let phase = v[best].conj() / v[best].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
}

/// Iterative degree detection.
///
/// `tau_scale` overrides the norm used in `tau = tol * scale`; by default the
/// 2-norm of `c` itself is used. The pipeline passes the full two-sided
/// window norm here (see [`crate::laurent::LaurentWindow::full_norm`]).
/// Trimming comparisons use the raw `tol`.
pub fn estimate_degrees(
    c: &[C64],
    n1: usize,
    m1: usize,
    tol: f64,
    tau_scale: Option<f64>,
) -> Result<DegreeEstimate> {
    if tol <= 0.0 {
        return Err(Error::Validation(format!("tol must be positive, got {tol}")));
    }
    if c.len() < n1 + m1 + 1 {
        return Err(Error::Validation(format!(
            "coefficient vector has {} entries, needs n1 + m1 + 1 = {}",
            c.len(),
            n1 + m1 + 1
        )));
    }
    numkit::validate_finite(c)?;
    let tau = tol * tau_scale.unwrap_or_else(|| numkit::norm2(c));

    let mut nn = n1;
    let mut mm = m1;
    let mut trace = vec![mm];
    let mut svds = 0usize;
    let mut clamped = false;
    let mut analytic = mm == 0;
    let mut last_svd = None;

    while mm > 0 {
        let t = build_toeplitz(c, nn, mm);
        let s = numkit::svd(&t)?;
        svds += 1;
        let mu = s.singular_values.iter().filter(|&&x| x > tau).count();
        if mu == 0 {
            analytic = true;
            break;
        }
        if mu < mm {
            let drop = mm - mu;
            if nn < drop {
                clamped = true;
            }
            nn = nn.saturating_sub(drop);
            mm = mu;
            trace.push(mm);
            continue;
        }
        last_svd = Some(s);
        break;
    }

    if analytic {
        // no poles: q = (1), p = truncated Taylor with trailing tiny entries cut
        let mut p: Vec<C64> = c[..=nn.min(c.len() - 1)].to_vec();
        let mut trim_log = Vec::new();
        let mut lam = 0usize;
        while p.len() > 1 && p[p.len() - 1].norm() <= tol {
            p.pop();
            lam += 1;
        }
        if lam > 0 {
            trim_log.push(TrimEvent { stage: 7, lambda: lam });
        }
        let n_deg = p.len() - 1;
        return Ok(DegreeEstimate {
            n_deg,
            m_deg: 0,
            p,
            q: vec![C64::new(1.0, 0.0)],
            tau,
            svd_iterations: svds,
            reduction_trace: trace,
            trim_log,
            analytic: true,
            clamped,
        });
    }

    let svd_res = last_svd.expect("loop ended with a fixed-point SVD");
    let mut q = svd_res.null_right_vector();
    normalize_phase(&mut q);

    // p_k = sum_{j=0..min(k, mm)} c[k-j] q[j], k = 0..nn
    let mut p = numkit::conv_prefix(c, &q, nn + 1);

    let mut trim_log = Vec::new();

    // stage 5: leading q entries below tol; shift q and p together
    let mut lam = 0usize;
    while lam <= mm && q[lam].norm() <= tol {
        lam += 1;
    }
    if lam > mm {
        return Err(Error::Numerical(
            "denominator vector collapsed below tolerance".into(),
        ));
    }
    if lam > 0 {
        q.drain(..lam);
        p.drain(..lam.min(p.len()));
        mm -= lam;
        nn = nn.saturating_sub(lam);
        trim_log.push(TrimEvent { stage: 5, lambda: lam });
        // the shifted vectors should still satisfy the defining convolution;
        // warn if they do not (the plain reindexing can in principle break it)
        let check = numkit::conv_prefix(c, &q, (nn + mm).min(p.len()));
        let viol = check
            .iter()
            .zip(&p)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        if viol > 10.0 * tau {
            eprintln!(
                "warning: leading-trim reindexing violates the Pade relation by {viol:.3e}"
            );
        }
    }

    // stage 6: trailing q entries below tol
    let mut lam6 = 0usize;
    while mm > 0 && q[mm].norm() <= tol {
        q.pop();
        mm -= 1;
        lam6 += 1;
    }
    if lam6 > 0 {
        trim_log.push(TrimEvent { stage: 6, lambda: lam6 });
    }

    // stage 7: trailing p entries below tol
    let mut lam7 = 0usize;
    while p.len() > 1 && p[p.len() - 1].norm() <= tol {
        p.pop();
        nn = nn.saturating_sub(1);
        lam7 += 1;
    }
    if lam7 > 0 {
        trim_log.push(TrimEvent { stage: 7, lambda: lam7 });
    }
    let n_deg = p.len() - 1;

    Ok(DegreeEstimate {
        n_deg,
        m_deg: mm,
        p,
        q,
        tau,
        svd_iterations: svds,
        reduction_trace: trace,
        trim_log,
        analytic: false,
        clamped,
    })
}
