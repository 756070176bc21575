//! Assembly of one network component from a degree estimate and an
//! activation: per-neuron linear factors of the denominator, closed-form
//! hidden-layer weights and biases, least-squares output layer, evaluation,
//! and pole recovery.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::activation::{eval_activation, infinity_marker, Activation};
use crate::error::{Error, Result};
use crate::numkit::{self, CMat};
use crate::pade::DegreeEstimate;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentSign {
    Plus,
    Minus,
}

impl ComponentSign {
    pub fn is_minus(self) -> bool {
        matches!(self, ComponentSign::Minus)
    }
}

/// Rectangle `[a, b] + i [c, d]` for the random factor constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Rect {
    pub fn validate(&self) -> Result<()> {
        if self.a < self.b && self.c < self.d {
            Ok(())
        } else {
            Err(Error::Validation(format!(
                "rectangle needs a < b and c < d, got [{}, {}] x [{}, {}]",
                self.a, self.b, self.c, self.d
            )))
        }
    }
}

impl Default for Rect {
    fn default() -> Self {
        Rect { a: -1.0, b: -0.5, c: 0.5, d: 1.0 }
    }
}

/// Per-neuron linear factor constants: `prod_k (c0[k] + c1[k] z) = q(z)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FactorSet {
    pub c0: Vec<C64>,
    pub c1: Vec<C64>,
    pub rect: Rect,
    pub seed: u64,
}

/// One of the two network components.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkComponent {
    pub sign: ComponentSign,
    pub activation: Activation,
    pub w1: Vec<C64>,
    pub b1: Vec<C64>,
    pub w2: Vec<C64>,
    pub b2: C64,
    pub degrees: DegreeEstimate,
    pub factors: FactorSet,
    /// Achieved 2-norm residual of the output-layer least-squares fit.
    pub ls_residual: f64,
    /// 2-norm of the right-hand side of that fit.
    pub rhs_norm: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PoleEstimate {
    pub location: C64,
    pub neuron_index: usize,
    pub component_sign: ComponentSign,
    /// Minus-side neuron with `b + z0` vanishing: the pole escapes to infinity.
    pub at_infinity: bool,
}

/// Draw the factor constants: `c0[k]` random in the rectangle for
/// `k = 0..M-2`, the last forced by `prod c0 = q[0]`, and `c1[k] = -c0[k] / zeta[k]`
/// with `zeta` the roots of `q` sorted by (magnitude, phase).
pub fn factor_denominator(q: &[C64], rect: Rect, seed: u64) -> Result<FactorSet> {
    rect.validate()?;
    let m = q.len() - 1;
    if m == 0 {
        return Err(Error::Validation("cannot factor a constant denominator".into()));
    }
    if q[0].norm() == 0.0 || q[m].norm() == 0.0 {
        return Err(Error::Validation(
            "denominator must have nonzero first and last coefficients (trim first)".into(),
        ));
    }
    let mut roots = numkit::polynomial_roots(q)?;
    roots.sort_by(|x, y| {
        (x.norm(), x.arg())
            .partial_cmp(&(y.norm(), y.arg()))
            .expect("finite roots")
    });
    if roots.iter().any(|z| z.norm() <= 1e-13) {
        return Err(Error::Numerical("denominator root at the origin".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut c0 = Vec::with_capacity(m);
    for _ in 0..m - 1 {
        loop {
            let re = rng.gen_range(rect.a..=rect.b);
            let im = rng.gen_range(rect.c..=rect.d);
            let v = C64::new(re, im);
            if v.norm() > 0.0 {
                c0.push(v);
                break;
            }
        }
    }
    let prod: C64 = c0.iter().product();
    c0.push(q[0] / prod);
    let c1: Vec<C64> = c0.iter().zip(&roots).map(|(&a, &z)| -a / z).collect();
    Ok(FactorSet { c0, c1, rect, seed })
}

/// Hidden layer in closed form: `w1[k] = c1[k]/gamma1`, `b1[k] = (gamma0 - c0[k])/gamma1`.
pub fn hidden_params(f: &FactorSet, a: &Activation) -> Result<(Vec<C64>, Vec<C64>)> {
    if a.gamma1.norm() == 0.0 {
        return Err(Error::Validation(
            "activation has no pole; the construction requires one".into(),
        ));
    }
    let w1 = f.c1.iter().map(|&c1| c1 / a.gamma1).collect();
    let b1 = f.c0.iter().map(|&c0| (a.gamma0 - c0) / a.gamma1).collect();
    Ok((w1, b1))
}

fn binom(j: usize, k: usize) -> f64 {
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (j - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// The numerator polynomial of neuron `l` after substituting the affine map:
/// `A[k] = sum_{j>=k} alpha[j] binom(j,k) (-b1[l])^{j-k} w1[l]^k`.
fn neuron_numerator(a: &Activation, w1: C64, b1: C64) -> Vec<C64> {
    let nd = a.num_degree();
    let mut out = vec![C64::new(0.0, 0.0); nd + 1];
    for k in 0..=nd {
        let wk = w1.powi(k as i32);
        let mut acc = C64::new(0.0, 0.0);
        for j in k..=nd {
            acc += a.alpha[j] * binom(j, k) * (-b1).powi((j - k) as i32);
        }
        out[k] = acc * wk;
    }
    out
}

/// Output layer: assemble the `2n x (M+1)` system `(F | Q) (w2 | b2)^T = P`
/// on the unit-circle nodes (inverted nodes for the minus component) and
/// solve it in the least-squares sense.
pub fn output_params(
    est: &DegreeEstimate,
    factors: &FactorSet,
    a: &Activation,
    w1: &[C64],
    b1: &[C64],
    n_fit: usize,
    sign: ComponentSign,
) -> Result<(Vec<C64>, C64, f64, f64)> {
    let m = est.m_deg;
    if 2 * n_fit < m + 1 {
        return Err(Error::Validation(format!(
            "need at least M+1 = {} fit points, got {}",
            m + 1,
            2 * n_fit
        )));
    }
    let rows = 2 * n_fit;
    let nums: Vec<Vec<C64>> = (0..m).map(|l| neuron_numerator(a, w1[l], b1[l])).collect();
    let mut sys = CMat::zeros(rows, m + 1);
    let mut rhs = vec![C64::new(0.0, 0.0); rows];
    for r in 0..rows {
        let ang = 2.0 * std::f64::consts::PI * r as f64 / rows as f64;
        let zm = C64::from_polar(1.0, ang);
        let x = if sign.is_minus() { zm.inv() } else { zm };
        for l in 0..m {
            let mut prod = C64::new(1.0, 0.0);
            for i in 0..m {
                if i != l {
                    prod *= factors.c0[i] + factors.c1[i] * x;
                }
            }
            sys.set(r, l, numkit::polyval(&nums[l], x) * prod);
        }
        sys.set(r, m, -numkit::polyval(&est.q, x));
        rhs[r] = numkit::polyval(&est.p, x);
    }
    let (sol, residual, _) = numkit::least_squares(&sys, &rhs)?;
    let rhs_norm = numkit::norm2(&rhs);
    if residual > 1e-6 * rhs_norm {
        eprintln!(
            "warning: output-layer fit residual {residual:.3e} exceeds 1e-6 * ||P|| = {:.3e}; \
             the component is returned but its neuron form may not reproduce p/q",
            1e-6 * rhs_norm
        );
    }
    Ok((sol[..m].to_vec(), sol[m], residual, rhs_norm))
}

/// Build a complete component from a degree estimate and an activation.
pub fn assemble_component(
    est: DegreeEstimate,
    activation: Activation,
    rect: Rect,
    seed: u64,
    n_fit: usize,
    sign: ComponentSign,
) -> Result<NetworkComponent> {
    let factors = factor_denominator(&est.q, rect, seed)?;
    let (w1, b1) = hidden_params(&factors, &activation)?;
    let (w2, b2, ls_residual, rhs_norm) =
        output_params(&est, &factors, &activation, &w1, &b1, n_fit, sign)?;
    Ok(NetworkComponent {
        sign,
        activation,
        w1,
        b1,
        w2,
        b2,
        degrees: est,
        factors,
        ls_residual,
        rhs_norm,
    })
}

impl NetworkComponent {
    pub fn neuron_count(&self) -> usize {
        self.w1.len()
    }

    /// Evaluate the component through its neurons. The minus component reads
    /// its argument as `1/z` and rejects `z = 0`.
    pub fn eval(&self, z: C64) -> Result<C64> {
        let x = if self.sign.is_minus() {
            if z.norm() == 0.0 {
                return Err(Error::Validation(
                    "minus component cannot be evaluated at z = 0".into(),
                ));
            }
            z.inv()
        } else {
            z
        };
        let mut acc = -self.b2;
        for l in 0..self.neuron_count() {
            let v = eval_activation(&self.activation, self.w1[l] * x - self.b1[l]);
            if v.re.is_infinite() || v.im.is_infinite() {
                return Ok(infinity_marker());
            }
            acc += self.w2[l] * v;
        }
        Ok(acc)
    }

    /// Evaluate the underlying rational form `p/q` (in `z`, or in `1/z` for
    /// the minus component). Identical to [`Self::eval`] whenever the
    /// output-layer system is consistent.
    pub fn eval_rational(&self, z: C64) -> Result<C64> {
        let x = if self.sign.is_minus() {
            if z.norm() == 0.0 {
                return Err(Error::Validation(
                    "minus component cannot be evaluated at z = 0".into(),
                ));
            }
            z.inv()
        } else {
            z
        };
        let den = numkit::polyval(&self.degrees.q, x);
        if den.norm() == 0.0 {
            return Ok(infinity_marker());
        }
        Ok(numkit::polyval(&self.degrees.p, x) / den)
    }

    /// Shift the component by a constant (used to fold the analytic side's
    /// constant term in): adjusts both the output bias and the stored
    /// numerator so the neuron form and the rational form stay equal.
    pub fn add_constant(&mut self, c: C64) {
        self.b2 -= c;
        for (pk, qk) in self.degrees.p.iter_mut().zip(&self.degrees.q) {
            *pk += c * qk;
        }
        if self.degrees.p.len() < self.degrees.q.len() {
            for qk in &self.degrees.q[self.degrees.p.len()..] {
                self.degrees.p.push(c * qk);
            }
            self.degrees.n_deg = self.degrees.p.len() - 1;
        }
    }

    /// Per-neuron singularity estimates from the hidden-layer parameters and
    /// the activation pole.
    pub fn recover_poles(&self) -> Vec<PoleEstimate> {
        let z0 = self.activation.pole();
        let mut out = Vec::with_capacity(self.neuron_count());
        for l in 0..self.neuron_count() {
            let shifted = self.b1[l] + z0;
            let (location, at_infinity) = if self.sign.is_minus() {
                if shifted.norm() <= 1e-13 {
                    (infinity_marker(), true)
                } else {
                    (self.w1[l] / shifted, false)
                }
            } else {
                (shifted / self.w1[l], false)
            };
            out.push(PoleEstimate {
                location,
                neuron_index: l,
                component_sign: self.sign,
                at_infinity,
            });
        }
        out
    }
}

/// Sum of the present components.
pub fn eval_network(
    plus: Option<&NetworkComponent>,
    minus: Option<&NetworkComponent>,
    z: C64,
) -> Result<C64> {
    match (plus, minus) {
        (None, None) => Err(Error::Validation("no component present".into())),
        (p, m) => {
            let mut acc = C64::new(0.0, 0.0);
            if let Some(c) = p {
                acc += c.eval(z)?;
            }
            if let Some(c) = m {
                acc += c.eval(z)?;
            }
            Ok(acc)
        }
    }
}

/// Single-linkage grouping of pole estimates within `radius`; returns
/// (centroid, multiplicity) pairs sorted by (magnitude, phase).
pub fn cluster_poles(estimates: &[PoleEstimate], radius: f64) -> Result<Vec<(C64, usize)>> {
    if radius <= 0.0 {
        return Err(Error::Validation("cluster radius must be positive".into()));
    }
    let pts: Vec<&PoleEstimate> = estimates.iter().filter(|e| !e.at_infinity).collect();
    let mut used = vec![false; pts.len()];
    let mut out = Vec::new();
    for i in 0..pts.len() {
        if used[i] {
            continue;
        }
        let mut group = vec![i];
        used[i] = true;
        let mut frontier = vec![i];
        while let Some(j) = frontier.pop() {
            for k in 0..pts.len() {
                if !used[k] && (pts[j].location - pts[k].location).norm() <= radius {
                    used[k] = true;
                    group.push(k);
                    frontier.push(k);
                }
            }
        }
        let centroid = group.iter().map(|&g| pts[g].location).sum::<C64>() / group.len() as f64;
        out.push((centroid, group.len()));
    }
    out.sort_by(|x, y| {
        (x.0.norm(), x.0.arg())
            .partial_cmp(&(y.0.norm(), y.0.arg()))
            .expect("finite centroids")
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::activation::{build_activation, PhiKind, SeedFunction};
    use crate::pade::estimate_degrees;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn geometric_estimate() -> DegreeEstimate {
        let cw: Vec<C64> = (0..12).map(|k| c(-2f64.powi(-(k as i32) - 1), 0.0)).collect();
        estimate_degrees(&cw, 5, 5, 1e-12, None).unwrap()
    }

    #[test]
    fn factor_single_pole_is_forced() {
        let q = vec![c(1.0, 0.0), c(-0.5, 0.0)];
        let f = factor_denominator(&q, Rect::default(), 12345).unwrap();
        assert!((f.c0[0] - c(1.0, 0.0)).norm() < 1e-14);
        assert!((f.c1[0] - c(-0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn factor_product_reexpands() {
        // q = 1 - z^2, roots +-1
        let q = vec![c(1.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)];
        let f = factor_denominator(&q, Rect::default(), 7).unwrap();
        // expand (c0_0 + c1_0 z)(c0_1 + c1_1 z)
        let e0 = f.c0[0] * f.c0[1];
        let e1 = f.c0[0] * f.c1[1] + f.c1[0] * f.c0[1];
        let e2 = f.c1[0] * f.c1[1];
        assert!((e0 - q[0]).norm() < 1e-12);
        assert!((e1 - q[1]).norm() < 1e-12);
        assert!((e2 - q[2]).norm() < 1e-12);
    }

    #[test]
    fn factor_rejects_untrimmed() {
        let q = vec![c(0.0, 0.0), c(1.0, 0.0)];
        assert!(factor_denominator(&q, Rect::default(), 1).is_err());
    }

    #[test]
    fn hidden_params_worked_example() {
        let f = FactorSet {
            c0: vec![c(1.0, 0.0)],
            c1: vec![c(-0.5, 0.0)],
            rect: Rect::default(),
            seed: 0,
        };
        let a = Activation {
            alpha: vec![c(1.0, 0.0), c(0.0, 0.0)],
            gamma0: c(1.2, 0.0),
            gamma1: c(1.0, 0.0),
        };
        let (w1, b1) = hidden_params(&f, &a).unwrap();
        assert!((w1[0] - c(-0.5, 0.0)).norm() < 1e-15);
        assert!((b1[0] - c(0.2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn hidden_params_gamma0_zero_collapse() {
        let f = FactorSet {
            c0: vec![c(0.3, 0.1), c(-0.2, 0.4)],
            c1: vec![c(1.0, 0.0), c(1.0, 0.0)],
            rect: Rect::default(),
            seed: 0,
        };
        let a = Activation {
            alpha: vec![c(1.0, 0.0)],
            gamma0: c(0.0, 0.0),
            gamma1: c(1.0, 0.0),
        };
        let (_, b1) = hidden_params(&f, &a).unwrap();
        assert!((b1[0] + f.c0[0]).norm() < 1e-15);
        assert!((b1[1] + f.c0[1]).norm() < 1e-15);
    }

    #[test]
    fn hidden_params_requires_pole() {
        let f = FactorSet {
            c0: vec![c(1.0, 0.0)],
            c1: vec![c(1.0, 0.0)],
            rect: Rect::default(),
            seed: 0,
        };
        let a = Activation {
            alpha: vec![c(1.0, 0.0)],
            gamma0: c(1.0, 0.0),
            gamma1: c(0.0, 0.0),
        };
        assert!(hidden_params(&f, &a).is_err());
    }

    fn build_component(seed_val: u64) -> NetworkComponent {
        let est = geometric_estimate();
        let seed = SeedFunction::new(PhiKind::Cos, c(-1.2, 0.0)).unwrap();
        let nd = est.n_deg + 1 - est.m_deg;
        let act = build_activation(&seed, nd, 64).unwrap();
        assemble_component(est, act, Rect::default(), seed_val, 64, ComponentSign::Plus).unwrap()
    }

    #[test]
    fn single_pole_component_reproduces_function() {
        // the estimate comes from 1/(z-2) including the c0/2 split applied by
        // the pipeline; here the raw window was used, so p/q = 1/(z-2) itself
        let comp = build_component(11);
        for j in 0..16 {
            let z = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / 16.0);
            let expect = (z - c(2.0, 0.0)).inv();
            let got = comp.eval(z).unwrap();
            assert!((got - expect).norm() < 1e-10, "j={j}");
        }
        assert!((comp.eval(c(0.0, 0.0)).unwrap() - c(-0.5, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn constant_function_output_layer() {
        // p = 3 * q for a one-pole q: the system admits w2 = 0, b2 = -3
        let mut est = geometric_estimate();
        let three = c(3.0, 0.0);
        est.p = est.q.iter().map(|&qk| three * qk).collect();
        est.n_deg = est.p.len() - 1;
        let seed = SeedFunction::new(PhiKind::Cos, c(-1.2, 0.0)).unwrap();
        let act = build_activation(&seed, 1, 64).unwrap();
        let comp =
            assemble_component(est, act, Rect::default(), 5, 64, ComponentSign::Plus).unwrap();
        assert!(comp.ls_residual <= 1e-12 * comp.rhs_norm.max(1.0));
        assert!((comp.w2[0]).norm() < 1e-11);
        assert!((comp.b2 + three).norm() < 1e-11);
    }

    #[test]
    fn zero_weights_give_constant() {
        let mut comp = build_component(3);
        for w in comp.w2.iter_mut() {
            *w = c(0.0, 0.0);
        }
        comp.b2 = c(2.5, -1.0);
        let v = comp.eval(c(0.3, 0.7)).unwrap();
        assert!((v - c(-2.5, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn minus_component_rejects_origin() {
        let mut comp = build_component(3);
        comp.sign = ComponentSign::Minus;
        assert!(comp.eval(c(0.0, 0.0)).is_err());
    }

    #[test]
    fn pole_recovery_worked_example() {
        // w = -1/2, b = 0.2, z0 = -1.2 -> s = (0.2 - 1.2)/(-0.5) = 2
        let comp = NetworkComponent {
            sign: ComponentSign::Plus,
            activation: Activation {
                alpha: vec![c(1.0, 0.0), c(0.0, 0.0)],
                gamma0: c(1.2, 0.0),
                gamma1: c(1.0, 0.0),
            },
            w1: vec![c(-0.5, 0.0)],
            b1: vec![c(0.2, 0.0)],
            w2: vec![c(1.0, 0.0)],
            b2: c(0.0, 0.0),
            degrees: geometric_estimate(),
            factors: FactorSet {
                c0: vec![c(1.0, 0.0)],
                c1: vec![c(-0.5, 0.0)],
                rect: Rect::default(),
                seed: 0,
            },
            ls_residual: 0.0,
            rhs_norm: 1.0,
        };
        let poles = comp.recover_poles();
        assert!((poles[0].location - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn recovered_pole_equals_factor_ratio() {
        let comp = build_component(99);
        for (est, (&c0k, &c1k)) in comp
            .recover_poles()
            .iter()
            .zip(comp.factors.c0.iter().zip(&comp.factors.c1))
        {
            let expect = -c0k / c1k;
            assert!((est.location - expect).norm() < 1e-12);
        }
    }

    #[test]
    fn seed_changes_weights_not_poles() {
        let a = build_component(1);
        let b = build_component(2);
        // same single pole here, so compare directly
        let pa = a.recover_poles()[0].location;
        let pb = b.recover_poles()[0].location;
        assert!((pa - pb).norm() < 1e-10);
    }

    #[test]
    fn theorem_identity_neurons_equal_rational() {
        let comp = build_component(17);
        let mut s = 0.4f64;
        for _ in 0..32 {
            s = (s * 611.3).fract();
            let z = C64::from_polar(1.0, s * 6.28);
            let a = comp.eval(z).unwrap();
            let b = comp.eval_rational(z).unwrap();
            assert!((a - b).norm() <= 1e-8 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn network_eval_requires_component() {
        assert!(eval_network(None, None, c(1.0, 0.0)).is_err());
        let comp = build_component(4);
        let v = eval_network(Some(&comp), None, c(0.5, 0.0)).unwrap();
        assert!((v - comp.eval(c(0.5, 0.0)).unwrap()).norm() < 1e-15);
    }

    #[test]
    fn add_constant_keeps_forms_equal() {
        let mut comp = build_component(8);
        comp.add_constant(c(0.7, -0.3));
        let z = c(0.4, 0.2);
        let a = comp.eval(z).unwrap();
        let b = comp.eval_rational(z).unwrap();
        assert!((a - b).norm() < 1e-9);
    }

    #[test]
    fn cluster_two_near_points() {
        let mk = |loc: C64| PoleEstimate {
            location: loc,
            neuron_index: 0,
            component_sign: ComponentSign::Plus,
            at_infinity: false,
        };
        let ests = vec![mk(c(0.0, 0.8)), mk(c(1e-9, 0.8))];
        let groups = cluster_poles(&ests, 1e-6).unwrap();
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].1, 2);
    }

    #[test]
    fn cluster_empty_and_bad_radius() {
        assert!(cluster_poles(&[], 1e-6).unwrap().is_empty());
        assert!(cluster_poles(&[], 0.0).is_err());
    }
}
