//! End-to-end fitting: samples -> coefficients -> degrees -> activation ->
//! component assembly -> pole report, plus model persistence and grid
//! evaluation.

use std::path::Path;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::activation::{build_activation, Activation, PhiKind, SeedFunction};
use crate::error::{Error, Result};
use crate::laurent::{compute_coefficients, split_windows, ContourSamples};
use crate::network::{
    assemble_component, cluster_poles, eval_network, ComponentSign, NetworkComponent,
    PoleEstimate, Rect,
};
use crate::pade::estimate_degrees;

/// Everything the fit needs besides the samples.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FitConfig {
    pub rho: f64,
    pub n1_plus: usize,
    pub m1_plus: usize,
    pub n1_minus: usize,
    pub m1_minus: usize,
    pub tol: f64,
    pub rect: Rect,
    pub seed: u64,
    pub phi: PhiKind,
    pub z0: C64,
    pub shared_activation: bool,
}

impl FitConfig {
    pub fn new(rho: f64, n1: usize, m1: usize) -> Self {
        FitConfig {
            rho,
            n1_plus: n1,
            m1_plus: m1,
            n1_minus: n1,
            m1_minus: m1,
            tol: 1e-14,
            rect: Rect::default(),
            seed: 0,
            phi: PhiKind::Cos,
            z0: C64::new(-1.2, 0.0),
            shared_activation: true,
        }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if self.tol <= 0.0 {
            return Err(Error::Validation("tol must be positive".into()));
        }
        if self.rho <= 0.0 {
            return Err(Error::Validation("rho must be positive".into()));
        }
        self.rect.validate()?;
        let need = (self.n1_plus + self.m1_plus).max(self.n1_minus + self.m1_minus);
        if n < need {
            return Err(Error::Validation(format!(
                "n = {n} is too small for the degree bounds (need n >= {need})"
            )));
        }
        SeedFunction::new(self.phi, self.z0)?;
        Ok(())
    }
}

/// A fitted model: at most one component per side plus the pole report.
#[derive(Debug, Clone)]
pub struct Model {
    pub plus: Option<NetworkComponent>,
    pub minus: Option<NetworkComponent>,
    pub config: FitConfig,
    pub n: usize,
    pub pole_report: Vec<PoleEstimate>,
}

/// Fit a model from contour samples. Deterministic in (samples, cfg): the
/// plus side consumes the random stream seeded with `seed`, the minus side
/// the stream seeded with `seed + 1`.
pub fn fit(samples: &ContourSamples, cfg: &FitConfig) -> Result<Model> {
    let n = samples.n();
    cfg.validate(n)?;
    if (samples.rho - cfg.rho).abs() > 1e-12 * cfg.rho.max(1.0) {
        return Err(Error::Validation(format!(
            "config rho = {} does not match sample rho = {}",
            cfg.rho, samples.rho
        )));
    }
    let window = compute_coefficients(samples)?;
    let (cp, cm) = split_windows(
        &window,
        cfg.n1_plus,
        cfg.m1_plus,
        cfg.n1_minus,
        cfg.m1_minus,
    )?;
    // Both windows share one rounding-noise floor; scale tau by the norm of
    // the union of the windows rather than by the per-side norms (the
    // smaller side's norm can understate the floor by orders of magnitude).
    let mut all = cp[1..].to_vec();
    all.extend_from_slice(&cm);
    let tau_scale = Some(crate::numkit::norm2(&all));
    fit_windows(&cp, &cm, tau_scale, cfg, n)
}

/// Fit from already-split one-sided coefficient windows (`cp[0]` and `cm[0]`
/// both carry `c_0 / 2`). `n` sets the number of least-squares nodes (2n) and
/// the activation sampling density.
pub fn fit_windows(
    cp: &[C64],
    cm: &[C64],
    tau_scale: Option<f64>,
    cfg: &FitConfig,
    n: usize,
) -> Result<Model> {
    let seed_fn = SeedFunction::new(cfg.phi, cfg.z0)?;
    let build_side = |c: &[C64], n1: usize, m1: usize, seed: u64, sign: ComponentSign|
     -> Result<SideOutcome> {
        let est = estimate_degrees(c, n1, m1, cfg.tol, tau_scale)?;
        if est.m_deg == 0 {
            let constant = est.p.first().copied().unwrap_or_default();
            let tail = est.p.len() > 1;
            return Ok(SideOutcome::Analytic { constant, nonconstant_tail: tail });
        }
        let nd = (est.n_deg + 1).saturating_sub(est.m_deg);
        let act = build_activation(&seed_fn, nd, n)?;
        let comp = assemble_component(est, act, cfg.rect, seed, n, sign)?;
        Ok(SideOutcome::Component(Box::new(comp)))
    };

    let (plus_res, minus_res) = rayon::join(
        || build_side(cp, cfg.n1_plus, cfg.m1_plus, cfg.seed, ComponentSign::Plus),
        || {
            build_side(
                cm,
                cfg.n1_minus,
                cfg.m1_minus,
                cfg.seed.wrapping_add(1),
                ComponentSign::Minus,
            )
        },
    );
    let plus_res = plus_res?;
    let minus_res = minus_res?;

    let mut plus = None;
    let mut minus = None;
    let mut offset = C64::new(0.0, 0.0);
    match plus_res {
        SideOutcome::Component(cmp) => plus = Some(*cmp),
        SideOutcome::Analytic { constant, nonconstant_tail } => {
            offset += constant;
            if nonconstant_tail {
                eprintln!(
                    "warning: plus side is pole-free but not constant; only its constant \
                     term is representable and is folded into the other component"
                );
            }
        }
    }
    match minus_res {
        SideOutcome::Component(cmp) => minus = Some(*cmp),
        SideOutcome::Analytic { constant, nonconstant_tail } => {
            offset += constant;
            if nonconstant_tail {
                eprintln!(
                    "warning: minus side is pole-free but not constant; only its constant \
                     term is representable and is folded into the other component"
                );
            }
        }
    }
    if plus.is_none() && minus.is_none() {
        return Err(Error::Numerical(
            "function appears analytic in the sampled annulus -- no network to build".into(),
        ));
    }
    if offset.norm() > 0.0 {
        if let Some(cmp) = plus.as_mut().or(minus.as_mut()) {
            cmp.add_constant(offset);
        }
    }

    let mut pole_report = Vec::new();
    if let Some(c) = &plus {
        pole_report.extend(c.recover_poles());
    }
    if let Some(c) = &minus {
        pole_report.extend(c.recover_poles());
    }
    Ok(Model { plus, minus, config: cfg.clone(), n, pole_report })
}

enum SideOutcome {
    Component(Box<NetworkComponent>),
    Analytic { constant: C64, nonconstant_tail: bool },
}

impl Model {
    pub fn eval(&self, z: C64) -> Result<C64> {
        eval_network(self.plus.as_ref(), self.minus.as_ref(), z)
    }

    /// Evaluate via the rational forms p/q of the components.
    pub fn eval_rational(&self, z: C64) -> Result<C64> {
        let mut acc = C64::new(0.0, 0.0);
        let mut any = false;
        if let Some(c) = &self.plus {
            acc += c.eval_rational(z)?;
            any = true;
        }
        if let Some(c) = &self.minus {
            acc += c.eval_rational(z)?;
            any = true;
        }
        if !any {
            return Err(Error::Validation("no component present".into()));
        }
        Ok(acc)
    }

    pub fn clustered_poles(&self, radius: f64) -> Result<Vec<(C64, usize)>> {
        cluster_poles(&self.pole_report, radius)
    }
}

fn c64_json(z: C64) -> Value {
    json!([z.re, z.im])
}

fn cvec_json(v: &[C64]) -> Value {
    Value::Array(v.iter().map(|&z| c64_json(z)).collect())
}

fn component_json(c: &NetworkComponent) -> Value {
    json!({
        "sign": match c.sign { ComponentSign::Plus => "plus", ComponentSign::Minus => "minus" },
        "N": c.degrees.n_deg,
        "M": c.degrees.m_deg,
        "alpha": cvec_json(&c.activation.alpha),
        "gamma": [c64_json(c.activation.gamma0), c64_json(c.activation.gamma1)],
        "w1": cvec_json(&c.w1),
        "b1": cvec_json(&c.b1),
        "w2": cvec_json(&c.w2),
        "b2": c64_json(c.b2),
        "p": cvec_json(&c.degrees.p),
        "q": cvec_json(&c.degrees.q),
        "C0": cvec_json(&c.factors.c0),
        "C1": cvec_json(&c.factors.c1),
        "ls_residual": c.ls_residual,
        "rhs_norm": c.rhs_norm,
        "seed": c.factors.seed,
        "reduction_trace": c.degrees.reduction_trace,
        "svd_iterations": c.degrees.svd_iterations,
    })
}

pub fn model_to_json(m: &Model) -> Value {
    json!({
        "plus": m.plus.as_ref().map(component_json).unwrap_or(Value::Null),
        "minus": m.minus.as_ref().map(component_json).unwrap_or(Value::Null),
        "meta": {
            "n": m.n,
            "rho": m.config.rho,
            "n1_plus": m.config.n1_plus,
            "m1_plus": m.config.m1_plus,
            "n1_minus": m.config.n1_minus,
            "m1_minus": m.config.m1_minus,
            "tol": m.config.tol,
            "rect": [m.config.rect.a, m.config.rect.b, m.config.rect.c, m.config.rect.d],
            "seed": m.config.seed,
            "phi": m.config.phi.name(),
            "z0": c64_json(m.config.z0),
            "shared_activation": m.config.shared_activation,
            "pole_report": m.pole_report.iter().map(|p| json!({
                "sign": match p.component_sign {
                    ComponentSign::Plus => "plus",
                    ComponentSign::Minus => "minus",
                },
                "neuron": p.neuron_index,
                "re": p.location.re,
                "im": p.location.im,
                "at_infinity": p.at_infinity,
            })).collect::<Vec<_>>(),
        },
    })
}

pub fn save_model(m: &Model, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(&model_to_json(m))?;
    std::fs::write(path, text)?;
    Ok(())
}

fn get<'a>(v: &'a Value, field: &str) -> Result<&'a Value> {
    v.get(field).ok_or_else(|| Error::Schema {
        field: field.to_string(),
        reason: "missing".into(),
    })
}

fn parse_c64(v: &Value, field: &str) -> Result<C64> {
    let arr = v.as_array().ok_or_else(|| Error::Schema {
        field: field.to_string(),
        reason: "expected [re, im]".into(),
    })?;
    if arr.len() != 2 {
        return Err(Error::Schema {
            field: field.to_string(),
            reason: format!("expected 2 entries, got {}", arr.len()),
        });
    }
    let re = arr[0].as_f64().ok_or_else(|| Error::Schema {
        field: field.to_string(),
        reason: "re not a number".into(),
    })?;
    let im = arr[1].as_f64().ok_or_else(|| Error::Schema {
        field: field.to_string(),
        reason: "im not a number".into(),
    })?;
    Ok(C64::new(re, im))
}

fn parse_cvec(v: &Value, field: &str) -> Result<Vec<C64>> {
    let arr = v.as_array().ok_or_else(|| Error::Schema {
        field: field.to_string(),
        reason: "expected array".into(),
    })?;
    arr.iter()
        .enumerate()
        .map(|(i, e)| parse_c64(e, &format!("{field}[{i}]")))
        .collect()
}

fn parse_component(v: &Value, side: &str) -> Result<NetworkComponent> {
    use crate::network::FactorSet;
    use crate::pade::DegreeEstimate;

    let sign = match get(v, "sign")?.as_str() {
        Some("plus") => ComponentSign::Plus,
        Some("minus") => ComponentSign::Minus,
        _ => {
            return Err(Error::Schema {
                field: format!("{side}.sign"),
                reason: "expected \"plus\" or \"minus\"".into(),
            })
        }
    };
    let gamma = get(v, "gamma")?;
    let garr = gamma.as_array().ok_or_else(|| Error::Schema {
        field: format!("{side}.gamma"),
        reason: "expected array of two complex pairs".into(),
    })?;
    if garr.len() != 2 {
        return Err(Error::Schema {
            field: format!("{side}.gamma"),
            reason: format!("expected 2 entries, got {}", garr.len()),
        });
    }
    let gamma0 = parse_c64(&garr[0], &format!("{side}.gamma[0]"))?;
    let gamma1 = parse_c64(&garr[1], &format!("{side}.gamma[1]"))?;
    let alpha = parse_cvec(get(v, "alpha")?, &format!("{side}.alpha"))?;
    let w1 = parse_cvec(get(v, "w1")?, &format!("{side}.w1"))?;
    let b1 = parse_cvec(get(v, "b1")?, &format!("{side}.b1"))?;
    let w2 = parse_cvec(get(v, "w2")?, &format!("{side}.w2"))?;
    let b2 = parse_c64(get(v, "b2")?, &format!("{side}.b2"))?;
    let p = parse_cvec(get(v, "p")?, &format!("{side}.p"))?;
    let q = parse_cvec(get(v, "q")?, &format!("{side}.q"))?;
    let c0 = parse_cvec(get(v, "C0")?, &format!("{side}.C0"))?;
    let c1 = parse_cvec(get(v, "C1")?, &format!("{side}.C1"))?;
    let ls_residual = get(v, "ls_residual")?.as_f64().unwrap_or(0.0);
    let rhs_norm = get(v, "rhs_norm")?.as_f64().unwrap_or(0.0);
    let seed = get(v, "seed")?.as_u64().unwrap_or(0);
    let reduction_trace: Vec<usize> = v
        .get("reduction_trace")
        .and_then(|x| x.as_array())
        .map(|a| a.iter().filter_map(|e| e.as_u64()).map(|u| u as usize).collect())
        .unwrap_or_default();
    let svd_iterations = v
        .get("svd_iterations")
        .and_then(|x| x.as_u64())
        .unwrap_or(0) as usize;
    let m = q.len() - 1;
    // structural revalidation
    if w1.len() != m || b1.len() != m || w2.len() != m || c0.len() != m || c1.len() != m {
        return Err(Error::Schema {
            field: format!("{side}.w1/b1/w2/C0/C1"),
            reason: format!("per-neuron vectors must all have length M = {m}"),
        });
    }
    let comp = NetworkComponent {
        sign,
        activation: Activation { alpha, gamma0, gamma1 },
        w1,
        b1,
        w2,
        b2,
        degrees: DegreeEstimate {
            n_deg: p.len() - 1,
            m_deg: m,
            p,
            q,
            tau: 0.0,
            svd_iterations,
            reduction_trace,
            trim_log: Vec::new(),
            analytic: false,
            clamped: false,
        },
        factors: FactorSet { c0, c1, rect: Rect::default(), seed },
        ls_residual,
        rhs_norm,
    };
    revalidate(&comp, side)?;
    Ok(comp)
}

/// Invariants re-checked on load: hidden-layer identities and the factor
/// product. The factor product is compared at a loose tolerance because
/// refactoring a clustered high-degree denominator through its roots loses
/// several digits.
fn revalidate(c: &NetworkComponent, side: &str) -> Result<()> {
    let g0 = c.activation.gamma0;
    let g1 = c.activation.gamma1;
    if g1.norm() == 0.0 {
        return Err(Error::Schema {
            field: format!("{side}.gamma"),
            reason: "gamma1 must be nonzero".into(),
        });
    }
    for l in 0..c.neuron_count() {
        let w_expect = c.factors.c1[l] / g1;
        let b_expect = (g0 - c.factors.c0[l]) / g1;
        if (c.w1[l] - w_expect).norm() > 1e-10 * (1.0 + w_expect.norm())
            || (c.b1[l] - b_expect).norm() > 1e-10 * (1.0 + b_expect.norm())
        {
            return Err(Error::Schema {
                field: format!("{side}.w1[{l}]"),
                reason: "hidden-layer identity w1 = C1/gamma1, b1 = (gamma0 - C0)/gamma1 violated"
                    .into(),
            });
        }
    }
    // expand prod (c0 + c1 z) and compare with q
    let mut poly = vec![C64::new(1.0, 0.0)];
    for l in 0..c.neuron_count() {
        let mut next = vec![C64::new(0.0, 0.0); poly.len() + 1];
        for (i, &pc) in poly.iter().enumerate() {
            next[i] += pc * c.factors.c0[l];
            next[i + 1] += pc * c.factors.c1[l];
        }
        poly = next;
    }
    let scale = crate::numkit::norm2(&c.degrees.q);
    for (i, qk) in c.degrees.q.iter().enumerate() {
        if (poly[i] - qk).norm() > 1e-6 * scale {
            return Err(Error::Schema {
                field: format!("{side}.C0/C1"),
                reason: format!("factor product deviates from q at coefficient {i}"),
            });
        }
    }
    Ok(())
}

pub fn model_from_json(v: &Value) -> Result<Model> {
    let plus = match v.get("plus") {
        None | Some(Value::Null) => None,
        Some(p) => Some(parse_component(p, "plus")?),
    };
    let minus = match v.get("minus") {
        None | Some(Value::Null) => None,
        Some(p) => Some(parse_component(p, "minus")?),
    };
    if plus.is_none() && minus.is_none() {
        return Err(Error::Schema {
            field: "plus/minus".into(),
            reason: "at least one component must be present".into(),
        });
    }
    let meta = v.get("meta").cloned().unwrap_or_else(|| json!({}));
    let n = meta.get("n").and_then(|x| x.as_u64()).unwrap_or(0) as usize;
    let rho = meta.get("rho").and_then(|x| x.as_f64()).unwrap_or(1.0);
    let mut config = FitConfig::new(rho, 0, 0);
    if let Some(t) = meta.get("tol").and_then(|x| x.as_f64()) {
        config.tol = t;
    }
    if let Some(s) = meta.get("seed").and_then(|x| x.as_u64()) {
        config.seed = s;
    }
    if let Some(z) = meta.get("z0") {
        if let Ok(z0) = parse_c64(z, "meta.z0") {
            config.z0 = z0;
        }
    }
    let mut pole_report = Vec::new();
    if let Some(c) = &plus {
        pole_report.extend(c.recover_poles());
    }
    if let Some(c) = &minus {
        pole_report.extend(c.recover_poles());
    }
    Ok(Model { plus, minus, config, n, pole_report })
}

pub fn load_model(path: &Path) -> Result<Model> {
    let text = std::fs::read_to_string(path)?;
    let v: Value = serde_json::from_str(&text)?;
    model_from_json(&v)
}

/// One grid record: position, magnitude and phase of the model value.
#[derive(Debug, Clone, Copy)]
pub struct GridPoint {
    pub re: f64,
    pub im: f64,
    pub abs: f64,
    pub arg: f64,
}

/// Evaluate the model on a rectangular grid. Points within 1e-12 of a
/// recovered pole report infinite magnitude.
pub fn eval_grid(
    m: &Model,
    re_range: (f64, f64),
    im_range: (f64, f64),
    resolution: (usize, usize),
) -> Result<Vec<GridPoint>> {
    if resolution.0 < 2 || resolution.1 < 2 {
        return Err(Error::Validation("grid resolution must be at least 2 per axis".into()));
    }
    let mut out = Vec::with_capacity(resolution.0 * resolution.1);
    for i in 0..resolution.0 {
        let re = re_range.0 + (re_range.1 - re_range.0) * i as f64 / (resolution.0 - 1) as f64;
        for j in 0..resolution.1 {
            let im = im_range.0 + (im_range.1 - im_range.0) * j as f64 / (resolution.1 - 1) as f64;
            let z = C64::new(re, im);
            let near_pole = m
                .pole_report
                .iter()
                .any(|p| !p.at_infinity && (z - p.location).norm() <= 1e-12);
            let at_origin_minus = m.minus.is_some() && z.norm() == 0.0;
            let val = if near_pole || at_origin_minus {
                None
            } else {
                Some(m.eval(z)?)
            };
            match val {
                Some(v) if v.re.is_finite() && v.im.is_finite() => {
                    out.push(GridPoint { re, im, abs: v.norm(), arg: v.arg() });
                }
                _ => out.push(GridPoint { re, im, abs: f64::INFINITY, arg: f64::NAN }),
            }
        }
    }
    Ok(out)
}
