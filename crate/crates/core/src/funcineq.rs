//! Functional inequalities driven by the slope `|∇̃f|`.
//!
//! Constant estimators maximise the ratio `LHS/RHS` of an inequality by
//! multi-start projected subgradient ascent. A reported best ratio is a lower
//! bound on the optimal constant; a "certified" verdict only means that the
//! configured search budget found nothing above the tested constant.

use std::f64::consts::E;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::calculus::{gradient_at, tilde_gradient, weak_infconv_values};
use crate::cost::CostFunction;
use crate::error::{check_len, Error, Result};
use crate::rng;
use crate::space::{check_detailed_balance, check_function, kernel_moment_l, KernelMatrix, MetricSpace, ProbMeasure};
use crate::transport::{check_transport_entropy, dual_sweep, log_mean_exp, Direction};

/// A ratio counts as a violation only above `constant + VIOLATION_SLACK`.
pub const VIOLATION_SLACK: f64 = 1e-9;
/// Slack in log scale for norm comparisons.
pub const NORM_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    CertifiedNoViolation,
    Violated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub restarts: usize,
    pub iterations: usize,
    pub samples: usize,
    /// Samples or restarts that produced a defined ratio.
    pub evaluated: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub inequality: String,
    /// The constant under test.
    pub constant: f64,
    /// The value the ratio is compared with (usually the constant itself).
    pub bound: f64,
    pub best_ratio: f64,
    /// The violator if any, otherwise the best input found.
    pub witness: Option<Vec<f64>>,
    /// `function` or `measure`.
    pub witness_kind: String,
    pub verdict: Verdict,
    pub stats: SearchStats,
}

impl InequalityReport {
    pub fn violated(&self) -> bool {
        self.verdict == Verdict::Violated
    }
}

/// `Var_μ(f)`.
pub fn variance(f: &[f64], mu: &ProbMeasure) -> f64 {
    let m = mu.integrate(f);
    mu.weights().iter().zip(f).map(|(w, v)| w * (v - m) * (v - m)).sum()
}

/// `ψ(w) = w e^w − e^w + 1 ≥ 0`, accurate near `w = 0`.
pub(crate) fn bregman(w: f64) -> f64 {
    if w.abs() < 0.05 {
        // Σ_{k≥2} (k−1) w^k / k!
        let mut term = w;
        let mut sum = 0.0;
        for k in 2..=12 {
            term *= w / k as f64;
            sum += (k - 1) as f64 * term;
        }
        sum
    } else {
        w.exp() * (w - 1.0) + 1.0
    }
}

/// Entropy of `e^{f−s}` for a shift `s`, together with `s` and `log ∫ e^{f−s} dμ`.
///
/// Written as `Z Σ μ(x) ψ(f(x) − s − log Z)`, a sum of non-negative terms, so
/// small-amplitude `f` does not lose the `O(f²)` entropy to cancellation.
fn entropy_exp_shifted(f: &[f64], mu: &ProbMeasure) -> (f64, f64, f64) {
    let support = mu.support();
    let top = support.iter().map(|&x| f[x]).fold(f64::NEG_INFINITY, f64::max);
    let mean = mu.integrate(f);
    let shift = if top - mean > 30.0 { top } else { mean };
    let ln_z = support
        .iter()
        .map(|&x| mu[x] * (f[x] - shift).exp_m1())
        .sum::<f64>()
        .ln_1p();
    let ent = ln_z.exp()
        * support
            .iter()
            .map(|&x| mu[x] * bregman(f[x] - shift - ln_z))
            .sum::<f64>();
    (ent, shift, ln_z)
}

/// `Ent_μ(e^f) = ∫ f e^f dμ − ∫ e^f dμ · log ∫ e^f dμ`.
pub fn entropy_exp(f: &[f64], mu: &ProbMeasure) -> f64 {
    let (ent, shift, _) = entropy_exp_shifted(f, mu);
    ent * shift.exp()
}

/// `‖g‖_q = (∫ g^q dμ)^{1/q}`, and `exp ∫ log g dμ` for `q = 0`.
pub fn lp_norm(g: &[f64], mu: &ProbMeasure, q: f64) -> Result<f64> {
    check_len("function", mu.len(), g.len())?;
    let support = mu.support();
    if q <= 0.0 && support.iter().any(|&x| g[x] <= 0.0) {
        return Err(Error::Domain(format!("q = {q} needs a strictly positive function")));
    }
    if q == 0.0 {
        return Ok(support.iter().map(|&x| mu[x] * g[x].ln()).sum::<f64>().exp());
    }
    Ok(support
        .iter()
        .map(|&x| mu[x] * g[x].abs().powf(q))
        .sum::<f64>()
        .powf(1.0 / q))
}

/// `log ‖e^h‖_q`.
pub fn log_norm_exp(h: &[f64], mu: &ProbMeasure, q: f64) -> f64 {
    if q == 0.0 {
        mu.integrate(h)
    } else {
        log_mean_exp(&h.iter().map(|v| q * v).collect::<Vec<_>>(), mu) / q
    }
}

/// `sup_{x≠y} |f(x) − f(y)| / d(x,y)`.
pub fn lipschitz(f: &[f64], space: &MetricSpace) -> f64 {
    let n = space.len();
    let mut l: f64 = 0.0;
    for x in 0..n {
        for y in x + 1..n {
            l = l.max((f[x] - f[y]).abs() / space.dist(x, y));
        }
    }
    l
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchBudget {
    pub restarts: usize,
    pub iterations: usize,
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            restarts: 64,
            iterations: 500,
        }
    }
}

/// Ratio and its (sub)gradient; `None` where the ratio is undefined.
type Objective<'a> = dyn Fn(&[f64]) -> Option<(f64, Vec<f64>)> + Sync + 'a;

struct Run {
    ratio: f64,
    f: Vec<f64>,
}

/// Projected subgradient ascent with step `0.1/√k` along the normalised gradient.
fn ascend(mut f: Vec<f64>, iterations: usize, obj: &Objective, project: &dyn Fn(&mut Vec<f64>)) -> Option<Run> {
    project(&mut f);
    let mut best: Option<Run> = None;
    for k in 1..=iterations + 1 {
        let Some((ratio, grad)) = obj(&f) else {
            break;
        };
        if best.as_ref().is_none_or(|b| ratio > b.ratio) {
            best = Some(Run { ratio, f: f.clone() });
        }
        if k > iterations {
            break;
        }
        let norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            break;
        }
        let step = 0.1 / (k as f64).sqrt();
        for (v, g) in f.iter_mut().zip(&grad) {
            *v += step * g / norm;
        }
        project(&mut f);
    }
    best
}

fn gaussian(n: usize, amp: f64, r: &mut rng::Stream) -> Vec<f64> {
    (0..n).map(|_| amp * r.sample::<f64, _>(StandardNormal)).collect()
}

/// Indicator of a random ball, scaled by `amp`.
fn ball_indicator(space: &MetricSpace, amp: f64, r: &mut rng::Stream) -> Vec<f64> {
    let n = space.len();
    let centre = r.random_range(0..n);
    let mut radii: Vec<f64> = space.row(centre).to_vec();
    radii.sort_by(f64::total_cmp);
    radii.dedup();
    let radius = radii[r.random_range(0..radii.len())];
    (0..n)
        .map(|y| if space.dist(centre, y) <= radius { amp } else { 0.0 })
        .collect()
}

fn merge(runs: Vec<Option<Run>>) -> Option<Run> {
    let mut best: Option<Run> = None;
    for run in runs.into_iter().flatten() {
        if best.as_ref().is_none_or(|b| run.ratio > b.ratio) {
            best = Some(run);
        }
    }
    best
}

fn report(
    id: &str,
    constant: f64,
    best: Option<Run>,
    budget: SearchBudget,
    evaluated: usize,
    seed: u64,
) -> InequalityReport {
    let best_ratio = best.as_ref().map_or(0.0, |b| b.ratio);
    InequalityReport {
        inequality: id.to_string(),
        constant,
        bound: constant,
        best_ratio,
        witness: best.map(|b| b.f),
        witness_kind: "function".into(),
        verdict: if best_ratio > constant + VIOLATION_SLACK {
            Verdict::Violated
        } else {
            Verdict::CertifiedNoViolation
        },
        stats: SearchStats {
            restarts: budget.restarts,
            iterations: budget.iterations,
            samples: 0,
            evaluated,
            seed,
        },
    }
}

/// `Var_μ(f) / ∫ |∇̃f|² dμ` with its subgradient.
pub fn poincare_ratio(f: &[f64], mu: &ProbMeasure, space: &MetricSpace) -> Option<(f64, Vec<f64>)> {
    let n = space.len();
    let m = mu.integrate(f);
    let var = variance(f, mu);
    let mut energy = 0.0;
    let mut d_energy = vec![0.0; n];
    for x in mu.support() {
        let (g, arg) = gradient_at(f, x, space);
        if let Some(y) = arg {
            energy += mu[x] * g * g;
            let c = 2.0 * mu[x] * g / space.dist(x, y);
            d_energy[x] += c;
            d_energy[y] -= c;
        }
    }
    if energy <= 0.0 {
        return None;
    }
    let ratio = var / energy;
    let grad = (0..n)
        .map(|x| (2.0 * mu[x] * (f[x] - m) - ratio * d_energy[x]) / energy)
        .collect();
    Some((ratio, grad))
}

/// Lower bound on the Poincaré constant; compared with `D²/2` on the support.
pub fn poincare_estimate(
    mu: &ProbMeasure,
    space: &MetricSpace,
    restarts: usize,
    seed: u64,
) -> Result<InequalityReport> {
    poincare_estimate_with(
        mu,
        space,
        SearchBudget {
            restarts,
            ..SearchBudget::default()
        },
        seed,
    )
}

pub fn poincare_estimate_with(
    mu: &ProbMeasure,
    space: &MetricSpace,
    budget: SearchBudget,
    seed: u64,
) -> Result<InequalityReport> {
    mu.check_space(space)?;
    let diam = space.diameter_on(&mu.support());
    let bound = diam * diam / 2.0;
    let n = space.len();
    let obj = |f: &[f64]| poincare_ratio(f, mu, space);
    let project = |f: &mut Vec<f64>| {
        let lo = f.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if hi > lo {
            for v in f.iter_mut() {
                *v = (*v - lo) / (hi - lo);
            }
        }
    };
    let runs: Vec<Option<Run>> = (0..budget.restarts)
        .into_par_iter()
        .map(|k| {
            let mut r = rng::stream(seed, k as u64);
            let f0 = if k % 2 == 0 {
                gaussian(n, 1.0, &mut r)
            } else {
                ball_indicator(space, 1.0, &mut r)
            };
            ascend(f0, budget.iterations, &obj, &project)
        })
        .collect();
    let evaluated = runs.iter().flatten().count();
    let mut rep = report("poincare", bound, merge(runs), budget, evaluated, seed);
    rep.constant = rep.best_ratio;
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
pub enum MlsiType {
    /// `Ent_μ(e^f) ≤ C ∫ α*(|∇̃f|) e^f dμ`.
    I,
    /// `Ent_μ(e^f) ≤ C ∫ α*(|∇̃(−f)|) e^f dμ`.
    II,
}

/// Slope entering the modified log-Sobolev inequality, with its steepest competitor.
fn mlsi_slope(f: &[f64], x: usize, kind: MlsiType, space: &MetricSpace) -> (f64, Option<usize>) {
    match kind {
        MlsiType::I => gradient_at(f, x, space),
        MlsiType::II => {
            let mut best = 0.0;
            let mut arg = None;
            for (y, &d) in space.row(x).iter().enumerate() {
                if y != x {
                    let s = (f[y] - f[x]).max(0.0) / d;
                    if s > best {
                        best = s;
                        arg = Some(y);
                    }
                }
            }
            (best, arg)
        }
    }
}

/// `Ent_μ(e^f) / ∫ α*(slope) e^f dμ` with its subgradient.
///
/// `None` for `0/0`; a ratio of `0` with no gradient where `α*` is infinite.
pub fn mlsi_ratio(
    f: &[f64],
    mu: &ProbMeasure,
    cost: &CostFunction,
    kind: MlsiType,
    space: &MetricSpace,
) -> Option<(f64, Vec<f64>)> {
    let n = space.len();
    let support = mu.support();
    let (ent, top, ln_z) = entropy_exp_shifted(f, mu);
    let mut den = 0.0;
    let mut d_den = vec![0.0; n];
    for &x in &support {
        let e = (f[x] - top).exp();
        let (g, arg) = mlsi_slope(f, x, kind, space);
        let a = cost.conjugate(g).finite()?;
        den += mu[x] * a * e;
        d_den[x] += mu[x] * a * e;
        if let Some(y) = arg {
            let c = mu[x] * cost.conjugate_deriv(g) * e / space.dist(x, y);
            match kind {
                MlsiType::I => {
                    d_den[x] += c;
                    d_den[y] -= c;
                }
                MlsiType::II => {
                    d_den[y] += c;
                    d_den[x] -= c;
                }
            }
        }
    }
    if den <= 0.0 {
        return None;
    }
    let ratio = ent / den;
    let grad = (0..n)
        .map(|x| {
            let d_ent = if mu[x] > 0.0 {
                mu[x] * (f[x] - top).exp() * (f[x] - top - ln_z)
            } else {
                0.0
            };
            (d_ent - ratio * d_den[x]) / den
        })
        .collect();
    Some((ratio, grad))
}

/// Search for `f` with `Ent_μ(e^f) > C ∫ α*(|∇̃(±f)|) e^f dμ`.
pub fn mlsi_verify(
    mu: &ProbMeasure,
    c: f64,
    cost: &CostFunction,
    kind: MlsiType,
    space: &MetricSpace,
    restarts: usize,
    seed: u64,
) -> Result<InequalityReport> {
    mlsi_verify_with(
        mu,
        c,
        cost,
        kind,
        space,
        SearchBudget {
            restarts,
            ..SearchBudget::default()
        },
        seed,
    )
}

pub fn mlsi_verify_with(
    mu: &ProbMeasure,
    c: f64,
    cost: &CostFunction,
    kind: MlsiType,
    space: &MetricSpace,
    budget: SearchBudget,
    seed: u64,
) -> Result<InequalityReport> {
    mu.check_space(space)?;
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Range(format!("constant must be positive, got {c}")));
    }
    let n = space.len();
    let obj = |f: &[f64]| match mlsi_ratio(f, mu, cost, kind, space) {
        // outside the conjugate's domain the ratio is 0 and the projection shrinks f
        None if !finite_denominator(f, mu, cost, kind, space) => Some((0.0, vec![0.0; n])),
        other => other,
    };
    let project = |f: &mut Vec<f64>| {
        let m = mu.integrate(f);
        let lo = f.iter().copied().fold(f64::INFINITY, f64::min) - m;
        let hi = f.iter().copied().fold(f64::NEG_INFINITY, f64::max) - m;
        let scale = if hi - lo > 40.0 { 40.0 / (hi - lo) } else { 1.0 };
        for v in f.iter_mut() {
            *v = (*v - m) * scale;
        }
        for _ in 0..60 {
            if finite_denominator(f, mu, cost, kind, space) {
                break;
            }
            for v in f.iter_mut() {
                *v *= 0.5;
            }
        }
    };
    let runs: Vec<Option<Run>> = (0..budget.restarts)
        .into_par_iter()
        .map(|k| {
            let mut r = rng::stream(seed, k as u64);
            let amp = 10f64.powf(r.random_range(-2.0..1.0));
            let sign = if r.random::<bool>() { 1.0 } else { -1.0 };
            let f0 = if k % 2 == 0 {
                gaussian(n, amp, &mut r)
            } else {
                ball_indicator(space, sign * amp, &mut r)
            };
            ascend(f0, budget.iterations, &obj, &project)
        })
        .collect();
    let evaluated = runs.iter().flatten().count();
    let id = match kind {
        MlsiType::I => "mlsi_I",
        MlsiType::II => "mlsi_II",
    };
    Ok(report(id, c, merge(runs), budget, evaluated, seed))
}

fn finite_denominator(f: &[f64], mu: &ProbMeasure, cost: &CostFunction, kind: MlsiType, space: &MetricSpace) -> bool {
    mu.support()
        .into_iter()
        .all(|x| cost.conjugate(mlsi_slope(f, x, kind, space).0).is_finite())
}

/// `Σ_{x,y} (e^{f(y)} − e^{f(x)})(f(y) − f(x)) μ(x) K(x,y)`.
pub fn classical_mlsi_rhs(f: &[f64], mu: &ProbMeasure, k: &KernelMatrix) -> Result<f64> {
    check_len("function", mu.len(), f.len())?;
    check_len("kernel", mu.len(), k.len())?;
    let n = f.len();
    let mut s = 0.0;
    for x in 0..n {
        for y in 0..n {
            s += (f[y].exp() - f[x].exp()) * (f[y] - f[x]) * mu[x] * k.get(x, y);
        }
    }
    Ok(s)
}

/// `Σ_{x,y} (f(y) − f(x))² μ(x) K(x,y)`.
pub fn gross_rhs(f: &[f64], mu: &ProbMeasure, k: &KernelMatrix) -> Result<f64> {
    check_len("function", mu.len(), f.len())?;
    check_len("kernel", mu.len(), k.len())?;
    let n = f.len();
    let mut s = 0.0;
    for x in 0..n {
        for y in 0..n {
            s += (f[y] - f[x]).powi(2) * mu[x] * k.get(x, y);
        }
    }
    Ok(s)
}

/// Ratio of the classical Dirichlet form to `Σ |∇̃f|² e^f μ`, checked against `2L`.
pub fn toto_bridge_check(
    mu: &ProbMeasure,
    k: &KernelMatrix,
    space: &MetricSpace,
    samples: usize,
    seed: u64,
) -> Result<InequalityReport> {
    mu.check_space(space)?;
    let balance = check_detailed_balance(mu, k)?;
    if !balance.holds {
        return Err(Error::Premise(format!(
            "detailed balance fails at {:?} (defect {})",
            balance.worst, balance.max_defect
        )));
    }
    let l = kernel_moment_l(space, k)?;
    let n = space.len();
    let ratios: Vec<Option<(f64, Vec<f64>)>> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, i as u64);
            let amp = 10f64.powf(r.random_range(-2.0..1.0));
            let f = gaussian(n, amp, &mut r);
            let top = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let shifted: Vec<f64> = f.iter().map(|v| v - top).collect();
            let lhs = classical_mlsi_rhs(&shifted, mu, k).ok()?;
            let grad = tilde_gradient(&shifted, space);
            let rhs: f64 = (0..n).map(|x| grad[x] * grad[x] * shifted[x].exp() * mu[x]).sum();
            (rhs > 0.0).then(|| (lhs / rhs, f))
        })
        .collect();
    let evaluated = ratios.iter().flatten().count();
    let best = merge(
        ratios
            .into_iter()
            .map(|o| o.map(|(ratio, f)| Run { ratio, f }))
            .collect(),
    );
    let mut rep = report(
        "classical_to_slope_bridge",
        2.0 * l,
        best,
        SearchBudget {
            restarts: 0,
            iterations: 0,
        },
        evaluated,
        seed,
    );
    rep.stats.samples = samples;
    Ok(rep)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormComparison {
    pub exponent: f64,
    pub log_lhs: f64,
    pub log_rhs: f64,
    pub holds: bool,
}

/// `‖e^{Q̃_t f}‖_{ρ + 2t/C} ≤ ‖e^f‖_ρ` with the quadratic cost.
pub fn hypercontractivity_check(
    mu: &ProbMeasure,
    c: f64,
    f: &[f64],
    rho: f64,
    t: f64,
    space: &MetricSpace,
) -> Result<NormComparison> {
    mu.check_space(space)?;
    check_function(space, f)?;
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Range(format!("constant must be positive, got {c}")));
    }
    let in_range = if rho >= 0.0 {
        t >= 0.0
    } else {
        t >= 0.0 && t <= -rho * c / 2.0
    };
    if !(in_range && t.is_finite() && rho.is_finite()) {
        return Err(Error::Range(format!(
            "(rho, t) = ({rho}, {t}) outside the admissible range for C = {c}"
        )));
    }
    let q = if t == 0.0 {
        f.to_vec()
    } else {
        weak_infconv_values(f, t, &CostFunction::quadratic(), space)?
    };
    let exponent = rho + 2.0 * t / c;
    let log_lhs = log_norm_exp(&q, mu, exponent);
    let log_rhs = log_norm_exp(f, mu, rho);
    Ok(NormComparison {
        exponent,
        log_lhs,
        log_rhs,
        holds: log_lhs <= log_rhs + NORM_SLACK,
    })
}

/// `K(c) = (C/2) ((2 + 2e² + c√C)/(2 − c√C))² e^{c√(5C)}`.
pub fn bobkov_ledoux_k(c_poincare: f64, c: f64) -> Result<f64> {
    if !(c_poincare.is_finite() && c_poincare > 0.0) {
        return Err(Error::Range(format!(
            "Poincaré constant must be positive, got {c_poincare}"
        )));
    }
    let s = c_poincare.sqrt();
    if !(c > 0.0 && c * s < 2.0) {
        return Err(Error::Domain(format!(
            "need 0 < c < 2/sqrt(C) = {}, got c = {c}",
            2.0 / s
        )));
    }
    let frac = (2.0 + 2.0 * E * E + c * s) / (2.0 - c * s);
    Ok(c_poincare / 2.0 * frac * frac * (c * (5.0 * c_poincare).sqrt()).exp())
}

/// Quadratic-linear parameters attached to `K(c)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QlinConstants {
    pub k: f64,
    pub a: f64,
    pub h: f64,
    /// Transport constant `K/2`.
    pub c2: f64,
}

impl QlinConstants {
    pub fn cost(&self) -> CostFunction {
        CostFunction::QuadraticLinear { a: self.a, h: self.h }
    }
}

pub fn qlin_constants(c_poincare: f64, c: f64) -> Result<QlinConstants> {
    let k = bobkov_ledoux_k(c_poincare, c)?;
    Ok(QlinConstants {
        k,
        a: 1.0 / (4.0 * k),
        h: 2.0 * c * k,
        c2: k / 2.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingVerdict {
    pub lipschitz: f64,
    /// `Q̃_1(tf)`.
    pub lhs: Vec<f64>,
    /// `t Q̃_t f`.
    pub rhs: Vec<f64>,
    pub max_diff: f64,
    pub holds: bool,
}

/// `Q̃_1(tf) = t Q̃_t f` for the quadratic-linear cost.
///
/// Requires `t < ah/l` and `l ≤ 2ah`, where `l` is the Lipschitz constant of `f`.
pub fn qlin_scaling_check(f: &[f64], t: f64, a: f64, h: f64, space: &MetricSpace) -> Result<ScalingVerdict> {
    check_function(space, f)?;
    let cost = CostFunction::quadratic_linear(a, h)?;
    let l = lipschitz(f, space);
    if !(t > 0.0 && (l == 0.0 || t < a * h / l)) {
        return Err(Error::Range(format!("need 0 < t < ah/l = {}, got t = {t}", a * h / l)));
    }
    if l > 2.0 * a * h {
        return Err(Error::Range(format!(
            "Lipschitz constant {l} exceeds the linear slope 2ah = {}",
            2.0 * a * h
        )));
    }
    let tf: Vec<f64> = f.iter().map(|v| t * v).collect();
    let lhs = weak_infconv_values(&tf, 1.0, &cost, space)?;
    let rhs: Vec<f64> = weak_infconv_values(f, t, &cost, space)?
        .into_iter()
        .map(|v| t * v)
        .collect();
    let max_diff = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(ScalingVerdict {
        lipschitz: l,
        lhs,
        rhs,
        max_diff,
        holds: max_diff <= 1e-10,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PropVerdict {
    Holds { lhs: f64, rhs: f64 },
    Violated { lhs: f64, rhs: f64 },
    PremiseFailed { reason: String },
}

impl PropVerdict {
    fn compare(lhs: f64, rhs: f64) -> Self {
        if lhs <= rhs * (1.0 + 1e-12) + 1e-15 {
            PropVerdict::Holds { lhs, rhs }
        } else {
            PropVerdict::Violated { lhs, rhs }
        }
    }

    pub fn is_violated(&self) -> bool {
        matches!(self, PropVerdict::Violated { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AppendixReport {
    /// `Var(f e^{f/2}) ≤ C ∫ |∇̃f|² (1 + e⁴ + f + f²/4) e^f dμ`.
    pub variance_bound: PropVerdict,
    /// `∫ f² e^f ≤ C ((2+2e²+c√C)/(2−c√C))² ∫ |∇̃f|² e^f`.
    pub weighted_bound: PropVerdict,
    /// `∫ f² ≤ e^{c√(5C)} ∫ f² e^{−|f|}`.
    pub moment_bound: PropVerdict,
}

impl AppendixReport {
    pub fn any_violated(&self) -> bool {
        self.variance_bound.is_violated() || self.weighted_bound.is_violated() || self.moment_bound.is_violated()
    }
}

/// The three auxiliary inequalities used to pass from Poincaré to the
/// quadratic-linear modified log-Sobolev inequality.
pub fn appendix_checks(
    mu: &ProbMeasure,
    c_poincare: f64,
    f: &[f64],
    c: f64,
    space: &MetricSpace,
) -> Result<AppendixReport> {
    mu.check_space(space)?;
    check_function(space, f)?;
    if !(c_poincare.is_finite() && c_poincare > 0.0) {
        return Err(Error::Range(format!(
            "Poincaré constant must be positive, got {c_poincare}"
        )));
    }
    let n = space.len();
    let grad = tilde_gradient(f, space);
    let integrate = |h: &dyn Fn(usize) -> f64| (0..n).filter(|&x| mu[x] > 0.0).map(|x| mu[x] * h(x)).sum::<f64>();

    let g: Vec<f64> = f.iter().map(|v| v * (v / 2.0).exp()).collect();
    let variance_bound = PropVerdict::compare(
        variance(&g, mu),
        c_poincare * integrate(&|x| grad[x].powi(2) * (1.0 + E.powi(4) + f[x] + f[x] * f[x] / 4.0) * f[x].exp()),
    );

    let mean = mu.integrate(f);
    let scale = f.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let lip = lipschitz(f, space);
    let centred = mean.abs() <= 1e-10 * scale;
    let lip_ok = lip <= c * (1.0 + 1e-12);
    let premise = |extra: Option<&str>| -> Option<String> {
        let mut r = Vec::new();
        if !centred {
            r.push(format!("mean {mean} is not zero"));
        }
        if !lip_ok {
            r.push(format!("Lipschitz constant {lip} exceeds c = {c}"));
        }
        if let Some(e) = extra {
            r.push(e.to_string());
        }
        (!r.is_empty()).then(|| r.join("; "))
    };

    let s = c_poincare.sqrt();
    let weighted_bound = match premise((c * s >= 2.0).then_some("c must be below 2/sqrt(C)")) {
        Some(reason) => PropVerdict::PremiseFailed { reason },
        None => {
            let frac = (2.0 + 2.0 * E * E + c * s) / (2.0 - c * s);
            PropVerdict::compare(
                integrate(&|x| f[x] * f[x] * f[x].exp()),
                c_poincare * frac * frac * integrate(&|x| grad[x].powi(2) * f[x].exp()),
            )
        }
    };
    let moment_bound = match premise(None) {
        Some(reason) => PropVerdict::PremiseFailed { reason },
        None => PropVerdict::compare(
            integrate(&|x| f[x] * f[x]),
            (c * (5.0 * c_poincare).sqrt()).exp() * integrate(&|x| f[x] * f[x] * (-f[x].abs()).exp()),
        ),
    };
    Ok(AppendixReport {
        variance_bound,
        weighted_bound,
        moment_bound,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HerbstVerdict {
    /// `(h, μ(f ≥ h), exp(−h²/(4C)))` at every positive level of `f`.
    pub levels: Vec<(f64, f64, f64)>,
    pub holds: bool,
}

/// `μ(f ≥ h) ≤ exp(−h²/(4C))` for a centred 1-Lipschitz `f`.
pub fn herbst_check(mu: &ProbMeasure, c: f64, f: &[f64], space: &MetricSpace) -> Result<HerbstVerdict> {
    mu.check_space(space)?;
    check_function(space, f)?;
    let scale = f.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    if mu.integrate(f).abs() > 1e-10 * scale || lipschitz(f, space) > 1.0 + 1e-12 {
        return Err(Error::Premise("f must be centred and 1-Lipschitz".into()));
    }
    let mut levels: Vec<f64> = f.iter().copied().filter(|v| *v > 0.0).collect();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    let levels: Vec<(f64, f64, f64)> = levels
        .into_iter()
        .map(|h| {
            let tail: f64 = (0..f.len()).filter(|&x| f[x] >= h).map(|x| mu[x]).sum();
            (h, tail, (-h * h / (4.0 * c)).exp())
        })
        .collect();
    let holds = levels.iter().all(|&(_, tail, b)| tail <= b + 1e-12);
    Ok(HerbstVerdict { levels, holds })
}

/// A 1-Lipschitz centred function: random-weight distance profile to a point.
pub fn sample_lipschitz_centred(mu: &ProbMeasure, space: &MetricSpace, c: f64, r: &mut rng::Stream) -> Vec<f64> {
    let n = space.len();
    // infimum of random 1-Lipschitz cones is 1-Lipschitz
    let cones = 1 + r.random_range(0..n.min(4));
    let mut f = vec![f64::INFINITY; n];
    for _ in 0..cones {
        let z = r.random_range(0..n);
        let off: f64 = r.random_range(0.0..space.diameter().max(1.0));
        for (y, fy) in f.iter_mut().enumerate() {
            *fy = fy.min(space.dist(z, y) + off);
        }
    }
    let sign = if r.random::<bool>() { 1.0 } else { -1.0 };
    let lam: f64 = r.random_range(0.0..1.0);
    let mut f: Vec<f64> = f.iter().map(|v| sign * lam * c * v).collect();
    let m = mu.integrate(&f);
    for v in f.iter_mut() {
        *v -= m;
    }
    f
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainEntry {
    pub name: String,
    pub claim: String,
    pub constant: f64,
    pub best_ratio: f64,
    pub bound: f64,
    pub verdict: Verdict,
}

impl ChainEntry {
    fn from_report(name: &str, claim: String, r: &InequalityReport) -> Self {
        Self {
            name: name.into(),
            claim,
            constant: r.constant,
            best_ratio: r.best_ratio,
            bound: r.bound,
            verdict: r.verdict,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainOptions {
    pub budget: SearchBudget,
    pub samples: usize,
    pub seed: u64,
    /// Modified log-Sobolev constant (`α*` form, quadratic cost) to start from;
    /// estimated when absent.
    pub mlsi_constant: Option<f64>,
}

impl Default for ChainOptions {
    fn default() -> Self {
        Self {
            budget: SearchBudget::default(),
            samples: 1000,
            seed: 0,
            mlsi_constant: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainReport {
    pub poincare_estimate: f64,
    pub mlsi_constant: f64,
    pub entries: Vec<ChainEntry>,
    pub violations: usize,
}

/// Run the implications between the modified log-Sobolev, transport–entropy,
/// dual, hypercontractive, concentration and Poincaré statements at the
/// constants they claim, recording what the searches find.
pub fn chain_verify(mu: &ProbMeasure, space: &MetricSpace, opts: ChainOptions) -> Result<ChainReport> {
    let q = CostFunction::quadratic();
    let seed = opts.seed;
    let mut entries = Vec::new();

    let poincare = poincare_estimate_with(mu, space, opts.budget, seed)?;
    let c_p = poincare.best_ratio;
    entries.push(ChainEntry::from_report(
        "poincare_diameter",
        "Poincaré constant at most D^2/2".into(),
        &poincare,
    ));

    let (c1, mlsi) = match opts.mlsi_constant {
        Some(c1) => (c1, mlsi_verify_with(mu, c1, &q, MlsiType::I, space, opts.budget, seed)?),
        None => {
            let probe = mlsi_verify_with(mu, f64::MAX, &q, MlsiType::I, space, opts.budget, seed)?;
            let c1 = probe.best_ratio;
            (c1, mlsi_verify_with(mu, c1, &q, MlsiType::I, space, opts.budget, seed)?)
        }
    };
    entries.push(ChainEntry::from_report(
        "mlsi_I",
        format!("modified log-Sobolev (type I) at C = {c1}"),
        &mlsi,
    ));

    let te_half = check_transport_entropy(mu, c1 / 2.0, &q, Direction::I, space, opts.samples, seed)?;
    entries.push(ChainEntry::from_report(
        "transport_at_half",
        format!("weak transport-entropy (type I) at C/2 = {}", c1 / 2.0),
        &te_half,
    ));
    let te_full = check_transport_entropy(mu, c1, &q, Direction::I, space, opts.samples, seed)?;
    entries.push(ChainEntry::from_report(
        "transport_at_full",
        format!("weak transport-entropy (type I) at C = {c1}"),
        &te_full,
    ));
    if !te_full.violated() {
        // a transport certificate at C₂ should give the mLSI at 2C₂
        entries.push(ChainEntry {
            name: "transport_to_mlsi".into(),
            claim: format!("modified log-Sobolev sweep at most 2 C2 = {}", 2.0 * c1),
            constant: 2.0 * c1,
            best_ratio: mlsi.best_ratio,
            bound: 2.0 * c1,
            verdict: if mlsi.best_ratio <= 2.0 * c1 + VIOLATION_SLACK {
                Verdict::CertifiedNoViolation
            } else {
                Verdict::Violated
            },
        });
    }
    let dual = dual_sweep(mu, c1, &q, space, opts.samples, seed)?;
    entries.push(ChainEntry::from_report(
        "dual_form",
        format!("dual exponential inequality with exponent 2/C, C = {c1}"),
        &dual,
    ));

    for rho in [0.0, 0.5, 1.0] {
        let rep = hypercontractivity_sweep(mu, c1, rho, &[0.1, 0.25, 0.5, 1.0, 2.0], space, opts.samples / 10, seed)?;
        entries.push(ChainEntry::from_report(
            &format!("hypercontractivity_rho_{rho}"),
            format!("norm decrease with exponent rho + 2t/C, rho = {rho}"),
            &rep,
        ));
    }

    let mut herbst_fail = 0;
    for i in 0..opts.samples / 10 {
        let mut r = rng::stream(seed, i as u64);
        let f = sample_lipschitz_centred(mu, space, 1.0, &mut r);
        if !herbst_check(mu, c1, &f, space)?.holds {
            herbst_fail += 1;
        }
    }
    entries.push(ChainEntry {
        name: "herbst".into(),
        claim: format!("tails of 1-Lipschitz functions below exp(-h^2/(4C)), C = {c1}"),
        constant: c1,
        best_ratio: herbst_fail as f64,
        bound: 0.0,
        verdict: if herbst_fail == 0 {
            Verdict::CertifiedNoViolation
        } else {
            Verdict::Violated
        },
    });

    if c_p > 0.0 {
        let c = 1.0 / c_p.sqrt();
        let qc = qlin_constants(c_p, c)?;
        let rep = mlsi_verify_with(mu, qc.k, &qc.cost(), MlsiType::I, space, opts.budget, seed)?;
        entries.push(ChainEntry::from_report(
            "poincare_to_qlin_mlsi",
            format!("quadratic-linear modified log-Sobolev at K(c) = {}, c = {c}", qc.k),
            &rep,
        ));
        // converse: an mLSI constant C' for (a, h) yields Poincaré at C'/(2a)
        let probe = mlsi_verify_with(mu, f64::MAX, &qc.cost(), MlsiType::I, space, opts.budget, seed)?;
        let implied = probe.best_ratio / (2.0 * qc.a);
        entries.push(ChainEntry {
            name: "qlin_mlsi_to_poincare".into(),
            claim: format!("Poincaré estimate {c_p} at most C'/(2a) = {implied}"),
            constant: implied,
            best_ratio: c_p,
            bound: implied,
            verdict: if c_p <= implied + VIOLATION_SLACK {
                Verdict::CertifiedNoViolation
            } else {
                Verdict::Violated
            },
        });
    }

    let violations = entries.iter().filter(|e| e.verdict == Verdict::Violated).count();
    Ok(ChainReport {
        poincare_estimate: c_p,
        mlsi_constant: c1,
        entries,
        violations,
    })
}

/// Random function with a log-uniform amplitude in `[1e-2, 10]`.
pub fn sample_function(n: usize, r: &mut rng::Stream) -> Vec<f64> {
    let amp = 10f64.powf(r.random_range(-2.0..1.0));
    (0..n).map(|_| amp * r.random_range(-1.0..1.0)).collect()
}

/// Largest `‖e^{Q̃_t f}‖_{ρ+2t/C} / ‖e^f‖_ρ` over random `f` and the admissible `t` in `t_grid`.
pub fn hypercontractivity_sweep(
    mu: &ProbMeasure,
    c: f64,
    rho: f64,
    t_grid: &[f64],
    space: &MetricSpace,
    samples: usize,
    seed: u64,
) -> Result<InequalityReport> {
    let ts: Vec<f64> = t_grid
        .iter()
        .copied()
        .filter(|&t| rho >= 0.0 || t <= -rho * c / 2.0)
        .collect();
    let runs: Vec<Option<Run>> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<Option<Run>> {
            let mut r = rng::stream(seed, i as u64);
            let f = sample_function(space.len(), &mut r);
            let mut best: Option<Run> = None;
            for &t in &ts {
                let v = hypercontractivity_check(mu, c, &f, rho, t, space)?;
                let ratio = (v.log_lhs - v.log_rhs).exp();
                if best.as_ref().is_none_or(|b| ratio > b.ratio) {
                    best = Some(Run { ratio, f: f.clone() });
                }
            }
            Ok(best)
        })
        .collect::<Result<_>>()?;
    let evaluated = runs.iter().flatten().count();
    let best = merge(runs);
    let best_ratio = best.as_ref().map_or(0.0, |b| b.ratio);
    Ok(InequalityReport {
        inequality: format!("hypercontractivity_rho_{rho}"),
        constant: c,
        bound: 1.0,
        best_ratio,
        witness: best.map(|b| b.f),
        witness_kind: "function".into(),
        verdict: if best_ratio.ln() > NORM_SLACK {
            Verdict::Violated
        } else {
            Verdict::CertifiedNoViolation
        },
        stats: SearchStats {
            restarts: 0,
            iterations: 0,
            samples,
            evaluated,
            seed,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoPointRow {
    pub t: f64,
    pub value_at_0: f64,
    pub value_at_1: f64,
    pub time_derivative_at_0: f64,
    pub residual_at_0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoPointReport {
    /// `f = (1, 0)`, quadratic cost.
    pub table: Vec<TwoPointRow>,
    pub poincare: InequalityReport,
    pub mlsi_type_i: InequalityReport,
    pub mlsi_type_ii: InequalityReport,
    /// `(u, Ent(e^f) / ∫ ½|∇̃f|² e^f)` for `f = (u, 0)`; negative `u` is the type II direction.
    pub scalar_ratio: Vec<(f64, f64)>,
    /// `T̃(δ_0|μ)` with `μ` uniform: the second point must move all its mass.
    pub transport_to_dirac: f64,
    /// `T̃(μ|δ_0)`.
    pub transport_from_dirac: f64,
}

/// The worked two-point example: uniform measure on `{0, 1}` at distance 1.
pub fn two_point_report(budget: SearchBudget, seed: u64) -> Result<TwoPointReport> {
    let space = crate::space::build_example(crate::space::ExampleKind::TwoPoint)?;
    let mu = ProbMeasure::uniform(2);
    let q = CostFunction::quadratic();
    let f = [1.0, 0.0];
    let mut table = Vec::new();
    for k in 1..10 {
        let t = k as f64 / 10.0;
        let res = crate::hj::hj_residual(&f, t, &q, &space)?;
        table.push(TwoPointRow {
            t,
            value_at_0: res[0].value,
            value_at_1: res[1].value,
            time_derivative_at_0: res[0].ddt,
            residual_at_0: res[0].residual.to_f64(),
        });
    }
    let scalar_ratio = [-8.0, -4.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 4.0, 8.0]
        .into_iter()
        .map(|u: f64| {
            let ratio = if u > 0.0 {
                mlsi_ratio(&[u, 0.0], &mu, &q, MlsiType::I, &space)
            } else {
                mlsi_ratio(&[-u, 0.0], &mu, &q, MlsiType::II, &space)
            };
            (u, ratio.map_or(0.0, |r| r.0))
        })
        .collect();
    let dirac = ProbMeasure::dirac(2, 0);
    Ok(TwoPointReport {
        table,
        poincare: poincare_estimate_with(&mu, &space, budget, seed)?,
        mlsi_type_i: mlsi_verify_with(&mu, 0.5, &q, MlsiType::I, &space, budget, seed)?,
        mlsi_type_ii: mlsi_verify_with(&mu, 0.5, &q, MlsiType::II, &space, budget, seed)?,
        scalar_ratio,
        transport_to_dirac: crate::transport::weak_transport_cost(&dirac, &mu, &q, &space)?.value,
        transport_from_dirac: crate::transport::weak_transport_cost(&mu, &dirac, &q, &space)?.value,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetCheck {
    pub name: String,
    pub claimed: f64,
    pub report: InequalityReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantsReport {
    pub space: String,
    pub points: usize,
    pub poincare: InequalityReport,
    /// Best `Ent(e^f) / ∫ α*(|∇̃f|) e^f` found, quadratic cost.
    pub mlsi_estimate: f64,
    /// Nearest-neighbour walk: classical Dirichlet form against `2L Σ |∇̃f|² e^f μ`.
    pub bridge: Option<InequalityReport>,
    pub targets: Vec<TargetCheck>,
}

/// Constants of the uniform measure on an example space, with optional
/// claimed `(mLSI, transport)` targets checked as stated.
pub fn constants_report(
    kind: crate::space::ExampleKind,
    targets: &[(&str, f64)],
    budget: SearchBudget,
    samples: usize,
    seed: u64,
) -> Result<ConstantsReport> {
    let space = crate::space::build_example(kind)?;
    let mu = ProbMeasure::uniform(space.len());
    let q = CostFunction::quadratic();
    let poincare = poincare_estimate_with(&mu, &space, budget, seed)?;
    let mlsi_estimate = mlsi_verify_with(&mu, f64::MAX, &q, MlsiType::I, &space, budget, seed)?.best_ratio;
    let bridge = match KernelMatrix::nearest_neighbour(&space) {
        Ok(k) => Some(toto_bridge_check(&mu, &k, &space, samples, seed)?),
        Err(_) => None,
    };
    let mut checks = Vec::new();
    for &(name, claimed) in targets {
        let report = if name.starts_with("mlsi") {
            mlsi_verify_with(&mu, claimed, &q, MlsiType::I, &space, budget, seed)?
        } else {
            check_transport_entropy(&mu, claimed, &q, Direction::I, &space, samples, seed)?
        };
        checks.push(TargetCheck {
            name: name.into(),
            claimed,
            report,
        });
    }
    Ok(ConstantsReport {
        space: kind.to_string(),
        points: space.len(),
        poincare,
        mlsi_estimate,
        bridge,
        targets: checks,
    })
}

/// Hypercube targets: the commonly quoted `n/4` (modified log-Sobolev) and `n/8`
/// (transport), next to `n/2` and `n/4` obtained by multiplying the classical
/// constant `n/8` by the bridge factor `4L`.
pub fn hypercube_targets(n: usize) -> Vec<(&'static str, f64)> {
    let n = n as f64;
    vec![
        ("mlsi_quoted", n / 4.0),
        ("transport_quoted", n / 8.0),
        ("mlsi_from_bridge", n / 2.0),
        ("transport_from_bridge", n / 4.0),
    ]
}
