//! Hamilton–Jacobi behaviour of the weak inf-convolution.
//!
//! For every `t > 0`, `∂_t Q̃_t f + α*(|∇̃Q̃_t f|) ≤ 0`, and at `t = 0` the
//! inequality becomes the identity `∂_t Q̃_t f|₀ = −α*(|∇̃f|)` wherever the
//! conjugate is finite. This module evaluates both, and also searches for
//! failures of the semigroup law for classical inf-convolutions driven by an
//! arbitrary distance-indexed family `D_t`.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::calculus::{tilde_gradient, time_derivatives, weak_infconv, weak_infconv_values};
use crate::cost::{CostFunction, Extended};
use crate::error::{Error, Result};
use crate::rng;
use crate::space::{check_function, MetricSpace};

pub const RESIDUAL_TOL: f64 = 1e-9;
pub const BOUNDARY_TOL: f64 = 1e-6;
pub const OBSTRUCTION_GAP: f64 = 1e-6;
const CLAMP_REL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualPoint {
    pub x: usize,
    pub t: f64,
    pub value: f64,
    /// Analytic `∂_t Q̃_t f(x) = −β(u/t)`.
    pub ddt: f64,
    pub gradient: f64,
    pub conjugate: Extended,
    /// `ddt + α*(gradient)`; `+∞` when the gradient leaves the conjugate's domain.
    pub residual: Extended,
    pub holds: bool,
}

/// Clamp a slope that exceeds `l` only by rounding.
fn clamp_to_domain(g: f64, cost: &CostFunction) -> f64 {
    match cost.conjugate_domain_bound() {
        Extended::Finite(l) if g > l && g <= l * (1.0 + CLAMP_REL) => l,
        _ => g,
    }
}

pub fn hj_residual(f: &[f64], t: f64, cost: &CostFunction, space: &MetricSpace) -> Result<Vec<ResidualPoint>> {
    let wic = weak_infconv(f, t, cost, space)?;
    let ddt = time_derivatives(&wic, t, cost);
    let grad = tilde_gradient(&wic.values, space);
    Ok((0..space.len())
        .map(|x| {
            let g = clamp_to_domain(grad[x], cost);
            let conjugate = cost.conjugate(g);
            let residual = match conjugate {
                Extended::Finite(c) => Extended::Finite(ddt[x] + c),
                Extended::PosInfinity => Extended::PosInfinity,
            };
            ResidualPoint {
                x,
                t,
                value: wic.values[x],
                ddt: ddt[x],
                gradient: g,
                conjugate,
                residual,
                holds: residual <= Extended::Finite(RESIDUAL_TOL),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub x: usize,
    pub gradient: f64,
    /// `−α*(|∇̃f|(x))`.
    pub target: f64,
    /// Extrapolated `lim_{t→0} (Q̃_t f(x) − f(x))/t`.
    pub limit: f64,
    pub error: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryReport {
    pub t_sequence: Vec<f64>,
    pub points: Vec<BoundaryPoint>,
    /// Points whose slope lies outside the conjugate's finite domain.
    pub excluded: Vec<usize>,
    pub holds: bool,
}

/// `2^{-k}` for `k = 3..=20`.
pub fn default_boundary_sequence() -> Vec<f64> {
    (3..=20).map(|k| 2f64.powi(-k)).collect()
}

pub fn hj_boundary(f: &[f64], cost: &CostFunction, space: &MetricSpace, t_sequence: &[f64]) -> Result<BoundaryReport> {
    check_function(space, f)?;
    if t_sequence.is_empty()
        || t_sequence.iter().any(|t| !(t.is_finite() && *t > 0.0))
        || t_sequence.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::Range(
            "t_sequence must be positive and strictly decreasing".into(),
        ));
    }
    let grad = tilde_gradient(f, space);
    let ratios: Vec<Vec<f64>> = t_sequence
        .iter()
        .map(|&t| weak_infconv_values(f, t, cost, space).map(|q| q.iter().zip(f).map(|(q, f)| (q - f) / t).collect()))
        .collect::<Result<_>>()?;
    let k = t_sequence.len() - 1;
    let mut points = Vec::new();
    let mut excluded = Vec::new();
    for x in 0..space.len() {
        let g = clamp_to_domain(grad[x], cost);
        let Some(conj) = cost.conjugate(g).finite() else {
            excluded.push(x);
            continue;
        };
        let last = ratios[k][x];
        let limit = if k == 0 {
            last
        } else {
            let (t0, t1) = (t_sequence[k - 1], t_sequence[k]);
            let prev = ratios[k - 1][x];
            let r = last - t1 * (prev - last) / (t0 - t1);
            if r.is_finite() {
                r
            } else {
                last
            }
        };
        let error = (limit + conj).abs();
        points.push(BoundaryPoint {
            x,
            gradient: g,
            target: -conj,
            limit,
            error,
            holds: error <= BOUNDARY_TOL,
        });
    }
    let holds = points.iter().all(|p| p.holds);
    Ok(BoundaryReport {
        t_sequence: t_sequence.to_vec(),
        points,
        excluded,
        holds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HjReport {
    pub cost: CostFunction,
    pub residuals: Vec<ResidualPoint>,
    pub max_residual: Extended,
    pub violations: usize,
    /// Points where `α*(|∇̃Q̃_t f|) = +∞`.
    pub infinite_conjugate: Vec<(usize, f64)>,
    pub boundary: BoundaryReport,
    pub holds: bool,
}

/// Residuals over a time grid plus the boundary identity.
pub fn hj_verify(f: &[f64], cost: &CostFunction, space: &MetricSpace, t_grid: &[f64]) -> Result<HjReport> {
    let mut residuals = Vec::new();
    for &t in t_grid {
        residuals.extend(hj_residual(f, t, cost, space)?);
    }
    let boundary = hj_boundary(f, cost, space, &default_boundary_sequence())?;
    let max_residual = residuals
        .iter()
        .map(|r| r.residual)
        .fold(Extended::Finite(f64::NEG_INFINITY), |a, b| if b > a { b } else { a });
    let violations = residuals.iter().filter(|r| !r.holds).count();
    let infinite_conjugate = residuals
        .iter()
        .filter(|r| !r.conjugate.is_finite())
        .map(|r| (r.x, r.t))
        .collect();
    Ok(HjReport {
        cost: *cost,
        holds: violations == 0 && boundary.holds,
        residuals,
        max_residual,
        violations,
        infinite_conjugate,
        boundary,
    })
}

/// A family of transition costs `D_t(y, x) ≥ 0` with `D_t(x, x) = 0`.
pub trait CostFamily: Sync {
    fn cost(&self, t: f64, from: usize, to: usize) -> f64;
}

impl<F: Fn(f64, usize, usize) -> f64 + Sync> CostFamily for F {
    fn cost(&self, t: f64, from: usize, to: usize) -> f64 {
        self(t, from, to)
    }
}

/// `D_t(y, x) = tα(d(y,x)/t)`.
pub struct HopfLax<'a> {
    pub space: &'a MetricSpace,
    pub cost: CostFunction,
}

impl CostFamily for HopfLax<'_> {
    fn cost(&self, t: f64, from: usize, to: usize) -> f64 {
        t * self.cost.eval(self.space.dist(from, to) / t)
    }
}

/// `Q_t f(x) = min_y f(y) + D_t(y, x)`.
pub fn family_infconv(f: &[f64], t: f64, family: &dyn CostFamily) -> Vec<f64> {
    let n = f.len();
    (0..n)
        .map(|x| {
            (0..n)
                .map(|y| f[y] + family.cost(t, y, x))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObstructionWitness {
    pub f: Vec<f64>,
    pub x: usize,
    pub s: f64,
    pub t: f64,
    /// `Q_{t+s} f(x)`.
    pub direct: f64,
    /// `Q_t(Q_s f)(x)`.
    pub composed: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchStats {
    pub structured_candidates: usize,
    pub random_trials: usize,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ObstructionOutcome {
    Witness {
        witness: ObstructionWitness,
        stats: SearchStats,
    },
    Exhausted {
        stats: SearchStats,
    },
    /// `Q_t f → f` as `t → 0` fails, so the family is outside the search's scope.
    PremiseFailure {
        from: usize,
        to: usize,
        probe_t: f64,
        cost_at_probe: f64,
        reason: String,
    },
}

/// Probe time for the premise `D_t(y, x) → ∞` (`y ≠ x`) as `t → 0`.
pub const PREMISE_PROBE_T: f64 = 1e-15;
/// `D` at the probe time must reach this value.
pub const PREMISE_BOUND: f64 = 1e6;

pub fn default_obstruction_times() -> Vec<f64> {
    vec![0.25, 0.5, 1.0, 2.0]
}

fn gap_at(f: &[f64], s: f64, t: f64, family: &dyn CostFamily) -> (Vec<f64>, Vec<f64>) {
    let direct = family_infconv(f, s + t, family);
    let composed = family_infconv(&family_infconv(f, s, family), t, family);
    (direct, composed)
}

fn first_gap(f: &[f64], s: f64, t: f64, family: &dyn CostFamily) -> Option<ObstructionWitness> {
    let (direct, composed) = gap_at(f, s, t, family);
    (0..f.len()).find_map(|x| {
        let gap = (direct[x] - composed[x]).abs();
        (gap > OBSTRUCTION_GAP).then(|| ObstructionWitness {
            f: f.to_vec(),
            x,
            s,
            t,
            direct: direct[x],
            composed: composed[x],
            gap,
        })
    })
}

/// Look for `f, x, s, t` with `Q_{t+s} f(x) ≠ Q_t(Q_s f)(x)`.
///
/// Functions vanishing at a single vertex and large elsewhere are tried first,
/// then `trials` random functions.
pub fn obstruction_search(
    n: usize,
    family: &dyn CostFamily,
    t_grid: &[f64],
    trials: usize,
    seed: u64,
) -> Result<ObstructionOutcome> {
    if n == 0 {
        return Err(Error::Range("empty space".into()));
    }
    if t_grid.is_empty() || t_grid.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(Error::Range("time grid must be non-empty and positive".into()));
    }
    for x in 0..n {
        for &t in t_grid.iter().chain([PREMISE_PROBE_T].iter()) {
            let c = family.cost(t, x, x);
            if c != 0.0 {
                return Ok(ObstructionOutcome::PremiseFailure {
                    from: x,
                    to: x,
                    probe_t: t,
                    cost_at_probe: c,
                    reason: "D_t(x, x) must vanish".into(),
                });
            }
        }
        for y in 0..n {
            if y == x {
                continue;
            }
            let c = family.cost(PREMISE_PROBE_T, y, x);
            if !(c >= PREMISE_BOUND) {
                return Ok(ObstructionOutcome::PremiseFailure {
                    from: y,
                    to: x,
                    probe_t: PREMISE_PROBE_T,
                    cost_at_probe: c,
                    reason: "D_t(y, x) does not blow up as t -> 0, so Q_t f does not recover f".into(),
                });
            }
        }
    }

    let mut stats = SearchStats {
        structured_candidates: 0,
        random_trials: 0,
        evaluations: 0,
    };
    for &s in t_grid {
        for &t in t_grid {
            for z in 0..n {
                for x in 0..n {
                    if x == z {
                        continue;
                    }
                    let big = family.cost(s + t, z, x) + 1.0;
                    let mut f = vec![big; n];
                    f[z] = 0.0;
                    stats.structured_candidates += 1;
                    stats.evaluations += 1;
                    if let Some(witness) = first_gap(&f, s, t, family) {
                        return Ok(ObstructionOutcome::Witness { witness, stats });
                    }
                }
            }
        }
    }

    let found: Vec<Option<ObstructionWitness>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut r = rng::stream(seed, i as u64);
            let amp = 10f64.powf(r.random_range(-2.0..2.0));
            let f: Vec<f64> = (0..n).map(|_| amp * r.random_range(-1.0..1.0)).collect();
            let s = t_grid[r.random_range(0..t_grid.len())];
            let t = t_grid[r.random_range(0..t_grid.len())];
            first_gap(&f, s, t, family)
        })
        .collect();
    stats.random_trials = trials;
    stats.evaluations += trials;
    Ok(match found.into_iter().flatten().next() {
        Some(witness) => ObstructionOutcome::Witness { witness, stats },
        None => ObstructionOutcome::Exhausted { stats },
    })
}
