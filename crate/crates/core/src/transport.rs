//! Weak transport costs and transport–entropy inequalities.
//!
//! For a source `μ` and target `ν`,
//!
//! ```text
//! T̃_α(ν|μ) = inf { Σ_x μ(x) α(Σ_y d(x,y) p_x(y)) : Σ_x μ(x) p_x = ν }.
//! ```
//!
//! The objective is convex in the coupling `π(x,y) = μ(x) p_x(y)` and its
//! linearisation is a classical transport problem, so the solver is
//! Frank–Wolfe with away steps over the transport polytope, with each linear
//! subproblem solved exactly by the transportation simplex in [`simplex`].

pub mod simplex;

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::Serialize;

use crate::calculus::{golden_min, weak_infconv_values};
use crate::cost::{CostFunction, Extended};
use crate::error::{check_len, Error, Result};
use crate::funcineq::{bregman, InequalityReport, SearchStats, Verdict, VIOLATION_SLACK};
use crate::rng;
use crate::space::{MetricSpace, ProbMeasure};

/// `H(ν|μ) = Σ ν log(ν/μ)`, `+∞` if `ν` charges a `μ`-null point.
///
/// Summed as `Σ μ ψ(log(ν/μ))` with `ψ(w) = w e^w − e^w + 1 ≥ 0`, which keeps
/// full relative accuracy when `ν` is close to `μ`.
pub fn relative_entropy(nu: &ProbMeasure, mu: &ProbMeasure) -> Result<Extended> {
    check_len("measure", mu.len(), nu.len())?;
    let mut h = 0.0;
    for x in 0..mu.len() {
        if mu[x] == 0.0 {
            if nu[x] > 0.0 {
                return Ok(Extended::PosInfinity);
            }
        } else if nu[x] == 0.0 {
            h += mu[x];
        } else {
            h += mu[x] * bregman((nu[x] / mu[x]).ln());
        }
    }
    Ok(Extended::Finite(h))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FwVariant {
    Vanilla,
    AwayStep,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FwOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub variant: FwVariant,
}

impl Default for FwOptions {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: 10_000,
            variant: FwVariant::AwayStep,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransportResult {
    pub value: f64,
    /// `π(x, y)`; rows sum to `μ`, columns to `ν`.
    pub coupling: Vec<Vec<f64>>,
    /// Frank–Wolfe duality gap: `value − gap` is a lower bound on the optimum.
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl TransportResult {
    /// Kernel `p_x = π(x, ·)/μ(x)`; a Dirac at `x` where `μ(x) = 0`.
    pub fn kernel(&self, mu: &ProbMeasure, x: usize) -> Vec<f64> {
        if mu[x] > 0.0 {
            self.coupling[x].iter().map(|v| v / mu[x]).collect()
        } else {
            let mut k = vec![0.0; mu.len()];
            k[x] = 1.0;
            k
        }
    }
}

/// `T̃_α(ν|μ)` with the default solver options.
pub fn weak_transport_cost(
    nu: &ProbMeasure,
    mu: &ProbMeasure,
    cost: &CostFunction,
    space: &MetricSpace,
) -> Result<TransportResult> {
    weak_transport_cost_with(nu, mu, cost, space, FwOptions::default())
}

struct Problem<'a> {
    rows: Vec<usize>,
    cols: Vec<usize>,
    mu: &'a ProbMeasure,
    nu: &'a ProbMeasure,
    cost: &'a CostFunction,
    space: &'a MetricSpace,
}

impl Problem<'_> {
    /// Mean displacement `m_x` of each source row for a reduced coupling.
    fn means(&self, pi: &[Vec<f64>]) -> Vec<f64> {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                self.cols
                    .iter()
                    .enumerate()
                    .map(|(j, &y)| pi[i][j] * self.space.dist(x, y))
                    .sum::<f64>()
                    / self.mu[x]
            })
            .collect()
    }

    fn objective(&self, m: &[f64]) -> f64 {
        self.rows
            .iter()
            .zip(m)
            .map(|(&x, &mx)| self.mu[x] * self.cost.eval(mx))
            .sum()
    }

    /// Exact LP vertex minimising `Σ α'(m_x) d(x,y) s(x,y)`.
    fn lp_vertex(&self, m: &[f64]) -> Vec<Vec<f64>> {
        let c: Vec<Vec<f64>> = self
            .rows
            .iter()
            .zip(m)
            .map(|(&x, &mx)| {
                let g = self.cost.deriv(mx);
                self.cols.iter().map(|&y| g * self.space.dist(x, y)).collect()
            })
            .collect();
        let supply: Vec<f64> = self.rows.iter().map(|&x| self.mu[x]).collect();
        let demand: Vec<f64> = self.cols.iter().map(|&y| self.nu[y]).collect();
        simplex::solve(&supply, &demand, &c).flow
    }

    /// `⟨∇F(m), m_a − m_b⟩` in mean coordinates.
    fn directional(&self, m: &[f64], ma: &[f64], mb: &[f64]) -> f64 {
        self.rows
            .iter()
            .enumerate()
            .map(|(i, &x)| self.mu[x] * self.cost.deriv(m[i]) * (ma[i] - mb[i]))
            .sum()
    }

    /// Exact minimiser of `γ ↦ F(m + γ d)` on `[0, γ_max]`.
    fn line_search(&self, m: &[f64], d: &[f64], gmax: f64) -> f64 {
        let slope = |g: f64| -> f64 {
            self.rows
                .iter()
                .enumerate()
                .map(|(i, &x)| self.mu[x] * self.cost.deriv((m[i] + g * d[i]).max(0.0)) * d[i])
                .sum()
        };
        if slope(gmax) <= 0.0 {
            return gmax;
        }
        if slope(0.0) >= 0.0 {
            return 0.0;
        }
        let (mut lo, mut hi) = (0.0, gmax);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if slope(mid) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

fn combine(atoms: &[(Vec<Vec<f64>>, Vec<f64>, f64)], rows: usize, cols: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut pi = vec![vec![0.0; cols]; rows];
    let mut m = vec![0.0; rows];
    for (s, ms, w) in atoms {
        for i in 0..rows {
            m[i] += w * ms[i];
            for j in 0..cols {
                pi[i][j] += w * s[i][j];
            }
        }
    }
    (pi, m)
}

pub fn weak_transport_cost_with(
    nu: &ProbMeasure,
    mu: &ProbMeasure,
    cost: &CostFunction,
    space: &MetricSpace,
    opts: FwOptions,
) -> Result<TransportResult> {
    mu.check_space(space)?;
    nu.check_space(space)?;
    let n = space.len();
    let p = Problem {
        rows: mu.support(),
        cols: nu.support(),
        mu,
        nu,
        cost,
        space,
    };
    let (r, c) = (p.rows.len(), p.cols.len());

    // product coupling as the starting atom
    let start: Vec<Vec<f64>> = p
        .rows
        .iter()
        .map(|&x| p.cols.iter().map(|&y| mu[x] * nu[y]).collect())
        .collect();
    let m0 = p.means(&start);
    let mut atoms: Vec<(Vec<Vec<f64>>, Vec<f64>, f64)> = vec![(start, m0, 1.0)];
    let (mut pi, mut m) = combine(&atoms, r, c);
    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        let s = p.lp_vertex(&m);
        let ms = p.means(&s);
        gap = p.directional(&m, &m, &ms).max(0.0);
        if gap <= opts.tol {
            break;
        }
        iterations += 1;
        let away = match opts.variant {
            FwVariant::Vanilla => None,
            FwVariant::AwayStep => atoms
                .iter()
                .enumerate()
                .map(|(k, a)| (k, p.directional(&m, &a.1, &m)))
                .max_by(|a, b| a.1.total_cmp(&b.1)),
        };
        match away {
            Some((k, away_gap)) if away_gap > gap && atoms.len() > 1 => {
                let w = atoms[k].2;
                let gmax = w / (1.0 - w);
                let d: Vec<f64> = m.iter().zip(&atoms[k].1).map(|(a, b)| a - b).collect();
                let g = p.line_search(&m, &d, gmax);
                for a in atoms.iter_mut() {
                    a.2 *= 1.0 + g;
                }
                atoms[k].2 -= g;
                if g >= gmax || atoms[k].2 <= 1e-15 {
                    atoms.remove(k);
                }
            }
            _ => {
                let d: Vec<f64> = ms.iter().zip(&m).map(|(a, b)| a - b).collect();
                let g = p.line_search(&m, &d, 1.0);
                for a in atoms.iter_mut() {
                    a.2 *= 1.0 - g;
                }
                if let Some(a) = atoms.iter_mut().find(|a| a.0 == s) {
                    a.2 += g;
                } else {
                    atoms.push((s, ms, g));
                }
                atoms.retain(|a| a.2 > 1e-15);
            }
        }
        let total: f64 = atoms.iter().map(|a| a.2).sum();
        for a in atoms.iter_mut() {
            a.2 /= total;
        }
        (pi, m) = combine(&atoms, r, c);
    }
    let value = p.objective(&m);
    let mut coupling = vec![vec![0.0; n]; n];
    for (i, &x) in p.rows.iter().enumerate() {
        for (j, &y) in p.cols.iter().enumerate() {
            coupling[x][y] = pi[i][j];
        }
    }
    Ok(TransportResult {
        value,
        coupling,
        gap,
        iterations,
        converged: gap <= opts.tol,
    })
}

/// Classical transport cost with ground cost `α(d(x,y))`, an upper bound on `T̃_α(ν|μ)`.
pub fn classical_transport_cost(
    nu: &ProbMeasure,
    mu: &ProbMeasure,
    cost: &CostFunction,
    space: &MetricSpace,
) -> Result<f64> {
    mu.check_space(space)?;
    nu.check_space(space)?;
    let rows = mu.support();
    let cols = nu.support();
    let c: Vec<Vec<f64>> = rows
        .iter()
        .map(|&x| cols.iter().map(|&y| cost.eval(space.dist(x, y))).collect())
        .collect();
    let supply: Vec<f64> = rows.iter().map(|&x| mu[x]).collect();
    let demand: Vec<f64> = cols.iter().map(|&y| nu[y]).collect();
    Ok(simplex::solve(&supply, &demand, &c).objective)
}

/// `T̃_α(ν|μ)` on spaces with at most three points, through the dual problem
///
/// ```text
/// sup_φ Σ_x μ(x) Q̃_1 φ(x) − Σ_y ν(y) φ(y),
/// ```
///
/// which is concave in `φ` and maximised by nested golden-section search.
pub fn transport_oracle(nu: &ProbMeasure, mu: &ProbMeasure, cost: &CostFunction, space: &MetricSpace) -> Result<f64> {
    mu.check_space(space)?;
    nu.check_space(space)?;
    let n = space.len();
    if n > 3 {
        return Err(Error::Range(format!("dual oracle supports N <= 3, got {n}")));
    }
    let diam = space.diameter();
    let bound = 4.0 * (cost.eval(diam) + cost.deriv(diam) * diam) + 1.0;
    let anchor = nu.support()[0];
    let free: Vec<usize> = (0..n).filter(|&y| y != anchor).collect();
    let dual = |phi: &[f64]| -> f64 {
        let q = weak_infconv_values(phi, 1.0, cost, space).expect("finite potentials");
        mu.integrate(&q) - nu.integrate(phi)
    };
    let embed = |vals: &[f64]| {
        let mut phi = vec![0.0; n];
        for (k, &y) in free.iter().enumerate() {
            phi[y] = vals[k];
        }
        phi
    };
    // golden_min minimises, so negate the concave dual
    Ok(match free.len() {
        0 => dual(&[0.0]),
        1 => -golden_min(|a| -dual(&embed(&[a])), -bound, bound),
        _ => -golden_min(|a| golden_min(|b| -dual(&embed(&[a, b])), -bound, bound), -bound, bound),
    })
}

/// Which side of the weak transport cost is the entropy's reference measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
pub enum Direction {
    /// `T̃(μ|ν) ≤ C H(ν|μ)`.
    I,
    /// `T̃(ν|μ) ≤ C H(ν|μ)`.
    II,
}

impl std::str::FromStr for Direction {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" | "i" | "1" => Ok(Direction::I),
            "II" | "ii" | "2" => Ok(Direction::II),
            _ => Err(Error::Range(format!("direction must be I or II, got `{s}`"))),
        }
    }
}

/// Random measure on the support of `mu`: even draws are Dirichlet(1),
/// odd draws are supported on two random support points.
pub fn sample_measure(mu: &ProbMeasure, r: &mut rng::Stream, draw: usize) -> ProbMeasure {
    let support = mu.support();
    let mut w = vec![0.0; mu.len()];
    if draw.is_multiple_of(2) || support.len() < 2 {
        let gamma = Gamma::new(1.0, 1.0).expect("valid shape");
        for &x in &support {
            w[x] = gamma.sample(r);
        }
    } else {
        let k = support.len();
        let i = r.random_range(0..k);
        let mut j = r.random_range(0..k - 1);
        if j >= i {
            j += 1;
        }
        let (a, b) = (support[i], support[j]);
        let lam: f64 = r.random();
        w[a] = lam;
        w[b] = 1.0 - lam;
    }
    ProbMeasure::normalized(w).unwrap_or_else(|_| mu.clone())
}

struct Sample {
    ratio: f64,
    lower_ratio: f64,
    witness: Vec<f64>,
}

/// Sweep `T̃/H` over sampled measures and compare with `C`.
pub fn check_transport_entropy(
    mu: &ProbMeasure,
    c: f64,
    cost: &CostFunction,
    direction: Direction,
    space: &MetricSpace,
    n_samples: usize,
    seed: u64,
) -> Result<InequalityReport> {
    mu.check_space(space)?;
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Range(format!("constant must be positive, got {c}")));
    }
    let samples: Vec<Option<Sample>> = (0..n_samples)
        .into_par_iter()
        .map(|i| -> Result<Option<Sample>> {
            let mut r = rng::stream(seed, i as u64);
            let nu = sample_measure(mu, &mut r, i);
            let Some(h) = relative_entropy(&nu, mu)?.finite() else {
                return Ok(None);
            };
            if h <= 1e-14 {
                return Ok(None);
            }
            let t = match direction {
                Direction::I => weak_transport_cost(mu, &nu, cost, space)?,
                Direction::II => weak_transport_cost(&nu, mu, cost, space)?,
            };
            Ok(Some(Sample {
                ratio: t.value / h,
                lower_ratio: (t.value - t.gap) / h,
                witness: nu.weights().to_vec(),
            }))
        })
        .collect::<Result<_>>()?;
    let id = match direction {
        Direction::I => "transport_entropy_I",
        Direction::II => "transport_entropy_II",
    };
    Ok(summarise(id, c, samples, n_samples, seed, "measure"))
}

fn summarise(
    id: &str,
    c: f64,
    samples: Vec<Option<Sample>>,
    n_samples: usize,
    seed: u64,
    witness_kind: &str,
) -> InequalityReport {
    let mut best: Option<&Sample> = None;
    let mut violator: Option<&Sample> = None;
    for s in samples.iter().flatten() {
        if best.is_none_or(|b| s.ratio > b.ratio) {
            best = Some(s);
        }
        if s.lower_ratio > c + VIOLATION_SLACK && violator.is_none_or(|v| s.lower_ratio > v.lower_ratio) {
            violator = Some(s);
        }
    }
    let (verdict, witness) = match violator {
        Some(v) => (Verdict::Violated, Some(v.witness.clone())),
        None => (Verdict::CertifiedNoViolation, best.map(|b| b.witness.clone())),
    };
    InequalityReport {
        inequality: id.to_string(),
        constant: c,
        bound: c,
        best_ratio: best.map_or(0.0, |b| b.ratio),
        witness,
        witness_kind: witness_kind.to_string(),
        verdict,
        stats: SearchStats {
            restarts: 0,
            iterations: 0,
            samples: n_samples,
            evaluated: samples.iter().flatten().count(),
            seed,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualVerdict {
    /// `log ∫ exp((2/C) Q̃_1 φ) dμ`.
    pub log_lhs: f64,
    /// `(2/C) ∫ φ dμ`.
    pub log_rhs: f64,
    pub holds: bool,
}

/// `∫ exp((2/C) Q̃_1 φ) dμ ≤ exp((2/C) ∫ φ dμ)`, compared in log scale.
pub fn dual_check(
    mu: &ProbMeasure,
    c: f64,
    phi: &[f64],
    cost: &CostFunction,
    space: &MetricSpace,
) -> Result<DualVerdict> {
    mu.check_space(space)?;
    if !(c.is_finite() && c > 0.0) {
        return Err(Error::Range(format!("constant must be positive, got {c}")));
    }
    let q = weak_infconv_values(phi, 1.0, cost, space)?;
    let k = 2.0 / c;
    let log_lhs = log_mean_exp(&q.iter().map(|v| k * v).collect::<Vec<_>>(), mu);
    let log_rhs = k * mu.integrate(phi);
    Ok(DualVerdict {
        log_lhs,
        log_rhs,
        holds: log_lhs <= log_rhs + VIOLATION_SLACK,
    })
}

/// `log ∫ e^g dμ` without overflow.
pub(crate) fn log_mean_exp(g: &[f64], mu: &ProbMeasure) -> f64 {
    let support = mu.support();
    let top = support.iter().map(|&x| g[x]).fold(f64::NEG_INFINITY, f64::max);
    let s: f64 = support.iter().map(|&x| mu[x] * (g[x] - top).exp()).sum();
    top + s.ln()
}

/// Random potential with a log-uniform amplitude in `[1e-2, 10]`.
pub fn sample_potential(n: usize, r: &mut rng::Stream) -> Vec<f64> {
    let amp = 10f64.powf(r.random_range(-2.0..1.0));
    (0..n).map(|_| amp * r.random_range(-1.0..1.0)).collect()
}

/// Sweep of [`dual_check`] over random potentials; the ratio is `LHS/RHS`.
pub fn dual_sweep(
    mu: &ProbMeasure,
    c: f64,
    cost: &CostFunction,
    space: &MetricSpace,
    n_samples: usize,
    seed: u64,
) -> Result<InequalityReport> {
    let samples: Vec<Option<Sample>> = (0..n_samples)
        .into_par_iter()
        .map(|i| -> Result<Option<Sample>> {
            let mut r = rng::stream(seed, i as u64);
            let phi = sample_potential(space.len(), &mut r);
            let v = dual_check(mu, c, &phi, cost, space)?;
            let ratio = (v.log_lhs - v.log_rhs).exp();
            Ok(Some(Sample {
                ratio,
                lower_ratio: ratio,
                witness: phi,
            }))
        })
        .collect::<Result<_>>()?;
    let mut rep = summarise("dual_form", 1.0, samples, n_samples, seed, "function");
    rep.constant = c;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_example, ExampleKind};

    fn two() -> MetricSpace {
        build_example(ExampleKind::TwoPoint).unwrap()
    }

    #[test]
    fn entropy_fixtures() {
        let u = ProbMeasure::uniform(2);
        assert_eq!(relative_entropy(&u, &u).unwrap(), Extended::Finite(0.0));
        let d = ProbMeasure::dirac(2, 0);
        let h = relative_entropy(&d, &u).unwrap().to_f64();
        assert!((h - 2f64.ln()).abs() < 1e-15);
        assert_eq!(relative_entropy(&u, &d).unwrap(), Extended::PosInfinity);
    }

    #[test]
    fn forced_coupling() {
        let u = ProbMeasure::uniform(2);
        let d = ProbMeasure::dirac(2, 0);
        let r = weak_transport_cost(&d, &u, &CostFunction::quadratic(), &two()).unwrap();
        assert!((r.value - 0.25).abs() < 1e-12);
        assert!(r.converged && r.gap <= 1e-8);
        assert_eq!(r.coupling, vec![vec![0.5, 0.0], vec![0.5, 0.0]]);
    }

    #[test]
    fn asymmetry() {
        let u = ProbMeasure::uniform(2);
        let d = ProbMeasure::dirac(2, 0);
        let q = CostFunction::quadratic();
        let a = weak_transport_cost(&u, &d, &q, &two()).unwrap().value;
        assert!((a - 0.125).abs() < 1e-12);
        let o = transport_oracle(&u, &d, &q, &two()).unwrap();
        assert!((o - 0.125).abs() < 1e-9);
        let o = transport_oracle(&d, &u, &q, &two()).unwrap();
        assert!((o - 0.25).abs() < 1e-9);
    }

    #[test]
    fn identical_measures_cost_nothing() {
        let s = build_example(ExampleKind::Path(4)).unwrap();
        let mu = ProbMeasure::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let r = weak_transport_cost(&mu, &mu, &CostFunction::quadratic(), &s).unwrap();
        assert!(r.value.abs() < 1e-9, "{r:?}");
    }

    #[test]
    fn dual_fixtures() {
        let u = ProbMeasure::uniform(2);
        let q = CostFunction::quadratic();
        let v = dual_check(&u, 0.5, &[1.0, 0.0], &q, &two()).unwrap();
        assert!(v.holds);
        let expected = ((4.0f64 * 0.5).exp() * 0.5 + 0.5).ln();
        assert!((v.log_lhs - expected).abs() < 1e-14);
        let v = dual_check(&u, 0.5, &[0.3, 0.3], &q, &two()).unwrap();
        assert!((v.log_lhs - v.log_rhs).abs() < 1e-14);
    }

    #[test]
    fn vanilla_and_away_agree_on_easy_instance() {
        let s = build_example(ExampleKind::Path(3)).unwrap();
        let mu = ProbMeasure::new(vec![0.5, 0.3, 0.2]).unwrap();
        let nu = ProbMeasure::new(vec![0.2, 0.2, 0.6]).unwrap();
        let q = CostFunction::quadratic();
        let a = weak_transport_cost(&nu, &mu, &q, &s).unwrap();
        let o = transport_oracle(&nu, &mu, &q, &s).unwrap();
        assert!((a.value - o).abs() < 1e-6, "{} vs {o}", a.value);
    }
}
