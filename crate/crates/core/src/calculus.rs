//! The slope `|∇̃f|`, inf-convolutions and convex envelopes of distance profiles.
//!
//! The weak inf-convolution
//!
//! ```text
//! Q̃_t f(x) = inf_p { ∫ f dp + t α(∫ d(x,·) dp / t) }
//! ```
//!
//! reduces to a one-dimensional problem: with `f_x(u) = min { f(y) : d(x,y) = u }`
//! and `f̃_x` its greatest convex minorant, `Q̃_t f(x) = min_u f̃_x(u) + t α(u/t)`.
//! The envelope is piecewise linear, so the minimisation runs segment by segment.

use rayon::prelude::*;
use serde::Serialize;

use crate::cost::CostFunction;
use crate::error::{Error, Result};
use crate::space::{check_function, MetricSpace};

/// Distances closer than this are treated as one sphere of the profile.
pub const DISTANCE_MERGE_TOL: f64 = 1e-12;
/// Relative slack in the argmin interval `φ(u) ≤ φ_min + ARGMIN_TOL (1 + |φ_min|)`.
pub const ARGMIN_TOL: f64 = 1e-9;
const BISECTION_STEPS: usize = 80;
const PARALLEL_MIN_POINTS: usize = 256;

/// `|∇̃f|(x) = max_y [f(x) − f(y)]₊ / d(x,y)`.
pub fn tilde_gradient(f: &[f64], space: &MetricSpace) -> Vec<f64> {
    (0..space.len()).map(|x| gradient_at(f, x, space).0).collect()
}

/// Slope at `x` and the steepest competitor (lowest index among ties).
pub(crate) fn gradient_at(f: &[f64], x: usize, space: &MetricSpace) -> (f64, Option<usize>) {
    let mut best = 0.0;
    let mut arg = None;
    for (y, &d) in space.row(x).iter().enumerate() {
        if y == x {
            continue;
        }
        let s = (f[x] - f[y]).max(0.0) / d;
        if s > best {
            best = s;
            arg = Some(y);
        }
    }
    (best, arg)
}

/// `|∇̃(−f)|(x) = max_y [f(y) − f(x)]₊ / d(x,y)`.
pub fn tilde_gradient_neg(f: &[f64], space: &MetricSpace) -> Vec<f64> {
    let neg: Vec<f64> = f.iter().map(|v| -v).collect();
    tilde_gradient(&neg, space)
}

/// `Q_t f(x) = min_y f(y) + t α(d(x,y)/t)`.
pub fn classical_infconv(f: &[f64], t: f64, cost: &CostFunction, space: &MetricSpace) -> Result<Vec<f64>> {
    check_function(space, f)?;
    check_time(t)?;
    Ok((0..space.len())
        .map(|x| {
            space
                .row(x)
                .iter()
                .zip(f)
                .map(|(&d, &fy)| fy + t * cost.eval(d / t))
                .fold(f64::INFINITY, f64::min)
        })
        .collect())
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::Range(format!("time must be positive and finite, got {t}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfilePoint {
    pub u: f64,
    pub value: f64,
    /// A point on the sphere of radius `u` attaining `value` (lowest index).
    pub arg: usize,
}

/// The raw profile `u ↦ f_x(u)` over the distinct distances from `base`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceProfile {
    pub base: usize,
    pub points: Vec<ProfilePoint>,
}

pub fn distance_profile(f: &[f64], x: usize, space: &MetricSpace) -> DistanceProfile {
    let mut order: Vec<usize> = (0..space.len()).collect();
    let row = space.row(x);
    order.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
    let mut points: Vec<ProfilePoint> = Vec::new();
    for y in order {
        let u = row[y];
        match points.last_mut() {
            Some(last) if last.u > 0.0 && u - last.u <= DISTANCE_MERGE_TOL => {
                if f[y] < last.value {
                    last.value = f[y];
                    last.arg = y;
                }
            }
            _ => points.push(ProfilePoint { u, value: f[y], arg: y }),
        }
    }
    DistanceProfile { base: x, points }
}

/// Greatest convex minorant `f̃_x` of a distance profile, stored by its vertices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnvelopeProfile {
    pub base: usize,
    pub breakpoints: Vec<ProfilePoint>,
    pub domain_max: f64,
}

impl EnvelopeProfile {
    /// `f̃_x(u)`; `None` outside `[0, domain_max]`.
    pub fn eval(&self, u: f64) -> Option<f64> {
        if !(0.0..=self.domain_max).contains(&u) {
            return None;
        }
        let b = &self.breakpoints;
        let i = b.partition_point(|p| p.u <= u);
        if i == 0 {
            return Some(b[0].value);
        }
        if i == b.len() {
            return Some(b[b.len() - 1].value);
        }
        let (l, r) = (b[i - 1], b[i]);
        let lambda = (r.u - u) / (r.u - l.u);
        Some(lambda * l.value + (1.0 - lambda) * r.value)
    }

    pub fn slopes(&self) -> Vec<f64> {
        self.breakpoints
            .windows(2)
            .map(|w| (w[1].value - w[0].value) / (w[1].u - w[0].u))
            .collect()
    }

    /// Right derivative at 0; zero for a single-point profile.
    pub fn initial_slope(&self) -> f64 {
        self.slopes().first().copied().unwrap_or(0.0)
    }
}

/// Lower convex hull by a single monotone sweep; collinear points are dropped.
pub fn convex_envelope(profile: &DistanceProfile) -> EnvelopeProfile {
    let mut hull: Vec<ProfilePoint> = Vec::with_capacity(profile.points.len());
    for &p in &profile.points {
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let a = hull[hull.len() - 1];
            let cross = (a.u - o.u) * (p.value - o.value) - (a.value - o.value) * (p.u - o.u);
            if cross <= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    EnvelopeProfile {
        base: profile.base,
        domain_max: profile.points.last().map_or(0.0, |p| p.u),
        breakpoints: hull,
    }
}

/// `p = w δ_first + (1 − w) δ_second` (a Dirac when `first == second`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TwoPointMeasure {
    pub first: usize,
    pub second: usize,
    pub weight_first: f64,
}

/// Minimisers `[u_min, u_max]` of `u ↦ f̃_x(u) + tα(u/t)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ArgminSet {
    pub u_min: f64,
    pub u_max: f64,
    /// Measures realising `u_min` and (if different) `u_max`.
    pub witnesses: Vec<TwoPointMeasure>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakInfConv {
    pub values: Vec<f64>,
    pub argmin: Vec<ArgminSet>,
}

/// `Q̃_t f` with the argmin interval at every point.
pub fn weak_infconv(f: &[f64], t: f64, cost: &CostFunction, space: &MetricSpace) -> Result<WeakInfConv> {
    check_function(space, f)?;
    check_time(t)?;
    let at = |x: usize| minimise_on_envelope(&convex_envelope(&distance_profile(f, x, space)), t, cost);
    let per_point: Vec<(f64, ArgminSet)> = if space.len() >= PARALLEL_MIN_POINTS {
        (0..space.len()).into_par_iter().map(at).collect()
    } else {
        (0..space.len()).map(at).collect()
    };
    let (values, argmin) = per_point.into_iter().unzip();
    Ok(WeakInfConv { values, argmin })
}

/// `Q̃_t f` values only.
pub fn weak_infconv_values(f: &[f64], t: f64, cost: &CostFunction, space: &MetricSpace) -> Result<Vec<f64>> {
    check_function(space, f)?;
    check_time(t)?;
    Ok((0..space.len())
        .map(|x| {
            let env = convex_envelope(&distance_profile(f, x, space));
            minimise_on_envelope(&env, t, cost).0
        })
        .collect())
}

/// Minimise `φ(u) = f̃(u) + tα(u/t)` over the envelope's domain.
pub fn minimise_on_envelope(env: &EnvelopeProfile, t: f64, cost: &CostFunction) -> (f64, ArgminSet) {
    let b = &env.breakpoints;
    let phi = |u: f64, v: f64| v + t * cost.eval(u / t);
    if b.len() == 1 {
        return (
            b[0].value,
            ArgminSet {
                u_min: 0.0,
                u_max: 0.0,
                witnesses: vec![dirac(b[0].arg)],
            },
        );
    }
    // per segment: (lo, hi, φ(lo)) of the segment's minimisers
    let mut cands: Vec<(f64, f64, f64)> = Vec::with_capacity(b.len() - 1);
    for w in b.windows(2) {
        let (l, r) = (w[0], w[1]);
        let slope = (r.value - l.value) / (r.u - l.u);
        let on_seg = |u: f64| l.value + slope * (u - l.u);
        let (lo, hi) = segment_argmin(l.u, r.u, slope, t, cost);
        cands.push((lo, hi, phi(lo, on_seg(lo))));
    }
    let best = cands.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
    let thr = best + ARGMIN_TOL * (1.0 + best.abs());
    let mut u_min = f64::INFINITY;
    let mut u_max = f64::NEG_INFINITY;
    for &(lo, hi, v) in &cands {
        if v <= thr {
            u_min = u_min.min(lo);
            u_max = u_max.max(hi);
        }
    }
    let mut witnesses = vec![witness_at(env, u_min)];
    if u_max > u_min {
        witnesses.push(witness_at(env, u_max));
    }
    (
        best,
        ArgminSet {
            u_min,
            u_max,
            witnesses,
        },
    )
}

/// Minimisers of `v + s(u − u_l) + tα(u/t)` on `[u_l, u_r]`.
///
/// The derivative `s + α'(u/t)` is non-decreasing in `u`.
fn segment_argmin(ul: f64, ur: f64, slope: f64, t: f64, cost: &CostFunction) -> (f64, f64) {
    if let CostFunction::QuadraticLinear { a, h } = *cost {
        if flat_level(slope, a, h) {
            // φ' vanishes on [ht, ∞) and is negative before
            return if h * t <= ur { ((h * t).max(ul), ur) } else { (ur, ur) };
        }
    }
    let g = |u: f64| slope + cost.deriv(u / t);
    if g(ul) >= 0.0 {
        return (ul, ul);
    }
    if g(ur) <= 0.0 {
        return (ur, ur);
    }
    match *cost {
        CostFunction::Quadratic => {
            let u = (-slope * t).clamp(ul, ur);
            (u, u)
        }
        CostFunction::QuadraticLinear { a, .. } => {
            // g changes sign inside the segment, so −slope < 2ah
            let u = (-slope * t / (2.0 * a)).clamp(ul, ur);
            (u, u)
        }
        CostFunction::Power { .. } => {
            let (mut lo, mut hi) = (ul, ur);
            for _ in 0..BISECTION_STEPS {
                let mid = 0.5 * (lo + hi);
                if g(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let u = 0.5 * (lo + hi);
            (u, u)
        }
    }
}

/// Whether `−slope` equals the plateau level `2ah` of `α'`.
fn flat_level(slope: f64, a: f64, h: f64) -> bool {
    let level = 2.0 * a * h;
    (-slope - level).abs() <= 1e-12 * level.max(1.0)
}

fn dirac(y: usize) -> TwoPointMeasure {
    TwoPointMeasure {
        first: y,
        second: y,
        weight_first: 1.0,
    }
}

/// Two-point measure with mean distance `u` and mean value `f̃(u)`.
fn witness_at(env: &EnvelopeProfile, u: f64) -> TwoPointMeasure {
    let b = &env.breakpoints;
    if let Some(p) = b.iter().find(|p| (p.u - u).abs() <= DISTANCE_MERGE_TOL) {
        return dirac(p.arg);
    }
    let i = b.partition_point(|p| p.u <= u).clamp(1, b.len() - 1);
    let (l, r) = (b[i - 1], b[i]);
    TwoPointMeasure {
        first: l.arg,
        second: r.arg,
        weight_first: (r.u - u) / (r.u - l.u),
    }
}

/// `∂_t Q̃_t f(x) = −β(u/t)` for `u` in the argmin interval.
pub fn time_derivative(f: &[f64], t: f64, x: usize, cost: &CostFunction, space: &MetricSpace) -> Result<f64> {
    check_function(space, f)?;
    check_time(t)?;
    if x >= space.len() {
        return Err(Error::Range(format!("point {x} out of range")));
    }
    let env = convex_envelope(&distance_profile(f, x, space));
    let (_, arg) = minimise_on_envelope(&env, t, cost);
    Ok(-cost.beta(arg.u_min / t))
}

/// All time derivatives at once.
pub fn time_derivatives(wic: &WeakInfConv, t: f64, cost: &CostFunction) -> Vec<f64> {
    wic.argmin.iter().map(|a| -cost.beta(a.u_min / t)).collect()
}

/// Options for the two-point brute-force evaluation of `Q̃_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BruteForce {
    /// Number of equally spaced weights in `[0, 1]`, endpoints included.
    pub grid_size: usize,
    /// Golden-section refinement around the best grid weight.
    pub refine: bool,
}

/// `Q̃_t f` by direct minimisation over all two-point measures.
pub fn weak_infconv_bruteforce(
    f: &[f64],
    t: f64,
    cost: &CostFunction,
    space: &MetricSpace,
    grid_size: usize,
) -> Result<Vec<f64>> {
    weak_infconv_bruteforce_with(
        f,
        t,
        cost,
        space,
        BruteForce {
            grid_size,
            refine: true,
        },
    )
}

pub fn weak_infconv_bruteforce_with(
    f: &[f64],
    t: f64,
    cost: &CostFunction,
    space: &MetricSpace,
    opts: BruteForce,
) -> Result<Vec<f64>> {
    check_function(space, f)?;
    check_time(t)?;
    if opts.grid_size < 2 {
        return Err(Error::Range("grid_size must be at least 2".into()));
    }
    let n = space.len();
    let m = opts.grid_size - 1;
    Ok((0..n)
        .map(|x| {
            let row = space.row(x);
            let mut best = f64::INFINITY;
            for y1 in 0..n {
                for y2 in y1..n {
                    let h = |lam: f64| {
                        lam * f[y1] + (1.0 - lam) * f[y2] + t * cost.eval((lam * row[y1] + (1.0 - lam) * row[y2]) / t)
                    };
                    let mut k_best = 0;
                    let mut v_best = f64::INFINITY;
                    for k in 0..=m {
                        let v = h(k as f64 / m as f64);
                        if v < v_best {
                            v_best = v;
                            k_best = k;
                        }
                    }
                    if opts.refine {
                        let lo = k_best.saturating_sub(1) as f64 / m as f64;
                        let hi = (k_best + 1).min(m) as f64 / m as f64;
                        v_best = v_best.min(golden_min(h, lo, hi));
                    }
                    best = best.min(v_best);
                }
            }
            best
        })
        .collect())
}

/// Golden-section minimum of a convex function on `[lo, hi]`.
pub(crate) fn golden_min(h: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut a = hi - r * (hi - lo);
    let mut b = lo + r * (hi - lo);
    let (mut fa, mut fb) = (h(a), h(b));
    for _ in 0..100 {
        if fa <= fb {
            hi = b;
            b = a;
            fb = fa;
            a = hi - r * (hi - lo);
            fa = h(a);
        } else {
            lo = a;
            a = b;
            fa = fb;
            b = lo + r * (hi - lo);
            fb = h(b);
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    fa.min(fb).min(h(lo)).min(h(hi))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityVerdict {
    Equal,
    /// `x` is the unique minimiser of `f`; the identity is not expected there.
    UniqueMinimizer,
    Mismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientEnvelope {
    pub gradient: f64,
    /// `|f̃_x'(0)|`, the magnitude of the envelope's right derivative at 0.
    pub envelope_slope: f64,
    pub verdict: IdentityVerdict,
}

/// Compare `|∇̃f|(x)` with `|f̃_x'(0)|`.
pub fn gradient_envelope_identity(f: &[f64], x: usize, space: &MetricSpace) -> Result<GradientEnvelope> {
    check_function(space, f)?;
    if x >= space.len() {
        return Err(Error::Range(format!("point {x} out of range")));
    }
    let gradient = gradient_at(f, x, space).0;
    let envelope_slope = convex_envelope(&distance_profile(f, x, space)).initial_slope().abs();
    let unique_min = (0..space.len()).all(|y| y == x || f[y] > f[x]);
    let verdict = if unique_min && space.len() > 1 {
        IdentityVerdict::UniqueMinimizer
    } else if (gradient - envelope_slope).abs() <= 1e-10 * (1.0 + gradient) {
        IdentityVerdict::Equal
    } else {
        IdentityVerdict::Mismatch
    };
    Ok(GradientEnvelope {
        gradient,
        envelope_slope,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{build_example, ExampleKind};

    fn two() -> MetricSpace {
        build_example(ExampleKind::TwoPoint).unwrap()
    }

    fn q() -> CostFunction {
        CostFunction::quadratic()
    }

    #[test]
    fn gradient_fixtures() {
        assert_eq!(tilde_gradient(&[1.0, 0.0], &two()), vec![1.0, 0.0]);
        let p = build_example(ExampleKind::Path(3)).unwrap();
        assert_eq!(tilde_gradient(&[0.0, 5.0, 1.0], &p)[1], 5.0);
        assert_eq!(tilde_gradient(&[2.0; 3], &p), vec![0.0; 3]);
    }

    #[test]
    fn classical_fixture() {
        let v = classical_infconv(&[1.0, 0.0], 0.5, &q(), &two()).unwrap();
        assert_eq!(v, vec![1.0, 0.0]);
        assert!(classical_infconv(&[1.0, 0.0], 0.0, &q(), &two()).is_err());
    }

    #[test]
    fn profile_fixtures() {
        let pts = |p: DistanceProfile| p.points.iter().map(|q| (q.u, q.value)).collect::<Vec<_>>();
        assert_eq!(
            pts(distance_profile(&[1.0, 0.0], 0, &two())),
            vec![(0.0, 1.0), (1.0, 0.0)]
        );
        let k3 = build_example(ExampleKind::Complete(3)).unwrap();
        assert_eq!(
            pts(distance_profile(&[2.0, 0.0, 1.0], 0, &k3)),
            vec![(0.0, 2.0), (1.0, 0.0)]
        );
        let h2 = build_example(ExampleKind::Hypercube(2)).unwrap();
        assert_eq!(
            pts(distance_profile(&[0.0, 1.0, 1.0, 2.0], 0, &h2)),
            vec![(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)]
        );
    }

    fn env_of(points: &[(f64, f64)]) -> EnvelopeProfile {
        convex_envelope(&DistanceProfile {
            base: 0,
            points: points
                .iter()
                .enumerate()
                .map(|(i, &(u, value))| ProfilePoint { u, value, arg: i })
                .collect(),
        })
    }

    #[test]
    fn envelope_fixtures() {
        let bp = |e: &EnvelopeProfile| e.breakpoints.iter().map(|p| (p.u, p.value)).collect::<Vec<_>>();
        let e = env_of(&[(0.0, 1.0), (1.0, 0.0)]);
        assert_eq!(bp(&e), vec![(0.0, 1.0), (1.0, 0.0)]);
        let e = env_of(&[(0.0, 0.0), (1.0, 3.0), (2.0, 0.0)]);
        assert_eq!(bp(&e), vec![(0.0, 0.0), (2.0, 0.0)]);
        assert_eq!(e.eval(1.0), Some(0.0));
        let e = env_of(&[(0.0, 2.0), (1.0, 0.0), (2.0, 1.0)]);
        assert_eq!(bp(&e), vec![(0.0, 2.0), (1.0, 0.0), (2.0, 1.0)]);
        assert_eq!(e.slopes(), vec![-2.0, 1.0]);
        assert_eq!(e.eval(2.5), None);
    }

    #[test]
    fn two_point_closed_form() {
        for k in 1..20 {
            let t = k as f64 / 20.0;
            let w = weak_infconv(&[1.0, 0.0], t, &q(), &two()).unwrap();
            assert!((w.values[0] - (1.0 - t / 2.0)).abs() < 1e-15);
            assert_eq!(w.values[1], 0.0);
            assert!((w.argmin[0].u_min - t).abs() < 1e-15);
            let d = time_derivative(&[1.0, 0.0], t, 0, &q(), &two()).unwrap();
            assert!((d + 0.5).abs() < 1e-15);
        }
        let w = weak_infconv(&[1.0, 0.0], 0.5, &q(), &two()).unwrap();
        assert_eq!(w.values[0], 0.75);
        let wit = w.argmin[0].witnesses[0];
        assert_eq!((wit.first, wit.second, wit.weight_first), (0, 1, 0.5));
        let bf = weak_infconv_bruteforce(&[1.0, 0.0], 0.5, &q(), &two(), 11).unwrap();
        assert!((bf[0] - 0.75).abs() < 1e-14);
    }

    #[test]
    fn constant_function_is_fixed() {
        let s = build_example(ExampleKind::Cycle(5)).unwrap();
        for cost in [
            q(),
            CostFunction::power(3.0).unwrap(),
            CostFunction::quadratic_linear(1.0, 1.0).unwrap(),
        ] {
            let w = weak_infconv(&[2.5; 5], 0.7, &cost, &s).unwrap();
            assert_eq!(w.values, vec![2.5; 5]);
            assert!(w.argmin.iter().all(|a| a.u_min == 0.0 && a.u_max == 0.0));
        }
    }

    #[test]
    fn dirac_sweep_is_classical() {
        let s = build_example(ExampleKind::Path(4)).unwrap();
        let f = [3.0, -1.0, 2.0, 0.5];
        let bf = weak_infconv_bruteforce_with(
            &f,
            0.8,
            &q(),
            &s,
            BruteForce {
                grid_size: 2,
                refine: false,
            },
        )
        .unwrap();
        assert_eq!(bf, classical_infconv(&f, 0.8, &q(), &s).unwrap());
    }

    #[test]
    fn qlin_flat_segment() {
        // slope −2ah exactly: φ is flat on [ht, 1]
        let cost = CostFunction::quadratic_linear(0.5, 1.0).unwrap();
        let w = weak_infconv(&[1.0, 0.0], 0.25, &cost, &two()).unwrap();
        let a = &w.argmin[0];
        assert!((a.u_min - 0.25).abs() < 1e-15);
        assert_eq!(a.u_max, 1.0);
        assert_eq!(a.witnesses.len(), 2);
        assert!((cost.beta(a.u_min / 0.25) - cost.beta(a.u_max / 0.25)).abs() < 1e-15);
        assert!((w.values[0] - (1.0 - 0.25 * 0.5)).abs() < 1e-15);
    }

    #[test]
    fn identity_at_unique_minimiser() {
        let p = build_example(ExampleKind::Path(4)).unwrap();
        let f = [0.0, 1.0, 2.0, 3.0];
        let r = gradient_envelope_identity(&f, 0, &p).unwrap();
        assert_eq!(r.verdict, IdentityVerdict::UniqueMinimizer);
        assert_eq!(r.gradient, 0.0);
        assert_eq!(r.envelope_slope, 1.0);
        let r = gradient_envelope_identity(&[1.0, 0.0], 0, &two()).unwrap();
        assert_eq!(r.verdict, IdentityVerdict::Equal);
        assert_eq!((r.gradient, r.envelope_slope), (1.0, 1.0));
    }

    #[test]
    fn golden_section_finds_vertex() {
        let v = golden_min(|x| (x - 0.3).abs(), 0.0, 1.0);
        assert!(v < 1e-14);
    }
}
