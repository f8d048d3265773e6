//! Convex cost functions `α: [0, ∞) → [0, ∞)` with `α(0) = α'(0) = 0`.
//!
//! Three families are supported:
//!
//! | variant | `α(x)` | `α*(y)` |
//! |---|---|---|
//! | quadratic | `x²/2` | `y²/2` |
//! | power `p > 1` | `x^p/p` | `y^q/q`, `1/p + 1/q = 1` |
//! | quadratic-linear `(a, h)` | `ax²` on `[0,h]`, `2ahx − ah²` beyond | `y²/(4a)` for `y ≤ 2ah`, `+∞` beyond |
//!
//! The quadratic-linear conjugate has bounded domain; [`Extended`] carries the
//! `+∞` values so they can be compared but not silently used in arithmetic.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A real number or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(f64),
    PosInfinity,
}

impl Extended {
    pub fn is_finite(self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    /// The finite value, or an error naming the context.
    pub fn value(self, context: &'static str) -> Result<f64> {
        match self {
            Extended::Finite(v) => Ok(v),
            Extended::PosInfinity => Err(Error::InfiniteValue(context)),
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::PosInfinity => None,
        }
    }

    /// Lossy view as an IEEE float (`+∞` maps to `f64::INFINITY`).
    pub fn to_f64(self) -> f64 {
        match self {
            Extended::Finite(v) => v,
            Extended::PosInfinity => f64::INFINITY,
        }
    }
}

impl PartialOrd for Extended {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Extended::Finite(a), Extended::Finite(b)) => a.partial_cmp(b),
            (Extended::Finite(_), Extended::PosInfinity) => Some(Ordering::Less),
            (Extended::PosInfinity, Extended::Finite(_)) => Some(Ordering::Greater),
            (Extended::PosInfinity, Extended::PosInfinity) => Some(Ordering::Equal),
        }
    }
}

impl fmt::Display for Extended {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::PosInfinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Extended {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(v) => s.serialize_f64(*v),
            Extended::PosInfinity => s.serialize_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostFunction {
    Quadratic,
    Power { p: f64 },
    QuadraticLinear { a: f64, h: f64 },
}

impl CostFunction {
    pub fn quadratic() -> Self {
        CostFunction::Quadratic
    }

    pub fn power(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::InvalidCost(format!("power exponent must be > 1, got {p}")));
        }
        Ok(CostFunction::Power { p })
    }

    pub fn quadratic_linear(a: f64, h: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0 && h.is_finite() && h > 0.0) {
            return Err(Error::InvalidCost(format!(
                "quadratic-linear needs a, h > 0, got a = {a}, h = {h}"
            )));
        }
        Ok(CostFunction::QuadraticLinear { a, h })
    }

    /// `α(x)` for `x ≥ 0`.
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            CostFunction::Quadratic => 0.5 * x * x,
            CostFunction::Power { p } => x.powf(p) / p,
            CostFunction::QuadraticLinear { a, h } => {
                if x <= h {
                    a * x * x
                } else {
                    2.0 * a * h * x - a * h * h
                }
            }
        }
    }

    /// `α'(x)` for `x ≥ 0`.
    pub fn deriv(&self, x: f64) -> f64 {
        match *self {
            CostFunction::Quadratic => x,
            CostFunction::Power { p } => x.powf(p - 1.0),
            CostFunction::QuadraticLinear { a, h } => 2.0 * a * x.min(h),
        }
    }

    /// `α*(y) = sup_{x ≥ 0} { xy − α(x) }` for `y ≥ 0`.
    pub fn conjugate(&self, y: f64) -> Extended {
        match *self {
            CostFunction::Quadratic => Extended::Finite(0.5 * y * y),
            CostFunction::Power { p } => {
                let q = p / (p - 1.0);
                Extended::Finite(y.powf(q) / q)
            }
            CostFunction::QuadraticLinear { a, h } => {
                if y <= 2.0 * a * h {
                    Extended::Finite(y * y / (4.0 * a))
                } else {
                    Extended::PosInfinity
                }
            }
        }
    }

    /// Derivative of `α*` on its finite domain.
    pub fn conjugate_deriv(&self, y: f64) -> f64 {
        match *self {
            CostFunction::Quadratic => y,
            CostFunction::Power { p } => y.powf(1.0 / (p - 1.0)),
            CostFunction::QuadraticLinear { a, .. } => y / (2.0 * a),
        }
    }

    /// `β(x) = xα'(x) − α(x)`.
    pub fn beta(&self, x: f64) -> f64 {
        match *self {
            CostFunction::Quadratic => 0.5 * x * x,
            CostFunction::Power { p } => x.powf(p) * (1.0 - 1.0 / p),
            CostFunction::QuadraticLinear { a, h } => {
                let z = x.min(h);
                a * z * z
            }
        }
    }

    /// The bound `l` with `α*(y) < ∞` iff `y ≤ l`.
    pub fn conjugate_domain_bound(&self) -> Extended {
        match *self {
            CostFunction::QuadraticLinear { a, h } => Extended::Finite(2.0 * a * h),
            _ => Extended::PosInfinity,
        }
    }
}

impl fmt::Display for CostFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostFunction::Quadratic => write!(f, "quadratic"),
            CostFunction::Power { p } => write!(f, "power:p={p}"),
            CostFunction::QuadraticLinear { a, h } => write!(f, "qlin:a={a},h={h}"),
        }
    }
}

impl FromStr for CostFunction {
    type Err = Error;

    /// `quadratic`, `power:p=3`, `qlin:a=0.25,h=2`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, params) = s.split_once(':').unwrap_or((s, ""));
        let mut p = None;
        let mut a = None;
        let mut h = None;
        for kv in params.split(',').filter(|kv| !kv.trim().is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::InvalidCost(format!("expected key=value, got `{kv}`")))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| Error::InvalidCost(format!("`{v}` is not a number")))?;
            let slot = match k.trim() {
                "p" => &mut p,
                "a" => &mut a,
                "h" => &mut h,
                other => return Err(Error::InvalidCost(format!("unknown parameter `{other}`"))),
            };
            *slot = Some(v);
        }
        let missing = |k: &str| Error::InvalidCost(format!("`{name}` needs parameter `{k}`"));
        match name {
            "quadratic" if params.is_empty() => Ok(CostFunction::Quadratic),
            "power" if a.is_none() && h.is_none() => Self::power(p.ok_or_else(|| missing("p"))?),
            "qlin" if p.is_none() => {
                Self::quadratic_linear(a.ok_or_else(|| missing("a"))?, h.ok_or_else(|| missing("h"))?)
            }
            _ => Err(Error::InvalidCost(format!("unrecognised cost `{s}`"))),
        }
    }
}
