//! Registry of named test functions.
//!
//! The names (`exp_neg`, `const`, `abs_dev`, `sqrt`, `concave_quad`, `e0`,
//! `e1`, `pw_linear`) are part of the CLI and config surface.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FunctionError {
    #[error("unknown function `{0}`; expected one of {NAMES:?}")]
    Unknown(String),
    #[error("invalid parameters for `{name}`: {reason}")]
    Invalid { name: &'static str, reason: String },
}

pub const NAMES: [&str; 8] = [
    "exp_neg",
    "const",
    "abs_dev",
    "sqrt",
    "concave_quad",
    "e0",
    "e1",
    "pw_linear",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Nondecreasing,
    Nonincreasing,
    Neither,
}

fn one() -> f64 {
    1.0
}

fn default_knots() -> Vec<(f64, f64)> {
    vec![(0.0, 0.0), (0.25, 0.5), (0.5, 0.8), (1.0, 1.0)]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum FunctionSpec {
    /// `scale · e^{-λt}`
    ExpNeg {
        #[serde(default = "one")]
        lambda: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    #[serde(rename = "const")]
    Constant {
        #[serde(default = "one")]
        value: f64,
    },
    /// `|t − center|`
    AbsDev {
        #[serde(default)]
        center: f64,
    },
    /// `√max(t − shift, 0)`
    Sqrt {
        #[serde(default)]
        shift: f64,
    },
    /// `2t − t²`
    ConcaveQuad,
    E0,
    E1,
    /// Linear interpolation through `knots` (sorted by abscissa), constant
    /// beyond the outer knots.
    PwLinear {
        #[serde(default = "default_knots")]
        knots: Vec<(f64, f64)>,
    },
}

impl FunctionSpec {
    /// The registered function with default parameters.
    pub fn from_name(name: &str) -> Result<Self, FunctionError> {
        Ok(match name {
            "exp_neg" => FunctionSpec::ExpNeg {
                lambda: 1.0,
                scale: 1.0,
            },
            "const" => FunctionSpec::Constant { value: 1.0 },
            "abs_dev" => FunctionSpec::AbsDev { center: 0.0 },
            "sqrt" => FunctionSpec::Sqrt { shift: 0.0 },
            "concave_quad" => FunctionSpec::ConcaveQuad,
            "e0" => FunctionSpec::E0,
            "e1" => FunctionSpec::E1,
            "pw_linear" => FunctionSpec::PwLinear {
                knots: default_knots(),
            },
            other => return Err(FunctionError::Unknown(other.to_string())),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            FunctionSpec::ExpNeg { .. } => "exp_neg",
            FunctionSpec::Constant { .. } => "const",
            FunctionSpec::AbsDev { .. } => "abs_dev",
            FunctionSpec::Sqrt { .. } => "sqrt",
            FunctionSpec::ConcaveQuad => "concave_quad",
            FunctionSpec::E0 => "e0",
            FunctionSpec::E1 => "e1",
            FunctionSpec::PwLinear { .. } => "pw_linear",
        }
    }

    pub fn validate(&self) -> Result<(), FunctionError> {
        let bad = |reason: String| {
            Err(FunctionError::Invalid {
                name: self.name(),
                reason,
            })
        };
        match self {
            FunctionSpec::ExpNeg { lambda, scale } => {
                if !(lambda.is_finite() && *lambda > 0.0) {
                    return bad(format!("rate must be positive, got {lambda}"));
                }
                if !(scale.is_finite() && *scale >= 0.0) {
                    return bad(format!("scale must be nonnegative, got {scale}"));
                }
            }
            FunctionSpec::Constant { value } if !value.is_finite() => {
                return bad(format!("value must be finite, got {value}"));
            }
            FunctionSpec::AbsDev { center } if !center.is_finite() => {
                return bad(format!("center must be finite, got {center}"));
            }
            FunctionSpec::Sqrt { shift } if !shift.is_finite() => {
                return bad(format!("shift must be finite, got {shift}"));
            }
            FunctionSpec::PwLinear { knots } => {
                if knots.is_empty() {
                    return bad("at least one knot is required".into());
                }
                if knots.iter().any(|(a, b)| !a.is_finite() || !b.is_finite()) {
                    return bad("knots must be finite".into());
                }
                if knots.windows(2).any(|w| w[0].0 >= w[1].0) {
                    return bad("knot abscissae must be strictly increasing".into());
                }
            }
            _ => {}
        }
        Ok(())
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            FunctionSpec::ExpNeg { lambda, scale } => scale * (-lambda * t).exp(),
            FunctionSpec::Constant { value } => *value,
            FunctionSpec::AbsDev { center } => (t - center).abs(),
            FunctionSpec::Sqrt { shift } => (t - shift).max(0.0).sqrt(),
            FunctionSpec::ConcaveQuad => 2.0 * t - t * t,
            FunctionSpec::E0 => 1.0,
            FunctionSpec::E1 => t,
            FunctionSpec::PwLinear { knots } => interpolate(knots, t),
        }
    }

    /// `ln f(t)`, `-∞` where `f` vanishes. Only meaningful for `f ≥ 0`.
    pub fn ln_eval(&self, t: f64) -> f64 {
        match self {
            FunctionSpec::ExpNeg { lambda, scale } => scale.ln() - lambda * t,
            _ => self.eval(t).max(0.0).ln(),
        }
    }

    /// Whether `f ≥ 0` on the whole real line.
    pub fn nonnegative_on_real(&self) -> bool {
        match self {
            FunctionSpec::Constant { value } => *value >= 0.0,
            FunctionSpec::ConcaveQuad | FunctionSpec::E1 => false,
            FunctionSpec::PwLinear { knots } => knots.iter().all(|(_, v)| *v >= 0.0),
            _ => true,
        }
    }

    /// Points splitting the line into pieces on which `ln f` is concave.
    pub fn kinks(&self) -> Vec<f64> {
        match self {
            FunctionSpec::AbsDev { center } => vec![*center],
            FunctionSpec::Sqrt { shift } => vec![*shift],
            FunctionSpec::ConcaveQuad => vec![0.0, 2.0],
            FunctionSpec::PwLinear { knots } => knots.iter().map(|k| k.0).collect(),
            _ => Vec::new(),
        }
    }

    /// Monotonicity on `[a, b]`, from the analytic rule.
    pub fn monotonicity_on(&self, a: f64, b: f64) -> Monotonicity {
        use Monotonicity::*;
        match self {
            FunctionSpec::ExpNeg { .. } => Nonincreasing,
            FunctionSpec::Constant { .. } | FunctionSpec::E0 => Nondecreasing,
            FunctionSpec::E1 | FunctionSpec::Sqrt { .. } => Nondecreasing,
            FunctionSpec::AbsDev { center } => {
                if a >= *center {
                    Nondecreasing
                } else if b <= *center {
                    Nonincreasing
                } else {
                    Neither
                }
            }
            FunctionSpec::ConcaveQuad => {
                if b <= 1.0 {
                    Nondecreasing
                } else if a >= 1.0 {
                    Nonincreasing
                } else {
                    Neither
                }
            }
            FunctionSpec::PwLinear { knots } => {
                let mut pts = vec![a];
                pts.extend(knots.iter().map(|k| k.0).filter(|&t| t > a && t < b));
                pts.push(b);
                let vals: Vec<f64> = pts.iter().map(|&t| self.eval(t)).collect();
                if vals.windows(2).all(|w| w[0] <= w[1]) {
                    Nondecreasing
                } else if vals.windows(2).all(|w| w[0] >= w[1]) {
                    Nonincreasing
                } else {
                    Neither
                }
            }
        }
    }

    /// Exact modulus of continuity `sup{|f(t) − f(s)| : t, s ∈ [a, b], |t − s| ≤ δ}`.
    pub fn modulus(&self, delta: f64, a: f64, b: f64) -> f64 {
        let d = delta.min(b - a).max(0.0);
        match self {
            FunctionSpec::Constant { .. } | FunctionSpec::E0 => 0.0,
            FunctionSpec::E1 => d,
            FunctionSpec::AbsDev { center } => self.vertex_modulus(&[*center], d, a, b),
            FunctionSpec::ExpNeg { lambda, scale } => {
                scale * ((-lambda * a).exp() - (-lambda * (a + d)).exp())
            }
            FunctionSpec::Sqrt { shift } => {
                if *shift >= b {
                    0.0
                } else if *shift <= a {
                    (a + d - shift).sqrt() - (a - shift).sqrt()
                } else {
                    ((shift + d).min(b) - shift).sqrt()
                }
            }
            // the sup over |t − s| ≤ d sits at a vertex of the constraint
            // polygon cut by the lines through kinks or critical points
            FunctionSpec::ConcaveQuad => self.vertex_modulus(&[1.0], d, a, b),
            FunctionSpec::PwLinear { knots } => {
                let pts: Vec<f64> = knots.iter().map(|k| k.0).collect();
                self.vertex_modulus(&pts, d, a, b)
            }
        }
    }
}

impl FunctionSpec {
    fn vertex_modulus(&self, special: &[f64], d: f64, a: f64, b: f64) -> f64 {
        let mut pts: Vec<f64> = special
            .iter()
            .copied()
            .filter(|&t| t > a && t < b)
            .collect();
        pts.push(a);
        pts.push(b);
        let mut best: f64 = 0.0;
        for &p in &pts {
            for q in pts.iter().copied().chain([p - d, p + d]) {
                let q = q.clamp(a, b);
                if (q - p).abs() <= d * (1.0 + 1e-12) {
                    best = best.max((self.eval(p) - self.eval(q)).abs());
                }
            }
        }
        best
    }
}

fn interpolate(knots: &[(f64, f64)], t: f64) -> f64 {
    let first = knots[0];
    let last = knots[knots.len() - 1];
    if t <= first.0 {
        return first.1;
    }
    if t >= last.0 {
        return last.1;
    }
    let k = knots.partition_point(|k| k.0 <= t);
    let (t0, v0) = knots[k - 1];
    let (t1, v1) = knots[k];
    v0 + (v1 - v0) * (t - t0) / (t1 - t0)
}
