use serde::{Deserialize, Serialize};

use super::CapacityError;

/// An increasing concave distortion `γ` with `γ(0) = 0`.
///
/// On `[0, 1]` each variant also satisfies `γ(1) = 1`. Arguments above 1 are
/// evaluated with the same analytic rule, which is what the distorted
/// Lebesgue capacity needs for sets longer than one unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distortion {
    Identity,
    Sqrt,
    /// `t ↦ t^p` with `0 < p ≤ 1`.
    Power(f64),
}

impl Distortion {
    pub fn power(p: f64) -> Result<Self, CapacityError> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(CapacityError::Validation(format!(
                "power distortion exponent must lie in (0, 1], got {p}"
            )));
        }
        Ok(Distortion::Power(p))
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        match *self {
            Distortion::Identity => t,
            Distortion::Sqrt => t.sqrt(),
            Distortion::Power(p) => t.powf(p),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Distortion::Identity => "identity".into(),
            Distortion::Sqrt => "sqrt".into(),
            Distortion::Power(p) => format!("power({p})"),
        }
    }

    /// Checks `γ(0)=0`, `γ(1)=1`, monotonicity and concavity on a grid of
    /// `[0, 1]` and on sampled triples.
    pub fn validate(&self) -> Result<(), CapacityError> {
        const TOL: f64 = 1e-12;
        let fail = |what: &str| {
            Err(CapacityError::Validation(format!(
                "distortion {} violates {what}",
                self.name()
            )))
        };
        if self.eval(0.0).abs() > TOL {
            return fail("γ(0) = 0");
        }
        if (self.eval(1.0) - 1.0).abs() > TOL {
            return fail("γ(1) = 1");
        }
        let grid: Vec<f64> = (0..=200).map(|k| k as f64 / 200.0).collect();
        for w in grid.windows(2) {
            if self.eval(w[1]) + TOL < self.eval(w[0]) {
                return fail("monotonicity");
            }
        }
        for w in grid.windows(3) {
            let mid = self.eval(w[1]);
            let chord = 0.5 * (self.eval(w[0]) + self.eval(w[2]));
            if mid + TOL < chord {
                return fail("concavity");
            }
        }
        Ok(())
    }
}
