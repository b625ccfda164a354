use serde::{Deserialize, Serialize};

use super::{CapacityError, Distortion, Interval, IntervalUnion};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelFamily {
    /// `t ↦ e^{-n|t-x|}`
    Laplace,
    /// `t ↦ e^{-n(t-x)²}`
    Gauss,
}

/// Unimodal kernel with peak value 1 at `t = x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kernel {
    pub family: KernelFamily,
    pub n: f64,
    pub x: f64,
}

impl Kernel {
    pub fn new(family: KernelFamily, n: f64, x: f64) -> Result<Self, CapacityError> {
        if !(n.is_finite() && n > 0.0) {
            return Err(CapacityError::Validation(format!(
                "kernel rate must be positive and finite, got {n}"
            )));
        }
        if !x.is_finite() {
            return Err(CapacityError::Validation(format!(
                "kernel center must be finite, got {x}"
            )));
        }
        Ok(Kernel { family, n, x })
    }

    pub fn laplace(n: f64, x: f64) -> Result<Self, CapacityError> {
        Kernel::new(KernelFamily::Laplace, n, x)
    }

    pub fn gauss(n: f64, x: f64) -> Result<Self, CapacityError> {
        Kernel::new(KernelFamily::Gauss, n, x)
    }

    pub fn value(&self, t: f64) -> f64 {
        let d = (t - self.x).abs();
        match self.family {
            KernelFamily::Laplace => (-self.n * d).exp(),
            KernelFamily::Gauss => (-self.n * d * d).exp(),
        }
    }

    /// `-ln` of the kernel at distance `d` from the center.
    pub fn log_decay(&self, d: f64) -> f64 {
        match self.family {
            KernelFamily::Laplace => self.n * d,
            KernelFamily::Gauss => self.n * d * d,
        }
    }

    /// Half-width of `{t : K(t) ≥ α}` for `0 < α ≤ 1`.
    pub fn radius(&self, alpha: f64) -> f64 {
        let s = -alpha.ln();
        match self.family {
            KernelFamily::Laplace => s / self.n,
            KernelFamily::Gauss => (s / self.n).sqrt(),
        }
        .max(0.0)
    }

    /// Supremum of the kernel over a union of intervals: the kernel at the
    /// point of the union closest to the center, 0 on the empty set.
    pub fn sup_over(&self, set: &IntervalUnion) -> f64 {
        set.nearest_point(self.x).map_or(0.0, |t| self.value(t))
    }

    pub fn sup_on_interval(&self, iv: &Interval) -> f64 {
        self.value(iv.clamp(self.x))
    }
}

/// A capacity on bounded interval unions of the real line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RealCapacity {
    /// `μ(A) = γ(m(A))` with `m` the Lebesgue measure.
    DistortedLebesgue { gamma: Distortion },
    /// `μ(A) = sup_{t∈A} K(t)`.
    Possibility { kernel: Kernel },
}

impl RealCapacity {
    pub fn sqrt_lebesgue() -> Self {
        RealCapacity::DistortedLebesgue {
            gamma: Distortion::Sqrt,
        }
    }

    pub fn evaluate(&self, set: &IntervalUnion) -> f64 {
        if set.is_empty() {
            return 0.0;
        }
        match self {
            RealCapacity::DistortedLebesgue { gamma } => gamma.eval(set.total_length()),
            RealCapacity::Possibility { kernel } => set
                .intervals()
                .iter()
                .map(|iv| kernel.sup_on_interval(iv))
                .fold(0.0, f64::max),
        }
    }

    pub fn name(&self) -> String {
        match self {
            RealCapacity::DistortedLebesgue { gamma } => format!("lebesgue-{}", gamma.name()),
            RealCapacity::Possibility { kernel } => format!(
                "possibility-{}",
                match kernel.family {
                    KernelFamily::Laplace => "laplace",
                    KernelFamily::Gauss => "gauss",
                }
            ),
        }
    }
}
