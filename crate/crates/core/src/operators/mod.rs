//! Approximation operators behind a common [`Operator`] trait, looked up by
//! name in an [`OperatorRegistry`].

mod bernstein;
mod kernel;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::capacity::{CapacityError, Distortion, Kernel, KernelFamily, RealCapacity};
use crate::continuous::ContinuousError;
use crate::discrete::ChoquetError;
use crate::function::{FunctionError, FunctionSpec};
use crate::quadrature::{QuadratureConfig, QuadratureError};

pub use bernstein::{
    bernstein_basis, bernstein_choquet, bernstein_choquet_capacity, bernstein_choquet_closedform,
    bernstein_choquet_split, bernstein_choquet_values, bernstein_classical,
    bernstein_classical_values, perturbation, BernsteinChoquetScheme, FellerScheme,
};
pub use kernel::{
    kernel_choquet, picard_choquet, picard_classical, weierstrass_choquet, PICARD_WINDOW,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unknown operator `{name}`; registered: {known}")]
    Unknown { name: String, known: String },
    #[error(transparent)]
    Choquet(#[from] ChoquetError),
    #[error(transparent)]
    Continuous(#[from] ContinuousError),
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

impl OperatorError {
    /// Whether the failure is numeric non-convergence: a quadrature budget
    /// running out or a divergent integral.
    pub fn is_non_convergence(&self) -> bool {
        matches!(
            self,
            OperatorError::Quadrature(QuadratureError::NonConvergence { .. })
                | OperatorError::Continuous(ContinuousError::Divergence(_))
                | OperatorError::Continuous(ContinuousError::Quadrature(
                    QuadratureError::NonConvergence { .. }
                ))
                | OperatorError::Choquet(ChoquetError::Quadrature(
                    QuadratureError::NonConvergence { .. }
                ))
        )
    }
}

/// Where the perturbation of the Bernstein capacity sits: element `i0`
/// gains `θ·min_{i≠i0} p_{n,i}(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbationProfile {
    pub i0: usize,
    pub theta: f64,
}

impl Default for PerturbationProfile {
    fn default() -> Self {
        PerturbationProfile { i0: 1, theta: 1.0 }
    }
}

impl PerturbationProfile {
    pub fn new(i0: usize, theta: f64) -> Self {
        PerturbationProfile { i0, theta }
    }

    pub fn classical() -> Self {
        PerturbationProfile { i0: 1, theta: 0.0 }
    }

    pub fn validate(&self, n: usize) -> Result<(), OperatorError> {
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(OperatorError::Domain(format!(
                "theta must lie in [0, 1], got {}",
                self.theta
            )));
        }
        if self.i0 > n {
            return Err(OperatorError::Domain(format!(
                "i0 = {} is outside {{0, .., {n}}}",
                self.i0
            )));
        }
        Ok(())
    }
}

fn laplace() -> KernelFamily {
    KernelFamily::Laplace
}

/// Kernel of a possibility capacity; unset `n` and `x` follow the operator's
/// own parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelRef {
    #[serde(default = "laplace")]
    pub family: KernelFamily,
    #[serde(default)]
    pub n: Option<f64>,
    #[serde(default)]
    pub x: Option<f64>,
}

impl Default for KernelRef {
    fn default() -> Self {
        KernelRef {
            family: KernelFamily::Laplace,
            n: None,
            x: None,
        }
    }
}

/// Real-line capacity attached to a kernel operator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CapacitySpec {
    Possibility {
        #[serde(default)]
        kernel: KernelRef,
    },
    DistortedLebesgue {
        gamma: Distortion,
    },
}

impl Default for CapacitySpec {
    fn default() -> Self {
        CapacitySpec::Possibility {
            kernel: KernelRef::default(),
        }
    }
}

impl CapacitySpec {
    pub fn sqrt_lebesgue() -> Self {
        CapacitySpec::DistortedLebesgue {
            gamma: Distortion::Sqrt,
        }
    }

    pub fn validate(&self) -> Result<(), OperatorError> {
        match self {
            CapacitySpec::Possibility { kernel: k } => {
                Kernel::new(k.family, k.n.unwrap_or(1.0), k.x.unwrap_or(0.0))?;
            }
            CapacitySpec::DistortedLebesgue { gamma } => gamma.validate()?,
        }
        Ok(())
    }

    /// The capacity used at operator parameters `(n, x)`.
    pub fn resolve(&self, n: f64, x: f64) -> Result<RealCapacity, OperatorError> {
        Ok(match self {
            CapacitySpec::Possibility { kernel: k } => RealCapacity::Possibility {
                kernel: Kernel::new(k.family, k.n.unwrap_or(n), k.x.unwrap_or(x))?,
            },
            CapacitySpec::DistortedLebesgue { gamma } => {
                RealCapacity::DistortedLebesgue { gamma: *gamma }
            }
        })
    }

    pub fn name(&self) -> String {
        match self {
            CapacitySpec::Possibility { .. } => "possibility".into(),
            CapacitySpec::DistortedLebesgue { gamma } => format!("lebesgue-{}", gamma.name()),
        }
    }
}

/// Everything an operator may need besides `(f, n, x)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct OperatorSettings {
    pub profile: PerturbationProfile,
    pub capacity: CapacitySpec,
    pub quadrature: QuadratureConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    UnitInterval,
    RealLine,
}

impl Domain {
    pub fn check(&self, x: f64) -> Result<(), OperatorError> {
        let ok = match self {
            Domain::UnitInterval => (0.0..=1.0).contains(&x),
            Domain::RealLine => x.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(OperatorError::Domain(format!(
                "x = {x} lies outside {}",
                match self {
                    Domain::UnitInterval => "[0, 1]",
                    Domain::RealLine => "the real line",
                }
            )))
        }
    }
}

pub trait Operator: Send + Sync {
    fn name(&self) -> &'static str;

    fn domain(&self) -> Domain;

    /// `T_n(f)(x)`.
    fn apply(&self, f: &FunctionSpec, n: usize, x: f64) -> Result<f64, OperatorError>;

    /// `T_n(φ_x)(x)` with `φ_x(t) = |t − x|`.
    fn absolute_moment(&self, n: usize, x: f64) -> Result<f64, OperatorError> {
        self.apply(&FunctionSpec::AbsDev { center: x }, n, x)
    }
}

struct Bernstein;

impl Operator for Bernstein {
    fn name(&self) -> &'static str {
        "bernstein"
    }
    fn domain(&self) -> Domain {
        Domain::UnitInterval
    }
    fn apply(&self, f: &FunctionSpec, n: usize, x: f64) -> Result<f64, OperatorError> {
        bernstein_classical(f, n, x)
    }
}

struct BernsteinChoquet(PerturbationProfile);

impl Operator for BernsteinChoquet {
    fn name(&self) -> &'static str {
        "bernstein_choquet"
    }
    fn domain(&self) -> Domain {
        Domain::UnitInterval
    }
    fn apply(&self, f: &FunctionSpec, n: usize, x: f64) -> Result<f64, OperatorError> {
        bernstein_choquet(f, n, x, &self.0)
    }
}

struct Picard(QuadratureConfig);

impl Operator for Picard {
    fn name(&self) -> &'static str {
        "picard"
    }
    fn domain(&self) -> Domain {
        Domain::RealLine
    }
    fn apply(&self, f: &FunctionSpec, n: usize, x: f64) -> Result<f64, OperatorError> {
        picard_classical(f, n as f64, x, &self.0)
    }
}

struct KernelChoquet {
    name: &'static str,
    family: KernelFamily,
    capacity: CapacitySpec,
    quadrature: QuadratureConfig,
}

impl Operator for KernelChoquet {
    fn name(&self) -> &'static str {
        self.name
    }
    fn domain(&self) -> Domain {
        Domain::RealLine
    }
    fn apply(&self, f: &FunctionSpec, n: usize, x: f64) -> Result<f64, OperatorError> {
        let n = n as f64;
        let mu = self.capacity.resolve(n, x)?;
        kernel_choquet(f, Kernel::new(self.family, n, x)?, &mu, &self.quadrature)
    }
}

pub type Constructor = fn(&OperatorSettings) -> Result<Box<dyn Operator>, OperatorError>;

/// Name → constructor table.
pub struct OperatorRegistry {
    entries: Vec<(&'static str, Constructor)>,
}

impl Default for OperatorRegistry {
    fn default() -> Self {
        Self::standard()
    }
}

impl OperatorRegistry {
    pub fn empty() -> Self {
        OperatorRegistry {
            entries: Vec::new(),
        }
    }

    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register("bernstein", |_| Ok(Box::new(Bernstein)));
        r.register("bernstein_choquet", |s| {
            Ok(Box::new(BernsteinChoquet(s.profile)))
        });
        r.register("picard", |s| {
            s.quadrature.validate()?;
            Ok(Box::new(Picard(s.quadrature)))
        });
        r.register("picard_choquet", |s| {
            kernel_operator("picard_choquet", KernelFamily::Laplace, s)
        });
        r.register("weierstrass_choquet", |s| {
            kernel_operator("weierstrass_choquet", KernelFamily::Gauss, s)
        });
        r
    }

    /// Adds or replaces an entry.
    pub fn register(&mut self, name: &'static str, ctor: Constructor) {
        match self.entries.iter_mut().find(|(n, _)| *n == name) {
            Some(slot) => slot.1 = ctor,
            None => self.entries.push((name, ctor)),
        }
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.iter().any(|(n, _)| *n == name)
    }

    pub fn build(
        &self,
        name: &str,
        settings: &OperatorSettings,
    ) -> Result<Box<dyn Operator>, OperatorError> {
        let (_, ctor) = self
            .entries
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| OperatorError::Unknown {
                name: name.to_string(),
                known: self.names().join(", "),
            })?;
        ctor(settings)
    }
}

fn kernel_operator(
    name: &'static str,
    family: KernelFamily,
    s: &OperatorSettings,
) -> Result<Box<dyn Operator>, OperatorError> {
    s.quadrature.validate()?;
    s.capacity.validate()?;
    Ok(Box::new(KernelChoquet {
        name,
        family,
        capacity: s.capacity,
        quadrature: s.quadrature,
    }))
}

/// `(classical, choquet)` operator names compared against each other.
pub fn comparison_pair(name: &str) -> Option<(&'static str, &'static str)> {
    match name {
        "bernstein" | "bernstein_choquet" => Some(("bernstein", "bernstein_choquet")),
        "picard" | "picard_choquet" => Some(("picard", "picard_choquet")),
        _ => None,
    }
}
