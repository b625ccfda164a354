//! Capacities: monotone set functions on finite ground sets and on unions of
//! real intervals.
//!
//! Finite capacities implement [`Capacity`] over [`Subset`] bit masks, so the
//! same integration code serves explicit tables, analytic rules, duals and
//! pushforwards. Real-line capacities ([`RealCapacity`]) act on
//! [`IntervalUnion`]s, which is the class of sets the level-set oracles of the
//! continuous engine produce.

mod distortion;
mod interval;
mod properties;
pub mod random;
mod real;
mod subset;

pub use distortion::Distortion;
pub use interval::{Interval, IntervalUnion, Side};
pub use properties::{
    check_properties, check_properties_sampled, Property, PropertyReport, Violation,
    EXHAUSTIVE_LIMIT, TABLE_LIMIT,
};
pub use real::{Kernel, KernelFamily, RealCapacity};
pub use subset::{Subset, MAX_GROUND};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CapacityError {
    #[error("index {index} outside ground set of size {size}")]
    Domain { index: usize, size: usize },
    #[error("invalid capacity input: {0}")]
    Validation(String),
    #[error("ground set of size {size} exceeds the limit {limit} for {what}")]
    Capability {
        size: usize,
        limit: usize,
        what: &'static str,
    },
}

/// Absolute tolerance used when deciding normalization and property flags.
pub const CAPACITY_TOL: f64 = 1e-12;

/// A set function on the subsets of `{0, .., ground_size()-1}`.
pub trait Capacity {
    fn ground_size(&self) -> usize;

    /// `μ(subset)`. Bits at or above `ground_size()` must not be set.
    fn measure(&self, subset: Subset) -> f64;

    fn full_measure(&self) -> f64 {
        self.measure(Subset::full(self.ground_size()))
    }

    /// Bounds-checked [`Capacity::measure`].
    fn try_measure(&self, subset: Subset) -> Result<f64, CapacityError> {
        let size = self.ground_size();
        if subset.span() > size {
            return Err(CapacityError::Domain {
                index: subset.span() - 1,
                size,
            });
        }
        Ok(self.measure(subset))
    }
}

impl<C: Capacity + ?Sized> Capacity for &C {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn measure(&self, subset: Subset) -> f64 {
        (**self).measure(subset)
    }
}

/// Ground set `{ω_0, .., ω_n}` identified with indices `0..size`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiniteGroundSet {
    size: usize,
}

impl FiniteGroundSet {
    pub fn new(size: usize) -> Result<Self, CapacityError> {
        if size == 0 {
            return Err(CapacityError::Validation(
                "ground set must be nonempty".into(),
            ));
        }
        if size > MAX_GROUND {
            return Err(CapacityError::Capability {
                size,
                limit: MAX_GROUND,
                what: "subset representation",
            });
        }
        Ok(FiniteGroundSet { size })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn full(&self) -> Subset {
        Subset::full(self.size)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Rule {
    /// `2^size` values indexed by subset bit mask.
    Table(Vec<f64>),
    Additive(Vec<f64>),
    Distorted {
        gamma: Distortion,
        weights: Vec<f64>,
    },
    /// `max_{i ∈ A} w_i`.
    Possibility(Vec<f64>),
    /// `Σ_{i ∈ A} w_i` on proper subsets, a fixed value on the whole set.
    PinnedModular {
        weights: Vec<f64>,
        full: f64,
    },
    Dual(Box<DiscreteCapacity>),
}

/// A capacity on a finite ground set, given by a table or an analytic rule.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteCapacity {
    ground: FiniteGroundSet,
    rule: Rule,
}

fn check_weights(weights: &[f64]) -> Result<FiniteGroundSet, CapacityError> {
    let ground = FiniteGroundSet::new(weights.len())?;
    if let Some(w) = weights.iter().find(|w| !w.is_finite() || **w < 0.0) {
        return Err(CapacityError::Validation(format!(
            "weights must be finite and nonnegative, found {w}"
        )));
    }
    Ok(ground)
}

fn check_probability(weights: &[f64]) -> Result<FiniteGroundSet, CapacityError> {
    let ground = check_weights(weights)?;
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(CapacityError::Validation(format!(
            "weights must sum to 1, got {total}"
        )));
    }
    Ok(ground)
}

impl DiscreteCapacity {
    /// Explicit table of `2^size` values in bit-mask order. `table[0]` must be 0.
    pub fn from_table(size: usize, table: Vec<f64>) -> Result<Self, CapacityError> {
        let ground = FiniteGroundSet::new(size)?;
        if size > TABLE_LIMIT {
            return Err(CapacityError::Capability {
                size,
                limit: TABLE_LIMIT,
                what: "table storage",
            });
        }
        if table.len() != 1 << size {
            return Err(CapacityError::Validation(format!(
                "table for {size} elements needs {} entries, got {}",
                1usize << size,
                table.len()
            )));
        }
        if let Some(v) = table.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(CapacityError::Validation(format!(
                "capacity values must be finite and nonnegative, found {v}"
            )));
        }
        if table[0] != 0.0 {
            return Err(CapacityError::Validation(format!(
                "μ(∅) must be 0, got {}",
                table[0]
            )));
        }
        Ok(DiscreteCapacity {
            ground,
            rule: Rule::Table(table),
        })
    }

    /// Tabulates `rule` over every subset. `rule(∅)` is forced to 0.
    pub fn from_fn(size: usize, rule: impl Fn(Subset) -> f64) -> Result<Self, CapacityError> {
        if size > TABLE_LIMIT {
            return Err(CapacityError::Capability {
                size,
                limit: TABLE_LIMIT,
                what: "table storage",
            });
        }
        let table = Subset::all(size)
            .map(|s| if s.is_empty() { 0.0 } else { rule(s) })
            .collect();
        DiscreteCapacity::from_table(size, table)
    }

    pub fn additive(weights: Vec<f64>) -> Result<Self, CapacityError> {
        let ground = check_weights(&weights)?;
        Ok(DiscreteCapacity {
            ground,
            rule: Rule::Additive(weights),
        })
    }

    /// Uniform probability on `size` points.
    pub fn uniform(size: usize) -> Result<Self, CapacityError> {
        DiscreteCapacity::additive(vec![1.0 / size.max(1) as f64; size])
    }

    /// `μ(A) = γ(Σ_{i∈A} w_i)` for a probability vector `w`.
    pub fn distorted_probability(
        gamma: Distortion,
        weights: Vec<f64>,
    ) -> Result<Self, CapacityError> {
        let ground = check_probability(&weights)?;
        gamma.validate()?;
        Ok(DiscreteCapacity {
            ground,
            rule: Rule::Distorted { gamma, weights },
        })
    }

    /// `μ(A) = max_{i∈A} w_i`; normalized when some weight equals 1.
    pub fn possibility(weights: Vec<f64>) -> Result<Self, CapacityError> {
        let ground = check_weights(&weights)?;
        Ok(DiscreteCapacity {
            ground,
            rule: Rule::Possibility(weights),
        })
    }

    /// Modular on proper subsets with element weights `weights`, pinned to
    /// `full` on the whole ground set. The perturbed Bernstein capacity has
    /// this shape.
    pub fn pinned_modular(weights: Vec<f64>, full: f64) -> Result<Self, CapacityError> {
        let ground = check_weights(&weights)?;
        if !full.is_finite() || full < 0.0 {
            return Err(CapacityError::Validation(format!(
                "value on the ground set must be finite and nonnegative, got {full}"
            )));
        }
        Ok(DiscreteCapacity {
            ground,
            rule: Rule::PinnedModular { weights, full },
        })
    }

    pub fn ground(&self) -> FiniteGroundSet {
        self.ground
    }

    pub fn is_normalized(&self) -> bool {
        (self.full_measure() - 1.0).abs() <= CAPACITY_TOL
    }

    /// Element weights when the capacity is additive.
    pub fn additive_weights(&self) -> Option<&[f64]> {
        match &self.rule {
            Rule::Additive(w) => Some(w),
            _ => None,
        }
    }

    /// `μ̄(A) = μ(Ω) − μ(Ω∖A)`.
    pub fn dual(&self) -> DiscreteCapacity {
        DiscreteCapacity {
            ground: self.ground,
            rule: Rule::Dual(Box::new(self.clone())),
        }
    }

    /// Short description for reports.
    pub fn describe(&self) -> String {
        let n = self.ground.size();
        match &self.rule {
            Rule::Table(_) => format!("table[{n}]"),
            Rule::Additive(_) => format!("additive[{n}]"),
            Rule::Distorted { gamma, .. } => format!("distorted-{}[{n}]", gamma.name()),
            Rule::Possibility(_) => format!("possibility[{n}]"),
            Rule::PinnedModular { .. } => format!("pinned-modular[{n}]"),
            Rule::Dual(inner) => format!("dual({})", inner.describe()),
        }
    }
}

impl Capacity for DiscreteCapacity {
    fn ground_size(&self) -> usize {
        self.ground.size()
    }

    fn measure(&self, subset: Subset) -> f64 {
        debug_assert!(subset.span() <= self.ground.size());
        if subset.is_empty() {
            return 0.0;
        }
        let sum = |w: &[f64]| subset.iter().map(|i| w[i]).sum::<f64>();
        match &self.rule {
            Rule::Table(t) => t[subset.bits() as usize],
            Rule::Additive(w) => sum(w),
            Rule::Distorted { gamma, weights } => gamma.eval(sum(weights)),
            Rule::Possibility(w) => subset.iter().map(|i| w[i]).fold(0.0, f64::max),
            Rule::PinnedModular { weights, full } => {
                if subset == self.ground.full() {
                    *full
                } else {
                    sum(weights)
                }
            }
            Rule::Dual(inner) => {
                let full = self.ground.full();
                inner.measure(full) - inner.measure(full.difference(subset))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn additive_uniform_value() {
        let mu = DiscreteCapacity::uniform(3).unwrap();
        let v = mu.try_measure(Subset::from_indices([0, 2])).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn sqrt_cardinality_rule() {
        let mu = DiscreteCapacity::from_fn(3, |s| (s.len() as f64 / 3.0).sqrt()).unwrap();
        let v = mu.measure(Subset::singleton(1));
        assert!((v - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((v - 0.57735).abs() < 1e-5);
    }

    #[test]
    fn empty_set_is_null() {
        let caps = [
            DiscreteCapacity::uniform(4).unwrap(),
            DiscreteCapacity::possibility(vec![0.2, 1.0]).unwrap(),
            DiscreteCapacity::distorted_probability(Distortion::Sqrt, vec![0.5, 0.5]).unwrap(),
            DiscreteCapacity::pinned_modular(vec![0.3, 0.8], 1.0).unwrap(),
        ];
        for mu in &caps {
            assert_eq!(mu.measure(Subset::EMPTY), 0.0);
            assert_eq!(mu.dual().measure(Subset::EMPTY), 0.0);
        }
    }

    #[test]
    fn out_of_range_index_is_domain_error() {
        let mu = DiscreteCapacity::uniform(3).unwrap();
        assert_eq!(
            mu.try_measure(Subset::singleton(3)),
            Err(CapacityError::Domain { index: 3, size: 3 })
        );
    }

    #[test]
    fn dual_of_two_point_capacity() {
        let mu = DiscreteCapacity::from_table(2, vec![0.0, 0.3, 0.9, 1.0]).unwrap();
        let dual = mu.dual();
        assert!((dual.measure(Subset::singleton(0)) - 0.1).abs() < 1e-15);
        assert!((dual.measure(Subset::singleton(1)) - 0.7).abs() < 1e-15);
        assert!((dual.full_measure() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn additive_capacity_is_self_dual() {
        let mu = DiscreteCapacity::additive(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let dual = mu.dual();
        for s in Subset::all(4) {
            assert!((mu.measure(s) - dual.measure(s)).abs() < 1e-15);
        }
    }

    #[test]
    fn distorted_identity_is_additive() {
        let w = vec![0.2, 0.5, 0.3];
        let mu = DiscreteCapacity::distorted_probability(Distortion::Identity, w.clone()).unwrap();
        let add = DiscreteCapacity::additive(w).unwrap();
        for s in Subset::all(3) {
            assert!((mu.measure(s) - add.measure(s)).abs() < 1e-15);
        }
    }

    #[test]
    fn distorted_sqrt_single_point() {
        let mu =
            DiscreteCapacity::distorted_probability(Distortion::Sqrt, vec![1.0 / 3.0; 3]).unwrap();
        let v = mu.measure(Subset::singleton(2));
        assert!((v - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_probability_weights() {
        assert!(matches!(
            DiscreteCapacity::distorted_probability(Distortion::Sqrt, vec![0.5, 0.6]),
            Err(CapacityError::Validation(_))
        ));
        assert!(
            DiscreteCapacity::distorted_probability(Distortion::Sqrt, vec![1.5, -0.5]).is_err()
        );
    }

    #[test]
    fn table_validation() {
        assert!(DiscreteCapacity::from_table(2, vec![0.0, 0.1, 0.2]).is_err());
        assert!(DiscreteCapacity::from_table(1, vec![0.1, 0.2]).is_err());
        assert!(DiscreteCapacity::from_table(1, vec![0.0, f64::NAN]).is_err());
        assert!(matches!(
            DiscreteCapacity::from_fn(TABLE_LIMIT + 1, |_| 1.0),
            Err(CapacityError::Capability { .. })
        ));
    }
}
