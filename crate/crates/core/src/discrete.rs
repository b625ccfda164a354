//! Choquet integration on finite ground sets.
//!
//! The engine is the sorted tail-sum
//! `Σ X(ω*_i)·[μ({ω*_i..ω*_n}) − μ({ω*_{i+1}..ω*_n})]`, which is exact for
//! signed integrands and costs one sort plus `n+1` capacity evaluations.
//! [`layer_cake_integral`] computes the same quantity the slow way, by
//! quadrature of `α ↦ μ({X ≥ α})`, and exists to cross-check the engine.

use rand::Rng;
use thiserror::Error;

use crate::capacity::{
    check_properties, random, Capacity, CapacityError, DiscreteCapacity, Subset,
};
use crate::quadrature::{self, QuadratureConfig, QuadratureError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChoquetError {
    #[error("function has {values} values but the ground set has {ground} elements")]
    LengthMismatch { values: usize, ground: usize },
    #[error("non-finite function value {0}")]
    NonFinite(f64),
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// Values `X(ω_0), .., X(ω_n)` of a function on a finite ground set.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteFunction {
    values: Vec<f64>,
}

impl DiscreteFunction {
    pub fn new(values: Vec<f64>) -> Result<Self, ChoquetError> {
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(ChoquetError::NonFinite(*v));
        }
        Ok(DiscreteFunction { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `f ∘ X`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self, ChoquetError> {
        DiscreteFunction::new(self.values.iter().map(|&v| f(v)).collect())
    }
}

impl TryFrom<Vec<f64>> for DiscreteFunction {
    type Error = ChoquetError;
    fn try_from(values: Vec<f64>) -> Result<Self, Self::Error> {
        DiscreteFunction::new(values)
    }
}

fn check_len<C: Capacity + ?Sized>(x: &DiscreteFunction, mu: &C) -> Result<(), ChoquetError> {
    if x.len() != mu.ground_size() {
        return Err(ChoquetError::LengthMismatch {
            values: x.len(),
            ground: mu.ground_size(),
        });
    }
    Ok(())
}

/// Indices sorted by `(value, index)`.
pub fn ascending_order(values: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]).then(i.cmp(&j)));
    order
}

/// Choquet integral of `x` over the whole ground set.
pub fn choquet_integral<C: Capacity + ?Sized>(
    x: &DiscreteFunction,
    mu: &C,
) -> Result<f64, ChoquetError> {
    check_len(x, mu)?;
    Ok(sorted_tail_sum(x.values(), |a| mu.measure(a)))
}

/// `Σ X(ω*_i)·[ν(T_i) − ν(T_{i+1})]` over the ascending order, for any set
/// function `ν`. The sum is linear in `ν` for a fixed order, so a capacity
/// can be split into a large additive part and a small remainder.
pub fn sorted_tail_sum(values: &[f64], nu: impl Fn(Subset) -> f64) -> f64 {
    let order = ascending_order(values);
    let mut tail = Subset::full(values.len());
    let mut upper = nu(tail);
    let mut total = 0.0;
    for &i in &order {
        tail = tail.without(i);
        let lower = nu(tail);
        total += values[i] * (upper - lower);
        upper = lower;
    }
    total
}

/// `E_Ch(X) = (C)∫ X dμ`.
pub fn choquet_expectance<C: Capacity + ?Sized>(
    x: &DiscreteFunction,
    mu: &C,
) -> Result<f64, ChoquetError> {
    choquet_integral(x, mu)
}

/// `VAR_Ch(X) = E_Ch((X − E_Ch(X))²)`.
pub fn choquet_variance<C: Capacity + ?Sized>(
    x: &DiscreteFunction,
    mu: &C,
) -> Result<f64, ChoquetError> {
    let mean = choquet_expectance(x, mu)?;
    choquet_integral(&x.map(|v| (v - mean).powi(2))?, mu)
}

/// The set `{ω : X(ω) ≥ α}`, found by a direct scan.
pub fn upper_level_set(values: &[f64], alpha: f64) -> Subset {
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= alpha)
        .map(|(i, _)| i)
        .collect()
}

/// `∫_0^∞ μ(F_α) dα + ∫_{-∞}^0 [μ(F_α) − μ(Ω)] dα` by adaptive quadrature,
/// with breakpoints at the function values.
pub fn layer_cake_integral<C: Capacity + ?Sized>(
    x: &DiscreteFunction,
    mu: &C,
    cfg: &QuadratureConfig,
) -> Result<f64, ChoquetError> {
    check_len(x, mu)?;
    let values = x.values();
    let full = mu.full_measure();
    let top = values.iter().copied().fold(0.0, f64::max);
    let bottom = values.iter().copied().fold(0.0, f64::min);
    let positive = quadrature::integrate(
        |a| mu.measure(upper_level_set(values, a)),
        0.0,
        top,
        values,
        cfg,
    )?;
    let negative = quadrature::integrate(
        |a| mu.measure(upper_level_set(values, a)) - full,
        bottom,
        0.0,
        values,
        cfg,
    )?;
    Ok(positive.value + negative.value)
}

/// Distribution `μ_X(B) = μ(X⁻¹(B))` of `X` under `μ`.
///
/// The ground set of the pushforward is the sorted list of distinct values
/// that `X` reaches; element `k` stands for `reached()[k]`.
#[derive(Debug, Clone)]
pub struct Pushforward<'a, C: Capacity + ?Sized> {
    source: &'a C,
    reached: Vec<f64>,
    preimages: Vec<Subset>,
}

pub fn pushforward<'a, C: Capacity + ?Sized>(
    x: &DiscreteFunction,
    mu: &'a C,
) -> Result<Pushforward<'a, C>, ChoquetError> {
    check_len(x, mu)?;
    let mut reached: Vec<f64> = x.values().to_vec();
    reached.sort_by(f64::total_cmp);
    reached.dedup();
    let preimages = reached
        .iter()
        .map(|&r| {
            x.values()
                .iter()
                .enumerate()
                .filter(|(_, &v)| v == r)
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    Ok(Pushforward {
        source: mu,
        reached,
        preimages,
    })
}

impl<C: Capacity + ?Sized> Pushforward<'_, C> {
    pub fn reached(&self) -> &[f64] {
        &self.reached
    }

    /// `X⁻¹(B)` for a set of reached-value indices.
    pub fn preimage(&self, b: Subset) -> Subset {
        b.iter()
            .fold(Subset::EMPTY, |acc, k| acc.union(self.preimages[k]))
    }

    /// `μ_X` of the reached values satisfying `pred`.
    pub fn measure_where(&self, pred: impl Fn(f64) -> bool) -> f64 {
        let b = (0..self.reached.len())
            .filter(|&k| pred(self.reached[k]))
            .collect();
        self.measure(b)
    }
}

impl<C: Capacity + ?Sized> Capacity for Pushforward<'_, C> {
    fn ground_size(&self) -> usize {
        self.reached.len()
    }

    fn measure(&self, subset: Subset) -> f64 {
        self.source.measure(self.preimage(subset))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChangeOfVariables {
    /// `(C)∫ f dμ_X`
    pub lhs: f64,
    /// `(C)∫ f∘X dμ`
    pub rhs: f64,
    pub abs_diff: f64,
}

/// Evaluates both sides of `(C)∫ f dμ_X = (C)∫ f∘X dμ`.
pub fn change_of_variables_check<C: Capacity + ?Sized>(
    f: impl Fn(f64) -> f64,
    x: &DiscreteFunction,
    mu: &C,
) -> Result<ChangeOfVariables, ChoquetError> {
    let dist = pushforward(x, mu)?;
    let f_on_values = DiscreteFunction::new(dist.reached().iter().map(|&t| f(t)).collect())?;
    let lhs = choquet_integral(&f_on_values, &dist)?;
    let rhs = choquet_integral(&x.map(&f)?, mu)?;
    Ok(ChangeOfVariables {
        lhs,
        rhs,
        abs_diff: (lhs - rhs).abs(),
    })
}

/// Absolute tolerance for exact integral identities.
pub const IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub evaluated: usize,
    pub violations: usize,
    pub worst_gap: f64,
    pub witness: Option<String>,
}

impl CheckOutcome {
    fn new(name: &'static str) -> Self {
        CheckOutcome {
            name,
            evaluated: 0,
            violations: 0,
            worst_gap: 0.0,
            witness: None,
        }
    }

    /// Records `gap ≤ tol`; larger gaps count as violations.
    fn record(&mut self, gap: f64, tol: f64, witness: impl FnOnce() -> String) {
        self.evaluated += 1;
        self.worst_gap = self.worst_gap.max(gap);
        if gap > tol {
            self.violations += 1;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegralPropertyReport {
    pub trials: usize,
    pub submodular: bool,
    pub checks: Vec<CheckOutcome>,
    /// `(X, Y, ∫(X+Y) − ∫X − ∫Y)` for the first strictly non-additive pair.
    pub nonadditive_witness: Option<(Vec<f64>, Vec<f64>, f64)>,
}

impl IntegralPropertyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckOutcome::passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Randomized check of positive homogeneity, monotonicity, translation, the
/// dual identity and (for submodular `μ`) subadditivity of the integral.
pub fn property_suite<R: Rng + ?Sized>(
    mu: &DiscreteCapacity,
    trials: usize,
    rng: &mut R,
) -> Result<IntegralPropertyReport, ChoquetError> {
    let size = mu.ground_size();
    let submodular = check_properties(mu)?.submodular;
    let dual = mu.dual();
    let full = mu.full_measure();
    let integral = |v: &[f64]| choquet_integral(&DiscreteFunction::new(v.to_vec())?, mu);

    let mut homogeneity = CheckOutcome::new("homogeneity");
    let mut monotonicity = CheckOutcome::new("monotonicity");
    let mut translation = CheckOutcome::new("translation");
    let mut dual_identity = CheckOutcome::new("dual_identity");
    let mut subadditivity = CheckOutcome::new("subadditivity");
    let mut nonadditive_witness = None;

    for _ in 0..trials {
        let x = random::values(rng, size, 1.0);
        let y = random::values(rng, size, 1.0);
        let a: f64 = if rng.gen_bool(0.1) {
            0.0
        } else {
            rng.gen_range(0.0..5.0)
        };
        let c: f64 = rng.gen_range(-2.0..2.0);
        let ix = integral(&x)?;
        let iy = integral(&y)?;
        let scale = 1.0 + x.iter().chain(&y).fold(0.0f64, |m, v| m.max(v.abs()));
        let tol = IDENTITY_TOL * scale * (1.0 + a + c.abs());

        let ax: Vec<f64> = x.iter().map(|v| a * v).collect();
        let gap = (integral(&ax)? - a * ix).abs();
        homogeneity.record(gap, tol, || format!("a={a} X={x:?}"));

        let above: Vec<f64> = x.iter().zip(&y).map(|(v, w)| v + w.abs()).collect();
        let gap = ix - integral(&above)?;
        monotonicity.record(gap, tol, || format!("X={x:?} Z={above:?}"));

        let shifted: Vec<f64> = x.iter().map(|v| v + c).collect();
        let gap = (integral(&shifted)? - ix - c * full).abs();
        translation.record(gap, tol, || format!("c={c} X={x:?}"));

        let neg = DiscreteFunction::new(x.iter().map(|v| -v).collect())?;
        let via_dual = choquet_integral(&DiscreteFunction::new(x.clone())?, &dual)?;
        let gap = (choquet_integral(&neg, mu)? + via_dual).abs();
        dual_identity.record(gap, tol, || format!("X={x:?}"));

        let sum: Vec<f64> = x.iter().zip(&y).map(|(v, w)| v + w).collect();
        let excess = integral(&sum)? - ix - iy;
        if submodular {
            subadditivity.record(excess, tol, || format!("X={x:?} Y={y:?}"));
        }
        if nonadditive_witness.is_none() && excess.abs() > 1e-9 {
            nonadditive_witness = Some((x.clone(), y.clone(), excess));
        }
    }

    let mut checks = vec![homogeneity, monotonicity, translation, dual_identity];
    if submodular {
        checks.push(subadditivity);
    }
    Ok(IntegralPropertyReport {
        trials,
        submodular,
        checks,
        nonadditive_witness,
    })
}
