use crate::capacity::{DiscreteCapacity, Subset};
use crate::discrete::{choquet_integral, sorted_tail_sum, DiscreteFunction};
use crate::function::{FunctionSpec, Monotonicity};

use super::{Domain, OperatorError, PerturbationProfile};

fn check(n: usize, x: f64) -> Result<(), OperatorError> {
    if n == 0 {
        return Err(OperatorError::Domain("degree n must be at least 1".into()));
    }
    Domain::UnitInterval.check(x)
}

/// `p_{n,i}(x) = C(n,i) xⁱ (1−x)^{n−i}`; zero for `i > n`.
pub fn bernstein_basis(n: usize, i: usize, x: f64) -> f64 {
    if i > n {
        return 0.0;
    }
    let k = i.min(n - i);
    let mut binom = 1.0;
    for j in 0..k {
        binom = binom * (n - j) as f64 / (j + 1) as f64;
    }
    binom * x.powi(i as i32) * (1.0 - x).powi((n - i) as i32)
}

fn basis(n: usize, x: f64) -> Vec<f64> {
    (0..=n).map(|i| bernstein_basis(n, i, x)).collect()
}

fn nodes(f: &FunctionSpec, n: usize) -> Vec<f64> {
    (0..=n).map(|i| f.eval(i as f64 / n as f64)).collect()
}

/// `Σ v_i p_{n,i}(x)` for node values `v_0..v_n`.
pub fn bernstein_classical_values(values: &[f64], x: f64) -> Result<f64, OperatorError> {
    let n = values.len().saturating_sub(1);
    check(n, x)?;
    Ok(values.iter().zip(basis(n, x)).map(|(v, p)| v * p).sum())
}

/// `B_n(f)(x) = Σ f(i/n) p_{n,i}(x)`.
pub fn bernstein_classical(f: &FunctionSpec, n: usize, x: f64) -> Result<f64, OperatorError> {
    check(n, x)?;
    bernstein_classical_values(&nodes(f, n), x)
}

/// `φ_{n,i0}(x) − p_{n,i0}(x) = θ·min_{i≠i0} p_{n,i}(x)`.
pub fn perturbation(n: usize, x: f64, profile: &PerturbationProfile) -> Result<f64, OperatorError> {
    if n < 2 {
        return Err(OperatorError::Domain(format!(
            "the perturbed capacity needs n ≥ 2, got {n}"
        )));
    }
    check(n, x)?;
    profile.validate(n)?;
    let least = (0..=n)
        .filter(|&i| i != profile.i0)
        .map(|i| bernstein_basis(n, i, x))
        .fold(f64::INFINITY, f64::min);
    Ok(profile.theta * least)
}

/// `μ_{n,x}` on `{0, .., n}`: additive with weights `p_{n,i}(x)` except that
/// `i0` weighs `φ_{n,i0}(x)`, and pinned to 1 on the whole set.
pub fn bernstein_choquet_capacity(
    n: usize,
    x: f64,
    profile: &PerturbationProfile,
) -> Result<DiscreteCapacity, OperatorError> {
    let delta = perturbation(n, x, profile)?;
    let mut weights = basis(n, x);
    weights[profile.i0] += delta;
    Ok(DiscreteCapacity::pinned_modular(weights, 1.0)?)
}

/// `L_n` applied to node values `v_0..v_n`.
pub fn bernstein_choquet_values(
    values: &[f64],
    x: f64,
    profile: &PerturbationProfile,
) -> Result<f64, OperatorError> {
    let n = values.len().saturating_sub(1);
    let mu = bernstein_choquet_capacity(n, x, profile)?;
    Ok(choquet_integral(
        &DiscreteFunction::new(values.to_vec())?,
        &mu,
    )?)
}

/// `L_n(f)(x) = (C)∫ f(i/n) dμ_{n,x}(i)`.
pub fn bernstein_choquet(
    f: &FunctionSpec,
    n: usize,
    x: f64,
    profile: &PerturbationProfile,
) -> Result<f64, OperatorError> {
    check(n, x)?;
    bernstein_choquet_values(&nodes(f, n), x, profile)
}

/// `(B_n(f)(x), L_n(f)(x) − B_n(f)(x))`, the second part taken by the sorted
/// tail-sum against `μ_{n,x} − P` with `P` the binomial law. Where the
/// perturbation is far below the rounding of `L_n(f)(x)` itself, the split
/// keeps it resolved.
pub fn bernstein_choquet_split(
    f: &FunctionSpec,
    n: usize,
    x: f64,
    profile: &PerturbationProfile,
) -> Result<(f64, f64), OperatorError> {
    let delta = perturbation(n, x, profile)?;
    let b = bernstein_classical(f, n, x)?;
    let full = Subset::full(n + 1);
    let i0 = profile.i0;
    let excess = sorted_tail_sum(&nodes(f, n), |a| {
        if a != full && a.contains(i0) {
            delta
        } else {
            0.0
        }
    });
    Ok((b, excess))
}

/// Closed form of `L_n(f)(x)` for monotone `f`:
/// `B_n(f)(x) + δ·[f(i0/n) − f(0)]` when `f` is nondecreasing and
/// `B_n(f)(x) + δ·[f(i0/n) − f(1)]` when it is nonincreasing, with
/// `δ = φ_{n,i0}(x) − p_{n,i0}(x)`.
pub fn bernstein_choquet_closedform(
    f: &FunctionSpec,
    n: usize,
    x: f64,
    profile: &PerturbationProfile,
) -> Result<f64, OperatorError> {
    let delta = perturbation(n, x, profile)?;
    let b = bernstein_classical(f, n, x)?;
    let at_i0 = f.eval(profile.i0 as f64 / n as f64);
    match f.monotonicity_on(0.0, 1.0) {
        Monotonicity::Nondecreasing => Ok(b + delta * (at_i0 - f.eval(0.0))),
        Monotonicity::Nonincreasing => Ok(b + delta * (at_i0 - f.eval(1.0))),
        Monotonicity::Neither => Err(OperatorError::Domain(format!(
            "the closed form needs a monotone function on [0, 1]; `{}` is not",
            f.name()
        ))),
    }
}

/// A family `(Ω_n, μ_{n,x}, Z(n,x))` whose Choquet integrals
/// `L_n(f)(x) = (C)∫ f∘Z(n,x) dμ_{n,x}` define an operator.
pub trait FellerScheme {
    fn name(&self) -> &'static str;

    fn capacity(&self, n: usize, x: f64) -> Result<DiscreteCapacity, OperatorError>;

    fn variable(&self, n: usize, x: f64) -> Result<DiscreteFunction, OperatorError>;
}

/// `Ω_n = {0, .., n}`, `Z(n,x)(i) = i/n`, perturbed Bernstein capacity.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BernsteinChoquetScheme {
    pub profile: PerturbationProfile,
}

impl FellerScheme for BernsteinChoquetScheme {
    fn name(&self) -> &'static str {
        "bernstein_choquet"
    }

    fn capacity(&self, n: usize, x: f64) -> Result<DiscreteCapacity, OperatorError> {
        bernstein_choquet_capacity(n, x, &self.profile)
    }

    fn variable(&self, n: usize, _x: f64) -> Result<DiscreteFunction, OperatorError> {
        Ok(DiscreteFunction::new(
            (0..=n).map(|i| i as f64 / n as f64).collect(),
        )?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::{check_properties, check_properties_sampled, Capacity, Subset};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn grid(m: usize) -> impl Iterator<Item = f64> {
        (0..m).map(move |k| k as f64 / (m - 1) as f64)
    }

    #[test]
    fn basis_values() {
        assert_eq!(bernstein_basis(7, 0, 0.0), 1.0);
        assert_eq!(bernstein_basis(2, 1, 0.5), 0.5);
        let total: f64 = (0..=5).map(|i| bernstein_basis(5, i, 0.3)).sum();
        assert!((total - 1.0).abs() < 1e-15);
        for n in [1, 10, 64] {
            for x in grid(41) {
                let s: f64 = (0..=n).map(|i| bernstein_basis(n, i, x)).sum();
                assert!((s - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn classical_moments() {
        for n in [1, 3, 12] {
            for x in grid(11) {
                let e1 = bernstein_classical(&FunctionSpec::E1, n, x).unwrap();
                assert!((e1 - x).abs() < 1e-14);
                let c = bernstein_classical(&FunctionSpec::Constant { value: -2.0 }, n, x).unwrap();
                assert!((c + 2.0).abs() < 1e-14);
                let sq: Vec<f64> = (0..=n).map(|i| (x - i as f64 / n as f64).powi(2)).collect();
                let oracle: f64 = (0..=n)
                    .map(|i| {
                        let mut binom = 1.0;
                        for j in 0..i {
                            binom *= (n - j) as f64 / (j + 1) as f64;
                        }
                        sq[i] * binom * x.powi(i as i32) * (1.0 - x).powi((n - i) as i32)
                    })
                    .sum();
                let v = bernstein_classical_values(&sq, x).unwrap();
                assert!((v - oracle).abs() < 1e-15);
                assert!((v - x * (1.0 - x) / n as f64).abs() < 1e-14);
            }
        }
        assert!(bernstein_classical(&FunctionSpec::E1, 3, 1.2).is_err());
    }

    #[test]
    fn capacity_examples() {
        let p = PerturbationProfile::default();
        let mu = bernstein_choquet_capacity(3, 0.5, &p).unwrap();
        assert!((mu.measure(Subset::singleton(1)) - 0.5).abs() < 1e-15);
        assert_eq!(mu.measure(Subset::full(4)), 1.0);
        let flat = bernstein_choquet_capacity(3, 0.5, &PerturbationProfile::classical()).unwrap();
        for a in Subset::all(4) {
            let expected: f64 = a.iter().map(|i| bernstein_basis(3, i, 0.5)).sum();
            assert!((flat.measure(a) - expected).abs() < 1e-15);
        }
        assert!(matches!(
            bernstein_choquet_capacity(1, 0.5, &p),
            Err(OperatorError::Domain(_))
        ));
    }

    #[test]
    fn capacity_properties() {
        for n in 2..=5 {
            for x in [0.1, 0.5, 0.77] {
                for i0 in 0..=n {
                    let mu = bernstein_choquet_capacity(n, x, &PerturbationProfile::new(i0, 1.0))
                        .unwrap();
                    let r = check_properties(&mu).unwrap();
                    assert!(r.monotone && r.subadditive && r.submodular && r.normalized);
                    let additive = Subset::all(n + 1).all(|a| {
                        let s: f64 = a.iter().map(|i| mu.measure(Subset::singleton(i))).sum();
                        (mu.measure(a) - s).abs() < 1e-12
                    });
                    assert!(!additive, "n={n} x={x} i0={i0}");
                }
            }
        }
        let mu = bernstein_choquet_capacity(40, 0.3, &PerturbationProfile::default()).unwrap();
        let r = check_properties_sampled(&mu, 5000, 7);
        assert!(r.monotone && r.subadditive && r.normalized);
    }

    #[test]
    fn first_moment_display() {
        for n in [2, 5, 30] {
            for x in grid(21) {
                for theta in [0.0, 0.4, 1.0] {
                    let p = PerturbationProfile::new(1, theta);
                    let l = bernstein_choquet(&FunctionSpec::E1, n, x, &p).unwrap();
                    let delta = perturbation(n, x, &p).unwrap();
                    assert!((l - (x + delta / n as f64)).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn theta_zero_is_classical() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let k = rng.gen_range(2..6);
            let mut t = 0.0;
            let knots: Vec<(f64, f64)> = (0..k)
                .map(|_| {
                    t += rng.gen_range(0.05..0.5);
                    (t - 0.3, rng.gen_range(-1.0..2.0))
                })
                .collect();
            let f = FunctionSpec::PwLinear { knots };
            let n = rng.gen_range(2..40);
            let x = rng.gen::<f64>();
            let l = bernstein_choquet(&f, n, x, &PerturbationProfile::classical()).unwrap();
            let b = bernstein_classical(&f, n, x).unwrap();
            assert!((l - b).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_cross_check() {
        let specs = [
            FunctionSpec::E1,
            FunctionSpec::from_name("exp_neg").unwrap(),
            FunctionSpec::Constant { value: 0.7 },
            FunctionSpec::ConcaveQuad,
            FunctionSpec::Sqrt { shift: 0.0 },
        ];
        for f in &specs {
            for n in [2, 3, 9, 33] {
                for i0 in [0, 1, n / 2, n] {
                    let p = PerturbationProfile::new(i0, 0.8);
                    for x in grid(31) {
                        let a = bernstein_choquet(f, n, x, &p).unwrap();
                        let b = bernstein_choquet_closedform(f, n, x, &p).unwrap();
                        assert!((a - b).abs() < 1e-12, "{f:?} n={n} i0={i0} x={x}");
                    }
                }
            }
        }
        let c = bernstein_choquet_closedform(
            &FunctionSpec::Constant { value: 0.7 },
            4,
            0.2,
            &PerturbationProfile::default(),
        )
        .unwrap();
        assert!((c - 0.7).abs() < 1e-15);
        assert!(bernstein_choquet_closedform(
            &FunctionSpec::AbsDev { center: 0.5 },
            4,
            0.2,
            &PerturbationProfile::default()
        )
        .is_err());
    }

    #[test]
    fn split_recombines_to_the_sorted_path() {
        let p = PerturbationProfile::new(2, 0.7);
        for f in [
            FunctionSpec::ConcaveQuad,
            FunctionSpec::AbsDev { center: 0.4 },
        ] {
            for n in [2, 6, 25] {
                for x in grid(17) {
                    let (b, e) = bernstein_choquet_split(&f, n, x, &p).unwrap();
                    let l = bernstein_choquet(&f, n, x, &p).unwrap();
                    assert!((b + e - l).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn scheme_exposes_capacity_and_nodes() {
        let s = BernsteinChoquetScheme::default();
        let z = s.variable(4, 0.3).unwrap();
        assert_eq!(z.values(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(s.capacity(4, 0.3).unwrap().ground_size(), 5);
    }
}
