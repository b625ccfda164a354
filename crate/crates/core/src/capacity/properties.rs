use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Capacity, CapacityError, Subset, CAPACITY_TOL};

/// Largest ground set checked over all subset pairs.
pub const EXHAUSTIVE_LIMIT: usize = 6;
/// Largest ground set stored as an explicit table.
pub const TABLE_LIMIT: usize = 20;

const DEFAULT_SAMPLES: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Property {
    Monotone,
    Subadditive,
    Submodular,
    Normalized,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::Monotone => "monotone",
            Property::Subadditive => "subadditive",
            Property::Submodular => "submodular",
            Property::Normalized => "normalized",
        })
    }
}

/// A failed inequality `lhs ≤ rhs` together with the sets that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub property: Property,
    pub a: Subset,
    pub b: Subset,
    pub lhs: f64,
    pub rhs: f64,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} fails at A={} B={}: {} > {}",
            self.property, self.a, self.b, self.lhs, self.rhs
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub monotone: bool,
    pub subadditive: bool,
    pub submodular: bool,
    pub normalized: bool,
    /// True when the pair checks were sampled rather than exhaustive.
    pub sampled: bool,
    /// First witness found for each failing property.
    pub violations: Vec<Violation>,
}

impl PropertyReport {
    pub fn witness(&self, property: Property) -> Option<&Violation> {
        self.violations.iter().find(|v| v.property == property)
    }
}

struct Recorder {
    tol: f64,
    violations: Vec<Violation>,
}

impl Recorder {
    fn check(&mut self, property: Property, a: Subset, b: Subset, lhs: f64, rhs: f64) {
        if lhs > rhs + self.tol && !self.violations.iter().any(|v| v.property == property) {
            self.violations.push(Violation {
                property,
                a,
                b,
                lhs,
                rhs,
            });
        }
    }

    fn into_report<C: Capacity + ?Sized>(self, mu: &C, sampled: bool) -> PropertyReport {
        let failed = |p| self.violations.iter().any(|v| v.property == p);
        let mut violations = self.violations.clone();
        let full = Subset::full(mu.ground_size());
        let full_value = mu.measure(full);
        let normalized = (full_value - 1.0).abs() <= CAPACITY_TOL;
        if !normalized {
            violations.push(Violation {
                property: Property::Normalized,
                a: full,
                b: full,
                lhs: full_value,
                rhs: 1.0,
            });
        }
        PropertyReport {
            monotone: !failed(Property::Monotone),
            subadditive: !failed(Property::Subadditive),
            submodular: !failed(Property::Submodular),
            normalized,
            sampled,
            violations,
        }
    }
}

fn tolerance<C: Capacity + ?Sized>(mu: &C) -> f64 {
    CAPACITY_TOL * (1.0 + mu.full_measure().abs())
}

/// Decides monotonicity, subadditivity, submodularity and normalization.
///
/// Ground sets up to [`EXHAUSTIVE_LIMIT`] are enumerated over all subset
/// pairs; up to [`TABLE_LIMIT`] a fixed-seed sample is used and the report
/// is flagged `sampled`. Larger sets need [`check_properties_sampled`].
pub fn check_properties<C: Capacity + ?Sized>(mu: &C) -> Result<PropertyReport, CapacityError> {
    let size = mu.ground_size();
    if size <= EXHAUSTIVE_LIMIT {
        Ok(exhaustive(mu))
    } else if size <= TABLE_LIMIT {
        Ok(check_properties_sampled(mu, DEFAULT_SAMPLES, 0))
    } else {
        Err(CapacityError::Capability {
            size,
            limit: TABLE_LIMIT,
            what: "property enumeration",
        })
    }
}

fn exhaustive<C: Capacity + ?Sized>(mu: &C) -> PropertyReport {
    let size = mu.ground_size();
    let values: Vec<f64> = Subset::all(size).map(|s| mu.measure(s)).collect();
    let at = |s: Subset| values[s.bits() as usize];
    let mut rec = Recorder {
        tol: tolerance(mu),
        violations: Vec::new(),
    };
    rec.check(
        Property::Monotone,
        Subset::EMPTY,
        Subset::EMPTY,
        at(Subset::EMPTY).abs(),
        0.0,
    );
    for a in Subset::all(size) {
        for i in (0..size).filter(|&i| !a.contains(i)) {
            let b = a.with(i);
            rec.check(Property::Monotone, a, b, at(a), at(b));
        }
        for b in Subset::all(size) {
            let (u, n) = (at(a.union(b)), at(a.intersection(b)));
            rec.check(Property::Subadditive, a, b, u, at(a) + at(b));
            rec.check(Property::Submodular, a, b, u + n, at(a) + at(b));
        }
    }
    rec.into_report(mu, false)
}

fn random_subset(rng: &mut ChaCha8Rng, size: usize) -> Subset {
    // mix dense and sparse draws so that small sets are exercised too
    let p: f64 = rng.gen_range(0.05..0.95);
    (0..size).filter(|_| rng.gen_bool(p)).collect()
}

/// Sampled version of [`check_properties`] for any ground size.
pub fn check_properties_sampled<C: Capacity + ?Sized>(
    mu: &C,
    samples: usize,
    seed: u64,
) -> PropertyReport {
    let size = mu.ground_size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rec = Recorder {
        tol: tolerance(mu),
        violations: Vec::new(),
    };
    rec.check(
        Property::Monotone,
        Subset::EMPTY,
        Subset::EMPTY,
        mu.measure(Subset::EMPTY).abs(),
        0.0,
    );
    // single-element removals from the full set catch the usual failure mode
    let full = Subset::full(size);
    for i in 0..size {
        let a = full.without(i);
        rec.check(Property::Monotone, a, full, mu.measure(a), mu.measure(full));
    }
    for _ in 0..samples {
        let a = random_subset(&mut rng, size);
        let b = random_subset(&mut rng, size);
        let i = rng.gen_range(0..size);
        let grown = a.with(i);
        rec.check(
            Property::Monotone,
            a,
            grown,
            mu.measure(a),
            mu.measure(grown),
        );
        let (ma, mb) = (mu.measure(a), mu.measure(b));
        let (u, n) = (mu.measure(a.union(b)), mu.measure(a.intersection(b)));
        rec.check(Property::Subadditive, a, b, u, ma + mb);
        rec.check(Property::Submodular, a, b, u + n, ma + mb);
    }
    rec.into_report(mu, true)
}
