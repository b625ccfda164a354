//! Seeded generators for randomized property checks.
//!
//! [`monotone`] follows a fixed recipe so that runs are reproducible: draw one
//! uniform value per subset, lift each value to the maximum over its subsets,
//! pin `μ(∅) = 0`, then divide by `μ(Ω)`.

use rand::Rng;

use super::{DiscreteCapacity, Distortion, Subset, TABLE_LIMIT};

/// Random normalized monotone capacity on `size` points.
pub fn monotone<R: Rng + ?Sized>(rng: &mut R, size: usize) -> DiscreteCapacity {
    assert!((1..=TABLE_LIMIT).contains(&size));
    let raw: Vec<f64> = (0..1usize << size).map(|_| rng.gen::<f64>()).collect();
    let mut lifted = raw.clone();
    lifted[0] = 0.0;
    // bit masks increase along every chain, so predecessors are final
    for bits in 1..lifted.len() {
        let s = Subset::from_bits(bits as u128);
        let below = s
            .iter()
            .map(|i| lifted[s.without(i).bits() as usize])
            .fold(0.0, f64::max);
        lifted[bits] = raw[bits].max(below);
    }
    let full = *lifted.last().unwrap();
    let table = lifted.into_iter().map(|v| v / full).collect();
    DiscreteCapacity::from_table(size, table).expect("lifted table is a valid capacity")
}

/// Random probability vector.
pub fn probability<R: Rng + ?Sized>(rng: &mut R, size: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..size).map(|_| rng.gen::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    let mut w: Vec<f64> = raw.into_iter().map(|v| v / total).collect();
    // push rounding residue into the last weight so the sum is 1 to the ulp
    let head: f64 = w[..size - 1].iter().sum();
    w[size - 1] = 1.0 - head;
    w
}

pub fn additive<R: Rng + ?Sized>(rng: &mut R, size: usize) -> DiscreteCapacity {
    DiscreteCapacity::additive(probability(rng, size)).expect("probability weights")
}

/// Random concave power distortion of a random probability: submodular.
pub fn submodular<R: Rng + ?Sized>(rng: &mut R, size: usize) -> DiscreteCapacity {
    let p = rng.gen_range(0.2..=1.0);
    DiscreteCapacity::distorted_probability(Distortion::Power(p), probability(rng, size))
        .expect("valid distortion")
}

/// Random normalized possibility measure.
pub fn possibility<R: Rng + ?Sized>(rng: &mut R, size: usize) -> DiscreteCapacity {
    let mut w: Vec<f64> = (0..size).map(|_| rng.gen::<f64>()).collect();
    let peak = rng.gen_range(0..size);
    w[peak] = 1.0;
    DiscreteCapacity::possibility(w).expect("weights in [0, 1]")
}

/// Random signed vector with entries in `[-scale, scale]`; a quarter of the
/// draws repeat an earlier entry so ties are exercised.
pub fn values<R: Rng + ?Sized>(rng: &mut R, size: usize, scale: f64) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(size);
    for _ in 0..size {
        if !out.is_empty() && rng.gen_bool(0.25) {
            let j = rng.gen_range(0..out.len());
            out.push(out[j]);
        } else {
            out.push(rng.gen_range(-scale..=scale));
        }
    }
    out
}
