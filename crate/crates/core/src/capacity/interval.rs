use std::fmt;

use super::CapacityError;

/// Closed interval `[lo, hi]` with `lo ≤ hi`. Degenerate intervals are allowed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self, CapacityError> {
        if lo.is_nan() || hi.is_nan() {
            return Err(CapacityError::Validation("NaN interval endpoint".into()));
        }
        if lo > hi {
            return Err(CapacityError::Validation(format!(
                "interval endpoints reversed: [{lo}, {hi}]"
            )));
        }
        Ok(Interval { lo, hi })
    }

    pub fn point(t: f64) -> Self {
        Interval { lo: t, hi: t }
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, t: f64) -> bool {
        self.lo <= t && t <= self.hi
    }

    /// Point of the interval closest to `t`.
    pub fn clamp(&self, t: f64) -> f64 {
        t.clamp(self.lo, self.hi)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `{t ≥ c}`
    AtLeast,
    /// `{t ≤ c}`
    AtMost,
}

/// A finite union of closed intervals kept in canonical form: sorted,
/// pairwise disjoint and non-touching.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IntervalUnion {
    parts: Vec<Interval>,
}

impl IntervalUnion {
    pub fn empty() -> Self {
        IntervalUnion { parts: Vec::new() }
    }

    pub fn single(lo: f64, hi: f64) -> Result<Self, CapacityError> {
        Ok(IntervalUnion {
            parts: vec![Interval::new(lo, hi)?],
        })
    }

    /// Canonicalizes arbitrary `(lo, hi)` pairs, merging overlaps and touches.
    pub fn new<I: IntoIterator<Item = (f64, f64)>>(pairs: I) -> Result<Self, CapacityError> {
        let parts = pairs
            .into_iter()
            .map(|(lo, hi)| Interval::new(lo, hi))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IntervalUnion::from_intervals(parts))
    }

    pub fn from_intervals(mut parts: Vec<Interval>) -> Self {
        parts.sort_by(|a, b| a.lo.total_cmp(&b.lo).then(a.hi.total_cmp(&b.hi)));
        let mut merged: Vec<Interval> = Vec::with_capacity(parts.len());
        for iv in parts {
            match merged.last_mut() {
                Some(last) if iv.lo <= last.hi => last.hi = last.hi.max(iv.hi),
                _ => merged.push(iv),
            }
        }
        IntervalUnion { parts: merged }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.parts
    }

    pub fn component_count(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// Lebesgue measure.
    pub fn total_length(&self) -> f64 {
        self.parts.iter().map(Interval::length).sum()
    }

    pub fn contains(&self, t: f64) -> bool {
        self.parts.iter().any(|iv| iv.contains(t))
    }

    pub fn union(&self, other: &IntervalUnion) -> IntervalUnion {
        let mut parts = self.parts.clone();
        parts.extend_from_slice(&other.parts);
        IntervalUnion::from_intervals(parts)
    }

    pub fn intersect(&self, other: &IntervalUnion) -> IntervalUnion {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.parts.len() && j < other.parts.len() {
            let (a, b) = (self.parts[i], other.parts[j]);
            let lo = a.lo.max(b.lo);
            let hi = a.hi.min(b.hi);
            if lo <= hi {
                out.push(Interval { lo, hi });
            }
            if a.hi < b.hi {
                i += 1;
            } else {
                j += 1;
            }
        }
        IntervalUnion::from_intervals(out)
    }

    pub fn intersect_with_halfline(&self, at: f64, side: Side) -> IntervalUnion {
        let parts = self
            .parts
            .iter()
            .filter_map(|iv| {
                let (lo, hi) = match side {
                    Side::AtLeast => (iv.lo.max(at), iv.hi),
                    Side::AtMost => (iv.lo, iv.hi.min(at)),
                };
                (lo <= hi).then_some(Interval { lo, hi })
            })
            .collect();
        IntervalUnion { parts }
    }

    pub fn is_subset_of(&self, other: &IntervalUnion) -> bool {
        self.parts.iter().all(|iv| {
            other
                .parts
                .iter()
                .any(|ov| ov.lo <= iv.lo && iv.hi <= ov.hi)
        })
    }

    /// Point of the union closest to `t`, if any.
    pub fn nearest_point(&self, t: f64) -> Option<f64> {
        self.parts
            .iter()
            .map(|iv| iv.clamp(t))
            .min_by(|a, b| (a - t).abs().total_cmp(&(b - t).abs()))
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("∅");
        }
        for (k, iv) in self.parts.iter().enumerate() {
            if k > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "[{}, {}]", iv.lo, iv.hi)?;
        }
        Ok(())
    }
}
