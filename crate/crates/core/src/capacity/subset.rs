use std::fmt;

/// Largest ground set a [`Subset`] can index.
pub const MAX_GROUND: usize = 128;

/// A subset of a finite ground set `{0, .., n}`, stored as a bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Subset(u128);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn from_bits(bits: u128) -> Self {
        Subset(bits)
    }

    pub fn bits(self) -> u128 {
        self.0
    }

    /// `{0, .., size-1}`.
    pub fn full(size: usize) -> Self {
        assert!(
            size <= MAX_GROUND,
            "ground set of {size} exceeds {MAX_GROUND}"
        );
        if size == MAX_GROUND {
            Subset(u128::MAX)
        } else {
            Subset((1u128 << size) - 1)
        }
    }

    pub fn singleton(i: usize) -> Self {
        assert!(i < MAX_GROUND);
        Subset(1u128 << i)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        indices
            .into_iter()
            .fold(Subset::EMPTY, |acc, i| acc.with(i))
    }

    pub fn with(self, i: usize) -> Self {
        Subset(self.0 | Subset::singleton(i).0)
    }

    pub fn without(self, i: usize) -> Self {
        Subset(self.0 & !Subset::singleton(i).0)
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_GROUND && self.0 >> i & 1 == 1
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: Subset) -> Subset {
        Subset(self.0 | other.0)
    }

    pub fn intersection(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn difference(self, other: Subset) -> Subset {
        Subset(self.0 & !other.0)
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    /// Highest index + 1, or 0 for the empty set.
    pub fn span(self) -> usize {
        (128 - self.0.leading_zeros()) as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                return None;
            }
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(i)
        })
    }

    /// Every subset of `{0, .., size-1}` in bit-mask order. Only sensible for small sizes.
    pub fn all(size: usize) -> impl Iterator<Item = Subset> {
        assert!(size < 64, "exhaustive enumeration over {size} elements");
        (0..1u128 << size).map(Subset)
    }
}

impl fmt::Debug for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, i) in self.iter().enumerate() {
            if k > 0 {
                write!(f, " ")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, "}}")
    }
}

impl FromIterator<usize> for Subset {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Subset::from_indices(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_algebra() {
        let a = Subset::from_indices([0, 2, 5]);
        let b = Subset::from_indices([2, 3]);
        assert_eq!(a.union(b), Subset::from_indices([0, 2, 3, 5]));
        assert_eq!(a.intersection(b), Subset::singleton(2));
        assert_eq!(a.difference(b), Subset::from_indices([0, 5]));
        assert_eq!(a.len(), 3);
        assert_eq!(a.span(), 6);
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![0, 2, 5]);
        assert!(Subset::singleton(5).is_subset_of(a));
        assert_eq!(format!("{a}"), "{0 2 5}");
    }

    #[test]
    fn full_sets() {
        assert_eq!(Subset::full(0), Subset::EMPTY);
        assert_eq!(Subset::full(3).len(), 3);
        assert_eq!(Subset::full(MAX_GROUND).len(), MAX_GROUND);
        assert!(Subset::full(MAX_GROUND).contains(127));
        assert_eq!(Subset::all(3).count(), 8);
    }
}
