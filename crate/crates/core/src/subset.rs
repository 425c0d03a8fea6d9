//! Bitmask subsets of the task set `{0, .., m-1}` for `m <= 63`.

use std::fmt;

pub const MAX_TASKS: usize = 63;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct TaskSet(pub u64);

impl TaskSet {
    pub const EMPTY: TaskSet = TaskSet(0);

    pub fn full(m: usize) -> TaskSet {
        debug_assert!(m <= MAX_TASKS);
        TaskSet((1u64 << m) - 1)
    }

    pub fn singleton(i: usize) -> TaskSet {
        TaskSet(1 << i)
    }

    pub fn from_flags(flags: &[bool]) -> TaskSet {
        TaskSet(
            flags
                .iter()
                .enumerate()
                .filter(|(_, &f)| f)
                .fold(0, |acc, (i, _)| acc | (1 << i)),
        )
    }

    pub fn from_indices(indices: impl IntoIterator<Item = usize>) -> TaskSet {
        TaskSet(indices.into_iter().fold(0, |acc, i| acc | (1 << i)))
    }

    #[inline]
    pub fn contains(self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn insert(self, i: usize) -> TaskSet {
        TaskSet(self.0 | 1 << i)
    }

    #[inline]
    pub fn remove(self, i: usize) -> TaskSet {
        TaskSet(self.0 & !(1 << i))
    }

    #[inline]
    pub fn union(self, other: TaskSet) -> TaskSet {
        TaskSet(self.0 | other.0)
    }

    #[inline]
    pub fn is_subset_of(self, other: TaskSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// Complement within `{0, .., m-1}`.
    #[inline]
    pub fn complement(self, m: usize) -> TaskSet {
        TaskSet(!self.0 & TaskSet::full(m).0)
    }

    /// Members in ascending order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(i)
            }
        })
    }

    pub fn to_flags(self, m: usize) -> Vec<bool> {
        (0..m).map(|i| self.contains(i)).collect()
    }

    /// Every subset of `{0, .., m-1}` in increasing bitmask order.
    pub fn all(m: usize) -> impl Iterator<Item = TaskSet> {
        (0..1u64 << m).map(TaskSet)
    }

    /// Every subset of `self` (including the empty set and `self`).
    pub fn subsets(self) -> impl Iterator<Item = TaskSet> {
        let full = self.0;
        let mut next = Some(0u64);
        std::iter::from_fn(move || {
            let cur = next?;
            next = if cur == full { None } else { Some((cur.wrapping_sub(full)) & full) };
            Some(TaskSet(cur))
        })
    }
}

impl fmt::Debug for TaskSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
