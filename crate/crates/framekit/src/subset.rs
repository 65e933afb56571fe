//! Bit-indexed subsets over ground sets of at most 64 elements.

/// A subset of a ground set, one bit per element index.
pub type Mask = u64;

/// Hard cap on ground-set size imposed by the `u64` representation.
pub const MAX_GROUND: usize = 64;

/// Full set on `n` elements.
#[inline]
pub fn full(n: usize) -> Mask {
    debug_assert!(n <= MAX_GROUND);
    if n == 64 {
        !0
    } else {
        (1u64 << n) - 1
    }
}

#[inline]
pub fn bit(i: usize) -> Mask {
    1u64 << i
}

#[inline]
pub fn contains(mask: Mask, i: usize) -> bool {
    mask & bit(i) != 0
}

#[inline]
pub fn is_subset(a: Mask, b: Mask) -> bool {
    a & !b == 0
}

/// Indices of the set bits, ascending.
pub fn members(mask: Mask) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            None
        } else {
            let i = m.trailing_zeros() as usize;
            m &= m - 1;
            Some(i)
        }
    })
}

pub fn from_indices<I: IntoIterator<Item = usize>>(iter: I) -> Mask {
    iter.into_iter().fold(0, |m, i| m | bit(i))
}

/// All submasks of `mask`, descending from `mask` to 0 (inclusive).
pub fn submasks(mask: Mask) -> impl Iterator<Item = Mask> {
    let mut cur = mask;
    let mut done = false;
    std::iter::from_fn(move || {
        if done {
            return None;
        }
        let out = cur;
        if cur == 0 {
            done = true;
        } else {
            cur = (cur - 1) & mask;
        }
        Some(out)
    })
}
