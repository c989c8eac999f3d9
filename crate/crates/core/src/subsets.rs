//! Bitmask subset enumeration.

/// Iterates all `size`-element subsets of `{0, .., n-1}` as bitmasks in increasing order.
pub fn of_size(n: usize, size: usize) -> impl Iterator<Item = u64> {
    debug_assert!(n < 64);
    let limit = 1u64 << n;
    let mut next = if size > n {
        None
    } else if size == 0 {
        Some(0u64)
    } else {
        Some((1u64 << size) - 1)
    };
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            // Gosper's hack
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let n = (((r ^ cur) >> 2) / c) | r;
            (n < limit).then_some(n)
        };
        Some(cur)
    })
}

/// Indices of the set bits, ascending.
pub fn members(mask: u64) -> impl Iterator<Item = usize> {
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

pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, j| acc * (n - j) as u128 / (j + 1) as u128)
}
