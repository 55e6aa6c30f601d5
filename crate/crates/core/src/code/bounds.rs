//! Closed-form bounds on `A(s, k)`, the shortest binary `k`-server PIR code
//! of dimension `s`.

use num_rational::Ratio;

/// `(2^s - 1) k / 2^(s-1)` as an exact fraction. `None` when `2^s`
/// overflows.
pub fn theorem8_ratio(s: usize, k: usize) -> Option<Ratio<u128>> {
    if s == 0 || s > 100 {
        return None;
    }
    let half = 1u128 << (s - 1);
    Some(Ratio::new((2 * half - 1) * k as u128, half))
}

/// Integer ceiling of [`theorem8_ratio`], `2k - floor(k / 2^(s-1))`.
pub fn theorem8_ceil(s: usize, k: usize) -> usize {
    if s == 0 {
        return 0;
    }
    let shift = (s - 1).min(63) as u32;
    2 * k - (k as u64 >> shift) as usize
}

fn base_lower(s: usize, k: usize) -> usize {
    theorem8_ceil(s, k).max(s + k - 1)
}

/// Best implemented lower bound: the ceiling above, the Singleton-type
/// bound `s + k - 1`, and the odd/even step `A(s, 2j-1) = A(s, 2j) - 1`
/// applied in both directions.
pub fn lower_bound(s: usize, k: usize) -> usize {
    if s == 0 || k == 0 {
        return 0;
    }
    let own = base_lower(s, k);
    if k % 2 == 1 {
        own.max(base_lower(s, k + 1) - 1)
    } else {
        own.max(base_lower(s, k - 1) + 1)
    }
}

/// Smallest `sigma >= 1` with `sigma^(k-1) >= s`.
pub fn cubic_side(s: usize, k: usize) -> usize {
    let e = (k.max(2) - 1) as u32;
    let mut sigma = (s as f64).powf(1.0 / e as f64).floor().max(1.0) as usize;
    while sigma.checked_pow(e).is_some_and(|p| p < s) {
        sigma += 1;
    }
    while sigma > 1 && (sigma - 1).checked_pow(e).is_some_and(|p| p >= s) {
        sigma -= 1;
    }
    sigma
}

/// `s + (k-1) ceil(s^(1/(k-1)))^(k-2)`.
pub fn cubic_bound(s: usize, k: usize) -> usize {
    let sigma = cubic_side(s, k);
    s + (k - 1) * sigma.pow((k.max(2) - 2) as u32)
}

/// Column orientation: `s` points of a pairwise design whose points each lie
/// on `k - 1` blocks. Returns the code length `s + #blocks` when the design
/// parameters are integral.
pub fn steiner_bound(s: usize, k: usize) -> Option<usize> {
    if k < 2 || s < 2 || (s - 1) % (k - 1) != 0 {
        return None;
    }
    let l = (s - 1) / (k - 1) + 1;
    let pairs = s * (s - 1);
    (l >= 2 && pairs % (l * (l - 1)) == 0).then(|| s + pairs / (l * (l - 1)))
}

/// Row orientation: blocks of size `k - 1` on `r` points become message bits.
/// Returns `(m, s)` when the block count is integral.
pub fn steiner_row_bound(r: usize, k: usize) -> Option<(usize, usize)> {
    if k < 3 || r < k - 1 {
        return None;
    }
    let den = (k - 1) * (k - 2);
    let num = r * (r - 1);
    (num % den == 0 && (r - 1) % (k - 2) == 0).then(|| (num / den + r, num / den))
}

/// Parameters `(s, k, m)` of the two cyclic majority-logic families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DtiParams {
    pub s: u128,
    pub k: u128,
    pub m: u128,
}

/// First family: length `2^(2 theta l) - 1`, redundancy
/// `(2^(theta+1) - 1)^l - 1`, `k = 2^l + 2`.
pub fn dti_case1(theta: u32, l: u32) -> Option<DtiParams> {
    let m = 1u128.checked_shl(2 * theta * l)?.checked_sub(1)?;
    let r = ((1u128 << (theta + 1)) - 1).checked_pow(l)? - 1;
    Some(DtiParams { s: m - r, k: (1u128 << l) + 2, m })
}

/// Second family: length `2^(lambda l) - 1`, dimension `(2^lambda - 1)^l -
/// 1`, `k = 2^l`.
pub fn dti_case2(lambda: u32, l: u32) -> Option<DtiParams> {
    let m = 1u128.checked_shl(lambda * l)?.checked_sub(1)?;
    let s = ((1u128 << lambda) - 1).checked_pow(l)? - 1;
    Some(DtiParams { s, k: 1u128 << l, m })
}

/// `r + (size of the weight-(k-1) distance-(2k-4) code)` for a code size
/// supplied by the caller (greedy or optimal).
pub fn constant_weight_bound(r: usize, code_size: usize) -> (usize, usize) {
    (code_size + r, code_size)
}

/// Necessary condition for a 4-cycle-free incidence with `s` left vertices
/// of degree `d` on `r` right vertices: `r(r-1) >= s d (d-1)`.
pub fn girth_bound_check(s: usize, r: usize, d: usize) -> bool {
    r * r.saturating_sub(1) >= s * d * d.saturating_sub(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(lower_bound(3, 8), 14);
        assert_eq!(lower_bound(2, 4), 6);
        for k in 1..=16 {
            assert_eq!(lower_bound(1, k), k);
            assert_eq!(lower_bound(2, k), (3 * k).div_ceil(2));
        }
        assert_eq!(lower_bound(3, 15), 27);
        assert_eq!(lower_bound(3, 5), 10);
        assert_eq!(theorem8_ceil(4, 3), 6);
        assert_eq!(lower_bound(4, 3), 7);
        assert_eq!(cubic_bound(4, 3), 8);
        for s in 1..40 {
            assert_eq!(cubic_bound(s, 2), s + 1);
            assert_eq!(lower_bound(s, 2), s + 1);
        }
        assert_eq!(steiner_bound(7, 4), Some(14));
        assert_eq!(steiner_bound(9, 5), Some(21));
        assert_eq!(steiner_row_bound(7, 4), Some((14, 7)));
        assert_eq!(steiner_row_bound(9, 4), Some((21, 12)));
        assert!(girth_bound_check(7, 7, 3));
        assert!(!girth_bound_check(8, 7, 3));
    }

    #[test]
    fn table_six_ceilings() {
        assert_eq!(theorem8_ceil(4, 220), 413);
        assert_eq!(theorem8_ceil(5, 4845), 9388);
        assert_eq!(theorem8_ceil(6, 142506), 280559);
        let r = theorem8_ratio(5, 4845).unwrap();
        assert_eq!(r, Ratio::new(31 * 4845, 16));
        assert!(r > Ratio::from_integer(9387));
    }

    #[test]
    fn dti_formulas() {
        assert_eq!(dti_case1(1, 2), Some(DtiParams { s: 7, k: 6, m: 15 }));
        assert_eq!(dti_case2(2, 2), Some(DtiParams { s: 8, k: 4, m: 15 }));
    }

    proptest! {
        #[test]
        fn ceiling_matches_ratio(s in 1usize..20, k in 1usize..500) {
            let r = theorem8_ratio(s, k).unwrap();
            prop_assert_eq!(theorem8_ceil(s, k) as u128, r.ceil().to_integer());
        }

        #[test]
        fn lower_bound_monotone(s in 1usize..40, k in 1usize..40) {
            let b = lower_bound(s, k);
            prop_assert!(b >= s + k - 1);
            prop_assert!(lower_bound(s, k + 1) > b);
            prop_assert!(lower_bound(s + 1, k) >= b);
        }
    }
}
