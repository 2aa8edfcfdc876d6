//! A fixed enumeration of finitely supported dyadic vectors, dense in every ℓ_p(ℕ), p < ∞.
//!
//! Level s ≥ 1 holds the vectors supported in [0, s) whose entries are multiples of
//! 2^{−(s−1)} bounded by s in absolute value. Levels are nested; each level lists its new
//! members in mixed-radix order, coordinate 0 varying fastest and each coordinate running
//! through 0, +h, −h, +2h, −2h, … with h = 2^{−(s−1)}.

use num_bigint::BigInt;

use crate::rational::Rational;
use crate::vector::{Domain, SeqVector};

/// Number of grid values per coordinate at level s: s·2^s + 1.
fn radix(s: u32) -> u128 {
    (s as u128) * (1u128 << s) + 1
}

fn level_size(s: u32) -> u128 {
    if s == 0 {
        return 0;
    }
    radix(s).pow(s)
}

fn digit_to_numerator(d: u128) -> i128 {
    let h = d.div_ceil(2) as i128;
    if d % 2 == 1 {
        h
    } else {
        -h
    }
}

fn numerator_to_digit(j: i128) -> u128 {
    if j > 0 {
        2 * j as u128 - 1
    } else {
        2 * (-j) as u128
    }
}

fn digits(mut x: u128, s: u32) -> Vec<u128> {
    let r = radix(s);
    (0..s)
        .map(|_| {
            let d = x % r;
            x /= r;
            d
        })
        .collect()
}

/// Numerators j_i (entries j_i / 2^{s−1}) of the level-s code x.
fn numerators(x: u128, s: u32) -> Vec<i128> {
    digits(x, s).into_iter().map(digit_to_numerator).collect()
}

fn in_previous_level(nums: &[i128], s: u32) -> bool {
    if s <= 1 {
        return false;
    }
    // support in [0, s−1), entries on the coarser grid, |value| ≤ s − 1
    let bound = (s as i128 - 1) << (s - 1);
    nums[s as usize - 1] == 0 && nums.iter().all(|j| j % 2 == 0 && j.abs() <= bound)
}

fn to_vector(nums: &[i128], s: u32) -> SeqVector {
    let den = BigInt::from(1) << (s - 1);
    let entries = nums
        .iter()
        .enumerate()
        .map(|(i, j)| (i as i64, Rational::new(BigInt::from(*j), den.clone())));
    SeqVector::from_entries(Domain::Naturals, entries).expect("nonnegative indices")
}

/// The p-th vector of the enumeration; p = 0 gives 0 and p = 1 gives e₀.
pub fn dense_seq_generator(p: u64) -> SeqVector {
    let mut remaining = p as u128;
    let mut s = 1;
    loop {
        let fresh = level_size(s) - level_size(s - 1);
        if remaining < fresh {
            break;
        }
        remaining -= fresh;
        s += 1;
    }
    let mut x = 0u128;
    loop {
        let nums = numerators(x, s);
        if !in_previous_level(&nums, s) {
            if remaining == 0 {
                return to_vector(&nums, s);
            }
            remaining -= 1;
        }
        x += 1;
    }
}

/// Position of `v` in the enumeration, if it belongs to it.
pub fn dense_seq_index(v: &SeqVector) -> Option<u64> {
    if v.domain() != Domain::Naturals {
        return None;
    }
    let s = (1..=6u32).find(|&s| level_code(v, s).is_some())?;
    let code = level_code(v, s)?;
    let before: u128 = (1..s).map(|t| level_size(t) - level_size(t - 1)).sum();
    let skipped = (0..code).filter(|x| in_previous_level(&numerators(*x, s), s)).count() as u128;
    u64::try_from(before + code - skipped).ok()
}

fn level_code(v: &SeqVector, s: u32) -> Option<u128> {
    if v.max_index().is_some_and(|i| i >= s as i64) {
        return None;
    }
    let scale = Rational::from_integer(BigInt::from(1) << (s - 1));
    let bound = (s as i128) << (s - 1);
    let mut code = 0u128;
    for i in (0..s as i64).rev() {
        let scaled = v.get(i) * &scale;
        if !scaled.is_integer() {
            return None;
        }
        let j: i128 = scaled.to_integer().try_into().ok()?;
        if j.abs() > bound {
            return None;
        }
        code = code * radix(s) + numerator_to_digit(j);
    }
    Some(code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use std::collections::HashSet;

    fn e(i: i64) -> SeqVector {
        SeqVector::basis(Domain::Naturals, i)
    }

    #[test]
    fn first_elements() {
        assert!(dense_seq_generator(0).is_zero());
        assert_eq!(dense_seq_generator(1), e(0));
        assert_eq!(dense_seq_generator(2), e(0).scale(&int(-1)));
        assert_eq!(dense_seq_index(&e(0)), Some(1));
        let i1 = dense_seq_index(&e(1)).unwrap();
        assert_eq!(dense_seq_generator(i1), e(1));
        assert_eq!(i1, 27);
    }

    #[test]
    fn round_trip_and_injective() {
        let mut seen = HashSet::new();
        for p in 0..600 {
            let v = dense_seq_generator(p);
            assert_eq!(dense_seq_index(&v), Some(p), "p = {p}, v = {v}");
            assert!(seen.insert(v));
        }
    }

    #[test]
    fn small_dyadic_vectors_appear_by_level_three() {
        // support ⊆ [0,1], denominators dividing 4, |entries| ≤ 3
        let prefix = level_size(3) as u64;
        for a in -12..=12 {
            for b in -12..=12 {
                let v = e(0).scale(&rat(a, 4)).add(&e(1).scale(&rat(b, 4)));
                let p = dense_seq_index(&v).expect("in the enumeration");
                assert!(p < prefix);
            }
        }
    }
}
