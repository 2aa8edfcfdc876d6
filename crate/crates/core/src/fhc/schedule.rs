//! Well-separated sets of positive lower density, realized as arithmetic progressions with
//! staggered offsets: Δ_p = { a_p + jL : j ≥ 0 }.

use crate::rational::Rational;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensitySchedule {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    period: usize,
}

/// Offsets a_1 = N_1, a_{p+1} = a_p + N_p + N_{p+1}; period L = a_P + N_P + N_1.
pub fn build_schedule(sizes: &[usize]) -> Result<DensitySchedule> {
    if sizes.is_empty() {
        return Err(Error::Config("a schedule needs at least one block size".into()));
    }
    if let Some(bad) = sizes.iter().find(|n| **n == 0 || **n % 2 == 1) {
        return Err(Error::Config(format!("block size {bad} is not a positive even integer")));
    }
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config("block sizes must be strictly increasing".into()));
    }
    let mut offsets = vec![sizes[0]];
    for w in sizes.windows(2) {
        let next = offsets.last().unwrap() + w[0] + w[1];
        offsets.push(next);
    }
    let period = offsets.last().unwrap() + sizes.last().unwrap() + sizes[0];
    Ok(DensitySchedule { sizes: sizes.to_vec(), offsets, period })
}

impl DensitySchedule {
    pub fn classes(&self) -> usize {
        self.sizes.len()
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn contains(&self, class: usize, n: usize) -> bool {
        n >= self.offsets[class] && (n - self.offsets[class]) % self.period == 0
    }

    /// Members of class `class` up to and including `up_to`.
    pub fn members(&self, class: usize, up_to: usize) -> impl Iterator<Item = usize> + '_ {
        (self.offsets[class]..=up_to).step_by(self.period)
    }

    /// The block start m ∈ Δ_class with m ≤ n < m + N_class, and the position k = n − m.
    pub fn block_position(&self, class: usize, n: usize) -> Option<(usize, usize)> {
        let a = self.offsets[class];
        if n < a {
            return None;
        }
        let k = (n - a) % self.period;
        (k < self.sizes[class]).then(|| (n - k, k))
    }

    /// Exact density of each class along N = jL.
    pub fn density(&self) -> Rational {
        Rational::new(1.into(), self.period.into())
    }

    /// Exhaustive check over [0, up_to]: min(Δ_p) ≥ N_p, |n − m| ≥ N_p + N_q for distinct
    /// members, and #(Δ_p ∩ [1, jL]) = j for every jL ≤ up_to.
    pub fn verify(&self, up_to: usize) -> Result<()> {
        let mut all: Vec<(usize, usize)> = Vec::new();
        for p in 0..self.classes() {
            if self.offsets[p] < self.sizes[p] {
                return Err(Error::Certificate(format!("min Δ_{p} is below N_{p}")));
            }
            all.extend(self.members(p, up_to).map(|n| (n, p)));
        }
        for (i, &(n, p)) in all.iter().enumerate() {
            for &(m, q) in &all[i + 1..] {
                if n == m {
                    return Err(Error::Certificate(format!("{n} lies in Δ_{p} and Δ_{q}")));
                }
                if n.abs_diff(m) < self.sizes[p] + self.sizes[q] {
                    return Err(Error::Certificate(format!(
                        "{n} ∈ Δ_{p} and {m} ∈ Δ_{q} are closer than N_{p} + N_{q}"
                    )));
                }
            }
        }
        for p in 0..self.classes() {
            for j in 1..=up_to / self.period {
                let count = self.members(p, j * self.period).filter(|n| *n >= 1).count();
                if count != j {
                    return Err(Error::Certificate(format!(
                        "Δ_{p} has {count} members in [1, {}], expected {j}",
                        j * self.period
                    )));
                }
            }
        }
        Ok(())
    }
}

/// min over N ∈ [⌈n_max/2⌉, n_max] of #(A ∩ [1, N])/N, a lower surrogate for the liminf.
pub fn lower_density_estimate<F: Fn(usize) -> bool>(member: F, n_max: usize) -> Rational {
    let lo = n_max.div_ceil(2).max(1);
    let mut count = (1..lo).filter(|n| member(*n)).count();
    let mut best: Option<Rational> = None;
    for n in lo..=n_max {
        if member(n) {
            count += 1;
        }
        let r = Rational::new(count.into(), n.into());
        if best.as_ref().is_none_or(|b| &r < b) {
            best = Some(r);
        }
    }
    best.unwrap_or_else(|| Rational::new(0.into(), 1.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    #[test]
    fn two_classes() {
        let s = build_schedule(&[2, 4]).unwrap();
        assert_eq!(s.offsets(), &[2, 8]);
        assert_eq!(s.period(), 14);
        assert_eq!(s.members(0, 30).collect::<Vec<_>>(), vec![2, 16, 30]);
        assert_eq!(s.members(1, 36).collect::<Vec<_>>(), vec![8, 22, 36]);
        s.verify(3 * 14).unwrap();
        assert_eq!(s.density(), rat(1, 14));
        assert_eq!(s.block_position(1, 10), Some((8, 2)));
        assert_eq!(s.block_position(1, 12), None);
    }

    #[test]
    fn one_class() {
        let s = build_schedule(&[6]).unwrap();
        assert_eq!(s.offsets(), &[6]);
        assert_eq!(s.period(), 18);
        s.verify(60).unwrap();
    }

    #[test]
    fn rejects_bad_sizes() {
        assert!(build_schedule(&[]).is_err());
        assert!(build_schedule(&[3]).is_err());
        assert!(build_schedule(&[4, 4]).is_err());
        assert!(build_schedule(&[6, 4]).is_err());
    }

    #[test]
    fn density_estimates() {
        let evens = lower_density_estimate(|n| n % 2 == 0, 1000);
        assert!(evens <= rat(1, 2) && evens > rat(1, 2) - rat(1, 1000));
        assert_eq!(lower_density_estimate(|n| n <= 10, 100), rat(10, 100));
        let s = build_schedule(&[2, 4]).unwrap();
        let est = lower_density_estimate(|n| s.contains(1, n), 14 * 40);
        assert!(est <= s.density() && s.density() - est < rat(1, 14 * 40 / 2) * rat(2, 1));
    }

    proptest! {
        #[test]
        fn random_schedules_verify(raw in proptest::collection::vec(1usize..12, 1..5)) {
            let mut sizes = Vec::new();
            let mut acc = 0;
            for r in raw {
                acc += 2 * r;
                sizes.push(acc);
            }
            let s = build_schedule(&sizes).unwrap();
            prop_assert!(s.verify(3 * s.period()).is_ok());
        }
    }
}
