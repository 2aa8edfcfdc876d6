//! Polynomials on [1/2, 1] with exact L¹ norms, the space where multiplication by x
//! admits pseudo-orbits that nothing shadows.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::rational::{format_rational, int, pow2, rat, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PolyFunction {
    coeffs: Vec<Rational>,
}

fn binom(n: usize, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Coefficients of q(t) = f(lo + (hi - lo) t) in the power basis.
fn reparametrize(coeffs: &[Rational], lo: &Rational, width: &Rational) -> Vec<Rational> {
    // Horner in the variable lo + width·t
    let mut out: Vec<Rational> = Vec::new();
    for c in coeffs.iter().rev() {
        let mut next = vec![Rational::zero(); out.len() + 1];
        for (j, b) in out.iter().enumerate() {
            next[j] += b * lo;
            next[j + 1] += b * width;
        }
        next[0] += c;
        out = next;
    }
    out
}

/// Bernstein coefficients of a polynomial given in the power basis on [0, 1].
fn bernstein(power: &[Rational]) -> Vec<Rational> {
    let n = power.len().saturating_sub(1);
    (0..=n)
        .map(|i| {
            (0..=i)
                .map(|j| {
                    Rational::new(binom(i, j), binom(n, j)) * &power[j]
                })
                .sum()
        })
        .collect()
}

impl PolyFunction {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        PolyFunction { coeffs }
    }

    pub fn zero() -> Self {
        PolyFunction { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        PolyFunction::new(vec![c])
    }

    /// δ(1 + x + … + x^{n-1}).
    pub fn geometric(delta: &Rational, n: usize) -> Self {
        PolyFunction::new(vec![delta.clone(); n])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn multiply_by_x(&self) -> PolyFunction {
        if self.is_zero() {
            return self.clone();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rational::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        PolyFunction { coeffs }
    }

    pub fn sub(&self, other: &PolyFunction) -> PolyFunction {
        let n = self.coeffs.len().max(other.coeffs.len());
        let zero = Rational::zero();
        PolyFunction::new(
            (0..n)
                .map(|k| self.coeffs.get(k).unwrap_or(&zero) - other.coeffs.get(k).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }

    fn antiderivative_at(&self, x: &Rational) -> Rational {
        let mut acc = Rational::zero();
        let mut xp = x.clone();
        for (k, c) in self.coeffs.iter().enumerate() {
            acc += c * &xp / int(k as i64 + 1);
            xp *= x;
        }
        acc
    }

    /// ∫ over [1/2, 1], i.e. Σ c_k (1 - 2^{-(k+1)}) / (k+1).
    pub fn integral(&self) -> Rational {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c * (Rational::one() - pow2(-(k as i64 + 1))) / int(k as i64 + 1))
            .sum()
    }

    /// Exact L¹ norm on [1/2, 1] when the polynomial is sign-definite on each piece of a
    /// dyadic subdivision of depth ≤ 8, as certified by Bernstein coefficients.
    pub fn l1_norm(&self) -> Option<Rational> {
        if self.is_zero() {
            return Some(Rational::zero());
        }
        let mut total = Rational::zero();
        let mut stack = vec![(rat(1, 2), rat(1, 2), 0u32)];
        while let Some((lo, width, depth)) = stack.pop() {
            let b = bernstein(&reparametrize(&self.coeffs, &lo, &width));
            let nonneg = b.iter().all(|c| !c.is_negative());
            let nonpos = b.iter().all(|c| !c.is_positive());
            if nonneg || nonpos {
                let hi = &lo + &width;
                total += (self.antiderivative_at(&hi) - self.antiderivative_at(&lo)).abs();
            } else if depth < 8 {
                let half = &width / int(2);
                stack.push((&lo + &half, half.clone(), depth + 1));
                stack.push((lo, half, depth + 1));
            } else {
                return None;
            }
        }
        Some(total)
    }

    /// Σ |c_k| ∫ x^k, an upper bound on the L¹ norm that needs no sign information.
    pub fn l1_upper_bound(&self) -> Rational {
        PolyFunction { coeffs: self.coeffs.iter().map(|c| c.abs()).collect() }.integral()
    }
}

impl fmt::Display for PolyFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| match k {
                0 => format_rational(c),
                1 => format!("{}·x", format_rational(c)),
                _ => format!("{}·x^{k}", format_rational(c)),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn multiply_by_x_shifts_coefficients() {
        assert_eq!(PolyFunction::constant(int(1)).multiply_by_x(), PolyFunction::new(vec![int(0), int(1)]));
        assert!(PolyFunction::zero().multiply_by_x().is_zero());
        let d = rat(1, 10);
        let f2 = PolyFunction::geometric(&d, 2);
        assert_eq!(f2.multiply_by_x(), PolyFunction::new(vec![int(0), d.clone(), d]));
    }

    #[test]
    fn integrals() {
        // ∫ 1 = 1/2, ∫ x = 3/8, ∫ x² = 7/24
        assert_eq!(PolyFunction::constant(int(1)).integral(), rat(1, 2));
        assert_eq!(PolyFunction::new(vec![int(0), int(1)]).integral(), rat(3, 8));
        assert_eq!(PolyFunction::new(vec![int(0), int(0), int(1)]).integral(), rat(7, 24));
    }

    #[test]
    fn l1_norm_handles_sign_changes_at_dyadic_points() {
        // x - 3/4 changes sign at 3/4: ∫|x - 3/4| = 2 · (1/4)²/2 = 1/16
        let f = PolyFunction::new(vec![rat(-3, 4), int(1)]);
        assert_eq!(f.l1_norm(), Some(rat(1, 16)));
        // root at 2/3 is never a subdivision point
        let g = PolyFunction::new(vec![rat(-2, 3), int(1)]);
        assert_eq!(g.l1_norm(), None);
        assert_eq!(PolyFunction::constant(int(-2)).l1_norm(), Some(int(1)));
    }

    #[test]
    fn pseudo_orbit_step_defect_is_half_delta() {
        // x·f_n - f_{n+1} = -δ, whose L¹ norm on [1/2,1] is δ/2
        let d = rat(1, 10);
        for n in 1..30 {
            let step = PolyFunction::geometric(&d, n).multiply_by_x().sub(&PolyFunction::geometric(&d, n + 1));
            assert_eq!(step.l1_norm(), Some(rat(1, 20)));
        }
    }

    proptest! {
        #[test]
        fn l1_norm_bracketed_by_integral_and_upper_bound(cs in proptest::collection::vec(-9i64..10, 0..6)) {
            let f = PolyFunction::new(cs.iter().map(|&c| rat(c, 3)).collect());
            if let Some(n) = f.l1_norm() {
                prop_assert!(n >= f.integral().abs());
                prop_assert!(n <= f.l1_upper_bound());
            }
        }

        #[test]
        fn bernstein_nonnegative_means_nonnegative_samples(cs in proptest::collection::vec(-9i64..10, 1..6)) {
            let f = PolyFunction::new(cs.iter().map(|&c| int(c)).collect());
            if f.is_zero() { return Ok(()); }
            let b = bernstein(&reparametrize(f.coeffs(), &rat(1, 2), &rat(1, 2)));
            if b.iter().all(|c| !c.is_negative()) {
                for k in 0..=16 {
                    prop_assert!(!f.eval(&(rat(1, 2) + rat(k, 32))).is_negative());
                }
            }
        }
    }
}
