//! Multiplication by x on L¹[1/2, 1]: the pseudo orbit f_n = δ(1 + x + … + x^{n−1}) has
//! step defect δ/2, yet ‖Tⁿg − f_n‖₁ grows like δ·log n for every polynomial g.

use num_traits::{One, Signed, Zero};

use crate::operators::PolyFunction;
use crate::rational::{int, pow2, Rational};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct L1Row {
    pub n: usize,
    /// ‖f_n‖₁ = δ Σ_{k=1}^{n} (1/k)(1 − 2^{−k}).
    pub orbit_norm: Rational,
    /// Upper bound on ‖xⁿ g‖₁.
    pub g_bound: Rational,
    pub lower_bound: Rational,
}

/// max|c_k| · (deg g + 1) · (1 − 2^{−(n+1)})/(n + 1).
fn g_term(g: &PolyFunction, n: usize) -> Rational {
    match g.degree() {
        None => Rational::zero(),
        Some(d) => {
            let m = g.coeffs().iter().map(|c| c.abs()).max().unwrap();
            let n1 = n as i64 + 1;
            m * int(d as i64 + 1) * (Rational::one() - pow2(-n1)) / int(n1)
        }
    }
}

/// Lower bound on ‖Tⁿg − f_n‖₁.
pub fn l1_nonshadowability_bound(delta: &Rational, n: usize, g: &PolyFunction) -> Result<Rational> {
    Ok(l1_table(delta, n, g)?.pop().unwrap().lower_bound)
}

/// Rows n = 1..=n_max.
pub fn l1_table(delta: &Rational, n_max: usize, g: &PolyFunction) -> Result<Vec<L1Row>> {
    if n_max == 0 {
        return Err(Error::Domain("n starts at 1".into()));
    }
    let mut acc = Rational::zero();
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let k = n as i64;
        acc += (Rational::one() - pow2(-k)) / int(k);
        let orbit_norm = delta * &acc;
        let g_bound = g_term(g, n);
        let lower_bound = &orbit_norm - &g_bound;
        rows.push(L1Row { n, orbit_norm, g_bound, lower_bound });
    }
    Ok(rows)
}

/// Exact ‖x·f_n − f_{n+1}‖₁ for n = 1..=n_max.
pub fn l1_pseudo_orbit_defects(delta: &Rational, n_max: usize) -> Result<Vec<Rational>> {
    let mut f = PolyFunction::geometric(delta, 1);
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let next = PolyFunction::geometric(delta, n + 1);
        let step = f.multiply_by_x().sub(&next);
        let d = step
            .l1_norm()
            .ok_or_else(|| Error::Certificate(format!("no exact L¹ norm for step {n}")))?;
        out.push(d);
        f = next;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn first_row() {
        let zero = PolyFunction::zero();
        assert_eq!(l1_nonshadowability_bound(&rat(1, 10), 1, &zero).unwrap(), rat(1, 20));
        let one = PolyFunction::constant(int(1));
        // 1/20 − (3/4)/2
        assert_eq!(l1_nonshadowability_bound(&rat(1, 10), 1, &one).unwrap(), rat(1, 20) - rat(3, 8));
    }

    #[test]
    fn orbit_norm_matches_polynomial_integral() {
        let d = rat(1, 10);
        for row in l1_table(&d, 25, &PolyFunction::zero()).unwrap() {
            assert_eq!(row.orbit_norm, PolyFunction::geometric(&d, row.n).l1_norm().unwrap());
        }
    }

    #[test]
    fn g_bound_dominates_exact_norm() {
        let g = PolyFunction::new(vec![int(1), rat(-1, 2), int(2)]);
        for n in 1..20 {
            let mut xg = g.clone();
            for _ in 0..n {
                xg = xg.multiply_by_x();
            }
            assert!(xg.l1_upper_bound() <= g_term(&g, n));
        }
    }

    #[test]
    fn defects_are_half_delta() {
        let d = rat(1, 10);
        assert!(l1_pseudo_orbit_defects(&d, 40).unwrap().iter().all(|x| *x == rat(1, 20)));
    }
}
