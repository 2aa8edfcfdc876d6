//! Chains to and from the origin for the doubling shift with a fixed line.
//!
//! From 0 to t: jump to S^{k−1}t (small once k is large), then follow T, which undoes S
//! exactly. From t to 0: follow the true orbit until it lands on the fixed line as c·e₀ with
//! c = Σ t_i 2^i, then ramp c·e₀ down to 0 in equal steps.

use num_traits::{One, Signed};

use crate::chains::{validate_chain, Chain, ChainFactory};
use crate::operators::{Operator, OperatorSpec};
use crate::rational::{pow2, Rational};
use crate::vector::{NormValue, SeqVector};
use crate::{Error, Result};

pub struct DoublingShiftConnector;

fn require_doubling(op: &Operator) -> Result<()> {
    if op.spec() != &OperatorSpec::DoublingShiftFixedLine {
        return Err(Error::Unsupported(format!(
            "the doubling-shift connector does not apply to `{}`",
            op.spec().name()
        )));
    }
    Ok(())
}

impl DoublingShiftConnector {
    /// c with T^j t = c·e₀ once j reaches the top of the support.
    pub fn line_coefficient(t: &SeqVector) -> Rational {
        t.iter().map(|(i, c)| c * pow2(i)).sum()
    }
}

impl ChainFactory for DoublingShiftConnector {
    fn to_origin(&self, op: &Operator, x: &SeqVector, eps: &Rational) -> Result<Chain> {
        require_doubling(op)?;
        let mut points = vec![x.clone()];
        for _ in 0..x.max_index().unwrap_or(0) {
            let next = op.apply(points.last().unwrap())?;
            points.push(next);
        }
        let c = Self::line_coefficient(x);
        let on_line = points.last().unwrap().clone();
        debug_assert_eq!(on_line, SeqVector::single(op.domain(), 0, c.clone()));
        // least r with |c|/r < ε
        let r = NormValue::from_exact(op.kind(), c.abs() / eps).min_int_exceeding();
        if !on_line.is_zero() {
            let rr = Rational::from_integer(r.into());
            for i in 1..=r {
                let keep = Rational::one() - Rational::from_integer(i.into()) / &rr;
                points.push(on_line.scale(&keep));
            }
        }
        if points.len() == 1 {
            points.push(op.zero());
        }
        validate_chain(op, points, eps.clone())
    }

    fn from_origin(&self, op: &Operator, y: &SeqVector, eps: &Rational) -> Result<Chain> {
        require_doubling(op)?;
        if y.is_zero() {
            return validate_chain(op, vec![op.zero(), op.zero()], eps.clone());
        }
        // ladder[j] = S^j y until ‖S^j y‖ < ε
        let mut ladder = vec![y.clone()];
        while !op.norm(ladder.last().unwrap()).lt(eps) {
            let next = op.apply_right_inverse(ladder.last().unwrap())?;
            ladder.push(next);
        }
        let mut points = vec![op.zero()];
        points.extend(ladder.into_iter().rev());
        validate_chain(op, points, eps.clone())
    }
}
