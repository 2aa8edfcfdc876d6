//! Witnesses built by shadowing spliced chains: mixing (z near x whose orbit is near y after
//! a prescribed delay) and non-wandering returns.

use num_traits::Signed;

use crate::chains::{concat_chains, ChainFactory};
use crate::rational::{format_rational, int, Rational};
use crate::shadowing::{concat_chains_to_pseudo_orbit, ShadowCertificate, ShadowSolver};
use crate::vector::{NormValue, SeqVector};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct MixingWitness {
    pub z: SeqVector,
    pub hitting_time: usize,
    pub k: usize,
    pub eps: Rational,
    pub delta: Rational,
    /// ‖z − x‖ and ‖T^{hitting_time} z − y‖.
    pub start_error: NormValue,
    pub end_error: NormValue,
    pub certificate: ShadowCertificate,
}

/// z_k ∈ ball(x, λ) with T^{n+m+k} z_k ∈ ball(y, λ): shadow the pseudo orbit made of a
/// δ-chain x → 0, k zeros and a δ-chain 0 → y, with ε = λ/2 and δ = δ(ε).
pub fn mixing_witness(
    solver: &dyn ShadowSolver,
    factory: &dyn ChainFactory,
    x: &SeqVector,
    y: &SeqVector,
    lambda: &Rational,
    k: usize,
) -> Result<MixingWitness> {
    if !lambda.is_positive() {
        return Err(Error::Domain("ball radius must be positive".into()));
    }
    let op = solver.operator();
    let eps = lambda / int(2);
    let delta = solver.modulus(&eps);
    let down = factory.to_origin(op, x, &delta)?;
    let up = factory.from_origin(op, y, &delta)?;
    let hitting_time = down.len() - 1 + k + up.len() - 1;
    let po = concat_chains_to_pseudo_orbit(op, &[down, up], k, None, 0, &delta)?;
    debug_assert_eq!(po.horizon(), hitting_time);
    let certificate = solver.shadow(&po)?;
    if !certificate.within(&eps) {
        return Err(Error::Certificate(format!(
            "shadow error {} is not below ε = {}",
            certificate.max_error,
            format_rational(&eps)
        )));
    }
    let z = certificate.shadow.clone();
    let start_error = op.norm(&z.sub(x));
    let end_error = op.norm(&op.power(&z, hitting_time)?.sub(y));
    if !start_error.lt(lambda) || !end_error.lt(lambda) {
        return Err(Error::Certificate(format!(
            "witness for k = {k} misses a ball: ‖z − x‖ = {start_error}, ‖T^{hitting_time} z − y‖ = {end_error}"
        )));
    }
    Ok(MixingWitness { z, hitting_time, k, eps, delta, start_error, end_error, certificate })
}

#[derive(Clone, Debug)]
pub struct ReturnWitness {
    pub z: SeqVector,
    pub period: usize,
    pub return_times: Vec<usize>,
    /// ‖T^t z − x‖ at each return time.
    pub errors: Vec<NormValue>,
    pub certificate: ShadowCertificate,
}

/// Shadows the pseudo orbit that runs a return chain at x `repeats` times. The shadow z
/// comes back within ε of x at every multiple of the chain length.
pub fn return_orbit_witness(
    solver: &dyn ShadowSolver,
    factory: &dyn ChainFactory,
    x: &SeqVector,
    eps: &Rational,
    repeats: usize,
) -> Result<ReturnWitness> {
    if repeats == 0 {
        return Err(Error::Domain("at least one return is needed".into()));
    }
    let op = solver.operator();
    let delta = solver.modulus(eps);
    let single = factory.return_chain(op, x, &delta)?;
    if single.first() != x || single.last() != x {
        return Err(Error::Domain("return chain does not close at x".into()));
    }
    let mut looped = single.clone();
    for _ in 1..repeats {
        looped = concat_chains(op, &looped, &single)?;
    }
    let po = concat_chains_to_pseudo_orbit(op, &[looped], 0, None, 0, &delta)?;
    let certificate = solver.shadow(&po)?;
    let period = single.len() - 1;
    let z = certificate.shadow.clone();
    let mut return_times = Vec::with_capacity(repeats);
    let mut errors = Vec::with_capacity(repeats);
    let mut cur = z.clone();
    for t in 1..=period * repeats {
        cur = op.apply(&cur)?;
        if t % period == 0 {
            let err = op.norm(&cur.sub(x));
            if !err.lt(eps) {
                return Err(Error::Certificate(format!("‖T^{t} z − x‖ = {err} is not below ε")));
            }
            return_times.push(t);
            errors.push(err);
        }
    }
    Ok(ReturnWitness { z, period, return_times, errors, certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{Operator, OperatorSpec};
    use crate::rational::rat;
    use crate::shadowing::{DoublingShiftConnector, RightInverseSolver};
    use crate::vector::{Domain, NormKind};

    fn e(i: i64) -> SeqVector {
        SeqVector::basis(Domain::Naturals, i)
    }

    fn solver() -> RightInverseSolver {
        RightInverseSolver::new(&Operator::new(OperatorSpec::doubling(), NormKind::One).unwrap()).unwrap()
    }

    #[test]
    fn mixing_hitting_times_are_consecutive() {
        let s = solver();
        let mut times = Vec::new();
        for k in 0..6 {
            let w = mixing_witness(&s, &DoublingShiftConnector, &e(0), &e(1), &rat(1, 10), k).unwrap();
            times.push(w.hitting_time);
        }
        assert!(times.windows(2).all(|w| w[1] == w[0] + 1));
    }

    #[test]
    fn origin_balls_accept_zero() {
        let s = solver();
        let z = SeqVector::zero(Domain::Naturals);
        let w = mixing_witness(&s, &DoublingShiftConnector, &z, &z, &rat(1, 10), 3).unwrap();
        assert!(w.z.is_zero());
    }

    #[test]
    fn returns_at_fixed_point_and_mixed_vector() {
        let s = solver();
        let w = return_orbit_witness(&s, &DoublingShiftConnector, &e(0), &rat(1, 8), 3).unwrap();
        assert_eq!(w.return_times, vec![1, 2, 3]);
        let x = e(0).add(&e(1));
        let w = return_orbit_witness(&s, &DoublingShiftConnector, &x, &rat(1, 8), 2).unwrap();
        assert_eq!(w.return_times, vec![w.period, 2 * w.period]);
        let zero = SeqVector::zero(Domain::Naturals);
        let w = return_orbit_witness(&s, &DoublingShiftConnector, &zero, &rat(1, 8), 2).unwrap();
        assert!(w.z.is_zero());
    }
}
