//! Positive δ-pseudo orbits over a finite horizon and the solvers that shadow them.
//!
//! Two solvers are provided: a right-inverse series for operators with a contractive right
//! inverse S (the shadow is x₀ + Σ Sⁿ(x_n − T x_{n−1})), and a hyperbolic solver for a direct
//! sum of a proper contraction and a proper dilation (stable part follows x₀ forward, unstable
//! part is pulled back from x_H). Every certificate is re-checked by iterating T on the shadow.

mod connector;
mod l1;
mod witness;

pub use connector::DoublingShiftConnector;
pub use l1::{l1_nonshadowability_bound, l1_pseudo_orbit_defects, l1_table, L1Row};
pub use witness::{mixing_witness, return_orbit_witness, MixingWitness, ReturnWitness};

use num_traits::{One, Signed};

use crate::chains::{step_defect, Chain};
use crate::operators::{Block, Operator};
use crate::rational::{format_rational, Rational};
use crate::vector::{NormValue, SeqVector};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PseudoOrbit {
    points: Vec<SeqVector>,
    delta: Rational,
    defects: Vec<NormValue>,
}

impl PseudoOrbit {
    pub fn points(&self) -> &[SeqVector] {
        &self.points
    }

    pub fn delta(&self) -> &Rational {
        &self.delta
    }

    pub fn defects(&self) -> &[NormValue] {
        &self.defects
    }

    /// The last index H.
    pub fn horizon(&self) -> usize {
        self.points.len() - 1
    }
}

/// Certifies ‖T x_n − x_{n+1}‖ ≤ δ for every step.
pub fn validate_pseudo_orbit(op: &Operator, points: Vec<SeqVector>, delta: Rational) -> Result<PseudoOrbit> {
    if points.is_empty() {
        return Err(Error::Domain("a pseudo orbit needs at least one point".into()));
    }
    if !delta.is_positive() {
        return Err(Error::Domain("pseudo-orbit tolerance must be positive".into()));
    }
    let mut defects = Vec::with_capacity(points.len() - 1);
    for (i, w) in points.windows(2).enumerate() {
        let d = step_defect(op, &w[0], &w[1])?;
        if !d.le(&delta) {
            return Err(Error::PseudoOrbitInvalid { index: i, defect: d, delta: format_rational(&delta) });
        }
        defects.push(d);
    }
    Ok(PseudoOrbit { points, delta, defects })
}

/// Splices chains into one pseudo orbit: the first chain, `zero_pad` zeros, each further
/// chain (which must start where the sequence stands), then `tail_steps` points of the true
/// orbit of the last point. With no chains, `start` seeds the orbit.
pub fn concat_chains_to_pseudo_orbit(
    op: &Operator,
    chains: &[Chain],
    zero_pad: usize,
    start: Option<&SeqVector>,
    tail_steps: usize,
    delta: &Rational,
) -> Result<PseudoOrbit> {
    let mut points: Vec<SeqVector> = match (chains.first(), start) {
        (Some(c), _) => c.points().to_vec(),
        (None, Some(s)) => vec![s.clone()],
        (None, None) => return Err(Error::Domain("nothing to build a pseudo orbit from".into())),
    };
    if zero_pad > 0 {
        if !points.last().unwrap().is_zero() {
            return Err(Error::Domain("zero padding must follow a chain that ends at 0".into()));
        }
        points.extend(std::iter::repeat(op.zero()).take(zero_pad));
    }
    for (i, c) in chains.iter().enumerate().skip(1) {
        if c.first() != points.last().unwrap() {
            return Err(Error::Domain(format!("chain {i} does not start where chain {} ends", i - 1)));
        }
        points.extend(c.points()[1..].iter().cloned());
    }
    for _ in 0..tail_steps {
        let next = op.apply(points.last().unwrap())?;
        points.push(next);
    }
    validate_pseudo_orbit(op, points, delta.clone())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShadowCertificate {
    pub shadow: SeqVector,
    pub horizon: usize,
    /// ‖Tⁿ z − x_n‖ for n = 0..=H, from direct iteration.
    pub errors: Vec<NormValue>,
    pub max_error: NormValue,
    pub analytic_bound: Rational,
}

impl ShadowCertificate {
    /// Recomputes every error by iterating T on the shadow and compares with the record.
    pub fn verify(&self, op: &Operator, po: &PseudoOrbit) -> Result<()> {
        let errors = orbit_errors(op, &self.shadow, po.points())?;
        if errors != self.errors {
            return Err(Error::Certificate("recomputed shadow errors differ from the record".into()));
        }
        if !self.max_error.le(&self.analytic_bound) {
            return Err(Error::Certificate(format!(
                "max error {} exceeds the analytic bound {}",
                self.max_error,
                format_rational(&self.analytic_bound)
            )));
        }
        Ok(())
    }

    /// Strict max error < ε.
    pub fn within(&self, eps: &Rational) -> bool {
        self.max_error.lt(eps)
    }
}

fn orbit_errors(op: &Operator, z: &SeqVector, points: &[SeqVector]) -> Result<Vec<NormValue>> {
    let mut cur = z.clone();
    let mut errors = Vec::with_capacity(points.len());
    for (n, x) in points.iter().enumerate() {
        if n > 0 {
            cur = op.apply(&cur)?;
        }
        errors.push(op.norm(&cur.sub(x)));
    }
    Ok(errors)
}

fn certify(op: &Operator, po: &PseudoOrbit, shadow: SeqVector, analytic_bound: Rational) -> Result<ShadowCertificate> {
    let errors = orbit_errors(op, &shadow, po.points())?;
    let max_error = errors.iter().max().cloned().unwrap();
    let cert = ShadowCertificate { shadow, horizon: po.horizon(), errors, max_error, analytic_bound };
    if !cert.max_error.le(&cert.analytic_bound) {
        return Err(Error::Certificate(format!(
            "max shadow error {} exceeds the analytic bound {}",
            cert.max_error,
            format_rational(&cert.analytic_bound)
        )));
    }
    Ok(cert)
}

/// A constructive positive-shadowing procedure together with its modulus ε ↦ δ(ε).
pub trait ShadowSolver {
    fn name(&self) -> &'static str;

    fn operator(&self) -> &Operator;

    /// δ such that every δ-pseudo orbit is shadowed with error strictly below ε.
    fn modulus(&self, eps: &Rational) -> Rational;

    /// Error bound guaranteed for a δ-pseudo orbit of any finite horizon.
    fn error_bound(&self, delta: &Rational) -> Rational;

    fn shadow(&self, po: &PseudoOrbit) -> Result<ShadowCertificate>;
}

/// Shadowing through a contractive right inverse S with ‖S‖ ≤ s < 1.
pub struct RightInverseSolver {
    op: Operator,
    s: Rational,
}

impl RightInverseSolver {
    pub fn new(op: &Operator) -> Result<Self> {
        let s = op.right_inverse_contraction().cloned().ok_or_else(|| {
            Error::Unsupported(format!("`{}` has no contractive right inverse", op.spec().name()))
        })?;
        Ok(RightInverseSolver { op: op.clone(), s })
    }

    pub fn contraction(&self) -> &Rational {
        &self.s
    }
}

impl ShadowSolver for RightInverseSolver {
    fn name(&self) -> &'static str {
        "right-inverse series"
    }

    fn operator(&self) -> &Operator {
        &self.op
    }

    /// ε(1 − s)/s; finite sums of the series stay strictly below δs/(1 − s).
    fn modulus(&self, eps: &Rational) -> Rational {
        eps * (Rational::one() - &self.s) / &self.s
    }

    fn error_bound(&self, delta: &Rational) -> Rational {
        delta * &self.s / (Rational::one() - &self.s)
    }

    fn shadow(&self, po: &PseudoOrbit) -> Result<ShadowCertificate> {
        let op = &self.op;
        let pts = po.points();
        let h = po.horizon();
        // e_H = 0, e_n = S(d_{n+1} + e_{n+1}) with d_n = x_n − T x_{n−1}; then Tⁿz = x_n + e_n
        let mut e = op.zero();
        let mut backward = vec![NormValue::zero(op.kind()); h + 1];
        for n in (0..h).rev() {
            let mut d = pts[n + 1].sub(&op.apply(&pts[n])?);
            d.axpy(&Rational::one(), &e);
            e = op.apply_right_inverse(&d)?;
            backward[n] = op.norm(&e);
        }
        let shadow = pts[0].add(&e);
        let cert = certify(op, po, shadow, self.error_bound(po.delta()))?;
        if cert.errors != backward {
            return Err(Error::Certificate("series errors disagree with direct iteration".into()));
        }
        Ok(cert)
    }
}

/// Shadowing for a proper contraction, a proper dilation, or a direct sum of the two.
pub struct HyperbolicSolver {
    op: Operator,
    /// ‖T_s‖, if there is a stable part.
    stable: Option<Rational>,
    /// ‖T_u⁻¹‖, if there is an unstable part.
    unstable: Option<Rational>,
}

impl HyperbolicSolver {
    pub fn new(op: &Operator) -> Result<Self> {
        let one = Rational::one();
        let fail = || {
            Error::Unsupported(format!(
                "`{}` is not certified hyperbolic (contraction ⊕ invertible dilation)",
                op.spec().name()
            ))
        };
        let (stable, unstable) = if op.is_direct_sum() {
            let l = op.block(Block::Left)?;
            let r = op.block(Block::Right)?;
            let cu = r.inverse_norm_bound().cloned().ok_or_else(fail)?;
            (Some(l.norm_bound().clone()), Some(cu))
        } else if op.norm_bound() < &one {
            (Some(op.norm_bound().clone()), None)
        } else {
            (None, Some(op.inverse_norm_bound().cloned().ok_or_else(fail)?))
        };
        if stable.as_ref().is_some_and(|c| c >= &one) || unstable.as_ref().is_some_and(|c| c >= &one) {
            return Err(fail());
        }
        Ok(HyperbolicSolver { op: op.clone(), stable, unstable })
    }

    fn stable_factor(&self) -> Option<Rational> {
        self.stable.as_ref().map(|c| Rational::one() / (Rational::one() - c))
    }

    fn unstable_factor(&self) -> Option<Rational> {
        self.unstable.as_ref().map(|c| c / (Rational::one() - c))
    }

    /// Bounds (stable, unstable) for a δ-pseudo orbit.
    pub fn block_bounds(&self, delta: &Rational) -> (Option<Rational>, Option<Rational>) {
        (self.stable_factor().map(|f| f * delta), self.unstable_factor().map(|f| f * delta))
    }

    fn pull_back(inv: &Operator, x: &SeqVector, h: usize) -> Result<SeqVector> {
        let mut cur = x.clone();
        for _ in 0..h {
            cur = inv.apply(&cur)?;
        }
        Ok(cur)
    }
}

impl ShadowSolver for HyperbolicSolver {
    fn name(&self) -> &'static str {
        "hyperbolic splitting"
    }

    fn operator(&self) -> &Operator {
        &self.op
    }

    fn modulus(&self, eps: &Rational) -> Rational {
        let f = [self.stable_factor(), self.unstable_factor()].into_iter().flatten().max().unwrap();
        eps / f
    }

    fn error_bound(&self, delta: &Rational) -> Rational {
        let (s, u) = self.block_bounds(delta);
        [s, u].into_iter().flatten().max().unwrap()
    }

    fn shadow(&self, po: &PseudoOrbit) -> Result<ShadowCertificate> {
        let op = &self.op;
        let pts = po.points();
        let h = po.horizon();
        let shadow = if op.is_direct_sum() {
            let stable = op.project(&pts[0], Block::Left)?;
            let inv = op.block(Block::Right)?.inverse_operator()?;
            let local = Self::pull_back(&inv, &op.block_component(&pts[h], Block::Right)?, h)?;
            stable.add(&op.embed_block(&local, Block::Right)?)
        } else if self.stable.is_some() {
            pts[0].clone()
        } else {
            Self::pull_back(&op.inverse_operator()?, &pts[h], h)?
        };
        certify(op, po, shadow, self.error_bound(po.delta()))
    }
}

/// The right-inverse solver when available, otherwise the hyperbolic one.
pub fn solver_for(op: &Operator) -> Result<Box<dyn ShadowSolver>> {
    if let Ok(s) = RightInverseSolver::new(op) {
        return Ok(Box::new(s));
    }
    Ok(Box::new(HyperbolicSolver::new(op)?))
}

/// Errors restricted to one block of a direct sum.
pub fn block_errors(op: &Operator, cert: &ShadowCertificate, po: &PseudoOrbit, block: Block) -> Result<Vec<NormValue>> {
    let local = op.block(block)?;
    let mut cur = op.block_component(&cert.shadow, block)?;
    let mut out = Vec::with_capacity(po.points().len());
    for (n, x) in po.points().iter().enumerate() {
        if n > 0 {
            cur = local.apply(&cur)?;
        }
        out.push(local.norm(&cur.sub(&op.block_component(x, block)?)));
    }
    Ok(out)
}

/// Random δ-pseudo orbit: the true orbit of `start` perturbed by a grid vector of norm ≤ δ
/// at each step, supported on the first `dims` coordinates.
pub fn random_pseudo_orbit<R: rand::Rng>(
    op: &Operator,
    start: &SeqVector,
    delta: &Rational,
    horizon: usize,
    dims: i64,
    grid_den: i64,
    rng: &mut R,
) -> Result<PseudoOrbit> {
    let mut points = vec![start.clone()];
    for _ in 0..horizon {
        let tx = op.apply(points.last().unwrap())?;
        let d = loop {
            let entries = (0..dims).map(|i| (i, delta * Rational::new(rng.gen_range(-grid_den..=grid_den).into(), grid_den.into())));
            let d = SeqVector::from_entries(op.domain(), entries)?;
            if op.norm(&d).le(delta) {
                break d;
            }
        };
        points.push(tx.add(&d));
    }
    validate_pseudo_orbit(op, points, delta.clone())
}

/// Whether every error is at most the given bound.
pub fn all_within(errors: &[NormValue], bound: &Rational) -> bool {
    errors.iter().all(|e| e.le(bound))
}
