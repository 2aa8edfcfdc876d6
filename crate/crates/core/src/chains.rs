//! ε-chains: finite point lists with ‖T x_i − x_{i+1}‖ < ε at every step, and the
//! constructions that build new chains from old ones. Every constructor re-validates its
//! output against the operator before returning it.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::operators::{Block, Operator};
use crate::rational::{format_rational, int, Rational};
use crate::vector::{NormValue, SeqVector};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    points: Vec<SeqVector>,
    epsilon: Rational,
    defects: Vec<NormValue>,
}

impl Chain {
    pub fn points(&self) -> &[SeqVector] {
        &self.points
    }

    pub fn into_points(self) -> Vec<SeqVector> {
        self.points
    }

    pub fn epsilon(&self) -> &Rational {
        &self.epsilon
    }

    /// Exact defect ‖T x_i − x_{i+1}‖ of each step.
    pub fn defects(&self) -> &[NormValue] {
        &self.defects
    }

    /// Rational upper bounds on the defects, each still strictly below ε.
    pub fn defect_bounds(&self) -> Vec<Rational> {
        self.defects
            .iter()
            .map(|d| d.upper_bound_below(&self.epsilon).expect("validated defect"))
            .collect()
    }

    pub fn max_defect(&self) -> &NormValue {
        self.defects.iter().max().expect("a chain has at least one step")
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> &SeqVector {
        &self.points[0]
    }

    pub fn last(&self) -> &SeqVector {
        self.points.last().unwrap()
    }
}

pub(crate) fn step_defect(op: &Operator, from: &SeqVector, to: &SeqVector) -> Result<NormValue> {
    Ok(op.norm(&op.apply(from)?.sub(to)))
}

/// Certifies `points` as an `eps`-chain for `op`, or reports the first failing step.
pub fn validate_chain(op: &Operator, points: Vec<SeqVector>, eps: Rational) -> Result<Chain> {
    if points.len() < 2 {
        return Err(Error::Domain("a chain needs at least two points".into()));
    }
    if !eps.is_positive() {
        return Err(Error::Domain("chain tolerance must be positive".into()));
    }
    let mut defects = Vec::with_capacity(points.len() - 1);
    for (i, w) in points.windows(2).enumerate() {
        let d = step_defect(op, &w[0], &w[1])?;
        if !d.lt(&eps) {
            return Err(Error::ChainInvalid { index: i, defect: d, eps: format_rational(&eps) });
        }
        defects.push(d);
    }
    Ok(Chain { points, epsilon: eps, defects })
}

/// Builds ε-chains between a point and the origin. Return chains default to going through
/// the origin, or to the two-point chain when the point is fixed.
pub trait ChainFactory {
    fn to_origin(&self, op: &Operator, x: &SeqVector, eps: &Rational) -> Result<Chain>;

    fn from_origin(&self, op: &Operator, y: &SeqVector, eps: &Rational) -> Result<Chain>;

    fn return_chain(&self, op: &Operator, x: &SeqVector, eps: &Rational) -> Result<Chain> {
        if &op.apply(x)? == x {
            return validate_chain(op, vec![x.clone(), x.clone()], eps.clone());
        }
        let down = self.to_origin(op, x, eps)?;
        let up = self.from_origin(op, x, eps)?;
        concat_chains(op, &down, &up)
    }
}

/// Joins a chain ending where the next one starts.
pub fn concat_chains(op: &Operator, a: &Chain, b: &Chain) -> Result<Chain> {
    if a.last() != b.first() {
        return Err(Error::Domain("chains do not meet".into()));
    }
    let mut points = a.points.clone();
    points.extend(b.points[1..].iter().cloned());
    validate_chain(op, points, a.epsilon.clone().max(b.epsilon.clone()))
}

/// λ·c, an ε-chain when |λ| ≤ 1 and an |λ|ε-chain otherwise.
pub fn scale_chain(op: &Operator, c: &Chain, lambda: &Rational) -> Result<Chain> {
    let eps = if lambda.abs() <= Rational::one() {
        c.epsilon.clone()
    } else {
        lambda.abs() * &c.epsilon
    };
    validate_chain(op, c.points.iter().map(|p| p.scale(lambda)).collect(), eps)
}

/// A chain from x to λx through x^j = (1 − j/k)x + (j/k)λx, splicing a return chain at
/// each x^j. `k` is the least integer with ‖x − λx‖/k < ε/2.
pub fn span_connect_chain(
    op: &Operator,
    x: &SeqVector,
    lambda: &Rational,
    eps: &Rational,
    factory: &dyn ChainFactory,
) -> Result<Chain> {
    let half = eps / int(2);
    if lambda.is_one() {
        return factory.return_chain(op, x, eps);
    }
    let gap = op.norm(&x.scale(&(Rational::one() - lambda)));
    let k = gap.scaled(&(int(2) / eps)).min_int_exceeding();
    let target = x.scale(lambda);
    let waypoint = |j: u64| -> SeqVector {
        let t = Rational::new(j.into(), k.into());
        let mut w = x.scale(&(Rational::one() - &t));
        w.axpy(&t, &target);
        w
    };
    let mut points = Vec::new();
    for j in 0..k {
        let xj = waypoint(j);
        let c = factory
            .return_chain(op, &xj, &half)
            .map_err(|e| Error::Factory { index: j as usize, source: Box::new(e) })?;
        if c.first() != &xj || c.last() != &xj {
            return Err(Error::Factory {
                index: j as usize,
                source: Box::new(Error::Domain("return chain does not close at its point".into())),
            });
        }
        let n = c.points.len();
        points.extend(c.points.into_iter().take(n - 1));
    }
    points.push(target);
    validate_chain(op, points, eps.clone())
}

/// A chain from 0 to x: one step to λ′x with ‖λ′x‖ ≤ ε/2, then an ε/2-chain from λ′x up to
/// x along the span.
pub fn span_connect_from_origin(
    op: &Operator,
    x: &SeqVector,
    eps: &Rational,
    factory: &dyn ChainFactory,
) -> Result<Chain> {
    let zero = op.zero();
    if x.is_zero() {
        return validate_chain(op, vec![zero.clone(), zero], eps.clone());
    }
    let m = op.norm(x).scaled(&(int(2) / eps)).min_int_at_least();
    let lambda_prime = Rational::new(1.into(), m.into());
    let start = x.scale(&lambda_prime);
    let up = span_connect_chain(op, &start, &int(m as i64), &(eps / int(2)), factory)?;
    let mut points = vec![zero];
    points.extend(up.points);
    validate_chain(op, points, eps.clone())
}

fn require_isometry(op: &Operator) -> Result<()> {
    let one = Rational::one();
    if op.norm_bound() != &one || op.inverse_norm_bound() != Some(&one) {
        return Err(Error::Unsupported(format!(
            "`{}` is not certified as a surjective isometry",
            op.spec().name()
        )));
    }
    Ok(())
}

/// x_k = T^k x + (k/n)(T^{k−n} x − T^k x) for k = 0..n, with n the least integer such
/// that ‖x‖/n < ε/2. Closes exactly at x; each defect is at most 2‖x‖/n.
pub fn isometry_return_chain(op: &Operator, x: &SeqVector, eps: &Rational) -> Result<Chain> {
    require_isometry(op)?;
    let n = op.norm(x).scaled(&(int(2) / eps)).min_int_exceeding();
    // forward[k] = T^k x, backward[k] = T^{k-n} x
    let mut forward = vec![x.clone()];
    for _ in 0..n {
        forward.push(op.apply(forward.last().unwrap())?);
    }
    let mut back_rev = vec![x.clone()];
    for _ in 0..n {
        back_rev.push(op.apply_inverse(back_rev.last().unwrap())?);
    }
    let nr = Rational::from_integer(n.into());
    let points: Vec<SeqVector> = (0..=n as usize)
        .map(|k| {
            let t = Rational::from_integer(k.into()) / &nr;
            let mut p = forward[k].scale(&(Rational::one() - &t));
            p.axpy(&t, &back_rev[n as usize - k]);
            p
        })
        .collect();
    let chain = validate_chain(op, points, eps.clone())?;
    let bound = op.norm(x).scaled(&(int(2) / &nr));
    if let Some(i) = chain.defects.iter().position(|d| d > &bound) {
        return Err(Error::Certificate(format!("isometry chain defect at step {i} exceeds 2‖x‖/n")));
    }
    Ok(chain)
}

/// Chains for isometries: return chains from the explicit formula, chains to the origin
/// along the span, and chains from the origin by reversing a T⁻¹-chain.
pub struct IsometryFactory;

impl ChainFactory for IsometryFactory {
    fn to_origin(&self, op: &Operator, x: &SeqVector, eps: &Rational) -> Result<Chain> {
        span_connect_chain(op, x, &Rational::zero(), eps, self)
    }

    fn from_origin(&self, op: &Operator, y: &SeqVector, eps: &Rational) -> Result<Chain> {
        let inv = op.inverse_operator()?;
        let down = span_connect_chain(&inv, y, &Rational::zero(), eps, self)?;
        let points: Vec<SeqVector> = down.points.into_iter().rev().collect();
        validate_chain(op, points, eps.clone())
    }

    fn return_chain(&self, op: &Operator, x: &SeqVector, eps: &Rational) -> Result<Chain> {
        if &op.apply(x)? == x {
            return validate_chain(op, vec![x.clone(), x.clone()], eps.clone());
        }
        isometry_return_chain(op, x, eps)
    }
}

fn pad_end(points: &[SeqVector], len: usize, zero: &SeqVector) -> Vec<SeqVector> {
    let mut out = points.to_vec();
    out.resize(len, zero.clone());
    out
}

fn pad_front(points: &[SeqVector], len: usize, zero: &SeqVector) -> Vec<SeqVector> {
    let mut out = vec![zero.clone(); len - points.len()];
    out.extend(points.iter().cloned());
    out
}

/// Pointwise sum of two chains ending at 0, the shorter one continued by zeros.
pub fn sum_chain(op: &Operator, cx: &Chain, cy: &Chain) -> Result<Chain> {
    if !cx.last().is_zero() || !cy.last().is_zero() {
        return Err(Error::Domain("sum_chain needs chains ending at 0".into()));
    }
    let zero = op.zero();
    let len = cx.len().max(cy.len());
    let a = pad_end(&cx.points, len, &zero);
    let b = pad_end(&cy.points, len, &zero);
    let points = a.iter().zip(&b).map(|(p, q)| p.add(q)).collect();
    validate_chain(op, points, &cx.epsilon + &cy.epsilon)
}

/// From a return chain at x, the return chain {Tx, x_2, …, x_N, Tx} at Tx.
pub fn image_chain(op: &Operator, c: &Chain, eps: &Rational) -> Result<Chain> {
    if c.first() != c.last() {
        return Err(Error::Domain("image_chain needs a chain from x back to x".into()));
    }
    let need = eps / (int(2) * op.norm_bound().clone().max(Rational::one()));
    if c.epsilon > need {
        return Err(Error::Infeasible(format!(
            "input tolerance {} exceeds ε/(2 max(‖T‖,1)) = {}",
            format_rational(&c.epsilon),
            format_rational(&need)
        )));
    }
    let tx = op.apply(c.first())?;
    let mut points = vec![tx.clone()];
    points.extend(c.points.iter().skip(2).cloned());
    points.push(tx);
    validate_chain(op, points, eps.clone())
}

/// The reversed chain, certified for T⁻¹ at tolerance `eps`.
pub fn inverse_chain(op: &Operator, c: &Chain, eps: &Rational) -> Result<Chain> {
    let inv = op.inverse_operator()?;
    let b = op.inverse_norm_bound().unwrap();
    if &c.epsilon * b > *eps {
        return Err(Error::Infeasible(format!(
            "input tolerance {} times ‖T⁻¹‖ exceeds {}",
            format_rational(&c.epsilon),
            format_rational(eps)
        )));
    }
    validate_chain(&inv, c.points.iter().rev().cloned().collect(), eps.clone())
}

/// Interleaves one chain per factor of a product. Chains that all end at 0 are continued by
/// zeros; chains that all start at 0 are preceded by zeros. Under the max norm the result is
/// a chain at the largest factor tolerance.
pub fn product_chain(op: &Operator, chains: &[Chain]) -> Result<Chain> {
    let f = op
        .factor_count()
        .ok_or_else(|| Error::Unsupported(format!("`{}` is not a product", op.spec().name())))?;
    if chains.len() != f {
        return Err(Error::Domain(format!("product has {f} factors, got {} chains", chains.len())));
    }
    let zero = op.zero();
    let len = chains.iter().map(Chain::len).max().unwrap();
    let padded: Vec<Vec<SeqVector>> = if chains.iter().all(|c| c.last().is_zero()) {
        chains.iter().map(|c| pad_end(&c.points, len, &zero)).collect()
    } else if chains.iter().all(|c| c.first().is_zero()) {
        chains.iter().map(|c| pad_front(&c.points, len, &zero)).collect()
    } else if chains.iter().all(|c| c.len() == len) {
        chains.iter().map(|c| c.points.clone()).collect()
    } else {
        return Err(Error::Domain(
            "chains of different lengths must all start or all end at 0".into(),
        ));
    };
    let points = (0..len)
        .map(|i| {
            let parts: Vec<SeqVector> = padded.iter().map(|p| p[i].clone()).collect();
            op.embed_factors(&parts)
        })
        .collect::<Result<Vec<_>>>()?;
    let eps = chains.iter().map(|c| c.epsilon.clone()).max().unwrap();
    validate_chain(op, points, eps)
}

/// (x_1, …, x_F) → 0 → (x_1, …, x_F) from per-factor chains to and from the origin.
pub fn product_round_trip(op: &Operator, down: &[Chain], up: &[Chain]) -> Result<Chain> {
    let a = product_chain(op, down)?;
    let b = product_chain(op, up)?;
    concat_chains(op, &a, &b)
}

/// Projects a direct-sum chain onto one block (local coordinates). With the max norm the
/// splitting constant is α = 1; the result is certified at α·ε.
pub fn projection_chain(op: &Operator, c: &Chain, alpha: &Rational, block: Block) -> Result<Chain> {
    if *alpha < Rational::one() {
        return Err(Error::Domain("splitting constant α is at least 1".into()));
    }
    for end in [c.first(), c.last()] {
        if &op.project(end, block)? != end {
            return Err(Error::Domain("chain endpoints must lie in the target block".into()));
        }
    }
    let local = op.block(block)?;
    let points = c
        .points
        .iter()
        .map(|p| op.block_component(p, block))
        .collect::<Result<Vec<_>>>()?;
    validate_chain(&local, points, alpha * &c.epsilon)
}

/// Certificate that no ε-chain returns to x ≠ 0 under a proper contraction.
#[derive(Clone, Debug)]
pub struct NoReturnCertificate {
    pub x: SeqVector,
    pub delta: Rational,
    pub eps: Rational,
    /// Certified ‖T‖ < 1.
    pub contraction: Rational,
}

/// Outcome of a randomized search for a returning chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchReport {
    pub trials: usize,
    pub max_len: usize,
    pub returned: usize,
    pub bound_violations: usize,
    pub terminal_norms: Vec<NormValue>,
}

/// ε = (‖x‖ − ‖Tx‖ − δ)(1 − ‖T‖), using a lower bound on ‖x‖ and an upper bound on ‖Tx‖
/// when they are irrational.
pub fn contraction_no_return_certificate(
    op: &Operator,
    x: &SeqVector,
    delta: &Rational,
) -> Result<NoReturnCertificate> {
    let b = op.norm_bound().clone();
    if b >= Rational::one() {
        return Err(Error::Unsupported(format!(
            "`{}` is not certified as a proper contraction",
            op.spec().name()
        )));
    }
    if x.is_zero() {
        return Err(Error::Domain("0 is chain recurrent; pick x ≠ 0".into()));
    }
    let tx = op.apply(x)?;
    let eps = (op.norm(x).lower_bound() - op.norm(&tx).upper_bound() - delta) * (Rational::one() - &b);
    if !eps.is_positive() {
        return Err(Error::Infeasible(format!(
            "δ = {} leaves no room: ε = {} ≤ 0",
            format_rational(delta),
            format_rational(&eps)
        )));
    }
    Ok(NoReturnCertificate { x: x.clone(), delta: delta.clone(), eps, contraction: b })
}

impl NoReturnCertificate {
    /// ε/(1 − ‖T‖), the accumulated perturbation allowance.
    pub fn slack(&self) -> Rational {
        &self.eps / (Rational::one() - &self.contraction)
    }

    /// For a chain from x with tolerance ≤ ε: ‖x_N‖ ≤ ‖T^N x‖ + ε/(1−‖T‖) < ‖x‖.
    pub fn check_chain(&self, op: &Operator, c: &Chain) -> Result<()> {
        if c.first() != &self.x {
            return Err(Error::Domain("chain does not start at x".into()));
        }
        if c.epsilon > self.eps {
            return Err(Error::Domain("chain tolerance exceeds the certificate's ε".into()));
        }
        let n = c.len() - 1;
        let tnx = op.norm(&op.power(&self.x, n)?);
        let terminal = op.norm(c.last());
        let slack = self.slack();
        if terminal.cmp_norm_plus(&tnx, &slack) == Ordering::Greater {
            return Err(Error::Certificate(format!(
                "‖x_{n}‖ = {terminal} exceeds ‖T^{n} x‖ + ε/(1−‖T‖)"
            )));
        }
        if op.norm(&self.x).cmp_norm_plus(&tnx, &slack) != Ordering::Greater {
            return Err(Error::Certificate(format!(
                "‖T^{n} x‖ + ε/(1−‖T‖) does not stay below ‖x‖"
            )));
        }
        if terminal.cmp(&op.norm(&self.x)) != Ordering::Less {
            return Err(Error::Certificate(format!("chain of length {n} returned to ‖x‖")));
        }
        Ok(())
    }

    /// Tries to falsify the certificate with random ε-chains from x. Even trials sample
    /// defects uniformly from a grid of mesh ε/`grid_den`; odd trials steer each step back
    /// towards x as hard as the tolerance allows.
    pub fn random_search(
        &self,
        op: &Operator,
        trials: usize,
        max_len: usize,
        grid_den: u32,
        seed: u64,
    ) -> Result<SearchReport> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dims = self.x.max_index().unwrap_or(0).max(0) + 2;
        let mut report = SearchReport {
            trials,
            max_len,
            returned: 0,
            bound_violations: 0,
            terminal_norms: Vec::with_capacity(trials),
        };
        for trial in 0..trials {
            let steps = rng.gen_range(1..=max_len);
            let mut points = vec![self.x.clone()];
            for _ in 0..steps {
                let tx = op.apply(points.last().unwrap())?;
                let d = if trial % 2 == 0 {
                    self.uniform_defect(op, &mut rng, dims, grid_den)
                } else {
                    self.greedy_defect(op, &tx, grid_den)
                };
                points.push(tx.add(&d));
            }
            let chain = validate_chain(op, points, self.eps.clone())?;
            let terminal = op.norm(chain.last());
            if terminal.cmp(&op.norm(&self.x)) != Ordering::Less {
                report.returned += 1;
            }
            if self.check_chain(op, &chain).is_err() {
                report.bound_violations += 1;
            }
            report.terminal_norms.push(terminal);
        }
        Ok(report)
    }

    fn uniform_defect(&self, op: &Operator, rng: &mut ChaCha8Rng, dims: i64, den: u32) -> SeqVector {
        let den = den as i64;
        loop {
            let entries = (0..dims).map(|i| {
                let k = rng.gen_range(-den + 1..den);
                (i, &self.eps * Rational::new(k.into(), den.into()))
            });
            let d = SeqVector::from_entries(op.domain(), entries).expect("indices in domain");
            if op.norm(&d).lt(&self.eps) {
                return d;
            }
        }
    }

    fn greedy_defect(&self, op: &Operator, tx: &SeqVector, den: u32) -> SeqVector {
        let want = self.x.sub(tx);
        let gap = op.norm(&want).upper_bound();
        let reach = &self.eps * Rational::new((den - 1).into(), den.into());
        if gap <= reach {
            return want;
        }
        want.scale(&(reach / gap))
    }
}
