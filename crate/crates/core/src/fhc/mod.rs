//! Frequently hypercyclic vectors by shadowing ramped block pseudo orbits.
//!
//! Class p targets x_p with ε_p = 2^{−p}. Its pseudo orbit γᵖ repeats a symmetric chain
//! 0 → x_p → 0 on the blocks [m, m + N_p), m ∈ Δ_p, minus a ramp of the orbit of the previously
//! built z_0 + … + z_{p−1}, so that the partial sums stay near x_p at the times m + R_p.

mod dense;
mod schedule;

pub use dense::{dense_seq_generator, dense_seq_index};
pub use schedule::{build_schedule, lower_density_estimate, DensitySchedule};

use std::fmt;

use num_traits::{One, Zero};

use crate::chains::{validate_chain, Chain, ChainFactory};
use crate::operators::Operator;
use crate::rational::{format_rational, int, pow2, Rational};
use crate::shadowing::{validate_pseudo_orbit, PseudoOrbit, ShadowSolver};
use crate::vector::{NormValue, SeqVector};
use crate::{Error, Result};

/// The symmetric chain 0 = x⁰, …, x^{R} = x_p, …, x^{N−1} = 0 with N = 2R.
#[derive(Clone, Debug)]
pub struct ChainRecord {
    pub chain: Chain,
    pub r: usize,
    /// Steps taken by the factory on the way up and on the way down, before padding.
    pub up_steps: usize,
    pub down_steps: usize,
}

impl ChainRecord {
    pub fn size(&self) -> usize {
        2 * self.r
    }

    pub fn point(&self, k: usize) -> &SeqVector {
        &self.chain.points()[k]
    }
}

/// Pads factory chains 0 → x_p and x_p → 0 (built at `chain_eps`) with zeros. R is the least
/// value with 1/R < δ_p/4 that fits both halves and is at least `min_r`.
pub fn chain_through(
    op: &Operator,
    factory: &dyn ChainFactory,
    x_p: &SeqVector,
    chain_eps: &Rational,
    delta_p: &Rational,
    min_r: usize,
) -> Result<ChainRecord> {
    let (up, down) = if x_p.is_zero() {
        (vec![op.zero(), op.zero()], vec![op.zero(), op.zero()])
    } else {
        (
            factory.from_origin(op, x_p, chain_eps)?.into_points(),
            factory.to_origin(op, x_p, chain_eps)?.into_points(),
        )
    };
    if !up[0].is_zero() || up.last() != Some(x_p) || &down[0] != x_p || !down.last().unwrap().is_zero() {
        return Err(Error::Domain("factory chains do not run between 0 and x_p".into()));
    }
    let up_steps = up.len() - 1;
    let down_steps = down.len() - 1;
    // 1/R < δ/4  ⇔  R > 4/δ
    let ramp = NormValue::from_exact(op.kind(), int(4) / delta_p).min_int_exceeding() as usize;
    let r = ramp.max(up_steps).max(down_steps + 1).max(min_r).max(1);
    let mut points = vec![op.zero(); r - up_steps + 1];
    points.extend(up.into_iter().skip(1));
    points.extend(down.into_iter().skip(1));
    points.resize(2 * r, op.zero());
    debug_assert_eq!(&points[r], x_p);
    let chain = validate_chain(op, points, chain_eps.clone())?;
    Ok(ChainRecord { chain, r, up_steps, down_steps })
}

/// Position of a step n → n+1 relative to the blocks of one class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DefectCase {
    Outside,
    /// n + 1 starts a block.
    Entry,
    /// n = m + k, k < R.
    Ascending,
    /// n = m + R.
    Peak,
    /// n = m + k, R < k < N − 1.
    Descending,
    /// n = m + N − 1.
    Exit,
}

impl DefectCase {
    pub const ALL: [DefectCase; 6] = [
        DefectCase::Outside,
        DefectCase::Entry,
        DefectCase::Ascending,
        DefectCase::Peak,
        DefectCase::Descending,
        DefectCase::Exit,
    ];

    pub fn label(self) -> &'static str {
        match self {
            DefectCase::Outside => "outside",
            DefectCase::Entry => "case 1",
            DefectCase::Ascending => "case 2",
            DefectCase::Peak => "case 3",
            DefectCase::Descending => "case 4",
            DefectCase::Exit => "case 5",
        }
    }

    fn index(self) -> usize {
        DefectCase::ALL.iter().position(|c| *c == self).unwrap()
    }
}

#[derive(Clone, Debug)]
pub struct GammaOrbit {
    pub pseudo_orbit: PseudoOrbit,
    /// Number of steps checked in each `DefectCase`, in the order of `DefectCase::ALL`.
    pub case_counts: [usize; 6],
    /// max ‖Tⁿ(z_0 + … + z_{p−1})‖ over the block indices m..=m+N.
    pub prior_max: NormValue,
}

/// Builds γᵖ on 0..=horizon and checks every step against its case bound.
pub fn gamma_pseudo_orbit(
    op: &Operator,
    schedule: &DensitySchedule,
    class: usize,
    prior: &SeqVector,
    record: &ChainRecord,
    delta: &Rational,
    horizon: usize,
) -> Result<GammaOrbit> {
    let r = record.r;
    let n_size = record.size();
    if schedule.sizes()[class] != n_size {
        return Err(Error::Config(format!("class {class} block size differs from its chain length")));
    }
    let rr = Rational::from_integer(r.into());
    let mut points = Vec::with_capacity(horizon + 1);
    let mut prior_norms = Vec::with_capacity(horizon + 1);
    let mut w = prior.clone();
    for n in 0..=horizon {
        if n > 0 {
            w = op.apply(&w)?;
        }
        prior_norms.push(op.norm(&w));
        let point = match schedule.block_position(class, n) {
            None => op.zero(),
            Some((_, k)) => {
                let c = if k <= r { k } else { n_size - k };
                let mut g = record.point(k).clone();
                if c > 0 && !w.is_zero() {
                    g.axpy(&(-Rational::from_integer(c.into()) / &rr), &w);
                }
                g
            }
        };
        points.push(point);
    }

    let two = int(2);
    let mut prior_max = NormValue::zero(op.kind());
    for n in 0..=horizon {
        let inside = schedule.block_position(class, n).is_some()
            || n.checked_sub(1).is_some_and(|m| schedule.block_position(class, m).is_some_and(|(_, k)| k + 1 == n_size));
        if inside {
            if !prior_norms[n].lt(&two) {
                return Err(Error::Certificate(format!(
                    "class {class}: ‖Tⁿ(z_0 + … + z_{{p−1}})‖ = {} is not below 2 at n = {n}",
                    prior_norms[n]
                )));
            }
            prior_max = prior_max.max(prior_norms[n].clone());
        }
    }

    let po = validate_pseudo_orbit(op, points, delta.clone())?;
    let half = delta / int(2);
    let mut case_counts = [0; 6];
    for n in 0..horizon {
        let case = match schedule.block_position(class, n) {
            None if schedule.block_position(class, n + 1).is_some() => DefectCase::Entry,
            None => DefectCase::Outside,
            Some((_, k)) if k < r => DefectCase::Ascending,
            Some((_, k)) if k == r => DefectCase::Peak,
            Some((_, k)) if k + 1 < n_size => DefectCase::Descending,
            Some(_) => DefectCase::Exit,
        };
        case_counts[case.index()] += 1;
        let defect = &po.defects()[n];
        let ramp = prior_norms[n + 1].scaled(&(Rational::one() / &rr));
        let fail = |why: &str| {
            Error::Certificate(format!("class {class}: {} bound fails at n = {n}: {why}", case.label()))
        };
        match case {
            DefectCase::Outside | DefectCase::Entry => {
                if !defect.is_zero() {
                    return Err(fail(&format!("defect {defect} is not 0")));
                }
            }
            DefectCase::Ascending | DefectCase::Peak | DefectCase::Descending => {
                let k = n - schedule.block_position(class, n).unwrap().0;
                let chain_defect = &record.chain.defects()[k];
                if defect.cmp_sum(chain_defect, &ramp) == std::cmp::Ordering::Greater {
                    return Err(fail(&format!("defect {defect} exceeds chain defect {chain_defect} + ramp {ramp}")));
                }
                if !chain_defect.lt(&half) || !ramp.lt(&half) {
                    return Err(fail(&format!("chain defect {chain_defect} or ramp {ramp} is not below δ/2")));
                }
            }
            DefectCase::Exit => {
                if defect != &ramp {
                    return Err(fail(&format!("defect {defect} differs from ramp {ramp}")));
                }
                if !ramp.lt(&half) {
                    return Err(fail(&format!("ramp {ramp} is not below δ/2")));
                }
            }
        }
    }
    Ok(GammaOrbit { pseudo_orbit: po, case_counts, prior_max })
}

#[derive(Clone, Debug)]
pub struct ClassRecord {
    pub p: usize,
    pub x_p: SeqVector,
    pub eps_p: Rational,
    pub delta_p: Rational,
    pub r_p: usize,
    pub offset: usize,
    pub z_p: SeqVector,
    pub z_norm: NormValue,
    pub case_counts: [usize; 6],
    pub shadow_error: NormValue,
    /// Times m + R_p checked for property (b) and the worst value found there.
    pub peak_times: Vec<usize>,
    pub worst_b: NormValue,
    /// Number of indices checked for property (c) and the worst value found there.
    pub c_checked: usize,
    pub worst_c: NormValue,
}

#[derive(Clone, Debug)]
pub struct VisitRecord {
    pub p: usize,
    pub radius: Rational,
    /// (Δ_p + R_p) ∩ [1, H].
    pub required: Vec<usize>,
    pub visits: Vec<usize>,
    pub contained: bool,
    pub density: Rational,
}

#[derive(Clone, Debug)]
pub struct FhcCertificate {
    pub horizon: usize,
    pub schedule: DensitySchedule,
    pub classes: Vec<ClassRecord>,
    pub z: SeqVector,
    pub z_norm: NormValue,
    pub visits: Vec<VisitRecord>,
}

impl FhcCertificate {
    /// Every visit set contains its shifted schedule and has density at least 1/(2L).
    pub fn visits_ok(&self) -> bool {
        let floor = Rational::new(1.into(), (2 * self.schedule.period()).into());
        self.visits.iter().all(|v| v.contained && v.density >= floor)
    }
}

/// Targets x_0, …, x_P from the fixed enumeration.
pub fn dense_targets(p_max: usize) -> Vec<SeqVector> {
    (0..=p_max as u64).map(dense_seq_generator).collect()
}

/// Builds z = z_0 + … + z_P. δ_p is `margin` times the solver modulus at 2^{−p}, chains are
/// taken at δ_p/2, and H defaults to 5L. Properties (a), (b), (c) are checked at every
/// index ≤ H, then the visits of z to ball(x_p, 2^{−p−1}) are counted.
pub fn construct_fhc_vector(
    solver: &dyn ShadowSolver,
    factory: &dyn ChainFactory,
    targets: &[SeqVector],
    margin: &Rational,
    horizon: Option<usize>,
) -> Result<FhcCertificate> {
    if targets.is_empty() {
        return Err(Error::Config("at least one target is needed".into()));
    }
    if !targets[0].is_zero() {
        return Err(Error::Config("the first target must be 0".into()));
    }
    if *margin <= Rational::zero() || *margin > Rational::one() {
        return Err(Error::Config("δ margin must lie in (0, 1]".into()));
    }
    let op = solver.operator();
    let mut records = Vec::with_capacity(targets.len());
    let mut min_r = 1;
    for (p, x) in targets.iter().enumerate() {
        let eps = pow2(-(p as i64));
        let delta = margin * solver.modulus(&eps);
        let rec = chain_through(op, factory, x, &(&delta / int(2)), &delta, min_r)?;
        min_r = rec.r + 1;
        records.push((eps, delta, rec));
    }
    let sizes: Vec<usize> = records.iter().map(|(_, _, r)| r.size()).collect();
    let schedule = build_schedule(&sizes)?;
    schedule.verify(3 * schedule.period())?;
    let horizon = horizon.unwrap_or(5 * schedule.period());

    let mut prior = op.zero();
    let mut classes = Vec::with_capacity(targets.len());
    for (p, (eps, delta, rec)) in records.into_iter().enumerate() {
        let gamma = gamma_pseudo_orbit(op, &schedule, p, &prior, &rec, &delta, horizon)?;
        let cert = solver.shadow(&gamma.pseudo_orbit)?;
        if !cert.within(&eps) {
            return Err(Error::Certificate(format!("class {p}: shadow error {} is not below 2^-{p}", cert.max_error)));
        }
        let z_p = cert.shadow.clone();
        let fail = |prop: &str, n: usize, v: &NormValue| {
            Error::Certificate(format!("class {p}: property ({prop}) fails at n = {n} with norm {v}"))
        };
        let z_norm = op.norm(&z_p);
        if !z_norm.lt(&eps) {
            return Err(fail("a", 0, &z_norm));
        }
        let mut partial = prior.add(&z_p);
        let mut orbit = z_p.clone();
        let mut peak_times = Vec::new();
        let mut worst_b = NormValue::zero(op.kind());
        let mut worst_c = NormValue::zero(op.kind());
        let mut c_checked = 0;
        for n in 0..=horizon {
            if n > 0 {
                partial = op.apply(&partial)?;
                orbit = op.apply(&orbit)?;
            }
            match schedule.block_position(p, n) {
                Some((_, k)) => {
                    if k == rec.r {
                        let v = op.norm(&partial.sub(&targets[p]));
                        if !v.lt(&eps) {
                            return Err(fail("b", n, &v));
                        }
                        peak_times.push(n);
                        worst_b = worst_b.max(v);
                    }
                }
                None => {
                    let v = op.norm(&orbit);
                    if !v.lt(&eps) {
                        return Err(fail("c", n, &v));
                    }
                    c_checked += 1;
                    worst_c = worst_c.max(v);
                }
            }
        }
        prior = prior.add(&z_p);
        classes.push(ClassRecord {
            p,
            x_p: targets[p].clone(),
            eps_p: eps,
            delta_p: delta,
            r_p: rec.r,
            offset: schedule.offsets()[p],
            z_p,
            z_norm,
            case_counts: gamma.case_counts,
            shadow_error: cert.max_error,
            peak_times,
            worst_b,
            c_checked,
            worst_c,
        });
    }

    let z = prior;
    let z_norm = op.norm(&z);
    if !z_norm.le(&int(2)) {
        return Err(Error::Certificate(format!("‖z‖ = {z_norm} exceeds 2")));
    }
    let visits = visit_records(op, &z, &schedule, &classes, horizon)?;
    Ok(FhcCertificate { horizon, schedule, classes, z, z_norm, visits })
}

fn visit_records(
    op: &Operator,
    z: &SeqVector,
    schedule: &DensitySchedule,
    classes: &[ClassRecord],
    horizon: usize,
) -> Result<Vec<VisitRecord>> {
    let radii: Vec<Rational> = classes.iter().map(|c| pow2(-(c.p as i64) - 1)).collect();
    let mut hits: Vec<Vec<usize>> = vec![Vec::new(); classes.len()];
    let mut cur = z.clone();
    for n in 1..=horizon {
        cur = op.apply(&cur)?;
        for (i, c) in classes.iter().enumerate() {
            if op.norm(&cur.sub(&c.x_p)).lt(&radii[i]) {
                hits[i].push(n);
            }
        }
    }
    let hz = Rational::from_integer(horizon.max(1).into());
    Ok(classes
        .iter()
        .zip(radii)
        .zip(hits)
        .map(|((c, radius), visits)| {
            let required: Vec<usize> = schedule
                .members(c.p, horizon.saturating_sub(c.r_p))
                .map(|m| m + c.r_p)
                .filter(|n| (1..=horizon).contains(n))
                .collect();
            let contained = required.iter().all(|n| visits.binary_search(n).is_ok());
            let density = Rational::from_integer(visits.len().into()) / &hz;
            VisitRecord { p: c.p, radius, required, visits, contained, density }
        })
        .collect())
}

/// #{n ∈ [1, N] : ‖Tⁿz − center‖ < radius} / N; radius 0 counts exact hits.
pub fn visit_density(op: &Operator, z: &SeqVector, center: &SeqVector, radius: &Rational, n_max: usize) -> Result<Rational> {
    if n_max == 0 {
        return Err(Error::Domain("N must be positive".into()));
    }
    let mut cur = z.clone();
    let mut count = 0usize;
    for _ in 1..=n_max {
        cur = op.apply(&cur)?;
        let d = cur.sub(center);
        let hit = if radius.is_zero() { d.is_zero() } else { op.norm(&d).lt(radius) };
        if hit {
            count += 1;
        }
    }
    Ok(Rational::new(count.into(), n_max.into()))
}

impl fmt::Display for DefectCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl fmt::Display for ClassRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "p={} x_p={} ε={} δ={} R={} a={} ‖z_p‖={}",
            self.p,
            self.x_p,
            format_rational(&self.eps_p),
            format_rational(&self.delta_p),
            self.r_p,
            self.offset,
            self.z_norm
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::OperatorSpec;
    use crate::rational::rat;
    use crate::shadowing::{DoublingShiftConnector, RightInverseSolver};
    use crate::vector::{Domain, NormKind};

    fn e(i: i64) -> SeqVector {
        SeqVector::basis(Domain::Naturals, i)
    }

    fn doubling() -> Operator {
        Operator::new(OperatorSpec::doubling(), NormKind::One).unwrap()
    }

    #[test]
    fn chain_through_e1() {
        let t = doubling();
        let rec = chain_through(&t, &DoublingShiftConnector, &e(1), &rat(1, 8), &rat(1, 4), 1).unwrap();
        // 1/R < 1/16 asks for 17; the descent e1, 2e0 and 17 ramp steps needs 19
        assert_eq!((rec.up_steps, rec.down_steps), (5, 18));
        assert_eq!(rec.r, 19);
        assert_eq!(rec.point(19), &e(1));
        assert!(rec.point(0).is_zero() && rec.point(37).is_zero());
        let zero = chain_through(&t, &DoublingShiftConnector, &t.zero(), &rat(1, 2), &rat(1, 2), 1).unwrap();
        assert_eq!(zero.r, 9);
        assert!(zero.chain.points().iter().all(SeqVector::is_zero));
    }

    #[test]
    fn gamma_cases() {
        let t = doubling();
        let delta = rat(1, 4);
        let rec = chain_through(&t, &DoublingShiftConnector, &e(0), &rat(1, 8), &delta, 1).unwrap();
        let s = build_schedule(&[rec.size()]).unwrap();
        let prior = e(3).scale(&rat(1, 16));
        let g = gamma_pseudo_orbit(&t, &s, 0, &prior, &rec, &delta, 3 * s.period()).unwrap();
        let m = s.offsets()[0];
        let pts = g.pseudo_orbit.points();
        assert!(pts[m].is_zero());
        let n = m + rec.size() - 1;
        let w = t.power(&prior, n).unwrap();
        assert_eq!(pts[n], w.scale(&-Rational::new(1.into(), rec.r.into())));
        assert!(pts[n + 1].is_zero());
        assert_eq!(g.case_counts[DefectCase::Exit.index()], 3);
    }

    #[test]
    fn single_zero_class() {
        let t = doubling();
        let solver = RightInverseSolver::new(&t).unwrap();
        let cert = construct_fhc_vector(&solver, &DoublingShiftConnector, &[t.zero()], &rat(1, 2), None).unwrap();
        assert!(cert.z.is_zero());
        assert!(cert.z_norm.lt(&int(1)));
        assert!(cert.visits_ok());
    }

    #[test]
    fn one_target() {
        let t = doubling();
        let solver = RightInverseSolver::new(&t).unwrap();
        let cert = construct_fhc_vector(&solver, &DoublingShiftConnector, &[t.zero(), e(0)], &rat(1, 2), None).unwrap();
        assert_eq!(cert.schedule.sizes(), &[18, 34]);
        let c1 = &cert.classes[1];
        // property (b) at the first peak, recomputed from scratch
        let m = cert.schedule.offsets()[1];
        let partial = cert.classes[0].z_p.add(&c1.z_p);
        let v = t.norm(&t.power(&partial, m + c1.r_p).unwrap().sub(&e(0)));
        assert!(v.lt(&rat(1, 2)));
        assert_eq!(c1.peak_times[0], m + c1.r_p);
        assert!(cert.z_norm.lt(&int(2)));
        assert!(cert.visits_ok());
    }

    #[test]
    fn fixed_point_visits() {
        let t = doubling();
        assert_eq!(visit_density(&t, &e(0), &e(0), &rat(1, 100), 20).unwrap(), int(1));
        assert_eq!(visit_density(&t, &e(0), &e(0), &int(0), 20).unwrap(), int(1));
        assert_eq!(visit_density(&t, &e(1), &e(0), &int(0), 10).unwrap(), int(0));
    }
}
