use chainrec::fhc::{build_schedule, construct_fhc_vector, dense_seq_generator, dense_seq_index, visit_density};
use chainrec::rational::{int, pow2, rat};
use chainrec::shadowing::{DoublingShiftConnector, RightInverseSolver, ShadowSolver};
use chainrec::{Domain, NormKind, Operator, OperatorSpec, SeqVector};

fn e(i: i64) -> SeqVector {
    SeqVector::basis(Domain::Naturals, i)
}

#[test]
fn two_targets_on_the_doubling_shift() {
    let t = Operator::new(OperatorSpec::doubling(), NormKind::One).unwrap();
    let solver = RightInverseSolver::new(&t).unwrap();
    let targets = vec![t.zero(), e(0), e(1)];
    let cert = construct_fhc_vector(&solver, &DoublingShiftConnector, &targets, &rat(1, 2), None).unwrap();

    let rs: Vec<usize> = cert.classes.iter().map(|c| c.r_p).collect();
    assert_eq!(rs, vec![9, 17, 35]);
    assert_eq!(cert.schedule.sizes(), &[18, 34, 70]);
    assert_eq!(cert.schedule.offsets(), &[18, 70, 174]);
    assert_eq!(cert.schedule.period(), 262);
    assert_eq!(cert.horizon, 5 * 262);

    for c in &cert.classes {
        let p = c.p as i64;
        assert_eq!(c.delta_p, pow2(-p - 1));
        assert_eq!(c.delta_p, solver.modulus(&pow2(-p)) / int(2));
        assert!(c.z_norm.lt(&pow2(-p)));
        assert!(c.worst_b.lt(&pow2(-p)));
        assert!(c.worst_c.lt(&pow2(-p)));
        assert!(c.c_checked > 0);
        assert_eq!(c.peak_times.len(), cert.schedule.members(c.p, cert.horizon - c.r_p).count());
    }
    assert!(cert.z_norm.lt(&int(2)));
    assert!(cert.visits_ok());
    for v in &cert.visits {
        assert!(v.required.len() >= 4);
        let d = visit_density(&t, &cert.z, &cert.classes[v.p].x_p, &v.radius, cert.horizon).unwrap();
        assert_eq!(d, v.density);
    }
}

#[test]
fn schedule_for_two_sizes() {
    let s = build_schedule(&[2, 4]).unwrap();
    assert_eq!((s.offsets(), s.period()), (&[2usize, 8][..], 14));
    s.verify(42).unwrap();
}

#[test]
fn enumeration_starts_at_the_origin() {
    assert!(dense_seq_generator(0).is_zero());
    assert_eq!(dense_seq_index(&e(0)), Some(1));
    assert_eq!(dense_seq_generator(dense_seq_index(&e(1)).unwrap()), e(1));
}
