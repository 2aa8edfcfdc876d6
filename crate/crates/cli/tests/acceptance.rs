//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero if any fails.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use chainrec::chains::{
    contraction_no_return_certificate, isometry_return_chain, projection_chain, validate_chain,
};
use chainrec::fhc::{build_schedule, construct_fhc_vector, lower_density_estimate};
use chainrec::operators::Block;
use chainrec::rational::{int, pow2, rat};
use chainrec::report::{fhc_log, CertificateLog};
use chainrec::shadowing::{
    l1_pseudo_orbit_defects, l1_table, mixing_witness, DoublingShiftConnector, RightInverseSolver,
};
use chainrec::{Domain, NormKind, Operator, OperatorSpec, PolyFunction, Rational, SeqVector, ShadowSolver};
use chainrec_cli::{run, Command, ExperimentConfig};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

const SEED: u64 = 20_240_601;

type Check = Result<String, String>;

struct Ctx {
    dir: tempfile::TempDir,
    /// First-run certificates.csv bytes for criteria 2, 3 and 7.
    artifacts: RefCell<BTreeMap<u8, Vec<u8>>>,
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e(i: i64) -> SeqVector {
    SeqVector::basis(Domain::Naturals, i)
}

fn doubling() -> Operator {
    Operator::new(OperatorSpec::doubling(), NormKind::One).unwrap()
}

fn run_cli(ctx: &Ctx, name: &str, command: Command, cfg: serde_json::Value) -> Result<Vec<u8>, String> {
    let cfg = ExperimentConfig::from_json(command, &cfg).map_err(|e| e.to_string())?;
    let out = ctx.dir.path().join(name);
    run(&cfg, &out).map_err(|e| e.to_string())?;
    std::fs::read(out.join("certificates.csv")).map_err(|e| e.to_string())
}

fn no_return_config() -> serde_json::Value {
    json!({"operator": {"op": "diagonal", "default": "1/2"}, "chain": "no_return", "x": "{0:1}",
           "delta": "1/10", "trials": 10000, "max_len": 12, "seed": SEED})
}

fn certify_config() -> serde_json::Value {
    json!({"deltas": ["1/4", "1/8", "1/16"], "trials": 1000, "horizon": 50, "seed": SEED})
}

fn fhc_config() -> serde_json::Value {
    json!({"targets": ["{}", "{0:1}", "{1:1}"], "margin": "1/2"})
}

fn isometry_return(_: &Ctx) -> Check {
    let t = Operator::new(OperatorSpec::rotation(rat(3, 5), rat(4, 5)), NormKind::Two).unwrap();
    let x = e(0);
    let c = isometry_return_chain(&t, &x, &rat(1, 4)).map_err(|e| e.to_string())?;
    ensure(c.len() == 10, format!("{} points", c.len()))?;
    ensure(c.first() == &x && c.last() == &x, "chain does not close at x")?;
    let bound = rat(2, 9);
    ensure(c.defects().iter().all(|d| d.le(&bound) && d.lt(&rat(1, 4))), "a defect exceeds 2/9")?;
    Ok(format!("10 points, max defect {} ≤ 2/9", c.max_defect()))
}

fn contraction_no_return(ctx: &Ctx) -> Check {
    let t = Operator::new(OperatorSpec::diagonal_const(rat(1, 2)), NormKind::One).unwrap();
    let cert = contraction_no_return_certificate(&t, &e(0), &rat(1, 10)).map_err(|e| e.to_string())?;
    ensure(cert.eps == rat(1, 5), format!("ε = {}", cert.eps))?;
    let csv = run_cli(ctx, "c2", Command::Chains, no_return_config())?;
    let text = String::from_utf8_lossy(&csv);
    let terminal = text.lines().filter(|l| l.starts_with("no-return terminal norm")).count();
    ensure(terminal == 10_000, format!("{terminal} trials logged"))?;
    ensure(!text.contains("FAILED"), "a trial failed")?;
    ctx.artifacts.borrow_mut().insert(2, csv);
    Ok("ε = 1/5; 10000 chains, none returned, analytic bound held in all".into())
}

fn right_inverse_shadowing(ctx: &Ctx) -> Check {
    let solver = RightInverseSolver::new(&doubling()).map_err(|e| e.to_string())?;
    for d in [rat(1, 4), rat(1, 8), rat(1, 16)] {
        ensure(solver.error_bound(&d) == d, "analytic bound differs from δ")?;
    }
    let csv = run_cli(ctx, "c3", Command::Certify, certify_config())?;
    let mut r = csv::Reader::from_reader(csv.as_slice());
    let mut count = 0;
    for rec in r.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let delta = chainrec::parse_rational(rec[1].split_whitespace().nth(1).unwrap()).unwrap();
        let err = chainrec::parse_rational(&rec[3]).map_err(|e| e.to_string())?;
        ensure(err <= delta, format!("{} has error {}", &rec[1], &rec[3]))?;
        ensure(err <= int(2) * &delta, "2δ violated")?;
        count += 1;
    }
    ensure(count == 3000, format!("{count} trials"))?;
    ctx.artifacts.borrow_mut().insert(3, csv);
    Ok("3000 pseudo orbits, every max error ≤ δ, zero 2δ violations".into())
}

fn mixing(_: &Ctx) -> Check {
    let t = doubling();
    let solver = RightInverseSolver::new(&t).map_err(|e| e.to_string())?;
    let lambda = rat(1, 10);
    let mut times = Vec::new();
    for k in 0..=20 {
        let w = mixing_witness(&solver, &DoublingShiftConnector, &e(0), &e(1), &lambda, k).map_err(|e| e.to_string())?;
        // recompute both memberships from z alone
        ensure(t.norm(&w.z.sub(&e(0))).lt(&lambda), format!("z_{k} ∉ U"))?;
        let end = t.power(&w.z, w.hitting_time).map_err(|e| e.to_string())?;
        ensure(t.norm(&end.sub(&e(1))).lt(&lambda), format!("T^n z_{k} ∉ V"))?;
        times.push(w.hitting_time);
    }
    ensure(times.windows(2).all(|w| w[1] == w[0] + 1), format!("hitting times {times:?}"))?;
    Ok(format!("21 witnesses, hitting times {}..={}", times[0], times[20]))
}

fn l1_nonshadowable(_: &Ctx) -> Check {
    let delta = rat(1, 10);
    let defects = l1_pseudo_orbit_defects(&delta, 200).map_err(|e| e.to_string())?;
    ensure(defects.len() == 200 && defects.iter().all(|d| *d == rat(1, 20)), "a defect differs from δ/2")?;
    let mut crossings = Vec::new();
    for g in [PolyFunction::zero(), PolyFunction::constant(int(1))] {
        let rows = l1_table(&delta, 200, &g).map_err(|e| e.to_string())?;
        // independent partial sums
        let mut acc = Rational::from_integer(0.into());
        for r in &rows {
            let k = r.n as i64;
            acc += (int(1) - pow2(-k)) / int(k);
            ensure(r.orbit_norm == &delta * &acc, format!("orbit norm differs at n = {k}"))?;
        }
        ensure(rows.windows(2).all(|w| w[1].lower_bound > w[0].lower_bound), "lower bound not increasing")?;
        let n = rows.iter().find(|r| r.lower_bound > rat(1, 4)).map(|r| r.n).ok_or("never exceeds 1/4")?;
        crossings.push(n);
    }
    Ok(format!("defects all 1/20; bound exceeds 1/4 at n = {} (g = 0) and n = {} (g = 1)", crossings[0], crossings[1]))
}

fn density_schedule(_: &Ctx) -> Check {
    let s = build_schedule(&[2, 4]).map_err(|e| e.to_string())?;
    ensure(s.offsets() == [2, 8] && s.period() == 14, "wrong offsets or period")?;
    s.verify(3 * 14).map_err(|e| e.to_string())?;
    // members over [0, 3L] from a_p + jL by hand: Δ_1 = {2, 16, 30}, Δ_2 = {8, 22, 36}
    let members = [(2, 0), (8, 1), (16, 0), (22, 1), (30, 0), (36, 1)];
    let sizes = [2usize, 4];
    for p in 0..2 {
        let expected: Vec<usize> = members.iter().filter(|m| m.1 == p).map(|m| m.0).collect();
        ensure(s.members(p, 42).collect::<Vec<_>>() == expected, format!("members of class {p}"))?;
        ensure((0..=42).filter(|n| s.contains(p, *n)).count() == 3, "membership rule")?;
    }
    for (i, &(n, p)) in members.iter().enumerate() {
        for &(m, q) in &members[i + 1..] {
            ensure(m - n >= sizes[p] + sizes[q], format!("{n} and {m} too close"))?;
        }
    }
    ensure(s.density() == rat(1, 14), "density")?;
    for p in 0..2 {
        let est = lower_density_estimate(|n| s.contains(p, n), 14 * 100);
        ensure(est <= rat(1, 14) && rat(1, 14) - est < rat(1, 700), "density estimate")?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for _ in 0..100 {
        let classes = 1 + (rng.next_u32() % 4) as usize;
        let mut acc = 0;
        let sizes: Vec<usize> = (0..classes)
            .map(|_| {
                acc += 2 * (1 + (rng.next_u32() % 10) as usize);
                acc
            })
            .collect();
        let s = build_schedule(&sizes).map_err(|e| e.to_string())?;
        s.verify(3 * s.period()).map_err(|e| format!("{sizes:?}: {e}"))?;
    }
    Ok("a = (2, 8), L = 14, exhaustive over [0, 42]; 100 random size lists verified".into())
}

fn fhc(ctx: &Ctx) -> Check {
    let t = doubling();
    let solver = RightInverseSolver::new(&t).map_err(|e| e.to_string())?;
    let targets = vec![t.zero(), e(0), e(1)];
    let cert = construct_fhc_vector(&solver, &DoublingShiftConnector, &targets, &rat(1, 2), None)
        .map_err(|e| e.to_string())?;
    let l = cert.schedule.period();
    ensure(cert.horizon == 5 * l, "horizon is not 5L")?;
    for c in &cert.classes {
        let p = c.p as i64;
        ensure(c.delta_p == pow2(-p - 1), format!("δ_{p} = {}", c.delta_p))?;
        ensure(c.z_norm.lt(&pow2(-p)) && c.worst_b.lt(&pow2(-p)) && c.worst_c.lt(&pow2(-p)), format!("class {p}"))?;
    }
    let floor = Rational::new(1.into(), (2 * l).into());
    for v in &cert.visits {
        ensure(v.radius == pow2(-(v.p as i64) - 1), "radius")?;
        ensure(v.contained, format!("class {}: visits miss (Δ_p + R_p) ∩ [1, H]", v.p))?;
        ensure(v.density >= floor, format!("class {}: density {}", v.p, v.density))?;
    }
    ensure(cert.z_norm.le(&int(2)), "‖z‖ > 2")?;
    let mut log = CertificateLog::default();
    fhc_log(&cert, &mut log);
    ctx.artifacts.borrow_mut().insert(7, log.to_csv().map_err(|e| e.to_string())?.into_bytes());
    let rs: Vec<usize> = cert.classes.iter().map(|c| c.r_p).collect();
    Ok(format!("R = {rs:?}, L = {l}, H = {}; (a), (b), (c) and visit sets verified", cert.horizon))
}

fn projection(_: &Ctx) -> Check {
    let spec = OperatorSpec::direct_sum(OperatorSpec::diagonal_const(rat(1, 2)), OperatorSpec::Identity, 2);
    let t = Operator::new(spec, NormKind::Infinity).unwrap();
    let eps = rat(1, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut grid = |scale: &Rational| -> Rational { scale * Rational::new(((rng.next_u32() % 9) as i64 - 4).into(), 5.into()) };
    for trial in 0..200 {
        let start_local = SeqVector::from_entries(Domain::Naturals, [(0, grid(&int(1))), (1, grid(&int(1)))]).unwrap();
        let mut points = vec![t.embed_block(&start_local, Block::Right).map_err(|e| e.to_string())?];
        let len = 2 + trial % 10;
        for step in 0..len {
            let tx = t.apply(points.last().unwrap()).map_err(|e| e.to_string())?;
            let right = SeqVector::from_entries(Domain::Naturals, [(0, grid(&eps)), (1, grid(&eps))]).unwrap();
            let left = if step + 1 == len {
                t.block_component(&tx, Block::Left).map_err(|e| e.to_string())?.scale(&int(-1))
            } else {
                SeqVector::from_entries(Domain::Naturals, [(0, grid(&rat(1, 16))), (1, grid(&rat(1, 16)))]).unwrap()
            };
            let d = t
                .embed_block(&left, Block::Left)
                .and_then(|l| Ok(l.add(&t.embed_block(&right, Block::Right)?)))
                .map_err(|e| e.to_string())?;
            points.push(tx.add(&d));
        }
        let c = validate_chain(&t, points, eps.clone()).map_err(|e| format!("mixed chain {trial}: {e}"))?;
        projection_chain(&t, &c, &int(1), Block::Right).map_err(|e| format!("projection {trial}: {e}"))?;
    }
    let left = t.block(Block::Left).map_err(|e| e.to_string())?;
    let cert = contraction_no_return_certificate(&left, &e(0), &rat(1, 10)).map_err(|e| e.to_string())?;
    ensure(cert.eps == rat(1, 5), "ε on the contraction block")?;
    let rep = cert.random_search(&left, 2000, 12, 8, SEED).map_err(|e| e.to_string())?;
    ensure(rep.returned == 0 && rep.bound_violations == 0, "a chain returned on the contraction block")?;
    Ok("200 mixed chains project to valid chains at α = 1; no-return holds on the contraction block".into())
}

fn determinism(ctx: &Ctx) -> Check {
    let first = ctx.artifacts.borrow().clone();
    for id in [2u8, 3, 7] {
        ensure(first.contains_key(&id), format!("criterion {id} produced no artifact"))?;
    }
    let again = [
        (2u8, run_cli(ctx, "c9-2", Command::Chains, no_return_config())?),
        (3, run_cli(ctx, "c9-3", Command::Certify, certify_config())?),
        (7, run_cli(ctx, "c9-7", Command::Fhc, fhc_config())?),
    ];
    for (id, bytes) in again {
        ensure(bytes == first[&id], format!("criterion {id} CSV differs on rerun"))?;
    }
    Ok("criteria 2, 3, 7 rerun through the CLI with byte-identical certificates.csv".into())
}

fn main() -> ExitCode {
    let ctx = Ctx { dir: tempfile::tempdir().expect("temp dir"), artifacts: RefCell::new(BTreeMap::new()) };
    type Crit = (u8, &'static str, u64, fn(&Ctx) -> Check);
    let criteria: [Crit; 9] = [
        (1, "isometry return chain", 1, isometry_return),
        (2, "contraction no-return", 30, contraction_no_return),
        (3, "right-inverse shadowing", 60, right_inverse_shadowing),
        (4, "mixing witnesses", 30, mixing),
        (5, "L1 non-shadowability", 10, l1_nonshadowable),
        (6, "density schedule", 10, density_schedule),
        (7, "frequently hypercyclic vector", 600, fhc),
        (8, "projection and decomposition", 10, projection),
        (9, "determinism", 660, determinism),
    ];
    let mut failed = 0;
    for (id, name, limit, f) in criteria {
        let start = Instant::now();
        let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| f(&ctx)))
            .unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        let within = took <= Duration::from_secs(limit);
        let (tag, detail) = match (&result, within) {
            (Ok(d), true) => ("PASS", d.clone()),
            (Ok(d), false) => ("FAIL", format!("over the {limit} s limit; {d}")),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("[{tag}] {id}. {name} ({:.2} s, limit {limit} s): {detail}", took.as_secs_f64());
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
