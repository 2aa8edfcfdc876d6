use chainrec::chains::{
    contraction_no_return_certificate, isometry_return_chain, span_connect_chain, span_connect_from_origin,
    validate_chain, ChainFactory, IsometryFactory,
};
use chainrec::fhc::{construct_fhc_vector, dense_targets};
use chainrec::rational::{format_rational, int};
use chainrec::report::{fhc_log, fhc_tables, short_norm, Table};
use chainrec::shadowing::{
    l1_pseudo_orbit_defects, l1_table, mixing_witness, random_pseudo_orbit, solver_for, validate_pseudo_orbit,
    DoublingShiftConnector,
};
use chainrec::{Chain, Operator, OperatorSpec, PolyFunction, Rational};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{CliError, Command, ExperimentConfig, Outcome};

pub fn dispatch(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    match cfg.command {
        Command::Chains => chains(cfg),
        Command::Shadow => shadow(cfg),
        Command::Mixing => mixing(cfg),
        Command::L1demo => l1demo(cfg),
        Command::Fhc => fhc(cfg),
        Command::Certify => certify(cfg),
    }
}

fn operator(cfg: &ExperimentConfig) -> Result<Operator, CliError> {
    Ok(Operator::new(cfg.operator.clone(), cfg.norm)?)
}

/// The connector for the doubling shift, the isometry factory for certified isometries.
pub fn factory_for(op: &Operator) -> Result<Box<dyn ChainFactory>, CliError> {
    if op.spec() == &OperatorSpec::DoublingShiftFixedLine {
        return Ok(Box::new(DoublingShiftConnector));
    }
    let one = Rational::from_integer(1.into());
    if op.norm_bound() == &one && op.inverse_norm_bound() == Some(&one) {
        return Ok(Box::new(IsometryFactory));
    }
    Err(CliError::Capability(format!("no chain factory for `{}`", op.spec().name())))
}

fn chain_table(title: &str, c: &Chain) -> Table {
    let mut t = Table::new(title, &["k", "point", "defect to next"]);
    for (k, p) in c.points().iter().enumerate() {
        let d = c.defects().get(k).map(|d| d.to_string()).unwrap_or_default();
        t.push([k.to_string(), p.to_string(), d]);
    }
    t
}

fn log_chain(out: &mut Outcome, name: &str, c: &Chain) {
    let eps = format_rational(c.epsilon());
    for (k, d) in c.defects().iter().enumerate() {
        out.log.push("chain step defect", name, k, d, &eps, d.lt(c.epsilon()));
    }
}

fn chains(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let op = operator(cfg)?;
    let kind = cfg.string("chain", "isometry_return")?;
    let mut out = Outcome::new(format!("Chains: {kind}"));
    match kind.as_str() {
        "isometry_return" => {
            let x = cfg.vector("x", None)?;
            let eps = cfg.rational("eps", None)?;
            let c = isometry_return_chain(&op, &x, &eps)?;
            log_chain(&mut out, "return chain", &c);
            let closes = c.first() == &x && c.last() == &x;
            out.log.push("chain closes at x", "return chain", c.len() - 1, c.last(), &x, closes);
            out.notes.push(format!(
                "Return chain x_k = T^k x + (k/n)(T^(k-n) x - T^k x) with n = {}; each defect is at most 2‖x‖/n.",
                c.len() - 1
            ));
            out.tables.push(chain_table("Return chain", &c));
        }
        "span_connect" | "to_origin" | "from_origin" => {
            let x = cfg.vector("x", None)?;
            let eps = cfg.rational("eps", None)?;
            let factory = factory_for(&op)?;
            let c = match kind.as_str() {
                "span_connect" => span_connect_chain(&op, &x, &cfg.rational("lambda", None)?, &eps, factory.as_ref())?,
                "to_origin" => factory.to_origin(&op, &x, &eps)?,
                _ => span_connect_from_origin(&op, &x, &eps, factory.as_ref())?,
            };
            // re-validate from the points alone
            let again = validate_chain(&op, c.points().to_vec(), eps.clone())?;
            log_chain(&mut out, &kind, &again);
            out.tables.push(chain_table("Chain", &again));
        }
        "no_return" => {
            let x = cfg.vector("x", None)?;
            let delta = cfg.rational("delta", None)?;
            let seed = cfg.require_seed()?;
            let cert = contraction_no_return_certificate(&op, &x, &delta)?;
            let trials = cfg.usize("trials", 1000)?;
            let max_len = cfg.usize("max_len", 12)?;
            let grid = cfg.usize("grid_den", 8)? as u32;
            let rep = cert.random_search(&op, trials, max_len, grid, seed)?;
            out.notes.push(format!(
                "ε = (‖x‖ − ‖Tx‖ − δ)(1 − ‖T‖) = {}; slack ε/(1 − ‖T‖) = {}.",
                format_rational(&cert.eps),
                format_rational(&cert.slack())
            ));
            let xn = op.norm(&x);
            for (i, t) in rep.terminal_norms.iter().enumerate() {
                out.log.push("no-return terminal norm", format!("trial {i}"), i, t, &xn, t < &xn);
            }
            out.log.push("no-return returns", "search", trials, rep.returned, 0, rep.returned == 0);
            out.log.push("no-return bound violations", "search", trials, rep.bound_violations, 0, rep.bound_violations == 0);
        }
        other => return Err(CliError::Parse(format!("unknown chain kind `{other}`"))),
    }
    Ok(out)
}

fn shadow(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let op = operator(cfg)?;
    let solver = solver_for(&op)?;
    let delta = cfg.rational("delta", None)?;
    let po = match cfg.vectors("points")? {
        Some(points) => validate_pseudo_orbit(&op, points, delta.clone())?,
        None => {
            let seed = cfg.require_seed()?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let start = cfg.vector("start", Some("{}"))?;
            let horizon = cfg.horizon.unwrap_or(20);
            let dims = cfg.usize("dims", 3)? as i64;
            let grid = cfg.usize("grid_den", 4)? as i64;
            random_pseudo_orbit(&op, &start, &delta, horizon, dims, grid, &mut rng)?
        }
    };
    let cert = solver.shadow(&po)?;
    cert.verify(&op, &po)?;
    let mut out = Outcome::new(format!("Shadowing with the {} solver", solver.name()));
    let bound = format_rational(&cert.analytic_bound);
    let mut t = Table::new("Shadow errors", &["n", "pseudo orbit", "error"]);
    for (n, e) in cert.errors.iter().enumerate() {
        out.log.push("shadow error", "pseudo orbit", n, e, &bound, e.le(&cert.analytic_bound));
        t.push([n.to_string(), po.points()[n].to_string(), e.to_string()]);
    }
    out.notes.push(format!(
        "δ = {}, horizon {}, shadow z = {}, max error {} against the bound {}.",
        format_rational(&delta),
        po.horizon(),
        cert.shadow,
        cert.max_error,
        bound
    ));
    out.tables.push(t);
    Ok(out)
}

fn certify(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let op = operator(cfg)?;
    let solver = solver_for(&op)?;
    let seed = cfg.require_seed()?;
    let deltas = cfg.rationals("deltas", &["1/4", "1/8", "1/16"])?;
    let trials = cfg.usize("trials", 100)?;
    let horizon = cfg.horizon.unwrap_or(50);
    let dims = cfg.usize("dims", 3)? as i64;
    let grid = cfg.usize("grid_den", 4)? as i64;
    let start = cfg.vector("start", Some("{}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Outcome::new(format!("Shadowing certificates with the {} solver", solver.name()));
    let mut summary = Table::new("Summary", &["delta", "trials", "analytic bound", "max error", "2 delta violations"]);
    for delta in &deltas {
        let bound = solver.error_bound(delta);
        let two_delta = int(2) * delta;
        let mut worst = None;
        let mut violations = 0;
        for i in 0..trials {
            let po = random_pseudo_orbit(&op, &start, delta, horizon, dims, grid, &mut rng)?;
            let cert = solver.shadow(&po)?;
            cert.verify(&op, &po)?;
            let ok = cert.max_error.le(&bound) && cert.max_error.le(&two_delta);
            if !cert.max_error.le(&two_delta) {
                violations += 1;
            }
            out.log.push(
                "shadow max error",
                format!("delta {} trial {i}", format_rational(delta)),
                horizon,
                &cert.max_error,
                format_rational(&bound),
                ok,
            );
            if worst.as_ref().is_none_or(|w| &cert.max_error > w) {
                worst = Some(cert.max_error);
            }
        }
        summary.push([
            format_rational(delta),
            trials.to_string(),
            format_rational(&bound),
            worst.map(|w| w.to_string()).unwrap_or_default(),
            violations.to_string(),
        ]);
    }
    out.notes.push(format!(
        "Seeded δ-pseudo orbits (true orbit plus grid perturbations of norm ≤ δ on the first {dims} coordinates), horizon {horizon}. Each shadow is recomputed by direct iteration before it is logged."
    ));
    out.tables.push(summary);
    Ok(out)
}

fn mixing(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let op = operator(cfg)?;
    let solver = solver_for(&op)?;
    let factory = factory_for(&op)?;
    let x = cfg.vector("x", Some("{0:1}"))?;
    let y = cfg.vector("y", Some("{1:1}"))?;
    let lambda = cfg.rational("lambda", Some("1/10"))?;
    let k_max = cfg.usize("k_max", 20)?;
    let mut out = Outcome::new("Mixing witnesses");
    let lam = format_rational(&lambda);
    let mut t = Table::new("Witnesses", &["k", "hitting time", "‖z − x‖", "‖T^n z − y‖", "z"]);
    let mut times = Vec::new();
    for k in 0..=k_max {
        let w = mixing_witness(solver.as_ref(), factory.as_ref(), &x, &y, &lambda, k)?;
        out.log.push("mixing start in U", format!("k {k}"), 0, &w.start_error, &lam, w.start_error.lt(&lambda));
        out.log.push("mixing end in V", format!("k {k}"), w.hitting_time, &w.end_error, &lam, w.end_error.lt(&lambda));
        t.push([k.to_string(), w.hitting_time.to_string(), w.start_error.to_string(), w.end_error.to_string(), w.z.to_string()]);
        times.push(w.hitting_time);
    }
    let interval = times.windows(2).all(|w| w[1] == w[0] + 1);
    out.log.push(
        "hitting times form an interval",
        "witnesses",
        times.len(),
        format!("{}..={}", times[0], times[times.len() - 1]),
        "consecutive",
        interval,
    );
    out.notes.push(format!(
        "U = ball(x, {lam}), V = ball(y, {lam}) with x = {x}, y = {y}. Each z_k shadows the pseudo orbit x → 0, k zeros, 0 → y at ε = λ/2."
    ));
    out.tables.push(t);
    Ok(out)
}

fn l1demo(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let delta = cfg.rational("delta", Some("1/10"))?;
    let n_max = cfg.usize("n_max", 200)?;
    let g = PolyFunction::new(cfg.rationals("g", &[])?);
    let threshold = cfg.rational("threshold", Some("1/4"))?;
    let mut out = Outcome::new("Non-shadowable pseudo orbit on L¹[1/2, 1]");
    let half = &delta / int(2);
    for (i, d) in l1_pseudo_orbit_defects(&delta, n_max)?.iter().enumerate() {
        out.log.push("l1 step defect", "f_n", i + 1, format_rational(d), format_rational(&half), d == &half);
    }
    let rows = l1_table(&delta, n_max, &g)?;
    let mut t = Table::new("Lower bounds", &["n", "‖f_n‖₁", "bound on ‖xⁿg‖₁", "lower bound"]);
    for (i, r) in rows.iter().enumerate() {
        if i > 0 {
            let prev = &rows[i - 1].orbit_norm;
            out.log.push("l1 orbit norm increasing", "f_n", r.n, format_rational(&r.orbit_norm), format_rational(prev), &r.orbit_norm > prev);
        }
        t.push([r.n.to_string(), format_rational(&r.orbit_norm), format_rational(&r.g_bound), format_rational(&r.lower_bound)]);
    }
    let crossing = rows.iter().find(|r| r.lower_bound > threshold).map(|r| r.n);
    out.log.push(
        "l1 lower bound exceeds threshold",
        format!("g = {g}"),
        crossing.map(|n| n.to_string()).unwrap_or_else(|| "none".into()),
        crossing.map(|n| format_rational(&rows[n - 1].lower_bound)).unwrap_or_default(),
        format_rational(&threshold),
        crossing.is_some(),
    );
    out.notes.push(format!(
        "f_n = δ(1 + x + … + x^(n−1)) with δ = {} has step defect δ/2, while ‖Tⁿg − f_n‖₁ ≥ ‖f_n‖₁ − ‖xⁿg‖₁ grows without bound.",
        format_rational(&delta)
    ));
    out.tables.push(t);
    Ok(out)
}

fn fhc(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let op = operator(cfg)?;
    let solver = solver_for(&op)?;
    let factory = factory_for(&op)?;
    let targets = match cfg.vectors("targets")? {
        Some(t) => t,
        None => dense_targets(cfg.usize("p_max", 2)?),
    };
    let margin = cfg.rational("margin", Some("1/2"))?;
    let cert = construct_fhc_vector(solver.as_ref(), factory.as_ref(), &targets, &margin, cfg.horizon)?;
    let mut out = Outcome::new("Frequently hypercyclic vector");
    out.notes.push(format!(
        "Finite-horizon witness: properties (a), (b), (c) and the visit counts are checked at every index up to H = {}. The construction is certified there; the statement for all n is not.",
        cert.horizon
    ));
    out.notes.push(format!(
        "z has {} nonzero entries, max index {}, ‖z‖ = {}.",
        cert.z.support_len(),
        cert.z.max_index().unwrap_or(0),
        short_norm(&cert.z_norm)
    ));
    fhc_log(&cert, &mut out.log);
    out.tables.extend(fhc_tables(&cert));
    Ok(out)
}
