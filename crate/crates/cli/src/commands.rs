use choquet_core::capacity::{
    check_properties, random, Capacity, DiscreteCapacity, Kernel, Property, Subset,
};
use choquet_core::continuous::{choquet_integral_real, KernelProduct};
use choquet_core::discrete::{
    choquet_integral, layer_cake_integral, property_suite, CheckOutcome, DiscreteFunction,
};
use choquet_core::estimates::{chebyshev_check, error_row, modulus_window, ErrorRow};
use choquet_core::operators::{comparison_pair, Operator, OperatorRegistry};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{CapacityConfig, ExperimentConfig};
use crate::error::CliError;
use crate::table::{num, Table};

/// Slack for `|T_n(f)(x) − f(x)| ≤ bound` in the bounds suite.
pub const BOUND_TOL: f64 = 1e-6;
/// Slack for exact capacity identities.
const IDENTITY_TOL: f64 = 1e-12;
/// Largest ground set drawn by the randomized suites.
const MAX_RANDOM_SIZE: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Capacity,
    Integral,
    Chebyshev,
    Bounds,
    All,
}

pub fn integrate(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    if let CapacityConfig::Discrete(rule) = &cfg.capacity {
        let mu = rule.build()?;
        let x = DiscreteFunction::new(cfg.values.clone().unwrap_or_default())?;
        let sorted = choquet_integral(&x, &mu)?;
        let cake = layer_cake_integral(&x, &mu, &cfg.quadrature)?;
        let mut t = Table::new(&["capacity", "size", "sorted", "layer_cake", "difference"]);
        t.push(vec![
            mu.describe(),
            mu.ground_size().to_string(),
            num(sorted),
            num(cake),
            num(sorted - cake),
        ]);
        return Ok(t);
    }
    let spec = cfg.settings().capacity;
    let cases = grid_cases(cfg);
    let rows = cases
        .par_iter()
        .map(|&(n, x)| {
            let nf = n as f64;
            let kernel =
                Kernel::new(cfg.kernel, nf, x).map_err(|e| CliError::Config(e.to_string()))?;
            let mu = spec.resolve(nf, x)?;
            let closed = KernelProduct::new(cfg.function.clone(), kernel)?;
            let generic = KernelProduct::with_generic_solver(cfg.function.clone(), kernel)?;
            let a = choquet_integral_real(&closed, &mu, &cfg.quadrature)?.value;
            let b = choquet_integral_real(&generic, &mu, &cfg.quadrature)?.value;
            Ok(vec![
                format!("{:?}", cfg.kernel).to_lowercase(),
                spec.name(),
                cfg.function.name().to_string(),
                n.to_string(),
                num(x),
                num(a),
                num(b),
                num(a - b),
            ])
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut t = Table::new(&[
        "kernel",
        "capacity",
        "function",
        "n",
        "x",
        "level_set_closed",
        "level_set_generic",
        "difference",
    ]);
    rows.into_iter().for_each(|r| t.push(r));
    Ok(t)
}

fn grid_cases(cfg: &ExperimentConfig) -> Vec<(usize, f64)> {
    let xs = cfg.x_grid.points();
    cfg.n_list
        .iter()
        .flat_map(|&n| xs.iter().map(move |&x| (n, x)))
        .collect()
}

fn error_rows(op: &dyn Operator, cfg: &ExperimentConfig) -> Result<Vec<ErrorRow>, CliError> {
    let window = modulus_window(op.domain(), &cfg.x_grid.points(), &cfg.function);
    grid_cases(cfg)
        .par_iter()
        .map(|&(n, x)| Ok(error_row(op, &cfg.function, n, x, window)?))
        .collect()
}

pub fn operator(cfg: &ExperimentConfig, registry: &OperatorRegistry) -> Result<Table, CliError> {
    let op = registry.build(&cfg.operator, &cfg.settings())?;
    let rows = error_rows(op.as_ref(), cfg)?;
    let mut t = Table::new(&[
        "operator",
        "capacity",
        "function",
        "n",
        "x",
        "value",
        "f",
        "abs_error",
        "bound",
    ]);
    let capacity = capacity_label(op.as_ref(), cfg);
    for r in rows {
        t.push(vec![
            op.name().to_string(),
            capacity.clone(),
            cfg.function.name().to_string(),
            r.n.to_string(),
            num(r.x),
            num(r.value),
            num(r.f_x),
            num(r.abs_error),
            num(r.bound),
        ]);
    }
    Ok(t)
}

fn capacity_label(op: &dyn Operator, cfg: &ExperimentConfig) -> String {
    match op.name() {
        "picard_choquet" | "weierstrass_choquet" => cfg.capacity.name(),
        "bernstein_choquet" => "bernstein_perturbed".into(),
        _ => "lebesgue".into(),
    }
}

pub fn compare(cfg: &ExperimentConfig, registry: &OperatorRegistry) -> Result<Table, CliError> {
    let (classical, choquet) = comparison_pair(&cfg.operator)
        .ok_or_else(|| CliError::Config(format!("no comparison pair for `{}`", cfg.operator)))?;
    let classical = registry.build(classical, &cfg.settings())?;
    let choquet = registry.build(choquet, &cfg.settings())?;
    let rows = error_rows(choquet.as_ref(), cfg)?;
    let baseline = grid_cases(cfg)
        .par_iter()
        .map(|&(n, x)| Ok(classical.apply(&cfg.function, n, x)?))
        .collect::<Result<Vec<f64>, CliError>>()?;
    let mut t = Table::new(&[
        "n",
        "x",
        "f",
        "classical",
        "choquet",
        "err_classical",
        "err_choquet",
        "bound",
    ]);
    for (r, c) in rows.into_iter().zip(baseline) {
        t.push(vec![
            r.n.to_string(),
            num(r.x),
            num(r.f_x),
            num(c),
            num(r.value),
            num((c - r.f_x).abs()),
            num(r.abs_error),
            num(r.bound),
        ]);
    }
    Ok(t)
}

/// Rows of a verification report; violations make the run fail.
pub struct Report {
    pub table: Table,
    pub violations: usize,
}

impl Report {
    fn new() -> Self {
        Report {
            table: Table::new(&[
                "suite",
                "check",
                "evaluated",
                "violations",
                "worst_gap",
                "witness",
            ]),
            violations: 0,
        }
    }

    fn add(&mut self, suite: &str, c: &Outcome) {
        if c.evaluated == 0 {
            return;
        }
        self.violations += c.violations;
        self.table.push(vec![
            suite.to_string(),
            c.name.clone(),
            c.evaluated.to_string(),
            c.violations.to_string(),
            num(c.worst_gap),
            c.witness.clone().unwrap_or_default(),
        ]);
    }
}

/// Counter for one named check, keeping the first witness.
struct Outcome {
    name: String,
    evaluated: usize,
    violations: usize,
    worst_gap: f64,
    witness: Option<String>,
}

impl Outcome {
    fn new(name: &str) -> Self {
        Outcome {
            name: name.into(),
            evaluated: 0,
            violations: 0,
            worst_gap: 0.0,
            witness: None,
        }
    }

    fn record(&mut self, gap: f64, tol: f64, witness: impl FnOnce() -> String) {
        self.evaluated += 1;
        self.worst_gap = self.worst_gap.max(gap);
        if gap > tol {
            self.violations += 1;
            self.witness.get_or_insert_with(witness);
        }
    }

    fn absorb(&mut self, c: &CheckOutcome) {
        self.evaluated += c.evaluated;
        self.violations += c.violations;
        self.worst_gap = self.worst_gap.max(c.worst_gap);
        if self.witness.is_none() {
            self.witness = c.witness.clone();
        }
    }
}

fn random_capacity<R: Rng>(rng: &mut R) -> DiscreteCapacity {
    let size = rng.gen_range(1..=MAX_RANDOM_SIZE);
    match rng.gen_range(0..3) {
        0 => random::monotone(rng, size),
        1 => random::submodular(rng, size),
        _ => random::possibility(rng, size),
    }
}

fn injected(cfg: &ExperimentConfig) -> Result<Option<DiscreteCapacity>, CliError> {
    match &cfg.capacity {
        CapacityConfig::Discrete(rule) => Ok(Some(rule.build()?)),
        _ => Ok(None),
    }
}

fn rng_for(cfg: &ExperimentConfig, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    rng
}

pub fn verify(
    suite: Suite,
    cfg: &ExperimentConfig,
    registry: &OperatorRegistry,
) -> Result<Report, CliError> {
    let mut report = Report::new();
    let run = |s: Suite| suite == s || suite == Suite::All;
    if run(Suite::Capacity) {
        for c in capacity_suite(cfg)? {
            report.add("capacity", &c);
        }
    }
    if run(Suite::Integral) {
        for c in integral_suite(cfg)? {
            report.add("integral", &c);
        }
    }
    if run(Suite::Chebyshev) {
        report.add("chebyshev", &chebyshev_suite(cfg)?);
    }
    if run(Suite::Bounds) {
        report.add("bounds", &bounds_suite(cfg, registry)?);
    }
    Ok(report)
}

fn capacity_suite(cfg: &ExperimentConfig) -> Result<Vec<Outcome>, CliError> {
    let mut rng = rng_for(cfg, 1);
    let mut monotone = Outcome::new("monotone");
    let mut submodular = Outcome::new("generated_submodular");
    let mut sub_implies = Outcome::new("submodular_implies_subadditive");
    let mut involution = Outcome::new("dual_involution");
    let mut dual_below = Outcome::new("dual_below_subadditive");
    let mut capacities: Vec<(DiscreteCapacity, bool)> = Vec::new();
    if cfg.trials > 0 {
        if let Some(mu) = injected(cfg)? {
            capacities.push((mu, false));
        }
    }
    for _ in 0..cfg.trials {
        let size = rng.gen_range(1..=MAX_RANDOM_SIZE);
        let kind = rng.gen_range(0..3);
        let mu = match kind {
            0 => random::monotone(&mut rng, size),
            1 => random::submodular(&mut rng, size),
            _ => random::possibility(&mut rng, size),
        };
        capacities.push((mu, kind == 1));
    }
    for (mu, drawn_submodular) in &capacities {
        let p = check_properties(mu).map_err(|e| CliError::Config(e.to_string()))?;
        let label = mu.describe();
        let gap = p.witness(Property::Monotone).map_or(0.0, |v| v.lhs - v.rhs);
        monotone.record(gap, 0.0, || {
            let v = p.witness(Property::Monotone).expect("witness");
            format!("{label}: {v}")
        });
        if *drawn_submodular {
            let gap = p
                .witness(Property::Submodular)
                .map_or(0.0, |v| v.lhs - v.rhs);
            submodular.record(gap, 0.0, || format!("{label} drawn submodular but is not"));
        }
        if p.submodular {
            let gap = if p.subadditive { 0.0 } else { 1.0 };
            sub_implies.record(gap, 0.0, || {
                format!("{label}: submodular yet not subadditive")
            });
        }
        let dual = mu.dual();
        let twice = dual.dual();
        let size = mu.ground_size();
        let mut inv_gap: f64 = 0.0;
        let mut below_gap: f64 = 0.0;
        let mut below_at = Subset::default();
        for a in Subset::all(size) {
            inv_gap = inv_gap.max((twice.measure(a) - mu.measure(a)).abs());
            let excess = dual.measure(a) - mu.measure(a);
            if excess > below_gap {
                below_gap = excess;
                below_at = a;
            }
        }
        involution.record(inv_gap, IDENTITY_TOL, || {
            format!("{label}: |dual(dual(μ)) − μ| = {inv_gap:e}")
        });
        if p.subadditive {
            dual_below.record(below_gap, IDENTITY_TOL, || {
                format!("{label}: dual exceeds μ at A={below_at} by {below_gap:e}")
            });
        }
    }
    Ok(vec![
        monotone,
        submodular,
        sub_implies,
        involution,
        dual_below,
    ])
}

fn integral_suite(cfg: &ExperimentConfig) -> Result<Vec<Outcome>, CliError> {
    let mut rng = rng_for(cfg, 2);
    let names = [
        "homogeneity",
        "monotonicity",
        "translation",
        "dual_identity",
        "subadditivity",
    ];
    let mut outcomes: Vec<Outcome> = names.iter().map(|n| Outcome::new(n)).collect();
    let mut witnesses = Outcome::new("nonadditivity_witnessed");
    let mut capacities = Vec::new();
    if cfg.trials > 0 {
        if let Some(mu) = injected(cfg)? {
            capacities.push(mu);
        }
    }
    for _ in 0..cfg.trials {
        capacities.push(random_capacity(&mut rng));
    }
    let mut found = false;
    for mu in &capacities {
        let r = property_suite(mu, 10, &mut rng)?;
        for c in &r.checks {
            if let Some(o) = outcomes.iter_mut().find(|o| o.name == c.name) {
                o.absorb(c);
            }
        }
        found |= r.nonadditive_witness.is_some();
    }
    if !capacities.is_empty() {
        witnesses.record(if found { 0.0 } else { 1.0 }, 0.0, || {
            "no strictly non-additive pair found".into()
        });
    }
    outcomes.push(witnesses);
    Ok(outcomes)
}

fn chebyshev_suite(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mut rng = rng_for(cfg, 3);
    let mut out = Outcome::new("chebyshev_inequality");
    for _ in 0..cfg.trials {
        let mu = random_capacity(&mut rng);
        let x = DiscreteFunction::new(random::values(&mut rng, mu.ground_size(), 3.0))?;
        let r = rng.gen_range(0.01..4.0);
        let c = chebyshev_check(&x, &mu, r)?;
        out.record(if c.holds { 0.0 } else { c.lhs - c.rhs }, 0.0, || {
            format!(
                "{}: X={:?} r={r}: {} > {}",
                mu.describe(),
                x.values(),
                c.lhs,
                c.rhs
            )
        });
    }
    Ok(out)
}

fn bounds_suite(cfg: &ExperimentConfig, registry: &OperatorRegistry) -> Result<Outcome, CliError> {
    let mut out = Outcome::new(&format!("quantitative_bound[{}]", cfg.operator));
    if cfg.trials == 0 {
        return Ok(out);
    }
    let op = registry.build(&cfg.operator, &cfg.settings())?;
    for r in error_rows(op.as_ref(), cfg)? {
        out.record(r.abs_error - r.bound, BOUND_TOL, || {
            format!(
                "{} n={} x={}: error {} > bound {}",
                cfg.function.name(),
                r.n,
                r.x,
                r.abs_error,
                r.bound
            )
        });
    }
    Ok(out)
}
