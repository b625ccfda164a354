use std::f64::consts::{E, PI};
use std::panic;
use std::time::Instant;

use choquet_core::capacity::{random, DiscreteCapacity, Kernel, RealCapacity};
use choquet_core::continuous::{choquet_integral_real, normalizer_c, KernelFunction};
use choquet_core::discrete::{
    choquet_integral, layer_cake_integral, property_suite, DiscreteFunction,
};
use choquet_core::estimates::{
    chebyshev_check, convergence_report, modulus_of_continuity, modulus_window, quantitative_bound,
    MIN_RESOLUTION,
};
use choquet_core::function::FunctionSpec;
use choquet_core::operators::{
    bernstein_choquet, bernstein_choquet_capacity, bernstein_choquet_closedform,
    bernstein_choquet_split, bernstein_choquet_values, bernstein_classical, perturbation,
    picard_choquet, picard_classical, CapacitySpec, Domain, OperatorRegistry, OperatorSettings,
    PerturbationProfile,
};
use choquet_core::quadrature::QuadratureConfig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = fn() -> Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn q() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn possibility(n: f64, x: f64) -> RealCapacity {
    RealCapacity::Possibility {
        kernel: Kernel::laplace(n, x).unwrap(),
    }
}

fn unit_grid(m: usize) -> Vec<f64> {
    (0..m).map(|k| k as f64 / (m - 1) as f64).collect()
}

fn additive_reduction() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let size = rng.gen_range(1..=6);
        let mu = random::additive(&mut rng, size);
        let w = mu.additive_weights().unwrap().to_vec();
        let x = random::values(&mut rng, size, 5.0);
        let lebesgue: f64 = x.iter().zip(&w).map(|(a, b)| a * b).sum();
        let v = choquet_integral(&DiscreteFunction::new(x).unwrap(), &mu).map_err(err)?;
        worst = worst.max((v - lebesgue).abs());
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("1000 instances, max |Δ| = {worst:.2e} ≤ 1e-12"))
}

fn layer_cake() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let size = rng.gen_range(1..=6);
        let mu = random::monotone(&mut rng, size);
        let x: Vec<f64> = random::values(&mut rng, size, 4.0)
            .into_iter()
            .map(f64::abs)
            .collect();
        let x = DiscreteFunction::new(x).unwrap();
        let a = choquet_integral(&x, &mu).map_err(err)?;
        let b = layer_cake_integral(&x, &mu, &q()).map_err(err)?;
        worst = worst.max((a - b).abs());
    }
    ensure(worst <= 1e-9, || format!("max deviation {worst:e}"))?;
    Ok(format!("1000 instances, max |Δ| = {worst:.2e} ≤ 1e-9"))
}

fn normalizers() -> Result<String, String> {
    let mut worst_rel: f64 = 0.0;
    let mut worst_poss: f64 = 0.0;
    for n in [1.0, 2.0, 4.0, 16.0, 64.0] {
        let k = Kernel::laplace(n, 0.5).unwrap();
        let poss = possibility(n, 0.5);
        let shortcut = normalizer_c(&k, &poss, &q()).map_err(err)?;
        ensure(shortcut == 1.0, || {
            format!("shortcut gave {shortcut} at n={n}")
        })?;
        let quad = choquet_integral_real(&KernelFunction(k), &poss, &q()).map_err(err)?;
        worst_poss = worst_poss.max((quad.value - 1.0).abs());
        let c = normalizer_c(&k, &RealCapacity::sqrt_lebesgue(), &q()).map_err(err)?;
        let expected = (PI / (2.0 * n)).sqrt();
        worst_rel = worst_rel.max((c / expected - 1.0).abs());
    }
    ensure(worst_poss <= 1e-6, || {
        format!("possibility quadrature off by {worst_poss:e}")
    })?;
    ensure(worst_rel <= 1e-6, || {
        format!("√m normalizer relative error {worst_rel:e}")
    })?;
    Ok(format!(
        "possibility: shortcut = 1, quadrature |Δ| = {worst_poss:.1e}; √m: rel err {worst_rel:.1e}"
    ))
}

fn picard_deviation_bound() -> Result<String, String> {
    let mut tightest = f64::INFINITY;
    for n in 1..=64 {
        let n = n as f64;
        for x in [-2.0, 0.0, 1.5] {
            let v = picard_choquet(
                &FunctionSpec::AbsDev { center: x },
                n,
                x,
                &possibility(n, x),
                &q(),
            )
            .map_err(err)?;
            let cap = 1.0 / (n * E);
            ensure(v <= cap + 1e-8, || format!("n={n} x={x}: {v} > {cap}"))?;
            tightest = tightest.min(cap - v);
        }
    }
    Ok(format!(
        "192 cases, min slack 1/(ne) − T_n(φ_x)(x) = {tightest:.3e}"
    ))
}

fn exactness() -> Result<String, String> {
    let f = FunctionSpec::from_name("exp_neg").unwrap();
    let (mut choquet, mut classical, mut gap): (f64, f64, f64) = (0.0, 0.0, f64::INFINITY);
    for n in [2.0, 4.0, 8.0, 32.0] {
        for x in [-1.0, 0.0, 1.0, 2.0] {
            let t = picard_choquet(&f, n, x, &possibility(n, x), &q()).map_err(err)?;
            choquet = choquet.max((t - (-x).exp()).abs());
            let p = picard_classical(&f, n, x, &q()).map_err(err)?;
            let oracle = (-x).exp() * n * n / (n * n - 1.0);
            classical = classical.max((p - oracle).abs());
            gap = gap.min((p - (-x).exp()).abs());
        }
    }
    ensure(choquet <= 1e-6, || {
        format!("|T_n − e^{{-x}}| = {choquet:e}")
    })?;
    ensure(classical <= 1e-6, || {
        format!("|P_n − oracle| = {classical:e}")
    })?;
    Ok(format!(
        "max |T_n − e^-x| = {choquet:.1e}, max |P_n − e^-x n²/(n²−1)| = {classical:.1e}, min classical gap {gap:.2e}"
    ))
}

fn closed_form() -> Result<String, String> {
    let specs = [
        FunctionSpec::E1,
        FunctionSpec::ConcaveQuad,
        FunctionSpec::Sqrt { shift: 0.0 },
        FunctionSpec::from_name("exp_neg").unwrap(),
        FunctionSpec::ExpNeg {
            lambda: 3.0,
            scale: 2.0,
        },
    ];
    let grid = unit_grid(101);
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for f in &specs {
        for n in 2..=64 {
            for theta in [0.0, 0.5, 1.0] {
                let p = PerturbationProfile::new(1, theta);
                for &x in &grid {
                    let a = bernstein_choquet(f, n, x, &p).map_err(err)?;
                    let b = bernstein_choquet_closedform(f, n, x, &p).map_err(err)?;
                    worst = worst.max((a - b).abs());
                    cases += 1;
                }
            }
        }
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!(
        "{cases} cases (nondecreasing and nonincreasing), max |Δ| = {worst:.1e}"
    ))
}

fn band_and_proximity() -> Result<String, String> {
    let grid = unit_grid(1001);
    let p = PerturbationProfile::default();
    for n in 2..=64 {
        let cap = 0.5f64.powi(n as i32);
        let mut sup: f64 = 0.0;
        for &x in &grid {
            let d = perturbation(n, x, &p).map_err(err)?;
            let edge = x.powi(n as i32).min((1.0 - x).powi(n as i32));
            ensure(d >= 0.0 && d <= edge + 1e-300 && edge <= cap, || {
                format!("n={n} x={x}: δ={d}, min(xⁿ,(1−x)ⁿ)={edge}")
            })?;
            // B_n(e₁) = x, so L_n(e₁) − x is the Choquet excess over B_n
            let (_, excess) = bernstein_choquet_split(&FunctionSpec::E1, n, x, &p).map_err(err)?;
            let l = bernstein_choquet(&FunctionSpec::E1, n, x, &p).map_err(err)?;
            ensure(
                (l - x - excess).abs() <= 4.0 * (n + 1) as f64 * f64::EPSILON,
                || format!("n={n} x={x}: L_n(e1) − x = {} vs excess {excess}", l - x),
            )?;
            sup = sup.max(excess.abs());
        }
        // equality at x = 1/2
        ensure(sup <= cap / n as f64 * (1.0 + 1e-12), || {
            format!("n={n}: sup |L_n(e1) − x| = {sup:e}")
        })?;
    }
    Ok("n = 2..64 on a 1001-point grid: band and 2^-n/n proximity hold".into())
}

fn variance_fixture() -> Result<String, String> {
    let p = PerturbationProfile::default();
    let mut worst: f64 = 0.0;
    for n in [4usize, 8, 16] {
        let nf = n as f64;
        for k in 0..20 {
            let x = k as f64 / 19.0 / (2.0 * nf);
            let w: Vec<f64> = (0..=n).map(|i| (i as f64 / nf - x).powi(2)).collect();
            let v = bernstein_choquet_values(&w, x, &p).map_err(err)?;
            let d = perturbation(n, x, &p).map_err(err)?;
            let fixture = x * (1.0 - x) / nf + d * (1.0 / (nf * nf) - 2.0 * x / nf);
            worst = worst.max((v - fixture).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:e}"))?;
    Ok(format!("60 cases, max |Δ| = {worst:.1e}"))
}

fn chebyshev() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut min_slack = f64::INFINITY;
    for _ in 0..1000 {
        let size = rng.gen_range(1..=6);
        let mu = match rng.gen_range(0..3) {
            0 => random::monotone(&mut rng, size),
            1 => random::submodular(&mut rng, size),
            _ => random::possibility(&mut rng, size),
        };
        let x = DiscreteFunction::new(random::values(&mut rng, size, 3.0)).unwrap();
        let r = rng.gen_range(0.01..4.0);
        let out = chebyshev_check(&x, &mu, r).map_err(err)?;
        ensure(out.holds, || format!("violated: {out:?} for {x:?}"))?;
        min_slack = min_slack.min(out.rhs - out.lhs);
    }
    Ok(format!(
        "1000 instances hold, min rhs − lhs = {min_slack:.2e}"
    ))
}

fn theorem_bound() -> Result<String, String> {
    let registry = OperatorRegistry::standard();
    let specs = [
        FunctionSpec::from_name("exp_neg").unwrap(),
        FunctionSpec::Sqrt { shift: 0.3 },
        FunctionSpec::from_name("pw_linear").unwrap(),
    ];
    let mut rows = 0;
    let mut min_slack = f64::INFINITY;
    let setups: [(&str, CapacitySpec, &[f64]); 5] = [
        (
            "picard_choquet",
            CapacitySpec::default(),
            &[-1.0, 0.0, 0.4, 1.5],
        ),
        (
            "picard_choquet",
            CapacitySpec::sqrt_lebesgue(),
            &[-1.0, 0.0, 0.4, 1.5],
        ),
        (
            "weierstrass_choquet",
            CapacitySpec::default(),
            &[-1.0, 0.0, 0.4, 1.5],
        ),
        (
            "weierstrass_choquet",
            CapacitySpec::sqrt_lebesgue(),
            &[-1.0, 0.0, 0.4, 1.5],
        ),
        (
            "bernstein_choquet",
            CapacitySpec::default(),
            &[0.0, 0.1, 0.45, 0.8, 1.0],
        ),
    ];
    for (name, capacity, xs) in setups {
        let settings = OperatorSettings {
            capacity,
            ..Default::default()
        };
        let op = registry.build(name, &settings).map_err(err)?;
        for f in &specs {
            let table = convergence_report(op.as_ref(), f, &[2, 3, 8, 20], xs).map_err(err)?;
            for r in &table.rows {
                ensure(r.abs_error <= r.bound + 1e-6, || {
                    format!("{name}/{} {}: {r:?}", capacity.name(), f.name())
                })?;
                min_slack = min_slack.min(r.bound - r.abs_error);
                rows += 1;
            }
        }
    }
    // possibility Picard with δ = 1/(ne)
    let mut two_omega = 0;
    let xs = [-1.0, 0.0, 1.5];
    for f in &specs {
        let window = modulus_window(Domain::RealLine, &xs, f);
        for n in [2usize, 5, 16] {
            for x in xs {
                let nf = n as f64;
                let delta = 1.0 / (nf * E);
                let omega = modulus_of_continuity(f, delta, window, MIN_RESOLUTION)
                    .map_err(err)?
                    .value;
                let b = quantitative_bound(delta, delta, omega).map_err(err)?;
                ensure((b - 2.0 * omega).abs() <= 1e-9, || {
                    format!("bound {b} vs 2ω₁ {omega}")
                })?;
                let tn = picard_choquet(
                    &FunctionSpec::AbsDev { center: x },
                    nf,
                    x,
                    &possibility(nf, x),
                    &q(),
                )
                .map_err(err)?;
                let actual = quantitative_bound(tn, delta, omega).map_err(err)?;
                ensure(actual <= b + 1e-9, || {
                    format!("T_n(φ_x) bracket {actual} > {b}")
                })?;
                let v = picard_choquet(f, nf, x, &possibility(nf, x), &q()).map_err(err)?;
                ensure((v - f.eval(x)).abs() <= b + 1e-6, || {
                    format!(
                        "{} n={n} x={x}: error {} > 2ω₁ = {b}",
                        f.name(),
                        (v - f.eval(x)).abs()
                    )
                })?;
                two_omega += 1;
            }
        }
    }
    Ok(format!(
        "{rows} rows within the bound (min slack {min_slack:.2e}); {two_omega} possibility cases with δ = 1/(ne) give bound = 2ω₁"
    ))
}

fn improvement() -> Result<String, String> {
    let p = PerturbationProfile::default();
    let xs: Vec<f64> = (1..=99).map(|k| k as f64 / 100.0).collect();
    let mut count = 0;
    for f in [FunctionSpec::ConcaveQuad, FunctionSpec::Sqrt { shift: 0.0 }] {
        for n in [4usize, 8, 16, 32] {
            for &x in &xs {
                let fx = f.eval(x);
                let b = bernstein_classical(&f, n, x).map_err(err)?;
                // L − f = (B − f) + (L − B); near the ends L − B is far below
                // the rounding of L itself
                let (_, excess) = bernstein_choquet_split(&f, n, x, &p).map_err(err)?;
                let l = bernstein_choquet(&f, n, x, &p).map_err(err)?;
                ensure((b + excess - l).abs() <= 1e-14, || {
                    format!("split drifts at n={n} x={x}")
                })?;
                let corr =
                    (f.eval(1.0 / n as f64) - f.eval(0.0)) * perturbation(n, x, &p).map_err(err)?;
                let gap = b - fx;
                let l_err = (gap + excess).abs();
                ensure(b < fx, || format!("{} n={n} x={x}: B_n ≥ f", f.name()))?;
                ensure(corr > 0.0, || {
                    format!("{} n={n} x={x}: correction {corr}", f.name())
                })?;
                // with 0 < excess ≪ |B − f| the sum rounds back to |B − f|;
                // |gap + e| < |gap| is then checked as e·gap < 0, |e| < 2|gap|
                let strict = if corr >= gap.abs() {
                    l_err < corr
                } else {
                    excess * gap < 0.0 && excess.abs() < 2.0 * gap.abs()
                };
                ensure(strict && l_err <= gap.abs().max(corr), || {
                    format!(
                        "{} n={n} x={x}: |L−f| = {l_err}, excess {excess:e}",
                        f.name()
                    )
                })?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} cases satisfy all three inequalities"))
}

fn property_suite_check() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut witnesses = 0;
    let mut submodular = 0;
    let mut capacities: Vec<DiscreteCapacity> = Vec::new();
    for size in 1..=6 {
        capacities.push(random::monotone(&mut rng, size));
        capacities.push(random::submodular(&mut rng, size));
        capacities.push(random::possibility(&mut rng, size));
        capacities.push(random::additive(&mut rng, size));
    }
    capacities
        .push(bernstein_choquet_capacity(4, 0.3, &PerturbationProfile::default()).map_err(err)?);
    for mu in &capacities {
        let report = property_suite(mu, 200, &mut rng).map_err(err)?;
        for c in &report.checks {
            ensure(c.violations == 0, || {
                format!("{} failed on {}: {:?}", c.name, mu.describe(), c.witness)
            })?;
        }
        if report.submodular {
            submodular += 1;
            ensure(
                report
                    .check("subadditivity")
                    .is_some_and(|c| c.evaluated > 0),
                || format!("subadditivity not evaluated for {}", mu.describe()),
            )?;
        }
        if report.nonadditive_witness.is_some() {
            witnesses += 1;
        }
    }
    ensure(witnesses > 0, || "no strict non-additivity witness".into())?;
    Ok(format!(
        "{} capacities, {submodular} submodular, {witnesses} non-additivity witnesses",
        capacities.len()
    ))
}

fn convergence() -> Result<String, String> {
    let registry = OperatorRegistry::standard();
    let op = registry
        .build("bernstein_choquet", &OperatorSettings::default())
        .map_err(err)?;
    let xs = unit_grid(51);
    let mut summary = Vec::new();
    for f in [FunctionSpec::ConcaveQuad, FunctionSpec::Sqrt { shift: 0.0 }] {
        let table = convergence_report(op.as_ref(), &f, &[4, 8, 16, 32, 64], &xs).map_err(err)?;
        let errs = table.max_errors();
        ensure(table.strictly_decreasing(), || {
            format!("{}: {errs:?}", f.name())
        })?;
        summary.push(format!(
            "{}: {}",
            f.name(),
            errs.iter()
                .map(|(_, e)| format!("{e:.2e}"))
                .collect::<Vec<_>>()
                .join(" > ")
        ));
    }
    Ok(summary.join("; "))
}

fn main() {
    let checks: [(&str, &str, Check); 13] = [
        ("1", "additive reduction", additive_reduction),
        ("2", "layer-cake equivalence", layer_cake),
        ("3", "normalizers", normalizers),
        (
            "4",
            "Picard-Choquet deviation bound",
            picard_deviation_bound,
        ),
        ("5", "exactness on exponentials", exactness),
        ("6", "Bernstein-Choquet closed form", closed_form),
        ("7", "band and proximity", band_and_proximity),
        ("8", "variance fixture", variance_fixture),
        ("9", "Chebyshev inequality", chebyshev),
        ("10", "quantitative bound", theorem_bound),
        ("11", "improvement over Bernstein", improvement),
        ("12", "integral property suite", property_suite_check),
        ("note", "grid-uniform error decay", convergence),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, title, check) in checks {
        let start = Instant::now();
        let outcome = panic::catch_unwind(check).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS criterion {id} ({title}): {detail} [{ms} ms]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {id} ({title}): {detail} [{ms} ms]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
