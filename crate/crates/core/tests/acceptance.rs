//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Runs with `cargo test -p boundary-lab-core --test acceptance`.

use std::process::ExitCode;
use std::time::Instant;

use boundary_lab_core::corpus::{certified_corpus, certified_function, check_corpus};
use boundary_lab_core::envelope::{exceedance_table, Envelope};
use boundary_lab_core::harness::{default_ns, replicate, run_risk_grid};
use boundary_lab_core::model::grid_values_are_holder;
use boundary_lab_core::quadrature::{unit_grid, unit_node};
use boundary_lab_core::rng::Streams;
use boundary_lab_core::simulate::{default_cap, sample_ppp_with};
use boundary_lab_core::testing::default_alternatives;
use boundary_lab_core::{
    chi2_certificate, deviation_bound, error_experiment, fit_rate_slope, local_asymptotic_constant, prior_geometry,
    separation_rate, variance_rhs, BoundaryFunction, DeviationBoundParams, EstimatorKind, FunctionalSpec,
    HolderClass, ModelConfig, PriorConfig, RiskColumn, RiskGridConfig, RiskTable, TestConfig,
};
use rand::Rng;

type Outcome = Result<(bool, String), String>;

const SEED: u64 = 20_240_611;

fn lipschitz() -> HolderClass {
    HolderClass::new(1.0, 1.0).unwrap()
}

fn risk_config(g: f64, p: f64, estimator: EstimatorKind) -> RiskGridConfig {
    let h = lipschitz();
    RiskGridConfig::new(
        BoundaryFunction::constant(g, h),
        FunctionalSpec::power(p).unwrap(),
        estimator,
    )
    .unwrap()
}

fn unbiasedness() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for p in [1.0, 2.0] {
        let t = run_risk_grid(&risk_config(1.0, p, EstimatorKind::Fp), &[64], 20_000, SEED).map_err(|e| e.to_string())?;
        let r = &t.rows[0];
        let se = (r.var_empirical / r.reps as f64).sqrt();
        let pass = (r.mean_estimate - 1.0).abs() <= 4.0 * se && t.is_valid();
        ok &= pass;
        notes.push(format!("p={p}: mean={:.6} se={:.2e}", r.mean_estimate, se));
    }
    Ok((ok, notes.join("; ")))
}

fn variance_identity() -> Outcome {
    let h = lipschitz();
    let config = ModelConfig::new(64, BoundaryFunction::constant(1.0, h), h).map_err(|e| e.to_string())?;
    let xs = unit_grid(129);
    let us: Vec<f64> = (0..=4000).map(|i| 2.0 * i as f64 / 4000.0).collect();
    let table = exceedance_table(&config, &xs, &us, 20_000, SEED ^ 0xa5a5).map_err(|e| e.to_string())?;
    let mut ok = true;
    let mut notes = Vec::new();
    for p in [1.0, 2.0] {
        let spec = FunctionalSpec::power(p).unwrap();
        let rhs = variance_rhs(&config, &spec, &table).map_err(|e| e.to_string())?;
        let t = run_risk_grid(&risk_config(1.0, p, EstimatorKind::Fp), &[64], 20_000, SEED).map_err(|e| e.to_string())?;
        let emp = t.rows[0].var_empirical;
        let rel = (emp - rhs.value).abs() / rhs.value;
        ok &= rel <= 0.05 && !rhs.tail_warning;
        notes.push(format!("p={p}: var_emp={emp:.5e} var_rhs={:.5e} rel={rel:.4}", rhs.value));
    }
    Ok((ok, notes.join("; ")))
}

fn deviation_inequality() -> Outcome {
    let xs: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let us: Vec<f64> = (1..=20).map(|i| 2.0 * i as f64 / 20.0).collect();
    let mut ok = true;
    let mut worst = f64::NEG_INFINITY;
    for beta in [0.5, 1.0] {
        let h = HolderClass::new(beta, 1.0).unwrap();
        let config = ModelConfig::new(50, BoundaryFunction::constant(0.0, h), h).map_err(|e| e.to_string())?;
        let table = exceedance_table(&config, &xs, &us, 10_000, SEED).map_err(|e| e.to_string())?;
        for xi in 0..xs.len() {
            for (ui, &u) in us.iter().enumerate() {
                let p_hat = table.p_hat(xi, ui);
                let se = (p_hat * (1.0 - p_hat) / table.kept as f64).sqrt();
                let bound = deviation_bound(&DeviationBoundParams { holder: h, n: 50, u }).map_err(|e| e.to_string())?;
                worst = worst.max(p_hat - bound - 3.0 * se);
                ok &= p_hat <= bound + 3.0 * se;
            }
        }
    }
    Ok((ok, format!("max(p̂ − bound − 3se) = {worst:.3e} over 2×9×20 points")))
}

fn criterion4_table() -> Result<RiskTable, String> {
    run_risk_grid(&risk_config(1.0, 1.0, EstimatorKind::Fp), &default_ns(), 2000, SEED).map_err(|e| e.to_string())
}

fn estimation_rate(table: &RiskTable) -> Outcome {
    let fit = fit_rate_slope(table, RiskColumn::Rmse, 0.75, 0.08).map_err(|e| e.to_string())?;
    Ok((
        fit.within_tolerance && table.is_valid(),
        format!("RMSE slope {:.4} ± {:.4} (target −0.75 ± 0.08)", fit.slope, fit.slope_stderr),
    ))
}

fn lp_norm_rate() -> Outcome {
    let t = run_risk_grid(&risk_config(0.0, 2.0, EstimatorKind::THat), &default_ns(), 2000, SEED)
        .map_err(|e| e.to_string())?;
    let fit = fit_rate_slope(&t, RiskColumn::MeanAbsError, 0.625, 0.10).map_err(|e| e.to_string())?;
    Ok((
        fit.within_tolerance && t.is_valid(),
        format!("MAE slope {:.4} ± {:.4} (target −0.625 ± 0.10)", fit.slope, fit.slope_stderr),
    ))
}

fn local_constant() -> Outcome {
    let n = 4096u64;
    let t = run_risk_grid(&risk_config(1.0, 2.0, EstimatorKind::Fp), &[n], 5000, SEED).map_err(|e| e.to_string())?;
    let scaled = (n as f64).powf(1.5) * t.rows[0].mse;
    // ∥Φ′∘f∥²₂ = ∫(2·1)² = 4
    let limit = 1.1 * local_asymptotic_constant(1.0, 1.0, 4.0).map_err(|e| e.to_string())?;
    Ok((scaled <= limit, format!("n^1.5·MSE = {scaled:.4} vs 1.1·constant = {limit:.4}")))
}

fn plug_in_test() -> Outcome {
    let n = 1024u64;
    let r_n = 5.0 * separation_rate(1.0, 1.0, n as f64).map_err(|e| e.to_string())?;
    let config = TestConfig::new(1.0, r_n, lipschitz(), n).map_err(|e| e.to_string())?;
    let alternatives = default_alternatives(&config).map_err(|e| e.to_string())?;
    let r = error_experiment(&config, &alternatives, 2000, SEED).map_err(|e| e.to_string())?;
    let total = r.type1 + r.worst_type2;
    Ok((
        total < 0.15,
        format!(
            "type1 = {:.4}, worst type2 = {:.4} over {} alternatives, sum {total:.4}",
            r.type1,
            r.worst_type2,
            alternatives.len()
        ),
    ))
}

fn chi2_certificate_check() -> Outcome {
    let n = 1024u64;
    let h = lipschitz();
    let r = 0.2 * separation_rate(1.0, 1.0, n as f64).map_err(|e| e.to_string())?;
    let geo = prior_geometry(0.25, h, r, 1.0).map_err(|e| e.to_string())?;
    let prior = PriorConfig::uniform(geo.m, 0.25, h).map_err(|e| e.to_string())?;
    let rep = chi2_certificate(&prior, n, 10_000, SEED).map_err(|e| e.to_string())?;
    let ordered = rep.exact_value <= rep.lemma_bound;
    let small = rep.lemma_bound < 0.05;
    let mc = (rep.mc_estimate - rep.exact_value).abs() <= 4.0 * rep.mc_stderr;
    let lr = (rep.lr_mean - 1.0).abs() <= 4.0 * rep.lr_stderr;
    Ok((
        ordered && small && mc && lr,
        format!(
            "m={} exact={:.4} lemma={:.4} [exact≤lemma: {ordered}] [lemma<0.05: {small}] \
             mc={:.4}±{:.4} [{mc}] E0[LR]={:.4}±{:.4} [{lr}]",
            geo.m, rep.exact_value, rep.lemma_bound, rep.mc_estimate, rep.mc_stderr, rep.lr_mean, rep.lr_stderr
        ),
    ))
}

fn interpolation() -> Outcome {
    let cases = certified_corpus(1000, None, None, 1.0, SEED).map_err(|e| e.to_string())?;
    let checks = check_corpus(&cases).map_err(|e| e.to_string())?;
    let violations = checks.iter().filter(|c| !c.holds).count();
    Ok((violations == 0, format!("{violations} violations in {} cases", checks.len())))
}

fn envelope_invariants() -> Outcome {
    const SAMPLES: usize = 100_000;
    const GRID: usize = 65;
    let streams = Streams::new(SEED);
    let violations: Vec<usize> = replicate(SAMPLES, |i| {
        let mut rng = streams.stream(&[0xe4e1, i as u64]);
        let beta = rng.random_range(0.1..=1.0);
        let radius = rng.random_range(0.2..=3.0);
        let holder = HolderClass::new(beta, radius)?;
        let g = certified_function(holder, &mut rng)?;
        let n = rng.random_range(1..=300u64);
        let config = ModelConfig::new(n, g, holder)?;
        let cap = default_cap(&config, 0.5)?;
        let mut sample = sample_ppp_with(&config, cap, SEED, &mut rng)?;
        while sample.is_empty() {
            sample = sample_ppp_with(&config, cap, SEED, &mut rng)?;
        }
        let env = Envelope::new(&sample, holder)?;
        let mut bad = 0;
        let values = env.evaluate_grid(GRID);
        for (i, &v) in values.iter().enumerate() {
            let g = config.boundary().eval(unit_node(i, GRID));
            if v < g - 1e-12 * (1.0 + g.abs()) {
                bad += 1;
            }
        }
        for p in sample.points() {
            if env.evaluate(p.x) > p.y {
                bad += 1;
            }
        }
        if !grid_values_are_holder(&values, holder) {
            bad += 1;
        }
        Ok(bad)
    })
    .map_err(|e| e.to_string())?;
    let total: usize = violations.iter().sum();
    Ok((total == 0, format!("{total} violations over {SAMPLES} samples")))
}

fn determinism(first: &RiskTable) -> Outcome {
    let second = criterion4_table()?;
    let a = first.to_csv_string().map_err(|e| e.to_string())?;
    let b = second.to_csv_string().map_err(|e| e.to_string())?;
    Ok((a == b, format!("{} bytes, identical: {}", a.len(), a == b)))
}

fn report(index: usize, name: &str, started: Instant, outcome: Outcome) -> bool {
    let secs = started.elapsed().as_secs_f64();
    match outcome {
        Ok((pass, detail)) => {
            println!("{} criterion {index:>2} {name}: {detail} [{secs:.1}s]", if pass { "PASS" } else { "FAIL" });
            pass
        }
        Err(e) => {
            println!("FAIL criterion {index:>2} {name}: error: {e} [{secs:.1}s]");
            false
        }
    }
}

/// `ACCEPTANCE_ONLY=4,11` restricts the run to the listed criteria.
fn selected() -> Option<Vec<usize>> {
    let raw = std::env::var("ACCEPTANCE_ONLY").ok()?;
    Some(raw.split(',').filter_map(|t| t.trim().parse().ok()).collect())
}

fn main() -> ExitCode {
    // `cargo test` passes harness flags such as `--nocapture`; a name filter
    // that matches nothing here skips the suite.
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !filters.is_empty() && !filters.iter().any(|f| "acceptance".contains(f.as_str())) {
        return ExitCode::SUCCESS;
    }
    let only = selected();
    let wanted = |i: usize| only.as_ref().is_none_or(|o| o.contains(&i));
    let mut all = true;
    let mut run = |i: usize, name: &str, f: &dyn Fn() -> Outcome| {
        if wanted(i) {
            let t = Instant::now();
            all &= report(i, name, t, f());
        }
    };

    run(1, "unbiasedness", &unbiasedness);
    run(2, "variance identity", &variance_identity);
    run(3, "deviation inequality", &deviation_inequality);
    // built on first use, so its cost is charged to criterion 4
    let table4 = std::cell::OnceCell::new();
    let from4 = |f: fn(&RiskTable) -> Outcome| table4.get_or_init(criterion4_table).as_ref().map_err(Clone::clone).and_then(f);
    run(4, "estimation rate", &|| from4(estimation_rate));
    run(5, "Lp-norm rate", &lp_norm_rate);
    run(6, "local asymptotic constant", &local_constant);
    run(7, "plug-in test", &plug_in_test);
    run(8, "chi-square certificate", &chi2_certificate_check);
    run(9, "interpolation inequality", &interpolation);
    run(10, "envelope invariants", &envelope_invariants);
    run(11, "determinism", &|| from4(determinism));

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
