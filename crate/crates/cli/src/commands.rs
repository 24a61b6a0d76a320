use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use boundary_lab_core::corpus::{certified_corpus, check_corpus};
use boundary_lab_core::harness::fmt17;
use boundary_lab_core::io::{self as bio, SampleMeta};
use boundary_lab_core::lowerbound::{estimation_cells, matched_weights, uniform_weights};
use boundary_lab_core::testing::default_alternatives;
use boundary_lab_core::{
    chi2_certificate, error_experiment, estimate_functional, fit_rate_slope, holder_membership_check,
    prior_geometry, rate_exponents, run_risk_grid, sample_ppp, separation_rate, Envelope, EstimatorKind,
    FunctionalSpec, HolderClass, ModelConfig, PriorConfig, RiskGridConfig, RiskTable, TestConfig,
};
use serde::Serialize;
use serde_json::{json, Value};

use crate::args::*;

pub enum Failure {
    /// The computation ran and a check it performs did not hold.
    Validation(String),
    Error(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Error(e.into())
    }
}

type Outcome = Result<(), Failure>;

pub fn run(cli: &Cli) -> Outcome {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    let ctx = Ctx { cli };
    match &cli.command {
        Command::Simulate(a) => simulate(&ctx, a),
        Command::Envelope(a) => envelope(&ctx, a),
        Command::Estimate(a) => estimate(&ctx, a),
        Command::Mc(a) => mc(&ctx, a),
        Command::Rates(a) => rates(&ctx, a),
        Command::Test(a) => test(&ctx, a),
        Command::Lowerbound(a) => lowerbound(&ctx, a),
        Command::Check(CheckCommand::Interp(a)) => check_interp(&ctx, a),
        Command::Check(CheckCommand::Holder(a)) => check_holder(&ctx, a),
        Command::Exponents(a) => exponents(&ctx, a),
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
}

impl Ctx<'_> {
    /// The resolved configuration echoed into every sidecar.
    fn echo<T: Serialize>(&self, command: &str, args: &T) -> anyhow::Result<Value> {
        Ok(json!({
            "tool": "boundary-lab",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "threads": rayon::current_num_threads(),
            "args": serde_json::to_value(args)?,
        }))
    }

    /// Writes `value` next to `out` (as `<out>.json`) or to `--sidecar`.
    fn sidecar<T: Serialize>(&self, out: Option<&Path>, value: &T) -> anyhow::Result<()> {
        let path = match (out, &self.cli.sidecar) {
            (_, Some(explicit)) => explicit.clone(),
            (Some(out), None) => bio::sidecar_path(out),
            (None, None) => return Ok(()),
        };
        let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        bio::write_json(value, BufWriter::new(file))?;
        Ok(())
    }
}

fn holder(class: &ClassArgs) -> anyhow::Result<HolderClass> {
    Ok(HolderClass::new(class.beta, class.radius)?)
}

/// Opens `path` for writing, or stdout.
fn sink(path: Option<&PathBuf>) -> anyhow::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn print_json<T: Serialize>(value: &T) -> anyhow::Result<()> {
    bio::write_json(value, io::stdout().lock())?;
    Ok(())
}

fn simulate(ctx: &Ctx, a: &SimulateArgs) -> Outcome {
    let h = holder(&a.class)?;
    let config = ModelConfig::new(a.n, a.g.build(h)?, h)?;
    let cap = match a.cap {
        Some(c) => c,
        None => boundary_lab_core::default_cap(&config, a.cap_margin)?,
    };
    let sample = sample_ppp(&config, cap, a.seed)?;
    bio::write_points(sample.points(), sink(a.out.as_ref())?)?;
    let meta = SampleMeta {
        boundary: Some(a.g.to_string()),
        beta: Some(a.class.beta),
        radius: Some(a.class.radius),
        config: Some(ctx.echo("simulate", a)?),
        ..SampleMeta::of(&sample)
    };
    ctx.sidecar(a.out.as_deref(), &meta)?;
    if !sample.cap_valid() {
        eprintln!("boundary-lab: warning: the ceiling {cap} may truncate the envelope (cap_valid = false)");
    }
    Ok(())
}

fn envelope(ctx: &Ctx, a: &EnvelopeArgs) -> Outcome {
    let h = holder(&a.class)?;
    let (sample, _) = bio::load_sample(&a.input, h.radius())?;
    let env = Envelope::new(&sample, h)?;
    bio::write_envelope(&env, a.grid, sink(a.out.as_ref())?)?;
    ctx.sidecar(a.out.as_deref(), &ctx.echo("envelope", a)?)?;
    Ok(())
}

fn estimate(ctx: &Ctx, a: &EstimateArgs) -> Outcome {
    let h = holder(&a.class)?;
    let (sample, _) = bio::load_sample(&a.input, h.radius())?;
    let r = estimate_functional(&sample, h, &a.functional, a.grid)?;
    print_json(&r)?;
    ctx.sidecar(None, &ctx.echo("estimate", a)?)?;
    if !r.cap_valid {
        eprintln!("boundary-lab: warning: sample ceiling is too low (cap_valid = false)");
    }
    Ok(())
}

fn mc(ctx: &Ctx, a: &McArgs) -> Outcome {
    let h = holder(&a.class)?;
    let spec = match (a.estimator, &a.functional) {
        (EstimatorKind::FPhi, Some(f)) => f.clone(),
        _ => FunctionalSpec::power(a.p)?,
    };
    let mut config = RiskGridConfig::new(a.g.build(h)?, spec, a.estimator)?;
    config.grid_size = a.grid;
    let table = run_risk_grid(&config, &a.ns, a.reps, a.seed)?;
    let mut out = sink(a.out.as_ref())?;
    table.write_csv(&mut out)?;
    out.flush()?;
    ctx.sidecar(a.out.as_deref(), &ctx.echo("mc", a)?)?;
    if !table.is_valid() {
        return Err(Failure::Validation("more than 1% of the replications were discarded at some n".into()));
    }
    Ok(())
}

fn rates(ctx: &Ctx, a: &RatesArgs) -> Outcome {
    let file = File::open(&a.input).with_context(|| format!("opening {}", a.input.display()))?;
    let table = RiskTable::read_csv(io::BufReader::new(file))?;
    let fit = fit_rate_slope(&table, a.column.into(), a.target_exponent, a.tol)?;
    print_json(&fit)?;
    ctx.sidecar(None, &ctx.echo("rates", a)?)?;
    if !fit.within_tolerance {
        return Err(Failure::Validation(format!(
            "slope {} is not within {} of {}",
            fit.slope, a.tol, -a.target_exponent
        )));
    }
    Ok(())
}

fn test(ctx: &Ctx, a: &TestArgs) -> Outcome {
    let h = holder(&a.class)?;
    let r_n = match a.rn {
        Some(r) => r,
        None => 5.0 * separation_rate(h.beta(), a.p, a.n as f64)?,
    };
    let config = TestConfig::new(a.p, r_n, h, a.n)?.with_grid_size(a.grid);
    let alternatives = default_alternatives(&config)?;
    let report = error_experiment(&config, &alternatives, a.reps, a.seed)?;
    if let Some(out) = &a.out {
        bio::write_test_records(&report.records, sink(Some(out))?)?;
    }
    print_json(&json!({
        "r_n": r_n,
        "threshold": config.threshold(),
        "alternatives": alternatives.len(),
        "type1": report.type1,
        "type1_stderr": report.type1_stderr,
        "worst_type2": report.worst_type2,
        "worst_type2_stderr": report.worst_type2_stderr,
        "type2": report.type2,
        "discarded": report.discarded,
    }))?;
    ctx.sidecar(a.out.as_deref(), &ctx.echo("test", a)?)?;
    Ok(())
}

fn lowerbound(ctx: &Ctx, a: &LowerboundArgs) -> Outcome {
    let h = holder(&a.class)?;
    let base = a.g.build(h)?;
    let m = match (a.m, a.rn) {
        (Some(m), _) => m,
        (None, Some(r)) => prior_geometry(a.c, h, r, a.p)?.m,
        (None, None) => estimation_cells(a.c, h, a.n as f64),
    };
    let weights = match a.weights {
        WeightsArg::Uniform => uniform_weights(m),
        WeightsArg::Matched => matched_weights(&FunctionalSpec::power(a.p)?, &base, m)?,
    };
    let prior = PriorConfig::new(m, a.c, h, weights, base)?;
    let report = chi2_certificate(&prior, a.n, a.reps, a.seed)?;
    let mut value = serde_json::to_value(report)?;
    value["m"] = json!(m);
    value["h"] = json!(prior.h());
    value["n_cell_mass"] = json!(a.n as f64 * prior.cell_mass());
    print_json(&value)?;
    ctx.sidecar(None, &ctx.echo("lowerbound", a)?)?;
    Ok(())
}

fn check_interp(ctx: &Ctx, a: &InterpArgs) -> Outcome {
    let cases = certified_corpus(a.corpus, a.beta, a.p, a.radius, a.seed)?;
    let checks = check_corpus(&cases)?;
    bio::write_interp_checks(&checks, sink(a.out.as_ref())?)?;
    ctx.sidecar(a.out.as_deref(), &ctx.echo("check interp", a)?)?;
    let violations = checks.iter().filter(|c| !c.holds).count();
    if violations > 0 {
        return Err(Failure::Validation(format!("{violations} of {} cases violate the inequality", checks.len())));
    }
    Ok(())
}

fn check_holder(ctx: &Ctx, a: &HolderArgs) -> Outcome {
    let h = holder(&a.class)?;
    let g = a.g.build(h)?;
    let holds = holder_membership_check(&g, a.grid)?;
    print_json(&json!({ "boundary": a.g.to_string(), "holds": holds }))?;
    ctx.sidecar(None, &ctx.echo("check holder", a)?)?;
    if !holds {
        return Err(Failure::Validation(format!("{} is not in C^{}({})", a.g, a.class.beta, a.class.radius)));
    }
    Ok(())
}

fn exponents(ctx: &Ctx, a: &ExponentsArgs) -> Outcome {
    if a.points == 0 {
        return Err(anyhow::anyhow!("--points must be positive").into());
    }
    let mut out = sink(a.out.as_ref())?;
    writeln!(out, "beta,p,ppp_estimation,ppp_lp_norm_and_testing,gwn_testing")?;
    for &p in &a.p {
        for i in 1..=a.points {
            let e = rate_exponents(i as f64 / a.points as f64, p)?;
            writeln!(
                out,
                "{},{},{},{},{}",
                fmt17(e.beta),
                fmt17(e.p),
                fmt17(e.ppp_estimation),
                fmt17(e.ppp_lp_norm_and_testing),
                fmt17(e.gwn_testing)
            )?;
        }
    }
    out.flush()?;
    ctx.sidecar(a.out.as_deref(), &ctx.echo("exponents", a)?)?;
    Ok(())
}
