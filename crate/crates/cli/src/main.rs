//! `relzeta`: relative zeta regularization from the command line.
//!
//! Data goes to standard output (or `--output`), diagnostics and timings to
//! standard error. Exit codes: 0 success, 1 usage error, 2 domain rejection,
//! 3 numeric failure or failed verification.

use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use relzeta::model::{bound_state_threshold, find_bound_state, CoulombDelta, ExpansionRegime, Expansion, ModelParams};
use relzeta::relative::RelativeModel;
use relzeta::spectral::tabulate;
use relzeta::verify::{run_suite, CheckStatus, VerifyConfig};
use relzeta::zeta::{RelativeZeta, SpectrumPolicy, ZetaOptions};
use relzeta::{Error, quadrature::AccuracyBudget};

use relzeta_cli::config::{FileConfig, Flags, Format, ModelKind, RunConfig};
use relzeta_cli::output::{emit, format_g17, Envelope, Table};

#[derive(Debug, Parser)]
#[command(name = "relzeta", version, about = "Relative zeta regularization for the Coulomb plus point-interaction pair")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Regularized relative partition function log Z_R.
    Partition(Flags),
    /// Tabulate the relative spectral measure e(v) on a log grid.
    Spectral(Flags),
    /// Evaluate the continued relative zeta function.
    Zeta(ZetaArgs),
    /// Bound-state threshold, verdict and energy.
    BoundState(Flags),
    /// Run the oracle suite.
    Verify(Flags),
}

#[derive(Debug, Args)]
struct ZetaArgs {
    /// Points in (−3/2, 1), comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    s: Vec<f64>,
    #[command(flatten)]
    flags: Flags,
}

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Domain(String),
    Numeric(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Domain(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Domain(m) | Failure::Numeric(m) => m,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) => Failure::Usage(e.to_string()),
            Error::BoundStateRegion { .. } => Failure::Domain(format!(
                "{e}\nhint: inspect it with `relzeta bound-state`, or pass --continuous-only \
                 to use the continuous spectrum alone"
            )),
            Error::InvalidModel(_)
            | Error::PoleProximity { .. }
            | Error::OutOfRange { .. }
            | Error::Domain(_) => Failure::Domain(e.to_string()),
            _ => Failure::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(format!("cannot write output: {e}"))
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let start = Instant::now();
    let (name, r) = match &cli.command {
        Command::Partition(f) => ("partition", cmd_partition(f)),
        Command::Spectral(f) => ("spectral", cmd_spectral(f)),
        Command::Zeta(z) => ("zeta", cmd_zeta(z)),
        Command::BoundState(f) => ("bound-state", cmd_bound_state(f)),
        Command::Verify(f) => ("verify", cmd_verify(f)),
    };
    eprintln!("relzeta {name}: {:.3} s", start.elapsed().as_secs_f64());
    match r {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn resolve(flags: &Flags, default_format: Format) -> Result<(RunConfig, FileConfig), Failure> {
    RunConfig::resolve(flags, default_format).map_err(Failure::Usage)
}

fn params(cfg: &RunConfig) -> Result<ModelParams, Failure> {
    Ok(ModelParams::new(cfg.gamma, cfg.alpha)?)
}

fn inputs(cfg: &RunConfig) -> Value {
    serde_json::to_value(cfg).expect("config serializes")
}

fn engine(cfg: &RunConfig) -> Result<RelativeZeta, Failure> {
    let model = match cfg.model {
        ModelKind::CoulombDelta => CoulombDelta::relative_model(params(cfg)?)?,
        ModelKind::Zero => RelativeModel::zero(),
    };
    let policy = if cfg.continuous_only {
        SpectrumPolicy::ContinuousPartOnly
    } else {
        SpectrumPolicy::RequireContinuous
    };
    Ok(RelativeZeta::new(model, ZetaOptions::with_tolerance(cfg.tol)?.policy(policy))?)
}

fn write(cfg: &RunConfig, data: &str) -> Outcome {
    Ok(emit(data, cfg.output.as_deref())?)
}

fn cmd_partition(flags: &Flags) -> Outcome {
    let (cfg, _) = resolve(flags, Format::Json)?;
    let r = engine(&cfg)?.log_partition(cfg.beta, cfg.ell)?;
    let data = match cfg.format {
        Format::Json => {
            let mut results = serde_json::to_value(&r).expect("result serializes");
            let diagnostics = results
                .as_object_mut()
                .and_then(|m| m.remove("diagnostics"))
                .unwrap_or(Value::Null);
            Envelope::new("partition", inputs(&cfg), results, diagnostics).render()
        }
        Format::Csv => {
            let mut t = Table::new(&[
                "beta", "ell", "res1_zeta_L", "res0_zeta_L", "res0_zeta_prime_L", "log_eta", "log_ZR", "error",
            ]);
            t.push(
                [r.beta, r.ell, r.res1_zeta_l, r.res0_zeta_l, r.res0_zeta_prime_l, r.log_eta, r.log_zr, r.diagnostics.error]
                    .map(format_g17)
                    .to_vec(),
            );
            t.render()
        }
    };
    write(&cfg, &data)
}

/// The trace without expansion metadata: tabulation never needs it, and
/// this keeps `γ = α = 0` (where the expansions degenerate) available.
fn spectral_model(cfg: &RunConfig) -> Result<RelativeModel, Failure> {
    Ok(match cfg.model {
        ModelKind::Zero => RelativeModel::zero(),
        ModelKind::CoulombDelta => RelativeModel::new(
            "coulomb-delta",
            Arc::new(CoulombDelta::new(params(cfg)?)),
            Expansion::empty(ExpansionRegime::Small),
            Expansion::empty(ExpansionRegime::Large),
        )?,
    })
}

fn cmd_spectral(flags: &Flags) -> Outcome {
    let (cfg, _) = resolve(flags, Format::Csv)?;
    let model = spectral_model(&cfg)?;
    let rows = tabulate(&model, cfg.v_min, cfg.v_max, cfg.points)?;
    let mut failed = Vec::new();
    for (v, e) in &rows {
        if let Err(err) = e {
            eprintln!("warning: e({}) not evaluated: {err}", format_g17(*v));
            failed.push(*v);
        }
    }
    let value = |e: &relzeta::Result<f64>| *e.as_ref().unwrap_or(&f64::NAN);
    let data = match cfg.format {
        Format::Csv => {
            let mut t = Table::new(&["v", "e"]);
            for (v, e) in &rows {
                t.push(vec![format_g17(*v), format_g17(value(e))]);
            }
            t.render()
        }
        Format::Json => {
            // NaN has no JSON spelling; failed points become null
            let v: Vec<f64> = rows.iter().map(|r| r.0).collect();
            let e: Vec<Option<f64>> = rows.iter().map(|r| r.1.as_ref().ok().copied()).collect();
            Envelope::new(
                "spectral",
                inputs(&cfg),
                json!({ "v": v, "e": e }),
                json!({ "failed_points": failed }),
            )
            .render()
        }
    };
    write(&cfg, &data)
}

fn cmd_zeta(args: &ZetaArgs) -> Outcome {
    let (cfg, file) = resolve(&args.flags, Format::Json)?;
    let points = if args.s.is_empty() { file.s.unwrap_or_default() } else { args.s.clone() };
    if points.is_empty() {
        return Err(Failure::Usage("zeta needs at least one point, e.g. --s -0.25".into()));
    }
    if let Some(s) = points.iter().find(|s| !s.is_finite()) {
        return Err(Failure::Usage(format!("--s {s} is not finite")));
    }
    let eng = engine(&cfg)?;
    let values = points
        .iter()
        .map(|&s| eng.zeta_continued(s))
        .collect::<relzeta::Result<Vec<_>>>()?;
    let data = match cfg.format {
        Format::Csv => {
            let mut t = Table::new(&["s", "zeta", "error"]);
            for (s, a) in points.iter().zip(&values) {
                t.push(vec![format_g17(*s), format_g17(a.value), format_g17(a.error)]);
            }
            t.render()
        }
        Format::Json => {
            let results: Vec<Value> = points
                .iter()
                .zip(&values)
                .map(|(s, a)| json!({ "s": s, "zeta": a.value, "error": a.error }))
                .collect();
            let integrals: Vec<Value> = points
                .iter()
                .zip(&values)
                .map(|(s, a)| json!({ "s": s, "integrals": a.integrals }))
                .collect();
            let mut inp = inputs(&cfg);
            inp["s"] = json!(points);
            Envelope::new(
                "zeta",
                inp,
                Value::Array(results),
                json!({
                    "sign_resolution": eng.coefficients().sign,
                    "policy": eng.options().policy,
                    "excluded_bound_states": eng.bound_states(),
                    "quadratures": integrals,
                }),
            )
            .render()
        }
    };
    write(&cfg, &data)
}

fn cmd_bound_state(flags: &Flags) -> Outcome {
    let (cfg, _) = resolve(flags, Format::Json)?;
    if cfg.model == ModelKind::Zero {
        return Err(Failure::Usage("bound-state needs --model coulomb-delta".into()));
    }
    let p = params(&cfg)?;
    let threshold = bound_state_threshold(p.gamma);
    let energy = find_bound_state(&p)?;
    let verdict = if energy.is_some() { "exists" } else { "no bound state" };
    let data = match cfg.format {
        Format::Json => Envelope::new(
            "bound-state",
            inputs(&cfg),
            json!({
                "threshold_alpha": threshold,
                "exists": energy.is_some(),
                "verdict": verdict,
                "energy": energy,
            }),
            json!({ "criterion": "bound state iff alpha < threshold_alpha" }),
        )
        .render(),
        Format::Csv => {
            let mut t = Table::new(&["gamma", "alpha", "threshold_alpha", "exists", "energy"]);
            t.push(vec![
                format_g17(p.gamma),
                format_g17(p.alpha),
                format_g17(threshold),
                energy.is_some().to_string(),
                format_g17(energy.unwrap_or(f64::NAN)),
            ]);
            t.render()
        }
    };
    write(&cfg, &data)
}

fn cmd_verify(flags: &Flags) -> Outcome {
    let (cfg, _) = resolve(flags, Format::Json)?;
    if cfg.model == ModelKind::Zero {
        return Err(Failure::Usage("verify needs --model coulomb-delta".into()));
    }
    let mut vc = VerifyConfig::new(params(&cfg)?);
    vc.budget = AccuracyBudget::absolute(cfg.tol)?;
    vc.inject_sign_flip = cfg.inject_sign_flip;
    let report = run_suite(&vc)?;
    for c in &report.checks {
        eprintln!("{:<28} {:?} ({:.3} s)", c.name, c.status, c.seconds);
    }
    let data = match cfg.format {
        Format::Json => Envelope::new(
            "verify",
            inputs(&cfg),
            json!({ "passed": report.passed(), "checks": report.checks }),
            json!({
                "pass": report.count(CheckStatus::Pass),
                "fail": report.count(CheckStatus::Fail),
                "skipped": report.count(CheckStatus::Skipped),
                "bound_states": report.bound_states,
            }),
        )
        .render(),
        Format::Csv => {
            let mut t = Table::new(&["check", "status", "discrepancy", "tolerance"]);
            let g = |x: Option<f64>| format_g17(x.unwrap_or(f64::NAN));
            for c in &report.checks {
                let status = serde_json::to_value(c.status).expect("status serializes");
                t.push(vec![
                    c.name.clone(),
                    status.as_str().unwrap_or_default().to_string(),
                    g(c.discrepancy),
                    g(c.tolerance),
                ]);
            }
            t.render()
        }
    };
    write(&cfg, &data)?;
    if report.passed() {
        Ok(())
    } else {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| c.status == CheckStatus::Fail)
            .map(|c| c.name.as_str())
            .collect();
        Err(Failure::Numeric(format!("verification failed: {}", failed.join(", "))))
    }
}
