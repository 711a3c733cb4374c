use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use teleport_core::closed_form::ReconciliationReport;
use teleport_core::spin_models::HeisenbergParams;
use teleport_core::sweeps::{
    evaluate_point, quick_reconciliation, records_to_csv, reproduce_figure, run_sweep, validate, write_text,
    Engine, FigureId, ModelSpec, SweepContext, SweepSpec, SweepVariable, ValidateOptions,
};

const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser)]
#[command(name = "thermal-teleport", version, about = "Teleportation through thermal Heisenberg channels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal efficiencies at a single parameter point.
    Point(PointArgs),
    /// Sweep one variable and write a CSV of records.
    Sweep(SweepArgs),
    /// Regenerate the datasets and plot script of one figure.
    Figure(FigureArgs),
    /// Run reconciliation, invariant suites and the classical-bound check.
    Validate(ValidateArgs),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// key=value file; command-line flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Saved reconciliation report to use instead of reconciling on the fly.
    #[arg(long)]
    reconciliation: Option<PathBuf>,
    /// oracle, closed or both.
    #[arg(long)]
    engine: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output path (file or directory, depending on the subcommand).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone, Default)]
struct ModelArgs {
    /// ising, xx, xy, xxx, xxz or raw.
    #[arg(long)]
    model: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    jx: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    jy: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    jz: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    ha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    hb: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    zeta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    bigj: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    delta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    field: Option<f64>,
    #[arg(long)]
    kt: Option<f64>,
}

#[derive(Args)]
struct PointArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    model: ModelArgs,
    /// kT, lambda, J or delta.
    #[arg(long)]
    var: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    to: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Args)]
struct FigureArgs {
    /// fig2 .. fig7
    id: String,
    #[command(flatten)]
    common: Common,
    /// Points per curve instead of the default resolution.
    #[arg(long)]
    steps: Option<usize>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    cases: Option<usize>,
    /// Perturb the closed forms' 1/3 constant by this amount.
    #[arg(long, allow_hyphen_values = true)]
    inject_fault: Option<f64>,
}

type Config = HashMap<String, String>;

fn load_config(path: Option<&Path>) -> Result<Config> {
    let mut cfg = Config::new();
    let Some(path) = path else { return Ok(cfg) };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("{}:{}: expected key=value", path.display(), n + 1))?;
        let v = v.trim().trim_matches('"');
        cfg.insert(k.trim().replace('-', "_").to_ascii_lowercase(), v.to_string());
    }
    Ok(cfg)
}

fn fill<T: FromStr>(slot: &mut Option<T>, cfg: &Config, key: &str) -> Result<()>
where
    T::Err: std::fmt::Display,
{
    if slot.is_none() {
        if let Some(v) = cfg.get(key) {
            *slot = Some(v.parse().map_err(|e| anyhow!("config key {key}: {e}"))?);
        }
    }
    Ok(())
}

impl Common {
    fn merge(&mut self, cfg: &Config) -> Result<()> {
        fill(&mut self.reconciliation, cfg, "reconciliation")?;
        fill(&mut self.engine, cfg, "engine")?;
        fill(&mut self.seed, cfg, "seed")?;
        fill(&mut self.out, cfg, "out")
    }

    fn engine(&self) -> Result<Engine> {
        Ok(self.engine.as_deref().unwrap_or("oracle").parse()?)
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    /// The oracle needs no conventions; the closed forms need a resolved report.
    fn context(&self, engine: Engine) -> Result<SweepContext> {
        if engine == Engine::Oracle {
            return Ok(SweepContext::oracle_only());
        }
        let report = match &self.reconciliation {
            Some(p) => ReconciliationReport::load(p)?,
            None => quick_reconciliation(self.seed())?,
        };
        if !report.is_resolved() {
            if engine == Engine::Closed {
                bail!("closed-form conventions are unresolved; rerun with --engine oracle");
            }
            eprintln!("warning: conventions unresolved, reporting oracle values only");
        }
        Ok(SweepContext::from_report(&report))
    }
}

impl ModelArgs {
    fn merge(&mut self, cfg: &Config) -> Result<()> {
        fill(&mut self.model, cfg, "model")?;
        for (slot, key) in [
            (&mut self.jx, "jx"),
            (&mut self.jy, "jy"),
            (&mut self.jz, "jz"),
            (&mut self.ha, "ha"),
            (&mut self.hb, "hb"),
            (&mut self.lambda, "lambda"),
            (&mut self.zeta, "zeta"),
            (&mut self.bigj, "bigj"),
            (&mut self.delta, "delta"),
            (&mut self.field, "field"),
            (&mut self.kt, "kt"),
        ] {
            fill(slot, cfg, key)?;
        }
        Ok(())
    }

    /// Parameters needed only by the swept variable may be absent.
    fn spec(&self, swept: Option<SweepVariable>) -> Result<ModelSpec> {
        let need = |v: Option<f64>, name: &str, var: SweepVariable| -> Result<f64> {
            match (v, swept) {
                (Some(x), _) => Ok(x),
                (None, Some(s)) if s == var => Ok(0.0),
                _ => Err(anyhow!("--{name} is required for this model")),
            }
        };
        let model = self.model.as_deref().ok_or_else(|| anyhow!("--model is required"))?;
        Ok(match model.to_ascii_lowercase().as_str() {
            "ising" => ModelSpec::Ising {
                lambda: need(self.lambda, "lambda", SweepVariable::Lambda)?,
            },
            "xx" => ModelSpec::Xx {
                lambda: need(self.lambda, "lambda", SweepVariable::Lambda)?,
            },
            "xy" => ModelSpec::Xy {
                lambda: need(self.lambda, "lambda", SweepVariable::Lambda)?,
                zeta: self.zeta.ok_or_else(|| anyhow!("--zeta is required for the xy model"))?,
            },
            "xxx" => ModelSpec::Xxx {
                exchange_j: need(self.bigj, "bigj", SweepVariable::J)?,
                field_h: self.field.unwrap_or(0.0),
            },
            "xxz" => ModelSpec::Xxz {
                exchange_j: need(self.bigj, "bigj", SweepVariable::J)?,
                delta: need(self.delta, "delta", SweepVariable::Delta)?,
                field_h: self.field.unwrap_or(0.0),
            },
            "raw" => ModelSpec::Raw {
                params: HeisenbergParams::new(
                    self.jx.unwrap_or(0.0),
                    self.jy.unwrap_or(0.0),
                    self.jz.unwrap_or(0.0),
                    self.ha.unwrap_or(0.0),
                    self.hb.unwrap_or(0.0),
                )?,
            },
            other => bail!("unknown model {other:?} (expected ising, xx, xy, xxx, xxz or raw)"),
        })
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => Ok(write_text(p, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn point(mut a: PointArgs) -> Result<()> {
    let cfg = load_config(a.common.config.as_deref())?;
    a.common.merge(&cfg)?;
    a.model.merge(&cfg)?;
    let engine = a.common.engine()?;
    let kt = a.model.kt.ok_or_else(|| anyhow!("--kt is required"))?;
    let ctx = a.common.context(engine)?;
    let record = evaluate_point(&ctx, &a.model.spec(None)?, kt, engine)?;
    emit(a.common.out.as_deref(), &(serde_json::to_string_pretty(&record)? + "\n"))
}

fn sweep(mut a: SweepArgs) -> Result<()> {
    let cfg = load_config(a.common.config.as_deref())?;
    a.common.merge(&cfg)?;
    a.model.merge(&cfg)?;
    fill(&mut a.var, &cfg, "var")?;
    fill(&mut a.from, &cfg, "from")?;
    fill(&mut a.to, &cfg, "to")?;
    fill(&mut a.steps, &cfg, "steps")?;
    let engine = a.common.engine()?;
    let variable: SweepVariable = a.var.as_deref().unwrap_or("kT").parse()?;
    let spec = SweepSpec {
        model: a.model.spec(Some(variable))?,
        variable,
        from: a.from.ok_or_else(|| anyhow!("--from is required"))?,
        to: a.to.ok_or_else(|| anyhow!("--to is required"))?,
        steps: a.steps.unwrap_or(100),
        kt: match variable {
            SweepVariable::Kt => 1.0,
            _ => a.model.kt.ok_or_else(|| anyhow!("--kt is required when sweeping {}", variable.name()))?,
        },
        engine,
    };
    spec.validate()?;
    let ctx = a.common.context(engine)?;
    let records = run_sweep(&ctx, &spec)?;
    emit(a.common.out.as_deref(), &records_to_csv(&records))
}

fn figure(mut a: FigureArgs) -> Result<()> {
    let cfg = load_config(a.common.config.as_deref())?;
    a.common.merge(&cfg)?;
    fill(&mut a.steps, &cfg, "steps")?;
    let id: FigureId = a.id.parse()?;
    let engine = a.common.engine()?;
    let ctx = a.common.context(engine)?;
    let outdir = a.common.out.clone().unwrap_or_else(|| PathBuf::from(id.name()));
    let files = reproduce_figure(&ctx, id, &outdir, engine, a.steps)?;
    for f in files {
        println!("{}", f.display());
    }
    Ok(())
}

fn validate_cmd(mut a: ValidateArgs) -> Result<ExitCode> {
    let cfg = load_config(a.common.config.as_deref())?;
    a.common.merge(&cfg)?;
    fill(&mut a.cases, &cfg, "cases")?;
    fill(&mut a.inject_fault, &cfg, "inject_fault")?;
    let mut opts = ValidateOptions::new(a.common.seed(), a.cases.unwrap_or(200));
    opts.fault = a.inject_fault;
    let report = validate(&opts)?;
    let out = a.common.out.clone().unwrap_or_else(|| PathBuf::from("validation.json"));
    write_text(&out, &(serde_json::to_string_pretty(&report)? + "\n"))?;
    for c in &report.checks {
        println!(
            "{} {:<32} max_error={:.3e} tol={:.1e} cases={}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.max_error,
            c.tolerance,
            c.cases
        );
    }
    println!(
        "mapping: {}",
        report.mapping.as_deref().unwrap_or("unresolved")
    );
    println!("report: {}", out.display());
    Ok(ExitCode::from(report.exit_code() as u8))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Point(a) => point(a).map(|_| ExitCode::SUCCESS),
        Command::Sweep(a) => sweep(a).map(|_| ExitCode::SUCCESS),
        Command::Figure(a) => figure(a).map(|_| ExitCode::SUCCESS),
        Command::Validate(a) => validate_cmd(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
