//! `qitineq`: run verification campaigns, evaluate measures on given matrices,
//! and print the qubit demo tables.

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qitineq::algebra::{BlockDiagonalElement, DensityElement, TracialMap};
use qitineq::campaign::{
    parse_checks, parse_map_kinds, parse_pair_families, parse_shapes, run_campaign, CampaignConfig, DEFAULT_OUTPUT,
};
use qitineq::checks::{check_alpha_chain, check_classical_heisenberg, check_classical_schrodinger};
use qitineq::functions::{FunctionPair, ScalarFunction};
use qitineq::json::{parse_element, parse_map, ElementJson, MatrixJson};
use qitineq::linalg::{pauli, ComplexMatrix};
use qitineq::measures::{leading_entry, MeasureContext};
use qitineq::report::{format_sig6, to_json_string, DEFAULT_TOLERANCE};
use qitineq::{Element, Error};

const USAGE_ERROR: u8 = 2;
const SEED_ENV: &str = "QITINEQ_SEED";

#[derive(Parser)]
#[command(name = "qitineq", version, about = "Verify operator inequalities for tracial maps on random instances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run checkers over seeded random instances and write a JSON report.
    Verify(VerifyArgs),
    /// Evaluate one measure on the given density and operators.
    Eval(EvalArgs),
    /// Print a qubit sweep table.
    Demo {
        #[arg(value_enum)]
        name: Demo,
    },
}

#[derive(clap::Args)]
struct VerifyArgs {
    /// `all` or a comma-separated list of check ids.
    #[arg(long, default_value = "all")]
    checks: String,
    /// Instances per check.
    #[arg(long, default_value_t = 1000)]
    instances: usize,
    /// Master seed; the QITINEQ_SEED environment variable takes precedence.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Semicolon-separated block sizes, e.g. "2,2;3".
    #[arg(long, default_value = "2;3;4;2,2")]
    shapes: String,
    #[arg(long, default_value = "all")]
    map_kinds: String,
    #[arg(long, default_value = "alpha_powers,random_powers,poly_exp_mix")]
    pair_families: String,
    #[arg(long, default_value_t = DEFAULT_TOLERANCE)]
    tolerance: f64,
    #[arg(long, default_value = DEFAULT_OUTPUT)]
    out: String,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Table,
}

#[derive(clap::Args)]
struct EvalArgs {
    #[arg(value_enum)]
    measure: Measure,
    /// Density: a JSON file or inline JSON (matrix or block element).
    #[arg(long)]
    rho: String,
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: Option<String>,
    #[arg(long, default_value = "id")]
    f: String,
    #[arg(long, default_value = "const:1")]
    g: String,
    /// Map JSON (file or inline); defaults to the scalar trace on the density's shape.
    #[arg(long)]
    map: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Measure {
    Cov,
    Var,
    Corr,
    Skew,
    SymCorr,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum Demo {
    Heisenberg,
    Schrodinger,
    AlphaChain,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Verify(args) => verify(args),
        Command::Eval(args) => eval(args).map(|()| 0),
        Command::Demo { name } => demo(name).map(|()| 0),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(USAGE_ERROR)
        }
    }
}

fn config_from(args: &VerifyArgs) -> Result<CampaignConfig, Error> {
    let seed = match std::env::var(SEED_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("{SEED_ENV}={s:?}: {e}")))?,
        Err(_) => args.seed,
    };
    let config = CampaignConfig {
        checks: parse_checks(&args.checks)?,
        instances_per_check: args.instances,
        seed,
        shapes: parse_shapes(&args.shapes)?,
        map_kinds: parse_map_kinds(&args.map_kinds)?,
        pair_families: parse_pair_families(&args.pair_families)?,
        tolerance: args.tolerance,
        output_path: args.out.clone(),
    };
    config.validate()?;
    Ok(config)
}

fn verify(args: VerifyArgs) -> Result<u8, Error> {
    let config = config_from(&args)?;
    let report = run_campaign(&config)?;
    let json = report.to_json();
    fs::write(&config.output_path, &json)
        .map_err(|e| Error::Parse(format!("cannot write {}: {e}", config.output_path)))?;
    match args.format {
        Format::Table => print!("{}", report.summary_table()),
        Format::Json => println!("{json}"),
    }
    Ok(report.exit_code() as u8)
}

/// Inline JSON, or the contents of the named file.
fn read_json_arg(arg: &str) -> Result<String, Error> {
    let trimmed = arg.trim_start();
    if trimmed.starts_with('{') || trimmed.starts_with('[') {
        return Ok(arg.to_string());
    }
    fs::read_to_string(Path::new(arg)).map_err(|e| Error::Parse(format!("cannot read {arg}: {e}")))
}

fn element_arg(arg: &str, name: &str) -> Result<Element, Error> {
    parse_element(&read_json_arg(arg)?).map_err(|e| Error::Parse(format!("{name}: {e}")))
}

fn eval(args: EvalArgs) -> Result<(), Error> {
    let rho = element_arg(&args.rho, "rho")?;
    let a = element_arg(&args.a, "A")?;
    let map = match &args.map {
        Some(m) => parse_map(&read_json_arg(m)?)?,
        None => TracialMap::ScalarTrace(rho.shape().clone()),
    };
    let pair = FunctionPair::new(args.f.parse::<ScalarFunction>()?, args.g.parse::<ScalarFunction>()?);
    let ctx = MeasureContext::new(map, rho, pair)?;
    let b = || match &args.b {
        Some(b) => element_arg(b, "B"),
        None => Err(Error::Precondition("this measure needs --b".into())),
    };
    let value = match args.measure {
        Measure::Cov => ctx.covariance(&a, &b()?)?,
        Measure::Var => ctx.variance(&a)?,
        Measure::Corr => ctx.correlation(&a, &b()?)?,
        Measure::Skew => ctx.skew_information(&a)?,
        Measure::SymCorr => ctx.symmetric_correlation(&a, &b()?)?,
    };
    println!("{}", element_json(&value));
    Ok(())
}

/// A single block prints as a bare matrix.
fn element_json(x: &Element) -> String {
    let out = if x.blocks().len() == 1 {
        to_json_string(&MatrixJson::from_matrix(x.block(0)))
    } else {
        to_json_string(&ElementJson::from_element(x))
    };
    out.expect("plain data serializes")
}

fn qubit(p: f64) -> Result<DensityElement<f64>, Error> {
    let rho = BlockDiagonalElement::single(ComplexMatrix::from_real_diagonal(&[p, 1.0 - p]))?;
    DensityElement::new(TracialMap::ScalarTrace(rho.shape().clone()), rho)
}

fn row(cells: &[f64]) -> String {
    cells.iter().map(|&x| format!("{:>13}", format_sig6(x))).collect::<Vec<_>>().join(" ")
}

fn header(names: &[&str]) -> String {
    names.iter().map(|n| format!("{n:>13}")).collect::<Vec<_>>().join(" ")
}

fn re(x: &Element) -> f64 {
    leading_entry(x).re
}

fn demo(name: Demo) -> Result<(), Error> {
    let sx = BlockDiagonalElement::single(pauli::x::<f64>())?;
    let sy = BlockDiagonalElement::single(pauli::y::<f64>())?;
    match name {
        Demo::Heisenberg | Demo::Schrodinger => {
            let schrodinger = matches!(name, Demo::Schrodinger);
            if schrodinger {
                println!("{}", header(&["p", "var_product", "re_cov_sq", "commutator", "bound", "margin"]));
            } else {
                println!("{}", header(&["p", "var_x", "var_y", "product", "bound", "margin"]));
            }
            for k in 1..=19 {
                let p = k as f64 * 0.05;
                let rho = qubit(p)?;
                let ctx = MeasureContext::new(rho.map().clone(), rho.rho().clone(), FunctionPair::classical())?;
                let (vx, vy) = (re(&ctx.variance(&sx)?), re(&ctx.variance(&sy)?));
                let comm = leading_entry(&ctx.phi_of(&[ctx.rho(), &sx.commutator(&sy)?])?);
                let commutator = 0.25 * comm.norm_sqr();
                if schrodinger {
                    let cov = re(&ctx.covariance(&sx, &sy)?);
                    let margin = check_classical_schrodinger(&rho, &sx, &sy)?.margin("schrodinger").unwrap_or(f64::NAN);
                    println!("{}", row(&[p, vx * vy, cov * cov, commutator, cov * cov + commutator, margin]));
                } else {
                    let margin = check_classical_heisenberg(&rho, &sx, &sy)?.min_margin();
                    println!("{}", row(&[p, vx, vy, vx * vy, commutator, margin]));
                }
            }
        }
        Demo::AlphaChain => {
            println!("{}", header(&["alpha", "skew_alpha", "skew_half", "variance", "margin"]));
            let rho = qubit(0.75)?;
            for k in 1..=9 {
                let alpha = k as f64 * 0.1;
                let ctx = |pair| MeasureContext::new(rho.map().clone(), rho.rho().clone(), pair);
                let skew_alpha = re(&ctx(FunctionPair::alpha(alpha))?.skew_information(&sx)?);
                let skew_half = re(&ctx(FunctionPair::alpha(0.5))?.skew_information(&sx)?);
                let var = re(&ctx(FunctionPair::classical())?.variance(&sx)?);
                let margin = check_alpha_chain(&rho, alpha, &sx)?.min_margin();
                println!("{}", row(&[alpha, skew_alpha, skew_half, var, margin]));
            }
        }
    }
    Ok(())
}
