//! Command-line front-end: parameter files in, JSON/CSV reports out.
//!
//! Exit status is 0 when every check passes, 1 when a check fails and 2 on
//! any input problem (unreadable or malformed files, parameters on a
//! singular manifold, exceeded budgets).

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex;
use serde::Serialize;
use sha2::{Digest, Sha256};

use sixvertex::integral::{default_eps_ladder, homogeneous_limit, residue_sum, EvalPath, HomogeneousPoint, Offsets};
use sixvertex::io::{GoldenRecord, ParamFile, GOLDEN_AGREEMENT};
use sixvertex::oracle::{partition_function, zbar_value};
use sixvertex::poly::{interpolate_zbar, InterpolationOptions, DEFAULT_MAX_LEN};
use sixvertex::suite::{verify, SuiteConfig, SuiteInput};
use sixvertex::VerificationReport;

pub const EXIT_PASS: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "sixvertex", version, about = "Reflecting-end six-vertex model: partition function and invariant checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Parameter file (JSON).
    #[arg(long, global = true)]
    pub params: Option<PathBuf>,
    /// Tolerance override `name=value`; repeatable.
    #[arg(long = "tol", value_parser = parse_tolerance, global = true)]
    pub tol: Vec<(String, f64)>,
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Worker threads; 0 lets the runtime decide.
    #[arg(long, env = "SIXVERTEX_PARALLELISM", default_value_t = 0, global = true)]
    #[serde(skip)]
    pub parallelism: usize,
    /// Report destination; standard output when absent.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Largest L for which Z̄ is interpolated.
    #[arg(long = "max-L", default_value_t = DEFAULT_MAX_LEN, global = true)]
    pub max_len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Run the full invariant suite.
    Verify,
    /// Partition function from the operator products.
    ComputeZ {
        /// Emit a golden-corpus record instead; fails unless the residue sum
        /// agrees to 1e-10.
        #[arg(long)]
        golden: bool,
    },
    /// Partition function from the residue sum, compared with the operator value.
    ComputeIntegral,
    /// Homogeneous limit at λ = lambda[0], μ = mu[0].
    HomogLimit {
        /// Decreasing ε ladder, comma separated.
        #[arg(long, value_delimiter = ',')]
        eps: Option<Vec<f64>>,
    },
    /// Interpolate Z̄ and export its coefficient tensor.
    Interpolate,
    /// Vary one parameter over a grid and tabulate every check residual.
    Sweep {
        /// `gamma.re`, `h.im`, `mu[k].re`, `lambda[k].im`, `lambda0.re`, ...
        #[arg(long)]
        vary: String,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long, default_value_t = 5)]
        steps: usize,
    },
}

fn parse_tolerance(s: &str) -> Result<(String, f64), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let tol: f64 = value.parse().map_err(|e| format!("tolerance for `{name}`: {e}"))?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(format!("tolerance for `{name}` must be positive and finite"));
    }
    Ok((name.to_string(), tol))
}

/// What a command produced: the text to emit and whether its checks passed.
struct Outcome {
    text: String,
    pass: bool,
}

fn load_params(path: Option<&Path>) -> anyhow::Result<ParamFile> {
    let path = path.ok_or_else(|| anyhow!("--params is required"))?;
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    ParamFile::parse(&text).with_context(|| format!("parsing {}", path.display()))
}

/// SHA-256 over the command, parameters, seed, tolerances and budget.
/// Thread count and output location do not enter.
pub fn config_hash(command: &Command, params: &ParamFile, common: &Common) -> String {
    let canonical = serde_json::json!({
        "command": command,
        "params": params,
        "seed": common.seed,
        "tolerances": common.tol.iter().cloned().collect::<BTreeMap<_, _>>(),
        "format": common.format,
        "max_L": common.max_len,
    });
    let digest = Sha256::digest(canonical.to_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn pair(z: Complex<f64>) -> [f64; 2] {
    [z.re, z.im]
}

fn suite_config(common: &Common) -> SuiteConfig {
    SuiteConfig {
        seed: common.seed,
        interpolation: InterpolationOptions {
            max_len: common.max_len,
            ..Default::default()
        },
        overrides: common.tol.iter().cloned().collect(),
        ..Default::default()
    }
}

fn run_suite(file: &ParamFile, common: &Common) -> anyhow::Result<VerificationReport> {
    let input = SuiteInput {
        params: file.model_params(),
        lambdas: file.lambdas(),
        lambda0: file.lambda0(),
    };
    let report = verify(&input, &suite_config(common))?;
    if let Some((name, _)) = common.tol.iter().find(|(name, _)| report.get(name).is_none()) {
        bail!("tolerance override for unknown check `{name}`");
    }
    Ok(report)
}

fn report_text(hash: &str, report: &VerificationReport, format: Format) -> anyhow::Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&serde_json::json!({
            "config_hash": hash,
            "checks": report.rows(),
            "pass": report.all_pass(),
        }))? + "\n"),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["name", "anchor", "residual", "tol", "pass"])?;
            for row in report.rows() {
                w.write_record([
                    row.name.clone(),
                    row.anchor.clone(),
                    format!("{:e}", row.residual),
                    format!("{:e}", row.tol),
                    row.pass.to_string(),
                ])?;
            }
            Ok(String::from_utf8(w.into_inner()?)?)
        }
    }
}

fn json_text(value: serde_json::Value) -> anyhow::Result<String> {
    Ok(serde_json::to_string_pretty(&value)? + "\n")
}

/// Sets one scalar component named by `spec` (e.g. `mu[1].im`).
fn set_component(file: &mut ParamFile, spec: &str, value: f64) -> anyhow::Result<()> {
    let (target, part) = spec.rsplit_once('.').ok_or_else(|| anyhow!("sweep target `{spec}` lacks .re/.im"))?;
    let index = match part {
        "re" => 0,
        "im" => 1,
        _ => bail!("sweep target `{spec}`: component must be re or im"),
    };
    let slot: &mut [f64; 2] = match target {
        "gamma" => &mut file.gamma,
        "h" => &mut file.h,
        "lambda0" => file.lambda0.get_or_insert([0.0, 0.0]),
        _ => {
            let (name, rest) = target.split_once('[').ok_or_else(|| anyhow!("unknown sweep target `{spec}`"))?;
            let k: usize = rest.trim_end_matches(']').parse().with_context(|| format!("index in `{spec}`"))?;
            let list = match name {
                "mu" => &mut file.mu,
                "lambda" => &mut file.lambda,
                _ => bail!("unknown sweep target `{spec}`"),
            };
            let len = list.len();
            list.get_mut(k).ok_or_else(|| anyhow!("`{spec}`: index {k} out of range for {len} entries"))?
        }
    };
    slot[index] = value;
    Ok(())
}

fn execute(cli: &Cli) -> anyhow::Result<Outcome> {
    let common = &cli.common;
    let file = load_params(common.params.as_deref())?;
    let hash = config_hash(&cli.command, &file, common);
    let params = file.model_params();
    let lambdas = file.lambdas();
    match &cli.command {
        Command::Verify => {
            let report = run_suite(&file, common)?;
            Ok(Outcome {
                text: report_text(&hash, &report, common.format)?,
                pass: report.all_pass(),
            })
        }
        Command::ComputeZ { golden: true } => match GoldenRecord::compute(&params, &lambdas)? {
            Some(record) => Ok(Outcome {
                text: json_text(serde_json::to_value(&record)?)?,
                pass: true,
            }),
            None => {
                let gap = sixvertex::scalar::rel_diff(partition_function(&params, &lambdas)?, residue_sum(&params, &lambdas)?);
                bail!("evaluation paths disagree by {gap:e}, above the golden threshold {GOLDEN_AGREEMENT:e}")
            }
        },
        Command::ComputeZ { golden: false } => {
            let z = partition_function(&params, &lambdas)?;
            let zbar = zbar_value(&params, &lambdas)?;
            Ok(Outcome {
                text: json_text(serde_json::json!({"config_hash": hash, "Z": pair(z), "Zbar": pair(zbar)}))?,
                pass: true,
            })
        }
        Command::ComputeIntegral => {
            let integral = residue_sum(&params, &lambdas)?;
            let oracle = partition_function(&params, &lambdas)?;
            let discrepancy = sixvertex::scalar::rel_diff(integral, oracle);
            let tol = common.tol.iter().find(|(n, _)| n == "integral_representation").map_or(1e-9, |t| t.1);
            Ok(Outcome {
                text: json_text(serde_json::json!({
                    "config_hash": hash,
                    "Z": pair(integral),
                    "Z_oracle": pair(oracle),
                    "discrepancy": discrepancy,
                    "tol": tol,
                    "pass": discrepancy < tol,
                }))?,
                pass: discrepancy < tol,
            })
        }
        Command::HomogLimit { eps } => {
            let ladder = eps.clone().unwrap_or_else(default_eps_ladder);
            let point = HomogeneousPoint {
                gamma: params.gamma,
                h: params.h,
                len: params.len(),
                lambda: lambdas[0],
                mu: params.mu[0],
            };
            let offsets = Offsets::roots_of_unity(params.len(), 0.3);
            let oracle = homogeneous_limit(&point, &ladder, &offsets, EvalPath::Oracle)?;
            let residues = homogeneous_limit(&point, &ladder, &offsets, EvalPath::ResidueSum)?;
            let agreement = sixvertex::scalar::rel_diff(oracle.value, residues.value);
            let tol = common.tol.iter().find(|(n, _)| n == "homogeneous_dual_path").map_or(1e-6, |t| t.1);
            let entry = |e: &sixvertex::interp::Extrapolation<f64>| {
                serde_json::json!({"value": pair(e.value), "error": e.error, "diverged": e.diverged, "samples": e.samples})
            };
            Ok(Outcome {
                text: json_text(serde_json::json!({
                    "config_hash": hash,
                    "eps": ladder,
                    "oracle": entry(&oracle),
                    "residue_sum": entry(&residues),
                    "agreement": agreement,
                    "tol": tol,
                    "pass": agreement < tol,
                }))?,
                pass: agreement < tol,
            })
        }
        Command::Interpolate => {
            let opts = InterpolationOptions {
                max_len: common.max_len,
                ..Default::default()
            };
            let poly = interpolate_zbar(&params, &opts)?;
            Ok(Outcome {
                text: json_text(poly.to_json())?,
                pass: true,
            })
        }
        Command::Sweep { vary, from, to, steps } => {
            if *steps == 0 {
                bail!("--steps must be at least 1");
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header_written = false;
            let mut pass = true;
            for k in 0..*steps {
                let value = if *steps == 1 {
                    *from
                } else {
                    from + (to - from) * k as f64 / (*steps - 1) as f64
                };
                let mut point = file.clone();
                set_component(&mut point, vary, value)?;
                point.validate()?;
                let report = run_suite(&point, common).with_context(|| format!("{vary} = {value}"))?;
                if !header_written {
                    let names = std::iter::once(vary.clone()).chain(report.rows().iter().map(|r| r.name.clone()));
                    w.write_record(names)?;
                    header_written = true;
                }
                pass &= report.all_pass();
                let cells = std::iter::once(format!("{value:e}")).chain(report.rows().iter().map(|r| format!("{:e}", r.residual)));
                w.write_record(cells)?;
            }
            Ok(Outcome {
                text: String::from_utf8(w.into_inner()?)?,
                pass,
            })
        }
    }
}

fn emit(text: &str, output: Option<&Path>) -> anyhow::Result<()> {
    match output {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(out.flush()?)
        }
    }
}

/// Executes the parsed command and returns the process exit status.
pub fn run(cli: &Cli) -> i32 {
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.common.parallelism).build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: thread pool: {e}");
            return EXIT_INPUT;
        }
    };
    let result = pool.install(|| execute(cli)).and_then(|outcome| {
        emit(&outcome.text, cli.common.output.as_deref())?;
        Ok(outcome.pass)
    });
    match result {
        Ok(true) => EXIT_PASS,
        Ok(false) => EXIT_CHECK_FAILED,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_INPUT
        }
    }
}
