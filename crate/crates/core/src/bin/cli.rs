//! Command line front end: dossiers, verification runs, orbit and Sha
//! dumps, point-count oracle prefixes, and Brauer-Siegel sweep tables.
//! Exit codes: 0 success, 1 failed verification (first counterexample on
//! stderr), 2 invalid parameters, 3 cap exceeded, 4 broken internal
//! identity.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sextic_twist::error::{Error, Result};
use sextic_twist::ff::Tower;
use sextic_twist::oracle::{taylor_coeffs, OracleCaps};
use sextic_twist::orbits::{enumerate_orbits, TwistParams};
use sextic_twist::report::{
    assemble_dossier, dossier_csv, dossier_json, sha_summary, sweep_csv, sweep_rows, OrbitRow,
    PipelineConfig,
};
use sextic_twist::verify::{run_verify, VerifyOptions};

#[derive(Parser)]
#[command(
    name = "sextic-twist",
    version,
    about = "Exact L-functions and BSD dossiers for sextic twists y^2 = x^3 + t^q - t over F_r(t)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct PointArgs {
    /// Characteristic, a prime > 3
    #[arg(long)]
    p: u64,
    /// Constant field degree: r = p^nu
    #[arg(long, default_value_t = 1)]
    nu: u32,
    /// Twist degree exponent: q = p^f
    #[arg(long, default_value_t = 1)]
    f: u32,
}

impl PointArgs {
    fn params(&self) -> Result<TwistParams> {
        TwistParams::new(self.p, self.nu, self.f)
    }
}

#[derive(Args, Clone, Default)]
struct CapArgs {
    /// Cap on the ambient field size p^M
    #[arg(long)]
    cap_ambient: Option<u64>,
    /// Cap on character-sum enumeration
    #[arg(long)]
    cap_enum: Option<u64>,
}

fn env_cap(name: &str) -> Result<Option<u64>> {
    match std::env::var(name) {
        Ok(text) => text
            .parse()
            .map(Some)
            .map_err(|_| Error::InvalidParams(format!("{name} = {text} is not a number"))),
        Err(_) => Ok(None),
    }
}

impl CapArgs {
    /// Flags beat environment variables beat defaults; the environment can
    /// override caps and nothing else.
    fn pipeline(&self) -> Result<PipelineConfig> {
        let mut config = PipelineConfig::default();
        if let Some(cap) = self.cap_ambient.or(env_cap("SEXTIC_TWIST_CAP_AMBIENT")?) {
            config.ff.ambient_cap = cap;
        }
        if let Some(cap) = self.cap_enum.or(env_cap("SEXTIC_TWIST_CAP_ENUM")?) {
            config.enum_cap = cap;
        }
        Ok(config)
    }
}

fn oracle_caps() -> Result<OracleCaps> {
    let mut caps = OracleCaps::default();
    if let Some(cap) = env_cap("SEXTIC_TWIST_CAP_ORACLE")? {
        caps.transform = cap;
    }
    Ok(caps)
}

#[derive(Subcommand)]
enum Command {
    /// Compute the full dossier for one twist
    Lfun {
        #[command(flatten)]
        point: PointArgs,
        /// Output format: json, csv, or text
        #[arg(long, default_value = "json")]
        format: String,
        /// Write here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Run the invariant suite over the default grid or one point
    Verify {
        /// Restrict the grid to a single characteristic
        #[arg(long)]
        p: Option<u64>,
        #[arg(long)]
        nu: Option<u32>,
        #[arg(long)]
        f: Option<u32>,
        /// Comma-separated check groups to run
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<String>>,
        /// Depth cap for oracle Taylor prefixes
        #[arg(long, default_value_t = 6)]
        oracle_max: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Dump the unit orbit table as JSON
    Orbits {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Dump Sha window statistics as JSON
    Sha {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Brauer-Siegel sweep over twist exponents at a fixed constant field
    Sweep {
        /// Characteristic, a prime > 3
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        nu: u32,
        /// Comma-separated list of twist exponents f
        #[arg(long, value_delimiter = ',')]
        f: Vec<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        caps: CapArgs,
    },
    /// Taylor prefix of -log L by direct point counting
    Oracle {
        #[command(flatten)]
        point: PointArgs,
        /// Prefix depth: coefficients c_1..c_n
        #[arg(long, default_value_t = 6)]
        n: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::InvalidParams(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dossier_text(d: &sextic_twist::report::Dossier) -> String {
    let mut s = String::new();
    s.push_str(&format!(
        "E: y^2 = x^3 + t^{} - t over F_{}(t)   (p = {}, nu = {}, f = {})\n",
        d.params.q, d.params.r, d.params.p, d.params.nu, d.params.f
    ));
    s.push_str(&format!(
        "L degree {} | functional equation sign {}\n",
        d.l_polynomial.degree, d.functional_equation_sign
    ));
    s.push_str(&format!(
        "rank {} | L* = {} | ord_p(L*) = {}\n",
        d.rank, d.lstar, d.ord_p_lstar
    ));
    s.push_str(&format!(
        "Reg|Sha| = {}{} | dim Sha = {}\n",
        d.reg_sha,
        d.sha_order
            .as_ref()
            .map(|v| format!(" (|Sha| = {v} at rank 0)"))
            .unwrap_or_default(),
        d.dim_sha
    ));
    s.push_str(&format!(
        "Brauer-Siegel ratio {:.12} (decomposed route {:.12})\n",
        d.brauer_siegel.ratio, d.brauer_siegel.via_special_value
    ));
    s.push_str(&format!("checks passed: {}\n", d.checks.len()));
    s
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Lfun {
            point,
            format,
            out,
            caps,
        } => {
            let params = point.params()?;
            let dossier = assemble_dossier(&params, &caps.pipeline()?)?;
            let text = match format.as_str() {
                "json" => dossier_json(&dossier),
                "csv" => dossier_csv(&dossier),
                "text" => dossier_text(&dossier),
                other => {
                    return Err(Error::InvalidParams(format!(
                        "unknown format {other}; expected json, csv, or text"
                    )))
                }
            };
            emit(&out, &text)?;
            Ok(0)
        }
        Command::Verify {
            p,
            nu,
            f,
            only,
            oracle_max,
            out,
            caps,
        } => {
            let mut options = VerifyOptions {
                only,
                oracle_max,
                pipeline: caps.pipeline()?,
                ..VerifyOptions::default()
            };
            if let Some(p) = p {
                options.grid = vec![(p, nu.unwrap_or(1), f.unwrap_or(1))];
            } else if nu.is_some() || f.is_some() {
                return Err(Error::InvalidParams(
                    "--nu/--f restrict the grid only together with --p".into(),
                ));
            }
            let summary = run_verify(&options)?;
            emit(&out, &summary.json())?;
            if let Some(first) = summary.first_failure() {
                eprintln!(
                    "{}",
                    serde_json::to_string_pretty(first).expect("outcome serializes")
                );
                return Ok(1);
            }
            Ok(0)
        }
        Command::Orbits { point, out, caps } => {
            let params = point.params()?;
            let config = caps.pipeline()?;
            let tower = Tower::build(params.p, &params.required_degrees(), config.ff)?;
            let rows: Vec<OrbitRow> = enumerate_orbits(&params, &tower, 6, true)?
                .iter()
                .map(|o| OrbitRow {
                    rep_i: o.rep_i,
                    rep_j: o.rep_j,
                    size: o.size,
                    alpha_degree: o.alpha_degree(&params),
                })
                .collect();
            let mut text = serde_json::to_string_pretty(&rows).expect("rows serialize");
            text.push('\n');
            emit(&out, &text)?;
            Ok(0)
        }
        Command::Sha { point, out } => {
            let params = point.params()?;
            let summary = sha_summary(&params)?;
            emit(&out, &summary.json())?;
            Ok(0)
        }
        Command::Sweep {
            p,
            nu,
            f,
            out,
            caps,
        } => {
            let rows = sweep_rows(p, nu, &f, &caps.pipeline()?)?;
            emit(&out, &sweep_csv(&rows))?;
            Ok(0)
        }
        Command::Oracle { point, n, out } => {
            let params = point.params()?;
            let coeffs = taylor_coeffs(&params, n, &oracle_caps()?)?;
            let value = serde_json::json!({
                "p": params.p,
                "nu": params.nu,
                "f": params.f,
                "q": params.q,
                "r": params.r,
                "depth": n,
                "coefficients": coeffs.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            });
            let mut text = serde_json::to_string_pretty(&value).expect("value serializes");
            text.push('\n');
            emit(&out, &text)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
