//! Dossier assembly and serialization.  A dossier is the full record for
//! one twist: the L-polynomial with both construction routes compared,
//! rank, special value, regulator-Sha product, Sha dimension, structural
//! constants, the sign table, and a log of every invariant that was
//! checked on the way.  Serialization is canonical: fixed key order,
//! decimal strings for big integers, so parse/re-emit is byte-identical.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bsd::{bsd_report, ln_rational, structural_constants, BsdReport};
use crate::char_sums::ENUM_CAP;
use crate::cyclo::{padic_ord_rational, CycloRing};
use crate::error::{Error, Result};
use crate::ff::{FfConfig, Tower};
use crate::lfunction::{functional_equation_sign, l_poly_orbit, l_poly_sextic};
use crate::orbits::TwistParams;
use crate::sha::{dim_sha, sha_orbits};

/// Everything an assembly run is allowed to choose or bound.
#[derive(Copy, Clone, Debug)]
pub struct PipelineConfig {
    pub ff: FfConfig,
    /// Shift alpha of the additive character psi_alpha; any unit gives the
    /// same dossier.
    pub psi_unit: u64,
    /// Cap on character-sum enumeration.
    pub enum_cap: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            ff: FfConfig::default(),
            psi_unit: 1,
            enum_cap: ENUM_CAP,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsBlock {
    pub p: u64,
    pub nu: u32,
    pub f: u32,
    pub q: u64,
    pub r: u64,
}

/// Arbitrary choices made during the run.  The rest of the dossier is
/// independent of them; see `content_equal`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChoicesBlock {
    pub generator_index: u32,
    pub psi_unit: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LBlock {
    pub degree: u64,
    /// Constant term first, decimal strings.
    pub coefficients: Vec<String>,
    /// SHA-256 over the comma-joined coefficient strings.
    pub sha256: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuralBlock {
    pub height_exponent: u64,
    pub conductor_degree: u64,
    pub reduction_at_roots: String,
    pub reduction_at_infinity: String,
    pub j_invariant: u64,
    pub discriminant: String,
    pub torsion_order: u64,
    pub tamagawa_product: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BrauerSiegelBlock {
    pub ratio: f64,
    /// Same ratio through the special-value decomposition; must agree with
    /// `ratio` to 1e-12.
    pub via_special_value: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EpsilonRow {
    pub i: u64,
    pub j: u64,
    pub orbit_size: u32,
    pub zeta6_exponent: u64,
    pub unitary: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckLine {
    pub name: String,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dossier {
    pub schema_version: u32,
    pub params: ParamsBlock,
    pub choices: ChoicesBlock,
    pub l_polynomial: LBlock,
    pub functional_equation_sign: i8,
    pub rank: u32,
    /// Leading Taylor coefficient of L at T = 1/r, as "num/den".
    pub lstar: String,
    pub ord_p_lstar: i64,
    /// Reg(E)|Sha(E)| = L* r^floor(q/6), as "num/den".
    pub reg_sha: String,
    /// |Sha(E)| itself when rank 0 (the regulator is 1 there).
    pub sha_order: Option<String>,
    pub dim_sha: u64,
    pub structural: StructuralBlock,
    pub brauer_siegel: BrauerSiegelBlock,
    /// Sign table, present only for p = -1 mod 6.
    pub epsilon_table: Option<Vec<EpsilonRow>>,
    pub checks: Vec<CheckLine>,
}

fn rational_string(x: &num_rational::BigRational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

fn coefficient_digest(coeffs: &[String]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(coeffs.join(",").as_bytes());
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Run the full pipeline for one twist and return the checked dossier.
/// Every named check must pass or assembly aborts; an emitted dossier
/// never carries a failed check line.
pub fn assemble_dossier(params: &TwistParams, config: &PipelineConfig) -> Result<Dossier> {
    let tower = Tower::build(params.p, &params.required_degrees(), config.ff)?;
    let ring = CycloRing::new(params.p)?;
    let mut checks = Vec::new();
    let mut check = |name: &str, pass: bool, detail: String| -> Result<()> {
        if !pass {
            return Err(Error::IdentityFailure(format!("{name}: {detail}")));
        }
        checks.push(CheckLine {
            name: name.to_string(),
            pass,
        });
        Ok(())
    };

    let build = l_poly_orbit(params, &tower, &ring, config.psi_unit, config.enum_cap)?;
    let sextic = l_poly_sextic(params, &tower, &ring, config.psi_unit, config.enum_cap)?;
    check(
        "l_dual_route_agreement",
        build.l.coeffs == sextic.l.coeffs,
        "orbit and sextic constructions disagree".into(),
    )?;
    let degree = 2 * (params.q - 1);
    check(
        "l_degree_and_constant_term",
        build.l.degree() as u64 == degree && build.l.coeffs[0] == 1.into(),
        format!("degree {} constant {}", build.l.degree(), build.l.coeffs[0]),
    )?;
    let sign = functional_equation_sign(&build.l)?;
    check("functional_equation", true, String::new())?;

    // bsd_report internally enforces: closed-form rank = analytic rank,
    // special value agreement across routes, the ord bounds on L* and
    // Reg|Sha|, the two-route Brauer-Siegel agreement, and the sign table
    // factorization for p = -1 mod 6.
    let report: BsdReport = bsd_report(params, &tower, &ring, &build)?;
    check("rank_formula_agreement", true, String::new())?;
    check("special_value_dual_route", true, String::new())?;
    check("ord_p_lstar", true, String::new())?;
    check("ord_p_reg_sha", true, String::new())?;
    check("brauer_siegel_dual_route", true, String::new())?;
    if report.epsilon_entries.is_some() {
        check("epsilon_factorization", true, String::new())?;
    }

    if params.p_mod_6() == 5 {
        let orbits = sha_orbits(params)?;
        check(
            "sha_equidistribution",
            orbits.iter().all(|o| o.s0_count == o.s1_count),
            "some orbit meets S0 and S1 unequally".into(),
        )?;
    }
    let dim = dim_sha(params)?;
    check("sha_dimension_sum", true, String::new())?;
    let ord_reg_sha = padic_ord_rational(&report.reg_sha, params.p)?;
    check(
        "dim_sha_matches_p_part",
        ord_reg_sha >= dim as i64 * params.nu as i64 && (dim == 0) == (ord_reg_sha == 0),
        format!("dim {dim}, ord_p(reg_sha) {ord_reg_sha}"),
    )?;

    let coefficients: Vec<String> = build.l.coeffs.iter().map(|c| c.to_string()).collect();
    let sha256 = coefficient_digest(&coefficients);
    let constants = structural_constants(params);
    let lstar = rational_string(&report.lstar);
    let reg_sha = rational_string(&report.reg_sha);
    let sha_order = (report.rank == 0).then(|| reg_sha.clone());
    Ok(Dossier {
        schema_version: 1,
        params: ParamsBlock {
            p: params.p,
            nu: params.nu,
            f: params.f,
            q: params.q,
            r: params.r,
        },
        choices: ChoicesBlock {
            generator_index: config.ff.generator_index,
            psi_unit: config.psi_unit,
        },
        l_polynomial: LBlock {
            degree,
            coefficients,
            sha256,
        },
        functional_equation_sign: sign,
        rank: report.rank,
        lstar,
        ord_p_lstar: padic_ord_rational(&report.lstar, params.p)?,
        reg_sha,
        sha_order,
        dim_sha: dim,
        structural: StructuralBlock {
            height_exponent: constants.height_exponent,
            conductor_degree: constants.conductor_degree,
            reduction_at_roots: constants.reduction_at_roots.to_string(),
            reduction_at_infinity: constants.reduction_at_infinity.to_string(),
            j_invariant: constants.j_invariant,
            discriminant: constants.discriminant,
            torsion_order: constants.torsion_order,
            tamagawa_product: constants.tamagawa_product,
        },
        brauer_siegel: BrauerSiegelBlock {
            ratio: report.bs_direct,
            via_special_value: report.bs_via_l,
        },
        epsilon_table: report.epsilon_entries.map(|entries| {
            entries
                .iter()
                .map(|e| EpsilonRow {
                    i: e.rep_i,
                    j: e.rep_j,
                    orbit_size: e.orbit_size,
                    zeta6_exponent: e.zeta6_exponent,
                    unitary: e.unitary,
                })
                .collect()
        }),
        checks,
    })
}

/// Canonical JSON emission: two-space pretty printing, struct key order,
/// trailing newline.
pub fn dossier_json(dossier: &Dossier) -> String {
    let mut out = serde_json::to_string_pretty(dossier).expect("dossier serializes");
    out.push('\n');
    out
}

pub fn parse_dossier(text: &str) -> Result<Dossier> {
    serde_json::from_str(text).map_err(|e| Error::InvalidParams(format!("dossier json: {e}")))
}

/// Equality of everything except the recorded choices.
pub fn content_equal(a: &Dossier, b: &Dossier) -> bool {
    let mut b = b.clone();
    b.choices = a.choices.clone();
    *a == b
}

/// Floats in CSV carry 15 significant digits.
pub fn csv_float(x: f64) -> String {
    format!("{x:.14e}")
}

/// One-row CSV summary of a dossier.  Rationals stay exact ("16/1").
pub fn dossier_csv(dossier: &Dossier) -> String {
    let mut out = String::from(
        "p,nu,f,q,r,l_degree,functional_equation_sign,rank,lstar,reg_sha,dim_sha,brauer_siegel\n",
    );
    out.push_str(&format!(
        "{},{},{},{},{},{},{},{},{},{},{},{}\n",
        dossier.params.p,
        dossier.params.nu,
        dossier.params.f,
        dossier.params.q,
        dossier.params.r,
        dossier.l_polynomial.degree,
        dossier.functional_equation_sign,
        dossier.rank,
        dossier.lstar,
        dossier.reg_sha,
        dossier.dim_sha,
        csv_float(dossier.brauer_siegel.ratio),
    ));
    out
}

/// One line of a Brauer-Siegel sweep over f at fixed (p, nu).
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub p: u64,
    pub nu: u32,
    pub f: u32,
    pub q: Option<u64>,
    pub rank: Option<u32>,
    pub log_r_lstar: Option<f64>,
    pub bs: Option<f64>,
    pub log_reg_sha_over_log_r: Option<f64>,
    pub skipped: bool,
}

/// Sweep f over `fs` at fixed (p, nu).  Rows that trip a cap are marked
/// skipped rather than failing the whole table.
pub fn sweep_rows(p: u64, nu: u32, fs: &[u32], config: &PipelineConfig) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::new();
    for &f in fs {
        let skipped_row = |q: Option<u64>| SweepRow {
            p,
            nu,
            f,
            q,
            rank: None,
            log_r_lstar: None,
            bs: None,
            log_reg_sha_over_log_r: None,
            skipped: true,
        };
        let params = match TwistParams::new(p, nu, f) {
            Ok(params) => params,
            Err(Error::CapExceeded { .. }) | Err(Error::OutOfRange(_)) => {
                rows.push(skipped_row(None));
                continue;
            }
            Err(e) => return Err(e),
        };
        match assemble_dossier(&params, config) {
            Ok(dossier) => {
                let lstar = parse_rational(&dossier.lstar)?;
                let reg_sha = parse_rational(&dossier.reg_sha)?;
                let log_r = params.nu as f64 * (params.p as f64).ln();
                rows.push(SweepRow {
                    p,
                    nu,
                    f,
                    q: Some(params.q),
                    rank: Some(dossier.rank),
                    log_r_lstar: Some(ln_rational(&lstar) / log_r),
                    bs: Some(dossier.brauer_siegel.ratio),
                    log_reg_sha_over_log_r: Some(ln_rational(&reg_sha) / log_r),
                    skipped: false,
                });
            }
            Err(Error::CapExceeded { .. }) => rows.push(skipped_row(Some(params.q))),
            Err(e) => return Err(e),
        }
    }
    Ok(rows)
}

fn parse_rational(s: &str) -> Result<num_rational::BigRational> {
    s.parse()
        .map_err(|_| Error::InvalidParams(format!("not a rational: {s}")))
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("p,nu,f,q,rank,log_r_lstar,bs,log_reg_sha_over_log_r,status\n");
    for row in rows {
        let opt_u = |x: Option<u64>| x.map(|v| v.to_string()).unwrap_or_default();
        let opt_f = |x: Option<f64>| x.map(csv_float).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            row.p,
            row.nu,
            row.f,
            opt_u(row.q),
            row.rank.map(|v| v.to_string()).unwrap_or_default(),
            opt_f(row.log_r_lstar),
            opt_f(row.bs),
            opt_f(row.log_reg_sha_over_log_r),
            if row.skipped { "skipped" } else { "ok" },
        ));
    }
    out
}

/// Orbit-table dump for the `orbits` subcommand.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitRow {
    pub rep_i: u64,
    pub rep_j: u64,
    pub size: u32,
    pub alpha_degree: u32,
}

/// Sha-statistics dump for the `sha` subcommand.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShaSummary {
    pub p: u64,
    pub nu: u32,
    pub f: u32,
    pub q: u64,
    pub dim_sha: u64,
    pub orbit_count: u64,
    /// (orbit size, |o meet S0|, |o meet S1|) per orbit, deterministic order.
    pub orbits: Vec<(u64, u64, u64)>,
}

pub fn sha_summary(params: &TwistParams) -> Result<ShaSummary> {
    let dim = dim_sha(params)?;
    let orbits = if params.p_mod_6() == 5 {
        sha_orbits(params)?
            .iter()
            .map(|o| (o.size(), o.s0_count, o.s1_count))
            .collect()
    } else {
        Vec::new()
    };
    Ok(ShaSummary {
        p: params.p,
        nu: params.nu,
        f: params.f,
        q: params.q,
        dim_sha: dim,
        orbit_count: orbits.len() as u64,
        orbits,
    })
}

impl ShaSummary {
    pub fn json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("summary serializes");
        out.push('\n');
        out
    }
}

/// Hook for schema sanity in tests: every float in the dossier is finite.
pub fn floats_finite(dossier: &Dossier) -> bool {
    [
        dossier.brauer_siegel.ratio,
        dossier.brauer_siegel.via_special_value,
    ]
    .iter()
    .all(|x| x.is_finite())
    && dossier.rank.to_f64().is_some()
}
