//! Grid verification suite.  Every structural identity the library rests
//! on is re-checked here against independent routes: dual L-function
//! constructions, the point-count oracle, Gauss-sum decompositions,
//! digit-sum valuations, rank and ord formulas, Sha combinatorics, choice
//! independence, the Brauer-Siegel decomposition, and the explicit orbit
//! count estimates.  Points run in parallel; output order is the grid
//! order, never arrival order.

use num_bigint::BigInt;
use num_rational::Rational64;
use rayon::prelude::*;
use serde::Serialize;

use crate::bsd::{bsd_report, ord_lstar_check, ord_reg_sha_check, rank_by_formula};
use crate::char_sums::{gauss_power_decompose, orbit_gauss, orbit_gauss_ord};
use crate::characters::MultChar;
use crate::cyclo::{padic_ord_rational, CycloRing};
use crate::error::{Error, Result};
use crate::ff::Tower;
use crate::lfunction::{
    analytic_rank, functional_equation_sign, is_full_rank_case, l_poly_orbit, l_poly_sextic,
    newton_power_sums, LBuild,
};
use crate::oracle::{taylor_coeffs, OracleCaps};
use crate::orbits::{enumerate_orbits, TwistParams};
use crate::report::{assemble_dossier, content_equal, PipelineConfig};
use crate::sha::{dim_sha, ord_gj_check, sha_orbits, DIGIT_CAP_M};

/// The standard battery of parameter points: both residues of p mod 6,
/// prime and square constant fields, prime and square twist degrees.
pub const DEFAULT_GRID: &[(u64, u32, u32)] = &[
    (5, 1, 1),
    (5, 1, 2),
    (5, 2, 1),
    (7, 1, 1),
    (7, 1, 2),
    (11, 1, 1),
    (11, 2, 1),
    (13, 1, 1),
];

pub const GROUPS: &[&str] = &[
    "gauss",
    "lfun",
    "oracle",
    "rank",
    "ord",
    "sha",
    "choice",
    "bs",
    "estimates",
];

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub grid: Vec<(u64, u32, u32)>,
    /// Restrict to these groups; None runs everything.
    pub only: Option<Vec<String>>,
    /// Depth cap for oracle Taylor prefixes.
    pub oracle_max: u32,
    pub oracle_caps: OracleCaps,
    pub pipeline: PipelineConfig,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            grid: DEFAULT_GRID.to_vec(),
            only: None,
            oracle_max: 6,
            // Tighter than the library default so a full-grid run stays
            // interactive; the depth adapts per point.
            oracle_caps: OracleCaps {
                transform: 1_000_000,
                naive: 100_000,
            },
            pipeline: PipelineConfig::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Outcome {
    pub p: u64,
    pub nu: u32,
    pub f: u32,
    pub group: &'static str,
    pub check: &'static str,
    pub pass: bool,
    /// A cap stopped the check; not a failure.
    pub skipped: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifySummary {
    pub outcomes: Vec<Outcome>,
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

impl VerifySummary {
    pub fn all_pass(&self) -> bool {
        self.failed == 0
    }

    pub fn first_failure(&self) -> Option<&Outcome> {
        self.outcomes.iter().find(|o| !o.pass)
    }

    pub fn json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("summary serializes");
        out.push('\n');
        out
    }
}

struct Artifacts {
    params: TwistParams,
    tower: Tower,
    ring: CycloRing,
    build: LBuild,
    sextic: LBuild,
}

fn artifacts(point: (u64, u32, u32), options: &VerifyOptions) -> Result<Artifacts> {
    let (p, nu, f) = point;
    let params = TwistParams::new(p, nu, f)?;
    let tower = Tower::build(p, &params.required_degrees(), options.pipeline.ff)?;
    let ring = CycloRing::new(p)?;
    let psi = options.pipeline.psi_unit;
    let cap = options.pipeline.enum_cap;
    let build = l_poly_orbit(&params, &tower, &ring, psi, cap)?;
    let sextic = l_poly_sextic(&params, &tower, &ring, psi, cap)?;
    Ok(Artifacts {
        params,
        tower,
        ring,
        build,
        sextic,
    })
}

/// Convert one check result into an outcome line.  CapExceeded marks the
/// check skipped; any other error is a failure carrying the counterexample.
fn outcome(
    params: &TwistParams,
    group: &'static str,
    check: &'static str,
    result: Result<String>,
) -> Outcome {
    let (pass, skipped, detail) = match result {
        Ok(detail) => (true, false, detail),
        Err(Error::CapExceeded { what, needed, cap }) => (
            true,
            true,
            format!("skipped: {what} needs {needed}, cap {cap}"),
        ),
        Err(e) => (false, false, e.to_string()),
    };
    Outcome {
        p: params.p,
        nu: params.nu,
        f: params.f,
        group,
        check,
        pass,
        skipped,
        detail,
    }
}

fn fail(detail: String) -> Error {
    Error::IdentityFailure(detail)
}

fn check_gauss(a: &Artifacts, options: &VerifyOptions) -> Vec<Outcome> {
    let params = &a.params;
    let psi = options.pipeline.psi_unit;
    let cap = options.pipeline.enum_cap;
    let mut out = Vec::new();

    out.push(outcome(
        params,
        "gauss",
        "power_decomposition",
        (|| {
            let orbits = enumerate_orbits(params, &a.tower, 6, true)?;
            for o in &orbits {
                gauss_power_decompose(params, &a.tower, &a.ring, o, psi, cap)?;
            }
            Ok(format!("{} orbits decomposed", orbits.len()))
        })(),
    ));

    out.push(outcome(
        params,
        "gauss",
        "quadratic_square",
        (|| {
            let pstar = if params.p % 4 == 1 {
                BigInt::from(params.p)
            } else {
                -BigInt::from(params.p)
            };
            let orbits = enumerate_orbits(params, &a.tower, 2, true)?;
            for o in &orbits {
                let g = orbit_gauss(params, &a.tower, &a.ring, o, psi, cap)?;
                let square = a.ring.mul(&g, &g).as_integer()?;
                let mu = o.field_degree(params);
                if square != pstar.pow(mu) {
                    return Err(fail(format!(
                        "G^2 = {square} != (p*)^{mu} at quadratic orbit j = {}",
                        o.rep_j
                    )));
                }
            }
            Ok(format!("{} quadratic orbits", orbits.len()))
        })(),
    ));

    out.push(outcome(
        params,
        "gauss",
        "cubic_supersingular",
        (|| {
            if params.p % 3 != 2 {
                return Ok("not supersingular (p = 1 mod 3)".into());
            }
            let orbits = enumerate_orbits(params, &a.tower, 3, true)?;
            for o in &orbits {
                let mu = o.field_degree(params);
                if mu % 2 != 0 {
                    return Err(fail(format!("cubic orbit with odd degree {mu}")));
                }
                let g = orbit_gauss(params, &a.tower, &a.ring, o, psi, cap)?;
                let field = a.tower.subfield(mu)?;
                let chi_inv = MultChar::new(field, 3, (3 - o.rep_i % 3) % 3)?;
                let zeta = chi_inv.eval(&a.tower, &a.ring, o.rep_alpha)?;
                let want = a
                    .ring
                    .mul_int(&zeta, &(-BigInt::from(params.p)).pow(mu / 2));
                if g != want {
                    return Err(fail(format!(
                        "cubic orbit j = {} is not chi^-1(alpha)(-p)^(mu/2)",
                        o.rep_j
                    )));
                }
            }
            Ok(format!("{} cubic orbits", orbits.len()))
        })(),
    ));

    out.push(outcome(
        params,
        "gauss",
        "stickelberger_table",
        (|| {
            let mut rows = 0;
            for o in enumerate_orbits(params, &a.tower, 2, true)? {
                let mu = o.field_degree(params) as i64;
                if orbit_gauss_ord(params, &o)? != Rational64::new(mu, 2) {
                    return Err(fail(format!("quadratic ord != mu/2 at j = {}", o.rep_j)));
                }
                rows += 1;
            }
            for o in enumerate_orbits(params, &a.tower, 3, true)? {
                let mu = o.field_degree(params) as i64;
                let ord = orbit_gauss_ord(params, &o)?;
                let want = if params.p % 3 == 1 {
                    if o.elements.iter().any(|&(i, _)| i == 1) {
                        Rational64::new(2 * mu, 3)
                    } else {
                        Rational64::new(mu, 3)
                    }
                } else {
                    Rational64::new(mu, 2)
                };
                if ord != want {
                    return Err(fail(format!(
                        "cubic ord {ord} != {want} at j = {}",
                        o.rep_j
                    )));
                }
                rows += 1;
            }
            Ok(format!("{rows} digit rows"))
        })(),
    ));

    out
}

fn check_lfun(a: &Artifacts) -> Vec<Outcome> {
    let params = &a.params;
    vec![
        outcome(
            params,
            "lfun",
            "dual_route_equality",
            (|| {
                if a.build.l.coeffs != a.sextic.l.coeffs {
                    return Err(fail("orbit and sextic routes disagree".into()));
                }
                Ok(format!("degree {}", a.build.l.degree()))
            })(),
        ),
        outcome(
            params,
            "lfun",
            "degree_and_constant_term",
            (|| {
                let want = 2 * (params.q - 1) as usize;
                if a.build.l.degree() != want {
                    return Err(fail(format!("degree {} != {want}", a.build.l.degree())));
                }
                if a.build.l.coeffs[0] != 1.into() {
                    return Err(fail(format!("constant term {}", a.build.l.coeffs[0])));
                }
                Ok(String::new())
            })(),
        ),
        outcome(
            params,
            "lfun",
            "functional_equation",
            functional_equation_sign(&a.build.l).map(|w| format!("sign {w}")),
        ),
    ]
}

fn check_oracle(a: &Artifacts, options: &VerifyOptions) -> Vec<Outcome> {
    let params = &a.params;
    vec![outcome(
        params,
        "oracle",
        "taylor_prefix",
        (|| {
            let mut depth = 0u32;
            for n in 1..=options.oracle_max {
                match params.r.checked_pow(n) {
                    Some(size) if size <= options.oracle_caps.transform => depth = n,
                    _ => break,
                }
            }
            if depth == 0 {
                return Err(Error::CapExceeded {
                    what: "oracle field size r^1",
                    needed: params.r as u128,
                    cap: options.oracle_caps.transform as u128,
                });
            }
            let counted = taylor_coeffs(params, depth, &options.oracle_caps)?;
            let expanded = newton_power_sums(&a.build.l, depth as usize);
            if counted != expanded {
                return Err(fail(format!(
                    "point counts disagree with -log L within depth {depth}"
                )));
            }
            Ok(format!("prefix depth {depth}"))
        })(),
    )]
}

fn check_rank(a: &Artifacts) -> Vec<Outcome> {
    let params = &a.params;
    vec![
        outcome(
            params,
            "rank",
            "formula_vs_analytic",
            (|| {
                let formula = rank_by_formula(params, &a.tower)?;
                let analytic = analytic_rank(&a.build.l);
                if formula != analytic {
                    return Err(fail(format!("closed form {formula} != analytic {analytic}")));
                }
                Ok(format!("rank {analytic}"))
            })(),
        ),
        outcome(
            params,
            "rank",
            "full_rank_case",
            (|| {
                if !is_full_rank_case(params) {
                    return Ok("not in the full-rank regime".into());
                }
                let degree = 2 * (params.q - 1);
                if analytic_rank(&a.build.l) as u64 != degree {
                    return Err(fail("rank below degree in the full-rank regime".into()));
                }
                // L must be exactly (1 - rT)^degree.
                let mut want = vec![BigInt::from(1)];
                for _ in 0..degree {
                    let mut next = vec![BigInt::from(0); want.len() + 1];
                    for (k, c) in want.iter().enumerate() {
                        next[k] += c;
                        next[k + 1] -= c * BigInt::from(params.r);
                    }
                    want = next;
                }
                if a.build.l.coeffs != want {
                    return Err(fail("L != (1 - rT)^(2(q-1))".into()));
                }
                Ok(format!("L = (1 - {}T)^{degree}", params.r))
            })(),
        ),
    ]
}

fn check_ord(a: &Artifacts) -> Vec<Outcome> {
    let params = &a.params;
    let mut out = Vec::new();
    let report = match bsd_report(params, &a.tower, &a.ring, &a.build) {
        Ok(report) => report,
        Err(e) => {
            out.push(outcome(params, "ord", "bsd_pipeline", Err(e)));
            return out;
        }
    };
    out.push(outcome(
        params,
        "ord",
        "ord_lstar",
        ord_lstar_check(params, &report.lstar).map(|()| format!("L* = {}", report.lstar)),
    ));
    out.push(outcome(
        params,
        "ord",
        "ord_reg_sha",
        ord_reg_sha_check(params, &report.reg_sha).map(|()| format!("reg_sha = {}", report.reg_sha)),
    ));
    out.push(outcome(
        params,
        "ord",
        "frobenius_eigenvalue_valuations",
        (|| {
            if params.p_mod_6() != 1 {
                return Ok("only meaningful for p = 1 mod 6".into());
            }
            let report = ord_gj_check(params, DIGIT_CAP_M)?;
            Ok(format!(
                "m = {}, {} classes strictly fractional",
                report.m,
                report.entries.len()
            ))
        })(),
    ));
    out
}

fn check_sha(a: &Artifacts) -> Vec<Outcome> {
    let params = &a.params;
    let mut out = Vec::new();
    out.push(outcome(
        params,
        "sha",
        "equidistribution",
        (|| {
            if params.p_mod_6() != 5 {
                return Ok("no orbit windows for p = 1 mod 6".into());
            }
            let orbits = sha_orbits(params)?;
            for o in &orbits {
                if o.s0_count != o.s1_count {
                    return Err(fail(format!(
                        "orbit through (b={}, a={}) meets S0 {} times, S1 {}",
                        o.elements[0].b, o.elements[0].a, o.s0_count, o.s1_count
                    )));
                }
            }
            Ok(format!("{} orbits balanced", orbits.len()))
        })(),
    ));
    out.push(outcome(
        params,
        "sha",
        "dimension_sum",
        (|| {
            let dim = dim_sha(params)?;
            let want = if params.p_mod_6() == 5 { params.q / 6 } else { 0 };
            if dim != want {
                return Err(fail(format!("dim sha {dim} != {want}")));
            }
            Ok(format!("dim sha = {dim}"))
        })(),
    ));
    out.push(outcome(
        params,
        "sha",
        "p_part_consistency",
        (|| {
            let report = bsd_report(params, &a.tower, &a.ring, &a.build)?;
            let dim = dim_sha(params)?;
            let ord = padic_ord_rational(&report.reg_sha, params.p)?;
            if ord < dim as i64 * params.nu as i64 || (dim == 0) != (ord == 0) {
                return Err(fail(format!(
                    "dim sha {dim} inconsistent with ord_p(reg_sha) = {ord}"
                )));
            }
            Ok(format!("ord_p(reg_sha) = {ord}"))
        })(),
    ));
    out
}

fn check_choice(a: &Artifacts, options: &VerifyOptions) -> Vec<Outcome> {
    let params = &a.params;
    vec![outcome(
        params,
        "choice",
        "generator_and_psi_independence",
        (|| {
            let base = assemble_dossier(params, &options.pipeline)?;
            let mut alt = options.pipeline;
            alt.ff.generator_index += 1;
            alt.psi_unit = if options.pipeline.psi_unit == 2 { 3 } else { 2 };
            let other = assemble_dossier(params, &alt)?;
            if !content_equal(&base, &other) {
                return Err(fail("dossier content depends on arbitrary choices".into()));
            }
            Ok("bit-identical excluding recorded choices".into())
        })(),
    )]
}

fn check_bs(a: &Artifacts) -> Vec<Outcome> {
    let params = &a.params;
    vec![outcome(
        params,
        "bs",
        "two_route_agreement",
        (|| {
            let report = bsd_report(params, &a.tower, &a.ring, &a.build)?;
            let gap = (report.bs_direct - report.bs_via_l).abs();
            if !report.bs_direct.is_finite() || gap > 1e-12 {
                return Err(fail(format!(
                    "BS routes differ by {gap} ({} vs {})",
                    report.bs_direct, report.bs_via_l
                )));
            }
            Ok(format!("BS = {:.6}", report.bs_direct))
        })(),
    )]
}

fn check_estimates(a: &Artifacts) -> Vec<Outcome> {
    let params = &a.params;
    let mut out = Vec::new();
    let orbits = match enumerate_orbits(params, &a.tower, 6, true) {
        Ok(orbits) => orbits,
        Err(e) => {
            out.push(outcome(params, "estimates", "orbit_enumeration", Err(e)));
            return out;
        }
    };
    let s_units = 2 * (params.q - 1);
    out.push(outcome(
        params,
        "estimates",
        "orbit_count_bound",
        (|| {
            // |O| <= |S|/x + 2 sum_{d <= floor(x)} r^d at x = f/nu, scaled
            // by f to stay in integers.
            let count = orbits.len() as u64;
            let short: u64 = (1..=(params.f as u64 / params.nu as u64))
                .map(|d| params.r.pow(d as u32))
                .sum();
            let lhs = count as u128 * params.f as u128;
            let rhs = s_units as u128 * params.nu as u128 + 2 * params.f as u128 * short as u128;
            if lhs > rhs {
                return Err(fail(format!("{count} orbits exceed the proof bound")));
            }
            Ok(format!("{count} orbits, bound {}", rhs / params.f as u128))
        })(),
    ));
    out.push(outcome(
        params,
        "estimates",
        "orbit_log_bound",
        (|| {
            let y = (params.q as f64).ln();
            let lhs: f64 = orbits.iter().map(|o| (o.size as f64).ln()).sum();
            let rhs = y.ln() * orbits.len() as f64 + y.ln() / y * s_units as f64;
            if lhs > rhs + 1e-9 {
                return Err(fail(format!("sum log|o| = {lhs} exceeds bound {rhs}")));
            }
            Ok(format!("{lhs:.3} <= {rhs:.3} at y = log q"))
        })(),
    ));
    out
}

fn point_outcomes(point: (u64, u32, u32), options: &VerifyOptions) -> Result<Vec<Outcome>> {
    let run = |group: &str| -> bool {
        options
            .only
            .as_ref()
            .map(|names| names.iter().any(|n| n == group))
            .unwrap_or(true)
    };
    let a = match artifacts(point, options) {
        Ok(a) => a,
        Err(Error::IdentityFailure(detail)) => {
            // A broken pipeline identity is itself the counterexample.
            let params = TwistParams::new(point.0, point.1, point.2)?;
            return Ok(vec![outcome(
                &params,
                "lfun",
                "pipeline",
                Err(Error::IdentityFailure(detail)),
            )]);
        }
        Err(e) => return Err(e),
    };
    let mut out = Vec::new();
    if run("gauss") {
        out.extend(check_gauss(&a, options));
    }
    if run("lfun") {
        out.extend(check_lfun(&a));
    }
    if run("oracle") {
        out.extend(check_oracle(&a, options));
    }
    if run("rank") {
        out.extend(check_rank(&a));
    }
    if run("ord") {
        out.extend(check_ord(&a));
    }
    if run("sha") {
        out.extend(check_sha(&a));
    }
    if run("choice") {
        out.extend(check_choice(&a, options));
    }
    if run("bs") {
        out.extend(check_bs(&a));
    }
    if run("estimates") {
        out.extend(check_estimates(&a));
    }
    Ok(out)
}

/// Run the suite over the grid.  Points are verified in parallel; the
/// outcome list follows the grid order.
pub fn run_verify(options: &VerifyOptions) -> Result<VerifySummary> {
    if let Some(names) = &options.only {
        for name in names {
            if !GROUPS.contains(&name.as_str()) {
                return Err(Error::InvalidParams(format!(
                    "unknown check group {name}; valid: {}",
                    GROUPS.join(", ")
                )));
            }
        }
    }
    let per_point: Vec<Vec<Outcome>> = options
        .grid
        .par_iter()
        .map(|&point| point_outcomes(point, options))
        .collect::<Result<_>>()?;
    let outcomes: Vec<Outcome> = per_point.into_iter().flatten().collect();
    let passed = outcomes.iter().filter(|o| o.pass && !o.skipped).count();
    let failed = outcomes.iter().filter(|o| !o.pass).count();
    let skipped = outcomes.iter().filter(|o| o.skipped).count();
    Ok(VerifySummary {
        outcomes,
        passed,
        failed,
        skipped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_all_groups_pass() {
        let options = VerifyOptions {
            grid: vec![(5, 1, 1)],
            ..VerifyOptions::default()
        };
        let summary = run_verify(&options).unwrap();
        assert!(summary.all_pass(), "{}", summary.json());
        assert_eq!(summary.failed, 0);
        for group in GROUPS {
            assert!(
                summary.outcomes.iter().any(|o| o.group == *group),
                "missing group {group}"
            );
        }
    }

    #[test]
    fn only_filter_restricts_groups() {
        let options = VerifyOptions {
            grid: vec![(5, 1, 1), (7, 1, 1)],
            only: Some(vec!["gauss".into(), "estimates".into()]),
            ..VerifyOptions::default()
        };
        let summary = run_verify(&options).unwrap();
        assert!(summary.all_pass());
        assert!(summary
            .outcomes
            .iter()
            .all(|o| o.group == "gauss" || o.group == "estimates"));

        let bad = VerifyOptions {
            only: Some(vec!["nonsense".into()]),
            ..VerifyOptions::default()
        };
        assert!(matches!(run_verify(&bad), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn oracle_skips_when_capped() {
        let options = VerifyOptions {
            grid: vec![(5, 1, 1)],
            only: Some(vec!["oracle".into()]),
            oracle_caps: OracleCaps {
                transform: 2,
                naive: 2,
            },
            ..VerifyOptions::default()
        };
        let summary = run_verify(&options).unwrap();
        assert!(summary.all_pass());
        assert_eq!(summary.skipped, 1);
        assert!(summary.outcomes[0].detail.starts_with("skipped"));
    }

    #[test]
    fn summary_serializes_with_counts() {
        let options = VerifyOptions {
            grid: vec![(5, 1, 1)],
            only: Some(vec!["lfun".into(), "bs".into()]),
            ..VerifyOptions::default()
        };
        let summary = run_verify(&options).unwrap();
        assert_eq!(summary.passed, summary.outcomes.len());
        let text = summary.json();
        assert!(text.contains("\"failed\": 0"));
        assert!(parse_first_failure(&text).is_none());
        assert!(summary.first_failure().is_none());
    }

    fn parse_first_failure(text: &str) -> Option<usize> {
        text.find("\"pass\": false")
    }
}
