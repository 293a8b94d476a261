//! Birch-Swinnerton-Dyer side of the dossier: unitary-root signs, the
//! closed-form rank count, valuation checks on the special value, the
//! combined Reg*|Sha| invariant, structural curve constants, and the
//! Brauer-Siegel ratio computed two independent ways.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::characters::MultChar;
use crate::cyclo::{padic_ord_rational, CycloInt, CycloRing};
use crate::error::{Error, Result};
use crate::ff::Tower;
use crate::lfunction::{is_full_rank_case, LBuild, OrbitFactor};
use crate::orbits::{enumerate_orbits, Orbit, TwistParams};

/// Constants of the curve model y^2 = x^3 + t^q - t that enter the dossier
/// without any character-sum work.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructuralConstants {
    /// Exponent h in the exponential height H = r^h, h = ceil(q/6).
    pub height_exponent: u64,
    /// deg N = 2(q+1): q+1 places of additive reduction, conductor
    /// exponent 2 at each (p > 3 keeps them all tame).
    pub conductor_degree: u64,
    /// deg L = deg N - 4.
    pub l_degree: u64,
    /// Kodaira type at the q roots of t^q - t.
    pub reduction_at_roots: &'static str,
    /// Kodaira type at t = infinity.
    pub reduction_at_infinity: &'static str,
    pub j_invariant: u64,
    pub discriminant: String,
    pub torsion_order: u64,
    pub tamagawa_product: u64,
}

pub fn structural_constants(params: &TwistParams) -> StructuralConstants {
    let q = params.q;
    StructuralConstants {
        height_exponent: q.div_ceil(6),
        conductor_degree: 2 * (q + 1),
        l_degree: 2 * (q + 1) - 4,
        reduction_at_roots: "II",
        reduction_at_infinity: if q % 6 == 1 { "II*" } else { "II" },
        j_invariant: 0,
        discriminant: format!("-2^4 * 3^3 * (t^{q} - t)^2"),
        torsion_order: 1,
        tamagawa_product: 1,
    }
}

/// Sign exponent (p+1) nu |o| / 4; integral whenever p = -1 mod 6 because
/// p+1 is then even and nu |o| is even.
fn sign_exponent(params: &TwistParams, o: &Orbit) -> Result<u128> {
    let e = (params.p as u128 + 1) * params.nu as u128 * o.size as u128;
    if e % 4 != 0 {
        return Err(Error::IdentityFailure(format!(
            "sign exponent {e} is not divisible by 4"
        )));
    }
    Ok(e / 4)
}

/// eps_o = chi_{F,2}(alpha) * (-1)^{(p+1) nu |o| / 4} * chi_{F,3}^{-i}(alpha)
/// in mu_6, where F is the orbit field F_{r^{|o|}}.  Only defined for
/// p = -1 mod 6; in that regime every root of the L-factor at o has the
/// form eps_o r^{|o|} T^{-1}.  The quadratic factor chi_{F,2}(alpha) comes
/// from shifting the additive character in G_F(chi_2, psi_alpha); it is
/// automatically 1 whenever [F : F_p(alpha)] is even (in particular in the
/// m_2 = 2 case), but carries a genuine sign otherwise.
pub fn epsilon(
    params: &TwistParams,
    tower: &Tower,
    ring: &CycloRing,
    o: &Orbit,
) -> Result<CycloInt> {
    if params.p_mod_6() != 5 {
        return Err(Error::WrongResidue {
            p: params.p,
            expected: 5,
        });
    }
    let field = tower.subfield(o.field_degree(params))?;
    let quad = MultChar::new(field, 2, 1)?;
    let alpha_is_square = quad.exponent(tower, o.rep_alpha)? == 0;
    let chi = MultChar::new(field, 3, (3 - o.rep_i % 3) % 3)?;
    let value = chi.eval(tower, ring, o.rep_alpha)?;
    let negative = (sign_exponent(params, o)? % 2 == 1) ^ !alpha_is_square;
    if negative {
        Ok(ring.neg(&value))
    } else {
        Ok(value)
    }
}

/// eps_o together with the exact ring identity omega(o) = eps_o r^{|o|}.
pub fn epsilon_verified(
    params: &TwistParams,
    tower: &Tower,
    ring: &CycloRing,
    o: &Orbit,
    omega: &CycloInt,
) -> Result<CycloInt> {
    let eps = epsilon(params, tower, ring, o)?;
    let r_pow = BigInt::from(params.r).pow(o.size);
    if ring.mul_int(&eps, &r_pow) != *omega {
        return Err(Error::IdentityFailure(format!(
            "omega(o) != eps_o r^|o| at orbit ({}, {})",
            o.rep_i, o.rep_j
        )));
    }
    Ok(eps)
}

/// One row of the per-orbit sign table for p = -1 mod 6.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsilonEntry {
    pub rep_i: u64,
    pub rep_j: u64,
    pub orbit_size: u32,
    /// eps_o written as zeta_6^k, k in 0..6.
    pub zeta6_exponent: u64,
    /// Whether this orbit contributes to the rank (eps_o = 1).
    pub unitary: bool,
}

/// Verified sign table over the factored L-build.  Each entry checks the
/// ring identity against the stored omega, and `unitary` is cross-checked
/// against the root classification made during the build.
pub fn epsilon_table(
    params: &TwistParams,
    tower: &Tower,
    ring: &CycloRing,
    factors: &[OrbitFactor],
) -> Result<Vec<EpsilonEntry>> {
    factors
        .iter()
        .map(|f| {
            let eps = epsilon_verified(params, tower, ring, &f.orbit, &f.omega)?;
            let mut zeta6_exponent = None;
            for k in 0..6 {
                if eps == ring.root_of_order(6, k as i64)? {
                    zeta6_exponent = Some(k);
                    break;
                }
            }
            let zeta6_exponent = zeta6_exponent.ok_or_else(|| {
                Error::IdentityFailure("eps_o is not a sixth root of unity".into())
            })?;
            if (zeta6_exponent == 0) != f.is_unitary_root {
                return Err(Error::IdentityFailure(
                    "eps_o = 1 disagrees with the unitary-root classification".into(),
                ));
            }
            Ok(EpsilonEntry {
                rep_i: f.orbit.rep_i,
                rep_j: f.orbit.rep_j,
                orbit_size: f.orbit.size,
                zeta6_exponent,
                unitary: f.is_unitary_root,
            })
        })
        .collect()
}

/// Closed-form analytic rank: zero when p = 1 mod 6, otherwise the number
/// of orbits with eps_o = 1, i.e. chi_{F,2}(alpha) = (-1)^{(p+1) nu |o|/4}
/// and alpha a cube in F = F_{r^{|o|}}.  (When alpha is a square in F this
/// is the condition 8 | (p+1) nu |o| plus the cube condition.)
pub fn rank_from_orbits(params: &TwistParams, tower: &Tower, orbits: &[Orbit]) -> Result<u32> {
    if params.p_mod_6() == 1 {
        return Ok(0);
    }
    let mut rank = 0;
    for o in orbits {
        let field = tower.subfield(o.field_degree(params))?;
        let quad = MultChar::new(field, 2, 1)?;
        let alpha_is_square = quad.exponent(tower, o.rep_alpha)? == 0;
        if (sign_exponent(params, o)? % 2 == 0) != alpha_is_square {
            continue;
        }
        if tower.is_cube(o.rep_alpha, &field)? {
            rank += 1;
        }
    }
    Ok(rank)
}

pub fn rank_by_formula(params: &TwistParams, tower: &Tower) -> Result<u32> {
    let orbits = enumerate_orbits(params, tower, 6, true)?;
    rank_from_orbits(params, tower, &orbits)
}

/// Valuation/integrality contract on the special value:
/// * p = 1 mod 6: ord_p(L*) = -(q-1) nu / 6 (a genuine pole in Z_p);
/// * p = -1 mod 6: L* is a (positive) integer, and L* = 1 in the
///   forced-full-rank regime.
pub fn ord_lstar_check(params: &TwistParams, lstar: &BigRational) -> Result<()> {
    if !lstar.is_positive() {
        return Err(Error::IdentityFailure(format!(
            "special value {lstar} is not positive"
        )));
    }
    if params.p_mod_6() == 1 {
        let expected = -(((params.q - 1) / 6) as i64) * params.nu as i64;
        let got = padic_ord_rational(lstar, params.p)?;
        if got != expected {
            return Err(Error::IdentityFailure(format!(
                "ord_p(L*) = {got}, expected {expected}"
            )));
        }
    } else {
        if !lstar.is_integer() {
            return Err(Error::IdentityFailure(format!(
                "special value {lstar} is not an integer"
            )));
        }
        if is_full_rank_case(params) && !lstar.is_one() {
            return Err(Error::IdentityFailure(format!(
                "forced-full-rank point has L* = {lstar}, expected 1"
            )));
        }
    }
    Ok(())
}

/// Reg * |Sha| = L* r^{floor(q/6)}.  When the rank is zero the regulator is
/// 1 and this is |Sha| itself.
pub fn reg_sha(params: &TwistParams, lstar: &BigRational) -> BigRational {
    let scale = BigInt::from(params.r).pow((params.q / 6) as u32);
    lstar * BigRational::from_integer(scale)
}

/// p-adic size of Reg*|Sha|: a p-adic unit when p = 1 mod 6, and divisible
/// by p^{nu floor(q/6)} when p = -1 mod 6.
pub fn ord_reg_sha_check(params: &TwistParams, reg_sha: &BigRational) -> Result<()> {
    let got = padic_ord_rational(reg_sha, params.p)?;
    if params.p_mod_6() == 1 {
        if got != 0 {
            return Err(Error::IdentityFailure(format!(
                "ord_p(Reg*Sha) = {got}, expected 0"
            )));
        }
    } else {
        let floor = (params.q / 6) as i64 * params.nu as i64;
        if got < floor {
            return Err(Error::IdentityFailure(format!(
                "ord_p(Reg*Sha) = {got}, expected at least {floor}"
            )));
        }
    }
    Ok(())
}

/// Natural log of |x| for integers far beyond f64 range: peel the bit
/// length and take the log of the 53-bit head.
pub fn ln_magnitude(x: &BigInt) -> f64 {
    let a = x.magnitude();
    if a.is_zero() {
        return f64::NEG_INFINITY;
    }
    if let Some(v) = a.to_f64() {
        if v.is_finite() && v > 0.0 {
            return v.ln();
        }
    }
    let shift = a.bits().saturating_sub(53);
    let head = (a >> shift).to_f64().unwrap();
    head.ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn ln_rational(x: &BigRational) -> f64 {
    ln_magnitude(x.numer()) - ln_magnitude(x.denom())
}

/// Brauer-Siegel ratio log(Reg*|Sha|) / log H computed two ways: directly
/// from the invariant, and through the special-value identity
/// (log L* + floor(q/6) log r) / (ceil(q/6) log r).
pub fn brauer_siegel(
    params: &TwistParams,
    lstar: &BigRational,
    reg_sha: &BigRational,
) -> Result<(f64, f64)> {
    if !lstar.is_positive() || !reg_sha.is_positive() {
        return Err(Error::ZeroValue);
    }
    let log_r = params.nu as f64 * (params.p as f64).ln();
    let log_h = params.q.div_ceil(6) as f64 * log_r;
    let direct = ln_rational(reg_sha) / log_h;
    let via_l = (ln_rational(lstar) + (params.q / 6) as f64 * log_r) / log_h;
    Ok((direct, via_l))
}

/// Full-dossier convenience bundle computed from a finished L-build.
#[derive(Clone, Debug)]
pub struct BsdReport {
    pub rank: u32,
    pub lstar: BigRational,
    pub reg_sha: BigRational,
    pub bs_direct: f64,
    pub bs_via_l: f64,
    pub constants: StructuralConstants,
    /// Present only for p = -1 mod 6.
    pub epsilon_entries: Option<Vec<EpsilonEntry>>,
}

pub fn bsd_report(
    params: &TwistParams,
    tower: &Tower,
    ring: &CycloRing,
    build: &LBuild,
) -> Result<BsdReport> {
    let rank = crate::lfunction::analytic_rank(&build.l);
    let orbits: Vec<Orbit> = build.factors.iter().map(|f| f.orbit.clone()).collect();
    let formula_rank = rank_from_orbits(params, tower, &orbits)?;
    if formula_rank != rank {
        return Err(Error::IdentityFailure(format!(
            "closed-form rank {formula_rank} != analytic rank {rank}"
        )));
    }
    let lstar = crate::lfunction::special_value(&build.l);
    let by_orbits = crate::lfunction::special_value_by_orbits(ring, build)?;
    if by_orbits != lstar {
        return Err(Error::IdentityFailure(format!(
            "special value routes disagree: {by_orbits} vs {lstar}"
        )));
    }
    ord_lstar_check(params, &lstar)?;
    let reg = reg_sha(params, &lstar);
    ord_reg_sha_check(params, &reg)?;
    let (bs_direct, bs_via_l) = brauer_siegel(params, &lstar, &reg)?;
    if (bs_direct - bs_via_l).abs() > 1e-12 {
        return Err(Error::IdentityFailure(format!(
            "Brauer-Siegel routes disagree: {bs_direct} vs {bs_via_l}"
        )));
    }
    let epsilon_entries = if params.p_mod_6() == 5 {
        Some(epsilon_table(params, tower, ring, &build.factors)?)
    } else {
        None
    };
    Ok(BsdReport {
        rank,
        lstar,
        reg_sha: reg,
        bs_direct,
        bs_via_l,
        constants: structural_constants(params),
        epsilon_entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::char_sums::ENUM_CAP;
    use crate::ff::FfConfig;
    use crate::lfunction::l_poly_orbit;

    fn setup(p: u64, nu: u32, f: u32) -> (TwistParams, Tower, CycloRing) {
        let params = TwistParams::new(p, nu, f).unwrap();
        let tower = Tower::build(p, &params.required_degrees(), FfConfig::default()).unwrap();
        let ring = CycloRing::new(p).unwrap();
        (params, tower, ring)
    }

    fn report(p: u64, nu: u32, f: u32) -> (TwistParams, BsdReport) {
        let (params, tower, ring) = setup(p, nu, f);
        let build = l_poly_orbit(&params, &tower, &ring, 1, ENUM_CAP).unwrap();
        let rep = bsd_report(&params, &tower, &ring, &build).unwrap();
        (params, rep)
    }

    #[test]
    fn structural_table() {
        let params = TwistParams::new(5, 1, 1).unwrap();
        let c = structural_constants(&params);
        assert_eq!(c.height_exponent, 1);
        assert_eq!(c.conductor_degree, 12);
        assert_eq!(c.l_degree, 8);
        assert_eq!(c.reduction_at_infinity, "II");
        let params7 = TwistParams::new(7, 1, 1).unwrap();
        let c7 = structural_constants(&params7);
        assert_eq!(c7.height_exponent, 2);
        assert_eq!(c7.reduction_at_infinity, "II*");
        assert_eq!((c7.torsion_order, c7.tamagawa_product), (1, 1));
        // deg L from the conductor matches the orbit-sum degree 2(q-1).
        assert_eq!(c7.l_degree, 2 * (params7.q - 1));
    }

    #[test]
    fn frozen_q5_bsd() {
        let (_, rep) = report(5, 1, 1);
        assert_eq!(rep.rank, 0);
        assert_eq!(rep.lstar, BigRational::from_integer(BigInt::from(16)));
        // Rank zero, so Reg = 1 and this is |Sha| = 16 on the nose.
        assert_eq!(rep.reg_sha, BigRational::from_integer(BigInt::from(16)));
        let expected = (16f64).ln() / (5f64).ln();
        assert!((rep.bs_direct - expected).abs() < 1e-12);
        assert!((rep.bs_direct - rep.bs_via_l).abs() < 1e-12);
        // All four orbits carry eps_o = -1 = zeta_6^3.
        let entries = rep.epsilon_entries.unwrap();
        assert_eq!(entries.len(), 4);
        for e in &entries {
            assert_eq!(e.zeta6_exponent, 3);
            assert!(!e.unitary);
        }
    }

    #[test]
    fn frozen_full_rank_point() {
        let (params, rep) = report(11, 2, 1);
        assert!(is_full_rank_case(&params));
        assert_eq!(rep.rank, 20);
        assert!(rep.lstar.is_one());
        assert_eq!(rep.reg_sha, BigRational::from_integer(BigInt::from(121)));
        // log(121) / log(121^2) = 1/2 exactly.
        assert!((rep.bs_direct - 0.5).abs() < 1e-12);
        assert!((rep.bs_via_l - 0.5).abs() < 1e-12);
        let entries = rep.epsilon_entries.unwrap();
        assert_eq!(entries.len(), 20);
        assert!(entries.iter().all(|e| e.unitary && e.zeta6_exponent == 0));
    }

    #[test]
    fn p_one_mod_six_pole() {
        for (p, nu, f) in [(7u64, 1, 1), (7, 1, 2), (13, 1, 1)] {
            let (params, rep) = report(p, nu, f);
            assert_eq!(rep.rank, 0, "({p},{nu},{f})");
            let expected = -(((params.q - 1) / 6) as i64) * nu as i64;
            assert_eq!(
                padic_ord_rational(&rep.lstar, p).unwrap(),
                expected,
                "({p},{nu},{f})"
            );
            // Reg*|Sha| is a p-adic unit here.
            assert_eq!(padic_ord_rational(&rep.reg_sha, p).unwrap(), 0);
            assert!(rep.epsilon_entries.is_none());
        }
    }

    #[test]
    fn epsilon_requires_residue() {
        let (params, tower, ring) = setup(7, 1, 1);
        let orbits = enumerate_orbits(&params, &tower, 6, true).unwrap();
        assert!(matches!(
            epsilon(&params, &tower, &ring, &orbits[0]),
            Err(Error::WrongResidue { p: 7, expected: 5 })
        ));
    }

    #[test]
    fn rank_formula_matches_analytic_on_grid() {
        for (p, nu, f, expected) in [
            (5u64, 1, 1, 0u32),
            (5, 1, 2, 4),
            (5, 2, 1, 0),
            (7, 1, 1, 0),
            (7, 1, 2, 0),
            (11, 1, 1, 10),
            (11, 2, 1, 20),
            (13, 1, 1, 0),
        ] {
            let (params, tower, ring) = setup(p, nu, f);
            let build = l_poly_orbit(&params, &tower, &ring, 1, ENUM_CAP).unwrap();
            let rank = crate::lfunction::analytic_rank(&build.l);
            assert_eq!(rank, expected, "({p},{nu},{f})");
            assert_eq!(
                rank_by_formula(&params, &tower).unwrap(),
                rank,
                "({p},{nu},{f})"
            );
            // Rank equals the number of unitary-root orbits.
            let unitary = build.factors.iter().filter(|f| f.is_unitary_root).count();
            assert_eq!(unitary as u32, rank, "({p},{nu},{f})");
        }
    }

    #[test]
    fn quadratic_shift_sign_is_live_at_q25() {
        // At (5,1,2) the orbits through alpha of odd discrete log carry the
        // extra chi_{F,2}(alpha) = -1; exactly the classes with dlog = 3
        // mod 6 land on eps_o = 1 and force rank 4.
        let (params, tower, ring) = setup(5, 1, 2);
        let build = l_poly_orbit(&params, &tower, &ring, 1, ENUM_CAP).unwrap();
        assert_eq!(crate::lfunction::analytic_rank(&build.l), 4);
        let unitary: Vec<u64> = build
            .factors
            .iter()
            .filter(|f| f.is_unitary_root)
            .map(|f| f.orbit.rep_j)
            .collect();
        assert_eq!(unitary, vec![3, 9, 15, 21]);
        // The eps table must reproduce every omega exactly in the ring.
        epsilon_table(&params, &tower, &ring, &build.factors).unwrap();
    }

    #[test]
    fn integrality_and_valuations_on_minus_one_side() {
        for (p, nu, f) in [(5u64, 1, 2), (5, 2, 1), (11, 1, 1)] {
            let (params, rep) = report(p, nu, f);
            assert!(rep.lstar.is_integer(), "({p},{nu},{f})");
            let floor = (params.q / 6) as i64 * nu as i64;
            assert!(
                padic_ord_rational(&rep.reg_sha, p).unwrap() >= floor,
                "({p},{nu},{f})"
            );
        }
    }

    #[test]
    fn ln_magnitude_handles_huge_values() {
        let x = BigInt::from(3).pow(5000);
        let expected = 5000.0 * (3f64).ln();
        assert!((ln_magnitude(&x) - expected).abs() < 1e-6 * expected);
        assert_eq!(ln_magnitude(&BigInt::from(1)), 0.0);
    }
}
