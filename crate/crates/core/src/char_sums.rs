//! Exact Gauss and Jacobi sums, their orbit versions G(o) and J(o),
//! Stickelberger digit-sum valuations, and the decomposition of G(o) as a
//! root of unity times a power of a small-field Gauss sum.
//!
//! Sums are accumulated as integer multiplicity buckets indexed by the
//! exponent of zeta_{6p}, then reduced once; no intermediate ring products.
//! Valuations are never computed on ring elements: every ord statement is
//! reduced to a base-p digit sum of the character exponent.

use crate::arith::{lcm, ord_mod};
use crate::characters::{AddChar, MultChar};
use crate::cyclo::{CycloInt, CycloRing};
use crate::error::{Error, Result};
use crate::ff::{Tower, ONE};
use crate::orbits::{NOrbit, Orbit, TwistParams};
use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};

/// Fields larger than this are rejected rather than summed approximately.
pub const ENUM_CAP: u64 = 10_000_000;

/// G_F(chi, psi) = -sum over F^x of chi(x) psi(x).
pub fn gauss_sum(
    tower: &Tower,
    ring: &CycloRing,
    chi: &MultChar,
    psi: &AddChar,
    cap: u64,
) -> Result<CycloInt> {
    if chi.is_trivial() {
        return Err(Error::TrivialCharacter);
    }
    if chi.field.degree != psi.field.degree {
        return Err(Error::InvalidParams(
            "gauss_sum characters live on different fields".into(),
        ));
    }
    let m = ring.conductor();
    if m % chi.order != 0 {
        return Err(Error::OrderNotDividing {
            n: chi.order,
            group: m,
        });
    }
    let field = chi.field;
    if field.size > cap {
        return Err(Error::CapExceeded {
            what: "character sum enumeration",
            needed: field.size as u128,
            cap: cap as u128,
        });
    }
    let scale = m / chi.order;
    let mut bucket = vec![0i64; m as usize];
    let mut x = ONE;
    for j in 0..field.size - 1 {
        if j > 0 {
            x = tower.mul(x, field.gen);
        }
        // x = gen^j, so the chi exponent is power*j without a dlog.
        let ce = (chi.power as u128 * j as u128 % chi.order as u128) as u64;
        let ae = psi.exponent(tower, x);
        bucket[((ce * scale + 6 * ae) % m) as usize] += 1;
    }
    Ok(ring.neg(&ring.from_bucket(&bucket)))
}

/// J_F(chi1, chi2) = -sum over F of chi1(x) chi2(1 - x), with chi(0) = 0.
/// The result is verified in the ring against
/// J * G(chi1 chi2, psi) = G(chi1, psi) * G(chi2, psi).
pub fn jacobi_sum(
    tower: &Tower,
    ring: &CycloRing,
    chi1: &MultChar,
    chi2: &MultChar,
    cap: u64,
) -> Result<CycloInt> {
    let prod = chi1.product(chi2)?;
    if chi1.is_trivial() || chi2.is_trivial() || prod.is_trivial() {
        return Err(Error::DegenerateCharacters(format!(
            "orders {}^{} and {}^{}",
            chi1.order, chi1.power, chi2.order, chi2.power
        )));
    }
    let m = ring.conductor();
    for n in [chi1.order, chi2.order] {
        if m % n != 0 {
            return Err(Error::OrderNotDividing { n, group: m });
        }
    }
    let field = chi1.field;
    if field.size > cap {
        return Err(Error::CapExceeded {
            what: "character sum enumeration",
            needed: field.size as u128,
            cap: cap as u128,
        });
    }
    let (s1, s2) = (m / chi1.order, m / chi2.order);
    let mut bucket = vec![0i64; m as usize];
    let mut x = ONE;
    for j in 0..field.size - 1 {
        if j > 0 {
            x = tower.mul(x, field.gen);
        }
        let y = tower.sub(ONE, x);
        if y == crate::ff::ZERO {
            continue;
        }
        let e1 = (chi1.power as u128 * j as u128 % chi1.order as u128) as u64;
        let e2 = chi2.exponent(tower, y)?;
        bucket[((e1 * s1 + e2 * s2) % m) as usize] += 1;
    }
    let j = ring.neg(&ring.from_bucket(&bucket));
    let psi = AddChar::new(field, ONE, 1);
    let lhs = ring.mul(&j, &gauss_sum(tower, ring, &prod, &psi, cap)?);
    let rhs = ring.mul(
        &gauss_sum(tower, ring, chi1, &psi, cap)?,
        &gauss_sum(tower, ring, chi2, &psi, cap)?,
    );
    if lhs != rhs {
        return Err(Error::IdentityFailure(format!(
            "Jacobi-Gauss quotient over field of size {}",
            field.size
        )));
    }
    Ok(j)
}

/// G(o) = G_F(chi_{F,n}^i, psi_alpha) over F = F_{r^{|o|}} for the orbit's
/// canonical representative; independent of the representative choice.
pub fn orbit_gauss(
    params: &TwistParams,
    tower: &Tower,
    ring: &CycloRing,
    o: &Orbit,
    psi_unit: u64,
    cap: u64,
) -> Result<CycloInt> {
    let field = tower.subfield(o.field_degree(params))?;
    let chi = MultChar::new(field, o.n, o.rep_i)?;
    let psi = AddChar::new(field, o.rep_alpha, psi_unit);
    gauss_sum(tower, ring, &chi, &psi, cap)
}

/// J(o) = J_F(chi_{F,2}^{-i}, chi_{F,3}^{-i}) over F = F_{r^{|o|}} for an
/// orbit o of <r> on (Z/6)^x.
pub fn orbit_jacobi(
    params: &TwistParams,
    tower: &Tower,
    ring: &CycloRing,
    no: &NOrbit,
    cap: u64,
) -> Result<CycloInt> {
    let field = tower.subfield(params.nu * no.size())?;
    let i = no.rep();
    let chi2 = MultChar::new(field, 2, (2 - i % 2) % 2)?;
    let chi3 = MultChar::new(field, 3, (3 - i % 3) % 3)?;
    jacobi_sum(tower, ring, &chi2, &chi3, cap)
}

/// Digit-sum valuation: ord G(chi^{-s}, psi) = (sum of base-p digits of s)
/// divided by (p - 1), for 0 < s < p^mu - 1.
pub fn stickelberger_ord(p: u64, mu: u32, s: &BigUint) -> Result<Rational64> {
    let qm1 = BigUint::from(p).pow(mu) - BigUint::one();
    if s.is_zero() || *s >= qm1 {
        return Err(Error::OutOfRange(format!(
            "Stickelberger exponent s = {s} not in (0, p^{mu} - 1)"
        )));
    }
    let mut rem = s.clone();
    let big_p = BigUint::from(p);
    let mut digit_sum = 0u64;
    for _ in 0..mu {
        let (div, digit) = rem.div_rem(&big_p);
        digit_sum += digit.to_u64().unwrap();
        rem = div;
    }
    Ok(Rational64::new(digit_sum as i64, (p - 1) as i64))
}

/// ord of G(chi_{F,n}^i, psi) over F = F_{p^mu}, via the exponent
/// s = -i (p^mu - 1)/n of the inverse-power convention.
pub fn gauss_ord_by_digits(p: u64, mu: u32, n: u64, i: u64) -> Result<Rational64> {
    if i % n == 0 {
        return Err(Error::TrivialCharacter);
    }
    let qm1 = BigUint::from(p).pow(mu) - BigUint::one();
    let s = &qm1 / n * (n - i % n);
    stickelberger_ord(p, mu, &s)
}

/// ord G(o) by digit sums.
pub fn orbit_gauss_ord(params: &TwistParams, o: &Orbit) -> Result<Rational64> {
    gauss_ord_by_digits(params.p, o.field_degree(params), o.n, o.rep_i)
}

/// ord J(o) = ord G(chi_2^{-i}) + ord G(chi_3^{-i}) - ord G(chi_6^{-5i}),
/// the product character being chi_2 chi_3 = chi_6^5.
pub fn orbit_jacobi_ord(params: &TwistParams, no: &NOrbit) -> Result<Rational64> {
    let mu = params.nu * no.size();
    let i = no.rep();
    Ok(
        gauss_ord_by_digits(params.p, mu, 2, (2 - i % 2) % 2)?
            + gauss_ord_by_digits(params.p, mu, 3, (3 - i % 3) % 3)?
            - gauss_ord_by_digits(params.p, mu, 6, (6 - 5 * i % 6) % 6)?,
    )
}

/// G(o) = zeta * g^{nu |o| / c} with zeta in mu_n and g the Gauss sum of the
/// same character data over the small field F_{p^c}, c = ord of p mod n.
pub struct GaussDecomposition {
    pub zeta: CycloInt,
    pub g: CycloInt,
    pub exponent: u64,
    pub small_degree: u32,
}

pub fn gauss_power_decompose(
    params: &TwistParams,
    tower: &Tower,
    ring: &CycloRing,
    o: &Orbit,
    psi_unit: u64,
    cap: u64,
) -> Result<GaussDecomposition> {
    let c = ord_mod(params.p % o.n, o.n) as u32;
    let mu = o.field_degree(params);
    debug_assert_eq!(mu % c, 0, "c divides nu|o| by construction");
    let exponent = (mu / c) as u64;
    let small = tower.subfield(c)?;
    let chi_small = MultChar::new(small, o.n, o.rep_i)?;
    let psi_small = AddChar::new(small, ONE, psi_unit);
    let g = gauss_sum(tower, ring, &chi_small, &psi_small, cap)?;
    let field = tower.subfield(mu)?;
    let chi = MultChar::new(field, o.n, (o.n - o.rep_i % o.n) % o.n)?;
    let zeta = chi.eval(tower, ring, o.rep_alpha)?;
    let recon = ring.mul(&zeta, &ring.pow(&g, exponent));
    let direct = orbit_gauss(params, tower, ring, o, psi_unit, cap)?;
    if recon != direct {
        return Err(Error::IdentityFailure(format!(
            "Gauss power decomposition at orbit ({}, j={})",
            o.rep_i, o.rep_j
        )));
    }
    let want = (params.p as f64).powf(c as f64 / 2.0);
    for k in embeddings(ring.conductor()) {
        let abs = ring.complex_abs(&g, k)?;
        if (abs - want).abs() > 1e-9 {
            return Err(Error::IdentityFailure(format!(
                "|g| = {abs} differs from p^{{c/2}} = {want} in embedding {k}"
            )));
        }
    }
    Ok(GaussDecomposition {
        zeta,
        g,
        exponent,
        small_degree: c,
    })
}

/// Exponents k coprime to m: the complex embeddings zeta -> zeta^k.
pub fn embeddings(m: u64) -> impl Iterator<Item = u64> {
    (1..m).filter(move |k| crate::arith::gcd(*k, m) == 1)
}

/// Largest deviation of |value| from sqrt(field_size) over all embeddings.
pub fn magnitude_deviation(ring: &CycloRing, value: &CycloInt, field_size: u64) -> Result<f64> {
    let want = (field_size as f64).sqrt();
    let mut worst = 0.0f64;
    for k in embeddings(ring.conductor()) {
        let abs = ring.complex_abs(value, k)?;
        worst = worst.max((abs - want).abs());
    }
    Ok(worst)
}

/// lcm of the degrees needed so both ends of every Hasse-Davenport test
/// step live in one tower.
pub fn hd_degrees(sub: u32, sup: u32) -> u32 {
    lcm(sub as u64, sup as u64) as u32
}
