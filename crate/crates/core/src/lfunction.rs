//! The L-function of y^2 = x^3 + t^q - t over F_r(t), built two independent
//! ways as a product over orbits, plus exact rank and special-value
//! extraction at T = 1/r.
//!
//! Route one multiplies (1 - omega(o) T^{|o|}) with
//! omega(o) = G(pi_2(o))^{m_2} G(pi_3(o)); route two multiplies
//! (1 - J(rho_6(o))^{n_6} G(o) T^{|o|}). Both products live in Z[zeta_{6p}][T]
//! until the end, when every coefficient must collapse to a rational integer.
//! Rank and special value use exact synthetic division by (1 - rT); no
//! floating point touches any value that ends up in a dossier.

use crate::char_sums::{orbit_gauss, orbit_jacobi};
use crate::cyclo::{CycloInt, CycloRing};
use crate::error::{Error, Result};
use crate::ff::Tower;
use crate::orbits::{
    enumerate_norbits, enumerate_orbits, multipliers, project, NOrbit, Orbit,
    TwistParams,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LPolynomial {
    pub params: TwistParams,
    /// Constant term first; degree 2(q-1).
    pub coeffs: Vec<BigInt>,
}

impl LPolynomial {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }
}

/// One orbit's factor data: the inverse root omega(o) of T^{|o|}.
pub struct OrbitFactor {
    pub orbit: Orbit,
    pub omega: CycloInt,
    /// omega(o) = r^{|o|} exactly; these orbits contribute the zeros at
    /// T = 1/r.
    pub is_unitary_root: bool,
}

pub struct LBuild {
    pub l: LPolynomial,
    pub factors: Vec<OrbitFactor>,
}

/// omega(o) = G(pi_2(o))^{m_2(o)} * G(pi_3(o)).
pub fn omega(
    params: &TwistParams,
    tower: &Tower,
    ring: &CycloRing,
    o: &Orbit,
    psi_unit: u64,
    cap: u64,
) -> Result<CycloInt> {
    let pi2 = project(params, tower, o, 2)?;
    let pi3 = project(params, tower, o, 3)?;
    let (m2, _) = multipliers(params, tower, o)?;
    let g2 = orbit_gauss(params, tower, ring, &pi2, psi_unit, cap)?;
    let g3 = orbit_gauss(params, tower, ring, &pi3, psi_unit, cap)?;
    Ok(ring.mul(&ring.pow(&g2, m2 as u64), &g3))
}

/// The sextic-twist form of the same factor coefficient:
/// J(rho_6(o))^{n_6(o)} * G(o).
pub fn sextic_factor(
    params: &TwistParams,
    tower: &Tower,
    ring: &CycloRing,
    norbits: &[NOrbit],
    o: &Orbit,
    psi_unit: u64,
    cap: u64,
) -> Result<CycloInt> {
    let rho6 = norbits
        .iter()
        .find(|no| no.elements.contains(&(o.rep_i % 6)))
        .expect("rho_6 image exists");
    let (_, n6) = multipliers(params, tower, o)?;
    let j = orbit_jacobi(params, tower, ring, rho6, cap)?;
    let g = orbit_gauss(params, tower, ring, o, psi_unit, cap)?;
    Ok(ring.mul(&ring.pow(&j, n6 as u64), &g))
}

/// Expand prod (1 - w_k T^{s_k}) in the ring and collapse to Z[T].
fn expand_product(
    ring: &CycloRing,
    terms: &[(CycloInt, u32)],
    degree: usize,
) -> Result<Vec<BigInt>> {
    let mut poly = vec![ring.zero(); degree + 1];
    poly[0] = ring.one();
    let mut filled = 0usize;
    for (idx, (w, s)) in terms.iter().enumerate() {
        let s = *s as usize;
        filled += s;
        for k in (s..=filled).rev() {
            let shifted = ring.mul(w, &poly[k - s]);
            poly[k] = ring.sub(&poly[k], &shifted);
        }
        // Structural drift check: partial products are monic with constant
        // term one and degree exactly the sizes consumed so far.
        if (idx + 1) % 16 == 0 || idx + 1 == terms.len() {
            if poly[0] != ring.one() || filled > degree {
                return Err(Error::IdentityFailure(
                    "orbit product lost its normalization".into(),
                ));
            }
        }
    }
    if filled != degree {
        return Err(Error::IdentityFailure(format!(
            "orbit sizes sum to {filled}, expected degree {degree}"
        )));
    }
    poly.iter().map(|c| c.as_integer()).collect()
}

fn build_l(
    params: &TwistParams,
    tower: &Tower,
    ring: &CycloRing,
    psi_unit: u64,
    cap: u64,
    sextic: bool,
) -> Result<LBuild> {
    let orbits = enumerate_orbits(params, tower, 6, true)?;
    let norbits = enumerate_norbits(params);
    let factors: Vec<OrbitFactor> = orbits
        .into_par_iter()
        .map(|o| -> Result<OrbitFactor> {
            let w = if sextic {
                sextic_factor(params, tower, ring, &norbits, &o, psi_unit, cap)?
            } else {
                omega(params, tower, ring, &o, psi_unit, cap)?
            };
            let r_pow = ring.from_int(BigInt::from(params.r).pow(o.size));
            let is_unitary_root = w == r_pow;
            Ok(OrbitFactor {
                orbit: o,
                omega: w,
                is_unitary_root,
            })
        })
        .collect::<Result<_>>()?;
    let degree = 2 * (params.q as usize - 1);
    let terms: Vec<(CycloInt, u32)> = factors
        .iter()
        .map(|f| (f.omega.clone(), f.orbit.size))
        .collect();
    let coeffs = expand_product(ring, &terms, degree)?;
    Ok(LBuild {
        l: LPolynomial {
            params: *params,
            coeffs,
        },
        factors,
    })
}

/// L(E,T) as prod over orbits of (1 - omega(o) T^{|o|}).
pub fn l_poly_orbit(
    params: &TwistParams,
    tower: &Tower,
    ring: &CycloRing,
    psi_unit: u64,
    cap: u64,
) -> Result<LBuild> {
    build_l(params, tower, ring, psi_unit, cap, false)
}

/// L(E,T) as prod over orbits of (1 - J(rho_6(o))^{n_6} G(o) T^{|o|}).
pub fn l_poly_sextic(
    params: &TwistParams,
    tower: &Tower,
    ring: &CycloRing,
    psi_unit: u64,
    cap: u64,
) -> Result<LBuild> {
    build_l(params, tower, ring, psi_unit, cap, true)
}

/// Multiplicity of the root T = 1/r, by repeated exact synthetic division
/// by (1 - rT).
pub fn analytic_rank(l: &LPolynomial) -> u32 {
    let r = BigInt::from(l.params.r);
    let mut coeffs = l.coeffs.clone();
    let mut rank = 0u32;
    loop {
        match divide_once(&coeffs, &r) {
            Some(next) => {
                rank += 1;
                coeffs = next;
            }
            None => return rank,
        }
    }
}

/// Divide by (1 - rT) if it divides exactly: a_i = b_i - r b_{i-1}.
fn divide_once(coeffs: &[BigInt], r: &BigInt) -> Option<Vec<BigInt>> {
    if coeffs.len() == 1 {
        return None;
    }
    let d = coeffs.len() - 1;
    let mut b = Vec::with_capacity(d);
    let mut prev = BigInt::zero();
    for a in &coeffs[..d] {
        let cur = a + r * &prev;
        b.push(cur.clone());
        prev = cur;
    }
    if coeffs[d] == -(r * &prev) {
        Some(b)
    } else {
        None
    }
}

/// L*(E) = [L(T)/(1 - rT)^rho] evaluated at T = 1/r; exact, in Z[1/p].
pub fn special_value(l: &LPolynomial) -> BigRational {
    let r = BigInt::from(l.params.r);
    let mut coeffs = l.coeffs.clone();
    while let Some(next) = divide_once(&coeffs, &r) {
        coeffs = next;
    }
    // Evaluate sum b_i r^{-i} as (sum b_i r^{d-i}) / r^d.
    let d = coeffs.len() - 1;
    let mut num = BigInt::zero();
    for (i, b) in coeffs.iter().enumerate() {
        num += b * r.pow((d - i) as u32);
    }
    BigRational::new(num, r.pow(d as u32))
}

/// Split the orbit factors into O_1 (omega = r^{|o|}) and O_2 (the rest);
/// |O_1| is the analytic rank.
pub fn orbit_partition(build: &LBuild) -> (Vec<&OrbitFactor>, Vec<&OrbitFactor>) {
    build.factors.iter().partition(|f| f.is_unitary_root)
}

/// L* recomputed from the factor data:
/// prod over O_1 of |o| times prod over O_2 of (1 - omega(o)/r^{|o|}).
pub fn special_value_by_orbits(ring: &CycloRing, build: &LBuild) -> Result<BigRational> {
    let (o1, o2) = orbit_partition(build);
    let mut num_ring = ring.one();
    let mut den = BigInt::one();
    for f in &o2 {
        let r_pow = BigInt::from(build.l.params.r).pow(f.orbit.size);
        let term = ring.sub(&ring.from_int(r_pow.clone()), &f.omega);
        num_ring = ring.mul(&num_ring, &term);
        den *= r_pow;
        if num_ring.is_zero() {
            return Err(Error::IdentityFailure(
                "orbit in O_2 with omega = r^{|o|}".into(),
            ));
        }
    }
    let mut num = num_ring.as_integer()?;
    for f in &o1 {
        num *= BigInt::from(f.orbit.size);
    }
    Ok(BigRational::new(num, den))
}

/// The functional-equation sign: the w in {1, -1} with
/// a_{d-k} = w r^{d-2k} a_k for all k. Existence is part of the contract;
/// the value is reported, never asserted.
pub fn functional_equation_sign(l: &LPolynomial) -> Result<i8> {
    let d = l.degree();
    let r = BigInt::from(l.params.r);
    'sign: for w in [1i8, -1] {
        for k in 0..=d / 2 {
            let lhs = &l.coeffs[d - k];
            let mut rhs = &l.coeffs[k] * r.pow((d - 2 * k) as u32);
            if w == -1 {
                rhs = -rhs;
            }
            if *lhs != rhs {
                continue 'sign;
            }
        }
        return Ok(w);
    }
    Err(Error::IdentityFailure(
        "no functional-equation sign fits".into(),
    ))
}

/// Power sums c_n of the inverse roots via Newton's identities:
/// c_n = -n a_n - sum_{k=1}^{n-1} a_k c_{n-k}. These are exactly the Taylor
/// coefficients of -log L.
pub fn newton_power_sums(l: &LPolynomial, n_max: usize) -> Vec<BigInt> {
    let a = |k: usize| {
        if k < l.coeffs.len() {
            l.coeffs[k].clone()
        } else {
            BigInt::zero()
        }
    };
    let mut c: Vec<BigInt> = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut s = -BigInt::from(n as u64) * a(n);
        for k in 1..n {
            s -= a(k) * &c[n - k - 1];
        }
        c.push(s);
    }
    c
}

/// True when p = -1 mod 6, 3(q-1) | r-1 and 8 | (p+1) nu: then
/// L = (1 - rT)^{2(q-1)} and the rank is everything.
pub fn is_full_rank_case(params: &TwistParams) -> bool {
    params.p_mod_6() == 5
        && (params.r - 1) % (3 * (params.q - 1)) == 0
        && ((params.p + 1) * params.nu as u64) % 8 == 0
}

/// Largest deviation of |omega(o)| from r^{|o|} across factors and
/// embeddings; the Riemann hypothesis bound for this L.
pub fn weil_deviation(ring: &CycloRing, build: &LBuild) -> Result<f64> {
    let mut worst = 0.0f64;
    for f in &build.factors {
        let want = (build.l.params.r as f64).powi(f.orbit.size as i32);
        for k in crate::char_sums::embeddings(ring.conductor()) {
            let abs = ring.complex_abs(&f.omega, k)?;
            worst = worst.max(((abs - want) / want).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::char_sums::ENUM_CAP;
    use crate::ff::FfConfig;
    use crate::orbits::conjugate_orbit;

    fn setup(p: u64, nu: u32, f: u32) -> (TwistParams, Tower, CycloRing) {
        let params = TwistParams::new(p, nu, f).unwrap();
        let tower = Tower::build(p, &params.required_degrees(), FfConfig::default()).unwrap();
        let ring = CycloRing::new(p).unwrap();
        (params, tower, ring)
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn frozen_q5_polynomial() {
        let (params, tower, ring) = setup(5, 1, 1);
        let build = l_poly_orbit(&params, &tower, &ring, 1, ENUM_CAP).unwrap();
        // (1 + 25 T^2)^4
        assert_eq!(
            build.l.coeffs,
            ints(&[1, 0, 100, 0, 3750, 0, 62500, 0, 390625])
        );
        assert_eq!(analytic_rank(&build.l), 0);
        assert_eq!(
            special_value(&build.l),
            BigRational::from_integer(BigInt::from(16))
        );
        assert_eq!(functional_equation_sign(&build.l).unwrap(), 1);
        let (o1, o2) = orbit_partition(&build);
        assert_eq!((o1.len(), o2.len()), (0, 4));
        assert_eq!(
            special_value_by_orbits(&ring, &build).unwrap(),
            BigRational::from_integer(BigInt::from(16))
        );
    }

    #[test]
    fn routes_agree_small_grid() {
        for (p, nu, f) in [(5u64, 1, 1), (7, 1, 1), (5, 1, 2), (11, 1, 1)] {
            let (params, tower, ring) = setup(p, nu, f);
            let a = l_poly_orbit(&params, &tower, &ring, 1, ENUM_CAP).unwrap();
            let b = l_poly_sextic(&params, &tower, &ring, 1, ENUM_CAP).unwrap();
            assert_eq!(a.l, b.l, "({p},{nu},{f})");
            assert_eq!(a.l.degree(), 2 * (params.q as usize - 1));
            assert_eq!(a.l.coeffs[0], BigInt::from(1));
            functional_equation_sign(&a.l).unwrap();
        }
    }

    #[test]
    fn per_orbit_conjugate_identity() {
        // The sextic-route factor at the conjugate orbit o' equals the
        // orbit-route factor at o, exactly in the ring.
        for (p, nu, f) in [(5u64, 1, 1), (7, 1, 1), (7, 1, 2)] {
            let (params, tower, ring) = setup(p, nu, f);
            let norbits = enumerate_norbits(&params);
            for o in enumerate_orbits(&params, &tower, 6, true).unwrap() {
                let oc = conjugate_orbit(&params, &tower, &o).unwrap();
                let lhs = sextic_factor(&params, &tower, &ring, &norbits, &oc, 1, ENUM_CAP)
                    .unwrap();
                let rhs = omega(&params, &tower, &ring, &o, 1, ENUM_CAP).unwrap();
                assert_eq!(lhs, rhs, "({p},{nu},{f}) orbit ({},{})", o.rep_i, o.rep_j);
                assert_eq!(oc.size, o.size);
            }
        }
    }

    #[test]
    fn full_rank_point() {
        let (params, tower, ring) = setup(11, 2, 1);
        assert!(is_full_rank_case(&params));
        let build = l_poly_orbit(&params, &tower, &ring, 1, ENUM_CAP).unwrap();
        // (1 - 121 T)^20
        let d = 20usize;
        let mut want = vec![BigInt::zero(); d + 1];
        let mut binom = BigInt::from(1);
        for (k, w) in want.iter_mut().enumerate() {
            *w = &binom * BigInt::from(-121i64).pow(k as u32);
            binom = &binom * BigInt::from((d - k) as u64) / BigInt::from(k as u64 + 1);
        }
        assert_eq!(build.l.coeffs, want);
        assert_eq!(analytic_rank(&build.l), 20);
        assert_eq!(
            special_value(&build.l),
            BigRational::from_integer(BigInt::one())
        );
        let (o1, o2) = orbit_partition(&build);
        assert_eq!((o1.len(), o2.len()), (20, 0));
        assert_eq!(
            special_value_by_orbits(&ring, &build).unwrap(),
            BigRational::from_integer(BigInt::one())
        );
    }

    #[test]
    fn rank_zero_and_p_adic_pole_q7() {
        let (params, tower, ring) = setup(7, 1, 1);
        let build = l_poly_orbit(&params, &tower, &ring, 1, ENUM_CAP).unwrap();
        assert_eq!(analytic_rank(&build.l), 0);
        let lstar = special_value(&build.l);
        assert!(!lstar.is_zero());
        // ord_7(L*) = -(q-1)nu/6 = -1.
        assert_eq!(
            crate::cyclo::padic_ord_rational(&lstar, 7).unwrap(),
            -1
        );
        assert_eq!(special_value_by_orbits(&ring, &build).unwrap(), lstar);
    }

    #[test]
    fn newton_sums_match_log_expansion() {
        let (params, tower, ring) = setup(5, 1, 1);
        let build = l_poly_orbit(&params, &tower, &ring, 1, ENUM_CAP).unwrap();
        let c = newton_power_sums(&build.l, 4);
        // -log((1+25T^2)^4) = -100 T^2 + 2500/2... : c_2 = -200, c_4 = 2500 * ... .
        assert_eq!(c[0], BigInt::zero());
        assert_eq!(c[1], BigInt::from(-200));
        assert_eq!(c[2], BigInt::zero());
        // c_4 = sum omega^2 over 8 inverse roots omega = +-5i: each (+-5i)^4 = 625.
        assert_eq!(c[3], BigInt::from(8 * 625));
    }

    #[test]
    fn weil_bound_on_factors() {
        let (params, tower, ring) = setup(5, 1, 2);
        let build = l_poly_orbit(&params, &tower, &ring, 1, ENUM_CAP).unwrap();
        assert!(weil_deviation(&ring, &build).unwrap() < 1e-9);
    }

    #[test]
    fn choice_independence_quick() {
        let (params, tower, ring) = setup(5, 1, 1);
        let base = l_poly_orbit(&params, &tower, &ring, 1, ENUM_CAP).unwrap();
        let cfg = FfConfig {
            generator_index: 1,
            ..FfConfig::default()
        };
        let tower2 = Tower::build(5, &params.required_degrees(), cfg).unwrap();
        let alt = l_poly_orbit(&params, &tower2, &ring, 2, ENUM_CAP).unwrap();
        assert_eq!(base.l, alt.l);
    }
}
