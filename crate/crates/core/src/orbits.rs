//! Twist parameters and the orbit combinatorics of <r> acting on
//! (Z/n) x F_q^x by (i, alpha) -> (r i, alpha^{1/r}).
//!
//! Orbits are traced on index pairs (i, j) with alpha = g_q^j: the inverse
//! Frobenius alpha^{1/r} is exactly j -> j r^{-1} mod (q - 1), so no root
//! extraction and no field arithmetic happen here. The canonical
//! representative of an orbit is its lexicographically least (i, j) pair and
//! orbit lists are sorted by representative, which keeps JSON output and test
//! fixtures stable.

use crate::arith::{checked_pow, gcd, inv_mod, is_prime_u64, lcm, ord_mod};
use crate::error::{Error, Result};
use crate::ff::{Felt, Tower};

/// Parameters of the twist y^2 = x^3 + t^q - t over F_r(t), r = p^nu,
/// q = p^f.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TwistParams {
    pub p: u64,
    pub nu: u32,
    pub f: u32,
    pub n: u64,
    pub r: u64,
    pub q: u64,
}

impl TwistParams {
    pub fn new(p: u64, nu: u32, f: u32) -> Result<TwistParams> {
        TwistParams::with_n(p, nu, f, 6)
    }

    pub fn with_n(p: u64, nu: u32, f: u32, n: u64) -> Result<TwistParams> {
        if !is_prime_u64(p) {
            return Err(Error::NonPrime(p));
        }
        if p <= 3 {
            return Err(Error::InvalidParams(format!("p = {p} must exceed 3")));
        }
        if nu == 0 || f == 0 {
            return Err(Error::InvalidParams("nu and f must be positive".into()));
        }
        if n == 0 || n % p == 0 {
            return Err(Error::InvalidParams(format!(
                "n = {n} must be positive and coprime to p = {p}"
            )));
        }
        let r = checked_pow(p, nu).ok_or(Error::CapExceeded {
            what: "r = p^nu",
            needed: (p as u128).pow(nu.min(64)),
            cap: u64::MAX as u128,
        })?;
        let q = checked_pow(p, f).ok_or(Error::CapExceeded {
            what: "q = p^f",
            needed: (p as u128).pow(f.min(64)),
            cap: u64::MAX as u128,
        })?;
        Ok(TwistParams { p, nu, f, n, r, q })
    }

    /// p mod 6, always 1 or 5 for primes p > 3.
    pub fn p_mod_6(&self) -> u64 {
        self.p % 6
    }

    pub fn r_mod_6(&self) -> u64 {
        self.r % 6
    }

    /// Order of r in (Z/n)^x.
    pub fn ord_r_mod_n(&self) -> u64 {
        ord_mod(self.r % self.n, self.n)
    }

    /// Every orbit size divides this: lcm(ord(r mod n), lcm(nu, f)/nu).
    pub fn orbit_size_bound(&self) -> u64 {
        lcm(
            self.ord_r_mod_n(),
            lcm(self.nu as u64, self.f as u64) / self.nu as u64,
        )
    }

    /// Subfield degrees the ambient tower must realize to evaluate every
    /// orbit character sum: F_q itself, the largest orbit field, the
    /// Jacobi-sum field, and F_{p^2} for the small decomposition fields.
    pub fn required_degrees(&self) -> Vec<u32> {
        let nu = self.nu as u64;
        let norbit = if self.r_mod_6() == 1 { 1 } else { 2 };
        vec![
            self.f,
            (nu * self.orbit_size_bound()) as u32,
            (nu * norbit) as u32,
            2,
        ]
    }
}

/// Orbit of <r> on (Z/n) x F_q^x. `elements` is the action cycle starting at
/// the canonical representative; the j in each pair indexes alpha = g_q^j.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    pub n: u64,
    pub rep_i: u64,
    pub rep_j: u64,
    pub rep_alpha: Felt,
    pub size: u32,
    pub elements: Vec<(u64, u64)>,
}

impl Orbit {
    /// [F_p(alpha) : F_p], the least d with alpha^{p^d} = alpha.
    pub fn alpha_degree(&self, params: &TwistParams) -> u32 {
        let qm1 = params.q - 1;
        let mut pd = 1u64;
        for d in 1..=params.f {
            pd = pd * params.p % qm1;
            if self.rep_j as u128 * (pd + qm1 - 1) as u128 % qm1 as u128 == 0 {
                return d;
            }
        }
        unreachable!("alpha degree divides f");
    }

    /// lcm(ord(r mod n), [F_r(alpha) : F_r]); must equal the traced size for
    /// representatives with i a unit mod n.
    pub fn size_by_formula(&self, params: &TwistParams) -> u64 {
        let d = self.alpha_degree(params) as u64;
        let nu = params.nu as u64;
        let deg_over_r = lcm(nu, d) / nu;
        lcm(params.ord_r_mod_n(), deg_over_r)
    }

    /// Degree over F_p of the orbit field F_{r^{|o|}}.
    pub fn field_degree(&self, params: &TwistParams) -> u32 {
        params.nu * self.size
    }
}

/// Orbit of <r> on (Z/6)^x: two singletons when r = 1 mod 6, one pair
/// otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NOrbit {
    pub elements: Vec<u64>,
}

impl NOrbit {
    pub fn size(&self) -> u32 {
        self.elements.len() as u32
    }

    pub fn rep(&self) -> u64 {
        self.elements[0]
    }
}

pub fn enumerate_norbits(params: &TwistParams) -> Vec<NOrbit> {
    if params.r_mod_6() == 1 {
        vec![
            NOrbit { elements: vec![1] },
            NOrbit { elements: vec![5] },
        ]
    } else {
        vec![NOrbit {
            elements: vec![1, 5],
        }]
    }
}

/// Trace the single orbit through (i, j), canonicalized to start at its
/// least element.
pub fn orbit_of(params: &TwistParams, tower: &Tower, n: u64, i: u64, j: u64) -> Result<Orbit> {
    let fq = tower.subfield(params.f)?;
    let qm1 = params.q - 1;
    let rinv = inv_mod(params.r % qm1, qm1);
    let start = (i % n, j % qm1);
    let mut cycle = vec![start];
    let mut cur = step(start, params.r, rinv, n, qm1);
    while cur != start {
        cycle.push(cur);
        cur = step(cur, params.r, rinv, n, qm1);
    }
    let min_pos = (0..cycle.len()).min_by_key(|&k| cycle[k]).unwrap();
    cycle.rotate_left(min_pos);
    let (rep_i, rep_j) = cycle[0];
    Ok(Orbit {
        n,
        rep_i,
        rep_j,
        rep_alpha: tower.pow(fq.gen, rep_j as u128),
        size: cycle.len() as u32,
        elements: cycle,
    })
}

fn step(x: (u64, u64), r: u64, rinv: u64, n: u64, qm1: u64) -> (u64, u64) {
    (
        (x.0 as u128 * r as u128 % n as u128) as u64,
        (x.1 as u128 * rinv as u128 % qm1 as u128) as u64,
    )
}

/// All orbits on (Z/n)^x x F_q^x (units_only) or (Z/n) x F_q^x, sorted by
/// canonical representative.
pub fn enumerate_orbits(
    params: &TwistParams,
    tower: &Tower,
    n: u64,
    units_only: bool,
) -> Result<Vec<Orbit>> {
    let qm1 = params.q - 1;
    let table = n.checked_mul(qm1).filter(|&t| t <= 100_000_000).ok_or(
        Error::CapExceeded {
            what: "orbit table",
            needed: n as u128 * qm1 as u128,
            cap: 100_000_000,
        },
    )?;
    let mut seen = vec![false; table as usize];
    let mut orbits = Vec::new();
    for i in 0..n {
        if units_only && gcd(i, n) != 1 {
            continue;
        }
        for j in 0..qm1 {
            if seen[(i * qm1 + j) as usize] {
                continue;
            }
            let o = orbit_of(params, tower, n, i, j)?;
            for &(ei, ej) in &o.elements {
                seen[(ei * qm1 + ej) as usize] = true;
            }
            orbits.push(o);
        }
    }
    Ok(orbits)
}

/// pi_2 / pi_3: the orbit of (i mod target_n, alpha) in O^x_{r,target_n,q}.
pub fn project(params: &TwistParams, tower: &Tower, o: &Orbit, target_n: u64) -> Result<Orbit> {
    orbit_of(params, tower, target_n, o.rep_i % target_n, o.rep_j)
}

/// (m_2, n_6) for an orbit in O^x_{r,6,q}: m_2 = |o|/|pi_2(o)|,
/// n_6 = |o|/|rho_6(o)| where rho_6 sends o to the <r>-orbit of i in (Z/6)^x.
pub fn multipliers(params: &TwistParams, tower: &Tower, o: &Orbit) -> Result<(u32, u32)> {
    let pi2 = project(params, tower, o, 2)?;
    let rho6_size = if params.r_mod_6() == 1 { 1 } else { 2 };
    Ok((o.size / pi2.size, o.size / rho6_size))
}

/// The orbit o' through (-i, alpha); an involution of O^x_{r,6,q}.
pub fn conjugate_orbit(params: &TwistParams, tower: &Tower, o: &Orbit) -> Result<Orbit> {
    orbit_of(params, tower, o.n, (o.n - o.rep_i % o.n) % o.n, o.rep_j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::FfConfig;

    fn setup(p: u64, nu: u32, f: u32) -> (TwistParams, Tower) {
        let params = TwistParams::new(p, nu, f).unwrap();
        let tower = Tower::build(p, &params.required_degrees(), FfConfig::default()).unwrap();
        (params, tower)
    }

    #[test]
    fn param_validation() {
        assert!(matches!(TwistParams::new(6, 1, 1), Err(Error::NonPrime(6))));
        assert!(TwistParams::new(3, 1, 1).is_err());
        assert!(TwistParams::new(5, 0, 1).is_err());
        assert!(TwistParams::with_n(5, 1, 1, 10).is_err());
        let p = TwistParams::new(5, 2, 3).unwrap();
        assert_eq!((p.r, p.q), (25, 125));
        assert_eq!(p.p_mod_6(), 5);
        assert_eq!(p.r_mod_6(), 1);
    }

    #[test]
    fn bouncing_orbits_q5() {
        let (params, tower) = setup(5, 1, 1);
        let orbits = enumerate_orbits(&params, &tower, 6, true).unwrap();
        assert_eq!(orbits.len(), 4);
        for o in &orbits {
            assert_eq!(o.size, 2);
            assert_eq!(o.rep_i, 1);
            // (1, alpha) pairs with (5, alpha): same j on both elements.
            assert_eq!(o.elements[0].1, o.elements[1].1);
            assert_eq!(o.elements[1].0, 5);
        }
    }

    #[test]
    fn vertical_singletons_q7() {
        let (params, tower) = setup(7, 1, 1);
        let orbits = enumerate_orbits(&params, &tower, 6, true).unwrap();
        assert_eq!(orbits.len(), 12);
        assert!(orbits.iter().all(|o| o.size == 1));
    }

    #[test]
    fn orbit_sizes_cover_s() {
        for (p, nu, f) in [(5, 1, 1), (5, 1, 2), (5, 2, 1), (7, 1, 2), (11, 2, 1)] {
            let (params, tower) = setup(p, nu, f);
            let units = enumerate_orbits(&params, &tower, 6, true).unwrap();
            let total: u64 = units.iter().map(|o| o.size as u64).sum();
            assert_eq!(total, 2 * (params.q - 1), "units at ({p},{nu},{f})");
            let full = enumerate_orbits(&params, &tower, 6, false).unwrap();
            let total: u64 = full.iter().map(|o| o.size as u64).sum();
            assert_eq!(total, 6 * (params.q - 1), "full S at ({p},{nu},{f})");
        }
    }

    #[test]
    fn size_formula_and_bound() {
        for (p, nu, f) in [(5, 1, 1), (5, 1, 2), (5, 2, 1), (7, 1, 1), (7, 1, 2)] {
            let (params, tower) = setup(p, nu, f);
            for o in enumerate_orbits(&params, &tower, 6, true).unwrap() {
                assert_eq!(o.size as u64, o.size_by_formula(&params));
                assert_eq!(params.orbit_size_bound() % o.size as u64, 0);
                // Action applied size times returns the representative.
                assert_eq!(o.elements.len(), o.size as usize);
                if params.p_mod_6() == 5 {
                    assert_eq!(o.field_degree(&params) % 2, 0);
                }
            }
        }
    }

    #[test]
    fn canonical_order_and_determinism() {
        let (params, tower) = setup(5, 1, 2);
        let a = enumerate_orbits(&params, &tower, 6, true).unwrap();
        let b = enumerate_orbits(&params, &tower, 6, true).unwrap();
        assert_eq!(a, b);
        let reps: Vec<(u64, u64)> = a.iter().map(|o| (o.rep_i, o.rep_j)).collect();
        let mut sorted = reps.clone();
        sorted.sort();
        assert_eq!(reps, sorted);
        for o in &a {
            assert_eq!(o.elements.iter().min().unwrap(), &(o.rep_i, o.rep_j));
        }
    }

    #[test]
    fn pi3_bijection() {
        for (p, nu, f) in [(5, 1, 2), (7, 1, 2), (11, 1, 1)] {
            let (params, tower) = setup(p, nu, f);
            let sixes = enumerate_orbits(&params, &tower, 6, true).unwrap();
            let threes = enumerate_orbits(&params, &tower, 3, true).unwrap();
            let mut images: Vec<(u64, u64)> = sixes
                .iter()
                .map(|o| project(&params, &tower, o, 3).unwrap())
                .map(|o| (o.rep_i, o.rep_j))
                .collect();
            images.sort();
            images.dedup();
            assert_eq!(images.len(), sixes.len(), "injective");
            assert_eq!(images.len(), threes.len(), "surjective");
        }
    }

    #[test]
    fn pi2_fibers() {
        // r = 1 mod 6: two-to-one everywhere.
        let (params, tower) = setup(7, 1, 2);
        let sixes = enumerate_orbits(&params, &tower, 6, true).unwrap();
        let twos = enumerate_orbits(&params, &tower, 2, true).unwrap();
        assert_eq!(sixes.len(), 2 * twos.len());
        for o in &sixes {
            let (m2, n6) = multipliers(&params, &tower, o).unwrap();
            assert_eq!(m2, 1);
            assert_eq!(n6, o.size);
        }
        // r = -1 mod 6, |pi_2(o)| odd: unique preimage with m_2 = 2.
        let (params, tower) = setup(5, 1, 1);
        for o in enumerate_orbits(&params, &tower, 6, true).unwrap() {
            let pi2 = project(&params, &tower, &o, 2).unwrap();
            assert_eq!(pi2.size, 1);
            let (m2, n6) = multipliers(&params, &tower, &o).unwrap();
            assert_eq!(m2, 2);
            assert_eq!(n6, 1);
        }
    }

    #[test]
    fn conjugate_involution() {
        let (params, tower) = setup(5, 1, 1);
        for o in enumerate_orbits(&params, &tower, 6, true).unwrap() {
            let oc = conjugate_orbit(&params, &tower, &o).unwrap();
            // r = -1 mod 6, alpha in F_r: orbit already self-conjugate.
            assert_eq!(oc, o);
        }
        let (params, tower) = setup(7, 1, 1);
        for o in enumerate_orbits(&params, &tower, 6, true).unwrap() {
            let oc = conjugate_orbit(&params, &tower, &o).unwrap();
            assert_ne!(oc, o);
            assert_eq!(oc.size, o.size);
            let occ = conjugate_orbit(&params, &tower, &oc).unwrap();
            assert_eq!(occ, o);
        }
    }

    #[test]
    fn norbits_by_residue() {
        let params = TwistParams::new(7, 1, 1).unwrap();
        let ns = enumerate_norbits(&params);
        assert_eq!(ns.len(), 2);
        assert!(ns.iter().all(|o| o.size() == 1));
        let params = TwistParams::new(5, 1, 1).unwrap();
        let ns = enumerate_norbits(&params);
        assert_eq!(ns.len(), 1);
        assert_eq!(ns[0].elements, vec![1, 5]);
    }
}
