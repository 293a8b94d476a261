//! Exact arithmetic in Z[zeta_m] for a fixed conductor m = 6p, plus the
//! complex-embedding magnitude check and p-adic valuations of rationals.
//!
//! Every Gauss/Jacobi sum, root of unity, and inverse-root weight this crate
//! manipulates for character orders dividing 6 over characteristic p lives in
//! this one ring, so the conductor is fixed per run instead of tracking a
//! lattice of subfields of cyclotomic fields.
//!
//! Valuations of cyclotomic integers are never computed here: callers that
//! need valuations of Gauss sums go through digit sums (char_sums), and
//! valuations of rationals go through `padic_ord_rational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith;
use crate::dd::{unit_root, Dd};
use crate::error::{Error, Result};

/// Element of Z[zeta_m] in the power basis 1, zeta, ..., zeta^{phi(m)-1},
/// reduced mod the m-th cyclotomic polynomial.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CycloInt {
    m: u64,
    c: Vec<BigInt>,
}

impl CycloInt {
    pub fn conductor(&self) -> u64 {
        self.m
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }

    /// The constant coefficient iff all other coordinates vanish.
    pub fn as_integer(&self) -> Result<BigInt> {
        if self.c[1..].iter().all(|x| x.is_zero()) {
            Ok(self.c[0].clone())
        } else {
            Err(Error::NotRational(self.to_string()))
        }
    }
}

impl std::fmt::Display for CycloInt {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut first = true;
        for (j, co) in self.c.iter().enumerate() {
            if co.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{co}")?,
                1 => write!(f, "{co}*z")?,
                _ => write!(f, "{co}*z^{j}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Shared context for one conductor m = 6p: the cyclotomic polynomial, the
/// reduction rows for products, and all m reduced powers of zeta.
pub struct CycloRing {
    p: u64,
    m: u64,
    phi: usize,
    cyclotomic: Vec<BigInt>,
    /// red[d] = zeta^{phi + d} reduced, for d in 0..phi-1.
    red: Vec<Vec<BigInt>>,
    /// zeta[e] = zeta^e reduced, for e in 0..m.
    zeta: Vec<Vec<BigInt>>,
}

impl CycloRing {
    pub fn new(p: u64) -> Result<CycloRing> {
        if p <= 3 || !arith::is_prime_u64(p) {
            return Err(Error::NonPrime(p));
        }
        let m = 6 * p;
        let cyclotomic = cyclotomic_polynomial(m);
        let phi = cyclotomic.len() - 1;
        debug_assert_eq!(phi as u64, 2 * (p - 1));

        let mut red: Vec<Vec<BigInt>> = Vec::with_capacity(phi.saturating_sub(1));
        // zeta^phi = -(tail of Phi_m) since Phi_m is monic.
        let base: Vec<BigInt> = cyclotomic[..phi].iter().map(|c| -c).collect();
        red.push(base);
        for d in 1..phi.saturating_sub(1) {
            let prev = red[d - 1].clone();
            red.push(shift_reduce(&prev, &red[0]));
        }

        let mut zeta: Vec<Vec<BigInt>> = Vec::with_capacity(m as usize);
        let mut cur = vec![BigInt::zero(); phi];
        cur[0] = BigInt::one();
        for _ in 0..m {
            zeta.push(cur.clone());
            cur = shift_reduce(&cur, &red[0]);
        }
        debug_assert_eq!(zeta[0], cur, "zeta^m must return to 1");

        Ok(CycloRing {
            p,
            m,
            phi,
            cyclotomic,
            red,
            zeta,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn conductor(&self) -> u64 {
        self.m
    }

    pub fn phi(&self) -> usize {
        self.phi
    }

    pub fn cyclotomic_coeffs(&self) -> &[BigInt] {
        &self.cyclotomic
    }

    pub fn zero(&self) -> CycloInt {
        CycloInt {
            m: self.m,
            c: vec![BigInt::zero(); self.phi],
        }
    }

    pub fn one(&self) -> CycloInt {
        self.from_int(BigInt::one())
    }

    pub fn from_int(&self, v: BigInt) -> CycloInt {
        let mut c = vec![BigInt::zero(); self.phi];
        c[0] = v;
        CycloInt { m: self.m, c }
    }

    /// zeta^e for any integer e (reduced mod m).
    pub fn zeta_pow(&self, e: i64) -> CycloInt {
        let e = e.rem_euclid(self.m as i64) as usize;
        CycloInt {
            m: self.m,
            c: self.zeta[e].clone(),
        }
    }

    /// Root of unity of order n | m: zeta_n^e as zeta^{(m/n) e}.
    pub fn root_of_order(&self, n: u64, e: i64) -> Result<CycloInt> {
        if n == 0 || self.m % n != 0 {
            return Err(Error::OrderNotDividing { n, group: self.m });
        }
        let step = (self.m / n) as i64;
        Ok(self.zeta_pow(e.rem_euclid(n as i64) * step))
    }

    /// Sum of bucket[e] * zeta^e over e in 0..m. This is how character sums
    /// are aggregated: one integer bucket per exponent, one reduction at the
    /// end.
    pub fn from_bucket(&self, bucket: &[i64]) -> CycloInt {
        assert_eq!(bucket.len(), self.m as usize);
        let mut c = vec![BigInt::zero(); self.phi];
        for (e, &b) in bucket.iter().enumerate() {
            if b == 0 {
                continue;
            }
            for (j, z) in self.zeta[e].iter().enumerate() {
                if !z.is_zero() {
                    c[j] += z * b;
                }
            }
        }
        CycloInt { m: self.m, c }
    }

    fn check(&self, a: &CycloInt) -> Result<()> {
        if a.m != self.m {
            return Err(Error::ConductorMismatch(a.m, self.m));
        }
        Ok(())
    }

    pub fn add(&self, a: &CycloInt, b: &CycloInt) -> CycloInt {
        debug_assert!(self.check(a).is_ok() && self.check(b).is_ok());
        let c = a.c.iter().zip(&b.c).map(|(x, y)| x + y).collect();
        CycloInt { m: self.m, c }
    }

    pub fn sub(&self, a: &CycloInt, b: &CycloInt) -> CycloInt {
        debug_assert!(self.check(a).is_ok() && self.check(b).is_ok());
        let c = a.c.iter().zip(&b.c).map(|(x, y)| x - y).collect();
        CycloInt { m: self.m, c }
    }

    pub fn neg(&self, a: &CycloInt) -> CycloInt {
        CycloInt {
            m: self.m,
            c: a.c.iter().map(|x| -x).collect(),
        }
    }

    pub fn mul(&self, a: &CycloInt, b: &CycloInt) -> CycloInt {
        debug_assert!(self.check(a).is_ok() && self.check(b).is_ok());
        let mut conv = vec![BigInt::zero(); 2 * self.phi - 1];
        for (i, x) in a.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.c.iter().enumerate() {
                if !y.is_zero() {
                    conv[i + j] += x * y;
                }
            }
        }
        let mut c: Vec<BigInt> = conv[..self.phi].to_vec();
        for d in self.phi..conv.len() {
            if conv[d].is_zero() {
                continue;
            }
            let row = &self.red[d - self.phi];
            for (j, r) in row.iter().enumerate() {
                if !r.is_zero() {
                    c[j] += r * &conv[d];
                }
            }
        }
        CycloInt { m: self.m, c }
    }

    pub fn mul_int(&self, a: &CycloInt, k: &BigInt) -> CycloInt {
        CycloInt {
            m: self.m,
            c: a.c.iter().map(|x| x * k).collect(),
        }
    }

    pub fn pow(&self, a: &CycloInt, mut e: u64) -> CycloInt {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    /// Galois action sigma_k: zeta -> zeta^k, for gcd(k, m) = 1.
    pub fn galois(&self, a: &CycloInt, k: u64) -> Result<CycloInt> {
        if arith::gcd(k % self.m, self.m) != 1 {
            return Err(Error::BadEmbedding { k, m: self.m });
        }
        let mut c = vec![BigInt::zero(); self.phi];
        for (j, x) in a.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let e = arith::mul_mod(j as u64, k, self.m) as usize;
            for (i, z) in self.zeta[e].iter().enumerate() {
                if !z.is_zero() {
                    c[i] += z * x;
                }
            }
        }
        Ok(CycloInt { m: self.m, c })
    }

    pub fn conj(&self, a: &CycloInt) -> CycloInt {
        self.galois(a, self.m - 1).expect("m-1 is a unit mod m")
    }

    /// |a| in the embedding zeta -> exp(2 pi i k / m), gcd(k, m) = 1.
    /// Computed in double-double arithmetic; absolute error is bounded by
    /// (sum of |coefficients|) * 2^-100 plus one final rounding.
    pub fn complex_abs(&self, a: &CycloInt, k: u64) -> Result<f64> {
        if arith::gcd(k % self.m, self.m) != 1 {
            return Err(Error::BadEmbedding { k, m: self.m });
        }
        let mut re = Dd::default();
        let mut im = Dd::default();
        for (j, x) in a.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let e = arith::mul_mod(j as u64, k % self.m, self.m);
            let (c, s) = unit_root(e, self.m);
            let v = Dd::from_bigint(x);
            re = re.add(v.mul(c));
            im = im.add(v.mul(s));
        }
        Ok(re.mul(re).add(im.mul(im)).sqrt().to_f64())
    }
}

/// Multiply a reduced coefficient vector by zeta, folding any overflow of the
/// top power through red0 = zeta^phi.
fn shift_reduce(v: &[BigInt], red0: &[BigInt]) -> Vec<BigInt> {
    let phi = v.len();
    let mut out = vec![BigInt::zero(); phi];
    for j in 0..phi - 1 {
        out[j + 1] = v[j].clone();
    }
    if !v[phi - 1].is_zero() {
        for (j, r) in red0.iter().enumerate() {
            if !r.is_zero() {
                out[j] += r * &v[phi - 1];
            }
        }
    }
    out
}

/// n-th cyclotomic polynomial, dense coefficients, constant term first.
pub fn cyclotomic_polynomial(n: u64) -> Vec<BigInt> {
    // Phi_n = (x^n - 1) / prod_{d | n, d < n} Phi_d, by exact division.
    let mut num = vec![BigInt::zero(); n as usize + 1];
    num[0] = -BigInt::one();
    num[n as usize] = BigInt::one();
    let mut quot = num;
    for d in 1..n {
        if n % d == 0 {
            quot = poly_div_exact(&quot, &cyclotomic_polynomial(d));
        }
    }
    quot
}

fn poly_div_exact(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = num.len() - 1;
    let dd = den.len() - 1;
    assert!(den[dd].is_one(), "divisor must be monic");
    let mut rem = num.to_vec();
    let mut quot = vec![BigInt::zero(); dn - dd + 1];
    for k in (0..=dn - dd).rev() {
        let c = rem[k + dd].clone();
        if c.is_zero() {
            continue;
        }
        quot[k] = c.clone();
        for (i, d) in den.iter().enumerate() {
            if !d.is_zero() {
                rem[k + i] -= d * &c;
            }
        }
    }
    assert!(rem.iter().all(|x| x.is_zero()), "division must be exact");
    quot
}

/// p-adic valuation of a nonzero rational: exponent of p in the numerator
/// minus the exponent in the denominator.
pub fn padic_ord_rational(a: &BigRational, p: u64) -> Result<i64> {
    if a.is_zero() {
        return Err(Error::ZeroValue);
    }
    let pb = BigInt::from(p);
    let count = |v: &BigInt| -> i64 {
        let mut v = v.abs();
        let mut n = 0;
        while (&v % &pb).is_zero() {
            v /= &pb;
            n += 1;
        }
        n
    };
    Ok(count(a.numer()) - count(a.denom()))
}

/// True iff the rational lies in Z[1/p] (denominator a power of p).
pub fn in_z_inv_p(a: &BigRational, p: u64) -> bool {
    let pb = BigInt::from(p);
    let mut d = a.denom().abs();
    while (&d % &pb).is_zero() {
        d /= &pb;
    }
    d.is_one()
}
