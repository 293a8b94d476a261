//! Point-count oracle: the Taylor coefficients c_n of -log L(E,T), computed
//! by enumerating y^2 = x^3 + t^q - t over F_{r^n} with no character-sum
//! machinery.
//!
//! Everything here is deliberately independent of the main tower: fields are
//! rebuilt from scratch as F_p[y]/(h) with h found by trial division, and
//! c_n = sum over t, x of lambda(x^3 + t^q - t) is assembled from
//!   s(c) = sum over x of lambda(x^3 + c),
//! computed for every c at once as an exact convolution over the additive
//! group (Z/p)^k. The convolution runs in the group ring Z[x]/(x^p - 1)
//! using only shifts and adds, so the only divisions are the final exact
//! ones by p^k, each verified. The t-loop collapses to the image of the
//! F_p-linear map t -> t^q - t with fiber multiplicity p^{gcd(nu n, f)}.

use crate::error::{Error, Result};
use crate::orbits::TwistParams;
use num_bigint::BigInt;

#[derive(Clone, Copy, Debug)]
pub struct OracleCaps {
    /// Element-count cap for the convolution path.
    pub transform: u64,
    /// Element-count cap for the quadratic naive path.
    pub naive: u64,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps {
            transform: 10_000_000,
            naive: 100_000,
        }
    }
}

/// F_{p^k} as F_p[y]/(h), elements packed base p into u64 codes. Index
/// arithmetic is digitwise, so codes double as coordinates in (Z/p)^k.
struct OracleField {
    p: u64,
    k: u32,
    size: u64,
    /// Monic modulus, length k+1, constant term first.
    modulus: Vec<u64>,
}

impl OracleField {
    fn build(p: u64, k: u32, cap: u64) -> Result<OracleField> {
        let size = crate::arith::checked_pow(p, k)
            .filter(|&s| s <= cap)
            .ok_or(Error::CapExceeded {
                what: "oracle field size",
                needed: (p as u128).saturating_pow(k),
                cap: cap as u128,
            })?;
        let modulus = smallest_irreducible(p, k);
        Ok(OracleField { p, k, size, modulus })
    }

    fn unpack(&self, mut code: u64) -> Vec<u64> {
        let mut v = vec![0u64; self.k as usize];
        for d in v.iter_mut() {
            *d = code % self.p;
            code /= self.p;
        }
        v
    }

    fn pack(&self, v: &[u64]) -> u64 {
        let mut code = 0u64;
        for &d in v.iter().rev() {
            code = code * self.p + d % self.p;
        }
        code
    }

    fn add_codes(&self, a: u64, b: u64) -> u64 {
        let (va, vb) = (self.unpack(a), self.unpack(b));
        let sum: Vec<u64> = va.iter().zip(&vb).map(|(x, y)| (x + y) % self.p).collect();
        self.pack(&sum)
    }

    fn mul_codes(&self, a: u64, b: u64) -> u64 {
        let (va, vb) = (self.unpack(a), self.unpack(b));
        let mut prod = vec![0u64; 2 * self.k as usize - 1];
        for (i, &x) in va.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in vb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        self.reduce(&mut prod);
        self.pack(&prod[..self.k as usize])
    }

    /// Reduce in place by the monic modulus.
    fn reduce(&self, poly: &mut Vec<u64>) {
        let k = self.k as usize;
        while poly.len() > k {
            let top = poly.len() - 1;
            let c = poly[top];
            if c != 0 {
                for i in 0..k {
                    let sub = c * self.modulus[i] % self.p;
                    poly[top - k + i] = (poly[top - k + i] + self.p * self.p - sub) % self.p;
                }
            }
            poly.pop();
        }
        while poly.len() < k {
            poly.push(0);
        }
    }

    /// Matrix of the p-power Frobenius in the power basis; column i is the
    /// digit vector of y^{i p} mod h.
    fn frobenius_matrix(&self) -> Vec<Vec<u64>> {
        let y_p = {
            // y^p by repeated squaring over exponent p.
            let mut acc = if self.k == 1 { vec![1u64] } else { vec![0, 1] };
            let mut result = vec![1u64];
            let mut e = self.p;
            while e > 0 {
                if e & 1 == 1 {
                    result = self.poly_mul(&result, &acc);
                }
                acc = self.poly_mul(&acc, &acc);
                e >>= 1;
            }
            result
        };
        let mut cols = Vec::with_capacity(self.k as usize);
        let mut cur = vec![1u64]; // (y^p)^0
        for _ in 0..self.k {
            let mut col = cur.clone();
            col.resize(self.k as usize, 0);
            cols.push(col);
            cur = self.poly_mul(&cur, &y_p);
        }
        cols
    }

    fn poly_mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut prod = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        self.reduce(&mut prod);
        prod
    }

    /// Apply an F_p-linear map given by columns to a digit vector.
    fn apply(&self, cols: &[Vec<u64>], v: &[u64]) -> Vec<u64> {
        let mut out = vec![0u64; self.k as usize];
        for (i, &c) in v.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (j, o) in out.iter_mut().enumerate() {
                *o = (*o + c * cols[i][j]) % self.p;
            }
        }
        out
    }

    /// lambda table: 0 at 0, +1 at nonzero squares, -1 elsewhere.
    fn quadratic_table(&self) -> Vec<i64> {
        let mut table = vec![-1i64; self.size as usize];
        table[0] = 0;
        for z in 1..self.size {
            table[self.mul_codes(z, z) as usize] = 1;
        }
        table
    }

    /// N_3 table: number of cube roots of each element.
    fn cube_count_table(&self) -> Vec<i64> {
        let mut table = vec![0i64; self.size as usize];
        for x in 0..self.size {
            let c = self.mul_codes(self.mul_codes(x, x), x);
            table[c as usize] += 1;
        }
        table
    }

    /// Digit vectors of t^q - t on the power basis, column-reduced to a
    /// basis of the image.
    fn artin_schreier_image_basis(&self, f: u32) -> Vec<Vec<u64>> {
        let frob = self.frobenius_matrix();
        // q-power map = p-Frobenius iterated f times.
        let mut cols: Vec<Vec<u64>> = (0..self.k as usize)
            .map(|i| {
                let mut e = vec![0u64; self.k as usize];
                e[i] = 1;
                e
            })
            .collect();
        for _ in 0..f {
            cols = cols.iter().map(|c| self.apply(&frob, c)).collect();
        }
        // Subtract the identity, then Gaussian-eliminate the columns.
        for (i, col) in cols.iter_mut().enumerate() {
            col[i] = (col[i] + self.p - 1) % self.p;
        }
        let mut basis: Vec<Vec<u64>> = Vec::new();
        let mut pivots: Vec<usize> = Vec::new();
        for mut col in cols {
            for (b, &piv) in basis.iter().zip(&pivots) {
                let c = col[piv];
                if c != 0 {
                    let scale = c * crate::arith::inv_mod(b[piv], self.p) % self.p;
                    for (x, y) in col.iter_mut().zip(b) {
                        *x = (*x + self.p * self.p - scale * y % self.p) % self.p;
                    }
                }
            }
            if let Some(piv) = col.iter().position(|&c| c != 0) {
                pivots.push(piv);
                basis.push(col);
            }
        }
        basis
    }
}

/// Smallest monic irreducible of degree k over F_p in packed-code order of
/// the low coefficients, found by trial division: any reducible h has a
/// monic factor of degree at most k/2.
fn smallest_irreducible(p: u64, k: u32) -> Vec<u64> {
    if k == 1 {
        return vec![0, 1];
    }
    let low_count = p.pow(k);
    'candidate: for low in 0..low_count {
        let mut h = Vec::with_capacity(k as usize + 1);
        let mut code = low;
        for _ in 0..k {
            h.push(code % p);
            code /= p;
        }
        h.push(1);
        if h[0] == 0 {
            continue; // divisible by y
        }
        for d in 1..=k / 2 {
            for dlow in 0..p.pow(d) {
                let mut div = Vec::with_capacity(d as usize + 1);
                let mut c = dlow;
                for _ in 0..d {
                    div.push(c % p);
                    c /= p;
                }
                div.push(1);
                if poly_divides(p, &div, &h) {
                    continue 'candidate;
                }
            }
        }
        return h;
    }
    unreachable!("irreducibles of every degree exist");
}

fn poly_divides(p: u64, div: &[u64], h: &[u64]) -> bool {
    let mut rem = h.to_vec();
    let d = div.len() - 1;
    while rem.len() > d {
        let top = rem.len() - 1;
        let c = rem[top];
        if c != 0 {
            for i in 0..d {
                let sub = c * div[i] % p;
                rem[top - d + i] = (rem[top - d + i] + p * p - sub) % p;
            }
        }
        rem.pop();
    }
    rem.iter().all(|&c| c == 0)
}

/// Exact convolution h = f * g over (Z/p)^k via group-ring transforms.
/// Returns p^k * h, with the division left to the caller so it can be
/// checked.
fn convolve(p: u64, k: u32, f: &[i64], g: &[i64]) -> Result<Vec<i64>> {
    // Coefficient growth bound p^{3k+1} must stay inside i64.
    let weight = (p as u128).checked_pow(3 * k + 1);
    if weight.is_none() || weight.unwrap() > i64::MAX as u128 {
        return Err(Error::CapExceeded {
            what: "oracle transform weight p^(3k+1)",
            needed: (p as u128).saturating_pow(3 * k + 1),
            cap: i64::MAX as u128,
        });
    }
    let size = f.len();
    let pu = p as usize;
    let lift = |v: &[i64]| {
        let mut a = vec![0i64; size * pu];
        for (i, &x) in v.iter().enumerate() {
            a[i * pu] = x;
        }
        a
    };
    let mut fa = lift(f);
    let mut ga = lift(g);
    for axis in 0..k {
        transform_axis(p, &mut fa, axis, false);
        transform_axis(p, &mut ga, axis, false);
    }
    // Pointwise product in Z[x]/(x^p - 1).
    let mut prod = vec![0i64; size * pu];
    let mut cell = vec![0i64; pu];
    for i in 0..size {
        cell.iter_mut().for_each(|c| *c = 0);
        let (fc, gc) = (&fa[i * pu..(i + 1) * pu], &ga[i * pu..(i + 1) * pu]);
        for (a, &x) in fc.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (b, &y) in gc.iter().enumerate() {
                cell[(a + b) % pu] += x * y;
            }
        }
        prod[i * pu..(i + 1) * pu].copy_from_slice(&cell);
    }
    for axis in 0..k {
        transform_axis(p, &mut prod, axis, true);
    }
    // Each cell is p^k h(c) + mu (1 + x + ... + x^{p-1}): constant tail,
    // exact division.
    let pk = (p as i64).pow(k);
    let mut out = vec![0i64; size];
    for i in 0..size {
        let cell = &prod[i * pu..(i + 1) * pu];
        let mu = cell[1 % pu];
        if cell[1..].iter().any(|&c| c != mu) {
            return Err(Error::IdentityFailure(
                "convolution cell is not constant off the unit".into(),
            ));
        }
        let num = cell[0] - mu;
        if num % pk != 0 {
            return Err(Error::IdentityFailure(
                "convolution cell not divisible by p^k".into(),
            ));
        }
        out[i] = num / pk;
    }
    Ok(out)
}

/// One axis of the transform: cell (.., w, ..) becomes
/// sum over t of x^{+-w t} cell(.., t, ..).
fn transform_axis(p: u64, a: &mut [i64], axis: u32, inverse: bool) {
    let pu = p as usize;
    let size = a.len() / pu;
    let stride = (p as usize).pow(axis);
    let mut gathered = vec![0i64; pu * pu];
    let mut outcell = vec![0i64; pu * pu];
    let mut base = 0usize;
    // Iterate all indices whose digit on `axis` is zero.
    let block = stride * pu;
    while base < size {
        for off in 0..stride {
            let start = base + off;
            for t in 0..pu {
                let idx = (start + t * stride) * pu;
                gathered[t * pu..(t + 1) * pu].copy_from_slice(&a[idx..idx + pu]);
            }
            outcell.iter_mut().for_each(|c| *c = 0);
            for w in 0..pu {
                let cell = &mut outcell[w * pu..(w + 1) * pu];
                for t in 0..pu {
                    let shift = if inverse { (pu - w * t % pu) % pu } else { w * t % pu };
                    let src = &gathered[t * pu..(t + 1) * pu];
                    for j in 0..pu {
                        cell[(j + shift) % pu] += src[j];
                    }
                }
            }
            for w in 0..pu {
                let idx = (start + w * stride) * pu;
                a[idx..idx + pu].copy_from_slice(&outcell[w * pu..(w + 1) * pu]);
            }
        }
        base += block;
    }
}

/// s(c) = sum over x of lambda(x^3 + c) for every c at once, plus the field
/// it was computed in.
fn s_table(field: &OracleField) -> Result<Vec<i64>> {
    let lambda = field.quadratic_table();
    let n3 = field.cube_count_table();
    // s = (N_3 reflected) * lambda as an additive convolution.
    let mut n3_neg = vec![0i64; field.size as usize];
    for u in 0..field.size {
        let neg: Vec<u64> = field
            .unpack(u)
            .iter()
            .map(|&d| (field.p - d) % field.p)
            .collect();
        n3_neg[field.pack(&neg) as usize] = n3[u as usize];
    }
    convolve(field.p, field.k, &n3_neg, &lambda)
}

/// Taylor coefficients c_1..c_{n_max} of -log L via the convolution path.
pub fn taylor_coeffs(
    params: &TwistParams,
    n_max: u32,
    caps: &OracleCaps,
) -> Result<Vec<BigInt>> {
    (1..=n_max)
        .map(|n| taylor_coeff(params, n, caps.transform))
        .collect()
}

fn taylor_coeff(params: &TwistParams, n: u32, cap: u64) -> Result<BigInt> {
    let k = params.nu * n;
    let field = OracleField::build(params.p, k, cap)?;
    let s = s_table(&field)?;
    // Sanity anchor: s over x of lambda(x^3) at c = 0 via direct count.
    debug_assert_eq!(
        s[0],
        {
            let lambda = field.quadratic_table();
            let mut direct = 0i64;
            for x in 0..field.size {
                direct += lambda[field.mul_codes(field.mul_codes(x, x), x) as usize];
            }
            direct
        }
    );
    let basis = field.artin_schreier_image_basis(params.f);
    let g = crate::arith::gcd(k as u64, params.f as u64) as u32;
    if basis.len() != (k - g) as usize {
        return Err(Error::IdentityFailure(format!(
            "t^q - t image rank {} differs from k - gcd(k, f) = {}",
            basis.len(),
            k - g
        )));
    }
    // Enumerate the image subgroup by a mixed-radix counter over the basis.
    let mut total: i64 = 0;
    let mut counter = vec![0u64; basis.len()];
    let mut cur = 0u64;
    let basis_codes: Vec<u64> = basis.iter().map(|b| field.pack(b)).collect();
    loop {
        total += s[cur as usize];
        // Increment: add e_i once per digit rollover.
        let mut pos = 0;
        loop {
            if pos == counter.len() {
                let fiber = BigInt::from(params.p).pow(g);
                return Ok(fiber * BigInt::from(total));
            }
            counter[pos] += 1;
            cur = field.add_codes(cur, basis_codes[pos]);
            if counter[pos] < field.p {
                break;
            }
            counter[pos] = 0;
            pos += 1;
        }
    }
}

/// The same coefficient by the quadratic double loop; retained as a second
/// oracle at tiny sizes.
pub fn taylor_coeff_naive(params: &TwistParams, n: u32, cap: u64) -> Result<BigInt> {
    let k = params.nu * n;
    let field = OracleField::build(params.p, k, cap)?;
    let lambda = field.quadratic_table();
    let frob = field.frobenius_matrix();
    let mut cubes = vec![0u64; field.size as usize];
    for x in 0..field.size {
        cubes[x as usize] = field.mul_codes(field.mul_codes(x, x), x);
    }
    let mut total: i64 = 0;
    for t in 0..field.size {
        let mut tq = field.unpack(t);
        for _ in 0..params.f {
            tq = field.apply(&frob, &tq);
        }
        let tv = field.unpack(t);
        let diff: Vec<u64> = tq
            .iter()
            .zip(&tv)
            .map(|(a, b)| (a + field.p - b) % field.p)
            .collect();
        let c = field.pack(&diff);
        for x in 0..field.size {
            total += lambda[field.add_codes(cubes[x as usize], c) as usize];
        }
    }
    Ok(BigInt::from(total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::CycloRing;
    use crate::ff::{FfConfig, Tower};
    use crate::lfunction::{l_poly_orbit, newton_power_sums};

    #[test]
    fn field_construction() {
        let f = OracleField::build(5, 2, 10_000).unwrap();
        assert_eq!(f.size, 25);
        // Trial division found an actual irreducible: no roots in F_p.
        for z in 0..5u64 {
            let mut val = 0u64;
            for &c in f.modulus.iter().rev() {
                val = (val * z + c) % 5;
            }
            assert_ne!(val, 0, "root {z}");
        }
        // Multiplication: the unit group has order size - 1.
        let mut pow = 1u64;
        let mut order = 0;
        loop {
            pow = f.mul_codes(pow, 7); // some element
            order += 1;
            if pow == 1 {
                break;
            }
        }
        assert_eq!(24 % order, 0);
    }

    #[test]
    fn tables_are_consistent() {
        let f = OracleField::build(7, 2, 10_000).unwrap();
        let lambda = f.quadratic_table();
        // Half the units are squares.
        assert_eq!(lambda.iter().filter(|&&v| v == 1).count(), 24);
        assert_eq!(lambda.iter().filter(|&&v| v == -1).count(), 24);
        let n3 = f.cube_count_table();
        assert_eq!(n3.iter().sum::<i64>(), 49);
        // 3 | 48: cube fibers over nonzero cubes have size 3.
        assert_eq!(n3[0], 1);
        assert!(n3[1..].iter().all(|&c| c == 0 || c == 3));
    }

    #[test]
    fn convolution_matches_direct() {
        let f = OracleField::build(5, 3, 10_000).unwrap();
        let s = s_table(&f).unwrap();
        let lambda = f.quadratic_table();
        for c in [0u64, 1, 17, 88, 124] {
            let mut direct = 0i64;
            for x in 0..f.size {
                let cube = f.mul_codes(f.mul_codes(x, x), x);
                direct += lambda[f.add_codes(cube, c) as usize];
            }
            assert_eq!(s[c as usize], direct, "c = {c}");
        }
    }

    #[test]
    fn frozen_prefix_q5() {
        let params = TwistParams::new(5, 1, 1).unwrap();
        let c = taylor_coeffs(&params, 4, &OracleCaps::default()).unwrap();
        assert_eq!(c[0], BigInt::from(0));
        assert_eq!(c[1], BigInt::from(-200));
        // Matches Newton power sums of the orbit-built polynomial.
        let tower = Tower::build(5, &params.required_degrees(), FfConfig::default()).unwrap();
        let ring = CycloRing::new(5).unwrap();
        let build = l_poly_orbit(&params, &tower, &ring, 1, crate::char_sums::ENUM_CAP).unwrap();
        assert_eq!(c, newton_power_sums(&build.l, 4));
    }

    #[test]
    fn naive_agrees_with_transform() {
        for (p, nu, f, n_max) in [(5u64, 1, 1, 2u32), (7, 1, 1, 2), (5, 1, 2, 2)] {
            let params = TwistParams::new(p, nu, f).unwrap();
            let caps = OracleCaps::default();
            let fast = taylor_coeffs(&params, n_max, &caps).unwrap();
            for n in 1..=n_max {
                let slow = taylor_coeff_naive(&params, n, caps.naive).unwrap();
                assert_eq!(fast[n as usize - 1], slow, "({p},{nu},{f}) n={n}");
            }
        }
    }

    #[test]
    fn oracle_matches_l_small_grid() {
        for (p, nu, f, n_max) in [(7u64, 1, 1, 3u32), (11, 1, 1, 2), (5, 2, 1, 2)] {
            let params = TwistParams::new(p, nu, f).unwrap();
            let c = taylor_coeffs(&params, n_max, &OracleCaps::default()).unwrap();
            let tower =
                Tower::build(p, &params.required_degrees(), FfConfig::default()).unwrap();
            let ring = CycloRing::new(p).unwrap();
            let build =
                l_poly_orbit(&params, &tower, &ring, 1, crate::char_sums::ENUM_CAP).unwrap();
            assert_eq!(c, newton_power_sums(&build.l, n_max as usize), "({p},{nu},{f})");
        }
    }

    #[test]
    fn caps_respected() {
        let params = TwistParams::new(5, 1, 1).unwrap();
        let caps = OracleCaps {
            transform: 100,
            naive: 10,
        };
        assert!(matches!(
            taylor_coeffs(&params, 4, &caps),
            Err(Error::CapExceeded { .. })
        ));
        assert!(matches!(
            taylor_coeff_naive(&params, 2, 10),
            Err(Error::CapExceeded { .. })
        ));
    }
}
