//! Small deterministic integer helpers shared across modules: primality,
//! factorization, modular arithmetic, multiplicative orders. Everything here
//! is exact and u64-scale; big-integer work lives with its callers.

/// Deterministic Miller-Rabin, valid for all u64.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &sp in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == sp {
            return true;
        }
        if n % sp == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // This base set is a proven deterministic witness set for n < 2^64.
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a % n, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Prime factorization of n as (prime, exponent) pairs in ascending order.
/// Pollard rho with Brent cycling for the part trial division misses.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    let mut n = n;
    for d in [2u64, 3, 5] {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
    }
    let mut d = 7u64;
    let inc = [4u64, 2, 4, 2, 4, 6, 2, 6];
    let mut i = 0;
    while d <= 1 << 21 && d * d <= n {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += inc[i % 8];
        i += 1;
    }
    if n > 1 {
        let mut stack = vec![n];
        let mut rest: Vec<u64> = Vec::new();
        while let Some(v) = stack.pop() {
            if is_prime_u64(v) {
                rest.push(v);
            } else {
                let f = pollard_rho(v);
                stack.push(f);
                stack.push(v / f);
            }
        }
        rest.sort_unstable();
        for v in rest {
            match out.iter_mut().find(|(q, _)| *q == v) {
                Some((_, e)) => *e += 1,
                None => out.push((v, 1)),
            }
        }
    }
    out.sort_unstable();
    out
}

fn pollard_rho(n: u64) -> u64 {
    // n is odd, composite, with no factor <= 2^21 here.
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
        c += 1;
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// Inverse of a mod m (gcd(a, m) must be 1).
pub fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1, "inv_mod of non-unit");
    t.rem_euclid(m as i128) as u64
}

/// Multiplicative order of a mod m (gcd(a, m) = 1).
pub fn ord_mod(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 1;
    }
    debug_assert_eq!(gcd(a % m, m), 1);
    // Order divides the Carmichael function; walking divisors of phi is
    // overkill at our sizes, so reduce the exponent prime by prime.
    let phi = euler_phi(m);
    let mut ord = phi;
    for (q, _) in factorize(phi) {
        while ord % q == 0 && pow_mod(a, ord / q, m) == 1 {
            ord /= q;
        }
    }
    ord
}

pub fn euler_phi(n: u64) -> u64 {
    let mut out = n;
    for (q, _) in factorize(n) {
        out = out / q * (q - 1);
    }
    out
}

/// p^e with overflow check.
pub fn checked_pow(p: u64, e: u32) -> Option<u64> {
    let mut acc = 1u64;
    for _ in 0..e {
        acc = acc.checked_mul(p)?;
    }
    Some(acc)
}
