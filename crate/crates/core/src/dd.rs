//! Double-double arithmetic: a value is the unevaluated sum hi + lo of two
//! f64 with |lo| <= ulp(hi)/2, giving roughly 106 mantissa bits. Used for the
//! complex-embedding magnitude checks, which need more than f64 precision on
//! large coefficients but nothing near arbitrary precision.
//!
//! Error model: add/sub/mul are accurate to ~2^-104 relative; the sin/cos
//! kernels below are accurate to ~2^-100 absolute on |t| <= pi/4 after exact
//! rational quadrant reduction. Conversions from big integers keep the top
//! 106 bits. A magnitude |sum c_j zeta^j| therefore carries an absolute error
//! bounded by (sum |c_j|) * 2^-100, far below the 1e-9 tolerances used by
//! callers.

use num_bigint::BigInt;
use num_traits::{FromPrimitive, ToPrimitive};

#[derive(Copy, Clone, Debug, Default)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const TWO_PI: Dd = Dd {
    hi: std::f64::consts::TAU,
    lo: 2.4492935982947064e-16,
};

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    Dd { hi: s, lo: err }
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd { hi: s, lo: b - (s - a) }
}

fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    let err = a.mul_add(b, -p);
    Dd { hi: p, lo: err }
}

impl Dd {
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn from_bigint(x: &BigInt) -> Dd {
        let hi = x.to_f64().unwrap_or(f64::INFINITY);
        if !hi.is_finite() {
            return Dd { hi, lo: 0.0 };
        }
        // hi is integral (to_f64 of an integer), so this conversion is exact
        // and the residual supplies the next 53 bits.
        let hi_big = BigInt::from_f64(hi).expect("finite integral f64");
        let lo = (x - hi_big).to_f64().unwrap_or(0.0);
        quick_two_sum(hi, lo)
    }

    pub fn add(self, o: Dd) -> Dd {
        let s = two_sum(self.hi, o.hi);
        let lo = s.lo + self.lo + o.lo;
        quick_two_sum(s.hi, lo)
    }

    pub fn sub(self, o: Dd) -> Dd {
        self.add(Dd { hi: -o.hi, lo: -o.lo })
    }

    pub fn mul(self, o: Dd) -> Dd {
        let p = two_prod(self.hi, o.hi);
        let lo = p.lo + self.hi * o.lo + self.lo * o.hi;
        quick_two_sum(p.hi, lo)
    }

    pub fn div_u64(self, d: u64) -> Dd {
        let q1 = self.hi / d as f64;
        let r = self.sub(Dd::from_f64(q1).mul(Dd::from_f64(d as f64)));
        let q2 = (r.hi + r.lo) / d as f64;
        quick_two_sum(q1, q2)
    }

    pub fn sqrt(self) -> Dd {
        if self.hi <= 0.0 {
            return Dd::from_f64(self.hi.max(0.0).sqrt());
        }
        // One Newton step on top of the f64 seed doubles the precision.
        let s = Dd::from_f64(self.hi.sqrt());
        let t = self.sub(s.mul(s)).div_u64(1);
        let corr = Dd {
            hi: t.hi / (2.0 * s.hi),
            lo: t.lo / (2.0 * s.hi),
        };
        s.add(corr)
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// (cos, sin) of 2*pi*a/m with exact rational quadrant reduction, valid for
/// 0 <= a < m.
pub fn unit_root(a: u64, m: u64) -> (Dd, Dd) {
    debug_assert!(a < m);
    // Quadrant index k = round(4a/m); the residual angle is 2*pi*(4a-km)/(4m)
    // with |4a - km| <= m/2, i.e. |t| <= pi/4, and the reduction is exact.
    let k = ((8 * a as i128 + m as i128) / (2 * m as i128)) as i64;
    let num = 4 * a as i64 - k * m as i64;
    let t = TWO_PI.mul(Dd::from_f64(num as f64)).div_u64(4 * m);
    let (c, s) = sin_cos_kernel(t);
    match k.rem_euclid(4) {
        0 => (c, s),
        1 => (Dd { hi: -s.hi, lo: -s.lo }, c),
        2 => (Dd { hi: -c.hi, lo: -c.lo }, Dd { hi: -s.hi, lo: -s.lo }),
        _ => (s, Dd { hi: -c.hi, lo: -c.lo }),
    }
}

/// Taylor kernels on |t| <= pi/4; terms below 1e-35 are dropped.
fn sin_cos_kernel(t: Dd) -> (Dd, Dd) {
    let t2 = t.mul(t);
    let mut sin = t;
    let mut term = t;
    let mut n = 1u64;
    loop {
        term = term.mul(t2).div_u64((n + 1) * (n + 2));
        term = Dd { hi: -term.hi, lo: -term.lo };
        sin = sin.add(term);
        n += 2;
        if term.hi.abs() < 1e-35 {
            break;
        }
    }
    let mut cos = Dd::from_f64(1.0);
    let mut cterm = Dd::from_f64(1.0);
    let mut k = 0u64;
    loop {
        cterm = cterm.mul(t2).div_u64((k + 1) * (k + 2));
        cterm = Dd { hi: -cterm.hi, lo: -cterm.lo };
        cos = cos.add(cterm);
        k += 2;
        if cterm.hi.abs() < 1e-35 {
            break;
        }
    }
    (cos, sin)
}
