//! Extended-precision arithmetic for test oracles.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Fixed-point real with `FRAC_BITS` fractional bits (about 96 digits).
#[derive(Clone, Debug)]
pub struct BigFixed(BigInt);

pub const FRAC_BITS: u32 = 320;

/// `v = m · 2^e` with integer `m`, exactly.
fn split(v: f64) -> (BigInt, i32) {
    assert!(v.is_finite());
    if v == 0.0 {
        return (BigInt::zero(), 0);
    }
    let bits = v.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i32;
    let frac = bits & ((1u64 << 52) - 1);
    let (m, e) = if exp == 0 { (frac, -1074) } else { (frac | (1u64 << 52), exp - 1075) };
    let m = BigInt::from(m);
    (if v < 0.0 { -m } else { m }, e)
}

impl BigFixed {
    pub fn zero() -> Self {
        BigFixed(BigInt::zero())
    }

    pub fn one() -> Self {
        BigFixed(BigInt::one() << FRAC_BITS)
    }

    pub fn from_int(v: i64) -> Self {
        BigFixed(BigInt::from(v) << FRAC_BITS)
    }

    pub fn from_f64(v: f64) -> Self {
        let (m, e) = split(v);
        let shift = e + FRAC_BITS as i32;
        BigFixed(if shift >= 0 { m << shift as usize } else { m >> (-shift) as usize })
    }

    pub fn add(&self, o: &Self) -> Self {
        BigFixed(&self.0 + &o.0)
    }

    pub fn mul_int(&self, k: i64) -> Self {
        BigFixed(&self.0 * k)
    }

    pub fn div_int(&self, k: i64) -> Self {
        BigFixed(&self.0 / k)
    }

    /// Product with a double, exact up to the final truncation.
    pub fn mul_f64(&self, v: f64) -> Self {
        let (m, e) = split(v);
        let p = &self.0 * m;
        BigFixed(if e >= 0 { p << e as usize } else { p >> (-e) as usize })
    }

    /// Quotient by a double, exact up to the final truncation.
    pub fn div_f64(&self, v: f64) -> Self {
        let (m, e) = split(v);
        assert!(!m.is_zero(), "division by zero");
        // x / (m 2^e) = (x 2^{-e}) / m, with guard bits for the truncation
        let guard = 64usize;
        let x = &self.0 << guard;
        let x = if e >= 0 { x >> e as usize } else { x << (-e) as usize };
        BigFixed((x / m) >> guard)
    }

    pub fn is_negligible(&self) -> bool {
        self.0.abs() < BigInt::from(1u32) << 8
    }

    pub fn to_f64(&self) -> f64 {
        // keep 64 leading bits, then scale
        let bits = self.0.bits() as i64;
        let shift = (bits - 64).max(0);
        let top = (&self.0 >> shift as usize).to_f64().unwrap();
        top * 2f64.powi(shift as i32 - FRAC_BITS as i32)
    }
}

/// Σ t_k with t_0 = 1 and t_{k+1} = t_k · num(k) / den(k), integer ratios.
pub fn big_series(num: impl Fn(i64) -> i64, den: impl Fn(i64) -> i64) -> f64 {
    let mut term = BigFixed::one();
    let mut sum = BigFixed::zero();
    for k in 0..5000 {
        sum = sum.add(&term);
        term = term.mul_int(num(k)).div_int(den(k));
        if k > 10 && term.is_negligible() {
            return sum.to_f64();
        }
    }
    panic!("oracle series did not terminate");
}

/// ₚF_q(a; b; z) summed term by term in fixed point. Parameters and z are
/// taken as the exact dyadic values of the given doubles.
pub fn big_pfq(a: &[f64], b: &[f64], z: f64) -> f64 {
    let mut term = BigFixed::one();
    let mut sum = BigFixed::zero();
    for k in 0..20000 {
        sum = sum.add(&term);
        let kf = k as f64;
        for &ai in a {
            term = term.mul_f64(ai + kf);
        }
        term = term.mul_f64(z);
        for &bi in b {
            term = term.div_f64(bi + kf);
        }
        term = term.div_f64(kf + 1.0);
        if k > 10 && term.is_negligible() {
            return sum.to_f64();
        }
    }
    panic!("oracle series did not terminate");
}
