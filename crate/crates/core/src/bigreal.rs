//! Arbitrary-precision real numbers for the evaluation layer.
//!
//! Thin wrapper around a binary big-float carrying its working precision in
//! bits. Mixed-precision operations use the minimum of the operand
//! precisions. exp and pi are built here from scratch (argument-reduced
//! Taylor series and the Gauss-Legendre AGM) so the reference value of pi is
//! independent of everything the series engine computes.

use astro_float::{BigFloat, RoundingMode, Sign};
use num_bigint::{BigInt, Sign as IntSign};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

const RM: RoundingMode = RoundingMode::ToEven;

/// An arbitrary-precision real value tagged with its precision in bits.
#[derive(Clone, Debug)]
pub struct BigReal {
    x: BigFloat,
    prec: usize,
}

impl BigReal {
    pub fn zero(prec: usize) -> Self {
        BigReal { x: BigFloat::from_i64(0, prec), prec }
    }

    pub fn from_i64(v: i64, prec: usize) -> Self {
        BigReal { x: BigFloat::from_i64(v, prec), prec }
    }

    pub fn from_bigint(v: &BigInt, prec: usize) -> Self {
        let (sign, words) = v.to_u64_digits();
        if words.is_empty() {
            return Self::zero(prec);
        }
        // value = (words as a binary fraction) * 2^e, so an integer needs
        // e equal to the full word-array bit width
        let e = (words.len() * 64) as astro_float::Exponent;
        let s = if sign == IntSign::Minus { Sign::Neg } else { Sign::Pos };
        let mut x = BigFloat::from_words(&words, s, e);
        x.set_precision(prec.max(words.len() * 64), RM).expect("precision");
        BigReal { x, prec }
    }

    pub fn from_ratio(v: &BigRational, prec: usize) -> Self {
        if v.is_zero() {
            return Self::zero(prec);
        }
        let num = Self::from_bigint(v.numer(), prec + 64);
        let den = Self::from_bigint(v.denom(), prec + 64);
        BigReal { x: num.x.div(&den.x, prec, RM), prec }
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.x.is_negative()
    }

    fn join(&self, rhs: &BigReal) -> usize {
        self.prec.min(rhs.prec)
    }

    pub fn add(&self, rhs: &BigReal) -> BigReal {
        let p = self.join(rhs);
        BigReal { x: self.x.add(&rhs.x, p, RM), prec: p }
    }

    pub fn sub(&self, rhs: &BigReal) -> BigReal {
        let p = self.join(rhs);
        BigReal { x: self.x.sub(&rhs.x, p, RM), prec: p }
    }

    pub fn mul(&self, rhs: &BigReal) -> BigReal {
        let p = self.join(rhs);
        BigReal { x: self.x.mul(&rhs.x, p, RM), prec: p }
    }

    pub fn div(&self, rhs: &BigReal) -> BigReal {
        let p = self.join(rhs);
        BigReal { x: self.x.div(&rhs.x, p, RM), prec: p }
    }

    pub fn neg(&self) -> BigReal {
        BigReal { x: self.x.neg(), prec: self.prec }
    }

    pub fn abs(&self) -> BigReal {
        if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> BigReal {
        BigReal { x: self.x.reciprocal(self.prec, RM), prec: self.prec }
    }

    /// Multiply by 2^k by adjusting the exponent; exact.
    pub fn ldexp(&self, k: i64) -> BigReal {
        if self.x.is_zero() {
            return self.clone();
        }
        let mut x = self.x.clone();
        let e = x.exponent().expect("finite value");
        x.set_exponent(e + k as astro_float::Exponent);
        BigReal { x, prec: self.prec }
    }

    pub fn mul_i64(&self, k: i64) -> BigReal {
        BigReal { x: self.x.mul(&BigFloat::from_i64(k, 64), self.prec, RM), prec: self.prec }
    }

    pub fn div_i64(&self, k: i64) -> BigReal {
        BigReal { x: self.x.div(&BigFloat::from_i64(k, 64), self.prec, RM), prec: self.prec }
    }

    pub fn mul_ratio(&self, k: &BigRational) -> BigReal {
        self.mul(&BigReal::from_ratio(k, self.prec))
    }

    pub fn powi(&self, mut k: u64) -> BigReal {
        let mut r = BigReal::from_i64(1, self.prec);
        let mut b = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                r = r.mul(&b);
            }
            k >>= 1;
            if k > 0 {
                b = b.mul(&b);
            }
        }
        r
    }

    pub fn sqrt(&self) -> BigReal {
        BigReal { x: self.x.sqrt(self.prec, RM), prec: self.prec }
    }

    /// Positive n-th root by Newton iteration seeded from a double.
    pub fn nth_root(&self, n: u32) -> BigReal {
        assert!(n >= 1);
        assert!(!self.is_negative(), "nth_root of a negative value");
        if n == 1 {
            return self.clone();
        }
        if n == 2 {
            return self.sqrt();
        }
        if self.is_zero() {
            return self.clone();
        }
        let p = self.prec + 64;
        let x = BigReal { x: self.x.clone(), prec: p };
        // seed: split exponent so the f64 root stays in range
        let (man, exp) = self.to_f64_parts();
        let n_i = n as i64;
        let q = exp.div_euclid(n_i);
        let r = exp.rem_euclid(n_i);
        let seed = (man * 2f64.powi(r as i32)).powf(1.0 / n as f64);
        let mut y = BigReal::from_f64(seed, p).ldexp(q);
        // y <- ((n-1) y + x / y^(n-1)) / n
        let iters = 64 - (p as u64).leading_zeros() + 2;
        for _ in 0..iters {
            let yn1 = y.powi(n as u64 - 1);
            y = y.mul_i64(n_i - 1).add(&x.div(&yn1)).div_i64(n_i);
        }
        BigReal { x: round_to(&y.x, self.prec), prec: self.prec }
    }

    pub fn from_f64(v: f64, prec: usize) -> Self {
        BigReal { x: BigFloat::from_f64(v, prec), prec }
    }

    /// (mantissa in [0.5, 1), binary exponent) as doubles; (0, 0) for zero.
    pub fn to_f64_parts(&self) -> (f64, i64) {
        match self.x.as_raw_parts() {
            Some((words, _, sign, e, _)) if !words.is_empty() => {
                let top = words[words.len() - 1];
                let mut man = top as f64 / 2f64.powi(64);
                if words.len() > 1 {
                    man += words[words.len() - 2] as f64 / 2f64.powi(128);
                }
                if sign == Sign::Neg {
                    man = -man;
                }
                (man, e as i64)
            }
            _ => (0.0, 0),
        }
    }

    pub fn to_f64(&self) -> f64 {
        let (man, exp) = self.to_f64_parts();
        man * 2f64.powi(exp.clamp(-1000, 1000) as i32)
    }

    /// log10 of |self| as a double; None for zero.
    pub fn log10_abs(&self) -> Option<f64> {
        if self.is_zero() {
            return None;
        }
        let (man, exp) = self.to_f64_parts();
        Some(man.abs().log10() + exp as f64 * std::f64::consts::LOG10_2)
    }

    pub fn cmp_abs(&self, rhs: &BigReal) -> std::cmp::Ordering {
        match self.x.abs_cmp(&rhs.x) {
            Some(c) if c < 0 => std::cmp::Ordering::Less,
            Some(c) if c > 0 => std::cmp::Ordering::Greater,
            _ => std::cmp::Ordering::Equal,
        }
    }

    pub fn cmp_val(&self, rhs: &BigReal) -> std::cmp::Ordering {
        match self.x.cmp(&rhs.x) {
            Some(c) if c < 0 => std::cmp::Ordering::Less,
            Some(c) if c > 0 => std::cmp::Ordering::Greater,
            _ => std::cmp::Ordering::Equal,
        }
    }

    /// |self| < 2^k
    pub fn abs_below_pow2(&self, k: i64) -> bool {
        match self.x.exponent() {
            Some(e) => self.x.is_zero() || (e as i64) <= k,
            None => false,
        }
    }

    /// Exact conversion to a rational (mantissa times a power of two).
    pub fn to_ratio(&self) -> BigRational {
        match self.x.as_raw_parts() {
            Some((words, _, sign, e, _)) if !words.is_empty() => {
                let mut m = BigInt::new(IntSign::Plus, words_to_u32(words));
                if sign == Sign::Neg {
                    m = -m;
                }
                let shift = e as i64 - (words.len() as i64) * 64;
                let two = BigInt::from(2);
                if shift >= 0 {
                    BigRational::from_integer(m * two.pow(shift as u32))
                } else {
                    BigRational::new(m, two.pow((-shift) as u32))
                }
            }
            _ => BigRational::zero(),
        }
    }

    /// e^self by argument reduction and Taylor summation.
    pub fn exp(&self) -> BigReal {
        if self.is_zero() {
            return BigReal::from_i64(1, self.prec);
        }
        if self.is_negative() {
            return self.neg().exp().recip();
        }
        let (_, e) = self.to_f64_parts();
        // reduce so the argument is below 1/4
        let k = (e + 2).max(0) as u64;
        let wp = self.prec + 2 * k as usize + 32;
        let r = BigReal { x: self.x.clone(), prec: wp }.ldexp(-(k as i64));
        let mut sum = BigReal::from_i64(1, wp);
        let mut term = BigReal::from_i64(1, wp);
        let mut n: i64 = 1;
        loop {
            term = term.mul(&r).div_i64(n);
            sum = sum.add(&term);
            if term.abs_below_pow2(-(wp as i64)) {
                break;
            }
            n += 1;
        }
        for _ in 0..k {
            sum = sum.mul(&sum);
        }
        BigReal { x: round_to(&sum.x, self.prec), prec: self.prec }
    }

    /// pi by the Gauss-Legendre (AGM) iteration, quadratically convergent.
    pub fn pi(prec: usize) -> BigReal {
        let wp = prec + 64;
        let mut a = BigReal::from_i64(1, wp);
        let mut b = BigReal::from_i64(2, wp).sqrt().recip();
        let mut t = BigReal::from_i64(1, wp).ldexp(-2);
        let mut p: i64 = 0;
        // quadratic convergence: run one extra step after a and b agree to
        // half the working precision
        let mut final_pass = false;
        loop {
            let a_next = a.add(&b).ldexp(-1);
            let c = a.sub(&a_next);
            t = t.sub(&c.mul(&c).ldexp(p));
            b = a.mul(&b).sqrt();
            a = a_next;
            p += 1;
            if final_pass {
                break;
            }
            if a.sub(&b).abs_below_pow2(-((wp / 2 + 8) as i64)) {
                final_pass = true;
            }
        }
        let s = a.add(&b);
        let pi = s.mul(&s).ldexp(-2).div(&t);
        BigReal { x: round_to(&pi.x, prec), prec }
    }

    /// Decimal string with `digits` significant digits, scientific form.
    pub fn to_decimal(&self, digits: usize) -> String {
        let (sign, ds, exp10) = self.decimal_parts(digits);
        if ds.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        if sign {
            s.push('-');
        }
        s.push(ds.as_bytes()[0] as char);
        s.push('.');
        s.push_str(&ds[1..]);
        s.push_str(&format!("e{}", exp10));
        s
    }

    /// (negative?, digit string of length `digits`, decimal exponent of the
    /// leading digit). Exact integer arithmetic throughout.
    pub fn decimal_parts(&self, digits: usize) -> (bool, String, i64) {
        if self.is_zero() {
            return (false, String::new(), 0);
        }
        let r = self.to_ratio();
        let neg = r.is_negative();
        let mut v = r.abs();
        // decimal exponent of the leading digit
        let mut e10 = self.log10_abs().expect("nonzero").floor() as i64;
        let ten = BigRational::from_integer(BigInt::from(10));
        // scale so that v in [10^(digits-1), 10^digits)
        let shift = digits as i64 - 1 - e10;
        v = scale_pow10(&v, shift);
        let lo = BigInt::from(10).pow(digits as u32 - 1);
        let hi = &lo * 10;
        let mut n = v.round().to_integer();
        while n < lo {
            n *= 10;
            v = &v * &ten;
            e10 -= 1;
            n = v.round().to_integer();
        }
        while n >= hi {
            v = &v / &ten;
            e10 += 1;
            n = v.round().to_integer();
        }
        (neg, n.to_string(), e10)
    }
}

fn round_to(x: &BigFloat, prec: usize) -> BigFloat {
    let mut y = x.clone();
    y.set_precision(prec, RM).expect("precision");
    y
}

fn scale_pow10(v: &BigRational, k: i64) -> BigRational {
    let p = BigInt::from(10).pow(k.unsigned_abs() as u32);
    if k >= 0 {
        v * BigRational::from_integer(p)
    } else {
        v / BigRational::from_integer(p)
    }
}

fn words_to_u32(words: &[u64]) -> Vec<u32> {
    let mut out = Vec::with_capacity(words.len() * 2);
    for &w in words {
        out.push((w & 0xffff_ffff) as u32);
        out.push((w >> 32) as u32);
    }
    out
}

/// Number of matching leading significant decimal digits of two values
/// (relative agreement). Equal values report the precision limit.
pub fn matched_digits(a: &BigReal, b: &BigReal) -> usize {
    let d = a.sub(b);
    if d.is_zero() {
        let p = a.prec().min(b.prec());
        return (p as f64 * std::f64::consts::LOG10_2) as usize;
    }
    let scale = if b.is_zero() { a } else { b };
    let (Some(ld), Some(ls)) = (d.log10_abs(), scale.log10_abs()) else {
        return 0;
    };
    let rel = ld - ls;
    if rel >= 0.0 {
        0
    } else {
        (-rel).floor() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;
    use std::str::FromStr;

    #[test]
    fn bigint_roundtrip() {
        for s in ["3", "-3", "123456789012345678901234567890", "1"] {
            let n = BigInt::from_str(s).unwrap();
            let r = BigReal::from_bigint(&n, 256);
            assert_eq!(r.to_ratio(), BigRational::from_integer(n));
        }
    }

    #[test]
    fn ratio_roundtrip_and_decimal() {
        let v = BigRational::new(BigInt::from(1), BigInt::from(3));
        let r = BigReal::from_ratio(&v, 256);
        let (neg, ds, e10) = r.decimal_parts(20);
        assert!(!neg);
        assert_eq!(e10, -1);
        assert_eq!(ds, "33333333333333333333");
    }

    #[test]
    fn sqrt_and_root() {
        let two = BigReal::from_i64(2, 256);
        let s = two.sqrt();
        let back = s.mul(&s);
        assert!(matched_digits(&back, &two) > 70);
        let x = BigReal::from_i64(5, 320);
        let r = x.nth_root(7);
        assert!(matched_digits(&r.powi(7), &x) > 85);
    }

    #[test]
    fn exp_known_value() {
        // e^1 = 2.718281828459045235360287...
        let e = BigReal::from_i64(1, 256).exp();
        let want = BigReal::from_ratio(
            &BigRational::new(
                BigInt::from_str("271828182845904523536028747135266249775724709369995").unwrap(),
                BigInt::from_str("100000000000000000000000000000000000000000000000000").unwrap(),
            ),
            256,
        );
        assert!(matched_digits(&e, &want) >= 50);
        // exp(0) = 1
        assert!(BigReal::zero(128).exp().sub(&BigReal::from_i64(1, 128)).is_zero());
    }

    #[test]
    fn pi_agm_digits() {
        let pi = BigReal::pi(256);
        let want = BigReal::from_ratio(
            &BigRational::new(
                BigInt::from_str("314159265358979323846264338327950288419716939937510582097494459230781640628620899862803482534211706798214808651328230664709384").unwrap(),
                BigInt::from_str("100000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000000").unwrap(),
            ),
            512,
        );
        assert!(matched_digits(&pi, &want) >= 75);
        // consistency across precisions
        let lo = BigReal::pi(256);
        let hi = BigReal::pi(512);
        assert!(matched_digits(&lo, &hi) >= 75);
    }

    #[test]
    fn ldexp_exact() {
        let x = BigReal::from_i64(3, 128).ldexp(-2);
        assert_eq!(x.to_ratio(), BigRational::new(BigInt::from(3), BigInt::from(4)));
        assert!(BigRational::one() < BigRational::from_integer(BigInt::from(2)));
    }
}
