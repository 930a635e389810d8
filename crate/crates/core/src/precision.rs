//! Arbitrary-precision evaluation: nomes, sparse theta and eta sums, series
//! evaluation with tail bounds, closed-form constants, singular moduli,
//! Wronskian values and xi.
//!
//! Wronskian families are evaluated part-wise: the determinant entries and
//! the normalizer are summed separately from exact series whose coefficients
//! are mild (theta sums, lattice counts), and the division happens on values.
//! The quotient q-series of the cubic and quartic families only converge on
//! a small disk (the bases vanish inside |q| < 1), so evaluating them as a
//! single power series at the paper's nomes is not an option; the parts all
//! converge on the whole unit disk. Derivatives are always exact series
//! derivatives, never numerical differentiation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Deserialize;

use crate::bigreal::BigReal;
use crate::modfun::{hex_lattice_counts, ThetaKind};
use crate::qlattice::{QSeries, LATTICE};
use crate::wronskian::WronskianFamily;

/// Guard bits added to every evaluation.
pub const GUARD_BITS: usize = 64;

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum NumError {
    #[error("nome out of range: |q| must be below {limit}")]
    NomeOutOfRange { limit: f64 },
    #[error("series order {order} too low for the requested precision (tail bound fails)")]
    InsufficientOrder { order: u64 },
    #[error("even root of a negative value")]
    NegativeEvenRoot,
    #[error("negative nome requires an integer-exponent series")]
    NegativeNomeFractionalExponent,
    #[error("division by zero in constant evaluation")]
    DivisionByZero,
}

/// Which family of evaluation points, following the nome conventions of the
/// five series theorems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
pub enum PointFamily {
    /// q = e^{-pi sqrt(N)}, inverted: e^{-pi/sqrt(N)}
    Classical,
    /// q = e^{-2 pi sqrt(N/3)}, inverted: e^{-2 pi/sqrt(3N)}
    Cubic,
    /// q = -e^{-pi sqrt(N/3)}, inverted: +e^{-pi/sqrt(3N)}
    CubicAlternating,
    /// q = e^{-pi sqrt(2N)}, inverted: e^{-2 pi/sqrt(2N)}
    Quartic,
}

#[derive(Clone, Debug)]
pub struct EvalPoint {
    pub family: PointFamily,
    pub n: BigRational,
    pub inverted: bool,
}

impl EvalPoint {
    pub fn new(family: PointFamily, n: BigRational, inverted: bool) -> Self {
        assert!(n.is_positive(), "N must be positive");
        EvalPoint { family, n, inverted }
    }

    pub fn classical(n: u32) -> Self {
        Self::new(PointFamily::Classical, BigRational::from_integer(BigInt::from(n)), false)
    }
}

/// The nome of an evaluation point at the requested precision.
pub fn nome(point: &EvalPoint, prec: usize) -> BigReal {
    let wp = prec + GUARD_BITS;
    let pi = BigReal::pi(wp);
    let n = BigReal::from_ratio(&point.n, wp);
    let (arg, negate) = match (point.family, point.inverted) {
        (PointFamily::Classical, false) => (pi.mul(&n.sqrt()), false),
        (PointFamily::Classical, true) => (pi.div(&n.sqrt()), false),
        (PointFamily::Cubic, false) => (pi.ldexp(1).mul(&n.div_i64(3).sqrt()), false),
        (PointFamily::Cubic, true) => (pi.ldexp(1).div(&n.mul_i64(3).sqrt()), false),
        (PointFamily::CubicAlternating, false) => (pi.mul(&n.div_i64(3).sqrt()), true),
        (PointFamily::CubicAlternating, true) => (pi.div(&n.mul_i64(3).sqrt()), false),
        (PointFamily::Quartic, false) => (pi.mul(&n.ldexp(1).sqrt()), false),
        (PointFamily::Quartic, true) => (pi.ldexp(1).div(&n.ldexp(1).sqrt()), false),
    };
    let q = arg.neg().exp();
    if negate {
        q.neg()
    } else {
        q
    }
}

fn check_nome(q: &BigReal, limit: f64) -> Result<(), NumError> {
    let aq = q.abs().to_f64();
    if aq >= limit {
        return Err(NumError::NomeOutOfRange { limit });
    }
    Ok(())
}

/// theta_2/3/4 at a real nome by the sparse defining sum, terminated when
/// the next term falls below the guard threshold.
pub fn theta_value(kind: ThetaKind, q: &BigReal, prec: usize) -> Result<BigReal, NumError> {
    check_nome(q, 1.0)?;
    let wp = prec + GUARD_BITS;
    let thresh = -((wp + 8) as i64);
    match kind {
        ThetaKind::Theta3 | ThetaKind::Theta4 => {
            let mut s = BigReal::from_i64(1, wp);
            let mut k: u64 = 1;
            loop {
                let t = q.powi(k * k).ldexp(1);
                let done = t.abs_below_pow2(thresh);
                if matches!(kind, ThetaKind::Theta4) && k % 2 == 1 {
                    s = s.sub(&t);
                } else {
                    s = s.add(&t);
                }
                if done {
                    break;
                }
                k += 1;
            }
            Ok(s)
        }
        ThetaKind::Theta2 => {
            if q.is_negative() {
                return Err(NumError::NegativeNomeFractionalExponent);
            }
            // 2 q^{1/4} sum q^{k(k+1)}
            let mut s = BigReal::from_i64(1, wp);
            let mut k: u64 = 1;
            loop {
                let t = q.powi(k * (k + 1));
                let done = t.abs_below_pow2(thresh);
                s = s.add(&t);
                if done {
                    break;
                }
                k += 1;
            }
            let wq = q.clone();
            Ok(s.mul(&wq.nth_root(4)).ldexp(1))
        }
    }
}

/// q d/dq of theta at a real nome (exact series derivative, summed sparsely).
pub fn qd_theta_value(kind: ThetaKind, q: &BigReal, prec: usize) -> Result<BigReal, NumError> {
    check_nome(q, 1.0)?;
    let wp = prec + GUARD_BITS;
    let thresh = -((wp + 8) as i64);
    match kind {
        ThetaKind::Theta3 | ThetaKind::Theta4 => {
            let mut s = BigReal::zero(wp);
            let mut k: u64 = 1;
            loop {
                let t = q.powi(k * k).mul_i64((k * k) as i64).ldexp(1);
                let done = t.abs_below_pow2(thresh);
                if matches!(kind, ThetaKind::Theta4) && k % 2 == 1 {
                    s = s.sub(&t);
                } else {
                    s = s.add(&t);
                }
                if done {
                    break;
                }
                k += 1;
            }
            Ok(s)
        }
        ThetaKind::Theta2 => {
            if q.is_negative() {
                return Err(NumError::NegativeNomeFractionalExponent);
            }
            // sum 2 (k+1/2)^2 q^{(k+1/2)^2} = q^{1/4}/2 sum (2k+1)^2 q^{k(k+1)}
            let mut s = BigReal::zero(wp);
            let mut k: u64 = 0;
            loop {
                let m = 2 * k + 1;
                let t = q.powi(k * (k + 1)).mul_i64((m * m) as i64);
                let done = t.abs_below_pow2(thresh);
                s = s.add(&t);
                if done {
                    break;
                }
                k += 1;
            }
            Ok(s.mul(&q.nth_root(4)).ldexp(-1))
        }
    }
}

/// prod_{k>=1} (1 - q^{step k}) at a real nome (q may be negative).
pub fn euler_value(q: &BigReal, step: u64, prec: usize) -> Result<BigReal, NumError> {
    check_nome(q, 1.0)?;
    let wp = prec + GUARD_BITS;
    let thresh = -((wp + 8) as i64);
    let one = BigReal::from_i64(1, wp);
    let mut p = one.clone();
    let qs = q.powi(step);
    let mut t = qs.clone();
    loop {
        let done = t.abs_below_pow2(thresh);
        p = p.mul(&one.sub(&t));
        if done {
            break;
        }
        t = t.mul(&qs);
    }
    Ok(p)
}

/// eta(tau) at q = e^{pi i tau}: q^{1/12} prod (1 - q^{2k}); q must be positive.
pub fn eta_value(q: &BigReal, prec: usize) -> Result<BigReal, NumError> {
    if q.is_negative() {
        return Err(NumError::NegativeNomeFractionalExponent);
    }
    let wp = prec + GUARD_BITS;
    let pref = q.clone().nth_root(12);
    Ok(pref.mul(&euler_value(q, 2, wp)?))
}

/// The cubic theta a(q) at a real nome (negative allowed), summed over the
/// values of x^2+xy+y^2 with a geometric tail bound.
pub fn cubic_a_value(q: &BigReal, prec: usize) -> Result<BigReal, NumError> {
    hex_sum_value(q, prec, false)
}

/// q d/dq of a(q) at a real nome.
pub fn qd_cubic_a_value(q: &BigReal, prec: usize) -> Result<BigReal, NumError> {
    hex_sum_value(q, prec, true)
}

fn hex_sum_value(q: &BigReal, prec: usize, deriv: bool) -> Result<BigReal, NumError> {
    check_nome(q, 0.95)?;
    let wp = prec + GUARD_BITS;
    let aq = q.abs().to_f64();
    // r(n) <= 6(n+1); choose n_max with 6(n+1)^2 |q|^n below the threshold
    let ln_q = -aq.ln();
    let mut n_max = (((wp + 16) as f64) * std::f64::consts::LN_2 / ln_q).ceil() as usize + 8;
    loop {
        let guess = 6.0 * ((n_max + 1) as f64).powi(2) * (-(ln_q) * n_max as f64).exp();
        if guess < 0.5f64.powi((wp + 8) as i32) || n_max > 2_000_000 {
            break;
        }
        n_max += 32;
    }
    let counts = hex_lattice_counts(n_max);
    let mut s = if deriv { BigReal::zero(wp) } else { BigReal::from_i64(1, wp) };
    let mut qn = BigReal::from_i64(1, wp);
    for (n, &c) in counts.iter().enumerate().skip(1) {
        qn = qn.mul(q);
        if c == 0 {
            continue;
        }
        let factor = if deriv { c * n as u64 } else { c };
        s = s.add(&qn.mul_i64(factor as i64));
    }
    Ok(s)
}

/// A(q) = theta3^4 + theta2^4 at a positive nome.
pub fn quartic_a_value(q: &BigReal, prec: usize) -> Result<BigReal, NumError> {
    let wp = prec + GUARD_BITS;
    let t3 = theta_value(ThetaKind::Theta3, q, wp)?;
    let t2 = theta_value(ThetaKind::Theta2, q, wp)?;
    Ok(t3.powi(4).add(&t2.powi(4)))
}

/// q d/dq of A(q).
pub fn qd_quartic_a_value(q: &BigReal, prec: usize) -> Result<BigReal, NumError> {
    let wp = prec + GUARD_BITS;
    let t3 = theta_value(ThetaKind::Theta3, q, wp)?;
    let t2 = theta_value(ThetaKind::Theta2, q, wp)?;
    let d3 = qd_theta_value(ThetaKind::Theta3, q, wp)?;
    let d2 = qd_theta_value(ThetaKind::Theta2, q, wp)?;
    Ok(t3.powi(3).mul(&d3).add(&t2.powi(3).mul(&d2)).mul_i64(4))
}

/// Horner-style evaluation of an exact series at a real nome, with a
/// geometric tail bound. Negative nomes require integer exponents.
pub fn eval_series_at(s: &QSeries, q: &BigReal, prec: usize) -> Result<BigReal, NumError> {
    check_nome(q, 0.9 + 1e-12)?;
    if q.is_negative() && !s.has_integral_exponents() {
        return Err(NumError::NegativeNomeFractionalExponent);
    }
    let wp = prec + GUARD_BITS;
    // tail bound: recent coefficient magnitude growth * |q|^order / (1 - |q|)
    let aq = q.abs().to_f64();
    if aq > 0.0 {
        let mut max_mag: f64 = 1.0;
        for (_, c) in s.iter() {
            let m = ratio_log10_abs(c);
            if m > max_mag {
                max_mag = m;
            }
        }
        let order_q = s.order().0 as f64 / LATTICE as f64;
        let tail_log10 = max_mag + order_q * aq.log10() - (1.0 - aq).log10();
        if tail_log10 > -(prec as f64) * std::f64::consts::LOG10_2 {
            return Err(NumError::InsufficientOrder { order: s.order().0 });
        }
    }
    // q^{1/24} computed once; Horner over descending exponents
    let step = if s.has_integral_exponents() {
        q.clone()
    } else {
        if q.is_negative() {
            return Err(NumError::NegativeNomeFractionalExponent);
        }
        q.clone().nth_root(LATTICE as u32)
    };
    let unit_step = s.has_integral_exponents();
    let terms: Vec<(u64, BigRational)> = s
        .iter()
        .map(|(e, c)| (if unit_step { e.0 / LATTICE } else { e.0 }, c.clone()))
        .collect();
    let mut acc = BigReal::zero(wp);
    let mut prev_exp: Option<u64> = None;
    for &(e, ref c) in terms.iter().rev() {
        if let Some(pe) = prev_exp {
            acc = acc.mul(&step.powi(pe - e));
        }
        acc = acc.add(&BigReal::from_ratio(c, wp));
        prev_exp = Some(e);
    }
    if let Some(pe) = prev_exp {
        if pe > 0 {
            acc = acc.mul(&step.powi(pe));
        }
    }
    Ok(acc)
}

fn ratio_log10_abs(c: &BigRational) -> f64 {
    let n = c.numer().abs().to_f64().unwrap_or(f64::MAX);
    let d = c.denom().abs().to_f64().unwrap_or(f64::MAX);
    if n == 0.0 {
        0.0
    } else {
        n.log10() - d.log10()
    }
}

// ---------------------------------------------------------------------------
// Closed-form constants
// ---------------------------------------------------------------------------

/// A closed-form algebraic constant: rationals combined with field
/// operations, integer powers and positive-branch roots.
#[derive(Clone, Debug, PartialEq)]
pub enum ConstExpr {
    Rational(BigRational),
    Add(Vec<ConstExpr>),
    Sub(Box<ConstExpr>, Box<ConstExpr>),
    Mul(Vec<ConstExpr>),
    Div(Box<ConstExpr>, Box<ConstExpr>),
    Neg(Box<ConstExpr>),
    Pow(Box<ConstExpr>, i64),
    Root(Box<ConstExpr>, u32),
}

impl ConstExpr {
    pub fn int(v: i64) -> Self {
        ConstExpr::Rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        ConstExpr::Rational(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn sqrt(e: ConstExpr) -> Self {
        ConstExpr::Root(Box::new(e), 2)
    }
}

/// Evaluate bottom-up with guard bits; Root takes the positive real branch
/// for even n and the sign-preserving real branch for odd n.
pub fn eval_const_expr(e: &ConstExpr, prec: usize) -> Result<BigReal, NumError> {
    let wp = prec + GUARD_BITS;
    let v = eval_const_inner(e, wp)?;
    Ok(v)
}

fn eval_const_inner(e: &ConstExpr, wp: usize) -> Result<BigReal, NumError> {
    Ok(match e {
        ConstExpr::Rational(r) => BigReal::from_ratio(r, wp),
        ConstExpr::Add(args) => {
            let mut s = BigReal::zero(wp);
            for a in args {
                s = s.add(&eval_const_inner(a, wp)?);
            }
            s
        }
        ConstExpr::Sub(a, b) => eval_const_inner(a, wp)?.sub(&eval_const_inner(b, wp)?),
        ConstExpr::Mul(args) => {
            let mut s = BigReal::from_i64(1, wp);
            for a in args {
                s = s.mul(&eval_const_inner(a, wp)?);
            }
            s
        }
        ConstExpr::Div(a, b) => {
            let d = eval_const_inner(b, wp)?;
            if d.is_zero() {
                return Err(NumError::DivisionByZero);
            }
            eval_const_inner(a, wp)?.div(&d)
        }
        ConstExpr::Neg(a) => eval_const_inner(a, wp)?.neg(),
        ConstExpr::Pow(a, k) => {
            let v = eval_const_inner(a, wp)?;
            if *k >= 0 {
                v.powi(*k as u64)
            } else {
                v.powi((-k) as u64).recip()
            }
        }
        ConstExpr::Root(a, n) => {
            let v = eval_const_inner(a, wp)?;
            if v.is_negative() {
                if n % 2 == 0 {
                    return Err(NumError::NegativeEvenRoot);
                }
                v.neg().nth_root(*n).neg()
            } else {
                v.nth_root(*n)
            }
        }
    })
}

// ---------------------------------------------------------------------------
// Singular moduli, Wronskian values, xi
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModulusVariant {
    Classical,
    Cubic,
    Quartic,
}

/// The modular parameter at the point's nome. Classical goes through sparse
/// theta sums; cubic and quartic go through Euler products (which converge
/// on the whole disk and handle the alternating negative nome).
pub fn singular_modulus(
    variant: ModulusVariant,
    point: &EvalPoint,
    prec: usize,
) -> Result<BigReal, NumError> {
    let wp = prec + GUARD_BITS;
    let q = nome(point, wp);
    singular_modulus_at(variant, &q, prec)
}

/// Same, at an explicit nome value.
pub fn singular_modulus_at(
    variant: ModulusVariant,
    q: &BigReal,
    prec: usize,
) -> Result<BigReal, NumError> {
    let wp = prec + GUARD_BITS;
    match variant {
        ModulusVariant::Classical => {
            let t2 = theta_value(ThetaKind::Theta2, q, wp)?;
            let t3 = theta_value(ThetaKind::Theta3, q, wp)?;
            Ok(t2.div(&t3).powi(4))
        }
        ModulusVariant::Cubic => {
            // 1/alpha(x) = 1 + (1/27) x^{-1} prod((1-x^k)/(1-x^{3k}))^12
            let e1 = euler_value(q, 1, wp)?;
            let e3 = euler_value(q, 3, wp)?;
            let r = e1.div(&e3).powi(12).div(q);
            let twenty7 = BigReal::from_i64(27, wp);
            Ok(twenty7.div(&twenty7.add(&r)))
        }
        ModulusVariant::Quartic => {
            let e1 = euler_value(q, 1, wp)?;
            let e2 = euler_value(q, 2, wp)?;
            let r = e1.div(&e2).powi(24).div(q);
            let sixty4 = BigReal::from_i64(64, wp);
            Ok(sixty4.div(&sixty4.add(&r)))
        }
    }
}

/// The Wronskian family value at the point's nome, assembled part-wise:
/// value = (F qd(G) - G qd(F)) / normalizer with every part summed from its
/// own exact, disk-convergent series.
pub fn wronskian_value(
    family: WronskianFamily,
    ell: u32,
    point: &EvalPoint,
    prec: usize,
) -> Result<BigReal, NumError> {
    let wp = prec + GUARD_BITS;
    let q = nome(point, wp);
    wronskian_value_at(family, ell, &q, prec)
}

/// Same, at an explicit nome value.
pub fn wronskian_value_at(
    family: WronskianFamily,
    ell: u32,
    q: &BigReal,
    prec: usize,
) -> Result<BigReal, NumError> {
    let wp = prec + GUARD_BITS;
    let ell_u = ell as u64;
    let ql = q.powi(ell_u);
    match family {
        WronskianFamily::D | WronskianFamily::Dhat => {
            let kind = if matches!(family, WronskianFamily::D) {
                ThetaKind::Theta3
            } else {
                ThetaKind::Theta4
            };
            let f = theta_value(kind, q, wp)?;
            let g = theta_value(kind, &ql, wp)?;
            let df = qd_theta_value(kind, q, wp)?;
            let dg = qd_theta_value(kind, &ql, wp)?.mul_i64(ell as i64);
            let det = f.mul(&dg).sub(&g.mul(&df));
            Ok(det.div(&f.powi(3).mul(&g.powi(3))))
        }
        WronskianFamily::C => {
            let f = cubic_a_value(q, wp)?;
            let g = cubic_a_value(&ql, wp)?;
            let df = qd_cubic_a_value(q, wp)?;
            let dg = qd_cubic_a_value(&ql, wp)?.mul_i64(ell as i64);
            let det = f.mul(&dg).sub(&g.mul(&df));
            Ok(det.div(&f.powi(2).mul(&g.powi(2))))
        }
        WronskianFamily::Chat => {
            // entries a(-q), a(-q^ell); ell odd so (-q)^ell = -q^ell
            let nq = q.neg();
            let nql = ql.neg();
            let f = cubic_a_value(&nq, wp)?;
            let g = cubic_a_value(&nql, wp)?;
            let df = qd_cubic_a_value(&nq, wp)?;
            let dg = qd_cubic_a_value(&nql, wp)?.mul_i64(ell as i64);
            let det = f.mul(&dg).sub(&g.mul(&df));
            Ok(det.div(&f.powi(2).mul(&g.powi(2))))
        }
        WronskianFamily::Dperp => {
            let f = quartic_a_value(q, wp)?;
            let g = quartic_a_value(&ql, wp)?;
            let df = qd_quartic_a_value(q, wp)?;
            let dg = qd_quartic_a_value(&ql, wp)?.mul_i64(ell as i64);
            let det = f.mul(&dg).sub(&g.mul(&df));
            Ok(det.div(&f.powi(3).mul(&g.powi(3)).sqrt()))
        }
        WronskianFamily::F => {
            let p2 = eisenstein_value(&q.powi(2), wp)?;
            let p2l = eisenstein_value(&q.powi(2 * ell_u), wp)?;
            let t3 = theta_value(ThetaKind::Theta3, q, wp)?;
            let t3l = theta_value(ThetaKind::Theta3, &ql, wp)?;
            let num = p2l.mul_i64(ell as i64).sub(&p2);
            Ok(num.div(&t3.powi(2).mul(&t3l.powi(2))))
        }
    }
}

/// P(q) = 1 - 24 sum k q^k/(1-q^k), summed as 1 - 24 sum sigma_1(n) q^n.
pub fn eisenstein_value(q: &BigReal, prec: usize) -> Result<BigReal, NumError> {
    check_nome(q, 0.95)?;
    let wp = prec + GUARD_BITS;
    let aq = q.abs().to_f64();
    let ln_q = -aq.ln();
    let n_max = ((((wp + 16) as f64) * std::f64::consts::LN_2 / ln_q).ceil() as usize + 8).max(4);
    let mut sigma = vec![0u64; n_max + 1];
    for d in 1..=n_max {
        for mult in (d..=n_max).step_by(d) {
            sigma[mult] += d as u64;
        }
    }
    let mut s = BigReal::from_i64(1, wp);
    let mut qn = BigReal::from_i64(1, wp);
    for (n, &sig) in sigma.iter().enumerate().skip(1) {
        qn = qn.mul(q);
        s = s.sub(&qn.mul_i64(24 * sig as i64));
        let _ = n;
    }
    Ok(s)
}

/// xi_n = xi(e^{-pi sqrt(n)}) with xi(q) = -64 q prod((1-q^{2k})/(1-q^k))^24.
pub fn xi_value(n: &BigRational, prec: usize) -> Result<BigReal, NumError> {
    assert!(n.is_positive());
    let wp = prec + GUARD_BITS;
    let point = EvalPoint::new(PointFamily::Classical, n.clone(), false);
    let q = nome(&point, wp);
    let e1 = euler_value(&q, 1, wp)?;
    let e2 = euler_value(&q, 2, wp)?;
    Ok(e2.div(&e1).powi(24).mul(&q).mul_i64(-64))
}

/// Reference pi: the Gauss-Legendre AGM iteration, independent of every
/// series this crate verifies.
pub fn reference_pi(prec: usize) -> BigReal {
    assert!(prec >= 64);
    BigReal::pi(prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bigreal::matched_digits;

    fn psd(s: &str, prec: usize) -> BigReal {
        // parse short decimal like -0.1234 into a BigReal via rationals
        let neg = s.starts_with('-');
        let t = s.trim_start_matches('-');
        let (int, frac) = t.split_once('.').unwrap_or((t, ""));
        let digits: String = format!("{int}{frac}");
        let num: BigInt = digits.parse().unwrap();
        let den = BigInt::from(10u32).pow(frac.len() as u32);
        let r = BigRational::new(if neg { -num } else { num }, den);
        BigReal::from_ratio(&r, prec)
    }

    #[test]
    fn nome_values() {
        let q = nome(&EvalPoint::classical(1), 256);
        let want = psd("0.04321391826377224977441774", 256);
        assert!(matched_digits(&q, &want) >= 25);
        let q4i = nome(
            &EvalPoint::new(PointFamily::Classical, BigRational::from_integer(BigInt::from(4)), true),
            256,
        );
        let want = psd("0.2078795763507619085469556", 256);
        assert!(matched_digits(&q4i, &want) >= 25);
        // alternating cubic nome is negative
        let qn = nome(
            &EvalPoint::new(PointFamily::CubicAlternating, BigRational::from_integer(BigInt::from(3)), false),
            128,
        );
        assert!(qn.is_negative());
        let want = psd("-0.04321391826377224977441774", 128);
        assert!(matched_digits(&qn, &want) >= 25);
    }

    #[test]
    fn theta3_at_e_minus_pi() {
        let q = nome(&EvalPoint::classical(1), 300);
        let t = theta_value(ThetaKind::Theta3, &q, 300).unwrap();
        let want = psd("1.086434811213308014575316", 300);
        assert!(matched_digits(&t, &want) >= 24);
        // theta3(0) = 1
        let one = theta_value(ThetaKind::Theta3, &BigReal::zero(128), 128).unwrap();
        assert_eq!(matched_digits(&one, &BigReal::from_i64(1, 128)) > 30, true);
    }

    #[test]
    fn theta_transformation_70_digits() {
        // theta3^2(e^{-pi/sqrt3}) / theta3^2(e^{-pi sqrt3}) = sqrt(3)
        let prec = 256;
        let n3 = BigRational::from_integer(BigInt::from(3));
        let qa = nome(&EvalPoint::new(PointFamily::Classical, n3.clone(), true), prec);
        let qb = nome(&EvalPoint::new(PointFamily::Classical, n3, false), prec);
        let ta = theta_value(ThetaKind::Theta3, &qa, prec).unwrap();
        let tb = theta_value(ThetaKind::Theta3, &qb, prec).unwrap();
        let ratio = ta.powi(2).div(&tb.powi(2));
        let want = BigReal::from_i64(3, prec).sqrt();
        assert!(matched_digits(&ratio, &want) >= 70);
    }

    #[test]
    fn eval_series_examples() {
        use crate::modfun::theta_series;
        use crate::qlattice::QExp;
        // low requested precision: the q^5 tail at 0.1 only supports ~4 digits
        let s = theta_series(ThetaKind::Theta3, 1, QExp::from_q(5));
        let q = psd("0.1", 256);
        let v = eval_series_at(&s, &q, 12).unwrap();
        let want = psd("1.2002", 256);
        assert!(matched_digits(&v, &want) >= 4);
        // the same request at high precision must be rejected by the bound
        assert!(matches!(eval_series_at(&s, &q, 256), Err(NumError::InsufficientOrder { .. })));
        // tail bound rejection: order-10 series at 0.9
        let s10 = theta_series(ThetaKind::Theta3, 1, QExp::from_q(10));
        let q9 = psd("0.9", 256);
        assert!(matches!(
            eval_series_at(&s10, &q9, 256),
            Err(NumError::InsufficientOrder { .. })
        ));
        // out of range
        let q95 = psd("0.95", 256);
        assert!(matches!(eval_series_at(&s10, &q95, 64), Err(NumError::NomeOutOfRange { .. })));
    }

    #[test]
    fn const_expr_eval() {
        // 1/2 - sqrt(3)/4 = 0.066987298107780676618138...
        let e = ConstExpr::Sub(
            Box::new(ConstExpr::ratio(1, 2)),
            Box::new(ConstExpr::Div(
                Box::new(ConstExpr::sqrt(ConstExpr::int(3))),
                Box::new(ConstExpr::int(4)),
            )),
        );
        let v = eval_const_expr(&e, 256).unwrap();
        let want = psd("0.0669872981077806766181384", 256);
        assert!(matched_digits(&v, &want) >= 24);
        // sqrt(-1) -> NegativeEvenRoot
        let bad = ConstExpr::sqrt(ConstExpr::int(-1));
        assert!(matches!(eval_const_expr(&bad, 128), Err(NumError::NegativeEvenRoot)));
        // alpha_13 = 1/2 - 3 sqrt(-18 + 5 sqrt 13) = 0.000192641231125739...
        let e13 = ConstExpr::Sub(
            Box::new(ConstExpr::ratio(1, 2)),
            Box::new(ConstExpr::Mul(vec![
                ConstExpr::int(3),
                ConstExpr::sqrt(ConstExpr::Add(vec![
                    ConstExpr::int(-18),
                    ConstExpr::Mul(vec![ConstExpr::int(5), ConstExpr::sqrt(ConstExpr::int(13))]),
                ])),
            ])),
        );
        let v = eval_const_expr(&e13, 256).unwrap();
        let want = psd("0.0001926412311257392755416304", 256);
        assert!(matched_digits(&v, &want) >= 24);
    }

    #[test]
    fn alpha_one_is_half() {
        let a = singular_modulus(ModulusVariant::Classical, &EvalPoint::classical(1), 256).unwrap();
        let want = BigReal::from_i64(1, 256).ldexp(-1);
        assert!(matched_digits(&a, &want) >= 70);
    }

    #[test]
    fn d3_value_is_minus_eighth() {
        let point = EvalPoint::new(
            PointFamily::Classical,
            BigRational::from_integer(BigInt::from(3)),
            true,
        );
        let v = wronskian_value(WronskianFamily::D, 3, &point, 256).unwrap();
        let want = BigReal::from_ratio(&BigRational::new(BigInt::from(-1), BigInt::from(8)), 256);
        assert!(matched_digits(&v, &want) >= 60);
    }

    #[test]
    fn xi_reciprocity() {
        let one = BigReal::from_i64(1, 256);
        let a = xi_value(&BigRational::from_integer(BigInt::from(6)), 256).unwrap();
        let b = xi_value(&BigRational::new(BigInt::from(2), BigInt::from(3)), 256).unwrap();
        assert!(matched_digits(&a.mul(&b), &one) >= 60);
        // xi_2 * xi_2 = 1
        let x2 = xi_value(&BigRational::from_integer(BigInt::from(2)), 256).unwrap();
        assert!(matched_digits(&x2.mul(&x2), &one) >= 60);
    }
}
