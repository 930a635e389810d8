//! Base modular functions as exact q-series: theta functions, Eisenstein P,
//! the cubic theta a(q), the quartic A(q), the modular parameters alpha,
//! alpha-dagger and alpha-perp, the Hauptmoduls H and H-dagger, and xi.
//!
//! Theta series come from their defining sums (sparse and exact); the eta
//! product representations are kept as test oracles.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::qlattice::{
    euler_product, eta_quotient, EtaQuotientSpec, QExp, QSeries, SeriesError, LATTICE,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ThetaKind {
    Theta2,
    Theta3,
    Theta4,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AlphaVariant {
    Classical,
    Cubic,
    Quartic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HauptFamily {
    Classical,
    Cubic,
}

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum ModFunError {
    #[error("no Hauptmodul at level {level} for the {family:?} family")]
    UnsupportedLevel { family: HauptFamily, level: u32 },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// theta_2, theta_3 or theta_4 of q^m from the defining bilateral sum.
pub fn theta_series(kind: ThetaKind, m: u32, order: QExp) -> QSeries {
    let m = m as u64;
    let mut terms: Vec<(QExp, BigRational)> = Vec::new();
    let two = BigRational::from_integer(BigInt::from(2));
    match kind {
        ThetaKind::Theta3 | ThetaKind::Theta4 => {
            terms.push((QExp(0), BigRational::one()));
            let mut k: u64 = 1;
            loop {
                let e = m * k * k * LATTICE;
                if e >= order.0 {
                    break;
                }
                let c = if matches!(kind, ThetaKind::Theta4) && k % 2 == 1 {
                    -two.clone()
                } else {
                    two.clone()
                };
                terms.push((QExp(e), c));
                k += 1;
            }
        }
        ThetaKind::Theta2 => {
            // exponents m (k+1/2)^2 = m (2k+1)^2 / 4, i.e. 6 m (2k+1)^2 lattice units
            let mut k: u64 = 0;
            loop {
                let e = 6 * m * (2 * k + 1) * (2 * k + 1);
                if e >= order.0 {
                    break;
                }
                terms.push((QExp(e), two.clone()));
                k += 1;
            }
        }
    }
    QSeries::from_terms(terms, order)
}

/// Eisenstein P(q^m) = 1 - 24 sum_{k>=1} sigma_1(k) q^{m k}.
pub fn eisenstein_p(m: u32, order: QExp) -> QSeries {
    let m = m as u64;
    let kmax = (order.0 / (m * LATTICE)) as usize;
    let mut sigma = vec![0u64; kmax + 1];
    for d in 1..=kmax {
        for mult in (d..=kmax).step_by(d) {
            sigma[mult] += d as u64;
        }
    }
    let mut terms: Vec<(QExp, BigRational)> = vec![(QExp(0), BigRational::one())];
    for (k, &s) in sigma.iter().enumerate().skip(1) {
        let e = m * k as u64 * LATTICE;
        if e < order.0 {
            terms.push((QExp(e), BigRational::from_integer(BigInt::from(-24i64 * s as i64))));
        }
    }
    QSeries::from_terms(terms, order)
}

/// Representation counts of n by x^2 + xy + y^2 for n <= bound.
pub(crate) fn hex_lattice_counts(bound: usize) -> Vec<u64> {
    let mut counts = vec![0u64; bound + 1];
    let r = ((4 * bound) as f64 / 3.0).sqrt() as i64 + 2;
    for x in -r..=r {
        for y in -r..=r {
            let n = x * x + x * y + y * y;
            if n >= 0 && (n as usize) <= bound {
                counts[n as usize] += 1;
            }
        }
    }
    counts
}

/// The cubic theta function a(q^m) = sum over Z^2 of q^{m(x^2+xy+y^2)},
/// by direct lattice enumeration.
pub fn cubic_a_series(m: u32, order: QExp) -> QSeries {
    let m = m as u64;
    let bound = (order.0 / (m * LATTICE)) as usize;
    let counts = hex_lattice_counts(bound);
    let terms = counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(n, &c)| {
        (QExp(m * n as u64 * LATTICE), BigRational::from_integer(BigInt::from(c)))
    });
    QSeries::from_terms(terms, order)
}

/// The quartic base function A(q^m), from the linear eta-quotient form
/// A(q^2) = (eta^8(tau) + 32 eta^8(4 tau)) / eta^4(2 tau).
pub fn quartic_a_series(m: u32, order: QExp) -> QSeries {
    let doubled = QExp(2 * order.0);
    let e1 = eta_quotient(&EtaQuotientSpec::new(vec![(2, 8)]), doubled).expect("eta^8");
    let e4 = eta_quotient(&EtaQuotientSpec::new(vec![(8, 8)]), doubled).expect("eta(4t)^8");
    let den = eta_quotient(&EtaQuotientSpec::new(vec![(4, 4)]), doubled).expect("eta(2t)^4");
    let num = e1.add(&e4.scale_int(32));
    let a = num.div(&den).expect("unit denominator").substitute_root(2).truncated(order);
    if m == 1 {
        a
    } else {
        a.compose_power(m, Some(order))
    }
}

/// The modular parameter of the requested base theory, as a series in the
/// caller's q (the paper defines the cubic and quartic parameters in the
/// variable q^2; this re-indexes).
pub fn alpha_series(variant: AlphaVariant, m: u32, order: QExp) -> QSeries {
    let a = match variant {
        AlphaVariant::Classical => {
            let t2 = theta_series(ThetaKind::Theta2, 1, order);
            let t3 = theta_series(ThetaKind::Theta3, 1, order);
            t2.powi(4)
                .and_then(|n| t3.powi(4).and_then(|d| n.div(&d)))
                .expect("theta3^4 is a unit")
        }
        AlphaVariant::Cubic => {
            // alpha(q^2) = 27 q^2 E(q^6)^12 / (E(q^2)^12 + 27 q^2 E(q^6)^12)
            let doubled = QExp(2 * order.0);
            let e2 = euler_product(2 * LATTICE, doubled);
            let e6 = euler_product(6 * LATTICE, doubled);
            let num = e6
                .powi(12)
                .expect("power")
                .shifted(2 * LATTICE)
                .scale_int(27);
            let den = e2.powi(12).expect("power").add(&num);
            num.div(&den).expect("unit denominator").substitute_root(2).truncated(order)
        }
        AlphaVariant::Quartic => {
            // alpha(q^2) = 64 q^2 E(q^4)^24 / (E(q^2)^24 + 64 q^2 E(q^4)^24)
            let doubled = QExp(2 * order.0);
            let e2 = euler_product(2 * LATTICE, doubled);
            let e4 = euler_product(4 * LATTICE, doubled);
            let num = e4
                .powi(24)
                .expect("power")
                .shifted(2 * LATTICE)
                .scale_int(64);
            let den = e2.powi(24).expect("power").add(&num);
            num.div(&den).expect("unit denominator").substitute_root(2).truncated(order)
        }
    };
    if m == 1 {
        a
    } else {
        a.compose_power(m, Some(order))
    }
}

/// Eta-quotient Hauptmodul: H_l = (eta(2t) eta(2lt) / (eta(t) eta(lt)))^{24/(l+1)}
/// for the classical family, H-dagger_l = (eta(3t) eta(3lt) / (eta(t) eta(lt)))^{12/(l+1)}
/// for the cubic one. The exponent must be integral.
pub fn hauptmodul_series(
    family: HauptFamily,
    ell: u32,
    order: QExp,
) -> Result<QSeries, ModFunError> {
    let (scale, total) = match family {
        HauptFamily::Classical => (2u32, 24u32),
        HauptFamily::Cubic => (3u32, 12u32),
    };
    if total % (ell + 1) != 0 {
        return Err(ModFunError::UnsupportedLevel { family, level: ell });
    }
    let e = (total / (ell + 1)) as i64;
    let spec = EtaQuotientSpec::new(vec![
        (2 * scale, e),
        (2 * scale * ell, e),
        (2, -e),
        (2 * ell, -e),
    ]);
    Ok(eta_quotient(&spec, order)?)
}

/// xi(q) = -64 eta^24(tau)/eta^24(tau/2) = -64 q E(q^2)^24 / E(q)^24.
pub fn xi_series(order: QExp) -> QSeries {
    let spec = EtaQuotientSpec::new(vec![(2, 24), (1, -24)])
        .with_prefactor(BigRational::from_integer(BigInt::from(-64)));
    eta_quotient(&spec, order).expect("xi expansion")
}

/// E(q^m) = prod_{k>=1} (1 - q^{m k}); integer exponents, used by the
/// registry for the q -> -q product identity.
pub fn euler_series(m: u32, order: QExp) -> QSeries {
    euler_product(m as u64 * LATTICE, order)
}
