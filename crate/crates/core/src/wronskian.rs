//! The six Wronskian-quotient families: f, D, D-hat, C, C-hat and D-perp,
//! plus the generic two-function Wronskian-quotient combinator.
//!
//! Everything here is exact rational series arithmetic; the q-derivatives
//! inside the determinants are the formal operator q d/dq.

use crate::modfun::{
    cubic_a_series, eisenstein_p, quartic_a_series, theta_series, ModFunError, ThetaKind,
};
use crate::qlattice::{QExp, QSeries, SeriesError};

/// Which Wronskian family: f (Ramanujan's normalized P-difference), D (theta3),
/// D-hat (theta4), C (cubic a), C-hat (cubic a at -q), D-perp (quartic A).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum WronskianFamily {
    F,
    D,
    Dhat,
    C,
    Chat,
    Dperp,
}

impl WronskianFamily {
    pub fn tag(&self) -> &'static str {
        match self {
            WronskianFamily::F => "f",
            WronskianFamily::D => "D",
            WronskianFamily::Dhat => "Dhat",
            WronskianFamily::C => "C",
            WronskianFamily::Chat => "Chat",
            WronskianFamily::Dperp => "Dperp",
        }
    }
}

/// (F qd(G) - G qd(F)) / normalizer, exactly.
pub fn wronskian_quotient(
    f: &QSeries,
    g: &QSeries,
    normalizer: &QSeries,
) -> Result<QSeries, SeriesError> {
    let det = f.mul(&g.qderiv()).sub(&g.mul(&f.qderiv()));
    det.div(normalizer)
}

/// The family member at level `ell` as an exact series in q.
///
/// f uses the Eisenstein form (l P(q^{2l}) - P(q^2)) / (theta3^2(q) theta3^2(q^l));
/// the others are Wronskian quotients over their base function. D-hat and
/// C-hat substitute q -> -q in the base before assembly.
pub fn family_series(
    family: WronskianFamily,
    ell: u32,
    order: QExp,
) -> Result<QSeries, ModFunError> {
    assert!(ell >= 2, "family level must be at least 2");
    let s = match family {
        WronskianFamily::F => {
            let num = eisenstein_p(2 * ell, order)
                .scale_int(ell as i64)
                .sub(&eisenstein_p(2, order));
            let t3 = theta_series(ThetaKind::Theta3, 1, order);
            let t3l = theta_series(ThetaKind::Theta3, ell, order);
            num.div(&t3.powi(2)?.mul(&t3l.powi(2)?))?
        }
        WronskianFamily::D | WronskianFamily::Dhat => {
            let kind = if matches!(family, WronskianFamily::D) {
                ThetaKind::Theta3
            } else {
                ThetaKind::Theta4
            };
            let f = theta_series(kind, 1, order);
            let g = theta_series(kind, ell, order);
            let norm = f.powi(3)?.mul(&g.powi(3)?);
            wronskian_quotient(&f, &g, &norm)?
        }
        WronskianFamily::C => {
            let f = cubic_a_series(1, order);
            let g = cubic_a_series(ell, order);
            let norm = f.powi(2)?.mul(&g.powi(2)?);
            wronskian_quotient(&f, &g, &norm)?
        }
        WronskianFamily::Chat => {
            // a(-q) and a(-q^ell) = a((-q)^ell) for odd ell
            assert!(ell % 2 == 1, "C-hat needs odd level");
            let f = cubic_a_series(1, order).negate_q()?;
            let g = f.compose_power(ell, Some(order));
            let norm = f.powi(2)?.mul(&g.powi(2)?);
            wronskian_quotient(&f, &g, &norm)?
        }
        WronskianFamily::Dperp => {
            let f = quartic_a_series(1, order);
            let g = quartic_a_series(ell, order);
            let norm = f.powi(3)?.mul(&g.powi(3)?).nth_root(2)?;
            wronskian_quotient(&f, &g, &norm)?
        }
    };
    Ok(s)
}
