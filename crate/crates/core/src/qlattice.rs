//! Exact truncated power series in q on the 1/24 exponent lattice.
//!
//! Every exponent is stored as an integer count of 1/24-ths, which is fine
//! enough for eta(tau/2) (steps of q^{1/24}), eta(tau) (q^{1/12}) and
//! theta2 (q^{1/4}). Coefficients are arbitrary-precision rationals and all
//! arithmetic is exact up to the stated truncation order.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Lattice denominator: exponents count 1/24-ths of a power of q.
pub const LATTICE: u64 = 24;

/// A non-negative exponent on the 1/24 lattice; the value is `num/24`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug, Hash)]
pub struct QExp(pub u64);

impl QExp {
    /// Exponent for an integer power of q.
    pub fn from_q(k: u64) -> Self {
        QExp(k * LATTICE)
    }

    /// The exponent as an exact rational.
    pub fn to_rational(self) -> BigRational {
        BigRational::new(BigInt::from(self.0), BigInt::from(LATTICE))
    }

    pub fn is_integral(self) -> bool {
        self.0 % LATTICE == 0
    }
}

impl fmt::Display for QExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 % LATTICE == 0 {
            write!(f, "{}", self.0 / LATTICE)
        } else {
            let g = num_integer::gcd(self.0, LATTICE);
            write!(f, "{}/{}", self.0 / g, LATTICE / g)
        }
    }
}

#[derive(thiserror::Error, Debug, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("division by a series with no nonzero coefficient below its order")]
    DivisionByZeroSeries,
    #[error("quotient would have a negative exponent (numerator leads at {num_lead}, denominator at {den_lead})")]
    NegativeExponent { num_lead: QExp, den_lead: QExp },
    #[error("leading exponent {lead} not divisible by {n} in series root")]
    NonLatticeRoot { lead: QExp, n: u32 },
    #[error("leading coefficient has no exact rational {n}-th root")]
    IrrationalRootLeadingCoefficient { n: u32 },
    #[error("root of the zero series")]
    RootOfZeroSeries,
    #[error("q -> -q applied to a series with fractional exponent {exp}")]
    FractionalExponentNegation { exp: QExp },
}

/// An exact truncated q-series: sparse map from lattice exponent to rational
/// coefficient, with an exclusive truncation `order`.
///
/// Invariants: every stored exponent is `< order` and no stored coefficient
/// is zero.
#[derive(Clone, PartialEq, Eq)]
pub struct QSeries {
    coeffs: BTreeMap<u64, BigRational>,
    order: u64,
}

impl QSeries {
    pub fn zero(order: QExp) -> Self {
        QSeries { coeffs: BTreeMap::new(), order: order.0 }
    }

    pub fn one(order: QExp) -> Self {
        Self::monomial(BigRational::one(), QExp(0), order)
    }

    /// `coeff * q^(exp/24)`, truncated at `order`.
    pub fn monomial(coeff: BigRational, exp: QExp, order: QExp) -> Self {
        let mut coeffs = BTreeMap::new();
        if !coeff.is_zero() && exp.0 < order.0 {
            coeffs.insert(exp.0, coeff);
        }
        QSeries { coeffs, order: order.0 }
    }

    pub fn from_terms<I>(terms: I, order: QExp) -> Self
    where
        I: IntoIterator<Item = (QExp, BigRational)>,
    {
        let mut coeffs = BTreeMap::new();
        for (e, c) in terms {
            if c.is_zero() || e.0 >= order.0 {
                continue;
            }
            let entry = coeffs.entry(e.0).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                coeffs.remove(&e.0);
            }
        }
        QSeries { coeffs, order: order.0 }
    }

    pub fn order(&self) -> QExp {
        QExp(self.order)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Leading (smallest) exponent, or `order` for the zero series.
    pub fn lead(&self) -> QExp {
        QExp(self.coeffs.keys().next().copied().unwrap_or(self.order))
    }

    pub fn leading_coeff(&self) -> Option<&BigRational> {
        self.coeffs.values().next()
    }

    pub fn coeff(&self, exp: QExp) -> BigRational {
        self.coeffs.get(&exp.0).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Coefficient of the integer power q^k.
    pub fn q_coeff(&self, k: u64) -> BigRational {
        self.coeff(QExp::from_q(k))
    }

    pub fn iter(&self) -> impl Iterator<Item = (QExp, &BigRational)> {
        self.coeffs.iter().map(|(&e, c)| (QExp(e), c))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// True when every stored exponent is an integer power of q.
    pub fn has_integral_exponents(&self) -> bool {
        self.coeffs.keys().all(|e| e % LATTICE == 0)
    }

    pub fn truncated(&self, order: QExp) -> QSeries {
        let order = order.0.min(self.order);
        QSeries {
            coeffs: self.coeffs.range(..order).map(|(&e, c)| (e, c.clone())).collect(),
            order,
        }
    }

    pub fn add(&self, rhs: &QSeries) -> QSeries {
        let order = self.order.min(rhs.order);
        let mut coeffs: BTreeMap<u64, BigRational> =
            self.coeffs.range(..order).map(|(&e, c)| (e, c.clone())).collect();
        for (&e, c) in rhs.coeffs.range(..order) {
            let entry = coeffs.entry(e).or_insert_with(BigRational::zero);
            *entry += c;
            if entry.is_zero() {
                coeffs.remove(&e);
            }
        }
        QSeries { coeffs, order }
    }

    pub fn neg(&self) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e, -c.clone())).collect(),
            order: self.order,
        }
    }

    pub fn sub(&self, rhs: &QSeries) -> QSeries {
        self.add(&rhs.neg())
    }

    pub fn scale(&self, k: &BigRational) -> QSeries {
        if k.is_zero() {
            return QSeries { coeffs: BTreeMap::new(), order: self.order };
        }
        QSeries {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e, c * k)).collect(),
            order: self.order,
        }
    }

    pub fn scale_int(&self, k: i64) -> QSeries {
        self.scale(&BigRational::from_integer(BigInt::from(k)))
    }

    pub fn mul(&self, rhs: &QSeries) -> QSeries {
        if self.is_zero() || rhs.is_zero() {
            let order = (self.order + rhs.lead().0).min(rhs.order + self.lead().0);
            return QSeries { coeffs: BTreeMap::new(), order };
        }
        let order = (self.order + rhs.lead().0).min(rhs.order + self.lead().0);
        let mut coeffs: BTreeMap<u64, BigRational> = BTreeMap::new();
        for (&e1, c1) in &self.coeffs {
            for (&e2, c2) in &rhs.coeffs {
                let e = e1 + e2;
                if e >= order {
                    break; // rhs exponents ascend
                }
                let entry = coeffs.entry(e).or_insert_with(BigRational::zero);
                *entry += c1 * c2;
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        QSeries { coeffs, order }
    }

    /// Multiply by q^(shift/24).
    pub fn shifted(&self, shift: u64) -> QSeries {
        QSeries {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e + shift, c.clone())).collect(),
            order: self.order + shift,
        }
    }

    fn shifted_down(&self, shift: u64) -> QSeries {
        debug_assert!(self.coeffs.keys().all(|&e| e >= shift));
        QSeries {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e - shift, c.clone())).collect(),
            order: self.order - shift,
        }
    }

    /// Inverse of a series with nonzero constant term, by the triangular
    /// recurrence, exact to `order`.
    fn inv_unit(&self, order: u64) -> QSeries {
        let u0 = self.coeffs.get(&0).expect("inv_unit requires a constant term");
        let inv0 = u0.recip();
        let terms: Vec<(u64, &BigRational)> =
            self.coeffs.iter().filter(|(&e, _)| e != 0).map(|(&e, c)| (e, c)).collect();
        let n = order as usize;
        let mut dense: Vec<BigRational> = vec![BigRational::zero(); n];
        if n > 0 {
            dense[0] = inv0.clone();
        }
        for e in 1..order {
            let mut s = BigRational::zero();
            for &(eu, cu) in &terms {
                if eu > e {
                    break;
                }
                let r = &dense[(e - eu) as usize];
                if !r.is_zero() {
                    s += cu * r;
                }
            }
            if !s.is_zero() {
                dense[e as usize] = -&inv0 * s;
            }
        }
        let coeffs = dense
            .into_iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (e as u64, c))
            .collect();
        QSeries { coeffs, order }
    }

    /// Exact division. The divisor's leading monomial is factored out first,
    /// then the unit part is inverted.
    pub fn div(&self, rhs: &QSeries) -> Result<QSeries, SeriesError> {
        if rhs.is_zero() {
            return Err(SeriesError::DivisionByZeroSeries);
        }
        let lb = rhs.lead().0;
        if self.is_zero() {
            let order = self.order.saturating_sub(lb);
            return Ok(QSeries { coeffs: BTreeMap::new(), order });
        }
        let la = self.lead().0;
        if la < lb {
            return Err(SeriesError::NegativeExponent { num_lead: QExp(la), den_lead: QExp(lb) });
        }
        let num = self.shifted_down(lb);
        let den = rhs.shifted_down(lb);
        let order = num.order.min(den.order);
        Ok(num.truncated(QExp(order)).mul(&den.inv_unit(order)))
    }

    /// Integer power by binary exponentiation; negative powers divide one.
    pub fn powi(&self, k: i64) -> Result<QSeries, SeriesError> {
        if k < 0 {
            return QSeries::one(self.order()).div(&self.powi(-k)?);
        }
        let mut r = QSeries::one(self.order());
        let mut b = self.clone();
        let mut k = k as u64;
        while k > 0 {
            if k & 1 == 1 {
                r = r.mul(&b);
            }
            k >>= 1;
            if k > 0 {
                b = b.mul(&b);
            }
        }
        Ok(r)
    }

    /// Positive-branch n-th root. Requires the leading exponent to be
    /// divisible by n and the leading coefficient to be an exact rational
    /// n-th power. Computed by Newton iteration on the inverse root of the
    /// unit part.
    pub fn nth_root(&self, n: u32) -> Result<QSeries, SeriesError> {
        if self.is_zero() {
            return Err(SeriesError::RootOfZeroSeries);
        }
        assert!(n >= 1);
        if n == 1 {
            return Ok(self.clone());
        }
        let lead = self.lead();
        if lead.0 % n as u64 != 0 {
            return Err(SeriesError::NonLatticeRoot { lead, n });
        }
        let c0 = self.leading_coeff().unwrap();
        let r0 = rational_nth_root(c0, n)
            .ok_or(SeriesError::IrrationalRootLeadingCoefficient { n })?;
        let unit = self.shifted_down(lead.0).scale(&c0.recip());
        let order = unit.order;
        // z = unit^{-1/n} by Newton with order doubling: z <- z(1 + (1 - unit z^n)/n)
        let inv_n = BigRational::new(BigInt::one(), BigInt::from(n));
        let mut z = QSeries::one(QExp(1));
        let mut prec: u64 = 1;
        while prec < order {
            prec = (2 * prec).min(order);
            let zt = z.truncated(QExp(prec)).with_order(prec);
            let ut = unit.truncated(QExp(prec));
            let zn = zt.powi(n as i64)?;
            let corr = QSeries::one(QExp(prec)).sub(&ut.mul(&zn)).scale(&inv_n);
            z = zt.mul(&QSeries::one(QExp(prec)).add(&corr));
        }
        // unit^{1/n} = unit * z^{n-1}
        let y = unit.mul(&z.powi(n as i64 - 1)?);
        Ok(y.scale(&r0).shifted(lead.0 / n as u64).truncated(QExp(order - lead.0 + lead.0 / n as u64)))
    }

    fn with_order(mut self, order: u64) -> QSeries {
        self.order = order;
        self.coeffs.retain(|&e, _| e < order);
        self
    }

    /// The operator q d/dq: multiplies the coefficient at exponent e by e.
    pub fn qderiv(&self) -> QSeries {
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(&e, _)| e != 0)
            .map(|(&e, c)| (e, c * QExp(e).to_rational()))
            .collect();
        QSeries { coeffs, order: self.order }
    }

    /// Substitute q -> q^m. The order scales by m, optionally capped.
    pub fn compose_power(&self, m: u32, cap: Option<QExp>) -> QSeries {
        let m = m as u64;
        let order = match cap {
            Some(c) => (self.order.saturating_mul(m)).min(c.0),
            None => self.order * m,
        };
        QSeries {
            coeffs: self
                .coeffs
                .iter()
                .filter(|(&e, _)| e * m < order)
                .map(|(&e, c)| (e * m, c.clone()))
                .collect(),
            order,
        }
    }

    /// Substitute q -> -q. Only defined on integer-exponent series.
    pub fn negate_q(&self) -> Result<QSeries, SeriesError> {
        if let Some((&e, _)) = self.coeffs.iter().find(|(&e, _)| e % LATTICE != 0) {
            return Err(SeriesError::FractionalExponentNegation { exp: QExp(e) });
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|(&e, c)| {
                let k = e / LATTICE;
                (e, if k % 2 == 0 { c.clone() } else { -c.clone() })
            })
            .collect();
        Ok(QSeries { coeffs, order: self.order })
    }

    /// Substitute q^m -> q; every exponent must be divisible by m.
    /// Inverse of `compose_power` on its image.
    pub(crate) fn substitute_root(&self, m: u32) -> QSeries {
        let m = m as u64;
        debug_assert!(self.coeffs.keys().all(|e| e % m == 0));
        QSeries {
            coeffs: self.coeffs.iter().map(|(&e, c)| (e / m, c.clone())).collect(),
            order: self.order.div_ceil(m),
        }
    }
}

impl fmt::Debug for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.display(8))
    }
}

impl QSeries {
    /// Human-readable form showing at most `max_terms` terms.
    pub fn display(&self, max_terms: usize) -> String {
        if self.is_zero() {
            return format!("0 + O(q^{})", QExp(self.order));
        }
        let mut out = String::new();
        for (i, (e, c)) in self.iter().take(max_terms).enumerate() {
            let (sign, mag) = if c.is_negative() { ("- ", -c.clone()) } else { ("+ ", c.clone()) };
            if i == 0 {
                if c.is_negative() {
                    out.push('-');
                }
            } else {
                out.push(' ');
                out.push_str(sign);
            }
            let one = BigRational::one();
            if e.0 == 0 {
                out.push_str(&format!("{mag}"));
            } else if mag == one {
                out.push_str(&format!("q^{e}"));
            } else {
                out.push_str(&format!("{mag}*q^{e}"));
            }
        }
        if self.num_terms() > max_terms {
            out.push_str(" + ...");
        }
        out.push_str(&format!(" + O(q^{})", QExp(self.order)));
        out
    }
}

/// Exact rational n-th root of a positive rational, if one exists.
pub fn rational_nth_root(x: &BigRational, n: u32) -> Option<BigRational> {
    if x.is_negative() || x.is_zero() {
        return None;
    }
    let num = x.numer().nth_root(n);
    let den = x.denom().nth_root(n);
    if &num.pow(n) == x.numer() && &den.pow(n) == x.denom() {
        Some(BigRational::new(num, den))
    } else {
        None
    }
}

/// prod_{k>=1} (1 - q^(step*k/24)), truncated at `order`.
pub fn euler_product(step: u64, order: QExp) -> QSeries {
    // pentagonal number theorem on the scaled lattice:
    // prod (1 - x^k) = sum_j (-1)^j x^(j(3j-1)/2), x = q^(step/24)
    let mut terms: Vec<(QExp, BigRational)> = vec![(QExp(0), BigRational::one())];
    let mut j: i64 = 1;
    loop {
        let mut hit = false;
        for g in [j * (3 * j - 1) / 2, j * (3 * j + 1) / 2] {
            let e = (g as u64) * step;
            if e < order.0 {
                let sign = if j % 2 == 0 { BigRational::one() } else { -BigRational::one() };
                terms.push((QExp(e), sign));
                hit = true;
            }
        }
        if !hit {
            break;
        }
        j += 1;
    }
    QSeries::from_terms(terms, order)
}

/// One factor of an eta quotient: eta((half_steps/2) * tau) ^ exponent.
/// `half_steps` counts multiples of tau/2, so eta(tau/2) is 1, eta(tau) is 2,
/// eta(2 tau) is 4.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaFactor {
    pub half_steps: u32,
    pub exponent: i64,
}

/// prefactor * q^(shift/24) * prod eta(k tau)^e, with eta given by the
/// q-product eta(tau) = q^{1/12} prod (1 - q^{2k}) and q = e^{pi i tau}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EtaQuotientSpec {
    pub factors: Vec<EtaFactor>,
    pub prefactor: BigRational,
    pub shift: QExp,
}

impl EtaQuotientSpec {
    pub fn new(factors: Vec<(u32, i64)>) -> Self {
        EtaQuotientSpec {
            factors: factors
                .into_iter()
                .map(|(half_steps, exponent)| EtaFactor { half_steps, exponent })
                .collect(),
            prefactor: BigRational::one(),
            shift: QExp(0),
        }
    }

    pub fn with_prefactor(mut self, prefactor: BigRational) -> Self {
        self.prefactor = prefactor;
        self
    }

    pub fn with_shift(mut self, shift: QExp) -> Self {
        self.shift = shift;
        self
    }
}

/// Expand an eta quotient as an exact QSeries.
///
/// eta((k/2) tau) contributes the monomial q^{k/24} and the Euler product
/// with lattice step k; negative exponents are handled by one exact series
/// division at the end.
pub fn eta_quotient(spec: &EtaQuotientSpec, order: QExp) -> Result<QSeries, SeriesError> {
    let mut net_shift: i64 = spec.shift.0 as i64;
    for f in &spec.factors {
        net_shift += f.half_steps as i64 * f.exponent;
    }
    if net_shift < 0 {
        return Err(SeriesError::NegativeExponent {
            num_lead: QExp(0),
            den_lead: QExp((-net_shift) as u64),
        });
    }
    let mut num = QSeries::one(order);
    let mut den = QSeries::one(order);
    for f in &spec.factors {
        if f.exponent == 0 {
            continue;
        }
        let base = euler_product(f.half_steps as u64, order);
        if f.exponent > 0 {
            num = num.mul(&base.powi(f.exponent)?);
        } else {
            den = den.mul(&base.powi(-f.exponent)?);
        }
    }
    Ok(num.div(&den)?.scale(&spec.prefactor).shifted(net_shift as u64).truncated(order))
}

/// eta(k tau) as a series (k >= 1), i.e. q^{k/12} prod (1 - q^{2 k n}).
pub fn eta_series(k: u32, order: QExp) -> QSeries {
    eta_quotient(&EtaQuotientSpec::new(vec![(2 * k, 1)]), order).expect("eta expansion")
}

/// eta(tau/2) as a series: q^{1/24} prod (1 - q^n).
pub fn eta_half_series(order: QExp) -> QSeries {
    eta_quotient(&EtaQuotientSpec::new(vec![(1, 1)]), order).expect("eta expansion")
}
