//! Declarative identity catalog and exact q-series verification.
//!
//! Records live in a JSON file: each has an id, a level, a check order, a
//! provenance quote, optional local definitions (the "let X = ..." of the
//! source tables) and two expression trees over series atoms. Checking a
//! record expands both sides as exact series and requires the difference to
//! vanish identically below the check order.
//!
//! Fractional powers take the positive-branch lattice root when it exists.
//! When a factor's root does not exist on its own (irrational leading
//! coefficient or a non-divisible leading exponent), the checker clears
//! powers across the enclosing product: all fractional factors are merged
//! into a single radicand over the lcm denominator and rooted once. The
//! merge preserves the positive branch, so the recorded sign conventions
//! stay meaningful.

use std::collections::BTreeMap;
use std::io::Read;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::modfun::{
    alpha_series, cubic_a_series, eisenstein_p, euler_series, hauptmodul_series,
    quartic_a_series, theta_series, xi_series, AlphaVariant, HauptFamily, ThetaKind,
};
use crate::qlattice::{QExp, QSeries, SeriesError, LATTICE};
use crate::wronskian::{family_series, WronskianFamily};

#[derive(thiserror::Error, Debug)]
pub enum RegistryError {
    #[error("malformed registry data: {0}")]
    Schema(String),
    #[error("record {record}: unknown atom `{atom}`")]
    UnknownAtom { record: String, atom: String },
    #[error("duplicate record id `{0}`")]
    DuplicateId(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Expression tree over series atoms, mirrored one-to-one in the JSON file.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ExprNode {
    Rational { num: i64, den: Option<i64> },
    Atom { name: String, level: Option<u32>, arg_scale: Option<u32> },
    Add { args: Vec<ExprNode> },
    Mul { args: Vec<ExprNode> },
    Neg { arg: Box<ExprNode> },
    Pow { base: Box<ExprNode>, exp: [i64; 2] },
    Negq { arg: Box<ExprNode> },
}

#[derive(Clone, Debug, Deserialize)]
pub struct IdentityRecord {
    pub id: String,
    pub level: u32,
    pub check_order: u64,
    pub lhs: ExprNode,
    pub rhs: ExprNode,
    pub provenance: String,
    #[serde(default)]
    pub defs: BTreeMap<String, ExprNode>,
    #[serde(default)]
    pub notes: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckStatus {
    Pass,
    Fail,
    Error,
}

/// Machine-readable outcome of one identity check (also reused by the
/// pi-digit verifier).
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub id: String,
    pub status: CheckStatus,
    pub checked_order: u64,
    pub first_discrepant_exponent: Option<String>,
    pub notes: String,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        matches!(self.status, CheckStatus::Pass)
    }
}

/// The registry file shipped with the crate.
pub fn builtin_registry_json() -> &'static str {
    include_str!("../data/registry.json")
}

/// Parse and validate a registry stream: unique ids, resolvable atoms.
pub fn load_registry<R: Read>(mut source: R) -> Result<Vec<IdentityRecord>, RegistryError> {
    let mut buf = String::new();
    source.read_to_string(&mut buf)?;
    let records: Vec<IdentityRecord> =
        serde_json::from_str(&buf).map_err(|e| RegistryError::Schema(e.to_string()))?;
    let mut seen = std::collections::BTreeSet::new();
    for r in &records {
        if !seen.insert(r.id.clone()) {
            return Err(RegistryError::DuplicateId(r.id.clone()));
        }
        for side in [&r.lhs, &r.rhs] {
            validate_atoms(side, r)?;
        }
        for def in r.defs.values() {
            validate_atoms(def, r)?;
        }
    }
    Ok(records)
}

fn validate_atoms(node: &ExprNode, rec: &IdentityRecord) -> Result<(), RegistryError> {
    match node {
        ExprNode::Atom { name, .. } => {
            let known = matches!(
                name.as_str(),
                "alpha" | "beta" | "alpha_dagger" | "beta_dagger" | "D" | "Dhat" | "C" | "Chat"
                    | "Dperp" | "f" | "H" | "Hdagger" | "theta2" | "theta3" | "theta4" | "eta"
                    | "euler" | "xi" | "P" | "a" | "A"
            ) || rec.defs.contains_key(name);
            if !known {
                return Err(RegistryError::UnknownAtom {
                    record: rec.id.clone(),
                    atom: name.clone(),
                });
            }
            Ok(())
        }
        ExprNode::Add { args } | ExprNode::Mul { args } => {
            args.iter().try_for_each(|a| validate_atoms(a, rec))
        }
        ExprNode::Neg { arg } | ExprNode::Negq { arg } => validate_atoms(arg, rec),
        ExprNode::Pow { base, .. } => validate_atoms(base, rec),
        ExprNode::Rational { .. } => Ok(()),
    }
}

struct EvalCtx<'a> {
    record: &'a IdentityRecord,
    order: QExp,
    defs: BTreeMap<String, QSeries>,
    cleared_roots: bool,
}

#[derive(thiserror::Error, Debug)]
enum EvalError {
    #[error("root obstruction: {0}")]
    RootObstruction(String),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("unknown atom `{0}`")]
    UnknownAtom(String),
}

/// Expand one atom to its series constructor at the requested order.
fn atom_series(
    name: &str,
    level: Option<u32>,
    arg_scale: Option<u32>,
    record_level: u32,
    order: QExp,
) -> Result<QSeries, EvalError> {
    let m = arg_scale.unwrap_or(1);
    let scaled = |s: QSeries| if m == 1 { s } else { s.compose_power(m, Some(order)) };
    // functions needing only order/m (ceil) of their own expansion
    let base_order = QExp(order.0.div_ceil(m as u64));
    let s = match name {
        "alpha" => scaled(alpha_series(AlphaVariant::Classical, 1, base_order)),
        "beta" => alpha_series(AlphaVariant::Classical, 1, QExp(order.0.div_ceil(record_level as u64)))
            .compose_power(record_level, Some(order)),
        "alpha_dagger" => scaled(alpha_series(AlphaVariant::Cubic, 1, base_order)),
        "beta_dagger" => alpha_series(AlphaVariant::Cubic, 1, QExp(order.0.div_ceil(record_level as u64)))
            .compose_power(record_level, Some(order)),
        "D" | "Dhat" | "C" | "Chat" | "Dperp" | "f" => {
            let fam = match name {
                "D" => WronskianFamily::D,
                "Dhat" => WronskianFamily::Dhat,
                "C" => WronskianFamily::C,
                "Chat" => WronskianFamily::Chat,
                "Dperp" => WronskianFamily::Dperp,
                _ => WronskianFamily::F,
            };
            let ell = level.unwrap_or(record_level);
            let s = family_series(fam, ell, base_order)
                .map_err(|e| EvalError::RootObstruction(e.to_string()))?;
            scaled(s)
        }
        "H" => {
            let ell = level.unwrap_or(record_level);
            let s = hauptmodul_series(HauptFamily::Classical, ell, base_order)
                .map_err(|e| EvalError::RootObstruction(e.to_string()))?;
            scaled(s)
        }
        "Hdagger" => {
            let ell = level.unwrap_or(record_level);
            let s = hauptmodul_series(HauptFamily::Cubic, ell, base_order)
                .map_err(|e| EvalError::RootObstruction(e.to_string()))?;
            scaled(s)
        }
        "theta2" => scaled(theta_series(ThetaKind::Theta2, 1, base_order)),
        "theta3" => scaled(theta_series(ThetaKind::Theta3, 1, base_order)),
        "theta4" => scaled(theta_series(ThetaKind::Theta4, 1, base_order)),
        "eta" => {
            let k = arg_scale.unwrap_or(1);
            crate::qlattice::eta_series(k, order)
        }
        "euler" => euler_series(m, order),
        "xi" => scaled(xi_series(base_order)),
        "P" => eisenstein_p(m, order),
        "a" => cubic_a_series(m, order),
        "A" => scaled(quartic_a_series(1, base_order)),
        other => return Err(EvalError::UnknownAtom(other.to_string())),
    };
    Ok(s.truncated(order))
}

impl<'a> EvalCtx<'a> {
    fn eval(&mut self, node: &ExprNode) -> Result<QSeries, EvalError> {
        match node {
            ExprNode::Rational { num, den } => Ok(QSeries::monomial(
                BigRational::new(BigInt::from(*num), BigInt::from(den.unwrap_or(1))),
                QExp(0),
                self.order,
            )),
            ExprNode::Atom { name, level, arg_scale } => {
                if let Some(s) = self.defs.get(name) {
                    return Ok(s.clone());
                }
                if self.record.defs.contains_key(name) {
                    let def = self.record.defs[name].clone();
                    let s = self.eval(&def)?;
                    self.defs.insert(name.clone(), s.clone());
                    return Ok(s);
                }
                atom_series(name, *level, *arg_scale, self.record.level, self.order)
            }
            ExprNode::Add { args } => {
                let mut acc = QSeries::zero(self.order);
                for a in args {
                    acc = acc.add(&self.eval(a)?);
                }
                Ok(acc)
            }
            ExprNode::Neg { arg } => Ok(self.eval(arg)?.neg()),
            ExprNode::Negq { arg } => Ok(self.eval(arg)?.negate_q()?),
            ExprNode::Mul { args } => self.eval_product(args),
            ExprNode::Pow { base, exp } => {
                // standalone power: try directly, else treat as a 1-factor product
                self.eval_product(std::slice::from_ref(&ExprNode::Pow {
                    base: base.clone(),
                    exp: *exp,
                }))
            }
        }
    }

    /// Evaluate a product. Integer powers multiply straight in (negative ones
    /// divide at the end); fractional powers are rooted individually when the
    /// lattice root exists, otherwise all fractional factors are merged over
    /// the lcm denominator and rooted once (power clearing).
    fn eval_product(&mut self, args: &[ExprNode]) -> Result<QSeries, EvalError> {
        let mut numer: Vec<QSeries> = Vec::new();
        let mut denom: Vec<QSeries> = Vec::new();
        let mut fractional: Vec<(QSeries, i64, i64)> = Vec::new(); // (base, p, r) for base^(p/r)
        for a in args {
            match a {
                ExprNode::Pow { base, exp } => {
                    let [p, r] = *exp;
                    assert!(r != 0);
                    let (p, r) = if r < 0 { (-p, -r) } else { (p, r) };
                    let b = self.eval(base)?;
                    if p % r == 0 {
                        let k = p / r;
                        if k >= 0 {
                            numer.push(b.powi(k)?);
                        } else {
                            denom.push(b.powi(-k)?);
                        }
                    } else {
                        fractional.push((b, p, r));
                    }
                }
                other => numer.push(self.eval(other)?),
            }
        }
        // try individual roots first
        let mut unresolved: Vec<(QSeries, i64, i64)> = Vec::new();
        for (b, p, r) in fractional {
            let powered = if p >= 0 { b.powi(p)? } else { QSeries::one(b.order()).div(&b.powi(-p)?)? };
            match powered.nth_root(r as u32) {
                Ok(root) => numer.push(root),
                Err(
                    SeriesError::NonLatticeRoot { .. }
                    | SeriesError::IrrationalRootLeadingCoefficient { .. },
                ) => unresolved.push((b, p, r)),
                Err(e) => return Err(e.into()),
            }
        }
        if !unresolved.is_empty() {
            // merge over the lcm denominator; all leading coefficients must be
            // positive so that the merged positive branch is the product of
            // the individual positive branches
            self.cleared_roots = true;
            let mut lcm: i64 = 1;
            for &(_, _, r) in &unresolved {
                lcm = num_integer::lcm(lcm, r);
            }
            let mut rad_num = QSeries::one(self.order);
            let mut rad_den = QSeries::one(self.order);
            for (b, p, r) in &unresolved {
                if b.leading_coeff().map(|c| c.is_negative()).unwrap_or(true) {
                    return Err(EvalError::RootObstruction(format!(
                        "record {}: cannot merge a fractional power with nonpositive leading coefficient",
                        self.record.id
                    )));
                }
                let e = p * (lcm / r);
                if e >= 0 {
                    rad_num = rad_num.mul(&b.powi(e)?);
                } else {
                    rad_den = rad_den.mul(&b.powi(-e)?);
                }
            }
            let radicand = rad_num.div(&rad_den)?;
            let root = radicand.nth_root(lcm as u32).map_err(|e| {
                EvalError::RootObstruction(format!("record {}: {e}", self.record.id))
            })?;
            numer.push(root);
        }
        let mut acc = QSeries::one(self.order);
        for f in numer {
            acc = acc.mul(&f);
        }
        for d in denom {
            acc = acc.div(&d)?;
        }
        Ok(acc)
    }
}

/// Check one identity record by exact series comparison.
pub fn check_identity(record: &IdentityRecord, order_override: Option<u64>) -> VerificationReport {
    let order_q = order_override.unwrap_or(record.check_order);
    let order = QExp::from_q(order_q);
    let mut ctx = EvalCtx { record, order, defs: BTreeMap::new(), cleared_roots: false };
    let lhs = match ctx.eval(&record.lhs) {
        Ok(s) => s,
        Err(e) => return error_report(record, order_q, e),
    };
    let rhs = match ctx.eval(&record.rhs) {
        Ok(s) => s,
        Err(e) => return error_report(record, order_q, e),
    };
    let diff = lhs.sub(&rhs);
    let checked = diff.order().0 / LATTICE;
    let mut notes = String::new();
    if ctx.cleared_roots {
        notes.push_str("verified in power-cleared form with positive-branch sign conditions; ");
    }
    if let Some(n) = &record.notes {
        notes.push_str(n);
        notes.push_str("; ");
    }
    if diff.is_zero() {
        notes.push_str(&format!("difference vanishes identically below q^{checked}"));
        VerificationReport {
            id: record.id.clone(),
            status: CheckStatus::Pass,
            checked_order: checked,
            first_discrepant_exponent: None,
            notes,
        }
    } else {
        let e = diff.lead();
        let c = diff.leading_coeff().cloned().unwrap_or_else(BigRational::zero);
        let (lc, rc) = (lhs.coeff(e), rhs.coeff(e));
        notes.push_str(&format!(
            "first discrepancy at q^{e}: lhs coefficient {lc}, rhs coefficient {rc}, difference {c}"
        ));
        VerificationReport {
            id: record.id.clone(),
            status: CheckStatus::Fail,
            checked_order: checked,
            first_discrepant_exponent: Some(e.to_string()),
            notes,
        }
    }
}

fn error_report(record: &IdentityRecord, order_q: u64, e: EvalError) -> VerificationReport {
    VerificationReport {
        id: record.id.clone(),
        status: CheckStatus::Error,
        checked_order: order_q,
        first_discrepant_exponent: None,
        notes: e.to_string(),
    }
}

/// Check every record (in parallel) and return reports ordered by id.
pub fn check_all(
    records: &[IdentityRecord],
    order_override: Option<u64>,
) -> Vec<VerificationReport> {
    let mut reports: Vec<VerificationReport> = records
        .par_iter()
        .map(|r| check_identity(r, order_override))
        .collect();
    reports.sort_by(|a, b| a.id.cmp(&b.id));
    reports
}

/// One pass/fail line per report, for terminal output.
pub fn format_report_line(r: &VerificationReport) -> String {
    let status = match r.status {
        CheckStatus::Pass => "PASS",
        CheckStatus::Fail => "FAIL",
        CheckStatus::Error => "ERROR",
    };
    match r.status {
        CheckStatus::Pass => format!("{status} {} (order {})", r.id, r.checked_order),
        _ => format!("{status} {} (order {}): {}", r.id, r.checked_order, r.notes),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn registry() -> Vec<IdentityRecord> {
        load_registry(builtin_registry_json().as_bytes()).expect("builtin registry loads")
    }

    #[test]
    fn builtin_loads_with_unique_ids() {
        let recs = registry();
        assert!(recs.len() >= 30, "expected 30+ records, got {}", recs.len());
    }

    #[test]
    fn unknown_atom_rejected() {
        let json = r#"[{"id":"x","level":2,"check_order":10,
            "lhs":{"kind":"atom","name":"gamma"},
            "rhs":{"kind":"rational","num":0},
            "provenance":"test"}]"#;
        match load_registry(json.as_bytes()) {
            Err(RegistryError::UnknownAtom { atom, .. }) => assert_eq!(atom, "gamma"),
            other => panic!("expected UnknownAtom, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_id_rejected() {
        let json = r#"[
          {"id":"x","level":2,"check_order":10,
           "lhs":{"kind":"rational","num":0},"rhs":{"kind":"rational","num":0},"provenance":"t"},
          {"id":"x","level":2,"check_order":10,
           "lhs":{"kind":"rational","num":0},"rhs":{"kind":"rational","num":0},"provenance":"t"}
        ]"#;
        assert!(matches!(load_registry(json.as_bytes()), Err(RegistryError::DuplicateId(_))));
    }

    #[test]
    fn empty_registry_is_empty() {
        let recs = load_registry("[]".as_bytes()).unwrap();
        assert!(recs.is_empty());
        assert!(check_all(&recs, None).is_empty());
    }

    #[test]
    fn haupt_d3_passes_at_low_order() {
        let recs = registry();
        let r = recs.iter().find(|r| r.id == "haupt.3").unwrap();
        let rep = check_identity(r, Some(40));
        assert!(rep.passed(), "{}", rep.notes);
    }

    #[test]
    fn table1_n3_passes_at_low_order() {
        let recs = registry();
        let r = recs.iter().find(|r| r.id == "table1.N3").unwrap();
        let rep = check_identity(r, Some(40));
        assert!(rep.passed(), "{}", rep.notes);
    }

    #[test]
    fn corrupted_rhs_fails_with_pinpointed_exponent() {
        let recs = registry();
        let mut r = recs.iter().find(|r| r.id == "haupt.3").unwrap().clone();
        // perturb the rational scale 2 -> 3 inside rhs
        fn corrupt(n: &mut ExprNode) -> bool {
            match n {
                ExprNode::Rational { num, .. } if *num == 2 => {
                    *num = 3;
                    true
                }
                ExprNode::Add { args } | ExprNode::Mul { args } => {
                    args.iter_mut().any(corrupt)
                }
                ExprNode::Neg { arg } | ExprNode::Negq { arg } => corrupt(arg),
                ExprNode::Pow { base, .. } => corrupt(base),
                _ => false,
            }
        }
        assert!(corrupt(&mut r.rhs));
        let rep = check_identity(&r, Some(30));
        assert_eq!(rep.status, CheckStatus::Fail);
        assert_eq!(rep.first_discrepant_exponent.as_deref(), Some("2"));
    }
}
