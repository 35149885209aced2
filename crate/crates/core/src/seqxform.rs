//! Levin-type sequence transformations.
//!
//! Both transformations map the partial sums `s_n` of a series with terms
//! `a_n` to the estimates
//!
//! ```text
//!          sum_{j=0..k} (-1)^j C(k,j) w(j,k) s_j / omega_j
//!   T_k = --------------------------------------------------
//!          sum_{j=0..k} (-1)^j C(k,j) w(j,k) / omega_j
//! ```
//!
//! with `w(j,k) = (1+j)^(k-1)` for Levin's d-transformation and the rising
//! factorial `w(j,k) = (1+j)_(k-1)` for Weniger's delta-transformation. The
//! binomial sums are evaluated directly with exact integer weights.
//!
//! The remainder estimate `omega_j` is either the first neglected term
//! `a_{j+1}` or the last included term `a_j` (see [`RemainderEstimate`]).
//! By default the delta-transformation uses `a_{j+1}` and the
//! d-transformation uses `a_j`; these are the pairings that reproduce the
//! published reference tables.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::arith::{BigComplex, BigReal, Precision};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransformKind {
    LevinD,
    WenigerDelta,
}

impl TransformKind {
    pub const ALL: [TransformKind; 2] = [TransformKind::LevinD, TransformKind::WenigerDelta];

    pub fn name(self) -> &'static str {
        match self {
            TransformKind::LevinD => "levin",
            TransformKind::WenigerDelta => "weniger",
        }
    }

    pub fn default_remainder(self) -> RemainderEstimate {
        match self {
            TransformKind::LevinD => RemainderEstimate::LastTerm,
            TransformKind::WenigerDelta => RemainderEstimate::NextTerm,
        }
    }

    /// `w(j, k)` as an exact integer.
    fn weight(self, j: u32, k: u32) -> Integer {
        if k <= 1 {
            return Integer::from(1);
        }
        match self {
            TransformKind::LevinD => Integer::from(Integer::u_pow_u(1 + j, k - 1)),
            TransformKind::WenigerDelta => {
                // (1+j)_(k-1) = (1+j)(2+j)...(j+k-1)
                let mut acc = Integer::from(1);
                for i in 1..k {
                    acc *= j + i;
                }
                acc
            }
        }
    }
}

/// Choice of remainder estimate `omega_j` attached to the partial sum `s_j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RemainderEstimate {
    /// `omega_j = a_j`.
    LastTerm,
    /// `omega_j = a_{j+1}`.
    NextTerm,
}

impl RemainderEstimate {
    pub fn name(self) -> &'static str {
        match self {
            RemainderEstimate::LastTerm => "last",
            RemainderEstimate::NextTerm => "next",
        }
    }

    /// Offset of the term used as `omega_j` relative to `j`.
    pub fn offset(self) -> usize {
        match self {
            RemainderEstimate::LastTerm => 0,
            RemainderEstimate::NextTerm => 1,
        }
    }

    /// Terms needed for an order-`k_max` table.
    pub fn terms_needed(self, k_max: usize) -> usize {
        k_max + 1 + self.offset()
    }
}

impl fmt::Display for RemainderEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RemainderEstimate {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "last" | "t" => Ok(RemainderEstimate::LastTerm),
            "next" => Ok(RemainderEstimate::NextTerm),
            other => Err(Error::Parse(format!("unknown remainder estimate {other:?}"))),
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TransformKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "levin" | "d" | "levin-d" | "levind" => Ok(TransformKind::LevinD),
            "weniger" | "delta" | "weniger-delta" | "wenigerdelta" => {
                Ok(TransformKind::WenigerDelta)
            }
            other => Err(Error::Parse(format!("unknown transformation {other:?}"))),
        }
    }
}

/// Terms `a_0, a_1, ..., a_N` of a series.
#[derive(Clone, Debug)]
pub struct TermSequence {
    terms: Vec<BigComplex>,
    descriptor: String,
}

impl TermSequence {
    /// Requires at least two finite terms. All terms are brought to the
    /// highest precision present.
    pub fn new(descriptor: impl Into<String>, terms: Vec<BigComplex>) -> Result<Self> {
        if terms.len() < 2 {
            return Err(Error::Domain(format!(
                "a term sequence needs at least two terms, got {}",
                terms.len()
            )));
        }
        if let Some(i) = terms.iter().position(|t| !t.is_finite()) {
            return Err(Error::Domain(format!("term a[{i}] is not finite")));
        }
        let digits = terms.iter().map(|t| t.precision().digits()).max().unwrap();
        let terms = terms
            .into_iter()
            .map(|t| {
                if t.precision().digits() == digits {
                    t
                } else {
                    t.at(Precision::new(digits).expect("digits came from a valid value"))
                }
            })
            .collect();
        Ok(TermSequence {
            terms,
            descriptor: descriptor.into(),
        })
    }

    pub fn from_reals(descriptor: impl Into<String>, terms: Vec<BigReal>) -> Result<Self> {
        Self::new(descriptor, terms.into_iter().map(BigComplex::from_real).collect())
    }

    pub fn terms(&self) -> &[BigComplex] {
        &self.terms
    }

    pub fn descriptor(&self) -> &str {
        &self.descriptor
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn precision(&self) -> Precision {
        self.terms[0].precision()
    }

    /// Multiplies every term by `c`.
    pub fn scaled(&self, c: &BigComplex) -> TermSequence {
        TermSequence {
            terms: self.terms.iter().map(|t| t * c).collect(),
            descriptor: self.descriptor.clone(),
        }
    }

    /// Termwise complex conjugate.
    pub fn conj(&self) -> TermSequence {
        TermSequence {
            terms: self.terms.iter().map(BigComplex::conj).collect(),
            descriptor: format!("conj({})", self.descriptor),
        }
    }

    /// Termwise imaginary parts as a real sequence.
    pub fn imag(&self) -> TermSequence {
        TermSequence {
            terms: self
                .terms
                .iter()
                .map(|t| BigComplex::from_real(t.im.clone()))
                .collect(),
            descriptor: format!("Im({})", self.descriptor),
        }
    }

    pub fn is_identically_zero(&self) -> bool {
        self.terms.iter().all(BigComplex::is_zero)
    }
}

/// Partial sums `s_n = a_0 + ... + a_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PartialSums {
    sums: Vec<BigComplex>,
}

impl PartialSums {
    pub fn sums(&self) -> &[BigComplex] {
        &self.sums
    }

    pub fn len(&self) -> usize {
        self.sums.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sums.is_empty()
    }

    pub fn get(&self, n: usize) -> Option<&BigComplex> {
        self.sums.get(n)
    }

    /// Adds `c` to every partial sum.
    pub fn shifted(&self, c: &BigComplex) -> PartialSums {
        PartialSums {
            sums: self.sums.iter().map(|s| s + c).collect(),
        }
    }
}

pub fn partial_sums(t: &TermSequence) -> PartialSums {
    let mut sums = Vec::with_capacity(t.len());
    let mut acc = t.precision().czero();
    for a in &t.terms {
        acc += a;
        sums.push(acc.clone());
    }
    PartialSums { sums }
}

/// Why a table stopped before the requested order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TableStop {
    /// The denominator at this order is exactly zero.
    ZeroDenominator { order: usize },
    /// Numerator and denominator both cancelled below the working precision.
    Indeterminate { order: usize },
}

impl TableStop {
    pub fn order(self) -> usize {
        match self {
            TableStop::ZeroDenominator { order } | TableStop::Indeterminate { order } => order,
        }
    }
}

/// Transformation estimates for orders `1..=k_max`.
#[derive(Clone, Debug)]
pub struct TransformTable {
    pub kind: TransformKind,
    pub remainder: RemainderEstimate,
    /// `estimates[k-1]` is the order-`k` estimate.
    estimates: Vec<BigComplex>,
    denominators: Vec<BigComplex>,
    sums: Vec<BigComplex>,
    pub requested: usize,
    pub stop: Option<TableStop>,
}

impl TransformTable {
    /// Highest order with a recorded estimate (0 when none).
    pub fn k_max(&self) -> usize {
        self.estimates.len()
    }

    pub fn estimate(&self, k: usize) -> Option<&BigComplex> {
        k.checked_sub(1).and_then(|i| self.estimates.get(i))
    }

    pub fn denominator(&self, k: usize) -> Option<&BigComplex> {
        k.checked_sub(1).and_then(|i| self.denominators.get(i))
    }

    pub fn estimates(&self) -> &[BigComplex] {
        &self.estimates
    }

    /// Partial sums `s_0 ..` of the source sequence (as many as were used).
    pub fn partial_sums(&self) -> &[BigComplex] {
        &self.sums
    }

    pub fn last(&self) -> Option<&BigComplex> {
        self.estimates.last()
    }

    /// Applies `f` to every estimate and partial sum.
    pub fn map(&self, f: impl Fn(&BigComplex) -> BigComplex) -> TransformTable {
        TransformTable {
            kind: self.kind,
            remainder: self.remainder,
            estimates: self.estimates.iter().map(&f).collect(),
            denominators: self.denominators.clone(),
            sums: self.sums.iter().map(&f).collect(),
            requested: self.requested,
            stop: self.stop,
        }
    }

    /// CSV with columns `order, partial_sum_re, partial_sum_im, estimate_re,
    /// estimate_im`. The partial sum on row `k` is `s_k`; values are rounded
    /// to `digits` significant digits.
    pub fn write_csv<W: Write>(&self, out: W, digits: usize) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record([
            "order",
            "partial_sum_re",
            "partial_sum_im",
            "estimate_re",
            "estimate_im",
        ])?;
        for k in 1..=self.k_max() {
            let s = &self.sums[k];
            let e = &self.estimates[k - 1];
            w.write_record([
                k.to_string(),
                s.re.to_sci(digits),
                s.im.to_sci(digits),
                e.re.to_sci(digits),
                e.im.to_sci(digits),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_json(&self, digits: usize) -> serde_json::Value {
        let rows: Vec<_> = (1..=self.k_max())
            .map(|k| {
                let s = &self.sums[k];
                let e = &self.estimates[k - 1];
                serde_json::json!({
                    "order": k,
                    "partial_sum": [s.re.to_sci(digits), s.im.to_sci(digits)],
                    "estimate": [e.re.to_sci(digits), e.im.to_sci(digits)],
                    "denominator": [self.denominators[k - 1].re.to_sci(digits),
                                    self.denominators[k - 1].im.to_sci(digits)],
                })
            })
            .collect();
        serde_json::json!({
            "kind": self.kind,
            "remainder": self.remainder,
            "requested": self.requested,
            "stop": self.stop,
            "rows": rows,
        })
    }
}

/// Levin d-transformation up to order `k_max`.
pub fn levin_d(t: &TermSequence, k_max: usize) -> Result<TransformTable> {
    transform(t, TransformKind::LevinD, k_max)
}

/// Weniger delta-transformation up to order `k_max`.
pub fn weniger_delta(t: &TermSequence, k_max: usize) -> Result<TransformTable> {
    transform(t, TransformKind::WenigerDelta, k_max)
}

/// Runs `kind` with its default remainder estimate.
pub fn transform(t: &TermSequence, kind: TransformKind, k_max: usize) -> Result<TransformTable> {
    transform_with(t, kind, kind.default_remainder(), k_max)
}

/// Runs `kind` with an explicit remainder estimate.
///
/// Needs `k_max + 2` terms for [`RemainderEstimate::NextTerm`] and `k_max + 1`
/// for [`RemainderEstimate::LastTerm`]. A zero remainder estimate is reported
/// as [`Error::DegenerateTerm`] carrying the index of the zero term.
pub fn transform_with(
    t: &TermSequence,
    kind: TransformKind,
    remainder: RemainderEstimate,
    k_max: usize,
) -> Result<TransformTable> {
    let needed = remainder.terms_needed(k_max);
    if t.len() < needed {
        return Err(Error::TooFewTerms {
            order: k_max,
            needed,
            have: t.len(),
        });
    }
    let off = remainder.offset();
    if let Some(j) = t.terms[off..needed].iter().position(BigComplex::is_zero) {
        return Err(Error::DegenerateTerm { index: j + off });
    }
    let sums = partial_sums(t);
    let omegas = &t.terms[off..needed];
    let mut table = transform_with_remainders(&sums.sums[..k_max + 1], omegas, kind, k_max)?;
    table.remainder = remainder;
    Ok(table)
}

/// General Levin-type transformation with explicit remainder estimates
/// `omegas[j]` attached to `sums[j]`. A zero `omegas[j]` is reported with
/// index `j + 1`, the position of the first neglected term.
pub fn transform_with_remainders(
    sums: &[BigComplex],
    omegas: &[BigComplex],
    kind: TransformKind,
    k_max: usize,
) -> Result<TransformTable> {
    let have = sums.len().min(omegas.len());
    if have < k_max + 1 {
        return Err(Error::TooFewTerms {
            order: k_max,
            needed: k_max + 1,
            have,
        });
    }
    if let Some(j) = omegas[..=k_max].iter().position(BigComplex::is_zero) {
        return Err(Error::DegenerateTerm { index: j + 1 });
    }
    let prec = sums[0].precision();
    // cancellation beyond this many digits leaves no information
    let floor = prec.digits() as f64 - 10.0;

    let recips: Vec<BigComplex> = omegas[..=k_max].iter().map(BigComplex::recip).collect();
    let ratios: Vec<BigComplex> = sums[..=k_max]
        .iter()
        .zip(&recips)
        .map(|(s, r)| s * r)
        .collect();
    let recip_mag: Vec<f64> = recips.iter().map(BigComplex::log10_abs).collect();
    let ratio_mag: Vec<f64> = ratios.iter().map(BigComplex::log10_abs).collect();

    let mut estimates = Vec::with_capacity(k_max);
    let mut denominators = Vec::with_capacity(k_max);
    let mut stop = None;
    for k in 1..=k_max {
        let mut num = prec.czero();
        let mut den = prec.czero();
        let mut num_peak = f64::NEG_INFINITY;
        let mut den_peak = f64::NEG_INFINITY;
        let mut binom = Integer::from(1);
        for j in 0..=k {
            if j > 0 {
                binom *= (k + 1 - j) as u64;
                binom /= j as u64;
            }
            let mut c = Integer::from(&binom * kind.weight(j as u32, k as u32));
            if j % 2 == 1 {
                c = -c;
            }
            let c_mag = integer_log10(&c);
            num_peak = num_peak.max(c_mag + ratio_mag[j]);
            den_peak = den_peak.max(c_mag + recip_mag[j]);
            num += &ratios[j].mul_integer(&c);
            den += &recips[j].mul_integer(&c);
        }
        if den.is_zero() {
            stop = Some(TableStop::ZeroDenominator { order: k });
            break;
        }
        let lost_den = den_peak - den.log10_abs();
        let lost_num = num_peak - num.log10_abs();
        if lost_den > floor && lost_num > floor {
            stop = Some(TableStop::Indeterminate { order: k });
            break;
        }
        estimates.push(&num / &den);
        denominators.push(den);
    }
    Ok(TransformTable {
        kind,
        remainder: RemainderEstimate::NextTerm,
        estimates,
        denominators,
        sums: sums[..=k_max].to_vec(),
        requested: k_max,
        stop,
    })
}

fn integer_log10(n: &Integer) -> f64 {
    if *n == 0 {
        return f64::NEG_INFINITY;
    }
    let (m, e) = n.to_f64_exp();
    m.abs().log10() + e as f64 * std::f64::consts::LOG10_2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real_seq(_p: Precision, xs: &[BigReal]) -> TermSequence {
        TermSequence::from_reals("test", xs.to_vec()).unwrap()
    }

    fn geometric(p: Precision, c: i64, num: i64, den: i64, n: usize) -> TermSequence {
        let r = p.ratio(num, den);
        let mut t = Vec::with_capacity(n);
        let mut x = p.int(c);
        for _ in 0..n {
            t.push(x.clone());
            x = &x * &r;
        }
        real_seq(p, &t)
    }

    #[test]
    fn weights() {
        assert_eq!(TransformKind::LevinD.weight(2, 4), 27);
        assert_eq!(TransformKind::WenigerDelta.weight(2, 4), 3 * 4 * 5);
        assert_eq!(TransformKind::WenigerDelta.weight(5, 1), 1);
        assert_eq!(TransformKind::LevinD.weight(5, 1), 1);
    }

    #[test]
    fn partial_sums_of_ones() {
        let p = Precision::default();
        let t = real_seq(p, &[p.one(), p.one(), p.one()]);
        let s = partial_sums(&t);
        let got: Vec<f64> = s.sums().iter().map(|z| z.re.to_f64()).collect();
        assert_eq!(got, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn geometric_half_converges_to_two() {
        let p = Precision::default();
        let t = geometric(p, 1, 1, 2, 20);
        for kind in TransformKind::ALL {
            let tab = transform(&t, kind, 15).unwrap();
            let err = (&tab.estimate(15).unwrap().re - &p.int(2)).abs();
            assert!(err.log10_abs() < -30.0, "{kind}: {}", err.to_sci(5));
        }
    }

    #[test]
    fn order_one_identity() {
        let p = Precision::default();
        let t = real_seq(
            p,
            &[p.ratio(3, 7), p.ratio(-2, 9), p.ratio(5, 11), p.ratio(1, 13)],
        );
        let next = RemainderEstimate::NextTerm;
        let d = transform_with(&t, TransformKind::LevinD, next, 1).unwrap();
        let w = transform_with(&t, TransformKind::WenigerDelta, next, 1).unwrap();
        assert_eq!(d.estimate(1), w.estimate(1));
        let s = partial_sums(&t);
        let (a1, a2) = (&t.terms()[1], &t.terms()[2]);
        let expect = (&s.sums()[0] / a1 - &s.sums()[1] / a2) / (a1.recip() - a2.recip());
        assert!((&expect - d.estimate(1).unwrap()).abs().log10_abs() < -240.0);
    }

    #[test]
    fn degenerate_term_is_named() {
        let p = Precision::default();
        let t = real_seq(p, &[p.one(), p.one(), p.zero(), p.one(), p.one()]);
        for kind in TransformKind::ALL {
            match transform(&t, kind, 2) {
                Err(Error::DegenerateTerm { index }) => assert_eq!(index, 2),
                other => panic!("unexpected {other:?}"),
            }
        }
    }

    #[test]
    fn too_few_terms() {
        let p = Precision::default();
        let t = geometric(p, 1, 1, 3, 5);
        assert!(matches!(weniger_delta(&t, 4), Err(Error::TooFewTerms { .. })));
        assert!(weniger_delta(&t, 3).is_ok());
        assert!(levin_d(&t, 4).is_ok());
        assert!(matches!(levin_d(&t, 5), Err(Error::TooFewTerms { .. })));
    }

    #[test]
    fn last_term_estimate_is_exact_on_geometric_series() {
        let p = Precision::default();
        let t = geometric(p, 3, -2, 5, 6);
        let tab = transform_with(&t, TransformKind::WenigerDelta, RemainderEstimate::LastTerm, 2)
            .unwrap();
        let expect = p.int(3) / (p.one() + p.ratio(2, 5));
        for k in 1..=2 {
            let err = (&tab.estimate(k).unwrap().re - &expect).abs();
            assert!(err.log10_abs() < -240.0);
        }
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("levin".parse::<TransformKind>().unwrap(), TransformKind::LevinD);
        assert_eq!(
            "weniger".parse::<TransformKind>().unwrap(),
            TransformKind::WenigerDelta
        );
        assert!("wynn".parse::<TransformKind>().is_err());
        assert_eq!("next".parse::<RemainderEstimate>().unwrap(), RemainderEstimate::NextTerm);
    }
}
