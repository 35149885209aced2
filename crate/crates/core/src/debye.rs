//! Debye polynomials `U_k(t) = sum_{m=0}^{3k} a^k_m t^m`.
//!
//! Coefficients are generated row by row from `U_0 = 1` with the exact
//! rational recurrence
//!
//! ```text
//! a^{k+1}_0      = 0
//! a^{k+1}_1      = a^k_0 / 8
//! a^{k+1}_2      = 9 a^k_1 / 16
//! a^{k+1}_3      = 5 (5 a^k_2 - a^k_0) / 24
//! a^{k+1}_m      = (2m-1)^2/(8m) a^k_{m-1} - (4m(m-3)+5)/(8m) a^k_{m-3},   4 <= m <= 3k+1
//! a^{k+1}_{3k+2} = -3(2k+1)(6k-1)/(8(3k+2)) a^k_{3k-1}
//! a^{k+1}_{3k+3} = -(36k(k+1)+5)/(24(k+1)) a^k_{3k}
//! ```
//!
//! which replaces the derivative-plus-integral definition
//! `U_{k+1} = t^2(1-t^2)/2 U_k' + 1/8 int_0^t (1-5x^2) U_k(x) dx`.

use rug::{Float, Integer, Rational};

use crate::arith::{digits_to_bits, BigRational, BigReal, Precision};
use crate::error::{Error, Result};

/// Empirical constant of the leading-coefficient growth law.
pub const ASYMPTOTE_CONSTANT: f64 = 1.0e4;

/// One polynomial `U_k`, coefficients `a^k_0 ..= a^k_{3k}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DebyeRow {
    k: usize,
    coeffs: Vec<Rational>,
}

impl DebyeRow {
    /// `U_0(t) = 1`.
    pub fn first() -> DebyeRow {
        DebyeRow {
            k: 0,
            coeffs: vec![Rational::from(1)],
        }
    }

    pub fn order(&self) -> usize {
        self.k
    }

    pub fn degree(&self) -> usize {
        3 * self.k
    }

    pub fn coeff(&self, m: usize) -> BigRational {
        self.coeffs
            .get(m)
            .cloned()
            .map(BigRational::from)
            .unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> Vec<BigRational> {
        self.coeffs.iter().cloned().map(BigRational::from).collect()
    }

    /// `a^k_{3k}`.
    pub fn leading(&self) -> BigRational {
        self.coeff(3 * self.k)
    }

    /// Applies the recurrence once, producing `U_{k+1}`.
    pub fn next(&self) -> DebyeRow {
        let k = self.k;
        let prev = &self.coeffs;
        let a = |m: usize| -> &Rational { &prev[m] };
        let top = 3 * k + 3;
        let mut out: Vec<Rational> = Vec::with_capacity(top + 1);
        out.push(Rational::new());
        out.push(Rational::from(a(0) / 8u32));
        let a1 = if k >= 1 { a(1).clone() } else { Rational::new() };
        let a2 = if k >= 1 { a(2).clone() } else { Rational::new() };
        out.push(a1 * Rational::from((9, 16)));
        out.push((a2 * 5u32 - a(0)) * Rational::from((5, 24)));
        if k >= 1 {
            for m in 4..=(3 * k + 1) {
                let m_i = m as i64;
                let lo = Rational::from((((2 * m_i - 1) * (2 * m_i - 1)), 8 * m_i));
                let hi = Rational::from((4 * m_i * (m_i - 3) + 5, 8 * m_i));
                let mut v = Rational::from(a(m - 1) * &lo);
                if a(m - 3).cmp0() != std::cmp::Ordering::Equal {
                    v -= Rational::from(a(m - 3) * &hi);
                }
                out.push(v);
            }
            let k_i = k as i64;
            let c = Rational::from((-3 * (2 * k_i + 1) * (6 * k_i - 1), 8 * (3 * k_i + 2)));
            out.push(Rational::from(a(3 * k - 1) * &c));
            out.push(Rational::from(a(3 * k) * leading_ratio_raw(k)));
        }
        debug_assert_eq!(out.len(), top + 1);
        DebyeRow {
            k: k + 1,
            coeffs: out,
        }
    }

    /// Horner evaluation of `U_k(t)`, returned at the precision of `t`.
    ///
    /// Guard digits are added until the cancellation between the largest
    /// monomial and the result is covered.
    pub fn eval(&self, t: &BigReal) -> BigReal {
        let prec = t.precision();
        let tf = t.to_f64().abs().max(f64::MIN_POSITIVE);
        let peak = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.cmp0() != std::cmp::Ordering::Equal)
            .map(|(m, c)| rational_log10(c) + m as f64 * tf.log10())
            .fold(f64::NEG_INFINITY, f64::max);
        let mut guard = 10u32;
        loop {
            let bits = digits_to_bits(prec.digits() + guard);
            let x = Float::with_val(bits, t.as_float());
            let mut acc = Float::with_val(bits, 0);
            for c in self.coeffs.iter().rev() {
                acc *= &x;
                acc += Float::with_val(bits, c);
            }
            let mag = if acc.is_zero() {
                f64::NEG_INFINITY
            } else {
                let (m, e) = acc.to_f64_exp();
                m.abs().log10() + e as f64 * std::f64::consts::LOG10_2
            };
            let lost = peak - mag;
            if lost.is_finite() && lost + 10.0 > guard as f64 && guard < 4 * prec.digits() {
                guard = (lost.ceil() as u32 + 20).max(guard * 2);
                continue;
            }
            return BigReal::from_float(Float::with_val(prec.bits(), &acc), prec.digits());
        }
    }
}

fn rational_log10(q: &Rational) -> f64 {
    BigRational::from(q.clone()).log10_abs()
}

fn leading_ratio_raw(k: usize) -> Rational {
    let k = k as i64;
    let mut num = Integer::from(36 * k);
    num *= k + 1;
    num += 5;
    Rational::from((-num, Integer::from(24 * (k + 1))))
}

/// `a^{k+1}_{3k+3} / a^k_{3k} = -(36k(k+1)+5) / (24(k+1))`, exactly.
pub fn leading_ratio(k: usize) -> BigRational {
    BigRational::from(leading_ratio_raw(k))
}

/// Streams `U_0, U_1, ...`, keeping only the current row in memory.
#[derive(Clone, Debug)]
pub struct DebyeRows {
    current: Option<DebyeRow>,
}

impl DebyeRows {
    pub fn new() -> Self {
        DebyeRows { current: None }
    }
}

impl Default for DebyeRows {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for DebyeRows {
    type Item = DebyeRow;

    fn next(&mut self) -> Option<DebyeRow> {
        let next = match &self.current {
            None => DebyeRow::first(),
            Some(row) => row.next(),
        };
        self.current = Some(next.clone());
        Some(next)
    }
}

/// `U_k` alone, streaming through the lower orders.
pub fn debye_row(k: usize) -> DebyeRow {
    let mut row = DebyeRow::first();
    for _ in 0..k {
        row = row.next();
    }
    row
}

/// Coefficient rows for `U_0 ..= U_{k_max}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DebyeTable {
    rows: Vec<DebyeRow>,
}

/// Runs the recurrence up to `k_max`.
pub fn generate(k_max: usize) -> DebyeTable {
    DebyeTable::generate(k_max)
}

/// `U_k(t)` from a finished table.
pub fn eval_poly(table: &DebyeTable, k: usize, t: &BigReal) -> Result<BigReal> {
    table.eval_poly(k, t)
}

impl DebyeTable {
    pub fn generate(k_max: usize) -> DebyeTable {
        DebyeTable {
            rows: DebyeRows::new().take(k_max + 1).collect(),
        }
    }

    pub fn k_max(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn row(&self, k: usize) -> Result<&DebyeRow> {
        self.rows.get(k).ok_or(Error::Range {
            k,
            k_max: self.k_max(),
        })
    }

    pub fn rows(&self) -> &[DebyeRow] {
        &self.rows
    }

    pub fn coeffs(&self, k: usize) -> Result<Vec<BigRational>> {
        Ok(self.row(k)?.coeffs())
    }

    pub fn eval_poly(&self, k: usize, t: &BigReal) -> Result<BigReal> {
        Ok(self.row(k)?.eval(t))
    }

    /// `U_0(t) ..= U_{k_max}(t)`.
    pub fn eval_all(&self, t: &BigReal) -> Vec<BigReal> {
        self.rows.iter().map(|r| r.eval(t)).collect()
    }

    /// First order at which the exact leading-coefficient ratio law fails.
    pub fn ratio_law_violation(&self) -> Option<usize> {
        self.rows.windows(2).find_map(|w| {
            let expect = leading_ratio(w[0].k);
            let prev = w[0].leading();
            let got = w[1].leading();
            (got != &prev * &expect).then_some(w[0].k)
        })
    }

    /// Orders `k` (with `m`) where a coefficient of parity opposite to `k`
    /// is nonzero.
    pub fn parity_violations(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for row in &self.rows {
            for (m, c) in row.coeffs.iter().enumerate() {
                if (m + row.k) % 2 == 1 && c.cmp0() != std::cmp::Ordering::Equal {
                    out.push((row.k, m));
                }
            }
        }
        out
    }

    /// Overwrites one coefficient; fault injection for the self-check.
    pub fn corrupt(&mut self, k: usize, m: usize, value: BigRational) {
        self.rows[k].coeffs[m] = value.as_rational().clone();
    }

    /// JSON export: `{"k_max": K, "rows": [["p/q", ...], ...]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.coeffs().iter().map(|c| c.to_string()).collect())
            .collect();
        serde_json::json!({ "k_max": self.k_max(), "rows": rows })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<DebyeTable> {
        let rows = v
            .get("rows")
            .and_then(|r| r.as_array())
            .ok_or_else(|| Error::Parse("missing \"rows\" array".into()))?;
        let mut out = Vec::with_capacity(rows.len());
        for (k, row) in rows.iter().enumerate() {
            let cells = row
                .as_array()
                .ok_or_else(|| Error::Parse(format!("row {k} is not an array")))?;
            if cells.len() != 3 * k + 1 {
                return Err(Error::Parse(format!(
                    "row {k} has {} entries, expected {}",
                    cells.len(),
                    3 * k + 1
                )));
            }
            let coeffs = cells
                .iter()
                .map(|c| {
                    c.as_str()
                        .ok_or_else(|| Error::Parse("coefficient is not a string".into()))
                        .and_then(|s| s.parse::<BigRational>())
                        .map(|q| q.as_rational().clone())
                })
                .collect::<Result<Vec<_>>>()?;
            out.push(DebyeRow { k, coeffs });
        }
        if out.is_empty() {
            return Err(Error::Parse("empty table".into()));
        }
        Ok(DebyeTable { rows: out })
    }
}

/// Leading coefficients `a^k_{3k}` for `k = 0 ..= k_max` via the streaming
/// recurrence.
pub fn leading_coefficients(k_max: usize) -> Vec<BigRational> {
    DebyeRows::new()
        .take(k_max + 1)
        .map(|r| r.leading())
        .collect()
}

/// `C (3/2)^(k-1) (k-1)!` with the empirical `C = 10^4`.
pub fn leading_coeff_asymptote(k: usize, prec: Precision) -> Result<BigReal> {
    leading_coeff_asymptote_with(k, &prec.from_f64(ASYMPTOTE_CONSTANT))
}

/// `C (3/2)^(k-1) (k-1)!` for an arbitrary constant.
pub fn leading_coeff_asymptote_with(k: usize, c: &BigReal) -> Result<BigReal> {
    if k == 0 {
        return Err(Error::Domain("asymptote defined for k >= 1".into()));
    }
    let prec = c.precision();
    let mut fact = Integer::from(1);
    for i in 2..k {
        fact *= i as u64;
    }
    let growth = prec.ratio(3, 2).powi(k as i32 - 1);
    Ok(c * growth.mul_integer(&fact))
}

/// The limit of `|a^k_{3k}| / ((3/2)^(k-1) (k-1)!)` as `k` grows, computed
/// from the exact product form of the ratio law truncated at `terms` factors.
pub fn leading_constant_limit(prec: Precision, terms: usize) -> BigReal {
    // |a^k_{3k}| = (3/2)^k (5/36) prod_{j=1}^{k-1} j (1 + 5/(36 j (j+1)))
    let mut prod = prec.ratio(3, 2) * prec.ratio(5, 36);
    for j in 1..terms as i64 {
        prod = &prod * (prec.one() + prec.ratio(5, 36 * j * (j + 1)));
    }
    prod
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> BigRational {
        BigRational::new(p, d)
    }

    #[test]
    fn first_rows() {
        let t = generate(2);
        assert_eq!(t.coeffs(0).unwrap(), vec![q(1, 1)]);
        assert_eq!(
            t.coeffs(1).unwrap(),
            vec![q(0, 1), q(1, 8), q(0, 1), q(-5, 24)]
        );
        // U_2 = (81 t^2 - 462 t^4 + 385 t^6) / 1152
        assert_eq!(
            t.coeffs(2).unwrap(),
            vec![
                q(0, 1),
                q(0, 1),
                q(81, 1152),
                q(0, 1),
                q(-462, 1152),
                q(0, 1),
                q(385, 1152)
            ]
        );
    }

    #[test]
    fn row_shapes_and_zero_constant() {
        let t = generate(12);
        for k in 0..=12 {
            let row = t.coeffs(k).unwrap();
            assert_eq!(row.len(), 3 * k + 1);
            if k >= 1 {
                assert!(row[0].is_zero());
            }
        }
    }

    #[test]
    fn evaluation() {
        let p = Precision::default();
        let t = generate(3);
        assert_eq!(t.eval_poly(0, &p.from_f64(7.5)).unwrap(), p.one());
        let u1 = t.eval_poly(1, &p.one()).unwrap();
        let expect = p.ratio(-1, 12);
        assert!((&u1 - &expect).abs().log10_abs() < -245.0);
        assert!(matches!(
            t.eval_poly(4, &p.one()),
            Err(Error::Range { k: 4, k_max: 3 })
        ));
    }

    #[test]
    fn streaming_matches_table() {
        let t = generate(9);
        assert_eq!(&debye_row(9), t.row(9).unwrap());
    }

    #[test]
    fn ratio_law_and_parity() {
        let t = generate(50);
        assert_eq!(t.ratio_law_violation(), None);
        assert!(t.parity_violations().is_empty());
    }

    #[test]
    fn corrupted_row_breaks_ratio_law() {
        let mut t = generate(6);
        t.corrupt(4, 12, q(1, 3));
        assert_eq!(t.ratio_law_violation(), Some(3));
    }

    #[test]
    fn json_round_trip() {
        let t = generate(5);
        let back = DebyeTable::from_json(&t.to_json()).unwrap();
        assert_eq!(t, back);
        assert_eq!(t.to_json()["rows"][1][3], "-5/24");
    }

    #[test]
    fn asymptote_requires_positive_order() {
        assert!(leading_coeff_asymptote(0, Precision::default()).is_err());
        let a = leading_coeff_asymptote(3, Precision::default()).unwrap();
        // 10^4 * (3/2)^2 * 2!
        assert_eq!(a.to_f64(), 45_000.0);
    }
}
