//! Kapteyn series and the objects built from it.
//!
//! * the complex series `S(eps; z) = sum_{n>=1} c J_n(n eps) z^n / n` with
//!   `c = 2` (Fourier convention, `z = exp(iM)` gives the Kepler solution) or
//!   `c = 1` (generalized convention, arbitrary `z`);
//! * the polylogarithm `L_nu(z) = sum_{n>=1} z^n / n^nu` for `|z| < 1`;
//! * the measure `mu_nu(t) = Gamma(nu, -log t) / Gamma(nu)`;
//! * the generating function
//!   `U(x, y) = sum_k x^(k+1/2) / Gamma(k+3/2) U_k(y)`, its resummation and
//!   the positivity/monotonicity scans over `t = exp(-x)`;
//! * the rearrangement of `S` by Debye order into a series of polylogarithms.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{BigComplex, BigReal, Precision};
use crate::bessel::{jn_reference, rho};
use crate::debye::DebyeTable;
use crate::error::{Error, Result};
use crate::seqxform::{self, TermSequence, TransformKind, TransformTable};

/// Constant factor in front of the Kapteyn terms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KapteynConvention {
    /// `2 J_n(n eps) z^n / n`.
    Fourier,
    /// `J_n(n eps) z^n / n`.
    Generalized,
}

#[derive(Clone, Debug)]
pub struct KapteynParams {
    pub eps: BigReal,
    pub z: BigComplex,
    pub n_terms: usize,
    pub convention: KapteynConvention,
}

impl KapteynParams {
    pub fn new(
        eps: BigReal,
        z: BigComplex,
        n_terms: usize,
        convention: KapteynConvention,
    ) -> Result<Self> {
        let p = KapteynParams {
            eps,
            z,
            n_terms,
            convention,
        };
        p.validate()?;
        Ok(p)
    }

    /// The Kepler case `z = exp(iM)` in the Fourier convention.
    pub fn on_circle(eps: BigReal, m: &BigReal, n_terms: usize) -> Result<Self> {
        let z = m.precision().cis(m);
        Self::new(eps, z, n_terms, KapteynConvention::Fourier)
    }

    pub fn validate(&self) -> Result<()> {
        let one = self.eps.precision().one();
        if self.eps.is_sign_negative() || self.eps >= one {
            return Err(Error::Domain(format!(
                "Kapteyn series needs 0 <= eps < 1, got {}",
                self.eps.to_sig(12)
            )));
        }
        if self.n_terms < 2 {
            return Err(Error::Domain("need at least two Kapteyn terms".into()));
        }
        Ok(())
    }
}

/// `J_n(n eps)` for `n = 1..=count`, computed in parallel.
pub fn kapteyn_bessel_values(eps: &BigReal, count: usize) -> Result<Vec<BigReal>> {
    (1..=count as u32)
        .into_par_iter()
        .map(|n| jn_reference(n, &eps.mul_int(n as i64)))
        .collect()
}

/// Terms for `n = 1 ..= n_terms`, stored from index 0.
pub fn kapteyn_terms(p: &KapteynParams) -> Result<TermSequence> {
    p.validate()?;
    let bessel = kapteyn_bessel_values(&p.eps, p.n_terms)?;
    kapteyn_terms_from(&bessel, &p.z, p.convention)
}

/// Kapteyn terms from precomputed `J_n(n eps)`, `bessel[n-1]`.
pub fn kapteyn_terms_from(
    bessel: &[BigReal],
    z: &BigComplex,
    convention: KapteynConvention,
) -> Result<TermSequence> {
    let factor = match convention {
        KapteynConvention::Fourier => 2,
        KapteynConvention::Generalized => 1,
    };
    let mut zn = z.clone();
    let mut terms = Vec::with_capacity(bessel.len());
    for (i, j) in bessel.iter().enumerate() {
        let n = i as i64 + 1;
        terms.push(zn.scale(&j.mul_int(factor).div_int(n)));
        zn = &zn * z;
    }
    TermSequence::new(
        format!("Kapteyn series ({convention:?}) at z = {}", z.to_sig(10)),
        terms,
    )
}

/// Resums the Kapteyn series with `kind` to order `k_max`.
pub fn kapteyn_resummed(
    p: &KapteynParams,
    kind: TransformKind,
    k_max: usize,
) -> Result<TransformTable> {
    let mut p = p.clone();
    p.n_terms = p.n_terms.max(k_max + 2);
    seqxform::transform(&kapteyn_terms(&p)?, kind, k_max)
}

/// Number of terms after which the polylog tail is below `10^-digits`.
fn polylog_cutoff(nu: f64, modulus: f64, digits: u32) -> usize {
    let target = -(digits as f64 + 5.0) * std::f64::consts::LN_10;
    let ln_r = modulus.ln();
    let ln_gap = (1.0 - modulus).ln();
    let mut n: usize = 1;
    loop {
        let m = (n + 1) as f64;
        if m * ln_r - nu * m.ln() - ln_gap < target {
            return n;
        }
        n += 1;
    }
}

fn check_polylog_args(nu: &BigReal, z: &BigComplex) -> Result<f64> {
    if nu.is_sign_negative() || nu.is_zero() {
        return Err(Error::Domain("polylog needs nu > 0".into()));
    }
    let modulus = z.abs();
    if modulus >= z.precision().one() {
        return Err(Error::Domain(format!(
            "polylog needs |z| < 1, got |z| = {}",
            modulus.to_sig(12)
        )));
    }
    Ok(modulus.to_f64())
}

/// `L_nu(z) = sum_{n>=1} z^n / n^nu` for `|z| < 1` by direct summation.
pub fn polylog(nu: &BigReal, z: &BigComplex) -> Result<BigComplex> {
    Ok(polylog_ladder(nu, z, 1)?.pop().expect("one value"))
}

/// `L_{nu + k}(z)` for `k = 0 .. count-1`, sharing the powers `z^n n^-nu`.
pub fn polylog_ladder(nu: &BigReal, z: &BigComplex, count: usize) -> Result<Vec<BigComplex>> {
    let prec = z.precision();
    let modulus = check_polylog_args(nu, z)?;
    if z.is_zero() || count == 0 {
        return Ok(vec![prec.czero(); count]);
    }
    let work = prec.extended(10);
    let cutoff = polylog_cutoff(nu.to_f64(), modulus, prec.digits());
    let z = z.at(work);
    let nu = nu.at(work);
    let mut weights = Vec::with_capacity(cutoff);
    let mut zn = z.clone();
    for n in 1..=cutoff as i64 {
        let scale = (-(&nu * work.int(n).ln())).exp();
        weights.push(zn.scale(&scale));
        zn = &zn * &z;
    }
    let mut out = Vec::with_capacity(count);
    for k in 0..count {
        if k > 0 {
            for (i, w) in weights.iter_mut().enumerate() {
                *w = w.div_int(i as i64 + 1);
            }
        }
        let mut acc = work.czero();
        for w in weights.iter().rev() {
            acc += w;
        }
        out.push(acc.at(prec));
    }
    Ok(out)
}

/// Regularized upper incomplete gamma `Q(nu, x) = Gamma(nu, x) / Gamma(nu)`.
///
/// Continued fraction for `x > nu + 1`, otherwise `1 - P(nu, x)` from the
/// lower series.
pub fn gamma_q(nu: &BigReal, x: &BigReal) -> Result<BigReal> {
    let prec = if nu.digits() >= x.digits() {
        nu.precision()
    } else {
        x.precision()
    };
    if nu.is_sign_negative() || nu.is_zero() {
        return Err(Error::Domain("incomplete gamma needs nu > 0".into()));
    }
    if x.is_sign_negative() {
        return Err(Error::Domain("incomplete gamma needs x >= 0".into()));
    }
    if x.is_zero() {
        return Ok(prec.one());
    }
    let work = prec.extended(15);
    let nu = nu.at(work);
    let x = x.at(work);
    let threshold = &nu + work.one();
    let q = if x > threshold {
        upper_gamma_cf(&nu, &x, work)
    } else {
        work.one() - lower_gamma_series(&nu, &x, work)
    };
    Ok(q.at(prec))
}

/// `P(nu, x)` from `x^nu e^-x / Gamma(nu+1) sum_n x^n / (nu+1)_n`.
fn lower_gamma_series(nu: &BigReal, x: &BigReal, work: Precision) -> BigReal {
    let floor = -(work.digits() as f64);
    let mut term = work.one();
    let mut sum = work.one();
    let mut a = nu.clone();
    loop {
        a += &work.one();
        term = &term * x / &a;
        sum += &term;
        if term.log10_abs() - sum.log10_abs() < floor {
            break;
        }
    }
    let lead = (nu * x.ln() - x).exp() / (nu + work.one()).gamma();
    lead * sum
}

/// `Q(nu, x)` by the modified Lentz evaluation of the Legendre continued
/// fraction.
fn upper_gamma_cf(nu: &BigReal, x: &BigReal, work: Precision) -> BigReal {
    let tiny = work.pow10(-(work.digits() as i32) * 2);
    let one = work.one();
    let tol = work.pow10(-(work.digits() as i32) + 2);
    let mut b = x + &one - nu;
    let mut c = one.clone() / &tiny;
    let mut d = b.recip();
    let mut h = d.clone();
    let mut i: i64 = 1;
    loop {
        let an = -(work.int(i) * (work.int(i) - nu));
        b += &work.int(2);
        d = &an * &d + &b;
        if d.abs() < tiny {
            d = tiny.clone();
        }
        c = &b + &an / &c;
        if c.abs() < tiny {
            c = tiny.clone();
        }
        d = d.recip();
        let delta = &d * &c;
        h *= &delta;
        if (delta - &one).abs() < tol {
            break;
        }
        i += 1;
    }
    (nu * x.ln() - x).exp() * h / nu.gamma()
}

/// `mu_nu(t) = Gamma(nu, -log t) / Gamma(nu)` for `0 < t <= 1`.
pub fn stieltjes_measure(nu: &BigReal, t: &BigReal) -> Result<BigReal> {
    let one = t.precision().one();
    if t.is_sign_negative() || t.is_zero() || *t > one {
        return Err(Error::Domain(format!(
            "measure needs 0 < t <= 1, got {}",
            t.to_sig(12)
        )));
    }
    if *t == one {
        return Ok(one);
    }
    gamma_q(nu, &-t.ln())
}

/// Arguments of the generating function `U(x, y)`.
#[derive(Clone, Debug)]
pub struct UQuery {
    pub x: BigReal,
    pub y: BigReal,
    pub k_max: usize,
}

impl UQuery {
    pub fn new(x: BigReal, y: BigReal, k_max: usize) -> Result<Self> {
        let q = UQuery { x, y, k_max };
        q.validate()?;
        Ok(q)
    }

    /// `x = -log t`, `y = 1/sqrt(1-eps^2)`.
    pub fn from_t_eps(t: &BigReal, eps: &BigReal, k_max: usize) -> Result<Self> {
        let prec = t.precision();
        if t.is_sign_negative() || t.is_zero() || *t > prec.one() {
            return Err(Error::Domain(format!("need 0 < t <= 1, got {}", t.to_sig(12))));
        }
        if eps.is_sign_negative() || eps.is_zero() || *eps >= prec.one() {
            return Err(Error::Domain(format!("need 0 < eps < 1, got {}", eps.to_sig(12))));
        }
        Self::new(-t.ln(), debye_argument(eps), k_max)
    }

    pub fn validate(&self) -> Result<()> {
        if self.x.is_sign_negative() {
            return Err(Error::Domain("U(x, y) needs x >= 0".into()));
        }
        if self.y <= self.y.precision().one() {
            return Err(Error::Domain("U(x, y) needs y > 1".into()));
        }
        Ok(())
    }
}

/// `1/sqrt(1-eps^2)`.
pub fn debye_argument(eps: &BigReal) -> BigReal {
    (eps.precision().one() - eps * eps).sqrt().recip()
}

/// `U_k(y)` for `k = 0 ..= k_max`.
pub fn debye_values(table: &DebyeTable, y: &BigReal, k_max: usize) -> Result<Vec<BigReal>> {
    (0..=k_max).map(|k| table.eval_poly(k, y)).collect()
}

/// Terms `x^(k+1/2) / Gamma(k+3/2) U_k(y)` for `k = 0 ..= k_max + 1`.
pub fn u_terms(q: &UQuery, table: &DebyeTable) -> Result<TermSequence> {
    q.validate()?;
    let count = q.k_max + 2;
    if table.k_max() + 1 < count {
        return Err(Error::Range {
            k: count - 1,
            k_max: table.k_max(),
        });
    }
    let values = debye_values(table, &q.y, count - 1)?;
    u_terms_from(&q.x, &values)
}

/// `U` terms from precomputed `U_k(y)`.
pub fn u_terms_from(x: &BigReal, debye: &[BigReal]) -> Result<TermSequence> {
    let prec = x.precision();
    let mut terms = Vec::with_capacity(debye.len());
    if x.is_zero() {
        terms.resize(debye.len(), prec.zero());
    } else {
        // x^(1/2) / Gamma(3/2), then multiply by x / (k + 3/2)
        let mut scale = x.sqrt() / (prec.pi().sqrt().div_int(2));
        for (k, u) in debye.iter().enumerate() {
            terms.push(&scale * u);
            let next = (2 * k as i64 + 3) as i64;
            scale = (&scale * x).mul_int(2).div_int(next);
        }
    }
    TermSequence::from_reals("generating function U(x, y)", terms)
}

/// Resums `U(x, y)` with `kind` to order `q.k_max`.
pub fn u_resummed(q: &UQuery, table: &DebyeTable, kind: TransformKind) -> Result<TransformTable> {
    seqxform::transform(&u_terms(q, table)?, kind, q.k_max)
}

/// `t_i = i / n` for `i = 1 ..= n`.
pub fn uniform_t_grid(n: usize, prec: Precision) -> Vec<BigReal> {
    (1..=n as i64).map(|i| prec.ratio(i, n as i64)).collect()
}

/// One point of a `U(-log t, y)` scan.
#[derive(Clone, Debug)]
pub struct ScanPoint {
    pub t: BigReal,
    pub x: BigReal,
    /// Resummed value, absent when the transformation failed at this point.
    pub value: Option<BigReal>,
    pub error: Option<String>,
}

/// Resummed `U(-log t, 1/sqrt(1-eps^2))` at order `order` over `t_grid`.
/// Failures at single points are recorded and the scan continues.
pub fn stieltjes_scan(
    eps: &BigReal,
    t_grid: &[BigReal],
    order: usize,
    kind: TransformKind,
    table: &DebyeTable,
) -> Result<Vec<ScanPoint>> {
    let prec = eps.precision();
    if eps.is_sign_negative() || eps.is_zero() || *eps >= prec.one() {
        return Err(Error::Domain(format!("need 0 < eps < 1, got {}", eps.to_sig(12))));
    }
    if table.k_max() < order + 1 {
        return Err(Error::Range {
            k: order + 1,
            k_max: table.k_max(),
        });
    }
    let y = debye_argument(eps);
    let debye = debye_values(table, &y, order + 1)?;
    let points = t_grid
        .par_iter()
        .map(|t| scan_point(t, &debye, order, kind))
        .collect();
    Ok(points)
}

fn scan_point(t: &BigReal, debye: &[BigReal], order: usize, kind: TransformKind) -> ScanPoint {
    let prec = t.precision();
    let fail = |x: BigReal, msg: String| ScanPoint {
        t: t.clone(),
        x,
        value: None,
        error: Some(msg),
    };
    if t.is_sign_negative() || t.is_zero() || *t > prec.one() {
        return fail(prec.zero(), format!("t = {} outside (0, 1]", t.to_sig(12)));
    }
    let x = -t.ln();
    if x.is_zero() {
        return ScanPoint {
            t: t.clone(),
            x,
            value: Some(prec.zero()),
            error: None,
        };
    }
    let result = u_terms_from(&x, debye).and_then(|terms| seqxform::transform(&terms, kind, order));
    match result {
        Ok(tab) => match tab.estimate(order) {
            Some(e) => ScanPoint {
                t: t.clone(),
                x,
                value: Some(e.re.clone()),
                error: None,
            },
            None => fail(x, format!("transformation stopped: {:?}", tab.stop)),
        },
        Err(e) => fail(x, e.to_string()),
    }
}

/// CSV with columns `t, x, u_value, order, eps`; failed points have an
/// empty value.
pub fn write_scan_csv<W: Write>(
    out: W,
    points: &[ScanPoint],
    eps: &BigReal,
    order: usize,
    digits: usize,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "x", "u_value", "order", "eps"])?;
    for p in points {
        w.write_record([
            p.t.to_sci(digits),
            p.x.to_sci(digits),
            p.value.as_ref().map(|v| v.to_sci(digits)).unwrap_or_default(),
            order.to_string(),
            eps.to_sci(digits),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Terms `sqrt(2/(pi sqrt(1-eps^2))) U_k(y) L_{k+3/2}(rho e^{iM})` for
/// `k = 0 ..= k_max + 1`: the Kapteyn series regrouped by Debye order.
pub fn polylog_series_terms(
    eps: &BigReal,
    m: &BigReal,
    k_max: usize,
    table: &DebyeTable,
) -> Result<TermSequence> {
    let prec = eps.precision();
    if eps.is_sign_negative() || eps.is_zero() || *eps >= prec.one() {
        return Err(Error::Domain(format!("need 0 < eps < 1, got {}", eps.to_sig(12))));
    }
    let count = k_max + 2;
    if table.k_max() + 1 < count {
        return Err(Error::Range {
            k: count - 1,
            k_max: table.k_max(),
        });
    }
    let y = debye_argument(eps);
    let root = (prec.one() - eps * eps).sqrt();
    let lead = (prec.int(2) / (prec.pi() * root)).sqrt();
    let z = prec.cis(m).scale(&rho(eps)?);
    let polys = polylog_ladder(&prec.ratio(3, 2), &z, count)?;
    let debye = debye_values(table, &y, count - 1)?;
    let terms = polys
        .iter()
        .zip(&debye)
        .map(|(l, u)| l.scale(&(&lead * u)))
        .collect();
    TermSequence::new("Kapteyn series regrouped by Debye order", terms)
}

/// `S(eps; M)` resummed over the Debye order; the estimate at `k_max`.
pub fn s_via_polylog(
    eps: &BigReal,
    m: &BigReal,
    k_max: usize,
    kind: TransformKind,
    table: &DebyeTable,
) -> Result<BigComplex> {
    let terms = polylog_series_terms(eps, m, k_max, table)?;
    let tab = seqxform::transform(&terms, kind, k_max)?;
    tab.estimate(k_max).cloned().ok_or_else(|| {
        Error::Domain(format!("transformation stopped early: {:?}", tab.stop))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::debye::generate;

    fn p() -> Precision {
        Precision::default()
    }

    #[test]
    fn zero_eccentricity_gives_zero_terms() {
        let p = p();
        let params = KapteynParams::on_circle(p.zero(), &p.ratio(1, 3), 5).unwrap();
        assert!(kapteyn_terms(&params).unwrap().is_identically_zero());
    }

    #[test]
    fn first_fourier_term() {
        // 2 J_1(eps) exp(iM)
        let p = p();
        let eps = p.ratio(9, 10);
        let m = p.pi().div_int(4);
        let params = KapteynParams::on_circle(eps.clone(), &m, 3).unwrap();
        let terms = kapteyn_terms(&params).unwrap();
        let a0 = &terms.terms()[0];
        let j1 = jn_reference(1, &eps).unwrap();
        let expect = j1.mul_int(2) * m.sin();
        assert!((&a0.im - &expect).abs().log10_abs() < -240.0);
    }

    #[test]
    fn polylog_simple_values() {
        let p = p();
        assert!(polylog(&p.int(1), &p.czero()).unwrap().is_zero());
        let l = polylog(&p.int(1), &BigComplex::from_real(p.ratio(1, 2))).unwrap();
        assert!((&l.re - &p.int(2).ln()).abs().log10_abs() < -240.0);
        assert!(polylog(&p.int(1), &BigComplex::from_real(p.one())).is_err());
    }

    #[test]
    fn polylog_ladder_matches_single_calls() {
        let p = p();
        let z = p.cis(&p.ratio(1, 3)).scale(&p.ratio(3, 5));
        let ladder = polylog_ladder(&p.ratio(3, 2), &z, 3).unwrap();
        let single = polylog(&p.ratio(7, 2), &z).unwrap();
        assert!((&ladder[2] - &single).abs().log10_abs() < -240.0);
    }

    #[test]
    fn measure_endpoints() {
        let p = p();
        let nu = p.ratio(3, 2);
        assert_eq!(stieltjes_measure(&nu, &p.one()).unwrap(), p.one());
        let small = stieltjes_measure(&nu, &p.pow10(-30)).unwrap();
        assert!(small.to_f64() < 1e-28);
        assert!(stieltjes_measure(&nu, &p.zero()).is_err());
    }

    #[test]
    fn incomplete_gamma_integer_order() {
        // Q(1, x) = exp(-x), Q(2, x) = (1 + x) exp(-x), on both branches
        let p = p();
        for x in [p.ratio(1, 2), p.int(7)] {
            let q1 = gamma_q(&p.one(), &x).unwrap();
            assert!((&q1 - &(-&x).exp()).abs().log10_abs() < -240.0);
            let q2 = gamma_q(&p.int(2), &x).unwrap();
            let expect = (p.one() + &x) * (-&x).exp();
            assert!((&q2 - &expect).abs().log10_abs() < -240.0);
        }
    }

    #[test]
    fn u_terms_vanish_at_origin() {
        let p = p();
        let table = generate(5);
        let q = UQuery::new(p.zero(), p.int(2), 3).unwrap();
        assert!(u_terms(&q, &table).unwrap().is_identically_zero());
        assert!(UQuery::new(p.one(), p.one(), 3).is_err());
    }

    #[test]
    fn u_first_term() {
        // x^(1/2) / Gamma(3/2)
        let p = p();
        let table = generate(3);
        let q = UQuery::new(p.int(2).ln(), p.int(3), 1).unwrap();
        let t = u_terms(&q, &table).unwrap();
        let expect = q.x.sqrt() / p.ratio(3, 2).gamma().at(p);
        assert!((&t.terms()[0].re - &expect).abs().log10_abs() < -240.0);
    }

    #[test]
    fn scan_at_t_one_is_zero() {
        let p = p();
        let table = generate(8);
        let pts =
            stieltjes_scan(&p.ratio(1, 2), &[p.one()], 6, TransformKind::LevinD, &table).unwrap();
        assert!(pts[0].value.as_ref().unwrap().is_zero());
    }
}
