//! `J_n(n eps)` three ways: the ascending power series (reference), the
//! leading-order large-`n` asymptotics, and the full Debye expansion
//!
//! ```text
//! J_n(n eps) = rho^n / sqrt(2 pi sqrt(1-eps^2)) * sum_k U_k(1/sqrt(1-eps^2)) / n^(k+1/2)
//! ```
//!
//! whose divergent partial sums are handed to the sequence transformations.

use crate::arith::{BigReal, Precision};
use crate::debye::DebyeTable;
use crate::error::{Error, Result};
use crate::seqxform::{self, TermSequence, TransformKind, TransformTable};

/// `rho = exp(sqrt(1-eps^2)) (1 - sqrt(1-eps^2)) / eps`, for `0 < eps <= 1`.
pub fn rho(eps: &BigReal) -> Result<BigReal> {
    let prec = eps.precision();
    if eps.is_sign_negative() || eps.is_zero() || *eps > prec.one() {
        return Err(Error::Domain(format!(
            "rho needs 0 < eps <= 1, got {}",
            eps.to_sig(12)
        )));
    }
    let root = (prec.one() - eps * eps).sqrt();
    // 1 - sqrt(1-e^2) = e^2 / (1 + sqrt(1-e^2)), free of cancellation
    let gap = eps / (prec.one() + &root);
    Ok(root.exp() * gap)
}

/// `J_n(x)` from the ascending series, summed at extra precision until the
/// terms drop below the working precision relative to the sum.
pub fn jn_reference(n: u32, x: &BigReal) -> Result<BigReal> {
    let prec = x.precision();
    if x.is_sign_negative() {
        return Err(Error::Domain("jn_reference needs x >= 0".into()));
    }
    if x.is_zero() {
        return Ok(if n == 0 { prec.one() } else { prec.zero() });
    }
    // alternating terms peak near exp(x); cover that cancellation
    let guard = (x.to_f64() * std::f64::consts::LOG10_E).ceil() as u32 + 15;
    let work = prec.extended(guard);
    let half = x.at(work).div_int(2);
    let quarter = &half * &half;
    let mut fact = work.one();
    for i in 2..=n as i64 {
        fact = fact.mul_int(i);
    }
    let mut term = half.powi(n as i32) / fact;
    let mut sum = term.clone();
    let floor = -(work.digits() as f64) - 5.0;
    let peak_m = (half.to_f64()) as i64 + 1;
    let mut m: i64 = 0;
    loop {
        m += 1;
        term = -(&term * &quarter).div_int(m * (n as i64 + m));
        sum += &term;
        if m > peak_m && term.log10_abs() - sum.log10_abs() < floor {
            break;
        }
    }
    Ok(sum.at(prec))
}

/// Parameters of one Debye expansion of `J_n(n eps)`.
#[derive(Clone, Debug)]
pub struct DebyeSeriesSpec {
    pub n: u32,
    pub eps: BigReal,
    /// Number of Debye terms, `k = 0 .. k_terms-1`.
    pub k_terms: usize,
}

impl DebyeSeriesSpec {
    pub fn new(n: u32, eps: BigReal, k_terms: usize) -> Result<Self> {
        let spec = DebyeSeriesSpec { n, eps, k_terms };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let one = self.eps.precision().one();
        if self.n == 0 {
            return Err(Error::Domain("Debye expansion needs n >= 1".into()));
        }
        if self.eps.is_sign_negative() || self.eps.is_zero() || self.eps >= one {
            return Err(Error::Domain(format!(
                "Debye expansion needs 0 < eps < 1, got {}",
                self.eps.to_sig(12)
            )));
        }
        if self.k_terms < 2 {
            return Err(Error::Domain("need at least two Debye terms".into()));
        }
        Ok(())
    }

    pub fn precision(&self) -> Precision {
        self.eps.precision()
    }

    /// `y = 1/sqrt(1-eps^2)`, the Debye polynomial argument.
    pub fn debye_argument(&self) -> BigReal {
        let one = self.precision().one();
        (&one - &self.eps * &self.eps).sqrt().recip()
    }

    /// `rho^n / sqrt(2 pi sqrt(1-eps^2))`.
    pub fn prefactor(&self) -> Result<BigReal> {
        let prec = self.precision();
        let root = (prec.one() - &self.eps * &self.eps).sqrt();
        let denom = (prec.pi().mul_int(2) * root).sqrt();
        Ok(rho(&self.eps)?.powi(self.n as i32) / denom)
    }
}

/// Terms `rho^n / sqrt(2 pi sqrt(1-eps^2)) U_k(y) / n^(k+1/2)` for
/// `k = 0 .. k_terms-1`.
pub fn jn_debye_terms(spec: &DebyeSeriesSpec, table: &DebyeTable) -> Result<TermSequence> {
    spec.validate()?;
    if table.k_max() + 1 < spec.k_terms {
        return Err(Error::Range {
            k: spec.k_terms - 1,
            k_max: table.k_max(),
        });
    }
    let prec = spec.precision();
    let y = spec.debye_argument();
    let n = prec.int(spec.n as i64);
    let mut scale = spec.prefactor()? / n.sqrt();
    let mut terms = Vec::with_capacity(spec.k_terms);
    for k in 0..spec.k_terms {
        terms.push(&scale * table.eval_poly(k, &y)?);
        scale = scale / &n;
    }
    TermSequence::from_reals(
        format!("Debye expansion of J_{}({} * {})", spec.n, spec.n, spec.eps.to_sig(10)),
        terms,
    )
}

/// Leading-order asymptotics `rho^n / (sqrt(2 pi sqrt(1-eps^2)) sqrt(n))`.
pub fn jn_asymptotic(n: u32, eps: &BigReal) -> Result<BigReal> {
    let spec = DebyeSeriesSpec::new(n.max(1), eps.clone(), 2)?;
    if n == 0 {
        return Err(Error::Domain("asymptotics need n >= 1".into()));
    }
    Ok(spec.prefactor()? / eps.precision().int(n as i64).sqrt())
}

/// Factorial growth model of the single Debye terms,
/// `rho^n C / sqrt(2 pi n sqrt(1-eps^2)) (3 / (2 n (1-eps^2)^(3/2)))^k k!`
/// (modulus).
pub fn debye_term_growth_law(spec: &DebyeSeriesSpec, k: usize, c: &BigReal) -> Result<BigReal> {
    let prec = spec.precision();
    let n = prec.int(spec.n as i64);
    let one_minus = prec.one() - &spec.eps * &spec.eps;
    let base = prec.int(3) / (n.mul_int(2) * one_minus.sqrt().powi(3));
    let mut fact = prec.one();
    for i in 2..=k as i64 {
        fact = fact.mul_int(i);
    }
    Ok(spec.prefactor()? * c / n.sqrt() * base.powi(k as i32) * fact)
}

/// Resums the Debye expansion with `kind` up to order `k_max`.
pub fn jn_resummed(
    spec: &DebyeSeriesSpec,
    table: &DebyeTable,
    kind: TransformKind,
    k_max: usize,
) -> Result<TransformTable> {
    let mut spec = spec.clone();
    spec.k_terms = spec.k_terms.max(k_max + 2);
    let terms = jn_debye_terms(&spec, table)?;
    seqxform::transform(&terms, kind, k_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::debye::generate;

    fn p() -> Precision {
        Precision::default()
    }

    #[test]
    fn rho_limits() {
        let p = p();
        assert_eq!(rho(&p.one()).unwrap(), p.one());
        let tiny = rho(&p.from_f64(1e-6)).unwrap();
        assert!(tiny.to_f64() < 1e-5 && tiny.to_f64() > 0.0);
        assert!(rho(&p.zero()).is_err());
        assert!(rho(&p.from_f64(1.5)).is_err());
        let r = rho(&p.ratio(9, 10)).unwrap();
        assert!(r.to_f64() > 0.0 && r.to_f64() < 1.0);
    }

    #[test]
    fn reference_values() {
        let p = p();
        assert_eq!(jn_reference(0, &p.zero()).unwrap(), p.one());
        assert!(jn_reference(3, &p.zero()).unwrap().is_zero());
        assert_eq!(jn_reference(10, &p.int(5)).unwrap().to_sig(10), "0.001467802647");
        assert_eq!(jn_reference(10, &p.int(9)).unwrap().to_sig(10), "0.1246940928");
    }

    #[test]
    fn first_debye_term_is_the_asymptotic() {
        let p = p();
        let table = generate(3);
        let spec = DebyeSeriesSpec::new(10, p.ratio(1, 2), 3).unwrap();
        let terms = jn_debye_terms(&spec, &table).unwrap();
        let asym = jn_asymptotic(10, &p.ratio(1, 2)).unwrap();
        assert_eq!(terms.terms()[0].re, asym);
    }

    #[test]
    fn spec_validation() {
        let p = p();
        assert!(DebyeSeriesSpec::new(10, p.one(), 5).is_err());
        assert!(DebyeSeriesSpec::new(0, p.ratio(1, 2), 5).is_err());
        let spec = DebyeSeriesSpec::new(10, p.ratio(1, 2), 8).unwrap();
        assert!(matches!(
            jn_debye_terms(&spec, &generate(4)),
            Err(Error::Range { .. })
        ));
    }
}
