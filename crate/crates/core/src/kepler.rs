//! Kepler's equation `M = psi - eps sin psi`.
//!
//! The reference solver is Newton's method. The series solver resums the
//! Kapteyn series `sum_n 2 J_n(n eps) exp(inM) / n` and reads
//! `psi = M + Im S`. Off the unit circle the same series leads to the
//! complexified equation `log z = Psi - eps sinh Psi`, checked through the
//! identity
//!
//! ```text
//! sum_m z^m J_m(m eps) / m - sum_m z^-m J_m(m eps) / m = Psi - log z.
//! ```
//!
//! Convergence rates are summarized by fitting `exp(-alpha k^nu)` to the
//! relative errors.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{BigComplex, BigReal, Precision};
use crate::error::{Error, Result};
use crate::kapteyn::{kapteyn_bessel_values, kapteyn_terms_from, KapteynConvention};
use crate::seqxform::{self, TransformKind, TransformTable};

const MAX_NEWTON_ITERATIONS: usize = 200;

#[derive(Clone, Debug)]
pub struct KeplerProblem {
    pub eps: BigReal,
    pub m: BigReal,
}

impl KeplerProblem {
    pub fn new(eps: BigReal, m: BigReal) -> Result<Self> {
        let one = eps.precision().one();
        if eps.is_sign_negative() || eps >= one {
            return Err(Error::Domain(format!(
                "Kepler's equation needs 0 <= eps < 1, got {}",
                eps.to_sig(12)
            )));
        }
        if !m.is_finite() {
            return Err(Error::Domain("mean anomaly must be finite".into()));
        }
        Ok(KeplerProblem { eps, m })
    }

    pub fn precision(&self) -> Precision {
        if self.eps.digits() >= self.m.digits() {
            self.eps.precision()
        } else {
            self.m.precision()
        }
    }

    /// `psi - eps sin psi - M`.
    pub fn residual(&self, psi: &BigReal) -> BigReal {
        psi - &self.eps * psi.sin() - &self.m
    }

    /// True when every series term has a vanishing imaginary part.
    pub fn is_degenerate(&self) -> bool {
        let prec = self.precision();
        let floor = -(prec.digits() as f64) + 10.0;
        self.eps.is_zero() || self.m.sin().log10_abs() < floor
    }
}

/// `10^-(digits-10)`, the tightest tolerance a solver accepts.
pub fn finest_tolerance(prec: Precision) -> BigReal {
    prec.pow10(-(prec.digits() as i32) + 10)
}

fn check_tolerance(tol: &BigReal, prec: Precision) -> Result<()> {
    if tol.is_sign_negative() || *tol < finest_tolerance(prec) {
        return Err(Error::Config(format!(
            "tolerance {} is below 10^-{} for {} digits",
            tol.to_sci(3),
            prec.digits() - 10,
            prec.digits()
        )));
    }
    Ok(())
}

/// Newton's method from `psi_0 = M + eps sin M`. Iterates until the
/// residual is below `tol` and the step no longer changes `psi` at working
/// precision.
pub fn solve_newton(p: &KeplerProblem, tol: &BigReal) -> Result<BigReal> {
    let prec = p.precision();
    check_tolerance(tol, prec)?;
    let mut psi = &p.m + &p.eps * p.m.sin();
    let step_floor = -(prec.digits() as f64) + 3.0;
    let mut trace = Vec::new();
    for _ in 0..MAX_NEWTON_ITERATIONS {
        let f = p.residual(&psi);
        let df = prec.one() - &p.eps * psi.cos();
        let step = f / df;
        psi -= &step;
        trace.push(psi.to_sig(20));
        let small_step = step.is_zero() || step.log10_abs() - psi.log10_abs().max(0.0) < step_floor;
        if small_step && p.residual(&psi).abs() < *tol {
            return Ok(psi);
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_NEWTON_ITERATIONS,
        last_residual: p.residual(&psi).abs().to_sci(5),
        trace,
    })
}

/// Transformation estimates of `psi` from the Kapteyn series.
#[derive(Clone, Debug)]
pub struct SeriesSolution {
    pub m: BigReal,
    /// Set when the series vanishes identically (`eps = 0` or
    /// `M = 0 mod pi`); then `psi = M` at every order.
    pub degenerate: bool,
    /// Estimates `M + Im T_k` (real parts) for `k = 1 ..`; absent when
    /// degenerate.
    pub table: Option<TransformTable>,
}

impl SeriesSolution {
    pub fn estimate(&self, k: usize) -> Option<BigReal> {
        match &self.table {
            None => Some(self.m.clone()),
            Some(t) => t.estimate(k).map(|e| e.re.clone()),
        }
    }

    /// Highest-order estimate.
    pub fn best(&self) -> BigReal {
        match &self.table {
            None => self.m.clone(),
            Some(t) => t.last().map(|e| e.re.clone()).unwrap_or_else(|| self.m.clone()),
        }
    }
}

/// `psi` through the resummed Kapteyn series up to order `k_max`.
pub fn solve_series(p: &KeplerProblem, kind: TransformKind, k_max: usize) -> Result<SeriesSolution> {
    if p.is_degenerate() {
        return Ok(SeriesSolution {
            m: p.m.clone(),
            degenerate: true,
            table: None,
        });
    }
    let prec = p.precision();
    let bessel = kapteyn_bessel_values(&p.eps, k_max + 2)?;
    let terms = kapteyn_terms_from(&bessel, &prec.cis(&p.m), KapteynConvention::Fourier)?;
    let table = seqxform::transform(&terms, kind, k_max)?;
    let m = p.m.clone();
    let psi = table.map(|e| BigComplex::from_real(&m + &e.im));
    Ok(SeriesSolution {
        m: p.m.clone(),
        degenerate: false,
        table: Some(psi),
    })
}

/// `|psi_k - psi| / |psi|` for the orders of a series solution.
pub fn relative_errors(sol: &SeriesSolution, exact: &BigReal) -> Vec<(usize, BigReal)> {
    let table = match &sol.table {
        None => return Vec::new(),
        Some(t) => t,
    };
    let scale = exact.abs();
    (1..=table.k_max())
        .map(|k| {
            let e = &table.estimate(k).expect("within k_max").re;
            let err = (e - exact).abs();
            let rel = if scale.is_zero() { err } else { err / &scale };
            (k, rel)
        })
        .collect()
}

/// `log z = Psi - eps sinh Psi`, principal branch of the logarithm.
#[derive(Clone, Debug)]
pub struct ComplexKeplerProblem {
    pub eps: BigReal,
    pub z: BigComplex,
}

impl ComplexKeplerProblem {
    pub fn new(eps: BigReal, z: BigComplex) -> Result<Self> {
        let one = eps.precision().one();
        if eps.is_sign_negative() || eps >= one {
            return Err(Error::Domain(format!(
                "need 0 <= eps < 1, got {}",
                eps.to_sig(12)
            )));
        }
        if z.is_zero() {
            return Err(Error::Domain("z must be nonzero".into()));
        }
        Ok(ComplexKeplerProblem { eps, z })
    }

    pub fn precision(&self) -> Precision {
        self.z.precision()
    }

    pub fn log_z(&self) -> BigComplex {
        self.z.ln()
    }

    /// `Psi - eps sinh Psi - log z`.
    pub fn residual(&self, psi: &BigComplex) -> BigComplex {
        psi - &psi.sinh().scale(&self.eps) - &self.log_z()
    }
}

/// Newton's method from `Psi_0 = log z`.
pub fn solve_complex_newton(p: &ComplexKeplerProblem, tol: &BigReal) -> Result<BigComplex> {
    let prec = p.precision();
    check_tolerance(tol, prec)?;
    let target = p.log_z();
    let mut psi = target.clone();
    let step_floor = -(prec.digits() as f64) + 3.0;
    let mut trace = Vec::new();
    for _ in 0..MAX_NEWTON_ITERATIONS {
        let f = &(&psi - &psi.sinh().scale(&p.eps)) - &target;
        let df = &BigComplex::from_real(prec.one()) - &psi.cosh().scale(&p.eps);
        let step = &f / &df;
        psi -= &step;
        trace.push(psi.to_sig(20));
        let small_step = step.is_zero() || step.log10_abs() - psi.log10_abs().max(0.0) < step_floor;
        if small_step && p.residual(&psi).abs() < *tol {
            return Ok(psi);
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_NEWTON_ITERATIONS,
        last_residual: p.residual(&psi).abs().to_sci(5),
        trace,
    })
}

/// One order of the identity check.
#[derive(Clone, Debug)]
pub struct IdentityRow {
    pub order: usize,
    /// Resummed `sum z^m J_m / m`.
    pub outer: BigComplex,
    /// Resummed `sum z^-m J_m / m`.
    pub inner: BigComplex,
    pub relative_error: BigReal,
}

/// Resums both series of the identity at every order `1..=k_max` and
/// compares their difference with `Psi - log z` from Newton's method.
pub fn complex_identity_check(
    p: &ComplexKeplerProblem,
    kind: TransformKind,
    k_max: usize,
) -> Result<Vec<IdentityRow>> {
    let prec = p.precision();
    if p.eps.is_zero() {
        return Ok((1..=k_max)
            .map(|order| IdentityRow {
                order,
                outer: prec.czero(),
                inner: prec.czero(),
                relative_error: prec.zero(),
            })
            .collect());
    }
    let psi = solve_complex_newton(p, &finest_tolerance(prec))?;
    let exact = &psi - &p.log_z();
    let bessel = kapteyn_bessel_values(&p.eps, k_max + 2)?;
    let outer = kapteyn_terms_from(&bessel, &p.z, KapteynConvention::Generalized)?;
    let inner = kapteyn_terms_from(&bessel, &p.z.recip(), KapteynConvention::Generalized)?;
    let t_out = seqxform::transform(&outer, kind, k_max)?;
    let t_in = seqxform::transform(&inner, kind, k_max)?;
    let scale = exact.abs();
    let orders = t_out.k_max().min(t_in.k_max());
    Ok((1..=orders)
        .map(|k| {
            let a = t_out.estimate(k).expect("within range").clone();
            let b = t_in.estimate(k).expect("within range").clone();
            let err = (&(&a - &b) - &exact).abs();
            let relative_error = if scale.is_zero() { err } else { err / &scale };
            IdentityRow {
                order: k,
                outer: a,
                inner: b,
                relative_error,
            }
        })
        .collect())
}

/// Fit of `e_k = exp(-alpha k^nu)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateFit {
    pub alpha: f64,
    pub nu: f64,
    /// First and last order used.
    pub fit_window: (usize, usize),
    /// Root-mean-square residual of the linearized fit.
    pub residual: f64,
    pub points: usize,
}

/// Orders at or below this are excluded from rate fits.
pub const FIT_MIN_ORDER: usize = 10;
const FIT_MIN_POINTS: usize = 8;

/// Least squares on `log(-log e_k) = log alpha + nu log k` over the points
/// with `k > 10` and `10^-(digits-20) < e_k < 1`.
pub fn fit_rate(errors: &[(usize, BigReal)]) -> Result<RateFit> {
    let usable: Vec<(f64, f64, usize)> = errors
        .iter()
        .filter(|(k, e)| {
            let floor = -(e.digits() as f64) + 20.0;
            *k > FIT_MIN_ORDER
                && !e.is_zero()
                && !e.is_sign_negative()
                && e.log10_abs() < 0.0
                && e.log10_abs() > floor
        })
        .map(|(k, e)| {
            let ln_e = e.log10_abs() * std::f64::consts::LN_10;
            ((*k as f64).ln(), (-ln_e).ln(), *k)
        })
        .collect();
    if usable.len() < FIT_MIN_POINTS {
        return Err(Error::Fit(format!(
            "{} usable points, need at least {FIT_MIN_POINTS}",
            usable.len()
        )));
    }
    let n = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all usable points share one order".into()));
    }
    let nu = sxy / sxx;
    let intercept = my - nu * mx;
    let residual = (usable
        .iter()
        .map(|p| (p.1 - intercept - nu * p.0).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(RateFit {
        alpha: intercept.exp(),
        nu,
        fit_window: (
            usable.iter().map(|p| p.2).min().expect("nonempty"),
            usable.iter().map(|p| p.2).max().expect("nonempty"),
        ),
        residual,
        points: usable.len(),
    })
}

/// Relative errors of the series solution against Newton, orders `1..=k_max`.
pub fn series_error_curve(
    p: &KeplerProblem,
    kind: TransformKind,
    k_max: usize,
) -> Result<Vec<(usize, BigReal)>> {
    let exact = solve_newton(p, &finest_tolerance(p.precision()))?;
    let sol = solve_series(p, kind, k_max)?;
    Ok(relative_errors(&sol, &exact))
}

/// Default cap on the orders examined by [`tail_error_curve`].
pub const DEFAULT_RATE_MAX_ORDER: usize = 640;
const TAIL_START_ORDER: usize = 48;
/// Orders without a new minimum after which the error counts as stalled.
const PLATEAU_ORDERS: usize = 10;

/// The error curve over the whole convergent tail: the order range is
/// doubled (up to `max_order`) until the error reaches the precision floor
/// `10^-(digits-20)` or stops decreasing, and orders past the smallest error
/// are dropped.
pub fn tail_error_curve(
    p: &KeplerProblem,
    kind: TransformKind,
    max_order: usize,
) -> Result<Vec<(usize, BigReal)>> {
    let floor = -(p.precision().digits() as f64) + 20.0;
    let mut k_max = TAIL_START_ORDER.min(max_order);
    loop {
        let curve = series_error_curve(p, kind, k_max)?;
        if curve.is_empty() {
            return Ok(curve);
        }
        let best = curve
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .1.partial_cmp(&b.1 .1).expect("finite errors"))
            .map(|(i, _)| i)
            .expect("nonempty");
        let reached_floor = curve[best].1.is_zero() || curve[best].1.log10_abs() <= floor;
        let stalled = best + PLATEAU_ORDERS < curve.len();
        if reached_floor || stalled || k_max >= max_order {
            let mut curve = curve;
            if stalled {
                curve.truncate(best + 1);
            }
            return Ok(curve);
        }
        k_max = (k_max * 2).min(max_order);
    }
}

/// One cell of a rate scan.
#[derive(Clone, Debug)]
pub struct RateCell {
    pub eps: BigReal,
    pub m: BigReal,
    pub kind: TransformKind,
    /// `None` when the fit could not be made; `note` says why.
    pub fit: Option<RateFit>,
    pub note: Option<String>,
}

/// Fits `nu(eps; M, kind)` over the full grid; each cell uses
/// [`tail_error_curve`] capped at `max_order`.
pub fn rate_scan(
    m_list: &[BigReal],
    eps_grid: &[BigReal],
    kinds: &[TransformKind],
    max_order: usize,
) -> Vec<RateCell> {
    let mut cells = Vec::new();
    for m in m_list {
        for kind in kinds {
            for eps in eps_grid {
                cells.push((m.clone(), *kind, eps.clone()));
            }
        }
    }
    cells
        .into_par_iter()
        .map(|(m, kind, eps)| {
            let result = KeplerProblem::new(eps.clone(), m.clone()).and_then(|p| {
                if p.is_degenerate() {
                    return Err(Error::Fit("degenerate series".into()));
                }
                fit_rate(&tail_error_curve(&p, kind, max_order)?)
            });
            let (fit, note) = match result {
                Ok(f) => (Some(f), None),
                Err(e) => (None, Some(e.to_string())),
            };
            RateCell {
                eps,
                m,
                kind,
                fit,
                note,
            }
        })
        .collect()
}

/// CSV with columns `eps, M, kind, alpha, nu, residual`; missing fits leave
/// the numeric columns empty.
pub fn write_rates_csv<W: Write>(out: W, cells: &[RateCell]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["eps", "M", "kind", "alpha", "nu", "residual"])?;
    for c in cells {
        let (alpha, nu, res) = match &c.fit {
            Some(f) => (
                format!("{:.6e}", f.alpha),
                format!("{:.6}", f.nu),
                format!("{:.3e}", f.residual),
            ),
            None => Default::default(),
        };
        w.write_record([
            c.eps.to_sig(10),
            c.m.to_sig(10),
            c.kind.name().to_string(),
            alpha,
            nu,
            res,
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Precision {
        Precision::default()
    }

    #[test]
    fn zero_eccentricity() {
        let p = p();
        let m = p.ratio(7, 5);
        let prob = KeplerProblem::new(p.zero(), m.clone()).unwrap();
        assert_eq!(solve_newton(&prob, &finest_tolerance(p)).unwrap(), m);
        let sol = solve_series(&prob, TransformKind::LevinD, 10).unwrap();
        assert!(sol.degenerate);
        assert_eq!(sol.best(), m);
    }

    #[test]
    fn newton_reference_value() {
        let p = p();
        let prob = KeplerProblem::new(p.ratio(9, 10), p.pi().div_int(4)).unwrap();
        let psi = solve_newton(&prob, &finest_tolerance(p)).unwrap();
        assert_eq!(psi.to_sig(20), "1.6800337357880455291");
        assert!(prob.residual(&psi).abs().log10_abs() < -230.0);
    }

    #[test]
    fn tolerance_below_precision_is_rejected() {
        let p = p();
        let prob = KeplerProblem::new(p.ratio(1, 2), p.one()).unwrap();
        assert!(matches!(
            solve_newton(&prob, &p.pow10(-245)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn complex_newton_zero_eps() {
        let p = p();
        let z = p.cis(&p.one()).scale(&p.int(3));
        let prob = ComplexKeplerProblem::new(p.zero(), z.clone()).unwrap();
        let psi = solve_complex_newton(&prob, &finest_tolerance(p)).unwrap();
        assert!((&psi - &z.ln()).abs().is_zero());
    }

    #[test]
    fn synthetic_rate_recovery() {
        let p = p();
        let errs: Vec<_> = (1..=40)
            .map(|k| (k, (-(p.int(k as i64).pow(&p.ratio(3, 4)).mul_int(2))).exp()))
            .collect();
        let fit = fit_rate(&errs).unwrap();
        assert!((fit.nu - 0.75).abs() < 1e-6, "{fit:?}");
        assert!((fit.alpha - 2.0).abs() < 1e-5);
        assert_eq!(fit.fit_window, (11, 40));
    }

    #[test]
    fn too_few_fit_points() {
        let p = p();
        let errs: Vec<_> = (1..=15).map(|k| (k, p.pow10(-(k as i32)))).collect();
        assert!(matches!(fit_rate(&errs), Err(Error::Fit(_))));
    }
}
