//! Independent reference computations used to validate the production
//! paths: quadrature of integral representations, the derivative-plus-integral
//! form of the Debye recurrence, and bisection for the real restriction of
//! the complexified Kepler equation.
//!
//! Each routine shares no code with the path it checks beyond elementary
//! arithmetic.

use rug::Rational;

use crate::arith::{BigComplex, BigRational, BigReal};
use crate::error::{Error, Result};

/// `L_nu(z)` from `z / Gamma(nu) int_0^inf t^(nu-1) / (e^t - z) dt` with
/// `t = u^2`, summed by the trapezoid rule on the whole line.
///
/// Restricted to half-integer `nu = j + 1/2`, where the transformed integrand
/// `2 u^(2j) / (e^(u^2) - z)` is even and analytic, so the rule converges
/// geometrically. The step is set from the distance of the nearest pole
/// `u^2 = log z + 2 pi i m` to the real axis.
pub fn polylog_quadrature(nu: &BigReal, z: &BigComplex) -> Result<BigComplex> {
    let prec = z.precision();
    let twice = nu.mul_int(2);
    let j = match twice.to_integer() {
        Some(n) if n.is_odd() && n > 0 => (n.to_i64().expect("small order") - 1) / 2,
        _ => {
            return Err(Error::Domain(format!(
                "quadrature oracle needs half-integer nu > 0, got {}",
                nu.to_sig(12)
            )))
        }
    };
    if z.abs() >= prec.one() || z.is_zero() {
        return Err(Error::Domain("quadrature oracle needs 0 < |z| < 1".into()));
    }
    let work = prec.extended(10);
    let zw = z.at(work);
    let target = (work.digits() as f64 + 5.0) * std::f64::consts::LN_10;

    // distance of the nearest pole from the real u axis
    let lz = zw.ln();
    let (lr, li) = (lz.re.to_f64(), lz.im.to_f64());
    let mut dist = f64::INFINITY;
    for m in -4..=4 {
        let wi = li + 2.0 * std::f64::consts::PI * m as f64;
        let modulus = lr.hypot(wi);
        let im = ((modulus - lr) / 2.0).max(0.0).sqrt();
        dist = dist.min(im);
    }
    let h = 2.0 * std::f64::consts::PI * dist / target;
    // Gaussian tail: u^2 - 2j ln u beyond the target
    let mut u_max = target.sqrt() + 1.0;
    while u_max * u_max - 2.0 * j as f64 * u_max.ln() < target {
        u_max += 1.0;
    }
    let steps = (u_max / h).ceil() as i64;
    let hw = work.from_f64(h);

    let one = BigComplex::from_real(work.one());
    let integrand = |u: &BigReal| -> BigComplex {
        let denom = &BigComplex::from_real((u * u).exp()) - &zw;
        let numer = u.powi(2 * j as i32).mul_int(2);
        (&one / &denom).scale(&numer)
    };
    let mut sum = integrand(&work.zero()).div_int(2);
    for i in 1..=steps {
        let u = hw.mul_int(i);
        sum += &integrand(&u);
    }
    let integral = sum.scale(&hw);
    let nuw = nu.at(work);
    let value = &(&zw * &integral) / &BigComplex::from_real(nuw.gamma());
    Ok(value.at(prec))
}

/// Regularized `Q(nu, x) = Gamma(nu)^-1 int_0^inf (x + s)^(nu-1) e^-(x+s) ds`
/// by the double-exponential (exp-sinh) trapezoid rule
/// `s = exp(pi/2 sinh tau)`.
pub fn gamma_q_quadrature(nu: &BigReal, x: &BigReal) -> Result<BigReal> {
    let prec = if nu.digits() >= x.digits() {
        nu.precision()
    } else {
        x.precision()
    };
    if nu.is_sign_negative() || nu.is_zero() || x.is_sign_negative() {
        return Err(Error::Domain("quadrature oracle needs nu > 0, x >= 0".into()));
    }
    if x.is_zero() && nu.to_f64() < 1.0 {
        // (x+s)^(nu-1) is singular at the endpoint; the rule still copes but
        // the oracle is only asked for x > 0.
        return Err(Error::Domain("quadrature oracle needs x > 0 when nu < 1".into()));
    }
    let work = prec.extended(15);
    let (nuw, xw) = (nu.at(work), x.at(work));
    let half_pi = work.pi().div_int(2);
    let nu_minus = &nuw - work.one();
    let floor = -(work.digits() as f64) - 10.0;
    // h = 2^-level; finer levels until the estimate stops changing
    let point = |tau: &BigReal| -> BigReal {
        let s = (&half_pi * tau.sinh()).exp();
        let jac = &half_pi * tau.cosh() * &s;
        let base = &xw + &s;
        (&nu_minus * base.ln() - &base).exp() * jac
    };
    let level_sum = |h: &BigReal, offset: bool| -> BigReal {
        // offset = true sums the odd multiples of h only
        let mut total = work.zero();
        let mut scale = 0.0f64;
        for dir in [1i64, -1] {
            let mut i: i64 = if offset { 1 } else if dir == 1 { 0 } else { 1 };
            loop {
                let tau = h.mul_int(dir * i);
                let f = point(&tau);
                if !f.is_zero() {
                    scale = scale.max(f.log10_abs());
                }
                let small = f.is_zero() || f.log10_abs() - scale < floor;
                total += &f;
                if small && i > 8 {
                    break;
                }
                i += if offset { 2 } else { 1 };
            }
        }
        total
    };
    let mut h = work.ratio(1, 4);
    let mut sum = level_sum(&h, false);
    let mut estimate = &sum * &h;
    for _ in 0..12 {
        h = h.div_int(2);
        sum += &level_sum(&h, true);
        let next = &sum * &h;
        let change = (&next - &estimate).abs();
        estimate = next;
        if change.is_zero() || change.log10_abs() - estimate.log10_abs() < -(prec.digits() as f64) - 5.0 {
            return Ok((estimate / nuw.gamma()).at(prec));
        }
    }
    Err(Error::NoConvergence {
        iterations: 12,
        last_residual: "quadrature refinement did not settle".into(),
        trace: Vec::new(),
    })
}

/// Derivative of a polynomial given in ascending powers.
fn poly_derivative(c: &[Rational]) -> Vec<Rational> {
    c.iter()
        .enumerate()
        .skip(1)
        .map(|(m, a)| Rational::from(a * m as u64))
        .collect()
}

fn poly_add(a: &mut Vec<Rational>, b: &[Rational]) {
    if a.len() < b.len() {
        a.resize(b.len(), Rational::new());
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

/// `U_0 .. U_k` from `U_{k+1} = t^2 (1-t^2)/2 U_k' + 1/8 int_0^t (1-5s^2) U_k(s) ds`
/// by exact symbolic differentiation and integration of polynomials.
pub fn debye_by_integration(k_max: usize) -> Vec<Vec<BigRational>> {
    let mut rows: Vec<Vec<Rational>> = vec![vec![Rational::from(1)]];
    for _ in 0..k_max {
        let u = rows.last().expect("nonempty");
        let du = poly_derivative(u);
        // t^2 (1 - t^2) / 2 * U'
        let mut next = vec![Rational::new(); u.len() + 3];
        for (m, a) in du.iter().enumerate() {
            next[m + 2] += Rational::from(a / 2u32);
            next[m + 4] -= Rational::from(a / 2u32);
        }
        // (1 - 5 s^2) U, then integrate from 0 and divide by 8
        let mut integrand = vec![Rational::new(); u.len() + 2];
        for (m, a) in u.iter().enumerate() {
            integrand[m] += a;
            integrand[m + 2] -= Rational::from(a * 5u32);
        }
        let mut integral = vec![Rational::new(); integrand.len() + 1];
        for (m, a) in integrand.iter().enumerate() {
            integral[m + 1] = Rational::from(a / (8 * (m as u64 + 1)));
        }
        poly_add(&mut next, &integral);
        while next.len() > 1 && next.last().map_or(false, |c| *c == 0) {
            next.pop();
        }
        rows.push(next);
    }
    rows.into_iter()
        .map(|r| r.into_iter().map(BigRational::from).collect())
        .collect()
}

/// Real `Psi` with `Psi - eps sinh Psi = log z` for real `0 < z < 1`, by
/// bisection on the branch through the origin where the left side is
/// increasing.
pub fn hyperbolic_kepler_bisection(eps: &BigReal, z: &BigReal) -> Result<BigReal> {
    let prec = z.precision();
    let one = prec.one();
    if z.is_sign_negative() || z.is_zero() || *z >= one {
        return Err(Error::Domain("bisection oracle needs 0 < z < 1".into()));
    }
    if eps.is_sign_negative() || *eps >= one {
        return Err(Error::Domain("bisection oracle needs 0 <= eps < 1".into()));
    }
    let target = z.ln();
    let f = |psi: &BigReal| psi - &(eps * psi.sinh()) - &target;
    // increasing branch: 1 - eps cosh(psi) > 0, i.e. |psi| < acosh(1/eps)
    let edge = if eps.is_zero() {
        f64::INFINITY
    } else {
        (1.0 / eps.to_f64()).acosh()
    };
    let mut lo = target.clone();
    let mut hi = prec.zero();
    let mut width = 1.0;
    while !f(&lo).is_sign_negative() {
        lo = &target - prec.from_f64(width);
        width *= 2.0;
        if -lo.to_f64() > edge {
            return Err(Error::Domain(
                "no root on the increasing branch; eps too large for this z".into(),
            ));
        }
    }
    for _ in 0..(prec.bits() + 20) {
        let mid = (&lo + &hi).div_int(2);
        if f(&mid).is_sign_negative() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo + hi).div_int(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Precision;
    use crate::debye::generate;

    #[test]
    fn integration_matches_recurrence_for_small_k() {
        let by_int = debye_by_integration(5);
        let table = generate(5);
        for (k, row) in by_int.iter().enumerate() {
            assert_eq!(row, &table.coeffs(k).unwrap(), "k = {k}");
        }
    }

    #[test]
    fn geometric_polylog() {
        // L_{1/2} has no closed form, but nu = 1/2 at small z is dominated by z
        let p = Precision::new(60).unwrap();
        let z = p.complex(0.3, 0.2);
        let q = polylog_quadrature(&p.ratio(3, 2), &z).unwrap();
        let s = crate::kapteyn::polylog(&p.ratio(3, 2), &z).unwrap();
        assert!((&q - &s).abs().log10_abs() < -40.0);
    }

    #[test]
    fn gamma_q_exponential_case() {
        // Q(1, x) = e^-x
        let p = Precision::new(60).unwrap();
        let x = p.ratio(7, 3);
        let q = gamma_q_quadrature(&p.one(), &x).unwrap();
        assert!((&q - &(-&x).exp()).abs().log10_abs() < -50.0);
    }

    #[test]
    fn bisection_without_eccentricity_is_log() {
        let p = Precision::new(60).unwrap();
        let z = p.ratio(1, 3);
        let psi = hyperbolic_kepler_bisection(&p.zero(), &z).unwrap();
        assert!((&psi - &z.ln()).abs().log10_abs() < -55.0);
    }
}
