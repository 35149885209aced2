//! The invariant suite of every module at reduced scale.
//!
//! Each invariant yields a [`Status`]; a run passes when nothing fails.
//! Warnings flag expected losses, such as cancellation cutting a
//! high-order transformation short at low precision.

use std::fmt;

use serde::Serialize;

use crate::arith::{BigComplex, BigRational, BigReal, Precision};
use crate::bessel::{jn_reference, jn_resummed, rho, DebyeSeriesSpec};
use crate::debye::{self, DebyeTable};
use crate::error::Result;
use crate::kapteyn::{
    gamma_q, kapteyn_terms, polylog, stieltjes_measure, stieltjes_scan, u_resummed,
    uniform_t_grid, KapteynParams, UQuery,
};
use crate::kepler::{
    finest_tolerance, solve_complex_newton, solve_newton, solve_series, ComplexKeplerProblem,
    KeplerProblem,
};
use crate::oracle;
use crate::repro::{scan_min, scan_monotonicity_violation};
use crate::seqxform::{
    partial_sums, transform, transform_with, transform_with_remainders, RemainderEstimate,
    TableStop, TermSequence, TransformKind,
};

/// Settings of a self-check run.
#[derive(Clone, Copy, Debug, Default)]
pub struct SelfcheckConfig {
    pub precision: Precision,
    /// Fault injection: perturb the coefficient `a^k_m` of the Debye table
    /// before the Debye invariants run.
    pub corrupt_debye: Option<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Warning,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Warning => "WARN",
            Status::Fail => "FAIL",
        })
    }
}

/// Outcome of one invariant.
#[derive(Clone, Debug, Serialize)]
pub struct InvariantResult {
    pub module: &'static str,
    pub invariant: &'static str,
    pub status: Status,
    pub observed: String,
    pub expected: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelfcheckReport {
    pub precision_digits: u32,
    pub results: Vec<InvariantResult>,
}

impl SelfcheckReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &InvariantResult> {
        self.results.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn find(&self, invariant: &str) -> Option<&InvariantResult> {
        self.results.iter().find(|r| r.invariant == invariant)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for r in &self.results {
            s.push_str(&format!(
                "[{}] {}/{}: observed {}, expected {}\n",
                r.status, r.module, r.invariant, r.observed, r.expected
            ));
        }
        let count = |st: Status| self.results.iter().filter(|r| r.status == st).count();
        s.push_str(&format!(
            "selfcheck at {} digits: {} passed, {} warnings, {} failed\n",
            self.precision_digits,
            count(Status::Pass),
            count(Status::Warning),
            count(Status::Fail)
        ));
        s
    }
}

struct Suite {
    prec: Precision,
    results: Vec<InvariantResult>,
}

impl Suite {
    fn record(
        &mut self,
        module: &'static str,
        invariant: &'static str,
        outcome: Result<(bool, String)>,
        expected: impl Into<String>,
    ) {
        let (status, observed) = match outcome {
            Ok((true, obs)) => (Status::Pass, obs),
            Ok((false, obs)) => (Status::Fail, obs),
            Err(e) => (Status::Fail, format!("error: {e}")),
        };
        self.results.push(InvariantResult {
            module,
            invariant,
            status,
            observed,
            expected: expected.into(),
        });
    }

    fn warn(&mut self, module: &'static str, invariant: &'static str, observed: String, expected: String) {
        self.results.push(InvariantResult {
            module,
            invariant,
            status: Status::Warning,
            observed,
            expected,
        });
    }

    /// `10^(-digits + slack)`, as a decimal exponent.
    fn tol(&self, slack: i32) -> f64 {
        -(self.prec.digits() as f64) + slack as f64
    }
}

fn log10_rel(a: &BigComplex, b: &BigComplex) -> f64 {
    let diff = (a - b).abs();
    if diff.is_zero() {
        return f64::NEG_INFINITY;
    }
    let scale = a.abs().log10_abs().max(b.abs().log10_abs());
    diff.log10_abs() - if scale.is_finite() { scale } else { 0.0 }
}

fn show(e: f64) -> String {
    if e == f64::NEG_INFINITY {
        "exact".to_string()
    } else {
        format!("1e{e:.1}")
    }
}

/// Runs the whole suite.
pub fn run(cfg: &SelfcheckConfig) -> SelfcheckReport {
    let mut s = Suite {
        prec: cfg.precision,
        results: Vec::new(),
    };
    arith_checks(&mut s);
    seqxform_checks(&mut s);
    debye_checks(&mut s, cfg.corrupt_debye);
    bessel_checks(&mut s);
    kapteyn_checks(&mut s);
    kepler_checks(&mut s);
    precision_checks(&mut s);
    SelfcheckReport {
        precision_digits: cfg.precision.digits(),
        results: s.results,
    }
}

/// Deterministic spread of magnitudes for the arithmetic checks.
fn sample_reals(prec: Precision, n: usize) -> Vec<BigReal> {
    (1..=n as i64)
        .map(|i| {
            let v = prec.int(i).sqrt() * prec.pow10((i % 7) as i32 - 3);
            if i % 3 == 0 {
                -v
            } else {
                v
            }
        })
        .collect()
}

fn arith_checks(s: &mut Suite) {
    let prec = s.prec;
    let xs = sample_reals(prec, 21);
    let mut worst = f64::NEG_INFINITY;
    for w in xs.chunks(3) {
        let (a, b, c) = (&w[0], &w[1], &w[2]);
        let left = &(a + b) + c;
        let right = a + &(b + c);
        let l = BigComplex::from_real(left);
        let r = BigComplex::from_real(right);
        worst = worst.max(log10_rel(&l, &r));
    }
    let bound = s.tol(5);
    s.record(
        "arith",
        "associativity",
        Ok((worst < bound, show(worst))),
        format!("relative < 1e{bound}"),
    );

    let third = BigRational::new(1, 3);
    let sixth = BigRational::new(1, 6);
    let sum = &third + &sixth;
    s.record(
        "arith",
        "rational exactness",
        Ok((sum == BigRational::new(1, 2), sum.to_string())),
        "1/3 + 1/6 == 1/2",
    );

    let x = prec.int(2).sqrt();
    let back = prec.parse(&x.to_decimal_string());
    s.record(
        "arith",
        "decimal round trip",
        back.map(|b| (b == x, "sqrt(2)".to_string())),
        "parse(to_string(x)) == x",
    );
}

fn geometric(c: &BigReal, r: &BigReal, n: usize) -> Result<TermSequence> {
    let mut terms = Vec::with_capacity(n);
    let mut t = c.clone();
    for _ in 0..n {
        terms.push(t.clone());
        t = &t * r;
    }
    TermSequence::from_reals("geometric", terms)
}

fn seqxform_checks(s: &mut Suite) {
    let prec = s.prec;
    let c = prec.ratio(3, 7);
    let r = prec.ratio(-2, 5);
    let limit = &c / &(prec.one() - &r);
    let limit_c = BigComplex::from_real(limit);
    let geo = geometric(&c, &r, 8);
    let outcome = geo.and_then(|terms| {
        let mut worst = f64::NEG_INFINITY;
        for kind in TransformKind::ALL {
            let tab = transform(&terms, kind, 3)?;
            for k in 1..=3 {
                worst = worst.max(log10_rel(tab.estimate(k).expect("order"), &limit_c));
            }
        }
        Ok((worst < s.tol(10), show(worst)))
    });
    let bound = s.tol(10);
    s.record("seqxform", "geometric exactness", outcome, format!("relative < 1e{bound}"));

    // a test series with a genuine tail: terms (-1)^n n! / 10^n
    let terms: Vec<BigReal> = {
        let mut v = Vec::new();
        let mut t = prec.one();
        for n in 0..14i64 {
            v.push(t.clone());
            t = -(t.mul_int(n + 1)).div_int(10);
        }
        v
    };
    let seq = TermSequence::from_reals("alternating factorial", terms).expect("finite terms");
    let seq = &seq;

    let shift = prec.complex(0.75, -1.25);
    let outcome = (|| {
        let mut worst = f64::NEG_INFINITY;
        for kind in TransformKind::ALL {
            let rem = kind.default_remainder();
            let k_max = 10;
            let sums = partial_sums(seq);
            let omegas = &seq.terms()[rem.offset()..rem.terms_needed(k_max)];
            let base = transform_with_remainders(&sums.sums()[..=k_max], omegas, kind, k_max)?;
            let moved = sums.shifted(&shift);
            let shifted = transform_with_remainders(&moved.sums()[..=k_max], omegas, kind, k_max)?;
            for k in 1..=k_max {
                let want = base.estimate(k).expect("order") + &shift;
                worst = worst.max(log10_rel(shifted.estimate(k).expect("order"), &want));
            }
        }
        Ok((worst < s.tol(10), show(worst)))
    })();
    s.record("seqxform", "translation covariance", outcome, format!("relative < 1e{bound}"));

    let factor = prec.complex(-2.5, 0.5);
    let outcome = (|| {
        let mut worst = f64::NEG_INFINITY;
        let scaled = seq.scaled(&factor);
        for kind in TransformKind::ALL {
            let a = transform(seq, kind, 10)?;
            let b = transform(&scaled, kind, 10)?;
            for k in 1..=10 {
                let want = a.estimate(k).expect("order") * &factor;
                worst = worst.max(log10_rel(b.estimate(k).expect("order"), &want));
            }
        }
        Ok((worst < s.tol(10), show(worst)))
    })();
    s.record("seqxform", "scale invariance", outcome, format!("relative < 1e{bound}"));

    let outcome = (|| {
        let mut worst = f64::NEG_INFINITY;
        for rem in [RemainderEstimate::LastTerm, RemainderEstimate::NextTerm] {
            let d = transform_with(seq, TransformKind::LevinD, rem, 1)?;
            let w = transform_with(seq, TransformKind::WenigerDelta, rem, 1)?;
            worst = worst.max(log10_rel(d.estimate(1).expect("order"), w.estimate(1).expect("order")));
        }
        Ok((worst < s.tol(10), show(worst)))
    })();
    s.record("seqxform", "order-one identity", outcome, "d_1 == delta_1 for a shared remainder");
}

const SELFCHECK_DEBYE_ORDERS: usize = 60;

fn debye_checks(s: &mut Suite, corrupt: Option<(usize, usize)>) {
    let mut table: DebyeTable = debye::generate(SELFCHECK_DEBYE_ORDERS);
    if let Some((k, m)) = corrupt {
        if k <= table.k_max() && m <= 3 * k {
            let old = table.row(k).expect("in range").coeff(m);
            table.corrupt(k, m, &(&old + &old) + &BigRational::from_int(1));
        }
    }
    let violation = table.ratio_law_violation();
    s.record(
        "debye",
        "ratio law",
        Ok((
            violation.is_none(),
            violation.map_or("exact for all k".to_string(), |k| format!("fails at k = {k}")),
        )),
        format!("a^(k+1)_(3k+3) / a^k_(3k) = -(36k(k+1)+5)/(24(k+1)) for k < {SELFCHECK_DEBYE_ORDERS}"),
    );
    let parity = table.parity_violations();
    s.record(
        "debye",
        "parity sparsity",
        Ok((parity.is_empty(), format!("{} violations", parity.len()))),
        "a^k_m = 0 when m and k have opposite parity",
    );
    let by_int = oracle::debye_by_integration(5);
    let mismatch = by_int
        .iter()
        .enumerate()
        .find(|(k, row)| table.coeffs(*k).map_or(true, |c| &c != *row))
        .map(|(k, _)| k);
    s.record(
        "debye",
        "integro-differential oracle",
        Ok((
            mismatch.is_none(),
            mismatch.map_or("rows 0..=5 agree".to_string(), |k| format!("row {k} differs")),
        )),
        "recurrence rows equal symbolic integration for k <= 5",
    );
    let prec = s.prec;
    let r = debye::leading_ratio(200).to_real(prec).abs() / prec.int(300);
    let dev = (r.to_f64() - 1.0).abs();
    s.record(
        "debye",
        "ratio asymptote",
        Ok((dev < 0.01, format!("{:.6}", r.to_f64()))),
        "ratio / (3k/2) within 1% of 1 at k = 200",
    );
}

fn bessel_checks(s: &mut Suite) {
    let prec = s.prec;
    let table = debye::generate(32);
    let outcome = (|| {
        let mut worst = f64::NEG_INFINITY;
        for (num, den) in [(1, 2), (9, 10)] {
            let eps = prec.ratio(num, den);
            let exact = BigComplex::from_real(jn_reference(10, &eps.mul_int(10))?);
            let spec = DebyeSeriesSpec::new(10, eps, 32)?;
            let tab = jn_resummed(&spec, &table, TransformKind::LevinD, 30)?;
            let best = tab.last().expect("nonempty table");
            worst = worst.max(log10_rel(best, &exact));
        }
        Ok((worst < -9.0, show(worst)))
    })();
    s.record("bessel", "resummed Debye vs ascending series", outcome, "relative < 1e-9 at n = 10");
    let r = rho(&prec.one());
    s.record(
        "bessel",
        "rho(1) = 1",
        r.map(|v| (v == prec.one(), v.to_sig(6))),
        "1",
    );
}

fn kapteyn_checks(s: &mut Suite) {
    let prec = s.prec;
    let outcome = (|| {
        let nu = prec.ratio(3, 2);
        let z = prec.cis(&prec.pi().div_int(4)).scale(&rho(&prec.ratio(9, 10))?);
        let a = polylog(&nu, &z)?;
        let b = oracle::polylog_quadrature(&nu, &z)?;
        let err = (&a - &b).abs();
        let e = if err.is_zero() { f64::NEG_INFINITY } else { err.log10_abs() };
        Ok((e <= -20.0, show(e)))
    })();
    s.record("kapteyn", "polylog vs quadrature", outcome, "|difference| <= 1e-20");

    let outcome = (|| {
        let mut worst = f64::NEG_INFINITY;
        for (nu, x) in [((3, 2), (1, 3)), ((5, 2), (4, 1)), ((7, 3), (9, 2)), ((1, 2), (3, 5))] {
            let nu = prec.ratio(nu.0, nu.1);
            let x = prec.ratio(x.0, x.1);
            let err = (gamma_q(&nu, &x)? - oracle::gamma_q_quadrature(&nu, &x)?).abs();
            if !err.is_zero() {
                worst = worst.max(err.log10_abs());
            }
        }
        Ok((worst <= -20.0, show(worst)))
    })();
    s.record("kapteyn", "incomplete gamma vs quadrature", outcome, "|difference| <= 1e-20");

    let outcome = (|| {
        let nu = prec.ratio(5, 2);
        let grid = uniform_t_grid(20, prec);
        let values = grid
            .iter()
            .map(|t| stieltjes_measure(&nu, t))
            .collect::<Result<Vec<_>>>()?;
        let bounded = values.iter().all(|v| !v.is_sign_negative() && *v <= prec.one());
        let monotone = values.windows(2).all(|w| w[0] <= w[1]);
        Ok((bounded && monotone, format!("bounded {bounded}, nondecreasing {monotone}")))
    })();
    s.record("kapteyn", "measure monotonicity", outcome, "0 <= mu(t) <= 1, nondecreasing in t");

    let outcome = (|| {
        let eps = prec.ratio(3, 5);
        let m = prec.ratio(7, 5);
        let up = kapteyn_terms(&KapteynParams::on_circle(eps.clone(), &m, 24)?)?;
        let down = kapteyn_terms(&KapteynParams::on_circle(eps, &-&m, 24)?)?;
        let mut worst = f64::NEG_INFINITY;
        for kind in TransformKind::ALL {
            let a = transform(&up, kind, 20)?;
            let b = transform(&down, kind, 20)?;
            for k in 1..=20 {
                worst = worst.max(log10_rel(&a.estimate(k).expect("order").conj(), b.estimate(k).expect("order")));
            }
        }
        Ok((worst < s.tol(10), show(worst)))
    })();
    s.record("kapteyn", "conjugate symmetry", outcome, "S(conj z) = conj S(z)");

    let outcome = (|| {
        let table = debye::generate(21);
        let grid = uniform_t_grid(11, prec);
        let scan = stieltjes_scan(&prec.ratio(1, 2), &grid, 20, TransformKind::LevinD, &table)?;
        let min = scan_min(&scan);
        let dec = scan_monotonicity_violation(&scan);
        Ok((min >= -1e-8 && dec <= 1e-8, format!("min {min:.2e}, largest decrease {dec:.2e}")))
    })();
    s.record("kapteyn", "Stieltjes scan shape", outcome, "U >= 0 and nondecreasing in x at eps = 1/2");
}

fn kepler_checks(s: &mut Suite) {
    let prec = s.prec;
    let tol = finest_tolerance(prec);
    let outcome = (|| {
        let p = KeplerProblem::new(prec.ratio(9, 10), prec.pi().div_int(4))?;
        let psi = solve_newton(&p, &tol)?;
        let r = p.residual(&psi).abs();
        Ok((r <= tol, r.to_sci(3)))
    })();
    s.record("kepler", "Newton residual", outcome, format!("<= {}", tol.to_sci(2)));

    let outcome = (|| {
        let eps = prec.ratio(3, 5);
        let m = prec.ratio(9, 10);
        let two_pi = prec.pi().mul_int(2);
        let a = KeplerProblem::new(eps.clone(), m.clone())?;
        let b = KeplerProblem::new(eps, &two_pi - &m)?;
        let newton = log10_rel(
            &BigComplex::from_real(&two_pi - &solve_newton(&a, &tol)?),
            &BigComplex::from_real(solve_newton(&b, &tol)?),
        );
        let mut worst = newton;
        for kind in TransformKind::ALL {
            let sa = solve_series(&a, kind, 24)?.best();
            let sb = solve_series(&b, kind, 24)?.best();
            worst = worst.max(log10_rel(
                &BigComplex::from_real(&two_pi - &sa),
                &BigComplex::from_real(sb),
            ));
        }
        Ok((worst < s.tol(15), show(worst)))
    })();
    let bound = s.tol(15);
    s.record("kepler", "reflection symmetry", outcome, format!("relative < 1e{bound}"));

    let outcome = (|| {
        let p = KeplerProblem::new(prec.ratio(3, 5), prec.pi().div_int(4))?;
        let exact = BigComplex::from_real(solve_newton(&p, &tol)?);
        let mut worst = f64::NEG_INFINITY;
        for kind in TransformKind::ALL {
            let est = BigComplex::from_real(solve_series(&p, kind, 30)?.best());
            worst = worst.max(log10_rel(&est, &exact));
        }
        Ok((worst < -10.0, show(worst)))
    })();
    s.record("kepler", "series vs Newton", outcome, "relative < 1e-10 at order 30");

    let outcome = (|| {
        let eps = prec.ratio(1, 10);
        let z = prec.ratio(1, 2);
        let p = ComplexKeplerProblem::new(eps.clone(), BigComplex::from_real(z.clone()))?;
        let psi = solve_complex_newton(&p, &tol)?;
        let real = oracle::hyperbolic_kepler_bisection(&eps, &z)?;
        let e = log10_rel(&psi, &BigComplex::from_real(real));
        Ok((e < s.tol(15) && psi.im.abs().log10_abs() < s.tol(15), show(e)))
    })();
    s.record("kepler", "complex Newton vs bisection", outcome, "real root agrees");
}

/// Runs at the configured precision `P` and at `2P` must agree, and
/// high-order transforms may stop early at low precision (warning only).
fn precision_checks(s: &mut Suite) {
    let prec = s.prec;
    let doubled = prec.doubled();
    let outcome = (|| {
        let solve = |p: Precision| -> Result<BigReal> {
            let problem = KeplerProblem::new(p.ratio(3, 5), p.pi().div_int(3))?;
            Ok(solve_series(&problem, TransformKind::WenigerDelta, 30)?.best())
        };
        let a = solve(prec)?;
        let b = solve(doubled)?.at(prec);
        let e = log10_rel(&BigComplex::from_real(a), &BigComplex::from_real(b));
        let need = -(prec.digits() as f64) / 2.0;
        Ok((e < need, show(e)))
    })();
    s.record(
        "kepler",
        "precision P vs 2P",
        outcome,
        format!("relative < 1e-{}", prec.digits() / 2),
    );

    // U(log 2, 100/sqrt(199)) with d at order 60 sums terms up to 1e140
    // with alternating signs; below about 150 digits the binomial sums
    // cancel away the significant digits. Expected, so only a warning.
    let table = debye::generate(62);
    let d60 = |p: Precision| -> Result<BigComplex> {
        let q = UQuery::new(p.int(2).ln(), p.int(100) / p.int(199).sqrt(), 60)?;
        let tab = u_resummed(&q, &table, TransformKind::LevinD)?;
        match tab.stop {
            Some(TableStop::Indeterminate { order }) | Some(TableStop::ZeroDenominator { order }) => {
                Err(crate::error::Error::Domain(format!("stopped at order {order}")))
            }
            None => Ok(tab.last().expect("order 60").clone()),
        }
    };
    let expected = "order-60 d agrees with the 2P run to 10 digits".to_string();
    match (d60(prec), d60(doubled)) {
        (Ok(a), Ok(b)) => {
            let e = log10_rel(&a, &b.at(prec));
            if e < -10.0 {
                s.record("seqxform", "high-order cancellation", Ok((true, show(e))), expected);
            } else {
                s.warn("seqxform", "high-order cancellation", format!("{} (cancellation)", show(e)), expected);
            }
        }
        (Err(e), _) | (_, Err(e)) => s.warn("seqxform", "high-order cancellation", e.to_string(), expected),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_run_passes() {
        let report = run(&SelfcheckConfig::default());
        assert!(report.passed(), "{}", report.render());
    }

    #[test]
    fn corrupted_table_names_the_ratio_law() {
        let cfg = SelfcheckConfig {
            corrupt_debye: Some((7, 21)),
            ..Default::default()
        };
        let report = run(&cfg);
        assert!(!report.passed());
        let r = report.find("ratio law").unwrap();
        assert_eq!(r.status, Status::Fail);
        assert_eq!(r.module, "debye");
    }
}
