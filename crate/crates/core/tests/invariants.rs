//! Property-based invariants of the arithmetic, the transformations and the
//! Kepler solvers.

use kepler_resum::kapteyn::stieltjes_measure;
use kepler_resum::kepler::{finest_tolerance, solve_newton, solve_series, KeplerProblem};
use kepler_resum::seqxform::{partial_sums, transform, transform_with_remainders};
use kepler_resum::{BigComplex, BigRational, BigReal, Precision, TermSequence, TransformKind};
use proptest::prelude::*;

fn prec() -> Precision {
    Precision::new(60).unwrap()
}

fn log10_rel(a: &BigComplex, b: &BigComplex) -> f64 {
    let d = (a - b).abs();
    if d.is_zero() {
        f64::NEG_INFINITY
    } else {
        d.log10_abs() - b.abs().log10_abs().max(-300.0)
    }
}

fn kind() -> impl Strategy<Value = TransformKind> {
    prop_oneof![Just(TransformKind::LevinD), Just(TransformKind::WenigerDelta)]
}

/// Alternating, slowly converging test series `sum (-1)^j / (j+1)^s`.
fn alternating(p: Precision, s: f64, n: usize) -> TermSequence {
    let terms = (0..n)
        .map(|j| {
            let v = p.from_f64(s);
            let base = p.int(j as i64 + 1);
            let t = (-(&v * base.ln())).exp();
            if j % 2 == 0 { t } else { -t }
        })
        .collect();
    TermSequence::from_reals("alternating", terms).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn rational_arithmetic_is_exact(a in -1000i64..1000, b in 1i64..1000, c in -1000i64..1000, d in 1i64..1000) {
        let x = BigRational::new(a, b);
        let y = BigRational::new(c, d);
        prop_assert_eq!(&(&x + &y) - &y, x.clone());
        if !y.is_zero() {
            prop_assert_eq!(&(&x * &y) / &y, x.clone());
        }
        prop_assert_eq!(&x + &y, BigRational::new(a * d + c * b, b * d));
    }

    #[test]
    fn real_addition_is_associative_to_working_precision(a in -1e6f64..1e6, b in -1e6f64..1e6, c in -1e6f64..1e6) {
        let p = prec();
        let (x, y, z) = (p.from_f64(a).abs().sqrt(), p.from_f64(b), p.from_f64(c).abs().sqrt());
        let left = (&x + &y) + &z;
        let right = &x + &(&y + &z);
        let scale = x.abs() + y.abs() + z.abs();
        let diff = (&left - &right).abs();
        prop_assert!(diff.is_zero() || diff.log10_abs() - scale.log10_abs() < -55.0);
    }

    #[test]
    fn geometric_series_are_summed_exactly(q in -0.9f64..0.9, a in 0.1f64..10.0, k in 2usize..6, kind in kind()) {
        prop_assume!(q.abs() > 0.05);
        let p = prec();
        let (q, a) = (p.from_f64(q), p.from_f64(a));
        let terms = (0..k + 3).map(|j| &a * q.powi(j as i32)).collect();
        let seq = TermSequence::from_reals("geometric", terms).unwrap();
        let tab = transform(&seq, kind, k).unwrap();
        let limit = BigComplex::from_real(&a / (p.one() - &q));
        for order in 1..=k {
            prop_assert!(log10_rel(tab.estimate(order).unwrap(), &limit) < -50.0);
        }
    }

    #[test]
    fn transformation_commutes_with_translation(s in 0.3f64..2.0, c in -50.0f64..50.0, k in 2usize..12, kind in kind()) {
        let p = prec();
        let seq = alternating(p, s, k + 3);
        let base = transform(&seq, kind, k).unwrap();
        let shift = BigComplex::from_real(p.from_f64(c));
        let sums: Vec<BigComplex> = partial_sums(&seq).sums().iter().map(|x| x + &shift).collect();
        let off = kind.default_remainder().offset();
        let omegas: Vec<BigComplex> = seq.terms()[off..].to_vec();
        let shifted = transform_with_remainders(&sums, &omegas, kind, k).unwrap();
        for order in 1..=k {
            let want = base.estimate(order).unwrap() + &shift;
            prop_assert!(log10_rel(shifted.estimate(order).unwrap(), &want) < -45.0);
        }
    }

    #[test]
    fn transformation_is_scale_invariant(s in 0.3f64..2.0, re in -5.0f64..5.0, im in -5.0f64..5.0, k in 2usize..12, kind in kind()) {
        prop_assume!(re.hypot(im) > 0.01);
        let p = prec();
        let seq = alternating(p, s, k + 3);
        let c = p.complex(re, im);
        let base = transform(&seq, kind, k).unwrap();
        let scaled = transform(&seq.scaled(&c), kind, k).unwrap();
        for order in 1..=k {
            let want = base.estimate(order).unwrap() * &c;
            prop_assert!(log10_rel(scaled.estimate(order).unwrap(), &want) < -45.0);
        }
    }

    #[test]
    fn transformation_commutes_with_conjugation(re in -1.0f64..1.0, im in -1.0f64..1.0, k in 2usize..12, kind in kind()) {
        prop_assume!(re.hypot(im) > 0.05 && re.hypot(im) < 0.95);
        let p = prec();
        let z = p.complex(re, im);
        // log(1 - z) series, terms z^(j+1) / (j+1)
        let terms = (0..k + 3).map(|j| z.powi(j as i64 + 1).div_int(j as i64 + 1)).collect();
        let seq = TermSequence::new("log series", terms).unwrap();
        let a = transform(&seq, kind, k).unwrap();
        let b = transform(&seq.conj(), kind, k).unwrap();
        for order in 1..=k {
            prop_assert!(log10_rel(&a.estimate(order).unwrap().conj(), b.estimate(order).unwrap()) < -50.0);
        }
    }

    #[test]
    fn newton_respects_reflection(eps in 0.0f64..0.99, m in 0.01f64..3.1) {
        let p = prec();
        let tol = finest_tolerance(p);
        let (eps, m) = (p.from_f64(eps), p.from_f64(m));
        let two_pi = p.pi().mul_int(2);
        let a = solve_newton(&KeplerProblem::new(eps.clone(), m.clone()).unwrap(), &tol).unwrap();
        let b = solve_newton(&KeplerProblem::new(eps, &two_pi - &m).unwrap(), &tol).unwrap();
        let err = (&two_pi - &a - &b).abs();
        prop_assert!(err.is_zero() || err.log10_abs() < -50.0);
    }

    #[test]
    fn series_solution_is_stable_under_doubled_precision(eps in 0.05f64..0.8, m in 0.1f64..3.0, kind in kind()) {
        let p = Precision::new(50).unwrap();
        let solve = |q: Precision| -> BigReal {
            let problem = KeplerProblem::new(q.from_f64(eps), q.from_f64(m)).unwrap();
            solve_series(&problem, kind, 20).unwrap().best()
        };
        let a = solve(p);
        let b = solve(p.doubled()).at(p);
        prop_assert!(log10_rel(&BigComplex::from_real(a), &BigComplex::from_real(b)) < -25.0);
    }

    #[test]
    fn stieltjes_measure_is_a_distribution_function(nu in 0.5f64..6.0, t1 in 0.001f64..1.0, t2 in 0.001f64..1.0) {
        let p = prec();
        let nu = p.from_f64(nu);
        let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        let a = stieltjes_measure(&nu, &p.from_f64(lo)).unwrap();
        let b = stieltjes_measure(&nu, &p.from_f64(hi)).unwrap();
        prop_assert!(!a.is_sign_negative() && b <= p.one());
        prop_assert!(a <= b);
    }
}
