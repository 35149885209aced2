//! Production paths checked against independent reference computations.

use kepler_resum::bessel::{jn_reference, jn_resummed, DebyeSeriesSpec};
use kepler_resum::kapteyn::{gamma_q, kapteyn_resummed, polylog, polylog_series_terms, s_via_polylog, KapteynParams};
use kepler_resum::kepler::{finest_tolerance, solve_complex_newton, solve_newton, ComplexKeplerProblem, KeplerProblem};
use kepler_resum::seqxform::transform;
use kepler_resum::{debye, oracle, BigComplex, BigReal, Precision, TransformKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn prec() -> Precision {
    Precision::new(60).unwrap()
}

fn rel(a: &BigComplex, b: &BigComplex) -> f64 {
    let d = (a - b).abs();
    if d.is_zero() {
        f64::NEG_INFINITY
    } else {
        d.log10_abs() - b.abs().log10_abs()
    }
}

fn rel_real(a: &BigReal, b: &BigReal) -> f64 {
    rel(&BigComplex::from_real(a.clone()), &BigComplex::from_real(b.clone()))
}

#[test]
fn debye_recurrence_matches_derivative_plus_integral_form() {
    let by_integration = oracle::debye_by_integration(12);
    let table = debye::generate(12);
    for (k, row) in by_integration.iter().enumerate() {
        assert_eq!(row, &table.coeffs(k).unwrap(), "U_{k}");
    }
}

#[test]
fn polylog_matches_quadrature_at_random_points() {
    let p = prec();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..10 {
        let nu = p.ratio(2 * rng.gen_range(0..5) + 3, 2);
        let r: f64 = rng.gen_range(0.05..0.95);
        let theta: f64 = rng.gen_range(-3.0..3.0);
        let z = p.cis(&p.from_f64(theta)).scale(&p.from_f64(r));
        let a = polylog(&nu, &z).unwrap();
        let b = oracle::polylog_quadrature(&nu, &z).unwrap();
        let err = (&a - &b).abs();
        assert!(err.is_zero() || err.log10_abs() <= -20.0, "nu {} z {}: {}", nu.to_sig(3), z.to_sig(6), err.to_sci(3));
    }
}

#[test]
fn incomplete_gamma_matches_quadrature_at_random_points() {
    let p = prec();
    let mut rng = ChaCha8Rng::seed_from_u64(0xa11ce);
    for _ in 0..10 {
        let nu = p.from_f64(rng.gen_range(0.5..6.0));
        let x = p.from_f64(rng.gen_range(0.05..12.0));
        let a = gamma_q(&nu, &x).unwrap();
        let b = oracle::gamma_q_quadrature(&nu, &x).unwrap();
        let err = (&a - &b).abs();
        assert!(err.is_zero() || err.log10_abs() <= -20.0, "nu {} x {}: {}", nu.to_sig(6), x.to_sig(6), err.to_sci(3));
    }
}

#[test]
fn complex_newton_matches_bisection_on_the_real_axis() {
    let p = prec();
    let tol = finest_tolerance(p);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let eps = p.from_f64(rng.gen_range(0.0..0.3));
        let z = p.from_f64(rng.gen_range(0.2..0.95));
        let problem = ComplexKeplerProblem::new(eps.clone(), BigComplex::from_real(z.clone())).unwrap();
        let psi = solve_complex_newton(&problem, &tol).unwrap();
        let real = oracle::hyperbolic_kepler_bisection(&eps, &z).unwrap();
        assert!(rel(&psi, &BigComplex::from_real(real)) < -50.0);
    }
}

#[test]
fn resummed_debye_expansion_matches_ascending_series() {
    let p = prec();
    let table = debye::generate(32);
    for n in [5u32, 10, 20] {
        for (num, den) in [(3, 10), (1, 2), (9, 10)] {
            let eps = p.ratio(num, den);
            let exact = jn_reference(n, &eps.mul_int(n as i64)).unwrap();
            let spec = DebyeSeriesSpec::new(n, eps, 32).unwrap();
            let tab = jn_resummed(&spec, &table, TransformKind::LevinD, 30).unwrap();
            let e = rel(tab.last().unwrap(), &BigComplex::from_real(exact));
            assert!(e < -8.0, "n {n} eps {num}/{den}: 1e{e:.1}");
        }
    }
}

#[test]
fn resummed_kapteyn_series_matches_newton() {
    let p = prec();
    let tol = finest_tolerance(p);
    for (eps, m) in [(p.ratio(1, 2), p.pi().div_int(2)), (p.ratio(9, 10), p.pi().div_int(4))] {
        let exact = solve_newton(&KeplerProblem::new(eps.clone(), m.clone()).unwrap(), &tol).unwrap();
        let params = KapteynParams::on_circle(eps, &m, 42).unwrap();
        for kind in TransformKind::ALL {
            let tab = kapteyn_resummed(&params, kind, 40).unwrap();
            let psi = &m + &tab.estimate(40).unwrap().im;
            assert!(rel_real(&psi, &exact) < -15.0, "{kind:?}");
        }
    }
}

#[test]
fn polylog_regrouping_agrees_with_the_fourier_route() {
    // The regrouped series converges erratically at eps = 9/10, so the best
    // delta estimate over orders 30..=40 is compared.
    let p = prec();
    let tol = finest_tolerance(p);
    let table = debye::generate(42);
    for (eps, m) in [(p.ratio(1, 2), p.pi().div_int(2)), (p.ratio(9, 10), p.pi().div_int(4))] {
        let exact = solve_newton(&KeplerProblem::new(eps.clone(), m.clone()).unwrap(), &tol).unwrap();
        let terms = polylog_series_terms(&eps, &m, 40, &table).unwrap();
        let tab = transform(&terms, TransformKind::WenigerDelta, 40).unwrap();
        let best = (30..=40)
            .map(|k| rel_real(&(&m + &tab.estimate(k).unwrap().im), &exact))
            .fold(f64::INFINITY, f64::min);
        assert!(best < -5.0, "eps {}: 1e{best:.2}", eps.to_sig(2));
    }
    // the single-call wrapper returns the same estimate
    let (eps, m) = (p.ratio(1, 2), p.pi().div_int(2));
    let once = s_via_polylog(&eps, &m, 30, TransformKind::WenigerDelta, &table).unwrap();
    let terms = polylog_series_terms(&eps, &m, 30, &table).unwrap();
    let tab = transform(&terms, TransformKind::WenigerDelta, 30).unwrap();
    assert_eq!(&once, tab.estimate(30).unwrap());
}
