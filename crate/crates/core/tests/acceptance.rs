//! Acceptance suite: one test per release criterion, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them). Criteria 8 and 9
//! exercise the command-line binary and live in the CLI crate's own
//! acceptance test target.

use std::time::Instant;

use dipole_noise::bohm::{sample_qeh, RngStreamSpec};
use dipole_noise::hydrogen::{x_squared_expectation, HydrogenState};
use dipole_noise::numerics::{integrate, QuadSpec};
use dipole_noise::observables::{compare_theories, fit_asymptote, numeric_moment};
use dipole_noise::qm::{moment_qm, tail_coeff_qm, x2_over_r3_expectation};
use dipole_noise::sqm::{
    asymptotic_coeff_sqm, calibrate_near_edge_coefficient, near_edge_family_coefficient,
    near_edge_family_coefficient_nominal, spectral_closed, spectral_general, spectral_mc, Moment,
    SpectralFunction,
};

fn state(n: u32, l: u32, m: i32) -> HydrogenState {
    HydrogenState::new(n, l, m).unwrap()
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64))
        .collect()
}

fn report(criterion: u32, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {verdict} - {detail}");
    assert!(pass, "criterion {criterion} failed: {detail}");
}

/// Criterion 1: closed form vs general quadrature, 4 states, 50 log-spaced
/// frequencies in [1e-2, 1e3], relative deviation <= 1e-8, under 10 s.
#[test]
fn criterion_1_closed_general_equivalence() {
    let start = Instant::now();
    let spec = QuadSpec::default();
    let states = [state(2, 1, 1), state(3, 2, 2), state(3, 2, 1), state(3, 1, 1)];
    let grid = log_grid(1e-2, 1e3, 50);
    let mut worst: f64 = 0.0;
    for st in &states {
        for &omega in &grid {
            let c = spectral_closed(st, omega).unwrap();
            let g = spectral_general(st, omega, &spec).unwrap();
            if c != 0.0 {
                worst = worst.max(((c - g) / c).abs());
            } else {
                assert_eq!(g, 0.0);
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        1,
        worst <= 1e-8 && elapsed < 10.0,
        &format!("max relative deviation {worst:.2e} over 200 points in {elapsed:.2} s"),
    );
}

/// Criterion 2: numeric moments of the |211> spectrum reproduce
/// gamma(0) = 12 (e a0)^2 and gamma(2) = 1/16 e^4/(mu a0) within 1e-6.
#[test]
fn criterion_2_first_moment_sum_rules() {
    let sf = SpectralFunction::closed_form(&state(2, 1, 1), &[]).unwrap();
    let g0 = numeric_moment(&sf, 0).unwrap().value().unwrap();
    let g2 = numeric_moment(&sf, 2).unwrap().value().unwrap();
    let d0 = (g0 - 12.0).abs() / 12.0;
    let d2 = (g2 - 0.0625).abs() / 0.0625;
    report(
        2,
        d0 <= 1e-6 && d2 <= 1e-6,
        &format!("gamma0 = {g0} (rel err {d0:.2e}), gamma2 = {g2} (rel err {d2:.2e})"),
    );
}

/// Criterion 3: the second-moment discrepancy. gamma2_SQM = 1/16 and
/// gamma2_QM = 1/5, the latter verified through the closed formula and
/// through quadrature of the independent expectation <x^2/r^3>,
/// agreeing to 1e-8; the theories differ exactly.
#[test]
fn criterion_3_gamma2_discrepancy() {
    let st = state(2, 1, 1);
    let g2_sqm = match dipole_noise::sqm::moment_sqm(&st, 2).unwrap() {
        Moment::Value(v) => v,
        Moment::Divergent => panic!("gamma2_SQM must converge for |211>"),
    };
    let g2_qm_formula = moment_qm(&st, 2).unwrap();
    // the closed formula equals exactly twice <x^2/r^3>; the quadrature
    // route below shares no code with the formula route
    let g2_qm_quad = 2.0 * x2_over_r3_expectation(&st).unwrap();
    let routes_agree = ((g2_qm_formula - g2_qm_quad) / g2_qm_formula).abs() <= 1e-8;
    let pass = g2_sqm == 0.0625
        && (g2_qm_formula - 0.2).abs() < 1e-14
        && routes_agree
        && g2_sqm != g2_qm_formula;
    report(
        3,
        pass,
        &format!(
            "gamma2_SQM = {g2_sqm}, gamma2_QM = {g2_qm_formula} (quadrature route {g2_qm_quad})"
        ),
    );
}

/// Criterion 4: log-log fits on [1e3, 1e5] recover the tail exponents
/// -(3+m) within 0.05 and the coefficients 1/128, 1/2187, 1/1944, 5/1944
/// within 1%; the conventional-QM tail for |211> reports -(4+l+1/2) = -5.5.
#[test]
fn criterion_4_asymptotic_exponents() {
    let grid = log_grid(1e3, 1e5, 50);
    let cases = [
        (state(2, 1, 1), -4.0, 1.0 / 128.0),
        (state(3, 2, 2), -5.0, 1.0 / 2187.0),
        (state(3, 2, 1), -4.0, 1.0 / 1944.0),
        (state(3, 1, 1), -4.0, 5.0 / 1944.0),
    ];
    let mut detail = String::new();
    let mut pass = true;
    for (st, want_exp, want_coeff) in cases {
        let sf = SpectralFunction::closed_form(&st, &grid).unwrap();
        let fit = fit_asymptote(&sf, (1e3, 1e5)).unwrap();
        let exp_ok = (fit.fitted_exponent - want_exp).abs() <= 0.05;
        let coeff_ok = ((fit.fitted_coefficient - want_coeff) / want_coeff).abs() <= 0.01;
        // the quadrature-formula coefficient must agree too
        let quad_coeff = asymptotic_coeff_sqm(&st, &QuadSpec::default()).unwrap();
        let quad_ok = ((quad_coeff - want_coeff) / want_coeff).abs() <= 1e-8;
        pass &= exp_ok && coeff_ok && quad_ok;
        detail.push_str(&format!(
            "{st}: exponent {:.4}, coefficient {:.6e}; ",
            fit.fitted_exponent, fit.fitted_coefficient
        ));
    }
    let (_, qm_exp) = tail_coeff_qm(&state(2, 1, 1)).unwrap();
    pass &= qm_exp == 5.5;
    detail.push_str(&format!("QM tail exponent -{qm_exp}"));
    report(4, pass, &detail);
}

/// Criterion 5: Monte Carlo spectrum with 1e6 quantum-equilibrium samples
/// (fixed seed) agrees with the general formula within 3 standard errors
/// on at least 95% of 40 bins spanning [0.05, 20]; the empirical <x^2>
/// lands within 3 sigma of 12; under 60 s.
#[test]
fn criterion_5_monte_carlo_consistency() {
    let start = Instant::now();
    let st = state(2, 1, 1);
    let ens = sample_qeh(&st, 1_000_000, RngStreamSpec::new(424_242));

    let edges = log_grid(0.05, 20.0, 41);
    let mc = spectral_mc(&st, &edges, &ens).unwrap();

    // the histogram estimates the bin average of S, so compare against
    // the bin-averaged general formula
    let spec = QuadSpec {
        rel_tol: 1e-8,
        abs_tol: 1e-14,
        max_subdivisions: 2000,
    };
    let mut within = 0usize;
    for (j, s) in mc.samples.iter().enumerate() {
        let (lo, hi) = (edges[j], edges[j + 1]);
        let avg = integrate(
            |w: f64| spectral_general(&st, w, &QuadSpec::default()).unwrap(),
            lo,
            hi,
            &spec,
        )
        .unwrap()
            / (hi - lo);
        match s.stderr {
            Some(se) if (s.value - avg).abs() <= 3.0 * se => within += 1,
            _ => {}
        }
    }
    let frac = within as f64 / 40.0;

    let vals: Vec<f64> = ens
        .points
        .iter()
        .map(|p| 0.5 * p.r0 * p.r0 * p.theta0.sin().powi(2))
        .collect();
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (vals.len() - 1) as f64;
    let se = (var / vals.len() as f64).sqrt();
    let x2 = x_squared_expectation(&st);
    let x2_ok = (mean - x2).abs() <= 3.0 * se;

    let elapsed = start.elapsed().as_secs_f64();
    report(
        5,
        frac >= 0.95 && x2_ok && elapsed < 60.0,
        &format!(
            "{within}/40 bins within 3 SE; <x^2> = {mean:.4} +- {se:.4} vs {x2}; {elapsed:.1} s"
        ),
    );
}

/// Criterion 6: semiclassical agreement for circular states. In
/// e^4/(2 a0 mu) units, n^2 gamma2_SQM = (n-1)/n and
/// n^2 gamma2_QM = n/(n+1/2); both within 5% of 1 at n = 20 and the
/// approach to the common limit is monotone over n = 5, 10, 20, 40.
#[test]
fn criterion_6_semiclassical_agreement() {
    let spec = QuadSpec::default();
    let mut pass = true;
    let mut detail = String::new();
    let mut prev_sqm = f64::NEG_INFINITY;
    let mut prev_qm = f64::NEG_INFINITY;
    let mut prev_ratio = f64::INFINITY;
    for n in [5u32, 10, 20, 40] {
        let st = state(n, n - 1, n as i32 - 1);
        let cmp = compare_theories(&st, n, &spec).unwrap();
        let semi = cmp.semiclassical.expect("circular state");
        let nf = n as f64;
        pass &= (semi.n2_gamma2_sqm - (nf - 1.0) / nf).abs() < 1e-12;
        pass &= (semi.n2_gamma2_qm - nf / (nf + 0.5)).abs() < 1e-12;
        // both climb toward 1 and the mutual ratio shrinks toward 1
        pass &= semi.n2_gamma2_sqm > prev_sqm && semi.n2_gamma2_qm > prev_qm;
        pass &= semi.ratio_qm_over_sqm < prev_ratio;
        prev_sqm = semi.n2_gamma2_sqm;
        prev_qm = semi.n2_gamma2_qm;
        prev_ratio = semi.ratio_qm_over_sqm;
        if n == 20 {
            // (n-1)/n = 0.95 sits exactly on the 5% boundary
            pass &= (semi.n2_gamma2_sqm - 1.0).abs() <= 0.05 + 1e-12;
            pass &= (semi.n2_gamma2_qm - 1.0).abs() <= 0.05 + 1e-12;
            detail.push_str(&format!(
                "n=20: SQM {:.4}, QM {:.4}; ",
                semi.n2_gamma2_sqm, semi.n2_gamma2_qm
            ));
        }
    }
    detail.push_str(&format!("ratio trend ends at {prev_ratio:.4}"));
    report(6, pass, &detail);
}

/// Criterion 7: the quoted closed-form coefficient of the (n, n-1, n-2)
/// family disagrees with the general representation by the fixed rational
/// factor 729/64 at n = 3, while the coefficient calibrated against the
/// general quadrature reproduces the |321> curve to 1e-8.
#[test]
fn criterion_7_family_coefficient_erratum() {
    use num_bigint::BigInt;
    use num_rational::BigRational;

    let nominal = near_edge_family_coefficient_nominal(3).unwrap();
    let derived = near_edge_family_coefficient(3).unwrap();
    let ratio = nominal.clone() / derived.clone();
    let want_ratio = BigRational::new(BigInt::from(729), BigInt::from(64));
    let ratio_fixed = ratio == want_ratio;

    // numeric calibration against the general quadrature lands on the
    // derived value, not the quoted one
    let calibrated = calibrate_near_edge_coefficient(3, &QuadSpec::default()).unwrap();
    let derived_f = 1.0 / 3888.0;
    let calib_ok = ((calibrated - derived_f) / derived_f).abs() < 1e-8;
    let nominal_f = 3.0 / 1024.0;
    let nominal_fails = ((calibrated - nominal_f) / nominal_f).abs() > 0.5;

    // and the resulting closed form tracks spectral_general at 1e-8
    let st = state(3, 2, 1);
    let spec = QuadSpec::default();
    let mut worst: f64 = 0.0;
    for &omega in &log_grid(1e-2, 1e3, 25) {
        let c = spectral_closed(&st, omega).unwrap();
        let g = spectral_general(&st, omega, &spec).unwrap();
        if c != 0.0 {
            worst = worst.max(((c - g) / c).abs());
        }
    }
    report(
        7,
        ratio_fixed && calib_ok && nominal_fails && worst <= 1e-8,
        &format!(
            "quoted/derived = {ratio} (expected 729/64), calibrated {calibrated:.6e}, \
             closed-vs-general max dev {worst:.2e}"
        ),
    );
}
