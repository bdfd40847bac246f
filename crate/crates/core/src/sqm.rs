//! Noise spectral functions and two-time correlations of the dipole in the
//! trajectory (Bohmian) picture.
//!
//! For an eigenstate |n l m> every trajectory circulates at
//! `Omega = m/(r^2 sin^2 theta)`, so the dipole spectrum is the
//! quantum-equilibrium distribution of `Omega` weighted by the squared
//! amplitude. The general form is an integral over `rho >= z(omega)` of
//! Laguerre/Gegenbauer factors with the inverse-sqrt endpoint factor
//! `1/xi`; the substitution `rho = z cosh u` removes that endpoint
//! singularity and turns the simplest cases into Bessel-K closed forms.
//!
//! Symmetries: S(-omega) = S(omega), S_{n,l,-m} = S_{n,l,m}, and m = 0
//! states are a pure delta line at zero frequency. Builders therefore
//! accept m > 0 only (plus the dedicated delta constructor for m = 0).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use crate::bohm::TrajectoryEnsemble;
use crate::error::{Error, Result};
use crate::hydrogen::{x_squared_expectation, HydrogenState};
use crate::numerics::{
    bessel_k, gegenbauer, integrate, integrate_to_inf, laguerre_modern, QuadSpec,
};

/// Largest rho where the exponential integrands still matter; beyond this
/// e^{-rho} underflows anyway.
const RHO_CUT: f64 = 760.0;

/// How a spectrum was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralMethod {
    ClosedForm,
    GeneralQuadrature,
    MonteCarlo,
}

impl std::fmt::Display for SpectralMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpectralMethod::ClosedForm => write!(f, "closed"),
            SpectralMethod::GeneralQuadrature => write!(f, "quad"),
            SpectralMethod::MonteCarlo => write!(f, "mc"),
        }
    }
}

/// Power-law tail model `S -> coefficient * omega^{-exponent}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawTail {
    pub coefficient: f64,
    pub exponent: f64,
}

/// One sampled point of a spectrum. `stderr` is set for Monte Carlo data
/// only; an empty bin carries value 0 with no error estimate (its relative
/// error is unbounded).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectralSample {
    pub omega: f64,
    pub value: f64,
    pub stderr: Option<f64>,
}

/// A sampled noise spectral function on the omega > 0 half line, in units
/// of e^2 a0^2 / omega0. The full function follows by evenness.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralFunction {
    pub state: HydrogenState,
    pub method: SpectralMethod,
    pub samples: Vec<SpectralSample>,
    /// Zero-frequency delta component (m = 0 states only): (omega, weight).
    pub delta_line: Option<(f64, f64)>,
    /// High-frequency model, `3 + m` power for this theory.
    pub tail: Option<PowerLawTail>,
    /// Histogram bin edges (Monte Carlo spectra only).
    pub bin_edges: Option<Vec<f64>>,
    pub quad: QuadSpec,
    pub seed: Option<u64>,
}

impl SpectralFunction {
    /// Deterministic re-evaluation at an arbitrary frequency. Monte Carlo
    /// spectra return the containing bin's value.
    pub fn evaluate(&self, omega: f64) -> Result<f64> {
        match self.method {
            SpectralMethod::ClosedForm => spectral_closed(&self.state, omega),
            SpectralMethod::GeneralQuadrature => spectral_general(&self.state, omega, &self.quad),
            SpectralMethod::MonteCarlo => self
                .samples
                .iter()
                .find(|s| (s.omega - omega).abs() <= s.omega * 1e-12)
                .map(|s| s.value)
                .ok_or_else(|| {
                    Error::Domain("Monte Carlo spectra evaluate only at bin centers".into())
                }),
        }
    }

    /// Closed-form spectrum sampled on `grid` (m > 0 states with a closed
    /// Bessel-K form).
    pub fn closed_form(state: &HydrogenState, grid: &[f64]) -> Result<Self> {
        require_positive_m(state)?;
        let samples = grid
            .iter()
            .map(|&w| {
                Ok(SpectralSample {
                    omega: w,
                    value: spectral_closed(state, w)?,
                    stderr: None,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SpectralFunction {
            state: *state,
            method: SpectralMethod::ClosedForm,
            samples,
            delta_line: None,
            tail: Some(tail_model(state)?),
            bin_edges: None,
            quad: QuadSpec::default(),
            seed: None,
        })
    }

    /// General-quadrature spectrum sampled on `grid` (any m > 0 state).
    pub fn general(state: &HydrogenState, grid: &[f64], quad: &QuadSpec) -> Result<Self> {
        require_positive_m(state)?;
        let samples = grid
            .iter()
            .map(|&w| {
                Ok(SpectralSample {
                    omega: w,
                    value: spectral_general(state, w, quad)?,
                    stderr: None,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(SpectralFunction {
            state: *state,
            method: SpectralMethod::GeneralQuadrature,
            samples,
            delta_line: None,
            tail: Some(tail_model(state)?),
            bin_edges: None,
            quad: *quad,
            seed: None,
        })
    }

    /// The m = 0 spectrum: a single delta line at zero frequency carrying
    /// the whole weight <x^2>.
    pub fn delta_only(state: &HydrogenState) -> Result<Self> {
        if state.m() != 0 {
            return Err(Error::Domain(format!(
                "delta_only applies to m = 0 states, got {state}"
            )));
        }
        Ok(SpectralFunction {
            state: *state,
            method: SpectralMethod::ClosedForm,
            samples: Vec::new(),
            delta_line: Some((0.0, x_squared_expectation(state))),
            tail: None,
            bin_edges: None,
            quad: QuadSpec::default(),
            seed: None,
        })
    }
}

fn require_positive_m(state: &HydrogenState) -> Result<()> {
    if state.m() > 0 {
        return Ok(());
    }
    if state.m() == 0 {
        Err(Error::Domain(format!(
            "{state} has m = 0: the spectrum is a delta line at omega = 0 (use the delta path)"
        )))
    } else {
        Err(Error::Domain(format!(
            "{state} has m < 0: spectra satisfy S(n,l,-m) = S(n,l,m), build the |m| state"
        )))
    }
}

fn tail_model(state: &HydrogenState) -> Result<PowerLawTail> {
    Ok(PowerLawTail {
        coefficient: asymptotic_coeff_sqm(state, &QuadSpec::default())?,
        exponent: 3.0 + state.m_abs() as f64,
    })
}

fn big_factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// (2m - 1)!! as a big integer; (−1)!! = 1.
fn big_odd_double_factorial(m: u64) -> BigInt {
    let mut acc = BigInt::one();
    let mut k = 1;
    while k + 1 < 2 * m {
        k += 2;
        acc *= k;
    }
    acc
}

/// Exact rational coefficient
/// `c_nlm = n^4 (2l+1) (l-m)! ((2m-1)!!)^2 (n-l-1)! / (2 n m (l+m)! [(n+l)!]^3)`.
pub fn coefficient_c_rational(state: &HydrogenState) -> Result<BigRational> {
    if state.m() <= 0 {
        return Err(Error::Domain(format!(
            "coefficient_c requires m > 0, got {state}"
        )));
    }
    let (n, l, m) = (state.n() as u64, state.l() as u64, state.m() as u64);
    let dd = big_odd_double_factorial(m);
    let num = BigInt::from(n.pow(4))
        * BigInt::from(2 * l + 1)
        * big_factorial(l - m)
        * (&dd * &dd)
        * big_factorial(n - l - 1);
    let nl = big_factorial(n + l);
    let den = BigInt::from(2 * n * m) * big_factorial(l + m) * (&nl * &nl * &nl);
    Ok(BigRational::new(num, den))
}

/// `c_nlm` as a float.
pub fn coefficient_c(state: &HydrogenState) -> Result<f64> {
    Ok(coefficient_c_rational(state)?
        .to_f64()
        .expect("coefficient fits in f64"))
}

/// `c_nlm [(n+l)!]^2`: the prefactor left over once the old-convention
/// Laguerre squares are rewritten with the modern normalized polynomial.
/// This grouping stays finite for large n.
fn coefficient_c_eff(state: &HydrogenState) -> Result<f64> {
    let (n, l, m) = (state.n() as u64, state.l() as u64, state.m() as u64);
    if state.m() <= 0 {
        return Err(Error::Domain(format!(
            "spectral coefficients require m > 0, got {state}"
        )));
    }
    let dd = big_odd_double_factorial(m);
    let num = BigInt::from(n.pow(4))
        * BigInt::from(2 * l + 1)
        * big_factorial(l - m)
        * (&dd * &dd)
        * big_factorial(n - l - 1);
    let den = BigInt::from(2 * n * m) * big_factorial(l + m) * big_factorial(n + l);
    BigRational::new(num, den)
        .to_f64()
        .ok_or_else(|| Error::Domain("coefficient overflow".into()))
}

/// Bessel argument `z_{n,m}(omega) = (2/n) sqrt(m omega0 / omega)`.
pub fn bessel_argument(state: &HydrogenState, omega: f64) -> f64 {
    2.0 / state.n() as f64 * (state.m_abs() as f64 / omega).sqrt()
}

/// Noise spectral function from the general integral representation,
/// valid for every m > 0 state:
///
/// `S(omega) = (c_nlm/128) z^{2(3+m)}
///     int_z^inf e^{-rho} rho^{2(l-m)} [L_{n+l}^{2l+1}(rho)]^2
///     [C_{l-m}^{(m+1/2)}(xi)]^2 / xi  drho`,  `xi = sqrt(1-(z/rho)^2)`.
///
/// Evaluated after `rho = z cosh u`, which maps `drho/xi` to
/// `z cosh u du` and leaves a smooth integrand.
pub fn spectral_general(state: &HydrogenState, omega: f64, spec: &QuadSpec) -> Result<f64> {
    require_positive_m(state)?;
    if omega <= 0.0 {
        return Err(Error::Domain("spectral_general requires omega > 0".into()));
    }
    let z = bessel_argument(state, omega);
    if z >= RHO_CUT {
        return Ok(0.0); // e^{-z} underflow at and beyond the lower limit
    }
    let (n, l, m) = (state.n(), state.l(), state.m_abs());
    let c_eff = coefficient_c_eff(state)?;
    let k = n - l - 1;
    let alpha = (2 * l + 1) as f64;
    let geg_k = l - m;
    let geg_alpha = m as f64 + 0.5;
    let rho_pow = 2 * (l as i32 - m as i32);

    let u_max = (RHO_CUT / z).acosh();
    let integral = integrate(
        |u: f64| {
            let rho = z * u.cosh();
            let e = (-rho).exp();
            if e == 0.0 {
                return 0.0;
            }
            let lag = laguerre_modern(k, alpha, rho);
            let geg = gegenbauer(geg_k, geg_alpha, u.tanh());
            e * rho.powi(rho_pow) * lag * lag * geg * geg * z * u.cosh()
        },
        0.0,
        u_max,
        spec,
    )?;
    Ok(c_eff / 128.0 * z.powi(2 * (3 + m as i32)) * integral)
}

/// Quoted closed-form coefficient `c_n` of the l = m = n-1 family:
/// `(1/8) (2/n)^{2n} (n-1)^{n+1} [(2n-3)!!]^2 / (2n [(2n-2)!]^2)`.
pub fn edge_family_coefficient(n: u32) -> BigRational {
    assert!(n >= 2);
    let n = n as u64;
    let dd = big_odd_double_factorial(n - 1); // (2n-3)!!
    let f = big_factorial(2 * n - 2);
    let num = BigInt::from(2u64).pow(2 * n as u32) * BigInt::from(n - 1).pow(n as u32 + 1)
        * (&dd * &dd);
    let den = BigInt::from(8u64)
        * BigInt::from(n).pow(2 * n as u32)
        * BigInt::from(2 * n)
        * (&f * &f);
    BigRational::new(num, den)
}

/// The same coefficient derived from the general integral: for l = m = n-1
/// the Laguerre factor is the constant (2n-1)! and the Gegenbauer factor
/// is 1, so the integral is exactly z K_1(z) and
/// `c_n = c_{n,n-1,n-1} [(2n-1)!]^2 / 128 * (4(n-1)/n^2)^{n+2}`.
pub fn edge_family_coefficient_from_general(n: u32) -> Result<BigRational> {
    let state = HydrogenState::new(n, n - 1, n as i32 - 1)?;
    let c = coefficient_c_rational(&state)?;
    let lag = big_factorial(2 * n as u64 - 1);
    let ratio = BigRational::new(BigInt::from(4 * (n as u64 - 1)), BigInt::from((n * n) as u64));
    Ok(c * BigRational::new(&lag * &lag, BigInt::from(128)) * pow_rational(&ratio, (n + 2) as i64))
}

/// Coefficient of the l = n-1, m = n-2 family, derived from the general
/// integral (the Gegenbauer factor is (2n-3) xi, leaving z^2 K_2(z)):
/// `c_{n,n-1,n-2} [(2n-1)!]^2 (2n-3)^2 / 128 * (4(n-2)/n^2)^{n+1}`.
///
/// The commonly quoted closed form for this coefficient
/// ([`near_edge_family_coefficient_nominal`]) is inconsistent with the
/// general representation (off by 729/64 at n = 3); this derived value is
/// what reproduces the general quadrature, and the tests calibrate it
/// numerically against `spectral_general` before trusting it.
pub fn near_edge_family_coefficient(n: u32) -> Result<BigRational> {
    if n < 3 {
        return Err(Error::Domain(
            "the m = n-2 family needs n >= 3 for a positive m".into(),
        ));
    }
    let state = HydrogenState::new(n, n - 1, n as i32 - 2)?;
    let c = coefficient_c_rational(&state)?;
    let lag = big_factorial(2 * n as u64 - 1);
    let geg = BigInt::from(2 * n as u64 - 3);
    let ratio = BigRational::new(BigInt::from(4 * (n as u64 - 2)), BigInt::from((n * n) as u64));
    Ok(
        c * BigRational::new(&lag * &lag * &geg * &geg, BigInt::from(128))
            * pow_rational(&ratio, (n + 1) as i64),
    )
}

/// The quoted closed form
/// `c_{n,n-1,n-2} [(2n-1)! (2n-3)!!]^2 * 4(n-2) / (128 n^2)`,
/// kept only so the inconsistency with the general representation stays
/// demonstrable; do not use it to evaluate spectra.
pub fn near_edge_family_coefficient_nominal(n: u32) -> Result<BigRational> {
    if n < 3 {
        return Err(Error::Domain(
            "the m = n-2 family needs n >= 3 for a positive m".into(),
        ));
    }
    let state = HydrogenState::new(n, n - 1, n as i32 - 2)?;
    let c = coefficient_c_rational(&state)?;
    let lag = big_factorial(2 * n as u64 - 1);
    let dd = big_odd_double_factorial(n as u64 - 1); // (2n-3)!!
    let b = &lag * &dd;
    Ok(c * BigRational::new(
        &b * &b * BigInt::from(4 * (n as u64 - 2)),
        BigInt::from(128 * (n * n) as u64),
    ))
}

fn pow_rational(r: &BigRational, k: i64) -> BigRational {
    let mut acc = BigRational::one();
    for _ in 0..k.unsigned_abs() {
        acc *= r;
    }
    if k < 0 {
        acc.recip()
    } else {
        acc
    }
}

/// Numerically calibrate the m = n-2 family coefficient against the
/// general quadrature at a reference frequency (z = 1).
pub fn calibrate_near_edge_coefficient(n: u32, spec: &QuadSpec) -> Result<f64> {
    let state = HydrogenState::new(n, n - 1, n as i32 - 2)?;
    if state.m() <= 0 {
        return Err(Error::Domain("family needs m = n-2 > 0".into()));
    }
    // omega such that z_{n,n-2}(omega) = 1
    let omega = 4.0 * (n as f64 - 2.0) / (n * n) as f64;
    let s = spectral_general(&state, omega, spec)?;
    let shape = omega.powi(-(n as i32 + 1)) * bessel_k(2, 1.0)?;
    Ok(s / shape)
}

/// Closed Bessel-K spectral forms. Supported states: the families
/// (n, n-1, n-1) and (n, n-1, n-2) — which cover |211>, |322>, |321> —
/// plus |311>. Everything else should go through [`spectral_general`].
pub fn spectral_closed(state: &HydrogenState, omega: f64) -> Result<f64> {
    require_positive_m(state)?;
    if omega <= 0.0 {
        return Err(Error::Domain("spectral_closed requires omega > 0".into()));
    }
    let (n, l, m) = (state.n(), state.l(), state.m_abs());
    let z = bessel_argument(state, omega);
    if l == n - 1 && m == n - 1 {
        let c = edge_family_coefficient(n)
            .to_f64()
            .ok_or_else(|| Error::Domain("family coefficient overflow".into()))?;
        return Ok(c * omega.powi(-(n as i32 + 2)) * z * bessel_k(1, z)?);
    }
    if l == n - 1 && m + 2 == n {
        let c = near_edge_family_coefficient(n)?
            .to_f64()
            .ok_or_else(|| Error::Domain("family coefficient overflow".into()))?;
        return Ok(c * omega.powi(-(n as i32 + 1)) * z * z * bessel_k(2, z)?);
    }
    if (n, l, m) == (3, 1, 1) {
        let k1 = bessel_k(1, z)?;
        let k0 = bessel_k(0, z)?;
        return Ok(1.0 / 243.0
            * omega.powi(-4)
            * z
            * ((0.625 + z * z / 16.0) * k1 - 0.4375 * z * k0));
    }
    Err(Error::UnsupportedState(format!(
        "no closed form for {state}; use spectral_general"
    )))
}

/// Leading coefficient of the `omega^-(3+m)` high-frequency tail:
/// `C_nlm = (c_nlm/128) [C_{l-m}^{(m+1/2)}(1)]^2 (4m/n^2)^{3+m}
///          int_0^inf e^{-rho} rho^{2(l-m)} [L_{n+l}^{2l+1}(rho)]^2 drho`.
pub fn asymptotic_coeff_sqm(state: &HydrogenState, spec: &QuadSpec) -> Result<f64> {
    require_positive_m(state)?;
    let (n, l, m) = (state.n(), state.l(), state.m_abs());
    let c_eff = coefficient_c_eff(state)?;
    let geg1 = gegenbauer(l - m, m as f64 + 0.5, 1.0);
    let k = n - l - 1;
    let alpha = (2 * l + 1) as f64;
    let rho_pow = 2 * (l as i32 - m as i32);
    let integral = integrate_to_inf(
        |rho: f64| {
            let e = (-rho).exp();
            if e == 0.0 {
                return 0.0;
            }
            let lag = laguerre_modern(k, alpha, rho);
            e * rho.powi(rho_pow) * lag * lag
        },
        0.0,
        spec,
    )?;
    let scale = (4.0 * m as f64 / (n * n) as f64).powi(3 + m as i32);
    Ok(c_eff / 128.0 * geg1 * geg1 * scale * integral)
}

/// A spectral moment that may diverge (high moments hit the power-law
/// tail; divergence is physics here, not a failure).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Moment {
    Value(f64),
    Divergent,
}

impl Moment {
    pub fn value(&self) -> Option<f64> {
        match self {
            Moment::Value(v) => Some(*v),
            Moment::Divergent => None,
        }
    }
}

/// k-th moment `gamma^(k) = int omega^k S domega` over the full line.
///
/// Odd k vanish by evenness. k = 0 is `<x^2>`; k = 2 is `m/(2 n^3)` in
/// e^4/(mu a0) units; even k >= 2 + m are divergent (the tail falls as
/// `omega^-(3+m)`); remaining even k come from the trajectory expectation
/// `(m^k/2) <r^{2-2k} sin^{2-2k}(theta)>` by quadrature.
pub fn moment_sqm(state: &HydrogenState, k: u32) -> Result<Moment> {
    if k % 2 == 1 {
        return Ok(Moment::Value(0.0));
    }
    if k == 0 {
        return Ok(Moment::Value(x_squared_expectation(state)));
    }
    let m = state.m_abs();
    if m == 0 {
        // all the weight sits in the delta at omega = 0
        return Ok(Moment::Value(0.0));
    }
    if k >= 2 + m {
        return Ok(Moment::Divergent);
    }
    let n = state.n();
    if k == 2 {
        return Ok(Moment::Value(m as f64 / (2.0 * (n * n * n) as f64)));
    }
    // even k >= 4 with k < 2 + m
    let spec = QuadSpec::default();
    let s = *state;
    let radial = integrate(
        |r: f64| {
            let chi = crate::hydrogen::radial_wavefunction(&s, r);
            chi * chi * r.powi(4 - 2 * k as i32)
        },
        0.0,
        s.r_max(),
        &spec,
    )?;
    let nlm = crate::hydrogen::spherical_norm(s.l(), m);
    let angular = integrate(
        |u: f64| {
            let p = crate::numerics::assoc_legendre(s.l(), m, u).unwrap();
            p * p * (1.0 - u * u).powi(1 - k as i32)
        },
        -1.0,
        1.0,
        &spec,
    )? * 2.0
        * std::f64::consts::PI
        * nlm
        * nlm;
    Ok(Moment::Value(
        0.5 * (m as f64).powi(k as i32) * radial * angular,
    ))
}

/// Two-time correlation `Phi(tau) = E[(1/2) r^2 sin^2(theta) cos(Omega tau)]`
/// over the quantum-equilibrium ensemble. The phi0 average is analytic;
/// Monte Carlo runs over (r0, theta0) only. m = 0 gives the constant <x^2>.
pub fn correlation_sqm(
    state: &HydrogenState,
    tau_grid: &[f64],
    ensemble: &TrajectoryEnsemble,
) -> Vec<(f64, f64)> {
    let m = state.m() as f64;
    let data: Vec<(f64, f64)> = ensemble
        .points
        .iter()
        .map(|p| {
            let s = p.theta0.sin();
            let w = 0.5 * p.r0 * p.r0 * s * s;
            let omega = if state.m() == 0 {
                0.0
            } else {
                m / (p.r0 * p.r0 * s * s)
            };
            (w, omega)
        })
        .collect();
    let inv_n = 1.0 / data.len() as f64;
    tau_grid
        .iter()
        .map(|&tau| {
            let phi: f64 = data.iter().map(|(w, om)| w * (om * tau).cos()).sum();
            (tau, phi * inv_n)
        })
        .collect()
}

/// Monte Carlo spectrum estimate: a weighted histogram of the trajectory
/// frequencies `Omega` with weights `r^2 sin^2(theta)/4`, over caller-
/// supplied bin edges. Unbiased per bin for the bin-averaged spectrum,
/// with per-bin standard errors from the within-bin second moments.
pub fn spectral_mc(
    state: &HydrogenState,
    bin_edges: &[f64],
    ensemble: &TrajectoryEnsemble,
) -> Result<SpectralFunction> {
    require_positive_m(state)?;
    if bin_edges.len() < 2 || bin_edges.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain(
            "bin edges must be strictly increasing with at least two entries".into(),
        ));
    }
    if ensemble.state != *state {
        return Err(Error::Domain(
            "ensemble was drawn for a different state".into(),
        ));
    }
    let nbins = bin_edges.len() - 1;
    let mut sum = vec![0.0f64; nbins];
    let mut sum2 = vec![0.0f64; nbins];
    let m = state.m() as f64;
    let n_samples = ensemble.points.len() as f64;
    for p in &ensemble.points {
        let s = p.theta0.sin();
        let rho2 = p.r0 * p.r0 * s * s;
        let omega = m / rho2;
        if omega < bin_edges[0] || omega >= bin_edges[nbins] {
            continue;
        }
        let j = match bin_edges.binary_search_by(|e| e.total_cmp(&omega)) {
            Ok(i) => i.min(nbins - 1),
            Err(i) => i - 1,
        };
        let w = 0.25 * rho2; // r^2 sin^2(theta) / 4
        let dw = w / (bin_edges[j + 1] - bin_edges[j]);
        sum[j] += dw;
        sum2[j] += dw * dw;
    }
    let samples = (0..nbins)
        .map(|j| {
            let mean = sum[j] / n_samples;
            let stderr = if sum[j] == 0.0 {
                None
            } else {
                let var = (sum2[j] / n_samples - mean * mean).max(0.0) / n_samples;
                Some(var.sqrt())
            };
            SpectralSample {
                omega: 0.5 * (bin_edges[j] + bin_edges[j + 1]),
                value: mean,
                stderr,
            }
        })
        .collect();
    Ok(SpectralFunction {
        state: *state,
        method: SpectralMethod::MonteCarlo,
        samples,
        delta_line: None,
        tail: Some(tail_model(state)?),
        bin_edges: Some(bin_edges.to_vec()),
        quad: QuadSpec::default(),
        seed: Some(ensemble.seed),
    })
}
