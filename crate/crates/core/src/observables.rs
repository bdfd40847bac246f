//! Theory-comparison layer: numeric spectral moments, cross sections,
//! power-law asymptote fits and side-by-side moment reports.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hydrogen::{x_squared_expectation, HydrogenState};
use crate::numerics::{integrate, QuadSpec};
use crate::qm::{self, LineSpectrum};
use crate::sqm::{self, Moment, SpectralFunction, SpectralMethod};

/// Fine-structure constant used by the cross-section conversion; the
/// physical value is configurable at the call site.
pub const ALPHA_QED: f64 = 1.0 / 137.035999;

/// `sigma_tot(omega) = 8 pi^2 alpha [omega S(omega)]`. With S in
/// e^2 a0^2/omega0 and omega in omega0 the result is an area in a0^2.
pub fn cross_section(s_value: f64, omega: f64, alpha: f64) -> f64 {
    8.0 * std::f64::consts::PI * std::f64::consts::PI * alpha * omega * s_value
}

/// k-th full-line moment of a sampled spectrum.
///
/// Odd k vanish by evenness. Divergence is decided by the attached tail
/// exponent (k >= exponent - 1), never by quadrature heuristics. For the
/// deterministic methods the even moments are evaluated by adaptive
/// quadrature in the variable z with omega = s/z^2 (s = 4m/n^2), which
/// compresses the low-frequency mass and covers the whole half line; for
/// Monte Carlo histograms the sampled bins are summed and the analytic
/// power-law tail is added beyond the last bin.
pub fn numeric_moment(spectrum: &SpectralFunction, k: u32) -> Result<Moment> {
    if k % 2 == 1 {
        return Ok(Moment::Value(0.0));
    }
    if let Some((_, weight)) = spectrum.delta_line {
        // m = 0: all weight at omega = 0
        return Ok(Moment::Value(if k == 0 { weight } else { 0.0 }));
    }
    let tail = spectrum.tail.ok_or_else(|| {
        Error::InsufficientCoverage("spectrum carries no tail model".into())
    })?;
    if k as f64 >= tail.exponent - 1.0 {
        return Ok(Moment::Divergent);
    }
    match spectrum.method {
        SpectralMethod::ClosedForm | SpectralMethod::GeneralQuadrature => {
            let state = spectrum.state;
            let s_scale = 4.0 * state.m_abs() as f64 / (state.n() * state.n()) as f64;
            let outer = QuadSpec {
                rel_tol: 1e-9,
                abs_tol: 1e-18,
                max_subdivisions: 2000,
            };
            let ki = k as i32;
            let inner_err: std::cell::RefCell<Option<Error>> = std::cell::RefCell::new(None);
            let val = integrate(
                |z: f64| {
                    if z <= 0.0 {
                        return 0.0;
                    }
                    let omega = s_scale / (z * z);
                    let s = match spectrum.evaluate(omega) {
                        Ok(s) => s,
                        Err(e) => {
                            inner_err.borrow_mut().get_or_insert(e);
                            return 0.0;
                        }
                    };
                    if s == 0.0 {
                        return 0.0;
                    }
                    omega.powi(ki) * s * 2.0 * s_scale / (z * z * z)
                },
                0.0,
                760.0,
                &outer,
            )?;
            if let Some(e) = inner_err.into_inner() {
                return Err(e);
            }
            Ok(Moment::Value(2.0 * val))
        }
        SpectralMethod::MonteCarlo => {
            let edges = spectrum.bin_edges.as_deref().ok_or_else(|| {
                Error::InsufficientCoverage("Monte Carlo spectrum lost its bin edges".into())
            })?;
            if spectrum.samples.is_empty() {
                return Err(Error::InsufficientCoverage(
                    "Monte Carlo spectrum has no bins".into(),
                ));
            }
            // Left coverage: a first bin carrying a sizable share of the
            // peak means the histogram truncates real low-frequency mass
            // (the spectrum only decays exponentially below its peak).
            let peak = spectrum
                .samples
                .iter()
                .map(|s| s.value)
                .fold(0.0f64, f64::max);
            let first = spectrum.samples[0].value;
            if peak > 0.0 && first > 0.05 * peak {
                return Err(Error::InsufficientCoverage(format!(
                    "first bin holds {:.1}% of the peak: the grid starts above the \
                     spectral maximum",
                    100.0 * first / peak
                )));
            }
            let mut total = 0.0;
            for (s, w) in spectrum.samples.iter().zip(edges.windows(2)) {
                total += s.omega.powi(k as i32) * s.value * (w[1] - w[0]);
            }
            let omega_last = *edges.last().expect("non-empty");
            // analytic tail beyond the sampled range
            let p = tail.exponent - k as f64; // integrand ~ omega^-p, p > 1
            let remainder = tail.coefficient * omega_last.powf(1.0 - p) / (p - 1.0);
            if remainder > 0.05 * total.abs().max(f64::MIN_POSITIVE) {
                return Err(Error::InsufficientCoverage(format!(
                    "tail remainder {remainder:e} exceeds 5% of the sampled moment {total:e}"
                )));
            }
            Ok(Moment::Value(2.0 * (total + remainder)))
        }
    }
}

/// Full-line moment of a discrete line spectrum: the bound-state sum,
/// with the divergence rule from the attached tail model. Odd moments
/// cancel exactly by the +-pairing.
pub fn numeric_moment_lines(spectrum: &LineSpectrum, k: u32) -> Moment {
    if let Some(tail) = spectrum.tail {
        if k as f64 >= tail.exponent - 1.0 {
            return Moment::Divergent;
        }
    }
    Moment::Value(
        spectrum
            .lines
            .iter()
            .map(|l| l.weight * l.omega.powi(k as i32))
            .sum(),
    )
}

/// Least-squares power-law fit in log-log coordinates.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AsymptoteFit {
    pub fitted_exponent: f64,
    pub fitted_coefficient: f64,
    pub fit_window: (f64, f64),
    pub r_squared: f64,
}

/// Fit `S ~ coefficient * omega^exponent` over the samples inside the
/// window. Requires at least 10 strictly positive samples there.
pub fn fit_asymptote(spectrum: &SpectralFunction, window: (f64, f64)) -> Result<AsymptoteFit> {
    if !(window.0 > 0.0 && window.1 > window.0) {
        return Err(Error::Domain("degenerate fit window".into()));
    }
    let pts: Vec<(f64, f64)> = spectrum
        .samples
        .iter()
        .filter(|s| s.omega >= window.0 && s.omega <= window.1)
        .map(|s| (s.omega, s.value))
        .collect();
    if pts.len() < 10 {
        return Err(Error::Domain(format!(
            "need >= 10 samples in the fit window, found {}",
            pts.len()
        )));
    }
    if pts.iter().any(|&(_, v)| v <= 0.0) {
        return Err(Error::Domain(
            "fit window contains non-positive values".into(),
        ));
    }
    let logs: Vec<(f64, f64)> = pts.iter().map(|&(w, v)| (w.ln(), v.ln())).collect();
    let n = logs.len() as f64;
    let sx: f64 = logs.iter().map(|p| p.0).sum();
    let sy: f64 = logs.iter().map(|p| p.1).sum();
    let sxx: f64 = logs.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = logs.iter().map(|p| p.0 * p.1).sum();
    let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    let intercept = (sy - slope * sx) / n;
    let mean_y = sy / n;
    let ss_tot: f64 = logs.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let ss_res: f64 = logs
        .iter()
        .map(|p| (p.1 - slope * p.0 - intercept).powi(2))
        .sum();
    let r_squared = if ss_tot == 0.0 {
        1.0
    } else {
        (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
    };
    Ok(AsymptoteFit {
        fitted_exponent: slope,
        fitted_coefficient: intercept.exp(),
        fit_window: window,
        r_squared,
    })
}

/// Side-by-side moments of the two theories for one state.
#[derive(Debug, Clone, Serialize)]
pub struct MomentReport {
    pub state: HydrogenState,
    /// Shared zeroth moment, (e a0)^2. Same closed form in both theories.
    pub gamma0: f64,
    /// Trajectory-theory second moment, e^4/(mu a0).
    pub gamma2_sqm: Moment,
    /// Conventional-QM second moment, e^4/(mu a0).
    pub gamma2_qm: f64,
    /// gamma0 recomputed as 2 int S domega by quadrature.
    pub gamma0_numeric: Option<f64>,
    /// SQM gamma2 recomputed as 2 int omega^2 S domega by quadrature.
    pub gamma2_numeric: Option<f64>,
    /// QM gamma2 recomputed from the independent expectation <x^2/r^3>.
    pub gamma2_qm_numeric: f64,
}

/// The semiclassical check available on circular states l = m = n-1:
/// `n^2 gamma2` in e^4/(2 a0 mu) units for both theories and their ratio.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SemiclassicalCheck {
    pub n2_gamma2_sqm: f64,
    pub n2_gamma2_qm: f64,
    pub ratio_qm_over_sqm: f64,
}

/// Everything `compare_theories` produces.
#[derive(Debug, Clone, Serialize)]
pub struct TheoryComparison {
    pub report: MomentReport,
    /// Predicted tail exponents: 3 + m (trajectory) vs 4 + l + 1/2 (QM).
    pub sqm_exponent: f64,
    pub qm_exponent: f64,
    pub qm_tail_coefficient: f64,
    pub semiclassical: Option<SemiclassicalCheck>,
}

/// Full comparison report for one state. For m = 0 the trajectory side is
/// a pure delta line (gamma2_sqm = 0); for m > 0 the closed-form or
/// general spectrum is integrated numerically as a cross-check.
pub fn compare_theories(
    state: &HydrogenState,
    _n_max: u32,
    spec: &QuadSpec,
) -> Result<TheoryComparison> {
    let gamma0 = x_squared_expectation(state);
    let gamma2_sqm = sqm::moment_sqm(state, 2)?;
    let gamma2_qm = qm::moment_qm(state, 2)?;
    let gamma2_qm_numeric = 2.0 * qm::x2_over_r3_expectation(state)?;

    let (gamma0_numeric, gamma2_numeric) = if state.m_abs() > 0 {
        let st_pos = HydrogenState::new(state.n(), state.l(), state.m_abs() as i32)?;
        let sf = match SpectralFunction::closed_form(&st_pos, &[]) {
            Ok(sf) => sf,
            Err(Error::UnsupportedState(_)) => SpectralFunction::general(&st_pos, &[], spec)?,
            Err(e) => return Err(e),
        };
        let g0 = numeric_moment(&sf, 0)?.value();
        let g2 = numeric_moment(&sf, 2)?.value();
        (g0, g2)
    } else {
        (Some(gamma0), Some(0.0))
    };

    let (qm_tail_coefficient, qm_exponent) = qm::tail_coeff_qm(state)?;
    let semiclassical = if state.l() == state.n() - 1 && state.m_abs() == state.n() - 1 {
        let n = state.n();
        let nf = n as f64;
        // e^4/(2 a0 mu) units: gamma2 doubles
        let sqm_units = nf * nf * 2.0 * (state.m_abs() as f64 / (2.0 * nf.powi(3)));
        let qm_units = nf * nf * 2.0 * qm::moment2_qm_circular(n);
        Some(SemiclassicalCheck {
            n2_gamma2_sqm: sqm_units,
            n2_gamma2_qm: qm_units,
            ratio_qm_over_sqm: qm_units / sqm_units,
        })
    } else {
        None
    };

    Ok(TheoryComparison {
        report: MomentReport {
            state: *state,
            gamma0,
            gamma2_sqm,
            gamma2_qm,
            gamma0_numeric,
            gamma2_numeric,
            gamma2_qm_numeric,
        },
        sqm_exponent: 3.0 + state.m_abs() as f64,
        qm_exponent,
        qm_tail_coefficient,
        semiclassical,
    })
}
