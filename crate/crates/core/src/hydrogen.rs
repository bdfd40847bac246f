//! Hydrogen bound states, densities, dipole matrix elements and one-time
//! expectation values.
//!
//! Internal units: `hbar = mu = e = a0 = 1`, hence `omega0 = 1` and
//! `E_n = -1/(2 n^2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{self, assoc_legendre, integrate, laguerre_modern, QuadSpec};

/// A bound state |n l m> of the hydrogen atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HydrogenState {
    n: u32,
    l: u32,
    m: i32,
}

impl HydrogenState {
    pub fn new(n: u32, l: u32, m: i32) -> Result<Self> {
        if n < 1 {
            return Err(Error::Domain(
                "principal quantum number must be >= 1".into(),
            ));
        }
        if l > n - 1 {
            return Err(Error::Domain(format!(
                "orbital quantum number must satisfy 0 <= l <= n-1, got n={n}, l={l}"
            )));
        }
        if m.unsigned_abs() > l {
            return Err(Error::Domain(format!(
                "magnetic quantum number must satisfy |m| <= l, got l={l}, m={m}"
            )));
        }
        Ok(HydrogenState { n, l, m })
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn l(&self) -> u32 {
        self.l
    }
    pub fn m(&self) -> i32 {
        self.m
    }
    pub fn m_abs(&self) -> u32 {
        self.m.unsigned_abs()
    }

    /// Radial quadrature cutoff; the bound tail beyond 20 n^2 is below
    /// 1e-16 of the norm.
    pub(crate) fn r_max(&self) -> f64 {
        20.0 * (self.n * self.n) as f64
    }
}

impl std::fmt::Display for HydrogenState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "|{} {} {}>", self.n, self.l, self.m)
    }
}

/// The internal unit system. All members are 1 by construction; the struct
/// exists so exported metadata can state the convention explicitly.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct UnitSystem {
    pub a0: f64,
    pub mu: f64,
    pub e: f64,
    pub hbar: f64,
    pub omega0: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        let (a0, mu, e, hbar) = (1.0, 1.0, 1.0, 1.0);
        UnitSystem {
            a0,
            mu,
            e,
            hbar,
            omega0: hbar / (mu * a0 * a0),
        }
    }
}

/// Bound-state energy `E_n = -omega0 / (2 n^2)`.
pub fn energy(n: u32) -> f64 {
    assert!(n >= 1);
    -0.5 / (n * n) as f64
}

/// Transition frequency `omega_MN = E_M - E_N` between principal levels.
pub fn transition_frequency(n_upper: u32, n_lower: u32) -> f64 {
    energy(n_upper) - energy(n_lower)
}

/// sqrt((n-l-1)! / (n+l)!) without overflow.
fn norm_factor(n: u32, l: u32) -> f64 {
    (0.5 * (numerics::ln_gamma((n - l) as f64) - numerics::ln_gamma((n + l + 1) as f64))).exp()
}

/// Radial wavefunction `chi_nl(r)`, normalized as
/// `int_0^inf chi^2 r^2 dr = 1` and positive near the origin.
///
/// Equivalent to the old-Laguerre form
/// `-(2/n^2) sqrt((n-l-1)!/[(n+l)!]^3) rho^l e^{-rho/2} L_{n+l}^{2l+1}(rho)`
/// with `rho = 2r/n`; the modern-polynomial grouping used here is
/// overflow-safe for large n (the equivalence is pinned by a test).
pub fn radial_wavefunction(state: &HydrogenState, r: f64) -> f64 {
    let (n, l) = (state.n, state.l);
    let rho = 2.0 * r / n as f64;
    2.0 / (n * n) as f64
        * norm_factor(n, l)
        * rho.powi(l as i32)
        * (-0.5 * rho).exp()
        * laguerre_modern(n - l - 1, (2 * l + 1) as f64, rho)
}

/// `chi_nl` with its first and second radial derivatives.
///
/// Uses d/dx Lt_k^{(a)} = -Lt_{k-1}^{(a+1)}, so the derivatives are exact
/// polynomial manipulations, not finite differences.
pub(crate) fn radial_wavefunction_derivs(state: &HydrogenState, r: f64) -> (f64, f64, f64) {
    let (n, l) = (state.n, state.l);
    let nf = n as f64;
    let lf = l as f64;
    let rho = 2.0 * r / nf;
    let c = 2.0 / (nf * nf) * norm_factor(n, l);
    let alpha = (2 * l + 1) as f64;
    let k = n - l - 1;

    let lag = laguerre_modern(k, alpha, rho);
    let dlag = if k >= 1 {
        -laguerre_modern(k - 1, alpha + 1.0, rho)
    } else {
        0.0
    };
    let d2lag = if k >= 2 {
        laguerre_modern(k - 2, alpha + 2.0, rho)
    } else {
        0.0
    };

    let powl = rho.powi(l as i32);
    let powl1 = if l >= 1 { rho.powi(l as i32 - 1) } else { 0.0 };
    let powl2 = if l >= 2 { rho.powi(l as i32 - 2) } else { 0.0 };
    let e = (-0.5 * rho).exp();

    let f = powl * e * lag;
    let df = e * (lf * powl1 * lag - 0.5 * powl * lag + powl * dlag);
    let d2f = e * (lf * (lf - 1.0) * powl2 * lag - lf * powl1 * lag
        + 2.0 * lf * powl1 * dlag
        + 0.25 * powl * lag
        - powl * dlag
        + powl * d2lag);

    let drho = 2.0 / nf;
    (c * f, c * df * drho, c * d2f * drho * drho)
}

/// Spherical-harmonic normalization `N_lm`, unit norm on the sphere.
pub(crate) fn spherical_norm(l: u32, m_abs: u32) -> f64 {
    let lf = l as f64;
    let ratio =
        (numerics::ln_gamma((l - m_abs + 1) as f64) - numerics::ln_gamma((l + m_abs + 1) as f64))
            .exp();
    ((2.0 * lf + 1.0) / (4.0 * std::f64::consts::PI) * ratio).sqrt()
}

/// Quantum-equilibrium probability density `|psi_nlm|^2` at (r, theta);
/// phi-independent for eigenstates and normalized so that
/// `int density r^2 sin(theta) dr dtheta dphi = 1`.
pub fn density(state: &HydrogenState, r: f64, theta: f64) -> f64 {
    let chi = radial_wavefunction(state, r);
    let p = assoc_legendre(state.l, state.m_abs(), theta.cos())
        .expect("theta in [0, pi] maps into the Legendre domain");
    let nlm = spherical_norm(state.l, state.m_abs());
    chi * chi * nlm * nlm * p * p
}

/// Exact angular matrix element `<l2 m2| sin(theta) cos(phi) |l1 m1>` for
/// harmonics `N_lm P_l^{|m|} e^{i m phi}` in the fixed-positive Legendre
/// convention. Zero off the selection rules l2 = l1 +- 1, m2 = m1 +- 1.
///
/// Closed form from the two sqrt(1-u^2) ladder identities plus Legendre
/// orthogonality; validated against 2D quadrature in the tests.
pub(crate) fn angular_x_integral(l2: u32, m2: i32, l1: u32, m1: i32) -> f64 {
    if (m2 - m1).abs() != 1 {
        return 0.0;
    }
    if l2 + 1 != l1 && l2 != l1 + 1 {
        return 0.0;
    }
    let b1 = m1.unsigned_abs();
    let b2 = m2.unsigned_abs();
    let l = l1 as f64;
    let b = b1 as f64;
    let fact = |a: i64| -> f64 {
        debug_assert!(a >= 0);
        numerics::factorial(a as u64)
    };
    let (l1i, b1i) = (l1 as i64, b1 as i64);

    // J = int_{-1}^{1} P_{l2}^{b2} P_{l1}^{b1} sqrt(1-u^2) du
    let j = if b2 == b1 + 1 {
        if l2 == l1 + 1 {
            2.0 * fact(l1i + b1i + 2) / ((2.0 * l + 1.0) * (2.0 * l + 3.0) * fact(l1i - b1i))
        } else if l1i - b1i - 2 >= 0 {
            -2.0 * fact(l1i + b1i) / ((2.0 * l + 1.0) * (2.0 * l - 1.0) * fact(l1i - b1i - 2))
        } else {
            0.0 // P_{l1-1}^{b1+1} vanishes identically
        }
    } else if b1 == b2 + 1 {
        if l2 + 1 == l1 {
            (l + b) * (l + b - 1.0) * 2.0 * fact(l1i + b1i - 2)
                / ((2.0 * l + 1.0) * (2.0 * l - 1.0) * fact(l1i - b1i))
        } else {
            -(l - b + 1.0) * (l - b + 2.0) * 2.0 * fact(l1i + b1i)
                / ((2.0 * l + 1.0) * (2.0 * l + 3.0) * fact(l1i - b1i + 2))
        }
    } else {
        unreachable!("|m2 - m1| = 1 forces |m2| = |m1| +- 1");
    };
    std::f64::consts::PI * spherical_norm(l2, b2) * spherical_norm(l1, b1) * j
}

/// Dipole matrix element `<bra| x |ket>` in units of e a0. Exactly zero
/// when the selection rules l' = l +- 1, m' = m +- 1 fail; otherwise the
/// product of an adaptive radial integral and the exact angular factor.
pub fn dipole_x_matrix_element(bra: &HydrogenState, ket: &HydrogenState) -> Result<f64> {
    let ang = angular_x_integral(bra.l, bra.m, ket.l, ket.m);
    if ang == 0.0 {
        return Ok(0.0);
    }
    let spec = QuadSpec::default();
    let r_max = bra.r_max().max(ket.r_max());
    let (bra_c, ket_c) = (*bra, *ket);
    let radial = integrate(
        |r: f64| radial_wavefunction(&bra_c, r) * radial_wavefunction(&ket_c, r) * r * r * r,
        0.0,
        r_max,
        &spec,
    )?;
    Ok(radial * ang)
}

/// The angular bracket shared by the moment formulas,
/// `1 - (l+m+1)(l-m+1)/((2l+1)(2l+3)) - (l+m)(l-m)/((2l+1)(2l-1))`,
/// equal to the expectation of sin^2(theta) in |l m>.
pub(crate) fn sin2_bracket(l: u32, m: i32) -> f64 {
    let lf = l as f64;
    let mf = m as f64;
    let t1 = (lf + mf + 1.0) * (lf - mf + 1.0) / ((2.0 * lf + 1.0) * (2.0 * lf + 3.0));
    let t2 = if l == 0 {
        0.0
    } else {
        (lf + mf) * (lf - mf) / ((2.0 * lf + 1.0) * (2.0 * lf - 1.0))
    };
    1.0 - t1 - t2
}

/// `<x^2>_nlm = (1/4) n^2 [5n^2 + 1 - 3l(l+1)] * <sin^2 theta>_lm` in a0^2
/// units; also the shared zeroth moment gamma^(0) of both theories.
pub fn x_squared_expectation(state: &HydrogenState) -> f64 {
    let n2 = (state.n * state.n) as f64;
    let lf = state.l as f64;
    0.25 * n2 * (5.0 * n2 + 1.0 - 3.0 * lf * (lf + 1.0)) * sin2_bracket(state.l, state.m)
}
