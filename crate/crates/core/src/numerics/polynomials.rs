//! Orthogonal polynomials and Gamma-function helpers.

use crate::error::{Error, Result};

/// n! as f64. Exact up to 22!, accurate to f64 precision afterwards.
pub(crate) fn factorial(n: u64) -> f64 {
    assert!(n <= 170, "factorial overflows f64 for n > 170");
    let mut acc = 1.0;
    for k in 2..=n {
        acc *= k as f64;
    }
    acc
}

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Gamma(x) for x > 0 (Lanczos approximation, ~1e-13 relative).
pub(crate) fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma requires x > 0");
    if x < 0.5 {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return (std::f64::consts::PI / (std::f64::consts::PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEFFS[0];
    for (i, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Gamma(x) for real x, poles at non-positive integers reported as errors.
pub fn gamma(x: f64) -> Result<f64> {
    if x <= 0.0 && (x - x.round()).abs() < 1e-12 {
        return Err(Error::Pole(format!("Gamma pole at x = {x}")));
    }
    if x < 0.5 {
        // reflection formula
        let s = (std::f64::consts::PI * x).sin();
        Ok(std::f64::consts::PI / (s * gamma(1.0 - x)?))
    } else {
        Ok(ln_gamma(x).exp())
    }
}

/// Modern normalized associated Laguerre polynomial `Lt_k^{(alpha)}(x)`,
/// with `Lt_k^{(alpha)}(0) = C(k+alpha, k)`. Three-term recurrence.
pub fn laguerre_modern(k: u32, alpha: f64, x: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut lm1 = 1.0;
    let mut l = 1.0 + alpha - x;
    for j in 1..k {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + alpha - x) * l - (jf + alpha) * lm1) / (jf + 1.0);
        lm1 = l;
        l = next;
    }
    l
}

/// Associated Laguerre polynomial in the old convention:
/// `L_q^p = (d/dx)^p L_q` with `L_q(x) = e^x (d/dx)^q (x^q e^-x)`.
///
/// Bridge to the modern polynomial: `L_q^p(x) = (-1)^p q! Lt_{q-p}^{(p)}(x)`.
pub fn assoc_laguerre_old(q: u32, p: u32, x: f64) -> Result<f64> {
    if p > q {
        return Err(Error::Domain(format!(
            "assoc_laguerre_old requires p <= q, got q={q}, p={p}"
        )));
    }
    let sign = if p.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign * factorial(q as u64) * laguerre_modern(q - p, p as f64, x))
}

/// Associated Legendre function `P_l^m(x)` on [-1, 1] for 0 <= m <= l,
/// without the Condon-Shortley phase: `P_1^1(x) = +sqrt(1 - x^2)`.
pub fn assoc_legendre(l: u32, m: u32, x: f64) -> Result<f64> {
    if m > l {
        return Err(Error::Domain(format!(
            "assoc_legendre requires m <= l, got l={l}, m={m}"
        )));
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!(
            "assoc_legendre requires |x| <= 1, got x={x}"
        )));
    }
    // P_m^m = (2m-1)!! (1-x^2)^{m/2}, then upward in l.
    let mut pmm = 1.0;
    if m > 0 {
        let somx2 = ((1.0 - x) * (1.0 + x)).sqrt();
        let mut fact = 1.0;
        for _ in 0..m {
            pmm *= fact * somx2;
            fact += 2.0;
        }
    }
    if l == m {
        return Ok(pmm);
    }
    let mut pm1 = pmm;
    let mut p = x * (2.0 * m as f64 + 1.0) * pmm; // P_{m+1}^m
    for ll in (m + 2)..=l {
        let llf = ll as f64;
        let mf = m as f64;
        let next = (x * (2.0 * llf - 1.0) * p - (llf + mf - 1.0) * pm1) / (llf - mf);
        pm1 = p;
        p = next;
    }
    Ok(p)
}

/// `P_l^m(u)` together with its first and second derivatives in `u`.
///
/// First derivative from `(1-u^2) P'_l^m = (l+m) P_{l-1}^m - l u P_l^m`;
/// the second derivative differentiates that relation once more, so no
/// eigenvalue identity is baked in.
pub(crate) fn assoc_legendre_derivs(l: u32, m: u32, u: f64) -> Result<(f64, f64, f64)> {
    let p = assoc_legendre(l, m, u)?;
    let pl1 = if m < l {
        assoc_legendre(l - 1, m, u)?
    } else {
        0.0
    };
    let one_m_u2 = 1.0 - u * u;
    if one_m_u2.abs() < 1e-14 {
        return Err(Error::Domain(
            "assoc_legendre_derivs is singular at u = +-1".into(),
        ));
    }
    let lf = l as f64;
    let mf = m as f64;
    let dp = ((lf + mf) * pl1 - lf * u * p) / one_m_u2;
    // d/du of P_{l-1}^m by the same rule, one level down.
    let dpl1 = if l >= 1 {
        let pl2 = if l >= 2 && m <= l - 2 {
            assoc_legendre(l - 2, m, u)?
        } else {
            0.0
        };
        ((lf - 1.0 + mf) * pl2 - (lf - 1.0) * u * pl1) / one_m_u2
    } else {
        0.0
    };
    let d2p = ((lf + mf) * dpl1 - lf * p - lf * u * dp) / one_m_u2
        + 2.0 * u * ((lf + mf) * pl1 - lf * u * p) / (one_m_u2 * one_m_u2);
    Ok((p, dp, d2p))
}

/// Gegenbauer (ultraspherical) polynomial `C_k^{(alpha)}(x)`.
pub fn gegenbauer(k: u32, alpha: f64, x: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut cm1 = 1.0;
    let mut c = 2.0 * alpha * x;
    for j in 2..=k {
        let jf = j as f64;
        let next = (2.0 * x * (jf + alpha - 1.0) * c - (jf + 2.0 * alpha - 2.0) * cm1) / jf;
        cm1 = c;
        c = next;
    }
    c
}

/// 1/Gamma(x), entire in x: exact 0 at the non-positive integers.
fn recip_gamma(x: f64) -> f64 {
    if x <= 0.0 && (x - x.round()).abs() < 1e-300 {
        return 0.0;
    }
    match gamma(x) {
        Ok(g) => 1.0 / g,
        Err(_) => 0.0,
    }
}

/// Ferrers function of the first kind `P_nu^mu` at the origin.
///
/// The trigonometric Gamma-quotient form has removable pole/zero
/// collisions; with `sin(pi c) Gamma(c) = pi / Gamma(1-c)` it collapses
/// to the pole-free `2^mu sqrt(pi) / (Gamma(1-c) Gamma((nu-mu)/2 + 1))`,
/// `c = (nu+mu+1)/2`, which vanishes identically where it should.
pub fn legendre_p_at_zero(nu: f64, mu: f64) -> Result<f64> {
    if !nu.is_finite() || !mu.is_finite() {
        return Err(Error::Domain("legendre_p_at_zero needs finite orders".into()));
    }
    let c = 0.5 * (nu + mu + 1.0);
    Ok(2f64.powf(mu)
        * std::f64::consts::PI.sqrt()
        * recip_gamma(1.0 - c)
        * recip_gamma(0.5 * (nu - mu) + 1.0))
}

/// d/dx of the Ferrers function `P_nu^mu` at the origin, in the same
/// pole-free reciprocal-Gamma form with `s = (nu+mu)/2`:
/// `2^{mu+1} sqrt(pi) s / (Gamma(1-s) Gamma((nu-mu+1)/2))`.
pub fn legendre_p_deriv_at_zero(nu: f64, mu: f64) -> Result<f64> {
    if !nu.is_finite() || !mu.is_finite() {
        return Err(Error::Domain(
            "legendre_p_deriv_at_zero needs finite orders".into(),
        ));
    }
    let s = 0.5 * (nu + mu);
    Ok(2f64.powf(mu + 1.0)
        * std::f64::consts::PI.sqrt()
        * s
        * recip_gamma(1.0 - s)
        * recip_gamma(0.5 * (nu - mu) + 0.5))
}
