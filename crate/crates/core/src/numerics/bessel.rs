//! Modified Bessel functions of the second kind, integer order.

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const MAX_ITER: usize = 1000;

/// Series/continued-fraction crossover. Validated against the
/// integral-representation oracle in the tests.
const SERIES_CUTOFF: f64 = 2.0;

/// K_0 and K_1 by the ascending series, for z <= SERIES_CUTOFF.
fn k01_series(z: f64) -> (f64, f64) {
    let t = 0.25 * z * z;
    let lhalf = (0.5 * z).ln();

    // I_0, I_1 and the psi-weighted sums in one pass.
    let mut i0 = 1.0;
    let mut i1 = 0.5 * z;
    let mut k0_sum = 0.0; // sum_{k>=1} t^k/(k!)^2 * H_k
    let mut k1_sum = 1.0 - 2.0 * EULER_GAMMA; // k = 0 term of sum (psi(k+1)+psi(k+2)) t^k/(k!(k+1)!)
    let mut term0 = 1.0; // t^k/(k!)^2
    let mut term1 = 1.0; // t^k/(k!(k+1)!)
    let mut h = 0.0; // H_k
    for k in 1..60 {
        let kf = k as f64;
        term0 *= t / (kf * kf);
        term1 *= t / (kf * (kf + 1.0));
        h += 1.0 / kf;
        i0 += term0;
        i1 += 0.5 * z * term1;
        k0_sum += term0 * h;
        // psi(k+1) + psi(k+2) = -2*gamma + 2 H_k + 1/(k+1)
        k1_sum += term1 * (-2.0 * EULER_GAMMA + 2.0 * h + 1.0 / (kf + 1.0));
        if term0 < 1e-18 && term1 < 1e-18 {
            break;
        }
    }
    let k0 = -(lhalf + EULER_GAMMA) * i0 + k0_sum;
    let k1 = 1.0 / z + lhalf * i1 - 0.25 * z * k1_sum;
    (k0, k1)
}

/// K_0 and K_1 by the Steed continued fraction (CF2), for z > SERIES_CUTOFF.
fn k01_cf2(z: f64) -> Result<(f64, f64)> {
    let eps = f64::EPSILON;
    let a1 = 0.25; // 1/4 - nu^2 at nu = 0
    let mut b = 2.0 * (1.0 + z);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = delh;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    let mut converged = false;
    for i in 2..=MAX_ITER {
        a -= 2.0 * (i as f64 - 1.0);
        c = -a * c / i as f64;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh *= b * d - 1.0;
        h += delh;
        let dels = q * delh;
        s += dels;
        if dels.abs() < eps * s.abs() {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Quadrature {
            estimate: f64::NAN,
            error: f64::NAN,
        });
    }
    let h = a1 * h;
    let k0 = (std::f64::consts::PI / (2.0 * z)).sqrt() * (-z).exp() / s;
    let k1 = k0 * (z + 0.5 - h) / z;
    Ok((k0, k1))
}

/// Modified Bessel function of the second kind `K_nu(z)` for integer
/// `nu >= 0` and `z > 0`.
///
/// Relative accuracy is better than 1e-12 on z in [1e-6, 700]. For z
/// beyond ~740 the result underflows and 0.0 is returned. z <= 0 is a
/// domain error (the function blows up there).
pub fn bessel_k(nu: u32, z: f64) -> Result<f64> {
    if z <= 0.0 || !z.is_finite() {
        return Err(Error::Domain(format!("bessel_k requires z > 0, got {z}")));
    }
    if z > 740.0 {
        return Ok(0.0); // e^{-z} underflow; documented
    }
    let (k0, k1) = if z <= SERIES_CUTOFF {
        k01_series(z)
    } else {
        k01_cf2(z)?
    };
    match nu {
        0 => Ok(k0),
        1 => Ok(k1),
        _ => {
            // upward recurrence, stable for K
            let mut km1 = k0;
            let mut k = k1;
            for j in 1..nu {
                let next = km1 + (2.0 * j as f64 / z) * k;
                km1 = k;
                k = next;
            }
            Ok(k)
        }
    }
}
