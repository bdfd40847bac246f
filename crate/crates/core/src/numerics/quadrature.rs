//! Globally adaptive Gauss-Kronrod quadrature (7-15 pair).

use serde::Serialize;

use crate::error::{Error, Result};

/// Tolerances and budget for one adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadSpec {
    /// Tight enough that closed-form comparisons at 1e-8 stay meaningful.
    fn default() -> Self {
        QuadSpec {
            rel_tol: 1e-10,
            abs_tol: 1e-14,
            max_subdivisions: 2000,
        }
    }
}

impl QuadSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize) -> Self {
        assert!(rel_tol > 0.0, "rel_tol must be > 0");
        assert!(abs_tol >= 0.0, "abs_tol must be >= 0");
        assert!(max_subdivisions >= 1, "max_subdivisions must be >= 1");
        QuadSpec {
            rel_tol,
            abs_tol,
            max_subdivisions,
        }
    }
}

// 15-point Kronrod nodes (positive half) with embedded 7-point Gauss rule.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_67,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

/// QUADPACK-style error rescaling: sharpens the raw |K15 - G7| estimate
/// using the dispersion of the integrand over the panel.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);

    let mut fv = [0.0f64; 15];
    fv[7] = f_center;
    let mut res_kronrod = WGK[7] * f_center;
    let mut res_gauss = WG[3] * f_center;
    let mut res_abs = res_kronrod.abs();

    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv[j] = f1;
        fv[14 - j] = f2;
        res_kronrod += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            // XGK indices 1, 3, 5 are the Gauss nodes
            res_gauss += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_kronrod;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv[j] - mean).abs() + (fv[14 - j] - mean).abs());
    }

    let result = res_kronrod * half;
    let err = rescale_error(
        (res_kronrod - res_gauss) * half,
        res_abs * half.abs(),
        res_asc * half.abs(),
    );
    (result, err)
}

/// Adaptive integral of `f` over the finite interval [a, b].
///
/// The estimate satisfies `error <= max(abs_tol, rel_tol * |result|)` or a
/// non-convergence error carrying the last estimate is returned. Integrable
/// endpoint singularities must be removed by the caller beforehand.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, spec: &QuadSpec) -> Result<f64> {
    if b.is_infinite() {
        return integrate_to_inf_dyn(&f, a, spec);
    }
    integrate_dyn(&f, a, b, spec)
}

fn integrate_dyn(f: &dyn Fn(f64) -> f64, a: f64, b: f64, spec: &QuadSpec) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (sign, lo, hi) = if a < b { (1.0, a, b) } else { (-1.0, b, a) };

    struct Panel {
        a: f64,
        b: f64,
        result: f64,
        err: f64,
    }
    let (r0, e0) = gk15(&f, lo, hi);
    let mut panels = vec![Panel {
        a: lo,
        b: hi,
        result: r0,
        err: e0,
    }];

    for _ in 0..spec.max_subdivisions {
        let total: f64 = panels.iter().map(|p| p.result).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        if err <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
            return Ok(sign * total);
        }
        // split the worst panel
        let (worst, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.total_cmp(&y.1.err))
            .expect("panel list never empty");
        let Panel { a: pa, b: pb, .. } = panels.swap_remove(worst);
        let mid = 0.5 * (pa + pb);
        if mid <= pa || mid >= pb {
            // interval exhausted at machine precision; keep going with the rest
            let (r, _) = gk15(&f, pa, pb);
            panels.push(Panel {
                a: pa,
                b: pb,
                result: r,
                err: 0.0,
            });
            continue;
        }
        for (sa, sb) in [(pa, mid), (mid, pb)] {
            let (r, e) = gk15(&f, sa, sb);
            panels.push(Panel {
                a: sa,
                b: sb,
                result: r,
                err: e,
            });
        }
    }

    let total: f64 = panels.iter().map(|p| p.result).sum();
    let err: f64 = panels.iter().map(|p| p.err).sum();
    if err <= spec.abs_tol.max(spec.rel_tol * total.abs()) {
        Ok(sign * total)
    } else {
        Err(Error::Quadrature {
            estimate: sign * total,
            error: err,
        })
    }
}

/// Adaptive integral of `f` over [a, +inf), via x = a + t/(1-t) on [0, 1).
///
/// The integrand must decay fast enough to be integrable; exponential decay
/// is the intended use. Values that underflow to zero short-circuit the
/// Jacobian so the transform never produces 0 * inf.
pub fn integrate_to_inf<F: Fn(f64) -> f64>(f: F, a: f64, spec: &QuadSpec) -> Result<f64> {
    integrate_to_inf_dyn(&f, a, spec)
}

fn integrate_to_inf_dyn(f: &dyn Fn(f64) -> f64, a: f64, spec: &QuadSpec) -> Result<f64> {
    let g = |t: f64| {
        let one_m = 1.0 - t;
        if one_m <= 0.0 {
            return 0.0;
        }
        let x = a + t / one_m;
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            v / (one_m * one_m)
        }
    };
    integrate_dyn(&g, 0.0, 1.0, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::bessel_k;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_tail() {
        let spec = QuadSpec::default();
        let v = integrate_to_inf(|x: f64| (-x).exp(), 0.0, &spec).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-10);
    }

    #[test]
    fn k1_moment_identities() {
        // int_0^inf x^mu K_1(x) dx = 2^{mu-1} Gamma((mu+2)/2) Gamma(mu/2);
        // mu = 6 gives 384, mu = 2 gives 2. These are the kernels behind
        // the |211> sum rules.
        let spec = QuadSpec::default();
        let v6 =
            integrate_to_inf(|x: f64| x.powi(6) * bessel_k(1, x).unwrap(), 0.0, &spec).unwrap();
        assert_relative_eq!(v6, 384.0, max_relative = 1e-9);
        let v2 =
            integrate_to_inf(|x: f64| x.powi(2) * bessel_k(1, x).unwrap(), 0.0, &spec).unwrap();
        assert_relative_eq!(v2, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn oscillatory_finite() {
        let spec = QuadSpec::default();
        let v = integrate(|x: f64| x.sin(), 0.0, std::f64::consts::PI, &spec).unwrap();
        assert_relative_eq!(v, 2.0, max_relative = 1e-12);
        // reversed limits flip the sign
        let w = integrate(|x: f64| x.sin(), std::f64::consts::PI, 0.0, &spec).unwrap();
        assert_relative_eq!(w, -2.0, max_relative = 1e-12);
    }

    #[test]
    fn nonconvergence_carries_estimate() {
        let spec = QuadSpec {
            rel_tol: 1e-14,
            abs_tol: 0.0,
            max_subdivisions: 2,
        };
        // |x|^(-1/2) endpoint singularity cannot converge in 2 splits
        let res = integrate(|x: f64| x.abs().sqrt().recip().min(1e12), 0.0, 1.0, &spec);
        match res {
            Err(Error::Quadrature { estimate, error }) => {
                assert!(estimate.is_finite());
                assert!(error > 0.0);
            }
            other => panic!("expected quadrature error, got {other:?}"),
        }
    }
}
