//! Bohmian dynamics for hydrogen eigenstates: velocity field, exact
//! trajectories, quantum potential and quantum-equilibrium sampling.
//!
//! For an eigenstate the phase is `S = m phi - E t`, so `r` and `theta`
//! are constants of motion and the particle circulates with
//! `Omega = m / (r^2 sin^2 theta)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hydrogen::{self, HydrogenState};
use crate::numerics::assoc_legendre;

/// Evaluation refuses nodal surfaces closer than this in |R|.
const NODE_EPS: f64 = 1e-12;

/// Chunk size for parallel sampling. One RNG substream per chunk keeps the
/// output independent of the worker count.
const CHUNK_SIZE: usize = 1 << 14;

/// Starting point of a Bohmian trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InitialCondition {
    pub r0: f64,
    pub theta0: f64,
    pub phi0: f64,
}

impl InitialCondition {
    pub fn new(r0: f64, theta0: f64, phi0: f64) -> Result<Self> {
        if r0 <= 0.0 {
            return Err(Error::Domain("initial radius must be positive".into()));
        }
        if !(0.0..=std::f64::consts::PI).contains(&theta0) {
            return Err(Error::Domain("theta0 must lie in [0, pi]".into()));
        }
        Ok(InitialCondition { r0, theta0, phi0 })
    }
}

/// Seeded, stream-splittable RNG handle. Distinct `stream_id`s give
/// independent sequences; the same pair is bit-reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RngStreamSpec {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStreamSpec {
    pub fn new(seed: u64) -> Self {
        RngStreamSpec { seed, stream_id: 0 }
    }

    pub(crate) fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }

    fn with_stream(&self, stream_id: u64) -> Self {
        RngStreamSpec {
            seed: self.seed,
            stream_id,
        }
    }
}

/// An i.i.d. quantum-equilibrium sample of initial conditions.
#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryEnsemble {
    pub state: HydrogenState,
    pub points: Vec<InitialCondition>,
    pub seed: u64,
    pub base_stream: u64,
    /// Fraction of proposals accepted by the rejection sampler.
    pub acceptance_rate: f64,
}

impl TrajectoryEnsemble {
    pub fn size(&self) -> usize {
        self.points.len()
    }
}

/// Bohmian velocity `(v_r, v_theta, v_phi)` at (r, theta) for |n l m>:
/// `(0, 0, m / (r sin theta))` in internal units.
pub fn velocity_field(state: &HydrogenState, r: f64, theta: f64) -> Result<(f64, f64, f64)> {
    if r <= 0.0 {
        return Err(Error::Domain("velocity_field requires r > 0".into()));
    }
    let s = theta.sin();
    if state.m() == 0 {
        return Ok((0.0, 0.0, 0.0));
    }
    if s <= 0.0 {
        return Err(Error::Singularity(format!(
            "velocity field diverges on the polar axis for m = {}",
            state.m()
        )));
    }
    Ok((0.0, 0.0, state.m() as f64 / (r * s)))
}

/// Angular frequency `Omega = m / (r0^2 sin^2 theta0)` of the circulation.
pub fn angular_frequency(state: &HydrogenState, ic: &InitialCondition) -> Result<f64> {
    if state.m() == 0 {
        return Ok(0.0);
    }
    let s = ic.theta0.sin();
    if s <= 0.0 {
        return Err(Error::Singularity(
            "angular frequency diverges on the polar axis for m != 0".into(),
        ));
    }
    Ok(state.m() as f64 / (ic.r0 * ic.r0 * s * s))
}

/// Exact trajectory: `(r0, theta0, phi0 + Omega t mod 2 pi)`.
pub fn trajectory(state: &HydrogenState, ic: &InitialCondition, t: f64) -> Result<(f64, f64, f64)> {
    let omega = angular_frequency(state, ic)?;
    let phi = (ic.phi0 + omega * t).rem_euclid(2.0 * std::f64::consts::PI);
    Ok((ic.r0, ic.theta0, phi))
}

/// Quantum potential `Q = -(1/2) lap(R)/R` with
/// `R = chi_nl(r) P_l^{|m|}(cos theta)` (angular normalization cancels).
///
/// Both the radial and angular second derivatives are analytic; nothing is
/// taken from the Schroedinger eigenvalue relation, so the stationary
/// energy balance `Q + V + v^2/2 = E_n` is a real check of this code.
pub fn quantum_potential(state: &HydrogenState, r: f64, theta: f64) -> Result<f64> {
    if r <= 0.0 {
        return Err(Error::Domain("quantum_potential requires r > 0".into()));
    }
    let (chi, dchi, d2chi) = hydrogen::radial_wavefunction_derivs(state, r);
    let u = theta.cos();
    let sin_t = theta.sin();
    let (p, dp_du, d2p_du2) = crate::numerics::assoc_legendre_derivs(state.l(), state.m_abs(), u)?;
    if (chi * p).abs() < NODE_EPS {
        return Err(Error::Node(format!(
            "|R| < {NODE_EPS:e} at (r, theta) = ({r}, {theta})"
        )));
    }
    // theta-derivatives of T(theta) = P(cos theta)
    let dt = -sin_t * dp_du;
    let d2t = -u * dp_du + sin_t * sin_t * d2p_du2;

    let radial = (d2chi + 2.0 / r * dchi) / chi;
    let angular = (d2t + (u / sin_t) * dt) / p / (r * r);
    Ok(-0.5 * (radial + angular))
}

/// Draw `size` i.i.d. initial conditions from |psi_nlm|^2.
///
/// phi is exact inverse-CDF (uniform); (r, cos theta) factorize for an
/// eigenstate and use rejection sampling: a Gamma envelope for the radial
/// marginal `chi^2 r^2` and a uniform envelope for `P_l^{|m|}(u)^2`.
/// Deterministic for a fixed `RngStreamSpec`, and independent of the
/// worker count because sample j draws from substream
/// `base_stream + j / CHUNK_SIZE`.
pub fn sample_qeh(state: &HydrogenState, size: usize, rng: RngStreamSpec) -> TrajectoryEnsemble {
    assert!(size >= 1, "ensemble size must be >= 1");
    let planner = RejectionPlan::new(state);
    let n_chunks = size.div_ceil(CHUNK_SIZE);

    let chunks: Vec<(Vec<InitialCondition>, u64, u64)> = parallel_chunks(n_chunks, |chunk| {
        let count = CHUNK_SIZE.min(size - chunk * CHUNK_SIZE);
        let mut local = rng.with_stream(rng.stream_id + chunk as u64).rng();
        let mut pts = Vec::with_capacity(count);
        let mut proposals = 0u64;
        let mut accepted = 0u64;
        for _ in 0..count {
            pts.push(planner.draw(&mut local, &mut proposals, &mut accepted));
        }
        (pts, proposals, accepted)
    });

    let mut points = Vec::with_capacity(size);
    let mut proposals = 0u64;
    let mut accepted = 0u64;
    for (pts, prop, acc) in chunks {
        points.extend(pts);
        proposals += prop;
        accepted += acc;
    }
    TrajectoryEnsemble {
        state: *state,
        points,
        seed: rng.seed,
        base_stream: rng.stream_id,
        acceptance_rate: accepted as f64 / proposals.max(1) as f64,
    }
}

/// Run `f(0..n_chunks)` on a small thread pool and return the results in
/// chunk order. Worker count comes from DIPOLE_NOISE_THREADS (default: the
/// machine's parallelism); the output never depends on it.
pub(crate) fn parallel_chunks<T: Send>(
    n_chunks: usize,
    f: impl Fn(usize) -> T + Sync,
) -> Vec<T> {
    let workers = worker_count().min(n_chunks).max(1);
    if workers == 1 {
        return (0..n_chunks).map(f).collect();
    }
    let next = std::sync::atomic::AtomicUsize::new(0);
    let results: Vec<std::sync::Mutex<Option<T>>> =
        (0..n_chunks).map(|_| std::sync::Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= n_chunks {
                    break;
                }
                *results[i].lock().unwrap() = Some(f(i));
            });
        }
    });
    results
        .into_iter()
        .map(|m| m.into_inner().unwrap().expect("every chunk ran"))
        .collect()
}

pub(crate) fn worker_count() -> usize {
    match std::env::var("DIPOLE_NOISE_THREADS") {
        Ok(v) => v.parse::<usize>().ok().filter(|&w| w >= 1).unwrap_or(1),
        Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
    }
}

/// Precomputed envelopes for the (r, cos theta) rejection sampler.
struct RejectionPlan {
    state: HydrogenState,
    gamma: Gamma<f64>,
    gamma_shape: f64,
    gamma_rate: f64,
    radial_log_bound: f64,
    angular_bound: f64,
}

impl RejectionPlan {
    fn new(state: &HydrogenState) -> Self {
        let n = state.n() as f64;
        let l = state.l();
        // Radial target chi^2 r^2 ~ r^{2l+2} e^{-2r/n} poly^2; a Gamma
        // proposal with slightly smaller rate keeps the ratio bounded.
        let shape = (2 * l + 3) as f64;
        let rate = 2.0 / n * (1.0 - 0.25 / n);
        let log_ratio = |r: f64| {
            let chi = hydrogen::radial_wavefunction(state, r);
            let t = chi * chi * r * r;
            if t <= 0.0 {
                f64::NEG_INFINITY
            } else {
                t.ln() - ((shape - 1.0) * r.ln() - rate * r)
            }
        };
        let radial_log_bound = sup_on_grid(log_ratio, 1e-9, state.r_max() * 1.5, 16384) + 0.02;

        let m_abs = state.m_abs();
        let p2 = |u: f64| {
            let p = assoc_legendre(l, m_abs, u).unwrap();
            p * p
        };
        let angular_bound = sup_on_grid(p2, -1.0, 1.0, 8192) * 1.02;

        RejectionPlan {
            state: *state,
            gamma: Gamma::new(shape, 1.0 / rate).expect("valid Gamma parameters"),
            gamma_shape: shape,
            gamma_rate: rate,
            radial_log_bound,
            angular_bound,
        }
    }

    fn draw(
        &self,
        rng: &mut ChaCha8Rng,
        proposals: &mut u64,
        accepted: &mut u64,
    ) -> InitialCondition {
        // radius
        let r = loop {
            *proposals += 1;
            let r: f64 = self.gamma.sample(rng);
            if r <= 0.0 {
                continue;
            }
            let chi = hydrogen::radial_wavefunction(&self.state, r);
            let target = chi * chi * r * r;
            if target <= 0.0 {
                continue;
            }
            let log_g = (self.gamma_shape - 1.0) * r.ln() - self.gamma_rate * r;
            let log_accept = target.ln() - log_g - self.radial_log_bound;
            if rng.random::<f64>().ln() < log_accept {
                *accepted += 1;
                break r;
            }
        };
        // cos theta; for m != 0 the polar axis carries zero probability
        // and exact |u| = 1 draws are resampled
        let u = loop {
            let u = rng.random_range(-1.0..1.0f64);
            let p = assoc_legendre(self.state.l(), self.state.m_abs(), u).unwrap();
            if rng.random::<f64>() * self.angular_bound < p * p {
                if self.state.m() != 0 && u.abs() >= 1.0 {
                    continue;
                }
                break u;
            }
        };
        let phi = rng.random_range(0.0..(2.0 * std::f64::consts::PI));
        InitialCondition {
            r0: r,
            theta0: u.acos(),
            phi0: phi,
        }
    }
}

/// Supremum of `f` over a uniform grid with golden-section refinement
/// around the best grid point.
fn sup_on_grid(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut best = f64::NEG_INFINITY;
    let mut best_x = a;
    for i in 0..=n {
        let x = a + i as f64 * h;
        let v = f(x);
        if v > best {
            best = v;
            best_x = x;
        }
    }
    // refine in the bracketing interval
    let (mut lo, mut hi) = ((best_x - h).max(a), (best_x + h).min(b));
    let phi = 0.5 * (5.0f64.sqrt() - 1.0);
    for _ in 0..60 {
        let x1 = hi - phi * (hi - lo);
        let x2 = lo + phi * (hi - lo);
        if f(x1) > f(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    best.max(f(0.5 * (lo + hi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hydrogen::{energy, x_squared_expectation};
    use approx::assert_relative_eq;

    fn state(n: u32, l: u32, m: i32) -> HydrogenState {
        HydrogenState::new(n, l, m).unwrap()
    }

    #[test]
    fn velocity_reference_points() {
        let v = velocity_field(&state(2, 1, 1), 1.0, std::f64::consts::FRAC_PI_2).unwrap();
        assert_eq!(v, (0.0, 0.0, 1.0));
        // m = 0 is static everywhere
        assert_eq!(
            velocity_field(&state(3, 2, 0), 0.3, 0.1).unwrap(),
            (0.0, 0.0, 0.0)
        );
        // v_phi = m/(r sin theta) = 2/(2*1) = 1
        let v = velocity_field(&state(3, 2, 2), 2.0, std::f64::consts::FRAC_PI_2).unwrap();
        assert_relative_eq!(v.2, 1.0);
        assert!(velocity_field(&state(2, 1, 1), 1.0, 0.0).is_err());
    }

    #[test]
    fn trajectory_closed_form() {
        let ic = InitialCondition::new(1.0, std::f64::consts::FRAC_PI_2, 0.25).unwrap();
        let s = state(2, 1, 1);
        let tau = 1.75;
        let (r, th, phi) = trajectory(&s, &ic, tau).unwrap();
        assert_eq!((r, th), (ic.r0, ic.theta0));
        assert_relative_eq!(phi, 0.25 + tau, max_relative = 1e-14);
        // m = 0: static
        let s0 = state(2, 1, 0);
        assert_eq!(
            trajectory(&s0, &ic, 123.0).unwrap(),
            (ic.r0, ic.theta0, ic.phi0)
        );
    }

    #[test]
    fn trajectory_matches_ode_integration() {
        // RK4 of the velocity field in spherical coordinates against the
        // closed form, for every state with n <= 4 and a generic ic.
        let t_end = 100.0;
        let steps = 20_000usize;
        for n in 1..=4u32 {
            for l in 0..n {
                for m in -(l as i32)..=(l as i32) {
                    let s = state(n, l, m);
                    let ic = InitialCondition::new(1.3, 1.1, 0.4).unwrap();
                    let h = t_end / steps as f64;
                    let (mut r, mut th, mut phi) = (ic.r0, ic.theta0, ic.phi0);
                    let deriv = |r: f64, th: f64| {
                        let (vr, vth, vphi) = velocity_field(&s, r, th).unwrap();
                        (vr, vth / r, vphi / (r * th.sin()))
                    };
                    for _ in 0..steps {
                        let k1 = deriv(r, th);
                        let k2 = deriv(r + 0.5 * h * k1.0, th + 0.5 * h * k1.1);
                        let k3 = deriv(r + 0.5 * h * k2.0, th + 0.5 * h * k2.1);
                        let k4 = deriv(r + h * k3.0, th + h * k3.1);
                        r += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
                        th += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
                        phi += h / 6.0 * (k1.2 + 2.0 * k2.2 + 2.0 * k3.2 + k4.2);
                    }
                    let (rc, thc, _) = trajectory(&s, &ic, t_end).unwrap();
                    let omega = angular_frequency(&s, &ic).unwrap();
                    assert_relative_eq!(r, rc, max_relative = 1e-10);
                    assert_relative_eq!(th, thc, max_relative = 1e-10);
                    assert_relative_eq!(
                        phi,
                        ic.phi0 + omega * t_end,
                        max_relative = 1e-8,
                        epsilon = 1e-8
                    );
                }
            }
        }
    }

    #[test]
    fn angular_frequency_consistent_with_bessel_argument() {
        // Omega = omega exactly when r0 sin(theta0) = sqrt(m/omega), the
        // radius the closed-form spectra parametrize through z_{n,m}.
        let s = state(3, 2, 2);
        for omega in [0.3, 1.0, 4.2] {
            let rho = (s.m() as f64 / omega).sqrt();
            let ic = InitialCondition::new(rho / 0.9f64.sin(), 0.9, 0.0).unwrap();
            // r0 sin(theta0) = rho by construction
            assert_relative_eq!(
                angular_frequency(&s, &ic).unwrap(),
                omega,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn quantum_potential_ground_state() {
        // Q(r) = -(1/2)(1 - 2/r) for the ground state
        for r in [0.4, 1.0, 3.7] {
            assert_relative_eq!(
                quantum_potential(&state(1, 0, 0), r, 1.0).unwrap(),
                -0.5 * (1.0 - 2.0 / r),
                max_relative = 1e-11
            );
        }
    }

    #[test]
    fn quantum_potential_matches_finite_differences() {
        // central-difference Laplacian of R = chi * P at a generic point
        let s = state(2, 1, 1);
        let (r, th) = (2.0, 1.0);
        let rfun = |r: f64, th: f64| {
            hydrogen::radial_wavefunction(&s, r)
                * assoc_legendre(s.l(), s.m_abs(), th.cos()).unwrap()
        };
        let h = 1e-4;
        let d2r = (rfun(r + h, th) - 2.0 * rfun(r, th) + rfun(r - h, th)) / (h * h);
        let dr = (rfun(r + h, th) - rfun(r - h, th)) / (2.0 * h);
        let d2t = (rfun(r, th + h) - 2.0 * rfun(r, th) + rfun(r, th - h)) / (h * h);
        let dt = (rfun(r, th + h) - rfun(r, th - h)) / (2.0 * h);
        let lap = d2r + 2.0 / r * dr + (d2t + th.cos() / th.sin() * dt) / (r * r);
        let q_fd = -0.5 * lap / rfun(r, th);
        assert_relative_eq!(
            quantum_potential(&s, r, th).unwrap(),
            q_fd,
            max_relative = 1e-6
        );
    }

    #[test]
    fn energy_balance_along_trajectories() {
        // Q + V + v_phi^2/2 = E_n at random non-nodal points, for all
        // states with n <= 4.
        let mut rng = RngStreamSpec::new(77).rng();
        for n in 1..=4u32 {
            for l in 0..n {
                for m in 0..=(l as i32) {
                    let s = state(n, l, m);
                    let mut checked = 0;
                    while checked < 100 {
                        let r = rng.random_range(0.2..(3.0 * (n * n) as f64));
                        let th = rng.random_range(0.3..(std::f64::consts::PI - 0.3));
                        let q = match quantum_potential(&s, r, th) {
                            Ok(q) => q,
                            Err(_) => continue, // nodal surface, resample
                        };
                        let v = -1.0 / r;
                        let kin = if m == 0 {
                            0.0
                        } else {
                            let (_, _, vphi) = velocity_field(&s, r, th).unwrap();
                            0.5 * vphi * vphi
                        };
                        let balance: f64 = q + v + kin;
                        assert!(
                            (balance - energy(n)).abs() < 1e-8 * energy(n).abs().max(1.0),
                            "state {s}: Q+V+K = {balance}, E = {}",
                            energy(n)
                        );
                        checked += 1;
                    }
                }
            }
        }
    }

    #[test]
    fn sampling_reproducible_and_worker_independent() {
        let s = state(2, 1, 1);
        let spec = RngStreamSpec::new(42);
        let a = sample_qeh(&s, 40_000, spec);
        let b = sample_qeh(&s, 40_000, spec);
        assert_eq!(a.points, b.points);
        // worker-count independence
        let saved = std::env::var("DIPOLE_NOISE_THREADS").ok();
        for w in ["1", "2", "8"] {
            std::env::set_var("DIPOLE_NOISE_THREADS", w);
            let c = sample_qeh(&s, 40_000, spec);
            assert_eq!(a.points, c.points, "workers = {w}");
        }
        match saved {
            Some(v) => std::env::set_var("DIPOLE_NOISE_THREADS", v),
            None => std::env::remove_var("DIPOLE_NOISE_THREADS"),
        }
    }

    #[test]
    fn ground_state_radial_ks_test() {
        // Kolmogorov-Smirnov against the analytic CDF of 4 r^2 e^{-2r}:
        // F(r) = 1 - e^{-2r}(1 + 2r + 2r^2). 1% level: D < 1.63/sqrt(N).
        let n = 200_000usize;
        let ens = sample_qeh(&state(1, 0, 0), n, RngStreamSpec::new(7));
        let mut radii: Vec<f64> = ens.points.iter().map(|p| p.r0).collect();
        radii.sort_by(f64::total_cmp);
        let cdf = |r: f64| 1.0 - (-2.0 * r).exp() * (1.0 + 2.0 * r + 2.0 * r * r);
        let mut d: f64 = 0.0;
        for (i, &r) in radii.iter().enumerate() {
            let f = cdf(r);
            let lo = i as f64 / n as f64;
            let hi = (i + 1) as f64 / n as f64;
            d = d.max((f - lo).abs()).max((hi - f).abs());
        }
        assert!(
            d < 1.63 / (n as f64).sqrt(),
            "KS statistic {d} exceeds the 1% threshold"
        );
    }

    #[test]
    fn phi_marginal_uniform_and_x2_estimate() {
        let s = state(2, 1, 1);
        let ens = sample_qeh(&s, 400_000, RngStreamSpec::new(3));
        // phi moments of the uniform law on [0, 2pi)
        let mean_phi: f64 =
            ens.points.iter().map(|p| p.phi0).sum::<f64>() / ens.size() as f64;
        assert!((mean_phi - std::f64::consts::PI).abs() < 0.02);
        // empirical <x^2> within 3 standard errors of 12
        let vals: Vec<f64> = ens
            .points
            .iter()
            .map(|p| 0.5 * p.r0 * p.r0 * p.theta0.sin().powi(2))
            .collect();
        let mean: f64 = vals.iter().sum::<f64>() / vals.len() as f64;
        let var: f64 =
            vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (vals.len() - 1) as f64;
        let se = (var / vals.len() as f64).sqrt();
        let want = x_squared_expectation(&s);
        assert!(
            (mean - want).abs() < 3.0 * se,
            "<x^2> = {mean} +- {se}, want {want}"
        );
    }

    #[test]
    fn equivariance_of_constants_of_motion() {
        // r and theta are constants of motion: pushing the ensemble through
        // the flow leaves every (r, theta) observable exactly unchanged.
        let s = state(3, 2, 1);
        let ens = sample_qeh(&s, 20_000, RngStreamSpec::new(11));
        for t in [1.0, 10.0] {
            let before: f64 = ens
                .points
                .iter()
                .map(|p| p.r0 * p.r0 * p.theta0.sin().powi(2))
                .sum::<f64>();
            let after: f64 = ens
                .points
                .iter()
                .map(|p| {
                    let (r, th, _) = trajectory(&s, p, t).unwrap();
                    r * r * th.sin().powi(2)
                })
                .sum::<f64>();
            assert_eq!(before, after);
        }
    }

    #[test]
    fn acceptance_rate_reported() {
        let ens = sample_qeh(&state(3, 1, 1), 10_000, RngStreamSpec::new(5));
        assert!(ens.acceptance_rate > 0.05 && ens.acceptance_rate <= 1.0);
    }
}
