//! Random-time evolution: the evolution time t′ is Gamma distributed with
//! mean t and variance τt, and the state is averaged over t′.
//!
//! Only the reversible qubit dynamics are averaged. Under H the coherence
//! carries e^{+2it′}, so the whole effect of the average is captured by the
//! characteristic function E[e^{−iωt′}] = (1 + iωτ)^{−t/τ} at ω = 2.

use std::sync::OnceLock;

use libm::lgamma as ln_gamma;
use num_complex::Complex64;

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::qstate::{DensityMatrix2, QubitAmplitudes};

/// Angular frequency of the reversible coherence rotation.
pub const COHERENCE_FREQUENCY: f64 = 2.0;

/// Relative change below which panel doubling stops.
pub const QUADRATURE_TOL: f64 = 1e-11;
const INITIAL_PANELS: usize = 8;
const MAX_PANELS: usize = 1 << 15;
const GL_ORDER: usize = 16;

/// Time-fluctuation scale τ; τ = 0 is deterministic evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimingModel {
    tau: f64,
}

impl TimingModel {
    pub fn new(tau: f64) -> Result<Self> {
        Ok(Self {
            tau: require_non_negative("tau", tau)?,
        })
    }

    pub fn deterministic() -> Self {
        Self { tau: 0.0 }
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn is_deterministic(&self) -> bool {
        self.tau == 0.0
    }

    /// Shape parameter t/τ of the evolution-time distribution.
    pub fn shape(&self, t: f64) -> f64 {
        t / self.tau
    }
}

fn validate_pdf_args(timing: TimingModel, t: f64) -> Result<(f64, f64)> {
    let tau = require_positive("tau", timing.tau)?;
    let t = require_positive("t", t)?;
    Ok((tau, t))
}

/// Logarithm of the evolution-time density ℘(t, t′).
pub fn ln_gamma_pdf(timing: TimingModel, t: f64, tprime: f64) -> Result<f64> {
    let (tau, t) = validate_pdf_args(timing, t)?;
    let tprime = require_non_negative("t'", tprime)?;
    let shape = t / tau;
    let x = tprime / tau;
    if x == 0.0 {
        return Ok(match shape.partial_cmp(&1.0) {
            Some(std::cmp::Ordering::Less) => f64::INFINITY,
            Some(std::cmp::Ordering::Equal) => -tau.ln(),
            _ => f64::NEG_INFINITY,
        });
    }
    Ok(ln_pdf_interior(shape, tau, tprime))
}

/// ln ℘ for t′ > 0 without argument checks.
fn ln_pdf_interior(shape: f64, tau: f64, tprime: f64) -> f64 {
    let x = tprime / tau;
    (shape - 1.0) * x.ln() - x - ln_gamma(shape) - tau.ln()
}

/// Gamma density with shape t/τ and scale τ, evaluated in log space.
///
/// τ = 0 is rejected: the density is then a delta at t′ = t and callers take
/// the deterministic branch instead.
pub fn gamma_pdf(timing: TimingModel, t: f64, tprime: f64) -> Result<f64> {
    ln_gamma_pdf(timing, t, tprime).map(f64::exp)
}

/// ln(1 + iωτ) on the principal branch. Re(1 + iωτ) = 1 keeps the argument
/// away from the cut.
fn log_one_plus_i(x: f64) -> Complex64 {
    Complex64::new(0.5 * (x * x).ln_1p(), x.atan())
}

/// E[e^{−iωt′}] = (1 + iωτ)^{−t/τ}; e^{−iωt} exactly when τ = 0.
pub fn averaged_phase_factor(timing: TimingModel, t: f64, omega: f64) -> Complex64 {
    if timing.is_deterministic() {
        return Complex64::from_polar(1.0, -omega * t);
    }
    let shape = t / timing.tau;
    (-shape * log_one_plus_i(omega * timing.tau)).exp()
}

/// Random-time average of the reversible evolution: populations unchanged,
/// coherence c0 c1* · E[e^{+2it′}].
pub fn averaged_state(psi: &QubitAmplitudes, timing: TimingModel, t: f64) -> DensityMatrix2 {
    let factor = averaged_phase_factor(timing, t, COHERENCE_FREQUENCY).conj();
    DensityMatrix2::from_parts(psi.p0(), psi.p1(), psi.coherence() * factor)
}

fn gauss_legendre_16() -> &'static ([f64; GL_ORDER], [f64; GL_ORDER]) {
    static RULE: OnceLock<([f64; GL_ORDER], [f64; GL_ORDER])> = OnceLock::new();
    RULE.get_or_init(gauss_legendre::<GL_ORDER>)
}

/// Nodes and weights on [−1, 1] by Newton iteration on P_n.
fn gauss_legendre<const N: usize>() -> ([f64; N], [f64; N]) {
    let mut nodes = [0.0; N];
    let mut weights = [0.0; N];
    let n = N as f64;
    for i in 0..N.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=N {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[N - 1 - i] = x;
        weights[i] = w;
        weights[N - 1 - i] = w;
    }
    (nodes, weights)
}

/// Integration window in u = ln t′.
///
/// The upper end is t + 12σ + 40τ, which leaves negligible mass for small
/// shapes where 12σ alone does not. The lower end is the larger of t − 12σ
/// and the point below which the mass, bounded by x^k/Γ(k+1), is under 1e-17.
fn log_window(tau: f64, t: f64) -> (f64, f64) {
    let shape = t / tau;
    let sigma = (tau * t).sqrt();
    let upper = t + 12.0 * sigma + 40.0 * tau;
    let ln_mass_floor = (1e-17f64).ln();
    let ln_x_low = (ln_mass_floor + ln_gamma(shape + 1.0)) / shape;
    let lower_mass = tau * ln_x_low.exp();
    let lower = (t - 12.0 * sigma).max(lower_mass).max(f64::MIN_POSITIVE);
    (lower.ln(), upper.ln())
}

fn panel_sum<F>(tau: f64, t: f64, (u0, u1): (f64, f64), panels: usize, f: &F) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let (nodes, weights) = gauss_legendre_16();
    let shape = t / tau;
    let width = (u1 - u0) / panels as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for p in 0..panels {
        let mid = u0 + (p as f64 + 0.5) * width;
        let mut panel = Complex64::new(0.0, 0.0);
        for (x, w) in nodes.iter().zip(weights) {
            let u = mid + 0.5 * width * x;
            let tprime = u.exp();
            // ℘(t′) dt′ = ℘(t′) t′ du
            let ln_weight = ln_pdf_interior(shape, tau, tprime) + u;
            panel += f(tprime) * (w * ln_weight.exp());
        }
        total += panel * (0.5 * width);
    }
    total
}

/// E[f(t′)] under ℘(t, ·) by panelled 16-point Gauss–Legendre in ln t′.
///
/// Panels double from 8 until the result changes by less than
/// [`QUADRATURE_TOL`] relative to max(1, |result|).
pub fn quadrature_average<F>(timing: TimingModel, t: f64, integrand: F) -> Result<Complex64>
where
    F: Fn(f64) -> Complex64,
{
    let (tau, t) = validate_pdf_args(timing, t)?;
    let window = log_window(tau, t);
    let mut panels = INITIAL_PANELS;
    let mut previous = panel_sum(tau, t, window, panels, &integrand);
    loop {
        panels *= 2;
        let current = panel_sum(tau, t, window, panels, &integrand);
        if !(current.re.is_finite() && current.im.is_finite()) {
            return Err(Error::NonFinite("quadrature result"));
        }
        let change = (current - previous).norm();
        if change < QUADRATURE_TOL * current.norm().max(1.0) {
            return Ok(current);
        }
        if panels >= MAX_PANELS {
            return Err(Error::QuadratureNotConverged { change });
        }
        previous = current;
    }
}

/// Real-valued convenience wrapper around [`quadrature_average`].
pub fn quadrature_average_real<F>(timing: TimingModel, t: f64, integrand: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    quadrature_average(timing, t, |x| Complex64::new(integrand(x), 0.0)).map(|z| z.re)
}

/// The averaged state computed entrywise by quadrature of the reversibly
/// evolved matrix over ℘(t, t′); falls back to the deterministic state at
/// τ = 0.
pub fn averaged_state_quadrature(
    psi: &QubitAmplitudes,
    timing: TimingModel,
    t: f64,
) -> Result<DensityMatrix2> {
    let t = require_non_negative("t", t)?;
    if timing.is_deterministic() || t == 0.0 {
        return Ok(crate::lindblad::evolve_reversible(psi, t));
    }
    let entry = |i: usize, j: usize| {
        quadrature_average(timing, t, |tp| {
            crate::lindblad::evolve_reversible(psi, tp).as_mat().0[i][j]
        })
    };
    let r00 = entry(0, 0)?;
    let r01 = entry(0, 1)?;
    let r11 = entry(1, 1)?;
    Ok(DensityMatrix2::from_parts(r00.re, r11.re, r01))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lindblad::evolve_reversible;
    use crate::qstate::{sample_state, IDENTITY_TOL};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn timing(tau: f64) -> TimingModel {
        TimingModel::new(tau).unwrap()
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre_16();
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        // ∫_{-1}^{1} x^30 dx = 2/31
        let s: f64 = x.iter().zip(w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((s - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn shape_one_is_exponential() {
        let m = timing(0.7);
        for tp in [0.0, 0.1, 1.0, 5.0] {
            let expect = (-tp / 0.7f64).exp() / 0.7;
            assert!((gamma_pdf(m, 0.7, tp).unwrap() - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn pdf_rejects_degenerate_arguments() {
        assert!(gamma_pdf(TimingModel::deterministic(), 1.0, 1.0).is_err());
        assert!(gamma_pdf(timing(0.1), 0.0, 1.0).is_err());
        assert!(gamma_pdf(timing(0.1), -1.0, 1.0).is_err());
        assert!(gamma_pdf(timing(0.1), 1.0, -1.0).is_err());
        assert!(TimingModel::new(-0.1).is_err());
        assert!(quadrature_average_real(TimingModel::deterministic(), 1.0, |_| 1.0).is_err());
    }

    #[test]
    fn pdf_at_origin() {
        assert_eq!(gamma_pdf(timing(1.0), 0.5, 0.0).unwrap(), f64::INFINITY);
        assert_eq!(gamma_pdf(timing(1.0), 3.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn pdf_large_shape_does_not_overflow() {
        // Shape 1/0.003 ≈ 333: Γ(333) overflows a double.
        let v = gamma_pdf(timing(0.003), 1.0, 1.0).unwrap();
        // Gaussian approximation at the mode region: 1/√(2π τ t).
        let approx = 1.0 / (2.0 * std::f64::consts::PI * 0.003f64).sqrt();
        assert!(v.is_finite() && (v / approx - 1.0).abs() < 0.01);
    }

    #[test]
    fn phase_factor_limits() {
        assert_eq!(
            averaged_phase_factor(timing(0.3), 4.0, 0.0),
            Complex64::new(1.0, 0.0)
        );
        let det = averaged_phase_factor(TimingModel::deterministic(), 1.3, 2.0);
        assert_eq!(det, Complex64::from_polar(1.0, -2.6));
    }

    #[test]
    fn phase_factor_small_tau_value() {
        // Leading order: |(1+2iτ)^{-1/τ}| = exp(−ln(1+4τ²)/(2τ)) ≈ e^{−2τ}.
        let z = averaged_phase_factor(timing(0.003), 1.0, 2.0);
        let expected = (-0.006f64).exp();
        assert!((z.norm() / expected - 1.0).abs() < 1e-4);
        let rotated = z * Complex64::from_polar(1.0, 2.0);
        assert!(rotated.im.abs() < 1e-4);
    }

    #[test]
    fn phase_factor_matches_quadrature() {
        for (tau, t) in [
            (0.003, 1.0),
            (0.01, 0.5),
            (0.05, 5.0),
            (0.5, 0.2),
            (1.0, 0.5),
        ] {
            let m = timing(tau);
            let closed = averaged_phase_factor(m, t, 2.0);
            let quad =
                quadrature_average(m, t, |tp| Complex64::from_polar(1.0, -2.0 * tp)).unwrap();
            assert!(
                (closed - quad).norm() < 1e-9,
                "tau={tau} t={t}: {closed} vs {quad}"
            );
        }
    }

    #[test]
    fn quadrature_moments() {
        let m = timing(0.01);
        assert!((quadrature_average_real(m, 1.0, |_| 1.0).unwrap() - 1.0).abs() < 1e-10);
        assert!((quadrature_average_real(m, 1.0, |x| x).unwrap() - 1.0).abs() < 1e-9);
        let var = quadrature_average_real(m, 1.0, |x| (x - 1.0).powi(2)).unwrap();
        assert!((var - 0.01).abs() < 1e-9);
    }

    #[test]
    fn averaged_state_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let psi = sample_state(&mut rng);
            let det = averaged_state(&psi, TimingModel::deterministic(), 2.2);
            assert!(
                det.as_mat()
                    .max_abs_diff(evolve_reversible(&psi, 2.2).as_mat())
                    < 1e-15
            );
            let late = averaged_state(&psi, timing(0.2), 1e5);
            assert!(late.r01().norm() < 1e-15);
            assert_eq!(late.r00().re, psi.p0());
        }
    }

    #[test]
    fn averaged_state_matches_entrywise_quadrature() {
        let psi = QubitAmplitudes::plus();
        let m = timing(0.01);
        let closed = averaged_state(&psi, m, 1.0);
        let quad = averaged_state_quadrature(&psi, m, 1.0).unwrap();
        assert!(closed.as_mat().max_abs_diff(quad.as_mat()) < 1e-9);
    }

    proptest! {
        #[test]
        fn semigroup(tau in 1e-4..1.0f64, t1 in 0.0..50.0f64, t2 in 0.0..50.0f64, omega in -10.0..10.0f64) {
            let m = timing(tau);
            let whole = averaged_phase_factor(m, t1 + t2, omega);
            let split = averaged_phase_factor(m, t1, omega) * averaged_phase_factor(m, t2, omega);
            prop_assert!((whole - split).norm() < 1e-12);
        }

        #[test]
        fn phase_factor_is_contractive(tau in 1e-4..1.0f64, t in 1e-3..50.0f64, omega in 0.1..10.0f64) {
            prop_assert!(averaged_phase_factor(timing(tau), t, omega).norm() < 1.0);
            prop_assert!(averaged_phase_factor(timing(tau), t, -omega).norm() < 1.0);
        }

        #[test]
        fn averaged_state_is_density_matrix(theta in 0.0..=std::f64::consts::PI, tau in 0.0..1.0f64, t in 0.0..100.0f64) {
            let psi = crate::qstate::BlochAngles::new(theta, 0.3).unwrap().to_amplitudes();
            averaged_state(&psi, timing(tau), t).check(IDENTITY_TOL).unwrap();
        }
    }
}
