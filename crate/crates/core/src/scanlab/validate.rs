//! The oracle suite: every closed form checked against its independent
//! numerical route, with a per-check maximum deviation and tolerance.
//!
//! All randomness derives from one master seed; each check and each point
//! gets its own stream, so reports are byte-identical across runs and
//! worker counts.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::lindblad::{evolve_analytic, evolve_isotropic_numeric, evolve_reversible, NoiseParams};
use crate::qstate::{sample_state, DensityMatrix2, QubitAmplitudes};
use crate::randomtime::{
    averaged_phase_factor, averaged_state, averaged_state_quadrature, quadrature_average,
    quadrature_average_real, TimingModel,
};
use crate::survival::oracle::{encoded_enumeration, survival_single_mc, timing_mc};
use crate::survival::{
    p_combined, p_repeated, p_survival_encoded, p_survival_single, p_timing, Probability,
    StorageSchedule,
};

pub const CHANNEL_GAMMAS: [f64; 4] = [0.0, 1e-5, 1e-2, 0.1];
pub const CHANNEL_STATES: usize = 5;
pub const SURVIVAL_GAMMA_T: [f64; 3] = [0.01, 0.1, 1.0];
pub const SURVIVAL_STORAGE_TIME: f64 = 1e4;
pub const TIMING_TAUS: [f64; 3] = [0.003, 0.01, 0.05];
pub const TIMING_TEDS: [f64; 3] = [0.5, 1.0, 5.0];
pub const PDF_SHAPES: [f64; 7] = [0.5, 1.0, 2.5, 10.0, 1.0 / 0.003, 1e3, 1e4];

/// RK4 step used against the closed-form channel.
pub const CHANNEL_STEP: f64 = 1e-3;

/// Evaluation times for one decoherence rate: 0.1, 1, 10 and 100·min(1, 1/γ).
pub fn channel_times(gamma: f64) -> [f64; 4] {
    let long = if gamma > 0.0 {
        100.0 * (1.0f64).min(1.0 / gamma)
    } else {
        100.0
    };
    [0.1, 1.0, 10.0, long]
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationConfig {
    pub seed: u64,
    pub samples: usize,
    overrides: Vec<(String, f64)>,
}

impl ValidationConfig {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            samples: 1_000_000,
            overrides: Vec::new(),
        }
    }

    pub fn with_samples(mut self, samples: usize) -> Self {
        self.samples = samples.max(2);
        self
    }

    /// Replaces the tolerance of the named check.
    pub fn with_tolerance(mut self, check: &str, tolerance: f64) -> Self {
        self.overrides.push((check.to_string(), tolerance));
        self
    }

    fn tolerance(&self, check: &str, default: f64) -> f64 {
        self.overrides
            .iter()
            .rev()
            .find(|(name, _)| name == check)
            .map_or(default, |(_, t)| *t)
    }

    /// Stream seed for point `point` of check `check`.
    fn stream(&self, check: u64, point: u64) -> u64 {
        self.seed
            .wrapping_mul(0x9E37_79B9_7F4A_7C15)
            .wrapping_add(check.wrapping_mul(0xBF58_476D_1CE4_E5B9))
            .wrapping_add(point.wrapping_mul(0x94D0_49BB_1331_11EB))
    }

    fn rng(&self, check: u64, point: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.stream(check, point))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub what: &'static str,
    /// Largest deviation over all points, in the check's own unit (absolute
    /// difference, or standard errors for Monte Carlo checks).
    pub max_deviation: f64,
    pub tolerance: f64,
    pub points: usize,
    pub details: Vec<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.max_deviation.is_finite() && self.max_deviation <= self.tolerance
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn failed(&self) -> Vec<&'static str> {
        self.checks
            .iter()
            .filter(|c| !c.passed())
            .map(|c| c.name)
            .collect()
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn render(&self, verbose: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "validation seed={} samples={}",
            self.seed, self.samples
        );
        for c in &self.checks {
            let _ = writeln!(
                out,
                "{} {:<34} max_dev={:.6e} tol={:.1e} points={}  {}",
                if c.passed() { "PASS" } else { "FAIL" },
                c.name,
                c.max_deviation,
                c.tolerance,
                c.points,
                c.what,
            );
            if verbose {
                for d in &c.details {
                    let _ = writeln!(out, "     {d}");
                }
            }
        }
        let failed = self.failed();
        if failed.is_empty() {
            let _ = writeln!(out, "overall: PASS ({} checks)", self.checks.len());
        } else {
            let _ = writeln!(
                out,
                "overall: FAIL ({} of {} checks failed: {})",
                failed.len(),
                self.checks.len(),
                failed.join(", ")
            );
        }
        out
    }
}

struct Builder<'a> {
    config: &'a ValidationConfig,
    checks: Vec<CheckResult>,
}

impl Builder<'_> {
    fn push(
        &mut self,
        name: &'static str,
        what: &'static str,
        default_tol: f64,
        points: Vec<(f64, String)>,
    ) {
        let max_deviation = points.iter().map(|(d, _)| *d).fold(0.0, |acc: f64, d| {
            if d.is_nan() || acc.is_nan() {
                f64::NAN
            } else {
                acc.max(d)
            }
        });
        self.checks.push(CheckResult {
            name,
            what,
            max_deviation,
            tolerance: self.config.tolerance(name, default_tol),
            points: points.len(),
            details: points.into_iter().map(|(_, s)| s).collect(),
        });
    }
}

fn invariant_violation(rho: &DensityMatrix2) -> f64 {
    let m = rho.as_mat();
    let tr = m.trace();
    let [low, _] = rho.eigenvalues();
    m.hermitian_deviation()
        .max((tr.re - 1.0).abs())
        .max(tr.im.abs())
        .max((-low).max(0.0))
}

/// Closed-form isotropic solution in which every Bloch component decays at
/// 4γ; an integrator sanity check independent of the closed-form channel.
fn bloch_decay(psi: &QubitAmplitudes, gamma: f64, t: f64) -> DensityMatrix2 {
    let e4 = (-4.0 * gamma * t).exp();
    let z = (psi.p0() - psi.p1()) * e4;
    DensityMatrix2::new(crate::qstate::Mat2([
        [
            (0.5 * (1.0 + z)).into(),
            psi.coherence() * e4 * Complex64::from_polar(1.0, 2.0 * t),
        ],
        [
            (psi.coherence() * e4 * Complex64::from_polar(1.0, 2.0 * t)).conj(),
            (0.5 * (1.0 - z)).into(),
        ],
    ]))
    .expect("valid by construction")
}

struct ChannelPoint {
    label: String,
    closed_gap: f64,
    bloch_gap: f64,
    outputs: [DensityMatrix2; 3],
}

fn channel_points(config: &ValidationConfig) -> Result<Vec<ChannelPoint>> {
    let mut rng = config.rng(1, 0);
    let states: Vec<QubitAmplitudes> = (0..CHANNEL_STATES)
        .map(|_| sample_state(&mut rng))
        .collect();
    let grid: Vec<(usize, f64, f64)> = states
        .iter()
        .enumerate()
        .flat_map(|(i, _)| {
            CHANNEL_GAMMAS
                .iter()
                .flat_map(move |&g| channel_times(g).map(move |t| (i, g, t)))
        })
        .collect();
    grid.into_par_iter()
        .map(|(i, g, t)| {
            let psi = &states[i];
            let noise = NoiseParams::new(g)?;
            let step = CHANNEL_STEP.min(t / 1000.0);
            let numeric = evolve_isotropic_numeric(psi, noise, t, step)?.rho;
            let closed = evolve_analytic(psi, noise, t)?;
            Ok(ChannelPoint {
                label: format!("state={i} gamma={g:e} t={t:e}"),
                closed_gap: numeric.as_mat().max_abs_diff(closed.as_mat()),
                bloch_gap: numeric
                    .as_mat()
                    .max_abs_diff(bloch_decay(psi, g, t).as_mat()),
                outputs: [numeric, closed, evolve_reversible(psi, t)],
            })
        })
        .collect()
}

/// Runs every oracle cross-check.
pub fn validate_suite(config: &ValidationConfig) -> Result<ValidationReport> {
    let mut b = Builder {
        config,
        checks: Vec::new(),
    };
    let mut produced: Vec<DensityMatrix2> = Vec::new();

    // Closed-form channel against RK4 of the master equation.
    let channel = channel_points(config)?;
    b.push(
        "rk4_vs_closed_form_channel",
        "closed-form isotropic channel vs RK4 master equation",
        1e-8,
        channel
            .iter()
            .map(|p| {
                (
                    p.closed_gap,
                    format!("{} dev={:.3e}", p.label, p.closed_gap),
                )
            })
            .collect(),
    );
    b.push(
        "rk4_vs_bloch_decay",
        "RK4 master equation vs uniform 4γ Bloch decay",
        1e-8,
        channel
            .iter()
            .map(|p| (p.bloch_gap, format!("{} dev={:.3e}", p.label, p.bloch_gap)))
            .collect(),
    );
    produced.extend(channel.iter().flat_map(|p| p.outputs));

    let halving: Vec<(f64, String)> = [(0.05, 3.0), (0.1, 10.0)]
        .iter()
        .map(|&(g, t)| {
            let noise = NoiseParams::new(g)?;
            let psi = QubitAmplitudes::plus();
            let a = evolve_isotropic_numeric(&psi, noise, t, 2.0 * CHANNEL_STEP)?.rho;
            let c = evolve_isotropic_numeric(&psi, noise, t, CHANNEL_STEP)?.rho;
            let d = a.as_mat().max_abs_diff(c.as_mat());
            Ok((d, format!("gamma={g:e} t={t:e} dev={d:.3e}")))
        })
        .collect::<Result<_>>()?;
    b.push(
        "rk4_step_halving",
        "RK4 change under step halving",
        1e-9,
        halving,
    );

    // Storage survival against Monte Carlo over states.
    let survival: Vec<(f64, String)> = SURVIVAL_GAMMA_T
        .iter()
        .enumerate()
        .map(|(k, &gt)| {
            let noise = NoiseParams::new(gt / SURVIVAL_STORAGE_TIME)?;
            let closed = p_survival_single(noise, SURVIVAL_STORAGE_TIME)?.value();
            let mc = survival_single_mc(
                noise,
                SURVIVAL_STORAGE_TIME,
                config.samples,
                config.stream(2, k as u64),
            )?;
            let z = mc.z_score(closed);
            Ok((
                z,
                format!(
                    "gammaT={gt:e} closed={closed:.12} mc={:.12} se={:.3e} z={z:.3}",
                    mc.mean, mc.std_error
                ),
            ))
        })
        .collect::<Result<_>>()?;
    b.push(
        "mc_vs_single_survival",
        "storage survival vs state-averaged overlap (sigmas)",
        3.0,
        survival,
    );

    // Timing: characteristic function and survival.
    let timing_points: Vec<(f64, f64)> = TIMING_TAUS
        .iter()
        .flat_map(|&tau| TIMING_TEDS.iter().map(move |&ted| (tau, ted)))
        .collect();
    let mut phase = Vec::new();
    let mut timing = Vec::new();
    for (k, &(tau, ted)) in timing_points.iter().enumerate() {
        let model = TimingModel::new(tau)?;
        let closed = averaged_phase_factor(model, ted, 2.0);
        let quad = quadrature_average(model, ted, |tp| Complex64::from_polar(1.0, -2.0 * tp))?;
        let d = (closed - quad).norm();
        phase.push((d, format!("tau={tau:e} ted={ted:e} dev={d:.3e}")));

        let pt = p_timing(model, ted)?.value();
        let mc = timing_mc(model, ted, config.samples, config.stream(3, k as u64))?;
        let z = mc.z_score(pt);
        timing.push((
            z,
            format!(
                "tau={tau:e} ted={ted:e} closed={pt:.12} mc={:.12} se={:.3e} z={z:.3}",
                mc.mean, mc.std_error
            ),
        ));

        produced.push(averaged_state(&QubitAmplitudes::plus(), model, ted));
        produced.push(averaged_state_quadrature(
            &QubitAmplitudes::plus(),
            model,
            ted,
        )?);
    }
    b.push(
        "quadrature_vs_phase_factor",
        "(1+2iτ)^(-t/τ) vs Gamma quadrature",
        1e-9,
        phase,
    );
    b.push(
        "mc_quadrature_vs_timing_survival",
        "timing survival vs averaged-state overlap (sigmas)",
        3.0,
        timing,
    );

    // Encoded survival against enumeration of error patterns.
    let mut rng = config.rng(4, 0);
    let encoded: Vec<(f64, String)> = (0..100)
        .map(|_| {
            let p = Probability::new(rng.random::<f64>())?;
            let d = (p_survival_encoded(p).value() - encoded_enumeration(p)).abs();
            Ok((d, format!("p={:.12} dev={d:.3e}", p.value())))
        })
        .collect::<Result<_>>()?;
    b.push(
        "enumeration_vs_encoded_survival",
        "0-or-1-error survival vs 2^5 enumeration",
        1e-14,
        encoded,
    );

    // Semigroup property of the averaged evolution.
    let mut rng = config.rng(5, 0);
    let semigroup: Vec<(f64, String)> = (0..1000)
        .map(|_| {
            let tau = 10f64.powf(rng.random_range(-4.0..0.0));
            let t1 = rng.random_range(0.0..50.0);
            let t2 = rng.random_range(0.0..50.0);
            let omega = rng.random_range(-10.0..10.0);
            let model = TimingModel::new(tau)?;
            let whole = averaged_phase_factor(model, t1 + t2, omega);
            let split =
                averaged_phase_factor(model, t1, omega) * averaged_phase_factor(model, t2, omega);
            let d = (whole - split).norm();
            Ok((
                d,
                format!("tau={tau:e} t1={t1:e} t2={t2:e} omega={omega:e} dev={d:.3e}"),
            ))
        })
        .collect::<Result<_>>()?;
    b.push(
        "semigroup",
        "U(t1+t2) = U(t1)U(t2) on coherences",
        1e-12,
        semigroup,
    );

    // Density-matrix invariants of everything produced above plus a sweep.
    let mut rng = config.rng(6, 0);
    for _ in 0..500 {
        let psi = sample_state(&mut rng);
        let g = rng.random_range(0.0..1.0);
        let t = rng.random_range(0.0..100.0);
        let tau = rng.random_range(0.0..1.0);
        produced.push(evolve_analytic(&psi, NoiseParams::new(g)?, t)?);
        produced.push(evolve_reversible(&psi, t));
        produced.push(averaged_state(&psi, TimingModel::new(tau)?, t));
    }
    let worst = produced.iter().map(invariant_violation).fold(0.0, f64::max);
    b.push(
        "density_invariants",
        "Hermiticity, unit trace and PSD of produced states",
        1e-12,
        vec![(
            worst,
            format!("{} matrices worst={worst:.3e}", produced.len()),
        )],
    );

    // Gamma density moments.
    let moments: Vec<(f64, String)> = PDF_SHAPES
        .iter()
        .map(|&shape| {
            let model = TimingModel::new(1.0 / shape)?;
            let norm = quadrature_average_real(model, 1.0, |_| 1.0)?;
            let mean = quadrature_average_real(model, 1.0, |x| x)?;
            let var = quadrature_average_real(model, 1.0, |x| (x - 1.0) * (x - 1.0))?;
            let d = (norm - 1.0)
                .abs()
                .max((mean - 1.0).abs())
                .max((var - 1.0 / shape).abs());
            Ok((
                d,
                format!(
                    "shape={shape:e} norm={norm:.15} mean={mean:.15} var={var:.15e} dev={d:.3e}"
                ),
            ))
        })
        .collect::<Result<_>>()?;
    b.push(
        "gamma_pdf_moments",
        "normalization, mean t and variance τt",
        1e-9,
        moments,
    );

    // Probabilities stay in [0, 1].
    let mut rng = config.rng(7, 0);
    let mut excess: f64 = 0.0;
    let sweeps = 2000;
    for _ in 0..sweeps {
        let noise = NoiseParams::new(rng.random_range(0.0..1.0))?;
        let model = TimingModel::new(rng.random_range(0.0..1.0))?;
        let t = rng.random_range(0.0..1e6) + 1e-9;
        let ted = rng.random_range(0.0..1e3);
        let n = rng.random_range(1..=1000);
        let values = [
            p_survival_single(noise, t)?.value(),
            p_timing(model, ted)?.value(),
            p_combined(noise, model, &StorageSchedule::single(t, ted)?)?.value(),
            p_repeated(noise, model, &StorageSchedule::new(t, ted, n)?)?.value(),
        ];
        for v in values {
            excess = excess.max(-v).max(v - 1.0);
        }
    }
    b.push(
        "probability_range",
        "all probabilities within [0, 1]",
        1e-12,
        vec![(
            excess.max(0.0),
            format!(
                "{sweeps} parameter tuples worst_excess={:.3e}",
                excess.max(0.0)
            ),
        )],
    );

    Ok(ValidationReport {
        seed: config.seed,
        samples: config.samples,
        checks: b.checks,
    })
}
