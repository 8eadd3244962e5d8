//! Survival probabilities of a stored qubit, with and without the 5-qubit
//! code, under storage noise γ and encode/decode timing noise τ.
//!
//! Every closed form here has an independent cross-check in [`oracle`]:
//! Monte Carlo averages of density-matrix overlaps over sampled states,
//! Gamma quadrature, or exhaustive enumeration of error patterns.
//!
//! The timing survival is a per-qubit proxy: it scores the encode/decode
//! stage as if each qubit evolved freely for the total encode+decode time.

use num_complex::Complex64;

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::lindblad::NoiseParams;
use crate::qstate::IDENTITY_TOL;
use crate::randomtime::{averaged_phase_factor, TimingModel, COHERENCE_FREQUENCY};

/// Number of physical qubits in the code.
pub const CODE_QUBITS: u32 = 5;

/// A probability in [0, 1], admitting 1e-12 of round-off above 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && (0.0..=1.0 + IDENTITY_TOL).contains(&value) {
            Ok(Self(value))
        } else {
            Err(Error::InvalidParameter {
                name: "probability",
                requirement: "in [0, 1]",
                value,
            })
        }
    }

    fn from_formula(value: f64) -> Self {
        debug_assert!(
            (0.0..=1.0 + IDENTITY_TOL).contains(&value),
            "probability {value} out of range"
        );
        Self(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

/// Storage time T, total encode+decode time T_ed and the number N of
/// equally spaced correction procedures during T.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StorageSchedule {
    storage_time: f64,
    encode_decode_time: f64,
    repetitions: u32,
}

impl StorageSchedule {
    pub fn new(storage_time: f64, encode_decode_time: f64, repetitions: u32) -> Result<Self> {
        let storage_time = require_positive("T", storage_time)?;
        let encode_decode_time = require_non_negative("T_ed", encode_decode_time)?;
        if repetitions == 0 {
            return Err(Error::InvalidParameter {
                name: "N",
                requirement: ">= 1",
                value: 0.0,
            });
        }
        Ok(Self {
            storage_time,
            encode_decode_time,
            repetitions,
        })
    }

    /// A single correction procedure.
    pub fn single(storage_time: f64, encode_decode_time: f64) -> Result<Self> {
        Self::new(storage_time, encode_decode_time, 1)
    }

    pub fn storage_time(&self) -> f64 {
        self.storage_time
    }

    pub fn encode_decode_time(&self) -> f64 {
        self.encode_decode_time
    }

    pub fn repetitions(&self) -> u32 {
        self.repetitions
    }

    /// A warning when T_ed is not much smaller than T. The model assumes
    /// storage noise is negligible during encode/decode, which is only
    /// reasonable in that regime.
    pub fn regime_warning(&self) -> Option<String> {
        let ratio = self.encode_decode_time / self.storage_time;
        (ratio > 0.1).then(|| {
            format!("T_ed/T = {ratio:.3} is not small; the timing model assumes T_ed << T")
        })
    }
}

/// State-averaged survival of a single unprotected qubit after storage `t`:
/// 1/2 + e^{−4γt}/4 + (e^{−2γt} + e^{−6γt})/8.
pub fn p_survival_single(noise: NoiseParams, t: f64) -> Result<Probability> {
    let t = require_non_negative("T", t)?;
    let g = noise.gamma();
    let value =
        0.5 + 0.25 * (-4.0 * g * t).exp() + 0.125 * ((-2.0 * g * t).exp() + (-6.0 * g * t).exp());
    Ok(Probability::from_formula(value))
}

/// Survival of the encoded qubit: zero or one of five qubits failed,
/// p⁵ + 5p⁴(1 − p).
pub fn p_survival_encoded(ps: Probability) -> Probability {
    let p = ps.0;
    let p4 = p.powi(4);
    Probability::from_formula(p4 * p + 5.0 * p4 * (1.0 - p))
}

/// Per-qubit survival of the encode/decode stage under timing noise:
/// 3/4 + Re{(1 + 2iτ)^{−T_ed/τ} e^{2iT_ed}}/4, exactly 1 when τ = 0.
pub fn p_timing(timing: TimingModel, encode_decode_time: f64) -> Result<Probability> {
    let ted = require_non_negative("T_ed", encode_decode_time)?;
    if timing.is_deterministic() {
        return Ok(Probability::ONE);
    }
    let factor = averaged_phase_factor(timing, ted, COHERENCE_FREQUENCY);
    let rotated = factor * Complex64::from_polar(1.0, COHERENCE_FREQUENCY * ted);
    Ok(Probability::from_formula(0.75 + 0.25 * rotated.re))
}

fn single_schedule(sched: &StorageSchedule) -> Result<()> {
    if sched.repetitions != 1 {
        return Err(Error::InvalidParameter {
            name: "N",
            requirement: "equal to 1 for a single correction",
            value: sched.repetitions as f64,
        });
    }
    Ok(())
}

/// Success probability of one encode → store → decode cycle:
/// P_t(T_ed)⁵ · P*_s(T).
pub fn p_combined(
    noise: NoiseParams,
    timing: TimingModel,
    sched: &StorageSchedule,
) -> Result<Probability> {
    single_schedule(sched)?;
    p_repeated(noise, timing, sched)
}

/// Uncorrected over corrected mismatch,
/// (1 − P_s(T + T_ed)⁵) / (1 − P(T_ed, T)).
///
/// Correction pays off when the ratio exceeds 1.
pub fn efficiency_ratio(
    noise: NoiseParams,
    timing: TimingModel,
    sched: &StorageSchedule,
) -> Result<f64> {
    let corrected = p_combined(noise, timing, sched)?.0;
    let denominator = 1.0 - corrected;
    if denominator == 0.0 {
        return Err(Error::DegenerateDenominator);
    }
    let bare = p_survival_single(noise, sched.storage_time + sched.encode_decode_time)?.0;
    Ok((1.0 - bare.powi(CODE_QUBITS as i32)) / denominator)
}

/// N equally spaced correction cycles: P_t(T_ed)^{5N} · P*_s(T/N)^N.
///
/// Storage per cycle is T/N; the N·T_ed spent correcting is not subtracted.
pub fn p_repeated(
    noise: NoiseParams,
    timing: TimingModel,
    sched: &StorageSchedule,
) -> Result<Probability> {
    let n = f64::from(sched.repetitions);
    let pt = p_timing(timing, sched.encode_decode_time)?.0;
    let ps = p_survival_single(noise, sched.storage_time / n)?;
    let encoded = p_survival_encoded(ps).0;
    let value = pt.powf(f64::from(CODE_QUBITS) * n) * encoded.powf(n);
    Ok(Probability::from_formula(value))
}

/// Independent numerical cross-checks for the closed forms above.
pub mod oracle {
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rayon::prelude::*;

    use super::{Probability, CODE_QUBITS};
    use crate::error::{require_non_negative, Result};
    use crate::lindblad::{evolve_analytic, evolve_reversible, NoiseParams};
    use crate::qstate::{overlap, sample_state, DensityMatrix2, QubitAmplitudes};
    use crate::randomtime::{quadrature_average, TimingModel};

    /// Samples drawn from one independent stream.
    pub const CHUNK: usize = 1 << 15;

    /// Sample mean with its standard error from the empirical variance.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct McEstimate {
        pub mean: f64,
        pub std_error: f64,
        pub samples: usize,
    }

    impl McEstimate {
        /// |mean − expected| in units of the standard error.
        pub fn z_score(&self, expected: f64) -> f64 {
            let diff = (self.mean - expected).abs();
            if self.std_error == 0.0 {
                if diff == 0.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                diff / self.std_error
            }
        }

        pub fn agrees(&self, expected: f64, sigmas: f64) -> bool {
            self.z_score(expected) <= sigmas
        }
    }

    /// Averages `f` over `samples` states drawn from the uniform-θ measure.
    ///
    /// Samples are split into chunks of [`CHUNK`]; chunk i draws from the
    /// ChaCha stream i of `seed`. Chunk sums are combined in chunk order, so
    /// the estimate does not depend on how many threads ran.
    pub fn state_average<F>(samples: usize, seed: u64, f: F) -> Result<McEstimate>
    where
        F: Fn(&QubitAmplitudes) -> Result<f64> + Sync,
    {
        let chunks = samples.div_ceil(CHUNK);
        let partials: Vec<(f64, f64)> = (0..chunks)
            .into_par_iter()
            .map(|chunk| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(chunk as u64);
                let len = CHUNK.min(samples - chunk * CHUNK);
                let (mut sum, mut sumsq) = (0.0, 0.0);
                for _ in 0..len {
                    let v = f(&sample_state(&mut rng))?;
                    sum += v;
                    sumsq += v * v;
                }
                Ok((sum, sumsq))
            })
            .collect::<Result<_>>()?;
        let (sum, sumsq) = partials
            .iter()
            .fold((0.0, 0.0), |(a, b), (s, q)| (a + s, b + q));
        let n = samples as f64;
        let mean = sum / n;
        let var = (sumsq / n - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
        Ok(McEstimate {
            mean,
            std_error: (var / n).sqrt(),
            samples,
        })
    }

    /// State average of Tr{ρ(T) ρ_rev(T)} with ρ(T) from the closed-form
    /// channel.
    pub fn survival_single_mc(
        noise: NoiseParams,
        t: f64,
        samples: usize,
        seed: u64,
    ) -> Result<McEstimate> {
        let t = require_non_negative("T", t)?;
        state_average(samples, seed, |psi| {
            overlap(&evolve_analytic(psi, noise, t)?, &evolve_reversible(psi, t))
        })
    }

    /// E[e^{+2it′}] over the evolution-time distribution, by quadrature.
    pub fn coherence_factor_quadrature(timing: TimingModel, t: f64) -> Result<Complex64> {
        let t = require_non_negative("t", t)?;
        if timing.is_deterministic() || t == 0.0 {
            return Ok(Complex64::from_polar(1.0, 2.0 * t));
        }
        quadrature_average(timing, t, |tp| Complex64::from_polar(1.0, 2.0 * tp))
    }

    /// State average of Tr{ρ̄(T_ed) ρ_rev(T_ed)}, with the time average of
    /// the reversibly evolved coherence done by quadrature.
    pub fn timing_mc(
        timing: TimingModel,
        ted: f64,
        samples: usize,
        seed: u64,
    ) -> Result<McEstimate> {
        let factor = coherence_factor_quadrature(timing, ted)?;
        state_average(samples, seed, |psi| {
            let averaged = DensityMatrix2::from_parts(psi.p0(), psi.p1(), psi.coherence() * factor);
            overlap(&averaged, &evolve_reversible(psi, ted))
        })
    }

    /// Sum over all 2⁵ error patterns with at most one failed qubit.
    pub fn encoded_enumeration(ps: Probability) -> f64 {
        let p = ps.value();
        (0u32..1 << CODE_QUBITS)
            .filter(|pattern| pattern.count_ones() <= 1)
            .map(|pattern| {
                let failed = pattern.count_ones() as i32;
                p.powi(CODE_QUBITS as i32 - failed) * (1.0 - p).powi(failed)
            })
            .sum()
    }
}
