//! Single-qubit evolution under H = σ_z with isotropic noise.
//!
//! [`evolve_analytic`] is the closed-form channel used by every survival
//! formula downstream. [`evolve_numeric`] integrates the master equation
//! directly with fixed-step RK4 and exists only to cross-check closed forms.
//!
//! Phase convention: the coherence ρ01 rotates as e^{+2it}, which corresponds
//! to σ_z|0⟩ = −|0⟩. [`LindbladGenerator::isotropic`] therefore uses
//! H = diag(−1, +1) so both paths share the same sign.

use num_complex::Complex64;

use crate::error::{require_non_negative, require_positive, Error, Result};
use crate::qstate::{pure_density, DensityMatrix2, Mat2, QubitAmplitudes, IDENTITY_TOL};

/// Minimum number of RK4 steps accepted by [`evolve_numeric`].
pub const MIN_STEPS: f64 = 1000.0;
/// Maximum trace drift tolerated before the step is declared too large.
pub const MAX_TRACE_DRIFT: f64 = 1e-6;

/// Isotropic decoherence rate γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    gamma: f64,
}

impl NoiseParams {
    pub fn new(gamma: f64) -> Result<Self> {
        Ok(Self {
            gamma: require_non_negative("gamma", gamma)?,
        })
    }

    pub fn noiseless() -> Self {
        Self { gamma: 0.0 }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Hamiltonian plus collapse operators of a Lindblad master equation.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladGenerator {
    hamiltonian: Mat2,
    collapse_ops: Vec<Mat2>,
}

impl LindbladGenerator {
    pub fn new(hamiltonian: Mat2, collapse_ops: Vec<Mat2>) -> Result<Self> {
        if !hamiltonian.is_finite() || collapse_ops.iter().any(|l| !l.is_finite()) {
            return Err(Error::NonFinite("lindblad generator"));
        }
        let deviation = hamiltonian.hermitian_deviation();
        if deviation > IDENTITY_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self {
            hamiltonian,
            collapse_ops,
        })
    }

    /// H = diag(−1, +1) with L = √γ σ_x, √γ σ_y, √γ σ_z.
    pub fn isotropic(noise: NoiseParams) -> Self {
        let s = Complex64::new(noise.gamma.sqrt(), 0.0);
        Self {
            hamiltonian: Mat2::diag(-1.0, 1.0),
            collapse_ops: [Mat2::pauli_x(), Mat2::pauli_y(), Mat2::pauli_z()]
                .iter()
                .map(|p| p.scale(s))
                .collect(),
        }
    }

    pub fn hamiltonian(&self) -> &Mat2 {
        &self.hamiltonian
    }

    pub fn collapse_ops(&self) -> &[Mat2] {
        &self.collapse_ops
    }

    /// Right-hand side of the master equation at `rho`.
    pub fn apply(&self, rho: &Mat2) -> Mat2 {
        let minus_i = Complex64::new(0.0, -1.0);
        let h = self.hamiltonian;
        let mut out = (h * *rho - *rho * h).scale(minus_i);
        for l in &self.collapse_ops {
            let ldag = l.adjoint();
            let ldl = ldag * *l;
            let anti = ldl * *rho + *rho * ldl;
            out = out + *l * *rho * ldag - anti.scale(0.5.into());
        }
        out
    }
}

/// Closed-form isotropic channel: populations relax with weights
/// (1 ± e^{−4γt})/2 and the coherence becomes
/// (c0 c1*/2)(e^{−2γt} + e^{−6γt}) e^{+2it}.
pub fn evolve_analytic(
    psi: &QubitAmplitudes,
    noise: NoiseParams,
    t: f64,
) -> Result<DensityMatrix2> {
    let t = require_non_negative("t", t)?;
    let g = noise.gamma;
    let e4 = (-4.0 * g * t).exp();
    let e2 = (-2.0 * g * t).exp();
    let e6 = (-6.0 * g * t).exp();
    let (p0, p1) = (psi.p0(), psi.p1());
    let r00 = 0.5 * p0 * (1.0 + e4) + 0.5 * p1 * (1.0 - e4);
    let r11 = 0.5 * p0 * (1.0 - e4) + 0.5 * p1 * (1.0 + e4);
    let decay = 0.5 * (e2 + e6);
    let r01 = psi.coherence() * decay * Complex64::from_polar(1.0, 2.0 * t);
    Ok(DensityMatrix2::from_parts(r00, r11, r01))
}

/// Hamiltonian-only evolution: populations fixed, coherence phase e^{+2it}.
pub fn evolve_reversible(psi: &QubitAmplitudes, t: f64) -> DensityMatrix2 {
    let r01 = psi.coherence() * Complex64::from_polar(1.0, 2.0 * t);
    DensityMatrix2::from_parts(psi.p0(), psi.p1(), r01)
}

/// Output of [`evolve_numeric`] with the size of the end-point corrections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericEvolution {
    pub rho: DensityMatrix2,
    pub steps: usize,
    /// Largest entrywise change made by re-Hermitizing.
    pub hermitian_correction: f64,
    /// |Tr ρ − 1| before renormalization.
    pub trace_correction: f64,
}

/// Fixed-step RK4 integration of the master equation over [0, t].
///
/// The step is shrunk so an integer number of steps covers [0, t] exactly;
/// at least [`MIN_STEPS`] are required. At the end the state is replaced by
/// its Hermitian part and rescaled to unit trace once.
pub fn evolve_numeric(
    rho0: &DensityMatrix2,
    gen: &LindbladGenerator,
    t: f64,
    step: f64,
) -> Result<NumericEvolution> {
    let deviation = rho0.as_mat().hermitian_deviation();
    if deviation > IDENTITY_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let t = require_non_negative("t", t)?;
    let step = require_positive("step", step)?;
    if t == 0.0 {
        return Ok(NumericEvolution {
            rho: *rho0,
            steps: 0,
            hermitian_correction: 0.0,
            trace_correction: 0.0,
        });
    }
    let ratio = t / step;
    if ratio < MIN_STEPS {
        return Err(Error::StepTooLarge {
            step,
            t,
            steps: ratio,
        });
    }
    let steps = ratio.ceil() as usize;
    let h = t / steps as f64;
    let half = Complex64::new(0.5 * h, 0.0);
    let full = Complex64::new(h, 0.0);
    let sixth = Complex64::new(h / 6.0, 0.0);
    let two = Complex64::new(2.0, 0.0);

    let mut rho = *rho0.as_mat();
    for _ in 0..steps {
        let k1 = gen.apply(&rho);
        let k2 = gen.apply(&(rho + k1.scale(half)));
        let k3 = gen.apply(&(rho + k2.scale(half)));
        let k4 = gen.apply(&(rho + k3.scale(full)));
        rho = rho + (k1 + k2.scale(two) + k3.scale(two) + k4).scale(sixth);
    }
    if !rho.is_finite() {
        return Err(Error::NonFinite("integrated state"));
    }

    let trace = rho.trace();
    let drift = (trace - Complex64::new(1.0, 0.0)).norm();
    if drift > MAX_TRACE_DRIFT {
        return Err(Error::TraceDrift { drift });
    }
    let herm = (rho + rho.adjoint()).scale(0.5.into());
    let hermitian_correction = herm.max_abs_diff(&rho);
    let normalized = herm.scale((1.0 / herm.trace().re).into());
    Ok(NumericEvolution {
        rho: DensityMatrix2::from_mat(normalized),
        steps,
        hermitian_correction,
        trace_correction: drift,
    })
}

/// Convenience wrapper: RK4 under the isotropic generator from |ψ⟩⟨ψ|.
pub fn evolve_isotropic_numeric(
    psi: &QubitAmplitudes,
    noise: NoiseParams,
    t: f64,
    step: f64,
) -> Result<NumericEvolution> {
    evolve_numeric(
        &pure_density(psi),
        &LindbladGenerator::isotropic(noise),
        t,
        step,
    )
}
