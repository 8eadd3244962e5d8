//! Single-qubit states: amplitudes, 2×2 density matrices, overlaps and the
//! state sampler used for averaging over "all possible" input states.
//!
//! The averaging measure is uniform in the polar angle, θ ~ U[0, π] and
//! φ ~ U[0, 2π), *not* the Haar measure. Under it
//! E[|c0|⁴ + |c1|⁴] = 3/4 and E[2|c0|²|c1|²] = 1/4, which are the constants
//! carried by the closed-form survival probabilities in [`crate::survival`].
//! The Haar measure would give 2/3 and 1/3 instead.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};

pub type ComplexScalar = Complex64;

/// Tolerance for algebraic identities on values produced by this crate.
pub const IDENTITY_TOL: f64 = 1e-12;
/// Tolerance for validating caller-supplied input.
pub const INPUT_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// A general 2×2 complex matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[ZERO, ZERO], [ZERO, ZERO]]);
    pub const IDENTITY: Mat2 = Mat2([[ONE, ZERO], [ZERO, ONE]]);

    pub fn pauli_x() -> Self {
        Mat2([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn pauli_y() -> Self {
        let i = Complex64::i();
        Mat2([[ZERO, -i], [i, ZERO]])
    }

    pub fn pauli_z() -> Self {
        Mat2([[ONE, ZERO], [ZERO, -ONE]])
    }

    pub fn diag(a: f64, d: f64) -> Self {
        Mat2([[a.into(), ZERO], [ZERO, d.into()]])
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.0;
        Mat2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = *self;
        out.0.iter_mut().flatten().for_each(|z| *z *= s);
        out
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Mat2) -> f64 {
        self.0
            .iter()
            .flatten()
            .zip(other.0.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from Hermiticity.
    pub fn hermitian_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().flatten().all(|z| finite(*z))
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, rhs: Mat2) -> Mat2 {
        let mut out = self;
        for (a, b) in out.0.iter_mut().flatten().zip(rhs.0.iter().flatten()) {
            *a += b;
        }
        out
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, rhs: Mat2) -> Mat2 {
        self + rhs.scale(-ONE)
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, rhs: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &rhs.0);
        Mat2(std::array::from_fn(|i| {
            std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j])
        }))
    }
}

/// Normalized amplitudes of a pure qubit state c0|0⟩ + c1|1⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitAmplitudes {
    c0: Complex64,
    c1: Complex64,
}

impl QubitAmplitudes {
    /// Rejects non-finite amplitudes and a norm deviating from 1 by more
    /// than [`INPUT_TOL`].
    pub fn new(c0: Complex64, c1: Complex64) -> Result<Self> {
        if !finite(c0) || !finite(c1) {
            return Err(Error::NonFinite("qubit amplitudes"));
        }
        let norm = c0.norm_sqr() + c1.norm_sqr();
        if (norm - 1.0).abs() > INPUT_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { c0, c1 })
    }

    pub fn zero() -> Self {
        Self { c0: ONE, c1: ZERO }
    }

    pub fn one() -> Self {
        Self { c0: ZERO, c1: ONE }
    }

    /// (|0⟩ + |1⟩)/√2.
    pub fn plus() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { c0: h, c1: h }
    }

    pub fn c0(&self) -> Complex64 {
        self.c0
    }

    pub fn c1(&self) -> Complex64 {
        self.c1
    }

    pub fn p0(&self) -> f64 {
        self.c0.norm_sqr()
    }

    pub fn p1(&self) -> f64 {
        self.c1.norm_sqr()
    }

    /// The coherence c0·c1*.
    pub fn coherence(&self) -> Complex64 {
        self.c0 * self.c1.conj()
    }
}

/// Polar/azimuthal angles on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochAngles {
    theta: f64,
    phi: f64,
}

impl BlochAngles {
    /// θ must lie in [0, π] and φ in [0, 2π).
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(theta.is_finite() && (0.0..=PI).contains(&theta)) {
            return Err(Error::InvalidParameter {
                name: "theta",
                requirement: "in [0, pi]",
                value: theta,
            });
        }
        if !(phi.is_finite() && (0.0..2.0 * PI).contains(&phi)) {
            return Err(Error::InvalidParameter {
                name: "phi",
                requirement: "in [0, 2pi)",
                value: phi,
            });
        }
        Ok(Self { theta, phi })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// c0 = cos(θ/2), c1 = e^{iφ} sin(θ/2).
    pub fn to_amplitudes(&self) -> QubitAmplitudes {
        let (s, c) = (self.theta / 2.0).sin_cos();
        QubitAmplitudes {
            c0: Complex64::new(c, 0.0),
            c1: Complex64::from_polar(s, self.phi),
        }
    }
}

/// A 2×2 density matrix: Hermitian, unit trace, positive semidefinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2(Mat2);

impl DensityMatrix2 {
    /// Validates a caller-supplied matrix against the density-operator
    /// invariants at [`INPUT_TOL`].
    pub fn new(m: Mat2) -> Result<Self> {
        let rho = Self(m);
        rho.check(INPUT_TOL)?;
        Ok(rho)
    }

    /// Wraps a matrix produced by an operation that preserves the invariants.
    pub(crate) fn from_mat(m: Mat2) -> Self {
        Self(m)
    }

    /// Builds the matrix with real diagonal `(p0, p1)` and upper coherence
    /// `r01`; the lower entry is its conjugate.
    pub(crate) fn from_parts(p0: f64, p1: f64, r01: Complex64) -> Self {
        Self(Mat2([[p0.into(), r01], [r01.conj(), p1.into()]]))
    }

    pub fn maximally_mixed() -> Self {
        Self(Mat2::diag(0.5, 0.5))
    }

    pub fn as_mat(&self) -> &Mat2 {
        &self.0
    }

    pub fn r00(&self) -> Complex64 {
        self.0 .0[0][0]
    }

    pub fn r01(&self) -> Complex64 {
        self.0 .0[0][1]
    }

    pub fn r10(&self) -> Complex64 {
        self.0 .0[1][0]
    }

    pub fn r11(&self) -> Complex64 {
        self.0 .0[1][1]
    }

    /// Eigenvalues (ascending) from the trace and determinant of the
    /// Hermitian part.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let a = self.r00().re;
        let d = self.r11().re;
        let b = 0.5 * (self.r01() + self.r10().conj());
        let half_tr = 0.5 * (a + d);
        let disc = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        [half_tr - disc, half_tr + disc]
    }

    /// Checks Hermiticity, real diagonal, unit trace and PSD at `tol`.
    pub fn check(&self, tol: f64) -> Result<()> {
        if !self.0.is_finite() {
            return Err(Error::NonFinite("density matrix"));
        }
        let deviation = self.0.hermitian_deviation();
        if deviation > tol {
            return Err(Error::NotHermitian { deviation });
        }
        let tr = self.0.trace();
        if (tr.re - 1.0).abs() > tol || tr.im.abs() > tol {
            return Err(Error::NotDensity(format!("trace is {tr}")));
        }
        let [low, _] = self.eigenvalues();
        if low < -tol {
            return Err(Error::NotDensity(format!("negative eigenvalue {low:e}")));
        }
        Ok(())
    }

    /// Tr{ρ²}.
    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }
}

/// |ψ⟩⟨ψ|. Normalization is enforced when the amplitudes are constructed.
pub fn pure_density(psi: &QubitAmplitudes) -> DensityMatrix2 {
    DensityMatrix2::from_parts(psi.p0(), psi.p1(), psi.coherence())
}

/// Tr{a·b}. Fails if the trace carries an imaginary residue above
/// [`INPUT_TOL`]; the residue is discarded otherwise.
pub fn overlap(a: &DensityMatrix2, b: &DensityMatrix2) -> Result<f64> {
    let tr = (a.0 * b.0).trace();
    if !finite(tr) {
        return Err(Error::NonFinite("overlap"));
    }
    if tr.im.abs() > INPUT_TOL {
        return Err(Error::ImaginaryResidue { residue: tr.im });
    }
    Ok(tr.re)
}

/// Draws θ ~ U[0, π], φ ~ U[0, 2π) and converts to amplitudes.
pub fn sample_angles<R: Rng + ?Sized>(rng: &mut R) -> BlochAngles {
    let theta = rng.random::<f64>() * PI;
    let phi = rng.random::<f64>() * 2.0 * PI;
    BlochAngles { theta, phi }
}

pub fn sample_state<R: Rng + ?Sized>(rng: &mut R) -> QubitAmplitudes {
    sample_angles(rng).to_amplitudes()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn basis_state_density() {
        let rho = pure_density(&QubitAmplitudes::zero());
        assert_eq!(rho.as_mat(), &Mat2::diag(1.0, 0.0));
    }

    #[test]
    fn equal_superposition_density() {
        let rho = pure_density(&QubitAmplitudes::plus());
        for z in rho.as_mat().0.iter().flatten() {
            assert!((z - c(0.5, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn rejects_unnormalized_amplitudes() {
        let err = QubitAmplitudes::new(c(1.0, 0.0), c(0.1, 0.0)).unwrap_err();
        assert!(matches!(err, Error::NotNormalized { .. }));
        assert!(QubitAmplitudes::new(c(FRAC_1_SQRT_2, 0.0), c(0.0, FRAC_1_SQRT_2)).is_ok());
        assert!(QubitAmplitudes::new(c(f64::NAN, 0.0), c(0.0, 1.0)).is_err());
    }

    #[test]
    fn random_pure_state_has_eigenvalues_one_and_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let rho = pure_density(&sample_state(&mut rng));
            // Independent route: eigenvalues of [[a, b], [b*, d]] from the
            // characteristic polynomial λ² − (a+d)λ + (ad − |b|²).
            let a = rho.r00().re;
            let d = rho.r11().re;
            let det = a * d - rho.r01().norm_sqr();
            let tr = a + d;
            let root = (tr * tr - 4.0 * det).max(0.0).sqrt();
            let (lo, hi) = ((tr - root) / 2.0, (tr + root) / 2.0);
            assert!(lo.abs() < 1e-12 && (hi - 1.0).abs() < 1e-12, "{lo} {hi}");
            rho.check(IDENTITY_TOL).unwrap();
        }
    }

    #[test]
    fn overlap_basics() {
        let zero = pure_density(&QubitAmplitudes::zero());
        let one = pure_density(&QubitAmplitudes::one());
        let mixed = DensityMatrix2::maximally_mixed();
        assert!((overlap(&zero, &zero).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(overlap(&zero, &one).unwrap(), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let rho = pure_density(&sample_state(&mut rng));
            assert!((overlap(&mixed, &rho).unwrap() - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn overlap_flags_imaginary_residue() {
        // Not a density matrix: the off-diagonals are not conjugate.
        let bad = DensityMatrix2::from_mat(Mat2([
            [c(0.5, 0.0), c(0.0, 0.5)],
            [c(0.0, 0.5), c(0.5, 0.0)],
        ]));
        let plus = pure_density(&QubitAmplitudes::plus());
        assert!(matches!(
            overlap(&bad, &plus),
            Err(Error::ImaginaryResidue { .. })
        ));
    }

    #[test]
    fn density_validation_rejects_bad_input() {
        assert!(DensityMatrix2::new(Mat2::diag(0.6, 0.6)).is_err());
        assert!(DensityMatrix2::new(Mat2::diag(1.2, -0.2)).is_err());
        assert!(DensityMatrix2::new(Mat2([
            [c(0.5, 0.0), c(0.1, 0.0)],
            [c(0.2, 0.0), c(0.5, 0.0)]
        ]))
        .is_err());
        assert!(DensityMatrix2::new(Mat2::diag(0.3, 0.7)).is_ok());
    }

    #[test]
    fn bloch_angles_ranges() {
        assert!(BlochAngles::new(-0.1, 0.0).is_err());
        assert!(BlochAngles::new(0.0, 2.0 * PI).is_err());
        let psi = BlochAngles::new(PI, 0.0).unwrap().to_amplitudes();
        assert!(psi.p1() > 1.0 - 1e-15);
    }

    #[test]
    fn sampler_is_deterministic_per_seed() {
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..16).map(|_| sample_state(&mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(5), draw(5));
        assert_ne!(draw(5), draw(6));
    }

    /// Monte Carlo moments of the averaging measure; expected values follow
    /// from ∫ cos⁴(θ/2) + sin⁴(θ/2) dθ/π = 3/4.
    #[test]
    fn sampler_moments_match_uniform_theta_measure() {
        let n = 1_000_000;
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let (mut s4, mut s4sq, mut s2, mut s2sq) = (0.0, 0.0, 0.0, 0.0);
        for _ in 0..n {
            let psi = sample_state(&mut rng);
            let quartic = psi.p0().powi(2) + psi.p1().powi(2);
            let cross = 2.0 * psi.p0() * psi.p1();
            s4 += quartic;
            s4sq += quartic * quartic;
            s2 += cross;
            s2sq += cross * cross;
        }
        let nf = n as f64;
        let check = |sum: f64, sumsq: f64, expect: f64| {
            let mean = sum / nf;
            let se = ((sumsq / nf - mean * mean) / nf).sqrt();
            assert!(
                (mean - expect).abs() < 3.0 * se,
                "mean {mean} expect {expect} se {se}"
            );
        };
        check(s4, s4sq, 0.75);
        check(s2, s2sq, 0.25);
    }
}
