//! Survival probabilities, efficiency ratio and optimal repetition count for
//! a 5-qubit error-correcting code whose encoding and decoding stages suffer
//! random-time (timing) noise.
//!
//! The crate is layered bottom-up:
//!
//! * [`qstate`]: 2×2 density-matrix algebra, state sampling and overlaps.
//! * [`lindblad`]: single-qubit isotropic-noise evolution, closed form plus an
//!   RK4 integrator of the master equation used as an oracle.
//! * [`randomtime`]: Gamma-distributed evolution times, the averaged phase
//!   factor and a Gauss–Legendre quadrature oracle.
//! * [`survival`]: the survival probabilities, efficiency ratio and N-fold
//!   repetition probability, with Monte Carlo cross-checks.
//! * [`scanlab`]: parameter scans, the repetition optimizer, CSV/JSON output
//!   and the validation suite behind the CLI.
//!
//! All times and rates are dimensionless, scaled by the qubit frequency.

pub mod error;
pub mod lindblad;
pub mod qstate;
pub mod randomtime;
pub mod scanlab;
pub mod survival;

pub use error::{Error, Result};
pub use lindblad::{LindbladGenerator, NoiseParams};
pub use qstate::{BlochAngles, DensityMatrix2, QubitAmplitudes};
pub use randomtime::TimingModel;
pub use survival::{Probability, StorageSchedule};
