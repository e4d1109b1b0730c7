//! Fitting the nearest generalized essential matrix — the 6x6 block form
//! `[t̂R R; R 0]` built from a rotation `R` and a skew-symmetric `t̂` — to an
//! arbitrary 6x6 matrix under the Frobenius norm.
//!
//! The main entry point is [`solver::fit`], a steepest-descent method along
//! geodesics of the rotation group with an Armijo doubling/halving step rule.
//! A quadratic-penalty solver over the direct 33-constraint formulation is
//! provided as a baseline ([`baseline::fit_direct`]), together with closed-form
//! projection onto central (3x3) essential matrices, reproducible synthetic
//! instance generation, DLT-based relative/absolute pose pipelines for line
//! correspondences, and a benchmark harness.
//!
//! ```
//! use gemfit::gem::FitProblem;
//! use gemfit::solver::{fit, SolverConfig};
//! use gemfit::synth::{self, NoiseSpec};
//!
//! let mut rng = synth::rng_from_seed(7);
//! let r = synth::random_rotation(&mut rng);
//! let t = synth::random_translation(&mut rng);
//! let (a, omega) = synth::noisy_instance(&r, t, &NoiseSpec::new(0.01, 3).unwrap());
//!
//! let (gem, report) = fit(&FitProblem::new(a), &SolverConfig::default());
//! assert!(report.converged);
//! // The true matrix is feasible, so the fit can never do worse than the noise.
//! assert!(report.residual <= omega);
//! assert!(gem.rotation().angle_to(&r) < 0.1);
//! ```

pub mod baseline;
pub mod bench;
pub mod central;
pub mod error;
pub mod gem;
pub mod io;
pub mod linalg;
pub mod pose;
pub mod solver;
pub mod synth;

pub use error::{Error, Result};
