//! Quantum-trajectory simulation of a ground-state Zeeman coherence under
//! quasi-resonant elastic Rayleigh scattering, with the analysis pipeline
//! that turns simulated coherence records into beat spectra.
//!
//! The crate is organized around four layers:
//!
//! * [`model`] — closed-form rates, shifts and scattering amplitudes of the
//!   four-level atom; the analytic reference every stochastic result is
//!   checked against.
//! * [`trajectory`] — single stochastic trajectories: deterministic
//!   between-jump evolution plus Rayleigh-scattering quantum jumps.
//! * [`ensemble`] — trajectory averaging, phase-diffusion statistics and a
//!   brute-force Poisson-sum evaluation of the ensemble coherence.
//! * [`spectral`] — beat synthesis, power spectra, peak extraction, and
//!   damped-sinusoid / saturation-curve least-squares fits.
//!
//! All frequencies are in units of the excited-state decay rate `γ`, all
//! times in units of `1/γ`. Everything stochastic is reproducible: given
//! the same parameters and master seed, serial and parallel runs produce
//! identical results.

pub mod ensemble;
pub mod model;
pub mod rng;
pub mod spectral;
pub mod trajectory;

pub use ensemble::{EnsembleSeries, PhaseDiffusionStats};
pub use model::{AtomParams, Branch, DerivedRates, ScatteringRates};
pub use spectral::{BeatSignal, PowerSpectrum, SpectrumEstimate};
pub use trajectory::{GroundAmplitudes, SampleGrid, TrajectoryRecord};
