//! Almost convergence of bounded sequences and sampled bounded functions.
//!
//! Three independent routes decide whether a signal is almost convergent:
//! uniform sliding Cesàro means ([`cesaro`]), spectral-gap approximation
//! ([`spectral`]) and Abel/Laplace boundary means ([`tauberian`]). The
//! [`cyclic`] module models spectra, ideals and invariant means exactly on
//! the finite groups `Z_N`.

pub mod cesaro;
pub mod cyclic;
pub mod error;
pub mod generator;
pub mod io;
mod linalg;
pub mod signal;
pub mod spectral;
pub mod tauberian;

pub use cesaro::{
    ac_verdict, admissible_shifts, cesaro_sweep, convolution_invariance_residual, default_schedule, shift_extremes,
    window_average,
    AcStatus, AcVerdict, CesaroSweep, ShiftExtremes, ShiftGrid, Witness,
};
pub use error::{Error, Result};
pub use generator::{render_continuous, render_discrete, GeneratorSpec};
pub use num_complex::Complex64;
pub use signal::{AnySignal, ContinuousSignal, DiscreteSignal, Extension, Lattice, Sampled, Sidedness, WindowSchedule};
pub use spectral::{convolve, dft_spectrum, highpass_project, spectral_ac_verdict, spectrum_support_check, Kernel, SpectrumEstimate, Taper};
