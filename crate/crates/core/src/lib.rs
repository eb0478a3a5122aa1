//! Simulation of Hong-Ou-Mandel interference and higher-order quantum
//! coherence for three-dimensional structured photon pairs.
//!
//! The crate is organised bottom-up:
//!
//! * [`pulses`]: Bessel–Gauss spectral envelopes, Bessel functions and
//!   real-space wave packets.
//! * [`masks`]: transverse phase masks (helical, sector, image) and PGM I/O.
//! * [`fockstate`]: few-photon state algebra and the contraction engine
//!   that evaluates inner products and N-point intensity correlators.
//! * [`optics`]: beam splitter, delay line, Dove prism, SLM masks.
//! * [`symmetry`]: exchange-reflection classification and the
//!   hyperentangled Bell catalog.
//! * [`interference`]: coincidence probabilities and delay scans.
//! * [`coherence`]: g², G³, G⁴ and g⁴ closed forms and coherence maps.
//!
//! Every closed form exposed by [`interference`] and [`coherence`] can be
//! cross-checked against [`fockstate::correlate`], which knows nothing
//! about the formulas and only enumerates contractions.

// `!(x > 0.0)` guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod coherence;
pub mod config;
pub mod error;
pub mod exec;
pub mod fockstate;
pub mod interference;
pub mod masks;
pub mod optics;
pub mod pulses;
pub mod quadrature;
pub mod symmetry;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
