//! Design and simulation toolkit for whispering-gallery sapphire masers.
//!
//! The crate models the signal path of a cryogenic Fe³⁺:sapphire maser
//! oscillator from first principles that fit on a desk:
//!
//! * [`ensemble`] — spin-ensemble broadening, saturation and the relaxation
//!   time catalog drawn from the ESR literature.
//! * [`cavity`] — whispering-gallery mode field amplitudes and Rabi rates.
//! * [`maser`] — three-level rate model: populations, threshold, output
//!   power and concentration inference.
//! * [`pumploop`] — pump-loop gain/loss budget, DC power budget and
//!   bandpass mode-selection filters.
//! * [`servo`] — discrete-time Pound lock simulation.
//! * [`stability`] — frequency-temperature turnover, cryocooler disturbance
//!   synthesis and Allan deviation estimation.
//! * [`optics`] — ultraviolet delivery-power arithmetic.
//! * [`scenario`] — fixture and scenario files with explicit unit suffixes.
//!
//! All operations are pure functions of immutable inputs unless documented
//! otherwise; simulations are deterministic given their configuration.

pub mod cavity;
pub mod ensemble;
pub mod error;
pub mod maser;
pub mod optics;
pub mod pumploop;
pub mod scenario;
pub mod servo;
pub mod stability;
pub mod units;

pub use error::{Error, Result};
