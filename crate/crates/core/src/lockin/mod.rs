//! Software lock-in amplifier and echo timing.

mod demod;
mod filter;

pub use demod::{demod_gate, demodulate, detect_tof, gate_average, EnvelopeTrace, GATE_GUARD, TOF_THRESHOLD};
pub use filter::{design_lowpass, Biquad, FilterSpec, DEFAULT_CUTOFF, DEFAULT_ORDER};
