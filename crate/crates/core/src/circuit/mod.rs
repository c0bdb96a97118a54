//! Frequency-domain electrical models of the loaded ultrasonic antenna.

mod bvd;
mod fit;
mod load;
mod spectrum;
mod stack;

pub use bvd::{bvd_antiresonance, bvd_antiresonance_slope, bvd_impedance, BvdParams};
pub use fit::{
    anchor_metrics, fit_bvd_from_anchors, BvdAnchors, BvdFit, SaturationAnchors, DEFAULT_QUALITY_FACTOR,
    SHIFT_TOL, SLOPE0_TOL, SLOPE_END_TOL,
};
pub use load::LoadNetwork;
pub use spectrum::{find_antiresonance_numeric, ImpedanceSpectrum};
pub use stack::{
    front_face_impedance, leach_input_impedance, Abcd, AcousticLayer, HalfSpace, PiezoLayer, PiezoStack,
    MIN_LINE_LOSS, VACUUM_PERMITTIVITY,
};
