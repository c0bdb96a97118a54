//! Default antenna, fitted to the measured anchors.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::circuit::{
    bvd_antiresonance, fit_bvd_from_anchors, AcousticLayer, BvdAnchors, BvdFit, BvdParams, HalfSpace,
    LoadNetwork, PiezoLayer, PiezoStack,
};

pub const PLATE_THICKNESS: f64 = 1e-3;
/// 5 × 7 mm² footprint.
pub const ANTENNA_AREA: f64 = 35e-6;
pub const PIEZO_DENSITY: f64 = 7600.0;
/// Plate attenuation at 2.3 MHz (Np/m); sets the mechanical Q near 60.
pub const PIEZO_ATTENUATION: f64 = 25.0;

/// BVD circuit plus series parasitic fitted to the measured anchors.
pub fn fitted_bvd() -> BvdFit {
    static FIT: OnceLock<BvdFit> = OnceLock::new();
    *FIT.get_or_init(|| fit_bvd_from_anchors(&BvdAnchors::measured()).expect("measured anchors are feasible"))
}

/// Load network carrying the fitted series parasitic and `c_load`.
pub fn fitted_load(c_load: f64) -> LoadNetwork {
    fitted_bvd().load.with_c_load(c_load)
}

/// Air-backed, water-loaded plate whose open-circuit anti-resonance and
/// small-load sensitivity coincide with `params`.
///
/// The sound speed puts the half-wave frequency on the BVD anti-resonance,
/// the clamped permittivity reproduces C0, and k_t² = π²(f_a² − f_s²)/(8 f_a²)
/// equates the plate's and the circuit's d f_a / d C_L at zero load.
pub fn stack_matched_to_bvd(params: &BvdParams, thickness: f64, area: f64) -> PiezoStack {
    let f_s = params.series_resonance();
    let f_a = bvd_antiresonance(params, &LoadNetwork::open());
    let kt2 = PI * PI * (f_a * f_a - f_s * f_s) / (8.0 * f_a * f_a);
    PiezoStack {
        piezo: PiezoLayer {
            layer: AcousticLayer {
                thickness,
                density: PIEZO_DENSITY,
                sound_speed: 2.0 * thickness * f_a,
                attenuation: PIEZO_ATTENUATION,
                attenuation_ref_freq: 2.3e6,
                attenuation_exponent: 1.0,
                area,
            },
            coupling_kt: kt2.sqrt(),
            permittivity_clamped: params.c0 * thickness / area,
        },
        backing: HalfSpace::air(),
        front_layers: Vec::new(),
        front_medium: HalfSpace::water(),
    }
}

pub fn default_stack() -> PiezoStack {
    stack_matched_to_bvd(&fitted_bvd().params, PLATE_THICKNESS, ANTENNA_AREA)
}
