//! Browser bindings for the link simulator demo page.

use wasm_bindgen::prelude::*;

use puc_core::acoustic::reflection_coefficient;
use puc_core::circuit::{bvd_antiresonance, bvd_impedance};
use puc_core::presets;
use puc_core::sweep::{compensate_distance, find_valley, run_sweep, smooth_spectrum, SweepConfig};
use puc_core::waveform::LinkScenario;

fn js_err(e: puc_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

fn grid(f_start: f64, f_stop: f64, n: usize) -> Result<Vec<f64>, JsError> {
    if !(n >= 2 && f_start > 0.0 && f_stop > f_start) {
        return Err(JsError::new("need 0 < f_start < f_stop and at least two points"));
    }
    let step = (f_stop - f_start) / (n - 1) as f64;
    Ok((0..n).map(|i| f_start + step * i as f64).collect())
}

/// |Z| in ohms of the fitted circuit with `c_load_pf` attached.
#[wasm_bindgen]
pub fn impedance_curve(c_load_pf: f64, f_start: f64, f_stop: f64, n: usize) -> Result<Vec<f64>, JsError> {
    let load = presets::fitted_load(c_load_pf * 1e-12);
    let params = presets::fitted_bvd().params;
    grid(f_start, f_stop, n)?
        .into_iter()
        .map(|f| bvd_impedance(&params, &load, f).map(|z| z.norm()).map_err(js_err))
        .collect()
}

/// Closed-form anti-resonance in hertz for `c_load_pf`.
#[wasm_bindgen]
pub fn antiresonance_hz(c_load_pf: f64) -> f64 {
    bvd_antiresonance(&presets::fitted_bvd().params, &presets::fitted_load(c_load_pf * 1e-12))
}

/// |Γ| of the antenna face seen from water.
#[wasm_bindgen]
pub fn reflection_curve(c_load_pf: f64, f_start: f64, f_stop: f64, n: usize) -> Result<Vec<f64>, JsError> {
    let s = LinkScenario::default_antenna(c_load_pf * 1e-12);
    grid(f_start, f_stop, n)?
        .into_iter()
        .map(|f| reflection_coefficient(&s.stack, &s.load, f).map(|g| g.norm()).map_err(js_err))
        .collect()
}

#[wasm_bindgen]
pub struct SweepResult {
    freqs: Vec<f64>,
    amplitudes: Vec<f64>,
    valley_hz: f64,
}

#[wasm_bindgen]
impl SweepResult {
    #[wasm_bindgen(getter)]
    pub fn freqs(&self) -> Vec<f64> {
        self.freqs.clone()
    }

    /// Smoothed, distance-compensated amplitude in volts.
    #[wasm_bindgen(getter)]
    pub fn amplitudes(&self) -> Vec<f64> {
        self.amplitudes.clone()
    }

    /// NaN when the spectrum has no interior minimum.
    #[wasm_bindgen(getter)]
    pub fn valley_hz(&self) -> f64 {
        self.valley_hz
    }
}

/// Simulated pulse-echo sweep. A non-finite `snr_db` means noiseless.
#[wasm_bindgen]
pub fn sweep_spectrum(
    c_load_pf: f64,
    distance_cm: f64,
    snr_db: f64,
    seed: u32,
    step_hz: f64,
) -> Result<SweepResult, JsError> {
    let snr = snr_db.is_finite().then_some(snr_db);
    let s = LinkScenario::default_antenna(c_load_pf * 1e-12)
        .with_distance(distance_cm * 1e-2)
        .with_noise(snr, seed as u64);
    let cfg = SweepConfig {
        step: step_hz,
        ..SweepConfig::default()
    };
    let raw = run_sweep(&s, &cfg).map_err(js_err)?;
    let spec = smooth_spectrum(&compensate_distance(&raw, &s.medium).map_err(js_err)?, 2.0).map_err(js_err)?;
    let valley_hz = find_valley(&spec).map_or(f64::NAN, |v| v.frequency);
    let vpu = spec.meta.volts_per_unit;
    Ok(SweepResult {
        amplitudes: spec.amplitudes.iter().map(|a| a * vpu).collect(),
        freqs: spec.freqs,
        valley_hz,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn curves_have_the_requested_length() {
        assert_eq!(impedance_curve(0.0, 2.2e6, 2.4e6, 50).unwrap().len(), 50);
        assert_eq!(reflection_curve(30.0, 2.2e6, 2.4e6, 7).unwrap().len(), 7);
        assert!(antiresonance_hz(60.0) < antiresonance_hz(0.0));
    }

    #[test]
    fn noiseless_sweep_finds_the_valley() {
        let r = sweep_spectrum(0.0, 5.0, f64::NAN, 1, 1000.0).unwrap();
        assert_eq!(r.freqs().len(), r.amplitudes().len());
        assert!((r.valley_hz() - antiresonance_hz(0.0)).abs() < 5e3);
    }
}
