use std::f64::consts::TAU;

use num_complex::Complex64;

use puc_core::circuit::bvd_antiresonance;
use puc_core::lockin::{demod_gate, demodulate, design_lowpass, detect_tof, gate_average, GATE_GUARD};
use puc_core::presets;
use puc_core::sweep::{
    estimate_stream, find_valley, fit_calibration, run_sweep, sensor_capacitance, smooth_spectrum, CalibrationKind,
    PressureTrace, SensorModel, StreamConfig, SweepConfig,
};
use puc_core::waveform::{make_burst, make_chirp, synthesize_echo, LinkScenario, DEFAULT_SAMPLE_RATE};
use puc_core::Error;

const FS: f64 = DEFAULT_SAMPLE_RATE;

fn dft_mag(x: &[f64], f: f64, fs: f64) -> f64 {
    x.iter()
        .enumerate()
        .map(|(n, &v)| Complex64::from_polar(v, -TAU * f * n as f64 / fs))
        .sum::<Complex64>()
        .norm()
}

#[test]
fn chirp_midpoint_frequency_from_a_short_window() {
    let (f0, f1, dur) = (2.0e6, 2.5e6, 200e-6);
    let c = make_chirp(f0, f1, dur, 1.0, FS, 0.0).unwrap();
    // 10 µs window centred on the midpoint; bin width 100 kHz
    let mid = c.len() / 2;
    let win = &c.samples[mid - 250..mid + 250];
    let freqs: Vec<f64> = (0..=100).map(|k| 2.0e6 + 5e3 * k as f64).collect();
    let peak = freqs
        .iter()
        .cloned()
        .max_by(|a, b| dft_mag(win, *a, FS).total_cmp(&dft_mag(win, *b, FS)))
        .unwrap();
    assert!((peak - (f0 + f1) / 2.0).abs() < 1.0 / 10e-6, "{peak}");
}

#[test]
fn long_chirp_spectrum_is_flat_in_band() {
    let (f0, f1, dur) = (2.2e6, 2.35e6, 1e-3);
    assert!((f1 - f0) * dur >= 50.0);
    let c = make_chirp(f0, f1, dur, 1.0, FS, 0.0).unwrap();
    let span = f1 - f0;
    let mags: Vec<f64> = (0..=40)
        .map(|k| f0 + 0.1 * span + 0.8 * span * k as f64 / 40.0)
        .map(|f| dft_mag(&c.samples, f, FS))
        .collect();
    let mean = mags.iter().sum::<f64>() / mags.len() as f64;
    for m in mags {
        assert!((20.0 * (m / mean).log10()).abs() <= 3.0);
    }
}

#[test]
fn burst_at_the_valley_is_suppressed_against_a_detuned_one() {
    let s = LinkScenario::default_antenna(0.0);
    let fit = presets::fitted_bvd();
    let fa = bvd_antiresonance(&fit.params, &fit.load);
    let lpf = design_lowpass(4, 200e3, FS).unwrap();
    let gated = |f: f64| {
        let x = make_burst(f, 12e-6, 1.0, FS, 0.0).unwrap();
        let echo = synthesize_echo(&x, &s).unwrap();
        let (a, b) = demod_gate(echo.tof, 12e-6, &lpf, GATE_GUARD);
        gate_average(&demodulate(&echo.trace, f, &lpf).unwrap(), a, b).unwrap()
    };
    assert!(gated(fa) / gated(fa + 20e3) < 1.0);
}

#[test]
fn gate_shift_inside_the_plateau_barely_matters() {
    let s = LinkScenario::default_antenna(0.0).with_flat_reflector(0.9);
    let lpf = design_lowpass(4, 200e3, FS).unwrap();
    let f = 2.2e6;
    let x = make_burst(f, 12e-6, 1.0, FS, 0.0).unwrap();
    let echo = synthesize_echo(&x, &s).unwrap();
    let env = demodulate(&echo.trace, f, &lpf).unwrap();
    let (a, b) = demod_gate(echo.tof, 12e-6, &lpf, GATE_GUARD);
    let base = gate_average(&env, a, b).unwrap();
    for shift in [-0.1, 0.1] {
        let d = shift * (b - a);
        let moved = gate_average(&env, a + d, b + d).unwrap();
        assert!((moved / base - 1.0).abs() < 0.02, "{shift}: {moved} vs {base}");
    }
}

#[test]
fn silent_gate_before_the_echo_averages_to_zero() {
    let s = LinkScenario::default_antenna(0.0).with_flat_reflector(0.9);
    let lpf = design_lowpass(4, 200e3, FS).unwrap();
    let x = make_burst(2.25e6, 12e-6, 1.0, FS, 0.0).unwrap();
    let echo = synthesize_echo(&x, &s).unwrap();
    let env = demodulate(&echo.trace, 2.25e6, &lpf).unwrap();
    assert!(gate_average(&env, 5e-6, 20e-6).unwrap() < 1e-9);
}

#[test]
fn flat_reflector_tof_within_one_sample() {
    let x = make_burst(2.25e6, 12e-6, 1.0, FS, 0.0).unwrap();
    let s = LinkScenario::default_antenna(0.0).with_flat_reflector(-0.5);
    let echo = synthesize_echo(&x, &s).unwrap();
    assert!((detect_tof(&echo.trace, &x).unwrap() - 2.0 * 0.05 / 1480.0).abs() <= 1.0 / FS);
}

#[test]
fn noiseless_valley_decreases_with_load() {
    let cfg = SweepConfig::default();
    let valleys: Vec<f64> = [0.0, 30.0, 60.0, 90.0, 120.0]
        .iter()
        .map(|pf| {
            let spec = run_sweep(&LinkScenario::default_antenna(pf * 1e-12), &cfg).unwrap();
            find_valley(&smooth_spectrum(&spec, 2.0).unwrap()).unwrap().frequency
        })
        .collect();
    assert!(valleys.windows(2).all(|w| w[1] < w[0]), "{valleys:?}");
}

#[test]
fn sweeps_are_deterministic_per_seed() {
    let cfg = SweepConfig {
        f_stop: 2.25e6,
        ..SweepConfig::default()
    };
    let s = LinkScenario::default_antenna(0.0).with_noise(Some(20.0), 99);
    let a = run_sweep(&s, &cfg).unwrap();
    let b = run_sweep(&s, &cfg).unwrap();
    assert_eq!(a, b);
    let c = run_sweep(&s.clone().with_noise(Some(20.0), 100), &cfg).unwrap();
    assert_ne!(a.amplitudes, c.amplitudes);
}

#[test]
fn out_of_band_sweep_grid_is_flagged() {
    let cfg = SweepConfig {
        f_start: 4.5e6,
        f_stop: 4.6e6,
        step: 5e3,
        ..SweepConfig::default()
    };
    let mut s = LinkScenario::default_antenna(0.0).with_flat_reflector(0.9);
    s.band = Some(puc_core::waveform::InterrogatorBand {
        center: 2.25e6,
        fractional_bandwidth: 0.6,
    });
    let spec = run_sweep(&s, &cfg).unwrap();
    assert!(spec.meta.out_of_band);
}

#[test]
fn chirp_band_off_resonance_has_no_interior_valley() {
    let cfg = SweepConfig {
        step: 1e3,
        ..SweepConfig::default()
    };
    let s = LinkScenario::default_antenna(0.0);
    let spec = puc_core::sweep::chirp_sweep(&s, &cfg, (1.90e6, 2.00e6), 1e-3).unwrap();
    assert_eq!(spec.meta.pulse_count, 1);
    assert!(matches!(
        find_valley(&smooth_spectrum(&spec, 2.0).unwrap()),
        Err(Error::Boundary(_))
    ));
}

fn capacitance_calibration() -> puc_core::sweep::CalibrationCurve {
    let cfg = SweepConfig::default();
    let pts: Vec<(f64, f64)> = [0.0, 30.0, 60.0, 90.0, 120.0]
        .iter()
        .map(|&pf| {
            let spec = run_sweep(&LinkScenario::default_antenna(pf * 1e-12), &cfg).unwrap();
            (find_valley(&smooth_spectrum(&spec, 2.0).unwrap()).unwrap().frequency, pf)
        })
        .collect();
    fit_calibration(&pts, 2, CalibrationKind::CapacitancePf).unwrap()
}

#[test]
fn calibration_round_trip_and_constant_stream() {
    let cal = capacitance_calibration();
    let cfg = SweepConfig::default();
    for pf in [15.0, 45.0, 75.0, 105.0] {
        let spec = run_sweep(&LinkScenario::default_antenna(pf * 1e-12), &cfg).unwrap();
        let f = find_valley(&smooth_spectrum(&spec, 2.0).unwrap()).unwrap().frequency;
        assert!((cal.evaluate(f).unwrap() - pf).abs() <= 2.0, "{pf}");
    }

    let sensor = SensorModel::default();
    let trace = PressureTrace::new(vec![0.0, 9.0], vec![8.0, 8.0]).unwrap();
    let s = LinkScenario::default_antenna(0.0).with_noise(Some(20.0), 3);
    let out = estimate_stream(&s, &cfg, &trace, &cal, &sensor, &StreamConfig::default()).unwrap();
    assert_eq!(out.len(), 10);
    assert!(out.iter().all(|r| r.valid));
    let truth = sensor_capacitance(8.0, &sensor).unwrap() * 1e12;
    for r in &out {
        assert!((r.c_load_pf.unwrap() - truth).abs() < 4.0, "{r:?}");
    }
    let fs: Vec<f64> = out.iter().map(|r| r.f_valley_hz.unwrap()).collect();
    assert!(puc_core::numeric::std_dev(&fs) <= 2e3);
}
