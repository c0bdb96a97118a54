use std::f64::consts::TAU;

use proptest::prelude::*;

use puc_core::circuit::{
    bvd_antiresonance, bvd_impedance, find_antiresonance_numeric, BvdParams, ImpedanceSpectrum, LoadNetwork,
};
use puc_core::lockin::{demodulate, design_lowpass, gate_average};
use puc_core::numeric::linear_grid;
use puc_core::sweep::{find_valley, sensor_capacitance, smooth_spectrum, SensorModel, SweepMeta, SweepSpectrum};
use puc_core::waveform::{make_burst, EchoTrace, LinkChannel, LinkScenario, DEFAULT_SAMPLE_RATE};

fn spectrum(amps: Vec<f64>) -> SweepSpectrum {
    let freqs = (0..amps.len()).map(|i| 2.2e6 + 500.0 * i as f64).collect();
    SweepSpectrum::new(freqs, amps, SweepMeta::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn high_q_impedance_peak_matches_closed_form(
        c0 in 0.5e-9..2.0e-9f64,
        ratio in 0.1..0.5f64,
        fs in 1.5e6..2.5e6f64,
        c_load in 0.0..120e-12f64,
    ) {
        let c1 = ratio * c0;
        let l1 = 1.0 / ((TAU * fs).powi(2) * c1);
        let p = BvdParams::new(c0, 1.0, l1, c1).unwrap().with_quality_factor(5e3);
        let load = LoadNetwork::capacitive(c_load);
        let fa = bvd_antiresonance(&p, &load);
        let grid = linear_grid(fa - 10e3, fa + 10e3, 100.0);
        let spec = ImpedanceSpectrum::evaluate(&grid, |f| bvd_impedance(&p, &load, f)).unwrap();
        prop_assert!((find_antiresonance_numeric(&spec).unwrap() - fa).abs() < 50.0);
    }

    #[test]
    fn smoothing_preserves_constants(level in 0.0..100.0f64, sigma in 0.0..20.0f64, n in 5usize..200) {
        let s = smooth_spectrum(&spectrum(vec![level; n]), sigma).unwrap();
        for a in s.amplitudes {
            prop_assert!((a - level).abs() <= 1e-12 * level.max(1.0));
        }
    }

    #[test]
    fn smoothing_keeps_amplitudes_non_negative(amps in prop::collection::vec(0.0..10.0f64, 5..100), sigma in 0.0..8.0f64) {
        let s = smooth_spectrum(&spectrum(amps), sigma).unwrap();
        prop_assert!(s.amplitudes.iter().all(|&a| a >= 0.0));
    }

    #[test]
    fn valley_of_a_sampled_parabola_is_its_vertex(offset in -0.49..0.49f64, centre in 3usize..20, curvature in 0.1..10.0f64) {
        let f0 = 2.2e6 + 500.0 * (centre as f64 + offset);
        let amps: Vec<f64> = (0..25)
            .map(|i| 1.0 + curvature * ((2.2e6 + 500.0 * i as f64 - f0) / 500.0).powi(2))
            .collect();
        let v = find_valley(&spectrum(amps)).unwrap();
        prop_assert!((v.frequency - f0).abs() < 1e-6);
        prop_assert!(v.depth_db >= 0.0);
    }

    #[test]
    fn valley_is_invariant_to_global_gain_powers_of_two(k in -20i32..20) {
        let amps: Vec<f64> = (0..40).map(|i| 1.0 + ((i as f64 - 17.3) / 6.0).powi(2) + 0.01 * (i as f64).sin()).collect();
        let g = 2f64.powi(k);
        let a = find_valley(&smooth_spectrum(&spectrum(amps.clone()), 2.0).unwrap()).unwrap();
        let b = find_valley(&smooth_spectrum(&spectrum(amps.iter().map(|x| g * x).collect()), 2.0).unwrap()).unwrap();
        prop_assert_eq!(a.frequency.to_bits(), b.frequency.to_bits());
    }

    #[test]
    fn sensor_is_monotone(a in 0.0..60.0f64, b in 0.0..60.0f64, knee in 1.0..40.0f64, sat in 0.0..1.0f64) {
        let m = SensorModel { knee_pressure: knee, saturation_factor: sat, ..SensorModel::default() };
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(sensor_capacitance(lo, &m).unwrap() <= sensor_capacitance(hi, &m).unwrap());
    }

    #[test]
    fn lowpass_designs_are_stable_with_unit_dc_gain(cut in 1e3..20e6f64, half_order in 1usize..5) {
        let h = design_lowpass(2 * half_order, cut, 50e6).unwrap();
        prop_assert!(h.is_stable());
        prop_assert!((h.response(0.0).norm() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn demodulation_is_amplitude_linear(alpha in 0.01..100.0f64, phase in 0.0..TAU) {
        let fs = 50e6;
        let h = design_lowpass(4, 200e3, fs).unwrap();
        let x: Vec<f64> = (0..4000).map(|i| (TAU * 2.3e6 * i as f64 / fs + phase).sin()).collect();
        let t = EchoTrace::new(fs, 0.0, x).unwrap();
        let p1 = gate_average(&demodulate(&t, 2.3e6, &h).unwrap(), 40e-6, 79e-6).unwrap();
        let pa = gate_average(&demodulate(&t.scaled(alpha), 2.3e6, &h).unwrap(), 40e-6, 79e-6).unwrap();
        prop_assert!((pa - alpha * p1).abs() <= 1e-12 * alpha * p1);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn channel_is_linear(alpha in 0.1..10.0f64, f in 2.1e6..2.4e6f64, c_load in 0.0..120e-12f64) {
        let s = LinkScenario::default_antenna(c_load);
        let x = make_burst(f, 12e-6, 1.0, DEFAULT_SAMPLE_RATE, 0.0).unwrap();
        let ch = LinkChannel::new(&s, DEFAULT_SAMPLE_RATE, x.duration()).unwrap();
        let y = ch.propagate(&x).unwrap();
        let ya = ch.propagate(&x.scaled(alpha)).unwrap();
        let tol = 1e-12 * alpha * y.peak();
        for (a, b) in y.samples.iter().zip(&ya.samples) {
            prop_assert!((alpha * a - b).abs() <= tol);
        }
    }
}

#[test]
fn filter_output_stays_bounded_over_ten_million_samples() {
    let h = design_lowpass(4, 200e3, 50e6).unwrap();
    // alternating full-scale steps excite every section hard
    let x: Vec<f64> = (0..10_000_000).map(|i| if (i / 997) % 2 == 0 { 1.0 } else { -1.0 }).collect();
    let y = h.apply(&x);
    let peak = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    assert!(peak.is_finite() && peak < 2.0, "{peak}");
    let impulse: Vec<f64> = (0..200_000).map(|i| if i == 0 { 1.0 } else { 0.0 }).collect();
    let energy: f64 = h.apply(&impulse).iter().map(|v| v * v).sum();
    assert!(energy.is_finite() && energy > 0.0);
}
