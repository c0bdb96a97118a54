use std::f64::consts::TAU;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::FilterSpec;
use crate::error::{domain, Error, Result};
use crate::waveform::EchoTrace;

/// Default fraction of the burst trimmed from each end of the gate.
pub const GATE_GUARD: f64 = 0.2;

/// Detection threshold in multiples of the correlation noise spread.
pub const TOF_THRESHOLD: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeTrace {
    pub sample_rate: f64,
    pub t0: f64,
    pub magnitude: Vec<f64>,
}

impl EnvelopeTrace {
    pub fn time(&self, i: usize) -> f64 {
        self.t0 + i as f64 / self.sample_rate
    }

    pub fn end_time(&self) -> f64 {
        self.time(self.magnitude.len().saturating_sub(1))
    }
}

/// Dual-phase lock-in: `√(LPF(x·cos)² + LPF(x·sin)²)` with the oscillator
/// running on the trace's absolute time axis.
pub fn demodulate(trace: &EchoTrace, f_osc: f64, filter: &FilterSpec) -> Result<EnvelopeTrace> {
    if !(f_osc > 0.0 && f_osc < trace.sample_rate / 2.0) {
        return domain(format!("oscillator frequency {f_osc:.3e} Hz outside (0, Nyquist)"));
    }
    if (filter.sample_rate - trace.sample_rate).abs() > 1e-9 * trace.sample_rate {
        return domain(format!(
            "filter designed for {:.3e} S/s but trace is sampled at {:.3e} S/s",
            filter.sample_rate, trace.sample_rate
        ));
    }
    let (i_mix, q_mix): (Vec<f64>, Vec<f64>) = trace
        .samples
        .iter()
        .enumerate()
        .map(|(n, &x)| {
            let (s, c) = (TAU * f_osc * trace.time(n)).sin_cos();
            (x * c, x * s)
        })
        .unzip();
    let i = filter.apply(&i_mix);
    let q = filter.apply(&q_mix);
    Ok(EnvelopeTrace {
        sample_rate: trace.sample_rate,
        t0: trace.t0,
        magnitude: i.iter().zip(&q).map(|(a, b)| a.hypot(*b)).collect(),
    })
}

/// Mean envelope over samples whose time lies in `[t_start, t_end]`.
pub fn gate_average(envelope: &EnvelopeTrace, t_start: f64, t_end: f64) -> Result<f64> {
    if !(t_end > t_start) {
        return domain("gate end must be after gate start");
    }
    if t_start < envelope.t0 || t_end > envelope.end_time() {
        return domain(format!(
            "gate [{t_start:.4e}, {t_end:.4e}] s is outside the trace span [{:.4e}, {:.4e}] s",
            envelope.t0,
            envelope.end_time()
        ));
    }
    let fs = envelope.sample_rate;
    let first = ((t_start - envelope.t0) * fs - 1e-9).ceil().max(0.0) as usize;
    let last = ((t_end - envelope.t0) * fs + 1e-9).floor() as usize;
    if last < first {
        return domain("gate contains no samples");
    }
    let window = &envelope.magnitude[first..=last.min(envelope.magnitude.len() - 1)];
    Ok(window.iter().sum::<f64>() / window.len() as f64)
}

/// Plateau window of an echo that starts at `tof`, trimmed by `guard` of
/// the burst length at both ends and shifted by the filter's group delay.
pub fn demod_gate(tof: f64, burst_duration: f64, filter: &FilterSpec, guard: f64) -> (f64, f64) {
    let start = tof + filter.dc_group_delay();
    (start + guard * burst_duration, start + (1.0 - guard) * burst_duration)
}

/// Echo delay from the envelope peak of the analytic cross-correlation
/// with the excitation, refined to a fraction of a sample.
pub fn detect_tof(trace: &EchoTrace, excitation: &EchoTrace) -> Result<f64> {
    if (trace.sample_rate - excitation.sample_rate).abs() > 1e-9 * trace.sample_rate {
        return domain("trace and excitation sample rates differ");
    }
    let n = (trace.len() + excitation.len()).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let spectrum = |x: &[f64]| -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        for (d, &s) in v.iter_mut().zip(x) {
            d.re = s;
        }
        fwd.process(&mut v);
        v
    };
    let x = spectrum(&excitation.samples);
    let mut c = spectrum(&trace.samples);
    // keep positive frequencies only so the inverse is the analytic signal
    for (k, (u, v)) in c.iter_mut().zip(&x).enumerate() {
        let w = match k {
            0 => 1.0,
            k if k < n / 2 => 2.0,
            k if k == n / 2 => 1.0,
            _ => 0.0,
        };
        *u = *u * v.conj() * w;
    }
    inv.process(&mut c);

    let lags = trace.len();
    let env: Vec<f64> = c[..lags].iter().map(|c| c.norm()).collect();
    let real: Vec<f64> = c[..lags].iter().map(|c| c.re.abs()).collect();
    let (imax, &peak) = env
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty trace");
    let threshold = TOF_THRESHOLD * 1.4826 * median(real);
    if !(peak > 0.0 && peak > threshold) {
        return Err(Error::NoEcho { peak, threshold });
    }
    let offset = if imax > 0 && imax + 1 < lags {
        crate::numeric::parabolic_offset(env[imax - 1], env[imax], env[imax + 1])
    } else {
        0.0
    };
    Ok(trace.t0 - excitation.t0 + (imax as f64 + offset) / trace.sample_rate)
}

fn median(mut v: Vec<f64>) -> f64 {
    let mid = v.len() / 2;
    let (_, m, _) = v.select_nth_unstable_by(mid, f64::total_cmp);
    *m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lockin::design_lowpass;
    use crate::waveform::{add_noise, make_burst, synthesize_echo, LinkScenario};

    const FS: f64 = 50e6;

    fn tone(f: f64, amp: f64, phase: f64, n: usize) -> EchoTrace {
        let s = (0..n).map(|i| amp * (TAU * f * i as f64 / FS + phase).sin()).collect();
        EchoTrace::new(FS, 0.0, s).unwrap()
    }

    fn plateau(env: &EnvelopeTrace) -> f64 {
        let n = env.magnitude.len();
        gate_average(env, env.time(n / 2), env.time(n - 1)).unwrap()
    }

    #[test]
    fn pure_tone_plateau_is_half_amplitude() {
        let h = design_lowpass(4, 200e3, FS).unwrap();
        let env = demodulate(&tone(2.25e6, 1.0, 0.0, 5000), 2.25e6, &h).unwrap();
        assert!((plateau(&env) - 0.5).abs() < 0.005, "{}", plateau(&env));
    }

    #[test]
    fn far_off_tone_is_rejected() {
        let h = design_lowpass(4, 200e3, FS).unwrap();
        let env = demodulate(&tone(3.25e6, 1.0, 0.0, 5000), 2.25e6, &h).unwrap();
        assert!(plateau(&env) < 0.05);
    }

    #[test]
    fn phase_does_not_change_the_plateau() {
        let h = design_lowpass(4, 200e3, FS).unwrap();
        let base = plateau(&demodulate(&tone(2.25e6, 1.0, 0.0, 5000), 2.25e6, &h).unwrap());
        for phi in [0.3, 1.1, 2.0, 4.0] {
            let p = plateau(&demodulate(&tone(2.25e6, 1.0, phi, 5000), 2.25e6, &h).unwrap());
            assert!((p - base).abs() < 1e-6 * base, "{phi}: {p} vs {base}");
        }
    }

    #[test]
    fn rate_mismatch_is_an_error() {
        let h = design_lowpass(4, 200e3, 100e6).unwrap();
        assert!(demodulate(&tone(2.25e6, 1.0, 0.0, 100), 2.25e6, &h).is_err());
    }

    #[test]
    fn gate_average_cases() {
        let env = EnvelopeTrace {
            sample_rate: 1.0,
            t0: 0.0,
            magnitude: vec![0.7; 10],
        };
        assert!((gate_average(&env, 2.0, 6.0).unwrap() - 0.7).abs() < 1e-15);
        let n = 101;
        let ramp = EnvelopeTrace {
            sample_rate: 1.0,
            t0: 0.0,
            magnitude: (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
        };
        assert!((gate_average(&ramp, 0.0, 100.0).unwrap() - 0.5).abs() <= 1.0 / n as f64);
        assert!(gate_average(&env, 3.0, 3.0).is_err());
        assert!(gate_average(&env, 3.2, 3.8).is_err());
        assert!(gate_average(&env, -1.0, 3.0).is_err());
    }

    #[test]
    fn tof_of_noiseless_water_echo() {
        let x = make_burst(2.25e6, 12e-6, 1.0, FS, 0.0).unwrap();
        let s = LinkScenario::default_antenna(0.0).with_flat_reflector(0.9);
        let echo = synthesize_echo(&x, &s).unwrap();
        let tof = detect_tof(&echo.trace, &x).unwrap();
        assert!((tof - 2.0 * 0.05 / 1480.0).abs() < 1.0 / FS, "{tof}");
    }

    #[test]
    fn resonant_reflector_delays_the_correlation_peak_slightly() {
        let x = make_burst(2.2e6, 12e-6, 1.0, FS, 0.0).unwrap();
        let echo = synthesize_echo(&x, &LinkScenario::default_antenna(0.0)).unwrap();
        let late = (detect_tof(&echo.trace, &x).unwrap() - 2.0 * 0.05 / 1480.0) * FS;
        assert!(late > 0.0 && late < 10.0, "{late} samples");
    }

    #[test]
    fn tof_of_chirp_echo() {
        let x = crate::waveform::make_chirp(2.2e6, 2.35e6, 1e-3, 1.0, FS, 0.0).unwrap();
        let s = LinkScenario::default_antenna(0.0).with_flat_reflector(0.9);
        let echo = synthesize_echo(&x, &s).unwrap();
        let tof = detect_tof(&echo.trace, &x).unwrap();
        assert!((tof - 2.0 * 0.05 / 1480.0).abs() < 1.0 / FS, "{tof}");
    }

    #[test]
    fn silent_trace_has_no_echo() {
        let x = make_burst(2.25e6, 12e-6, 1.0, FS, 0.0).unwrap();
        let silent = EchoTrace::new(FS, 0.0, vec![0.0; 4000]).unwrap();
        assert!(matches!(detect_tof(&silent, &x), Err(Error::NoEcho { .. })));
    }

    #[test]
    fn tof_scatter_at_20_db() {
        let x = make_burst(2.25e6, 12e-6, 1.0, FS, 0.0).unwrap();
        let s = LinkScenario::default_antenna(0.0).with_flat_reflector(0.9);
        let clean = synthesize_echo(&x, &s).unwrap().trace;
        let tofs: Vec<f64> = (0..100)
            .map(|seed| detect_tof(&add_noise(&clean, Some(20.0), seed).unwrap(), &x).unwrap())
            .collect();
        let sd = crate::numeric::std_dev(&tofs) * FS;
        assert!(sd <= 2.0, "{sd} samples");
    }
}
