use std::f64::consts::TAU;

use super::EchoTrace;
use crate::error::{domain, Result};

/// Minimum sample-rate to carrier ratio accepted by the generators.
pub const MIN_OVERSAMPLING: f64 = 10.0;

/// Rectangular-gated tone `amplitude·sin(2πft)` over `[0, duration)`,
/// followed by `tail` seconds of silence.
pub fn make_burst(f: f64, duration: f64, amplitude: f64, sample_rate: f64, tail: f64) -> Result<EchoTrace> {
    if !(f > 0.0 && f.is_finite()) {
        return domain(format!("burst frequency must be > 0, got {f}"));
    }
    if sample_rate < MIN_OVERSAMPLING * f {
        return domain(format!(
            "sample rate {sample_rate:.3e} Hz undersamples a {f:.3e} Hz burst (need >= {MIN_OVERSAMPLING}x)"
        ));
    }
    if !(duration >= 2.0 / f) {
        return domain(format!("burst of {duration:.3e} s is shorter than two cycles"));
    }
    let n = gate_samples(duration, sample_rate);
    let samples = (0..n)
        .map(|i| {
            let t = i as f64 / sample_rate;
            amplitude * (TAU * (f * t)).sin()
        })
        .collect();
    Ok(EchoTrace::new(sample_rate, 0.0, samples)?.padded(tail))
}

/// Number of whole carrier cycles in a burst.
pub fn burst_cycles(f: f64, duration: f64) -> u64 {
    (f * duration).round() as u64
}

/// Linear chirp from `f_start` to `f_end` over `duration`, phase continuous,
/// followed by `tail` seconds of silence.
pub fn make_chirp(
    f_start: f64,
    f_end: f64,
    duration: f64,
    amplitude: f64,
    sample_rate: f64,
    tail: f64,
) -> Result<EchoTrace> {
    if !(f_start > 0.0 && f_end >= f_start) {
        return domain(format!("chirp needs 0 < f_start <= f_end, got {f_start}..{f_end}"));
    }
    if sample_rate < MIN_OVERSAMPLING * f_end {
        return domain(format!(
            "sample rate {sample_rate:.3e} Hz undersamples a chirp ending at {f_end:.3e} Hz"
        ));
    }
    if !(duration > 0.0) {
        return domain("chirp duration must be > 0");
    }
    let rate = (f_end - f_start) / duration;
    let n = gate_samples(duration, sample_rate);
    let samples = (0..n)
        .map(|i| {
            let t = i as f64 / sample_rate;
            amplitude * (TAU * (f_start * t + 0.5 * rate * t * t)).sin()
        })
        .collect();
    Ok(EchoTrace::new(sample_rate, 0.0, samples)?.padded(tail))
}

fn gate_samples(duration: f64, sample_rate: f64) -> usize {
    ((duration * sample_rate).round() as usize).max(1)
}
