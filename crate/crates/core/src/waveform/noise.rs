use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::EchoTrace;
use crate::error::{domain, Result};

/// Deterministic generator for substream `stream` of a top-level `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mean power over the trace's echo support (samples within 1 % of peak).
pub fn gated_power(trace: &EchoTrace) -> f64 {
    match trace.support() {
        Some(r) => {
            let n = r.len() as f64;
            trace.samples[r].iter().map(|x| x * x).sum::<f64>() / n
        }
        None => 0.0,
    }
}

/// Add white Gaussian noise at `snr_db` relative to the gated echo power.
/// `None` returns the trace unchanged.
pub fn add_noise(trace: &EchoTrace, snr_db: Option<f64>, seed: u64) -> Result<EchoTrace> {
    add_noise_stream(trace, snr_db, seed, 0)
}

pub fn add_noise_stream(trace: &EchoTrace, snr_db: Option<f64>, seed: u64, stream: u64) -> Result<EchoTrace> {
    let Some(snr_db) = snr_db else {
        return Ok(trace.clone());
    };
    let power = gated_power(trace);
    if !(power > 0.0) {
        return domain("cannot set an SNR on a trace with zero signal power");
    }
    let sigma = (power / 10f64.powf(snr_db / 10.0)).sqrt();
    let mut rng = substream(seed, stream);
    let samples = trace
        .samples
        .iter()
        .map(|&x| {
            let n: f64 = rng.sample(StandardNormal);
            x + sigma * n
        })
        .collect();
    Ok(EchoTrace { samples, ..trace.clone() })
}
