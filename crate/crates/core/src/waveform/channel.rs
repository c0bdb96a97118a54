use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use realfft::{ComplexToReal, RealFftPlanner, RealToComplex};

use super::noise::add_noise_stream;
use super::scenario::{LinkScenario, NoiseSpec, Reflector};
use super::EchoTrace;
use crate::acoustic::{attenuation_factor, reflection_coefficient, time_of_flight};
use crate::error::{domain, Error, Result};
use crate::numeric::par_map;

pub const DEFAULT_SAMPLE_RATE: f64 = 50e6;

/// Listening time kept after the end of the last echo.
pub const ECHO_TAIL: f64 = 20e-6;

/// Below this |T|² the round-trip response is treated as zero.
const BAND_FLOOR: f64 = 1e-12;

/// Round-trip transfer function of one scenario, tabulated on an FFT grid
/// sized for excitations of a given length.
#[derive(Clone)]
pub struct LinkChannel {
    sample_rate: f64,
    out_len: usize,
    tof: f64,
    noise: NoiseSpec,
    band: Option<super::InterrogatorBand>,
    /// Bins `0..=n/2`; negative frequencies are the conjugate mirror.
    response: Vec<Complex64>,
    fwd: Arc<dyn RealToComplex<f64>>,
    inv: Arc<dyn ComplexToReal<f64>>,
}

impl std::fmt::Debug for LinkChannel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LinkChannel")
            .field("sample_rate", &self.sample_rate)
            .field("out_len", &self.out_len)
            .field("n_fft", &self.n_fft())
            .field("tof", &self.tof)
            .finish()
    }
}

/// Echo plus bookkeeping from a single pulse-echo event.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesizedEcho {
    pub trace: EchoTrace,
    /// Model round-trip time of flight.
    pub tof: f64,
    /// Less than half of the excitation energy falls inside the −3 dB band.
    pub out_of_band: bool,
}

impl LinkChannel {
    pub fn new(scenario: &LinkScenario, sample_rate: f64, excitation_duration: f64) -> Result<Self> {
        scenario.validate()?;
        if !(sample_rate.is_finite() && sample_rate > 0.0) {
            return domain("sample rate must be > 0");
        }
        let tof = time_of_flight(scenario.distance, &scenario.medium);
        let last = scenario
            .boundary_echo
            .map(|b| time_of_flight(b.distance, &scenario.medium))
            .unwrap_or(0.0)
            .max(tof);
        let out_len = ((last + excitation_duration + ECHO_TAIL) * sample_rate).ceil() as usize;
        let n_fft = (4 * out_len).next_power_of_two();
        let df = sample_rate / n_fft as f64;

        let bins: Vec<usize> = (0..=n_fft / 2).collect();
        let response = par_map(&bins, |_, &k| -> Result<Complex64> {
            let f = k as f64 * df;
            let t2 = scenario.band.map_or(1.0, |b| b.magnitude(f).powi(2));
            if t2 < BAND_FLOOR {
                return Ok(Complex64::new(0.0, 0.0));
            }
            let gamma = match scenario.reflector {
                Reflector::Constant { gamma } => Complex64::new(gamma, 0.0),
                Reflector::Antenna if k == 0 => return Ok(Complex64::new(0.0, 0.0)),
                Reflector::Antenna => reflection_coefficient(&scenario.stack, &scenario.load, f)?,
            };
            let a = attenuation_factor(&scenario.medium, f, scenario.distance)?;
            let mut h = gamma * a * a * Complex64::from_polar(1.0, -TAU * f * tof);
            if let Some(b) = scenario.boundary_echo {
                let ab = attenuation_factor(&scenario.medium, f, b.distance)?;
                let tb = time_of_flight(b.distance, &scenario.medium);
                h += b.gamma * ab * ab * Complex64::from_polar(1.0, -TAU * f * tb);
            }
            Ok(h * t2 * scenario.amplitude_scale)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
        if response.iter().any(|h| !(h.re.is_finite() && h.im.is_finite())) {
            return Err(Error::Numerical("non-finite link transfer value".into()));
        }
        let mut response = response;
        let nyq = response.len() - 1;
        response[nyq] = Complex64::new(response[nyq].re, 0.0);

        let mut planner = RealFftPlanner::new();
        Ok(Self {
            sample_rate,
            out_len,
            tof,
            noise: scenario.noise,
            band: scenario.band,
            response,
            fwd: planner.plan_fft_forward(n_fft),
            inv: planner.plan_fft_inverse(n_fft),
        })
    }

    pub fn sample_rate(&self) -> f64 {
        self.sample_rate
    }

    pub fn tof(&self) -> f64 {
        self.tof
    }

    pub fn n_fft(&self) -> usize {
        self.fwd.len()
    }

    pub fn output_len(&self) -> usize {
        self.out_len
    }

    fn spectrum(&self, excitation: &EchoTrace) -> Vec<Complex64> {
        let n = self.n_fft();
        let mut input = vec![0.0; n];
        input[..excitation.len()].copy_from_slice(&excitation.samples);
        let mut out = self.fwd.make_output_vec();
        self.fwd.process(&mut input, &mut out).expect("buffer sizes match the plan");
        out
    }

    /// Noiseless echo of `excitation`.
    pub fn propagate(&self, excitation: &EchoTrace) -> Result<EchoTrace> {
        if excitation.sample_rate != self.sample_rate {
            return domain("excitation sample rate differs from the channel's");
        }
        if excitation.len() > self.out_len {
            return domain("excitation is longer than the channel was sized for");
        }
        let mut spec = self.spectrum(excitation);
        for (x, h) in spec.iter_mut().zip(&self.response) {
            *x *= h;
        }
        // DC and Nyquist must be real for the inverse real transform
        let last = spec.len() - 1;
        spec[0].im = 0.0;
        spec[last].im = 0.0;
        let mut out = self.inv.make_output_vec();
        self.inv
            .process(&mut spec, &mut out)
            .map_err(|e| Error::Numerical(format!("inverse transform failed: {e}")))?;
        let scale = 1.0 / self.n_fft() as f64;
        out.truncate(self.out_len);
        out.iter_mut().for_each(|v| *v *= scale);
        EchoTrace::new(self.sample_rate, 0.0, out)
    }

    /// Echo with the scenario's noise drawn from substream `stream`.
    pub fn echo(&self, excitation: &EchoTrace, stream: u64) -> Result<EchoTrace> {
        let clean = self.propagate(excitation)?;
        if self.noise.snr_db.is_some() && clean.peak() == 0.0 {
            return Ok(clean);
        }
        add_noise_stream(&clean, self.noise.snr_db, self.noise.seed, stream)
    }

    /// Whether less than half of the excitation energy lies in the −3 dB band.
    pub fn out_of_band(&self, excitation: &EchoTrace) -> bool {
        let Some(band) = self.band else {
            return false;
        };
        let n = self.n_fft();
        let buf = self.spectrum(excitation);
        let df = self.sample_rate / n as f64;
        let (mut total, mut inside) = (0.0, 0.0);
        for (k, x) in buf.iter().enumerate() {
            let e = x.norm_sqr();
            total += e;
            if band.magnitude(k as f64 * df) >= std::f64::consts::FRAC_1_SQRT_2 {
                inside += e;
            }
        }
        total > 0.0 && inside < 0.5 * total
    }
}

/// One pulse-echo event through `scenario`.
pub fn synthesize_echo(excitation: &EchoTrace, scenario: &LinkScenario) -> Result<SynthesizedEcho> {
    let channel = LinkChannel::new(scenario, excitation.sample_rate, excitation.duration())?;
    Ok(SynthesizedEcho {
        trace: channel.echo(excitation, 0)?,
        tof: channel.tof(),
        out_of_band: channel.out_of_band(excitation),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acoustic::Medium;
    use crate::waveform::make_burst;

    fn rigid_lossless() -> LinkScenario {
        let mut s = LinkScenario::default_antenna(0.0)
            .with_flat_reflector(1.0)
            .with_medium(Medium::water().lossless());
        s.band = None;
        s
    }

    #[test]
    fn rigid_reflector_is_a_pure_delay() {
        let f = 2.25e6;
        let x = make_burst(f, 12e-6, 1.0, DEFAULT_SAMPLE_RATE, 0.0).unwrap();
        let echo = synthesize_echo(&x, &rigid_lossless()).unwrap();
        let tof = 2.0 * 0.05 / 1480.0;
        assert!((echo.tof - tof).abs() < 1e-15);
        // compare away from the gate edges, where band-limited interpolation rings
        let start = (tof * DEFAULT_SAMPLE_RATE).ceil() as usize + 50;
        let mut worst: f64 = 0.0;
        for i in start..start + 500 {
            let t = echo.trace.time(i) - tof;
            worst = worst.max((echo.trace.samples[i] - (TAU * f * t).sin()).abs());
        }
        assert!(worst < 0.02, "{worst}");
        let before = (tof * DEFAULT_SAMPLE_RATE) as usize - 50;
        assert!(echo.trace.samples[..before].iter().all(|x| x.abs() < 0.02));
    }

    #[test]
    fn zero_scale_is_silent_or_pure_noise() {
        let x = make_burst(2.25e6, 12e-6, 1.0, DEFAULT_SAMPLE_RATE, 0.0).unwrap();
        let mut s = LinkScenario::default_antenna(0.0);
        s.amplitude_scale = 0.0;
        let echo = synthesize_echo(&x, &s).unwrap();
        assert!(echo.trace.samples.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn linear_in_the_excitation() {
        let s = LinkScenario::default_antenna(30e-12);
        let x = make_burst(2.3e6, 12e-6, 1.0, DEFAULT_SAMPLE_RATE, 0.0).unwrap();
        let ch = LinkChannel::new(&s, DEFAULT_SAMPLE_RATE, x.duration()).unwrap();
        let y = ch.propagate(&x).unwrap();
        let y2 = ch.propagate(&x.scaled(2.0)).unwrap();
        for (a, b) in y.samples.iter().zip(&y2.samples) {
            assert_eq!(2.0 * a, *b);
        }
        let y3 = ch.propagate(&x.scaled(3.7)).unwrap();
        let peak = y.peak();
        for (a, b) in y.samples.iter().zip(&y3.samples) {
            assert!((3.7 * a - b).abs() <= 1e-12 * peak);
        }
    }

    #[test]
    fn far_out_of_band_excitation_is_flagged() {
        let s = LinkScenario::default_antenna(0.0);
        let fs = 100e6;
        let x = make_burst(6e6, 12e-6, 1.0, fs, 0.0).unwrap();
        assert!(synthesize_echo(&x, &s).unwrap().out_of_band);
        let x = make_burst(2.3e6, 12e-6, 1.0, fs, 0.0).unwrap();
        assert!(!synthesize_echo(&x, &s).unwrap().out_of_band);
    }
}
