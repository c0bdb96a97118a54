use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{SweepMeta, SweepSpectrum};
use crate::error::{domain, Error, Result};
use crate::lockin::{demod_gate, demodulate, design_lowpass, detect_tof, gate_average, DEFAULT_CUTOFF, DEFAULT_ORDER, GATE_GUARD};
use crate::numeric::{linear_grid, par_map};
use crate::waveform::{make_burst, make_chirp, EchoTrace, LinkChannel, LinkScenario, DEFAULT_SAMPLE_RATE};

/// Receiver digitiser. Full scale is fixed from the first echo of a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Adc {
    pub bits: u32,
    /// Full scale as a multiple of the first echo's peak.
    pub headroom: f64,
}

impl Default for Adc {
    fn default() -> Self {
        Self { bits: 16, headroom: 2.0 }
    }
}

impl Adc {
    fn max_code(&self) -> f64 {
        ((1u64 << (self.bits - 1)) - 1) as f64
    }

    /// Samples as clipped integer codes divided by the maximum code.
    pub fn digitize(&self, trace: &EchoTrace, full_scale: f64) -> EchoTrace {
        let m = self.max_code();
        let samples = trace
            .samples
            .iter()
            .map(|&x| (x / full_scale * m).round().clamp(-m, m) / m)
            .collect();
        EchoTrace { samples, ..trace.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub f_start: f64,
    pub f_stop: f64,
    pub step: f64,
    pub burst_duration: f64,
    pub amplitude: f64,
    pub sample_rate: f64,
    pub filter_order: usize,
    pub filter_cutoff: f64,
    /// Fraction of the burst trimmed from each end of the demodulator gate.
    pub gate_guard: f64,
    /// `None` keeps the analog echo in volts.
    pub adc: Option<Adc>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            f_start: 2.20e6,
            f_stop: 2.35e6,
            step: 500.0,
            burst_duration: 12e-6,
            amplitude: 1.0,
            sample_rate: DEFAULT_SAMPLE_RATE,
            filter_order: DEFAULT_ORDER,
            filter_cutoff: DEFAULT_CUTOFF,
            gate_guard: GATE_GUARD,
            adc: Some(Adc::default()),
        }
    }
}

impl SweepConfig {
    pub fn grid(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0 && self.f_start > 0.0 && self.f_stop > self.f_start) {
            return domain("sweep needs 0 < f_start < f_stop and step > 0");
        }
        let g = linear_grid(self.f_start, self.f_stop, self.step);
        if g.len() < 5 {
            return domain("sweep grid needs at least five points");
        }
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        self.grid()?;
        if !(self.gate_guard >= 0.0 && self.gate_guard < 0.5) {
            return domain("gate guard must lie in [0, 0.5)");
        }
        if !(self.amplitude.is_finite() && self.amplitude >= 0.0) {
            return domain("excitation amplitude must be finite and >= 0");
        }
        if let Some(adc) = self.adc {
            if !(2..=32).contains(&adc.bits) || !(adc.headroom >= 1.0) {
                return domain("ADC needs 2..=32 bits and headroom >= 1");
            }
        }
        Ok(())
    }
}

struct Receiver {
    adc: Option<Adc>,
    full_scale: f64,
}

impl Receiver {
    fn from_first_echo(adc: Option<Adc>, echo: &EchoTrace) -> Self {
        let full_scale = adc.map_or(1.0, |a| a.headroom * echo.peak());
        Self { adc, full_scale }
    }

    fn capture(&self, echo: &EchoTrace) -> EchoTrace {
        match self.adc {
            Some(a) if self.full_scale > 0.0 => a.digitize(echo, self.full_scale),
            _ => echo.clone(),
        }
    }
}

/// Sequential burst sweep: one pulse-echo per grid frequency, lock-in
/// demodulated and averaged over the plateau gate.
pub fn run_sweep(scenario: &LinkScenario, config: &SweepConfig) -> Result<SweepSpectrum> {
    config.validate()?;
    let grid = config.grid()?;
    let fs = config.sample_rate;
    let lpf = design_lowpass(config.filter_order, config.filter_cutoff, fs)?;
    let channel = LinkChannel::new(scenario, fs, config.burst_duration)?;
    let burst = |f: f64, amp: f64| make_burst(f, config.burst_duration, amp, fs, 0.0);

    let first_tx = burst(grid[0], config.amplitude)?;
    let first_echo = channel.echo(&first_tx, 0)?;
    let receiver = Receiver::from_first_echo(config.adc, &first_echo);
    let first = receiver.capture(&first_echo);
    let tof = detect_tof(&first, &burst(grid[0], 1.0)?)?;
    let (g0, g1) = demod_gate(tof, config.burst_duration, &lpf, config.gate_guard);

    let amplitudes = par_map(&grid, |i, &f| -> Result<f64> {
        let rx = if i == 0 {
            first.clone()
        } else {
            receiver.capture(&channel.echo(&burst(f, config.amplitude)?, i as u64)?)
        };
        gate_average(&demodulate(&rx, f, &lpf)?, g0, g1)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    SweepSpectrum::new(
        grid.clone(),
        amplitudes,
        SweepMeta {
            tof: Some(tof),
            distance: Some(tof * scenario.medium.sound_speed / 2.0),
            pulse_count: grid.len(),
            volts_per_unit: receiver.full_scale,
            out_of_band: channel.out_of_band(&first_tx),
            ..SweepMeta::default()
        },
    )
}

/// Relative floor on |X(f)| for the chirp deconvolution.
pub const DECONV_FLOOR: f64 = 1e-3;

/// Minimum time-bandwidth product accepted for a chirp.
pub const MIN_TIME_BANDWIDTH: f64 = 50.0;

/// Listening time kept ahead of the detected echo onset.
const PRE_ECHO: f64 = 2e-6;

/// Band excitation: one chirp echo, deconvolved by the chirp spectrum on
/// the sweep grid `[f0, f1]` with `config.step`.
pub fn chirp_sweep(
    scenario: &LinkScenario,
    config: &SweepConfig,
    band: (f64, f64),
    duration: f64,
) -> Result<SweepSpectrum> {
    config.validate()?;
    let (f0, f1) = band;
    if !(f1 > f0 && f0 > 0.0) {
        return domain("chirp band needs 0 < f0 < f1");
    }
    if (f1 - f0) * duration < MIN_TIME_BANDWIDTH {
        return domain(format!(
            "chirp time-bandwidth product {:.1} is below {MIN_TIME_BANDWIDTH}",
            (f1 - f0) * duration
        ));
    }
    let grid = SweepConfig {
        f_start: f0,
        f_stop: f1,
        ..config.clone()
    }
    .grid()?;
    let fs = config.sample_rate;
    let tx = make_chirp(f0, f1, duration, config.amplitude, fs, 0.0)?;
    let unit = make_chirp(f0, f1, duration, 1.0, fs, 0.0)?;
    let channel = LinkChannel::new(scenario, fs, duration)?;
    let echo = channel.echo(&tx, 0)?;
    let receiver = Receiver::from_first_echo(config.adc, &echo);
    let rx = receiver.capture(&echo);
    let tof = detect_tof(&rx, &unit)?;

    let start = ((tof - PRE_ECHO) * fs).floor().max(0.0) as usize;
    let gated = &rx.samples[start..];
    let dft = |x: &[f64], offset: usize, f: f64| -> Complex64 {
        x.iter()
            .enumerate()
            .map(|(n, &v)| Complex64::from_polar(v, -TAU * f * (offset + n) as f64 / fs))
            .sum()
    };
    let pairs = par_map(&grid, |_, &f| (dft(gated, start, f).norm(), dft(&unit.samples, 0, f).norm()));
    let x_max = pairs.iter().map(|p| p.1).fold(0.0, f64::max);
    let floor = DECONV_FLOOR * x_max;
    let starved = pairs.iter().filter(|p| p.1 < floor).count();
    if x_max == 0.0 || starved * 10 > grid.len() {
        return Err(Error::InsufficientExcitation(format!(
            "{starved} of {} grid points fall below the excitation floor",
            grid.len()
        )));
    }
    let amplitudes = pairs.iter().map(|(y, x)| y / x.max(floor)).collect();
    SweepSpectrum::new(
        grid,
        amplitudes,
        SweepMeta {
            tof: Some(tof),
            distance: Some(tof * scenario.medium.sound_speed / 2.0),
            pulse_count: 1,
            volts_per_unit: receiver.full_scale,
            out_of_band: channel.out_of_band(&tx),
            ..SweepMeta::default()
        },
    )
}
