use serde::{Deserialize, Serialize};

use super::{
    chirp_sweep, compensate_distance, find_valley, run_sweep, sensor_capacitance, smooth_spectrum, CalibrationCurve,
    CalibrationKind, SensorModel, SweepConfig,
};
use crate::error::{domain, Result};
use crate::waveform::LinkScenario;

pub const DEFAULT_SIGMA_BINS: f64 = 2.0;

/// Piecewise-constant pressure record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressureTrace {
    pub times: Vec<f64>,
    pub pressures: Vec<f64>,
}

impl PressureTrace {
    pub fn new(times: Vec<f64>, pressures: Vec<f64>) -> Result<Self> {
        if times.is_empty() || times.len() != pressures.len() {
            return domain("pressure trace needs matching, non-empty time and pressure columns");
        }
        if let Some(i) = times.windows(2).position(|w| !(w[1] > w[0])) {
            return domain(format!("pressure trace time is not increasing at row {}", i + 2));
        }
        if pressures.iter().any(|p| !p.is_finite()) || times.iter().any(|t| !t.is_finite()) {
            return domain("pressure trace contains non-finite values");
        }
        Ok(Self { times, pressures })
    }

    /// Square wave between `low` and `high` starting low, sampled every `dt`.
    pub fn square_wave(low: f64, high: f64, period: f64, cycles: usize, dt: f64) -> Self {
        let n = (period * cycles as f64 / dt).round() as usize;
        let times: Vec<f64> = (0..n).map(|i| i as f64 * dt).collect();
        let pressures = times
            .iter()
            .map(|t| if (t / period).fract() < 0.5 { low } else { high })
            .collect();
        Self { times, pressures }
    }

    /// Zero-order hold: the latest sample at or before `t`.
    pub fn value_at(&self, t: f64) -> f64 {
        let i = self.times.partition_point(|&x| x <= t);
        self.pressures[i.saturating_sub(1)]
    }

    pub fn span(&self) -> f64 {
        self.times[self.times.len() - 1] - self.times[0]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepMode {
    Sequential,
    Chirp { duration: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StreamConfig {
    /// Ticks per second.
    pub rate: f64,
    pub sigma_bins: f64,
    pub compensate: bool,
    pub mode: SweepMode,
}

impl Default for StreamConfig {
    fn default() -> Self {
        Self {
            rate: 1.0,
            sigma_bins: DEFAULT_SIGMA_BINS,
            compensate: true,
            mode: SweepMode::Sequential,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    /// End of the tick in which the sweep ran.
    pub t_s: f64,
    pub f_valley_hz: Option<f64>,
    pub c_load_pf: Option<f64>,
    pub pressure_kpa: Option<f64>,
    pub tof_s: Option<f64>,
    pub valley_depth_db: Option<f64>,
    pub valid: bool,
    /// The raw pressure estimate was negative and has been set to zero.
    #[serde(default)]
    pub clipped: bool,
}

impl EstimateResult {
    fn invalid(t_s: f64) -> Self {
        Self {
            t_s,
            f_valley_hz: None,
            c_load_pf: None,
            pressure_kpa: None,
            tof_s: None,
            valley_depth_db: None,
            valid: false,
            clipped: false,
        }
    }
}

/// Acquire, smooth and locate the valley of one sweep.
pub fn measure_valley(
    scenario: &LinkScenario,
    sweep: &SweepConfig,
    stream: &StreamConfig,
) -> Result<(super::Valley, super::SweepSpectrum)> {
    let mut spectrum = match stream.mode {
        SweepMode::Sequential => run_sweep(scenario, sweep)?,
        SweepMode::Chirp { duration } => chirp_sweep(scenario, sweep, (sweep.f_start, sweep.f_stop), duration)?,
    };
    if stream.compensate {
        spectrum = compensate_distance(&spectrum, &scenario.medium)?;
    }
    let smoothed = smooth_spectrum(&spectrum, stream.sigma_bins)?;
    Ok((find_valley(&smoothed)?, smoothed))
}

/// One estimate per tick. The pressure is held from the start of each tick,
/// the sensor sets the antenna load, and the valley is mapped back through
/// `calibration`. Tick `k` draws noise from seed `scenario.noise.seed + k`.
pub fn estimate_stream(
    scenario: &LinkScenario,
    sweep: &SweepConfig,
    pressure: &PressureTrace,
    calibration: &CalibrationCurve,
    sensor: &SensorModel,
    stream: &StreamConfig,
) -> Result<Vec<EstimateResult>> {
    calibration.validate()?;
    sensor.validate()?;
    if !(stream.rate > 0.0) {
        return domain("tick rate must be > 0");
    }
    let ticks = (pressure.span() * stream.rate).floor() as usize + 1;
    let t_first = pressure.times[0];
    let mut out = Vec::with_capacity(ticks);
    for k in 0..ticks {
        let t_start = t_first + k as f64 / stream.rate;
        let t_end = t_first + (k + 1) as f64 / stream.rate;
        let p_true = pressure.value_at(t_start).max(0.0);
        let mut s = scenario.clone().with_c_load(sensor_capacitance(p_true, sensor)?);
        s.noise.seed = scenario.noise.seed.wrapping_add(k as u64);
        let Ok((valley, spectrum)) = measure_valley(&s, sweep, stream) else {
            out.push(EstimateResult::invalid(t_end));
            continue;
        };
        let Ok(value) = calibration.evaluate(valley.frequency) else {
            out.push(EstimateResult {
                f_valley_hz: Some(valley.frequency),
                tof_s: spectrum.meta.tof,
                valley_depth_db: Some(valley.depth_db),
                ..EstimateResult::invalid(t_end)
            });
            continue;
        };
        let (c_pf, p, clipped) = match calibration.kind {
            CalibrationKind::CapacitancePf => {
                let (p, clipped) = sensor.pressure_from_capacitance(value * 1e-12);
                (value, p, clipped)
            }
            CalibrationKind::PressureKpa => {
                let p = value.max(0.0);
                (sensor_capacitance(p, sensor)? * 1e12, p, value < 0.0)
            }
        };
        out.push(EstimateResult {
            t_s: t_end,
            f_valley_hz: Some(valley.frequency),
            c_load_pf: Some(c_pf),
            pressure_kpa: Some(p),
            tof_s: spectrum.meta.tof,
            valley_depth_db: Some(valley.depth_db),
            valid: true,
            clipped,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_order_hold_and_validation() {
        let p = PressureTrace::new(vec![0.0, 1.0, 2.5], vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(p.value_at(-1.0), 1.0);
        assert_eq!(p.value_at(0.99), 1.0);
        assert_eq!(p.value_at(1.0), 2.0);
        assert_eq!(p.value_at(10.0), 3.0);
        assert!(PressureTrace::new(vec![0.0, 1.0, 1.0], vec![0.0; 3]).is_err());
    }

    #[test]
    fn square_wave_shape() {
        let p = PressureTrace::square_wave(0.0, 10.0, 20.0, 2, 1.0);
        assert_eq!(p.times.len(), 40);
        assert_eq!(p.value_at(9.0), 0.0);
        assert_eq!(p.value_at(10.0), 10.0);
        assert_eq!(p.value_at(20.0), 0.0);
    }
}
