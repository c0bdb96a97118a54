use std::path::PathBuf;

use puc_core::numeric::mean;
use puc_core::sweep::{
    chirp_sweep, compensate_distance, find_valley, fit_calibration, run_sweep, sensor_capacitance, smooth_spectrum,
    CalibrationCurve, CalibrationKind, SweepMode, SweepSpectrum, Valley,
};
use puc_core::waveform::LinkScenario;

use crate::config::{Resolved, ScenarioConfig};
use crate::output::{Sink, Table};
use crate::{Cli, CliError, Command};

mod basic;
mod reproduce;

pub use reproduce::FIGURES;

pub fn dispatch(cli: &Cli, cfg: &ScenarioConfig) -> Result<Vec<PathBuf>, CliError> {
    let r = cfg.resolve()?;
    let mut sink = Sink::new(&cli.out, cfg.sha256(), r.format)?;
    match &cli.command {
        Command::Impedance => basic::impedance(&r, &mut sink)?,
        Command::Sweep => basic::sweep(&r, &mut sink)?,
        Command::Echo => basic::echo(&r, &mut sink)?,
        Command::Calibrate => basic::calibrate(&r, &mut sink)?,
        Command::Estimate { pressure, calibration } => {
            basic::estimate(&r, &mut sink, pressure, calibration.as_deref())?
        }
        Command::Reproduce { figure, repeats } => reproduce::run(&r, &mut sink, figure, *repeats)?,
    }
    Ok(sink.written)
}

/// Configured loads, or a single unloaded case when the list is empty.
fn loads(r: &Resolved) -> Vec<f64> {
    if r.c_loads.is_empty() {
        vec![0.0]
    } else {
        r.c_loads.clone()
    }
}

/// Configured scenario with `c_load` and the noise seed advanced by `offset`.
fn scenario_for(r: &Resolved, c_load: f64, offset: u64) -> LinkScenario {
    let mut s = r.scenario.clone();
    s.load = r.base_load.with_c_load(c_load);
    s.noise.seed = s.noise.seed.wrapping_add(offset);
    s
}

/// One acquired sweep: raw and post-processed spectra plus the valley.
struct Acquired {
    raw: SweepSpectrum,
    processed: SweepSpectrum,
    valley: Option<Valley>,
}

impl Acquired {
    fn volts(s: &SweepSpectrum) -> Vec<f64> {
        s.amplitudes.iter().map(|a| a * s.meta.volts_per_unit).collect()
    }
}

fn acquire(r: &Resolved, scenario: &LinkScenario) -> Result<Acquired, CliError> {
    let raw = match r.stream.mode {
        SweepMode::Sequential => run_sweep(scenario, &r.sweep)?,
        SweepMode::Chirp { duration } => chirp_sweep(scenario, &r.sweep, (r.sweep.f_start, r.sweep.f_stop), duration)?,
    };
    let mut processed = raw.clone();
    if r.stream.compensate {
        processed = compensate_distance(&processed, &scenario.medium)?;
    }
    processed = smooth_spectrum(&processed, r.stream.sigma_bins)?;
    let valley = find_valley(&processed).ok();
    Ok(Acquired { raw, processed, valley })
}

/// Least-squares slope of `y` against `x`.
fn slope(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let num: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let den: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    num / den
}

/// Valley-frequency calibration over the configured loads or pressures.
fn fit_configured_calibration(r: &Resolved) -> Result<(CalibrationCurve, Table), CliError> {
    let (values, caps): (Vec<f64>, Vec<f64>) = match r.calibration_kind {
        CalibrationKind::CapacitancePf => r.c_loads.iter().map(|&c| (c * 1e12, c)).unzip(),
        CalibrationKind::PressureKpa => r
            .calibration_pressures
            .iter()
            .map(|&p| Ok((p, sensor_capacitance(p, &r.sensor)?)))
            .collect::<Result<Vec<_>, puc_core::Error>>()?
            .into_iter()
            .unzip(),
    };
    if values.len() <= r.calibration_order {
        return Err(CliError::Config(format!(
            "calibration of order {} needs at least {} points, the config gives {}",
            r.calibration_order,
            r.calibration_order + 1,
            values.len()
        )));
    }
    let mut table = Table::new(&["c_load_pf", "value", "f_valley_hz"]);
    let mut points = Vec::with_capacity(values.len());
    for (i, (&v, &c)) in values.iter().zip(&caps).enumerate() {
        let a = acquire(r, &scenario_for(r, c, i as u64))?;
        let valley = a.valley.ok_or_else(|| {
            CliError::Model(puc_core::Error::Boundary(format!(
                "no interior valley at {:.3} pF",
                c * 1e12
            )))
        })?;
        table.push(vec![c * 1e12, v, valley.frequency]);
        points.push((valley.frequency, v));
    }
    Ok((fit_calibration(&points, r.calibration_order, r.calibration_kind)?, table))
}
