//! Frequency sweeps, valley extraction, calibration and sensor streaming.

mod acquire;
mod calibration;
mod sensor;
mod spectrum;
mod stream;

pub use acquire::{chirp_sweep, run_sweep, Adc, SweepConfig, DECONV_FLOOR, MIN_TIME_BANDWIDTH};
pub use calibration::{fit_calibration, CalibrationCurve, CalibrationKind, DOMAIN_MARGIN};
pub use sensor::{sensor_capacitance, SensorModel};
pub use spectrum::{compensate_distance, find_valley, smooth_spectrum, SweepMeta, SweepSpectrum, Valley};
pub use stream::{
    estimate_stream, measure_valley, EstimateResult, PressureTrace, StreamConfig, SweepMode, DEFAULT_SIGMA_BINS,
};
