use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Capacitive pressure sensor: linear up to a knee, shallower beyond it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorModel {
    pub base_capacitance: f64,
    /// F/kPa below the knee.
    pub sensitivity: f64,
    pub knee_pressure: f64,
    /// Slope multiplier applied beyond the knee.
    pub saturation_factor: f64,
}

impl Default for SensorModel {
    fn default() -> Self {
        Self {
            base_capacitance: 2e-12,
            sensitivity: 5.83e-12,
            knee_pressure: 20.0,
            saturation_factor: 0.2,
        }
    }
}

impl SensorModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.base_capacitance >= 0.0 && self.sensitivity > 0.0 && self.knee_pressure > 0.0) {
            return domain("sensor needs base >= 0, sensitivity > 0 and knee > 0");
        }
        if !(self.saturation_factor >= 0.0 && self.saturation_factor <= 1.0) {
            return domain("saturation factor must lie in [0, 1]");
        }
        Ok(())
    }

    /// Inverse of [`sensor_capacitance`], clipped at zero pressure. Returns
    /// the pressure and whether clipping happened.
    pub fn pressure_from_capacitance(&self, c: f64) -> (f64, bool) {
        let dc = c - self.base_capacitance;
        if dc < 0.0 {
            return (0.0, true);
        }
        let knee_c = self.sensitivity * self.knee_pressure;
        if dc <= knee_c {
            return (dc / self.sensitivity, false);
        }
        if self.saturation_factor == 0.0 {
            return (self.knee_pressure, false);
        }
        (self.knee_pressure + (dc - knee_c) / (self.sensitivity * self.saturation_factor), false)
    }
}

pub fn sensor_capacitance(pressure_kpa: f64, model: &SensorModel) -> Result<f64> {
    if !(pressure_kpa >= 0.0) {
        return domain(format!("pressure must be >= 0 kPa, got {pressure_kpa}"));
    }
    let below = pressure_kpa.min(model.knee_pressure);
    let above = (pressure_kpa - model.knee_pressure).max(0.0);
    Ok(model.base_capacitance + model.sensitivity * (below + model.saturation_factor * above))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn anchor_values() {
        let m = SensorModel::default();
        assert_eq!(sensor_capacitance(0.0, &m).unwrap(), m.base_capacitance);
        let c = sensor_capacitance(10.0, &m).unwrap();
        assert!((c - (m.base_capacitance + 58.3e-12)).abs() < 1e-18);
        assert!(sensor_capacitance(-1.0, &m).is_err());
    }

    #[test]
    fn monotone_and_invertible() {
        let m = SensorModel::default();
        let mut prev = 0.0;
        for i in 0..=400 {
            let p = i as f64 * 0.1;
            let c = sensor_capacitance(p, &m).unwrap();
            assert!(c >= prev);
            prev = c;
            let (back, clipped) = m.pressure_from_capacitance(c);
            assert!(!clipped);
            assert!((back - p).abs() < 1e-9);
        }
        assert_eq!(m.pressure_from_capacitance(0.0), (0.0, true));
    }
}
