use serde::{Deserialize, Serialize};

use crate::circuit::HalfSpace;
use crate::error::{domain, Result};

/// Propagation medium between interrogator and antenna.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Medium {
    pub sound_speed: f64,
    pub density: f64,
    pub attenuation_db_per_cm_at_ref: f64,
    pub ref_freq: f64,
    pub attenuation_exponent: f64,
}

impl Medium {
    pub fn water() -> Self {
        Self {
            sound_speed: 1480.0,
            density: 1000.0,
            attenuation_db_per_cm_at_ref: 0.002,
            ref_freq: 2.0e6,
            attenuation_exponent: 2.0,
        }
    }

    /// Soft tissue: 1.5 dB/cm at 2 MHz, linear in frequency.
    pub fn tissue() -> Self {
        Self {
            sound_speed: 1540.0,
            density: 1050.0,
            attenuation_db_per_cm_at_ref: 1.5,
            ref_freq: 2.0e6,
            attenuation_exponent: 1.0,
        }
    }

    pub fn lossless(self) -> Self {
        Self {
            attenuation_db_per_cm_at_ref: 0.0,
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sound_speed", self.sound_speed),
            ("density", self.density),
            ("ref_freq", self.ref_freq),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return domain(format!("medium {name} must be finite and > 0, got {v}"));
            }
        }
        if !(self.attenuation_db_per_cm_at_ref.is_finite() && self.attenuation_db_per_cm_at_ref >= 0.0) {
            return domain("medium attenuation must be >= 0");
        }
        if !self.attenuation_exponent.is_finite() {
            return domain("medium attenuation exponent must be finite");
        }
        Ok(())
    }

    /// Specific acoustic impedance ρ·c (Rayl).
    pub fn specific_impedance(&self) -> f64 {
        self.density * self.sound_speed
    }

    pub fn attenuation_db_per_cm(&self, f: f64) -> f64 {
        self.attenuation_db_per_cm_at_ref * (f / self.ref_freq).powf(self.attenuation_exponent)
    }

    pub fn half_space(&self) -> HalfSpace {
        HalfSpace {
            density: self.density,
            sound_speed: self.sound_speed,
        }
    }

    pub fn wavelength(&self, f: f64) -> f64 {
        self.sound_speed / f
    }
}

/// Amplitude factor 10^(-α(f)·path_cm/20) for a path of `path` metres.
pub fn attenuation_factor(medium: &Medium, f: f64, path: f64) -> Result<f64> {
    if !(path.is_finite() && path >= 0.0) {
        return domain(format!("path length must be >= 0, got {path}"));
    }
    let db = medium.attenuation_db_per_cm(f) * path * 100.0;
    Ok(10f64.powf(-db / 20.0))
}

/// Round-trip time of flight 2d/c.
pub fn time_of_flight(distance: f64, medium: &Medium) -> f64 {
    2.0 * distance / medium.sound_speed
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_path_is_lossless() {
        assert_eq!(attenuation_factor(&Medium::tissue(), 2e6, 0.0).unwrap(), 1.0);
    }

    #[test]
    fn tissue_round_trip_of_ten_centimetres() {
        let a = attenuation_factor(&Medium::tissue(), 2e6, 0.10).unwrap();
        assert!((a - 10f64.powf(-15.0 / 20.0)).abs() < 1e-12);
        assert!((a - 0.1778).abs() < 1e-4);
    }

    #[test]
    fn half_frequency_halves_the_db_loss() {
        let m = Medium::tissue();
        let full = -20.0 * attenuation_factor(&m, 2e6, 0.05).unwrap().log10();
        let half = -20.0 * attenuation_factor(&m, 1e6, 0.05).unwrap().log10();
        assert!((half - full / 2.0).abs() < 1e-12);
    }

    #[test]
    fn negative_path_is_rejected() {
        assert!(attenuation_factor(&Medium::water(), 2e6, -1e-3).is_err());
    }

    #[test]
    fn water_time_of_flight_at_five_centimetres() {
        let m = Medium::water();
        let tof = time_of_flight(0.05, &m);
        assert!((tof - 67.5676e-6).abs() < 1e-10);
        assert_eq!(time_of_flight(0.10, &m), 2.0 * tof);
        let fast = Medium { sound_speed: 2.0 * m.sound_speed, ..m };
        assert_eq!(time_of_flight(0.05, &fast), tof / 2.0);
    }
}
