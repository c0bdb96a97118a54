use serde::{Deserialize, Serialize};

use crate::acoustic::Medium;
use crate::circuit::{LoadNetwork, PiezoStack};
use crate::error::{domain, Result};
use crate::presets;

/// Interrogator transducer response: Gaussian magnitude, zero phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterrogatorBand {
    pub center: f64,
    /// −3 dB full bandwidth divided by `center`.
    pub fractional_bandwidth: f64,
}

impl Default for InterrogatorBand {
    fn default() -> Self {
        Self {
            center: 2.25e6,
            fractional_bandwidth: 0.6,
        }
    }
}

impl InterrogatorBand {
    /// One-way magnitude response; 1/√2 at `center·(1 ± fbw/2)`.
    pub fn magnitude(&self, f: f64) -> f64 {
        let half = 0.5 * self.fractional_bandwidth * self.center;
        let x = (f - self.center) / half;
        (-0.5 * std::f64::consts::LN_2 * x * x).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseSpec {
    /// Echo-gate SNR in dB; `None` means noiseless.
    pub snr_db: Option<f64>,
    pub seed: u64,
}

/// What sits at the far end of the acoustic path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Reflector {
    /// The loaded piezo antenna.
    Antenna,
    /// Frequency-independent reflector (e.g. a thin metal plate).
    Constant { gamma: f64 },
}

/// Additional delayed copy from a tissue boundary, with its own flat Γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryEcho {
    pub distance: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkScenario {
    pub stack: PiezoStack,
    pub load: LoadNetwork,
    pub medium: Medium,
    pub distance: f64,
    /// `None` disables band shaping.
    pub band: Option<InterrogatorBand>,
    pub noise: NoiseSpec,
    pub amplitude_scale: f64,
    pub reflector: Reflector,
    pub boundary_echo: Option<BoundaryEcho>,
}

impl LinkScenario {
    /// Default antenna in water at 5 cm with the fitted series parasitic.
    pub fn default_antenna(c_load: f64) -> Self {
        let medium = Medium::water();
        let mut stack = presets::default_stack();
        stack.front_medium = medium.half_space();
        Self {
            stack,
            load: presets::fitted_load(c_load),
            medium,
            distance: 0.05,
            band: Some(InterrogatorBand::default()),
            noise: NoiseSpec::default(),
            amplitude_scale: 1.0,
            reflector: Reflector::Antenna,
            boundary_echo: None,
        }
    }

    /// Same path with the antenna replaced by a flat reflector.
    pub fn with_flat_reflector(self, gamma: f64) -> Self {
        Self {
            reflector: Reflector::Constant { gamma },
            ..self
        }
    }

    pub fn with_c_load(mut self, c_load: f64) -> Self {
        self.load.c_load = c_load;
        self
    }

    pub fn with_distance(self, distance: f64) -> Self {
        Self { distance, ..self }
    }

    pub fn with_noise(self, snr_db: Option<f64>, seed: u64) -> Self {
        Self {
            noise: NoiseSpec { snr_db, seed },
            ..self
        }
    }

    pub fn with_medium(mut self, medium: Medium) -> Self {
        self.stack.front_medium = medium.half_space();
        self.medium = medium;
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.stack.validate()?;
        self.load.validate()?;
        self.medium.validate()?;
        if !(self.distance.is_finite() && self.distance > 0.0) {
            return domain(format!("distance must be > 0, got {}", self.distance));
        }
        if let Some(b) = self.band {
            if !(b.center > 0.0 && b.fractional_bandwidth > 0.0 && b.fractional_bandwidth < 2.0) {
                return domain("interrogator band needs center > 0 and fractional bandwidth in (0, 2)");
            }
        }
        if !(self.amplitude_scale.is_finite() && self.amplitude_scale >= 0.0) {
            return domain("amplitude scale must be finite and >= 0");
        }
        if let Some(snr) = self.noise.snr_db {
            if !snr.is_finite() {
                return domain("snr_db must be finite when present");
            }
        }
        if let Some(b) = self.boundary_echo {
            if !(b.distance > 0.0 && b.gamma.abs() <= 1.0) {
                return domain("boundary echo needs distance > 0 and |gamma| <= 1");
            }
        }
        Ok(())
    }
}
