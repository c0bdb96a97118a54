use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Electrical termination on the sensor side of the antenna.
///
/// `c_load` and the optional `r_load` sit in parallel; the optional
/// `c_series` models an interconnect capacitance between the antenna
/// terminals and that parallel pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoadNetwork {
    pub c_load: f64,
    #[serde(default)]
    pub r_load: Option<f64>,
    #[serde(default)]
    pub c_series: Option<f64>,
}

impl Default for LoadNetwork {
    fn default() -> Self {
        Self::open()
    }
}

impl LoadNetwork {
    pub fn open() -> Self {
        Self {
            c_load: 0.0,
            r_load: None,
            c_series: None,
        }
    }

    pub fn capacitive(c_load: f64) -> Self {
        Self {
            c_load,
            ..Self::open()
        }
    }

    pub fn with_c_load(self, c_load: f64) -> Self {
        Self { c_load, ..self }
    }

    pub fn with_r_load(self, r_load: Option<f64>) -> Self {
        Self { r_load, ..self }
    }

    pub fn with_c_series(self, c_series: Option<f64>) -> Self {
        Self { c_series, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c_load.is_finite() && self.c_load >= 0.0) {
            return domain(format!("c_load must be >= 0, got {}", self.c_load));
        }
        if let Some(r) = self.r_load {
            if !(r.is_finite() && r > 0.0) {
                return domain(format!("r_load must be > 0, got {r}"));
            }
        }
        if let Some(cs) = self.c_series {
            if !(cs.is_finite() && cs > 0.0) {
                return domain(format!("c_series must be > 0, got {cs}"));
            }
        }
        Ok(())
    }

    /// Capacitance seen at the antenna terminals, ignoring `r_load`.
    pub fn effective_capacitance(&self) -> f64 {
        match self.c_series {
            Some(cs) if self.c_load > 0.0 => cs * self.c_load / (cs + self.c_load),
            _ => self.c_load,
        }
    }

    /// d(C_eff)/d(c_load).
    pub fn effective_capacitance_slope(&self) -> f64 {
        match self.c_series {
            Some(cs) => (cs / (cs + self.c_load)).powi(2),
            None => 1.0,
        }
    }

    /// Admittance of the network at angular frequency `omega`.
    pub fn admittance(&self, omega: f64) -> Complex64 {
        let j = Complex64::i();
        let parallel = j * omega * self.c_load + self.r_load.map_or(0.0, |r| 1.0 / r);
        if parallel == Complex64::new(0.0, 0.0) {
            return parallel;
        }
        match self.c_series {
            None => parallel,
            Some(cs) => 1.0 / (1.0 / (j * omega * cs) + 1.0 / parallel),
        }
    }
}
