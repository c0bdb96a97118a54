use serde::{Deserialize, Serialize};

/// A number paired with an explicit unit, e.g. `{"value": 2.2, "unit": "MHz"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quantity {
    pub value: f64,
    pub unit: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dimension {
    Frequency,
    Capacitance,
    Inductance,
    Resistance,
    Length,
    Area,
    Time,
    Voltage,
    Pressure,
    CapacitancePerPressure,
    Speed,
    Density,
    AttenuationDbPerCm,
    AttenuationNpPerM,
}

impl Dimension {
    fn name(self) -> &'static str {
        match self {
            Self::Frequency => "frequency",
            Self::Capacitance => "capacitance",
            Self::Inductance => "inductance",
            Self::Resistance => "resistance",
            Self::Length => "length",
            Self::Area => "area",
            Self::Time => "time",
            Self::Voltage => "voltage",
            Self::Pressure => "pressure",
            Self::CapacitancePerPressure => "capacitance/pressure",
            Self::Speed => "speed",
            Self::Density => "density",
            Self::AttenuationDbPerCm => "attenuation",
            Self::AttenuationNpPerM => "attenuation",
        }
    }

    /// Factor to the internal unit (SI, except pressure in kPa and
    /// attenuation in dB/cm or Np/m).
    fn factor(self, unit: &str) -> Option<f64> {
        let f = match (self, unit) {
            (Self::Frequency, "Hz") => 1.0,
            (Self::Frequency, "kHz") => 1e3,
            (Self::Frequency, "MHz") => 1e6,
            (Self::Frequency, "GHz") => 1e9,
            (Self::Capacitance, "F") => 1.0,
            (Self::Capacitance, "uF" | "µF") => 1e-6,
            (Self::Capacitance, "nF") => 1e-9,
            (Self::Capacitance, "pF") => 1e-12,
            (Self::Capacitance, "fF") => 1e-15,
            (Self::Inductance, "H") => 1.0,
            (Self::Inductance, "mH") => 1e-3,
            (Self::Inductance, "uH" | "µH") => 1e-6,
            (Self::Inductance, "nH") => 1e-9,
            (Self::Resistance, "ohm" | "Ω") => 1.0,
            (Self::Resistance, "kohm" | "kΩ") => 1e3,
            (Self::Resistance, "Mohm" | "MΩ") => 1e6,
            (Self::Length, "m") => 1.0,
            (Self::Length, "cm") => 1e-2,
            (Self::Length, "mm") => 1e-3,
            (Self::Length, "um" | "µm") => 1e-6,
            (Self::Area, "m2") => 1.0,
            (Self::Area, "cm2") => 1e-4,
            (Self::Area, "mm2") => 1e-6,
            (Self::Time, "s") => 1.0,
            (Self::Time, "ms") => 1e-3,
            (Self::Time, "us" | "µs") => 1e-6,
            (Self::Time, "ns") => 1e-9,
            (Self::Voltage, "V") => 1.0,
            (Self::Voltage, "mV") => 1e-3,
            (Self::Pressure, "kPa") => 1.0,
            (Self::Pressure, "Pa") => 1e-3,
            (Self::Pressure, "MPa") => 1e3,
            (Self::Pressure, "mmHg") => 0.133_322_387_415,
            (Self::CapacitancePerPressure, "F/kPa") => 1.0,
            (Self::CapacitancePerPressure, "pF/kPa") => 1e-12,
            (Self::CapacitancePerPressure, "pF/Pa") => 1e-9,
            (Self::Speed, "m/s") => 1.0,
            (Self::Density, "kg/m3") => 1.0,
            (Self::Density, "g/cm3") => 1e3,
            (Self::AttenuationDbPerCm, "dB/cm") => 1.0,
            (Self::AttenuationDbPerCm, "dB/m") => 1e-2,
            (Self::AttenuationNpPerM, "Np/m") => 1.0,
            (Self::AttenuationNpPerM, "Np/cm") => 1e2,
            _ => return None,
        };
        Some(f)
    }

    pub fn units(self) -> &'static [&'static str] {
        match self {
            Self::Frequency => &["Hz", "kHz", "MHz", "GHz"],
            Self::Capacitance => &["F", "uF", "nF", "pF", "fF"],
            Self::Inductance => &["H", "mH", "uH", "nH"],
            Self::Resistance => &["ohm", "kohm", "Mohm"],
            Self::Length => &["m", "cm", "mm", "um"],
            Self::Area => &["m2", "cm2", "mm2"],
            Self::Time => &["s", "ms", "us", "ns"],
            Self::Voltage => &["V", "mV"],
            Self::Pressure => &["kPa", "Pa", "MPa", "mmHg"],
            Self::CapacitancePerPressure => &["F/kPa", "pF/kPa", "pF/Pa"],
            Self::Speed => &["m/s"],
            Self::Density => &["kg/m3", "g/cm3"],
            Self::AttenuationDbPerCm => &["dB/cm", "dB/m"],
            Self::AttenuationNpPerM => &["Np/m", "Np/cm"],
        }
    }
}

impl Quantity {
    pub fn new(value: f64, unit: &str) -> Self {
        Self {
            value,
            unit: unit.to_string(),
        }
    }

    /// Value in the internal unit, or a message naming `key`.
    pub fn to(&self, dim: Dimension, key: &str) -> Result<f64, String> {
        let factor = dim.factor(&self.unit).ok_or_else(|| {
            format!(
                "{key}.unit: '{}' is not a {} unit (expected one of {})",
                self.unit,
                dim.name(),
                dim.units().join(", ")
            )
        })?;
        if !self.value.is_finite() {
            return Err(format!("{key}.value must be finite"));
        }
        Ok(snap(self.value * factor))
    }
}

/// Round to 15 significant digits so `2.2 MHz` is exactly 2.2e6 Hz.
fn snap(x: f64) -> f64 {
    format!("{x:.14e}").parse().unwrap_or(x)
}
