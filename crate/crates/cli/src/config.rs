use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use puc_core::acoustic::Medium;
use puc_core::circuit::{BvdParams, HalfSpace, LoadNetwork, PiezoStack};
use puc_core::presets;
use puc_core::sweep::{Adc, CalibrationKind, SensorModel, StreamConfig, SweepConfig, SweepMode};
use puc_core::waveform::{BoundaryEcho, InterrogatorBand, LinkScenario, NoiseSpec, Reflector};

use crate::units::{Dimension as D, Quantity};
use crate::CliError;

fn q(value: f64, unit: &str) -> Quantity {
    Quantity::new(value, unit)
}

/// Explicit Butterworth-Van Dyke circuit; absent means the fitted default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitSection {
    pub c0: Quantity,
    pub r1: Quantity,
    pub l1: Quantity,
    pub c1: Quantity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StackSection {
    pub thickness: Quantity,
    pub area: Quantity,
    pub attenuation: Quantity,
    /// `air` or `water`.
    pub backing: String,
}

impl Default for StackSection {
    fn default() -> Self {
        Self {
            thickness: q(presets::PLATE_THICKNESS * 1e3, "mm"),
            area: q(presets::ANTENNA_AREA * 1e6, "mm2"),
            attenuation: q(presets::PIEZO_ATTENUATION, "Np/m"),
            backing: "air".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LoadSection {
    pub c_loads: Vec<Quantity>,
    pub r_load: Option<Quantity>,
    /// Absent: the fitted parasitic when no circuit is given. Zero disables it.
    pub c_series: Option<Quantity>,
}

impl Default for LoadSection {
    fn default() -> Self {
        Self {
            c_loads: [0.0, 30.0, 60.0, 90.0, 120.0].iter().map(|&v| q(v, "pF")).collect(),
            r_load: None,
            c_series: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MediumSection {
    /// `water` or `tissue`; the explicit fields below override it.
    pub preset: String,
    pub sound_speed: Option<Quantity>,
    pub density: Option<Quantity>,
    pub attenuation: Option<Quantity>,
    pub attenuation_ref_freq: Option<Quantity>,
    pub attenuation_exponent: Option<f64>,
}

impl Default for MediumSection {
    fn default() -> Self {
        Self {
            preset: "water".into(),
            sound_speed: None,
            density: None,
            attenuation: None,
            attenuation_ref_freq: None,
            attenuation_exponent: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandSection {
    pub center: Quantity,
    pub fractional_bandwidth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReflectorSection {
    Antenna,
    Flat { gamma: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySection {
    pub distance: Quantity,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkSection {
    pub distance: Quantity,
    /// `null` disables band shaping.
    pub band: Option<BandSection>,
    pub reflector: ReflectorSection,
    pub amplitude_scale: f64,
    pub boundary_echo: Option<BoundarySection>,
}

impl Default for LinkSection {
    fn default() -> Self {
        let b = InterrogatorBand::default();
        Self {
            distance: q(5.0, "cm"),
            band: Some(BandSection {
                center: q(b.center * 1e-6, "MHz"),
                fractional_bandwidth: b.fractional_bandwidth,
            }),
            reflector: ReflectorSection::Antenna,
            amplitude_scale: 1.0,
            boundary_echo: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AdcSection {
    pub bits: u32,
    pub headroom: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DspSection {
    pub sample_rate: Quantity,
    pub filter_order: usize,
    pub filter_cutoff: Quantity,
    pub gate_guard: f64,
    /// `null` keeps the echo analog.
    pub adc: Option<AdcSection>,
}

impl Default for DspSection {
    fn default() -> Self {
        let d = SweepConfig::default();
        let adc = Adc::default();
        Self {
            sample_rate: q(d.sample_rate * 1e-6, "MHz"),
            filter_order: d.filter_order,
            filter_cutoff: q(d.filter_cutoff * 1e-3, "kHz"),
            gate_guard: d.gate_guard,
            adc: Some(AdcSection {
                bits: adc.bits,
                headroom: adc.headroom,
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeName {
    Sequential,
    Chirp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub f_start: Quantity,
    pub f_stop: Quantity,
    pub step: Quantity,
    pub burst_duration: Quantity,
    pub amplitude: Quantity,
    pub sigma_bins: f64,
    pub compensate: bool,
    pub mode: ModeName,
    pub chirp_duration: Quantity,
    /// Burst frequency for the single-echo command.
    pub echo_frequency: Quantity,
}

impl Default for SweepSection {
    fn default() -> Self {
        let d = SweepConfig::default();
        Self {
            f_start: q(d.f_start * 1e-6, "MHz"),
            f_stop: q(d.f_stop * 1e-6, "MHz"),
            step: q(d.step, "Hz"),
            burst_duration: q(d.burst_duration * 1e6, "us"),
            amplitude: q(d.amplitude, "V"),
            sigma_bins: StreamConfig::default().sigma_bins,
            compensate: true,
            mode: ModeName::Sequential,
            chirp_duration: q(1.0, "ms"),
            echo_frequency: q(2.25, "MHz"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImpedanceSection {
    pub f_start: Quantity,
    pub f_stop: Quantity,
    pub step: Quantity,
}

impl Default for ImpedanceSection {
    fn default() -> Self {
        Self {
            f_start: q(1.8, "MHz"),
            f_stop: q(2.8, "MHz"),
            step: q(1.0, "kHz"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorSection {
    pub base_capacitance: Quantity,
    pub sensitivity: Quantity,
    pub knee_pressure: Quantity,
    pub saturation_factor: f64,
    /// Estimates per second in streaming mode.
    pub stream_rate: Quantity,
}

impl Default for SensorSection {
    fn default() -> Self {
        let s = SensorModel::default();
        Self {
            base_capacitance: q(s.base_capacitance * 1e12, "pF"),
            sensitivity: q(s.sensitivity * 1e12, "pF/kPa"),
            knee_pressure: q(s.knee_pressure, "kPa"),
            saturation_factor: s.saturation_factor,
            stream_rate: q(StreamConfig::default().rate, "Hz"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationSection {
    pub order: usize,
    pub kind: CalibrationKind,
    /// Pressure points used when `kind` is `pressure_kpa`.
    pub pressures: Vec<Quantity>,
}

impl Default for CalibrationSection {
    fn default() -> Self {
        Self {
            order: 2,
            kind: CalibrationKind::CapacitancePf,
            pressures: [0.0, 5.0, 10.0, 15.0, 20.0].iter().map(|&v| q(v, "kPa")).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSection {
    /// Echo-gate SNR; absent means noiseless.
    pub snr_db: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub format: Format,
}

/// Complete scenario document. Every section is optional.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub circuit: Option<CircuitSection>,
    pub stack: StackSection,
    pub load: LoadSection,
    pub medium: MediumSection,
    pub link: LinkSection,
    pub dsp: DspSection,
    pub sweep: SweepSection,
    pub impedance: ImpedanceSection,
    pub sensor: SensorSection,
    pub calibration: CalibrationSection,
    pub noise: NoiseSection,
    pub output: OutputSection,
}

/// Configuration converted to library types.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub bvd: BvdParams,
    /// Load network with `c_load = 0`; each entry of `c_loads` replaces it.
    pub base_load: LoadNetwork,
    pub c_loads: Vec<f64>,
    pub scenario: LinkScenario,
    pub sweep: SweepConfig,
    pub stream: StreamConfig,
    pub sensor: SensorModel,
    pub calibration_order: usize,
    pub calibration_kind: CalibrationKind,
    pub calibration_pressures: Vec<f64>,
    pub echo_frequency: f64,
    pub impedance_grid: (f64, f64, f64),
    pub format: Format,
}

fn positive(v: f64, key: &str) -> Result<f64, String> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{key} must be > 0, got {v}"))
    }
}

impl ScenarioConfig {
    /// Parse a JSON document, reporting the offending key path on failure.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut de = serde_json::Deserializer::from_str(text);
        let cfg = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if path == "." {
                CliError::Config(inner.to_string())
            } else {
                CliError::Config(format!("{path}: {inner}"))
            }
        })?;
        de.end().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn sha256(&self) -> String {
        Sha256::digest(self.to_canonical_json().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn resolve(&self) -> Result<Resolved, CliError> {
        self.resolve_inner().map_err(CliError::Config)
    }

    fn resolve_inner(&self) -> Result<Resolved, String> {
        let fitted = presets::fitted_bvd();
        let bvd = match &self.circuit {
            None => fitted.params,
            Some(c) => BvdParams::new(
                c.c0.to(D::Capacitance, "circuit.c0")?,
                c.r1.to(D::Resistance, "circuit.r1")?,
                c.l1.to(D::Inductance, "circuit.l1")?,
                c.c1.to(D::Capacitance, "circuit.c1")?,
            )
            .map_err(|e| format!("circuit: {e}"))?,
        };

        let l = &self.load;
        let c_series = match &l.c_series {
            None if self.circuit.is_none() => fitted.load.c_series,
            None => None,
            Some(c) => match c.to(D::Capacitance, "load.c_series")? {
                v if v == 0.0 => None,
                v => Some(positive(v, "load.c_series")?),
            },
        };
        let r_load = l
            .r_load
            .as_ref()
            .map(|r| r.to(D::Resistance, "load.r_load").and_then(|v| positive(v, "load.r_load")))
            .transpose()?;
        let base_load = LoadNetwork::open().with_c_series(c_series).with_r_load(r_load);
        let mut c_loads = Vec::with_capacity(l.c_loads.len());
        for (i, c) in l.c_loads.iter().enumerate() {
            let key = format!("load.c_loads[{i}]");
            let v = c.to(D::Capacitance, &key)?;
            if v < 0.0 {
                return Err(format!("{key} must be >= 0"));
            }
            c_loads.push(v);
        }
        base_load.validate().map_err(|e| format!("load: {e}"))?;

        let medium = self.resolve_medium()?;
        let st = &self.stack;
        let thickness = positive(st.thickness.to(D::Length, "stack.thickness")?, "stack.thickness")?;
        let area = positive(st.area.to(D::Area, "stack.area")?, "stack.area")?;
        let mut stack: PiezoStack = presets::stack_matched_to_bvd(&bvd, thickness, area);
        stack.piezo.layer.attenuation = st.attenuation.to(D::AttenuationNpPerM, "stack.attenuation")?;
        stack.backing = match st.backing.as_str() {
            "air" => HalfSpace::air(),
            "water" => HalfSpace::water(),
            other => return Err(format!("stack.backing: unknown backing '{other}' (expected air or water)")),
        };
        stack.validate().map_err(|e| format!("stack: {e}"))?;

        let lk = &self.link;
        let band = match &lk.band {
            None => None,
            Some(b) => Some(InterrogatorBand {
                center: b.center.to(D::Frequency, "link.band.center")?,
                fractional_bandwidth: b.fractional_bandwidth,
            }),
        };
        let reflector = match lk.reflector {
            ReflectorSection::Antenna => Reflector::Antenna,
            ReflectorSection::Flat { gamma } => Reflector::Constant { gamma },
        };
        let boundary_echo = match &lk.boundary_echo {
            None => None,
            Some(b) => Some(BoundaryEcho {
                distance: b.distance.to(D::Length, "link.boundary_echo.distance")?,
                gamma: b.gamma,
            }),
        };
        let noise = match (self.noise.snr_db, self.noise.seed) {
            (Some(_), None) => return Err("noise.seed is required when noise.snr_db is set".into()),
            (snr_db, seed) => NoiseSpec {
                snr_db,
                seed: seed.unwrap_or(0),
            },
        };
        let mut scenario = LinkScenario::default_antenna(0.0).with_medium(medium);
        scenario.stack.piezo = stack.piezo;
        scenario.stack.backing = stack.backing;
        scenario.load = base_load.with_c_load(c_loads.first().copied().unwrap_or(0.0));
        scenario.distance = lk.distance.to(D::Length, "link.distance")?;
        scenario.band = band;
        scenario.noise = noise;
        scenario.amplitude_scale = lk.amplitude_scale;
        scenario.reflector = reflector;
        scenario.boundary_echo = boundary_echo;
        scenario.validate().map_err(|e| format!("link: {e}"))?;

        let d = &self.dsp;
        let sw = &self.sweep;
        let sweep = SweepConfig {
            f_start: sw.f_start.to(D::Frequency, "sweep.f_start")?,
            f_stop: sw.f_stop.to(D::Frequency, "sweep.f_stop")?,
            step: sw.step.to(D::Frequency, "sweep.step")?,
            burst_duration: positive(sw.burst_duration.to(D::Time, "sweep.burst_duration")?, "sweep.burst_duration")?,
            amplitude: sw.amplitude.to(D::Voltage, "sweep.amplitude")?,
            sample_rate: positive(d.sample_rate.to(D::Frequency, "dsp.sample_rate")?, "dsp.sample_rate")?,
            filter_order: d.filter_order,
            filter_cutoff: d.filter_cutoff.to(D::Frequency, "dsp.filter_cutoff")?,
            gate_guard: d.gate_guard,
            adc: d.adc.as_ref().map(|a| Adc {
                bits: a.bits,
                headroom: a.headroom,
            }),
        };
        sweep.validate().map_err(|e| format!("sweep: {e}"))?;
        puc_core::lockin::design_lowpass(sweep.filter_order, sweep.filter_cutoff, sweep.sample_rate)
            .map_err(|e| format!("dsp: {e}"))?;

        let mode = match sw.mode {
            ModeName::Sequential => SweepMode::Sequential,
            ModeName::Chirp => SweepMode::Chirp {
                duration: positive(sw.chirp_duration.to(D::Time, "sweep.chirp_duration")?, "sweep.chirp_duration")?,
            },
        };
        let se = &self.sensor;
        let stream = StreamConfig {
            rate: positive(se.stream_rate.to(D::Frequency, "sensor.stream_rate")?, "sensor.stream_rate")?,
            sigma_bins: sw.sigma_bins,
            compensate: sw.compensate,
            mode,
        };
        if !(sw.sigma_bins >= 0.0) {
            return Err("sweep.sigma_bins must be >= 0".into());
        }
        let sensor = SensorModel {
            base_capacitance: se.base_capacitance.to(D::Capacitance, "sensor.base_capacitance")?,
            sensitivity: se.sensitivity.to(D::CapacitancePerPressure, "sensor.sensitivity")?,
            knee_pressure: se.knee_pressure.to(D::Pressure, "sensor.knee_pressure")?,
            saturation_factor: se.saturation_factor,
        };
        sensor.validate().map_err(|e| format!("sensor: {e}"))?;

        let im = &self.impedance;
        let impedance_grid = (
            im.f_start.to(D::Frequency, "impedance.f_start")?,
            im.f_stop.to(D::Frequency, "impedance.f_stop")?,
            im.step.to(D::Frequency, "impedance.step")?,
        );
        if !(impedance_grid.0 > 0.0 && impedance_grid.1 > impedance_grid.0 && impedance_grid.2 > 0.0) {
            return Err("impedance grid needs 0 < f_start < f_stop and step > 0".into());
        }

        let mut calibration_pressures = Vec::new();
        for (i, p) in self.calibration.pressures.iter().enumerate() {
            let key = format!("calibration.pressures[{i}]");
            let v = p.to(D::Pressure, &key)?;
            if v < 0.0 {
                return Err(format!("{key} must be >= 0"));
            }
            calibration_pressures.push(v);
        }

        Ok(Resolved {
            bvd,
            base_load,
            c_loads,
            scenario,
            sweep,
            stream,
            sensor,
            calibration_order: self.calibration.order,
            calibration_kind: self.calibration.kind,
            calibration_pressures,
            echo_frequency: positive(sw.echo_frequency.to(D::Frequency, "sweep.echo_frequency")?, "sweep.echo_frequency")?,
            impedance_grid,
            format: self.output.format,
        })
    }

    fn resolve_medium(&self) -> Result<Medium, String> {
        let m = &self.medium;
        let mut medium = match m.preset.as_str() {
            "water" => Medium::water(),
            "tissue" => Medium::tissue(),
            other => return Err(format!("medium.preset: unknown preset '{other}' (expected water or tissue)")),
        };
        if let Some(v) = &m.sound_speed {
            medium.sound_speed = v.to(D::Speed, "medium.sound_speed")?;
        }
        if let Some(v) = &m.density {
            medium.density = v.to(D::Density, "medium.density")?;
        }
        if let Some(v) = &m.attenuation {
            medium.attenuation_db_per_cm_at_ref = v.to(D::AttenuationDbPerCm, "medium.attenuation")?;
        }
        if let Some(v) = &m.attenuation_ref_freq {
            medium.ref_freq = v.to(D::Frequency, "medium.attenuation_ref_freq")?;
        }
        if let Some(v) = m.attenuation_exponent {
            medium.attenuation_exponent = v;
        }
        medium.validate().map_err(|e| format!("medium: {e}"))?;
        Ok(medium)
    }
}
