//! Thickness-mode plate model: the piezo layer and its acoustic terminations
//! are lossy transmission lines, coupled to the electrical port through an
//! ideal electromechanical transformer. Everything is evaluated as
//! frequency-domain two-port algebra.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::LoadNetwork;
use crate::error::{check_frequency, domain, Result};

pub const VACUUM_PERMITTIVITY: f64 = 8.854_187_812_8e-12;

/// Every line carries at least this much attenuation (Np/m).
pub const MIN_LINE_LOSS: f64 = 1e-3;

/// Finite acoustic layer of uniform cross-section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AcousticLayer {
    pub thickness: f64,
    pub density: f64,
    pub sound_speed: f64,
    /// Attenuation in Np/m at `attenuation_ref_freq`.
    pub attenuation: f64,
    pub attenuation_ref_freq: f64,
    pub attenuation_exponent: f64,
    pub area: f64,
}

impl AcousticLayer {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("thickness", self.thickness),
            ("density", self.density),
            ("sound_speed", self.sound_speed),
            ("attenuation_ref_freq", self.attenuation_ref_freq),
            ("area", self.area),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return domain(format!("layer {name} must be finite and > 0, got {v}"));
            }
        }
        if !(self.attenuation.is_finite() && self.attenuation >= 0.0) {
            return domain(format!("layer attenuation must be >= 0, got {}", self.attenuation));
        }
        if !self.attenuation_exponent.is_finite() {
            return domain("layer attenuation exponent must be finite");
        }
        Ok(())
    }

    /// Characteristic impedance ρ·v·A (mechanical, N·s/m).
    pub fn characteristic_impedance(&self) -> f64 {
        self.density * self.sound_speed * self.area
    }

    pub fn attenuation_at(&self, f: f64) -> f64 {
        let a = self.attenuation * (f / self.attenuation_ref_freq).powf(self.attenuation_exponent);
        a.max(MIN_LINE_LOSS)
    }

    /// Complex propagation constant times thickness.
    pub fn propagation(&self, f: f64) -> Complex64 {
        let omega = 2.0 * PI * f;
        Complex64::new(self.attenuation_at(f), omega / self.sound_speed) * self.thickness
    }

    pub fn abcd(&self, f: f64) -> Abcd {
        Abcd::line(self.characteristic_impedance(), self.propagation(f))
    }
}

/// Semi-infinite propagation medium bounding the stack.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace {
    pub density: f64,
    pub sound_speed: f64,
}

impl HalfSpace {
    pub fn air() -> Self {
        Self {
            density: 1.2,
            sound_speed: 343.0,
        }
    }

    pub fn water() -> Self {
        Self {
            density: 1000.0,
            sound_speed: 1480.0,
        }
    }

    /// Mechanical radiation impedance over `area`.
    pub fn impedance(&self, area: f64) -> f64 {
        self.density * self.sound_speed * area
    }
}

/// Piezo plate: a lossy line plus thickness coupling and clamped permittivity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PiezoLayer {
    pub layer: AcousticLayer,
    pub coupling_kt: f64,
    pub permittivity_clamped: f64,
}

impl PiezoLayer {
    pub fn clamped_capacitance(&self) -> f64 {
        self.permittivity_clamped * self.layer.area / self.layer.thickness
    }

    /// Half-wave (open-circuit) frequency v/(2t).
    pub fn half_wave_frequency(&self) -> f64 {
        self.layer.sound_speed / (2.0 * self.layer.thickness)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiezoStack {
    pub piezo: PiezoLayer,
    pub backing: HalfSpace,
    /// Layers between the plate's front face and the medium, listed from the plate outwards.
    #[serde(default)]
    pub front_layers: Vec<AcousticLayer>,
    pub front_medium: HalfSpace,
}

impl PiezoStack {
    pub fn validate(&self) -> Result<()> {
        self.piezo.layer.validate()?;
        let k = self.piezo.coupling_kt;
        if !(0.0..1.0).contains(&k) {
            return domain(format!("coupling k_t must lie in [0, 1), got {k}"));
        }
        if !(self.piezo.permittivity_clamped.is_finite() && self.piezo.permittivity_clamped > 0.0) {
            return domain("clamped permittivity must be > 0");
        }
        for hs in [self.backing, self.front_medium] {
            if !(hs.density > 0.0 && hs.sound_speed > 0.0) {
                return domain("half-space density and sound speed must be > 0");
            }
        }
        for l in &self.front_layers {
            l.validate()?;
        }
        Ok(())
    }

    pub fn area(&self) -> f64 {
        self.piezo.layer.area
    }

    pub fn clamped_capacitance(&self) -> f64 {
        self.piezo.clamped_capacitance()
    }

    /// Radiation impedance of the front medium over the plate area.
    pub fn medium_impedance(&self) -> f64 {
        self.front_medium.impedance(self.area())
    }

    /// Mechanical load on the plate's front face: the front layers
    /// terminated by the medium.
    fn front_load(&self, f: f64) -> Complex64 {
        let z_med = Complex64::new(self.medium_impedance(), 0.0);
        let mut chain = Abcd::identity();
        for layer in &self.front_layers {
            chain = chain.cascade(&layer.abcd(f));
        }
        chain.input_impedance(z_med)
    }

    fn network(&self, f: f64) -> PlateNetwork {
        let layer = &self.piezo.layer;
        let zc = layer.characteristic_impedance();
        let gamma_d = layer.propagation(f);
        let c0 = self.clamped_capacitance();
        let k2 = self.piezo.coupling_kt.powi(2);
        PlateNetwork {
            omega: 2.0 * PI * f,
            c0,
            arm: zc * (gamma_d / 2.0).tanh(),
            shunt: zc / gamma_d.sinh(),
            // N² = k_t² C0 Zc v / t
            turns_sq: k2 * c0 * zc * layer.sound_speed / layer.thickness,
            back: Complex64::new(self.backing.impedance(self.area()), 0.0),
        }
    }
}

struct PlateNetwork {
    omega: f64,
    c0: f64,
    arm: Complex64,
    shunt: Complex64,
    turns_sq: f64,
    back: Complex64,
}

fn parallel(a: Complex64, b: Complex64) -> Complex64 {
    a * b / (a + b)
}

/// Electrical input impedance of the loaded plate in parallel with `load`.
pub fn leach_input_impedance(stack: &PiezoStack, load: &LoadNetwork, f: f64) -> Result<Complex64> {
    check_frequency(f)?;
    let net = stack.network(f);
    let j = Complex64::i();
    let y_c0 = j * net.omega * net.c0;
    let front = stack.front_load(f);
    let z_mech = net.shunt + parallel(net.arm + net.back, net.arm + front);
    // Transformer branch seen from the electrical side, written as an
    // admittance so that k_t = 0 reduces exactly to the bare capacitor.
    let y_motional = net.turns_sq / (z_mech - net.turns_sq / y_c0);
    let z = 1.0 / (y_c0 + y_motional + load.admittance(net.omega));
    finite_or_err(z)
}

/// Mechanical impedance looking into the stack from the medium, with the
/// electrical port terminated by `load`.
pub fn front_face_impedance(stack: &PiezoStack, load: &LoadNetwork, f: f64) -> Result<Complex64> {
    check_frequency(f)?;
    let net = stack.network(f);
    let j = Complex64::i();
    let y_c0 = j * net.omega * net.c0;
    let y_load = load.admittance(net.omega);
    // Series -C0 followed by C0 ∥ load, reflected through the transformer.
    let z_elec = -y_load / (y_c0 * (y_c0 + y_load));
    let z_center = parallel(net.arm + net.back, net.shunt + net.turns_sq * z_elec);
    let mut z = net.arm + z_center;
    for layer in stack.front_layers.iter() {
        z = layer.abcd(f).input_impedance(z);
    }
    finite_or_err(z)
}

fn finite_or_err(z: Complex64) -> Result<Complex64> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(crate::Error::Numerical(format!("non-finite impedance {z}")))
    }
}

/// Chain matrix of a reciprocal two-port.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abcd {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Abcd {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self { a: one, b: zero, c: zero, d: one }
    }

    /// Uniform line with characteristic impedance `zc` and electrical length `gamma_l`.
    pub fn line(zc: f64, gamma_l: Complex64) -> Self {
        let (ch, sh) = (gamma_l.cosh(), gamma_l.sinh());
        Self {
            a: ch,
            b: sh * zc,
            c: sh / zc,
            d: ch,
        }
    }

    pub fn cascade(&self, next: &Abcd) -> Abcd {
        Abcd {
            a: self.a * next.a + self.b * next.c,
            b: self.a * next.b + self.b * next.d,
            c: self.c * next.a + self.d * next.c,
            d: self.c * next.b + self.d * next.d,
        }
    }

    pub fn input_impedance(&self, z_load: Complex64) -> Complex64 {
        (self.a * z_load + self.b) / (self.c * z_load + self.d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plate(kt: f64) -> PiezoStack {
        PiezoStack {
            piezo: PiezoLayer {
                layer: AcousticLayer {
                    thickness: 1e-3,
                    density: 7600.0,
                    sound_speed: 4600.0,
                    attenuation: 0.0,
                    attenuation_ref_freq: 2.3e6,
                    attenuation_exponent: 1.0,
                    area: 35e-6,
                },
                coupling_kt: kt,
                permittivity_clamped: 3000.0 * VACUUM_PERMITTIVITY,
            },
            backing: HalfSpace::air(),
            front_layers: Vec::new(),
            front_medium: HalfSpace::water(),
        }
    }

    #[test]
    fn decoupled_plate_is_its_capacitance() {
        let s = plate(0.0);
        let c0 = s.clamped_capacitance();
        for f in [0.5e6, 2.3e6, 4.1e6] {
            let z = leach_input_impedance(&s, &LoadNetwork::open(), f).unwrap();
            let expect = 1.0 / (Complex64::i() * 2.0 * PI * f * c0);
            assert!((z - expect).norm() <= 1e-12 * expect.norm());
        }
    }

    #[test]
    fn line_abcd_is_reciprocal() {
        let m = Abcd::line(33.0, Complex64::new(0.02, 1.3));
        let det = m.a * m.d - m.b * m.c;
        assert!((det - 1.0).norm() < 1e-12);
    }

    #[test]
    fn matched_line_input_is_characteristic() {
        let m = Abcd::line(5.0, Complex64::new(0.1, 2.0));
        let z = m.input_impedance(Complex64::new(5.0, 0.0));
        assert!((z - 5.0).norm() < 1e-12);
    }

    #[test]
    fn loss_floor_keeps_lossless_pole_finite() {
        let s = plate(0.5);
        let f = s.piezo.half_wave_frequency();
        let mut vac = s.clone();
        vac.front_medium = HalfSpace { density: 1e-9, sound_speed: 1.0 };
        vac.backing = vac.front_medium;
        let z = leach_input_impedance(&vac, &LoadNetwork::open(), f).unwrap();
        assert!(z.norm().is_finite());
        let z = leach_input_impedance(&vac, &LoadNetwork::open(), 2.0 * f).unwrap();
        assert!(z.norm().is_finite());
    }

    #[test]
    fn rejects_invalid_stack() {
        let mut s = plate(1.2);
        assert!(s.validate().is_err());
        s.piezo.coupling_kt = 0.5;
        assert!(s.validate().is_ok());
        s.piezo.layer.thickness = 0.0;
        assert!(s.validate().is_err());
    }
}
