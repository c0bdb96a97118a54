use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// One second-order section, `a0` normalised to 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Biquad {
    pub b: [f64; 3],
    /// `[a1, a2]`.
    pub a: [f64; 2],
}

impl Biquad {
    pub fn response(&self, z_inv: Complex64) -> Complex64 {
        let z2 = z_inv * z_inv;
        (self.b[0] + self.b[1] * z_inv + self.b[2] * z2) / (1.0 + self.a[0] * z_inv + self.a[1] * z2)
    }

    /// Largest pole radius.
    pub fn pole_radius(&self) -> f64 {
        let [a1, a2] = self.a;
        let disc = Complex64::new(a1 * a1 - 4.0 * a2, 0.0).sqrt();
        let p1 = (-a1 + disc) / 2.0;
        let p2 = (-a1 - disc) / 2.0;
        p1.norm().max(p2.norm())
    }
}

/// Butterworth low-pass as a cascade of biquads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterSpec {
    pub order: usize,
    pub cutoff: f64,
    pub sample_rate: f64,
    pub sections: Vec<Biquad>,
}

pub const DEFAULT_CUTOFF: f64 = 200e3;
pub const DEFAULT_ORDER: usize = 4;

/// Bilinear-transform Butterworth with the cutoff prewarped.
pub fn design_lowpass(order: usize, cutoff: f64, sample_rate: f64) -> Result<FilterSpec> {
    if order == 0 || order % 2 != 0 {
        return domain(format!("filter order must be even and > 0, got {order}"));
    }
    if !(sample_rate > 0.0 && cutoff > 0.0 && cutoff < sample_rate / 2.0) {
        return domain(format!(
            "cutoff {cutoff:.3e} Hz must lie in (0, {:.3e}) Hz",
            sample_rate / 2.0
        ));
    }
    let k = (PI * cutoff / sample_rate).tan();
    let sections = (0..order / 2)
        .map(|i| {
            let q = 1.0 / (2.0 * ((2 * i + 1) as f64 * PI / (2 * order) as f64).sin());
            let norm = 1.0 / (1.0 + k / q + k * k);
            let b0 = k * k * norm;
            Biquad {
                b: [b0, 2.0 * b0, b0],
                a: [2.0 * (k * k - 1.0) * norm, (1.0 - k / q + k * k) * norm],
            }
        })
        .collect();
    Ok(FilterSpec {
        order,
        cutoff,
        sample_rate,
        sections,
    })
}

impl FilterSpec {
    pub fn response(&self, f: f64) -> Complex64 {
        let z_inv = Complex64::from_polar(1.0, -2.0 * PI * f / self.sample_rate);
        self.sections.iter().map(|s| s.response(z_inv)).product()
    }

    pub fn gain_db(&self, f: f64) -> f64 {
        20.0 * self.response(f).norm().log10()
    }

    pub fn is_stable(&self) -> bool {
        self.sections.iter().all(|s| s.pole_radius() < 1.0)
    }

    /// Group delay at DC in seconds.
    pub fn dc_group_delay(&self) -> f64 {
        let samples: f64 = self
            .sections
            .iter()
            .map(|s| {
                let num = (s.b[1] + 2.0 * s.b[2]) / (s.b[0] + s.b[1] + s.b[2]);
                let den = (s.a[0] + 2.0 * s.a[1]) / (1.0 + s.a[0] + s.a[1]);
                num - den
            })
            .sum();
        samples / self.sample_rate
    }

    /// Zero-initial-state filtering, transposed direct form II per section.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        for s in &self.sections {
            let (mut z1, mut z2) = (0.0, 0.0);
            for v in y.iter_mut() {
                let input = *v;
                let out = s.b[0] * input + z1;
                z1 = s.b[1] * input - s.a[0] * out + z2;
                z2 = s.b[2] * input - s.a[1] * out;
                *v = out;
            }
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lpf() -> FilterSpec {
        design_lowpass(4, 200e3, 50e6).unwrap()
    }

    #[test]
    fn butterworth_magnitude_points() {
        let h = lpf();
        assert!((h.response(0.0).norm() - 1.0).abs() < 1e-12);
        assert!((h.gain_db(200e3) + 3.0103).abs() < 0.05);
        // 1/√(1 + 2⁸) for a 4th-order Butterworth one octave above cutoff
        let expect = -10.0 * (1.0 + 256f64).log10();
        assert!((h.gain_db(400e3) - expect).abs() < 0.2, "{}", h.gain_db(400e3));
    }

    #[test]
    fn sections_are_stable() {
        for fc in [1e3, 200e3, 5e6, 24e6] {
            assert!(design_lowpass(4, fc, 50e6).unwrap().is_stable());
        }
        assert!(design_lowpass(6, 200e3, 50e6).unwrap().is_stable());
    }

    #[test]
    fn invalid_designs_are_rejected() {
        assert!(design_lowpass(4, 25e6, 50e6).is_err());
        assert!(design_lowpass(3, 200e3, 50e6).is_err());
        assert!(design_lowpass(4, 0.0, 50e6).is_err());
    }

    #[test]
    fn step_settles_to_unity_and_delay_matches_phase_slope() {
        let h = lpf();
        let y = h.apply(&vec![1.0; 20_000]);
        assert!((y.last().unwrap() - 1.0).abs() < 1e-9);
        let df = 10.0;
        let phase = h.response(df).arg();
        let numeric = -phase / (2.0 * PI * df);
        assert!((numeric - h.dc_group_delay()).abs() < 1e-9 * h.dc_group_delay().max(1.0) + 1e-12);
    }

    #[test]
    fn coefficients_dump_to_json() {
        let json = serde_json::to_string(&lpf()).unwrap();
        let back: FilterSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, lpf());
    }
}
