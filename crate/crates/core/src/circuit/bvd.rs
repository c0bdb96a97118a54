use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::LoadNetwork;
use crate::error::{check_frequency, domain, Result};

/// Four-element Butterworth-Van Dyke resonator: clamped capacitance `c0` in
/// parallel with the motional branch `r1`-`l1`-`c1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BvdParams {
    pub c0: f64,
    pub r1: f64,
    pub l1: f64,
    pub c1: f64,
}

impl BvdParams {
    pub fn new(c0: f64, r1: f64, l1: f64, c1: f64) -> Result<Self> {
        let p = Self { c0, r1, l1, c1 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c0", self.c0), ("r1", self.r1), ("l1", self.l1), ("c1", self.c1)] {
            if !(v.is_finite() && v > 0.0) {
                return domain(format!("BVD {name} must be finite and > 0, got {v}"));
            }
        }
        Ok(())
    }

    /// Motional (series) resonance 1/(2π√(L1·C1)).
    pub fn series_resonance(&self) -> f64 {
        1.0 / (2.0 * PI * (self.l1 * self.c1).sqrt())
    }

    /// Quality factor of the motional branch at series resonance.
    pub fn quality_factor(&self) -> f64 {
        2.0 * PI * self.series_resonance() * self.l1 / self.r1
    }

    /// Same motional branch with R1 set from a target quality factor.
    pub fn with_quality_factor(self, q: f64) -> Self {
        let r1 = 2.0 * PI * self.series_resonance() * self.l1 / q;
        Self { r1, ..self }
    }
}

/// Impedance of the motional branch, C0 and the load network, all in parallel.
pub fn bvd_impedance(params: &BvdParams, load: &LoadNetwork, f: f64) -> Result<Complex64> {
    check_frequency(f)?;
    let omega = 2.0 * PI * f;
    let j = Complex64::i();
    let z_motional = params.r1 + j * (omega * params.l1 - 1.0 / (omega * params.c1));
    let y = j * omega * params.c0 + 1.0 / z_motional + load.admittance(omega);
    Ok(1.0 / y)
}

/// Lossless anti-resonance f_s·√(1 + C1/(C0 + C_eff)).
///
/// R1 and `r_load` are ignored.
pub fn bvd_antiresonance(params: &BvdParams, load: &LoadNetwork) -> f64 {
    let ceff = load.effective_capacitance();
    params.series_resonance() * (1.0 + params.c1 / (params.c0 + ceff)).sqrt()
}

/// Analytic d f_a / d c_load (Hz/F, negative).
pub fn bvd_antiresonance_slope(params: &BvdParams, load: &LoadNetwork) -> f64 {
    let ceff = load.effective_capacitance();
    let ctot = params.c0 + ceff;
    let ratio = params.c1 / ctot;
    let dfa_dceff = -params.series_resonance() * params.c1 / (2.0 * ctot * ctot * (1.0 + ratio).sqrt());
    dfa_dceff * load.effective_capacitance_slope()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference() -> BvdParams {
        BvdParams::new(1e-9, 10.0, 20.7e-6, 0.297e-9).unwrap()
    }

    #[test]
    fn rejects_non_positive_elements() {
        assert!(BvdParams::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(BvdParams::new(1.0, f64::NAN, 1.0, 1.0).is_err());
    }

    #[test]
    fn rejects_bad_frequency() {
        let p = reference();
        let load = LoadNetwork::open();
        assert!(bvd_impedance(&p, &load, 0.0).is_err());
        assert!(bvd_impedance(&p, &load, f64::INFINITY).is_err());
        assert!(bvd_impedance(&p, &load, -1.0).is_err());
    }

    #[test]
    fn high_frequency_impedance_vanishes() {
        let p = reference();
        let z = bvd_impedance(&p, &LoadNetwork::open(), 1e12).unwrap();
        assert!(z.norm() < 1e-3);
    }

    #[test]
    fn lossless_series_resonance_is_a_short() {
        let p = BvdParams { r1: 1e-9, ..reference() };
        let z = bvd_impedance(&p, &LoadNetwork::open(), p.series_resonance()).unwrap();
        assert!(z.norm() < 1e-6);
    }

    #[test]
    fn reference_closed_form_values() {
        let p = reference();
        let fs = p.series_resonance();
        assert!((fs - 2.030e6).abs() < 1e3, "fs = {fs}");
        let fa = bvd_antiresonance(&p, &LoadNetwork::open());
        assert!((fa - fs * (1.0f64 + 0.297).sqrt()).abs() < 1e-6);
        assert!((fa - 2.312e6).abs() < 1e3, "fa = {fa}");
    }

    #[test]
    fn reference_numeric_peak_matches_closed_form() {
        // 10 Hz grid argmax around the closed-form anti-resonance.
        let p = reference();
        let load = LoadNetwork::open();
        let fa = bvd_antiresonance(&p, &load);
        let (mut best_f, mut best) = (0.0, 0.0);
        let mut f = 2.25e6;
        while f < 2.37e6 {
            let m = bvd_impedance(&p, &load, f).unwrap().norm();
            if m > best {
                best = m;
                best_f = f;
            }
            f += 10.0;
        }
        // R1 = 10 Ω (Q ≈ 26) pulls the lossy peak ~4 kHz above the lossless value.
        assert!((best_f - fa).abs() < 5e3, "grid {best_f} vs closed {fa}");
        assert!(best_f > fa);

        let lossless = BvdParams { r1: 1e-3, ..p };
        let (mut best_f, mut best) = (0.0, 0.0);
        let mut f = fa - 2e3;
        while f < fa + 2e3 {
            let m = bvd_impedance(&lossless, &load, f).unwrap().norm();
            if m > best {
                best = m;
                best_f = f;
            }
            f += 10.0;
        }
        assert!((best_f - fa).abs() <= 10.0, "grid {best_f} vs closed {fa}");
    }

    #[test]
    fn real_part_is_non_negative() {
        let p = reference();
        let load = LoadNetwork::capacitive(50e-12).with_r_load(Some(3.3e3));
        let mut f = 1.0e6;
        while f < 3.5e6 {
            assert!(bvd_impedance(&p, &load, f).unwrap().re >= 0.0);
            f += 1.7e3;
        }
    }

    #[test]
    fn slope_matches_finite_difference() {
        let p = reference();
        for cs in [None, Some(270e-12)] {
            for cl in [0.0, 40e-12, 120e-12] {
                let load = LoadNetwork::capacitive(cl).with_c_series(cs);
                let h = 1e-15;
                let lo = bvd_antiresonance(&p, &load.with_c_load((cl - h).max(0.0)));
                let hi = bvd_antiresonance(&p, &load.with_c_load(cl + h));
                let fd = (hi - lo) / (cl + h - (cl - h).max(0.0));
                let an = bvd_antiresonance_slope(&p, &load);
                assert!(((fd - an) / an).abs() < 1e-3, "fd {fd} an {an}");
            }
        }
    }
}
