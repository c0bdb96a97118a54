//! Recover BVD element values (and an optional series parasitic) from a
//! handful of measured frequency anchors.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{bvd_antiresonance, bvd_antiresonance_slope, BvdParams, LoadNetwork};
use crate::error::{Error, Result};
use crate::numeric::nelder_mead;

/// Relative tolerances accepted on the fitted anchors.
pub const SLOPE0_TOL: f64 = 0.10;
pub const SHIFT_TOL: f64 = 0.15;
pub const SLOPE_END_TOL: f64 = 0.25;

pub const DEFAULT_QUALITY_FACTOR: f64 = 30.0;

/// Frequency anchors of the loaded antenna. Slopes are magnitudes in Hz/F.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BvdAnchors {
    pub f_s: f64,
    pub f_a0: f64,
    pub slope0: f64,
    /// Saturation anchors; when absent the fit is the exactly determined
    /// three-anchor solution without a series parasitic.
    pub saturation: Option<SaturationAnchors>,
    pub quality_factor: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaturationAnchors {
    /// Total anti-resonance shift across `span`.
    pub shift_total: f64,
    /// Load capacitance span starting at 0 F.
    pub span: f64,
    pub slope_end: f64,
}

impl BvdAnchors {
    /// Measured antenna anchors: 2.02 MHz acoustic peak, 2.30 MHz
    /// anti-resonance, 236 Hz/pF and 62 Hz/pF end sensitivities and an
    /// 18.56 kHz total shift over 0-120 pF.
    pub fn measured() -> Self {
        Self {
            f_s: 2.02e6,
            f_a0: 2.30e6,
            slope0: 236.0 / 1e-12,
            saturation: Some(SaturationAnchors {
                shift_total: 18.56e3,
                span: 120e-12,
                slope_end: 62.0 / 1e-12,
            }),
            quality_factor: DEFAULT_QUALITY_FACTOR,
        }
    }

    pub fn without_saturation(self) -> Self {
        Self {
            saturation: None,
            ..self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BvdFit {
    pub params: BvdParams,
    /// Open load carrying the fitted `c_series`, if any.
    pub load: LoadNetwork,
    /// Relative errors: slope at 0 F, total shift, slope at span end.
    pub relative_errors: [f64; 3],
}

/// Achieved (slope at 0, total shift, slope at span end), as magnitudes.
pub fn anchor_metrics(params: &BvdParams, load: &LoadNetwork, span: f64) -> (f64, f64, f64) {
    let slope0 = -bvd_antiresonance_slope(params, &load.with_c_load(0.0));
    let shift = bvd_antiresonance(params, &load.with_c_load(0.0)) - bvd_antiresonance(params, &load.with_c_load(span));
    let slope_end = -bvd_antiresonance_slope(params, &load.with_c_load(span));
    (slope0, shift, slope_end)
}

fn params_from(f_s: f64, f_a0: f64, c0: f64, q: f64) -> BvdParams {
    let ratio = (f_a0 / f_s).powi(2) - 1.0;
    let c1 = ratio * c0;
    let l1 = 1.0 / ((2.0 * PI * f_s).powi(2) * c1);
    BvdParams { c0, r1: 1.0, l1, c1 }.with_quality_factor(q)
}

pub fn fit_bvd_from_anchors(anchors: &BvdAnchors) -> Result<BvdFit> {
    let BvdAnchors { f_s, f_a0, slope0, quality_factor, .. } = *anchors;
    let fail = |reason: &str, residuals: Vec<f64>| Error::FitFailure {
        reason: reason.to_string(),
        residuals,
    };
    if !(f_s.is_finite() && f_s > 0.0 && f_a0.is_finite()) {
        return Err(fail("resonance must be finite and positive", vec![f_s, f_a0]));
    }
    if f_a0 <= f_s {
        // C1 = C0((f_a/f_s)² - 1) would be <= 0.
        return Err(fail("anti-resonance must exceed resonance", vec![f_a0 - f_s]));
    }
    if !(slope0.is_finite() && slope0 > 0.0) {
        return Err(fail("sensitivity at 0 F must be a positive magnitude", vec![slope0]));
    }
    if !(quality_factor.is_finite() && quality_factor > 0.0) {
        return Err(fail("quality factor must be positive", vec![quality_factor]));
    }

    // Exactly determined: f_a0 and slope0 fix C0 and C1/C0, f_s fixes L1.
    let c0_exact = (f_a0 * f_a0 - f_s * f_s) / (2.0 * f_a0 * slope0);
    let Some(sat) = anchors.saturation else {
        let params = params_from(f_s, f_a0, c0_exact, quality_factor);
        return Ok(BvdFit {
            params,
            load: LoadNetwork::open(),
            relative_errors: [0.0; 3],
        });
    };

    if !(sat.span > 0.0 && sat.shift_total > 0.0 && sat.slope_end > 0.0) {
        return Err(fail("saturation anchors must be positive", vec![sat.span, sat.shift_total, sat.slope_end]));
    }

    let errors = |c0: f64, cs: f64| -> [f64; 3] {
        let p = params_from(f_s, f_a0, c0, quality_factor);
        let load = LoadNetwork::open().with_c_series(Some(cs));
        let (s0, shift, s1) = anchor_metrics(&p, &load, sat.span);
        [s0 / slope0 - 1.0, shift / sat.shift_total - 1.0, s1 / sat.slope_end - 1.0]
    };
    // Residuals are normalised by their tolerance and combined with a high
    // power norm, a smooth stand-in for minimising the worst one.
    let cost = |x: &[f64]| -> f64 {
        let e = errors(x[0].exp(), x[1].exp());
        [e[0] / SLOPE0_TOL, e[1] / SHIFT_TOL, e[2] / SLOPE_END_TOL]
            .iter()
            .map(|r| r.powi(16))
            .sum()
    };

    // Start from the series capacitance that reproduces the total shift
    // with the exact C0.
    let p0 = params_from(f_s, f_a0, c0_exact, quality_factor);
    let target = (f_a0 - sat.shift_total) / f_s;
    let ceff_end = p0.c1 / (target * target - 1.0) - p0.c0;
    let cs0 = if ceff_end > 0.0 && ceff_end < sat.span {
        ceff_end * sat.span / (sat.span - ceff_end)
    } else {
        sat.span
    };
    let (best, _) = nelder_mead(
        cost,
        &[c0_exact.ln(), cs0.ln()],
        &[0.05, 0.3],
        1e-14,
        5000,
    );
    let (c0, cs) = (best[0].exp(), best[1].exp());
    let e = errors(c0, cs);
    if e[0].abs() > SLOPE0_TOL || e[1].abs() > SHIFT_TOL || e[2].abs() > SLOPE_END_TOL {
        return Err(fail("anchors cannot be met within tolerance", e.to_vec()));
    }
    Ok(BvdFit {
        params: params_from(f_s, f_a0, c0, quality_factor),
        load: LoadNetwork::open().with_c_series(Some(cs)),
        relative_errors: e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent solve of the three-anchor problem: bisection on C0 with
    /// the slope taken by finite differences of the closed form.
    fn three_anchor_oracle(f_s: f64, f_a0: f64, slope0: f64) -> (f64, f64, f64) {
        let slope_at = |c0: f64| {
            let c1 = ((f_a0 / f_s).powi(2) - 1.0) * c0;
            let l1 = 1.0 / ((2.0 * PI * f_s).powi(2) * c1);
            let p = BvdParams { c0, r1: 1.0, l1, c1 };
            let h = 1e-14;
            let fa = |cl: f64| bvd_antiresonance(&p, &LoadNetwork::capacitive(cl));
            ((fa(0.0) - fa(h)) / h, c1, l1)
        };
        let (mut lo, mut hi): (f64, f64) = (1e-12, 1e-6);
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            // slope magnitude falls as C0 grows
            if slope_at(mid).0 > slope0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let c0 = (lo * hi).sqrt();
        let (_, c1, l1) = slope_at(c0);
        (c0, c1, l1)
    }

    #[test]
    fn three_anchor_fit_matches_oracle() {
        let fit = fit_bvd_from_anchors(&BvdAnchors::measured().without_saturation()).unwrap();
        let (c0, c1, l1) = three_anchor_oracle(2.02e6, 2.30e6, 236e12);
        let p = fit.params;
        assert!((p.c0 / c0 - 1.0).abs() < 1e-4, "{} vs {}", p.c0, c0);
        assert!((p.c1 / c1 - 1.0).abs() < 1e-4);
        assert!((p.l1 / l1 - 1.0).abs() < 1e-4);
        // Frozen from the oracle: C0 ≈ 1.114 nF, C1 ≈ 0.330 nF, L1 ≈ 18.8 µH.
        assert!((p.c0 - 1.1142e-9).abs() < 0.001e-9, "{}", p.c0);
        assert!((p.c1 - 0.3303e-9).abs() < 0.001e-9, "{}", p.c1);
        assert!((p.l1 - 18.79e-6).abs() < 0.02e-6, "{}", p.l1);
        assert!((p.series_resonance() - 2.02e6).abs() < 1e-3);
        assert!((bvd_antiresonance(&p, &fit.load) - 2.30e6).abs() < 1e-3);
        assert!((p.quality_factor() - 30.0).abs() < 1e-9);
    }

    #[test]
    fn saturating_fit_meets_tolerances() {
        let fit = fit_bvd_from_anchors(&BvdAnchors::measured()).unwrap();
        let cs = fit.load.c_series.expect("series parasitic fitted");
        assert!(cs > 0.0);
        assert!((bvd_antiresonance(&fit.params, &fit.load) - 2.30e6).abs() < 1e-3);
        let (s0, shift, s1) = anchor_metrics(&fit.params, &fit.load, 120e-12);
        assert!((s0 / 236e12 - 1.0).abs() <= SLOPE0_TOL);
        assert!((shift / 18.56e3 - 1.0).abs() <= SHIFT_TOL);
        assert!((s1 / 62e12 - 1.0).abs() <= SLOPE_END_TOL);
    }

    #[test]
    fn degenerate_anchors_fail() {
        let mut a = BvdAnchors::measured();
        a.f_a0 = a.f_s;
        assert!(matches!(fit_bvd_from_anchors(&a), Err(Error::FitFailure { .. })));
        a.f_a0 = 1.9e6;
        assert!(fit_bvd_from_anchors(&a).is_err());
    }

    #[test]
    fn infeasible_saturation_reports_residuals() {
        let mut a = BvdAnchors::measured();
        a.saturation = Some(SaturationAnchors {
            shift_total: 18.56e3,
            span: 120e-12,
            slope_end: 1.0e12,
        });
        match fit_bvd_from_anchors(&a) {
            Err(Error::FitFailure { residuals, .. }) => assert_eq!(residuals.len(), 3),
            other => panic!("expected fit failure, got {other:?}"),
        }
    }
}
