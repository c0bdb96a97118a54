use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Fraction of the data span added on each side of the calibrated domain.
pub const DOMAIN_MARGIN: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationKind {
    CapacitancePf,
    PressureKpa,
}

/// Polynomial `value(x)` in the normalised frequency
/// `x = (f − mid) / half` of the domain `[f_min, f_max]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationCurve {
    pub kind: CalibrationKind,
    pub order: usize,
    /// Ascending powers of `x`.
    pub coeffs: Vec<f64>,
    pub domain: [f64; 2],
    pub residual_rms: f64,
}

impl CalibrationCurve {
    fn normalise(&self, f: f64) -> (f64, f64) {
        let mid = 0.5 * (self.domain[0] + self.domain[1]);
        let half = 0.5 * (self.domain[1] - self.domain[0]);
        ((f - mid) / half, half)
    }

    pub fn contains(&self, f: f64) -> bool {
        f >= self.domain[0] && f <= self.domain[1]
    }

    pub fn evaluate(&self, f: f64) -> Result<f64> {
        if !self.contains(f) {
            return Err(Error::Boundary(format!(
                "{f:.1} Hz is outside the calibrated domain [{:.1}, {:.1}] Hz",
                self.domain[0], self.domain[1]
            )));
        }
        let (x, _) = self.normalise(f);
        Ok(self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c))
    }

    /// d value / d f, in value units per Hz.
    pub fn derivative(&self, f: f64) -> f64 {
        let (x, half) = self.normalise(f);
        let d = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (k, c)| acc * x + k as f64 * c);
        d / half
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 1 || self.coeffs.len() != self.order + 1 {
            return domain("calibration needs order >= 1 and order + 1 coefficients");
        }
        if !(self.domain[1] > self.domain[0]) {
            return domain("calibration domain must be increasing");
        }
        Ok(())
    }
}

/// Least-squares polynomial `value(f)` through `(f_valley, value)` points.
pub fn fit_calibration(points: &[(f64, f64)], order: usize, kind: CalibrationKind) -> Result<CalibrationCurve> {
    if order < 1 {
        return domain("calibration order must be >= 1");
    }
    let mut freqs: Vec<f64> = points.iter().map(|p| p.0).collect();
    freqs.sort_by(f64::total_cmp);
    freqs.dedup();
    if freqs.len() < order + 1 {
        return Err(Error::FitFailure {
            reason: format!("{} distinct frequencies cannot determine an order-{order} polynomial", freqs.len()),
            residuals: vec![],
        });
    }
    let (lo, hi) = (freqs[0], freqs[freqs.len() - 1]);
    let pad = DOMAIN_MARGIN * (hi - lo);
    let mut curve = CalibrationCurve {
        kind,
        order,
        coeffs: vec![0.0; order + 1],
        domain: [lo - pad, hi + pad],
        residual_rms: 0.0,
    };

    // normal equations in the normalised variable
    let m = order + 1;
    let mut ata = vec![vec![0.0; m]; m];
    let mut aty = vec![0.0; m];
    for &(f, y) in points {
        let (x, _) = curve.normalise(f);
        let powers: Vec<f64> = (0..m).map(|k| x.powi(k as i32)).collect();
        for r in 0..m {
            aty[r] += powers[r] * y;
            for c in 0..m {
                ata[r][c] += powers[r] * powers[c];
            }
        }
    }
    curve.coeffs = solve(ata, aty).ok_or_else(|| Error::FitFailure {
        reason: "calibration system is rank deficient".into(),
        residuals: vec![],
    })?;
    let residuals: Vec<f64> = points
        .iter()
        .map(|&(f, y)| curve.evaluate(f).map(|v| v - y))
        .collect::<Result<_>>()?;
    curve.residual_rms = (residuals.iter().map(|r| r * r).sum::<f64>() / residuals.len() as f64).sqrt();
    Ok(curve)
}

fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let k = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= k * a[col][c];
            }
            b[row] -= k * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    Some(x)
}
