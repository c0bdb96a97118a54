//! Rayleigh-Sommerfeld field of a uniformly vibrating rectangular piston.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Medium;
use crate::error::{domain, Error, Result};
use crate::numeric::par_map;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectAperture {
    pub width_x: f64,
    pub width_y: f64,
}

/// Lateral sample points at a fixed depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub depth: f64,
}

impl FieldGrid {
    /// Square grid of `n × n` points spaced `step`, centred on the axis.
    pub fn centered(n: usize, step: f64, depth: f64) -> Self {
        let half = (n as f64 - 1.0) / 2.0;
        let axis: Vec<f64> = (0..n).map(|i| (i as f64 - half) * step).collect();
        Self {
            xs: axis.clone(),
            ys: axis,
            depth,
        }
    }
}

/// Pressure magnitudes normalised to the grid maximum, row-major in y.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldMap {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub depth: f64,
    pub pressure: Vec<f64>,
}

impl FieldMap {
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.pressure[iy * self.xs.len() + ix]
    }

    /// Profile along x through the row closest to y = 0.
    pub fn profile_x(&self) -> (Vec<f64>, Vec<f64>) {
        let iy = nearest_zero(&self.ys);
        (self.xs.clone(), (0..self.xs.len()).map(|ix| self.at(ix, iy)).collect())
    }

    /// Profile along y through the column closest to x = 0.
    pub fn profile_y(&self) -> (Vec<f64>, Vec<f64>) {
        let ix = nearest_zero(&self.xs);
        (self.ys.clone(), (0..self.ys.len()).map(|iy| self.at(ix, iy)).collect())
    }
}

fn nearest_zero(v: &[f64]) -> usize {
    (0..v.len()).min_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())).unwrap_or(0)
}

/// Midpoint-rule Rayleigh integral Σ e^{-jkr}/r dA over the aperture.
///
/// `element_size` is the requested quadrature cell edge; it must not exceed
/// a quarter wavelength.
pub fn piston_field(
    aperture: &RectAperture,
    medium: &Medium,
    f: f64,
    grid: &FieldGrid,
    element_size: f64,
) -> Result<FieldMap> {
    if !(aperture.width_x > 0.0 && aperture.width_y > 0.0) {
        return domain("aperture dimensions must be > 0");
    }
    if !(grid.depth > 0.0) {
        return domain("field depth must be > 0");
    }
    let lambda = medium.wavelength(f);
    if !(element_size > 0.0) || element_size > lambda / 4.0 {
        return Err(Error::Refinement(format!(
            "quadrature element {element_size:.3e} m exceeds λ/4 = {:.3e} m",
            lambda / 4.0
        )));
    }
    let k = 2.0 * PI / lambda;
    let nx = (aperture.width_x / element_size).ceil() as usize;
    let ny = (aperture.width_y / element_size).ceil() as usize;
    let (dx, dy) = (aperture.width_x / nx as f64, aperture.width_y / ny as f64);
    let sources: Vec<(f64, f64)> = (0..ny)
        .flat_map(|j| {
            (0..nx).map(move |i| {
                (
                    -aperture.width_x / 2.0 + (i as f64 + 0.5) * dx,
                    -aperture.width_y / 2.0 + (j as f64 + 0.5) * dy,
                )
            })
        })
        .collect();

    let points: Vec<(f64, f64)> = grid
        .ys
        .iter()
        .flat_map(|&y| grid.xs.iter().map(move |&x| (x, y)))
        .collect();
    let z2 = grid.depth * grid.depth;
    let raw = par_map(&points, |_, &(x, y)| {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(sx, sy) in &sources {
            let r = ((x - sx).powi(2) + (y - sy).powi(2) + z2).sqrt();
            acc += Complex64::from_polar(1.0 / r, -k * r);
        }
        (acc * dx * dy).norm()
    });
    let peak = raw.iter().cloned().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::Numerical("field vanished everywhere on the grid".into()));
    }
    Ok(FieldMap {
        xs: grid.xs.clone(),
        ys: grid.ys.clone(),
        depth: grid.depth,
        pressure: raw.into_iter().map(|p| p / peak).collect(),
    })
}

/// Width between the two −3 dB intensity crossings (pressure = peak/√2)
/// around the profile maximum, linearly interpolated.
pub fn beam_minus3db_width(positions: &[f64], pressure: &[f64]) -> Result<f64> {
    if positions.len() != pressure.len() || positions.len() < 3 {
        return domain("profile needs at least three matching samples");
    }
    let imax = (0..pressure.len())
        .max_by(|&a, &b| pressure[a].total_cmp(&pressure[b]))
        .unwrap();
    let level = pressure[imax] / 2f64.sqrt();
    let crossing = |range: &mut dyn Iterator<Item = usize>, step: isize| -> Option<f64> {
        for i in range {
            if pressure[i] < level {
                let inner = (i as isize - step) as usize;
                let t = (pressure[inner] - level) / (pressure[inner] - pressure[i]);
                return Some(positions[inner] + t * (positions[i] - positions[inner]));
            }
        }
        None
    };
    let left = crossing(&mut (0..imax).rev(), -1);
    let right = crossing(&mut (imax + 1..pressure.len()), 1);
    match (left, right) {
        (Some(l), Some(r)) => Ok(r - l),
        _ => Err(Error::Boundary("profile does not fall below −3 dB on both sides".into())),
    }
}
