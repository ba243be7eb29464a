//! Uniform linear array geometry, far-field evaluation, channel matrix,
//! and the orthogonality check used to compare epochs.
//!
//! The far field of an N-element ULA with element excitations `w` is
//!
//! ```text
//! E(theta) = sum_n w_n * exp(i * pi * (n - (N+1)/2) * s * cos(theta))
//! ```
//!
//! with `n = 1..N` and `s` the element spacing in half-wavelength units
//! (`s = 1` at the conventional lambda/2 spacing). Angles are measured so
//! that `cos(theta)` appears in the phase term: boresight (the array
//! normal) is `theta = 90` degrees.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{DmError, Result};

/// ULA geometry and steering direction.
///
/// `carrier_hz` is metadata only: with spacing expressed in wavelengths the
/// pattern is frequency-invariant. Elements radiate isotropically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArrayConfig {
    /// Number of elements, N >= 2.
    pub n_elements: usize,
    /// Element spacing in wavelengths (0.5 = conventional half-wavelength).
    pub spacing_wavelengths: f64,
    /// Carrier frequency in Hz (metadata only).
    pub carrier_hz: f64,
    /// Direction of the intended receiver in degrees; 90 is boresight.
    pub target_theta_deg: f64,
}

impl Default for ArrayConfig {
    fn default() -> Self {
        Self::ula(16)
    }
}

impl ArrayConfig {
    /// Half-wavelength-spaced ULA at 1 GHz steered at boresight.
    pub fn ula(n_elements: usize) -> Self {
        Self {
            n_elements,
            spacing_wavelengths: 0.5,
            carrier_hz: 1.0e9,
            target_theta_deg: 90.0,
        }
    }

    /// Check the type invariants.
    pub fn validate(&self) -> Result<()> {
        if self.n_elements < 2 {
            return Err(DmError::InvalidParameter(format!(
                "array needs at least 2 elements, got {}",
                self.n_elements
            )));
        }
        if !(self.spacing_wavelengths > 0.0) {
            return Err(DmError::InvalidParameter(format!(
                "element spacing must be > 0 wavelengths, got {}",
                self.spacing_wavelengths
            )));
        }
        if !(0.0..=180.0).contains(&self.target_theta_deg) {
            return Err(DmError::AngleOutOfRange(self.target_theta_deg));
        }
        Ok(())
    }

    /// Spacing in half-wavelength units (1 at lambda/2).
    pub fn spacing_scale(&self) -> f64 {
        self.spacing_wavelengths / 0.5
    }
}

/// cos(theta) evaluated from degrees, exact at boresight.
///
/// Computed as sin(90 - theta) so that theta = 90 yields exactly 0 and the
/// on-target steering phases vanish identically.
pub fn cos_theta_deg(theta_deg: f64) -> f64 {
    (90.0 - theta_deg).to_radians().sin()
}

/// Unit-magnitude steering phasors for one observation angle.
pub fn steering_vector(array: &ArrayConfig, theta_deg: f64) -> Result<Vec<Complex64>> {
    array.validate()?;
    if !(0.0..=180.0).contains(&theta_deg) {
        return Err(DmError::AngleOutOfRange(theta_deg));
    }
    let n = array.n_elements;
    let scale = array.spacing_scale() * cos_theta_deg(theta_deg);
    let mid = (n as f64 + 1.0) / 2.0;
    Ok((1..=n)
        .map(|idx| {
            let phase = std::f64::consts::PI * (idx as f64 - mid) * scale;
            Complex64::new(phase.cos(), phase.sin())
        })
        .collect())
}

/// Far-field sum of element contributions at one angle.
pub fn far_field(weights: &[Complex64], array: &ArrayConfig, theta_deg: f64) -> Result<Complex64> {
    let sv = steering_vector(array, theta_deg)?;
    if weights.len() != sv.len() {
        return Err(DmError::ShapeMismatch {
            expected: sv.len(),
            got: weights.len(),
        });
    }
    Ok(weights.iter().zip(&sv).map(|(w, h)| w * h).sum())
}

/// Magnitude of the conjugated target-row of the channel matrix dotted with
/// a gain difference. Zero means the difference is invisible to the
/// intended receiver.
pub fn orthogonality_residual(array: &ArrayConfig, delta_g: &[Complex64]) -> Result<f64> {
    let row = steering_vector(array, array.target_theta_deg)?;
    if delta_g.len() != row.len() {
        return Err(DmError::ShapeMismatch {
            expected: row.len(),
            got: delta_g.len(),
        });
    }
    let dot: Complex64 = row.iter().zip(delta_g).map(|(h, d)| h.conj() * d).sum();
    Ok(dot.norm())
}

/// Ordered observation angles in degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleGrid {
    thetas_deg: Vec<f64>,
}

impl AngleGrid {
    /// Build from explicit angles; must be strictly increasing in [0, 180].
    pub fn new(thetas_deg: Vec<f64>) -> Result<Self> {
        if thetas_deg.is_empty() {
            return Err(DmError::InvalidParameter("angle grid is empty".into()));
        }
        for pair in thetas_deg.windows(2) {
            if pair[1] <= pair[0] {
                return Err(DmError::InvalidParameter(format!(
                    "angle grid must be strictly increasing; {} followed by {}",
                    pair[0], pair[1]
                )));
            }
        }
        let (&first, &last) = (
            thetas_deg.first().unwrap(),
            thetas_deg.last().unwrap(),
        );
        if first < 0.0 || last > 180.0 {
            return Err(DmError::AngleOutOfRange(if first < 0.0 { first } else { last }));
        }
        Ok(Self { thetas_deg })
    }

    /// Uniform grid over [start, end] with `points` samples.
    ///
    /// Sample i is `start + (end - start) * i / (points - 1)`, so for the
    /// default 0..180 grid with 1801 points the boresight angle 90 is hit
    /// exactly.
    pub fn uniform(start_deg: f64, end_deg: f64, points: usize) -> Result<Self> {
        if points < 2 || end_deg <= start_deg {
            return Err(DmError::InvalidParameter(format!(
                "uniform grid needs >= 2 points and end > start, got {points} over [{start_deg}, {end_deg}]"
            )));
        }
        let span = end_deg - start_deg;
        let denom = (points - 1) as f64;
        Self::new(
            (0..points)
                .map(|i| start_deg + span * (i as f64 / denom))
                .collect(),
        )
    }

    /// Return a grid guaranteed to contain `target_deg` exactly.
    pub fn with_target(mut self, target_deg: f64) -> Result<Self> {
        if !(0.0..=180.0).contains(&target_deg) {
            return Err(DmError::AngleOutOfRange(target_deg));
        }
        match self
            .thetas_deg
            .binary_search_by(|t| t.partial_cmp(&target_deg).unwrap())
        {
            Ok(_) => {}
            Err(pos) => self.thetas_deg.insert(pos, target_deg),
        }
        Ok(self)
    }

    pub fn thetas_deg(&self) -> &[f64] {
        &self.thetas_deg
    }

    pub fn len(&self) -> usize {
        self.thetas_deg.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas_deg.is_empty()
    }

    /// Index of an angle that is present exactly, if any.
    pub fn index_of(&self, theta_deg: f64) -> Option<usize> {
        self.thetas_deg
            .binary_search_by(|t| t.partial_cmp(&theta_deg).unwrap())
            .ok()
    }
}

/// Discretized channel: one steering row per grid angle.
#[derive(Debug, Clone)]
pub struct ChannelMatrix {
    rows: Vec<Vec<Complex64>>,
    thetas_deg: Vec<f64>,
}

impl ChannelMatrix {
    pub fn num_angles(&self) -> usize {
        self.rows.len()
    }

    pub fn num_elements(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn row(&self, k: usize) -> &[Complex64] {
        &self.rows[k]
    }

    pub fn thetas_deg(&self) -> &[f64] {
        &self.thetas_deg
    }

    /// Field values at every grid angle for one weight vector
    /// (row-by-row dot product, no conjugation).
    pub fn project(&self, weights: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.num_elements();
        if weights.len() != n {
            return Err(DmError::ShapeMismatch {
                expected: n,
                got: weights.len(),
            });
        }
        Ok(self
            .rows
            .iter()
            .map(|row| row.iter().zip(weights).map(|(h, w)| h * w).sum())
            .collect())
    }
}

/// Evaluate the channel matrix for an array over an angle grid.
pub fn channel_matrix(array: &ArrayConfig, grid: &AngleGrid) -> Result<ChannelMatrix> {
    let rows = grid
        .thetas_deg()
        .iter()
        .map(|&t| steering_vector(array, t))
        .collect::<Result<Vec<_>>>()?;
    Ok(ChannelMatrix {
        rows,
        thetas_deg: grid.thetas_deg().to_vec(),
    })
}
