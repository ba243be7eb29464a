//! Multi-epoch statistics: radiation pattern mean/variance, phase
//! deviation, coefficient-sequence uniqueness, permutation counting, and
//! secrecy spectral efficiency.
//!
//! All moments are population statistics (divide by M, not M - 1) so the
//! decomposition `E[|E|^2] = V[|E|] + E[|E|]^2` holds exactly and the
//! time-averaged SNR can be computed from either side of the identity.

use std::io::{self, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::array::{channel_matrix, AngleGrid, ArrayConfig};
use crate::error::{DmError, Result};
use crate::phasor::{arg_or_zero, fmt_f64, wrap_phase, SymbolTarget};
use crate::synthesis::{EpochGenerator, SchemeConfig, WeightVector};

/// Exact-match threshold for repeated gain sequences.
const REPEAT_EPS: f64 = 1e-12;

// ---------------------------------------------------------------------------
// Ensemble
// ---------------------------------------------------------------------------

/// All epochs of one scenario: weight vectors plus the per-epoch, per-angle
/// far-field samples.
#[derive(Debug, Clone)]
pub struct EpochEnsemble {
    pub epochs: Vec<WeightVector>,
    /// `fields[m][k]` is the far field of epoch m at grid angle k.
    pub fields: Vec<Vec<Complex64>>,
    pub grid: AngleGrid,
    /// Target of epoch 0 (symbol streams vary the amplitude per epoch).
    pub target: SymbolTarget,
    /// Grid index of the steering direction.
    pub target_index: usize,
}

impl EpochEnsemble {
    /// Compute field samples for already-generated epochs.
    pub fn from_weights(
        epochs: Vec<WeightVector>,
        array: &ArrayConfig,
        grid: AngleGrid,
        target: SymbolTarget,
    ) -> Result<Self> {
        if epochs.is_empty() {
            return Err(DmError::InvalidParameter(
                "an ensemble needs at least one epoch".into(),
            ));
        }
        let target_index = grid.index_of(array.target_theta_deg).ok_or_else(|| {
            DmError::InvalidParameter(format!(
                "angle grid does not contain the target direction {} exactly",
                array.target_theta_deg
            ))
        })?;
        let h = channel_matrix(array, &grid)?;
        let fields = epochs
            .iter()
            .enumerate()
            .map(|(m, wv)| h.project(&wv.gains).map_err(|e| e.at_epoch(m)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            epochs,
            fields,
            grid,
            target,
            target_index,
        })
    }

    pub fn num_epochs(&self) -> usize {
        self.epochs.len()
    }

    pub fn num_angles(&self) -> usize {
        self.grid.len()
    }

    /// Write all epochs' gains as CSV with columns
    /// `epoch, element_index, gain_re, gain_im, scheme_tag`.
    pub fn write_weights_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "epoch,element_index,gain_re,gain_im,scheme_tag")?;
        for wv in &self.epochs {
            for (i, g) in wv.gains.iter().enumerate() {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    wv.epoch_index,
                    i,
                    fmt_f64(g.re),
                    fmt_f64(g.im),
                    wv.scheme
                )?;
            }
        }
        Ok(())
    }
}

/// Generate `epochs` weight vectors for one scheme and fill the field
/// matrix; fully determined by `seed`.
pub fn build_ensemble(
    scheme: &SchemeConfig,
    array: &ArrayConfig,
    grid: &AngleGrid,
    target: &SymbolTarget,
    epochs: usize,
    seed: u64,
) -> Result<EpochEnsemble> {
    build_ensemble_with_targets(
        scheme,
        array,
        grid,
        &vec![*target; epochs.max(1)],
        seed,
    )
}

/// As [`build_ensemble`] but with one target per epoch (symbol streams).
pub fn build_ensemble_with_targets(
    scheme: &SchemeConfig,
    array: &ArrayConfig,
    grid: &AngleGrid,
    targets: &[SymbolTarget],
    seed: u64,
) -> Result<EpochEnsemble> {
    let weights = generate_epochs(scheme, array, targets, seed)?;
    EpochEnsemble::from_weights(weights, array, grid.clone(), targets[0])
}

/// Generate one weight vector per target without evaluating any fields.
pub fn generate_epochs(
    scheme: &SchemeConfig,
    array: &ArrayConfig,
    targets: &[SymbolTarget],
    seed: u64,
) -> Result<Vec<WeightVector>> {
    if targets.is_empty() {
        return Err(DmError::InvalidParameter(
            "an ensemble needs at least one epoch".into(),
        ));
    }
    let mut gen = EpochGenerator::new(scheme.clone(), array.clone(), seed)?;
    targets
        .iter()
        .enumerate()
        .map(|(m, t)| gen.epoch(m as u64, t).map_err(|e| e.at_epoch(m)))
        .collect()
}

// ---------------------------------------------------------------------------
// Radiation statistics
// ---------------------------------------------------------------------------

/// Per-angle moments of the field magnitude and circular phase statistics.
#[derive(Debug, Clone)]
pub struct RadiationStats {
    pub thetas_deg: Vec<f64>,
    /// E[|E|] per angle.
    pub mean_mag: Vec<f64>,
    /// Population variance of |E| per angle.
    pub var_mag: Vec<f64>,
    /// E[|E|^2] per angle.
    pub mean_power: Vec<f64>,
    /// Circular mean of the field phase per angle.
    pub phase_mean: Vec<f64>,
    /// Most negative wrapped deviation from the circular mean.
    pub phase_min_dev: Vec<f64>,
    /// Most positive wrapped deviation from the circular mean.
    pub phase_max_dev: Vec<f64>,
}

impl RadiationStats {
    /// Write per-angle statistics as CSV with columns
    /// `theta_deg, mean_mag, var_mag, mean_power, phase_mean,
    /// phase_min_dev, phase_max_dev`.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(
            out,
            "theta_deg,mean_mag,var_mag,mean_power,phase_mean,phase_min_dev,phase_max_dev"
        )?;
        for k in 0..self.thetas_deg.len() {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                fmt_f64(self.thetas_deg[k]),
                fmt_f64(self.mean_mag[k]),
                fmt_f64(self.var_mag[k]),
                fmt_f64(self.mean_power[k]),
                fmt_f64(self.phase_mean[k]),
                fmt_f64(self.phase_min_dev[k]),
                fmt_f64(self.phase_max_dev[k])
            )?;
        }
        Ok(())
    }
}

/// Per-angle sample mean/variance of |E| plus circular phase statistics
/// relative to the circular mean, with deviations wrapped to (-pi, pi].
pub fn radiation_stats(ens: &EpochEnsemble) -> RadiationStats {
    let m = ens.num_epochs();
    let k_angles = ens.num_angles();
    let inv_m = 1.0 / m as f64;

    let mut mean_mag = vec![0.0; k_angles];
    let mut var_mag = vec![0.0; k_angles];
    let mut mean_power = vec![0.0; k_angles];
    let mut phase_mean = vec![0.0; k_angles];
    let mut phase_min_dev = vec![0.0; k_angles];
    let mut phase_max_dev = vec![0.0; k_angles];

    for k in 0..k_angles {
        let mut sum_mag = 0.0;
        let mut sum_power = 0.0;
        let mut resultant = Complex64::new(0.0, 0.0);
        for row in &ens.fields {
            let e = row[k];
            let mag = e.norm();
            sum_mag += mag;
            sum_power += mag * mag;
            resultant += if mag > 0.0 { e / mag } else { Complex64::new(0.0, 0.0) };
        }
        let mu = sum_mag * inv_m;
        mean_mag[k] = mu;
        mean_power[k] = sum_power * inv_m;
        var_mag[k] = ens
            .fields
            .iter()
            .map(|row| {
                let d = row[k].norm() - mu;
                d * d
            })
            .sum::<f64>()
            * inv_m;

        let mean_phase = arg_or_zero(resultant);
        phase_mean[k] = mean_phase;
        let mut min_dev = f64::INFINITY;
        let mut max_dev = f64::NEG_INFINITY;
        for row in &ens.fields {
            let dev = wrap_phase(arg_or_zero(row[k]) - mean_phase);
            min_dev = min_dev.min(dev);
            max_dev = max_dev.max(dev);
        }
        phase_min_dev[k] = min_dev;
        phase_max_dev[k] = max_dev;
    }

    RadiationStats {
        thetas_deg: ens.grid.thetas_deg().to_vec(),
        mean_mag,
        var_mag,
        mean_power,
        phase_mean,
        phase_min_dev,
        phase_max_dev,
    }
}

// ---------------------------------------------------------------------------
// Permutation counting
// ---------------------------------------------------------------------------

/// Number of distinct gain arrangements for an n-element array using k
/// balanced rotations: `n! / ((n-k)! (k/2)! (k/2)!)`.
pub fn permutation_count(n: usize, k: usize) -> Result<u128> {
    if k % 2 != 0 {
        return Err(DmError::InvalidParameter(format!(
            "rotation count must be even, got {k}"
        )));
    }
    if k > n {
        return Err(DmError::InvalidParameter(format!(
            "rotation count {k} exceeds element count {n}"
        )));
    }
    let choose = |n: u128, r: u128| -> Result<u128> {
        let mut acc: u128 = 1;
        for i in 1..=r {
            acc = acc
                .checked_mul(n - r + i)
                .ok_or_else(|| DmError::InvalidParameter("permutation count overflow".into()))?;
            acc /= i;
        }
        Ok(acc)
    };
    // n!/((n-k)! (k/2)! (k/2)!) = C(n, k) * C(k, k/2)
    let c1 = choose(n as u128, k as u128)?;
    let c2 = choose(k as u128, (k / 2) as u128)?;
    c1.checked_mul(c2)
        .ok_or_else(|| DmError::InvalidParameter("permutation count overflow".into()))
}

// ---------------------------------------------------------------------------
// Uniqueness
// ---------------------------------------------------------------------------

/// Per-epoch Manhattan distance of the element-phase sequence from the
/// reference (epoch 0) sequence, and the number of later epochs that repeat
/// the reference exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessTrace {
    pub manhattan_from_ref: Vec<f64>,
    pub repeat_count: usize,
}

impl UniquenessTrace {
    /// First epoch index >= 1 whose sequence repeats the reference.
    pub fn first_repeat(&self) -> Option<usize> {
        self.manhattan_from_ref
            .iter()
            .enumerate()
            .skip(1)
            .find(|(_, &d)| d < REPEAT_EPS)
            .map(|(m, _)| m)
    }

    /// Write the trace as CSV with columns `epoch, manhattan_from_ref`.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "epoch,manhattan_from_ref")?;
        for (m, d) in self.manhattan_from_ref.iter().enumerate() {
            writeln!(out, "{},{}", m, fmt_f64(*d))?;
        }
        Ok(())
    }
}

/// Distance trace over an ensemble's epochs (requires at least two).
pub fn uniqueness_trace(ens: &EpochEnsemble) -> Result<UniquenessTrace> {
    if ens.num_epochs() < 2 {
        return Err(DmError::InvalidParameter(
            "uniqueness trace needs at least two epochs".into(),
        ));
    }
    Ok(uniqueness_trace_from_weights(&ens.epochs))
}

/// Distance trace over raw weight vectors, using the pre-rotation element
/// phases.
pub fn uniqueness_trace_from_weights(epochs: &[WeightVector]) -> UniquenessTrace {
    let reference = &epochs[0].phases;
    let manhattan_from_ref: Vec<f64> = epochs
        .iter()
        .map(|wv| {
            reference
                .iter()
                .zip(&wv.phases)
                .map(|(a, b)| (a - b).abs())
                .sum()
        })
        .collect();
    let repeat_count = manhattan_from_ref
        .iter()
        .skip(1)
        .filter(|&&d| d < REPEAT_EPS)
        .count();
    UniquenessTrace {
        manhattan_from_ref,
        repeat_count,
    }
}

// ---------------------------------------------------------------------------
// Secrecy
// ---------------------------------------------------------------------------

/// Time-averaged noise power: one value everywhere or one per grid angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NoisePower {
    Uniform(f64),
    PerAngle(Vec<f64>),
}

impl Default for NoisePower {
    fn default() -> Self {
        NoisePower::Uniform(1.0)
    }
}

impl NoisePower {
    fn resolve(&self, k_angles: usize) -> Result<Vec<f64>> {
        let values = match self {
            NoisePower::Uniform(v) => vec![*v; k_angles],
            NoisePower::PerAngle(vs) => {
                if vs.len() != k_angles {
                    return Err(DmError::ShapeMismatch {
                        expected: k_angles,
                        got: vs.len(),
                    });
                }
                vs.clone()
            }
        };
        if let Some(bad) = values.iter().find(|v| !(**v > 0.0)) {
            return Err(DmError::InvalidParameter(format!(
                "noise power must be > 0 everywhere, got {bad}"
            )));
        }
        Ok(values)
    }
}

/// Per-angle time-averaged SNR, achievable rate, and clamped secrecy
/// spectral efficiency relative to the target direction.
#[derive(Debug, Clone)]
pub struct SecrecyProfile {
    pub thetas_deg: Vec<f64>,
    /// Linear E[SNR] per angle.
    pub avg_snr: Vec<f64>,
    /// log2(1 + E[SNR]) per angle.
    pub rate_bps_hz: Vec<f64>,
    /// (rate at target - rate here), clamped at zero.
    pub secrecy_bps_hz: Vec<f64>,
}

impl SecrecyProfile {
    /// Write the profile as CSV with columns
    /// `theta_deg, avg_snr, rate_bps_hz, secrecy_bps_hz`.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "theta_deg,avg_snr,rate_bps_hz,secrecy_bps_hz")?;
        for k in 0..self.thetas_deg.len() {
            writeln!(
                out,
                "{},{},{},{}",
                fmt_f64(self.thetas_deg[k]),
                fmt_f64(self.avg_snr[k]),
                fmt_f64(self.rate_bps_hz[k]),
                fmt_f64(self.secrecy_bps_hz[k])
            )?;
        }
        Ok(())
    }
}

/// Secrecy profile from time-averaged per-angle SNR.
///
/// `eaves_noise_extra` is an optional additive term on the noise power at
/// every non-target angle, modeling extra constellation-distortion noise at
/// eavesdroppers; pass 0.0 for the plain beamforming-only estimate.
pub fn secrecy_profile(
    ens: &EpochEnsemble,
    noise: &NoisePower,
    eaves_noise_extra: f64,
) -> Result<SecrecyProfile> {
    if eaves_noise_extra < 0.0 {
        return Err(DmError::InvalidParameter(format!(
            "eavesdropper noise supplement must be >= 0, got {eaves_noise_extra}"
        )));
    }
    let stats = radiation_stats(ens);
    secrecy_from_stats(&stats, ens.target_index, noise, eaves_noise_extra)
}

/// Secrecy profile from precomputed radiation statistics.
pub fn secrecy_from_stats(
    stats: &RadiationStats,
    target_index: usize,
    noise: &NoisePower,
    eaves_noise_extra: f64,
) -> Result<SecrecyProfile> {
    let k_angles = stats.thetas_deg.len();
    if target_index >= k_angles {
        return Err(DmError::InvalidParameter(format!(
            "target index {target_index} outside grid of {k_angles} angles"
        )));
    }
    let mut noise = noise.resolve(k_angles)?;
    for (k, n) in noise.iter_mut().enumerate() {
        if k != target_index {
            *n += eaves_noise_extra;
        }
    }
    let avg_snr: Vec<f64> = stats
        .mean_power
        .iter()
        .zip(&noise)
        .map(|(p, n)| p / n)
        .collect();
    let rate_bps_hz: Vec<f64> = avg_snr.iter().map(|s| (1.0 + s).log2()).collect();
    let target_rate = rate_bps_hz[target_index];
    let secrecy_bps_hz = rate_bps_hz
        .iter()
        .map(|r| (target_rate - r).max(0.0))
        .collect();
    Ok(SecrecyProfile {
        thetas_deg: stats.thetas_deg.clone(),
        avg_snr,
        rate_bps_hz,
        secrecy_bps_hz,
    })
}
