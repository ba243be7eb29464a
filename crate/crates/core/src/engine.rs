//! Scenario orchestration: binds array, scheme, target, epoch count, and
//! seeds into reproducible runs.
//!
//! A [`ScenarioConfig`] can be loaded from a TOML file whose keys mirror the
//! struct fields exactly; unknown keys are rejected. `(config, seed)` fully
//! determines every output value.

use std::f64::consts::PI;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::array::{AngleGrid, ArrayConfig};
use crate::error::{DmError, Result};
use crate::metrics::{
    generate_epochs, radiation_stats, secrecy_profile, uniqueness_trace_from_weights,
    EpochEnsemble, NoisePower, RadiationStats, SecrecyProfile, UniquenessTrace,
};
use crate::phasor::SymbolTarget;
use crate::synthesis::{
    default_am_levels, derive_rotations, symbol_to_target, EpochMode, Modulation, SchemeConfig,
    SchemeTag,
};

/// Beta phase distribution parameters as they appear in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplerParams {
    /// Shared shape parameter (alpha = beta > 1).
    pub alpha: f64,
    /// Phase support width; draws lie in [-scale/2, +scale/2].
    pub scale: f64,
}

impl Default for SamplerParams {
    fn default() -> Self {
        Self {
            alpha: 3.0,
            scale: PI / 2.0,
        }
    }
}

/// Observation grid parameters as they appear in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridParams {
    pub theta_start_deg: f64,
    pub theta_end_deg: f64,
    pub points: usize,
}

impl Default for GridParams {
    fn default() -> Self {
        // 0.1 degree steps resolve the 16-element sidelobe structure with
        // more than ten samples per lobe.
        Self {
            theta_start_deg: 0.0,
            theta_end_deg: 180.0,
            points: 1801,
        }
    }
}

/// Modulation alphabet as it appears in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulationParams {
    /// "psk" or "am".
    pub kind: String,
    pub order: usize,
    /// AM level ladder; defaults to `(1..=order)/order` of the target
    /// amplitude.
    #[serde(default)]
    pub levels: Option<Vec<f64>>,
}

/// Full description of a reproducible scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub array: ArrayConfig,
    pub scheme: SchemeTag,
    /// Balanced rotation count (conventional scheme only).
    pub k_rotations: usize,
    pub sampler: SamplerParams,
    /// Target amplitude as a fraction of the element count, in (0, 1].
    pub target_fraction: f64,
    pub target_phase_rad: f64,
    pub epochs: usize,
    pub seed: u64,
    pub grid: GridParams,
    pub noise_power: NoisePower,
    pub herding: bool,
    pub permutation_mode: EpochMode,
    pub modulation: Option<ModulationParams>,
}

impl Default for ScenarioConfig {
    /// The default scenario: 16-element half-wavelength ULA at 1 GHz,
    /// conventional scheme with 4 rotations, target amplitude 75% of the
    /// array reach at zero phase, 200 epochs.
    fn default() -> Self {
        Self {
            array: ArrayConfig::ula(16),
            scheme: SchemeTag::Conventional,
            k_rotations: 4,
            sampler: SamplerParams::default(),
            target_fraction: 0.75,
            target_phase_rad: 0.0,
            epochs: 200,
            seed: 1,
            grid: GridParams::default(),
            noise_power: NoisePower::Uniform(1.0),
            herding: true,
            permutation_mode: EpochMode::Fresh,
            modulation: None,
        }
    }
}

impl ScenarioConfig {
    /// Target amplitude in element-count units.
    pub fn target_amplitude(&self) -> f64 {
        self.target_fraction * self.array.n_elements as f64
    }

    /// Base symbol target (epoch 0 of symbol streams, every epoch
    /// otherwise).
    pub fn target(&self) -> Result<SymbolTarget> {
        SymbolTarget::new(self.target_amplitude(), self.target_phase_rad)
    }

    /// Validate all cross-field invariants.
    pub fn validate(&self) -> Result<()> {
        self.array
            .validate()
            .map_err(|e| DmError::Config(e.to_string()))?;
        if !(self.target_fraction > 0.0 && self.target_fraction <= 1.0) {
            return Err(DmError::Config(format!(
                "target_fraction must be in (0, 1], got {}",
                self.target_fraction
            )));
        }
        if self.epochs == 0 {
            return Err(DmError::Config("epochs must be >= 1".into()));
        }
        if self.scheme == SchemeTag::Conventional && self.modulation.is_none() {
            let k = derive_rotations(self.array.n_elements, self.target_amplitude())
                .map_err(|e| DmError::Config(e.to_string()))?;
            if k != self.k_rotations {
                return Err(DmError::Config(format!(
                    "conventional scheme: k_rotations = {} but target amplitude {} forces k = {k}",
                    self.k_rotations,
                    self.target_amplitude()
                )));
            }
        }
        if let Some(m) = &self.modulation {
            match m.kind.as_str() {
                "psk" | "am" => {}
                other => {
                    return Err(DmError::Config(format!(
                        "modulation.kind must be \"psk\" or \"am\", got \"{other}\""
                    )))
                }
            }
            if m.order == 0 {
                return Err(DmError::Config("modulation.order must be >= 1".into()));
            }
            if let Some(levels) = &m.levels {
                if levels.len() != m.order {
                    return Err(DmError::Config(format!(
                        "modulation.levels has {} entries but order is {}",
                        levels.len(),
                        m.order
                    )));
                }
            }
        }
        self.scheme_config()?;
        Ok(())
    }

    /// Scheme parameters for the generator layer.
    pub fn scheme_config(&self) -> Result<SchemeConfig> {
        if self.scheme != SchemeTag::Conventional {
            crate::synthesis::PhaseSampler::symmetric(
                self.sampler.alpha,
                self.sampler.scale,
                self.seed,
                0,
            )
            .map_err(|e| DmError::Config(e.to_string()))?;
        }
        Ok(SchemeConfig {
            scheme: self.scheme,
            k_rotations: self.k_rotations,
            alpha: self.sampler.alpha,
            phase_scale: self.sampler.scale,
            herding: self.herding,
            mode: self.permutation_mode,
        })
    }

    /// Observation grid including the target direction exactly.
    pub fn angle_grid(&self) -> Result<AngleGrid> {
        AngleGrid::uniform(
            self.grid.theta_start_deg,
            self.grid.theta_end_deg,
            self.grid.points,
        )
        .and_then(|g| g.with_target(self.array.target_theta_deg))
        .map_err(|e| DmError::Config(e.to_string()))
    }

    /// Modulation alphabet, with the default AM ladder filled in.
    pub fn modulation(&self) -> Result<Option<Modulation>> {
        let Some(params) = &self.modulation else {
            return Ok(None);
        };
        let m = match params.kind.as_str() {
            "psk" => Modulation::Psk {
                order: params.order,
                amplitude: self.target_amplitude(),
            },
            "am" => Modulation::Am {
                levels: params
                    .levels
                    .clone()
                    .unwrap_or_else(|| default_am_levels(params.order, self.target_amplitude())),
            },
            other => {
                return Err(DmError::Config(format!(
                    "modulation.kind must be \"psk\" or \"am\", got \"{other}\""
                )))
            }
        };
        Ok(Some(m))
    }
}

/// Wall-clock seconds spent in each phase of a run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTimings {
    pub weights_s: f64,
    pub fields_s: f64,
    pub metrics_s: f64,
}

/// Everything a run produces.
#[derive(Debug, Clone)]
pub struct RunReport {
    pub ensemble: EpochEnsemble,
    pub stats: RadiationStats,
    pub secrecy: SecrecyProfile,
    pub uniqueness: UniquenessTrace,
    pub timing: PhaseTimings,
}

/// Run a scenario: every epoch targets the configured symbol.
pub fn run(config: &ScenarioConfig) -> Result<RunReport> {
    config.validate()?;
    let target = config.target()?;
    run_with_targets(config, &vec![target; config.epochs], config.permutation_mode)
}

/// Run a scenario over a symbol stream: epoch i targets symbol i.
///
/// Weights are generated fresh per epoch; the permutation modes derive
/// epochs from a single base sequence and therefore cannot track a varying
/// target.
pub fn run_symbol_stream(config: &ScenarioConfig, symbols: &[usize]) -> Result<RunReport> {
    config.validate()?;
    let modulation = config.modulation()?.ok_or_else(|| {
        DmError::Config("run_symbol_stream requires a modulation block".into())
    })?;
    if symbols.is_empty() {
        return Err(DmError::Config("symbol stream is empty".into()));
    }
    let targets = symbols
        .iter()
        .map(|&s| symbol_to_target(s, &modulation, &config.array))
        .collect::<Result<Vec<_>>>()?;
    run_with_targets(config, &targets, EpochMode::Fresh)
}

fn run_with_targets(
    config: &ScenarioConfig,
    targets: &[SymbolTarget],
    mode: EpochMode,
) -> Result<RunReport> {
    let mut scheme_cfg = config.scheme_config()?;
    scheme_cfg.mode = mode;
    let grid = config.angle_grid()?;

    let t0 = Instant::now();
    let weights = generate_epochs(&scheme_cfg, &config.array, targets, config.seed)?;
    let weights_s = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    let ensemble =
        EpochEnsemble::from_weights(weights, &config.array, grid, targets[0])?;
    let fields_s = t1.elapsed().as_secs_f64();

    let t2 = Instant::now();
    let stats = radiation_stats(&ensemble);
    let secrecy = secrecy_profile(&ensemble, &config.noise_power, 0.0)?;
    let uniqueness = uniqueness_trace_from_weights(&ensemble.epochs);
    let metrics_s = t2.elapsed().as_secs_f64();

    Ok(RunReport {
        ensemble,
        stats,
        secrecy,
        uniqueness,
        timing: PhaseTimings {
            weights_s,
            fields_s,
            metrics_s,
        },
    })
}

// ---------------------------------------------------------------------------
// Config file loading
// ---------------------------------------------------------------------------

/// Load a scenario from an optional TOML file plus `key=value` overrides.
///
/// Override keys use dotted paths mirroring the config fields
/// (`epochs=500`, `array.n_elements=8`, `scheme=pp-unit`); values are
/// parsed as TOML and fall back to strings. Unknown keys are rejected.
pub fn load_config(path: Option<&Path>, overrides: &[(String, String)]) -> Result<ScenarioConfig> {
    let mut table: toml::Table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| {
                DmError::Config(format!("cannot read config {}: {e}", p.display()))
            })?;
            text.parse().map_err(|e| {
                DmError::Config(format!("cannot parse config {}: {e}", p.display()))
            })?
        }
        None => toml::Table::new(),
    };
    for (key, value) in overrides {
        apply_override(&mut table, key, value)?;
    }
    table
        .try_into()
        .map_err(|e| DmError::Config(format!("invalid scenario config: {e}")))
}

fn apply_override(table: &mut toml::Table, key: &str, raw: &str) -> Result<()> {
    let parsed = parse_override_value(raw);
    let mut current = table;
    let parts: Vec<&str> = key.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(DmError::Config(format!("empty path segment in key \"{key}\"")));
        }
        if i + 1 == parts.len() {
            current.insert(part.to_string(), parsed);
            return Ok(());
        }
        current = current
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| {
                DmError::Config(format!(
                    "cannot set \"{key}\": \"{part}\" is not a table"
                ))
            })?;
    }
    unreachable!("loop always returns on the last segment")
}

/// Parse an override value as TOML, falling back to a bare string.
fn parse_override_value(raw: &str) -> toml::Value {
    let wrapped = format!("v = {raw}");
    match wrapped.parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("key v was just inserted"),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}
