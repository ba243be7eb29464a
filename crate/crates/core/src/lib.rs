//! Directional modulation on phased arrays, treated as constrained random
//! walks in IQ-space.
//!
//! Each symbol epoch synthesizes per-element complex gains whose vector sum
//! lands exactly on the target symbol in the intended direction while the
//! field everywhere else varies from epoch to epoch. The crate covers the
//! conventional three-phase scheme, the real-valued-phase schemes with unit
//! and variable gain magnitude, and the full metric suite that compares
//! them: radiation pattern moments, phase scrambling, coefficient-sequence
//! uniqueness, and secrecy spectral efficiency.
//!
//! Modules:
//!
//! * [`phasor`] - IQ-space primitives: paths, targets, tolerances.
//! * [`array`] - ULA geometry, far field, channel matrix, orthogonality.
//! * [`synthesis`] - per-epoch gain generators and permutation modes.
//! * [`metrics`] - multi-epoch statistics and secrecy profiles.
//! * [`engine`] - scenario configuration and reproducible runs.

pub mod array;
pub mod engine;
pub mod error;
pub mod metrics;
pub mod phasor;
pub mod synthesis;

pub use num_complex::Complex64;

pub use array::{
    channel_matrix, far_field, orthogonality_residual, steering_vector, AngleGrid, ArrayConfig,
    ChannelMatrix,
};
pub use engine::{
    load_config, run, run_symbol_stream, GridParams, ModulationParams, PhaseTimings, RunReport,
    SamplerParams, ScenarioConfig,
};
pub use error::{DmError, Result};
pub use metrics::{
    build_ensemble, permutation_count, radiation_stats, secrecy_profile, uniqueness_trace,
    EpochEnsemble, NoisePower, RadiationStats, SecrecyProfile, UniquenessTrace,
};
pub use phasor::{path_from_weights, IQPath, SymbolTarget, ABS_TOL};
pub use synthesis::{
    closeout_unit, closeout_variable, default_am_levels, gen_conventional, gen_pp_unit,
    gen_pp_variable, permute_random, reflect_epoch, symbol_to_target, ArrangementEnumerator,
    CloseoutResult, EpochGenerator, EpochMode, Modulation, PhaseSampler, SchemeConfig, SchemeTag,
    StepKind, WeightVector,
};
