//! Per-epoch synthesis of complex element gains for the three directional
//! modulation schemes.
//!
//! All schemes build a constrained random walk in IQ-space whose endpoint is
//! the target symbol:
//!
//! * `conventional` - three-valued phases {0, +pi/2, -pi/2} with the
//!   rotations balanced so the on-target sum is real before the symbol
//!   rotation.
//! * `pp-unit` - the first N-2 steps are unit phasors with Beta-distributed
//!   phases; the final two are calculated ("closeout") so the path lands on
//!   the target while keeping unit magnitude.
//! * `pp-variable` - as `pp-unit`, but the closeout pair shares the residual
//!   vector at reduced magnitude in (0, 1].
//!
//! Herding replaces a drawn step by a direct unit step toward the target
//! whenever accepting the draw would leave the target out of reach of the
//! remaining elements; with herding enabled a single pass always suffices.
//! A final scrambling pass permutes the finished sequence across element
//! indices, the whole sequence is rotated onto the symbol phase, and
//! steering pre-compensation maps the walk onto element excitations (an
//! identity at the default boresight steering).

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::array::{steering_vector, ArrayConfig};
use crate::error::{DmError, Result};
use crate::phasor::{arg_or_zero, wrap_phase, SymbolTarget};

/// Number of calculated closeout elements. The closeout geometry is a
/// two-element triangle; other counts are not supported.
pub const CLOSEOUT_COUNT: usize = 2;

/// Redraw budget when herding is disabled.
pub const MAX_REDRAWS: usize = 1000;

/// Slack on the closeout reach test, absorbing accumulated rounding in the
/// walk before erroring out.
const CLOSEOUT_SLACK: f64 = 1e-9;

/// Fraction of N above which a target amplitude triggers a warning.
const AMPLITUDE_WARN_FRACTION: f64 = 0.95;

// ---------------------------------------------------------------------------
// Tags
// ---------------------------------------------------------------------------

/// Which synthesis scheme produced a weight vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeTag {
    #[serde(rename = "conventional")]
    Conventional,
    #[serde(rename = "pp-unit")]
    PpUnit,
    #[serde(rename = "pp-variable")]
    PpVariable,
}

impl fmt::Display for SchemeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SchemeTag::Conventional => "conventional",
            SchemeTag::PpUnit => "pp-unit",
            SchemeTag::PpVariable => "pp-variable",
        })
    }
}

/// How one step of the walk was determined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepKind {
    /// Drawn from the configured random source.
    #[serde(rename = "random")]
    Random,
    /// Replaced by a direct unit step toward the target.
    #[serde(rename = "herded")]
    Herded,
    /// Calculated closeout element.
    #[serde(rename = "closeout")]
    Closeout,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepKind::Random => "random",
            StepKind::Herded => "herded",
            StepKind::Closeout => "closeout",
        })
    }
}

/// How epoch-to-epoch weight sequences are derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EpochMode {
    /// New random draw every epoch.
    #[serde(rename = "fresh")]
    Fresh,
    /// Uniformly random reordering of the epoch-0 sequence.
    #[serde(rename = "random-permute")]
    RandomPermute,
    /// Alternate the epoch-0 sequence with its reflection about the symbol
    /// axis.
    #[serde(rename = "reflect")]
    Reflect,
    /// Deterministic walk through all distinct arrangements of a
    /// conventional gain multiset.
    #[serde(rename = "enumerate")]
    Enumerate,
}

// ---------------------------------------------------------------------------
// Phase sampling
// ---------------------------------------------------------------------------

/// Deterministic source of Beta-distributed phases.
///
/// Phases are `scale * (b - 0.5)` with `b ~ Beta(alpha, alpha)`, so the
/// support is `[-scale/2, +scale/2]`. The draw stream is fully determined
/// by `(seed, epoch_index)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseSampler {
    alpha: f64,
    scale: f64,
    seed: u64,
    epoch_index: u64,
}

impl PhaseSampler {
    /// Shape parameters must be equal and greater than 1.
    pub fn new(alpha: f64, beta: f64, scale: f64, seed: u64, epoch_index: u64) -> Result<Self> {
        if alpha != beta {
            return Err(DmError::InvalidParameter(format!(
                "phase distribution must be symmetric: alpha {alpha} != beta {beta}"
            )));
        }
        Self::symmetric(alpha, scale, seed, epoch_index)
    }

    /// Symmetric constructor taking the shared shape parameter once.
    pub fn symmetric(alpha: f64, scale: f64, seed: u64, epoch_index: u64) -> Result<Self> {
        if !(alpha > 1.0) {
            return Err(DmError::InvalidParameter(format!(
                "Beta shape parameter must be > 1, got {alpha}"
            )));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(DmError::InvalidParameter(format!(
                "phase scale must be finite and > 0, got {scale}"
            )));
        }
        Ok(Self {
            alpha,
            scale,
            seed,
            epoch_index,
        })
    }

    /// Same parameters, different epoch stream.
    pub fn for_epoch(&self, epoch_index: u64) -> Self {
        Self {
            epoch_index,
            ..*self
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn epoch_index(&self) -> u64 {
        self.epoch_index
    }

    /// Fresh RNG stream for this (seed, epoch) pair.
    pub fn rng(&self) -> ChaCha8Rng {
        epoch_rng(self.seed, self.epoch_index)
    }

    fn distribution(&self) -> Beta<f64> {
        Beta::new(self.alpha, self.alpha).expect("validated shape parameter")
    }

    /// Draw `count` phases; repeated calls return the same sequence.
    pub fn sample_phases(&self, count: usize) -> Vec<f64> {
        let mut rng = self.rng();
        let dist = self.distribution();
        (0..count)
            .map(|_| self.scale * (dist.sample(&mut rng) - 0.5))
            .collect()
    }
}

/// Per-epoch RNG stream derived from a master seed, so that epochs can be
/// generated in any order with identical results to serial execution.
pub fn epoch_rng(seed: u64, epoch_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(epoch_index);
    rng
}

// ---------------------------------------------------------------------------
// Weight vectors
// ---------------------------------------------------------------------------

/// One epoch's element excitations.
///
/// `gains` are the per-element complex excitations ready for far-field
/// evaluation (walk steps rotated onto the symbol phase and pre-compensated
/// for steering; at the default boresight target the compensation is an
/// identity and the gains are exactly the walk steps). `phases` keeps the
/// pre-rotation walk phase per element and `kinds` records how each step
/// was determined; both are aligned with `gains` after scrambling.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub gains: Vec<Complex64>,
    pub phases: Vec<f64>,
    pub kinds: Vec<StepKind>,
    pub scheme: SchemeTag,
    pub epoch_index: u64,
}

impl WeightVector {
    pub fn n_elements(&self) -> usize {
        self.gains.len()
    }

    /// Sum of the raw gains (equals the target symbol at boresight).
    pub fn gain_sum(&self) -> Complex64 {
        self.gains.iter().sum()
    }

    /// Walk-frame steps: steering compensation removed, symbol rotation
    /// kept, so the resulting path terminates on the target symbol.
    pub fn walk_steps(&self, array: &ArrayConfig) -> Result<Vec<Complex64>> {
        let sv = steering_vector(array, array.target_theta_deg)?;
        if sv.len() != self.gains.len() {
            return Err(DmError::ShapeMismatch {
                expected: sv.len(),
                got: self.gains.len(),
            });
        }
        Ok(self.gains.iter().zip(&sv).map(|(g, h)| g * h).collect())
    }
}

/// The two calculated closeout gains of the unit-amplitude scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CloseoutResult {
    pub g_last_minus_1: Complex64,
    pub g_last: Complex64,
}

impl CloseoutResult {
    pub fn sum(&self) -> Complex64 {
        self.g_last_minus_1 + self.g_last
    }
}

/// Two unit-magnitude phasors summing to `a_offset`.
///
/// The pair forms an isosceles triangle over the residual vector:
/// `g_last = a_offset/2 + i * unit(a_offset) * sqrt(1 - |a_offset/2|^2)`
/// and `g_last_minus_1 = a_offset - g_last`. At `|a_offset| = 2` both
/// halves coincide with `a_offset / 2`; at zero the conventional antipodal
/// pair `(-i, +i)` is returned so the result stays deterministic.
pub fn closeout_unit(a_offset: Complex64) -> Result<CloseoutResult> {
    let mag = a_offset.norm();
    if !mag.is_finite() {
        return Err(DmError::InvalidParameter(format!(
            "closeout offset must be finite, got {a_offset}"
        )));
    }
    if mag > 2.0 + CLOSEOUT_SLACK {
        return Err(DmError::Infeasible(format!(
            "closeout offset magnitude {mag} exceeds the reach of {CLOSEOUT_COUNT} unit elements"
        )));
    }
    if mag == 0.0 {
        return Ok(CloseoutResult {
            g_last_minus_1: Complex64::new(0.0, -1.0),
            g_last: Complex64::new(0.0, 1.0),
        });
    }
    let unit = a_offset / mag;
    let half = 0.5 * mag;
    let height = (1.0 - half * half).max(0.0).sqrt();
    // i * unit, scaled: rotate the residual direction by +pi/2.
    let g_last = 0.5 * a_offset + Complex64::new(-unit.im, unit.re) * height;
    let g_last_minus_1 = a_offset - g_last;
    Ok(CloseoutResult {
        g_last_minus_1,
        g_last,
    })
}

/// Variable-amplitude closeout: both elements carry the residual direction
/// at magnitude `|a_offset| / 2`, which is zero only for a zero residual.
pub fn closeout_variable(a_offset: Complex64) -> Result<CloseoutResult> {
    let mag = a_offset.norm();
    if !mag.is_finite() {
        return Err(DmError::InvalidParameter(format!(
            "closeout offset must be finite, got {a_offset}"
        )));
    }
    if mag > 2.0 + CLOSEOUT_SLACK {
        return Err(DmError::Infeasible(format!(
            "closeout offset magnitude {mag} exceeds the reach of {CLOSEOUT_COUNT} unit elements"
        )));
    }
    let share = a_offset / CLOSEOUT_COUNT as f64;
    Ok(CloseoutResult {
        g_last_minus_1: share,
        g_last: share,
    })
}

// ---------------------------------------------------------------------------
// Generation internals
// ---------------------------------------------------------------------------

struct WalkSegment {
    steps: Vec<Complex64>,
    phases: Vec<f64>,
    kinds: Vec<StepKind>,
    cum: Complex64,
}

/// Random walk with herding: a drawn step is kept only if the target stays
/// within reach of the elements remaining after it; otherwise the step is a
/// unit vector pointed straight at the target. Each unit step changes the
/// distance to the target by at most one, so after `n_steps` of `n_total`
/// elements the residual is at most `n_total - n_steps`.
fn herded_walk(
    n_steps: usize,
    n_total: usize,
    amplitude: f64,
    dist: &Beta<f64>,
    scale: f64,
    rng: &mut ChaCha8Rng,
) -> WalkSegment {
    let target = Complex64::new(amplitude, 0.0);
    let mut steps = Vec::with_capacity(n_steps);
    let mut phases = Vec::with_capacity(n_steps);
    let mut kinds = Vec::with_capacity(n_steps);
    let mut cum = Complex64::new(0.0, 0.0);
    for j in 1..=n_steps {
        let phi = scale * (dist.sample(rng) - 0.5);
        let candidate = Complex64::from_polar(1.0, phi);
        let reach_after = (n_total - j) as f64;
        let (step, phase, kind) = if (target - (cum + candidate)).norm() > reach_after {
            // Rejection implies the residual is longer than one step, so the
            // direction below is well defined.
            let residual = target - cum;
            let direct = residual / residual.norm();
            (direct, arg_or_zero(direct), StepKind::Herded)
        } else {
            (candidate, phi, StepKind::Random)
        };
        cum += step;
        steps.push(step);
        phases.push(phase);
        kinds.push(kind);
    }
    WalkSegment {
        steps,
        phases,
        kinds,
        cum,
    }
}

/// Unconstrained walk used when herding is disabled.
fn free_walk(n_steps: usize, dist: &Beta<f64>, scale: f64, rng: &mut ChaCha8Rng) -> WalkSegment {
    let mut steps = Vec::with_capacity(n_steps);
    let mut phases = Vec::with_capacity(n_steps);
    let mut cum = Complex64::new(0.0, 0.0);
    for _ in 0..n_steps {
        let phi = scale * (dist.sample(rng) - 0.5);
        let step = Complex64::from_polar(1.0, phi);
        cum += step;
        steps.push(step);
        phases.push(phi);
    }
    WalkSegment {
        kinds: vec![StepKind::Random; n_steps],
        steps,
        phases,
        cum,
    }
}

fn check_pp_target(array: &ArrayConfig, target: &SymbolTarget) -> Result<()> {
    array.validate()?;
    let n = array.n_elements as f64;
    let amplitude = target.amplitude();
    if amplitude <= 0.0 {
        return Err(DmError::InvalidParameter(format!(
            "target amplitude must be > 0, got {amplitude}"
        )));
    }
    if amplitude > n + 1e-9 {
        return Err(DmError::Infeasible(format!(
            "target amplitude {amplitude} exceeds the array reach {n}"
        )));
    }
    if amplitude > AMPLITUDE_WARN_FRACTION * n {
        log::warn!(
            "target amplitude {amplitude} is above {AMPLITUDE_WARN_FRACTION} * N = {}; \
             herding leaves little room for randomness",
            AMPLITUDE_WARN_FRACTION * n
        );
    }
    Ok(())
}

/// Scramble, rotate onto the symbol phase, and apply steering
/// pre-compensation. `segment` holds the pre-rotation walk.
fn assemble(
    mut segment: WalkSegment,
    scheme: SchemeTag,
    epoch_index: u64,
    target: &SymbolTarget,
    array: &ArrayConfig,
    rng: &mut ChaCha8Rng,
) -> Result<WeightVector> {
    let n = segment.steps.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    apply_order(&mut segment.steps, &order);
    apply_order(&mut segment.phases, &order);
    apply_order(&mut segment.kinds, &order);

    let rotor = target.phase_rotor();
    let sv = steering_vector(array, array.target_theta_deg)?;
    let gains = segment
        .steps
        .iter()
        .zip(&sv)
        .map(|(step, h)| step * rotor * h.conj())
        .collect();
    Ok(WeightVector {
        gains,
        phases: segment.phases,
        kinds: segment.kinds,
        scheme,
        epoch_index,
    })
}

fn apply_order<T: Copy>(values: &mut [T], order: &[usize]) {
    let reordered: Vec<T> = order.iter().map(|&i| values[i]).collect();
    values.copy_from_slice(&reordered);
}

// ---------------------------------------------------------------------------
// Scheme generators
// ---------------------------------------------------------------------------

/// Conventional directional modulation: `k_rotations` elements split evenly
/// between +pi/2 and -pi/2 rotations, the rest transmitting straight, with
/// the positions uniformly random. The target amplitude is forced to
/// `N - k` by the balanced-rotation construction.
pub fn gen_conventional(
    array: &ArrayConfig,
    k_rotations: usize,
    target: &SymbolTarget,
    rng: &mut ChaCha8Rng,
) -> Result<WeightVector> {
    array.validate()?;
    let n = array.n_elements;
    if k_rotations % 2 != 0 {
        return Err(DmError::InvalidParameter(format!(
            "rotation count must be even, got {k_rotations}"
        )));
    }
    if k_rotations > n {
        return Err(DmError::InvalidParameter(format!(
            "rotation count {k_rotations} exceeds element count {n}"
        )));
    }
    let forced = (n - k_rotations) as f64;
    if (target.amplitude() - forced).abs() > 1e-9 {
        return Err(DmError::Infeasible(format!(
            "conventional scheme with k = {k_rotations} forces amplitude {forced}, got {}",
            target.amplitude()
        )));
    }
    let mut labels = vec![0i8; n - k_rotations];
    labels.extend(std::iter::repeat(1i8).take(k_rotations / 2));
    labels.extend(std::iter::repeat(-1i8).take(k_rotations / 2));
    labels.shuffle(rng);
    conventional_from_labels(&labels, target, array, 0)
}

/// Build a conventional weight vector from a +/0/- label sequence.
fn conventional_from_labels(
    labels: &[i8],
    target: &SymbolTarget,
    array: &ArrayConfig,
    epoch_index: u64,
) -> Result<WeightVector> {
    let rotor = target.phase_rotor();
    let rotor_pos = Complex64::new(-rotor.im, rotor.re); // i * rotor
    let rotor_neg = Complex64::new(rotor.im, -rotor.re); // -i * rotor
    let sv = steering_vector(array, array.target_theta_deg)?;
    if labels.len() != sv.len() {
        return Err(DmError::ShapeMismatch {
            expected: sv.len(),
            got: labels.len(),
        });
    }
    let mut gains = Vec::with_capacity(labels.len());
    let mut phases = Vec::with_capacity(labels.len());
    for (label, h) in labels.iter().zip(&sv) {
        let (rotated, phase) = match label {
            0 => (rotor, 0.0),
            1 => (rotor_pos, PI / 2.0),
            -1 => (rotor_neg, -PI / 2.0),
            other => {
                return Err(DmError::InvalidParameter(format!(
                    "conventional label must be -1, 0, or 1, got {other}"
                )))
            }
        };
        gains.push(rotated * h.conj());
        phases.push(phase);
    }
    Ok(WeightVector {
        kinds: vec![StepKind::Random; labels.len()],
        gains,
        phases,
        scheme: SchemeTag::Conventional,
        epoch_index,
    })
}

/// Unit-amplitude scheme: N-2 Beta-phase unit steps plus a two-element
/// unit-magnitude closeout.
pub fn gen_pp_unit(
    array: &ArrayConfig,
    target: &SymbolTarget,
    sampler: &PhaseSampler,
    herding: bool,
) -> Result<WeightVector> {
    gen_pp(array, target, sampler, herding, SchemeTag::PpUnit)
}

/// Variable-amplitude scheme: as `gen_pp_unit` but the closeout pair shares
/// the residual vector at magnitude `|A_offset| / 2 <= 1` each.
pub fn gen_pp_variable(
    array: &ArrayConfig,
    target: &SymbolTarget,
    sampler: &PhaseSampler,
    herding: bool,
) -> Result<WeightVector> {
    gen_pp(array, target, sampler, herding, SchemeTag::PpVariable)
}

fn gen_pp(
    array: &ArrayConfig,
    target: &SymbolTarget,
    sampler: &PhaseSampler,
    herding: bool,
    scheme: SchemeTag,
) -> Result<WeightVector> {
    check_pp_target(array, target)?;
    let n = array.n_elements;
    let n_random = n - CLOSEOUT_COUNT;
    let amplitude = target.amplitude();
    let dist = sampler.distribution();
    let mut rng = sampler.rng();

    let mut segment = if herding {
        herded_walk(n_random, n, amplitude, &dist, sampler.scale(), &mut rng)
    } else {
        let mut attempt = 0;
        loop {
            let seg = free_walk(n_random, &dist, sampler.scale(), &mut rng);
            let reach = (Complex64::new(amplitude, 0.0) - seg.cum).norm();
            if reach <= CLOSEOUT_COUNT as f64 + CLOSEOUT_SLACK {
                break seg;
            }
            attempt += 1;
            if attempt > MAX_REDRAWS {
                return Err(DmError::Infeasible(format!(
                    "closeout stayed out of reach after {MAX_REDRAWS} redraws \
                     (amplitude {amplitude}, N = {n}); enable herding or lower the target"
                )));
            }
        }
    };

    let a_offset = Complex64::new(amplitude, 0.0) - segment.cum;
    match scheme {
        SchemeTag::PpUnit => {
            let co = closeout_unit(a_offset)?;
            segment.steps.push(co.g_last_minus_1);
            segment.phases.push(arg_or_zero(co.g_last_minus_1));
            segment.steps.push(co.g_last);
            segment.phases.push(arg_or_zero(co.g_last));
        }
        SchemeTag::PpVariable => {
            if a_offset.norm() == 0.0 {
                log::warn!(
                    "variable-amplitude closeout hit a zero residual; \
                     both closeout gains are zero for this epoch"
                );
            }
            let co = closeout_variable(a_offset)?;
            let phase = arg_or_zero(a_offset);
            segment.steps.push(co.g_last_minus_1);
            segment.phases.push(phase);
            segment.steps.push(co.g_last);
            segment.phases.push(phase);
        }
        SchemeTag::Conventional => unreachable!("conventional has its own generator"),
    }
    segment.kinds.extend([StepKind::Closeout; CLOSEOUT_COUNT]);
    segment.cum += a_offset;

    assemble(
        segment,
        scheme,
        sampler.epoch_index(),
        target,
        array,
        &mut rng,
    )
}

// ---------------------------------------------------------------------------
// Epoch-to-epoch derivation
// ---------------------------------------------------------------------------

/// Uniformly random reordering of a weight sequence across element indices.
/// The on-target field is permutation-invariant.
pub fn permute_random(
    base: &WeightVector,
    array: &ArrayConfig,
    epoch_index: u64,
    rng: &mut ChaCha8Rng,
) -> Result<WeightVector> {
    let sv = steering_vector(array, array.target_theta_deg)?;
    if sv.len() != base.n_elements() {
        return Err(DmError::ShapeMismatch {
            expected: sv.len(),
            got: base.n_elements(),
        });
    }
    let mut order: Vec<usize> = (0..base.n_elements()).collect();
    order.shuffle(rng);
    // Permute in the walk frame so steering compensation stays aligned with
    // element index.
    let walk: Vec<Complex64> = base.gains.iter().zip(&sv).map(|(g, h)| g * h).collect();
    let gains = order
        .iter()
        .zip(&sv)
        .map(|(&i, h)| walk[i] * h.conj())
        .collect();
    Ok(WeightVector {
        gains,
        phases: order.iter().map(|&i| base.phases[i]).collect(),
        kinds: order.iter().map(|&i| base.kinds[i]).collect(),
        scheme: base.scheme,
        epoch_index,
    })
}

/// Reflect every gain about the symbol axis: for target phase psi the walk
/// step G maps to `exp(2i psi) * conj(G)`, which leaves the on-target sum
/// unchanged.
pub fn reflect_epoch(
    base: &WeightVector,
    target: &SymbolTarget,
    array: &ArrayConfig,
    epoch_index: u64,
) -> Result<WeightVector> {
    let sv = steering_vector(array, array.target_theta_deg)?;
    if sv.len() != base.n_elements() {
        return Err(DmError::ShapeMismatch {
            expected: sv.len(),
            got: base.n_elements(),
        });
    }
    let rotor = target.phase_rotor();
    let double_rotor = rotor * rotor;
    let gains = base
        .gains
        .iter()
        .zip(&sv)
        .map(|(g, h)| double_rotor * (g * h).conj() * h.conj())
        .collect();
    Ok(WeightVector {
        gains,
        phases: base.phases.iter().map(|&p| wrap_phase(-p)).collect(),
        kinds: base.kinds.clone(),
        scheme: base.scheme,
        epoch_index,
    })
}

/// Deterministic enumerator over all distinct arrangements of a
/// conventional gain multiset, in cyclic lexicographic order starting from
/// the base arrangement.
#[derive(Debug, Clone)]
pub struct ArrangementEnumerator {
    labels: Vec<i8>,
}

impl ArrangementEnumerator {
    /// The base must be a conventional weight vector; its phase sequence is
    /// mapped back to +/0/- labels.
    pub fn from_weights(base: &WeightVector) -> Result<Self> {
        Ok(Self {
            labels: conventional_labels(base)?,
        })
    }

    pub fn labels(&self) -> &[i8] {
        &self.labels
    }

    /// Step to the lexicographic successor, wrapping around after the last
    /// arrangement. The cycle length equals the number of distinct
    /// arrangements of the multiset.
    pub fn advance(&mut self) {
        next_multiset_permutation(&mut self.labels);
    }

    /// Materialize the current arrangement as a weight vector.
    pub fn weight_vector(
        &self,
        target: &SymbolTarget,
        array: &ArrayConfig,
        epoch_index: u64,
    ) -> Result<WeightVector> {
        conventional_from_labels(&self.labels, target, array, epoch_index)
    }
}

/// Recover the +/0/- label sequence of a conventional weight vector.
pub fn conventional_labels(base: &WeightVector) -> Result<Vec<i8>> {
    if base.scheme != SchemeTag::Conventional {
        return Err(DmError::InvalidParameter(format!(
            "arrangement enumeration requires conventional weights, got {}",
            base.scheme
        )));
    }
    base.phases
        .iter()
        .map(|&p| {
            if p.abs() < 1e-9 {
                Ok(0i8)
            } else if (p - PI / 2.0).abs() < 1e-9 {
                Ok(1i8)
            } else if (p + PI / 2.0).abs() < 1e-9 {
                Ok(-1i8)
            } else {
                Err(DmError::InvalidParameter(format!(
                    "phase {p} is not a conventional rotation"
                )))
            }
        })
        .collect()
}

/// In-place lexicographic successor; sorts back to the first arrangement
/// (and returns false) after the last one.
fn next_multiset_permutation(a: &mut [i8]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        a.sort_unstable();
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

// ---------------------------------------------------------------------------
// Symbol mapping
// ---------------------------------------------------------------------------

/// Modulation alphabet mapped onto IQ targets.
#[derive(Debug, Clone, PartialEq)]
pub enum Modulation {
    /// M-ary phase shift keying at a fixed amplitude.
    Psk { order: usize, amplitude: f64 },
    /// M-ary amplitude modulation at zero phase.
    Am { levels: Vec<f64> },
}

/// Evenly spaced amplitude ladder ending at `top_amplitude`:
/// `top * i / order` for `i = 1..=order`.
pub fn default_am_levels(order: usize, top_amplitude: f64) -> Vec<f64> {
    (1..=order)
        .map(|i| top_amplitude * i as f64 / order as f64)
        .collect()
}

/// Map a symbol index to its IQ target.
pub fn symbol_to_target(
    symbol_index: usize,
    modulation: &Modulation,
    array: &ArrayConfig,
) -> Result<SymbolTarget> {
    let n = array.n_elements as f64;
    match modulation {
        Modulation::Psk { order, amplitude } => {
            if symbol_index >= *order {
                return Err(DmError::InvalidParameter(format!(
                    "symbol index {symbol_index} out of range for PSK-{order}"
                )));
            }
            if *amplitude > n + 1e-9 {
                return Err(DmError::Infeasible(format!(
                    "PSK amplitude {amplitude} exceeds the array reach {n}"
                )));
            }
            SymbolTarget::new(*amplitude, 2.0 * PI * symbol_index as f64 / *order as f64)
        }
        Modulation::Am { levels } => {
            let level = *levels.get(symbol_index).ok_or_else(|| {
                DmError::InvalidParameter(format!(
                    "symbol index {symbol_index} out of range for AM-{}",
                    levels.len()
                ))
            })?;
            if level > n + 1e-9 {
                return Err(DmError::Infeasible(format!(
                    "AM level {level} exceeds the array reach {n}"
                )));
            }
            SymbolTarget::new(level, 0.0)
        }
    }
}

// ---------------------------------------------------------------------------
// Scheme configuration and per-epoch driver
// ---------------------------------------------------------------------------

/// Everything a generator needs besides the target and the epoch index.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemeConfig {
    pub scheme: SchemeTag,
    /// Rotation count for the conventional scheme (ignored by pp schemes).
    pub k_rotations: usize,
    /// Shared Beta shape parameter.
    pub alpha: f64,
    /// Phase support width; draws lie in [-scale/2, +scale/2].
    pub phase_scale: f64,
    pub herding: bool,
    pub mode: EpochMode,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            scheme: SchemeTag::Conventional,
            k_rotations: 4,
            alpha: 3.0,
            phase_scale: PI / 2.0,
            herding: true,
            mode: EpochMode::Fresh,
        }
    }
}

/// Drives epoch-by-epoch weight generation for one scenario, including the
/// permutation-based derivation modes. Epoch RNG streams are derived from
/// `(seed, epoch_index)`, so fresh and random-permute epochs may be
/// produced in any order; enumerate mode advances sequentially.
#[derive(Debug, Clone)]
pub struct EpochGenerator {
    cfg: SchemeConfig,
    array: ArrayConfig,
    seed: u64,
    base: Option<WeightVector>,
    enumerator: Option<ArrangementEnumerator>,
    enumerator_epoch: u64,
}

impl EpochGenerator {
    pub fn new(cfg: SchemeConfig, array: ArrayConfig, seed: u64) -> Result<Self> {
        array.validate()?;
        if cfg.mode == EpochMode::Enumerate && cfg.scheme != SchemeTag::Conventional {
            return Err(DmError::InvalidParameter(format!(
                "enumerate mode requires the conventional scheme, got {}",
                cfg.scheme
            )));
        }
        // Fail fast on bad sampler parameters.
        if cfg.scheme != SchemeTag::Conventional {
            PhaseSampler::symmetric(cfg.alpha, cfg.phase_scale, seed, 0)?;
        }
        Ok(Self {
            cfg,
            array,
            seed,
            base: None,
            enumerator: None,
            enumerator_epoch: 0,
        })
    }

    pub fn scheme(&self) -> SchemeTag {
        self.cfg.scheme
    }

    /// Generate the weight vector for one epoch.
    pub fn epoch(&mut self, epoch_index: u64, target: &SymbolTarget) -> Result<WeightVector> {
        match self.cfg.mode {
            EpochMode::Fresh => self.fresh(epoch_index, target),
            EpochMode::RandomPermute => {
                let base = self.ensure_base(target)?.clone();
                if epoch_index == 0 {
                    return Ok(base);
                }
                let mut rng = epoch_rng(self.seed, epoch_index);
                permute_random(&base, &self.array, epoch_index, &mut rng)
            }
            EpochMode::Reflect => {
                let base = self.ensure_base(target)?.clone();
                if epoch_index % 2 == 0 {
                    let mut wv = base;
                    wv.epoch_index = epoch_index;
                    Ok(wv)
                } else {
                    reflect_epoch(&base, target, &self.array, epoch_index)
                }
            }
            EpochMode::Enumerate => {
                self.ensure_base(target)?;
                if self.enumerator.is_none() {
                    self.enumerator = Some(ArrangementEnumerator::from_weights(
                        self.base.as_ref().expect("base just ensured"),
                    )?);
                    self.enumerator_epoch = 0;
                }
                if epoch_index < self.enumerator_epoch {
                    return Err(DmError::InvalidParameter(format!(
                        "enumerate mode is sequential: epoch {epoch_index} requested after {}",
                        self.enumerator_epoch
                    )));
                }
                let enumerator = self.enumerator.as_mut().expect("just initialized");
                while self.enumerator_epoch < epoch_index {
                    enumerator.advance();
                    self.enumerator_epoch += 1;
                }
                enumerator.weight_vector(target, &self.array, epoch_index)
            }
        }
    }

    fn ensure_base(&mut self, target: &SymbolTarget) -> Result<&WeightVector> {
        if self.base.is_none() {
            self.base = Some(self.fresh(0, target)?);
        }
        Ok(self.base.as_ref().expect("base just generated"))
    }

    fn fresh(&self, epoch_index: u64, target: &SymbolTarget) -> Result<WeightVector> {
        match self.cfg.scheme {
            SchemeTag::Conventional => {
                let k = derive_rotations(self.array.n_elements, target.amplitude())?;
                let mut rng = epoch_rng(self.seed, epoch_index);
                let mut wv = gen_conventional(&self.array, k, target, &mut rng)?;
                wv.epoch_index = epoch_index;
                Ok(wv)
            }
            SchemeTag::PpUnit => {
                let sampler =
                    PhaseSampler::symmetric(self.cfg.alpha, self.cfg.phase_scale, self.seed, epoch_index)?;
                gen_pp_unit(&self.array, target, &sampler, self.cfg.herding)
            }
            SchemeTag::PpVariable => {
                let sampler =
                    PhaseSampler::symmetric(self.cfg.alpha, self.cfg.phase_scale, self.seed, epoch_index)?;
                gen_pp_variable(&self.array, target, &sampler, self.cfg.herding)
            }
        }
    }
}

/// Rotation count implied by a conventional target amplitude (`N - A`).
pub fn derive_rotations(n_elements: usize, amplitude: f64) -> Result<usize> {
    let k_real = n_elements as f64 - amplitude;
    let k = k_real.round();
    if (k_real - k).abs() > 1e-9 || k < 0.0 || k > n_elements as f64 {
        return Err(DmError::Infeasible(format!(
            "conventional amplitude {amplitude} is not N - k for any rotation count k \
             (N = {n_elements})"
        )));
    }
    let k = k as usize;
    if k % 2 != 0 {
        return Err(DmError::Infeasible(format!(
            "conventional amplitude {amplitude} implies odd rotation count {k}"
        )));
    }
    Ok(k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::array::far_field;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn target(amplitude: f64, phase: f64) -> SymbolTarget {
        SymbolTarget::new(amplitude, phase).unwrap()
    }

    fn sampler(seed: u64, epoch: u64) -> PhaseSampler {
        PhaseSampler::symmetric(3.0, PI / 2.0, seed, epoch).unwrap()
    }

    fn on_target(wv: &WeightVector, array: &ArrayConfig) -> Complex64 {
        far_field(&wv.gains, array, array.target_theta_deg).unwrap()
    }

    // -- phase sampling -----------------------------------------------------

    #[test]
    fn sampling_is_deterministic_per_seed_and_epoch() {
        let s = sampler(99, 3);
        assert_eq!(s.sample_phases(32), s.sample_phases(32));
        assert_ne!(s.sample_phases(32), s.for_epoch(4).sample_phases(32));
    }

    #[test]
    fn samples_stay_inside_scaled_support() {
        let s = sampler(5, 0);
        for phi in s.sample_phases(10_000) {
            assert!(phi.abs() <= PI / 4.0 + 1e-15, "phi = {phi}");
        }
    }

    #[test]
    fn sample_mean_is_near_zero() {
        let s = sampler(12, 0);
        let draws = s.sample_phases(100_000);
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        assert!(mean.abs() < 0.01, "mean = {mean}");
    }

    #[test]
    fn shape_parameters_are_validated() {
        assert!(PhaseSampler::symmetric(1.0, PI / 2.0, 0, 0).is_err());
        assert!(PhaseSampler::symmetric(0.5, PI / 2.0, 0, 0).is_err());
        assert!(PhaseSampler::new(2.0, 3.0, PI / 2.0, 0, 0).is_err());
        assert!(PhaseSampler::symmetric(3.0, 0.0, 0, 0).is_err());
        assert!(PhaseSampler::new(3.0, 3.0, PI / 2.0, 0, 0).is_ok());
    }

    // -- conventional scheme ------------------------------------------------

    #[test]
    fn conventional_power_loss_matches_rotation_count() {
        let array = ArrayConfig::ula(8);
        let mut rng = epoch_rng(1, 0);
        let wv = gen_conventional(&array, 2, &target(6.0, 0.0), &mut rng).unwrap();
        let e = on_target(&wv, &array);
        assert!((e - c(6.0, 0.0)).norm() < 1e-9);
        let loss_db = 20.0 * (e.norm() / 8.0).log10();
        assert!((loss_db - (-2.4988)).abs() < 0.01, "loss {loss_db}");

        let wv = gen_conventional(&array, 4, &target(4.0, 0.0), &mut rng).unwrap();
        let loss_db = 20.0 * (on_target(&wv, &array).norm() / 8.0).log10();
        assert!((loss_db - (-6.0206)).abs() < 0.01, "loss {loss_db}");
    }

    #[test]
    fn conventional_zero_rotations_is_plain_beamforming() {
        let array = ArrayConfig::ula(8);
        let mut rng = epoch_rng(1, 0);
        let wv = gen_conventional(&array, 0, &target(8.0, 0.0), &mut rng).unwrap();
        for g in &wv.gains {
            assert!((g - c(1.0, 0.0)).norm() < 1e-12);
        }
        assert!((wv.gain_sum() - c(8.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn conventional_rejects_bad_parameters() {
        let array = ArrayConfig::ula(8);
        let mut rng = epoch_rng(1, 0);
        assert!(matches!(
            gen_conventional(&array, 3, &target(5.0, 0.0), &mut rng),
            Err(DmError::InvalidParameter(_))
        ));
        assert!(matches!(
            gen_conventional(&array, 10, &target(0.0, 0.0), &mut rng),
            Err(DmError::InvalidParameter(_))
        ));
        assert!(matches!(
            gen_conventional(&array, 2, &target(5.0, 0.0), &mut rng),
            Err(DmError::Infeasible(_))
        ));
    }

    #[test]
    fn conventional_rotation_applies_symbol_phase() {
        let array = ArrayConfig::ula(8);
        let mut rng = epoch_rng(3, 0);
        let psi = PI / 3.0;
        let wv = gen_conventional(&array, 2, &target(6.0, psi), &mut rng).unwrap();
        let e = on_target(&wv, &array);
        assert!((e - Complex64::from_polar(6.0, psi)).norm() < 1e-9);
        for g in &wv.gains {
            assert!((g.norm() - 1.0).abs() < 1e-12);
        }
    }

    // -- closeout -----------------------------------------------------------

    #[test]
    fn closeout_at_full_reach_splits_evenly() {
        let co = closeout_unit(c(2.0, 0.0)).unwrap();
        assert!((co.g_last - c(1.0, 0.0)).norm() < 1e-12);
        assert!((co.g_last_minus_1 - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn closeout_hand_example() {
        // a = 1 + i: formula gives g_last = i, remainder 1, both unit.
        let co = closeout_unit(c(1.0, 1.0)).unwrap();
        assert!((co.g_last - c(0.0, 1.0)).norm() < 1e-12);
        assert!((co.g_last_minus_1 - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn closeout_at_zero_returns_antipodal_pair() {
        let co = closeout_unit(c(0.0, 0.0)).unwrap();
        assert_eq!(co.g_last, c(0.0, 1.0));
        assert_eq!(co.g_last_minus_1, c(0.0, -1.0));
        assert_eq!(co.sum(), c(0.0, 0.0));
    }

    #[test]
    fn closeout_variable_shares_the_residual() {
        let co = closeout_variable(c(1.0, 0.0)).unwrap();
        assert_eq!(co.g_last, c(0.5, 0.0));
        assert_eq!(co.g_last_minus_1, c(0.5, 0.0));
        // Formula limit at a zero residual: both gains vanish.
        let co = closeout_variable(c(0.0, 0.0)).unwrap();
        assert_eq!(co.g_last.norm(), 0.0);
        assert_eq!(co.g_last_minus_1.norm(), 0.0);
        assert!(closeout_variable(c(0.0, 2.5)).is_err());
    }

    #[test]
    fn closeout_rejects_out_of_reach_offsets() {
        assert!(matches!(
            closeout_unit(c(2.1, 0.0)),
            Err(DmError::Infeasible(_))
        ));
        assert!(matches!(
            closeout_unit(c(0.0, -3.0)),
            Err(DmError::Infeasible(_))
        ));
    }

    #[test]
    fn closeout_property_over_random_offsets() {
        let mut rng = epoch_rng(77, 0);
        for _ in 0..10_000 {
            let r = 2.0 * rng.gen::<f64>().sqrt();
            let phi = rng.gen_range(-PI..PI);
            let a = Complex64::from_polar(r, phi);
            let co = closeout_unit(a).unwrap();
            assert!((co.g_last.norm() - 1.0).abs() < 1e-12);
            assert!((co.g_last_minus_1.norm() - 1.0).abs() < 1e-12);
            assert!((co.sum() - a).norm() < 1e-12);
        }
    }

    // -- pp generators ------------------------------------------------------

    #[test]
    fn pp_unit_hits_exemplar_target() {
        let array = ArrayConfig::ula(16);
        for seed in 0..20 {
            let wv = gen_pp_unit(&array, &target(12.0, 0.0), &sampler(seed, 0), true).unwrap();
            assert!((on_target(&wv, &array) - c(12.0, 0.0)).norm() < 1e-9);
            for g in &wv.gains {
                assert!((g.norm() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pp_unit_maximum_reach_forces_direct_steps() {
        let array = ArrayConfig::ula(4);
        let wv = gen_pp_unit(&array, &target(4.0, 0.0), &sampler(9, 0), true).unwrap();
        for g in &wv.gains {
            assert!((g - c(1.0, 0.0)).norm() < 1e-12, "gain {g}");
        }
    }

    #[test]
    fn pp_unit_two_elements_full_reach() {
        let array = ArrayConfig::ula(2);
        let wv = gen_pp_unit(&array, &target(2.0, 0.0), &sampler(0, 0), true).unwrap();
        for g in &wv.gains {
            assert!((g - c(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn pp_unit_rejects_unreachable_amplitudes() {
        let array = ArrayConfig::ula(8);
        assert!(matches!(
            gen_pp_unit(&array, &target(8.5, 0.0), &sampler(0, 0), true),
            Err(DmError::Infeasible(_))
        ));
        assert!(matches!(
            gen_pp_unit(&array, &target(0.0, 0.0), &sampler(0, 0), true),
            Err(DmError::InvalidParameter(_))
        ));
    }

    #[test]
    fn pp_unit_without_herding_redraws_until_reachable() {
        let array = ArrayConfig::ula(16);
        let wv = gen_pp_unit(&array, &target(12.0, 0.0), &sampler(4, 0), false).unwrap();
        assert!((on_target(&wv, &array) - c(12.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn pp_unit_without_herding_errors_when_target_stays_out_of_reach() {
        // Two random steps almost never sum to 2 exactly, so amplitude N
        // keeps the closeout out of reach on every redraw.
        let array = ArrayConfig::ula(4);
        assert!(matches!(
            gen_pp_unit(&array, &target(4.0, 0.0), &sampler(2, 0), false),
            Err(DmError::Infeasible(_))
        ));
    }

    #[test]
    fn pp_variable_closeout_shares_residual() {
        let array = ArrayConfig::ula(16);
        let wv = gen_pp_variable(&array, &target(12.0, 0.0), &sampler(6, 0), true).unwrap();
        assert!((on_target(&wv, &array) - c(12.0, 0.0)).norm() < 1e-9);
        let closeout: Vec<Complex64> = wv
            .gains
            .iter()
            .zip(&wv.kinds)
            .filter(|(_, k)| **k == StepKind::Closeout)
            .map(|(g, _)| *g)
            .collect();
        assert_eq!(closeout.len(), 2);
        assert!((closeout[0] - closeout[1]).norm() < 1e-12);
        for g in closeout {
            assert!(g.norm() <= 1.0 + 1e-12);
        }
        for g in &wv.gains {
            assert!(g.norm() <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn pp_variable_two_elements_half_share() {
        // N = 2 leaves no random steps: the closeout pair carries the whole
        // amplitude, each at |A|/2.
        let array = ArrayConfig::ula(2);
        let wv = gen_pp_variable(&array, &target(1.0, 0.0), &sampler(0, 0), true).unwrap();
        for g in &wv.gains {
            assert!((g - c(0.5, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn pp_phase_field_reconstructs_walk() {
        let array = ArrayConfig::ula(16);
        let psi = PI / 5.0;
        let wv = gen_pp_unit(&array, &target(12.0, psi), &sampler(21, 7), true).unwrap();
        let rotor = Complex64::from_polar(1.0, psi);
        let walk = wv.walk_steps(&array).unwrap();
        for ((step, &phase), g) in walk.iter().zip(&wv.phases).zip(&wv.gains) {
            let expected = Complex64::from_polar(g.norm(), phase) * rotor;
            assert!((step - expected).norm() < 1e-9, "step {step} vs {expected}");
        }
        let endpoint: Complex64 = walk.iter().sum();
        assert!((endpoint - Complex64::from_polar(12.0, psi)).norm() < 1e-9);
    }

    // -- epoch derivation ----------------------------------------------------

    #[test]
    fn random_permute_preserves_on_target_field() {
        let array = ArrayConfig::ula(16);
        let base = gen_pp_unit(&array, &target(12.0, 0.3), &sampler(8, 0), true).unwrap();
        let before = on_target(&base, &array);
        let mut rng = epoch_rng(8, 1);
        let permuted = permute_random(&base, &array, 1, &mut rng).unwrap();
        let after = on_target(&permuted, &array);
        assert!((before - after).norm() < 1e-12);
        assert_ne!(permuted.gains, base.gains);
    }

    #[test]
    fn reflect_conjugates_about_symbol_axis() {
        let array = ArrayConfig::ula(4);
        let base = WeightVector {
            gains: vec![c(1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(1.0, 0.0)],
            phases: vec![0.0, PI / 2.0, -PI / 2.0, 0.0],
            kinds: vec![StepKind::Random; 4],
            scheme: SchemeTag::Conventional,
            epoch_index: 0,
        };
        let t = target(2.0, 0.0);
        let reflected = reflect_epoch(&base, &t, &array, 1).unwrap();
        let expected = [c(1.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(1.0, 0.0)];
        for (g, e) in reflected.gains.iter().zip(expected) {
            assert!((g - e).norm() < 1e-12);
        }
        assert!((reflected.gain_sum() - base.gain_sum()).norm() < 1e-12);
    }

    #[test]
    fn reflect_preserves_target_for_rotated_symbols() {
        let array = ArrayConfig::ula(16);
        let t = target(12.0, 1.1);
        let base = gen_pp_unit(&array, &t, &sampler(15, 0), true).unwrap();
        let reflected = reflect_epoch(&base, &t, &array, 1).unwrap();
        assert!((on_target(&reflected, &array) - on_target(&base, &array)).norm() < 1e-12);
    }

    #[test]
    fn enumerate_cycles_through_all_arrangements() {
        // N = 4, k = 2: 4!/(2! 1! 1!) = 12 distinct arrangements.
        let array = ArrayConfig::ula(4);
        let mut rng = epoch_rng(5, 0);
        let base = gen_conventional(&array, 2, &target(2.0, 0.0), &mut rng).unwrap();
        let mut en = ArrangementEnumerator::from_weights(&base).unwrap();
        let start = en.labels().to_vec();
        let mut seen = std::collections::HashSet::new();
        seen.insert(start.clone());
        for step in 1..12 {
            en.advance();
            assert!(seen.insert(en.labels().to_vec()), "repeat at step {step}");
        }
        en.advance();
        assert_eq!(en.labels(), start.as_slice());
    }

    #[test]
    fn enumerate_rejects_non_conventional_base() {
        let array = ArrayConfig::ula(8);
        let base = gen_pp_unit(&array, &target(6.0, 0.0), &sampler(1, 0), true).unwrap();
        assert!(ArrangementEnumerator::from_weights(&base).is_err());
    }

    // -- symbol mapping -------------------------------------------------------

    #[test]
    fn am_ladder_maps_symbols_to_amplitudes() {
        let array = ArrayConfig::ula(16);
        let levels = default_am_levels(4, 12.0);
        assert_eq!(levels, vec![3.0, 6.0, 9.0, 12.0]);
        let m = Modulation::Am { levels };
        let t = symbol_to_target(2, &m, &array).unwrap();
        assert_eq!(t.amplitude(), 9.0);
        assert_eq!(t.phase(), 0.0);
    }

    #[test]
    fn psk_maps_index_to_phase() {
        let array = ArrayConfig::ula(16);
        let m = Modulation::Psk {
            order: 4,
            amplitude: 12.0,
        };
        let t = symbol_to_target(1, &m, &array).unwrap();
        assert!((t.phase() - PI / 2.0).abs() < 1e-12);
        assert!(symbol_to_target(4, &m, &array).is_err());
    }

    #[test]
    fn infeasible_am_level_is_rejected_but_full_reach_allowed() {
        let array = ArrayConfig::ula(16);
        let m = Modulation::Am {
            levels: vec![4.0, 17.0],
        };
        assert!(matches!(
            symbol_to_target(1, &m, &array),
            Err(DmError::Infeasible(_))
        ));
        let m = Modulation::Am {
            levels: vec![16.0],
        };
        assert_eq!(symbol_to_target(0, &m, &array).unwrap().amplitude(), 16.0);
    }

    // -- epoch generator -------------------------------------------------------

    #[test]
    fn generator_is_deterministic_per_seed() {
        let cfg = SchemeConfig {
            scheme: SchemeTag::PpUnit,
            ..SchemeConfig::default()
        };
        let t = target(12.0, 0.0);
        let mut a = EpochGenerator::new(cfg.clone(), ArrayConfig::ula(16), 42).unwrap();
        let mut b = EpochGenerator::new(cfg, ArrayConfig::ula(16), 42).unwrap();
        for epoch in [0u64, 5, 2] {
            assert_eq!(a.epoch(epoch, &t).unwrap(), b.epoch(epoch, &t).unwrap());
        }
    }

    #[test]
    fn generator_enumerate_requires_conventional() {
        let cfg = SchemeConfig {
            scheme: SchemeTag::PpVariable,
            mode: EpochMode::Enumerate,
            ..SchemeConfig::default()
        };
        assert!(EpochGenerator::new(cfg, ArrayConfig::ula(8), 0).is_err());
    }

    #[test]
    fn generator_derives_rotations_from_amplitude() {
        assert_eq!(derive_rotations(16, 12.0).unwrap(), 4);
        assert_eq!(derive_rotations(8, 8.0).unwrap(), 0);
        assert!(derive_rotations(8, 5.0).is_err());
        assert!(derive_rotations(8, 4.5).is_err());
    }

    #[test]
    fn herding_is_single_pass_over_amplitude_sweep() {
        let array = ArrayConfig::ula(16);
        for amplitude in [0.5, 1.0, 4.0, 8.0, 12.0, 15.5, 16.0] {
            for seed in 0..10 {
                let t = target(amplitude, 0.0);
                let u = gen_pp_unit(&array, &t, &sampler(seed, 0), true).unwrap();
                assert!((on_target(&u, &array) - t.as_complex()).norm() < 1e-9);
                let v = gen_pp_variable(&array, &t, &sampler(seed, 1), true).unwrap();
                assert!((on_target(&v, &array) - t.as_complex()).norm() < 1e-9);
            }
        }
    }
}
