//! Complex-number and IQ-path primitives shared by all other modules.
//!
//! Element excitations and their partial sums live in IQ-space (the complex
//! plane of in-phase and quadrature components). An [`IQPath`] is the vector
//! path a weight sequence traces out: each step is one element's
//! contribution, the cumulative sequence is the running sum, and the final
//! cumulative point is the transmitted symbol.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;

use crate::error::{DmError, Result};

/// Default absolute tolerance for on-target and magnitude checks.
pub const ABS_TOL: f64 = 1e-9;

/// Argument of a complex value, with `arg(0)` defined as 0.
///
/// The zero convention avoids a special error path when a cumulative sum
/// lands exactly on its target.
pub fn arg_or_zero(z: Complex64) -> f64 {
    if z.re == 0.0 && z.im == 0.0 {
        0.0
    } else {
        z.arg()
    }
}

/// Wrap an angle in radians to the half-open interval (-pi, pi].
pub fn wrap_phase(x: f64) -> f64 {
    let w = x.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

/// Format a float with 17 significant digits so CSV output is bit-stable.
pub fn fmt_f64(v: f64) -> String {
    format!("{:.16e}", v)
}

/// Target symbol in IQ-space: amplitude in units of a single unit-gain
/// element contribution (so at most N for an N-element array) and phase in
/// (-pi, pi].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolTarget {
    amplitude: f64,
    phase: f64,
}

impl SymbolTarget {
    /// Build a target, wrapping the phase into (-pi, pi].
    pub fn new(amplitude: f64, phase: f64) -> Result<Self> {
        if !amplitude.is_finite() || amplitude < 0.0 {
            return Err(DmError::InvalidParameter(format!(
                "target amplitude must be finite and >= 0, got {amplitude}"
            )));
        }
        if !phase.is_finite() {
            return Err(DmError::InvalidParameter(format!(
                "target phase must be finite, got {phase}"
            )));
        }
        Ok(Self {
            amplitude,
            phase: wrap_phase(phase),
        })
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// The target as a point in IQ-space.
    pub fn as_complex(&self) -> Complex64 {
        Complex64::from_polar(self.amplitude, self.phase)
    }

    /// Unit phasor carrying the symbol phase.
    pub fn phase_rotor(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.phase)
    }
}

/// Vector path in IQ-space: per-element steps plus the running sum.
///
/// `cumulative` has one more entry than `steps` and starts at the origin;
/// `cumulative[k + 1] = cumulative[k] + steps[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IQPath {
    steps: Vec<Complex64>,
    cumulative: Vec<Complex64>,
}

impl IQPath {
    pub fn steps(&self) -> &[Complex64] {
        &self.steps
    }

    pub fn cumulative(&self) -> &[Complex64] {
        &self.cumulative
    }

    /// Number of steps (equals the array element count).
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Final cumulative point: the symbol the path terminates on.
    pub fn endpoint(&self) -> Complex64 {
        *self.cumulative.last().expect("path is never empty")
    }

    /// Write the path as CSV with columns
    /// `step_index, step_re, step_im, cum_re, cum_im`
    /// where `cum` is the running sum after the step.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "step_index,step_re,step_im,cum_re,cum_im")?;
        for (i, step) in self.steps.iter().enumerate() {
            let cum = self.cumulative[i + 1];
            writeln!(
                out,
                "{},{},{},{},{}",
                i,
                fmt_f64(step.re),
                fmt_f64(step.im),
                fmt_f64(cum.re),
                fmt_f64(cum.im)
            )?;
        }
        Ok(())
    }
}

/// Build the IQ path traced by a weight sequence.
pub fn path_from_weights(weights: &[Complex64]) -> Result<IQPath> {
    if weights.is_empty() {
        return Err(DmError::EmptyPath);
    }
    if let Some(bad) = weights.iter().find(|w| !w.re.is_finite() || !w.im.is_finite()) {
        return Err(DmError::InvalidParameter(format!(
            "non-finite weight {bad} in path"
        )));
    }
    let mut cumulative = Vec::with_capacity(weights.len() + 1);
    let mut acc = Complex64::new(0.0, 0.0);
    cumulative.push(acc);
    for w in weights {
        acc += w;
        cumulative.push(acc);
    }
    Ok(IQPath {
        steps: weights.to_vec(),
        cumulative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn prefix_sums_match_definition() {
        let path = path_from_weights(&[c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert_eq!(
            path.cumulative(),
            &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0)]
        );
    }

    #[test]
    fn uniform_weights_sum_to_count() {
        let path = path_from_weights(&[c(1.0, 0.0); 4]).unwrap();
        assert_eq!(path.endpoint(), c(4.0, 0.0));
        assert_eq!(path.len(), 4);
    }

    #[test]
    fn conventional_eight_element_path_lands_on_six() {
        // Six straight steps plus one +pi/2 and one -pi/2 rotation.
        let mut w = vec![c(1.0, 0.0); 6];
        w.push(c(0.0, 1.0));
        w.push(c(0.0, -1.0));
        let path = path_from_weights(&w).unwrap();
        assert!((path.endpoint() - c(6.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn empty_input_is_rejected() {
        assert!(matches!(path_from_weights(&[]), Err(DmError::EmptyPath)));
    }

    #[test]
    fn prefix_sum_reconstruction_over_random_walks() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let n = rng.gen_range(1..64);
            let w: Vec<Complex64> = (0..n)
                .map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                .collect();
            let path = path_from_weights(&w).unwrap();
            let total: Complex64 = w.iter().sum();
            assert_eq!(path.len(), n);
            assert!((path.endpoint().re - total.re).abs() < 1e-12);
            assert!((path.endpoint().im - total.im).abs() < 1e-12);
        }
    }

    #[test]
    fn wrap_phase_covers_boundaries() {
        assert_eq!(wrap_phase(PI), PI);
        assert_eq!(wrap_phase(-PI), PI);
        assert!((wrap_phase(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert_eq!(wrap_phase(0.0), 0.0);
    }

    #[test]
    fn arg_of_zero_is_zero() {
        assert_eq!(arg_or_zero(c(0.0, 0.0)), 0.0);
        assert!((arg_or_zero(c(0.0, 1.0)) - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn target_phase_wraps_into_half_open_interval() {
        let t = SymbolTarget::new(3.0, 3.0 * PI / 2.0).unwrap();
        assert!((t.phase() + PI / 2.0).abs() < 1e-12);
        assert!(SymbolTarget::new(-1.0, 0.0).is_err());
        assert!(SymbolTarget::new(f64::NAN, 0.0).is_err());
    }

    #[test]
    fn csv_is_deterministic() {
        let path = path_from_weights(&[c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let mut a = Vec::new();
        let mut b = Vec::new();
        path.write_csv(&mut a).unwrap();
        path.write_csv(&mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.starts_with("step_index,step_re,step_im,cum_re,cum_im\n"));
        assert_eq!(text.lines().count(), 3);
    }
}
