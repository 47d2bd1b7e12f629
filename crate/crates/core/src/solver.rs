//! Roots of `H_D^d(E)` in the complex plane and their continuation in `D`.
//!
//! Each root is polished by damped Newton iteration with a central-difference
//! derivative. A sequence `E^[D,d]` is built by seeding dimension `D + 1` with
//! the converged root at `D`; the spread of successive roots certifies digits.

use rug::ops::Pow;
use rug::{Assign, Complex, Float};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hankel::{condensed_value, HankelIndex};
use crate::potential::{Parity, PolynomialPotential};
use crate::precision::{dimension_floor_bits, PrecisionPolicy};
use crate::series::series_at_bits;

const MAX_NEWTON_ITERATIONS: usize = 100;
const MAX_HALVINGS: u32 = 12;

/// One converged root `E^[D,d]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyEstimate {
    pub value: Complex,
    pub index: HankelIndex,
    /// Final Newton correction relative to `max(1, |E|)`.
    pub residual: Float,
    pub newton_iterations: usize,
    pub working_bits: u32,
}

impl EnergyEstimate {
    pub fn re(&self) -> &Float {
        self.value.real()
    }

    pub fn im(&self) -> &Float {
        self.value.imag()
    }
}

/// Roots `E^[D,d]` for consecutive `D` at fixed `d`, plus `|E^[D] - E^[D-1]|`.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSequence {
    pub entries: Vec<EnergyEstimate>,
    pub diffs: Vec<Float>,
}

impl RootSequence {
    pub fn offset(&self) -> Option<usize> {
        self.entries.first().map(|e| e.index.offset)
    }

    pub fn last(&self) -> Option<&EnergyEstimate> {
        self.entries.last()
    }

    /// `(D, log10 |E^[D] - E^[D-1]|)` for every nonzero diff.
    pub fn log_diffs(&self) -> Vec<(usize, f64)> {
        self.entries
            .iter()
            .skip(1)
            .zip(&self.diffs)
            .filter(|(_, d)| !d.is_zero())
            .map(|(e, d)| (e.index.dimension, log10(d)))
            .collect()
    }

    fn push(&mut self, estimate: EnergyEstimate) {
        if let Some(prev) = self.entries.last() {
            let prec = estimate.working_bits.max(prev.working_bits);
            let delta = Complex::with_val(prec, &estimate.value - &prev.value);
            self.diffs.push(Float::with_val(prec, delta.abs_ref()));
        }
        self.entries.push(estimate);
    }
}

pub fn log10(x: &Float) -> f64 {
    Float::with_val(64, x.log10_ref()).to_f64()
}

/// Position and width of a complex eigenvalue, `Gamma = 2 |Im E|`.
#[derive(Debug, Clone, PartialEq)]
pub struct Resonance {
    pub position: Float,
    pub half_width: Float,
    pub width: Float,
}

/// Least-squares line `log10 diff = a + b D`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit {
    pub intercept: f64,
    pub slope: f64,
    pub fit_range: (usize, usize),
    /// Standard error of the fitted slope.
    pub slope_error: f64,
    /// Root-mean-square deviation of the fitted points from the line.
    pub rms_residual: f64,
    pub points: Vec<(usize, f64)>,
}

/// `H_D^d(E)` through the condensation table at precision `prec`.
pub fn hankel_at(
    potential: &PolynomialPotential,
    parity: Parity,
    index: HankelIndex,
    energy: &Complex,
    prec: u32,
) -> Complex {
    let coeffs = series_at_bits(potential, parity, energy, index.highest_coefficient(), prec);
    condensed_value(&coeffs.values, index)
}

/// Target function for Newton: the determinant, optionally divided by
/// `prod (E - r)` over already-known roots.
#[derive(Clone, Copy)]
struct Objective<'a> {
    potential: &'a PolynomialPotential,
    parity: Parity,
    index: HankelIndex,
    exclude: &'a [Complex],
    prec: u32,
}

impl Objective<'_> {
    fn eval(&self, e: &Complex) -> Complex {
        let mut h = hankel_at(self.potential, self.parity, self.index, e, self.prec);
        for r in self.exclude {
            h /= Complex::with_val(self.prec, e - r);
        }
        h
    }
}

fn abs(z: &Complex) -> Float {
    Float::with_val(z.prec().0, z.abs_ref())
}

fn one_or_abs(z: &Complex) -> Float {
    abs(z).max(&Float::with_val(z.prec().0, 1))
}

fn pow2(prec: u32, exp: i32) -> Float {
    Float::with_val(prec, Float::i_exp(1, exp))
}

struct NewtonOutcome {
    value: Complex,
    iterations: usize,
}

fn newton(objective: &Objective<'_>, guess: &Complex) -> Result<NewtonOutcome> {
    let prec = objective.prec;
    let bits = prec as i32;
    let mut e = Complex::with_val(prec, guess);
    let mut g0 = objective.eval(&e);
    let noise_floor = pow2(prec, -bits + 8);
    let local = pow2(prec, -16);
    let half = pow2(prec, -bits / 2);
    let mut prev_rel: Option<Float> = None;
    let mut flat = 0;
    let mut last_ratio: Option<f64> = None;
    for iteration in 1..=MAX_NEWTON_ITERATIONS {
        let scale = one_or_abs(&e);
        if g0.is_zero() {
            return Ok(NewtonOutcome {
                value: e,
                iterations: iteration - 1,
            });
        }
        // difference step: 2^(-p/3), shrunk towards the last correction so
        // clustered neighbouring roots stay outside the stencil
        let mut h_rel = pow2(prec, -bits / 3);
        if let Some(prev) = &prev_rel {
            if *prev < h_rel {
                h_rel = prev.clone().max(&pow2(prec, -bits / 2));
            }
        }
        let h = Float::with_val(prec, &scale * &h_rel);
        let plus = objective.eval(&Complex::with_val(prec, &e + &h));
        let minus = objective.eval(&Complex::with_val(prec, &e - &h));
        let mut deriv = Complex::with_val(prec, &plus - &minus);
        deriv /= Float::with_val(prec, &h * 2u32);
        if deriv.is_zero() || !deriv.real().is_finite() || !deriv.imag().is_finite() {
            return Err(Error::NoConvergence {
                iterations: iteration,
                reason: "vanishing or non-finite derivative".into(),
            });
        }
        let mut step = Complex::with_val(prec, &g0 / &deriv);
        let step_rel = abs(&step) / &scale;
        if step_rel <= noise_floor {
            return Ok(NewtonOutcome {
                value: e,
                iterations: iteration,
            });
        }
        if let Some(prev) = &prev_rel {
            if step_rel < half && Float::with_val(prec, &step_rel * 2u32) >= *prev {
                flat += 1;
            } else {
                flat = 0;
            }
        }
        // corrections stopped contracting: they are rounding noise
        if flat >= 2 {
            return Ok(NewtonOutcome {
                value: e,
                iterations: iteration,
            });
        }
        // steady linear contraction means a root cluster seen from outside,
        // which behaves like a root of multiplicity m ~ 1 / (1 - ratio)
        if let Some(prev) = &prev_rel {
            let ratio = Float::with_val(53, &step_rel / prev).to_f64();
            if let Some(last_ratio) = last_ratio {
                let steady = (ratio - last_ratio).abs() < 0.05;
                if steady && ratio > 0.5 && ratio < 0.999 {
                    let multiplicity = (1.0 / (1.0 - ratio)).round().min(1000.0);
                    step *= multiplicity as u32;
                }
            }
            last_ratio = Some(ratio);
        }
        let g0_abs = abs(&g0);
        let mut lambda = Float::with_val(prec, 1);
        let mut candidate = Complex::with_val(prec, &e - &step);
        let mut g_candidate = objective.eval(&candidate);
        let mut halvings = 0;
        while abs(&g_candidate) > g0_abs && halvings < MAX_HALVINGS && (step_rel > local || last_ratio.is_some_and(|r| r > 0.5)) {
            lambda /= 2u32;
            candidate.assign(&e - Complex::with_val(prec, &step * &lambda));
            g_candidate = objective.eval(&candidate);
            halvings += 1;
        }
        if !candidate.real().is_finite() || !candidate.imag().is_finite() {
            return Err(Error::NoConvergence {
                iterations: iteration,
                reason: "iterate left the finite range".into(),
            });
        }
        prev_rel = Some(Float::with_val(prec, abs(&step) / &scale * &lambda));
        e = candidate;
        g0 = g_candidate;
    }
    Err(Error::NoConvergence {
        iterations: MAX_NEWTON_ITERATIONS,
        reason: "iteration cap reached".into(),
    })
}

/// Polish the root of `H_D^d` nearest `guess`.
///
/// Precision escalates through `policy` until the final Newton correction is
/// below `2^(-working_bits/2)` relative to `max(1, |E|)`.
pub fn refine_root(
    potential: &PolynomialPotential,
    parity: Parity,
    index: HankelIndex,
    guess: &Complex,
    policy: &PrecisionPolicy,
) -> Result<EnergyEstimate> {
    refine_root_excluding(potential, parity, index, guess, policy, &[])
}

/// [`refine_root`] on `H_D^d(E) / prod (E - r)`, which keeps Newton away from
/// the roots `r` in `exclude` (e.g. a bound state lying next to a resonance).
pub fn refine_root_excluding(
    potential: &PolynomialPotential,
    parity: Parity,
    index: HankelIndex,
    guess: &Complex,
    policy: &PrecisionPolicy,
    exclude: &[Complex],
) -> Result<EnergyEstimate> {
    policy.validate()?;
    if !guess.real().is_finite() || !guess.imag().is_finite() {
        return Err(Error::Domain("seed must be finite".into()));
    }
    let floor = dimension_floor_bits(index.dimension, policy.target_digits);
    let mut policy = policy.at_least(floor.min(policy.max_bits))?;
    let mut start = guess.clone();
    loop {
        let prec = policy.working_bits;
        let objective = Objective {
            potential,
            parity,
            index,
            exclude,
            prec,
        };
        let outcome = newton(&objective, &start)?;
        if let Some(residual) = verify_root(&objective, &outcome.value) {
            return Ok(EnergyEstimate {
                value: outcome.value,
                index,
                residual,
                newton_iterations: outcome.iterations,
                working_bits: prec,
            });
        }
        start = outcome.value;
        policy = policy.escalated()?;
    }
}

/// Check a Newton result against evaluations at 1.5x the working precision.
///
/// With `delta = 2^(-p/2) max(1, |E|)`, the root offset is estimated from the
/// secant through `E` and `E + delta` at the higher precision, and the
/// working-precision value at `E + delta` must agree with it to a quarter of
/// the secant rise. Returns the relative offset when it is below
/// `2^(-p/2)`.
fn verify_root(objective: &Objective<'_>, e: &Complex) -> Option<Float> {
    let prec = objective.prec;
    let check = Objective {
        prec: prec + prec / 2,
        ..*objective
    };
    let scale = one_or_abs(e);
    let delta = Float::with_val(check.prec, &scale * pow2(check.prec, -(prec as i32) / 2));
    let shifted = Complex::with_val(check.prec, e + &delta);
    let g_e = check.eval(&Complex::with_val(check.prec, e));
    let g_d = check.eval(&shifted);
    let rise = abs(&Complex::with_val(check.prec, &g_d - &g_e));
    if rise.is_zero() || !rise.is_finite() {
        return None;
    }
    // a second root within the stencil shows up as curvature
    let g_2d = check.eval(&Complex::with_val(check.prec, &shifted + &delta));
    let mut curvature = Complex::with_val(check.prec, &g_2d - &g_e);
    curvature -= Complex::with_val(check.prec, &g_d - &g_e) * 2u32;
    if abs(&curvature) > Float::with_val(check.prec, &rise / 4u32) {
        return None;
    }
    let low = objective.eval(&Complex::with_val(prec, &shifted));
    let noise = abs(&Complex::with_val(check.prec, &low - &g_d));
    if noise > Float::with_val(check.prec, &rise / 4u32) {
        return None;
    }
    let offset = abs(&g_e) / &rise * &delta / &scale;
    if offset < pow2(prec, -(prec as i32) / 2) {
        Some(Float::with_val(prec, offset))
    } else {
        None
    }
}

/// Configuration for building a [`RootSequence`].
#[derive(Debug, Clone)]
pub struct Tracker {
    pub offset: usize,
    pub dimension_min: usize,
    pub dimension_max: usize,
    /// Stop once the last two diffs both certify `policy.target_digits`.
    pub stop_when_certified: bool,
    /// Consecutive non-improving diffs that trigger a precision escalation.
    pub stall_limit: usize,
}

impl Tracker {
    pub fn new(offset: usize, dimension_min: usize, dimension_max: usize) -> Self {
        Tracker {
            offset,
            dimension_min,
            dimension_max,
            stop_when_certified: true,
            stall_limit: 3,
        }
    }

    pub fn run_to_end(mut self) -> Self {
        self.stop_when_certified = false;
        self
    }

    /// Continue the root nearest `guess` from `dimension_min` upwards.
    pub fn run(
        &self,
        potential: &PolynomialPotential,
        parity: Parity,
        guess: &Complex,
        policy: &PrecisionPolicy,
    ) -> Result<RootSequence> {
        self.run_excluding(potential, parity, guess, policy, |_, _| Ok(Vec::new()))
    }

    /// As [`Tracker::run`], deflating at each `D` the roots returned by
    /// `exclude(D)`.
    ///
    /// A seed that fails to converge at the first dimension is first carried
    /// up from a smaller dimension. A failure further along restarts the
    /// sequence just past the failing dimension.
    pub fn run_excluding<F>(
        &self,
        potential: &PolynomialPotential,
        parity: Parity,
        guess: &Complex,
        policy: &PrecisionPolicy,
        mut exclude: F,
    ) -> Result<RootSequence>
    where
        F: FnMut(usize, &PrecisionPolicy) -> Result<Vec<Complex>>,
    {
        if self.dimension_min < 1 || self.dimension_max < self.dimension_min {
            return Err(Error::Domain(format!(
                "invalid dimension range {}..={}",
                self.dimension_min, self.dimension_max
            )));
        }
        policy.validate()?;
        let mut start = self.dimension_min;
        let mut restarts = 0;
        loop {
            let attempt = self
                .bootstrap(potential, parity, start, guess, policy, &mut exclude)
                .and_then(|seed| self.run_from(potential, parity, start, &seed, policy, &mut exclude));
            match attempt {
                Ok(sequence) => return Ok(sequence),
                Err((dimension, err)) => {
                    // no root near the guess at this size: try past it
                    let next = if dimension > start { dimension + 1 } else { start + (start / 2).max(2) };
                    let retry = matches!(err, Error::NoConvergence { .. })
                        && next <= self.dimension_max
                        && restarts < MAX_RESTARTS;
                    if !retry {
                        return Err(err.at_dimension(dimension));
                    }
                    restarts += 1;
                    start = next;
                }
            }
        }
    }

    /// Seed for the first dimension: the raw guess when it converges there,
    /// otherwise the root continued from `start / 2`.
    fn bootstrap(
        &self,
        potential: &PolynomialPotential,
        parity: Parity,
        start: usize,
        guess: &Complex,
        policy: &PrecisionPolicy,
        exclude: &mut dyn FnMut(usize, &PrecisionPolicy) -> Result<Vec<Complex>>,
    ) -> std::result::Result<Complex, (usize, Error)> {
        let at = |e: Error| (start, e);
        let index = HankelIndex::new(start, self.offset).map_err(at)?;
        let policy = policy
            .at_least(dimension_floor_bits(start, policy.target_digits))
            .map_err(at)?;
        let excluded = exclude(start, &policy).map_err(at)?;
        match refine_root_excluding(potential, parity, index, guess, &policy, &excluded) {
            Ok(estimate) => Ok(estimate.value),
            Err(err @ Error::NoConvergence { .. }) if start >= 4 => {
                let lower = Tracker {
                    dimension_min: start / 2,
                    dimension_max: start - 1,
                    stop_when_certified: false,
                    ..self.clone()
                };
                let mut relaxed = policy.clone();
                relaxed.target_digits = 0;
                let lower_start = lower.dimension_min;
                lower
                    .bootstrap(potential, parity, lower_start, guess, &relaxed, exclude)
                    .and_then(|seed| lower.run_from(potential, parity, lower_start, &seed, &relaxed, exclude))
                    .ok()
                    .and_then(|sequence| sequence.last().map(|e| e.value.clone()))
                    .ok_or((start, err))
            }
            Err(err) => Err((start, err)),
        }
    }

    fn run_from(
        &self,
        potential: &PolynomialPotential,
        parity: Parity,
        start: usize,
        guess: &Complex,
        policy: &PrecisionPolicy,
        exclude: &mut dyn FnMut(usize, &PrecisionPolicy) -> Result<Vec<Complex>>,
    ) -> std::result::Result<RootSequence, (usize, Error)> {
        let mut policy = policy.clone();
        let base_bits = policy.working_bits;
        let mut sequence = RootSequence {
            entries: Vec::new(),
            diffs: Vec::new(),
        };
        let mut seed = guess.clone();
        let mut best_diff: Option<Float> = None;
        let mut stalled = 0;
        let mut dimension = start;
        while dimension <= self.dimension_max {
            let at = |e: Error| (dimension, e);
            let index = HankelIndex::new(dimension, self.offset).map_err(at)?;
            let wanted = dimension_floor_bits(dimension, policy.target_digits)
                .max(base_bits)
                .max(stencil_bits(&sequence.diffs));
            if wanted > policy.working_bits {
                policy = policy.at_least(wanted).map_err(at)?;
            }
            let excluded = exclude(dimension, &policy).map_err(at)?;
            let estimate =
                refine_root_excluding(potential, parity, index, &seed, &policy, &excluded).map_err(at)?;
            if estimate.working_bits > policy.working_bits {
                policy = policy.at_least(estimate.working_bits).map_err(at)?;
            }
            seed = estimate.value.clone();
            sequence.push(estimate);
            if let Some(diff) = sequence.diffs.last() {
                match &best_diff {
                    Some(best) if diff >= best => stalled += 1,
                    _ => {
                        best_diff = Some(diff.clone());
                        stalled = 0;
                    }
                }
                // two in a row: neighbouring roots occasionally cross and
                // leave one accidentally tiny diff
                let certifies = |d: &Float| certified_digits(d, &policy) >= policy.target_digits;
                let confirmed = match sequence.diffs.as_slice() {
                    [.., prev, last] => certifies(prev) && certifies(last),
                    _ => policy.target_digits == 0,
                };
                if self.stop_when_certified && confirmed {
                    break;
                }
            } else if self.stop_when_certified && policy.target_digits == 0 {
                break;
            }
            if stalled >= self.stall_limit {
                // diffs sit on the rounding floor: redo this dimension with more bits
                policy = policy.escalated().map_err(at)?;
                stalled = 0;
                best_diff = None;
                let excluded = exclude(dimension, &policy).map_err(at)?;
                let estimate =
                    refine_root_excluding(potential, parity, index, &seed, &policy, &excluded).map_err(at)?;
                seed = estimate.value.clone();
                let last = sequence.entries.len() - 1;
                sequence.entries[last] = estimate;
                if last > 0 {
                    let prec = policy.working_bits;
                    let delta = Complex::with_val(
                        prec,
                        &sequence.entries[last].value - &sequence.entries[last - 1].value,
                    );
                    sequence.diffs[last - 1] = Float::with_val(prec, delta.abs_ref());
                }
            }
            dimension += 1;
        }
        Ok(sequence)
    }
}

const MAX_RESTARTS: usize = 16;

/// Precision that keeps the `2^(-p/3)` difference stencil below the accuracy
/// expected at the next dimension, extrapolated from the last two diffs.
fn stencil_bits(diffs: &[Float]) -> u32 {
    let bits_of = |d: &Float| {
        if d.is_zero() {
            0.0
        } else {
            -log10(d) / std::f64::consts::LOG10_2
        }
    };
    let (last, prev) = match diffs {
        [.., prev, last] => (bits_of(last), bits_of(prev)),
        [last] => (bits_of(last), bits_of(last)),
        [] => return 0,
    };
    let expected = (last + (last - prev).max(0.0)).max(0.0);
    (3.0 * expected) as u32 + 64
}

/// Continue the root nearest `guess` over `D = D_min..=D_max` at offset `d`,
/// stopping early once `policy.target_digits` are certified.
pub fn track_sequence(
    potential: &PolynomialPotential,
    parity: Parity,
    offset: usize,
    dimension_min: usize,
    dimension_max: usize,
    guess: &Complex,
    policy: &PrecisionPolicy,
) -> Result<RootSequence> {
    Tracker::new(offset, dimension_min, dimension_max).run(potential, parity, guess, policy)
}

/// Continue a root while deflating, at every `D`, the root of `avoid` at the
/// same dimension. Keeps a resonance from collapsing onto a nearby bound state.
pub fn track_avoiding(
    tracker: &Tracker,
    potential: &PolynomialPotential,
    parity: Parity,
    guess: &Complex,
    policy: &PrecisionPolicy,
    avoid: &RootSequence,
) -> Result<RootSequence> {
    // the deflation only shapes the Newton basin, so the excluded value need
    // not carry full precision; roots past the end of `avoid` sit closer to
    // its last entry than that entry's own diff
    tracker.run_excluding(potential, parity, guess, policy, |dimension, policy| {
        let (Some(first), Some(last)) = (avoid.entries.first(), avoid.entries.last()) else {
            return Ok(Vec::new());
        };
        if dimension >= first.index.dimension {
            let entry = avoid
                .entries
                .iter()
                .find(|e| e.index.dimension == dimension)
                .unwrap_or(last);
            return Ok(vec![entry.value.clone()]);
        }
        let index = HankelIndex::new(dimension, first.index.offset)?;
        Ok(refine_root(potential, parity, index, &first.value, policy)
            .map(|e| vec![e.value])
            .unwrap_or_default())
    })
}

/// `floor(-log10 diff) - 2`, clamped at zero. An exactly vanishing diff
/// certifies the digits carried by the working precision.
pub fn certified_digits(diff: &Float, policy: &PrecisionPolicy) -> u32 {
    let raw = if diff.is_zero() {
        (f64::from(policy.working_bits) * std::f64::consts::LOG10_2).floor()
    } else {
        (-log10(diff)).floor()
    };
    (raw - 2.0).max(0.0) as u32
}

/// The last estimate and its certified digit count; fails with
/// `NotConverged` when fewer than `target_digits` are certified.
pub fn converged_eigenvalue(sequence: &RootSequence, target_digits: u32) -> Result<(EnergyEstimate, u32)> {
    let last = sequence
        .entries
        .last()
        .ok_or_else(|| Error::Domain("empty root sequence".into()))?;
    let certified = match sequence.diffs.last() {
        Some(diff) => {
            let policy = PrecisionPolicy::for_digits(0).with_working_bits(last.working_bits.max(34));
            certified_digits(diff, &policy)
        }
        None => 0,
    };
    if certified >= target_digits {
        Ok((last.clone(), certified))
    } else {
        Err(Error::NotConverged {
            certified,
            target: target_digits,
        })
    }
}

/// Lower (`d = 0`) and upper (`d = 1`) roots at dimension `D` for the ground
/// state of a quartic-class oscillator.
pub fn bound_pair(
    potential: &PolynomialPotential,
    parity: Parity,
    dimension: usize,
    policy: &PrecisionPolicy,
) -> Result<(EnergyEstimate, EnergyEstimate)> {
    let seed = ground_state_seed(potential, parity)?;
    let guess = Complex::with_val(policy.working_bits, (seed, 0));
    let run = |offset, guess: &Complex| {
        Tracker::new(offset, 2, dimension.max(2))
            .run_to_end()
            .run(potential, parity, guess, policy)
    };
    let lower = run(0, &guess)?;
    // from the harmonic seed the d = 1 tracker can lock onto a second
    // sequence that approaches from below; start it at the first d = 0 root
    let start = lower.entries.first().map(|e| e.value.clone()).unwrap_or(guess);
    let upper = run(1, &start)?;
    let last = |s: RootSequence| s.entries.last().cloned().ok_or_else(|| Error::Domain("empty sequence".into()));
    Ok((last(lower)?, last(upper)?))
}

/// Least-squares line through the trailing `fit_fraction` of the
/// `(D, log10 diff)` points.
pub fn convergence_slope(sequence: &RootSequence, fit_fraction: f64) -> Result<SlopeFit> {
    if sequence.diffs.iter().any(|d| d.is_zero()) {
        return Err(Error::DegenerateFit(
            "a diff is exactly zero (converged beyond working precision)".into(),
        ));
    }
    slope_from_points(&sequence.log_diffs(), fit_fraction)
}

/// The fit underlying [`convergence_slope`], on raw `(D, log10 diff)` points.
pub fn slope_from_points(points: &[(usize, f64)], fit_fraction: f64) -> Result<SlopeFit> {
    if points.len() < 4 {
        return Err(Error::DegenerateFit(format!(
            "{} points, at least 4 required",
            points.len()
        )));
    }
    if !(fit_fraction > 0.0 && fit_fraction <= 1.0) {
        return Err(Error::Domain(format!("fit fraction {fit_fraction} outside (0, 1]")));
    }
    let take = ((points.len() as f64 * fit_fraction).ceil() as usize).clamp(3, points.len());
    let tail = &points[points.len() - take..];
    let n = tail.len() as f64;
    let mean_x = tail.iter().map(|p| p.0 as f64).sum::<f64>() / n;
    let mean_y = tail.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = tail.iter().map(|p| (p.0 as f64 - mean_x).powi(2)).sum();
    let sxy: f64 = tail.iter().map(|p| (p.0 as f64 - mean_x) * (p.1 - mean_y)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit("all points share one dimension".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let sse: f64 = tail
        .iter()
        .map(|p| (p.1 - intercept - slope * p.0 as f64).powi(2))
        .sum();
    let slope_error = if tail.len() > 2 {
        (sse / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    if !slope.is_finite() {
        return Err(Error::DegenerateFit("non-finite slope".into()));
    }
    Ok(SlopeFit {
        intercept,
        slope,
        fit_range: (tail[0].0, tail[tail.len() - 1].0),
        slope_error,
        rms_residual: (sse / n).sqrt(),
        points: points.to_vec(),
    })
}

/// Seed for the lowest state of the given parity: the harmonic estimate
/// `sqrt(v_1) (1 + 2s)` when `v_1 > 0`, otherwise the scaling estimate
/// `v_K^(1/(K+1)) (1 + 2s)` of the pure `x^(2K)` oscillator.
pub fn ground_state_seed(potential: &PolynomialPotential, parity: Parity) -> Result<f64> {
    let level = f64::from(1 + 2 * parity.index());
    let v1 = potential.coefficients()[0].to_f64();
    if v1 > 0.0 {
        return Ok(v1.sqrt() * level);
    }
    let k = potential.degree_index();
    let lead = potential.coefficients()[k - 1].to_f64();
    if lead <= 0.0 {
        return Err(Error::Domain(
            "no harmonic or confining estimate for this potential; supply a seed".into(),
        ));
    }
    Ok(lead.powf(1.0 / (k as f64 + 1.0)) * level)
}

/// Real roots of `H_D^d` bracketed by sign changes on a uniform grid over
/// `[lo, hi]`, each polished by [`refine_root`].
pub fn scan_real_roots(
    potential: &PolynomialPotential,
    parity: Parity,
    index: HankelIndex,
    lo: f64,
    hi: f64,
    points: usize,
    policy: &PrecisionPolicy,
) -> Result<Vec<EnergyEstimate>> {
    policy.validate()?;
    let prec = policy.working_bits;
    let sign_at = |x: f64| {
        let h = hankel_at(potential, parity, index, &Complex::with_val(prec, (x, 0)), prec);
        h.real().cmp0()
    };
    let points = points.max(2);
    let step = (hi - lo) / (points - 1) as f64;
    let mut roots: Vec<EnergyEstimate> = Vec::new();
    let mut prev = (lo, sign_at(lo));
    for k in 1..points {
        let x = lo + step * k as f64;
        let s = sign_at(x);
        if let (Some(a), Some(b)) = (prev.1, s) {
            if a != b {
                let guess = Complex::with_val(prec, ((prev.0 + x) / 2.0, 0));
                if let Ok(est) = refine_root(potential, parity, index, &guess, policy) {
                    let dup = roots.iter().any(|r| {
                        let d = Complex::with_val(prec, &r.value - &est.value);
                        abs(&d) < Float::with_val(prec, step / 4.0)
                    });
                    if !dup {
                        roots.push(est);
                    }
                }
            }
        }
        prev = (x, s);
    }
    roots.sort_by(|a, b| a.re().partial_cmp(b.re()).unwrap_or(std::cmp::Ordering::Equal));
    Ok(roots)
}

/// `10^(-digits)` as an MPFR float.
pub fn ten_pow_neg(digits: u32, prec: u32) -> Float {
    Float::with_val(prec, 10u32).pow(-(digits as i32))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{qes_model, QesLabel};

    #[test]
    fn certification_keeps_two_guard_digits() {
        let policy = PrecisionPolicy::for_digits(30).with_working_bits(256);
        let diff = Float::with_val(256, Float::parse("1e-42").unwrap());
        assert_eq!(certified_digits(&diff, &policy), 40);
        assert_eq!(certified_digits(&Float::with_val(256, 0.5), &policy), 0);
        // 256 bits carry 77 decimal digits
        assert_eq!(certified_digits(&Float::new(256), &policy), 75);
    }

    #[test]
    fn slope_of_a_geometric_sequence() {
        let points: Vec<(usize, f64)> = (10..30).map(|d| (d, 3.0 - 2.0 * d as f64)).collect();
        let fit = slope_from_points(&points, 0.5).unwrap();
        assert!((fit.slope + 2.0).abs() < 1e-12);
        assert!((fit.intercept - 3.0).abs() < 1e-10);
        assert_eq!(fit.fit_range, (20, 29));
        assert!(fit.slope_error < 1e-12);
    }

    #[test]
    fn too_few_points_is_degenerate() {
        let points = [(2, -1.0), (3, -2.0), (4, -3.0)];
        assert!(matches!(slope_from_points(&points, 1.0), Err(Error::DegenerateFit(_))));
        assert!(matches!(slope_from_points(&[(2, -1.0); 6], 1.0), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn zero_diff_is_degenerate() {
        let potential = PolynomialPotential::parse("1,1").unwrap();
        let policy = PrecisionPolicy::for_digits(10);
        let guess = Complex::with_val(policy.working_bits, (1.4, 0));
        let mut seq = Tracker::new(0, 2, 10)
            .run_to_end()
            .run(&potential, Parity::Even, &guess, &policy)
            .unwrap();
        assert!(convergence_slope(&seq, 0.5).is_ok());
        seq.diffs[4] = Float::new(policy.working_bits);
        assert!(matches!(convergence_slope(&seq, 0.5), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn newton_lands_on_the_exact_root() {
        let model = qes_model(QesLabel::V1);
        let policy = PrecisionPolicy::for_digits(30);
        let index = HankelIndex::new(2, 0).unwrap();
        let guess = Complex::with_val(policy.working_bits, (-1.9, 0));
        let root = refine_root(&model.potential, model.parity, index, &guess, &policy).unwrap();
        let err = Complex::with_val(policy.working_bits, &root.value + 2u32);
        assert!(log10(&Float::with_val(64, err.abs_ref())) < -30.0);
    }

    #[test]
    fn resonances_come_in_conjugate_pairs() {
        let potential = PolynomialPotential::parse("1,-1/10").unwrap();
        let policy = PrecisionPolicy::for_digits(20);
        let index = HankelIndex::new(12, 0).unwrap();
        let below = Complex::with_val(policy.working_bits, (0.9, -0.007));
        let above = Complex::with_val(policy.working_bits, (0.9, 0.007));
        let a = refine_root(&potential, Parity::Even, index, &below, &policy).unwrap();
        let b = refine_root(&potential, Parity::Even, index, &above, &policy).unwrap();
        let gap = Complex::with_val(policy.working_bits, &a.value - b.value.clone().conj());
        assert!(log10(&Float::with_val(64, gap.abs_ref())) < -20.0);
        assert!(a.im().is_sign_negative());
    }

    #[test]
    fn quartic_converges_with_two_certifying_diffs() {
        let potential = PolynomialPotential::parse("1,1").unwrap();
        let policy = PrecisionPolicy::for_digits(15);
        let guess = Complex::with_val(policy.working_bits, (1.4, 0));
        let seq = track_sequence(&potential, Parity::Even, 0, 2, 60, &guess, &policy).unwrap();
        let (estimate, digits) = converged_eigenvalue(&seq, 15).unwrap();
        assert!(digits >= 15);
        let tail: Vec<u32> = seq.diffs.iter().rev().take(2).map(|d| certified_digits(d, &policy)).collect();
        assert!(tail.iter().all(|&c| c >= 15));
        assert_eq!(estimate.re().to_string_radix(10, Some(12)), "1.39235164153");
    }

    #[test]
    fn seeds() {
        let quartic = PolynomialPotential::parse("1,1").unwrap();
        assert_eq!(ground_state_seed(&quartic, Parity::Odd).unwrap(), 3.0);
        let pure = PolynomialPotential::parse("0,1").unwrap();
        assert!((ground_state_seed(&pure, Parity::Even).unwrap() - 1.0).abs() < 1e-12);
        let inverted = PolynomialPotential::parse("-1,-1").unwrap();
        assert!(matches!(ground_state_seed(&inverted, Parity::Even), Err(Error::Domain(_))));
    }
}
