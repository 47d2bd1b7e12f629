//! Bound state and even resonance of the three-well family across couplings.
//!
//! The bound state is tracked from the harmonic estimate. The resonance is
//! tracked from just below the bound state with that root deflated at every
//! dimension, so the two never merge while they are unresolved.

use rayon::prelude::*;
use rug::{Complex, Float, Rational};

use crate::error::Result;
use crate::models::{three_well, wkb_scaled_width, ThreeWellModel};
use crate::potential::Parity;
use crate::precision::PrecisionPolicy;
use crate::solver::{converged_eigenvalue, ground_state_seed, track_avoiding, EnergyEstimate, RootSequence, Tracker};

/// Offset of the default resonance seed below the real axis.
pub const RESONANCE_SEED_OFFSET: f64 = 1e-3;

#[derive(Debug, Clone)]
pub struct ScanSettings {
    pub k: u32,
    pub dimension_min: usize,
    pub dimension_max: usize,
    pub policy: PrecisionPolicy,
    /// Overrides for the default seeds.
    pub bound_seed: Option<Complex>,
    pub resonance_seed: Option<Complex>,
}

impl ScanSettings {
    pub fn new(k: u32, policy: PrecisionPolicy) -> Self {
        ScanSettings {
            k,
            dimension_min: 10,
            dimension_max: 120,
            policy,
            bound_seed: None,
            resonance_seed: None,
        }
    }
}

/// Both root sequences of one coupling.
#[derive(Debug, Clone)]
pub struct ThreeWellSequences {
    pub model: ThreeWellModel,
    pub bound: RootSequence,
    pub resonance: RootSequence,
}

fn lower_half_plane(z: Complex) -> Complex {
    if z.imag().is_sign_positive() && !z.imag().is_zero() {
        z.conj()
    } else {
        z
    }
}

/// Track both states at `g` with `tracker`'s stopping rule.
pub fn three_well_sequences(g: &Rational, settings: &ScanSettings, tracker: &Tracker) -> Result<ThreeWellSequences> {
    let model = three_well(g, settings.k)?;
    let prec = settings.policy.working_bits;
    let bound_seed = match &settings.bound_seed {
        Some(seed) => seed.clone(),
        None => Complex::with_val(prec, (ground_state_seed(&model.potential, Parity::Even)?, 0)),
    };
    let bound = tracker.run(&model.potential, Parity::Even, &bound_seed, &settings.policy)?;
    let resonance_seed = match &settings.resonance_seed {
        Some(seed) => seed.clone(),
        None => {
            let at = bound.last().map(|e| e.value.real().clone()).unwrap_or_else(|| Float::with_val(prec, 1));
            Complex::with_val(prec, (at, -RESONANCE_SEED_OFFSET))
        }
    };
    let resonance = track_avoiding(tracker, &model.potential, Parity::Even, &resonance_seed, &settings.policy, &bound)?;
    Ok(ThreeWellSequences {
        model,
        bound,
        resonance,
    })
}

/// One row of a coupling scan.
#[derive(Debug, Clone)]
pub struct ThreeWellPoint {
    pub g: Rational,
    pub bound: EnergyEstimate,
    pub bound_digits: u32,
    /// Normalised to `Im E <= 0`.
    pub resonance: Complex,
    pub resonance_digits: u32,
    /// `|Im E| g^2 e^(1/(2 g^2))`.
    pub scaled_width: Float,
    /// `|E_bs - Re E_res|`.
    pub gap: Float,
}

/// Certified bound state and resonance at `g`.
pub fn three_well_point(g: &Rational, settings: &ScanSettings) -> Result<ThreeWellPoint> {
    let tracker = Tracker::new(0, settings.dimension_min, settings.dimension_max);
    let target = settings.policy.target_digits;
    let runs = three_well_sequences(g, settings, &tracker)?;
    let (bound, bound_digits) = converged_eigenvalue(&runs.bound, target)?;
    let (resonance, resonance_digits) = converged_eigenvalue(&runs.resonance, target)?;
    let resonance = lower_half_plane(resonance.value);
    let prec = resonance.prec().0;
    let g_float = Float::with_val(prec, g);
    let half_width = Float::with_val(prec, resonance.imag().abs_ref());
    let scaled_width = wkb_scaled_width(&g_float, &half_width)?.scaled_width;
    let gap = Float::with_val(prec, bound.value.real() - resonance.real()).abs();
    Ok(ThreeWellPoint {
        g: g.clone(),
        bound,
        bound_digits,
        resonance,
        resonance_digits,
        scaled_width,
        gap,
    })
}

/// Independent rows, one per coupling, in input order.
pub fn scan_three_well(couplings: &[Rational], settings: &ScanSettings) -> Vec<Result<ThreeWellPoint>> {
    couplings.par_iter().map(|g| three_well_point(g, settings)).collect()
}
