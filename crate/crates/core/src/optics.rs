//! Analytic model of the real optical experiment: balanced-beamsplitter
//! state preparation, scattering on a thin lossy film, and per-detector
//! probabilities.
//!
//! This module is the independent cross-check for the transmon side and
//! deliberately shares no code with [`crate::qutrit`] or the pulse
//! backends. Loss is tracked as a single aggregated environment mode,
//! which is sufficient for single-photon probability questions; the loss
//! amplitude is kept real and non-negative since its phase is unobservable.

use num_complex::Complex64 as C64;
use std::f64::consts::FRAC_PI_2;
use thiserror::Error;

/// Tolerance for passivity and normalization checks.
pub const PASSIVITY_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum OpticsError {
    #[error("eigenmode gain: |t ± r|² = {0} exceeds 1")]
    EigenmodeGain(f64),
    #[error("traveling-wave absorption {0} outside [0, 1]")]
    AbsorptionOutOfRange(f64),
    #[error("visibility {0} outside [0, 1]")]
    VisibilityOutOfRange(f64),
}

/// Single-photon state over the two interferometer paths plus one
/// aggregated loss mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonModeState {
    pub amp_pa: C64,
    pub amp_pb: C64,
    pub amp_loss: C64,
}

impl PhotonModeState {
    /// # Panics
    /// If the three amplitudes are not normalized within [`PASSIVITY_TOL`].
    pub fn new(amp_pa: C64, amp_pb: C64, amp_loss: C64) -> Self {
        let norm_sq = amp_pa.norm_sqr() + amp_pb.norm_sqr() + amp_loss.norm_sqr();
        assert!(
            (norm_sq - 1.0).abs() <= PASSIVITY_TOL,
            "photon state not normalized: {norm_sq}"
        );
        Self {
            amp_pa,
            amp_pb,
            amp_loss,
        }
    }

    pub fn probabilities(&self) -> (f64, f64, f64) {
        (
            self.amp_pa.norm_sqr(),
            self.amp_pb.norm_sqr(),
            self.amp_loss.norm_sqr(),
        )
    }
}

/// Complex amplitude transmission and reflection of the thin film.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbsorberParams {
    t: C64,
    r: C64,
}

impl AbsorberParams {
    /// Validates passivity of both eigenmodes (`|t ± r|² ≤ 1`) and that the
    /// traveling-wave absorption `1 − |t|² − |r|²` lies in `[0, 1]`.
    pub fn new(t: C64, r: C64) -> Result<Self, OpticsError> {
        let sym = (t + r).norm_sqr();
        let anti = (t - r).norm_sqr();
        if sym > 1.0 + PASSIVITY_TOL {
            return Err(OpticsError::EigenmodeGain(sym));
        }
        if anti > 1.0 + PASSIVITY_TOL {
            return Err(OpticsError::EigenmodeGain(anti));
        }
        let a_tw = 1.0 - t.norm_sqr() - r.norm_sqr();
        if !(-PASSIVITY_TOL..=1.0 + PASSIVITY_TOL).contains(&a_tw) {
            return Err(OpticsError::AbsorptionOutOfRange(a_tw));
        }
        Ok(Self { t, r })
    }

    pub fn from_real(t: f64, r: f64) -> Result<Self, OpticsError> {
        Self::new(C64::new(t, 0.0), C64::new(r, 0.0))
    }

    /// The film optimized for full absorption of the symmetric mode:
    /// `t = 0.5`, `r = −0.5`. Magnitudes follow the 25%/25%/50% power
    /// budget; the sign puts the absorbed eigenmode on the symmetric state.
    pub fn ideal() -> Self {
        Self::from_real(0.5, -0.5).expect("ideal film is passive")
    }

    pub fn transmission(&self) -> C64 {
        self.t
    }

    pub fn reflection(&self) -> C64 {
        self.r
    }

    /// Single-sided (traveling-wave) absorption `1 − |t|² − |r|²`.
    pub fn traveling_wave_absorption(&self) -> f64 {
        1.0 - self.t.norm_sqr() - self.r.norm_sqr()
    }
}

/// State after the input beamsplitter and phase delay:
/// `(|A⟩_P + e^{iφ}|B⟩_P)/√2`.
pub fn beamsplitter_phase(phi: f64) -> PhotonModeState {
    let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
    PhotonModeState::new(
        C64::new(inv_sqrt2, 0.0),
        C64::from_polar(inv_sqrt2, phi),
        C64::new(0.0, 0.0),
    )
}

/// Survival amplitudes of the film's eigenmodes: the symmetric mode scales
/// by `t + r`, the anti-symmetric mode by `t − r`.
pub fn eigenmode_amplitudes(abs: &AbsorberParams) -> (C64, C64) {
    (abs.t + abs.r, abs.t - abs.r)
}

/// Scatter a photon state on the film. Path amplitudes mix as
/// `a' = t·a + r·b`, `b' = t·b + r·a`; the probability deficit is folded
/// into the loss mode so the total norm stays 1.
pub fn film_scatter(abs: &AbsorberParams, state: &PhotonModeState) -> PhotonModeState {
    let amp_pa = abs.t * state.amp_pa + abs.r * state.amp_pb;
    let amp_pb = abs.t * state.amp_pb + abs.r * state.amp_pa;
    let before = state.amp_pa.norm_sqr() + state.amp_pb.norm_sqr();
    let after = amp_pa.norm_sqr() + amp_pb.norm_sqr();
    // Passivity guarantees a non-negative deficit up to rounding.
    let lost = (before - after).max(0.0);
    let amp_loss = C64::new((state.amp_loss.norm_sqr() + lost).sqrt(), 0.0);
    PhotonModeState::new(amp_pa, amp_pb, amp_loss)
}

/// Probabilities at the two single-photon detectors and of absorption in
/// the film, for an input photon with inner phase `phi`.
pub fn detector_probabilities(abs: &AbsorberParams, phi: f64) -> (f64, f64, f64) {
    film_scatter(abs, &beamsplitter_phase(phi)).probabilities()
}

/// Amplitude scale of the second control pulse that reproduces a given
/// fringe visibility: `amp_scale = (2/π)·arcsin(v)`.
pub fn visibility_to_amp_scale(v: f64) -> Result<f64, OpticsError> {
    if !(0.0..=1.0).contains(&v) {
        return Err(OpticsError::VisibilityOutOfRange(v));
    }
    Ok(v.asin() / FRAC_PI_2)
}
