//! Exact three-level state algebra: pure states, density matrices, subspace
//! rotations, and the closed-form two-pulse interference law.
//!
//! Drive-induced rotations use the convention
//! `[[cos(θ/2), −i·e^{−iφ}·sin(θ/2)], [−i·e^{iφ}·sin(θ/2), cos(θ/2)]]`
//! on the addressed two-level subspace, identity on the spectator level.
//! Only phase differences between pulses are observable, so any consistent
//! convention works; this one is used everywhere in the crate.

use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64 as C64;
use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

/// Tolerance for normalization, unitarity and hermiticity invariants.
pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum QutritError {
    #[error("amplitude scale {0} outside [0, 1]")]
    AmpScaleOutOfRange(f64),
}

/// Transmon levels: ground, first excited, second excited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    A,
    B,
    C,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::A, Level::B, Level::C];

    pub fn index(self) -> usize {
        match self {
            Level::A => 0,
            Level::B => 1,
            Level::C => 2,
        }
    }
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Level::A => write!(f, "A"),
            Level::B => write!(f, "B"),
            Level::C => write!(f, "C"),
        }
    }
}

/// Two-level subspace addressed by a resonant drive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subspace {
    AB,
    BC,
}

/// Reduce an angle to the canonical interval `(−π, π]`.
pub fn wrap_phase(phase: f64) -> f64 {
    let reduced = phase.rem_euclid(2.0 * PI);
    if reduced > PI {
        reduced - 2.0 * PI
    } else {
        reduced
    }
}

/// A rotation of angle `theta` about an equatorial axis set by `phase`,
/// acting on one two-level subspace of the qutrit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubspaceRotation {
    subspace: Subspace,
    theta: f64,
    phase: f64,
}

impl SubspaceRotation {
    /// Phase is reduced to `(−π, π]` so that rotations compare canonically.
    ///
    /// # Panics
    /// If `theta` is outside `[0, 2π]`.
    pub fn new(subspace: Subspace, theta: f64, phase: f64) -> Self {
        assert!(
            (0.0..=2.0 * PI).contains(&theta),
            "rotation angle {theta} outside [0, 2π]"
        );
        Self {
            subspace,
            theta,
            phase: wrap_phase(phase),
        }
    }

    pub fn subspace(&self) -> Subspace {
        self.subspace
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// The 3×3 unitary implementing this rotation.
    pub fn unitary(&self) -> Unitary3 {
        let half = 0.5 * self.theta;
        let cos = C64::new(half.cos(), 0.0);
        // −i·e^{∓iφ}·sin(θ/2)
        let upper = -C64::i() * C64::from_polar(half.sin(), -self.phase);
        let lower = -C64::i() * C64::from_polar(half.sin(), self.phase);
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let m = match self.subspace {
            Subspace::AB => Matrix3::new(cos, upper, zero, lower, cos, zero, zero, zero, one),
            Subspace::BC => Matrix3::new(one, zero, zero, zero, cos, upper, zero, lower, cos),
        };
        Unitary3::new(m)
    }
}

/// Build the rotation unitary directly from subspace, angle and drive phase.
pub fn rotation_unitary(rot: SubspaceRotation) -> Unitary3 {
    rot.unitary()
}

/// A 3×3 unitary matrix, checked at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary3 {
    u: Matrix3<C64>,
}

impl Unitary3 {
    /// # Panics
    /// If `u†u` deviates from the identity by more than [`NORM_TOL`] in any
    /// element.
    pub fn new(u: Matrix3<C64>) -> Self {
        let gram = u.adjoint() * u;
        let id = Matrix3::identity();
        let dev = (gram - id).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(dev <= NORM_TOL, "matrix is not unitary (deviation {dev:e})");
        Self { u }
    }

    pub fn identity() -> Self {
        Self {
            u: Matrix3::identity(),
        }
    }

    pub fn matrix(&self) -> &Matrix3<C64> {
        &self.u
    }

    /// Apply to a pure state; the norm is preserved by construction.
    pub fn apply(&self, state: &QutritState) -> QutritState {
        QutritState::from_vector(self.u * state.as_vector())
    }

    /// `self · other` (other acts first).
    pub fn compose(&self, other: &Unitary3) -> Unitary3 {
        Unitary3::new(self.u * other.u)
    }
}

/// Apply a unitary to a pure state.
pub fn apply(u: &Unitary3, state: &QutritState) -> QutritState {
    u.apply(state)
}

/// Normalized pure state over the three transmon levels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QutritState {
    pub amp_a: C64,
    pub amp_b: C64,
    pub amp_c: C64,
}

impl QutritState {
    /// # Panics
    /// If the amplitudes are not normalized within [`NORM_TOL`].
    pub fn new(amp_a: C64, amp_b: C64, amp_c: C64) -> Self {
        let norm_sq = amp_a.norm_sqr() + amp_b.norm_sqr() + amp_c.norm_sqr();
        assert!(
            (norm_sq - 1.0).abs() <= NORM_TOL,
            "state not normalized: |ψ|² = {norm_sq}"
        );
        Self { amp_a, amp_b, amp_c }
    }

    /// The ground state `|A⟩`.
    pub fn ground() -> Self {
        Self {
            amp_a: C64::new(1.0, 0.0),
            amp_b: C64::new(0.0, 0.0),
            amp_c: C64::new(0.0, 0.0),
        }
    }

    pub fn basis(level: Level) -> Self {
        let mut v = Vector3::zeros();
        v[level.index()] = C64::new(1.0, 0.0);
        Self::from_vector(v)
    }

    pub fn from_vector(v: Vector3<C64>) -> Self {
        Self::new(v[0], v[1], v[2])
    }

    pub fn as_vector(&self) -> Vector3<C64> {
        Vector3::new(self.amp_a, self.amp_b, self.amp_c)
    }

    pub fn norm(&self) -> f64 {
        (self.amp_a.norm_sqr() + self.amp_b.norm_sqr() + self.amp_c.norm_sqr()).sqrt()
    }

    /// Born-rule populations `(p_a, p_b, p_c)`; they sum to 1 within
    /// [`NORM_TOL`] for any constructed state.
    pub fn probabilities(&self) -> (f64, f64, f64) {
        (
            self.amp_a.norm_sqr(),
            self.amp_b.norm_sqr(),
            self.amp_c.norm_sqr(),
        )
    }
}

/// Born-rule populations of a pure state.
pub fn probabilities(state: &QutritState) -> (f64, f64, f64) {
    state.probabilities()
}

/// Density matrix over the three transmon levels.
///
/// Hermiticity and unit trace are asserted at construction; positivity is a
/// numerical property of the producing integrator and is checked through
/// [`QutritDensity::min_eigenvalue`] at the tolerance the step size affords.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QutritDensity {
    rho: Matrix3<C64>,
}

impl QutritDensity {
    /// # Panics
    /// If `rho` is not Hermitian with unit trace within [`NORM_TOL`].
    pub fn new(rho: Matrix3<C64>) -> Self {
        let herm_dev = (rho - rho.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        assert!(herm_dev <= NORM_TOL, "density not Hermitian ({herm_dev:e})");
        let trace = rho.trace();
        assert!(
            (trace - C64::new(1.0, 0.0)).norm() <= NORM_TOL,
            "density trace {trace} ≠ 1"
        );
        Self { rho }
    }

    pub fn from_pure(state: &QutritState) -> Self {
        let v = state.as_vector();
        Self::new(v * v.adjoint())
    }

    pub fn ground() -> Self {
        Self::from_pure(&QutritState::ground())
    }

    pub fn matrix(&self) -> &Matrix3<C64> {
        &self.rho
    }

    pub fn trace(&self) -> C64 {
        self.rho.trace()
    }

    /// Diagonal populations `(p_a, p_b, p_c)`.
    pub fn probabilities(&self) -> (f64, f64, f64) {
        (self.rho[(0, 0)].re, self.rho[(1, 1)].re, self.rho[(2, 2)].re)
    }

    /// Smallest eigenvalue of the Hermitian part; slightly negative values
    /// bound the positivity error of a finite-step integration.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (self.rho + self.rho.adjoint()).map(|z| z * 0.5);
        let eigs = nalgebra::SymmetricEigen::new(herm).eigenvalues;
        eigs.iter().fold(f64::INFINITY, |acc, &e| acc.min(e))
    }
}

/// Closed-form transmission/absorption law of the two-pulse sequence.
///
/// With the second pulse scaled to a rotation angle `θ₂ = amp_scale·π/2`,
/// the ground-state (transmitted) probability is
/// `p_transmit = ½·(1 − sin(θ₂)·cos φ)` and `p_absorb = 1 − p_transmit`.
/// At `amp_scale = 1` this reduces to `sin²(φ/2)` and `cos²(φ/2)`.
pub fn ramsey_closed_form(amp_scale: f64, phi: f64) -> Result<(f64, f64), QutritError> {
    if !(0.0..=1.0).contains(&amp_scale) {
        return Err(QutritError::AmpScaleOutOfRange(amp_scale));
    }
    let theta2 = amp_scale * FRAC_PI_2;
    let p_transmit = 0.5 * (1.0 - theta2.sin() * phi.cos());
    Ok((p_transmit, 1.0 - p_transmit))
}
