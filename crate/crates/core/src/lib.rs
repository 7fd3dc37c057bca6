//! Quantum copy of a single-photon interference experiment on a lossy film,
//! executed on a simulated transmon qutrit.
//!
//! The crate is a pipeline: an experiment description ([`dsl`]) is compiled
//! to a microwave pulse [`schedule`], executed on one of three [`backend`]s
//! of increasing physical fidelity (ideal gates, RWA time-domain
//! integration, Lindblad relaxation), pushed through a simulated dispersive
//! [`readout`] chain, and assembled into phase-sweep results by [`sweep`].
//! The [`optics`] module is an independent analytic model of the real
//! optical experiment used to cross-check everything else; it shares no
//! code with the transmon side.

pub mod backend;
pub mod dsl;
pub mod optics;
pub mod qutrit;
pub mod readout;
pub mod rng;
pub mod schedule;
pub mod sweep;

pub use qutrit::{QutritDensity, QutritState, SubspaceRotation, Subspace, Unitary3};
pub use schedule::{DeviceSpec, GaussianEnvelope, PulseInstruction, PulseSchedule};
