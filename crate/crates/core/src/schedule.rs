//! Pulse-schedule intermediate representation: Gaussian drive envelopes,
//! timed instructions on a single drive channel, device parameters, and the
//! line-oriented text serialization.
//!
//! Frequencies are in GHz, times in μs, angles in radians. Envelopes are
//! truncated Gaussians supported on the instruction window; the peak
//! amplitude is calibrated from the target rotation angle so the resonant
//! Rabi angle equals `area` exactly.

use crate::qutrit::Subspace;
use crate::readout::ReadoutModel;
use statrs::function::erf::erf;
use std::f64::consts::PI;
use thiserror::Error;

/// Carrier match tolerance for deciding which transition a pulse addresses.
pub const CARRIER_TOL_GHZ: f64 = 1e-6;

#[derive(Debug, Error, PartialEq)]
pub enum ScheduleError {
    #[error("pulse duration {0} must be positive")]
    NonPositiveDuration(f64),
    #[error("envelope sigma {0} must be positive")]
    NonPositiveSigma(f64),
    #[error("pulse area {0} outside [0, 2π]")]
    AreaOutOfRange(f64),
    #[error("start time {0} must be non-negative")]
    NegativeStartTime(f64),
    #[error("instructions not sorted by start time (index {0})")]
    Unsorted(usize),
    #[error("instructions {0} and {1} overlap in time on the single drive channel")]
    Overlap(usize, usize),
    #[error("schedule text line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Error, PartialEq)]
pub enum DeviceError {
    #[error("omega_ab and omega_bc must differ (zero anharmonicity)")]
    ZeroAnharmonicity,
    #[error("relaxation time {0} must be positive")]
    NonPositiveRelaxation(f64),
    #[error("t2 = {t2} exceeds 2·t1 = {limit}")]
    T2ExceedsLimit { t2: f64, limit: f64 },
}

/// Truncated Gaussian drive envelope.
///
/// The waveform is `Ω(t) = Ω_pk·exp(−(t − d/2)²/(2σ²))` on `t ∈ [0, d]`
/// and zero outside; `area` is the rotation angle the envelope produces on
/// its resonant transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianEnvelope {
    duration: f64,
    sigma: f64,
    area: f64,
}

impl GaussianEnvelope {
    pub fn new(duration: f64, sigma: f64, area: f64) -> Result<Self, ScheduleError> {
        if !(duration > 0.0) {
            return Err(ScheduleError::NonPositiveDuration(duration));
        }
        if !(sigma > 0.0) {
            return Err(ScheduleError::NonPositiveSigma(sigma));
        }
        if !(0.0..=2.0 * PI).contains(&area) {
            return Err(ScheduleError::AreaOutOfRange(area));
        }
        Ok(Self {
            duration,
            sigma,
            area,
        })
    }

    /// Conventional shape: truncation at ±3σ, i.e. `σ = duration/6`.
    pub fn with_conventional_sigma(duration: f64, area: f64) -> Result<Self, ScheduleError> {
        Self::new(duration, duration / 6.0, area)
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    /// Integral of the truncated Gaussian shape with unit peak:
    /// `σ·√(2π)·erf(d/(2√2·σ))`.
    fn shape_integral(&self) -> f64 {
        self.sigma * (2.0 * PI).sqrt() * erf(self.duration / (2.0 * 2.0_f64.sqrt() * self.sigma))
    }

    /// Peak Rabi rate (rad/μs) calibrated so the on-resonance rotation
    /// angle equals `area`.
    pub fn peak_amplitude(&self) -> f64 {
        self.area / self.shape_integral()
    }

    /// Instantaneous Rabi rate at time `t_rel ∈ [0, duration]` from the
    /// pulse start.
    pub fn amplitude(&self, t_rel: f64) -> f64 {
        let center = 0.5 * self.duration;
        let x = (t_rel - center) / self.sigma;
        self.peak_amplitude() * (-0.5 * x * x).exp()
    }
}

/// Rotation angle the envelope produces on resonance (the time integral of
/// its calibrated waveform). Inverse of the peak-amplitude calibration.
pub fn pulse_area(env: &GaussianEnvelope) -> f64 {
    env.peak_amplitude() * env.shape_integral()
}

/// One microwave drive pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseInstruction {
    pub carrier_freq: f64,
    pub envelope: GaussianEnvelope,
    pub phase: f64,
    pub start_time: f64,
}

impl PulseInstruction {
    pub fn new(
        carrier_freq: f64,
        envelope: GaussianEnvelope,
        phase: f64,
        start_time: f64,
    ) -> Result<Self, ScheduleError> {
        if !(start_time >= 0.0) {
            return Err(ScheduleError::NegativeStartTime(start_time));
        }
        Ok(Self {
            carrier_freq,
            envelope,
            phase,
            start_time,
        })
    }

    pub fn end_time(&self) -> f64 {
        self.start_time + self.envelope.duration()
    }
}

/// Ordered, non-overlapping pulses on the single drive channel.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PulseSchedule {
    instructions: Vec<PulseInstruction>,
}

impl PulseSchedule {
    pub fn new(instructions: Vec<PulseInstruction>) -> Result<Self, ScheduleError> {
        for k in 1..instructions.len() {
            if instructions[k].start_time < instructions[k - 1].start_time {
                return Err(ScheduleError::Unsorted(k));
            }
            if instructions[k].start_time < instructions[k - 1].end_time() {
                return Err(ScheduleError::Overlap(k - 1, k));
            }
        }
        Ok(Self { instructions })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn instructions(&self) -> &[PulseInstruction] {
        &self.instructions
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    /// End time of the last pulse, or 0 for an empty schedule.
    pub fn total_duration(&self) -> f64 {
        self.instructions
            .last()
            .map(PulseInstruction::end_time)
            .unwrap_or(0.0)
    }

    /// One `pulse` line per instruction; 17 significant digits so the text
    /// round-trips bit-exactly.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for inst in &self.instructions {
            out.push_str(&format!(
                "pulse freq={:.16e} area={:.16e} phase={:.16e} t0={:.16e} dur={:.16e} sigma={:.16e}\n",
                inst.carrier_freq,
                inst.envelope.area(),
                inst.phase,
                inst.start_time,
                inst.envelope.duration(),
                inst.envelope.sigma(),
            ));
        }
        out
    }

    /// Parse the line format emitted by [`PulseSchedule::to_text`]. Blank
    /// lines and `#` comments are ignored.
    pub fn from_text(text: &str) -> Result<Self, ScheduleError> {
        let mut instructions = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let line_no = k + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = line.split_whitespace();
            if tokens.next() != Some("pulse") {
                return Err(ScheduleError::Parse {
                    line: line_no,
                    msg: "expected line to start with `pulse`".into(),
                });
            }
            let mut fields = [None::<f64>; 6];
            const KEYS: [&str; 6] = ["freq", "area", "phase", "t0", "dur", "sigma"];
            for token in tokens {
                let (key, value) = token.split_once('=').ok_or(ScheduleError::Parse {
                    line: line_no,
                    msg: format!("expected key=value, got `{token}`"),
                })?;
                let slot = KEYS.iter().position(|&k| k == key).ok_or(ScheduleError::Parse {
                    line: line_no,
                    msg: format!("unknown key `{key}`"),
                })?;
                if fields[slot].is_some() {
                    return Err(ScheduleError::Parse {
                        line: line_no,
                        msg: format!("duplicate key `{key}`"),
                    });
                }
                fields[slot] = Some(value.parse::<f64>().map_err(|e| ScheduleError::Parse {
                    line: line_no,
                    msg: format!("bad number for `{key}`: {e}"),
                })?);
            }
            let get = |slot: usize| {
                fields[slot].ok_or(ScheduleError::Parse {
                    line: line_no,
                    msg: format!("missing key `{}`", KEYS[slot]),
                })
            };
            let envelope = GaussianEnvelope::new(get(4)?, get(5)?, get(1)?)?;
            instructions.push(PulseInstruction::new(get(0)?, envelope, get(2)?, get(3)?)?);
        }
        Self::new(instructions)
    }
}

/// Transmon device parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceSpec {
    pub omega_ab: f64,
    pub omega_bc: f64,
    pub t1: f64,
    pub t2: f64,
    pub readout: ReadoutModel,
}

impl Default for DeviceSpec {
    fn default() -> Self {
        Self {
            omega_ab: 4.97,
            omega_bc: 4.62,
            t1: 30.0,
            t2: 30.0,
            readout: ReadoutModel::default(),
        }
    }
}

impl DeviceSpec {
    pub fn validate(&self) -> Result<(), DeviceError> {
        if self.omega_ab == self.omega_bc {
            return Err(DeviceError::ZeroAnharmonicity);
        }
        if !(self.t1 > 0.0) {
            return Err(DeviceError::NonPositiveRelaxation(self.t1));
        }
        if !(self.t2 > 0.0) {
            return Err(DeviceError::NonPositiveRelaxation(self.t2));
        }
        if self.t2 > 2.0 * self.t1 {
            return Err(DeviceError::T2ExceedsLimit {
                t2: self.t2,
                limit: 2.0 * self.t1,
            });
        }
        Ok(())
    }

    /// Which transition a carrier addresses, within [`CARRIER_TOL_GHZ`].
    pub fn subspace_for_carrier(&self, carrier_freq: f64) -> Option<Subspace> {
        if (carrier_freq - self.omega_ab).abs() <= CARRIER_TOL_GHZ {
            Some(Subspace::AB)
        } else if (carrier_freq - self.omega_bc).abs() <= CARRIER_TOL_GHZ {
            Some(Subspace::BC)
        } else {
            None
        }
    }
}
