//! Dispersive readout simulation: shot sampling, IQ-plane response with
//! isotropic Gaussian noise, and nearest-centroid state discrimination
//! calibrated on the basis states.

use crate::qutrit::Level;
use crate::rng::SplitMix64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ReadoutError {
    #[error("shot distribution invalid: ({0}, {1}, {2})")]
    BadDistribution(f64, f64, f64),
}

/// A point in the readout IQ plane, arbitrary units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IqPoint {
    pub i: f64,
    pub q: f64,
}

impl IqPoint {
    pub fn new(i: f64, q: f64) -> Self {
        Self { i, q }
    }

    pub fn distance_sq(&self, other: &IqPoint) -> f64 {
        let di = self.i - other.i;
        let dq = self.q - other.q;
        di * di + dq * dq
    }
}

/// True IQ response model: one centroid per basis state plus isotropic
/// Gaussian noise.
#[derive(Debug, Clone, PartialEq)]
pub struct ReadoutModel {
    centroids: [IqPoint; 3],
    noise_sigma: f64,
}

impl Default for ReadoutModel {
    /// Well-separated triangle (pairwise ≈ 10σ) in arbitrary units.
    fn default() -> Self {
        Self::new(
            [
                IqPoint::new(0.0, 0.0),
                IqPoint::new(10.0, 0.0),
                IqPoint::new(5.0, 8.66),
            ],
            1.0,
        )
    }
}

impl ReadoutModel {
    /// # Panics
    /// If the centroids are not pairwise distinct or `noise_sigma ≤ 0`.
    pub fn new(centroids: [IqPoint; 3], noise_sigma: f64) -> Self {
        assert!(noise_sigma > 0.0, "noise_sigma must be positive");
        for (k, a) in centroids.iter().enumerate() {
            for b in centroids.iter().skip(k + 1) {
                assert!(a.distance_sq(b) > 0.0, "readout centroids must be distinct");
            }
        }
        Self {
            centroids,
            noise_sigma,
        }
    }

    pub fn centroid(&self, label: Level) -> IqPoint {
        self.centroids[label.index()]
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }
}

/// Per-label centroid estimates produced by [`calibrate`].
#[derive(Debug, Clone, PartialEq)]
pub struct Discriminator {
    estimated_centroids: [IqPoint; 3],
}

impl Discriminator {
    pub fn estimated_centroid(&self, label: Level) -> IqPoint {
        self.estimated_centroids[label.index()]
    }
}

/// Draw `n` i.i.d. shots from a categorical distribution over the three
/// levels. Deterministic for a fixed seed.
pub fn sample_shots(
    probs: (f64, f64, f64),
    n: usize,
    seed: u64,
) -> Result<Vec<Level>, ReadoutError> {
    let (p_a, p_b, p_c) = probs;
    let sum = p_a + p_b + p_c;
    let valid = p_a >= 0.0 && p_b >= 0.0 && p_c >= 0.0 && (sum - 1.0).abs() <= 1e-9;
    if !valid {
        return Err(ReadoutError::BadDistribution(p_a, p_b, p_c));
    }
    assert!(n >= 1, "shot count must be at least 1");
    let mut rng = SplitMix64::new(seed);
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let u = rng.next_f64();
        let label = if u < p_a {
            Level::A
        } else if u < p_a + p_b {
            Level::B
        } else {
            Level::C
        };
        out.push(label);
    }
    Ok(out)
}

/// One IQ sample for a basis state: centroid plus isotropic Gaussian noise.
pub fn simulate_iq_with(label: Level, model: &ReadoutModel, rng: &mut SplitMix64) -> IqPoint {
    let c = model.centroid(label);
    let (zi, zq) = rng.next_normal_pair();
    IqPoint::new(c.i + model.noise_sigma() * zi, c.q + model.noise_sigma() * zq)
}

/// Seed-taking form of [`simulate_iq_with`] producing a single point.
pub fn simulate_iq(label: Level, model: &ReadoutModel, seed: u64) -> IqPoint {
    simulate_iq_with(label, model, &mut SplitMix64::new(seed))
}

/// Prepare each basis state `shots_per_state` times, record the IQ samples,
/// and store the per-label sample means.
///
/// # Panics
/// If `shots_per_state < 10`.
pub fn calibrate(model: &ReadoutModel, shots_per_state: usize, seed: u64) -> Discriminator {
    assert!(shots_per_state >= 10, "calibration needs at least 10 shots per state");
    let mut rng = SplitMix64::new(seed);
    let mut estimated = [IqPoint::new(0.0, 0.0); 3];
    for label in Level::ALL {
        let mut sum_i = 0.0;
        let mut sum_q = 0.0;
        for _ in 0..shots_per_state {
            let p = simulate_iq_with(label, model, &mut rng);
            sum_i += p.i;
            sum_q += p.q;
        }
        let n = shots_per_state as f64;
        estimated[label.index()] = IqPoint::new(sum_i / n, sum_q / n);
    }
    Discriminator {
        estimated_centroids: estimated,
    }
}

/// Nearest estimated centroid by Euclidean distance; ties break toward the
/// earlier label in the order A < B < C.
pub fn classify(point: &IqPoint, discriminator: &Discriminator) -> Level {
    let mut best = Level::A;
    let mut best_d = point.distance_sq(&discriminator.estimated_centroid(Level::A));
    for label in [Level::B, Level::C] {
        let d = point.distance_sq(&discriminator.estimated_centroid(label));
        if d < best_d {
            best = label;
            best_d = d;
        }
    }
    best
}

/// One shot of the full measurement chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShotRecord {
    /// `None` when the record is exported blind.
    pub true_label: Option<Level>,
    pub iq: IqPoint,
    pub classified_label: Level,
}
