//! Seeded noise carriers.
//!
//! Every random quantity in the crate is drawn from a [`StreamKey`]: a master
//! seed plus a byte label. The pair is hashed into a ChaCha8 seed, so two
//! parties holding the same master seed regenerate the same reference noises
//! without communicating them, and any number of labeled families can be
//! carved out of one seed.

use std::collections::HashSet;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{NblError, Result};
use crate::scalar::Real;

const STREAM_DOMAIN: &[u8] = b"nbl/stream/v1";

/// Identifies one reproducible random stream.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamKey {
    pub master_seed: u64,
    pub label: Vec<u8>,
}

impl StreamKey {
    pub fn new(master_seed: u64, label: impl AsRef<[u8]>) -> Self {
        Self {
            master_seed,
            label: label.as_ref().to_vec(),
        }
    }

    /// Key for `label` nested under this key's label, separated by `/`.
    pub fn child(&self, label: impl AsRef<[u8]>) -> Self {
        let mut nested = self.label.clone();
        nested.push(b'/');
        nested.extend_from_slice(label.as_ref());
        Self {
            master_seed: self.master_seed,
            label: nested,
        }
    }

    /// 32-byte substream seed: SHA-256 over a domain tag, the master seed and
    /// the length-prefixed label.
    pub fn substream_seed(&self) -> [u8; 32] {
        let mut hasher = Sha256::new();
        hasher.update(STREAM_DOMAIN);
        hasher.update(self.master_seed.to_le_bytes());
        hasher.update((self.label.len() as u64).to_le_bytes());
        hasher.update(&self.label);
        hasher.finalize().into()
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::from_seed(self.substream_seed())
    }

    pub fn label_lossy(&self) -> String {
        String::from_utf8_lossy(&self.label).into_owned()
    }
}

/// Random telegraph wave: one amplitude of exactly +1 or -1 per clock step.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RtwSequence {
    steps: Vec<i8>,
}

impl RtwSequence {
    pub fn new(steps: Vec<i8>) -> Result<Self> {
        if let Some(bad) = steps.iter().find(|&&s| s != 1 && s != -1) {
            return Err(NblError::InvalidParameter(format!(
                "RTW amplitude {bad} is not +1 or -1"
            )));
        }
        Ok(Self { steps })
    }

    pub fn steps(&self) -> &[i8] {
        &self.steps
    }

    pub fn into_steps(self) -> Vec<i8> {
        self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn truncated(&self, n: usize) -> Self {
        Self {
            steps: self.steps[..n.min(self.steps.len())].to_vec(),
        }
    }

    /// Pointwise product; the result is again a valid RTW.
    pub fn product(&self, other: &Self) -> Result<Self> {
        check_len(self.len(), other.len())?;
        Ok(Self {
            steps: self
                .steps
                .iter()
                .zip(&other.steps)
                .map(|(a, b)| a * b)
                .collect(),
        })
    }

    pub(crate) fn mul_assign(&mut self, other: &Self) -> Result<()> {
        check_len(self.len(), other.len())?;
        self.steps
            .iter_mut()
            .zip(&other.steps)
            .for_each(|(a, b)| *a *= b);
        Ok(())
    }

    /// Fraction of steps on which the two waves have the same sign.
    pub fn agreement(&self, other: &Self) -> Result<f64> {
        check_len(self.len(), other.len())?;
        if self.is_empty() {
            return Ok(1.0);
        }
        let agree = self
            .steps
            .iter()
            .zip(&other.steps)
            .filter(|(a, b)| a == b)
            .count();
        Ok(agree as f64 / self.len() as f64)
    }
}

/// Draws `n_steps` fair, independent signs.
///
/// A wave that flips with probability 1/2 at every step is exactly an i.i.d.
/// sequence of fair signs, so the signs are drawn directly: 64 steps per
/// `u64`, least significant bit first, bit 1 meaning +1.
pub fn gen_rtw(key: &StreamKey, n_steps: usize) -> RtwSequence {
    let mut rng = key.rng();
    let mut steps = Vec::with_capacity(n_steps);
    while steps.len() < n_steps {
        let word = rng.next_u64();
        let take = (n_steps - steps.len()).min(64);
        steps.extend((0..take).map(|bit| if word >> bit & 1 == 1 { 1 } else { -1 }));
    }
    RtwSequence { steps }
}

/// Sampled band-limited Gaussian noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuumSignal<T> {
    pub samples: Vec<T>,
    /// Sample period.
    pub dt: T,
    /// Correlation time, in the same unit as `dt`.
    pub tau: T,
}

impl<T: Real> ContinuumSignal<T> {
    pub fn new(samples: Vec<T>, tau: T, dt: T) -> Result<Self> {
        check_sampling(tau, dt)?;
        Ok(Self { samples, dt, tau })
    }

    pub fn zeros(len: usize, tau: T, dt: T) -> Result<Self> {
        Self::new(vec![T::zero(); len], tau, dt)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Signal duration in time units.
    pub fn duration(&self) -> T {
        T::of(self.samples.len() as f64) * self.dt
    }

    pub fn scaled(&self, gain: T) -> Self {
        Self {
            samples: self.samples.iter().map(|&x| x * gain).collect(),
            ..self.clone()
        }
    }

    /// Elementwise sum; sampling parameters must agree.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        Ok(Self {
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| a + b)
                .collect(),
            ..self.clone()
        })
    }

    pub fn check_compatible(&self, other: &Self) -> Result<()> {
        check_len(self.len(), other.len())?;
        if self.dt != other.dt || self.tau != other.tau {
            return Err(NblError::InvalidParameter(format!(
                "sampling mismatch: (dt {}, tau {}) vs (dt {}, tau {})",
                self.dt, self.tau, other.dt, other.tau
            )));
        }
        Ok(())
    }
}

fn check_sampling<T: Real>(tau: T, dt: T) -> Result<()> {
    if dt <= T::zero() || !dt.is_finite() || !tau.is_finite() {
        return Err(NblError::InvalidParameter(format!(
            "sample period {dt} and correlation time {tau} must be positive and finite"
        )));
    }
    if tau < dt + dt {
        return Err(NblError::Undersampled {
            tau: tau.to_f64_lossy(),
            dt: dt.to_f64_lossy(),
        });
    }
    Ok(())
}

/// Zero-mean, unit-variance Gaussian noise with autocorrelation
/// `exp(-|lag| / tau)`.
///
/// Exact discretization of an Ornstein-Uhlenbeck process:
/// `x[k+1] = a x[k] + sqrt(1 - a^2) w[k]` with `a = exp(-dt / tau)` and the
/// first sample drawn from the stationary law. Sampling happens in `f64` so the
/// same key yields the same realization, up to rounding, for every scalar type.
pub fn gen_bandlimited_gaussian<T: Real>(
    key: &StreamKey,
    n_samples: usize,
    tau: T,
    dt: T,
) -> Result<ContinuumSignal<T>> {
    check_sampling(tau, dt)?;
    let a = (-(dt.to_f64_lossy() / tau.to_f64_lossy())).exp();
    let drive = (1.0 - a * a).sqrt();
    let mut rng = key.rng();
    let mut samples = Vec::with_capacity(n_samples);
    let mut x: f64 = 0.0;
    for i in 0..n_samples {
        let w: f64 = rng.sample(StandardNormal);
        x = if i == 0 { w } else { a * x + drive * w };
        samples.push(T::of(x));
    }
    Ok(ContinuumSignal { samples, dt, tau })
}

/// Set of occupied slots within a window of `window_len` discrete slots.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpikeTrain {
    slots: Vec<usize>,
    window_len: usize,
}

impl SpikeTrain {
    /// `slots` must be strictly increasing and below `window_len`.
    pub fn new(slots: Vec<usize>, window_len: usize) -> Result<Self> {
        if let Some(w) = slots.windows(2).find(|w| w[0] >= w[1]) {
            return Err(NblError::InvalidSpikeTrain(format!(
                "slots not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
        if let Some(&last) = slots.last() {
            if last >= window_len {
                return Err(NblError::InvalidSpikeTrain(format!(
                    "slot {last} outside window of {window_len}"
                )));
            }
        }
        Ok(Self { slots, window_len })
    }

    /// Sorts and deduplicates `slots` before validating the window bound.
    pub fn from_unsorted(mut slots: Vec<usize>, window_len: usize) -> Result<Self> {
        slots.sort_unstable();
        slots.dedup();
        Self::new(slots, window_len)
    }

    pub fn empty(window_len: usize) -> Self {
        Self {
            slots: Vec::new(),
            window_len,
        }
    }

    pub fn full(window_len: usize) -> Self {
        Self {
            slots: (0..window_len).collect(),
            window_len,
        }
    }

    pub fn slots(&self) -> &[usize] {
        &self.slots
    }

    pub fn window_len(&self) -> usize {
        self.window_len
    }

    /// Number of spikes.
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn first(&self) -> Option<usize> {
        self.slots.first().copied()
    }

    pub fn contains(&self, slot: usize) -> bool {
        self.slots.binary_search(&slot).is_ok()
    }

    fn check_window(&self, other: &Self) -> Result<()> {
        if self.window_len != other.window_len {
            return Err(NblError::WindowMismatch {
                left: self.window_len,
                right: other.window_len,
            });
        }
        Ok(())
    }

    /// Slots of the window not in `self`.
    pub fn complement(&self) -> Self {
        let mut out = Vec::with_capacity(self.window_len - self.slots.len());
        let mut next = 0;
        for &s in &self.slots {
            out.extend(next..s);
            next = s + 1;
        }
        out.extend(next..self.window_len);
        Self {
            slots: out,
            window_len: self.window_len,
        }
    }

    /// Splits `self` into the slots shared with `other` and the rest.
    pub fn split_by(&self, other: &Self) -> Result<(Self, Self)> {
        self.check_window(other)?;
        let (inside, outside): (Vec<usize>, Vec<usize>) =
            self.slots.iter().partition(|&&s| other.contains(s));
        Ok((
            Self {
                slots: inside,
                window_len: self.window_len,
            },
            Self {
                slots: outside,
                window_len: self.window_len,
            },
        ))
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        Ok(small.split_by(large)?.0)
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        Ok(self.split_by(other)?.1)
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.check_window(other)?;
        let (a, b) = (&self.slots, &other.slots);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Ok(Self {
            slots: out,
            window_len: self.window_len,
        })
    }

    pub fn is_disjoint(&self, other: &Self) -> Result<bool> {
        Ok(self.intersection(other)?.is_empty())
    }
}

/// Each slot holds a spike independently with probability `p`.
pub fn gen_spike_train(key: &StreamKey, window_len: usize, p: f64) -> Result<SpikeTrain> {
    if !(0.0..=1.0).contains(&p) {
        return Err(NblError::InvalidParameter(format!(
            "spike probability {p} outside [0, 1]"
        )));
    }
    let mut rng = key.rng();
    let slots = (0..window_len)
        .filter(|_| rng.random::<f64>() < p)
        .collect();
    Ok(SpikeTrain { slots, window_len })
}

/// One spike at every slot `i` where samples `i - 1` and `i` have opposite
/// signs. Exact zeros count as positive.
pub fn zero_crossing_spikes<T: Real>(signal: &ContinuumSignal<T>) -> SpikeTrain {
    let positive = |x: T| x >= T::zero();
    let slots = signal
        .samples
        .windows(2)
        .enumerate()
        .filter(|(_, w)| positive(w[0]) != positive(w[1]))
        .map(|(i, _)| i + 1)
        .collect();
    SpikeTrain {
        slots,
        window_len: signal.len(),
    }
}

/// Labeled reference-noise family shared by every party holding the seed.
#[derive(Debug, Clone)]
pub struct ReferenceSystem {
    master_seed: u64,
    labels: Vec<Vec<u8>>,
}

impl ReferenceSystem {
    pub fn new<L: AsRef<[u8]>>(master_seed: u64, labels: &[L]) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut owned = Vec::with_capacity(labels.len());
        for label in labels {
            let label = label.as_ref().to_vec();
            if !seen.insert(label.clone()) {
                return Err(NblError::DuplicateLabel(
                    String::from_utf8_lossy(&label).into_owned(),
                ));
            }
            owned.push(label);
        }
        Ok(Self {
            master_seed,
            labels: owned,
        })
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = StreamKey> + '_ {
        self.labels
            .iter()
            .map(|l| StreamKey::new(self.master_seed, l))
    }

    pub fn key(&self, index: usize) -> Option<StreamKey> {
        self.labels
            .get(index)
            .map(|l| StreamKey::new(self.master_seed, l))
    }

    pub fn key_for(&self, label: impl AsRef<[u8]>) -> Option<StreamKey> {
        let label = label.as_ref();
        self.labels
            .iter()
            .any(|l| l == label)
            .then(|| StreamKey::new(self.master_seed, label))
    }

    pub fn rtw(&self, index: usize, n_steps: usize) -> Option<RtwSequence> {
        self.key(index).map(|k| gen_rtw(&k, n_steps))
    }

    pub fn bandlimited<T: Real>(
        &self,
        index: usize,
        n_samples: usize,
        tau: T,
        dt: T,
    ) -> Option<Result<ContinuumSignal<T>>> {
        self.key(index)
            .map(|k| gen_bandlimited_gaussian(&k, n_samples, tau, dt))
    }

    pub fn spike_train(
        &self,
        index: usize,
        window_len: usize,
        p: f64,
    ) -> Option<Result<SpikeTrain>> {
        self.key(index).map(|k| gen_spike_train(&k, window_len, p))
    }
}

/// Shorthand for `ReferenceSystem::new`.
pub fn reference_system<L: AsRef<[u8]>>(master_seed: u64, labels: &[L]) -> Result<ReferenceSystem> {
    ReferenceSystem::new(master_seed, labels)
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(NblError::LengthMismatch { expected, actual });
    }
    Ok(())
}
