//! String equality verification over a slow channel.
//!
//! Alice and Bob share a seed, from which both derive two independent RTW
//! references for every (position, bit value). Each party multiplies the
//! references selected by its own string into a hyperspace vector; Alice sends
//! the first `k` steps of hers. Equal strings give identical products. If the
//! strings differ anywhere, the two products differ by at least one
//! independent fair sign, so each step agrees with probability 1/2 and a
//! difference slips through with probability `2^-k`.

pub mod channel;
pub mod wire;

use std::borrow::Cow;

use rand::seq::index::sample;
use rand::{Rng, RngCore};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{NblError, Result};
use crate::hyperspace::{product_vector, BitString, ReferenceSource};
use crate::noise::{gen_rtw, RtwSequence, StreamKey};

pub use channel::{Channel, MemoryChannel, StreamChannel};
pub use wire::{decode_frame, encode_frame, Frame};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub shared_seed: u64,
    /// String length in bits.
    pub n: usize,
    /// Signature length in bits.
    pub k: usize,
}

impl VerifyConfig {
    pub fn new(shared_seed: u64, n: usize, k: usize) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(NblError::InvalidParameter(format!(
                "string length {n} and signature length {k} must be positive"
            )));
        }
        if u32::try_from(k).is_err() {
            return Err(NblError::InvalidParameter(format!(
                "signature length {k} exceeds 2^32"
            )));
        }
        Ok(Self { shared_seed, n, k })
    }
}

/// The `2n` reference streams, generated on demand and truncated to `k` steps.
#[derive(Debug, Clone)]
pub struct ReferenceFamily {
    cfg: VerifyConfig,
}

impl ReferenceFamily {
    pub fn key(&self, position: usize, bit: bool) -> StreamKey {
        StreamKey::new(
            self.cfg.shared_seed,
            format!("verify/pos={position}/bit={}", u8::from(bit)),
        )
    }

    pub fn stream(&self, position: usize, bit: bool) -> RtwSequence {
        gen_rtw(&self.key(position, bit), self.cfg.k)
    }

    /// Number of streams, `2n`.
    pub fn len(&self) -> usize {
        2 * self.cfg.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn keys(&self) -> impl Iterator<Item = StreamKey> + '_ {
        (0..self.cfg.n).flat_map(move |i| [self.key(i, false), self.key(i, true)])
    }

    pub fn config(&self) -> &VerifyConfig {
        &self.cfg
    }
}

impl ReferenceSource for ReferenceFamily {
    type Carrier = RtwSequence;

    fn n_bits(&self) -> usize {
        self.cfg.n
    }

    fn reference(&self, bit: usize, value: bool) -> Result<Cow<'_, RtwSequence>> {
        Ok(Cow::Owned(self.stream(bit, value)))
    }
}

pub fn derive_references(cfg: &VerifyConfig) -> ReferenceFamily {
    ReferenceFamily { cfg: *cfg }
}

/// `k` signature bits as +1 / -1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    bits: Vec<i8>,
}

impl Signature {
    pub fn new(bits: Vec<i8>) -> Result<Self> {
        Ok(Self {
            bits: RtwSequence::new(bits)?.into_steps(),
        })
    }

    pub fn bits(&self) -> &[i8] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// MSB first, +1 as 1, zero padded to a byte boundary.
    pub fn packed(&self) -> Vec<u8> {
        self.bits
            .chunks(8)
            .map(|chunk| {
                chunk
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| b == 1)
                    .fold(0u8, |acc, (i, _)| acc | 0x80 >> i)
            })
            .collect()
    }

    /// Inverse of [`packed`](Self::packed); non-zero padding is rejected.
    pub fn unpack(bytes: &[u8], k: usize) -> Result<Self> {
        if bytes.len() != k.div_ceil(8) {
            return Err(NblError::MalformedFrame(format!(
                "{} payload bytes cannot hold exactly {k} bits",
                bytes.len()
            )));
        }
        let bit = |i: usize| bytes[i / 8] >> (7 - i % 8) & 1;
        if (k..bytes.len() * 8).any(|i| bit(i) != 0) {
            return Err(NblError::MalformedFrame("non-zero padding bits".into()));
        }
        Ok(Self {
            bits: (0..k).map(|i| if bit(i) == 1 { 1 } else { -1 }).collect(),
        })
    }
}

/// First `k` steps of the product of the references selected by `s`.
pub fn signature(s: &BitString, refs: &ReferenceFamily, k: usize) -> Result<Signature> {
    if k > refs.cfg.k {
        return Err(NblError::InvalidParameter(format!(
            "signature of {k} bits exceeds the {}-step references",
            refs.cfg.k
        )));
    }
    let v = product_vector(s, refs)?;
    Ok(Signature {
        bits: v.signal.truncated(k).into_steps(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    EqualAccepted,
    DifferentDetected,
}

/// Compares two signatures; the verdict comes with the first differing index.
pub fn verify(a: &Signature, b: &Signature) -> Result<(Verdict, Option<usize>)> {
    crate::noise::check_len(a.len(), b.len())?;
    Ok(match a.bits.iter().zip(&b.bits).position(|(x, y)| x != y) {
        Some(i) => (Verdict::DifferentDetected, Some(i)),
        None => (Verdict::EqualAccepted, None),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub k_sent: usize,
    pub verdict: Verdict,
    pub mismatch_index: Option<usize>,
    pub bytes_on_wire: usize,
}

fn check_string(s: &BitString, cfg: &VerifyConfig) -> Result<()> {
    crate::noise::check_len(cfg.n, s.len())
}

/// Sending side.
#[derive(Debug, Clone)]
pub struct Alice {
    cfg: VerifyConfig,
    string: BitString,
}

impl Alice {
    pub fn new(string: BitString, cfg: VerifyConfig) -> Result<Self> {
        check_string(&string, &cfg)?;
        Ok(Self { cfg, string })
    }

    /// Computes the signature and sends one frame; returns the frame size.
    pub fn send<C: Channel + ?Sized>(&self, channel: &mut C) -> Result<usize> {
        let sig = signature(&self.string, &derive_references(&self.cfg), self.cfg.k)?;
        let frame = encode_frame(&sig, self.cfg.n as u64)?;
        channel.send(&frame)?;
        Ok(frame.len())
    }
}

/// Receiving side; decides locally.
#[derive(Debug, Clone)]
pub struct Bob {
    cfg: VerifyConfig,
    string: BitString,
}

impl Bob {
    pub fn new(string: BitString, cfg: VerifyConfig) -> Result<Self> {
        check_string(&string, &cfg)?;
        Ok(Self { cfg, string })
    }

    pub fn receive<C: Channel + ?Sized>(&self, channel: &mut C) -> Result<Transcript> {
        let bytes = channel.recv()?;
        let frame = decode_frame(&bytes)?;
        if frame.n != self.cfg.n as u64 || frame.signature.len() != self.cfg.k {
            return Err(NblError::MalformedFrame(format!(
                "frame announces n = {}, k = {}; expected n = {}, k = {}",
                frame.n,
                frame.signature.len(),
                self.cfg.n,
                self.cfg.k
            )));
        }
        let own = signature(&self.string, &derive_references(&self.cfg), self.cfg.k)?;
        let (verdict, mismatch_index) = verify(&frame.signature, &own)?;
        Ok(Transcript {
            k_sent: frame.signature.len(),
            verdict,
            mismatch_index,
            bytes_on_wire: bytes.len(),
        })
    }
}

/// One Alice-to-Bob session over `channel`.
pub fn run_protocol<C: Channel + ?Sized>(
    string_a: &BitString,
    string_b: &BitString,
    cfg: &VerifyConfig,
    channel: &mut C,
) -> Result<Transcript> {
    let alice = Alice::new(string_a.clone(), *cfg)?;
    let bob = Bob::new(string_b.clone(), *cfg)?;
    alice.send(channel)?;
    bob.receive(channel)
}

/// Parameters for [`soundness_trials`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SoundnessParams {
    pub seed: u64,
    pub n: usize,
    pub k: usize,
    /// Number of flipped positions in Bob's string.
    pub differ: usize,
    pub trials: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SoundnessSummary {
    pub accepts: usize,
    pub trials: usize,
    pub bytes_on_wire: usize,
}

impl SoundnessSummary {
    pub fn accept_rate(&self) -> f64 {
        self.accepts as f64 / self.trials as f64
    }
}

/// Inputs of trial `trial`: a fresh shared seed, a uniform string for Alice,
/// and Bob's copy with `differ` distinct positions flipped.
pub fn trial_inputs(
    params: &SoundnessParams,
    trial: usize,
) -> Result<(VerifyConfig, BitString, BitString)> {
    if params.differ > params.n {
        return Err(NblError::InvalidParameter(format!(
            "cannot flip {} of {} bits",
            params.differ, params.n
        )));
    }
    let mut rng = StreamKey::new(params.seed, format!("verify-mc/trial={trial}")).rng();
    let cfg = VerifyConfig::new(rng.next_u64(), params.n, params.k)?;
    let a = BitString::new((0..params.n).map(|_| rng.random::<bool>()).collect());
    let mut b = a.clone();
    for pos in sample(&mut rng, params.n, params.differ) {
        b.flip(pos);
    }
    Ok((cfg, a, b))
}

/// Runs independent protocol sessions and counts acceptances. Trials are
/// keyed by index, so the result does not depend on scheduling.
pub fn soundness_trials(params: &SoundnessParams) -> Result<SoundnessSummary> {
    let outcomes = (0..params.trials)
        .into_par_iter()
        .map(|t| {
            let (cfg, a, b) = trial_inputs(params, t)?;
            let tr = run_protocol(&a, &b, &cfg, &mut MemoryChannel::new())?;
            Ok((tr.verdict == Verdict::EqualAccepted, tr.bytes_on_wire))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SoundnessSummary {
        accepts: outcomes.iter().filter(|(acc, _)| *acc).count(),
        trials: params.trials,
        bytes_on_wire: outcomes.first().map_or(wire::frame_len(params.k), |o| o.1),
    })
}
