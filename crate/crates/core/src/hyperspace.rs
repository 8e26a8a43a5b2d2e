//! Product-noise hyperspace.
//!
//! Each noise-bit owns two independent reference noises, one per bit value.
//! The elementwise product of one reference per noise-bit is a basis vector;
//! products for different bit strings differ by at least one independent
//! factor and are therefore orthogonal. `N` noise-bits span `2^N` vectors.

use std::borrow::Cow;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::continuum::{correlate, CorrelatorConfig};
use crate::error::{NblError, Result};
use crate::noise::{
    check_len, gen_bandlimited_gaussian, gen_rtw, ContinuumSignal, RtwSequence, StreamKey,
};
use crate::scalar::Real;

/// A noise carrier that supports elementwise products.
pub trait Carrier: Clone {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn mul_in_place(&mut self, other: &Self) -> Result<()>;
}

impl Carrier for RtwSequence {
    fn len(&self) -> usize {
        RtwSequence::len(self)
    }

    fn mul_in_place(&mut self, other: &Self) -> Result<()> {
        self.mul_assign(other)
    }
}

/// Products of independent zero-mean unit-variance factors already have unit
/// variance, so no renormalization is applied. The product keeps the factors'
/// sampling metadata.
impl<T: Real> Carrier for ContinuumSignal<T> {
    fn len(&self) -> usize {
        ContinuumSignal::len(self)
    }

    fn mul_in_place(&mut self, other: &Self) -> Result<()> {
        self.check_compatible(other)?;
        self.samples
            .iter_mut()
            .zip(&other.samples)
            .for_each(|(a, &b)| *a *= b);
        Ok(())
    }
}

/// Anything that can hand out the reference noise for (noise-bit, value).
pub trait ReferenceSource {
    type Carrier: Carrier;

    fn n_bits(&self) -> usize;

    fn reference(&self, bit: usize, value: bool) -> Result<Cow<'_, Self::Carrier>>;
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BitString(Vec<bool>);

impl BitString {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![false; n])
    }

    /// The `n`-bit string of `value`, most significant bit first.
    pub fn from_index(value: u64, n: usize) -> Self {
        Self((0..n).rev().map(|i| value >> i & 1 == 1).collect())
    }

    /// All `2^n` strings in ascending numeric order.
    pub fn all(n: usize) -> impl Iterator<Item = BitString> {
        (0..1u64 << n).map(move |v| Self::from_index(v, n))
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn flip(&mut self, position: usize) {
        self.0[position] = !self.0[position];
    }

    /// Number of positions where the strings differ.
    pub fn hamming(&self, other: &Self) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = NblError;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(NblError::InvalidParameter(format!(
                    "bit string contains {other:?}"
                ))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Self)
    }
}

impl From<Vec<bool>> for BitString {
    fn from(bits: Vec<bool>) -> Self {
        Self(bits)
    }
}

/// The two reference noises of one logic bit.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseBit<C> {
    pub index: usize,
    pub ref0: C,
    pub ref1: C,
}

impl<C: Carrier> NoiseBit<C> {
    pub fn new(index: usize, ref0: C, ref1: C) -> Result<Self> {
        check_len(ref0.len(), ref1.len())?;
        Ok(Self { index, ref0, ref1 })
    }

    pub fn reference(&self, value: bool) -> &C {
        if value {
            &self.ref1
        } else {
            &self.ref0
        }
    }
}

/// Basis vector: a bit string and its realized product noise.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperVector<C> {
    pub bits: BitString,
    pub signal: C,
}

/// Hyperspace over `N` noise-bits with two references each.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperspace<C> {
    noisebits: Vec<NoiseBit<C>>,
}

fn noisebit_key(key: &StreamKey, bit: usize, value: bool) -> StreamKey {
    key.child(format!("noisebit={bit}/value={}", u8::from(value)))
}

impl<C: Carrier> Hyperspace<C> {
    pub fn new(noisebits: Vec<NoiseBit<C>>) -> Result<Self> {
        if let Some(first) = noisebits.first() {
            for nb in &noisebits[1..] {
                check_len(first.ref0.len(), nb.ref0.len())?;
            }
        }
        Ok(Self { noisebits })
    }

    pub fn noisebits(&self) -> &[NoiseBit<C>] {
        &self.noisebits
    }

    pub fn product_vector(&self, bits: &BitString) -> Result<HyperVector<C>> {
        product_vector(bits, self)
    }

    /// Basis vectors for all `2^N` bit strings.
    pub fn basis(&self) -> Result<Vec<HyperVector<C>>> {
        BitString::all(self.noisebits.len())
            .map(|b| self.product_vector(&b))
            .collect()
    }
}

impl Hyperspace<RtwSequence> {
    pub fn generate_rtw(key: &StreamKey, n_bits: usize, n_steps: usize) -> Result<Self> {
        let bits = (0..n_bits)
            .map(|i| {
                NoiseBit::new(
                    i,
                    gen_rtw(&noisebit_key(key, i, false), n_steps),
                    gen_rtw(&noisebit_key(key, i, true), n_steps),
                )
            })
            .collect::<Result<_>>()?;
        Self::new(bits)
    }
}

impl<T: Real> Hyperspace<ContinuumSignal<T>> {
    pub fn generate_continuum(
        key: &StreamKey,
        n_bits: usize,
        n_samples: usize,
        tau: T,
        dt: T,
    ) -> Result<Self> {
        let bits = (0..n_bits)
            .map(|i| {
                NoiseBit::new(
                    i,
                    gen_bandlimited_gaussian(&noisebit_key(key, i, false), n_samples, tau, dt)?,
                    gen_bandlimited_gaussian(&noisebit_key(key, i, true), n_samples, tau, dt)?,
                )
            })
            .collect::<Result<_>>()?;
        Self::new(bits)
    }

    /// True iff `x` correlates with the candidate's basis vector above the
    /// configured threshold.
    pub fn membership_test(
        &self,
        x: &ContinuumSignal<T>,
        candidate: &BitString,
        cfg: &CorrelatorConfig<T>,
    ) -> Result<bool> {
        membership_test(x, candidate, self, cfg)
    }
}

impl<C: Carrier> ReferenceSource for Hyperspace<C> {
    type Carrier = C;

    fn n_bits(&self) -> usize {
        self.noisebits.len()
    }

    fn reference(&self, bit: usize, value: bool) -> Result<Cow<'_, C>> {
        self.noisebits
            .get(bit)
            .map(|nb| Cow::Borrowed(nb.reference(value)))
            .ok_or(NblError::LengthMismatch {
                expected: self.noisebits.len(),
                actual: bit + 1,
            })
    }
}

/// Elementwise product over `i` of the reference selected by `bits[i]`.
pub fn product_vector<S: ReferenceSource>(
    bits: &BitString,
    source: &S,
) -> Result<HyperVector<S::Carrier>> {
    check_len(source.n_bits(), bits.len())?;
    let mut iter = bits.bits().iter().enumerate();
    let Some((_, &b0)) = iter.next() else {
        return Err(NblError::InvalidParameter("empty bit string".into()));
    };
    let mut signal = source.reference(0, b0)?.into_owned();
    for (i, &b) in iter {
        signal.mul_in_place(&*source.reference(i, b)?)?;
    }
    Ok(HyperVector {
        bits: bits.clone(),
        signal,
    })
}

/// Fraction of steps on which two RTW basis vectors agree.
pub fn pairwise_agreement(
    u: &HyperVector<RtwSequence>,
    v: &HyperVector<RtwSequence>,
) -> Result<f64> {
    u.signal.agreement(&v.signal)
}

/// Weighted elementwise sum of continuum basis vectors.
pub fn superpose<T: Real>(
    vectors: &[HyperVector<ContinuumSignal<T>>],
    coefficients: &[T],
) -> Result<ContinuumSignal<T>> {
    check_len(vectors.len(), coefficients.len())?;
    let Some(first) = vectors.first() else {
        return Err(NblError::InvalidParameter("nothing to superpose".into()));
    };
    let mut out = ContinuumSignal {
        samples: vec![T::zero(); first.signal.len()],
        ..first.signal.clone()
    };
    for (v, &c) in vectors.iter().zip(coefficients) {
        out.check_compatible(&v.signal)?;
        out.samples
            .iter_mut()
            .zip(&v.signal.samples)
            .for_each(|(acc, &s)| *acc += c * s);
    }
    Ok(out)
}

/// True iff `x` correlates with `product_vector(candidate)` above threshold.
pub fn membership_test<T: Real>(
    x: &ContinuumSignal<T>,
    candidate: &BitString,
    space: &Hyperspace<ContinuumSignal<T>>,
    cfg: &CorrelatorConfig<T>,
) -> Result<bool> {
    let v = product_vector(candidate, space)?;
    Ok(correlate(x, &v.signal, cfg)? > cfg.threshold)
}

/// Reduced hyperspace: one reference per noise-bit, and a 0 bit contributes
/// no factor. The all-zero string would be an empty product and is rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedHyperspace<C> {
    refs: Vec<C>,
}

impl<C: Carrier> ReducedHyperspace<C> {
    pub fn new(refs: Vec<C>) -> Result<Self> {
        if let Some(first) = refs.first() {
            for r in &refs[1..] {
                check_len(first.len(), r.len())?;
            }
        }
        Ok(Self { refs })
    }

    pub fn refs(&self) -> &[C] {
        &self.refs
    }

    pub fn product_vector(&self, bits: &BitString) -> Result<HyperVector<C>> {
        check_len(self.refs.len(), bits.len())?;
        let mut selected = bits
            .bits()
            .iter()
            .zip(&self.refs)
            .filter(|(b, _)| **b)
            .map(|(_, r)| r);
        let Some(first) = selected.next() else {
            return Err(NblError::InvalidParameter(
                "all-zero string has no factor in the reduced hyperspace".into(),
            ));
        };
        let mut signal = first.clone();
        for r in selected {
            signal.mul_in_place(r)?;
        }
        Ok(HyperVector {
            bits: bits.clone(),
            signal,
        })
    }

    /// Products for all `2^N - 1` non-empty subsets, ascending by value.
    pub fn nonempty_subset_vectors(&self) -> Result<Vec<HyperVector<C>>> {
        BitString::all(self.refs.len())
            .skip(1)
            .map(|b| self.product_vector(&b))
            .collect()
    }
}

impl ReducedHyperspace<RtwSequence> {
    pub fn generate_rtw(key: &StreamKey, n_bits: usize, n_steps: usize) -> Result<Self> {
        Self::new(
            (0..n_bits)
                .map(|i| gen_rtw(&key.child(format!("reduced={i}")), n_steps))
                .collect(),
        )
    }
}
