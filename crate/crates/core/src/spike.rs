//! Set-algebra logic on spike trains.
//!
//! Spike trains are unipolar, so products cannot build orthogonal bases.
//! Intersections and complements can: the orthon splits two trains into their
//! overlap and remainder, orthogonators cascade it into disjoint hyperspace
//! components, and a single spike is enough to detect whether a component is
//! present in a superposition.

use crate::error::{NblError, Result};
use crate::noise::{gen_spike_train, SpikeTrain, StreamKey};
use crate::rtw::{Composite, Mode};

/// HIGH and LOW reference trains of one logic window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpikeContext {
    h: SpikeTrain,
    l: SpikeTrain,
    mode: Mode,
}

impl SpikeContext {
    /// Squeezed context: LOW is the empty train. `h` must not be empty.
    pub fn squeezed(h: SpikeTrain) -> Result<Self> {
        if h.is_empty() {
            return Err(NblError::InvalidContext("empty H reference".into()));
        }
        let l = SpikeTrain::empty(h.window_len());
        Ok(Self {
            h,
            l,
            mode: Mode::Squeezed,
        })
    }

    /// Non-squeezed context: `h` and `l` non-empty and disjoint.
    pub fn non_squeezed(h: SpikeTrain, l: SpikeTrain) -> Result<Self> {
        if h.is_empty() || l.is_empty() {
            return Err(NblError::InvalidContext("empty reference train".into()));
        }
        if !h.is_disjoint(&l)? {
            return Err(NblError::InvalidContext(
                "H and L reference trains overlap".into(),
            ));
        }
        Ok(Self {
            h,
            l,
            mode: Mode::NonSqueezed,
        })
    }

    /// Draws a Bernoulli(`p`) train from `key`; squeezed mode uses it as `h`,
    /// non-squeezed mode deals its spikes alternately to `h` and `l`.
    pub fn generate(key: &StreamKey, mode: Mode, window_len: usize, p: f64) -> Result<Self> {
        let base = gen_spike_train(key, window_len, p)?;
        match mode {
            Mode::Squeezed => Self::squeezed(base),
            Mode::NonSqueezed => {
                let mut split = sequential_orthogonator(&base, 2)?.into_iter();
                let h = split.next().expect("two outputs");
                let l = split.next().expect("two outputs");
                Self::non_squeezed(h, l)
            }
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn h(&self) -> &SpikeTrain {
        &self.h
    }

    pub fn l(&self) -> &SpikeTrain {
        &self.l
    }

    pub fn window_len(&self) -> usize {
        self.h.window_len()
    }

    pub fn encode(&self, bit: bool) -> SpikeTrain {
        if bit {
            self.h.clone()
        } else {
            self.l.clone()
        }
    }

    /// `Some(true)` for H, `Some(false)` for L, `None` otherwise.
    pub fn classify(&self, x: &SpikeTrain) -> Result<Option<bool>> {
        if x.window_len() != self.window_len() {
            return Err(NblError::WindowMismatch {
                left: self.window_len(),
                right: x.window_len(),
            });
        }
        Ok(if *x == self.h {
            Some(true)
        } else if *x == self.l {
            Some(false)
        } else {
            None
        })
    }

    pub fn decode(&self, x: &SpikeTrain) -> Result<bool> {
        self.classify(x)?.ok_or(NblError::InvalidLogicValue)
    }

    fn require(&self, mode: Mode) -> Result<()> {
        if self.mode != mode {
            return Err(NblError::ModeMismatch {
                expected: mode.name(),
                actual: self.mode.name(),
            });
        }
        Ok(())
    }

    /// `Y = H ∩ X̄`, the lower output of an orthon fed with (H, X).
    pub fn not_squeezed(&self, x: &SpikeTrain) -> Result<SpikeTrain> {
        self.require(Mode::Squeezed)?;
        self.decode(x)?;
        Ok(orthon(&self.h, x)?.1)
    }

    /// `Y = X1 ∩ X2`, the upper output of an orthon fed with (X1, X2).
    pub fn and_squeezed(&self, x1: &SpikeTrain, x2: &SpikeTrain) -> Result<SpikeTrain> {
        self.require(Mode::Squeezed)?;
        self.decode(x1)?;
        self.decode(x2)?;
        Ok(orthon(x1, x2)?.0)
    }

    /// `Y = X̄ ∩ (L ∪ H)`.
    pub fn not_nonsqueezed(&self, x: &SpikeTrain) -> Result<SpikeTrain> {
        self.require(Mode::NonSqueezed)?;
        self.decode(x)?;
        x.complement().intersection(&self.l.union(&self.h)?)
    }

    /// `Y = (X1 ∩ X2 ∩ H) ∪ (X1 ∩ L) ∪ (X2 ∩ L)`.
    pub fn and_nonsqueezed(&self, x1: &SpikeTrain, x2: &SpikeTrain) -> Result<SpikeTrain> {
        self.require(Mode::NonSqueezed)?;
        self.decode(x1)?;
        self.decode(x2)?;
        let both_high = x1.intersection(x2)?.intersection(&self.h)?;
        both_high
            .union(&x1.intersection(&self.l)?)?
            .union(&x2.intersection(&self.l)?)
    }

    pub fn not(&self, x: &SpikeTrain) -> Result<SpikeTrain> {
        match self.mode {
            Mode::Squeezed => self.not_squeezed(x),
            Mode::NonSqueezed => self.not_nonsqueezed(x),
        }
    }

    pub fn and(&self, x1: &SpikeTrain, x2: &SpikeTrain) -> Result<SpikeTrain> {
        match self.mode {
            Mode::Squeezed => self.and_squeezed(x1, x2),
            Mode::NonSqueezed => self.and_nonsqueezed(x1, x2),
        }
    }

    pub fn compose(&self, gate: Composite, a: &SpikeTrain, b: &SpikeTrain) -> Result<SpikeTrain> {
        match gate {
            Composite::Nand => self.not(&self.and(a, b)?),
            Composite::Nor => self.and(&self.not(a)?, &self.not(b)?),
            Composite::Or => self.not(&self.compose(Composite::Nor, a, b)?),
            Composite::Xor => self.and(
                &self.compose(Composite::Or, a, b)?,
                &self.compose(Composite::Nand, a, b)?,
            ),
        }
    }
}

/// Two-input, two-output element: `(upper, lower) = (a ∩ b, a ∩ b̄)`.
pub fn orthon(a: &SpikeTrain, b: &SpikeTrain) -> Result<(SpikeTrain, SpikeTrain)> {
    a.split_by(b)
}

/// Disjoint decomposition of N neuro-bits into `2^N - 1` components.
///
/// Component `mask` (bit `i` set means input `i` belongs to the subset) holds
/// the slots present in every selected input and absent from all others.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HyperPartition {
    inputs: Vec<SpikeTrain>,
    outputs: Vec<SpikeTrain>,
}

impl HyperPartition {
    pub fn inputs(&self) -> &[SpikeTrain] {
        &self.inputs
    }

    /// Outputs ordered by subset mask, `outputs()[mask - 1]`.
    pub fn outputs(&self) -> &[SpikeTrain] {
        &self.outputs
    }

    pub fn order(&self) -> usize {
        self.inputs.len()
    }

    /// Output for the non-empty subset `mask`.
    pub fn get(&self, mask: usize) -> Option<&SpikeTrain> {
        mask.checked_sub(1).and_then(|i| self.outputs.get(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &SpikeTrain)> {
        self.outputs.iter().enumerate().map(|(i, t)| (i + 1, t))
    }

    pub fn into_outputs(self) -> Vec<SpikeTrain> {
        self.outputs
    }
}

/// Largest orthogonator order accepted; `2^N - 1` outputs are materialized.
pub const MAX_ORTHOGONATOR_ORDER: usize = 20;

/// Parallel-input orthogonator built as an orthon cascade.
///
/// Inputs are folded in one at a time: each existing component is split by
/// the new input (overlap joins the subset, remainder keeps it), and the new
/// input's slots outside every earlier input form its singleton component.
pub fn nonsequential_orthogonator(inputs: &[SpikeTrain]) -> Result<HyperPartition> {
    let Some(first) = inputs.first() else {
        return Err(NblError::InvalidParameter(
            "orthogonator needs at least one input".into(),
        ));
    };
    if inputs.len() > MAX_ORTHOGONATOR_ORDER {
        return Err(NblError::InvalidParameter(format!(
            "orthogonator order {} exceeds {MAX_ORTHOGONATOR_ORDER}",
            inputs.len()
        )));
    }
    let window = first.window_len();
    if let Some(bad) = inputs.iter().find(|t| t.window_len() != window) {
        return Err(NblError::WindowMismatch {
            left: window,
            right: bad.window_len(),
        });
    }

    let mut outputs = vec![first.clone()];
    let mut covered = first.clone();
    for (j, input) in inputs.iter().enumerate().skip(1) {
        let bit = 1usize << j;
        outputs.resize(2 * bit - 1, SpikeTrain::empty(window));
        for mask in 1..bit {
            let (upper, lower) = orthon(&outputs[mask - 1], input)?;
            outputs[mask - 1] = lower;
            outputs[(mask | bit) - 1] = upper;
        }
        outputs[bit - 1] = orthon(input, &covered)?.1;
        covered = covered.union(input)?;
    }
    Ok(HyperPartition {
        inputs: inputs.to_vec(),
        outputs,
    })
}

/// Rotary-switch demultiplexer: spike `k` of the input goes to output `k % m`.
pub fn sequential_orthogonator(input: &SpikeTrain, m: usize) -> Result<Vec<SpikeTrain>> {
    if m == 0 {
        return Err(NblError::InvalidParameter(
            "sequential orthogonator needs at least one output".into(),
        ));
    }
    let mut outs = vec![Vec::with_capacity(input.len() / m + 1); m];
    for (k, &slot) in input.slots().iter().enumerate() {
        outs[k % m].push(slot);
    }
    outs.into_iter()
        .map(|slots| SpikeTrain::new(slots, input.window_len()))
        .collect()
}

/// First-spike verdict of a presence detector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Detection {
    Present { slot: usize },
    Absent { slot: usize },
}

impl Detection {
    pub fn is_present(self) -> bool {
        matches!(self, Detection::Present { .. })
    }

    /// The single slot the decision was based on.
    pub fn slot(self) -> usize {
        match self {
            Detection::Present { slot } | Detection::Absent { slot } => slot,
        }
    }
}

/// Decides whether `component` is part of `superposition` by looking only at
/// the component's first spike.
///
/// Valid when the superposition is a union of mutually disjoint components
/// that either contains this component entirely or not at all.
pub fn neural_fourier_detect(
    superposition: &SpikeTrain,
    component: &SpikeTrain,
) -> Result<Detection> {
    if superposition.window_len() != component.window_len() {
        return Err(NblError::WindowMismatch {
            left: superposition.window_len(),
            right: component.window_len(),
        });
    }
    let slot = component
        .first()
        .ok_or_else(|| NblError::InvalidParameter("component has no spike to detect".into()))?;
    Ok(if superposition.contains(slot) {
        Detection::Present { slot }
    } else {
        Detection::Absent { slot }
    })
}

/// Runs the detector for every component of a basis.
pub fn neural_fourier_transform(
    superposition: &SpikeTrain,
    basis: &[SpikeTrain],
) -> Result<Vec<Detection>> {
    basis
        .iter()
        .map(|c| neural_fourier_detect(superposition, c))
        .collect()
}
