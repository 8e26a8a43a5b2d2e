//! Instantaneous logic on random telegraph waves.
//!
//! A logic value is a whole window of amplitudes that equals either the HIGH
//! reference `h` or the LOW reference `l` at every step. In squeezed mode `l`
//! is the zero signal; in non-squeezed mode it is an independent RTW. Gates
//! act pointwise and need no time averaging.

use serde::{Deserialize, Serialize};

use crate::error::{NblError, Result};
use crate::noise::{check_len, gen_rtw, RtwSequence, StreamKey};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    Squeezed,
    NonSqueezed,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Squeezed => "squeezed",
            Mode::NonSqueezed => "non-squeezed",
        }
    }
}

/// Outcome of checking a candidate signal against a context.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Validity {
    IsH,
    IsL,
    Invalid,
}

/// Gates derived from NOT and AND.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Composite {
    Or,
    Nand,
    Nor,
    Xor,
}

impl Composite {
    pub const ALL: [Composite; 4] = [
        Composite::Or,
        Composite::Nand,
        Composite::Nor,
        Composite::Xor,
    ];

    pub fn truth(self, a: bool, b: bool) -> bool {
        match self {
            Composite::Or => a || b,
            Composite::Nand => !(a && b),
            Composite::Nor => !(a || b),
            Composite::Xor => a != b,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Composite::Or => "OR",
            Composite::Nand => "NAND",
            Composite::Nor => "NOR",
            Composite::Xor => "XOR",
        }
    }
}

/// A candidate logic signal with amplitudes in {-1, 0, +1}.
///
/// Construction does not check validity; every gate validates its inputs
/// against the context first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RtwLogicValue {
    signal: Vec<i8>,
}

impl RtwLogicValue {
    pub fn from_signal(signal: Vec<i8>) -> Self {
        Self { signal }
    }

    pub fn signal(&self) -> &[i8] {
        &self.signal
    }

    pub fn len(&self) -> usize {
        self.signal.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signal.is_empty()
    }

    pub fn negated(&self) -> Self {
        Self {
            signal: self.signal.iter().map(|x| -x).collect(),
        }
    }
}

/// HIGH and LOW references of one logic window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RtwContext {
    h: Vec<i8>,
    l: Vec<i8>,
    mode: Mode,
}

impl RtwContext {
    /// Squeezed context: `l` is all zeros.
    pub fn squeezed(h: RtwSequence) -> Result<Self> {
        if h.is_empty() {
            return Err(NblError::InvalidContext("empty window".into()));
        }
        let n = h.len();
        Ok(Self {
            h: h.into_steps(),
            l: vec![0; n],
            mode: Mode::Squeezed,
        })
    }

    /// Non-squeezed context from two RTWs of equal length that differ in at
    /// least one step (otherwise H and L would be indistinguishable).
    pub fn non_squeezed(h: RtwSequence, l: RtwSequence) -> Result<Self> {
        check_len(h.len(), l.len())?;
        if h.is_empty() {
            return Err(NblError::InvalidContext("empty window".into()));
        }
        if h == l {
            return Err(NblError::InvalidContext(
                "H and L references are identical".into(),
            ));
        }
        Ok(Self {
            h: h.into_steps(),
            l: l.into_steps(),
            mode: Mode::NonSqueezed,
        })
    }

    /// Draws `h` (and `l` in non-squeezed mode) from children `H` and `L` of
    /// `key`.
    pub fn generate(key: &StreamKey, mode: Mode, n_steps: usize) -> Result<Self> {
        let h = gen_rtw(&key.child("H"), n_steps);
        match mode {
            Mode::Squeezed => Self::squeezed(h),
            Mode::NonSqueezed => Self::non_squeezed(h, gen_rtw(&key.child("L"), n_steps)),
        }
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn h(&self) -> &[i8] {
        &self.h
    }

    pub fn l(&self) -> &[i8] {
        &self.l
    }

    pub fn high(&self) -> RtwLogicValue {
        RtwLogicValue::from_signal(self.h.clone())
    }

    pub fn low(&self) -> RtwLogicValue {
        RtwLogicValue::from_signal(self.l.clone())
    }

    pub fn encode(&self, bit: bool) -> RtwLogicValue {
        if bit {
            self.high()
        } else {
            self.low()
        }
    }

    pub fn validate(&self, v: &[i8]) -> Result<Validity> {
        check_len(self.len(), v.len())?;
        Ok(if v == self.h.as_slice() {
            Validity::IsH
        } else if v == self.l.as_slice() {
            Validity::IsL
        } else {
            Validity::Invalid
        })
    }

    pub fn decode(&self, v: &RtwLogicValue) -> Result<bool> {
        match self.validate(&v.signal)? {
            Validity::IsH => Ok(true),
            Validity::IsL => Ok(false),
            Validity::Invalid => Err(NblError::InvalidLogicValue),
        }
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

    /// `Y = H - X`.
    pub fn not_squeezed(&self, x: &RtwLogicValue) -> Result<RtwLogicValue> {
        self.require(Mode::Squeezed)?;
        self.decode(x)?;
        let y = self.h.iter().zip(&x.signal).map(|(h, x)| h - x).collect();
        Ok(RtwLogicValue::from_signal(y))
    }

    /// `Y = X1 X2 H`.
    pub fn and_squeezed(&self, x1: &RtwLogicValue, x2: &RtwLogicValue) -> Result<RtwLogicValue> {
        self.require(Mode::Squeezed)?;
        self.decode(x1)?;
        self.decode(x2)?;
        let y = self
            .h
            .iter()
            .zip(&x1.signal)
            .zip(&x2.signal)
            .map(|((h, a), b)| a * b * h)
            .collect();
        Ok(RtwLogicValue::from_signal(y))
    }

    /// `Y = X H L`, using `H^2 = L^2 = 1`.
    pub fn not_nonsqueezed(&self, x: &RtwLogicValue) -> Result<RtwLogicValue> {
        self.require(Mode::NonSqueezed)?;
        self.decode(x)?;
        let y = self
            .h
            .iter()
            .zip(&self.l)
            .zip(&x.signal)
            .map(|((h, l), x)| x * h * l)
            .collect();
        Ok(RtwLogicValue::from_signal(y))
    }

    /// `Y = (H - L)(X1 - L)(X2 - L) / 4 + L`.
    ///
    /// Every nonzero difference is +-2, so the product is a multiple of 8 and
    /// the division is exact in integers.
    pub fn and_nonsqueezed(&self, x1: &RtwLogicValue, x2: &RtwLogicValue) -> Result<RtwLogicValue> {
        self.require(Mode::NonSqueezed)?;
        self.decode(x1)?;
        self.decode(x2)?;
        let y = self
            .h
            .iter()
            .zip(&self.l)
            .zip(x1.signal.iter().zip(&x2.signal))
            .map(|((&h, &l), (&a, &b))| {
                let (h, l, a, b) = (h as i32, l as i32, a as i32, b as i32);
                ((h - l) * (a - l) * (b - l) / 4 + l) as i8
            })
            .collect();
        Ok(RtwLogicValue::from_signal(y))
    }

    /// NOT for this context's mode.
    pub fn not(&self, x: &RtwLogicValue) -> Result<RtwLogicValue> {
        match self.mode {
            Mode::Squeezed => self.not_squeezed(x),
            Mode::NonSqueezed => self.not_nonsqueezed(x),
        }
    }

    /// AND for this context's mode.
    pub fn and(&self, x1: &RtwLogicValue, x2: &RtwLogicValue) -> Result<RtwLogicValue> {
        match self.mode {
            Mode::Squeezed => self.and_squeezed(x1, x2),
            Mode::NonSqueezed => self.and_nonsqueezed(x1, x2),
        }
    }

    /// De Morgan compositions of the mode's NOT and AND.
    pub fn compose(
        &self,
        gate: Composite,
        a: &RtwLogicValue,
        b: &RtwLogicValue,
    ) -> Result<RtwLogicValue> {
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

/// Free-function form of [`RtwContext::validate`].
pub fn validate(v: &[i8], ctx: &RtwContext) -> Result<Validity> {
    ctx.validate(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rtw(v: &[i8]) -> RtwSequence {
        RtwSequence::new(v.to_vec()).unwrap()
    }

    fn val(v: &[i8]) -> RtwLogicValue {
        RtwLogicValue::from_signal(v.to_vec())
    }

    #[test]
    fn validate_cases() {
        let ctx = RtwContext::non_squeezed(rtw(&[1, -1, 1]), rtw(&[1, 1, -1])).unwrap();
        assert_eq!(ctx.validate(&[1, -1, 1]).unwrap(), Validity::IsH);
        assert_eq!(ctx.validate(&[1, 1, -1]).unwrap(), Validity::IsL);
        assert_eq!(ctx.validate(&[-1, 1, -1]).unwrap(), Validity::Invalid);
        assert!(matches!(
            ctx.validate(&[1, 1]),
            Err(NblError::LengthMismatch {
                expected: 3,
                actual: 2
            })
        ));
        let sq = RtwContext::squeezed(rtw(&[1, -1])).unwrap();
        assert_eq!(sq.validate(&[0, 0]).unwrap(), Validity::IsL);
    }

    #[test]
    fn squeezed_not_examples() {
        let ctx = RtwContext::squeezed(rtw(&[1, -1, 1])).unwrap();
        assert_eq!(ctx.not_squeezed(&ctx.high()).unwrap().signal(), &[0, 0, 0]);
        assert_eq!(
            ctx.not_squeezed(&val(&[0, 0, 0])).unwrap().signal(),
            ctx.h()
        );
    }

    #[test]
    fn squeezed_and_examples() {
        let ctx = RtwContext::squeezed(rtw(&[1, -1])).unwrap();
        let h = ctx.high();
        assert_eq!(ctx.and_squeezed(&h, &h).unwrap().signal(), &[1, -1]);
        assert_eq!(ctx.and_squeezed(&ctx.low(), &h).unwrap().signal(), &[0, 0]);
    }

    #[test]
    fn nonsqueezed_not_examples() {
        let ctx = RtwContext::non_squeezed(rtw(&[1, -1]), rtw(&[1, 1])).unwrap();
        assert_eq!(ctx.not_nonsqueezed(&ctx.high()).unwrap().signal(), &[1, 1]);
        assert_eq!(ctx.not_nonsqueezed(&ctx.low()).unwrap().signal(), &[1, -1]);
    }

    #[test]
    fn nonsqueezed_and_examples() {
        let ctx = RtwContext::non_squeezed(rtw(&[1, -1, -1, 1]), rtw(&[1, 1, -1, -1])).unwrap();
        let (h, l) = (ctx.high(), ctx.low());
        assert_eq!(ctx.and_nonsqueezed(&h, &h).unwrap(), h);
        assert_eq!(ctx.and_nonsqueezed(&l, &h).unwrap(), l);
        assert_eq!(ctx.and_nonsqueezed(&h, &l).unwrap(), l);
        assert_eq!(ctx.and_nonsqueezed(&l, &l).unwrap(), l);
    }

    #[test]
    fn gates_reject_invalid_inputs_and_wrong_mode() {
        let ctx = RtwContext::non_squeezed(rtw(&[1, -1]), rtw(&[1, 1])).unwrap();
        assert!(matches!(
            ctx.not(&ctx.high().negated()),
            Err(NblError::InvalidLogicValue)
        ));
        assert!(matches!(
            ctx.not_squeezed(&ctx.high()),
            Err(NblError::ModeMismatch { .. })
        ));
        let sq = RtwContext::squeezed(rtw(&[1, -1])).unwrap();
        assert!(matches!(
            sq.and_nonsqueezed(&sq.high(), &sq.high()),
            Err(NblError::ModeMismatch { .. })
        ));
        assert!(sq.and(&sq.high(), &val(&[1, 1])).is_err());
    }

    #[test]
    fn context_construction_errors() {
        assert!(RtwContext::non_squeezed(rtw(&[1, -1]), rtw(&[1, -1])).is_err());
        assert!(RtwContext::non_squeezed(rtw(&[1, -1]), rtw(&[1])).is_err());
        assert!(RtwContext::squeezed(rtw(&[])).is_err());
    }

    #[test]
    fn composite_examples() {
        for mode in [Mode::Squeezed, Mode::NonSqueezed] {
            let ctx = RtwContext::generate(&StreamKey::new(3, "ctx"), mode, 256).unwrap();
            let (h, l) = (ctx.high(), ctx.low());
            assert_eq!(ctx.compose(Composite::Or, &l, &l).unwrap(), l);
            assert_eq!(ctx.compose(Composite::Xor, &h, &l).unwrap(), h);
            for gate in Composite::ALL {
                for (a, b) in [(false, false), (false, true), (true, false), (true, true)] {
                    let y = ctx.compose(gate, &ctx.encode(a), &ctx.encode(b)).unwrap();
                    assert_eq!(y, ctx.encode(gate.truth(a, b)), "{mode:?} {gate:?} {a} {b}");
                }
            }
        }
    }
}
