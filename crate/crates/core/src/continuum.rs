//! Continuum-noise logic: logic values are independent band-limited Gaussian
//! reference noises, decoded by correlating the wire signal with each
//! reference and averaging over a time window.

use rayon::prelude::*;

use crate::error::{NblError, Result};
use crate::noise::{gen_bandlimited_gaussian, ContinuumSignal, StreamKey};
use crate::scalar::Real;

/// One reference noise per logic value, all with identical sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSet<T> {
    refs: Vec<ContinuumSignal<T>>,
}

impl<T: Real> ReferenceSet<T> {
    pub fn new(refs: Vec<ContinuumSignal<T>>) -> Result<Self> {
        let Some(first) = refs.first() else {
            return Err(NblError::InvalidParameter("empty reference set".into()));
        };
        for r in &refs[1..] {
            first.check_compatible(r)?;
        }
        Ok(Self { refs })
    }

    /// `count` references drawn from children `ref=0`, `ref=1`, ... of `key`.
    pub fn generate(
        key: &StreamKey,
        count: usize,
        n_samples: usize,
        tau: T,
        dt: T,
    ) -> Result<Self> {
        let refs = (0..count)
            .map(|i| gen_bandlimited_gaussian(&key.child(format!("ref={i}")), n_samples, tau, dt))
            .collect::<Result<Vec<_>>>()?;
        Self::new(refs)
    }

    pub fn refs(&self) -> &[ContinuumSignal<T>] {
        &self.refs
    }

    pub fn get(&self, index: usize) -> Option<&ContinuumSignal<T>> {
        self.refs.get(index)
    }

    pub fn len(&self) -> usize {
        self.refs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.refs.is_empty()
    }

    pub fn tau(&self) -> T {
        self.refs[0].tau
    }

    pub fn dt(&self) -> T {
        self.refs[0].dt
    }

    pub fn samples(&self) -> usize {
        self.refs[0].len()
    }
}

pub const DEFAULT_THRESHOLD: f64 = 0.5;

/// Averaging window (time units) and decision threshold (fraction of the
/// reference power).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelatorConfig<T> {
    pub window_t: T,
    pub threshold: T,
}

impl<T: Real> CorrelatorConfig<T> {
    pub fn new(window_t: T, threshold: T) -> Result<Self> {
        if !(threshold > T::zero() && threshold < T::one()) {
            return Err(NblError::InvalidParameter(format!(
                "threshold {threshold} outside (0, 1)"
            )));
        }
        if window_t <= T::zero() || !window_t.is_finite() {
            return Err(NblError::InvalidParameter(format!(
                "averaging window {window_t} must be positive"
            )));
        }
        Ok(Self {
            window_t,
            threshold,
        })
    }

    /// Default threshold of one half.
    pub fn with_window(window_t: T) -> Result<Self> {
        Self::new(window_t, T::of(DEFAULT_THRESHOLD))
    }

    /// Number of samples averaged for signals sampled at `dt`, after checking
    /// the window against the correlation time and the available data.
    pub fn window_samples(&self, tau: T, dt: T, available: usize) -> Result<usize> {
        if self.window_t < tau {
            return Err(NblError::InvalidParameter(format!(
                "averaging window {} shorter than correlation time {tau}",
                self.window_t
            )));
        }
        let n = (self.window_t / dt)
            .round()
            .to_usize()
            .ok_or_else(|| NblError::InvalidParameter("window overflows".into()))?;
        if n > available {
            return Err(NblError::InvalidParameter(format!(
                "averaging window of {n} samples exceeds signal of {available}"
            )));
        }
        Ok(n.max(1))
    }
}

/// Time average of `x r` over the window, divided by the mean square of `r`
/// over the same window.
pub fn correlate<T: Real>(
    x: &ContinuumSignal<T>,
    r: &ContinuumSignal<T>,
    cfg: &CorrelatorConfig<T>,
) -> Result<T> {
    if x.dt != r.dt {
        return Err(NblError::InvalidParameter(format!(
            "sample period mismatch: {} vs {}",
            x.dt, r.dt
        )));
    }
    let n = cfg.window_samples(r.tau, r.dt, x.len().min(r.len()))?;
    let (mut cross, mut power) = (T::zero(), T::zero());
    for (&a, &b) in x.samples[..n].iter().zip(&r.samples[..n]) {
        cross += a * b;
        power += b * b;
    }
    if power == T::zero() {
        return Err(NblError::DegenerateReference);
    }
    Ok(cross / power)
}

/// Normalized correlation of `x` with every reference.
pub fn correlations<T: Real>(
    x: &ContinuumSignal<T>,
    set: &ReferenceSet<T>,
    cfg: &CorrelatorConfig<T>,
) -> Result<Vec<T>> {
    set.refs.iter().map(|r| correlate(x, r, cfg)).collect()
}

/// Index of the best-correlated reference above threshold; ties go to the
/// lowest index.
pub fn classify<T: Real>(
    x: &ContinuumSignal<T>,
    set: &ReferenceSet<T>,
    cfg: &CorrelatorConfig<T>,
) -> Result<Option<usize>> {
    let corr = correlations(x, set, cfg)?;
    let mut best: Option<(usize, T)> = None;
    for (i, c) in corr.into_iter().enumerate() {
        if c > cfg.threshold && best.is_none_or(|(_, b)| c > b) {
            best = Some((i, c));
        }
    }
    Ok(best.map(|(i, _)| i))
}

/// Every reference index whose correlation exceeds the threshold, ascending.
pub fn superposition_detect<T: Real>(
    x: &ContinuumSignal<T>,
    set: &ReferenceSet<T>,
    cfg: &CorrelatorConfig<T>,
) -> Result<Vec<usize>> {
    Ok(correlations(x, set, cfg)?
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c > cfg.threshold)
        .map(|(i, _)| i)
        .collect())
}

/// Behavioral XOR over a binary reference set `[L, H]`: decode both inputs,
/// combine, and re-emit the matching reference.
pub fn xor_gate<T: Real>(
    x1: &ContinuumSignal<T>,
    x2: &ContinuumSignal<T>,
    set: &ReferenceSet<T>,
    cfg: &CorrelatorConfig<T>,
) -> Result<ContinuumSignal<T>> {
    if set.len() != 2 {
        return Err(NblError::InvalidParameter(format!(
            "XOR needs a binary reference set, got {} references",
            set.len()
        )));
    }
    let decode = |x| -> Result<bool> {
        match classify(x, set, cfg)? {
            Some(i) => Ok(i == 1),
            None => Err(NblError::Undecidable),
        }
    };
    let bit = decode(x1)? != decode(x2)?;
    Ok(set.refs[usize::from(bit)].clone())
}

/// Monte Carlo setup for [`error_curve`].
#[derive(Debug, Clone)]
pub struct ErrorCurveParams<T> {
    pub seed: u64,
    pub n_refs: usize,
    pub tau: T,
    pub dt: T,
    pub threshold: T,
    /// Averaging windows in time units.
    pub windows: Vec<T>,
    pub trials: usize,
    /// Gain of an independent background noise added to the wire signal.
    pub noise_gain: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorPoint<T> {
    pub window_t: T,
    pub errors: usize,
    pub trials: usize,
}

impl<T> ErrorPoint<T> {
    pub fn rate(&self) -> f64 {
        self.errors as f64 / self.trials as f64
    }
}

/// Misclassification rate of a true reference as a function of the averaging
/// window.
///
/// Every trial draws a fresh reference set, sends reference `trial % n_refs`
/// (plus optional background noise), and counts an error unless exactly that
/// reference is detected above threshold. All windows of one trial read
/// prefixes of the same realization.
pub fn error_curve<T: Real>(params: &ErrorCurveParams<T>) -> Result<Vec<ErrorPoint<T>>> {
    if params.trials == 0 || params.n_refs == 0 || params.windows.is_empty() {
        return Err(NblError::InvalidParameter(
            "error curve needs trials, references and windows".into(),
        ));
    }
    let cfgs = params
        .windows
        .iter()
        .map(|&w| CorrelatorConfig::new(w, params.threshold))
        .collect::<Result<Vec<_>>>()?;
    let longest = params
        .windows
        .iter()
        .map(|&w| (w / params.dt).round().to_usize().unwrap_or(usize::MAX))
        .max()
        .unwrap_or(0);

    let per_trial = (0..params.trials)
        .into_par_iter()
        .map(|trial| {
            let key = StreamKey::new(params.seed, format!("error-curve/trial={trial}"));
            let set = ReferenceSet::generate(&key, params.n_refs, longest, params.tau, params.dt)?;
            let truth = trial % params.n_refs;
            let mut x = set.refs[truth].clone();
            if params.noise_gain != T::zero() {
                let bg = gen_bandlimited_gaussian(
                    &key.child("background"),
                    longest,
                    params.tau,
                    params.dt,
                )?;
                x = x.add(&bg.scaled(params.noise_gain))?;
            }
            cfgs.iter()
                .map(|cfg| Ok(superposition_detect(&x, &set, cfg)? != [truth]))
                .collect::<Result<Vec<bool>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(params
        .windows
        .iter()
        .enumerate()
        .map(|(w, &window_t)| ErrorPoint {
            window_t,
            errors: per_trial.iter().filter(|t| t[w]).count(),
            trials: params.trials,
        })
        .collect())
}
