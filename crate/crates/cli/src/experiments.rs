use nbl_core::continuum::{error_curve, ErrorCurveParams};
use nbl_core::hyperspace::{pairwise_agreement, Hyperspace};
use nbl_core::noise::{gen_bandlimited_gaussian, gen_spike_train, zero_crossing_spikes};
use nbl_core::rtw::{Composite, Mode, RtwContext, RtwLogicValue, Validity};
use nbl_core::spike::{nonsequential_orthogonator, sequential_orthogonator, SpikeContext};
use nbl_core::stats::{proportion_band, wilson_interval};
use nbl_core::verify::{
    run_protocol, soundness_trials, trial_inputs, MemoryChannel, SoundnessParams, Transcript,
};
use nbl_core::{SpikeTrain, StreamKey};
use rayon::prelude::*;

use crate::table::ResultTable;
use crate::{HarnessError, Result};

pub const MAX_CLI_ORDER: usize = 12;

const PAIRS: [(bool, bool); 4] = [(false, false), (false, true), (true, false), (true, true)];

fn bit_name(b: bool) -> &'static str {
    if b {
        "H"
    } else {
        "L"
    }
}

fn mode_of(squeezed: bool) -> Mode {
    if squeezed {
        Mode::Squeezed
    } else {
        Mode::NonSqueezed
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Carrier {
    Rtw,
    Spike,
}

#[derive(Debug, Clone)]
pub struct GatesSpec {
    pub carrier: Carrier,
    pub squeezed: bool,
    pub seed: u64,
    pub trials: usize,
    /// Steps (RTW) or slots (spike) per context.
    pub window: usize,
    /// Spike probability per slot of the spike references.
    pub p: f64,
}

/// One gate evaluation: expected bit and the classified output.
struct GateRow {
    gate: &'static str,
    a: bool,
    b: Option<bool>,
    expected: bool,
    output: Option<bool>,
}

trait GateScheme {
    type Value;
    fn encode(&self, bit: bool) -> Self::Value;
    fn not(&self, x: &Self::Value) -> Result<Self::Value>;
    fn and(&self, x1: &Self::Value, x2: &Self::Value) -> Result<Self::Value>;
    fn compose(&self, gate: Composite, x1: &Self::Value, x2: &Self::Value) -> Result<Self::Value>;
    fn classify(&self, y: &Self::Value) -> Result<Option<bool>>;
}

impl GateScheme for RtwContext {
    type Value = RtwLogicValue;

    fn encode(&self, bit: bool) -> RtwLogicValue {
        RtwContext::encode(self, bit)
    }

    fn not(&self, x: &RtwLogicValue) -> Result<RtwLogicValue> {
        Ok(RtwContext::not(self, x)?)
    }

    fn and(&self, x1: &RtwLogicValue, x2: &RtwLogicValue) -> Result<RtwLogicValue> {
        Ok(RtwContext::and(self, x1, x2)?)
    }

    fn compose(
        &self,
        gate: Composite,
        x1: &RtwLogicValue,
        x2: &RtwLogicValue,
    ) -> Result<RtwLogicValue> {
        Ok(RtwContext::compose(self, gate, x1, x2)?)
    }

    fn classify(&self, y: &RtwLogicValue) -> Result<Option<bool>> {
        Ok(match self.validate(y.signal())? {
            Validity::IsH => Some(true),
            Validity::IsL => Some(false),
            Validity::Invalid => None,
        })
    }
}

impl GateScheme for SpikeContext {
    type Value = SpikeTrain;

    fn encode(&self, bit: bool) -> SpikeTrain {
        SpikeContext::encode(self, bit)
    }

    fn not(&self, x: &SpikeTrain) -> Result<SpikeTrain> {
        Ok(SpikeContext::not(self, x)?)
    }

    fn and(&self, x1: &SpikeTrain, x2: &SpikeTrain) -> Result<SpikeTrain> {
        Ok(SpikeContext::and(self, x1, x2)?)
    }

    fn compose(&self, gate: Composite, x1: &SpikeTrain, x2: &SpikeTrain) -> Result<SpikeTrain> {
        Ok(SpikeContext::compose(self, gate, x1, x2)?)
    }

    fn classify(&self, y: &SpikeTrain) -> Result<Option<bool>> {
        Ok(SpikeContext::classify(self, y)?)
    }
}

fn gate_rows<S: GateScheme>(ctx: &S) -> Result<Vec<GateRow>> {
    let mut rows = Vec::with_capacity(22);
    for a in [false, true] {
        let y = ctx.not(&ctx.encode(a))?;
        rows.push(GateRow {
            gate: "NOT",
            a,
            b: None,
            expected: !a,
            output: ctx.classify(&y)?,
        });
    }
    for (a, b) in PAIRS {
        let (x1, x2) = (ctx.encode(a), ctx.encode(b));
        let y = ctx.and(&x1, &x2)?;
        rows.push(GateRow {
            gate: "AND",
            a,
            b: Some(b),
            expected: a && b,
            output: ctx.classify(&y)?,
        });
    }
    for gate in Composite::ALL {
        for (a, b) in PAIRS {
            let y = ctx.compose(gate, &ctx.encode(a), &ctx.encode(b))?;
            rows.push(GateRow {
                gate: gate.name(),
                a,
                b: Some(b),
                expected: gate.truth(a, b),
                output: ctx.classify(&y)?,
            });
        }
    }
    Ok(rows)
}

fn gates_trial(spec: &GatesSpec, trial: usize) -> Result<Vec<GateRow>> {
    let key = StreamKey::new(spec.seed, format!("gates/trial={trial}"));
    let mode = mode_of(spec.squeezed);
    match spec.carrier {
        Carrier::Rtw => gate_rows(&RtwContext::generate(&key, mode, spec.window)?),
        Carrier::Spike => gate_rows(&SpikeContext::generate(&key, mode, spec.window, spec.p)?),
    }
}

/// Truth tables of NOT, AND and the four composites, one row per
/// (trial, gate, assignment), followed by a summary row.
pub fn run_gates(spec: &GatesSpec) -> Result<ResultTable> {
    if spec.trials == 0 || spec.window == 0 {
        return Err(HarnessError::Usage(
            "gates needs trials >= 1 and window >= 1".into(),
        ));
    }
    if spec.carrier == Carrier::Spike && !(spec.p > 0.0 && spec.p < 1.0) {
        return Err(HarnessError::Usage(format!(
            "spike probability {} outside (0, 1)",
            spec.p
        )));
    }
    let per_trial: Vec<Vec<GateRow>> = (0..spec.trials)
        .into_par_iter()
        .map(|t| gates_trial(spec, t))
        .collect::<Result<_>>()?;

    let mut table = ResultTable::new(
        "gates",
        spec.seed,
        &["trial", "gate", "a", "b", "expected", "output", "pass"],
    );
    table
        .meta("carrier", format!("{:?}", spec.carrier).to_lowercase())
        .meta("mode", mode_of(spec.squeezed).name())
        .meta("trials", spec.trials)
        .meta("window", spec.window);
    if spec.carrier == Carrier::Spike {
        table.meta("p", spec.p);
    }
    let mut failures = 0;
    for (t, rows) in per_trial.iter().enumerate() {
        for r in rows {
            let pass = r.output == Some(r.expected);
            failures += usize::from(!pass);
            table.push(vec![
                t.into(),
                r.gate.into(),
                bit_name(r.a).into(),
                r.b.map_or("-", bit_name).into(),
                bit_name(r.expected).into(),
                r.output.map_or("invalid", bit_name).into(),
                pass.into(),
            ]);
        }
    }
    table.push(vec![
        "total".into(),
        "*".into(),
        "-".into(),
        "-".into(),
        "-".into(),
        format!("{failures} failures").into(),
        (failures == 0).into(),
    ]);
    table.failures = failures;
    Ok(table)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OrthogonatorKind {
    Sequential,
    Nonsequential,
}

#[derive(Debug, Clone)]
pub struct OrthogonatorSpec {
    pub kind: OrthogonatorKind,
    /// Number of neuro-bits (nonsequential) or output wires (sequential).
    pub order: usize,
    pub seed: u64,
    pub window: usize,
    /// Spike probability of each neuro-bit.
    pub p: f64,
    /// Correlation time of the noise driving the sequential kind, in slots.
    pub tau: f64,
}

fn members(mask: usize, n: usize) -> String {
    let names: Vec<String> = (0..n)
        .filter(|i| mask >> i & 1 == 1)
        .map(|i| format!("X{}", i + 1))
        .collect();
    names.join("&")
}

/// Slot occupancy over all outputs; a partition has every count at most 1.
fn occupancy(outputs: &[SpikeTrain], window: usize) -> Vec<u32> {
    let mut count = vec![0u32; window];
    for o in outputs {
        for &s in o.slots() {
            count[s] += 1;
        }
    }
    count
}

pub fn run_orthogonator(spec: &OrthogonatorSpec) -> Result<ResultTable> {
    if spec.order == 0 {
        return Err(HarnessError::Usage(
            "orthogonator order must be >= 1".into(),
        ));
    }
    if spec.kind == OrthogonatorKind::Nonsequential && spec.order > MAX_CLI_ORDER {
        return Err(HarnessError::Resource(format!(
            "N = {} would produce {} outputs; the limit is N <= {MAX_CLI_ORDER}",
            spec.order,
            (1u64 << spec.order.min(63)) - 1
        )));
    }
    let key = StreamKey::new(spec.seed, "orthogonator");
    let (input_union, outputs, names): (SpikeTrain, Vec<SpikeTrain>, Vec<String>) = match spec.kind
    {
        OrthogonatorKind::Nonsequential => {
            let inputs = (0..spec.order)
                .map(|i| gen_spike_train(&key.child(format!("neurobit={i}")), spec.window, spec.p))
                .collect::<nbl_core::Result<Vec<_>>>()?;
            let union = inputs
                .iter()
                .try_fold(SpikeTrain::empty(spec.window), |acc, t| acc.union(t))?;
            let part = nonsequential_orthogonator(&inputs)?;
            let names = (1..=part.outputs().len())
                .map(|m| members(m, spec.order))
                .collect();
            (union, part.into_outputs(), names)
        }
        OrthogonatorKind::Sequential => {
            let noise =
                gen_bandlimited_gaussian::<f64>(&key.child("noise"), spec.window, spec.tau, 1.0)?;
            let input = zero_crossing_spikes(&noise);
            let outs = sequential_orthogonator(&input, spec.order)?;
            let names = (0..spec.order)
                .map(|i| format!("k mod {} = {i}", spec.order))
                .collect();
            (input, outs, names)
        }
    };

    let count = occupancy(&outputs, spec.window);
    let disjoint = count.iter().all(|&c| c <= 1);
    // every input slot is covered and no output slot lies outside the input union
    let covered = count.iter().filter(|&&c| c > 0).count();
    let union_equal =
        covered == input_union.len() && input_union.slots().iter().all(|&s| count[s] > 0);
    let sizes: Vec<usize> = outputs.iter().map(|o| o.len()).collect();
    let balanced = sizes.iter().max().unwrap_or(&0) - sizes.iter().min().unwrap_or(&0) <= 1;

    let mut table = ResultTable::new(
        "orthogonator",
        spec.seed,
        &[
            "output",
            "members",
            "spikes",
            "disjoint",
            "union_equal",
            "balanced",
        ],
    );
    table
        .meta("kind", format!("{:?}", spec.kind).to_lowercase())
        .meta("order", spec.order)
        .meta("window", spec.window);
    match spec.kind {
        OrthogonatorKind::Nonsequential => table.meta("p", spec.p),
        OrthogonatorKind::Sequential => table.meta("tau", spec.tau),
    };
    for (i, (out, name)) in outputs.iter().zip(&names).enumerate() {
        let own = out.slots().iter().all(|&s| count[s] == 1);
        table.push(vec![
            (i + 1).into(),
            name.clone().into(),
            out.len().into(),
            own.into(),
            "".into(),
            "".into(),
        ]);
    }
    let mut failures = usize::from(!disjoint) + usize::from(!union_equal);
    if spec.kind == OrthogonatorKind::Sequential {
        failures += usize::from(!balanced);
    } else if outputs.len() != (1 << spec.order) - 1 {
        failures += 1;
    }
    table.push(vec![
        "total".into(),
        format!("{} outputs", outputs.len()).into(),
        sizes.iter().sum::<usize>().into(),
        disjoint.into(),
        union_equal.into(),
        match spec.kind {
            OrthogonatorKind::Sequential => balanced.into(),
            OrthogonatorKind::Nonsequential => "-".into(),
        },
    ]);
    table.failures = failures;
    Ok(table)
}

#[derive(Debug, Clone)]
pub struct ErrorCurveSpec {
    /// Averaging windows in units of tau.
    pub windows: Vec<f64>,
    pub trials: usize,
    pub n_refs: usize,
    pub seed: u64,
    /// Samples per correlation time.
    pub tau: f64,
    pub threshold: f64,
    pub noise_gain: f64,
}

/// Correlator misclassification rate per averaging window, with 95% Wilson
/// intervals. `monotone` holds when each rate stays within the previous
/// (shorter) window's upper bound.
pub fn run_error_curve(spec: &ErrorCurveSpec) -> Result<ResultTable> {
    if spec.trials < 100 {
        return Err(HarnessError::Usage(format!(
            "error-curve needs trials >= 100, got {}",
            spec.trials
        )));
    }
    if spec.windows.is_empty() {
        return Err(HarnessError::Usage(
            "error-curve needs at least one window".into(),
        ));
    }
    if let Some(w) = spec.windows.iter().find(|w| !w.is_finite() || **w < 1.0) {
        return Err(HarnessError::Usage(format!(
            "window {w} tau is shorter than one correlation time"
        )));
    }
    if spec.n_refs < 1 {
        return Err(HarnessError::Usage(
            "error-curve needs at least one reference".into(),
        ));
    }
    let mut windows = spec.windows.clone();
    windows.sort_by(|a, b| a.total_cmp(b));
    windows.dedup();
    let points = error_curve(&ErrorCurveParams {
        seed: spec.seed,
        n_refs: spec.n_refs,
        tau: spec.tau,
        dt: 1.0,
        threshold: spec.threshold,
        windows: windows.iter().map(|w| w * spec.tau).collect(),
        trials: spec.trials,
        noise_gain: spec.noise_gain,
    })?;

    let mut table = ResultTable::new(
        "error-curve",
        spec.seed,
        &[
            "window_tau",
            "errors",
            "trials",
            "error_rate",
            "wilson_lo",
            "wilson_hi",
            "monotone",
        ],
    );
    table
        .meta("n_refs", spec.n_refs)
        .meta("trials", spec.trials)
        .meta("samples_per_tau", spec.tau)
        .meta("threshold", spec.threshold)
        .meta("noise_gain", spec.noise_gain);
    let mut prev_hi = f64::INFINITY;
    let mut all_monotone = true;
    for (w, p) in windows.iter().zip(&points) {
        let (lo, hi) = wilson_interval(p.errors, p.trials, 1.96);
        let monotone = p.rate() <= prev_hi;
        all_monotone &= monotone;
        prev_hi = hi;
        table.push(vec![
            (*w).into(),
            p.errors.into(),
            p.trials.into(),
            p.rate().into(),
            lo.into(),
            hi.into(),
            monotone.into(),
        ]);
    }
    table.meta("monotone", all_monotone);
    Ok(table)
}

#[derive(Debug, Clone)]
pub struct HyperspaceSpec {
    pub n_bits: usize,
    pub steps: usize,
    pub seed: u64,
}

/// Per-step agreement of every pair of RTW basis vectors, plus a signal
/// collision check across the whole basis.
pub fn run_hyperspace(spec: &HyperspaceSpec) -> Result<ResultTable> {
    if spec.n_bits == 0 || spec.n_bits > MAX_CLI_ORDER {
        return Err(HarnessError::Usage(format!(
            "hyperspace needs 1 <= N <= {MAX_CLI_ORDER}"
        )));
    }
    if spec.steps == 0 {
        return Err(HarnessError::Usage("hyperspace needs steps >= 1".into()));
    }
    let space = Hyperspace::generate_rtw(
        &StreamKey::new(spec.seed, "hyperspace"),
        spec.n_bits,
        spec.steps,
    )?;
    let basis = space.basis()?;
    let bound = 4.0 / (2.0 * (spec.steps as f64).sqrt());

    let pairs: Vec<(usize, usize)> = (0..basis.len())
        .flat_map(|i| (i + 1..basis.len()).map(move |j| (i, j)))
        .collect();
    let agreements: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| pairwise_agreement(&basis[i], &basis[j]))
        .collect::<nbl_core::Result<_>>()?;

    let mut table = ResultTable::new(
        "hyperspace",
        spec.seed,
        &[
            "u",
            "v",
            "hamming",
            "agreement",
            "deviation",
            "within_bound",
            "collision",
        ],
    );
    table
        .meta("n_bits", spec.n_bits)
        .meta("steps", spec.steps)
        .meta("bound", bound);
    let mut collisions = 0;
    for (&(i, j), &a) in pairs.iter().zip(&agreements) {
        let collision = basis[i].signal == basis[j].signal;
        collisions += usize::from(collision);
        let dev = (a - 0.5).abs();
        table.push(vec![
            basis[i].bits.to_string().into(),
            basis[j].bits.to_string().into(),
            basis[i].bits.hamming(&basis[j].bits).into(),
            a.into(),
            dev.into(),
            (dev < bound).into(),
            collision.into(),
        ]);
    }
    table.meta("collisions", collisions);
    table.failures = collisions;
    Ok(table)
}

#[derive(Debug, Clone)]
pub struct VerifySpec {
    pub n: usize,
    pub k: usize,
    pub trials: usize,
    pub differ: usize,
    pub seed: u64,
}

impl VerifySpec {
    fn params(&self) -> SoundnessParams {
        SoundnessParams {
            seed: self.seed,
            n: self.n,
            k: self.k,
            differ: self.differ,
            trials: self.trials,
        }
    }

    fn check(&self) -> Result<()> {
        if self.differ > self.n {
            return Err(HarnessError::Usage(format!(
                "differ = {} exceeds n = {}",
                self.differ, self.n
            )));
        }
        if self.trials == 0 {
            return Err(HarnessError::Usage("verify needs trials >= 1".into()));
        }
        Ok(())
    }
}

/// Accept rate of the string verification protocol over independent trials,
/// against the one-sided error law: 1 for equal strings, 2^-k otherwise.
pub fn run_verify(spec: &VerifySpec) -> Result<ResultTable> {
    spec.check()?;
    let s = soundness_trials(&spec.params())?;
    let expected = if spec.differ == 0 {
        1.0
    } else {
        0.5f64.powi(spec.k as i32)
    };
    let (lo, hi) = proportion_band(expected, spec.trials, 3.0);
    let rate = s.accept_rate();
    let within = lo <= rate && rate <= hi;

    let mut table = ResultTable::new(
        "verify",
        spec.seed,
        &[
            "n",
            "k",
            "differ",
            "trials",
            "accepts",
            "accept_rate",
            "expected_rate",
            "band_lo",
            "band_hi",
            "within_band",
            "bytes_on_wire",
        ],
    );
    table.push(vec![
        spec.n.into(),
        spec.k.into(),
        spec.differ.into(),
        s.trials.into(),
        s.accepts.into(),
        rate.into(),
        expected.into(),
        lo.into(),
        hi.into(),
        within.into(),
        s.bytes_on_wire.into(),
    ]);
    if spec.differ == 0 && s.accepts != s.trials {
        table.failures = s.trials - s.accepts;
    }
    Ok(table)
}

/// Transcript of a single protocol run (trial 0 of the Monte Carlo).
pub fn verify_transcript(spec: &VerifySpec) -> Result<Transcript> {
    spec.check()?;
    let (cfg, a, b) = trial_inputs(&spec.params(), 0)?;
    Ok(run_protocol(&a, &b, &cfg, &mut MemoryChannel::new())?)
}
