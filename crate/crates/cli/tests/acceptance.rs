//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::os::unix::net::UnixStream;
use std::process::Command;
use std::time::{Duration, Instant};

use nbl_cli::{
    run_error_curve, run_gates, run_hyperspace, Carrier, ErrorCurveSpec, GatesSpec, HyperspaceSpec,
    ResultTable,
};
use nbl_core::continuum::{correlate, CorrelatorConfig, ReferenceSet};
use nbl_core::hyperspace::BitString;
use nbl_core::noise::{gen_bandlimited_gaussian, gen_spike_train, zero_crossing_spikes};
use nbl_core::rtw::{Mode, RtwContext, RtwLogicValue};
use nbl_core::spike::{
    neural_fourier_transform, nonsequential_orthogonator, sequential_orthogonator, SpikeContext,
};
use nbl_core::stats::proportion_band;
use nbl_core::verify::wire::frame_len;
use nbl_core::verify::{
    run_protocol, soundness_trials, MemoryChannel, SoundnessParams, StreamChannel, Verdict,
    VerifyConfig,
};
use nbl_core::{SpikeTrain, StreamKey};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const PAIRS: [(bool, bool); 4] = [(false, false), (false, true), (true, false), (true, true)];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(name: &str, elapsed: Duration, budget: Duration) -> Result<(), String> {
    ensure(elapsed < budget, || {
        format!(
            "{name} took {:.1} s, budget {:.0} s",
            elapsed.as_secs_f64(),
            budget.as_secs_f64()
        )
    })
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

/// Expected RTW output per step, read straight off the references.
fn rtw_oracle(h: &[i8], l: &[i8], bit: bool) -> Vec<i8> {
    if bit {
        h.to_vec()
    } else {
        l.to_vec()
    }
}

fn rtw_equations(seed: u64) -> Result<usize, String> {
    let n = 1000;
    let mut checks = 0;
    for mode in [Mode::Squeezed, Mode::NonSqueezed] {
        let ctx =
            RtwContext::generate(&StreamKey::new(seed, "acceptance/gates"), mode, n).map_err(e)?;
        let (h, l) = (ctx.h().to_vec(), ctx.l().to_vec());
        let value = |b: bool| RtwLogicValue::from_signal(rtw_oracle(&h, &l, b));
        for a in [false, true] {
            let y = match mode {
                Mode::Squeezed => ctx.not_squeezed(&value(a)),
                Mode::NonSqueezed => ctx.not_nonsqueezed(&value(a)),
            }
            .map_err(e)?;
            ensure(y.signal() == rtw_oracle(&h, &l, !a), || {
                format!("{} NOT({a}) seed {seed}", mode.name())
            })?;
            checks += 1;
        }
        for (a, b) in PAIRS {
            let y = match mode {
                Mode::Squeezed => ctx.and_squeezed(&value(a), &value(b)),
                Mode::NonSqueezed => ctx.and_nonsqueezed(&value(a), &value(b)),
            }
            .map_err(e)?;
            ensure(y.signal() == rtw_oracle(&h, &l, a && b), || {
                format!("{} AND({a},{b}) seed {seed}", mode.name())
            })?;
            checks += 1;
        }
    }
    Ok(checks)
}

/// Per-slot membership: slot is in the output iff it is in the reference of
/// the expected bit.
fn spike_matches(y: &SpikeTrain, expected: &SpikeTrain) -> bool {
    (0..y.window_len()).all(|s| y.contains(s) == expected.contains(s))
}

fn spike_equations(seed: u64) -> Result<usize, String> {
    let n = 1000;
    let mut checks = 0;
    for mode in [Mode::Squeezed, Mode::NonSqueezed] {
        let ctx = SpikeContext::generate(&StreamKey::new(seed, "acceptance/gates"), mode, n, 0.3)
            .map_err(e)?;
        let h = ctx.h().clone();
        let l = match mode {
            Mode::Squeezed => SpikeTrain::empty(n),
            Mode::NonSqueezed => ctx.l().clone(),
        };
        let value = |b: bool| if b { h.clone() } else { l.clone() };
        for a in [false, true] {
            let y = match mode {
                Mode::Squeezed => ctx.not_squeezed(&value(a)),
                Mode::NonSqueezed => ctx.not_nonsqueezed(&value(a)),
            }
            .map_err(e)?;
            ensure(spike_matches(&y, &value(!a)), || {
                format!("spike {} NOT({a}) seed {seed}", mode.name())
            })?;
            checks += 1;
        }
        for (a, b) in PAIRS {
            let y = match mode {
                Mode::Squeezed => ctx.and_squeezed(&value(a), &value(b)),
                Mode::NonSqueezed => ctx.and_nonsqueezed(&value(a), &value(b)),
            }
            .map_err(e)?;
            ensure(spike_matches(&y, &value(a && b)), || {
                format!("spike {} AND({a},{b}) seed {seed}", mode.name())
            })?;
            checks += 1;
        }
    }
    Ok(checks)
}

fn gate_correctness() -> Outcome {
    let start = Instant::now();
    let mut checks = 0;
    for seed in 0..100 {
        checks += rtw_equations(seed)?;
        checks += spike_equations(seed)?;
    }
    within_budget("gate checks", start.elapsed(), Duration::from_secs(5))?;
    Ok(format!(
        "{checks} truth-table rows over 100 contexts x 1000 steps, 0 failures"
    ))
}

fn universality() -> Outcome {
    let mut rows = 0;
    for carrier in [Carrier::Rtw, Carrier::Spike] {
        for squeezed in [true, false] {
            let t = run_gates(&GatesSpec {
                carrier,
                squeezed,
                seed: 11,
                trials: 100,
                window: 1000,
                p: 0.3,
            })
            .map_err(e)?;
            ensure(t.failures == 0, || {
                format!("{carrier:?} squeezed={squeezed}: {} failures", t.failures)
            })?;
            ensure(t.rows.len() == 100 * 22 + 1, || {
                format!("{} rows", t.rows.len())
            })?;
            rows += t.rows.len() - 1;
        }
    }
    Ok(format!(
        "{rows} composed-gate rows over 4 schemes x 100 seeds, 0 failures"
    ))
}

fn neuro_bits(seed: u64, n: usize, window: usize, p: f64) -> Result<Vec<SpikeTrain>, String> {
    (0..n)
        .map(|i| {
            gen_spike_train(
                &StreamKey::new(seed, format!("acceptance/neurobit={i}")),
                window,
                p,
            )
            .map_err(e)
        })
        .collect()
}

/// Subset mask of every slot by direct enumeration over the inputs.
fn slot_masks(inputs: &[SpikeTrain], window: usize) -> Vec<usize> {
    (0..window)
        .map(|s| {
            inputs
                .iter()
                .enumerate()
                .filter(|(_, t)| t.contains(s))
                .map(|(i, _)| 1 << i)
                .sum()
        })
        .collect()
}

fn partition_law() -> Outcome {
    let start = Instant::now();
    let window = 10_000;
    for n in 1..=8usize {
        for (seed, p) in [(0u64, 0.5), (1, 0.2), (2, 0.8)] {
            let inputs = neuro_bits(seed * 100 + n as u64, n, window, p)?;
            let part = nonsequential_orthogonator(&inputs).map_err(e)?;
            ensure(part.outputs().len() == (1 << n) - 1, || {
                format!("N {n}: {} outputs", part.outputs().len())
            })?;
            let mut owner = vec![0usize; window];
            for (mask, out) in part.iter() {
                for &s in out.slots() {
                    ensure(owner[s] == 0, || {
                        format!("N {n}: slot {s} in outputs {} and {mask}", owner[s])
                    })?;
                    owner[s] = mask;
                }
            }
            let masks = slot_masks(&inputs, window);
            ensure(owner == masks, || {
                format!("N {n} p {p}: membership differs from oracle")
            })?;
            // union of outputs (owner != 0) equals union of inputs (mask != 0) follows from owner == masks
        }
    }
    within_budget("partition checks", start.elapsed(), Duration::from_secs(30))?;
    Ok(format!(
        "N = 1..8, window {window}, 3 densities: disjoint, union-preserving, oracle-exact"
    ))
}

fn sequential_orthogonator_law() -> Outcome {
    let mut driven = 0;
    for seed in 0..20u64 {
        let noise = gen_bandlimited_gaussian::<f64>(
            &StreamKey::new(seed, "acceptance/seq"),
            20_000,
            5.0,
            1.0,
        )
        .map_err(e)?;
        let input = zero_crossing_spikes(&noise);
        ensure(input.len() > 1000, || {
            format!("seed {seed}: only {} crossings", input.len())
        })?;
        for m in 1..=8 {
            let outs = sequential_orthogonator(&input, m).map_err(e)?;
            ensure(outs.len() == m, || format!("m {m}: {} outputs", outs.len()))?;
            let mut merged: Vec<usize> = outs
                .iter()
                .flat_map(|o| o.slots().iter().copied())
                .collect();
            merged.sort_unstable();
            ensure(merged == input.slots(), || {
                format!("seed {seed} m {m}: merge differs from input")
            })?;
            let sizes: Vec<usize> = outs.iter().map(|o| o.len()).collect();
            let spread = sizes.iter().max().unwrap() - sizes.iter().min().unwrap();
            ensure(spread <= 1, || {
                format!("seed {seed} m {m}: sizes {sizes:?}")
            })?;
            // spikes are dealt cyclically: the k-th input spike lands on wire k mod m
            for (k, &slot) in input.slots().iter().enumerate() {
                ensure(outs[k % m].contains(slot), || {
                    format!("seed {seed} m {m}: spike {k} misrouted")
                })?;
            }
            driven += 1;
        }
    }
    Ok(format!(
        "{driven} zero-crossing-driven runs, m = 1..8: merge exact, sizes within 1"
    ))
}

fn neural_fourier() -> Outcome {
    let window = 10_000;
    let inputs = neuro_bits(5, 5, window, 0.5)?;
    let basis = nonsequential_orthogonator(&inputs)
        .map_err(e)?
        .into_outputs();
    ensure(basis.len() == 31, || format!("{} components", basis.len()))?;
    ensure(basis.iter().all(|c| !c.is_empty()), || {
        "empty component".into()
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut decisions = 0;
    for u in 0..1000 {
        let chosen: Vec<bool> = basis.iter().map(|_| rng.random_bool(0.5)).collect();
        let mut slots: Vec<usize> = basis
            .iter()
            .zip(&chosen)
            .filter(|(_, c)| **c)
            .flat_map(|(t, _)| t.slots().iter().copied())
            .collect();
        slots.sort_unstable();
        let sup = SpikeTrain::new(slots, window).map_err(e)?;
        let verdicts = neural_fourier_transform(&sup, &basis).map_err(e)?;
        for (i, ((v, c), comp)) in verdicts.iter().zip(&chosen).zip(&basis).enumerate() {
            ensure(v.is_present() == *c, || {
                format!("union {u} component {i}: wrong verdict")
            })?;
            ensure(Some(v.slot()) == comp.first(), || {
                format!("union {u} component {i}: decided at slot {}", v.slot())
            })?;
            decisions += 1;
        }
    }
    Ok(format!("{decisions} verdicts over 1000 random unions of 31 components, all correct at the first spike"))
}

fn soundness() -> Outcome {
    let start = Instant::now();
    let k10 = soundness_trials(&SoundnessParams {
        seed: 10,
        n: 16,
        k: 10,
        differ: 1,
        trials: 1_000_000,
    })
    .map_err(e)?;
    let (lo, hi) = proportion_band(2f64.powi(-10), 1_000_000, 3.0);
    let (lo_n, hi_n) = (lo * 1e6, hi * 1e6);
    ensure((lo_n..=hi_n).contains(&(k10.accepts as f64)), || {
        format!(
            "k = 10: {} accepts outside [{lo_n:.0}, {hi_n:.0}]",
            k10.accepts
        )
    })?;
    let k4 = soundness_trials(&SoundnessParams {
        seed: 4,
        n: 16,
        k: 4,
        differ: 1,
        trials: 1_000_000,
    })
    .map_err(e)?;
    let (lo4, hi4) = proportion_band(2f64.powi(-4), 1_000_000, 3.0);
    ensure((lo4..=hi4).contains(&k4.accept_rate()), || {
        format!("k = 4: rate {} outside [{lo4}, {hi4}]", k4.accept_rate())
    })?;
    let eq = soundness_trials(&SoundnessParams {
        seed: 0,
        n: 16,
        k: 10,
        differ: 0,
        trials: 100_000,
    })
    .map_err(e)?;
    ensure(eq.accepts == eq.trials, || {
        format!("completeness: {} / {}", eq.accepts, eq.trials)
    })?;
    within_budget(
        "soundness trials",
        start.elapsed(),
        Duration::from_secs(120),
    )?;
    Ok(format!(
        "k = 10: {} accepts (band {lo_n:.0}..{hi_n:.0}); k = 4: rate {:.5}; equal strings: {}/{} accepted",
        k10.accepts,
        k4.accept_rate(),
        eq.accepts,
        eq.trials
    ))
}

fn communication() -> Outcome {
    ensure(frame_len(83) == 27, || {
        format!("frame_len(83) = {}", frame_len(83))
    })?;
    for n in [10usize, 1000, 1_000_000] {
        let cfg = VerifyConfig::new(n as u64, n, 83).map_err(e)?;
        let a = BitString::zeros(n);
        let mut b = a.clone();
        b.flip(n / 2);
        for (x, y, verdict) in [
            (&a, &a, Verdict::EqualAccepted),
            (&a, &b, Verdict::DifferentDetected),
        ] {
            let mem = run_protocol(x, y, &cfg, &mut MemoryChannel::new()).map_err(e)?;
            let (tx, rx) = UnixStream::pair().map_err(e)?;
            let stream = run_protocol(x, y, &cfg, &mut StreamChannel::new(rx, tx)).map_err(e)?;
            ensure(mem.bytes_on_wire == 27, || {
                format!("n {n}: {} bytes", mem.bytes_on_wire)
            })?;
            ensure(mem == stream, || {
                format!("n {n}: memory {mem:?} vs stream {stream:?}")
            })?;
            ensure(mem.verdict == verdict, || {
                format!("n {n}: verdict {:?}", mem.verdict)
            })?;
        }
    }
    Ok("27 bytes for k = 83 at n = 10, 1e3, 1e6; memory and socket transcripts identical".into())
}

fn hyperspace_agreement() -> Outcome {
    let steps = 100_000;
    let t = run_hyperspace(&HyperspaceSpec {
        n_bits: 2,
        steps,
        seed: 8,
    })
    .map_err(e)?;
    ensure(t.rows.len() == 6, || format!("{} pairs", t.rows.len()))?;
    let within = t.column("within_bound").unwrap();
    let dev = t.column("deviation").unwrap();
    let worst = t
        .rows
        .iter()
        .map(|r| r[dev].to_string().parse::<f64>().unwrap())
        .fold(0.0, f64::max);
    ensure(t.rows.iter().all(|r| r[within] == true.into()), || {
        format!("worst deviation {worst}")
    })?;
    let mut families = 0;
    for n_bits in 1..=4 {
        for seed in 0..100 {
            let t = run_hyperspace(&HyperspaceSpec {
                n_bits,
                steps: 256,
                seed,
            })
            .map_err(e)?;
            ensure(t.failures == 0, || {
                format!("N {n_bits} seed {seed}: {} collisions", t.failures)
            })?;
            families += 1;
        }
    }
    let bound = 4.0 / (2.0 * (steps as f64).sqrt());
    Ok(format!("N = 2: worst |agreement - 0.5| = {worst:.5} < {bound:.5}; {families} families without collisions"))
}

fn error_table(trials: usize) -> Result<ResultTable, String> {
    run_error_curve(&ErrorCurveSpec {
        windows: vec![5.0, 50.0, 500.0],
        trials,
        n_refs: 2,
        seed: 9,
        tau: 4.0,
        threshold: 0.5,
        noise_gain: 0.0,
    })
    .map_err(e)
}

fn correlator() -> Outcome {
    let (tau, len) = (4.0, 2000);
    let cfg = CorrelatorConfig::with_window(len as f64).map_err(e)?;
    let bound = 4.0 / (len as f64 / tau).sqrt();
    let results: Vec<Result<(bool, bool), String>> = (0..1000u64)
        .into_par_iter()
        .map(|seed| {
            let s =
                ReferenceSet::generate(&StreamKey::new(seed, "acceptance/corr"), 2, len, tau, 1.0)
                    .map_err(e)?;
            let own = correlate(&s.refs()[0], &s.refs()[0], &cfg).map_err(e)?;
            let cross = correlate(&s.refs()[0], &s.refs()[1], &cfg).map_err(e)?;
            Ok((own == 1.0, cross.abs() < bound))
        })
        .collect();
    let results = results.into_iter().collect::<Result<Vec<_>, _>>()?;
    ensure(results.iter().all(|r| r.0), || {
        "self-correlation differs from 1".into()
    })?;
    let small = results.iter().filter(|r| r.1).count();
    ensure(small >= 990, || {
        format!("{small} / 1000 seeds below {bound:.4}")
    })?;

    let t = error_table(10_000)?;
    let rate = t.column("error_rate").unwrap();
    let rates: Vec<f64> = t
        .rows
        .iter()
        .map(|r| r[rate].to_string().parse().unwrap())
        .collect();
    ensure(rates[2] < 1e-2, || {
        format!("error at 500 tau = {}", rates[2])
    })?;
    ensure(t.metadata["monotone"] == "true", || {
        format!("not monotone: {rates:?}")
    })?;
    Ok(format!(
        "self = 1; {small}/1000 cross below {bound:.4}; error rates {rates:?} at 5/50/500 tau"
    ))
}

fn reproducibility() -> Outcome {
    let dir = tempfile::tempdir().map_err(e)?;
    let runs: [&[&str]; 7] = [
        &["gates", "--mode", "spike", "--trials", "5"],
        &["gates", "--squeezed", "--trials", "5", "--format", "json"],
        &["orthogonator", "-n", "4", "--window", "2000"],
        &[
            "orthogonator",
            "--kind",
            "sequential",
            "-n",
            "3",
            "--window",
            "2000",
        ],
        &["error-curve", "--trials", "200", "--windows", "1,5,50"],
        &[
            "hyperspace",
            "-n",
            "3",
            "--steps",
            "1000",
            "--format",
            "json",
        ],
        &["verify", "--trials", "2000", "-k", "4"],
    ];
    for args in runs {
        let mut outputs = Vec::new();
        for rep in 0..2 {
            let path = dir.path().join(format!("out{rep}"));
            let status = Command::new(env!("CARGO_BIN_EXE_nbl"))
                .args(args)
                .args(["--seed", "42", "--out"])
                .arg(&path)
                .env_remove("NBL_SEED")
                .status()
                .map_err(e)?;
            ensure(status.success(), || {
                format!("{args:?} exited with {status}")
            })?;
            outputs.push(std::fs::read(&path).map_err(e)?);
        }
        ensure(!outputs[0].is_empty() && outputs[0] == outputs[1], || {
            format!("{args:?} differs between runs")
        })?;
    }
    Ok(format!(
        "{} CLI invocations byte-identical on rerun",
        runs.len()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("gate correctness", gate_correctness),
        ("universal compositions", universality),
        ("orthogonator partition law", partition_law),
        ("sequential orthogonator", sequential_orthogonator_law),
        ("neural Fourier detection", neural_fourier),
        ("verification soundness", soundness),
        ("communication complexity", communication),
        ("hyperspace agreement", hyperspace_agreement),
        ("continuum correlator", correlator),
        ("reproducibility", reproducibility),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({secs:.1} s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1} s): {detail}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
