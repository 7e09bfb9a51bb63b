//! Seeded Monte-Carlo evaluation over the binary symmetric channel.
//!
//! Trial `t` draws its error from a ChaCha8 stream keyed by `(seed, t)`, and
//! trials are processed in fixed batches whose counters are merged in order,
//! so the statistics do not depend on the number of worker threads.

use std::fmt::Write as _;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::code::CssCode;
use crate::collective::{Classifier, Ensemble, PreparedEnsemble, Verdict};
use crate::error::{Error, Result};
use crate::gf2::{syndrome, BitVec};

/// z for a two-sided 95% interval.
pub const WILSON_Z: f64 = 1.959963984540054;

/// Trials per batch; early stopping is only checked between batches.
pub const BATCH: u64 = 1024;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelSpec {
    pub p: f64,
}

impl ChannelSpec {
    pub fn new(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidSpec(format!("crossover probability {p} outside [0, 1]")));
        }
        Ok(Self { p })
    }
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson(k: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let (k, n) = (k as f64, n as f64);
    let z2 = WILSON_Z * WILSON_Z;
    let phat = k / n;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = WILSON_Z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    // exact at the ends, where rounding would leave ±1e-18
    let lo = if k == 0.0 { 0.0 } else { (centre - half).max(0.0) };
    let hi = if k == n { 1.0 } else { (centre + half).min(1.0) };
    (lo, hi)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    pub trials: u64,
    pub frame_errors: u64,
    pub logical_errors: u64,
    pub successes: u64,
    /// Winner iterations summed over successful frames.
    pub success_iterations: u64,
}

impl Counters {
    fn add(mut self, o: Counters) -> Self {
        self.trials += o.trials;
        self.frame_errors += o.frame_errors;
        self.logical_errors += o.logical_errors;
        self.successes += o.successes;
        self.success_iterations += o.success_iterations;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stats {
    pub counters: Counters,
    pub fer: f64,
    pub avg_iterations: f64,
    pub wilson: (f64, f64),
}

impl Stats {
    pub fn from_counters(c: Counters) -> Self {
        let fer = if c.trials == 0 {
            0.0
        } else {
            c.frame_errors as f64 / c.trials as f64
        };
        let avg_iterations = if c.successes == 0 {
            0.0
        } else {
            c.success_iterations as f64 / c.successes as f64
        };
        Self {
            counters: c,
            fer,
            avg_iterations,
            wilson: wilson(c.frame_errors, c.trials),
        }
    }

    pub fn trials(&self) -> u64 {
        self.counters.trials
    }

    pub fn frame_errors(&self) -> u64 {
        self.counters.frame_errors
    }

    pub fn logical_errors(&self) -> u64 {
        self.counters.logical_errors
    }

    /// Intervals do not overlap and this one lies below `other`.
    pub fn significantly_below(&self, other: &Stats) -> bool {
        self.wilson.1 < other.wilson.0
    }
}

/// Generator for trial `trial` under `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// I.i.d. Bernoulli(`p`) bits.
pub fn sample_error<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> BitVec {
    let mut e = BitVec::zeros(n);
    if p <= 0.0 {
        return e;
    }
    for i in 0..n {
        if p >= 1.0 || rng.random::<f64>() < p {
            e.set(i, true);
        }
    }
    e
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McConfig {
    pub p: f64,
    pub trials: u64,
    pub max_iters: usize,
    pub seed: u64,
    /// Stop after the batch in which this many frame errors are reached.
    pub early_stop_frames: Option<u64>,
}

/// Monte-Carlo estimate for one ensemble at one crossover probability.
pub fn run_mc(code: &CssCode, ens: &Ensemble, cfg: &McConfig) -> Result<Stats> {
    let classifier = Classifier::new(Arc::new(code.clone()));
    run_mc_with(&classifier, ens, cfg)
}

/// [`run_mc`] with a prebuilt classifier (its code is the one simulated).
pub fn run_mc_with(classifier: &Classifier, ens: &Ensemble, cfg: &McConfig) -> Result<Stats> {
    let channel = ChannelSpec::new(cfg.p)?;
    if cfg.trials == 0 {
        return Err(Error::InvalidSpec("at least one trial is required".into()));
    }
    let code = classifier.code();
    let prepared = PreparedEnsemble::new(ens, code, channel.p)?;
    let mut total = Counters::default();
    let mut start = 0u64;
    while start < cfg.trials {
        let end = (start + BATCH).min(cfg.trials);
        let batch: Vec<Counters> = (start..end)
            .into_par_iter()
            .map(|t| one_trial(classifier, &prepared, channel.p, cfg, t))
            .collect::<Result<_>>()?;
        total = batch.into_iter().fold(total, Counters::add);
        start = end;
        if cfg.early_stop_frames.is_some_and(|k| total.frame_errors >= k) {
            break;
        }
    }
    Ok(Stats::from_counters(total))
}

fn one_trial(classifier: &Classifier, prepared: &PreparedEnsemble, p: f64, cfg: &McConfig, t: u64) -> Result<Counters> {
    let code = classifier.code();
    let mut rng = trial_rng(cfg.seed, t);
    let e = sample_error(code.n, p, &mut rng);
    let s = syndrome(&code.hz, &e)?;
    let out = prepared.decode(&e, &s, cfg.max_iters, classifier)?;
    let ok = out.verdict.is_success();
    Ok(Counters {
        trials: 1,
        frame_errors: (!ok) as u64,
        logical_errors: (out.verdict == Verdict::LogicalError) as u64,
        successes: ok as u64,
        success_iterations: if ok { out.iterations as u64 } else { 0 },
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub ensemble: String,
    pub p: f64,
    pub stats: Stats,
}

/// One row per (ensemble, p). Every point reuses the same seed, so a row
/// equals the corresponding single [`run_mc`] call.
pub fn sweep(
    code: &CssCode,
    ensembles: &[Ensemble],
    ps: &[f64],
    trials: u64,
    max_iters: usize,
    seed: u64,
    early_stop_frames: Option<u64>,
) -> Result<Vec<SweepRow>> {
    let classifier = Classifier::new(Arc::new(code.clone()));
    let mut rows = Vec::new();
    for ens in ensembles {
        for &p in ps {
            let cfg = McConfig {
                p,
                trials,
                max_iters,
                seed,
                early_stop_frames,
            };
            rows.push(SweepRow {
                ensemble: ens.name.clone(),
                p,
                stats: run_mc_with(&classifier, ens, &cfg)?,
            });
        }
    }
    Ok(rows)
}

pub const CSV_COLUMNS: &str = "ensemble,p,trials,frameErrors,logicalErrors,FER,ciLo,ciHi,avgIterations";

/// CSV table; `header` lines are written first, each prefixed with `# `.
pub fn sweep_csv(rows: &[SweepRow], header: &[String]) -> String {
    let mut out = String::new();
    for h in header {
        let _ = writeln!(out, "# {h}");
    }
    out.push_str(CSV_COLUMNS);
    out.push('\n');
    for r in rows {
        let s = &r.stats;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{:.6e},{:.6e},{:.6e},{:.4}",
            r.ensemble,
            r.p,
            s.trials(),
            s.frame_errors(),
            s.logical_errors(),
            s.fer,
            s.wilson.0,
            s.wilson.1,
            s.avg_iterations
        );
    }
    out
}

/// Wide plot table: first column `p`, then one FER column per ensemble.
pub fn plot_data(rows: &[SweepRow], header: &[String]) -> String {
    let mut names: Vec<&str> = Vec::new();
    let mut ps: Vec<f64> = Vec::new();
    for r in rows {
        if !names.contains(&r.ensemble.as_str()) {
            names.push(&r.ensemble);
        }
        if !ps.contains(&r.p) {
            ps.push(r.p);
        }
    }
    ps.sort_by(|a, b| a.total_cmp(b));
    let mut out = String::new();
    for h in header {
        let _ = writeln!(out, "# {h}");
    }
    out.push('p');
    for n in &names {
        let _ = write!(out, "\t{n}");
    }
    out.push('\n');
    for p in ps {
        let _ = write!(out, "{p}");
        for n in &names {
            match rows.iter().find(|r| r.p == p && r.ensemble == *n) {
                Some(r) => {
                    let _ = write!(out, "\t{:.6e}", r.stats.fer);
                }
                None => out.push_str("\tnan"),
            }
        }
        out.push('\n');
    }
    out
}
