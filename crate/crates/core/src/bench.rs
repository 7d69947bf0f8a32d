//! The three benchmark families and a small timing harness.
//!
//! All three have n cells of two rate-1 transitions on one input place; the
//! odd transition is uncontrollable and marks a rewarded place, the even one
//! is controllable. N1 puts the cells side by side, N2 chains them so that
//! only the odd transition continues, N3 chains them through both
//! transitions, which gives every later input place two producers.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::net::{NetBuilder, Sdpn};
use crate::rational::{self, Rational};
use crate::rewrite::{rewrite_rewards_unchecked, ValueExpression};
use crate::solve::{self, best, SmtOptions};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Family {
    N1,
    N2,
    N3,
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Family> {
        match s.to_ascii_uppercase().as_str() {
            "N1" => Ok(Family::N1),
            "N2" => Ok(Family::N2),
            "N3" => Ok(Family::N3),
            _ => Err(Error::Parse(format!("unknown family {s}"))),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

pub const DEFAULT_DENOMINATOR: i64 = 1_000_000;

/// Standard normal samples by Box-Muller over xoshiro256++.
pub struct NormalSampler {
    rng: Xoshiro256PlusPlus,
    spare: Option<f64>,
}

impl NormalSampler {
    pub fn new(seed: u64) -> Self {
        NormalSampler { rng: Xoshiro256PlusPlus::seed_from_u64(seed), spare: None }
    }

    pub fn sample(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u1 in (0, 1] keeps the logarithm finite.
        let u1 = 1.0 - self.rng.gen::<f64>();
        let u2 = self.rng.gen::<f64>();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn rational(&mut self, denominator: i64) -> Rational {
        rational::quantise(self.sample(), denominator)
    }

    /// Like `rational`, redrawing exact zeros so every reward is in the support.
    pub fn nonzero_rational(&mut self, denominator: i64) -> Rational {
        loop {
            let r = self.rational(denominator);
            if r != rational::zero() {
                return r;
            }
        }
    }
}

/// One family member with sampled rewards and threshold.
pub struct Instance {
    pub net: Sdpn,
    pub threshold: Rational,
}

/// The structure alone, with the given rewards on the designated places
/// (`rewards[k]` for cell k+1).
pub fn family_net(family: Family, n: usize, rewards: &[Rational]) -> Result<Sdpn> {
    assert!(n >= 1, "families need at least one cell");
    assert_eq!(rewards.len(), n);
    let p = |i: usize| format!("p{i}");
    let t = |i: usize| format!("t{i}");
    let none: [String; 0] = [];
    let mut b = NetBuilder::new();
    let ctrl: Vec<String> = (1..=n).map(|k| t(2 * k)).collect();
    match family {
        Family::N1 => {
            b = b.places((1..=2 * n).map(p));
            for k in 1..=n {
                b = b
                    .transition(t(2 * k - 1), &[p(2 * k - 1)], &[p(2 * k)], rational::one())
                    .transition(t(2 * k), &[p(2 * k - 1)], &none, rational::one())
                    .reward(&[p(2 * k)], rewards[k - 1].clone());
            }
            let init: Vec<String> = (1..=n).map(|k| p(2 * k - 1)).collect();
            b = b.initial(&init);
        }
        Family::N2 => {
            b = b.places((1..=n + 1).map(p));
            for k in 1..=n {
                b = b
                    .transition(t(2 * k - 1), &[p(k)], &[p(k + 1)], rational::one())
                    .transition(t(2 * k), &[p(k)], &none, rational::one())
                    .reward(&[p(k + 1)], rewards[k - 1].clone());
            }
            b = b.initial(&[p(1)]);
        }
        Family::N3 => {
            // The last cell has no successor, so its p_{2n+1} is left out.
            b = b.places((1..=2 * n).map(p));
            for k in 1..=n {
                let next: Vec<String> = if k < n { vec![p(2 * k + 1)] } else { vec![] };
                let mut odd = vec![p(2 * k)];
                odd.extend(next.iter().cloned());
                b = b
                    .transition(t(2 * k - 1), &[p(2 * k - 1)], &odd, rational::one())
                    .transition(t(2 * k), &[p(2 * k - 1)], &next, rational::one())
                    .reward(&[p(2 * k)], rewards[k - 1].clone());
            }
            b = b.initial(&[p(1)]);
        }
    }
    b.controllable(&ctrl).build()
}

/// Rewards are drawn first, one per cell, then the threshold.
pub fn gen_family(family: Family, n: usize, seed: u64, denominator: i64) -> Result<Instance> {
    let mut s = NormalSampler::new(seed);
    let rewards: Vec<Rational> = (0..n).map(|_| s.nonzero_rational(denominator)).collect();
    let threshold = s.rational(denominator);
    Ok(Instance { net: family_net(family, n, &rewards)?, threshold })
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
    pub denominator: i64,
    pub repetitions: usize,
}

impl BenchConfig {
    pub fn new(family: Family, n: usize, seed: u64) -> Self {
        BenchConfig { family, n, seed, denominator: DEFAULT_DENOMINATOR, repetitions: 1 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchRecord {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
    pub rewrite_ms: f64,
    pub brute_ms: f64,
    pub smt_ms: Option<f64>,
    /// |supp(R[k])| for k = 0..m.
    pub support_sizes: Vec<usize>,
    /// |supp([R])|.
    pub supp_r_final: usize,
    pub decision: bool,
    #[serde(serialize_with = "rational::ser")]
    pub value: Rational,
    /// Set when SMT was requested but no solver could be started.
    pub smt_skipped: bool,
}

fn median_ms(reps: usize, mut f: impl FnMut() -> Result<()>) -> Result<f64> {
    f()?;
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps.max(1) {
        let start = Instant::now();
        f()?;
        times.push(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(quantile(&mut times, 0.5))
}

/// Rewriting, brute force over the rewritten expression and optionally SMT,
/// each timed after one warm-up run. A missing solver only drops the SMT
/// column.
pub fn run_bench(cfgs: &[BenchConfig], smt: Option<&SmtOptions>) -> Result<Vec<BenchRecord>> {
    let mut out = Vec::with_capacity(cfgs.len());
    for cfg in cfgs {
        let inst = gen_family(cfg.family, cfg.n, cfg.seed, cfg.denominator)?;
        let net = &inst.net;
        let rw = rewrite_rewards_unchecked(net)?;
        let rewrite_ms = median_ms(cfg.repetitions, || rewrite_rewards_unchecked(net).map(|_| ()))?;
        let expr = ValueExpression::new(net, &rw.transition_reward);
        let sweep = || -> Result<(crate::IdSet, Rational)> {
            let c = net.controllable();
            if c.len() > solve::DEFAULT_CONTROL_CAP {
                return Err(Error::CapExceeded(c.len(), solve::DEFAULT_CONTROL_CAP));
            }
            let values: Vec<_> = crate::idset::subsets(c).map(|d| {
                let v = expr.evaluate(&d);
                (d, v)
            }).collect();
            Ok(best(&values))
        };
        let (_, value) = sweep()?;
        let brute_ms = median_ms(cfg.repetitions, || sweep().map(|_| ()))?;
        let decision = value > inst.threshold;
        let (mut smt_ms, mut smt_skipped) = (None, false);
        if let Some(opts) = smt {
            if solve::solver_available(opts) {
                let start = Instant::now();
                let r = solve::solve_smt(net, &inst.threshold, opts)?;
                smt_ms = Some(start.elapsed().as_secs_f64() * 1e3);
                if r.decision != decision {
                    return Err(Error::WitnessVerificationFailed(format!(
                        "SMT and brute force disagree on {} n={} seed={}",
                        cfg.family, cfg.n, cfg.seed
                    )));
                }
            } else {
                smt_skipped = true;
            }
        }
        out.push(BenchRecord {
            family: cfg.family,
            n: cfg.n,
            seed: cfg.seed,
            rewrite_ms,
            brute_ms,
            smt_ms,
            support_sizes: rw.support_sizes(),
            supp_r_final: rw.transition_reward.len(),
            decision,
            value,
            smt_skipped,
        });
    }
    Ok(out)
}

pub const CSV_HEADER: [&str; 9] =
    ["family", "n", "seed", "rewrite_ms", "brute_ms", "smt_ms", "supp_R_final", "decision", "value"];

pub fn write_csv<W: Write>(records: &[BenchRecord], w: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    csv.write_record(CSV_HEADER).map_err(io)?;
    for r in records {
        csv.write_record([
            r.family.to_string(),
            r.n.to_string(),
            r.seed.to_string(),
            format!("{:.3}", r.rewrite_ms),
            format!("{:.3}", r.brute_ms),
            r.smt_ms.map(|x| format!("{x:.3}")).unwrap_or_default(),
            r.supp_r_final.to_string(),
            if r.decision { "yes" } else { "no" }.to_string(),
            rational::show(&r.value),
        ])
        .map_err(io)?;
    }
    csv.flush()?;
    Ok(())
}

/// Linear interpolation between closest ranks. Sorts `xs`.
pub fn quantile(xs: &mut [f64], q: f64) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.sort_by(|a, b| a.total_cmp(b));
    let h = q * (xs.len() - 1) as f64;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    xs[lo] + (h - lo as f64) * (xs[hi] - xs[lo])
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct Aggregate {
    pub family: Family,
    pub n: usize,
    pub metric: &'static str,
    pub count: usize,
    pub median: f64,
    pub mean: f64,
    pub stddev: f64,
    pub q90: f64,
}

/// Median, mean, sample standard deviation and 90% quantile of each timing
/// column per (family, n).
pub fn aggregate(records: &[BenchRecord]) -> Vec<Aggregate> {
    let mut keys: Vec<(Family, usize)> = records.iter().map(|r| (r.family, r.n)).collect();
    keys.sort();
    keys.dedup();
    let mut out = Vec::new();
    for (family, n) in keys {
        let group: Vec<&BenchRecord> = records.iter().filter(|r| r.family == family && r.n == n).collect();
        let columns: [(&'static str, Vec<f64>); 3] = [
            ("rewrite_ms", group.iter().map(|r| r.rewrite_ms).collect()),
            ("brute_ms", group.iter().map(|r| r.brute_ms).collect()),
            ("smt_ms", group.iter().filter_map(|r| r.smt_ms).collect()),
        ];
        for (metric, mut xs) in columns {
            if xs.is_empty() {
                continue;
            }
            let count = xs.len();
            let mean = xs.iter().sum::<f64>() / count as f64;
            let stddev = if count > 1 {
                (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
            } else {
                0.0
            };
            let median = quantile(&mut xs, 0.5);
            let q90 = quantile(&mut xs, 0.9);
            out.push(Aggregate { family, n, metric, count, median, mean, stddev, q90 });
        }
    }
    out
}

pub fn write_aggregate_csv<W: Write>(rows: &[Aggregate], w: W) -> Result<()> {
    let mut csv = csv::Writer::from_writer(w);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    csv.write_record(["family", "n", "metric", "count", "median", "mean", "stddev", "q90"]).map_err(io)?;
    for a in rows {
        csv.write_record([
            a.family.to_string(),
            a.n.to_string(),
            a.metric.to_string(),
            a.count.to_string(),
            format!("{:.3}", a.median),
            format!("{:.3}", a.mean),
            format!("{:.3}", a.stddev),
            format!("{:.3}", a.q90),
        ])
        .map_err(io)?;
    }
    csv.flush()?;
    Ok(())
}
