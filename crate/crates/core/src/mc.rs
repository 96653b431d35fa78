//! Seeded Monte Carlo runs of the fingerprinting protocols.
//!
//! Trial `i` draws from its own ChaCha8 stream, `stream = i` under the configured seed,
//! and results are aggregated with integer counters. The report is therefore identical
//! for any thread count or work split.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::protocol::{pair_error, run_trial, Message, ProtocolKind, RogerStrategy, ENTANGLED_M};
use crate::qstate::{tetrahedral_encoding, Encoding};
use crate::twophoton::CoincidenceModel;
use crate::{Error, Result};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Pairs whose analytic errors differ by less than this count as tied for the worst case.
const WCS_TIE_TOL: f64 = 1e-12;

/// How Sapna chooses the messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Adversary {
    /// Always the pair with the largest analytic error, lowest `(x, y)` on ties.
    Wcs,
    /// `(x, y)` uniform over all `m^2` pairs, independently per trial.
    Uniform,
    FixedPair(usize, usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub kind: ProtocolKind,
    pub trials: u64,
    pub seed: u64,
    pub model: CoincidenceModel,
    pub strategy: RogerStrategy,
    pub adversary: Adversary,
    /// States for the unentangled protocol. The entangled protocol only uses its size.
    pub encoding: Encoding,
}

impl SimConfig {
    /// Tetrahedral encoding, ideal model, pure strategy, worst-case adversary.
    pub fn new(kind: ProtocolKind, trials: u64, seed: u64) -> Self {
        SimConfig {
            kind,
            trials,
            seed,
            model: CoincidenceModel::ideal(),
            strategy: RogerStrategy::Pure,
            adversary: Adversary::Wcs,
            encoding: tetrahedral_encoding(),
        }
    }
}

/// Error rates split by whether Sapna sent equal messages. A case is `None` when the
/// adversary never produces it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseRates {
    pub same: Option<f64>,
    pub diff: Option<f64>,
    /// Larger of the two cases.
    pub wcs: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CaseIntervals {
    pub same: Option<[f64; 2]>,
    pub diff: Option<[f64; 2]>,
    pub wcs: [f64; 2],
}

/// Raw per-pair trial and error counts, `m x m` row-major.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PairCounts {
    pub m: usize,
    pub trials: Vec<u64>,
    pub errors: Vec<u64>,
}

impl PairCounts {
    fn zeros(m: usize) -> Self {
        PairCounts { m, trials: vec![0; m * m], errors: vec![0; m * m] }
    }

    fn merge(mut self, other: PairCounts) -> Self {
        for (a, b) in self.trials.iter_mut().zip(&other.trials) {
            *a += b;
        }
        for (a, b) in self.errors.iter_mut().zip(&other.errors) {
            *a += b;
        }
        self
    }

    /// `(trials, errors)` summed over equal (`true`) or unequal pairs.
    pub fn case_totals(&self, equal: bool) -> (u64, u64) {
        let mut totals = (0, 0);
        for x in 0..self.m {
            for y in 0..self.m {
                if (x == y) == equal {
                    totals.0 += self.trials[x * self.m + y];
                    totals.1 += self.errors[x * self.m + y];
                }
            }
        }
        totals
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimReport {
    pub kind: ProtocolKind,
    pub trials: u64,
    pub seed: u64,
    pub empirical: CaseRates,
    /// Expected values of the `empirical` estimators under the same adversary.
    pub analytic: CaseRates,
    pub ci95: CaseIntervals,
    /// Empirical error rate of each `(x, y)`; `None` where no trial was run.
    pub pair_matrix: Vec<Vec<Option<f64>>>,
    #[serde(skip)]
    pub counts: PairCounts,
}

impl SimReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// CSV with header `x,y,trials,errors,error_rate`, one row per message pair.
    pub fn pair_matrix_csv(&self) -> String {
        let mut out = String::from("x,y,trials,errors,error_rate\n");
        let m = self.counts.m;
        for x in 0..m {
            for y in 0..m {
                let i = x * m + y;
                let rate = self.pair_matrix[x][y].map_or(String::new(), |r| format!("{r:?}"));
                out.push_str(&format!("{x},{y},{},{},{rate}\n", self.counts.trials[i], self.counts.errors[i]));
            }
        }
        out
    }
}

/// Wilson score interval for `successes` out of `n` at normal quantile `z`.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> Result<(f64, f64)> {
    if n == 0 {
        return Err(Error::domain("Wilson interval needs at least one trial"));
    }
    if successes > n {
        return Err(Error::domain(format!("{successes} successes out of {n} trials")));
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    let low = if successes == 0 { 0.0 } else { (center - half).clamp(0.0, p) };
    let high = if successes == n { 1.0 } else { (center + half).clamp(p, 1.0) };
    Ok((low, high))
}

fn validate(config: &SimConfig) -> Result<usize> {
    if config.trials == 0 {
        return Err(Error::domain("trials must be at least 1"));
    }
    let m = config.encoding.m();
    if config.kind == ProtocolKind::QuantumEntangled && m != ENTANGLED_M {
        return Err(Error::domain(format!("the entangled protocol needs m = {ENTANGLED_M}, got {m}")));
    }
    if let Adversary::FixedPair(x, y) = config.adversary {
        if x >= m || y >= m {
            return Err(Error::domain(format!("pair ({x}, {y}) outside 0..{m}")));
        }
    }
    Ok(m)
}

fn analytic_pair_errors(config: &SimConfig, m: usize) -> Result<Vec<f64>> {
    let mut errs = Vec::with_capacity(m * m);
    for x in 0..m {
        for y in 0..m {
            errs.push(pair_error(
                config.kind,
                &Message::new(x, m)?,
                &Message::new(y, m)?,
                &config.encoding,
                &config.model,
                &config.strategy,
            )?);
        }
    }
    Ok(errs)
}

fn worst_pair(errs: &[f64], m: usize) -> (usize, usize) {
    let max = errs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let i = errs.iter().position(|&e| e >= max - WCS_TIE_TOL).expect("non-empty");
    (i / m, i % m)
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn case_max(same: Option<f64>, diff: Option<f64>) -> f64 {
    same.into_iter().chain(diff).fold(0.0, f64::max)
}

/// Runs `config.trials` independent trials and summarizes them.
/// Point estimate, interval, trials and errors for one case.
type CaseEstimate = (f64, [f64; 2], u64, u64);

pub fn run_simulation(config: &SimConfig) -> Result<SimReport> {
    let m = validate(config)?;
    let errs = analytic_pair_errors(config, m)?;
    let fixed = match config.adversary {
        Adversary::Wcs => Some(worst_pair(&errs, m)),
        Adversary::FixedPair(x, y) => Some((x, y)),
        Adversary::Uniform => None,
    };
    let messages: Vec<Message> = (0..m).map(|v| Message::new(v, m)).collect::<Result<_>>()?;
    let base = ChaCha8Rng::seed_from_u64(config.seed);

    let counts = (0..config.trials)
        .into_par_iter()
        .fold(
            || PairCounts::zeros(m),
            |mut acc, i| {
                let mut rng = base.clone();
                rng.set_stream(i);
                let (x, y) = fixed.unwrap_or_else(|| (rng.random_range(0..m), rng.random_range(0..m)));
                let outcome = run_trial(
                    config.kind,
                    messages[x],
                    messages[y],
                    &config.encoding,
                    &config.model,
                    &config.strategy,
                    &mut rng,
                )
                .expect("configuration validated");
                acc.trials[x * m + y] += 1;
                acc.errors[x * m + y] += u64::from(!outcome.correct);
                acc
            },
        )
        .reduce(|| PairCounts::zeros(m), PairCounts::merge);

    let analytic = {
        let in_case = |equal: bool| {
            let pairs: Vec<usize> = match fixed {
                Some((x, y)) if (x == y) == equal => vec![x * m + y],
                Some(_) => Vec::new(),
                None => (0..m * m).filter(|i| (i / m == i % m) == equal).collect(),
            };
            mean(pairs.into_iter().map(|i| errs[i]))
        };
        let (same, diff) = (in_case(true), in_case(false));
        CaseRates { same, diff, wcs: case_max(same, diff) }
    };

    let case = |equal: bool| -> Result<Option<CaseEstimate>> {
        let (n, e) = counts.case_totals(equal);
        if n == 0 {
            return Ok(None);
        }
        let (lo, hi) = wilson_interval(e, n, Z95)?;
        Ok(Some((e as f64 / n as f64, [lo, hi], n, e)))
    };
    let (same, diff) = (case(true)?, case(false)?);
    let empirical = CaseRates {
        same: same.map(|c| c.0),
        diff: diff.map(|c| c.0),
        wcs: case_max(same.map(|c| c.0), diff.map(|c| c.0)),
    };
    let wcs_case = [same, diff]
        .into_iter()
        .flatten()
        .fold(None::<CaseEstimate>, |best, c| match best {
            Some(b) if b.0 >= c.0 => Some(b),
            _ => Some(c),
        })
        .expect("at least one trial");
    let ci95 = CaseIntervals { same: same.map(|c| c.1), diff: diff.map(|c| c.1), wcs: wcs_case.1 };

    let pair_matrix = (0..m)
        .map(|x| {
            (0..m)
                .map(|y| {
                    let i = x * m + y;
                    (counts.trials[i] > 0).then(|| counts.errors[i] as f64 / counts.trials[i] as f64)
                })
                .collect()
        })
        .collect();

    Ok(SimReport {
        kind: config.kind,
        trials: config.trials,
        seed: config.seed,
        empirical,
        analytic,
        ci95,
        pair_matrix,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_examples() {
        let (lo, _) = wilson_interval(0, 100, 1.96).unwrap();
        assert_eq!(lo, 0.0);
        let (_, hi) = wilson_interval(100, 100, 1.96).unwrap();
        assert_eq!(hi, 1.0);
        let (lo, hi) = wilson_interval(50, 100, 1.96).unwrap();
        assert!((lo - 0.404).abs() < 5e-4 && (hi - 0.596).abs() < 5e-4, "{lo} {hi}");
        assert!(wilson_interval(0, 0, 1.96).is_err());
        assert!(wilson_interval(5, 4, 1.96).is_err());
    }

    #[test]
    fn wilson_matches_direct_formula() {
        // (p + z^2/2n +- z sqrt(p(1-p)/n + z^2/4n^2)) / (1 + z^2/n), evaluated by hand-expanded terms
        let (s, n, z) = (37u64, 120u64, 1.7f64);
        let p = 37.0 / 120.0;
        let a = p + z * z / 240.0;
        let b = z * (p * (1.0 - p) / 120.0 + z * z / 57600.0).sqrt();
        let c = 1.0 + z * z / 120.0;
        let (lo, hi) = wilson_interval(s, n, z).unwrap();
        assert!((lo - (a - b) / c).abs() < 1e-15);
        assert!((hi - (a + b) / c).abs() < 1e-15);
    }

    #[test]
    fn rejects_invalid_configs() {
        let mut cfg = SimConfig::new(ProtocolKind::QuantumUnentangled, 0, 1);
        assert!(run_simulation(&cfg).is_err());
        cfg.trials = 10;
        cfg.adversary = Adversary::FixedPair(4, 0);
        assert!(run_simulation(&cfg).is_err());
        let mut cfg = SimConfig::new(ProtocolKind::QuantumEntangled, 10, 1);
        cfg.encoding = crate::qstate::search_encoding(3, 50, 0).unwrap();
        assert!(run_simulation(&cfg).is_err());
    }

    #[test]
    fn wcs_adversary_picks_first_worst_pair() {
        let cfg = SimConfig::new(ProtocolKind::QuantumUnentangled, 1000, 3);
        let r = run_simulation(&cfg).unwrap();
        assert_eq!(r.counts.trials[1], 1000);
        assert!(r.empirical.same.is_none());
        assert!((r.analytic.wcs - 2.0 / 3.0).abs() < 1e-12);

        let cfg = SimConfig::new(ProtocolKind::QuantumEntangled, 1000, 3);
        let r = run_simulation(&cfg).unwrap();
        assert_eq!(r.counts.trials[0], 1000);
        assert_eq!(r.empirical.wcs, 0.0);
    }

    #[test]
    fn intervals_contain_estimates() {
        let mut cfg = SimConfig::new(ProtocolKind::QuantumUnentangled, 5000, 11);
        cfg.adversary = Adversary::Uniform;
        cfg.model = CoincidenceModel::with_dip_depth(0.88).unwrap();
        let r = run_simulation(&cfg).unwrap();
        let same = r.empirical.same.unwrap();
        let [lo, hi] = r.ci95.same.unwrap();
        assert!(lo <= same && same <= hi);
        let diff = r.empirical.diff.unwrap();
        let [lo, hi] = r.ci95.diff.unwrap();
        assert!(lo <= diff && diff <= hi);
        assert!(r.ci95.wcs[0] <= r.empirical.wcs && r.empirical.wcs <= r.ci95.wcs[1]);
        assert_eq!(r.counts.trials.iter().sum::<u64>(), 5000);
    }

    #[test]
    fn csv_export() {
        let mut cfg = SimConfig::new(ProtocolKind::QuantumUnentangled, 200, 2);
        cfg.adversary = Adversary::FixedPair(2, 2);
        let csv = run_simulation(&cfg).unwrap().pair_matrix_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x,y,trials,errors,error_rate");
        assert_eq!(lines.len(), 17);
        assert_eq!(lines[11], "2,2,200,0,0.0");
        assert_eq!(lines[1], "0,0,0,0,");
    }
}
