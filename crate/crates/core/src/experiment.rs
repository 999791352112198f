//! Seeded Monte Carlo over `G(n, p)` with comparisons against exact and
//! limiting theory.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dist::{dist_even_even, dist_even_odd, dist_odd_odd, limit_dist, LimitKind};
use crate::error::{Error, Result};
use crate::gf2::{count_partitions_q2, Q2Condition};
use crate::graph::{Graph, Probability};
use crate::partition::{count_good, PartitionSpec};
use crate::pmf::{ratio_to_f64, sig15, Frequencies, RationalPmf, TruncatedPmf};
use crate::rng::trial_seed;

/// Largest `n` for which [`exhaustive_graph_audit`] runs by default.
pub const EXHAUSTIVE_N: usize = 5;

/// Largest `n` accepted behind the long-run flag.
pub const EXHAUSTIVE_N_LONG: usize = 6;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// GF(2) for `q = 2`, brute force otherwise.
    #[default]
    Auto,
    Gf2,
    BruteForce,
}

impl FromStr for Engine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Engine::Auto),
            "gf2" => Ok(Engine::Gf2),
            "bruteforce" | "brute-force" => Ok(Engine::BruteForce),
            _ => Err(Error::InvalidArgument(format!("unknown engine `{s}` (expected auto, gf2 or bruteforce)"))),
        }
    }
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Auto => "auto",
            Engine::Gf2 => "gf2",
            Engine::BruteForce => "bruteforce",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Comparison {
    /// Exact finite-`n` law for `q = 2`, `p = 1/2`.
    ExactQ2,
    /// Limiting law for `q = 2`.
    Limit,
    /// Poisson with the given mean, or the default mean of the spec.
    Poisson(Option<BigRational>),
}

impl FromStr for Comparison {
    type Err = Error;

    /// `exact`, `limit`, `poisson` or `poisson:NUM/DEN`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" | "exact_q2" | "exact-q2" => Ok(Comparison::ExactQ2),
            "limit" => Ok(Comparison::Limit),
            "poisson" => Ok(Comparison::Poisson(None)),
            _ => match s.strip_prefix("poisson:").or_else(|| s.strip_prefix("poisson=")) {
                Some(l) => l
                    .parse::<BigRational>()
                    .map(|l| Comparison::Poisson(Some(l)))
                    .map_err(|_| Error::InvalidArgument(format!("bad Poisson mean `{l}`"))),
                None => Err(Error::InvalidArgument(format!(
                    "unknown comparison `{s}` (expected exact, limit, poisson or poisson:LAMBDA)"
                ))),
            },
        }
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Comparison::ExactQ2 => f.write_str("exact_q2"),
            Comparison::Limit => f.write_str("limit"),
            Comparison::Poisson(None) => f.write_str("poisson"),
            Comparison::Poisson(Some(l)) => write!(f, "poisson({l})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub p: Probability,
    pub spec: PartitionSpec,
    pub trials: u64,
    pub seed: u64,
    pub engine: Engine,
    pub comparisons: Vec<Comparison>,
}

impl ExperimentConfig {
    pub fn new(n: usize, spec: PartitionSpec, trials: u64, seed: u64) -> Self {
        ExperimentConfig { n, p: Probability::HALF, spec, trials, seed, engine: Engine::Auto, comparisons: Vec::new() }
    }

    /// The engine actually used, after validating the guards.
    pub fn resolve_engine(&self) -> Result<Engine> {
        if self.n == 0 {
            return Err(Error::InvalidArgument("n must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be positive".into()));
        }
        let q2 = self.spec.q2_condition().is_some();
        match self.engine {
            Engine::Gf2 if !q2 => {
                Err(Error::InvalidArgument(format!("the gf2 engine needs q = 2, but the spec is {}", self.spec)))
            }
            Engine::Gf2 => Ok(Engine::Gf2),
            Engine::Auto if q2 => Ok(Engine::Gf2),
            Engine::Auto | Engine::BruteForce => {
                self.spec.check_brute_force(self.n)?;
                Ok(Engine::BruteForce)
            }
        }
    }

    fn to_json(&self) -> ConfigJson {
        ConfigJson {
            n: self.n,
            p: self.p.to_string(),
            q: self.spec.q(),
            a: self.spec.multiplicities().to_vec(),
            trials: self.trials,
            seed: self.seed,
            engine: self.engine.to_string(),
            comparisons: self.comparisons.iter().map(Comparison::to_string).collect(),
        }
    }
}

/// Default Poisson mean for a spec: `1/prod a_x!` for odd `q`;
/// `2^c / prod a_x!` for even `q >= 4` with `c` even-residue parts, or
/// `2 / prod a_x!` when `c = 0` (even `n` only). There is no Poisson limit
/// for `q = 2`.
pub fn default_poisson_mean(spec: &PartitionSpec) -> Result<BigRational> {
    let q = spec.q();
    if q == 2 {
        return Err(Error::InvalidArgument(
            "q = 2 counts are not asymptotically Poisson; give an explicit mean".into(),
        ));
    }
    let fact: BigInt =
        spec.multiplicities().iter().map(|&a| (1..=a as u64).fold(BigInt::one(), |f, i| f * i)).product();
    let num = if q % 2 == 1 {
        BigInt::one()
    } else {
        match spec.even_parts() {
            0 => BigInt::from(2),
            c => BigInt::one() << c,
        }
    };
    Ok(BigRational::new(num, fact))
}

/// Observed counts and how often each occurred.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EmpiricalPmf {
    pub histogram: BTreeMap<BigUint, u64>,
    pub trials: u64,
}

impl EmpiricalPmf {
    pub fn from_samples(samples: impl IntoIterator<Item = BigUint>) -> Self {
        let mut e = EmpiricalPmf::default();
        for s in samples {
            e.record(s, 1);
        }
        e
    }

    pub fn record(&mut self, value: BigUint, times: u64) {
        *self.histogram.entry(value).or_insert(0) += times;
        self.trials += times;
    }

    pub fn merge(mut self, other: EmpiricalPmf) -> Self {
        for (v, c) in other.histogram {
            self.record(v, c);
        }
        self
    }

    pub fn count(&self, value: &BigUint) -> u64 {
        self.histogram.get(value).copied().unwrap_or(0)
    }

    pub fn mean(&self) -> f64 {
        self.factorial_moments(1)[0]
    }

    /// Standard error of the sample mean.
    pub fn mean_standard_error(&self) -> f64 {
        let t = self.trials as f64;
        let mean = self.mean();
        let ss: f64 = self.histogram.iter().map(|(v, &c)| c as f64 * (big_f64(v) - mean).powi(2)).sum();
        if self.trials < 2 {
            return f64::INFINITY;
        }
        (ss / (t - 1.0) / t).sqrt()
    }

    /// Sample means of `x (x - 1) ... (x - k + 1)` for `k = 1..=k_max`.
    pub fn factorial_moments(&self, k_max: usize) -> Vec<f64> {
        let mut sums = vec![0.0; k_max];
        for (v, &c) in &self.histogram {
            let x = big_f64(v);
            let mut falling = 1.0;
            for (k, s) in sums.iter_mut().enumerate() {
                falling *= x - k as f64;
                *s += falling * c as f64;
            }
        }
        sums.into_iter().map(|s| s / self.trials.max(1) as f64).collect()
    }
}

impl Frequencies for EmpiricalPmf {
    fn frequencies(&self) -> BTreeMap<BigUint, f64> {
        let t = self.trials as f64;
        self.histogram.iter().map(|(v, &c)| (v.clone(), c as f64 / t)).collect()
    }
}

fn big_f64(v: &BigUint) -> f64 {
    v.to_f64().unwrap_or(f64::INFINITY)
}

/// Sample means of the falling factorials of `samples` for `k = 1..=k_max`.
pub fn empirical_factorial_moments(samples: &[u64], k_max: usize) -> Result<Vec<f64>> {
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no samples".into()));
    }
    Ok(EmpiricalPmf::from_samples(samples.iter().map(|&s| BigUint::from(s))).factorial_moments(k_max))
}

/// Count for one graph with an already resolved engine.
pub fn count_with_engine(g: &Graph, spec: &PartitionSpec, engine: Engine) -> Result<BigUint> {
    match (engine, spec.q2_condition()) {
        (Engine::Gf2 | Engine::Auto, Some(cond)) => Ok(count_partitions_q2(g, cond)),
        (Engine::Gf2, None) => Err(Error::InvalidArgument("the gf2 engine needs q = 2".into())),
        _ => count_good(g, spec).map(BigUint::from),
    }
}

/// The count observed in trial `t`; trial graphs depend only on
/// `(cfg.seed, t)`.
pub fn trial_count(cfg: &ExperimentConfig, engine: Engine, t: u64) -> Result<BigUint> {
    let g = Graph::sample_gnp(cfg.n, cfg.p, trial_seed(cfg.seed, t));
    count_with_engine(&g, &cfg.spec, engine)
}

/// Runs every trial in parallel; the histogram depends only on `cfg`.
pub fn run_trials(cfg: &ExperimentConfig) -> Result<EmpiricalPmf> {
    let engine = cfg.resolve_engine()?;
    (0..cfg.trials)
        .into_par_iter()
        .try_fold(EmpiricalPmf::default, |mut acc, t| {
            acc.record(trial_count(cfg, engine, t)?, 1);
            Ok(acc)
        })
        .try_reduce(EmpiricalPmf::default, |a, b| Ok(a.merge(b)))
}

/// `e^{-λ} λ^k / k!` for `k = 0..=k_max`, exact up to a rational
/// approximation of `e^{-λ}` with error below `2^-120`.
pub fn poisson_pmf(lambda: &BigRational, k_max: usize) -> Result<TruncatedPmf> {
    if lambda < &BigRational::zero() {
        return Err(Error::InvalidArgument(format!("Poisson mean {lambda} is negative")));
    }
    if lambda.is_zero() {
        return Ok(TruncatedPmf { pmf: RationalPmf::point_mass(0u32), tail_bound: 0.0 });
    }
    let lf = ratio_to_f64(lambda);
    if lf > 1e4 {
        return Err(Error::ScaleGuard(format!("Poisson mean {lf} exceeds 1e4")));
    }
    let eps = BigRational::new(BigInt::one(), BigInt::one() << 120);
    // Alternating series; stop once the terms are past their peak and tiny.
    let mut exp_neg = BigRational::zero();
    let mut term = BigRational::one();
    let mut j = 0u64;
    loop {
        exp_neg += &term;
        j += 1;
        term = -(&term * lambda) / BigRational::from_integer(j.into());
        if j as f64 > 2.0 * lf && num_traits::Signed::abs(&term) < eps {
            break;
        }
    }
    let mut pmf = RationalPmf::new();
    let mut power = exp_neg;
    let mut total = BigRational::zero();
    for k in 0..=k_max {
        if k > 0 {
            power = power * lambda / BigRational::from_integer(BigInt::from(k));
        }
        total += &power;
        pmf.add_mass(BigUint::from(k), power.clone());
    }
    let tail = (1.0 - ratio_to_f64(&total)).max(0.0) + 1e-30;
    Ok(TruncatedPmf { pmf, tail_bound: tail })
}

/// Exact law of the count over all `2^{C(n,2)}` graphs on `n` vertices.
pub fn exhaustive_graph_audit(n: usize, spec: &PartitionSpec, allow_long: bool) -> Result<RationalPmf> {
    let limit = if allow_long { EXHAUSTIVE_N_LONG } else { EXHAUSTIVE_N };
    if n == 0 || n > limit {
        return Err(Error::ScaleGuard(format!(
            "exhaustive audit enumerates 2^C(n,2) graphs and needs 1 <= n <= {limit}{}, got n = {n}",
            if allow_long { "" } else { " (n = 6 behind the long-run flag)" }
        )));
    }
    let engine = if spec.q2_condition().is_some() {
        Engine::Gf2
    } else {
        spec.check_brute_force(n)?;
        Engine::BruteForce
    };
    let pairs = n * (n - 1) / 2;
    let hist = (0u64..1 << pairs)
        .into_par_iter()
        .try_fold(EmpiricalPmf::default, |mut acc, mask| {
            acc.record(count_with_engine(&Graph::from_pair_mask(n, mask), spec, engine)?, 1);
            Ok::<_, Error>(acc)
        })
        .try_reduce(EmpiricalPmf::default, |a, b| Ok(a.merge(b)))?;
    let den = BigInt::one() << pairs;
    Ok(RationalPmf::from_pairs(hist.histogram.into_iter().map(|(v, c)| (v, BigRational::new(c.into(), den.clone())))))
}

/// Theory for one comparison, together with its display name.
pub fn comparison_target(cfg: &ExperimentConfig, cmp: &Comparison) -> Result<(String, TruncatedPmf)> {
    let n = cfg.n;
    let exact = |pmf: RationalPmf| TruncatedPmf { pmf, tail_bound: 0.0 };
    match cmp {
        Comparison::ExactQ2 => {
            let cond = cfg
                .spec
                .q2_condition()
                .ok_or_else(|| Error::InvalidArgument("the exact comparison needs q = 2".into()))?;
            if !cfg.p.is_half() {
                return Err(Error::InvalidArgument("the exact comparison needs p = 1/2".into()));
            }
            let pmf = match cond {
                Q2Condition::EvenEven => dist_even_even(n as u32)?,
                Q2Condition::EvenOdd => dist_even_odd(n as u32)?,
                Q2Condition::OddOdd if n % 2 == 1 => RationalPmf::point_mass(0u32),
                Q2Condition::OddOdd => dist_odd_odd(n as u32)?,
            };
            Ok((format!("exact_q2({})", cond.as_str()), exact(pmf)))
        }
        Comparison::Limit => {
            let cond = cfg.spec.q2_condition().ok_or_else(|| {
                Error::InvalidArgument("the limit comparison needs q = 2; use poisson for q >= 3".into())
            })?;
            let kind = match cond {
                Q2Condition::OddOdd if n % 2 == 1 => {
                    return Err(Error::InvalidArgument("the odd/odd limit law is along even n".into()))
                }
                Q2Condition::OddOdd => LimitKind::Z,
                _ => LimitKind::X,
            };
            Ok((format!("limit({kind})"), limit_dist(kind, 60)))
        }
        Comparison::Poisson(lambda) => {
            let lambda = match lambda {
                Some(l) => l.clone(),
                None => default_poisson_mean(&cfg.spec)?,
            };
            Ok((format!("poisson({lambda})"), poisson_pmf(&lambda, 60)?))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConfigJson {
    pub n: usize,
    pub p: String,
    pub q: u32,
    pub a: Vec<u32>,
    pub trials: u64,
    pub seed: u64,
    pub engine: String,
    pub comparisons: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramCell {
    pub value: String,
    pub count: u64,
    pub frequency: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonCell {
    pub value: String,
    pub observed: u64,
    pub empirical: f64,
    pub theory: f64,
    /// `(observed - T p) / sqrt(T p (1 - p))`, absent for degenerate `p`.
    pub z: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonResult {
    pub name: String,
    pub tv: f64,
    pub tail_bound: f64,
    pub cells: Vec<ComparisonCell>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ConfigJson,
    pub histogram: Vec<HistogramCell>,
    pub mean: f64,
    pub mean_standard_error: f64,
    pub comparisons: Vec<ComparisonResult>,
    pub wall_time_ms: u64,
}

impl ExperimentReport {
    /// Histogram as `value,count,frequency` lines with a header.
    pub fn histogram_csv(&self) -> String {
        let mut out = String::from("value,count,frequency\n");
        for c in &self.histogram {
            out.push_str(&format!("{},{},{}\n", c.value, c.count, c.frequency));
        }
        out
    }
}

pub fn compare(empirical: &EmpiricalPmf, name: String, theory: &TruncatedPmf) -> ComparisonResult {
    let t = empirical.trials as f64;
    let freq = theory.frequencies();
    let mut values: Vec<&BigUint> = freq.keys().chain(empirical.histogram.keys()).collect();
    values.sort();
    values.dedup();
    let cells = values
        .into_iter()
        .map(|v| {
            let p = freq.get(v).copied().unwrap_or(0.0);
            let observed = empirical.count(v);
            let var = t * p * (1.0 - p);
            ComparisonCell {
                value: v.to_string(),
                observed,
                empirical: sig15(observed as f64 / t),
                theory: sig15(p),
                z: (var > 0.0).then(|| sig15((observed as f64 - t * p) / var.sqrt())),
            }
        })
        .collect();
    ComparisonResult {
        name,
        tv: sig15(crate::pmf::tv_distance(empirical, &freq)),
        tail_bound: theory.tail_bound,
        cells,
    }
}

/// Runs the trials and every requested comparison.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    let targets: Vec<(String, TruncatedPmf)> =
        cfg.comparisons.iter().map(|c| comparison_target(cfg, c)).collect::<Result<_>>()?;
    let empirical = run_trials(cfg)?;
    let t = empirical.trials as f64;
    let histogram = empirical
        .histogram
        .iter()
        .map(|(v, &c)| HistogramCell { value: v.to_string(), count: c, frequency: sig15(c as f64 / t) })
        .collect();
    let comparisons = targets.into_iter().map(|(name, th)| compare(&empirical, name, &th)).collect();
    Ok(ExperimentReport {
        config: cfg.to_json(),
        histogram,
        mean: sig15(empirical.mean()),
        mean_standard_error: sig15(empirical.mean_standard_error()),
        comparisons,
        wall_time_ms: start.elapsed().as_millis() as u64,
    })
}
