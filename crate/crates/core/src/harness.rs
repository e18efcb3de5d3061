//! Seeded correction experiments and their JSON-lines reports.
//!
//! Every random choice flows from `master_seed`: the base function from
//! `derive_seed(master_seed, u64::MAX)`, trial `t` from `derive_seed(master_seed, t)`.
//! Trials run in parallel but are assembled in index order, so identical
//! configurations produce byte-identical reports.

use std::collections::HashSet;
use std::fmt;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::all_influences_at_least_threshold;
use crate::boolfn::{BooleanFunction, JuntaSpec, SymmetricFunction, TruthTable};
use crate::correctors::{
    cube_sum_correct, influence_correct, majority_of, symmetric_correct, CorrectionResult,
    InfluenceCorrectorParams,
};
use crate::error::{Error, Result};
use crate::oracle::{CorruptionModel, NoisyOracle};
use crate::point::Point;
use crate::rng::{seeded_rng, SimRng};

pub use crate::rng::derive_seed;

/// Upper limit on junta redraws while looking for one with all influences >= 1/50.
pub const MAX_REDRAWS: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algo {
    Cube,
    Influence,
    Symmetric,
}

impl FromStr for Algo {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cube" => Ok(Algo::Cube),
            "influence" => Ok(Algo::Influence),
            "symmetric" => Ok(Algo::Symmetric),
            _ => Err(Error::param("algo", format!("unknown algorithm `{s}`"))),
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algo::Cube => "cube",
            Algo::Influence => "influence",
            Algo::Symmetric => "symmetric",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum XMode {
    /// The same point every trial, given in hex.
    FixedHex(String),
    Random,
    /// A point where the corruption changes the value, when the model has one.
    AdversarialFlipped,
}

impl FromStr for XMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(XMode::Random),
            "adversarial-flipped" => Ok(XMode::AdversarialFlipped),
            _ => match s.strip_prefix("fixed-hex:") {
                Some(hex) => Ok(XMode::FixedHex(hex.to_string())),
                None => Err(Error::param(
                    "x_mode",
                    format!("expected random, adversarial-flipped or fixed-hex:<hex>, got `{s}`"),
                )),
            },
        }
    }
}

impl fmt::Display for XMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XMode::FixedHex(h) => write!(f, "fixed-hex:{h}"),
            XMode::Random => f.write_str("random"),
            XMode::AdversarialFlipped => f.write_str("adversarial-flipped"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentConfig {
    pub algo: Algo,
    pub k: usize,
    pub n: usize,
    /// Corruption descriptor; see [`parse_corruption`].
    pub corruption: String,
    pub trials: u64,
    pub master_seed: u64,
    pub x_mode: XMode,
    pub repeat_t: Option<usize>,
    /// Optional core truth-table file for the junta; random otherwise.
    pub core: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(algo: Algo, k: usize, n: usize, corruption: &str, trials: u64, seed: u64) -> Self {
        ExperimentConfig {
            algo,
            k,
            n,
            corruption: corruption.to_string(),
            trials,
            master_seed: seed,
            x_mode: XMode::Random,
            repeat_t: None,
            core: None,
        }
    }

    pub fn with_x_mode(mut self, mode: XMode) -> Self {
        self.x_mode = mode;
        self
    }

    pub fn with_repeat(mut self, t: usize) -> Self {
        self.repeat_t = Some(t);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::param("trials", "must be at least 1"));
        }
        if self.n == 0 {
            return Err(Error::param("n", "must be at least 1"));
        }
        if self.algo != Algo::Symmetric {
            if self.k == 0 || self.k > self.n {
                return Err(Error::param("k", format!("need 1 <= k <= n, got k = {}", self.k)));
            }
            if self.k > crate::boolfn::MAX_TABLE_VARS {
                return Err(Error::param("k", "junta cores support k <= 24"));
            }
        }
        if self.algo == Algo::Cube && self.k > crate::correctors::CUBE_MAX_K {
            return Err(Error::param("k", "cube corrector supports k <= 20"));
        }
        if let Some(t) = self.repeat_t {
            if t == 0 || t % 2 == 0 {
                return Err(Error::param("repeat_t", "must be a positive odd integer"));
            }
        }
        if let XMode::FixedHex(hex) = &self.x_mode {
            Point::from_hex(self.n, hex)?;
        }
        Ok(())
    }
}

/// Parses a corruption descriptor. Besides the forms understood by
/// [`CorruptionModel::parse`], `rflips:<count>:<seed>` draws `count` distinct
/// uniform points to flip.
pub fn parse_corruption(desc: &str, n: usize) -> Result<CorruptionModel> {
    if let Some(rest) = desc.trim().strip_prefix("rflips:") {
        let (count, seed) = rest
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("expected rflips:<count>:<seed>, got `{desc}`")))?;
        let count: u64 = count
            .parse()
            .map_err(|_| Error::Parse(format!("bad flip count `{count}`")))?;
        let seed: u64 = seed
            .parse()
            .map_err(|_| Error::Parse(format!("bad flip seed `{seed}`")))?;
        return random_flips(n, count, seed).map(CorruptionModel::ExplicitFlips);
    }
    CorruptionModel::parse(desc, n)
}

/// `count` distinct uniform points of Z_2^n.
pub fn random_flips(n: usize, count: u64, seed: u64) -> Result<HashSet<Point>> {
    if n < 64 && count > 1u64 << n {
        return Err(Error::param("count", format!("more flips than the 2^{n} points")));
    }
    let mut rng = seeded_rng(seed);
    let mut set = HashSet::with_capacity(count as usize);
    while (set.len() as u64) < count {
        set.insert(Point::random(n, &mut rng));
    }
    Ok(set)
}

/// The uncorrupted function an experiment corrects.
#[derive(Clone, Debug)]
pub enum ExperimentBase {
    Junta(JuntaSpec),
    Symmetric(SymmetricFunction),
}

impl BooleanFunction for ExperimentBase {
    fn n(&self) -> usize {
        match self {
            ExperimentBase::Junta(j) => j.n(),
            ExperimentBase::Symmetric(s) => s.n(),
        }
    }

    fn eval(&self, x: &Point) -> bool {
        match self {
            ExperimentBase::Junta(j) => j.eval(x),
            ExperimentBase::Symmetric(s) => s.eval(x),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub x: String,
    pub returned: u8,
    pub truth: u8,
    pub success: bool,
    pub queries: u64,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub algo: String,
    pub k: usize,
    pub n: usize,
    pub corruption: String,
    pub x_mode: String,
    pub repeat_t: Option<usize>,
    pub seed: u64,
    pub trials: u64,
    pub successes: u64,
    pub success_rate: f64,
    pub mean_queries: f64,
    /// 95% normal-approximation half-width of `success_rate`.
    pub ci_halfwidth: f64,
    /// Junta redraws needed to meet the influence precondition (influence algo only).
    pub redraws: Option<u64>,
    /// Trials whose x fell back to a uniform point because no corrupted point was found.
    pub adversarial_fallbacks: u64,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutcome {
    pub records: Vec<TrialRecord>,
    pub summary: Summary,
    pub base: ExperimentBase,
}

fn build_base(cfg: &ExperimentConfig, rng: &mut SimRng) -> Result<(ExperimentBase, Option<u64>)> {
    match cfg.algo {
        Algo::Symmetric => {
            let profile = (0..=cfg.n).map(|_| rng.random::<bool>()).collect();
            Ok((ExperimentBase::Symmetric(SymmetricFunction::new(profile)?), None))
        }
        Algo::Cube | Algo::Influence => {
            let fixed_core = match &cfg.core {
                Some(path) => {
                    let core = TruthTable::read_path(path)?;
                    if core.k() != cfg.k {
                        return Err(Error::param(
                            "core",
                            format!("core file has k = {}, config has k = {}", core.k(), cfg.k),
                        ));
                    }
                    Some(core)
                }
                None => None,
            };
            let mut redraws = 0u64;
            loop {
                let spec = match &fixed_core {
                    Some(core) => {
                        let mut coords: Vec<usize> = (1..=cfg.n).collect();
                        let (chosen, _) = coords.partial_shuffle(rng, cfg.k);
                        JuntaSpec::new(cfg.n, core.clone(), chosen.to_vec())?
                    }
                    None => JuntaSpec::random(cfg.k, cfg.n, rng)?,
                };
                if cfg.algo == Algo::Cube || all_influences_at_least_threshold(spec.core()) {
                    let redraws = (cfg.algo == Algo::Influence).then_some(redraws);
                    return Ok((ExperimentBase::Junta(spec), redraws));
                }
                if fixed_core.is_some() {
                    return Err(Error::param(
                        "core",
                        "core has a variable with influence below 1/50",
                    ));
                }
                redraws += 1;
                if redraws >= MAX_REDRAWS {
                    return Err(Error::param(
                        "k",
                        format!("no junta with all influences >= 1/50 after {MAX_REDRAWS} draws"),
                    ));
                }
            }
        }
    }
}

/// A point in the corruption's support, or `None` when none was found.
fn corrupted_point<F: BooleanFunction>(
    oracle: &NoisyOracle<F>,
    sorted_flips: &[Point],
    rng: &mut SimRng,
) -> Option<Point> {
    let n = oracle.n();
    match oracle.corruption() {
        CorruptionModel::None => None,
        CorruptionModel::ExplicitFlips(_) => sorted_flips.choose(rng).cloned(),
        CorruptionModel::IidFlips { .. } => (0..10_000_000).find_map(|_| {
            let x = Point::random(n, rng);
            oracle.differs_at(&x).then_some(x)
        }),
        CorruptionModel::WeightTruncation { threshold } => {
            let h = n / 2;
            if *threshold >= h {
                return None;
            }
            // heavy first half: set threshold + 1 coordinates there
            (0..100_000).find_map(|_| {
                let mut x = Point::random(n, rng);
                let mut first: Vec<usize> = (1..=h).collect();
                let (chosen, _) = first.partial_shuffle(rng, threshold + 1);
                for &c in chosen.iter() {
                    x.set(c, true);
                }
                oracle.differs_at(&x).then_some(x)
            })
        }
        CorruptionModel::BalancedLayerZero => (0..100_000).find_map(|_| {
            let mut coords: Vec<usize> = (1..=n).collect();
            let (chosen, _) = coords.partial_shuffle(rng, n / 2);
            let x = Point::from_coords(n, chosen.iter().copied()).ok()?;
            oracle.differs_at(&x).then_some(x)
        }),
    }
}

fn run_trial(
    cfg: &ExperimentConfig,
    base: &ExperimentBase,
    corruption: &CorruptionModel,
    sorted_flips: &[Point],
    fixed_x: Option<&Point>,
    params: Option<&InfluenceCorrectorParams>,
    trial: u64,
) -> Result<(TrialRecord, bool)> {
    let seed = derive_seed(cfg.master_seed, trial);
    let mut rng = seeded_rng(seed);
    let mut oracle = NoisyOracle::new(base, corruption.clone())?;
    let mut fallback = false;
    let x = match (&cfg.x_mode, fixed_x) {
        (_, Some(x)) => x.clone(),
        (XMode::AdversarialFlipped, None) => {
            corrupted_point(&oracle, sorted_flips, &mut rng).unwrap_or_else(|| {
                fallback = true;
                Point::random(cfg.n, &mut rng)
            })
        }
        _ => Point::random(cfg.n, &mut rng),
    };
    let corrector_seed: u64 = rng.random();

    let single = |o: &mut NoisyOracle<&ExperimentBase>, s: u64| -> Result<CorrectionResult> {
        match (cfg.algo, base) {
            (Algo::Cube, _) => cube_sum_correct(o, &x, cfg.k, s),
            (Algo::Influence, _) => influence_correct(o, &x, params.expect("params"), s),
            (Algo::Symmetric, ExperimentBase::Symmetric(f)) => symmetric_correct(f.profile(), &x),
            (Algo::Symmetric, _) => unreachable!("symmetric algo always has a symmetric base"),
        }
    };
    let result = match cfg.repeat_t {
        Some(t) => majority_of(&mut oracle, t, corrector_seed, single)?,
        None => single(&mut oracle, corrector_seed)?,
    };
    debug_assert_eq!(result.queries_used, oracle.read_count());

    let truth = base.eval(&x);
    Ok((
        TrialRecord {
            trial,
            x: x.to_hex(),
            returned: result.value as u8,
            truth: truth as u8,
            success: result.value == truth,
            queries: result.queries_used,
            seed,
        },
        fallback,
    ))
}

/// Runs `cfg.trials` independent corrections, each with a fresh oracle.
pub fn run_correction_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let corruption = parse_corruption(&cfg.corruption, cfg.n)?;
    let mut base_rng = seeded_rng(derive_seed(cfg.master_seed, u64::MAX));
    let (base, redraws) = build_base(cfg, &mut base_rng)?;
    // validates the corruption against n before any trial runs
    NoisyOracle::new(&base, corruption.clone())?;

    let mut sorted_flips: Vec<Point> = match &corruption {
        CorruptionModel::ExplicitFlips(set) => set.iter().cloned().collect(),
        _ => Vec::new(),
    };
    sorted_flips.sort_by_key(|p| p.to_hex());

    let fixed_x = match &cfg.x_mode {
        XMode::FixedHex(hex) => Some(Point::from_hex(cfg.n, hex)?),
        _ => None,
    };
    let params = match cfg.algo {
        Algo::Influence => Some(InfluenceCorrectorParams::new(cfg.k)?),
        _ => None,
    };

    let results: Vec<(TrialRecord, bool)> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            run_trial(
                cfg,
                &base,
                &corruption,
                &sorted_flips,
                fixed_x.as_ref(),
                params.as_ref(),
                t,
            )
        })
        .collect::<Result<_>>()?;

    let fallbacks = results.iter().filter(|(_, f)| *f).count() as u64;
    let records: Vec<TrialRecord> = results.into_iter().map(|(r, _)| r).collect();
    let summary = summarize(cfg, &records, redraws, fallbacks);
    Ok(ExperimentOutcome {
        records,
        summary,
        base,
    })
}

fn summarize(
    cfg: &ExperimentConfig,
    records: &[TrialRecord],
    redraws: Option<u64>,
    adversarial_fallbacks: u64,
) -> Summary {
    let trials = records.len() as u64;
    let successes = records.iter().filter(|r| r.success).count() as u64;
    let total_queries: u64 = records.iter().map(|r| r.queries).sum();
    let (rate, mean_q, half) = if trials == 0 {
        (0.0, 0.0, 0.0)
    } else {
        let p = successes as f64 / trials as f64;
        (
            p,
            total_queries as f64 / trials as f64,
            1.96 * (p * (1.0 - p) / trials as f64).sqrt(),
        )
    };
    Summary {
        algo: cfg.algo.to_string(),
        k: cfg.k,
        n: cfg.n,
        corruption: cfg.corruption.clone(),
        x_mode: cfg.x_mode.to_string(),
        repeat_t: cfg.repeat_t,
        seed: cfg.master_seed,
        trials,
        successes,
        success_rate: rate,
        mean_queries: mean_q,
        ci_halfwidth: half,
        redraws,
        adversarial_fallbacks,
    }
}

#[derive(Serialize)]
struct SummaryLine<'a> {
    summary: &'a Summary,
}

/// JSON lines: one [`TrialRecord`] per line, then `{"summary": {...}}`.
pub fn render_report(records: &[TrialRecord], summary: &Summary) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    out.push_str(&serde_json::to_string(&SummaryLine { summary })?);
    out.push('\n');
    Ok(out)
}

pub fn emit_report(records: &[TrialRecord], summary: &Summary, path: &Path) -> Result<()> {
    let text = render_report(records, summary)?;
    let mut file = std::fs::File::create(path)?;
    file.write_all(text.as_bytes())?;
    Ok(())
}

/// Writes any serializable report as a single JSON line.
pub fn emit_json_line<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string(value)?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}
