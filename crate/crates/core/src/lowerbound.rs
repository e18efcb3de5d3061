//! Hard instances for local correction of the AND junta, and the balanced-layer
//! ambiguity of `Maj_{n-1}`.
//!
//! A [`HardInstance`] hides an AND of `k` variables inside one half of `[n]` and
//! forces the value to 0 wherever either half has weight above `floor(0.3 n)`.
//! The target point `x* = 0^{n/2} 1^{n/2}` lies in the forced region, so its
//! true value (0 for `D0`, 1 for `D1`) must be inferred from rare 1-answers.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_rational::{BigRational, Ratio};
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::boolfn::{BooleanFunction, JuntaSpec, TruthTable};
use crate::correctors::{cube_sum_correct, CUBE_MAX_K};
use crate::error::{Error, Result};
use crate::exact::{binomial, ratio};
use crate::oracle::{CorruptionModel, NoisyOracle};
use crate::point::Point;
use crate::rng::{derive_seed, seeded_rng};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Label {
    D0,
    D1,
}

impl Label {
    pub fn bit(self) -> bool {
        self == Label::D1
    }
}

/// `floor(0.3 n)`.
pub fn default_threshold(n: usize) -> usize {
    3 * n / 10
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HardInstance {
    n: usize,
    k: usize,
    relevant: Vec<usize>,
    relevant_mask: Point,
    label: Label,
    threshold: usize,
}

fn check_shape(n: usize, k: usize) -> Result<()> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::param("n", format!("must be even and positive, got {n}")));
    }
    if k == 0 || k > n / 2 {
        return Err(Error::param("k", format!("need 1 <= k <= n/2 = {}, got {k}", n / 2)));
    }
    Ok(())
}

/// Uniform `k`-subset of the half designated by `label`.
pub fn sample_hard_instance(n: usize, k: usize, label: Label, seed: u64) -> Result<HardInstance> {
    check_shape(n, k)?;
    let mut rng = seeded_rng(seed);
    Ok(sample_with_rng(n, k, label, &mut rng))
}

fn sample_with_rng<R: Rng + ?Sized>(n: usize, k: usize, label: Label, rng: &mut R) -> HardInstance {
    let h = n / 2;
    let offset = match label {
        Label::D0 => 0,
        Label::D1 => h,
    };
    let mut half: Vec<usize> = (1..=h).map(|c| c + offset).collect();
    let (chosen, _) = half.partial_shuffle(rng, k);
    let mut relevant = chosen.to_vec();
    relevant.sort_unstable();
    let relevant_mask = Point::from_coords(n, relevant.iter().copied()).expect("coords in range");
    HardInstance {
        n,
        k,
        relevant,
        relevant_mask,
        label,
        threshold: default_threshold(n),
    }
}

impl HardInstance {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn relevant(&self) -> &[usize] {
        &self.relevant
    }

    pub fn label(&self) -> Label {
        self.label
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }

    /// `0^{n/2} 1^{n/2}`.
    pub fn x_star(&self) -> Point {
        x_star(self.n)
    }

    /// The uncorrupted AND of the relevant coordinates.
    pub fn f_sigma(&self, y: &Point) -> bool {
        y.and(&self.relevant_mask) == self.relevant_mask
    }

    fn inside_box(&self, y: &Point) -> bool {
        let (a, b) = y.half_weights();
        a <= self.threshold && b <= self.threshold
    }

    /// Closed-form `g(y)`: 1 iff both halves have weight at most the threshold
    /// and every relevant coordinate of `y` is 1.
    pub fn eval_hard_g(&self, y: &Point) -> Result<bool> {
        if y.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: y.n(),
            });
        }
        Ok(self.eval(y))
    }

    /// The same AND as an explicit junta (needs `k <= 24`).
    pub fn and_junta(&self) -> Result<JuntaSpec> {
        JuntaSpec::new(self.n, TruthTable::and(self.k)?, self.relevant.clone())
    }
}

impl BooleanFunction for HardInstance {
    fn n(&self) -> usize {
        self.n
    }

    fn eval(&self, y: &Point) -> bool {
        self.inside_box(y) && self.f_sigma(y)
    }
}

pub fn x_star(n: usize) -> Point {
    Point::from_coords(n, n / 2 + 1..=n).expect("coords in range")
}

/// `C(m, k) / C(n/2, k)`: the chance over the hidden subset that a query with
/// weight `m` in the relevant half covers all `k` relevant coordinates.
pub fn single_query_one_prob(n: usize, k: usize, m: usize) -> Result<BigRational> {
    if n % 2 != 0 {
        return Err(Error::param("n", "must be even"));
    }
    if m > n / 2 {
        return Err(Error::param("m", format!("must be at most n/2 = {}", n / 2)));
    }
    if k > n / 2 {
        return Err(Error::param("k", "must be at most n/2"));
    }
    if m < k {
        return Ok(BigRational::zero());
    }
    Ok(ratio(
        binomial(m as u64, k as u64),
        binomial((n / 2) as u64, k as u64),
    ))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Strategy {
    /// `q` independent uniform points.
    UniformRandom,
    /// A list of `q` points fixed before any instance is drawn, each with exactly
    /// `threshold` ones in every half (the heaviest points inside the box).
    FixedPointList,
    /// The cube-sum corrector of degree `k` run at `x*`.
    CubeSumAtXStar,
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::UniformRandom => "uniform-random-queries",
            Strategy::FixedPointList => "fixed-point-list",
            Strategy::CubeSumAtXStar => "cube-sum-at-x_star",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform-random-queries" | "uniform" => Ok(Strategy::UniformRandom),
            "fixed-point-list" | "fixed" => Ok(Strategy::FixedPointList),
            "cube-sum-at-x_star" | "cube-sum" | "cube" => Ok(Strategy::CubeSumAtXStar),
            other => Err(Error::UnknownStrategy(other.to_string())),
        }
    }
}

fn ser_display<T: fmt::Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DistinguisherReport {
    #[serde(serialize_with = "ser_display")]
    pub strategy: Strategy,
    pub n: usize,
    pub k: usize,
    pub q: u64,
    pub trials: u64,
    pub advantage: f64,
    pub one_hit_rate: f64,
    pub seed: u64,
}

struct TrialOutcome {
    correct: bool,
    hit_one: bool,
}

fn weighted_half_point<R: Rng + ?Sized>(n: usize, weight: usize, rng: &mut R) -> Point {
    let h = n / 2;
    let mut p = Point::zeros(n);
    for offset in [0, h] {
        let mut half: Vec<usize> = (1..=h).map(|c| c + offset).collect();
        let (chosen, _) = half.partial_shuffle(rng, weight.min(h));
        for &c in chosen.iter() {
            p.set(c, true);
        }
    }
    p
}

/// Guess from a list of answered queries: `D1` iff some 1-answer could have come
/// from a `D1` instance (its second half holds at least `k` ones).
fn guess_from_hits(hits: &[Point], n: usize, k: usize) -> Label {
    let consistent_d1 = hits.iter().any(|y| y.weight_between(n / 2 + 1, n) >= k);
    if consistent_d1 {
        Label::D1
    } else {
        Label::D0
    }
}

/// Draws a uniform label and instance per trial, lets the strategy spend at
/// most `q` queries, and measures how often it names the label.
pub fn run_distinguisher(
    strategy: &Strategy,
    q: u64,
    n: usize,
    k: usize,
    trials: u64,
    seed: u64,
) -> Result<DistinguisherReport> {
    check_shape(n, k)?;
    if trials == 0 {
        return Err(Error::param("trials", "must be at least 1"));
    }
    let fixed_list: Vec<Point> = if *strategy == Strategy::FixedPointList {
        let mut rng = seeded_rng(derive_seed(seed, u64::MAX));
        let w = default_threshold(n).min(n / 2);
        (0..q).map(|_| weighted_half_point(n, w, &mut rng)).collect()
    } else {
        Vec::new()
    };
    let cube_cost = if k <= CUBE_MAX_K { (1u64 << (k + 1)) - 1 } else { u64::MAX };

    let outcomes: Vec<TrialOutcome> = (0..trials)
        .into_par_iter()
        .map(|t| -> Result<TrialOutcome> {
            let mut rng = seeded_rng(derive_seed(seed, t));
            let label = if rng.random::<bool>() { Label::D1 } else { Label::D0 };
            let inst = sample_with_rng(n, k, label, &mut rng);
            let mut oracle = NoisyOracle::new(&inst, CorruptionModel::None)?;
            let (guess, hit_one) = match strategy {
                Strategy::UniformRandom | Strategy::FixedPointList => {
                    let mut hits = Vec::new();
                    let mut y = Point::zeros(n);
                    for j in 0..q as usize {
                        let point = if *strategy == Strategy::UniformRandom {
                            y.randomize(&mut rng);
                            &y
                        } else {
                            &fixed_list[j]
                        };
                        if oracle.query(point)? {
                            hits.push(point.clone());
                        }
                    }
                    (guess_from_hits(&hits, n, k), !hits.is_empty())
                }
                Strategy::CubeSumAtXStar => {
                    if q >= cube_cost {
                        let r = cube_sum_correct(&mut oracle, &inst.x_star(), k, rng.random())?;
                        (if r.value { Label::D1 } else { Label::D0 }, false)
                    } else {
                        (Label::D0, false)
                    }
                }
            };
            debug_assert!(oracle.read_count() <= q);
            let hit_one = hit_one || oracle.read_ones() > 0;
            Ok(TrialOutcome {
                correct: guess == label,
                hit_one,
            })
        })
        .collect::<Result<_>>()?;

    let correct = outcomes.iter().filter(|o| o.correct).count() as f64;
    let hits = outcomes.iter().filter(|o| o.hit_one).count() as f64;
    Ok(DistinguisherReport {
        strategy: strategy.clone(),
        n,
        k,
        q,
        trials,
        advantage: (correct / trials as f64 - 0.5).abs(),
        one_hit_rate: hits / trials as f64,
        seed,
    })
}

/// `Maj` over all coordinates except `skip` (1-based), on an even `n`: there are
/// `n - 1` voters, so no ties.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MajExcept {
    pub n: usize,
    pub skip: usize,
}

impl BooleanFunction for MajExcept {
    fn n(&self) -> usize {
        self.n
    }

    fn eval(&self, x: &Point) -> bool {
        let w = x.weight() - x.get(self.skip) as usize;
        2 * w > self.n - 1
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AmbiguityReport {
    pub n: usize,
    pub pairs_checked: usize,
    /// Every disagreement of every pair `f_j, f_j'` has weight `n/2`.
    pub disagreements_on_layer_only: bool,
    /// For every pair the disagreement set is exactly the layer points with `x_j != x_j'`.
    pub disagreement_sets_exact: bool,
    /// All `n` layer-zeroed functions coincide.
    pub truncated_identical: bool,
    pub layer_count: u64,
    pub total_points: u64,
    #[serde(serialize_with = "ser_display")]
    pub layer_fraction: Ratio<u64>,
}

/// Exhaustive check that the `n` isomorphisms of `Maj_{n-1}` differ only on the
/// balanced layer, and become one function once that layer is set to 0.
pub fn maj_ambiguity_check(n: usize) -> Result<AmbiguityReport> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::param("n", "must be even and positive"));
    }
    if n > 16 {
        return Err(Error::param("n", "exhaustive check supports n <= 16"));
    }
    let total = 1u64 << n;
    let points: Vec<Point> = (0..total).map(|v| Point::from_u64(n, v)).collect();
    let tables: Vec<Vec<bool>> = (1..=n)
        .map(|j| {
            let f = MajExcept { n, skip: j };
            points.iter().map(|p| f.eval(p)).collect()
        })
        .collect();
    let on_layer: Vec<bool> = points.iter().map(|p| 2 * p.weight() == n).collect();

    let mut pairs = 0;
    let mut layer_only = true;
    let mut exact = true;
    for a in 0..n {
        for b in a + 1..n {
            pairs += 1;
            for (idx, p) in points.iter().enumerate() {
                let differ = tables[a][idx] != tables[b][idx];
                if differ && !on_layer[idx] {
                    layer_only = false;
                }
                let predicted = on_layer[idx] && p.get(a + 1) != p.get(b + 1);
                if differ != predicted {
                    exact = false;
                }
            }
        }
    }

    let truncated: Vec<Vec<bool>> = (1..=n)
        .map(|j| {
            let o = NoisyOracle::new(MajExcept { n, skip: j }, CorruptionModel::BalancedLayerZero)
                .expect("even n");
            points.iter().map(|p| o.peek(p)).collect()
        })
        .collect();
    let truncated_identical = truncated.windows(2).all(|w| w[0] == w[1]);

    let layer_count = on_layer.iter().filter(|&&b| b).count() as u64;
    debug_assert_eq!(BigUint::from(layer_count), binomial(n as u64, n as u64 / 2));
    Ok(AmbiguityReport {
        n,
        pairs_checked: pairs,
        disagreements_on_layer_only: layer_only,
        disagreement_sets_exact: exact,
        truncated_identical,
        layer_count,
        total_points: total,
        layer_fraction: Ratio::new(layer_count, total),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    #[test]
    fn instances_sit_in_the_right_half() {
        for seed in 0..200 {
            let d0 = sample_hard_instance(10, 2, Label::D0, seed).unwrap();
            assert!(d0.relevant().iter().all(|&c| (1..=5).contains(&c)));
            let d1 = sample_hard_instance(10, 2, Label::D1, seed).unwrap();
            assert!(d1.relevant().iter().all(|&c| (6..=10).contains(&c)));
            assert_eq!(d0.relevant().len(), 2);
        }
        assert!(sample_hard_instance(11, 2, Label::D0, 0).is_err());
        assert!(sample_hard_instance(10, 6, Label::D0, 0).is_err());
        assert_eq!(
            sample_hard_instance(40, 5, Label::D1, 3).unwrap(),
            sample_hard_instance(40, 5, Label::D1, 3).unwrap()
        );
    }

    #[test]
    fn relevant_marginal() {
        let hits = (0..10_000)
            .filter(|&s| {
                sample_hard_instance(10, 2, Label::D0, s)
                    .unwrap()
                    .relevant()
                    .contains(&1)
            })
            .count();
        let f = hits as f64 / 10_000.0;
        assert!((f - 0.4).abs() <= 0.02, "{f}");
    }

    #[test]
    fn label_consistency_at_x_star() {
        for seed in 0..1000 {
            for label in [Label::D0, Label::D1] {
                let inst = sample_hard_instance(20, 4, label, seed).unwrap();
                let junta = inst.and_junta().unwrap();
                assert_eq!(junta.eval(&inst.x_star()), label.bit());
                assert_eq!(inst.f_sigma(&inst.x_star()), label.bit());
            }
        }
    }

    #[test]
    fn eval_examples() {
        let mut inst = sample_hard_instance(10, 2, Label::D1, 0).unwrap();
        inst.relevant = vec![6, 7];
        inst.relevant_mask = Point::from_coords(10, [6, 7]).unwrap();
        assert_eq!(inst.threshold(), 3);
        assert!(inst.eval_hard_g(&Point::from_coords(10, [6, 7]).unwrap()).unwrap());
        let heavy = Point::from_coords(10, [1, 2, 3, 4, 6, 7]).unwrap();
        assert!(!inst.eval_hard_g(&heavy).unwrap());
        assert!(inst.f_sigma(&inst.x_star()));
        assert!(!inst.eval_hard_g(&inst.x_star()).unwrap());
        assert!(inst.eval_hard_g(&Point::zeros(12)).is_err());
    }

    #[test]
    fn closed_form_matches_truncated_junta_oracle() {
        for seed in 0..20 {
            let label = if seed % 2 == 0 { Label::D0 } else { Label::D1 };
            let inst = sample_hard_instance(12, 2, label, seed).unwrap();
            let o = NoisyOracle::new(
                inst.and_junta().unwrap(),
                CorruptionModel::WeightTruncation {
                    threshold: inst.threshold(),
                },
            )
            .unwrap();
            for v in 0..1u64 << 12 {
                let y = Point::from_u64(12, v);
                assert_eq!(inst.eval(&y), o.peek(&y));
            }
        }
    }

    #[test]
    fn never_one_outside_box() {
        let inst = sample_hard_instance(400, 20, Label::D0, 5).unwrap();
        let mut rng = seeded_rng(6);
        let mut y = Point::zeros(400);
        for i in 0..1_000_000u64 {
            // bias weights so both sides of the threshold get covered
            y.randomize(&mut rng);
            if i % 2 == 0 {
                // OR with a second uniform point: half weights near 150
                let r = Point::random(400, &mut rng);
                y = y.xor(&r).xor(&y.and(&r));
            }
            if inst.eval(&y) {
                let (a, b) = y.half_weights();
                assert!(a <= 120 && b <= 120);
            }
        }
    }

    #[test]
    fn single_query_values() {
        assert_eq!(single_query_one_prob(20, 3, 2).unwrap(), BigRational::zero());
        assert_eq!(
            single_query_one_prob(20, 3, 6).unwrap(),
            ratio(1u32.into(), 6u32.into())
        );
        assert!(single_query_one_prob(21, 3, 6).is_err());
        assert!(single_query_one_prob(20, 3, 11).is_err());
    }

    #[test]
    fn single_query_monotone_and_one_at_full_half() {
        for k in [1usize, 3, 7, 25] {
            let n = 60;
            let mut prev = BigRational::zero();
            for m in 0..=n / 2 {
                let p = single_query_one_prob(n, k, m).unwrap();
                assert!(p >= prev);
                prev = p;
            }
            assert_eq!(prev, BigRational::from_integer(1.into()));
        }
    }

    #[test]
    fn strategy_names() {
        assert_eq!("uniform".parse::<Strategy>().unwrap(), Strategy::UniformRandom);
        assert_eq!(
            "cube-sum-at-x_star".parse::<Strategy>().unwrap(),
            Strategy::CubeSumAtXStar
        );
        assert!(matches!(
            "adaptive".parse::<Strategy>(),
            Err(Error::UnknownStrategy(_))
        ));
    }

    #[test]
    fn zero_queries_carry_no_information() {
        let trials = 4000;
        let r = run_distinguisher(&Strategy::UniformRandom, 0, 40, 4, trials, 1).unwrap();
        assert_eq!(r.one_hit_rate, 0.0);
        assert!(r.advantage <= 3.0 * (1.0 / (4.0 * trials as f64)).sqrt());
    }

    #[test]
    fn cube_sum_distinguishes_small() {
        // at n = 1000 uniform queries stay inside the weight box (250 vs 300, ~4.5 sd)
        let r = run_distinguisher(&Strategy::CubeSumAtXStar, 31, 1000, 4, 500, 2).unwrap();
        assert!(r.advantage >= 0.45, "{r:?}");
        let starved = run_distinguisher(&Strategy::CubeSumAtXStar, 30, 1000, 4, 500, 2).unwrap();
        assert!(starved.advantage <= 0.1, "{starved:?}");
    }

    #[test]
    fn fixed_list_runs_and_is_deterministic() {
        let a = run_distinguisher(&Strategy::FixedPointList, 200, 100, 10, 300, 9).unwrap();
        let b = run_distinguisher(&Strategy::FixedPointList, 200, 100, 10, 300, 9).unwrap();
        assert_eq!(a, b);
        // every listed point has weight 30 in the relevant half
        let p = single_query_one_prob(100, 10, 30).unwrap().to_f64().unwrap();
        let union = 200.0 * p;
        assert!(a.one_hit_rate <= union + 0.05, "{} vs {union}", a.one_hit_rate);
        assert!(a.one_hit_rate > 0.0);
    }

    #[test]
    fn report_json_fields() {
        let r = run_distinguisher(&Strategy::UniformRandom, 5, 20, 2, 10, 3).unwrap();
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(|s| s.as_str()).collect();
        assert_eq!(
            keys,
            ["advantage", "k", "n", "one_hit_rate", "q", "seed", "strategy", "trials"]
        );
        assert_eq!(v["strategy"], "uniform-random-queries");
    }

    #[test]
    fn maj_n8() {
        let r = maj_ambiguity_check(8).unwrap();
        assert_eq!(r.pairs_checked, 28);
        assert!(r.disagreements_on_layer_only);
        assert!(r.disagreement_sets_exact);
        assert!(r.truncated_identical);
        assert_eq!((r.layer_count, r.total_points), (70, 256));
        assert_eq!(r.layer_fraction, Ratio::new(70, 256));
        assert!(maj_ambiguity_check(7).is_err());
        assert!(maj_ambiguity_check(18).is_err());
    }

    #[test]
    fn maj_small_sizes() {
        for n in [2, 4, 6, 10] {
            let r = maj_ambiguity_check(n).unwrap();
            assert!(r.disagreements_on_layer_only && r.disagreement_sets_exact);
            assert!(r.truncated_identical);
        }
    }
}
