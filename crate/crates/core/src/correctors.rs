//! Local correctors: recover `f(x)` from a corrupted oracle for a requested `x`.
//!
//! * [`cube_sum_correct`] works for any function of GF(2)-degree at most `k`
//!   with `2^(k+1) - 1` queries.
//! * [`influence_correct`] works for `k`-juntas whose relevant variables all have
//!   influence at least 1/50, with `2 * 3k * r + 1` queries, `r` logarithmic in `k`.
//! * [`symmetric_correct`] needs no queries at all.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_rational::Ratio;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;
use serde::Serialize;

use crate::boolfn::BooleanFunction;
use crate::error::{Error, Result};
use crate::oracle::NoisyOracle;
use crate::point::Point;
use crate::rng::{seeded_rng, SimRng};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostics {
    pub marked_parts: usize,
    pub s_size: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrectionResult {
    pub value: bool,
    pub queries_used: u64,
    pub diagnostics: Option<Diagnostics>,
}

#[derive(Serialize)]
struct CorrectionResultJson {
    value: u8,
    queries: u64,
    marked_parts: Option<usize>,
    s_size: Option<usize>,
}

impl Serialize for CorrectionResult {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        CorrectionResultJson {
            value: self.value as u8,
            queries: self.queries_used,
            marked_parts: self.diagnostics.as_ref().map(|d| d.marked_parts),
            s_size: self.diagnostics.as_ref().map(|d| d.s_size),
        }
        .serialize(serializer)
    }
}

fn check_dim<F: BooleanFunction>(o: &NoisyOracle<F>, x: &Point) -> Result<()> {
    if x.n() != o.n() {
        return Err(Error::DimensionMismatch {
            expected: o.n(),
            got: x.n(),
        });
    }
    Ok(())
}

/// Largest `k` accepted by the cube-sum corrector (2^21 - 1 queries).
pub const CUBE_MAX_K: usize = 20;

/// Subcube corrector for degree-`<= k` functions.
///
/// Draws `k + 1` uniform directions and returns the XOR of `g` over the
/// `2^(k+1) - 1` nonempty subset sums added to `x`. The full cube sum of a
/// degree-`<= k` polynomial is zero, so on a clean oracle this is exactly `f(x)`.
pub fn cube_sum_correct<F: BooleanFunction>(
    o: &mut NoisyOracle<F>,
    x: &Point,
    k: usize,
    seed: u64,
) -> Result<CorrectionResult> {
    check_dim(o, x)?;
    if k > CUBE_MAX_K {
        return Err(Error::param("k", format!("cube-sum corrector supports k <= {CUBE_MAX_K}")));
    }
    let n = x.n();
    let mut rng = seeded_rng(seed);
    let directions: Vec<Point> = (0..=k).map(|_| Point::random(n, &mut rng)).collect();

    let start = o.read_count();
    // Walk the nonempty subsets in Gray-code order, toggling one direction per step.
    let mut y = x.clone();
    let mut acc = false;
    for step in 1u64..(1u64 << (k + 1)) {
        let flip = step.trailing_zeros() as usize;
        y.xor_assign(&directions[flip]);
        acc ^= o.query(&y)?;
    }
    Ok(CorrectionResult {
        value: acc,
        queries_used: o.read_count() - start,
        diagnostics: None,
    })
}

/// Parameters of the influence corrector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InfluenceCorrectorParams {
    pub k: usize,
    /// Number of parts, `3k`.
    pub s: usize,
    /// Query pairs per part, `ceil(100 * log2 k) + 500`.
    pub r: usize,
    /// Flip probability outside the frozen set, `3/4`.
    #[serde(serialize_with = "ser_ratio")]
    pub p: Ratio<u64>,
    /// Set when built through [`InfluenceCorrectorParams::experimental`].
    pub experimental: bool,
}

fn ser_ratio<S: serde::Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

/// `ceil(100 * log2 k)`, computed exactly as the bit length of `k^100 - 1`.
pub fn ceil_100_log2(k: usize) -> usize {
    let big = BigUint::from(k).pow(100u32);
    (big - 1u32).bits() as usize
}

impl InfluenceCorrectorParams {
    pub fn new(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::param("k", "must be at least 1"));
        }
        Ok(InfluenceCorrectorParams {
            k,
            s: 3 * k,
            r: ceil_100_log2(k) + 500,
            p: Ratio::new(3, 4),
            experimental: false,
        })
    }

    /// Arbitrary parameters, flagged as experimental in every report.
    pub fn experimental(k: usize, s: usize, r: usize, p: Ratio<u64>) -> Result<Self> {
        if k == 0 || s < k || r == 0 {
            return Err(Error::param("params", "need k >= 1, s >= k, r >= 1"));
        }
        if p > Ratio::from_integer(1) {
            return Err(Error::param("p", "must lie in [0, 1]"));
        }
        Ok(InfluenceCorrectorParams {
            k,
            s,
            r,
            p,
            experimental: true,
        })
    }

    /// Queries made by one call of [`influence_correct`].
    pub fn query_cost(&self) -> u64 {
        2 * self.s as u64 * self.r as u64 + 1
    }
}

/// Outcome of the part-identification phase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionState {
    /// `assignment[c - 1]` is the part (in `0..s`) of coordinate `c`.
    pub assignment: Vec<usize>,
    /// Parts where some query pair disagreed, ascending.
    pub marked: Vec<usize>,
    /// Exactly `k` parts, ascending.
    pub chosen: Vec<usize>,
    /// Coordinates of the chosen parts, as a mask.
    pub frozen: Point,
    /// True when more than `k` parts were marked and a random subset was kept.
    pub overflowed: bool,
}

impl PartitionState {
    pub fn s_size(&self) -> usize {
        self.frozen.weight()
    }
}

/// Assigns coordinates to `s` random parts and marks the parts that show an
/// influential variable.
///
/// For each part it makes `r` pairs `(x, x')`, `x` uniform and `x'` equal to `x`
/// with the part's coordinates re-drawn, marking the part when `g` disagrees
/// on some pair. Exactly `k` parts are then chosen: all marked parts, padded
/// with random unmarked ones, or a uniform `k`-subset when more were marked.
pub fn identify_influencing_parts<F: BooleanFunction>(
    o: &mut NoisyOracle<F>,
    params: &InfluenceCorrectorParams,
    seed: u64,
) -> Result<PartitionState> {
    identify_with_rng(o, params, &mut seeded_rng(seed))
}

fn identify_with_rng<F: BooleanFunction>(
    o: &mut NoisyOracle<F>,
    params: &InfluenceCorrectorParams,
    rng: &mut SimRng,
) -> Result<PartitionState> {
    let n = o.n();
    let s = params.s;
    let assignment: Vec<usize> = (0..n).map(|_| rng.random_range(0..s)).collect();
    let mut masks = vec![Point::zeros(n); s];
    for (c, &part) in assignment.iter().enumerate() {
        masks[part].set(c + 1, true);
    }

    let mut marked = Vec::new();
    let mut x = Point::zeros(n);
    let mut fresh = Point::zeros(n);
    for (part, mask) in masks.iter().enumerate() {
        let mut hit = false;
        for _ in 0..params.r {
            x.randomize(rng);
            fresh.randomize(rng);
            // x' = x outside the part, fresh bits inside it
            fresh.copy_outside(mask, &x);
            let a = o.query(&x)?;
            let b = o.query(&fresh)?;
            hit |= a != b;
        }
        if hit {
            marked.push(part);
        }
    }

    let k = params.k;
    let overflowed = marked.len() > k;
    let mut chosen: Vec<usize> = if overflowed {
        marked.choose_multiple(rng, k).copied().collect()
    } else {
        let marked_set: BTreeSet<usize> = marked.iter().copied().collect();
        let mut unmarked: Vec<usize> = (0..s).filter(|p| !marked_set.contains(p)).collect();
        unmarked.shuffle(rng);
        marked
            .iter()
            .copied()
            .chain(unmarked.into_iter().take(k - marked.len()))
            .collect()
    };
    chosen.sort_unstable();

    let mut frozen = Point::zeros(n);
    for &p in &chosen {
        frozen.xor_assign(&masks[p]);
    }
    Ok(PartitionState {
        assignment,
        marked,
        chosen,
        frozen,
        overflowed,
    })
}

/// `y` with `y_i = x_i` on `frozen`, and elsewhere `y_i` flipped independently with
/// probability `p`.
pub fn build_masked_input(x: &Point, frozen: &Point, p: Ratio<u64>, seed: u64) -> Result<Point> {
    masked_with_rng(x, frozen, p, &mut seeded_rng(seed))
}

fn masked_with_rng<R: Rng + ?Sized>(
    x: &Point,
    frozen: &Point,
    p: Ratio<u64>,
    rng: &mut R,
) -> Result<Point> {
    if frozen.n() != x.n() {
        return Err(Error::DimensionMismatch {
            expected: x.n(),
            got: frozen.n(),
        });
    }
    if p > Ratio::from_integer(1) {
        return Err(Error::param("p", "must lie in [0, 1]"));
    }
    let (num, den) = (*p.numer(), *p.denom());
    let mut y = x.clone();
    for i in 1..=x.n() {
        if !frozen.get(i) && rng.random_range(0..den) < num {
            y.flip(i);
        }
    }
    Ok(y)
}

/// Influence-based corrector: identify the influencing parts, freeze their
/// coordinates to `x`, re-randomize the rest and return a single query of `g`.
pub fn influence_correct<F: BooleanFunction>(
    o: &mut NoisyOracle<F>,
    x: &Point,
    params: &InfluenceCorrectorParams,
    seed: u64,
) -> Result<CorrectionResult> {
    check_dim(o, x)?;
    let start = o.read_count();
    let mut rng = seeded_rng(seed);
    let state = identify_with_rng(o, params, &mut rng)?;
    let y = masked_with_rng(x, &state.frozen, params.p, &mut rng)?;
    let value = o.query(&y)?;
    Ok(CorrectionResult {
        value,
        queries_used: o.read_count() - start,
        diagnostics: Some(Diagnostics {
            marked_parts: state.marked.len(),
            s_size: state.s_size(),
        }),
    })
}

/// Zero-query corrector for symmetric functions given by their weight profile.
pub fn symmetric_correct(profile: &[bool], x: &Point) -> Result<CorrectionResult> {
    if profile.len() != x.n() + 1 {
        return Err(Error::param(
            "profile",
            format!("need n + 1 = {} entries, got {}", x.n() + 1, profile.len()),
        ));
    }
    Ok(CorrectionResult {
        value: profile[x.weight()],
        queries_used: 0,
        diagnostics: None,
    })
}

/// Majority of `t` independent runs of `correct`, each with its own seed.
/// Queries add up across runs; diagnostics are dropped.
pub fn majority_of<F, C>(
    o: &mut NoisyOracle<F>,
    t: usize,
    seed: u64,
    mut correct: C,
) -> Result<CorrectionResult>
where
    F: BooleanFunction,
    C: FnMut(&mut NoisyOracle<F>, u64) -> Result<CorrectionResult>,
{
    if t == 0 || t % 2 == 0 {
        return Err(Error::param("repeat_t", "must be a positive odd integer"));
    }
    let mut ones = 0;
    let mut queries = 0;
    for j in 0..t {
        let r = correct(o, crate::rng::derive_seed(seed, j as u64))?;
        ones += r.value as usize;
        queries += r.queries_used;
    }
    Ok(CorrectionResult {
        value: 2 * ones > t,
        queries_used: queries,
        diagnostics: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{AnfPolynomial, JuntaSpec, TruthTable};
    use crate::oracle::CorruptionModel;
    use std::collections::HashSet;

    #[test]
    fn r_formula() {
        assert_eq!(ceil_100_log2(1), 0);
        assert_eq!(ceil_100_log2(2), 100);
        assert_eq!(ceil_100_log2(8), 300);
        // 100 * log2(3) = 158.496...
        assert_eq!(ceil_100_log2(3), 159);
        // 100 * log2(10) = 332.19...
        assert_eq!(ceil_100_log2(10), 333);
        let p = InfluenceCorrectorParams::new(8).unwrap();
        assert_eq!((p.s, p.r, p.p), (24, 800, Ratio::new(3, 4)));
        assert_eq!(p.query_cost(), 6 * 8 * 800 + 1);
        assert_eq!(InfluenceCorrectorParams::new(1).unwrap().r, 500);
        assert!(InfluenceCorrectorParams::new(0).is_err());
        assert!(!p.experimental);
        assert!(InfluenceCorrectorParams::experimental(2, 6, 10, Ratio::new(1, 2))
            .unwrap()
            .experimental);
    }

    #[test]
    fn r_formula_matches_float_away_from_integers() {
        for k in 2..200usize {
            let f = 100.0 * (k as f64).log2();
            if (f - f.round()).abs() > 1e-6 {
                assert_eq!(ceil_100_log2(k), f.ceil() as usize, "k = {k}");
            }
        }
    }

    #[test]
    fn cube_sum_clean_and3() {
        let spec = JuntaSpec::new(10, TruthTable::and(3).unwrap(), vec![1, 4, 8]).unwrap();
        let mut rng = seeded_rng(1);
        for seed in 0..200 {
            let x = Point::random(10, &mut rng);
            let mut o = NoisyOracle::clean(&spec);
            let r = cube_sum_correct(&mut o, &x, 3, seed).unwrap();
            assert_eq!(r.value, spec.eval(&x));
            assert_eq!(r.queries_used, 15);
            assert_eq!(o.read_count(), 15);
        }
    }

    #[test]
    fn cube_sum_query_count_all_k() {
        let poly = AnfPolynomial::random(8, 3, &mut seeded_rng(2)).unwrap();
        for k in 0..=6 {
            let mut o = NoisyOracle::clean(&poly);
            let r = cube_sum_correct(&mut o, &Point::zeros(8), k, 5).unwrap();
            assert_eq!(r.queries_used, (1 << (k + 1)) - 1);
        }
    }

    #[test]
    fn cube_sum_under_explicit_flips() {
        // k = 2, n = 6, two flipped points: failure <= 7 * 2/64
        let mut rng = seeded_rng(3);
        let spec = JuntaSpec::random(2, 6, &mut rng).unwrap();
        let flips: HashSet<Point> = [5u64, 40].iter().map(|&v| Point::from_u64(6, v)).collect();
        let model = CorruptionModel::ExplicitFlips(flips);
        let mut failures = 0;
        for t in 0..10_000u64 {
            let x = Point::random(6, &mut rng);
            let mut o = NoisyOracle::new(&spec, model.clone()).unwrap();
            if cube_sum_correct(&mut o, &x, 2, t).unwrap().value != spec.eval(&x) {
                failures += 1;
            }
        }
        let rate = failures as f64 / 10_000.0;
        assert!(rate <= 7.0 * 2.0 / 64.0 + 0.02, "failure rate {rate}");
    }

    #[test]
    fn cube_sum_dimension_mismatch() {
        let mut o = NoisyOracle::clean(JuntaSpec::random(2, 6, &mut seeded_rng(1)).unwrap());
        assert!(cube_sum_correct(&mut o, &Point::zeros(7), 2, 0).is_err());
    }

    #[test]
    fn identify_constant_marks_nothing() {
        let zero = JuntaSpec::new(20, TruthTable::constant(1, false).unwrap(), vec![1]).unwrap();
        let params = InfluenceCorrectorParams::new(3).unwrap();
        for seed in 0..5 {
            let mut o = NoisyOracle::clean(&zero);
            let st = identify_influencing_parts(&mut o, &params, seed).unwrap();
            assert!(st.marked.is_empty());
            assert_eq!(st.chosen.len(), 3);
            assert!(st.chosen.iter().all(|&p| p < 9));
            assert_eq!(o.read_count(), 2 * 9 * params.r as u64);
            // frozen set is exactly the chosen parts' coordinates
            for c in 1..=20 {
                assert_eq!(st.frozen.get(c), st.chosen.contains(&st.assignment[c - 1]));
            }
        }
    }

    #[test]
    fn identify_parity_finds_all_relevant_parts() {
        let spec = JuntaSpec::new(48, TruthTable::parity(8).unwrap(), (1..=8).map(|i| 6 * i).collect())
            .unwrap();
        let params = InfluenceCorrectorParams::new(8).unwrap();
        for seed in 0..100 {
            let mut o = NoisyOracle::clean(&spec);
            let st = identify_influencing_parts(&mut o, &params, seed).unwrap();
            let relevant: BTreeSet<usize> =
                spec.embedding().iter().map(|&c| st.assignment[c - 1]).collect();
            let marked: BTreeSet<usize> = st.marked.iter().copied().collect();
            assert_eq!(marked, relevant, "seed {seed}");
            assert!(relevant.iter().all(|p| st.chosen.contains(p)));
        }
    }

    #[test]
    fn identify_and2_marks_both_parts() {
        // AND_2 at n = 12: per-pair disagreement is 1/4 or more, so both relevant
        // parts are marked unless 500 pairs all agree.
        let spec = JuntaSpec::new(12, TruthTable::and(2).unwrap(), vec![3, 10]).unwrap();
        let params = InfluenceCorrectorParams::new(2).unwrap();
        let mut runs = 0;
        let mut both = 0;
        let mut seed = 0u64;
        while runs < 10_000 {
            seed += 1;
            let mut o = NoisyOracle::clean(&spec);
            let st = identify_influencing_parts(&mut o, &params, seed).unwrap();
            let (a, b) = (st.assignment[2], st.assignment[9]);
            if a == b {
                continue;
            }
            runs += 1;
            if st.marked.contains(&a) && st.marked.contains(&b) {
                both += 1;
            }
        }
        assert!(both as f64 / runs as f64 >= 0.999, "{both}/{runs}");
    }

    #[test]
    fn masked_input_edge_cases() {
        let mut rng = seeded_rng(4);
        let x = Point::random(20, &mut rng);
        assert_eq!(
            build_masked_input(&x, &Point::ones(20), Ratio::new(3, 4), 1).unwrap(),
            x
        );
        assert_eq!(
            build_masked_input(&x, &Point::zeros(20), Ratio::from_integer(1), 1).unwrap(),
            x.complement()
        );
        assert_eq!(
            build_masked_input(&x, &Point::zeros(20), Ratio::from_integer(0), 1).unwrap(),
            x
        );
        assert!(build_masked_input(&x, &Point::zeros(19), Ratio::new(1, 2), 1).is_err());
    }

    #[test]
    fn masked_input_flip_frequency() {
        let x = Point::zeros(20);
        let free = Point::zeros(20);
        let mut counts = [0u32; 20];
        for seed in 0..100_000u64 {
            let y = build_masked_input(&x, &free, Ratio::new(3, 4), seed).unwrap();
            for c in y.ones_iter() {
                counts[c - 1] += 1;
            }
        }
        for (i, &c) in counts.iter().enumerate() {
            let f = c as f64 / 1e5;
            assert!((f - 0.75).abs() <= 0.01, "coord {}: {f}", i + 1);
        }
    }

    #[test]
    fn influence_correct_parity4_clean() {
        let spec = JuntaSpec::new(24, TruthTable::parity(4).unwrap(), vec![2, 9, 15, 22]).unwrap();
        let params = InfluenceCorrectorParams::new(4).unwrap();
        let x = Point::from_coords(24, [2, 3, 15]).unwrap();
        let truth = spec.eval(&x);
        let mut ok = 0;
        for seed in 0..2000u64 {
            let mut o = NoisyOracle::clean(&spec);
            let r = influence_correct(&mut o, &x, &params, seed).unwrap();
            assert_eq!(r.queries_used, params.query_cost());
            ok += (r.value == truth) as u32;
        }
        assert!(ok as f64 / 2000.0 >= 0.98, "{ok}");
    }

    #[test]
    fn influence_correct_constant_zero() {
        let zero = JuntaSpec::new(30, TruthTable::constant(1, false).unwrap(), vec![7]).unwrap();
        let params = InfluenceCorrectorParams::new(1).unwrap();
        let x = Point::ones(30);
        for seed in 0..50 {
            let mut o = NoisyOracle::clean(&zero);
            let r = influence_correct(&mut o, &x, &params, seed).unwrap();
            assert!(!r.value);
            assert_eq!(r.diagnostics.as_ref().unwrap().marked_parts, 0);
        }
    }

    #[test]
    fn symmetric_examples() {
        let maj5 = [false, false, false, true, true, true];
        let x = Point::from_coords(5, [1, 2, 3]).unwrap();
        let r = symmetric_correct(&maj5, &x).unwrap();
        assert!(r.value);
        assert_eq!(r.queries_used, 0);

        let parity: Vec<bool> = (0..=6).map(|w| w % 2 == 1).collect();
        let x = Point::from_coords(6, [1, 2, 5, 6]).unwrap();
        assert!(!symmetric_correct(&parity, &x).unwrap().value);

        let one = vec![true; 9];
        assert!(symmetric_correct(&one, &Point::random(8, &mut seeded_rng(1))).unwrap().value);
        assert!(symmetric_correct(&one, &Point::zeros(7)).is_err());
    }

    #[test]
    fn result_json() {
        let r = CorrectionResult {
            value: true,
            queries_used: 15,
            diagnostics: None,
        };
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"value":1,"queries":15,"marked_parts":null,"s_size":null}"#
        );
        let r = CorrectionResult {
            value: false,
            queries_used: 3,
            diagnostics: Some(Diagnostics {
                marked_parts: 2,
                s_size: 9,
            }),
        };
        assert_eq!(
            serde_json::to_string(&r).unwrap(),
            r#"{"value":0,"queries":3,"marked_parts":2,"s_size":9}"#
        );
    }

    #[test]
    fn majority_wrapper() {
        let spec = JuntaSpec::random(3, 12, &mut seeded_rng(9)).unwrap();
        let x = Point::zeros(12);
        let mut o = NoisyOracle::clean(&spec);
        let r = majority_of(&mut o, 5, 1, |o, s| cube_sum_correct(o, &x, 3, s)).unwrap();
        assert_eq!(r.value, spec.eval(&x));
        assert_eq!(r.queries_used, 75);
        assert!(majority_of(&mut o, 4, 1, |o, s| cube_sum_correct(o, &x, 3, s)).is_err());
    }

    /// Constant-zero base that remembers the last point it was asked about.
    struct LastQuery {
        n: usize,
        last: std::cell::RefCell<Point>,
    }

    impl BooleanFunction for LastQuery {
        fn n(&self) -> usize {
            self.n
        }

        fn eval(&self, x: &Point) -> bool {
            self.last.borrow_mut().clone_from(x);
            false
        }
    }

    #[test]
    fn final_query_is_uniform_per_coordinate() {
        // clean constant base: nothing is marked, the chosen part is random
        let n = 60;
        let runs = 100_000u64;
        let params = InfluenceCorrectorParams::new(1).unwrap();
        let base = LastQuery {
            n,
            last: std::cell::RefCell::new(Point::zeros(n)),
        };
        let mut o = NoisyOracle::clean(&base);
        let x = Point::zeros(n);
        let mut ones = vec![0u64; n];
        for seed in 0..runs {
            let r = influence_correct(&mut o, &x, &params, seed).unwrap();
            assert_eq!(r.diagnostics.unwrap().marked_parts, 0);
            for c in base.last.borrow().ones_iter() {
                ones[c - 1] += 1;
            }
        }
        for (c, &count) in ones.iter().enumerate() {
            let freq = count as f64 / runs as f64;
            assert!((freq - 0.5).abs() <= 0.01, "coordinate {}: {freq}", c + 1);
        }
    }
}
