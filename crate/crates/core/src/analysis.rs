//! Variable influence, exact and sampled, and random-junta statistics.

use num_rational::Ratio;
use serde::ser::{Serialize, SerializeStruct, Serializer};

use crate::boolfn::{BooleanFunction, JuntaSpec, TruthTable, LOW_MASKS};
use crate::error::{Error, Result};
use crate::point::Point;
use crate::rng::seeded_rng;

pub type Influence = Ratio<u64>;

/// Minimum influence every relevant variable must reach for the influence corrector.
pub fn influence_threshold() -> Influence {
    Ratio::new(1, 50)
}

/// `Pr_x[f(x) != f(x + e_i)]` over the `2^k` assignments, exactly. `i` is 1-based.
pub fn influence_exact(tt: &TruthTable, i: usize) -> Result<Influence> {
    let k = tt.k();
    if i == 0 || i > k {
        return Err(Error::param("i", format!("variable {i} outside 1..={k}")));
    }
    let v = i - 1;
    let words = tt.words();
    let pairs: u64 = if v < 6 {
        let shift = 1u32 << v;
        words
            .iter()
            .map(|&w| ((w ^ (w >> shift)) & LOW_MASKS[v]).count_ones() as u64)
            .sum()
    } else {
        let stride = 1usize << (v - 6);
        words
            .chunks_exact(2 * stride)
            .map(|block| {
                let (lo, hi) = block.split_at(stride);
                lo.iter()
                    .zip(hi)
                    .map(|(a, b)| (a ^ b).count_ones() as u64)
                    .sum::<u64>()
            })
            .sum()
    };
    Ok(Ratio::new(2 * pairs, 1u64 << k))
}

/// Monte Carlo estimate of the influence of coordinate `i` (1-based) on `f`.
pub fn influence_estimate<F: BooleanFunction + ?Sized>(
    f: &F,
    i: usize,
    trials: u64,
    seed: u64,
) -> Result<f64> {
    let n = f.n();
    if i == 0 || i > n {
        return Err(Error::param("i", format!("coordinate {i} outside 1..={n}")));
    }
    if trials == 0 {
        return Err(Error::param("trials", "must be at least 1"));
    }
    let mut rng = seeded_rng(seed);
    let mut x = Point::zeros(n);
    let mut hits = 0u64;
    for _ in 0..trials {
        x.randomize(&mut rng);
        let a = f.eval(&x);
        x.flip(i);
        if a != f.eval(&x) {
            hits += 1;
        }
    }
    Ok(hits as f64 / trials as f64)
}

/// Uniform core over all `2^(2^k)` tables with a uniform injective embedding.
pub fn sample_random_junta(k: usize, n: usize, seed: u64) -> Result<JuntaSpec> {
    JuntaSpec::random(k, n, &mut seeded_rng(seed))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InfluenceReport {
    pub k: usize,
    pub per_variable: Vec<Influence>,
    pub min_influence: Influence,
    pub passes_threshold: bool,
}

fn ratio_string(r: &Influence) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

impl Serialize for InfluenceReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("InfluenceReport", 4)?;
        st.serialize_field("k", &self.k)?;
        let infl: Vec<String> = self.per_variable.iter().map(ratio_string).collect();
        st.serialize_field("influences", &infl)?;
        st.serialize_field("min", &ratio_string(&self.min_influence))?;
        st.serialize_field("passes", &self.passes_threshold)?;
        st.end()
    }
}

pub fn min_influence_report(tt: &TruthTable) -> InfluenceReport {
    let per_variable: Vec<Influence> = (1..=tt.k())
        .map(|i| influence_exact(tt, i).expect("index in range"))
        .collect();
    let min_influence = per_variable.iter().min().copied().unwrap_or_default();
    InfluenceReport {
        k: tt.k(),
        passes_threshold: min_influence >= influence_threshold(),
        per_variable,
        min_influence,
    }
}

/// Exact check without building the full report.
pub fn all_influences_at_least_threshold(tt: &TruthTable) -> bool {
    let t = influence_threshold();
    (1..=tt.k()).all(|i| influence_exact(tt, i).expect("index in range") >= t)
}

/// Fraction of `samples` uniform random cores on `k` variables having some
/// variable of influence below 1/50.
pub fn fraction_low_influence(k: usize, samples: u64, seed: u64) -> Result<f64> {
    if k == 0 || k > 16 {
        return Err(Error::param("k", format!("need 1 <= k <= 16, got {k}")));
    }
    if samples == 0 {
        return Err(Error::param("samples", "must be at least 1"));
    }
    let mut rng = seeded_rng(seed);
    let mut low = 0u64;
    for _ in 0..samples {
        let core = TruthTable::random(k, &mut rng)?;
        if !all_influences_at_least_threshold(&core) {
            low += 1;
        }
    }
    Ok(low as f64 / samples as f64)
}
