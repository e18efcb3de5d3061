//! Corruption models and the query-counting oracle that correctors read from.
//!
//! A [`NoisyOracle`] wraps a base function `f` and a [`CorruptionModel`] into a
//! fixed function `g`. Correctors only ever see `g` through [`NoisyOracle::query`],
//! which counts every call.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use num_bigint::BigUint;
use num_rational::{BigRational, Ratio};
use num_traits::Zero;

use crate::boolfn::BooleanFunction;
use crate::error::{Error, Result};
use crate::exact::{binomial, pow2, ratio};
use crate::point::Point;
use crate::rng::mix64;

/// Largest `n` for which disagreement is computed by scanning all of Z_2^n.
pub const EXHAUSTIVE_MAX_N: usize = 20;

#[derive(Clone, PartialEq, Eq)]
pub enum CorruptionModel {
    None,
    /// `g` differs from `f` exactly on these points.
    ExplicitFlips(HashSet<Point>),
    /// Each point flipped independently with probability `eps`, decided by a keyed
    /// hash of `(seed, point)` so that `g` is a fixed function.
    IidFlips { eps: Ratio<u64>, seed: u64 },
    /// `g(y) = 0` whenever either half of `y` has weight above `threshold`.
    WeightTruncation { threshold: usize },
    /// `g(y) = 0` on the layer of weight exactly `n / 2`.
    BalancedLayerZero,
}

impl fmt::Debug for CorruptionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorruptionModel::None => write!(f, "none"),
            CorruptionModel::ExplicitFlips(set) => write!(f, "flips({} points)", set.len()),
            CorruptionModel::IidFlips { eps, seed } => write!(f, "iid({eps}, seed {seed})"),
            CorruptionModel::WeightTruncation { threshold } => write!(f, "trunc({threshold})"),
            CorruptionModel::BalancedLayerZero => write!(f, "layer"),
        }
    }
}

/// Parses a probability written as `a/b`, a decimal, or `2^-e`.
pub fn parse_probability(text: &str) -> Result<Ratio<u64>> {
    let text = text.trim();
    let bad = || Error::Parse(format!("cannot parse probability `{text}`"));
    let r = if let Some(e) = text.strip_prefix("2^-") {
        let e: u32 = e.parse().map_err(|_| bad())?;
        if e > 63 {
            return Err(bad());
        }
        Ratio::new(1, 1u64 << e)
    } else if let Some((a, b)) = text.split_once('/') {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if b == 0 {
            return Err(bad());
        }
        Ratio::new(a, b)
    } else {
        let (int, frac) = text.split_once('.').unwrap_or((text, ""));
        if frac.len() > 18 || (int.is_empty() && frac.is_empty()) {
            return Err(bad());
        }
        let int: u64 = if int.is_empty() { 0 } else { int.parse().map_err(|_| bad())? };
        let frac_val: u64 = if frac.is_empty() { 0 } else { frac.parse().map_err(|_| bad())? };
        let den = 10u64.pow(frac.len() as u32);
        let num = int
            .checked_mul(den)
            .and_then(|v| v.checked_add(frac_val))
            .ok_or_else(bad)?;
        Ratio::new(num, den)
    };
    Ok(r)
}

/// Reads an explicit-flip file: one hex point per line, blank lines ignored.
pub fn read_flip_file(path: impl AsRef<Path>, n: usize) -> Result<HashSet<Point>> {
    let text = std::fs::read_to_string(path)?;
    parse_flip_points(&text, n)
}

pub fn parse_flip_points(text: &str, n: usize) -> Result<HashSet<Point>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(|l| Point::from_hex(n, l))
        .collect()
}

pub fn write_flip_file(path: impl AsRef<Path>, points: &[Point]) -> Result<()> {
    let mut out = String::new();
    for p in points {
        out.push_str(&p.to_hex());
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

impl CorruptionModel {
    /// Parses `none`, `flips:<file>`, `iid:<eps>:<seed>`, `trunc:<threshold>` or `layer`.
    pub fn parse(desc: &str, n: usize) -> Result<Self> {
        let desc = desc.trim();
        let (kind, rest) = desc.split_once(':').unwrap_or((desc, ""));
        match kind {
            "none" if rest.is_empty() => Ok(CorruptionModel::None),
            "layer" if rest.is_empty() => Ok(CorruptionModel::BalancedLayerZero),
            "flips" if !rest.is_empty() => {
                Ok(CorruptionModel::ExplicitFlips(read_flip_file(rest, n)?))
            }
            "iid" => {
                let (eps, seed) = rest
                    .rsplit_once(':')
                    .ok_or_else(|| Error::Parse(format!("expected iid:<eps>:<seed>, got `{desc}`")))?;
                let eps = parse_probability(eps)?;
                let seed = seed
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad iid seed `{seed}`")))?;
                Ok(CorruptionModel::IidFlips { eps, seed })
            }
            "trunc" => {
                let threshold = rest
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad truncation threshold `{rest}`")))?;
                Ok(CorruptionModel::WeightTruncation { threshold })
            }
            _ => Err(Error::Parse(format!("unknown corruption descriptor `{desc}`"))),
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        match self {
            CorruptionModel::ExplicitFlips(set) => {
                if let Some(p) = set.iter().find(|p| p.n() != n) {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: p.n(),
                    });
                }
            }
            CorruptionModel::IidFlips { eps, .. } => {
                if *eps.denom() == 0 || eps.numer() >= eps.denom() {
                    return Err(Error::param("eps", "must lie in [0, 1)"));
                }
            }
            CorruptionModel::WeightTruncation { .. } | CorruptionModel::BalancedLayerZero => {
                if n % 2 != 0 {
                    return Err(Error::param("n", "this corruption model needs an even n"));
                }
            }
            CorruptionModel::None => {}
        }
        Ok(())
    }
}

#[inline]
fn iid_flip(eps: &Ratio<u64>, seed: u64, x: &Point) -> bool {
    let mut h = mix64(seed ^ 0x243f_6a88_85a3_08d3);
    for &w in x.words() {
        h = mix64(h.wrapping_add(w).wrapping_add(0x9e37_79b9_7f4a_7c15));
    }
    // Pr[h < eps * 2^64] = eps, up to 2^-64 rounding
    (h as u128) * (*eps.denom() as u128) < (*eps.numer() as u128) << 64
}

/// Result of measuring how far `g` is from the base function.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Disagreement {
    /// `|{x : g(x) != f(x)}| / 2^n`, computed exactly.
    Exact(BigRational),
    /// A certified upper bound on the exact fraction.
    UpperBound(BigRational),
    /// The expected fraction over the model's randomness.
    Expected(BigRational),
    Unavailable(String),
}

impl Disagreement {
    pub fn value(&self) -> Option<&BigRational> {
        match self {
            Disagreement::Exact(r) | Disagreement::UpperBound(r) | Disagreement::Expected(r) => {
                Some(r)
            }
            Disagreement::Unavailable(_) => None,
        }
    }
}

/// `1 - Pr[Bin(h, 1/2) <= t]^2` with `h = n / 2`: the fraction of Z_2^n with
/// either half heavier than `t`.
pub fn truncated_region_fraction(n: usize, threshold: usize) -> BigRational {
    let h = (n / 2) as u64;
    let below: BigUint = (0..=h.min(threshold as u64)).map(|w| binomial(h, w)).sum();
    let inside = ratio(&below * &below, pow2(2 * h));
    BigRational::from_integer(1.into()) - inside
}

/// `C(n, n/2) / 2^n`.
pub fn balanced_layer_fraction(n: usize) -> BigRational {
    ratio(binomial(n as u64, n as u64 / 2), pow2(n as u64))
}

pub struct NoisyOracle<F> {
    base: F,
    corruption: CorruptionModel,
    queries: u64,
    ones: u64,
}

impl<F: BooleanFunction> NoisyOracle<F> {
    pub fn new(base: F, corruption: CorruptionModel) -> Result<Self> {
        corruption.validate(base.n())?;
        Ok(NoisyOracle {
            base,
            corruption,
            queries: 0,
            ones: 0,
        })
    }

    pub fn clean(base: F) -> Self {
        NoisyOracle {
            base,
            corruption: CorruptionModel::None,
            queries: 0,
            ones: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.base.n()
    }

    pub fn base(&self) -> &F {
        &self.base
    }

    pub fn corruption(&self) -> &CorruptionModel {
        &self.corruption
    }

    /// `g(x)`, counted.
    pub fn query(&mut self, x: &Point) -> Result<bool> {
        if x.n() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: x.n(),
            });
        }
        self.queries += 1;
        let value = self.peek(x);
        self.ones += value as u64;
        Ok(value)
    }

    /// `g(x)` without touching the counter. Reserved for harness bookkeeping
    /// and tests; correctors must go through [`NoisyOracle::query`].
    pub fn peek(&self, x: &Point) -> bool {
        let value = self.base.eval(x);
        match &self.corruption {
            CorruptionModel::None => value,
            CorruptionModel::ExplicitFlips(set) => value ^ set.contains(x),
            CorruptionModel::IidFlips { eps, seed } => value ^ iid_flip(eps, *seed, x),
            CorruptionModel::WeightTruncation { threshold } => {
                let (a, b) = x.half_weights();
                value && a <= *threshold && b <= *threshold
            }
            CorruptionModel::BalancedLayerZero => value && 2 * x.weight() != x.n(),
        }
    }

    /// Whether `g(x) != f(x)`; uncounted.
    pub fn differs_at(&self, x: &Point) -> bool {
        self.peek(x) != self.base.eval(x)
    }

    pub fn read_count(&self) -> u64 {
        self.queries
    }

    /// Number of counted queries that answered 1.
    pub fn read_ones(&self) -> u64 {
        self.ones
    }

    /// Zeroes both the query and the 1-answer counters.
    pub fn reset_count(&mut self) {
        self.queries = 0;
        self.ones = 0;
    }

    /// Exact disagreement when it can be computed (any explicit model, or
    /// `n <= 20` by scanning); otherwise the analytic value of
    /// [`NoisyOracle::analytic_disagreement`].
    pub fn disagreement_fraction(&self) -> Disagreement {
        let n = self.n();
        match &self.corruption {
            CorruptionModel::None | CorruptionModel::ExplicitFlips(_) => {
                self.analytic_disagreement()
            }
            _ if n <= EXHAUSTIVE_MAX_N => {
                let count = (0..1u64 << n)
                    .filter(|&v| self.differs_at(&Point::from_u64(n, v)))
                    .count() as u64;
                Disagreement::Exact(ratio(count.into(), pow2(n as u64)))
            }
            _ => self.analytic_disagreement(),
        }
    }

    /// Closed-form value valid at any `n`, independent of the base function.
    pub fn analytic_disagreement(&self) -> Disagreement {
        let n = self.n();
        match &self.corruption {
            CorruptionModel::None => Disagreement::Exact(BigRational::zero()),
            CorruptionModel::ExplicitFlips(set) => {
                Disagreement::Exact(ratio((set.len() as u64).into(), pow2(n as u64)))
            }
            CorruptionModel::IidFlips { eps, .. } => Disagreement::Expected(ratio(
                (*eps.numer()).into(),
                (*eps.denom()).into(),
            )),
            CorruptionModel::WeightTruncation { threshold } => {
                Disagreement::UpperBound(truncated_region_fraction(n, *threshold))
            }
            CorruptionModel::BalancedLayerZero => {
                Disagreement::UpperBound(balanced_layer_fraction(n))
            }
        }
    }
}
