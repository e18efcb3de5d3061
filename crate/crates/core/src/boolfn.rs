//! Boolean functions: dense truth tables, juntas given by an embedding of a core
//! table into `[n]`, and algebraic normal form over GF(2).
//!
//! Truth-table indexing: entry `j` is the value at the assignment `a` with
//! `a_i = bit (i - 1) of j`, so variable 1 is the least significant bit.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::point::Point;

/// Largest supported arity of a dense truth table (2^24 bits = 2 MiB).
pub const MAX_TABLE_VARS: usize = 24;

/// Anything that can be evaluated on points of Z_2^n.
pub trait BooleanFunction {
    fn n(&self) -> usize;

    /// Value at `x`. Callers guarantee `x.n() == self.n()`.
    fn eval(&self, x: &Point) -> bool;
}

impl<F: BooleanFunction + ?Sized> BooleanFunction for &F {
    fn n(&self) -> usize {
        (**self).n()
    }
    fn eval(&self, x: &Point) -> bool {
        (**self).eval(x)
    }
}

impl<F: BooleanFunction + ?Sized> BooleanFunction for Box<F> {
    fn n(&self) -> usize {
        (**self).n()
    }
    fn eval(&self, x: &Point) -> bool {
        (**self).eval(x)
    }
}

impl<F: BooleanFunction + ?Sized> BooleanFunction for std::sync::Arc<F> {
    fn n(&self) -> usize {
        (**self).n()
    }
    fn eval(&self, x: &Point) -> bool {
        (**self).eval(x)
    }
}

// Within-word masks selecting indices whose bit `v` is 0, for v < 6.
pub(crate) const LOW_MASKS: [u64; 6] = [
    0x5555_5555_5555_5555,
    0x3333_3333_3333_3333,
    0x0f0f_0f0f_0f0f_0f0f,
    0x00ff_00ff_00ff_00ff,
    0x0000_ffff_0000_ffff,
    0x0000_0000_ffff_ffff,
];

/// In-place GF(2) Möbius transform on a packed table of `2^k` bits. It is an
/// involution, so the same routine maps table -> ANF and ANF -> table.
fn mobius_in_place(k: usize, words: &mut [u64]) {
    for v in 0..k.min(6) {
        let shift = 1u32 << v;
        for w in words.iter_mut() {
            *w ^= (*w & LOW_MASKS[v]) << shift;
        }
    }
    for v in 6..k {
        let stride = 1usize << (v - 6);
        for block in words.chunks_exact_mut(2 * stride) {
            let (lo, hi) = block.split_at_mut(stride);
            for (h, l) in hi.iter_mut().zip(lo.iter()) {
                *h ^= *l;
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    k: usize,
    words: Vec<u64>,
}

impl TruthTable {
    fn check_k(k: usize) -> Result<()> {
        if k == 0 || k > MAX_TABLE_VARS {
            return Err(Error::param(
                "k",
                format!("truth tables need 1 <= k <= {MAX_TABLE_VARS}, got {k}"),
            ));
        }
        Ok(())
    }

    fn empty(k: usize) -> Self {
        TruthTable {
            k,
            words: vec![0; (1usize << k).div_ceil(64)],
        }
    }

    pub fn from_fn(k: usize, f: impl Fn(usize) -> bool) -> Result<Self> {
        Self::check_k(k)?;
        let mut t = Self::empty(k);
        for j in 0..t.len() {
            if f(j) {
                t.words[j / 64] |= 1 << (j % 64);
            }
        }
        Ok(t)
    }

    pub fn constant(k: usize, value: bool) -> Result<Self> {
        Self::from_fn(k, |_| value)
    }

    /// AND of all `k` variables.
    pub fn and(k: usize) -> Result<Self> {
        let full = (1usize << k) - 1;
        Self::from_fn(k, |j| j == full)
    }

    pub fn parity(k: usize) -> Result<Self> {
        Self::from_fn(k, |j| j.count_ones() % 2 == 1)
    }

    /// Strict majority; `k` must be odd.
    pub fn majority(k: usize) -> Result<Self> {
        if k % 2 == 0 {
            return Err(Error::param("k", "majority needs an odd number of variables"));
        }
        Self::from_fn(k, |j| j.count_ones() as usize > k / 2)
    }

    /// Uniformly random table: every one of the `2^(2^k)` tables is equally likely.
    pub fn random<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Result<Self> {
        Self::check_k(k)?;
        let mut t = Self::empty(k);
        for w in &mut t.words {
            *w = rng.random();
        }
        t.clear_padding();
        Ok(t)
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of entries, `2^k`.
    #[inline]
    pub fn len(&self) -> usize {
        1 << self.k
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, index: usize) -> bool {
        debug_assert!(index < self.len());
        (self.words[index / 64] >> (index % 64)) & 1 == 1
    }

    pub fn set(&mut self, index: usize, value: bool) {
        assert!(index < self.len());
        let mask = 1u64 << (index % 64);
        if value {
            self.words[index / 64] |= mask;
        } else {
            self.words[index / 64] &= !mask;
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Number of assignments mapped to 1.
    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_constant(&self) -> bool {
        let ones = self.count_ones();
        ones == 0 || ones == self.len() as u64
    }

    pub fn anf(&self) -> AnfPolynomial {
        let mut coeffs = self.words.clone();
        mobius_in_place(self.k, &mut coeffs);
        let mut monomials = BTreeSet::new();
        for (wi, &w) in coeffs.iter().enumerate() {
            let mut rest = w;
            while rest != 0 {
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                monomials.insert((wi * 64 + b) as u32);
            }
        }
        AnfPolynomial {
            m: self.k,
            monomials,
        }
    }

    /// Degree as a GF(2) polynomial; constants (including 0) have degree 0.
    pub fn degree(&self) -> usize {
        let mut coeffs = self.words.clone();
        mobius_in_place(self.k, &mut coeffs);
        let mut best = 0;
        for (wi, &w) in coeffs.iter().enumerate() {
            let mut rest = w;
            while rest != 0 {
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                best = best.max((wi * 64 + b).count_ones() as usize);
            }
        }
        best
    }

    /// Lowercase hex of the table, least significant digit first.
    pub fn to_hex(&self) -> String {
        let digits = (self.len() / 4).max(1);
        let mut s = String::with_capacity(digits);
        for d in 0..digits {
            let bit = 4 * d;
            let nibble = (self.words[bit / 64] >> (bit % 64)) & 0xf;
            s.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        s
    }

    pub fn from_hex(k: usize, hex: &str) -> Result<Self> {
        Self::check_k(k)?;
        let hex = hex.trim();
        let digits = ((1usize << k) / 4).max(1);
        if hex.len() != digits {
            return Err(Error::Parse(format!(
                "truth table with k = {k} needs {digits} hex digits, got {}",
                hex.len()
            )));
        }
        let mut t = Self::empty(k);
        for (d, ch) in hex.chars().enumerate() {
            let nibble = ch
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("invalid hex digit `{ch}`")))?
                as u64;
            let bit = 4 * d;
            t.words[bit / 64] |= nibble << (bit % 64);
        }
        let before = t.words.clone();
        t.clear_padding();
        if t.words != before {
            return Err(Error::Parse(format!(
                "hex digit sets bits beyond the {} table entries",
                t.len()
            )));
        }
        Ok(t)
    }

    /// File form: a `k=<int>` header line followed by the hex line.
    pub fn to_file_string(&self) -> String {
        format!("k={}\n{}\n", self.k, self.to_hex())
    }

    pub fn parse_file(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty truth-table file".into()))?;
        let k = header
            .strip_prefix("k=")
            .and_then(|v| v.parse::<usize>().ok())
            .ok_or_else(|| Error::Parse(format!("bad header line `{header}`")))?;
        let hex = lines
            .next()
            .ok_or_else(|| Error::Parse("missing hex line".into()))?;
        if lines.next().is_some() {
            return Err(Error::Parse("trailing content after hex line".into()));
        }
        Self::from_hex(k, hex)
    }

    pub fn read_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_file(&std::fs::read_to_string(path)?)
    }

    pub fn write_path(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_file_string())?;
        Ok(())
    }

    fn clear_padding(&mut self) {
        if self.k < 6 {
            self.words[0] &= (1u64 << (1 << self.k)) - 1;
        }
    }
}

impl std::fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "TruthTable(k={}, {})", self.k, self.to_hex())
    }
}

/// Unique GF(2) polynomial of a function on `m` variables. Monomials are stored
/// as bit masks, bit `i - 1` standing for variable `i`; mask 0 is the constant 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnfPolynomial {
    m: usize,
    monomials: BTreeSet<u32>,
}

impl AnfPolynomial {
    pub fn new(m: usize, monomials: impl IntoIterator<Item = u32>) -> Result<Self> {
        TruthTable::check_k(m)?;
        let mut set = BTreeSet::new();
        for mono in monomials {
            if m < 32 && mono >> m != 0 {
                return Err(Error::param(
                    "monomial",
                    format!("mask {mono:#x} uses variables beyond {m}"),
                ));
            }
            // repeated monomials cancel over GF(2)
            if !set.insert(mono) {
                set.remove(&mono);
            }
        }
        Ok(AnfPolynomial { m, monomials: set })
    }

    /// Builds from monomials given as lists of 1-based variables.
    pub fn from_sets<S, I>(m: usize, monomials: S) -> Result<Self>
    where
        S: IntoIterator<Item = I>,
        I: IntoIterator<Item = usize>,
    {
        let mut masks = Vec::new();
        for mono in monomials {
            let mut mask = 0u32;
            for v in mono {
                if v == 0 || v > m {
                    return Err(Error::param("monomial", format!("variable {v} outside 1..={m}")));
                }
                mask |= 1 << (v - 1);
            }
            masks.push(mask);
        }
        Self::new(m, masks)
    }

    /// Random polynomial including each monomial of size `<= max_degree`
    /// independently with probability 1/2.
    pub fn random<R: Rng + ?Sized>(m: usize, max_degree: usize, rng: &mut R) -> Result<Self> {
        TruthTable::check_k(m)?;
        let monomials = (0..1u32 << m)
            .filter(|mask| mask.count_ones() as usize <= max_degree)
            .filter(|_| rng.random::<bool>())
            .collect();
        Ok(AnfPolynomial { m, monomials })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn monomial_masks(&self) -> impl Iterator<Item = u32> + '_ {
        self.monomials.iter().copied()
    }

    /// Monomials as sorted lists of 1-based variables.
    pub fn monomial_sets(&self) -> Vec<Vec<usize>> {
        self.monomials
            .iter()
            .map(|&mask| (1..=self.m).filter(|v| mask >> (v - 1) & 1 == 1).collect())
            .collect()
    }

    pub fn degree(&self) -> usize {
        self.monomials
            .iter()
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Direct evaluation at an assignment index (variable 1 = bit 0).
    pub fn eval_index(&self, assignment: u32) -> bool {
        self.monomials
            .iter()
            .filter(|&&mono| mono & assignment == mono)
            .count()
            % 2
            == 1
    }

    pub fn to_truth_table(&self) -> TruthTable {
        let mut t = TruthTable::empty(self.m);
        for &mono in &self.monomials {
            t.words[mono as usize / 64] |= 1 << (mono % 64);
        }
        mobius_in_place(self.m, &mut t.words);
        t
    }

    pub fn to_string_sets(&self) -> String {
        let mut s = String::new();
        for (i, mono) in self.monomial_sets().iter().enumerate() {
            if i > 0 {
                s.push_str(" + ");
            }
            if mono.is_empty() {
                s.push('1');
            } else {
                for v in mono {
                    let _ = write!(s, "x{v}");
                }
            }
        }
        if s.is_empty() {
            s.push('0');
        }
        s
    }
}

impl BooleanFunction for AnfPolynomial {
    fn n(&self) -> usize {
        self.m
    }

    fn eval(&self, x: &Point) -> bool {
        debug_assert_eq!(x.n(), self.m);
        self.eval_index(x.words()[0] as u32)
    }
}

/// A function of the form `x -> core(x_{e_1}, ..., x_{e_k})` on Z_2^n, where
/// `e` is an injective embedding of the core's variables into `[n]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JuntaSpec {
    n: usize,
    core: TruthTable,
    embedding: Vec<usize>,
}

fn validate_embedding(n: usize, k: usize, embedding: &[usize]) -> Result<()> {
    if embedding.len() != k {
        return Err(Error::InvalidEmbedding(format!(
            "expected {k} coordinates, got {}",
            embedding.len()
        )));
    }
    let mut seen = BTreeSet::new();
    for &c in embedding {
        if c == 0 || c > n {
            return Err(Error::InvalidEmbedding(format!(
                "coordinate {c} outside 1..={n}"
            )));
        }
        if !seen.insert(c) {
            return Err(Error::InvalidEmbedding(format!("coordinate {c} repeated")));
        }
    }
    Ok(())
}

impl JuntaSpec {
    pub fn new(n: usize, core: TruthTable, embedding: Vec<usize>) -> Result<Self> {
        if core.k() > n {
            return Err(Error::param(
                "k",
                format!("core has {} variables but n = {n}", core.k()),
            ));
        }
        validate_embedding(n, core.k(), &embedding)?;
        Ok(JuntaSpec {
            n,
            core,
            embedding,
        })
    }

    /// Uniform random core on `k` variables with a uniform injective embedding.
    pub fn random<R: Rng + ?Sized>(k: usize, n: usize, rng: &mut R) -> Result<Self> {
        if k > n {
            return Err(Error::param("k", format!("k = {k} exceeds n = {n}")));
        }
        let core = TruthTable::random(k, rng)?;
        let mut coords: Vec<usize> = (1..=n).collect();
        let (chosen, _) = coords.partial_shuffle(rng, k);
        let embedding = chosen.to_vec();
        Ok(JuntaSpec {
            n,
            core,
            embedding,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.core.k()
    }

    pub fn core(&self) -> &TruthTable {
        &self.core
    }

    pub fn embedding(&self) -> &[usize] {
        &self.embedding
    }

    /// Index into the core table of `x` restricted to the embedding.
    #[inline]
    pub fn core_index(&self, x: &Point) -> usize {
        self.embedding
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &c)| acc | (x.get(c) as usize) << i)
    }

    /// Checked evaluation.
    pub fn evaluate(&self, x: &Point) -> Result<bool> {
        if x.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: x.n(),
            });
        }
        Ok(self.core.get(self.core_index(x)))
    }

    /// Same core under a new embedding.
    pub fn relabel(&self, new_embedding: Vec<usize>) -> Result<Self> {
        validate_embedding(self.n, self.k(), &new_embedding)?;
        Ok(JuntaSpec {
            n: self.n,
            core: self.core.clone(),
            embedding: new_embedding,
        })
    }
}

impl BooleanFunction for JuntaSpec {
    fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn eval(&self, x: &Point) -> bool {
        debug_assert_eq!(x.n(), self.n);
        self.core.get(self.core_index(x))
    }
}

/// Function depending only on the Hamming weight: `profile[w]` is its value on
/// inputs of weight `w`, so the profile has `n + 1` entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricFunction {
    profile: Vec<bool>,
}

impl SymmetricFunction {
    pub fn new(profile: Vec<bool>) -> Result<Self> {
        if profile.len() < 2 {
            return Err(Error::param("profile", "needs n + 1 >= 2 entries"));
        }
        Ok(SymmetricFunction { profile })
    }

    pub fn profile(&self) -> &[bool] {
        &self.profile
    }
}

impl BooleanFunction for SymmetricFunction {
    fn n(&self) -> usize {
        self.profile.len() - 1
    }

    fn eval(&self, x: &Point) -> bool {
        self.profile[x.weight()]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded_rng;
    use proptest::prelude::*;

    // brute-force Möbius: coefficient of monomial S is XOR of f over subsets of S
    fn brute_anf(t: &TruthTable) -> BTreeSet<u32> {
        (0..t.len() as u32)
            .filter(|&s| {
                (0..t.len() as u32)
                    .filter(|&a| a & s == a)
                    .fold(false, |acc, a| acc ^ t.get(a as usize))
            })
            .collect()
    }

    #[test]
    fn anf_of_and_is_single_full_monomial() {
        for k in 1..=8 {
            let anf = TruthTable::and(k).unwrap().anf();
            assert_eq!(anf.monomial_sets(), vec![(1..=k).collect::<Vec<_>>()]);
            assert_eq!(TruthTable::and(k).unwrap().degree(), k);
        }
    }

    #[test]
    fn anf_of_parity_is_linear() {
        for k in 1..=8 {
            let t = TruthTable::parity(k).unwrap();
            let sets = t.anf().monomial_sets();
            assert_eq!(sets, (1..=k).map(|v| vec![v]).collect::<Vec<_>>());
            assert_eq!(t.degree(), 1);
        }
    }

    #[test]
    fn anf_of_maj3_matches_brute_force() {
        let t = TruthTable::majority(3).unwrap();
        let expected = brute_anf(&t);
        let anf = t.anf();
        assert_eq!(anf.monomial_masks().collect::<BTreeSet<_>>(), expected);
        assert_eq!(anf.monomial_sets(), vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(t.degree(), 2);
    }

    #[test]
    fn anf_matches_brute_force_across_word_sizes() {
        let mut rng = seeded_rng(11);
        for k in 1..=9 {
            let t = TruthTable::random(k, &mut rng).unwrap();
            assert_eq!(t.anf().monomial_masks().collect::<BTreeSet<_>>(), brute_anf(&t));
        }
    }

    #[test]
    fn anf_round_trip_1000_tables() {
        let mut rng = seeded_rng(3);
        for i in 0..1000 {
            let k = 1 + i % 10;
            let t = TruthTable::random(k, &mut rng).unwrap();
            assert_eq!(t.anf().to_truth_table(), t);
        }
    }

    #[test]
    fn degree_bounds_and_full_monomial() {
        let mut rng = seeded_rng(4);
        for i in 0..300 {
            let k = 1 + i % 10;
            let t = TruthTable::random(k, &mut rng).unwrap();
            let full = (1u32 << k) - 1;
            let d = t.degree();
            assert!(d <= k);
            assert_eq!(d == k, t.anf().monomial_masks().any(|m| m == full));
            assert_eq!(d, t.anf().degree());
        }
    }

    #[test]
    fn constants_have_degree_zero() {
        assert_eq!(TruthTable::constant(5, false).unwrap().degree(), 0);
        assert_eq!(TruthTable::constant(5, true).unwrap().degree(), 0);
        assert_eq!(
            TruthTable::constant(3, true).unwrap().anf().monomial_sets(),
            vec![Vec::<usize>::new()]
        );
    }

    #[test]
    fn anf_eval_agrees_with_table() {
        let mut rng = seeded_rng(5);
        let p = AnfPolynomial::random(7, 3, &mut rng).unwrap();
        let t = p.to_truth_table();
        for a in 0..128u32 {
            assert_eq!(p.eval_index(a), t.get(a as usize));
        }
        assert!(p.degree() <= 3);
    }

    #[test]
    fn table_k_range_enforced() {
        assert!(TruthTable::constant(0, false).is_err());
        assert!(TruthTable::constant(25, false).is_err());
    }

    #[test]
    fn eval_junta_and3() {
        let spec = JuntaSpec::new(10, TruthTable::and(3).unwrap(), vec![2, 5, 7]).unwrap();
        let x = Point::from_coords(10, [2, 5, 7]).unwrap();
        assert!(spec.evaluate(&x).unwrap());
        let y = Point::from_coords(10, [1, 3, 4, 5, 6, 7, 8, 9, 10]).unwrap();
        assert!(!spec.evaluate(&y).unwrap());
        assert!(matches!(
            spec.evaluate(&Point::zeros(9)),
            Err(Error::DimensionMismatch { expected: 10, got: 9 })
        ));
    }

    #[test]
    fn eval_junta_is_table_lookup() {
        let mut rng = seeded_rng(6);
        let core = TruthTable::random(4, &mut rng).unwrap();
        let spec = JuntaSpec::new(12, core.clone(), vec![9, 3, 12, 1]).unwrap();
        // index 13 = 0b1101: core vars 1, 3, 4 set -> coords 9, 12, 1
        let x = Point::from_coords(12, [9, 12, 1, 5, 6]).unwrap();
        assert_eq!(spec.evaluate(&x).unwrap(), core.get(13));
    }

    #[test]
    fn relabel_validation_and_symmetric_core() {
        let spec = JuntaSpec::new(4, TruthTable::parity(2).unwrap(), vec![1, 2]).unwrap();
        assert!(spec.relabel(vec![1, 1]).is_err());
        assert!(spec.relabel(vec![0, 2]).is_err());
        assert!(spec.relabel(vec![1, 5]).is_err());
        assert!(spec.relabel(vec![1]).is_err());
        let swapped = spec.relabel(vec![2, 1]).unwrap();
        let same = spec.relabel(vec![1, 2]).unwrap();
        for v in 0..16u64 {
            let x = Point::from_u64(4, v);
            assert_eq!(spec.eval(&x), swapped.eval(&x));
            assert_eq!(spec.eval(&x), same.eval(&x));
        }
    }

    #[test]
    fn relabel_asymmetric_core_differs_where_coords_differ() {
        // f(a, b) = a AND NOT b
        let core = TruthTable::from_fn(2, |j| j == 0b01).unwrap();
        let spec = JuntaSpec::new(4, core, vec![1, 2]).unwrap();
        let swapped = spec.relabel(vec![2, 1]).unwrap();
        for v in 0..16u64 {
            let x = Point::from_u64(4, v);
            let differs = spec.eval(&x) != swapped.eval(&x);
            assert_eq!(differs, x.get(1) != x.get(2), "at {x:?}");
        }
    }

    #[test]
    fn junta_locality_exhaustive_small_n() {
        let mut rng = seeded_rng(7);
        for _ in 0..20 {
            let spec = JuntaSpec::random(3, 10, &mut rng).unwrap();
            let outside: Vec<usize> =
                (1..=10).filter(|c| !spec.embedding().contains(c)).collect();
            for v in 0..1024u64 {
                let x = Point::from_u64(10, v);
                for &c in &outside {
                    let mut y = x.clone();
                    y.flip(c);
                    assert_eq!(spec.eval(&x), spec.eval(&y));
                }
            }
        }
    }

    #[test]
    fn truth_table_file_format() {
        // AND_3: only index 7 set -> hex digits (lsd first) "08"
        let t = TruthTable::and(3).unwrap();
        assert_eq!(t.to_file_string(), "k=3\n08\n");
        assert_eq!(TruthTable::parse_file("k=3\n08\n").unwrap(), t);
        // k = 1 parity: entries (0, 1) -> single digit 2
        assert_eq!(TruthTable::parity(1).unwrap().to_hex(), "2");
        assert!(TruthTable::parse_file("k=1\n4\n").is_err());
        assert!(TruthTable::parse_file("k=3\n8\n").is_err());
        assert!(TruthTable::parse_file("n=3\n08\n").is_err());
    }

    #[test]
    fn symmetric_function_uses_weight() {
        let maj5 = SymmetricFunction::new(vec![false, false, false, true, true, true]).unwrap();
        assert!(maj5.eval(&Point::from_coords(5, [1, 2, 3]).unwrap()));
        assert!(!maj5.eval(&Point::from_coords(5, [4, 5]).unwrap()));
    }

    proptest! {
        #[test]
        fn truth_table_file_round_trip(k in 1usize..=12, seed: u64) {
            let t = TruthTable::random(k, &mut seeded_rng(seed)).unwrap();
            prop_assert_eq!(TruthTable::parse_file(&t.to_file_string()).unwrap(), t);
        }

        #[test]
        fn junta_locality_sampled_large_n(seed: u64, flips in proptest::collection::vec(1usize..=1024, 1..20)) {
            let mut rng = seeded_rng(seed);
            let spec = JuntaSpec::random(6, 1024, &mut rng).unwrap();
            let x = Point::random(1024, &mut rng);
            let mut y = x.clone();
            for c in flips.into_iter().filter(|c| !spec.embedding().contains(c)) {
                y.flip(c);
            }
            prop_assert_eq!(spec.eval(&x), spec.eval(&y));
        }
    }
}
