//! Points of Z_2^n stored as packed 64-bit words.
//!
//! Coordinates are 1-based everywhere in the public API: coordinate `i`
//! (for `1 <= i <= n`) lives in bit `(i - 1) % 64` of word `(i - 1) / 64`.
//! Bits past `n` in the last word are always zero, so derived `Eq` and
//! `Hash` compare points by value.

use std::fmt;

use rand::Rng;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Point {
    n: usize,
    words: Vec<u64>,
}

#[inline]
fn word_count(n: usize) -> usize {
    n.div_ceil(64)
}

impl Point {
    /// The all-zeros point. Panics if `n == 0`.
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "points need at least one coordinate");
        Point {
            n,
            words: vec![0; word_count(n)],
        }
    }

    pub fn ones(n: usize) -> Self {
        let mut p = Point::zeros(n);
        p.words.iter_mut().for_each(|w| *w = u64::MAX);
        p.clear_padding();
        p
    }

    /// Uniform point of Z_2^n.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut p = Point::zeros(n);
        p.randomize(rng);
        p
    }

    /// Builds a point whose set coordinates are exactly `coords` (1-based).
    pub fn from_coords<I>(n: usize, coords: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        if n == 0 {
            return Err(Error::param("n", "must be at least 1"));
        }
        let mut p = Point::zeros(n);
        for c in coords {
            if c == 0 || c > n {
                return Err(Error::param(
                    "coordinate",
                    format!("{c} is outside 1..={n}"),
                ));
            }
            p.set(c, true);
        }
        Ok(p)
    }

    /// Point of dimension `n` whose coordinates `1..=min(n, 64)` hold the bits of `value`
    /// (bit 0 of `value` is coordinate 1).
    pub fn from_u64(n: usize, value: u64) -> Self {
        let mut p = Point::zeros(n);
        p.words[0] = value;
        p.clear_padding();
        p
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Value of coordinate `i` (1-based).
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i >= 1 && i <= self.n);
        let j = i - 1;
        (self.words[j / 64] >> (j % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i >= 1 && i <= self.n);
        let j = i - 1;
        let mask = 1u64 << (j % 64);
        if value {
            self.words[j / 64] |= mask;
        } else {
            self.words[j / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i >= 1 && i <= self.n);
        let j = i - 1;
        self.words[j / 64] ^= 1u64 << (j % 64);
    }

    /// Overwrites every coordinate with a fresh uniform bit.
    pub fn randomize<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for w in &mut self.words {
            *w = rng.random();
        }
        self.clear_padding();
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Hamming weight restricted to coordinates `lo..=hi` (1-based, inclusive).
    pub fn weight_between(&self, lo: usize, hi: usize) -> usize {
        if lo > hi {
            return 0;
        }
        debug_assert!(lo >= 1 && hi <= self.n);
        let (a, b) = (lo - 1, hi); // half-open [a, b) in 0-based bits
        let (wa, wb) = (a / 64, (b - 1) / 64);
        let mut total = 0;
        for idx in wa..=wb {
            let mut w = self.words[idx];
            if idx == wa {
                w &= u64::MAX << (a % 64);
            }
            if idx == wb && b % 64 != 0 {
                w &= (1u64 << (b % 64)) - 1;
            }
            total += w.count_ones() as usize;
        }
        total
    }

    /// Weights of the first `n/2` and last `n - n/2` coordinates.
    pub fn half_weights(&self) -> (usize, usize) {
        let h = self.n / 2;
        (self.weight_between(1, h), self.weight_between(h + 1, self.n))
    }

    /// In-place `self += other` over Z_2^n.
    pub fn xor_assign(&mut self, other: &Point) {
        assert_eq!(self.n, other.n, "dimension mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &Point) -> Point {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Coordinatewise AND.
    pub fn and(&self, other: &Point) -> Point {
        assert_eq!(self.n, other.n, "dimension mismatch in and");
        Point {
            n: self.n,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    /// Copies `src` into every coordinate that is not set in `mask`.
    pub fn copy_outside(&mut self, mask: &Point, src: &Point) {
        assert!(self.n == mask.n && self.n == src.n, "dimension mismatch");
        for ((w, m), s) in self.words.iter_mut().zip(&mask.words).zip(&src.words) {
            *w = (*w & m) | (s & !m);
        }
    }

    pub fn complement(&self) -> Point {
        let mut out = Point {
            n: self.n,
            words: self.words.iter().map(|w| !w).collect(),
        };
        out.clear_padding();
        out
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// Set coordinates in increasing order (1-based).
    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    None
                } else {
                    let b = rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    Some(wi * 64 + b + 1)
                }
            })
        })
    }

    /// Lowercase hex, least significant digit first; digit `d` holds coordinates
    /// `4d+1 ..= 4d+4` with coordinate `4d+1` in its lowest bit.
    pub fn to_hex(&self) -> String {
        let digits = self.n.div_ceil(4);
        (0..digits)
            .map(|d| {
                let bit = 4 * d;
                let nibble = (self.words[bit / 64] >> (bit % 64)) & 0xf;
                char::from_digit(nibble as u32, 16).unwrap()
            })
            .collect()
    }

    /// Inverse of [`Point::to_hex`]. The string must have exactly `ceil(n/4)`
    /// digits and no bits set beyond coordinate `n`.
    pub fn from_hex(n: usize, hex: &str) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "must be at least 1"));
        }
        let hex = hex.trim();
        let digits = n.div_ceil(4);
        if hex.len() != digits {
            return Err(Error::Parse(format!(
                "point hex for n = {n} needs {digits} digits, got {}",
                hex.len()
            )));
        }
        let mut p = Point::zeros(n);
        for (d, ch) in hex.chars().enumerate() {
            let nibble = ch
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("invalid hex digit `{ch}`")))?
                as u64;
            let bit = 4 * d;
            p.words[bit / 64] |= nibble << (bit % 64);
        }
        let before = p.words.clone();
        p.clear_padding();
        if p.words != before {
            return Err(Error::Parse(format!(
                "point hex sets bits beyond coordinate {n}"
            )));
        }
        Ok(p)
    }

    fn clear_padding(&mut self) {
        let rem = self.n % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Point(n={}, {})", self.n, self.to_hex())
    }
}
