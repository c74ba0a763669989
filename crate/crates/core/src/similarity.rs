//! Ranking metrics: Jaro for usernames, term-frequency cosine for post text,
//! RGB histogram intersection for profile pictures, and the name predicate
//! used by name searches.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::text::tokenize;

/// Jaro similarity over Unicode scalar values.
///
/// Two characters match when equal and no further apart than
/// `floor(max(|a|, |b|) / 2) - 1`; with `m` matches and `t` matched
/// characters out of order, the value is
/// `(m/|a| + m/|b| + (m - t/2)/m) / 3`, or 0 without matches.
/// Two empty strings are identical (1.0).
pub fn jaro(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }

    let window = (a.len().max(b.len()) / 2).saturating_sub(1);
    let mut b_taken = vec![false; b.len()];
    let mut a_matched: Vec<char> = Vec::new();

    for (i, &ca) in a.iter().enumerate() {
        let lo = i.saturating_sub(window);
        let hi = (i + window + 1).min(b.len());
        for j in lo..hi {
            if !b_taken[j] && b[j] == ca {
                b_taken[j] = true;
                a_matched.push(ca);
                break;
            }
        }
    }

    let m = a_matched.len();
    if m == 0 {
        return 0.0;
    }
    let b_matched = b
        .iter()
        .zip(&b_taken)
        .filter_map(|(c, &taken)| taken.then_some(*c));
    let out_of_order = a_matched
        .iter()
        .zip(b_matched)
        .filter(|(x, y)| *x != y)
        .count();

    let m = m as f64;
    let t = out_of_order as f64 / 2.0;
    (m / a.len() as f64 + m / b.len() as f64 + (m - t) / m) / 3.0
}

/// Term-frequency vector of a text. Zero weights are never stored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TermVector {
    weights: BTreeMap<String, f64>,
}

impl TermVector {
    pub fn from_text(text: &str) -> Self {
        let mut weights = BTreeMap::new();
        for tok in tokenize(text) {
            *weights.entry(tok).or_insert(0.0) += 1.0;
        }
        Self { weights }
    }

    pub fn weight(&self, token: &str) -> f64 {
        self.weights.get(token).copied().unwrap_or(0.0)
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.weights.values().map(|w| w * w).sum())
    }

    pub fn dot(&self, other: &TermVector) -> f64 {
        let (small, large) = if self.weights.len() <= other.weights.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .weights
            .iter()
            .map(|(t, w)| w * large.weight(t))
            .sum()
    }

    pub fn cosine(&self, other: &TermVector) -> f64 {
        if self.is_empty() || other.is_empty() {
            return 0.0;
        }
        let v = self.dot(other) / (self.norm() * other.norm());
        v.clamp(0.0, 1.0)
    }
}

/// Cosine similarity of the two texts' term-frequency vectors.
pub fn cosine_text(a: &str, b: &str) -> f64 {
    TermVector::from_text(a).cosine(&TermVector::from_text(b))
}

/// Decoded RGB picture, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    width: u32,
    height: u32,
    pixels: Vec<[u8; 3]>,
}

impl Raster {
    pub fn new(width: u32, height: u32, pixels: Vec<[u8; 3]>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidInput("raster has no pixels".into()));
        }
        if pixels.len() as u64 != width as u64 * height as u64 {
            return Err(Error::InvalidInput("raster size does not match dimensions".into()));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> [u8; 3]) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    /// Packed RGB bytes.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.pixels.iter().flatten().copied().collect()
    }
}

pub const BINS_PER_CHANNEL: usize = 8;
pub const HISTOGRAM_BINS: usize = BINS_PER_CHANNEL * BINS_PER_CHANNEL * BINS_PER_CHANNEL;

/// Joint 8x8x8 RGB histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    bins: Vec<f64>,
    total: f64,
}

impl Histogram {
    pub fn from_raster(raster: &Raster) -> Self {
        let mut bins = vec![0.0; HISTOGRAM_BINS];
        for px in raster.pixels() {
            bins[Self::bin_of(*px)] += 1.0;
        }
        let total = raster.pixels().len() as f64;
        Self { bins, total }
    }

    pub fn bin_of([r, g, b]: [u8; 3]) -> usize {
        let q = |c: u8| (c as usize * BINS_PER_CHANNEL) / 256;
        (q(r) * BINS_PER_CHANNEL + q(g)) * BINS_PER_CHANNEL + q(b)
    }

    pub fn bins(&self) -> &[f64] {
        &self.bins
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    /// Same histogram scaled to sum to 1.
    pub fn normalized(&self) -> Self {
        let bins = self.bins.iter().map(|b| b / self.total).collect();
        Self { bins, total: 1.0 }
    }

    /// Histogram intersection of the two L1-normalised histograms.
    pub fn intersection(&self, other: &Histogram) -> f64 {
        let a = self.normalized();
        let b = other.normalized();
        let s: f64 = a.bins.iter().zip(&b.bins).map(|(x, y)| x.min(*y)).sum();
        s.clamp(0.0, 1.0)
    }
}

/// Histogram intersection of two pictures, in `[0, 1]`.
pub fn histogram_similarity(a: &Raster, b: &Raster) -> f64 {
    Histogram::from_raster(a).intersection(&Histogram::from_raster(b))
}

/// Result of comparing two profile pictures that may be missing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ImageScore {
    Scored(f64),
    /// One side has no usable picture; the score counts as 0.
    NoImage,
}

impl ImageScore {
    pub fn value(self) -> f64 {
        match self {
            ImageScore::Scored(s) => s,
            ImageScore::NoImage => 0.0,
        }
    }
}

pub fn compare_images(a: Option<&Raster>, b: Option<&Raster>) -> ImageScore {
    match (a, b) {
        (Some(a), Some(b)) => ImageScore::Scored(histogram_similarity(a, b)),
        _ => ImageScore::NoImage,
    }
}

/// Minimum length of a queried-name token that may match on its own.
pub const MIN_NAME_TOKEN: usize = 3;

/// Does `candidate_name` carry the queried name, or a part of it?
///
/// True when both names are equal after lowercasing and whitespace
/// normalisation, or when a whitespace token of the queried name at least
/// [`MIN_NAME_TOKEN`] characters long is also a token of the candidate name.
/// Directional: the queried name drives the match.
pub fn name_match(queried_name: &str, candidate_name: &str) -> bool {
    let q: Vec<String> = queried_name.split_whitespace().map(str::to_lowercase).collect();
    let c: Vec<String> = candidate_name.split_whitespace().map(str::to_lowercase).collect();
    if !q.is_empty() && q == c {
        return true;
    }
    q.iter()
        .filter(|t| t.chars().count() >= MIN_NAME_TOKEN)
        .any(|t| c.contains(t))
}
