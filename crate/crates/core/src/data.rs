//! Synthetic 2-D classification sets and IDX decoding.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::matrix::Matrix;

pub const IDX_IMAGES_MAGIC: u32 = 0x0000_0803;
pub const IDX_LABELS_MAGIC: u32 = 0x0000_0801;

/// Fraction of samples the generators assign to training.
pub const TRAIN_FRACTION: f64 = 0.8;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Split {
    pub train_idx: Vec<usize>,
    pub val_idx: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub features: Matrix,
    pub labels: Vec<usize>,
    pub classes: usize,
    pub split: Split,
}

impl Dataset {
    pub fn new(features: Matrix, labels: Vec<usize>, classes: usize, split: Split) -> Result<Self> {
        if labels.len() != features.rows() {
            return Err(Error::Shape(alloc::format!(
                "{} labels for {} samples",
                labels.len(),
                features.rows()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&y| y >= classes) {
            return Err(invalid(alloc::format!(
                "label {bad} outside [0, {classes})"
            )));
        }
        let n = labels.len();
        let mut seen = alloc::vec![false; n];
        for &i in split.train_idx.iter().chain(&split.val_idx) {
            if i >= n || seen[i] {
                return Err(invalid("split indices must be disjoint and in range"));
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(invalid("split must cover every sample"));
        }
        Ok(Self {
            features,
            labels,
            classes,
            split,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.cols()
    }

    /// Re-splits so that a `val_fraction` share of a seeded permutation goes to validation.
    pub fn with_val_fraction(mut self, val_fraction: f64, seed: u64) -> Result<Self> {
        if !(0.0..1.0).contains(&val_fraction) {
            return Err(invalid(alloc::format!(
                "val fraction must lie in [0, 1), got {val_fraction}"
            )));
        }
        self.split = seeded_split(self.len(), 1.0 - val_fraction, seed);
        Ok(self)
    }
}

fn seeded_split(n: usize, train_fraction: f64, seed: u64) -> Split {
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    idx.shuffle(&mut rng);
    let n_train = libm::round(n as f64 * train_fraction) as usize;
    let val_idx = idx.split_off(n_train);
    Split {
        train_idx: idx,
        val_idx,
    }
}

fn check_generator_args(n: usize, noise: f64) -> Result<()> {
    if n < 4 {
        return Err(invalid(alloc::format!("need at least 4 samples, got {n}")));
    }
    if n % 2 != 0 {
        return Err(invalid(alloc::format!(
            "sample count must be even, got {n}"
        )));
    }
    if !(noise.is_finite() && noise >= 0.0) {
        return Err(invalid(alloc::format!(
            "noise must be finite and >= 0, got {noise}"
        )));
    }
    Ok(())
}

fn assemble(points: Vec<[f64; 2]>, labels: Vec<usize>, noise: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(points.len() * 2);
    for p in &points {
        for c in p {
            let jitter: f64 = if noise > 0.0 {
                noise * rng.sample::<f64, _>(StandardNormal)
            } else {
                0.0
            };
            data.push(c + jitter);
        }
    }
    let n = points.len();
    Dataset {
        features: Matrix::from_vec(n, 2, data).unwrap(),
        labels,
        classes: 2,
        split: seeded_split(n, TRAIN_FRACTION, seed),
    }
}

/// Two interleaved half circles: class 0 on the unit circle's upper half,
/// class 1 on the lower half of a unit circle centred at `(1, 0.5)`.
pub fn gen_two_moons(n: usize, noise: f64, seed: u64) -> Result<Dataset> {
    check_generator_args(n, noise)?;
    let half = n / 2;
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..half {
        let theta = PI * i as f64 / (half - 1) as f64;
        points.push([libm::cos(theta), libm::sin(theta)]);
        labels.push(0);
    }
    for i in 0..half {
        let theta = PI * i as f64 / (half - 1) as f64;
        points.push([1.0 - libm::cos(theta), 0.5 - libm::sin(theta)]);
        labels.push(1);
    }
    Ok(assemble(points, labels, noise, seed))
}

/// Two interleaved Archimedean spirals with radius `theta / (2 pi turns)`, so
/// the outermost point of each arm sits on the unit circle.
pub fn gen_spirals(n: usize, turns: f64, noise: f64, seed: u64) -> Result<Dataset> {
    check_generator_args(n, noise)?;
    if !(turns.is_finite() && turns > 0.0) {
        return Err(invalid(alloc::format!("turns must be > 0, got {turns}")));
    }
    let half = n / 2;
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for arm in 0..2 {
        for i in 0..half {
            let s = (i as f64 + 0.5) / half as f64;
            let theta = 2.0 * PI * turns * s;
            let phase = PI * arm as f64;
            points.push([s * libm::cos(theta + phase), s * libm::sin(theta + phase)]);
            labels.push(arm);
        }
    }
    Ok(assemble(points, labels, noise, seed))
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, len: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let out = &self.bytes[self.pos..end];
                self.pos = end;
                Ok(out)
            }
            None => Err(Error::IdxTruncated {
                needed: self.pos.saturating_add(len),
                available: self.bytes.len(),
            }),
        }
    }

    fn u32(&mut self) -> Result<u32> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
    }
}

fn expect_magic(r: &mut Reader<'_>, expected: u32) -> Result<()> {
    let found = r.u32()?;
    if found != expected {
        return Err(Error::IdxMagic { expected, found });
    }
    Ok(())
}

/// Decoded IDX image file: `count` images of `rows * cols` bytes each.
#[derive(Debug, Clone, PartialEq)]
pub struct IdxImages {
    pub count: usize,
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<u8>,
}

pub fn parse_idx_images(bytes: &[u8]) -> Result<IdxImages> {
    let mut r = Reader { bytes, pos: 0 };
    expect_magic(&mut r, IDX_IMAGES_MAGIC)?;
    let count = r.u32()? as usize;
    let rows = r.u32()? as usize;
    let cols = r.u32()? as usize;
    let len = count
        .checked_mul(rows)
        .and_then(|v| v.checked_mul(cols))
        .ok_or(Error::IdxTruncated {
            needed: usize::MAX,
            available: bytes.len(),
        })?;
    let pixels = r.take(len)?.to_vec();
    Ok(IdxImages {
        count,
        rows,
        cols,
        pixels,
    })
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    let mut r = Reader { bytes, pos: 0 };
    expect_magic(&mut r, IDX_LABELS_MAGIC)?;
    let count = r.u32()? as usize;
    Ok(r.take(count)?.to_vec())
}

/// Builds a dataset from IDX image and label bytes. Pixels are divided by
/// 255; the whole set lands in the training split.
pub fn dataset_from_idx(images: &[u8], labels: &[u8]) -> Result<Dataset> {
    let img = parse_idx_images(images)?;
    let lab = parse_idx_labels(labels)?;
    if img.count != lab.len() {
        return Err(Error::IdxCount {
            images: img.count,
            labels: lab.len(),
        });
    }
    let dim = img.rows * img.cols;
    let data = img.pixels.iter().map(|&p| f64::from(p) / 255.0).collect();
    let labels: Vec<usize> = lab.iter().map(|&y| usize::from(y)).collect();
    let classes = labels.iter().max().map_or(0, |m| m + 1);
    Dataset::new(
        Matrix::from_vec(img.count, dim, data)?,
        labels,
        classes,
        Split {
            train_idx: (0..img.count).collect(),
            val_idx: Vec::new(),
        },
    )
}

/// Per-feature standardisation to zero mean and unit variance, using training-split statistics.
pub fn standardize(ds: &mut Dataset) {
    let d = ds.dim();
    let train = &ds.split.train_idx;
    if train.is_empty() {
        return;
    }
    for j in 0..d {
        let mean = train.iter().map(|&i| ds.features.get(i, j)).sum::<f64>() / train.len() as f64;
        let var = train
            .iter()
            .map(|&i| {
                let d = ds.features.get(i, j) - mean;
                d * d
            })
            .sum::<f64>()
            / train.len() as f64;
        let std = if var > 0.0 { libm::sqrt(var) } else { 1.0 };
        for i in 0..ds.len() {
            let v = &mut ds.features.row_mut(i)[j];
            *v = (*v - mean) / std;
        }
    }
}
