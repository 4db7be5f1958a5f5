//! Named dataset sources shared by `train` and `sweep`.

use std::path::PathBuf;

use berlu_core::data::{gen_spirals, gen_two_moons, standardize};
use berlu_core::Dataset;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::io;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetSource {
    Spirals {
        n: usize,
        turns: f64,
        noise: f64,
    },
    Moons {
        n: usize,
        noise: f64,
    },
    /// CSV interchange file.
    Csv {
        path: PathBuf,
        #[serde(default)]
        options: FileOptions,
    },
    /// IDX image/label pair, pixels scaled to `[0, 1]`.
    Idx {
        images: PathBuf,
        labels: PathBuf,
        #[serde(default)]
        options: FileOptions,
    },
}

/// Post-load handling for file-backed datasets. By default every sample is
/// a training sample and features are left as stored.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileOptions {
    /// Fraction held out for validation, drawn with the run seed.
    pub val_fraction: f64,
    /// Shift and scale each feature to zero mean and unit variance.
    pub standardize: bool,
}

impl FileOptions {
    fn apply(&self, mut ds: Dataset, seed: u64) -> Result<Dataset> {
        if self.standardize {
            standardize(&mut ds);
        }
        if self.val_fraction != 0.0 {
            ds = ds.with_val_fraction(self.val_fraction, seed)?;
        }
        Ok(ds)
    }
}

impl Default for DatasetSource {
    fn default() -> Self {
        DatasetSource::Spirals {
            n: 1000,
            turns: 1.5,
            noise: 0.05,
        }
    }
}

impl DatasetSource {
    pub fn load(&self, seed: u64) -> Result<Dataset> {
        Ok(match self {
            DatasetSource::Spirals { n, turns, noise } => gen_spirals(*n, *turns, *noise, seed)?,
            DatasetSource::Moons { n, noise } => gen_two_moons(*n, *noise, seed)?,
            DatasetSource::Csv { path, options } => {
                options.apply(io::load_dataset_csv(path)?, seed)?
            }
            DatasetSource::Idx {
                images,
                labels,
                options,
            } => options.apply(io::load_idx(images, labels)?, seed)?,
        })
    }
}
