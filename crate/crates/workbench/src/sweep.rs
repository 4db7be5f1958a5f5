//! Epsilon sweep: final validation accuracy of BerLU networks across a grid
//! of transition half-widths, each over several seeds.

use std::io::Write;

use berlu_core::trainer::{init_net, train};
use berlu_core::{ActivationSpec, TrainConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::datasets::DatasetSource;
use crate::error::{Error, Result};
use crate::io::num;

pub const CSV_HEADER: &str = "epsilon,mean_acc,std_acc";
pub const DEFAULT_EPSILONS: [f64; 9] = [1e-4, 1e-3, 1e-2, 1e-1, 0.2, 0.5, 1.0, 5.0, 10.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub epsilons: Vec<f64>,
    /// Initial slope for every hidden layer.
    pub alpha: f64,
    pub seeds: usize,
    /// Run `k` uses seed `base_seed + k` for initialization and shuffling.
    pub base_seed: u64,
    pub hidden: Vec<usize>,
    pub dataset: DatasetSource,
    pub train: TrainConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            epsilons: DEFAULT_EPSILONS.to_vec(),
            alpha: berlu_core::activations::DEFAULT_ALPHA,
            seeds: 3,
            base_seed: 0,
            hidden: vec![32, 32],
            dataset: DatasetSource::default(),
            train: TrainConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub mean_acc: f64,
    /// Sample standard deviation over seeds; zero for a single seed.
    pub std_acc: f64,
    pub accs: Vec<f64>,
}

/// Runs every `(epsilon, seed)` pair in parallel. The dataset is drawn once
/// from `base_seed`, so runs differ only in initialization and batch order.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    if cfg.epsilons.is_empty() || cfg.seeds == 0 {
        return Err(Error::Usage(
            "sweep needs at least one epsilon and one seed".into(),
        ));
    }
    cfg.train.validate()?;
    let specs = cfg
        .epsilons
        .iter()
        .map(|&eps| {
            Ok(ActivationSpec::BerLU(
                berlu_core::BerLUParams::with_any_alpha(cfg.alpha, eps)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let ds = cfg.dataset.load(cfg.base_seed)?;
    let mut dims = vec![ds.dim()];
    dims.extend(&cfg.hidden);
    dims.push(ds.classes);

    let jobs: Vec<(usize, u64)> = (0..specs.len())
        .flat_map(|e| (0..cfg.seeds as u64).map(move |k| (e, k)))
        .collect();
    let accs = jobs
        .par_iter()
        .map(|&(e, k)| {
            let seed = cfg.base_seed.wrapping_add(k);
            let net = init_net(&dims, specs[e], seed)?;
            let (_, report) = train(net, &ds, &TrainConfig { seed, ..cfg.train })?;
            Ok(report.final_metrics().map_or(0.0, |m| m.val_acc))
        })
        .collect::<Result<Vec<f64>>>()?;

    Ok(cfg
        .epsilons
        .iter()
        .zip(accs.chunks(cfg.seeds))
        .map(|(&epsilon, accs)| {
            let (mean_acc, std_acc) = mean_std(accs);
            SweepRow {
                epsilon,
                mean_acc,
                std_acc,
                accs: accs.to_vec(),
            }
        })
        .collect())
}

fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn write_csv(rows: &[SweepRow], out: &mut dyn Write) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{}",
            num(r.epsilon),
            num(r.mean_acc),
            num(r.std_acc)
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_sample_std() {
        let (m, s) = mean_std(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert_eq!(s, 1.0);
        assert_eq!(mean_std(&[0.5]), (0.5, 0.0));
    }

    #[test]
    fn small_sweep_is_deterministic() {
        let cfg = SweepConfig {
            epsilons: vec![0.01, 1.0],
            seeds: 2,
            hidden: vec![8],
            dataset: DatasetSource::Moons { n: 100, noise: 0.1 },
            train: TrainConfig {
                epochs: 3,
                warmup_epochs: 1,
                ..TrainConfig::default()
            },
            ..SweepConfig::default()
        };
        let a = run_sweep(&cfg).unwrap();
        let b = run_sweep(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
        assert!(a
            .iter()
            .all(|r| r.accs.len() == 2 && (0.0..=1.0).contains(&r.mean_acc)));
    }

    #[test]
    fn config_rejects_unknown_fields() {
        assert!(serde_json::from_str::<SweepConfig>(r#"{"seeds": 2, "bogus": 1}"#).is_err());
        let cfg: SweepConfig = serde_json::from_str(
            r#"{"seeds": 2, "dataset": {"kind": "moons", "n": 50, "noise": 0.1}}"#,
        )
        .unwrap();
        assert_eq!(cfg.seeds, 2);
        assert_eq!(cfg.epsilons.len(), 9);
    }
}
