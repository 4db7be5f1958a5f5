//! Throughput benchmark for the vectorised forward and derivative kernels.

use std::hint::black_box;
use std::io::Write;
use std::time::Instant;

use berlu_core::ActivationSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::io::num;

/// Smaller buffers fit in cache and overstate throughput.
pub const MIN_BUFFER_LEN: usize = 1_000_000;
pub const MIN_REPS: usize = 10;
pub const WARMUP_REPS: usize = 3;
pub const CSV_HEADER: &str =
    "activation,buffer_len,forward_ns_per_elem,backward_ns_per_elem,bytes_touched,checksum";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchResult {
    pub spec: ActivationSpec,
    pub buffer_len: usize,
    pub reps: usize,
    /// Median over timed reps.
    pub forward_ns_per_elem: f64,
    pub backward_ns_per_elem: f64,
    /// Input read plus forward and derivative writes, one pass each.
    pub bytes_touched: usize,
    /// Sum of forward outputs plus sum of derivatives; keeps the kernels live.
    pub checksum: f64,
    pub forward_raw_ns: Vec<f64>,
    pub backward_raw_ns: Vec<f64>,
}

pub fn bench_activation(
    spec: &ActivationSpec,
    buffer_len: usize,
    reps: usize,
    seed: u64,
) -> Result<BenchResult> {
    Ok(bench_suite(std::slice::from_ref(spec), buffer_len, reps, seed)?.remove(0))
}

/// Benchmarks every spec on one shared input. Specs are interleaved within
/// each rep so that thermal or frequency drift spreads evenly across them.
pub fn bench_suite(
    specs: &[ActivationSpec],
    buffer_len: usize,
    reps: usize,
    seed: u64,
) -> Result<Vec<BenchResult>> {
    if buffer_len < MIN_BUFFER_LEN {
        return Err(Error::Usage(format!(
            "buffer_len must be >= {MIN_BUFFER_LEN}, got {buffer_len}"
        )));
    }
    if reps < MIN_REPS {
        return Err(Error::Usage(format!(
            "reps must be >= {MIN_REPS}, got {reps}"
        )));
    }
    for spec in specs {
        spec.validate()?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<f64> = (0..buffer_len)
        .map(|_| rng.random_range(-3.0..3.0))
        .collect();
    let mut fwd = vec![0.0; buffer_len];
    let mut bwd = vec![0.0; buffer_len];

    let mut fwd_ns = vec![Vec::with_capacity(reps); specs.len()];
    let mut bwd_ns = vec![Vec::with_capacity(reps); specs.len()];
    let mut checksums = vec![0.0; specs.len()];
    for rep in 0..WARMUP_REPS + reps {
        for (k, spec) in specs.iter().enumerate() {
            let t = Instant::now();
            spec.forward_into(black_box(&xs), black_box(&mut fwd));
            let f = t.elapsed().as_nanos() as f64;
            let t = Instant::now();
            spec.dx_into(black_box(&xs), black_box(&mut bwd));
            let b = t.elapsed().as_nanos() as f64;
            if rep >= WARMUP_REPS {
                fwd_ns[k].push(f);
                bwd_ns[k].push(b);
            }
            if rep + 1 == WARMUP_REPS + reps {
                checksums[k] = fwd.iter().sum::<f64>() + bwd.iter().sum::<f64>();
            }
        }
    }

    let n = buffer_len as f64;
    Ok(specs
        .iter()
        .enumerate()
        .map(|(k, spec)| BenchResult {
            spec: *spec,
            buffer_len,
            reps,
            forward_ns_per_elem: median(&fwd_ns[k]) / n,
            backward_ns_per_elem: median(&bwd_ns[k]) / n,
            bytes_touched: 3 * buffer_len * std::mem::size_of::<f64>(),
            checksum: checksums[k],
            forward_raw_ns: std::mem::take(&mut fwd_ns[k]),
            backward_raw_ns: std::mem::take(&mut bwd_ns[k]),
        })
        .collect())
}

/// Median of a non-empty sample; the mean of the middle pair for even sizes.
pub fn median(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty(), "median of empty sample");
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

pub fn write_csv(results: &[BenchResult], out: &mut dyn Write) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in results {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.spec.name(),
            r.buffer_len,
            num(r.forward_ns_per_elem),
            num(r.backward_ns_per_elem),
            r.bytes_touched,
            num(r.checksum)
        )?;
    }
    Ok(())
}
