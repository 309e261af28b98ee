//! Shards of a Monte Carlo run on OS threads.
//!
//! The result is bit-identical to [`steiner_core::gaussmc::estimate`] with the
//! same configuration: shards are the same and are merged in worker order.

use std::thread;

use steiner_core::gaussmc::{
    combine, run_shard, tsirelson_mc as tsirelson_single, McConfig, McEstimate, McKernel, ShardStats, TsirelsonKernel,
    TubeKernel, WillsKernel,
};
use steiner_core::Result;

pub fn estimate<K: McKernel>(kernel: &K, cfg: &McConfig) -> Result<McEstimate> {
    cfg.validate()?;
    let shards: Vec<ShardStats> = if cfg.workers == 1 {
        vec![run_shard(kernel, cfg, 0)]
    } else {
        thread::scope(|s| {
            let handles: Vec<_> = (0..cfg.workers)
                .map(|w| s.spawn(move || run_shard(kernel, cfg, w)))
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("sampling thread panicked"))
                .collect()
        })
    };
    Ok(kernel.finish(&combine(&shards), cfg))
}

pub fn tube_volume_mc(sides: &[f64], lambda: f64, cfg: &McConfig) -> Result<McEstimate> {
    estimate(&TubeKernel::new(sides, lambda)?, cfg)
}

pub fn wills_mc(sides: &[f64], proposal_scale: Option<f64>, cfg: &McConfig) -> Result<McEstimate> {
    estimate(&WillsKernel::new(sides, proposal_scale)?, cfg)
}

pub fn tsirelson_mc(sides: &[f64], lambda: f64, cfg: &McConfig) -> Result<McEstimate> {
    if lambda == 0.0 {
        return tsirelson_single(sides, lambda, cfg);
    }
    estimate(&TsirelsonKernel::new(sides, lambda)?, cfg)
}
