//! Seed restarts spread over threads.

use std::num::NonZeroUsize;
use std::thread;

use specgap_core::{lloyd, ClusteringResult, Embedding, LloydConfig, Result};

/// Environment variable capping the worker count.
pub const THREADS_VAR: &str = "SPECGAP_THREADS";

/// Worker count: `SPECGAP_THREADS` when set, else the available parallelism.
pub fn thread_limit() -> anyhow::Result<usize> {
    match std::env::var(THREADS_VAR) {
        Ok(v) => {
            let n: NonZeroUsize = v
                .trim()
                .parse()
                .map_err(|_| anyhow::anyhow!("{THREADS_VAR} must be a positive integer, got `{v}`"))?;
            Ok(n.get())
        }
        Err(_) => Ok(thread::available_parallelism().map_or(1, NonZeroUsize::get)),
    }
}

/// Same result as [`specgap_core::best_of`] for any `threads`: runs are
/// reduced in seed order, keeping the first strict minimum.
pub fn best_of_parallel(
    e: &Embedding,
    k: usize,
    seeds: &[u64],
    config: &LloydConfig,
    threads: usize,
) -> Result<ClusteringResult> {
    if seeds.is_empty() {
        return Err(specgap_core::Error::InvalidParameter("empty seed list".into()));
    }
    let chunk = seeds.len().div_ceil(threads.max(1));
    let runs: Vec<Result<ClusteringResult>> = thread::scope(|s| {
        let handles: Vec<_> = seeds
            .chunks(chunk)
            .map(|part| s.spawn(move || part.iter().map(|&seed| lloyd(e, k, seed, config)).collect::<Vec<_>>()))
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("lloyd worker panicked"))
            .collect()
    });
    let mut best: Option<ClusteringResult> = None;
    for run in runs {
        let run = run?;
        if best.as_ref().is_none_or(|b| run.cost < b.cost) {
            best = Some(run);
        }
    }
    Ok(best.expect("seed list is nonempty"))
}
