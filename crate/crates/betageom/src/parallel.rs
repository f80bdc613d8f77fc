//! Chunk-parallel simulation.
//!
//! Chunks run on a rayon pool and their tallies are merged in chunk
//! order, which reproduces the sequential estimators bit for bit.

use std::collections::BTreeMap;

use rayon::prelude::*;

use betageom_core::cone::ConeSpec;
use betageom_core::montecarlo::{chunks, cone_chunk, polytope_chunk, ConePlan, Estimate, PolyPlan, RngSpec, Tally};
use betageom_core::polytope::PolySpec;

use crate::error::{usage, CliResult};

/// Runs `chunk` over every chunk of `samples` replications on `jobs` threads.
pub fn run_chunked<F>(base: RngSpec, samples: u64, jobs: Option<usize>, chunk: F) -> CliResult<BTreeMap<String, Estimate>>
where
    F: Fn(RngSpec, u64) -> betageom_core::Result<Tally> + Sync,
{
    if samples == 0 {
        return Err(usage("at least one replication is needed"));
    }
    let layout: Vec<(RngSpec, u64)> = chunks(base, samples).collect();
    let work = || layout.par_iter().map(|(rng, size)| chunk(*rng, *size)).collect::<Vec<_>>();
    let parts = match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map_err(|e| usage(format!("cannot start {j} worker threads: {e}")))?
            .install(work),
        None => work(),
    };
    let mut total = Tally::default();
    for part in parts {
        total.merge(&part?);
    }
    Ok(total.estimates(base))
}

pub fn cone_statistics(
    spec: &ConeSpec,
    plan: &ConePlan,
    base: RngSpec,
    samples: u64,
    jobs: Option<usize>,
) -> CliResult<BTreeMap<String, Estimate>> {
    run_chunked(base, samples, jobs, |r, s| cone_chunk(spec, plan, r, s))
}

pub fn polytope_statistics(
    spec: &PolySpec,
    plan: &PolyPlan,
    base: RngSpec,
    samples: u64,
    jobs: Option<usize>,
) -> CliResult<BTreeMap<String, Estimate>> {
    run_chunked(base, samples, jobs, |r, s| polytope_chunk(spec, plan, r, s))
}
