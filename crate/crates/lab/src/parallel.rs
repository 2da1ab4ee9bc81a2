//! Seeded fan-out over sample indices.
//!
//! Sample `i` always draws from substream `i` of its seed, and work is cut
//! into fixed batches of indices, so results do not depend on the number of
//! workers. Batch results are merged in index order.

use anyhow::{anyhow, Result};
use rayon::prelude::*;

use randset_core::measure::{discretize, CellPattern, EmpiricalLaw};
use randset_core::random_sets::SetSampler;
use randset_core::rng::stream;

pub const BATCH: u64 = 1024;

pub struct Pool {
    pool: rayon::ThreadPool,
}

impl Pool {
    pub fn new(workers: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| anyhow!("thread pool: {e}"))?;
        Ok(Pool { pool })
    }

    /// `f` over the batches covering `lo..hi`, results in batch order.
    pub fn batches<T: Send>(&self, lo: u64, hi: u64, f: impl Fn(u64, u64) -> Result<T> + Sync) -> Result<Vec<T>> {
        let starts: Vec<u64> = (lo..hi).step_by(BATCH as usize).collect();
        self.pool.install(|| starts.par_iter().map(|&s| f(s, (s + BATCH).min(hi))).collect())
    }

    /// Law of `pattern(i)` over `i in 0..count`.
    pub fn law(&self, n: usize, t: f64, count: u64, pattern: impl Fn(u64) -> Result<CellPattern> + Sync) -> Result<EmpiricalLaw> {
        let parts = self.batches(0, count, |lo, hi| {
            let mut law = EmpiricalLaw::new(n, t)?;
            for i in lo..hi {
                law.add(pattern(i)?)?;
            }
            Ok(law)
        })?;
        let mut out = EmpiricalLaw::new(n, t)?;
        for p in &parts {
            out.merge(p)?;
        }
        Ok(out)
    }

    /// Law of `count` samples of `sampler`, sample `i` on substream `i` of `seed`.
    pub fn sampler_law(&self, sampler: &dyn SetSampler, n: usize, count: u64, seed: u64) -> Result<EmpiricalLaw> {
        self.law(n, sampler.horizon(), count, |i| {
            Ok(discretize(&sampler.sample_with(&mut stream(seed, i))?, n)?)
        })
    }

    /// Number of `i in 0..count` with `pred(i)`.
    pub fn count(&self, count: u64, pred: impl Fn(u64) -> Result<bool> + Sync) -> Result<u64> {
        let parts = self.batches(0, count, |lo, hi| {
            let mut k = 0u64;
            for i in lo..hi {
                k += pred(i)? as u64;
            }
            Ok(k)
        })?;
        Ok(parts.iter().sum())
    }

    /// `f(i)` for `i in 0..count`, in index order.
    pub fn map<T: Send>(&self, count: u64, f: impl Fn(u64) -> Result<T> + Sync) -> Result<Vec<T>> {
        let parts = self.batches(0, count, |lo, hi| (lo..hi).map(&f).collect::<Result<Vec<T>>>())?;
        Ok(parts.into_iter().flatten().collect())
    }

    /// Samples in index order until `target` of them are nonempty; returns
    /// their law (empty samples included) and the number of samples drawn.
    pub fn law_until_nonempty(
        &self,
        sampler: &dyn SetSampler,
        n: usize,
        target: u64,
        seed: u64,
        max_samples: u64,
    ) -> Result<(EmpiricalLaw, u64)> {
        let mut law = EmpiricalLaw::new(n, sampler.horizon())?;
        let mut nonempty = 0u64;
        let mut next = 0u64;
        let round = BATCH * self.pool.current_num_threads() as u64;
        while nonempty < target {
            if next >= max_samples {
                return Err(anyhow!("only {nonempty} nonempty samples in {max_samples} draws"));
            }
            let hi = (next + round).min(max_samples);
            let parts = self.batches(next, hi, |lo, hi| {
                (lo..hi)
                    .map(|i| Ok(discretize(&sampler.sample_with(&mut stream(seed, i))?, n)?))
                    .collect::<Result<Vec<CellPattern>>>()
            })?;
            for p in parts.into_iter().flatten() {
                next += 1;
                if !p.is_empty() {
                    nonempty += 1;
                }
                law.add(p)?;
                if nonempty == target {
                    break;
                }
            }
        }
        Ok((law, next))
    }
}
