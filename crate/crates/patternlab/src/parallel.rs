//! Multi-threaded, disk-cached count provider and simulation driver.

use std::collections::BTreeMap;

use patternlab_core::enumerate::{
    check_perm_cap, check_word_budget, count_perms_with_prefix, count_surjective_with_prefix,
    count_words_with_prefix, table_key,
};
use patternlab_core::provider::covers_request;
use patternlab_core::transfer::{chunk_count, simulate_chunk};
use patternlab_core::word::Letter;
use patternlab_core::{AutomatonGraph, CountProvider, CountTable, Domain, EnumConfig, PatternSet, SimulationResult};
use rayon::prelude::*;

use crate::cache::DiskCache;
use crate::error::{CliError, Result};
use crate::format::TableDoc;

/// Prefixes of length `min(n, 2)` splitting the space into blocks.
fn blocks(domain: Domain, n: u32) -> Vec<Vec<Letter>> {
    let (alphabet, distinct) = match domain {
        Domain::Words { k } | Domain::Surjective { k } => (k, false),
        Domain::Perms => (n, true),
    };
    let mut out = vec![Vec::new()];
    for _ in 0..n.min(2) {
        let mut longer = Vec::new();
        for p in &out {
            for x in 1..=alphabet {
                if distinct && p.contains(&x) {
                    continue;
                }
                let mut q: Vec<Letter> = p.clone();
                q.push(x);
                longer.push(q);
            }
        }
        out = longer;
    }
    out
}

pub struct ParallelProvider {
    pool: rayon::ThreadPool,
    pub config: EnumConfig,
    cache: Option<DiskCache>,
    memo: BTreeMap<String, CountTable>,
    pending: Option<CliError>,
}

impl ParallelProvider {
    /// `threads = None` uses one worker per core.
    pub fn new(threads: Option<usize>, config: EnumConfig, cache: Option<DiskCache>) -> Result<Self> {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(t) = threads {
            if t == 0 {
                return Err(CliError::Usage("--threads must be at least 1".into()));
            }
            builder = builder.num_threads(t);
        }
        let pool = builder
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
        Ok(ParallelProvider {
            pool,
            config,
            cache,
            memo: BTreeMap::new(),
            pending: None,
        })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }

    /// Runs `f` on this provider's workers.
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> R {
        self.pool.install(f)
    }

    /// A table, from memory, from disk, or freshly enumerated (in that order).
    pub fn table(&mut self, set: &PatternSet, domain: Domain, n: u32, max_r: Option<u64>) -> Result<CountTable> {
        let base = table_key(set, domain, n, None);
        if let Some(t) = self.memo.get(&base).filter(|t| covers_request(t, max_r)) {
            return Ok(t.clone());
        }
        if let Some(cache) = &self.cache {
            let mut keys = vec![base.clone()];
            if max_r.is_some() {
                keys.push(table_key(set, domain, n, max_r));
            }
            for key in &keys {
                if let Some(doc) = cache.get::<TableDoc>(key)? {
                    let t = doc.to_table()?;
                    self.memo.insert(base, t.clone());
                    return Ok(t);
                }
            }
        }
        let t = self.compute(set, domain, n, max_r)?;
        if let Some(cache) = &self.cache {
            cache.put(&t.key(), &TableDoc::from(&t))?;
        }
        self.memo.insert(base, t.clone());
        Ok(t)
    }

    fn compute(&self, set: &PatternSet, domain: Domain, n: u32, max_r: Option<u64>) -> Result<CountTable> {
        match domain {
            Domain::Words { k } | Domain::Surjective { k } => check_word_budget(k, n, &self.config)?,
            Domain::Perms => check_perm_cap(n, &self.config)?,
        }
        let parts: Vec<CountTable> = self.pool.install(|| {
            blocks(domain, n)
                .par_iter()
                .map(|prefix| match domain {
                    Domain::Words { k } => count_words_with_prefix(set, k, n, prefix, max_r),
                    Domain::Surjective { k } => count_surjective_with_prefix(set, k, n, prefix, max_r),
                    Domain::Perms => count_perms_with_prefix(set, n, prefix, max_r),
                })
                .collect()
        });
        let mut table = CountTable::new(set.clone(), domain, n, max_r);
        for part in &parts {
            table.merge(part);
        }
        Ok(table)
    }

    /// Same result as the sequential simulator for every thread count.
    pub fn simulate(&self, g: &AutomatonGraph, n: usize, trials: u64, seed: u64) -> Result<SimulationResult> {
        if trials == 0 {
            return Err(CliError::Usage("--trials must be at least 1".into()));
        }
        let hits = self.pool.install(|| {
            (0..chunk_count(trials))
                .into_par_iter()
                .map(|c| simulate_chunk(g, n, trials, seed, c))
                .sum()
        });
        Ok(SimulationResult::from_hits(trials, hits, seed))
    }
}

/// Core errors pass through; cache and IO failures become
/// [`patternlab_core::Error::MissingCount`] so identity checks can report
/// them, and are re-raised by [`ParallelProvider::take_error`].
impl CountProvider for ParallelProvider {
    fn word_table(&mut self, set: &PatternSet, k: u32, n: u32, max_r: Option<u64>) -> patternlab_core::Result<CountTable> {
        self.core_table(set, Domain::Words { k }, n, max_r)
    }

    fn perm_table(&mut self, set: &PatternSet, n: u32, max_r: Option<u64>) -> patternlab_core::Result<CountTable> {
        self.core_table(set, Domain::Perms, n, max_r)
    }

    fn surjective_table(&mut self, set: &PatternSet, k: u32, n: u32, max_r: Option<u64>) -> patternlab_core::Result<CountTable> {
        self.core_table(set, Domain::Surjective { k }, n, max_r)
    }
}

impl ParallelProvider {
    fn core_table(&mut self, set: &PatternSet, domain: Domain, n: u32, max_r: Option<u64>) -> patternlab_core::Result<CountTable> {
        match self.table(set, domain, n, max_r) {
            Ok(t) => Ok(t),
            Err(CliError::Count(e)) => Err(e),
            Err(other) => {
                let msg = other.to_string();
                self.pending.get_or_insert(other);
                Err(patternlab_core::Error::MissingCount(msg))
            }
        }
    }

    /// The first cache or IO failure hidden behind a missing count.
    pub fn take_error(&mut self) -> Option<CliError> {
        self.pending.take()
    }

    /// Converts an error from the provider interface back into the failure
    /// that caused it.
    pub fn fatal(&mut self, e: patternlab_core::Error) -> CliError {
        self.take_error().unwrap_or(CliError::Count(e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use patternlab_core::enumerate::{count_perms, count_surjective, count_words};
    use patternlab_core::transfer::simulate;

    #[test]
    fn block_shapes() {
        assert_eq!(blocks(Domain::Words { k: 3 }, 0), vec![Vec::<Letter>::new()]);
        assert_eq!(blocks(Domain::Words { k: 3 }, 1).len(), 3);
        assert_eq!(blocks(Domain::Words { k: 3 }, 5).len(), 9);
        assert_eq!(blocks(Domain::Perms, 4).len(), 12);
    }

    #[test]
    fn matches_sequential() {
        let cfg = EnumConfig::default();
        let mut p = ParallelProvider::new(Some(3), cfg, None).unwrap();
        for s in ["123", "12;21", "1221"] {
            let set: PatternSet = s.parse().unwrap();
            for n in 0..=6 {
                assert_eq!(p.word_table(&set, 3, n, None).unwrap(), count_words(&set, 3, n, None, &cfg).unwrap());
                assert_eq!(
                    p.surjective_table(&set, 3, n, Some(1)).unwrap(),
                    count_surjective(&set, 3, n, Some(1), &cfg).unwrap()
                );
                assert_eq!(p.perm_table(&set, n, None).unwrap(), count_perms(&set, n, None, &cfg).unwrap());
            }
        }
    }

    #[test]
    fn simulation_ignores_thread_count() {
        let g = AutomatonGraph::build(&"123".parse().unwrap(), 4).unwrap();
        let seq = simulate(&g, 10, 10_000, 7).unwrap();
        for t in [1, 2, 5] {
            let p = ParallelProvider::new(Some(t), EnumConfig::default(), None).unwrap();
            assert_eq!(p.simulate(&g, 10, 10_000, 7).unwrap(), seq);
        }
    }

    #[test]
    fn cache_is_used() {
        let dir = tempfile::tempdir().unwrap();
        let cache = DiskCache::open(dir.path()).unwrap();
        let set: PatternSet = "132".parse().unwrap();
        let mut p = ParallelProvider::new(Some(2), EnumConfig::default(), Some(cache.clone())).unwrap();
        let fresh = p.word_table(&set, 3, 5, None).unwrap();
        let key = fresh.key();
        assert!(cache.path_for(&key).exists());
        let mut q = ParallelProvider::new(Some(1), EnumConfig { word_budget: 1, ..EnumConfig::default() }, Some(cache)).unwrap();
        // the budget would reject a recomputation
        assert_eq!(q.word_table(&set, 3, 5, Some(0)).unwrap(), fresh);
    }
}
