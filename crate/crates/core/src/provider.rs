//! Count sources shared by the identity checks.
//!
//! Several checks need the same word and permutation tables. They ask a
//! [`CountProvider`] instead of enumerating directly, so a provider can
//! memoize, read tables from disk, or compute blocks in parallel.

use alloc::collections::BTreeMap;
use alloc::string::String;

use num_bigint::BigUint;

use crate::automaton::AutomatonGraph;
use crate::enumerate::{self, table_key, CountTable, Domain, EnumConfig};
use crate::error::{Error, Result};
use crate::transfer::count_avoiders;
use crate::word::{Pattern, PatternSet};

pub trait CountProvider {
    /// Occurrence distribution over `[k]^n`, at least up to `max_r`.
    fn word_table(&mut self, set: &PatternSet, k: u32, n: u32, max_r: Option<u64>) -> Result<CountTable>;

    /// Occurrence distribution over the permutations of `[n]`.
    fn perm_table(&mut self, set: &PatternSet, n: u32, max_r: Option<u64>) -> Result<CountTable>;

    /// Occurrence distribution over words of `[k]^n` using every letter.
    fn surjective_table(&mut self, set: &PatternSet, k: u32, n: u32, max_r: Option<u64>) -> Result<CountTable>;

    /// `f_0([k]^n)` for one pattern; transfer-matrix by default.
    fn avoiders(&mut self, v: &Pattern, k: u32, n: u32) -> Result<BigUint> {
        if k == 0 {
            return Ok(BigUint::from(u32::from(n == 0)));
        }
        let g = AutomatonGraph::build(v, k)?;
        Ok(count_avoiders(&g, n as usize))
    }

    fn word_count(&mut self, set: &PatternSet, k: u32, n: u32, r: u64) -> Result<BigUint> {
        Ok(self.word_table(set, k, n, Some(r))?.get(r))
    }

    fn perm_count(&mut self, set: &PatternSet, n: u32, r: u64) -> Result<BigUint> {
        Ok(self.perm_table(set, n, Some(r))?.get(r))
    }
}

/// Memo key: the untruncated table key.
fn base_key(set: &PatternSet, domain: Domain, n: u32) -> String {
    table_key(set, domain, n, None)
}

/// True when `have` answers a request truncated at `want`.
pub fn covers_request(have: &CountTable, want: Option<u64>) -> bool {
    match want {
        None => have.max_r.is_none(),
        Some(r) => have.covers(r),
    }
}

fn lookup(tables: &BTreeMap<String, CountTable>, set: &PatternSet, domain: Domain, n: u32, max_r: Option<u64>) -> Option<CountTable> {
    tables
        .get(&base_key(set, domain, n))
        .filter(|t| covers_request(t, max_r))
        .cloned()
}

/// Keeps whichever table covers more occurrence counts.
fn remember(tables: &mut BTreeMap<String, CountTable>, t: CountTable) {
    let key = base_key(&t.patterns, t.domain, t.n);
    let wider = match tables.get(&key) {
        Some(old) => covers_request(&t, old.max_r),
        None => true,
    };
    if wider {
        tables.insert(key, t);
    }
}

/// Sequential enumeration with an in-memory memo.
#[derive(Clone, Debug, Default)]
pub struct MemoProvider {
    pub config: EnumConfig,
    tables: BTreeMap<String, CountTable>,
}

impl MemoProvider {
    pub fn new(config: EnumConfig) -> Self {
        MemoProvider {
            config,
            tables: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.tables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tables.is_empty()
    }

    fn memo(
        &mut self,
        set: &PatternSet,
        domain: Domain,
        n: u32,
        max_r: Option<u64>,
        compute: impl FnOnce(&EnumConfig) -> Result<CountTable>,
    ) -> Result<CountTable> {
        if let Some(t) = lookup(&self.tables, set, domain, n, max_r) {
            return Ok(t);
        }
        let t = compute(&self.config)?;
        remember(&mut self.tables, t.clone());
        Ok(t)
    }
}

impl CountProvider for MemoProvider {
    fn word_table(&mut self, set: &PatternSet, k: u32, n: u32, max_r: Option<u64>) -> Result<CountTable> {
        self.memo(set, Domain::Words { k }, n, max_r, |cfg| {
            enumerate::count_words(set, k, n, max_r, cfg)
        })
    }

    fn perm_table(&mut self, set: &PatternSet, n: u32, max_r: Option<u64>) -> Result<CountTable> {
        self.memo(set, Domain::Perms, n, max_r, |cfg| enumerate::count_perms(set, n, max_r, cfg))
    }

    fn surjective_table(&mut self, set: &PatternSet, k: u32, n: u32, max_r: Option<u64>) -> Result<CountTable> {
        self.memo(set, Domain::Surjective { k }, n, max_r, |cfg| {
            enumerate::count_surjective(set, k, n, max_r, cfg)
        })
    }
}

/// A fixed collection of precomputed tables; anything else is a
/// [`Error::MissingCount`].
#[derive(Clone, Debug, Default)]
pub struct TableStore {
    tables: BTreeMap<String, CountTable>,
}

impl TableStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, table: CountTable) {
        remember(&mut self.tables, table);
    }

    fn get(&self, set: &PatternSet, domain: Domain, n: u32, max_r: Option<u64>) -> Result<CountTable> {
        lookup(&self.tables, set, domain, n, max_r)
            .ok_or_else(|| Error::MissingCount(table_key(set, domain, n, max_r)))
    }
}

impl CountProvider for TableStore {
    fn word_table(&mut self, set: &PatternSet, k: u32, n: u32, max_r: Option<u64>) -> Result<CountTable> {
        self.get(set, Domain::Words { k }, n, max_r)
    }

    fn perm_table(&mut self, set: &PatternSet, n: u32, max_r: Option<u64>) -> Result<CountTable> {
        self.get(set, Domain::Perms, n, max_r)
    }

    fn surjective_table(&mut self, set: &PatternSet, k: u32, n: u32, max_r: Option<u64>) -> Result<CountTable> {
        self.get(set, Domain::Surjective { k }, n, max_r)
    }

    fn avoiders(&mut self, v: &Pattern, k: u32, n: u32) -> Result<BigUint> {
        Ok(self.word_table(&v.clone().into(), k, n, Some(0))?.f0())
    }
}
