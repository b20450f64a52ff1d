//! Exhaustive enumeration: occurrence distributions over `[k]^n` and over
//! permutations, occurrence-subsequence histograms and Wilf comparisons.
//!
//! Words are generated depth first in lexicographic order, carrying an
//! [`OccurrenceScanner`](crate::word::OccurrenceScanner) per pattern so each
//! prefix is scanned once. The `*_with_prefix` functions count one block of
//! the space (all words sharing a prefix); callers that want parallelism
//! split on the first letter and [`CountTable::merge`] the blocks.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::automaton::AutomatonGraph;
use crate::combinat::{factorial, pow_u128};
use crate::error::{Error, Result};
use crate::transfer::avoider_counts;
use crate::word::{occurrence_subsequence, Letter, Pattern, PatternSet, SetScanner, Word};

pub const DEFAULT_WORD_BUDGET: u64 = 100_000_000;
pub const DEFAULT_PERM_CAP: u32 = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EnumConfig {
    /// Largest `k^n` that may be enumerated.
    pub word_budget: u64,
    /// Largest permutation length that may be enumerated.
    pub perm_cap: u32,
    /// Live-state limit for automata built along the way.
    pub state_limit: usize,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig {
            word_budget: DEFAULT_WORD_BUDGET,
            perm_cap: DEFAULT_PERM_CAP,
            state_limit: crate::automaton::DEFAULT_STATE_LIMIT,
        }
    }
}

/// The space a table was counted over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Domain {
    /// `[k]^n`.
    Words { k: u32 },
    /// Words of `[k]^n` using every letter of `[k]`.
    Surjective { k: u32 },
    /// Permutations of `[n]`.
    Perms,
}

/// Number of words with exactly `r` occurrences, for every `r` seen.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable {
    pub patterns: PatternSet,
    pub domain: Domain,
    pub n: u32,
    values: BTreeMap<u64, BigUint>,
    /// When set, words with more than this many occurrences were pruned
    /// and are missing from the table.
    pub max_r: Option<u64>,
}

impl CountTable {
    pub fn new(patterns: PatternSet, domain: Domain, n: u32, max_r: Option<u64>) -> Self {
        CountTable {
            patterns,
            domain,
            n,
            values: BTreeMap::new(),
            max_r,
        }
    }

    pub fn from_values(
        patterns: PatternSet,
        domain: Domain,
        n: u32,
        max_r: Option<u64>,
        values: BTreeMap<u64, BigUint>,
    ) -> Self {
        CountTable {
            patterns,
            domain,
            n,
            values,
            max_r,
        }
    }

    /// `f_r`. Asking past a truncation is a caller bug and panics.
    pub fn get(&self, r: u64) -> BigUint {
        if let Some(m) = self.max_r {
            assert!(r <= m, "table truncated at r={m}, asked for r={r}");
        }
        self.values.get(&r).cloned().unwrap_or_default()
    }

    pub fn covers(&self, r: u64) -> bool {
        self.max_r.is_none_or(|m| r <= m)
    }

    pub fn f0(&self) -> BigUint {
        self.get(0)
    }

    /// Non-zero entries by `r`.
    pub fn values(&self) -> &BTreeMap<u64, BigUint> {
        &self.values
    }

    pub fn total(&self) -> BigUint {
        self.values.values().sum()
    }

    /// `k^n`, `n!` or the surjection count the totals must reach.
    pub fn space_size(&self) -> BigUint {
        match self.domain {
            Domain::Words { k } => crate::combinat::pow(k as u64, self.n as u64),
            Domain::Perms => factorial(self.n as u64),
            Domain::Surjective { k } => surjections(self.n as u64, k as u64),
        }
    }

    pub fn add(&mut self, r: u64, count: BigUint) {
        if count.is_zero() {
            return;
        }
        *self.values.entry(r).or_default() += count;
    }

    /// Adds another block of the same space.
    pub fn merge(&mut self, other: &CountTable) {
        debug_assert_eq!((self.domain, self.n), (other.domain, other.n));
        for (&r, c) in &other.values {
            *self.values.entry(r).or_default() += c;
        }
    }

    /// Cache/display key: patterns, domain and length.
    pub fn key(&self) -> String {
        table_key(&self.patterns, self.domain, self.n, self.max_r)
    }
}

pub fn table_key(patterns: &PatternSet, domain: Domain, n: u32, max_r: Option<u64>) -> String {
    let dom = match domain {
        Domain::Words { k } => alloc::format!("words-k{k}"),
        Domain::Surjective { k } => alloc::format!("surj-k{k}"),
        Domain::Perms => String::from("perms"),
    };
    let trunc = match max_r {
        Some(m) => alloc::format!("-r{m}"),
        None => String::new(),
    };
    alloc::format!("{patterns}|{dom}|n{n}{trunc}")
}

/// Surjections from an `n`-set onto a `k`-set.
fn surjections(n: u64, k: u64) -> BigUint {
    use num_bigint::BigInt;
    let mut acc = BigInt::zero();
    for j in 0..=k {
        let term = BigInt::from(crate::combinat::binomial(k, j)) * BigInt::from(crate::combinat::pow(k - j, n));
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc.to_biguint().unwrap_or_default()
}

/// Rejects `k^n` above the budget.
pub fn check_word_budget(k: u32, n: u32, cfg: &EnumConfig) -> Result<()> {
    match pow_u128(k as u64, n) {
        Some(words) if words <= cfg.word_budget as u128 => Ok(()),
        words => Err(Error::WordBudget {
            words: words.unwrap_or(u128::MAX),
            budget: cfg.word_budget,
        }),
    }
}

pub fn check_perm_cap(n: u32, cfg: &EnumConfig) -> Result<()> {
    if n > cfg.perm_cap {
        return Err(Error::PermCap { n, cap: cfg.perm_cap });
    }
    Ok(())
}

/// Prefixes splitting `[k]^n` into first-letter blocks.
pub fn word_blocks(k: u32, n: u32) -> Vec<Vec<Letter>> {
    if n == 0 {
        return alloc::vec![Vec::new()];
    }
    (1..=k).map(|x| alloc::vec![x]).collect()
}

/// Prefixes splitting the permutations of `[n]` by first element.
pub fn perm_blocks(n: u32) -> Vec<Vec<Letter>> {
    word_blocks(n, n)
}

/// Called with each complete word and its occurrence count.
type LeafFn<'a> = &'a mut dyn FnMut(&[Letter], u64);

#[derive(Clone, Copy)]
enum Space {
    Words { k: u32 },
    Surjective { k: u32 },
    Perms,
}

struct Walk<'a> {
    space: Space,
    n: usize,
    max_r: Option<u64>,
    tally: BTreeMap<u64, u64>,
    letters: Vec<Letter>,
    used: Vec<bool>,
    leaf: Option<LeafFn<'a>>,
}

impl Walk<'_> {
    fn alphabet(&self) -> u32 {
        match self.space {
            Space::Words { k } | Space::Surjective { k } => k,
            Space::Perms => self.n as u32,
        }
    }

    fn allowed(&self, x: Letter) -> bool {
        match self.space {
            Space::Perms => !self.used[x as usize],
            _ => true,
        }
    }

    fn feasible(&self) -> bool {
        match self.space {
            Space::Surjective { k } => {
                let missing = (1..=k).filter(|&x| !self.used[x as usize]).count();
                missing <= self.n - self.letters.len()
            }
            _ => true,
        }
    }

    fn run(&mut self, scan: SetScanner<'_>) {
        let occ = scan.count();
        if self.max_r.is_some_and(|m| occ > m) || !self.feasible() {
            return;
        }
        if self.letters.len() == self.n {
            *self.tally.entry(occ).or_default() += 1;
            if let Some(f) = self.leaf.as_mut() {
                f(&self.letters, occ);
            }
            return;
        }
        for x in 1..=self.alphabet() {
            if !self.allowed(x) {
                continue;
            }
            let mut child = scan.clone();
            child.push(x);
            let was = self.used[x as usize];
            self.used[x as usize] = true;
            self.letters.push(x);
            self.run(child);
            self.letters.pop();
            self.used[x as usize] = was;
        }
    }
}

fn walk_block(
    set: &PatternSet,
    space: Space,
    n: u32,
    prefix: &[Letter],
    max_r: Option<u64>,
    leaf: Option<LeafFn<'_>>,
) -> BTreeMap<u64, u64> {
    let alphabet = match space {
        Space::Words { k } | Space::Surjective { k } => k,
        Space::Perms => n,
    };
    let mut walk = Walk {
        space,
        n: n as usize,
        max_r,
        tally: BTreeMap::new(),
        letters: Vec::with_capacity(n as usize),
        used: alloc::vec![false; alphabet as usize + 1],
        leaf,
    };
    let mut scan = SetScanner::new(set);
    for &x in prefix {
        if x == 0 || x > alphabet || !walk.allowed(x) || walk.letters.len() == n as usize {
            return BTreeMap::new();
        }
        scan.push(x);
        walk.used[x as usize] = true;
        walk.letters.push(x);
    }
    walk.run(scan);
    walk.tally
}

fn to_table(set: &PatternSet, domain: Domain, n: u32, max_r: Option<u64>, tally: BTreeMap<u64, u64>) -> CountTable {
    let values = tally.into_iter().map(|(r, c)| (r, BigUint::from(c))).collect();
    CountTable::from_values(set.clone(), domain, n, max_r, values)
}

/// One first-letter block of [`count_words`]; no budget check.
pub fn count_words_with_prefix(set: &PatternSet, k: u32, n: u32, prefix: &[Letter], max_r: Option<u64>) -> CountTable {
    let tally = walk_block(set, Space::Words { k }, n, prefix, max_r, None);
    to_table(set, Domain::Words { k }, n, max_r, tally)
}

/// Distribution of occurrences over `[k]^n`, truncated at `max_r` if given.
pub fn count_words(set: &PatternSet, k: u32, n: u32, max_r: Option<u64>, cfg: &EnumConfig) -> Result<CountTable> {
    check_word_budget(k, n, cfg)?;
    let mut table = CountTable::new(set.clone(), Domain::Words { k }, n, max_r);
    for block in word_blocks(k, n) {
        table.merge(&count_words_with_prefix(set, k, n, &block, max_r));
    }
    Ok(table)
}

/// `f_0([k]^n)` by depth-first generation, abandoning a prefix as soon as
/// the automaton absorbs it.
pub fn count_word_avoiders(v: &Pattern, k: u32, n: u32, cfg: &EnumConfig) -> Result<BigUint> {
    check_word_budget(k, n, cfg)?;
    let g = AutomatonGraph::build_with_limit(v, k, cfg.state_limit)?;
    fn dfs(g: &AutomatonGraph, state: usize, left: u32) -> u64 {
        if left == 0 {
            return 1;
        }
        g.successors(state)
            .iter()
            .filter(|&&t| t as usize != g.sink())
            .map(|&t| dfs(g, t as usize, left - 1))
            .sum()
    }
    Ok(dfs(&g, 0, n).into())
}

pub fn count_surjective_with_prefix(set: &PatternSet, k: u32, n: u32, prefix: &[Letter], max_r: Option<u64>) -> CountTable {
    let tally = walk_block(set, Space::Surjective { k }, n, prefix, max_r, None);
    to_table(set, Domain::Surjective { k }, n, max_r, tally)
}

/// Distribution over the words of `[k]^n` that use every letter.
pub fn count_surjective(set: &PatternSet, k: u32, n: u32, max_r: Option<u64>, cfg: &EnumConfig) -> Result<CountTable> {
    check_word_budget(k, n, cfg)?;
    let mut table = CountTable::new(set.clone(), Domain::Surjective { k }, n, max_r);
    for block in word_blocks(k, n) {
        table.merge(&count_surjective_with_prefix(set, k, n, &block, max_r));
    }
    Ok(table)
}

pub fn count_perms_with_prefix(set: &PatternSet, n: u32, prefix: &[Letter], max_r: Option<u64>) -> CountTable {
    let tally = walk_block(set, Space::Perms, n, prefix, max_r, None);
    to_table(set, Domain::Perms, n, max_r, tally)
}

/// Distribution of occurrences over the permutations of `[n]`.
pub fn count_perms(set: &PatternSet, n: u32, max_r: Option<u64>, cfg: &EnumConfig) -> Result<CountTable> {
    check_perm_cap(n, cfg)?;
    let mut table = CountTable::new(set.clone(), Domain::Perms, n, max_r);
    for block in perm_blocks(n) {
        table.merge(&count_perms_with_prefix(set, n, &block, max_r));
    }
    Ok(table)
}

/// `f_{r,s}([k]^n)` by occurrence-subsequence length `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubseqHistogram {
    pub pattern: Pattern,
    pub k: u32,
    pub n: u32,
    pub r: u64,
    pub values: BTreeMap<usize, BigUint>,
}

impl SubseqHistogram {
    pub fn get(&self, s: usize) -> BigUint {
        self.values.get(&s).cloned().unwrap_or_default()
    }

    pub fn total(&self) -> BigUint {
        self.values.values().sum()
    }
}

pub fn subseq_histogram(v: &Pattern, k: u32, n: u32, r: u64, cfg: &EnumConfig) -> Result<SubseqHistogram> {
    if r == 0 {
        return Err(Error::InvalidArgument("subsequence histogram needs r >= 1".into()));
    }
    check_word_budget(k, n, cfg)?;
    let set = PatternSet::from(v.clone());
    let mut values: BTreeMap<usize, u64> = BTreeMap::new();
    let mut record = |letters: &[Letter], occ: u64| {
        if occ == r {
            let w = Word::new(letters.to_vec()).expect("enumerated letters are positive");
            *values.entry(occurrence_subsequence(v, &w).len()).or_default() += 1;
        }
    };
    for block in word_blocks(k, n) {
        walk_block(&set, Space::Words { k }, n, &block, Some(r), Some(&mut record));
    }
    Ok(SubseqHistogram {
        pattern: v.clone(),
        k,
        n,
        r,
        values: values.into_iter().map(|(s, c)| (s, c.into())).collect(),
    })
}

/// A grid cell where two patterns have different avoider counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    /// `None` for permutations.
    pub k: Option<u32>,
    pub n: u32,
    pub left: BigUint,
    pub right: BigUint,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WilfVerdict {
    EqualOnGrid,
    Differ,
    /// No difference found, but some cells were out of budget.
    Partial,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WilfReport {
    pub left: Pattern,
    pub right: Pattern,
    pub cells_checked: usize,
    pub witness: Option<Witness>,
    /// `(k, n)` cells that could not be computed (`k = 0` for permutations).
    pub unexplored: Vec<(u32, u32)>,
}

impl WilfReport {
    pub fn verdict(&self) -> WilfVerdict {
        match (&self.witness, self.unexplored.is_empty()) {
            (Some(_), _) => WilfVerdict::Differ,
            (None, true) => WilfVerdict::EqualOnGrid,
            (None, false) => WilfVerdict::Partial,
        }
    }
}

/// Avoider counts for one `k` and `n = 0..=n_max`; `None` marks cells that
/// were neither reachable by the automaton nor within the word budget.
fn avoider_column(v: &Pattern, k: u32, n_max: u32, cfg: &EnumConfig) -> Vec<Option<BigUint>> {
    if let Ok(g) = AutomatonGraph::build_with_limit(v, k, cfg.state_limit) {
        return avoider_counts(&g, n_max as usize).into_iter().map(Some).collect();
    }
    let set = PatternSet::from(v.clone());
    (0..=n_max)
        .map(|n| count_words(&set, k, n, Some(0), cfg).ok().map(|t| t.f0()))
        .collect()
}

/// Searches `k = 1..=k_max`, `n = 0..=n_max` in lexicographic `(k, n)`
/// order for a cell where the avoider counts differ.
pub fn wilf_words_compare(v1: &Pattern, v2: &Pattern, k_max: u32, n_max: u32, cfg: &EnumConfig) -> WilfReport {
    let mut report = WilfReport {
        left: v1.clone(),
        right: v2.clone(),
        cells_checked: 0,
        witness: None,
        unexplored: Vec::new(),
    };
    for k in 1..=k_max {
        let a = avoider_column(v1, k, n_max, cfg);
        let b = avoider_column(v2, k, n_max, cfg);
        for (n, (x, y)) in a.into_iter().zip(b).enumerate() {
            match (x, y) {
                (Some(x), Some(y)) => {
                    report.cells_checked += 1;
                    if x != y {
                        report.witness = Some(Witness {
                            k: Some(k),
                            n: n as u32,
                            left: x,
                            right: y,
                        });
                        return report;
                    }
                }
                _ => report.unexplored.push((k, n as u32)),
            }
        }
    }
    report
}

/// Compares `f_0(S_n)` for `n = 1..=n_max`.
pub fn wilf_perms_compare(v1: &Pattern, v2: &Pattern, n_max: u32, cfg: &EnumConfig) -> WilfReport {
    let mut report = WilfReport {
        left: v1.clone(),
        right: v2.clone(),
        cells_checked: 0,
        witness: None,
        unexplored: Vec::new(),
    };
    let s1 = PatternSet::from(v1.clone());
    let s2 = PatternSet::from(v2.clone());
    for n in 1..=n_max {
        let a = count_perms(&s1, n, Some(0), cfg);
        let b = count_perms(&s2, n, Some(0), cfg);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                report.cells_checked += 1;
                if a.f0() != b.f0() {
                    report.witness = Some(Witness {
                        k: None,
                        n,
                        left: a.f0(),
                        right: b.f0(),
                    });
                    return report;
                }
            }
            _ => report.unexplored.push((0, n)),
        }
    }
    report
}

/// Largest `r` a table can hold: `C(n, ℓ)` summed over the set.
pub fn max_occurrences(set: &PatternSet, n: u32) -> u64 {
    set.iter()
        .map(|v| crate::combinat::binomial(n as u64, v.len() as u64).to_u64().unwrap_or(u64::MAX))
        .fold(0u64, u64::saturating_add)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinat::{binomial, pow};
    use crate::word::occ;
    use alloc::vec;
    use proptest::prelude::*;

    fn p(s: &str) -> Pattern {
        s.parse().unwrap()
    }

    fn set(s: &str) -> PatternSet {
        s.parse().unwrap()
    }

    fn cfg() -> EnumConfig {
        EnumConfig::default()
    }

    /// Independent tally: decode every integer below k^n into a word.
    fn tally_by_decoding(v: &Pattern, k: u32, n: u32) -> BTreeMap<u64, BigUint> {
        let mut out: BTreeMap<u64, BigUint> = BTreeMap::new();
        for code in 0..(k as u64).pow(n) {
            let mut c = code;
            let letters = (0..n)
                .map(|_| {
                    let x = (c % k as u64) as u32 + 1;
                    c /= k as u64;
                    x
                })
                .collect();
            let r = occ(v, &Word::new(letters).unwrap()).to_u64().unwrap();
            *out.entry(r).or_default() += 1u32;
        }
        out
    }

    #[test]
    fn word_tables() {
        let t = count_words(&set("123"), 2, 5, None, &cfg()).unwrap();
        assert_eq!(t.f0(), 32u32.into());
        let t = count_words(&set("12"), 3, 3, None, &cfg()).unwrap();
        assert_eq!(t.f0(), 10u32.into());
        let t = count_words(&set("123"), 4, 3, None, &cfg()).unwrap();
        assert_eq!(t.values().len(), 2);
        assert_eq!((t.get(0), t.get(1)), (60u32.into(), 4u32.into()));
        assert_eq!(t.get(2), BigUint::zero());
    }

    #[test]
    fn tables_match_decoding_oracle() {
        for v in ["12", "11", "123", "121", "2213"] {
            let v = p(v);
            for k in 1..=3 {
                for n in 0..=6 {
                    let t = count_words(&v.clone().into(), k, n, None, &cfg()).unwrap();
                    assert_eq!(t.values(), &tally_by_decoding(&v, k, n));
                    assert_eq!(t.total(), t.space_size());
                    assert!(t.values().keys().all(|&r| r <= max_occurrences(&t.patterns, n)));
                }
            }
        }
    }

    #[test]
    fn truncated_tables_agree() {
        let full = count_words(&set("132"), 4, 6, None, &cfg()).unwrap();
        let cut = count_words(&set("132"), 4, 6, Some(2), &cfg()).unwrap();
        for r in 0..=2 {
            assert_eq!(full.get(r), cut.get(r));
        }
        assert!(!cut.covers(3));
    }

    #[test]
    fn automaton_pruned_avoiders() {
        for v in ["123", "1221", "312", "11"] {
            for k in 1..=4 {
                for n in 0..=7 {
                    let full = count_words(&set(v), k, n, None, &cfg()).unwrap();
                    assert_eq!(count_word_avoiders(&p(v), k, n, &cfg()).unwrap(), full.f0());
                }
            }
        }
    }

    #[test]
    fn budgets() {
        let small = EnumConfig { word_budget: 100, ..cfg() };
        assert!(matches!(
            count_words(&set("12"), 3, 5, None, &small),
            Err(Error::WordBudget { words: 243, budget: 100 })
        ));
        let capped = EnumConfig { perm_cap: 4, ..cfg() };
        assert_eq!(count_perms(&set("12"), 5, None, &capped), Err(Error::PermCap { n: 5, cap: 4 }));
        assert!(check_word_budget(10, 40, &cfg()).is_err());
    }

    #[test]
    fn permutation_tables() {
        assert_eq!(count_perms(&set("123"), 3, None, &cfg()).unwrap().f0(), 5u32.into());
        assert_eq!(count_perms(&set("132"), 4, None, &cfg()).unwrap().f0(), 14u32.into());
        for n in 1..=7 {
            let t = count_perms(&set("12"), n, None, &cfg()).unwrap();
            assert_eq!(t.f0(), 1u32.into());
            assert_eq!(t.total(), factorial(n as u64));
        }
        let t = count_perms(&set("12;21"), 5, None, &cfg()).unwrap();
        assert_eq!(t.values().len(), 1);
        assert_eq!(t.get(10), 120u32.into());
    }

    #[test]
    fn permutations_are_words_avoiding_11() {
        for n in 1..=6 {
            let perms = count_perms(&set("123"), n, None, &cfg()).unwrap();
            let words = count_words(&set("11"), n, n, None, &cfg()).unwrap();
            assert_eq!(perms.total(), words.f0());
        }
    }

    #[test]
    fn surjective_tables() {
        let t = count_surjective(&set("12"), 3, 4, None, &cfg()).unwrap();
        assert_eq!(t.total(), 36u32.into());
        assert_eq!(t.total(), t.space_size());
        // surjective words on [n]^n are the permutations
        let s = count_surjective(&set("132"), 5, 5, None, &cfg()).unwrap();
        let q = count_perms(&set("132"), 5, None, &cfg()).unwrap();
        assert_eq!(s.values(), q.values());
    }

    #[test]
    fn block_merge_is_partition_independent() {
        let whole = count_words(&set("213"), 3, 6, None, &cfg()).unwrap();
        let mut merged = CountTable::new(set("213"), Domain::Words { k: 3 }, 6, None);
        for a in 1..=3 {
            for b in 1..=3 {
                merged.merge(&count_words_with_prefix(&set("213"), 3, 6, &[a, b], None));
            }
        }
        assert_eq!(merged, whole);
        assert!(count_words_with_prefix(&set("12"), 3, 2, &[4], None).values().is_empty());
    }

    #[test]
    fn histogram_support_and_sums() {
        let v = p("123");
        let h = subseq_histogram(&v, 3, 6, 1, &cfg()).unwrap();
        let t = count_words(&set("123"), 3, 6, None, &cfg()).unwrap();
        assert_eq!(h.total(), t.get(1));
        assert_eq!(h.values.keys().copied().collect::<Vec<_>>(), vec![3]);
        for (r, lo, hi) in [(2u64, 4usize, 6usize), (3, 5, 9)] {
            let h = subseq_histogram(&v, 4, 6, r, &cfg()).unwrap();
            assert!(h.values.keys().all(|&s| lo <= s && s <= hi), "{:?}", h.values);
        }
        for &(s, ref c) in &h.values.iter().map(|(s, c)| (*s, c.clone())).collect::<Vec<_>>() {
            let rest = count_words(&set("123"), 3, 6 - s as u32, Some(0), &cfg()).unwrap().f0();
            assert!(rest <= *c);
            assert!(*c <= pow(3, s as u64) * binomial(6, s as u64) * rest);
        }
        assert!(subseq_histogram(&v, 3, 4, 0, &cfg()).is_err());
    }

    #[test]
    fn wilf_words() {
        let r = wilf_words_compare(&p("123"), &p("132"), 4, 8, &cfg());
        assert_eq!(r.verdict(), WilfVerdict::EqualOnGrid);
        assert_eq!(r.cells_checked, 36);
        let r = wilf_words_compare(&p("1324"), &p("1324"), 3, 5, &cfg());
        assert_eq!(r.verdict(), WilfVerdict::EqualOnGrid);
    }

    #[test]
    fn wilf_words_witness_1324_2413() {
        let r = wilf_words_compare(&p("1324"), &p("2413"), 6, 8, &cfg());
        assert_eq!(r.verdict(), WilfVerdict::Differ);
        let w = r.witness.unwrap();
        assert_eq!((w.k, w.n), (Some(5), 6));
        assert_eq!((w.left.clone(), w.right.clone()), (14495u32.into(), 14493u32.into()));
        // brute force confirms both sides
        for (v, expect) in [("1324", &w.left), ("2413", &w.right)] {
            let t = count_words(&set(v), 5, 6, Some(0), &cfg()).unwrap();
            assert_eq!(&t.f0(), expect);
        }
    }

    #[test]
    fn wilf_partial_when_out_of_budget() {
        let tight = EnumConfig { word_budget: 30, state_limit: 2, ..cfg() };
        let r = wilf_words_compare(&p("123"), &p("132"), 4, 4, &tight);
        assert_eq!(r.verdict(), WilfVerdict::Partial);
        assert!(r.unexplored.contains(&(4, 4)));
    }

    #[test]
    fn wilf_perms() {
        for (a, b) in [("123", "132"), ("1342", "2413"), ("12", "21")] {
            let r = wilf_perms_compare(&p(a), &p(b), 8, &cfg());
            assert_eq!(r.verdict(), WilfVerdict::EqualOnGrid, "{a} {b}");
        }
        // 513 vs 512 avoiders of length 6
        let r = wilf_perms_compare(&p("1324"), &p("1342"), 8, &cfg());
        let w = r.witness.unwrap();
        assert_eq!((w.n, w.left, w.right), (6, 513u32.into(), 512u32.into()));
        let r = wilf_perms_compare(&p("123"), &p("1234"), 8, &cfg());
        assert_eq!(r.witness.unwrap().n, 3);
    }

    proptest! {
        #[test]
        fn tables_partition_the_space(letters in prop::collection::vec(1u32..4, 2..4), k in 1u32..4, n in 0u32..7) {
            let v = Pattern::new(&letters).unwrap();
            let table = count_words(&PatternSet::from(v.clone()), k, n, None, &EnumConfig::default()).unwrap();
            prop_assert_eq!(table.total(), pow(k as u64, n as u64));
            let g = crate::automaton::build_automaton(&v, k).unwrap();
            prop_assert_eq!(table.f0(), crate::transfer::count_avoiders(&g, n as usize));
        }
    }
}
