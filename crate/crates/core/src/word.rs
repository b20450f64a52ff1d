//! Words, patterns and occurrence counting.
//!
//! An occurrence of a pattern `v` (length `ℓ`) in a word `w` is an index tuple
//! `j_1 < … < j_ℓ` such that `w_{j_1} … w_{j_ℓ}` is order-isomorphic to `v`.
//! [`occ`] counts them with a streaming scan ([`OccurrenceScanner`]);
//! [`occurrences`] lists them by plain enumeration of index tuples and is the
//! oracle the scan is tested against.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::ops::AddAssign;
use core::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type Letter = u32;

/// A finite sequence of positive letters. The empty word is allowed.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn new(letters: Vec<Letter>) -> Result<Self> {
        if letters.contains(&0) {
            return Err(Error::ZeroLetter);
        }
        Ok(Word(letters))
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest letter, 0 for the empty word.
    pub fn max_letter(&self) -> Letter {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.0
    }
}

impl From<&Pattern> for Word {
    fn from(p: &Pattern) -> Self {
        Word(p.letters.clone())
    }
}

/// Parses comma- or whitespace-separated positive integers. A single token
/// made only of digits is read one letter per digit, so `"35239"` is the
/// five-letter word 3,5,2,3,9. A lone letter above 9 needs a trailing comma.
impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse_err = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        if s.is_empty() {
            return Ok(Word::empty());
        }
        let separated = s.contains(|c: char| c == ',' || c.is_whitespace());
        let letters: Vec<Letter> = if separated {
            s.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<Letter>().map_err(|_| parse_err("letters must be integers")))
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).ok_or_else(|| parse_err("expected digits")))
                .collect::<Result<_>>()?
        };
        Word::new(letters).map_err(|_| parse_err("letters must be positive"))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_letters(f, &self.0)
    }
}

/// Digits run together when every letter is at most 9, otherwise commas.
pub(crate) fn write_letters(f: &mut impl fmt::Write, letters: &[Letter]) -> fmt::Result {
    let compact = letters.iter().all(|&x| x <= 9);
    for (i, x) in letters.iter().enumerate() {
        if i > 0 && !compact {
            f.write_char(',')?;
        }
        write!(f, "{x}")?;
    }
    Ok(())
}

/// A pattern in canonical form: its letters are exactly `{1, …, d}`.
///
/// Construction always canonicalizes, so two patterns compare equal iff
/// they are order-isomorphic.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    letters: Vec<Letter>,
    distinct: u32,
}

impl Pattern {
    pub fn new(letters: &[Letter]) -> Result<Self> {
        if letters.len() < 2 {
            return Err(Error::PatternTooShort { len: letters.len() });
        }
        if letters.contains(&0) {
            return Err(Error::ZeroLetter);
        }
        let letters = rank_compress(letters);
        let distinct = letters.iter().copied().max().unwrap_or(0);
        Ok(Pattern { letters, distinct })
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    /// Pattern length `ℓ`.
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of distinct letters `d`.
    pub fn distinct(&self) -> u32 {
        self.distinct
    }

    /// Every canonical pattern of length `len`, in lexicographic order.
    pub fn all_of_length(len: usize) -> Vec<Pattern> {
        let mut out = Vec::new();
        if len < 2 {
            return out;
        }
        // Canonical words are restricted growth on the *set* of values, so
        // generate all of [len]^len and keep the fixed points of compression.
        let mut cur = alloc::vec![1 as Letter; len];
        loop {
            if rank_compress(&cur) == cur {
                out.push(Pattern {
                    distinct: cur.iter().copied().max().unwrap_or(0),
                    letters: cur.clone(),
                });
            }
            let mut i = len;
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < len as Letter {
                    cur[i] += 1;
                    break;
                }
                cur[i] = 1;
            }
        }
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let w: Word = s.parse()?;
        canonicalize(&w)
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_letters(f, &self.letters)
    }
}

/// A non-empty set of patterns; occurrences are summed over the members.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PatternSet(BTreeSet<Pattern>);

impl PatternSet {
    pub fn new(patterns: impl IntoIterator<Item = Pattern>) -> Result<Self> {
        let set: BTreeSet<Pattern> = patterns.into_iter().collect();
        if set.is_empty() {
            return Err(Error::EmptyPatternSet);
        }
        Ok(PatternSet(set))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Pattern> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The only member, when the set is a single pattern.
    pub fn single(&self) -> Option<&Pattern> {
        if self.0.len() == 1 {
            self.0.iter().next()
        } else {
            None
        }
    }

    pub fn max_len(&self) -> usize {
        self.0.iter().map(Pattern::len).max().unwrap_or(0)
    }
}

impl From<Pattern> for PatternSet {
    fn from(p: Pattern) -> Self {
        let mut set = BTreeSet::new();
        set.insert(p);
        PatternSet(set)
    }
}

/// Members separated by `;`.
impl FromStr for PatternSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let members = s
            .split(';')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<Pattern>>>()?;
        PatternSet::new(members)
    }
}

impl fmt::Display for PatternSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

/// One occurrence: strictly increasing 1-based positions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occurrence(pub Vec<usize>);

impl Occurrence {
    pub fn indexes(&self) -> &[usize] {
        &self.0
    }
}

/// Replaces each letter by its rank among the distinct letters (1-based).
pub fn rank_compress(letters: &[Letter]) -> Vec<Letter> {
    let mut sorted: Vec<Letter> = letters.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    letters
        .iter()
        .map(|x| sorted.binary_search(x).map(|i| i as Letter + 1).unwrap_or(0))
        .collect()
}

pub fn canonicalize(word: &Word) -> Result<Pattern> {
    Pattern::new(word.letters())
}

pub fn is_order_isomorphic(a: &[Letter], b: &[Letter]) -> bool {
    a.len() == b.len() && rank_compress(a) == rank_compress(b)
}

/// Exact number of occurrences of `v` in `w`.
pub fn occ(v: &Pattern, w: &Word) -> BigUint {
    let mut scan = OccurrenceScanner::<BigUint>::new(v);
    for &x in w.letters() {
        scan.push(x);
    }
    scan.count().clone()
}

pub fn occ_set(set: &PatternSet, w: &Word) -> BigUint {
    set.iter().map(|v| occ(v, w)).sum()
}

/// All occurrences in lexicographic order, by direct enumeration of the
/// `C(n, ℓ)` index tuples.
pub fn occurrences(v: &Pattern, w: &Word) -> Vec<Occurrence> {
    let n = w.len();
    let l = v.len();
    let mut out = Vec::new();
    if n < l {
        return out;
    }
    let letters = w.letters();
    let mut idx: Vec<usize> = (0..l).collect();
    let mut sub = alloc::vec![0; l];
    loop {
        for (s, &i) in sub.iter_mut().zip(&idx) {
            *s = letters[i];
        }
        if rank_compress(&sub) == v.letters() {
            out.push(Occurrence(idx.iter().map(|i| i + 1).collect()));
        }
        // next combination
        let mut p = l;
        loop {
            if p == 0 {
                return out;
            }
            p -= 1;
            if idx[p] < n - l + p {
                break;
            }
        }
        idx[p] += 1;
        for q in p + 1..l {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// Union of all occurrence index tuples (1-based, ascending): the shortest
/// subsequence of `w` that contains every occurrence.
pub fn occurrence_subsequence(v: &Pattern, w: &Word) -> Vec<usize> {
    let mut used = alloc::vec![false; w.len()];
    for o in occurrences(v, w) {
        for &j in o.indexes() {
            used[j - 1] = true;
        }
    }
    used.iter()
        .enumerate()
        .filter_map(|(i, &u)| u.then_some(i + 1))
        .collect()
}

/// Counter type usable by [`OccurrenceScanner`].
pub trait Count: Clone + Zero + One + for<'a> AddAssign<&'a Self> {}
impl<T: Clone + Zero + One + for<'a> AddAssign<&'a T>> Count for T {}

/// A partial match: the first `matched` pattern positions have been placed,
/// and `assigned[c - 1]` is the word letter bound to pattern letter `c`
/// (0 while unbound).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Partial {
    matched: u16,
    assigned: SmallVec<[Letter; 8]>,
}

/// Streaming occurrence counter.
///
/// Letters are pushed one at a time; the scanner keeps, for every partial
/// match signature, the number of index tuples realising it. A signature
/// only records which word letter each pattern letter is bound to, which is
/// all that decides whether a later letter can extend it.
#[derive(Clone, Debug)]
pub struct OccurrenceScanner<'p, C> {
    pattern: &'p Pattern,
    // sorted by key, the empty partial first with count 1
    partials: Vec<(Partial, C)>,
    total: C,
}

impl<'p, C: Count> OccurrenceScanner<'p, C> {
    pub fn new(pattern: &'p Pattern) -> Self {
        let empty = Partial {
            matched: 0,
            assigned: SmallVec::from_elem(0, pattern.distinct() as usize),
        };
        OccurrenceScanner {
            pattern,
            partials: alloc::vec![(empty, C::one())],
            total: C::zero(),
        }
    }

    /// Occurrences completed so far.
    pub fn count(&self) -> &C {
        &self.total
    }

    pub fn push(&mut self, x: Letter) {
        let v = self.pattern.letters();
        let full = v.len();
        let mut additions: Vec<(Partial, C)> = Vec::new();
        for (p, cnt) in &self.partials {
            let c = v[p.matched as usize] as usize;
            if !fits(&p.assigned, c, x) {
                continue;
            }
            if p.matched as usize + 1 == full {
                self.total += cnt;
                continue;
            }
            let mut assigned = p.assigned.clone();
            assigned[c - 1] = x;
            additions.push((
                Partial {
                    matched: p.matched + 1,
                    assigned,
                },
                cnt.clone(),
            ));
        }
        if additions.is_empty() {
            return;
        }
        additions.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        self.partials = merge(core::mem::take(&mut self.partials), additions);
    }
}

/// Can word letter `x` play pattern letter `c` given the current bindings?
fn fits(assigned: &[Letter], c: usize, x: Letter) -> bool {
    let bound = assigned[c - 1];
    if bound != 0 {
        return bound == x;
    }
    let below_ok = assigned[..c - 1].iter().all(|&a| a == 0 || a < x);
    let above_ok = assigned[c..].iter().all(|&a| a == 0 || a > x);
    below_ok && above_ok
}

fn merge<C: Count>(old: Vec<(Partial, C)>, new: Vec<(Partial, C)>) -> Vec<(Partial, C)> {
    let mut out = Vec::with_capacity(old.len() + new.len());
    let mut a = old.into_iter().peekable();
    let mut b = new.into_iter().peekable();
    loop {
        match (a.peek(), b.peek()) {
            (Some(x), Some(y)) => match x.0.cmp(&y.0) {
                core::cmp::Ordering::Less => out.push(a.next().unwrap()),
                core::cmp::Ordering::Greater => out.push(b.next().unwrap()),
                core::cmp::Ordering::Equal => {
                    let (k, mut c) = a.next().unwrap();
                    c += &b.next().unwrap().1;
                    out.push((k, c));
                }
            },
            (Some(_), None) => out.push(a.next().unwrap()),
            (None, Some(_)) => out.push(b.next().unwrap()),
            (None, None) => return out,
        }
    }
}

/// Sum of scanners over a pattern set.
#[derive(Clone, Debug)]
pub struct SetScanner<'p> {
    members: Vec<OccurrenceScanner<'p, u64>>,
}

impl<'p> SetScanner<'p> {
    pub fn new(set: &'p PatternSet) -> Self {
        SetScanner {
            members: set.iter().map(OccurrenceScanner::new).collect(),
        }
    }

    pub fn push(&mut self, x: Letter) {
        for m in &mut self.members {
            m.push(x);
        }
    }

    pub fn count(&self) -> u64 {
        self.members.iter().map(|m| *m.count()).sum()
    }
}

impl fmt::Display for Occurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, j) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{j}")?;
        }
        f.write_str(")")
    }
}

pub(crate) fn letters_to_string(letters: &[Letter]) -> String {
    let mut s = String::new();
    let _ = write_letters(&mut s, letters);
    s
}
