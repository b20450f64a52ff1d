//! Exact avoider counts from the automaton, viewed as a Markov chain.
//!
//! Reading i.i.d. uniform letters drives the automaton through a Markov
//! chain on the live states plus the sink. Its transition matrix `P` has
//! `1/k` for every advancing live successor and `1 - #L(ξ)/k` on the
//! diagonal. The integer matrix `M = k·P` counts words instead of
//! probabilities: the live mass after `n` steps from `ξ^ε` is the number of
//! avoiders of length `n`.

use alloc::vec::Vec;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::automaton::AutomatonGraph;
use crate::combinat::{binomial, pow};
use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Row-stochastic matrix over live states (topological order) and the sink.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    k: u32,
    rows: Vec<Vec<(usize, Rational)>>,
}

impl TransitionMatrix {
    pub fn k(&self) -> u32 {
        self.k
    }

    /// Live states plus one for the sink.
    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn sink(&self) -> usize {
        self.rows.len() - 1
    }

    /// Non-zero entries of row `i`, by column.
    pub fn row(&self, i: usize) -> &[(usize, Rational)] {
        &self.rows[i]
    }

    pub fn entry(&self, i: usize, j: usize) -> Rational {
        self.rows[i]
            .iter()
            .find(|(c, _)| *c == j)
            .map(|(_, r)| r.clone())
            .unwrap_or_else(Rational::zero)
    }
}

pub fn transition_matrix(g: &AutomatonGraph) -> TransitionMatrix {
    let k = g.k();
    let denom = BigInt::from(k);
    let counts = CountMatrix::from_graph(g);
    let mut rows: Vec<Vec<(usize, Rational)>> = counts
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .map(|&(c, w)| (c, Rational::new(BigInt::from(w), denom.clone())))
                .collect()
        })
        .collect();
    rows.push(alloc::vec![(g.sink(), Rational::one())]);
    TransitionMatrix { k, rows }
}

/// Integer letter-count matrix `M = k·P`, live rows only. Each row lists
/// `(column, weight)` sorted by column; the sink column is `live_count()`.
#[derive(Clone, Debug)]
pub struct CountMatrix {
    rows: Vec<Vec<(usize, u32)>>,
    live: usize,
}

impl CountMatrix {
    pub fn from_graph(g: &AutomatonGraph) -> Self {
        let live = g.live_count();
        let rows = (0..live)
            .map(|s| {
                let mut row: Vec<(usize, u32)> = Vec::new();
                let mut targets: Vec<usize> = g.successors(s).iter().map(|&t| t as usize).collect();
                targets.sort_unstable();
                for t in targets {
                    match row.last_mut() {
                        Some((c, w)) if *c == t => *w += 1,
                        _ => row.push((t, 1)),
                    }
                }
                row
            })
            .collect();
        CountMatrix { rows, live }
    }

    pub fn live_count(&self) -> usize {
        self.live
    }

    pub fn row(&self, s: usize) -> &[(usize, u32)] {
        &self.rows[s]
    }

    /// `M(s, s) = k - #L(s)`.
    pub fn diagonal(&self, s: usize) -> u32 {
        self.rows[s].iter().find(|(c, _)| *c == s).map_or(0, |&(_, w)| w)
    }

    /// No live-to-live entry below the diagonal.
    pub fn is_upper_triangular(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(s, row)| row.iter().all(|&(c, _)| c >= s))
    }
}

/// Step-by-step live mass of `M^n` applied to the `ξ^ε` indicator.
#[derive(Clone, Debug)]
pub struct MassWalk {
    k: u32,
    matrix: CountMatrix,
    mass: Vec<BigUint>,
    absorbed: BigUint,
    steps: usize,
}

impl MassWalk {
    pub fn new(g: &AutomatonGraph) -> Self {
        let matrix = CountMatrix::from_graph(g);
        let mut mass = alloc::vec![BigUint::zero(); matrix.live];
        mass[0] = BigUint::one();
        MassWalk {
            k: g.k(),
            matrix,
            mass,
            absorbed: BigUint::zero(),
            steps: 0,
        }
    }

    pub fn step(&mut self) {
        let live = self.matrix.live;
        let mut next = alloc::vec![BigUint::zero(); live];
        self.absorbed *= self.k;
        for (s, row) in self.matrix.rows.iter().enumerate() {
            let m = &self.mass[s];
            if m.is_zero() {
                continue;
            }
            for &(c, w) in row {
                let target = if c < live { &mut next[c] } else { &mut self.absorbed };
                if w == 1 {
                    *target += m;
                } else {
                    *target += m * w;
                }
            }
        }
        self.mass = next;
        self.steps += 1;
    }

    /// Words of the current length that avoid the pattern.
    pub fn live_total(&self) -> BigUint {
        self.mass.iter().sum()
    }

    /// Words of the current length that contain the pattern.
    pub fn absorbed(&self) -> &BigUint {
        &self.absorbed
    }

    pub fn mass(&self) -> &[BigUint] {
        &self.mass
    }

    pub fn steps(&self) -> usize {
        self.steps
    }
}

/// `f_0([k]^n)` for `n = 0..=n_max`.
pub fn avoider_counts(g: &AutomatonGraph, n_max: usize) -> Vec<BigUint> {
    let mut walk = MassWalk::new(g);
    let mut out = Vec::with_capacity(n_max + 1);
    out.push(walk.live_total());
    for _ in 0..n_max {
        walk.step();
        out.push(walk.live_total());
    }
    out
}

pub fn count_avoiders(g: &AutomatonGraph, n: usize) -> BigUint {
    let mut walk = MassWalk::new(g);
    for _ in 0..n {
        walk.step();
    }
    walk.live_total()
}

pub fn avoidance_probability(g: &AutomatonGraph, n: usize) -> Rational {
    let count = count_avoiders(g, n);
    Rational::new(count.into(), pow(g.k() as u64, n as u64).into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GrowthRate {
    pub rate: u32,
    /// Set when `k < d`: no word can contain the pattern and the rate is `k`.
    pub degenerate: bool,
}

/// Spectral radius of the live block of `M`, read off its diagonal.
pub fn growth_rate(g: &AutomatonGraph) -> GrowthRate {
    let m = CountMatrix::from_graph(g);
    let rate = (0..m.live).map(|s| m.diagonal(s)).max().unwrap_or(0);
    GrowthRate {
        rate,
        degenerate: g.k() < g.pattern().distinct(),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BirthBound {
    pub value: Rational,
    /// `k > d` and `n > ℓ·C(k, d)`, where the bound is proven.
    pub in_regime: bool,
}

/// Upper bound on `f_0([k]^n)` from domination by a pure-birth walk:
/// `(d-1)^n Σ_{i=0}^{ℓ·C(k,d)} C(n,i) ((k-d+1)/(d-1))^i`.
pub fn birth_bound(k: u32, d: u32, len: usize, n: u64) -> Result<BirthBound> {
    if d < 2 {
        return Err(Error::InvalidArgument(alloc::format!(
            "birth bound needs at least 2 distinct pattern letters, got d={d}"
        )));
    }
    if k < d {
        return Err(Error::InvalidArgument(alloc::format!(
            "birth bound needs k >= d, got k={k}, d={d}"
        )));
    }
    let depth_bound = binomial(k as u64, d as u64) * len;
    let terms = depth_bound.to_u64().unwrap_or(u64::MAX).min(n);
    let ratio = Rational::new((k - d + 1).into(), (d - 1).into());
    let mut sum = Rational::zero();
    let mut power = Rational::one();
    for i in 0..=terms {
        sum += Rational::from_integer(binomial(n, i).into()) * &power;
        power *= &ratio;
    }
    let value = Rational::from_integer(pow(d as u64 - 1, n).into()) * sum;
    let in_regime = k > d && BigUint::from(n) > depth_bound;
    Ok(BirthBound { value, in_regime })
}

/// Trials per random stream.
pub const SIM_CHUNK: u64 = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationResult {
    pub trials: u64,
    /// Walks still live after `n` letters.
    pub hits: u64,
    pub estimate: Rational,
    pub std_error: f64,
    pub seed: u64,
}

impl SimulationResult {
    pub fn from_hits(trials: u64, hits: u64, seed: u64) -> Self {
        let p = hits as f64 / trials as f64;
        SimulationResult {
            trials,
            hits,
            estimate: Rational::new(hits.into(), trials.into()),
            std_error: libm::sqrt(p * (1.0 - p) / trials as f64),
            seed,
        }
    }
}

/// Number of chunks `trials` is split into.
pub fn chunk_count(trials: u64) -> u64 {
    trials.div_ceil(SIM_CHUNK)
}

/// Runs chunk `chunk` of a simulation and returns its hits.
///
/// Chunk `c` draws from ChaCha8 seeded with `seed` on stream `c`, so the
/// total is the same however chunks are distributed over workers.
pub fn simulate_chunk(g: &AutomatonGraph, n: usize, trials: u64, seed: u64, chunk: u64) -> u64 {
    let start = chunk * SIM_CHUNK;
    let len = SIM_CHUNK.min(trials.saturating_sub(start));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    let k = g.k();
    let sink = g.sink();
    let mut hits = 0;
    for _ in 0..len {
        let mut s = 0;
        for _ in 0..n {
            s = g.next(s, rng.random_range(1..=k));
            if s == sink {
                break;
            }
        }
        if s != sink {
            hits += 1;
        }
    }
    hits
}

/// Monte Carlo estimate of the avoidance probability after `n` letters.
pub fn simulate(g: &AutomatonGraph, n: usize, trials: u64, seed: u64) -> Result<SimulationResult> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let hits = (0..chunk_count(trials))
        .map(|c| simulate_chunk(g, n, trials, seed, c))
        .sum();
    Ok(SimulationResult::from_hits(trials, hits, seed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::build_automaton;
    use crate::word::{occ, Letter, Pattern, Word};
    use proptest::prelude::*;

    fn g(v: &str, k: u32) -> AutomatonGraph {
        build_automaton(&v.parse::<Pattern>().unwrap(), k).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    /// Counts avoiders by scanning every word with the occurrence counter.
    fn brute_avoiders(v: &str, k: u32, n: usize) -> BigUint {
        let v: Pattern = v.parse().unwrap();
        let mut count = 0u64;
        let total = (k as u64).pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let letters = (0..n).map(|_| {
                let x = (c % k as u64) as u32 + 1;
                c /= k as u64;
                x
            });
            if occ(&v, &Word::new(letters.collect()).unwrap()).is_zero() {
                count += 1;
            }
        }
        count.into()
    }

    #[test]
    fn matrix_invariants() {
        for (v, k) in [("123", 4), ("213", 5), ("1221", 4), ("11", 3), ("2143", 5)] {
            let gr = g(v, k);
            let p = transition_matrix(&gr);
            let d = gr.pattern().distinct() as i64;
            assert_eq!(p.size(), gr.live_count() + 1);
            for i in 0..p.size() {
                let sum: Rational = p.row(i).iter().map(|(_, x)| x.clone()).sum();
                assert_eq!(sum, Rational::one());
            }
            for s in 0..gr.live_count() {
                let diag = r(1, 1) - r(gr.advancing(s).len() as i64, k as i64);
                assert_eq!(p.entry(s, s), diag);
                assert!(p.entry(s, s) <= r(d - 1, k as i64));
                for (c, x) in p.row(s) {
                    if *c != s && *c != p.sink() {
                        assert_eq!(x, &r(1, k as i64));
                    }
                    assert!(*c >= s);
                }
            }
            assert_eq!(p.entry(0, 0), r(d - 1, k as i64));
            assert_eq!(p.row(p.sink()), &[(p.sink(), Rational::one())]);
            assert!(CountMatrix::from_graph(&gr).is_upper_triangular());
        }
    }

    #[test]
    fn named_diagonal() {
        let gr = g("123", 4);
        let inst = gr.instances();
        let q1 = inst.extend(&inst.start(), 1).unwrap();
        let idx = gr.states().iter().position(|s| s == &q1).unwrap();
        assert_eq!(transition_matrix(&gr).entry(idx, idx), r(1, 2));
    }

    #[test]
    fn counts() {
        assert_eq!(count_avoiders(&g("12", 2), 3), 4u32.into());
        assert_eq!(count_avoiders(&g("123", 4), 0), 1u32.into());
        assert_eq!(count_avoiders(&g("123", 4), 3), 60u32.into());
        assert_eq!(count_avoiders(&g("123", 2), 7), 128u32.into());
        assert_eq!(avoidance_probability(&g("123", 4), 3), r(15, 16));
        assert_eq!(avoidance_probability(&g("2213", 5), 0), Rational::one());
    }

    #[test]
    fn counts_match_brute_force() {
        for v in ["12", "21", "11", "123", "132", "121", "112", "2213", "1324"] {
            for k in 1..=4 {
                let gr = g(v, k);
                let seq = avoider_counts(&gr, 7);
                for (n, count) in seq.iter().enumerate() {
                    assert_eq!(*count, brute_avoiders(v, k, n), "{v} k={k} n={n}");
                }
            }
        }
    }

    #[test]
    fn mass_is_conserved() {
        let gr = g("1432", 5);
        let mut walk = MassWalk::new(&gr);
        for n in 1..=25u64 {
            walk.step();
            assert_eq!(walk.live_total() + walk.absorbed(), pow(5, n));
        }
    }

    #[test]
    fn probability_is_non_increasing() {
        let gr = g("213", 4);
        let probs: Vec<Rational> = (0..20).map(|n| avoidance_probability(&gr, n)).collect();
        assert!(probs.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn growth_rates() {
        assert_eq!(growth_rate(&g("123", 4)), GrowthRate { rate: 2, degenerate: false });
        assert_eq!(growth_rate(&g("213", 5)), GrowthRate { rate: 2, degenerate: false });
        assert_eq!(growth_rate(&g("11", 3)), GrowthRate { rate: 0, degenerate: false });
        assert_eq!(growth_rate(&g("1234", 2)), GrowthRate { rate: 2, degenerate: true });
    }

    #[test]
    fn birth_bounds() {
        assert_eq!(birth_bound(4, 3, 3, 0).unwrap().value, Rational::one());
        assert!(birth_bound(4, 1, 2, 5).is_err());
        let gr = g("123", 4);
        for n in 13..=20u64 {
            let b = birth_bound(4, 3, 3, n).unwrap();
            assert!(b.in_regime);
            let exact = Rational::from_integer(count_avoiders(&gr, n as usize).into());
            assert!(exact <= b.value);
            assert!(Rational::from_integer(pow(2, n).into()) <= exact);
        }
        assert!(!birth_bound(4, 3, 3, 12).unwrap().in_regime);
    }

    #[test]
    fn simulation_contract() {
        let gr = g("123", 4);
        let zero = simulate(&gr, 0, 100, 7).unwrap();
        assert_eq!(zero.hits, 100);
        assert_eq!(zero.std_error, 0.0);
        let a = simulate(&gr, 10, 5000, 42).unwrap();
        let b = simulate(&gr, 10, 5000, 42).unwrap();
        assert_eq!(a, b);
        assert!(simulate(&gr, 10, 0, 1).is_err());
        let exact = avoidance_probability(&gr, 10).to_f64().unwrap();
        let est = a.estimate.to_f64().unwrap();
        assert!((est - exact).abs() <= 5.0 * a.std_error);
    }

    fn pattern_strategy() -> impl Strategy<Value = Vec<Letter>> {
        prop::collection::vec(1u32..4, 2..5)
    }

    proptest! {
        #[test]
        fn mass_is_conserved_for_random_patterns(v in pattern_strategy(), k in 1u32..5, n in 0usize..12) {
            let gr = build_automaton(&Pattern::new(&v).unwrap(), k).unwrap();
            let mut walk = MassWalk::new(&gr);
            for _ in 0..n {
                walk.step();
            }
            prop_assert_eq!(walk.live_total() + walk.absorbed(), pow(k as u64, n as u64));
            prop_assert!(CountMatrix::from_graph(&gr).is_upper_triangular());
        }

        #[test]
        fn counts_invariant_under_reversal_and_complement(v in pattern_strategy(), k in 1u32..5) {
            let top = v.iter().max().copied().unwrap() + 1;
            let reversed: Vec<Letter> = v.iter().rev().copied().collect();
            let complemented: Vec<Letter> = v.iter().map(|x| top - x).collect();
            let base = avoider_counts(&build_automaton(&Pattern::new(&v).unwrap(), k).unwrap(), 9);
            for other in [reversed, complemented] {
                let g2 = build_automaton(&Pattern::new(&other).unwrap(), k).unwrap();
                prop_assert_eq!(&avoider_counts(&g2, 9), &base);
            }
        }
    }
}
