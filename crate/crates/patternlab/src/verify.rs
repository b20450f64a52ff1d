//! Verification suites: each runs one family of exact checks over a grid
//! and reports every failing cell.

use num_bigint::{BigInt, BigUint};
use patternlab_core::combinat::{binomial, pow};
use patternlab_core::identities::{
    binomial_identity_value, burstein_closed_form, catalan, egf_identity_check, perms_from_words, sdisc_check,
    weak_words_closed_form, yna_decomposition_check,
};
use patternlab_core::transfer::{avoider_counts, birth_bound, growth_rate};
use patternlab_core::{AutomatonGraph, CountProvider, Error, Pattern, PatternSet, Rational};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::parallel::ParallelProvider;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    /// Lower and upper bounds on avoider counts.
    Bounds,
    /// Advancing letters, chain depth and diagonal of every automaton.
    Lemmas,
    /// Permutation counts from word counts by inclusion-exclusion.
    Theorem2,
    ClosedForms,
    /// Exponential generating function relation.
    Egf,
    /// Avoiders of `[n]^n` bounded through permutations.
    Sdisc,
    All,
}

/// Grid overrides from the command line; `None` keeps a suite's default.
#[derive(Clone, Debug, Default)]
pub struct Grid {
    pub patterns: Option<Vec<Pattern>>,
    pub k: Option<u32>,
    pub k_max: Option<u32>,
    pub n_max: Option<u32>,
    pub l_max: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub cell: String,
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub identity: String,
    pub grid: String,
    /// `pass` or `fail`.
    pub status: String,
    pub cells: usize,
    /// Cells that hit a resource limit and were not checked.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub skipped: Vec<String>,
    pub failures: Vec<Failure>,
}

impl Report {
    fn new(identity: &str, grid: String) -> Self {
        Report {
            identity: identity.into(),
            grid,
            status: String::new(),
            cells: 0,
            skipped: Vec::new(),
            failures: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, cell: impl FnOnce() -> String, lhs: impl ToString, rhs: impl ToString) {
        self.cells += 1;
        if !ok {
            self.failures.push(Failure {
                cell: cell(),
                lhs: lhs.to_string(),
                rhs: rhs.to_string(),
            });
        }
    }

    fn done(mut self) -> Self {
        self.status = if self.passed() { "pass" } else { "fail" }.into();
        self
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.cells > 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: String,
    pub status: String,
    pub reports: Vec<Report>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(Report::passed)
    }
}

fn names(ps: &[Pattern]) -> String {
    ps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
}

fn pats(list: &[&str]) -> Vec<Pattern> {
    list.iter().map(|s| s.parse().expect("built-in patterns parse")).collect()
}

/// Canonical patterns of every length `2..=l_max`.
fn canonical_upto(l_max: usize) -> Vec<Pattern> {
    (2..=l_max).flat_map(Pattern::all_of_length).collect()
}

/// An error from a check either ends the suite (cache corruption, IO) or
/// marks the cell as a failure.
fn cell_error(p: &mut ParallelProvider, e: Error) -> Result<String> {
    match p.take_error() {
        Some(fatal) => Err(fatal),
        None if e.is_resource() => Err(CliError::Count(e)),
        None => Ok(e.to_string()),
    }
}

pub fn run(suite: Suite, grid: &Grid, provider: &mut ParallelProvider) -> Result<SuiteReport> {
    let reports = match suite {
        Suite::Bounds => bounds(grid, provider)?,
        Suite::Lemmas => automaton_structure(grid, provider),
        Suite::Theorem2 => words_to_perms(grid, provider)?,
        Suite::ClosedForms => closed_forms(grid, provider)?,
        Suite::Egf => egf(grid, provider)?,
        Suite::Sdisc => sdisc(grid, provider)?,
        Suite::All => {
            let mut all = Vec::new();
            for s in [Suite::Bounds, Suite::Lemmas, Suite::Theorem2, Suite::ClosedForms, Suite::Egf, Suite::Sdisc] {
                all.extend(run(s, grid, provider)?.reports);
            }
            all
        }
    };
    let passed = reports.iter().all(Report::passed);
    Ok(SuiteReport {
        suite: clap::ValueEnum::to_possible_value(&suite)
            .expect("no skipped variants")
            .get_name()
            .to_string(),
        status: if passed { "pass" } else { "fail" }.into(),
        reports,
    })
}

/// `(d-1)^n <= f_0([k]^n) <= birth bound` for `l·C(k,d) < n <= n_max`.
pub fn bounds(grid: &Grid, provider: &mut ParallelProvider) -> Result<Vec<Report>> {
    let patterns = grid
        .patterns
        .clone()
        .unwrap_or_else(|| pats(&["123", "132", "213", "231", "312", "321"]));
    let k = grid.k.unwrap_or(4);
    let n_max = grid.n_max.unwrap_or(40);
    for v in &patterns {
        let d = v.distinct();
        if d < 2 {
            return Err(CliError::Usage(format!(
                "bounds need at least two distinct letters; pattern {v} has d={d} (d<2)"
            )));
        }
        if k < d {
            return Err(CliError::Usage(format!("bounds need k >= d; pattern {v} has d={d} > k={k}")));
        }
    }
    let mut rep = Report::new(
        "(d-1)^n <= f_0([k]^n) <= birth bound",
        format!("v in {{{}}}, k={k}, l*C(k,d) < n <= {n_max}", names(&patterns)),
    );
    for v in &patterns {
        let d = v.distinct();
        let g = AutomatonGraph::build_with_limit(v, k, provider.config.state_limit)?;
        let counts = avoider_counts(&g, n_max as usize);
        let start = binomial(k as u64, d as u64) * v.len() as u64;
        for n in 1..=n_max {
            if BigUint::from(n) <= start {
                continue;
            }
            let f0 = &counts[n as usize];
            let lower = pow(d as u64 - 1, n as u64);
            let upper = birth_bound(k, d, v.len(), n as u64)?.value;
            let cell = || format!("v={v}, k={k}, n={n}");
            rep.check(&lower <= f0, cell, format!("(d-1)^n = {lower}"), format!("f_0 = {f0}"));
            rep.check(
                Rational::from_integer(f0.clone().into()) <= upper,
                cell,
                format!("f_0 = {f0}"),
                format!("bound = {upper}"),
            );
        }
    }
    Ok(vec![rep.done()])
}

/// Structural facts about every automaton with `l <= l_max`, `d <= 4`,
/// `k <= k_max`.
pub fn automaton_structure(grid: &Grid, provider: &mut ParallelProvider) -> Vec<Report> {
    let l_max = grid.l_max.unwrap_or(4);
    let k_max = grid.k_max.unwrap_or(5);
    let limit = provider.config.state_limit;
    let cells: Vec<(Pattern, u32)> = canonical_upto(l_max)
        .into_iter()
        .filter(|v| v.distinct() <= 4)
        .flat_map(|v| (1..=k_max).map(move |k| (v.clone(), k)))
        .collect();
    let built: Vec<_> = provider.install(|| {
        cells
            .par_iter()
            .map(|(v, k)| AutomatonGraph::build_with_limit(v, *k, limit))
            .collect()
    });
    let grid_desc = format!("canonical v with l <= {l_max}, d <= 4; k <= {k_max}");
    let mut adv = Report::new("#L(state) >= k-d+1 for every live state", grid_desc.clone());
    let mut chain = Report::new("longest chain <= C(k,d)*l (k >= d)", grid_desc.clone());
    let mut diag = Report::new("max live diagonal of k*P = d-1 (k >= d)", grid_desc);
    for ((v, k), g) in cells.iter().zip(built) {
        let cell = || format!("v={v}, k={k}");
        let g = match g {
            Ok(g) => g,
            Err(e) => {
                for r in [&mut adv, &mut chain, &mut diag] {
                    r.skipped.push(format!("{}: {e}", cell()));
                }
                continue;
            }
        };
        let d = v.distinct();
        let need = *k as i64 - d as i64 + 1;
        adv.check(g.min_advancing() as i64 >= need, cell, g.min_advancing(), need);
        // with no instances the lone start state still forms a chain of one
        if *k >= d {
            let cap = binomial(*k as u64, d as u64) * v.len() as u64;
            chain.check(BigUint::from(g.depth()) <= cap, cell, g.depth(), &cap);
        }
        let rate = growth_rate(&g);
        if !rate.degenerate {
            diag.check(rate.rate == d - 1, cell, rate.rate, d - 1);
        }
    }
    vec![adv.done(), chain.done(), diag.done()]
}

/// The alternating word sum against brute-force permutation counts, and
/// the letter-set inclusion-exclusion behind it.
pub fn words_to_perms(grid: &Grid, provider: &mut ParallelProvider) -> Result<Vec<Report>> {
    let l_max = grid.l_max.unwrap_or(3);
    let n_max = grid.n_max.unwrap_or(7);
    let mut sets: Vec<PatternSet> = match &grid.patterns {
        Some(ps) => ps.iter().cloned().map(PatternSet::from).collect(),
        None => canonical_upto(l_max).into_iter().map(PatternSet::from).collect(),
    };
    if grid.patterns.is_none() {
        sets.push("12;21".parse().expect("built-in set parses"));
    }
    let set_names = sets.iter().map(|s| format!("{{{s}}}")).collect::<Vec<_>>().join(",");
    let r_max = 2;
    let mut rep = Report::new(
        "f_r(S_n) = sum_k (-1)^(n-k) C(n,k) f_r([k]^n)",
        format!("sets {set_names}; r <= {r_max}; 1 <= n <= {n_max}"),
    );
    let yna_n = n_max.min(5);
    let mut yna = Report::new(
        "f_r(Y_n([a])) = sum_j (-1)^j C(a,j) f_r([a-j]^n), and f_r([a]^n) = sum_j C(a,j) f_r(Y_n([a-j]))",
        format!("sets {set_names}; r <= 1; 1 <= a <= n <= {yna_n}"),
    );
    for set in &sets {
        for n in 1..=n_max {
            let perms = match provider.perm_table(set, n, Some(r_max)) {
                Ok(t) => t,
                Err(e) => {
                    let msg = cell_error(provider, e)?;
                    rep.check(false, || format!("{set}, n={n}"), msg, "");
                    continue;
                }
            };
            for r in 0..=r_max {
                let cell = || format!("{{{set}}}, r={r}, n={n}");
                match perms_from_words(set, r, n, provider) {
                    Ok(lhs) => {
                        let rhs = BigInt::from(perms.get(r));
                        rep.check(lhs == rhs, cell, &lhs, &rhs);
                    }
                    Err(e) => {
                        let msg = cell_error(provider, e)?;
                        rep.check(false, cell, msg, perms.get(r));
                    }
                }
            }
        }
        for n in 1..=yna_n {
            for a in 1..=n {
                for r in 0..=1 {
                    let cell = || format!("{{{set}}}, r={r}, a={a}, n={n}");
                    match yna_decomposition_check(set, r, a, n, provider) {
                        Ok(c) => rep_yna(&mut yna, c, cell),
                        Err(e) => {
                            let msg = cell_error(provider, e)?;
                            yna.check(false, cell, msg, "");
                        }
                    }
                }
            }
        }
    }
    Ok(vec![rep.done(), yna.done()])
}

fn rep_yna(rep: &mut Report, c: patternlab_core::identities::YnaCheck, cell: impl Fn() -> String) {
    rep.check(
        BigInt::from(c.direct.clone()) == c.inclusion_exclusion,
        &cell,
        &c.direct,
        &c.inclusion_exclusion,
    );
    rep.check(c.all_words == c.partition_sum, &cell, &c.all_words, &c.partition_sum);
}

/// Closed forms against brute force (and the transfer matrix where it
/// applies), plus the alternating binomial identity.
pub fn closed_forms(grid: &Grid, provider: &mut ParallelProvider) -> Result<Vec<Report>> {
    let k_max = grid.k_max.unwrap_or(4);
    let n_max = grid.n_max.unwrap_or(8);
    let perm_max = grid.n_max.map_or(9, |n| n.min(provider.config.perm_cap));
    let inc = |s: &str| PatternSet::from(s.parse::<Pattern>().expect("built-in pattern parses"));
    let (v123, v132, v12) = (inc("123"), inc("132"), inc("12"));

    let mut burstein = Report::new(
        "closed form = f_0^123([k]^n) = f_0^132([k]^n)",
        format!("1 <= k <= {k_max}, 1 <= n <= {n_max}"),
    );
    for k in 1..=k_max {
        let automata = [&v123, &v132].map(|s| AutomatonGraph::build(s.single().expect("one pattern"), k));
        for n in 1..=n_max {
            let cell = || format!("k={k}, n={n}");
            let formula = match burstein_closed_form(k, n) {
                Ok(f) => f,
                Err(e) => {
                    burstein.check(false, cell, e, "");
                    continue;
                }
            };
            for (set, g) in [&v123, &v132].into_iter().zip(&automata) {
                let brute = provider.word_table(set, k, n, Some(0)).map_err(|e| provider.fatal(e))?.f0();
                burstein.check(formula == brute, cell, &formula, format!("brute force {set}: {brute}"));
                let g = g.as_ref().map_err(|e| CliError::Count(e.clone()))?;
                let transfer = &avoider_counts(g, n as usize)[n as usize];
                burstein.check(&formula == transfer, cell, &formula, format!("transfer {set}: {transfer}"));
            }
        }
    }

    let mut cat = Report::new(
        "Catalan(n) = f_0^123(S_n) = f_0^132(S_n)",
        format!("1 <= n <= {perm_max}"),
    );
    for n in 1..=perm_max {
        let c = catalan(n as u64);
        for set in [&v123, &v132] {
            let brute = provider.perm_table(set, n, Some(0)).map_err(|e| provider.fatal(e))?.f0();
            cat.check(c == brute, || format!("{set}, n={n}"), &c, &brute);
        }
    }

    let mut weak = Report::new("C(n+k-1, n) = f_0^12([k]^n)", format!("1 <= k <= {k_max}, 1 <= n <= {n_max}"));
    for k in 1..=k_max {
        for n in 1..=n_max {
            let c = weak_words_closed_form(k as u64, n as u64);
            let brute = provider.word_table(&v12, k, n, Some(0)).map_err(|e| provider.fatal(e))?.f0();
            weak.check(c == brute, || format!("k={k}, n={n}"), &c, &brute);
        }
    }

    let mut binom = Report::new("sum_k (-1)^(n-k) C(n,k) C(n+k-1,n) = 1", "1 <= n <= 25".into());
    for n in 1..=25 {
        let value = binomial_identity_value(n);
        binom.check(value == BigInt::from(1), || format!("n={n}"), &value, 1);
    }
    Ok(vec![burstein.done(), cat.done(), weak.done(), binom.done()])
}

/// Coefficientwise comparison of the two exponential generating functions.
pub fn egf(grid: &Grid, provider: &mut ParallelProvider) -> Result<Vec<Report>> {
    let patterns = grid.patterns.clone().unwrap_or_else(|| pats(&["12", "123"]));
    let order = grid.n_max.unwrap_or(6) as usize;
    let mut rep = Report::new(
        "S_r(x) = sum_k (-x)^k/k! d^k/dx^k W_{r,k}(-x)",
        format!("v in {{{}}}, r <= 1, coefficients x^1..x^{order}", names(&patterns)),
    );
    for v in &patterns {
        let set = PatternSet::from(v.clone());
        for r in 0..=1 {
            match egf_identity_check(&set, r, order, provider) {
                Ok(c) => {
                    for i in 1..=order {
                        let (l, rt) = (c.lhs.coeff(i), c.rhs.coeff(i));
                        rep.check(l == rt, || format!("v={v}, r={r}, x^{i}"), &l, &rt);
                    }
                }
                Err(e) => {
                    let msg = cell_error(provider, e)?;
                    rep.check(false, || format!("v={v}, r={r}"), msg, "");
                }
            }
        }
    }
    Ok(vec![rep.done()])
}

/// `f_0([n]^n) <= sum_i C(n,i)^2 f_0([i]^(n-i)) f_0(S_i)`.
pub fn sdisc(grid: &Grid, provider: &mut ParallelProvider) -> Result<Vec<Report>> {
    let patterns = grid.patterns.clone().unwrap_or_else(|| pats(&["12", "123", "132"]));
    let n_max = grid.n_max.unwrap_or(7);
    let mut rep = Report::new(
        "f_0([n]^n) <= sum_i C(n,i)^2 f_0([i]^(n-i)) f_0(S_i)",
        format!("v in {{{}}}, 1 <= n <= {n_max}", names(&patterns)),
    );
    for v in &patterns {
        for n in 1..=n_max {
            let cell = || format!("v={v}, n={n}");
            match sdisc_check(v, n, provider) {
                Ok(c) => rep.check(c.holds, cell, &c.lhs, &c.rhs),
                Err(e) => {
                    let msg = cell_error(provider, e)?;
                    rep.check(false, cell, msg, "");
                }
            }
        }
    }
    Ok(vec![rep.done()])
}
