//! JSON and CSV renderings of results. Counts are always decimal strings.

use std::collections::BTreeMap;

use num_traits::ToPrimitive;
use patternlab_core::enumerate::{WilfReport, WilfVerdict, Witness};
use patternlab_core::transfer::{transition_matrix, GrowthRate};
use patternlab_core::{AutomatonGraph, CountTable, Domain, PatternSet, Rational, SimulationResult, SubseqHistogram};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDoc {
    pub patterns: String,
    /// `words`, `surjective` or `perms`.
    pub domain: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    pub n: u32,
    /// Present when occurrence counts above it were not tabulated.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_r: Option<u64>,
    pub f0: String,
    /// Non-zero `f_r`, keyed by `r`.
    pub counts: BTreeMap<u64, String>,
}

impl From<&CountTable> for TableDoc {
    fn from(t: &CountTable) -> Self {
        let (domain, k) = match t.domain {
            Domain::Words { k } => ("words", Some(k)),
            Domain::Surjective { k } => ("surjective", Some(k)),
            Domain::Perms => ("perms", None),
        };
        TableDoc {
            patterns: t.patterns.to_string(),
            domain: domain.into(),
            k,
            n: t.n,
            max_r: t.max_r,
            f0: t.f0().to_string(),
            counts: t.values().iter().map(|(&r, c)| (r, c.to_string())).collect(),
        }
    }
}

impl TableDoc {
    pub fn to_table(&self) -> Result<CountTable> {
        let bad = |what: &str| CliError::Usage(format!("malformed table document: {what}"));
        let patterns: PatternSet = self.patterns.parse()?;
        let domain = match (self.domain.as_str(), self.k) {
            ("words", Some(k)) => Domain::Words { k },
            ("surjective", Some(k)) => Domain::Surjective { k },
            ("perms", None) => Domain::Perms,
            _ => return Err(bad("domain")),
        };
        let mut values = BTreeMap::new();
        for (&r, c) in &self.counts {
            values.insert(r, c.parse().map_err(|_| bad("count"))?);
        }
        Ok(CountTable::from_values(patterns, domain, self.n, self.max_r, values))
    }
}

/// `k,n,r,count` rows; `k` is empty for permutations.
pub fn table_csv(tables: &[CountTable]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "n", "r", "count"]).map_err(csv_err)?;
    for t in tables {
        let k = match t.domain {
            Domain::Words { k } | Domain::Surjective { k } => k.to_string(),
            Domain::Perms => String::new(),
        };
        for (r, c) in t.values() {
            w.write_record([k.clone(), t.n.to_string(), r.to_string(), c.to_string()])
                .map_err(csv_err)?;
        }
    }
    finish_csv(w)
}

pub fn table_text(t: &CountTable) -> String {
    let mut out = format!("{}\n", t.key());
    for (r, c) in t.values() {
        out.push_str(&format!("{r:>6}  {c}\n"));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramDoc {
    pub pattern: String,
    pub k: u32,
    pub n: u32,
    pub r: u64,
    pub total: String,
    /// `f_{r,s}`, keyed by occurrence-subsequence length `s`.
    pub counts: BTreeMap<usize, String>,
}

impl From<&SubseqHistogram> for HistogramDoc {
    fn from(h: &SubseqHistogram) -> Self {
        HistogramDoc {
            pattern: h.pattern.to_string(),
            k: h.k,
            n: h.n,
            r: h.r,
            total: h.total().to_string(),
            counts: h.values.iter().map(|(&s, c)| (s, c.to_string())).collect(),
        }
    }
}

/// `k,n,r,s,count` rows.
pub fn histogram_csv(h: &SubseqHistogram) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["k", "n", "r", "s", "count"]).map_err(csv_err)?;
    for (s, c) in &h.values {
        w.write_record([h.k.to_string(), h.n.to_string(), h.r.to_string(), s.to_string(), c.to_string()])
            .map_err(csv_err)?;
    }
    finish_csv(w)
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::io("writing CSV", e.into())
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| CliError::io("writing CSV", e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("CSV fields are UTF-8"))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransitionDoc {
    pub state: usize,
    pub letter: u32,
    pub next: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDoc {
    pub k: u32,
    pub pattern: String,
    pub live_count: usize,
    pub depth: usize,
    /// Per live state, the matched prefix of each instance.
    pub states: Vec<Vec<String>>,
    /// Every letter out of every live state, absorbing ones included.
    pub transitions: Vec<TransitionDoc>,
    /// Index of the collapsed absorbing state.
    pub sink: usize,
}

impl From<&AutomatonGraph> for GraphDoc {
    fn from(g: &AutomatonGraph) -> Self {
        let inst = g.instances();
        let states = g
            .states()
            .iter()
            .map(|s| {
                (0..inst.len())
                    .map(|i| inst.prefix(s, i).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
                    .collect()
            })
            .collect();
        let mut transitions = Vec::new();
        for state in 0..g.live_count() {
            for letter in 1..=g.k() {
                transitions.push(TransitionDoc {
                    state,
                    letter,
                    next: g.next(state, letter),
                });
            }
        }
        GraphDoc {
            k: g.k(),
            pattern: g.pattern().to_string(),
            live_count: g.live_count(),
            depth: g.depth(),
            states,
            transitions,
            sink: g.sink(),
        }
    }
}

pub fn graph_text(g: &AutomatonGraph) -> String {
    let mut out = format!(
        "pattern {} k={} live={} depth={}\n",
        g.pattern(),
        g.k(),
        g.live_count(),
        g.depth()
    );
    for (i, s) in g.states().iter().enumerate() {
        let adv: Vec<String> = g.advancing(i).iter().map(|x| x.to_string()).collect();
        out.push_str(&format!("{i:>5}  {}  L={{{}}}\n", g.instances().label(s, "e"), adv.join(",")));
    }
    out
}

/// Dense transition probabilities, live states then the sink, as
/// `[numerator, denominator]` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub order: Vec<String>,
    pub entries: Vec<Vec<[u64; 2]>>,
}

impl From<&AutomatonGraph> for MatrixDoc {
    fn from(g: &AutomatonGraph) -> Self {
        let p = transition_matrix(g);
        let mut order: Vec<String> = g.states().iter().map(|s| g.instances().label(s, "e")).collect();
        order.push("sink".into());
        let entries = (0..p.size())
            .map(|i| {
                (0..p.size())
                    .map(|j| {
                        let e = p.entry(i, j);
                        [small(e.numer()), small(e.denom())]
                    })
                    .collect()
            })
            .collect();
        MatrixDoc { order, entries }
    }
}

fn small(x: &num_bigint::BigInt) -> u64 {
    x.to_u64().expect("transition probabilities are m/k with small m, k")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthDoc {
    pub pattern: String,
    pub k: u32,
    pub d: u32,
    pub live_count: usize,
    pub depth: usize,
    pub rate: u32,
    /// True when `k < d`: every word avoids and the rate is `k`.
    pub degenerate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<RatioDoc>,
}

/// `f_0(n+1) / f_0(n)` for one `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioDoc {
    pub n: u64,
    pub f0_n: String,
    pub f0_next: String,
    pub ratio: String,
}

impl GrowthDoc {
    pub fn new(g: &AutomatonGraph, rate: &GrowthRate) -> Self {
        GrowthDoc {
            pattern: g.pattern().to_string(),
            k: g.k(),
            d: g.pattern().distinct(),
            live_count: g.live_count(),
            depth: g.depth(),
            rate: rate.rate,
            degenerate: rate.degenerate,
            ratio: None,
        }
    }
}

/// Fixed-point decimal rendering of a non-negative rational.
pub fn decimal(x: &Rational, digits: usize) -> String {
    use num_bigint::BigInt;
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = (x * Rational::from_integer(scale.clone())).round().to_integer();
    let int = &scaled / &scale;
    let frac = (&scaled % &scale).to_string();
    if digits == 0 {
        return int.to_string();
    }
    format!("{int}.{}{frac}", "0".repeat(digits - frac.len()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationDoc {
    pub pattern: String,
    pub k: u32,
    pub n: usize,
    pub trials: u64,
    pub seed: u64,
    pub hits: u64,
    pub estimate: f64,
    pub std_error: f64,
    /// Exact avoidance probability from the transfer matrix.
    pub exact: f64,
    pub z_score: f64,
}

impl SimulationDoc {
    pub fn new(g: &AutomatonGraph, n: usize, sim: &SimulationResult, exact: &Rational) -> Self {
        let estimate = sim.estimate.to_f64().expect("probabilities fit in f64");
        let exact = exact.to_f64().expect("probabilities fit in f64");
        let z_score = if sim.std_error > 0.0 {
            (estimate - exact) / sim.std_error
        } else {
            0.0
        };
        SimulationDoc {
            pattern: g.pattern().to_string(),
            k: g.k(),
            n,
            trials: sim.trials,
            seed: sim.seed,
            hits: sim.hits,
            estimate,
            std_error: sim.std_error,
            exact,
            z_score,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    pub n: u32,
    pub left: String,
    pub right: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WilfDoc {
    pub left: String,
    pub right: String,
    /// `words` or `perms`.
    pub domain: String,
    /// `equal-on-grid`, `differ` or `partial`.
    pub verdict: String,
    pub cells_checked: usize,
    pub witness: Option<WitnessDoc>,
    pub unexplored: Vec<(u32, u32)>,
}

impl WilfDoc {
    pub fn new(r: &WilfReport, domain: &str) -> Self {
        let verdict = match r.verdict() {
            WilfVerdict::EqualOnGrid => "equal-on-grid",
            WilfVerdict::Differ => "differ",
            WilfVerdict::Partial => "partial",
        };
        WilfDoc {
            left: r.left.to_string(),
            right: r.right.to_string(),
            domain: domain.into(),
            verdict: verdict.into(),
            cells_checked: r.cells_checked,
            witness: r.witness.as_ref().map(|w: &Witness| WitnessDoc {
                k: w.k,
                n: w.n,
                left: w.left.to_string(),
                right: w.right.to_string(),
            }),
            unexplored: r.unexplored.clone(),
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("documents serialize");
    s.push('\n');
    s
}
