//! Argument parsing and command dispatch.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use patternlab_core::enumerate::{check_word_budget, subseq_histogram, wilf_perms_compare, wilf_words_compare};
use patternlab_core::transfer::{avoidance_probability, avoider_counts, growth_rate};
use patternlab_core::{AutomatonGraph, CountTable, Domain, EnumConfig, Pattern, PatternSet, Rational};

use crate::cache::{DiskCache, CACHE_ENV};
use crate::error::{CliError, Result};
use crate::format::{
    decimal, graph_text, histogram_csv, table_csv, table_text, to_json, GraphDoc, GrowthDoc, HistogramDoc, MatrixDoc,
    RatioDoc, SimulationDoc, TableDoc, WilfDoc,
};
use crate::parallel::ParallelProvider;
use crate::verify::{self, Grid, Suite};

#[derive(Debug, Parser)]
#[command(name = "patternlab", version, about = "Count pattern occurrences in k-ary words and permutations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Directory for cached count tables.
    #[arg(long, global = true, env = CACHE_ENV)]
    pub cache_dir: Option<PathBuf>,

    /// Worker threads (default: one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Largest number of words (k^n) to enumerate.
    #[arg(long, global = true)]
    pub budget: Option<u64>,

    /// Largest number of live automaton states.
    #[arg(long, global = true)]
    pub state_limit: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Dot,
    Table,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Occurrence distribution over [k]^n.
    Count {
        /// Pattern, or several separated by ';'.
        #[arg(long, alias = "patterns")]
        pattern: PatternSet,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: u32,
        /// Only tabulate occurrence counts up to this value.
        #[arg(long)]
        r: Option<u64>,
    },
    /// Occurrence distribution over the permutations of [n].
    PermCount {
        #[arg(long, alias = "patterns")]
        pattern: PatternSet,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        r: Option<u64>,
    },
    /// Avoidance automaton of a pattern over [k].
    Automaton {
        #[arg(long)]
        pattern: Pattern,
        #[arg(long)]
        k: u32,
        /// Draw the absorbing state in DOT output.
        #[arg(long)]
        sink: bool,
        /// Emit the transition probability matrix instead of the graph.
        #[arg(long)]
        matrix: bool,
    },
    /// Exponential growth rate of the avoider counts.
    Growth {
        #[arg(long)]
        pattern: Pattern,
        #[arg(long)]
        k: u32,
        /// Also report f_0(n+1)/f_0(n) at this n.
        #[arg(long)]
        n: Option<u64>,
    },
    /// Monte Carlo estimate of the avoidance probability.
    Simulate {
        #[arg(long)]
        pattern: Pattern,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Patterns to check, separated by ';'.
        #[arg(long, alias = "patterns")]
        pattern: Option<PatternSet>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        k_max: Option<u32>,
        #[arg(long)]
        n_max: Option<u32>,
        #[arg(long)]
        l_max: Option<usize>,
    },
    /// Compare avoider counts of two patterns over a grid.
    Wilf {
        /// Exactly two patterns separated by ';'.
        #[arg(long, alias = "pattern")]
        patterns: PatternSet,
        #[arg(long, default_value_t = 5)]
        k_max: u32,
        #[arg(long, default_value_t = 8)]
        n_max: u32,
        /// Compare over permutations instead of words.
        #[arg(long)]
        perms: bool,
    },
    /// Words with exactly r occurrences, by occurrence-subsequence length.
    Histogram {
        #[arg(long)]
        pattern: Pattern,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = 1)]
        r: u64,
    },
}

/// Text to emit and whether the command succeeded.
#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub success: bool,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome { text, success: true }
    }
}

fn pick(requested: Option<Format>, allowed: &[Format], command: &str) -> Result<Format> {
    let f = requested.unwrap_or(allowed[0]);
    if !allowed.contains(&f) {
        let names: Vec<String> = allowed
            .iter()
            .map(|a| a.to_possible_value().expect("formats have names").get_name().to_string())
            .collect();
        return Err(CliError::Usage(format!("{command} supports --format {}", names.join("|"))));
    }
    Ok(f)
}

fn positive_k(k: u32) -> Result<()> {
    if k == 0 {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    Ok(())
}

fn config(common: &Common) -> Result<EnumConfig> {
    let mut cfg = EnumConfig::default();
    if let Some(b) = common.budget {
        if b == 0 {
            return Err(CliError::Usage("--budget must be positive".into()));
        }
        cfg.word_budget = b;
    }
    if let Some(s) = common.state_limit {
        if s == 0 {
            return Err(CliError::Usage("--state-limit must be positive".into()));
        }
        cfg.state_limit = s;
    }
    Ok(cfg)
}

fn provider(common: &Common) -> Result<ParallelProvider> {
    let cache = common.cache_dir.as_ref().map(DiskCache::open).transpose()?;
    ParallelProvider::new(common.threads, config(common)?, cache)
}

fn automaton(v: &Pattern, k: u32, cfg: &EnumConfig) -> Result<AutomatonGraph> {
    positive_k(k)?;
    Ok(AutomatonGraph::build_with_limit(v, k, cfg.state_limit)?)
}

#[derive(serde::Serialize)]
struct CountDoc {
    #[serde(flatten)]
    table: TableDoc,
    /// `enumeration` or `transfer-matrix`.
    method: &'static str,
}

fn emit_table(t: &CountTable, method: &'static str, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => to_json(&CountDoc {
            table: TableDoc::from(t),
            method,
        }),
        Format::Csv => table_csv(std::slice::from_ref(t))?,
        _ => table_text(t),
    })
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let common = &cli.common;
    match &cli.command {
        Command::Count { pattern, k, n, r } => {
            positive_k(*k)?;
            let format = pick(common.format, &[Format::Json, Format::Csv, Format::Table], "count")?;
            let mut p = provider(common)?;
            let over_budget = check_word_budget(*k, *n, &p.config).is_err();
            // avoiders of one pattern have an exact count beyond the budget
            if over_budget && matches!(r, Some(0)) {
                if let Some(v) = pattern.single() {
                    let g = automaton(v, *k, &p.config)?;
                    let f0 = avoider_counts(&g, *n as usize).pop().expect("n+1 entries");
                    let values = BTreeMap::from([(0, f0)]);
                    let t = CountTable::from_values(pattern.clone(), Domain::Words { k: *k }, *n, Some(0), values);
                    return Ok(Outcome::ok(emit_table(&t, "transfer-matrix", format)?));
                }
            }
            let t = p.table(pattern, Domain::Words { k: *k }, *n, *r)?;
            Ok(Outcome::ok(emit_table(&t, "enumeration", format)?))
        }
        Command::PermCount { pattern, n, r } => {
            let format = pick(common.format, &[Format::Json, Format::Csv, Format::Table], "perm-count")?;
            let t = provider(common)?.table(pattern, Domain::Perms, *n, *r)?;
            Ok(Outcome::ok(emit_table(&t, "enumeration", format)?))
        }
        Command::Automaton { pattern, k, sink, matrix } => {
            let g = automaton(pattern, *k, &config(common)?)?;
            if *matrix {
                pick(common.format, &[Format::Json], "automaton --matrix")?;
                return Ok(Outcome::ok(to_json(&MatrixDoc::from(&g))));
            }
            let text = match pick(common.format, &[Format::Json, Format::Dot, Format::Table], "automaton")? {
                Format::Json => to_json(&GraphDoc::from(&g)),
                Format::Dot => g.to_dot(*sink),
                _ => graph_text(&g),
            };
            Ok(Outcome::ok(text))
        }
        Command::Growth { pattern, k, n } => {
            pick(common.format, &[Format::Json], "growth")?;
            let g = automaton(pattern, *k, &config(common)?)?;
            let mut doc = GrowthDoc::new(&g, &growth_rate(&g));
            if let Some(n) = n {
                let counts = avoider_counts(&g, *n as usize + 1);
                let (a, b) = (&counts[*n as usize], &counts[*n as usize + 1]);
                let ratio = if a == &0u32.into() {
                    "undefined".to_string()
                } else {
                    decimal(&Rational::new(b.clone().into(), a.clone().into()), 12)
                };
                doc.ratio = Some(RatioDoc {
                    n: *n,
                    f0_n: a.to_string(),
                    f0_next: b.to_string(),
                    ratio,
                });
            }
            Ok(Outcome::ok(to_json(&doc)))
        }
        Command::Simulate { pattern, k, n, trials, seed } => {
            pick(common.format, &[Format::Json], "simulate")?;
            let p = provider(common)?;
            let g = automaton(pattern, *k, &p.config)?;
            let sim = p.simulate(&g, *n, *trials, *seed)?;
            let exact = avoidance_probability(&g, *n);
            Ok(Outcome::ok(to_json(&SimulationDoc::new(&g, *n, &sim, &exact))))
        }
        Command::Verify { suite, pattern, k, k_max, n_max, l_max } => {
            pick(common.format, &[Format::Json], "verify")?;
            let grid = Grid {
                patterns: pattern.as_ref().map(|s| s.iter().cloned().collect()),
                k: *k,
                k_max: *k_max,
                n_max: *n_max,
                l_max: *l_max,
            };
            let mut p = provider(common)?;
            let report = verify::run(*suite, &grid, &mut p)?;
            Ok(Outcome {
                text: to_json(&report),
                success: report.passed(),
            })
        }
        Command::Wilf { patterns, k_max, n_max, perms } => {
            pick(common.format, &[Format::Json], "wilf")?;
            let two: Vec<&Pattern> = patterns.iter().collect();
            let [a, b] = two[..] else {
                return Err(CliError::Usage(format!(
                    "wilf needs exactly two distinct patterns, got {}",
                    two.len()
                )));
            };
            let p = provider(common)?;
            let cfg = p.config;
            let (report, domain) = if *perms {
                (p.install(|| wilf_perms_compare(a, b, *n_max, &cfg)), "perms")
            } else {
                (p.install(|| wilf_words_compare(a, b, *k_max, *n_max, &cfg)), "words")
            };
            Ok(Outcome::ok(to_json(&WilfDoc::new(&report, domain))))
        }
        Command::Histogram { pattern, k, n, r } => {
            positive_k(*k)?;
            let format = pick(common.format, &[Format::Json, Format::Csv], "histogram")?;
            let h = subseq_histogram(pattern, *k, *n, *r, &config(common)?)?;
            Ok(Outcome::ok(match format {
                Format::Json => to_json(&HistogramDoc::from(&h)),
                _ => histogram_csv(&h)?,
            }))
        }
    }
}

fn write_out(common: &Common, text: &str) -> Result<()> {
    match &common.out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(format!("writing {}", path.display()), e)),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::io("writing standard output", e))
        }
    }
}

/// Runs the parsed command line and returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    let result = run(cli).and_then(|o| {
        write_out(&cli.common, &o.text)?;
        Ok(o.success)
    });
    match result {
        Ok(true) => 0,
        Ok(false) => CliError::VerifyFailed(String::new()).exit_code(),
        Err(e) => {
            eprintln!("patternlab: {e}");
            e.exit_code()
        }
    }
}
