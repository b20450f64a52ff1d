//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! fails. Run with `cargo test -p patternlab --test acceptance`.

use std::cell::OnceCell;
use std::process::Command;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::{One, Signed, Zero};
use patternlab::parallel::ParallelProvider;
use patternlab::verify::{self, Grid, Report};
use patternlab_core::combinat::{binomial, pow};
use patternlab_core::enumerate::{count_words, subseq_histogram};
use patternlab_core::transfer::{avoidance_probability, avoider_counts, simulate};
use patternlab_core::word::occ;
use patternlab_core::{AutomatonGraph, EnumConfig, Pattern, PatternSet, Rational, Word};

type Outcome = Result<String, String>;
type Check<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn canonical_upto(l: usize) -> Vec<Pattern> {
    (2..=l).flat_map(Pattern::all_of_length).collect()
}

fn provider() -> ParallelProvider {
    ParallelProvider::new(None, EnumConfig::default(), None).expect("worker pool")
}

/// Summarises suite reports; fails on any failing or skipped cell.
fn reports(rs: &[&Report]) -> Outcome {
    let mut cells = 0;
    for r in rs {
        cells += r.cells;
        if let Some(f) = r.failures.first() {
            return Err(format!("{}: {} failures, first {}: {} vs {}", r.identity, r.failures.len(), f.cell, f.lhs, f.rhs));
        }
        if !r.skipped.is_empty() {
            return Err(format!("{}: {} cells skipped, first {}", r.identity, r.skipped.len(), r.skipped[0]));
        }
        if r.cells == 0 {
            return Err(format!("{}: no cells checked", r.identity));
        }
    }
    Ok(format!("{cells} cells"))
}

/// Every word of `[k]^n` in lexicographic order.
fn all_words(k: u32, n: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w: Vec<u32>| {
                (1..=k).map(move |x| {
                    let mut w = w.clone();
                    w.push(x);
                    w
                })
            })
            .collect();
    }
    out
}

fn counting_oracle() -> Outcome {
    let cfg = EnumConfig::default();
    let mut cells = 0;
    for v in canonical_upto(3) {
        let set = PatternSet::from(v.clone());
        for k in 1..=4 {
            let g = AutomatonGraph::build(&v, k).map_err(|e| e.to_string())?;
            let transfer = avoider_counts(&g, 8);
            for n in 0..=8u32 {
                let brute = count_words(&set, k, n, Some(0), &cfg).map_err(|e| e.to_string())?.f0();
                if brute != transfer[n as usize] {
                    return Err(format!("v={v} k={k} n={n}: transfer {} vs brute {brute}", transfer[n as usize]));
                }
                cells += 1;
            }
        }
    }
    Ok(format!("{cells} cells"))
}

fn detection_oracle() -> Outcome {
    let mut words = 0u64;
    for v in canonical_upto(3) {
        for k in 1..=3 {
            let g = AutomatonGraph::build(&v, k).map_err(|e| e.to_string())?;
            for n in 0..=7 {
                for w in all_words(k, n) {
                    let w = Word::new(w).expect("positive letters");
                    let avoids = g.detect_avoidance(&w).map_err(|e| e.to_string())?;
                    if avoids != occ(&v, &w).is_zero() {
                        return Err(format!("v={v} k={k} w={w}: automaton says avoids={avoids}"));
                    }
                    words += 1;
                }
            }
        }
    }
    Ok(format!("{words} words"))
}

fn sandwich() -> Outcome {
    let r = verify::bounds(&Grid::default(), &mut provider()).map_err(|e| e.to_string())?;
    reports(&r.iter().collect::<Vec<_>>())
}

fn structure(lemmas: &[Report]) -> Outcome {
    reports(&[&lemmas[0], &lemmas[1]])
}

fn growth(lemmas: &[Report]) -> Outcome {
    let structural = reports(&[&lemmas[2]])?;
    let g = AutomatonGraph::build(&"123".parse().expect("pattern"), 4).map_err(|e| e.to_string())?;
    let counts = avoider_counts(&g, 501);
    let ratio = Rational::new(counts[501].clone().into(), counts[500].clone().into());
    let gap = &ratio - Rational::from_integer(2.into());
    let tol = Rational::new(5.into(), 100.into());
    let gap_abs = gap.abs();
    if gap_abs > tol {
        return Err(format!("|f_0(501)/f_0(500) - 2| = {} > 0.05", patternlab::format::decimal(&gap_abs, 6)));
    }
    Ok(format!(
        "{structural}; f_0(501)/f_0(500) = {}",
        patternlab::format::decimal(&ratio, 6)
    ))
}

fn words_to_perms() -> Outcome {
    let r = verify::words_to_perms(&Grid::default(), &mut provider()).map_err(|e| e.to_string())?;
    reports(&r.iter().collect::<Vec<_>>())
}

fn egf() -> Outcome {
    let r = verify::egf(&Grid::default(), &mut provider()).map_err(|e| e.to_string())?;
    reports(&r.iter().collect::<Vec<_>>())
}

fn closed_forms(closed: &[Report]) -> Outcome {
    reports(&[&closed[0], &closed[1], &closed[2]])
}

fn binomial_and_sdisc(closed: &[Report]) -> Outcome {
    let sd = verify::sdisc(&Grid::default(), &mut provider()).map_err(|e| e.to_string())?;
    reports(&[&closed[3], &sd[0]])
}

fn reference_live_counts() -> Outcome {
    let mut seen = Vec::new();
    for (v, want) in [("123", 12), ("213", 10), ("132", 12)] {
        let g = AutomatonGraph::build(&v.parse().expect("pattern"), 4).map_err(|e| e.to_string())?;
        if g.live_count() != want {
            return Err(format!("({v},4): {} live states, expected {want}", g.live_count()));
        }
        seen.push(format!("{v}:{want}"));
    }
    Ok(seen.join(" "))
}

fn simulation() -> Outcome {
    let v: Pattern = "123".parse().expect("pattern");
    let g = AutomatonGraph::build(&v, 4).map_err(|e| e.to_string())?;
    let sim = simulate(&g, 10, 100_000, 20240501).map_err(|e| e.to_string())?;
    let exact = avoidance_probability(&g, 10);
    let diff = (&sim.estimate - &exact).abs();
    let z = num_traits::ToPrimitive::to_f64(&diff).expect("finite") / sim.std_error;
    if z > 4.0 {
        return Err(format!("estimate off by {z:.2} standard errors"));
    }
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_patternlab"))
            .args(["simulate", "--pattern", "123", "--k", "4", "--n", "10"])
            .args(["--trials", "100000", "--seed", "20240501", "--threads", threads])
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b, c) = (run("1")?, run("1")?, run("4")?);
    if !a.status.success() || a.stdout.is_empty() {
        return Err(format!("simulate failed: {}", String::from_utf8_lossy(&a.stderr)));
    }
    if a.stdout != b.stdout || a.stdout != c.stdout {
        return Err("repeated runs differ".into());
    }
    Ok(format!("{z:.2} standard errors; {} identical bytes over 3 runs", a.stdout.len()))
}

fn decomposition() -> Outcome {
    let cfg = EnumConfig::default();
    let v: Pattern = "123".parse().expect("pattern");
    let (k, n, r) = (3u32, 6u32, 1u64);
    let h = subseq_histogram(&v, k, n, r, &cfg).map_err(|e| e.to_string())?;
    let support: Vec<usize> = h.values.keys().copied().collect();
    if support.iter().any(|&s| s != 3) {
        return Err(format!("support {support:?} not within {{3}}"));
    }
    let f_r = count_words(&PatternSet::from(v.clone()), k, n, Some(r), &cfg).map_err(|e| e.to_string())?.get(r);
    if h.total() != f_r {
        return Err(format!("sum over s = {} but f_1 = {f_r}", h.total()));
    }
    let g = AutomatonGraph::build(&v, k).map_err(|e| e.to_string())?;
    let f0 = avoider_counts(&g, n as usize);
    let l = v.len();
    for s in (l + r as usize - 1)..=(r as usize * l) {
        let base = &f0[n as usize - s];
        let upper = pow(k as u64, s as u64) * binomial(n as u64, s as u64) * base;
        let f = h.get(s);
        if !(base <= &f && f <= upper) {
            return Err(format!("s={s}: {base} <= {f} <= {upper} fails"));
        }
    }
    if f_r.is_zero() || f_r == BigUint::one() {
        return Err("degenerate f_1".into());
    }
    Ok(format!("f_1 = {f_r}, all at s = 3"))
}

fn main() {
    // shared by two criteria each; computed when first needed
    let lemmas_cell = OnceCell::new();
    let lemmas = || lemmas_cell.get_or_init(|| verify::automaton_structure(&Grid::default(), &mut provider()));
    let closed_cell = OnceCell::new();
    let closed = || closed_cell.get_or_init(|| verify::closed_forms(&Grid::default(), &mut provider()));

    let criteria: Vec<(&str, Check)> = vec![
        ("counting oracle: transfer = brute force, l <= 3, k <= 4, n <= 8", Box::new(counting_oracle)),
        ("detection oracle: automaton = occ == 0, l <= 3, k <= 3, n <= 7", Box::new(detection_oracle)),
        ("sandwich (d-1)^n <= f_0 <= birth bound, k = 4, n <= 40", Box::new(sandwich)),
        ("lemmas: #L >= k-d+1 and chain <= C(k,d)*l, l <= 4, k <= 5", Box::new(|| structure(lemmas()))),
        ("growth: max diagonal = d-1 and ratio at n = 500 within 0.05 of 2", Box::new(|| growth(lemmas()))),
        ("words-to-permutations alternating sum, l <= 3 and {12,21}, r <= 2, n <= 7", Box::new(words_to_perms)),
        ("generating function relation to order 6, v in {12,123}, r <= 1", Box::new(egf)),
        ("closed forms: Burstein, Catalan, C(n+k-1,n)", Box::new(|| match closed() {
            Ok(c) => closed_forms(c),
            Err(e) => Err(e.to_string()),
        })),
        ("binomial identity n <= 25 and permutation bound for n <= 7", Box::new(|| match closed() {
            Ok(c) => binomial_and_sdisc(c),
            Err(e) => Err(e.to_string()),
        })),
        ("live-state counts 12, 10, 12 for (123,4), (213,4), (132,4)", Box::new(reference_live_counts)),
        ("simulation within 4 standard errors and byte-reproducible", Box::new(simulation)),
        ("occurrence-subsequence decomposition, 123, k = 3, n = 6, r = 1", Box::new(decomposition)),
    ];

    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} ({detail}; {secs:.1}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
