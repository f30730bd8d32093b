//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Run with `cargo test -p entropy-outlier-cli --test acceptance`; the test
//! profile is optimized so the timing criteria are meaningful.

use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use entropy_outlier::bench::{bench_scalability, Algorithm, BenchAxis, BenchConfig};
use entropy_outlier::synth::SeededStream;
use entropy_outlier::{
    coverage_at, downsample_class, drop_missing, exhaustive_optimal, greedy_detect_with, joint_entropy, load_table,
    naive_greedy_detect, CategoricalTable, ColumnSelector, DetectOptions, FrequencyModel, LoadSpec, SynthSpec,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const SEQUENTIAL: DetectOptions = DetectOptions {
    threads: 1,
    verify_cache: false,
};

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("lymphography coverage", lymphography),
        ("wisconsin coverage", wisconsin),
        ("greedy equals naive oracle", oracle_equivalence),
        ("incremental score equals rebuilt entropy", incremental_correctness),
        ("greedy against exhaustive optimum", exhaustive_checks),
        ("entropy bounds and subadditivity", entropy_bounds),
        ("linear scaling in records and outliers", scalability),
        ("incremental speedup over naive", speedup),
        ("thread-count determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (number, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{}] {name}: {detail} ({secs:.2} s)", number + 1),
            Err(detail) => {
                println!("FAIL [{}] {name}: {detail} ({secs:.2} s)", number + 1);
                failed.push(number + 1);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} of {} criteria failed: {failed:?}", failed.len(), criteria.len());
        ExitCode::FAILURE
    }
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn lymphography() -> Outcome {
    let start = Instant::now();
    let table = load_table(&LoadSpec {
        label_column: Some(ColumnSelector::Index(0)),
        ..LoadSpec::new(data("lymphography.data"))
    })
    .map_err(|e| e.to_string())?;
    let result = greedy_detect_with(&table, 30, &SEQUENTIAL).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    let labels = table.labels().unwrap();
    let rare: BTreeSet<String> = ["1", "4"].map(String::from).into();
    let report = coverage_at(&result, labels, &rare, &[7, 16, 22, 30]).map_err(|e| e.to_string())?;
    let found = report.rare_found();
    ensure(report.total_rare == 6, || format!("expected 6 rare records, data has {}", report.total_rare))?;
    ensure(found[0] >= 5, || format!("only {} rare records in the top 7", found[0]))?;
    ensure(found[1..].iter().all(|&f| f == 6), || format!("rare found at k=16,22,30: {:?}", &found[1..]))?;
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("rare found at k=[7,16,22,30] = {found:?}, {:.4} s", elapsed.as_secs_f64()))
}

const WISCONSIN_LADDER: [usize; 13] = [4, 8, 16, 24, 32, 40, 48, 56, 64, 72, 80, 100, 112];
const WISCONSIN_EXPECTED: [usize; 13] = [4, 7, 15, 22, 27, 33, 36, 39, 39, 39, 39, 39, 39];
const WISCONSIN_SEED: u64 = 5;

fn wisconsin() -> Outcome {
    let start = Instant::now();
    let table = load_table(&LoadSpec {
        id_column: Some(ColumnSelector::Index(0)),
        label_column: Some(ColumnSelector::Index(10)),
        ..LoadSpec::new(data("breast-cancer-wisconsin.data"))
    })
    .and_then(|t| drop_missing(&t, "?"))
    .and_then(|t| downsample_class(&t, "4", 39, WISCONSIN_SEED))
    .map_err(|e| e.to_string())?;
    let result = greedy_detect_with(&table, 112, &SEQUENTIAL).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    let rare: BTreeSet<String> = ["4".to_string()].into();
    let report = coverage_at(&result, table.labels().unwrap(), &rare, &WISCONSIN_LADDER).map_err(|e| e.to_string())?;
    let found = report.rare_found();
    let summary = format!("{} records, rare found {found:?}", table.n());
    ensure(report.total_rare == 39, || format!("{summary}: expected 39 malignant"))?;
    let off: Vec<usize> = WISCONSIN_LADDER
        .iter()
        .zip(found.iter().zip(WISCONSIN_EXPECTED))
        .filter(|(_, (&got, want))| got.abs_diff(*want) > 2)
        .map(|(&k, _)| k)
        .collect();
    ensure(off.is_empty(), || format!("{summary}: outside +-2 at k = {off:?}"))?;
    let at_64 = found[WISCONSIN_LADDER.iter().position(|&k| k == 64).unwrap()];
    ensure(at_64 == 39, || format!("{summary}: {at_64}/39 by k=64"))?;
    ensure(elapsed < Duration::from_secs(2), || format!("took {elapsed:?}"))?;
    Ok(format!("{summary}, {:.4} s", elapsed.as_secs_f64()))
}

fn random_table(rng: &mut SeededStream, n: usize, m: usize, p: usize) -> CategoricalTable {
    let rows: Vec<Vec<String>> = (0..n)
        .map(|_| (0..m).map(|_| rng.uniform(p as u64).to_string()).collect())
        .collect();
    CategoricalTable::encode(&rows).unwrap()
}

fn between(rng: &mut SeededStream, lo: usize, hi: usize) -> usize {
    lo + rng.uniform((hi - lo + 1) as u64) as usize
}

fn oracle_equivalence() -> Outcome {
    let mut rng = SeededStream::new(0xACCE_0003);
    let mut worst = 0.0f64;
    for case in 0..200 {
        let (n, m, p) = (between(&mut rng, 2, 300), between(&mut rng, 1, 8), between(&mut rng, 1, 6));
        let k = between(&mut rng, 0, 8.min(n - 1));
        let table = random_table(&mut rng, n, m, p);
        let fast = greedy_detect_with(&table, k, &SEQUENTIAL).map_err(|e| e.to_string())?;
        let slow = naive_greedy_detect(&table, k).map_err(|e| e.to_string())?;
        ensure(fast.selected == slow.selected, || {
            format!("case {case} ({n}x{m}, p={p}, k={k}): {:?} != {:?}", fast.selected, slow.selected)
        })?;
        for (a, b) in fast.entropy_trace.iter().zip(&slow.entropy_trace) {
            worst = worst.max((a - b).abs());
        }
        ensure(worst <= 1e-9, || format!("case {case}: trace differs by {worst:e}"))?;
    }
    Ok(format!("200 tables, identical selections, max trace difference {worst:.1e}"))
}

/// Independent-attribute entropy of `rows`, counted with hash maps.
fn rebuilt_entropy<'a>(rows: impl Iterator<Item = &'a [u32]> + Clone, m: usize) -> f64 {
    let n = rows.clone().count() as f64;
    (0..m)
        .map(|j| {
            let mut counts: HashMap<u32, usize> = HashMap::new();
            for row in rows.clone() {
                *counts.entry(row[j]).or_default() += 1;
            }
            counts
                .values()
                .map(|&c| {
                    let q = c as f64 / n;
                    -q * q.ln()
                })
                .sum::<f64>()
        })
        .sum()
}

fn incremental_correctness() -> Outcome {
    let mut rng = SeededStream::new(0xACCE_0004);
    let mut worst = 0.0f64;
    for case in 0..1000 {
        let (n, m, p) = (between(&mut rng, 3, 200), between(&mut rng, 1, 8), between(&mut rng, 1, 6));
        let table = random_table(&mut rng, n, m, p);
        // Deactivate a random subset, keeping at least two records.
        let mut active = vec![true; n];
        let removals = between(&mut rng, 0, n - 2);
        for _ in 0..removals {
            active[rng.uniform(n as u64) as usize] = false;
        }
        let live: Vec<usize> = (0..n).filter(|&i| active[i]).collect();
        let record = live[rng.uniform(live.len() as u64) as usize];
        let model = FrequencyModel::from_active(&table, &active);
        let score = model.removal_score(table.row(record)).map_err(|e| e.to_string())?;
        let expected = rebuilt_entropy(live.iter().filter(|&&i| i != record).map(|&i| table.row(i)), m);
        worst = worst.max((score - expected).abs());
        ensure(worst <= 1e-9, || format!("case {case}: |{score} - {expected}| > 1e-9"))?;
    }
    Ok(format!("1000 pairs, max difference {worst:.1e}"))
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

fn exhaustive_checks() -> Outcome {
    let mut rng = SeededStream::new(0xACCE_0005);
    let (mut tables, mut optimal, mut worst_gap) = (0, 0, 0.0f64);
    while tables < 50 {
        let (n, m, p) = (between(&mut rng, 3, 30), between(&mut rng, 1, 6), between(&mut rng, 2, 5));
        let k = between(&mut rng, 1, 4.min(n - 1));
        if binomial(n, k) > 100_000 {
            continue;
        }
        tables += 1;
        let table = random_table(&mut rng, n, m, p);
        let greedy = greedy_detect_with(&table, k, &SEQUENTIAL).map_err(|e| e.to_string())?;
        let (_, optimum) = exhaustive_optimal(&table, k).map_err(|e| e.to_string())?;
        let gap = greedy.final_entropy() - optimum.nats();
        ensure(gap >= -1e-12, || format!("{n}x{m}, k={k}: greedy below optimum by {gap:e}"))?;
        worst_gap = worst_gap.max(gap);
        optimal += usize::from(gap <= 1e-12);

        let first = greedy_detect_with(&table, 1, &SEQUENTIAL).map_err(|e| e.to_string())?;
        let (best, h) = exhaustive_optimal(&table, 1).map_err(|e| e.to_string())?;
        ensure(first.selected == best && (first.final_entropy() - h.nats()).abs() <= 1e-12, || {
            format!("{n}x{m}: k=1 greedy {:?} vs optimum {best:?}", first.selected)
        })?;
    }
    Ok(format!("50 tables, greedy optimal on {optimal}, worst gap {worst_gap:.4} nats, k=1 always optimal"))
}

fn entropy_bounds() -> Outcome {
    let mut rng = SeededStream::new(0xACCE_0006);
    for case in 0..200 {
        let (n, m, p) = (between(&mut rng, 1, 120), between(&mut rng, 1, 6), between(&mut rng, 1, 6));
        let table = random_table(&mut rng, n, m, p);
        let joint = joint_entropy(&table, &vec![true; n]).map_err(|e| e.to_string())?.nats();
        let independent = FrequencyModel::from_table(&table)
            .independent_entropy()
            .map_err(|e| e.to_string())?
            .nats();
        let ceiling: f64 = (0..m).map(|j| (table.cardinality(j) as f64).ln()).sum();
        ensure(
            -1e-9 <= joint && joint <= independent + 1e-9 && independent <= ceiling + 1e-9,
            || format!("case {case}: joint {joint}, independent {independent}, ceiling {ceiling}"),
        )?;
    }
    Ok("200 tables within 1e-9".to_string())
}

fn check_factors(label: &str, factors: &[(usize, usize, f64)]) -> Result<String, String> {
    let text: Vec<String> = factors.iter().map(|(a, b, f)| format!("{a}->{b}: {f:.2}")).collect();
    ensure(!factors.is_empty(), || format!("{label}: no points"))?;
    ensure(factors.iter().all(|&(_, _, f)| (1.3..=3.0).contains(&f)), || {
        format!("{label} factors outside [1.3, 3.0]: {}", text.join(", "))
    })?;
    Ok(format!("{label} {}", text.join(", ")))
}

fn scalability() -> Outcome {
    let start = Instant::now();
    let base = SynthSpec::new(0, 10, 10, 5);
    let config = |axis, grid: Vec<usize>, fixed| BenchConfig {
        base: base.clone(),
        axis,
        grid,
        fixed,
        algorithms: vec![Algorithm::Incremental],
        repeats: 3,
        threads: 1,
        budget: Some(Duration::from_secs(600)),
    };
    let by_records = bench_scalability(
        &config(BenchAxis::Records, vec![12_500, 25_000, 50_000, 100_000], 30),
        |_| {},
    )
    .map_err(|e| e.to_string())?;
    let by_outliers = bench_scalability(&config(BenchAxis::Outliers, vec![10, 20, 30], 100_000), |_| {})
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    for report in [&by_records, &by_outliers] {
        ensure(report.aborted.is_none(), || format!("aborted: {:?}", report.aborted))?;
    }
    let records = check_factors("records", &by_records.doubling_factors(Algorithm::Incremental))?;
    let outliers = check_factors("outliers", &by_outliers.doubling_factors(Algorithm::Incremental))?;
    ensure(elapsed < Duration::from_secs(600), || format!("bench took {elapsed:?}"))?;
    Ok(format!("doubling-equivalent factors {records}; {outliers}"))
}

fn median_seconds(repeats: usize, mut run: impl FnMut() -> Result<(), String>) -> Result<f64, String> {
    let mut samples = Vec::with_capacity(repeats);
    for _ in 0..repeats {
        let start = Instant::now();
        run()?;
        samples.push(start.elapsed().as_secs_f64());
    }
    samples.sort_by(f64::total_cmp);
    Ok(samples[repeats / 2])
}

fn speedup() -> Outcome {
    const TARGET_N: usize = 50_000;
    const NAIVE_N: usize = 5_000;
    let table = entropy_outlier::generate_synthetic(&SynthSpec::new(TARGET_N, 10, 10, 5)).map_err(|e| e.to_string())?;
    let small = table.select_rows(&(0..NAIVE_N).collect::<Vec<_>>()).map_err(|e| e.to_string())?;

    let detect = |t: &CategoricalTable| greedy_detect_with(t, 30, &SEQUENTIAL).map(drop).map_err(|e| e.to_string());
    let incremental_target = median_seconds(3, || detect(&table))?;
    let incremental_small = median_seconds(3, || detect(&small))?;
    let naive_small = median_seconds(1, || naive_greedy_detect(&small, 30).map(drop).map_err(|e| e.to_string()))?;

    // Naive cost grows as n^2 for fixed k and m.
    let scale = (TARGET_N as f64 / NAIVE_N as f64).powi(2);
    let naive_target = naive_small * scale;
    let extrapolated = naive_target / incremental_target;
    let direct = naive_small / incremental_small;
    let summary = format!(
        "n={TARGET_N}: incremental {incremental_target:.4} s vs naive {naive_target:.1} s \
         (extrapolated x{scale} from {naive_small:.2} s at n={NAIVE_N}) = {extrapolated:.0}x; \
         direct at n={NAIVE_N}: {direct:.0}x"
    );
    ensure(extrapolated >= 5.0 && direct >= 5.0, || summary.clone())?;
    Ok(summary)
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let output = Command::new(env!("CARGO_BIN_EXE_entropy-outlier"))
        .args(args)
        .output()
        .map_err(|e| format!("cannot start the CLI: {e}"))?;
    ensure(output.status.success(), || {
        format!("{args:?} failed: {}", String::from_utf8_lossy(&output.stderr).trim())
    })
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let (data, one, eight) = (path("synthetic.data"), path("threads1.csv"), path("threads8.csv"));
    run_cli(&["generate", "--rows", "100000", "--attrs", "10", "--classes", "10", "--seed", "5", "--output", &data])?;
    for (threads, out) in [("1", &one), ("8", &eight)] {
        run_cli(&["detect", "--input", &data, "--label-col", "10", "--k", "30", "--threads", threads, "--output", out])?;
    }
    let a = std::fs::read(&one).map_err(|e| e.to_string())?;
    let b = std::fs::read(&eight).map_err(|e| e.to_string())?;
    ensure(a == b, || "result files differ between 1 and 8 threads".to_string())?;
    Ok(format!("100000 x 10, k=30: {} identical bytes", a.len()))
}
