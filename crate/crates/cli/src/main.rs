mod args;
mod manifest;

use std::collections::BTreeSet;
use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::Parser;
use entropy_outlier::bench::{bench_scalability, BenchAxis, BenchConfig, BenchReport};
use entropy_outlier::io::write_table;
use entropy_outlier::plot::render_svg;
use entropy_outlier::{
    coverage_at, downsample_class, drop_missing, generate_synthetic, greedy_detect_with, load_table,
    write_result, CategoricalTable, ColumnSelector, DetectOptions, Error, LoadSpec, SynthSpec,
};

use crate::args::{BenchArgs, Cli, Command, DetectArgs, EvaluateArgs, GenerateArgs, InputArgs};
use crate::manifest::{manifest_path, sha256_file, RunManifest};

/// Exit codes: 1 usage or configuration, 2 I/O, 3 internal invariant.
#[derive(Debug)]
pub struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self { code: 1, message: message.into() }
    }

    pub fn io(path: &Path, source: io::Error) -> Self {
        Self {
            code: 2,
            message: format!("{}: {source}", path.display()),
        }
    }

    pub fn invariant(message: impl Into<String>) -> Self {
        Self { code: 3, message: message.into() }
    }

    fn context(self, context: impl fmt::Display) -> Self {
        Self {
            code: self.code,
            message: format!("{context}: {}", self.message),
        }
    }
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        let code = match error {
            Error::Io { .. } => 2,
            Error::Invariant(_) | Error::InconsistentModel { .. } => 3,
            _ => 1,
        };
        Self {
            code,
            message: error.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let (command, expected_digest) = match (cli.manifest, cli.command) {
        (Some(path), _) => {
            let recorded = RunManifest::load(&path)?;
            eprintln!("replaying {} run from {}", recorded.command.name(), path.display());
            (recorded.command, recorded.input_sha256)
        }
        (None, Some(command)) => (command, None),
        (None, None) => return Err(Failure::usage("no subcommand given (try --help)")),
    };

    let mut manifest = RunManifest::new(command.clone());
    if let Some(input) = command.input() {
        let digest = sha256_file(&input.input)?;
        if let Some(expected) = expected_digest.filter(|e| *e != digest) {
            return Err(Failure::usage(format!(
                "{}: contents changed since the manifest was recorded (sha256 {digest}, expected {expected})",
                input.input.display()
            )));
        }
        manifest.input_sha256 = Some(digest);
    }

    match &command {
        Command::Detect(a) => detect(a, &mut manifest),
        Command::Evaluate(a) => evaluate(a, &mut manifest),
        Command::Generate(a) => generate(a, &mut manifest),
        Command::Bench(a) => bench(a, &mut manifest),
    }
}

fn selector(raw: &Option<String>) -> Option<ColumnSelector> {
    raw.as_deref().map(|s| s.parse().expect("column selector parsing is infallible"))
}

fn load_input(args: &InputArgs) -> Result<CategoricalTable, Failure> {
    let spec = LoadSpec {
        delimiter: args.delimiter,
        label_column: selector(&args.label_col),
        id_column: selector(&args.id_col),
        has_header: args.header,
        missing_token: args.missing_token.clone(),
        ..LoadSpec::new(&args.input)
    };
    let mut table = load_table(&spec)?;
    let loaded = table.n();
    if args.drop_missing {
        table = drop_missing(&table, &args.missing_token)?;
        eprintln!(
            "dropped {} records containing {:?}",
            loaded - table.n(),
            args.missing_token
        );
    }
    if let Some(raw) = &args.downsample {
        let (label, keep) = raw
            .rsplit_once(':')
            .and_then(|(l, k)| Some((l, k.parse::<usize>().ok()?)))
            .ok_or_else(|| Failure::usage(format!("--downsample expects LABEL:COUNT, got {raw:?}")))?;
        table = downsample_class(&table, label, keep, args.downsample_seed)?;
    }
    Ok(table)
}

fn resolved_threads(threads: usize) -> usize {
    if threads == 0 {
        std::thread::available_parallelism().map_or(1, |n| n.get())
    } else {
        threads
    }
}

fn detect(args: &DetectArgs, manifest: &mut RunManifest) -> Result<(), Failure> {
    let table = load_input(&args.input).map_err(|f| f.context(args.input.input.display()))?;
    println!(
        "loaded {} records x {} attributes from {}",
        table.n(),
        table.m(),
        args.input.input.display()
    );
    let options = DetectOptions {
        threads: args.threads,
        verify_cache: false,
    };
    let start = Instant::now();
    let result = greedy_detect_with(&table, args.k, &options).map_err(|e| Failure::from(e).context(args.input.input.display()))?;
    let elapsed = start.elapsed();

    write_result(&result, &table, &args.output)?;
    manifest.threads_resolved = Some(resolved_threads(args.threads));
    let manifest_file = manifest_path(&args.output);
    manifest.save(&manifest_file)?;

    println!("initial entropy: {:.6} nats", result.initial_entropy());
    println!("final entropy:   {:.6} nats", result.final_entropy());
    println!("selected {} records in {:.6} s", result.selected.len(), elapsed.as_secs_f64());
    println!("wrote {} and {}", args.output.display(), manifest_file.display());
    Ok(())
}

fn evaluate(args: &EvaluateArgs, manifest: &mut RunManifest) -> Result<(), Failure> {
    let table = load_input(&args.input).map_err(|f| f.context(args.input.input.display()))?;
    let labels = table
        .labels()
        .ok_or_else(|| Failure::usage("evaluate needs --label-col"))?
        .to_vec();
    let k = args
        .k_ladder
        .iter()
        .copied()
        .max()
        .ok_or_else(|| Failure::usage("--k-ladder is empty"))?;
    let options = DetectOptions {
        threads: args.threads,
        verify_cache: false,
    };
    let start = Instant::now();
    let result = greedy_detect_with(&table, k, &options).map_err(|e| Failure::from(e).context(args.input.input.display()))?;
    let elapsed = start.elapsed();

    let rare: BTreeSet<String> = args.rare.iter().cloned().collect();
    let report = coverage_at(&result, &labels, &rare, &args.k_ladder)?;
    write_with(&args.output, |out| report.write_delimited(out))?;
    manifest.threads_resolved = Some(resolved_threads(args.threads));
    let manifest_file = manifest_path(&args.output);
    manifest.save(&manifest_file)?;

    print!("{report}");
    println!("detection at k = {k} took {:.6} s", elapsed.as_secs_f64());
    println!("wrote {} and {}", args.output.display(), manifest_file.display());
    Ok(())
}

fn generate(args: &GenerateArgs, manifest: &mut RunManifest) -> Result<(), Failure> {
    let spec = SynthSpec {
        values_per_attribute: args.values,
        noise: args.noise,
        ..SynthSpec::new(args.rows, args.attrs, args.classes, args.seed)
    };
    let table = generate_synthetic(&spec)?;
    write_table(&table, &args.output, args.delimiter)?;
    let manifest_file = manifest_path(&args.output);
    manifest.save(&manifest_file)?;
    println!(
        "wrote {} records x {} attributes (+ label) to {}",
        table.n(),
        table.m(),
        args.output.display()
    );
    Ok(())
}

fn bench(args: &BenchArgs, manifest: &mut RunManifest) -> Result<(), Failure> {
    let base = SynthSpec {
        values_per_attribute: args.values,
        noise: args.noise,
        ..SynthSpec::new(args.rows, args.attrs, args.classes, args.seed)
    };
    let budget = match args.budget_secs {
        Some(s) if s.is_finite() && s > 0.0 => Some(Duration::from_secs_f64(s)),
        Some(s) => return Err(Failure::usage(format!("--budget-secs must be positive, got {s}"))),
        None => None,
    };
    let config = BenchConfig {
        base,
        axis: args.vary,
        grid: args.grid.clone(),
        fixed: match args.vary {
            BenchAxis::Records => args.k,
            BenchAxis::Outliers => args.rows,
        },
        algorithms: args.algorithms.clone(),
        repeats: args.repeat,
        threads: args.threads,
        budget,
    };
    config.validate()?;

    let file = File::create(&args.output).map_err(|e| Failure::io(&args.output, e))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{}", BenchReport::HEADER)
        .and_then(|_| out.flush())
        .map_err(|e| Failure::io(&args.output, e))?;

    // Each point is written and flushed as soon as it is measured.
    let columns = BenchReport::for_config(&config);
    let mut write_error = None;
    println!("{:>10}  {:>12}  {:>12}", config.axis.to_string(), "algorithm", "seconds");
    let report = bench_scalability(&config, |point| {
        println!("{:>10}  {:>12}  {:>12.6}", point.value, point.algorithm.to_string(), point.wall_seconds);
        if write_error.is_none() {
            if let Err(e) = columns
                .write_point(point, &mut out)
                .and_then(|_| out.flush())
            {
                write_error = Some(e);
            }
        }
    })?;
    if let Some(e) = write_error {
        return Err(Failure::io(&args.output, e));
    }
    drop(out);

    if let Some(plot) = &args.plot {
        std::fs::write(plot, render_svg(&report)).map_err(|e| Failure::io(plot, e))?;
    }
    manifest.threads_resolved = Some(resolved_threads(args.threads));
    let manifest_file = manifest_path(&args.output);
    manifest.save(&manifest_file)?;

    for algorithm in &config.algorithms {
        for (from, to, factor) in report.doubling_factors(*algorithm) {
            println!("{algorithm}: {from} -> {to} doubling-equivalent time factor {factor:.2}");
        }
    }
    if let Some(reason) = &report.aborted {
        return Err(Failure::usage(format!(
            "bench stopped early ({reason}); {} finished points kept in {}",
            report.points.len(),
            args.output.display()
        )));
    }
    println!("wrote {} and {}", args.output.display(), manifest_file.display());
    Ok(())
}

fn write_with(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> io::Result<()>) -> Result<(), Failure> {
    let file = File::create(path).map_err(|e| Failure::io(path, e))?;
    let mut out = BufWriter::new(file);
    body(&mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Failure::io(path, e))
}
