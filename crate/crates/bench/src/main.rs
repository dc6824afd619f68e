use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use tsvd_bench::{matrix_io, render, run_bench, BenchError, BenchSpec, MatrixSource, OutputFormat};
use tsvd_core::config::{DEFAULT_BLOCK_ROWS, DEFAULT_POWER_ITERS, DEFAULT_WORKING_PRECISION};
use tsvd_core::{generate_test_matrix, spectrum_values, Algorithm, RunConfig, SpectrumKind, SpectrumSpec};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SpectrumArg {
    Exp,
    Staircase,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Markdown,
}

fn parse_algorithm(s: &str) -> Result<Algorithm, String> {
    let digits = s.trim().trim_start_matches("alg");
    digits
        .parse::<u8>()
        .ok()
        .and_then(Algorithm::from_number)
        .filter(|a| *a != Algorithm::Direct)
        .ok_or_else(|| format!("unknown algorithm {s:?}; expected one of 1, 2, 3, 4, 7, 8"))
}

/// Thin SVD and low-rank approximation benchmarks.
#[derive(Debug, Parser)]
#[command(name = "tsvd-bench", version)]
struct Cli {
    /// Algorithms to run (1-4 tall-skinny, 7-8 low-rank); repeat or comma-separate.
    #[arg(long, value_parser = parse_algorithm, value_delimiter = ',')]
    algorithm: Vec<Algorithm>,
    /// Rows of the generated matrix.
    #[arg(long, default_value_t = 10_000)]
    m: usize,
    /// Columns of the generated matrix.
    #[arg(long, default_value_t = 2_000)]
    n: usize,
    /// Sketch width for algorithms 7 and 8.
    #[arg(long)]
    l: Option<usize>,
    /// Subspace iterations for algorithms 7 and 8.
    #[arg(long)]
    iters: Option<usize>,
    #[arg(long, value_enum, default_value = "exp")]
    spectrum: SpectrumArg,
    #[arg(long, default_value_t = DEFAULT_WORKING_PRECISION)]
    working_precision: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_BLOCK_ROWS)]
    block_rows: usize,
    /// Power-method iterations for the reconstruction error.
    #[arg(long, default_value_t = DEFAULT_POWER_ITERS)]
    power_iters: usize,
    /// Worker threads (default: available cores).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Write the generated matrix to PATH.
    #[arg(long, value_name = "PATH")]
    dump: Option<PathBuf>,
    /// Read the input matrix from PATH instead of generating it.
    #[arg(long, value_name = "PATH", conflicts_with = "dump")]
    load: Option<PathBuf>,
    /// Print the singular values of the selected spectrum, one per line.
    #[arg(long)]
    print_spectrum: bool,
}

fn spectrum_kind(arg: SpectrumArg) -> SpectrumKind {
    match arg {
        SpectrumArg::Exp => SpectrumKind::ExpDecay,
        SpectrumArg::Staircase => SpectrumKind::Staircase,
    }
}

fn execute(cli: Cli) -> Result<(), BenchError> {
    if let Some(workers) = cli.workers {
        if workers == 0 {
            return Err(BenchError::Usage("--workers must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| BenchError::Usage(e.to_string()))?;
    }
    let run = RunConfig {
        working_precision: cli.working_precision,
        seed: cli.seed,
        block_rows: cli.block_rows,
        power_iters: cli.power_iters,
    };
    run.validate().map_err(|e| BenchError::Usage(e.to_string()))?;
    let kind = spectrum_kind(cli.spectrum);
    let k = cli.l.unwrap_or(cli.n);
    let usage = |e: tsvd_core::Error| BenchError::Usage(e.to_string());

    if cli.print_spectrum {
        for v in spectrum_values(&SpectrumSpec::new(kind, k).map_err(usage)?) {
            println!("{v:e}");
        }
    }
    if let Some(path) = &cli.dump {
        let spec = SpectrumSpec::new(kind, k).map_err(usage)?;
        let a = generate_test_matrix(cli.m, cli.n, &spec, &run).map_err(usage)?;
        matrix_io::dump_matrix(path, &a)?;
        eprintln!("wrote {}x{} matrix to {}", cli.m, cli.n, path.display());
    }
    if cli.algorithm.is_empty() {
        if cli.print_spectrum || cli.dump.is_some() {
            return Ok(());
        }
        return Err(BenchError::Usage("no --algorithm given".into()));
    }

    let source = match cli.load {
        Some(path) => MatrixSource::Load(path),
        None => MatrixSource::Generate {
            m: cli.m,
            n: cli.n,
            spectrum: kind,
        },
    };
    let spec = BenchSpec {
        algorithms: cli.algorithm,
        source,
        l: cli.l,
        iters: cli.iters,
        run,
        format: match cli.format {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Markdown => OutputFormat::Markdown,
        },
    };
    let rows = run_bench(&spec)?;
    print!("{}", render(&rows, spec.format));
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tsvd-bench: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
