//! Benchmark harness: generates (or loads) a test matrix, runs the requested
//! algorithms and reports timings and errors in table form.

pub mod error;
pub mod matrix_io;

use std::collections::hash_map::Entry;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use tsvd_core::low_rank::{low_rank_gram, low_rank_randomized};
use tsvd_core::ts_svd::ts_svd;
use tsvd_core::{
    generate_test_matrix, time_run, Algorithm, BlockRowMatrix, ErrorReport, RunConfig,
    SpectrumKind, SpectrumSpec,
};

pub use error::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Markdown,
}

/// Where the input matrix comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixSource {
    Generate { m: usize, n: usize, spectrum: SpectrumKind },
    Load(PathBuf),
}

/// One benchmark invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchSpec {
    pub algorithms: Vec<Algorithm>,
    pub source: MatrixSource,
    /// Sketch width, low-rank algorithms only.
    pub l: Option<usize>,
    /// Subspace iterations, low-rank algorithms only.
    pub iters: Option<usize>,
    pub run: RunConfig,
    pub format: OutputFormat,
}

impl BenchSpec {
    pub fn validate(&self) -> Result<(), BenchError> {
        self.run.validate().map_err(|e| BenchError::Usage(e.to_string()))?;
        let needs_rank = self.algorithms.iter().any(|a| a.is_low_rank());
        if needs_rank {
            if self.l.is_none() || self.iters.is_none() {
                return Err(BenchError::Usage(
                    "algorithms 7 and 8 require both --l and --iters".into(),
                ));
            }
        } else if self.l.is_some() || self.iters.is_some() {
            return Err(BenchError::Usage(
                "--l and --iters apply only to algorithms 7 and 8".into(),
            ));
        }
        if let Some(a) = self
            .algorithms
            .iter()
            .find(|a| !(a.is_low_rank() || Algorithm::TALL_SKINNY.contains(a)))
        {
            return Err(BenchError::Usage(format!("algorithm {a} cannot be benchmarked")));
        }
        if let MatrixSource::Generate { m, n, spectrum } = self.source {
            if n == 0 || m < n {
                return Err(BenchError::Usage(format!("need m >= n >= 1, got {m}x{n}")));
            }
            if let Some(l) = self.l {
                if l == 0 || l >= n {
                    return Err(BenchError::Usage(format!(
                        "need 0 < l < min(m, n) = {n}, got {l}"
                    )));
                }
                if spectrum == SpectrumKind::ExpDecay && l < 2 {
                    return Err(BenchError::Usage("exp spectrum needs l >= 2".into()));
                }
            }
        }
        Ok(())
    }

    /// Spectrum used for `algorithm`: all `n` values for tall-skinny runs,
    /// `l` values for low-rank runs.
    pub fn spectrum_for(&self, algorithm: Algorithm) -> Result<Option<SpectrumSpec>, BenchError> {
        match self.source {
            MatrixSource::Load(_) => Ok(None),
            MatrixSource::Generate { n, spectrum, .. } => {
                let k = if algorithm.is_low_rank() {
                    self.l.unwrap_or(n)
                } else {
                    n
                };
                Ok(Some(SpectrumSpec::new(spectrum, k)?))
            }
        }
    }
}

/// One row of output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchRow {
    pub algorithm: Algorithm,
    pub m: usize,
    pub n: usize,
    pub report: ErrorReport,
}

/// Runs one algorithm on `a`, timing only the factorization.
pub fn run_algorithm(
    a: &BlockRowMatrix,
    algorithm: Algorithm,
    l: Option<usize>,
    iters: Option<usize>,
    run: &RunConfig,
) -> Result<ErrorReport, BenchError> {
    let (result, cpu, wall) = time_run(|| match algorithm {
        Algorithm::LowRankRandomized => {
            low_rank_randomized(a, l.unwrap_or(0), iters.unwrap_or(0), run)
        }
        Algorithm::LowRankGram => low_rank_gram(a, l.unwrap_or(0), iters.unwrap_or(0), run),
        other => ts_svd(a, other, run),
    });
    let result = result?;
    if !result.is_finite() {
        return Err(BenchError::Numerical(format!(
            "algorithm {algorithm} produced non-finite factors"
        )));
    }
    let report = ErrorReport::measure(a, &result, run, cpu, wall)?;
    if !report.is_finite() {
        return Err(BenchError::Numerical(format!(
            "algorithm {algorithm} produced non-finite error estimates"
        )));
    }
    Ok(report)
}

/// Produces the matrix a row runs on, caching generated matrices by spectrum.
pub struct MatrixCache {
    loaded: Option<BlockRowMatrix>,
    generated: HashMap<SpectrumSpec, BlockRowMatrix>,
}

impl MatrixCache {
    pub fn new(spec: &BenchSpec) -> Result<Self, BenchError> {
        let loaded = match &spec.source {
            MatrixSource::Load(path) => Some(matrix_io::load_matrix(path, spec.run.block_rows)?),
            MatrixSource::Generate { .. } => None,
        };
        Ok(Self {
            loaded,
            generated: HashMap::new(),
        })
    }

    pub fn matrix(
        &mut self,
        spec: &BenchSpec,
        spectrum: Option<SpectrumSpec>,
    ) -> Result<&BlockRowMatrix, BenchError> {
        if let Some(a) = &self.loaded {
            return Ok(a);
        }
        let (MatrixSource::Generate { m, n, .. }, Some(s)) = (&spec.source, spectrum) else {
            unreachable!("generated source always has a spectrum");
        };
        let a = match self.generated.entry(s) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => e.insert(generate_test_matrix(*m, *n, &s, &spec.run)?),
        };
        Ok(a)
    }
}

/// Runs every requested algorithm; stops at the first failure.
pub fn run_bench(spec: &BenchSpec) -> Result<Vec<BenchRow>, BenchError> {
    spec.validate()?;
    let mut cache = MatrixCache::new(spec)?;
    let mut rows = Vec::with_capacity(spec.algorithms.len());
    for &algorithm in &spec.algorithms {
        let spectrum = spec.spectrum_for(algorithm)?;
        let a = cache.matrix(spec, spectrum)?;
        if let Some(l) = spec.l.filter(|_| algorithm.is_low_rank()) {
            if l >= a.n_rows().min(a.n_cols()) {
                return Err(BenchError::Usage(format!(
                    "need l < min(m, n) = {}, got {l}",
                    a.n_rows().min(a.n_cols())
                )));
            }
        }
        let report = run_algorithm(a, algorithm, spec.l, spec.iters, &spec.run)?;
        rows.push(BenchRow {
            algorithm,
            m: a.n_rows(),
            n: a.n_cols(),
            report,
        });
    }
    Ok(rows)
}

/// Three significant digits in E notation, e.g. `9.76E-12`.
pub fn sci(x: f64) -> String {
    format!("{x:.2E}")
}

const HEADERS: [&str; 6] = [
    "Algorithm",
    "CPU Time",
    "Wall-Clock",
    "||A-U S V^*||_2",
    "max|U^*U-I|",
    "max|V^*V-I|",
];

fn cells(row: &BenchRow) -> [String; 6] {
    let r = &row.report;
    [
        row.algorithm.to_string(),
        sci(r.cpu_seconds),
        sci(r.wall_seconds),
        sci(r.reconstruction),
        sci(r.left_ortho),
        sci(r.right_ortho),
    ]
}

pub fn render(rows: &[BenchRow], format: OutputFormat) -> String {
    let mut out = String::new();
    match format {
        OutputFormat::Csv => {
            writeln!(out, "{}", HEADERS.join(",")).unwrap();
            for row in rows {
                writeln!(out, "{}", cells(row).join(",")).unwrap();
            }
        }
        OutputFormat::Markdown => {
            writeln!(out, "| {} |", HEADERS.join(" | ")).unwrap();
            writeln!(out, "|{}", "---|".repeat(HEADERS.len())).unwrap();
            for row in rows {
                writeln!(out, "| {} |", cells(row).join(" | ")).unwrap();
            }
        }
    }
    out
}
