//! Repetition studies: estimator variance as a function of the number of
//! nodes, log–log slope fits, CSV persistence and an SVG plot.

mod csv_io;
mod expr;
mod plot;
mod slope;

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{builtin_integrand, estimate, Integrand};
use crate::orthopoly::is_perfect_square;
use crate::samplers::{self, JacobiSampler, Method, SpiralConfig};

pub use csv_io::{
    read_records, read_slopes, read_summary, write_records, write_records_to, write_slopes,
    write_summary, RECORD_HEADER, SLOPE_HEADER, SUMMARY_HEADER,
};
pub use expr::{parse_integrand, Expr};
pub use plot::{emit_plot, render_svg};
pub use slope::{fit_loglog_slope, fit_power_law, SlopeFit};

/// Resolves a builtin integrand name or an `expr:<expression>` string.
pub fn resolve_integrand(name: &str) -> Result<Integrand> {
    match name.strip_prefix("expr:") {
        Some(src) => parse_integrand(src),
        None => builtin_integrand(name),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub methods: Vec<Method>,
    pub n_list: Vec<usize>,
    pub reps: usize,
    /// Builtin name or `expr:<expression>`.
    pub integrand: String,
    pub master_seed: u64,
    pub spiral: SpiralConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            methods: Method::ALL.to_vec(),
            n_list: vec![16, 36, 64, 144, 256],
            reps: 200,
            integrand: "f1".into(),
            master_seed: 0,
            spiral: SpiralConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let invalid = |m: String| Err(Error::InvalidArgument(m));
        if self.methods.is_empty() {
            return invalid("at least one method is required".into());
        }
        let mut seen = self.methods.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.methods.len() {
            return invalid("methods must not repeat".into());
        }
        if self.n_list.is_empty() {
            return invalid("N list is empty".into());
        }
        if self.n_list[0] == 0 {
            return invalid("N values must be positive".into());
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return invalid(format!(
                "N list {:?} is not strictly ascending",
                self.n_list
            ));
        }
        if self.reps < 2 {
            return invalid(format!("reps must be at least 2, got {}", self.reps));
        }
        if self.methods.contains(&Method::Jacobi) {
            if let Some(n) = self.n_list.iter().find(|&&n| !is_perfect_square(n)) {
                return Err(Error::NotPerfectSquare { n: *n });
            }
        }
        resolve_integrand(&self.integrand)?;
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of one repetition, mixed from `(master, method, N, rep)`.
pub fn derive_seed(master: u64, method: Method, n: usize, rep: usize) -> u64 {
    let tag = method as u64 + 1;
    [tag, n as u64, rep as u64]
        .into_iter()
        .fold(splitmix64(master), |h, word| splitmix64(h ^ word))
}

/// Generator for the repetition seeded with `seed`.
pub fn rep_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One `(method, N, rep)` estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub method: Method,
    pub integrand: String,
    pub n: usize,
    pub rep: usize,
    pub seed: u64,
    pub estimate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub method: Method,
    pub integrand: String,
    pub n: usize,
    pub reps: usize,
    pub mean: f64,
    /// Unbiased (`n − 1`) sample variance.
    pub variance: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VarianceSummary {
    pub rows: Vec<SummaryRow>,
}

impl VarianceSummary {
    pub fn rows_for(&self, method: Method) -> impl Iterator<Item = &SummaryRow> {
        self.rows.iter().filter(move |r| r.method == method)
    }

    pub fn methods(&self) -> Vec<Method> {
        let mut m: Vec<Method> = self.rows.iter().map(|r| r.method).collect();
        m.sort();
        m.dedup();
        m
    }
}

/// Mean, unbiased variance and standard error of the mean.
pub fn mean_variance(values: &[f64]) -> (f64, f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let variance = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, variance, (variance / n).sqrt())
}

/// Groups records by `(method, N)` in first-appearance order.
pub fn summarize(records: &[Record]) -> VarianceSummary {
    let mut groups: BTreeMap<(Method, usize), (String, Vec<f64>)> = BTreeMap::new();
    for r in records {
        groups
            .entry((r.method, r.n))
            .or_insert_with(|| (r.integrand.clone(), Vec::new()))
            .1
            .push(r.estimate);
    }
    let rows = groups
        .into_iter()
        .map(|((method, n), (integrand, values))| {
            let (mean, variance, std_error) = mean_variance(&values);
            SummaryRow {
                method,
                integrand,
                n,
                reps: values.len(),
                mean,
                variance,
                std_error,
            }
        })
        .collect();
    VarianceSummary { rows }
}

#[derive(Debug, Clone)]
pub struct StudyOutput {
    pub records: Vec<Record>,
    pub summary: VarianceSummary,
}

/// Runs every `(method, N, rep)` of the study in parallel. Records come back
/// sorted by method, N and rep, independently of scheduling.
pub fn run_variance_study(cfg: &ExperimentConfig) -> Result<StudyOutput> {
    cfg.validate()?;
    let integrand = resolve_integrand(&cfg.integrand)?;

    let mut methods = cfg.methods.clone();
    methods.sort();

    let jacobi: BTreeMap<usize, JacobiSampler> = if methods.contains(&Method::Jacobi) {
        cfg.n_list
            .par_iter()
            .map(|&n| JacobiSampler::new(n).map(|s| (n, s)))
            .collect::<Result<_>>()?
    } else {
        BTreeMap::new()
    };

    let jobs: Vec<(Method, usize, usize)> = methods
        .iter()
        .flat_map(|&m| {
            cfg.n_list
                .iter()
                .flat_map(move |&n| (0..cfg.reps).map(move |rep| (m, n, rep)))
        })
        .collect();

    let records = jobs
        .par_iter()
        .map(|&(method, n, rep)| {
            let seed = derive_seed(cfg.master_seed, method, n, rep);
            let annotate = |source: Error| Error::Repetition {
                method: method.tag().to_string(),
                n,
                rep,
                seed,
                source: Box::new(source),
            };
            let mut rng = rep_rng(seed);
            let sample = match method {
                Method::Jacobi => jacobi[&n].sample(&mut rng),
                other => samplers::draw(other, n, &cfg.spiral, &mut rng),
            }
            .map_err(annotate)?
            .with_seed(seed);
            let est = estimate(&sample, &integrand).map_err(annotate)?;
            Ok(Record {
                method,
                integrand: integrand.name().to_string(),
                n,
                rep,
                seed,
                estimate: est.value,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let summary = summarize(&records);
    Ok(StudyOutput { records, summary })
}

/// Slope fits for every method of the summary.
pub fn fit_all_slopes(summary: &VarianceSummary) -> Result<Vec<SlopeFit>> {
    summary
        .methods()
        .into_iter()
        .map(|m| fit_loglog_slope(summary, m))
        .collect()
}
