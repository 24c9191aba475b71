use std::fs;
use std::path::Path;
use std::process::ExitCode;

use serde::Serialize;

use csd_core::analysis::{analyze_bytes, Report};
use csd_core::selftest::{format_table, run_selftest, SelftestOptions};
use csd_core::synthetic::{gaussian_network, WeightScale};
use csd_core::{encode_tensor_file, EquivalenceVerdict, Error, Result};

pub const REPORT_FILE: &str = "report.json";
pub const CURVE_FILE: &str = "curve.csv";

fn with_path<T>(path: &Path, r: std::io::Result<T>) -> Result<T> {
    r.map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

pub fn analyze(
    weights: &Path,
    config: &csd_core::analysis::AnalysisConfig,
    threads: usize,
    out: &Path,
) -> Result<ExitCode> {
    let bytes = with_path(weights, fs::read(weights))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let outcome = pool.install(|| analyze_bytes(&bytes, config))?;

    with_path(out, fs::create_dir_all(out))?;
    let report_path = out.join(REPORT_FILE);
    let curve_path = out.join(CURVE_FILE);
    with_path(
        &report_path,
        fs::write(&report_path, outcome.report.to_json()),
    )?;
    with_path(&curve_path, fs::write(&curve_path, outcome.curve_csv()))?;

    let r = &outcome.report;
    eprintln!(
        "{}: m={} pooled={} in_range={:.4} | cue in_range={:.4} | Var(CSD)={:.6} cumulative={:.6} conjugate={}",
        r.architecture.as_deref().unwrap_or("network"),
        r.ensemble.m,
        r.ensemble.pooled_count,
        r.ensemble.in_range_fraction,
        r.cue.in_range_fraction,
        r.csd.variance,
        r.csd.cumulative_final,
        r.csd.conjugate,
    );
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct VerdictDocument<'a> {
    a: &'a str,
    b: &'a str,
    #[serde(flatten)]
    verdict: EquivalenceVerdict,
}

fn read_report(path: &Path) -> Result<Report> {
    let text = with_path(path, fs::read_to_string(path))?;
    Report::from_json(&text).map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))
}

pub fn compare(a: &Path, b: &Path, delta: f64, out: Option<&Path>) -> Result<ExitCode> {
    let ra = read_report(a)?;
    let rb = read_report(b)?;
    if ra.grid() != rb.grid() {
        return Err(Error::GridMismatch(format!(
            "{} uses [0, {}) x {}, {} uses [0, {}) x {}",
            a.display(),
            ra.config.eps_max,
            ra.config.bins,
            b.display(),
            rb.config.eps_max,
            rb.config.bins
        )));
    }
    if ra.config.scaling != rb.config.scaling || ra.config.reduction != rb.config.reduction {
        return Err(Error::InvalidArgument(
            "reports were produced with different scaling or reduction modes".into(),
        ));
    }
    if delta.is_nan() || delta < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "delta {delta} must be non-negative"
        )));
    }
    let verdict = EquivalenceVerdict::from_summaries(
        ra.csd.variance,
        ra.csd.conjugate,
        rb.csd.variance,
        rb.csd.conjugate,
        delta,
    );
    let doc = VerdictDocument {
        a: ra.architecture.as_deref().unwrap_or("a"),
        b: rb.architecture.as_deref().unwrap_or("b"),
        verdict,
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("verdict serializes");
    text.push('\n');
    print!("{text}");
    if let Some(path) = out {
        with_path(path, fs::write(path, &text))?;
    }
    Ok(ExitCode::SUCCESS)
}

pub fn selftest(seed: u64, tolerance_scale: f64) -> Result<ExitCode> {
    let results = run_selftest(&SelftestOptions {
        seed,
        tolerance_scale,
    });
    print!("{}", format_table(&results));
    Ok(if results.iter().all(|r| r.passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn parse_shapes(list: &str) -> Result<Vec<Vec<usize>>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.split('x')
                .map(|d| {
                    d.trim()
                        .parse::<usize>()
                        .map_err(|e| Error::InvalidArgument(format!("shape `{s}`: {e}")))
                })
                .collect()
        })
        .collect()
}

pub fn synth(
    list: &str,
    seed: u64,
    scale: WeightScale,
    architecture: &str,
    out: &Path,
) -> Result<ExitCode> {
    let shapes = parse_shapes(list)?;
    let refs: Vec<&[usize]> = shapes.iter().map(Vec::as_slice).collect();
    let collection = gaussian_network(&refs, seed, scale, architecture)?;
    with_path(out, fs::write(out, encode_tensor_file(&collection)))?;
    Ok(ExitCode::SUCCESS)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_parsing() {
        assert_eq!(
            parse_shapes("16x3x3x3, 32x16").unwrap(),
            vec![vec![16, 3, 3, 3], vec![32, 16]]
        );
        assert!(parse_shapes("").unwrap().is_empty());
        assert!(parse_shapes("4xq").is_err());
    }
}
