//! CSV and JSON output of campaign results.
//!
//! | file | columns |
//! |------|---------|
//! | `runs.csv` (sweeps) | `sigma,mean_id,seed,lcps,mean_abs_acc,max_throughput_vph,crashed` |
//! | `runs.csv` (OFAT) | `factor,` then the sweep columns |
//! | `runs.csv` (Sobol) | `row,seed,<factor...>,lcps,mean_abs_acc,max_throughput_vph,crashed` |
//! | `series_<metric>.csv` | `x,mean,std,n` (OFAT: `factor,x,mean,std,n`) |
//! | `trends.csv` | `metric,factor,r,p_value,significant,degenerate` |
//! | `sensitivity_<metric>.csv` | `factor,order,estimate,ci_low,ci_high` |
//! | `summary.json` | the complete [`CampaignResult`] |

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::campaign::{CampaignResult, Metric, RunRow, Series, TrendTest};
use super::config::ExperimentKind;
use crate::error::{Error, Result};
use crate::sensitivity::{SensitivityResult, SIGNIFICANCE_LEVEL};

fn path_error(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::OutputPath {
        path: path.to_path_buf(),
        source,
    }
}

/// Creates `dir` if needed and checks that files can be written into it.
pub fn prepare_output_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(path_error(dir))?;
    let probe = dir.join(".write-probe");
    File::create(&probe).map_err(path_error(&probe))?;
    fs::remove_file(&probe).map_err(path_error(&probe))?;
    Ok(())
}

fn create(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    let path = dir.join(name);
    let file = File::create(&path).map_err(path_error(&path))?;
    Ok((path, BufWriter::new(file)))
}

pub fn write_runs_csv<W: Write>(mut out: W, kind: ExperimentKind, factor_names: &[String], rows: &[RunRow]) -> std::io::Result<()> {
    let metrics = "lcps,mean_abs_acc,max_throughput_vph,crashed";
    match kind {
        ExperimentKind::SobolHet | ExperimentKind::SobolMean => {
            let mut header = String::from("row,seed");
            for name in factor_names {
                header.push(',');
                header.push_str(name);
            }
            writeln!(out, "{header},{metrics}")?;
            for r in rows {
                write!(out, "{},{}", r.point, r.seed)?;
                for v in &r.design {
                    write!(out, ",{v}")?;
                }
                writeln!(out, ",{},{},{},{}", r.lcps, r.mean_abs_acc, r.max_throughput_vph, r.crashed)?;
            }
        }
        ExperimentKind::Ofat => {
            writeln!(out, "factor,sigma,mean_id,seed,{metrics}")?;
            for r in rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    r.factor.as_deref().unwrap_or(""),
                    r.sigma,
                    r.mean_id,
                    r.seed,
                    r.lcps,
                    r.mean_abs_acc,
                    r.max_throughput_vph,
                    r.crashed
                )?;
            }
        }
        ExperimentKind::HetSweep | ExperimentKind::Throughput => {
            writeln!(out, "sigma,mean_id,seed,{metrics}")?;
            for r in rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{},{}",
                    r.sigma, r.mean_id, r.seed, r.lcps, r.mean_abs_acc, r.max_throughput_vph, r.crashed
                )?;
            }
        }
    }
    Ok(())
}

pub fn write_series_csv<'a, W: Write>(mut out: W, series: impl IntoIterator<Item = &'a Series>, with_factor: bool) -> std::io::Result<()> {
    if with_factor {
        writeln!(out, "factor,x,mean,std,n")?;
    } else {
        writeln!(out, "x,mean,std,n")?;
    }
    for s in series {
        for p in &s.points {
            if with_factor {
                write!(out, "{},", s.factor.as_deref().unwrap_or(""))?;
            }
            writeln!(out, "{},{},{},{}", p.x, p.mean, p.std, p.n)?;
        }
    }
    Ok(())
}

pub fn write_trends_csv<'a, W: Write>(mut out: W, trends: impl IntoIterator<Item = &'a TrendTest>) -> std::io::Result<()> {
    writeln!(out, "metric,factor,r,p_value,significant,degenerate")?;
    for t in trends {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            t.metric.name(),
            t.factor.as_deref().unwrap_or("sigma"),
            t.r,
            t.p_value,
            t.significant,
            t.degenerate
        )?;
    }
    Ok(())
}

pub fn write_sensitivity_csv<W: Write>(mut out: W, result: &SensitivityResult) -> std::io::Result<()> {
    writeln!(out, "factor,order,estimate,ci_low,ci_high")?;
    for (name, s) in result.factors.iter().zip(&result.first) {
        writeln!(out, "{name},first,{},{},{}", s.estimate, s.ci_low, s.ci_high)?;
    }
    for (name, s) in result.factors.iter().zip(&result.total) {
        writeln!(out, "{name},total,{},{},{}", s.estimate, s.ci_low, s.ci_high)?;
    }
    for pair in &result.second {
        let s = pair.index;
        writeln!(
            out,
            "{}:{},second,{},{},{}",
            result.factors[pair.i], result.factors[pair.j], s.estimate, s.ci_low, s.ci_high
        )?;
    }
    Ok(())
}

/// Writes every output file of `result` into `dir` and returns their paths.
pub fn emit_outputs(result: &CampaignResult, dir: &Path) -> Result<Vec<PathBuf>> {
    prepare_output_dir(dir)?;
    let mut written = Vec::new();
    let kind = result.config.kind;
    let factor_names: Vec<String> = result
        .sensitivity
        .first()
        .map(|s| s.result.factors.clone())
        .unwrap_or_else(|| result.config.factors().iter().map(|p| p.name().to_string()).collect());

    let mut finish = |name: &str, write: &dyn Fn(&mut BufWriter<File>) -> std::io::Result<()>| -> Result<()> {
        let (path, mut out) = create(dir, name)?;
        write(&mut out).and_then(|_| out.flush()).map_err(path_error(&path))?;
        written.push(path);
        Ok(())
    };

    finish("runs.csv", &|out| write_runs_csv(out, kind, &factor_names, &result.rows))?;

    let series_metrics: Vec<Metric> = Metric::ALL
        .into_iter()
        .filter(|m| result.series.iter().any(|s| s.metric == *m))
        .collect();
    for metric in series_metrics {
        let of_metric: Vec<&Series> = result.series.iter().filter(|s| s.metric == metric).collect();
        finish(&format!("series_{}.csv", metric.name()), &|out| {
            write_series_csv(out, of_metric.iter().copied(), kind == ExperimentKind::Ofat)
        })?;
    }
    if !result.trends.is_empty() {
        finish("trends.csv", &|out| write_trends_csv(out, &result.trends))?;
    }
    if kind == ExperimentKind::Ofat {
        finish("trends_significant.csv", &|out| {
            write_trends_csv(out, result.trends.iter().filter(|t| t.p_value < SIGNIFICANCE_LEVEL && !t.degenerate))
        })?;
    }
    for s in &result.sensitivity {
        finish(&format!("sensitivity_{}.csv", s.metric.name()), &|out| write_sensitivity_csv(out, &s.result))?;
    }
    finish("summary.json", &|out| {
        serde_json::to_writer_pretty(&mut *out, result).map_err(std::io::Error::other)?;
        writeln!(out)
    })?;
    Ok(written)
}

/// Reads a `summary.json` written by [`emit_outputs`].
pub fn read_summary(path: &Path) -> Result<CampaignResult> {
    let text = fs::read_to_string(path).map_err(path_error(path))?;
    Ok(serde_json::from_str(&text)?)
}
