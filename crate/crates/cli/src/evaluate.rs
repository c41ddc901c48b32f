//! `evaluate`: aSPA, fluctuation and fit-metric reports from `forecasts.csv`.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::Write;

use chrono::NaiveDate;
use serde::Serialize;

use figas_core::aspa::{aspa_test, AspaOptions, LossPanel};
use figas_core::fluctuation::{default_window, fluctuation_test, FluctuationResult};
use figas_core::linalg::Matrix;
use figas_core::loss::{loss, LossKind};
use figas_core::metrics::fit_metrics;

use crate::config::{Config, VERSION};
use crate::error::{CliError, Result};
use crate::forecast::{read_forecasts, tau_label, ForecastRow, BENCHMARK};
use crate::output::{create, num};

pub const ASPA_HEADER: [&str; 6] = ["target", "sentiment", "method", "statistic", "p_value", "config_hash"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AspaRow {
    pub target: String,
    /// Alternative model, e.g. `ARXS_economy_all`.
    pub sentiment: String,
    pub method: String,
    pub statistic: f64,
    pub p_value: f64,
    pub degenerate: bool,
    pub dates: usize,
    pub horizons: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FluctuationRow {
    pub target: String,
    pub model: String,
    pub horizon: i64,
    pub window: usize,
    pub critical_value: f64,
    pub date: NaiveDate,
    pub statistic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricRow {
    pub target: String,
    pub model: String,
    pub horizon: i64,
    pub r2: f64,
    pub rmse: f64,
    pub bench_r2: f64,
    pub bench_rmse: f64,
    pub delta_r2: f64,
    pub pct_delta_rmse: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Evaluation {
    pub aspa: Vec<AspaRow>,
    pub fluctuation: Vec<FluctuationRow>,
    pub metrics: Vec<MetricRow>,
}

type Cells = BTreeMap<(NaiveDate, i64), (f64, f64)>;

/// (target, tau) -> model -> (period, horizon) -> (forecast, actual); models in file order.
fn group(rows: &[ForecastRow]) -> Vec<((String, Option<f64>), Vec<(String, Cells)>)> {
    let mut out: Vec<((String, Option<f64>), Vec<(String, Cells)>)> = Vec::new();
    for r in rows {
        let key = (r.target.clone(), r.tau);
        let gi = match out.iter().position(|(k, _)| *k == key) {
            Some(i) => i,
            None => {
                out.push((key, Vec::new()));
                out.len() - 1
            }
        };
        let models = &mut out[gi].1;
        let mi = match models.iter().position(|(m, _)| *m == r.model) {
            Some(i) => i,
            None => {
                models.push((r.model.clone(), Cells::new()));
                models.len() - 1
            }
        };
        models[mi].1.insert((r.period_end, r.horizon), (r.forecast, r.actual));
    }
    out
}

fn loss_kinds(tau: Option<f64>) -> Vec<LossKind> {
    match tau {
        None => vec![LossKind::Squared],
        Some(_) => vec![LossKind::Check, LossKind::Interval],
    }
}

fn method_name(kind: LossKind, tau: Option<f64>) -> String {
    match tau {
        None => format!("aspa_{}", kind.as_str()),
        Some(t) => format!("aspa_{}_q{t}", kind.as_str()),
    }
}

/// Benchmark dates covering every benchmark horizon.
fn panel_axes(bench: &Cells) -> (Vec<i64>, Vec<NaiveDate>) {
    let horizons: BTreeSet<i64> = bench.keys().map(|k| k.1).collect();
    let dates: BTreeSet<NaiveDate> = bench.keys().map(|k| k.0).collect();
    let dates = dates.into_iter().filter(|d| horizons.iter().all(|h| bench.contains_key(&(*d, *h)))).collect();
    (horizons.into_iter().collect(), dates)
}

fn loss_matrix(
    cells: &Cells,
    dates: &[NaiveDate],
    horizons: &[i64],
    kind: LossKind,
    tau: Option<f64>,
) -> Result<Matrix<f64>> {
    let mut data = Vec::with_capacity(dates.len() * horizons.len());
    for d in dates {
        for h in horizons {
            let (f, a) = cells[&(*d, *h)];
            data.push(loss(kind, a - f, tau)?);
        }
    }
    Ok(Matrix::from_row_major(dates.len(), horizons.len(), data))
}

pub fn evaluate(cfg: &Config, rows: &[ForecastRow]) -> Result<Evaluation> {
    let mut out = Evaluation::default();
    let opts = AspaOptions { block_len: cfg.aspa_block, replications: cfg.aspa_reps, seed: cfg.seed };
    for ((target, tau), models) in group(rows) {
        let Some((_, bench)) = models.iter().find(|(m, _)| m == BENCHMARK) else {
            return Err(CliError::Data(format!("{target} tau={}: no {BENCHMARK} benchmark forecasts", tau_label(tau))));
        };
        let (horizons, dates) = panel_axes(bench);
        if dates.is_empty() {
            return Err(CliError::Data(format!("{target}: no date has benchmark forecasts at every horizon")));
        }
        for (model, cells) in models.iter().filter(|(m, _)| m != BENCHMARK) {
            for d in &dates {
                for h in &horizons {
                    if !cells.contains_key(&(*d, *h)) {
                        return Err(CliError::Data(format!(
                            "misaligned panel: {target} {model} tau={} has no forecast for ({d}, h={h})",
                            tau_label(tau)
                        )));
                    }
                }
            }
            for kind in loss_kinds(tau) {
                let b = loss_matrix(bench, &dates, &horizons, kind, tau)?;
                let a = loss_matrix(cells, &dates, &horizons, kind, tau)?;
                let panel = LossPanel::from_losses(
                    horizons.iter().map(|&h| h as usize).collect(),
                    dates.iter().map(|d| d.to_string()).collect(),
                    &b,
                    &a,
                )?;
                let rep = aspa_test(&panel, &opts)?;
                out.aspa.push(AspaRow {
                    target: target.clone(),
                    sentiment: model.clone(),
                    method: method_name(kind, tau),
                    statistic: rep.statistic,
                    p_value: rep.p_value,
                    degenerate: rep.degenerate,
                    dates: dates.len(),
                    horizons: horizons.len(),
                });
            }
            if tau.is_some() {
                continue;
            }
            let fl_h: Vec<i64> =
                if cfg.fluctuation_horizons.is_empty() { vec![horizons[0]] } else { cfg.fluctuation_horizons.clone() };
            for h in fl_h {
                let series: Vec<(NaiveDate, f64)> = dates
                    .iter()
                    .filter_map(|d| {
                        let (fb, a) = *bench.get(&(*d, h))?;
                        let (fa, _) = *cells.get(&(*d, h))?;
                        Some((*d, (a - fb).powi(2) - (a - fa).powi(2)))
                    })
                    .collect();
                let n = series.len();
                let m = cfg.fluctuation_window.unwrap_or_else(|| default_window(n).max(8));
                if m >= n || m < 8 {
                    eprintln!("{target} {model} h={h}: {n} dates too few for a fluctuation window of {m}");
                    continue;
                }
                let d: Vec<f64> = series.iter().map(|p| p.1).collect();
                let res: FluctuationResult<f64> = fluctuation_test(&d, m)?;
                for (mid, stat) in res.midpoints.iter().zip(&res.statistics) {
                    out.fluctuation.push(FluctuationRow {
                        target: target.clone(),
                        model: model.clone(),
                        horizon: h,
                        window: m,
                        critical_value: res.critical_value,
                        date: series[*mid].0,
                        statistic: *stat,
                    });
                }
            }
            for h in &horizons {
                let y: Vec<f64> = dates.iter().map(|d| bench[&(*d, *h)].1).collect();
                let fb: Vec<f64> = dates.iter().map(|d| bench[&(*d, *h)].0).collect();
                let fa: Vec<f64> = dates.iter().map(|d| cells[&(*d, *h)].0).collect();
                match fit_metrics(&y, &fa, &fb) {
                    Ok(m) => out.metrics.push(MetricRow {
                        target: target.clone(),
                        model: model.clone(),
                        horizon: *h,
                        r2: m.r2,
                        rmse: m.rmse,
                        bench_r2: m.bench_r2,
                        bench_rmse: m.bench_rmse,
                        delta_r2: m.delta_r2,
                        pct_delta_rmse: m.pct_delta_rmse,
                    }),
                    Err(e) => eprintln!("{target} {model} h={h}: fit metrics unavailable: {e}"),
                }
            }
        }
    }
    Ok(out)
}

fn write_csv<F>(cfg: &Config, name: &str, header: &[&str], mut rows: F) -> Result<()>
where
    F: FnMut(&mut csv::Writer<&mut std::io::BufWriter<File>>) -> Result<()>,
{
    let (_, mut w) = create(cfg, &cfg.out_dir(), name)?;
    {
        let mut cw = csv::Writer::from_writer(&mut w);
        cw.write_record(header)?;
        rows(&mut cw)?;
        cw.flush()?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `aspa.csv`, `aspa.json`, `table.csv`, `fluctuation.csv` and `fit_metrics.csv`.
pub fn cmd_evaluate(cfg: &Config) -> Result<Evaluation> {
    let path = cfg.out_dir().join("forecasts.csv");
    if !path.is_file() {
        return Err(CliError::Config(format!("forecast file {} does not exist", path.display())));
    }
    let rows = read_forecasts(File::open(&path)?)?;
    let ev = evaluate(cfg, &rows)?;
    let hash = cfg.hash();

    write_csv(cfg, "aspa.csv", &ASPA_HEADER, |w| {
        for r in &ev.aspa {
            w.write_record([&r.target, &r.sentiment, &r.method, &num(r.statistic), &num(r.p_value), &hash])?;
        }
        Ok(())
    })?;
    let json = serde_json::json!({ "version": VERSION, "config_hash": hash, "seed": cfg.seed, "aspa": ev.aspa });
    std::fs::write(cfg.out_dir().join("aspa.json"), serde_json::to_string_pretty(&json).expect("serializable") + "\n")?;

    // Table layout: one row per model, one column per target and loss.
    let mut columns: Vec<String> = Vec::new();
    let mut models: Vec<String> = Vec::new();
    for r in &ev.aspa {
        let c = format!("{}_{}", r.target, r.method);
        if !columns.contains(&c) {
            columns.push(c);
        }
        if !models.contains(&r.sentiment) {
            models.push(r.sentiment.clone());
        }
    }
    let mut header = vec!["model".to_string()];
    header.extend(columns.iter().cloned());
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv(cfg, "table.csv", &header_refs, |w| {
        for m in &models {
            let mut rec = vec![m.clone()];
            for c in &columns {
                let p = ev.aspa.iter().find(|r| &r.sentiment == m && &format!("{}_{}", r.target, r.method) == c);
                rec.push(p.map_or_else(String::new, |r| num(r.p_value)));
            }
            w.write_record(&rec)?;
        }
        Ok(())
    })?;
    write_csv(
        cfg,
        "fluctuation.csv",
        &["target", "model", "horizon", "window", "critical_value", "date", "statistic"],
        |w| {
            for r in &ev.fluctuation {
                w.write_record([
                    r.target.clone(),
                    r.model.clone(),
                    r.horizon.to_string(),
                    r.window.to_string(),
                    num(r.critical_value),
                    r.date.to_string(),
                    num(r.statistic),
                ])?;
            }
            Ok(())
        },
    )?;
    write_csv(
        cfg,
        "fit_metrics.csv",
        &["target", "model", "horizon", "r2", "rmse", "bench_r2", "bench_rmse", "delta_r2", "pct_delta_rmse"],
        |w| {
            for r in &ev.metrics {
                w.write_record([
                    r.target.clone(),
                    r.model.clone(),
                    r.horizon.to_string(),
                    num(r.r2),
                    num(r.rmse),
                    num(r.bench_r2),
                    num(r.bench_rmse),
                    num(r.delta_r2),
                    num(r.pct_delta_rmse),
                ])?;
            }
            Ok(())
        },
    )?;
    Ok(ev)
}
