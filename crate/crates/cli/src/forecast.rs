//! `forecast`: pseudo out-of-sample forecasts re-estimated at every origin.
//!
//! For the row of target period t at horizon h the training set holds the
//! rows whose evaluation release came out on or before the forecast day
//! d - h, trimmed to the last `window` rows under the rolling scheme.

use std::io::Write;

use chrono::NaiveDate;
use rayon::prelude::*;

use figas_core::lasso::{lasso_scale, lasso_with, plugin_lambda_with, LassoOptions, PluginRule};
use figas_core::linalg::{dot, least_squares, Matrix};
use figas_core::quantile::quantile_regression;
use figas_core::selection::{double_lasso, DoubleSelectionOptions};
use figas_realtime::DesignMatrix;

use crate::config::Config;
use crate::design::{designs_for, load_store, target_frequency};
use crate::error::{CliError, Result};
use crate::output::{create, num};
use crate::score::load_sentiments;

pub const BENCHMARK: &str = "ARX";

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastRow {
    pub target: String,
    pub model: String,
    pub horizon: i64,
    pub period_end: NaiveDate,
    pub forecast_date: NaiveDate,
    /// `None` for the conditional mean.
    pub tau: Option<f64>,
    pub forecast: f64,
    pub actual: f64,
}

pub fn tau_label(tau: Option<f64>) -> String {
    tau.map_or_else(|| "mean".to_string(), |t| t.to_string())
}

pub fn parse_tau(s: &str) -> Option<Option<f64>> {
    if s == "mean" {
        Some(None)
    } else {
        s.parse().ok().map(Some)
    }
}

/// Options shared by every origin of one design.
#[derive(Debug, Clone)]
pub struct ForecastSetup {
    pub oos_start: NaiveDate,
    pub rolling: bool,
    pub window: usize,
    pub min_train: usize,
    pub taus: Vec<f64>,
}

struct Train<'a> {
    x: &'a Matrix<f64>,
    y: &'a [f64],
}

/// Post-selection fit on `[1 | cols...]`, evaluated at `at`.
fn refit(cols: &[Vec<f64>], y: &[f64], at: &[f64], tau: Option<f64>) -> figas_core::Result<f64> {
    let z = Matrix::from_columns(y.len(), cols).with_intercept();
    let coef = match tau {
        None => least_squares(&z, y, None)?,
        Some(t) => quantile_regression(&z, y, t)?.coef,
    };
    let mut row = vec![1.0];
    row.extend_from_slice(at);
    Ok(dot(&coef, &row))
}

fn lasso_select(tr: &Train, y: &[f64]) -> figas_core::Result<Vec<usize>> {
    if tr.x.ncols() == 0 {
        return Ok(Vec::new());
    }
    let lambda = lasso_scale(plugin_lambda_with(tr.x, y, &PluginRule::default(), None)?);
    Ok(lasso_with(tr.x, y, lambda, &LassoOptions::default())?.selected())
}

fn pick(x: &Matrix<f64>, keep: &[usize]) -> Vec<Vec<f64>> {
    keep.iter().map(|&j| x.column(j)).collect()
}

/// All model forecasts for one origin: ARX, ARXS per sentiment, Average and LASSO.
fn origin_forecasts(
    d: &DesignMatrix,
    controls: &[&str],
    train: &[usize],
    i: usize,
    taus: &[Option<f64>],
) -> figas_core::Result<Vec<(String, Option<f64>, f64)>> {
    let xc = Matrix::from_row_major(train.len(), controls.len(), d.select(train, controls).expect("known columns"));
    let xi = d.select(&[i], controls).expect("known columns");
    let y: Vec<f64> = train.iter().map(|&r| d.y[r]).collect();
    let tr = Train { x: &xc, y: &y };
    let names: Vec<String> = controls.iter().map(|c| c.to_string()).collect();
    let mut out = Vec::new();

    let arx = lasso_select(&tr, tr.y)?;
    let at = |keep: &[usize]| keep.iter().map(|&j| xi[j]).collect::<Vec<f64>>();
    for &tau in taus {
        out.push((BENCHMARK.to_string(), tau, refit(&pick(&xc, &arx), &y, &at(&arx), tau)?));
    }

    let mut arxs: Vec<Vec<f64>> = vec![Vec::new(); taus.len()];
    for s_col in &d.sentiment_columns {
        let s = d.select(train, &[s_col]).expect("known column");
        let si = d.select(&[i], &[s_col]).expect("known column")[0];
        let union: Vec<usize> = double_lasso(&xc, &names, &y, &s, s_col, &DoubleSelectionOptions::default())?
            .union
            .iter()
            .map(|n| names.iter().position(|m| m == n).expect("selected from names"))
            .collect();
        let mut cols = vec![s];
        cols.extend(pick(&xc, &union));
        let mut point = vec![si];
        point.extend(at(&union));
        let model = format!("ARXS_{}", s_col.trim_start_matches("S_"));
        for (k, &tau) in taus.iter().enumerate() {
            let f = refit(&cols, &y, &point, tau)?;
            arxs[k].push(f);
            out.push((model.clone(), tau, f));
        }
    }
    if !d.sentiment_columns.is_empty() {
        for (k, &tau) in taus.iter().enumerate() {
            out.push(("Average".to_string(), tau, arxs[k].iter().sum::<f64>() / arxs[k].len() as f64));
        }
        let mut all: Vec<&str> = controls.to_vec();
        all.extend(d.sentiment_columns.iter().map(String::as_str));
        let xa = Matrix::from_row_major(train.len(), all.len(), d.select(train, &all).expect("known columns"));
        let xai = d.select(&[i], &all).expect("known columns");
        let sel = lasso_select(&Train { x: &xa, y: &y }, &y)?;
        let point: Vec<f64> = sel.iter().map(|&j| xai[j]).collect();
        for &tau in taus {
            out.push(("LASSO".to_string(), tau, refit(&pick(&xa, &sel), &y, &point, tau)?));
        }
    }
    Ok(out)
}

/// Training rows for origin `i`: released by its forecast day, optionally the last `window`.
pub fn training_rows(d: &DesignMatrix, i: usize, setup: &ForecastSetup) -> Vec<usize> {
    let f = d.forecast_dates[i];
    let mut rows: Vec<usize> = (0..d.n_rows()).filter(|&r| r != i && d.target_release_dates[r] <= f).collect();
    if setup.rolling && rows.len() > setup.window {
        rows.drain(..rows.len() - setup.window);
    }
    rows
}

/// Forecasts for every out-of-sample row of one design.
pub fn forecast_design(d: &DesignMatrix, setup: &ForecastSetup) -> Vec<ForecastRow> {
    let controls = d.control_columns();
    let mut taus: Vec<Option<f64>> = vec![None];
    taus.extend(setup.taus.iter().map(|&t| Some(t)));
    let origins: Vec<usize> = (0..d.n_rows()).filter(|&i| d.periods[i] >= setup.oos_start).collect();
    origins
        .par_iter()
        .flat_map_iter(|&i| {
            let train = training_rows(d, i, setup);
            let rows = if train.len() < setup.min_train {
                eprintln!(
                    "{} h={} {}: {} training rows, origin skipped",
                    d.target,
                    d.horizon,
                    d.periods[i],
                    train.len()
                );
                Vec::new()
            } else {
                match origin_forecasts(d, &controls, &train, i, &taus) {
                    Ok(v) => v,
                    Err(e) => {
                        eprintln!("{} h={} {}: {e}, origin skipped", d.target, d.horizon, d.periods[i]);
                        Vec::new()
                    }
                }
            };
            rows.into_iter().map(move |(model, tau, forecast)| ForecastRow {
                target: d.target.clone(),
                model,
                horizon: d.horizon,
                period_end: d.periods[i],
                forecast_date: d.forecast_dates[i],
                tau,
                forecast,
                actual: d.y[i],
            })
        })
        .collect()
}

pub fn write_forecasts<W: Write>(rows: &[ForecastRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["target", "model", "horizon", "period_end", "forecast_date", "tau", "forecast", "actual"])?;
    for r in rows {
        w.write_record([
            r.target.clone(),
            r.model.clone(),
            r.horizon.to_string(),
            r.period_end.to_string(),
            r.forecast_date.to_string(),
            tau_label(r.tau),
            num(r.forecast),
            num(r.actual),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_forecasts<R: std::io::Read>(source: R) -> Result<Vec<ForecastRow>> {
    let mut rdr = crate::output::csv_reader(source);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let bad = |what: &str| CliError::Data(format!("forecasts line {line}: bad {what}"));
        if rec.len() != 8 {
            return Err(bad("column count"));
        }
        let date = |k: usize, what: &str| NaiveDate::parse_from_str(&rec[k], "%Y-%m-%d").map_err(|_| bad(what));
        let float = |k: usize, what: &str| rec[k].parse::<f64>().map_err(|_| bad(what));
        out.push(ForecastRow {
            target: rec[0].to_string(),
            model: rec[1].to_string(),
            horizon: rec[2].parse().map_err(|_| bad("horizon"))?,
            period_end: date(3, "period_end")?,
            forecast_date: date(4, "forecast_date")?,
            tau: parse_tau(&rec[5]).ok_or_else(|| bad("tau"))?,
            forecast: float(6, "forecast")?,
            actual: float(7, "actual")?,
        });
    }
    Ok(out)
}

/// Writes `forecasts.csv`.
pub fn cmd_forecast(cfg: &Config) -> Result<Vec<ForecastRow>> {
    let store = load_store(cfg)?;
    let sentiments = load_sentiments(cfg)?;
    let mut rows = Vec::new();
    for target in &cfg.targets {
        let freq = target_frequency(&store, target)?;
        let designs = designs_for(cfg, &store, &sentiments, target)?;
        let oos_start = match cfg.oos_start {
            Some(d) => d,
            None => designs[0].periods[designs[0].n_rows() / 2],
        };
        let setup = ForecastSetup {
            oos_start,
            rolling: cfg.rolling(freq),
            window: cfg.window,
            min_train: cfg.min_train,
            taus: if cfg.mode == "quantile" { cfg.taus.clone() } else { Vec::new() },
        };
        for d in &designs {
            rows.extend(forecast_design(d, &setup));
        }
    }
    if rows.is_empty() {
        return Err(CliError::Numerical("no forecast origin could be estimated".into()));
    }
    let (_, mut w) = create(cfg, &cfg.out_dir(), "forecasts.csv")?;
    write_forecasts(&rows, &mut w)?;
    w.flush()?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::Duration;

    /// y = 2 + 0.8 x1 exactly; x2, x3 are unrelated; one sentiment column.
    fn noiseless_design(n: usize) -> DesignMatrix {
        let start = NaiveDate::from_ymd_opt(2010, 1, 31).unwrap();
        let mut d = DesignMatrix {
            target: "Y".into(),
            horizon: 1,
            columns: vec!["intercept".into(), "x1".into(), "x2".into(), "x3".into(), "S_a_all".into()],
            sentiment_columns: vec!["S_a_all".into()],
            periods: vec![],
            release_dates: vec![],
            forecast_dates: vec![],
            target_release_dates: vec![],
            y: vec![],
            x: vec![],
            mask: vec![],
            sources: vec![],
            dropped: vec![],
        };
        for i in 0..n {
            let t = i as f64;
            let (x1, x2, x3, s) = ((0.7 * t).sin() * 3.0, (1.3 * t).cos(), (0.37 * t).sin(), (0.11 * t).cos());
            let p = start + Duration::days(30 * i as i64);
            d.periods.push(p);
            d.release_dates.push(p + Duration::days(16));
            d.forecast_dates.push(p + Duration::days(15));
            d.target_release_dates.push(p + Duration::days(16));
            d.y.push(2.0 + 0.8 * x1);
            d.x.push(vec![1.0, x1, x2, x3, s]);
            d.mask.push(vec![false; 5]);
            d.sources.push(vec![None; 5]);
        }
        d
    }

    fn setup(d: &DesignMatrix) -> ForecastSetup {
        ForecastSetup { oos_start: d.periods[40], rolling: true, window: 30, min_train: 20, taus: vec![] }
    }

    #[test]
    fn perfect_foresight_gives_zero_error() {
        let d = noiseless_design(60);
        let rows = forecast_design(&d, &setup(&d));
        let arx: Vec<&ForecastRow> = rows.iter().filter(|r| r.model == BENCHMARK).collect();
        assert_eq!(arx.len(), 20);
        for r in arx {
            assert!((r.forecast - r.actual).abs() < 1e-9, "{} vs {}", r.forecast, r.actual);
        }
    }

    #[test]
    fn average_of_one_sentiment_is_that_arxs() {
        let d = noiseless_design(60);
        let rows = forecast_design(&d, &setup(&d));
        for p in d.periods.iter().skip(40) {
            let get = |m: &str| rows.iter().find(|r| &r.period_end == p && r.model == m).unwrap().forecast;
            assert_eq!(get("Average"), get("ARXS_a_all"));
        }
    }

    #[test]
    fn training_rows_respect_release_dates_and_window() {
        let d = noiseless_design(60);
        let s = setup(&d);
        let rows = training_rows(&d, 45, &s);
        assert_eq!(rows.len(), 30);
        assert!(rows.iter().all(|&r| d.target_release_dates[r] <= d.forecast_dates[45]));
        let rec = ForecastSetup { rolling: false, ..s };
        assert_eq!(training_rows(&d, 45, &rec), (0..45).collect::<Vec<_>>());
    }

    #[test]
    fn forecasts_csv_round_trip() {
        let d = noiseless_design(50);
        let s = ForecastSetup { taus: vec![0.5], ..setup(&d) };
        let rows = forecast_design(&d, &s);
        assert!(rows.iter().any(|r| r.tau == Some(0.5)));
        let mut buf = Vec::new();
        write_forecasts(&rows, &mut buf).unwrap();
        assert_eq!(read_forecasts(buf.as_slice()).unwrap(), rows);
    }
}
