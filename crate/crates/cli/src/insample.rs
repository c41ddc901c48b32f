//! `insample`: double selection at every horizon, then FDR adjustment
//! across the horizons of each (target, sentiment) pair.

use std::io::Write;

use rayon::prelude::*;

use figas_core::fdr::PValueSet;
use figas_core::linalg::Matrix;
use figas_core::selection::{
    double_lasso, weighted_double_selection, DoubleSelectionOptions, WeightedSelectionOptions,
};
use figas_core::CoreError;
use figas_realtime::DesignMatrix;

use crate::config::Config;
use crate::design::{designs_for, load_store};
use crate::error::Result;
use crate::output::{create, num};
use crate::score::load_sentiments;

#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub horizon: i64,
    pub target: String,
    /// Series name, e.g. `economy_all`.
    pub sentiment: String,
    /// `None` for the mean regression.
    pub tau: Option<f64>,
    pub beta: f64,
    pub se: f64,
    pub t: f64,
    pub p_raw: f64,
    pub n: usize,
    pub controls: usize,
    pub selected: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tile {
    pub target: String,
    pub sentiment: String,
    pub tau: Option<f64>,
    pub horizon: i64,
    pub p_adj: f64,
}

/// Controls, outcome and the named sentiment column over all rows.
pub fn estimation_data(d: &DesignMatrix, s_col: &str) -> Result<(Matrix<f64>, Vec<String>, Vec<f64>)> {
    let controls = d.control_columns();
    let rows: Vec<usize> = (0..d.n_rows()).collect();
    let x = Matrix::from_row_major(rows.len(), controls.len(), d.select(&rows, &controls)?);
    let s = d.select(&rows, &[s_col])?;
    Ok((x, controls.into_iter().map(String::from).collect(), s))
}

fn estimate_cell(d: &DesignMatrix, s_col: &str, tau: Option<f64>) -> std::result::Result<Estimate, String> {
    let (x, names, s) = estimation_data(d, s_col).map_err(|e| e.to_string())?;
    let name = s_col.trim_start_matches("S_").to_string();
    let fit = match tau {
        None => double_lasso(&x, &names, &d.y, &s, s_col, &DoubleSelectionOptions::default()),
        Some(t) => weighted_double_selection(&x, &names, &d.y, &s, s_col, t, &WeightedSelectionOptions::default()),
    }
    .map_err(|e: CoreError| e.to_string())?;
    let e = fit.estimate;
    Ok(Estimate {
        horizon: d.horizon,
        target: d.target.clone(),
        sentiment: name,
        tau,
        beta: e.beta,
        se: e.std_error,
        t: e.t_stat,
        p_raw: e.p_value,
        n: d.n_rows(),
        controls: names.len(),
        selected: fit.union.len(),
    })
}

/// Adjusts raw p-values across horizons per (target, sentiment, tau); failed cells stay out.
pub fn adjust(cfg: &Config, estimates: &[Estimate]) -> Result<Vec<Tile>> {
    let method = cfg.fdr()?;
    let mut keys: Vec<(String, String, Option<f64>)> = Vec::new();
    for e in estimates {
        let k = (e.target.clone(), e.sentiment.clone(), e.tau);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }
    let mut tiles = Vec::new();
    for (target, sentiment, tau) in keys {
        let cells: Vec<&Estimate> = estimates
            .iter()
            .filter(|e| e.target == target && e.sentiment == sentiment && e.tau == tau && e.p_raw.is_finite())
            .collect();
        if cells.is_empty() {
            continue;
        }
        let labels = cells.iter().map(|e| e.horizon.to_string()).collect();
        let set = PValueSet::new(labels, cells.iter().map(|e| e.p_raw).collect(), method, cfg.fdr_level)?;
        for (e, p) in cells.iter().zip(set.adjusted) {
            tiles.push(Tile {
                target: target.clone(),
                sentiment: sentiment.clone(),
                tau,
                horizon: e.horizon,
                p_adj: p,
            });
        }
    }
    Ok(tiles)
}

fn tau_suffix(tau: Option<f64>) -> String {
    tau.map_or_else(String::new, |t| format!("_q{t}"))
}

/// Writes `estimates[_q<tau>].csv` and `tiles[_q<tau>].csv`.
pub fn cmd_insample(cfg: &Config) -> Result<(Vec<Estimate>, Vec<Tile>)> {
    let store = load_store(cfg)?;
    let sentiments = load_sentiments(cfg)?;
    let mut taus: Vec<Option<f64>> = vec![None];
    if cfg.mode == "quantile" {
        taus.extend(cfg.taus.iter().map(|&t| Some(t)));
    }
    let mut estimates = Vec::new();
    for target in &cfg.targets {
        let designs = designs_for(cfg, &store, &sentiments, target)?;
        let mut cells: Vec<(&DesignMatrix, &String, Option<f64>)> = Vec::new();
        for d in &designs {
            for s in &d.sentiment_columns {
                cells.extend(taus.iter().map(|&t| (d, s, t)));
            }
        }
        let results: Vec<Estimate> = cells
            .par_iter()
            .map(|&(d, s, tau)| {
                estimate_cell(d, s, tau).unwrap_or_else(|err| {
                    eprintln!("estimation failed for {target} {s} h={} tau={tau:?}: {err}", d.horizon);
                    Estimate {
                        horizon: d.horizon,
                        target: target.clone(),
                        sentiment: s.trim_start_matches("S_").to_string(),
                        tau,
                        beta: f64::NAN,
                        se: f64::NAN,
                        t: f64::NAN,
                        p_raw: f64::NAN,
                        n: d.n_rows(),
                        controls: 0,
                        selected: 0,
                    }
                })
            })
            .collect();
        estimates.extend(results);
    }
    let tiles = adjust(cfg, &estimates)?;

    let dir = cfg.out_dir();
    for &tau in &taus {
        let suffix = tau_suffix(tau);
        let (_, mut w) = create(cfg, &dir, &format!("estimates{suffix}.csv"))?;
        let mut cw = csv::Writer::from_writer(&mut w);
        cw.write_record(["horizon", "target", "sentiment", "beta", "se", "t", "p_raw"])?;
        for e in estimates.iter().filter(|e| e.tau == tau) {
            cw.write_record([
                e.horizon.to_string(),
                e.target.clone(),
                e.sentiment.clone(),
                num(e.beta),
                num(e.se),
                num(e.t),
                num(e.p_raw),
            ])?;
        }
        cw.flush()?;
        drop(cw);
        w.flush()?;
        let (_, mut w) = create(cfg, &dir, &format!("tiles{suffix}.csv"))?;
        let mut cw = csv::Writer::from_writer(&mut w);
        cw.write_record(["target", "sentiment", "horizon", "p_adj"])?;
        for t in tiles.iter().filter(|t| t.tau == tau) {
            cw.write_record([t.target.clone(), t.sentiment.clone(), t.horizon.to_string(), num(t.p_adj)])?;
        }
        cw.flush()?;
        drop(cw);
        w.flush()?;
    }
    Ok((estimates, tiles))
}
