//! `design`: real-time design matrices per target and horizon.

use std::fs::File;
use std::io::Write;

use figas_realtime::{build_designs, read_vintages, DesignMatrix, VintageStore};
use figas_text::{Frequency, SentimentSeries};

use crate::config::Config;
use crate::error::{CliError, Result};
use crate::output::create;
use crate::score::load_sentiments;

pub fn load_store(cfg: &Config) -> Result<VintageStore> {
    let path = cfg.input("vintages", &cfg.vintages)?;
    read_vintages(File::open(&path)?).map_err(|e| CliError::data(path.display(), e))
}

pub fn target_frequency(store: &VintageStore, target: &str) -> Result<Frequency> {
    store.frequency(target).ok_or_else(|| CliError::Config(format!("target {target} is not in the vintage store")))
}

/// Designs for every horizon of the grid; horizons without usable rows are reported and skipped.
pub fn designs_for(
    cfg: &Config,
    store: &VintageStore,
    sentiments: &[SentimentSeries],
    target: &str,
) -> Result<Vec<DesignMatrix>> {
    let freq = target_frequency(store, target)?;
    let spec = cfg.design_spec(target, freq)?;
    let grid = cfg.horizon_grid(freq);
    let mut out = Vec::with_capacity(grid.len());
    for (h, d) in grid.iter().zip(build_designs(store, sentiments, &spec, &grid)) {
        match d {
            Ok(d) => out.push(d),
            Err(figas_realtime::RealtimeError::EmptyDesign(m)) => eprintln!("skipping {target} h={h}: {m}"),
            Err(e) => return Err(e.into()),
        }
    }
    if out.is_empty() {
        return Err(CliError::Data(format!("{target}: no horizon has usable rows")));
    }
    Ok(out)
}

/// Writes `design/design_<target>_h<h>.csv` plus the `.mask.csv` sidecar.
pub fn cmd_design(cfg: &Config) -> Result<()> {
    let store = load_store(cfg)?;
    let sentiments = load_sentiments(cfg)?;
    let dir = cfg.out_dir().join("design");
    for target in &cfg.targets {
        for d in designs_for(cfg, &store, &sentiments, target)? {
            let stem = format!("design_{target}_h{}", d.horizon);
            let (_, mut w) = create(cfg, &dir, &format!("{stem}.csv"))?;
            d.write_csv(&mut w)?;
            w.flush()?;
            let (_, mut w) = create(cfg, &dir, &format!("{stem}.mask.csv"))?;
            d.write_mask_csv(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}
