//! Publication-calendar fallbacks and the forecast horizon grid.

use std::collections::BTreeMap;

use chrono::{Datelike, Duration, NaiveDate};
use figas_text::calendar::Frequency;

use crate::vintage::VintageStore;

/// Release-date rules used when the store holds no actual release.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReleaseCalendar {
    /// Days after the period end, per variable.
    pub lags: BTreeMap<String, i64>,
    pub default_lag: i64,
}

impl Default for ReleaseCalendar {
    fn default() -> Self {
        Self { lags: BTreeMap::new(), default_lag: 30 }
    }
}

impl ReleaseCalendar {
    pub fn with_lag(mut self, variable: &str, days: i64) -> Self {
        self.lags.insert(variable.to_string(), days);
        self
    }

    /// CFNAI: the 23rd of the month after the period; otherwise period end plus the lag.
    pub fn rule_date(&self, variable: &str, period_end: NaiveDate) -> NaiveDate {
        if variable == "CFNAI" {
            let (y, m) = if period_end.month() == 12 {
                (period_end.year() + 1, 1)
            } else {
                (period_end.year(), period_end.month() + 1)
            };
            return NaiveDate::from_ymd_opt(y, m, 23).unwrap();
        }
        period_end + Duration::days(*self.lags.get(variable).unwrap_or(&self.default_lag))
    }
}

/// First release date from the store, else the calendar rule.
pub fn assign_release_date(
    store: &VintageStore,
    calendar: &ReleaseCalendar,
    variable: &str,
    period_end: NaiveDate,
) -> NaiveDate {
    store.nth_release(variable, period_end, 0).map_or_else(|| calendar.rule_date(variable, period_end), |(d, _)| d)
}

/// Default number of weekly horizons: 69 for quarterly targets, 25 otherwise.
pub fn default_horizon_count(target: Frequency) -> usize {
    if target == Frequency::Quarterly {
        69
    } else {
        25
    }
}

/// Horizons in days, one week apart, starting the day before the release.
pub fn horizon_grid(count: usize) -> Vec<i64> {
    (0..count as i64).map(|k| 1 + 7 * k).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vintage::Release;

    fn d(y: i32, m: u32, day: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, day).unwrap()
    }

    #[test]
    fn rules_and_precedence() {
        let cal = ReleaseCalendar::default().with_lag("X", 14);
        let store = VintageStore::new();
        assert_eq!(assign_release_date(&store, &cal, "CFNAI", d(2019, 3, 31)), d(2019, 4, 23));
        assert_eq!(assign_release_date(&store, &cal, "CFNAI", d(2019, 12, 31)), d(2020, 1, 23));
        assert_eq!(assign_release_date(&store, &cal, "X", d(2019, 6, 30)), d(2019, 7, 14));
        let store = VintageStore::from_releases([Release {
            variable: "CFNAI".into(),
            ref_period_end: d(2019, 3, 31),
            frequency: Frequency::Monthly,
            release_date: d(2019, 4, 20),
            value: 0.1,
        }])
        .unwrap();
        assert_eq!(assign_release_date(&store, &cal, "CFNAI", d(2019, 3, 31)), d(2019, 4, 20));
    }

    #[test]
    fn grid() {
        assert_eq!(horizon_grid(3), vec![1, 8, 15]);
        assert_eq!(horizon_grid(default_horizon_count(Frequency::Quarterly)).last(), Some(&477));
        assert_eq!(horizon_grid(default_horizon_count(Frequency::Monthly)).len(), 25);
    }
}
