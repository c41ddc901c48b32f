//! Period arithmetic shared by indicators and the real-time data layer.

use chrono::{Datelike, Duration, NaiveDate};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frequency {
    Daily,
    /// ISO weeks, Monday to Sunday.
    Weekly,
    Monthly,
    Quarterly,
}

impl Frequency {
    pub fn as_str(&self) -> &'static str {
        match self {
            Frequency::Daily => "daily",
            Frequency::Weekly => "weekly",
            Frequency::Monthly => "monthly",
            Frequency::Quarterly => "quarterly",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "d" | "daily" => Some(Frequency::Daily),
            "w" | "weekly" => Some(Frequency::Weekly),
            "m" | "monthly" => Some(Frequency::Monthly),
            "q" | "quarterly" => Some(Frequency::Quarterly),
            _ => None,
        }
    }
}

fn last_day_of_month(year: i32, month: u32) -> NaiveDate {
    let (y, m) = if month == 12 { (year + 1, 1) } else { (year, month + 1) };
    NaiveDate::from_ymd_opt(y, m, 1).unwrap() - Duration::days(1)
}

/// Last day of the period containing `d`.
pub fn period_end(d: NaiveDate, f: Frequency) -> NaiveDate {
    match f {
        Frequency::Daily => d,
        Frequency::Weekly => d + Duration::days(6 - i64::from(d.weekday().num_days_from_monday())),
        Frequency::Monthly => last_day_of_month(d.year(), d.month()),
        Frequency::Quarterly => last_day_of_month(d.year(), ((d.month() - 1) / 3) * 3 + 3),
    }
}

/// First day of the period containing `d`.
pub fn period_start(d: NaiveDate, f: Frequency) -> NaiveDate {
    match f {
        Frequency::Daily => d,
        Frequency::Weekly => d - Duration::days(i64::from(d.weekday().num_days_from_monday())),
        Frequency::Monthly => NaiveDate::from_ymd_opt(d.year(), d.month(), 1).unwrap(),
        Frequency::Quarterly => NaiveDate::from_ymd_opt(d.year(), ((d.month() - 1) / 3) * 3 + 1, 1).unwrap(),
    }
}

/// End of the period `k` steps after (negative: before) the one containing `d`.
pub fn shift_period(d: NaiveDate, f: Frequency, k: i64) -> NaiveDate {
    match f {
        Frequency::Daily => d + Duration::days(k),
        Frequency::Weekly => period_end(d, f) + Duration::days(7 * k),
        Frequency::Monthly | Frequency::Quarterly => {
            let step = if f == Frequency::Monthly { 1 } else { 3 };
            let end = period_end(d, f);
            let months = i64::from(end.year()) * 12 + i64::from(end.month0()) + k * step;
            let (y, m) = (months.div_euclid(12) as i32, months.rem_euclid(12) as u32 + 1);
            last_day_of_month(y, m)
        }
    }
}
