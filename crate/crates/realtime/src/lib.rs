//! Real-time macro data: vintages, release calendars, transforms and
//! design matrices that respect the information set of the forecast day.

pub mod calendar;
pub mod design;
pub mod error;
pub mod transform;
pub mod vintage;

pub use calendar::{assign_release_date, default_horizon_count, horizon_grid, ReleaseCalendar};
pub use design::{build_design, build_designs, DesignMatrix, DesignSpec, DropReason, RegressorSpec};
pub use error::{RealtimeError, Result};
pub use transform::{inverse, transform, Transform};
pub use vintage::{information_set, read_vintages, write_vintages, Release, VintageStore};
