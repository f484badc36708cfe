//! Value-of-information assessment for shared perception records.
//!
//! * [`ahp`]: pairwise comparison matrices, principal eigenvector, consistency.
//! * [`voi`]: conditional attribute scores and their weighted aggregation.
//! * [`scheduler`]: ranking and threshold filtering of pending records.
//! * [`sweep`]: parameter sweeps and the built-in figure presets.
//! * [`config`]: JSON configuration, record and receiver files.

pub mod ahp;
pub mod config;
pub mod numfmt;
pub mod scheduler;
pub mod sweep;
pub mod voi;
