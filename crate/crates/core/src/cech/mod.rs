//! Finite combinatorial covers and the gluing of chart-local splittings.
//!
//! The base space is a finite nerve: a region is a set of charts with a common overlap,
//! and a section over a chart is a value on every region containing it. Partitions of
//! unity are rational weights per region. Cochains live on regions and are written in the
//! coordinates of the region's first chart.

mod batchelor;
mod cochain;
mod gluing;

pub use batchelor::{
    cochain_difference, identity_lifts, project_and_split, project_and_split_from, BatchelorSplitting, LocalLifts,
    StageReport,
};
pub use cochain::{pou_coboundary, Cochain0, Cochain1, CochainValue, CocycleDefect, PartitionWeights};
pub use gluing::{members, Chart, CocycleReport, CocycleViolation, GluingData, MAX_CHARTS};
