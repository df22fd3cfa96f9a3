use crate::physics::SourceParams;

use super::config::ExperimentConfig;
use super::detection::DetectionRecord;

/// Snapshot of the inputs that produced a stream.
#[derive(Debug, Clone, PartialEq)]
pub struct StreamHeader {
    pub source: SourceParams,
    pub experiment: ExperimentConfig,
}

/// Globally time-sorted detection records.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeTagStream {
    pub header: StreamHeader,
    records: Vec<DetectionRecord>,
}

impl TimeTagStream {
    /// Sorts the records into canonical (timestamp, channel, pulse) order.
    pub fn new(header: StreamHeader, mut records: Vec<DetectionRecord>) -> Self {
        records.sort_unstable();
        Self { header, records }
    }

    /// Wraps records that are already in canonical order.
    pub(crate) fn from_sorted(header: StreamHeader, records: Vec<DetectionRecord>) -> Self {
        debug_assert!(records.windows(2).all(|w| w[0] <= w[1]));
        Self { header, records }
    }

    pub fn records(&self) -> &[DetectionRecord] {
        &self.records
    }

    pub fn record_count(&self) -> usize {
        self.records.len()
    }

    /// Timestamps of one channel, non-decreasing.
    pub fn channel_timestamps(&self, channel: u16) -> Vec<u64> {
        self.records
            .iter()
            .filter(|r| r.channel == channel)
            .map(|r| r.timestamp)
            .collect()
    }

    pub fn channel_count(&self, channel: u16) -> usize {
        self.records.iter().filter(|r| r.channel == channel).count()
    }

    /// Run duration in ps implied by the pulse count.
    pub fn duration_ps(&self) -> f64 {
        self.header.experiment.n_pulses as f64 * self.header.source.rep_period()
    }
}
