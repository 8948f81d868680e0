//! File formats, report rendering and benchmark helpers for the `bescheck`
//! command-line tool.

pub mod chain;
pub mod corpus;
pub mod report;

use std::time::{Duration, Instant};

use bescheck_core::engine::Clock;

/// Wall clock measured from construction.
#[derive(Clone, Copy, Debug)]
pub struct StdClock {
    origin: Instant,
}

impl StdClock {
    pub fn new() -> Self {
        StdClock { origin: Instant::now() }
    }
}

impl Default for StdClock {
    fn default() -> Self {
        Self::new()
    }
}

impl Clock for StdClock {
    fn now(&self) -> Duration {
        self.origin.elapsed()
    }
}
