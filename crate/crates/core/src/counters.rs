//! Operation and allocation instrumentation.
//!
//! Counters live in thread-local storage and only grow. A
//! [`CounterSession`] snapshots them at creation and reports the
//! difference, so sessions running on different threads never see each
//! other's work.

use std::cell::Cell;
use std::fmt;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CounterReport {
    /// Per-element arithmetic operations executed by kernels.
    pub scalar_ops: u64,
    pub buffers_allocated: u64,
    pub bytes_allocated: u64,
}

impl CounterReport {
    fn since(self, start: CounterReport) -> CounterReport {
        CounterReport {
            scalar_ops: self.scalar_ops - start.scalar_ops,
            buffers_allocated: self.buffers_allocated - start.buffers_allocated,
            bytes_allocated: self.bytes_allocated - start.bytes_allocated,
        }
    }
}

impl fmt::Display for CounterReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "scalar_ops={} buffers_allocated={} bytes_allocated={}",
            self.scalar_ops, self.buffers_allocated, self.bytes_allocated
        )
    }
}

thread_local! {
    static TOTALS: Cell<CounterReport> = const { Cell::new(CounterReport {
        scalar_ops: 0,
        buffers_allocated: 0,
        bytes_allocated: 0,
    }) };
}

fn totals() -> CounterReport {
    TOTALS.with(Cell::get)
}

pub(crate) fn record_ops(n: usize) {
    TOTALS.with(|t| {
        let mut c = t.get();
        c.scalar_ops += n as u64;
        t.set(c);
    });
}

pub(crate) fn record_allocation(bytes: usize) {
    TOTALS.with(|t| {
        let mut c = t.get();
        c.buffers_allocated += 1;
        c.bytes_allocated += bytes as u64;
        t.set(c);
    });
}

/// Counts the work done on the current thread since the session started.
#[derive(Debug)]
pub struct CounterSession {
    start: CounterReport,
}

impl CounterSession {
    pub fn start() -> Self {
        CounterSession { start: totals() }
    }

    pub fn report(&self) -> CounterReport {
        totals().since(self.start)
    }

    pub fn reset(&mut self) {
        self.start = totals();
    }
}

/// Runs `f` inside a fresh session and returns its result with the counts.
pub fn measure<T>(f: impl FnOnce() -> T) -> (T, CounterReport) {
    let session = CounterSession::start();
    let out = f();
    (out, session.report())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sessions_report_deltas() {
        record_ops(5);
        let mut s = CounterSession::start();
        record_ops(3);
        record_allocation(16);
        assert_eq!(
            s.report(),
            CounterReport {
                scalar_ops: 3,
                buffers_allocated: 1,
                bytes_allocated: 16
            }
        );
        s.reset();
        assert_eq!(s.report(), CounterReport::default());
    }

    #[test]
    fn threads_are_isolated() {
        let s = CounterSession::start();
        std::thread::spawn(|| record_ops(1000)).join().unwrap();
        assert_eq!(s.report().scalar_ops, 0);
    }
}
