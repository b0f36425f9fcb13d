//! Compensated accumulation for consumption totals.
//!
//! Budget comparisons sit exactly on ration boundaries for natural instance
//! families (e.g. equal per-pull consumption dividing the capacity), where
//! plain left-to-right summation drifts by enough ulps to change pull counts
//! and even flag spurious breaches. Neumaier summation keeps the running
//! total correctly rounded at these scales.

use serde::{Serialize, Serializer};

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// The correctly rounded value of everything added so far.
    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }

    /// Value after adding `x`, without committing.
    pub fn peek_add(&self, x: f64) -> f64 {
        let mut copy = *self;
        copy.add(x);
        copy.value()
    }
}

impl Serialize for CompensatedSum {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_f64(self.value())
    }
}
