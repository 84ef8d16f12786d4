use serde::{Deserialize, Serialize};

/// Outcome of one catalog test. `pass` is `statistic ≤ threshold`, which is
/// false when the statistic is NaN.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    pub test_id: String,
    pub statistic: f64,
    pub threshold: f64,
    pub pass: bool,
    pub replica_count: usize,
    /// Wall-clock seconds. This is the only field that is not a function of
    /// `(test_id, config, seed)`. Zero it for byte-reproducible output.
    pub runtime: f64,
}

impl TestReport {
    pub fn new(test_id: &str, statistic: f64, threshold: f64, replica_count: usize) -> TestReport {
        TestReport {
            test_id: test_id.to_string(),
            statistic,
            threshold,
            pass: statistic <= threshold,
            replica_count,
            runtime: 0.0,
        }
    }

    /// The same report with its threshold replaced and `pass` recomputed.
    pub fn with_threshold(mut self, threshold: f64) -> TestReport {
        self.threshold = threshold;
        self.pass = self.statistic <= threshold;
        self
    }
}
