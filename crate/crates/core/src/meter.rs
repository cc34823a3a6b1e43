//! Operation counting. One meter per algorithm invocation.

/// Counts the primitive operations an algorithm performs. "Runtime" in the
/// machine-independent sense is `total()`.
#[derive(Clone, Debug, Default, PartialEq, Eq, serde::Serialize)]
pub struct CostMeter {
    pub comparisons: u64,
    pub orientation_tests: u64,
    pub elements_touched: u64,
}

impl CostMeter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn compare(&mut self) {
        self.comparisons += 1;
    }

    #[inline]
    pub fn compare_n(&mut self, n: u64) {
        self.comparisons += n;
    }

    #[inline]
    pub fn orient(&mut self) {
        self.orientation_tests += 1;
    }

    #[inline]
    pub fn orient_n(&mut self, n: u64) {
        self.orientation_tests += n;
    }

    #[inline]
    pub fn touch(&mut self, n: u64) {
        self.elements_touched += n;
    }

    pub fn total(&self) -> u64 {
        self.comparisons + self.orientation_tests + self.elements_touched
    }

    pub fn merge(&mut self, other: &CostMeter) {
        self.comparisons += other.comparisons;
        self.orientation_tests += other.orientation_tests;
        self.elements_touched += other.elements_touched;
    }
}
